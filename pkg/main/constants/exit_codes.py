EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_USAGE = 2
EXIT_SIZE_GUARD = 3

# HTTP status used by the blueprints for each exit code
HTTP_STATUS = {
    EXIT_OK: 200,
    EXIT_PROPERTY_FAILURE: 422,
    EXIT_USAGE: 400,
    EXIT_SIZE_GUARD: 413,
}
