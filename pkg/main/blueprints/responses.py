import json
import logging

from flask import current_app, jsonify

from main.config import activate_limits
from main.constants.exit_codes import EXIT_USAGE, HTTP_STATUS
from main.errors import WorkbenchError


def command_response(command, *args, **kwargs):
    """Run a shared command under the app's limits and map its exit code to an HTTP status"""
    try:
        with activate_limits(current_app.config['LIMITS']):
            result = command(*args, **kwargs)
    except WorkbenchError as e:
        logging.info(f"{command.__name__} failed: {e}")
        body = {'error': str(e), 'exit_code': e.exit_code}
        partial = getattr(e, 'partial', None)
        if partial is not None:
            body['partial'] = partial.to_dict()
        return jsonify(body), HTTP_STATUS[e.exit_code]

    try:
        body = {'result': json.loads(result.output)}
    except json.JSONDecodeError:
        body = {'output': result.output}
    body['exit_code'] = result.exit_code
    return jsonify(body), HTTP_STATUS[result.exit_code]


def require(data, key):
    if not isinstance(data, dict) or key not in data:
        return None, (jsonify({'error': f'missing field {key!r}', 'exit_code': EXIT_USAGE}),
                      HTTP_STATUS[EXIT_USAGE])
    return data[key], None
