# Small frames in the frame JSON format, used by the docs, the CLI examples and the tests

B1 = {
    "kind": "box",
    "size": 2,
    "leq": [[0, 1]],
    "rel": [[0, 1], [1, 1]],
}

POINT_REFLEXIVE = {"kind": "box", "size": 1, "leq": [], "rel": [[0, 0]]}

POINT_IRREFLEXIVE = {"kind": "box", "size": 1, "leq": [], "rel": []}

IM_POINT = {"kind": "im", "size": 1, "leq": [], "nbhd": [[[0]]]}

CIN_POINT_EMPTY = {"kind": "cin", "size": 1, "leq": [], "nbox": [[]], "ndia": [[]]}

SI_CHAIN = {"kind": "si", "size": 2, "leq": [[0, 1]], "rel": [[0, 1], [1, 1]]}
