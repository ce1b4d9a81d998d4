from enum import Enum


class Kind(str, Enum):
    BOX = 'box'
    IM = 'im'
    CIN = 'cin'
    SI = 'si'


# Modal node names allowed in each signature
SIGNATURE_MODALITIES = {
    Kind.BOX: frozenset({'box'}),
    Kind.IM: frozenset({'tri'}),
    Kind.CIN: frozenset({'box', 'dia'}),
    Kind.SI: frozenset({'sto'}),
}

# Kinds with an algebra-to-frame dual construction
DUAL_KINDS = (Kind.BOX, Kind.IM, Kind.CIN)


def get_kind(name) -> Kind:
    from main.errors import KindError
    if isinstance(name, Kind):
        return name
    try:
        return Kind(str(name).lower())
    except ValueError:
        raise KindError(f"unknown frame kind {name!r}; expected one of box, im, cin, si")
