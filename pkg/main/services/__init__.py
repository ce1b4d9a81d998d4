from .frames import Frame, validate_frame
from .algebras import ModalAlgebra, complex_algebra
from .duality import pfe, prime_filter_extension
from .harness import Universe, audit_closure, build_universe, fr_class

__all__ = [
    'Frame',
    'validate_frame',
    'ModalAlgebra',
    'complex_algebra',
    'pfe',
    'prime_filter_extension',
    'Universe',
    'audit_closure',
    'build_universe',
    'fr_class',
]
