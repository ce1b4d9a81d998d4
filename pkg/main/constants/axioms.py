from main.constants.signatures import Kind

# Sound rank-1 axioms, in the CLI formula syntax
STOCK_AXIOMS = {
    'normality': (Kind.BOX, [
        "box T <-> T",
        "box p & box q <-> box (p & q)",
    ]),
    'monotonicity': (Kind.IM, [
        "tri (p & q) & tri p <-> tri (p & q)",
    ]),
}

# Axiom sets whose frame classes are audited for closure
AUDIT_AXIOMS = {
    'normality': (Kind.BOX, STOCK_AXIOMS['normality'][1]),
    'reflexivity': (Kind.BOX, ["box p -> p"]),
    'upward': (Kind.IM, ["tri p -> tri (p | q)"]),
}


def get_axiom_set(name):
    """Return (kind, formulas) for a named axiom set, or None"""
    return AUDIT_AXIOMS.get(name) or STOCK_AXIOMS.get(name)
