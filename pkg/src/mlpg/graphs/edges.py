"""Edge-type enumeration: 10 forward types plus a backward dual of each."""

FORWARD_EDGE_TYPES = (
    "Child",
    "NextToken",
    "LastUse",
    "LastWrite",
    "ComputedFrom",
    "LastLexicalUse",
    "ReturnsTo",
    "FormalArgName",
    "GuardedBy",
    "GuardedByNegation",
)

_DUAL_SUFFIX = "Reverse"

EDGE_TYPES = FORWARD_EDGE_TYPES + tuple(t + _DUAL_SUFFIX for t in FORWARD_EDGE_TYPES)

# LastRead is the in-text alias of the LastUse figure/table name.
EDGE_TYPE_ALIASES = {"LastRead": "LastUse", "LastRead" + _DUAL_SUFFIX: "LastUse" + _DUAL_SUFFIX}

# Edge types that depend on which variable occupies a token position;
# these are stripped from the slot node during VarMisuse surgery.
VARIABLE_DEPENDENT = ("LastUse", "LastWrite", "LastLexicalUse",
                      "GuardedBy", "GuardedByNegation")

# The speculative edges inserted for candidate nodes.
SPECULATIVE = ("LastUse", "LastWrite", "LastLexicalUse")

SYNTAX_ONLY = ("NextToken", "Child")
DATAFLOW4 = ("NextToken", "Child", "LastUse", "LastWrite")
SEMANTIC_ONLY = tuple(t for t in FORWARD_EDGE_TYPES if t not in SYNTAX_ONLY)

EDGE_MASKS = {
    "full": FORWARD_EDGE_TYPES,
    "syntax": SYNTAX_ONLY,
    "semantic": SEMANTIC_ONLY,
    "dataflow4": DATAFLOW4,
}


class UnknownEdgeType(Exception):
    pass


def canonical(name):
    name = EDGE_TYPE_ALIASES.get(name, name)
    if name not in EDGE_TYPES:
        raise UnknownEdgeType(name)
    return name


def is_forward(name):
    return name in FORWARD_EDGE_TYPES


def dual(name):
    name = canonical(name)
    if name.endswith(_DUAL_SUFFIX):
        return name[: -len(_DUAL_SUFFIX)]
    return name + _DUAL_SUFFIX


def expand_mask(forward_types):
    """Forward type names -> frozenset including their duals."""
    out = set()
    for t in forward_types:
        t = canonical(t)
        if not is_forward(t):
            raise UnknownEdgeType(f"mask must name forward types, got {t}")
        out.add(t)
        out.add(dual(t))
    return frozenset(out)
