"""AST node structure and the canonical pretty printer."""

from .tokens import Token


class AstNode:
    """Interior grammar node or leaf token wrapper.

    Leaves hold exactly one token; interior nodes hold ordered children.
    The in-order leaf traversal of a tree is the token sequence it was
    parsed from.
    """

    __slots__ = ("symbol", "children", "token")

    def __init__(self, symbol, children=None, token=None):
        self.symbol = symbol
        self.children = children if children is not None else []
        self.token = token

    @property
    def is_leaf(self):
        return self.token is not None

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            for c in self.children:
                yield from c.leaves()

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def find(self, symbol):
        return [n for n in self.walk() if n.symbol == symbol]

    def __repr__(self):
        if self.is_leaf:
            return f"Leaf({self.token.text!r})"
        return f"Node({self.symbol}, {len(self.children)} children)"


def leaf(token: Token) -> AstNode:
    return AstNode("Token", token=token)


def structurally_equal(a: AstNode, b: AstNode) -> bool:
    if a.is_leaf != b.is_leaf:
        return False
    if a.is_leaf:
        return a.token.kind == b.token.kind and a.token.text == b.token.text
    if a.symbol != b.symbol or len(a.children) != len(b.children):
        return False
    return all(structurally_equal(x, y) for x, y in zip(a.children, b.children))


def pretty_print(ast: AstNode) -> str:
    """Canonical single-space formatting: leaf texts joined by one space."""
    return " ".join(n.token.text for n in ast.leaves())
