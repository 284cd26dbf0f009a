"""Recursive-descent parser for MiniLang.

Grammar:
    program   := typedecl* fndecl*
    typedecl  := "type" NAME ("extends" NAME ("," NAME)*)? ";"
    fndecl    := "fn" NAME "(" (param ("," param)*)? ")" ("->" NAME)? block
    param     := NAME ":" NAME
    block     := "{" stmt* "}"
    stmt      := vardecl | assign | if | while | return | exprstmt | block
    vardecl   := "var" NAME ":" NAME ("=" expr)? ";"
    assign    := (NAME | "(" NAME "," NAME ")") "=" expr ";"
    expr      := precedence climb over || && (==|!=) (<|>|<=|>=) (+|-) (*|/)
                 with unary !,- and primaries: literal, true/false, NAME,
                 NAME(args), (expr)
"""

from .ast import AstNode, leaf
from .tokens import Token


class ParseError(Exception):
    def __init__(self, expected, token):
        self.expected = set(expected)
        self.token = token
        where = f"{token.text!r} at byte {token.start}" if token else "end of input"
        super().__init__(f"expected one of {sorted(self.expected)}, found {where}")


_EOF = Token("punct", "<eof>", -1, -1)


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead=0):
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else _EOF

    def at(self, text, ahead=0):
        return self.peek(ahead).text == text

    def at_kind(self, kind):
        return self.peek().kind == kind

    def advance(self):
        t = self.peek()
        self.pos += 1
        return leaf(t)

    def expect(self, text):
        if not self.at(text):
            raise ParseError({text}, self.peek())
        return self.advance()

    def expect_name(self):
        if not self.at_kind("identifier"):
            raise ParseError({"identifier"}, self.peek())
        return self.advance()

    # --- declarations -----------------------------------------------------

    def program(self):
        children = []
        while self.at("type"):
            children.append(self.typedecl())
        while self.at("fn"):
            children.append(self.fndecl())
        if self.pos != len(self.tokens):
            raise ParseError({"fn", "type", "end of input"}, self.peek())
        return AstNode("Program", children)

    def typedecl(self):
        ch = [self.expect("type"), self.expect_name()]
        if self.at("extends"):
            ch.append(self.advance())
            ch.append(self.expect_name())
            while self.at(","):
                ch.append(self.advance())
                ch.append(self.expect_name())
        ch.append(self.expect(";"))
        return AstNode("TypeDeclaration", ch)

    def fndecl(self):
        ch = [self.expect("fn"), self.expect_name(), self.expect("(")]
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                params.append(self.advance())
                params.append(self.param())
        ch.append(AstNode("ParameterList", params))
        ch.append(self.expect(")"))
        if self.at("->"):
            ch.append(self.advance())
            ch.append(self.expect_name())
        ch.append(self.block())
        return AstNode("FunctionDeclaration", ch)

    def param(self):
        return AstNode("Parameter",
                       [self.expect_name(), self.expect(":"), self.expect_name()])

    # --- statements -------------------------------------------------------

    def block(self):
        ch = [self.expect("{")]
        while not self.at("}"):
            ch.append(self.stmt())
        ch.append(self.expect("}"))
        return AstNode("Block", ch)

    def stmt(self):
        if self.at("var"):
            return self.vardecl()
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            return self.while_stmt()
        if self.at("return"):
            return self.return_stmt()
        if self.at("{"):
            return self.block()
        if self.at("(") and self.peek(1).kind == "identifier" and self.at(",", 2):
            return self.tuple_assign()
        if self.at_kind("identifier") and self.at("=", 1):
            ch = [AstNode("IdentifierName", [self.expect_name()]),
                  self.expect("="), self.expr(), self.expect(";")]
            return AstNode("AssignmentStatement", ch)
        ch = [self.expr(), self.expect(";")]
        return AstNode("ExpressionStatement", ch)

    def tuple_assign(self):
        target = AstNode("TupleTarget", [
            self.expect("("),
            AstNode("IdentifierName", [self.expect_name()]),
            self.expect(","),
            AstNode("IdentifierName", [self.expect_name()]),
            self.expect(")"),
        ])
        ch = [target, self.expect("="), self.expr(), self.expect(";")]
        return AstNode("AssignmentStatement", ch)

    def vardecl(self):
        ch = [self.expect("var"), self.expect_name(), self.expect(":"),
              self.expect_name()]
        if self.at("="):
            ch.append(self.advance())
            ch.append(self.expr())
        ch.append(self.expect(";"))
        return AstNode("VariableDeclaration", ch)

    def if_stmt(self):
        ch = [self.expect("if"), self.expect("("), self.expr(),
              self.expect(")"), self.stmt()]
        if self.at("else"):
            ch.append(self.advance())
            ch.append(self.stmt())
        return AstNode("IfStatement", ch)

    def while_stmt(self):
        ch = [self.expect("while"), self.expect("("), self.expr(),
              self.expect(")"), self.stmt()]
        return AstNode("WhileStatement", ch)

    def return_stmt(self):
        ch = [self.expect("return")]
        if not self.at(";"):
            ch.append(self.expr())
        ch.append(self.expect(";"))
        return AstNode("ReturnStatement", ch)

    # --- expressions --------------------------------------------------------

    _LEVELS = [["||"], ["&&"], ["==", "!="], ["<", ">", "<=", ">="],
               ["+", "-"], ["*", "/"]]

    def expr(self, level=0):
        if level == len(self._LEVELS):
            return self.unary()
        node = self.expr(level + 1)
        while self.peek().text in self._LEVELS[level]:
            op = self.advance()
            rhs = self.expr(level + 1)
            node = AstNode("BinaryExpression", [node, op, rhs])
        return node

    def unary(self):
        if self.at("!") or self.at("-"):
            return AstNode("UnaryExpression", [self.advance(), self.unary()])
        return self.primary()

    def primary(self):
        t = self.peek()
        if t.kind == "literal" or t.text in ("true", "false"):
            return AstNode("Literal", [self.advance()])
        if t.kind == "identifier":
            if self.at("(", 1):
                name = self.advance()
                args = [self.expect("(")]
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        args.append(self.advance())
                        args.append(self.expr())
                args.append(self.expect(")"))
                return AstNode("InvocationExpression",
                               [name, AstNode("ArgumentList", args)])
            return AstNode("IdentifierName", [self.advance()])
        if self.at("("):
            ch = [self.advance(), self.expr(), self.expect(")")]
            return AstNode("ParenthesizedExpression", ch)
        raise ParseError({"literal", "identifier", "("}, t)


def parse(tokens):
    """Parse a token sequence into a Program AST."""
    return _Parser(list(tokens)).program()
