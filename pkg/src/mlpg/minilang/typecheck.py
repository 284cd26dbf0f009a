"""Type checker and scope resolution for MiniLang.

Produces a TypedProgram: the AST annotated with per-variable-token
resolution, per-expression types, function signatures, and the context
needed later for slot extraction (expected type and scope snapshot at
every variable occurrence).
"""

from dataclasses import dataclass, field

from .ast import AstNode
from .types import TypeLattice, TypeLatticeError, BUILTINS


class TypecheckError(Exception):
    def __init__(self, message, token=None):
        where = f" at byte {token.start}" if token is not None else ""
        super().__init__(message + where)
        self.token = token


@dataclass(frozen=True)
class VarInfo:
    var_id: int
    name: str
    type: str
    decl_token: int     # token index of the declaring name token
    fn_name: str


@dataclass(frozen=True)
class FnSig:
    name: str
    param_names: tuple
    param_types: tuple
    return_type: str
    name_token: int
    param_tokens: tuple


@dataclass
class TypedProgram:
    ast: AstNode
    lattice: TypeLattice
    tokens: list                      # Token objects, in order
    leaf_nodes: list                  # leaf AstNodes, parallel to tokens
    vars: dict = field(default_factory=dict)          # var_id -> VarInfo
    var_of_token: dict = field(default_factory=dict)  # token idx -> VarInfo
    is_write: dict = field(default_factory=dict)      # token idx -> bool
    expected: dict = field(default_factory=dict)      # token idx -> (mode, type) | None
    scope_at: dict = field(default_factory=dict)      # token idx -> tuple of var_ids
    functions: dict = field(default_factory=dict)     # name -> FnSig
    fn_nodes: dict = field(default_factory=dict)      # name -> FunctionDeclaration node
    expr_type: dict = field(default_factory=dict)     # id(node) -> type name

    def leaf_pos(self, leaf_node):
        """Token index of a leaf AstNode."""
        cache = getattr(self, "_leaf_pos", None)
        if cache is None:
            cache = {id(n): i for i, n in enumerate(self.leaf_nodes)}
            self._leaf_pos = cache
        return cache[id(leaf_node)]

    def occurrences(self, fn_name):
        """Lexically ordered variable-occurrence token indices of a function."""
        return [i for i in sorted(self.var_of_token)
                if self.var_of_token[i].fn_name == fn_name]

    def variable_tokens(self, var_id):
        return [i for i in sorted(self.var_of_token)
                if self.var_of_token[i].var_id == var_id]


def _leaf_text(node):
    return node.token.text


class _Checker:
    def __init__(self, ast, base_lattice=None):
        self.ast = ast
        leaf_nodes = list(ast.leaves())
        self.prog = TypedProgram(
            ast=ast,
            lattice=TypeLattice(),
            tokens=[n.token for n in leaf_nodes],
            leaf_nodes=leaf_nodes,
        )
        if base_lattice is not None:
            self._copy_lattice(base_lattice)
        self.tok_idx = {id(n): i for i, n in enumerate(leaf_nodes)}
        self.scopes = []          # list of dicts name -> VarInfo
        self.next_var_id = 0
        self.fn = None            # current FnSig

    def _copy_lattice(self, base):
        done = set(BUILTINS)
        pending = [t for t in base.names if t not in done]
        while pending:
            rest = []
            for t in pending:
                supers = base.direct_supertypes(t)
                if supers <= done:
                    self.prog.lattice.add_type(t, supers)
                    done.add(t)
                else:
                    rest.append(t)
            if len(rest) == len(pending):
                raise TypeLatticeError("unresolvable base lattice")
            pending = rest

    # --- helpers -----------------------------------------------------------

    def idx(self, leaf_node):
        return self.tok_idx[id(leaf_node)]

    def require_type(self, name_leaf):
        name = _leaf_text(name_leaf)
        if not self.prog.lattice.has(name):
            raise TypecheckError(f"unknown type {name}", name_leaf.token)
        return name

    def lookup(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def declare(self, name_leaf, type_name):
        name = _leaf_text(name_leaf)
        if self.lookup(name) is not None:
            raise TypecheckError(f"duplicate variable {name}", name_leaf.token)
        info = VarInfo(self.next_var_id, name, type_name,
                       self.idx(name_leaf), self.fn.name)
        self.next_var_id += 1
        self.scopes[-1][name] = info
        self.prog.vars[info.var_id] = info
        return info

    def visible_ids(self):
        out = []
        for scope in self.scopes:
            out.extend(v.var_id for v in scope.values())
        return tuple(sorted(out))

    def record_use(self, name_leaf, expected, is_write=False):
        name = _leaf_text(name_leaf)
        info = self.lookup(name)
        if info is None:
            raise TypecheckError(f"unknown variable {name}", name_leaf.token)
        i = self.idx(name_leaf)
        self.prog.var_of_token[i] = info
        self.prog.is_write[i] = is_write
        self.prog.expected[i] = expected
        self.prog.scope_at[i] = self.visible_ids()
        return info

    def record_decl(self, name_leaf, info):
        i = self.idx(name_leaf)
        self.prog.var_of_token[i] = info
        self.prog.is_write[i] = True
        self.prog.expected[i] = None
        self.prog.scope_at[i] = self.visible_ids()

    def check_assignable(self, src, dst, token, what):
        if not self.prog.lattice.assignable(src, dst):
            raise TypecheckError(f"{what}: {src} is not assignable to {dst}", token)

    # --- declarations --------------------------------------------------------

    def run(self):
        fn_decls = []
        for child in self.ast.children:
            if child.symbol == "TypeDeclaration":
                self.check_typedecl(child)
            elif child.symbol == "FunctionDeclaration":
                fn_decls.append(child)
        for node in fn_decls:
            self.collect_signature(node)
        for node in fn_decls:
            self.check_function(node)
        return self.prog

    def check_typedecl(self, node):
        names = [c for c in node.children if c.is_leaf and c.token.kind == "identifier"]
        declared, supers = names[0], names[1:]
        try:
            self.prog.lattice.add_type(_leaf_text(declared),
                                       [_leaf_text(s) for s in supers])
        except TypeLatticeError as e:
            raise TypecheckError(str(e), declared.token) from None

    def collect_signature(self, node):
        name_leaf = node.children[1]
        name = _leaf_text(name_leaf)
        if name in self.prog.functions:
            raise TypecheckError(f"duplicate function {name}", name_leaf.token)
        plist = next(c for c in node.children if c.symbol == "ParameterList")
        params = [c for c in plist.children if c.symbol == "Parameter"]
        pnames, ptypes, ptoks = [], [], []
        for p in params:
            pnames.append(_leaf_text(p.children[0]))
            ptypes.append(self.require_type(p.children[2]))
            ptoks.append(self.idx(p.children[0]))
        ret = "void"
        for i, c in enumerate(node.children):
            if c.is_leaf and c.token.text == "->":
                ret = self.require_type(node.children[i + 1])
        sig = FnSig(name, tuple(pnames), tuple(ptypes), ret,
                    self.idx(name_leaf), tuple(ptoks))
        self.prog.functions[name] = sig
        self.prog.fn_nodes[name] = node

    def check_function(self, node):
        sig = self.prog.functions[_leaf_text(node.children[1])]
        self.fn = sig
        self.scopes = [{}]
        plist = next(c for c in node.children if c.symbol == "ParameterList")
        for p in (c for c in plist.children if c.symbol == "Parameter"):
            info = self.declare(p.children[0], self.require_type(p.children[2]))
            self.record_decl(p.children[0], info)
        body = node.children[-1]
        self.check_block(body, new_scope=False)
        self.fn = None

    # --- statements ----------------------------------------------------------

    def check_block(self, node, new_scope=True):
        if new_scope:
            self.scopes.append({})
        for c in node.children:
            if not c.is_leaf:
                self.check_stmt(c)
        if new_scope:
            self.scopes.pop()

    def check_stmt(self, node):
        sym = node.symbol
        if sym == "Block":
            self.check_block(node)
        elif sym == "VariableDeclaration":
            self.check_vardecl(node)
        elif sym == "AssignmentStatement":
            self.check_assign(node)
        elif sym == "IfStatement":
            self.check_if(node)
        elif sym == "WhileStatement":
            self.check_while(node)
        elif sym == "ReturnStatement":
            self.check_return(node)
        elif sym == "ExpressionStatement":
            self.check_expr(node.children[0], expected=None)
        else:
            raise TypecheckError(f"unexpected statement {sym}")

    def check_vardecl(self, node):
        name_leaf = node.children[1]
        type_name = self.require_type(node.children[3])
        init = None
        for i, c in enumerate(node.children):
            if c.is_leaf and c.token.text == "=":
                init = node.children[i + 1]
        if init is not None:
            t = self.check_expr(init, expected=("read", type_name))
            self.check_assignable(t, type_name, name_leaf.token, "initializer")
        info = self.declare(name_leaf, type_name)
        self.record_decl(name_leaf, info)

    def check_assign(self, node):
        target, rhs = node.children[0], node.children[2]
        if target.symbol == "TupleTarget":
            names = [c for c in target.children if c.symbol == "IdentifierName"]
            infos = [self.lookup(_leaf_text(n.children[0])) for n in names]
            for n, info in zip(names, infos):
                if info is None:
                    raise TypecheckError(
                        f"unknown variable {_leaf_text(n.children[0])}",
                        n.children[0].token)
            types = {i.type for i in infos}
            exp = ("read", infos[0].type) if len(types) == 1 else None
            t = self.check_expr(rhs, expected=exp)
            for n, info in zip(names, infos):
                self.check_assignable(t, info.type, n.children[0].token, "assignment")
                self.record_use(n.children[0], ("write", t), is_write=True)
        else:
            name_leaf = target.children[0]
            info = self.lookup(_leaf_text(name_leaf))
            if info is None:
                raise TypecheckError(f"unknown variable {_leaf_text(name_leaf)}",
                                     name_leaf.token)
            t = self.check_expr(rhs, expected=("read", info.type))
            self.check_assignable(t, info.type, name_leaf.token, "assignment")
            self.record_use(name_leaf, ("write", t), is_write=True)

    def check_if(self, node):
        cond = node.children[2]
        t = self.check_expr(cond, expected=("read", "bool"))
        if t != "bool":
            raise TypecheckError(f"if condition must be bool, got {t}")
        self.check_stmt(node.children[4])
        if len(node.children) > 5:
            self.check_stmt(node.children[6])

    def check_while(self, node):
        t = self.check_expr(node.children[2], expected=("read", "bool"))
        if t != "bool":
            raise TypecheckError(f"while condition must be bool, got {t}")
        self.check_stmt(node.children[4])

    def check_return(self, node):
        exprs = [c for c in node.children if not c.is_leaf]
        if not exprs:
            if self.fn.return_type != "void":
                raise TypecheckError(f"{self.fn.name} must return "
                                     f"{self.fn.return_type}")
            return
        if self.fn.return_type == "void":
            raise TypecheckError(f"{self.fn.name} returns void")
        t = self.check_expr(exprs[0], expected=("read", self.fn.return_type))
        self.check_assignable(t, self.fn.return_type,
                              node.children[0].token, "return")

    # --- expressions -----------------------------------------------------------

    def check_expr(self, node, expected):
        """Type an expression; `expected` is the (mode, type) context that a
        bare variable at this position would have to satisfy, or None when
        the context fixes no type."""
        sym = node.symbol
        if sym == "Literal":
            t = self.literal_type(node.children[0])
        elif sym == "IdentifierName":
            info = self.record_use(node.children[0], expected)
            t = info.type
        elif sym == "ParenthesizedExpression":
            t = self.check_expr(node.children[1], expected)
        elif sym == "UnaryExpression":
            t = self.check_unary(node)
        elif sym == "BinaryExpression":
            t = self.check_binary(node)
        elif sym == "InvocationExpression":
            t = self.check_call(node)
        else:
            raise TypecheckError(f"unexpected expression {sym}")
        self.prog.expr_type[id(node)] = t
        return t

    def literal_type(self, leaf_node):
        text = _leaf_text(leaf_node)
        if text in ("true", "false"):
            return "bool"
        if text.startswith('"'):
            return "string"
        return "int"

    def check_unary(self, node):
        op = _leaf_text(node.children[0])
        want = "bool" if op == "!" else "int"
        t = self.check_expr(node.children[1], expected=("read", want))
        if t != want:
            raise TypecheckError(f"operator {op} requires {want}, got {t}")
        return want

    def check_binary(self, node):
        lhs, op_leaf, rhs = node.children
        op = _leaf_text(op_leaf)
        if op in ("&&", "||"):
            return self._binary_fixed(lhs, rhs, op, "bool", "bool")
        if op in ("<", ">", "<=", ">="):
            return self._binary_fixed(lhs, rhs, op, "int", "bool")
        if op in ("-", "*", "/"):
            return self._binary_fixed(lhs, rhs, op, "int", "int")
        if op == "+":
            # int+int or string+string; resolve from whichever side is not a
            # bare variable first, defaulting to int.
            operand = self._peek_operand_type(lhs) or self._peek_operand_type(rhs) or "int"
            if operand not in ("int", "string"):
                raise TypecheckError(f"operator + requires int or string, got {operand}")
            return self._binary_fixed(lhs, rhs, op, operand, operand)
        if op in ("==", "!="):
            operand = self._peek_operand_type(lhs) or self._peek_operand_type(rhs)
            if operand is None:
                raise TypecheckError("cannot resolve operand type of ==")
            if operand not in ("int", "bool", "string"):
                raise TypecheckError(f"operator {op} requires a builtin type, "
                                     f"got {operand}")
            return self._binary_fixed(lhs, rhs, op, operand, "bool")
        raise TypecheckError(f"unknown operator {op}")

    def _peek_operand_type(self, node):
        """Resolve an operand's type without recording uses (used only for
        overload resolution of + and ==)."""
        if node.symbol == "Literal":
            return self.literal_type(node.children[0])
        if node.symbol == "IdentifierName":
            info = self.lookup(_leaf_text(node.children[0]))
            return info.type if info else None
        if node.symbol == "ParenthesizedExpression":
            return self._peek_operand_type(node.children[1])
        if node.symbol == "UnaryExpression":
            return "bool" if _leaf_text(node.children[0]) == "!" else "int"
        if node.symbol == "BinaryExpression":
            op = _leaf_text(node.children[1])
            if op in ("&&", "||", "==", "!=", "<", ">", "<=", ">="):
                return "bool"
            if op == "+":
                return self._peek_operand_type(node.children[0]) or \
                    self._peek_operand_type(node.children[2])
            return "int"
        if node.symbol == "InvocationExpression":
            sig = self.prog.functions.get(_leaf_text(node.children[0]))
            return sig.return_type if sig else None
        return None

    def _binary_fixed(self, lhs, rhs, op, operand_type, result_type):
        tl = self.check_expr(lhs, expected=("read", operand_type))
        tr = self.check_expr(rhs, expected=("read", operand_type))
        for t in (tl, tr):
            if t != operand_type:
                raise TypecheckError(f"operator {op} requires {operand_type}, got {t}")
        return result_type

    def check_call(self, node):
        name_leaf, arglist = node.children
        name = _leaf_text(name_leaf)
        sig = self.prog.functions.get(name)
        if sig is None:
            raise TypecheckError(f"unknown function {name}", name_leaf.token)
        args = [c for c in arglist.children if not c.is_leaf]
        if len(args) != len(sig.param_types):
            raise TypecheckError(
                f"{name} expects {len(sig.param_types)} arguments, "
                f"got {len(args)}", name_leaf.token)
        for arg, ptype in zip(args, sig.param_types):
            t = self.check_expr(arg, expected=("read", ptype))
            self.check_assignable(t, ptype, name_leaf.token, f"argument of {name}")
        return sig.return_type


def typecheck(ast, lattice=None):
    """Check a parsed Program; returns the annotated TypedProgram."""
    return _Checker(ast, lattice).run()


def vars_in_scope(prog: TypedProgram, slot_token: int):
    """Type-correct variables visible at a variable-occurrence token.

    Returns a set of (var_id, type). When the occurrence context fixes no
    expected type, only the variable actually used there is known-safe.
    """
    gold = prog.var_of_token[slot_token]
    exp = prog.expected[slot_token]
    if exp is None:
        return {(gold.var_id, gold.type)}
    mode, type_name = exp
    out = set()
    for var_id in prog.scope_at[slot_token]:
        info = prog.vars[var_id]
        if mode == "read":
            ok = prog.lattice.assignable(info.type, type_name)
        else:
            ok = prog.lattice.assignable(type_name, info.type)
        if ok:
            out.add((var_id, info.type))
    out.add((gold.var_id, gold.type))
    return out
