"""Program-graph construction from a typechecked MiniLang file."""

from dataclasses import dataclass

from ..minilang import build_cfg
from . import edges as et
from .dataflow import compute_may_sets, lexical_use_chain


@dataclass(frozen=True)
class GraphNode:
    node_id: int
    label: str
    is_token: bool
    var: str = None
    type: str = None


@dataclass
class ProgramGraph:
    nodes: list
    edges: dict                      # edge type name -> list[(src, dst)]
    file_id: str = ""

    def copy(self):
        return ProgramGraph(list(self.nodes),
                            {k: list(v) for k, v in self.edges.items()},
                            self.file_id)

    def add_edge(self, kind, src, dst):
        self.edges.setdefault(kind, []).append((src, dst))

    def token_node_ids(self):
        """Source token nodes in token order (pre-order ids are ordered)."""
        return [n.node_id for n in self.nodes if n.is_token]

    def check_invariants(self):
        n = len(self.nodes)
        for kind, pairs in self.edges.items():
            et.canonical(kind)
            assert len(set(pairs)) == len(pairs), f"duplicate edges in {kind}"
            for s, d in pairs:
                assert 0 <= s < n and 0 <= d < n, f"bad endpoint in {kind}"
            d = et.dual(kind)
            assert set(self.edges.get(d, [])) == {(b, a) for a, b in pairs}


@dataclass
class FileAnalysis:
    """Everything graph surgery needs about one source file."""
    prog: object
    graph: ProgramGraph
    tok2node: dict                   # token idx -> node id
    cfgs: dict                       # fn name -> Cfg
    file_id: str = ""


def _dedup(pairs):
    seen = set()
    out = []
    for p in pairs:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def syntax_edges(prog, graph, tok2node, node_of):
    child = []
    for node in prog.ast.walk():
        if node.is_leaf:
            continue
        src = node_of[id(node)]
        for c in node.children:
            child.append((src, node_of[id(c)]))
    graph.edges["Child"] = child
    toks = [tok2node[i] for i in range(len(prog.tokens))]
    graph.edges["NextToken"] = [(toks[i], toks[i + 1]) for i in range(len(toks) - 1)]


def dataflow_edges(prog, cfg, graph, tok2node):
    last_use, last_write = compute_may_sets(prog, cfg)
    for tok, targets in sorted(last_use.items()):
        for t in sorted(targets):
            graph.add_edge("LastUse", tok2node[tok], tok2node[t])
    for tok, targets in sorted(last_write.items()):
        for t in sorted(targets):
            graph.add_edge("LastWrite", tok2node[tok], tok2node[t])


def computed_from_edges(prog, graph, tok2node):
    for node in prog.ast.walk():
        if node.symbol == "AssignmentStatement":
            target, rhs = node.children[0], node.children[2]
            lhs_toks = [prog.leaf_pos(l) for l in target.leaves()
                        if prog.leaf_pos(l) in prog.var_of_token]
        elif node.symbol == "VariableDeclaration":
            rhs = None
            for i, c in enumerate(node.children):
                if c.is_leaf and c.token.text == "=":
                    rhs = node.children[i + 1]
            if rhs is None:
                continue
            lhs_toks = [prog.leaf_pos(node.children[1])]
        else:
            continue
        rhs_vars = [prog.leaf_pos(l) for l in rhs.leaves()
                    if prog.leaf_pos(l) in prog.var_of_token]
        for lt in lhs_toks:
            for rt in rhs_vars:
                graph.add_edge("ComputedFrom", tok2node[lt], tok2node[rt])


def semantic_edges(prog, graph, tok2node, node_of):
    # LastLexicalUse: chain same-variable occurrences in lexical order.
    for fn_name in prog.functions:
        for tok, prev in sorted(lexical_use_chain(prog, fn_name).items()):
            graph.add_edge("LastLexicalUse", tok2node[tok], tok2node[prev])

    # ReturnsTo: `return` keyword token -> declaring function name token.
    for fn_name, node in prog.fn_nodes.items():
        sig = prog.functions[fn_name]
        for ret in node.find("ReturnStatement"):
            ret_tok = prog.leaf_pos(ret.children[0])
            graph.add_edge("ReturnsTo", tok2node[ret_tok],
                           tok2node[sig.name_token])

    # FormalArgName: bare-variable call arguments -> formal parameter token,
    # for callees declared in this file.
    for call in prog.ast.find("InvocationExpression"):
        sig = prog.functions.get(call.children[0].token.text)
        if sig is None:
            continue
        arglist = call.children[1]
        args = [c for c in arglist.children if not c.is_leaf]
        for arg, ptok in zip(args, sig.param_tokens):
            if arg.symbol == "IdentifierName":
                atok = prog.leaf_pos(arg.children[0])
                if atok in prog.var_of_token:
                    graph.add_edge("FormalArgName", tok2node[atok],
                                   tok2node[ptok])

    # GuardedBy / GuardedByNegation: variable tokens inside guarded regions
    # -> the root AST node of every enclosing condition using that variable.
    for fn_name, node in prog.fn_nodes.items():
        _guard_edges(prog, graph, tok2node, node_of, node.children[-1], [])


def _cond_vars(prog, cond):
    return {prog.var_of_token[prog.leaf_pos(l)].var_id
            for l in cond.leaves() if prog.leaf_pos(l) in prog.var_of_token}


def _guard_edges(prog, graph, tok2node, node_of, node, guards):
    """guards: list of (cond_node_id, edge_kind, var_id set) active here."""
    if node.is_leaf:
        tok = prog.leaf_pos(node)
        info = prog.var_of_token.get(tok)
        if info is not None:
            for cond_id, kind, vars_in_cond in guards:
                if info.var_id in vars_in_cond:
                    graph.add_edge(kind, tok2node[tok], cond_id)
        return
    if node.symbol == "IfStatement":
        cond = node.children[2]
        cid = node_of[id(cond)]
        cvars = _cond_vars(prog, cond)
        _guard_edges(prog, graph, tok2node, node_of, node.children[4],
                     guards + [(cid, "GuardedBy", cvars)])
        if len(node.children) > 5:
            _guard_edges(prog, graph, tok2node, node_of, node.children[6],
                         guards + [(cid, "GuardedByNegation", cvars)])
        return
    if node.symbol == "WhileStatement":
        cond = node.children[2]
        cid = node_of[id(cond)]
        cvars = _cond_vars(prog, cond)
        _guard_edges(prog, graph, tok2node, node_of, node.children[4],
                     guards + [(cid, "GuardedBy", cvars)])
        return
    for c in node.children:
        _guard_edges(prog, graph, tok2node, node_of, c, guards)


def add_backward_edges(graph):
    """Fill every dual edge list with the exact transpose of its forward list."""
    for kind in et.FORWARD_EDGE_TYPES:
        pairs = _dedup(graph.edges.get(kind, []))
        graph.edges[kind] = pairs
        graph.edges[et.dual(kind)] = [(d, s) for s, d in pairs]
    return graph


def build_file_analysis(prog, file_id=""):
    """Build the full program graph (all 20 edge types) for one file."""
    node_of = {}
    nodes = []
    tok2node = {}
    for node in prog.ast.walk():
        nid = len(nodes)
        node_of[id(node)] = nid
        if node.is_leaf:
            tok_idx = prog.leaf_pos(node)
            info = prog.var_of_token.get(tok_idx)
            nodes.append(GraphNode(nid, node.token.text, True,
                                   var=info.name if info else None,
                                   type=info.type if info else None))
            tok2node[tok_idx] = nid
        else:
            nodes.append(GraphNode(nid, node.symbol, False))
    graph = ProgramGraph(nodes, {}, file_id)
    syntax_edges(prog, graph, tok2node, node_of)
    cfgs = {}
    for fn_name in prog.functions:
        cfg = build_cfg(prog, fn_name)
        cfgs[fn_name] = cfg
        dataflow_edges(prog, cfg, graph, tok2node)
    computed_from_edges(prog, graph, tok2node)
    semantic_edges(prog, graph, tok2node, node_of)
    add_backward_edges(graph)
    return FileAnalysis(prog, graph, tok2node, cfgs, file_id)
