"""Task-specific graph surgery: slot insertion for VarMisuse, token
relabeling for VarNaming."""

from dataclasses import dataclass, field, replace

from ..minilang import vars_in_scope
from . import edges as et
from .build import GraphNode
from .dataflow import compute_may_sets, lexical_use_chain

SLOT_LABEL = "<SLOT>"


class SlotRejected(Exception):
    pass


@dataclass(frozen=True)
class Candidate:
    node: int
    name: str
    type: str
    gold: bool


@dataclass
class TaskSample:
    graph: object                    # ProgramGraph after surgery
    kind: str                        # "misuse" | "naming"
    slot_node: int = None            # misuse
    candidates: list = field(default_factory=list)
    slot_nodes: list = field(default_factory=list)   # naming
    gold_subtokens: list = None      # naming
    type_closures: dict = field(default_factory=dict)  # type -> sorted closure
    file_id: str = ""

    @property
    def gold_index(self):
        return next(i for i, c in enumerate(self.candidates) if c.gold)


def _closures(prog, names):
    out = {}
    for t in names:
        if t is not None and prog.lattice.has(t):
            out[t] = sorted(prog.lattice.supertype_closure(t))
    return out


def _speculative_edges(analysis, fn_name, slot_tok, cand_var_id):
    """LastUse/LastWrite/LastLexicalUse edges (token-index pairs) incident
    to the slot occurrence when `cand_var_id` is placed there."""
    prog = analysis.prog
    cfg = analysis.cfgs[fn_name]
    override = {slot_tok: cand_var_id}
    last_use, last_write = compute_may_sets(prog, cfg, override)
    out = {"LastUse": set(), "LastWrite": set(), "LastLexicalUse": set()}
    for kind, table in (("LastUse", last_use), ("LastWrite", last_write)):
        for t in table.get(slot_tok, ()):
            out[kind].add((slot_tok, t))
        for tok, targets in table.items():
            if tok != slot_tok and slot_tok in targets:
                out[kind].add((tok, slot_tok))
    chain = lexical_use_chain(prog, fn_name, override)
    if slot_tok in chain:
        out["LastLexicalUse"].add((slot_tok, chain[slot_tok]))
    for tok, prev in chain.items():
        if prev == slot_tok and tok != slot_tok:
            out["LastLexicalUse"].add((tok, slot_tok))
    return out


def make_varmisuse_sample(analysis, slot_tok):
    """Replace the variable token at `slot_tok` by a slot node and insert a
    speculatively-wired candidate node per type-correct in-scope variable."""
    prog = analysis.prog
    info = prog.var_of_token.get(slot_tok)
    if info is None:
        raise SlotRejected("slot must be a variable occurrence")
    if slot_tok == info.decl_token:
        raise SlotRejected("declaration sites are not slots")
    scope = sorted(vars_in_scope(prog, slot_tok))
    if len(scope) < 2:
        raise SlotRejected(f"{len(scope)} candidate(s) in scope")

    graph = analysis.graph.copy()
    slot_node = analysis.tok2node[slot_tok]
    graph.nodes[slot_node] = replace(graph.nodes[slot_node],
                                     label=SLOT_LABEL, var=None, type=None)
    for kind in et.VARIABLE_DEPENDENT:
        for k in (kind, et.dual(kind)):
            graph.edges[k] = [(s, d) for s, d in graph.edges.get(k, [])
                              if s != slot_node and d != slot_node]

    candidates = []
    for var_id, type_name in scope:
        var = prog.vars[var_id]
        cand_node = len(graph.nodes)
        graph.nodes.append(GraphNode(cand_node, var.name, False,
                                     var=var.name, type=type_name))
        candidates.append(Candidate(cand_node, var.name, type_name,
                                    gold=var_id == info.var_id))
        spec = _speculative_edges(analysis, info.fn_name, slot_tok, var_id)
        for kind, pairs in spec.items():
            for s, d in sorted(pairs):
                src = cand_node if s == slot_tok else analysis.tok2node[s]
                dst = cand_node if d == slot_tok else analysis.tok2node[d]
                if (src, dst) not in graph.edges.get(kind, []):
                    graph.add_edge(kind, src, dst)
                    graph.add_edge(et.dual(kind), dst, src)

    return TaskSample(graph=graph, kind="misuse", slot_node=slot_node,
                      candidates=candidates,
                      type_closures=_closures(
                          prog, [n.type for n in graph.nodes if n.type]),
                      file_id=analysis.file_id)


def make_varnaming_sample(analysis, var_id):
    """Relabel every token of one variable to <SLOT>; edges untouched."""
    prog = analysis.prog
    var = prog.vars[var_id]
    toks = prog.variable_tokens(var_id)
    if not toks:
        raise ValueError(f"variable {var_id} has no tokens")
    graph = analysis.graph.copy()
    slot_nodes = []
    for t in toks:
        nid = analysis.tok2node[t]
        graph.nodes[nid] = replace(graph.nodes[nid], label=SLOT_LABEL, var=None)
        slot_nodes.append(nid)
    from ..encoding.subtok import split_subtokens
    return TaskSample(graph=graph, kind="naming", slot_nodes=slot_nodes,
                      gold_subtokens=split_subtokens(var.name),
                      type_closures=_closures(
                          prog, [n.type for n in graph.nodes if n.type]),
                      file_id=analysis.file_id)
