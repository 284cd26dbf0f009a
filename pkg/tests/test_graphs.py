import json

import pytest

from mlpg.minilang import analyze, build_cfg
from mlpg.graphs import (FORWARD_EDGE_TYPES, EDGE_TYPES, canonical, dual,
                         expand_mask, UnknownEdgeType, build_file_analysis,
                         make_varmisuse_sample, make_varnaming_sample,
                         SlotRejected, SLOT_LABEL, sample_to_dict,
                         sample_from_dict)
from mlpg.graphs.dataflow import compute_may_sets
from mlpg.graphs.edges import EDGE_MASKS

from conftest import LOOP_SNIPPET, all_misuse_samples
from oracles import brute_force_may_sets


# --- edge-type enumeration --------------------------------------------------------

def test_twenty_edge_types_and_dual_involution():
    assert len(EDGE_TYPES) == 20
    assert len(FORWARD_EDGE_TYPES) == 10
    for k in EDGE_TYPES:
        assert dual(dual(k)) == k


def test_last_read_alias():
    assert canonical("LastRead") == "LastUse"
    with pytest.raises(UnknownEdgeType):
        canonical("Sideways")


def test_syntax_mask():
    assert set(EDGE_MASKS["syntax"]) == {"NextToken", "Child"}
    mask = expand_mask(EDGE_MASKS["syntax"])
    assert mask == {"NextToken", "Child", "NextTokenReverse", "ChildReverse"}


# --- golden dataflow edges (drawn loop example) ------------------------------------

def _main_occurrences(prog):
    """The six x/y occurrences after the parameters, in source order."""
    occs = [t for t, info in sorted(prog.var_of_token.items())
            if info.fn_name == "main" and t != info.decl_token]
    assert [prog.var_of_token[t].name for t in occs] == \
        ["x", "y", "x", "x", "x", "y"]
    return {i + 1: t for i, t in enumerate(occs)}


def test_loop_snippet_golden_edges(loop_analysis):
    prog = loop_analysis.prog
    number = _main_occurrences(prog)
    token_of = {t: n for n, t in number.items()}

    def numbered(kind):
        pairs = set()
        for s, d in loop_analysis.graph.edges.get(kind, []):
            st = loop_analysis.graph.nodes[s]
            dt = loop_analysis.graph.nodes[d]
            if not (st.is_token and dt.is_token):
                continue
            src = _node_token(loop_analysis, s)
            dst = _node_token(loop_analysis, d)
            if src in token_of and dst in token_of:
                pairs.add((token_of[src], token_of[dst]))
        return pairs

    assert numbered("LastUse") == {(3, 1), (3, 4), (4, 5), (5, 3), (6, 2),
                                   (6, 6)}
    assert numbered("LastWrite") == {(3, 1), (3, 4), (4, 1), (4, 4), (5, 1),
                                     (5, 4), (6, 2)}
    assert numbered("ComputedFrom") == {(4, 5), (4, 6)}


def _node_token(analysis, node_id):
    inverse = getattr(analysis, "_node2tok", None)
    if inverse is None:
        inverse = {n: t for t, n in analysis.tok2node.items()}
        analysis._node2tok = inverse
    return inverse.get(node_id)


# --- dataflow oracle ---------------------------------------------------------------

ORACLE_PROGRAMS = [
    "fn f(a: int) { var b: int = a; var c: int = b + a; }",
    "fn f(n: int) { while (n > 0) { n = n - 1; } var m: int = n; }",
    """fn f(n: int, m: int) -> int {
        var s: int = 0;
        while (n > 0) {
            if (m > n) { s = s + m; } else { s = s + n; }
            n = n - 1;
        }
        return s;
    }""",
    """fn f(a: int, b: int) -> int {
        if (a > b) { return a; }
        while (b > 0) { while (a < b) { a = a + 1; } b = b - a; }
        return b;
    }""",
]


@pytest.mark.parametrize("src", ORACLE_PROGRAMS)
def test_may_sets_match_path_enumeration(src):
    prog = analyze(src)
    for fn in prog.functions:
        cfg = build_cfg(prog, fn)
        last_use, last_write = compute_may_sets(prog, cfg)
        oracle_use, oracle_write = brute_force_may_sets(prog, fn)
        assert last_use == oracle_use
        assert last_write == oracle_write


def test_parameter_read_last_write_is_declaration():
    prog = analyze("fn f(p: int) { var q: int = p; }")
    cfg = build_cfg(prog, "f")
    _, last_write = compute_may_sets(prog, cfg)
    info = next(i for i in prog.vars.values() if i.name == "p")
    read_tok = next(t for t, i in prog.var_of_token.items()
                    if i.var_id == info.var_id and t != info.decl_token)
    assert last_write[read_tok] == frozenset([info.decl_token])


def test_straight_line_no_self_loops():
    prog = analyze("fn f() { var a: int = 1; var b: int = a; }")
    cfg = build_cfg(prog, "f")
    last_use, _ = compute_may_sets(prog, cfg)
    for tok, targets in last_use.items():
        assert tok not in targets


# --- graph construction -------------------------------------------------------------

def test_next_token_chain_count(small_analysis):
    n_tokens = len(small_analysis.graph.token_node_ids())
    assert len(small_analysis.graph.edges["NextToken"]) == n_tokens - 1


def test_child_edges_parent_before_construction(small_analysis):
    graph = small_analysis.graph
    for s, d in graph.edges["Child"]:
        assert 0 <= s < len(graph.nodes) and 0 <= d < len(graph.nodes)
        assert not graph.nodes[d].is_token or graph.nodes[d].label


def test_backward_edges_are_transposes(small_analysis):
    graph = small_analysis.graph
    for k in FORWARD_EDGE_TYPES:
        fwd = set(graph.edges.get(k, []))
        bwd = set(graph.edges.get(dual(k), []))
        assert bwd == {(d, s) for s, d in fwd}
    graph.check_invariants()


def test_returns_to_edge(small_analysis):
    edges = small_analysis.graph.edges["ReturnsTo"]
    assert len(edges) == 1
    s, d = edges[0]
    assert small_analysis.graph.nodes[s].label == "return"
    assert small_analysis.graph.nodes[d].label == "addUp"


def test_formal_arg_name_edges(small_analysis):
    graph = small_analysis.graph
    pairs = {(graph.nodes[s].label, graph.nodes[d].label)
             for s, d in graph.edges["FormalArgName"]}
    assert pairs == {("count", "limit")}


def test_guarded_by_edges():
    src = """
    fn f(x: int, y: int) -> int {
        if (x > y) {
            x = x - 1;
        } else {
            y = y + 1;
        }
        return x + y;
    }
    """
    fa = build_file_analysis(analyze(src, "g"), "g")
    graph = fa.graph
    guarded = {graph.nodes[s].label for s, _ in graph.edges["GuardedBy"]}
    negated = {graph.nodes[s].label for s, _ in graph.edges["GuardedByNegation"]}
    assert guarded == {"x"}
    assert negated == {"y"}
    for _, d in graph.edges["GuardedBy"] + graph.edges["GuardedByNegation"]:
        assert graph.nodes[d].symbol if hasattr(graph.nodes[d], "symbol") \
            else graph.nodes[d].label == "BinaryExpression"


def test_guard_edges_absent_when_var_not_in_condition():
    src = "fn f(c: bool, x: int) { if (c) { x = 1; } else { x = 2; } }"
    fa = build_file_analysis(analyze(src, "g"), "g")
    labels = {fa.graph.nodes[s].label
              for s, _ in fa.graph.edges.get("GuardedBy", [])}
    assert "x" not in labels


# --- surgery -------------------------------------------------------------------------

def test_misuse_sample_shape(small_misuse):
    for sample in small_misuse:
        golds = [c for c in sample.candidates if c.gold]
        assert len(golds) == 1
        assert len(sample.candidates) >= 2
        assert sample.graph.nodes[sample.slot_node].label == SLOT_LABEL
        sample.graph.check_invariants()


def test_slot_rejects_declarations(small_analysis):
    prog = small_analysis.prog
    decl = next(iter(prog.vars.values())).decl_token
    with pytest.raises(SlotRejected):
        make_varmisuse_sample(small_analysis, decl)


def test_slot_rejects_single_candidate():
    src = ("fn f(a: int) { var b: string = \"x\"; var c: int = a; "
           "var d: string = b; }")
    fa = build_file_analysis(analyze(src, "s"), "s")
    info = next(i for i in fa.prog.vars.values() if i.name == "b")
    tok = next(t for t, i in fa.prog.var_of_token.items()
               if i.var_id == info.var_id and t != info.decl_token)
    # b is the only string variable; its usage slot has one candidate
    with pytest.raises(SlotRejected):
        make_varmisuse_sample(fa, tok)


def test_slot_strips_variable_dependent_edges(small_misuse):
    for sample in small_misuse:
        cand_nodes = {c.node for c in sample.candidates}
        for kind in ("GuardedBy", "GuardedByNegation"):
            for s, d in sample.graph.edges.get(kind, []):
                assert sample.slot_node not in (s, d)
                assert not cand_nodes & {s, d}
        for kind in ("LastUse", "LastWrite", "LastLexicalUse"):
            for s, d in sample.graph.edges.get(kind, []):
                assert sample.slot_node not in (s, d)


def test_surgery_locality(small_analysis, small_misuse):
    base = small_analysis.graph
    for sample in small_misuse:
        touched = {sample.slot_node} | {c.node for c in sample.candidates}
        for kind, pairs in base.edges.items():
            kept = {(s, d) for s, d in sample.graph.edges.get(kind, [])
                    if not touched & {s, d}}
            orig = {(s, d) for s, d in pairs if not touched & {s, d}}
            assert kept == orig


def test_gold_substitution_consistency(small_analysis, small_misuse):
    """The gold candidate's speculative edges equal the original slot
    token's variable-dependent edges, up to the node renaming."""
    base = small_analysis.graph
    for sample in small_misuse:
        gold = next(c for c in sample.candidates if c.gold)
        for kind in ("LastUse", "LastWrite", "LastLexicalUse"):
            orig = {(s, d) for s, d in base.edges.get(kind, [])
                    if sample.slot_node in (s, d)}
            renamed = {(gold.node if s == sample.slot_node else s,
                        gold.node if d == sample.slot_node else d)
                       for s, d in orig}
            spec = {(s, d) for s, d in sample.graph.edges.get(kind, [])
                    if gold.node in (s, d)}
            assert spec == renamed


def test_naming_sample(small_analysis):
    prog = small_analysis.prog
    info = next(i for i in prog.vars.values() if i.name == "total")
    sample = make_varnaming_sample(small_analysis, info.var_id)
    assert sample.gold_subtokens == ["total"]
    assert len(sample.slot_nodes) == len(prog.variable_tokens(info.var_id))
    for n in sample.slot_nodes:
        assert sample.graph.nodes[n].label == SLOT_LABEL
    # edges untouched
    for kind, pairs in small_analysis.graph.edges.items():
        assert sample.graph.edges.get(kind, []) == pairs


def test_naming_subtoken_gold():
    src = "fn f(inputStreamBuffer: int) { var y: int = inputStreamBuffer; }"
    fa = build_file_analysis(analyze(src, "n"), "n")
    info = next(i for i in fa.prog.vars.values()
                if i.name == "inputStreamBuffer")
    sample = make_varnaming_sample(fa, info.var_id)
    assert sample.gold_subtokens == ["input", "stream", "buffer"]


# --- serialization -------------------------------------------------------------------

def test_sample_json_round_trip(small_misuse, small_naming):
    for sample in list(small_misuse) + list(small_naming):
        d = json.loads(json.dumps(sample_to_dict(sample)))
        again = sample_from_dict(d, sample.type_closures, sample.file_id)
        assert len(again.graph.nodes) == len(sample.graph.nodes)
        for kind in EDGE_TYPES:
            assert sorted(again.graph.edges.get(kind, [])) == \
                sorted(sample.graph.edges.get(kind, []))
        if sample.kind == "misuse":
            assert again.slot_node == sample.slot_node
            assert [(c.node, c.name, c.gold) for c in again.candidates] == \
                [(c.node, c.name, c.gold) for c in sample.candidates]
        else:
            assert again.slot_nodes == sample.slot_nodes
            assert again.gold_subtokens == sample.gold_subtokens


def test_json_schema_fields(small_misuse):
    d = sample_to_dict(small_misuse[0])
    assert set(d) == {"nodes", "edges", "slot", "candidates",
                      "gold_subtokens"}
    assert set(d["nodes"][0]) == {"id", "label", "is_token", "var", "type"}
    for kind in d["edges"]:
        assert not kind.endswith("Reverse")
