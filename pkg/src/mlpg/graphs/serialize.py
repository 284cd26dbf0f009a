"""Graph JSON serialization.

Schema:
  {"nodes":  [{"id":int,"label":str,"is_token":bool,"var":str|null,"type":str|null}],
   "edges":  {"<EdgeTypeName>": [[src,dst], ...]},          # forward types only
   "slot":   {"node": int} | {"tokens": [int, ...]} | null,
   "candidates": [{"node":int,"name":str,"gold":bool}] | null,
   "gold_subtokens": [str] | null}

Backward edge lists are omitted on disk and rebuilt on load.
"""

import json

from . import edges as et
from .build import GraphNode, ProgramGraph, add_backward_edges
from .surgery import Candidate, TaskSample


def graph_to_dict(graph):
    return {
        "nodes": [{"id": n.node_id, "label": n.label, "is_token": n.is_token,
                   "var": n.var, "type": n.type} for n in graph.nodes],
        "edges": {k: [[s, d] for s, d in graph.edges.get(k, [])]
                  for k in et.FORWARD_EDGE_TYPES if graph.edges.get(k)},
    }


def sample_to_dict(sample):
    d = graph_to_dict(sample.graph)
    if sample.kind == "misuse":
        d["slot"] = {"node": sample.slot_node}
        d["candidates"] = [{"node": c.node, "name": c.name, "gold": c.gold}
                           for c in sample.candidates]
        d["gold_subtokens"] = None
    else:
        d["slot"] = {"tokens": list(sample.slot_nodes)}
        d["candidates"] = None
        d["gold_subtokens"] = list(sample.gold_subtokens)
    return d


def graph_from_dict(d, file_id=""):
    nodes = [GraphNode(n["id"], n["label"], n["is_token"],
                       n.get("var"), n.get("type")) for n in d["nodes"]]
    assert [n.node_id for n in nodes] == list(range(len(nodes)))
    edges = {et.canonical(k): [tuple(p) for p in v]
             for k, v in d["edges"].items()}
    return add_backward_edges(ProgramGraph(nodes, edges, file_id))


def sample_from_dict(d, type_closures=None, file_id=""):
    graph = graph_from_dict(d, file_id)
    closures = dict(type_closures or {})
    if d.get("candidates") is not None:
        by_node = {n.node_id: n for n in graph.nodes}
        cands = [Candidate(c["node"], c["name"], by_node[c["node"]].type,
                           c["gold"]) for c in d["candidates"]]
        return TaskSample(graph=graph, kind="misuse",
                          slot_node=d["slot"]["node"], candidates=cands,
                          type_closures=closures, file_id=file_id)
    return TaskSample(graph=graph, kind="naming",
                      slot_nodes=list(d["slot"]["tokens"]),
                      gold_subtokens=list(d["gold_subtokens"]),
                      type_closures=closures, file_id=file_id)


def save_sample(sample, path):
    with open(path, "w") as f:
        json.dump(sample_to_dict(sample), f)


def load_sample(path, type_closures=None, file_id=""):
    with open(path) as f:
        return sample_from_dict(json.load(f), type_closures, file_id)
