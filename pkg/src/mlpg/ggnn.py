"""GGNN propagation over program graphs and disconnected-union batching."""

from dataclasses import dataclass

import numpy as np

from .nn import tensor as T
from .nn.gru import make_gru, gru_cell
from .graphs.edges import EDGE_TYPES, canonical
from .encoding.features import NodeFeatures

DEFAULT_STEPS = 8          # fewer propagation steps are insufficient
DEFAULT_BATCH_NODES = 20000


class BatchTooLarge(Exception):
    pass


def make_ggnn_params(store, hidden, message_bias=True):
    for k in EDGE_TYPES:
        store.get(f"ggnn.msg.{k}.W", hidden, hidden)
        if message_bias:
            store.get(f"ggnn.msg.{k}.b", 1, hidden, init="zeros")
    make_gru(store, "ggnn.gru", hidden, hidden)


def propagate(h0, edge_lists, store, steps=DEFAULT_STEPS, message_bias=True,
              edge_mask=None):
    """Run `steps` rounds of per-edge-type linear messages, elementwise-sum
    aggregation of incoming messages, and a shared GRU state update.
    Returns the last-step node states.

    edge_lists: edge type name -> (E, 2) array / list of (src, dst) pairs.
    edge_mask: optional set of edge type names to use (others contribute
    nothing); defaults to all 20.
    """
    n, hidden = h0.shape
    gru = make_gru(store, "ggnn.gru", hidden, hidden)
    prepared = []
    for kind in EDGE_TYPES:
        pairs = edge_lists.get(kind)
        if pairs is None or len(pairs) == 0:
            continue
        if edge_mask is not None and kind not in edge_mask:
            continue
        arr = np.asarray(pairs, dtype=np.intp)
        prepared.append((kind, arr[:, 0], arr[:, 1]))
    for kind in edge_lists:
        canonical(kind)

    h = h0
    for _ in range(steps):
        agg = None
        for kind, srcs, dsts in prepared:
            w = store.get(f"ggnn.msg.{kind}.W", hidden, hidden)
            msg = T.matmul(T.gather_rows(h, srcs), w)
            if message_bias:
                msg = T.add(msg, store.get(f"ggnn.msg.{kind}.b", 1, hidden,
                                           init="zeros"))
            summed = T.scatter_add_rows(msg, dsts, n)
            agg = summed if agg is None else T.add(agg, summed)
        if agg is None:
            agg = T.constant(np.zeros((n, hidden)))
        h = gru_cell(gru, agg, h)
    return h


@dataclass
class BatchedGraph:
    """Several encoded samples merged into one disconnected graph."""
    samples: list                 # TaskSample refs, in batch order
    features: NodeFeatures        # merged
    edge_lists: dict              # edge type -> (E, 2) intp array, offset
    ranges: list                  # (start, end) node range per sample

    @property
    def num_nodes(self):
        return len(self.features)

    def offset(self, i):
        return self.ranges[i][0]


def batch(encoded, max_nodes=DEFAULT_BATCH_NODES):
    """Merge (sample, NodeFeatures) pairs; node ids are offset per sample."""
    if not encoded:
        raise ValueError("empty batch")
    total = sum(len(f) for _, f in encoded)
    if total > max_nodes:
        raise BatchTooLarge(f"{total} nodes > cap {max_nodes}")
    subtok, type_ids, bits = [], [], []
    merged = {}
    ranges = []
    offset = 0
    for sample, feats in encoded:
        n = len(feats)
        subtok.extend(feats.subtok_ids)
        type_ids.extend(feats.type_ids)
        bits.append(feats.cand_bit)
        for kind, pairs in sample.graph.edges.items():
            if pairs:
                merged.setdefault(kind, []).append(
                    np.asarray(pairs, dtype=np.intp) + offset)
        ranges.append((offset, offset + n))
        offset += n
    edge_lists = {k: np.vstack(v) for k, v in merged.items()}
    feats = NodeFeatures(subtok, type_ids, np.concatenate(bits))
    return BatchedGraph([s for s, _ in encoded], feats, edge_lists, ranges)
