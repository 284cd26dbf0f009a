"""Initial node representations: subtoken averaging, type-lattice max
pooling (with training-time subset sampling), candidate bit, projection."""

from dataclasses import dataclass

import numpy as np

from ..nn import tensor as T
from .vocab import SLOT, node_label_units


@dataclass
class NodeFeatures:
    subtok_ids: list      # per node: vocabulary unit ids (label mode applied)
    type_ids: list        # per node: type ids of the supertype closure ([] if untyped)
    cand_bit: np.ndarray  # (n,) float, 1.0 on inserted candidate nodes

    def __len__(self):
        return len(self.subtok_ids)


def encode_sample(sample, vocab, label_mode="subtoken"):
    subtok_ids, type_ids = [], []
    cand_nodes = {c.node for c in sample.candidates} if sample.candidates else set()
    for n in sample.graph.nodes:
        if n.label == SLOT:
            subtok_ids.append([vocab.slot_id])
        else:
            subtok_ids.append(vocab.subtoken_ids(node_label_units(n.label, label_mode)))
        if n.type is not None:
            closure = sample.type_closures.get(n.type, [n.type])
            type_ids.append(vocab.type_ids(closure))
        else:
            type_ids.append([])
    bits = np.zeros(len(subtok_ids))
    for c in cand_nodes:
        bits[c] = 1.0
    return NodeFeatures(subtok_ids, type_ids, bits)


def sample_type_subset(type_set, rng):
    """Uniform non-empty subset: size k ~ U[1, |set|], then a uniform k-subset."""
    if len(type_set) <= 1:
        return list(type_set)
    k = int(rng.integers(1, len(type_set) + 1))
    picks = rng.choice(len(type_set), size=k, replace=False)
    return [type_set[i] for i in sorted(picks)]


def type_representation(type_set, store, dim, mode="eval", rng=None):
    """Elementwise max over type embeddings; train mode pools over a random
    non-empty subset. Returns a (1, dim) Tensor."""
    ids = sorted(type_set)
    if mode == "train":
        ids = sample_type_subset(ids, rng)
    rows = T.gather_rows(store.params["enc.type_emb"], ids)
    return T.segment_max(rows, [0] * len(ids), 1)


def initial_states(features, store, vocab, hidden=64, name_dim=64, type_dim=64,
                   mode="eval", rng=None, label_mode="subtoken"):
    """H0 (n, hidden) = linear(concat(name mean, type max-pool, candidate bit))."""
    n = len(features)
    sub_emb = store.get("enc.subtok_emb", vocab.n_subtokens, name_dim)
    type_emb = store.get("enc.type_emb", vocab.n_types, type_dim)
    proj_w = store.get("enc.proj_W", name_dim + type_dim + 1, hidden)
    proj_b = store.get("enc.proj_b", 1, hidden, init="zeros")

    if label_mode == "disabled":
        const = store.get("enc.name_const", 1, name_dim)
        name_part = T.matmul(T.constant(np.ones((n, 1))), const)
    else:
        flat, seg = [], []
        for i, ids in enumerate(features.subtok_ids):
            flat.extend(ids)
            seg.extend([i] * len(ids))
        counts = np.bincount(seg, minlength=n).astype(float)
        counts[counts == 0] = 1.0
        summed = T.scatter_add_rows(T.gather_rows(sub_emb, flat), seg, n)
        name_part = T.mul(summed, T.constant(1.0 / counts[:, None]))

    flat_t, seg_t = [], []
    for i, ids in enumerate(features.type_ids):
        if not ids:
            continue
        picked = sample_type_subset(ids, rng) if mode == "train" else ids
        flat_t.extend(picked)
        seg_t.extend([i] * len(picked))
    if flat_t:
        type_part = T.segment_max(T.gather_rows(type_emb, flat_t), seg_t, n)
    else:
        type_part = T.constant(np.zeros((n, type_dim)))

    bit = T.constant(features.cand_bit[:, None])
    return T.add(T.matmul(T.concat_cols([name_part, type_part, bit]), proj_w),
                 proj_b)
