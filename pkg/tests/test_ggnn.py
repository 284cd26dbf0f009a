import numpy as np
import pytest

from mlpg.nn import ParamStore, gradient_check
from mlpg.nn import tensor as T
from mlpg.nn.gru import make_gru, gru_cell
from mlpg.ggnn import (make_ggnn_params, propagate, batch, BatchTooLarge,
                       DEFAULT_STEPS)
from mlpg.graphs import expand_mask
from mlpg.graphs.edges import EDGE_MASKS
from mlpg.encoding import build_vocabulary, encode_sample

from oracles import np_ggnn


def _store(hidden, seed=0):
    store = ParamStore(np.random.default_rng(seed))
    make_ggnn_params(store, hidden)
    return store


def test_default_steps_is_eight():
    assert DEFAULT_STEPS == 8


def test_zero_steps_is_identity(rng):
    store = _store(6)
    h0 = T.Tensor(rng.standard_normal((4, 6)))
    out = propagate(h0, {"NextToken": [(0, 1)]}, store, steps=0)
    assert out.value == pytest.approx(h0.value)


def test_isolated_node_is_gru_of_zero_message(rng):
    store = _store(5)
    h0 = T.Tensor(rng.standard_normal((1, 5)))
    out = propagate(h0, {}, store, steps=1)
    gru = make_gru(store, "ggnn.gru", 5, 5)
    ref = gru_cell(gru, T.zeros(1, 5), h0)
    assert out.value == pytest.approx(ref.value)


def test_propagate_matches_dense_reference(rng):
    hidden = 6
    store = _store(hidden, seed=4)
    n = 5
    h0 = rng.standard_normal((n, hidden))
    edges = {
        "NextToken": [(0, 1), (1, 2), (2, 3), (3, 4)],
        "NextTokenReverse": [(1, 0), (2, 1), (3, 2), (4, 3)],
        "LastUse": [(3, 0), (4, 4)],
        "Child": [(0, 2)],
    }
    got = propagate(T.Tensor(h0), edges, store, steps=3).value
    weights = {k: store.params[f"ggnn.msg.{k}.W"].value for k in edges}
    biases = {k: store.params[f"ggnn.msg.{k}.b"].value[0] for k in edges}
    gru = {k: store.params[f"ggnn.gru.{k}"].value for k in
           ("Wz", "Uz", "Wr", "Ur", "Wh", "Uh")}
    gru.update({k: store.params[f"ggnn.gru.{k}"].value[0] for k in
                ("bz", "br", "bh")})
    ref = np_ggnn(h0, edges, weights, biases, gru, steps=3)
    assert got == pytest.approx(ref, abs=1e-12)


def test_information_reaches_exactly_steps_hops(rng):
    """On a directed path, perturbing node 0 affects node k only once the
    number of propagation steps reaches k."""
    hidden = 4
    store = _store(hidden, seed=2)
    edges = {"NextToken": [(0, 1), (1, 2), (2, 3)]}
    h0 = rng.standard_normal((4, hidden))
    h0b = h0.copy()
    h0b[0] += 1.0
    for steps, reach in [(1, 1), (2, 2), (3, 3)]:
        a = propagate(T.Tensor(h0), edges, store, steps=steps).value
        b = propagate(T.Tensor(h0b), edges, store, steps=steps).value
        diff = np.abs(a - b).sum(axis=1)
        assert np.all(diff[1:reach + 1] > 1e-9)
        assert diff[reach + 1:] == pytest.approx(np.zeros(3 - reach))


def test_edge_mask_excludes_contribution(rng):
    store = _store(5, seed=1)
    h0 = rng.standard_normal((3, 5))
    edges = {"NextToken": [(0, 1)], "LastUse": [(2, 1)]}
    masked = propagate(T.Tensor(h0), edges, store, steps=2,
                       edge_mask={"NextToken"}).value
    only = propagate(T.Tensor(h0), {"NextToken": [(0, 1)]}, store,
                     steps=2).value
    assert masked == pytest.approx(only)
    full = propagate(T.Tensor(h0), edges, store, steps=2).value
    assert not np.allclose(full, masked)


def test_message_bias_ablation(rng):
    store = ParamStore(np.random.default_rng(0))
    make_ggnn_params(store, 4, message_bias=False)
    assert not any(name.endswith(".b") and name.startswith("ggnn.msg")
                   for name in store.names())
    h0 = rng.standard_normal((2, 4))
    out = propagate(T.Tensor(h0), {"Child": [(0, 1)]}, store, steps=1,
                    message_bias=False).value
    assert out.shape == (2, 4)


def test_propagate_gradient_check(rng):
    store = _store(4, seed=6)
    h0 = rng.standard_normal((4, 4))
    edges = {"NextToken": [(0, 1), (1, 2)], "Child": [(3, 1)],
             "ChildReverse": [(1, 3)]}

    def loss():
        out = propagate(T.Tensor(h0), edges, store, steps=2)
        return T.sum_all(T.tanh(out))

    assert gradient_check(store, loss, n_entries=150,
                          rng=np.random.default_rng(0)) < 1e-5


# --- batching ---------------------------------------------------------------------

def test_batch_offsets_and_ranges(small_misuse):
    vocab = build_vocabulary(small_misuse)
    encoded = [(s, encode_sample(s, vocab)) for s in small_misuse[:3]]
    bg = batch(encoded)
    sizes = [len(f) for _, f in encoded]
    assert bg.num_nodes == sum(sizes)
    assert bg.ranges == [(0, sizes[0]), (sizes[0], sizes[0] + sizes[1]),
                         (sizes[0] + sizes[1], sum(sizes))]
    for kind, arr in bg.edge_lists.items():
        assert arr.min() >= 0 and arr.max() < bg.num_nodes
    # every edge stays within its sample's node range
    for i, (s, _) in enumerate(encoded):
        lo, hi = bg.ranges[i]
        for kind, pairs in s.graph.edges.items():
            if not pairs:
                continue
            arr = np.asarray(pairs) + lo
            assert arr.min() >= lo and arr.max() < hi


def test_batch_too_large(small_misuse):
    vocab = build_vocabulary(small_misuse)
    encoded = [(s, encode_sample(s, vocab)) for s in small_misuse[:2]]
    with pytest.raises(BatchTooLarge):
        batch(encoded, max_nodes=10)


def test_batched_equals_individual_propagation(small_misuse):
    """Disconnected-union batching is exact: each sample's final states
    match a solo run."""
    vocab = build_vocabulary(small_misuse)
    store = _store(8, seed=3)
    rng = np.random.default_rng(5)
    encoded = [(s, encode_sample(s, vocab)) for s in small_misuse[:4]]
    mask = expand_mask(EDGE_MASKS["full"])

    def h0_of(n, lo=0):
        return rng.standard_normal((n, 8))

    h0s = [h0_of(len(f)) for _, f in encoded]
    bg = batch(encoded)
    merged = propagate(T.Tensor(np.vstack(h0s)), bg.edge_lists, store,
                       steps=4, edge_mask=mask).value
    for i, (s, f) in enumerate(encoded):
        solo = propagate(T.Tensor(h0s[i]),
                         {k: np.asarray(v, dtype=np.intp)
                          for k, v in s.graph.edges.items() if v},
                         store, steps=4, edge_mask=mask).value
        lo, hi = bg.ranges[i]
        assert np.abs(merged[lo:hi] - solo).max() < 1e-9
