"""Batched two-layer bidirectional GRU over variable-length token sequences.

Sequences are index lists into a shared embedding Tensor; steps are batched
across sequences with masked GRU updates so one batch of B windows costs
O(max_len) GRU cells per direction and layer, not O(sum of lengths).
"""

import numpy as np

from ..nn import tensor as T
from ..nn.gru import make_gru, gru_cell_masked


def make_bigru_params(store, prefix, in_dim, hidden):
    make_gru(store, f"{prefix}.l1f", in_dim, hidden)
    make_gru(store, f"{prefix}.l1b", in_dim, hidden)
    make_gru(store, f"{prefix}.l2f", 2 * hidden, hidden)
    make_gru(store, f"{prefix}.l2b", 2 * hidden, hidden)


class BiGruStates:
    """Final-layer states of a BiGRU run, queryable by (sequence, position).

    The state at a position is the concatenation of the layer-2 forward
    state after consuming that position and the layer-2 backward state
    after consuming it from the right.
    """

    def __init__(self, stacked_fwd, stacked_bwd, lengths):
        self._fwd = stacked_fwd    # (L*B, hidden); row t*B + b = step t, seq b
        self._bwd = stacked_bwd    # same layout, step t = t-th from the end
        self._lengths = lengths

    def states_at(self, positions):
        """positions: list of (seq index, token position); returns a
        (len(positions), 2*hidden) Tensor."""
        b = len(self._lengths)
        fwd_idx = [p * b + i for i, p in positions]
        bwd_idx = [(self._lengths[i] - 1 - p) * b + i for i, p in positions]
        return T.concat_cols([T.gather_rows(self._fwd, fwd_idx),
                              T.gather_rows(self._bwd, bwd_idx)])


def _run_direction(gru, inputs, masks, initial):
    h = initial
    states = []
    for m, mask in zip(inputs, masks):
        h = gru_cell_masked(gru, m, h, mask)
        states.append(h)
    return states


def bigru_run(store, prefix, embeddings, sequences, hidden):
    """Run the two-layer BiGRU.

    embeddings: (N, in_dim) Tensor; sequences: list of index lists into it.
    """
    in_dim = embeddings.shape[1]
    make_bigru_params(store, prefix, in_dim, hidden)
    b = len(sequences)
    lengths = [len(s) for s in sequences]
    max_len = max(lengths)
    masks = []
    for t in range(max_len):
        masks.append(T.constant(
            np.array([[1.0] if t < n else [0.0] for n in lengths])))

    def step_rows(position_of):
        """Per step t, gather one embedding row per sequence (clamped for
        finished sequences; those rows are masked out)."""
        rows = []
        for t in range(max_len):
            idx = [seq[min(position_of(t, n), n - 1)]
                   for seq, n in zip(sequences, lengths)]
            rows.append(T.gather_rows(embeddings, idx))
        return rows

    h0 = T.constant(np.zeros((b, hidden)))
    f1 = _run_direction(make_gru(store, f"{prefix}.l1f", in_dim, hidden),
                        step_rows(lambda t, n: t), masks, h0)
    b1 = _run_direction(make_gru(store, f"{prefix}.l1b", in_dim, hidden),
                        step_rows(lambda t, n: n - 1 - t), masks, h0)

    # Layer-2 input at position p of sequence i pairs the forward state at p
    # with the backward state at end offset (length - 1 - p).
    stacked_b1 = T.concat_rows(b1)
    in2 = []
    for t in range(max_len):
        idx = [max(n - 1 - t, 0) * b + i for i, n in enumerate(lengths)]
        in2.append(T.concat_cols([f1[t], T.gather_rows(stacked_b1, idx)]))
    f2 = _run_direction(make_gru(store, f"{prefix}.l2f", 2 * hidden, hidden),
                        in2, masks, h0)
    stacked_in2 = T.concat_rows(in2)
    in2_rev = []
    for t in range(max_len):
        idx = [max(n - 1 - t, 0) * b + i for i, n in enumerate(lengths)]
        in2_rev.append(T.gather_rows(stacked_in2, idx))
    b2 = _run_direction(make_gru(store, f"{prefix}.l2b", 2 * hidden, hidden),
                        in2_rev, masks, h0)

    return BiGruStates(T.concat_rows(f2), T.concat_rows(b2), lengths)
