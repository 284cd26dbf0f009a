"""Minimal reverse-mode autodiff over dense 2-D float64 arrays.

Every value is a 2-D numpy array. Ops build an implicit tape through
parent links; backward() topologically sorts from the loss and
accumulates gradients additively into .grad.
"""

import numpy as np

CHECK_FINITE = False   # flip on in tests to assert no NaN/Inf after ops


class ShapeError(Exception):
    def __init__(self, op, *shapes):
        super().__init__(f"{op}: incompatible shapes {shapes}")


class Tensor:
    __slots__ = ("value", "grad", "parents", "_bw", "name")

    def __init__(self, value, parents=(), bw=None, name=None):
        value = np.asarray(value, dtype=np.float64)
        if value.ndim != 2:
            raise ShapeError("tensor", value.shape)
        if CHECK_FINITE and not np.all(np.isfinite(value)):
            raise FloatingPointError(f"non-finite value in {name or 'tensor'}")
        self.value = value
        self.grad = None
        self.parents = parents
        self._bw = bw
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.value)
        self.grad += g

    def backward(self):
        if self.shape != (1, 1):
            raise ShapeError("backward: loss must be scalar", self.shape)
        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node.parents:
                stack.append((p, False))
        self._accumulate(np.ones((1, 1)))
        for node in reversed(order):
            if node._bw is not None and node.grad is not None:
                node._bw(node.grad)

    def __repr__(self):
        return f"Tensor{self.shape}" + (f" '{self.name}'" if self.name else "")


def constant(value, name=None):
    return Tensor(np.atleast_2d(np.asarray(value, dtype=np.float64)), name=name)


def zeros(rows, cols):
    return Tensor(np.zeros((rows, cols)))


# --- arithmetic ---------------------------------------------------------------

def _broadcastable(a, b):
    # exact match, scalar (1,1), row-vector bias (1,c), column broadcast (n,1)
    ra, ca = a.shape
    rb, cb = b.shape
    return ((ra, ca) == (rb, cb) or (rb, cb) == (1, 1)
            or (rb == 1 and cb == ca) or (cb == 1 and rb == ra))


def _reduce_to(g, shape):
    if g.shape == shape:
        return g
    if shape == (1, 1):
        return g.sum().reshape(1, 1)
    if shape[0] == 1:
        return g.sum(axis=0, keepdims=True)
    if shape[1] == 1:
        return g.sum(axis=1, keepdims=True)
    raise ShapeError("reduce", g.shape, shape)


def add(a, b):
    if not _broadcastable(a, b):
        raise ShapeError("add", a.shape, b.shape)

    def bw(g):
        a._accumulate(_reduce_to(g, a.shape))
        b._accumulate(_reduce_to(g, b.shape))
    return Tensor(a.value + b.value, (a, b), bw, "add")


def scale(a, c):
    c = float(c)

    def bw(g):
        a._accumulate(c * g)
    return Tensor(c * a.value, (a,), bw, "scale")


def sub(a, b):
    return add(a, scale(b, -1.0))


def mul(a, b):
    if not _broadcastable(a, b):
        raise ShapeError("mul", a.shape, b.shape)

    def bw(g):
        a._accumulate(_reduce_to(g * b.value, a.shape))
        b._accumulate(_reduce_to(g * a.value, b.shape))
    return Tensor(a.value * b.value, (a, b), bw, "mul")


def matmul(a, b):
    if a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)

    def bw(g):
        a._accumulate(g @ b.value.T)
        b._accumulate(a.value.T @ g)
    return Tensor(a.value @ b.value, (a, b), bw, "matmul")


# --- shape ops -----------------------------------------------------------------

def concat_cols(parts):
    parts = list(parts)
    rows = parts[0].shape[0]
    if any(p.shape[0] != rows for p in parts):
        raise ShapeError("concat_cols", *[p.shape for p in parts])
    splits = np.cumsum([p.shape[1] for p in parts])[:-1]

    def bw(g):
        for p, gp in zip(parts, np.hsplit(g, splits)):
            p._accumulate(gp)
    return Tensor(np.hstack([p.value for p in parts]), tuple(parts), bw, "concat_cols")


def concat_rows(parts):
    parts = list(parts)
    cols = parts[0].shape[1]
    if any(p.shape[1] != cols for p in parts):
        raise ShapeError("concat_rows", *[p.shape for p in parts])
    splits = np.cumsum([p.shape[0] for p in parts])[:-1]

    def bw(g):
        for p, gp in zip(parts, np.vsplit(g, splits)):
            p._accumulate(gp)
    return Tensor(np.vstack([p.value for p in parts]), tuple(parts), bw, "concat_rows")


def gather_rows(a, indices):
    idx = np.asarray(indices, dtype=np.intp)
    if idx.ndim != 1:
        raise ShapeError("gather_rows", idx.shape)

    def bw(g):
        ga = np.zeros_like(a.value)
        np.add.at(ga, idx, g)
        a._accumulate(ga)
    return Tensor(a.value[idx], (a,), bw, "gather_rows")


def scatter_add_rows(src, indices, num_rows):
    """out[i] = sum of src rows j with indices[j] == i."""
    idx = np.asarray(indices, dtype=np.intp)
    if idx.shape != (src.shape[0],):
        raise ShapeError("scatter_add_rows", idx.shape, src.shape)
    out = np.zeros((num_rows, src.shape[1]))
    np.add.at(out, idx, src.value)

    def bw(g):
        src._accumulate(g[idx])
    return Tensor(out, (src,), bw, "scatter_add_rows")


def segment_max(src, segment_ids, num_segments):
    """Row-wise elementwise max over contiguous segments; empty segments
    yield zero rows. Gradient flows to the first row achieving the max
    in each segment and column."""
    ids = np.asarray(segment_ids, dtype=np.intp)
    if ids.shape != (src.shape[0],):
        raise ShapeError("segment_max", ids.shape, src.shape)
    if len(ids) and np.any(np.diff(ids) < 0):
        raise ShapeError("segment_max: ids must be non-decreasing", ids.shape)
    m, cols = src.shape
    out = np.zeros((num_segments, cols))
    if m == 0:
        return Tensor(out, (src,), lambda g: None, "segment_max")
    present, starts = np.unique(ids, return_index=True)
    out[present] = np.maximum.reduceat(src.value, starts, axis=0)

    def bw(g):
        expanded = out[ids]
        is_max = src.value == expanded
        pos = np.arange(m, dtype=np.intp)[:, None]
        masked = np.where(is_max, pos, m)
        winners = np.minimum.reduceat(masked, starts, axis=0)   # per present segment
        gs = np.zeros_like(src.value)
        col_idx = np.broadcast_to(np.arange(cols), winners.shape)
        np.add.at(gs, (winners.ravel(), col_idx.ravel()), g[present].ravel())
        src._accumulate(gs)
    return Tensor(out, (src,), bw, "segment_max")


# --- nonlinearities and losses -----------------------------------------------

def sigmoid(a):
    v = np.empty_like(a.value)
    pos = a.value >= 0
    v[pos] = 1.0 / (1.0 + np.exp(-a.value[pos]))
    ev = np.exp(a.value[~pos])
    v[~pos] = ev / (1.0 + ev)

    def bw(g):
        a._accumulate(g * v * (1.0 - v))
    return Tensor(v, (a,), bw, "sigmoid")


def tanh(a):
    v = np.tanh(a.value)

    def bw(g):
        a._accumulate(g * (1.0 - v * v))
    return Tensor(v, (a,), bw, "tanh")


def softmax_cross_entropy(logits, gold_indices):
    """Per-row cross-entropy; returns (n, 1) losses."""
    gold = np.asarray(gold_indices, dtype=np.intp)
    if gold.shape != (logits.shape[0],):
        raise ShapeError("softmax_cross_entropy", gold.shape, logits.shape)
    z = logits.value - logits.value.max(axis=1, keepdims=True)
    ez = np.exp(z)
    p = ez / ez.sum(axis=1, keepdims=True)
    rows = np.arange(len(gold))
    losses = -np.log(np.maximum(p[rows, gold], 1e-300))[:, None]

    def bw(g):
        gl = p * g
        gl[rows, gold] -= g[:, 0]
        logits._accumulate(gl)
    return Tensor(losses, (logits,), bw, "softmax_cross_entropy")


def hinge_loss(scores, gold_index, margin=1.0):
    """Max-margin ranking loss over a (k, 1) score column:
    max(0, margin - s_gold + max_{v != gold} s_v)."""
    k = scores.shape[0]
    if scores.shape[1] != 1 or k < 2:
        raise ShapeError("hinge_loss", scores.shape)
    s = scores.value[:, 0]
    others = np.arange(k) != gold_index
    best_other = int(np.flatnonzero(others)[np.argmax(s[others])])
    raw = margin - s[gold_index] + s[best_other]
    loss = max(0.0, raw)

    def bw(g):
        if raw > 0:
            gs = np.zeros_like(scores.value)
            gs[gold_index, 0] = -g[0, 0]
            gs[best_other, 0] = g[0, 0]
            scores._accumulate(gs)
    return Tensor([[loss]], (scores,), bw, "hinge_loss")


def sum_all(a):
    def bw(g):
        a._accumulate(np.full_like(a.value, g[0, 0]))
    return Tensor([[a.value.sum()]], (a,), bw, "sum_all")


def mean_rows(a):
    """(n, c) -> (1, c) column means."""
    n = a.shape[0]

    def bw(g):
        a._accumulate(np.repeat(g, n, axis=0) / n)
    return Tensor(a.value.mean(axis=0, keepdims=True), (a,), bw, "mean_rows")
