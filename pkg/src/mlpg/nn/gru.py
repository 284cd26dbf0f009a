"""Batched GRU cell built from autodiff ops.

z = sigmoid(W_z m + U_z h + b_z)
r = sigmoid(W_r m + U_r h + b_r)
hhat = tanh(W_h m + U_h (r * h) + b_h)
h' = (1 - z) * h + z * hhat
"""

from . import tensor as T


def gru_param_names(prefix):
    return [f"{prefix}.{n}" for n in
            ("Wz", "Uz", "bz", "Wr", "Ur", "br", "Wh", "Uh", "bh")]


def make_gru(store, prefix, in_dim, hidden):
    """Create (or fetch) the 9 parameter arrays of one GRU cell."""
    p = {}
    for gate in ("z", "r", "h"):
        p["W" + gate] = store.get(f"{prefix}.W{gate}", in_dim, hidden)
        p["U" + gate] = store.get(f"{prefix}.U{gate}", hidden, hidden)
        p["b" + gate] = store.get(f"{prefix}.b{gate}", 1, hidden, init="zeros")
    return p


def gru_cell(p, m, h):
    """One step for a batch of rows: m (n, in_dim), h (n, hidden)."""
    if m.shape[0] != h.shape[0]:
        raise T.ShapeError("gru_cell", m.shape, h.shape)
    z = T.sigmoid(T.add(T.add(T.matmul(m, p["Wz"]), T.matmul(h, p["Uz"])), p["bz"]))
    r = T.sigmoid(T.add(T.add(T.matmul(m, p["Wr"]), T.matmul(h, p["Ur"])), p["br"]))
    hhat = T.tanh(T.add(T.add(T.matmul(m, p["Wh"]),
                              T.matmul(T.mul(r, h), p["Uh"])), p["bh"]))
    one_minus_z = T.add(T.scale(z, -1.0), T.constant([[1.0]]))
    return T.add(T.mul(one_minus_z, h), T.mul(z, hhat))


def gru_cell_masked(p, m, h, mask):
    """GRU step that leaves rows with mask 0 unchanged; mask is (n, 1)."""
    h_new = gru_cell(p, m, h)
    keep = T.add(T.scale(mask, -1.0), T.constant([[1.0]]))
    return T.add(T.mul(h_new, mask), T.mul(h, keep))
