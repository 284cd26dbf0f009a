"""Central finite-difference gradient checking against the tape."""

import numpy as np


def gradient_check(store, loss_fn, n_entries=200, eps=1e-5, rng=None):
    """Compare analytic gradients with central differences.

    loss_fn() must rebuild the forward pass from the current ParamStore
    values and return the scalar loss Tensor; it must be deterministic.
    Returns the max relative error over `n_entries` sampled parameter
    entries (absolute error where both grads are tiny).
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    store.zero_grads()
    loss_fn().backward()
    analytic = {k: (t.grad.copy() if t.grad is not None else np.zeros_like(t.value))
                for k, t in store.params.items()}

    entries = []
    for name in store.names():
        t = store.params[name]
        for r in range(t.shape[0]):
            for c in range(t.shape[1]):
                entries.append((name, r, c))
    if len(entries) > n_entries:
        picks = rng.choice(len(entries), size=n_entries, replace=False)
        entries = [entries[i] for i in picks]

    worst = 0.0
    for name, r, c in entries:
        t = store.params[name]
        orig = t.value[r, c]
        t.value[r, c] = orig + eps
        up = float(loss_fn().value[0, 0])
        t.value[r, c] = orig - eps
        down = float(loss_fn().value[0, 0])
        t.value[r, c] = orig
        numeric = (up - down) / (2 * eps)
        a = analytic[name][r, c]
        denom = max(abs(a), abs(numeric), 1e-6)
        worst = max(worst, abs(a - numeric) / denom)
    return worst
