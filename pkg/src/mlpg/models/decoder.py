"""One-layer GRU decoder that emits a name as a subtoken sequence.

The decoder starts from a usage representation, consumes the END symbol as
the start token, and at each step projects its state onto the subtoken
vocabulary. Training is teacher-forced maximum likelihood (sum of per-step
cross-entropies); inference is greedy and stops at END or `max_len`.
"""

import numpy as np

from ..nn import tensor as T
from ..nn.gru import make_gru, gru_cell_masked

MAX_NAME_LENGTH = 8


def make_decoder_params(store, hidden, n_subtokens):
    make_gru(store, "dec.gru", hidden, hidden)
    store.get("dec.emb", n_subtokens, hidden)
    store.get("dec.out_W", hidden, n_subtokens)
    store.get("dec.out_b", 1, n_subtokens, init="zeros")


def naming_loss(init_states, gold_subtokens, store, vocab):
    """Mean over samples of the summed per-step cross-entropy.

    init_states: (B, hidden) Tensor; gold_subtokens: list of B subtoken
    string lists. Each gold sequence is extended with END.
    """
    b, hidden = init_states.shape
    gru = make_gru(store, "dec.gru", hidden, hidden)
    emb = store.params["dec.emb"]
    out_w, out_b = store.params["dec.out_W"], store.params["dec.out_b"]
    end = vocab.end_id
    seqs = [vocab.subtoken_ids(g) + [end] for g in gold_subtokens]
    max_len = max(len(s) for s in seqs)

    h = init_states
    prev = np.full(b, end, dtype=np.intp)
    total = None
    for t in range(max_len):
        mask = np.array([[1.0] if t < len(s) else [0.0] for s in seqs])
        gold_t = np.array([s[t] if t < len(s) else end for s in seqs],
                          dtype=np.intp)
        h = gru_cell_masked(gru, T.gather_rows(emb, prev), h,
                            T.constant(mask))
        logits = T.add(T.matmul(h, out_w), out_b)
        step = T.sum_all(T.mul(T.softmax_cross_entropy(logits, gold_t),
                               T.constant(mask)))
        total = step if total is None else T.add(total, step)
        prev = gold_t
    return T.scale(total, 1.0 / b)


def greedy_decode(init_states, store, vocab, max_len=MAX_NAME_LENGTH):
    """Greedy decoding per row; returns (sequences, per-step probabilities)."""
    b, hidden = init_states.shape
    gru = make_gru(store, "dec.gru", hidden, hidden)
    emb = store.params["dec.emb"]
    out_w, out_b = store.params["dec.out_W"], store.params["dec.out_b"]
    end = vocab.end_id
    id_to_sub = sorted(vocab.subtoken_index, key=vocab.subtoken_index.get)

    h = init_states
    prev = np.full(b, end, dtype=np.intp)
    done = np.zeros(b, dtype=bool)
    seqs = [[] for _ in range(b)]
    step_probs = [[] for _ in range(b)]
    for _ in range(max_len):
        mask = T.constant((~done).astype(float)[:, None])
        h = gru_cell_masked(gru, T.gather_rows(emb, prev), h, mask)
        logits = T.add(T.matmul(h, out_w), out_b).value
        z = logits - logits.max(axis=1, keepdims=True)
        p = np.exp(z)
        p /= p.sum(axis=1, keepdims=True)
        choice = p.argmax(axis=1)
        for i in range(b):
            if done[i]:
                continue
            step_probs[i].append(float(p[i, choice[i]]))
            if choice[i] == end:
                done[i] = True
            else:
                seqs[i].append(id_to_sub[choice[i]])
        prev = np.where(done, end, choice).astype(np.intp)
        if done.all():
            break
    return seqs, step_probs
