"""Graph models: GGNN propagation followed by a misuse scoring head or a
naming decoder."""

import numpy as np

from ..nn import tensor as T
from ..encoding import encode_sample, initial_states
from ..ggnn import (propagate, batch as make_batch, make_ggnn_params,
                    DEFAULT_STEPS, DEFAULT_BATCH_NODES)
from ..graphs.edges import EDGE_MASKS, expand_mask
from .base import ModelBase, Prediction
from .decoder import make_decoder_params, naming_loss, greedy_decode, \
    MAX_NAME_LENGTH


def softmax(scores):
    z = scores - scores.max()
    e = np.exp(z)
    return e / e.sum()


class _GgnnBase(ModelBase):
    def _encoded(self, sample):
        key = id(sample)
        if key not in self._cache:
            self._cache[key] = encode_sample(sample, self.vocab_,
                                             self.label_mode)
        return self._cache[key]

    def _batch_cost(self, sample):
        return len(sample.graph.nodes)

    def _batch_budget(self):
        return self.batch_nodes

    def _mask(self):
        if self.edge_mask in EDGE_MASKS:
            return expand_mask(EDGE_MASKS[self.edge_mask])
        return expand_mask(self.edge_mask)

    def _final_states(self, samples, mode, rng=None):
        batched = make_batch([(s, self._encoded(s)) for s in samples],
                             max_nodes=self.batch_nodes)
        h0 = initial_states(batched.features, self.store_, self.vocab_,
                            hidden=self.hidden, name_dim=self.hidden,
                            type_dim=self.hidden, mode=mode, rng=rng,
                            label_mode=self.label_mode)
        h = propagate(h0, batched.edge_lists, self.store_, steps=self.steps,
                      message_bias=self.message_bias, edge_mask=self._mask())
        return batched, h


class GgnnVarMisuse(_GgnnBase):
    """Scores each candidate by W[concat(slot state, candidate state)]."""

    def __init__(self, hidden=64, steps=DEFAULT_STEPS, margin=1.0,
                 edge_mask="full", label_mode="subtoken", message_bias=True,
                 lr=1e-3, clip_norm=1.0, epochs=50, patience=5,
                 batch_nodes=DEFAULT_BATCH_NODES, seed=0):
        self.hidden = hidden
        self.steps = steps
        self.margin = margin
        self.edge_mask = edge_mask
        self.label_mode = label_mode
        self.message_bias = message_bias
        self.lr = lr
        self.clip_norm = clip_norm
        self.epochs = epochs
        self.patience = patience
        self.batch_nodes = batch_nodes
        self.seed = seed

    def _setup(self):
        make_ggnn_params(self.store_, self.hidden, self.message_bias)
        self.store_.get("head.W", 2 * self.hidden, 1)
        self.store_.get("head.b", 1, 1, init="zeros")

    def _scores(self, samples, mode, rng=None):
        """(per-sample score column Tensors, final states, batch)."""
        batched, h = self._final_states(samples, mode, rng)
        slot_idx, cand_idx, ranges = [], [], []
        pos = 0
        for i, s in enumerate(samples):
            off = batched.offset(i)
            for c in s.candidates:
                slot_idx.append(off + s.slot_node)
                cand_idx.append(off + c.node)
            ranges.append((pos, pos + len(s.candidates)))
            pos += len(s.candidates)
        pair = T.concat_cols([T.gather_rows(h, slot_idx),
                              T.gather_rows(h, cand_idx)])
        all_scores = T.add(T.matmul(pair, self.store_.params["head.W"]),
                           self.store_.params["head.b"])
        per_sample = [T.gather_rows(all_scores, list(range(a, b)))
                      for a, b in ranges]
        return per_sample, h, batched

    def misuse_forward(self, samples):
        per_sample, _, _ = self._scores(samples, mode="eval")
        out = []
        for s_col in per_sample:
            scores = s_col.value[:, 0].copy()
            probs = softmax(scores)
            out.append(Prediction(scores=scores, probs=probs,
                                  pred_index=int(scores.argmax())))
        return out

    forward = misuse_forward
    _predict_batch = misuse_forward

    def _loss_batch(self, samples, rng):
        per_sample, _, _ = self._scores(samples, mode="train", rng=rng)
        losses = [T.hinge_loss(s, samples[i].gold_index, self.margin)
                  for i, s in enumerate(per_sample)]
        total = losses[0]
        for l in losses[1:]:
            total = T.add(total, l)
        return T.scale(total, 1.0 / len(samples)), len(samples)

    def usage_representations(self, samples):
        """Final candidate-node states u(t, v); returns (matrix, labels)."""
        reps, labels = [], []
        for batch_samples in self._iter_batches(list(samples)):
            batched, h = self._final_states(batch_samples, mode="eval")
            for i, s in enumerate(batch_samples):
                off = batched.offset(i)
                for c in s.candidates:
                    reps.append(h.value[off + c.node])
                    labels.append((s.file_id, c.name, c.gold))
        return np.array(reps), labels


class GgnnVarNaming(_GgnnBase):
    """Decodes the variable name from the mean of slot-token final states."""

    def __init__(self, hidden=64, steps=DEFAULT_STEPS, label_mode="subtoken",
                 edge_mask="full", message_bias=True, lr=1e-3, clip_norm=1.0,
                 epochs=50, patience=5, batch_nodes=DEFAULT_BATCH_NODES,
                 max_name_length=MAX_NAME_LENGTH, seed=0):
        self.hidden = hidden
        self.steps = steps
        self.label_mode = label_mode
        self.edge_mask = edge_mask
        self.message_bias = message_bias
        self.lr = lr
        self.clip_norm = clip_norm
        self.epochs = epochs
        self.patience = patience
        self.batch_nodes = batch_nodes
        self.max_name_length = max_name_length
        self.seed = seed

    def _setup(self):
        make_ggnn_params(self.store_, self.hidden, self.message_bias)
        make_decoder_params(self.store_, self.hidden, self.vocab_.n_subtokens)

    def _usage_rep(self, samples, mode, rng=None):
        batched, h = self._final_states(samples, mode, rng)
        rows, seg = [], []
        for i, s in enumerate(samples):
            off = batched.offset(i)
            rows.extend(off + n for n in s.slot_nodes)
            seg.extend([i] * len(s.slot_nodes))
        counts = np.array([[1.0 / len(s.slot_nodes)] for s in samples])
        summed = T.scatter_add_rows(T.gather_rows(h, rows), seg, len(samples))
        return T.mul(summed, T.constant(counts))

    def naming_forward(self, samples):
        init = self._usage_rep(samples, mode="eval")
        seqs, probs = greedy_decode(init, self.store_, self.vocab_,
                                    self.max_name_length)
        return [Prediction(sequence=seq, step_probs=p)
                for seq, p in zip(seqs, probs)]

    forward = naming_forward
    _predict_batch = naming_forward

    def _loss_batch(self, samples, rng):
        init = self._usage_rep(samples, mode="train", rng=rng)
        loss = naming_loss(init, [s.gold_subtokens for s in samples],
                           self.store_, self.vocab_)
        return loss, len(samples)
