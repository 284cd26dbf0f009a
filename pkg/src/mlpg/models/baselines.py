"""Non-graph comparison models: Loc (windowed BiGRU at the slot), AvgBiRNN
(BiGRU states averaged over a variable's usage sites), and AvgLBL
(position-scaled log-bilinear contexts, naming only)."""

import numpy as np

from ..nn import tensor as T
from ..encoding import encode_sample, initial_states, NodeFeatures
from .base import ModelBase, Prediction
from .decoder import make_decoder_params, naming_loss, greedy_decode, \
    MAX_NAME_LENGTH
from .ggnn_models import softmax
from .sequence import bigru_run

DEFAULT_WINDOW = 20     # token radius around a usage site
LBL_CONTEXT = 4         # context tokens per side for AvgLBL


def subset_features(features, rows):
    return NodeFeatures([features.subtok_ids[i] for i in rows],
                        [features.type_ids[i] for i in rows],
                        features.cand_bit[list(rows)])


def merge_features(parts):
    """Concatenate NodeFeatures; returns (merged, start offsets)."""
    subtok, types, bits, offsets = [], [], [], []
    n = 0
    for f in parts:
        offsets.append(n)
        subtok.extend(f.subtok_ids)
        types.extend(f.type_ids)
        bits.append(f.cand_bit)
        n += len(f)
    return NodeFeatures(subtok, types, np.concatenate(bits)), offsets


def label_mean_embeddings(subtok_id_lists, store, vocab, dim):
    """(n, dim) mean-of-subtoken-embedding rows, matching the name part of
    the graph models' initial node labels."""
    emb = store.get("enc.subtok_emb", vocab.n_subtokens, dim)
    flat, seg = [], []
    for i, ids in enumerate(subtok_id_lists):
        flat.extend(ids)
        seg.extend([i] * len(ids))
    n = len(subtok_id_lists)
    counts = np.bincount(seg, minlength=n).astype(float)
    counts[counts == 0] = 1.0
    summed = T.scatter_add_rows(T.gather_rows(emb, flat), seg, n)
    return T.mul(summed, T.constant(1.0 / counts[:, None]))


def _mean_by_segment(rows_tensor, seg, num_segments):
    counts = np.bincount(seg, minlength=num_segments).astype(float)
    counts[counts == 0] = 1.0
    summed = T.scatter_add_rows(rows_tensor, seg, num_segments)
    return T.mul(summed, T.constant(1.0 / counts[:, None]))


def _dot_scores(u, c_row):
    """Row-wise dot products of (k, d) candidate rows with one context row."""
    k, d = u.shape
    rep = T.gather_rows(c_row, [0] * k)
    return T.matmul(T.mul(u, rep), T.constant(np.ones((d, 1))))


class _SeqBase(ModelBase):
    def _encoded(self, sample):
        key = id(sample)
        if key not in self._cache:
            feats = encode_sample(sample, self.vocab_, self.label_mode)
            toks = sample.graph.token_node_ids()
            self._cache[key] = (feats, toks)
        return self._cache[key]

    def _window(self, toks, node):
        p = toks.index(node)
        lo = max(0, p - self.window)
        hi = min(len(toks), p + self.window + 1)
        return toks[lo:hi], p - lo

    def _hinge_mean(self, score_cols, samples):
        losses = [T.hinge_loss(s, samples[i].gold_index, self.margin)
                  for i, s in enumerate(score_cols)]
        total = losses[0]
        for l in losses[1:]:
            total = T.add(total, l)
        return T.scale(total, 1.0 / len(samples))

    @staticmethod
    def _to_predictions(score_cols):
        out = []
        for col in score_cols:
            scores = col.value[:, 0].copy()
            out.append(Prediction(scores=scores, probs=softmax(scores),
                                  pred_index=int(scores.argmax())))
        return out


class LocVarMisuse(_SeqBase):
    """BiGRU over a token window around the slot; each candidate is scored by
    the dot product of the projected slot state with the candidate's initial
    name+type label embedding."""

    def __init__(self, hidden=64, window=DEFAULT_WINDOW, margin=1.0,
                 label_mode="subtoken", lr=1e-3, clip_norm=1.0, epochs=50,
                 patience=5, batch_size=32, seed=0):
        self.hidden = hidden
        self.window = window
        self.margin = margin
        self.label_mode = label_mode
        self.lr = lr
        self.clip_norm = clip_norm
        self.epochs = epochs
        self.patience = patience
        self.batch_size = batch_size
        self.seed = seed

    def _setup(self):
        self.store_.get("loc.proj", 2 * self.hidden, self.hidden)

    def _scores(self, samples, mode, rng=None):
        parts, windows, slot_pos, cand_rows = [], [], [], []
        for s in samples:
            feats, toks = self._encoded(s)
            win, pos = self._window(toks, s.slot_node)
            rows = list(win) + [c.node for c in s.candidates]
            parts.append(subset_features(feats, rows))
            windows.append(len(win))
            slot_pos.append(pos)
            cand_rows.append(len(win))
        merged, offsets = merge_features(parts)
        h0 = initial_states(merged, self.store_, self.vocab_,
                            hidden=self.hidden, name_dim=self.hidden,
                            type_dim=self.hidden, mode=mode, rng=rng,
                            label_mode=self.label_mode)
        seqs = [list(range(off, off + w)) for off, w in zip(offsets, windows)]
        states = bigru_run(self.store_, "loc.rnn", h0, seqs, self.hidden)
        c2 = states.states_at(list(enumerate(slot_pos)))
        c = T.matmul(c2, self.store_.params["loc.proj"])
        cols = []
        for i, s in enumerate(samples):
            start = offsets[i] + cand_rows[i]
            u = T.gather_rows(h0, list(range(start, start + len(s.candidates))))
            cols.append(_dot_scores(u, T.gather_rows(c, [i])))
        return cols

    def loc_forward(self, samples):
        return self._to_predictions(self._scores(samples, mode="eval"))

    forward = loc_forward
    _predict_batch = loc_forward

    def _loss_batch(self, samples, rng):
        cols = self._scores(samples, mode="train", rng=rng)
        return self._hinge_mean(cols, samples), len(samples)


class AvgBiRnnVarMisuse(_SeqBase):
    """Like Loc, but each candidate is represented by the mean of BiGRU
    states at its usage sites (window per usage)."""

    def __init__(self, hidden=64, window=DEFAULT_WINDOW, margin=1.0,
                 label_mode="subtoken", max_usages=8, lr=1e-3, clip_norm=1.0,
                 epochs=50, patience=5, batch_size=32, seed=0):
        self.hidden = hidden
        self.window = window
        self.margin = margin
        self.label_mode = label_mode
        self.max_usages = max_usages
        self.lr = lr
        self.clip_norm = clip_norm
        self.epochs = epochs
        self.patience = patience
        self.batch_size = batch_size
        self.seed = seed

    def _setup(self):
        pass

    def _usage_sites(self, sample, toks, name):
        sites = [n for n in toks
                 if sample.graph.nodes[n].var == name and n != sample.slot_node]
        return sites[: self.max_usages]

    def _scores(self, samples, mode, rng=None):
        parts, seqs_local = [], []   # one window row-range per sequence
        slot_seq = []                # sequence index of each sample's slot window
        queries = []                 # (seq, pos) per queried state
        cand_seg, cand_ranges = [], []
        n_seq = n_query = n_cand = 0
        for s in samples:
            feats, toks = self._encoded(s)
            win, pos = self._window(toks, s.slot_node)
            parts.append(subset_features(feats, win))
            slot_seq.append(n_seq)
            queries.append((n_seq, pos))
            n_seq += 1
            first_cand = n_cand
            for c in s.candidates:
                for site in self._usage_sites(s, toks, c.name):
                    win, pos = self._window(toks, site)
                    parts.append(subset_features(feats, win))
                    queries.append((n_seq, pos))
                    cand_seg.append(n_cand)
                    n_seq += 1
                n_cand += 1
            cand_ranges.append((first_cand, n_cand))
        merged, offsets = merge_features(parts)
        h0 = initial_states(merged, self.store_, self.vocab_,
                            hidden=self.hidden, name_dim=self.hidden,
                            type_dim=self.hidden, mode=mode, rng=rng,
                            label_mode=self.label_mode)
        seqs = [list(range(off, off + len(p)))
                for off, p in zip(offsets, parts)]
        states = bigru_run(self.store_, "avgbirnn.rnn", h0, seqs, self.hidden)
        queried = states.states_at(queries)
        slot_rows = T.gather_rows(queried, slot_seq)
        usage_rows = T.gather_rows(
            queried, [q for q in range(len(queries)) if q not in set(slot_seq)])
        u_all = _mean_by_segment(usage_rows, cand_seg, n_cand)
        cols = []
        for i, (a, b) in enumerate(cand_ranges):
            u = T.gather_rows(u_all, list(range(a, b)))
            cols.append(_dot_scores(u, T.gather_rows(slot_rows, [i])))
        return cols

    def avgbirnn_forward(self, samples):
        return self._to_predictions(self._scores(samples, mode="eval"))

    forward = avgbirnn_forward
    _predict_batch = avgbirnn_forward

    def _loss_batch(self, samples, rng):
        cols = self._scores(samples, mode="train", rng=rng)
        return self._hinge_mean(cols, samples), len(samples)


class AvgBiRnnVarNaming(_SeqBase):
    """Usage representation = mean BiGRU state over the slot-token windows,
    projected and fed to the naming decoder."""

    def __init__(self, hidden=64, window=DEFAULT_WINDOW,
                 label_mode="subtoken", max_usages=8,
                 max_name_length=MAX_NAME_LENGTH, lr=1e-3, clip_norm=1.0,
                 epochs=50, patience=5, batch_size=32, seed=0):
        self.hidden = hidden
        self.window = window
        self.label_mode = label_mode
        self.max_usages = max_usages
        self.max_name_length = max_name_length
        self.lr = lr
        self.clip_norm = clip_norm
        self.epochs = epochs
        self.patience = patience
        self.batch_size = batch_size
        self.seed = seed

    def _setup(self):
        self.store_.get("avgbirnn.dec_init", 2 * self.hidden, self.hidden)
        make_decoder_params(self.store_, self.hidden, self.vocab_.n_subtokens)

    def _usage_rep(self, samples, mode, rng=None):
        parts, queries, seg = [], [], []
        n_seq = 0
        for i, s in enumerate(samples):
            feats, toks = self._encoded(s)
            for site in s.slot_nodes[: self.max_usages]:
                win, pos = self._window(toks, site)
                parts.append(subset_features(feats, win))
                queries.append((n_seq, pos))
                seg.append(i)
                n_seq += 1
        merged, offsets = merge_features(parts)
        h0 = initial_states(merged, self.store_, self.vocab_,
                            hidden=self.hidden, name_dim=self.hidden,
                            type_dim=self.hidden, mode=mode, rng=rng,
                            label_mode=self.label_mode)
        seqs = [list(range(off, off + len(p)))
                for off, p in zip(offsets, parts)]
        states = bigru_run(self.store_, "avgbirnn.rnn", h0, seqs, self.hidden)
        mean2h = _mean_by_segment(states.states_at(queries), seg, len(samples))
        return T.matmul(mean2h, self.store_.params["avgbirnn.dec_init"])

    def avgbirnn_forward(self, samples):
        init = self._usage_rep(samples, mode="eval")
        seqs, probs = greedy_decode(init, self.store_, self.vocab_,
                                    self.max_name_length)
        return [Prediction(sequence=seq, step_probs=p)
                for seq, p in zip(seqs, probs)]

    forward = avgbirnn_forward
    _predict_batch = avgbirnn_forward

    def _loss_batch(self, samples, rng):
        init = self._usage_rep(samples, mode="train", rng=rng)
        loss = naming_loss(init, [s.gold_subtokens for s in samples],
                           self.store_, self.vocab_)
        return loss, len(samples)


class AvgLblVarNaming(_SeqBase):
    """Log-bilinear usage contexts: each of the 4 left and 4 right context
    tokens contributes its label embedding scaled elementwise by a learned
    per-position vector; usage contexts are averaged and decoded."""

    def __init__(self, hidden=64, label_mode="subtoken", max_usages=8,
                 max_name_length=MAX_NAME_LENGTH, lr=1e-3, clip_norm=1.0,
                 epochs=50, patience=5, batch_size=32, seed=0):
        self.hidden = hidden
        self.label_mode = label_mode
        self.max_usages = max_usages
        self.max_name_length = max_name_length
        self.lr = lr
        self.clip_norm = clip_norm
        self.epochs = epochs
        self.patience = patience
        self.batch_size = batch_size
        self.seed = seed
        self.window = LBL_CONTEXT
        self.margin = 1.0

    def _setup(self):
        self.store_.get("lbl.q", 2 * LBL_CONTEXT, self.hidden)
        self.store_.get("lbl.dec_init", self.hidden, self.hidden)
        make_decoder_params(self.store_, self.hidden, self.vocab_.n_subtokens)

    def _usage_rep(self, samples, mode, rng=None):
        ctx_subtoks, ctx_pos, ctx_usage = [], [], []
        usage_sample = []
        n_usage = 0
        for i, s in enumerate(samples):
            feats, toks = self._encoded(s)
            for site in s.slot_nodes[: self.max_usages]:
                p = toks.index(site)
                for k, off in enumerate(range(-LBL_CONTEXT, LBL_CONTEXT + 1)):
                    if off == 0:
                        continue
                    j = p + off
                    if 0 <= j < len(toks):
                        ctx_subtoks.append(feats.subtok_ids[toks[j]])
                        ctx_pos.append(k if off < 0 else k - 1)
                        ctx_usage.append(n_usage)
                usage_sample.append(i)
                n_usage += 1
        emb = label_mean_embeddings(ctx_subtoks, self.store_, self.vocab_,
                                    self.hidden)
        scaled = T.mul(emb, T.gather_rows(self.store_.params["lbl.q"], ctx_pos))
        per_usage = T.scatter_add_rows(scaled, ctx_usage, n_usage)
        rep = _mean_by_segment(per_usage, usage_sample, len(samples))
        return T.matmul(rep, self.store_.params["lbl.dec_init"])

    def avglbl_forward(self, samples):
        init = self._usage_rep(samples, mode="eval")
        seqs, probs = greedy_decode(init, self.store_, self.vocab_,
                                    self.max_name_length)
        return [Prediction(sequence=seq, step_probs=p)
                for seq, p in zip(seqs, probs)]

    forward = avglbl_forward
    _predict_batch = avglbl_forward

    def _loss_batch(self, samples, rng):
        init = self._usage_rep(samples, mode="train", rng=rng)
        loss = naming_loss(init, [s.gold_subtokens for s in samples],
                           self.store_, self.vocab_)
        return loss, len(samples)
