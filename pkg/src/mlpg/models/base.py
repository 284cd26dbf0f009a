"""Shared estimator machinery: parameter lifecycle, Adam training loop with
early stopping, prediction containers, checkpoint load."""

import csv

import numpy as np
from sklearn.base import BaseEstimator

from ..encoding import build_vocabulary, Vocabulary
from ..nn import ParamStore, Adam


class DivergenceError(Exception):
    pass


class Prediction:
    """Per-sample model output.

    Misuse: `scores` and `probs` over candidates (candidate order of the
    sample), `pred_index`, `confidence` = top probability.
    Naming: decoded `sequence` of subtoken strings and `step_probs`.
    """

    def __init__(self, scores=None, probs=None, pred_index=None,
                 sequence=None, step_probs=None):
        self.scores = scores
        self.probs = probs
        self.pred_index = pred_index
        self.sequence = sequence
        self.step_probs = step_probs

    @property
    def confidence(self):
        if self.probs is not None:
            return float(self.probs.max())
        if self.step_probs:
            return float(np.prod(self.step_probs))
        return 1.0


class ModelBase(BaseEstimator):
    """fit/predict over lists of TaskSample; subclasses implement `_setup`
    (parameter creation), `_loss_batch`, and `_predict_batch`."""

    # ---- hooks -----------------------------------------------------------

    def _setup(self):
        raise NotImplementedError

    def _loss_batch(self, samples, rng):
        """Return (scalar loss Tensor, sample count) in training mode."""
        raise NotImplementedError

    def _predict_batch(self, samples):
        """Return a list of Prediction, evaluation mode."""
        raise NotImplementedError

    def _batch_cost(self, sample):
        return 1

    def _batch_budget(self):
        return getattr(self, "batch_size", 32)

    # ---- lifecycle -------------------------------------------------------

    def _init_store(self, vocab):
        self.vocab_ = vocab
        self.store_ = ParamStore(np.random.default_rng(self.seed + 1))
        self._cache = {}
        self._setup()

    def load_weights(self, checkpoint_path, vocab_path):
        """Restore a trained model from a checkpoint + vocabulary pair."""
        self._init_store(Vocabulary.load(vocab_path))
        self.store_.load(checkpoint_path)
        return self

    def _snapshot(self):
        return {k: t.value.copy() for k, t in self.store_.params.items()}

    def _restore(self, snap):
        for k, v in snap.items():
            self.store_.params[k].value = v.copy()

    def _iter_batches(self, samples):
        budget = self._batch_budget()
        batch, cost = [], 0
        for s in samples:
            c = self._batch_cost(s)
            if batch and cost + c > budget:
                yield batch
                batch, cost = [], 0
            batch.append(s)
            cost += c
        if batch:
            yield batch

    # ---- training --------------------------------------------------------

    def fit(self, train, valid=None, log_path=None, stop_at=None):
        """Train on `train`; early-stops on `patience` stale epochs, or as
        soon as monitored accuracy reaches `stop_at` if one is given."""
        rng = np.random.default_rng(self.seed)
        self._init_store(build_vocabulary(train, self.label_mode))
        opt = Adam(self.store_, lr=self.lr, clip_norm=self.clip_norm)
        monitor = valid if valid else train
        best_acc, best_snap, stale = -1.0, None, 0
        self.history_ = []
        for epoch in range(self.epochs):
            order = rng.permutation(len(train))
            shuffled = [train[i] for i in order]
            total, count = 0.0, 0
            for batch in self._iter_batches(shuffled):
                self.store_.zero_grads()
                loss, k = self._loss_batch(batch, rng)
                value = float(loss.value[0, 0])
                if not np.isfinite(value):
                    raise DivergenceError(f"non-finite loss at epoch {epoch}")
                loss.backward()
                opt.step()
                total += value * k
                count += k
            acc = self.score(monitor)
            self.history_.append(
                {"epoch": epoch, "loss": total / max(count, 1), "accuracy": acc})
            if acc > best_acc:
                best_acc, best_snap, stale = acc, self._snapshot(), 0
                if stop_at is not None and acc >= stop_at:
                    break
            else:
                stale += 1
                if stale >= self.patience:
                    break
        if best_snap is not None:
            self._restore(best_snap)
        self.best_accuracy_ = best_acc
        if log_path:
            with open(log_path, "w", newline="") as f:
                w = csv.DictWriter(f, fieldnames=["epoch", "loss", "accuracy"])
                w.writeheader()
                w.writerows(self.history_)
        return self

    # ---- inference -------------------------------------------------------

    def predict(self, samples):
        out = []
        for batch in self._iter_batches(list(samples)):
            out.extend(self._predict_batch(batch))
        return out

    def _is_correct(self, sample, pred):
        if sample.kind == "misuse":
            return pred.pred_index == sample.gold_index
        return pred.sequence == sample.gold_subtokens

    def score(self, samples):
        samples = list(samples)
        preds = self.predict(samples)
        return sum(self._is_correct(s, p)
                   for s, p in zip(samples, preds)) / len(samples)
