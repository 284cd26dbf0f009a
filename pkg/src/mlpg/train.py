"""Run orchestration: run configuration, training, evaluation reports."""

import csv
import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from .models import make_model
from . import metrics as M


@dataclass
class RunConfig:
    task: str = "misuse"            # misuse | naming
    model: str = "ggnn"             # ggnn | loc | avgbirnn | avglbl
    edge_mask: str = "full"         # full | syntax | semantic | dataflow4
    label_mode: str = "subtoken"    # subtoken | token | disabled
    hidden: int = 64
    steps: int = 8
    margin: float = 1.0
    lr: float = 1e-3
    clip_norm: float = 1.0
    epochs: int = 50
    patience: int = 5
    batch_nodes: int = 20000
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        env = os.environ.get("MLPG_SEED")
        if env is not None:
            self.seed = int(env)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def build_model(self):
        kwargs = {"hidden": self.hidden, "label_mode": self.label_mode,
                  "lr": self.lr, "clip_norm": self.clip_norm,
                  "epochs": self.epochs, "patience": self.patience,
                  "seed": self.seed}
        if self.model == "ggnn":
            kwargs.update(steps=self.steps, edge_mask=self.edge_mask,
                          batch_nodes=self.batch_nodes)
        else:
            kwargs["batch_size"] = self.batch_size
        if self.task == "misuse" and self.model != "avglbl":
            kwargs["margin"] = self.margin
        return make_model(self.task, self.model, **kwargs)


def train_run(config, train, valid=None, out_dir=None):
    """Train a model; if out_dir is given, write config, checkpoint,
    vocabulary, and the per-epoch CSV log there."""
    model = config.build_model()
    log_path = os.path.join(out_dir, "epochs.csv") if out_dir else None
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "run_config.json"), "w") as f:
            f.write(config.to_json() + "\n")
    model.fit(train, valid=valid, log_path=log_path)
    if out_dir:
        model.store_.save(os.path.join(out_dir, "checkpoint.bin"))
        model.vocab_.save(os.path.join(out_dir, "vocab.json"))
    return model


def load_run(out_dir):
    with open(os.path.join(out_dir, "run_config.json")) as f:
        config = RunConfig.from_json(f.read())
    model = config.build_model()
    model.load_weights(os.path.join(out_dir, "checkpoint.bin"),
                       os.path.join(out_dir, "vocab.json"))
    return config, model


def chance_accuracy(samples):
    """Mean 1/k over candidate counts: expected accuracy of random choice."""
    return float(np.mean([1.0 / len(s.candidates) for s in samples]))


def evaluate_misuse(model, samples):
    preds = model.predict(samples)
    report = M.misuse_report(
        [p.pred_index for p in preds],
        [p.confidence for p in preds],
        [s.gold_index for s in samples],
        [len(s.candidates) for s in samples])
    return report, preds


def evaluate_naming(model, samples):
    preds = model.predict(samples)
    report = M.naming_report([p.sequence for p in preds],
                             [s.gold_subtokens for s in samples])
    return report, preds


def evaluate(model, samples, task, out_dir=None, tag="eval"):
    """Metrics report plus optional JSON/CSV/PR-curve artifacts."""
    samples = list(samples)
    if task == "misuse":
        report, preds = evaluate_misuse(model, samples)
    else:
        report, preds = evaluate_naming(model, samples)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{tag}_report.json"), "w") as f:
            json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        with open(os.path.join(out_dir, f"{tag}_predictions.csv"), "w",
                  newline="") as f:
            w = csv.writer(f)
            if task == "misuse":
                w.writerow(["file_id", "gold_index", "pred_index",
                            "confidence", "candidates"])
                for s, p in zip(samples, preds):
                    w.writerow([s.file_id, s.gold_index, p.pred_index,
                                f"{p.confidence:.6f}", len(s.candidates)])
            else:
                w.writerow(["file_id", "gold", "predicted"])
                for s, p in zip(samples, preds):
                    w.writerow([s.file_id, " ".join(s.gold_subtokens),
                                " ".join(p.sequence)])
        if task == "misuse":
            with open(os.path.join(out_dir, f"{tag}_pr_curve.csv"), "w",
                      newline="") as f:
                w = csv.writer(f)
                w.writerow(["recall", "precision", "threshold"])
                w.writerows(report.curve)
    return report
