"""File-level dataset splitting with whole projects reserved for the
unseen-project test set."""

import json
from dataclasses import dataclass, field

import numpy as np

SPLIT_NAMES = ("train", "valid", "test_seen", "test_unseen_projects", "dev")


class LeakageError(Exception):
    pass


@dataclass
class SplitManifest:
    assignment: dict = field(default_factory=dict)  # split -> [file_id]

    def files(self, split):
        return list(self.assignment.get(split, []))

    def check(self):
        seen = {}
        for split, files in self.assignment.items():
            for f in files:
                if f in seen:
                    raise LeakageError(f"{f} in both {seen[f]} and {split}")
                seen[f] = split
        train_projects = {f.split("/")[0] for f in self.files("train")}
        for f in self.files("test_unseen_projects"):
            if f.split("/")[0] in train_projects:
                raise LeakageError(f"unseen-project file {f} shares a "
                                   "project with the training set")
        return self

    def save(self, path):
        self.check()
        with open(path, "w") as f:
            json.dump(self.assignment, f, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls(json.load(f)).check()


def split_corpus(file_ids, unseen_projects=(), ratios=(0.6, 0.1, 0.3),
                 seed=0, dev_fraction=0.0):
    """Assign files to splits.

    Files of `unseen_projects` go whole to test_unseen_projects; the rest
    are shuffled and split by file into train/valid/test_seen at `ratios`.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")
    unseen_projects = set(unseen_projects)
    unseen = sorted(f for f in file_ids
                    if f.split("/")[0] in unseen_projects)
    rest = sorted(f for f in file_ids if f.split("/")[0] not in unseen_projects)
    rng = np.random.default_rng(seed)
    order = [rest[i] for i in rng.permutation(len(rest))]
    n_dev = int(round(dev_fraction * len(order)))
    dev, order = order[:n_dev], order[n_dev:]
    n = len(order)
    n_train = int(round(ratios[0] * n))
    n_valid = int(round(ratios[1] * n))
    manifest = SplitManifest({
        "train": sorted(order[:n_train]),
        "valid": sorted(order[n_train:n_train + n_valid]),
        "test_seen": sorted(order[n_train + n_valid:]),
        "test_unseen_projects": unseen,
        "dev": sorted(dev),
    })
    return manifest.check()
