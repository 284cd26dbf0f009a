"""Subtoken and type-name vocabularies, built from the training split only."""

import json

from .subtok import split_subtokens

UNK = "<UNK>"
SLOT = "<SLOT>"
END = "<END>"
UNKTYPE = "<UNKTYPE>"

RESERVED_SUBTOKENS = (UNK, SLOT, END)


class Vocabulary:
    def __init__(self, subtokens=(), types=()):
        self.subtoken_index = {}
        for s in RESERVED_SUBTOKENS:
            self.subtoken_index[s] = len(self.subtoken_index)
        for s in subtokens:
            if s not in self.subtoken_index:
                self.subtoken_index[s] = len(self.subtoken_index)
        self.type_index = {UNKTYPE: 0}
        for t in types:
            if t not in self.type_index:
                self.type_index[t] = len(self.type_index)

    @property
    def n_subtokens(self):
        return len(self.subtoken_index)

    @property
    def n_types(self):
        return len(self.type_index)

    @property
    def unk_id(self):
        return self.subtoken_index[UNK]

    @property
    def slot_id(self):
        return self.subtoken_index[SLOT]

    @property
    def end_id(self):
        return self.subtoken_index[END]

    def subtoken_ids(self, subtokens):
        return [self.subtoken_index.get(s, self.unk_id) for s in subtokens]

    def type_ids(self, type_names):
        return sorted({self.type_index.get(t, 0) for t in type_names})

    def oov_rate(self, subtokens):
        subtokens = list(subtokens)
        if not subtokens:
            return 0.0
        unk = sum(1 for s in subtokens if s not in self.subtoken_index)
        return unk / len(subtokens)

    def save(self, path):
        subs = sorted(self.subtoken_index, key=self.subtoken_index.get)
        typs = sorted(self.type_index, key=self.type_index.get)
        with open(path, "w") as f:
            json.dump({"subtokens": subs, "types": typs}, f, indent=0)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            d = json.load(f)
        v = cls()
        v.subtoken_index = {s: i for i, s in enumerate(d["subtokens"])}
        v.type_index = {t: i for i, t in enumerate(d["types"])}
        for s in RESERVED_SUBTOKENS:
            assert v.subtoken_index.get(s) is not None
        return v


def node_label_units(label, label_mode):
    """Vocabulary units of one node label under a label mode."""
    if label_mode == "token":
        return [label]
    return split_subtokens(label)


def build_vocabulary(samples, label_mode="subtoken"):
    """Collect units and type names from training samples' graphs."""
    subs, types = [], []
    for s in samples:
        for n in s.graph.nodes:
            if n.label != SLOT:
                subs.extend(node_label_units(n.label, label_mode))
        for closure in s.type_closures.values():
            types.extend(closure)
        if s.gold_subtokens:
            subs.extend(s.gold_subtokens)
    return Vocabulary(sorted(set(subs)), sorted(set(types)))
