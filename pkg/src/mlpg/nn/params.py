"""Named parameter store with binary checkpointing."""

import struct

import numpy as np

from .tensor import Tensor

_MAGIC = b"MLPG"
_VERSION = 1


class ParamStore:
    """Learnable parameters with persistent identity across steps."""

    def __init__(self, rng=None):
        self.params = {}        # name -> Tensor (leaf)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.frozen = False

    def get(self, name, rows, cols, init="uniform"):
        """Create-or-fetch a parameter. Shapes must agree on re-fetch."""
        t = self.params.get(name)
        if t is not None:
            if t.shape != (rows, cols):
                raise ValueError(f"param {name}: shape {t.shape} != {(rows, cols)}")
            return t
        if self.frozen:
            raise ValueError(f"param store frozen; cannot create {name}")
        if init == "zeros":
            value = np.zeros((rows, cols))
        elif init == "uniform":
            bound = np.sqrt(6.0 / (rows + cols))
            value = self.rng.uniform(-bound, bound, size=(rows, cols))
        else:
            raise ValueError(f"unknown init {init}")
        t = Tensor(value, name=name)
        self.params[name] = t
        return t

    def zero_grads(self):
        for t in self.params.values():
            t.grad = None

    def names(self):
        return sorted(self.params)

    def global_grad_norm(self):
        total = 0.0
        for t in self.params.values():
            if t.grad is not None:
                total += float((t.grad ** 2).sum())
        return np.sqrt(total)

    def save(self, path):
        with open(path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<II", _VERSION, len(self.params)))
            for name in self.names():
                t = self.params[name]
                nb = name.encode("utf-8")
                f.write(struct.pack("<III", len(nb), *t.shape))
                f.write(nb)
                f.write(t.value.astype("<f8").tobytes())

    def load(self, path):
        with open(path, "rb") as f:
            if f.read(4) != _MAGIC:
                raise ValueError(f"{path} is not a parameter checkpoint")
            version, count = struct.unpack("<II", f.read(8))
            if version != _VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            for _ in range(count):
                nlen, rows, cols = struct.unpack("<III", f.read(12))
                name = f.read(nlen).decode("utf-8")
                value = np.frombuffer(f.read(rows * cols * 8), dtype="<f8")
                value = value.reshape(rows, cols).copy()
                if name in self.params:
                    self.params[name].value = value
                else:
                    self.params[name] = Tensor(value, name=name)
        return self
