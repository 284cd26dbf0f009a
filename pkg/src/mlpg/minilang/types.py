"""Nominal type lattice with declared supertype sets."""

BUILTINS = ("int", "bool", "string", "void")


class TypeLatticeError(Exception):
    pass


class TypeLattice:
    """Type names ordered by a declared (acyclic) direct-supertype relation."""

    def __init__(self):
        self._supers = {t: set() for t in BUILTINS}

    @property
    def names(self):
        return set(self._supers)

    def has(self, name):
        return name in self._supers

    def add_type(self, name, supertypes=()):
        if name in BUILTINS:
            raise TypeLatticeError(f"cannot redeclare builtin type {name}")
        if name in self._supers:
            raise TypeLatticeError(f"duplicate type {name}")
        for s in supertypes:
            if s not in self._supers:
                raise TypeLatticeError(f"unknown supertype {s} for {name}")
            if s in BUILTINS:
                raise TypeLatticeError(f"type {name} may not extend builtin {s}")
        self._supers[name] = set(supertypes)
        if name in self.supertype_closure(name) - {name}:
            raise TypeLatticeError(f"supertype cycle through {name}")

    def direct_supertypes(self, name):
        return set(self._supers[name])

    def supertype_closure(self, name):
        """Transitive supertype set; always contains the type itself."""
        out = set()
        stack = [name]
        while stack:
            t = stack.pop()
            if t in out:
                continue
            out.add(t)
            stack.extend(self._supers[t])
        return out

    def assignable(self, src, dst):
        """True iff a value of type `src` may be used where `dst` is expected."""
        return dst in self.supertype_closure(src)
