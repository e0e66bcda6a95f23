import numpy as np
from numpy.polynomial import Polynomial


def extrapolate_to_zero(ts, values, degree):
    """
    Value at t = 0 of the least squares polynomial of ``degree`` through complex ``values``.
    Real and imaginary parts are fitted separately.
    """
    if len(ts) != len(values) or len(ts) <= degree:
        raise ValueError(f"a fit of degree {degree} needs more than {degree} values, one per node")
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=complex)
    return complex(
        Polynomial.fit(ts, values.real, degree)(0.0), Polynomial.fit(ts, values.imag, degree)(0.0)
    )


class DisjointSets:
    """Union-find over hashable items, with path halving."""

    def __init__(self, items=()):
        self.parent = {}
        for item in items:
            self.add(item)

    def add(self, item):
        self.parent.setdefault(item, item)

    def find(self, item):
        self.add(item)
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self, a, b):
        root_a, root_b = self.find(a), self.find(b)
        if root_a != root_b:
            self.parent[root_b] = root_a

    def classes(self):
        """The classes in order of first insertion, each in insertion order."""
        groups = {}
        for item in self.parent:
            groups.setdefault(self.find(item), []).append(item)
        return list(groups.values())
