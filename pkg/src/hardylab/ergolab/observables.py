"""Trigonometric polynomials on tori."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


def _key(k) -> tuple:
    return tuple(int(x) for x in (k if isinstance(k, (tuple, list)) else (k,)))


@dataclass(frozen=True)
class CharacterObservable:
    """sum_k c_k e(k.x), stored as ((k, c_k), ...) with distinct k and nonzero c_k."""

    terms: tuple

    def __post_init__(self):
        acc: dict = {}
        dims = set()
        for k, c in self.terms:
            k = _key(k)
            dims.add(len(k))
            acc[k] = acc.get(k, 0) + complex(c)
        if len(dims) > 1:
            raise ValueError("frequencies of different dimensions")
        items = tuple(sorted((k, c) for k, c in acc.items() if c != 0))
        object.__setattr__(self, "terms", items)
        object.__setattr__(self, "_dim", dims.pop() if dims else 1)

    @staticmethod
    def character(k, c=1.0) -> CharacterObservable:
        return CharacterObservable(((_key(k), c),))

    @staticmethod
    def constant(c, dim: int = 1) -> CharacterObservable:
        return CharacterObservable((((0,) * dim, c),))

    @staticmethod
    def from_dict(d) -> CharacterObservable:
        """From [{"k": [..], "c": [re, im] or re}, ...]."""
        terms = []
        for item in d:
            c = item["c"]
            c = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
            terms.append((_key(item["k"]), c))
        return CharacterObservable(tuple(terms))

    def to_dict(self) -> list:
        return [{"k": list(k), "c": [c.real, c.imag]} for k, c in self.terms]

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self):
        return len(self.terms)

    @property
    def integral(self) -> complex:
        zero = (0,) * self.dim
        for k, c in self.terms:
            if k == zero:
                return c
        return 0j

    @property
    def sup_bound(self) -> float:
        return math.fsum(abs(c) for _, c in self.terms)

    def conj(self) -> CharacterObservable:
        return CharacterObservable(tuple((tuple(-x for x in k), c.conjugate()) for k, c in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return CharacterObservable(tuple((k, c * other) for k, c in self.terms))
        out = []
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                out.append((tuple(a + b for a, b in zip(k1, k2)), c1 * c2))
        return CharacterObservable(tuple(out))

    __rmul__ = __mul__

    def __add__(self, other):
        return CharacterObservable(self.terms + other.terms)

    def tensor(self, other) -> CharacterObservable:
        """(f (x) g)(x, y) = f(x) g(y)."""
        return CharacterObservable(tuple((k1 + k2, c1 * c2) for k1, c1 in self.terms for k2, c2 in other.terms))

    def __call__(self, *x) -> complex:
        if len(x) == 1 and isinstance(x[0], (tuple, list)):
            x = tuple(x[0])
        return sum(c * cmath.exp(2j * math.pi * sum(ki * float(xi) for ki, xi in zip(k, x))) for k, c in self.terms)

    @property
    def normalized(self) -> CharacterObservable:
        """Scaled so that the sup bound is at most 1."""
        b = self.sup_bound
        return self if b <= 1 else self * (1 / b)
