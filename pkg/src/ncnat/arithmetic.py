"""Sum, grafting product and factorization into irreducibles."""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .config import check_budget
from .congruence import ClassId, class_of, close_stratum
from .terms import LEAF, Term

__all__ = [
    "oplus",
    "multiply",
    "multiply_classes",
    "Factorization",
    "factorize",
    "is_irreducible",
    "divisor_pairs",
]


def oplus(a: Term, b: Term) -> Term:
    return Term(a, b)


def multiply(a: Term, b: Term) -> Term:
    """Graft a copy of ``b`` onto every leaf of ``a``.

    ``b`` is shared rather than copied, which is safe since terms are
    immutable.
    """
    if b.left is None:
        return a
    if a.left is None:
        return b
    return _graft(a, b)


def _graft(a: Term, b: Term) -> Term:
    if a.left is None:
        return b
    return Term(_graft(a.left, b), _graft(a.right, b))


def multiply_classes(a: ClassId, b: ClassId) -> ClassId:
    check_budget(a.n * b.n)
    return class_of(multiply(a.rep, b.rep))


@dataclass(frozen=True, order=True)
class Factorization:
    """A multiset of irreducible factors, sorted in canonical class order."""

    factors: tuple[ClassId, ...]
    irreducible: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.irreducible:
            object.__setattr__(self, "irreducible", (True,) * len(self.factors))

    @property
    def magnitude(self) -> int:
        product = 1
        for f in self.factors:
            product *= f.n
        return product

    def __str__(self):
        return " * ".join(str(f.rep) for f in self.factors) or "1"


@functools.lru_cache(maxsize=None)
def _product_table(d: int, e: int) -> dict[int, tuple[tuple[int, int], ...]]:
    """Map product class number -> class-number pairs ``(a, b)`` with ``a*b``."""
    left, right = close_stratum(d), close_stratum(e)
    target = close_stratum(d * e)
    found: dict[int, list[tuple[int, int]]] = {}
    for i in range(left.num_classes):
        a = left.class_id(i).rep
        for j in range(right.num_classes):
            product = multiply(a, right.class_id(j).rep)
            found.setdefault(target.class_number(product), []).append((i, j))
    return {k: tuple(v) for k, v in found.items()}


def divisor_pairs(c: ClassId) -> list[tuple[ClassId, ClassId]]:
    """All ``(a, b)`` with ``|a|, |b| >= 2`` and ``a * b = c``."""
    check_budget(c.n)
    pairs = []
    number = c.index - 1
    for d in range(2, c.n // 2 + 1):
        if c.n % d:
            continue
        e = c.n // d
        hits = _product_table(d, e).get(number, ())
        left, right = close_stratum(d), close_stratum(e)
        pairs.extend((left.class_id(i), right.class_id(j)) for i, j in hits)
    return pairs


def is_irreducible(c: ClassId) -> bool:
    """True iff ``|c| >= 2`` and no two classes of magnitude >= 2 multiply to ``c``."""
    return c.n >= 2 and not divisor_pairs(c)


@functools.lru_cache(maxsize=None)
def _factor_sets(c: ClassId) -> frozenset[tuple[ClassId, ...]]:
    if c.n == 1:
        return frozenset({()})
    pairs = divisor_pairs(c)
    if not pairs:
        return frozenset({(c,)})
    out = set()
    for a, b in pairs:
        for fa in _factor_sets(a):
            for fb in _factor_sets(b):
                out.add(tuple(sorted(fa + fb)))
    return frozenset(out)


def factorize(c: ClassId) -> list[Factorization]:
    """Every distinct multiset of irreducibles whose product is ``c``.

    An irreducible ``c`` yields the single factorization ``[c]``; the unit
    ``1`` yields the empty product.
    """
    check_budget(c.n)
    return sorted(Factorization(f) for f in _factor_sets(c))
