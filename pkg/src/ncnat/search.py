"""Hunting for non-cancellative products, and checking rewrite chains.

Since Z[q] is a UFD and every deformation invariant is multiplicative,
``a*b1 = a*b2`` forces ``L(b1) = L(b2)``.  Pairs of distinct classes with
equal invariant are therefore the only candidates for cofactors in a
non-cancellative product; :func:`search_noncancel` tries each candidate pair
against every small multiplier.

Chain files hold one term per line; blank lines and ``#`` comments are
skipped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

from .arithmetic import multiply_classes
from .config import check_budget
from .congruence import ClassId, class_of, close_stratum
from .errors import ParseError
from .qinv import ELL_A, DeformationSpec, Polynomial, eval_morphism, invariant_table
from .terms import LEAF, RewriteSite, Term, apply_rewrite, parse, rewrite_sites

__all__ = [
    "NonCancelWitness",
    "RewriteChain",
    "StepVerdict",
    "ChainVerdict",
    "find_collisions",
    "flanked_term",
    "flanked_candidates",
    "search_noncancel",
    "verify_chain",
    "parse_chain",
    "read_chain",
]


@dataclass(frozen=True, order=True)
class NonCancelWitness:
    """``a * b1 = a * b2 = product`` with ``b1 != b2``."""

    a: ClassId
    b1: ClassId
    b2: ClassId
    product: ClassId

    def sort_key(self):
        return (self.a.n, self.b1.n, self.a.index, self.b1.index, self.b2.index)


def find_collisions(spec: DeformationSpec, n: int) -> list[tuple[ClassId, ClassId]]:
    """Unordered pairs of distinct classes of magnitude ``n`` sharing an invariant."""
    groups: dict[Polynomial, list[ClassId]] = {}
    for cid, value in invariant_table(spec, n).items():
        groups.setdefault(value, []).append(cid)
    pairs = []
    for members in groups.values():
        pairs.extend(itertools.combinations(sorted(members), 2))
    return sorted(pairs)


def flanked_term(a1: Term, a2: Term) -> Term:
    """``(1 + a1) + (a2 + 1)``."""
    return Term(Term(LEAF, a1), Term(a2, LEAF))


def flanked_candidates(max_inner_magnitude: int) -> list[tuple[Term, Term]]:
    """Distinct classes of the form ``(1 + a1) + (a2 + 1)`` that ``ELL_A`` confuses.

    ``ELL_A((1 + a1) + (a2 + 1)) = (2 + S) + (2 - S) q^2`` with
    ``S = ELL_A(a1) + ELL_A(a2)``, so two such terms collide exactly when
    their inner sums agree.  Inner elements range over class representatives
    of magnitude ``<= max_inner_magnitude``.  Each output term is the one
    built from the least inner pair of its class; pairs are returned in
    canonical order.
    """
    if max_inner_magnitude < 1:
        return []
    inner = [
        (cid.rep, eval_morphism(ELL_A, cid.rep))
        for m in range(1, max_inner_magnitude + 1)
        for cid in close_stratum(m).classes()
    ]
    check_budget(2 * max_inner_magnitude + 2)
    by_sum: dict[Polynomial, dict[ClassId, Term]] = {}
    for (a1, v1), (a2, v2) in itertools.product(inner, repeat=2):
        term = flanked_term(a1, a2)
        bucket = by_sum.setdefault(v1 + v2, {})
        cid = class_of(term)
        if cid not in bucket or term < bucket[cid]:
            bucket[cid] = term
    pairs = []
    for bucket in by_sum.values():
        for c1, c2 in itertools.combinations(sorted(bucket), 2):
            pairs.append((bucket[c1], bucket[c2]))
    pairs.sort()
    return pairs


def search_noncancel(
    n: int, multiplier_max: int, spec: DeformationSpec = ELL_A
) -> list[NonCancelWitness]:
    """Witnesses ``a*b1 = a*b2`` for ``spec``-collisions ``(b1, b2)`` of magnitude ``n``.

    Multipliers range over all classes with ``2 <= |a| <= multiplier_max``.
    Results are sorted by ``(|a|, |b1|)`` and then class indices.
    """
    check_budget(n * max(multiplier_max, 1))
    collisions = find_collisions(spec, n)
    witnesses = []
    for m in range(2, multiplier_max + 1):
        for a in close_stratum(m).classes():
            for b1, b2 in collisions:
                p1 = multiply_classes(a, b1)
                if p1 == multiply_classes(a, b2):
                    witnesses.append(NonCancelWitness(a, b1, b2, p1))
    witnesses.sort(key=NonCancelWitness.sort_key)
    return witnesses


# -- rewrite chains ----------------------------------------------------------


@dataclass(frozen=True)
class RewriteChain:
    steps: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class StepVerdict:
    """Outcome for the step from ``steps[index]`` to ``steps[index + 1]``."""

    index: int
    site: RewriteSite | None

    @property
    def valid(self) -> bool:
        return self.site is not None


@dataclass(frozen=True)
class ChainVerdict:
    steps: tuple[StepVerdict, ...]

    @property
    def valid(self) -> bool:
        return all(s.valid for s in self.steps)

    @property
    def first_failure(self) -> int | None:
        for s in self.steps:
            if not s.valid:
                return s.index
        return None


def verify_chain(chain: RewriteChain) -> ChainVerdict:
    """Identify, for each consecutive pair, the single rewrite site linking them.

    A step with no such site gets ``site=None``; that is a verdict, not an
    error.
    """
    steps = chain.steps
    if len(steps) < 2:
        raise ValueError("a chain needs at least two terms")
    verdicts = []
    for i, (cur, nxt) in enumerate(zip(steps, steps[1:])):
        found = None
        if cur.magnitude == nxt.magnitude:
            for site in rewrite_sites(cur):
                if apply_rewrite(cur, site) == nxt:
                    found = site
                    break
        verdicts.append(StepVerdict(i, found))
    return ChainVerdict(tuple(verdicts))


def parse_chain(text: str) -> RewriteChain:
    steps = []
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        if body.strip():
            try:
                steps.append(parse(body))
            except ParseError as exc:
                message = str(exc).rsplit(" at offset", 1)[0]
                raise ParseError(message, offset + exc.offset, text) from None
        offset += len(line.encode("utf-8"))
    return RewriteChain(tuple(steps))


def read_chain(path: str | Path) -> RewriteChain:
    return parse_chain(Path(path).read_text(encoding="utf-8"))
