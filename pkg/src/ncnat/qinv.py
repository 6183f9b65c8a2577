"""Integer polynomials in q and invariants built from linear deformations.

Any pair of polynomials ``(alpha, beta)`` defines an operation
``f + g := alpha*f + beta*g`` on Z[q].  Expanding
``(w + x) + (y + z)`` gives ``alpha^2 w + alpha*beta (x + y) + beta^2 z``, which
is symmetric in ``x`` and ``y``, so the operation satisfies the medial
identity and ``L(1) = 1``, ``L(a + b) = alpha L(a) + beta L(b)`` is constant on
congruence classes.  Two presets ship:

* ``ELL``   = (1, q)
* ``ELL_A`` = (1 + q, 1 - q)

Polynomial text form lists terms by ascending degree, e.g.
``5 - 2q + q^2``; the parser accepts any order and an optional ``*``.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from itertools import zip_longest

from .congruence import ClassId, close_stratum
from .errors import ParseError
from .terms import Term

__all__ = [
    "Polynomial",
    "poly_add",
    "poly_mul",
    "poly_eval",
    "DeformationSpec",
    "ELL",
    "ELL_A",
    "parse_spec",
    "eval_morphism",
    "magnitude_via_ell",
    "invariant_table",
]


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial, ascending coefficients, no trailing zeros."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        end = len(coeffs)
        while end and coeffs[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coeffs", coeffs[:end])

    @classmethod
    def constant(cls, c: int) -> Polynomial:
        return cls((c,))

    @classmethod
    def q(cls) -> Polynomial:
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return Polynomial((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(
            tuple(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))
        )

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self):
        parts: list[str] = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                mono = "q" if k == 1 else f"q^{k}"
                body = mono if abs(c) == 1 else f"{abs(c)}{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {body}")
        return " ".join(parts) if parts else "0"

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> Polynomial:
        return parse_polynomial(text)


_MONOMIAL = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coef>\d+)\s*(?:\*\s*)?)?(?P<var>q(?:\s*(?:\^|\*\*)\s*(?P<exp>\d+))?)?\s*"
)


def parse_polynomial(text: str) -> Polynomial:
    """Parse ``"5 - 2q + q^2"``-style text; terms may come in any order."""
    coeffs: dict[int, int] = {}
    i, size = 0, len(text)
    first = True
    if not text.strip():
        raise ParseError("empty polynomial", 0, text)
    while i < size:
        m = _MONOMIAL.match(text, i)
        if m is None or m.end() == i or (m["coef"] is None and m["var"] is None):
            raise ParseError("expected a monomial", _skip_ws(text, i), text)
        if m["sign"] is None and not first:
            raise ParseError("expected '+' or '-'", _skip_ws(text, i), text)
        coef = int(m["coef"]) if m["coef"] is not None else 1
        if m["sign"] == "-":
            coef = -coef
        exp = 0
        if m["var"]:
            exp = int(m["exp"]) if m["exp"] is not None else 1
        coeffs[exp] = coeffs.get(exp, 0) + coef
        i = m.end()
        first = False
    top = max(coeffs) if coeffs else -1
    return Polynomial(tuple(coeffs.get(k, 0) for k in range(top + 1)))


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def poly_add(p: Polynomial, r: Polynomial) -> Polynomial:
    return p + r


def poly_mul(p: Polynomial, r: Polynomial) -> Polynomial:
    return p * r


def poly_eval(p: Polynomial, x: int) -> int:
    return p(x)


@dataclass(frozen=True)
class DeformationSpec:
    """Linear operation ``f + g = alpha*f + beta*g`` on Z[q]."""

    alpha: Polynomial
    beta: Polynomial
    name: str = ""

    def combine(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return self.alpha * f + self.beta * g

    def __str__(self):
        return self.name or f"custom:{self.alpha}:{self.beta}"


_Q = Polynomial.q()
ONE = Polynomial.constant(1)
ELL = DeformationSpec(ONE, _Q, "ell")
ELL_A = DeformationSpec(ONE + _Q, ONE - _Q, "ell-a")

PRESETS = {"ell": ELL, "ell-a": ELL_A}


def parse_spec(text: str) -> DeformationSpec:
    """``ell``, ``ell-a``, or ``custom:<alpha>:<beta>``."""
    key = text.strip().lower()
    if key in PRESETS:
        return PRESETS[key]
    if key in ("ell_a", "l_a", "ella"):
        return ELL_A
    if key.startswith("custom:"):
        parts = text.strip().split(":")
        if len(parts) != 3:
            raise ParseError("custom spec must look like custom:<alpha>:<beta>", 0, text)
        return DeformationSpec(parse_polynomial(parts[1]), parse_polynomial(parts[2]))
    raise ParseError(f"unknown deformation {text!r}", 0, text)


def eval_morphism(spec: DeformationSpec, t: Term) -> Polynomial:
    """``L(1) = 1``, ``L(a + b) = alpha L(a) + beta L(b)``, bottom-up."""
    return _evaluator(spec)(t)


@functools.lru_cache(maxsize=64)
def _evaluator(spec: DeformationSpec):
    @functools.lru_cache(maxsize=1 << 16)
    def value(t: Term) -> Polynomial:
        if t.left is None:
            return ONE
        return spec.combine(value(t.left), value(t.right))

    return value


def magnitude_via_ell(t: Term) -> int:
    """Magnitude recovered as ``ell(t)`` at ``q = 1``."""
    return eval_morphism(ELL, t)(1)


def invariant_table(spec: DeformationSpec, n: int) -> dict[ClassId, Polynomial]:
    """Invariant value of every class of magnitude ``n``, computed on reps."""
    stratum = close_stratum(n)
    return {cid: eval_morphism(spec, cid.rep) for cid in stratum.classes()}
