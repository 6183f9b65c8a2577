"""Terms of the free magma on one generator.

A term is a full binary tree whose leaves are the generator ``1``.  The
text form is S-expression style::

    1                  the generator
    (1 1)              1 + 1, written 2
    (1 (1 1))          1 + (1 + 1)
    ((1 1) 1)          (1 + 1) + 1

Each term also has a *code*: the preorder walk emitting ``1`` for every
internal node and ``0`` for every leaf.  A term of magnitude ``n`` has a
code of exactly ``2n - 1`` bits, e.g. ``(1 (1 1))`` -> ``10100``.  The code
read as a binary integer is stored on the term and defines the canonical
order ``(magnitude, code)`` used everywhere for enumeration and class
representatives.
"""

from __future__ import annotations

import functools
import threading
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .config import check_budget
from .errors import ParseError, SiteError

__all__ = [
    "Term",
    "LEAF",
    "node",
    "parse",
    "format_term",
    "magnitude",
    "encode",
    "decode",
    "catalan",
    "enumerate_stratum",
    "RewriteSite",
    "rewrite_sites",
    "apply_rewrite",
    "subterm",
]


class Term:
    """Immutable full binary tree.

    Leaves have ``left is right is None``.  Equality, hashing and ordering go
    through ``(magnitude, code)``, so they cost O(1) regardless of size.
    """

    __slots__ = ("left", "right", "magnitude", "code")

    def __init__(self, left: Term | None = None, right: Term | None = None):
        if (left is None) != (right is None):
            raise ValueError("a node needs exactly two children")
        setter = object.__setattr__
        setter(self, "left", left)
        setter(self, "right", right)
        if left is None:
            setter(self, "magnitude", 1)
            setter(self, "code", 0)
        else:
            n = left.magnitude + right.magnitude
            setter(self, "magnitude", n)
            setter(
                self,
                "code",
                (1 << (2 * n - 2))
                | (left.code << (2 * right.magnitude - 1))
                | right.code,
            )

    def __setattr__(self, name, value):
        raise AttributeError("Term is immutable")

    def __reduce__(self):
        return (decode, (encode(self),))

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def sort_key(self) -> tuple[int, int]:
        return (self.magnitude, self.code)

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return self.magnitude == other.magnitude and self.code == other.code

    def __hash__(self):
        return hash((self.magnitude, self.code))

    def __lt__(self, other: Term) -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: Term) -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: Term) -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: Term) -> bool:
        return self.sort_key() >= other.sort_key()

    def __str__(self):
        return format_term(self)

    def __repr__(self):
        return f"Term({format_term(self)!r})"


LEAF = Term()


def node(left: Term, right: Term) -> Term:
    return Term(left, right)


def magnitude(t: Term) -> int:
    """Number of leaves (1's) in ``t``."""
    return t.magnitude


# -- text form ---------------------------------------------------------------


def parse(text: str) -> Term:
    """Parse the S-expression text form.

    Whitespace between tokens is optional and may be arbitrary.  Raises
    :class:`ParseError` carrying the byte offset of the first bad token.
    """
    data = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    stack: list[list] = []
    result: Term | None = None
    i, size = 0, len(data)
    while i < size:
        ch = data[i]
        if ch in b" \t\r\n":
            i += 1
            continue
        if result is not None:
            raise ParseError("unexpected trailing input", i, text)
        if ch == ord("("):
            stack.append([])
        elif ch == ord("1"):
            _push(stack, LEAF, i, text)
            if not stack:
                result = LEAF
        elif ch == ord(")"):
            if not stack:
                raise ParseError("unbalanced ')'", i, text)
            children = stack.pop()
            if len(children) != 2:
                raise ParseError(
                    f"a node needs exactly two children, got {len(children)}", i, text
                )
            t = Term(children[0], children[1])
            if stack:
                _push(stack, t, i, text)
            else:
                result = t
        else:
            raise ParseError(f"unexpected character {chr(ch)!r}", i, text)
        i += 1
    if stack:
        raise ParseError("unexpected end of input, missing ')'", size, text)
    if result is None:
        raise ParseError("empty term", size, text)
    return result


def _push(stack, t, offset, text):
    if stack:
        if len(stack[-1]) == 2:
            raise ParseError("a node needs exactly two children, got 3", offset, text)
        stack[-1].append(t)


def format_term(t: Term) -> str:
    """Canonical text: one space between siblings, nothing else."""
    out: list[str] = []
    todo: list = [t]
    while todo:
        item = todo.pop()
        if isinstance(item, str):
            out.append(item)
        elif item.left is None:
            out.append("1")
        else:
            out.append("(")
            todo.extend((")", item.right, " ", item.left))
    return "".join(out)


# -- codes -------------------------------------------------------------------


def encode(t: Term) -> str:
    """Preorder bit string: ``1`` per internal node, ``0`` per leaf."""
    return format(t.code, f"0{2 * t.magnitude - 1}b")


def decode(bits: str) -> Term:
    """Inverse of :func:`encode`; rejects anything that is not one full tree."""
    pos = 0
    stack: list[list] = []
    result = None
    for pos, ch in enumerate(bits):
        if result is not None:
            raise ParseError("code continues after a complete tree", pos, bits)
        if ch == "1":
            stack.append([])
            continue
        if ch != "0":
            raise ParseError(f"code bit must be 0 or 1, got {ch!r}", pos, bits)
        t = LEAF
        while stack:
            stack[-1].append(t)
            if len(stack[-1]) < 2:
                break
            left, right = stack.pop()
            t = Term(left, right)
        else:
            result = t
    if result is None:
        raise ParseError("incomplete code", len(bits), bits)
    return result


# -- enumeration -------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def catalan(n: int) -> int:
    """Number of full binary trees with ``n`` leaves (C(1)=C(2)=1, C(4)=5)."""
    if n < 1:
        raise ValueError("magnitude must be positive")
    if n == 1:
        return 1
    return sum(catalan(k) * catalan(n - k) for k in range(1, n))


# Codes are packed into int64; 2n - 1 <= 63.
_MAX_TABLE_MAGNITUDE = 32


class StratumTable:
    """Index tables for the terms of one magnitude, in canonical order.

    For term ``i`` of the stratum: ``codes[i]`` is its code and it equals
    ``node(T[left_mag[i]][left_idx[i]], T[n - left_mag[i]][right_idx[i]])``.
    ``pos[k][a, b]`` is the index of ``node(T[k][a], T[n - k][b])``.
    """

    def __init__(self, n: int, codes, left_mag, left_idx, right_idx, pos):
        self.n = n
        self.codes = codes
        self.left_mag = left_mag
        self.left_idx = left_idx
        self.right_idx = right_idx
        self.pos = pos

    def __len__(self):
        return len(self.codes)

    def index_of_code(self, code: int) -> int:
        i = int(np.searchsorted(self.codes, code))
        if i >= len(self.codes) or int(self.codes[i]) != code:
            raise KeyError(code)
        return i


_table_lock = threading.RLock()
_tables: dict[int, StratumTable] = {}
_term_lists: dict[int, tuple[Term, ...]] = {}


def stratum_table(n: int) -> StratumTable:
    """Build (or fetch) the index tables of magnitude ``n``; no budget check."""
    with _table_lock:
        table = _tables.get(n)
        if table is None:
            table = _build_table(n)
            _tables[n] = table
        return table


def _build_table(n: int) -> StratumTable:
    if n > _MAX_TABLE_MAGNITUDE:
        raise ValueError(f"magnitude {n} is beyond the packed-code limit")
    if catalan(n) >= 1 << 31:
        raise ValueError(f"magnitude {n} has too many terms for int32 indices")
    if n == 1:
        zero = np.zeros(1, dtype=np.int32)
        return StratumTable(
            1, np.zeros(1, dtype=np.int64), zero.astype(np.int8), zero, zero.copy(), {}
        )
    blocks, shapes = [], []
    top = np.int64(1) << np.int64(2 * n - 2)
    for k in range(1, n):
        left = stratum_table(k).codes
        right = stratum_table(n - k).codes
        shift = np.int64(2 * (n - k) - 1)
        blocks.append((top | (left[:, None] << shift) | right[None, :]).ravel())
        shapes.append((k, (len(left), len(right))))
    codes = np.concatenate(blocks)
    del blocks
    order = np.argsort(codes, kind="stable")
    codes = codes[order]
    rank = np.empty(len(order), dtype=np.int32)
    rank[order] = np.arange(len(order), dtype=np.int32)
    del order
    left_mag = np.empty(len(codes), dtype=np.int8)
    left_idx = np.empty(len(codes), dtype=np.int32)
    right_idx = np.empty(len(codes), dtype=np.int32)
    pos = {}
    offset = 0
    for k, (rows, cols) in shapes:
        block = rank[offset : offset + rows * cols]
        pos[k] = block.reshape(rows, cols)
        left_mag[block] = k
        left_idx[block] = np.repeat(np.arange(rows, dtype=np.int32), cols)
        right_idx[block] = np.tile(np.arange(cols, dtype=np.int32), rows)
        offset += rows * cols
    return StratumTable(n, codes, left_mag, left_idx, right_idx, pos)


def _term_list(n: int) -> tuple[Term, ...]:
    with _table_lock:
        terms = _term_lists.get(n)
        if terms is None:
            if n == 1:
                terms = (LEAF,)
            else:
                table = stratum_table(n)
                subs = {k: _term_list(k) for k in range(1, n)}
                terms = tuple(
                    Term(subs[k][a], subs[n - k][b])
                    for k, a, b in zip(
                        table.left_mag.tolist(),
                        table.left_idx.tolist(),
                        table.right_idx.tolist(),
                    )
                )
            _term_lists[n] = terms
        return terms


def enumerate_stratum(n: int) -> list[Term]:
    """All terms of magnitude ``n``, once each, ascending by code.

    Raises :class:`~ncnat.errors.StratumBudgetError` above ``n_max``.
    """
    check_budget(n)
    return list(_term_list(n))


def term_at(n: int, index: int) -> Term:
    """The ``index``-th term of magnitude ``n`` without materializing the stratum."""
    if n == 1:
        return LEAF
    table = stratum_table(n)
    k = int(table.left_mag[index])
    return Term(
        term_at(k, int(table.left_idx[index])),
        term_at(n - k, int(table.right_idx[index])),
    )


# -- rewrites ----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class RewriteSite:
    """Path of ``L``/``R`` steps from the root; ``""`` is the root itself."""

    path: str = ""

    def __post_init__(self):
        if set(self.path) - {"L", "R"}:
            raise SiteError(f"site path may only contain L and R: {self.path!r}")

    def __str__(self):
        return self.path or "root"

    @classmethod
    def parse(cls, text: str) -> RewriteSite:
        text = text.strip()
        return cls("" if text in ("", "root", ".") else text.upper())


def subterm(t: Term, site: RewriteSite | str) -> Term:
    path = site.path if isinstance(site, RewriteSite) else site
    for step in path:
        if t.left is None:
            raise SiteError(f"path {path!r} runs past a leaf")
        t = t.left if step == "L" else t.right
    return t


def _is_medial_shape(t: Term) -> bool:
    return t.left is not None and t.left.left is not None and t.right.left is not None


def _sites(t: Term, prefix: str) -> Iterator[RewriteSite]:
    if t.left is None:
        return
    if _is_medial_shape(t):
        yield RewriteSite(prefix)
    yield from _sites(t.left, prefix + "L")
    yield from _sites(t.right, prefix + "R")


def rewrite_sites(t: Term) -> list[RewriteSite]:
    """Paths to every subtree of shape ``((w x) (y z))``, in preorder."""
    return list(_sites(t, ""))


def apply_rewrite(t: Term, site: RewriteSite | str) -> Term:
    """Replace ``((w x) (y z))`` at ``site`` by ``((w y) (x z))``.

    Applying the same site twice gives back ``t``.
    """
    path = site.path if isinstance(site, RewriteSite) else site
    return _rewrite_at(t, path, 0)


def _rewrite_at(t: Term, path: str, depth: int) -> Term:
    if depth == len(path):
        if not _is_medial_shape(t):
            raise SiteError(f"no ((w x) (y z)) subtree at site {path or 'root'!r}")
        (w, x), (y, z) = (t.left.left, t.left.right), (t.right.left, t.right.right)
        return Term(Term(w, y), Term(x, z))
    if t.left is None:
        raise SiteError(f"site {path!r} runs past a leaf")
    if path[depth] == "L":
        return Term(_rewrite_at(t.left, path, depth + 1), t.right)
    return Term(t.left, _rewrite_at(t.right, path, depth + 1))
