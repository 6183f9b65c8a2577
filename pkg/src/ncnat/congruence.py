"""The congruence generated by the medial identity, one stratum at a time.

Every rewrite ``((w x) (y z)) -> ((w y) (x z))`` preserves magnitude, and
compatibility with ``+`` amounts to allowing the rewrite at any subtree
position.  The congruence therefore never crosses strata, and on the stratum
of magnitude ``n`` it is exactly the connected components of the graph whose
edges are single rewrites ``t -- apply_rewrite(t, s)`` for every term ``t``
and every site ``s``.  :func:`close_stratum` builds that graph and merges it
with a union-find.

Edges are generated with index arithmetic instead of tree surgery.  A site
of ``node(l, r)`` is either the root, or a site of ``l``, or a site of ``r``,
so the edge list of magnitude ``n`` is

* every edge ``a -- b`` of magnitude ``k`` lifted to ``node(a, r) -- node(b, r)``
  for all ``r`` of magnitude ``n - k``, likewise on the right, plus
* one root rewrite for every term whose children are both internal.

Cache file layout (all little-endian)::

    offset  size  field
    0       4     magic b"NCNS"
    4       4     uint32 format version (1)
    8       4     uint32 n
    12      8     uint64 C(n), number of terms
    20      8     uint64 D(n), number of classes
    28      4*C   uint32 class index of each term, 0-based, enumeration order

Class indices are assigned in order of first appearance along the
enumeration, so class ``i`` (0-based) has the ``i``-th smallest
representative.
"""

from __future__ import annotations

import logging
import os
import struct
import tempfile
import threading
from array import array
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import check_budget, get_config
from .terms import Term, catalan, enumerate_stratum, stratum_table, term_at

__all__ = [
    "ClassId",
    "Stratum",
    "UnionFind",
    "close_stratum",
    "class_count",
    "are_equal",
    "class_of",
    "list_classes",
    "rewrite_edges",
    "clear_memory_cache",
]

log = logging.getLogger(__name__)

CACHE_MAGIC = b"NCNS"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIIQQ")


@dataclass(frozen=True, order=True)
class ClassId:
    """An element of the quotient: a congruence class of known magnitude.

    ``index`` is the 1-based rank of the class among the classes of its
    stratum; ``rep`` is its least member in canonical order.
    """

    n: int
    index: int
    rep: Term = field(compare=False)

    def __str__(self):
        return f"{self.n}#{self.index}"


class UnionFind:
    """Union by size with full path compression.

    On equal sizes the smaller index becomes the root, so the final forest
    does not depend on anything but the order of :meth:`union` calls.
    """

    def __init__(self, size: int):
        self.parent = array("i", range(size))
        self.size = array("i", [1]) * size

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        size = self.size
        if size[ra] < size[rb] or (size[ra] == size[rb] and rb < ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        size[ra] += size[rb]
        return True

    def union_all(self, left, right, chunk: int = 1 << 18) -> None:
        """Union every pair ``(left[i], right[i])``; accepts numpy arrays."""
        for start in range(0, len(left), chunk):
            self._union_pairs(
                left[start : start + chunk].tolist(), right[start : start + chunk].tolist()
            )

    def _union_pairs(self, left: list, right: list) -> None:
        # Inlined find/union; this loop dominates closure time.
        parent, size = self.parent, self.size
        for a, b in zip(left, right):
            ra = a
            while parent[ra] != ra:
                ra = parent[ra]
            while parent[a] != ra:
                parent[a], a = ra, parent[a]
            rb = b
            while parent[rb] != rb:
                rb = parent[rb]
            while parent[b] != rb:
                parent[b], b = rb, parent[b]
            if ra == rb:
                continue
            if size[ra] < size[rb] or (size[ra] == size[rb] and rb < ra):
                ra, rb = rb, ra
            parent[rb] = ra
            size[ra] += size[rb]

    def labels(self) -> np.ndarray:
        """Class index per element, numbered by first appearance."""
        parent = np.frombuffer(self.parent, dtype=np.int32).copy()
        while True:
            grand = parent[parent]
            if np.array_equal(grand, parent):
                break
            parent = grand
        _, first, inverse = np.unique(parent, return_index=True, return_inverse=True)
        # np.unique sorts by root value; renumber by first occurrence instead.
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        return rank[inverse.ravel()].astype(np.int32)


class Stratum:
    """The frozen partition of the terms of magnitude ``n`` into classes."""

    def __init__(self, n: int, class_index: np.ndarray):
        self.n = n
        self.class_index = np.asarray(class_index, dtype=np.int32)
        self.class_index.setflags(write=False)
        self.num_terms = len(self.class_index)
        _, rep_index, sizes = np.unique(
            self.class_index, return_index=True, return_counts=True
        )
        self.rep_index = rep_index
        self.class_sizes = sizes
        self.num_classes = len(rep_index)
        self._table = stratum_table(n)
        self._reps: dict[int, ClassId] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"Stratum(n={self.n}, terms={self.num_terms}, classes={self.num_classes})"

    @property
    def terms(self) -> list[Term]:
        return enumerate_stratum(self.n)

    def index_of(self, t: Term) -> int:
        if t.magnitude != self.n:
            raise ValueError(f"term of magnitude {t.magnitude} is not in stratum {self.n}")
        return self._table.index_of_code(t.code)

    def class_number(self, t: Term) -> int:
        """0-based class index of ``t``."""
        return int(self.class_index[self.index_of(t)])

    def class_id(self, number: int) -> ClassId:
        """ClassId for a 0-based class number."""
        cid = self._reps.get(number)
        if cid is None:
            rep = term_at(self.n, int(self.rep_index[number]))
            cid = ClassId(self.n, number + 1, rep)
            with self._lock:
                self._reps[number] = cid
        return cid

    def members(self, number: int) -> list[Term]:
        idx = np.flatnonzero(self.class_index == number)
        return [term_at(self.n, int(i)) for i in idx]

    def classes(self) -> list[ClassId]:
        return [self.class_id(i) for i in range(self.num_classes)]


# -- rewrite graph -----------------------------------------------------------

_edge_lock = threading.RLock()
_edges: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def rewrite_edges(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-rewrite edges ``(a, b)`` with ``a < b`` between term indices.

    Self-loops (sites where ``x`` and ``y`` coincide) are dropped; every
    other (term, site) pair contributes its edge, seen from both ends.
    """
    with _edge_lock:
        cached = _edges.get(n)
        if cached is None:
            cached = _build_edges(n)
            _edges[n] = cached
        return cached


def _build_edges(n: int) -> tuple[np.ndarray, np.ndarray]:
    empty = np.zeros(0, dtype=np.int32)
    if n < 4:
        return empty, empty
    table = stratum_table(n)
    src, dst = [], []
    for k in range(1, n):
        m = n - k
        pos = table.pos[k]
        ea, eb = rewrite_edges(k)
        if len(ea):
            src.append(pos[ea, :].ravel())
            dst.append(pos[eb, :].ravel())
        ea, eb = rewrite_edges(m)
        if len(ea):
            src.append(pos[:, ea].ravel())
            dst.append(pos[:, eb].ravel())
        if k >= 2 and m >= 2:
            a, b = _root_edges(n, k, m)
            src.append(a)
            dst.append(b)
    a = np.concatenate(src) if src else empty
    b = np.concatenate(dst) if dst else empty
    del src, dst
    lo = np.minimum(a, b).astype(np.int64)
    hi = np.maximum(a, b)
    del a, b
    keep = lo != hi
    key = np.unique(lo[keep] * catalan(n) + hi[keep])
    del lo, hi, keep
    return (key // catalan(n)).astype(np.int32), (key % catalan(n)).astype(np.int32)


def _root_edges(n: int, k: int, m: int):
    """Root rewrites of every ``node(L, R)`` with ``|L| = k``, ``|R| = m``."""
    top = stratum_table(n)
    lt, rt = stratum_table(k), stratum_table(m)
    src, dst = [], []
    for kw in range(1, k):
        lsel = np.flatnonzero(lt.left_mag == kw)
        kx = k - kw
        w, x = lt.left_idx[lsel][:, None], lt.right_idx[lsel][:, None]
        for ky in range(1, m):
            rsel = np.flatnonzero(rt.left_mag == ky)
            kz = m - ky
            y, z = rt.left_idx[rsel][None, :], rt.right_idx[rsel][None, :]
            new_left = stratum_table(kw + ky).pos[kw][w, y]
            new_right = stratum_table(kx + kz).pos[kx][x, z]
            src.append(top.pos[k][lsel[:, None], rsel[None, :]].ravel())
            dst.append(top.pos[kw + ky][new_left, new_right].ravel())
    return np.concatenate(src), np.concatenate(dst)


def _close(n: int) -> np.ndarray:
    a, b = rewrite_edges(n)
    uf = UnionFind(catalan(n))
    uf.union_all(a, b)
    return uf.labels()


# -- caching -----------------------------------------------------------------

_strata_lock = threading.Lock()
_strata: dict[int, Stratum] = {}


def clear_memory_cache() -> None:
    """Forget strata and edge lists closed in this process."""
    with _strata_lock, _edge_lock:
        _strata.clear()
        _edges.clear()


def _cache_path(cache_dir: Path, n: int) -> Path:
    return cache_dir / f"stratum-v{CACHE_VERSION}-n{n}.bin"


def read_cache_file(path: Path, n: int) -> np.ndarray | None:
    try:
        data = path.read_bytes()
    except OSError:
        return None
    if len(data) < _HEADER.size:
        return None
    magic, version, file_n, terms, classes = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC or version != CACHE_VERSION or file_n != n:
        return None
    if terms != catalan(n) or len(data) != _HEADER.size + 4 * terms:
        return None
    labels = np.frombuffer(data, dtype="<u4", offset=_HEADER.size).astype(np.int32)
    if labels.size and int(labels.max()) + 1 != classes:
        return None
    return labels


def write_cache_file(path: Path, n: int, labels: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    classes = int(labels.max()) + 1 if labels.size else 0
    header = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, n, len(labels), classes)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(np.asarray(labels, dtype="<u4").tobytes())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def close_stratum(n: int) -> Stratum:
    """Close the stratum of magnitude ``n`` under all rewrites.

    Results are memoized in-process and, if enabled in the config, on disk.
    """
    check_budget(n)
    with _strata_lock:
        stratum = _strata.get(n)
    if stratum is not None:
        return stratum
    cfg = get_config()
    labels = None
    path = None
    if cfg.use_disk_cache and cfg.cache_dir is not None and n >= 9:
        path = _cache_path(cfg.cache_dir, n)
        labels = read_cache_file(path, n)
    if labels is None:
        log.debug("closing stratum %d (%d terms)", n, catalan(n))
        labels = _close(n)
        if path is not None:
            try:
                write_cache_file(path, n, labels)
            except OSError as exc:
                log.warning("could not write stratum cache %s: %s", path, exc)
    stratum = Stratum(n, labels)
    with _strata_lock:
        return _strata.setdefault(n, stratum)


def class_count(n: int) -> int:
    """Number of classes of magnitude ``n``."""
    return close_stratum(n).num_classes


def are_equal(t1: Term, t2: Term) -> bool:
    """Decide ``t1 ~ t2``."""
    if t1.magnitude != t2.magnitude:
        return False
    if t1 == t2:
        check_budget(t1.magnitude)
        return True
    stratum = close_stratum(t1.magnitude)
    return stratum.class_number(t1) == stratum.class_number(t2)


def class_of(t: Term) -> ClassId:
    stratum = close_stratum(t.magnitude)
    return stratum.class_id(stratum.class_number(t))


def list_classes(n: int) -> list[tuple[ClassId, int]]:
    """Every class of magnitude ``n`` with its size, by representative."""
    stratum = close_stratum(n)
    return [
        (stratum.class_id(i), int(stratum.class_sizes[i]))
        for i in range(stratum.num_classes)
    ]
