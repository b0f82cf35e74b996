"""Sparse exact diagonalization over Z, Q and F_p.

:func:`diagonalize` reduces a sparse matrix A by unimodular row and column
operations to a monomial matrix D = U A V (at most one nonzero per row and
column).  Over Z pivots are chosen by minimal absolute value, so entries stay
small on boundary matrices; the invariant factors follow from the pivot values
by gcd/lcm normalization.  Row operations can be replayed on extra "carried"
column vectors, which is how membership in the column space is decided, and
column operations are recorded so kernel bases come for free.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .arith import is_prime


@dataclass(frozen=True)
class RingSpec:
    """Coefficient ring: ``Z``, ``Q`` or the prime field ``F<p>``."""

    tag: str
    p: int = 0

    def __post_init__(self):
        if self.tag not in ("Z", "Q", "F"):
            raise ValueError(f"unknown ring tag {self.tag!r}")
        if self.tag == "F" and not is_prime(self.p):
            raise ValueError(f"F_p needs p prime, got {self.p}")

    @classmethod
    def parse(cls, text: str) -> RingSpec:
        t = text.strip().upper().replace("_", "")
        if t in ("Z", "INTEGERS", "ZZ"):
            return INTEGERS
        if t in ("Q", "RATIONALS", "QQ"):
            return RATIONALS
        for prefix in ("GF(", "F(", "GF", "F"):
            if t.startswith(prefix):
                digits = t[len(prefix):].rstrip(")")
                if digits.isdigit():
                    return cls("F", int(digits))
        raise ValueError(f"cannot parse ring {text!r}")

    @property
    def is_field(self) -> bool:
        return self.tag != "Z"

    def __str__(self):
        return f"F{self.p}" if self.tag == "F" else self.tag

    # element arithmetic
    def coerce(self, x):
        if self.tag == "Q":
            return Fraction(x)
        if self.tag == "F":
            return int(x) % self.p
        return int(x)

    def reduce(self, x):
        return x % self.p if self.tag == "F" else x

    def quotient(self, a, b):
        """q with a - q*b "small": exact for fields, Euclidean for Z."""
        if self.tag == "Q":
            return a / b
        if self.tag == "F":
            return a * pow(b, -1, self.p) % self.p
        q, r = divmod(a, b)
        # nearest-integer quotient keeps |remainder| <= |b|/2
        if 2 * abs(r) > abs(b):
            q += 1
        return q

    def divides(self, b, a) -> bool:
        if self.is_field:
            return b != 0 or a == 0
        return a == 0 if b == 0 else a % b == 0

    def size(self, x) -> int:
        return abs(x) if self.tag == "Z" else (0 if x == 0 else 1)


INTEGERS = RingSpec("Z")
RATIONALS = RingSpec("Q")


def prime_field(p: int) -> RingSpec:
    return RingSpec("F", p)


@dataclass
class SparseMatrix:
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)  # (row, col) -> nonzero value

    def __post_init__(self):
        for (r, c), v in list(self.entries.items()):
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry {(r, c)} outside {self.rows}x{self.cols}")
            if v == 0:
                del self.entries[(r, c)]

    def to_dense(self) -> list[list]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def matmul(self, other: SparseMatrix, ring: RingSpec = INTEGERS) -> SparseMatrix:
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        by_row: dict = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                out[(r, c)] = ring.reduce(out.get((r, c), 0) + v * w)
        return SparseMatrix(self.rows, other.cols, {k: v for k, v in out.items() if v})

    def is_zero(self) -> bool:
        return not self.entries


@dataclass
class Diagonalization:
    ring: RingSpec
    rows: int
    cols: int
    pivots: list  # (row, col, value)
    kernel: list | None  # kernel basis, each a {col: value} dict in original coordinates
    carried: dict  # row -> {carry index: value}, i.e. U applied to carried vectors

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def invariant_factors(self) -> list[int]:
        """Nonunit invariant factors d_1 | d_2 | ... (over Z)."""
        if self.ring.is_field:
            return []
        return invariant_factors([abs(v) for _, _, v in self.pivots])

    def carried_in_image(self, j: int) -> bool:
        """Is carried vector j in the (integral) column space of A?"""
        pivot_row = {r: v for r, _, v in self.pivots}
        for r, vals in self.carried.items():
            x = vals.get(j, 0)
            if not x:
                continue
            d = pivot_row.get(r)
            if d is None or not self.ring.divides(d, x):
                return False
        return True


def invariant_factors(values: Iterable[int]) -> list[int]:
    ds = sorted(v for v in values if v not in (0, 1))
    # pairwise (gcd, lcm) replacement turns any diagonal into a divisor chain
    for i in range(len(ds)):
        for j in range(i + 1, len(ds)):
            a, b = ds[i], ds[j]
            g = gcd(a, b)
            ds[i], ds[j] = g, a // g * b
    return [d for d in ds if d != 1]


def diagonalize(entries: Mapping[tuple[int, int], object], rows: int, cols: int, ring: RingSpec,
                carry: list[Mapping[int, object]] | None = None, track_kernel: bool = False
                ) -> Diagonalization:
    """Reduce A (given as {(row, col): value}) to monomial form.

    ``carry`` vectors (indexed by row) receive every row operation.  With
    ``track_kernel`` the column operations are accumulated and a basis of the
    kernel (a Z-basis over Z) is returned.
    """
    R: dict[int, dict[int, object]] = {}
    C: dict[int, set[int]] = {}
    for (r, c), v in entries.items():
        v = ring.coerce(v)
        if v:
            R.setdefault(r, {})[c] = v
            C.setdefault(c, set()).add(r)

    aug: dict[int, dict[int, object]] = {}
    for j, vec in enumerate(carry or ()):
        for r, v in vec.items():
            v = ring.coerce(v)
            if v:
                aug.setdefault(r, {})[j] = v

    V: dict[int, dict[int, object]] | None = None
    if track_kernel:
        V = {c: {c: ring.coerce(1)} for c in range(cols)}

    dirty: set[int] = set()

    def add_row(dst: int, src: int, q):
        # row_dst -= q * row_src
        dirty.add(dst)
        row_d = R.setdefault(dst, {})
        for c, v in R[src].items():
            x = ring.reduce(row_d.get(c, 0) - q * v)
            if x:
                if c not in row_d:
                    C[c].add(dst)
                row_d[c] = x
            else:
                if c in row_d:
                    del row_d[c]
                    C[c].discard(dst)
        if not row_d:
            del R[dst]
        if src in aug:
            a_d = aug.setdefault(dst, {})
            for j, v in aug[src].items():
                x = ring.reduce(a_d.get(j, 0) - q * v)
                if x:
                    a_d[j] = x
                else:
                    a_d.pop(j, None)
            if not a_d:
                del aug[dst]

    def add_col(dst: int, src: int, q):
        # col_dst -= q * col_src
        for r in list(C.get(src, ())):
            dirty.add(r)
            row = R[r]
            x = ring.reduce(row.get(dst, 0) - q * row[src])
            if x:
                if dst not in row:
                    C.setdefault(dst, set()).add(r)
                row[dst] = x
            else:
                if dst in row:
                    del row[dst]
                    C[dst].discard(r)
        if V is not None:
            vd = V[dst]
            for k, v in V[src].items():
                x = ring.reduce(vd.get(k, 0) - q * v)
                if x:
                    vd[k] = x
                else:
                    vd.pop(k, None)

    heap = [(len(row), r) for r, row in R.items()]
    heapq.heapify(heap)
    pivots = []

    while R:
        # Markowitz-style choice: shortest live row, then smallest entry in it
        r = None
        while heap:
            length, cand = heapq.heappop(heap)
            if cand in R and length == len(R[cand]):
                r = cand
                break
        if r is None:
            r = min(R, key=lambda rr: (len(R[rr]), rr))
        row = R[r]
        c = min(row, key=lambda cc: (ring.size(row[cc]), len(C[cc]), cc))

        while True:
            pv = R[r][c]
            for r2 in sorted(C[c] - {r}):
                q = ring.quotient(R[r2][c], pv)
                if q:
                    add_row(r2, r, q)
            for c2 in sorted(set(R[r]) - {c}):
                q = ring.quotient(R[r][c2], pv)
                if q:
                    add_col(c2, c, q)
            if len(R[r]) == 1 and C[c] == {r}:
                break
            # Euclidean remainders left: continue from the smallest one
            cands = [(ring.size(R[r][cc]), r, cc) for cc in R[r]]
            cands += [(ring.size(R[rr][c]), rr, c) for rr in C[c]]
            _, r, c = min(cands)

        pivots.append((r, c, R[r][c]))
        del R[r]
        del C[c]
        for r2 in dirty:
            if r2 in R:
                heapq.heappush(heap, (len(R[r2]), r2))
        dirty.clear()
        if len(heap) > 4 * len(R) + 64:
            heap = [(len(rw), rr) for rr, rw in R.items()]
            heapq.heapify(heap)

    kernel = None
    if V is not None:
        pivot_cols = {c for _, c, _ in pivots}
        kernel = [V[c] for c in range(cols) if c not in pivot_cols]
    return Diagonalization(ring, rows, cols, pivots, kernel, aug)


def rank(entries: Mapping[tuple[int, int], object], rows: int, cols: int, ring: RingSpec) -> int:
    return diagonalize(entries, rows, cols, ring).rank
