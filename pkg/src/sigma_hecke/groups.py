"""Concrete groups with solvable word problem.

Three families share one small interface (identity / multiply / inverse /
generators / character basis values / token):

* ``BS(m,n)`` = <a, t | t a^m t^-1 = a^n>, elements in Britton normal form;
* ``Z``, the infinite cyclic group on one generator;
* ``TRI(n;P)`` = upper triangular matrices in SL_n(Z[1/P]).

BS normal form is the tuple ``(r0, e1, r1, ..., ek, rk)`` for the word
a^r0 t^e1 a^r1 ... t^ek a^rk.  Powers of a are pushed to the right: a segment
followed by t is reduced into [0, |n|), one followed by t^-1 into [0, |m|),
and the trailing power rk is free.  Stripping rk gives a canonical
representative of the left coset g<a>.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .arith import PrimeSet, as_rational, in_localization, is_unit, rational_to_str, vp
from .errors import ConjugationMismatch, InvariantViolation, ParseError
from .simplicial import UnionFind


class Group:
    """Common surface of the concrete families."""

    family: str = ""

    def identity(self):
        raise NotImplementedError

    def multiply(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def generators(self) -> tuple[tuple[str, Any], ...]:
        """Symmetric generating set as (name, element) pairs."""
        raise NotImplementedError

    def basis_labels(self) -> tuple[str, ...]:
        raise NotImplementedError

    def basis_values(self, g) -> tuple:
        raise NotImplementedError

    def token(self, g) -> str:
        raise NotImplementedError

    def parse_element(self, text: str):
        raise NotImplementedError

    def to_json(self, g):
        return self.token(g)

    def product(self, *gs):
        out = self.identity()
        for g in gs:
            out = self.multiply(out, g)
        return out

    def generator(self, name: str):
        for nm, g in self.generators():
            if nm == name:
                return g
        raise KeyError(name)


# -- Baumslag-Solitar ---------------------------------------------------------------

_BS_TOKEN = re.compile(r"([atAT])(?:\^?\(?(-?\d+)\)?)?")


@dataclass(frozen=True)
class BaumslagSolitar(Group):
    m: int
    n: int
    family = "BS"

    def __post_init__(self):
        if self.m == 0 or self.n == 0:
            raise ValueError("BS(m,n) needs m, n nonzero")

    def __str__(self):
        return f"BS({self.m},{self.n})"

    # word operations on a mutable normal-form list; all but the last
    # a-segment are reduced, the last one is free
    def _push_t(self, w: list, e: int) -> None:
        r = w[-1]
        if len(w) >= 3 and w[-2] == -e:
            if e == -1 and r % self.m == 0:
                w.pop()
                w.pop()
                w[-1] += (r // self.m) * self.n
                return
            if e == 1 and r % self.n == 0:
                w.pop()
                w.pop()
                w[-1] += (r // self.n) * self.m
                return
        d = self.n if e == 1 else self.m
        rr = r % abs(d)
        q = (r - rr) // d
        w[-1] = rr
        w.append(e)
        w.append(q * (self.m if e == 1 else self.n))

    def _append(self, w: list, h: Sequence[int]) -> None:
        w[-1] += h[0]
        for i in range(1, len(h), 2):
            e = h[i]
            step = 1 if e > 0 else -1
            for _ in range(abs(e)):
                self._push_t(w, step)
            w[-1] += h[i + 1]

    def identity(self):
        return (0,)

    def a_power(self, k: int):
        return (k,)

    def multiply(self, g, h):
        w = list(g)
        self._append(w, h)
        return tuple(w)

    def inverse(self, g):
        w = [-g[-1]]
        for i in range(len(g) - 2, 0, -2):
            self._push_t(w, -g[i])
            w[-1] -= g[i - 1]
        return tuple(w)

    def from_letters(self, letters: Iterable[tuple[str, int]]):
        """Normalize a word given as (letter, exponent) pairs."""
        w = [0]
        for letter, k in letters:
            if letter == "a":
                w[-1] += k
            elif letter == "t":
                step = 1 if k > 0 else -1
                for _ in range(abs(k)):
                    self._push_t(w, step)
            else:
                raise ParseError(f"unknown letter {letter!r}")
        return tuple(w)

    def generators(self):
        return (("a", (1,)), ("A", (-1,)), ("t", (0, 1, 0)), ("T", (0, -1, 0)))

    def basis_labels(self):
        return ("tau",)

    def t_exponent_sum(self, g) -> int:
        return sum(g[1::2])

    def basis_values(self, g):
        return (Fraction(self.t_exponent_sum(g)),)

    def is_normal(self, g) -> bool:
        if len(g) % 2 == 0 or any(e not in (1, -1) for e in g[1::2]):
            return False
        for i in range(1, len(g), 2):
            r = g[i - 1]
            if i >= 3 and g[i - 2] == -g[i] and r == 0:
                return False
            bound = abs(self.n) if g[i] == 1 else abs(self.m)
            if not 0 <= r < bound:
                return False
        return True

    def token(self, g) -> str:
        parts = []
        for i, x in enumerate(g):
            if i % 2 == 0:
                if x:
                    parts.append("a" if x == 1 else f"a^{x}")
            else:
                parts.append("t" if x == 1 else f"t^{x}")
        return " ".join(parts) or "e"

    def parse_element(self, text: str):
        s = re.sub(r"[\s*·]", "", text)
        if s in ("", "e", "1"):
            return self.identity()
        letters = []
        pos = 0
        while pos < len(s):
            mt = _BS_TOKEN.match(s, pos)
            if not mt:
                raise ParseError(f"cannot parse BS word {text!r} at {s[pos:]!r}")
            letter, exp = mt.group(1), int(mt.group(2)) if mt.group(2) else 1
            if letter.isupper():
                letter, exp = letter.lower(), -exp
            letters.append((letter, exp))
            pos = mt.end()
        return self.from_letters(letters)


# -- infinite cyclic ------------------------------------------------------------------

@dataclass(frozen=True)
class IntegerLine(Group):
    family = "Z"

    def __str__(self):
        return "Z"

    def identity(self):
        return 0

    def multiply(self, g, h):
        return g + h

    def inverse(self, g):
        return -g

    def generators(self):
        return (("a", 1), ("A", -1))

    def basis_labels(self):
        return ("id",)

    def basis_values(self, g):
        return (Fraction(g),)

    def token(self, g) -> str:
        return str(g)

    def parse_element(self, text: str):
        s = text.strip()
        mt = re.fullmatch(r"a\^?\(?(-?\d+)\)?", s)
        try:
            return int(mt.group(1)) if mt else (1 if s == "a" else int(s))
        except ValueError as exc:
            raise ParseError(f"cannot parse integer {text!r}") from exc


# -- upper triangular matrices over Z[1/P] --------------------------------------------

Matrix = tuple  # tuple of row tuples of Fractions


@dataclass(frozen=True)
class Triangular(Group):
    n: int
    primes: PrimeSet
    family = "TRI"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("TRI needs n >= 2")
        if not isinstance(self.primes, PrimeSet):
            object.__setattr__(self, "primes", PrimeSet.of(*self.primes))

    def __str__(self):
        return f"TRI({self.n};{self.primes})"

    # constructors (indices are 1-based, as in E_{i,j})
    def matrix(self, rows: Sequence[Sequence[Any]], check: bool = True) -> Matrix:
        g = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if check:
            self.validate(g)
        return g

    def identity(self):
        return tuple(tuple(Fraction(int(i == j)) for j in range(self.n)) for i in range(self.n))

    def elementary(self, i: int, j: int, alpha) -> Matrix:
        if not 1 <= i < j <= self.n:
            raise ValueError(f"need 1 <= i < j <= n, got {(i, j)}")
        rows = [list(r) for r in self.identity()]
        rows[i - 1][j - 1] = as_rational(alpha)
        return self.matrix(rows)

    def diagonal(self, entries: Sequence[Any]) -> Matrix:
        if len(entries) != self.n:
            raise ValueError("wrong number of diagonal entries")
        rows = [list(r) for r in self.identity()]
        for i, x in enumerate(entries):
            rows[i][i] = as_rational(x)
        return self.matrix(rows)

    def diag_pair(self, i: int, j: int, x) -> Matrix:
        """Diagonal matrix with x at i, 1/x at j and 1 elsewhere."""
        d = [1] * self.n
        d[i - 1] = as_rational(x)
        d[j - 1] = 1 / as_rational(x)
        return self.diagonal(d)

    def validate(self, g: Matrix) -> None:
        n, P = self.n, self.primes
        if len(g) != n or any(len(row) != n for row in g):
            raise InvariantViolation(f"expected a {n}x{n} matrix")
        prod = Fraction(1)
        for i in range(n):
            for j in range(n):
                x = g[i][j]
                if j < i and x != 0:
                    raise InvariantViolation("matrix is not upper triangular")
                if not in_localization(x, P):
                    raise InvariantViolation(f"entry {x} not in Z[1/{{{P}}}]")
            if not is_unit(g[i][i], P):
                raise InvariantViolation(f"diagonal entry {g[i][i]} is not a unit")
            prod *= g[i][i]
        if prod != 1:
            raise InvariantViolation("diagonal entries must multiply to 1")

    def multiply(self, g, h):
        n = self.n
        return tuple(
            tuple(sum((g[i][k] * h[k][j] for k in range(i, j + 1)), Fraction(0)) if j >= i else Fraction(0)
                  for j in range(n))
            for i in range(n))

    def inverse(self, g):
        n = self.n
        x = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            x[i][i] = 1 / g[i][i]
            for j in range(i + 1, n):
                s = sum((x[i][k] * g[k][j] for k in range(i, j)), Fraction(0))
                x[i][j] = -s / g[j][j]
        return tuple(tuple(row) for row in x)

    @functools.cached_property
    def _generators(self):
        gens = []
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                gens.append((f"E({i},{j})", self.elementary(i, j, 1)))
                gens.append((f"E({i},{j})^-1", self.elementary(i, j, -1)))
        for k in range(1, self.n):
            for p in self.primes:
                gens.append((f"D({k},{p})", self.diag_pair(k, k + 1, p)))
                gens.append((f"D({k},{p})^-1", self.diag_pair(k, k + 1, Fraction(1, p))))
        return tuple(gens)

    def generators(self):
        return self._generators

    def basis_labels(self):
        return tuple(f"chi({k},{p})" for k in range(1, self.n) for p in self.primes)

    def basis_index(self) -> tuple[tuple[int, int], ...]:
        return tuple((k, p) for k in range(1, self.n) for p in self.primes)

    def basis_values(self, g):
        return tuple(Fraction(int(vp(g[k][k], p)) - int(vp(g[k - 1][k - 1], p)))
                     for k in range(1, self.n) for p in self.primes)

    def token(self, g) -> str:
        return ";".join(",".join(str(x) for x in row) for row in g)

    def to_json(self, g):
        return [[rational_to_str(x) for x in row] for row in g]

    def parse_element(self, text: str):
        rows = [r for r in text.strip().strip("[]").split(";") if r.strip()]
        try:
            return self.matrix([[Fraction(x.strip()) for x in r.split(",")] for r in rows])
        except ValueError as exc:
            raise ParseError(f"cannot parse matrix {text!r}") from exc


# -- parsing ---------------------------------------------------------------------------

def parse_group(text: str) -> Group:
    """Parse ``BS(m,n)``, ``TRI(n;p1,p2,...)`` or ``Z``."""
    s = text.replace(" ", "").upper()
    if s in ("Z", "INT"):
        return IntegerLine()
    mt = re.fullmatch(r"BS\((-?\d+),(-?\d+)\)", s)
    if mt:
        m, n = int(mt.group(1)), int(mt.group(2))
        if m == 0 or n == 0:
            raise ParseError("BS(m,n) needs m, n nonzero")
        return BaumslagSolitar(m, n)
    mt = re.fullmatch(r"TRI\((\d+);(\d+(?:,\d+)*)\)", s)
    if mt:
        try:
            return Triangular(int(mt.group(1)), PrimeSet.of(*map(int, mt.group(2).split(","))))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"cannot parse group spec {text!r}")


# -- characters ------------------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    """Real character as rational coefficients over the group's basis."""

    group: Group
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(as_rational(c) for c in self.coeffs)
        if len(coeffs) != len(self.group.basis_labels()):
            raise ValueError(f"{self.group} needs {len(self.group.basis_labels())} coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, g) -> Fraction:
        return char_eval(self, g)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> dict:
        return {"group": str(self.group),
                "coefficients": dict(zip(self.group.basis_labels(), map(rational_to_str, self.coeffs)))}


def char_eval(chi: Character, g) -> Fraction:
    return sum((c * v for c, v in zip(chi.coeffs, chi.group.basis_values(g))), Fraction(0))


def parse_character(group: Group, text: str | Sequence) -> Character:
    if isinstance(text, str):
        items = [x for x in re.split(r"[,\s]+", text.strip()) if x]
    else:
        items = list(text)
    return Character(group, tuple(as_rational(x) for x in items))


def tau(group: BaumslagSolitar, scale=1) -> Character:
    return Character(group, (scale,))


def character_basis(n: int, P) -> list[Character]:
    G = Triangular(n, P if isinstance(P, PrimeSet) else PrimeSet.of(*P))
    size = (n - 1) * len(G.primes)
    return [Character(G, tuple(int(i == j) for j in range(size))) for i in range(size)]


# -- balls -----------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def word_lengths(group: Group, radius: int) -> dict:
    """Word length of every element of the ball, in BFS order."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius > 0:
        prev = word_lengths(group, radius - 1)
        out = dict(prev)
        gens = [g for _, g in group.generators()]
        for x in [x for x, d in prev.items() if d == radius - 1]:
            for s in gens:
                y = group.multiply(x, s)
                if y not in out:
                    out[y] = radius
        return out
    return {group.identity(): 0}


def ball(group: Group, radius: int) -> frozenset:
    return frozenset(word_lengths(group, radius))


def sphere(group: Group, radius: int) -> list:
    return [x for x, d in word_lengths(group, radius).items() if d == radius]


# -- matrix lemmas -----------------------------------------------------------------------

def unipotent_conjugation_check(n: int, P, p: int, i: int, j: int, alpha) -> int:
    """Verify A E_{i,j}^alpha A^-1 = E_{i,j}^{p^2 alpha} for A = diag(.., p, .., 1/p, ..)."""
    G = Triangular(n, P if isinstance(P, PrimeSet) else PrimeSet.of(*P))
    if p not in G.primes:
        raise ValueError(f"{p} is not in {G.primes}")
    alpha = as_rational(alpha)
    A = G.diag_pair(i, j, p)
    lhs = G.product(A, G.elementary(i, j, alpha), G.inverse(A))
    rhs = G.elementary(i, j, p * p * alpha)
    if lhs != rhs:
        raise ConjugationMismatch(f"conjugation by diag failed for {(n, p, i, j, alpha)}")
    return p * p


# -- Cayley graph of BS ------------------------------------------------------------------

@dataclass(frozen=True)
class LineCount:
    coset: tuple
    run: int
    up: int
    down: int


@dataclass
class CayleyBall:
    group: BaumslagSolitar
    radius: int
    lengths: dict
    values: dict
    edges: list = field(repr=False)

    def neighbors(self, g):
        return [h for _, h in ((nm, self.group.multiply(g, s)) for nm, s in self.group.generators())
                if h in self.lengths]

    def degree(self, g) -> int:
        return len(self.neighbors(g))

    def is_interior(self, g) -> bool:
        return self.lengths[g] <= self.radius - 1

    def a_lines(self) -> list[list]:
        """Vertex classes under a-edges inside the ball."""
        uf = UnionFind(self.lengths)
        for g, label, h in self.edges:
            if label == "a":
                uf.union(g, h)
        return sorted((sorted(c, key=lambda x: x[-1]) for c in uf.groups()), key=lambda c: c[0])

    def line_counts(self) -> tuple[list[LineCount], int]:
        """Distinct up/down t-targets per interior a-line.

        An interior a-line is a maximal run of consecutive interior vertices
        g, ga, ga^2, ... of length at least max(|m|, |n|); shorter runs are
        truncated by the ball boundary and are only counted as skipped.
        """
        G = self.group
        need = max(abs(G.m), abs(G.n))
        t, T = G.generator("t"), G.generator("T")
        out, skipped = [], 0
        for line in self.a_lines():
            run: list = []
            runs = []
            for g in line:
                if self.is_interior(g) and run and g[-1] == run[-1][-1] + 1:
                    run.append(g)
                else:
                    if run:
                        runs.append(run)
                    run = [g] if self.is_interior(g) else []
            if run:
                runs.append(run)
            for run in runs:
                if len(run) < need:
                    skipped += 1
                    continue
                up = {G.multiply(g, t)[:-1] for g in run}
                down = {G.multiply(g, T)[:-1] for g in run}
                out.append(LineCount(run[0][:-1], len(run), len(up), len(down)))
        return out, skipped

    def relator_path(self) -> list[str]:
        G = self.group
        a_m = ["a" if G.m > 0 else "A"] * abs(G.m)
        a_n = ["A" if G.n > 0 else "a"] * abs(G.n)
        return ["t"] + a_m + ["T"] + a_n

    def relator_closes(self, v) -> bool | None:
        """Follow t a^m t^-1 a^-n from v; None if the path leaves the ball."""
        x = v
        for letter in self.relator_path():
            x = self.group.multiply(x, self.group.generator(letter))
            if x not in self.lengths:
                return None
        return x == v


def cayley_ball(group: BaumslagSolitar, radius: int, chi: Character | None = None) -> CayleyBall:
    if not isinstance(group, BaumslagSolitar):
        raise TypeError("cayley_ball is defined for BS(m,n)")
    chi = chi or tau(group)
    lengths = word_lengths(group, radius)
    values = {g: char_eval(chi, g) for g in lengths}
    edges = []
    for g in lengths:
        for label in ("a", "t"):
            h = group.multiply(g, group.generator(label))
            if h in lengths:
                edges.append((g, label, h))
    return CayleyBall(group, radius, lengths, values, edges)


@dataclass(frozen=True)
class ConnectivityReport:
    threshold: Fraction | None
    inner: int
    history: tuple[tuple[int, int], ...]  # (outer radius, component count)

    @property
    def count(self) -> int:
        return self.history[-1][1]

    @property
    def connected(self) -> bool:
        """Certificate: all inner vertices joined inside the outer ball."""
        return self.count == 1

    def to_json(self) -> dict:
        return {"threshold": None if self.threshold is None else rational_to_str(self.threshold),
                "inner": self.inner,
                "history": [{"outer": r, "components": c} for r, c in self.history]}


def connectivity_probe(group: Group, chi: Character, threshold, inner: int, outer: int) -> ConnectivityReport:
    """Components of {chi >= threshold} in the inner ball, joined by paths
    through {chi >= threshold} in balls of radius inner..outer.

    ``threshold=None`` means no restriction.  A count of 1 is a proof of
    connectivity; larger counts are evidence only.
    """
    if not 0 <= inner <= outer:
        raise ValueError("need 0 <= inner <= outer")
    thr = None if threshold is None else as_rational(threshold)

    def keep(g):
        return thr is None or char_eval(chi, g) >= thr

    inner_vs = [g for g in word_lengths(group, inner) if keep(g)]
    gens = [s for _, s in group.generators()]
    history = []
    for R in range(inner, outer + 1):
        verts = {g for g in word_lengths(group, R) if keep(g)}
        uf = UnionFind(verts)
        for g in verts:
            for s in gens:
                h = group.multiply(g, s)
                if h in verts:
                    uf.union(g, h)
        history.append((R, len({uf.find(g) for g in inner_vs})))
    return ConnectivityReport(thr, inner, tuple(history))


def random_element(group: Group, rng, length: int):
    """Product of ``length`` uniformly chosen generators."""
    gens = group.generators()
    out = group.identity()
    for _ in range(length):
        out = group.multiply(out, rng.choice(gens)[1])
    return out
