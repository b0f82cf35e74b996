"""Hecke pairs (Gamma, Lambda): coset windows, commensuration, truncated
Schlichting completions, induced characters and normal-core escapes.

Two pairs are supported: BS(m,n) with Lambda = <a>, and TRI(n;P) with
Lambda = B_n(Z) (integer entries, diagonal +-1).  A coset g*Lambda is named by
a canonical representative element, so cosets are ordinary group elements.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import PrimeSet, rational_to_str, vp
from .errors import (CharacterNotLambdaVanishing, ContractViolation, EscapeFailed, ExceedsCap,
                     InCore, InvariantViolation, UndefinedAtBase)
from .groups import (BaumslagSolitar, Character, Group, Triangular, char_eval, word_lengths)

DEFAULT_ORBIT_CAP = 1000


@dataclass(frozen=True)
class HeckePair:
    group: Group

    def __post_init__(self):
        if not isinstance(self.group, (BaumslagSolitar, Triangular)):
            raise ValueError(f"no Hecke pair is defined for {self.group}")

    def __str__(self):
        return f"{self.group}/Lambda"

    @property
    def is_bs(self) -> bool:
        return isinstance(self.group, BaumslagSolitar)

    def lambda_generators(self) -> tuple:
        G = self.group
        if self.is_bs:
            # a^-1 first, so orbit BFS picks nonnegative a-powers as coset reps
            return (G.a_power(-1), G.a_power(1))
        gens = []
        for i in range(1, G.n + 1):
            for j in range(i + 1, G.n + 1):
                gens.append(G.elementary(i, j, 1))
                gens.append(G.elementary(i, j, -1))
        for k in range(1, G.n):
            d = [1] * G.n
            d[k - 1] = d[k] = -1
            gens.append(G.diagonal(d))
        return tuple(gens)

    def in_lambda(self, g) -> bool:
        if self.is_bs:
            return len(g) == 1
        n = self.group.n
        return (all(x.denominator == 1 for row in g for x in row)
                and all(g[i][i] in (1, -1) for i in range(n)))

    def canonical(self, g):
        return coset_canonical(self, g)

    def same_coset(self, g, h) -> bool:
        return self.in_lambda(self.group.multiply(self.group.inverse(g), h))

    def token(self, coset) -> str:
        return self.group.token(coset)

    def base(self):
        return self.group.identity()


def hecke_pair(group: Group) -> HeckePair:
    return HeckePair(group)


def coset_canonical(pair: HeckePair, g):
    """Canonical representative of g*Lambda (idempotent)."""
    G = pair.group
    if pair.is_bs:
        return g[:-1] + (0,)
    n = G.n
    a = [list(row) for row in g]
    # signs: right multiplication by diag(.., -1, -1, ..) flips columns k, k+1
    for k in range(n - 1):
        if a[k][k] < 0:
            for col in (k, k + 1):
                for r in range(n):
                    a[r][col] = -a[r][col]
    # unipotent part: column j += c * column i puts a[i][j] into [0, a[i][i])
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            c = -math.floor(a[i][j] / a[i][i])
            if c:
                for r in range(i + 1):
                    a[r][j] += c * a[r][i]
    return tuple(tuple(row) for row in a)


# -- coset windows -------------------------------------------------------------------

@dataclass(frozen=True)
class CosetBall:
    pair: HeckePair
    radius: int
    cosets: tuple  # BFS order, base first

    @property
    def base(self):
        return self.pair.base()

    @property
    def members(self) -> frozenset:
        return frozenset(self.cosets)

    def __contains__(self, c):
        return c in self.members

    def __len__(self):
        return len(self.cosets)

    def to_json(self) -> dict:
        return {"radius": self.radius, "cosets": [self.pair.token(c) for c in self.cosets]}


def coset_ball(pair: HeckePair, radius: int) -> CosetBall:
    seen: dict = {}
    for g in word_lengths(pair.group, radius):
        seen.setdefault(coset_canonical(pair, g), None)
    return CosetBall(pair, radius, tuple(seen))


# -- commensuration ---------------------------------------------------------------------

def lambda_orbit(pair: HeckePair, g, cap: int = DEFAULT_ORBIT_CAP) -> dict:
    """Lambda-orbit of the coset g*Lambda, as {coset: f} with f^-1 g Lambda = coset.

    The f's are right coset representatives of Stab = Lambda n g Lambda g^-1
    in Lambda: the orbit point f^-1*x depends only on Stab*f.
    """
    G = pair.group
    start = coset_canonical(pair, g)
    reps = {start: G.identity()}
    queue = deque([start])
    gens = pair.lambda_generators()
    while queue:
        y = queue.popleft()
        f = reps[y]
        for s in gens:
            z = coset_canonical(pair, G.multiply(s, y))
            if z not in reps:
                reps[z] = G.multiply(f, G.inverse(s))
                if len(reps) > cap:
                    raise ExceedsCap(f"Lambda-orbit of {G.token(g)} exceeds {cap} points",
                                     explored=len(reps), cap=cap)
                queue.append(z)
    return reps


def commensuration_indices(pair: HeckePair, g, cap: int = DEFAULT_ORBIT_CAP) -> tuple[int, int]:
    """(i1, i2) = ([Lambda : Lambda n g^-1 Lambda g], [Lambda : Lambda n g Lambda g^-1]).

    i1 is the orbit size of g^-1*Lambda, i2 that of g*Lambda.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    G = pair.group
    return (len(lambda_orbit(pair, G.inverse(g), cap)), len(lambda_orbit(pair, g, cap)))


def lambda_sample(pair: HeckePair, rng: random.Random, length: int):
    """Random word of the given length in the Lambda generators."""
    G = pair.group
    gens = pair.lambda_generators()
    out = G.identity()
    for _ in range(length):
        out = G.multiply(out, rng.choice(gens))
    return out


@dataclass
class TransversalWitness:
    F: tuple
    pieces: dict  # c -> F_c (right coset reps of Lambda n c^-1 Lambda c in Lambda)
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def factor(self, pair: HeckePair, x):
        """Some f in F with x f^-1 in Lambda, else None."""
        G = pair.group
        for f in self.F:
            if pair.in_lambda(G.multiply(x, G.inverse(f))):
                return f
        return None


def transversal_witness(pair: HeckePair, C: Iterable, samples: int = 100, seed: int = 0,
                        lambda_length: int = 6, cap: int = DEFAULT_ORBIT_CAP) -> TransversalWitness:
    """Finite F with C*Lambda in Lambda*F, checked on sampled c*lambda."""
    G = pair.group
    C = list(dict.fromkeys(C))
    pieces = {}
    F: dict = {}
    for c in C:
        reps = lambda_orbit(pair, G.inverse(c), cap)
        pieces[c] = tuple(reps.values())
        for f in pieces[c]:
            F.setdefault(G.multiply(c, f), None)
    w = TransversalWitness(tuple(F), pieces)
    if not C:
        return w
    rng = random.Random(seed)
    for _ in range(samples):
        c = rng.choice(C)
        lam = lambda_sample(pair, rng, rng.randint(0, lambda_length))
        x = G.multiply(c, lam)
        if w.factor(pair, x) is None:
            w.failures.append((c, lam))
        w.checked += 1
    return w


# -- truncated Schlichting completion ---------------------------------------------------

@dataclass(frozen=True)
class PartialPermutation:
    pair: HeckePair
    domain: CosetBall
    mapping: dict
    provenance: object  # acting group element

    def __call__(self, c):
        return self.mapping[c]

    def defined_at(self, c) -> bool:
        return c in self.mapping

    def check(self) -> None:
        if len(set(self.mapping.values())) != len(self.mapping):
            raise InvariantViolation("partial permutation is not injective")
        G = self.pair.group
        for c, d in self.mapping.items():
            if coset_canonical(self.pair, G.multiply(self.provenance, c)) != d:
                raise InvariantViolation("mapping disagrees with its provenance")

    def compose(self, other: PartialPermutation) -> PartialPermutation:
        """self after other, defined where both steps are."""
        mapping = {c: self.mapping[d] for c, d in other.mapping.items() if d in self.mapping}
        g = self.pair.group.multiply(self.provenance, other.provenance)
        return PartialPermutation(self.pair, self.domain, mapping, g)

    def agrees_with(self, other: PartialPermutation) -> bool:
        return all(other.mapping[c] == d for c, d in self.mapping.items() if c in other.mapping)

    def to_json(self) -> dict:
        tok = self.pair.token
        pairs = sorted([tok(c), tok(d)] for c, d in self.mapping.items())
        return {"provenance": self.pair.group.token(self.provenance), "pairs": pairs}


def schlichting_truncation(pair: HeckePair, g, ball: CosetBall) -> PartialPermutation:
    G = pair.group
    members = ball.members
    mapping = {}
    for c in ball.cosets:
        d = coset_canonical(pair, G.multiply(g, c))
        if d in members:
            mapping[c] = d
    return PartialPermutation(pair, ball, mapping, g)


def check_lambda_vanishing(pair: HeckePair, chi: Character) -> None:
    for s in pair.lambda_generators():
        if char_eval(chi, s) != 0:
            raise CharacterNotLambdaVanishing(f"character is nonzero on {pair.group.token(s)}")


def induced_char(pair: HeckePair, chi: Character, sigma: PartialPermutation) -> Fraction:
    """chi~(sigma) = chi(g) for any g with g*Lambda = sigma(Lambda)."""
    check_lambda_vanishing(pair, chi)
    base = pair.base()
    if base not in sigma.mapping:
        raise UndefinedAtBase("truncation is undefined at the base point")
    rep = sigma.mapping[base]
    value = char_eval(chi, rep)
    other = pair.group.multiply(rep, pair.lambda_generators()[0])
    if char_eval(chi, other) != value:
        raise InvariantViolation("induced character depends on the representative")
    return value


@dataclass(frozen=True)
class DensityWitness:
    g: object  # canonical element with the same base image, chi(g) >= 0
    lam: object  # Lambda-part, sigma = truncation(g) o truncation(lam)
    ok: bool


def density_check(pair: HeckePair, chi: Character, sigma: PartialPermutation) -> DensityWitness:
    """Factor sigma through an element of Gamma_chi and a base-fixing truncation."""
    G = pair.group
    if induced_char(pair, chi, sigma) < 0:
        raise ValueError("density check needs chi~(sigma) >= 0")
    h = sigma.provenance
    g = coset_canonical(pair, h)
    lam = G.multiply(G.inverse(g), h)
    ball = sigma.domain
    t_lam = schlichting_truncation(pair, lam, ball)
    composed = schlichting_truncation(pair, g, ball).compose(t_lam)
    ok = (pair.in_lambda(lam) and char_eval(chi, g) >= 0
          and t_lam.mapping.get(pair.base()) == pair.base()
          and composed.agrees_with(sigma) and sigma.agrees_with(composed))
    return DensityWitness(g, lam, ok)


# -- normal core of B_n(Z) ----------------------------------------------------------------

@dataclass(frozen=True)
class CoreEscape:
    B: tuple
    conjugate: tuple  # B A B^-1
    entry: tuple[int, int]  # 1-based position of the witness entry
    prime: int
    valuation: int
    case: str  # "off-diagonal" | "diagonal"
    exponent: Fraction  # k' (off-diagonal) or alpha (diagonal)
    adjusted: bool  # True when k' differs from the plain valuation

    def to_json(self) -> dict:
        return {"case": self.case, "entry": list(self.entry), "prime": self.prime,
                "valuation": self.valuation, "exponent": rational_to_str(self.exponent),
                "adjusted": self.adjusted,
                "B": [[rational_to_str(x) for x in r] for r in self.B],
                "conjugate": [[rational_to_str(x) for x in r] for r in self.conjugate]}


def core_escape(n: int, P, A: Sequence[Sequence]) -> CoreEscape:
    """Conjugate A in B_n(Z) out of B_n(Z) by an explicit B in B_n(Z[1/P]).

    Off-diagonal case: for a nonzero a_ij, B = diag(.., p^-k', .., p^k', ..)
    with k' = v_p(a_ij) + 1 scales a_ij by p^-2k'.  Diagonal case: for
    a_ii != a_jj, B = E_ij^alpha produces the entry alpha*(a_jj - a_ii) =
    -+2 alpha, with alpha = 1/p (p odd) or 1/4 (p = 2).
    """
    G = Triangular(n, P if isinstance(P, PrimeSet) else PrimeSet.of(*P))
    A = G.matrix(A)
    pair = HeckePair(G)
    if not pair.in_lambda(A):
        raise ContractViolation("A must have integer entries and diagonal +-1")
    ident = G.identity()
    neg = tuple(tuple(-x for x in row) for row in ident)
    if A == ident or (n % 2 == 0 and A == neg):
        raise InCore("A lies in the normal core")
    p = G.primes.primes[0]
    off = [(i, j) for i in range(n) for j in range(i + 1, n) if A[i][j] != 0]
    if off:
        i, j = off[0]
        v = int(vp(A[i][j], p))
        k = v + 1
        B = G.diag_pair(i + 1, j + 1, Fraction(1, p ** k))
        case, exponent, adjusted = "off-diagonal", Fraction(k), True
    else:
        i, j = next((i, j) for i in range(n) for j in range(i + 1, n) if A[i][i] != A[j][j])
        alpha = Fraction(1, 4) if p == 2 else Fraction(1, p)
        B = G.elementary(i + 1, j + 1, alpha)
        case, exponent, adjusted = "diagonal", alpha, p == 2
    conj = G.product(B, A, G.inverse(B))
    x = conj[i][j]
    val = vp(x, p)
    if x == 0 or int(val) >= 0:
        raise EscapeFailed(f"conjugate entry {x} at {(i + 1, j + 1)} stays integral at {p}")
    G.validate(conj)
    return CoreEscape(B, conj, (i + 1, j + 1), p, int(val), case, exponent, adjusted)


def random_core_element(n: int, rng: random.Random, bound: int = 3) -> tuple:
    """Random element of B_n(Z) outside the normal core (for sampling)."""
    while True:
        signs = [rng.choice((1, -1)) for _ in range(n - 1)]
        last = 1
        for s in signs:
            last *= s
        diag = signs + [last]
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = diag[i]
            for j in range(i + 1, n):
                rows[i][j] = rng.randint(-bound, bound) if rng.random() < 0.6 else 0
        ident = all(rows[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))
        neg = all(rows[i][j] == (-1 if i == j else 0) for i in range(n) for j in range(n))
        if not ident and not (n % 2 == 0 and neg):
            return tuple(tuple(Fraction(x) for x in r) for r in rows)
