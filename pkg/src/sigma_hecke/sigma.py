"""Closed-form Sigma-set classifiers and the filtration pipelines.

Verdicts come only from the closed-form tables below; the filtration builders
feed the homology and component probes, whose output is evidence attached to
reports and never turns into a verdict.
"""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .arith import PrimeSet, as_rational, rational_to_str
from .errors import DimensionMismatch, WindowTooSmall
from .groups import Character, Group, char_eval, word_lengths
from .hecke import HeckePair, check_lambda_vanishing, coset_ball, coset_canonical
from .simplicial import TranslateFamily, homotopy_check


class Verdict(str, enum.Enum):
    MEMBER = "MEMBER"
    NON_MEMBER = "NON_MEMBER"
    UNKNOWN = "UNKNOWN"


class Target(str, enum.Enum):
    COMPLETION = "COMPLETION"
    DISCRETE = "DISCRETE"


class Theory(str, enum.Enum):
    HOMOTOPICAL = "HOMOTOPICAL"
    HOMOLOGICAL = "HOMOLOGICAL"


# Clause tag -> (statement, formula).  Every verdict carries one of these tags.
CITATIONS: dict[str, tuple[str, str]] = {
    "degree-zero": ("Sigma-sets in degree 0", "Sigma^0 = Hom(G,R)"),
    "bs.unimodular": ("Sigma-sets of the BS completions, case |mn| = 1",
                      "Sigma^k_top(G_{m,n}) = R tau, k >= 1"),
    "bs.m-unit": ("Sigma-sets of the BS completions, case |m| = 1, |n| >= 2",
                  "Sigma^k_top(G_{m,n}) = {lambda tau : lambda <= 0}, k >= 1"),
    "bs.n-unit": ("Sigma-sets of the BS completions, case |m| >= 2, |n| = 1",
                  "Sigma^k_top(G_{m,n}) = {lambda tau : lambda >= 0}, k >= 1"),
    "bs.non-ascending": ("Sigma-sets of the BS completions, case |m|, |n| >= 2",
                         "Sigma^k_top(G_{m,n}) = {0}, k >= 1"),
    "tri.outside-cone": ("Sigma-sets of B_n(Z[1/P]), complement of the cone",
                         "Sigma^inf = Hom \\ C"),
    "tri.infinite-degree": ("Sigma-sets of B_n(Z[1/P]), infinite degree",
                            "Sigma^inf = Hom \\ C"),
    "tri.stratum": ("Sigma-sets of B_n(Z[1/P]), upper bound",
                    "Sigma^k is contained in Hom \\ C^(k)"),
    "tri.large-primes": ("Sigma-sets of B_n(Z[1/P]), equality for large primes",
                         "Sigma^k = Hom \\ C^(k) if every p >= 2^(n-2)"),
    "tri.gap": ("Sigma-sets of B_n(Z[1/P]), unresolved range",
                "C \\ C^(k) with some p < 2^(n-2)"),
}


@dataclass(frozen=True)
class SigmaVerdict:
    verdict: Verdict
    clause: str
    inputs: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.clause not in CITATIONS:
            raise KeyError(f"unknown clause tag {self.clause!r}")

    def to_json(self) -> dict:
        statement, formula = CITATIONS[self.clause]
        return {"verdict": self.verdict.value, "clause": self.clause,
                "citation": {"statement": statement, "formula": formula}, "inputs": self.inputs}


def _degree(k) -> float | int:
    if isinstance(k, str):
        if k.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        k = int(k)
    if k != math.inf and (int(k) != k or k < 0):
        raise ValueError(f"degree must be a nonnegative integer or infinity, got {k}")
    return k


def _degree_json(k):
    return "inf" if k == math.inf else int(k)


def bs_sigma_classify(m: int, n: int, lam, k, target: Target | str = Target.COMPLETION,
                      theory: Theory | str = Theory.HOMOTOPICAL, ring: str | None = None) -> SigmaVerdict:
    """Membership of lam*tau in Sigma^k of the BS completion (or of BS(m,n)
    itself restricted to the line R*tau).  The homological table is the same."""
    if m == 0 or n == 0:
        raise ValueError("m and n must be nonzero")
    lam = as_rational(lam)
    k = _degree(k)
    target, theory = Target(target), Theory(theory)
    inputs = {"m": m, "n": n, "lambda": rational_to_str(lam), "k": _degree_json(k),
              "target": target.value, "theory": theory.value}
    if theory is Theory.HOMOLOGICAL:
        inputs["ring"] = ring or "Z"
    if k == 0:
        return SigmaVerdict(Verdict.MEMBER, "degree-zero", inputs)
    am, an = abs(m), abs(n)
    if am == 1 and an == 1:
        ok, clause = True, "bs.unimodular"
    elif am == 1:
        ok, clause = lam <= 0, "bs.m-unit"
    elif an == 1:
        ok, clause = lam >= 0, "bs.n-unit"
    else:
        ok, clause = lam == 0, "bs.non-ascending"
    return SigmaVerdict(Verdict.MEMBER if ok else Verdict.NON_MEMBER, clause, inputs)


@dataclass(frozen=True)
class ConeCoordinates:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))

    @property
    def nonzero_count(self) -> int:
        return sum(1 for c in self.coeffs if c)

    @property
    def any_negative(self) -> bool:
        return any(c < 0 for c in self.coeffs)

    def __len__(self):
        return len(self.coeffs)


def cone_membership(c: ConeCoordinates | Sequence) -> tuple[bool, int | None]:
    if not isinstance(c, ConeCoordinates):
        c = ConeCoordinates(tuple(c))
    in_c = not c.any_negative and c.nonzero_count > 0
    return in_c, (c.nonzero_count if in_c else None)


def schesler_classify(n: int, P, c: ConeCoordinates | Sequence, k,
                      target: Target | str = Target.COMPLETION) -> SigmaVerdict:
    """Membership of sum c_i b_i in Sigma^k of B_n(Z[1/P]) or its completion."""
    P = P if isinstance(P, PrimeSet) else PrimeSet.of(*P)
    if not isinstance(c, ConeCoordinates):
        c = ConeCoordinates(tuple(c))
    if len(c) != (n - 1) * len(P):
        raise DimensionMismatch(f"expected {(n - 1) * len(P)} coordinates, got {len(c)}")
    k = _degree(k)
    target = Target(target)
    inputs = {"n": n, "P": list(P.primes), "coordinates": [rational_to_str(x) for x in c.coeffs],
              "k": _degree_json(k), "target": target.value}
    if k == 0:
        return SigmaVerdict(Verdict.MEMBER, "degree-zero", inputs)
    in_c, stratum = cone_membership(c)
    if not in_c:
        return SigmaVerdict(Verdict.MEMBER, "tri.outside-cone", inputs)
    if k == math.inf:
        return SigmaVerdict(Verdict.NON_MEMBER, "tri.infinite-degree", inputs)
    if stratum <= k:
        return SigmaVerdict(Verdict.NON_MEMBER, "tri.stratum", inputs)
    if all(p >= 2 ** (n - 2) for p in P):
        return SigmaVerdict(Verdict.MEMBER, "tri.large-primes", inputs)
    return SigmaVerdict(Verdict.UNKNOWN, "tri.gap", inputs)


# -- filtrations --------------------------------------------------------------------

def _check_radii(radii: Sequence[int]) -> list[int]:
    radii = list(radii)
    if any(r < 0 for r in radii) or any(a >= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be nonnegative and strictly increasing")
    return radii


def positive_translates(group: Group, chi: Character, W: int) -> list:
    """Elements g of ball(W) with chi(g) >= 0, in BFS order."""
    return [g for g in word_lengths(group, W) if char_eval(chi, g) >= 0]


def build_group_filtration(group: Group, chi: Character, W: int, radii: Sequence[int]) -> list[TranslateFamily]:
    """Stage r has parts g*ball(r) for g in ball(W) with chi(g) >= 0."""
    radii = _check_radii(radii)
    translates = positive_translates(group, chi, W)
    stages = []
    for r in radii:
        C = list(word_lengths(group, r))
        parts = tuple(frozenset(group.multiply(g, c) for c in C) for g in translates)
        stages.append(TranslateFamily(parts, tuple(translates)))
    return stages


def build_coset_filtration(pair: HeckePair, chi: Character, W: int, radii: Sequence[int]) -> list[TranslateFamily]:
    """Stage r has parts g*F_r for g in ball(W) with chi(g) >= 0, F_r = coset_ball(r)."""
    check_lambda_vanishing(pair, chi)
    radii = _check_radii(radii)
    G = pair.group
    translates = positive_translates(G, chi, W)
    stages = []
    for r in radii:
        F = coset_ball(pair, r).cosets
        parts = tuple(frozenset(coset_canonical(pair, G.multiply(g, c)) for c in F) for g in translates)
        stages.append(TranslateFamily(parts, tuple(translates)))
    return stages


def lambda_ball(pair: HeckePair, radius: int) -> dict:
    """Lambda-elements of word length <= radius in the Lambda generators."""
    G = pair.group
    out = {G.identity(): 0}
    frontier = [G.identity()]
    for d in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for s in pair.lambda_generators():
                y = G.multiply(x, s)
                if y not in out:
                    out[y] = d
                    nxt.append(y)
        frontier = nxt
    return out


@dataclass
class RoundtripReport:
    phi_psi_identity: bool
    phi_psi_checked: int
    base_ok: bool
    psi_phi_contained: bool
    lambda_radius: int
    homotopy_ok: bool
    failing_simplex: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.phi_psi_identity and self.base_ok and self.psi_phi_contained and self.homotopy_ok

    def to_json(self, token=str) -> dict:
        return {
            "phi_psi_identity": self.phi_psi_identity,
            "phi_psi_checked": self.phi_psi_checked,
            "base_point": self.base_ok,
            "psi_phi_contained": self.psi_phi_contained,
            "lambda_radius": self.lambda_radius,
            "homotopy": self.homotopy_ok,
            "failing_simplex": None if self.failing_simplex is None
            else [token(v) for v in self.failing_simplex],
            "ok": self.ok,
        }


def phi_psi_roundtrip(pair: HeckePair, chi: Character, W: int, C_radius: int, F_radius: int,
                      lambda_radius: int | None = None, samples: int = 100, seed: int = 0,
                      max_lambda_radius: int = 64) -> RoundtripReport:
    """Windowed check that phi (x -> x*Lambda) and psi (coset -> canonical
    representative) are inverse up to simplicial homotopy.

    phi o psi is checked to be the identity on sampled simplices of the coset
    stage.  psi o phi sends g*c to g*[c Lambda]*mu with mu in Lambda; D is C
    together with [c Lambda]*mu for mu in the Lambda-ball of ``lambda_radius``
    (smallest sufficient radius when None), and the straight homotopy from the
    inclusion to psi o phi must land in the stage with parts g*D.
    """
    check_lambda_vanishing(pair, chi)
    G = pair.group
    translates = positive_translates(G, chi, W)
    C = list(word_lengths(G, C_radius))

    def phi(x):
        return coset_canonical(pair, x)

    def psi(y):
        return y  # canonical representatives are group elements

    base_ok = psi(pair.base()) == G.identity() and phi(G.identity()) == pair.base()

    # (a) phi o psi on the coset side
    F = coset_ball(pair, F_radius).cosets
    coset_parts = [sorted({phi(G.multiply(g, c)) for c in F}, key=repr) for g in translates]
    rng = random.Random(seed)
    checked, identity = 0, True
    for _ in range(samples):
        part = rng.choice(coset_parts)
        k = rng.randint(0, 2)
        sigma = tuple(rng.choice(part) for _ in range(k + 1))
        identity &= tuple(phi(psi(y)) for y in sigma) == sigma
        checked += 1
    identity &= all(phi(psi(y)) == y for part in coset_parts for y in part)

    # (b) psi o phi against the inclusion on the element side
    needed = {}
    for g in translates:
        for c in C:
            rep_c = phi(c)
            mu = G.multiply(G.inverse(rep_c), G.multiply(G.inverse(g), phi(G.multiply(g, c))))
            needed[(rep_c, mu)] = None
    mus = {mu for _, mu in needed}
    if lambda_radius is None:
        radius = 0
        ball = lambda_ball(pair, 0)
        while not mus <= ball.keys():
            radius += 1
            if radius > max_lambda_radius:
                raise WindowTooSmall(f"psi o phi needs a Lambda-ball beyond radius {max_lambda_radius}")
            ball = lambda_ball(pair, radius)
    else:
        radius = lambda_radius
        ball = lambda_ball(pair, radius)
        if not mus <= ball.keys():
            raise WindowTooSmall(f"Lambda-ball of radius {radius} is too small for psi o phi")
    reps = {phi(c) for c in C}
    D = set(C) | {G.multiply(r, mu) for r in reps for mu in ball}

    domain = TranslateFamily(tuple(frozenset(G.multiply(g, c) for c in C) for g in translates))
    codomain = TranslateFamily(tuple(frozenset(G.multiply(g, d) for d in D) for g in translates))
    inclusion = {x: x for x in domain.vertices}
    psiphi = {x: psi(phi(x)) for x in domain.vertices}
    contained = all(codomain.contains_set(psiphi[x] for x in part) for part in domain.parts)
    result = homotopy_check(inclusion, psiphi, domain, codomain, max_dim=2) if contained else None
    return RoundtripReport(identity, checked, base_ok, contained, radius,
                           bool(result and result.ok),
                           None if result is None or result.ok else result.mixed)
