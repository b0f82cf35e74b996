"""Augmented chain complexes of translate families and their reduced homology.

Chains are normalized: the basis in degree k is the set of nondegenerate
k-simplices, degenerate faces are dropped.  Degree 0 maps to the ring by the
augmentation, so ``boundary_matrix(F, 0, R)`` is the row of ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .errors import NotASubfamily, NotNested
from .linalg import INTEGERS, RATIONALS, RingSpec, SparseMatrix, prime_field
from .simplicial import Simplex, TranslateFamily, is_nondegenerate

__all__ = [
    "INTEGERS", "RATIONALS", "prime_field", "RingSpec", "HomologyResult", "DirectedProbeReport",
    "boundary_matrix", "full_boundary_matrix", "reduced_homology", "reduced_homology_full",
    "induced_map_trivial", "essential_acyclicity_probe",
]


@dataclass
class BoundaryMatrix(SparseMatrix):
    row_basis: list = field(default_factory=list)
    col_basis: list = field(default_factory=list)


def _boundary(col_basis: list[Simplex], row_basis: list[Simplex] | None, ring: RingSpec,
              normalized: bool) -> BoundaryMatrix:
    if row_basis is None:  # augmentation
        entries = {(0, j): ring.coerce(1) for j in range(len(col_basis))}
        return BoundaryMatrix(1, len(col_basis), entries, [()], col_basis)
    index = {s: i for i, s in enumerate(row_basis)}
    entries: dict = {}
    for j, sigma in enumerate(col_basis):
        for i in range(len(sigma)):
            tau = sigma[:i] + sigma[i + 1:]
            if normalized and not is_nondegenerate(tau):
                continue
            key = (index[tau], j)
            x = ring.reduce(entries.get(key, 0) + (1 if i % 2 == 0 else -1))
            if x:
                entries[key] = x
            else:
                entries.pop(key, None)
    return BoundaryMatrix(len(row_basis), len(col_basis), entries, row_basis, col_basis)


def boundary_matrix(family: TranslateFamily, k: int, ring: RingSpec = INTEGERS) -> BoundaryMatrix:
    """Matrix of d_k on normalized chains; k = 0 gives the augmentation row."""
    if k < 0:
        raise ValueError("degree must be >= 0")
    cols = family.simplices(k)
    rows = None if k == 0 else family.simplices(k - 1)
    return _boundary(cols, rows, ring, normalized=True)


def full_boundary_matrix(family: TranslateFamily, k: int, ring: RingSpec = INTEGERS) -> BoundaryMatrix:
    """d_k on the unnormalized complex (degenerate tuples included).

    Exponential in k; intended as a cross-check on small windows.
    """
    if k < 0:
        raise ValueError("degree must be >= 0")
    cols = family.all_tuples(k)
    rows = None if k == 0 else family.all_tuples(k - 1)
    return _boundary(cols, rows, ring, normalized=False)


@dataclass(frozen=True)
class HomologyResult:
    ring: RingSpec
    degree: int
    rank: int  # free rank over Z, dimension over a field
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"ring": str(self.ring), "degree": self.degree, "rank": self.rank,
                "torsion": list(self.torsion)}


def _homology(d_k: BoundaryMatrix, d_k1: BoundaryMatrix, k: int, ring: RingSpec) -> HomologyResult:
    n_k = d_k.cols
    rank_k = linalg.diagonalize(d_k.entries, d_k.rows, d_k.cols, ring).rank
    diag = linalg.diagonalize(d_k1.entries, d_k1.rows, d_k1.cols, ring)
    free = n_k - rank_k - diag.rank
    return HomologyResult(ring, k, free, tuple(diag.invariant_factors()))


def reduced_homology(family: TranslateFamily, k: int, ring: RingSpec = INTEGERS) -> HomologyResult:
    if k < 0:
        raise ValueError("degree must be >= 0")
    return _homology(boundary_matrix(family, k, ring), boundary_matrix(family, k + 1, ring), k, ring)


def reduced_homology_full(family: TranslateFamily, k: int, ring: RingSpec = INTEGERS) -> HomologyResult:
    """Same as :func:`reduced_homology` but on the unnormalized complex."""
    return _homology(full_boundary_matrix(family, k, ring), full_boundary_matrix(family, k + 1, ring),
                     k, ring)


def cycle_basis(family: TranslateFamily, k: int, ring: RingSpec = INTEGERS) -> tuple[list[Simplex], list[dict]]:
    """Basis of reduced k-cycles (a Z-basis over Z), as {simplex: coeff} dicts."""
    d_k = boundary_matrix(family, k, ring)
    diag = linalg.diagonalize(d_k.entries, d_k.rows, d_k.cols, ring, track_kernel=True)
    basis = d_k.col_basis
    return basis, [{basis[c]: v for c, v in vec.items()} for vec in diag.kernel]


def induced_map_trivial(small: TranslateFamily, big: TranslateFamily, k: int,
                        ring: RingSpec = INTEGERS) -> bool:
    """Is the inclusion-induced map H~_k(small) -> H~_k(big) zero?

    Every cycle of a basis of Z_k(small) must be a boundary in big; over Z
    this is integral solvability, read off the Smith form of d_{k+1}(big).
    """
    if not small.is_subfamily_of(big):
        raise NotASubfamily("every part of the smaller family must lie in a part of the larger one")
    _, cycles = cycle_basis(small, k, ring)
    if not cycles:
        return True
    d = boundary_matrix(big, k + 1, ring)
    index = {s: i for i, s in enumerate(d.row_basis)}
    carry = [{index[s]: v for s, v in z.items()} for z in cycles]
    diag = linalg.diagonalize(d.entries, d.rows, d.cols, ring, carry=carry)
    return all(diag.carried_in_image(j) for j in range(len(carry)))


NONE_IN_WINDOW = "NONE-IN-WINDOW"


@dataclass
class DirectedProbeReport:
    degree: int
    ring: RingSpec
    pairs: list  # (alpha, beta or None)
    homology: list  # HomologyResult per stage

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "ring": str(self.ring),
            "pairs": [{"alpha": a, "beta": NONE_IN_WINDOW if b is None else b} for a, b in self.pairs],
            "homology": [h.to_json() for h in self.homology],
        }


def check_nested(stages: Sequence[TranslateFamily]) -> None:
    for i, (a, b) in enumerate(zip(stages, stages[1:])):
        if not a.is_subfamily_of(b):
            raise NotNested(f"stage {i} is not contained in stage {i + 1}")


def essential_acyclicity_probe(stages: Sequence[TranslateFamily], k: int,
                               ring: RingSpec = INTEGERS) -> DirectedProbeReport:
    """For each stage alpha, the least beta >= alpha in the window with
    H~_k(alpha) -> H~_k(beta) zero, or None (not found in the window)."""
    check_nested(stages)
    homology = [reduced_homology(s, k, ring) for s in stages]
    pairs = []
    for alpha, stage in enumerate(stages):
        beta = None
        if homology[alpha].is_zero:
            beta = alpha
        else:
            for b in range(alpha + 1, len(stages)):
                if homology[b].is_zero or induced_map_trivial(stage, stages[b], k, ring):
                    beta = b
                    break
        pairs.append((alpha, beta))
    return DirectedProbeReport(k, ring, pairs, homology)
