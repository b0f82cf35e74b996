"""Word-metric windows, Vietoris-Rips complexes and their chi-restrictions."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .chains import INTEGERS, RingSpec, reduced_homology
from .errors import ContractViolation, VertexOutsideWindow, WindowTooSmall
from .groups import Character, Group, IntegerLine, char_eval, word_lengths
from .simplicial import TranslateFamily, pi0, vertex_key


@dataclass(frozen=True)
class MetricWindow:
    """Finite set of group elements with the word metric d(x, y) = |x^-1 y|."""

    group: Group
    points: frozenset
    radius: int  # points lie in ball(radius)

    @cached_property
    def _lengths(self) -> dict | None:
        if isinstance(self.group, IntegerLine):
            return None
        return word_lengths(self.group, 2 * self.radius)

    def dist(self, x, y) -> int:
        if isinstance(self.group, IntegerLine):
            return abs(y - x)
        return self._lengths[self.group.multiply(self.group.inverse(x), y)]

    @cached_property
    def ordered(self) -> tuple:
        return tuple(sorted(self.points, key=vertex_key))

    def __contains__(self, x):
        return x in self.points


def word_metric_window(group: Group, radius: int, points: Iterable | None = None) -> MetricWindow:
    """Ball of the given radius, or a subset of it."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if points is None:
        pts = frozenset(word_lengths(group, radius))
    else:
        pts = frozenset(points)
        if isinstance(group, IntegerLine):
            if any(abs(x) > radius for x in pts):
                raise WindowTooSmall("points lie outside the ball")
        elif not pts <= word_lengths(group, radius).keys():
            raise WindowTooSmall("points lie outside the ball")
    return MetricWindow(group, pts, radius)


@dataclass(frozen=True)
class VRWindow:
    base: MetricWindow
    r: int
    chi: Character | None = None

    @cached_property
    def vertices(self) -> frozenset:
        if self.chi is None:
            return self.base.points
        return frozenset(x for x in self.base.points if char_eval(self.chi, x) >= 0)

    def edges(self) -> list[tuple]:
        vs = sorted(self.vertices, key=vertex_key)
        return [(x, y) for i, x in enumerate(vs) for y in vs[i + 1:] if self.base.dist(x, y) <= self.r]

    def one_skeleton_family(self) -> TranslateFamily | None:
        """Clique family of the 1-skeleton: edges plus singleton parts."""
        if not self.vertices:
            return None
        parts = [frozenset(e) for e in self.edges()]
        parts += [frozenset([v]) for v in sorted(self.vertices, key=vertex_key)]
        return TranslateFamily(tuple(parts))


def vr_simplex_test(W: VRWindow, sigma: Sequence) -> bool:
    for v in sigma:
        if v not in W.base.points:
            raise VertexOutsideWindow(f"{v!r} is not in the window")
    if any(v not in W.vertices for v in sigma):
        return False
    return all(W.base.dist(x, y) <= W.r for i, x in enumerate(sigma) for y in sigma[i + 1:])


def zero_skeleton_invariance(windows: Sequence[VRWindow]) -> bool:
    """All restricted windows over one base share the same vertex set."""
    if not windows:
        return True
    first = windows[0]
    for w in windows[1:]:
        if w.base != first.base or w.chi != first.chi:
            raise ContractViolation("windows must share the base window and the restriction")
    return all(w.vertices == first.vertices for w in windows)


@dataclass
class VRProbeReport:
    scales: list = field(default_factory=list)  # (r, h0_rank, vanished)
    first_vanishing: int | None = None
    components: list = field(default_factory=list)  # pi0 count per scale

    def to_json(self) -> dict:
        return {"scales": [{"r": r, "h0_rank": h, "vanished": v} for r, h, v in self.scales],
                "first_vanishing": self.first_vanishing}


def vr_h0_probe(base: MetricWindow, chi: Character | None, scales: Sequence[int],
                ring: RingSpec = INTEGERS) -> VRProbeReport:
    """Reduced H_0 of each chi-restricted VR window and the first scale where it vanishes.

    An empty restriction has no reduced H_0 class but is not connected either,
    so it never counts as vanished.
    """
    scales = list(scales)
    if any(a >= b for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be increasing")
    report = VRProbeReport()
    for r in scales:
        fam = VRWindow(base, r, chi).one_skeleton_family()
        if fam is None:
            report.scales.append((r, 0, False))
            report.components.append(0)
            continue
        h = reduced_homology(fam, 0, ring)
        vanished = h.is_zero
        report.scales.append((r, h.rank, vanished))
        report.components.append(pi0(fam).count)
        if vanished and report.first_vanishing is None:
            report.first_vanishing = r
    return report


@dataclass
class CofinalityReport:
    forward_scale: int  # VR_C stage sits inside VR_r for r = this
    reverse_radius: int  # VR_r stage sits inside VR_{ball(radius)}
    pairs_checked: int
    ok: bool

    def to_json(self) -> dict:
        return {"forward_scale": self.forward_scale, "reverse_radius": self.reverse_radius,
                "pairs_checked": self.pairs_checked, "ok": self.ok}


def cofinality_check(window: MetricWindow, C: Iterable) -> CofinalityReport:
    """Compare the VR_C family (x^-1 y in C or C^-1) with the word-metric VR_r family.

    The forward witness is r = max word length over C; the reverse witness is
    C' = ball(r).  Both containments are checked on every pair of the window.
    """
    G = window.group
    C = set(C)
    lengths = word_lengths(G, 2 * window.radius) if not isinstance(G, IntegerLine) else None

    def length(g) -> int:
        if lengths is None:
            return abs(g)
        if g not in lengths:
            raise WindowTooSmall("C is not contained in the doubled window ball")
        return lengths[g]

    r = max((length(c) for c in C), default=0)
    if r > window.radius:
        raise WindowTooSmall(f"window radius {window.radius} is below the diameter {r} of C")
    sym = C | {G.inverse(c) for c in C}
    pts = window.ordered
    ok, checked = True, 0
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            z = G.multiply(G.inverse(x), y)
            d = window.dist(x, y)
            if z in sym and d > r:
                ok = False
            if d <= r and length(z) > r:  # membership in ball(r)
                ok = False
            checked += 1
    return CofinalityReport(r, r, checked, ok)
