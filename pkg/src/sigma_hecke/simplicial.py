"""Free simplicial sets EX and finite windows of translate families.

A k-simplex of EX is any (k+1)-tuple of vertices.  A translate family is a
finite list of vertex sets S_1..S_t; it stands for the simplicial subset
EX[S_1] u ... u EX[S_t], so a tuple is a simplex iff its vertex set lies in
one part.  Simplices are generated on demand, never stored.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import CannotFaceVertex, IndexOutOfRange, NotSimplicialMap

Vertex = Hashable
Simplex = tuple
Chain = dict  # Simplex -> nonzero coefficient


def vertex_key(v: Vertex):
    """Deterministic sort key for opaque vertex tokens."""
    return repr(v)


# -- face and degeneracy maps -------------------------------------------------

def face(sigma: Simplex, i: int) -> Simplex:
    if len(sigma) == 1:
        raise CannotFaceVertex("a 0-simplex has no faces in EX")
    if not 0 <= i < len(sigma):
        raise IndexOutOfRange(f"face index {i} out of range for dimension {len(sigma) - 1}")
    return sigma[:i] + sigma[i + 1:]


def degeneracy(sigma: Simplex, i: int) -> Simplex:
    if not 0 <= i < len(sigma):
        raise IndexOutOfRange(f"degeneracy index {i} out of range for dimension {len(sigma) - 1}")
    return sigma[:i + 1] + sigma[i:]


def is_nondegenerate(sigma: Simplex) -> bool:
    return all(a != b for a, b in zip(sigma, sigma[1:]))


# -- formal chains --------------------------------------------------------------

def chain_add(target: Chain, sigma: Simplex, coeff) -> None:
    c = target.get(sigma, 0) + coeff
    if c:
        target[sigma] = c
    else:
        target.pop(sigma, None)


def boundary(chain: Mapping[Simplex, Any], normalized: bool = False) -> Chain:
    """Alternating face sum.  ``normalized`` drops degenerate faces.

    Vertices have empty boundary here; the augmentation is handled by
    :func:`augmentation`.
    """
    out: Chain = {}
    for sigma, coeff in chain.items():
        if len(sigma) == 1:
            continue
        for i in range(len(sigma)):
            tau = sigma[:i] + sigma[i + 1:]
            if normalized and not is_nondegenerate(tau):
                continue
            chain_add(out, tau, coeff if i % 2 == 0 else -coeff)
    return out


def augmentation(chain: Mapping[Simplex, Any]):
    return sum(c for s, c in chain.items() if len(s) == 1)


def cone(x: Vertex, chain: Mapping[Simplex, Any]) -> Chain:
    """Prepend x to every simplex: [x, c]."""
    out: Chain = {}
    for sigma, coeff in chain.items():
        chain_add(out, (x,) + tuple(sigma), coeff)
    return out


def cone_boundary_degree0(x: Vertex, chain: Mapping[Simplex, Any]) -> Chain:
    """d[x, c] for a 0-chain c, namely c - eps(c)*(x)."""
    out: Chain = dict(chain)
    chain_add(out, (x,), -augmentation(chain))
    return out


# -- translate families ------------------------------------------------------------

@dataclass(frozen=True)
class TranslateFamily:
    """Finite window of a union of free simplicial sets EX[S_i]."""

    parts: tuple[frozenset, ...]
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts)
        if any(not p for p in parts):
            raise ValueError("translate family parts must be nonempty")
        object.__setattr__(self, "parts", parts)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(parts):
                raise ValueError("one label per part expected")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, *parts: Iterable[Vertex]) -> TranslateFamily:
        return cls(tuple(frozenset(p) for p in parts))

    def __len__(self):
        return len(self.parts)

    @cached_property
    def vertices(self) -> frozenset:
        return frozenset().union(*self.parts)

    @cached_property
    def _parts_of(self) -> dict:
        index: dict = {}
        for i, part in enumerate(self.parts):
            for v in part:
                index.setdefault(v, []).append(i)
        return index

    @cached_property
    def _sorted_parts(self) -> tuple[tuple, ...]:
        return tuple(tuple(sorted(p, key=vertex_key)) for p in self.parts)

    def part_containing(self, vertex_set: Iterable[Vertex]) -> int | None:
        """Index of the first part containing every given vertex, else None."""
        vs = set(vertex_set)
        if not vs:
            return 0 if self.parts else None
        pivot = min(vs, key=lambda v: len(self._parts_of.get(v, ())))
        for i in self._parts_of.get(pivot, ()):
            if vs <= self.parts[i]:
                return i
        return None

    def contains_set(self, vertex_set: Iterable[Vertex]) -> bool:
        return self.part_containing(vertex_set) is not None

    def simplices(self, k: int) -> list[Simplex]:
        """Nondegenerate k-simplices, deduplicated, in deterministic order."""
        seen: set = set()
        out: list = []
        for part in self._sorted_parts:
            for sigma in _nondegenerate_tuples(part, k):
                if sigma not in seen:
                    seen.add(sigma)
                    out.append(sigma)
        return out

    def all_tuples(self, k: int) -> list[Simplex]:
        """All k-simplices including degenerate ones (small windows only)."""
        seen: set = set()
        out: list = []
        for part in self._sorted_parts:
            for sigma in itertools.product(part, repeat=k + 1):
                if sigma not in seen:
                    seen.add(sigma)
                    out.append(sigma)
        return out

    def is_subfamily_of(self, other: TranslateFamily) -> bool:
        return all(other.contains_set(p) for p in self.parts)

    def to_json(self, token: Callable[[Vertex], Any] = str) -> dict:
        return {
            "parts": [[token(v) for v in sorted(p, key=vertex_key)] for p in self.parts],
            "labels": [None if lab is None else token(lab) for lab in self.labels]
            if self.labels is not None else [],
        }

    @classmethod
    def from_json(cls, data: Mapping, parse: Callable[[Any], Vertex] = lambda x: x) -> TranslateFamily:
        parts = tuple(frozenset(parse(v) for v in p) for p in data["parts"])
        labels = data.get("labels") or None
        if labels is not None:
            labels = tuple(None if lab is None else parse(lab) for lab in labels)
        return cls(parts, labels)


def _nondegenerate_tuples(vertices: Sequence[Vertex], k: int) -> Iterator[Simplex]:
    if k == 0:
        for v in vertices:
            yield (v,)
        return
    for prefix in _nondegenerate_tuples(vertices, k - 1):
        last = prefix[-1]
        for v in vertices:
            if v != last:
                yield prefix + (v,)


def contains(family: TranslateFamily, sigma: Simplex) -> bool:
    return family.contains_set(sigma)


# -- connected components ------------------------------------------------------------

class UnionFind:
    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass(frozen=True)
class Components:
    count: int
    # part indices per component, each sorted; components ordered by first part
    members: tuple[tuple[int, ...], ...]

    @property
    def representatives(self) -> tuple[int, ...]:
        return tuple(m[0] for m in self.members)


def pi0(family: TranslateFamily) -> Components:
    """Components of the union: parts sharing a vertex are glued."""
    uf = UnionFind(range(len(family.parts)))
    first_part: dict = {}
    for i, part in enumerate(family.parts):
        for v in part:
            j = first_part.setdefault(v, i)
            if j != i:
                uf.union(i, j)
    members = sorted(tuple(sorted(g)) for g in uf.groups())
    return Components(len(members), tuple(members))


# -- simplicial homotopies --------------------------------------------------------------

@dataclass(frozen=True)
class HomotopyCheck:
    ok: bool
    simplex: Simplex | None = None
    index: int | None = None
    mixed: Simplex | None = None


def mixed_tuple(f: Mapping, g: Mapping, sigma: Simplex, i: int) -> Simplex:
    """(f(x_0),...,f(x_i), g(x_i),...,g(x_k)): the prism simplex at index i."""
    return tuple(f[x] for x in sigma[:i + 1]) + tuple(g[x] for x in sigma[i:])


def _check_simplicial(name: str, f: Mapping, domain: TranslateFamily, codomain: TranslateFamily):
    for part in domain.parts:
        missing = [v for v in part if v not in f]
        if missing:
            raise NotSimplicialMap(f"{name} is undefined at {missing[0]!r}")
        if not codomain.contains_set(f[v] for v in part):
            raise NotSimplicialMap(f"{name} sends a part of the domain outside the codomain")


def homotopy_check(f: Mapping, g: Mapping, domain: TranslateFamily, codomain: TranslateFamily,
                   max_dim: int = 3) -> HomotopyCheck:
    """Does the unique candidate simplicial homotopy from f to g land in codomain?

    Every prism simplex over a simplex with vertex set in a part S has its
    vertices in f(S) u g(S), and the simplex (s_1..s_m, s_1..s_m) realizes
    that whole set, so testing f(S) u g(S) per part is exact.  On failure the
    lowest-dimensional failing simplex (up to ``max_dim``) is reported.
    """
    _check_simplicial("f", f, domain, codomain)
    _check_simplicial("g", g, domain, codomain)
    for part, ordered in zip(domain.parts, domain._sorted_parts):
        image = {f[v] for v in part} | {g[v] for v in part}
        if codomain.contains_set(image):
            continue
        for k in range(0, max(max_dim, 0) + 1):
            for sigma in _nondegenerate_tuples(ordered, k):
                for i in range(k + 1):
                    mixed = mixed_tuple(f, g, sigma, i)
                    if not codomain.contains_set(mixed):
                        return HomotopyCheck(False, sigma, i, mixed)
        doubled = ordered + ordered if len(ordered) > 1 else ordered
        i = len(ordered) - 1
        return HomotopyCheck(False, doubled, i, mixed_tuple(f, g, doubled, i))
    return HomotopyCheck(True)
