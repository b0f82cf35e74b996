"""Exact arithmetic: p-adic valuations, the ring Z[1/P] and its units.

Rationals are :class:`fractions.Fraction`; everything here is a pure
function on immutable values.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Mapping, Union

from .errors import NoWitness, NotAUnit, ParseError

RationalLike = Union[int, Fraction, str]


def as_rational(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise ParseError(f"not a rational: {x!r}") from exc
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational")


def rational_to_str(q: Fraction) -> str:
    """Serialize as ``"n/d"`` (denominator always written)."""
    q = as_rational(q)
    return f"{q.numerator}/{q.denominator}"


@functools.lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@functools.total_ordering
@dataclass(frozen=True)
class Valuation:
    """An integer, or INFINITY (the valuation of zero)."""

    value: int | None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def _key(self):
        return (1, 0) if self.value is None else (0, self.value)

    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other
        if isinstance(other, Valuation):
            return self.value == other.value
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, int):
            other = Valuation(other)
        if not isinstance(other, Valuation):
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self):
        return hash(self.value)

    def __add__(self, other: int | Valuation) -> Valuation:
        o = other.value if isinstance(other, Valuation) else other
        if self.value is None or o is None:
            return INFINITY
        return Valuation(self.value + o)

    __radd__ = __add__

    def __int__(self):
        if self.value is None:
            raise OverflowError("infinite valuation has no integer value")
        return self.value

    def __repr__(self):
        return "INFINITY" if self.value is None else f"Valuation({self.value})"

    def to_json(self):
        return "inf" if self.value is None else self.value


INFINITY = Valuation(None)


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...]

    def __post_init__(self):
        ps = tuple(int(p) for p in self.primes)
        if not ps:
            raise ValueError("a prime set must be nonempty")
        if any(not is_prime(p) for p in ps):
            raise ValueError(f"not all primes: {ps}")
        if any(a >= b for a, b in zip(ps, ps[1:])):
            raise ValueError(f"primes must be strictly increasing: {ps}")
        object.__setattr__(self, "primes", ps)

    @classmethod
    def of(cls, *primes: int) -> PrimeSet:
        return cls(tuple(sorted(set(primes))))

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __contains__(self, p):
        return p in self.primes

    def __str__(self):
        return ",".join(map(str, self.primes))


def _as_primeset(P) -> PrimeSet:
    return P if isinstance(P, PrimeSet) else PrimeSet.of(*P)


def _vp_int(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(q: RationalLike, p: int) -> Valuation:
    """Exact p-adic valuation of a rational; ``vp(0, p)`` is INFINITY."""
    q = as_rational(q)
    if q == 0:
        return INFINITY
    return Valuation(_vp_int(q.numerator, p) - _vp_int(q.denominator, p))


def _strip(n: int, P: PrimeSet) -> int:
    n = abs(n)
    for p in P:
        while n % p == 0:
            n //= p
    return n


def in_localization(q: RationalLike, P) -> bool:
    """True iff every prime factor of the denominator lies in P."""
    q = as_rational(q)
    return _strip(q.denominator, _as_primeset(P)) == 1


@dataclass(frozen=True)
class PUnit:
    """A unit of Z[1/P], written sign * prod(p ** e_p)."""

    sign: int
    exponents: tuple[int, ...]
    primes: PrimeSet

    def value(self) -> Fraction:
        q = Fraction(self.sign)
        for p, e in zip(self.primes, self.exponents):
            q *= Fraction(p) ** e
        return q


def unit_decompose(q: RationalLike, P) -> PUnit:
    q = as_rational(q)
    P = _as_primeset(P)
    if q == 0 or _strip(q.numerator, P) != 1 or _strip(q.denominator, P) != 1:
        raise NotAUnit(f"{q} is not a unit of Z[1/{{{P}}}]")
    exps = tuple(int(vp(q, p)) for p in P)
    return PUnit(1 if q > 0 else -1, exps, P)


def is_unit(q: RationalLike, P) -> bool:
    try:
        unit_decompose(q, P)
    except NotAUnit:
        return False
    return True


def _crt(residues: list[tuple[int, int]]) -> tuple[int, int]:
    x, mod = 0, 1
    for r, m in residues:
        # solve x + mod*t = r (mod m); moduli are pairwise coprime prime powers
        t = ((r - x) * pow(mod, -1, m)) % m
        x += mod * t
        mod *= m
    return x % mod, mod


def crt_approximate(targets: Mapping[int, RationalLike], m: int, P) -> Fraction:
    """Element x of Z[1/P] with vp(x - targets[p], p) >= m for every p in P.

    Clears denominators by an integer D built from the most negative target
    valuation, approximates D*target by one integer via CRT, and divides by D.
    """
    P = _as_primeset(P)
    if set(targets) != set(P.primes):
        raise ValueError("targets must be keyed by exactly the primes of P")
    alpha = {p: as_rational(targets[p]) for p in P}

    values = set(alpha.values())
    if len(values) == 1:
        (only,) = values
        if in_localization(only, P):
            return only

    finite = [vp(alpha[p], p) for p in P if alpha[p] != 0]
    if not finite:
        return Fraction(0)
    v_min = min(int(v) for v in finite)
    negative = [p for p in P if alpha[p] != 0 and vp(alpha[p], p) < 0]
    denom = prod(p ** (-v_min) for p in negative)

    residues = []
    for p in P:
        need = m + (-v_min if p in negative else 0)
        if need <= 0:
            continue
        modulus = p ** need
        scaled = alpha[p] * denom
        # vp(scaled, p) >= 0, so the denominator is invertible mod p
        r = scaled.numerator * pow(scaled.denominator, -1, modulus) % modulus
        residues.append((r, modulus))
    n, _ = _crt(residues)
    return Fraction(n, denom)


def discreteness_gap(x: RationalLike, y: RationalLike, P) -> tuple[int, Valuation]:
    """Witness prime p with vp(x - y, p) <= vp(x, p) + 1 for distinct units."""
    x, y = as_rational(x), as_rational(y)
    P = _as_primeset(P)
    if x == y:
        raise ValueError("discreteness_gap needs distinct units")
    for q in (x, y):
        unit_decompose(q, P)
    d = x - y
    for p in P:
        v = vp(d, p)
        if v <= vp(x, p) + 1:
            return p, v
    raise NoWitness(f"no prime separates {x} and {y} over {P}")
