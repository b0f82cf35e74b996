"""Slow, independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools
from fractions import Fraction


# -- Baumslag-Solitar: rewrite to a fixpoint --------------------------------------------

def bs_naive_normal_form(m: int, n: int, letters) -> tuple:
    """Normal form by naive string rewriting.

    ``letters`` is an iterable of 'a', 'A', 't', 'T'.  Rules are applied to
    the leftmost match until none applies: free cancellation, pinch removal,
    and pushing a-powers to the right through t (residue mod |n|) or T
    (residue mod |m|).  The word is stored as a list of syllables.
    """
    word: list = []  # ('a', k) or ('t', +-1)
    for x in letters:
        if x in "aA":
            word.append(("a", 1 if x == "a" else -1))
        else:
            word.append(("t", 1 if x == "t" else -1))
    changed = True
    while changed:
        changed = False
        # merge adjacent a-syllables and drop a^0
        out: list = []
        for s in word:
            if s[0] == "a" and out and out[-1][0] == "a":
                out[-1] = ("a", out[-1][1] + s[1])
            else:
                out.append(s)
        word = [s for s in out if s != ("a", 0)]
        for i, s in enumerate(word):
            if s[0] != "t":
                continue
            # free cancellation t T / T t
            if i + 1 < len(word) and word[i + 1] == ("t", -s[1]):
                word = word[:i] + word[i + 2:]
                changed = True
                break
            # pinch
            if i + 2 < len(word) and word[i + 1][0] == "a" and word[i + 2] == ("t", -s[1]):
                k = word[i + 1][1]
                if s[1] == 1 and k % m == 0:
                    word = word[:i] + [("a", k // m * n)] + word[i + 3:]
                    changed = True
                    break
                if s[1] == -1 and k % n == 0:
                    word = word[:i] + [("a", k // n * m)] + word[i + 3:]
                    changed = True
                    break
            # push the a-power in front of this t
            if i > 0 and word[i - 1][0] == "a":
                k = word[i - 1][1]
                d = n if s[1] == 1 else m
                r = k % abs(d)
                if r != k:
                    q = (k - r) // d
                    moved = q * (m if s[1] == 1 else n)
                    word = word[:i - 1] + [("a", r), s, ("a", moved)] + word[i + 1:]
                    changed = True
                    break
    out = [0]
    for s in word:
        if s[0] == "a":
            out[-1] += s[1]
        else:
            out += [s[1], 0]
    return tuple(out)


def bs_word_letters(g: tuple) -> list[str]:
    """Letters of a normal-form tuple."""
    out = []
    for i, x in enumerate(g):
        if i % 2 == 0:
            out += ["a" if x > 0 else "A"] * abs(x)
        else:
            out.append("t" if x == 1 else "T")
    return out


def bs_affine(m: int, n: int, letters) -> tuple[Fraction, Fraction]:
    """Image in the affine group x -> s*x + b (a: x+1, t: x*n/m)."""
    s, b = Fraction(1), Fraction(0)
    ratio = Fraction(n, m)
    for x in letters:
        if x == "a":
            s, b = s, b + s
        elif x == "A":
            s, b = s, b - s
        elif x == "t":
            s = s * ratio
        else:
            s = s / ratio
    return s, b


def bs_ball_bruteforce(m: int, n: int, radius: int) -> set:
    """All words of length <= radius, normalized by the rewriting oracle."""
    out = set()
    for k in range(radius + 1):
        for w in itertools.product("aAtT", repeat=k):
            out.add(bs_naive_normal_form(m, n, w))
    return out


# -- arithmetic ---------------------------------------------------------------------------

def valuation_bruteforce(q: Fraction, p: int):
    if q == 0:
        return None
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def crt_search(targets: dict, m: int, primes, num_bound: int, exp_bound: int) -> list[Fraction]:
    """Every x = N / prod p^e with |N| <= num_bound, e <= exp_bound meeting the precision."""
    hits = []
    for exps in itertools.product(range(exp_bound + 1), repeat=len(primes)):
        den = 1
        for p, e in zip(primes, exps):
            den *= p ** e
        for N in range(-num_bound, num_bound + 1):
            x = Fraction(N, den)
            ok = True
            for p in primes:
                v = valuation_bruteforce(x - targets[p], p)
                if v is not None and v < m:
                    ok = False
                    break
            if ok:
                hits.append(x)
    return hits


# -- matrices -------------------------------------------------------------------------------

def matmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def matinv(A):
    """Gauss-Jordan inverse over Q."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


# -- graphs -----------------------------------------------------------------------------------

def bfs_components(nodes, adjacent) -> int:
    nodes = list(nodes)
    seen = set()
    count = 0
    for s in nodes:
        if s in seen:
            continue
        count += 1
        stack = [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            for y in nodes:
                if y not in seen and adjacent(x, y):
                    seen.add(y)
                    stack.append(y)
    return count
