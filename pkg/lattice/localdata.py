# ternary_navigator/lattice/localdata.py

"""
Local (p-adic) invariants of ternary lattices.

Diagonalizations are carried out exactly with Fractions whose denominators are
prime to p, i.e. inside the localization Z_(p); no p-adic precision is ever truncated.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional, Sequence

from sympy import factorint, isprime, legendre_symbol

from .core import GramMatrix, mat_vec
from .errors import InvalidFormError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

INFINITY = 'inf'

# (u mod 8) -> epsilon(u), omega(u) for 2-adic units
_EPSILON = {1: 0, 3: 1, 5: 0, 7: 1}
_OMEGA = {1: 0, 3: 1, 5: 1, 7: 0}

# Jordan exponents (alpha, beta) -> case number of the ascent tables
TABLE_CASES = ((0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))


def valuation(n, p: int) -> int:
    """p-adic valuation of a nonzero integer or Fraction."""
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    if n == 0:
        raise ValueError("Valuation of zero is infinite.")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def unit_residue(x, p: int, modulus: Optional[int] = None) -> int:
    """Residue of the unit part of x modulo `modulus` (default p)."""
    modulus = modulus or p
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
    while den % p == 0:
        den //= p
    return num * pow(den, -1, modulus) % modulus


def legendre(a: int, p: int) -> int:
    if p == 2 or not isprime(p):
        raise ValueError(f"{p} is not an odd prime.")
    return legendre_symbol(a % p, p)


def _as_integer(a) -> int:
    a = Fraction(a)
    if a == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments.")
    return a.numerator * a.denominator


def hilbert(a, b, place) -> int:
    """Hilbert symbol (a, b)_v for nonzero rationals; place is a prime or INFINITY."""
    a, b = _as_integer(a), _as_integer(b)
    if place == INFINITY:
        return -1 if a < 0 and b < 0 else 1
    p = place
    alpha, beta = valuation(a, p), valuation(b, p)
    u, v = a // p ** alpha, b // p ** beta
    if p == 2:
        u8, v8 = u % 8, v % 8
        e = _EPSILON[u8] * _EPSILON[v8] + alpha * _OMEGA[v8] + beta * _OMEGA[u8]
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u, p) ** beta * legendre(v, p) ** alpha


def rational_diagonal(g: GramMatrix) -> tuple[Fraction, Fraction, Fraction]:
    """Diagonal of the LDL^t decomposition: ratios of leading principal minors."""
    d1 = g.a11
    d2 = g.a11 * g.a22 - g.a12 * g.a12
    d3 = g.discriminant
    return Fraction(d1), Fraction(d2, d1), Fraction(d3, d2)


def hasse_symbol(g: GramMatrix, place) -> int:
    """Hasse symbol with the product over i <= j of (a_i, a_j) on a rational diagonalization."""
    diag = rational_diagonal(g)
    result = 1
    for i in range(3):
        for j in range(i, 3):
            result *= hilbert(diag[i], diag[j], place)
    return result


def is_anisotropic(g: GramMatrix, place) -> bool:
    """<a1, a2, a3> is isotropic iff (-a1 a3, -a2 a3) = 1."""
    a1, a2, a3 = rational_diagonal(g)
    return hilbert(-a1 * a3, -a2 * a3, place) == -1


def _bil(rows, x, y):
    return sum(x[i] * rows[i][j] * y[j] for i in range(3) for j in range(3))


# --- odd primes --- #

def _diagonalize_local(rows: Sequence[Sequence], p: int) -> list[Fraction]:
    """Exact Z_(p)-diagonalization for odd p; returns the three diagonal entries."""
    basis = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    active = [0, 1, 2]
    diagonal = []
    while active:
        best = None
        for i in active:
            for j in active:
                if j < i:
                    continue
                value = _bil(rows, basis[i], basis[j])
                if value == 0:
                    continue
                key = (valuation(value, p), 0 if i == j else 1)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            raise InvalidFormError("Degenerate form in local diagonalization.")
        _, i, j = best
        if i != j:
            basis[i] = [basis[i][k] + basis[j][k] for k in range(3)]
        pivot = _bil(rows, basis[i], basis[i])
        for k in active:
            if k != i:
                c = _bil(rows, basis[k], basis[i]) / pivot
                basis[k] = [basis[k][t] - c * basis[i][t] for t in range(3)]
        diagonal.append(pivot)
        active.remove(i)
    return diagonal


@dataclass(frozen=True)
class JordanDecompOdd:
    """
    Jordan invariants <eps1, p^alpha eps2, p^beta eps3> at an odd prime.

    `exponents` are the raw valuations (sorted) and `units` the unit residues mod p in
    the same order; alpha and beta are measured from the smallest exponent.
    """
    p: int
    exponents: tuple[int, int, int]
    units: tuple[int, int, int]

    @property
    def alpha(self) -> int:
        return self.exponents[1] - self.exponents[0]

    @property
    def beta(self) -> int:
        return self.exponents[2] - self.exponents[0]

    @property
    def case_id(self) -> Optional[int]:
        a, b = self.alpha, min(self.beta, 3)
        if a >= 3:
            return 8
        try:
            return TABLE_CASES.index((a, b)) + 1
        except ValueError:
            return None

    def eps(self, i: int) -> int:
        """Legendre class of eps_i (1-based)."""
        return legendre(self.units[i - 1], self.p)

    def e(self, i: int, j: int) -> int:
        return legendre(-self.units[i - 1] * self.units[j - 1], self.p)

    def eta(self, i: int, j: int) -> int:
        return (1 + legendre(self.units[i - 1] * self.units[j - 1], self.p)) // 2

    def eta_prime(self, i: int, j: int) -> int:
        return (1 - legendre(self.units[i - 1] * self.units[j - 1], self.p)) // 2

    def same_class(self, unit, i: int) -> bool:
        """Whether the unit `unit` lies in the square class of eps_i."""
        return legendre(unit_residue(unit, self.p) * self.units[i - 1], self.p) == 1

    def component_symbol(self) -> tuple[tuple[int, int, int], ...]:
        """(exponent, dimension, Legendre class of the component determinant) per component."""
        out = []
        for exponent in sorted(set(self.exponents)):
            idx = [k for k in range(3) if self.exponents[k] == exponent]
            det = 1
            for k in idx:
                det *= self.units[k]
            out.append((exponent, len(idx), legendre(det, self.p)))
        return tuple(out)


def jordan_odd(g: GramMatrix, p: int) -> JordanDecompOdd:
    if p == 2:
        raise ValueError("jordan_odd needs an odd prime.")
    diagonal = _diagonalize_local(g.rows, p)
    entries = sorted(((valuation(x, p), unit_residue(x, p)) for x in diagonal), key=lambda t: t[0])
    return JordanDecompOdd(p, tuple(e for e, _ in entries), tuple(u for _, u in entries))


def _rep_odd(forms: list[tuple[int, int]], v: int, w: int, p: int) -> bool:
    """Whether p^v * w (w a unit residue) is represented by the diagonal form sum p^a u x^2."""
    m = min(a for a, _ in forms)
    if v < m:
        return False
    forms = [(a - m, u) for a, u in forms]
    v -= m
    units = [u for a, u in forms if a == 0]
    rest = [(a, u) for a, u in forms if a > 0]
    if len(units) >= 3:
        return True
    if len(units) == 2 and (legendre(-units[0] * units[1], p) == 1 or v == 0):
        return True
    if len(units) == 1 and v == 0 and legendre(w * units[0], p) == 1:
        return True
    return _rep_odd([(2, u) for u in units] + rest, v, w, p)


# --- the prime 2 --- #

def _two_adic_blocks(rows: Sequence[Sequence]) -> list[tuple[int, tuple]]:
    """Jordan splitting over Z_(2) into 1x1 and even 2x2 blocks: list of (scale exponent, unit block)."""
    basis = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    active = [0, 1, 2]
    blocks = []
    while active:
        best = None
        for i in active:
            for j in active:
                if j < i:
                    continue
                value = _bil(rows, basis[i], basis[j])
                if value == 0:
                    continue
                key = (valuation(value, 2), 0 if i == j else 1)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            raise InvalidFormError("Degenerate form in 2-adic splitting.")
        (v, off), i, j = best
        if not off:
            pivot = _bil(rows, basis[i], basis[i])
            for k in active:
                if k != i:
                    c = _bil(rows, basis[k], basis[i]) / pivot
                    basis[k] = [basis[k][t] - c * basis[i][t] for t in range(3)]
            blocks.append((v, ((pivot / 2 ** v,),)))
            active.remove(i)
            continue
        a = _bil(rows, basis[i], basis[i])
        b = _bil(rows, basis[i], basis[j])
        c = _bil(rows, basis[j], basis[j])
        det = a * c - b * b
        for k in active:
            if k in (i, j):
                continue
            r1 = _bil(rows, basis[k], basis[i])
            r2 = _bil(rows, basis[k], basis[j])
            c1 = (c * r1 - b * r2) / det
            c2 = (a * r2 - b * r1) / det
            basis[k] = [basis[k][t] - c1 * basis[i][t] - c2 * basis[j][t] for t in range(3)]
        scale = Fraction(2 ** v)
        blocks.append((v, ((a / scale, b / scale), (b / scale, c / scale))))
        active.remove(i)
        active.remove(j)
    return blocks


def _is_unit2(x: Fraction) -> bool:
    return x.numerator % 2 == 1


def _odd_unimodular_diagonal(gram: list[list[Fraction]]) -> list[Fraction]:
    """Diagonalize an odd unimodular Z_(2)-form so that each complement stays odd."""
    n = len(gram)
    if n == 1:
        return [gram[0][0]]

    def form(x, y):
        return sum(x[i] * gram[i][j] * y[j] for i in range(n) for j in range(n))

    for x in product((0, 1), repeat=n):
        if not any(x) or not _is_unit2(form(x, x)):
            continue
        pivot_index = x.index(1)
        basis = [list(x)] + [[int(i == k) for i in range(n)] for k in range(n) if k != pivot_index]
        qx = form(basis[0], basis[0])
        rest = []
        for vec in basis[1:]:
            c = form(vec, basis[0]) / qx
            rest.append([vec[t] - c * basis[0][t] for t in range(n)])
        complement = [[form(u, w) for w in rest] for u in rest]
        if len(complement) == 1 or any(_is_unit2(complement[k][k]) for k in range(len(complement))):
            return [qx] + _odd_unimodular_diagonal(complement)
    raise InvalidFormError("Could not diagonalize an odd unimodular 2-adic form.")


def _constituents(g: GramMatrix) -> list[list[int]]:
    """Jordan constituents [scale exponent, dim, sign, type (1 odd / 0 even), oddity]."""
    grouped: dict[int, list[tuple]] = {}
    for v, block in _two_adic_blocks(g.rows):
        grouped.setdefault(v, []).append(block)
    out = []
    for v in sorted(grouped):
        blocks = grouped[v]
        dim = sum(len(b) for b in blocks)
        gram = [[Fraction(0)] * dim for _ in range(dim)]
        offset = 0
        for b in blocks:
            for i in range(len(b)):
                for j in range(len(b)):
                    gram[offset + i][offset + j] = b[i][j]
            offset += len(b)
        odd = any(len(b) == 1 for b in blocks)
        det = Fraction(1)
        if odd:
            diagonal = _odd_unimodular_diagonal(gram)
            for x in diagonal:
                det *= x
            oddity = sum(unit_residue(x, 2, 8) for x in diagonal) % 8
        else:
            for b in blocks:
                det *= b[0][0] * b[1][1] - b[0][1] * b[1][0]
            oddity = 0
        sign = 1 if unit_residue(det, 2, 8) in (1, 7) else -1
        out.append([v, dim, sign, 1 if odd else 0, oddity])
    return out


def two_adic_symbol(g: GramMatrix) -> tuple[tuple[int, ...], ...]:
    """
    Canonical 2-adic symbol.

    Oddities are fused per compartment (maximal runs of consecutive odd constituents)
    and signs are walked towards the front of each train, each walk adding 4 to the
    oddity of the compartments it touches.
    """
    symbol = _constituents(g)
    compartments = []
    i = 0
    while i < len(symbol):
        if symbol[i][3] == 1:
            run = [i]
            while i + 1 < len(symbol) and symbol[i + 1][3] == 1 and symbol[i + 1][0] == symbol[i][0] + 1:
                i += 1
                run.append(i)
            compartments.append(run)
        i += 1
    for run in compartments:
        total = sum(symbol[k][4] for k in run) % 8
        for k in run:
            symbol[k][4] = 0
        symbol[run[0]][4] = total

    trains = [[0]] if symbol else []
    for i in range(1, len(symbol)):
        prev, cur = symbol[i - 1], symbol[i]
        gap = cur[0] - prev[0]
        joined = (gap == 1 and (prev[3] or cur[3])) or (gap == 2 and prev[3] and cur[3])
        if joined:
            trains[-1].append(i)
        else:
            trains.append([i])
    for train in trains:
        for idx in reversed(train[1:]):
            if symbol[idx][2] == -1:
                symbol[idx][2] = 1
                symbol[idx - 1][2] *= -1
                for run in compartments:
                    if idx in run or idx - 1 in run:
                        symbol[run[0]][4] = (symbol[run[0]][4] + 4) % 8
    return tuple(tuple(c) for c in symbol)


def _rep_two_primitive(g: GramMatrix, t: int) -> bool:
    """Primitive representation of t over Z_2 by lifting residues until Hensel applies."""
    depth = 2 * valuation(g.discriminant, 2) + 3
    level = [(0, 0, 0)]
    for k in range(1, depth + 1):
        modulus = 2 ** k
        step = 2 ** (k - 1)
        nxt = []
        for x in level:
            for dx in product((0, 1), repeat=3):
                y = tuple(x[i] + dx[i] * step for i in range(3))
                if k == 1 and not any(y):
                    continue
                if (g.q(y) - t) % modulus:
                    continue
                nxt.append(y)
        for y in nxt:
            image = [c % modulus for c in mat_vec(g.rows, y)]
            known = [valuation(c, 2) for c in image if c]
            if known and 2 * min(known) + 3 <= k:
                return True
        if not nxt:
            return False
        level = nxt
    return False


def local_represents(g: GramMatrix, p: int, t: int) -> bool:
    """Whether t > 0 is represented by G over Z_p."""
    if t <= 0:
        raise ValueError("Only positive targets are supported.")
    if p == 2:
        while True:
            if _rep_two_primitive(g, t):
                return True
            if t % 4:
                return False
            t //= 4
    j = jordan_odd(g, p)
    forms = list(zip(j.exponents, j.units))
    return _rep_odd(forms, valuation(t, p), unit_residue(t, p), p)


def genus_represents(g: GramMatrix, t: int) -> bool:
    """Whether t is represented by the genus of G (all primes dividing 2 * disc * t)."""
    primes = set(factorint(2 * g.discriminant * t))
    return all(local_represents(g, p, t) for p in sorted(primes))


# --- genus --- #

@dataclass(frozen=True)
class GenusDescriptor:
    discriminant: int
    odd_symbols: tuple
    two_adic: tuple
    hasse: tuple


@lru_cache(maxsize=16384)
def genus_symbol(g: GramMatrix) -> GenusDescriptor:
    d = g.discriminant
    primes = sorted(factorint(d))
    odd = tuple((p, jordan_odd(g, p).component_symbol()) for p in primes if p != 2)
    hasse = tuple((p, hasse_symbol(g, p)) for p in sorted(set(primes) | {2}))
    return GenusDescriptor(d, odd, two_adic_symbol(g), hasse)


def same_genus(g1: GramMatrix, g2: GramMatrix) -> bool:
    if g1.discriminant != g2.discriminant:
        return False
    return genus_symbol(g1) == genus_symbol(g2)
