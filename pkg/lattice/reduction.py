# ternary_navigator/lattice/reduction.py

"""
Exact reduction theory for positive definite ternary forms.

All reduced bases are found greedily: the first vector is any minimal vector, the
second any shortest vector extending it to a primitive pair, the third any shortest
completion to a basis. The set of such bases only depends on the lattice, so the
lexicographically least Gram tuple over it is a class invariant (the canonical form),
and two greedy bases with the same Gram differ by an isometry.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import floor, ceil, isqrt

from .core import (GramMatrix, Matrix, Vector, IDENTITY, columns, from_columns, mat_mul,
                   unimodular_inverse, vector_gcd)
from .errors import InvariantViolation

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def short_vectors(g: GramMatrix, bound: int) -> list[tuple[Vector, int]]:
    """
    All nonzero integer vectors x with Q(x) <= bound, sorted by (value, coordinates).

    Uses the exact completion of squares a11*Q = (a11 x1 + a12 x2 + a13 x3)^2 + binary(x2, x3),
    so every bound is an integer square root and no floating point is involved.
    """
    if bound < 1:
        return []
    a11, a22, a33, a23, a13, a12 = g.entries
    m2 = a11 * a22 - a12 * a12
    e = a11 * a23 - a12 * a13
    f = a11 * a33 - a13 * a13
    d = g.discriminant
    found = []
    x3_max = isqrt(bound * m2 // d)
    for x3 in range(-x3_max, x3_max + 1):
        disc2 = (e * x3) ** 2 - m2 * (f * x3 * x3 - a11 * bound)
        if disc2 < 0:
            continue
        s = isqrt(disc2)
        for x2 in range((-e * x3 - s - 1) // m2, (-e * x3 + s + 1) // m2 + 2):
            if m2 * x2 * x2 + 2 * e * x2 * x3 + f * x3 * x3 > a11 * bound:
                continue
            g1 = a12 * x2 + a13 * x3
            rest = a22 * x2 * x2 + a33 * x3 * x3 + 2 * a23 * x2 * x3
            disc1 = g1 * g1 - a11 * (rest - bound)
            if disc1 < 0:
                continue
            s1 = isqrt(disc1)
            for x1 in range((-g1 - s1 - 1) // a11, (-g1 + s1 + 1) // a11 + 2):
                value = a11 * x1 * x1 + 2 * g1 * x1 + rest
                if 0 < value <= bound:
                    found.append(((x1, x2, x3), value))
    found.sort(key=lambda item: (item[1], item[0]))
    return found


def representation_count(t: int, g: GramMatrix) -> int:
    """r(t, G): number of integer vectors x with Q(x) = t."""
    if t < 0:
        return 0
    if t == 0:
        return 1
    return sum(1 for _, value in short_vectors(g, t) if value == t)


def _round_div(num: int, den: int) -> int:
    return (2 * num + den) // (2 * den)


def size_reduce(g: GramMatrix) -> tuple[GramMatrix, Matrix]:
    """Pairwise size reduction until 2|B(b_i, b_j)| <= Q(b_i) for all i != j; basis sorted by norm."""
    basis = [list(c) for c in columns(IDENTITY)]
    changed = True
    while changed:
        changed = False
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                qi = g.q(basis[i])
                b = g.bil(basis[i], basis[j])
                if 2 * abs(b) > qi:
                    r = _round_div(b, qi)
                    basis[j] = [basis[j][k] - r * basis[i][k] for k in range(3)]
                    changed = True
    basis.sort(key=lambda v: (g.q(v), [-c for c in v]))
    t = from_columns(basis)
    return g.transform(t), t


def _cross(u: Vector, v: Vector) -> Vector:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _dual_unit(c: Vector) -> Vector:
    """An integer vector w with c . w = 1 (c primitive)."""
    g01, x0, x1 = _ext_gcd(c[0], c[1])
    g, u, x2 = _ext_gcd(g01, c[2])
    if g != 1:
        raise InvariantViolation(f"Vector {c} is not primitive.")
    return (u * x0, u * x1, x2)


def _third_vectors(g: GramMatrix, v1: Vector, v2: Vector) -> list[Vector]:
    """Shortest vectors completing (v1, v2) to a basis, both signs."""
    w = _dual_unit(_cross(v1, v2))
    a, b, c = g.q(v1), g.bil(v1, v2), g.q(v2)
    b1, b2 = g.bil(w, v1), g.bil(w, v2)
    qw = g.q(w)
    det2 = a * c - b * b

    def value(x: int, y: int) -> int:
        return qw + 2 * x * b1 + 2 * y * b2 + a * x * x + 2 * b * x * y + c * y * y

    x0 = Fraction(-b1 * c + b * b2, det2)
    y0 = Fraction(-a * b2 + b * b1, det2)
    f_min = qw + 2 * x0 * b1 + 2 * y0 * b2 + a * x0 * x0 + 2 * b * x0 * y0 + c * y0 * y0
    slack = value(round(x0), round(y0)) - f_min
    y_span = isqrt(floor(a * slack / det2)) + 1
    x_span = isqrt(floor(slack / a)) + 1
    best, points = None, []
    for y in range(floor(y0) - y_span, ceil(y0) + y_span + 1):
        xc = x0 - Fraction(b, a) * (y - y0)
        for x in range(floor(xc) - x_span, ceil(xc) + x_span + 1):
            v = value(x, y)
            if best is None or v < best:
                best, points = v, [(x, y)]
            elif v == best:
                points.append((x, y))
    out = []
    for x, y in points:
        vec = tuple(w[k] + x * v1[k] + y * v2[k] for k in range(3))
        out.append(vec)
        out.append(tuple(-t for t in vec))
    return out


def greedy_bases(g: GramMatrix) -> list[Matrix]:
    """Every Minkowski-reduced basis of G, as matrices whose columns are the basis vectors."""
    g0, t0 = size_reduce(g)
    bound = sorted((g0.a11, g0.a22, g0.a33))[1]
    while True:
        vectors = short_vectors(g0, bound)
        lam1 = vectors[0][1]
        minimal = [v for v, value in vectors if value == lam1]
        pairs, complete = [], True
        for v1 in minimal:
            best, found = None, []
            for v2, value in vectors:
                if best is not None and value > best:
                    break
                if vector_gcd(_cross(v1, v2)) != 1:
                    continue
                best = value
                found.append(v2)
            if not found:
                complete = False
                break
            pairs.extend((v1, v2) for v2 in found)
        if complete:
            break
        bound *= 2
        logger.debug(f"Enlarging reduction search bound to {bound}.")
    bases = []
    for v1, v2 in pairs:
        for v3 in _third_vectors(g0, v1, v2):
            bases.append(mat_mul(t0, from_columns((v1, v2, v3))))
    return bases


def _gram_tuple(g: GramMatrix, basis: Matrix) -> tuple[int, ...]:
    b1, b2, b3 = columns(basis)
    return (g.q(b1), g.q(b2), g.q(b3), g.bil(b2, b3), g.bil(b1, b3), g.bil(b1, b2))


@lru_cache(maxsize=8192)
def _reduction_data(g: GramMatrix) -> tuple[tuple[int, ...], Matrix, tuple[Matrix, ...]]:
    scored = [(_gram_tuple(g, basis), basis) for basis in greedy_bases(g)]
    best = min(t for t, _ in scored)
    winners = [basis for t, basis in scored if t == best]
    chosen = max(winners, key=lambda basis: tuple(c for col in columns(basis) for c in col))
    inverse = unimodular_inverse(chosen)
    group = sorted({mat_mul(basis, inverse) for basis in winners})
    return best, chosen, tuple(group)


def minkowski_reduce(g: GramMatrix) -> tuple[GramMatrix, Matrix]:
    """
    Canonical Minkowski-reduced form of G and a unimodular T with T^t G T equal to it.

    The canonical form is the least Gram tuple (a11, a22, a33, a23, a13, a12) over all
    reduced bases; among bases realising it the lexicographically largest is returned,
    so an already reduced diagonal form comes back with the identity transform.
    """
    best, chosen, _ = _reduction_data(g)
    return GramMatrix(*best), chosen


def canonical_form(g: GramMatrix) -> GramMatrix:
    return GramMatrix(*_reduction_data(g)[0])


def automorphisms(g: GramMatrix) -> tuple[Matrix, ...]:
    """All integer matrices S with S^t G S = G, sorted."""
    return _reduction_data(g)[2]


def successive_minima(g: GramMatrix) -> tuple[int, int, int]:
    reduced = canonical_form(g)
    return reduced.a11, reduced.a22, reduced.a33


def is_minkowski_reduced(g: GramMatrix) -> bool:
    """The finite set of ternary Minkowski conditions."""
    a11, a22, a33, a23, a13, a12 = g.entries
    if not (a11 <= a22 <= a33):
        return False
    if 2 * abs(a12) > a11 or 2 * abs(a13) > a11 or 2 * abs(a23) > a22:
        return False
    for s1 in (-1, 0, 1):
        for s2 in (-1, 0, 1):
            if g.q((s1, s2, 1)) < a33:
                return False
    return True
