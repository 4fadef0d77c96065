# ternary_navigator/lattice/core.py

import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from sympy import Matrix as SympyMatrix

from .errors import HalfIntegralFormError, InvalidFormError, NotPositiveDefiniteError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

Vector = tuple[int, int, int]
Matrix = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

IDENTITY: Matrix = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


# --- 3x3 integer matrix helpers --- #

def mat_mul(x: Sequence[Sequence], y: Sequence[Sequence]) -> tuple:
    """Product of two 3x3 matrices (integer or Fraction entries)."""
    return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def transpose(x: Sequence[Sequence]) -> tuple:
    return tuple(tuple(x[j][i] for j in range(3)) for i in range(3))


def det3(x: Sequence[Sequence[int]]) -> int:
    return int(SympyMatrix(x).det())


def adjugate(x: Sequence[Sequence[int]]) -> Matrix:
    """Classical adjoint, so that x * adjugate(x) = det(x) * I."""
    adj = SympyMatrix(x).adjugate()
    return tuple(tuple(int(adj[i, j]) for j in range(3)) for i in range(3))


def unimodular_inverse(x: Sequence[Sequence[int]]) -> Matrix:
    """Inverse of an integer matrix of determinant +-1."""
    d = det3(x)
    if d not in (1, -1):
        raise ValueError(f"Matrix is not unimodular (det={d}).")
    adj = adjugate(x)
    return tuple(tuple(d * adj[i][j] for j in range(3)) for i in range(3))


def random_unimodular(rng: random.Random, steps: int = 6) -> Matrix:
    """Product of `steps` transvections, each adding k times one column to another, |k| <= 2."""
    t = IDENTITY
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        k = rng.choice((-2, -1, 1, 2))
        e = tuple(tuple(k if (r, c) == (i, j) else int(r == c) for c in range(3)) for r in range(3))
        t = mat_mul(t, e)
    return t


def mat_vec(x: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(x[i][k] * v[k] for k in range(3)) for i in range(3))


def columns(x: Sequence[Sequence]) -> list[tuple]:
    return [tuple(x[i][j] for i in range(3)) for j in range(3)]


def from_columns(cols: Sequence[Sequence]) -> tuple:
    return tuple(tuple(cols[j][i] for j in range(3)) for i in range(3))


def gram_of_basis(rows: Sequence[Sequence], basis_columns: Sequence[Sequence]) -> tuple:
    """Gram matrix (rational or integral) of the vectors `basis_columns` under the form `rows`."""
    t = from_columns(basis_columns)
    return mat_mul(mat_mul(transpose(t), rows), t)


def vector_gcd(v: Iterable[int]) -> int:
    g = 0
    for c in v:
        g = gcd(g, c)
    return g


# --- Gram matrices --- #

@dataclass(frozen=True)
class GramMatrix:
    """
    Positive definite, classically integral ternary Gram matrix.

    Stored as the six independent entries in the order (a11, a22, a33, a23, a13, a12),
    so that Q(x) = sum a_ii x_i^2 + 2 * sum_{i<j} a_ij x_i x_j.
    """
    a11: int
    a22: int
    a33: int
    a23: int
    a13: int
    a12: int

    def __post_init__(self):
        for value in self.entries:
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidFormError(f"Gram entries must be integers, got {value!r}.")
        if self.a11 <= 0 or self.a11 * self.a22 - self.a12 * self.a12 <= 0 or self.discriminant <= 0:
            raise NotPositiveDefiniteError(f"Form {self.entries} is not positive definite.")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "GramMatrix":
        """Builds a GramMatrix from a symmetric 3x3 array; Fractions must be integral."""
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise InvalidFormError("A Gram matrix must be 3x3.")
        for i in range(3):
            for j in range(3):
                if rows[i][j] != rows[j][i]:
                    raise InvalidFormError(f"Gram matrix is not symmetric at ({i}, {j}).")
        values = []
        for i, j in ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)):
            value = rows[i][j]
            if isinstance(value, Fraction):
                if value.denominator == 2:
                    raise HalfIntegralFormError(f"Entry ({i}, {j}) = {value} is half-integral.")
                if value.denominator != 1:
                    raise InvalidFormError(f"Entry ({i}, {j}) = {value} is not an integer.")
                value = value.numerator
            values.append(value)
        return cls(*values)

    @classmethod
    def diagonal(cls, a: int, b: int, c: int) -> "GramMatrix":
        return cls(a, b, c, 0, 0, 0)

    @property
    def entries(self) -> tuple[int, ...]:
        return (self.a11, self.a22, self.a33, self.a23, self.a13, self.a12)

    @property
    def diagonal_entries(self) -> tuple[int, int, int]:
        return (self.a11, self.a22, self.a33)

    @property
    def rows(self) -> Matrix:
        return ((self.a11, self.a12, self.a13),
                (self.a12, self.a22, self.a23),
                (self.a13, self.a23, self.a33))

    @property
    def discriminant(self) -> int:
        # det G, expanded
        return (self.a11 * self.a22 * self.a33 + 2 * self.a12 * self.a13 * self.a23
                - self.a11 * self.a23 ** 2 - self.a22 * self.a13 ** 2 - self.a33 * self.a12 ** 2)

    @property
    def content(self) -> int:
        return vector_gcd(self.entries)

    @property
    def is_even(self) -> bool:
        return self.a11 % 2 == 0 and self.a22 % 2 == 0 and self.a33 % 2 == 0

    def q(self, x: Sequence[int]) -> int:
        return self.bil(x, x)

    def bil(self, x: Sequence[int], y: Sequence[int]) -> int:
        r = self.rows
        return sum(x[i] * r[i][j] * y[j] for i in range(3) for j in range(3))

    def transform(self, t: Sequence[Sequence[int]]) -> "GramMatrix":
        """Gram matrix in the basis given by the columns of `t` (T^t G T)."""
        return GramMatrix.from_rows(mat_mul(mat_mul(transpose(t), self.rows), t))

    def scaled(self, c: int) -> "GramMatrix":
        return GramMatrix(*(c * v for v in self.entries))

    def primitive(self) -> "GramMatrix":
        c = self.content
        return GramMatrix(*(v // c for v in self.entries))

    def to_json(self) -> list[int]:
        return list(self.entries)

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.entries)


@dataclass(frozen=True)
class ScaledLattice:
    """A primitive Gram matrix together with the factor its quadratic map was divided by."""
    primitive: GramMatrix
    scale: int

    @property
    def gram(self) -> GramMatrix:
        return self.primitive.scaled(self.scale)


def discriminant(g: GramMatrix) -> int:
    return g.discriminant


def parse_form(text: str | Sequence) -> GramMatrix:
    """
    Parses a form given as six integers "a11 a22 a33 a23 a13 a12" or as a JSON 3x3 array.

    Raises:
        InvalidFormError: Malformed input.
        HalfIntegralFormError: Entries with denominator 2.
        NotPositiveDefiniteError: Indefinite or degenerate input.
    """
    if isinstance(text, GramMatrix):
        return text
    if isinstance(text, (list, tuple)):
        data = text
    else:
        stripped = text.strip()
        if stripped.startswith('['):
            try:
                data = json.loads(stripped)
            except json.JSONDecodeError as e:
                raise InvalidFormError(f"Could not parse JSON form: {e}") from e
        else:
            data = stripped.replace(',', ' ').split()
    if len(data) == 3 and all(isinstance(r, (list, tuple)) for r in data):
        rows = [[_parse_entry(v) for v in r] for r in data]
        return GramMatrix.from_rows(rows)
    if len(data) == 6:
        values = [_parse_entry(v) for v in data]
        a11, a22, a33, a23, a13, a12 = values
        return GramMatrix.from_rows(((a11, a12, a13), (a12, a22, a23), (a13, a23, a33)))
    raise InvalidFormError("Expected six integers or a 3x3 JSON array.")


def _parse_entry(value) -> Fraction:
    if isinstance(value, bool):
        raise InvalidFormError(f"Invalid entry {value!r}.")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != int(value) and value * 2 == int(value * 2):
            raise HalfIntegralFormError(f"Entry {value} is half-integral.")
        if value != int(value):
            raise InvalidFormError(f"Entry {value} is not an integer.")
        return Fraction(int(value))
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidFormError(f"Invalid entry {value!r}.") from e


# --- Named lattices --- #

I_LATTICE = GramMatrix.diagonal(1, 1, 1)
A_LATTICE = GramMatrix.from_rows(((2, 1, 0), (1, 2, 1), (0, 1, 2)))
J_LATTICE = GramMatrix.from_rows(((3, -1, -1), (-1, 3, -1), (-1, -1, 3)))
A_PLANE = ((2, 1), (1, 2))
H_PLANE = ((0, 1), (1, 0))


def k1(a: int, b: int) -> GramMatrix:
    return GramMatrix.from_rows(((2 * a, -a, -a), (-a, 2 * a, 0), (-a, 0, b)))


def k2(a: int, b: int) -> GramMatrix:
    return GramMatrix.from_rows(((2 * a, -a, 0), (-a, 2 * a, 0), (0, 0, b)))


def k3(a: int, b: int) -> GramMatrix:
    return GramMatrix.diagonal(a, a, b)


def k4(a: int, b: int) -> GramMatrix:
    return GramMatrix.from_rows(((2 * a, 0, -a), (0, 2 * a, -a), (-a, -a, b)))


def m_plane(b: int) -> GramMatrix:
    """The plane A_PLANE orthogonally summed with <b>."""
    return GramMatrix.from_rows(((2, 1, 0), (1, 2, 0), (0, 0, b)))


def m1(a: int, b: int, c: int) -> GramMatrix:
    return GramMatrix.diagonal(a, b, c)


def m2(a: int, b: int, c: int) -> GramMatrix:
    if (b + c) % 2:
        raise InvalidFormError(f"M2({a}, {b}, {c}) needs b and c of equal parity.")
    return GramMatrix.from_rows(((a, 0, 0), (0, (b + c) // 2, (b - c) // 2), (0, (b - c) // 2, (b + c) // 2)))


def m3(a: int, b: int, c: int) -> GramMatrix:
    if (a + b + c) % 2:
        raise InvalidFormError(f"M3({a}, {b}, {c}) needs a + b + c even.")
    return GramMatrix.from_rows(((2 * a, 0, a), (0, 2 * b, b), (a, b, (a + b + c) // 2)))


def m4(a: int, b: int, c: int) -> GramMatrix:
    return GramMatrix.from_rows(((4 * a, 2 * a, 2 * a), (2 * a, a + b, a), (2 * a, a, a + c)))


def k_family(n: int) -> GramMatrix:
    """K(n), presented as [[2,0,-7^n],[0,2,-7^n],[-7^n,-7^n,7^(2n+1)]]; isometric to k4(1, 6*49^n + 1)."""
    s = 7 ** n
    return GramMatrix.from_rows(((2, 0, -s), (0, 2, -s), (-s, -s, 7 * s * s)))


NAMED_LATTICES = {
    'I': I_LATTICE,
    'A': A_LATTICE,
    'J': J_LATTICE,
}
