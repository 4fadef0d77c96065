# ternary_navigator/lattice/isometry.py

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Optional

from .core import (GramMatrix, Matrix, Vector, IDENTITY, columns, mat_mul, unimodular_inverse,
                   vector_gcd, k1, k2, k3, k4, I_LATTICE, A_LATTICE, J_LATTICE)
from .errors import LatticeError
from .reduction import automorphisms, canonical_form, minkowski_reduce

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

GROUP_ORDERS = (2, 4, 8, 12, 16, 24, 48)


@dataclass(frozen=True)
class Isometry:
    matrix: Matrix
    order: int


@dataclass(frozen=True)
class Symmetry:
    """Reflection tau_x in the primitive axis x; q_value is Q(x)."""
    axis: Vector
    q_value: int
    matrix: Matrix


@dataclass(frozen=True, order=True)
class Label:
    """Group order together with the sorted Q-values of all symmetries."""
    group_order: int
    q_values: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'q_values', tuple(sorted(self.q_values)))

    def scaled(self, c: int) -> "Label":
        return Label(self.group_order, tuple(c * q for q in self.q_values))

    def to_json(self) -> dict:
        return {'order': self.group_order, 'q_values': list(self.q_values)}

    @classmethod
    def from_json(cls, data: dict) -> "Label":
        return cls(int(data['order']), tuple(int(q) for q in data.get('q_values', ())))

    def __str__(self) -> str:
        if not self.q_values:
            return f"<{self.group_order}>"
        return f"<{self.group_order}; {','.join(str(q) for q in self.q_values)}>"


class FamilyMatch(NamedTuple):
    family: str
    a: int
    b: int


FAMILY_BUILDERS = {'K1': k1, 'K2': k2, 'K3': k3, 'K4': k4}


def _matrix_order(m: Matrix) -> int:
    power, n = m, 1
    while power != IDENTITY:
        power = mat_mul(power, m)
        n += 1
        if n > 12:
            raise ValueError("Matrix is not of finite order.")
    return n


def orthogonal_group(g: GramMatrix) -> list[Isometry]:
    """O(G) as integer matrices in the input basis, sorted."""
    return [Isometry(m, _matrix_order(m)) for m in automorphisms(g)]


def group_order(g: GramMatrix) -> int:
    return len(automorphisms(g))


def is_isometric(g1: GramMatrix, g2: GramMatrix) -> Optional[Matrix]:
    """A unimodular T with T^t G1 T = G2, or None when the classes differ."""
    c1, t1 = minkowski_reduce(g1)
    c2, t2 = minkowski_reduce(g2)
    if c1 != c2:
        return None
    return mat_mul(t1, unimodular_inverse(t2))


def _primitive_axis(m: Matrix) -> Vector:
    diff = tuple(tuple((1 if i == j else 0) - m[i][j] for j in range(3)) for i in range(3))
    for col in columns(diff):
        if any(col):
            g = vector_gcd(col)
            axis = tuple(c // g for c in col)
            first = next(c for c in axis if c)
            return axis if first > 0 else tuple(-c for c in axis)
    raise ValueError("Identity has no axis.")


def symmetries(g: GramMatrix) -> list[Symmetry]:
    """All reflections in O(G), sorted by (Q-value, axis)."""
    found = []
    for m in automorphisms(g):
        # an involution of trace 1 has eigenvalues 1, 1, -1
        if m[0][0] + m[1][1] + m[2][2] == 1 and mat_mul(m, m) == IDENTITY:
            axis = _primitive_axis(m)
            found.append(Symmetry(axis, g.q(axis), m))
    found.sort(key=lambda s: (s.q_value, s.axis))
    return found


def label(g: GramMatrix) -> Label:
    return Label(group_order(g), tuple(s.q_value for s in symmetries(g)))


def orthogonal_systems(g: GramMatrix) -> list[tuple[Symmetry, Symmetry, Symmetry]]:
    """Triples of symmetries with mutually orthogonal axes; empty unless 8 divides |O(G)|."""
    if group_order(g) % 8:
        return []
    syms = symmetries(g)
    return [triple for triple in combinations(syms, 3)
            if all(g.bil(s.axis, t.axis) == 0 for s, t in combinations(triple, 2))]


def symmetry_classes(g: GramMatrix) -> list[list[Symmetry]]:
    """Conjugacy classes of symmetries under O(G)."""
    group = automorphisms(g)
    syms = symmetries(g)
    by_matrix = {s.matrix: s for s in syms}
    seen, classes = set(), []
    for s in syms:
        if s.matrix in seen:
            continue
        orbit = {mat_mul(mat_mul(h, s.matrix), unimodular_inverse(h)) for h in group}
        members = sorted((by_matrix[m] for m in orbit), key=lambda t: (t.q_value, t.axis))
        seen.update(orbit)
        classes.append(members)
    return classes


def central_symmetries(g: GramMatrix) -> list[Symmetry]:
    group = automorphisms(g)
    return [s for s in symmetries(g) if all(mat_mul(s.matrix, h) == mat_mul(h, s.matrix) for h in group)]


def _family_candidates(order: int, q_values: tuple[int, ...], d: int) -> list[FamilyMatch]:
    cands = []
    qs = sorted(set(q_values))

    def add(family, a, b_num, b_den):
        if a > 0 and b_den > 0 and b_num % b_den == 0 and b_num // b_den > 0:
            cands.append(FamilyMatch(family, a, b_num // b_den))

    if order == 12:
        for q in qs:
            if q % 2 == 0:
                a = q // 2
                add('K1', a, d + 2 * a ** 3, 3 * a * a)
    elif order == 24:
        for q in qs:
            for div in (2, 6):
                if q % div == 0:
                    a = q // div
                    add('K2', a, d, 3 * a * a)
    elif order == 16:
        for q in qs:
            for div in (1, 2):
                if q % div == 0:
                    a = q // div
                    add('K3', a, d, a * a)
        for q in qs:
            for div in (2, 4):
                if q % div == 0:
                    a = q // div
                    add('K4', a, d + 4 * a ** 3, 4 * a * a)
    return cands


def recognize_family(g: GramMatrix) -> Optional[FamilyMatch]:
    """Parameters (family, a, b) with G isometric to K1..K4(a, b), when such exist."""
    lab = label(g)
    if lab.group_order == 48:
        c = g.content
        primitive = g.primitive()
        for match, base in ((FamilyMatch('K3', c, c), I_LATTICE),
                            (FamilyMatch('K4', 2 * c, 3 * c), J_LATTICE),
                            (FamilyMatch('K4', c, 2 * c), A_LATTICE)):
            if canonical_form(primitive) == canonical_form(base):
                return match
        return None
    target = canonical_form(g)
    for match in _family_candidates(lab.group_order, lab.q_values, g.discriminant):
        try:
            candidate = FAMILY_BUILDERS[match.family](match.a, match.b)
        except LatticeError:
            continue
        if canonical_form(candidate) == target:
            return match
    return None


def named_lattice_type(g: GramMatrix) -> Optional[str]:
    """'I', 'A' or 'J' when G is a scaling of the corresponding order-48 lattice."""
    primitive = g.primitive()
    for name, base in (('I', I_LATTICE), ('A', A_LATTICE), ('J', J_LATTICE)):
        if primitive.discriminant == base.discriminant and canonical_form(primitive) == canonical_form(base):
            return name
    return None
