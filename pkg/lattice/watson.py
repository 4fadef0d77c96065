# ternary_navigator/lattice/watson.py

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from sympy import Matrix as SympyMatrix, factorint
from sympy.matrices.normalforms import hermite_normal_form

from .core import GramMatrix, Matrix, ScaledLattice, IDENTITY, adjugate, columns, mat_mul
from .errors import InvalidFormError, InvariantViolation, OutOfContractError
from .localdata import valuation

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

MAX_DESCENT_STEPS = 200


# --- integer linear algebra --- #

def hermite_basis(generators: Sequence[Sequence[int]]) -> Matrix:
    """
    Hermite basis of the full-rank lattice spanned by `generators`.

    Basis vector i starts at coordinate i with a positive pivot, and the later coordinates of
    earlier vectors are reduced into [0, pivot); the basis vectors are returned as columns.
    This is the column Hermite normal form of the generators with the coordinates reversed.
    """
    flipped = SympyMatrix([[v[2 - i] for v in generators] for i in range(3)])
    w = hermite_normal_form(flipped)
    if w.cols != 3:
        raise InvalidFormError("Generators do not span a full-rank lattice.")
    return tuple(tuple(int(w[2 - i, 2 - j]) for j in range(3)) for i in range(3))


def _kernel_mod_prime(a: Sequence[Sequence[int]], q: int) -> Matrix:
    """Hermite basis of {y in Z^3 : A y = 0 mod q}."""
    m = [[x % q for x in row] for row in a]
    pivots = []
    r = 0
    for c in range(3):
        pr = next((i for i in range(r, 3) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, q)
        m[r] = [x * inv % q for x in m[r]]
        for i in range(3):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(m[i][k] - f * m[r][k]) % q for k in range(3)]
        pivots.append(c)
        r += 1
    generators = [[q if i == j else 0 for i in range(3)] for j in range(3)]
    for free in (c for c in range(3) if c not in pivots):
        v = [0, 0, 0]
        v[free] = 1
        for row, c in enumerate(pivots):
            v[c] = -m[row][free] % q
        generators.append(v)
    return hermite_basis(generators)


def _divide(a: Sequence[Sequence[int]], n: int) -> tuple:
    if any(x % n for row in a for x in row):
        raise InvariantViolation(f"Matrix is not divisible by {n}.")
    return tuple(tuple(x // n for x in row) for row in a)


def _odd_power_kernel(rows: Matrix, q: int, k: int) -> Matrix:
    """Basis of {x : G x = 0 mod q^k}, lifted one power of q at a time."""
    basis = IDENTITY
    for j in range(k):
        image = _divide(mat_mul(rows, basis), q ** j)
        basis = mat_mul(basis, _kernel_mod_prime(image, q))
    return basis


def _lambda_two_power(g: GramMatrix, k: int) -> Matrix:
    if k == 1:
        return _kernel_mod_prime((g.diagonal_entries, (0, 0, 0), (0, 0, 0)), 2)
    s = _kernel_mod_prime(g.rows, 2)
    inner = g.transform(s)
    functional = tuple(x // 2 for x in inner.diagonal_entries)
    return mat_mul(s, _kernel_mod_prime((functional, (0, 0, 0), (0, 0, 0)), 2))


def capital_lambda_basis(g: GramMatrix, m: int) -> Matrix:
    """Hermite basis (as columns) of Lambda_m(L) = {x : Q(x) = 0 and 2B(x, L) = 0 mod m}."""
    if m < 2:
        raise ValueError("Watson modulus must be at least 2.")
    factors = factorint(m)
    k = factors.pop(2, 0)
    if k > 2:
        raise OutOfContractError(f"Lambda_{m} needs 2-part at most 4.")
    basis = IDENTITY
    for q, e in sorted(factors.items()):
        current = g.transform(basis)
        basis = mat_mul(basis, _odd_power_kernel(current.rows, q, e))
    if k:
        basis = mat_mul(basis, _lambda_two_power(g.transform(basis), k))
    return hermite_basis(columns(basis))


def capital_lambda(g: GramMatrix, m: int) -> GramMatrix:
    return g.transform(capital_lambda_basis(g, m))


def lambda_primitive(g: GramMatrix, m: int) -> ScaledLattice:
    sub = capital_lambda(g, m)
    return ScaledLattice(sub.primitive(), sub.content)


def is_stable(g: GramMatrix) -> bool:
    """ord_q(d) <= 1 everywhere, and ord_2(d) = 1 exactly when G is even."""
    factors = factorint(g.discriminant)
    if any(e > 1 for e in factors.values()):
        return False
    return (factors.get(2, 0) == 1) == g.is_even


@dataclass(frozen=True)
class DescentStep:
    modulus: int
    before: GramMatrix
    after: GramMatrix
    scale: int

    def to_json(self) -> dict:
        return {'m': self.modulus, 'before': self.before.to_json(), 'after': self.after.to_json(),
                'scale': self.scale}


@dataclass
class DescentChain:
    start: GramMatrix
    steps: list[DescentStep] = field(default_factory=list)

    @property
    def terminal(self) -> GramMatrix:
        return self.steps[-1].after if self.steps else self.start

    @property
    def odd_only(self) -> bool:
        return all(step.modulus % 2 for step in self.steps)

    def to_json(self) -> dict:
        return {'start': self.start.to_json(), 'terminal': self.terminal.to_json(),
                'odd_only': self.odd_only, 'steps': [s.to_json() for s in self.steps]}


def _next_modulus(g: GramMatrix) -> int:
    factors = factorint(g.discriminant)
    odd = [q for q, e in factors.items() if q != 2 and e >= 2]
    if odd:
        return max(odd)
    ord2 = factors.get(2, 0)
    if g.is_even and ord2 >= 2:
        return 4
    if not g.is_even and ord2 >= 1:
        return 2
    raise InvariantViolation(f"No descent step applies to {g}.")


def descend_to_stable(g: GramMatrix) -> DescentChain:
    """Watson descent from the primitive part of G to a stable lattice, largest odd prime first."""
    chain = DescentChain(g.primitive())
    current = chain.start
    while not is_stable(current):
        if len(chain.steps) >= MAX_DESCENT_STEPS:
            raise InvariantViolation(f"Descent from {g} did not terminate.")
        m = _next_modulus(current)
        nxt = lambda_primitive(current, m)
        q = 2 if m == 4 else m
        if valuation(nxt.primitive.discriminant, q) >= valuation(current.discriminant, q):
            raise InvariantViolation(f"lambda_{m} did not lower ord_{q} of the discriminant of {current}.")
        logger.debug(f"Descent step lambda_{m}: {current} -> {nxt.primitive} (scale {nxt.scale})")
        chain.steps.append(DescentStep(m, current, nxt.primitive, nxt.scale))
        current = nxt.primitive
    return chain


def two_dual_transport(g: GramMatrix) -> GramMatrix:
    """
    G* with G*_q = G_q at odd q and G*_2 = 2 G_2^#, with the dual taken for the bilinear
    form 2B, realised as 4 times the Gram of L + d_odd L^#.

    Raises:
        OutOfContractError: when the result is not integral.
    """
    d = g.discriminant
    n = 2 ** valuation(d, 2)
    generators = [[n if i == j else 0 for i in range(3)] for j in range(3)] + columns(adjugate(g.rows))
    h = hermite_basis(generators)
    gram = mat_mul(mat_mul(tuple(zip(*h)), g.rows), h)
    scaled = [[Fraction(4 * x, n * n) for x in row] for row in gram]
    if any(x.denominator != 1 for row in scaled for x in row):
        raise OutOfContractError(f"2-dual transport of {g} is not integral.")
    return GramMatrix.from_rows(scaled)
