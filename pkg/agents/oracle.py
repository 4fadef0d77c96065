# ternary_navigator/agents/oracle.py

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Optional

from lattice.census import ClassRecord, GenusCensus
from lattice.core import GramMatrix, Matrix, ScaledLattice, columns, mat_mul
from lattice.errors import BoundExceededError, InvalidFormError, LatticeError, NotPositiveDefiniteError
from lattice.isometry import label
from lattice.localdata import same_genus, valuation
from lattice.reduction import automorphisms, canonical_form, is_minkowski_reduced
from lattice.watson import capital_lambda_basis, hermite_basis

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@dataclass
class FiberMember:
    """A superlattice M of N; `basis` holds p times the basis of M in the coordinates of N."""
    gram: GramMatrix
    basis: Matrix


@dataclass
class FiberCensus:
    lower: GramMatrix
    modulus: int
    members: list[FiberMember] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)

    def class_counts(self) -> dict[GramMatrix, int]:
        counts: dict[GramMatrix, int] = {}
        for member in self.members:
            key = canonical_form(member.gram)
            counts[key] = counts.get(key, 0) + 1
        return dict(sorted(counts.items(), key=lambda item: item[0].entries))

    def counts_by_order(self) -> dict[int, int]:
        """Number of distinct classes in the fiber per orthogonal group order."""
        out: dict[int, int] = {}
        for gram in self.class_counts():
            order = len(automorphisms(gram))
            out[order] = out.get(order, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {'lower': self.lower.to_json(), 'm': self.modulus, 'size': self.size,
                'classes': [{'gram': g.to_json(), 'count': n, 'label': label(g).to_json()}
                            for g, n in self.class_counts().items()]}


def _subspaces(p: int, k: int) -> Iterable[list[tuple[int, int, int]]]:
    """Every k-dimensional subspace of F_p^3, as the rows of its reduced echelon form."""
    for pivots in combinations(range(3), k):
        slots = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, 3) if c not in pivots]
        for values in product(range(p), repeat=len(slots)):
            rows = [[0, 0, 0] for _ in range(k)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(slots, values):
                rows[r][c] = v
            yield [tuple(r) for r in rows]


def _quotient_prime(m: int) -> int:
    return 2 if m in (2, 4) else m


class GenusOracleAgent:
    """
    Brute-force genus enumeration over Minkowski-reduced forms, and explicit
    construction of Watson fibers; the reference every formula result is checked against.
    """

    def __init__(self, max_disc: int = 100000, threads: int = 1):
        self.max_disc = max_disc
        self.threads = max(1, threads)
        logger.info("GenusOracleAgent initialized.")

    # --- genus enumeration --- #

    def _reduced_for_a11(self, d: int, a11: int, accept: Callable[[GramMatrix], bool]) -> list[GramMatrix]:
        found = {}
        a22 = a11
        while a11 * a22 * a22 <= 2 * d:
            for a12 in range(0, a11 // 2 + 1):
                minor = a11 * a22 - a12 * a12
                if minor <= 0:
                    continue
                for a13 in range(0, a11 // 2 + 1):
                    for a23 in range(-(a22 // 2), a22 // 2 + 1):
                        num = d + a11 * a23 * a23 - 2 * a12 * a13 * a23 + a22 * a13 * a13
                        if num % minor:
                            continue
                        a33 = num // minor
                        if a33 < a22 or a11 * a22 * a33 > 2 * d:
                            continue
                        try:
                            g = GramMatrix(a11, a22, a33, a23, a13, a12)
                        except NotPositiveDefiniteError:
                            continue
                        if not is_minkowski_reduced(g) or not accept(g):
                            continue
                        key = canonical_form(g)
                        found[key.entries] = key
            a22 += 1
        return list(found.values())

    def reduced_forms(self, d: int, accept: Optional[Callable[[GramMatrix], bool]] = None) -> list[GramMatrix]:
        """
        Canonical representatives of every class of discriminant d passing `accept`, sorted.

        Raises:
            BoundExceededError: when d is above the configured bound.
        """
        if d > self.max_disc:
            raise BoundExceededError(f"Discriminant {d} exceeds the enumeration bound {self.max_disc}.")
        accept = accept or (lambda g: True)
        a11_values = [a for a in range(1, d + 1) if a ** 3 <= 2 * d]
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                chunks = list(pool.map(lambda a: self._reduced_for_a11(d, a, accept), a11_values))
        else:
            chunks = [self._reduced_for_a11(d, a, accept) for a in a11_values]
        classes = {}
        for chunk in chunks:
            for form in chunk:
                classes[form.entries] = form
        return [form for _, form in sorted(classes.items())]

    def enumerate_genus(self, g: GramMatrix) -> GenusCensus:
        """
        Every isometry class of gen(G), each once, in canonical form with its label.

        Raises:
            BoundExceededError: when disc(G) is above the configured bound.
        """
        d = g.discriminant
        content, even = g.content, g.is_even
        logger.info(f"Enumerating genus of {g} (d={d}) with {self.threads} thread(s).")

        def in_genus(form: GramMatrix) -> bool:
            return form.content == content and form.is_even == even and same_genus(form, g)

        records = [ClassRecord(label(form), form) for form in self.reduced_forms(d, in_genus)]
        census = GenusCensus(d, records, method='oracle')
        logger.info(f"Genus of {g}: {census.class_number} classes, mass {census.mass}.")
        return census

    def genus_representatives(self, d: int, accept: Optional[Callable[[GramMatrix], bool]] = None) -> list[GramMatrix]:
        """One form per genus among the classes of discriminant d passing `accept`."""
        reps: list[GramMatrix] = []
        for form in self.reduced_forms(d, accept):
            if not any(form.content == r.content and form.is_even == r.is_even and same_genus(form, r)
                       for r in reps):
                reps.append(form)
        return reps

    # --- Watson fibers --- #

    def gamma_fiber(self, lower: ScaledLattice, upper: GramMatrix, m: int) -> FiberCensus:
        """All M in gen(upper) with Lambda_m(M) equal to the lattice N = lower.gram, as superlattices of N."""
        n = lower.gram
        p = _quotient_prime(m)
        gap = valuation(n.discriminant, p) - valuation(upper.discriminant, p)
        if gap <= 0 or gap % 2:
            raise InvalidFormError(f"No fiber of index p^k from {n} into the genus of {upper}.")
        k = gap // 2
        census = FiberCensus(n, m)
        identity_p = tuple(tuple(p if i == j else 0 for j in range(3)) for i in range(3))
        seen = set()
        for rows in _subspaces(p, k):
            generators = [[p if i == j else 0 for i in range(3)] for j in range(3)] + [list(r) for r in rows]
            basis = hermite_basis(generators)
            if basis in seen:
                continue
            seen.add(basis)
            raw = mat_mul(mat_mul(tuple(zip(*basis)), n.rows), basis)
            if any(x % (p * p) for row in raw for x in row):
                continue
            try:
                gram = GramMatrix.from_rows([[x // (p * p) for x in row] for row in raw])
            except LatticeError:
                continue
            if not same_genus(gram, upper):
                continue
            try:
                sub = capital_lambda_basis(gram, m)
            except LatticeError:
                continue
            if hermite_basis(columns(mat_mul(basis, sub))) != identity_p:
                continue
            census.members.append(FiberMember(gram, basis))
        logger.debug(f"Fiber of {n} under lambda_{m}: {census.size} members.")
        return census

    def fixed_members(self, fiber: FiberCensus, sigma: Matrix) -> list[FiberMember]:
        """Members M of the fiber with sigma(M) = M, for sigma in O(N) given in the coordinates of N."""
        out = []
        for member in fiber.members:
            if hermite_basis(columns(mat_mul(sigma, member.basis))) == member.basis:
                out.append(member)
        return out

    def fiber_orbits(self, fiber: FiberCensus) -> list[list[FiberMember]]:
        """Orbits of O(N) on the fiber; members of one orbit are isometric."""
        group = automorphisms(fiber.lower)
        index = {member.basis: member for member in fiber.members}
        seen, orbits = set(), []
        for member in fiber.members:
            if member.basis in seen:
                continue
            orbit = {hermite_basis(columns(mat_mul(s, member.basis))) for s in group}
            seen.update(orbit)
            orbits.append([index[b] for b in sorted(orbit) if b in index])
        return orbits

    def constructive_ascend(self, lower: GenusCensus, scale: int, upper: GramMatrix, m: int) -> GenusCensus:
        """
        gen(upper) assembled from the fibers over every class of the lower genus.

        Requires a Gram matrix on every lower record.
        """
        if not lower.complete_grams:
            raise InvalidFormError("Constructive ascent needs explicit lower classes.")
        def fiber_of(record: ClassRecord) -> FiberCensus:
            return self.gamma_fiber(ScaledLattice(record.gram, scale), upper, m)

        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                fibers = list(pool.map(fiber_of, lower.records))
        else:
            fibers = [fiber_of(record) for record in lower.records]
        classes: dict[tuple, GramMatrix] = {}
        for fiber in fibers:
            for gram in fiber.class_counts():
                classes[gram.entries] = gram
        records = [ClassRecord(label(g), g) for _, g in sorted(classes.items())]
        census = GenusCensus(upper.discriminant, records, method='constructive')
        logger.info(f"Constructive ascent to {upper}: {census.class_number} classes.")
        return census

    def mass_check(self, census: GenusCensus, expected: Fraction) -> bool:
        """Whether the sum of 1/|O(M)| over the census equals the expected mass exactly."""
        if census.mass != expected:
            logger.warning(f"Census mass {census.mass} differs from the expected {expected}.")
            return False
        logger.debug(f"Census mass {census.mass} checked.")
        return True


# Example Usage
if __name__ == '__main__':
    oracle = GenusOracleAgent()
    census = oracle.enumerate_genus(GramMatrix.diagonal(1, 1, 25))
    for record in census.records:
        print(record.gram, record.label)
