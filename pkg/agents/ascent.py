# ternary_navigator/agents/ascent.py

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from lattice.census import CORRECTION_LEDGER, ClassRecord, GenusCensus
from lattice.core import GramMatrix, I_LATTICE, A_LATTICE, J_LATTICE, ScaledLattice, k1, k2, k3
from lattice.errors import InvariantViolation, LatticeError, OutOfContractError
from lattice.isometry import Label, label, named_lattice_type
from lattice.localdata import JordanDecompOdd, jordan_odd, legendre, same_genus, unit_residue, valuation
from lattice.watson import DescentStep, lambda_primitive, two_dual_transport

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@dataclass
class FiberCounts:
    """Fiber size w, fixed-point total f, special count s and class counts h[order]."""
    w: Fraction
    f: int = 0
    s: int = 0
    h: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.h.values())

    def to_json(self) -> dict:
        return {'w': f"{self.w.numerator}/{self.w.denominator}", 'f': self.f, 's': self.s,
                'h': {str(k): v for k, v in sorted(self.h.items())}}


@dataclass
class FiberLabels:
    counts: FiberCounts
    records: list[ClassRecord]
    method: str = 'formula'
    notes: list[str] = field(default_factory=list)

    @property
    def label_multiset(self) -> Counter:
        return Counter(r.label for r in self.records)


def _exact(num: Fraction | int, den: int, what: str) -> int:
    value = Fraction(num, den)
    if value.denominator != 1 or value < 0:
        raise InvariantViolation(f"{what} = {value} is not a nonnegative integer.")
    return int(value)


def symmetry_structure(lab: Label) -> dict:
    """
    Conjugacy structure of the symmetries read off a label.

    Order 16: one central symmetry and two classes of two; order 24: one central
    symmetry and two classes of three; lower orders: every symmetry on its own.
    """
    qs = list(lab.q_values)
    counts = Counter(qs)
    if lab.group_order == 16:
        central = [q for q, n in counts.items() if n % 2 == 1]
        if len(central) != 1:
            raise OutOfContractError(f"Cannot read the symmetry classes of {lab}.")
        rest = sorted(qs)
        rest.remove(central[0])
        return {'central': central[0], 'classes': [rest[0], rest[2]]}
    if lab.group_order == 24:
        central = [q for q, n in counts.items() if n % 3 == 1]
        if len(central) != 1:
            raise OutOfContractError(f"Cannot read the symmetry classes of {lab}.")
        rest = sorted(qs)
        rest.remove(central[0])
        return {'central': central[0], 'classes': [rest[0], rest[3]]}
    return {'central': None, 'classes': qs}


class AscentAgent:
    """
    Lifts the label multiset of gen(lambda_p(L)) to gen(L) at an odd prime p using the
    fiber-size, fixed-point and class-count tables; cases outside the tables are built
    explicitly through the oracle.
    """

    def __init__(self, oracle):
        self.oracle = oracle
        logger.info("AscentAgent initialized.")

    # --- local tables --- #

    def table1_w(self, j: JordanDecompOdd) -> Fraction:
        """|Gamma_p^L(N)|, which depends on the Jordan decomposition of L_p only."""
        p, case = j.p, j.case_id
        if case is None:
            raise OutOfContractError(f"Jordan exponents {j.exponents} at p={p} are outside the ascent tables.")
        values = {
            1: Fraction(p * (p + j.e(1, 2)), 2),
            2: Fraction(p * p),
            3: Fraction(1),
            4: Fraction(p - j.e(1, 3), 2),
            5: Fraction(p),
            6: Fraction(p * (p + j.e(2, 3)), 2),
            7: Fraction(p * (p - j.e(1, 2)), 2),
            8: Fraction(p * p),
        }
        return values[case]

    def gamma_sigma_count(self, case_id: int, v: int, unit: int, j: JordanDecompOdd) -> tuple[int, bool]:
        """
        Number of fiber members fixed by a symmetry with ord_p Q_N = v and unit part `unit`,
        and whether one of them has that symmetry as its special symmetry.
        """
        p = j.p
        sq1, sq3 = j.same_class(unit, 1), j.same_class(unit, 3)
        if case_id == 1 and v == 2:
            return ((p - j.e(1, 2)) // 2 + 1, True) if sq3 else ((p + j.e(1, 2)) // 2, False)
        if case_id == 2:
            if v >= 3:
                return 1, True
            if v == 2:
                return p, False
        if case_id == 3:
            if v == 2 and sq1:
                return 1, True
            if v == 1:
                return 1, False
        if case_id == 4:
            if v == 2:
                return (j.eta(1, 3) + 1, True) if sq1 else (j.eta_prime(1, 3), False)
            if v == 1:
                return (p - j.e(1, 3)) // 2, False
        if case_id == 5:
            if v >= 3:
                return 1, False
            if v == 2:
                return 1, True
            if v == 1:
                return p, False
        if case_id == 6 and v == 2:
            return ((p - j.e(2, 3)) // 2 + 1, True) if sq1 else ((p + j.e(2, 3)) // 2, False)
        if case_id == 7:
            if v >= 3:
                return (p - j.e(1, 2)) // 2, False
            if v == 2:
                return (p * j.eta(1, 2) + 1, True) if sq1 else (p * j.eta_prime(1, 2), False)
        if case_id == 8:
            if v >= 3:
                return p, False
            if v == 2:
                return 1, True
        raise InvariantViolation(f"No fixed-point row for case {case_id}, ord_p Q = {v}, unit {unit}.")

    def _sigma(self, q_n: int, j: JordanDecompOdd) -> tuple[int, bool]:
        return self.gamma_sigma_count(j.case_id, valuation(q_n, j.p), unit_residue(q_n, j.p), j)

    def s_value(self, q_values: list[int], j: JordanDecompOdd) -> int:
        """Symmetries of N whose Q-value sits in the special slot of L_p."""
        t, idx = (j.beta, 3) if j.alpha == 0 else (2, 1)
        return sum(1 for q in q_values if valuation(q, j.p) == t and j.same_class(unit_residue(q, j.p), idx))

    def q_transport(self, case_id: int, special: bool, q_n: int, p: int) -> int:
        """Q_M(sigma) for a fiber member M, from Q_N(sigma)."""
        divide = (not special) if case_id in (1, 2) else special
        if not divide:
            return q_n
        if q_n % (p * p):
            raise InvariantViolation(f"Q-value {q_n} is not divisible by {p * p}.")
        return q_n // (p * p)

    # --- class counts --- #

    def class_counts(self, lab: Label, scale: int, j: JordanDecompOdd) -> FiberCounts:
        """
        h_{2d}(N) for N = scale * K with K of label `lab`.

        Raises:
            OutOfContractError: orders 48, and 24 at p = 3, are handled by explicit fibers.
            InvariantViolation: a count is negative or non-integral.
        """
        order, p = lab.group_order, j.p
        q_n = [scale * q for q in lab.q_values]
        w = self.table1_w(j)
        if order == 48:
            return self._class_counts_48(scale, j, w)
        if order == 24 and p == 3:
            raise OutOfContractError("Order 24 at p = 3 is resolved on the explicit fiber.")
        f = sum(self._sigma(q, j)[0] for q in q_n)
        s = self.s_value(q_n, j) if order % 8 == 0 else 0
        wi = int(w)
        if order == 2:
            h = {2: wi}
        elif order == 4:
            h = {2: _exact(wi - f, 2, 'h2'), 4: f}
        elif order == 8:
            h = {2: _exact(wi - f + 2 * s, 4, 'h2'), 4: _exact(f - 3 * s, 2, 'h4'), 8: s}
        elif order == 12:
            r = wi % 3
            h = {2: _exact(wi - f + 2 * r, 6, 'h2'), 4: _exact(f - 3 * r, 3, 'h4'), 12: r}
        elif order == 16:
            r = wi % 2
            h = {2: _exact(wi - f + 2 * s + 2 * r, 8, 'h2'), 4: _exact(f - 3 * s - 2 * r, 4, 'h4'),
                 8: _exact(s - r, 2, 'h8'), 16: r}
        elif order == 24:
            r = wi % 3
            h = {2: _exact(wi - f + 2 * s + 4 * r, 12, 'h2'), 4: _exact(f - 3 * s - 4 * r, 6, 'h4'),
                 8: _exact(s - r, 3, 'h8'), 24: r}
        else:
            raise InvariantViolation(f"Unexpected group order {order}.")
        counts = FiberCounts(w, f, s, {k: v for k, v in h.items() if v})
        self._check_weighted_sum(order, counts)
        return counts

    def _class_counts_48(self, scale: int, j: JordanDecompOdd, w: Fraction) -> FiberCounts:
        p = j.p
        if scale != p * p or j.case_id not in (1, 6):
            raise OutOfContractError(f"Order 48 with scale {scale} in case {j.case_id} needs the explicit fiber.")
        q_n = [scale] * 3 + [2 * scale] * 6
        f = sum(self._sigma(q, j)[0] for q in q_n)
        s = self.s_value(q_n, j)
        d0 = j.units[0] * j.units[1] if j.case_id == 1 else j.units[0]
        h12 = 0 if p == 3 else (1 + legendre(3 * d0, p)) // 2
        h16 = (1 + legendre(d0, p)) // 2
        h8 = _exact(s - 3 * h16, 6, 'h8')
        h4 = _exact(f - 18 * h8 - 12 * h12 - 15 * h16, 12, 'h4')
        h2 = _exact(int(w) - f + 12 * h8 + 8 * h12 + 12 * h16, 24, 'h2')
        h = {2: h2, 4: h4, 8: h8, 12: h12, 16: h16}
        counts = FiberCounts(w, f, s, {k: v for k, v in h.items() if v})
        self._check_weighted_sum(48, counts)
        return counts

    @staticmethod
    def _check_weighted_sum(order: int, counts: FiberCounts):
        weighted = sum(Fraction(order, k) * v for k, v in counts.h.items())
        if weighted != counts.w:
            raise InvariantViolation(f"Orbit sizes sum to {weighted}, fiber size is {counts.w}.")

    def appendix_counts(self, j: JordanDecompOdd, a: int, b: int, upper: GramMatrix) -> dict[int, int]:
        """Class counts at p = 3 over N = K2(a, b); h_2 is always zero there."""
        case = j.case_id
        w = self.table1_w(j)
        if case in (2, 8):
            return {4: 1, 8: 1}
        if case == 3:
            return {24: 1}
        if case == 4:
            if j.e(1, 3) == 1:
                return {24: 1}
            if b % 9 == 0 and j.same_class(unit_residue(b // 9, 3), 1):
                return {24: 2}
            return {12: 1}
        if case == 5:
            return {12: 1, 24: 1}
        if case == 7:
            in_genus = False
            if b % 9 == 0:
                try:
                    in_genus = same_genus(k2(a, b // 9), upper)
                except LatticeError:
                    in_genus = False
            if w == 3:
                return {12: 1, 24: 1} if in_genus else {8: 1}
            return {8: 1, 12: 1, 24: 1} if in_genus else {4: 1}
        raise InvariantViolation(f"Case {case} cannot occur at p = 3 with |O(N)| = 24.")

    # --- label propagation --- #

    def propagate_labels(self, lab: Label, scale: int, j: JordanDecompOdd) -> FiberLabels:
        """
        Labels of every class in the fiber over N = scale * K, K of label `lab`.

        Raises:
            OutOfContractError: for fibers that must be built explicitly.
            InvariantViolation: when the tables disagree with one another.
        """
        counts = self.class_counts(lab, scale, j)
        if lab.group_order == 48:
            return FiberLabels(counts, self._labels_48(counts, scale, j))
        p, case = j.p, j.case_id
        order = lab.group_order
        structure = symmetry_structure(lab)

        def t(q: int, special: bool) -> int:
            return self.q_transport(case, special, scale * q, p)

        out: list[Label] = []
        out += [Label(2)] * counts.h.get(2, 0)
        if order == 4:
            q = lab.q_values[0]
            fixed, special = self._sigma(scale * q, j)
            if special:
                out.append(Label(4, (t(q, True),)))
            out += [Label(4, (t(q, False),))] * (fixed - (1 if special else 0))
        elif order == 8:
            specials = 0
            for i, q in enumerate(lab.q_values):
                fixed, special = self._sigma(scale * q, j)
                others = [x for k, x in enumerate(lab.q_values) if k != i]
                if special:
                    specials += 1
                    out.append(Label(8, (t(q, True),) + tuple(t(x, False) for x in others)))
                out += [Label(4, (t(q, False),))] * _exact(fixed - counts.h.get(8, 0), 2, 'h4(sigma)')
            if specials != counts.h.get(8, 0):
                raise InvariantViolation(f"{specials} special symmetries but h8 = {counts.h.get(8, 0)}.")
        elif order == 12:
            q = lab.q_values[0]
            h12 = counts.h.get(12, 0)
            out += [Label(12, (t(q, False),) * 3)] * h12
            fixed, special = self._sigma(scale * q, j)
            h4 = _exact(fixed - h12, 1, 'h4(sigma)')
            if special and h4:
                out.append(Label(4, (t(q, True),)))
                h4 -= 1
            out += [Label(4, (t(q, False),))] * h4
        elif order == 16:
            tau = structure['central']
            h16 = counts.h.get(16, 0)
            pair_values = structure['classes']
            if h16:
                out.append(Label(16, (t(tau, True),) + tuple(t(x, False) for x in pair_values for _ in (0, 1))))
            h8_total = 0
            for qi in pair_values:
                fixed, special = self._sigma(scale * qi, j)
                h8_i = 1 if special else 0
                h8_total += h8_i
                if h8_i:
                    out.append(Label(8, (t(qi, True), t(qi, False), t(tau, False))))
                out += [Label(4, (t(qi, False),))] * _exact(fixed - 2 * h8_i - h16, 2, 'h4(sigma)')
            if h8_total != counts.h.get(8, 0):
                raise InvariantViolation(f"Order-8 classes {h8_total} differ from h8 = {counts.h.get(8, 0)}.")
            fixed_tau, _ = self._sigma(scale * tau, j)
            out += [Label(4, (t(tau, False),))] * _exact(fixed_tau - 2 * h8_total - h16, 4, 'h4(tau)')
        elif order == 24:
            tau = structure['central']
            qa, qb = structure['classes']
            h24, h8 = counts.h.get(24, 0), counts.h.get(8, 0)
            if h24:
                out.append(Label(24, (t(tau, True),) + (t(qa, False),) * 3 + (t(qb, False),) * 3))
            found8 = 0
            for qx, qy in ((qa, qb), (qb, qa)):
                fixed, special = self._sigma(scale * qx, j)
                if special:
                    found8 += 1
                    out.append(Label(8, (t(qx, True), t(qy, False), t(tau, False))))
                out += [Label(4, (t(qx, False),))] * _exact(fixed - h8 - h24, 2, 'h4(sigma)')
            if found8 != h8:
                raise InvariantViolation(f"Order-8 classes {found8} differ from h8 = {h8}.")
            fixed_tau, _ = self._sigma(scale * tau, j)
            out += [Label(4, (t(tau, False),))] * _exact(fixed_tau - 3 * h8 - h24, 6, 'h4(tau)')
        if len(out) != counts.total:
            raise InvariantViolation(f"{len(out)} labels propagated for {counts.total} classes.")
        return FiberLabels(counts, [ClassRecord(x) for x in out])

    def _labels_48(self, counts: FiberCounts, scale: int, j: JordanDecompOdd) -> list[ClassRecord]:
        p, case = j.p, j.case_id
        if case == 1:
            h16_form, h12_form = k3(1, p * p), k1(1, (p * p + 2) // 3)
            h8_form = GramMatrix.from_rows(((1, 0, 0), (0, 2, 1), (0, 1, (p * p + 1) // 2)))
        else:
            h16_form, h12_form = k3(p * p, 1), k1(p * p, (2 * p * p + 1) // 3)
            h8_form = GramMatrix.from_rows(((2, 1, 0), (1, (p * p + 1) // 2, 0), (0, 0, p * p)))
        h = counts.h
        records = [ClassRecord(label(h16_form), h16_form)] * h.get(16, 0)
        records += [ClassRecord(label(h12_form), h12_form)] * h.get(12, 0)
        records += [ClassRecord(label(h8_form), h8_form)] * h.get(8, 0)
        fixed_i, _ = self._sigma(scale, j)
        fixed_ii, _ = self._sigma(2 * scale, j)
        h4_i = _exact(fixed_i - 2 * h.get(8, 0) - 3 * h.get(16, 0), 4, 'h4(I)')
        h4_ii = _exact(fixed_ii - 2 * h.get(8, 0) - 2 * h.get(12, 0) - h.get(16, 0), 2, 'h4(II)')
        if h4_i + h4_ii != h.get(4, 0):
            raise InvariantViolation(f"h4 split {h4_i} + {h4_ii} differs from h4 = {h.get(4, 0)}.")
        records += [ClassRecord(Label(4, (self.q_transport(case, False, scale, p),)))] * h4_i
        records += [ClassRecord(Label(4, (self.q_transport(case, False, 2 * scale, p),)))] * h4_ii
        records += [ClassRecord(Label(2))] * h.get(2, 0)
        return records

    # --- explicit fibers --- #

    @staticmethod
    def reconstruct_lower(record: ClassRecord, discriminant: int) -> GramMatrix:
        """A Gram matrix for a lower class known only by label, for orders 48 and 24."""
        if record.gram is not None:
            return record.gram
        lab = record.label
        if lab.group_order == 48:
            named = {1: I_LATTICE, 4: A_LATTICE, 16: J_LATTICE}
            if discriminant in named:
                return named[discriminant]
        if lab.group_order == 24:
            structure = symmetry_structure(lab)
            qa = structure['classes'][0]
            if qa % 2 == 0:
                candidate = k2(qa // 2, structure['central'])
                if candidate.discriminant == discriminant:
                    return candidate
        raise OutOfContractError(f"No Gram matrix can be rebuilt from {lab} at discriminant {discriminant}.")

    def explicit_fiber(self, record: ClassRecord, step: DescentStep) -> FiberLabels:
        """Fiber over one lower class built by the oracle; classes carry Gram matrices."""
        k = self.reconstruct_lower(record, step.after.discriminant)
        fiber = self.oracle.gamma_fiber(ScaledLattice(k, step.scale), step.before, step.modulus)
        classes = fiber.class_counts()
        records = [ClassRecord(label(g), g) for g in classes]
        h = Counter(r.order for r in records)
        counts = FiberCounts(Fraction(fiber.size), h=dict(sorted(h.items())))
        result = FiberLabels(counts, records, method='explicit')
        j = jordan_odd(step.before, step.modulus) if step.modulus % 2 else None
        if j is not None and j.p == 3 and record.label.group_order == 24:
            structure = symmetry_structure(record.label)
            a = step.scale * structure['classes'][0] // 2
            b = step.scale * structure['central']
            if j.case_id == 7 and self.table1_w(j) == 6:
                result.notes.append(CORRECTION_LEDGER['appendix_case7_w6'])
            try:
                expected = self.appendix_counts(j, a, b, step.before)
            except LatticeError as e:
                expected = None
                result.notes.append(f"p=3 appendix counts unavailable: {e}")
            if expected is not None and expected != dict(h):
                logger.warning(f"p=3 appendix counts {expected} differ from explicit fiber {dict(h)}.")
                result.notes.append(f"p=3 appendix counts {expected} differ from explicit fiber {dict(h)}")
        return result

    def transported_counts(self, lower_type: str, step: DescentStep) -> FiberCounts:
        """
        Class counts of the fiber over pA or pJ, read off the fiber over pI.

        E over pA goes to E* over pJ by the 2-dual transport, and L over pJ goes to lambda_2(L)
        over pI. Both maps keep O(G), so the order-48 counts over pI carry over unchanged.

        Raises:
            OutOfContractError: the transported lattice does not lie over a scaling of I, or
                the counts over pI are not tabulated for it.
        """
        upper = two_dual_transport(step.before) if lower_type == 'A' else step.before
        m = lambda_primitive(upper, 2).primitive
        lam = lambda_primitive(m, step.modulus)
        if named_lattice_type(lam.primitive) != 'I':
            raise OutOfContractError(f"lambda_2 of {upper} does not lie over a scaling of I at p={step.modulus}.")
        j = jordan_odd(m, step.modulus)
        return self._class_counts_48(lam.scale, j, self.table1_w(j))

    def _check_transported(self, record: ClassRecord, step: DescentStep, fiber: FiberLabels):
        lower_type = named_lattice_type(self.reconstruct_lower(record, step.after.discriminant))
        if lower_type not in ('A', 'J'):
            return
        try:
            predicted = self.transported_counts(lower_type, step)
        except LatticeError as e:
            logger.debug(f"No transported counts over {step.modulus}{lower_type}: {e}")
            return
        if predicted.h != fiber.counts.h:
            logger.warning(f"Counts {predicted.h} carried from pI differ from the explicit fiber {fiber.counts.h}.")
            fiber.notes.append(f"order-48 counts over {step.modulus}{lower_type} carried from pI "
                               f"{predicted.h} differ from explicit fiber {fiber.counts.h}")

    # --- one ascent step --- #

    def fiber_labels(self, record: ClassRecord, step: DescentStep, j: JordanDecompOdd) -> FiberLabels:
        order = record.label.group_order
        needs_explicit = order == 48 and not (step.scale == step.modulus ** 2 and j.case_id in (1, 6)
                                              and step.after.discriminant == 1)
        if j.p == 3 and order == 24:
            needs_explicit = True
        if needs_explicit:
            fiber = self.explicit_fiber(record, step)
            if order == 48:
                self._check_transported(record, step, fiber)
            return fiber
        return self.propagate_labels(record.label, step.scale, j)

    def ascend_step(self, lower: GenusCensus, step: DescentStep) -> GenusCensus:
        """
        gen(step.before) from gen(step.after) at an odd prime.

        Raises:
            OutOfContractError: even modulus, or Jordan data outside the tables.
            InvariantViolation: inconsistent counts or masses.
        """
        if step.modulus % 2 == 0:
            raise OutOfContractError(f"Formula ascent is only available at odd primes, not m={step.modulus}.")
        j = jordan_odd(step.before, step.modulus)
        w = self.table1_w(j)
        records: list[ClassRecord] = []
        notes: list[str] = []
        for record in lower.sorted_records():
            fiber = self.fiber_labels(record, step, j)
            logger.debug(f"Fiber over {record.label} ({fiber.method}): {fiber.counts.h}.")
            records.extend(fiber.records)
            notes.extend(fiber.notes)
        census = GenusCensus(step.before.discriminant, records, method='formula',
                             notes=list(lower.notes) + notes)
        if census.mass != lower.mass * w:
            raise InvariantViolation(f"Mass {census.mass} differs from {lower.mass} * {w} after lambda_{step.modulus}.")
        logger.info(f"Ascended lambda_{step.modulus} to {step.before}: h={census.class_number}.")
        return census


# Example Usage
if __name__ == '__main__':
    from agents.oracle import GenusOracleAgent
    from lattice.watson import descend_to_stable
    agent = AscentAgent(GenusOracleAgent())
    chain = descend_to_stable(GramMatrix.diagonal(1, 1, 25))
    base = GenusCensus(1, [ClassRecord(label(I_LATTICE), I_LATTICE)], method='formula')
    print(agent.ascend_step(base, chain.steps[-1]).to_json())
