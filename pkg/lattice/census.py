# ternary_navigator/lattice/census.py

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import GramMatrix
from .isometry import Label

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def fraction_text(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ClassRecord:
    """One isometry class of a genus; the Gram is known for explicitly constructed classes only."""
    label: Label
    gram: Optional[GramMatrix] = None

    @property
    def order(self) -> int:
        return self.label.group_order


@dataclass
class GenusCensus:
    discriminant: int
    records: list[ClassRecord] = field(default_factory=list)
    method: str = 'oracle'
    notes: list[str] = field(default_factory=list)

    @property
    def class_number(self) -> int:
        return len(self.records)

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, r.order) for r in self.records), Fraction(0))

    @property
    def label_multiset(self) -> Counter:
        return Counter(r.label for r in self.records)

    @property
    def counts_by_order(self) -> dict[int, int]:
        return dict(sorted(Counter(r.order for r in self.records).items()))

    @property
    def complete_grams(self) -> bool:
        return all(r.gram is not None for r in self.records)

    def sorted_records(self) -> list[ClassRecord]:
        return sorted(self.records, key=lambda r: (r.label, r.gram.entries if r.gram else ()))

    def to_json(self) -> dict:
        grouped = Counter((r.gram.entries if r.gram else None, r.label) for r in self.records)
        classes = []
        for (entries, lab), count in sorted(grouped.items(), key=lambda item: (item[0][1], item[0][0] or ())):
            classes.append({'gram': list(entries) if entries else None, 'order': lab.group_order,
                            'label': lab.to_json(), 'count': count})
        return {'discriminant': self.discriminant, 'class_number': self.class_number,
                'mass': fraction_text(self.mass), 'method': self.method, 'classes': classes,
                'counts_by_order': {str(k): v for k, v in self.counts_by_order.items()},
                'notes': list(self.notes)}


def labels_to_json(multiset: Counter) -> list[dict]:
    return [{'label': str(lab), 'order': lab.group_order, 'q_values': list(lab.q_values), 'count': n}
            for lab, n in sorted(multiset.items())]


# Places where a printed formula is read non-literally; surfaced in reports when triggered.
CORRECTION_LEDGER = {
    'k4_family_h2_denominator': "h2 of the K4-type prime family uses denominator 16, not the printed 18",
    'k4_family_h_11_19': "class number of the K4-type prime family at p = 11, 19 mod 24 is (p^2+4p+11)/16, not (p^2+6p+11)/16",
    'even_order8_congruences': "even order-8 triples read as a = 2 mod 4 and bc = 3 mod 4",
    'order8_phi_signs': "three-argument phi takes 1 - (-x/q) at anisotropic and 1 + (-x/q) at isotropic primes, "
                        "as the one-argument phi does; the printed signs are swapped",
    'order8_explicit_fallback': "b_8 from the local sums differs from the explicit order-8 classes; the explicit count is used",
    'appendix_case7_w6': "p=3, case 7, w=6: local form resolved on the explicit fiber",
    'table_gap': "2-adic class missing from the representation table; genus taken from the oracle",
}
