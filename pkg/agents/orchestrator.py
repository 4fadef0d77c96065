# ternary_navigator/agents/orchestrator.py

import logging
import time
from fractions import Fraction
from typing import Callable, Optional

from config import NavigatorSettings
from lattice.census import CORRECTION_LEDGER, GenusCensus, fraction_text, labels_to_json
from lattice.core import GramMatrix, parse_form
from lattice.errors import (BoundExceededError, InvalidFormError, InvariantViolation,
                            NotStableError, OutOfContractError, TableGapError)
from lattice.isometry import (label, named_lattice_type, orthogonal_systems, recognize_family, symmetries,
                              symmetry_classes)
from lattice.localdata import jordan_odd
from lattice.reduction import canonical_form, successive_minima
from lattice.watson import DescentChain, DescentStep, descend_to_stable, is_stable, lambda_primitive

from .ascent import AscentAgent
from .oracle import GenusOracleAgent
from .reporter import ReporterAgent
from .stable import StableGenusAgent
from .verifier import VerifierAgent

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# errors the formula path may raise before the oracle takes over
FALLBACK_ERRORS = (OutOfContractError, InvariantViolation, TableGapError)


class OrchestratorAgent:
    """
    Holds the worker agents and runs the descend / census / ascend pipeline.
    """

    def __init__(self, settings: Optional[NavigatorSettings] = None):
        logger.info("Initializing OrchestratorAgent...")
        self.settings = settings or NavigatorSettings()
        self.oracle = GenusOracleAgent(self.settings.max_disc, self.settings.threads)
        self.stable = StableGenusAgent()
        self.ascent = AscentAgent(self.oracle)
        self.reporter = ReporterAgent()
        self.verifier = VerifierAgent(self)
        logger.info("OrchestratorAgent initialized with worker agents.")

    # --- pipeline --- #

    def expected_mass(self, chain: DescentChain) -> Optional[Fraction]:
        """
        Mass of gen(chain.start): the stable mass times the fiber size of every odd step.
        None when an even step or Jordan data outside the tables leaves it undetermined.
        """
        mass = self.stable.mass(chain.terminal)
        for step in chain.steps:
            if step.modulus % 2 == 0:
                return None
            try:
                mass *= self.ascent.table1_w(jordan_odd(step.before, step.modulus))
            except OutOfContractError:
                return None
        return mass

    def _require_mass(self, census: GenusCensus, expected: Optional[Fraction], genus: GramMatrix):
        if expected is not None and not self.oracle.mass_check(census, expected):
            raise InvariantViolation(f"Mass {census.mass} of the genus of {genus} differs from {expected}.")

    def stable_census(self, k: GramMatrix, force_oracle: bool = False, force_formula: bool = False) -> GenusCensus:
        if force_oracle:
            census = self.oracle.enumerate_genus(k)
            self._require_mass(census, self.stable.mass(k), k)
            return census
        try:
            return self.stable.census(k)
        except FALLBACK_ERRORS as e:
            if force_formula:
                raise
            logger.warning(f"Stable formula path aborted for {k}: {e}. Falling back to the oracle.")
            census = self.oracle.enumerate_genus(k)
            self._require_mass(census, self.stable.mass(k), k)
            census.notes.append(f"stable genus of {k} taken from the oracle: {e}")
            if isinstance(e, TableGapError):
                census.notes.append(CORRECTION_LEDGER['table_gap'])
            return census

    def ascend(self, lower: GenusCensus, step: DescentStep, force_formula: bool = False) -> tuple[GenusCensus, str]:
        """One ascent step: formulas at odd primes, the oracle otherwise or when the formulas refuse."""
        try:
            if step.modulus % 2 == 0:
                raise OutOfContractError(f"No formula ascent for m={step.modulus}.")
            census = self.ascent.ascend_step(lower, step)
            return census, 'formula'
        except FALLBACK_ERRORS as e:
            if force_formula:
                raise
            logger.warning(f"Formula ascent for lambda_{step.modulus} aborted: {e}. Falling back to the oracle.")
            reason = f"lambda_{step.modulus} from the oracle: {e}"
        if lower.complete_grams:
            census = self.oracle.constructive_ascend(lower, step.scale, step.before, step.modulus)
            method = 'constructive'
        else:
            census = self.oracle.enumerate_genus(step.before)
            method = 'oracle'
        census.notes = list(lower.notes) + [reason]
        if step.modulus % 2:
            try:
                w = self.ascent.table1_w(jordan_odd(step.before, step.modulus))
            except OutOfContractError as e:
                logger.debug(f"Mass of the genus of {step.before} unchecked: {e}")
            else:
                self._require_mass(census, lower.mass * w, step.before)
        return census, method

    def class_number(self, g: GramMatrix, force_oracle: Optional[bool] = None,
                     force_formula: Optional[bool] = None) -> dict:
        """
        Class number and label multiset of gen(G) with a record of every step.

        Raises:
            LatticeError: propagated from the formula path when force_formula is set,
                or from the oracle when a bound is exceeded.
        """
        force_oracle = self.settings.force_oracle if force_oracle is None else force_oracle
        force_formula = self.settings.force_formula if force_formula is None else force_formula
        timings = {}
        t0 = time.perf_counter()
        chain = descend_to_stable(g)
        timings['descent'] = time.perf_counter() - t0
        steps = []
        if force_oracle:
            t0 = time.perf_counter()
            census = self.oracle.enumerate_genus(chain.start)
            self._require_mass(census, self.expected_mass(chain), chain.start)
            timings['oracle'] = time.perf_counter() - t0
            steps.append({'stage': 'genus', 'method': 'oracle', 'h': census.class_number})
        else:
            t0 = time.perf_counter()
            census = self.stable_census(chain.terminal, force_formula=force_formula)
            timings['stable'] = time.perf_counter() - t0
            steps.append({'stage': 'stable', 'method': census.method, 'h': census.class_number})
            for step in reversed(chain.steps):
                t0 = time.perf_counter()
                census, method = self.ascend(census, step, force_formula)
                timings[f"lambda_{step.modulus}@{step.before}"] = time.perf_counter() - t0
                steps.append({'stage': f"lambda_{step.modulus}", 'method': method, 'h': census.class_number})
        content = g.content
        labels = {lab.scaled(content): n for lab, n in census.label_multiset.items()}
        logger.info(f"h({g}) = {census.class_number} via {[s['method'] for s in steps]}.")
        return {
            'schema': SCHEMA_VERSION,
            'success': True,
            'input': g.to_json(),
            'discriminant': g.discriminant,
            'content': content,
            'descent': chain.to_json(),
            'steps': steps,
            'h': census.class_number,
            'labels': labels_to_json(labels),
            'counts_by_order': {str(k): v for k, v in census.counts_by_order.items()},
            'mass': fraction_text(census.mass),
            'notes': sorted(set(census.notes)),
            'timings': {k: round(v, 4) for k, v in timings.items()},
        }

    # --- public boundary --- #

    def _run(self, what: str, action: Callable[[], dict]) -> dict:
        try:
            return action()
        except BoundExceededError as e:
            logger.error(f"{what}: {e}")
            return {'schema': SCHEMA_VERSION, 'success': False, 'error': 'Bound Exceeded', 'details': str(e)}
        except (InvalidFormError, NotStableError) as e:
            logger.error(f"{what}: {e}")
            return {'schema': SCHEMA_VERSION, 'success': False, 'error': 'Invalid Input', 'details': str(e)}
        except OutOfContractError as e:
            logger.error(f"{what}: {e}")
            return {'schema': SCHEMA_VERSION, 'success': False, 'error': 'Out Of Contract', 'details': str(e)}
        except (InvariantViolation, TableGapError) as e:
            logger.error(f"{what}: {e}")
            return {'schema': SCHEMA_VERSION, 'success': False, 'error': 'Invariant Violation', 'details': str(e)}
        except Exception as e:
            logger.exception(f"{what} failed unexpectedly: {e}")
            return {'schema': SCHEMA_VERSION, 'success': False, 'error': 'Internal Error', 'details': str(e)}

    def run_classnum(self, form, force_oracle: Optional[bool] = None, force_formula: Optional[bool] = None) -> dict:
        return self._run('classnum', lambda: self.class_number(parse_form(form), force_oracle, force_formula))

    def run_genus(self, form) -> dict:
        def action():
            census = self.oracle.enumerate_genus(parse_form(form))
            return {'schema': SCHEMA_VERSION, 'success': True, **census.to_json()}
        return self._run('genus', action)

    def run_descend(self, form) -> dict:
        def action():
            chain = descend_to_stable(parse_form(form))
            return {'schema': SCHEMA_VERSION, 'success': True, **chain.to_json()}
        return self._run('descend', action)

    def run_label(self, form) -> dict:
        def action():
            g = parse_form(form)
            lab = label(g)
            family = recognize_family(g)
            return {
                'schema': SCHEMA_VERSION, 'success': True, 'input': g.to_json(), 'label': str(lab),
                'order': lab.group_order, 'q_values': list(lab.q_values),
                'symmetries': [{'axis': list(s.axis), 'q_value': s.q_value} for s in symmetries(g)],
                'classes': [[s.q_value for s in cls] for cls in symmetry_classes(g)],
                'orthogonal_systems': [[s.q_value for s in triple] for triple in orthogonal_systems(g)],
                'canonical': canonical_form(g).to_json(), 'successive_minima': list(successive_minima(g)),
                'family': family._asdict() if family else None,
                'named': named_lattice_type(g) if lab.group_order == 48 else None,
            }
        return self._run('label', action)

    def run_fiber(self, form, m: int) -> dict:
        """The fiber of gen(L) over N = Lambda_m(L), built explicitly and, at odd m, by the tables."""
        def action():
            upper = parse_form(form).primitive()
            lower = lambda_primitive(upper, m)
            fiber = self.oracle.gamma_fiber(lower, upper, m)
            result = {'schema': SCHEMA_VERSION, 'success': True, 'upper': upper.to_json(),
                      'lower': lower.primitive.to_json(), 'scale': lower.scale, **fiber.to_json(),
                      'counts_by_order': {str(k): v for k, v in fiber.counts_by_order().items()},
                      'orbit_sizes': sorted(len(orbit) for orbit in self.oracle.fiber_orbits(fiber))}
            if m % 2:
                try:
                    j = jordan_odd(upper, m)
                    predicted = self.ascent.propagate_labels(label(lower.primitive), lower.scale, j)
                    result['formula'] = {**predicted.counts.to_json(), 'labels': labels_to_json(predicted.label_multiset)}
                except FALLBACK_ERRORS as e:
                    result['formula'] = {'error': str(e)}
            return result
        return self._run('fiber', action)

    def run_stable(self, form) -> dict:
        def action():
            k = parse_form(form)
            if not is_stable(k) or k.content != 1:
                raise NotStableError(f"{k} is not a stable lattice.")
            p_primes, q_primes = self.stable.split_primes(k)
            census = self.stable_census(k, force_oracle=self.settings.force_oracle,
                                        force_formula=self.settings.force_formula)
            result = {'schema': SCHEMA_VERSION, 'success': True, 'input': k.to_json(),
                      'P': p_primes, 'Q': q_primes, 'nu': len(p_primes) + len(q_primes),
                      'mass': fraction_text(self.stable.mass(k)), 'h': census.class_number,
                      'labels': labels_to_json(census.label_multiset), 'method': census.method,
                      'notes': census.notes}
            if k.discriminant > 1:
                result['b'] = {str(order): n for order, n in sorted(self.stable.special_orbit_counts(k).items())}
                try:
                    result['terms'] = [{'m': t.m, 'delta': t.delta, 't': fraction_text(t.t), 'h_E': t.h_field,
                                        'mu_E': t.mu_field, 'value': fraction_text(t.value)}
                                       for t in self.stable.representation_terms(k)]
                except TableGapError as e:
                    result['terms'] = {'error': str(e)}
            return result
        return self._run('stable', action)

    def run_verify(self, suites) -> dict:
        return self._run('verify', lambda: self.verifier.run(suites))


# Example Usage
if __name__ == '__main__':
    orchestrator = OrchestratorAgent()
    print(orchestrator.run_classnum("1 1 25 0 0 0"))
