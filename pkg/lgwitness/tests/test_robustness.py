import unittest

import numpy as np
from unittest_data_provider import data_provider

from lgwitness.errors import CapacityError, DomainError
from lgwitness.states.models import correlated_pure, max_witness_state, maximally_entangled, perturb_state
from lgwitness.tests.test_base import EXAMPLE_AMPLITUDES, EXAMPLE_W, LGWitnessTestCase
from lgwitness.witness.models import VisibilityTable, witness_sum
from lgwitness.witness.robustness import (KINDS, RobustnessResult, RobustnessTrial, ideal_povms, measured_witness,
                                          perturbed_povms, robustness_study, strength_ramp)


class MeasuredWitnessTestCase(LGWitnessTestCase):
    """ Testing witness/robustness measured_witness and detection operators """

    def test_matches_visibility_sum(self):
        state = correlated_pure(EXAMPLE_AMPLITUDES)

        self.assertAlmostEqual(measured_witness(state), witness_sum(VisibilityTable.from_state(state)))
        self.assertAlmostEqual(measured_witness(state), EXAMPLE_W, delta=1e-6)

    def test_bound_saturating_state(self):
        self.assertAlmostEqual(measured_witness(max_witness_state(4, 2)), 10.0)

    def test_ideal_povms_complete(self):
        """ Test the outcome operators of every setting sum to the pair identity on both photons """
        for (k, l, basis), outcomes in ideal_povms(3).items():
            total = sum(np.kron(a, b) for a, b in outcomes.values())
            local = np.zeros((3, 3))
            local[k, k] = local[l, l] = 1.0
            np.testing.assert_allclose(total, np.kron(local, local), atol=1e-12)

    def test_perturbed_povms_positive(self):
        povms = perturbed_povms(3, 0.2, np.random.default_rng(0))

        self.assertEqual(len(povms), 9)
        for outcomes in povms.values():
            for a, b in outcomes.values():
                self.assertGreater(np.linalg.eigvalsh(a).min(), -1e-12)
                self.assertGreater(np.linalg.eigvalsh(b).min(), -1e-12)

    def test_zero_strength_povms_are_ideal(self):
        perturbed = perturbed_povms(3, 0.0, np.random.default_rng(0))
        ideal = ideal_povms(3)

        for key, outcomes in ideal.items():
            for outcome, (a, b) in outcomes.items():
                np.testing.assert_array_equal(perturbed[key][outcome][0], a)
                np.testing.assert_array_equal(perturbed[key][outcome][1], b)

    def test_negative_strength(self):
        with self.assertRaises(DomainError):
            perturbed_povms(3, -0.1, np.random.default_rng(0))

    @data_provider(lambda: ((0.05,), (0.2,)))
    def test_perturbations_never_raise_witness(self, strength):
        """ Test imperfect detection or correlations only ever lower the measured witness """
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        W0 = measured_witness(state)
        rng = np.random.default_rng(17)
        for _ in range(20):
            self.assertLessEqual(measured_witness(state, perturbed_povms(4, strength, rng)), W0 + 1e-9)
            self.assertLessEqual(measured_witness(perturb_state(state, strength, rng)), W0 + 1e-9)

    def test_ramp(self):
        np.testing.assert_allclose(strength_ramp(5, 0.2), [0.0, 0.05, 0.1, 0.15, 0.2])
        np.testing.assert_array_equal(strength_ramp(1, 0.2), [0.0])


class RobustnessStudyTestCase(LGWitnessTestCase):
    """ Testing witness/robustness robustness_study """

    def test_zero_strength_reproduces_witness(self):
        result = robustness_study(correlated_pure(EXAMPLE_AMPLITUDES), n_trials=3, strength_max=0.1, seed=1)
        first = [t for t in result.trials if t.index == 0]

        self.assertEqual(len(result.trials), 9)
        self.assertEqual(sorted(t.kind for t in first), sorted(KINDS))
        for trial in first:
            self.assertAlmostEqual(trial.W, result.W0)

    def test_witness_degrades_with_strength(self):
        """ Test 1000 trials per kind stay at or below W0 and fall significantly as the strength grows """
        result = robustness_study(correlated_pure(EXAMPLE_AMPLITUDES), n_trials=1000, strength_max=0.2, seed=7)
        summary = result.summary()

        self.assertEqual(sorted(summary), sorted(KINDS))
        for kind in KINDS:
            self.assertEqual(summary[kind]["trials"], 1000)
            self.assertGreaterEqual(summary[kind]["fraction_not_above"], 0.99)
            self.assertLess(summary[kind]["spearman_rho"], 0)
            self.assertLess(summary[kind]["spearman_p"], 0.01)
            self.assertLess(summary[kind]["mean_W"], result.W0)

    def test_deterministic(self):
        state = maximally_entangled(3)
        first = robustness_study(state, n_trials=5, seed=11)
        second = robustness_study(state, n_trials=5, seed=11)

        self.assertEqual(first.trials, second.trials)
        self.assertNotEqual(first.trials, robustness_study(state, n_trials=5, seed=12).trials)

    def test_trials_are_addressable(self):
        """ Test a trial's draw depends on its kind and index only, not on which other kinds ran """
        state = maximally_entangled(3)
        everything = robustness_study(state, n_trials=4, seed=5)
        alone = robustness_study(state, kinds=("projector",), n_trials=4, seed=5)

        self.assertEqual([t for t in everything.trials if t.kind == "projector"], alone.trials)

    def test_needs_seed(self):
        with self.assertRaises(DomainError):
            robustness_study(maximally_entangled(2), n_trials=2)

    def test_unknown_kind(self):
        with self.assertRaises(DomainError):
            robustness_study(maximally_entangled(2), kinds=("detector",), n_trials=2, seed=1)

    def test_capacity(self):
        with self.assertRaises(CapacityError):
            robustness_study(maximally_entangled(9), n_trials=2, seed=1)

    def test_settings(self):
        self.app.config["ROBUSTNESS_TRIALS"] = 2

        self.assertEqual(len(robustness_study(maximally_entangled(2), kinds=("state",), seed=1).trials), 2)

    def test_summary_without_spread(self):
        result = RobustnessResult(3.0, [RobustnessTrial(0, "state", 0.0, 3.0), RobustnessTrial(1, "state", 0.1, 3.0)])
        summary = result.summary()["state"]

        self.assertIsNone(summary["spearman_rho"])
        self.assertIsNone(summary["spearman_p"])
        self.assertEqual(summary["fraction_not_above"], 1.0)
        self.assertEqual(result.to_json()["trials"][1], [1, "state", 0.1, 3.0])

if __name__ == '__main__':
    unittest.main()
