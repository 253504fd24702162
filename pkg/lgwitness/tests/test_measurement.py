import io
import json
import unittest

import numpy as np
from unittest_data_provider import data_provider

from lgwitness.errors import DomainError, IngestionError, MissingPairError
from lgwitness.measurement.io import (CSV_HEADER, counts_equal, dataset_from_json, dataset_to_json, dump_dataset,
                                      load_dataset, read_csv, write_csv)
from lgwitness.measurement.models import (CoincidenceDataset, SubspaceSetting, VisibilityRecord, all_settings,
                                          correlation_matrix, estimate_rates, estimate_visibilities, expectations,
                                          f_value, g_value, outcome_probabilities, projector_set, setting_count,
                                          simulate_counts, subspace_density, subspace_pauli, visibilities,
                                          visibility_arrays)
from lgwitness.modes.models import ModeSet, enumerate_modes
from lgwitness.states.models import (GeneralTwoPhotonState, correlated_pure, maximally_entangled, perturb_state,
                                     spdc_profile)
from lgwitness.tests.test_base import EXAMPLE_AMPLITUDES, EXAMPLE_SV, LGWitnessTestCase
from lgwitness.witness.models import VisibilityTable


class OperatorTestCase(LGWitnessTestCase):
    """ Testing measurement/models subspace operators """

    @data_provider(lambda: (("x",), ("y",), ("z",)))
    def test_pauli_squares_to_projector(self, axis):
        sigma = subspace_pauli(0, 2, axis, D=3)

        np.testing.assert_allclose(sigma, sigma.conj().T)
        np.testing.assert_allclose(sigma @ sigma, np.diag([1, 0, 1]))

    def test_pauli_y_convention(self):
        """ Test sigma_y = i|k><l| - i|l><k| """
        sigma = subspace_pauli(1, 3, "y")

        self.assertEqual(sigma.shape, (4, 4))
        self.assertEqual(sigma[1, 3], 1j)
        self.assertEqual(sigma[3, 1], -1j)

    invalid_paulis = lambda: (
        (1, 1, "x", None),
        (0, 3, "z", 3),
        (0, 1, "w", None),
        (-1, 1, "x", 3),
    )

    @data_provider(invalid_paulis)
    def test_invalid_pauli(self, k, l, axis, D):
        with self.assertRaises(DomainError):
            subspace_pauli(k, l, axis, D)

    def test_setting_order(self):
        with self.assertRaises(DomainError):
            SubspaceSetting(2, 1, "x")
        with self.assertRaises(DomainError):
            SubspaceSetting(0, 1, "q")

    def test_projectors_resolve_identity(self):
        """ Test the four coincidence projectors of a setting sum to the subspace identity """
        projectors = projector_set(0, 2, "y", D=3)
        total = sum(np.kron(a, b) for a, b in projectors.values())
        identity = np.diag([1, 0, 1])

        self.assertEqual(sorted(projectors), ["mm", "mp", "pm", "pp"])
        np.testing.assert_allclose(total, np.kron(identity, identity), atol=1e-12)


class SubspaceTestCase(LGWitnessTestCase):
    """ Testing measurement/models subspace projection and visibilities """

    def test_bell_block(self):
        rho, weight = subspace_density(maximally_entangled(2), 0, 1)
        expected = np.zeros((4, 4))
        expected[np.ix_([0, 3], [0, 3])] = 0.5

        np.testing.assert_allclose(rho, expected)
        self.assertAlmostEqual(weight, 1.0)

    def test_example_weight(self):
        norm = sum(a ** 2 for a in EXAMPLE_AMPLITUDES)
        _, weight = subspace_density(correlated_pure(EXAMPLE_AMPLITUDES), 0, 1)

        self.assertAlmostEqual(weight, (0.25 + 0.0049) / norm)

    def test_empty_subspace(self):
        rho, weight = subspace_density(correlated_pure([1, 0, 0]), 1, 2)

        self.assertEqual(weight, 0.0)
        self.assertFalse(rho.any())
        self.assertEqual(visibilities(correlated_pure([1, 0, 0]), 1, 2), VisibilityRecord(0, 0, 0, 0))
        self.assertEqual(g_value(correlated_pure([1, 0, 0]), 1, 2), 0.0)

    def test_bell_visibilities(self):
        self.assertEqual(tuple(round(v, 12) for v in visibilities(maximally_entangled(2), 0, 1)), (1, 1, 1, 1))

    def test_product_visibilities(self):
        record = visibilities(correlated_pure([1, 0]), 0, 1)

        self.assertAlmostEqual(record.vx, 0.0)
        self.assertAlmostEqual(record.vy, 0.0)
        self.assertAlmostEqual(record.vz, 1.0)

    def test_bell_expectations(self):
        """ Test <xx> = 1, <yy> = -1 and <zz> = 1 for the correlated Bell state """
        (ex, ey, ez), _ = expectations(maximally_entangled(2), 0, 1)

        self.assertAlmostEqual(ex, 1.0)
        self.assertAlmostEqual(ey, -1.0)
        self.assertAlmostEqual(ez, 1.0)

    @data_provider(lambda: tuple((pair, value) for pair, value in sorted(EXAMPLE_SV.items())))
    def test_example_visibilities(self, pair, value):
        self.assertAlmostEqual(visibilities(correlated_pure(EXAMPLE_AMPLITUDES), *pair).total, value, delta=0.005)

    def test_g_matches_visibility_sum(self):
        """ Test g equals V_x + V_y + V_z for a real, positive correlated state """
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        for k, l in state.mode_set.pairs():
            self.assertAlmostEqual(g_value(state, k, l), visibilities(state, k, l).total)

    def test_f_is_weighted_g(self):
        state = perturb_state(correlated_pure([0.7, 0.5, 0.5j]), 0.05, np.random.default_rng(4))
        for k, l in state.mode_set.pairs():
            _, weight = subspace_density(state, k, l)
            self.assertAlmostEqual(f_value(state, k, l), g_value(state, k, l) * weight)

    def test_f_sum_of_maximally_entangled(self):
        """ Test sum f_kl = 2D + D - 3 for |phi_D> """
        state = maximally_entangled(4)

        self.assertAlmostEqual(sum(f_value(state, k, l) for k, l in state.mode_set.pairs()), 9.0)

    embedded_states = lambda: tuple((D, d) for D in range(2, 9) for d in range(1, D + 1))

    @data_provider(embedded_states)
    def test_f_sum_of_embedded_maximally_entangled(self, D, d):
        """ Test |phi_d> on the first d of D modes has f_kl = 6/d inside its support and sum f_kl = 2d + D - 3 """
        state = correlated_pure([1.0] * d + [0.0] * (D - d))
        for k, l in state.mode_set.pairs():
            if l < d:
                self.assertAlmostEqual(f_value(state, k, l), 6.0 / d)

        self.assertAlmostEqual(sum(f_value(state, k, l) for k, l in state.mode_set.pairs()), 2 * d + D - 3)

    def test_f_sum_of_bell_pair_in_four_modes(self):
        self.assertAlmostEqual(sum(f_value(correlated_pure([1, 1, 0, 0]), k, l) for k in range(4)
                                   for l in range(k + 1, 4)), 5.0)

    uncorrelated_mass = lambda: (
        (maximally_entangled(2), 0, 1, 0.1),
        (maximally_entangled(3), 0, 2, 0.3),
        (correlated_pure(EXAMPLE_AMPLITUDES), 0, 1, 0.05),
        (correlated_pure(EXAMPLE_AMPLITUDES), 2, 3, 0.5),
        (correlated_pure([1, 0, 0]), 0, 1, 0.2),
    )

    @data_provider(uncorrelated_mass)
    def test_uncorrelated_mass_never_raises_g(self, state, k, l, p):
        """ Test moving mass onto |kl> and |lk> only grows the denominator of g_kl """
        general = state.to_general()
        D = general.D
        rho = (1 - p) * np.array(general.rho)
        rho[k * D + l, k * D + l] += p / 2.0
        rho[l * D + k, l * D + k] += p / 2.0
        moved = GeneralTwoPhotonState(rho, general.mode_set)

        self.assertLess(g_value(moved, k, l), g_value(general, k, l) + 1e-12)
        self.assertLess(g_value(moved, k, l), g_value(state, k, l) + 1e-12)


class ProbabilityTestCase(LGWitnessTestCase):
    """ Testing measurement/models outcome probabilities """

    def test_z_outcomes(self):
        probabilities = outcome_probabilities(maximally_entangled(2), SubspaceSetting(0, 1, "z"))

        np.testing.assert_allclose(probabilities, [0.5, 0.0, 0.0, 0.5], atol=1e-12)

    def test_x_outcomes(self):
        probabilities = outcome_probabilities(maximally_entangled(2), SubspaceSetting(0, 1, "x"))

        self.assertAlmostEqual(probabilities[0], 0.5)
        self.assertAlmostEqual(probabilities.sum(), 1.0)

    def test_y_outcomes(self):
        """ Test the y basis ++ outcome of 0.8|kk> + 0.6|ll> has probability (0.4 - 0.3)^2 """
        probabilities = outcome_probabilities(correlated_pure([0.8, 0.6]), SubspaceSetting(0, 1, "y"))

        self.assertAlmostEqual(probabilities[0], 0.01)
        self.assertAlmostEqual(probabilities[3], 0.01)

    def test_probabilities_use_full_state(self):
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        _, weight = subspace_density(state, 0, 1)

        self.assertAlmostEqual(outcome_probabilities(state, SubspaceSetting(0, 1, "x")).sum(), weight)

    def test_setting_count(self):
        self.assertEqual(setting_count(4), 72)
        self.assertEqual(setting_count(186), 206460)
        self.assertEqual(len(all_settings(ModeSet.default(4))), 18)


class SimulationTestCase(LGWitnessTestCase):
    """ Testing measurement/models simulate_counts and estimation """

    def test_expectation_counts(self):
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        dataset = simulate_counts(state, flux=1e6, expectation=True)
        norm = sum(a ** 2 for a in EXAMPLE_AMPLITUDES)

        self.assertEqual(len(dataset), 18)
        self.assertTrue(dataset.expectation)
        self.assertIsNone(dataset.seed)
        self.assertAlmostEqual(dataset.count(SubspaceSetting(0, 1, "z"), "pp"), 1e6 * 0.25 / norm)
        self.assertEqual(dataset.count(SubspaceSetting(0, 1, "z"), "pm"), 0.0)

    def test_flux_setting(self):
        self.app.config["FLUX"] = 10.0
        dataset = simulate_counts(maximally_entangled(2), expectation=True)

        self.assertEqual(dataset.flux, 10.0)
        self.assertAlmostEqual(dataset.count(SubspaceSetting(0, 1, "z"), "pp"), 5.0)

    def test_product_state_z(self):
        """ Test a product state only ever fires |00> in the z basis """
        dataset = simulate_counts(correlated_pure([1, 0, 0]), seed=1, flux=1000)

        counts = dataset.counts(SubspaceSetting(0, 1, "z"))
        self.assertGreater(counts[0], 0)
        self.assertEqual(list(counts[1:]), [0, 0, 0])
        self.assertFalse(dataset.counts(SubspaceSetting(1, 2, "x")).any())

    def test_sampling_needs_seed(self):
        with self.assertRaises(DomainError):
            simulate_counts(maximally_entangled(2), flux=100)

    def test_flux_must_be_positive(self):
        with self.assertRaises(DomainError):
            simulate_counts(maximally_entangled(2), flux=0, expectation=True)

    def test_deterministic(self):
        state = correlated_pure(EXAMPLE_AMPLITUDES)

        self.assertTrue(counts_equal(simulate_counts(state, seed=3, flux=1e4), simulate_counts(state, seed=3, flux=1e4)))
        self.assertFalse(counts_equal(simulate_counts(state, seed=3, flux=1e4), simulate_counts(state, seed=4, flux=1e4)))

    def test_settings_are_independent_of_order(self):
        """ Test a setting draws the same counts whether simulated alone or with every other setting """
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        setting_ = SubspaceSetting(1, 3, "y")

        alone = simulate_counts(state, seed=8, flux=1e5, settings=[setting_])
        together = simulate_counts(state, seed=8, flux=1e5)
        np.testing.assert_array_equal(alone.counts(setting_), together.counts(setting_))

    def test_shared_populations(self):
        """ Test every z basis |kk> count of a mode is the same draw """
        dataset = simulate_counts(correlated_pure(EXAMPLE_AMPLITUDES), seed=2, flux=1e5, share_populations=True)

        self.assertEqual(dataset.count(SubspaceSetting(0, 1, "z"), "pp"), dataset.count(SubspaceSetting(0, 3, "z"), "pp"))
        self.assertEqual(dataset.count(SubspaceSetting(0, 1, "z"), "mm"), dataset.count(SubspaceSetting(1, 2, "z"), "pp"))

    def test_expectation_round_trip(self):
        """ Test expected counts give back the exact visibilities """
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        dataset = simulate_counts(state, flux=1e6, expectation=True)
        for k, l in state.mode_set.pairs():
            estimated = estimate_visibilities(dataset, k, l)
            exact = visibilities(state, k, l)
            np.testing.assert_allclose(estimated, exact, atol=1e-9)

    def test_equal_counts(self):
        dataset = CoincidenceDataset(ModeSet.default(2), flux=1000.0)
        for basis in ("x", "y", "z"):
            dataset.add(SubspaceSetting(0, 1, basis), [25, 25, 25, 25])

        self.assertEqual(estimate_visibilities(dataset, 0, 1), VisibilityRecord(0, 0, 0, 0.1))

    def test_missing_basis(self):
        dataset = CoincidenceDataset(ModeSet.default(2), flux=1000.0)
        dataset.add(SubspaceSetting(0, 1, "x"), [10, 0, 0, 10])
        dataset.add(SubspaceSetting(0, 1, "z"), [10, 0, 0, 10])

        with self.assertRaises(MissingPairError) as raised:
            estimate_visibilities(dataset, 0, 1)
        self.assertEqual(len(raised.exception.missing), 4)
        self.assertEqual(raised.exception.missing[0], (0, 1, "y", "pp"))

    def test_perfect_pair_is_exact(self):
        """ Test a two-mode maximally entangled pair gives 3 whatever the Poisson draw """
        dataset = simulate_counts(correlated_pure(EXAMPLE_AMPLITUDES), seed=6, flux=1e7)

        self.assertEqual(estimate_visibilities(dataset, 2, 3).total, 3.0)

    def test_error_scales_with_flux(self):
        """ Test the visibility RMS error falls roughly tenfold for a hundredfold flux """
        mode_set = enumerate_modes(l_max=3)
        state = correlated_pure(spdc_profile("exponential", (2.0, 1.0), mode_set), mode_set)
        exact = VisibilityTable.from_state(state)
        upper = np.triu_indices(state.D, 1)

        def rms(flux):
            table = VisibilityTable.from_dataset(simulate_counts(state, seed=12, flux=flux))
            errors = np.concatenate([(table.vx - exact.vx)[upper], (table.vy - exact.vy)[upper]])
            return np.sqrt(np.mean(errors ** 2))

        ratio = rms(1e6) / rms(1e8)
        self.assertGreater(ratio, 6)
        self.assertLess(ratio, 16)

    def test_rates_and_correlation_matrix(self):
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        dataset = simulate_counts(state, flux=1e6, expectation=True)

        np.testing.assert_allclose(estimate_rates(dataset), 1e6 * state.populations)
        np.testing.assert_allclose(dataset.estimated_flux(), 1e6)

        matrix = correlation_matrix(dataset)
        self.assertAlmostEqual(matrix.sum(), 1.0)
        np.testing.assert_allclose(matrix, np.diag(np.diag(matrix)), atol=1e-12)

    def test_estimated_flux_is_used_without_flux(self):
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        dataset = simulate_counts(state, flux=1e6, expectation=True)
        dataset.flux = None

        self.assertAlmostEqual(estimate_visibilities(dataset, 0, 1).n, visibilities(state, 0, 1).n)

    def test_no_scale(self):
        with self.assertRaises(IngestionError):
            visibility_arrays(np.ones((1, 3, 4)), 0.0)


class DatasetTestCase(LGWitnessTestCase):
    """ Testing measurement/models CoincidenceDataset """

    def setUp(self):
        super(DatasetTestCase, self).setUp()
        self.dataset = simulate_counts(correlated_pure(EXAMPLE_AMPLITUDES), seed=9, flux=1e4)

    def test_resampled(self):
        resampled = self.dataset.resampled(np.random.default_rng(0))

        self.assertEqual(resampled.settings(), self.dataset.settings())
        self.assertFalse(counts_equal(resampled, self.dataset))
        self.assertFalse(resampled.expectation)

    def test_scaled(self):
        scaled = self.dataset.scaled(2.0)
        setting_ = SubspaceSetting(0, 1, "x")

        np.testing.assert_array_equal(scaled.counts(setting_), 2.0 * self.dataset.counts(setting_))
        self.assertEqual(scaled.flux, 2e4)

        with self.assertRaises(DomainError):
            self.dataset.scaled(0)

    def test_restricted(self):
        """ Test restriction re-indexes the kept modes in ascending order """
        restricted = self.dataset.restricted([3, 1])

        self.assertEqual(restricted.mode_set, ModeSet([(0, 1), (0, 3)]))
        self.assertEqual(len(restricted), 3)
        np.testing.assert_array_equal(restricted.counts(SubspaceSetting(0, 1, "y")),
                                      self.dataset.counts(SubspaceSetting(1, 3, "y")))

    def test_duplicate_setting(self):
        with self.assertRaises(IngestionError):
            self.dataset.add(SubspaceSetting(0, 1, "x"), [1, 2, 3, 4])

    def test_setting_outside_mode_set(self):
        with self.assertRaises(IngestionError):
            CoincidenceDataset(ModeSet.default(2)).add(SubspaceSetting(0, 2, "x"), [1, 2, 3, 4])

    def test_negative_counts(self):
        with self.assertRaises(IngestionError):
            CoincidenceDataset(ModeSet.default(2)).add(SubspaceSetting(0, 1, "x"), [1, -2, 3, 4])

    def test_as_array(self):
        array = self.dataset.as_array()

        self.assertEqual(array.shape, (6, 3, 4))
        np.testing.assert_array_equal(array[5, 2], self.dataset.counts(SubspaceSetting(2, 3, "z")))


class CoincidenceFileTestCase(LGWitnessTestCase):
    """ Testing measurement/io coincidence files """

    def _csv(self, dataset):
        f = io.StringIO()
        write_csv(dataset, f)
        return f.getvalue()

    def test_expectation_csv(self):
        text = self._csv(simulate_counts(correlated_pure(EXAMPLE_AMPLITUDES), flux=1e6, expectation=True))
        lines = text.splitlines()

        self.assertEqual(len(lines), 73)
        self.assertEqual(lines[0], "na,la,nb,lb,basis,outcome,count")
        self.assertTrue(lines[1].startswith("0,0,0,1,x,pp,"))

    def test_sampled_csv_holds_integers(self):
        text = self._csv(simulate_counts(correlated_pure(EXAMPLE_AMPLITUDES), seed=1, flux=1e4))

        for line in text.splitlines()[1:]:
            int(line.split(",")[-1])

    def test_deterministic(self):
        state = correlated_pure(EXAMPLE_AMPLITUDES)

        self.assertEqual(self._csv(simulate_counts(state, seed=21, flux=1e5)),
                         self._csv(simulate_counts(state, seed=21, flux=1e5)))

    @data_provider(lambda: ((False,), (True,)))
    def test_read_back(self, expectation):
        state = correlated_pure(EXAMPLE_AMPLITUDES)
        dataset = simulate_counts(state, seed=None if expectation else 5, flux=1e5, expectation=expectation)
        loaded = read_csv(io.StringIO(self._csv(dataset)))

        self.assertEqual(loaded.expectation, expectation)
        self.assertTrue(counts_equal(loaded, dataset))

    def test_json_file(self):
        dataset = simulate_counts(correlated_pure(EXAMPLE_AMPLITUDES), seed=5, flux=1e5)
        dump_dataset(dataset, self.path("counts.json"), "json")
        loaded = load_dataset(self.path("counts.json"))

        self.assertTrue(counts_equal(loaded, dataset))
        self.assertEqual(loaded.flux, 1e5)
        self.assertEqual(loaded.seed, dataset.seed)

    def test_json_flux_override(self):
        dataset = simulate_counts(maximally_entangled(2), flux=100.0, expectation=True)
        loaded = dataset_from_json(json.loads(json.dumps(dataset_to_json(dataset))))
        self.assertEqual(loaded.flux, 100.0)

        dump_dataset(dataset, self.path("counts.json"), "json")
        self.assertEqual(load_dataset(self.path("counts.json"), flux=400.0).flux, 400.0)

    def test_csv_file(self):
        dataset = simulate_counts(correlated_pure(EXAMPLE_AMPLITUDES), seed=5, flux=1e5)
        dump_dataset(dataset, self.path("counts.csv"))

        self.assertTrue(counts_equal(load_dataset(self.path("counts.csv"), flux=1e5), dataset))

    def test_swapped_row(self):
        """ Test a row listing the modes in reverse order swaps the mixed outcomes """
        text = "\n".join([",".join(CSV_HEADER), "0,1,0,0,x,pm,7", "0,0,0,1,x,pm,3"])
        dataset = read_csv(io.StringIO(text), mode_set=ModeSet.default(2))

        self.assertEqual(dataset.count(SubspaceSetting(0, 1, "x"), "mp"), 7)
        self.assertEqual(dataset.count(SubspaceSetting(0, 1, "x"), "pm"), 3)

    invalid_rows = lambda: (
        ("0,0,0,1,x,pp,-1",),
        ("0,0,0,1,w,pp,1",),
        ("0,0,0,1,x,p,1",),
        ("0,0,0,0,x,pp,1",),
        ("0,0,5,5,x,pp,1",),
        ("0,0,0,1,x,pp,many",),
        ("0,0,0,1,x,pp,1\n0,0,0,1,x,pp,2",),
    )

    @data_provider(invalid_rows)
    def test_invalid_rows(self, rows):
        text = ",".join(CSV_HEADER) + "\n" + rows

        with self.assertRaises(IngestionError):
            read_csv(io.StringIO(text), mode_set=ModeSet.default(2))

    def test_bad_header(self):
        with self.assertRaises(IngestionError):
            read_csv(io.StringIO("na,la,nb,lb,basis,count\n0,0,0,1,x,5\n"))

    def test_missing_file(self):
        with self.assertRaises(IngestionError):
            load_dataset(self.path("nothing.csv"))

if __name__ == '__main__':
    unittest.main()
