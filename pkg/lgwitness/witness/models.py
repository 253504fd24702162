"""
The dimensionality witness.

    W = sum over pairs a < b of (V_x + V_y + V_z) on the normalised subspace state

A state that is at most d-dimensionally entangled satisfies W <= 3D(D-1)/2 - D(D-d); exceeding that bound certifies
(d+1)-dimensional entanglement.
"""
import itertools
import logging
from collections import namedtuple

import numpy as np

from lgwitness import setting
from lgwitness import rng as streams
from lgwitness.errors import CapacityError, DomainError, MissingPairError
from lgwitness.measurement.models import VisibilityRecord, visibilities, visibility_arrays
from lgwitness.states.models import CorrelatedState

log = logging.getLogger(__name__)

SubsetStep = namedtuple("SubsetStep", ["size", "certified_d", "W", "modes"])
SubsetResult = namedtuple("SubsetResult", ["trajectory", "best_subset", "best_d"])


class VisibilityTable(object):
    """ Visibilities for every pair of a mode set, held as symmetric D x D arrays.

    Pairs that were never filled hold NaN; witness_sum and friends refuse such tables.
    """

    def __init__(self, mode_set, vx=None, vy=None, vz=None, n=None):
        D = mode_set.D
        self.mode_set = mode_set
        self.vx, self.vy, self.vz, self.n = [
            self._symmetric(values, D) for values in (vx, vy, vz, n)
        ]

    def __repr__(self):
        return "<VisibilityTable D={}>".format(self.D)

    @staticmethod
    def _symmetric(values, D):
        if values is None:
            array = np.full((D, D), np.nan)
        else:
            array = np.array(values, dtype=float)
            if array.shape != (D, D):
                raise DomainError("Visibility arrays must be {0} x {0}".format(D))
            array = np.triu(array, 1) + np.triu(array, 1).T
        np.fill_diagonal(array, 0.0)
        return array

    @property
    def D(self):
        return self.mode_set.D

    @property
    def sv_matrix(self):
        """ D x D matrix of V_x + V_y + V_z with a zero diagonal. """
        return self.vx + self.vy + self.vz

    def record(self, k, l):
        return VisibilityRecord(self.vx[k, l], self.vy[k, l], self.vz[k, l], self.n[k, l])

    @property
    def records(self):
        """ dict (k, l) -> VisibilityRecord over every filled pair k < l. """
        return {(k, l): self.record(k, l) for k, l in self.mode_set.pairs() if not np.isnan(self.vx[k, l])}

    def set_record(self, k, l, record):
        k, l = min(k, l), max(k, l)
        for array, value in zip((self.vx, self.vy, self.vz, self.n), record):
            array[k, l] = array[l, k] = value

    def missing(self):
        stacked = self.vx + self.vy + self.vz + self.n
        return [(k, l) for k, l in self.mode_set.pairs() if np.isnan(stacked[k, l])]

    def validate(self):
        absent = self.missing()
        if absent:
            raise MissingPairError(absent)
        return True

    def restricted(self, indices):
        """ The table on the modes at `indices` (ascending order). """
        indices = sorted(set(indices))
        grid = np.ix_(indices, indices)
        return VisibilityTable(self.mode_set.subset(indices), self.vx[grid], self.vy[grid], self.vz[grid],
                               self.n[grid])

    @classmethod
    def from_records(cls, mode_set, records):
        table = cls(mode_set)
        for (k, l), record in records.items():
            table.set_record(k, l, record)
        return table

    @classmethod
    def from_state(cls, state):
        """ Exact visibilities of `state`; closed form for correlated states, per-pair projection otherwise. """
        if not isinstance(state, CorrelatedState):
            return cls.from_records(state.mode_set, {
                (k, l): visibilities(state, k, l) for k, l in state.mode_set.pairs()
            })

        populations = state.populations
        weights = populations[:, None] + populations[None, :]
        coherence = 2.0 * np.abs(np.real(state.coeffs))

        empty = weights <= setting("ZERO_WEIGHT_TOL")
        with np.errstate(divide="ignore", invalid="ignore"):
            transverse = np.where(empty, 0.0, coherence / weights)
        longitudinal = np.where(empty, 0.0, 1.0)
        weights = np.where(empty, 0.0, weights)

        return cls(state.mode_set, transverse, transverse, longitudinal, weights)

    @classmethod
    def from_arrays(cls, mode_set, pairs, V, weights):
        """ Build from the output of measurement.visibility_arrays. """
        D = mode_set.D
        arrays = [np.full((D, D), np.nan) for _ in range(4)]
        if len(pairs):
            rows, cols = np.array(pairs).T
            for array, values in zip(arrays, (V[:, 0], V[:, 1], V[:, 2], weights)):
                array[rows, cols] = values
        return cls(mode_set, *arrays)

    @classmethod
    def from_dataset(cls, dataset):
        """ Estimated visibilities; raises MissingPairError if the dataset lacks any of the 12 counts of a pair. """
        pairs = dataset.mode_set.pairs()
        V, weights = visibility_arrays(dataset.as_array(pairs), dataset.scale)
        return cls.from_arrays(dataset.mode_set, pairs, V, weights)


def witness_sum(table):
    """ W for a complete table; zero-weight pairs contribute nothing. """
    table.validate()
    upper = np.triu_indices(table.D, 1)
    return float(np.sum(table.sv_matrix[upper]))


def max_witness(D):
    """ 3D(D-1)/2, the largest value any state can reach. """
    return 3 * D * (D - 1) // 2


def bound(D, d):
    """ Largest W reachable by states at most d-dimensionally entangled. """
    if not 1 <= d <= D:
        raise DomainError("Need 1 <= d <= D, got d={}, D={}".format(d, D))
    return max_witness(D) - D * (D - d)


def certified_dimension(W, D):
    """ Largest d with W > bound(D, d - 1); 1 when nothing is certified. """
    if not np.isfinite(W):
        raise DomainError("W must be finite, got {}".format(W))

    for d in range(D, 1, -1):
        if W > bound(D, d - 1):
            return d
    return 1


def bounds(D):
    """ [(d, threshold)] for d = 2..D: W > threshold certifies d-dimensional entanglement. """
    return [(d, bound(D, d - 1)) for d in range(2, D + 1)]


def f_bound(D, d):
    """ Bound on sum_kl f_kl for states at most d-dimensionally entangled. """
    if not 1 <= d <= D:
        raise DomainError("Need 1 <= d <= D, got d={}, D={}".format(d, D))
    return 2 * d + D - 3


def monte_carlo_ci(dataset, n_resamples=None, seed=None):
    """ Poisson resampling of every count; W recomputed per resample.

    Each resample r draws from substream (RESAMPLE, r), so results are identical whatever order the resamples run in.

    Returns:
        (W_hat, sigma): mean and standard deviation (ddof=1) over the resamples.
    """
    n_resamples = setting("N_RESAMPLES") if n_resamples is None else n_resamples
    if n_resamples < 2:
        raise DomainError("Need at least 2 resamples, got {}".format(n_resamples))

    pairs = dataset.mode_set.pairs()
    observed = dataset.as_array(pairs)
    scale = dataset.scale

    samples = np.empty(n_resamples)
    for r in range(n_resamples):
        generator = streams.substream(seed, streams.RESAMPLE, r)
        V, _ = visibility_arrays(generator.poisson(observed).astype(float), scale)
        samples[r] = V.sum()

    return float(samples.mean()), float(samples.std(ddof=1))


def per_mode_contribution(table):
    """ Entry k is the mean of V_x + V_y + V_z over every pair (k, l), l != k. """
    table.validate()
    if table.D < 2:
        return np.zeros(table.D)
    return table.sv_matrix.sum(axis=1) / (table.D - 1)


def _best(trajectory):
    """ Step with the highest certified d; ties go to the larger subset. """
    return max(trajectory, key=lambda step: (step.certified_d, step.size))


def greedy_subset(table):
    """ Greedy mode removal.

    At every step the mode with the lowest per-mode contribution (recomputed on the remaining modes, lowest index on
    ties) is dropped and W and the certified dimension are re-evaluated with the reduced D'.  Runs down to D' = 2.

    Returns:
        SubsetResult with one SubsetStep per subset size, the best subset (indices into the table) and its d.
    """
    table.validate()
    remaining = list(range(table.D))
    trajectory = []

    while True:
        subtable = table.restricted(remaining)
        W = witness_sum(subtable)
        trajectory.append(SubsetStep(len(remaining), certified_dimension(W, len(remaining)), W, tuple(remaining)))
        if len(remaining) <= 2:
            break

        weakest = int(np.argmin(per_mode_contribution(subtable)))
        log.debug("Dropping mode %r at D' = %d", table.mode_set[remaining[weakest]], len(remaining))
        del remaining[weakest]

    best = _best(trajectory)
    return SubsetResult(trajectory, best.modes, best.certified_d)


def exhaustive_subset(table, cap=None):
    """ Best certified dimension over every subset of two or more modes.

    The trajectory holds, per subset size, the best subset of that size (highest certified d, then highest W).
    """
    cap = setting("EXHAUSTIVE_SUBSET_CAP") if cap is None else cap
    if table.D > cap:
        raise CapacityError("Exhaustive subset search is capped at D = {}, got {}".format(cap, table.D))

    table.validate()
    sv = table.sv_matrix

    trajectory = []
    for size in range(table.D, 1, -1):
        best = None
        for subset in itertools.combinations(range(table.D), size):
            W = float(np.sum(np.triu(sv[np.ix_(subset, subset)], 1)))
            step = SubsetStep(size, certified_dimension(W, size), W, subset)
            if best is None or (step.certified_d, step.W) > (best.certified_d, best.W):
                best = step
        trajectory.append(best)

    best = _best(trajectory)
    return SubsetResult(trajectory, best.modes, best.certified_d)


class WitnessReport(object):
    """ Result of a certification run. """

    def __init__(self, W, D, certified_d, bounds, per_mode, sigma=None, n_resamples=None, subset_trajectory=None,
                 integrity=True, modes=None):
        self.W = W
        self.D = D
        self.certified_d = certified_d
        self.bounds = bounds
        self.per_mode = per_mode
        self.sigma = sigma
        self.n_resamples = n_resamples
        self.subset_trajectory = subset_trajectory or []
        self.integrity = integrity
        self.modes = modes

    def __repr__(self):
        return "<WitnessReport W={:.3f} D={} d={}>".format(self.W, self.D, self.certified_d)

    def to_json(self):
        return {
            "W": self.W,
            "D": self.D,
            "sigma": self.sigma,
            "n_resamples": self.n_resamples,
            "certified_d": self.certified_d,
            "bounds": [[d, threshold] for d, threshold in self.bounds],
            "per_mode": [float(x) for x in self.per_mode],
            "subset_trajectory": [[step.size, step.certified_d] for step in self.subset_trajectory],
            "integrity": self.integrity,
            "modes": self.modes,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            W=data["W"],
            D=data["D"],
            certified_d=data["certified_d"],
            bounds=[tuple(b) for b in data["bounds"]],
            per_mode=data["per_mode"],
            sigma=data.get("sigma"),
            n_resamples=data.get("n_resamples"),
            subset_trajectory=[SubsetStep(size, d, None, None) for size, d in data.get("subset_trajectory", [])],
            integrity=data.get("integrity", True),
            modes=data.get("modes"),
        )


def check_integrity(W, D):
    """ False when W exceeds the global cap 3D(D-1)/2. """
    if W <= max_witness(D) + 1e-6:
        return True

    log.error("Data integrity failure: W = %.6f exceeds 3D(D-1)/2 = %d", W, max_witness(D))
    return False


def build_report(table, dataset=None, n_resamples=None, seed=None, subsets=True):
    """ Assemble a WitnessReport from a complete table.

    With a dataset and a seed, a Monte-Carlo sigma is attached.  `subsets` adds the greedy subset trajectory.
    """
    W = witness_sum(table)
    D = table.D
    certified_d = certified_dimension(W, D)
    log.info("W = %.4f over D = %d modes certifies d = %d", W, D, certified_d)

    sigma = None
    if dataset is not None and seed is not None:
        n_resamples = setting("N_RESAMPLES") if n_resamples is None else n_resamples
        _, sigma = monte_carlo_ci(dataset, n_resamples, seed)
    else:
        n_resamples = None

    return WitnessReport(
        W=W,
        D=D,
        certified_d=certified_d,
        bounds=bounds(D),
        per_mode=per_mode_contribution(table),
        sigma=sigma,
        n_resamples=n_resamples,
        subset_trajectory=greedy_subset(table).trajectory if subsets and D >= 2 else [],
        integrity=check_integrity(W, D),
        modes=table.mode_set.to_json(),
    )

