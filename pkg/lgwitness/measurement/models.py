"""
Measurements in two-dimensional subspaces span{|k>, |l>} of the mode space.

For every pair k < l both photons are measured in the x, y and z bases of the qubit spanned by |k> and |l>, giving
twelve coincidence outcomes per pair.  Subspace blocks of a state are always ordered (|kk>, |kl>, |lk>, |ll>).
"""
import logging
from collections import namedtuple

import numpy as np

from lgwitness import setting
from lgwitness import rng as streams
from lgwitness.errors import DomainError, IngestionError, MissingPairError

log = logging.getLogger(__name__)

BASES = ("x", "y", "z")
OUTCOMES = ("pp", "pm", "mp", "mm")

# +1 for equal outcomes, -1 for opposite ones
OUTCOME_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])

_SQRT_HALF = 1.0 / np.sqrt(2.0)

# Pauli operators in the (k, l) basis; sigma_y = i|k><l| - i|l><k|
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (+, -) outcome vectors per basis in the (k, l) basis
EIGENVECTORS = {
    "x": (np.array([1, 1]) * _SQRT_HALF, np.array([1, -1]) * _SQRT_HALF),
    "y": (np.array([1, 1j]) * _SQRT_HALF, np.array([1, -1j]) * _SQRT_HALF),
    "z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
}


def _outcome_vectors(basis):
    """ 4 x 4 array whose rows are u_s (x) u_t for the outcomes pp, pm, mp, mm, in block order. """
    plus, minus = EIGENVECTORS[basis]
    return np.array([np.kron(s, t) for s, t in ((plus, plus), (plus, minus), (minus, plus), (minus, minus))],
                    dtype=complex)


OUTCOME_VECTORS = {basis: _outcome_vectors(basis) for basis in BASES}


class SubspaceSetting(namedtuple("SubspaceSetting", ["k", "l", "basis"])):
    """ One measurement setting: the pair k < l and a basis. """
    __slots__ = ()

    def __new__(cls, k, l, basis):
        if k == l:
            raise DomainError("A subspace needs two distinct modes, got k = l = {}".format(k))
        if k > l:
            raise DomainError("Subspace pairs are stored with k < l, got ({}, {})".format(k, l))
        if k < 0:
            raise DomainError("Mode indices must be >= 0")
        if basis not in BASES:
            raise DomainError("Unknown basis {!r}".format(basis))
        return super(SubspaceSetting, cls).__new__(cls, int(k), int(l), basis)

    @property
    def pair(self):
        return self.k, self.l


class VisibilityRecord(namedtuple("VisibilityRecord", ["vx", "vy", "vz", "n"])):
    """ Visibilities of one subspace in the three bases, plus the subspace weight N. """
    __slots__ = ()

    def __new__(cls, vx, vy, vz, n):
        if n < 0:
            raise DomainError("Subspace weight must be >= 0, got {}".format(n))
        if n == 0:
            vx = vy = vz = 0.0
        for v in (vx, vy, vz):
            if not 0.0 <= v <= 1.0 + 1e-9:
                raise DomainError("Visibility {} outside [0, 1]".format(v))
        return super(VisibilityRecord, cls).__new__(cls, float(vx), float(vy), float(vz), float(n))

    @property
    def total(self):
        """ V_x + V_y + V_z """
        return self.vx + self.vy + self.vz


def subspace_pauli(k, l, axis, D=None):
    """ sigma_axis^{kl} as a D x D matrix on the single-photon space.

    sigma_x = |k><l| + |l><k|, sigma_y = i|k><l| - i|l><k|, sigma_z = |k><k| - |l><l|.
    """
    if k == l:
        raise DomainError("sigma^{kl} needs k != l")
    if axis not in PAULI:
        raise DomainError("Unknown axis {!r}".format(axis))

    D = max(k, l) + 1 if D is None else D
    if min(k, l) < 0 or max(k, l) >= D:
        raise DomainError("Indices ({}, {}) outside a {}-mode space".format(k, l, D))

    operator = np.zeros((D, D), dtype=complex)
    idx = [k, l]
    operator[np.ix_(idx, idx)] = PAULI[axis]
    return operator


def subspace_density(state, k, l):
    """ Project `state` onto span{|kk>, |kl>, |lk>, |ll>}.

    Returns:
        (rho_kl, N_kl): the 4 x 4 block normalised to unit trace, and its weight in the full state.  A subspace with
        no weight returns the zero matrix and N_kl = 0.
    """
    block = state.block(k, l)
    weight = float(np.real(np.trace(block)))
    if weight <= setting("ZERO_WEIGHT_TOL"):
        return np.zeros((4, 4), dtype=complex), 0.0
    return block / weight, weight


def _correlator(block, basis):
    """ Tr((sigma (x) sigma) block) for the un-normalised block. """
    local = np.kron(PAULI[basis], PAULI[basis])
    return float(np.real(np.trace(local @ block)))


def expectations(state, k, l):
    """ (E_x, E_y, E_z) on the normalised subspace state, and N_kl. """
    rho_kl, weight = subspace_density(state, k, l)
    if weight == 0:
        return (0.0, 0.0, 0.0), 0.0
    return tuple(_correlator(rho_kl, basis) for basis in BASES), weight


def visibilities(state, k, l):
    """ VisibilityRecord with V_i = |<sigma_i (x) sigma_i>| on the normalised subspace state. """
    (ex, ey, ez), weight = expectations(state, k, l)
    return VisibilityRecord(abs(ex), abs(ey), abs(ez), weight)


def g_value(state, k, l):
    """ g(rho_kl) = Tr((zz - yy + xx) rho_kl), zero for an empty subspace. """
    (ex, ey, ez), _ = expectations(state, k, l)
    return ez - ey + ex


def f_value(state, k, l):
    """ Same functional on the un-normalised state: f_kl = g_kl * N_kl. """
    block = state.block(k, l)
    return _correlator(block, "z") - _correlator(block, "y") + _correlator(block, "x")


def projector_set(k, l, basis, D=None):
    """ The four coincidence projectors of a setting.

    Returns:
        dict outcome -> (P_A, P_B), each a D x D single-photon projector; the coincidence projector is P_A (x) P_B.
    """
    SubspaceSetting(min(k, l), max(k, l), basis)
    D = max(k, l) + 1 if D is None else D

    singles = []
    for vector in EIGENVECTORS[basis]:
        full = np.zeros(D, dtype=complex)
        full[[k, l]] = vector
        singles.append(np.outer(full, full.conj()))

    plus, minus = singles
    return dict(zip(OUTCOMES, ((plus, plus), (plus, minus), (minus, plus), (minus, minus))))


def outcome_probabilities(state, setting_):
    """ Probabilities of pp, pm, mp, mm for `setting_`, taken from the full (not subspace-normalised) state. """
    block = state.block(setting_.k, setting_.l)
    vectors = OUTCOME_VECTORS[setting_.basis]
    probabilities = np.real(np.einsum("si,ij,sj->s", vectors.conj(), block, vectors))
    return np.clip(probabilities, 0.0, None)


def setting_count(D):
    """ Number of coincidence outcomes needed for a D-mode witness: 12 per pair. """
    return 12 * (D * (D - 1) // 2)


def all_settings(mode_set):
    return [SubspaceSetting(k, l, basis) for k, l in mode_set.pairs() for basis in BASES]


class CoincidenceDataset(object):
    """ Coincidence counts keyed by setting, four outcomes each (pp, pm, mp, mm).

    `flux` is the expected number of detected pairs when the whole state is measured; subspace weights are
    recovered as z-basis sums divided by it.  Expectation-mode datasets hold exact (non-integer) expected counts.
    """

    def __init__(self, mode_set, flux=None, expectation=False, seed=None):
        self.mode_set = mode_set
        self.flux = flux
        self.expectation = expectation
        self.seed = seed
        self._counts = {}

    def __repr__(self):
        return "<CoincidenceDataset D={} settings={}>".format(self.mode_set.D, len(self._counts))

    def __len__(self):
        return len(self._counts)

    def __contains__(self, setting_):
        return setting_ in self._counts

    def add(self, setting_, counts):
        """ Store the four outcome counts of `setting_`.  Missing outcomes may be passed as NaN. """
        if setting_ in self._counts:
            raise IngestionError("Duplicate counts for setting {}".format(setting_))
        if setting_.l >= self.mode_set.D:
            raise IngestionError("Setting {} lies outside the {}-mode set".format(setting_, self.mode_set.D))

        counts = np.array(counts, dtype=float)
        if counts.shape != (4,):
            raise IngestionError("Four outcome counts are required per setting")
        if np.any(counts < 0):
            raise IngestionError("Negative count for setting {}".format(setting_))
        self._counts[setting_] = counts

    def set_count(self, setting_, outcome, count):
        """ Store a single outcome count, creating the setting if needed. """
        if setting_ not in self._counts:
            self.add(setting_, np.full(4, np.nan))

        column = OUTCOMES.index(outcome)
        if not np.isnan(self._counts[setting_][column]):
            raise IngestionError("Duplicate count for {} outcome {}".format(setting_, outcome))
        if count < 0:
            raise IngestionError("Negative count for {} outcome {}".format(setting_, outcome))
        self._counts[setting_][column] = count

    def counts(self, setting_):
        return self._counts[setting_].copy()

    def count(self, setting_, outcome):
        return float(self._counts[setting_][OUTCOMES.index(outcome)])

    def settings(self):
        return sorted(self._counts, key=lambda s: (s.k, s.l, BASES.index(s.basis)))

    def entries(self):
        """ Yields (setting, outcome, count) in canonical order. """
        for setting_ in self.settings():
            for outcome, value in zip(OUTCOMES, self._counts[setting_]):
                if not np.isnan(value):
                    yield setting_, outcome, value

    def missing(self, pairs=None):
        """ Every (k, l, basis, outcome) the witness needs but the dataset lacks. """
        pairs = self.mode_set.pairs() if pairs is None else pairs
        absent = []
        for k, l in pairs:
            for basis in BASES:
                counts = self._counts.get(SubspaceSetting(k, l, basis))
                for column, outcome in enumerate(OUTCOMES):
                    if counts is None or np.isnan(counts[column]):
                        absent.append((k, l, basis, outcome))
        return absent

    def as_array(self, pairs=None):
        """ Counts as an array of shape (pairs, bases, outcomes); raises MissingPairError when incomplete. """
        pairs = self.mode_set.pairs() if pairs is None else pairs
        absent = self.missing(pairs)
        if absent:
            raise MissingPairError(absent)

        array = np.empty((len(pairs), len(BASES), len(OUTCOMES)))
        for p, (k, l) in enumerate(pairs):
            for b, basis in enumerate(BASES):
                array[p, b] = self._counts[SubspaceSetting(k, l, basis)]
        return array

    def estimated_flux(self):
        """ Sum over modes of the mean |kk> coincidence count, i.e. the flux of the correlated populations. """
        return float(estimate_rates(self).sum())

    @property
    def scale(self):
        """ The flux used to turn z-basis sums into subspace weights. """
        return self.flux if self.flux else self.estimated_flux()

    def resampled(self, rng):
        """ A copy with every count redrawn as Poisson(observed count). """
        copy = self._copy()
        for setting_ in self.settings():
            counts = self._counts[setting_]
            observed = np.isfinite(counts)
            redrawn = np.full(4, np.nan)
            redrawn[observed] = rng.poisson(counts[observed])
            copy._counts[setting_] = redrawn
        copy.expectation = False
        return copy

    def scaled(self, factor):
        """ A copy with all counts (and the flux) multiplied by `factor`. """
        if factor <= 0:
            raise DomainError("Scale factor must be positive")
        copy = self._copy()
        copy._counts = {s: c * factor for s, c in self._counts.items()}
        copy.flux = self.flux * factor if self.flux else None
        return copy

    def restricted(self, indices):
        """ The dataset on the modes at `indices` (taken in ascending order), re-indexed from zero. """
        indices = sorted(set(indices))
        position = {old: new for new, old in enumerate(indices)}

        copy = CoincidenceDataset(self.mode_set.subset(indices), self.flux, self.expectation, self.seed)
        for setting_, counts in self._counts.items():
            if setting_.k in position and setting_.l in position:
                copy._counts[SubspaceSetting(position[setting_.k], position[setting_.l], setting_.basis)] = \
                    counts.copy()
        return copy

    def _copy(self):
        copy = CoincidenceDataset(self.mode_set, self.flux, self.expectation, self.seed)
        copy._counts = {s: c.copy() for s, c in self._counts.items()}
        return copy


def simulate_counts(state, seed=None, flux=None, settings=None, expectation=False, share_populations=False):
    """ Simulate coincidence counts for `settings` (default: every setting of the state's mode set).

    Args:
        state: CorrelatedState or GeneralTwoPhotonState.
        seed: int or SeedSequence; each setting draws from its own substream keyed by (pair, basis).
        flux: expected number of detected pairs; defaults to the FLUX setting.
        settings: list of SubspaceSetting.
        expectation: store flux * probability instead of sampling.
        share_populations: draw each |kk> population once per mode and reuse it in every pair's z basis.
    Returns:
        CoincidenceDataset.
    """
    flux = setting("FLUX") if flux is None else flux
    if not flux > 0:
        raise DomainError("Flux must be positive, got {}".format(flux))
    if not expectation and seed is None:
        raise DomainError("Sampled counts need a seed")

    settings = all_settings(state.mode_set) if settings is None else settings
    dataset = CoincidenceDataset(state.mode_set, flux=flux, expectation=expectation,
                                 seed=None if expectation else int(streams.seed_sequence(seed).entropy))

    populations = {}
    if share_populations and not expectation:
        diagonal = state.populations
        populations = {k: streams.substream(seed, streams.SIMULATE, 0, k).poisson(flux * max(p, 0.0))
                       for k, p in enumerate(diagonal)}

    for setting_ in settings:
        rates = flux * outcome_probabilities(state, setting_)
        if expectation:
            dataset.add(setting_, rates)
            continue

        generator = streams.substream(seed, streams.SIMULATE, 1, setting_.k, setting_.l, BASES.index(setting_.basis))
        counts = generator.poisson(rates).astype(float)
        if populations and setting_.basis == "z":
            counts[0], counts[3] = populations[setting_.k], populations[setting_.l]
        dataset.add(setting_, counts)

    log.info("Simulated %d settings on %d modes (flux %g)", len(settings), state.D, flux)
    return dataset


def visibility_arrays(counts, scale):
    """ Vectorised estimation from a (pairs, bases, outcomes) count array.

    Returns:
        (V, N): V has shape (pairs, 3) in x, y, z order and N shape (pairs,).  Bases with no counts give V = 0 and
        pairs with no z-basis counts are zeroed entirely.
    """
    if not scale > 0:
        raise IngestionError("Dataset has no flux and no correlated populations to estimate it from")

    totals = counts.sum(axis=-1)
    correlators = np.abs(counts @ OUTCOME_SIGNS)
    with np.errstate(divide="ignore", invalid="ignore"):
        V = np.where(totals > 0, correlators / totals, 0.0)

    weights = totals[:, BASES.index("z")] / scale
    V[weights <= 0] = 0.0
    return V, weights


def estimate_visibilities(dataset, k, l):
    """ VisibilityRecord for pair (k, l) estimated from counts, each basis normalised by its own four counts. """
    counts = dataset.as_array([(k, l)])
    V, weights = visibility_arrays(counts, dataset.scale)
    return VisibilityRecord(V[0, 0], V[0, 1], V[0, 2], weights[0])


def _z_counts(dataset):
    """ D x D matrix of mean z-basis coincidences <ab> over every pair that measures |ab>. """
    D = dataset.mode_set.D
    totals = np.zeros((D, D))
    visits = np.zeros((D, D))

    for setting_ in dataset.settings():
        if setting_.basis != "z":
            continue
        k, l = setting_.pair
        for (a, b), value in zip(((k, k), (k, l), (l, k), (l, l)), dataset.counts(setting_)):
            if not np.isnan(value):
                totals[a, b] += value
                visits[a, b] += 1

    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(visits > 0, totals / visits, 0.0)


def estimate_rates(dataset):
    """ Per-mode rate: mean |kk> coincidence count over every pair containing k. """
    return np.diag(_z_counts(dataset)).copy()


def correlation_matrix(dataset):
    """ z-basis coincidence matrix normalised to unit sum; |kk> on the diagonal, cross-talk |kl> off it. """
    matrix = _z_counts(dataset)
    total = matrix.sum()
    return matrix / total if total > 0 else matrix
