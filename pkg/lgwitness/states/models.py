"""
Two-photon states in the LG basis.

Two representations are kept:

- CorrelatedState: rho = sum_{k,l} c_kl |kk><ll|, stored as the D x D matrix c.  Index k stands for the photon pair
  (LG_{n,l} on photon A, LG_{n,-l} on photon B); the OAM anti-correlation lives in that pairing.
- GeneralTwoPhotonState: the full D^2 x D^2 density matrix, only for small D (oracle work, perturbation studies).

Both are immutable after construction and validated on the way in.
"""
import csv
import itertools
import json
from fractions import Fraction

import numpy as np

from lgwitness import setting
from lgwitness.errors import CapacityError, DomainError, IngestionError, InvalidStateError
from lgwitness.modes.models import ModeIndex, ModeSet


def _hermitian(matrix, tol):
    """ Exactly Hermitian copy of `matrix`; InvalidStateError when it is further than `tol` from Hermitian. """
    matrix = np.array(matrix, dtype=complex)
    if not np.allclose(matrix, matrix.conj().T, rtol=0.0, atol=tol):
        raise InvalidStateError("Matrix is not Hermitian (max deviation {:.3e})".format(
            np.abs(matrix - matrix.conj().T).max()))
    return (matrix + matrix.conj().T) / 2.0


def _mode_set_for(mode_set, D):
    mode_set = mode_set if mode_set is not None else ModeSet.default(D)
    if mode_set.D != D:
        raise InvalidStateError("State has dimension {} but the mode set holds {} modes".format(D, mode_set.D))
    return mode_set


class CorrelatedState(object):
    """ Perfectly correlated two-photon state rho = sum c_kl |kk><ll|. """

    representation = "correlated"

    def __init__(self, coeffs, mode_set=None, tol=None):
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.ndim != 2 or coeffs.shape[0] != coeffs.shape[1]:
            raise InvalidStateError("Correlated coefficients must be a square matrix, got shape {}".format(coeffs.shape))

        self.tol = setting("STATE_TOL") if tol is None else tol
        self.coeffs = _hermitian(coeffs, self.tol)
        self.coeffs.flags.writeable = False
        self.mode_set = _mode_set_for(mode_set, coeffs.shape[0])
        self.validate()

    def __repr__(self):
        return "<CorrelatedState D={} trace={:.6f}>".format(self.D, self.trace)

    @property
    def D(self):
        return self.coeffs.shape[0]

    @property
    def trace(self):
        return float(np.real(np.trace(self.coeffs)))

    @property
    def populations(self):
        """ <kk|rho|kk> for every k. """
        return np.real(np.diag(self.coeffs)).copy()

    def validate(self):
        """ Raises InvalidStateError unless the state is Hermitian, PSD and has trace in (0, 1]. """
        if not np.array_equal(self.coeffs, self.coeffs.conj().T):
            raise InvalidStateError("Coefficient matrix is not Hermitian")

        min_eig = np.linalg.eigvalsh(self.coeffs).min()
        if min_eig < -self.tol:
            raise InvalidStateError("Coefficient matrix is not positive semidefinite (min eigenvalue {:.3e})".format(
                min_eig))

        if not 0.0 < self.trace <= 1.0 + self.tol:
            raise InvalidStateError("Trace must lie in (0, 1], got {}".format(self.trace))

        return True

    def block(self, k, l):
        """ Un-normalised projection onto span{|kk>, |kl>, |lk>, |ll>}, in that order. """
        c = self.coeffs
        block = np.zeros((4, 4), dtype=complex)
        block[0, 0], block[0, 3] = c[k, k], c[k, l]
        block[3, 0], block[3, 3] = c[l, k], c[l, l]
        return block

    def to_general(self, d_cap=None):
        """ Embed into the full D^2 x D^2 space, normalised to unit trace. """
        D = self.D
        rho = np.zeros((D * D, D * D), dtype=complex)
        diagonal = np.arange(D) * (D + 1)  # flat index of |kk>
        rho[np.ix_(diagonal, diagonal)] = self.coeffs / self.trace
        return GeneralTwoPhotonState(rho, self.mode_set, d_cap=d_cap, tol=self.tol)

    def restricted(self, indices):
        """ The (un-normalised) state on the modes at `indices`. """
        indices = list(indices)
        return CorrelatedState(self.coeffs[np.ix_(indices, indices)], self.mode_set.subset(indices), tol=self.tol)

    def to_json(self):
        return {
            "representation": self.representation,
            "modes": self.mode_set.to_json(),
            "matrix": _matrix_to_json(self.coeffs),
        }


class GeneralTwoPhotonState(object):
    """ Full density matrix on the D^2-dimensional two-photon space, flat index a * D + b for |a>_A |b>_B. """

    representation = "general"

    def __init__(self, rho, mode_set=None, d_cap=None, tol=None):
        rho = np.array(rho, dtype=complex)
        D = int(round(np.sqrt(rho.shape[0])))
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or D * D != rho.shape[0]:
            raise InvalidStateError("Density matrix must be D^2 x D^2, got shape {}".format(rho.shape))

        d_cap = setting("SMALL_D_CAP") if d_cap is None else d_cap
        if D > d_cap:
            raise CapacityError("D = {} exceeds the full-matrix cap of {}".format(D, d_cap))

        self.tol = setting("STATE_TOL") if tol is None else tol
        self.rho = _hermitian(rho, self.tol)
        self.rho.flags.writeable = False
        self.mode_set = _mode_set_for(mode_set, D)
        self.d_cap = d_cap
        self.validate()

    def __repr__(self):
        return "<GeneralTwoPhotonState D={}>".format(self.D)

    @property
    def D(self):
        return self.mode_set.D

    @property
    def trace(self):
        return float(np.real(np.trace(self.rho)))

    @property
    def populations(self):
        """ <kk|rho|kk> for every k. """
        return np.real(np.einsum("kkkk->k", self.tensor)).copy()

    @property
    def tensor(self):
        """ rho reshaped to [a, b, a', b'] for <a b|rho|a' b'>. """
        D = self.D
        return self.rho.reshape(D, D, D, D)

    def validate(self):
        min_eig = np.linalg.eigvalsh(self.rho).min()
        if min_eig < -self.tol:
            raise InvalidStateError("Density matrix is not positive semidefinite (min eigenvalue {:.3e})".format(
                min_eig))
        if abs(self.trace - 1.0) > self.tol:
            raise InvalidStateError("Density matrix must have unit trace, got {}".format(self.trace))
        return True

    def block(self, k, l):
        """ Un-normalised projection onto span{|kk>, |kl>, |lk>, |ll>}, in that order. """
        idx = [k, l]
        return self.tensor[np.ix_(idx, idx, idx, idx)].reshape(4, 4).copy()

    def to_general(self, d_cap=None):
        return self

    def to_json(self):
        return {
            "representation": self.representation,
            "modes": self.mode_set.to_json(),
            "matrix": _matrix_to_json(self.rho),
        }


class DecompositionElement(object):
    """ One term p_alpha |psi_alpha><psi_alpha| of a correlated mixture, |psi_alpha> = sum_{k in alpha} lambda_k |kk>. """

    def __init__(self, support, weight, amplitudes):
        self.support = tuple(int(k) for k in support)
        self.weight = float(weight)
        self.amplitudes = np.array(amplitudes, dtype=complex)

        if len(set(self.support)) != len(self.support) or len(self.support) == 0:
            raise InvalidStateError("Support must be a non-empty set of distinct indices")
        if len(self.amplitudes) != len(self.support):
            raise InvalidStateError("One amplitude per support index is required")
        if not 0.0 <= self.weight <= 1.0:
            raise InvalidStateError("Weight must lie in [0, 1], got {}".format(self.weight))
        if abs(np.sum(np.abs(self.amplitudes) ** 2) - 1.0) > 1e-9:
            raise InvalidStateError("Element amplitudes must be normalised")

    def __repr__(self):
        return "<DecompositionElement support={} p={:.4f}>".format(self.support, self.weight)

    @property
    def rank(self):
        return int(np.count_nonzero(self.amplitudes))

    def amplitude_vector(self, D):
        vector = np.zeros(D, dtype=complex)
        vector[list(self.support)] = self.amplitudes
        return vector

    def amplitude_matrix(self, D):
        """ M with psi = sum M_ij |i>|j>; diagonal for correlated pure states. """
        return np.diag(self.amplitude_vector(D))


def correlated_pure(amplitudes, mode_set=None):
    """ Rank-1 correlated state sum a_k |kk>, normalised: c_kl = a_k conj(a_l) / sum |a|^2. """
    amplitudes = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.sum(np.abs(amplitudes) ** 2)
    if amplitudes.size == 0 or norm == 0:
        raise InvalidStateError("Amplitude vector must not be all zero")

    return CorrelatedState(np.outer(amplitudes, amplitudes.conj()) / norm, mode_set)


def maximally_entangled(D, mode_set=None):
    """ |phi_D> = sum |ii> / sqrt(D). """
    if D < 1:
        raise DomainError("D must be >= 1, got {}".format(D))
    return correlated_pure(np.ones(D), mode_set)


def max_witness_state(D, d, mode_set=None):
    """ Uniform mixture over all d-subsets alpha of |phi_alpha^d> = sum_{k in alpha} |kk> / sqrt(d).

    The mixture saturates the witness bound Dd + D(D-3)/2.  Its coefficients have the closed form c_kk = 1/D and
    c_kl = (d-1) / (D(D-1)) for k != l.
    """
    if not 1 <= d <= D:
        raise DomainError("Need 1 <= d <= D, got d={}, D={}".format(d, D))

    diagonal = float(Fraction(1, D))
    off_diagonal = float(Fraction(d - 1, D * (D - 1))) if D > 1 else 0.0

    coeffs = np.full((D, D), off_diagonal, dtype=complex)
    np.fill_diagonal(coeffs, diagonal)
    return CorrelatedState(coeffs, mode_set)


def max_witness_decomposition(D, d):
    """ The canonical decomposition of max_witness_state(D, d) into rank-d elements. """
    if not 1 <= d <= D:
        raise DomainError("Need 1 <= d <= D, got d={}, D={}".format(d, D))

    subsets = list(itertools.combinations(range(D), d))
    weight = 1.0 / len(subsets)
    return [DecompositionElement(alpha, weight, np.full(d, 1.0 / np.sqrt(d))) for alpha in subsets]


def mixture(elements, mode_set=None, D=None, max_rank=None):
    """ Correlated state sum_alpha p_alpha |psi_alpha><psi_alpha| from DecompositionElements.

    Args:
        elements: iterable of DecompositionElement; their weights must sum to 1.
        mode_set: optional ModeSet fixing the dimension.
        D: dimension when no mode set is given; defaults to the largest support index + 1.
        max_rank: if given, every element's support must hold at most this many modes.
    """
    elements = list(elements)
    if not elements:
        raise InvalidStateError("A mixture needs at least one element")
    if abs(sum(e.weight for e in elements) - 1.0) > 1e-9:
        raise InvalidStateError("Element weights must sum to 1")

    if mode_set is not None:
        D = mode_set.D
    elif D is None:
        D = max(max(e.support) for e in elements) + 1

    if max_rank is not None and any(len(e.support) > max_rank for e in elements):
        raise InvalidStateError("Element support exceeds rank {}".format(max_rank))
    if any(max(e.support) >= D for e in elements):
        raise InvalidStateError("Element support outside the {}-mode space".format(D))

    coeffs = np.zeros((D, D), dtype=complex)
    for element in elements:
        vector = element.amplitude_vector(D)
        coeffs += element.weight * np.outer(vector, vector.conj())

    return CorrelatedState(coeffs, mode_set)


def random_elements(D, d, rng, n_elements=None):
    """ Random rank-<=d decomposition: random supports, Dirichlet weights, non-negative amplitudes. """
    n_elements = n_elements or int(rng.integers(1, 2 * D + 1))
    weights = rng.dirichlet(np.ones(n_elements))

    elements = []
    for weight in weights:
        size = int(rng.integers(1, d + 1))
        support = np.sort(rng.choice(D, size=size, replace=False))
        amplitudes = np.abs(rng.standard_normal(size))
        amplitudes /= np.linalg.norm(amplitudes)
        elements.append(DecompositionElement(support, weight, amplitudes))

    # Dirichlet weights are normalised only up to rounding
    total = sum(e.weight for e in elements)
    for element in elements:
        element.weight /= total

    return elements


def random_correlated_state(D, d, rng, mode_set=None):
    """ Random perfectly correlated mixture of Schmidt-rank <= d pure states. """
    return mixture(random_elements(D, d, rng), mode_set, D=D, max_rank=d)


SPDC_MODELS = ("exponential", "table")


def spdc_profile(model, params, mode_set):
    """ Amplitude vector a_{n,l} for the SPDC-like state sum a_k |kk>, normalised to unit length.

    Args:
        model: "exponential" or "table".
        params: for "exponential", (lambda_l, lambda_n) with a_{n,l} proportional to
            exp(-|l| / (2 lambda_l) - n / (2 lambda_n)); infinite lambdas are allowed.  For "table", a mapping from
            (n, l) to a per-mode count rate; a_k is proportional to sqrt(rate_k).
        mode_set: the ModeSet fixing the order of the returned vector.
    """
    if model == "exponential":
        lambda_l, lambda_n = params
        if not (lambda_l > 0 and lambda_n > 0):
            raise DomainError("Profile lengths must be positive, got ({}, {})".format(lambda_l, lambda_n))

        exponents = np.array([-abs(m.l) / (2.0 * lambda_l) - m.n / (2.0 * lambda_n) for m in mode_set])
        amplitudes = np.exp(exponents - exponents.max())

    elif model == "table":
        table = {ModeIndex(*mode): rate for mode, rate in params.items()}
        missing = [m for m in mode_set if m not in table]
        if missing:
            raise IngestionError("Rate table has no entry for modes {}".format([tuple(m) for m in missing]))

        rates = np.array([table[m] for m in mode_set], dtype=float)
        if np.any(rates < 0) or not np.any(rates > 0):
            raise IngestionError("Rates must be non-negative and not all zero")
        amplitudes = np.sqrt(rates)

    else:
        raise DomainError("Unknown profile model {!r}; expected one of {}".format(model, SPDC_MODELS))

    return amplitudes / np.linalg.norm(amplitudes)


def load_rate_table(path):
    """ Read a per-mode rate table from CSV with header n,l,rate. """
    table = {}
    try:
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                table[ModeIndex(int(row["n"]), int(row["l"]))] = float(row["rate"])
    except (IOError, OSError, KeyError, ValueError) as e:
        raise IngestionError("Could not read rate table {}: {}".format(path, e))

    return table


def perturb_state(state, strength, rng, d_cap=None):
    """ Add imperfect (cross-) correlations to a state.

    The state is embedded in the full D^2 space and a random Hermitian matrix supported on the uncorrelated
    subspace span{|ab>: a != b} is added, with trace norm 2 * strength (so roughly `strength` of positive mass).
    The sum is projected back to a density matrix by clipping negative eigenvalues and renormalising the trace.

    Args:
        state: CorrelatedState or GeneralTwoPhotonState.
        strength: perturbation size, >= 0.  Zero returns the exact embedding.
        rng: numpy Generator.
        d_cap: full-matrix cap, defaults to SMALL_D_CAP.
    Returns:
        GeneralTwoPhotonState.
    """
    if strength < 0:
        raise DomainError("Perturbation strength must be >= 0, got {}".format(strength))

    general = state.to_general(d_cap)
    if strength == 0:
        return general

    D = general.D
    uncorrelated = [a * D + b for a in range(D) for b in range(D) if a != b]
    m = len(uncorrelated)
    if m == 0:
        return general

    gaussian = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    noise = (gaussian + gaussian.conj().T) / 2.0
    noise *= 2.0 * strength / np.abs(np.linalg.eigvalsh(noise)).sum()

    rho = np.array(general.rho)
    rho[np.ix_(uncorrelated, uncorrelated)] += noise

    eigenvalues, vectors = np.linalg.eigh(rho)
    rho = (vectors * np.clip(eigenvalues, 0.0, None)) @ vectors.conj().T
    rho /= np.real(np.trace(rho))

    return GeneralTwoPhotonState(rho, general.mode_set, d_cap=general.d_cap, tol=general.tol)


def _matrix_to_json(matrix):
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def _matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def state_from_json(data, d_cap=None):
    try:
        representation = data["representation"]
        mode_set = ModeSet.from_json(data["modes"])
        matrix = _matrix_from_json(data["matrix"])
    except (KeyError, TypeError, ValueError) as e:
        raise IngestionError("Malformed state file: {}".format(e))

    if representation == CorrelatedState.representation:
        return CorrelatedState(matrix, mode_set)
    if representation == GeneralTwoPhotonState.representation:
        return GeneralTwoPhotonState(matrix, mode_set, d_cap=d_cap)

    raise IngestionError("Unknown state representation {!r}".format(representation))


def load_state(path, d_cap=None):
    try:
        with open(path) as f:
            data = json.load(f)
    except (IOError, OSError, ValueError) as e:
        raise IngestionError("Could not read state file {}: {}".format(path, e))

    return state_from_json(data, d_cap=d_cap)


def dump_state(state, path):
    with open(path, "w") as f:
        json.dump(state.to_json(), f)
