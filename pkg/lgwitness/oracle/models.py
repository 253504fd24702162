"""
Brute-force ground truth for small D.

Nothing here uses the closed forms of the other modules: subspace states are cut out of the full density matrix with
explicit projectors and the correlators are evaluated with full D^2 x D^2 operators.
"""
import functools
import logging
from collections import namedtuple

import numpy as np

from lgwitness import setting
from lgwitness import rng as streams
from lgwitness.errors import CapacityError, DomainError, InvalidStateError
from lgwitness.measurement.models import f_value, subspace_pauli
from lgwitness.states.models import random_correlated_state

log = logging.getLogger(__name__)

SearchResult = namedtuple("SearchResult", ["best_W", "best_state", "evaluated"])


class OracleConfig(object):

    def __init__(self, d_cap=None, tol=None, search_iters=None, rank_tol=None):
        self.d_cap = setting("SMALL_D_CAP") if d_cap is None else d_cap
        self.tol = setting("ORACLE_TOL") if tol is None else tol
        self.search_iters = setting("ORACLE_SEARCH_ITERS") if search_iters is None else search_iters
        self.rank_tol = setting("ORACLE_RANK_TOL") if rank_tol is None else rank_tol

        if self.d_cap < 2:
            raise DomainError("d_cap must be >= 2, got {}".format(self.d_cap))
        if not self.tol > 0:
            raise DomainError("tol must be positive, got {}".format(self.tol))

    def __repr__(self):
        return "<OracleConfig d_cap={} tol={} iters={}>".format(self.d_cap, self.tol, self.search_iters)

    def check_capacity(self, D):
        if D > self.d_cap:
            raise CapacityError("D = {} exceeds the oracle cap of {}".format(D, self.d_cap))


@functools.lru_cache(maxsize=None)
def _pair_operators(D, k, l):
    """ (projector onto span{k,l} (x) span{k,l}, zz - yy + xx) as D^2 x D^2 matrices. """
    local = np.zeros((D, D))
    local[k, k] = local[l, l] = 1.0
    projector = np.kron(local, local)

    correlator = sum(
        sign * np.kron(subspace_pauli(k, l, axis, D), subspace_pauli(k, l, axis, D))
        for axis, sign in (("z", 1.0), ("y", -1.0), ("x", 1.0))
    )
    return projector, correlator


def brute_force_witness(state, config=None):
    """ Sum over pairs of g(rho_kl), each rho_kl = P rho P / Tr(P rho P) with an explicit projector P. """
    config = config or OracleConfig()
    config.check_capacity(state.D)
    general = state.to_general(config.d_cap)
    rho, D = general.rho, general.D

    total = 0.0
    for k, l in general.mode_set.pairs():
        projector, correlator = _pair_operators(D, k, l)
        projected = projector @ rho @ projector
        weight = float(np.real(np.trace(projected)))
        if weight <= setting("ZERO_WEIGHT_TOL"):
            continue
        total += float(np.real(np.trace(correlator @ projected))) / weight
    return total


def schmidt_rank(amplitudes, tol=None):
    """ Number of singular values of the amplitude matrix M (psi = sum M_ij |i>|j>) above tol * max. """
    tol = setting("ORACLE_RANK_TOL") if tol is None else tol
    amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=complex))
    if not np.any(amplitudes):
        raise InvalidStateError("Amplitude matrix is zero")

    singular_values = np.linalg.svd(amplitudes, compute_uv=False)
    return int(np.sum(singular_values > tol * singular_values[0]))


def f_total(state, config=None):
    """ sum over pairs of f_kl on the full, un-normalised state. """
    config = config or OracleConfig()
    config.check_capacity(state.D)
    general = state.to_general(config.d_cap)
    return float(sum(f_value(general, k, l) for k, l in general.mode_set.pairs()))


def random_rank_d_search(D, d, iters=None, seed=None, pool=None, config=None):
    """ Largest brute-force witness over random mixtures of rank-<=d correlated pure states.

    Every iteration draws from its own substream (SEARCH, i).  States in `pool` are evaluated first, so known
    candidates (e.g. the bound-saturating mixture) take part in the maximum.

    Returns:
        SearchResult(best_W, best_state, evaluated).
    """
    config = config or OracleConfig()
    config.check_capacity(D)
    if not 1 <= d <= D:
        raise DomainError("Need 1 <= d <= D, got d={}, D={}".format(d, D))
    iters = config.search_iters if iters is None else iters

    best_W, best_state, evaluated = -np.inf, None, 0
    for state in pool or []:
        W = brute_force_witness(state, config)
        evaluated += 1
        if W > best_W:
            best_W, best_state = W, state

    for i in range(iters):
        state = random_correlated_state(D, d, streams.substream(seed, streams.SEARCH, i))
        W = brute_force_witness(state, config)
        evaluated += 1
        if W > best_W:
            best_W, best_state = W, state

    log.debug("Searched %d rank-%d states in D = %d: max W = %.6f", evaluated, d, D, best_W)
    return SearchResult(float(best_W), best_state, evaluated)
