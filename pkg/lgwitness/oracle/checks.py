"""
Oracle checks run by `manage.py verify`.
"""
import logging
from collections import namedtuple

import numpy as np

from lgwitness import rng as streams
from lgwitness.oracle.models import OracleConfig, brute_force_witness, f_total, random_rank_d_search, schmidt_rank
from lgwitness.states.models import (correlated_pure, max_witness_decomposition, max_witness_state,
                                     random_correlated_state, random_elements)
from lgwitness.witness.models import VisibilityTable, bound, f_bound, witness_sum

log = logging.getLogger(__name__)

CheckResult = namedtuple("CheckResult", ["name", "passed", "detail"])


def check_tightness(config, max_D=6):
    """ The bound-saturating mixture reaches Dd + D(D-3)/2 for every D <= max_D and d <= D. """
    worst = 0.0
    for D in range(2, min(max_D, config.d_cap) + 1):
        for d in range(1, D + 1):
            expected = D * d + D * (D - 3) / 2.0
            worst = max(worst, abs(brute_force_witness(max_witness_state(D, d), config) - expected))
    return CheckResult("tightness", worst <= 1e-6, "max deviation {:.3e}".format(worst))


def check_schmidt_ranks(config, max_D=6):
    """ Every element of the canonical decomposition of max_witness_state(D, d) has Schmidt rank d. """
    failures = []
    for D in range(2, min(max_D, config.d_cap) + 1):
        for d in range(1, D + 1):
            ranks = {schmidt_rank(e.amplitude_matrix(D), config.rank_tol) for e in max_witness_decomposition(D, d)}
            if ranks != {d}:
                failures.append((D, d, sorted(ranks)))
    return CheckResult("schmidt_rank", not failures, "failures {}".format(failures) if failures else "ok")


def check_soundness(config, seed, iters=None, dimensions=(2, 3, 4, 5)):
    """ No random rank-d correlated state exceeds bound(D, d), for every d <= D. """
    violations = []
    cases = 0
    for D in (D for D in dimensions if D <= config.d_cap):
        for d in range(1, D + 1):
            cases += 1
            result = random_rank_d_search(D, d, iters, streams.child(seed, streams.SEARCH, D, d), config=config)
            if result.best_W > bound(D, d) + config.tol:
                violations.append((D, d, result.best_W))
    detail = "violations {}".format(violations) if violations else "ok over {} (D, d) cases".format(cases)
    return CheckResult("soundness", not violations, detail)


def check_f_bound(config, seed, iters=None, D=4, d=2):
    """ sum f_kl <= 2d + D - 3 for random rank-d correlated pure states. """
    iters = config.search_iters if iters is None else iters
    worst = -np.inf
    for i in range(iters):
        element, = random_elements(D, d, streams.substream(seed, streams.SEARCH, 0, i), n_elements=1)
        worst = max(worst, f_total(correlated_pure(element.amplitude_vector(D)), config))
    return CheckResult("f_bound", worst <= f_bound(D, d) + config.tol,
                       "max {:.6f} against {}".format(worst, f_bound(D, d)))


def check_path_equivalence(config, seed, iters=None, dimensions=(2, 3, 4, 5)):
    """ Brute force and the closed-form visibility table agree on correlated states. """
    iters = config.search_iters if iters is None else iters
    worst = 0.0
    for D in (D for D in dimensions if D <= config.d_cap):
        for i in range(iters):
            generator = streams.substream(seed, streams.SEARCH, 1, D, i)
            state = random_correlated_state(D, int(generator.integers(1, D + 1)), generator)
            fast = witness_sum(VisibilityTable.from_state(state))
            worst = max(worst, abs(brute_force_witness(state, config) - fast))
    return CheckResult("path_equivalence", worst <= config.tol, "max deviation {:.3e}".format(worst))


def run_checks(seed, iters=None, config=None):
    config = config or OracleConfig()
    results = [
        check_tightness(config),
        check_schmidt_ranks(config),
        check_soundness(config, seed, iters),
        check_f_bound(config, seed, iters),
        check_path_equivalence(config, seed, iters),
    ]
    for result in results:
        log.info("Check %s: %s (%s)", result.name, "passed" if result.passed else "FAILED", result.detail)
    return results
