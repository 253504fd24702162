"""
Robustness of the witness against imperfect states and imperfect measurements.

The witness is re-evaluated from measurement operators applied to the full D^2 x D^2 state, so both perfect and
perturbed detection operators go through the same code path.  Per subspace and basis the correlator is

    E = (P(++) + P(--) - P(+-) - P(-+)) / (P(++) + P(--) + P(+-) + P(-+))

and each pair contributes E_z - E_y + E_x.

Detection model for one photon, basis and pair, with eps+, eps-, delta drawn uniformly from [0, strength]:

    P+' = (1 - eps+) P+ + eps+ P- + delta Q
    P-' = (1 - eps-) P- + eps- P+ + delta Q

where Q projects onto the modes outside the pair.  The operators stay positive but are no longer orthogonal.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy.stats import spearmanr

from lgwitness import setting
from lgwitness import rng as streams
from lgwitness.errors import DomainError
from lgwitness.measurement.models import BASES, OUTCOME_SIGNS, OUTCOMES, projector_set
from lgwitness.states.models import perturb_state

log = logging.getLogger(__name__)

KINDS = ("state", "projector", "both")

RobustnessTrial = namedtuple("RobustnessTrial", ["index", "kind", "strength", "W"])


def ideal_povms(D):
    """ dict (k, l, basis) -> dict outcome -> (A, B) single-photon operators for every pair k < l. """
    return {
        (k, l, basis): projector_set(k, l, basis, D)
        for k in range(D) for l in range(k + 1, D) for basis in BASES
    }


def perturbed_povms(D, strength, rng):
    """ Detection operators with flip errors and out-of-subspace leakage, drawn independently per photon. """
    if strength < 0:
        raise DomainError("Perturbation strength must be >= 0, got {}".format(strength))

    povms = {}
    for (k, l, basis), ideal in ideal_povms(D).items():
        plus, minus = ideal["pp"][0], ideal["mm"][0]
        outside = np.eye(D)
        outside[k, k] = outside[l, l] = 0.0

        photons = []
        for _ in range(2):
            eps_plus, eps_minus, delta = rng.uniform(0.0, strength, size=3) if strength else (0.0, 0.0, 0.0)
            photons.append((
                (1.0 - eps_plus) * plus + eps_plus * minus + delta * outside,
                (1.0 - eps_minus) * minus + eps_minus * plus + delta * outside,
            ))

        (a_plus, a_minus), (b_plus, b_minus) = photons
        povms[(k, l, basis)] = dict(zip(OUTCOMES, (
            (a_plus, b_plus), (a_plus, b_minus), (a_minus, b_plus), (a_minus, b_minus)
        )))
    return povms


def _probability(tensor, a, b):
    """ Tr((A (x) B) rho) with rho given as tensor[a, b, a', b']. """
    return float(np.real(np.einsum("ba,dc,acbd->", a, b, tensor)))


def measured_witness(state, povms=None):
    """ Sum over pairs of E_z - E_y + E_x computed from detection operators on the full state.

    Args:
        state: GeneralTwoPhotonState (or anything with to_general()).
        povms: output of ideal_povms / perturbed_povms; ideal projectors when omitted.
    """
    general = state.to_general()
    tensor = general.tensor
    povms = ideal_povms(general.D) if povms is None else povms

    W = 0.0
    for k, l in general.mode_set.pairs():
        for basis, sign in zip(("z", "y", "x"), (1.0, -1.0, 1.0)):
            probabilities = np.array([_probability(tensor, *povms[(k, l, basis)][o]) for o in OUTCOMES])
            total = probabilities.sum()
            if total > setting("ZERO_WEIGHT_TOL"):
                W += sign * float(probabilities @ OUTCOME_SIGNS) / total
    return W


def strength_ramp(n_trials, strength_max):
    """ n_trials strengths evenly spaced over [0, strength_max]. """
    if n_trials == 1:
        return np.zeros(1)
    return np.linspace(0.0, strength_max, n_trials)


class RobustnessResult(object):

    def __init__(self, W0, trials):
        self.W0 = W0
        self.trials = trials

    def __repr__(self):
        return "<RobustnessResult W0={:.4f} trials={}>".format(self.W0, len(self.trials))

    def summary(self, tol=1e-9):
        """ Per kind: trial count, fraction of trials with W <= W0, mean W, and the Spearman rank correlation of W
        with strength together with its p-value. """
        summary = {}
        for kind in sorted({t.kind for t in self.trials}):
            trials = [t for t in self.trials if t.kind == kind]
            strengths = np.array([t.strength for t in trials])
            values = np.array([t.W for t in trials])

            rho = p_value = None
            if len(trials) > 2 and np.ptp(strengths) > 0 and np.ptp(values) > 0:
                correlation = spearmanr(strengths, values)
                rho, p_value = float(correlation[0]), float(correlation[1])

            summary[kind] = {
                "trials": len(trials),
                "fraction_not_above": float(np.mean(values <= self.W0 + tol)),
                "mean_W": float(values.mean()),
                "spearman_rho": rho,
                "spearman_p": p_value,
            }
        return summary

    def to_json(self):
        return {
            "W0": self.W0,
            "summary": self.summary(),
            "trials": [list(t) for t in self.trials],
        }


def robustness_study(state, kinds=KINDS, n_trials=None, strength_max=None, seed=None, d_cap=None):
    """ Re-evaluate the witness under perturbations of ramping strength.

    For every kind, trial i uses strength strength_max * i / (n_trials - 1) and draws its perturbations from
    substreams keyed by (kind, i), so any subset of trials can be recomputed on its own.

    Args:
        state: CorrelatedState (or GeneralTwoPhotonState) within the full-matrix cap.
        kinds: any of "state" (imperfect correlations), "projector" (imperfect detection) and "both".
        n_trials: trials per kind, defaults to ROBUSTNESS_TRIALS.
        strength_max: largest strength of the ramp, defaults to ROBUSTNESS_STRENGTH_MAX.
        seed: int or SeedSequence.
    Returns:
        RobustnessResult.
    """
    n_trials = setting("ROBUSTNESS_TRIALS") if n_trials is None else n_trials
    strength_max = setting("ROBUSTNESS_STRENGTH_MAX") if strength_max is None else strength_max
    if n_trials < 1:
        raise DomainError("Need at least one trial")

    unknown = set(kinds) - set(KINDS)
    if unknown:
        raise DomainError("Unknown perturbation kinds {}".format(sorted(unknown)))
    streams.seed_sequence(seed)

    embedded = state.to_general(d_cap)
    W0 = measured_witness(embedded)
    log.info("Unperturbed witness %.6f on D = %d", W0, embedded.D)

    trials = []
    for kind in (k for k in KINDS if k in kinds):
        kind_key = KINDS.index(kind)
        for index, strength in enumerate(strength_ramp(n_trials, strength_max)):
            perturbed = embedded
            if kind in ("state", "both"):
                generator = streams.substream(seed, streams.PERTURB_STATE, kind_key, index)
                perturbed = perturb_state(embedded, strength, generator, d_cap)

            povms = None
            if kind in ("projector", "both"):
                generator = streams.substream(seed, streams.PERTURB_PROJECTORS, kind_key, index)
                povms = perturbed_povms(embedded.D, strength, generator)

            trials.append(RobustnessTrial(index, kind, float(strength), measured_witness(perturbed, povms)))

    return RobustnessResult(W0, trials)
