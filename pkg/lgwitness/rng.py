"""
Reproducible random substreams.

Every stochastic routine takes a seed (an int or a numpy SeedSequence) rather than a live generator, and derives one
independent stream per unit of work from (seed, key...).  Results therefore do not depend on the order or the
parallel schedule in which the units run.
"""
import numpy as np

from lgwitness.errors import DomainError

# Namespaces keep streams of different routines apart when they share a seed.
SIMULATE = 1
RESAMPLE = 2
PERTURB_STATE = 3
PERTURB_PROJECTORS = 4
SEARCH = 5
ROBUSTNESS = 6


def seed_sequence(seed):
    """ Coerce an int seed or an existing SeedSequence into a SeedSequence. """
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if seed is None:
        raise DomainError("A seed is required for stochastic routines")
    return np.random.SeedSequence(int(seed))


def child(seed, *key):
    """ The SeedSequence addressed by `key` (a tuple of non-negative ints) under `seed`. """
    root = seed_sequence(seed)
    spawn_key = tuple(root.spawn_key) + tuple(int(k) for k in key)
    return np.random.SeedSequence(root.entropy, spawn_key=spawn_key)


def substream(seed, *key):
    """ Returns a Generator for the substream addressed by `key`. """
    return np.random.default_rng(child(seed, *key))
