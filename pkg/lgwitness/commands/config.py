"""
Run configuration shared by the manage.py commands.

Values come from command-line flags; anything left unset falls back to the app config (defaults, then the --config
file).  Paths are checked before any work starts.
"""
import json
import logging
import os
import sys
from contextlib import contextmanager

import click
import numpy as np
import sentry_sdk

from lgwitness import setting
from lgwitness.errors import ConfigError, IntegrityError, WitnessError
from lgwitness.measurement.io import load_dataset
from lgwitness.modes.models import ModeSet, enumerate_modes, load_mode_set
from lgwitness.states.models import (correlated_pure, load_rate_table, load_state, maximally_entangled,
                                     spdc_profile)
from lgwitness.witness.models import VisibilityTable

log = logging.getLogger(__name__)

FORMATS = ("json", "csv")


class RunConfig(object):
    """ Everything a command needs, resolved and validated. """

    # Commands that draw random numbers, and whether they do under the given options
    STOCHASTIC = {
        "simulate": lambda c: not c.expectation and not c.dry_run,
        "certify": lambda c: c.input is not None and c.resamples >= 2,
        "robustness": lambda c: True,
        "verify": lambda c: True,
    }

    def __init__(self, command, l_max=None, n_max=None, mode_file=None, modes=None, state_file=None, profile=None,
                 flux=None, expectation=False, seed=None, resamples=None, trials=None, strength_max=None,
                 kinds=None, input=None, output=None, _format=None, share_populations=False, exhaustive=False,
                 dry_run=False, iters=None, plot=None):
        self.command = command
        self.l_max = l_max
        self.n_max = n_max
        self.mode_file = mode_file
        self.modes = modes
        self.state_file = state_file
        self.profile = profile
        self.flux_override = flux
        self.flux = setting("FLUX") if flux is None else flux
        self.expectation = expectation
        self.seed = seed
        self.resamples = setting("N_RESAMPLES") if resamples is None else resamples
        self.trials = setting("ROBUSTNESS_TRIALS") if trials is None else trials
        self.strength_max = setting("ROBUSTNESS_STRENGTH_MAX") if strength_max is None else strength_max
        self.kinds = kinds
        self.input = input
        self.output = output
        self.format = _format or ("csv" if output and output.endswith(".csv") else "json")
        self.share_populations = share_populations
        self.exhaustive = exhaustive
        self.dry_run = dry_run
        self.iters = iters
        self.plot = plot

    def __repr__(self):
        return "<RunConfig {}>".format(self.command)

    def validate(self):
        for path in (self.mode_file, self.state_file, self.input):
            if path is not None and not os.path.isfile(path):
                raise ConfigError("Input file {} does not exist".format(path))

        if self.output is not None:
            directory = os.path.dirname(os.path.abspath(self.output))
            if not os.path.isdir(directory):
                raise ConfigError("Output directory {} does not exist".format(directory))

        if self.format not in FORMATS:
            raise ConfigError("Unknown format {!r}; expected one of {}".format(self.format, FORMATS))
        if self.state_file and self.profile:
            raise ConfigError("Give either --state-file or --profile, not both")
        if self.mode_file and (self.l_max is not None or self.n_max is not None):
            raise ConfigError("Give either --mode-file or --l-max/--n-max, not both")
        if not self.flux > 0:
            raise ConfigError("--flux must be positive")

        stochastic = self.STOCHASTIC.get(self.command)
        if stochastic and stochastic(self) and self.seed is None:
            raise ConfigError("{} is stochastic and needs --seed".format(self.command))
        return True

    def mode_set(self):
        """ The mode set from --mode-file or --l-max/--n-max, or None when neither was given. """
        if self.mode_file:
            return load_mode_set(self.mode_file)
        if self.l_max is not None or self.n_max is not None:
            return enumerate_modes(self.l_max or 0, self.n_max or 0)
        return None

    def subset(self, D):
        """ Flat indices selected with --modes, or None for all modes. """
        if not self.modes:
            return None
        try:
            indices = sorted({int(token) for token in self.modes.split(",")})
        except ValueError:
            raise ConfigError("--modes takes comma-separated mode indices, got {!r}".format(self.modes))
        if indices[0] < 0 or indices[-1] >= D or len(indices) < 2:
            raise ConfigError("--modes must select at least two of the indices 0..{}".format(D - 1))
        return indices

    def state(self):
        """ The state from --state-file or --profile; ConfigError when neither is given. """
        mode_set = self.mode_set()

        if self.state_file:
            state = load_state(self.state_file)
            if mode_set is not None and mode_set != state.mode_set:
                raise ConfigError("State file modes differ from the requested mode set")
            return state

        if not self.profile:
            raise ConfigError("{} needs --state-file or --profile".format(self.command))

        model, _, params = self.profile.partition(":")
        try:
            if model == "maximal":
                if mode_set is None:
                    raise ConfigError("--profile maximal needs a mode set")
                return maximally_entangled(mode_set.D, mode_set)

            if model == "amplitudes":
                amplitudes = np.array([float(a) for a in params.split(",")])
                mode_set = mode_set or ModeSet.default(len(amplitudes))
                if mode_set.D != len(amplitudes):
                    raise ConfigError("{} amplitudes for {} modes".format(len(amplitudes), mode_set.D))
                return correlated_pure(amplitudes, mode_set)

            if mode_set is None:
                raise ConfigError("--profile {} needs --l-max/--n-max or --mode-file".format(model))
            if model == "exponential":
                lambda_l, lambda_n = (float(p) for p in params.split(","))
                return correlated_pure(spdc_profile("exponential", (lambda_l, lambda_n), mode_set), mode_set)
            if model == "table":
                return correlated_pure(spdc_profile("table", load_rate_table(params), mode_set), mode_set)
        except ValueError as e:
            if isinstance(e, WitnessError):
                raise
            raise ConfigError("Could not parse --profile {!r}: {}".format(self.profile, e))

        raise ConfigError("Unknown profile {!r}; expected exponential:LL,LN, table:PATH, amplitudes:a0,a1,... "
                          "or maximal".format(self.profile))

    def dataset(self):
        """ The --input dataset; --flux overrides the flux stored with the data. """
        return load_dataset(self.input, mode_set=self.mode_set(), flux=self.flux_override)

    def source(self):
        """ (table, dataset) for commands that accept either a dataset (--input) or a state.

        The table is restricted to --modes when given; the dataset is None for exact states.
        """
        if self.input:
            dataset = self.dataset()
            indices = self.subset(dataset.mode_set.D)
            if indices is not None:
                dataset = dataset.restricted(indices)
            return VisibilityTable.from_dataset(dataset), dataset

        table = VisibilityTable.from_state(self.state())
        indices = self.subset(table.D)
        return (table.restricted(indices) if indices is not None else table), None


@contextmanager
def output_stream(path):
    """ Open `path` for writing, or yield stdout when no path is given. """
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="") as f:
        yield f


def write_json(data, path):
    with output_stream(path) as f:
        json.dump(data, f, sort_keys=True, indent=2)
        f.write("\n")


def run_command(job, config):
    """ Validate `config`, run `job(config)` and turn lgwitness errors into exit codes. """
    try:
        config.validate()
        log.info("Running %s", config.command)
        return job(config)
    except IntegrityError as e:
        log.error("%s failed integrity checks: %s", config.command, e)
        sentry_sdk.capture_message(str(e), level="error")
        click.echo("Error: {}".format(e), err=True)
        raise click.exceptions.Exit(e.exit_code)
    except WitnessError as e:
        log.error("%s failed: %s", config.command, e)
        click.echo("Error: {}".format(e), err=True)
        raise click.exceptions.Exit(e.exit_code)
    except Exception as e:
        sentry_sdk.capture_exception(e)
        raise
