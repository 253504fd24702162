import logging

import click

from lgwitness.errors import ConfigError
from lgwitness.witness.robustness import KINDS, robustness_study
from lgwitness.witness.plots import write_rows
from lgwitness.commands.config import output_stream, write_json

log = logging.getLogger(__name__)

TRIAL_HEADER = ["index", "kind", "strength", "W"]


def robustness(config):
    """ Run the perturbation study and write the trial table (CSV) or trials plus summary (JSON). """
    kinds = tuple(config.kinds.split(",")) if config.kinds else KINDS
    unknown = set(kinds) - set(KINDS)
    if unknown:
        raise ConfigError("Unknown --kinds {}; expected some of {}".format(sorted(unknown), ",".join(KINDS)))

    result = robustness_study(config.state(), kinds=kinds, n_trials=config.trials,
                              strength_max=config.strength_max, seed=config.seed)

    if config.format == "json":
        write_json(result.to_json(), config.output)
    else:
        with output_stream(config.output) as f:
            write_rows(f, TRIAL_HEADER, [list(trial) for trial in result.trials])

    summary = result.summary()
    for kind, stats in sorted(summary.items()):
        log.info("%s: %.1f%% of %d trials with W <= W0", kind, 100 * stats["fraction_not_above"], stats["trials"])
        if config.output:
            click.echo("{}: W <= W0 in {:.1%} of {} trials".format(kind, stats["fraction_not_above"], stats["trials"]))
    return result
