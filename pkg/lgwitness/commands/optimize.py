import logging

import click

from lgwitness.filters import format_trajectory
from lgwitness.witness.models import exhaustive_subset, greedy_subset
from lgwitness.witness.plots import TRAJECTORY_HEADER, trajectory_rows, write_rows
from lgwitness.commands.config import output_stream, write_json

log = logging.getLogger(__name__)


def optimize(config):
    """ Search for the mode subset certifying the highest dimension and write the trajectory. """
    table, _ = config.source()
    result = exhaustive_subset(table) if config.exhaustive else greedy_subset(table)
    best_modes = [table.mode_set[k].to_dict() for k in result.best_subset]

    if config.format == "json":
        write_json({
            "best_d": result.best_d,
            "best_subset": list(result.best_subset),
            "best_modes": best_modes,
            "trajectory": [dict(zip(TRAJECTORY_HEADER, row)) for row in trajectory_rows(result)],
        }, config.output)
    else:
        with output_stream(config.output) as f:
            write_rows(f, TRAJECTORY_HEADER, trajectory_rows(result))

    log.info("Best subset of %d modes certifies d = %d", len(result.best_subset), result.best_d)
    if config.output:
        click.echo(format_trajectory(result.trajectory))
        click.echo("Best subset {} certifies d = {}".format(",".join(str(k) for k in result.best_subset),
                                                           result.best_d))
    return result
