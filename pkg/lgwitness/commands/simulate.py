import logging

import click

from lgwitness.measurement.io import dataset_to_json, write_csv
from lgwitness.measurement.models import setting_count, simulate_counts
from lgwitness.commands.config import output_stream, write_json

log = logging.getLogger(__name__)


def simulate(config):
    """ Simulate the coincidence counts of every setting and write them as CSV or JSON.

    With --dry-run only the number of coincidence outcomes is printed.
    """
    if config.dry_run:
        mode_set = config.mode_set()
        if mode_set is None:
            mode_set = config.state().mode_set
        count = setting_count(mode_set.D)
        log.info("%d modes need %d coincidence outcomes", mode_set.D, count)
        click.echo(count)
        return count

    state = config.state()
    dataset = simulate_counts(state, seed=config.seed, flux=config.flux, expectation=config.expectation,
                              share_populations=config.share_populations)

    if config.format == "json":
        write_json(dataset_to_json(dataset), config.output)
    else:
        with output_stream(config.output) as f:
            write_csv(dataset, f)

    log.info("Wrote %d settings to %s", len(dataset), config.output or "stdout")
    return dataset
