import logging

import click

from lgwitness.errors import IntegrityError
from lgwitness.filters import format_report
from lgwitness.witness.models import build_report
from lgwitness.commands.config import write_json

log = logging.getLogger(__name__)


def certify(config):
    """ Estimate visibilities (or take them from an exact state), compute W, its uncertainty and the certified
    dimension, and write the report JSON. """
    table, dataset = config.source()
    report = build_report(
        table,
        dataset=dataset,
        n_resamples=config.resamples if dataset is not None and config.resamples >= 2 else None,
        seed=config.seed if dataset is not None and config.resamples >= 2 else None,
    )

    if config.output:
        write_json(report.to_json(), config.output)
    click.echo(format_report(report))

    if not report.integrity:
        raise IntegrityError("W = {} exceeds 3D(D-1)/2 for D = {}".format(report.W, report.D))
    return report
