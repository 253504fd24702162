import logging

import click

from lgwitness.errors import IntegrityError
from lgwitness.oracle.checks import run_checks
from lgwitness.oracle.models import OracleConfig
from lgwitness.commands.config import write_json

log = logging.getLogger(__name__)


def verify(config):
    """ Run the oracle checks; any failure exits with the integrity code. """
    results = run_checks(config.seed, iters=config.iters, config=OracleConfig())

    if config.output:
        write_json({r.name: {"passed": r.passed, "detail": r.detail} for r in results}, config.output)
    for result in results:
        click.echo("{:<18} {}  {}".format(result.name, "ok" if result.passed else "FAILED", result.detail))

    failed = [r.name for r in results if not r.passed]
    if failed:
        raise IntegrityError("Oracle checks failed: {}".format(", ".join(failed)))
    return results
