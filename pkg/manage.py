#!/usr/bin/env python

"""
Manager script :)

    python manage.py [--config settings.json] COMMAND [OPTIONS]
"""
import json
import os

import click
from flask.cli import AppGroup, ScriptInfo

from lgwitness import app as application, configure_logging


@click.group(cls=AppGroup)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              help="JSON settings file applied on top of the defaults.")
@click.pass_context
def manager(ctx, config_file):
    """ LG-mode entanglement dimensionality witness. """
    if config_file:
        flask_app = ctx.ensure_object(ScriptInfo).load_app()
        flask_app.config.from_file(os.path.abspath(config_file), load=json.load)
        configure_logging(flask_app)


def mode_options(f):
    f = click.option("--l-max", type=int, help="Largest |l| of the enumerated modes.")(f)
    f = click.option("--n-max", type=int, help="Largest radial number n of the enumerated modes.")(f)
    f = click.option("--mode-file", type=click.Path(), help="JSON list of {\"n\", \"l\"} modes.")(f)
    return f


def state_options(f):
    f = click.option("--state-file", type=click.Path(), help="State JSON file.")(f)
    f = click.option("--profile", help="exponential:LL,LN | table:RATES.csv | amplitudes:a0,a1,... | maximal")(f)
    return f


def source_options(f):
    f = click.option("--input", "input_", type=click.Path(), help="Coincidence dataset (.csv or .json).")(f)
    f = click.option("--flux", type=float, help="Total pair flux, overriding the dataset's own.")(f)
    f = click.option("--modes", help="Comma-separated mode indices to restrict to.")(f)
    return f


def output_options(f):
    f = click.option("--output", type=click.Path(), help="Output file (stdout when omitted).")(f)
    f = click.option("--format", "format_", type=click.Choice(["json", "csv"]), help="Output format (default: csv for a .csv --output, json otherwise).")(f)
    return f


def _run(job, command, **options):
    from lgwitness.commands.config import RunConfig, run_command

    if "input_" in options:
        options["input"] = options.pop("input_")
    if "format_" in options:
        options["_format"] = options.pop("format_")
    return run_command(job, RunConfig(command, **options))


@manager.command()
@mode_options
@state_options
@output_options
@click.option("--flux", type=float, help="Expected number of detected pairs.")
@click.option("--seed", type=int)
@click.option("--expectation", is_flag=True, help="Write expected counts instead of sampling.")
@click.option("--share-populations", is_flag=True, help="Sample each |kk> population once per mode.")
@click.option("--dry-run", is_flag=True, help="Only print the number of coincidence outcomes.")
def simulate(**options):
    """ Simulate a coincidence dataset. """
    from lgwitness.commands.simulate import simulate as _simulate
    _run(_simulate, "simulate", **options)


@manager.command()
@mode_options
@state_options
@source_options
@click.option("--output", type=click.Path(), help="Report JSON file.")
@click.option("--seed", type=int)
@click.option("--resamples", type=int, help="Monte-Carlo resamples (0 to skip).")
def certify(**options):
    """ Compute W and the certified dimension. """
    from lgwitness.commands.certify import certify as _certify
    _run(_certify, "certify", **options)


@manager.command()
@mode_options
@state_options
@source_options
@output_options
@click.option("--exhaustive", is_flag=True, help="Try every subset (small D only).")
def optimize(**options):
    """ Search for the mode subset certifying the highest dimension. """
    from lgwitness.commands.optimize import optimize as _optimize
    _run(_optimize, "optimize", **options)


@manager.command()
@mode_options
@state_options
@output_options
@click.option("--seed", type=int)
@click.option("--trials", type=int, help="Trials per perturbation kind.")
@click.option("--strength-max", type=float, help="Largest perturbation strength.")
@click.option("--kinds", help="Comma-separated subset of state,projector,both.")
def robustness(**options):
    """ Perturbation study of the witness. """
    from lgwitness.commands.robustness import robustness as _robustness
    _run(_robustness, "robustness", **options)


@manager.command()
@click.option("--seed", type=int)
@click.option("--iters", type=int, help="Random states per check.")
@click.option("--output", type=click.Path(), help="Check results JSON file.")
def verify(**options):
    """ Run the brute-force oracle checks. """
    from lgwitness.commands.verify import verify as _verify
    _run(_verify, "verify", **options)


@manager.command()
@mode_options
@state_options
@source_options
@output_options
@click.option("--plot", type=click.Choice(["per-mode", "trajectory", "visibilities", "summary"]))
def report(**options):
    """ Plot data, or a text summary of a saved report. """
    from lgwitness.commands.report import report as _report
    _run(_report, "report", **options)


if __name__ == "__main__":
    manager(obj=ScriptInfo(create_app=lambda: application))
