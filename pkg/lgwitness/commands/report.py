import json
import logging

import click

from lgwitness.errors import ConfigError, IngestionError
from lgwitness.filters import format_report
from lgwitness.witness.models import WitnessReport, greedy_subset
from lgwitness.witness.plots import (PER_MODE_HEADER, TRAJECTORY_HEADER, VISIBILITY_HEADER, per_mode_rows,
                                     trajectory_rows, visibility_rows, write_rows)
from lgwitness.commands.config import output_stream

log = logging.getLogger(__name__)

PLOTS = ("per-mode", "trajectory", "visibilities", "summary")


def _load_report(path):
    try:
        with open(path) as f:
            return WitnessReport.from_json(json.load(f))
    except (IOError, OSError, ValueError, KeyError) as e:
        raise IngestionError("Could not read report {}: {}".format(path, e))


def report(config):
    """ Emit plot data for a dataset or state, or re-render a saved WitnessReport as text (--plot summary). """
    plot = config.plot or "summary"
    if plot not in PLOTS:
        raise ConfigError("Unknown --plot {!r}; expected one of {}".format(plot, ", ".join(PLOTS)))

    if plot == "summary":
        if not config.input:
            raise ConfigError("--plot summary needs --input REPORT.json")
        text = format_report(_load_report(config.input))
        with output_stream(config.output) as f:
            f.write(text + "\n")
        return text

    table, _ = config.source()
    if plot == "per-mode":
        header, rows = PER_MODE_HEADER, per_mode_rows(table)
    elif plot == "trajectory":
        header, rows = TRAJECTORY_HEADER, trajectory_rows(greedy_subset(table))
    else:
        header, rows = VISIBILITY_HEADER, visibility_rows(table)

    with output_stream(config.output) as f:
        write_rows(f, header, rows, config.format)
    log.info("Wrote %d %s rows", len(rows), plot)
    return rows
