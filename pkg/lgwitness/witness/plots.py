"""
Plot data (not plots): per-mode contributions, subset trajectories and per-subspace visibilities as CSV or JSON rows.
"""
import csv
import json

from lgwitness.witness.models import per_mode_contribution

PER_MODE_HEADER = ["k", "n", "l", "contribution"]
TRAJECTORY_HEADER = ["size", "certified_d", "reference_d", "W"]
VISIBILITY_HEADER = ["k", "l", "na", "la", "nb", "lb", "vx", "vy", "vz", "sv", "n_ab"]


def per_mode_rows(table):
    """ Average V_x + V_y + V_z of every mode with all other modes. """
    contributions = per_mode_contribution(table)
    return [[k, mode.n, mode.l, float(contributions[k])] for k, mode in enumerate(table.mode_set)]


def trajectory_rows(result):
    """ One row per subset size; reference_d is the maximally entangled value d = D'. """
    return [[step.size, step.certified_d, step.size, step.W] for step in result.trajectory]


def visibility_rows(table):
    rows = []
    for (k, l), record in sorted(table.records.items()):
        a, b = table.mode_set[k], table.mode_set[l]
        rows.append([k, l, a.n, a.l, b.n, b.l, record.vx, record.vy, record.vz, record.total, record.n])
    return rows


def write_rows(f, header, rows, _format="csv"):
    """ Write `rows` to the open text file `f` as CSV, or as a JSON list of objects. """
    if _format == "json":
        json.dump([dict(zip(header, row)) for row in rows], f, sort_keys=True)
        return

    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
