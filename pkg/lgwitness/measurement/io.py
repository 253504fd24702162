"""
Coincidence file formats.

CSV: header `na,la,nb,lb,basis,outcome,count`, one row per (setting, outcome).  (na, la) and (nb, lb) are the two
modes spanning the subspace; rows may list them in either order.  The JSON mirror holds the same rows under "rows"
plus the dataset metadata.
"""
import csv
import json
import logging

import numpy as np

from lgwitness.errors import IngestionError, InvalidModeSetError
from lgwitness.measurement.models import BASES, OUTCOMES, CoincidenceDataset, SubspaceSetting
from lgwitness.modes.models import ModeIndex, ModeSet

log = logging.getLogger(__name__)

CSV_HEADER = ["na", "la", "nb", "lb", "basis", "outcome", "count"]

# Swapping the two modes of a subspace swaps the mixed outcomes.
_SWAPPED = {"pp": "pp", "pm": "mp", "mp": "pm", "mm": "mm"}


def _format_count(value, expectation):
    return repr(float(value)) if expectation else str(int(round(value)))


def _rows(dataset):
    for setting_, outcome, value in dataset.entries():
        a, b = dataset.mode_set[setting_.k], dataset.mode_set[setting_.l]
        yield {
            "na": a.n, "la": a.l, "nb": b.n, "lb": b.l,
            "basis": setting_.basis,
            "outcome": outcome,
            "count": value if dataset.expectation else int(round(value)),
        }


def write_csv(dataset, f):
    """ Write `dataset` to the open text file `f`. """
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in _rows(dataset):
        writer.writerow([row["na"], row["la"], row["nb"], row["lb"], row["basis"], row["outcome"],
                         _format_count(row["count"], dataset.expectation)])


def _parse_count(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _dataset_from_rows(rows, mode_set=None, flux=None, expectation=None, seed=None):
    rows = list(rows)

    parsed = []
    for number, row in enumerate(rows, 1):
        try:
            a = ModeIndex(int(row["na"]), int(row["la"]))
            b = ModeIndex(int(row["nb"]), int(row["lb"]))
            count = _parse_count(row["count"]) if isinstance(row["count"], str) else row["count"]
            basis, outcome = row["basis"], row["outcome"]
        except (KeyError, TypeError, ValueError) as e:
            raise IngestionError("Row {}: {}".format(number, e))

        if basis not in BASES:
            raise IngestionError("Row {}: unknown basis {!r}".format(number, basis))
        if outcome not in OUTCOMES:
            raise IngestionError("Row {}: unknown outcome {!r}".format(number, outcome))
        if a == b:
            raise IngestionError("Row {}: both modes are {}".format(number, tuple(a)))
        parsed.append((a, b, basis, outcome, count))

    if mode_set is None:
        modes = {m for a, b, _, _, _ in parsed for m in (a, b)}
        mode_set = ModeSet(sorted(modes))

    if expectation is None:
        expectation = any(isinstance(count, float) for *_, count in parsed)

    dataset = CoincidenceDataset(mode_set, flux=flux, expectation=expectation, seed=seed)
    for a, b, basis, outcome, count in parsed:
        try:
            k, l = mode_set.index(a), mode_set.index(b)
        except InvalidModeSetError as e:
            raise IngestionError(str(e))
        if k > l:
            k, l, outcome = l, k, _SWAPPED[outcome]
        dataset.set_count(SubspaceSetting(k, l, basis), outcome, count)

    log.info("Read %d coincidence rows over %d modes", len(parsed), mode_set.D)
    return dataset


def read_csv(f, mode_set=None, flux=None):
    """ Read a dataset from the open text file `f`.

    Without `mode_set`, the modes are those appearing in the file, sorted by (n, l).
    """
    reader = csv.DictReader(f)
    if reader.fieldnames != CSV_HEADER:
        raise IngestionError("Expected CSV header {}, got {}".format(",".join(CSV_HEADER), reader.fieldnames))
    return _dataset_from_rows(reader, mode_set=mode_set, flux=flux)


def dataset_to_json(dataset):
    return {
        "modes": dataset.mode_set.to_json(),
        "flux": dataset.flux,
        "expectation": dataset.expectation,
        "seed": dataset.seed,
        "rows": list(_rows(dataset)),
    }


def dataset_from_json(data, mode_set=None):
    try:
        mode_set = mode_set or ModeSet.from_json(data["modes"])
        return _dataset_from_rows(data["rows"], mode_set=mode_set, flux=data.get("flux"),
                                  expectation=data.get("expectation"), seed=data.get("seed"))
    except (KeyError, TypeError, AttributeError) as e:
        raise IngestionError("Malformed dataset JSON: {}".format(e))


def load_dataset(path, mode_set=None, flux=None):
    """ Read a dataset from a .csv or .json file. """
    try:
        with open(path, newline="") as f:
            if path.endswith(".json"):
                dataset = dataset_from_json(json.load(f), mode_set=mode_set)
                if flux:
                    dataset.flux = flux
                return dataset
            return read_csv(f, mode_set=mode_set, flux=flux)
    except (IOError, OSError) as e:
        raise IngestionError("Could not read dataset {}: {}".format(path, e))
    except ValueError as e:
        raise IngestionError("Could not parse dataset {}: {}".format(path, e))


def dump_dataset(dataset, path, _format="csv"):
    with open(path, "w", newline="") as f:
        if _format == "json":
            json.dump(dataset_to_json(dataset), f, sort_keys=True)
        else:
            write_csv(dataset, f)


def counts_equal(a, b):
    """ True when two datasets hold the same settings and counts. """
    if a.mode_set != b.mode_set or a.settings() != b.settings():
        return False
    return all(np.array_equal(a.counts(s), b.counts(s), equal_nan=True) for s in a.settings())
