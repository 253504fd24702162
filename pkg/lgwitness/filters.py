from lgwitness.witness.models import bound


# Number filters
def format_number(value, precision=None):
    """ Integers print bare, other values with `precision` decimals (3 by default). """
    if value is None:
        return "-"
    if float(value).is_integer() and precision is None:
        return "{:d}".format(int(value))
    return "{:.{}f}".format(value, 3 if precision is None else precision)


def format_witness(W, sigma=None):
    """ Returns the witness value with its Monte-Carlo uncertainty, rounded to the uncertainty's first digit.

    Args:
        W: witness value.
        sigma: standard deviation, or None when no resampling was run.
    Returns:
        A string like "W = 35529 ± 6", or "W = 9.829" without sigma.
    """
    if sigma is None:
        return u"W = {}".format(format_number(W))

    if sigma >= 1 or sigma == 0:
        return u"W = {:.0f} ± {:.0f}".format(W, sigma)

    digits = 0
    while round(sigma, digits) == 0:
        digits += 1
    return u"W = {:.{d}f} ± {:.{d}f}".format(W, sigma, d=digits)


def format_bound(D, d):
    """ "101dim: W > 35619" for the threshold certifying `d`-dimensional entanglement. """
    return u"{}dim: W > {}".format(d, bound(D, d - 1))


def format_bounds(D, certified_d, window=1):
    """ The thresholds around `certified_d`, highest dimension first, separated by semicolons. """
    top = min(D, certified_d + window)
    bottom = max(2, certified_d - window)
    return u"; ".join(format_bound(D, d) for d in range(top, bottom - 1, -1))


def format_trajectory(trajectory):
    """ "D'=4: d=2, D'=3: d=3, ..." """
    return u", ".join(u"D'={}: d={}".format(step.size, step.certified_d) for step in trajectory)


def format_report(report):
    """ Multi-line human-readable summary of a WitnessReport. """
    lines = [
        format_witness(report.W, report.sigma),
        u"D = {}, certified dimension d = {}".format(report.D, report.certified_d),
    ]
    if report.D >= 2:
        lines.append(format_bounds(report.D, report.certified_d))
    if report.subset_trajectory:
        best = max(report.subset_trajectory, key=lambda step: (step.certified_d, step.size))
        lines.append(u"Best subset: D' = {} certifies d = {}".format(best.size, best.certified_d))
    if not report.integrity:
        lines.append(u"DATA INTEGRITY FAILURE: W exceeds 3D(D-1)/2")
    return u"\n".join(lines)
