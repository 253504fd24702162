"""
Laguerre-Gauss modes: indexing, field evaluation at the waist and numerical overlaps.

The flat basis used everywhere else is the list position of a mode inside its ModeSet, |LG_{n,l}> = |k>.
"""
import json
import logging
from collections import namedtuple

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from lgwitness import setting
from lgwitness.errors import DomainError, InvalidModeSetError, QuadratureError, IngestionError

log = logging.getLogger(__name__)

FieldSample = namedtuple("FieldSample", ["amplitude", "r", "phi"])


class ModeIndex(namedtuple("ModeIndex", ["n", "l"])):
    """ LG quantum numbers: radial node number `n` >= 0 and azimuthal (OAM) number `l`. """
    __slots__ = ()

    def __new__(cls, n, l):
        if int(n) != n or int(l) != l:
            raise InvalidModeSetError("Mode numbers must be integers, got ({}, {})".format(n, l))
        if n < 0:
            raise InvalidModeSetError("Radial number n must be >= 0, got {}".format(n))
        return super(ModeIndex, cls).__new__(cls, int(n), int(l))

    def __repr__(self):
        return "<LG {},{}>".format(self.n, self.l)

    def to_dict(self):
        return {"n": self.n, "l": self.l}


class ModeSet(object):
    """ Ordered, duplicate-free list of modes.  A mode's flat index k is its position in the list. """

    def __init__(self, modes):
        self.modes = tuple(m if isinstance(m, ModeIndex) else ModeIndex(*m) for m in modes)

        seen = set()
        duplicates = [m for m in self.modes if m in seen or seen.add(m)]
        if duplicates:
            raise InvalidModeSetError("Duplicate modes in mode set: {}".format(duplicates))

        self._positions = {m: k for k, m in enumerate(self.modes)}

    def __repr__(self):
        return "<ModeSet D={}>".format(self.D)

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, k):
        return self.modes[k]

    def __eq__(self, other):
        return isinstance(other, ModeSet) and self.modes == other.modes

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.modes)

    @property
    def D(self):
        return len(self.modes)

    def index(self, mode):
        """ Flat index of `mode`. """
        try:
            return self._positions[ModeIndex(*mode)]
        except KeyError:
            raise InvalidModeSetError("Mode {} is not in this mode set".format(tuple(mode)))

    def pairs(self):
        """ All flat index pairs (k, l) with k < l, in row-major order. """
        return [(k, l) for k in range(self.D) for l in range(k + 1, self.D)]

    def subset(self, indices):
        """ A new ModeSet holding the modes at `indices`, in the given order. """
        return ModeSet([self.modes[k] for k in indices])

    def to_json(self):
        return [m.to_dict() for m in self.modes]

    @classmethod
    def from_json(cls, data):
        try:
            return cls([ModeIndex(entry["n"], entry["l"]) for entry in data])
        except (KeyError, TypeError) as e:
            raise IngestionError("Mode entries need integer 'n' and 'l' keys: {}".format(e))

    @classmethod
    def default(cls, D):
        """ Placeholder mode set for synthetic states: OAM ladder (0,0), (0,1), ..., (0,D-1). """
        return cls([ModeIndex(0, l) for l in range(D)])


def enumerate_modes(l_max=0, n_max=0, selection=None):
    """ Build a ModeSet.

    Without `selection`, returns every (n, l) with n <= n_max and |l| <= l_max, sorted by n then l.  With an explicit
    `selection` the list is taken as-is (order preserved) after checking it is duplicate-free.
    """
    if selection is not None:
        return ModeSet(selection)

    if l_max < 0 or n_max < 0:
        raise DomainError("l_max and n_max must be >= 0")

    return ModeSet([ModeIndex(n, l) for n in range(n_max + 1) for l in range(-l_max, l_max + 1)])


def load_mode_set(path):
    """ Read a mode set from a JSON array of {"n": int, "l": int}. """
    try:
        with open(path) as f:
            data = json.load(f)
    except (IOError, OSError, ValueError) as e:
        raise IngestionError("Could not read mode file {}: {}".format(path, e))

    return ModeSet.from_json(data)


def dump_mode_set(mode_set, path):
    with open(path, "w") as f:
        json.dump(mode_set.to_json(), f, indent=2)


def normalization(mode):
    """ N_{n,l} such that the field has unit L2 norm over the transverse plane. """
    n, abs_l = mode.n, abs(mode.l)
    return np.sqrt(2.0 / np.pi * np.exp(gammaln(n + 1) - gammaln(n + abs_l + 1)))


def lg_field(mode, r, phi, w0=None):
    """ Evaluate the LG_{n,l} field at the waist plane (z = 0).

    Args:
        mode: ModeIndex.
        r: radius (scalar or array), same units as w0.
        phi: azimuth in radians (scalar or array, broadcast against r).
        w0: beam waist, defaults to the W0 setting.
    Returns:
        Complex amplitude(s), normalised so the integral of |LG|^2 r dr dphi is 1.
    """
    w0 = setting("W0") if w0 is None else w0
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)

    if not np.isfinite(w0) or w0 <= 0:
        raise DomainError("Beam waist must be positive and finite, got {}".format(w0))
    if not (np.all(np.isfinite(r)) and np.all(np.isfinite(phi))):
        raise DomainError("Field coordinates must be finite")
    if np.any(r < 0):
        raise DomainError("Radius must be >= 0")

    abs_l = abs(mode.l)
    rho2 = 2.0 * r ** 2 / w0 ** 2
    radial = (normalization(mode) / w0) * np.sqrt(rho2) ** abs_l * np.exp(-r ** 2 / w0 ** 2) \
        * eval_genlaguerre(mode.n, abs_l, rho2)

    return radial * np.exp(1j * mode.l * phi)


def sample_field(mode, r, phi, w0=None):
    """ Returns the field at a single point as a FieldSample. """
    return FieldSample(complex(lg_field(mode, r, phi, w0)), float(r), float(phi))


class QuadratureConfig(object):
    """ Radial Gauss-Legendre on [0, r_cut * w0] times a uniform azimuthal trapezoid. """

    def __init__(self, r_cut=None, radial_nodes=None, azimuthal_nodes=None, tol=None, w0=None):
        self.r_cut = setting("QUADRATURE_R_CUT") if r_cut is None else r_cut
        self.radial_nodes = setting("QUADRATURE_RADIAL_NODES") if radial_nodes is None else radial_nodes
        self.azimuthal_nodes = setting("QUADRATURE_AZIMUTHAL_NODES") if azimuthal_nodes is None else azimuthal_nodes
        self.tol = setting("QUADRATURE_TOL") if tol is None else tol
        self.w0 = setting("W0") if w0 is None else w0

        if self.r_cut <= 0 or self.radial_nodes <= 0 or self.azimuthal_nodes <= 0:
            raise DomainError("Quadrature cutoff and node counts must be positive")

    def __repr__(self):
        return "<QuadratureConfig r_cut={} nodes={}x{}>".format(self.r_cut, self.radial_nodes, self.azimuthal_nodes)

    def grid(self):
        """ Returns (r, phi, weights) on the full 2D grid, weights already including the r Jacobian. """
        x, wx = np.polynomial.legendre.leggauss(self.radial_nodes)
        r_max = self.r_cut * self.w0
        r = 0.5 * r_max * (x + 1.0)
        wr = 0.5 * r_max * wx * r

        phi = 2.0 * np.pi * np.arange(self.azimuthal_nodes) / self.azimuthal_nodes
        wphi = np.full(self.azimuthal_nodes, 2.0 * np.pi / self.azimuthal_nodes)

        R, PHI = np.meshgrid(r, phi, indexing="ij")
        return R, PHI, np.outer(wr, wphi)


def gram_matrix(mode_set, quadrature=None):
    """ Pairwise overlaps <a|b> = integral of LG_a conj(LG_b) r dr dphi for every mode pair of `mode_set`.

    Each field is evaluated once on the shared grid.  Raises QuadratureError if any self-overlap strays from 1 by more
    than the configured tolerance.
    """
    quadrature = quadrature or QuadratureConfig()
    R, PHI, weights = quadrature.grid()

    fields = np.array([lg_field(mode, R, PHI, quadrature.w0).ravel() for mode in mode_set])
    gram = (fields * weights.ravel()) @ fields.conj().T

    norms = np.real(np.diag(gram))
    worst = int(np.argmax(np.abs(norms - 1.0)))
    if abs(norms[worst] - 1.0) > quadrature.tol:
        log.warning("Quadrature under-resolved for %r: self-overlap %.3e", mode_set[worst], norms[worst])
        raise QuadratureError("Self-overlap of {} is {:.9f}; increase the cutoff or node counts".format(
            tuple(mode_set[worst]), norms[worst]))

    return gram


def mode_overlap(a, b, quadrature=None):
    """ Numerical inner product of two LG modes, see gram_matrix. """
    a, b = ModeIndex(*a), ModeIndex(*b)
    if a == b:
        return complex(gram_matrix(ModeSet([a]), quadrature)[0, 0])
    return complex(gram_matrix(ModeSet([a, b]), quadrature)[0, 1])
