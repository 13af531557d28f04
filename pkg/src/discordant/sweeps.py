"""Parameter sweeps producing figure data as plain tables ready for CSV.

Each sweep is a function returning a :class:`Table`; :data:`FIGURES` maps the
command-line figure names to them.  Rows are computed independently and may be
spread over worker processes (see :mod:`discordant.parallel`); they are always
returned in grid order.
"""
import csv
import functools
import sys
from dataclasses import dataclass

import numpy as np

from .ellipsoid import EllipsoidParams, boost, to_mueller
from .errors import DomainError, SingularityError, ValidationError
from .optimizer import (
    boundary_curves,
    discord,
    find_z0,
    g_derivative,
    sa_of_z,
    sa_vn_theta,
    transition_points,
)
from .parallel import ordered_map
from .qcore import mueller_row

EX1 = mueller_row(m03=0.23, m11=0.76, m22=0.6, m30=0.3, m33=0.8)


@dataclass(frozen=True)
class Table:
    header: tuple
    rows: list

    def column(self, name):
        j = self.header.index(name)
        return [row[j] for row in self.rows]


def write_csv(table, fh=None):
    """Write ``table`` as CSV (header first); floats use ``repr`` so output is exact."""
    fh = sys.stdout if fh is None else fh
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _default_ax_values(a_z, z_c):
    c = boundary_curves(a_z, z_c)
    mid = (c.ax_V + c.ax_H) / 2
    step = c.ax_H - c.ax_V
    return (c.ax_V - step, c.ax_V, mid, c.ax_H, c.ax_H + step)


def _z_grid(e, n):
    # the top endpoint is excluded: S(z) and G(z) are continuous there but S has p2 = 1/0
    return np.linspace(e.z_bottom, e.z_top, n + 1)[:-1]


# --------------------------------------------------------------------------
# S(z) and G(z) for several a_x
# --------------------------------------------------------------------------

def _sa_z_rows(a_x, a_z, z_c, z_I, n):
    e = EllipsoidParams(a_x, 0.0, a_z, z_c, z_I)
    rows = []
    for z in _z_grid(e, n):
        z = float(z)
        rows.append((float(a_x), z, sa_of_z(e, z, extrapolate=True), int(z <= z_I)))
    return rows


def sweep_sa_z(a_z=0.58, z_c=0.4, z_I=0.6, ax=None, n=200):
    """Three-element value ``S(z)`` for a set of ``a_x`` (default: the two boundary values and points around them).

    ``physical`` is 1 where ``z <= z_I``, the range in which all weights are non-negative.
    """
    ax = _default_ax_values(a_z, z_c) if ax is None else tuple(ax)
    parts = ordered_map(functools.partial(_sa_z_rows, a_z=a_z, z_c=z_c, z_I=z_I, n=int(n)), ax)
    return Table(("a_x", "z", "S_A", "physical"), [r for p in parts for r in p])


def _g_z_rows(a_x, a_z, z_c, n):
    e = EllipsoidParams(a_x, 0.0, a_z, z_c, z_c)
    rows = []
    for z in np.linspace(e.z_bottom, e.z_top, n):
        try:
            g = g_derivative(e, float(z))
        except SingularityError:
            g = float("nan")
        rows.append((float(a_x), float(z), g))
    return rows


def sweep_g_z(a_z=0.58, z_c=0.4, ax=None, n=200):
    """``G(z)``, which carries the sign of ``dS/dz``; it is independent of ``z_I``."""
    ax = _default_ax_values(a_z, z_c) if ax is None else tuple(ax)
    parts = ordered_map(functools.partial(_g_z_rows, a_z=a_z, z_c=z_c, n=int(n)), ax)
    return Table(("a_x", "z", "G"), [r for p in parts for r in p])


# --------------------------------------------------------------------------
# the wedge and its width
# --------------------------------------------------------------------------

def _wedge_row(a_z, z_c):
    c = boundary_curves(a_z, z_c)
    cp = np.sqrt(max((1 - a_z) ** 2 - z_c ** 2, 0.0))
    return (float(a_z), c.ax_V, c.ax_H, float(a_z), float(cp))


def _a_z_grid(z_c, n, lo=None, hi=None):
    lo = 1e-3 if lo is None else lo
    hi = (1 - z_c) * (1 - 1e-3) if hi is None else hi
    if not 0 < lo <= hi < 1 - z_c:
        raise DomainError(f"a_z range [{lo!r}, {hi!r}] must lie in (0, 1 - z_c)")
    return [float(v) for v in np.linspace(lo, hi, n)]


def sweep_wedge(z_c=0.4, n=200, az_min=None, az_max=None):
    """Boundary curves ``ax_V``, ``ax_H`` across ``a_z``, with the line ``a_x = a_z``.

    ``ax_cp`` is the largest ``a_x`` compatible with positivity for the centred
    state (``z_I = z_c``, ``a_y = 0``): ``sqrt((1 - a_z)^2 - z_c^2)``.
    """
    grid = _a_z_grid(z_c, int(n), az_min, az_max)
    rows = ordered_map(functools.partial(_wedge_row, z_c=z_c), grid)
    return Table(("a_z", "ax_V", "ax_H", "ax_eq_az", "ax_cp"), rows)


def _delta_rows(z_c, n):
    rows = []
    for a_z in _a_z_grid(z_c, n, hi=(1 - z_c) * (1 - 1e-3)):
        c = boundary_curves(a_z, z_c)
        rows.append((float(z_c), a_z, c.width))
    return rows


DELTA_ZC = (0.95, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)


def sweep_delta(zc=DELTA_ZC, n=200):
    """Wedge width ``delta(a_z) = ax_H - ax_V`` for several ``z_c``."""
    parts = ordered_map(functools.partial(_delta_rows, n=int(n)), [float(v) for v in zc])
    return Table(("z_c", "a_z", "delta"), [r for p in parts for r in p])


# --------------------------------------------------------------------------
# a_x scan through the three regimes, boost sweep
# --------------------------------------------------------------------------

def _ax_scan_row(alpha, a_y, a_z, z_c, z_I, marker=""):
    e = EllipsoidParams(alpha, a_y, a_z, z_c, z_I)
    m = to_mueller(e)
    rep = discord(m)
    vert = float(sa_vn_theta(m, 0.0))
    horiz = float(sa_vn_theta(m, np.pi / 2))
    theta = rep.scheme.theta
    return (float(alpha), str(rep.scheme.kind), rep.SA_min, rep.D, vert, horiz,
            float(theta), float(rep.scheme.weights[0]), marker)


def sweep_ax_scan(a_y=0.59, a_z=0.58, z_c=0.4, z_I=0.5, ax_min=0.59, ax_max=0.7, n=221):
    """Optimal value, discord and scheme as ``a_x`` crosses the wedge.

    Rows at the two transition values are inserted with ``marker`` set to
    ``E`` (vertical to three-element) and ``F`` (three-element to horizontal).
    ``p_top`` is the probability of the outcome reaching the top of the ellipse.
    """
    a_e, a_f = transition_points(a_z, z_c, z_I)
    grid = [(float(a), "") for a in np.linspace(ax_min, ax_max, int(n))]
    for a, tag in ((a_e, "E"), (a_f, "F")):
        if a is not None and ax_min <= a <= ax_max:
            grid.append((float(a), tag))
    grid.sort(key=lambda item: (item[0], item[1]))
    rows = ordered_map(functools.partial(_ax_scan_star, a_y=a_y, a_z=a_z, z_c=z_c, z_I=z_I), grid)
    header = ("a_x", "kind", "SA_min", "D", "SA_vertical", "SA_horizontal", "theta", "p_top", "marker")
    return Table(header, rows)


def _ax_scan_star(item, **kw):
    alpha, tag = item
    return _ax_scan_row(alpha, kw["a_y"], kw["a_z"], kw["z_c"], kw["z_I"], tag)


def _boost_row(z_I, base, z_c, a_z):
    t = (z_I - z_c) / a_z
    rep = discord(boost(base, np.arctanh(t)))
    return (float(z_I), rep.I, rep.D, rep.C, str(rep.scheme.kind), rep.SA_min)


def sweep_boost(a_z=0.58, z_c=0.4, a_x=0.65, a_y=0.59, n=233):
    """Mutual information, discord and classical correlation as a boost on B moves ``z_I`` across ``(z_c - a_z, z_c + a_z)``.

    The ellipsoid (and hence ``z0``) is the same in every row; ``z0`` is the last column.
    """
    base = to_mueller(EllipsoidParams(a_x, a_y, a_z, z_c, z_c))
    z0 = find_z0(EllipsoidParams(a_x, a_y, a_z, z_c, z_c))
    grid = [float(v) for v in np.linspace(z_c - a_z, z_c + a_z, int(n) + 2)[1:-1]]
    rows = ordered_map(functools.partial(_boost_row, base=base, z_c=z_c, a_z=a_z), grid)
    z0_col = float("nan") if z0 is None else z0
    return Table(("z_I", "I", "D", "C", "kind", "SA_min", "z0"),
                 [r + (z0_col,) for r in rows])


# --------------------------------------------------------------------------
# von Neumann angle sweep
# --------------------------------------------------------------------------

def sweep_vn_theta(m=None, n=181):
    """``S_vN(theta)`` on ``[0, pi/2]`` for ``m`` (default: the manufactured counterexample state)."""
    m = EX1 if m is None else np.asarray(m, dtype=float)
    thetas = np.linspace(0.0, np.pi / 2, int(n))
    vals = sa_vn_theta(m, thetas)
    return Table(("theta", "S_vN"), [(float(t), float(v)) for t, v in zip(thetas, vals)])


FIGURES = {
    "sa-z": sweep_sa_z,
    "g-z": sweep_g_z,
    "wedge": sweep_wedge,
    "delta": sweep_delta,
    "ax-scan": sweep_ax_scan,
    "boost": sweep_boost,
    "vn-theta": sweep_vn_theta,
}


def run_sweep(figure, **params):
    """Run the sweep registered under ``figure`` with keyword overrides."""
    try:
        fn = FIGURES[figure]
    except KeyError:
        raise ValidationError("figure", f"unknown figure {figure!r}; valid: {', '.join(FIGURES)}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise ValidationError("sweep_params", f"{figure}: {exc}") from None
