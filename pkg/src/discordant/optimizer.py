"""Minimum conditional entropy of an X-state over measurements on B.

Rank-one measurement elements confined to the x-z plane map to points on the
x-z section of the correlation ellipse.  The optimal measurement is either a
von Neumann pair along z (``VerticalVN``), along x (``HorizontalVN``) or a
three-element POVM made of the element reaching the top of the ellipse plus a
symmetric pair at height ``z`` (``ThreePOVM``).  The three-element value as a
function of ``z`` is :func:`sa_of_z`; its derivative has the sign of
:func:`g_derivative`, whose zero ``z0`` fixes the optimal POVM.
"""
import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .ellipsoid import EllipsoidParams, from_mueller
from .entropy import ellipse_radius, global_entropies, s2, spectrum_from_mueller
from .errors import DegenerateInputError, DomainError, SingularityError, ValidationError
from .qcore import canonical_mueller, require_physical, transpose_for_A_side

LN2 = np.log(2.0)
SMALL_R = 1e-4
SINGULAR_R = 1e-12
PURE_TOL = 1e-12
# below this offset from the top of the ellipse G is evaluated by quadrature
QUAD_FRACTION = 0.05
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


class SchemeKind(enum.Enum):
    VERTICAL_VN = "VerticalVN"
    HORIZONTAL_VN = "HorizontalVN"
    THREE_POVM = "ThreePOVM"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MeasurementScheme:
    """Optimal measurement on B.

    Attributes
    ----------
    kind : SchemeKind
    z0 : float or None
        Height of the symmetric pair (three-element POVM only).
    theta : float or None
        Angle of the symmetric pair from the negative z-axis of B's Bloch sphere;
        for the von Neumann schemes 0 (vertical) or pi/2 (horizontal).
    weights : tuple
        Outcome probabilities.
    elements : tuple
        Stokes vectors of the POVM elements, scaled so they sum to ``(2, 0, 0, 0)``.
    """

    kind: SchemeKind
    z0: float = None
    theta: float = None
    weights: tuple = ()
    elements: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class SAMin:
    value: float
    scheme: MeasurementScheme


@dataclass(frozen=True)
class DiscordReport:
    """Entropic summary of a state for measurements on ``side``.

    ``S_A`` and ``S_B`` always refer to the physical subsystems; for
    ``side='B'`` one has ``C = S_A - SA_min`` and ``D = S_B - S_AB + SA_min``,
    for ``side='A'`` the roles of ``S_A`` and ``S_B`` are exchanged.
    ``EoF_complement`` is the entanglement of formation of the complementary
    state of the purifying system with the unmeasured qubit, equal to ``SA_min``.
    """

    S_A: float
    S_B: float
    S_AB: float
    I: float
    C: float
    D: float
    SA_min: float
    scheme: MeasurementScheme
    EoF_complement: float
    side: str = "B"
    ellipsoid: EllipsoidParams = None


# --------------------------------------------------------------------------
# scalar kernels
# --------------------------------------------------------------------------

def x_kernel(r):
    """``X(r) = atanh(r) / (r ln 2)``, with limit ``1/ln 2`` at ``r = 0`` and ``inf`` at ``r = 1``."""
    r = np.asarray(r, dtype=float)
    small = r < SMALL_R
    safe = np.where(small | (r >= 1), 0.5, r)
    out = np.arctanh(safe) / (safe * LN2)
    r2 = r * r
    out = np.where(small, (1 + r2 / 3 + r2 * r2 / 5) / LN2, out)
    out = np.where(r >= 1, np.inf, out)
    return out if out.ndim else float(out)


def y_kernel(r):
    """``Y(r) = 1 / (ln 2 (1 - r^2))``."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(r >= 1, np.inf, 1.0 / (LN2 * (1 - np.minimum(r, 1) ** 2)))
    return out if out.ndim else float(out)


def _y_minus_x_over_r2(r):
    # (Y - X) / r^2 = (1/ln2) sum_{n>=1} 2n/(2n+1) r^(2n-2)
    r = np.asarray(r, dtype=float)
    small = r < SMALL_R
    safe = np.where(small, 0.5, np.minimum(r, 1 - 1e-16))
    direct = (y_kernel(safe) - x_kernel(safe)) / (safe * safe)
    r2 = r * r
    series = (2 / 3 + 4 / 5 * r2 + 6 / 7 * r2 * r2) / LN2
    return np.where(small, series, direct)


def _inv_x(r):
    # 1/X(r), finite on [0, 1]
    r = float(r)
    if r < SMALL_R:
        r2 = r * r
        return LN2 / (1 + r2 / 3 + r2 * r2 / 5)
    if r >= 1:
        return 0.0
    return r * LN2 / np.arctanh(r)


def _q_ratio(r):
    # X/Y = atanh(r) (1 - r^2) / r, equal to 1 at r = 0 and 0 at r = 1
    r = float(r)
    if r < SMALL_R:
        r2 = r * r
        return 1 - 2 * r2 / 3 - 2 * r2 * r2 / 15
    if r >= 1:
        return 0.0
    return np.arctanh(r) * (1 - r * r) / r


# --------------------------------------------------------------------------
# vectorised geometry on the x-z ellipse
# --------------------------------------------------------------------------

def _f(z, a_x, a_z, z_c):
    return s2(ellipse_radius(z, a_x, a_z, z_c))


def _f2(z, a_x, a_z, z_c):
    """Second derivative of f(z) = S2(r(z))."""
    k = a_x * a_x / (a_z * a_z)
    z = np.asarray(z, dtype=float)
    r = np.asarray(ellipse_radius(z, a_x, a_z, z_c))
    g = k * (z - z_c) - z
    return -_y_minus_x_over_r2(r) * g * g - x_kernel(r) * (1 - k)


def _g(z, a_x, a_z, z_c):
    """G on the closed interval, vectorised; the top endpoint uses its limit -f''/2."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    z_t = z_c + a_z
    k = a_x * a_x / (a_z * a_z)
    h = z_t - z
    out = np.empty_like(z)
    far = h >= QUAD_FRACTION * 2 * a_z
    if np.any(far):
        zf, hf = z[far], h[far]
        r = np.asarray(ellipse_radius(zf, a_x, a_z, z_c))
        fprime = x_kernel(r) * (k * (zf - z_c) - zf)
        num = hf * fprime - (s2(min(z_t, 1.0)) - s2(r))
        out[far] = num / (hf * hf)
    near = ~far
    if np.any(near):
        # Taylor remainder: f(z_t) - f(z) - h f'(z) = int_z^{z_t} (z_t - s) f''(s) ds
        zn, hn = z[near], h[near]
        s = zn[:, None] + hn[:, None] * (_GL_NODES[None, :] + 1) / 2
        vals = (z_t - s) * _f2(s, a_x, a_z, z_c)
        integral = (vals @ _GL_WEIGHTS) * hn / 2
        safe_h = np.where(hn > 0, hn, 1.0)
        limit = -_f2(np.full_like(zn, z_t), a_x, a_z, z_c) / 2
        out[near] = np.where(hn > 0, -integral / (safe_h * safe_h), limit)
    return out


def _check_interval(e, z, tol=1e-12):
    if e.a_z <= 0:
        raise DomainError("flat ellipsoid (a_z = 0) has no z-parametrised scheme")
    if z < e.z_bottom - tol or z > e.z_top + tol:
        raise DomainError(f"z = {z!r} outside [{e.z_bottom!r}, {e.z_top!r}]")
    return min(max(z, e.z_bottom), e.z_top)


def sa_of_z(e, z, extrapolate=False):
    """Average conditional entropy of the three-element scheme anchored at height ``z``.

    ``S(z) = p1 f(z_t) + p2 f(z)`` with ``p2 = (z_t - z_I)/(z_t - z)`` and
    ``p1 = 1 - p2``; ``f(z) = S2(r(z))``.  Defined for ``z_c - a_z <= z <= z_I``;
    with ``extrapolate=True`` the same expression is evaluated up to ``z_t``
    (where ``p1 < 0`` and it no longer describes a measurement).
    """
    z = _check_interval(e, z)
    z_t = e.z_top
    if extrapolate:
        if z >= z_t:
            raise DomainError("S(z) has no value at the top of the ellipse")
    else:
        if z > e.z_I + 1e-12:
            raise DomainError(f"z = {z!r} exceeds z_I = {e.z_I!r}: negative weight")
        z = min(z, e.z_I)
    p2 = (z_t - e.z_I) / (z_t - z)
    return float((1 - p2) * s2(min(z_t, 1.0)) + p2 * _f(z, e.a_x, e.a_z, e.z_c))


def g_derivative(e, z):
    """``G(z)``: ``dS/dz = (z_t - z_I) G(z)``; independent of ``z_I``.

    Raises
    ------
    SingularityError
        When ``r(z) >= 1 - 1e-12``, where ``X`` diverges.
    """
    z = _check_interval(e, z)
    r = ellipse_radius(z, e.a_x, e.a_z, e.z_c)
    if r >= 1 - SINGULAR_R:
        raise SingularityError(f"r(z) = {r!r} at the Bloch sphere; G is singular")
    return float(_g(z, e.a_x, e.a_z, e.z_c)[0])


# --------------------------------------------------------------------------
# boundary curves, root and classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryCurves:
    ax_V: float
    ax_H: float

    @property
    def width(self):
        return self.ax_H - self.ax_V


def _curves(a_z, z_c):
    z_t, z_b = z_c + a_z, z_c - a_z
    r_b = abs(z_b)
    f_t = s2(min(z_t, 1.0))
    f_b = s2(min(r_b, 1.0))
    ax_v2 = (f_b - f_t) * _inv_x(r_b) / 2 - a_z * z_b
    q = _q_ratio(z_t)
    den = z_b * q + 2 * a_z + np.sqrt(max(q * (z_b * z_b * q + 4 * a_z * z_c), 0.0))
    ax_h2 = 2 * a_z * a_z * z_t / den
    return BoundaryCurves(float(np.sqrt(max(ax_v2, 0.0))), float(np.sqrt(max(ax_h2, 0.0))))


def boundary_curves(a_z, z_c):
    """Values of ``a_x`` at which ``G`` vanishes at the bottom (``ax_V``) and the top (``ax_H``) of the ellipse.

    Below ``ax_V`` the vertical von Neumann measurement is optimal; at or above
    ``ax_H`` the horizontal one is.  Both equal ``a_z`` when ``z_c = 0``.

    Raises
    ------
    DomainError
        Unless ``0 < a_z``, ``0 <= z_c`` and ``z_c + a_z < 1``.
    """
    if not (a_z > 0 and z_c >= 0 and z_c + a_z < 1):
        raise DomainError(f"need 0 < a_z, 0 <= z_c, z_c + a_z < 1; got a_z={a_z!r}, z_c={z_c!r}")
    return _curves(a_z, z_c)


def _sign_changes(vals):
    s = np.sign(vals)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def find_z0(e, probes=64):
    """Root of ``G`` inside the ellipse when ``ax_V < a_x < ax_H``, else ``None``.

    The bracket comes from a scan over ``probes`` interior points plus both
    endpoints; the root is then polished with Brent's method to full precision.
    A ``RuntimeWarning`` is issued if the scan sees more than one sign change.
    """
    if e.a_z <= 0:
        return None
    curves = _curves(e.a_z, e.z_c)
    if not curves.ax_V < e.a_x < curves.ax_H:
        return None
    a_x, a_z, z_c = e.a_x, e.a_z, e.z_c
    zs = np.linspace(e.z_bottom, e.z_top, probes + 2)
    with np.errstate(all="ignore"):
        vals = _g(zs, a_x, a_z, z_c)
    vals = np.where(np.isfinite(vals), vals, np.sign(vals))
    if _sign_changes(vals) > 1:
        warnings.warn(f"G has {_sign_changes(vals)} sign changes for {e}", RuntimeWarning)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    if idx.size == 0:
        return None
    j = idx[0]
    lo, hi = zs[j], zs[j + 1]
    if vals[j] == 0:
        return float(lo)

    def gfun(z):
        with np.errstate(all="ignore"):
            return float(_g(z, a_x, a_z, z_c)[0])

    return float(brentq(gfun, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def _is_full_sphere(e):
    return e.a_x >= 1 - PURE_TOL and e.a_z >= 1 - PURE_TOL and e.z_c <= PURE_TOL


def _scheme_from_z(e, kind, z0=None):
    """Assemble the measurement descriptor (elements, weights, angle)."""
    z_t, z_b = e.z_top, e.z_bottom
    if kind is SchemeKind.HORIZONTAL_VN:
        return MeasurementScheme(kind, None, np.pi / 2, (0.5, 0.5),
                                 ((1.0, 1.0, 0.0, 0.0), (1.0, -1.0, 0.0, 0.0)))
    if e.a_z <= 0:
        raise DomainError("flat ellipsoid only admits the horizontal scheme")
    m03 = (e.z_I - e.z_c) / e.a_z
    if kind is SchemeKind.VERTICAL_VN:
        p_t = (e.z_I - z_b) / (2 * e.a_z)
        return MeasurementScheme(kind, None, 0.0, (p_t, 1 - p_t),
                                 ((1.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, -1.0)))
    d = e.z_I - e.z_c
    m33 = (e.a_z * e.a_z - d * d + d * e.z_I) / e.a_z
    cos_t = float(np.clip((e.z_I - z0) / (m33 - z0 * m03), -1.0, 1.0))
    sin_t = float(np.sqrt(1 - cos_t * cos_t))
    w_top = 2 * cos_t / (1 + cos_t)
    w_pair = 1 / (1 + cos_t)
    p2 = (z_t - e.z_I) / (z_t - z0)
    elements = ((w_top, 0.0, 0.0, w_top),
                (w_pair, w_pair * sin_t, 0.0, -w_pair * cos_t),
                (w_pair, -w_pair * sin_t, 0.0, -w_pair * cos_t))
    return MeasurementScheme(kind, float(z0), float(np.arccos(cos_t)),
                             (1 - p2, p2 / 2, p2 / 2), elements)


def classify(e):
    """Optimal measurement scheme for ellipsoid ``e``.

    ``a_x <= ax_V`` gives the vertical von Neumann measurement and
    ``a_x >= ax_H`` the horizontal one (ties go to the von Neumann side).  In
    between a three-element POVM is optimal if ``z_I > z0``; otherwise the
    horizontal measurement is.  Flat ellipsoids are always horizontal.
    """
    if e.is_flat:
        return _scheme_from_z(e, SchemeKind.HORIZONTAL_VN)
    if _is_full_sphere(e):
        return _scheme_from_z(e, SchemeKind.VERTICAL_VN)
    curves = _curves(e.a_z, e.z_c)
    if e.a_x <= curves.ax_V:
        return _scheme_from_z(e, SchemeKind.VERTICAL_VN)
    if e.a_x >= curves.ax_H:
        return _scheme_from_z(e, SchemeKind.HORIZONTAL_VN)
    z0 = find_z0(e)
    if z0 is not None and e.z_I > z0:
        return _scheme_from_z(e, SchemeKind.THREE_POVM, z0)
    return _scheme_from_z(e, SchemeKind.HORIZONTAL_VN)


def sa_min(e, m03=0.0):
    """Minimum average conditional entropy of A and the scheme achieving it.

    Parameters
    ----------
    e : EllipsoidParams
    m03 : float
        Only used for flat ellipsoids (``a_z = 0``), where the ellipsoid does not
        fix the state: the value is ``S2(sqrt(a_x^2 (1 - m03^2) + z_c^2))``.  The
        default ``0`` is the representative with no hidden boost on B.
    """
    scheme = classify(e)
    if e.is_flat:
        value = s2(min(np.sqrt(e.a_x ** 2 * (1 - m03 * m03) + e.z_c ** 2), 1.0))
    elif _is_full_sphere(e):
        value = 0.0
    elif scheme.kind is SchemeKind.VERTICAL_VN:
        p_t = scheme.weights[0]
        value = p_t * s2(min(e.z_top, 1.0)) + (1 - p_t) * s2(min(abs(e.z_bottom), 1.0))
    elif scheme.kind is SchemeKind.HORIZONTAL_VN:
        value = _f(e.z_I, e.a_x, e.a_z, e.z_c)
    else:
        value = sa_of_z(e, scheme.z0)
    return SAMin(float(value), scheme)


def transition_points(a_z, z_c, z_I):
    """Values of ``a_x`` where the optimum changes from vertical to three-element (E) and on to horizontal (F).

    Returns ``(a_E, a_F)``; ``a_F`` solves ``z0(a_x) = z_I`` and is ``None`` when
    ``z_I`` lies outside the range swept by ``z0`` (no three-element window).
    """
    curves = boundary_curves(a_z, z_c)
    lo, hi = curves.ax_V, curves.ax_H

    def gap(a_x):
        e = EllipsoidParams(a_x, 0.0, a_z, z_c, z_I)
        return find_z0(e) - z_I

    eps = 1e-12 * max(hi - lo, 1.0)
    try:
        a_f = brentq(gap, lo + eps, hi - eps, xtol=1e-14)
    except (ValueError, TypeError):
        a_f = None
    return lo, a_f


# --------------------------------------------------------------------------
# von Neumann measurements in the x-z plane
# --------------------------------------------------------------------------

def _vn_entries(m):
    mc, _ = canonical_mueller(m)
    return mc[0, 3], mc[1, 1], mc[3, 0], mc[3, 3]


def sa_vn_theta(m, theta):
    """Average conditional entropy of the von Neumann pair at polar angle ``theta`` on B.

    The pair is ``(1, +-sin(theta), 0, +-cos(theta))``; ``theta = 0`` is the
    vertical and ``theta = pi/2`` the horizontal measurement.  ``theta`` may be an array.
    """
    m03, m11, m30, m33 = _vn_entries(m)
    th = np.asarray(theta, dtype=float)
    c, s = np.cos(th), np.sin(th)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.hypot(m11 * s, m30 + m33 * c) / (1 + m03 * c)
        rp = np.hypot(m11 * s, m30 - m33 * c) / (1 - m03 * c)
    p = (1 + m03 * c) / 2
    r = np.where(p > 0, np.minimum(r, 1.0), 0.0)
    rp = np.where(p < 1, np.minimum(rp, 1.0), 0.0)
    sr, srp = s2(r), s2(rp)
    out = 0.5 * (sr + srp + m03 * c * (sr - srp))
    return out if np.ndim(out) else float(out)


def best_vn_theta(m, grid=721):
    """Best in-plane von Neumann angle on ``[0, pi/2]``: ``(theta, value)``."""
    thetas = np.linspace(0.0, np.pi / 2, grid)
    vals = sa_vn_theta(m, thetas)
    j = int(np.argmin(vals))
    lo, hi = thetas[max(j - 1, 0)], thetas[min(j + 1, grid - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: sa_vn_theta(m, t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun <= vals[j]:
            return float(res.x), float(res.fun)
    return float(thetas[j]), float(vals[j])


# --------------------------------------------------------------------------
# full report
# --------------------------------------------------------------------------

def _sa_min_for_mueller(mc):
    """SA_min and scheme for a canonical physical sub-X matrix."""
    m03, m11, m30 = mc[0, 3], mc[1, 1], mc[3, 0]
    lam = spectrum_from_mueller(mc)
    if max(lam) >= 1 - PURE_TOL:
        # pure state: every rank-one element leaves A pure
        e = _safe_ellipsoid(mc)
        kind = SchemeKind.VERTICAL_VN
        p_t = float((1 + m03) / 2)
        scheme = MeasurementScheme(kind, None, 0.0, (p_t, 1 - p_t),
                                   ((1.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, -1.0)))
        return 0.0, scheme, e
    if abs(m03) >= 1 - PURE_TOL:
        # B pure: product state, no measurement on B informs A
        scheme = MeasurementScheme(SchemeKind.VERTICAL_VN, None, 0.0, (1.0, 0.0),
                                   ((1.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, -1.0)))
        return s2(min(abs(m30), 1.0)), scheme, None
    e = from_mueller(mc, check=False)
    if e.is_flat:
        value = s2(min(np.hypot(m11, m30), 1.0))
        return value, _scheme_from_z(e, SchemeKind.HORIZONTAL_VN), e
    res = sa_min(e)
    return res.value, res.scheme, e


def _safe_ellipsoid(mc):
    try:
        return from_mueller(mc, check=False)
    except (DegenerateInputError, ValidationError):
        return None


def discord(m, side="B"):
    """Quantum discord, classical correlation and the optimal measurement.

    Parameters
    ----------
    m : array_like, shape (4, 4)
        Mueller matrix of an X-state (any normalisation, phases allowed).
    side : {'A', 'B'}
        Subsystem that is measured.

    Returns
    -------
    DiscordReport
    """
    if side not in ("A", "B"):
        raise ValidationError("side", f"side must be 'A' or 'B', got {side!r}")
    work = transpose_for_A_side(m) if side == "A" else np.asarray(m, dtype=float)
    mc, _ = canonical_mueller(work)
    mc = require_physical(mc)
    ent = global_entropies(mc)
    value, scheme, e = _sa_min_for_mueller(mc)
    # ent is computed with the measured side as "B"
    s_unmeasured, s_measured = ent.S_A, ent.S_B
    c = s_unmeasured - value
    d = s_measured - ent.S_AB + value
    s_a, s_b = (s_unmeasured, s_measured) if side == "B" else (s_measured, s_unmeasured)
    return DiscordReport(
        S_A=s_a, S_B=s_b, S_AB=ent.S_AB, I=ent.I, C=float(c), D=float(d),
        SA_min=float(value), scheme=scheme, EoF_complement=float(value), side=side, ellipsoid=e,
    )
