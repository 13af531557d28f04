"""Correlation ellipsoid of an X-state, its inverse, invariance group and separability.

For a canonical X-state the conditional states of A produced by rank-one
measurements on B fill the surface of an ellipsoid with semi-axes
``(a_x, a_y, a_z)`` and centre ``(0, 0, z_c)``.  Together with ``z_I`` (the
Bloch vector of the reduced state of A, which lies inside it) and the signature ``epsilon = sgn det M`` these numbers fix the state completely
whenever ``a_z > 0``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    CPViolation,
    DegenerateInputError,
    DomainError,
    UnsupportedReconstructionError,
    ValidationError,
)
from .qcore import canonical_mueller, cp_check, mueller_row, normalize

PARAM_TOL = 1e-9
DET_TOL = 1e-14
SEPARABLE_TOL = 1e-12


@dataclass(frozen=True)
class EllipsoidParams:
    """Geometry of the correlation ellipsoid plus the two numbers completing the state.

    ``degenerate`` marks ``det M = 0``, where the signature is immaterial and is
    stored as ``+1``.
    """

    a_x: float
    a_y: float
    a_z: float
    z_c: float
    z_I: float
    epsilon: int = 1
    degenerate: bool = False

    def __post_init__(self):
        t = PARAM_TOL
        if self.epsilon not in (1, -1):
            raise ValidationError("epsilon", f"epsilon must be +1 or -1, got {self.epsilon!r}")
        if not (-t <= self.a_y <= self.a_x + t and self.a_x <= 1 + t):
            raise ValidationError("axes_order", f"need 0 <= a_y <= a_x <= 1, got a_x={self.a_x!r}, a_y={self.a_y!r}")
        if not (-t <= self.a_z <= 1 + t):
            raise ValidationError("a_z_range", f"need 0 <= a_z <= 1, got {self.a_z!r}")
        if self.z_c < -t or self.z_c + self.a_z > 1 + t:
            raise ValidationError("inside_bloch_ball", f"need 0 <= z_c and z_c + a_z <= 1, got z_c={self.z_c!r}, a_z={self.a_z!r}")
        if not (self.z_c - self.a_z - t <= self.z_I <= self.z_c + self.a_z + t):
            raise ValidationError("z_I_inside", f"z_I={self.z_I!r} outside [z_c - a_z, z_c + a_z]")

    @property
    def z_top(self):
        return self.z_c + self.a_z

    @property
    def z_bottom(self):
        return self.z_c - self.a_z

    @property
    def is_flat(self):
        return self.a_z < PARAM_TOL

    def with_z_I(self, z_I):
        return EllipsoidParams(self.a_x, self.a_y, self.a_z, self.z_c, z_I, self.epsilon, self.degenerate)

    def as_dict(self):
        return {"ax": self.a_x, "ay": self.a_y, "az": self.a_z, "zc": self.z_c,
                "zI": self.z_I, "eps": self.epsilon}


def from_mueller(m, check=True):
    """Ellipsoid parameters of an X-state given by its Mueller matrix.

    The matrix is brought to canonical form first, so ``z_c >= 0`` and
    ``a_y <= a_x``; ``z_I`` is the canonical ``m30``.

    Parameters
    ----------
    m : array_like, shape (4, 4)
    check : bool
        Reject matrices failing the complete-positivity test.

    Raises
    ------
    DegenerateInputError
        If ``|m03| >= 1`` (B is in a pure state; no ellipsoid).
    """
    mc, _ = canonical_mueller(m)
    if check:
        res = cp_check(mc)
        if not res.physical:
            raise CPViolation(res.margins)
    m03, m11, m22, m30, m33 = mc[0, 3], mc[1, 1], mc[2, 2], mc[3, 0], mc[3, 3]
    w = 1.0 - m03 * m03
    if w <= 1e-15:
        raise DegenerateInputError(f"|m03| = {abs(m03)!r} >= 1: no correlation ellipsoid")
    root = np.sqrt(w)
    det = m11 * m22 * (m33 - m03 * m30)
    degenerate = abs(det) <= DET_TOL
    a_x = abs(m11) / root
    a_y = abs(m22) / root
    a_z = abs(m33 - m03 * m30) / w
    z_c = (m30 - m03 * m33) / w
    return EllipsoidParams(
        a_x=float(a_x), a_y=float(min(a_y, a_x)), a_z=float(a_z), z_c=float(max(z_c, 0.0)),
        z_I=float(m30), epsilon=1 if degenerate or det > 0 else -1, degenerate=bool(degenerate),
    )


def to_mueller(e):
    """Canonical sub-X Mueller matrix with ellipsoid ``e`` (requires ``a_z > 0``)."""
    if e.a_z <= 0:
        raise UnsupportedReconstructionError(
            "a flat ellipsoid (a_z = 0) does not determine the state; "
            "the hidden boost must be supplied, see families.linear_state")
    m03 = float(np.clip((e.z_I - e.z_c) / e.a_z, -1.0, 1.0))
    root = np.sqrt(1 - m03 * m03)
    return mueller_row(
        m03=m03,
        m11=e.a_x * root,
        m22=e.epsilon * e.a_y * root,
        m30=e.z_I,
        m33=e.a_z * (1 - m03 * m03) + m03 * e.z_I,
    )


def to_state(e):
    """Density matrix of the X-state with ellipsoid data ``e``.

    With ``d = z_I - z_c`` and ``y = sqrt(a_z^2 - d^2)`` the nonzero entries are
    ``(1 + z_c + a_z)(a_z + d)``, ``(1 + z_c - a_z)(a_z - d)``,
    ``(1 - z_c - a_z)(a_z + d)``, ``(1 - z_c + a_z)(a_z - d)`` on the diagonal and
    ``(a_x +- eps a_y) y`` on the anti-diagonal, all divided by ``4 a_z``.

    Raises
    ------
    UnsupportedReconstructionError
        For ``a_z = 0``.
    """
    if e.a_z <= 0:
        raise UnsupportedReconstructionError(
            "a flat ellipsoid (a_z = 0) does not determine the state; "
            "the hidden boost must be supplied, see families.linear_state")
    az, zc, d = e.a_z, e.z_c, e.z_I - e.z_c
    y = np.sqrt(max(az * az - d * d, 0.0))
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = (1 + zc + az) * (az + d)
    rho[1, 1] = (1 + zc - az) * (az - d)
    rho[2, 2] = (1 - zc - az) * (az + d)
    rho[3, 3] = (1 - zc + az) * (az - d)
    rho[0, 3] = rho[3, 0] = (e.a_x + e.epsilon * e.a_y) * y
    rho[1, 2] = rho[2, 1] = (e.a_x - e.epsilon * e.a_y) * y
    return rho / (4 * az)


def boost_matrix(mu):
    """Stokes-space Lorentz boost along z with rapidity ``mu``."""
    c, s = np.cosh(mu), np.sinh(mu)
    return np.array([[c, 0, 0, s], [0, 1, 0, 0], [0, 0, 1, 0], [s, 0, 0, c]], dtype=float)


def boost(m, mu):
    """Apply a local filter on B: ``M -> M . M0(mu)``, renormalised.

    The ellipsoid and its signature are unchanged; ``z_I`` moves from ``m30`` to
    ``(m30 + m33 t) / (1 + m03 t)`` with ``t = tanh(mu)``, which is
    ``m30 + m33 t`` when ``m03 = 0``.
    """
    m = normalize(m)
    t = np.tanh(mu)
    # divide by cosh first so large |mu| does not overflow
    b = np.array([[1, 0, 0, t], [0, 0, 0, 0], [0, 0, 0, 0], [t, 0, 0, 1]], dtype=float)
    q = np.exp(-abs(mu))
    sech = 2 * q / (1 + q * q)
    b[1, 1] = b[2, 2] = sech
    out = m @ b
    return out / out[0, 0]


def spatial_inversion(m):
    """Compose with ``T0 = diag(1, 1, -1, 1)``: ``m22 -> -m22`` for sub-X matrices.

    At the density-matrix level this is the partial transpose on B.
    """
    m = normalize(m)
    out = m.copy()
    out[:, 2] *= -1
    return out + 0.0


@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    margin: float


def separability(e, tol=SEPARABLE_TOL):
    """Separable iff ``(1 - a_z)^2 - z_c^2 - (a_x + a_y)^2 >= 0``; independent of ``epsilon`` and ``z_I``."""
    margin = (1 - e.a_z) ** 2 - e.z_c ** 2 - (e.a_x + e.a_y) ** 2
    return SeparabilityVerdict(bool(margin >= -tol), float(margin))


@dataclass(frozen=True)
class SeparableVolume:
    fraction: float
    axes: tuple


def max_separable_volume(z_c):
    """Largest separable ellipsoid with centre offset ``z_c``, as a fraction of the Bloch ball."""
    if not 0 <= z_c < 1:
        raise DomainError(f"need 0 <= z_c < 1, got {z_c!r}")
    s = np.sqrt(1 + 3 * z_c * z_c)
    a_xy = np.sqrt((2 - s) * (1 + s)) / (3 * np.sqrt(2))
    a_z = (2 - s) / 3
    return SeparableVolume(float((2 - s) ** 2 * (1 + s) / 54), (float(a_xy), float(a_xy), float(a_z)))
