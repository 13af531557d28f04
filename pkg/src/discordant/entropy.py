"""Entropy kernels, X-state spectra and global entropic quantities (all in bits)."""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .qcore import XCanonical, canonical_mueller, normalize

LOG_FLOOR = 1e-15
R_SLACK = 1e-12


def _plogp(p):
    p = np.asarray(p, dtype=float)
    safe = np.where(p < LOG_FLOOR, 1.0, p)
    return np.where(p < LOG_FLOOR, 0.0, -p * np.log2(safe))


def s2(r):
    """Entropy of a qubit whose Bloch vector has length ``r``.

    ``S2(r) = -((1+r)/2) log2((1+r)/2) - ((1-r)/2) log2((1-r)/2)``.
    Accepts scalars or arrays; values within ``1e-12`` above one are clipped.

    Raises
    ------
    DomainError
        If any ``r`` lies outside ``[0, 1 + 1e-12]``.
    """
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1 + R_SLACK) or np.any(np.isnan(arr)):
        raise DomainError(f"s2 needs 0 <= r <= 1, got {r!r}")
    arr = np.minimum(arr, 1.0)
    out = _plogp((1 + arr) / 2) + _plogp((1 - arr) / 2)
    return float(out) if out.ndim == 0 else out


def shannon(probs):
    """Shannon entropy ``-sum p log2 p`` with ``0 log 0 = 0`` below ``1e-15``."""
    return float(np.sum(_plogp(probs)))


def ellipse_radius(z, a_x, a_z, z_c):
    """Distance from the origin of the x-z ellipse point at height ``z`` (vectorised, clipped to [0, 1])."""
    z = np.asarray(z, dtype=float)
    r2 = z * z + a_x * a_x - (z - z_c) ** 2 * (a_x * a_x) / (a_z * a_z)
    out = np.sqrt(np.clip(r2, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


def r_of_z(e, z, tol=1e-12):
    """Radius ``r(z)`` of the boundary point of the correlation ellipse at height ``z``.

    Parameters
    ----------
    e : EllipsoidParams
        Needs ``a_x``, ``a_z > 0`` and ``z_c``.
    z : float
        Height in ``[z_c - a_z, z_c + a_z]``.
    """
    if e.a_z <= 0:
        raise DomainError("r(z) is undefined for a flat ellipsoid (a_z = 0); use the linear-state path")
    lo, hi = e.z_c - e.a_z, e.z_c + e.a_z
    if z < lo - tol or z > hi + tol:
        raise DomainError(f"z = {z!r} outside [{lo!r}, {hi!r}]")
    return ellipse_radius(min(max(z, lo), hi), e.a_x, e.a_z, e.z_c)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ``(l0, l1, l2, l3)`` of an X-state and the two mixing cosines."""

    lam: tuple
    nu1: float
    nu2: float

    @property
    def entropy(self):
        return shannon(self.lam)


def _pair(mean, half_gap_sq):
    h = np.sqrt(max(half_gap_sq, 0.0))
    return mean + h, mean - h


def spectrum_from_rho(x):
    """Eigenvalues from the density-matrix parameters."""
    l0, l3 = _pair((x.rho00 + x.rho33) / 2, (x.rho00 - x.rho33) ** 2 / 4 + x.rho03 ** 2)
    l1, l2 = _pair((x.rho11 + x.rho22) / 2, (x.rho11 - x.rho22) ** 2 / 4 + x.rho12 ** 2)
    return (l0, l1, l2, l3)


def spectrum_from_mueller(m):
    """Eigenvalues from the sub-X Mueller entries."""
    m03, m11, m22, m30, m33 = m[0, 3], m[1, 1], m[2, 2], m[3, 0], m[3, 3]
    h1 = np.hypot(m11 + m22, m30 + m03) / 4
    h2 = np.hypot(m11 - m22, m30 - m03) / 4
    a, b = (1 + m33) / 4, (1 - m33) / 4
    return (a + h1, b + h2, b - h2, a - h1)


def _cosine(num, other):
    den = np.hypot(num, other)
    return float(num / den) if den > 0 else 0.0


def spectrum(x):
    """Spectrum of a canonical X-state.

    The density-matrix and Mueller forms are both evaluated; they agree to
    rounding and the density-matrix form is returned.  Mixing cosines default
    to zero when their defining vector vanishes.
    """
    lam = spectrum_from_rho(x)
    nu1 = _cosine(x.rho00 - x.rho33, 2 * x.rho03)
    nu2 = _cosine(x.rho11 - x.rho22, 2 * x.rho12)
    return Spectrum(tuple(float(v) for v in lam), nu1, nu2)


@dataclass(frozen=True)
class GlobalEntropies:
    S_A: float
    S_B: float
    S_AB: float
    I: float


def global_entropies(m):
    """Marginal and joint entropies and the mutual information of an X-state."""
    m = normalize(m)
    mc, _ = canonical_mueller(m)
    s_a = s2(min(abs(mc[3, 0]), 1.0))
    s_b = s2(min(abs(mc[0, 3]), 1.0))
    lam = np.clip(spectrum_from_mueller(mc), 0.0, None)
    s_ab = shannon(lam)
    return GlobalEntropies(s_a, s_b, s_ab, s_a + s_b - s_ab)


def spectrum_of(m):
    """Spectrum of the state whose (X-form) Mueller matrix is ``m``."""
    mc, _ = canonical_mueller(m)
    return spectrum(XCanonical.from_mueller(mc))
