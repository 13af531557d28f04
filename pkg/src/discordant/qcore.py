"""Two-qubit states in density-matrix and Mueller (Pauli correlator) form.

The Mueller matrix of a two-qubit state is ``M[a, b] = Tr(rho . s_a (x) conj(s_b))``
with ``s_0 = 1`` and ``s_1..s_3`` the Pauli matrices.  Its leading column is the
Stokes vector of the A-qubit, its leading row that of the B-qubit (in the
conjugate Pauli basis), and it maps the Stokes vector of a measurement element
on B to the unnormalised Stokes vector of the conditional state of A.

Density matrices and Mueller matrices are plain ``numpy`` arrays.  Every public
function that accepts a Mueller matrix normalises it to ``m00 = 1`` first.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CPViolation, ShapeError, UnphysicalElementError, ValidationError

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# _BASIS[a, b] = s_a (x) conj(s_b)
_BASIS = np.array([[np.kron(SIGMA[a], SIGMA[b].conj()) for b in range(4)] for a in range(4)])

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
X_TOL = 1e-10
CP_TOL = 1e-12

# density-matrix entries that vanish for an X-state
X_FORBIDDEN = ((0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2))
# Mueller entries allowed to be nonzero in the sub-X form of a canonical X-state
SUB_X_ALLOWED = frozenset({(0, 0), (0, 3), (3, 0), (3, 3), (1, 1), (2, 2)})
# an X-state carrying phases also populates the off-diagonal xy block
X_MUELLER_ALLOWED = SUB_X_ALLOWED | {(1, 2), (2, 1)}


# --------------------------------------------------------------------------
# validation helpers
# --------------------------------------------------------------------------

def check_density(rho, psd=True):
    """Return ``rho`` as a complex 4x4 array, raising ValidationError on a broken invariant."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError("shape", f"density matrix must be 4x4, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValidationError("hermitian", "density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError("unit_trace", f"density matrix trace is {tr!r}, expected 1")
    if psd:
        lam = np.linalg.eigvalsh(rho)
        if lam[0] < PSD_FLOOR:
            raise ValidationError(
                "positive_semidefinite", f"density matrix has eigenvalue {lam[0]:.3g} < 0"
            )
    return rho


def normalize(m):
    """Return a float copy of the Mueller matrix scaled so that ``m00 = 1``."""
    m = np.array(m, dtype=float)
    if m.shape != (4, 4):
        raise ValidationError("shape", f"Mueller matrix must be 4x4, got {m.shape}")
    if not m[0, 0] > 0:
        raise ValidationError("m00_positive", f"m00 must be positive, got {m[0, 0]!r}")
    return m / m[0, 0]


def x_shape_violations(rho, tol=X_TOL):
    """List ``(j, k, |rho_jk|)`` for the forbidden entries of an X-state exceeding ``tol``."""
    rho = np.asarray(rho)
    return [(j, k, float(abs(rho[j, k]))) for j, k in X_FORBIDDEN if abs(rho[j, k]) > tol]


def _mueller_violations(m, allowed, tol):
    return [
        (a, b, float(m[a, b]))
        for a in range(4)
        for b in range(4)
        if (a, b) not in allowed and abs(m[a, b]) > tol
    ]


def is_sub_x(m, tol=X_TOL):
    return not _mueller_violations(np.asarray(m, dtype=float), SUB_X_ALLOWED, tol)


def require_sub_x(m, tol=X_TOL):
    """Normalise ``m`` and check that it has the sub-X form; raise ShapeError otherwise."""
    m = normalize(m)
    bad = _mueller_violations(m, SUB_X_ALLOWED, tol)
    if bad:
        raise ShapeError(bad, "Mueller matrix is not of sub-X form: " + ", ".join(
            f"m{a}{b}={v:.3g}" for a, b, v in bad))
    return m


# --------------------------------------------------------------------------
# rho <-> M
# --------------------------------------------------------------------------

def mueller_from_density(rho):
    """Pauli-correlator matrix ``M[a, b] = Tr(rho . s_a (x) conj(s_b))`` of a two-qubit state.

    Positivity is not required here; hermiticity and unit trace are.
    """
    rho = check_density(rho, psd=False)
    m = np.einsum("abjk,kj->ab", _BASIS, rho)
    return m.real.copy()


def density_from_mueller(m):
    """Inverse of :func:`mueller_from_density`: ``rho = (1/4) sum_ab M_ab s_a (x) conj(s_b)``."""
    m = normalize(m)
    return 0.25 * np.einsum("ab,abjk->jk", m, _BASIS)


def mueller_row(m03=0.0, m11=0.0, m22=0.0, m30=0.0, m33=0.0):
    """Build the sub-X Mueller matrix of a canonical X-state from its five free entries."""
    return np.array(
        [
            [1.0, 0.0, 0.0, m03],
            [0.0, m11, 0.0, 0.0],
            [0.0, 0.0, m22, 0.0],
            [m30, 0.0, 0.0, m33],
        ]
    )


# --------------------------------------------------------------------------
# canonical form
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class XCanonical:
    """Phase-free X-state: real diagonal and nonnegative anti-diagonal entries."""

    rho00: float
    rho11: float
    rho22: float
    rho33: float
    rho03: float
    rho12: float

    def __post_init__(self):
        tr = self.rho00 + self.rho11 + self.rho22 + self.rho33
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError("unit_trace", f"diagonal sums to {tr!r}")
        if self.rho03 < -CP_TOL or self.rho12 < -CP_TOL:
            raise ValidationError("nonnegative_coherences", "rho03 and rho12 must be >= 0")
        if self.rho00 * self.rho33 < self.rho03 ** 2 - CP_TOL:
            raise ValidationError("positive_outer_block", "rho00*rho33 < rho03^2")
        if self.rho11 * self.rho22 < self.rho12 ** 2 - CP_TOL:
            raise ValidationError("positive_inner_block", "rho11*rho22 < rho12^2")

    def density(self):
        rho = np.diag([self.rho00, self.rho11, self.rho22, self.rho33]).astype(complex)
        rho[0, 3] = rho[3, 0] = self.rho03
        rho[1, 2] = rho[2, 1] = self.rho12
        return rho

    def mueller(self):
        return mueller_row(
            m03=self.rho00 + self.rho22 - self.rho11 - self.rho33,
            m11=2 * (self.rho03 + self.rho12),
            m22=2 * (self.rho03 - self.rho12),
            m30=self.rho00 + self.rho11 - self.rho22 - self.rho33,
            m33=self.rho00 + self.rho33 - self.rho11 - self.rho22,
        )

    @classmethod
    def from_mueller(cls, m):
        m = require_sub_x(m)
        m03, m30, m33 = m[0, 3], m[3, 0], m[3, 3]
        return cls(
            rho00=(1 + m03 + m30 + m33) / 4,
            rho11=(1 - m03 + m30 - m33) / 4,
            rho22=(1 + m03 - m30 - m33) / 4,
            rho33=(1 - m03 - m30 + m33) / 4,
            rho03=(m[1, 1] + m[2, 2]) / 4,
            rho12=(m[1, 1] - m[2, 2]) / 4,
        )


def x_density(rho00, rho11, rho22, rho33, rho03, rho12, phi1=0.0, phi2=0.0):
    """General X-state with phases ``phi1`` on rho12 and ``phi2`` on rho03."""
    rho = np.diag([rho00, rho11, rho22, rho33]).astype(complex)
    rho[0, 3] = rho03 * np.exp(1j * phi2)
    rho[3, 0] = np.conj(rho[0, 3])
    rho[1, 2] = rho12 * np.exp(1j * phi1)
    rho[2, 1] = np.conj(rho[1, 2])
    return rho


@dataclass(frozen=True)
class LocalUnitaryRecord:
    """Local unitary ``U_A (x) U_B`` that took a state to canonical form."""

    phi1: float
    phi2: float
    flip_a: bool
    flip_b: bool
    u_a: np.ndarray
    u_b: np.ndarray

    @property
    def unitary(self):
        return np.kron(self.u_a, self.u_b)

    @property
    def is_identity(self):
        return np.allclose(self.unitary, np.eye(4), atol=1e-15)

    def apply(self, rho):
        u = self.unitary
        return u @ np.asarray(rho) @ u.conj().T

    def undo(self, rho):
        u = self.unitary
        return u.conj().T @ np.asarray(rho) @ u


def _phase_unitaries(phi1, phi2):
    u_a = np.diag([np.exp(-1j * (2 * phi1 + phi2) / 4), np.exp(1j * phi2 / 4)])
    u_b = np.diag([np.exp(1j * (2 * phi1 - phi2) / 4), np.exp(1j * phi2 / 4)])
    return u_a, u_b


def canonicalize(rho, tol=X_TOL):
    """Bring an X-state to canonical form by local unitaries.

    Phases of the two coherences are removed with diagonal unitaries, after which
    pi-rotations about x on A and/or B enforce ``z_c >= 0`` and
    ``m33 - m03 m30 >= 0``.  ``m11 >= |m22|`` follows from the coherences being
    nonnegative.

    Returns
    -------
    (XCanonical, LocalUnitaryRecord)
    """
    rho = check_density(rho, psd=False)
    bad = x_shape_violations(rho, tol)
    if bad:
        raise ShapeError(bad)

    def phase(v):
        return float(np.angle(v)) if abs(v) > tol else 0.0

    phi1, phi2 = phase(rho[1, 2]), phase(rho[0, 3])
    u_a, u_b = _phase_unitaries(phi1, phi2)
    flip = SIGMA[1]

    def transform(ua, ub):
        u = np.kron(ua, ub)
        return u @ rho @ u.conj().T

    work = transform(u_a, u_b)
    m = mueller_from_density(_clean_x(work))
    flip_a = (m[3, 0] - m[0, 3] * m[3, 3]) < 0
    if flip_a:
        u_a = flip @ u_a
        work = transform(u_a, u_b)
        m = mueller_from_density(_clean_x(work))
    flip_b = (m[3, 3] - m[0, 3] * m[3, 0]) < 0
    if flip_b:
        u_b = flip @ u_b
        work = transform(u_a, u_b)

    work = _clean_x(work).real
    canon = XCanonical(
        rho00=work[0, 0], rho11=work[1, 1], rho22=work[2, 2], rho33=work[3, 3],
        rho03=max(work[0, 3], 0.0), rho12=max(work[1, 2], 0.0),
    )
    return canon, LocalUnitaryRecord(phi1, phi2, bool(flip_a), bool(flip_b), u_a, u_b)


def _clean_x(rho):
    out = np.array(rho, dtype=complex)
    for j, k in X_FORBIDDEN:
        out[j, k] = 0.0
    for j in range(4):
        out[j, j] = out[j, j].real
    return out


class MuellerFlips(NamedTuple):
    """Rotations applied by :func:`canonical_mueller`, in order of application."""

    swap_xy: bool   # pi/2 about z on both sides: m11 <-> m22
    negate_xy: bool  # pi about z on A: m11, m22 -> -m11, -m22
    flip_a: bool    # pi about x on A: rows 2, 3 negated
    flip_b: bool    # pi about x on B: columns 2, 3 negated


def canonical_mueller(m, tol=X_TOL):
    """Canonical sub-X Mueller matrix (``m11 >= |m22|``, ``m33 >= m03 m30``, ``z_c >= 0``).

    Accepts matrices of sub-X form, or X-states carrying phases (populated xy
    block), which are routed through :func:`canonicalize`.
    """
    m = normalize(m)
    bad = _mueller_violations(m, X_MUELLER_ALLOWED, tol)
    if bad:
        raise ShapeError(bad, "Mueller matrix is not of X form: " + ", ".join(
            f"m{a}{b}={v:.3g}" for a, b, v in bad))
    if abs(m[1, 2]) > tol or abs(m[2, 1]) > tol:
        canon, _ = canonicalize(density_from_mueller(m), tol)
        return canon.mueller(), MuellerFlips(False, False, False, False)

    m = mueller_row(m[0, 3], m[1, 1], m[2, 2], m[3, 0], m[3, 3])
    swap = abs(m[2, 2]) > abs(m[1, 1])
    if swap:
        m[1, 1], m[2, 2] = m[2, 2], m[1, 1]
    neg = m[1, 1] < 0
    if neg:
        m[1, 1], m[2, 2] = -m[1, 1], -m[2, 2]
    flip_a = (m[3, 0] - m[0, 3] * m[3, 3]) < 0
    if flip_a:
        m[2:, :] *= -1
    flip_b = (m[3, 3] - m[0, 3] * m[3, 0]) < 0
    if flip_b:
        m[:, 2:] *= -1
    return m + 0.0, MuellerFlips(bool(swap), bool(neg), bool(flip_a), bool(flip_b))


# --------------------------------------------------------------------------
# positivity and conditional states
# --------------------------------------------------------------------------

class CPCheck(NamedTuple):
    physical: bool
    margins: tuple


def cp_check(m, tol=CP_TOL):
    """Complete-positivity test of a sub-X Mueller matrix.

    ``margins`` are ``(1+m33)^2 - (m30+m03)^2 - (m11+m22)^2`` and
    ``(1-m33)^2 - (m30-m03)^2 - (m11-m22)^2``; the state is physical when both
    are nonnegative (up to ``tol``) and ``|m33| <= 1``, which fixes the sign
    of ``1 +- m33``.
    """
    m = require_sub_x(m)
    m03, m11, m22, m30, m33 = m[0, 3], m[1, 1], m[2, 2], m[3, 0], m[3, 3]
    c1 = (1 + m33) ** 2 - (m30 + m03) ** 2 - (m11 + m22) ** 2
    c2 = (1 - m33) ** 2 - (m30 - m03) ** 2 - (m11 - m22) ** 2
    ok = c1 >= -tol and c2 >= -tol and abs(m33) <= 1 + tol
    return CPCheck(bool(ok), (float(c1), float(c2)))


def require_physical(m):
    """Normalised sub-X ``m``; raises CPViolation if it is not a state."""
    m = require_sub_x(m)
    res = cp_check(m)
    if not res.physical:
        raise CPViolation(res.margins)
    return m


def conditional_state(m, povm_element):
    """Outcome probability and Bloch vector of A after element ``povm_element`` on B.

    The element is given by its Stokes vector ``(s0, s1, s2, s3)``; the identity
    is ``(2, 0, 0, 0)`` and yields probability one.
    """
    m = normalize(m)
    s_in = np.asarray(povm_element, dtype=float)
    if s_in.shape != (4,) or s_in[0] <= 0:
        raise UnphysicalElementError("measurement element needs s0 > 0")
    if s_in[0] ** 2 < s_in[1:] @ s_in[1:] - 1e-12:
        raise UnphysicalElementError("measurement element is space-like (not positive)")
    s_out = m @ s_in
    if s_out[0] <= 0:
        raise UnphysicalElementError(
            f"element {s_in.tolist()} has zero probability for this state")
    return float(s_out[0] / 2), s_out[1:] / s_out[0]


def transpose_for_A_side(m):
    """Mueller matrix governing measurements on A instead of B: the transpose."""
    return normalize(m).T.copy()
