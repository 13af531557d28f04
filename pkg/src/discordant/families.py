"""Special families of X-states with closed-form discord, and zero-discord detection."""
import enum
from dataclasses import dataclass

import numpy as np

from .ellipsoid import from_mueller
from .entropy import global_entropies, s2, shannon
from .errors import CPViolation, DomainError, ValidationError
from .optimizer import DiscordReport, MeasurementScheme, SchemeKind
from .qcore import canonical_mueller, cp_check, mueller_from_density, mueller_row, transpose_for_A_side

DEGENERACY_TOL = 1e-10
SIMPLEX_TOL = 1e-12


class FamilyKind(enum.Enum):
    CENTERED_X = "CenteredX"
    CIRCULAR = "Circular"
    SPHERICAL = "Spherical"
    BELL_MIXTURE = "BellMixture"
    LINEAR = "Linear"
    ZERO_DISCORD_A = "ZeroDiscordA"
    ZERO_DISCORD_B = "ZeroDiscordB"
    CLASSICAL_DIAGONAL = "ClassicalDiagonal"


@dataclass(frozen=True)
class FamilySpec:
    """A family member: ``kind`` and its parameter tuple.

    ========================  ==========================
    kind                      params
    ========================  ==========================
    CenteredX                 (g1, g2, g3, theta)
    Circular                  (g1, g2, theta)
    Spherical                 (g1, sign, theta)
    BellMixture               (p1, p2, p3, p4)
    Linear                    (g1, g2, g3, theta)
    ZeroDiscordA/B            (a, b)
    ClassicalDiagonal         (p00, p01, p10, p11)
    ========================  ==========================
    """

    kind: FamilyKind
    params: tuple

    def mueller(self):
        return build_family(self)


def _cp_guard(m, ok, what):
    if not ok:
        raise CPViolation(cp_check(m).margins, f"{what}: complete positivity violated "
                                                f"(margins {cp_check(m).margins})")
    return m


# --------------------------------------------------------------------------
# centered, circular and spherical states
# --------------------------------------------------------------------------

def centered_state(g1, g2, g3, theta):
    """Mueller matrix of a centred X-state (``z_c = 0``).

    ``m03 = sin(theta)``, ``m30 = g3 sin(theta)``, ``m33 = g3``, ``m11 = g1 cos(theta)``,
    ``m22 = g2 cos(theta)``; semi-axes ``(g1, |g2|, g3)`` and ``z_I = g3 sin(theta)``.
    Physical iff ``g1 + |g3 - g2| <= 1`` for any ``|theta| < pi/2``.
    """
    if not (abs(g2) <= g1 + 1e-15 and g3 >= 0):
        raise ValidationError("centered_params", "need |g2| <= g1 and g3 >= 0")
    if not abs(theta) < np.pi / 2:
        raise DomainError("need |theta| < pi/2")
    s, c = np.sin(theta), np.cos(theta)
    m = mueller_row(m03=s, m11=g1 * c, m22=g2 * c, m30=g3 * s, m33=g3)
    return _cp_guard(m, g1 + abs(g3 - g2) <= 1 + 1e-12, "centered state")


def circular_spectrum(g1, g2, theta):
    """Eigenvalues of the circular state: ``(1/4){1 + e g1 +- sqrt((1 + e g1)^2 s^2 + (g1 + e g2)^2 c^2)}``."""
    s, c = np.sin(theta), np.cos(theta)
    lam = []
    for eps in (1, -1):
        root = np.sqrt((1 + eps * g1) ** 2 * s * s + (g1 + eps * g2) ** 2 * c * c)
        lam += [(1 + eps * g1 + root) / 4, (1 + eps * g1 - root) / 4]
    return tuple(float(v) for v in lam)


def circular_discord(g1, g2, theta):
    """Closed-form correlations of the circular state (centred, ``g3 = g1``).

    ``SA_min = S2(g1)`` (the x-z section is a circle of radius ``g1`` about the
    origin) and ``D = S2(sin theta) + S2(g1) - S({lambda})``.
    """
    m = centered_state(g1, g2, g1, theta)
    s = abs(np.sin(theta))
    s_a, s_b = s2(min(g1 * s, 1.0)), s2(min(s, 1.0))
    s_ab = shannon(np.clip(circular_spectrum(g1, g2, theta), 0.0, None))
    sa_min = s2(min(g1, 1.0))
    p_t = (1 + m[0, 3]) / 2
    scheme = MeasurementScheme(SchemeKind.VERTICAL_VN, None, 0.0, (p_t, 1 - p_t),
                               ((1.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, -1.0)))
    return DiscordReport(
        S_A=s_a, S_B=s_b, S_AB=s_ab, I=s_a + s_b - s_ab, C=s_a - sa_min, D=s_b - s_ab + sa_min,
        SA_min=sa_min, scheme=scheme, EoF_complement=sa_min, side="B", ellipsoid=from_mueller(m),
    )


def spherical_discord(g1, sign, theta):
    """Circular state with ``|g2| = g1``: the ellipsoid is a sphere."""
    if sign not in (1, -1):
        raise ValidationError("sign", "sign must be +1 or -1")
    return circular_discord(g1, sign * g1, theta)


# --------------------------------------------------------------------------
# Bell mixtures and linear states
# --------------------------------------------------------------------------

def _check_simplex(p, n):
    p = np.asarray(p, dtype=float)
    if p.shape != (n,) or np.any(p < -SIMPLEX_TOL) or abs(p.sum() - 1) > SIMPLEX_TOL:
        raise ValidationError("simplex", f"need {n} nonnegative probabilities summing to 1, got {p.tolist()}")
    return np.clip(p, 0.0, None)


def bell_mixture(p1, p2, p3, p4):
    """Diagonal Mueller matrix of a mixture of the four Bell states with weights ``p``."""
    p1, p2, p3, p4 = _check_simplex([p1, p2, p3, p4], 4)
    m = np.diag([1.0, p1 + p3 - p2 - p4, p1 + p4 - p2 - p3, p1 + p2 - p3 - p4])
    return m


def bell_mixture_discord(p1, p2, p3, p4):
    """Closed form: ``SA_min = S2(max |m_jj|)`` (projection along the longest axis), ``S_AB = H(p)``."""
    p = _check_simplex([p1, p2, p3, p4], 4)
    m = bell_mixture(*p)
    axes = np.abs(np.diag(m)[1:])
    sa_min = s2(min(axes.max(), 1.0))
    s_ab = shannon(p)
    kind = SchemeKind.VERTICAL_VN if axes[2] >= axes[0] else SchemeKind.HORIZONTAL_VN
    scheme = MeasurementScheme(kind, None, 0.0 if kind is SchemeKind.VERTICAL_VN else np.pi / 2,
                               (0.5, 0.5))
    return DiscordReport(
        S_A=1.0, S_B=1.0, S_AB=s_ab, I=2.0 - s_ab, C=1.0 - sa_min, D=1.0 - s_ab + sa_min,
        SA_min=sa_min, scheme=scheme, EoF_complement=sa_min, side="B",
    )


def linear_state(g1, g2, g3, theta):
    """Linear state (flat ellipsoid, ``a_z = 0``) and its minimum conditional entropy.

    ``m03 = sin(theta)``, ``m11 = g1 cos(theta)``, ``m22 = g2 cos(theta)``,
    ``m30 = g3``, ``m33 = g3 sin(theta)``.  The ellipsoid is the disc
    ``(a_x, a_y, z_c) = (g1, |g2|, g3)`` for every ``theta``; physical iff
    ``g1 + |g2| <= sqrt(1 - g3^2)``.

    The boost angle ``theta`` is invisible in the ellipsoid but not in the
    correlations: the horizontal measurement is optimal and
    ``SA_min = S2(sqrt(g1^2 cos^2(theta) + g3^2))``, which reduces to
    ``S2(sqrt(g1^2 + g3^2))`` at ``theta = 0``.

    Returns
    -------
    (ndarray, float)
    """
    if not (abs(g2) <= g1 + 1e-15 and g3 >= 0):
        raise ValidationError("linear_params", "need |g2| <= g1 and g3 >= 0")
    if not abs(theta) < np.pi / 2:
        raise DomainError("need |theta| < pi/2")
    s, c = np.sin(theta), np.cos(theta)
    m = mueller_row(m03=s, m11=g1 * c, m22=g2 * c, m30=g3, m33=g3 * s)
    _cp_guard(m, g1 + abs(g2) <= np.sqrt(max(1 - g3 * g3, 0.0)) + 1e-12, "linear state")
    return m, s2(min(np.hypot(g1 * c, g3), 1.0))


def linear_discord(g1, g2, g3, theta):
    """DiscordReport of a linear state from the closed-form ``SA_min``."""
    m, sa_min = linear_state(g1, g2, g3, theta)
    ent = global_entropies(m)
    scheme = MeasurementScheme(SchemeKind.HORIZONTAL_VN, None, np.pi / 2, (0.5, 0.5),
                               ((1.0, 1.0, 0.0, 0.0), (1.0, -1.0, 0.0, 0.0)))
    return DiscordReport(
        S_A=ent.S_A, S_B=ent.S_B, S_AB=ent.S_AB, I=ent.I, C=ent.S_A - sa_min,
        D=ent.S_B - ent.S_AB + sa_min, SA_min=sa_min, scheme=scheme, EoF_complement=sa_min,
        side="B", ellipsoid=from_mueller(m),
    )


# --------------------------------------------------------------------------
# zero discord
# --------------------------------------------------------------------------

_PAULI = np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


def zero_discord_state(side, params):
    """Density matrices of the zero-discord families.

    ``side='A'``: ``(1/4)[1 + a (1 x s3) + b (s1 x s1)]``, zero discord for measurements on A.
    ``side='B'``: ``(1/4)[1 + a (s3 x 1) + b (s1 x s1)]``, zero discord for measurements on B.
    ``side='two_way'``: ``diag(p00, p01, p10, p11)``, zero discord on both sides.
    """
    if side in ("A", "B"):
        a, b = params
        if a * a + b * b > 1 + 1e-12:
            raise ValidationError("disc", f"need a^2 + b^2 <= 1, got ({a!r}, {b!r})")
        local = np.kron(_PAULI[0], _PAULI[3]) if side == "A" else np.kron(_PAULI[3], _PAULI[0])
        return (np.eye(4) + a * local + b * np.kron(_PAULI[1], _PAULI[1])) / 4
    if side == "two_way":
        return np.diag(_check_simplex(params, 4)).astype(complex)
    raise ValidationError("side", f"side must be 'A', 'B' or 'two_way', got {side!r}")


def is_zero_discord(m, side="B", tol=DEGENERACY_TOL):
    """Zero discord for measurements on ``side``, decided from the correlation ellipsoid.

    True iff the ellipsoid collapses to a point or to a segment of one of two kinds:

    * radial: ``a_x = a_y = 0``, the segment lies on the z-axis;
    * transverse: ``a_y = a_z = 0`` with no boost on the measured qubit
      (``m03 = 0``), a segment parallel to x with the z-axis through its midpoint.

    A transverse segment with ``m03 != 0`` is a boosted linear state with
    nonzero discord.  The test is equivalent to the last three columns of the
    canonical Mueller matrix having rank at most one.
    """
    work = transpose_for_A_side(m) if side == "A" else np.asarray(m, dtype=float)
    mc, _ = canonical_mueller(work)
    m03 = mc[0, 3]
    if abs(m03) >= 1 - tol:
        return True  # measured qubit pure: product state
    e = from_mueller(mc, check=False)
    if e.a_x < tol and e.a_y < tol:
        return True
    return bool(e.a_y < tol and e.a_z < tol and abs(m03) < tol)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def build_family(spec):
    """Mueller matrix of a :class:`FamilySpec`."""
    kind = FamilyKind(spec.kind) if not isinstance(spec.kind, FamilyKind) else spec.kind
    p = tuple(spec.params)
    if kind is FamilyKind.CENTERED_X:
        return centered_state(*p)
    if kind is FamilyKind.CIRCULAR:
        g1, g2, theta = p
        return centered_state(g1, g2, g1, theta)
    if kind is FamilyKind.SPHERICAL:
        g1, sign, theta = p
        return centered_state(g1, sign * g1, g1, theta)
    if kind is FamilyKind.BELL_MIXTURE:
        return bell_mixture(*p)
    if kind is FamilyKind.LINEAR:
        return linear_state(*p)[0]
    if kind is FamilyKind.ZERO_DISCORD_A:
        return mueller_from_density(zero_discord_state("A", p))
    if kind is FamilyKind.ZERO_DISCORD_B:
        return mueller_from_density(zero_discord_state("B", p))
    return mueller_from_density(zero_discord_state("two_way", p))
