"""Brute-force measurement search, used to validate the closed-form optimizer.

Nothing here calls the geometric machinery of :mod:`discordant.optimizer`
except :func:`verify_state`, which compares the two.  The objective is
evaluated directly from ``S_out = M S_in`` for each POVM element.

Search strategy for in-plane POVMs with ``k`` rank-one elements:

* a linear program over a fine circle of candidate elements (the objective is
  linear in the element weights), giving a global seed of support at most 3;
* ``k`` free angles with weights fixed by completeness; for ``k = 4`` the
  weights form a segment along the null space of the completeness system and,
  the objective being linear in them, the better end of the segment is taken;
* Nelder-Mead polishing from the LP seed, the best ``k - 1`` solution and
  seeded random restarts; infeasible angle sets get a constant penalty.
"""
import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize, minimize_scalar
from scipy.special import xlogy

from .errors import OracleConvergenceError
from .qcore import canonical_mueller, require_physical

ORACLE_TOL = 1e-5
KIND_GAP = 1e-7
COMPLETENESS_TOL = 1e-9
LP_GRID = 720


# --------------------------------------------------------------------------
# objective
# --------------------------------------------------------------------------

def _h_bits(r):
    r = np.clip(r, 0.0, 1.0)
    a, b = (1 + r) / 2, (1 - r) / 2
    return -(xlogy(a, a) + xlogy(b, b)) / math.log(2)


def povm_objective(m, elements):
    """Average conditional entropy of A for the POVM ``elements`` on B.

    ``elements`` is a ``(k, 4)`` array of Stokes vectors (weights included);
    completeness is not checked here.
    """
    s_out = np.asarray(elements, dtype=float) @ np.asarray(m, dtype=float).T
    s0 = s_out[:, 0]
    keep = s0 > 1e-300
    r = np.linalg.norm(s_out[keep, 1:], axis=1) / s0[keep]
    return float(np.sum(s0[keep] / 2 * _h_bits(r)))


def _unit_costs(m, beta):
    """Objective per unit weight of the light-like element at polar angle ``beta`` in the x-z plane."""
    sb, cb = np.sin(beta), np.cos(beta)
    s0 = m[0, 0] + m[0, 1] * sb + m[0, 3] * cb
    sx = m[1, 0] + m[1, 1] * sb + m[1, 3] * cb
    sy = m[2, 0] + m[2, 1] * sb + m[2, 3] * cb
    sz = m[3, 0] + m[3, 1] * sb + m[3, 3] * cb
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sqrt(sx * sx + sy * sy + sz * sz) / s0
    r = np.where(s0 > 1e-300, r, 0.0)
    return s0 / 2 * _h_bits(r)


def xz_elements(beta, weights):
    """Weighted light-like Stokes vectors ``w (1, sin b, 0, cos b)``."""
    beta = np.asarray(beta, dtype=float)
    w = np.asarray(weights, dtype=float)
    return np.stack([w, w * np.sin(beta), np.zeros_like(w), w * np.cos(beta)], axis=1)


def completeness_residual(elements):
    return float(np.max(np.abs(np.sum(elements, axis=0) - np.array([2.0, 0, 0, 0]))))


# --------------------------------------------------------------------------
# von Neumann search over the sphere
# --------------------------------------------------------------------------

def fibonacci_sphere(n):
    """``n`` nearly uniform unit vectors (rows)."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    rho = np.sqrt(1 - z * z)
    phi = math.pi * (3 - math.sqrt(5)) * i
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _vn_values(m, dirs):
    plus = np.concatenate([np.ones((len(dirs), 1)), dirs], axis=1)
    minus = np.concatenate([np.ones((len(dirs), 1)), -dirs], axis=1)
    out = []
    for el in (plus, minus):
        s_out = el @ m.T
        s0 = s_out[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(s0 > 1e-300, np.linalg.norm(s_out[:, 1:], axis=1) / s0, 0.0)
        out.append(s0 / 2 * _h_bits(r))
    return out[0] + out[1]


def _direction(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


@dataclass(frozen=True)
class VonNeumannResult:
    theta: float
    phi: float
    value: float
    direction: tuple

    @property
    def out_of_plane(self):
        return abs(self.direction[1])


def best_von_neumann_sphere(m, grid_n=4000, refine=4):
    """Best projective measurement on B over all directions of the Bloch sphere.

    A Fibonacci grid of ``grid_n`` directions is scanned, then the ``refine``
    best points are polished with Nelder-Mead in spherical coordinates.  The
    direction is folded into the upper hemisphere (``n`` and ``-n`` give the
    same measurement) and ``phi`` is reported in ``[0, 2 pi)``.
    """
    m = np.asarray(m, dtype=float)
    dirs = fibonacci_sphere(grid_n)
    vals = _vn_values(m, dirs)
    order = np.argsort(vals)[:refine]

    def obj(x):
        return float(_vn_values(m, _direction(x[0], x[1])[None, :])[0])

    best_x, best_v = None, np.inf
    for j in order:
        n = dirs[j]
        x0 = np.array([math.acos(np.clip(n[2], -1, 1)), math.atan2(n[1], n[0])])
        res = minimize(obj, x0, method="Nelder-Mead",
                       options={"xatol": 1e-11, "fatol": 1e-15, "maxiter": 4000})
        if res.fun < best_v:
            best_x, best_v = res.x, float(res.fun)
    n = _direction(*best_x)
    if n[2] < 0 or (n[2] == 0 and n[0] < 0):
        n = -n
    theta = math.acos(np.clip(n[2], -1, 1))
    phi = math.atan2(n[1], n[0]) % (2 * math.pi)
    return VonNeumannResult(theta, phi, best_v, tuple(float(v) for v in n))


# --------------------------------------------------------------------------
# in-plane POVMs with k elements
# --------------------------------------------------------------------------

INFEASIBLE = 10.0  # above any entropy in bits; keeps the local search finite


def _weights(betas, u=0.5):
    """Weights making ``sum w_j (1, sin b_j, cos b_j) = (2, 0, 0)``, or ``None`` if infeasible.

    For four elements the solutions form a segment; ``u`` in ``[0, 1]`` selects
    a point on its feasible part.
    """
    return _weights_sc([math.sin(b) for b in betas], [math.cos(b) for b in betas], u)


def _weights_sc(sb, cb, u=0.5):
    k = len(sb)
    if k == 2:
        if abs(sb[0] * cb[1] - cb[0] * sb[1]) > 1e-9 or sb[0] * sb[1] + cb[0] * cb[1] > 0:
            return None
        return [1.0, 1.0]

    def cross(i, j):
        # sin(b_i - b_j)
        return sb[i] * cb[j] - cb[i] * sb[j]

    if k == 3:
        n = [cross(1, 2), cross(2, 0), cross(0, 1)]
        tot = n[0] + n[1] + n[2]
        if abs(tot) < 1e-14:
            return None
        w = [2 * v / tot for v in n]
        return w if min(w) >= -1e-12 else None
    # k == 4: null vector of the 3x4 completeness matrix from its 3x3 minors
    minor = [cross(b, c) + cross(c, a) + cross(a, b)
             for a, b, c in ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))]
    nvec = [minor[0], -minor[1], minor[2], -minor[3]]
    j_out = max(range(4), key=lambda j: abs(minor[j]))
    if abs(minor[j_out]) < 1e-14:
        return None
    a, b, c = [i for i in range(4) if i != j_out]
    n3 = (cross(b, c), cross(c, a), cross(a, b))
    tot = n3[0] + n3[1] + n3[2]
    w0 = [0.0] * 4
    w0[a], w0[b], w0[c] = 2 * n3[0] / tot, 2 * n3[1] / tot, 2 * n3[2] / tot
    lo, hi = -math.inf, math.inf
    for wi, ni in zip(w0, nvec):
        if abs(ni) < 1e-15:
            if wi < -1e-12:
                return None
            continue
        t = -wi / ni
        if ni > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if lo > hi + 1e-15 or not math.isfinite(lo) or not math.isfinite(hi):
        return None
    if u is None:
        return ([max(wi + lo * ni, 0.0) for wi, ni in zip(w0, nvec)],
                [max(wi + hi * ni, 0.0) for wi, ni in zip(w0, nvec)])
    t = lo + u * (hi - lo)
    return [max(wi + t * ni, 0.0) for wi, ni in zip(w0, nvec)]


_INV_LN2 = 1 / math.log(2)


def _cost_sc(rows, sb, cb):
    (a0, a1, a3), (x0, x1, x3), (y0, y1, y3), (z0, z1, z3) = rows
    s0 = a0 + a1 * sb + a3 * cb
    if s0 <= 1e-300:
        return 0.0
    sx, sy, sz = x0 + x1 * sb + x3 * cb, y0 + y1 * sb + y3 * cb, z0 + z1 * sb + z3 * cb
    r = min(math.sqrt(sx * sx + sy * sy + sz * sz) / s0, 1.0)
    p, q = (1 + r) / 2, (1 - r) / 2
    h = -(p * math.log(p) + (q * math.log(q) if q > 0 else 0.0)) * _INV_LN2
    return s0 / 2 * h


def _cost1(rows, b):
    return _cost_sc(rows, math.sin(b), math.cos(b))


def _rows(m):
    return tuple((float(m[i, 0]), float(m[i, 1]), float(m[i, 3])) for i in range(4))


def _k_objective(rows, x, k):
    sb = [math.sin(b) for b in x]
    cb = [math.cos(b) for b in x]
    if k == 4:
        # linear in the weights along the feasible segment: the best point is an end
        ends = _weights_sc(sb, cb, None)
        if ends is None:
            return INFEASIBLE
        costs = [_cost_sc(rows, s, c) for s, c in zip(sb, cb)]
        return min(sum(w * c for w, c in zip(ws, costs)) for ws in ends)
    w = _weights_sc(sb, cb)
    if w is None:
        return INFEASIBLE
    return sum(wi * _cost_sc(rows, s, c) for wi, s, c in zip(w, sb, cb) if wi > 0)


def _best_weights(rows, betas):
    sb = [math.sin(b) for b in betas]
    cb = [math.cos(b) for b in betas]
    if len(betas) < 4:
        return _weights_sc(sb, cb)
    ends = _weights_sc(sb, cb, None)
    costs = [_cost_sc(rows, s, c) for s, c in zip(sb, cb)]
    return min(ends, key=lambda ws: sum(w * c for w, c in zip(ws, costs)))


def _lp_seed(m, grid=LP_GRID):
    """Globally optimal POVM over a discrete circle of elements (linear program)."""
    betas = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    cost = _unit_costs(m, betas)
    a_eq = np.vstack([np.ones(grid), np.sin(betas), np.cos(betas)])
    res = linprog(cost, A_eq=a_eq, b_eq=[2.0, 0.0, 0.0], bounds=(0, None), method="highs")
    if not res.success:
        return None, np.inf
    support = np.nonzero(res.x > 1e-10)[0]
    return betas[support], float(res.fun)


def _local_search(rows, x0, k, xatol=1e-4, fatol=1e-9):
    res = minimize(lambda x: _k_objective(rows, x, k), x0, method="Nelder-Mead",
                   options={"xatol": xatol, "fatol": fatol, "maxiter": 3000 * k})
    return np.asarray(res.x), float(res.fun)


def _pad_seed(betas, k, rng):
    betas = [float(b) for b in betas]
    while len(betas) < k:
        if betas:
            betas.append(betas[int(rng.integers(len(betas)))] + rng.normal(0, 0.05))
        else:
            betas.append(rng.uniform(0, 2 * math.pi))
    return betas[:k]


@dataclass
class PovmResult:
    k: int
    value: float
    elements: np.ndarray = field(repr=False)
    betas: tuple = ()

    @property
    def weights(self):
        return tuple(self.elements[:, 0] / 2)


def best_povm_xz(m, k=3, restarts=20, seed=0, seeds=None):
    """Minimise the average conditional entropy over ``k`` rank-one elements in the x-z plane.

    Parameters
    ----------
    m : array_like
        Canonical sub-X Mueller matrix.
    k : {2, 3, 4}
    restarts : int
        Random restarts in addition to the deterministic seeds.
    seed : int
        Seed of the restart generator.
    seeds : list of array_like, optional
        Extra starting angle sets (e.g. the optimum with ``k - 1`` elements).

    Raises
    ------
    OracleConvergenceError
        If no feasible point is found.
    """
    if k not in (2, 3, 4):
        raise ValueError(f"k must be 2, 3 or 4, got {k!r}")
    m = np.asarray(m, dtype=float)
    rows = _rows(m)
    rng = np.random.default_rng(seed)

    if k == 2:
        # antipodal pair; one angle
        def pair(t):
            return _cost1(rows, t) + _cost1(rows, t + math.pi)

        grid = np.linspace(0, math.pi, 361)
        vals = [pair(t) for t in grid]
        j = int(np.argmin(vals))
        res = minimize_scalar(pair, bounds=(grid[max(j - 1, 0)], grid[min(j + 1, 360)]),
                              method="bounded", options={"xatol": 1e-12})
        t = float(res.x) if res.fun < vals[j] else float(grid[j])
        betas = np.array([t, t + math.pi])
        el = xz_elements(betas, [1.0, 1.0])
        return PovmResult(2, povm_objective(m, el), el, tuple(betas))

    starts = []
    lp_betas, _ = _lp_seed(m)
    if lp_betas is not None and len(lp_betas):
        starts.append(_pad_seed(lp_betas, k, rng))
    for s in seeds or []:
        starts.append(_pad_seed(list(s)[:k], k, rng))
    for _ in range(restarts):
        starts.append(list(rng.uniform(0, 2 * math.pi, size=k)))

    best_x, best_v = None, INFEASIBLE
    for angles in starts:
        x0 = np.array(angles, dtype=float)
        if _k_objective(rows, x0, k) >= INFEASIBLE:
            continue
        x, v = _local_search(rows, x0, k)
        if v < best_v:
            best_x, best_v = x, v
    if best_x is None:
        raise OracleConvergenceError(np.inf, f"no feasible {k}-element POVM found")
    # coarse runs from every start, tight polish of the winner
    best_x, _ = _local_search(rows, best_x, k, xatol=1e-11, fatol=1e-15)
    betas = list(best_x)
    w = _best_weights(rows, betas)
    el = xz_elements(betas, w)
    return PovmResult(k, povm_objective(m, el), el, tuple(float(b) for b in betas))


# --------------------------------------------------------------------------
# perturbation tests
# --------------------------------------------------------------------------

def merge_toward_rank_two(elements, eta, i=0, j=1):
    """Move a fraction ``eta`` of elements ``i`` and ``j`` into a new element ``eta (E_i + E_j)``.

    The new element is time-like (rank two) when ``E_i`` and ``E_j`` are not
    parallel; completeness is preserved.
    """
    el = np.array(elements, dtype=float)
    extra = eta * (el[i] + el[j])
    el[i] *= 1 - eta
    el[j] *= 1 - eta
    return np.vstack([el, extra])


def rotate_about_z(elements, psi):
    """Rotate every element of a POVM on B about the z-axis by ``psi``."""
    el = np.array(elements, dtype=float)
    c, s = math.cos(psi), math.sin(psi)
    x, y = el[:, 1].copy(), el[:, 2].copy()
    el[:, 1] = c * x - s * y
    el[:, 2] = s * x + c * y
    return el


# --------------------------------------------------------------------------
# verification
# --------------------------------------------------------------------------

@dataclass
class VerificationRecord:
    m03: float
    m11: float
    m22: float
    m30: float
    m33: float
    closed_form: float
    kind: str
    oracle_vn_sphere: float
    oracle_k2: float
    oracle_k3: float
    oracle_k4: float
    oracle_best: float
    oracle_kind: str
    deviation: float
    k4_gain: float
    vn_out_of_plane: float
    kind_match: bool
    agrees: bool

    def failure_report(self):
        if self.agrees:
            return ""
        return (f"mismatch m=({self.m03!r}, {self.m11!r}, {self.m22!r}, {self.m30!r}, {self.m33!r}): "
                f"closed form {self.closed_form!r} [{self.kind}] vs oracle {self.oracle_best!r} "
                f"[{self.oracle_kind}], deviation {self.deviation:.3g}")


FIELDS = list(VerificationRecord.__dataclass_fields__)


def verify_state(m, restarts=20, seed=0, grid_n=4000, tol=ORACLE_TOL):
    """Compare the closed-form minimum with the brute-force oracle for one state."""
    from .optimizer import discord

    mc, _ = canonical_mueller(m)
    mc = require_physical(mc)
    report = discord(mc, side="B")
    vn = best_von_neumann_sphere(mc, grid_n=grid_n)
    r2 = best_povm_xz(mc, 2, restarts=0, seed=seed)
    r3 = best_povm_xz(mc, 3, restarts=restarts, seed=seed, seeds=[r2.betas])
    r4 = best_povm_xz(mc, 4, restarts=restarts, seed=seed + 1, seeds=[r3.betas])
    best = min(vn.value, r2.value, r3.value, r4.value)

    v_vertical = povm_objective(mc, xz_elements([0.0, math.pi], [1.0, 1.0]))
    v_horizontal = povm_objective(mc, xz_elements([math.pi / 2, -math.pi / 2], [1.0, 1.0]))
    v_vn = min(vn.value, r2.value)
    if r3.value < v_vn - 1e-9:
        oracle_kind = "ThreePOVM"
    else:
        oracle_kind = "VerticalVN" if v_vertical <= v_horizontal else "HorizontalVN"
    structure_value = {"ThreePOVM": r3.value, "VerticalVN": v_vertical,
                       "HorizontalVN": v_horizontal}
    kind = str(report.scheme.kind)
    kind_match = kind == oracle_kind or structure_value[kind] - best < KIND_GAP
    deviation = report.SA_min - best
    return VerificationRecord(
        m03=float(mc[0, 3]), m11=float(mc[1, 1]), m22=float(mc[2, 2]),
        m30=float(mc[3, 0]), m33=float(mc[3, 3]),
        closed_form=report.SA_min, kind=kind,
        oracle_vn_sphere=vn.value, oracle_k2=r2.value, oracle_k3=r3.value, oracle_k4=r4.value,
        oracle_best=best, oracle_kind=oracle_kind, deviation=float(deviation),
        k4_gain=float(r3.value - r4.value), vn_out_of_plane=vn.out_of_plane,
        kind_match=bool(kind_match), agrees=bool(abs(deviation) < tol and kind_match),
    )


def write_records(records, fh=None):
    """Write verification records as CSV (header first); returns the text if ``fh`` is None."""
    own = fh is None
    out = io.StringIO() if own else fh
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FIELDS)
    for rec in records:
        row = asdict(rec)
        writer.writerow([repr(row[f]) if isinstance(row[f], float) else row[f] for f in FIELDS])
    return out.getvalue() if own else None
