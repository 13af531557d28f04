"""Brute-force references shared by the tests (no package internals)."""
import numpy as np

PAULI = np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


def mueller_by_loops(rho):
    m = np.zeros((4, 4))
    for a in range(4):
        for b in range(4):
            m[a, b] = np.trace(rho @ np.kron(PAULI[a], PAULI[b].conj())).real
    return m


def density_by_sum(m):
    rho = np.zeros((4, 4), dtype=complex)
    for a in range(4):
        for b in range(4):
            rho += m[a, b] * np.kron(PAULI[a], PAULI[b].conj())
    return rho / 4


def vn_entropy(rho):
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-15]
    return float(-(lam * np.log2(lam)).sum())


def partial_trace(rho, keep):
    r = rho.reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", r) if keep == "A" else np.einsum("ijil->jl", r)


def partial_transpose_b(rho):
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def random_x_density(rng, phases=False):
    d = rng.dirichlet(np.ones(4))
    c03 = np.sqrt(d[0] * d[3]) * rng.uniform()
    c12 = np.sqrt(d[1] * d[2]) * rng.uniform()
    rho = np.diag(d).astype(complex)
    p1, p2 = (rng.uniform(-np.pi, np.pi, 2) if phases else (0.0, 0.0))
    rho[0, 3] = c03 * np.exp(1j * p2)
    rho[3, 0] = np.conj(rho[0, 3])
    rho[1, 2] = c12 * np.exp(1j * p1)
    rho[2, 1] = np.conj(rho[1, 2])
    return rho
