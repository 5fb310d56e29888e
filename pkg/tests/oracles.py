"""Test-only reference implementations, independent of the package's fast paths.

The dense simulator builds the full 2^n x 2^n layer unitaries with matrix
exponentials and explicit Kronecker products; it shares no code with the
package's statevector kernels.
"""
import numpy as np
import scipy.linalg

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def mixer_matrix(n: int) -> np.ndarray:
    """B = sum_k X_k as a dense matrix; bit k of the index is qubit k."""
    dim = 2 ** n
    b = np.zeros((dim, dim), dtype=complex)
    for k in range(n):
        term = np.array([[1.0]], dtype=complex)
        # index = b_{n-1} ... b_0, so qubit n-1 is the first kron factor
        for q in range(n - 1, -1, -1):
            term = np.kron(term, _X if q == k else np.eye(2, dtype=complex))
        b += term
    return b


def dense_expectation(energies: np.ndarray, gammas, betas) -> float:
    """<+| U^dag H U |+> via explicit dense unitaries (any depth)."""
    dim = len(energies)
    n = int(np.log2(dim))
    assert 2 ** n == dim
    b = mixer_matrix(n)
    h = np.diag(energies.astype(complex))
    state = np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)
    for gamma, beta in zip(gammas, betas):
        u_phase = np.diag(np.exp(-1j * gamma * energies))
        u_mix = scipy.linalg.expm(-1j * beta * b)
        state = u_mix @ (u_phase @ state)
    return float(np.real(np.conj(state) @ (h @ state)))


def dense_state(energies: np.ndarray, gammas, betas) -> np.ndarray:
    dim = len(energies)
    n = int(np.log2(dim))
    b = mixer_matrix(n)
    state = np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)
    for gamma, beta in zip(gammas, betas):
        state = np.diag(np.exp(-1j * gamma * energies)) @ state
        state = scipy.linalg.expm(-1j * beta * b) @ state
    return state


def exhaustive_max_cut(edges_by_qubit, n: int) -> float:
    """Plain loop over every assignment (no symmetry tricks)."""
    best = -np.inf
    for b in range(2 ** n):
        cut = 0.0
        for i, j, w in edges_by_qubit:
            if ((b >> i) & 1) != ((b >> j) & 1):
                cut += w
        best = max(best, cut)
    return best
