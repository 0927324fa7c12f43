"""Complex linear-algebra kernel shared by all other modules.

Permanents (Ryser with Gray-code subset ordering plus a brute-force oracle),
LU determinants, Haar-random unitaries, polar projection to the nearest
unitary, gate-fidelity metrics, and total variation distance.

Matrix JSON convention: {"m": int, "re": [[...]], "im": [[...]]}, row-major,
rows = output modes, columns = input modes.
"""
from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, SingularityError

PERMANENT_CAP = 30
NAIVE_PERMANENT_CAP = 9

RandomSource = np.random.Generator


def random_source(seed: int) -> RandomSource:
    """Deterministic pseudo-random stream; identical seeds give identical draws."""
    return np.random.default_rng(seed)


def _square(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"square matrix required, got shape {A.shape}")
    return A


def permanent(M, cap: int = PERMANENT_CAP) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula with Gray-code ordering.

    O(2^n * n) arithmetic; guarded at n <= cap (default 30).
    """
    A = _square(M)
    n = A.shape[0]
    if n == 0:
        return complex(1.0)
    if n > cap:
        raise CapacityError(f"permanent cap is n={cap}, got n={n}")
    # perm(A) = (-1)^n sum_{S != {}} (-1)^|S| prod_i sum_{j in S} a_ij.
    # Gray-code iteration updates the row sums by one column per step.
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    size = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        gray = k ^ (k >> 1)
        if gray & (1 << j):
            row_sums += A[:, j]
            size += 1
        else:
            row_sums -= A[:, j]
            size -= 1
        term = np.prod(row_sums)
        total += term if (size & 1) == 0 else -term
    if n & 1:
        total = -total
    return complex(total)


def permanent_naive(M, cap: int = NAIVE_PERMANENT_CAP) -> complex:
    """Exact permanent as a sum over all n! permutations; oracle for n <= 9."""
    from itertools import permutations

    A = _square(M)
    n = A.shape[0]
    if n == 0:
        return complex(1.0)
    if n > cap:
        raise CapacityError(f"naive permanent cap is n={cap}, got n={n}")
    total = 0.0 + 0.0j
    rows = range(n)
    for sigma in permutations(range(n)):
        prod = 1.0 + 0.0j
        for i in rows:
            prod *= A[i, sigma[i]]
        total += prod
    return complex(total)


def determinant(M) -> complex:
    """LU-based determinant (LAPACK factorization via numpy)."""
    A = _square(M)
    return complex(np.linalg.det(A))


def haar_unitary(m: int, rng: RandomSource) -> np.ndarray:
    """Haar-random m x m unitary.

    Samples a complex Gaussian matrix, takes its QR decomposition, and rescales
    R's diagonal to unit modulus so the distribution is exactly Haar.
    """
    if m < 1:
        raise DimensionError("m >= 1 required")
    Z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def polar_unitary(M) -> np.ndarray:
    """Unitary factor W V^dag of the SVD M = W S V^dag (nearest in Frobenius norm)."""
    A = _square(M)
    W, s, Vh = np.linalg.svd(A)
    if s[-1] <= 1e-13 * max(s[0], 1.0):
        raise SingularityError("polar projection requires full rank")
    return W @ Vh


def gate_fidelity(U, V) -> float:
    """|Tr(U^dag V)| / m for same-dimension unitaries."""
    A = _square(U)
    B = _square(V)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    m = A.shape[0]
    return float(abs(np.trace(A.conj().T @ B)) / m)


def _phase_ascent(Z: np.ndarray, rng: RandomSource, restarts: int, tol: float) -> float:
    """max over phase vectors of |sum_jk e^{i(phi_j + psi_k)} Z_jk| / m.

    Alternating coordinate ascent: for fixed column phases psi the optimal row
    phases align every row term, giving sum_j |sum_k Z_jk e^{i psi_k}|, and
    symmetrically for psi. Each half-step is a closed-form non-decreasing
    update.
    """
    m = Z.shape[0]
    best = 0.0
    for r in range(restarts):
        psi = np.zeros(m) if r == 0 else rng.uniform(0.0, 2.0 * np.pi, size=m)
        prev = -np.inf
        val = 0.0
        for _ in range(1000):
            w = Z @ np.exp(1j * psi)
            phi = -np.angle(w)
            v = np.exp(1j * phi) @ Z
            psi = -np.angle(v)
            val = float(np.sum(np.abs(v)))
            if val - prev <= tol:
                break
            prev = val
        best = max(best, val / m)
    return best


def max_gate_fidelity(U, V, rng: RandomSource | None = None,
                      restarts: int = 8, tol: float = 1e-9) -> float:
    """Gate fidelity maximized over external phases and complex conjugation.

    Maximizes gate_fidelity(U, D1 W D2) over diagonal phase unitaries D1, D2
    and W in {V, conj(V)} by alternating coordinate ascent over the 2m phases
    with multi-start. The first start uses zero phases, so the result is never
    below gate_fidelity(U, V).
    """
    A = _square(U)
    B = _square(V)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    if rng is None:
        rng = random_source(0)
    best = 0.0
    for W in (B, B.conj()):
        best = max(best, _phase_ascent(W * A.conj(), rng, restarts, tol))
    return best


def _probs(p) -> np.ndarray:
    if hasattr(p, "probs"):
        return np.asarray(p.probs, dtype=float)
    return np.asarray(p, dtype=float)


def total_variation_distance(p, q) -> float:
    """Half the L1 distance between two distributions on the same sample space."""
    if hasattr(p, "space") and hasattr(q, "space") and list(p.space) != list(q.space):
        raise DimensionError("sample-space mismatch")
    a = _probs(p)
    b = _probs(q)
    if a.shape != b.shape:
        raise DimensionError("sample-space mismatch")
    return float(0.5 * np.sum(np.abs(a - b)))


def matrix_to_json(U, digits: int = 12) -> dict:
    """Matrix JSON: {"m", "re", "im"}, row-major, rows = output modes."""
    A = np.asarray(U, dtype=complex)
    rnd = lambda x: float(f"{x:.{digits}g}")
    return {
        "m": A.shape[0],
        "re": [[rnd(v.real) for v in row] for row in A],
        "im": [[rnd(v.imag) for v in row] for row in A],
    }


def matrix_from_json(obj: dict | str) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != im.shape:
        raise DimensionError("re/im shape mismatch")
    return re + 1j * im


def is_unitary(U, tol: float = 1e-10) -> bool:
    A = _square(U)
    return bool(np.max(np.abs(A.conj().T @ A - np.eye(A.shape[0]))) <= tol)
