"""Interferometer reconstruction from photon-counting statistics.

Datasets hold single-photon probabilities R[J, k] (row = output, column =
input) with error bars and the two-photon visibility tensor V[k, h, J, G]
(input pair (k, h), output pair (J, G)). The core reconstruction recovers
moduli from probability ratios and phases from visibilities, resolves phase
signs by a consistency rule, solves least-squares systems for the reference
moduli, and projects to the nearest unitary; a reference-permutation sweep
and a stochastic data-perturbation refinement sit on top.

Dataset files: single.csv / single_err.csv (m x m), visib.csv with columns
k,h,J,G,V,sigma (1-based indices).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, InputError, ReferenceChoiceError

VISIBILITY_SLACK = 1e-6


@dataclass(frozen=True)
class ExperimentalDataset:
    """Single-photon probabilities and two-photon visibilities with errors."""

    m: int
    R: np.ndarray
    sigmaR: np.ndarray
    V: np.ndarray
    sigmaV: np.ndarray

    def __post_init__(self):
        m = self.m
        for name in ("R", "sigmaR", "V", "sigmaV"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        if self.R.shape != (m, m) or self.sigmaR.shape != (m, m):
            raise DimensionError("R/sigmaR must be m x m")
        if self.V.shape != (m, m, m, m) or self.sigmaV.shape != (m, m, m, m):
            raise DimensionError("V/sigmaV must be m x m x m x m")
        col_err = 3.0 * self.sigmaR.sum(axis=0) + 1e-9
        bad = np.abs(self.R.sum(axis=0) - 1.0) > col_err
        if np.any(bad):
            raise InputError(f"R columns {np.nonzero(bad)[0] + 1} not normalized")
        if np.max(np.abs(self.V - self.V.transpose(1, 0, 2, 3))) > 1e-9 \
                or np.max(np.abs(self.V - self.V.transpose(0, 1, 3, 2))) > 1e-9:
            raise InputError("V must be symmetric under k<->h and J<->G")
        # |V| <= 1 in theory; noisy data may overshoot moderately, garbage not.
        if np.max(np.abs(self.V)) > 2.0:
            raise InputError("visibility magnitude far outside [-1, 1]")


ARCCOS_HARD_EXCESS = 0.5


@dataclass(frozen=True)
class ReconstructionResult:
    """Reconstructed unitary with its fit-quality metrics and the reference
    (row, column) that produced it (1-based)."""

    U: np.ndarray
    chi2: float
    tvd_single: float
    tvd_two: float
    reference: tuple[int, int]
    fidelity_vs_target: float | None = None

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        object.__setattr__(self, "U", U)
        m = U.shape[0]
        if U.shape != (m, m) or np.max(np.abs(U.conj().T @ U - np.eye(m))) > 1e-10:
            raise InputError("reconstructed matrix must be unitary at 1e-10")


def _clamped_arccos(val: float) -> float:
    """arccos with slack for visibility overshoot: silent inside [-1, 1],
    clamped (counted by the caller) up to a hard excess, error beyond."""
    excess = abs(val) - 1.0
    if excess > ARCCOS_HARD_EXCESS:
        raise InputError(f"visibility phase argument {val} far outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, val)))


def _wrap(a: float) -> float:
    """Wrap into (-pi, pi]."""
    return -math.remainder(-a, 2.0 * math.pi)


def _core_reconstruct(R: np.ndarray, V: np.ndarray) -> np.ndarray:
    """One pass of the moduli/phase reconstruction with reference row 1 and
    column 1 (inputs already relabeled); returns the unprojected matrix."""
    m = R.shape[0]
    if np.any(R <= 0.0):
        raise ReferenceChoiceError("nonpositive single-photon probability in a divisor")

    def x(k, h, j, g):
        return math.sqrt(R[j, k] * R[g, h] / (R[j, h] * R[g, k]))

    def beta(k, h, j, g):
        xv = x(k, h, j, g)
        return abs(_clamped_arccos(-V[k, h, j, g] * (xv + 1.0 / xv) / 2.0))

    A = np.zeros((m, m))
    A0 = np.zeros((m, m))
    for g in range(1, m):
        for h in range(1, m):
            A0[g, h] = beta(0, h, 0, g)

    def sign_pick(k, h, j, g):
        # Choose the sign of A0[g, h] that best matches the measured phase
        # sum; ties (real matrices, where +pi and -pi coincide) go to +1.
        b = beta(k, h, j, g)
        base = A[j, k] - A[j, h] - A[g, k]
        d_plus = abs(b - abs(_wrap(base + A0[g, h])))
        d_minus = abs(b - abs(_wrap(base - A0[g, h])))
        return 1.0 if d_plus <= d_minus else -1.0

    A[1, 1] = A0[1, 1]
    for g in range(2, m):
        A[g, 1] = sign_pick(0, 1, 1, g) * A0[g, 1]
    for h in range(2, m):
        A[1, h] = sign_pick(1, h, 0, 1) * A0[1, h]
    for g in range(2, m):
        for h in range(2, m):
            A[g, h] = sign_pick(1, h, 1, g) * A0[g, h]

    X1 = np.sqrt(R[0, 0] * R / np.outer(R[:, 0], R[0, :]))
    M2 = X1 * np.exp(1j * A)
    e1 = np.zeros(m)
    e1[0] = 1.0
    col_sq = np.linalg.lstsq(M2.conj().T, e1, rcond=None)[0]
    row_sq = np.linalg.lstsq(M2, e1, rcond=None)[0]
    if np.any(col_sq.real <= 0.0) or np.any(row_sq.real <= 0.0) \
            or np.max(np.abs(col_sq.imag)) > 0.5 or np.max(np.abs(row_sq.imag)) > 0.5:
        raise ReferenceChoiceError("negative squared moduli for the reference row/column")
    T = np.empty((m, m))
    T[:, 0] = np.sqrt(col_sq.real)
    T[0, :] = np.sqrt(row_sq.real)
    T[1:, 1:] = X1[1:, 1:] * np.outer(T[1:, 0], T[0, 1:]) / T[0, 0]
    return T * np.exp(1j * A)


def _gauge_fix(U: np.ndarray, ref_row: int, ref_col: int) -> np.ndarray:
    """Phase gauge: reference row and column real non-negative (0-based refs)."""
    d2 = np.exp(-1j * np.angle(U[ref_row, :]))
    U = U * d2[None, :]
    d1 = np.exp(-1j * np.angle(U[:, ref_col]))
    return d1[:, None] * U


def laing_obrien(data: ExperimentalDataset, ref_row: int = 1, ref_col: int = 1,
                 target: np.ndarray | None = None) -> ReconstructionResult:
    """Reconstruct the unitary from single-photon probabilities and
    two-photon visibilities, using the given reference row and column
    (1-based), then project to the nearest unitary."""
    from .numerics import max_gate_fidelity, polar_unitary

    m = data.m
    if not (1 <= ref_row <= m and 1 <= ref_col <= m):
        raise InputError("reference row/column outside 1..m")
    rj, rk = ref_row - 1, ref_col - 1
    rows = (np.arange(m) + rj) % m
    cols = (np.arange(m) + rk) % m
    R = data.R[np.ix_(rows, cols)]
    V = data.V[np.ix_(cols, cols, rows, rows)]
    M1 = _core_reconstruct(R, V)
    back_rows = (np.arange(m) - rj) % m
    back_cols = (np.arange(m) - rk) % m
    M0 = M1[np.ix_(back_rows, back_cols)]
    U = _gauge_fix(polar_unitary(M0), rj, rk)
    tvd1, tvd2 = dataset_tvds(data, U)
    fid = None if target is None else max_gate_fidelity(np.asarray(target, dtype=complex), U)
    return ReconstructionResult(U, chi_square(data, U), tvd1, tvd2,
                                (ref_row, ref_col), fid)


def gauge_fixed_fidelity(U, V, ref_row: int = 1, ref_col: int = 1,
                         match_conjugation: bool = True) -> float:
    """Plain gate fidelity |Tr(U V^dag)| / m after fixing both matrices to
    the same reference-row/column phase gauge. Unlike the phase-optimized
    fidelity, this counts phase reconstruction errors, matching the
    published noise study. With match_conjugation the better of the two
    conjugation branches is reported; without it each matrix is put on its
    own alpha_22 >= 0 branch first, so a noise-flipped branch choice counts
    as a reconstruction error."""
    U = _gauge_fix(np.asarray(U, dtype=complex), ref_row - 1, ref_col - 1)
    V = _gauge_fix(np.asarray(V, dtype=complex), ref_row - 1, ref_col - 1)
    m = U.shape[0]
    if match_conjugation:
        return max(abs(np.trace(U @ V.conj().T)) / m,
                   abs(np.trace(U.conj() @ V.conj().T)) / m)
    r, c = ref_row % m, ref_col % m
    if U[r, c].imag < 0.0:
        U = U.conj()
    if V[r, c].imag < 0.0:
        V = V.conj()
    return abs(np.trace(U @ V.conj().T)) / m


def permutation_sweep(data: ExperimentalDataset,
                      target: np.ndarray | None = None) -> list[ReconstructionResult]:
    """Run the reconstruction for every reference (row, column) pair; failed
    references are skipped. Results are sorted by chi-squared."""
    results = []
    for ref_row in range(1, data.m + 1):
        for ref_col in range(1, data.m + 1):
            try:
                results.append(laing_obrien(data, ref_row, ref_col, target))
            except (ReferenceChoiceError, InputError):
                continue
    results.sort(key=lambda r: r.chi2)
    return results


def chi_square(data: ExperimentalDataset, U) -> float:
    """Sum of ((measured - predicted) / sigma)^2 over all single-photon
    probabilities and all distinct-pair visibilities; zero-sigma points are
    excluded with a warning."""
    from .boson import theoretical_tensors

    U = np.asarray(U, dtype=complex)
    m = data.m
    Rt, Vt = theoretical_tensors(U)
    total = 0.0
    skipped = 0
    mask = data.sigmaR > 0.0
    skipped += int(np.sum(~mask))
    total += float(np.sum(((data.R - Rt)[mask] / data.sigmaR[mask]) ** 2))
    pair = np.triu(np.ones((m, m), dtype=bool), 1)
    sel = pair[:, :, None, None] & pair.T[None, None, :, :]
    sv = data.sigmaV[sel]
    good = sv > 0.0
    skipped += int(np.sum(~good))
    dv = (data.V - Vt)[sel]
    total += float(np.sum((dv[good] / sv[good]) ** 2))
    if skipped:
        warnings.warn(f"chi-squared: {skipped} zero-sigma points excluded")
    return total


def dataset_tvds(data: ExperimentalDataset, U) -> tuple[float, float]:
    """Total variation distances between the dataset and the model: averaged
    single-photon rows and averaged two-photon coincidence patterns (the
    experimental pattern recovered from V and R)."""
    U = np.asarray(U, dtype=complex)
    m = data.m
    R = data.R
    tvd1 = 0.5 * float(np.sum(np.abs(R - np.abs(U) ** 2))) / m
    total = 0.0
    for k in range(1, m):
        for h in range(k):
            for j in range(m - 1):
                for g in range(j + 1, m):
                    exp_p = (1.0 - data.V[k, h, j, g]) * (R[j, k] * R[g, h] + R[j, h] * R[g, k])
                    teo_p = abs(U[j, k] * U[g, h] + U[j, h] * U[g, k]) ** 2
                    total += abs(exp_p - teo_p)
    tvd2 = 0.5 * total / (m * (m - 1) / 2)
    return tvd1, tvd2


def stochastic_refine(data: ExperimentalDataset, U0, budget: int,
                      rng, step: float = 1.0,
                      target: np.ndarray | None = None) -> ReconstructionResult:
    """Iteratively perturb the model-predicted data by the experimental error
    bars (divided by `step`), re-run the permutation sweep on the perturbed
    data, and accept any candidate improving the chi-squared against the real
    data. The chi-squared trace is monotone non-increasing by construction."""
    from .boson import theoretical_tensors
    from .numerics import max_gate_fidelity

    m = data.m
    best_u = np.asarray(U0, dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        best_chi = chi_square(data, best_u)
    best_ref = (1, 1)
    Rm, Vm = theoretical_tensors(best_u)
    pair = np.triu(np.ones((m, m), dtype=bool), 1)
    for _ in range(int(budget)):
        Rs = Rm + rng.standard_normal((m, m)) * data.sigmaR / step
        Rs = np.clip(Rs, 1e-12, None)
        Rs /= Rs.sum(axis=0, keepdims=True)
        eps = rng.standard_normal((m, m, m, m))
        Vs = Vm + eps * data.sigmaV / step
        # One draw per distinct (input pair, output pair), mirrored.
        sel = pair[:, :, None, None] & pair[None, None, :, :]
        full = np.where(sel, Vs, 0.0)
        full = full + full.transpose(1, 0, 2, 3) + full.transpose(0, 1, 3, 2) \
            + full.transpose(1, 0, 3, 2)
        Vs = np.clip(full, -1.999, 1.999)
        try:
            perturbed = ExperimentalDataset(m, Rs, data.sigmaR, Vs, data.sigmaV)
        except InputError:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for cand in permutation_sweep(perturbed):
                chi = chi_square(data, cand.U)
                if chi < best_chi:
                    best_chi, best_u, best_ref = chi, cand.U, cand.reference
                    Rm, Vm = theoretical_tensors(best_u)
    tvd1, tvd2 = dataset_tvds(data, best_u)
    fid = None if target is None else max_gate_fidelity(np.asarray(target, dtype=complex), best_u)
    return ReconstructionResult(best_u, best_chi, tvd1, tvd2, best_ref, fid)


# ---------------------------------------------------------------------------
# File I/O


def dataset_to_files(data: ExperimentalDataset, directory) -> None:
    """Write single.csv, single_err.csv, and visib.csv (k,h,J,G,V,sigma with
    1-based indices over distinct pairs)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    np.savetxt(directory / "single.csv", data.R, delimiter=",")
    np.savetxt(directory / "single_err.csv", data.sigmaR, delimiter=",")
    m = data.m
    with open(directory / "visib.csv", "w") as fh:
        fh.write("k,h,J,G,V,sigma\n")
        for k in range(m):
            for h in range(k + 1, m):
                for J in range(m):
                    for G in range(J + 1, m):
                        fh.write(f"{k + 1},{h + 1},{J + 1},{G + 1},"
                                 f"{float(data.V[k, h, J, G])!r},"
                                 f"{float(data.sigmaV[k, h, J, G])!r}\n")


def dataset_from_files(directory) -> ExperimentalDataset:
    directory = Path(directory)
    R = np.atleast_2d(np.loadtxt(directory / "single.csv", delimiter=","))
    sigmaR = np.atleast_2d(np.loadtxt(directory / "single_err.csv", delimiter=","))
    m = R.shape[0]
    V = np.zeros((m, m, m, m))
    sigmaV = np.zeros((m, m, m, m))
    with open(directory / "visib.csv") as fh:
        header = fh.readline().strip().split(",")
        if header != ["k", "h", "J", "G", "V", "sigma"]:
            raise InputError("visib.csv must have header k,h,J,G,V,sigma")
        for line in fh:
            if not line.strip():
                continue
            k, h, J, G, v, s = line.strip().split(",")
            k, h, J, G = int(k) - 1, int(h) - 1, int(J) - 1, int(G) - 1
            for a, b in ((k, h), (h, k)):
                for c, d in ((J, G), (G, J)):
                    V[a, b, c, d] = float(v)
                    sigmaV[a, b, c, d] = float(s)
    return ExperimentalDataset(m, R, sigmaR, V, sigmaV)


def result_to_json(result: ReconstructionResult) -> dict:
    from .numerics import matrix_to_json

    out = {
        "U": matrix_to_json(result.U),
        "chi2": result.chi2,
        "tvd_single": result.tvd_single,
        "tvd_two": result.tvd_two,
        "reference": list(result.reference),
    }
    if result.fidelity_vs_target is not None:
        out["fidelity_vs_target"] = result.fidelity_vs_target
    return out
