"""Free-fermion (matchgate) circuit engine.

A two-qubit gate G(A, B) acts as A on the even-parity subspace (|00>, |11>)
and B on the odd one (|01>, |10>); it is a matchgate when det A = det B.
Circuits of matchgates on a path map, through the operators
c_{2j-1} = (prod_{i<j} Z_i) X_j and c_{2j} = (prod_{i<j} Z_i) Y_j, to SO(2n)
rotations, which lets <Z_k> be evaluated in polynomial time; on a cycle the
boundary gate needs a sign-split pair of rotations (R, R') combined with
even/odd-parity projections of the input. The module also provides nonlocal
gate invariants, a Givens normal form, a dense state-vector oracle, a
registry of encoded-universality identities, and the path/cycle-vs-universal
graph classification.

Circuit JSON: {"n": int, "topology": "path" | "cycle" | {"edges": [[i, j],
...]}, "gates": [{"A": matrix2, "B": matrix2, "qubits": [i, j]}, ...]}.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import CapacityError, DimensionError, InputError
from .numerics import RandomSource

MATCHGATE_TOL = 1e-9
BRUTE_FORCE_CAP = 14

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# Single-qubit Pauli products: _MUL_CODE[p, q] and _MUL_PHASE[p, q] give
# sigma_p sigma_q = phase * sigma_code.
_MUL_CODE = np.zeros((4, 4), dtype=int)
_MUL_PHASE = np.zeros((4, 4), dtype=complex)
for _p in range(4):
    for _q in range(4):
        _m = PAULI[_p] @ PAULI[_q]
        for _r in range(4):
            _c = np.trace(PAULI[_r].conj().T @ _m) / 2
            if abs(_c) > 0.5:
                _MUL_CODE[_p, _q] = _r
                _MUL_PHASE[_p, _q] = _c
                break


def _check_unitary2(M, name: str) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.shape != (2, 2):
        raise DimensionError(f"{name} must be 2x2")
    if np.max(np.abs(A.conj().T @ A - np.eye(2))) > 1e-10:
        raise InputError(f"{name} is not unitary")
    return A


@dataclass(frozen=True)
class TwoQubitGate:
    """Parity-preserving gate G(A, B); A acts on (|00>, |11>), B on (|01>, |10>)."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _check_unitary2(self.A, "A"))
        object.__setattr__(self, "B", _check_unitary2(self.B, "B"))

    @property
    def matrix(self) -> np.ndarray:
        A, B = self.A, self.B
        return np.array([
            [A[0, 0], 0, 0, A[0, 1]],
            [0, B[0, 0], B[0, 1], 0],
            [0, B[1, 0], B[1, 1], 0],
            [A[1, 0], 0, 0, A[1, 1]],
        ])

    @classmethod
    def from_matrix(cls, M) -> "TwoQubitGate":
        M = np.asarray(M, dtype=complex)
        if M.shape != (4, 4):
            raise DimensionError("gate matrix must be 4x4")
        mask = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=bool)
        if np.max(np.abs(M[~mask])) > 1e-10:
            raise InputError("matrix is not parity-preserving")
        A = np.array([[M[0, 0], M[0, 3]], [M[3, 0], M[3, 3]]])
        B = M[1:3, 1:3].copy()
        return cls(A, B)

    def gauge_fixed(self) -> tuple[np.ndarray, np.ndarray, float]:
        """(A', B', beta) with det A' = 1/det B' = e^{2 i beta} and
        arg(det A') in (-pi/2, pi/2], fixing the global phase uniquely."""
        dA, dB = np.linalg.det(self.A), np.linalg.det(self.B)
        gamma = -cmath.phase(dA * dB) / 4.0
        arg = cmath.phase(dA) + 2.0 * gamma
        while arg <= -math.pi / 2:
            gamma += math.pi / 2
            arg += math.pi
        while arg > math.pi / 2:
            gamma -= math.pi / 2
            arg -= math.pi
        phase = cmath.exp(1j * gamma)
        return phase * self.A, phase * self.B, arg / 2.0


def f_swap() -> TwoQubitGate:
    """G(Z, X): swaps the qubits with a minus sign on |11>."""
    return TwoQubitGate(PAULI[3], PAULI[1])


def i_swap() -> TwoQubitGate:
    """G(I, iX): the matchgate exp(i pi/4 (XX + YY))."""
    return TwoQubitGate(PAULI[0], 1j * PAULI[1])


def xx_yy_gate(a: float, b: float) -> TwoQubitGate:
    """exp(i (a XX + b YY)) = G(R_x(a - b), R_x(a + b)) with
    R_x(t) = [[cos t, i sin t], [i sin t, cos t]]."""
    def rx(t):
        return np.array([[math.cos(t), 1j * math.sin(t)],
                         [1j * math.sin(t), math.cos(t)]])
    return TwoQubitGate(rx(a - b), rx(a + b))


def zz_gate(c: float) -> TwoQubitGate:
    """exp(i c Z x Z) = G(e^{ic} I, e^{-ic} I)."""
    return TwoQubitGate(cmath.exp(1j * c) * PAULI[0], cmath.exp(-1j * c) * PAULI[0])


def random_matchgate(rng: RandomSource) -> TwoQubitGate:
    """Haar-ish random matchgate: independent random A, with B's determinant
    phase aligned to A's."""
    from .numerics import haar_unitary

    A = haar_unitary(2, rng)
    B = haar_unitary(2, rng)
    shift = (cmath.phase(np.linalg.det(A)) - cmath.phase(np.linalg.det(B))) / 2.0
    return TwoQubitGate(A, B * cmath.exp(1j * shift))


def is_matchgate(g: TwoQubitGate, tol: float = MATCHGATE_TOL) -> bool:
    """Determinant condition det A = det B, tested in global-phase-invariant
    form: det A * conj(det B) vs |det A * det B|."""
    dA, dB = np.linalg.det(g.A), np.linalg.det(g.B)
    return bool(abs(dA * np.conj(dB) - abs(dA * dB)) <= tol)


def nonlocal_parameters(g: TwoQubitGate) -> tuple[float, float, float]:
    """Nonlocal invariants (a, b, c) of a parity-preserving gate.

    In the gauge-fixed parameterization, theta and phi are the mixing angles
    of the even and odd blocks and beta half the argument of det A';
    (a, b, c) = ((phi + theta)/2, (phi - theta)/2, beta). Matchgates are
    exactly the c = 0 gates.
    """
    A, B, beta = g.gauge_fixed()
    theta = math.atan2(abs(A[0, 1]), abs(A[0, 0]))
    phi = math.atan2(abs(B[0, 1]), abs(B[0, 0]))
    return ((phi + theta) / 2.0, (phi - theta) / 2.0, beta)


def entangling_power(a: float, b: float, c: float) -> float:
    """Rescaled entangling power: 0 for local gates and SWAP, 1 for perfect
    entanglers."""
    return (1.0
            - math.cos(2 * a) ** 2 * math.cos(2 * b) ** 2 * math.cos(2 * c) ** 2
            - math.sin(2 * a) ** 2 * math.sin(2 * b) ** 2 * math.sin(2 * c) ** 2)


def extract_entangler(g: TwoQubitGate) -> tuple[float, TwoQubitGate]:
    """Split a parity-preserving gate as G(A', B') * exp(i c Z x Z) with a
    matchgate residual; c = 0 iff the input is a matchgate."""
    _, _, beta = g.gauge_fixed()
    # Building the residual from the original blocks keeps the reconstruction
    # exact (no global phase) and returns matchgates unchanged.
    residual = TwoQubitGate(g.A * cmath.exp(-1j * beta), g.B * cmath.exp(1j * beta))
    return beta, residual


# ---------------------------------------------------------------------------
# Circuits


@dataclass(frozen=True)
class MatchgateCircuit:
    """Ordered gate list on n qubits arranged on a path, cycle, or graph."""

    n: int
    topology: str | tuple[tuple[int, int], ...]
    gates: tuple[tuple[TwoQubitGate, tuple[int, int]], ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise InputError("n >= 2 required")
        topo = self.topology
        if not isinstance(topo, str):
            topo = tuple(tuple(sorted((int(i), int(j)))) for i, j in topo)
            object.__setattr__(self, "topology", topo)
        elif topo not in ("path", "cycle"):
            raise InputError(f"unknown topology {topo!r}")
        gates = tuple((g, (int(p), int(q))) for g, (p, q) in self.gates)
        object.__setattr__(self, "gates", gates)
        for _, (p, q) in gates:
            if not (1 <= p <= self.n and 1 <= q <= self.n) or p == q:
                raise InputError(f"bad qubit pair {(p, q)}")
            if not self._legal_edge(p, q):
                raise InputError(f"pair {(p, q)} is not an edge of the topology")

    def _legal_edge(self, p: int, q: int) -> bool:
        if self.topology == "path":
            return abs(p - q) == 1
        if self.topology == "cycle":
            return abs(p - q) == 1 or {p, q} == {1, self.n}
        return tuple(sorted((p, q))) in self.topology


@dataclass(frozen=True)
class JWRotation:
    """SO(2n) image of a matchgate circuit; Rp is the boundary-sign-flipped
    variant needed on cycles (None on paths, equal to R when no boundary
    gate occurs)."""

    R: np.ndarray
    Rp: np.ndarray | None = None


def _local_majoranas() -> list[np.ndarray]:
    """Two-qubit c operators: X x I, Y x I, Z x X, Z x Y."""
    return [np.kron(PAULI[1], PAULI[0]), np.kron(PAULI[2], PAULI[0]),
            np.kron(PAULI[3], PAULI[1]), np.kron(PAULI[3], PAULI[2])]


def _gate_block(g: TwoQubitGate) -> np.ndarray:
    """4x4 rotation r with U^dag c_i U = sum_j r_ij c_j on the gate's two
    qubits: r_ij = Tr(U^dag c_i U c_j) / 4."""
    if not is_matchgate(g):
        raise InputError("JW rotation requires a matchgate (determinant condition)")
    U = g.matrix
    cs = _local_majoranas()
    r = np.empty((4, 4))
    for i in range(4):
        Ci = U.conj().T @ cs[i] @ U
        for j in range(4):
            val = np.trace(Ci @ cs[j]) / 4.0
            r[i, j] = val.real
    return r


# The boundary (1, n) gate of a cycle maps to quadratic operators only within
# a fixed parity sector; in the other sector the two-site coupling terms flip
# sign, implemented by conjugating the 4x4 block with diag(1, 1, -1, -1).
_BOUNDARY_FLIP = np.diag([1.0, 1.0, -1.0, -1.0])

# Which parity sector takes the unflipped block (calibrated against the dense
# oracle): the even-parity rotation R uses the flipped block.
_EVEN_SECTOR_FLIPPED = True


def _embed_block(R: np.ndarray, r: np.ndarray, coords: list[int]) -> np.ndarray:
    """Left-multiply R by the rotation holding block r on the given
    (0-based) coordinates."""
    out = R.copy()
    out[coords, :] = r @ R[coords, :]
    return out


def gate_rotation(g: TwoQubitGate, k: int, n: int) -> JWRotation:
    """SO(2n) rotation of a matchgate on qubits (k, k+1) of an n-qubit path."""
    if not 1 <= k <= n - 1:
        raise InputError(f"qubit pair ({k}, {k + 1}) outside 1..{n}")
    r = _gate_block(g)
    R = np.eye(2 * n)
    coords = [2 * k - 2, 2 * k - 1, 2 * k, 2 * k + 1]
    return JWRotation(_embed_block(R, r, coords))


def circuit_rotation(circ) -> JWRotation:
    """SO(2n) rotation of a path/cycle circuit (product over gates, last gate
    leftmost); for cycles also the boundary-sign variant R'."""
    if isinstance(circ, NormalForm):
        R = circ.rotation
        return JWRotation(R, None)
    if circ.topology not in ("path", "cycle"):
        raise InputError("circuit_rotation requires a path or cycle topology")
    n = circ.n
    R = np.eye(2 * n)
    Rp = np.eye(2 * n) if circ.topology == "cycle" else None
    for g, (p, q) in circ.gates:
        r = _gate_block(g)
        if {p, q} == {1, n} and n > 2:
            # Boundary gate: stored on ordered pair with qubit n first, so the
            # block coordinates wrap around.
            if (p, q) != (n, 1):
                raise InputError("boundary gates must be given as (n, 1)")
            coords = [2 * n - 2, 2 * n - 1, 0, 1]
            flipped = _BOUNDARY_FLIP @ r @ _BOUNDARY_FLIP
            even = flipped if _EVEN_SECTOR_FLIPPED else r
            odd = r if _EVEN_SECTOR_FLIPPED else flipped
            R = _embed_block(R, even, coords)
            Rp = _embed_block(Rp, odd, coords)
        else:
            lo = min(p, q)
            if (p, q) != (lo, lo + 1):
                raise InputError(f"gates must be given as (k, k+1), got {(p, q)}")
            coords = [2 * lo - 2, 2 * lo - 1, 2 * lo, 2 * lo + 1]
            R = _embed_block(R, r, coords)
            if Rp is not None:
                Rp = _embed_block(Rp, r, coords)
    return JWRotation(R, Rp)


# ---------------------------------------------------------------------------
# Pauli-string correlation matrices and <Z_k>


def _c_string(a: int, n: int) -> np.ndarray:
    """Pauli codes of c_a (1-based a): Z...Z X/Y on qubit ceil(a/2)."""
    j = (a + 1) // 2
    codes = np.zeros(n, dtype=int)
    codes[: j - 1] = 3
    codes[j - 1] = 1 if a % 2 == 1 else 2
    return codes


def _check_product_state(states, n: int) -> list[np.ndarray]:
    if len(states) != n:
        raise InputError(f"expected {n} single-qubit states, got {len(states)}")
    out = []
    for s in states:
        v = np.asarray(s, dtype=complex).reshape(-1)
        if v.shape != (2,):
            raise InputError("single-qubit states must have two amplitudes")
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise InputError("zero-norm input state")
        out.append(v / norm)
    return out


def _correlation_matrices(states: list[np.ndarray], n: int, with_parity: bool):
    """M[a, b] = <psi| c_a c_b |psi> and, if requested, the version with the
    total-parity operator prod_i Z_i appended."""
    # Per-qubit expectation values of all four Paulis, with and without Z.
    exp_plain = np.empty((n, 4), dtype=complex)
    exp_z = np.empty((n, 4), dtype=complex)
    for i, v in enumerate(states):
        for p in range(4):
            exp_plain[i, p] = v.conj() @ (PAULI[p] @ v)
            code = _MUL_CODE[p, 3]
            exp_z[i, p] = _MUL_PHASE[p, 3] * (v.conj() @ (PAULI[code] @ v))
    strings = [_c_string(a, n) for a in range(1, 2 * n + 1)]
    M = np.empty((2 * n, 2 * n), dtype=complex)
    MP = np.empty((2 * n, 2 * n), dtype=complex) if with_parity else None
    for a in range(2 * n):
        sa = strings[a]
        for b in range(2 * n):
            sb = strings[b]
            phase = np.prod(_MUL_PHASE[sa, sb])
            codes = _MUL_CODE[sa, sb]
            M[a, b] = phase * np.prod(exp_plain[np.arange(n), codes])
            if with_parity:
                MP[a, b] = phase * np.prod(exp_z[np.arange(n), codes])
    return M, MP


def expected_z(circ: MatchgateCircuit, input_states, k: int) -> float:
    """<Z_k> after the circuit on a product-state input, via the SO(2n)
    representation (O(n^2) correlation terms); paths directly, cycles through
    the even/odd-parity split with R and R'."""
    n = circ.n
    if not 1 <= k <= n:
        raise InputError(f"qubit {k} outside 1..{n}")
    states = _check_product_state(input_states, n)
    rot = circuit_rotation(circ)
    r1 = rot.R[2 * k - 2]
    r2 = rot.R[2 * k - 1]
    if circ.topology == "path":
        M, _ = _correlation_matrices(states, n, with_parity=False)
        val = -1j * (r1 @ M @ r2)
    else:
        M, MP = _correlation_matrices(states, n, with_parity=True)
        Ep = 0.5 * (M + MP)
        Em = 0.5 * (M - MP)
        r1p = rot.Rp[2 * k - 2]
        r2p = rot.Rp[2 * k - 1]
        val = -1j * (r1 @ Ep @ r2 + r1p @ Em @ r2p)
    if abs(val.imag) > 1e-8:
        raise InputError(f"non-real expectation value {val}")
    return float(min(1.0, max(-1.0, val.real)))


# ---------------------------------------------------------------------------
# Normal form


@dataclass(frozen=True)
class NormalForm:
    """Givens decomposition of a circuit rotation: each (i, j, theta) is the
    gate u = exp(theta c_i c_j), whose SO(2n) image rotates coordinates
    (i, j) by the angle 2 theta."""

    n: int
    rotations: tuple[tuple[int, int, float], ...]

    @property
    def rotation(self) -> np.ndarray:
        R = np.eye(2 * self.n)
        for i, j, theta in reversed(self.rotations):
            c, s = math.cos(2 * theta), math.sin(2 * theta)
            g = np.eye(2 * self.n)
            g[i - 1, i - 1] = c
            g[i - 1, j - 1] = -s
            g[j - 1, i - 1] = s
            g[j - 1, j - 1] = c
            R = R @ g
    # rotations are listed first-applied first, so the product runs right
    # to left over the reversed list.
        return R


def normal_form(circ: MatchgateCircuit) -> NormalForm:
    """Decompose a path circuit's rotation into at most n(2n - 1) generator
    exponentials exp(theta c_i c_j) on adjacent coordinate pairs."""
    if circ.topology != "path":
        raise InputError("normal form is defined for path circuits")
    n = circ.n
    V = circuit_rotation(circ).R.copy()
    rotations: list[tuple[int, int, float]] = []
    d = 2 * n
    for col in range(d - 1):
        for row in range(d - 1, col, -1):
            x, y = V[row - 1, col], V[row, col]
            if abs(y) <= 1e-12 and x >= 0.0:
                continue
            phi = math.atan2(y, x)
            c, s = math.cos(phi), math.sin(phi)
            upper = c * V[row - 1] + s * V[row]
            lower = -s * V[row - 1] + c * V[row]
            V[row - 1], V[row] = upper, lower
            rotations.append((row, row + 1, phi / 2.0))
    # Elimination with non-negative pivots leaves exactly the identity
    # because det R = +1.
    rotations.reverse()
    return NormalForm(n, tuple(rotations))


# ---------------------------------------------------------------------------
# Dense oracle


def _apply_two_qubit(state: np.ndarray, U4: np.ndarray, p: int, q: int, n: int) -> np.ndarray:
    """Apply a 4x4 gate whose first tensor factor is qubit p, second qubit q."""
    psi = state.reshape((2,) * n)
    psi = np.moveaxis(psi, (p - 1, q - 1), (0, 1))
    shape = psi.shape
    psi = U4 @ psi.reshape(4, -1)
    psi = np.moveaxis(psi.reshape(shape), (0, 1), (p - 1, q - 1))
    return psi.reshape(-1)


def brute_force(circ: MatchgateCircuit, input_states, observable="state"):
    """Dense 2^n state-vector simulation (n <= 14) for any topology; the
    observable is "state" (returns the final vector) or a qubit index k for
    <Z_k>."""
    n = circ.n
    if n > BRUTE_FORCE_CAP:
        raise CapacityError(f"dense simulation capped at n={BRUTE_FORCE_CAP}")
    states = _check_product_state(input_states, n)
    psi = reduce(np.kron, states)
    for g, (p, q) in circ.gates:
        psi = _apply_two_qubit(psi, g.matrix, p, q, n)
    if observable == "state":
        return psi
    k = int(observable)
    if not 1 <= k <= n:
        raise InputError(f"qubit {k} outside 1..{n}")
    probs = np.abs(psi.reshape((2,) * n)) ** 2
    axes = tuple(i for i in range(n) if i != k - 1)
    marg = probs.sum(axis=axes)
    return float(marg[0] - marg[1])


# ---------------------------------------------------------------------------
# Graph classification


def classify_graph(edges, n: int) -> str:
    """Matchgate-power dichotomy of an interaction graph: paths and cycles
    are classically simulable, every other connected graph is universal."""
    adj: dict[int, set[int]] = {v: set() for v in range(1, n + 1)}
    for i, j in edges:
        i, j = int(i), int(j)
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise InputError(f"bad edge {(i, j)}")
        adj[i].add(j)
        adj[j].add(i)
    seen = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) < n:
        return "Disconnected"
    degrees = sorted(len(adj[v]) for v in adj)
    if all(d == 2 for d in degrees):
        return "SimulablePathOrCycle"
    if degrees[:2] == [1, 1] and all(d == 2 for d in degrees[2:]):
        return "SimulablePathOrCycle"
    return "Universal"


# ---------------------------------------------------------------------------
# Identity registry


def _kron_chain(ops: list[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def _embed_gate(U4: np.ndarray, p: int, q: int, n: int) -> np.ndarray:
    """Dense n-qubit unitary of a 4x4 gate on (first factor p, second q)."""
    dim = 2 ** n
    out = np.empty((dim, dim), dtype=complex)
    for col in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[col] = 1.0
        out[:, col] = _apply_two_qubit(e, U4, p, q, n)
    return out


def _strip_global_phase(U: np.ndarray, V: np.ndarray) -> float:
    """Max deviation between U and V after aligning the global phase of V."""
    idx = np.unravel_index(np.argmax(np.abs(V)), V.shape)
    phase = U[idx] / V[idx] if abs(V[idx]) > 1e-12 else 1.0
    phase /= abs(phase) if abs(phase) > 0 else 1.0
    return float(np.max(np.abs(U - phase * V)))


def _even_encode(alpha: complex, beta: complex) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[0], v[3] = alpha, beta
    return v


def _odd_encode(alpha: complex, beta: complex) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[1], v[2] = alpha, beta
    return v


def _random_qubit(rng) -> np.ndarray:
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


def _identity_fswap_on_xx() -> float:
    fs23 = _embed_gate(f_swap().matrix, 2, 3, 3)
    x1x2 = _kron_chain([PAULI[1], PAULI[1], PAULI[0]])
    x1z2x3 = _kron_chain([PAULI[1], PAULI[3], PAULI[1]])
    return float(np.max(np.abs(fs23 @ x1x2 @ fs23 - x1z2x3)))


def _identity_cz_from_fswap() -> float:
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    cz = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    return float(np.max(np.abs(f_swap().matrix @ swap - cz)))


def _identity_logic_swap() -> float:
    rng = np.random.default_rng(0)
    # Order: fS12 after fS23.
    U = _embed_gate(f_swap().matrix, 1, 2, 3) @ _embed_gate(f_swap().matrix, 2, 3, 3)
    worst = 0.0
    for _ in range(20):
        ab = _random_qubit(rng)
        phi = _random_qubit(rng)
        before = np.kron(_even_encode(*ab), phi)
        after = np.kron(phi, _even_encode(*ab))
        worst = max(worst, float(np.max(np.abs(U @ before - after))))
    return worst


def _identity_zero_swap() -> float:
    rng = np.random.default_rng(1)
    fs = f_swap().matrix
    worst = 0.0
    zero = np.array([1.0, 0.0], dtype=complex)
    for _ in range(20):
        psi = _random_qubit(rng)
        before = np.kron(zero, psi)
        after = np.kron(psi, zero)
        worst = max(worst, float(np.max(np.abs(fs @ before - after))))
    return worst


# Switch sequence around a branching point: qubits 1-4 on the path, ancillas
# alpha = 5 and beta = 6 attached to qubit 1; gates applied right to left.
_SWITCH_SEQUENCE = [(2, 3), (3, 4), (1, 2), (6, 1), (1, 2), (5, 1), (6, 1),
                    (1, 2), (5, 1), (3, 4), (2, 3)]


def _identity_switch() -> float:
    n = 6
    fs = f_swap().matrix
    U = np.eye(2 ** n, dtype=complex)
    for p, q in reversed(_SWITCH_SEQUENCE):
        U = _embed_gate(fs, p, q, n) @ U
    rng = np.random.default_rng(2)
    zero = np.array([1.0, 0.0], dtype=complex)
    cz_l = np.diag([1.0, 1.0, 1.0, -1.0])
    worst = 0.0
    for _ in range(10):
        a = _random_qubit(rng)
        b = _random_qubit(rng)
        logical = np.kron(a, b)
        encoded = np.kron(np.kron(_even_encode(*a), _even_encode(*b)), np.kron(zero, zero))
        target_logical = cz_l @ logical
        target = np.zeros_like(encoded)
        for i in range(2):
            for j in range(2):
                amp = target_logical[2 * i + j]
                enc = np.kron(_even_encode(*(np.eye(2)[i])), _even_encode(*(np.eye(2)[j])))
                target += amp * np.kron(enc, np.kron(zero, zero))
        worst = max(worst, float(np.max(np.abs(U @ encoded - target))))
    return worst


def _identity_logic_swap_odd() -> float:
    rng = np.random.default_rng(3)
    is_m = i_swap().matrix
    U = _embed_gate(is_m, 1, 2, 3) @ _embed_gate(is_m, 2, 3, 3)
    worst = 0.0
    for _ in range(20):
        ab = _random_qubit(rng)
        phi = _random_qubit(rng)
        before = np.kron(_odd_encode(*ab), phi)
        after = 1j * np.kron(phi, _odd_encode(*ab))
        worst = max(worst, float(np.max(np.abs(U @ before - after))))
    return worst


def _identity_zero_iswap() -> float:
    rng = np.random.default_rng(4)
    is_m = i_swap().matrix
    P = np.diag([1.0, 1j])
    zero = np.array([1.0, 0.0], dtype=complex)
    worst = 0.0
    for _ in range(20):
        psi = _random_qubit(rng)
        before = np.kron(zero, psi)
        after = np.kron(P @ psi, zero)
        worst = max(worst, float(np.max(np.abs(is_m @ before - after))))
    return worst


def _xy_rotation(a: float) -> np.ndarray:
    """exp(i (a/2) (XX + YY)): logical X rotation on an odd-encoded pair."""
    return xx_yy_gate(a / 2.0, a / 2.0).matrix


def _identity_two_qubit_gate() -> float:
    n = 5
    is_m = i_swap().matrix
    is_d = is_m.conj().T
    rng = np.random.default_rng(5)
    zero = np.array([1.0, 0.0], dtype=complex)
    worst = 0.0
    for _ in range(20):
        a = float(rng.uniform(0, 2 * math.pi))
        seq = [
            _embed_gate(is_m, 2, 5, n),
            _embed_gate(is_m, 2, 3, n),
            _embed_gate(is_m, 3, 4, n),
            _embed_gate(is_d, 2, 5, n),
            _embed_gate(_xy_rotation(a), 1, 2, n),
            _embed_gate(is_m, 2, 5, n),
            _embed_gate(is_d, 3, 4, n),
            _embed_gate(is_d, 2, 3, n),
            _embed_gate(is_d, 2, 5, n),
        ]
        U = reduce(lambda x, y: x @ y, seq)
        # Logical target exp(i a X x Z) on the odd-encoded pairs.
        XZ = np.kron(PAULI[1], PAULI[3])
        target_logical = (math.cos(a) * np.eye(4) + 1j * math.sin(a) * XZ)
        q1 = _random_qubit(rng)
        q2 = _random_qubit(rng)
        logical = np.kron(q1, q2)
        encoded = np.kron(np.kron(_odd_encode(*q1), _odd_encode(*q2)), zero)
        tlog = target_logical @ logical
        target = np.zeros_like(encoded)
        for i in range(2):
            for j in range(2):
                enc = np.kron(_odd_encode(*(np.eye(2)[i])), _odd_encode(*(np.eye(2)[j])))
                target += tlog[2 * i + j] * np.kron(enc, zero)
        worst = max(worst, _strip_global_phase_vec(U @ encoded, target))
    return worst


def _strip_global_phase_vec(u: np.ndarray, v: np.ndarray) -> float:
    idx = int(np.argmax(np.abs(v)))
    if abs(v[idx]) < 1e-12:
        return float(np.max(np.abs(u - v)))
    phase = u[idx] / v[idx]
    if abs(phase) > 0:
        phase /= abs(phase)
    return float(np.max(np.abs(u - phase * v)))


_IDENTITIES = {
    "fswaponXX": _identity_fswap_on_xx,
    "CZL": _identity_cz_from_fswap,
    "logicswap": _identity_logic_swap,
    "0swap": _identity_zero_swap,
    "switch": _identity_switch,
    "logicswap2": _identity_logic_swap_odd,
    "0iswap": _identity_zero_iswap,
    "2qubitg": _identity_two_qubit_gate,
}


def verify_identity(name: str) -> float:
    """Max elementwise deviation of a named encoded-universality identity,
    evaluated with the dense oracle."""
    try:
        return _IDENTITIES[name]()
    except KeyError:
        raise InputError(f"unknown identity {name!r}; choose from {sorted(_IDENTITIES)}") from None


IDENTITY_NAMES = tuple(sorted(_IDENTITIES))


# ---------------------------------------------------------------------------
# JSON


def _matrix2_json(M: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in M]


def _matrix2_from_json(obj) -> np.ndarray:
    return np.array([[complex(v[0], v[1]) for v in row] for row in obj])


def circuit_to_json(circ: MatchgateCircuit) -> dict:
    topo = circ.topology if isinstance(circ.topology, str) \
        else {"edges": [list(e) for e in circ.topology]}
    return {
        "n": circ.n,
        "topology": topo,
        "gates": [{"A": _matrix2_json(g.A), "B": _matrix2_json(g.B), "qubits": list(pq)}
                  for g, pq in circ.gates],
    }


def circuit_from_json(obj: dict | str) -> MatchgateCircuit:
    if isinstance(obj, str):
        obj = json.loads(obj)
    topo = obj["topology"]
    if isinstance(topo, dict):
        topo = tuple(tuple(e) for e in topo["edges"])
    gates = tuple((TwoQubitGate(_matrix2_from_json(g["A"]), _matrix2_from_json(g["B"])),
                   tuple(g["qubits"])) for g in obj["gates"])
    return MatchgateCircuit(obj["n"], topo, gates)
