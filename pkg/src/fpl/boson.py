"""Multi-photon interference engine for linear interferometers.

Fock-space enumeration, permanent-based transition probabilities for
indistinguishable (quantum), distinguishable (classical) and partially
distinguishable photons, exact inverse-CDF sampling, bunching laws and the
collision birthday formulas, ancilla post-selection, the depth-3 weak
simulator, and synthetic photon-counting datasets.

Amplitude convention: for input occupations T and output occupations S the
transition submatrix U_{S,T} takes t_i copies of column i and s_j copies of
row j; the quantum probability is |perm(U_{S,T})|^2 / (prod s_j! prod t_i!),
the classical one perm(|U_{S,T}|^2) / prod s_j!.

Distribution CSV: columns `occupations` (e.g. "1|0|2|0|0") and `probability`;
sample lists are one occupation string per row.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DimensionError, InputError, UndefinedVisibilityError
from .numerics import RandomSource, permanent

ENUMERATION_CAP = 10**8

# Floating-point cancellation floor: probabilities in [-CLAMP, 0) are treated
# as exact zeros; anything more negative is a genuine error.
PROB_CLAMP = 1e-12


@dataclass(frozen=True)
class FockState:
    """Occupation numbers of m optical modes."""

    occupations: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(x) for x in self.occupations)
        if any(x < 0 for x in occ):
            raise InputError(f"negative occupation in {occ}")
        object.__setattr__(self, "occupations", occ)

    @property
    def m(self) -> int:
        return len(self.occupations)

    @property
    def n(self) -> int:
        return sum(self.occupations)

    @property
    def no_collision(self) -> bool:
        return all(x <= 1 for x in self.occupations)

    def to_string(self) -> str:
        return "|".join(str(x) for x in self.occupations)

    @classmethod
    def from_string(cls, s: str) -> "FockState":
        try:
            return cls(tuple(int(x) for x in s.split("|")))
        except ValueError as exc:
            raise InputError(f"bad occupation string {s!r}") from exc


@dataclass(frozen=True)
class DistinguishabilityModel:
    """Partial-distinguishability model: mixture weight r on the fully
    indistinguishable branch, remainder on mutually distinguishable photon
    groups. r = p^2 for pairwise indistinguishability p."""

    groups: tuple[tuple[int, ...], ...]
    r: float = 0.0

    def __post_init__(self):
        groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        labels = sorted(i for g in groups for i in g)
        if labels != list(range(1, len(labels) + 1)):
            raise InputError(f"groups must partition 1..n, got {groups}")
        if not 0.0 <= self.r <= 1.0:
            raise InputError(f"mixture weight r={self.r} outside [0, 1]")

    @property
    def p(self) -> float:
        return math.sqrt(self.r)


@dataclass(frozen=True)
class OutputDistribution:
    """Probabilities over an ordered list of Fock states."""

    space: tuple[FockState, ...]
    probs: np.ndarray
    regime: str

    def __post_init__(self):
        object.__setattr__(self, "space", tuple(self.space))
        object.__setattr__(self, "probs", np.asarray(self.probs, dtype=float))
        if len(self.space) != len(self.probs):
            raise DimensionError("space/probs length mismatch")


def _clamped(probs: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    if np.min(probs, initial=0.0) < -PROB_CLAMP:
        raise InputError(f"probability below clamp floor: {np.min(probs)}")
    probs = np.where(probs < 0.0, 0.0, probs)
    total = probs.sum()
    if not 1 - 1e-9 <= total <= 1 + 1e-9:
        raise InputError(f"distribution sums to {total}")
    return probs / total


def space_size(m: int, n: int, no_collision: bool = False) -> int:
    """Number of outcomes without enumeration: C(m, n) or C(m+n-1, n)."""
    if m < 1 or n < 0:
        raise InputError("m >= 1 and n >= 0 required")
    return math.comb(m, n) if no_collision else math.comb(m + n - 1, n)


def enumerate_space(m: int, n: int, no_collision: bool = False) -> list[FockState]:
    """All occupation tuples with n photons in m modes, lexicographically
    descending; optionally restricted to 0/1 occupations."""
    count = space_size(m, n, no_collision)
    if count > ENUMERATION_CAP:
        raise CapacityError(f"{count} outcomes exceed the {ENUMERATION_CAP} guard")
    cap = 1 if no_collision else n
    out: list[FockState] = []

    def build(prefix: list[int], remaining: int, modes_left: int):
        if modes_left == 1:
            if remaining <= cap:
                out.append(FockState(tuple(prefix + [remaining])))
            return
        for k in range(min(remaining, cap), -1, -1):
            build(prefix + [k], remaining - k, modes_left - 1)

    build([], n, m)
    return out


def transition_submatrix(U, S: FockState, T: FockState) -> np.ndarray:
    """U_{S,T}: t_i copies of column i, s_j copies of row j."""
    U = np.asarray(U, dtype=complex)
    if S.m != U.shape[0] or T.m != U.shape[1]:
        raise DimensionError("state length does not match matrix dimension")
    if S.n != T.n:
        raise InputError(f"photon-number mismatch: {S.n} out vs {T.n} in")
    cols = [i for i, t in enumerate(T.occupations) for _ in range(t)]
    rows = [j for j, s in enumerate(S.occupations) for _ in range(s)]
    return U[np.ix_(rows, cols)]


def _multiplicity(state: FockState) -> float:
    out = 1.0
    for x in state.occupations:
        out *= math.factorial(x)
    return out


def quantum_prob(U, T: FockState, S: FockState) -> float:
    """Indistinguishable-photon transition probability
    |perm(U_{S,T})|^2 / (prod s_j! prod t_i!)."""
    A = transition_submatrix(U, S, T)
    return abs(permanent(A)) ** 2 / (_multiplicity(S) * _multiplicity(T))


def classical_prob(U, T: FockState, S: FockState) -> float:
    """Distinguishable-photon transition probability
    perm(|U_{S,T}|^2) / prod s_j!."""
    A = transition_submatrix(U, S, T)
    return permanent(np.abs(A) ** 2).real / _multiplicity(S)


def _expand_photon_modes(T: FockState) -> list[int]:
    """Photon labels 1..n assigned to input modes in mode order."""
    return [i + 1 for i, t in enumerate(T.occupations) for _ in range(t)]


def _grouped_probs(U, T: FockState, groups, space) -> np.ndarray:
    """Distribution for mutually distinguishable photon groups: the
    convolution over output splittings of the per-group quantum
    distributions."""
    m = T.m
    modes = _expand_photon_modes(T)
    acc: dict[tuple[int, ...], float] = {(0,) * m: 1.0}
    for g in groups:
        occ = [0] * m
        for label in g:
            if label > len(modes):
                raise InputError("group labels exceed photon number")
            occ[modes[label - 1] - 1] += 1
        Tg = FockState(tuple(occ))
        dist_g = [(S.occupations, quantum_prob(U, Tg, S))
                  for S in enumerate_space(m, Tg.n)]
        nxt: dict[tuple[int, ...], float] = {}
        for prev, p0 in acc.items():
            for occ_g, pg in dist_g:
                if pg == 0.0:
                    continue
                key = tuple(a + b for a, b in zip(prev, occ_g))
                nxt[key] = nxt.get(key, 0.0) + p0 * pg
        acc = nxt
    return np.array([acc.get(S.occupations, 0.0) for S in space])


def output_distribution(U, T: FockState, regime: str,
                        model: DistinguishabilityModel | None = None) -> OutputDistribution:
    """Full output distribution of input T through U in the given regime
    ('quantum', 'classical', or 'mixed' with a distinguishability model)."""
    U = np.asarray(U, dtype=complex)
    m = T.m
    if U.shape != (m, m):
        raise DimensionError("matrix dimension does not match input state")
    space = enumerate_space(m, T.n)
    if regime == "quantum":
        probs = np.array([quantum_prob(U, T, S) for S in space])
    elif regime == "classical":
        probs = np.array([classical_prob(U, T, S) for S in space])
    elif regime == "mixed":
        if model is None:
            raise InputError("mixed regime requires a distinguishability model")
        quantum = np.array([quantum_prob(U, T, S) for S in space])
        grouped = _grouped_probs(U, T, model.groups, space)
        probs = model.r * quantum + (1.0 - model.r) * grouped
    else:
        raise InputError(f"unknown regime {regime!r}")
    return OutputDistribution(tuple(space), _clamped(probs), regime)


def sample(dist: OutputDistribution, rng: RandomSource, N: int) -> list[FockState]:
    """N i.i.d. draws by inverse-CDF lookup."""
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(N), side="right")
    return [dist.space[i] for i in idx]


def bunching_fraction(dist: OutputDistribution) -> float:
    """Probability that at least one output mode holds two or more photons."""
    mass = sum(p for S, p in zip(dist.space, dist.probs) if S.no_collision)
    return float(1.0 - mass)


def classical_collision_prob(n: int, m: int) -> float:
    """Birthday-paradox collision probability for distinguishable photons:
    1 - prod_{k=1}^{n-1} (1 - k/m)."""
    if n < 1 or m < 1:
        raise InputError("n >= 1 and m >= 1 required")
    if n > m:
        return 1.0
    out = 1.0
    for k in range(1, n):
        out *= 1.0 - k / m
    return 1.0 - out


def quantum_collision_prob(n: int, m: int) -> float:
    """Collision probability for indistinguishable photons in a
    Haar-averaged (maximally mixed) output:
    1 - prod_{k=1}^{n-1} (1 - k/m) / (1 + k/m)."""
    if not 1 <= n <= m:
        raise InputError("1 <= n <= m required")
    out = 1.0
    for k in range(1, n):
        out *= (1.0 - k / m) / (1.0 + k / m)
    return 1.0 - out


def full_bunching_ratio(T: FockState) -> float:
    """Quantum/classical enhancement of all n photons leaving one mode:
    n! / prod t_k!."""
    if T.n < 1:
        raise InputError("at least one photon required")
    return math.factorial(T.n) / _multiplicity(T)


def visibility(U, inputs: tuple[int, int], outputs: tuple[int, int]) -> float:
    """Two-photon visibility (P2c - P2q) / P2c for single photons in the two
    input modes and a coincidence at the two output modes (1-based)."""
    i, j = inputs
    L, M = outputs
    if i == j or L == M:
        raise InputError("input and output mode pairs must be distinct")
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    occ_in = [0] * m
    occ_in[i - 1] = occ_in[j - 1] = 1
    occ_out = [0] * m
    occ_out[L - 1] = occ_out[M - 1] = 1
    T, S = FockState(tuple(occ_in)), FockState(tuple(occ_out))
    p2c = classical_prob(U, T, S)
    if p2c < 1e-14:
        raise UndefinedVisibilityError(f"classical coincidence {p2c} too small")
    return (p2c - quantum_prob(U, T, S)) / p2c


def postselected_map(U, input_state: FockState, ancilla_modes: tuple[int, ...],
                     ancilla_outcome: tuple[int, ...]):
    """Heralded map: success probability of the ancilla pattern and the
    renormalized conditional distribution over the remaining modes.

    Returns (success_prob, OutputDistribution | None); a zero-probability
    herald yields (0.0, None) without dividing.
    """
    U = np.asarray(U, dtype=complex)
    m = input_state.m
    anc = tuple(ancilla_modes)
    if len(anc) != len(set(anc)) or any(not 1 <= a <= m for a in anc):
        raise InputError(f"bad ancilla modes {anc}")
    if len(ancilla_outcome) != len(anc):
        raise InputError("ancilla outcome length mismatch")
    want = {a: int(x) for a, x in zip(anc, ancilla_outcome)}
    rest = [k for k in range(1, m + 1) if k not in want]
    cond: dict[tuple[int, ...], float] = {}
    success = 0.0
    for S in enumerate_space(m, input_state.n):
        if any(S.occupations[a - 1] != want[a] for a in anc):
            continue
        p = quantum_prob(U, input_state, S)
        success += p
        key = tuple(S.occupations[k - 1] for k in rest)
        cond[key] = cond.get(key, 0.0) + p
    if success <= 0.0:
        return 0.0, None
    space = tuple(FockState(k) for k in cond)
    probs = np.array([cond[s.occupations] for s in space]) / success
    return float(success), OutputDistribution(space, probs, "quantum")


# ---------------------------------------------------------------------------
# Depth-3 weak simulation


def _two_mode_amplitude(V: np.ndarray, a: int, b: int, c: int, d: int) -> complex:
    """<c, d| V |a, b> for a 2x2 mode unitary V on Fock occupations."""
    if a + b != c + d:
        return 0.0
    A = transition_submatrix(V, FockState((c, d)), FockState((a, b)))
    norm = math.sqrt(math.factorial(a) * math.factorial(b)
                     * math.factorial(c) * math.factorial(d))
    return permanent(A) / norm


@dataclass
class _Cluster:
    """Pure state on a small set of modes: occupation tuple -> amplitude."""

    modes: tuple[int, ...]
    amps: dict[tuple[int, ...], complex]


@dataclass
class _Node:
    clusters: list[_Cluster]
    gate_idx: int
    outcomes: dict[int, int] = field(default_factory=dict)
    choices: list | None = None
    probs: np.ndarray | None = None
    children: list | None = None


def _check_layer(layer, m: int):
    seen: set[int] = set()
    gates = []
    for pair, V in layer:
        p, q = pair
        if p == q or not (1 <= p <= m and 1 <= q <= m):
            raise InputError(f"bad gate modes {pair}")
        if p in seen or q in seen:
            raise InputError(f"overlapping gates at modes {pair}")
        seen.update((p, q))
        V = np.asarray(V, dtype=complex)
        if V.shape != (2, 2):
            raise DimensionError("two-mode gates must be 2x2")
        gates.append(((p, q), V))
    return gates


def _apply_gate(cluster: _Cluster, p: int, q: int, V: np.ndarray) -> _Cluster:
    ip, iq = cluster.modes.index(p), cluster.modes.index(q)
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in cluster.amps.items():
        a, b = occ[ip], occ[iq]
        for c in range(a + b + 1):
            d = a + b - c
            g = _two_mode_amplitude(V, a, b, c, d)
            if g == 0.0:
                continue
            new = list(occ)
            new[ip], new[iq] = c, d
            key = tuple(new)
            out[key] = out.get(key, 0.0) + amp * g
    return _Cluster(cluster.modes, out)


def _measure(cluster: _Cluster, measured: tuple[int, ...]):
    """Outcome distribution on `measured` modes and the collapsed remainder
    cluster (amplitudes renormalized) per outcome."""
    idx = [cluster.modes.index(p) for p in measured]
    rest = [k for k in range(len(cluster.modes)) if k not in idx]
    branches: dict[tuple[int, ...], dict[tuple[int, ...], complex]] = {}
    for occ, amp in cluster.amps.items():
        key = tuple(occ[i] for i in idx)
        sub = tuple(occ[k] for k in rest)
        branches.setdefault(key, {})[sub] = branches.get(key, {}).get(sub, 0.0) + amp
    choices, probs, collapsed = [], [], []
    rest_modes = tuple(cluster.modes[k] for k in rest)
    for key, sub in branches.items():
        p = sum(abs(a) ** 2 for a in sub.values())
        if p <= 1e-14:
            continue
        root = math.sqrt(p)
        choices.append(key)
        probs.append(p)
        collapsed.append(_Cluster(rest_modes, {k: a / root for k, a in sub.items()})
                         if rest_modes else None)
    return choices, np.array(probs), collapsed


def _expand(node: _Node, gates2) -> None:
    """Compute the next measurement's outcome distribution and child nodes."""
    if node.gate_idx < len(gates2):
        (p, q), V = gates2[node.gate_idx]
        joined = [c for c in node.clusters if p in c.modes or q in c.modes]
        others = [c for c in node.clusters if c not in joined]
        if len(joined) == 2:
            a, b = joined
            merged = _Cluster(a.modes + b.modes,
                              {ka + kb: va * vb
                               for ka, va in a.amps.items()
                               for kb, vb in b.amps.items()})
        else:
            merged = joined[0]
        merged = _apply_gate(merged, p, q, V)
        choices, probs, collapsed = _measure(merged, (p, q))
        node.choices, node.probs = choices, probs / probs.sum()
        node.children = []
        for (cp, cq), rest in zip(choices, collapsed):
            outcomes = dict(node.outcomes)
            outcomes[p], outcomes[q] = cp, cq
            clusters = others + ([rest] if rest is not None else [])
            node.children.append(_Node(clusters, node.gate_idx + 1, outcomes))
    else:
        # No gates left: measure the first remaining cluster outright.
        cluster = node.clusters[0]
        choices, probs, _ = _measure(cluster, cluster.modes)
        node.choices, node.probs = choices, probs / probs.sum()
        node.children = []
        for key in choices:
            outcomes = dict(node.outcomes)
            outcomes.update(zip(cluster.modes, key))
            node.children.append(_Node(node.clusters[1:], node.gate_idx, outcomes))


def depth3_weak_simulate(layer1, layer2, input_state: FockState,
                         rng: RandomSource, N: int) -> list[FockState]:
    """Weak simulation of a depth-3 circuit (two layers of disjoint two-mode
    gates, then photon counting) on a 0/1-occupation input.

    Each draw samples the two modes of every second-layer gate from their
    conditional distribution — which involves at most the four input modes
    feeding the gate — then collapses the partner modes, so per-sample cost is
    polynomial in m. Conditional nodes are cached across draws keyed by the
    outcome history.
    """
    m = input_state.m
    if not input_state.no_collision:
        raise InputError("input occupations must be 0 or 1")
    gates1 = _check_layer(layer1, m)
    gates2 = _check_layer(layer2, m)

    clusters: list[_Cluster] = []
    touched: set[int] = set()
    for (p, q), V in gates1:
        a, b = input_state.occupations[p - 1], input_state.occupations[q - 1]
        amps = {(c, a + b - c): g for c in range(a + b + 1)
                if (g := _two_mode_amplitude(V, a, b, c, a + b - c)) != 0.0}
        clusters.append(_Cluster((p, q), amps))
        touched.update((p, q))
    for k in range(1, m + 1):
        if k not in touched:
            clusters.append(_Cluster((k,), {(input_state.occupations[k - 1],): 1.0}))

    root = _Node(clusters, 0)
    out: list[FockState] = []
    for _ in range(N):
        node = root
        while node.clusters:
            if node.children is None:
                _expand(node, gates2)
            i = int(np.searchsorted(np.cumsum(node.probs), rng.random(), side="right"))
            i = min(i, len(node.children) - 1)
            node = node.children[i]
        occ = tuple(node.outcomes[k] for k in range(1, m + 1))
        out.append(FockState(occ))
    return out


# ---------------------------------------------------------------------------
# Synthetic photon-counting datasets


def theoretical_tensors(U):
    """Exact single-photon probabilities R[J, k] = |U[J, k]|^2 and two-photon
    visibility tensor V[k, h, J, G] (zero on the k=h and J=G diagonals)."""
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    R = np.abs(U) ** 2
    # P[k, h, J, G] = U[J, k] U[G, h]; its (k, h) transpose is U[J, h] U[G, k].
    Ut = U.T
    P = Ut[:, None, :, None] * Ut[None, :, None, :]
    Pt = P.transpose(1, 0, 2, 3)
    q = np.abs(P + Pt) ** 2
    cl = np.abs(P) ** 2 + np.abs(Pt) ** 2
    V = 1.0 - q / (cl + 1e-20)
    off = ~np.eye(m, dtype=bool)
    V *= off[:, :, None, None] & off[None, None, :, :]
    # Mirror the canonical k < h, J < G block so the symmetries hold exactly.
    i = np.arange(m)
    lo, hi = np.minimum.outer(i, i), np.maximum.outer(i, i)
    V = V[lo[:, :, None, None], hi[:, :, None, None],
          lo[None, None, :, :], hi[None, None, :, :]]
    return R, V


def simulate_experiment(U, counts_per_config: int | None, rng: RandomSource,
                        relative_noise: float | None = None):
    """Synthetic ExperimentalDataset for unitary reconstruction.

    counts_per_config = None gives the infinite-count limit (exact tensors,
    zero error bars). Finite counts draw multinomial/binomial photon counts
    with the matching standard errors. relative_noise applies multiplicative
    Gaussian noise of that fractional size instead of counting noise.
    """
    from .tomography import ExperimentalDataset

    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    R, V = theoretical_tensors(U)
    if counts_per_config is None and relative_noise is None:
        return ExperimentalDataset(m, R, np.zeros((m, m)), V, np.zeros((m, m, m, m)))
    if relative_noise is not None:
        # Multiplicative noise on every raw rate: the singles table, and per
        # input pair a fresh noisy singles measurement normalizing the noisy
        # coincidence rates, from which the visibilities are recomputed.
        f = float(relative_noise)
        sigmaR = f * R
        Rn = np.clip(R * (1.0 + f * rng.standard_normal((m, m))), 1e-9, None)
        Rn /= Rn.sum(axis=0, keepdims=True)
        Vn = np.zeros_like(V)
        sigmaV = np.zeros_like(V)
        for k in range(m):
            for h in range(k + 1, m):
                Rc = np.clip(R * (1.0 + f * rng.standard_normal((m, m))), 1e-9, None)
                for J in range(m):
                    for G in range(J + 1, m):
                        q = abs(U[J, k] * U[G, h] + U[J, h] * U[G, k]) ** 2
                        qn = max(q * (1.0 + f * rng.standard_normal()), 0.0)
                        cl = Rc[J, k] * Rc[G, h] + Rc[J, h] * Rc[G, k]
                        vn = 1.0 - qn / (cl + 1e-20)
                        sv = f * max(abs(vn), 0.1)
                        for a, b in ((k, h), (h, k)):
                            for c, d in ((J, G), (G, J)):
                                Vn[a, b, c, d] = vn
                                sigmaV[a, b, c, d] = sv
        return ExperimentalDataset(m, Rn, sigmaR, np.clip(Vn, -1.99, 1.99), sigmaV)
    C = int(counts_per_config)
    if C <= 0:
        raise InputError("counts_per_config must be positive")
    Rn = np.empty((m, m))
    for k in range(m):
        Rn[:, k] = rng.multinomial(C, R[:, k]) / C
    p = np.clip(Rn, 1.0 / C, 1.0 - 1.0 / C)
    sigmaR = np.sqrt(p * (1.0 - p) / C)
    Vn = np.zeros_like(V)
    sigmaV = np.zeros_like(V)
    for k in range(m):
        for h in range(k + 1, m):
            for J in range(m):
                for G in range(J + 1, m):
                    q = abs(U[J, k] * U[G, h] + U[J, h] * U[G, k]) ** 2
                    cl = abs(U[J, k] * U[G, h]) ** 2 + abs(U[J, h] * U[G, k]) ** 2
                    qn = rng.binomial(C, min(q, 1.0)) / C
                    vn = 1.0 - qn / (cl + 1e-20)
                    sv = math.sqrt(max(q, 1.0 / C) * (1.0 - min(q, 1.0 - 1.0 / C)) / C) / (cl + 1e-20)
                    for a, b in ((k, h), (h, k)):
                        for c, d in ((J, G), (G, J)):
                            Vn[a, b, c, d] = vn
                            sigmaV[a, b, c, d] = sv
    return ExperimentalDataset(m, Rn, sigmaR, Vn, sigmaV)


# ---------------------------------------------------------------------------
# CSV interfaces


def distribution_to_csv(dist: OutputDistribution, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["occupations", "probability"])
        for S, p in zip(dist.space, dist.probs):
            w.writerow([S.to_string(), repr(float(p))])


def distribution_from_csv(path, regime: str = "quantum") -> OutputDistribution:
    space: list[FockState] = []
    probs: list[float] = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            space.append(FockState.from_string(row["occupations"]))
            probs.append(float(row["probability"]))
    return OutputDistribution(tuple(space), np.asarray(probs), regime)


def samples_to_csv(states: list[FockState], path) -> None:
    with open(path, "w", newline="") as fh:
        for S in states:
            fh.write(S.to_string() + "\n")
