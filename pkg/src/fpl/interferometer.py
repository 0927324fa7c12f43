"""Optical-circuit representation of linear interferometers.

An Interferometer is an ordered list of two-mode elements (beam splitters and
phase shifters) on m modes; the first element acts first on the input state.
This module composes element lists into unitaries, decomposes unitaries into
triangular meshes (Gaussian-elimination style), generates the random-phases
ensemble of alternating 50:50 beam-splitter layers, and loads the published
fixture chips.

Conventions: a beam splitter on modes (i, j) with angle theta acts as
[[cos t, i sin t], [i sin t, cos t]]; its transmissivity is t = cos theta and
T = t^2. A phase shifter multiplies one mode by e^{i phi}. Internal phases are
stored in (-pi, pi]; the [0, pi] restriction applies only to ensemble
sampling, not representation.

JSON: {"m": int, "elements": [{"kind": "bs", "modes": [i, j], "theta": x} |
{"kind": "ps", "mode": i, "phi": x}, ...]} with 1-based mode indices.
Phase-table CSV: rows = modes, columns = layers, radians.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _fixtures
from .errors import DimensionError, InputError
from .numerics import RandomSource

FIXTURE_NAMES = tuple(_fixtures.FIXTURES)

# Fixture entries are printed rounded to 3-4 decimals; unitarity only holds
# to about this tolerance.
FIXTURE_UNITARITY_TOL = 5e-3


@dataclass(frozen=True)
class OpticalElement:
    """A beam splitter ('bs', mode pair, theta) or phase shifter ('ps', mode, phi)."""

    kind: str
    modes: tuple[int, ...]
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kind == "bs":
            if len(self.modes) != 2 or self.modes[0] == self.modes[1]:
                raise InputError(f"beam splitter needs two distinct modes, got {self.modes}")
            if not math.isfinite(self.theta):
                raise InputError("theta must be finite")
        elif self.kind == "ps":
            if len(self.modes) != 1:
                raise InputError(f"phase shifter needs one mode, got {self.modes}")
            if not math.isfinite(self.phi):
                raise InputError("phi must be finite")
        else:
            raise InputError(f"unknown element kind {self.kind!r}")


def beam_splitter(i: int, j: int, theta: float) -> OpticalElement:
    return OpticalElement("bs", (i, j), theta=float(theta))


def phase_shifter(i: int, phi: float) -> OpticalElement:
    return OpticalElement("ps", (i,), phi=float(phi))


@dataclass(frozen=True)
class Interferometer:
    """m modes plus an ordered element list; the first element acts first."""

    m: int
    elements: tuple[OpticalElement, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for e in self.elements:
            if any(not (1 <= i <= self.m) for i in e.modes):
                raise InputError(f"element modes {e.modes} out of range for m={self.m}")


def compose_unitary(chip: Interferometer) -> np.ndarray:
    """Product of the element unitaries; the left-most factor is the last element."""
    U = np.eye(chip.m, dtype=complex)
    for e in chip.elements:
        if e.kind == "bs":
            p, q = e.modes[0] - 1, e.modes[1] - 1
            c, s = math.cos(e.theta), math.sin(e.theta)
            rp = c * U[p] + 1j * s * U[q]
            rq = 1j * s * U[p] + c * U[q]
            U[p], U[q] = rp, rq
        else:
            U[e.modes[0] - 1] *= np.exp(1j * e.phi)
    return U


def _wrap_phase(x: float) -> float:
    """Map to (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    return math.pi if y <= -math.pi else y


def _split_relative_phase(delta: float) -> tuple[float, float]:
    """Split a relative phase across the two input arms with one arm at zero.

    Returns (alpha, beta) with beta - alpha = delta (mod 2 pi) and both values
    in [0, pi], matching the published single-nonzero-arm convention.
    """
    d = _wrap_phase(delta)
    return (0.0, d) if d >= 0 else (-d, 0.0)


def reck_decompose(U, tol: float = 1e-8) -> Interferometer:
    """Triangular-mesh decomposition into m(m-1)/2 beam splitters.

    Gaussian elimination: two-mode matrices acting on mode planes (j, r) null
    the off-diagonal entries row by row from the bottom, each realized as a
    beam splitter preceded by a phase shifter on each input arm (one arm per
    cell carries a zero phase). Residual diagonal phases are emitted as an
    explicit trailing phase-shifter layer, so composition reproduces U
    exactly, not merely up to external phases.
    """
    V = np.asarray(U, dtype=complex).copy()
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise DimensionError(f"square matrix required, got shape {V.shape}")
    m = V.shape[0]
    if np.max(np.abs(V.conj().T @ V - np.eye(m))) > tol:
        raise InputError("input is not unitary within tolerance")

    elements: list[OpticalElement] = []
    for r in range(m - 1, 0, -1):
        for j in range(r - 1, -1, -1):
            # Null V[r, j] against V[r, r] by mixing columns (j, r).
            a, b = V[r, j], V[r, r]
            if abs(a) <= 1e-15:
                theta, delta = 0.0, 0.0
            else:
                theta = math.atan2(abs(a), abs(b))
                delta = _wrap_phase(math.pi / 2 + np.angle(b) - np.angle(a))
            alpha, beta = _split_relative_phase(delta)
            c, s = math.cos(theta), math.sin(theta)
            ea, eb = np.exp(-1j * alpha), np.exp(-1j * beta)
            col_j = V[:, j] * (c * ea) + V[:, r] * (-1j * s * eb)
            col_r = V[:, j] * (-1j * s * ea) + V[:, r] * (c * eb)
            V[:, j], V[:, r] = col_j, col_r
            if alpha != 0.0:
                elements.append(phase_shifter(j + 1, alpha))
            if beta != 0.0:
                elements.append(phase_shifter(r + 1, beta))
            elements.append(beam_splitter(j + 1, r + 1, theta))
    for i in range(m):
        phi = _wrap_phase(float(np.angle(V[i, i])))
        if phi != 0.0:
            elements.append(phase_shifter(i + 1, phi))
    return Interferometer(m, tuple(elements))


def _layer_pairs(m: int, layer: int) -> list[tuple[int, int]]:
    """Beam-splitter pairings of one layer (1-based modes and layer index).

    Odd layers pair (1,2), (3,4), ...; even layers pair (2,3), (4,5), ...;
    one mode per layer stays idle when parity requires.
    """
    start = 1 if layer % 2 == 1 else 2
    return [(i, i + 1) for i in range(start, m, 2)]


def _bs_layer(m: int, layer: int) -> list[OpticalElement]:
    return [beam_splitter(i, j, math.pi / 4) for i, j in _layer_pairs(m, layer)]


def chip_from_phase_table(m: int, L: int, phases) -> Interferometer:
    """Fabricated-chip layout: L phase layers interspersed with L+1 layers of
    alternating 50:50 beam splitters.

    phases[layer][mode] (0-based) gives the phase shifter applied to every
    mode (including the layer's idle mode) between beam-splitter layers
    `layer` and `layer + 1`. The leading and trailing phase layers of the
    sampled ensemble are dropped here because they are pure input/output
    gauge, which is how the published chip tables are specified.
    """
    table = np.asarray(phases, dtype=float)
    if table.shape != (L, m):
        raise DimensionError(f"phase table shape {table.shape} != (L={L}, m={m})")
    elements: list[OpticalElement] = list(_bs_layer(m, 1))
    for layer in range(1, L + 1):
        for mode in range(1, m + 1):
            elements.append(phase_shifter(mode, float(table[layer - 1, mode - 1])))
        elements.extend(_bs_layer(m, layer + 1))
    return Interferometer(m, tuple(elements))


def random_phases_chip(m: int, L: int, rng: RandomSource) -> Interferometer:
    """Random ensemble chip: L layers of 50:50 beam splitters, each preceded by
    independent uniform-[0, pi] phase shifters on every mode."""
    if m < 2 or L < 1:
        raise InputError("m >= 2 and L >= 1 required")
    table = rng.uniform(0.0, math.pi, size=(L, m))
    elements: list[OpticalElement] = []
    for layer in range(1, L + 1):
        for mode in range(1, m + 1):
            elements.append(phase_shifter(mode, float(table[layer - 1, mode - 1])))
        elements.extend(_bs_layer(m, layer))
    return Interferometer(m, tuple(elements))


def load_fixture(name: str) -> np.ndarray:
    """Published reference unitary; entries rounded, unitary only to ~5e-3."""
    try:
        return _fixtures.FIXTURES[name].copy()
    except KeyError:
        raise InputError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}") from None


def fixture_phase_table(name: str) -> np.ndarray:
    """Published phase table (layers x modes) for the ensemble fixture chips."""
    if name == "Parameters7":
        return _fixtures.PHASES7.T.copy()
    if name == "Parameters9":
        return _fixtures.PHASES9.T.copy()
    raise InputError(f"unknown phase table {name!r}")


def interferometer_to_json(chip: Interferometer) -> dict:
    out = []
    for e in chip.elements:
        if e.kind == "bs":
            out.append({"kind": "bs", "modes": list(e.modes), "theta": e.theta})
        else:
            out.append({"kind": "ps", "mode": e.modes[0], "phi": e.phi})
    return {"m": chip.m, "elements": out}


def interferometer_from_json(obj: dict | str) -> Interferometer:
    if isinstance(obj, str):
        obj = json.loads(obj)
    elements = []
    for e in obj["elements"]:
        if e["kind"] == "bs":
            elements.append(beam_splitter(e["modes"][0], e["modes"][1], e["theta"]))
        elif e["kind"] == "ps":
            elements.append(phase_shifter(e["mode"], e["phi"]))
        else:
            raise InputError(f"unknown element kind {e['kind']!r}")
    return Interferometer(obj["m"], tuple(elements))
