"""Command-line front end: deterministic, seed-echoing pipelines emitting
CSV or JSON suitable for plotting.

Subcommands: haar, reck, chip, dist, sample, bunching, depth3, tomo,
validate, fixtures, ensemble-sim. Exit codes: 0 success, 2 input error,
3 capacity error. Occupation strings are `|`-separated integers; plain digit
strings (e.g. 10101) are accepted for single-digit occupations. The
FPL_THREADS environment variable caps worker parallelism (all pipelines are
currently single-threaded, so any value >= 1 is accepted).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from . import interferometer as itf
from . import numerics, tomography, validation
from .boson import (DistinguishabilityModel, FockState, bunching_fraction,
                    classical_collision_prob, depth3_weak_simulate,
                    full_bunching_ratio, output_distribution,
                    quantum_collision_prob, quantum_prob, sample)
from .errors import CapacityError, InputError


def _thread_cap() -> int:
    raw = os.environ.get("FPL_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"FPL_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InputError("FPL_THREADS must be >= 1")
    return cap


def _fmt(x: float, digits: int) -> str:
    return format(float(x), f".{digits}g")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _emit_json(obj: dict, out: str | None) -> None:
    _emit(json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1)
          + "\n", out)


def _parse_state(s: str) -> FockState:
    if "|" in s:
        return FockState.from_string(s)
    if not s.isdigit():
        raise InputError(f"bad occupation string {s!r}")
    return FockState(tuple(int(c) for c in s))


def _load_unitary(args, project: bool = False) -> np.ndarray:
    # Published fixtures are rounded and unitary only to ~5e-3; pipelines
    # needing an exact unitary get the polar projection.
    if getattr(args, "fixture", None):
        U = itf.load_fixture(args.fixture)
        return numerics.polar_unitary(U) if project else U
    if getattr(args, "infile", None):
        with open(args.infile) as fh:
            obj = json.load(fh)
        return numerics.matrix_from_json(obj.get("unitary", obj))
    raise InputError("provide --fixture or --in for the unitary")


def _matrix_obj(U: np.ndarray, digits: int) -> dict:
    return numerics.matrix_to_json(U, digits)


def _rows_to_csv(header: list[str], rows: list[list], digits: int) -> str:
    buf = []
    w = csv.writer(_ListWriter(buf))
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x, digits) if isinstance(x, float) else x for x in row])
    return "".join(buf)


class _ListWriter:
    def __init__(self, buf: list[str]):
        self.buf = buf

    def write(self, s: str) -> None:
        self.buf.append(s)


def _maybe_plot(args, draw) -> None:
    path = getattr(args, "plot", None)
    if not path:
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(7, 4))
    draw(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# Subcommand implementations


def _cmd_haar(args) -> int:
    U = numerics.haar_unitary(args.modes, numerics.random_source(args.seed))
    _emit_json({"seed": args.seed, "modes": args.modes,
                "unitary": _matrix_obj(U, args.digits)}, args.out)
    return 0


def _cmd_reck(args) -> int:
    U = _load_unitary(args)
    chip = itf.reck_decompose(U, tol=itf.FIXTURE_UNITARITY_TOL
                              if args.fixture else 1e-8)
    _emit_json({"interferometer": itf.interferometer_to_json(chip)}, args.out)
    return 0


def _cmd_chip(args) -> int:
    if args.phase_table:
        table = itf.fixture_phase_table(args.phase_table)
        chip = itf.chip_from_phase_table(table.shape[1], table.shape[0], table)
        obj = {"phase_table": args.phase_table}
    else:
        if args.modes is None or args.layers is None:
            raise InputError("chip needs --phase-table or --modes/--layers")
        chip = itf.random_phases_chip(args.modes, args.layers,
                                      numerics.random_source(args.seed))
        obj = {"seed": args.seed, "modes": args.modes, "layers": args.layers}
    obj["unitary"] = _matrix_obj(itf.compose_unitary(chip), args.digits)
    obj["interferometer"] = itf.interferometer_to_json(chip)
    _emit_json(obj, args.out)
    return 0


def _distinguishability_model(args) -> DistinguishabilityModel | None:
    if args.groups is None and args.r is None:
        return None
    if args.groups is None:
        raise InputError("--r requires --groups")
    groups = tuple(tuple(int(x) for x in g.split(",")) for g in
                   args.groups.split("/"))
    return DistinguishabilityModel(groups, args.r if args.r is not None else 0.0)


def _cmd_dist(args) -> int:
    U = _load_unitary(args, project=True)
    T = _parse_state(args.input)
    dist = output_distribution(U, T, args.regime, _distinguishability_model(args))
    rows = [[S.to_string(), float(p)] for S, p in zip(dist.space, dist.probs)]
    _emit(_rows_to_csv(["occupations", "probability"], rows, args.digits), args.out)
    _maybe_plot(args, lambda ax: (
        ax.bar(range(len(dist.probs)), dist.probs),
        ax.set_xlabel("output index"), ax.set_ylabel("probability"),
        ax.set_title(f"{args.regime} output distribution, input {T.to_string()}")))
    return 0


def _cmd_sample(args) -> int:
    U = _load_unitary(args, project=True)
    T = _parse_state(args.input)
    dist = output_distribution(U, T, args.regime, _distinguishability_model(args))
    states = sample(dist, numerics.random_source(args.seed), args.N)
    lines = [f"# seed={args.seed}"] + [S.to_string() for S in states]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_bunching(args) -> int:
    rng = numerics.random_source(args.seed)
    U = _load_unitary(args, project=True) if (args.fixture or args.infile) else \
        numerics.haar_unitary(args.modes, rng)
    m = U.shape[0]
    T = _parse_state(args.input) if args.input else \
        FockState(tuple(1 if i < args.photons else 0 for i in range(m)))
    n = T.n
    dq = output_distribution(U, T, "quantum")
    dc = output_distribution(U, T, "classical")
    birthday = [{"n": k, "classical": classical_collision_prob(k, m),
                 "quantum": quantum_collision_prob(k, m)}
                for k in range(2, n + 1)]
    _emit_json({"seed": args.seed, "modes": m, "input": T.to_string(),
                "bunching_fraction_quantum": bunching_fraction(dq),
                "bunching_fraction_classical": bunching_fraction(dc),
                "full_bunching_ratio": full_bunching_ratio(T),
                "birthday": birthday}, args.out)
    return 0


def _cmd_depth3(args) -> int:
    m, n = args.modes, args.photons
    rng = numerics.random_source(args.seed)
    layer1 = [((i, i + 1), numerics.haar_unitary(2, rng))
              for i in range(1, m, 2)]
    layer2 = [((i, i + 1), numerics.haar_unitary(2, rng))
              for i in range(2, m, 2)]
    T = FockState(tuple(1 if i < n else 0 for i in range(m)))
    states = depth3_weak_simulate(layer1, layer2, T, rng, args.N)
    lines = [f"# seed={args.seed}"] + [S.to_string() for S in states]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_tomo(args) -> int:
    data = tomography.dataset_from_files(args.data)
    target = itf.load_fixture(args.target) if args.target else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = tomography.permutation_sweep(data, target=target)
        if not results:
            raise InputError("no reference choice yields a reconstruction")
        best = results[0]
        if args.refine:
            best = tomography.stochastic_refine(
                data, best.U, args.refine, numerics.random_source(args.seed),
                step=args.step, target=target)
    obj = {"seed": args.seed, "result": tomography.result_to_json(best)}
    _emit_json(obj, args.out)
    return 0


def _aa_rows(U, T, set_sizes, trials, rng):
    rows = []
    for source in ("quantum", "uniform"):
        for r in validation.success_rate_curve(U, T, source, set_sizes,
                                               trials, rng):
            rows.append([source, r["N_set"], float(r["success_rate"]),
                         r["trials"]])
    return rows


def _likelihood_rows(m, n, set_sizes, trials, rng):
    T = FockState(tuple(1 if i < n else 0 for i in range(m)))
    rows = []
    for n_set in set_sizes:
        hits = {"Indistinguishable": 0, "Distinguishable": 0}
        for _ in range(trials):
            U = numerics.haar_unitary(m, rng)
            p = output_distribution(U, T, "quantum")
            q = output_distribution(U, T, "classical")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                for dist, verdict in ((p, "Indistinguishable"),
                                      (q, "Distinguishable")):
                    trace = validation.likelihood_discriminator(
                        sample(dist, rng, n_set), p, q)
                    hits[verdict] += trace.verdict == verdict
        rows.append(["indistinguishable", n_set,
                     hits["Indistinguishable"] / trials, trials])
        rows.append(["distinguishable", n_set,
                     hits["Distinguishable"] / trials, trials])
    return rows


def _cmd_validate(args) -> int:
    m, n = args.modes, args.photons
    set_sizes = [int(x) for x in args.nset.split(",")]
    rng = numerics.random_source(args.seed)
    if args.test == "aa":
        U = numerics.haar_unitary(m, rng)
        T = FockState(tuple(1 if i < n else 0 for i in range(m)))
        rows = _aa_rows(U, T, set_sizes, args.trials, rng)
    else:
        rows = _likelihood_rows(m, n, set_sizes, args.trials, rng)
    header = ["source", "N_set", "success_rate", "trials"]
    text = f"# seed={args.seed}\n" + _rows_to_csv(header, rows, args.digits)
    _emit(text, args.out)

    def draw(ax):
        for source in sorted({r[0] for r in rows}):
            pts = [(r[1], r[2]) for r in rows if r[0] == source]
            ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", label=source)
        ax.set_xlabel("sample-set size")
        ax.set_ylabel("correct-verdict rate")
        ax.legend()
    _maybe_plot(args, draw)
    return 0


def _cmd_fixtures(args) -> int:
    names = [args.name] if args.name else list(itf.FIXTURE_NAMES)
    obj = {name: _matrix_obj(itf.load_fixture(name), args.digits)
           for name in names}
    _emit_json(obj, args.out)
    return 0


def _cmd_ensemble_sim(args) -> int:
    m, L, n = args.modes, args.layers, args.photons
    rng = numerics.random_source(args.seed)
    c = m // 2
    T = FockState(tuple(1 if i < n else 0 for i in range(m)))
    S = FockState(tuple(1 if c - n // 2 <= i < c - n // 2 + n else 0
                        for i in range(m)))
    rows = []
    for _ in range(args.N):
        for ensemble in ("random-phases", "haar"):
            if ensemble == "haar":
                U = numerics.haar_unitary(m, rng)
            else:
                U = itf.compose_unitary(itf.random_phases_chip(m, L, rng))
            rows.append([ensemble, float(abs(U[c, c])),
                         float(quantum_prob(U, T, S))])
    text = f"# seed={args.seed}\n" + _rows_to_csv(
        ["ensemble", "central_element_abs", "central_output_prob"],
        rows, args.digits)
    _emit(text, args.out)

    def draw(ax):
        for ensemble in ("random-phases", "haar"):
            vals = [r[1] for r in rows if r[0] == ensemble]
            ax.hist(vals, bins=50, histtype="step", label=ensemble, density=True)
        ax.set_xlabel("|central matrix element|")
        ax.legend()
    _maybe_plot(args, draw)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpl", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, plot=False):
        sp.add_argument("--digits", type=int, default=12,
                        help="significant digits in numeric output")
        sp.add_argument("--out", help="output path (default stdout)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if plot:
            sp.add_argument("--plot", help="also render a figure to this path")

    def unitary_source(sp):
        sp.add_argument("--fixture", choices=itf.FIXTURE_NAMES)
        sp.add_argument("--in", dest="infile", help="unitary JSON file")

    sp = sub.add_parser("haar", help="sample a Haar-random unitary")
    sp.add_argument("--modes", type=int, required=True)
    common(sp)
    sp.set_defaults(func=_cmd_haar)

    sp = sub.add_parser("reck", help="triangular mesh decomposition")
    unitary_source(sp)
    common(sp, seed=False)
    sp.set_defaults(func=_cmd_reck)

    sp = sub.add_parser("chip", help="build a layered chip")
    sp.add_argument("--phase-table", choices=("Parameters7", "Parameters9"))
    sp.add_argument("--modes", type=int)
    sp.add_argument("--layers", type=int)
    common(sp)
    sp.set_defaults(func=_cmd_chip)

    sp = sub.add_parser("dist", help="exact output distribution")
    unitary_source(sp)
    sp.add_argument("--input", required=True, help="input occupations")
    sp.add_argument("--regime", choices=("quantum", "classical", "mixed"),
                    default="quantum")
    sp.add_argument("--r", type=float, help="indistinguishable mixture weight")
    sp.add_argument("--groups", help="photon groups, e.g. 1,2/3")
    common(sp, seed=False, plot=True)
    sp.set_defaults(func=_cmd_dist)

    sp = sub.add_parser("sample", help="draw samples from a distribution")
    unitary_source(sp)
    sp.add_argument("--input", required=True)
    sp.add_argument("--regime", choices=("quantum", "classical", "mixed"),
                    default="quantum")
    sp.add_argument("--r", type=float)
    sp.add_argument("--groups")
    sp.add_argument("-N", type=int, required=True)
    common(sp)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("bunching", help="bunching fractions and birthday curves")
    unitary_source(sp)
    sp.add_argument("--modes", type=int, default=6)
    sp.add_argument("--photons", type=int, default=3)
    sp.add_argument("--input", help="explicit input occupations")
    common(sp)
    sp.set_defaults(func=_cmd_bunching)

    sp = sub.add_parser("depth3", help="weak simulation of a depth-3 circuit")
    sp.add_argument("--modes", type=int, required=True)
    sp.add_argument("--photons", type=int, required=True)
    sp.add_argument("-N", type=int, required=True)
    common(sp)
    sp.set_defaults(func=_cmd_depth3)

    sp = sub.add_parser("tomo", help="reconstruct a unitary from dataset files")
    sp.add_argument("--data", required=True, help="dataset directory")
    sp.add_argument("--refine", type=int, default=0, help="refinement budget")
    sp.add_argument("--step", type=float, default=1.0)
    sp.add_argument("--target", choices=itf.FIXTURE_NAMES)
    common(sp)
    sp.set_defaults(func=_cmd_tomo)

    sp = sub.add_parser("validate", help="sampler validation Monte Carlo")
    sp.add_argument("test", choices=("aa", "likelihood"))
    sp.add_argument("--modes", type=int, required=True)
    sp.add_argument("--photons", type=int, required=True)
    sp.add_argument("--nset", required=True, help="set sizes, e.g. 100,500")
    sp.add_argument("--trials", type=int, required=True)
    common(sp, plot=True)
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("fixtures", help="emit reference matrices")
    sp.add_argument("--name", choices=itf.FIXTURE_NAMES)
    common(sp, seed=False)
    sp.set_defaults(func=_cmd_fixtures)

    sp = sub.add_parser("ensemble-sim",
                        help="random-phases vs Haar ensemble statistics")
    sp.add_argument("--modes", type=int, required=True)
    sp.add_argument("--layers", type=int, required=True)
    sp.add_argument("--photons", type=int, default=3)
    sp.add_argument("-N", type=int, required=True)
    common(sp, plot=True)
    sp.set_defaults(func=_cmd_ensemble_sim)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_cap()
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
