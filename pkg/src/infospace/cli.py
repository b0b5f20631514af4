"""Command-line front end.

Every subcommand writes one table (CSV or JSON) to --out or stdout. Floats
are written with 17 significant digits so identical flags give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import classical, quantum, spectral
from .errors import BoundaryEscapeError, InfospaceError, SearchError
from .numerics import Grid

log = logging.getLogger("infospace")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_COMPUTE = 3
EXIT_IO = 4

GRID_EPS = 1e-9
ENERGY_DRIFT_LIMIT = 1e-8


class OutputError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def render(columns, rows, fmt_name="csv") -> str:
    if fmt_name == "json":
        records = [
            {c: (int(v) if isinstance(v, (int, np.integer)) else float(fmt(v)))
             for c, v in zip(columns, row)}
            for row in rows
        ]
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_table(path, columns, rows, fmt_name="csv"):
    text = render(columns, rows, fmt_name)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def companion_path(path, suffix, fmt_name):
    if path in (None, "-"):
        return None
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{suffix}.{fmt_name}"))


def parse_number(token: str) -> float:
    """Accept decimals and fractions such as 1/3."""
    token = token.strip()
    try:
        return float(Fraction(token))
    except (ValueError, ZeroDivisionError):
        return float(token)


def parse_int_list(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "-" in tok[1:]:
            a, b = tok.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    return out


def parse_modes(text: str) -> spectral.SpectralExpansion:
    pairs = []
    for tok in text.split(","):
        if not tok.strip():
            continue
        n, _, c = tok.partition(":")
        pairs.append((int(n), parse_number(c) if c else 1.0))
    return spectral.SpectralExpansion.from_pairs(pairs)


def q_grid(resolution: int) -> np.ndarray:
    return Grid.interior(0.0, 1.0, resolution, GRID_EPS).points


def params_from(args) -> quantum.PhysicalParams:
    return quantum.PhysicalParams(m=args.m, k=args.k, hbar=args.hbar, qprime=args.qprime)


# ---------------------------------------------------------------------------
# commands


def cmd_eigenfunctions(args):
    modes = parse_int_list(args.n)
    q = q_grid(args.resolution)
    cols = [spectral.psi(n, q) for n in modes]
    rows = [[qi, *vals] for qi, *vals in zip(q, *cols)]
    write_table(args.out, ["q"] + [f"psi_{n}" for n in modes], rows, args.format)
    return EXIT_OK


def cmd_greens(args):
    tokens = [t.strip() for t in args.qprimes.split(",") if t.strip()]
    q = q_grid(args.resolution)
    cols = []
    for tok in tokens:
        qp = parse_number(tok)
        if args.method == "series":
            cols.append(spectral.greens_series(q, qp, args.terms))
        else:
            cols.append(spectral.greens_closed(q, qp))
    rows = [[qi, *vals] for qi, *vals in zip(q, *cols)]
    write_table(args.out, ["q"] + [f"G_{t}" for t in tokens], rows, args.format)
    return EXIT_OK


def _initial_expansion(args) -> spectral.SpectralExpansion:
    if args.samples:
        data = np.genfromtxt(args.samples, delimiter=",", names=True)
        names = data.dtype.names
        xs, ys = np.asarray(data[names[0]], float), np.asarray(data[names[1]], float)
        order = np.argsort(xs)
        xs, ys = xs[order], ys[order]
        return spectral.expand(lambda q: np.interp(q, xs, ys), args.nmax, tol=args.tol)
    return parse_modes(args.modes)


def cmd_evolve(args):
    e0 = _initial_expansion(args)
    tokens = [t.strip() for t in args.times.split(",") if t.strip()]
    q = q_grid(args.resolution)
    columns, cols = ["q"], []
    for tok in tokens:
        t = parse_number(tok)
        if args.kind == "heat":
            e = spectral.heat_evolve(e0, t, args.decay_law)
            columns.append(f"u(t={tok})")
            cols.append(spectral.evaluate(e, q))
        else:
            e = spectral.wave_evolve(e0, t)
            u = np.asarray(spectral.evaluate(e, q), dtype=complex)
            columns += [f"re_u(t={tok})", f"im_u(t={tok})"]
            cols += [u.real, u.imag]
    rows = [[qi, *vals] for qi, *vals in zip(q, *cols)]
    write_table(args.out, columns, rows, args.format)
    return EXIT_OK


def cmd_free_particle(args):
    p = params_from(args)
    rows = [[lv.n, lv.E_exact] for lv in quantum.free_particle_spectrum(p, args.nmax)]
    write_table(args.out, ["n", "E"], rows, args.format)
    return EXIT_OK


def cmd_oscillator(args):
    p = params_from(args)
    try:
        spectrum = quantum.oscillator_levels(p, args.nmax)
    except SearchError as exc:
        raise SearchError(f"root search failed for level n={exc.n}: {exc}", exc.seed, exc.n) from exc
    table = [
        [lv.n, lv.E_exact, lv.E_approx, quantum.oscillator_levels_asymptotic(p, lv.n)]
        for lv in spectrum
    ]
    write_table(args.out, ["n", "E_exact", "E_approx", "E_asymptotic"], table, args.format)

    target = companion_path(args.out, "condition", args.format)
    if target is None:
        return EXIT_OK
    # energy condition and its cosine approximation over an E grid
    e_lo = p.k / 16.0 + 1e-9
    e_hi = spectrum[-1].E_exact * 1.05
    energies = np.linspace(e_lo, e_hi, args.resolution)
    cond_rows = []
    for E in energies:
        mp = quantum.mathieu_params(p, E)
        s_pi = quantum.oscillator_energy_condition(p, E)
        scaled = s_pi * math.sqrt(mp.a) if mp.a > 0 else math.nan
        cond_rows.append([E, s_pi, scaled, quantum.approx_condition(p, E)])
    write_table(target, ["E", "S_pi", "S_pi_scaled", "S_pi_approx"], cond_rows, args.format)
    return EXIT_OK


def _potential(args, p):
    name = args.potential
    if name == "free":
        return lambda t: 0.0
    if name == "kl_quadratic":
        return quantum.kl_quadratic_potential(p)
    if name == "mathieu":
        return quantum.mathieu_potential(p)
    if name == "geodesic":
        return quantum.geodesic_potential(p)
    return quantum.harmonic_potential(args.K)


def cmd_shoot(args):
    p = params_from(args)
    spectrum = quantum.shooting_solve(p, _potential(args, p), args.nmax)
    write_table(args.out, ["n", "E"], [[lv.n, lv.E_exact] for lv in spectrum], args.format)
    return EXIT_OK


def cmd_trajectory(args):
    p = params_from(args)
    s0 = classical.PhaseState(args.q0, args.p0)
    columns = ["t", "q", "p", "H"]
    try:
        traj = classical.integrate_trajectory(
            s0, p, args.potential, args.t_end, args.tol, n_samples=args.resolution
        )
    except BoundaryEscapeError as exc:
        partial = exc.partial
        rows = [[s.t, s.q, s.p, classical.hamiltonian(s, p, args.potential)] for s in partial.samples]
        write_table(args.out, columns, rows, args.format)
        log.error("%s", exc)
        return EXIT_COMPUTE
    H = traj.energies()
    rows = [[s.t, s.q, s.p, h] for s, h in zip(traj.samples, H)]
    write_table(args.out, columns, rows, args.format)
    drift = float(np.max(np.abs(H - H[0]))) / max(abs(H[0]), np.finfo(float).tiny)
    if H[0] != 0 and drift > ENERGY_DRIFT_LIMIT:
        log.error("relative energy drift %.3e exceeds %.1e", drift, ENERGY_DRIFT_LIMIT)
        return EXIT_CHECK_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _resolution(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"resolution must be >= 2, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=float, default=8.0, help="mass in nerts")
    common.add_argument("--k", type=float, default=8.0, help="spring constant")
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--qprime", type=parse_number, default=0.5, help="potential anchor q'")
    common.add_argument("--resolution", type=_resolution, default=200, help="grid points")
    common.add_argument("--nmax", type=_positive_int, default=10, help="number of modes/levels")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")

    parser = argparse.ArgumentParser(
        prog="infospace",
        description="Classical and quantum dynamics on the Bernoulli information manifold.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigenfunctions", parents=[common], help="Laplace-Beltrami eigenfunctions")
    p.add_argument("--n", default="1-4", help="mode list, e.g. 1-4 or 1,3,5")
    p.set_defaults(func=cmd_eigenfunctions)

    p = sub.add_parser("greens", parents=[common], help="Green's function columns")
    p.add_argument("--qprimes", default="1/3,1/2,2/3")
    p.add_argument("--method", choices=("closed", "series"), default="closed")
    p.add_argument("--terms", type=_positive_int, default=spectral.DEFAULT_GREENS_TERMS)
    p.set_defaults(func=cmd_greens)

    p = sub.add_parser("evolve", parents=[common], help="heat or wave evolution")
    p.add_argument("--kind", choices=("heat", "wave"), default="heat")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--modes", default="1:1", help="initial expansion, e.g. 1:1,4:0.5")
    src.add_argument("--samples", help="CSV of initial samples (columns q,value)")
    p.add_argument("--times", default="0,0.1,0.5,1")
    p.add_argument("--decay-law", choices=[d.value for d in spectral.DecayLaw],
                   default=spectral.DecayLaw.CONSISTENT.value)
    p.add_argument("--tol", type=float, default=1e-8, help="quadrature tolerance for --samples")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("free-particle", parents=[common], help="free-particle energy levels")
    p.set_defaults(func=cmd_free_particle)

    p = sub.add_parser("oscillator", parents=[common], help="quadratic-KL oscillator levels")
    p.set_defaults(func=cmd_oscillator)

    p = sub.add_parser("shoot", parents=[common], help="Dirichlet levels by shooting")
    p.add_argument("--potential", choices=("free", "kl_quadratic", "mathieu", "geodesic", "harmonic"),
                   default="kl_quadratic")
    p.add_argument("--K", type=float, default=400.0, help="stiffness for --potential harmonic")
    p.set_defaults(func=cmd_shoot)

    p = sub.add_parser("trajectory", parents=[common], help="classical trajectory")
    p.add_argument("--potential", choices=[t.value for t in classical.Potential],
                   default="kl_quadratic")
    p.add_argument("--q0", type=parse_number, default=0.6)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=classical.DEFAULT_TOL)
    p.set_defaults(func=cmd_trajectory)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("INFOSPACE_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OutputError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (InfospaceError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
