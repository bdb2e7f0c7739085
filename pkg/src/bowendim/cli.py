"""``bowendim`` command line.

Every command writes a CSV table (header row, numbers to 12 significant
digits) to ``--out`` or to standard output, plus a JSON run manifest beside
the CSV (``<out>.manifest.json``) or on standard error.  Files are written
to a temporary name and renamed, so a failed run leaves nothing behind.

Exit codes: 0 success, 2 invalid model file or arguments, 3 a size cap was
exceeded.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bowen import bowen_root_unstable, root_sequence, stable_root_identity_check
from .dimension.balls import radius_grid
from .dimension.boxcount import box_counting
from .dimension.experiments import (mcm_roots_check, product_bracket, measure_dimension_experiment,
                                    young_formula_check)
from .dimension.katok import EmptyFamilyError
from .errors import ModelError, ResourceError
from .gibbs import (equilibrium_measure, gibbs_certificate, markov_measure, pesin_check,
                    perturbed_measure, srb_measure, u_gibbs_certificate, variational_gap)
from .modelfile import demo_names, load, load_demo
from .models import DiagonalHorseshoeModel
from .potentials import (LocallyConstantPotential, SingularValueFamily, as_locally_constant,
                         psi_values)
from .pressure import pressure_cylinder_sum, pressure_exact, pressure_power
from .symbolic import power_subshift, word_array

EXIT_USAGE = 2
EXIT_CAP = 3
CERT_TOL = 1e-9


class UsageError(Exception):
    pass


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def render_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def atomic_write(path, text):
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def threads():
    raw = os.environ.get("BOWENDIM_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"BOWENDIM_THREADS must be a positive integer, got {raw!r}")
    return n


def open_model(spec):
    path = Path(spec)
    if path.exists():
        return load(path)
    if spec in demo_names():
        return load_demo(spec)
    raise UsageError(f"no model file {spec!r} (bundled demos: {', '.join(demo_names())})")


def check_levels(K, lm):
    """Level exponents above the model's ``caps.levels`` are refused."""
    if K < 0:
        raise UsageError("--levels must be >= 0")
    if K > lm.level_cap:
        raise ResourceError(f"--levels {K} exceeds the model's level cap {lm.level_cap}",
                            limit=lm.level_cap, requested=K)


def parse_floats(text, name):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{name} must be a comma-separated list of numbers") from None


def parse_ints(text, name):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{name} must be a comma-separated list of integers") from None


# ---------------------------------------------------------------------------
# commands


def cmd_pressure(args, lm):
    model = lm.model
    N = args.level
    if N < 1:
        raise UsageError("--level must be >= 1")
    if N > 2 ** lm.level_cap:
        raise ResourceError(f"--level {N} exceeds the model's level cap 2^{lm.level_cap}",
                            limit=2 ** lm.level_cap, requested=N)
    if args.potential == "table":
        if args.zero:
            values = np.zeros(model.subshift.alphabet_size)
        elif args.values:
            values = np.array(parse_floats(args.values, "--values"))
            if values.size != model.subshift.alphabet_size:
                raise UsageError(f"--values needs {model.subshift.alphabet_size} entries")
        else:
            raise UsageError("--potential table needs --zero or --values")
        S = model.subshift
        pot = LocallyConstantPotential(S, 1, values)
        if args.method == "exact":
            value = pressure_exact(S, pot)
        else:
            value = pressure_cylinder_sum(S, pot, args.length, lm.word_cap)
        param = ""
    else:
        if args.param is None:
            raise UsageError(f"--potential {args.potential} needs --param")
        param = args.param
        sign = 1.0 if args.potential == "phi" else -1.0
        if args.method == "exact":
            value = pressure_power(model, args.potential, param, N, lm.word_cap, sign)
        else:
            table = as_locally_constant(SingularValueFamily(args.potential, param, model, N),
                                        N, lm.word_cap)
            SN = power_subshift(model.subshift, N, lm.word_cap)
            pot = LocallyConstantPotential(SN, 1, sign * table.values)
            value = pressure_cylinder_sum(SN, pot, args.length, lm.word_cap) / N
    header = ["model", "potential", "param", "level", "method", "pressure"]
    row = [lm.name, args.potential, param, N, args.method, value]
    print(fmt(value))
    return header, [row], {"level": N, "potential": args.potential, "param": param,
                           "method": args.method}


def cmd_root(args, lm):
    model = lm.model
    tol = args.tol if args.tol is not None else lm.root_tol
    check_levels(args.levels, lm)
    seq = root_sequence(model, args.family, args.levels, tol, lm.word_cap)
    rows = [[r.level, r.family, r.root, r.bracket[0], r.bracket[1], r.residual, r.iterations,
             r.status] for r in seq.results]
    header = ["level", "family", "root", "bracket_lo", "bracket_hi", "residual", "iterations",
              "status"]
    return header, rows, {"family": args.family, "levels": args.levels, "tol": tol,
                          "nondecreasing": seq.nondecreasing}


def _measure(args, model):
    if args.weights is None:
        return srb_measure(model)
    p = np.array(parse_floats(args.weights, "--weights"))
    l = model.subshift.alphabet_size
    if p.size != l or np.any(p < 0) or not np.isclose(p.sum(), 1.0):
        raise UsageError(f"--weights needs {l} probabilities summing to 1")
    if not model.subshift.is_full:
        raise UsageError("--weights (a Bernoulli measure) needs a full shift")
    return markov_measure(model.subshift, np.tile(p, (l, 1)))


def cmd_dimension(args, lm):
    model, real = lm.model, lm.realization
    radii = radius_grid(args.k_min, args.k_max)
    params = {"experiment": args.experiment, "seed": args.seed}
    summary = None
    if args.experiment == "bracket":
        check_levels(args.levels, lm)
        header = ["level", "eps", "t", "t_hat", "t_prime", "lower", "upper", "tight_upper",
                  "slope_mean", "slope_min", "slope_max", "slopes_inside"]
        rows = []
        for k in range(args.levels + 1):
            e = product_bracket(real, 2 ** k, args.eps, radii, args.points, args.seed)
            s = e.extra["slopes"]
            rows.append([e.level, e.eps, e.t, e.t_hat, e.t_prime, e.lower, e.upper,
                         e.tight_upper, s.mean(), s.min(), s.max(), e.extra["slopes_inside"]])
        params.update(eps=args.eps, levels=args.levels, k_min=args.k_min, k_max=args.k_max,
                      points=args.points)
    elif args.experiment == "box":
        header = ["set", "depth", "estimate", "r_squared", "k_min", "k_max"]
        rows = []
        for which in ("unstable", "stable", "full"):
            r = box_counting(real, which, args.depth, cap=lm.word_cap)
            rows.append([which, args.depth, r.estimate, r.r_squared, r.exponents[0],
                         r.exponents[-1]])
        params.update(depth=args.depth)
    elif args.experiment == "young":
        mu = _measure(args, model)
        y = young_formula_check(real, mu, radii, args.points, args.seed)
        header = ["empirical", "target", "residual", "points", "slope_std"]
        rows = [[y.empirical, y.target, y.residual, len(y.slopes), y.slopes.std()]]
        params.update(k_min=args.k_min, k_max=args.k_max, points=args.points,
                      weights=args.weights)
    elif args.experiment == "mcm":
        c = mcm_roots_check(real, args.depth)
        header = ["slice", "root", "oracle", "box", "oracle_residual", "box_residual"]
        rows = [["unstable", c.t_unstable, c.oracle_unstable, c.box_unstable,
                 abs(c.t_unstable - c.oracle_unstable), abs(c.t_unstable - c.box_unstable)],
                ["stable", c.t_stable, c.oracle_stable, c.box_stable,
                 abs(c.t_stable - c.oracle_stable), abs(c.t_stable - c.box_stable)]]
        params.update(depth=args.depth)
    else:
        mu = None if args.weights is None else _measure(args, model)
        n_grid = parse_ints(args.n_grid, "--n-grid")
        eps_grid = parse_floats(args.eps_grid, "--eps-grid")
        rep = measure_dimension_experiment(model, mu, n_grid, eps_grid, lm.word_cap,
                                   workers=threads())
        header = ["n", "eps", "t", "t_hat", "t_prime", "lower", "upper", "tight_upper",
                  "width", "target", "contains", "entropy", "retained", "blocks", "lumped"]
        rows = [[r.level, r.eps, r.t, r.t_hat, r.t_prime, r.lower, r.upper, r.tight_upper,
                 r.width, rep.target, r.contains(rep.target), r.extra["entropy"],
                 r.extra["retained"], r.extra["blocks"], r.extra["lumped"]] for r in rep.rows]
        f = rep.final
        summary = (f"target {rep.target:.4f} (unstable {rep.dim_unstable:.4f} + stable "
                   f"{rep.dim_stable:.4f}), final bracket [{f.lower:.4f}, {f.upper:.4f}]")
        params.update(n_grid=list(n_grid), eps_grid=list(eps_grid), weights=args.weights)
    if summary:
        print(summary, file=sys.stderr)
    return header, rows, params


def verify_rows(lm):
    """Certificate rows ``(name, value, tolerance, status)`` for a loaded model."""
    model = lm.model
    S = model.subshift
    rows = [("domination", 0.0, 0.0, "PASS")]  # checked when the model was built
    words = word_array(S, 1)
    root = bowen_root_unstable(model, 1, "psi", lm.root_tol).root
    pots = {"norm_root": LocallyConstantPotential(S, 1, -psi_values(model, words, root)),
            "jacobian": LocallyConstantPotential(
                S, 1, -psi_values(model, words, model.unstable_dim))}
    rng = np.random.default_rng(0)
    for label, pot in pots.items():
        mu = equilibrium_measure(S, pot)
        g = gibbs_certificate(mu, pot, mu.pressure)
        rows.append((f"gibbs_drift[{label}]", abs(g.drift), g.drift_tolerance,
                     "PASS" if g.stable else "FAIL"))
        ug = u_gibbs_certificate(model, mu, pot)
        rows.append((f"u_gibbs_drift[{label}]", abs(ug.drift), ug.drift_tolerance,
                     "PASS" if ug.stable else "FAIL"))
        gap = abs(variational_gap(mu, pot, mu.pressure))
        rows.append((f"variational_gap[{label}]", gap, CERT_TOL,
                     "PASS" if gap <= CERT_TOL else "FAIL"))
        margins = [variational_gap(perturbed_measure(mu, rng), pot, mu.pressure)
                   for _ in range(5)]
        m = min(margins)
        rows.append((f"variational_margin[{label}]", m, 0.0, "PASS" if m > 0 else "FAIL"))
    stable = stable_root_identity_check(model, 1, lm.root_tol)
    rows.append(("stable_root_identity", stable, CERT_TOL,
                 "PASS" if stable <= CERT_TOL else "FAIL"))
    if isinstance(model, DiagonalHorseshoeModel):
        pes = pesin_check(model)
        rows.append(("entropy_formula", pes, CERT_TOL, "PASS" if pes <= CERT_TOL else "FAIL"))
    else:
        rows.append(("entropy_formula", float("nan"), CERT_TOL, "SKIP"))
    return rows


def cmd_verify(args, lm):
    rows = verify_rows(lm)
    for name, value, tol, status in rows:
        print(f"{status:4s} {name} = {fmt(value)} (tolerance {fmt(tol)})", file=sys.stderr)
    return ["certificate", "value", "tolerance", "status"], [list(r) for r in rows], {}


COMMANDS = {"pressure": cmd_pressure, "root": cmd_root, "dimension": cmd_dimension,
            "verify": cmd_verify}


def build_parser():
    p = argparse.ArgumentParser(prog="bowendim", description=(
        "Pressure, Bowen roots and dimension brackets for symbolic linear horseshoes. "
        "MODEL is a JSON model file or the name of a bundled demo."))
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("model", metavar="MODEL")
        sp.add_argument("--out", help="CSV output file (pressure appends rows)")

    sp = sub.add_parser("pressure", help="topological pressure of a potential")
    common(sp)
    sp.add_argument("--potential", choices=["psi", "psihat", "phi", "table"], required=True)
    sp.add_argument("--param", type=float)
    sp.add_argument("--level", type=int, default=1)
    sp.add_argument("--method", choices=["exact", "cylinder"], default="exact")
    sp.add_argument("--zero", action="store_true", help="zero table potential")
    sp.add_argument("--values", help="per-symbol table values, comma separated")
    sp.add_argument("--length", type=int, default=10, help="cylinder length for --method cylinder")

    sp = sub.add_parser("root", help="Bowen roots at levels 1, 2, 4, ...")
    common(sp)
    sp.add_argument("--family", choices=["psi", "psihat", "phi"], default="psi")
    sp.add_argument("--levels", type=int, default=0, help="largest level exponent K")
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("dimension", help="dimension experiments")
    common(sp)
    sp.add_argument("--experiment", choices=["bracket", "box", "young", "mcm", "theoremB"],
                    required=True)
    sp.add_argument("--eps", type=float, default=0.05)
    sp.add_argument("--levels", type=int, default=0)
    sp.add_argument("--n-grid", default="8,10,12")
    sp.add_argument("--eps-grid", default="0.1,0.05")
    sp.add_argument("--depth", type=int, default=10)
    sp.add_argument("--k-min", type=int, default=4)
    sp.add_argument("--k-max", type=int, default=20)
    sp.add_argument("--points", type=int, default=128)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--weights", help="Bernoulli target probabilities, comma separated")

    sp = sub.add_parser("verify", help="run the certificate suite")
    common(sp)
    return p


def emit(args, header, rows, params, started, lm):
    body = render_csv(header, rows)
    if args.out and args.command == "pressure" and Path(args.out).exists():
        old = Path(args.out).read_text()
        if old.splitlines()[:1] != body.splitlines()[:1]:
            raise UsageError(f"{args.out} has a different header")
        body = old + body.split("\n", 1)[1]
    manifest = {
        "command": args.command,
        "model": lm.name,
        "model_digest": lm.digest,
        "parameters": params,
        "version": __version__,
        "tolerances": {"root": lm.root_tol, "certificates": CERT_TOL},
        "caps": {"words": lm.word_cap, "levels": lm.level_cap},
        "threads": threads(),
        "wall_clock_seconds": round(time.perf_counter() - started, 6),
        "output_sha256": hashlib.sha256(body.encode()).hexdigest(),
    }
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    if args.out:
        atomic_write(args.out, body)
        atomic_write(f"{args.out}.manifest.json", text)
    else:
        if args.command != "pressure":
            sys.stdout.write(body)
        sys.stderr.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        threads()
        lm = open_model(args.model)
        header, rows, params = COMMANDS[args.command](args, lm)
        emit(args, header, rows, params, started, lm)
    except (UsageError, ModelError, EmptyFamilyError, ValueError) as exc:
        print(f"bowendim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"bowendim: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    return 0


if __name__ == "__main__":
    sys.exit(main())
