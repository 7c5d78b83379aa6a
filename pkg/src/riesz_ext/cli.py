"""Command-line front end: ``verify``, ``sweep`` and ``solve``.

Exit codes: 0 success, 1 a check failed, 2 configuration or I/O error,
3 the solver did not converge (its report is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _accel
from .closed_forms import (
    BubbleParams,
    annulus_C2_exact,
    boundary_exponent,
    bubble_boundary_norm,
    bubble_extension_on_axis_n3,
    bubble_f_radial,
    bubble_g,
    c2_small_r_slope,
    critical_exponent,
    sharp_constant_ball,
    single_layer_sphere_exterior,
    theta2_ball,
)
from .errors import RieszExtError
from .functionals import (
    Verdict,
    c2_functional,
    classify,
    duality_check,
    optimize_two_level,
    poisson_quotient,
    rayleigh_J2,
)
from .geometry import DomainSpec, polar_reduce_sphere_integral, power_kernel, sphere_area
from .operators import BoundaryFunction, extend_riesz, radial_power_whole_space
from .solver import SolverConfig, ZonalDiscretization, default_init, solve_subcritical

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NOCONV = 0, 1, 2, 3
CSV_COLUMNS = ("n", "r", "a", "q", "quotient", "reference", "margin", "error_estimate", "verdict")


class ConfigError(Exception):
    pass


# ----------------------------------------------------------------- parsing

def parse_int_list(text: str) -> list[int]:
    """``"3..8"``, ``"3,5,7"`` or ``"4"``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise argparse.ArgumentTypeError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def parse_float_list(text: str) -> list[float]:
    return [float(p) for p in str(text).split(",") if p.strip()]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys are allowed."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _write_atomic(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


# ------------------------------------------------------------------ verify

class CheckTable:
    def __init__(self):
        self.rows = []

    def add(self, name, value, reference, tol, relative=True):
        gap = abs(value - reference)
        if relative:
            gap /= max(abs(reference), np.finfo(float).tiny)
        ok = bool(gap <= tol)
        self.rows.append((name, value, reference, gap, tol, ok))
        return ok

    def add_flag(self, name, ok, detail=""):
        self.rows.append((name, detail, "", "", "", bool(ok)))

    def render(self, out):
        for name, value, ref, gap, tol, ok in self.rows:
            status = "PASS" if ok else "FAIL"
            if isinstance(value, float):
                out.write(f"{status}  {name:<44s} value={value:.12g} ref={ref:.12g} err={gap:.2e} tol={tol:.0e}\n")
            else:
                out.write(f"{status}  {name:<44s} {value}\n")
        out.write(f"{sum(r[5] for r in self.rows)}/{len(self.rows)} checks passed\n")

    @property
    def ok(self):
        return all(r[5] for r in self.rows)


def _check_dims(ns):
    if not ns:
        raise ConfigError("dimension list is empty")
    for n in ns:
        if n < 3 or n > 16:
            raise ConfigError(f"dimension {n} outside 3..16")


def verify_single_layer(ns, table, tol=1e-10):
    one = lambda d: np.ones_like(d)
    for n in ns:
        newton = power_kernel(2 - n)
        for s in (0.0, 0.25, 0.5, 0.75, 0.95):
            val = polar_reduce_sphere_integral(n, 1.0, s, newton)
            table.add(f"interior n={n} |x|={s}", val, sphere_area(n), tol)
        for r in (0.1, 0.2, 0.5):
            for s in (0.6, 0.8, 0.95):
                val = polar_reduce_sphere_integral(n, r, s, newton)
                table.add(f"exterior n={n} r={r} |x|={s}", val, single_layer_sphere_exterior(s, r, n), tol)
        table.add(f"area n={n}", polar_reduce_sphere_integral(n, 1.0, 0.0, one), sphere_area(n), tol)


def verify_sharp_constants(ns, table, tol=1e-8):
    for n in ns:
        ref = sharp_constant_ball(n)
        ball = DomainSpec.ball(n)
        one = BoundaryFunction.constant(ball, 1.0)
        table.add(f"J2(1) on B1 n={n}", rayleigh_J2(one).quotient, ref, tol)
        table.add(f"C2(B1) n={n}", c2_functional(ball).quotient, ref, tol)
        table.add(f"C2 closed form at r=0 n={n}", annulus_C2_exact(0.0, n), ref, 1e-14)
        table.add(f"Theta2 quotient on B1 n={n}", poisson_quotient(one).quotient, theta2_ball(n), tol)


def bubble_points(count=20, radius=5.0):
    """Deterministic points in the upper half-space with ``|x| <= radius`` (first coordinates, then x_n)."""
    k = np.arange(count)
    xn = 0.05 + (radius * 0.8 - 0.05) * k / max(count - 1, 1)
    tang = (radius * 0.55) * ((k * 0.6180339887498949) % 1.0)
    ang = 2.0 * math.pi * ((k * 0.4142135623730951) % 1.0)
    return np.stack([tang * np.cos(ang), tang * np.sin(ang), xn], axis=1)


def bubble_extension(n, eps, trunc):
    """``x -> E_2 f_eps(x)`` over the truncated half-space window."""
    p = BubbleParams(eps, n)
    f = BoundaryFunction.radial(DomainSpec.half_space_window(n, trunc),
                                lambda rho, comp: bubble_f_radial(p, rho), scales=(eps,))
    return p, (lambda x: extend_riesz(f, 2.0, x))


def verify_bubble(ns, table, eps=1.0, trunc=1e4, tol=1e-4, points=20):
    for n in ns:
        p, ext = bubble_extension(n, eps, trunc)
        pts = bubble_points(points)
        if n > 3:
            pts = np.concatenate([pts[:, :2], np.zeros((points, n - 3)), pts[:, 2:]], axis=1)
        vals = np.array([ext(x) for x in pts])
        ratios = vals / bubble_g(p, pts) ** ((n - 2.0) / (n + 2.0))
        spread = float(np.max(np.abs(ratios / np.median(ratios) - 1.0)))
        table.add(f"E2 f / g^((n-2)/(n+2)) constant n={n}", spread, 0.0, tol, relative=False)
        if n == 3 and eps == 1.0:
            for xn in (0.01, 0.5, 2.0, 5.0):
                table.add(f"on-axis 2pi/(1+x_n) x_n={xn}", ext(np.array([0.0, 0.0, xn])),
                          float(bubble_extension_on_axis_n3(xn)), tol)
        pw = boundary_exponent(n)
        ref = bubble_boundary_norm(n)
        for e in (0.1, 1.0, 10.0):
            q = BubbleParams(e, n)
            val = radial_power_whole_space(lambda rho: bubble_f_radial(q, rho), n, pw) ** (1.0 / pw)
            table.add(f"||f_eps|| eps={e} n={n}", val, ref, 1e-10)


DUALITY_PAIRS = (
    (1.0, lambda s: np.ones_like(s)),
    (2.0, lambda s: s * s),
    (0.5, lambda s: np.exp(-s)),
    (3.0, lambda s: 1.0 / (1.0 + s * s)),
    (1.5, lambda s: np.cos(s)),
)


def verify_duality(ns, table, tol=1e-8):
    for n in ns:
        ball = DomainSpec.ball(n)
        for k, (c, g) in enumerate(DUALITY_PAIRS):
            chk = duality_check(BoundaryFunction.constant(ball, c), g)
            table.add(f"<E2 f,g> = <f,R2 g> ball n={n} pair {k}", chk.interior, chk.boundary, tol)
        chk = duality_check(BoundaryFunction.two_level(DomainSpec.annulus(n, 0.3), 2.0), lambda s: s)
        table.add(f"<E2 f,g> = <f,R2 g> annulus n={n}", chk.interior, chk.boundary, tol)
        # the constant pair has a closed form: c |S^{n-1}| |B_1|
        table.add(f"<E2 1,1> closed form n={n}", duality_check(BoundaryFunction.constant(ball, 1.0),
                  DUALITY_PAIRS[0][1]).interior, sphere_area(n) * ball.volume(), tol)


def cmd_verify(args, out) -> int:
    defaults = {"single-layer": "3..8", "sharp-constants": "3..8", "bubble": "3", "duality": "3"}
    ns = args.n if args.n is not None else parse_int_list(defaults[args.suite])
    _check_dims(ns)
    if not args.eps > 0 or not args.trunc > 0:
        raise ConfigError("--eps and --trunc must be positive")
    table = CheckTable()
    out.write(f"suite {args.suite}  backend={_accel.BACKEND}\n")
    if args.suite == "single-layer":
        verify_single_layer(ns, table)
    elif args.suite == "sharp-constants":
        verify_sharp_constants(ns, table)
    elif args.suite == "bubble":
        verify_bubble(ns, table, args.eps, args.trunc, args.tol)
    else:
        verify_duality(ns, table)
    table.render(out)
    return EXIT_OK if table.ok else EXIT_FAIL


# ------------------------------------------------------------------- sweep

def _sweep_point(task):
    theorem, n, r, a_grid, radial_order = task
    domain = DomainSpec.annulus(n, r)
    crit = critical_exponent(n)
    if theorem == "riesz":
        rep = c2_functional(domain, radial_order=radial_order)
        row = {"n": n, "r": r, "a": None, "q": crit}
        history = None
    else:
        opt = optimize_two_level(domain, "poisson-surrogate", a_grid, radial_order=radial_order)
        rep = opt.report
        row = {"n": n, "r": r, "a": opt.a, "q": crit}
        history = {"n": n, "r": r, "a_grid": list(opt.grid), "quotients": list(opt.grid_quotients)}
    row.update({
        "quotient": rep.quotient, "reference": rep.reference, "margin": rep.margin,
        "error_estimate": rep.error, "verdict": rep.verdict.value,
    })
    return row, history


def fit_small_r_slope(rows, n, r_cut=1e-2):
    """Least-squares fit of ``(ratio - 1)/r^{n-1} = s + c r`` over resolved points with ``r <= r_cut``."""
    rs, hs = [], []
    for row in rows:
        if row["n"] != n or row["r"] > r_cut:
            continue
        ratio_m1 = row["margin"] / row["reference"]
        if abs(row["margin"]) <= 1e3 * row["error_estimate"]:
            continue
        rs.append(row["r"])
        hs.append(ratio_m1 / row["r"] ** (n - 1))
    if len(rs) < 2:
        return None
    design = np.stack([np.ones(len(rs)), np.array(rs)], axis=1)
    coef, *_ = np.linalg.lstsq(design, np.array(hs), rcond=None)
    return float(coef[0])


def summarize(rows, theorem, ns):
    out = []
    for n in ns:
        mine = [row for row in rows if row["n"] == n]
        exceed = [row["r"] for row in mine if row["verdict"] == Verdict.EXCEEDS_BALL.value]
        entry = {"n": n, "r_star": max(exceed) if exceed else None,
                 "smallest_r_exceeds": bool(mine) and mine[0]["verdict"] == Verdict.EXCEEDS_BALL.value}
        if theorem == "riesz":
            pred = c2_small_r_slope(n)
            fit = fit_small_r_slope(mine, n)
            entry.update({"fitted_slope": fit, "predicted_slope": pred,
                          "slope_rel_error": None if fit is None else abs(fit - pred) / pred})
        out.append(entry)
    return out


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([row["verdict"] if c == "verdict" else _fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def csv_to_rows(text: str):
    """Inverse of :func:`rows_to_csv`."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for c in CSV_COLUMNS:
            v = rec[c]
            if c == "verdict":
                row[c] = v
            elif c == "n":
                row[c] = int(v)
            else:
                row[c] = None if v == "" else float(v)
        rows.append(row)
    return rows


def cmd_sweep(args, out) -> int:
    ns = args.n if args.n is not None else [3]
    _check_dims(ns)
    if args.r_list is not None:
        r_grid = list(args.r_list)
    else:
        if args.r_count < 0:
            raise ConfigError("--r-count must be nonnegative")
        r_grid = np.geomspace(args.r_min, args.r_max, args.r_count).tolist() if args.r_count else []
    if not r_grid:
        raise ConfigError("r-grid is empty")
    if any(not 0.0 < r < 1.0 for r in r_grid):
        raise ConfigError("r-grid values must lie in (0, 1)")
    r_grid = sorted(r_grid)
    a_grid = None
    if args.theorem == "poisson":
        if args.a_count < 1:
            raise ConfigError("a-grid is empty")
        a_grid = np.geomspace(args.a_min, args.a_max, args.a_count).tolist()
        if any(not a > 0.0 for a in a_grid):
            raise ConfigError("a-grid values must be positive")
    ext = os.path.splitext(args.out)[1].lower()
    if ext not in (".csv", ".json"):
        raise ConfigError("--out must end in .csv or .json")
    folder = os.path.dirname(os.path.abspath(args.out))
    if not os.path.isdir(folder):
        raise ConfigError(f"output directory {folder!r} does not exist")
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    tasks = [(args.theorem, n, r, a_grid, args.radial_order) for n in ns for r in r_grid]
    if args.workers == 1:
        results = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_point, tasks))  # map keeps grid order
    rows = [r for r, _ in results]
    histories = [h for _, h in results if h is not None]
    summary = summarize(rows, args.theorem, ns)
    if ext == ".csv":
        text = rows_to_csv(rows)
    else:
        text = _dump_json({"command": "sweep", "theorem": args.theorem, "columns": list(CSV_COLUMNS),
                           "rows": rows, "histories": histories, "summary": summary})
    try:
        _write_atomic(args.out, text)
    except OSError as exc:
        raise ConfigError(f"cannot write {args.out!r}: {exc}") from exc
    for row in rows:
        out.write(f"n={row['n']} r={row['r']:.6g} quotient={row['quotient']:.12g} "
                  f"margin={row['margin']:+.3e} err={row['error_estimate']:.1e} {row['verdict']}\n")
    for entry in summary:
        line = f"n={entry['n']} r*={entry['r_star']}"
        if "fitted_slope" in entry and entry["fitted_slope"] is not None:
            line += (f" fitted slope={entry['fitted_slope']:.6f} predicted={entry['predicted_slope']:.6f}"
                     f" rel.err={entry['slope_rel_error']:.2e}")
        out.write(line + "\n")
    return EXIT_OK if all(e["smallest_r_exceeds"] for e in summary) else EXIT_FAIL


# ------------------------------------------------------------------- solve

def cmd_solve(args, out) -> int:
    n = args.n
    _check_dims([n])
    if args.domain == "ball":
        domain = DomainSpec.ball(n)
    else:
        if args.r is None:
            raise ConfigError("--r is required for an annulus")
        domain = DomainSpec.annulus(n, args.r)
    config = SolverConfig(q=args.q, tol=args.tol, max_iter=args.max_iter, damping=args.damping,
                          angular_nodes=args.angular_nodes, radial_order=args.radial_order, grading=args.grading)
    config.validate(n)
    if args.out:
        folder = os.path.dirname(os.path.abspath(args.out))
        if not os.path.isdir(folder):
            raise ConfigError(f"output directory {folder!r} does not exist")
    disc = ZonalDiscretization(domain, config.angular_nodes, config.radial_order, config.grading)
    if args.init == "random":
        init = np.random.default_rng(args.seed).random(disc.boundary_size) + 0.05
    else:
        init = disc.sample(default_init(domain))
    rep = solve_subcritical(domain, config, init, disc)
    baseline = sharp_constant_ball(n) * domain.volume() ** (1.0 / args.q - 1.0 / critical_exponent(n))
    payload = rep.to_dict()
    payload.update({
        "command": "solve", "init": args.init, "seed": args.seed, "tol": args.tol, "max_iter": args.max_iter,
        "ball_baseline": baseline, "margin": rep.quotient - baseline,
        "verdict": classify(rep.quotient, baseline, 3.0 * max(args.tol, 1e-12) * rep.quotient).value,
    })
    if args.domain == "ball":
        q = args.q
        payload["constant_quotient"] = sphere_area(n) * domain.volume() ** (1.0 / q) / sphere_area(n) ** (1.0 / boundary_exponent(n))
    if args.out:
        try:
            _write_atomic(args.out, _dump_json(payload))
        except OSError as exc:
            raise ConfigError(f"cannot write {args.out!r}: {exc}") from exc
    out.write(f"domain={args.domain} n={n} q={args.q:g} quotient={rep.quotient:.15g} iterations={rep.iterations} "
              f"residual={rep.residual:.2e} converged={rep.converged}\n")
    out.write(f"ball baseline |Omega|^(1/q-1/2*) E2(B1) = {baseline:.15g}  margin={rep.quotient - baseline:+.3e}\n")
    return EXIT_OK if rep.converged else EXIT_NOCONV


# ------------------------------------------------------------------ parser

def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; explicit flags take precedence")
    parser = argparse.ArgumentParser(prog="riesz-ext", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=["single-layer", "sharp-constants", "bubble", "duality"])
    p.add_argument("--n", type=parse_int_list, default=None, help="dimensions, e.g. 3..8 or 3,5")
    p.add_argument("--eps", type=float, default=1.0, help="bubble scale")
    p.add_argument("--trunc", type=float, default=1e4, help="half-space truncation radius")
    p.add_argument("--tol", type=float, default=1e-4, help="bubble ratio tolerance")
    subs["verify"] = p

    p = sub.add_parser("sweep", parents=[common], help="annulus parameter sweep")
    p.add_argument("--theorem", choices=["riesz", "poisson"], default="riesz")
    p.add_argument("--n", type=parse_int_list, default=None)
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--r-max", type=float, default=0.5)
    p.add_argument("--r-count", type=int, default=40)
    p.add_argument("--r-list", type=parse_float_list, default=None, help="explicit comma-separated radii")
    p.add_argument("--a-min", type=float, default=1.01)
    p.add_argument("--a-max", type=float, default=10.0)
    p.add_argument("--a-count", type=int, default=25)
    p.add_argument("--radial-order", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output path ending in .csv or .json")
    subs["sweep"] = p

    p = sub.add_parser("solve", parents=[common], help="subcritical extremal solver")
    p.add_argument("--domain", choices=["ball", "annulus"], default="ball")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--damping", type=float, default=1.0)
    p.add_argument("--angular-nodes", type=int, default=1)
    p.add_argument("--radial-order", type=int, default=64)
    p.add_argument("--grading", type=float, default=3.0)
    p.add_argument("--init", choices=["default", "random"], default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="JSON report path")
    subs["solve"] = p
    return parser, subs


def _parse(argv):
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in subs), None)
    if known.config and command:
        values = read_config(known.config)
        sp = subs[command]
        actions = {a.dest: a for a in sp._actions}
        unknown = sorted(set(values) - set(actions) - {"config", "help"})
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for key in values:
            if key in actions and actions[key].required:
                actions[key].required = False
        # string defaults go through each option's type converter
        sp.set_defaults(**{k: v for k, v in values.items() if k != "config"})
    return parser.parse_args(argv)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _parse(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    except (ConfigError, argparse.ArgumentTypeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    handler = {"verify": cmd_verify, "sweep": cmd_sweep, "solve": cmd_solve}[args.command]
    try:
        return handler(args, out)
    except (ConfigError, RieszExtError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
