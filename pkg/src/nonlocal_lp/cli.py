"""Command-line front-end.

Usage::

    nonlocal-lp <subcommand> --config run.json [--out DIR] [--seed N]
                [--grid-n N] [--grid-box B] [--suite NAME,...]

Subcommands
-----------
kernel-check
    Hypothesis certificates of the configured kernel/coefficient pair,
    written to ``certificates.json``.
symbol-dump
    ``symbol.csv`` with columns ``xi_1..xi_d, re, im`` (shifted frequency
    order) and ``symbol.json`` with the table invariants.
solve
    Resolvent solutions ``u`` as grid files plus ``solve.json``.
verify
    One ``<suite>.json`` report and one ``<suite>.csv`` per-trial table per
    requested suite.
mc
    Monte Carlo point estimates against the spectral solution,
    ``mc.json`` and ``mc.csv``.

The exit status is 0 when every requested verdict passes, 1 when a verdict
fails and 2 on configuration or prerequisite errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, RunConfig
from .fieldops import GridFunction, GridSpec, dft, lp_norm
from .hypothesis import (PASS, check_cancellation, check_H1, check_H2, check_H3, check_levy,
                         check_symbol_growth, check_two_sided, estimate_sigma)
from .kernel import OperatorSpec, coefficient_from_config, kernel_from_config
from .solver import feynman_kac_mc, resolvent_solve, semigroup_solve
from .symbol import CertificateError, check_symbol_kernel_bound, full_symbol
from .verify import SUITES, random_bumps

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
RESIDUAL_TOL = 1e-8
MODE_TOL = 1e-6
MC_SIGMAS = 3.0


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def _grid(cfg):
    g = cfg.grid
    return GridSpec(g["d"], g["n"], g["box"])


def _spec(cfg, variant=None):
    d = cfg.grid["d"]
    kernel = kernel_from_config(cfg.kernel, d)
    coef = coefficient_from_config(cfg.coefficient, d)
    return OperatorSpec(kernel, coef, variant or cfg.solve["variant"])


def _rhs(cfg, grid):
    """Right-hand side as a grid function and, when available, a pointwise callable."""
    f = cfg.solve["f"]
    prof = f["profile"]
    if prof == "file":
        u = io.read_grid(f["path"])
        if u.grid != grid:
            raise ConfigError("solve.f.path", f"grid {u.grid} differs from the configured grid")
        return u, None
    if prof == "cos":
        k = f["frequency"]
        mode = k * grid.box / (2 * np.pi)
        if abs(mode - round(mode)) > 1e-9 or abs(round(mode)) >= grid.n // 2:
            raise ConfigError("solve.f.frequency",
                              f"{k} is not a resolved lattice frequency (multiple of 2 pi / box)")
        amp = f["amplitude"]

        def func(x):
            return amp * np.cos(k * x[..., 0])
    elif prof == "gauss":
        w, amp = f["width"], f["amplitude"]

        def func(x):
            return amp * np.exp(-0.5 * np.sum(x * x, axis=-1) / w ** 2)
    else:
        rng = np.random.default_rng([cfg.seed, f["seed"]])
        h = grid.h
        func = random_bumps(grid.d, rng, (4 * h, max(8 * h, grid.box / 16)), grid.box / 4)
    return GridFunction(grid, func(np.stack(grid.coords(), axis=-1))), func


def _trig_eval(u, points):
    """Trigonometric interpolant of ``u`` at arbitrary points."""
    g = u.grid
    spec = dft(u) / g.box ** g.d
    freqs = [f.ravel() for f in g.frequencies()]
    out = []
    for x in np.atleast_2d(points):
        phase = sum(fk * xk for fk, xk in zip(freqs, x))
        out.append(float(np.real(np.sum(spec.ravel() * np.exp(1j * phase)))))
    return np.array(out)


def _ensure_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _h3(spec, clause):
    return check_H3(spec.kernel, spec.coefficient, sigma=spec.sigma, clause=clause)


def cmd_kernel_check(cfg):
    spec = _spec(cfg, "L")
    k = spec.kernel
    certs = []
    for name in cfg.kernel_check["hypotheses"]:
        if name == "LEVY":
            c = check_levy(k)
        elif name == "SIGMA":
            c = estimate_sigma(k)
        elif name == "H1":
            c = check_H1(k, sigma=spec.sigma)
        elif name == "H2":
            c = check_H2(k, sigma=spec.sigma)
        elif name == "CANCEL":
            c = check_cancellation(spec)
        elif name == "TWO-SIDED":
            c = check_two_sided(k, sigma=spec.sigma)
        elif name == "SYMBOL-KERNEL":
            c = check_symbol_kernel_bound(k)
        elif name == "SYMBOL-GROWTH":
            if k.bernstein is None:
                raise ConfigError("kernel_check.hypotheses",
                                  "SYMBOL-GROWTH needs a subordinate kernel")
            c = check_symbol_growth(k.bernstein, spec.sigma)
        elif name == "H3":
            if spec.chi_regime == "unit-ball":
                raise ConfigError("kernel_check.hypotheses", "H3 does not apply when sigma = 1")
            clauses = ("ii", "iii") if spec.sigma < 1 else ("iv",)
            tried = [_h3(spec, cl) for cl in clauses]
            good = [t for t in tried if t.passed]
            c = good[0] if good else tried[0]
        else:
            c = _h3(spec, name[2:])
        certs.append(c)
    out = _ensure_dir(cfg.output)
    io.write_json(out / "certificates.json",
                  [{"kernel": cfg.kernel, "coefficient": cfg.coefficient, **c.to_dict()}
                   for c in certs])
    for c in certs:
        print(f"{c.hypothesis:14s} {c.verdict}")
    return EXIT_OK if all(c.verdict == PASS for c in certs) else EXIT_FAIL


def cmd_symbol_dump(cfg):
    grid = _grid(cfg)
    table = full_symbol(_spec(cfg), grid)
    inv = table.invariants(tol=1e-8)
    freqs = [np.fft.fftshift(f) for f in grid.frequencies()]
    vals = np.fft.fftshift(table.values)
    out = _ensure_dir(cfg.output)
    header = [f"xi_{i + 1}" for i in range(grid.d)] + ["re", "im"]
    rows = [[*(float(f.flat[j]) for f in freqs), float(vals.flat[j].real),
             float(vals.flat[j].imag)] for j in range(vals.size)]
    io.write_csv(out / "symbol.csv", header, rows,
                 comment=f"multiplier m(xi) of variant {table.variant}; "
                         "columns: frequency components, real part, imaginary part")
    io.write_json(out / "symbol.json", {"variant": table.variant, "grid": cfg.grid,
                                        "invariants": inv})
    print(f"symbol invariants ok={inv['ok']}")
    return EXIT_OK if inv["ok"] else EXIT_FAIL


def cmd_solve(cfg):
    grid = _grid(cfg)
    f, _ = _rhs(cfg, grid)
    s = cfg.solve
    spec = _spec(cfg)
    table = full_symbol(spec, grid)
    out = _ensure_dir(cfg.output)
    io.write_grid(out / "f", f)
    records, ok = [], True
    for i, lam in enumerate(s["lambdas"]):
        for method in s["methods"]:
            if method == "spectral":
                res = resolvent_solve(table, f, lam)
                good = res.residual <= RESIDUAL_TOL
            else:
                gen = full_symbol(spec.with_variant("Phi"), grid) \
                    if spec.variant == "Ltilde" else table
                res = semigroup_solve(gen, f, lam)
                good = res.diagnostics["mode_error"] <= MODE_TOL
            name = f"u_{method}_{i}"
            io.write_grid(out / name, res.u)
            norms = {str(p): lp_norm(res.u, p) for p in s["ps"]}
            fnorms = {str(p): lp_norm(f, p) for p in s["ps"]}
            records.append({"lambda": lam, "method": res.method, "file": name + ".json",
                            "residual": res.residual, "norms_u": norms, "norms_f": fnorms,
                            "resolvent_ratio": {p: lam * norms[p] / fnorms[p] if fnorms[p] > 0
                                                else 0.0 for p in norms},
                            "diagnostics": res.diagnostics, "verdict": PASS if good else "fail"})
            ok = ok and good
            print(f"lambda={lam:g} {res.method}: residual={res.residual:.3e}")
    io.write_json(out / "solve.json", {"config": cfg.to_dict(), "variant": spec.variant,
                                       "solutions": records})
    return EXIT_OK if ok else EXIT_FAIL


def _suite_kwargs(name, cfg):
    """Keyword arguments of a suite: config kernel/coefficient, seed and options."""
    fn = SUITES[name]
    params = fn.__code__.co_varnames[:fn.__code__.co_argcount]
    opts = dict(cfg.verify["options"].get(name, {}))
    kw = {"seed": cfg.seed}
    use_defaults = opts.pop("default_kernels", False)
    if cfg.verify.get("use_config_grid") or "grid" in opts:
        g = opts.pop("grid", cfg.grid)
        kw["grid"] = GridSpec(g["d"], g["n"], g["box"])
    d = kw["grid"].d if "grid" in kw else 1
    if not use_defaults:
        kernel = kernel_from_config(cfg.kernel, d)
        if "kernels" in params:
            kw["kernels"] = [kernel]
        elif "kernel" in params:
            kw["kernel"] = kernel
        elif "configs" in params:
            sigma = OperatorSpec(kernel, coefficient_from_config({"family": "constant"}, d)).sigma
            variant = "Ltilde" if sigma < 1 else "L"
            kw["configs"] = [(kernel, abs(sigma - 1) < 1e-12, variant)]
    if cfg.coefficient["family"] == "random":
        kw["nu"], kw["Lambda"] = cfg.coefficient["nu"], cfg.coefficient["Lambda"]
    if "variant" in params and cfg.solve.get("variant") and name != "resolvent-bound":
        kw["variant"] = cfg.solve["variant"]
    for key, v in opts.items():
        if key not in params:
            raise ConfigError(f"verify.options.{name}.{key}", "unknown option")
        kw[key] = tuple(v) if isinstance(v, list) else v
    return kw


def cmd_verify(cfg):
    out = _ensure_dir(cfg.output)
    ok = True
    for name in cfg.verify["suites"]:
        report = SUITES[name](**_suite_kwargs(name, cfg))
        io.write_json(out / f"{name}.json", report.to_dict())
        header, rows = report.csv_rows()
        io.write_csv(out / f"{name}.csv", header, rows,
                     comment=f"per-trial records of '{report.estimate}'; ratio = lhs / rhs")
        print(f"{name:20s} {report.verdict} worst_ratio={report.worst_ratio:.6g}")
        ok = ok and report.passed
    return EXIT_OK if ok else EXIT_FAIL


def cmd_mc(cfg):
    k = cfg.kernel
    if k["family"] != "stable":
        raise ConfigError("kernel.family", "Monte Carlo needs a stable kernel")
    if cfg.coefficient != {"family": "constant", "value": 1.0}:
        raise ConfigError("coefficient", "Monte Carlo needs the constant coefficient a = 1")
    grid = _grid(cfg)
    f, func = _rhs(cfg, grid)
    if func is None:
        raise ConfigError("solve.f.profile", "Monte Carlo needs an analytic profile")
    m = cfg.mc
    lam = m["lambda"]
    res = feynman_kac_mc(k["alpha"], grid.d, func, lam, m["points"], paths=m["paths"],
                         seed=cfg.seed, period=grid.box)
    ref = resolvent_solve(full_symbol(_spec(cfg, "L"), grid), f, lam).u
    exact = _trig_eval(ref, m["points"])
    est, se = res.diagnostics["estimate"], res.diagnostics["stderr"]
    z = np.abs(est - exact) / np.maximum(se, 1e-300)
    out = _ensure_dir(cfg.output)
    rows = [[*p, float(e), float(s), float(x), float(zz)]
            for p, e, s, x, zz in zip(m["points"], est, se, exact, z)]
    header = [f"x_{i + 1}" for i in range(grid.d)] + ["estimate", "stderr", "spectral", "z"]
    io.write_csv(out / "mc.csv", header, rows,
                 comment="Monte Carlo estimate, standard error, spectral value, |difference|/stderr")
    ok = bool(np.all(z <= MC_SIGMAS))
    io.write_json(out / "mc.json", {"alpha": k["alpha"], "lambda": lam, "paths": m["paths"],
                                    "seed": cfg.seed, "points": m["points"], "estimate": est,
                                    "stderr": se, "spectral": exact, "z": z,
                                    "max_z": float(np.max(z)), "tolerance_sigmas": MC_SIGMAS,
                                    "verdict": PASS if ok else "fail"})
    print(f"max |MC - spectral| / stderr = {np.max(z):.3f}")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"kernel-check": cmd_kernel_check, "symbol-dump": cmd_symbol_dump,
            "solve": cmd_solve, "verify": cmd_verify, "mc": cmd_mc}


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def _parser():
    p = argparse.ArgumentParser(prog="nonlocal-lp", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON run configuration")
        s.add_argument("--out", help="output directory (overrides config 'output')")
        s.add_argument("--seed", type=int, help="global seed (u64)")
        s.add_argument("--grid-n", type=int, help="points per axis")
        s.add_argument("--grid-box", type=float, help="box side")
        s.add_argument("--suite", help="comma-separated verify suites")
    return p


def run(command, config_path, overrides=None):
    """Run one subcommand; returns the exit status.

    Parameters
    ----------
    overrides : dict, optional
        Keys ``out``, ``seed``, ``grid_n``, ``grid_box``, ``suite``.
    """
    o = overrides or {}
    try:
        cfg = RunConfig.load(config_path)
        suites = o["suite"].split(",") if o.get("suite") else None
        cfg = cfg.with_overrides(seed=o.get("seed"), grid_n=o.get("grid_n"),
                                 grid_box=o.get("grid_box"), output=o.get("out"),
                                 suites=suites)
        if command not in COMMANDS:
            raise ConfigError("<command>", f"unknown subcommand '{command}'")
        return COMMANDS[command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except CertificateError as exc:
        print(f"prerequisite failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None):
    args = _parser().parse_args(argv)
    return run(args.command, args.config,
               {"out": args.out, "seed": args.seed, "grid_n": args.grid_n,
                "grid_box": args.grid_box, "suite": args.suite})


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["run", "main", "COMMANDS"]
