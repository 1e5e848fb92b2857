"""Command line entry point: ``fnls <command> [options]``.

Commands
    run             one scheme from a config file
    convergence     every scheme of a config file against one shared reference
    oracle-check    FFT kernels against the brute-force Duhamel sums
    bourgain-check  empirical uniformity of the discrete L^4 estimate
    gen-data        write an initial datum to a field file

Failures print a JSON object ``{"error": ..., "kind": ...}`` on stderr and exit
with status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bourgain import check_l4_estimate
from .harness import (
    ConfigError,
    RunConfig,
    emit_plot,
    load_config,
    resolve_output,
    run_sweep,
    write_report,
)
from .initial_data import DATA_KINDS, DataSpec
from .integrators import kernel_J1, kernel_J2
from .oracle import (
    duhamel_full_cubic,
    duhamel_J1_integral,
    duhamel_J2_integral,
    remainder_R1,
    remainder_R2,
)
from .spectral import SpectralField, TorusGrid, save_field


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors: text plus JSON, exit 2
        self.print_usage(sys.stderr)
        print(json.dumps({"error": message, "kind": "usage"}), file=sys.stderr)
        raise SystemExit(2)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fnls", description="Filtered Fourier integrators for periodic cubic NLS.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="key = value config file")
        sp.add_argument("--seed", type=int, help="override the data seed")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--threads", type=int, default=None, help="parallel runs (default 1)")

    common(sub.add_parser("run", help="one scheme from a config file"))
    common(sub.add_parser("convergence", help="all configured schemes plus plot files"))

    sp = sub.add_parser("oracle-check", help="kernels against brute-force sums")
    common(sp, config=False)
    sp.add_argument("--n", type=int, default=8, help="grid size (power of two, <= 64)")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--taus", default="1,0.1,0.0078125")
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("bourgain-check", help="discrete L^4 estimate uniformity")
    common(sp, config=False)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--tau-exponents", default="4,6,8", help="tau = 2^-e for each e")
    sp.add_argument("--s", type=float, default=0.0, help="envelope regularity of samples")

    sp = sub.add_parser("gen-data", help="write an initial datum")
    common(sp, config=False)
    sp.add_argument("--kind", default="Paper8Datum", choices=DATA_KINDS[:-1])
    sp.add_argument("--n", type=int, default=1024)
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--k", type=int, default=1)
    return p


def _fail(message: str, kind: str, code: int = 1) -> int:
    print(json.dumps({"error": message, "kind": kind}), file=sys.stderr)
    return code


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg = replace(cfg, data=replace(cfg.data, seed=args.seed))
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    return cfg.validate()


def _summary(report) -> dict:
    return {
        "scheme": report.scheme.value,
        "fitted_order": report.fitted_order,
        "errors": report.errors,
        "statuses": [r.status for r in report.records],
    }


def _cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    cfg = replace(cfg, schemes=(cfg.scheme,))
    (report,) = run_sweep(cfg)
    out = resolve_output(cfg.output_dir or "fnls-out")
    write_report(report, out / report.scheme.value)
    print(json.dumps(_summary(report)))
    return 0


def _cmd_convergence(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    reports = run_sweep(cfg)
    out = resolve_output(cfg.output_dir or "fnls-out")
    paths = [write_report(r, out / r.scheme.value) for r in reports]
    emit_plot(paths, out)
    print(json.dumps([_summary(r) for r in reports]))
    return 0


def _random_field(rng: np.random.Generator, grid: TorusGrid) -> SpectralField:
    c = rng.standard_normal(grid.n_modes) + 1j * rng.standard_normal(grid.n_modes)
    return SpectralField(grid, c).with_zero_nyquist()


def _rel(a: SpectralField, b: SpectralField) -> float:
    scale = max(b.l2_norm(), 1e-300)
    return (a - b).l2_norm() / scale


def oracle_deviations(n: int, trials: int, seed: int, taus) -> dict:
    """Worst relative deviations of the kernels and the remainder identities."""
    grid = TorusGrid(n)
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = {"J1": 0.0, "J2": 0.0, "o1": 0.0, "o2": 0.0}
    for _ in range(trials):
        v1, v2, v3 = (_random_field(rng, grid) for _ in range(3))
        for tau in taus:
            worst["J1"] = max(worst["J1"], _rel(kernel_J1(v1, v2, v3, tau), duhamel_J1_integral(v1, v2, v3, tau)))
            worst["J2"] = max(worst["J2"], _rel(kernel_J2(v1, v2, v3, tau), duhamel_J2_integral(v1, v2, v3, tau)))
            full = duhamel_full_cubic(v1, v2, v3, tau)
            worst["o1"] = max(worst["o1"], _rel(duhamel_J1_integral(v1, v2, v3, tau) + remainder_R1(v1, v2, v3, tau), full))
            worst["o2"] = max(worst["o2"], _rel(duhamel_J2_integral(v1, v2, v3, tau) + remainder_R2(v1, v2, v3, tau), full))
    return worst


def _cmd_oracle(args) -> int:
    taus = [float(t) for t in args.taus.split(",")]
    worst = oracle_deviations(args.n, args.trials, args.seed or 0, taus)
    ok = all(v <= args.tol for v in worst.values())
    print(json.dumps({"n": args.n, "trials": args.trials, "max_rel_dev": worst, "tol": args.tol, "pass": ok}))
    return 0 if ok else 1


def _cmd_bourgain(args) -> int:
    taus = [2.0 ** -int(e) for e in args.tau_exponents.split(",")]
    report = check_l4_estimate(args.samples, taus, s=args.s, seed=args.seed or 0)
    d = report.to_dict()
    if args.out:
        out = resolve_output(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "l4_report.json").write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")
    print(json.dumps(d))
    return 0 if report.stable else 1


def _cmd_gen_data(args) -> int:
    spec = DataSpec(kind=args.kind, s=args.s, seed=args.seed or 0, k=args.k)
    f = spec.build(TorusGrid(args.n))
    out = resolve_output(args.out or f"{args.kind.lower()}_{args.n}.bin")
    save_field(f, out)
    print(json.dumps({"path": str(out), "N": args.n, "l2_norm": f.l2_norm(), "data": spec.to_dict()}))
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "convergence": _cmd_convergence,
    "oracle-check": _cmd_oracle,
    "bourgain-check": _cmd_bourgain,
    "gen-data": _cmd_gen_data,
}


def main(argv=None) -> int:
    parser = _parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        return _fail(str(exc), "config")
    except (ValueError, OSError) as exc:
        return _fail(str(exc), type(exc).__name__)


if __name__ == "__main__":
    sys.exit(main())
