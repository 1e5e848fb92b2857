"""Convergence experiments: cutoff selection, tau sweeps, reports and plots.

A run evolves one scheme over a dyadic tau grid, measures the L^2 distance to
a fine-step Strang reference at the final time and fits the convergence order.
Outputs per scheme directory:

    report.json   deterministic report (schema below), no timings
    timings.json  wall-clock seconds per tau
    series.csv    scheme, tau, K, error_l2, wallclock_s, status
    fields/       final states and the reference, binary field format

``report.json`` schema (version 1)::

    {"schema": "filtered-nls-convergence-report", "version": 1,
     "scheme": str, "label": str, "config_hash": str, "config": {...},
     "reference": {"scheme", "tau", "N", "error_estimate"},
     "records": [{"tau", "K", "N", "error_l2", "error_in_K_band",
                  "ref_tail_beyond_K", "status", "diverged_step"}],
     "fit": {"order", "window", "predicted_order"}, "notes": [...]}

Floats that are undefined (diverged runs, empty fit windows) are ``null``.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
import os
from fractions import Fraction
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .initial_data import DataSpec
from .integrators import EXP_EULER_FORMS, BlowUpError, SchemeId, StepParams, evolve
from .spectral import SpectralField, TorusGrid, l2_norm, project, save_field

__all__ = [
    "ConfigError",
    "RunConfig",
    "ReferenceSpec",
    "TauRecord",
    "ConvergenceReport",
    "Reference",
    "choose_K",
    "predicted_order",
    "theorem_case",
    "compute_reference",
    "run_convergence",
    "run_sweep",
    "fit_order",
    "write_report",
    "load_report",
    "emit_plot",
    "load_config",
    "parse_config",
    "OUTPUT_ROOT_ENV",
    "REPORT_SCHEMA",
]

REPORT_SCHEMA = "filtered-nls-convergence-report"
REPORT_VERSION = 1
OUTPUT_ROOT_ENV = "FNLS_OUTPUT_ROOT"
DEFAULT_EPSILON = 1.0 / 12.0


class ConfigError(ValueError):
    """Invalid run configuration."""


# cutoff rule ------------------------------------------------------------------


def theorem_case(s0: float, epsilon: float) -> int:
    """Regime of the error theorem: 1 (s0 <= 1/4), 2 (<= 1/2) or 3 (<= 1)."""
    if not (0.0 < s0 <= 1.0):
        raise ConfigError(f"s0 must lie in (0, 1], got {s0}")
    if s0 <= 0.25:
        return 1
    if s0 <= 0.5:
        if not (epsilon > 0 and 0.25 + epsilon < s0):
            raise ConfigError(f"s0={s0} needs 0 < epsilon < s0 - 1/4, got {epsilon}")
        return 2
    if not (0.0 < epsilon < 0.25):
        raise ConfigError(f"s0={s0} needs epsilon in (0, 1/4), got {epsilon}")
    return 3


def choose_K(s0: float, tau: float, epsilon: float = DEFAULT_EPSILON) -> float:
    """Frequency cutoff balancing time and space errors for H^s0 data."""
    if not (0.0 < tau <= 1.0):
        raise ConfigError(f"tau must lie in (0, 1], got {tau}")
    case = theorem_case(s0, epsilon)
    if case == 1:
        K = tau**-0.5
    elif case == 2:
        K = tau ** (-(s0 + 0.125 - epsilon / 2) / (s0 + 0.5))
    else:
        K = tau ** (-1.0 + (0.125 + epsilon / 2) / s0)
    assert K >= tau**-0.5 * (1 - 1e-12), (K, tau)
    return max(K, tau**-0.5)


def predicted_order(s0: float, epsilon: float = DEFAULT_EPSILON) -> float:
    case = theorem_case(s0, epsilon)
    if case == 1:
        return s0 / 2
    if case == 2:
        return s0 * (1 - (0.75 + epsilon) / (2 * s0 + 1))
    return s0 - (0.125 + epsilon / 2)


# configuration ------------------------------------------------------------------


@dataclass(frozen=True)
class ReferenceSpec:
    scheme: SchemeId = SchemeId.STRANG_REFERENCE
    tau_divisor: int = 64
    N: int | None = None  # default max(N, 2048)


@dataclass(frozen=True)
class RunConfig:
    """One convergence study.  ``schemes`` lists the schemes of a sweep;
    :func:`run_convergence` uses the first."""

    schemes: tuple = (SchemeId.TWICE_FILTERED,)
    s0: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    T: float = 1.0
    tau_grid: tuple = tuple(2.0**-e for e in range(4, 13))
    N: int = 8192
    comparison_modes: int | None = 1024
    data: DataSpec = field(default_factory=DataSpec)
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    output_dir: str | None = None
    threads: int = 1
    exp_euler_form: str = "phi1"

    @property
    def scheme(self) -> SchemeId:
        return self.schemes[0]

    @property
    def ref_N(self) -> int:
        return self.reference.N or max(self.N, 2048)

    def validate(self) -> RunConfig:
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        theorem_case(self.s0, self.epsilon)
        if not self.T > 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        taus = list(self.tau_grid)
        if not taus:
            raise ConfigError("tau_grid is empty")
        for a, b in zip(taus, taus[1:]):
            if not math.isclose(b, a / 2, rel_tol=1e-12):
                raise ConfigError("tau_grid must be descending and dyadic")
        for tau in taus:
            if not (0 < tau <= 1):
                raise ConfigError(f"tau must lie in (0, 1], got {tau}")
            n = self.T / tau
            if abs(n - round(n)) > 1e-9 * n:
                raise ConfigError(f"T={self.T} is not a multiple of tau={tau}")
        for name, n in (("N", self.N), ("reference.N", self.ref_N), ("comparison_modes", self.comparison_modes)):
            if n is None:
                continue
            try:
                TorusGrid(n)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{name}: {exc}") from exc
        if self.ref_N < self.N:
            raise ConfigError("reference grid must not be coarser than N")
        if self.reference.tau_divisor < 32:
            raise ConfigError("reference tau divisor must be >= 32")
        tau_min = min(taus)
        if SchemeId.TWICE_FILTERED in self.schemes:
            K = choose_K(self.s0, tau_min, self.epsilon)
            if 8 * K > self.N * (1 + 1e-12):
                raise ConfigError(
                    f"8 K(tau_min) = {8 * K:.1f} exceeds N = {self.N}; refine the grid"
                )
        if SchemeId.SINGLE_FILTERED in self.schemes and 8 * tau_min**-0.5 > self.N:
            raise ConfigError("N too small for the single-filtered band")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.exp_euler_form not in EXP_EULER_FORMS:
            raise ConfigError(f"exp_euler_form must be one of {EXP_EULER_FORMS}")
        return self

    def to_dict(self) -> dict:
        """Canonical content used for hashing and reports (no output paths)."""
        return {
            "schemes": [s.value for s in self.schemes],
            "s0": self.s0,
            "epsilon": self.epsilon,
            "T": self.T,
            "tau_grid": list(self.tau_grid),
            "N": self.N,
            "comparison_modes": self.comparison_modes,
            "exp_euler_form": self.exp_euler_form,
            "data": self.data.to_dict(),
            "reference": {
                "scheme": self.reference.scheme.value,
                "tau_divisor": self.reference.tau_divisor,
                "N": self.ref_N,
            },
        }

    def config_hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def scheme_grid(self, scheme: SchemeId) -> TorusGrid:
        """Grid a scheme runs on: comparison schemes use the fixed mode band."""
        if scheme in (SchemeId.LIE_SPLITTING, SchemeId.EXPONENTIAL_EULER) and (
            self.comparison_modes
        ):
            return TorusGrid(min(self.comparison_modes, self.N))
        return TorusGrid(self.N)

    def step_params(self, scheme: SchemeId, tau: float) -> StepParams:
        if scheme is SchemeId.TWICE_FILTERED:
            return StepParams(tau, choose_K(self.s0, tau, self.epsilon))
        return StepParams(tau)


def _parse_taus(text: str) -> tuple:
    text = text.strip()
    if ".." in text:  # exponent range, e.g. 4..12 means 2^-4 ... 2^-12
        lo, hi = (int(p) for p in text.split(".."))
        return tuple(2.0**-e for e in range(lo, hi + 1))
    out = []
    for part in text.replace(",", " ").split():
        if part.startswith("2^"):
            out.append(2.0 ** _number(part[2:]))
        else:
            out.append(_number(part))
    return tuple(out)


def _number(text: str) -> float:
    return float(Fraction(text.strip()))  # accepts 1/12 as well as 0.25


_KEYS = {
    "scheme", "schemes", "s0", "epsilon", "t", "tau_grid", "tau_exponents", "n",
    "comparison_modes", "exp_euler_form", "output_dir", "threads", "data.kind", "data.s", "data.seed",
    "data.k", "data.amplitude", "reference.scheme", "reference.tau_divisor",
    "reference.n",
}


def parse_config(text: str) -> RunConfig:
    """Parse the flat ``key = value`` format (``#`` comments, keys case-insensitive).

    Keys: schemes (comma list), s0, epsilon, T, tau_grid (list, ``2^-k`` allowed)
    or tau_exponents (``lo..hi``), N, comparison_modes (0 disables),
    exp_euler_form (phi1 or lawson), output_dir,
    threads, data.kind, data.s, data.seed, data.k, data.amplitude,
    reference.scheme, reference.tau_divisor, reference.N.
    """
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if parser.sections() != ["run"]:
        raise ConfigError("config files are flat: no [section] headers")
    items = dict(parser["run"])
    unknown = set(items) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        kw: dict = {}
        names = items.get("schemes") or items.get("scheme")
        if names:
            kw["schemes"] = tuple(SchemeId.parse(s.strip()) for s in names.split(",") if s.strip())
        for key, name, conv in (
            ("s0", "s0", _number),
            ("epsilon", "epsilon", _number),
            ("t", "T", _number),
            ("n", "N", int),
            ("threads", "threads", int),
        ):
            if key in items:
                kw[name] = conv(items[key])
        if "comparison_modes" in items:
            cm = int(items["comparison_modes"])
            kw["comparison_modes"] = cm or None
        if "tau_grid" in items:
            kw["tau_grid"] = _parse_taus(items["tau_grid"])
        elif "tau_exponents" in items:
            kw["tau_grid"] = _parse_taus(items["tau_exponents"])
        if "exp_euler_form" in items:
            kw["exp_euler_form"] = items["exp_euler_form"].strip().lower()
        if "output_dir" in items:
            kw["output_dir"] = items["output_dir"]
        data = {}
        for key in ("kind", "s", "seed", "k", "amplitude"):
            if f"data.{key}" in items:
                raw = items[f"data.{key}"]
                data[key] = {
                    "kind": str, "s": float, "seed": int, "k": int, "amplitude": complex,
                }[key](raw.replace(" ", ""))
        if data:
            kw["data"] = DataSpec(**data)
        ref = {}
        if "reference.scheme" in items:
            ref["scheme"] = SchemeId.parse(items["reference.scheme"])
        if "reference.tau_divisor" in items:
            ref["tau_divisor"] = int(items["reference.tau_divisor"])
        if "reference.n" in items:
            ref["N"] = int(items["reference.n"])
        if ref:
            kw["reference"] = ReferenceSpec(**ref)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return RunConfig(**kw).validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def resolve_output(path) -> Path:
    """Relative output paths are placed under $FNLS_OUTPUT_ROOT when it is set."""
    p = Path(path)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not p.is_absolute():
        p = Path(root) / p
    return p


# running ------------------------------------------------------------------------


@dataclass(frozen=True)
class Reference:
    field: SpectralField
    tau: float
    error_estimate: float


def compute_reference(cfg: RunConfig, u0: SpectralField | None = None) -> Reference:
    """Fine-step reference at time T plus an estimate of its own error.

    The estimate is the distance to the same reference run with twice the step,
    which bounds the error of a convergent scheme from above.
    """
    grid = TorusGrid(cfg.ref_N)
    if u0 is None:
        u0 = cfg.data.build(grid)
    tau_ref = min(cfg.tau_grid) / cfg.reference.tau_divisor
    scheme = cfg.reference.scheme
    fine = evolve(u0, scheme, StepParams(tau_ref), cfg.T)
    coarse = evolve(u0, scheme, StepParams(2 * tau_ref), cfg.T)
    return Reference(fine, tau_ref, l2_norm(fine - coarse))


@dataclass
class TauRecord:
    tau: float
    K: float | None
    N: int
    error_l2: float | None
    error_in_K_band: float | None
    ref_tail_beyond_K: float | None
    status: str
    diverged_step: int | None = None
    wallclock_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "K": self.K,
            "N": self.N,
            "error_l2": self.error_l2,
            "error_in_K_band": self.error_in_K_band,
            "ref_tail_beyond_K": self.ref_tail_beyond_K,
            "status": self.status,
            "diverged_step": self.diverged_step,
        }


@dataclass
class ConvergenceReport:
    scheme: SchemeId
    config: RunConfig
    records: list
    reference_tau: float
    reference_error: float
    fitted_order: float | None
    fit_window: list
    notes: list = field(default_factory=list)
    fields: dict = field(default_factory=dict, repr=False)

    @property
    def errors(self) -> list:
        return [r.error_l2 for r in self.records]

    def to_dict(self) -> dict:
        cfg = self.config
        pred = None
        if self.scheme is SchemeId.TWICE_FILTERED:
            pred = predicted_order(cfg.s0, cfg.epsilon)
        return {
            "schema": REPORT_SCHEMA,
            "version": REPORT_VERSION,
            "scheme": self.scheme.value,
            "label": self.scheme.label,
            "config_hash": cfg.config_hash(),
            "config": cfg.to_dict(),
            "reference": {
                "scheme": cfg.reference.scheme.value,
                "tau": self.reference_tau,
                "N": cfg.ref_N,
                "error_estimate": self.reference_error,
            },
            "records": [r.to_dict() for r in self.records],
            "fit": {
                "order": self.fitted_order,
                "window": self.fit_window,
                "predicted_order": pred,
            },
            "notes": list(self.notes),
        }


def fit_order(taus, errors, floor: float = 0.0) -> tuple[float | None, list]:
    """Least-squares slope of log(error) against log(tau) on the fit window.

    The window is the longest run of points, ending at the smallest admissible
    tau, whose errors exceed ``floor`` and decrease strictly as tau decreases.
    Returns (slope, window taus); slope is None for fewer than two points.
    """
    pts = sorted(
        ((t, e) for t, e in zip(taus, errors) if e is not None and math.isfinite(e)),
        key=lambda p: p[0],
    )
    pts = [(t, e) for t, e in pts if e > floor]
    if not pts:
        return None, []
    window = [pts[0]]
    for t, e in pts[1:]:
        if e > window[-1][1]:
            window.append((t, e))
        else:
            break
    if len(window) < 2:
        return None, [t for t, _ in window]
    x = np.log([t for t, _ in window])
    y = np.log([e for _, e in window])
    slope = float(np.polyfit(x, y, 1)[0])
    return slope, sorted((t for t, _ in window), reverse=True)


_FLOOR_FACTOR = 10.0


def _run_one(cfg: RunConfig, scheme: SchemeId, tau: float, u0_full: SpectralField, ref: Reference):
    grid = cfg.scheme_grid(scheme)
    u0 = u0_full if grid == u0_full.grid else u0_full.resample(grid.n_modes)
    p = cfg.step_params(scheme, tau)
    K = p.K if scheme is SchemeId.TWICE_FILTERED else (
        p.low_cutoff if scheme is SchemeId.SINGLE_FILTERED else None
    )
    ref_band = ref.field.resample(grid.n_modes) if grid != ref.field.grid else ref.field
    start = time.perf_counter()
    try:
        u = evolve(u0, scheme, p, cfg.T, exp_euler_form=cfg.exp_euler_form)
    except BlowUpError as exc:
        rec = TauRecord(tau, K, grid.n_modes, None, None, None, "diverged", exc.step_index)
        rec.wallclock_s = time.perf_counter() - start
        return rec, None
    elapsed = time.perf_counter() - start
    err = l2_norm(u - ref_band)
    in_band = tail = None
    if K is not None:
        in_band = l2_norm(project(u, K) - project(ref_band, K))
        tail = l2_norm(ref.field - project(ref.field, K))
    rec = TauRecord(tau, K, grid.n_modes, err, in_band, tail, "ok", None, elapsed)
    return rec, u


def run_sweep(cfg: RunConfig, reference: Reference | None = None) -> list:
    """Run every scheme of ``cfg`` against one shared reference."""
    cfg.validate()
    u0 = cfg.data.build(TorusGrid(cfg.ref_N))
    ref = reference or compute_reference(cfg, u0)
    u0_run = u0 if cfg.N == cfg.ref_N else u0.resample(cfg.N)
    jobs = [(s, t) for s in cfg.schemes for t in cfg.tau_grid]
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(lambda j: _run_one(cfg, j[0], j[1], u0_run, ref), jobs))
    else:
        results = [_run_one(cfg, s, t, u0_run, ref) for s, t in jobs]
    by_job = dict(zip(jobs, results))
    reports = []
    for scheme in cfg.schemes:
        recs = [by_job[(scheme, t)][0] for t in cfg.tau_grid]
        fields = {t: by_job[(scheme, t)][1] for t in cfg.tau_grid}
        order, window = fit_order(
            [r.tau for r in recs], [r.error_l2 for r in recs], _FLOOR_FACTOR * ref.error_estimate
        )
        notes = [
            f"fit window: errors above {_FLOOR_FACTOR:g}x the reference error estimate, "
            "decreasing monotonically toward the smallest tau",
            "initial data projected to each scheme's spatial band",
        ]
        if scheme is SchemeId.EXPONENTIAL_EULER:
            notes.append(f"exponential Euler form: {cfg.exp_euler_form}")
        if scheme is SchemeId.SINGLE_FILTERED:
            notes.append("single-filtered (variant): twice-filtered step with K = tau^-1/2")
        if cfg.scheme_grid(scheme).n_modes != cfg.ref_N:
            notes.append("errors measured against the reference truncated to the scheme's band")
        reports.append(
            ConvergenceReport(
                scheme=scheme,
                config=replace(cfg, schemes=(scheme,)),
                records=recs,
                reference_tau=ref.tau,
                reference_error=ref.error_estimate,
                fitted_order=order,
                fit_window=window,
                notes=notes,
                fields={**fields, "reference": ref.field},
            )
        )
    return reports


def run_convergence(cfg: RunConfig, reference: Reference | None = None) -> ConvergenceReport:
    """Convergence study of ``cfg.scheme``; persisted when ``output_dir`` is set."""
    report = run_sweep(replace(cfg, schemes=(cfg.scheme,)), reference)[0]
    if cfg.output_dir:
        write_report(report, resolve_output(cfg.output_dir))
    return report


# persistence ------------------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def report_json(report: ConvergenceReport) -> str:
    return json.dumps(_clean(report.to_dict()), indent=2, sort_keys=True) + "\n"


def _tau_tag(tau: float) -> str:
    e = -math.log2(tau)
    return f"tau2m{e:g}" if float(e).is_integer() else f"tau{tau:.6g}"


_CSV_COLUMNS = ("scheme", "tau", "K", "error_l2", "wallclock_s", "status")


def _csv_rows(scheme: str, records: list, timings: dict) -> list:
    rows = []
    for r in records:
        rows.append(
            [
                scheme,
                repr(float(r["tau"])),
                "" if r["K"] is None else repr(float(r["K"])),
                "" if r["error_l2"] is None else repr(float(r["error_l2"])),
                f"{timings.get(repr(float(r['tau'])), 0.0):.6f}",
                r["status"],
            ]
        )
    return rows


def _write_csv(path: Path, rows: list) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_COLUMNS)
    w.writerows(rows)
    path.write_text(buf.getvalue())


def write_report(report: ConvergenceReport, out_dir, *, save_fields: bool = True) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report_json(report))
    timings = {repr(float(r.tau)): r.wallclock_s for r in report.records}
    (out / "timings.json").write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
    d = _clean(report.to_dict())
    _write_csv(out / "series.csv", _csv_rows(d["scheme"], d["records"], timings))
    if save_fields and report.fields:
        fdir = out / "fields"
        fdir.mkdir(exist_ok=True)
        for key, f in report.fields.items():
            if f is None:
                continue
            name = "reference" if key == "reference" else _tau_tag(key)
            save_field(f, fdir / f"{name}.bin")
    return out / "report.json"


def load_report(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    try:
        d = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read report {path}: {exc}") from exc
    if d.get("schema") != REPORT_SCHEMA or "records" not in d:
        raise ValueError(f"{path} is not a convergence report")
    return d


_GP_TEMPLATE = """\
# log-log L2 error against step size; generated file
set datafile separator ","
set logscale xy
set format x "2^{{%L}}"
set xlabel "tau"
set ylabel "L2 error at T"
set key bottom right
set terminal pngcairo size 900,650
set output "{png}"
c1 = {c1!r}
c34 = {c34!r}
t0 = {t0!r}
plot \\
{series}    c1 * (x / t0) title "slope 1" with lines dashtype 2 lc rgb "black", \\
    c34 * (x / t0)**0.75 title "slope 3/4" with lines dashtype 3 lc rgb "black"
"""


def emit_plot(report_paths, out) -> tuple[Path, Path]:
    """Write ``series.csv`` with every report's series and a gnuplot script.

    The script draws one log-log error curve per report plus guide lines of
    slope 1 and 3/4; nothing is plotted here.  Outputs depend only on the
    report contents, so identical inputs give identical files.
    """
    paths = [Path(p) for p in report_paths]
    if not paths:
        raise ValueError("emit_plot needs at least one report")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rows, series, anchors = [], [], []
    for p in paths:
        d = load_report(p)
        tfile = (p if p.is_dir() else p.parent) / "timings.json"
        timings = json.loads(tfile.read_text()) if tfile.exists() else {}
        scheme_rows = _csv_rows(d["scheme"], d["records"], timings)
        rows.extend(scheme_rows)
        name = d["scheme"]
        series.append(
            f'    "series.csv" using ((strcol(1) eq "{name}" && strcol(4) ne "") ? $2 : 1/0):4 '
            f'title "{d.get("label", name)}" with linespoints, \\\n'
        )
        anchors.extend(
            (r["tau"], r["error_l2"]) for r in d["records"] if r["error_l2"] is not None
        )
    _write_csv(out / "series.csv", rows)
    if anchors:
        t0 = max(t for t, _ in anchors)
        e0 = min(e for t, e in anchors if t == t0)
    else:
        t0, e0 = 1.0, 1.0
    script = _GP_TEMPLATE.format(
        png="convergence.png", c1=float(e0), c34=float(e0), t0=float(t0), series="".join(series)
    )
    (out / "plot.gp").write_text(script)
    return out / "series.csv", out / "plot.gp"
