"""Batch front door: scenario configs in, CSV time series and a JSON report out.

Configs are flat ``key = value`` lines with dotted key paths (no nesting, no
quoting), chosen so diffs stay reviewable and parsing needs nothing beyond
the standard library.  Each experiment writes one CSV (comma separated, LF
endings, 17 significant digits so doubles round-trip losslessly) plus a
report echoing the scenario and summarizing every numeric series.  Identical
config and seed produce byte-identical CSV.
"""

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .errors import DeclabError, ParseError, ValidationError
from .models import (
    ArakiZurekModel,
    SpectralDensity,
    SpinModel,
    az_evolve,
    decoherence_function,
    spin_asymptotics,
    spin_evolve,
)
from .states import (
    DensityOperator,
    alternate_decomposition,
    bloch_to_density,
    density_to_bloch,
    haar_unitary,
    random_density,
    spectral_decomposition,
)
from .superselection import (
    block_diagonal_sectors,
    fit_power_law_decay,
    off_diagonal_norms,
    sector_probabilities,
)

EXPERIMENTS = ("araki_zurek", "spin", "spin_asymptotics", "chi_scan", "decompose_demo")
_TIMED = ("araki_zurek", "spin", "spin_asymptotics", "chi_scan")


@dataclass
class ScenarioConfig:
    """Validated scenario: experiment kind plus the objects it runs on."""

    experiment: str
    raw: dict
    out_csv: str
    out_report: str
    seed: Optional[int] = None
    t_grid: Optional[np.ndarray] = None
    env: Optional[SpectralDensity] = None
    model: Optional[object] = None
    initial_state: Optional[DensityOperator] = None
    initial_bloch: Optional[np.ndarray] = None
    fit_delta: float = 1.0
    fit_window: Optional[tuple] = None
    demo_dim: int = 4


@dataclass
class RunReport:
    """Everything a run produced, reproducible from the emitted CSV."""

    scenario: dict
    csv_path: str
    report_path: str
    series: dict
    decay_fit: Optional[dict]
    wall_time_s: float
    version: str = __version__

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "csv": self.csv_path,
            "series": self.series,
            "decay_fit": self.decay_fit,
            "wall_time_s": self.wall_time_s,
            "version": self.version,
        }


def _parse_lines(text: str) -> dict:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(lineno, f"expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParseError(lineno, "empty key")
        if key in entries:
            raise ParseError(lineno, f"duplicate key {key!r}")
        entries[key] = value
    return entries


class _Entries:
    """Typed, consumed-key-tracking view of the raw key/value map."""

    def __init__(self, raw):
        self.raw = raw
        self.used = set()

    def get(self, key, default=None):
        self.used.add(key)
        return self.raw.get(key, default)

    def require(self, key):
        if key not in self.raw:
            raise ValidationError(key, "missing required key")
        return self.get(key)

    def floats(self, key, count=None):
        text = self.require(key)
        try:
            values = [float(x) for x in text.split(",")]
        except ValueError:
            raise ValidationError(key, f"expected comma-separated numbers, got {text!r}")
        if count is not None and len(values) != count:
            raise ValidationError(key, f"expected {count} values, got {len(values)}")
        return values

    def number(self, key, kind=float, default=None):
        if key not in self.raw and default is not None:
            return default
        text = self.require(key)
        try:
            return kind(text)
        except ValueError:
            raise ValidationError(key, f"expected a {kind.__name__}, got {text!r}")

    def unknown(self):
        return sorted(set(self.raw) - self.used)


def _parse_env(e: _Entries) -> SpectralDensity:
    kind = e.require("env.kind")
    try:
        if kind == "gaussian":
            return SpectralDensity.gaussian(e.number("env.s"))
        if kind in ("uniform", "bump"):
            a = e.number("env.a")
            b = e.number("env.b")
            ctor = SpectralDensity.uniform if kind == "uniform" else SpectralDensity.bump
            return ctor(a, b)
        if kind == "discrete":
            text = e.require("env.points")
            pairs = []
            for chunk in text.split(","):
                v, _, w = chunk.partition(":")
                pairs.append((float(v), float(w)))
            return SpectralDensity.discrete(np.asarray(pairs))
    except ValidationError:
        raise
    except (ValueError, DeclabError) as exc:
        raise ValidationError("env", str(exc))
    raise ValidationError("env.kind", f"unknown kind {kind!r}")


def _parse_complex_matrix(e: _Entries, key: str, dim: int) -> np.ndarray:
    text = e.require(key)
    try:
        entries = [complex(x.strip()) for x in text.split(",")]
    except ValueError:
        raise ValidationError(key, f"expected comma-separated complex numbers, got {text!r}")
    if len(entries) != dim * dim:
        raise ValidationError(key, f"expected {dim * dim} entries for a {dim}x{dim} matrix")
    return np.asarray(entries, dtype=complex).reshape(dim, dim)


def _parse_t_grid(e: _Entries) -> np.ndarray:
    start = e.number("t_grid.start")
    stop = e.number("t_grid.stop")
    count = e.number("t_grid.count", kind=int)
    if count < 2:
        raise ValidationError("t_grid.count", "need at least 2 grid points")
    if start < 0:
        raise ValidationError("t_grid.start", "start must be nonnegative")
    if not stop > start:
        raise ValidationError("t_grid.stop", "stop must exceed start")
    return np.linspace(start, stop, count)


def _parse_initial(e: _Entries, cfg: ScenarioConfig, dim: int, bloch_only: bool):
    has_matrix = "initial.matrix" in e.raw
    has_bloch = "initial.bloch" in e.raw
    if bloch_only or (has_bloch and not has_matrix):
        p = np.asarray(e.floats("initial.bloch", 3))
        if np.linalg.norm(p) > 1 + 1e-12:
            raise ValidationError("initial.bloch", "polarization vector outside the unit ball")
        cfg.initial_bloch = p
        cfg.initial_state = bloch_to_density(p)
        return
    if not has_matrix:
        raise ValidationError("initial.matrix", "missing required key")
    mat = _parse_complex_matrix(e, "initial.matrix", dim)
    try:
        cfg.initial_state = DensityOperator(mat)
    except DeclabError as exc:
        raise ValidationError("initial.matrix", str(exc))


def parse_config(text) -> ScenarioConfig:
    """Parse and validate scenario text (bytes or str) into a ScenarioConfig.

    Raises ParseError with the offending line, or ValidationError with the
    offending dotted key path.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    raw = _parse_lines(text)
    e = _Entries(raw)

    experiment = e.require("experiment")
    if experiment not in EXPERIMENTS:
        raise ValidationError("experiment", f"unknown experiment {experiment!r}")

    cfg = ScenarioConfig(
        experiment=experiment,
        raw=dict(raw),
        out_csv=e.get("out.csv", f"{experiment}.csv"),
        out_report=e.get("out.report", f"{experiment}_report.json"),
    )
    if "seed" in raw:
        cfg.seed = e.number("seed", kind=int)

    if experiment in _TIMED:
        cfg.t_grid = _parse_t_grid(e)
        cfg.env = _parse_env(e)

    if experiment == "araki_zurek":
        dims = [int(v) for v in e.floats("model.sector_dims")]
        if any(d < 1 for d in dims):
            raise ValidationError("model.sector_dims", "sector dimensions must be positive")
        lambdas = e.floats("model.lambdas")
        if len(lambdas) != len(dims):
            raise ValidationError("model.lambdas", "need one eigenvalue per sector")
        delta = e.number("model.delta")
        dim = sum(dims)
        if "model.h_s" in raw:
            h_s = _parse_complex_matrix(e, "model.h_s", dim)
        else:
            h_s = np.zeros((dim, dim))
        try:
            cfg.model = ArakiZurekModel(
                block_diagonal_sectors(dims), lambdas, h_s, cfg.env, delta
            )
        except (DeclabError, ValueError) as exc:
            raise ValidationError("model", str(exc))
        _parse_initial(e, cfg, dim, bloch_only=False)
    elif experiment in ("spin", "spin_asymptotics"):
        a = e.floats("model.a", 3)
        b = e.number("model.b")
        lam = e.number("model.lam")
        try:
            cfg.model = SpinModel(a=np.asarray(a), b=b, lam=lam, env_diag=cfg.env)
        except ValueError as exc:
            raise ValidationError("model.b", str(exc))
        _parse_initial(e, cfg, 2, bloch_only=True)
        if experiment == "spin_asymptotics":
            cfg.fit_delta = e.number("fit.delta", default=1.0)
            if cfg.fit_delta <= 0:
                raise ValidationError("fit.delta", "delta must be positive")
            if "fit.window" in raw:
                lo, hi = e.floats("fit.window", 2)
                cfg.fit_window = (lo, hi)
    elif experiment == "decompose_demo":
        cfg.demo_dim = e.number("demo.dim", kind=int, default=4)
        if cfg.demo_dim < 2:
            raise ValidationError("demo.dim", "dimension must be at least 2")
        if cfg.seed is None:
            raise ValidationError("seed", "decompose_demo draws random states; a seed is required")

    leftover = e.unknown()
    if leftover:
        raise ValidationError(leftover[0], "unknown key")
    return cfg


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _atomic_write(path: str, data: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _series_summary(header, rows) -> dict:
    summary = {}
    for j, name in enumerate(header):
        values = []
        for row in rows:
            if isinstance(row[j], str):
                break
            # Summarize what lands in the file: round-trip the formatted text.
            values.append(float(_fmt(row[j])))
        else:
            if values:
                summary[name] = {
                    "min": min(values),
                    "max": max(values),
                    "final": values[-1],
                }
    return summary


def _run_araki_zurek(cfg):
    model = cfg.model
    rho0 = cfg.initial_state
    header = ["t", "offdiag_hs", "offdiag_tr"]
    header += [f"prob_{i}" for i in range(len(model.sectors))]
    header += ["chi_re", "chi_im"]
    gap = model.lambdas[0] - model.lambdas[1] if len(model.lambdas) > 1 else 0.0
    rows = []
    for t in cfg.t_grid:
        rho_t = az_evolve(model, rho0, t)
        norms = off_diagonal_norms(rho_t, model.sectors)
        probs = sector_probabilities(rho_t, model.sectors)
        chi = decoherence_function(model.env, gap * t)
        rows.append([t, norms.hs, norms.trace, *probs, chi.real, chi.imag])
    return header, rows, None


def _run_spin(cfg):
    header = ["t", "p_x", "p_y", "p_z"]
    rows = []
    for t in cfg.t_grid:
        p = density_to_bloch(spin_evolve(cfg.model, cfg.initial_bloch, t))
        rows.append([t, *p])
    return header, rows, None


def _run_spin_asymptotics(cfg):
    samples = spin_asymptotics(cfg.model, cfg.initial_bloch, cfg.t_grid)
    rows = [[t, d] for t, d in samples]
    fit = fit_power_law_decay(samples, cfg.fit_delta, cfg.fit_window)
    fit_dict = {
        "C": fit.C,
        "delta": fit.delta,
        "gamma": fit.gamma,
        "window": list(fit.window),
        "residual": fit.residual,
        "superpolynomial": fit.superpolynomial,
    }
    return ["t", "trace_dist"], rows, fit_dict


def _run_chi_scan(cfg):
    rows = []
    for t in cfg.t_grid:
        chi = decoherence_function(cfg.env, t)
        rows.append([t, chi.real, chi.imag, abs(chi)])
    return ["t", "chi_re", "chi_im", "chi_abs"], rows, None


def _run_decompose_demo(cfg):
    rng = np.random.default_rng(cfg.seed)
    w = random_density(cfg.demo_dim, rng)
    unitary = haar_unitary(cfg.demo_dim, rng)
    spectral = spectral_decomposition(w)
    alternate = alternate_decomposition(w, unitary)
    rows = []
    for i, weight in enumerate(spectral.weights):
        rows.append(["spectral", i, weight, 0.0])
    for i, (weight, proj) in enumerate(zip(alternate.weights, alternate.projectors)):
        dist = min(
            float(np.linalg.norm(proj.matrix - sp.matrix)) for sp in spectral.projectors
        )
        rows.append(["alternate", i, weight, dist])
    return ["kind", "index", "weight", "min_dist_to_spectral"], rows, None


_RUNNERS = {
    "araki_zurek": _run_araki_zurek,
    "spin": _run_spin,
    "spin_asymptotics": _run_spin_asymptotics,
    "chi_scan": _run_chi_scan,
    "decompose_demo": _run_decompose_demo,
}


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[str] = None) -> RunReport:
    """Run the configured experiment; write its CSV and JSON report."""
    started = time.perf_counter()
    header, rows, fit_dict = _RUNNERS[cfg.experiment](cfg)

    if out_dir is not None:
        csv_path = os.path.join(out_dir, os.path.basename(cfg.out_csv))
        report_path = os.path.join(out_dir, os.path.basename(cfg.out_report))
    else:
        csv_path = cfg.out_csv
        report_path = cfg.out_report
    _write_csv(csv_path, header, rows)

    report = RunReport(
        scenario=cfg.raw,
        csv_path=csv_path,
        report_path=report_path,
        series=_series_summary(header, rows),
        decay_fit=fit_dict,
        wall_time_s=time.perf_counter() - started,
    )
    _atomic_write(report_path, json.dumps(report.as_dict(), indent=2) + "\n")
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="declab", description="Decoherence and induced-superselection laboratory."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a scenario and write CSV + report")
    run_p.add_argument("--config", required=True, help="scenario config file")
    run_p.add_argument("--out", default=None, help="directory overriding the output paths")
    val_p = sub.add_parser("validate", help="check a scenario config and exit")
    val_p.add_argument("--config", required=True, help="scenario config file")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "rb") as handle:
            cfg = parse_config(handle.read())
    except (ParseError, ValidationError) as exc:
        print(f"declab: invalid config: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"declab: cannot read config: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        print(f"{args.config}: OK ({cfg.experiment})")
        return 0

    try:
        report = run_scenario(cfg, out_dir=args.out)
    except (DeclabError, OSError) as exc:
        print(f"declab: run failed: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {report.csv_path} and {report.report_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
