"""Scenario configuration, single runs, sweeps and file output.

A scenario is a flat JSON object. All quantities use hbar = K = 1, so
frequencies, couplings and rates share one unit and times are its inverse.

Keys (defaults in parentheses):

    name            output file stem ("scenario")
    model           "six_level" | "molecule_4level" ("six_level")
    omega_el        electron transition frequency; also omega for the molecule model (required)
    omega_c         phonon frequency (omega_el / 2)
    mu              photon inflow/outflow ratio gamma_in / gamma_out, in [0, 1) (0.4)
    gamma_out       photon loss rate; 0 disables all channels (0.1)
    g_el_0, g_el_1  electron-field couplings for nuc = 0 / 1 (6e7, 6e4)
    g_c1_amplitude, g_c0_amplitude
                    nucleus-phonon coupling amplitudes for el = 1 / 0 (4e3, 4)
    decay_rate      cooling rate of the phonon couplings (0.1)
    g0, m_ev        bare phonon coupling and mean phonon number (4, 1e6)
    ratio_threshold minimum ratio encoding ">>" in the coupling ordering (100)
    alpha, beta     oxygen / hydrogen orbital amplitudes, molecule model only
    g_mol           electron-field coupling of the molecule model
    initial_state   "000".."101" (six-level) or "0O", "1O", "0H", "1H" ("010" / "0O")
    dt, iterations, record_stride   (0.01, 6000, 10)
    seed            reserved; runs are deterministic (0)
    output_csv, output_svg   paths, relative to the output directory
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import analytic, dynamics, model
from .errors import ConfigError, ValidationError

log = logging.getLogger(__name__)

MODELS = ("six_level", "molecule_4level")
SWEEP_AXES = ("omega_el", "mu", "gamma_out", "decay_rate", "initial_state")
OUT_DIR_ENV = "CAVSIM_OUT_DIR"


@dataclass(frozen=True)
class ScenarioConfig:
    omega_el: float
    name: str = "scenario"
    model: str = "six_level"
    omega_c: float | None = None
    mu: float = 0.4
    gamma_out: float = dynamics.DEFAULT_GAMMA_OUT
    g_el_0: float = 6e7
    g_el_1: float = 6e4
    g_c1_amplitude: float = 4e3
    g_c0_amplitude: float = 4.0
    decay_rate: float = 0.1
    g0: float = 4.0
    m_ev: float = 1e6
    ratio_threshold: float = 100.0
    alpha: float | None = None
    beta: float | None = None
    g_mol: float | None = None
    initial_state: str | None = None
    dt: float = 0.01
    iterations: int = 6000
    record_stride: int = 10
    seed: int = 0
    output_csv: str | None = None
    output_svg: str | None = None

    @property
    def resolved_omega_c(self) -> float:
        return self.omega_el / 2 if self.omega_c is None else self.omega_c

    @property
    def resolved_initial_state(self) -> str:
        if self.initial_state is not None:
            return self.initial_state
        return "0O" if self.model == "molecule_4level" else "010"

    def params(self) -> model.ModelParams | model.MoleculeParams:
        if self.model == "molecule_4level":
            return model.MoleculeParams(self.omega_el, self.g_mol, self.alpha, self.beta)
        schedule = model.CouplingSchedule(
            g_el_0=self.g_el_0,
            g_el_1=self.g_el_1,
            g_c1_amplitude=self.g_c1_amplitude,
            g_c0_amplitude=self.g_c0_amplitude,
            decay_rate=self.decay_rate,
            g0=self.g0,
            m_ev=self.m_ev,
            ratio_threshold=self.ratio_threshold,
        )
        return model.ModelParams(self.omega_el, self.resolved_omega_c, self.mu, schedule)

    def channels(self) -> list[dynamics.LindbladChannel]:
        if self.gamma_out == 0:
            return []
        return dynamics.default_channels(self.params(), self.gamma_out)

    def integrator(self) -> dynamics.IntegratorConfig:
        return dynamics.IntegratorConfig(self.dt, self.iterations, self.record_stride)

    def replace(self, **changes) -> ScenarioConfig:
        return validate_config(dataclasses.replace(self, **changes))

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_INT_KEYS = {"iterations", "record_stride", "seed"}
_STR_KEYS = {"name", "model", "initial_state", "output_csv", "output_svg"}
_SCHEDULE_KEYS = ("g_el_0", "g_el_1", "g_c1_amplitude", "g_c0_amplitude", "decay_rate", "g0", "m_ev")


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {type(value).__name__}", key)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", key)
    if key in _INT_KEYS:
        if int(value) != value:
            raise ConfigError(f"expected an integer, got {value!r}", key)
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", key)
    return value


def config_from_dict(data: dict[str, Any], strict: bool = True) -> ScenarioConfig:
    """Build and validate a config from a parsed JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        if strict:
            raise ConfigError(f"unknown key (allowed: {', '.join(sorted(_FIELDS))})", unknown[0])
        log.warning("ignoring unknown config keys: %s", ", ".join(unknown))
    if "omega_el" not in data:
        raise ConfigError("required key missing", "omega_el")
    kwargs = {k: _coerce(k, v) for k, v in data.items() if k in _FIELDS}
    return validate_config(ScenarioConfig(**kwargs))


def _positive(cfg: ScenarioConfig, key: str, allow_zero: bool = False) -> None:
    v = getattr(cfg, key)
    if v is None or v < 0 or (v == 0 and not allow_zero):
        raise ConfigError(f"must be {'>= 0' if allow_zero else '> 0'}, got {v}", key)


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every invariant and return ``cfg``; raise ``ConfigError`` naming the key."""
    if cfg.model not in MODELS:
        raise ConfigError(f"must be one of {MODELS}, got {cfg.model!r}", "model")
    _positive(cfg, "omega_el")
    _positive(cfg, "gamma_out", allow_zero=True)
    _positive(cfg, "dt")
    if cfg.iterations < 1:
        raise ConfigError("must be >= 1", "iterations")
    if cfg.record_stride < 1:
        raise ConfigError("must be >= 1", "record_stride")
    if cfg.model == "six_level":
        if cfg.omega_c is not None:
            _positive(cfg, "omega_c")
        if not 0 <= cfg.mu < 1:
            raise ConfigError(f"must lie in [0, 1), got {cfg.mu}", "mu")
        for key in ("alpha", "beta", "g_mol"):
            if getattr(cfg, key) is not None:
                raise ConfigError("only valid for model molecule_4level", key)
        try:
            cfg.params()
        except ValidationError as exc:
            raise ConfigError(str(exc), "/".join(_SCHEDULE_KEYS)) from None
        try:
            model.BasisLabel.parse(cfg.resolved_initial_state)
        except ValidationError as exc:
            raise ConfigError(str(exc), "initial_state") from None
    else:
        for key in ("alpha", "beta", "g_mol"):
            if getattr(cfg, key) is None:
                raise ConfigError("required for model molecule_4level", key)
        _positive(cfg, "g_mol", allow_zero=True)
        if not cfg.alpha > cfg.beta >= 0:
            raise ConfigError(f"need alpha > beta >= 0, got {cfg.alpha}, {cfg.beta}", "alpha")
        if cfg.resolved_initial_state.strip("|>⟩ ") not in model.MOLECULE_LABELS:
            raise ConfigError(f"must be one of {model.MOLECULE_LABELS}", "initial_state")
    try:
        cfg.params()
        cfg.integrator()
        channels = cfg.channels()
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    top = max((c.rate for c in channels), default=0.0)
    if top * cfg.dt > dynamics.EULER_GUARD:
        raise ConfigError(
            f"rate * dt = {top * cfg.dt:.3g} exceeds {dynamics.EULER_GUARD}; "
            f"use dt <= {dynamics.EULER_GUARD / top:.3g}",
            "dt",
        )
    return cfg


def load_config(path: str | os.PathLike, strict: bool = True) -> ScenarioConfig:
    """Read a JSON scenario file.

    Raises:
        ConfigError: on parse errors, unknown keys (when ``strict``), bad types
            or invariant violations.
        OSError: if the file cannot be read.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data, strict=strict)


# ---------------------------------------------------------------------------
# presets


def preset_names() -> list[str]:
    files = resources.files("cavsim").joinpath("presets").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".json"))


def load_preset(name: str) -> ScenarioConfig:
    if name not in preset_names():
        raise ConfigError(f"unknown preset (available: {', '.join(preset_names())})", "preset")
    text = resources.files("cavsim").joinpath("presets", f"{name}.json").read_text(encoding="utf-8")
    return config_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_header(traj: dynamics.Trajectory) -> list[str]:
    cols = ["t"] + [f"p{lab}" for lab in traj.labels] + ["trace", "purity"]
    if traj.model == "six_level":
        return cols + ["p_bound", "p_dissociated"]
    return cols + ["p_oxygen_numeric", "p_oxygen_analytic"]


def trajectory_columns(
    traj: dynamics.Trajectory, params: model.ModelParams | model.MoleculeParams
) -> np.ndarray:
    cols = [traj.times, *traj.probabilities.T, traj.trace, traj.purity]
    if traj.model == "six_level":
        cols += list(dynamics.reaction_channel_probabilities(traj))
    else:
        cols += [traj.column("0O") + traj.column("1O"), analytic.p_oxygen(params, traj.times)]
    return np.column_stack(cols)


def render_csv(traj: dynamics.Trajectory, params) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(traj))
    for row in trajectory_columns(traj, params):
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def write_svg(traj: dynamics.Trajectory, path: Path, title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for j, lab in enumerate(traj.labels):
        ax.plot(traj.times, traj.probabilities[:, j], label=f"|{lab}⟩", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("probability")
    ax.set_title(title)
    ax.set_ylim(-0.02, 1.02)
    ax.legend(ncol=3, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "cavsim_out"))


@dataclass
class RunResult:
    config: ScenarioConfig
    trajectory: dynamics.Trajectory
    csv_path: Path | None
    svg_path: Path | None


def run_scenario(
    cfg: ScenarioConfig, out_dir: str | os.PathLike | None = None, plot: bool = True, write: bool = True
) -> RunResult:
    """Integrate ``cfg`` and write its CSV (and SVG when ``plot``).

    Raises:
        IntegrationError: propagated from the integrator.
        OSError: on write failures.
    """
    params = cfg.params()
    traj = dynamics.evolve(params, cfg.channels(), cfg.resolved_initial_state, cfg.integrator())
    csv_path = svg_path = None
    if write:
        out = Path(out_dir) if out_dir is not None else default_out_dir()
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / (cfg.output_csv or f"{cfg.name}.csv")
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(traj, params))
        if plot:
            svg_path = out / (cfg.output_svg or f"{cfg.name}.svg")
            write_svg(traj, svg_path, cfg.name)
    return RunResult(cfg, traj, csv_path, svg_path)


# ---------------------------------------------------------------------------
# sweeps


def parse_sweep_values(axis: str, values: Sequence[Any]) -> list[Any]:
    if axis not in SWEEP_AXES:
        raise ConfigError(f"must be one of {SWEEP_AXES}", "axis")
    if len(values) == 0:
        raise ConfigError("at least one value is required", "values")
    if axis == "initial_state":
        return [str(v).strip() for v in values]
    out = []
    for v in values:
        try:
            out.append(float(v))
        except (TypeError, ValueError):
            raise ConfigError(f"not a number: {v!r}", "values") from None
    return out


def sweep_configs(base: ScenarioConfig, axis: str, values: Sequence[Any]) -> list[ScenarioConfig]:
    """One validated config per value; everything is checked before any run."""
    if base.model != "six_level":
        raise ConfigError("sweeps summarize reaction channels and need model six_level", "model")
    vals = parse_sweep_values(axis, values)
    configs = []
    for v in vals:
        tag = str(v).replace(".", "p") if axis != "initial_state" else str(v).strip("|>⟩ ")
        try:
            configs.append(base.replace(**{axis: v, "name": f"{base.name}_{axis}_{tag}",
                                           "output_csv": None, "output_svg": None}))
        except ConfigError as exc:
            raise ConfigError(f"value {v!r}: {exc.reason}", f"values[{axis}]") from None
    return configs


def _sweep_worker(job):
    cfg, out_dir, plot = job
    res = run_scenario(cfg, out_dir, plot=plot)
    bound, free = dynamics.reaction_channel_probabilities(res.trajectory)
    return float(bound[-1]), float(free[-1]), dynamics.oscillation_amplitude(res.trajectory), res.csv_path


def run_sweep(
    base: ScenarioConfig,
    axis: str,
    values: Sequence[Any],
    out_dir: str | os.PathLike | None = None,
    plot: bool = False,
    workers: int | None = None,
) -> Path:
    """Run ``base`` once per value of ``axis`` and write ``<name>_sweep_<axis>.csv``.

    Summary columns: value, final_p_bound, final_p_dissociated,
    oscillation_amplitude (max - min of p_bound over the last half).
    """
    configs = sweep_configs(base, axis, values)
    out = Path(out_dir) if out_dir is not None else default_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(c, out, plot) for c in configs]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]
    summary = out / f"{base.name}_sweep_{axis}.csv"
    with open(summary, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "final_p_bound", "final_p_dissociated", "oscillation_amplitude", "csv"])
        for cfg, (pb, pd, amp, path) in zip(configs, results):
            v = getattr(cfg, axis)
            w.writerow([v if isinstance(v, str) else _fmt(v), _fmt(pb), _fmt(pd), _fmt(amp), path.name])
    return summary
