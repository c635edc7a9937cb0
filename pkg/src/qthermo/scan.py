"""Configuration-driven scans: time sweeps, difference modes, N-scaling fits.

All scan tasks are pure functions of their grid cell; the engine may fan them
out over a thread pool and always gathers results back into config order, so
output files are byte-identical regardless of the worker count.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .channel import BathSpec, evolve_ensemble
from .diagnostics import local_coherence, local_temperature, negativity, purity
from .errors import ConfigError
from .metrology import m1_m2, max_qfi_over_time, qfi_of_state, thermal_asymptote
from .operators import DensityMatrix, partial_trace
from .states import StateSpec, build_state, min_qubits, productized

OUTPUTS = ("qfi", "purity", "negativity", "local_temperature", "local_coherence", "bound")
DIFF_MODES = ("peak_minus_asymptote", "correlated_minus_productized")
STATE_PARAMS = ("a", "r", "phi", "eta", "mu", "alpha", "k", "chi", "theta")

UNITS_NOTE = "hbar = omega = k_B = 1; time in units of 1/omega"


@dataclass(frozen=True)
class TimeGridSpec:
    points: int = 400
    t_max: float = 0.0  # 0 means auto: 20 / (smallest relaxation rate in the beta grid)


@dataclass(frozen=True)
class ScanConfig:
    betas: tuple[float, ...]
    gamma: float
    base: StateSpec
    vary: tuple[tuple[str, tuple], ...]
    outputs: tuple[str, ...]
    time: TimeGridSpec


@dataclass(frozen=True)
class DiffConfig:
    mode: str
    betas: tuple[float, ...]
    gamma: float
    base: StateSpec
    vary: tuple[tuple[str, tuple], ...]
    time: TimeGridSpec


@dataclass(frozen=True)
class ScalingConfig:
    beta: float
    gamma: float
    n_min: int
    n_max: int
    states: tuple[tuple[str, StateSpec], ...]  # (label, template; n_qubits ignored)
    time: TimeGridSpec


@dataclass
class ScanTable:
    columns: list[str]
    rows: list[tuple]
    meta: dict

    def to_csv(self) -> str:
        lines = [f"# qthermo v{__version__}"]
        lines.append("# config: " + json.dumps(self.meta, sort_keys=True, separators=(",", ":")))
        lines.append(f"# units: {UNITS_NOTE}")
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(x) for x in row))
        return "\n".join(lines) + "\n"

    def write(self, path: str) -> None:
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def default_t_max(betas, gamma: float) -> float:
    slowest = min(gamma / math.tanh(b / 2.0) for b in betas)
    return 20.0 / slowest


def resolve_time_grid(time: TimeGridSpec, betas, gamma: float) -> np.ndarray:
    t_max = time.t_max if time.t_max > 0 else default_t_max(betas, gamma)
    return np.linspace(0.0, t_max, time.points)


# ---------------------------------------------------------------------------
# config file parsing


def load_toml(path: str) -> dict:
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}")


def _reject_unknown(table: dict, allowed, where: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{where}]")


def _betas(table: dict) -> tuple[float, ...]:
    raw = table.get("beta")
    if raw is None:
        raise ConfigError("missing key 'beta' in [bath]")
    vals = raw if isinstance(raw, list) else [raw]
    if not vals:
        raise ConfigError("'beta' grid in [bath] must be nonempty")
    out = []
    for v in vals:
        if not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"'beta' values must be positive numbers, got {v!r}")
        out.append(float(v))
    return tuple(out)


def _bath(table: dict) -> tuple[tuple[float, ...], float]:
    _reject_unknown(table, {"beta", "gamma"}, "bath")
    gamma = float(table.get("gamma", 1.0))
    if not gamma > 0:
        raise ConfigError(f"'gamma' must be positive, got {gamma}")
    return _betas(table), gamma


def _time(table: dict) -> TimeGridSpec:
    _reject_unknown(table, {"points", "t_max"}, "time")
    points = int(table.get("points", 400))
    if points < 2:
        raise ConfigError(f"'points' must be >= 2, got {points}")
    t_max = float(table.get("t_max", 0.0))
    if t_max < 0:
        raise ConfigError(f"'t_max' must be >= 0, got {t_max}")
    return TimeGridSpec(points=points, t_max=t_max)


def _state(table: dict) -> tuple[StateSpec, tuple[tuple[str, tuple], ...]]:
    allowed = {"family", "n_qubits", "label", "vary", *STATE_PARAMS}
    _reject_unknown(table, allowed, "state")
    if "family" not in table:
        raise ConfigError("missing key 'family' in [state]")
    fixed = {k: table[k] for k in STATE_PARAMS if k in table}
    try:
        base = StateSpec(family=table["family"], n_qubits=int(table.get("n_qubits", 2)), **fixed)
    except ValueError as exc:
        raise ConfigError(f"invalid [state]: {exc}")
    vary_table = table.get("vary", {})
    vary = []
    for name, values in vary_table.items():
        if name not in STATE_PARAMS:
            raise ConfigError(f"cannot vary unknown state parameter {name!r}")
        if not isinstance(values, list) or not values:
            raise ConfigError(f"varied parameter {name!r} needs a nonempty list of values")
        for v in values:
            try:
                replace(base, **{name: v})
            except ValueError as exc:
                raise ConfigError(f"invalid value {v!r} for varied parameter {name!r}: {exc}")
        vary.append((name, tuple(values)))
    return base, tuple(vary)


def parse_scan_config(doc: dict) -> ScanConfig:
    _reject_unknown(doc, {"scan", "bath", "state", "time"}, "<root>")
    head = doc.get("scan", {})
    _reject_unknown(head, {"outputs"}, "scan")
    outputs = tuple(head.get("outputs", ["qfi"]))
    if not outputs:
        raise ConfigError("'outputs' in [scan] must be nonempty")
    for name in outputs:
        if name not in OUTPUTS:
            raise ConfigError(f"unknown output {name!r}; expected a subset of {OUTPUTS}")
    if "bath" not in doc:
        raise ConfigError("missing [bath] table")
    if "state" not in doc:
        raise ConfigError("missing [state] table")
    betas, gamma = _bath(doc["bath"])
    base, vary = _state(doc["state"])
    return ScanConfig(betas, gamma, base, vary, outputs, _time(doc.get("time", {})))


def parse_diff_config(doc: dict) -> DiffConfig:
    _reject_unknown(doc, {"diff", "bath", "state", "time"}, "<root>")
    head = doc.get("diff", {})
    _reject_unknown(head, {"mode"}, "diff")
    mode = head.get("mode")
    if mode not in DIFF_MODES:
        raise ConfigError(f"'mode' in [diff] must be one of {DIFF_MODES}, got {mode!r}")
    if "bath" not in doc:
        raise ConfigError("missing [bath] table")
    if "state" not in doc:
        raise ConfigError("missing [state] table")
    betas, gamma = _bath(doc["bath"])
    base, vary = _state(doc["state"])
    return DiffConfig(mode, betas, gamma, base, vary, _time(doc.get("time", {})))


def parse_scaling_config(doc: dict) -> ScalingConfig:
    _reject_unknown(doc, {"scaling", "bath", "time", "states"}, "<root>")
    head = doc.get("scaling", {})
    _reject_unknown(head, {"n_min", "n_max"}, "scaling")
    n_min = int(head.get("n_min", 1))
    n_max = int(head.get("n_max", 6))
    if n_min < 1 or n_max < 2 or n_min > n_max:
        raise ConfigError(f"need 1 <= n_min <= n_max and n_max >= 2, got {n_min}..{n_max}")
    if "bath" not in doc:
        raise ConfigError("missing [bath] table")
    betas, gamma = _bath(doc["bath"])
    if len(betas) != 1:
        raise ConfigError("scaling runs use a single beta value")
    entries = doc.get("states", [])
    if not entries:
        raise ConfigError("missing [[states]] entries")
    states = []
    for entry in entries:
        base, vary = _state(entry)
        if vary:
            raise ConfigError("scaling state entries cannot contain [vary]")
        label = entry.get("label") or _default_label(base)
        if "," in label:
            raise ConfigError(f"state label {label!r} must not contain a comma")
        states.append((label, base))
    if len({label for label, _ in states}) != len(states):
        raise ConfigError("state labels must be unique")
    return ScalingConfig(betas[0], gamma, n_min, n_max, tuple(states), _time(doc.get("time", {})))


def _default_label(spec: StateSpec) -> str:
    params = spec.relevant_params()
    if not params:
        return spec.family
    inner = ";".join(f"{k}={_fmt(v) if not isinstance(v, str) else v}" for k, v in params.items())
    return f"{spec.family}({inner})"


# ---------------------------------------------------------------------------
# scan execution


def _spec_meta(spec: StateSpec, skip=()) -> dict:
    d = {"family": spec.family, "n_qubits": spec.n_qubits}
    d.update({k: v for k, v in spec.relevant_params().items() if k not in skip})
    return d


def _run_cells(cells, worker, threads: int):
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(cells) <= 1:
        return [worker(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, cells))


def _combos(vary):
    names = [name for name, _ in vary]
    for values in itertools.product(*(vals for _, vals in vary)):
        yield dict(zip(names, values))


def run_time_scan(cfg: ScanConfig, threads: int = 1) -> ScanTable:
    grid = resolve_time_grid(cfg.time, cfg.betas, cfg.gamma)
    vary_names = [name for name, _ in cfg.vary]
    cells = [(beta, combo) for beta in cfg.betas for combo in _combos(cfg.vary)]

    def worker(cell):
        beta, combo = cell
        bath = BathSpec(beta, cfg.gamma)
        spec = replace(cfg.base, **combo)
        rho_in = build_state(spec)
        rows = []
        for t in grid:
            evolved = evolve_ensemble(rho_in, bath, float(t))
            fixed = [beta, *[combo[n] for n in vary_names], float(t)]
            rows.append(tuple(fixed + [_output(name, rho_in, evolved, bath, float(t)) for name in cfg.outputs]))
        return rows

    rows = [row for cell_rows in _run_cells(cells, worker, threads) for row in cell_rows]
    meta = {
        "kind": "scan",
        "bath": {"beta": list(cfg.betas), "gamma": cfg.gamma},
        "state": _spec_meta(cfg.base, skip=[n for n, _ in cfg.vary]),
        "vary": {name: list(vals) for name, vals in cfg.vary},
        "time": {"points": cfg.time.points, "t_max": float(grid[-1])},
        "outputs": list(cfg.outputs),
    }
    return ScanTable(["beta", *vary_names, "t", *cfg.outputs], rows, meta)


def _output(name: str, rho_in: DensityMatrix, evolved: DensityMatrix, bath: BathSpec, t: float):
    if name == "qfi":
        return qfi_of_state(rho_in, bath, t)
    if name == "purity":
        return purity(evolved)
    if name == "negativity":
        return negativity(evolved) if evolved.n_qubits > 1 else 0.0
    if name == "local_temperature":
        red = partial_trace(evolved, {0}) if evolved.n_qubits > 1 else evolved
        return local_temperature(red)
    if name == "local_coherence":
        red = partial_trace(evolved, {0}) if evolved.n_qubits > 1 else evolved
        return local_coherence(red)
    if name == "bound":
        if t == 0.0:
            return math.nan  # Kraus derivatives are singular at t = 0
        return m1_m2(bath, t).bound_value(evolved.n_qubits)
    raise ConfigError(f"unknown output {name!r}")


def run_difference_scan(cfg: DiffConfig, threads: int = 1) -> ScanTable:
    grid = resolve_time_grid(cfg.time, cfg.betas, cfg.gamma)
    vary_names = [name for name, _ in cfg.vary]
    cells = [(beta, combo) for beta in cfg.betas for combo in _combos(cfg.vary)]

    if cfg.mode == "peak_minus_asymptote":
        columns = ["beta", *vary_names, "qfi_peak", "asymptote", "difference"]

        def worker(cell):
            beta, combo = cell
            bath = BathSpec(beta, cfg.gamma)
            rho_in = build_state(replace(cfg.base, **combo))
            peak = max_qfi_over_time(rho_in, bath, grid)
            # the supremum over the closed horizon [0, inf] includes the
            # asymptotic limit, so the difference is never negative
            best = max(peak.peak_value, peak.asymptote)
            return [
                tuple(
                    [beta, *[combo[n] for n in vary_names]]
                    + [best, peak.asymptote, best - peak.asymptote]
                )
            ]

    else:  # correlated_minus_productized
        columns = ["beta", *vary_names, "t", "qfi_correlated", "qfi_productized", "difference"]

        def worker(cell):
            beta, combo = cell
            bath = BathSpec(beta, cfg.gamma)
            rho_corr = build_state(replace(cfg.base, **combo))
            rho_prod = productized(rho_corr)
            rows = []
            for t in grid:
                qc = qfi_of_state(rho_corr, bath, float(t))
                qp = qfi_of_state(rho_prod, bath, float(t))
                rows.append(
                    tuple([beta, *[combo[n] for n in vary_names], float(t), qc, qp, qc - qp])
                )
            return rows

    rows = [row for cell_rows in _run_cells(cells, worker, threads) for row in cell_rows]
    meta = {
        "kind": "diff",
        "mode": cfg.mode,
        "bath": {"beta": list(cfg.betas), "gamma": cfg.gamma},
        "state": _spec_meta(cfg.base, skip=[n for n, _ in cfg.vary]),
        "vary": {name: list(vals) for name, vals in cfg.vary},
        "time": {"points": cfg.time.points, "t_max": float(grid[-1])},
    }
    return ScanTable(columns, rows, meta)


# ---------------------------------------------------------------------------
# N-scaling protocol


@dataclass(frozen=True)
class ScalingFit:
    label: str
    t_star: float
    n_values: tuple[int, ...]
    qfi_values: tuple[float, ...]
    slope: float
    intercept: float
    slope_stderr: float | None
    residual_max: float


@dataclass
class ScalingReport:
    beta: float
    gamma: float
    n_min: int
    n_max: int
    time_points: int
    t_max: float
    fits: list[ScalingFit]

    def to_json(self) -> str:
        doc = {
            "kind": "scaling",
            "bath": {"beta": self.beta, "gamma": self.gamma},
            "n_min": self.n_min,
            "n_max": self.n_max,
            "time": {"points": self.time_points, "t_max": self.t_max},
            "fits": [asdict(f) for f in self.fits],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write_json(self, path: str) -> None:
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    def points_table(self) -> ScanTable:
        rows = []
        for f in self.fits:
            for n, q in zip(f.n_values, f.qfi_values):
                rows.append((f.label, float(n), q, f.t_star, f.slope, f.intercept))
        meta = {
            "kind": "scaling",
            "bath": {"beta": self.beta, "gamma": self.gamma},
            "n_min": self.n_min,
            "n_max": self.n_max,
            "time": {"points": self.time_points, "t_max": self.t_max},
            "states": [f.label for f in self.fits],
        }
        return ScanTable(["state", "n", "qfi", "t_star", "slope", "intercept"], rows, meta)


def ols_fit(x, y) -> tuple[float, float, float | None, float]:
    """Free-intercept least squares: slope, intercept, slope stderr, max residual."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sxx = float(np.sum((x - x.mean()) ** 2))
    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - slope * x - intercept
    resid_max = float(np.max(np.abs(resid)))
    if x.size <= 2 or resid_max <= 1e-9:
        stderr = None  # exactly linear data carries no slope uncertainty
    else:
        s2 = float(np.sum(resid**2) / (x.size - 2))
        stderr = math.sqrt(s2 / sxx)
    return slope, intercept, stderr, resid_max


def t_star(rho_in: DensityMatrix, bath: BathSpec, grid: np.ndarray) -> float:
    """Peak time of the QFI: coarse argmax, then a 4x denser local pass."""
    coarse = max_qfi_over_time(rho_in, bath, grid)
    dt = float(grid[1] - grid[0])
    lo = max(coarse.t_peak - dt, float(grid[0]))
    hi = min(coarse.t_peak + dt, float(grid[-1]))
    fine = np.linspace(lo, hi, max(int(round((hi - lo) / (dt / 4.0))) + 1, 5))
    return max_qfi_over_time(rho_in, bath, fine).t_peak


def run_n_scaling(cfg: ScalingConfig, threads: int = 1) -> ScalingReport:
    bath = BathSpec(cfg.beta, cfg.gamma)
    grid = resolve_time_grid(cfg.time, (cfg.beta,), cfg.gamma)

    def worker(entry):
        label, template = entry
        n_lo = max(cfg.n_min, min_qubits(template.family))
        if n_lo > cfg.n_max:
            raise ConfigError(f"family {template.family!r} needs more qubits than n_max={cfg.n_max}")
        rho_big = build_state(replace(template, n_qubits=cfg.n_max))
        ts = t_star(rho_big, bath, grid)
        ns = list(range(n_lo, cfg.n_max + 1))
        qs = [qfi_of_state(build_state(replace(template, n_qubits=n)), bath, ts) for n in ns]
        slope, intercept, stderr, resid_max = ols_fit(ns, qs)
        return ScalingFit(label, ts, tuple(ns), tuple(qs), slope, intercept, stderr, resid_max)

    fits = _run_cells(list(cfg.states), worker, threads)
    return ScalingReport(
        beta=cfg.beta,
        gamma=cfg.gamma,
        n_min=cfg.n_min,
        n_max=cfg.n_max,
        time_points=cfg.time.points,
        t_max=float(grid[-1]),
        fits=list(fits),
    )
