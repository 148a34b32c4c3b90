"""Parameter sweeps: config parsing, point evaluation, CSV output and figure presets."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .measurement import MeasurementConfig, output_state, success_probability, weak_value
from .observables import (
    autocorrelation,
    closed_form_moments,
    cross_correlation,
    epr_correlation,
    hz_correlation,
    initial_epr_correlation,
    initial_hz_correlation,
    oracle_moments,
    quadrature_squeezing,
    sum_squeezing,
)
from .specfun import ConvergenceError
from .teleport import (
    MeshResolutionError,
    TeleportConfig,
    avg_fidelity_closed,
    avg_fidelity_numeric,
    output_fidelity_closed,
    state_fidelity,
)
from .twomode import (
    PcsParams,
    TruncationError,
    TruncationSpec,
    displace_mode,
    headroom_needed,
    inner,
    pcs_state,
)
from .wigner import Axis, PhaseGrid, scaled_joint_wigner, wigner_cut_2d, wigner_cut_diag

__all__ = [
    "ConfigError",
    "QUANTITIES",
    "SweepSpec",
    "parse_config",
    "sweep_values",
    "evaluate_point",
    "run_sweep",
    "PRESETS",
    "run_figure",
    "format_params",
    "selftest",
]

QUANTITIES = (
    "Q1",
    "Q2",
    "SumSqueezing",
    "CrossCorr",
    "AutoCorrA",
    "AutoCorrB",
    "HZ",
    "DeltaHZ",
    "EPR",
    "DeltaEPR",
    "StateFidelity",
    "AvgFidelityClosed",
    "AvgFidelityNumeric",
    "SuccessProb",
    "WignerCut2D",
    "WignerDiag",
)
WIGNER_QUANTITIES = ("WignerCut2D", "WignerDiag")

# physical parameters a sweep can fix or vary, with their defaults
PARAM_DEFAULTS = {
    "gamma_re": 1.0,
    "gamma_im": 0.0,
    "delta": 0,
    "coupling": 0.0,
    "alpha": 8.0 * math.pi / 9.0,
    "vartheta": 0.0,
    "varpi": 0.0,
    "input_re": 0.0,
    "input_im": 0.0,
}
SWEEPABLE = tuple(PARAM_DEFAULTS)
DEFAULT_AXIS_COUNT = {"WignerCut2D": 81, "WignerDiag": 201}

# failures that turn a sweep point into a NaN row instead of aborting the run
NUMERICAL_ERRORS = (ArithmeticError, ConvergenceError, TruncationError, MeshResolutionError, ValueError)


class ConfigError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class SweepSpec:
    """A fully resolved sweep.

    ``fixed`` holds every physical parameter except the swept one. Wigner
    quantities ignore the sweep fields and sample ``plane`` / ``axis`` instead.
    """

    quantity: str
    fixed: dict = field(default_factory=dict)
    sweep: str = "gamma_re"
    sweep_min: float = 0.1
    sweep_max: float = 5.0
    sweep_count: int = 50
    sweep_scale: str = "linear"
    oracle_check: bool = False
    plane: str = "ReRe"
    axis_min: float = -3.0
    axis_max: float = 3.0
    axis_count: int | None = None
    tail_prob: float = 1e-12

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"unknown quantity {self.quantity!r}; choose from {', '.join(QUANTITIES)}")
        fixed = dict(PARAM_DEFAULTS)
        for k, v in self.fixed.items():
            if k not in PARAM_DEFAULTS:
                raise ConfigError(f"unknown parameter {k!r}")
            fixed[k] = v
        if self.is_wigner:
            object.__setattr__(self, "fixed", fixed)
        else:
            if self.sweep not in SWEEPABLE:
                raise ConfigError(f"cannot sweep {self.sweep!r}; choose from {', '.join(SWEEPABLE)}")
            if self.sweep in self.fixed:
                raise ConfigError(f"swept parameter {self.sweep!r} is also given a fixed value")
            fixed.pop(self.sweep)
            object.__setattr__(self, "fixed", fixed)
            if int(self.sweep_count) != self.sweep_count or self.sweep_count < 2:
                raise ConfigError(f"sweep_count must be an integer >= 2, got {self.sweep_count!r}")
            if self.sweep_scale not in ("linear", "log"):
                raise ConfigError(f"sweep_scale must be 'linear' or 'log', got {self.sweep_scale!r}")
            if not self.sweep_min < self.sweep_max:
                raise ConfigError("sweep_min must be below sweep_max")
            if self.sweep_scale == "log" and self.sweep_min <= 0:
                raise ConfigError("log sweeps need sweep_min > 0")
        if self.axis_count is None:
            object.__setattr__(self, "axis_count", DEFAULT_AXIS_COUNT.get(self.quantity, 81))
        try:
            TruncationSpec(self.tail_prob)
            if self.is_wigner:
                Axis(self.axis_min, self.axis_max, self.axis_count)
                PhaseGrid(Axis(0, 1, 2), Axis(0, 1, 2), self.plane)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self._check_ranges()

    @property
    def is_wigner(self) -> bool:
        return self.quantity in WIGNER_QUANTITIES

    def _check_ranges(self):
        """Check every sweep point against the measurement and PCS invariants."""
        points = [self.fixed] if self.is_wigner else [self.point(v) for v in (self.sweep_min, self.sweep_max)]
        for prm in points:
            try:
                PcsParams(complex(prm["gamma_re"], prm["gamma_im"]), prm["delta"])
            except ValueError as exc:
                raise ConfigError(f"range violation (pair coherent state): {exc}") from None
            try:
                MeasurementConfig(prm["alpha"], prm["vartheta"], prm["coupling"])
            except ValueError as exc:
                raise ConfigError(f"range violation (measurement invariant): {exc}") from None
        if self.sweep == "delta" and not self.is_wigner:
            vals = sweep_values(self)
            if np.any(vals != np.round(vals)):
                raise ConfigError("a delta sweep must land on integers; adjust sweep_count")

    def point(self, value) -> dict:
        prm = dict(self.fixed)
        if not self.is_wigner:
            prm[self.sweep] = value
        return prm

    def resolved(self) -> dict:
        """Every setting as an ordered ``name -> value`` map."""
        out = {"quantity": self.quantity}
        out.update(self.fixed)
        if self.is_wigner:
            out.update(plane=self.plane, axis_min=self.axis_min, axis_max=self.axis_max, axis_count=self.axis_count)
        else:
            out.update(
                sweep=self.sweep,
                sweep_min=self.sweep_min,
                sweep_max=self.sweep_max,
                sweep_count=self.sweep_count,
                sweep_scale=self.sweep_scale,
            )
        out.update(oracle_check=self.oracle_check, tail_prob=self.tail_prob)
        return out


def _params(prm: dict) -> tuple[PcsParams, MeasurementConfig]:
    p = PcsParams(complex(prm["gamma_re"], prm["gamma_im"]), prm["delta"])
    return p, MeasurementConfig(prm["alpha"], prm["vartheta"], prm["coupling"])


def sweep_values(spec: SweepSpec) -> np.ndarray:
    if spec.sweep_scale == "log":
        vals = np.geomspace(spec.sweep_min, spec.sweep_max, spec.sweep_count)
    else:
        vals = np.linspace(spec.sweep_min, spec.sweep_max, spec.sweep_count)
    if spec.sweep == "delta":
        return np.round(vals, 9)
    return vals


# -- config files ---------------------------------------------------------------

_FLOAT_KEYS = set(PARAM_DEFAULTS) - {"delta"} | {"sweep_min", "sweep_max", "axis_min", "axis_max", "tail_prob"}
_INT_KEYS = {"delta", "sweep_count", "axis_count"}
_STR_KEYS = {"quantity", "sweep", "sweep_scale", "plane"}
_BOOL_KEYS = {"oracle_check"}
CONFIG_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS | _BOOL_KEYS
_DERIVED_KEYS = {"weak_value": "the weak value is derived from alpha (and vartheta); set alpha instead"}


def _convert(key: str, text: str):
    if key in _FLOAT_KEYS:
        v = float(text)
        if not math.isfinite(v):
            raise ValueError("value must be finite")
        return v
    if key in _INT_KEYS:
        v = float(text)
        if v != int(v):
            raise ValueError("value must be an integer")
        return int(v)
    if key in _BOOL_KEYS:
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("value must be true or false")
    if not text:
        raise ValueError("value is empty")
    return text


def parse_config_text(text: str) -> dict:
    """``key = value`` lines with ``#`` comments into a dict of typed values.

    Errors name the line and column they occur at.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ConfigError(f"line {lineno}, column {col}: expected key=value")
        key_part, val_part = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        val_col = len(key_part) + 2 + len(val_part) - len(val_part.lstrip())
        if key in _DERIVED_KEYS:
            raise ConfigError(f"line {lineno}, column {key_col}: key {key!r} rejected: {_DERIVED_KEYS[key]}")
        if key not in CONFIG_KEYS:
            raise ConfigError(
                f"line {lineno}, column {key_col}: unknown key {key!r}; known keys: {', '.join(sorted(CONFIG_KEYS))}"
            )
        if key in out:
            raise ConfigError(f"line {lineno}, column {key_col}: duplicate key {key!r}")
        try:
            out[key] = _convert(key, val_part.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}, column {val_col}: bad value for {key!r}: {exc}") from None
    return out


def spec_from_mapping(cfg: dict) -> SweepSpec:
    cfg = dict(cfg)
    fixed = {k: cfg.pop(k) for k in list(cfg) if k in PARAM_DEFAULTS}
    cfg.setdefault("quantity", "Q2")
    return SweepSpec(fixed=fixed, **cfg)


def parse_config(path) -> SweepSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_mapping(parse_config_text(fh.read()))


# -- evaluation -----------------------------------------------------------------

_MOMENT_WITNESSES = {
    "Q1": lambda m, prm: quadrature_squeezing(m, 1),
    "Q2": lambda m, prm: quadrature_squeezing(m, 2),
    "SumSqueezing": lambda m, prm: sum_squeezing(m, prm["varpi"]),
    "CrossCorr": lambda m, prm: cross_correlation(m),
    "AutoCorrA": lambda m, prm: autocorrelation(m, "a"),
    "AutoCorrB": lambda m, prm: autocorrelation(m, "b"),
    "HZ": lambda m, prm: hz_correlation(m),
    "EPR": lambda m, prm: epr_correlation(m),
}
_DELTAS = {"DeltaHZ": (hz_correlation, initial_hz_correlation), "DeltaEPR": (epr_correlation, initial_epr_correlation)}


def _closed(quantity: str, p, cfg, prm, t) -> float:
    if quantity in _MOMENT_WITNESSES:
        return _MOMENT_WITNESSES[quantity](closed_form_moments(p, cfg), prm)
    if quantity in _DELTAS:
        witness, initial = _DELTAS[quantity]
        return witness(closed_form_moments(p, cfg)) - initial(p)
    if quantity == "StateFidelity":
        return output_fidelity_closed(p, cfg)
    if quantity == "AvgFidelityClosed":
        return avg_fidelity_closed(p, cfg)
    if quantity == "AvgFidelityNumeric":
        tc = TeleportConfig(complex(prm["input_re"], prm["input_im"]))
        return avg_fidelity_numeric(output_state(p, cfg, t), tc)
    if quantity == "SuccessProb":
        return success_probability(p, cfg)
    raise ConfigError(f"{quantity} is not a pointwise quantity")


def _oracle(quantity: str, p, cfg, prm, t) -> float:
    if quantity in _MOMENT_WITNESSES:
        return _MOMENT_WITNESSES[quantity](oracle_moments(output_state(p, cfg, t)), prm)
    if quantity in _DELTAS:
        witness, _ = _DELTAS[quantity]
        before = oracle_moments(pcs_state(p, t))
        return witness(oracle_moments(output_state(p, cfg, t))) - witness(before)
    if quantity == "StateFidelity":
        return state_fidelity(pcs_state(p, t, coupling=cfg.coupling), output_state(p, cfg, t))
    if quantity == "AvgFidelityClosed":
        tc = TeleportConfig(complex(prm["input_re"], prm["input_im"]))
        return avg_fidelity_numeric(output_state(p, cfg, t), tc)
    if quantity == "AvgFidelityNumeric":
        return avg_fidelity_closed(p, cfg)
    if quantity == "SuccessProb":
        phi = pcs_state(p, t, coupling=cfg.coupling)
        overlap = inner(phi, displace_mode(phi, "a", cfg.coupling)).real
        a2 = abs(weak_value(cfg)) ** 2
        return 0.5 * math.cos(0.5 * cfg.alpha) ** 2 * (1.0 + a2 + (1.0 - a2) * overlap)
    raise ConfigError(f"{quantity} is not a pointwise quantity")


def evaluate_point(quantity: str, prm: dict, oracle_check: bool = False, tail_prob: float = 1e-12):
    """``(value, deviation)`` at one parameter point; ``deviation`` is
    ``|closed form - oracle|`` (``None`` without ``oracle_check``)."""
    p, cfg = _params(prm)
    t = TruncationSpec(tail_prob)
    value = _closed(quantity, p, cfg, prm, t)
    if not oracle_check:
        return value, None
    return value, abs(value - _oracle(quantity, p, cfg, prm, t))


def _safe_point(args):
    quantity, prm, oracle_check, tail_prob = args
    try:
        value, dev = evaluate_point(quantity, prm, oracle_check, tail_prob)
        if not math.isfinite(value) or (dev is not None and not math.isfinite(dev)):
            raise ArithmeticError("non-finite result")
        return value, dev, None
    except NUMERICAL_ERRORS as exc:
        return math.nan, (math.nan if oracle_check else None), f"{type(exc).__name__}: {exc}"


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# -- CSV ------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def format_params(spec: SweepSpec) -> str:
    items = [f"pcslab={__version__}"] + [f"{k}={_fmt(v)}" for k, v in spec.resolved().items()]
    return "# params: " + " ".join(items)


def _write_csv(path, header: str, columns: list[str], rows) -> None:
    lines = [header, ",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run_sweep(spec: SweepSpec, out_path, workers: int = 1) -> list[str]:
    """Evaluate the sweep and write one CSV; returns the warning messages
    (one per failed point, each such row holding NaN)."""
    if spec.is_wigner:
        return _run_wigner(spec, out_path, workers)
    values = sweep_values(spec)
    jobs = [(spec.quantity, spec.point(_fmt_value(spec.sweep, v)), spec.oracle_check, spec.tail_prob) for v in values]
    results = _map(_safe_point, jobs, workers)
    columns = [spec.sweep, spec.quantity] + (["max_abs_deviation"] if spec.oracle_check else [])
    rows, problems = [], []
    for v, (value, dev, err) in zip(values, results):
        rows.append([_fmt_value(spec.sweep, v), value] + ([dev] if spec.oracle_check else []))
        if err:
            problems.append(f"{spec.sweep}={_fmt(v)}: {err}")
    _write_csv(out_path, format_params(spec), columns, rows)
    for msg in problems:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return problems


def _fmt_value(name: str, v):
    return int(round(v)) if name == "delta" else float(v)


def _run_wigner(spec: SweepSpec, out_path, workers: int) -> list[str]:
    prm = spec.fixed
    p, cfg = _params(prm)
    t = TruncationSpec(spec.tail_prob)
    axis = Axis(spec.axis_min, spec.axis_max, spec.axis_count)
    state = output_state(p, cfg, t)
    amp = (lambda x: complex(x)) if spec.plane == "ReRe" else (lambda x: 1j * x)
    if spec.quantity == "WignerCut2D":
        cut = wigner_cut_2d(state, PhaseGrid(axis, axis, spec.plane), workers=workers)
        xs = axis.values()
        columns = ["x1", "x2", "P_J"]
        rows = []
        padded = _padded(state, axis) if spec.oracle_check else None
        for i, x1 in enumerate(xs):
            for j, x2 in enumerate(xs):
                row = [x1, x2, cut.values[i, j]]
                if spec.oracle_check:
                    row.append(abs(cut.values[i, j] - scaled_joint_wigner(padded, amp(x1), amp(x2))))
                rows.append(row)
    else:
        ts, vals = wigner_cut_diag(state, spec.plane, axis)
        columns = ["t", "P_J"]
        rows = []
        padded = _padded(state, axis)
        for x, v in zip(ts, vals):
            row = [x, v]
            if spec.oracle_check:
                row.append(abs(v - scaled_joint_wigner(padded, amp(x), amp(x))))
            rows.append(row)
    if spec.oracle_check:
        columns.append("max_abs_deviation")
    _write_csv(out_path, format_params(spec), columns, rows)
    return []


def _padded(state, axis: Axis):
    reach = max(abs(axis.min), abs(axis.max))
    extra = headroom_needed(reach)
    return state.padded(state.highest_occupied("a") + 1 + extra, state.highest_occupied("b") + 1 + extra)


# -- figure presets ---------------------------------------------------------------

ANOMALOUS = 8.0 * math.pi / 9.0
COUPLINGS = (0.0, 0.3, 0.5, 0.7, 1.0)
ALPHA_RANGE = (0.0, 0.95 * math.pi)


def _gamma_curves(quantity, gmin, gmax, count, couplings=COUPLINGS, oracle=True, **fixed):
    return [
        (
            f"Gamma{g:g}",
            SweepSpec(quantity, dict(coupling=g, alpha=ANOMALOUS, **fixed), "gamma_re", gmin, gmax, count,
                      oracle_check=oracle),
        )
        for g in couplings
    ]


def _alpha_curves(quantity, couplings=COUPLINGS, count=96, oracle=True, **fixed):
    return [
        (
            f"Gamma{g:g}",
            SweepSpec(quantity, dict(coupling=g, **fixed), "alpha", *ALPHA_RANGE, count, oracle_check=oracle),
        )
        for g in couplings
    ]


def _delta_curves(quantity, sweep, lo, hi, count, gamma=None):
    out = []
    for d in (0, 1, 2, 3):
        fixed = dict(coupling=0.3, delta=d)
        if sweep == "gamma_re":
            fixed["alpha"] = ANOMALOUS
        else:
            fixed["gamma_re"] = gamma
        out.append((f"delta{d}", SweepSpec(quantity, fixed, sweep, lo, hi, count, oracle_check=True)))
    return out


def _wigner(quantity, plane, **fixed):
    return SweepSpec(quantity, dict(gamma_re=0.5, alpha=ANOMALOUS, **fixed), plane=plane, oracle_check=quantity == "WignerDiag")


# alpha values for the coloured teleportation curves (labelled by alpha/pi)
TELEPORT_ALPHAS = (1.0 / 3.0, 0.5, 2.0 / 3.0, 8.0 / 9.0)


def _teleport_gamma(delta):
    curves = [
        ("initial", SweepSpec("AvgFidelityClosed", dict(coupling=0.0, delta=delta), "gamma_re", 0.05, 3.0, 60,
                              oracle_check=True))
    ]
    for a in TELEPORT_ALPHAS:
        curves.append(
            (
                f"alpha{a:.4g}pi",
                SweepSpec("AvgFidelityClosed", dict(coupling=1.0, delta=delta, alpha=a * math.pi), "gamma_re",
                          0.05, 3.0, 60, oracle_check=True),
            )
        )
    return curves


PRESETS = {
    # Q1 against gamma for several couplings
    "fig2": ("Q1 vs gamma, delta=0, alpha=8pi/9", lambda: _gamma_curves("Q1", 0.1, 20.0, 200)),
    # Q2 against gamma; the Gamma=0.3 curve carries the deepest squeezing
    "fig3a": ("Q2 vs gamma, delta=0, alpha=8pi/9", lambda: _gamma_curves("Q2", 0.1, 30.0, 300)),
    "fig3b": ("Q2 vs alpha, gamma=10", lambda: _alpha_curves("Q2", gamma_re=10.0)),
    "fig4a": ("sum squeezing vs gamma, varpi=0", lambda: _gamma_curves("SumSqueezing", 0.05, 5.0, 100)),
    "fig4b": ("sum squeezing vs alpha, gamma=0.5", lambda: _alpha_curves("SumSqueezing", gamma_re=0.5)),
    "fig5": ("cross correlation vs gamma", lambda: _gamma_curves("CrossCorr", 0.05, 10.0, 200)),
    "fig7a": ("g2 of mode a vs gamma", lambda: _gamma_curves("AutoCorrA", 0.05, 10.0, 200)),
    "fig7b": ("g2 of mode b vs gamma", lambda: _gamma_curves("AutoCorrB", 0.05, 10.0, 200)),
    "fig7-1a": ("Delta HZ vs gamma for delta 0..3, Gamma=0.3", lambda: _delta_curves("DeltaHZ", "gamma_re", 0.1, 5.0, 100)),
    "fig7-1b": ("Delta HZ vs alpha, gamma=1.5, Gamma=0.3",
                lambda: _delta_curves("DeltaHZ", "alpha", *ALPHA_RANGE, 96, gamma=1.5)),
    "fig8a": ("Delta EPR vs gamma for delta 0..3, Gamma=0.3", lambda: _delta_curves("DeltaEPR", "gamma_re", 0.1, 5.0, 100)),
    "fig8b": ("Delta EPR vs alpha, gamma=1.5, Gamma=0.3",
              lambda: _delta_curves("DeltaEPR", "alpha", *ALPHA_RANGE, 96, gamma=1.5)),
    "fig10": (
        "Wigner plane cuts of the bare PCS, gamma=0.5",
        lambda: [
            (f"delta{d}_{pl}", _wigner("WignerCut2D", pl, delta=d, coupling=0.0))
            for d in (0, 2)
            for pl in ("ReRe", "ImIm")
        ],
    ),
    "fig11-1": (
        "Wigner cuts after measurement, gamma=0.5, delta=2, Gamma=0.3",
        lambda: [(f"{pl}", _wigner("WignerCut2D", pl, delta=2, coupling=0.3)) for pl in ("ReRe", "ImIm")]
        + [(f"diag_{pl}", _wigner("WignerDiag", pl, delta=2, coupling=0.3)) for pl in ("ReRe", "ImIm")],
    ),
    "fig11": ("state fidelity to the bare PCS vs gamma",
              lambda: _gamma_curves("StateFidelity", 0.05, 10.0, 200, couplings=COUPLINGS[1:])),
    "fig12a": ("teleportation fidelity vs gamma, delta=0", lambda: _teleport_gamma(0)),
    "fig12b": ("teleportation fidelity vs gamma, delta=1", lambda: _teleport_gamma(1)),
    "fig12c": ("teleportation fidelity vs alpha, gamma=3",
               lambda: _alpha_curves("AvgFidelityClosed", couplings=COUPLINGS[1:], count=48, gamma_re=3.0)),
    "fig13": ("postselection success probability vs alpha, gamma=2",
              lambda: _alpha_curves("SuccessProb", couplings=COUPLINGS[1:], gamma_re=2.0)),
}


def preset_curves(fig_id: str) -> list[tuple[str, SweepSpec]]:
    if fig_id not in PRESETS:
        raise ConfigError(f"unknown figure {fig_id!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[fig_id][1]()


def run_figure(fig_id: str, out_dir, workers: int = 1) -> tuple[list[str], list[str]]:
    """Write ``<fig>_<curve>.csv`` for every curve; returns (paths, warnings)."""
    os.makedirs(out_dir, exist_ok=True)
    paths, problems = [], []
    for label, spec in preset_curves(fig_id):
        path = os.path.join(out_dir, f"{fig_id}_{label}.csv")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            problems += [f"{label}: {m}" for m in run_sweep(spec, path, workers)]
        paths.append(path)
    return paths, problems


# -- self test ----------------------------------------------------------------------

SELFTEST_DRAWS = 50
SELFTEST_SEED = 20240611
SELFTEST_TOL = 1e-8


def _selftest_draws(n: int, seed: int) -> list[dict]:
    """Random parameter points over the range the closed forms are checked on."""
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(n):
        g = rng.uniform(0.1, 3.0) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        draws.append(
            dict(
                gamma_re=float(g.real),
                gamma_im=float(g.imag),
                delta=int(rng.integers(0, 4)),
                coupling=float(rng.uniform(0.0, 1.5)),
                alpha=float(rng.uniform(0.0, 0.95 * math.pi)),
                vartheta=float(rng.uniform(0.0, 2.0 * math.pi)),
            )
        )
    return draws


def _selftest_point(prm: dict) -> float:
    """Largest relative deviation between series and grid moments."""
    p, cfg = _params({**PARAM_DEFAULTS, **prm})
    cf = closed_form_moments(p, cfg)
    orc = oracle_moments(output_state(p, cfg, TruncationSpec(1e-14)))
    return max(abs(cf[k] - orc[k]) / max(abs(orc[k]), 1e-12) for k in cf.values)


def selftest(out_path, workers: int = 1, draws: int = SELFTEST_DRAWS, seed: int = SELFTEST_SEED) -> tuple[int, int]:
    """Compare the twelve closed-form moments with the Fock-grid oracle on
    random draws and write one CSV row per draw; returns (passed, total)."""
    points = _selftest_draws(draws, seed)
    devs = _map(_selftest_point, points, workers)
    keys = list(points[0])
    rows = [[i] + [pt[k] for k in keys] + [d, int(d < SELFTEST_TOL)] for i, (pt, d) in enumerate(zip(points, devs))]
    header = f"# params: pcslab={__version__} draws={draws} seed={seed} tolerance={_fmt(SELFTEST_TOL)}"
    _write_csv(out_path, header, ["draw"] + keys + ["max_rel_deviation", "pass"], rows)
    return sum(r[-1] for r in rows), len(rows)
