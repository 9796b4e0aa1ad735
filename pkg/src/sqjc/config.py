"""Run configuration: a single JSON document per run.

Example (forward design)::

    {
      "mode": "forward-design",
      "n_max": 32,
      "schedules": {
        "omega":  {"type": "constant", "value": 1.0},
        "omega0": {"type": "constant", "value": 1.0},
        "gamma":  {"type": "harmonic", "amplitude": 0.2, "frequency": 0.5, "offset": 0.1}
      },
      "u0": 0.30951960420311175,
      "chi0": 0.0,
      "m": 0, "sigma": 1,
      "t_start": 0.0, "t_end": 10.0, "n_points": 201
    }

Complex numbers are written as ``[re, im]`` or ``{"re": .., "im": ..}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .schedules import CoefficientSet, Constant, Harmonic, Polynomial, Schedule, Tabulated

__all__ = ["ConfigError", "Tolerances", "RunConfig", "load_config", "parse_config", "parse_schedule"]

MODES = ("forward-design", "verify-model")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class Tolerances:
    constraint: float = 1e-8
    fidelity: float = 1e-6
    lvn: float = 1e-7
    oracle: float = 1e-6
    v_residual: float = 1e-9
    schrodinger: float = 1e-6
    commutator: float = 1e-12
    derivative: float = 1e-6
    truncation: float = 1e-8
    convergence: float = 1e-4


@dataclass(frozen=True)
class RunConfig:
    n_max: int
    mode: str
    schedules: dict
    u0: float | None = None
    chi0: float = 0.0
    m: int = 0
    sigma: int = 1
    theta0: float = math.pi / 2
    phi0: float = 0.0
    t_start: float = 0.0
    t_end: float = 10.0
    n_points: int = 201
    dt: float | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    out_dir: Path = Path("out")
    a_form: str = "corrected"

    @property
    def t_grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)

    @property
    def step(self) -> float:
        """Propagator step: explicit ``dt`` or a twentieth of the grid spacing."""
        if self.dt is not None:
            return self.dt
        return (self.t_end - self.t_start) / (self.n_points - 1) / 20

    def coefficient_set(self, lam: Schedule | None = None) -> CoefficientSet:
        s = self.schedules
        return CoefficientSet(s["omega"], s["omega0"], s["gamma"],
                              lam if lam is not None else s.get("lambda", Constant(0.0)))

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(self, **kw)
        _validate(cfg)
        return cfg


def _complex(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    if isinstance(x, dict) and set(x) <= {"re", "im"}:
        return complex(x.get("re", 0.0), x.get("im", 0.0))
    raise ConfigError(f"{where}: expected a number, [re, im] or {{'re', 'im'}}, got {x!r}")


def _real(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where}: expected a real number, got {x!r}")
    return float(x)


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where}: expected an integer, got {x!r}")
    return x


def parse_schedule(obj, where: str = "schedule") -> Schedule:
    """Build a schedule from its tagged JSON form; bare numbers are constants."""
    if not isinstance(obj, dict) or ("type" not in obj and set(obj) <= {"re", "im"}):
        return Constant(_complex(obj, where))
    kind = obj.get("type")
    try:
        if kind == "constant":
            return Constant(_complex(obj["value"], f"{where}.value"))
        if kind == "harmonic":
            return Harmonic(_complex(obj["amplitude"], f"{where}.amplitude"),
                            _real(obj["frequency"], f"{where}.frequency"),
                            _real(obj.get("phase", 0.0), f"{where}.phase"),
                            _complex(obj.get("offset", 0.0), f"{where}.offset"))
        if kind == "polynomial":
            coeffs = obj["coefficients"]
            if not isinstance(coeffs, list) or not coeffs:
                raise ConfigError(f"{where}.coefficients: expected a non-empty list")
            return Polynomial(*[_complex(c, f"{where}.coefficients[{i}]") for i, c in enumerate(coeffs)])
        if kind == "tabulated":
            times = [_real(v, f"{where}.times[{i}]") for i, v in enumerate(obj["times"])]
            values = [_complex(v, f"{where}.values[{i}]") for i, v in enumerate(obj["values"])]
            return Tabulated(np.array(times), np.array(values))
    except KeyError as exc:
        raise ConfigError(f"{where}: missing field {exc.args[0]!r}") from None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}.type: unknown schedule type {kind!r} "
                      "(expected constant, harmonic, polynomial or tabulated)")


_KNOWN = {"mode", "n_max", "schedules", "u0", "tanh_u0", "chi0", "m", "sigma", "theta0", "phi0",
          "t_start", "t_end", "n_points", "dt", "tolerances", "output", "debug"}


def parse_config(doc: dict, base_dir: Path | None = None) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a JSON object")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in ("mode", "n_max", "schedules"):
        if key not in doc:
            raise ConfigError(f"missing required field {key!r}")
    mode = doc["mode"]
    if mode not in MODES:
        raise ConfigError(f"mode: expected one of {MODES}, got {mode!r}")

    sched_doc = doc["schedules"]
    if not isinstance(sched_doc, dict):
        raise ConfigError("schedules: expected an object")
    schedules = {}
    for name in ("omega", "omega0", "gamma", "lambda"):
        if name in sched_doc:
            schedules[name] = parse_schedule(sched_doc[name], f"schedules.{name}")
    for name in ("omega", "omega0", "gamma"):
        if name not in schedules:
            raise ConfigError(f"schedules.{name}: missing")
    for name in ("omega", "omega0"):
        if not schedules[name].is_real:
            raise ConfigError(f"schedules.{name}: must be real-valued")
    extra = set(sched_doc) - {"omega", "omega0", "gamma", "lambda"}
    if extra:
        raise ConfigError(f"schedules: unknown entries {sorted(extra)}")

    u0 = None
    if "u0" in doc and "tanh_u0" in doc:
        raise ConfigError("give either u0 or tanh_u0, not both")
    if "u0" in doc:
        u0 = _real(doc["u0"], "u0")
    elif "tanh_u0" in doc:
        th = _real(doc["tanh_u0"], "tanh_u0")
        if not 0 <= th < 1:
            raise ConfigError("tanh_u0: must lie in [0, 1)")
        u0 = math.atanh(th)

    tol_doc = doc.get("tolerances", {})
    if not isinstance(tol_doc, dict):
        raise ConfigError("tolerances: expected an object")
    bad = set(tol_doc) - set(Tolerances.__dataclass_fields__)
    if bad:
        raise ConfigError(f"tolerances: unknown entries {sorted(bad)}")
    tolerances = Tolerances(**{k: _real(v, f"tolerances.{k}") for k, v in tol_doc.items()})

    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output: expected an object")
    out_dir = Path(out.get("dir", "out"))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir

    debug = doc.get("debug", {})
    a_form = debug.get("a_form", "corrected") if isinstance(debug, dict) else "corrected"
    if a_form not in ("corrected", "printed"):
        raise ConfigError(f"debug.a_form: expected 'corrected' or 'printed', got {a_form!r}")

    cfg = RunConfig(
        n_max=_int(doc["n_max"], "n_max"),
        mode=mode,
        schedules=schedules,
        u0=u0,
        chi0=_real(doc.get("chi0", 0.0), "chi0"),
        m=_int(doc.get("m", 0), "m"),
        sigma=_int(doc.get("sigma", 1), "sigma"),
        theta0=_real(doc.get("theta0", math.pi / 2), "theta0"),
        phi0=_real(doc.get("phi0", 0.0), "phi0"),
        t_start=_real(doc.get("t_start", 0.0), "t_start"),
        t_end=_real(doc.get("t_end", 10.0), "t_end"),
        n_points=_int(doc.get("n_points", 201), "n_points"),
        dt=None if doc.get("dt") is None else _real(doc["dt"], "dt"),
        tolerances=tolerances,
        out_dir=out_dir,
        a_form=a_form,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.n_max < 1:
        raise ConfigError("n_max: must be >= 1")
    if cfg.m < 0:
        raise ConfigError("m: must be >= 0")
    if cfg.n_max < 4 * (cfg.m + 1):
        raise ConfigError(f"n_max: {cfg.n_max} leaves no truncation headroom for m={cfg.m} "
                          f"(need n_max >= 4(m+1) = {4 * (cfg.m + 1)})")
    if cfg.sigma not in (1, -1):
        raise ConfigError("sigma: must be +1 or -1")
    if not cfg.t_end > cfg.t_start:
        raise ConfigError("t_end: must exceed t_start")
    if cfg.n_points < 2:
        raise ConfigError("n_points: must be >= 2")
    if cfg.dt is not None:
        spacing = (cfg.t_end - cfg.t_start) / (cfg.n_points - 1)
        if not 0 < cfg.dt <= spacing * (1 + 1e-12):
            raise ConfigError(f"dt: must lie in (0, grid spacing {spacing:.6g}]")
    if cfg.mode == "forward-design":
        if cfg.u0 is None:
            raise ConfigError("u0: required in forward-design mode (or give tanh_u0)")
        if cfg.u0 < 0:
            raise ConfigError("u0: must be >= 0")
        if "lambda" in cfg.schedules:
            raise ConfigError("schedules.lambda: not allowed in forward-design mode "
                              "(the counter-rotating coupling is derived)")
    else:
        if "lambda" not in cfg.schedules:
            raise ConfigError("schedules.lambda: required in verify-model mode")


def load_config(path) -> RunConfig:
    """Read and validate a JSON run configuration.

    Syntax errors are reported with line and column; relative output
    directories resolve against the config file's directory.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse_config(doc, base_dir=path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
