"""Strict line-oriented scenario configuration.

Format: `[section]` headers and `key = value` pairs, `#` comments.  Unknown
sections or keys, duplicate keys and type mismatches are rejected with the
offending line number.  Vectors are whitespace-separated numbers; matrices
use `;` between rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .dynamics import FieldConfig, ModelKind
from .errors import ConfigError
from .units import FINE_STRUCTURE, ModelConstants, derived_constants

SCENARIO_KINDS = (
    "constants",
    "trajectory",
    "lindblad-demo",
    "kinetic",
    "wigner-demo",
    "estimate",
    "validate",
)

_MODEL_NAMES = {k.value: k for k in ModelKind}


def _parse_float(s: str) -> float:
    return float(s)


def _parse_int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError("not an integer")
    return int(v)


def _parse_bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError("not a boolean")


def _parse_vec3(s: str) -> np.ndarray:
    parts = s.split()
    if len(parts) != 3:
        raise ValueError("expected 3 components")
    return np.array([float(p) for p in parts])


def _parse_mat3(s: str) -> np.ndarray:
    rows = [r.strip() for r in s.split(";")]
    if len(rows) != 3:
        raise ValueError("expected 3 rows separated by ';'")
    return np.array([_parse_vec3(r) for r in rows])


def _parse_str(s: str) -> str:
    return s.strip()


def _parse_span(s: str) -> tuple:
    """min max n triple for a grid axis."""
    parts = s.split()
    if len(parts) != 3:
        raise ValueError("expected 'min max n'")
    lo, hi, n = float(parts[0]), float(parts[1]), _parse_int(parts[2])
    if not (hi > lo) or n < 4:
        raise ValueError("need max > min and n >= 4")
    return (lo, hi, n)


SCHEMA = {
    "scenario": {"kind": _parse_str},
    "constants": {
        "alpha": _parse_float,
        "m": _parse_float,
        "tau0": _parse_float,
        "sigma": _parse_float,
        "sigma_minus": _parse_float,
    },
    "field": {"B0": _parse_vec3, "gradB": _parse_mat3, "x0": _parse_vec3},
    "initial": {
        "x": _parse_vec3,
        "pi": _parse_vec3,
        "gamma0": _parse_float,
        "direction": _parse_vec3,
        "mean_x": _parse_vec3,
        "mean_pi": _parse_vec3,
        "sigma_x": _parse_vec3,
        "sigma_pi": _parse_vec3,
    },
    "numerics": {
        "model": _parse_str,
        "dt": _parse_float,
        "steps": _parse_int,
        "record_every": _parse_int,
        "mode": _parse_str,
        "particles": _parse_int,
        "seed": _parse_int,
        "grid_x": _parse_span,
        "grid_pi": _parse_span,
        "frozen": _parse_bool,
        "frozen_F": _parse_vec3,
        "frozen_v": _parse_vec3,
        "frozen_gamma": _parse_float,
        "dump_grid": _parse_bool,
        "packet": _parse_vec3,
        "packet2": _parse_vec3,
        "x_span": _parse_span,
        "sigma_plus": _parse_float,
        "p": _parse_vec3,
        "e_ratio": _parse_float,
        "gamma": _parse_float,
        "dp": _parse_float,
    },
    "output": {"directory": _parse_str, "format": _parse_str},
}

DEFAULTS = {
    "scenario": {"kind": "trajectory"},
    "constants": {"alpha": FINE_STRUCTURE, "m": 1.0},
    "field": {
        "B0": np.array([0.0, 0.0, 1e-3]),
        "gradB": np.zeros((3, 3)),
        "x0": np.zeros(3),
    },
    "initial": {
        "x": np.zeros(3),
        "gamma0": 10.0,
        "direction": np.array([1.0, 0.0, 0.0]),
        "mean_x": np.zeros(3),
        "mean_pi": np.zeros(3),
        "sigma_x": np.array([0.35, 0.35, 0.35]),
        "sigma_pi": np.array([0.22, 0.22, 0.22]),
    },
    "numerics": {
        "model": "lorentz",
        "dt": 10.0,
        "steps": 1000,
        "record_every": 1,
        "mode": "both",
        "particles": 10000,
        "seed": 2024,
        "grid_x": (-3.0, 3.0, 128),
        "grid_pi": (-2.0, 2.0, 128),
        "frozen": False,
        "frozen_F": np.array([0.6, 0.0, 0.0]),
        "frozen_v": np.array([0.8, 0.0, 0.0]),
        "frozen_gamma": 2.0,
        "dump_grid": False,
        "packet": np.array([0.0, 1.0, 1.0]),
        "x_span": (-12.0, 12.0, 256),
        "sigma_plus": 0.05,
        "p": np.zeros(3),
        "e_ratio": 1e-3,
        "gamma": 10.0,
        "dp": 1.0,
    },
    "output": {"directory": "out", "format": "csv"},
}


@dataclass
class ScenarioConfig:
    kind: str
    constants: ModelConstants
    field: FieldConfig
    sections: dict = dc_field(default_factory=dict)

    @property
    def initial(self) -> dict:
        return self.sections["initial"]

    @property
    def numerics(self) -> dict:
        return self.sections["numerics"]

    @property
    def output(self) -> dict:
        return self.sections["output"]

    def initial_pi(self) -> np.ndarray:
        init = self.initial
        m = self.constants.m
        if "pi" in init and init.get("_pi_explicit", False):
            return init["pi"]
        gamma0 = init["gamma0"]
        if gamma0 < 1.0:
            raise ConfigError("gamma0 must be >= 1", key="gamma0")
        d = init["direction"]
        nrm = float(np.linalg.norm(d))
        if nrm == 0.0:
            raise ConfigError("direction must be nonzero", key="direction")
        speed = np.sqrt(1.0 - 1.0 / gamma0**2)
        return m * gamma0 * speed * d / nrm

    def model_kind(self) -> ModelKind:
        name = self.numerics["model"]
        if name not in _MODEL_NAMES:
            raise ConfigError(
                f"unknown model '{name}' (choose from {sorted(_MODEL_NAMES)})", key="model"
            )
        return _MODEL_NAMES[name]

    def echo(self) -> dict:
        """Effective configuration with defaults applied, JSON-ready."""

        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, tuple):
                return list(v)
            return v

        out = {}
        for sec, kv in self.sections.items():
            out[sec] = {k: conv(v) for k, v in kv.items() if not k.startswith("_")}
        return out


def _all_finite(value) -> bool:
    if isinstance(value, (bool, str)):
        return True
    if isinstance(value, np.ndarray):
        return bool(np.isfinite(value).all())
    if isinstance(value, tuple):
        return all(_all_finite(v) for v in value)
    return bool(np.isfinite(value))


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate a configuration document."""
    raw: dict = {}
    section = None
    seen_sections = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigError("malformed section header", line=lineno)
            name = body[1:-1].strip()
            if name not in SCHEMA:
                raise ConfigError(f"unknown section '{name}'", line=lineno)
            if name in seen_sections:
                raise ConfigError(f"duplicate section '{name}'", line=lineno)
            seen_sections.add(name)
            section = name
            raw[section] = {}
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", line=lineno)
        if section is None:
            raise ConfigError("key outside any [section]", line=lineno)
        key, value = body.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key in [{section}]", line=lineno, key=key)
        if key in raw[section]:
            raise ConfigError("duplicate key", line=lineno, key=key)
        try:
            parsed = SCHEMA[section][key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value ({exc})", line=lineno, key=key) from None
        if not _all_finite(parsed):
            raise ConfigError("non-finite value", line=lineno, key=key)
        raw[section][key] = (parsed, lineno)

    sections: dict = {}
    for sec, defaults in DEFAULTS.items():
        sections[sec] = dict(defaults)
        for key, (value, lineno) in raw.get(sec, {}).items():
            sections[sec][key] = value
    for key in ("pi",):
        if key in raw.get("initial", {}):
            sections["initial"]["_pi_explicit"] = True
            sections["initial"]["pi"] = raw["initial"][key][0]

    kind = sections["scenario"]["kind"]
    if kind not in SCENARIO_KINDS:
        line = raw.get("scenario", {}).get("kind", (None, None))[1]
        raise ConfigError(f"unknown scenario kind '{kind}'", line=line, key="kind")

    cdict = sections["constants"]
    consts = derived_constants(alpha=cdict["alpha"], m=cdict["m"])
    overrides = {k: cdict[k] for k in ("tau0", "sigma", "sigma_minus") if k in cdict}
    if overrides:
        consts = ModelConstants(
            alpha=consts.alpha,
            m=consts.m,
            lambda_bar=consts.lambda_bar,
            tau0=overrides.get("tau0", consts.tau0),
            sigma=overrides.get("sigma", consts.sigma),
            sigma_minus=overrides.get("sigma_minus", consts.sigma_minus),
            E_cr=consts.E_cr,
        )

    fdict = sections["field"]
    try:
        fieldcfg = FieldConfig(fdict["B0"], fdict["gradB"], x0=fdict["x0"])
    except Exception as exc:
        line = raw.get("field", {}).get("gradB", (None, None))[1]
        raise ConfigError(str(exc), line=line, key="gradB") from None

    ndict = sections["numerics"]
    for key in ("dt",):
        if not (ndict[key] > 0.0) or not np.isfinite(ndict[key]):
            raise ConfigError("must be positive and finite", key=key)
    for key in ("steps", "record_every", "particles"):
        if ndict[key] < 1:
            raise ConfigError("must be >= 1", key=key)
    if ndict["mode"] not in ("fp", "mc", "both"):
        raise ConfigError("mode must be fp, mc or both", key="mode")
    if sections["output"]["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json", key="format")

    cfg = ScenarioConfig(kind=kind, constants=consts, field=fieldcfg, sections=sections)
    cfg.model_kind()
    cfg.initial_pi()
    return cfg
