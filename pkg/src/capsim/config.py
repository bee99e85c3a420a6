"""Scenario configuration files.

Flat INI-style sections with key = value pairs, so the reference cases are
trivial to author by hand.  Parsing normalizes defaults and produces a
canonical serialization whose SHA-256 prefix becomes the config hash that is
embedded in every emitted file.  Unknown sections or keys are errors;
missing keys take the documented defaults (see docs/formats.md).
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass

from . import averaged as averaged_mod
from . import slowflow as slowflow_mod
from .errors import ConfigError, DomainError
from .integrator import IntegratorOptions
from .model import FullState, NondimParams, PhysicalParams, nondimensionalize

MODES = ("simulate", "slowflow", "averaged", "fixed-points", "sweep", "compare", "plot")
SWEEP_KINDS = ("bifurcation", "region", "rotatory")
CASE_KINDS = ("oscillatory", "rotatory")

# Section -> key -> type.  "float_list" is a comma-separated list of floats.
_SCHEMA = {
    "scenario": {"mode": str, "label": str, "kind": str},
    "physical": {"M": float, "m": float, "l": float, "g": float, "A0": float,
                 "Omega": float, "lambda1": float, "lambda2": float, "c": float},
    "nondim": {"epsilon": float, "omega": float, "A": float, "zeta": float,
               "mu1": float, "mu2": float},
    "slowflow": {"P": float, "xi": float, "sigma": float, "mu1": float,
                 "mu2": float, "epsilon": float},
    "averaged": {"A": float, "zeta": float, "omega": float, "eta": float,
                 "mu1": float, "mu2": float, "epsilon": float},
    "initial": {"x": float, "v": float, "theta": float, "theta_dot": float,
                "phi_re": float, "phi_im": float, "D": float,
                "theta_a": float, "theta_a_dot": float},
    "integrator": {"t_end": float, "dt": float, "steps_per_period": int,
                   "samples_per_period": int, "tol_event": float,
                   "discard": float, "events": bool},
    "sweep": {"sigma_min": float, "sigma_max": float, "sigma_count": int,
              "P_min": float, "P_max": float, "P_count": int,
              "eta_min": float, "eta_max": float, "eta_count": int,
              "empirical": bool, "verify_sigmas": "float_list",
              "theta0": float, "horizon": float},
    "output": {"dir": str},
}

_PARAM_SECTIONS = ("physical", "nondim", "slowflow", "averaged")

_INTEGRATOR_DEFAULTS = {"t_end": 3000.0, "steps_per_period": 200,
                        "samples_per_period": 200, "tol_event": 1e-10,
                        "discard": 0.5, "events": True}
_INITIAL_DEFAULTS = {"x": 0.0, "v": 0.0, "theta_dot": 0.0}


def _coerce(section: str, key: str, raw: str):
    kind = _SCHEMA[section][key]
    raw = raw.strip()
    try:
        if kind is float:
            return float(raw)
        if kind is int:
            return int(raw)
        if kind is bool:
            lowered = raw.lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        if kind == "float_list":
            return [float(part) for part in raw.split(",") if part.strip()]
        return raw
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, list):
        return ", ".join(format(v, ".17g") for v in value)
    return str(value)


@dataclass
class ScenarioConfig:
    """Parsed, normalized scenario description."""

    mode: str
    label: str
    kind: str | None
    sections: dict

    def serialize(self) -> str:
        """Canonical text form; parse(serialize()) reproduces this config."""
        out = io.StringIO()
        ordered = [("scenario", {"mode": self.mode, "label": self.label,
                                 **({"kind": self.kind} if self.kind else {})})]
        for name in _SCHEMA:
            if name == "scenario":
                continue
            if name in self.sections and self.sections[name]:
                ordered.append((name, self.sections[name]))
        for i, (name, body) in enumerate(ordered):
            if i:
                out.write("\n")
            out.write(f"[{name}]\n")
            for key in _SCHEMA[name]:
                if key in body:
                    out.write(f"{key} = {_fmt_value(body[key])}\n")
        return out.getvalue()

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:12]

    def provenance(self) -> dict:
        from . import __version__

        return {"config_hash": self.hash, "capsim_version": __version__,
                "mode": self.mode, "label": self.label}

    # Typed accessors -----------------------------------------------------

    def param_section(self) -> str:
        return next(name for name in _PARAM_SECTIONS if name in self.sections)

    def nondim_params(self) -> NondimParams:
        name = self.param_section()
        if name == "nondim":
            b = self.sections["nondim"]
            try:
                return NondimParams(eps=b["epsilon"], omega=b["omega"], amp=b["A"],
                                    zeta=b["zeta"], mu1=b["mu1"], mu2=b["mu2"])
            except KeyError as exc:
                raise ConfigError(f"[nondim] missing key {exc.args[0]}") from None
        if name == "physical":
            b = self.sections["physical"]
            try:
                phys = PhysicalParams(
                    capsule_mass=b["M"], pendulum_mass=b["m"], pendulum_length=b["l"],
                    gravity=b["g"], base_amplitude=b["A0"], base_frequency=b["Omega"],
                    damping_forward=b["lambda1"], damping_backward=b["lambda2"],
                    hinge_damping=b["c"])
            except KeyError as exc:
                raise ConfigError(f"[physical] missing key {exc.args[0]}") from None
            return nondimensionalize(phys)
        raise ConfigError(f"mode {self.mode!r} needs a [physical] or [nondim] block")

    def slowflow_params(self) -> slowflow_mod.SlowFlowParams21:
        if "slowflow" in self.sections:
            b = self.sections["slowflow"]
            try:
                return slowflow_mod.SlowFlowParams21(
                    P=b["P"], xi=b["xi"], sigma=b.get("sigma", 0.0),
                    mu1=b["mu1"], mu2=b["mu2"], eps=b.get("epsilon", 0.01))
            except KeyError as exc:
                raise ConfigError(f"[slowflow] missing key {exc.args[0]}") from None
        return slowflow_mod.to_slowflow_params(self.nondim_params())

    def averaged_params(self) -> averaged_mod.AveragedParams11:
        if "averaged" in self.sections:
            b = self.sections["averaged"]
            try:
                if "omega" in b:
                    omega = b["omega"]
                elif "eta" in b:
                    omega = b["A"] / (2.0 * b["zeta"] * b["eta"])
                else:
                    raise ConfigError("[averaged] needs either omega or eta")
                return averaged_mod.AveragedParams11(
                    amp=b["A"], zeta=b["zeta"], omega=omega,
                    mu1=b["mu1"], mu2=b["mu2"], eps=b.get("epsilon", 0.01))
            except KeyError as exc:
                raise ConfigError(f"[averaged] missing key {exc.args[0]}") from None
        return averaged_mod.to_averaged_params(self.nondim_params())

    def initial_full(self) -> FullState:
        b = self.sections.get("initial", {})
        if "theta" not in b:
            raise ConfigError("[initial] theta must be given explicitly")
        return FullState(x=b.get("x", 0.0), v=b.get("v", 0.0), theta=b["theta"],
                         theta_dot=b.get("theta_dot", 0.0))

    def integrator_options(self, omega: float) -> IntegratorOptions:
        b = self.sections["integrator"]
        if "dt" in b:
            period = 2.0 * math.pi / omega
            stride = max(1, int(round(period / b["dt"] / b["samples_per_period"])))
            return IntegratorOptions(dt=b["dt"], t_end=b["t_end"],
                                     tol_event=b["tol_event"], sample_stride=stride,
                                     events=b["events"])
        return IntegratorOptions.for_forcing(
            omega, b["t_end"], b["steps_per_period"], b["samples_per_period"],
            b["tol_event"], b["events"])

    @property
    def out_dir(self) -> str:
        return self.sections.get("output", {}).get("dir", "out")

    @property
    def discard(self) -> float:
        return self.sections["integrator"]["discard"]


def parse_config(text: str) -> ScenarioConfig:
    """Parse scenario text into a normalized :class:`ScenarioConfig`."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None

    sections: dict = {}
    for name in parser.sections():
        if name not in _SCHEMA:
            raise ConfigError(f"unknown section [{name}]")
        body = {}
        for key, raw in parser.items(name):
            if key not in _SCHEMA[name]:
                raise ConfigError(f"unknown key {key!r} in section [{name}]")
            body[key] = _coerce(name, key, raw)
        sections[name] = body

    scenario = sections.pop("scenario", None)
    if not scenario or "mode" not in scenario:
        raise ConfigError("config needs a [scenario] section with a mode key")
    mode = scenario["mode"]
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
    kind = scenario.get("kind")
    if mode == "sweep" and kind not in SWEEP_KINDS:
        raise ConfigError(f"sweep mode needs kind in {SWEEP_KINDS}")
    if mode == "compare" and kind is not None and kind not in CASE_KINDS:
        raise ConfigError(f"compare kind must be one of {CASE_KINDS}")

    present = [name for name in _PARAM_SECTIONS if name in sections]
    if "physical" in present and "nondim" in present:
        raise ConfigError("give either a [physical] or a [nondim] block, not both")
    if len(present) > 1:
        raise ConfigError(f"multiple parameter blocks present: {present}")
    if mode != "plot" and not present:
        raise ConfigError(f"mode {mode!r} needs a parameter block")

    integ = dict(_INTEGRATOR_DEFAULTS)
    integ.update(sections.get("integrator", {}))
    if not 0.0 <= integ["discard"] < 1.0:
        raise ConfigError("[integrator] discard must lie in [0, 1)")
    sections["integrator"] = integ

    init = dict(_INITIAL_DEFAULTS)
    init.update(sections.get("initial", {}))
    sections["initial"] = init

    return ScenarioConfig(mode=mode, label=scenario.get("label", "run"),
                          kind=kind, sections=sections)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
