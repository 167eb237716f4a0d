"""Experiment configuration: JSON file, dotted overrides, validation with field paths."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .noise import CHANNELS

STATE_KINDS = ("ghz_z", "x_ground", "qaoa_random", "random")
MODE_KINDS = ("exact", "sampled", "noisy")
EXACT_GROUND = "exact_ground"


def _num(value, path: str, *, positive=False, nonneg=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if integer:
        if int(value) != value:
            raise ConfigError(f"expected an integer, got {value!r}", path)
        value = int(value)
    else:
        value = float(value)
    if positive and not value > 0:
        raise ConfigError("must be positive", path)
    if nonneg and value < 0:
        raise ConfigError("must be non-negative", path)
    return value


def _pair(value, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError("expected a [start, stop] pair", path)
    return (_num(value[0], f"{path}[0]"), _num(value[1], f"{path}[1]"))


def _num_list(value, path: str, **kw) -> tuple:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError("expected a non-empty list", path)
    return tuple(_num(v, f"{path}[{i}]", **kw) for i, v in enumerate(value))


def _anchor(value, path: str):
    if value is None or value == EXACT_GROUND:
        return value
    return _num(value, path)


@dataclass
class ModelConfig:
    n: int = 4
    J: float = 1.0
    g: float = 2.0
    periodic: bool = True
    shift: float = 0.0

    def validate(self, p: str) -> None:
        self.n = _num(self.n, f"{p}.n", positive=True, integer=True)
        self.J = _num(self.J, f"{p}.J")
        self.g = _num(self.g, f"{p}.g")
        self.shift = _num(self.shift, f"{p}.shift")
        if not isinstance(self.periodic, bool):
            raise ConfigError("expected true or false", f"{p}.periodic")
        if self.periodic and self.n < 2:
            raise ConfigError("periodic chain needs n >= 2", f"{p}.n")


@dataclass
class FilterConfig:
    delta_y: float = 0.16
    m_y: int | None = 50
    schedule: tuple[int, ...] | None = None

    def validate(self, p: str) -> None:
        self.delta_y = _num(self.delta_y, f"{p}.delta_y", positive=True)
        if self.m_y is not None:
            self.m_y = _num(self.m_y, f"{p}.m_y", nonneg=True, integer=True)
        if self.schedule is not None:
            self.schedule = _num_list(self.schedule, f"{p}.schedule", nonneg=True, integer=True)
            if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
                raise ConfigError("must be strictly increasing", f"{p}.schedule")
        if self.m_y is None and self.schedule is None:
            raise ConfigError("one of m_y or schedule is required", p)

    def cutoffs(self) -> tuple[int, ...]:
        return self.schedule if self.schedule is not None else (self.m_y,)


@dataclass
class InitialStateConfig:
    kind: str = "qaoa_random"
    seed: int = 0

    def validate(self, p: str) -> None:
        if self.kind not in STATE_KINDS:
            raise ConfigError(f"must be one of {STATE_KINDS}", f"{p}.kind")
        self.seed = _num(self.seed, f"{p}.seed", nonneg=True, integer=True)


@dataclass
class ScanConfig:
    mu_range: tuple[float, float] = (0.0, -1.0)
    mu_step: float = 0.1
    inv_sigma_sq_range: tuple[float, float] = (0.1, 3.0)
    inv_sigma_sq_step: float = 0.1
    # None: mu_range is absolute; a number or "exact_ground": mu_range is relative to that energy
    mu_anchor: float | str | None = None

    def validate(self, p: str) -> None:
        self.mu_range = _pair(self.mu_range, f"{p}.mu_range")
        self.inv_sigma_sq_range = _pair(self.inv_sigma_sq_range, f"{p}.inv_sigma_sq_range")
        self.mu_step = _num(self.mu_step, f"{p}.mu_step", positive=True)
        self.inv_sigma_sq_step = _num(self.inv_sigma_sq_step, f"{p}.inv_sigma_sq_step", positive=True)
        if min(self.inv_sigma_sq_range) <= 0:
            raise ConfigError("inverse variances must be positive", f"{p}.inv_sigma_sq_range")
        self.mu_anchor = _anchor(self.mu_anchor, f"{p}.mu_anchor")


@dataclass
class ModeConfig:
    kind: str = "exact"
    shots: int | None = None
    seed: int = 0
    channel: str = "both"
    p: float = 1e-4
    steps_per_slice: int | None = None
    zne_scales: tuple[float, ...] = (1.0, 2.0)
    # exact/sampled only: Trotterize the evolution instead of using the eigenbasis
    trotter_steps: int | None = None

    def validate(self, p: str) -> None:
        if self.kind not in MODE_KINDS:
            raise ConfigError(f"must be one of {MODE_KINDS}", f"{p}.kind")
        self.seed = _num(self.seed, f"{p}.seed", nonneg=True, integer=True)
        if self.kind == "sampled":
            if self.shots is None:
                raise ConfigError("sampled mode requires shots", f"{p}.shots")
            self.shots = _num(self.shots, f"{p}.shots", positive=True, integer=True)
        if self.channel not in CHANNELS + ("both",):
            raise ConfigError(f"must be one of {CHANNELS + ('both',)}", f"{p}.channel")
        self.p = _num(self.p, f"{p}.p", nonneg=True)
        if self.p > 1:
            raise ConfigError("probability must be <= 1", f"{p}.p")
        if self.kind == "noisy" and self.steps_per_slice is None:
            raise ConfigError("noisy mode requires steps_per_slice", f"{p}.steps_per_slice")
        if self.steps_per_slice is not None:
            self.steps_per_slice = _num(self.steps_per_slice, f"{p}.steps_per_slice", positive=True, integer=True)
        if self.trotter_steps is not None:
            self.trotter_steps = _num(self.trotter_steps, f"{p}.trotter_steps", positive=True, integer=True)
        self.zne_scales = _num_list(self.zne_scales, f"{p}.zne_scales", positive=True)
        if len(self.zne_scales) < 2 or len(set(self.zne_scales)) != len(self.zne_scales):
            raise ConfigError("need at least two distinct scales", f"{p}.zne_scales")


@dataclass
class CvConfig:
    s: float = 1.0
    shifts: tuple[float, ...] = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5)
    # shifts are offsets from minus this energy; None means absolute shifts
    anchor: float | str | None = EXACT_GROUND

    def validate(self, p: str) -> None:
        self.s = _num(self.s, f"{p}.s", positive=True)
        self.shifts = _num_list(self.shifts, f"{p}.shifts")
        if any(b < a for a, b in zip(self.shifts, self.shifts[1:])):
            raise ConfigError("must be nondecreasing", f"{p}.shifts")
        self.anchor = _anchor(self.anchor, f"{p}.anchor")


@dataclass
class ResponseConfig:
    delta_y: float = 0.16
    mu: float = 0.0
    inv_sigma_sq: tuple[float, ...] = (2.0,)
    phi_m: tuple[float, ...] = (4.0, 8.0, 12.0)
    lambda_range: tuple[float, float] = (-1.0, 6.0)
    n_lambda: int = 701

    def validate(self, p: str) -> None:
        self.delta_y = _num(self.delta_y, f"{p}.delta_y", positive=True)
        self.mu = _num(self.mu, f"{p}.mu")
        self.inv_sigma_sq = _num_list(self.inv_sigma_sq, f"{p}.inv_sigma_sq", positive=True)
        self.phi_m = _num_list(self.phi_m, f"{p}.phi_m", positive=True)
        self.lambda_range = _pair(self.lambda_range, f"{p}.lambda_range")
        self.n_lambda = _num(self.n_lambda, f"{p}.n_lambda", positive=True, integer=True)


@dataclass
class BudgetConfig:
    a0_sq: float = 0.1
    epsilon: float = 1e-3
    sigma_sq: float = 0.5
    lambda_m: float = 2.0
    big_l: float = 8.0
    delta_gap: float = 1.0
    delta_y: float = 0.16
    eps_term: float = 1e-3

    def validate(self, p: str) -> None:
        for f in fields(self):
            setattr(self, f.name, _num(getattr(self, f.name), f"{p}.{f.name}", nonneg=f.name == "delta_gap",
                                       positive=f.name != "delta_gap"))
        if self.a0_sq > 1:
            raise ConfigError("overlap must be <= 1", f"{p}.a0_sq")


@dataclass
class OutputConfig:
    directory: str = "runs/default"
    format: str = "csv"

    def validate(self, p: str) -> None:
        if not isinstance(self.directory, str) or not self.directory:
            raise ConfigError("expected a path string", f"{p}.directory")
        if self.format != "csv":
            raise ConfigError("only csv output is supported", f"{p}.format")


@dataclass
class ExperimentConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    initial_state: InitialStateConfig = field(default_factory=InitialStateConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    mode: ModeConfig = field(default_factory=ModeConfig)
    cv: CvConfig = field(default_factory=CvConfig)
    response: ResponseConfig = field(default_factory=ResponseConfig)
    budget: BudgetConfig = field(default_factory=BudgetConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> ExperimentConfig:
        for f in fields(self):
            getattr(self, f.name).validate(f.name)
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_SECTIONS = {f.name: f.default_factory for f in fields(ExperimentConfig)}


def from_dict(data: dict) -> ExperimentConfig:
    """Build and validate a config; unknown sections or keys are errors, missing ones take defaults."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    sections = {}
    for name, raw in data.items():
        if name not in _SECTIONS:
            raise ConfigError("unknown section", name)
        if not isinstance(raw, dict):
            raise ConfigError("section must be an object", name)
        cls = type(_SECTIONS[name]())
        known = {f.name for f in fields(cls)}
        for key in raw:
            if key not in known:
                raise ConfigError("unknown key", f"{name}.{key}")
        sections[name] = cls(**raw)
    return ExperimentConfig(**sections).validate()


def parse_override(text: str) -> tuple[list[str], Any]:
    """``section.key=value``; the value is parsed as JSON when possible, else kept as a string."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    path = key.strip().split(".")
    if len(path) != 2 or not all(path):
        raise ConfigError(f"override key {key!r} must be section.key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def load_config(path: str | Path | None = None, overrides: list[str] = ()) -> ExperimentConfig:
    """Defaults, then the JSON file, then overrides (highest precedence)."""
    data: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc.strerror}", str(path)) from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", str(path)) from exc
    for item in overrides:
        (section, key), value = parse_override(item)
        data.setdefault(section, {})
        if not isinstance(data[section], dict):
            raise ConfigError("section must be an object", section)
        data[section][key] = value
    return from_dict(data)
