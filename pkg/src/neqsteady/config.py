"""Run configuration: a flat ``key = value`` file with section headers.

Grammar (``#`` or ``;`` start comments, keys are case-sensitive)::

    [modes]
    L = 1.0              # one line per mode: label = frequency
    bus = 2.0
    R = 1.0

    [couplings]
    L-bus = 0.08         # label-label = strength
    bus-R = 0.08

    [baths]
    L.temperature = 1.0  # label.temperature / label.rate
    L.rate = 0.002
    R.temperature = 3.0
    R.rate = 0.003

    [run]
    rwa = false

    [sweep]              # optional
    parameter = delta    # delta | g | gL | gR | TL | TR
    from = -0.5
    to = 0.5
    points = 201

    [output]             # optional
    path = out.csv
    format = csv         # csv | json

    [oracle]             # optional, used by ``oracle-check``
    cutoffs = 8, 8
    dt = 0.5
    t_final = 5000
    convergence_tol = 1e-7
    tolerance = 1e-3

Mode order follows the ``[modes]`` section. ``delta`` sweeps
``omega_L - omega_R`` at fixed mean ``(omega_L + omega_R) / 2``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, SpecError
from .model import Bath, Coupling, SystemSpec
from .oracle import OracleConfig

SWEEP_PARAMETERS = ("delta", "g", "gL", "gR", "TL", "TR")
FORMATS = ("csv", "json")
KNOWN_SECTIONS = {"modes", "couplings", "baths", "run", "sweep", "output", "oracle"}


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    points: int

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep parameter must be one of {', '.join(SWEEP_PARAMETERS)}, got {self.parameter!r}")
        if self.points < 2:
            raise ConfigError("sweep needs at least 2 points")
        if not self.start < self.stop:
            raise ConfigError("sweep 'from' must be smaller than 'to'")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise ConfigError(f"output format must be csv or json, got {self.format!r}")


@dataclass(frozen=True)
class OracleSettings:
    cutoffs: tuple[int, ...] | None = None
    dt: float | None = None
    t_final: float = 5000.0
    convergence_tol: float = 1e-7
    tolerance: float = 1e-3

    def to_config(self, n_modes: int) -> OracleConfig:
        cutoffs = self.cutoffs or (8,) * n_modes
        if len(cutoffs) != n_modes:
            raise ConfigError(f"{len(cutoffs)} oracle cutoffs given for {n_modes} modes")
        return OracleConfig(cutoffs, self.dt, self.t_final, self.convergence_tol)


@dataclass(frozen=True)
class RunConfig:
    spec: SystemSpec
    rwa: bool = False
    sweep: Sweep | None = None
    output: OutputSpec = OutputSpec()
    oracle: OracleSettings | None = None

    def points(self) -> list[tuple[float | None, SystemSpec]]:
        """``(parameter value, spec)`` for every point (a single ``None`` point without a sweep)."""
        if self.sweep is None:
            return [(None, self.spec)]
        return [(float(v), apply_parameter(self.spec, self.sweep.parameter, float(v))) for v in self.sweep.values()]


def _float(section: str, key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: value must be finite")
    return value


def _bool(section: str, key: str, text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"[{section}] {key}: expected true/false, got {text!r}")


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    return parser


def parse_config(text: str) -> RunConfig:
    parser = _parser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    unknown = set(parser.sections()) - KNOWN_SECTIONS
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if not parser.has_section("modes") or not parser["modes"]:
        raise ConfigError("[modes] section with at least one mode is required")

    labels = list(parser["modes"].keys())
    freqs = [_float("modes", k, v) for k, v in parser["modes"].items()]
    index = {label: i for i, label in enumerate(labels)}

    couplings = []
    if parser.has_section("couplings"):
        for key, value in parser["couplings"].items():
            ends = key.split("-")
            if len(ends) != 2 or not all(e in index for e in ends):
                raise ConfigError(f"[couplings] {key}: expected 'label-label' naming two modes")
            couplings.append(Coupling(index[ends[0]], index[ends[1]], _float("couplings", key, value)))

    bath_fields: dict[str, dict[str, float]] = {}
    if parser.has_section("baths"):
        for key, value in parser["baths"].items():
            label, _, field_name = key.partition(".")
            if label not in index or field_name not in ("temperature", "rate"):
                raise ConfigError(f"[baths] {key}: expected '<mode>.temperature' or '<mode>.rate'")
            bath_fields.setdefault(label, {})[field_name] = _float("baths", key, value)
    baths = []
    for label, fields in bath_fields.items():
        missing = {"temperature", "rate"} - set(fields)
        if missing:
            raise ConfigError(f"[baths] {label}: missing {', '.join(sorted(missing))}")
        baths.append(Bath(index[label], fields["temperature"], fields["rate"]))

    try:
        spec = SystemSpec(tuple(freqs), tuple(couplings), tuple(baths), tuple(labels))
    except SpecError as exc:
        raise ConfigError(str(exc)) from None

    rwa = False
    if parser.has_section("run"):
        run = parser["run"]
        extra = set(run) - {"rwa"}
        if extra:
            raise ConfigError(f"[run] unknown key(s): {', '.join(sorted(extra))}")
        if "rwa" in run:
            rwa = _bool("run", "rwa", run["rwa"])

    sweep = None
    if parser.has_section("sweep"):
        sec = parser["sweep"]
        for key in ("parameter", "from", "to"):
            if key not in sec:
                raise ConfigError(f"[sweep] missing '{key}'")
        points = int(_float("sweep", "points", sec.get("points", "201")))
        sweep = Sweep(sec["parameter"].strip(), _float("sweep", "from", sec["from"]), _float("sweep", "to", sec["to"]), points)
        apply_parameter(spec, sweep.parameter, sweep.start)

    output = OutputSpec()
    if parser.has_section("output"):
        sec = parser["output"]
        output = OutputSpec(sec.get("path") or None, sec.get("format", "json").strip())

    oracle = None
    if parser.has_section("oracle"):
        sec = parser["oracle"]
        cutoffs = None
        if "cutoffs" in sec:
            cutoffs = tuple(int(_float("oracle", "cutoffs", c)) for c in sec["cutoffs"].split(","))
        oracle = OracleSettings(
            cutoffs=cutoffs,
            dt=_float("oracle", "dt", sec["dt"]) if "dt" in sec else None,
            t_final=_float("oracle", "t_final", sec.get("t_final", "5000")),
            convergence_tol=_float("oracle", "convergence_tol", sec.get("convergence_tol", "1e-7")),
            tolerance=_float("oracle", "tolerance", sec.get("tolerance", "1e-3")),
        )
        try:
            oracle.to_config(spec.n_modes)
        except SpecError as exc:
            raise ConfigError(str(exc)) from None

    return RunConfig(spec=spec, rwa=rwa, sweep=sweep, output=output, oracle=oracle)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def _couplings_touching(spec: SystemSpec, label: str) -> list[int]:
    k = spec.index(label)
    return [i for i, c in enumerate(spec.couplings) if k in (c.m, c.n)]


def apply_parameter(spec: SystemSpec, name: str, value: float) -> SystemSpec:
    """Return a copy of ``spec`` with one sweepable parameter set to ``value``."""
    try:
        if name == "delta":
            left, right = spec.index("L"), spec.index("R")
            freqs = list(spec.mode_frequencies)
            mean = 0.5 * (freqs[left] + freqs[right])
            freqs[left], freqs[right] = mean + 0.5 * value, mean - 0.5 * value
            return replace(spec, mode_frequencies=tuple(freqs))
        if name in ("g", "gL", "gR"):
            if name == "g":
                targets = list(range(len(spec.couplings)))
            else:
                targets = _couplings_touching(spec, name[1])
            if not targets:
                raise ConfigError(f"sweep parameter {name!r} has no coupling to act on")
            couplings = list(spec.couplings)
            for i in targets:
                couplings[i] = Coupling(couplings[i].m, couplings[i].n, value)
            return replace(spec, couplings=tuple(couplings))
        if name in ("TL", "TR"):
            bath = spec.bath_on(spec.index(name[1]))
            if bath is None:
                raise ConfigError(f"sweep parameter {name!r}: mode {name[1]} has no bath")
            baths = tuple(replace(b, temperature=value) if b is bath else b for b in spec.baths)
            return replace(spec, baths=baths)
    except SpecError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"sweep parameter {name!r}: {exc}") from None
    raise ConfigError(f"unknown sweep parameter {name!r}")
