"""Line-oriented ``key = value`` experiment configuration.

Unknown and duplicate keys are rejected with their line number; missing
keys fall back to the documented defaults (the standard assumption set:
BSA success 1/2, 20 km attenuation length, 200,000 km/s fibre speed,
T2 = 1 s, xi = eps_g / 4, elementary fidelity 1 - 1.25 eps_g).  ``#``
starts a comment.  The effective configuration is echoed next to every
output file so any run can be reproduced from its output directory alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .oneway import OnewayParams, QpcCode
from .optimizer import SweepGrid
from .params import ChainParams
from .pmfengine import is_power_of_two
from .policy import DecisionRule


class ConfigError(ValueError):
    """Configuration file problem, with a line number when available."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "on", "yes", "1"):
        return True
    if lowered in ("false", "off", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan is not a valid value")
    return value


def _parse_optional_float(text: str) -> float | None:
    if text.strip().lower() in ("", "none", "auto"):
        return None
    return _parse_float(text)


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(_parse_int(part) for part in text.split(","))


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(_parse_float(part) for part in text.split(","))


def _parse_optional_float_list(text: str) -> tuple[float, ...] | None:
    if text.strip().lower() in ("", "none", "auto"):
        return None
    return _parse_float_list(text)


def _parse_str(text: str) -> str:
    return text.strip()


@dataclass(frozen=True)
class Config:
    """Typed view of a config file with every default applied."""

    out_dir: str = "results"
    seed: int = 12345
    trials: int = 1_000_000
    # chain / physics
    total_distance_km: float = 200.0
    n_segments: int = 8
    channels: int = 64
    eta_c: float = 0.9
    eps_g: float = 1e-3
    xi: float | None = None
    t2_s: float = 1.0
    l_att_km: float = 20.0
    c_fiber_km_s: float = 200_000.0
    link_fidelity_coeff: float = 1.25
    source_rate_hz: float = 1e6
    pi0: float | None = None
    elementary_fidelity: float | None = None
    decoherence: bool = True
    herald_hold_s: float | None = None
    distill_holds_s: tuple[float, ...] | None = None
    # decision rule
    rule: str = "skr"
    f_th: float = 0.95
    # sweep grids
    distances_km: tuple[float, ...] = (50.0, 100.0, 200.0, 500.0)
    n_segment_options: tuple[int, ...] = (2, 4, 8, 16, 32, 64)
    channel_options: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64, 128, 256)
    qpc_n_max: int = 70
    qpc_m_max: int = 20
    spacings_km: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)
    # relay-expectation experiment
    relay_channels: tuple[int, ...] = (128, 256)
    relay_spacings_km: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0)
    workers: int = 1

    def __post_init__(self) -> None:
        if not is_power_of_two(self.n_segments):
            raise ConfigError(
                f"n_segments must be a power of two, got {self.n_segments}"
            )
        for n in self.n_segment_options:
            if not is_power_of_two(n):
                raise ConfigError(f"n_segment_options entries must be powers of two, got {n}")
        if self.rule not in ("skr", "fth"):
            raise ConfigError(f"rule must be 'skr' or 'fth', got {self.rule!r}")
        if self.trials < 1 or self.seed < 0 or self.workers < 1:
            raise ConfigError("trials and workers must be >= 1, seed >= 0")
        if not 1 <= self.qpc_n_max <= 70 or not 1 <= self.qpc_m_max <= 20:
            raise ConfigError("QPC search bounds are 1..70 blocks of 1..20 photons")

    def chain_params(
        self,
        distance_km: float | None = None,
        n_segments: int | None = None,
        channels: int | None = None,
    ) -> ChainParams:
        return ChainParams(
            total_distance_km=self.total_distance_km if distance_km is None else distance_km,
            n_segments=self.n_segments if n_segments is None else n_segments,
            channels=self.channels if channels is None else channels,
            eta_c=self.eta_c,
            eps_g=self.eps_g,
            xi=self.xi,
            t2_s=self.t2_s,
            l_att_km=self.l_att_km,
            c_fiber_km_s=self.c_fiber_km_s,
            link_fidelity_coeff=self.link_fidelity_coeff,
            source_rate_hz=self.source_rate_hz,
            pi0_override=self.pi0,
            elementary_fidelity_override=self.elementary_fidelity,
            decoherence=self.decoherence,
            herald_hold_override_s=self.herald_hold_s,
            distill_hold_overrides_s=self.distill_holds_s,
        )

    def oneway_params(
        self, distance_km: float, code: QpcCode, spacing_km: float
    ) -> OnewayParams:
        return OnewayParams(
            code=code,
            spacing_km=spacing_km,
            total_distance_km=distance_km,
            eta_c=self.eta_c,
            eps_g=self.eps_g,
            xi=self.xi,
            l_att_km=self.l_att_km,
        )

    def decision_rule(self) -> DecisionRule:
        if self.rule == "skr":
            return DecisionRule.skr()
        return DecisionRule.fidelity_threshold(self.f_th)

    def sweep_grid(self) -> SweepGrid:
        return SweepGrid(
            distances_km=self.distances_km,
            n_segment_options=self.n_segment_options,
            channel_options=self.channel_options,
            qpc_n_options=tuple(range(1, self.qpc_n_max + 1)),
            qpc_m_options=tuple(range(1, self.qpc_m_max + 1)),
            spacing_options_km=self.spacings_km,
        )


_PARSERS = {
    "out_dir": _parse_str,
    "seed": _parse_int,
    "trials": _parse_int,
    "total_distance_km": _parse_float,
    "n_segments": _parse_int,
    "channels": _parse_int,
    "eta_c": _parse_float,
    "eps_g": _parse_float,
    "xi": _parse_optional_float,
    "t2_s": _parse_float,
    "l_att_km": _parse_float,
    "c_fiber_km_s": _parse_float,
    "link_fidelity_coeff": _parse_float,
    "source_rate_hz": _parse_float,
    "pi0": _parse_optional_float,
    "elementary_fidelity": _parse_optional_float,
    "decoherence": _parse_bool,
    "herald_hold_s": _parse_optional_float,
    "distill_holds_s": _parse_optional_float_list,
    "rule": _parse_str,
    "f_th": _parse_float,
    "distances_km": _parse_float_list,
    "n_segment_options": _parse_int_list,
    "channel_options": _parse_int_list,
    "qpc_n_max": _parse_int,
    "qpc_m_max": _parse_int,
    "spacings_km": _parse_float_list,
    "relay_channels": _parse_int_list,
    "relay_spacings_km": _parse_float_list,
    "workers": _parse_int,
}


def parse_config(text: str) -> Config:
    """Parse ``key = value`` lines into a Config, applying defaults."""
    values: dict[str, object] = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {seen[key]})"
            )
        seen[key] = lineno
        try:
            values[key] = _PARSERS[key](value.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    try:
        return Config(**values)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> Config:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def effective_text(config: Config) -> str:
    """Render the full effective configuration as parseable key = value lines."""
    lines = []
    for f in fields(Config):
        value = getattr(config, f.name)
        if value is None:
            rendered = "none"
        elif isinstance(value, bool):
            rendered = "on" if value else "off"
        elif isinstance(value, tuple):
            rendered = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def with_overrides(config: Config, **overrides) -> Config:
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **cleaned) if cleaned else config
