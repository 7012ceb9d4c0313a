"""Physical constants and figure-of-merit calculators.

All quantities are SI. The adiabatic model charges a node of capacitance C
through on-resistance R with a linear ramp of duration tau; a full-swing
transition then dissipates ``xi * C * V**2 * (R * C / tau)``, valid when
tau >> RC.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ParseError, ValidationError
from .grc.core import K_B

#: Elementary charge, exact 2019 SI value; also joules per electron-volt.
EV = 1.602176634e-19

PARAMS_ENV = "REVKIT_PARAMS"


@dataclass(frozen=True)
class TechnologyParams:
    """CMOS technology point for the adiabatic model.

    Defaults are a 180 nm-class process: 10 fF per node, 10 kOhm switch
    on-resistance, 1.8 V swing, 1 pA off-current per transistor, 300 K, and
    1 us ramps.
    """

    capacitance: float = 10e-15
    on_resistance: float = 10e3
    swing: float = 1.8
    off_current: float = 1e-12
    temperature: float = 300.0
    ramp_time: float = 1e-6
    xi: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValidationError(f"{f.name} must be a positive finite number, got {v!r}")

    @property
    def rc(self) -> float:
        return self.on_resistance * self.capacitance

    def with_overrides(self, **overrides) -> "TechnologyParams":
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ValidationError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MechanicalParams:
    """Rotary-joint nanomechanical logic point.

    ``nand_energy`` is taken as given (3.9e-26 J per reversible NAND); it is
    not derived from the drag coefficient.
    """

    rotary_drag: float = 4e-35
    frequency: float = 1e9
    nand_energy: float = 3.9e-26

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValidationError(f"{f.name} must be a positive finite number, got {v!r}")


@dataclass(frozen=True)
class FigureOfMerit:
    landauer_floor: float
    device_energy: float
    efficiency_ratio: float
    ops_per_watt: float


def _positive(name: str, value: float) -> float:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be positive, got {value!r}")
    return float(value)


def landauer_limit(temperature: float) -> float:
    """Minimum heat k_B T ln 2 for erasing one bit at ``temperature`` kelvin."""
    return K_B * _positive("temperature", temperature) * math.log(2)


def in_adiabatic_regime(params: TechnologyParams) -> bool:
    return params.ramp_time > params.rc


def adiabatic_dissipation(params: TechnologyParams) -> float:
    """Energy per full-swing ramped transition, xi * C V^2 * RC / tau."""
    if not in_adiabatic_regime(params):
        warnings.warn(f"ramp time {params.ramp_time:g} s <= RC = {params.rc:g} s: outside the adiabatic regime",
                      RuntimeWarning, stacklevel=2)
    return params.xi * params.capacitance * params.swing ** 2 * (params.rc / params.ramp_time)


def signal_energy(params: TechnologyParams) -> float:
    return params.capacitance * params.swing ** 2


def non_adiabatic_dissipation(params: TechnologyParams, fraction: float = 1.0) -> float:
    """Abrupt charging through a switch: 1/2 C V^2 scaled by (dV/V)^2."""
    return 0.5 * params.capacitance * params.swing ** 2 * fraction * fraction


def rotary_drag_power(params: MechanicalParams) -> tuple[float, float]:
    """(power W, energy J per cycle) of one joint with drag P = k_d * omega^2.

    A per-joint upper-bound estimate; it does not reproduce the per-NAND
    figure, which involves several joints and unstated angular excursions.
    """
    omega = 2 * math.pi * params.frequency
    power = params.rotary_drag * omega ** 2
    return power, power / params.frequency


def efficiency_vs_landauer(device_energy: float, temperature: float) -> float:
    """How many times less than the Landauer floor a device dissipates per op."""
    return landauer_limit(temperature) / _positive("device_energy", device_energy)


def ops_per_watt(op_energy: float, ops_per_composite: float = 1.0) -> float:
    """Composite operations per second per watt, i.e. per joule."""
    return 1.0 / (_positive("op_energy", op_energy) * _positive("ops_per_composite", ops_per_composite))


def ops_per_composite_for(op_energy: float, composite_per_watt: float) -> float:
    """Back-solve primitive ops per composite op from a throughput-per-watt figure."""
    return 1.0 / (_positive("op_energy", op_energy) * _positive("composite_per_watt", composite_per_watt))


def figure_of_merit(device_energy: float, temperature: float, ops_per_composite: float = 1.0) -> FigureOfMerit:
    return FigureOfMerit(
        landauer_floor=landauer_limit(temperature),
        device_energy=device_energy,
        efficiency_ratio=efficiency_vs_landauer(device_energy, temperature),
        ops_per_watt=ops_per_watt(device_energy, ops_per_composite),
    )


def parse_params_text(text: str, source: str | None = None) -> dict[str, float]:
    """Parse ``key = value`` lines (``#`` comments) into a dict of floats."""
    known = {f.name for f in fields(TechnologyParams)}
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, 1, source)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ParseError(f"unknown parameter {key!r}", lineno, 1, source)
        try:
            out[key] = float(value)
        except ValueError:
            raise ParseError(f"bad number {value!r} for {key}", lineno, raw.index(value) + 1, source) from None
    return out


def load_params(path=None, overrides: dict | None = None) -> TechnologyParams:
    """Defaults, then a params file (``path`` or ``$REVKIT_PARAMS``), then overrides."""
    values: dict[str, float] = {}
    if path is None:
        path = os.environ.get(PARAMS_ENV) or None
    if path is not None:
        path = Path(path)
        values.update(parse_params_text(path.read_text(), source=str(path)))
    if overrides:
        values.update(overrides)
    return TechnologyParams().with_overrides(**values)


def format_params(params: TechnologyParams) -> str:
    return "\n".join(f"{k} = {v!r}" for k, v in params.as_dict().items()) + "\n"
