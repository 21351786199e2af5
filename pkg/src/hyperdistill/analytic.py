"""Closed-form distilled fidelity, yield and gain.

Functions return ``None`` in place of a number at 0/0 corners (nothing kept)
so that grid sweeps can mark the point instead of aborting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

ZERO = 1e-15


class Scenario(str, enum.Enum):
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"
    AUX_S1 = "aux-s1"
    AUX_S3 = "aux-s3"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ScenarioParams:
    """Parameters of one analytic evaluation.

    ``F_f`` is the frequency fidelity for s1-s3 and the auxiliary fidelity
    ``F_a`` for the aux-bitflip scenarios.
    """

    scenario: Scenario
    F_p: float
    F_f: float
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    eta: float = 1.0
    variant: str = "standard"

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        for name in ("F_p", "F_f", "A", "B", "C", "eta"):
            x = getattr(self, name)
            if not (0.0 <= x <= 1.0):
                raise ValueError(f"{name}={x!r} outside [0, 1]")
        if self.variant not in ("standard", "hadamard"):
            raise ValueError(f"unknown variant {self.variant!r}")
        s = self.scenario
        if s in (Scenario.S1, Scenario.AUX_S1) and self.A != 0.0:
            raise ValueError("scenario 1 has no phase-flip weight (A must be 0)")
        if s is Scenario.S2 and (self.B != 0.0 or self.C != 0.0):
            raise ValueError("scenario 2 has no bit-flip weights (B = C = 0)")
        if self.F_p + self.A > 1.0 + 1e-9:
            raise ValueError("F_p + A exceeds 1")
        # B and C may be left at 0 and implied by normalization; if given they must add up
        if self.B + self.C > 0.0 and abs(self.F_p + self.A + self.B + self.C - 1.0) > 1e-9:
            raise ValueError("F_p + A + B + C must equal 1")

    @property
    def bc(self) -> float:
        """Total bit-flip plus bit-phase-flip weight, implied by normalization."""
        if self.scenario is Scenario.S2:
            return 0.0
        return max(1.0 - self.F_p - self.A, 0.0)

    @property
    def phase_flip(self) -> float:
        return 1.0 - self.F_p if self.scenario is Scenario.S2 else self.A


def _ratio(num: float, den: float) -> float | None:
    if abs(den) < ZERO:
        return None
    return num / den


def fidelity_eta_corrected(p: ScenarioParams) -> float | None:
    """Distilled fidelity with identical converters of efficiency eta."""
    F_p, F_f, eta = p.F_p, p.F_f, p.eta
    if p.scenario is Scenario.S1:
        return _ratio(F_p * F_f, F_p + (1.0 - eta) * (1.0 - F_p))
    if p.scenario is Scenario.S2:
        return F_p * F_f + (1.0 - F_p) * (1.0 - F_f)
    if p.scenario is Scenario.S3:
        A = p.A
        return _ratio(F_p * F_f + A * (1.0 - F_f), F_p + A + (1.0 - eta) * p.bc)
    raise ValueError(f"no eta-corrected form for {p.scenario}")


def _gain(f: float | None, F_p: float) -> float | None:
    return None if f is None else f - F_p


def scenario_fidelity_yield(p: ScenarioParams) -> tuple[float | None, float, float | None]:
    """Ideal-converter ``(F_p', Y, G)`` for scenarios s1-s3."""
    if p.eta != 1.0:
        raise ValueError("closed forms assume eta = 1; use fidelity_eta_corrected for eta < 1")
    F_p, F_f = p.F_p, p.F_f
    if p.scenario is Scenario.S1:
        y = F_p
        f = _ratio(F_p * F_f, y)
    elif p.scenario is Scenario.S2:
        if p.variant == "hadamard":
            y = F_p
            f = _ratio(F_p * F_f, y)
        else:
            y = 1.0
            f = F_p * F_f + (1.0 - F_p) * (1.0 - F_f)
    elif p.scenario is Scenario.S3:
        if p.variant == "hadamard":
            # after the Hadamard, bit flips (Phi+) share the kept sector with Psi+
            y = F_p + p.B
            f = _ratio(F_p * F_f + p.B * (1.0 - F_f), y)
        else:
            y = F_p + p.A
            f = _ratio(F_p * F_f + p.A * (1.0 - F_f), y)
    else:
        raise ValueError(f"{p.scenario} is an aux-bitflip scenario; use petpsm_fidelity_yield")
    return f, y, _gain(f, F_p)


def petpsm_fidelity_yield(F_p: float, F_a: float, scenario="aux-s1", A: float = 0.0):
    """``(F_p', Y, G)`` when the auxiliary qubit suffers bit flips (psi+ mixed with phi+)."""
    scenario = Scenario(scenario)
    for name, x in (("F_p", F_p), ("F_a", F_a), ("A", A)):
        if not (0.0 <= x <= 1.0):
            raise ValueError(f"{name}={x!r} outside [0, 1]")
    if scenario is Scenario.AUX_S1:
        if A != 0.0:
            raise ValueError("scenario 1 has no phase-flip weight")
        keep_pol = F_p
    elif scenario is Scenario.AUX_S3:
        keep_pol = F_p + A
    else:
        raise ValueError(f"{scenario} is not an aux-bitflip scenario")
    y = keep_pol * F_a + (1.0 - keep_pol) * (1.0 - F_a)
    f = _ratio(F_p * F_a, y)
    return f, y, _gain(f, F_p)


def evaluate(p: ScenarioParams) -> tuple[float | None, float | None, float | None]:
    """Dispatch to the right closed form; eta < 1 uses the eta-corrected fidelity (no yield)."""
    if p.scenario in (Scenario.AUX_S1, Scenario.AUX_S3):
        if p.eta != 1.0:
            raise ValueError("aux-bitflip closed forms assume eta = 1")
        if p.variant != "standard":
            raise ValueError("aux-bitflip closed forms cover the standard protocol only")
        return petpsm_fidelity_yield(p.F_p, p.F_f, p.scenario, p.A)
    if p.eta == 1.0:
        return scenario_fidelity_yield(p)
    if p.variant != "standard":
        raise ValueError("no eta-corrected closed form for the Hadamard-modified protocol")
    f = fidelity_eta_corrected(p)
    return f, None, _gain(f, p.F_p)
