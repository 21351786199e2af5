"""Bell-diagonal noise models for the polarization and frequency qubits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hyperdistill.bellspace import FREQ_BELLS, POL_BELLS, FreqBell, PolBell

RENORM_TOL = 1e-9
EXACT_TOL = 1e-12

LINEAR = "linear"
AUX_BITFLIP = "aux-bitflip"
GENERAL = "general"
FREQ_MODES = (LINEAR, AUX_BITFLIP, GENERAL)


class ValidationError(ValueError):
    """Raised for probability vectors that are negative or not normalized."""


def _normalized(weights, names) -> tuple[float, ...]:
    w = [float(x) for x in weights]
    for name, x in zip(names, w):
        if not math.isfinite(x) or x < 0.0:
            raise ValidationError(f"weight {name}={x!r} must be a finite nonnegative number")
    total = math.fsum(w)
    if abs(total - 1.0) > RENORM_TOL:
        raise ValidationError(f"weights {dict(zip(names, w))} sum to {total!r}, not 1")
    return tuple(x / total for x in w)


@dataclass(frozen=True)
class PolMix:
    """Polarization weights on (Psi+, Psi-, Phi+, Phi-).

    ``A`` is the phase-flip, ``B`` the bit-flip and ``C`` the bit-phase-flip
    probability; ``F_p`` is the fidelity to Psi+.
    """

    F_p: float
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0

    def __post_init__(self):
        vals = (self.F_p, self.A, self.B, self.C)
        for name, x in zip(("F_p", "A", "B", "C"), vals):
            if not (0.0 <= x <= 1.0):
                raise ValidationError(f"{name}={x!r} outside [0, 1]")
        if abs(math.fsum(vals) - 1.0) > EXACT_TOL:
            raise ValidationError(f"F_p+A+B+C = {math.fsum(vals)!r}; use pol_mix() to renormalize")

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.F_p, self.A, self.B, self.C])

    def weight(self, b: PolBell) -> float:
        return float(self.weights[POL_BELLS.index(PolBell(b))])


@dataclass(frozen=True)
class FreqMix:
    """Frequency weights on (psi+, psi-, phi+, phi-).

    In ``linear`` mode the phi components are exactly zero: a linear channel
    cannot flip a photon's frequency.
    """

    psi_plus: float
    psi_minus: float = 0.0
    phi_plus: float = 0.0
    phi_minus: float = 0.0
    mode: str = GENERAL

    def __post_init__(self):
        vals = (self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus)
        for x in vals:
            if not (0.0 <= x <= 1.0):
                raise ValidationError(f"frequency weight {x!r} outside [0, 1]")
        if abs(math.fsum(vals) - 1.0) > EXACT_TOL:
            raise ValidationError(f"frequency weights sum to {math.fsum(vals)!r}")
        if self.mode not in FREQ_MODES:
            raise ValidationError(f"unknown frequency mode {self.mode!r}")
        if self.mode == LINEAR and (self.phi_plus != 0.0 or self.phi_minus != 0.0):
            raise ValidationError("linear channel cannot populate phi+ or phi-")

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus])

    def weight(self, b: FreqBell) -> float:
        return float(self.weights[FREQ_BELLS.index(FreqBell(b))])


@dataclass(frozen=True)
class HyperState:
    """Product of a polarization and a frequency Bell-diagonal mixture."""

    pol: PolMix
    freq: FreqMix

    def __post_init__(self):
        if not isinstance(self.pol, PolMix) or not isinstance(self.freq, FreqMix):
            raise ValidationError("HyperState needs a PolMix and a FreqMix")

    @property
    def F_p(self) -> float:
        return self.pol.F_p

    def joint_weights(self) -> np.ndarray:
        """4x4 array, rows indexed by PolBell and columns by FreqBell."""
        return np.outer(self.pol.weights, self.freq.weights)


def pol_mix(F_p: float, A: float = 0.0, B: float = 0.0, C: float = 0.0) -> PolMix:
    """Validate and renormalize user-supplied polarization weights."""
    return PolMix(*_normalized((F_p, A, B, C), ("F_p", "A", "B", "C")))


def _check_unit(name: str, x: float) -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise ValidationError(f"{name}={x!r} outside [0, 1]")
    return x


def freq_dephasing(F_f: float) -> FreqMix:
    """Phase-flip-only frequency noise of a linear channel."""
    F_f = _check_unit("F_f", F_f)
    return FreqMix(F_f, 1.0 - F_f, 0.0, 0.0, mode=LINEAR)


def auxiliary_bitflip(F_a: float) -> FreqMix:
    """psi+ with an admixed bit-flip (phi+) component, for PET/PSM-style comparison."""
    F_a = _check_unit("F_a", F_a)
    return FreqMix(F_a, 0.0, 1.0 - F_a, 0.0, mode=AUX_BITFLIP)


def freq_mix(psi_plus: float, psi_minus: float = 0.0, phi_plus: float = 0.0, phi_minus: float = 0.0) -> FreqMix:
    w = _normalized((psi_plus, psi_minus, phi_plus, phi_minus), ("psi+", "psi-", "phi+", "phi-"))
    return FreqMix(*w, mode=GENERAL)


def scenario1(F_p: float, bf_share: float = 1.0) -> PolMix:
    """Bit-flip and bit-phase-flip noise only; ``bf_share`` of the error is Phi+."""
    F_p = _check_unit("F_p", F_p)
    bf_share = _check_unit("bf_share", bf_share)
    err = 1.0 - F_p
    return pol_mix(F_p, 0.0, err * bf_share, err * (1.0 - bf_share))


def scenario2(F_p: float) -> PolMix:
    """Phase-flip noise only."""
    F_p = _check_unit("F_p", F_p)
    return pol_mix(F_p, 1.0 - F_p, 0.0, 0.0)


def scenario3(F_p: float, A: float, B: float, C: float) -> PolMix:
    """All three error types together."""
    return pol_mix(F_p, A, B, C)


def hyper(pol: PolMix, freq: FreqMix) -> HyperState:
    return HyperState(pol, freq)
