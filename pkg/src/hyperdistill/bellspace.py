"""Bell-state labels for the polarization and frequency qubits of a photon pair.

Polarization uses capitalized names (``Psi+``), frequency lowercase (``psi+``).
Two-qubit vectors are ordered ``|x_A x_B>`` with index ``2*x_A + x_B``, where
H=0, V=1 for polarization and w_s=0, w_i=1 for frequency.
"""

from __future__ import annotations

import enum

import numpy as np

_S = 1.0 / np.sqrt(2.0)


class PolLabel(enum.Enum):
    H = 0
    V = 1


class FreqLabel(enum.Enum):
    SIGNAL = 0
    IDLER = 1


class PolBell(str, enum.Enum):
    PSI_PLUS = "Psi+"
    PSI_MINUS = "Psi-"
    PHI_PLUS = "Phi+"
    PHI_MINUS = "Phi-"

    def __str__(self) -> str:
        return self.value


class FreqBell(str, enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    def __str__(self) -> str:
        return self.value


class KeepDecision(str, enum.Enum):
    KEEP = "keep"
    DISCARD = "discard"

    def __str__(self) -> str:
        return self.value


# canonical iteration order, also the order of PolMix / FreqMix weight vectors
POL_BELLS = (PolBell.PSI_PLUS, PolBell.PSI_MINUS, PolBell.PHI_PLUS, PolBell.PHI_MINUS)
FREQ_BELLS = (FreqBell.PSI_PLUS, FreqBell.PSI_MINUS, FreqBell.PHI_PLUS, FreqBell.PHI_MINUS)

_BELL_COEFFS = {
    "psi+": (0.0, _S, _S, 0.0),
    "psi-": (0.0, _S, -_S, 0.0),
    "phi+": (_S, 0.0, 0.0, _S),
    "phi-": (_S, 0.0, 0.0, -_S),
}


def pol_bell_vector(b: PolBell) -> np.ndarray:
    """State vector over (HH, HV, VH, VV)."""
    return np.array(_BELL_COEFFS[PolBell(b).value.lower()], dtype=complex)


def freq_bell_vector(b: FreqBell) -> np.ndarray:
    """State vector over (w_s w_s, w_s w_i, w_i w_s, w_i w_i)."""
    return np.array(_BELL_COEFFS[FreqBell(b).value], dtype=complex)


def parse_pol_bell(name: str) -> PolBell:
    return PolBell(name)


def parse_freq_bell(name: str) -> FreqBell:
    return FreqBell(name)


def keep_decision(f: FreqBell, invert: bool = False) -> KeepDecision:
    """Standard rule keeps equal-frequency outcomes (phi+-); ``invert`` keeps psi+-."""
    equal = FreqBell(f) in (FreqBell.PHI_PLUS, FreqBell.PHI_MINUS)
    return KeepDecision.KEEP if equal != invert else KeepDecision.DISCARD


_P, _p = PolBell, FreqBell

# Bilateral polarization-controlled frequency flip in the Bell basis.
# The psi-input half is the published transition table; the phi-input half was generated by evolving
# every product Bell state through the 16x16 unitary in hyperdistill.oracle
# (regenerated and compared in tests/test_bellspace.py).
_TRANSITIONS: dict[tuple[PolBell, FreqBell], tuple[PolBell, FreqBell]] = {
    (_P.PSI_PLUS, _p.PSI_PLUS): (_P.PSI_PLUS, _p.PHI_PLUS),
    (_P.PSI_PLUS, _p.PSI_MINUS): (_P.PSI_MINUS, _p.PHI_MINUS),
    (_P.PSI_MINUS, _p.PSI_PLUS): (_P.PSI_MINUS, _p.PHI_PLUS),
    (_P.PSI_MINUS, _p.PSI_MINUS): (_P.PSI_PLUS, _p.PHI_MINUS),
    (_P.PHI_PLUS, _p.PSI_PLUS): (_P.PHI_PLUS, _p.PSI_PLUS),
    (_P.PHI_PLUS, _p.PSI_MINUS): (_P.PHI_MINUS, _p.PSI_MINUS),
    (_P.PHI_MINUS, _p.PSI_PLUS): (_P.PHI_MINUS, _p.PSI_PLUS),
    (_P.PHI_MINUS, _p.PSI_MINUS): (_P.PHI_PLUS, _p.PSI_MINUS),
    # phi inputs
    (_P.PSI_PLUS, _p.PHI_PLUS): (_P.PSI_PLUS, _p.PSI_PLUS),
    (_P.PSI_PLUS, _p.PHI_MINUS): (_P.PSI_MINUS, _p.PSI_MINUS),
    (_P.PSI_MINUS, _p.PHI_PLUS): (_P.PSI_MINUS, _p.PSI_PLUS),
    (_P.PSI_MINUS, _p.PHI_MINUS): (_P.PSI_PLUS, _p.PSI_MINUS),
    (_P.PHI_PLUS, _p.PHI_PLUS): (_P.PHI_PLUS, _p.PHI_PLUS),
    (_P.PHI_PLUS, _p.PHI_MINUS): (_P.PHI_MINUS, _p.PHI_MINUS),
    (_P.PHI_MINUS, _p.PHI_PLUS): (_P.PHI_MINUS, _p.PHI_PLUS),
    (_P.PHI_MINUS, _p.PHI_MINUS): (_P.PHI_PLUS, _p.PHI_MINUS),
}


def cnot_transition(p: PolBell, f: FreqBell) -> tuple[PolBell, FreqBell, KeepDecision]:
    """Map an input Bell pair through both CNOTs and the standard keep rule.

    >>> cnot_transition(PolBell.PSI_PLUS, FreqBell.PSI_PLUS)
    (<PolBell.PSI_PLUS: 'Psi+'>, <FreqBell.PHI_PLUS: 'phi+'>, <KeepDecision.KEEP: 'keep'>)
    """
    out_p, out_f = _TRANSITIONS[(PolBell(p), FreqBell(f))]
    return out_p, out_f, keep_decision(out_f)


_HADAMARD = {
    PolBell.PHI_PLUS: PolBell.PHI_PLUS,
    PolBell.PHI_MINUS: PolBell.PSI_PLUS,
    PolBell.PSI_PLUS: PolBell.PHI_MINUS,
    PolBell.PSI_MINUS: PolBell.PSI_MINUS,
}


def hadamard_relabel(p: PolBell) -> PolBell:
    """Bell label after a Hadamard on both polarization qubits (up to global sign)."""
    return _HADAMARD[PolBell(p)]
