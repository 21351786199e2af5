"""One round of single-copy polarization distillation.

Two independent evaluation routes produce the same :class:`DistillationOutcome`:

* :func:`run_probability` enumerates Bell-label branches through the transition
  table (the Table-I bookkeeping, extended with converter-failure branches);
* :func:`run_oracle` pushes the full 16x16 density matrix through the gates,
  the Kraus channel and the frequency postselection.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from hyperdistill import oracle
from hyperdistill.bellspace import (
    FREQ_BELLS,
    POL_BELLS,
    FreqBell,
    KeepDecision,
    PolBell,
    hadamard_relabel,
    keep_decision,
    cnot_transition,
)
from hyperdistill.channels import LINEAR, HyperState
from hyperdistill.oracle import ConversionKind, ConversionModel, ModelMismatchError

PROB_FLOOR = 1e-15


class ProtocolVariant(str, enum.Enum):
    STANDARD = "standard"
    HADAMARD = "hadamard"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Branch:
    in_pol: PolBell
    in_freq: FreqBell
    conversion: str
    probability: float
    out_pol: PolBell
    out_freq: FreqBell
    decision: KeepDecision


@dataclass(frozen=True)
class DistillationOutcome:
    """Distilled fidelity ``F_p_prime``, yield ``Y`` and gain ``G``.

    ``F_p_prime`` and ``G`` are ``None`` when nothing survives postselection.
    ``branches`` is empty for oracle results. Output polarization labels in the
    branches are already mapped back to the original frame.
    """

    F_p: float
    F_p_prime: float | None
    Y: float
    G: float | None
    branches: tuple[Branch, ...] = ()
    notes: tuple[str, ...] = field(default=())

    @property
    def defined(self) -> bool:
        return self.F_p_prime is not None


def _check_model(m: ConversionModel) -> None:
    if m.kind is ConversionKind.ETA_CORRECTED:
        raise ModelMismatchError("eq9 values come from hyperdistill.analytic, not from a protocol run")


def _check_linear(h: HyperState) -> None:
    if h.freq.mode == LINEAR:
        assert h.freq.phi_plus == 0.0 and h.freq.phi_minus == 0.0


def _notes(h: HyperState, v: ProtocolVariant, m: ConversionModel) -> tuple[str, ...]:
    notes = []
    if not m.is_ideal:
        notes.append(f"physical converter model {m.kind}(eta={m.eta:g}); eta-corrected closed forms differ")
        if v is ProtocolVariant.STANDARD and h.pol.B == 0.0 and h.pol.C == 0.0:
            notes.append("phase-flip-only noise at eta<1: yield here is model-dependent, closed form has no eta term")
    return tuple(notes)


@lru_cache(maxsize=None)
def _transition_probs(fires_a: bool, fires_b: bool) -> np.ndarray:
    """Bell-label transition probabilities for one converter branch, [in_p, in_f, out_p, out_f].

    The both-fire branch is the frozen transition table; single-sided branches
    come from the oracle's unitary.
    """
    if fires_a and fires_b:
        t = np.zeros((4, 4, 4, 4))
        for i, p in enumerate(POL_BELLS):
            for j, f in enumerate(FREQ_BELLS):
                op, of, _ = cnot_transition(p, f)
                t[i, j, POL_BELLS.index(op), FREQ_BELLS.index(of)] = 1.0
    elif not fires_a and not fires_b:
        t = np.zeros((4, 4, 4, 4))
        for i in range(4):
            for j in range(4):
                t[i, j, i, j] = 1.0
    else:
        t = oracle.branch_transition_probs(fires_a, fires_b)
    t.setflags(write=False)
    return t


def _outcome(F_p: float, y: float, good: float, branches=(), notes=()) -> DistillationOutcome:
    if y < PROB_FLOOR:
        return DistillationOutcome(F_p, None, max(y, 0.0), None, tuple(branches), tuple(notes))
    f = min(max(good / y, 0.0), 1.0)
    return DistillationOutcome(F_p, f, min(y, 1.0), f - F_p, tuple(branches), tuple(notes))


def run_probability(
    h: HyperState,
    v: ProtocolVariant = ProtocolVariant.STANDARD,
    m: ConversionModel = oracle.IDEAL,
) -> DistillationOutcome:
    v = ProtocolVariant(v)
    _check_model(m)
    _check_linear(h)
    invert = v is ProtocolVariant.HADAMARD
    weights = h.joint_weights()
    branches = []
    y_terms, good_terms = [], []
    for name, p_conv, fa, fb in m.branches():
        table = _transition_probs(fa, fb)
        for i, in_p in enumerate(POL_BELLS):
            # the Hadamard relabels polarization before the converters
            src_p = hadamard_relabel(in_p) if invert else in_p
            si = POL_BELLS.index(src_p)
            for j, in_f in enumerate(FREQ_BELLS):
                w = weights[i, j] * p_conv
                if w == 0.0:
                    continue
                for oi, out_p in enumerate(POL_BELLS):
                    for oj, out_f in enumerate(FREQ_BELLS):
                        t = table[si, j, oi, oj]
                        if t == 0.0:
                            continue
                        final_p = hadamard_relabel(out_p) if invert else out_p
                        decision = keep_decision(out_f, invert=invert)
                        prob = w * t
                        branches.append(Branch(in_p, in_f, name, float(prob), final_p, out_f, decision))
                        if decision is KeepDecision.KEEP:
                            y_terms.append(prob)
                            if final_p is PolBell.PSI_PLUS:
                                good_terms.append(prob)
    y = math.fsum(y_terms)
    good = math.fsum(good_terms)
    return _outcome(h.F_p, y, good, branches, _notes(h, v, m))


def run_oracle(
    h: HyperState,
    v: ProtocolVariant = ProtocolVariant.STANDARD,
    m: ConversionModel = oracle.IDEAL,
) -> DistillationOutcome:
    v = ProtocolVariant(v)
    _check_model(m)
    _check_linear(h)
    res = oracle.evolve(h, m, hadamard=v is ProtocolVariant.HADAMARD)
    if res.rho_pol is None:
        return DistillationOutcome(h.F_p, None, res.p_keep, None, (), _notes(h, v, m))
    return _outcome(h.F_p, res.p_keep, res.fidelity * res.p_keep, (), _notes(h, v, m))


def run(h: HyperState, v=ProtocolVariant.STANDARD, m: ConversionModel = oracle.IDEAL, source: str = "probability"):
    if source == "probability":
        return run_probability(h, v, m)
    if source == "oracle":
        return run_oracle(h, v, m)
    raise ValueError(f"unknown source {source!r}")
