"""Self-consistency checks run by ``hyperdistill oracle-check``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hyperdistill import analytic, oracle
from hyperdistill.bellspace import FREQ_BELLS, POL_BELLS, FreqBell, KeepDecision, hadamard_relabel, cnot_transition
from hyperdistill.channels import auxiliary_bitflip, freq_dephasing, hyper, pol_mix
from hyperdistill.oracle import ConversionKind, ConversionModel
from hyperdistill.protocol import run_oracle, run_probability

EXACT_TOL = 1e-12
AGREE_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def oracle_transition(p, f):
    """Evolve a product Bell state through the bilateral CNOT and read off the dominant output.

    Returns ``(out_pol, out_freq, residual)`` where ``residual`` is the weight
    outside that single output.
    """
    out = oracle.cnot_unitary() @ oracle.product_bell_vector(p, f)
    amp = oracle.bell_decomposition(out)
    probs = np.abs(amp) ** 2
    i, j = np.unravel_index(np.argmax(probs), probs.shape)
    return POL_BELLS[i], FREQ_BELLS[j], float(1.0 - probs[i, j])


def check_psi_table() -> CheckResult:
    ok = 0
    worst = 0.0
    psi_inputs = [(p, f) for p in POL_BELLS for f in (FreqBell.PSI_PLUS, FreqBell.PSI_MINUS)]
    for p, f in psi_inputs:
        op, of, res = oracle_transition(p, f)
        tp, tf, dec = cnot_transition(p, f)
        expect_keep = of in (FreqBell.PHI_PLUS, FreqBell.PHI_MINUS)
        worst = max(worst, res)
        if (op, of) == (tp, tf) and res < EXACT_TOL and (dec is KeepDecision.KEEP) == expect_keep:
            ok += 1
    return CheckResult("psi-input transitions", ok == 8, f"{ok}/8 psi-input rows exact (max residual {worst:.1e})")


def check_extended_table() -> CheckResult:
    ok = 0
    for p in POL_BELLS:
        for f in FREQ_BELLS:
            op, of, res = oracle_transition(p, f)
            tp, tf, _ = cnot_transition(p, f)
            ok += (op, of) == (tp, tf) and res < EXACT_TOL
    return CheckResult("transition table", ok == 16, f"{ok}/16 product Bell inputs match the oracle")


def check_unitarity() -> CheckResult:
    U = oracle.cnot_unitary()
    err = max(np.max(np.abs(U.conj().T @ U - np.eye(16))), np.max(np.abs(U - U.conj().T)))
    return CheckResult("cnot unitary", err < EXACT_TOL, f"max |U^dag U - I|, |U - U^dag| = {err:.1e}")


def check_channels() -> CheckResult:
    worst = 0.0
    rng = np.random.default_rng(7)
    for kind in (ConversionKind.PER_PHOTON, ConversionKind.PER_PAIR):
        for eta in (0.0, 0.25, 0.5, 0.9, 1.0):
            kraus = oracle.conversion_channel(ConversionModel(kind, eta))
            worst = max(worst, np.max(np.abs(oracle.kraus_completeness(kraus) - np.eye(16))))
            w = rng.dirichlet(np.ones(4))
            rho = oracle.dm_from_hyper(hyper(pol_mix(*w), freq_dephasing(rng.random())))
            worst = max(worst, abs(np.trace(oracle.apply_channel(rho, kraus)) - 1.0))
    return CheckResult("conversion channels", worst < EXACT_TOL, f"trace preservation error {worst:.1e}")


def check_hadamard() -> CheckResult:
    had2 = np.kron(oracle._HAD, oracle._HAD)
    ok = 0
    for p in POL_BELLS:
        v = had2 @ oracle.pol_bell_vector(p)
        target = oracle.pol_bell_vector(hadamard_relabel(p))
        ok += abs(abs(np.vdot(target, v)) - 1.0) < EXACT_TOL
    return CheckResult("hadamard relabel", ok == 4, f"{ok}/4 labels agree with the gate")


def _grid(n=21):
    return np.linspace(0.0, 1.0, n)


def _close(a, b, tol=AGREE_TOL) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= tol


def check_equivalence(n: int = 21) -> CheckResult:
    """analytic == probability == oracle on an n x n grid for every scenario at eta = 1."""
    worst = 0.0
    mismatches = 0
    count = 0
    for F_p in _grid(n):
        for F_f in _grid(n):
            cases = [
                ("s1", "standard", pol_mix(F_p, 0, 1 - F_p, 0), freq_dephasing(F_f), 0.0),
                ("s2", "standard", pol_mix(F_p, 1 - F_p, 0, 0), freq_dephasing(F_f), 0.0),
                ("s2", "hadamard", pol_mix(F_p, 1 - F_p, 0, 0), freq_dephasing(F_f), 0.0),
                ("aux-s1", "standard", pol_mix(F_p, 0, 1 - F_p, 0), auxiliary_bitflip(F_f), 0.0),
            ]
            if F_p <= 0.9 + 1e-12:
                rest = max(1.0 - F_p - 0.1, 0.0)
                cases.append(("s3", "standard", pol_mix(F_p, 0.1, rest / 2, rest / 2), freq_dephasing(F_f), 0.1))
                cases.append(("aux-s3", "standard", pol_mix(F_p, 0.1, rest / 2, rest / 2),
                              auxiliary_bitflip(F_f), 0.1))
            for scen, variant, pol, freq, A in cases:
                h = hyper(pol, freq)
                if scen.startswith("aux"):
                    fa, ya, _ = analytic.petpsm_fidelity_yield(F_p, F_f, scen, A)
                else:
                    fa, ya, _ = analytic.scenario_fidelity_yield(
                        analytic.ScenarioParams(scen, F_p, F_f, A, pol.B, pol.C, 1.0, variant))
                pr = run_probability(h, variant)
                orc = run_oracle(h, variant)
                count += 1
                for x, y in ((fa, pr.F_p_prime), (fa, orc.F_p_prime), (ya, pr.Y), (ya, orc.Y)):
                    if not _close(x, y):
                        mismatches += 1
                    elif x is not None:
                        worst = max(worst, abs(x - y))
    return CheckResult("three-way equivalence", mismatches == 0,
                       f"{count} grid cases, {mismatches} mismatches, max |delta| = {worst:.1e}")


def run_all(grid: int = 21) -> list[CheckResult]:
    return [
        check_psi_table(),
        check_extended_table(),
        check_unitarity(),
        check_channels(),
        check_hadamard(),
        check_equivalence(grid),
    ]
