import itertools

import numpy as np
import pytest

from hyperdistill import oracle
from hyperdistill.bellspace import (
    FREQ_BELLS,
    POL_BELLS,
    FreqBell,
    KeepDecision,
    PolBell,
    freq_bell_vector,
    hadamard_relabel,
    keep_decision,
    pol_bell_vector,
    cnot_transition,
)

S = 1 / np.sqrt(2)
P, F = PolBell, FreqBell
KEEP, DISCARD = KeepDecision.KEEP, KeepDecision.DISCARD

TABLE_I = [
    ((P.PSI_PLUS, F.PSI_PLUS), (P.PSI_PLUS, F.PHI_PLUS, KEEP)),
    ((P.PSI_PLUS, F.PSI_MINUS), (P.PSI_MINUS, F.PHI_MINUS, KEEP)),
    ((P.PSI_MINUS, F.PSI_PLUS), (P.PSI_MINUS, F.PHI_PLUS, KEEP)),
    ((P.PSI_MINUS, F.PSI_MINUS), (P.PSI_PLUS, F.PHI_MINUS, KEEP)),
    ((P.PHI_PLUS, F.PSI_PLUS), (P.PHI_PLUS, F.PSI_PLUS, DISCARD)),
    ((P.PHI_PLUS, F.PSI_MINUS), (P.PHI_MINUS, F.PSI_MINUS, DISCARD)),
    ((P.PHI_MINUS, F.PSI_PLUS), (P.PHI_MINUS, F.PSI_PLUS, DISCARD)),
    ((P.PHI_MINUS, F.PSI_MINUS), (P.PHI_PLUS, F.PSI_MINUS, DISCARD)),
]


def test_pol_vectors():
    np.testing.assert_allclose(pol_bell_vector(P.PSI_PLUS), [0, S, S, 0])
    np.testing.assert_allclose(pol_bell_vector(P.PHI_PLUS), [S, 0, 0, S])
    for b in POL_BELLS:
        assert np.linalg.norm(pol_bell_vector(b)) == pytest.approx(1.0, abs=1e-15)


def test_freq_vectors():
    np.testing.assert_allclose(freq_bell_vector(F.PSI_PLUS), [0, S, S, 0])
    np.testing.assert_allclose(freq_bell_vector(F.PHI_MINUS), [S, 0, 0, -S])
    assert abs(np.vdot(freq_bell_vector(F.PSI_PLUS), freq_bell_vector(F.PSI_MINUS))) < 1e-15


def test_bell_bases_orthonormal():
    for vec in (pol_bell_vector, freq_bell_vector):
        M = np.column_stack([vec(b) for b in (POL_BELLS if vec is pol_bell_vector else FREQ_BELLS)])
        np.testing.assert_allclose(M.conj().T @ M, np.eye(4), atol=1e-15)


def test_serialization_names():
    assert [str(b) for b in POL_BELLS] == ["Psi+", "Psi-", "Phi+", "Phi-"]
    assert [str(b) for b in FREQ_BELLS] == ["psi+", "psi-", "phi+", "phi-"]
    assert PolBell("Phi-") is P.PHI_MINUS and FreqBell("phi-") is F.PHI_MINUS
    with pytest.raises(ValueError):
        PolBell("psi+")


@pytest.mark.parametrize("inp, expected", TABLE_I)
def test_psi_input_rows(inp, expected):
    assert cnot_transition(*inp) == expected


def test_phi_input_extension():
    assert cnot_transition(P.PSI_PLUS, F.PHI_PLUS) == (P.PSI_PLUS, F.PSI_PLUS, DISCARD)
    assert cnot_transition(P.PHI_PLUS, F.PHI_PLUS) == (P.PHI_PLUS, F.PHI_PLUS, KEEP)


def test_frozen_table_matches_oracle():
    """The frozen data (both halves) is what the 16x16 unitary produces."""
    U = oracle.cnot_unitary()
    for p, f in itertools.product(POL_BELLS, FREQ_BELLS):
        amp = oracle.bell_decomposition(U @ oracle.product_bell_vector(p, f))
        probs = np.abs(amp) ** 2
        op, of, _ = cnot_transition(p, f)
        i, j = POL_BELLS.index(op), FREQ_BELLS.index(of)
        assert probs[i, j] == pytest.approx(1.0, abs=1e-12)
        assert probs.sum() - probs[i, j] < 1e-12


def test_transition_is_bijective_involution():
    images = set()
    for p, f in itertools.product(POL_BELLS, FREQ_BELLS):
        op, of, _ = cnot_transition(p, f)
        images.add((op, of))
        back = cnot_transition(op, of)
        assert back[:2] == (p, f)
    assert len(images) == 16


def test_keep_depends_only_on_output_freq():
    for p, f in itertools.product(POL_BELLS, FREQ_BELLS):
        _, of, dec = cnot_transition(p, f)
        assert (dec is KEEP) == (of in (F.PHI_PLUS, F.PHI_MINUS))
        assert keep_decision(of) is dec


def test_hadamard_relabel():
    assert hadamard_relabel(P.PHI_MINUS) is P.PSI_PLUS
    assert hadamard_relabel(P.PSI_MINUS) is P.PSI_MINUS
    assert hadamard_relabel(P.PHI_PLUS) is P.PHI_PLUS
    assert hadamard_relabel(P.PSI_PLUS) is P.PHI_MINUS
    for b in POL_BELLS:
        assert hadamard_relabel(hadamard_relabel(b)) is b


def test_hadamard_relabel_matches_gate():
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    HH = np.kron(H, H)
    for b in POL_BELLS:
        overlap = np.vdot(pol_bell_vector(hadamard_relabel(b)), HH @ pol_bell_vector(b))
        assert abs(overlap) == pytest.approx(1.0, abs=1e-12)
