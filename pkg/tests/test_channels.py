import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperdistill.channels import (
    FreqMix,
    HyperState,
    PolMix,
    ValidationError,
    auxiliary_bitflip,
    freq_dephasing,
    freq_mix,
    hyper,
    pol_mix,
    scenario1,
    scenario2,
    scenario3,
)


def test_pol_mix_examples():
    assert pol_mix(0.25, 0.25, 0.25, 0.25).weights.tolist() == [0.25] * 4
    assert pol_mix(1).weights.tolist() == [1, 0, 0, 0]
    assert pol_mix(0.5, 0, 0.5, 0) == scenario1(0.5)


def test_pol_mix_renormalizes_rounded_input():
    m = pol_mix(0.3333333333, 0.3333333333, 0.3333333334, 0.0)
    assert abs(sum(m.weights) - 1.0) < 1e-15


@pytest.mark.parametrize("w", [(-0.1, 0.6, 0.5, 0.0), (0.5, 0.5, 0.5, 0.0), (0.5, 0.4, 0.0, 0.0)])
def test_pol_mix_rejects(w):
    with pytest.raises(ValidationError):
        pol_mix(*w)


def test_pol_mix_direct_constructor_requires_exact_sum():
    with pytest.raises(ValidationError):
        PolMix(0.5, 0.2, 0.2, 0.0)


def test_freq_dephasing():
    assert freq_dephasing(1).weights.tolist() == [1, 0, 0, 0]
    assert freq_dephasing(0.9).weights.tolist() == pytest.approx([0.9, 0.1, 0, 0])
    assert freq_dephasing(0).weights.tolist() == [0, 1, 0, 0]
    with pytest.raises(ValidationError):
        freq_dephasing(1.2)


def test_auxiliary_bitflip():
    assert auxiliary_bitflip(1).weights.tolist() == [1, 0, 0, 0]
    assert auxiliary_bitflip(0.8).weights.tolist() == pytest.approx([0.8, 0, 0.2, 0])
    assert auxiliary_bitflip(0.5).weights.tolist() == [0.5, 0, 0.5, 0]
    with pytest.raises(ValidationError):
        auxiliary_bitflip(-0.01)


def test_linear_mode_cannot_hold_phi():
    with pytest.raises(ValidationError):
        FreqMix(0.9, 0.0, 0.1, 0.0, mode="linear")
    assert freq_mix(0.7, 0.1, 0.1, 0.1).mode == "general"


def test_scenario_presets():
    assert scenario1(0.6, bf_share=0.25).weights.tolist() == pytest.approx([0.6, 0, 0.1, 0.3])
    assert scenario2(0.7).weights.tolist() == pytest.approx([0.7, 0.3, 0, 0])
    assert scenario3(0.6, 0.1, 0.2, 0.1).weights.tolist() == pytest.approx([0.6, 0.1, 0.2, 0.1])


def test_hyper_state_product():
    h = hyper(scenario1(0.7), freq_dephasing(0.9))
    np.testing.assert_allclose(h.joint_weights().sum(), 1.0)
    assert h.joint_weights()[0, 0] == pytest.approx(0.63)
    with pytest.raises(ValidationError):
        HyperState(scenario1(0.7), None)


@given(st.lists(st.floats(0, 10), min_size=4, max_size=4).filter(lambda w: sum(w) > 1e-3))
def test_constructors_normalize_or_fail(w):
    total = sum(w)
    scaled = [x / total for x in w]
    m = pol_mix(*scaled)
    assert abs(sum(m.weights) - 1.0) <= 1e-12
    if abs(total - 1.0) > 1e-6:
        with pytest.raises(ValidationError):
            pol_mix(*w)


@given(st.floats(0, 1))
def test_dephasing_never_populates_phi(F_f):
    m = freq_dephasing(F_f)
    assert m.phi_plus == 0.0 and m.phi_minus == 0.0
