import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdistill.bellspace import KeepDecision, PolBell
from hyperdistill.channels import auxiliary_bitflip, freq_dephasing, hyper, pol_mix, scenario1, scenario2, scenario3
from hyperdistill.oracle import ConversionKind, ConversionModel, ModelMismatchError
from hyperdistill.protocol import ProtocolVariant, run_oracle, run_probability

STD, HAD = ProtocolVariant.STANDARD, ProtocolVariant.HADAMARD
RUNNERS = [run_probability, run_oracle]


@pytest.mark.parametrize("run", RUNNERS)
def test_headline_gain(run):
    out = run(hyper(scenario1(0.5), freq_dephasing(1.0)))
    assert out.F_p_prime == pytest.approx(1.0, abs=1e-12)
    assert out.Y == pytest.approx(0.5, abs=1e-12)
    assert out.G == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("run", RUNNERS)
def test_hadamard_scenario2(run):
    out = run(hyper(scenario2(0.7), freq_dephasing(0.9)), HAD)
    assert out.F_p_prime == pytest.approx(0.9, abs=1e-12)
    assert out.Y == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("run", RUNNERS)
def test_scenario3_point(run):
    out = run(hyper(scenario3(0.6, 0.1, 0.2, 0.1), freq_dephasing(0.95)))
    assert out.F_p_prime == pytest.approx(0.575 / 0.7, abs=1e-12)
    assert out.Y == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("run", RUNNERS)
def test_pure_input(run):
    out = run(hyper(pol_mix(1), freq_dephasing(1)))
    assert (out.F_p_prime, out.Y, out.G) == pytest.approx((1.0, 1.0, 0.0), abs=1e-12)


@pytest.mark.parametrize("run", RUNNERS)
def test_scenario1_fidelity_equals_ff(run):
    out = run(hyper(scenario1(0.7), freq_dephasing(0.9)))
    assert out.F_p_prime == pytest.approx(0.9, abs=1e-12)
    assert out.Y == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("run", RUNNERS)
def test_nothing_kept_is_undefined(run):
    out = run(hyper(scenario1(0.0), freq_dephasing(0.5)))
    assert out.F_p_prime is None and out.G is None and out.Y == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("run", RUNNERS)
def test_eta_corrected_model_rejected(run):
    with pytest.raises(ModelMismatchError):
        run(hyper(scenario1(0.5), freq_dephasing(1.0)), STD, ConversionModel(ConversionKind.ETA_CORRECTED, 0.5))


def test_branch_bookkeeping_mirrors_table():
    h = hyper(scenario3(0.6, 0.1, 0.2, 0.1), freq_dephasing(0.95))
    out = run_probability(h)
    assert len(out.branches) == 8
    kept = [b for b in out.branches if b.decision is KeepDecision.KEEP]
    assert math.fsum(b.probability for b in kept) == pytest.approx(out.Y, abs=1e-15)
    good = math.fsum(b.probability for b in kept if b.out_pol is PolBell.PSI_PLUS)
    assert good == pytest.approx(out.F_p_prime * out.Y, abs=1e-15)
    assert math.fsum(b.probability for b in out.branches) == pytest.approx(1.0, abs=1e-15)


@st.composite
def states(draw, aux=False):
    w = np.array([draw(st.floats(0, 1)) for _ in range(4)]) + 1e-6
    w /= w.sum()
    fx = draw(st.floats(0, 1))
    return hyper(pol_mix(*w), auxiliary_bitflip(fx) if aux else freq_dephasing(fx))


models = st.one_of(
    st.just(ConversionModel()),
    st.builds(ConversionModel, st.sampled_from([ConversionKind.PER_PHOTON, ConversionKind.PER_PAIR]),
              st.floats(0, 1)),
)


@given(st.one_of(states(), states(aux=True)), st.sampled_from([STD, HAD]), models)
@settings(max_examples=80, deadline=None)
def test_probability_path_equals_oracle(h, v, m):
    a, b = run_probability(h, v, m), run_oracle(h, v, m)
    assert a.Y == pytest.approx(b.Y, abs=1e-9)
    if a.Y > 1e-9:
        assert a.F_p_prime == pytest.approx(b.F_p_prime, abs=1e-9)


@given(states(), st.sampled_from([STD, HAD]), models)
@settings(max_examples=60, deadline=None)
def test_outcome_bounds(h, v, m):
    out = run_probability(h, v, m)
    assert 0.0 <= out.Y <= 1.0
    if out.defined:
        assert 0.0 <= out.F_p_prime <= 1.0
        assert out.G == pytest.approx(out.F_p_prime - h.F_p)
        # only Psi+ and (for the standard protocol) Psi- inputs can emit Psi+
        emitters = {b.in_pol for b in out.branches if b.out_pol is PolBell.PSI_PLUS and b.decision.value == "keep"}
        cap = sum(h.pol.weight(p) for p in emitters)
        assert out.F_p_prime * out.Y <= cap + 1e-12


@given(st.floats(0, 1), st.floats(0, 1))
def test_yield_independent_of_ff(F_p, share):
    pol = scenario3(F_p * 0.8, 0.1, (1 - F_p * 0.8 - 0.1) * share, (1 - F_p * 0.8 - 0.1) * (1 - share))
    ys = [run_probability(hyper(pol, freq_dephasing(f))).Y for f in (0, 0.25, 0.5, 0.75, 1)]
    assert max(ys) - min(ys) < 1e-12


@given(st.floats(0.01, 1), st.floats(0, 1))
def test_scenario1_gain_sign(F_p, F_f):
    out = run_probability(hyper(scenario1(F_p), freq_dephasing(F_f)))
    if abs(F_f - F_p) > 1e-12:
        assert np.sign(out.G) == np.sign(F_f - F_p)


@given(st.floats(0.001, 0.999), st.floats(0, 1))
def test_aux_scenario1_gain_iff_fa_above_half(F_p, F_a):
    out = run_probability(hyper(scenario1(F_p), auxiliary_bitflip(F_a)))
    if abs(F_a - 0.5) > 1e-9:
        assert (out.G > 0) == (F_a > 0.5)


@given(st.floats(0, 1), st.floats(0, 1))
def test_aux_scenario1_yield_floor(F_p, F_a):
    out = run_probability(hyper(scenario1(F_p), auxiliary_bitflip(F_a)))
    assert out.Y == pytest.approx(F_p * F_a + (1 - F_p) * (1 - F_a), abs=1e-12)
    if (F_p >= 0.5 and F_a >= 0.5) or (F_p <= 0.5 and F_a <= 0.5):
        assert out.Y >= 0.5 - 1e-12


@given(st.floats(0.01, 1), st.floats(0, 1))
def test_hadamard_scenario2_independent_of_fp(F_p, F_f):
    out = run_oracle(hyper(scenario2(F_p), freq_dephasing(F_f)), HAD)
    assert out.F_p_prime == pytest.approx(F_f, abs=1e-9)


def test_eta_notes_flag_model_gap():
    out = run_probability(hyper(scenario2(0.7), freq_dephasing(0.9)), STD,
                          ConversionModel(ConversionKind.PER_PAIR, 0.5))
    assert any("phase-flip-only" in n for n in out.notes)
    assert run_probability(hyper(scenario2(0.7), freq_dephasing(0.9))).notes == ()


def test_per_pair_eta_semantics():
    # failed conversion leaves psi+- in place, which the standard rule discards
    h = hyper(scenario1(0.7), freq_dephasing(0.9))
    out = run_probability(h, STD, ConversionModel(ConversionKind.PER_PAIR, 0.5))
    assert out.Y == pytest.approx(0.35, abs=1e-12)
    assert out.F_p_prime == pytest.approx(0.9, abs=1e-12)
