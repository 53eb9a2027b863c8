import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdu_forge.errors import OccupancyOverflow, PduOutputOccupied, PumpOccupancyUnsupported
from pdu_forge.fock import StateVector, basis_state, inner_product, make_registry, norm
from pdu_forge.optics import (
    BeamSplitterSpec,
    PduParams,
    apply_beamsplitter,
    apply_crosser,
    apply_pdu,
    apply_phase,
)
import oracles
from oracles import random_terms

S2 = 1 / math.sqrt(2)
# PDU mode layout used below: in, out_s, out_i, pdc_fail, puc_s_fail, puc_i_fail
IN, OS, OI, PF, SF, IF = range(6)
RES = (PF, SF, IF)


def pdu_input(n_modes=6):
    occ = [0] * n_modes
    occ[IN] = 1
    return basis_state(n_modes, occ)


# -- beam splitter ------------------------------------------------------------


def test_bs_single_photon_split():
    out = apply_beamsplitter(basis_state(2, (1, 0)), 0, 1)
    assert dict(out.terms) == pytest.approx({(1, 0): S2, (0, 1): 1j * S2})


def test_bs_hong_ou_mandel():
    out = apply_beamsplitter(basis_state(2, (1, 1)), 0, 1)
    assert set(out.terms) == {(2, 0), (0, 2)}
    assert out.amplitude((2, 0)) == pytest.approx(1j * S2, abs=1e-15)
    assert out.amplitude((0, 2)) == pytest.approx(1j * S2, abs=1e-15)


def test_bs_spec_rejects_out_of_range_theta():
    with pytest.raises(ValueError):
        BeamSplitterSpec(theta=2.0)


def test_bs_overflow():
    with pytest.raises(OccupancyOverflow):
        apply_beamsplitter(basis_state(2, (1, 1), n_max=1), 0, 1)


@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4, 1.2, math.pi / 2])
def test_bs_matches_dense_oracle_two_modes(rng, theta):
    n_max = 3
    for _ in range(10):
        terms = random_terms(rng, 2, n_max, 6)
        psi = StateVector(make_registry(2), terms, n_max=n_max)
        got = apply_beamsplitter(psi, 0, 1, BeamSplitterSpec(theta))
        u = oracles.beamsplitter_unitary(0, 1, theta, 2, n_max)
        want = u @ oracles.to_dense(terms, 2, n_max)
        np.testing.assert_allclose(oracles.to_dense(got.terms, 2, n_max), want, atol=1e-12)


def test_bs_inverse_is_conjugate_convention(rng):
    for _ in range(20):
        theta = rng.uniform(0, math.pi / 2)
        psi = StateVector(make_registry(3), random_terms(rng, 3, 3, 6), n_max=3)
        there = apply_beamsplitter(psi, 0, 2, BeamSplitterSpec(theta))
        back = apply_beamsplitter(there, 0, 2, BeamSplitterSpec(theta, conjugate=True))
        for occ in set(psi.terms) | set(back.terms):
            assert back.amplitude(occ) == pytest.approx(psi.amplitude(occ), abs=1e-12)


# -- phase and crosser ----------------------------------------------------------


def test_phase_pi_flips_single_photon():
    out = apply_phase(basis_state(1, (1,)), 0, math.pi)
    assert out.amplitude((1,)) == pytest.approx(-1, abs=1e-15)


def test_phase_leaves_vacuum():
    out = apply_phase(basis_state(1, (0,)), 0, 1.234)
    assert out.amplitude((0,)) == 1


def test_phase_is_n_fold():
    out = apply_phase(basis_state(1, (2,)), 0, math.pi / 2)
    assert out.amplitude((2,)) == pytest.approx(-1, abs=1e-15)


def test_phase_matches_dense_oracle(rng):
    terms = random_terms(rng, 3, 3, 8)
    psi = StateVector(make_registry(3), terms, n_max=3)
    got = apply_phase(psi, 1, 0.77)
    want = oracles.phase_unitary(1, 0.77, 3, 3) @ oracles.to_dense(terms, 3, 3)
    np.testing.assert_allclose(oracles.to_dense(got.terms, 3, 3), want, atol=1e-12)


def test_crosser_moves_photon():
    assert dict(apply_crosser(basis_state(2, (1, 0)), 0, 1).terms) == {(0, 1): 1}


def test_crosser_symmetric_case():
    assert dict(apply_crosser(basis_state(2, (1, 1)), 0, 1).terms) == {(1, 1): 1}


def test_crosser_is_involution(rng):
    for _ in range(20):
        psi = StateVector(make_registry(4), random_terms(rng, 4, 3, 6), n_max=3)
        twice = apply_crosser(apply_crosser(psi, 0, 3), 0, 3)
        assert dict(twice.terms) == dict(psi.terms)


# -- PDU ------------------------------------------------------------------------


def test_pdu_deterministic_limit():
    out = apply_pdu(pdu_input(), IN, OS, OI, RES, PduParams())
    assert dict(out.terms) == {(0, 1, 1, 0, 0, 0): -1j}


def test_pdu_no_conversion():
    out = apply_pdu(pdu_input(), IN, OS, OI, RES, PduParams(eta_pdc=0.0))
    assert dict(out.terms) == {(0, 0, 0, 1, 0, 0): 1}


def test_pdu_partial_pdc_probabilities():
    out = apply_pdu(pdu_input(), IN, OS, OI, RES, PduParams(eta_pdc=0.81))
    both = sum(abs(a) ** 2 for occ, a in out.items() if occ[OS] == 1 and occ[OI] == 1)
    failed = sum(abs(a) ** 2 for occ, a in out.items() if occ[PF] == 1)
    assert both == pytest.approx(0.81, abs=1e-15)
    assert failed == pytest.approx(0.19, abs=1e-15)


def test_pdu_all_branches_against_enumeration():
    p = PduParams(0.7, 0.6, 0.9)
    out = apply_pdu(pdu_input(), IN, OS, OI, RES, p)
    # brute-force enumeration of the independent conversion events
    expected = {
        (0, 0, 0, 1, 0, 0): 0.3,
        (0, 1, 1, 0, 0, 0): 0.7 * 0.6 * 0.9,
        (0, 1, 0, 0, 0, 1): 0.7 * 0.6 * 0.1,
        (0, 0, 1, 0, 1, 0): 0.7 * 0.4 * 0.9,
        (0, 0, 0, 0, 1, 1): 0.7 * 0.4 * 0.1,
    }
    assert {k: abs(a) ** 2 for k, a in out.items()} == pytest.approx(expected, abs=1e-15)
    assert norm(out) == pytest.approx(1, abs=1e-15)
    # converted terms carry the -i down-conversion phase
    assert out.amplitude((0, 1, 1, 0, 0, 0)) / abs(out.amplitude((0, 1, 1, 0, 0, 0))) == pytest.approx(-1j)


def test_pdu_vacuum_passes_through():
    out = apply_pdu(basis_state(6, (0,) * 6), IN, OS, OI, RES)
    assert dict(out.terms) == {(0,) * 6: 1}


def test_pdu_rejects_two_pump_photons():
    with pytest.raises(PumpOccupancyUnsupported):
        apply_pdu(basis_state(6, (2, 0, 0, 0, 0, 0)), IN, OS, OI, RES)


def test_pdu_rejects_occupied_output():
    with pytest.raises(PduOutputOccupied):
        apply_pdu(basis_state(6, (1, 1, 0, 0, 0, 0)), IN, OS, OI, RES)


def test_pdu_doubles_photon_number():
    out = apply_pdu(pdu_input(7), IN, OS, OI, RES)
    assert all(sum(occ) == 2 for occ in out.terms)


def test_pdu_params_bounds():
    with pytest.raises(ValueError):
        PduParams(eta_pdc=1.1)
    with pytest.raises(ValueError):
        PduParams(eta_puc_i=-0.1)


# -- linearity and norm ---------------------------------------------------------

_etas = st.floats(0, 1)


@settings(max_examples=60, deadline=None)
@given(eta_pdc=_etas, eta_s=_etas, eta_i=_etas, alpha=st.complex_numbers(max_magnitude=1, allow_nan=False), beta=st.complex_numbers(max_magnitude=1, allow_nan=False))
def test_pdu_linear_on_superpositions(eta_pdc, eta_s, eta_i, alpha, beta):
    if abs(alpha) < 1e-3 or abs(beta) < 1e-3:
        return
    p = PduParams(eta_pdc, eta_s, eta_i)
    reg = make_registry(7)
    x = (1, 0, 0, 0, 0, 0, 0)
    y = (0, 0, 0, 0, 0, 0, 1)
    n = math.hypot(abs(alpha), abs(beta))
    a, b = alpha / n, beta / n
    mixed = apply_pdu(StateVector(reg, {x: a, y: b}), IN, OS, OI, RES, p)
    px = apply_pdu(StateVector(reg, {x: 1}), IN, OS, OI, RES, p)
    py = apply_pdu(StateVector(reg, {y: 1}), IN, OS, OI, RES, p)
    for occ in set(mixed.terms) | set(px.terms) | set(py.terms):
        assert mixed.amplitude(occ) == pytest.approx(a * px.amplitude(occ) + b * py.amplitude(occ), abs=1e-12)
    assert norm(mixed) == pytest.approx(1, abs=1e-10)


def test_linear_elements_commute_with_superposition(rng):
    reg = make_registry(3)
    for _ in range(20):
        tx, ty = random_terms(rng, 3, 2, 3), random_terms(rng, 3, 2, 3)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        combo = {}
        for k, v in tx.items():
            combo[k] = combo.get(k, 0) + a * v
        for k, v in ty.items():
            combo[k] = combo.get(k, 0) + b * v
        ops = [
            lambda s: apply_beamsplitter(s, 0, 2, BeamSplitterSpec(0.4)),
            lambda s: apply_phase(s, 1, 2.1),
            lambda s: apply_crosser(s, 1, 2),
        ]
        for op in ops:
            lhs = op(StateVector(reg, combo, n_max=3, prune_epsilon=0))
            rx = op(StateVector(reg, tx, n_max=3, prune_epsilon=0))
            ry = op(StateVector(reg, ty, n_max=3, prune_epsilon=0))
            for occ in set(lhs.terms) | set(rx.terms) | set(ry.terms):
                assert lhs.amplitude(occ) == pytest.approx(a * rx.amplitude(occ) + b * ry.amplitude(occ), abs=1e-12)
