import math

import pytest

from pdu_forge.analysis import (
    LogicalState,
    QubitEncoding,
    extract_logical,
    fidelity,
    photon_number_distribution,
    target_cluster4,
    target_ghz,
)
from pdu_forge.errors import DimensionMismatch
from pdu_forge.fock import StateVector, basis_state, make_registry

S2 = 1 / math.sqrt(2)


def test_extract_bell_pair():
    reg = make_registry(5)
    psi = StateVector(reg, {(1, 0, 1, 0, 0): S2, (0, 1, 0, 1, 0): -S2})
    logical = extract_logical(psi, [(0, 1), (2, 3)])
    assert logical.amplitudes == pytest.approx({"00": S2, "11": -S2})
    assert logical.leakage == 0


def test_leakage_counts_bunching_and_other_modes():
    reg = make_registry(5)
    psi = StateVector(reg, {(1, 0, 1, 0, 0): 0.6, (2, 0, 0, 0, 0): 0.48, (1, 0, 1, 0, 1): 0.64})
    logical = extract_logical(psi, [(0, 1), (2, 3)])
    assert logical.logical_probability == pytest.approx(0.36)
    assert logical.leakage == pytest.approx(0.64)


def test_extract_rejects_bad_rail():
    with pytest.raises(IndexError):
        extract_logical(basis_state(2, (1, 0)), [(0, 3)])


def test_encoding_rails_distinct():
    with pytest.raises(ValueError):
        QubitEncoding(((0, 1), (1, 2)))


def test_logical_state_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        LogicalState({"0": 1, "01": 0})


def test_fidelity_identical_and_orthogonal():
    a = target_ghz(3, 0.0)
    b = target_ghz(3, math.pi)
    assert fidelity(a, a) == pytest.approx(1)
    assert fidelity(a, b) == pytest.approx(0, abs=1e-15)


def test_fidelity_global_phase_invariant():
    t = target_cluster4()
    rotated = LogicalState({k: 1j * v for k, v in t.amplitudes.items()})
    assert fidelity(rotated, t) == pytest.approx(1)


def test_fidelity_state_vectors():
    a = basis_state(2, (1, 0))
    b = StateVector(make_registry(2), {(1, 0): S2, (0, 1): S2})
    assert fidelity(b, a) == pytest.approx(0.5)


def test_fidelity_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        fidelity(target_ghz(2), target_ghz(3))
    with pytest.raises(DimensionMismatch):
        fidelity(basis_state(2, (1, 0)), basis_state(3, (1, 0, 0)))
    with pytest.raises(DimensionMismatch):
        fidelity(basis_state(2, (1, 0)), target_ghz(2))


def test_targets_normalised():
    for t in (target_ghz(2), target_ghz(8, 1.3), target_cluster4()):
        assert t.logical_probability == pytest.approx(1)
    assert target_ghz(4, math.pi / 2).amplitudes["1111"] == pytest.approx(1j * S2)


def test_ghz_needs_two_qubits():
    with pytest.raises(ValueError):
        target_ghz(1)


def test_photon_number_distribution():
    psi = StateVector(make_registry(2), {(1, 0): 0.6, (1, 1): 0.8})
    assert photon_number_distribution(psi) == pytest.approx({1: 0.36, 2: 0.64})
