import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphiq.encoding import (
    CircuitFragment,
    EncodingError,
    encode,
    gate_count_bound,
    multiplexed_rotation,
    qubits_for,
    synthesize_state_prep,
)
from graphiq.simulator import Circuit, Gate, run

from oracles import circuit_unitary, multiplexor, phase_aligned, ry, rz


def prepared(fragment):
    c = Circuit([("g", fragment.num_qubits)])
    c.append_fragment(fragment, 0)
    return run(c).amplitudes


def test_encode_three_four():
    v = encode(np.array([3.0, 4.0]))
    assert v.gamma == 5.0
    np.testing.assert_allclose(v.amplitudes, [0.6, 0.8], atol=1e-15)
    assert v.num_qubits == 1


def test_encode_pads_with_zeros():
    # n = 4 landmarks -> 6 entries -> 3 qubits, positions 6 and 7 empty
    v = encode(np.arange(1.0, 7.0))
    assert v.num_qubits == 3 and v.dim == 6
    assert v.amplitudes[6] == 0.0 and v.amplitudes[7] == 0.0
    assert np.linalg.norm(v.amplitudes) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("bad", [np.zeros(5), np.array([1.0, np.nan]), np.array([])])
def test_encode_rejects(bad):
    with pytest.raises(EncodingError):
        encode(bad)


@pytest.mark.parametrize("d,n", [(1, 0), (2, 1), (3, 2), (6, 3), (8, 3), (190, 8)])
def test_qubits_for(d, n):
    assert qubits_for(d) == n


def test_basis_state_needs_no_gates():
    assert len(synthesize_state_prep(np.array([1.0, 0.0]))) == 0


def test_uniform_single_qubit_is_one_ry():
    frag = synthesize_state_prep(np.array([1.0, 1.0]) / math.sqrt(2))
    assert frag.gates == (Gate("RY", 0, frag.gates[0].angle),)
    assert frag.gates[0].angle == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("axis,rot", [("y", ry), ("z", rz)])
def test_multiplexor_matches_block_diagonal(k, axis, rot):
    rng = np.random.default_rng(100 + k)
    angles = rng.uniform(-math.pi, math.pi, size=1 << k)
    nq = k + 1
    controls = list(range(1, nq))
    gates = multiplexed_rotation(angles, axis, 0, controls)
    np.testing.assert_allclose(
        circuit_unitary(gates, nq), multiplexor(rot, angles, 0, controls, nq), atol=1e-12
    )


def test_multiplexor_with_scattered_controls():
    rng = np.random.default_rng(4)
    angles = rng.uniform(-3, 3, size=4)
    gates = multiplexed_rotation(angles, "y", 2, [0, 3])
    np.testing.assert_allclose(circuit_unitary(gates, 4), multiplexor(ry, angles, 2, [0, 3], 4), atol=1e-12)


def test_multiplexor_cx_count():
    # generic angles: 2^k rotations and 2^k CX
    angles = np.random.default_rng(8).uniform(0.1, 0.8, size=8)
    gates = multiplexed_rotation(angles, "y", 0, [1, 2, 3])
    kinds = [g.kind for g in gates]
    assert kinds.count("RY") == 8 and kinds.count("CX") == 8


def test_multiplexor_all_zero_is_empty():
    assert multiplexed_rotation(np.zeros(4), "z", 0, [1, 2]) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_state_prep_unitary_first_column(n):
    rng = np.random.default_rng(n)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    v /= np.linalg.norm(v)
    frag = synthesize_state_prep(v)
    u = circuit_unitary(frag.gates, n)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(1 << n), atol=1e-12)
    np.testing.assert_allclose(phase_aligned(u[:, 0], v), v, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(
    st.one_of(st.just(0.0), st.floats(1e-6, 1e3)), min_size=1 << n, max_size=1 << n)))
def test_state_prep_real_nonnegative(values):
    v = np.asarray(values)
    if not np.any(v > 0):
        v[0] = 1.0
    v = v / np.linalg.norm(v)
    frag = synthesize_state_prep(v)
    out = prepared(frag)
    np.testing.assert_allclose(phase_aligned(out, v), v, atol=1e-10)
    assert len(frag) <= gate_count_bound(frag.num_qubits)


def test_sparse_target_with_zero_padding():
    a = encode(np.array([0.0, 2.0, 0.0, 1.0, 0.0, 3.0]))
    out = prepared(synthesize_state_prep(a))
    np.testing.assert_allclose(phase_aligned(out, a.amplitudes), a.amplitudes, atol=1e-12)


def test_gate_count_grows_with_qubits():
    rng = np.random.default_rng(0)
    sizes = []
    for n in range(1, 8):
        v = rng.uniform(0.1, 1.0, size=1 << n)
        frag = synthesize_state_prep(v / np.linalg.norm(v))
        assert len(frag) <= gate_count_bound(n)
        sizes.append(len(frag))
    assert sizes == sorted(sizes) and sizes[-1] > 2 * sizes[-2] - 4


def test_rejects_unnormalised_target():
    with pytest.raises(ValueError):
        synthesize_state_prep(np.array([1.0, 1.0]))


def test_fragment_text_round_trip():
    rng = np.random.default_rng(2)
    v = rng.uniform(size=8)
    frag = synthesize_state_prep(v / np.linalg.norm(v))
    back = CircuitFragment.from_text(frag.to_text())
    assert back.gates == frag.gates and back.num_qubits == frag.num_qubits
