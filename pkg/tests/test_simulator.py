import random

import numpy as np
import pytest

from quditdc import (
    CheckMatrix,
    Partition,
    PauliWord,
    Protocol,
    ResourceLimitError,
    StateVector,
    UsageError,
    apply_encoding,
    apply_word,
    build_state,
    dense_matrix,
    orthogonality_check,
    protocol_from_free_sets,
    state_label,
    word_action,
    word_label,
)
from tests.helpers import bell_matrix, ghz_matrix, qutrit_partial_matrix, random_word


def test_state_vector_shape_and_norm():
    amp = np.zeros(4, dtype=complex)
    amp[0] = 1.0
    s = StateVector(2, 2, amp)
    assert s.dim == 4
    assert abs(s.norm() - 1.0) < 1e-12
    with pytest.raises(UsageError):
        StateVector(2, 2, np.zeros(3, dtype=complex))
    with pytest.raises(UsageError):
        s.overlap(StateVector(2, 1, np.zeros(2, dtype=complex)))


def test_word_action_golden_qubit_pair():
    # First qudit indexes the most significant digit.
    xi = PauliWord.from_pairs(2, [(1, 0), (0, 0)])
    targets, phases = word_action(xi)
    assert list(targets) == [2, 3, 0, 1]
    assert np.allclose(phases, 1.0)

    zi = PauliWord.from_pairs(2, [(0, 1), (0, 0)])
    targets, phases = word_action(zi)
    assert list(targets) == [0, 1, 2, 3]
    assert np.allclose(phases, [1, 1, -1, -1])


def test_word_action_cap():
    with pytest.raises(ResourceLimitError):
        word_action(PauliWord.identity(2, 4), cap=8)


@pytest.mark.parametrize("d,n", [(2, 2), (3, 2), (4, 1), (5, 2), (6, 1)])
def test_apply_word_matches_dense_matrix(d, n):
    rng = random.Random(40 + d * n)
    dim = d**n
    for _ in range(8):
        g = random_word(rng, d, n)
        amp = np.array(
            [rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1) for _ in range(dim)]
        )
        amp /= np.linalg.norm(amp)
        via_sparse = apply_word(StateVector(d, n, amp), g).amplitudes
        via_dense = dense_matrix(g) @ amp
        assert np.max(np.abs(via_sparse - via_dense)) < 1e-10


def test_build_state_bell_and_ghz():
    psi = build_state(bell_matrix(2))
    expected = np.zeros(4, dtype=complex)
    expected[0] = expected[3] = 1 / np.sqrt(2)
    assert abs(abs(np.vdot(expected, psi.amplitudes)) - 1.0) < 1e-9

    psi = build_state(ghz_matrix(3, 2))
    expected = np.zeros(9, dtype=complex)
    expected[0] = expected[4] = expected[8] = 1 / np.sqrt(3)
    assert abs(abs(np.vdot(expected, psi.amplitudes)) - 1.0) < 1e-9


def test_build_state_tracks_generator_phases():
    # -Z fixes |1>, +Z fixes |0>.
    minus_z = CheckMatrix(2, 1, rows=((0, 1),), phases=(2,))
    psi = build_state(minus_z)
    assert np.allclose(np.abs(psi.amplitudes), [0, 1])
    plus_z = CheckMatrix(2, 1, rows=((0, 1),), phases=(0,))
    psi = build_state(plus_z)
    assert np.allclose(np.abs(psi.amplitudes), [1, 0])


def test_build_state_requires_full_set_and_cap():
    with pytest.raises(UsageError):
        build_state(qutrit_partial_matrix())
    with pytest.raises(ResourceLimitError):
        build_state(bell_matrix(2), cap=2)


def test_state_label_of_base_state_is_zero():
    m = ghz_matrix(2, 3)
    psi = build_state(m)
    assert tuple(state_label(psi, m)) == (0, 0, 0)


@pytest.mark.parametrize("d,n", [(2, 2), (3, 2), (2, 3)])
def test_state_label_matches_word_label(d, n):
    """Dual route: the algebraic label of a word must equal the numeric
    eigenvalue exponents of the state that word produces."""
    m = ghz_matrix(d, n)
    psi = build_state(m)
    rng = random.Random(d * 7 + n)
    for _ in range(15):
        g = random_word(rng, d, n)
        moved = apply_word(psi, g)
        assert tuple(state_label(moved, m)) == tuple(word_label(g, m))


def test_state_label_none_for_superpositions():
    m = bell_matrix(2)
    psi = build_state(m)
    x1 = PauliWord.from_pairs(2, [(1, 0), (0, 0)])
    other = apply_word(psi, x1)  # different label, orthogonal
    mixed = StateVector(
        2, 2, (psi.amplitudes + other.amplitudes) / np.sqrt(2)
    )
    assert state_label(mixed, m) is None


def test_state_label_space_mismatch():
    psi = build_state(bell_matrix(2))
    with pytest.raises(UsageError):
        state_label(psi, bell_matrix(3))


def _bell_protocol(d: int) -> Protocol:
    m = bell_matrix(d)
    part = Partition.from_groups([[1]], [2], 2)
    return protocol_from_free_sets(m, part, [{1}], [{1}])


def test_apply_encoding_uses_combined_word():
    proto = _bell_protocol(3)
    psi = build_state(proto.matrix)
    got = apply_encoding(psi, proto, (5,))
    want = apply_word(psi, proto.encodings[0][5])
    assert np.max(np.abs(got.amplitudes - want.amplitudes)) < 1e-12


def test_orthogonality_full_mode_bell():
    rep = orthogonality_check(_bell_protocol(2), mode="full")
    assert rep.ok
    assert rep.mode == "full"
    assert rep.pairs_checked == 6
    assert rep.states == 4
    assert rep.max_overlap < 1e-9
    assert rep.worst_generator_residual < 1e-9


def test_orthogonality_detects_collisions():
    good = _bell_protocol(2)
    dup = Protocol(
        "column-sets",
        good.matrix,
        good.partition,
        ((good.encodings[0][0], good.encodings[0][0]),),
    )
    rep = orthogonality_check(dup, mode="full")
    assert not rep.ok
    assert abs(rep.max_overlap - 1.0) < 1e-9
    assert rep.worst_pair == ((0,), (1,))


def test_orthogonality_sample_mode_deterministic():
    proto = _bell_protocol(3)
    rep1 = orthogonality_check(proto, mode="sample", pairs=25, seed=3)
    rep2 = orthogonality_check(proto, mode="sample", pairs=25, seed=3)
    assert rep1.ok and rep2.ok
    assert rep1.pairs_checked == 25
    assert rep1.max_overlap == rep2.max_overlap
    assert rep1.worst_pair == rep2.worst_pair


def test_orthogonality_guards():
    proto = _bell_protocol(2)
    with pytest.raises(UsageError):
        orthogonality_check(proto, mode="everything")
    with pytest.raises(ResourceLimitError):
        orthogonality_check(proto, mode="full", pair_cap=2)
    single = Protocol(
        "column-sets",
        proto.matrix,
        proto.partition,
        ((proto.encodings[0][0],),),
    )
    with pytest.raises(UsageError):
        orthogonality_check(single, mode="sample")
