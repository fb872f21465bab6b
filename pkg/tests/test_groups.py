import numpy as np
import pytest

from gaugesim import CyclicGroup, InvalidParameterError, QuaternionGroup, make_group


def _check_axioms(group) -> None:
    n = group.order
    table = group.table
    for a in range(n):
        assert table[group.identity, a] == a
        assert table[a, group.identity] == a
        assert table[a, group.inverse(a)] == group.identity
        assert table[group.inverse(a), a] == group.identity
    for a in range(n):
        for b in range(n):
            for c in range(n):
                assert table[table[a, b], c] == table[a, table[b, c]]


def _check_faithful(group) -> None:
    mats = group.faithful
    for a in range(group.order):
        assert np.allclose(mats[a].conj().T @ mats[a], np.eye(group.faithful_dim))
        for b in range(group.order):
            assert np.allclose(mats[a] @ mats[b], mats[group.compose(a, b)], atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6, 8])
def test_cyclic_axioms(d: int) -> None:
    group = CyclicGroup(d)
    _check_axioms(group)
    _check_faithful(group)
    assert group.is_abelian
    assert group.compose(1, d - 1) == 0
    assert group.inverse(1) == d - 1


def test_cyclic_characters() -> None:
    group = CyclicGroup(4)
    assert np.allclose(group.characters, [1, 1j, -1, -1j])


def test_cyclic_rejects_small_d() -> None:
    with pytest.raises(InvalidParameterError):
        CyclicGroup(1)


@pytest.mark.parametrize("name", ["z2", "z3", "z5", "z8", "q8"])
def test_fourier_unitary(name: str) -> None:
    group = make_group(name)
    f = group.fourier
    assert np.allclose(f @ f.conj().T, np.eye(group.order), atol=1e-12)
    assert np.allclose(f.conj().T @ f, np.eye(group.order), atol=1e-12)


def test_fourier_d2_hadamard() -> None:
    f = CyclicGroup(2).fourier
    assert np.allclose(f, np.array([[1, 1], [1, -1]]) / np.sqrt(2))


@pytest.mark.parametrize("d", [3, 5, 8])
def test_fourier_diagonalizes_shift(d: int) -> None:
    # F^dag diag(w^n) F equals the one-step shift permutation.
    group = CyclicGroup(d)
    f = group.fourier
    shift = np.zeros((d, d))
    for k in range(d):
        shift[(k + 1) % d, k] = 1.0
    recon = f.conj().T @ np.diag(np.exp(2j * np.pi * np.arange(d) / d)) @ f
    assert np.allclose(recon, shift, atol=1e-12)


def test_quaternion_structure() -> None:
    group = QuaternionGroup()
    _check_axioms(group)
    _check_faithful(group)
    assert not group.is_abelian
    assert group.order == 8
    assert group.labels == ["1", "-1", "ix", "-ix", "iy", "-iy", "iz", "-iz"]
    # i sigma_x * i sigma_y = -i sigma_z
    assert group.compose(2, 4) == 7
    assert group.compose(4, 2) == 6
    # every non-central element squares to -1
    for g in range(2, 8):
        assert group.compose(g, g) == 1
        assert group.inverse(g) == (g + 1 if g % 2 == 0 else g - 1)


def test_quaternion_characters() -> None:
    group = QuaternionGroup()
    assert np.allclose(group.characters, [2, -2, 0, 0, 0, 0, 0, 0])


def test_quaternion_center() -> None:
    group = QuaternionGroup()
    center = [
        g
        for g in range(8)
        if all(group.compose(g, h) == group.compose(h, g) for h in range(8))
    ]
    assert center == [0, 1]


@pytest.mark.parametrize("side", ["left", "right"])
def test_fourier_blocks_group_action(side: str) -> None:
    # Multiplication permutations conjugate to block-diagonal matrices
    # in the irrep basis, so block truncations are action-invariant.
    group = QuaternionGroup()
    f = group.fourier
    blocks = group.irrep_row_slices
    for h in range(8):
        perm = group.left_action_perm(h) if side == "left" else group.right_action_perm(h)
        pmat = np.zeros((8, 8))
        pmat[perm, np.arange(8)] = 1.0
        conj = f @ pmat @ f.conj().T
        mask = np.zeros((8, 8), dtype=bool)
        for block in blocks:
            mask[block, block] = True
        assert np.max(np.abs(conj[~mask])) < 1e-12


def test_action_perm_semantics() -> None:
    group = CyclicGroup(5)
    assert list(group.left_action_perm(1)) == [1, 2, 3, 4, 0]
    assert list(group.right_action_perm(2)) == [2, 3, 4, 0, 1]
    assert list(group.inversion_perm()) == [0, 4, 3, 2, 1]
    q8 = QuaternionGroup()
    for h in range(8):
        left = q8.left_action_perm(h)
        right = q8.right_action_perm(h)
        for g in range(8):
            assert left[g] == q8.compose(h, g)
            assert right[g] == q8.compose(g, h)


def test_quaternion_casimir_rows() -> None:
    group = QuaternionGroup()
    assert group.truncated_dim == 5
    assert np.allclose(group.casimir_values, [0.0, 0.75, 0.75, 0.75, 0.75])
    assert group.irrep_dims == (1, 2, 1, 1, 1)
    spans = group.irrep_row_slices
    assert spans[0] == slice(0, 1)
    assert spans[1] == slice(1, 5)


def test_make_group_names() -> None:
    assert make_group("z6").order == 6
    assert make_group("Q8").order == 8
    with pytest.raises(InvalidParameterError):
        make_group("su2")
    with pytest.raises(InvalidParameterError):
        make_group("zx")
