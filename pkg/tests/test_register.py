import numpy as np
import pytest
from scipy.linalg import expm

from gaugesim import InvalidParameterError
from gaugesim.register import Register

RNG = np.random.default_rng(20240811)


def random_state(dims, fermionic=None) -> Register:
    size = int(np.prod(dims))
    vec = RNG.normal(size=size) + 1j * RNG.normal(size=size)
    vec /= np.linalg.norm(vec)
    return Register(dims, fermionic, vec)


def random_unitary(n: int) -> np.ndarray:
    m = RNG.normal(size=(n, n)) + 1j * RNG.normal(size=(n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def kron_chain(ops) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def jw_lowering(dims, fermionic, axis) -> np.ndarray:
    # string of Z factors on fermionic axes before `axis`
    sz = np.diag([1.0, -1.0]).astype(complex)
    psi = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    ops = []
    for i, d in enumerate(dims):
        if i < axis:
            ops.append(sz if fermionic[i] else np.eye(d, dtype=complex))
        elif i == axis:
            ops.append(psi)
        else:
            ops.append(np.eye(d, dtype=complex))
    return kron_chain(ops)


def test_flat_index_mixed_radix() -> None:
    reg = Register.basis_state((3, 3), (1, 2))
    assert reg.flat_index((1, 2)) == 5
    assert np.argmax(np.abs(reg.vector)) == 5


def test_apply_single_matches_kron() -> None:
    reg = random_state((3, 4))
    mat = random_unitary(3)
    expected = np.kron(mat, np.eye(4)) @ reg.vector
    reg.apply_single(0, mat)
    assert np.allclose(reg.vector, expected, atol=1e-13)

    reg = random_state((3, 4))
    mat = random_unitary(4)
    expected = np.kron(np.eye(3), mat) @ reg.vector
    reg.apply_single(1, mat)
    assert np.allclose(reg.vector, expected, atol=1e-13)


def test_apply_diagonal_matches_single() -> None:
    phases = np.exp(1j * RNG.normal(size=5))
    a = random_state((2, 5, 2))
    b = a.copy()
    a.apply_diagonal(1, phases)
    b.apply_single(1, np.diag(phases))
    assert np.allclose(a.vector, b.vector, atol=1e-14)


def test_apply_perm_semantics() -> None:
    reg = Register.basis_state((3,), (0,))
    reg.apply_perm(0, np.array([1, 2, 0]))
    assert np.allclose(reg.vector, [0, 1, 0])


def test_apply_perm_matches_matrix() -> None:
    perm = np.array([2, 0, 3, 1])
    mat = np.zeros((4, 4))
    mat[perm, np.arange(4)] = 1.0
    a = random_state((2, 4, 3))
    b = a.copy()
    a.apply_perm(1, perm)
    b.apply_single(1, mat)
    assert np.allclose(a.vector, b.vector, atol=1e-14)


def test_controlled_perm_cnot() -> None:
    reg = Register.basis_state((2, 2), (1, 0))
    perms = np.array([[0, 1], [1, 0]])
    reg.apply_controlled_perm(0, 1, perms)
    assert np.allclose(reg.vector, [0, 0, 0, 1])


@pytest.mark.parametrize("order", ["control_first", "target_first"])
def test_controlled_single_matches_blockdiag(order: str) -> None:
    dc, dt = 3, 4
    mats = np.stack([random_unitary(dt) for _ in range(dc)])
    if order == "control_first":
        dims, control, target = (dc, dt), 0, 1
        big = np.zeros((dc * dt, dc * dt), dtype=complex)
        for c in range(dc):
            proj = np.zeros((dc, dc))
            proj[c, c] = 1.0
            big += np.kron(proj, mats[c])
    else:
        dims, control, target = (dt, dc), 1, 0
        big = np.zeros((dc * dt, dc * dt), dtype=complex)
        for c in range(dc):
            proj = np.zeros((dc, dc))
            proj[c, c] = 1.0
            big += np.kron(mats[c], proj)
    reg = random_state(dims)
    expected = big @ reg.vector
    reg.apply_controlled_single(control, target, mats)
    assert np.allclose(reg.vector, expected, atol=1e-13)


def test_controlled_perm_matches_controlled_single() -> None:
    perms = np.stack([RNG.permutation(4) for _ in range(3)])
    mats = np.zeros((3, 4, 4), dtype=complex)
    for c in range(3):
        mats[c][perms[c], np.arange(4)] = 1.0
    a = random_state((4, 2, 3))
    b = a.copy()
    a.apply_controlled_perm(2, 0, perms)
    b.apply_controlled_single(2, 0, mats)
    assert np.allclose(a.vector, b.vector, atol=1e-14)


def test_mode_raising_anticommutes() -> None:
    dims = (2, 2, 2)
    ferm = (True, True, True)
    a = Register.basis_state(dims, (0, 0, 0), ferm)
    a.apply_mode_raising(0)
    a.apply_mode_raising(1)
    b = Register.basis_state(dims, (0, 0, 0), ferm)
    b.apply_mode_raising(1)
    b.apply_mode_raising(0)
    assert np.allclose(a.vector, -b.vector, atol=1e-15)
    # mode 1 raising after mode 0 is occupied picks up the string sign
    idx = a.flat_index((1, 1, 0))
    assert np.isclose(a.vector[idx], -1.0)


def test_mode_raising_matches_jw_matrix() -> None:
    dims = (2, 3, 2, 2)
    ferm = (True, False, True, True)
    reg = random_state(dims, ferm)
    raised = jw_lowering(dims, ferm, 2).conj().T @ reg.vector
    reg.apply_mode_raising(2)
    assert np.allclose(reg.vector, raised, atol=1e-14)


@pytest.mark.parametrize(
    "dims,ferm,modes",
    [
        ((2, 2), (True, True), (0, 1)),
        ((2, 2, 2), (True, True, True), (0, 2)),
        ((2, 3, 2), (True, False, True), (0, 2)),
        ((2, 2, 2, 2), (True, True, True, True), (3, 0)),
    ],
)
def test_fermion_rotation_matches_jw_exponential(dims, ferm, modes) -> None:
    coeff = RNG.normal(size=(2, 2)) + 1j * RNG.normal(size=(2, 2))
    cdag = {m: jw_lowering(dims, ferm, m).conj().T for m in modes}
    c = {m: cdag[m].conj().T for m in modes}
    big = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for i, u in enumerate(modes):
        for j, v in enumerate(modes):
            big += coeff[i, j] * (cdag[u] @ c[v])
    reg = random_state(dims, ferm)
    expected = expm(big) @ reg.vector
    reg.apply_fermion_rotation(modes, coeff)
    assert np.allclose(reg.vector, expected, atol=1e-12)


def test_controlled_fermion_rotation_matches_blockwise() -> None:
    dims = (3, 2, 2, 2)
    ferm = (False, True, True, True)
    coeffs = RNG.normal(size=(3, 2, 2)) + 1j * RNG.normal(size=(3, 2, 2))
    reg = random_state(dims, ferm)
    blocks = reg.vector.reshape(3, -1).copy()
    expected = np.zeros_like(blocks)
    for cval in range(3):
        sub = Register(dims[1:], ferm[1:], blocks[cval])
        sub.apply_fermion_rotation((0, 2), coeffs[cval])
        expected[cval] = sub.vector
    reg.apply_controlled_fermion_rotation(0, (1, 3), coeffs)
    assert np.allclose(reg.vector, expected.reshape(-1), atol=1e-13)


def test_controlled_fermion_rotation_requires_leading_control() -> None:
    reg = Register((2, 3, 2), (True, False, True))
    with pytest.raises(InvalidParameterError):
        reg.apply_controlled_fermion_rotation(1, (0, 2), np.zeros((3, 2, 2)))


def test_probability_weights() -> None:
    reg = Register((2, 3), None, np.array([1, 0, 0, 1, 1j, 1]) / 2.0)
    assert np.allclose(reg.probability_weights(0), [0.25, 0.75])
    assert np.allclose(reg.probability_weights(1), [0.5, 0.25, 0.25])


def test_overlap_and_normalize() -> None:
    a = Register((2, 2), None, np.array([1, 1j, 0, 0]) / np.sqrt(2))
    b = Register((2, 2), None, np.array([1, 0, 0, 0]))
    assert np.isclose(a.overlap(b), 1 / np.sqrt(2))
    c = Register((2, 2), None, np.array([2, 0, 0, 0]))
    c.normalize()
    assert np.isclose(c.norm(), 1.0)


def test_save_load_roundtrip(tmp_path) -> None:
    reg = random_state((3, 2, 2), (False, True, True))
    path = tmp_path / "state.npz"
    reg.save(path)
    back = Register.load(path)
    assert back.dims == reg.dims
    assert back.fermionic == reg.fermionic
    assert np.array_equal(back.vector, reg.vector)


def test_validation_errors() -> None:
    with pytest.raises(InvalidParameterError):
        Register((1, 2))
    with pytest.raises(InvalidParameterError):
        Register((3, 2), (True, True))
    with pytest.raises(InvalidParameterError):
        Register((2, 2), None, np.zeros(3))
    reg = Register((2, 2))
    with pytest.raises(InvalidParameterError):
        reg.apply_single(2, np.eye(2))
    with pytest.raises(InvalidParameterError):
        reg.apply_single(0, np.eye(3))
    with pytest.raises(InvalidParameterError):
        reg.apply_perm(0, np.array([0, 0]))
    with pytest.raises(InvalidParameterError):
        reg.apply_controlled_perm(0, 0, np.zeros((2, 2), dtype=np.int64))
    with pytest.raises(InvalidParameterError):
        reg.apply_mode_raising(0)
    zero = Register((2,), None, np.array([0.0, 0.0]))
    with pytest.raises(InvalidParameterError):
        zero.normalize()
