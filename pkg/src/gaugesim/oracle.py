"""Exact reference evolution for the circuit models.

Hamiltonians are kept as structured sums of primitive terms grouped by
named member, e.g. ``("electric", link)`` or ``("hopping", bond)``, so
observables can take per-member expectations while the matrix-vector
product uses a flattened fast path: one combined diagonal, a list of
axis rolls (cyclic shift products never need stored index arrays), and
one merged sparse matrix.

Time evolution uses a Lanczos propagator with adaptive substeps.  The
Krylov basis is stored when it fits comfortably in memory; otherwise
the recurrence runs twice (coefficients first, accumulation second).

The chain Hamiltonian lives in the truncated link basis: the trivial
irrep row plus the four rows of the defining two-dimensional irrep.
Gauge transformations are block diagonal there, so the truncation
commutes with the Gauss-law projector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import LinearOperator, eigsh

from .circuits import ChainModel, SquareModel
from .errors import InvalidParameterError, NumericFailureError
from .gates import unitary_log
from .groups import FiniteGroup, QuaternionGroup
from .register import Register

__all__ = [
    "ConstTerm",
    "ProductDiagTerm",
    "RollTerm",
    "MatrixTerm",
    "SparseOperator",
    "square_hamiltonian",
    "chain_hamiltonian",
    "bond_forward_matrix",
    "dense_bond_hamiltonian",
    "truncation_matrix",
    "restrict_chain_state",
    "embed_chain_state",
    "apply_gauss_register",
    "chain_gauss_apply",
    "chain_gauss_project",
    "square_star_shift",
    "SectorBasis",
    "exact_evolve",
    "ground_state",
    "hermiticity_error",
]


# -- primitive terms ----------------------------------------------------


@dataclass
class ConstTerm:
    value: float

    def diag_vector(self, dims: tuple[int, ...]) -> np.ndarray:
        return np.full(int(np.prod(dims)), self.value)

    def expectation(self, vec: np.ndarray, dims: tuple[int, ...]) -> complex:
        return self.value * np.vdot(vec, vec)


@dataclass
class ProductDiagTerm:
    """coeff * prod_i f_i(k_{axis_i}) as a diagonal, optionally + c.c."""

    axes: tuple[int, ...]
    factors: tuple[np.ndarray, ...]
    coeff: complex
    pair: bool = False

    def diag_vector(self, dims: tuple[int, ...]) -> np.ndarray:
        grid = np.ones((1,) * len(dims), dtype=np.complex128)
        for axis, vals in zip(self.axes, self.factors):
            shape = [1] * len(dims)
            shape[axis] = dims[axis]
            grid = grid * np.asarray(vals).reshape(shape)
        grid = np.broadcast_to(self.coeff * grid, dims)
        if self.pair:
            return 2.0 * grid.real.reshape(-1)
        return grid.reshape(-1).copy()

    def expectation(self, vec: np.ndarray, dims: tuple[int, ...]) -> complex:
        return np.sum(self.diag_vector(dims) * np.abs(vec) ** 2)


@dataclass
class RollTerm:
    """coeff times a product of cyclic shifts on the given axes."""

    axes: tuple[int, ...]
    shifts: tuple[int, ...]
    coeff: complex

    def apply(self, vec_nd: np.ndarray) -> np.ndarray:
        return self.coeff * np.roll(vec_nd, self.shifts, self.axes)

    def expectation(self, vec: np.ndarray, dims: tuple[int, ...]) -> complex:
        vec_nd = vec.reshape(dims)
        return np.vdot(vec_nd, self.apply(vec_nd))

    def tocsr(self, dims: tuple[int, ...]) -> sp.csr_matrix:
        dim = int(np.prod(dims))
        src = np.roll(np.arange(dim).reshape(dims), self.shifts, self.axes).reshape(-1)
        return sp.csr_matrix(
            (np.full(dim, self.coeff), (np.arange(dim), src)), shape=(dim, dim)
        )


@dataclass
class MatrixTerm:
    matrix: sp.csr_matrix

    def expectation(self, vec: np.ndarray, dims: tuple[int, ...]) -> complex:
        return np.vdot(vec, self.matrix @ vec)


class SparseOperator:
    """Hermitian operator as named groups of primitive terms."""

    def __init__(self, dims: Sequence[int], members: dict) -> None:
        self.dims = tuple(int(d) for d in dims)
        self.dim = int(np.prod(self.dims))
        self.members = dict(members)
        self._diag: np.ndarray | None = None
        self._rolls: list[RollTerm] | None = None
        self._csr: sp.csr_matrix | None = None
        self._compiled = False

    def _compile(self) -> None:
        if self._compiled:
            return
        diag = np.zeros(self.dim, dtype=np.complex128)
        rolls: list[RollTerm] = []
        mats: list[sp.csr_matrix] = []
        for terms in self.members.values():
            for term in terms:
                if isinstance(term, (ConstTerm, ProductDiagTerm)):
                    diag += term.diag_vector(self.dims)
                elif isinstance(term, RollTerm):
                    rolls.append(term)
                elif isinstance(term, MatrixTerm):
                    mats.append(term.matrix)
                else:
                    raise InvalidParameterError(f"unknown term type {type(term)!r}")
        if np.max(np.abs(diag.imag), initial=0.0) < 1e-14:
            diag = diag.real
        self._diag = diag
        self._rolls = rolls
        self._csr = sum(mats[1:], start=mats[0].copy()).tocsr() if mats else None
        self._compiled = True

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        self._compile()
        vec = np.asarray(vec).reshape(-1)
        vec_nd = vec.reshape(self.dims)
        out = self._diag.reshape(self.dims) * vec_nd
        for roll in self._rolls:
            out += roll.apply(vec_nd)
        out = out.reshape(-1)
        if self._csr is not None:
            out += self._csr @ vec
        return out

    def expectation(self, vec: np.ndarray) -> float:
        return float(np.real(np.vdot(vec, self.matvec(vec))))

    def term_expectation(self, key, vec: np.ndarray) -> float:
        val = sum(t.expectation(vec, self.dims) for t in self.members[key])
        return float(np.real(val))

    def families(self) -> list[str]:
        seen = []
        for key in self.members:
            if key[0] not in seen:
                seen.append(key[0])
        return seen

    def family_keys(self, family: str) -> list:
        return [k for k in self.members if k[0] == family]

    def family_expectation(self, family: str, vec: np.ndarray) -> float:
        return sum(self.term_expectation(k, vec) for k in self.family_keys(family))

    def tocsr(self) -> sp.csr_matrix:
        self._compile()
        out = sp.diags(self._diag, format="csr").astype(np.complex128)
        for roll in self._rolls:
            out = out + roll.tocsr(self.dims)
        if self._csr is not None:
            out = out + self._csr
        return out.tocsr()

    def aslinearoperator(self) -> LinearOperator:
        return LinearOperator(
            (self.dim, self.dim), matvec=self.matvec, dtype=np.complex128
        )


def hermiticity_error(op: SparseOperator, n_probes: int = 4, seed: int = 11) -> float:
    """Max deviation of <u|Hv> from conj(<v|Hu>) over random probes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_probes):
        u = rng.normal(size=op.dim) + 1j * rng.normal(size=op.dim)
        v = rng.normal(size=op.dim) + 1j * rng.normal(size=op.dim)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        worst = max(worst, abs(np.vdot(u, op.matvec(v)) - np.vdot(op.matvec(u), v)))
    return worst


# -- square model -------------------------------------------------------


def square_hamiltonian(model: SquareModel) -> SparseOperator:
    """Exact Hamiltonian of the cyclic square-lattice model.

    Shift-based factors (electric, coupling) carry their constant
    offsets, so a momentum-zero link costs no electric energy.
    """
    d = model.d
    scale = d * d / (2 * np.pi**2)
    chi = model.group.characters
    members: dict = {}
    for link in range(model.lattice.n_links):
        members[("electric", link)] = [
            ConstTerm(2.0 * model.lam_e * scale),
            RollTerm((link,), (1,), -model.lam_e * scale),
            RollTerm((link,), (-1,), -model.lam_e * scale),
        ]
        members[("mass", link)] = [
            ProductDiagTerm((link,), (chi,), model.lam_m, pair=True)
        ]
    for idx, plq in enumerate(model.lattice.plaquettes()):
        members[("magnetic", idx)] = [
            ProductDiagTerm(
                plq.links,
                (chi, chi, chi.conj(), chi.conj()),
                model.lam_b,
                pair=True,
            )
        ]
    for idx, star in enumerate(model.lattice.stars()):
        axes = star.links
        members[("coupling", idx)] = [
            ConstTerm(2.0 * model.lam_j * scale),
            RollTerm(axes, (1, 1, -1, -1), -model.lam_j * scale),
            RollTerm(axes, (-1, -1, 1, 1), -model.lam_j * scale),
        ]
    return SparseOperator(model.dims, members)


def square_star_shift(model: SquareModel, vec: np.ndarray, star_idx: int) -> np.ndarray:
    """Apply the shift product around one site (out +1, in -1)."""
    star = model.lattice.stars()[star_idx]
    return np.roll(vec.reshape(model.dims), (1, 1, -1, -1), star.links).reshape(-1)


# -- chain model: truncated basis ---------------------------------------


def truncation_matrix(group: FiniteGroup) -> np.ndarray:
    """Isometry from the group basis onto the kept Fourier rows."""
    if not isinstance(group, QuaternionGroup):
        raise InvalidParameterError("truncation is defined for the quaternion group")
    return group.fourier[: group.truncated_dim].copy()


def chain_oracle_dims(model: ChainModel) -> tuple[int, ...]:
    kept = model.group.truncated_dim
    return (kept,) * model.n_sites + (2,) * (2 * model.n_sites)


def _hop_pair(n_modes: int, u: int, v: int) -> sp.csr_matrix:
    """Sparse ``psidag_u psi_v`` over the mode space.

    With string-before ordering the overlapping Z factors cancel, so
    both index orders reduce to raise at ``u``, lower at ``v``, and a Z
    on every mode strictly between them.
    """
    create = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))
    destroy = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    sz = sp.diags([1.0, -1.0]).tocsr()
    eye = sp.identity(2, format="csr")
    lo, hi = min(u, v), max(u, v)
    out = sp.identity(1, format="csr")
    for m in range(n_modes):
        if m == u:
            factor = create
        elif m == v:
            factor = destroy
        elif lo < m < hi:
            factor = sz
        else:
            factor = eye
        out = sp.kron(out, factor, format="csr")
    return out.tocsr()


def _link_operator_blocks(group: QuaternionGroup) -> np.ndarray:
    """Truncated link operators, one (kept x kept) block per (alpha, beta)."""
    t = truncation_matrix(group)
    kept = group.truncated_dim
    blocks = np.zeros((2, 2, kept, kept), dtype=np.complex128)
    for a in range(2):
        for b in range(2):
            diag = group.faithful[:, a, b]
            blocks[a, b] = t @ np.diag(diag) @ t.conj().T
    return blocks


def chain_hamiltonian(model: ChainModel) -> SparseOperator:
    """Chain Hamiltonian in the truncated link basis.

    electric: lam_e times the quadratic Casimir per link.
    mass: mu * (-1)^n times the site occupation.
    hopping: -1j * x * sign_n * (psidag_n Ulink psi_{n+1} - h.c.)
    with the wrap bond taking the opposite sign.
    """
    group = model.group
    if not isinstance(group, QuaternionGroup):
        raise InvalidParameterError("chain oracle needs the quaternion group")
    n = model.n_sites
    dims = chain_oracle_dims(model)
    members: dict = {}
    for link in range(n):
        members[("electric", link)] = [
            ProductDiagTerm((link,), (group.casimir_values,), model.lam_e)
        ]
    occ = np.array([0.0, 1.0])
    for site in range(n):
        sign = (-1.0) ** site
        members[("mass", site)] = [
            ProductDiagTerm((n + 2 * site,), (occ,), model.mu * sign),
            ProductDiagTerm((n + 2 * site + 1,), (occ,), model.mu * sign),
        ]
    for bond in model.chain.bonds():
        sign = -1.0 if bond.wrap else 1.0
        forward = bond_forward_matrix(model, bond.link)
        ham_piece = (-1j * model.x * sign) * (forward - forward.conj().T)
        members[("hopping", bond.link)] = [MatrixTerm(ham_piece.tocsr())]
    return SparseOperator(dims, members)


def bond_forward_matrix(model: ChainModel, bond_index: int) -> sp.csr_matrix:
    """``sum_ab psidag_{left,a} U_ab psi_{right,b}`` for one bond, truncated."""
    group = model.group
    if not isinstance(group, QuaternionGroup):
        raise InvalidParameterError("chain oracle needs the quaternion group")
    n = model.n_sites
    kept = group.truncated_dim
    bond = model.chain.bonds()[bond_index]
    blocks = _link_operator_blocks(group)
    link_eye = [sp.identity(kept**i, format="csr") for i in range(n + 1)]
    forward = None
    for a in range(2):
        for b in range(2):
            link_part = sp.kron(
                link_eye[bond.link],
                sp.kron(
                    sp.csr_matrix(blocks[a, b]),
                    link_eye[n - 1 - bond.link],
                    format="csr",
                ),
                format="csr",
            )
            mode_part = _hop_pair(
                2 * n, 2 * bond.left_site + a, 2 * bond.right_site + b
            )
            piece = sp.kron(link_part, mode_part, format="csr")
            forward = piece if forward is None else forward + piece
    return forward.tocsr()


def dense_bond_hamiltonian(group: FiniteGroup, x: float, sign: float = 1.0) -> np.ndarray:
    """One-bond hopping Hamiltonian on (link, 4 modes), full group basis."""
    order = group.order
    forward = np.zeros((order * 16, order * 16), dtype=np.complex128)
    for a in range(2):
        for b in range(2):
            mode_op = _hop_pair(4, a, 2 + b).toarray()
            link_diag = np.diag(group.faithful[:, a, b])
            forward += np.kron(link_diag, mode_op)
    return (-1j * x * sign) * (forward - forward.conj().T)


# -- conversions ---------------------------------------------------------


def _apply_axis(vec: np.ndarray, dims: list[int], axis: int, mat: np.ndarray):
    pre = int(np.prod(dims[:axis]))
    post = int(np.prod(dims[axis + 1 :]))
    blk = vec.reshape(pre, dims[axis], post)
    out = np.einsum("ij,pjq->piq", mat, blk)
    dims = list(dims)
    dims[axis] = mat.shape[0]
    return out.reshape(-1), dims


def restrict_chain_state(vec: np.ndarray, model: ChainModel) -> np.ndarray:
    """Project a full-register chain state into the truncated link basis."""
    t = truncation_matrix(model.group)
    dims = list(model.dims)
    out = np.asarray(vec, dtype=np.complex128).reshape(-1)
    for link in range(model.n_sites):
        out, dims = _apply_axis(out, dims, link, t)
    return out


def embed_chain_state(vec: np.ndarray, model: ChainModel) -> np.ndarray:
    """Embed a truncated-basis chain state back into the full register."""
    t = truncation_matrix(model.group)
    dims = list(chain_oracle_dims(model))
    out = np.asarray(vec, dtype=np.complex128).reshape(-1)
    for link in range(model.n_sites):
        out, dims = _apply_axis(out, dims, link, t.conj().T)
    return out


# -- gauge transformations ----------------------------------------------


def apply_gauss_register(reg: Register, model: ChainModel, site: int, h: int) -> None:
    """Gauge rotation at one site, acting on the full register in place.

    Left-multiplies the outgoing link by ``h``, right-multiplies the
    incoming link by ``h^-1``, and rotates the site's matter modes by
    the faithful rep of ``h``.  With this pairing the creation
    operators pick up ``D(h)`` on the left, the outgoing link operator
    picks up ``D(h^-1)``, and the hopping factors stay invariant.
    """
    group = model.group
    reg.apply_perm(model.link_axis(site), group.left_action_perm(h))
    reg.apply_perm(
        model.link_axis(site - 1),
        group.right_action_perm(group.inverse(h)),
    )
    coeff = unitary_log(group.faithful[h])
    reg.apply_fermion_rotation(
        (model.mode_axis(site, 0), model.mode_axis(site, 1)), coeff
    )


def _perm_matrix(perm: np.ndarray) -> np.ndarray:
    mat = np.zeros((perm.size, perm.size))
    mat[perm, np.arange(perm.size)] = 1.0
    return mat


def chain_gauss_apply(
    vec: np.ndarray, model: ChainModel, site: int, h: int
) -> np.ndarray:
    """Gauge rotation at one site in the truncated oracle basis."""
    group = model.group
    t = truncation_matrix(group)
    dims = list(chain_oracle_dims(model))
    n = model.n_sites
    out = np.asarray(vec, dtype=np.complex128).reshape(-1)
    left = t @ _perm_matrix(group.left_action_perm(h)) @ t.conj().T
    right = t @ _perm_matrix(
        group.right_action_perm(group.inverse(h))
    ) @ t.conj().T
    out, _ = _apply_axis(out, dims, site % n, left)
    out, _ = _apply_axis(out, dims, (site - 1) % n, right)
    coeff = unitary_log(group.faithful[h])
    rot = np.zeros((4, 4), dtype=np.complex128)
    rot[0, 0] = 1.0
    rot[3, 3] = np.exp(np.trace(coeff))
    two = expm(coeff)
    # pair basis (|10>, |01>) sits at flat mode indices 2 and 1
    rot[2, 2] = two[0, 0]
    rot[2, 1] = two[0, 1]
    rot[1, 2] = two[1, 0]
    rot[1, 1] = two[1, 1]
    pre = int(np.prod(dims[: n + 2 * (site % n)]))
    post = int(np.prod(dims[n + 2 * (site % n) + 2 :]))
    blk = out.reshape(pre, 4, post)
    return np.einsum("ij,pjq->piq", rot, blk).reshape(-1)


def chain_gauss_project(vec: np.ndarray, model: ChainModel) -> np.ndarray:
    """Project onto the gauge-invariant sector, one site average at a time."""
    out = np.asarray(vec, dtype=np.complex128).reshape(-1)
    for site in range(model.n_sites):
        acc = np.zeros_like(out)
        for h in range(model.group.order):
            acc += chain_gauss_apply(out, model, site, h)
        out = acc / model.group.order
    return out


# -- sector restriction --------------------------------------------------


class SectorBasis:
    """Fixed total mode occupation sector of the truncated chain space."""

    def __init__(self, model: ChainModel, total_occupation: int) -> None:
        dims = chain_oracle_dims(model)
        n_modes = 2 * model.n_sites
        mode_dim = 2**n_modes
        occ = np.array(
            [bin(m).count("1") for m in range(mode_dim)], dtype=np.int64
        )
        mode_hits = np.flatnonzero(occ == total_occupation)
        if mode_hits.size == 0:
            raise InvalidParameterError(
                f"no states with total occupation {total_occupation}"
            )
        link_dim = int(np.prod(dims[: model.n_sites]))
        self.full_dims = dims
        self.indices = (
            np.arange(link_dim)[:, None] * mode_dim + mode_hits[None, :]
        ).reshape(-1)
        self.dim = self.indices.size
        self.full_dim = int(np.prod(dims))

    def restrict(self, vec: np.ndarray) -> np.ndarray:
        return np.asarray(vec).reshape(-1)[self.indices]

    def embed(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros(self.full_dim, dtype=np.complex128)
        out[self.indices] = np.asarray(vec).reshape(-1)
        return out

    def restrict_operator(self, op: SparseOperator) -> LinearOperator:
        def mv(x):
            return self.restrict(op.matvec(self.embed(x)))

        return LinearOperator((self.dim, self.dim), matvec=mv, dtype=np.complex128)


# -- evolution and ground states ------------------------------------------


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(vec)))
    ref = vec[j]
    if abs(ref) > 0:
        vec = vec * (ref.conjugate() / abs(ref))
    return vec


def exact_evolve(
    op: SparseOperator,
    vec: np.ndarray,
    t: float,
    krylov_dim: int = 24,
    tol: float = 1e-10,
) -> np.ndarray:
    """Apply exp(-1j * t * H) with a Lanczos propagator.

    Substeps shrink until the a-posteriori residual passes `tol`; a step
    that cannot converge after 60 halvings raises
    :class:`NumericFailureError`.
    """
    state = np.asarray(vec, dtype=np.complex128).reshape(-1).copy()
    if state.size != op.dim:
        raise InvalidParameterError("state length does not match the operator")
    if t == 0.0:
        return state
    store_basis = op.dim * krylov_dim <= 12_000_000
    remaining = float(t)
    tau = remaining
    direction = np.sign(remaining)
    while abs(remaining) > 1e-14 * max(1.0, abs(t)):
        tau = direction * min(abs(tau), abs(remaining))
        norm0 = np.linalg.norm(state)
        if norm0 == 0.0:
            return state
        start = state / norm0
        alphas, betas, basis = _lanczos_sweep(op, start, krylov_dim, keep=store_basis)
        m = len(alphas)
        tmat = np.diag(alphas)
        if m > 1:
            off = np.asarray(betas[: m - 1])
            tmat = tmat + np.diag(off, 1) + np.diag(off, -1)
        # shrink the substep until the a-posteriori residual is accepted;
        # the Krylov data does not depend on tau, only the small expm does
        halvings = 0
        while True:
            y = expm(-1j * tau * tmat)[:, 0]
            resid = abs(betas[m - 1] * y[m - 1])
            if resid <= tol:
                break
            if halvings >= 60:
                raise NumericFailureError(
                    "Lanczos propagator failed to converge; step too hard"
                )
            tau *= 0.5
            halvings += 1
        if basis is not None:
            state = norm0 * (basis[:, :m] @ y)
        else:
            state = norm0 * _lanczos_rebuild(op, start, y, alphas, betas)
        remaining -= tau
        tau *= 1.5
    return state


def _lanczos_sweep(op, v0, m_max, keep):
    alphas: list[float] = []
    betas: list[float] = []
    basis = np.empty((op.dim, m_max), dtype=np.complex128) if keep else None
    v_prev = None
    v = v0.copy()
    for j in range(m_max):
        if keep:
            basis[:, j] = v
        w = op.matvec(v)
        a = float(np.real(np.vdot(v, w)))
        w -= a * v
        if v_prev is not None:
            w -= betas[j - 1] * v_prev
        if keep and j >= 1:
            # one full reorthogonalization pass keeps the basis clean
            proj = basis[:, : j + 1].conj().T @ w
            w -= basis[:, : j + 1] @ proj
        b = float(np.linalg.norm(w))
        alphas.append(a)
        betas.append(b)
        if b < 1e-13:
            break
        v_prev = v
        v = w / b
    return alphas, betas, basis


def _lanczos_rebuild(op, v0, y, alphas, betas):
    out = np.zeros_like(v0)
    v_prev = None
    v = v0.copy()
    for j in range(len(y)):
        out += y[j] * v
        if j == len(y) - 1:
            break
        w = op.matvec(v)
        w -= alphas[j] * v
        if v_prev is not None:
            w -= betas[j - 1] * v_prev
        v_prev = v
        v = w / betas[j]
    return out


_DENSE_EIG_CUTOFF = 1500


def ground_state(
    op: SparseOperator | LinearOperator,
    k: int = 1,
    seed: int = 7,
    maxiter: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Lowest eigenpairs, deterministic start vector, fixed phases.

    Returns (values ascending, vectors as columns).  Small problems are
    diagonalized densely: restarted Lanczos can drop an isolated lowest
    eigenvalue when the rest of the spectrum sits in a few exactly
    degenerate clusters.
    """
    if k < 1:
        raise InvalidParameterError(f"eigenpair count must be >= 1, got {k}")
    lo = op.aslinearoperator() if isinstance(op, SparseOperator) else op
    n = lo.shape[0]
    k = min(k, n)
    if n <= _DENSE_EIG_CUTOFF:
        dense = lo @ np.eye(n, dtype=np.complex128)
        vals, vecs = np.linalg.eigh(dense)
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.normal(size=n) + 1j * rng.normal(size=n)
        try:
            vals, vecs = eigsh(lo, k=k, which="SA", v0=v0, maxiter=maxiter)
        except Exception as exc:
            raise NumericFailureError(f"eigensolver failed: {exc}") from exc
        order = np.argsort(vals)
        vals = vals[order]
        vecs = vecs[:, order]
    for i in range(vecs.shape[1]):
        vecs[:, i] = _fix_phase(vecs[:, i])
    return vals, vecs
