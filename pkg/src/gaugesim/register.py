"""Mixed-radix state vector over qudit and fermionic-mode axes.

The register is a dense complex state vector whose tensor axes each
carry a dimension (group order for link qudits, 2 for fermionic modes).
Axis order is row major: axis 0 is the most significant in the flat
index.  Fermionic axes define the Jordan-Wigner ordering; the string of
an operator on mode ``a`` runs over fermionic axes before ``a``, so
``psidag_a = raise_a * prod_{f<a} Z_f``.

Two-mode quadratic rotations ``exp(sum_uv M[u, v] psidag_u psi_v)`` are
applied exactly: in the occupation blocks of the two modes the map is
identity on ``|00>``, multiplication by ``exp(tr M)`` on ``|11>``, and a
2x2 mixing of ``|10>, |01>`` whose off-diagonal picks up the parity of
the fermionic modes between the two axes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .errors import InvalidParameterError

__all__ = ["Register"]


def _axis_parity(dims: Sequence[int], fermionic: Sequence[bool]) -> np.ndarray:
    """Occupation parity sign, +-1, over the flattened span of `dims`."""
    total = int(np.prod(dims, dtype=np.int64)) if len(dims) else 1
    signs = np.ones(total, dtype=np.float64)
    stride = total
    for dim, ferm in zip(dims, fermionic):
        stride //= dim
        if ferm:
            occ = (np.arange(total) // stride) % dim
            signs *= np.where(occ % 2 == 1, -1.0, 1.0)
    return signs


class Register:
    """Dense state vector with gate kernels for each axis type."""

    def __init__(
        self,
        dims: Sequence[int],
        fermionic: Sequence[bool] | None = None,
        vector: np.ndarray | None = None,
    ) -> None:
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 2 for d in dims):
            raise InvalidParameterError(f"axis dimensions must all be >= 2, got {dims}")
        if fermionic is None:
            fermionic = (False,) * len(dims)
        fermionic = tuple(bool(f) for f in fermionic)
        if len(fermionic) != len(dims):
            raise InvalidParameterError("fermionic flags must match the axis count")
        if any(f and d != 2 for f, d in zip(fermionic, dims)):
            raise InvalidParameterError("fermionic axes must have dimension 2")
        self.dims = dims
        self.fermionic = fermionic
        self.size = int(np.prod(dims, dtype=np.int64))
        if vector is None:
            vec = np.zeros(self.size, dtype=np.complex128)
            vec[0] = 1.0
        else:
            vec = np.asarray(vector, dtype=np.complex128).reshape(-1).copy()
            if vec.size != self.size:
                raise InvalidParameterError(
                    f"vector length {vec.size} does not match register size {self.size}"
                )
        self.vector = vec

    @classmethod
    def basis_state(
        cls,
        dims: Sequence[int],
        indices: Sequence[int],
        fermionic: Sequence[bool] | None = None,
    ) -> "Register":
        reg = cls(dims, fermionic)
        reg.vector[0] = 0.0
        reg.vector[reg.flat_index(indices)] = 1.0
        return reg

    @property
    def n_axes(self) -> int:
        return len(self.dims)

    def flat_index(self, indices: Sequence[int]) -> int:
        if len(indices) != self.n_axes:
            raise InvalidParameterError("index tuple length does not match axes")
        return int(np.ravel_multi_index(tuple(int(i) for i in indices), self.dims))

    def copy(self) -> "Register":
        return Register(self.dims, self.fermionic, self.vector)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def normalize(self) -> None:
        n = self.norm()
        if n == 0.0:
            raise InvalidParameterError("cannot normalize the zero vector")
        self.vector /= n

    def overlap(self, other: "Register") -> complex:
        if other.dims != self.dims:
            raise InvalidParameterError("register shapes differ")
        return complex(np.vdot(self.vector, other.vector))

    def _split(self, axis: int) -> tuple[int, int, int]:
        if not 0 <= axis < self.n_axes:
            raise InvalidParameterError(f"axis {axis} out of range")
        pre = int(np.prod(self.dims[:axis], dtype=np.int64))
        post = int(np.prod(self.dims[axis + 1 :], dtype=np.int64))
        return pre, self.dims[axis], post

    # -- qudit kernels ------------------------------------------------

    def apply_single(self, axis: int, matrix: np.ndarray) -> None:
        pre, r, post = self._split(axis)
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (r, r):
            raise InvalidParameterError(
                f"matrix shape {matrix.shape} does not fit axis dimension {r}"
            )
        blk = self.vector.reshape(pre, r, post)
        self.vector = np.einsum("ij,pjq->piq", matrix, blk).reshape(-1)

    def apply_diagonal(self, axis: int, phases: np.ndarray) -> None:
        pre, r, post = self._split(axis)
        phases = np.asarray(phases, dtype=np.complex128)
        if phases.shape != (r,):
            raise InvalidParameterError("diagonal length does not fit the axis")
        self.vector.reshape(pre, r, post)[...] *= phases[None, :, None]

    def apply_perm(self, axis: int, perm: np.ndarray) -> None:
        """Relabel axis values, new index ``perm[k]`` gets old value ``k``."""
        pre, r, post = self._split(axis)
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(r)):
            raise InvalidParameterError("not a permutation of the axis values")
        blk = self.vector.reshape(pre, r, post)
        self.vector = np.take(blk, np.argsort(perm), axis=1).reshape(-1)

    def _controlled_views(self, control: int, target: int):
        if control == target:
            raise InvalidParameterError("control and target must differ")
        self._split(control)
        self._split(target)
        first, second = sorted((control, target))
        p0 = int(np.prod(self.dims[:first], dtype=np.int64))
        p1 = int(np.prod(self.dims[first + 1 : second], dtype=np.int64))
        p2 = int(np.prod(self.dims[second + 1 :], dtype=np.int64))
        blk = self.vector.reshape(p0, self.dims[first], p1, self.dims[second], p2)
        ctrl_axis = 1 if control < target else 3
        tgt_axis = 3 if control < target else 1
        return blk, ctrl_axis, tgt_axis

    def apply_controlled_perm(self, control: int, target: int, perms: np.ndarray) -> None:
        """Permute the target axis by ``perms[c]`` on each control value ``c``."""
        blk, ctrl_axis, tgt_axis = self._controlled_views(control, target)
        perms = np.asarray(perms, dtype=np.int64)
        if perms.shape != (self.dims[control], self.dims[target]):
            raise InvalidParameterError("need one target permutation per control value")
        for c in range(self.dims[control]):
            idx = [slice(None)] * 5
            idx[ctrl_axis] = c
            sub = blk[tuple(idx)]
            inv = np.argsort(perms[c])
            moved = np.moveaxis(sub, tgt_axis - (1 if tgt_axis > ctrl_axis else 0), 0)
            shuffled = moved[inv]
            moved[...] = shuffled

    def apply_controlled_single(
        self, control: int, target: int, matrices: np.ndarray
    ) -> None:
        blk, ctrl_axis, tgt_axis = self._controlled_views(control, target)
        matrices = np.asarray(matrices, dtype=np.complex128)
        r = self.dims[target]
        if matrices.shape != (self.dims[control], r, r):
            raise InvalidParameterError("need one target matrix per control value")
        for c in range(self.dims[control]):
            idx = [slice(None)] * 5
            idx[ctrl_axis] = c
            sub = blk[tuple(idx)]
            moved = np.moveaxis(sub, tgt_axis - (1 if tgt_axis > ctrl_axis else 0), 0)
            moved[...] = np.tensordot(matrices[c], moved, axes=(1, 0))

    def probability_weights(self, axis: int) -> np.ndarray:
        pre, r, post = self._split(axis)
        blk = np.abs(self.vector.reshape(pre, r, post)) ** 2
        return blk.sum(axis=(0, 2))

    # -- fermionic kernels --------------------------------------------

    def _check_mode(self, axis: int) -> None:
        self._split(axis)
        if not self.fermionic[axis]:
            raise InvalidParameterError(f"axis {axis} is not a fermionic mode")

    def apply_mode_raising(self, axis: int) -> None:
        """Apply the creation operator (with its parity string) to one mode."""
        self._check_mode(axis)
        pre, _, post = self._split(axis)
        signs = _axis_parity(self.dims[:axis], self.fermionic[:axis])
        blk = self.vector.reshape(pre, 2, post)
        occupied = signs[:, None] * blk[:, 0, :]
        blk[:, 1, :] = occupied
        blk[:, 0, :] = 0.0

    def apply_fermion_rotation(
        self, modes: tuple[int, int], coeff: np.ndarray
    ) -> None:
        """Apply ``exp(sum_uv coeff[u, v] psidag_u psi_v)`` on two modes."""
        u, v = modes
        self._check_mode(u)
        self._check_mode(v)
        if u == v:
            raise InvalidParameterError("modes must differ")
        coeff = np.asarray(coeff, dtype=np.complex128)
        if coeff.shape != (2, 2):
            raise InvalidParameterError("coefficient matrix must be 2x2")
        if u > v:
            u, v = v, u
            coeff = coeff[::-1, ::-1]
        pre = int(np.prod(self.dims[:u], dtype=np.int64))
        mid = int(np.prod(self.dims[u + 1 : v], dtype=np.int64))
        post = int(np.prod(self.dims[v + 1 :], dtype=np.int64))
        blk = self.vector.reshape(pre, 2, mid, 2, post)
        signs = _axis_parity(self.dims[u + 1 : v], self.fermionic[u + 1 : v])
        self._rotate_blocks(blk, signs, coeff)

    def apply_controlled_fermion_rotation(
        self, control: int, modes: tuple[int, int], coeffs: np.ndarray
    ) -> None:
        """Per control value ``c``, rotate two modes by ``exp(K(coeffs[c]))``.

        The control must be a qudit axis placed before both modes, which
        keeps it outside every Jordan-Wigner string involved.
        """
        u, v = modes
        self._check_mode(u)
        self._check_mode(v)
        if u > v:
            u, v = v, u
            coeffs = np.asarray(coeffs)[:, ::-1, ::-1]
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        dc = self.dims[control]
        if self.fermionic[control]:
            raise InvalidParameterError("control axis must be a qudit")
        if not control < u:
            raise InvalidParameterError("control axis must precede both modes")
        if coeffs.shape != (dc, 2, 2):
            raise InvalidParameterError("need one 2x2 coefficient block per control value")
        p0 = int(np.prod(self.dims[:control], dtype=np.int64))
        p1 = int(np.prod(self.dims[control + 1 : u], dtype=np.int64))
        mid = int(np.prod(self.dims[u + 1 : v], dtype=np.int64))
        post = int(np.prod(self.dims[v + 1 :], dtype=np.int64))
        blk = self.vector.reshape(p0, dc, p1, 2, mid, 2, post)
        signs = _axis_parity(self.dims[u + 1 : v], self.fermionic[u + 1 : v])
        for c in range(dc):
            self._rotate_blocks(blk[:, c], signs, coeffs[c])

    @staticmethod
    def _rotate_blocks(blk: np.ndarray, signs: np.ndarray, coeff: np.ndarray) -> None:
        """Exact quadratic rotation on a ``(..., 2, mid, 2, post)`` view."""
        u_plus = expm(coeff)
        flipped = coeff.copy()
        flipped[0, 1] *= -1.0
        flipped[1, 0] *= -1.0
        u_minus = expm(flipped)
        minus = signs < 0
        sel = np.where(minus[:, None, None], u_minus[None], u_plus[None])
        # pair basis order (|10>, |01>) in the two mode slots
        a10 = blk[..., 1, :, 0, :].copy()
        a01 = blk[..., 0, :, 1, :].copy()
        s00 = sel[:, 0, 0][:, None]
        s01 = sel[:, 0, 1][:, None]
        s10 = sel[:, 1, 0][:, None]
        s11 = sel[:, 1, 1][:, None]
        blk[..., 1, :, 0, :] = s00 * a10 + s01 * a01
        blk[..., 0, :, 1, :] = s10 * a10 + s11 * a01
        blk[..., 1, :, 1, :] *= np.exp(np.trace(coeff))

    # -- persistence ---------------------------------------------------

    def save(self, path: str | Path) -> None:
        np.savez(
            path,
            amplitudes=self.vector,
            dims=np.asarray(self.dims, dtype=np.int64),
            fermionic=np.asarray(self.fermionic, dtype=bool),
        )

    @classmethod
    def load(cls, path: str | Path) -> "Register":
        with np.load(path) as data:
            return cls(
                data["dims"].tolist(),
                data["fermionic"].tolist(),
                data["amplitudes"],
            )

    def __repr__(self) -> str:
        return f"Register(dims={self.dims}, fermionic={self.fermionic})"
