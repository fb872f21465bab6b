"""Finite gauge groups and their Fourier (irrep) bases.

Group elements are integers ``0 .. order-1`` with ``0`` the identity.
Each group carries a faithful unitary representation ``rho`` used for
matter-field couplings; its character enters the magnetic and mass
phase functions.

The Fourier matrix ``F`` has rows indexed by irrep matrix elements,
``F[(j, m, n), g] = sqrt(dim_j / |G|) * conj(D_j[m, n](g))``, so for the
cyclic group ``F[n, k] = exp(2j*pi*n*k/d) / sqrt(d)``.  Conjugating a
left- or right-multiplication permutation by ``F`` is block diagonal in
the irrep blocks; truncations that keep whole blocks therefore commute
with the gauge action.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import InvalidParameterError

__all__ = ["FiniteGroup", "CyclicGroup", "QuaternionGroup", "make_group"]


class FiniteGroup:
    """Multiplication-table group with a faithful unitary rep.

    Parameters
    ----------
    name:
        Short identifier used in serialized circuits and configs.
    labels:
        Human-readable element names, identity first.
    table:
        ``table[a, b]`` is the index of the product ``a * b``.
    faithful:
        Array of shape ``(order, dim, dim)`` with the faithful rep
        matrices, in element order.
    """

    def __init__(
        self,
        name: str,
        labels: list[str],
        table: np.ndarray,
        faithful: np.ndarray,
    ) -> None:
        order = len(labels)
        if table.shape != (order, order):
            raise InvalidParameterError("multiplication table shape mismatch")
        self.name = name
        self.labels = list(labels)
        self.table = np.asarray(table, dtype=np.int64)
        self.faithful = np.asarray(faithful, dtype=np.complex128)
        self.identity = 0
        inv = np.full(order, -1, dtype=np.int64)
        for a in range(order):
            hits = np.flatnonzero(self.table[a] == self.identity)
            if hits.size != 1:
                raise InvalidParameterError(f"element {a} lacks a unique inverse")
            inv[a] = hits[0]
        self.inverse_table = inv

    @property
    def order(self) -> int:
        return len(self.labels)

    @property
    def faithful_dim(self) -> int:
        return self.faithful.shape[1]

    def compose(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inverse_table[a])

    @cached_property
    def characters(self) -> np.ndarray:
        """Character of the faithful rep, one value per element."""
        return np.einsum("gaa->g", self.faithful)

    def left_action_perm(self, h: int) -> np.ndarray:
        """Permutation ``g -> h * g`` as an index array."""
        return self.table[h, :].copy()

    def right_action_perm(self, h: int) -> np.ndarray:
        """Permutation ``g -> g * h`` as an index array."""
        return self.table[:, h].copy()

    def inversion_perm(self) -> np.ndarray:
        """Permutation ``g -> g^-1`` as an index array."""
        return self.inverse_table.copy()

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    # Subclasses fill these in.
    @cached_property
    def fourier(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def irrep_dims(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def irrep_row_slices(self) -> list[slice]:
        """Row ranges of :attr:`fourier` belonging to each irrep."""
        out = []
        start = 0
        for dim in self.irrep_dims:
            out.append(slice(start, start + dim * dim))
            start += dim * dim
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, order={self.order})"


class CyclicGroup(FiniteGroup):
    """Integers mod ``d`` under addition, faithful rep ``k -> exp(2j*pi*k/d)``."""

    def __init__(self, d: int) -> None:
        if d < 2:
            raise InvalidParameterError(f"cyclic group needs d >= 2, got {d}")
        k = np.arange(d)
        table = (k[:, None] + k[None, :]) % d
        phases = np.exp(2j * np.pi * k / d)
        super().__init__(
            name=f"z{d}",
            labels=[str(int(v)) for v in k],
            table=table,
            faithful=phases.reshape(d, 1, 1),
        )
        self.d = d

    @cached_property
    def fourier(self) -> np.ndarray:
        d = self.d
        n = np.arange(d)
        return np.exp(2j * np.pi * np.outer(n, n) / d) / np.sqrt(d)

    @property
    def irrep_dims(self) -> tuple[int, ...]:
        return (1,) * self.d


_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class QuaternionGroup(FiniteGroup):
    """Order-8 quaternion group ``{±1, ±i sigma_x, ±i sigma_y, ±i sigma_z}``.

    Irrep ordering in the Fourier basis: trivial, the four matrix
    elements of the two-dimensional irrep (row major), then the three
    sign irreps with kernels ``{±1, ±i sigma_x}``, ``{±1, ±i sigma_y}``,
    ``{±1, ±i sigma_z}``.  Truncation to the first five rows keeps the
    trivial and two-dimensional blocks; those carry quadratic Casimir
    values 0 and 3/4.
    """

    truncated_dim = 5

    def __init__(self) -> None:
        eye = np.eye(2, dtype=np.complex128)
        mats = [eye, -eye]
        labels = ["1", "-1"]
        for axis in ("x", "y", "z"):
            mats.append(1j * _SIGMA[axis])
            mats.append(-1j * _SIGMA[axis])
            labels.append(f"i{axis}")
            labels.append(f"-i{axis}")
        faithful = np.stack(mats)
        table = np.full((8, 8), -1, dtype=np.int64)
        for a in range(8):
            for b in range(8):
                prod = faithful[a] @ faithful[b]
                for c in range(8):
                    if np.allclose(prod, faithful[c], atol=1e-12):
                        table[a, b] = c
                        break
        if (table < 0).any():
            raise InvalidParameterError("quaternion table did not close")
        super().__init__(name="q8", labels=labels, table=table, faithful=faithful)

    @cached_property
    def fourier(self) -> np.ndarray:
        rows = np.zeros((8, 8), dtype=np.complex128)
        rows[0, :] = np.sqrt(1 / 8)
        for m in range(2):
            for n in range(2):
                rows[1 + 2 * m + n, :] = np.sqrt(2 / 8) * self.faithful[:, m, n].conj()
        kernels = {"x": (0, 1, 2, 3), "y": (0, 1, 4, 5), "z": (0, 1, 6, 7)}
        for i, axis in enumerate(("x", "y", "z")):
            signs = np.array([1 if g in kernels[axis] else -1 for g in range(8)])
            rows[5 + i, :] = np.sqrt(1 / 8) * signs
        return rows

    @property
    def irrep_dims(self) -> tuple[int, ...]:
        return (1, 2, 1, 1, 1)

    @cached_property
    def casimir_values(self) -> np.ndarray:
        """Quadratic Casimir on the five truncated Fourier rows."""
        return np.array([0.0, 0.75, 0.75, 0.75, 0.75])


def make_group(name: str) -> FiniteGroup:
    """Build a group from its config name, ``z<d>`` or ``q8``."""
    token = name.strip().lower()
    if token == "q8":
        return QuaternionGroup()
    if token.startswith("z"):
        try:
            d = int(token[1:])
        except ValueError:
            raise InvalidParameterError(f"unknown group name {name!r}") from None
        return CyclicGroup(d)
    raise InvalidParameterError(f"unknown group name {name!r}")
