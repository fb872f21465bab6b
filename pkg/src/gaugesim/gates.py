"""Gate vocabulary for finite-group lattice models.

Every gate is a :class:`GateOp`, a named operation with integer targets
(register axes) and scalar parameters.  Gates are bound to a group only
when applied, so circuits serialize to plain JSON.

Kinds and their actions:

``fourier``
    Group Fourier transform on one link axis (``inverse`` flag).
``char_phase``
    Diagonal in the group basis, ``exp(-2j * lam * dt * Re chi(g))``
    with ``chi`` the faithful character.  Used by magnetic plaquette
    and link-mass factors after folding, and by matter hopping mids.
``fourier_weight_phase``
    Diagonal in the cyclic Fourier basis with the scaled lattice
    Laplacian weight ``(d^2/2 pi^2) * (shift - 2 cos(2 pi n / d))``,
    ``shift = 2`` when the constant offset is kept.
``cyclic_electric``
    One-gate electric step for cyclic groups,
    ``F^dag diag(fourier_weight_phase) F``.
``transfer_electric``
    Electric step from the heat-kernel transfer matrix
    ``T[g', g] = exp((2 / lam) * Re chi(g' g^-1))``; the gate is
    ``exp(1j * dt * log T)``.
``casimir_electric``
    Electric step in the truncated irrep basis, a phase per kept
    Fourier row and a projector on the rest.  Non-unitary.
``group_mult``
    Controlled group multiplication ``|a>|b> -> |a.b>|b>`` (variant
    ``right``; ``left`` composes on the left, ``*_inv`` uses ``b^-1``).
    Targets are ``(target, control)``.
``number_phase``
    ``exp(-1j * angle * n)`` on each listed fermionic mode.
``tunneling``
    Two-mode quadratic rotation; variant ``standard`` applies
    ``exp(-1j * angle * (c^dag c' + h.c.))``, variant ``antisym``
    applies ``exp(-angle * sign * (c^dag c' - h.c.))``.
``matter_rotation``
    Link-controlled rotation of the two matter modes of one site by
    the faithful rep, ``exp(sum log(D(g))_{ab} c^dag_a c_b)``.
    Targets are ``(link, mode, mode)``.
``custom``
    Explicit single-axis matrix, for state preparation helpers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.linalg import schur

from .errors import InvalidParameterError, NumericFailureError, UnsupportedFeatureError
from .groups import CyclicGroup, FiniteGroup, QuaternionGroup
from .register import Register

__all__ = [
    "GateOp",
    "apply_gate",
    "gate_matrix",
    "unitary_log",
    "RESOURCE_CLASSES",
]

RESOURCE_CLASSES = (
    "general_1q",
    "diagonal_1q",
    "two_qudit",
    "fermionic_controlled",
    "fermionic_tunneling",
)

_KIND_CLASS = {
    "fourier": "general_1q",
    "cyclic_electric": "general_1q",
    "transfer_electric": "general_1q",
    "casimir_electric": "general_1q",
    "custom": "general_1q",
    "char_phase": "diagonal_1q",
    "fourier_weight_phase": "diagonal_1q",
    "number_phase": "diagonal_1q",
    "group_mult": "two_qudit",
    "matter_rotation": "fermionic_controlled",
    "tunneling": "fermionic_tunneling",
}


@dataclass
class GateOp:
    kind: str
    targets: tuple[int, ...]
    params: dict[str, Any] = field(default_factory=dict)
    factor: str = ""

    def __post_init__(self) -> None:
        if self.kind not in _KIND_CLASS:
            raise InvalidParameterError(f"unknown gate kind {self.kind!r}")
        self.targets = tuple(int(t) for t in self.targets)

    @property
    def resource_class(self) -> str:
        return _KIND_CLASS[self.kind]

    def adjoint(self) -> "GateOp":
        kind, params = self.kind, dict(self.params)
        if kind == "fourier":
            params["inverse"] = not params.get("inverse", False)
        elif kind in ("char_phase", "fourier_weight_phase"):
            params["dt"] = -params["dt"]
        elif kind in ("cyclic_electric", "transfer_electric"):
            params["dt"] = -params["dt"]
        elif kind == "number_phase":
            params["angle"] = -params["angle"]
        elif kind == "tunneling":
            params["angle"] = -params["angle"]
        elif kind == "matter_rotation":
            params["inverse"] = not params.get("inverse", False)
        elif kind == "group_mult":
            flips = {"right": "right_inv", "right_inv": "right",
                     "left": "left_inv", "left_inv": "left"}
            params["variant"] = flips[params["variant"]]
        elif kind == "custom":
            params["matrix"] = np.asarray(params["matrix"]).conj().T
        else:
            raise UnsupportedFeatureError(f"gate kind {kind!r} has no adjoint")
        return GateOp(kind, self.targets, params, self.factor)


def unitary_log(matrix: np.ndarray) -> np.ndarray:
    """Principal logarithm of a unitary matrix via its Schur form.

    Eigenphases are taken in ``(-pi, pi]``, so ``-1`` maps to ``+1j*pi``.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    t, q = schur(matrix, output="complex")
    off = np.max(np.abs(t - np.diag(np.diag(t)))) if t.shape[0] > 1 else 0.0
    if off > 1e-10:
        raise NumericFailureError("matrix is not normal, log undefined here")
    angles = np.angle(np.diag(t))
    angles[angles <= -np.pi + 1e-9] += 2.0 * np.pi
    return (q * (1j * angles)[None, :]) @ q.conj().T


def _char_phases(group: FiniteGroup, lam: float, dt: float) -> np.ndarray:
    return np.exp(-2j * lam * dt * group.characters.real)


def _fourier_weights(d: int, shifted: bool) -> np.ndarray:
    n = np.arange(d)
    shift = 2.0 if shifted else 0.0
    return (d * d / (2 * np.pi**2)) * (shift - 2.0 * np.cos(2 * np.pi * n / d))


def _weight_phases(d: int, lam: float, dt: float, shifted: bool) -> np.ndarray:
    return np.exp(-1j * lam * dt * _fourier_weights(d, shifted))


_TRANSFER_CACHE: dict[tuple[str, float], np.ndarray] = {}


def _transfer_log(group: FiniteGroup, lam: float) -> np.ndarray:
    if lam <= 0:
        raise InvalidParameterError("transfer-matrix electric gate needs lam > 0")
    key = (group.name, float(lam))
    if key not in _TRANSFER_CACHE:
        chi = group.characters.real
        pairs = group.table[:, group.inverse_table]
        tmat = np.exp((2.0 / lam) * chi[pairs])
        w, v = np.linalg.eigh(tmat)
        if np.min(w) <= 0:
            raise NumericFailureError("transfer matrix is not positive definite")
        _TRANSFER_CACHE[key] = (v * np.log(w)[None, :]) @ v.T.conj()
    return _TRANSFER_CACHE[key]


_ROTATION_CACHE: dict[str, np.ndarray] = {}


def _matter_coeffs(group: FiniteGroup) -> np.ndarray:
    if group.faithful_dim != 2:
        raise UnsupportedFeatureError(
            "matter rotations need a two-dimensional faithful rep"
        )
    if group.name not in _ROTATION_CACHE:
        _ROTATION_CACHE[group.name] = np.stack(
            [unitary_log(mat) for mat in group.faithful]
        )
    return _ROTATION_CACHE[group.name]


def _mult_perms(group: FiniteGroup, variant: str) -> np.ndarray:
    perms = np.empty((group.order, group.order), dtype=np.int64)
    for c in range(group.order):
        if variant == "right":
            perms[c] = group.right_action_perm(c)
        elif variant == "right_inv":
            perms[c] = group.right_action_perm(group.inverse(c))
        elif variant == "left":
            perms[c] = group.left_action_perm(c)
        elif variant == "left_inv":
            perms[c] = group.left_action_perm(group.inverse(c))
        else:
            raise InvalidParameterError(f"unknown group_mult variant {variant!r}")
    return perms


def gate_matrix(gate: GateOp, group: FiniteGroup) -> np.ndarray:
    """Dense matrix of a single-axis gate (not defined for multi-axis kinds)."""
    kind, params = gate.kind, gate.params
    if kind == "fourier":
        f = group.fourier
        return f.conj().T if params.get("inverse", False) else f
    if kind == "char_phase":
        return np.diag(_char_phases(group, params["lam"], params["dt"]))
    if kind == "fourier_weight_phase":
        _require_cyclic(group)
        return np.diag(
            _weight_phases(group.order, params["lam"], params["dt"], params["shifted"])
        )
    if kind == "cyclic_electric":
        _require_cyclic(group)
        f = group.fourier
        diag = _weight_phases(group.order, params["lam"], params["dt"], params["shifted"])
        return f.conj().T @ (diag[:, None] * f)
    if kind == "transfer_electric":
        logt = _transfer_log(group, params["lam"])
        w, v = np.linalg.eigh(-logt)
        return (v * np.exp(-1j * params["dt"] * w)[None, :]) @ v.T.conj()
    if kind == "casimir_electric":
        if not isinstance(group, QuaternionGroup):
            raise UnsupportedFeatureError(
                "casimir electric gates are defined for the truncated quaternion basis"
            )
        f = group.fourier
        diag = np.zeros(group.order, dtype=np.complex128)
        kept = group.truncated_dim
        diag[:kept] = np.exp(-1j * params["theta"] * group.casimir_values)
        return f.conj().T @ (diag[:, None] * f)
    if kind == "custom":
        return np.asarray(params["matrix"], dtype=np.complex128)
    raise InvalidParameterError(f"gate kind {kind!r} has no single-axis matrix")


def _require_cyclic(group: FiniteGroup) -> None:
    if not isinstance(group, CyclicGroup):
        raise UnsupportedFeatureError("this gate kind needs a cyclic group")


def apply_gate(reg: Register, gate: GateOp, group: FiniteGroup) -> None:
    """Apply one gate to the register in place."""
    kind, params, targets = gate.kind, gate.params, gate.targets
    if kind in ("fourier", "cyclic_electric", "transfer_electric",
                "casimir_electric", "custom"):
        reg.apply_single(targets[0], gate_matrix(gate, group))
        return
    if kind == "char_phase":
        reg.apply_diagonal(targets[0], _char_phases(group, params["lam"], params["dt"]))
        return
    if kind == "fourier_weight_phase":
        _require_cyclic(group)
        reg.apply_diagonal(
            targets[0],
            _weight_phases(group.order, params["lam"], params["dt"], params["shifted"]),
        )
        return
    if kind == "group_mult":
        target, control = targets
        reg.apply_controlled_perm(control, target, _mult_perms(group, params["variant"]))
        return
    if kind == "number_phase":
        phases = np.array([1.0, np.exp(-1j * params["angle"])])
        for axis in targets:
            reg.apply_diagonal(axis, phases)
        return
    if kind == "tunneling":
        angle = params["angle"]
        if params["variant"] == "standard":
            coeff = -1j * angle * np.array([[0, 1], [1, 0]], dtype=complex)
        elif params["variant"] == "antisym":
            coeff = -angle * params.get("sign", 1.0) * np.array(
                [[0, 1], [-1, 0]], dtype=complex
            )
        else:
            raise InvalidParameterError(f"unknown tunneling variant {params['variant']!r}")
        reg.apply_fermion_rotation((targets[0], targets[1]), coeff)
        return
    if kind == "matter_rotation":
        coeffs = _matter_coeffs(group)
        if params.get("inverse", False):
            coeffs = -coeffs
        reg.apply_controlled_fermion_rotation(
            targets[0], (targets[1], targets[2]), coeffs
        )
        return
    raise InvalidParameterError(f"unknown gate kind {kind!r}")
