"""Energies, charges, fidelities, and current-current correlators.

Local energies come straight from the named term map of a
:class:`~gaugesim.oracle.SparseOperator`, so one routine serves both
models.  The chain correlator works in the truncated link basis: the
exact backend propagates with the Lanczos oracle, the circuit backend
embeds the state into the full register, runs symmetrized Trotter
steps (renormalizing after each truncation projector, with the initial
norm of the source vector carried as an explicit scale), and restricts
back at the sample times.

Super-site ``x`` pairs staggered sites ``2x`` and ``2x+1``.  The charge
on a super-site is its total mode occupation; the current rides on the
inner link ``2x``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .circuits import ChainModel
from .errors import InvalidParameterError
from .oracle import (
    MatrixTerm,
    ProductDiagTerm,
    SparseOperator,
    bond_forward_matrix,
    chain_hamiltonian,
    chain_oracle_dims,
    embed_chain_state,
    exact_evolve,
    restrict_chain_state,
)
from .register import Register

__all__ = [
    "CorrelatorTable",
    "local_energies",
    "family_energy",
    "baryon_number",
    "fidelity",
    "charge_operator",
    "current_operator",
    "hadronic_correlator",
    "hadronic_ft",
]


@dataclass(frozen=True)
class CorrelatorTable:
    """Real correlator samples on a (super-site, time) grid.

    ``values[i, j]`` is the correlator at ``cells[i]``, ``times[j]``.
    The transform fields are filled by :func:`hadronic_ft`.
    """

    mu: int
    nu: int
    cells: np.ndarray
    times: np.ndarray
    values: np.ndarray
    momentum: int = 0
    k_values: np.ndarray | None = None
    omega_values: np.ndarray | None = None
    transform: np.ndarray | None = None


def _as_vector(state) -> np.ndarray:
    if isinstance(state, Register):
        return state.vector
    return np.asarray(state, dtype=np.complex128).reshape(-1)


def local_energies(op: SparseOperator, state) -> dict:
    """Expectation of every named member of the term map."""
    vec = _as_vector(state)
    return {key: op.term_expectation(key, vec) for key in op.members}


def family_energy(op: SparseOperator, state) -> dict:
    """Per-family totals plus the full expectation under ``"total"``."""
    vec = _as_vector(state)
    out = {fam: op.family_expectation(fam, vec) for fam in op.families()}
    out["total"] = sum(out.values())
    return out


def baryon_number(model: ChainModel, state) -> float:
    """Half the occupation excess over half filling, ``(sum n - N) / 2``."""
    vec = _as_vector(state)
    n = model.n_sites
    n_modes = 2 * n
    mode_dim = 2**n_modes
    if vec.size % mode_dim:
        raise InvalidParameterError("state does not factor into chain modes")
    weights = np.abs(vec.reshape(-1, mode_dim)) ** 2
    occupation = np.array([bin(m).count("1") for m in range(mode_dim)], dtype=float)
    return float(weights.sum(axis=0) @ (occupation - n) / 2.0)


def fidelity(a, b) -> float:
    va, vb = _as_vector(a), _as_vector(b)
    if va.size != vb.size:
        raise InvalidParameterError("states live on different layouts")
    return float(abs(np.vdot(va, vb)) ** 2)


def charge_operator(model: ChainModel, cell: int) -> SparseOperator:
    """Total occupation of super-site ``cell`` (staggered sites 2x, 2x+1)."""
    n = model.n_sites
    if not 0 <= cell < n // 2:
        raise InvalidParameterError(f"cell {cell} outside 0..{n // 2 - 1}")
    occ = np.array([0.0, 1.0])
    terms = [
        ProductDiagTerm((n + 2 * (2 * cell) + k,), (occ,), 1.0) for k in range(4)
    ]
    return SparseOperator(chain_oracle_dims(model), {("charge", cell): terms})


def current_operator(model: ChainModel, cell: int) -> SparseOperator:
    """Gauge-covariant hop across the inner link of super-site ``cell``."""
    n = model.n_sites
    if not 0 <= cell < n // 2:
        raise InvalidParameterError(f"cell {cell} outside 0..{n // 2 - 1}")
    forward = bond_forward_matrix(model, 2 * cell)
    mat = (forward + forward.conj().T).tocsr()
    return SparseOperator(
        chain_oracle_dims(model), {("current", cell): [MatrixTerm(mat)]}
    )


def _component_operators(model: ChainModel, mu: int) -> list[SparseOperator]:
    build = {0: charge_operator, 1: current_operator}.get(mu)
    if build is None:
        raise InvalidParameterError(f"current component must be 0 or 1, got {mu}")
    return [build(model, cell) for cell in range(model.n_sites // 2)]


def hadronic_correlator(
    model: ChainModel,
    state,
    times,
    mu: int = 0,
    nu: int = 0,
    backend: str = "exact",
    dt: float | None = None,
    order: int = 2,
    momentum: int = 0,
    krylov_dim: int = 24,
    tol: float = 1e-10,
) -> CorrelatorTable:
    """Two-current correlator ``Re <phi(t)| j^mu_x |chi(t)>``.

    ``phi`` is the evolved input state, ``chi`` the evolved
    ``j^nu_0 |state>`` (its norm is carried, never renormalized away).
    ``state`` lives in the truncated link basis.  ``backend`` is
    ``"exact"`` (Lanczos) or ``"trotter"`` (full-register circuit of
    symmetrized order ``order`` with step ``dt``; sample times must be
    whole numbers of steps).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise InvalidParameterError("times must be a non-empty 1d grid")
    if np.any(np.diff(times) <= 0) or times[0] < 0:
        raise InvalidParameterError("times must be strictly increasing and >= 0")
    vec = _as_vector(state)
    probes = _component_operators(model, mu)
    source = _component_operators(model, nu)[0]
    cells = np.arange(model.n_sites // 2)
    values = np.empty((cells.size, times.size))

    if backend == "exact":
        ham = chain_hamiltonian(model)
        phi = vec.copy()
        chi = source.matvec(vec)
        t_prev = 0.0
        for j, t in enumerate(times):
            step = t - t_prev
            if step > 0:
                phi = exact_evolve(ham, phi, step, krylov_dim, tol)
                chi = exact_evolve(ham, chi, step, krylov_dim, tol)
            t_prev = t
            for i, probe in enumerate(probes):
                values[i, j] = np.real(np.vdot(phi, probe.matvec(chi)))
    elif backend == "trotter":
        if dt is None or dt <= 0:
            raise InvalidParameterError("trotter backend needs a positive dt")
        steps = times / dt
        rounded = np.rint(steps)
        if np.max(np.abs(steps - rounded)) > 1e-8:
            raise InvalidParameterError("sample times must be multiples of dt")
        chi0 = source.matvec(vec)
        scale = float(np.linalg.norm(chi0))
        phi_reg = Register(model.dims, model.fermionic, embed_chain_state(vec, model))
        chi_reg = Register(
            model.dims,
            model.fermionic,
            embed_chain_state(chi0 / scale if scale > 0 else chi0, model),
        )
        circuit = model.trotter_step(dt, order)
        done = 0
        for j, t in enumerate(times):
            target = int(rounded[j])
            for _ in range(target - done):
                circuit.apply(phi_reg, renormalize=True)
                circuit.apply(chi_reg, renormalize=True)
            done = target
            phi = restrict_chain_state(phi_reg.vector, model)
            chi = scale * restrict_chain_state(chi_reg.vector, model)
            for i, probe in enumerate(probes):
                values[i, j] = np.real(np.vdot(phi, probe.matvec(chi)))
    else:
        raise InvalidParameterError(f"unknown backend {backend!r}")
    return CorrelatorTable(mu, nu, cells, times, values, momentum)


def hadronic_ft(
    table: CorrelatorTable,
    k_values,
    omega_values,
    window=None,
) -> CorrelatorTable:
    """Windowed discrete transform of a correlator table.

    ``transform[k, w] = sum_{x,t} dt * win(t) * exp(-1j*(w*t + 2*pi*k*x/nc))
    * values[x, t]`` with ``nc`` the number of super-sites.  ``window``
    is ``None`` (rectangular), a callable on ``t``, or a weight array.
    """
    times = np.asarray(table.times, dtype=float)
    if times.size < 2:
        raise InvalidParameterError("transform needs at least two time samples")
    spacings = np.diff(times)
    step = spacings[0]
    if np.max(np.abs(spacings - step)) > 1e-9 * max(1.0, abs(step)):
        raise InvalidParameterError("transform needs a uniform time grid")
    if window is None:
        weights = np.ones_like(times)
    elif callable(window):
        weights = np.asarray([window(t) for t in times], dtype=float)
    else:
        weights = np.asarray(window, dtype=float)
        if weights.shape != times.shape:
            raise InvalidParameterError("window weights must match the time grid")
    k_values = np.asarray(k_values, dtype=float)
    omega_values = np.asarray(omega_values, dtype=float)
    nc = table.cells.size
    space_phase = np.exp(
        -2j * np.pi * np.outer(k_values, table.cells) / nc
    )
    time_phase = np.exp(-1j * np.outer(omega_values, times)) * (weights * step)
    transform = space_phase @ table.values @ time_phase.T
    return replace(
        table,
        k_values=k_values,
        omega_values=omega_values,
        transform=transform,
    )
