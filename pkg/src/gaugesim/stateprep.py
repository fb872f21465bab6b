"""Initial states for the benchmarks.

Flux strings live on the square-model gauge register, baryon states on
the chain register.  Two preparation routes drive the chain's Trotter
circuits toward the interacting ground state: an adiabatic coupling
ramp and a variational search over per-block Trotter angles.  Both are
scored against oracle eigenvectors from the truncated-space solver.

The variational search runs its inner loop on a fixed-occupation sector
of the truncated space, where every ansatz layer has an exact sparse
generator; the reported fidelity always comes from running the actual
gate circuit with the best angles found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .circuits import ChainModel, SquareModel
from .errors import InvalidParameterError, NumericFailureError, UnsupportedFeatureError
from .observables import fidelity
from .oracle import (
    MatrixTerm,
    SectorBasis,
    SparseOperator,
    bond_forward_matrix,
    chain_gauss_project,
    chain_hamiltonian,
    exact_evolve,
    ground_state,
    restrict_chain_state,
)
from .register import Register

__all__ = [
    "RampSchedule",
    "VariationalPlan",
    "VariationalResult",
    "flux_string_state",
    "staggered_vacuum",
    "baryon_reference_state",
    "sector_ground_state",
    "baryon_ground_state",
    "linear_ramp",
    "adiabatic_prepare",
    "adiabatic_search",
    "variational_prepare",
]

_COUPLING_KEYS = ("lam_e", "x", "mu")


def flux_string_state(model: SquareModel, string_links) -> np.ndarray:
    """Product state carrying one unit of electric flux on the given links.

    Every link is set to a Fourier column of its group register: column 1
    on the string links, column 0 elsewhere.  The chosen links must form
    closed flux lines, i.e. the net flux into every site must vanish
    mod d; on a periodic lattice that means winding loops such as two
    parallel links across the torus.
    """
    lattice = model.lattice
    chosen = [int(link) for link in string_links]
    if not chosen:
        raise InvalidParameterError("flux string needs at least one link")
    if len(set(chosen)) != len(chosen):
        raise InvalidParameterError("string links must be distinct")
    divergence = np.zeros(lattice.n_sites, dtype=np.int64)
    for idx in chosen:
        if not 0 <= idx < lattice.n_links:
            raise InvalidParameterError(f"link {idx} outside the lattice")
        site, direction = divmod(idx, 2)
        y, x = divmod(site, lattice.width)
        if direction == 0:
            end = lattice.site_index(x + 1, y)
        else:
            end = lattice.site_index(x, y + 1)
        divergence[site] += 1
        divergence[end] -= 1
    if np.any(divergence % model.d):
        raise InvalidParameterError("string links do not close into winding flux")
    fourier_dag = model.group.fourier.conj().T
    string = set(chosen)
    vec = np.ones(1, dtype=np.complex128)
    for idx in range(lattice.n_links):
        vec = np.kron(vec, fourier_dag[:, 1 if idx in string else 0])
    return vec


def staggered_vacuum(model: ChainModel) -> Register:
    """Half-filled chain reference: odd sites doubly occupied, links trivial."""
    reg = Register(model.dims, model.fermionic)
    fourier_dag = model.group.fourier.conj().T
    for n in range(model.n_sites):
        reg.apply_single(model.link_axis(n), fourier_dag)
    for n in range(model.n_sites):
        if n % 2 == 1:
            reg.apply_mode_raising(model.mode_axis(n, 1))
            reg.apply_mode_raising(model.mode_axis(n, 0))
    return reg


def baryon_reference_state(model: ChainModel, p: int) -> Register:
    """Momentum-p doubly-raised excitation over the half-filled vacuum.

    Adds a fermion pair on each even site with a relative phase
    exp(2 pi i p n / N) and normalizes; the gauge links stay in the
    trivial Fourier column, so the state is gauge invariant and carries
    baryon number one.
    """
    n_sites = model.n_sites
    if n_sites % 2:
        raise InvalidParameterError("baryon reference needs an even chain")
    if not 0 <= int(p) < n_sites // 2:
        raise InvalidParameterError(
            f"momentum index {p} outside 0..{n_sites // 2 - 1}"
        )
    vacuum = staggered_vacuum(model)
    total = np.zeros(vacuum.vector.size, dtype=np.complex128)
    for m in range(0, n_sites, 2):
        term = vacuum.copy()
        term.apply_mode_raising(model.mode_axis(m, 1))
        term.apply_mode_raising(model.mode_axis(m, 0))
        total += np.exp(2j * np.pi * p * m / n_sites) * term.vector
    reg = Register(model.dims, model.fermionic, total)
    reg.normalize()
    return reg


def sector_ground_state(
    model: ChainModel, occupation: int, k: int = 8, gauge_tol: float = 0.99
) -> tuple[float, np.ndarray]:
    """Lowest gauge-invariant eigenpair at fixed total mode occupation.

    Diagonalizes the truncated Hamiltonian restricted to the occupation
    sector, walks the lowest ``k`` eigenvectors until one carries Gauss
    projector weight above ``gauge_tol``, and returns that eigenvalue with
    the projector-purified vector in the truncated full layout.
    """
    sector = SectorBasis(model, occupation)
    full = chain_hamiltonian(model).tocsr()
    restricted = full[sector.indices][:, sector.indices].tocsr()
    wrapped = SparseOperator((sector.dim,), {("h", 0): [MatrixTerm(restricted)]})
    if sector.dim == 1:
        vals, vecs = np.array([restricted[0, 0].real]), np.eye(1, dtype=complex)
    else:
        vals, vecs = ground_state(wrapped, k=min(k, sector.dim - 1))
    for i in range(vals.size):
        candidate = sector.embed(vecs[:, i])
        projected = chain_gauss_project(candidate, model)
        weight = float(np.linalg.norm(projected))
        if weight**2 > gauge_tol:
            return float(vals[i]), projected / weight
    raise NumericFailureError(
        f"no gauge-invariant state among the lowest {vals.size} sector eigenvectors"
    )


def baryon_ground_state(
    model: ChainModel, k: int = 8, gauge_tol: float = 0.99
) -> tuple[float, np.ndarray]:
    """Lowest gauge-invariant eigenpair in the one-baryon sector (N + 2)."""
    return sector_ground_state(model, model.n_sites + 2, k, gauge_tol)


@dataclass(frozen=True)
class RampSchedule:
    """Piecewise-linear coupling path discretized into Trotter steps.

    Each knot is ``(duration fraction, couplings at the knot's end)``;
    the path starts from a model's current couplings and holds any key a
    knot omits.  Fractions must be positive and sum to one.
    """

    knots: tuple
    steps: int
    dt: float

    def __post_init__(self) -> None:
        knots = tuple((float(f), dict(c)) for f, c in self.knots)
        object.__setattr__(self, "knots", knots)
        if not knots:
            raise InvalidParameterError("ramp needs at least one knot")
        fractions = [f for f, _ in knots]
        if any(f <= 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
            raise InvalidParameterError(
                "knot fractions must be positive and sum to 1"
            )
        for _, couplings in knots:
            for key, val in couplings.items():
                if key not in _COUPLING_KEYS:
                    raise InvalidParameterError(f"unknown coupling {key!r}")
                if not math.isfinite(float(val)):
                    raise InvalidParameterError(f"coupling {key!r} must be finite")
        if int(self.steps) < 0:
            raise InvalidParameterError("step count must be >= 0")
        if not self.dt > 0:
            raise InvalidParameterError("dt must be positive")

    def couplings_at(self, s: float, start: dict) -> dict:
        """Couplings at path fraction ``s`` starting from ``start`` values."""
        current = {key: float(start[key]) for key in _COUPLING_KEYS}
        s = min(max(float(s), 0.0), 1.0)
        acc = 0.0
        for frac, knot in self.knots:
            target = {**current, **{k: float(v) for k, v in knot.items()}}
            if s <= acc + frac:
                w = (s - acc) / frac
                return {
                    key: current[key] + w * (target[key] - current[key])
                    for key in _COUPLING_KEYS
                }
            current = target
            acc += frac
        return current


def linear_ramp(target_couplings: dict, steps: int, dt: float) -> RampSchedule:
    """Single-segment ramp ending at the given couplings."""
    return RampSchedule(((1.0, dict(target_couplings)),), steps, dt)


def adiabatic_prepare(
    model: ChainModel,
    initial: Register,
    ramp: RampSchedule,
    target: np.ndarray | None = None,
    order: int = 2,
) -> tuple[Register, np.ndarray]:
    """March Trotter steps while the couplings slide along the ramp.

    ``model`` carries the couplings at the start of the ramp; each step
    runs the chain circuit built at the ramp's midpoint couplings for
    that step.  When an oracle target vector (truncated layout) is given,
    the fidelity against it is recorded after every step.
    """
    if tuple(initial.dims) != tuple(model.dims):
        raise InvalidParameterError("initial state does not match the model register")
    start = {key: getattr(model, key) for key in _COUPLING_KEYS}
    reg = initial.copy()
    trace = np.zeros(ramp.steps, dtype=float)
    for i in range(ramp.steps):
        couplings = ramp.couplings_at((i + 0.5) / ramp.steps, start)
        stepper = ChainModel(model.n_sites, group=model.group, **couplings)
        stepper.trotter_step(ramp.dt, order).apply(reg, renormalize=True)
        if target is not None:
            trace[i] = fidelity(restrict_chain_state(reg.vector, model), target)
    return reg, trace


def adiabatic_search(
    model: ChainModel,
    initial: Register,
    ramp: RampSchedule,
    target: np.ndarray,
    threshold: float = 0.99,
    max_doublings: int = 6,
) -> tuple[RampSchedule, Register, np.ndarray]:
    """Double the ramp's step count until the final fidelity clears threshold."""
    steps = max(int(ramp.steps), 1)
    for _ in range(max_doublings + 1):
        trial = replace(ramp, steps=steps)
        reg, trace = adiabatic_prepare(model, initial, trial, target)
        if trace.size and trace[-1] >= threshold:
            return trial, reg, trace
        steps *= 2
    raise NumericFailureError(
        f"ramp search stayed below fidelity {threshold} after {max_doublings} doublings"
    )


@dataclass(frozen=True)
class VariationalPlan:
    """Settings for the per-block Trotter-angle search."""

    n_blocks: int
    init_angles: np.ndarray | None = None
    max_evals: int = 400
    tol: float = 1e-9
    seed: int = 11
    method: str = "nelder-mead"
    polish_evals: int = 0

    def __post_init__(self) -> None:
        if int(self.n_blocks) < 1:
            raise InvalidParameterError("plan needs at least one block")
        if self.method != "nelder-mead":
            raise UnsupportedFeatureError(f"unknown optimizer {self.method!r}")
        if self.init_angles is not None:
            arr = np.asarray(self.init_angles, dtype=float).reshape(-1)
            if arr.size != 2 * self.n_blocks or not np.all(np.isfinite(arr)):
                raise InvalidParameterError(
                    "initial angles must be 2 * n_blocks finite values"
                )
            object.__setattr__(self, "init_angles", arr)
        if int(self.max_evals) < 1 or int(self.polish_evals) < 0:
            raise InvalidParameterError("evaluation budgets must be positive")


@dataclass(frozen=True)
class VariationalResult:
    angles: np.ndarray
    fidelity: float
    improved: bool
    evaluations: int
    stage_fidelities: tuple


class _SectorAnsatz:
    """Exact per-layer ansatz action on a fixed-occupation sector."""

    def __init__(self, model: ChainModel, occupation: int) -> None:
        self.model = model
        self.sector = SectorBasis(model, occupation)
        idx = self.sector.indices
        probe_e = ChainModel(model.n_sites, 1.0, 0.0, 0.0, group=model.group)
        probe_m = ChainModel(model.n_sites, 0.0, 0.0, 1.0, group=model.group)
        diag_e = chain_hamiltonian(probe_e).tocsr().diagonal()[idx].real
        diag_m = chain_hamiltonian(probe_m).tocsr().diagonal()[idx].real
        self.diag0 = model.lam_e * diag_e + model.mu * diag_m
        self.op_even = self._layer_operator(model.chain.even_bonds(), idx)
        self.op_odd = self._layer_operator(model.chain.odd_bonds(), idx)

    def _layer_operator(self, bonds, idx) -> SparseOperator:
        mats = []
        for bond in bonds:
            sign = -1.0 if bond.wrap else 1.0
            forward = bond_forward_matrix(self.model, bond.link)
            mats.append((-1j * self.model.x * sign) * (forward - forward.conj().T))
        total = sum(mats[1:], start=mats[0])
        restricted = total.tocsr()[idx][:, idx].tocsr()
        return SparseOperator(
            (self.sector.dim,), {("layer", 0): [MatrixTerm(restricted)]}
        )

    def apply(self, vec: np.ndarray, angles: np.ndarray) -> np.ndarray:
        out = vec.copy()
        for diag, hop in angles:
            half = np.exp(-0.5j * diag * self.diag0)
            out = half * out
            out = exact_evolve(self.op_even, out, hop, krylov_dim=16, tol=1e-9)
            out = exact_evolve(self.op_odd, out, hop, krylov_dim=16, tol=1e-9)
            out = half * out
        return out


class _BestTracker:
    """Wrap an objective, remembering the best point ever evaluated."""

    def __init__(self, func) -> None:
        self.func = func
        self.best_x = None
        self.best_f = np.inf
        self.count = 0

    def __call__(self, x: np.ndarray) -> float:
        val = float(self.func(x))
        self.count += 1
        if val < self.best_f:
            self.best_f = val
            self.best_x = np.array(x, dtype=float)
        return val


def _simplex(x0: np.ndarray, scale: float, rng: np.random.Generator) -> np.ndarray:
    simplex = np.tile(x0, (x0.size + 1, 1))
    for j in range(x0.size):
        simplex[j + 1, j] += scale * (1.0 + 0.1 * rng.standard_normal())
    return simplex


def _occupation_sector(model: ChainModel, reg: Register) -> int:
    n_modes = 2 * model.n_sites
    mode_dim = 2**n_modes
    probs = (np.abs(reg.vector.reshape(-1, mode_dim)) ** 2).sum(axis=0)
    occ = np.array([bin(m).count("1") for m in range(mode_dim)])
    dist = np.zeros(n_modes + 1)
    np.add.at(dist, occ, probs)
    best = int(np.argmax(dist))
    if dist[best] < 1.0 - 1e-9:
        raise InvalidParameterError("initial state spreads over occupation sectors")
    return best


def variational_prepare(
    model: ChainModel,
    initial: Register,
    plan: VariationalPlan,
    target: np.ndarray,
) -> VariationalResult:
    """Optimize per-block Trotter angles toward the target state.

    Nested warm starts: plans with 1..n blocks are optimized in turn on
    the sector surrogate; each stage starts from its predecessor's
    optimum padded with an idle block (so the best surrogate fidelity
    never decreases with the block count) and from coarse ramp-shaped
    angle profiles that step the hop angle up linearly.  The returned
    fidelity is measured by running the gate circuit at the best angles;
    with ``polish_evals > 0`` a short direct search on the circuit
    itself refines them first.
    """
    target = np.asarray(target, dtype=np.complex128).reshape(-1)
    occupation = _occupation_sector(model, initial)
    ansatz = _SectorAnsatz(model, occupation)
    v0 = ansatz.sector.restrict(restrict_chain_state(initial.vector, model))
    t0 = ansatz.sector.restrict(target)
    rng = np.random.default_rng(plan.seed)

    def surrogate_objective(theta: np.ndarray, k: int) -> float:
        out = ansatz.apply(v0, theta.reshape(k, 2))
        return 1.0 - abs(np.vdot(t0, out)) ** 2

    def ramp_profiles(k: int) -> list[np.ndarray]:
        outs = []
        for horizon in (2.0, 4.0):
            delta = horizon / k
            profile = [(delta, delta * (j + 0.5) / k) for j in range(k)]
            outs.append(np.array(profile).ravel())
        return outs

    def planned_block(k: int) -> np.ndarray:
        if plan.init_angles is not None:
            return np.asarray(plan.init_angles[2 * (k - 1) : 2 * k], dtype=float)
        return np.zeros(2)

    x_prev = None
    stage_fidelities = []
    evaluations = 0
    for k in range(1, plan.n_blocks + 1):
        starts = []
        if x_prev is None:
            starts.append(planned_block(1))
        else:
            starts.append(np.concatenate([x_prev, planned_block(k)]))
        starts.extend(ramp_profiles(k))
        tracker = _BestTracker(lambda th: surrogate_objective(th, k))
        for start in starts:
            tracker(start)
        minimize(
            tracker,
            tracker.best_x,
            method="Nelder-Mead",
            options={
                "maxfev": plan.max_evals * k,
                "fatol": plan.tol,
                "xatol": 1e-6,
                "initial_simplex": _simplex(tracker.best_x, 0.3, rng),
            },
        )
        x_prev = tracker.best_x
        evaluations += tracker.count
        stage_fidelities.append(1.0 - tracker.best_f)

    def circuit_infidelity(theta: np.ndarray) -> float:
        reg = initial.copy()
        circ = model.variational_circuit(theta.reshape(plan.n_blocks, 2))
        circ.apply(reg, renormalize=True)
        return 1.0 - fidelity(restrict_chain_state(reg.vector, model), target)

    best_x = x_prev
    tracker = _BestTracker(circuit_infidelity)
    tracker(best_x)
    if plan.polish_evals > 0:
        minimize(
            tracker,
            best_x,
            method="Nelder-Mead",
            options={
                "maxfev": plan.polish_evals,
                "fatol": plan.tol,
                "xatol": 1e-6,
                "initial_simplex": _simplex(best_x, 0.02, rng),
            },
        )
        evaluations += tracker.count
    best_fid = 1.0 - tracker.best_f
    baseline_angles = (
        plan.init_angles
        if plan.init_angles is not None
        else np.zeros(2 * plan.n_blocks)
    )
    baseline = 1.0 - circuit_infidelity(np.asarray(baseline_angles, dtype=float))
    return VariationalResult(
        angles=tracker.best_x.reshape(plan.n_blocks, 2),
        fidelity=best_fid,
        improved=bool(best_fid > baseline + 1e-12),
        evaluations=evaluations,
        stage_fidelities=tuple(stage_fidelities),
    )
