"""End-to-end acceptance checks, one test per delivery criterion.

Each test exercises a full benchmark path at desk scale: the quench
presets, the group-order sweep, circuit-vs-exponential equivalence,
gauge invariance of every Trotter factor, the second-order error slope,
integer resource counts, baryon state preparation, the charge
correlator, and a recap of the structural property suites.
"""

import itertools

import numpy as np
import pytest
from scipy.linalg import expm

from gaugesim import (
    ChainModel,
    Circuit,
    CyclicGroup,
    QuaternionGroup,
    Register,
    SquareModel,
    count_gates,
    pulse_estimate,
)
from gaugesim.circuits import group_matter_hopping_gates, plaquette_gates
from gaugesim.cli import parse_config_text, preset_text, run_quench
from gaugesim.gates import GateOp, gate_matrix
from gaugesim.observables import (
    charge_operator,
    family_energy,
    hadronic_correlator,
)
from gaugesim.oracle import (
    apply_gauss_register,
    dense_bond_hamiltonian,
    exact_evolve,
    square_hamiltonian,
    square_star_shift,
    truncation_matrix,
)
from gaugesim.stateprep import (
    VariationalPlan,
    adiabatic_search,
    baryon_ground_state,
    baryon_reference_state,
    flux_string_state,
    linear_ramp,
    variational_prepare,
)

LAM_E = 4.0 * np.pi / 9.0
LAM_J = 2.0 * np.pi / 9.0


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# gaugesim-csv v1 ")
    header = lines[1].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    return {name: rows[:, i] for i, name in enumerate(header)}


def random_state(size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=size) + 1j * rng.normal(size=size)
    return vec / np.linalg.norm(vec)


def apply_circuit(circ: Circuit, model, vec: np.ndarray) -> np.ndarray:
    reg = Register(model.dims, model.fermionic, vec.copy())
    circ.apply(reg)
    return reg.vector


# 1. quench preset: bounded energy drift, Trotter traces track the oracle


def test_quench_preset_drift_and_exact_agreement(tmp_path) -> None:
    cfg = parse_config_text(preset_text("quench"))
    assert cfg.steps >= 55
    assert cfg.steps * cfg.dt >= 4.0
    trotter_path, exact_path = run_quench(cfg, tmp_path)
    trotter = read_csv(trotter_path)
    exact = read_csv(exact_path)
    drift = np.abs(trotter["total"] - trotter["total"][0]).max()
    assert drift <= 0.25
    for family in ("electric", "magnetic", "mass", "coupling"):
        deviation = np.abs(trotter[family] - exact[family]).max()
        assert deviation <= 0.1, f"{family} trace deviates by {deviation}"


# 2. group-order sweep: gauge-sector transfer converged by the last two d


def _gauge_transfer_trace(d: int) -> np.ndarray:
    model = SquareModel(d, LAM_E, 2.0, 0.5, LAM_J)
    op = square_hamiltonian(model)
    vec = flux_string_state(model, (1, 5))
    gauge = np.empty(21)
    for i in range(gauge.size):
        if i:
            vec = exact_evolve(op, vec, 0.2)
        fam = family_energy(op, vec)
        gauge[i] = fam["electric"] + fam["magnetic"]
    return gauge


def test_group_order_sweep_converges() -> None:
    gauge = {d: _gauge_transfer_trace(d) for d in (3, 4, 5, 6)}
    initial = [gauge[d][0] for d in (3, 4, 5, 6)]
    gaps = np.diff(initial)
    assert np.all(gaps > 0), "initial energy must increase toward its limit"
    assert np.all(np.diff(gaps) < 0), "initial-energy gaps must shrink"
    transfer5 = gauge[5] - gauge[5][0]
    transfer6 = gauge[6] - gauge[6][0]
    top = max(transfer5.max(), transfer6.max())
    bottom = min(transfer5.min(), transfer6.min())
    spread = top - bottom
    deviation = np.abs(transfer5 - transfer6).max()
    assert deviation <= 0.05 * spread, (
        f"d=5 vs d=6 gauge transfer deviates by {deviation:.4f}"
        f" against a spread of {spread:.4f}"
    )


# 3. circuits reproduce their exponentiated generators elementwise


def _diagonal_circuit_error(group, dims, gates, diag, dt) -> float:
    size = int(np.prod(dims))
    circ = Circuit(group, dims, (False,) * len(dims), gates)
    phases = np.exp(-1j * dt * diag)
    worst = 0.0
    for idx in range(size):
        basis = np.zeros(size, dtype=np.complex128)
        basis[idx] = 1.0
        reg = Register(dims, None, basis)
        circ.apply(reg)
        basis[idx] = phases[idx]
        worst = max(worst, float(np.abs(reg.vector - basis).max()))
    return worst


def _plaquette_diag(group, lam: float) -> np.ndarray:
    d = group.order
    diag = np.empty(d**4)
    for idx, (g1, g2, g3, g4) in enumerate(itertools.product(range(d), repeat=4)):
        v = group.compose(g1, g2)
        v = group.compose(v, group.inverse(g3))
        v = group.compose(v, group.inverse(g4))
        diag[idx] = 2.0 * lam * group.characters[v].real
    return diag


def test_circuits_match_exponentials() -> None:
    lam, dt = 0.7, 0.19
    for group in (CyclicGroup(3), QuaternionGroup()):
        d = group.order
        err = _diagonal_circuit_error(
            group,
            (d,) * 4,
            plaquette_gates((0, 1, 2, 3), lam, dt),
            _plaquette_diag(group, lam),
            dt,
        )
        assert err <= 1e-10, f"plaquette circuit off by {err} for {group.name}"

    group = CyclicGroup(3)
    diag = np.empty(27)
    for idx, (gl, ga, gb) in enumerate(itertools.product(range(3), repeat=3)):
        v = group.compose(group.inverse(ga), gl)
        v = group.compose(v, gb)
        diag[idx] = 2.0 * lam * group.characters[v].real
    err = _diagonal_circuit_error(
        group, (3, 3, 3), group_matter_hopping_gates(0, 1, 2, lam, dt), diag, dt
    )
    assert err <= 1e-10, f"matter hopping circuit off by {err}"

    group = QuaternionGroup()
    x, dt = 0.7, 0.23
    dims = (8, 2, 2, 2, 2)
    ferm = (False, True, True, True, True)
    for sign in (1.0, -1.0):
        gates = [
            GateOp("matter_rotation", (0, 1, 2), {"inverse": True}),
            GateOp(
                "tunneling",
                (1, 3),
                {"angle": x * dt, "variant": "antisym", "sign": sign},
            ),
            GateOp(
                "tunneling",
                (2, 4),
                {"angle": x * dt, "variant": "antisym", "sign": sign},
            ),
            GateOp("matter_rotation", (0, 1, 2), {"inverse": False}),
        ]
        circ = Circuit(group, dims, ferm, gates)
        expected = expm(-1j * dt * dense_bond_hamiltonian(group, x, sign))
        worst = 0.0
        for idx in range(expected.shape[0]):
            basis = np.zeros(expected.shape[0], dtype=np.complex128)
            basis[idx] = 1.0
            reg = Register(dims, ferm, basis)
            circ.apply(reg)
            worst = max(worst, float(np.abs(reg.vector - expected[:, idx]).max()))
        assert worst <= 1e-10, f"bond factorization off by {worst} at sign {sign}"


# 4. every Trotter factor commutes with every Gauss-law operator


def test_square_factors_commute_with_star_shifts() -> None:
    # The square register keeps only link variables, so its constraint is
    # already solved; star shifts remain symmetries of the three flux
    # factors.  The single-link charge factor is covariant instead: a
    # star shift multiplies its link phases by a group character, which
    # the companion test below pins down exactly.
    for d in (3, 4):
        for name in ("lam_e", "lam_b", "lam_j"):
            couplings = {"lam_e": 0.0, "lam_b": 0.0, "lam_m": 0.0, "lam_j": 0.0}
            couplings[name] = 0.9
            model = SquareModel(d, **couplings)
            step = model.trotter_step(0.3, order=1)
            vec = random_state(d**8, seed=100 * d + len(name))
            stepped = apply_circuit(step, model, vec)
            for star in range(4):
                a = apply_circuit(step, model, square_star_shift(model, vec, star))
                b = square_star_shift(model, stepped, star)
                err = float(np.abs(a - b).max())
                assert err <= 1e-10, f"{name} factor breaks star {star} at d={d}"


def test_square_charge_factor_is_star_covariant() -> None:
    # Conjugating the charge factor by a star shift advances the charge
    # phase of each star link by one group unit, forward on out-links
    # and backward on in-links; away from the star it is untouched.
    d, dt, lam = 3, 0.3, 0.7
    model = SquareModel(d, 0.0, 0.0, lam, 0.0)
    step = model.trotter_step(dt, order=1)
    vec = random_state(d**8, seed=131)
    ks = np.arange(d)
    for star_idx, star in enumerate(model.lattice.stars()):
        lhs = apply_circuit(step, model, square_star_shift(model, vec, star_idx))
        rotated = model.empty_circuit()
        for link in range(model.lattice.n_links):
            if link in (star.out_x, star.out_y):
                shift = 1
            elif link in (star.in_x, star.in_y):
                shift = -1
            else:
                shift = 0
            diag = np.exp(-2j * lam * dt * np.cos(2.0 * np.pi * (ks + shift) / d))
            rotated.extend([GateOp("custom", (link,), {"matrix": np.diag(diag)})])
        rhs = square_star_shift(model, apply_circuit(rotated, model, vec), star_idx)
        err = float(np.abs(lhs - rhs).max())
        assert err <= 1e-10, f"charge factor covariance fails at star {star_idx}"


def test_chain_factors_commute_with_gauss_rotations() -> None:
    factories = {
        "electric": (ChainModel(2, 1.3, 0.0, 0.0), 21),
        "hopping": (ChainModel(2, 0.0, 0.9, 0.0), 22),
        "mass": (ChainModel(2, 0.0, 0.0, 1.1), 23),
    }
    for label, (model, seed) in factories.items():
        step = model.trotter_step(0.25, order=1)
        vec = random_state(int(np.prod(model.dims)), seed=seed)
        reg0 = Register(model.dims, model.fermionic, vec.copy())
        step.apply(reg0)
        for site in range(model.n_sites):
            for h in range(model.group.order):
                reg_a = Register(model.dims, model.fermionic, vec.copy())
                apply_gauss_register(reg_a, model, site, h)
                step.apply(reg_a)
                reg_b = reg0.copy()
                apply_gauss_register(reg_b, model, site, h)
                err = float(np.abs(reg_a.vector - reg_b.vector).max())
                assert err <= 1e-10, f"{label} factor breaks site {site}, h={h}"


# 5. second-order error slope


def test_second_order_energy_error_slope() -> None:
    model = SquareModel(3, LAM_E, 0.5, 0.5, LAM_J)
    op = square_hamiltonian(model)
    vec0 = flux_string_state(model, (1, 5))
    e0 = float(np.real(np.vdot(vec0, op.matvec(vec0))))
    step_sizes = np.array([0.2, 0.1, 0.05, 0.025])
    errors = []
    for dt in step_sizes:
        circ = model.trotter_circuit(dt, round(1.0 / dt), order=2)
        vec = apply_circuit(circ, model, vec0)
        energy = float(np.real(np.vdot(vec, op.matvec(vec))))
        errors.append(abs(energy - e0))
    slope = np.polyfit(np.log(step_sizes), np.log(errors), 1)[0]
    assert 1.8 <= slope <= 2.2, f"energy error slope {slope:.3f} not second order"


# 6. exact integer resource counts


def test_resource_counts_integer_values() -> None:
    square = SquareModel(3, LAM_E, 0.5, 0.5, LAM_J)
    report = count_gates(square.trotter_step(0.1, order=2))
    assert report.depth == {
        "general_1q": 6,
        "diagonal_1q": 4,
        "two_qudit": 12,
        "fermionic_controlled": 0,
        "fermionic_tunneling": 0,
    }
    for n_sites in (4, 8):
        chain = ChainModel(n_sites, 1.0, 0.8, 1.0)
        totals = count_gates(chain.trotter_step(0.1, order=1)).totals
        assert totals["fermionic_controlled"] == 2 * n_sites
    assert pulse_estimate(8) == 84


# 7. both baryon preparation routes reach the oracle ground state


def test_baryon_preparation_reaches_target() -> None:
    target_model = ChainModel(4, 1.0, 0.8, 1.0)
    _, target = baryon_ground_state(target_model)

    start_model = ChainModel(4, 1.0, 0.0, 1.0)
    initial = baryon_reference_state(start_model, 0)
    _, _, trace = adiabatic_search(
        start_model,
        initial,
        linear_ramp({"x": 0.8}, steps=20, dt=0.2),
        target,
        threshold=0.99,
    )
    assert trace[-1] >= 0.99, f"adiabatic route reached only {trace[-1]:.5f}"

    plan = VariationalPlan(n_blocks=5, max_evals=400, seed=11)
    result = variational_prepare(
        target_model, baryon_reference_state(target_model, 0), plan, target
    )
    assert result.fidelity >= 0.99, f"variational route reached only {result.fidelity:.5f}"


# 8. charge correlator: direct equal-time values, sum rule, Trotter match


def test_charge_correlator_consistency() -> None:
    model = ChainModel(4, 1.0, 0.8, 1.0)
    _, ground = baryon_ground_state(model)
    times = np.arange(7) * 0.5

    exact = hadronic_correlator(model, ground, times, mu=0, nu=0, backend="exact")
    source = charge_operator(model, 0).matvec(ground)
    for cell in range(model.n_sites // 2):
        direct = float(
            np.real(np.vdot(ground, charge_operator(model, cell).matvec(source)))
        )
        assert abs(exact.values[cell, 0] - direct) <= 1e-12

    sums = exact.values.sum(axis=0)
    assert sums.max() - sums.min() <= 1e-8, "charge sum rule drifts in time"

    trotter = hadronic_correlator(
        model, ground, times, mu=0, nu=0, backend="trotter", dt=0.1
    )
    deviation = float(np.abs(trotter.values - exact.values).max())
    assert deviation <= 0.02, f"trotter correlator deviates by {deviation}"


# 9. structural property recap


def test_structural_properties_hold() -> None:
    for group in (CyclicGroup(5), QuaternionGroup()):
        n = group.order
        table = group.table
        for a, b, c in itertools.product(range(n), repeat=3):
            assert table[table[a, b], c] == table[a, table[b, c]]
        for a in range(n):
            assert group.compose(a, group.identity) == a
            assert group.compose(group.identity, a) == a
            assert group.compose(a, group.inverse(a)) == group.identity

        for a, b in itertools.product(range(n), repeat=2):
            left_a, left_b = group.left_action_perm(a), group.left_action_perm(b)
            composed = group.left_action_perm(group.compose(a, b))
            assert np.array_equal(left_a[left_b], composed)

        chars = group.characters
        for g, h in itertools.product(range(n), repeat=2):
            conjugated = group.compose(group.compose(h, g), group.inverse(h))
            assert np.isclose(chars[conjugated], chars[g], atol=1e-12)
        assert np.isclose(np.vdot(chars, chars), n, atol=1e-12)
        assert abs(chars.sum()) <= 1e-12

        fourier = group.fourier
        assert np.allclose(fourier @ fourier.conj().T, np.eye(n), atol=1e-12)
        assert np.allclose(fourier.conj().T @ fourier, np.eye(n), atol=1e-12)

    z5, q8 = CyclicGroup(5), QuaternionGroup()
    samples = [
        (GateOp("char_phase", (0,), {"lam": 0.8, "dt": 0.3}), q8),
        (GateOp("fourier_weight_phase", (0,), {"lam": 0.8, "dt": 0.3, "shifted": True}), z5),
        (GateOp("cyclic_electric", (0,), {"lam": 0.8, "dt": 0.3, "shifted": False}), z5),
        (GateOp("transfer_electric", (0,), {"lam": 1.1, "dt": 0.4}), q8),
        (GateOp("fourier", (0,), {"inverse": False}), q8),
    ]
    for gate, group in samples:
        mat = gate_matrix(gate, group)
        assert np.allclose(
            mat @ mat.conj().T, np.eye(group.order), atol=1e-12
        ), f"{gate.kind} is not unitary"

    dims, ferm = (2, 2, 2), (True, True, True)
    vec = random_state(8, seed=404)
    reg_ij = Register(dims, ferm, vec.copy())
    reg_ij.apply_mode_raising(0)
    reg_ij.apply_mode_raising(2)
    reg_ji = Register(dims, ferm, vec.copy())
    reg_ji.apply_mode_raising(2)
    reg_ji.apply_mode_raising(0)
    assert np.allclose(reg_ij.vector, -reg_ji.vector, atol=1e-12)
    reg_ij.apply_mode_raising(0)
    assert np.allclose(reg_ij.vector, 0.0, atol=1e-12)

    iso = truncation_matrix(QuaternionGroup())
    assert np.allclose(iso @ iso.conj().T, np.eye(iso.shape[0]), atol=1e-12)
    proj = iso.conj().T @ iso
    assert np.allclose(proj @ proj, proj, atol=1e-12)
    assert np.allclose(proj, proj.conj().T, atol=1e-12)
