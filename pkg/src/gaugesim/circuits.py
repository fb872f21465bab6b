"""Circuits: gate containers, Trotter steps, and model definitions.

Two models are provided.

:class:`SquareModel` puts cyclic-group qudits on the links of a periodic
square lattice.  The Hamiltonian has four factor families:

* ``electric``  -- per link, the scaled lattice Laplacian
  ``lam_e * (d^2/2 pi^2) * (2 - shift - shift^dag)``,
* ``magnetic``  -- per plaquette, ``lam_b * (chi(g1 g2 g3^-1 g4^-1) + c.c.)``,
* ``mass``      -- per link, ``lam_m * (chi(g) + c.c.)``,
* ``coupling``  -- per site star, the Laplacian form of the four-link
  shift product ``lam_j * (d^2/2 pi^2) * (2 - prod - prod^dag)``.

Electric and coupling factors commute (both are built from shifts), as
do magnetic and mass factors (both diagonal), so the symmetrized step
splits the Hamiltonian into exactly two exponentials and is genuinely
second order.  Folding uses controlled group multiplication onto one
accumulator link: the plaquette accumulator is the x link of the
plaquette corner, the star accumulator is the y link out of the site.

:class:`ChainModel` is a periodic staggered-fermion chain with one
group-valued link per bond, simulated in the group basis with electric
projection onto the truncated irrep space (trivial plus defining
two-dimensional block).  Bond factors conjugate a bare two-component
tunneling by link-controlled matter rotations; the wrap bond enters
with opposite sign.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .errors import InvalidParameterError
from .gates import GateOp, apply_gate
from .groups import CyclicGroup, FiniteGroup, QuaternionGroup, make_group
from .lattice import ChainLattice, SquareLattice
from .register import Register

__all__ = [
    "Circuit",
    "SquareModel",
    "ChainModel",
    "group_matter_hopping_gates",
    "plaquette_gates",
]


def _encode_params(params: dict[str, Any]) -> dict[str, Any]:
    out = {}
    for key, val in params.items():
        if isinstance(val, np.ndarray):
            out[key] = {
                "re": np.real(val).tolist(),
                "im": np.imag(val).tolist(),
            }
        elif isinstance(val, (np.bool_, np.integer, np.floating)):
            out[key] = val.item()
        else:
            out[key] = val
    return out


def _decode_params(params: dict[str, Any]) -> dict[str, Any]:
    out = {}
    for key, val in params.items():
        if isinstance(val, dict) and set(val) == {"re", "im"}:
            out[key] = np.asarray(val["re"], dtype=float) + 1j * np.asarray(
                val["im"], dtype=float
            )
        else:
            out[key] = val
    return out


@dataclass
class Circuit:
    """Ordered gate list bound to a group and a register layout."""

    group: FiniteGroup
    dims: tuple[int, ...]
    fermionic: tuple[bool, ...]
    gates: list[GateOp] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.dims = tuple(self.dims)
        self.fermionic = tuple(self.fermionic)
        if len(self.dims) != len(self.fermionic):
            raise InvalidParameterError("dims and fermionic flags must align")

    def new_register(self) -> Register:
        return Register(self.dims, self.fermionic)

    def extend(self, gates: Iterable[GateOp]) -> "Circuit":
        self.gates.extend(gates)
        return self

    def apply(self, reg: Register, renormalize: bool = False) -> Register:
        """Run the circuit on a register in place (and return it)."""
        if reg.dims != self.dims:
            raise InvalidParameterError("register layout does not match circuit")
        for gate in self.gates:
            apply_gate(reg, gate, self.group)
            if renormalize and gate.kind == "casimir_electric":
                reg.normalize()
        return reg

    def adjoint(self) -> "Circuit":
        gates = [g.adjoint() for g in reversed(self.gates)]
        return Circuit(self.group, self.dims, self.fermionic, gates)

    def repeated(self, n: int) -> "Circuit":
        if n < 1:
            raise InvalidParameterError("repetition count must be >= 1")
        return Circuit(self.group, self.dims, self.fermionic, list(self.gates) * n)

    def to_json(self) -> str:
        payload = {
            "group": self.group.name,
            "dims": list(self.dims),
            "fermionic": list(self.fermionic),
            "gates": [
                {
                    "kind": g.kind,
                    "targets": list(g.targets),
                    "params": _encode_params(g.params),
                    "factor": g.factor,
                }
                for g in self.gates
            ],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        payload = json.loads(text)
        gates = [
            GateOp(
                g["kind"],
                tuple(g["targets"]),
                _decode_params(g["params"]),
                g.get("factor", ""),
            )
            for g in payload["gates"]
        ]
        return cls(
            make_group(payload["group"]),
            tuple(payload["dims"]),
            tuple(payload["fermionic"]),
            gates,
        )


def plaquette_gates(
    links: tuple[int, int, int, int], lam: float, dt: float, factor: str = "magnetic"
) -> list[GateOp]:
    """Magnetic factor on one plaquette, folded onto its first link.

    The accumulator picks up ``g1 g2 g3^-1 g4^-1``, a character phase is
    applied, and the folds are undone in reverse.
    """
    l1, l2, l3, l4 = links
    return [
        GateOp("group_mult", (l1, l2), {"variant": "right"}, factor),
        GateOp("group_mult", (l1, l3), {"variant": "right_inv"}, factor),
        GateOp("group_mult", (l1, l4), {"variant": "right_inv"}, factor),
        GateOp("char_phase", (l1,), {"lam": lam, "dt": dt}, factor),
        GateOp("group_mult", (l1, l4), {"variant": "right"}, factor),
        GateOp("group_mult", (l1, l3), {"variant": "right"}, factor),
        GateOp("group_mult", (l1, l2), {"variant": "right_inv"}, factor),
    ]


def group_matter_hopping_gates(
    link: int,
    site_left: int,
    site_right: int,
    lam: float,
    dt: float,
    factor: str = "hopping",
) -> list[GateOp]:
    """Gauge-matter hopping for group-valued matter on two sites.

    Applies ``exp(-1j * dt * lam * 2 Re chi(g_left^-1 g_link g_right))``
    with two fold/unfold pairs and one diagonal mid, five gates total.
    """
    return [
        GateOp("group_mult", (link, site_right), {"variant": "right"}, factor),
        GateOp("group_mult", (site_left, link), {"variant": "left_inv"}, factor),
        GateOp("char_phase", (site_left,), {"lam": lam, "dt": dt}, factor),
        GateOp("group_mult", (site_left, link), {"variant": "left"}, factor),
        GateOp("group_mult", (link, site_right), {"variant": "right_inv"}, factor),
    ]


class SquareModel:
    """Cyclic gauge fields on a periodic square lattice."""

    def __init__(
        self,
        d: int,
        lam_e: float,
        lam_b: float,
        lam_m: float,
        lam_j: float,
        width: int = 2,
        height: int = 2,
    ) -> None:
        self.group = CyclicGroup(d)
        self.lattice = SquareLattice(width, height)
        self.lam_e = float(lam_e)
        self.lam_b = float(lam_b)
        self.lam_m = float(lam_m)
        self.lam_j = float(lam_j)

    @property
    def d(self) -> int:
        return self.group.d

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.d,) * self.lattice.n_links

    @property
    def fermionic(self) -> tuple[bool, ...]:
        return (False,) * self.lattice.n_links

    def empty_circuit(self) -> Circuit:
        return Circuit(self.group, self.dims, self.fermionic)

    def _electric_layer(self, dt: float) -> list[GateOp]:
        return [
            GateOp(
                "cyclic_electric",
                (link,),
                {"lam": self.lam_e, "dt": dt, "shifted": True},
                "electric",
            )
            for link in range(self.lattice.n_links)
        ]

    def _fourier_layer(self, inverse: bool) -> list[GateOp]:
        return [
            GateOp("fourier", (link,), {"inverse": inverse}, "coupling")
            for link in range(self.lattice.n_links)
        ]

    def _star_layer(self, dt: float) -> list[GateOp]:
        # acts between Fourier layers; folds add momentum labels so the
        # four-link shift product becomes a single-axis diagonal
        gates: list[GateOp] = []
        for star in self.lattice.stars():
            acc = star.out_y
            gates.extend(
                [
                    GateOp("group_mult", (acc, star.out_x), {"variant": "right"}, "coupling"),
                    GateOp("group_mult", (acc, star.in_x), {"variant": "right_inv"}, "coupling"),
                    GateOp("group_mult", (acc, star.in_y), {"variant": "right_inv"}, "coupling"),
                    GateOp(
                        "fourier_weight_phase",
                        (acc,),
                        {"lam": self.lam_j, "dt": dt, "shifted": True},
                        "coupling",
                    ),
                    GateOp("group_mult", (acc, star.in_y), {"variant": "right"}, "coupling"),
                    GateOp("group_mult", (acc, star.in_x), {"variant": "right"}, "coupling"),
                    GateOp("group_mult", (acc, star.out_x), {"variant": "right_inv"}, "coupling"),
                ]
            )
        return gates

    def _star_block(self, dt: float) -> list[GateOp]:
        return (
            self._fourier_layer(False)
            + self._star_layer(dt)
            + self._fourier_layer(True)
        )

    def _mass_layer(self, dt: float) -> list[GateOp]:
        return [
            GateOp("char_phase", (link,), {"lam": self.lam_m, "dt": dt}, "mass")
            for link in range(self.lattice.n_links)
        ]

    def _magnetic_layer(self, dt: float) -> list[GateOp]:
        gates: list[GateOp] = []
        for plq in self.lattice.plaquettes():
            gates.extend(plaquette_gates(plq.links, self.lam_b, dt))
        return gates

    def trotter_step(self, dt: float, order: int = 2) -> Circuit:
        circ = self.empty_circuit()
        if order == 1:
            circ.extend(self._electric_layer(dt))
            circ.extend(self._star_block(dt))
            circ.extend(self._mass_layer(dt))
            circ.extend(self._magnetic_layer(dt))
        elif order == 2:
            circ.extend(self._electric_layer(dt / 2))
            circ.extend(self._star_block(dt / 2))
            circ.extend(self._mass_layer(dt / 2))
            circ.extend(self._magnetic_layer(dt))
            circ.extend(self._mass_layer(dt / 2))
            circ.extend(self._star_block(dt / 2))
            circ.extend(self._electric_layer(dt / 2))
        else:
            raise InvalidParameterError(f"trotter order must be 1 or 2, got {order}")
        return circ

    def trotter_circuit(self, dt: float, n_steps: int, order: int = 2) -> Circuit:
        return self.trotter_step(dt, order).repeated(n_steps)


class ChainModel:
    """Staggered two-component fermions chained through group links.

    Register layout: all link axes first (group order each), then two
    fermionic modes per site in site order.
    """

    def __init__(
        self,
        n_sites: int,
        lam_e: float,
        x: float,
        mu: float,
        group: FiniteGroup | None = None,
    ) -> None:
        self.chain = ChainLattice(n_sites)
        self.group = group if group is not None else QuaternionGroup()
        if self.group.faithful_dim != 2:
            raise InvalidParameterError(
                "chain matter needs a group with a two-dimensional faithful rep"
            )
        self.lam_e = float(lam_e)
        self.x = float(x)
        self.mu = float(mu)

    @property
    def n_sites(self) -> int:
        return self.chain.n_sites

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.group.order,) * self.n_sites + (2,) * (2 * self.n_sites)

    @property
    def fermionic(self) -> tuple[bool, ...]:
        return (False,) * self.n_sites + (True,) * (2 * self.n_sites)

    def link_axis(self, n: int) -> int:
        return n % self.n_sites

    def mode_axis(self, site: int, comp: int) -> int:
        return self.n_sites + 2 * (site % self.n_sites) + comp

    def empty_circuit(self) -> Circuit:
        return Circuit(self.group, self.dims, self.fermionic)

    def _electric_layer(self, dt: float) -> list[GateOp]:
        return [
            GateOp(
                "casimir_electric",
                (self.link_axis(n),),
                {"theta": self.lam_e * dt},
                "electric",
            )
            for n in range(self.n_sites)
        ]

    def _mass_layer(self, dt: float) -> list[GateOp]:
        return [
            GateOp(
                "number_phase",
                (self.mode_axis(n, 0), self.mode_axis(n, 1)),
                {"angle": self.mu * dt * (-1.0) ** n},
                "mass",
            )
            for n in range(self.n_sites)
        ]

    def bond_gates(self, n: int, dt: float) -> list[GateOp]:
        """One hopping factor, exact: rotations conjugate a bare tunneling."""
        sign = -1.0 if n == self.n_sites - 1 else 1.0
        link = self.link_axis(n)
        left = (self.mode_axis(n, 0), self.mode_axis(n, 1))
        right = (self.mode_axis(n + 1, 0), self.mode_axis(n + 1, 1))
        factor = f"hop{n}"
        return [
            GateOp("matter_rotation", (link, *left), {"inverse": True}, factor),
            GateOp(
                "tunneling",
                (left[0], right[0]),
                {"angle": self.x * dt, "variant": "antisym", "sign": sign},
                factor,
            ),
            GateOp(
                "tunneling",
                (left[1], right[1]),
                {"angle": self.x * dt, "variant": "antisym", "sign": sign},
                factor,
            ),
            GateOp("matter_rotation", (link, *left), {"inverse": False}, factor),
        ]

    def _bond_layer(self, bonds, dt: float) -> list[GateOp]:
        out: list[GateOp] = []
        for bond in bonds:
            out.extend(self.bond_gates(bond.link, dt))
        return out

    def trotter_step(self, dt: float, order: int = 2) -> Circuit:
        circ = self.empty_circuit()
        even = self.chain.even_bonds()
        odd = self.chain.odd_bonds()
        if order == 1:
            circ.extend(self._electric_layer(dt))
            circ.extend(self._mass_layer(dt))
            circ.extend(self._bond_layer(even, dt))
            circ.extend(self._bond_layer(odd, dt))
        elif order == 2:
            circ.extend(self._electric_layer(dt / 2))
            circ.extend(self._mass_layer(dt / 2))
            circ.extend(self._bond_layer(even, dt / 2))
            circ.extend(self._bond_layer(odd, dt))
            circ.extend(self._bond_layer(even, dt / 2))
            circ.extend(self._mass_layer(dt / 2))
            circ.extend(self._electric_layer(dt / 2))
        else:
            raise InvalidParameterError(f"trotter order must be 1 or 2, got {order}")
        return circ

    def trotter_circuit(self, dt: float, n_steps: int, order: int = 2) -> Circuit:
        return self.trotter_step(dt, order).repeated(n_steps)

    def variational_circuit(self, angles: np.ndarray) -> Circuit:
        """Layered ansatz; per block one diagonal angle and one hop angle.

        The diagonal angle scales the electric and mass factors jointly
        (keeping the Hamiltonian's lam_e / mu ratio), the hop angle
        drives the even and odd bond layers.
        """
        angles = np.asarray(angles, dtype=float)
        if angles.ndim != 2 or angles.shape[1] != 2:
            raise InvalidParameterError("angles must have shape (n_blocks, 2)")
        circ = self.empty_circuit()
        even = self.chain.even_bonds()
        odd = self.chain.odd_bonds()
        for diag, hop in angles:
            circ.extend(self._electric_layer(diag / 2))
            circ.extend(self._mass_layer(diag / 2))
            circ.extend(self._bond_layer(even, hop))
            circ.extend(self._bond_layer(odd, hop))
            circ.extend(self._electric_layer(diag / 2))
            circ.extend(self._mass_layer(diag / 2))
        return circ
