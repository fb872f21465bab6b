"""Gate counting, depth estimates, and fidelity projections.

Costs are broken down by hardware class (see ``RESOURCE_CLASSES``):
arbitrary and diagonal single-qudit gates, controlled group
multiplication, and the two fermion-mode classes.

Depth convention: control axes are passive.  A controlled group
multiplication occupies only its accumulator, a link-controlled matter
rotation only the two matter modes, a tunneling gate both modes.
Gates of one class occupying disjoint axes can run in the same layer,
so the per-class depth is the largest number of class gates occupying
any single axis.  That number does not depend on how the gate list is
sliced into layers, which keeps the counts stable under reordering of
commuting factors.

Fidelity projections are reported two ways: the product over every
counted gate (all gates noisy, parallel or not) and the product over
the depth counts only (noise dominated by the busiest line).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .circuits import Circuit
from .errors import InvalidParameterError
from .gates import RESOURCE_CLASSES, GateOp

__all__ = [
    "ResourceReport",
    "count_gates",
    "pulse_estimate",
    "fidelity_estimate",
    "step_budget",
]


def _active_axes(op: GateOp) -> tuple[int, ...]:
    if op.kind == "group_mult":
        return op.targets[:1]
    if op.kind == "matter_rotation":
        return op.targets[1:]
    return op.targets


def _checked_fidelities(fidelities: dict[str, float] | None) -> dict[str, float]:
    out = {cls: 1.0 for cls in RESOURCE_CLASSES}
    if fidelities is None:
        return out
    for cls, val in fidelities.items():
        if cls not in out:
            raise InvalidParameterError(f"unknown resource class {cls!r}")
        val = float(val)
        if not 0.0 < val <= 1.0:
            raise InvalidParameterError(
                f"fidelity for {cls!r} must lie in (0, 1], got {val}"
            )
        out[cls] = val
    return out


def _projection(counts: dict[str, int], fidelities: dict[str, float]) -> float:
    fid = 1.0
    for cls, n in counts.items():
        fid *= fidelities[cls] ** n
    return fid


@dataclass(frozen=True)
class ResourceReport:
    """Per-class gate counts and derived hardware estimates."""

    totals: dict[str, int]
    depth: dict[str, int]
    pulse_pairs: int
    fidelities: dict[str, float]
    fidelity_by_totals: float
    fidelity_by_depth: float

    @property
    def total_gates(self) -> int:
        return sum(self.totals.values())

    def as_dict(self) -> dict:
        return {
            "totals": dict(self.totals),
            "depth": dict(self.depth),
            "pulse_pairs": self.pulse_pairs,
            "fidelities": dict(self.fidelities),
            "fidelity_by_totals": self.fidelity_by_totals,
            "fidelity_by_depth": self.fidelity_by_depth,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = ["class                 total  depth"]
        for cls in RESOURCE_CLASSES:
            lines.append(f"{cls:<20} {self.totals[cls]:>6} {self.depth[cls]:>6}")
        lines.append(f"pulse pairs per general gate: {self.pulse_pairs}")
        lines.append(f"fidelity (all gates):   {self.fidelity_by_totals:.6f}")
        lines.append(f"fidelity (busiest line): {self.fidelity_by_depth:.6f}")
        return "\n".join(lines)


def count_gates(
    circuit: Circuit, fidelities: dict[str, float] | None = None
) -> ResourceReport:
    """Tally a circuit per resource class and project its fidelity."""
    fids = _checked_fidelities(fidelities)
    totals = {cls: 0 for cls in RESOURCE_CLASSES}
    per_axis = {cls: [0] * len(circuit.dims) for cls in RESOURCE_CLASSES}
    for op in circuit.gates:
        cls = op.resource_class
        totals[cls] += 1
        for axis in _active_axes(op):
            per_axis[cls][axis] += 1
    depth = {cls: max(per_axis[cls], default=0) for cls in RESOURCE_CLASSES}
    return ResourceReport(
        totals=totals,
        depth=depth,
        pulse_pairs=pulse_estimate(max(circuit.dims)),
        fidelities=fids,
        fidelity_by_totals=_projection(totals, fids),
        fidelity_by_depth=_projection(depth, fids),
    )


def pulse_estimate(dim: int) -> int:
    """Pulse pairs to compile one arbitrary single-qudit gate.

    A unitary on ``dim`` levels factors into ``dim * (dim - 1) / 2``
    two-level rotations, each costing three pulse pairs.
    """
    dim = int(dim)
    if dim < 1:
        raise InvalidParameterError(f"qudit dimension must be >= 1, got {dim}")
    return 3 * dim * (dim - 1) // 2


def fidelity_estimate(
    report: ResourceReport,
    fidelities: dict[str, float] | None = None,
    by: str = "totals",
) -> float:
    """Project circuit fidelity from per-class gate fidelities.

    ``by="totals"`` multiplies over every counted gate, ``by="depth"``
    over the per-class depth counts only.
    """
    fids = _checked_fidelities(fidelities)
    if by == "totals":
        return _projection(report.totals, fids)
    if by == "depth":
        return _projection(report.depth, fids)
    raise InvalidParameterError(f"by must be 'totals' or 'depth', got {by!r}")


def step_budget(
    report: ResourceReport,
    fidelities: dict[str, float] | None = None,
    floor: float = 0.9,
    by: str = "totals",
) -> int | None:
    """Largest repetition count keeping projected fidelity above ``floor``.

    ``report`` describes one step.  Returns ``None`` when the per-step
    projection is exactly 1 (no finite budget).
    """
    if not 0.0 < floor < 1.0:
        raise InvalidParameterError(f"floor must lie in (0, 1), got {floor}")
    per_step = fidelity_estimate(report, fidelities, by=by)
    if per_step == 1.0:
        return None
    steps = int(math.log(floor) / math.log(per_step))
    while per_step ** (steps + 1) >= floor:
        steps += 1
    while steps > 0 and per_step**steps < floor:
        steps -= 1
    return steps
