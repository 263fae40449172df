"""Greedy removal of drones whose deactivation keeps every constraint satisfied."""

from __future__ import annotations

from dataclasses import dataclass

from .capacity import evaluate_constraints


@dataclass(frozen=True)
class PruneResult:
    placement: "Placement"
    removed: list
    input_ok: bool  # False when the input already violated a constraint (no-op)

    def __iter__(self):
        return iter((self.placement, self.removed))


def prune(placement, scenario, chan, radio, footprint):
    """Deactivate redundant drones one at a time.

    Each round tentatively deactivates every active drone and keeps the
    removal that (a) leaves all constraints satisfied and (b) disconnects the
    fewest users (ties to the lowest drone index). Disconnection counts may be
    negative: dropping a drone can recover users by removing its interference,
    and such removals rank first. Stops when no drone is removable.

    An input that fails its own constraint check is returned unchanged with
    ``input_ok=False``.
    """
    report = evaluate_constraints(placement, scenario, chan, radio, footprint)
    if not report.all_ok():
        return PruneResult(placement=placement, removed=[], input_ok=False)

    current = placement
    covered = report.covered_count
    removed = []
    while current.n_active() > 1:
        best = None  # (disconnected, drone index, covered count after)
        for j in current.active_indices():
            candidate = current.with_active(j, False)
            rep = evaluate_constraints(candidate, scenario, chan, radio, footprint)
            if not rep.all_ok():
                continue
            disconnected = covered - rep.covered_count
            if best is None or disconnected < best[0]:
                best = (disconnected, int(j), rep.covered_count)
        if best is None:
            break
        _, j, covered = best
        current = current.with_active(j, False)
        removed.append(j)
    return PruneResult(placement=current, removed=removed, input_ok=True)
