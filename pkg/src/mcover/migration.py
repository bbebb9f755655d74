"""Per-arrival migration bookkeeping shared by the online algorithms."""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .core import Job, Schedule, format_rational


@dataclass
class PhaseRecord:
    h: int
    size: Optional[Fraction]  # None for the huge-job phase
    equal: frozenset
    unequal: frozenset
    placed_on_equal: int  # jobs of the phase list-scheduled onto machines that were still equal


@dataclass
class PhaseTrace:
    phases: List[PhaseRecord] = field(default_factory=list)

    def growth_ok(self) -> bool:
        """Machines become unequal only through placements onto previously equal machines."""
        previous: frozenset = frozenset()
        for rec in self.phases:
            if len(rec.unequal - previous) > rec.placed_on_equal:
                return False
            previous = rec.unequal
        return True

    @property
    def final_unequal(self) -> int:
        return len(self.phases[-1].unequal) if self.phases else 0

    @property
    def total_placed_on_equal(self) -> int:
        return sum(rec.placed_on_equal for rec in self.phases)


@dataclass
class MigrationLedger:
    arrival: Job
    moves: Dict[int, Tuple[int, int]]
    volume_rounded: Fraction
    volume_original: Fraction
    ub: Fraction
    min_load: Fraction
    min_load_original: Fraction
    removals: Counter = field(default_factory=Counter)
    phase_trace: Optional[PhaseTrace] = None

    @property
    def factor(self) -> Fraction:
        return self.volume_original / self.arrival.size

    @classmethod
    def between(
        cls,
        before: Schedule,
        after: Schedule,
        arrival: Job,
        ub: Fraction,
        removals: Optional[Counter] = None,
        phase_trace: Optional[PhaseTrace] = None,
    ) -> "MigrationLedger":
        moves = {}
        vol_r = vol_o = Fraction(0)
        for job in before:
            src, dst = before.machine_of(job.id), after.machine_of(job.id)
            if src != dst:
                moves[job.id] = (src, dst)
                vol_r += job.rounded_size
                vol_o += job.size
        return cls(
            arrival,
            moves,
            vol_r,
            vol_o,
            ub,
            after.min_load(),
            after.min_original_load(),
            removals if removals is not None else Counter(),
            phase_trace,
        )

    def row(self) -> Dict[str, str]:
        out = {
            "arrival_id": str(self.arrival.id),
            "arrival_size": format_rational(self.arrival.size),
            "migrated_volume_rounded": format_rational(self.volume_rounded),
            "migrated_volume_original": format_rational(self.volume_original),
            "migration_factor": format_rational(self.factor),
            "min_load": format_rational(self.min_load),
            "ub": format_rational(self.ub),
        }
        if self.phase_trace is not None:
            out["m_unequal"] = str(self.phase_trace.final_unequal)
            out["placed_on_equal"] = str(self.phase_trace.total_placed_on_equal)
        return out


LEDGER_COLUMNS = [
    "arrival_id",
    "arrival_size",
    "migrated_volume_rounded",
    "migrated_volume_original",
    "migration_factor",
    "min_load",
    "ub",
]
PHASE_COLUMNS = ["m_unequal", "placed_on_equal"]


def ledgers_to_csv(ledgers: List[MigrationLedger]) -> str:
    columns = list(LEDGER_COLUMNS)
    if any(l.phase_trace is not None for l in ledgers):
        columns += PHASE_COLUMNS
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", restval="")
    writer.writeheader()
    for ledger in ledgers:
        writer.writerow(ledger.row())
    return buf.getvalue()
