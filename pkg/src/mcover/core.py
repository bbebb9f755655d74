"""Exact-arithmetic domain types: jobs, instances, schedules and load profiles.

Every size and load is a :class:`fractions.Fraction`.  Floating point never
enters a scheduling decision, because ties between equal loads drive the
tie-breaking rules and the grid-multiplicity arguments of the algorithms.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class ScheduleError(ValueError):
    """Raised on an inconsistent assignment (duplicate ids, unknown jobs, bad machine)."""


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction; strings use the ``"num/den"`` form."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    if "." in text or "e" in text.lower():
        raise ValueError(f"decimal notation is not exact: {text!r}")
    return Fraction(text)


def format_rational(q: Fraction) -> str:
    """Canonical ``"num/den"`` string; the denominator is dropped when it is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Job:
    """A job with its exact size and the rounded size fixed at admission."""

    id: int
    size: Fraction
    rounded_size: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.id, int) or self.id < 0:
            raise ValueError(f"job id must be a non-negative integer, got {self.id!r}")
        if self.size <= 0:
            raise ValueError(f"job {self.id}: size must be positive, got {self.size}")
        if not 0 < self.rounded_size <= self.size:
            raise ValueError(f"job {self.id}: rounded size {self.rounded_size} outside (0, {self.size}]")

    @classmethod
    def create(cls, id: int, size: RationalLike, epsilon: RationalLike) -> "Job":
        from .rounding import round_size

        size = as_rational(size)
        return cls(id, size, round_size(size, as_rational(epsilon)))

    @classmethod
    def exact(cls, id: int, size: RationalLike) -> "Job":
        """A job whose rounded size equals its size (for hand-built, grid-aligned data)."""
        size = as_rational(size)
        return cls(id, size, size)


def lpt_key(job: Job) -> Tuple[Fraction, int]:
    """Canonical LPT order: non-increasing rounded size, then ascending id."""
    return (-job.rounded_size, job.id)


@dataclass(frozen=True)
class Instance:
    jobs: Tuple[Job, ...]
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if self.m < 1:
            raise ValueError("machine count must be at least 1")
        ids = [j.id for j in self.jobs]
        if len(set(ids)) != len(ids):
            raise ScheduleError("duplicate job ids in instance")

    def __len__(self) -> int:
        return len(self.jobs)

    def with_job(self, job: Job) -> "Instance":
        if any(j.id == job.id for j in self.jobs):
            raise ScheduleError(f"duplicate job id {job.id}")
        return Instance(self.jobs + (job,), self.m)

    def by_id(self) -> Dict[int, Job]:
        return {j.id: j for j in self.jobs}


class Schedule:
    """Mutable job-to-machine assignment with per-machine load bookkeeping.

    Loads are tracked under rounded sizes; :meth:`original_loads` reports the
    same machines under the exact input sizes.  A schedule has a single writer.
    """

    __slots__ = ("m", "_jobs", "_machine", "_members", "_loads", "_orig")

    def __init__(self, m: int, placements: Iterable[Tuple[Job, int]] = ()) -> None:
        if m < 1:
            raise ValueError("machine count must be at least 1")
        self.m = m
        self._jobs: Dict[int, Job] = {}
        self._machine: Dict[int, int] = {}
        self._members: List[Dict[int, Job]] = [dict() for _ in range(m)]
        self._loads: List[Fraction] = [Fraction(0)] * m
        self._orig: List[Fraction] = [Fraction(0)] * m
        for job, machine in placements:
            self.assign(job, machine)

    # -- mutation -------------------------------------------------------
    def assign(self, job: Job, machine: int) -> None:
        if job.id in self._machine:
            raise ScheduleError(f"job {job.id} is already assigned")
        if not 0 <= machine < self.m:
            raise ScheduleError(f"machine index {machine} out of range [0, {self.m})")
        self._jobs[job.id] = job
        self._machine[job.id] = machine
        self._members[machine][job.id] = job
        self._loads[machine] += job.rounded_size
        self._orig[machine] += job.size

    def remove(self, job_id: int) -> Job:
        try:
            machine = self._machine.pop(job_id)
        except KeyError:
            raise ScheduleError(f"job {job_id} is not assigned") from None
        job = self._jobs.pop(job_id)
        del self._members[machine][job_id]
        self._loads[machine] -= job.rounded_size
        self._orig[machine] -= job.size
        return job

    def move(self, job_id: int, machine: int) -> None:
        job = self.remove(job_id)
        self.assign(job, machine)

    def copy(self) -> "Schedule":
        twin = Schedule.__new__(Schedule)
        twin.m = self.m
        twin._jobs = dict(self._jobs)
        twin._machine = dict(self._machine)
        twin._members = [dict(d) for d in self._members]
        twin._loads = list(self._loads)
        twin._orig = list(self._orig)
        return twin

    # -- queries --------------------------------------------------------
    def __contains__(self, job_id: object) -> bool:
        return job_id in self._machine

    def __len__(self) -> int:
        return len(self._machine)

    def __iter__(self) -> Iterator[Job]:
        return iter(self._jobs.values())

    def machine_of(self, job_id: int) -> int:
        return self._machine[job_id]

    def job(self, job_id: int) -> Job:
        return self._jobs[job_id]

    def jobs_on(self, machine: int) -> List[Job]:
        return list(self._members[machine].values())

    @property
    def assignment(self) -> Dict[int, int]:
        return dict(self._machine)

    @property
    def loads(self) -> Tuple[Fraction, ...]:
        return tuple(self._loads)

    def load(self, machine: int) -> Fraction:
        return self._loads[machine]

    def original_loads(self) -> Tuple[Fraction, ...]:
        return tuple(self._orig)

    def min_load(self) -> Fraction:
        return min(self._loads)

    def min_original_load(self) -> Fraction:
        return min(self._orig)

    def least_loaded(self) -> List[int]:
        low = min(self._loads)
        return [i for i, v in enumerate(self._loads) if v == low]

    def restrict(self, keep) -> "Schedule":
        """New schedule holding only the jobs for which ``keep(job)`` is true."""
        return Schedule(self.m, ((j, self._machine[j.id]) for j in self._jobs.values() if keep(j)))

    def audit(self) -> None:
        """Recompute loads from the assignment map and raise on any mismatch."""
        loads = [Fraction(0)] * self.m
        orig = [Fraction(0)] * self.m
        for job_id, machine in self._machine.items():
            job = self._jobs[job_id]
            if self._members[machine].get(job_id) is not job:
                raise ScheduleError(f"membership index out of sync for job {job_id}")
            loads[machine] += job.rounded_size
            orig[machine] += job.size
        if sum(len(d) for d in self._members) != len(self._machine):
            raise ScheduleError("stale entries in membership index")
        if loads != self._loads or orig != self._orig:
            raise ScheduleError("cached loads disagree with the assignment")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Schedule):
            return NotImplemented
        return self.m == other.m and self._machine == other._machine and self._jobs == other._jobs

    def __repr__(self) -> str:
        loads = ", ".join(format_rational(v) for v in self._loads)
        return f"Schedule(m={self.m}, jobs={len(self)}, loads=({loads}))"


# -- load profiles ------------------------------------------------------

class LoadProfile(tuple):
    """Machine loads sorted non-decreasingly.  Construction rejects unsorted input."""

    def __new__(cls, values: Iterable[RationalLike] = ()) -> "LoadProfile":
        vals = tuple(as_rational(v) for v in values)
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError(f"load profile must be sorted non-decreasingly: {vals}")
        return super().__new__(cls, vals)

    @classmethod
    def of(cls, values: Iterable[RationalLike]) -> "LoadProfile":
        """Sort arbitrary values into a profile."""
        return cls(sorted(as_rational(v) for v in values))

    def __repr__(self) -> str:
        return "LoadProfile(" + ", ".join(format_rational(v) for v in self) + ")"


def load_profile(s: Schedule) -> LoadProfile:
    return LoadProfile.of(s.loads)


def _same_length(x: Sequence, y: Sequence) -> None:
    if len(x) != len(y):
        raise ValueError(f"profiles differ in length: {len(x)} != {len(y)}")


def profile_dominates(x: LoadProfile, y: LoadProfile) -> bool:
    """True iff ``x <= y`` coordinate-wise."""
    _same_length(x, y)
    return all(a <= b for a, b in zip(x, y))


def profile_insert_sorted(x: LoadProfile, i: int, delta: RationalLike) -> LoadProfile:
    """Replace ``x[i]`` by ``x[i] + delta`` and re-sort."""
    if not 0 <= i < len(x):
        raise IndexError(f"index {i} out of range for profile of length {len(x)}")
    vals = list(x)
    vals[i] += as_rational(delta)
    if vals[i] < 0:
        raise ValueError("entry would become negative")
    return LoadProfile.of(vals)


def profile_remove_entry(x: LoadProfile, i: int) -> LoadProfile:
    if not 0 <= i < len(x):
        raise IndexError(f"index {i} out of range for profile of length {len(x)}")
    return LoadProfile(x[:i] + x[i + 1:])


def profile_hamming(x: LoadProfile, y: LoadProfile) -> int:
    _same_length(x, y)
    return sum(1 for a, b in zip(x, y) if a != b)


def total_size(jobs: Iterable[Job], rounded: bool = False) -> Fraction:
    if rounded:
        return sum((j.rounded_size for j in jobs), Fraction(0))
    return sum((j.size for j in jobs), Fraction(0))


def integer_scale(values: Iterable[Fraction]) -> int:
    """Smallest positive integer turning every value into an integer."""
    from math import lcm

    scale = 1
    for v in values:
        scale = lcm(scale, Fraction(v).denominator)
    return scale


def ratio(opt: Fraction, achieved: Fraction) -> Optional[Fraction]:
    """``opt / achieved``; 1 when both vanish, ``None`` when only the denominator does."""
    if achieved == 0:
        return Fraction(1) if opt == 0 else None
    return Fraction(opt) / achieved
