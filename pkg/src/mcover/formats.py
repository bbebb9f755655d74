"""JSONL stream files.

The first line may be a header object (no ``"id"`` key) carrying ``m``,
``epsilon`` and family metadata.  Every other line is a job record
``{"id": int, "size": "num/den"}``; records that also carry ``"machine"``
form the starting schedule, the rest are arrivals in line order.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import IO, Dict, List, Optional

from .core import Job, Schedule, format_rational, parse_rational
from .generators import StreamSpec
from .rounding import validate_epsilon


class FormatError(ValueError):
    pass


def _record(job: Job, machine: Optional[int] = None) -> str:
    rec: Dict[str, object] = {"id": job.id, "size": format_rational(job.size)}
    if machine is not None:
        rec["machine"] = machine
    return json.dumps(rec, sort_keys=True)


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    return value


def write_stream(spec: StreamSpec, fh: IO[str]) -> None:
    header = {
        "family": spec.family,
        "params": {k: _jsonable(v) for k, v in sorted(spec.params.items())},
        "m": spec.m,
        "epsilon": format_rational(spec.epsilon),
        "target_rule": spec.target_rule,
    }
    if spec.ub is not None:
        header["ub"] = format_rational(spec.ub)
    fh.write(json.dumps(header, sort_keys=True) + "\n")
    if spec.initial is not None:
        for job in sorted(spec.initial, key=lambda j: j.id):
            fh.write(_record(job, spec.initial.machine_of(job.id)) + "\n")
    for job in spec.arrivals:
        fh.write(_record(job) + "\n")


def dumps_stream(spec: StreamSpec) -> str:
    import io

    buf = io.StringIO()
    write_stream(spec, buf)
    return buf.getvalue()


def read_stream(fh: IO[str], *, m: Optional[int] = None, epsilon=None) -> StreamSpec:
    """Parse a JSONL stream; ``m`` and ``epsilon`` override the header."""
    header: Dict[str, object] = {}
    records: List[dict] = []
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise FormatError(f"line {lineno}: expected a JSON object")
        if "id" not in obj:
            if records or header:
                raise FormatError(f"line {lineno}: header must be the first line")
            header = obj
            continue
        records.append(obj)

    machines = m if m is not None else header.get("m")
    if machines is None:
        raise FormatError("machine count missing: give a header with \"m\" or pass it explicitly")
    eps_text = epsilon if epsilon is not None else header.get("epsilon", "1/8")
    try:
        eps = validate_epsilon(parse_rational(eps_text) if isinstance(eps_text, str) else eps_text)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc

    placed = []
    arrivals = []
    for rec in records:
        try:
            size = rec["size"]
            job = Job.create(int(rec["id"]), parse_rational(size) if isinstance(size, str) else Fraction(size), eps)
        except (KeyError, ValueError, TypeError) as exc:
            raise FormatError(f"bad job record {rec!r}: {exc}") from exc
        if "machine" in rec:
            placed.append((job, int(rec["machine"])))
        else:
            arrivals.append(job)
    try:
        initial = Schedule(int(machines), placed) if placed else None
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    ub = header.get("ub")
    return StreamSpec(
        str(header.get("family", "file")),
        dict(header.get("params", {})),
        int(machines),
        eps,
        tuple(arrivals),
        initial=initial,
        ub=parse_rational(ub) if ub is not None else None,
        target_rule=str(header.get("target_rule", "lowest")),
    )
