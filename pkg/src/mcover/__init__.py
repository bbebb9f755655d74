"""Online machine covering with bounded migration, in exact rational arithmetic."""
from .core import Instance, Job, LoadProfile, Schedule, ScheduleError, format_rational, parse_rational
from .jump import JumpSession, is_jump_optimal, is_swap_optimal, online_jump_insert, push
from .lpt import is_lpt_solution, lpt_schedule
from .online_lpt import OnlineLPTSession, online_lpt_insert
from .oracle import Algorithm, BudgetExceeded, brute_force_opt, run_stream
from .rounding import RoundingContext, build_context, round_size

__all__ = [
    "Algorithm",
    "BudgetExceeded",
    "Instance",
    "Job",
    "JumpSession",
    "LoadProfile",
    "OnlineLPTSession",
    "RoundingContext",
    "Schedule",
    "ScheduleError",
    "brute_force_opt",
    "build_context",
    "format_rational",
    "is_jump_optimal",
    "is_lpt_solution",
    "is_swap_optimal",
    "lpt_schedule",
    "online_jump_insert",
    "online_lpt_insert",
    "parse_rational",
    "push",
    "round_size",
    "run_stream",
]
