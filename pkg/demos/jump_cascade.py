"""A single arrival can force the jump algorithm to move a job of every size.

The starting schedule holds one machine per ladder size.  The arriving job
raises the lowest machine, and each Push hands the displaced job one step down
the ladder, so the migrated volume grows with 1/eps.
"""
from fractions import Fraction

from mcover.generators import gen_jump_mig_lb, jump_lb_bound
from mcover.jump import JumpSession

for ell, u, eps in ((0, 1, Fraction(1, 4)), (1, 3, Fraction(1, 8)), (-1, 2, Fraction(1, 16))):
    spec = gen_jump_mig_lb(ell, u, eps)
    session = JumpSession(spec.m, eps, target_rule=spec.rule(), initial=spec.initial)
    ledger = session.insert(spec.arrivals[0], ub=spec.ub)
    print(
        f"ell={ell:2d} u={u} eps={eps}: {spec.m} machines, {len(ledger.moves)} jobs moved, "
        f"volume {ledger.volume_rounded} (lower bound {jump_lb_bound(ell, u, eps)}), "
        f"factor {float(ledger.factor):.2f}"
    )
