"""Exact distinguishability and monitoring of hidden Markov chains."""

from fractions import Fraction

from ._hmcdist import (
    ClassifiedHmc,
    Error,
    GuardExceeded,
    Hmc,
    ParseError,
    PreconditionError,
    TruncatedStream,
    ValidationError,
    combine,
    condition,
    equivalent,
    monitor_one_sided,
    monitor_two_sided,
    plan_one_sided,
    plan_two_sided,
)
from . import _hmcdist


def check_disting(h1, h2):
    r = _hmcdist.check_disting(h1, h2)
    r["c"] = Fraction(r["c"])
    return r


def refined_constant(h1, h2, guard=1 << 16):
    return Fraction(_hmcdist.refined_constant(h1, h2, guard))


def exact_verdict_measure(h1, h2, phases, mode="two-sided"):
    r = _hmcdist.exact_verdict_measure(h1, h2, phases, mode)
    r["p1"] = [Fraction(x) for x in r["p1"]]
    r["p2"] = [Fraction(x) for x in r["p2"]]
    return r


def decide_monitorable(chmc):
    ok, c = _hmcdist.decide_monitorable(chmc)
    return ok, Fraction(c)


__all__ = [
    "ClassifiedHmc",
    "Error",
    "GuardExceeded",
    "Hmc",
    "ParseError",
    "PreconditionError",
    "TruncatedStream",
    "ValidationError",
    "check_disting",
    "combine",
    "condition",
    "decide_monitorable",
    "equivalent",
    "exact_verdict_measure",
    "monitor_one_sided",
    "monitor_two_sided",
    "plan_one_sided",
    "plan_two_sided",
    "refined_constant",
]
