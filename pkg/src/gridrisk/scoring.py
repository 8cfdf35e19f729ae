"""Risk-factor arithmetic: the three-factor product, DREAD means, and the
DREAD-to-physical mapping.

Everything here works on :class:`fractions.Fraction` so that worked examples
reproduce exactly. Floats never enter the scoring path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from gridrisk.catalog import DreadScore
from gridrisk.errors import RangeError

Number = Union[int, Fraction]

SCALE_MIN = Fraction(0)
SCALE_MAX = Fraction(10)


def _exact(value: object, name: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, Rational):
        raise TypeError(f"{name} must be an int or Fraction, got {type(value).__name__}")
    value = Fraction(value)
    if not SCALE_MIN <= value <= SCALE_MAX:
        raise RangeError(f"{name}={value} outside [0, 10]")
    return value


@dataclass(frozen=True)
class RiskTriple:
    """Operands of the risk factor: threat probability, vulnerability
    probability, and vulnerability impact, each on the 0-10 scale."""

    p_threat: Fraction
    p_vulnerability: Fraction
    impact: Fraction

    def __post_init__(self) -> None:
        for name in ("p_threat", "p_vulnerability", "impact"):
            object.__setattr__(self, name, _exact(getattr(self, name), name))

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.p_threat, self.p_vulnerability, self.impact)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.as_tuple())


def physical_risk_score(triple: RiskTriple) -> Fraction:
    """Return ``p_threat * p_vulnerability * impact`` exactly.

    >>> physical_risk_score(RiskTriple(9, 7, 9))
    Fraction(567, 1)
    """
    if not isinstance(triple, RiskTriple):
        triple = RiskTriple(*triple)
    return triple.p_threat * triple.p_vulnerability * triple.impact


def dread_overall(d: DreadScore) -> Fraction:
    """Mean of the five DREAD attributes.

    >>> dread_overall(DreadScore(2, 5, 5, 10, 10))
    Fraction(32, 5)
    """
    return Fraction(sum(d.as_tuple()), 5)


def map_dread_to_triple(d: DreadScore) -> RiskTriple:
    """Translate a DREAD score onto the physical risk-factor operands.

    Threat probability is the mean of reproducibility and exploitability,
    vulnerability probability is discoverability, and impact is the mean
    of damage and affected users.
    """
    return RiskTriple(
        p_threat=Fraction(d.reproducibility + d.exploitability, 2),
        p_vulnerability=Fraction(d.discoverability),
        impact=Fraction(d.damage + d.affected_users, 2),
    )


def round_half_even(value: Fraction) -> Fraction:
    # Fraction.__round__ with no ndigits already rounds ties to even.
    return Fraction(round(value))


def integerize_triple(t: RiskTriple) -> RiskTriple:
    """Round each component to the nearest integer, ties to even (8.5 -> 8)."""
    return RiskTriple(*(round_half_even(c) for c in t.as_tuple()))


def cyber_risk_score(d: DreadScore) -> Fraction:
    """Ranking key for a cyber entry: product of its integerized mapped triple."""
    return physical_risk_score(integerize_triple(map_dread_to_triple(d)))
