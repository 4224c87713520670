"""Certified norm brackets."""

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass
class NormBracket:
    """An interval ``[lower, upper]`` that contains a norm.

    ``lower_witness`` is whatever input realizes ``lower`` (replayable by the
    module that produced it); ``upper_certificate`` says why ``upper`` holds.
    """

    lower: float
    upper: float
    lower_witness: Any = None
    upper_certificate: Any = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lower = float(max(self.lower, 0.0))
        self.upper = float(self.upper)
        if self.lower > self.upper * (1 + 1e-9) + 1e-12:
            raise ValueError(f"inverted bracket: lower={self.lower!r} > upper={self.upper!r}")

    @property
    def width(self):
        if self.lower == 0:
            return 0.0 if self.upper == 0 else math.inf
        return self.upper / self.lower - 1

    @property
    def exact(self):
        return self.upper == self.lower

    def contains(self, value, rtol=0.0):
        return self.lower * (1 - rtol) - 1e-12 <= value <= self.upper * (1 + rtol) + 1e-12

    def scaled(self, factor):
        factor = abs(factor)
        return NormBracket(self.lower * factor, self.upper * factor,
                           self.lower_witness, self.upper_certificate, dict(self.notes))

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper}


def merge(*brackets):
    """Intersect brackets of the same quantity (max of lowers, min of uppers)."""
    lo = max(b.lower for b in brackets)
    up = min(b.upper for b in brackets)
    best_lo = max(brackets, key=lambda b: b.lower)
    best_up = min(brackets, key=lambda b: b.upper)
    return NormBracket(lo, max(up, lo), best_lo.lower_witness, best_up.upper_certificate)


def overlap_gap(b1, b2):
    """Relative amount by which two brackets of the same quantity fail to overlap.

    Zero when they intersect.
    """
    lo = max(b1.lower, b2.lower)
    up = min(b1.upper, b2.upper)
    if lo <= up:
        return 0.0
    return (lo - up) / up if up > 0 else math.inf


def hull_gap(b1, b2):
    """Width of the hull of two brackets measured from the best lower bound."""
    lo = max(b1.lower, b2.lower)
    up = max(b1.upper, b2.upper)
    if lo == 0:
        return 0.0 if up == 0 else math.inf
    return up / lo - 1
