"""Maximal mediated sets: fixed-point and removal algorithms, classification,
h-ratio.

Both algorithms return the same set (the unique maximal mediated superset of
the simplex vertices inside its convex hull); the fixed-point form iterates
a shrinking closure from all lattice points, the removal form works only on
the even sublist and is the one used at scale.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    Point,
    SimplicialSet,
    even_lattice_points,
    lattice_points,
    midpoint_set,
)


class Classification(str, Enum):
    H = "H"
    M = "M"
    INTERMEDIATE = "INTERMEDIATE"


@dataclass(frozen=True)
class HRatio:
    """Exact h-ratio, kept as the defining pair of counts.

    numerator_count = #(mms - floor), denominator_count = #(conv - floor);
    the value is 1 when the bounds coincide (denominator 0).
    """

    numerator_count: int
    denominator_count: int

    @property
    def value(self) -> Fraction:
        if self.denominator_count == 0:
            return Fraction(1)
        return Fraction(self.numerator_count, self.denominator_count)

    def __str__(self) -> str:
        return f"{self.numerator_count}/{self.denominator_count}"

    @classmethod
    def parse(cls, text: str) -> "HRatio":
        num, _, den = text.partition("/")
        try:
            return cls(int(num), int(den))
        except ValueError as exc:
            raise ValueError(f"bad h-ratio {text!r}") from exc


def floor_set(delta: SimplicialSet) -> set[Point]:
    """The lower bound: vertices together with their pairwise midpoints."""
    return set(delta.points) | midpoint_set(delta.points)


def mms_fixed_point(delta: SimplicialSet) -> set[Point]:
    """Iterate L -> Mid(L) | delta starting from all lattice points of the
    hull; the sequence shrinks and stabilizes at the maximal mediated set."""
    base = set(delta.points)
    current = lattice_points(delta)
    while True:
        nxt = midpoint_set(current) | base
        if nxt == current:
            return current
        current = nxt


def mms_removal(delta: SimplicialSet) -> set[Point]:
    """Tail-scan removal over the lex-ordered even points of the hull.

    Scans from the tail toward the head; any even point that is neither a
    vertex nor a midpoint of two list members is removed, and the scan
    restarts from the tail.  The head never needs testing: the lex-minimal
    even point of the hull is a vertex.  Returns the surviving even list
    together with all its midpoints.
    """
    base = set(delta.points)
    L: list[Point] = even_lattice_points(delta)
    i = len(L) - 1
    while i > 0:
        p = L[i]
        if p in base or _has_midpoint_pair(L, p):
            i -= 1
        else:
            del L[i]
            i = len(L) - 1
    return set(L) | midpoint_set(L)


def _has_midpoint_pair(L: Sequence[Point], p: Point) -> bool:
    # two-pointer scan; valid because lex order is compatible with addition
    lo = 0
    hi = len(L) - 1
    target = tuple(2 * c for c in p)
    while lo < hi:
        a = L[lo]
        b = L[hi]
        cmp = 0
        for x, y, t in zip(a, b, target):
            s = x + y
            if s != t:
                cmp = -1 if s < t else 1
                break
        if cmp == 0:
            return True
        if cmp < 0:
            lo += 1
        else:
            hi -= 1
    return False


@dataclass(frozen=True)
class MmsResult:
    delta: SimplicialSet
    mms_points: tuple[Point, ...]
    conv_count: int
    floor_count: int

    @property
    def mms_size(self) -> int:
        return len(self.mms_points)

    @property
    def both_bounds_equal(self) -> bool:
        return self.floor_count == self.conv_count

    @property
    def classification(self) -> Classification:
        return classify(self)

    @property
    def h_ratio(self) -> HRatio:
        return h_ratio(self)

    def to_json_line(self) -> str:
        payload = {
            "delta": str(self.delta),
            "mms_points": [list(p) for p in self.mms_points],
            "conv_count": self.conv_count,
            "floor_count": self.floor_count,
            "classification": self.classification.value,
            "h_ratio": str(self.h_ratio),
        }
        return json.dumps(payload, separators=(",", ":"))

    @classmethod
    def from_json_line(cls, line: str) -> "MmsResult":
        payload = json.loads(line)
        delta = SimplicialSet.parse(payload["delta"])
        pts = tuple(sorted(tuple(int(c) for c in p) for p in payload["mms_points"]))
        result = cls(
            delta=delta,
            mms_points=pts,
            conv_count=int(payload["conv_count"]),
            floor_count=int(payload["floor_count"]),
        )
        if result.classification.value != payload["classification"]:
            raise ValueError("classification does not match stored counts")
        if str(result.h_ratio) != payload["h_ratio"]:
            raise ValueError("h-ratio does not match stored counts")
        return result


def classify(result: MmsResult) -> Classification:
    # when floor == conv both labels apply; H wins the tie
    if result.mms_size == result.conv_count:
        return Classification.H
    if result.mms_size == result.floor_count:
        return Classification.M
    return Classification.INTERMEDIATE


def h_ratio(result: MmsResult) -> HRatio:
    den = result.conv_count - result.floor_count
    if den == 0:
        return HRatio(0, 0)
    return HRatio(result.mms_size - result.floor_count, den)


def compute_mms(delta: SimplicialSet, method: str = "removal") -> MmsResult:
    """Full MMS computation: points, bound counts, classification inputs.

    method selects the algorithm ("removal" is the fast default,
    "fixed-point" the literal closure iteration).
    """
    if method == "removal":
        mms = mms_removal(delta)
    elif method == "fixed-point":
        mms = mms_fixed_point(delta)
    else:
        raise ValueError(f"unknown method {method!r}")
    conv_count = len(lattice_points(delta))
    floor_count = len(floor_set(delta))
    return MmsResult(
        delta=delta,
        mms_points=tuple(sorted(mms)),
        conv_count=conv_count,
        floor_count=floor_count,
    )
