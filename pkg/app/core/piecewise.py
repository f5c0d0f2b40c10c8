"""Non-decreasing piecewise-linear functions on the real line.

A curve is a strictly increasing list of breakpoints ``x_k`` with a left
limit ``lo_k`` and a value ``hi_k >= lo_k`` at each (upward jumps allowed,
values right-continuous), linear pieces from ``(x_k, hi_k)`` to
``(x_{k+1}, lo_{k+1})`` and affine tails with slopes ``left_slope`` and
``right_slope``.

Arithmetic is generic over the number type: curves built from ``Fraction``
stay exact, curves built from ``float`` use floating point.
"""
import logging
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable, List, Optional, Sequence, Tuple

from app.utils.config import settings

logger = logging.getLogger(__name__)

Number = Real


def _same(a: Number, b: Number) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class PiecewiseLinearFn:
    xs: Tuple[Number, ...]
    lo: Tuple[Number, ...]
    hi: Tuple[Number, ...]
    left_slope: Number
    right_slope: Number
    coarsened: bool = False

    def __post_init__(self):
        if not self.xs:
            raise ValueError("a curve needs at least one breakpoint")
        if not (len(self.xs) == len(self.lo) == len(self.hi)):
            raise ValueError("breakpoint arrays differ in length")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    # construction

    @classmethod
    def identity(cls, exact: bool = True) -> "PiecewiseLinearFn":
        zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
        return cls((zero,), (zero,), (zero,), one, one)

    @classmethod
    def affine(cls, slope: Number, intercept: Number) -> "PiecewiseLinearFn":
        zero = intercept - intercept
        return cls((zero,), (intercept,), (intercept,), slope, slope)

    @classmethod
    def from_points(cls, points: Sequence[Tuple[Number, Number]], left_slope: Number, right_slope: Number) -> "PiecewiseLinearFn":
        xs = tuple(p[0] for p in points)
        ys = tuple(p[1] for p in points)
        return cls(xs, ys, ys, left_slope, right_slope)

    # evaluation

    def __call__(self, x: Number) -> Number:
        xs = self.xs
        if x < xs[0]:
            return self.lo[0] + self.left_slope * (x - xs[0])
        if x >= xs[-1]:
            return self.hi[-1] + self.right_slope * (x - xs[-1])
        k = bisect_right(xs, x) - 1
        if x == xs[k]:
            return self.hi[k]
        return self.hi[k] + (self.lo[k + 1] - self.hi[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])

    def left_limit(self, x: Number) -> Number:
        k = bisect_right(self.xs, x) - 1
        if k >= 0 and self.xs[k] == x:
            return self.lo[k]
        return self(x)

    def evaluate(self, grid: Iterable[Number]) -> List[Number]:
        return [self(x) for x in grid]

    def __len__(self) -> int:
        return len(self.xs)

    # algebra

    def _rebuild(self, xs: Sequence[Number], left_slope: Number, right_slope: Number, transform=None, coarsened: bool = False) -> "PiecewiseLinearFn":
        lo, hi = [], []
        for x in xs:
            a, b = self.left_limit(x), self(x)
            if transform is not None:
                a, b = transform(a), transform(b)
            lo.append(a)
            hi.append(b)
        return PiecewiseLinearFn(tuple(xs), tuple(lo), tuple(hi), left_slope, right_slope, coarsened).simplify()

    def __add__(self, other) -> "PiecewiseLinearFn":
        if not isinstance(other, PiecewiseLinearFn):
            return self.shift(other)
        xs = sorted(set(self.xs) | set(other.xs))
        lo = tuple(self.left_limit(x) + other.left_limit(x) for x in xs)
        hi = tuple(self(x) + other(x) for x in xs)
        return PiecewiseLinearFn(
            tuple(xs),
            lo,
            hi,
            self.left_slope + other.left_slope,
            self.right_slope + other.right_slope,
            self.coarsened or other.coarsened,
        ).simplify()

    __radd__ = __add__

    def shift(self, c: Number) -> "PiecewiseLinearFn":
        """Vertical shift by ``c``."""
        return PiecewiseLinearFn(
            self.xs,
            tuple(v + c for v in self.lo),
            tuple(v + c for v in self.hi),
            self.left_slope,
            self.right_slope,
            self.coarsened,
        )

    def scale(self, c: Number) -> "PiecewiseLinearFn":
        if c < 0:
            raise ValueError("scaling by a negative factor breaks monotonicity")
        return PiecewiseLinearFn(
            self.xs,
            tuple(v * c for v in self.lo),
            tuple(v * c for v in self.hi),
            self.left_slope * c,
            self.right_slope * c,
            self.coarsened,
        ).simplify()

    def _crossings(self, level: Number) -> List[Number]:
        xs, lo, hi = self.xs, self.lo, self.hi
        out = []
        if self.left_slope > 0 and level < lo[0]:
            out.append(xs[0] + (level - lo[0]) / self.left_slope)
        for k in range(len(xs) - 1):
            if hi[k] < level < lo[k + 1]:
                out.append(xs[k] + (level - hi[k]) * (xs[k + 1] - xs[k]) / (lo[k + 1] - hi[k]))
        if self.right_slope > 0 and level > hi[-1]:
            out.append(xs[-1] + (level - hi[-1]) / self.right_slope)
        return out

    def clip(self, lower: Optional[Number], upper: Optional[Number]) -> "PiecewiseLinearFn":
        """``min(max(f, lower), upper)``; ``None`` leaves that side open."""
        xs = set(self.xs)
        for level in (lower, upper):
            if level is not None:
                xs.update(self._crossings(level))

        def clamp(v):
            if lower is not None and v < lower:
                v = lower
            if upper is not None and v > upper:
                v = upper
            return v

        zero = self.left_slope - self.left_slope
        return self._rebuild(
            sorted(xs),
            self.left_slope if lower is None else zero,
            self.right_slope if upper is None else zero,
            clamp,
            self.coarsened,
        )

    def inverse(self) -> "PiecewiseLinearFn":
        """Right-continuous inverse ``t -> sup{x : f(x) <= t}``.

        Jumps of ``f`` become flat pieces of the inverse and flat pieces of
        ``f`` become jumps.
        """
        if self.left_slope <= 0 or self.right_slope <= 0:
            raise ValueError("only curves with increasing tails are invertible")
        # walk the graph of f and swap coordinates
        swapped: List[Tuple[Number, Number]] = []
        for x, a, b in zip(self.xs, self.lo, self.hi):
            swapped.append((a, x))
            swapped.append((b, x))
        xs, lo, hi = [], [], []
        for y, x in swapped:
            if xs and y <= xs[-1]:
                hi[-1] = x
            else:
                xs.append(y)
                lo.append(x)
                hi.append(x)
        return PiecewiseLinearFn(
            tuple(xs), tuple(lo), tuple(hi), 1 / self.left_slope, 1 / self.right_slope, self.coarsened
        ).simplify()

    def crossing(self, level: Number) -> Number:
        """``sup{x : f(x) < level}``, the point where f first reaches ``level``."""
        xs, lo, hi = self.xs, self.lo, self.hi
        if lo[0] >= level:
            if self.left_slope <= 0:
                raise ValueError(f"curve never drops below {level}")
            return xs[0] - (lo[0] - level) / self.left_slope
        for k in range(len(xs)):
            if k and lo[k] >= level:
                return xs[k - 1] + (level - hi[k - 1]) * (xs[k] - xs[k - 1]) / (lo[k] - hi[k - 1])
            if hi[k] >= level:
                return xs[k]
        if self.right_slope <= 0:
            raise ValueError(f"curve never reaches {level}")
        return xs[-1] + (level - hi[-1]) / self.right_slope

    # housekeeping

    def simplify(self) -> "PiecewiseLinearFn":
        """Drop continuous breakpoints whose neighbouring pieces are collinear."""
        xs, lo, hi = self.xs, self.lo, self.hi
        n = len(xs)
        keep: List[int] = []
        for k in range(n):
            if _same(lo[k], hi[k]) and not (k == n - 1 and not keep):
                if keep:
                    before = (lo[k] - hi[keep[-1]]) / (xs[k] - xs[keep[-1]])
                else:
                    before = self.left_slope
                after = self.right_slope if k == n - 1 else (lo[k + 1] - hi[k]) / (xs[k + 1] - xs[k])
                if _same(before, after):
                    continue
            keep.append(k)
        if len(keep) == n:
            return self
        return PiecewiseLinearFn(
            tuple(xs[k] for k in keep),
            tuple(lo[k] for k in keep),
            tuple(hi[k] for k in keep),
            self.left_slope,
            self.right_slope,
            self.coarsened,
        )

    def capped(self, max_breakpoints: int = settings.MAX_BREAKPOINTS) -> "PiecewiseLinearFn":
        """Coarsen to at most ``max_breakpoints`` by dropping continuous breakpoints."""
        if len(self.xs) <= max_breakpoints:
            return self
        logger.warning(f"Coarsening curve with {len(self.xs)} breakpoints to {max_breakpoints}")
        keep = [0, len(self.xs) - 1]
        jumps = [k for k in range(1, len(self.xs) - 1) if self.lo[k] != self.hi[k]]
        keep.extend(jumps)
        budget = max(max_breakpoints - len(keep), 0)
        rest = [k for k in range(1, len(self.xs) - 1) if self.lo[k] == self.hi[k]]
        if budget and rest:
            step = max(len(rest) // budget, 1)
            keep.extend(rest[::step][:budget])
        keep = sorted(set(keep))
        return PiecewiseLinearFn(
            tuple(self.xs[k] for k in keep),
            tuple(self.lo[k] for k in keep),
            tuple(self.hi[k] for k in keep),
            self.left_slope,
            self.right_slope,
            True,
        )

    def to_dict(self) -> dict:
        return {
            "breakpoints": [[float(x), float(a), float(b)] for x, a, b in zip(self.xs, self.lo, self.hi)],
            "left_slope": float(self.left_slope),
            "right_slope": float(self.right_slope),
            "coarsened": self.coarsened,
        }
