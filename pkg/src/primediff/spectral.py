"""Finitely supported signals on Z, their transforms on the torus, and the
Farey arc dissection.

Sign convention, used everywhere in this package:

    f_hat(theta) = sum_x f(x) e(-x theta),      e(t) = exp(2 pi i t).

Rational points theta = a/q + kappa evaluate the rational part by exact
integer reduction mod q, so transforms at arc centers keep full precision
even when the support is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, PreconditionError, ResourceError

__all__ = [
    "ArcFamily",
    "FareyArc",
    "IntegerSignal",
    "SpectrumGrid",
    "TorusPoint",
    "arc_energy",
    "convolve",
    "dirichlet_approx",
    "grid_spectrum",
    "transform_at",
]

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# signals


@dataclass(frozen=True)
class IntegerSignal:
    """A complex- or real-valued function on Z supported on
    [offset, offset + len(values))."""

    offset: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 1:
            raise DomainError("signal values must be one-dimensional")

    @classmethod
    def from_indicator(cls, points, dtype=np.float64) -> "IntegerSignal":
        pts = sorted(set(int(p) for p in points))
        if not pts:
            raise DomainError("empty support")
        lo, hi = pts[0], pts[-1]
        vals = np.zeros(hi - lo + 1, dtype=dtype)
        vals[np.asarray(pts) - lo] = 1
        return cls(lo, vals)

    @classmethod
    def interval(cls, n: int) -> "IntegerSignal":
        """Indicator of [1, n]."""
        if n < 1:
            raise DomainError(f"interval length must be >= 1, got {n}")
        return cls(1, np.ones(n, dtype=np.float64))

    def support_length(self) -> int:
        return len(self.values)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))

    def total_mass(self) -> complex:
        return complex(self.values.sum())

    def reflect(self) -> "IntegerSignal":
        """The signal x -> f(-x)."""
        return IntegerSignal(-(self.offset + len(self.values) - 1), self.values[::-1].copy())

    def scaled(self, c: float) -> "IntegerSignal":
        return IntegerSignal(self.offset, self.values * c)

    def minus(self, other: "IntegerSignal") -> "IntegerSignal":
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self.values), other.offset + len(other.values))
        vals = np.zeros(hi - lo, dtype=np.result_type(self.values, other.values))
        vals[self.offset - lo : self.offset - lo + len(self.values)] += self.values
        vals[other.offset - lo : other.offset - lo + len(other.values)] -= other.values
        return IntegerSignal(lo, vals)


def convolve(f: IntegerSignal, g: IntegerSignal) -> IntegerSignal:
    """Full linear convolution; supports add, offsets add."""
    return IntegerSignal(f.offset + g.offset, np.convolve(f.values, g.values))


# ---------------------------------------------------------------------------
# torus points


@dataclass(frozen=True)
class TorusPoint:
    """theta = a/q + kappa with gcd(a, q) = 1, 0 <= a <= q, |kappa| <= 1/2.

    Plain reals enter through from_float, which uses the trivial rational
    part 0/1.  Exact rationals get kappa = 0.
    """

    a: int
    q: int
    kappa: float = 0.0

    def __post_init__(self):
        if self.q < 1:
            raise DomainError(f"denominator must be >= 1, got {self.q}")
        if not (0 <= self.a <= self.q):
            raise DomainError(f"need 0 <= a <= q, got a={self.a}, q={self.q}")
        if math.gcd(self.a, self.q) != 1 and self.a != 0:
            raise DomainError(f"a/q must be reduced, got {self.a}/{self.q}")
        if abs(self.kappa) > 0.5 + 1e-15:
            raise DomainError(f"|kappa| must be <= 1/2, got {self.kappa}")

    @classmethod
    def rational(cls, a: int, q: int) -> "TorusPoint":
        g = math.gcd(a % q if q > 0 else a, q) or 1
        aa = (a % q) // g if q > 0 else a
        return cls(aa, q // g if q > 0 else q, 0.0)

    @classmethod
    def from_float(cls, theta: float) -> "TorusPoint":
        t = theta % 1.0
        if t > 0.5:
            return cls(1, 1, t - 1.0)
        return cls(0, 1, t)

    def value(self) -> float:
        return (self.a / self.q + self.kappa) % 1.0


# ---------------------------------------------------------------------------
# pointwise transform


def transform_at(f: IntegerSignal, point) -> complex:
    """f_hat at a TorusPoint or plain float, with e(-x theta) phases."""
    if not isinstance(point, TorusPoint):
        point = TorusPoint.from_float(float(point))
    idx = f.offset + np.arange(len(f.values), dtype=np.int64)
    rational_phase = (idx % point.q) * point.a % point.q
    phase = np.exp(-2j * np.pi * rational_phase / point.q)
    if point.kappa != 0.0:
        phase = phase * np.exp(-2j * np.pi * point.kappa * idx)
    return complex(np.dot(f.values, phase))


# ---------------------------------------------------------------------------
# grid spectra


@dataclass(frozen=True)
class SpectrumGrid:
    """Values f_hat(k/M) for k = 0..M-1."""

    m: int
    values: np.ndarray

    def theta(self, k: int) -> float:
        return k / self.m

    def total_energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) / self.m)


def grid_spectrum(f: IntegerSignal, m: int) -> SpectrumGrid:
    """Exact f_hat on the M-point grid via FFT of the zero-padded support.

    Requires m >= support length; below that the grid aliases and the
    Parseval identity (1/M) sum |f_hat(k/M)|^2 = sum |f|^2 fails.
    """
    n = f.support_length()
    if m < n:
        raise ResourceError(f"grid size {m} below support length {n}")
    spec = np.fft.fft(f.values, n=m)
    k = np.arange(m, dtype=np.int64)
    spec = spec * np.exp(-2j * np.pi * ((f.offset % m) * k % m) / m)
    return SpectrumGrid(m, spec)


# ---------------------------------------------------------------------------
# rational approximation


def dirichlet_approx(theta: float, big_q: int) -> tuple[int, int]:
    """Best continued-fraction approximation a/q with q <= big_q.

    Returns reduced (a, q) with |theta - a/q| < 1/(q * big_q), theta taken
    mod 1.  Exact integer arithmetic on the binary value of theta.
    """
    if big_q < 1:
        raise DomainError(f"cutoff must be >= 1, got {big_q}")
    frac = Fraction(float(theta)) % 1
    num, den = frac.numerator, frac.denominator
    h_prev, h = 1, num // den
    k_prev, k = 0, 1
    num, den = den, num - (num // den) * den
    while den != 0:
        a_i = num // den
        h_next = a_i * h + h_prev
        k_next = a_i * k + k_prev
        if k_next > big_q:
            break
        h_prev, h, k_prev, k = h, h_next, k, k_next
        num, den = den, num - a_i * den
    if h == k:  # theta rounded up to 1: same arc as 0
        return 0, 1
    return h, k


# ---------------------------------------------------------------------------
# Farey arcs


@dataclass(frozen=True)
class FareyArc:
    """Closed arc {theta : |theta - a/q| <= eta} on the torus."""

    a: int
    q: int
    eta: float

    def __post_init__(self):
        if self.q < 1 or not (0 <= self.a <= self.q):
            raise DomainError(f"bad arc center {self.a}/{self.q}")
        if not (0.0 < self.eta <= 0.5):
            raise DomainError(f"arc half-width must lie in (0, 1/2], got {self.eta}")

    def center(self) -> float:
        return self.a / self.q

    def contains(self, theta: float) -> bool:
        dist = abs((theta - self.center()) % 1.0)
        return min(dist, 1.0 - dist) <= self.eta + 1e-15

    def grid_indices(self, m: int) -> np.ndarray:
        """Grid indices k with k/M inside the arc: the integer range
        [ceil(M(a/q - eta)), floor(M(a/q + eta))], taken mod M."""
        lo = math.ceil(m * (self.a / self.q - self.eta))
        hi = math.floor(m * (self.a / self.q + self.eta))
        if hi - lo + 1 >= m:
            return np.arange(m, dtype=np.int64)
        return np.arange(lo, hi + 1, dtype=np.int64) % m


@dataclass(frozen=True)
class ArcFamily:
    """Major/minor dissection at level (Q_prime, Q): arcs of half-width
    1/(qQ) around rationals a/q, major when q <= Q_prime."""

    q_prime: int
    big_q: int

    def __post_init__(self):
        if self.q_prime < 1:
            raise DomainError(f"Q' must be >= 1, got {self.q_prime}")
        if self.big_q <= 2 * self.q_prime:
            raise PreconditionError(
                f"need Q > 2 Q' for disjoint major arcs, got Q={self.big_q}, Q'={self.q_prime}"
            )

    def eta(self, q: int) -> float:
        return 1.0 / (q * self.big_q)

    def star_arcs(self, q: int) -> list[FareyArc]:
        """Arcs around a/q for 1 <= a <= q with gcd(a, q) = 1."""
        if q < 1:
            raise DomainError(f"q must be >= 1, got {q}")
        return [FareyArc(a, q, self.eta(q)) for a in range(1, q + 1) if math.gcd(a, q) == 1]

    def all_arcs(self, q: int) -> list[FareyArc]:
        """Arcs around a/q for every 1 <= a <= q (centers repeat across
        divisors; this is the level-q family, not the star family)."""
        if q < 1:
            raise DomainError(f"q must be >= 1, got {q}")
        return [FareyArc(a, q, self.eta(q)) for a in range(1, q + 1)]

    def classify(self, theta: float) -> tuple[int, int, str]:
        """(a, q, kind) for the arc containing theta, kind in {major, minor}."""
        a, q = dirichlet_approx(theta, self.big_q)
        return a, q, ("major" if q <= self.q_prime else "minor")


def arc_energy(f: IntegerSignal, arcs, m: int, grid: SpectrumGrid | None = None) -> float:
    """Quadrature energy (1/M) sum |f_hat(k/M)|^2 over the union of the arcs.

    Needs m >= 8 x support length so each arc's main lobe is resolved; pass a
    precomputed grid to amortize the FFT across many arc families.
    """
    if m < 8 * f.support_length():
        raise ResourceError(
            f"grid {m} too coarse for support {f.support_length()}; need >= 8x"
        )
    if grid is None:
        grid = grid_spectrum(f, m)
    elif grid.m != m:
        raise PreconditionError(f"grid size {grid.m} does not match m={m}")
    if not arcs:
        return 0.0
    idx = np.unique(np.concatenate([arc.grid_indices(m) for arc in arcs]))
    return float(np.sum(np.abs(grid.values[idx]) ** 2) / m)
