"""Exponential sums over von Mangoldt weights along d x + 1.

The weight is Lambda_{N,d}(x) = mangoldt(d x + 1) on x in [1, N].  Its
transform at a rational a/q collapses, via the substitution h = m d + 1, to
a combination of Chebyshev partial sums in progressions:

    Lambda_hat_{N,d}(a/q) = sum_{m=0}^{q-1} e(-m a / q) psi(dN + 1; d q, m d + 1)

(the minus sign matches the package-wide transform convention).  Major-arc
predictions carry the tau factor evaluated at -a for the same reason; the
magnitudes reported downstream are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import ArithTables, ExceptionalDatum, euler_phi, psi, tau
from .errors import DomainError, PreconditionError
from .spectral import ArcFamily, IntegerSignal, SpectrumGrid, grid_spectrum, transform_at

__all__ = [
    "BoundRow",
    "MangoldtWeight",
    "Prediction",
    "lambda_hat_rational",
    "major_prediction",
    "major_sup_ratio",
    "render_csv_rows",
    "spectrum_report",
    "vinogradov_bound",
]


@dataclass(frozen=True)
class MangoldtWeight:
    """Lambda(d x + 1) on x in [1, n] as an IntegerSignal."""

    n: int
    d: int
    signal: IntegerSignal

    @classmethod
    def from_tables(cls, n: int, d: int, tables: ArithTables) -> "MangoldtWeight":
        if n < 1 or d < 1:
            raise DomainError(f"need n, d >= 1, got n={n}, d={d}")
        tables.check_range(d * n + 1)
        vals = tables.mangoldt[d + 1 : d * n + 2 : d].astype(np.float64)
        return cls(n, d, IntegerSignal(1, vals))

    def hat(self, point) -> complex:
        return transform_at(self.signal, point)

    def hat_zero(self) -> float:
        return float(self.signal.values.sum())


def lambda_hat_rational(n: int, d: int, a: int, q: int, tables: ArithTables) -> complex:
    """Transform of the weight at a/q through progression partial sums,
    an independent route from direct summation over the support."""
    if n < 1 or d < 1 or q < 1:
        raise DomainError(f"need n, d, q >= 1, got n={n}, d={d}, q={q}")
    x = d * n + 1
    tables.check_range(x)
    total = 0.0 + 0.0j
    for m in range(q):
        total += np.exp(-2j * np.pi * ((m * (a % q)) % q) / q) * psi(x, d * q, m * d + 1, tables)
    return complex(total)


@dataclass(frozen=True)
class Prediction:
    """Major-arc prediction at a/q: leading term, optional synthetic
    exceptional term, and the arc sup bound Lambda_hat(0)/phi(q)."""

    main_term: complex
    exceptional_term: complex
    sup_bound: float

    def predicted(self) -> complex:
        return self.main_term + self.exceptional_term


def major_prediction(
    n: int,
    d: int,
    a: int,
    q: int,
    tables: ArithTables,
    exceptional: ExceptionalDatum | None = None,
) -> Prediction:
    if n < 1 or d < 1 or q < 1:
        raise DomainError(f"need n, d, q >= 1, got n={n}, d={d}, q={q}")
    if exceptional is not None and d % exceptional.modulus != 0:
        raise PreconditionError(
            f"exceptional modulus {exceptional.modulus} must divide d={d}"
        )
    tables.check_range(d * n + 1)
    tau_factor = tau(-a, d, q)
    denom = euler_phi(d) * euler_phi(q)
    main = d * n * tau_factor / denom
    exc = 0.0 + 0.0j
    if exceptional is not None:
        beta = exceptional.beta
        exc = -((d * n) ** beta) * tau_factor / (denom * beta)
    sup = psi(d * n + 1, d, 1, tables) / euler_phi(q)
    return Prediction(complex(main), complex(exc), float(sup))


def vinogradov_bound(n: int, d: int, q: int, big_q: int) -> float:
    """Minor-arc shape d (log N)^4 (N q^{-1/2} + N^{4/5} + (N Q)^{1/2});
    implied constant taken as 1, reported but never asserted."""
    if n < 2 or d < 1 or q < 1 or big_q < 1:
        raise DomainError("need n >= 2 and positive d, q, Q")
    logn4 = math.log(n) ** 4
    return d * logn4 * (n / math.sqrt(q) + n ** 0.8 + math.sqrt(n * big_q))


# ---------------------------------------------------------------------------
# spectrum report


@dataclass(frozen=True)
class BoundRow:
    theta: float
    a: int
    q: int
    kind: str
    actual: float
    bound: float
    ratio: float


def spectrum_report(
    n: int,
    d: int,
    q_prime: int,
    big_q: int,
    m: int,
    tables: ArithTables,
    exceptional: ExceptionalDatum | None = None,
    k_start: int = 0,
    k_stop: int | None = None,
    grid: SpectrumGrid | None = None,
) -> list[BoundRow]:
    """One row per grid point k/M, k in [k_start, k_stop): measured
    |Lambda_hat| against the class bound (major: sup bound plus the
    exceptional magnitude when a datum is supplied; minor: Vinogradov
    shape).  Chunk bounds exist so callers can shard row construction."""
    weight = MangoldtWeight.from_tables(n, d, tables)
    if grid is None:
        grid = grid_spectrum(weight.signal, m)
    family = ArcFamily(q_prime=q_prime, big_q=big_q)
    hat_zero = weight.hat_zero()
    if hat_zero <= 0:
        raise PreconditionError(f"weight mass vanished at n={n}, d={d}")
    if k_stop is None:
        k_stop = m
    if not (0 <= k_start <= k_stop <= m):
        raise DomainError(f"bad row range [{k_start}, {k_stop}) for grid {m}")

    minor_cache: dict[int, float] = {}
    exc_mag_cache: dict[int, float] = {}
    rows = []
    for k in range(k_start, k_stop):
        theta = k / m
        a, q, kind = family.classify(theta)
        actual = float(abs(grid.values[k]))
        if kind == "major":
            bound = hat_zero / euler_phi(q)
            if exceptional is not None and d % exceptional.modulus == 0:
                if q not in exc_mag_cache:
                    exc_mag_cache[q] = float(
                        abs(major_prediction(n, d, 1, q, tables, exceptional).exceptional_term)
                    )
                bound += exc_mag_cache[q]
        else:
            if q not in minor_cache:
                minor_cache[q] = vinogradov_bound(n, d, q, big_q)
            bound = minor_cache[q]
        rows.append(BoundRow(theta, a, q, kind, actual, bound, actual / bound))
    return rows


def major_sup_ratio(
    n: int,
    d: int,
    q_prime: int,
    big_q: int,
    grid_factor: int,
    tables: ArithTables,
) -> float:
    """max over q <= Q' and star-arc grid points of
    phi(q) |Lambda_hat(theta)| / Lambda_hat(0), on the M = grid_factor * n grid."""
    weight = MangoldtWeight.from_tables(n, d, tables)
    m = grid_factor * n
    grid = grid_spectrum(weight.signal, m)
    family = ArcFamily(q_prime=q_prime, big_q=big_q)
    hat_zero = weight.hat_zero()
    if hat_zero <= 0:
        raise PreconditionError(f"weight mass vanished at n={n}, d={d}")
    mags = np.abs(grid.values)
    best = 0.0
    for q in range(1, q_prime + 1):
        idx = np.unique(np.concatenate([arc.grid_indices(m) for arc in family.star_arcs(q)]))
        best = max(best, euler_phi(q) * float(mags[idx].max()) / hat_zero)
    return best


def render_csv_rows(rows: list[BoundRow]) -> list[str]:
    """CSV lines (no newlines), header first: theta,a,q,class,actual,bound,ratio."""
    out = ["theta,a,q,class,actual,bound,ratio"]
    for r in rows:
        out.append(
            f"{r.theta:.12g},{r.a},{r.q},{r.kind},{r.actual:.12g},{r.bound:.12g},{r.ratio:.12g}"
        )
    return out
