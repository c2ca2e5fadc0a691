"""Sieved arithmetic tables, Ramanujan-type sums, Dirichlet characters,
and Chebyshev partial sums.

Everything downstream (exponential sums, arc energy, the iteration driver)
pulls its arithmetic from one ArithTables instance, built once per run by a
linear-time sieve. The exponential-sum primitives (ramanujan, tau) are
normatively DIRECT sums; closed forms are exposed separately so consistency
between the two routes stays a checkable statement rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DomainError, PreconditionError, ResourceError

__all__ = [
    "ArithTables",
    "build_tables",
    "DirichletCharacter",
    "characters_mod",
    "ExceptionalDatum",
    "euler_phi",
    "is_prime",
    "mobius_of",
    "psi",
    "psi_chi",
    "ramanujan",
    "tau",
    "tau_closed_form",
    "verify_inversion",
]


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class ArithTables:
    """Dense arithmetic tables on [0, n_max].

    mangoldt[n] = log p if n = p^k, else 0.  mobius and phi are the usual
    multiplicative functions; spf[n] is the smallest prime factor (spf[p] = p
    for primes, spf[0] = spf[1] = 0).
    """

    n_max: int
    spf: np.ndarray
    mangoldt: np.ndarray
    mobius: np.ndarray
    phi: np.ndarray

    def check_range(self, n: int) -> None:
        if n > self.n_max:
            raise ResourceError(
                f"tables built to {self.n_max}, need {n}; rebuild larger"
            )

    def is_prime_power(self, n: int) -> bool:
        return 2 <= n <= self.n_max and self.mangoldt[n] > 0.0

    def is_proper_prime_power(self, n: int) -> bool:
        # prime power with exponent >= 2, i.e. Lambda-positive but not prime
        return self.is_prime_power(n) and self.spf[n] != n


def build_tables(n_max: int) -> ArithTables:
    """Sieve smallest prime factors up to n_max and derive the rest.

    Per-prime slice updates keep everything in numpy; total work is
    O(n_max log log n_max).
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    size = n_max + 1
    spf = np.zeros(size, dtype=np.int64)
    for p in range(2, math.isqrt(n_max) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    untouched = spf == 0
    untouched[:2] = False
    spf[untouched] = np.nonzero(untouched)[0]

    is_p = spf == np.arange(size, dtype=np.int64)
    is_p[:2] = False
    primes = np.nonzero(is_p)[0]

    mangoldt = np.zeros(size, dtype=np.float64)
    for p in primes.tolist():
        logp = math.log(p)
        pk = p
        while pk <= n_max:
            mangoldt[pk] = logp
            pk *= p

    mobius = np.ones(size, dtype=np.int64)
    phi = np.arange(size, dtype=np.int64)
    for p in primes.tolist():
        mobius[p::p] *= -1
        p2 = p * p
        if p2 <= n_max:
            mobius[p2::p2] = 0
        phi[p::p] -= phi[p::p] // p
    mobius[0] = 0
    if n_max >= 1:
        phi[0] = 0

    return ArithTables(n_max=n_max, spf=spf, mangoldt=mangoldt, mobius=mobius, phi=phi)


def _factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division; fine for the moduli we touch."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    if n < 1:
        raise DomainError(f"phi undefined for {n}")
    out = n
    for p, _ in _factorize(n):
        out -= out // p
    return out


def mobius_of(n: int) -> int:
    if n < 1:
        raise DomainError(f"mu undefined for {n}")
    out = 1
    for _, e in _factorize(n):
        if e > 1:
            return 0
        out = -out
    return out


# ---------------------------------------------------------------------------
# primality

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit inputs."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# exponential sums over residues


def ramanujan(q: int, a: int) -> complex:
    """c_q(a) = sum over units u mod q of e(au/q).  Direct sum, normative."""
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    u = np.arange(q, dtype=np.int64)
    units = np.gcd(u, q) == 1
    if q == 1:
        units = np.array([True])
    phases = (a % q) * u[units] % q
    return complex(np.exp(2j * np.pi * phases / q).sum())


def tau(a: int, d: int, q: int) -> complex:
    """Direct sum over m in [0, q) with gcd(md+1, q) = 1 of e(ma/q).

    This enumeration is the normative definition; tau_closed_form is the
    independent route used to cross-check it.
    """
    if q < 1 or d < 1:
        raise DomainError(f"need q, d >= 1, got q={q}, d={d}")
    m = np.arange(q, dtype=np.int64)
    keep = np.gcd(m * d + 1, q) == 1
    phases = (a % q) * m[keep] % q
    return complex(np.exp(2j * np.pi * phases / q).sum())


def tau_closed_form(a: int, d: int, q: int) -> complex:
    """Closed form for tau.

    For gcd(d, q) = 1:  c_q(a) * e(+ m_dq * a / q)  with  m_dq = -d^{-1} mod q.
    (The sign of the phase is the plus sign; the substitution h = md+1,
    m = (h-1) d^{-1} makes the direct sum a unit sum with that phase.)

    For g = gcd(d, q) > 1 the qualifying-m indicator is periodic mod q/g, so
    the sum vanishes unless g | a; when g | a it reduces to g times a sum over
    t mod q/g restricted by t != -g^{-1} mod p for each prime p | q, p not
    dividing g, evaluated here by inclusion-exclusion over those primes.
    """
    if q < 1 or d < 1:
        raise DomainError(f"need q, d >= 1, got q={q}, d={d}")
    g = math.gcd(d, q)
    if g == 1:
        m_dq = (-pow(d, -1, q)) % q
        return ramanujan(q, a) * complex(np.exp(2j * np.pi * ((m_dq * (a % q)) % q) / q))
    if a % g != 0:
        return 0.0 + 0.0j
    h = q // g
    if h == 1:
        return complex(g)
    a2 = (a // g) * pow(d // g, -1, h) % h
    outer = [p for p, _ in _factorize(q) if g % p != 0]
    total = 0.0 + 0.0j
    for bits in range(1 << len(outer)):
        e_div = 1
        sign = 1
        for i, p in enumerate(outer):
            if bits >> i & 1:
                e_div *= p
                sign = -sign
        if h % e_div != 0:
            continue
        width = h // e_div
        if a2 % width != 0:
            continue
        t_e = (-pow(g, -1, e_div)) % e_div if e_div > 1 else 0
        total += sign * width * complex(np.exp(2j * np.pi * ((a2 * t_e) % h) / h))
    return g * total


# ---------------------------------------------------------------------------
# Dirichlet characters


@dataclass(frozen=True)
class DirichletCharacter:
    """Dense value table of one character mod q (0 on non-units)."""

    modulus: int
    values: np.ndarray
    is_principal: bool
    label: tuple[int, ...] = field(default=())

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])


def _unit_group_generators(p: int, e: int) -> list[tuple[int, int]]:
    """Generators (g, order) of (Z / p^e Z)^* for a prime power p^e."""
    pe = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(3, 2)]
        return [(pe - 1, 2), (3, pe // 4)]
    # odd p: the group is cyclic; a primitive root mod p^2 works for every e
    phi_p = p - 1
    fac = [f for f, _ in _factorize(phi_p)]
    root = None
    for cand in range(2, p):
        if all(pow(cand, phi_p // f, p) != 1 for f in fac):
            root = cand
            break
    if root is None:  # p = 2 handled above, p = 3 gives root 2; unreachable
        raise DomainError(f"no primitive root found mod {p}")
    if e > 1 and pow(root, p - 1, p * p) == 1:
        root += p
    return [(root % pe, euler_phi(pe))]


def characters_mod(q: int, q_cap: int = 10_000) -> list[DirichletCharacter]:
    """All phi(q) Dirichlet characters mod q as dense value tables.

    Construction: factor q, pick explicit generators of each (Z/p^e)^* (two
    generators for the 2-part when 8 | q), take discrete logs of every unit,
    and exponentiate.  The principal character is first in the returned list.
    """
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if q > q_cap:
        raise ResourceError(f"characters_mod limited to q <= {q_cap}, got {q}")
    if q == 1:
        return [DirichletCharacter(1, np.ones(1, dtype=np.complex128), True, ())]

    factors = _factorize(q)
    gen_specs: list[tuple[int, int, int]] = []  # (generator lifted mod q, order, pe)
    for p, e in factors:
        pe = p**e
        for g, order in _unit_group_generators(p, e):
            # lift to a unit mod q that is g mod p^e and 1 mod q/p^e
            rest = q // pe
            lifted = (g * rest * pow(rest, -1, pe) + pe * pow(pe, -1, rest) if rest > 1 else g) % q
            gen_specs.append((lifted, order, pe))

    orders = [order for _, order, _ in gen_specs]

    # discrete log of each unit with respect to the generator tuple
    dlog: dict[int, tuple[int, ...]] = {}
    exponents = [range(n) for n in orders]
    for exps in product(*exponents):
        u = 1
        for (g, _, _), k in zip(gen_specs, exps):
            u = u * pow(g, k, q) % q
        dlog[u] = exps
    if len(dlog) != euler_phi(q):
        raise PreconditionError(f"generator set for q={q} does not span the units")

    units = sorted(dlog)
    chars = []
    for ks in product(*exponents):
        values = np.zeros(q, dtype=np.complex128)
        for u in units:
            exps = dlog[u]
            angle = sum(k * x / n for k, x, n in zip(ks, exps, orders))
            values[u] = np.exp(2j * np.pi * angle)
        chars.append(
            DirichletCharacter(q, values, all(k == 0 for k in ks), tuple(ks))
        )
    chars.sort(key=lambda c: (not c.is_principal, c.label))
    return chars


# ---------------------------------------------------------------------------
# Chebyshev partial sums


def psi(x: float, q: int, a: int, tables: ArithTables) -> float:
    """psi(x; q, a) = sum of mangoldt(n) over n <= x, n ≡ a (mod q)."""
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if x < 0:
        raise DomainError(f"need x >= 0, got {x}")
    top = int(math.floor(x))
    if top < 1:
        return 0.0
    tables.check_range(top)
    a0 = a % q
    start = a0 if a0 >= 1 else q
    if start > top:
        return 0.0
    return float(tables.mangoldt[start : top + 1 : q].sum())


def psi_chi(x: float, chi: DirichletCharacter, tables: ArithTables) -> complex:
    """psi(x, chi) = sum of chi(n) mangoldt(n) over n <= x."""
    if x < 0:
        raise DomainError(f"need x >= 0, got {x}")
    top = int(math.floor(x))
    if top < 1:
        return 0.0 + 0.0j
    tables.check_range(top)
    q = chi.modulus
    reps = -(-(top + 1) // q)  # ceil
    tiled = np.tile(chi.values, reps)[: top + 1]
    return complex(np.dot(tiled, tables.mangoldt[: top + 1]))


def verify_inversion(x: float, q: int, a: int, tables: ArithTables) -> float:
    """|psi(x; q, a) - (1/phi(q)) sum_chi conj(chi(a)) psi(x, chi)|.

    For gcd(a, q) = 1 orthogonality makes this vanish up to rounding.  For
    non-unit a every chi(a) is 0, so the discrepancy equals the direct class
    mass itself; callers that want the identity should stay on units.
    """
    direct = psi(x, q, a, tables)
    chars = characters_mod(q)
    phi_q = len(chars)
    acc = 0.0 + 0.0j
    for chi in chars:
        acc += np.conj(chi(a)) * psi_chi(x, chi, tables)
    return float(abs(direct - acc / phi_q))


# ---------------------------------------------------------------------------
# synthetic exceptional datum


@dataclass(frozen=True)
class ExceptionalDatum:
    """Synthetic (modulus, zero-location) pair for exercising the
    exceptional-term branch of major-arc predictions.  Not derived from any
    actual zero computation; provenance is always "synthetic"."""

    modulus: int
    beta: float
    provenance: str = "synthetic"

    def __post_init__(self):
        if self.modulus < 2:
            raise DomainError(f"exceptional modulus must be >= 2, got {self.modulus}")
        if not (0.5 < self.beta < 1.0):
            raise DomainError(f"beta must lie in (1/2, 1), got {self.beta}")
        if self.provenance != "synthetic":
            raise DomainError("only synthetic exceptional data are supported")
