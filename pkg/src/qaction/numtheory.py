"""Primes, trial-division factorization and the Fock-label bijection.

A cavity eigenstate is labeled by the photon numbers ``m_i`` in the modes
of frequency ``omega * log q_i``; the multiset ``{(q_i, m_i)}`` is the
prime factorization of the natural number ``N = prod q_i ** m_i``.
Everything here is exact integer arithmetic except :func:`cavity_energy`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QactionError

INT_WIDTH = 64
MAX_LABEL = 2 ** (INT_WIDTH - 1) - 1


class LabelOverflowError(QactionError, OverflowError):
    pass


def primes_up_to(q_max: int) -> list[int]:
    """All primes ``<= q_max`` in ascending order (sieve of Eratosthenes)."""
    q_max = int(q_max)
    if q_max < 2:
        raise ValueError(f"q_max must be >= 2, got {q_max}")
    sieve = np.ones(q_max + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(q_max) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve).tolist()


_prime_cache: list[int] = primes_up_to(1000)


def _small_primes(limit: int) -> list[int]:
    global _prime_cache
    if _prime_cache[-1] < limit:
        _prime_cache = primes_up_to(max(limit, 2 * _prime_cache[-1]))
    return _prime_cache


_DIVISOR_CHECK_LIMIT = 10**6


def _has_no_small_divisor(q: int) -> bool:
    # exact primality for q <= 1e12; larger q only screened up to 1e6
    if q < 2:
        return False
    root = math.isqrt(q)
    for p in _small_primes(min(root, _DIVISOR_CHECK_LIMIT)):
        if p > root:
            break
        if q % p == 0:
            return False
    return True


@dataclass(frozen=True)
class FockLabel:
    """Occupation structure of a cavity eigenstate.

    ``factors`` holds ``(prime, exponent)`` pairs with strictly increasing
    primes and exponents ``>= 1``; the empty tuple is the vacuum. Primality
    is verified by trial division (complete for primes up to 1e12).
    """

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        facs = tuple((int(q), int(m)) for q, m in self.factors)
        prev = 1
        for q, m in facs:
            if q <= prev:
                raise ValueError("primes must be strictly increasing")
            if m < 1:
                raise ValueError("exponents must be >= 1")
            if not _has_no_small_divisor(q):
                raise ValueError(f"{q} is not prime")
            prev = q
        object.__setattr__(self, "factors", facs)

    @property
    def is_vacuum(self) -> bool:
        return not self.factors

    @property
    def photon_count(self) -> int:
        return sum(m for _, m in self.factors)

    def occupations(self) -> dict[int, int]:
        return dict(self.factors)

    @classmethod
    def _trusted(cls, factors: tuple[tuple[int, int], ...]) -> "FockLabel":
        # factorization output is prime and ordered by construction
        obj = object.__new__(cls)
        object.__setattr__(obj, "factors", factors)
        return obj


def fock_label_from_integer(n: int) -> FockLabel:
    """Factor ``n`` by trial division over primes up to ``sqrt(n)``."""
    if int(n) != n or n < 1:
        raise ValueError(f"label must be a natural number, got {n!r}")
    n = int(n)
    if n > MAX_LABEL:
        raise LabelOverflowError(f"{n} exceeds the {INT_WIDTH}-bit label width")
    factors = []
    rest = n
    root = math.isqrt(rest)
    for p in _small_primes(min(root, 10**6)):
        if p > root:
            break
        if rest % p == 0:
            m = 0
            while rest % p == 0:
                rest //= p
                m += 1
            factors.append((p, m))
            root = math.isqrt(rest)
    else:
        # beyond the cached primes: odd trial divisors
        p = _prime_cache[-1] + 2
        while p <= root:
            if rest % p == 0:
                m = 0
                while rest % p == 0:
                    rest //= p
                    m += 1
                factors.append((p, m))
                root = math.isqrt(rest)
            p += 2
    if rest > 1:
        factors.append((rest, 1))
    return FockLabel._trusted(tuple(factors))


def integer_from_fock_label(label: FockLabel) -> int:
    """``prod q ** m`` with overflow detection against the label width."""
    n = 1
    for q, m in label.factors:
        n *= q**m
        if n > MAX_LABEL:
            raise LabelOverflowError(f"label {label.factors} overflows {INT_WIDTH}-bit width")
    return n


def cavity_energy(n: int, omega: float = 1.0) -> float:
    """Energy ``omega * log n`` of the cavity eigenstate with label ``n``.

    Computed as the mode sum ``omega * sum m_i log q_i`` and checked
    against ``omega * log n`` to 1e-12 relative. Natural logarithm.
    """
    if n < 1:
        raise ValueError(f"label must be >= 1, got {n}")
    label = fock_label_from_integer(n)
    mode_sum = math.fsum(m * math.log(q) for q, m in label.factors)
    direct = math.log(n)
    if abs(mode_sum - direct) > 1e-12 * max(direct, 1e-300):
        raise ArithmeticError(f"mode sum {mode_sum!r} disagrees with log({n}) = {direct!r}")
    return omega * mode_sum


def largest_prime_factor(n: int) -> int:
    facs = fock_label_from_integer(n).factors
    return facs[-1][0] if facs else 1
