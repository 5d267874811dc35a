"""Exact integer and rational primitives shared by all modules.

Integers are plain Python ints (arbitrary precision); rationals are
``fractions.Fraction`` (always stored reduced, positive denominator).
Everything here is pure and thread-safe.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError

__all__ = [
    "kronecker",
    "is_prime",
    "isqrt",
    "exact_sqrt_fraction",
    "squarefree_part",
    "factorize",
    "primes_up_to",
]

# Deterministic Miller-Rabin witnesses, correct for n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_DIVISION_LIMIT = 10**6
_FACTOR_BOUND = 10**7


def isqrt(n: int) -> int:
    """Floor of the square root of n >= 0."""
    if n < 0:
        raise DomainError("isqrt of negative integer")
    return math.isqrt(n)


def kronecker(a: int, n: int) -> int:
    """Extended Kronecker symbol (a|n), multiplicative in both arguments."""
    if n == 0:
        raise DomainError("kronecker symbol undefined for n = 0")
    if n < 0:
        sign = -1 if a < 0 else 1
        return sign * kronecker(a, -n)
    # split off the even part of n via (a|2)
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    # Jacobi symbol for odd n > 1 by quadratic reciprocity
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin with fixed witnesses below 3.3e24)."""
    if n < 0:
        raise DomainError("is_prime expects n >= 0")
    if n < 2:
        return False
    if n < _TRIAL_DIVISION_LIMIT:
        if n % 2 == 0:
            return n == 2
        d = 3
        while d * d <= n:
            if n % d == 0:
                return False
            d += 2
        return True
    if n % 2 == 0:
        return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit by sieve."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i in range(2, limit + 1) if sieve[i]]


def factorize(n: int, bound: int = _FACTOR_BOUND) -> list[tuple[int, int]]:
    """Factor |n| by trial division up to `bound`; raises if a cofactor survives.

    Desk-scale inputs (discriminants, small norms) stay far below the bound.
    """
    n = abs(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    out: list[tuple[int, int]] = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
    d = 5
    while d * d <= n and d <= bound:
        for q in (d, d + 2):
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            if e:
                out.append((q, e))
        d += 6
    if n > 1:
        if n > bound * bound and not is_prime(n):
            raise DomainError(f"factorization bound {bound} exceeded for residue {n}")
        out.append((n, 1))
    return out


def squarefree_part(n: int) -> int:
    """Squarefree part of n (sign preserved)."""
    if n == 0:
        raise DomainError("squarefree part of 0")
    s = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(n):
        if e % 2 == 1:
            out *= p
    return s * out


def exact_sqrt_fraction(q: Fraction) -> Fraction:
    """Square root of a rational that must be a perfect square of a rational."""
    if q < 0:
        raise DomainError("square root of negative rational")
    rn, rd = isqrt(q.numerator), isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        raise DomainError(f"{q} is not the square of a rational")
    return Fraction(rn, rd)
