"""Small prime-number utilities shared across the package.

Everything here is deterministic.  ``is_prime`` is a Miller-Rabin test with
a fixed witness set that is exact for every number below 3.3 * 10**24, far
beyond anything the symbolic layer constructs.
"""

from __future__ import annotations

from itertools import count
from typing import Iterator

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Deterministic for n < 3_317_044_064_679_887_385_961_981 (Sorenson & Webster).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
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


def ensure_prime(n: object, context: str = "prime") -> int:
    """Validate that ``n`` is a prime number and return it."""
    if not isinstance(n, int) or isinstance(n, bool) or not is_prime(n):
        raise ValueError(f"{context}: {n!r} is not a prime number")
    return n


def primes() -> Iterator[int]:
    """All primes in increasing order."""
    for n in count(2):
        if is_prime(n):
            yield n


def first_primes_excluding(count_: int, excluded: frozenset[int] | set[int]) -> tuple[int, ...]:
    """The first ``count_`` primes not in ``excluded``, in increasing order."""
    out = []
    for p in primes():
        if p not in excluded:
            out.append(p)
            if len(out) == count_:
                break
    return tuple(out)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 as {prime: exponent} (trial division)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def p_valuation(n: int, p: int) -> int:
    """Largest e with p**e dividing n (n != 0)."""
    if n == 0:
        raise ValueError("valuation of 0 is unbounded")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e
