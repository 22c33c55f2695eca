"""Modular arithmetic services: Legendre symbols, square roots, CRT, QR-prime
search, and representing values of quadratic forms modulo prime powers.

Everything is exact integer arithmetic.  Primality testing is deterministic
Miller-Rabin below 3.3 * 10^24 and uses the same witness set (probabilistically)
above that range.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from . import matrices as mx
from .errors import (
    NotPrimeError,
    ScanCeilingError,
    UnrepresentableError,
)

# Deterministic Miller-Rabin witnesses for n < 3_317_044_064_679_887_385_961_981.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test (deterministic below ~3.3e24)."""
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
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) via Euler's criterion; p must be an odd prime."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise NotPrimeError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    ls = pow(a, (p - 1) // 2, p)
    return -1 if ls == p - 1 else 1


def sqrt_mod_prime(a: int, p: int) -> int:
    """Smaller square root of a modulo the odd prime p (Tonelli-Shanks)."""
    sym = legendre(a, p)
    if sym == -1:
        raise UnrepresentableError(f"{a} is not a quadratic residue modulo {p}")
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        x = pow(a, (p + 1) // 4, p)
        return min(x, p - x)
    # Tonelli-Shanks: write p - 1 = q * 2^s with q odd.
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    c = pow(z, q, p)
    x = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        t2i = t
        i = 0
        for i in range(1, m):
            t2i = t2i * t2i % p
            if t2i == 1:
                break
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return min(x, p - x)


def crt(residues: list[tuple[int, int]]) -> int:
    """Solution in [0, prod(m_i)) of x = r_i mod m_i for pairwise coprime moduli."""
    if not residues:
        return 0
    x, m = residues[0]
    x %= m
    for r, mod in residues[1:]:
        g = gcd(m, mod)
        if g != 1:
            raise ValueError(f"moduli {m} and {mod} are not coprime")
        # x + m*k = r mod mod
        k = ((r - x) * pow(m, -1, mod)) % mod
        x += m * k
        m *= mod
    return x % m


@dataclass(frozen=True)
class QRConstraint:
    """Integers that must all be quadratic residues modulo the sought prime."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if any(v == 0 for v in vals):
            raise ValueError("constraint values must be nonzero")
        object.__setattr__(self, "values", vals)


def prime_search(
    constraint: QRConstraint,
    minimum: int,
    count: int,
    scan_ceiling: int | None = None,
) -> list[int]:
    """First `count` primes p >= minimum with p = 1 mod 8 and (x|p) = 1 for all x.

    The congruence p = 1 mod 8 makes -1 and 2 automatic residues; the other
    constraint values are tested directly.  Results are in ascending order.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    out: list[int] = []
    start = max(minimum, 3)
    p = start + ((1 - start) % 8)
    while len(out) < count:
        if scan_ceiling is not None and p > scan_ceiling:
            raise ScanCeilingError(
                f"no further primes below the scan ceiling {scan_ceiling}; found {out}"
            )
        if is_prime(p) and all(legendre(x, p) == 1 for x in constraint.values):
            out.append(p)
        p += 8
    return out


def _form_value(gram: mx.Matrix, x: tuple[int, ...], modulus: int) -> int:
    total = 0
    n = len(x)
    for i in range(n):
        if x[i]:
            row = gram[i]
            total += x[i] * sum(row[j] * x[j] for j in range(n))
    return total % modulus


def represent_value(
    gram, c: int, ell: int, k: int
) -> tuple[int, ...]:
    """Vector x with x^T G x = c mod ell^k, by an F_ell solution plus Hensel lifting.

    Requires det(G) nonzero mod ell.  A starting solution is found by scanning
    F_ell^rank; it lifts whenever its gradient 2*G*x is nonzero mod ell, and
    all candidate starting solutions are tried before giving up.
    """
    g = mx.freeze(gram)
    n = len(g)
    if n == 0:
        raise UnrepresentableError("rank-0 form represents nothing")
    if k < 1:
        raise ValueError("precision must be at least 1")
    if ell < 3 or not is_prime(ell):
        raise NotPrimeError(f"{ell} is not an odd prime")
    if mx.det(g) % ell == 0:
        raise UnrepresentableError(
            f"Gram determinant is divisible by {ell}; the mod-{ell} form is degenerate"
        )
    target = c % ell
    starts = [
        x
        for x in itertools.product(range(ell), repeat=n)
        if _form_value(g, x, ell) == target
    ]
    if not starts:
        raise UnrepresentableError(f"form does not represent {c} modulo {ell}")
    for x0 in starts:
        grad = [2 * v % ell for v in mx.mat_vec(g, x0)]
        pivot = next((i for i, v in enumerate(grad) if v), None)
        if pivot is None:
            continue
        inv = pow(grad[pivot], -1, ell)
        x = list(x0)
        modulus = ell
        for _ in range(k - 1):
            residual = (c - _form_value(g, tuple(x), modulus * ell)) % (modulus * ell)
            step = residual // modulus
            t = (step * inv) % ell
            x[pivot] += t * modulus
            modulus *= ell
        result = tuple(v % ell**k for v in x)
        if _form_value(g, result, ell**k) != c % ell**k:
            raise UnrepresentableError("Hensel lifting failed to reach the target precision")
        return result
    raise UnrepresentableError(
        f"every mod-{ell} solution is a singular point of the form; cannot lift"
    )
