"""Exact Sturm-sequence real root counting.

Real double-precision coefficients are dyadic rationals, so after a common
power-of-two scaling the polynomial has integer coefficients and the Sturm
chain can be built without rounding.  The chain is produced by the
subresultant pseudo-remainder sequence, which keeps coefficient growth
polynomial; each element is a known-sign multiple of the classical Sturm
polynomial, so sign variations are unchanged.

Counting over the whole line only needs the leading coefficients of the
chain.  ``_count_all_real_modular`` computes them modulo a batch of word-size
primes at once and reconstructs their integer signs by Chinese remaindering,
with enough primes to cover the Hadamard bound on subresultant coefficients.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._modkernels import chain_leading_coeffs, crt_signs
from .poly import DomainError, Polynomial

IntPoly = list  # low -> high integer coefficients


def integer_coeffs(P: Polynomial) -> IntPoly:
    """Exact integer multiple (positive factor) of a real-coefficient P."""
    if not P.is_real:
        raise DomainError("Sturm counting needs real coefficients")
    ratios = [float(c).as_integer_ratio() for c in P.coeffs.real]
    den = max(d for _, d in ratios)
    ints = [n * (den // d) for n, d in ratios]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints] if g > 1 else ints


def _trim(a: IntPoly) -> IntPoly:
    while a and a[-1] == 0:
        a.pop()
    return a


def _derivative(a: IntPoly) -> IntPoly:
    return [k * a[k] for k in range(1, len(a))]


def _prem(a: IntPoly, b: IntPoly) -> IntPoly:
    """lc(b)^(deg a - deg b + 1) * a  mod  b."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i]
        off = i - db
        r = [lb * x for x in r[:i]]
        if c:
            for j in range(db):
                r[off + j] -= c * b[j]
    return _trim(r)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_chain(f: IntPoly) -> list[IntPoly]:
    """Sturm chain of f, each element a positive multiple of the classical one.

    The last element is a constant multiple of gcd(f, f').
    """
    f = _trim(list(f))
    if not f:
        raise DomainError("zero polynomial has no Sturm chain")
    if len(f) == 1:
        return [f]
    chain = [f, _derivative(f)]
    signs = [1, 1]
    psi = -1
    dprev = None
    while len(chain[-1]) > 1:
        a, b = chain[-2], chain[-1]
        # chain holds sign-corrected copies; undo to recover subresultant R_{i-1}, R_i
        ra = a if signs[-2] > 0 else [-x for x in a]
        rb = b if signs[-1] > 0 else [-x for x in b]
        d = len(ra) - len(rb)
        if dprev is None:
            beta = (-1) ** (d + 1)
        else:
            psi = (-ra[-1]) ** dprev // psi ** (dprev - 1)
            beta = -ra[-1] * psi**d
        r = _prem(ra, rb)
        if not r:
            break
        q = [x // beta for x in r]
        s = -signs[-2] * _sign(beta) * _sign(rb[-1]) ** (d + 1)
        chain.append(q if s > 0 else [-x for x in q])
        signs.append(s)
        dprev = d
    return chain


def _primitive(a: IntPoly) -> IntPoly:
    g = 0
    for x in a:
        g = math.gcd(g, x)
    if a[-1] < 0:
        g = -g
    return [x // g for x in a]


def _exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    """Quotient a / b when b divides a over Z (b primitive)."""
    a = list(a)
    db = len(b) - 1
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c, rem = divmod(a[i], b[-1])
        if rem:
            raise ArithmeticError("inexact polynomial division")
        q[i - db] = c
        if c:
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    if any(a[:db]):
        raise ArithmeticError("inexact polynomial division")
    return q


def gcd_with_derivative(f: IntPoly) -> IntPoly:
    if len(f) <= 1:
        return [1]
    return _primitive(sturm_chain(f)[-1])


def squarefree_part(f: IntPoly) -> IntPoly:
    g = gcd_with_derivative(f)
    return _primitive(f) if len(g) == 1 else _primitive(_exact_div(f, g))


def _sign_at(a: IntPoly, x) -> int:
    """Sign of a(x) for x a Fraction or +-inf."""
    if x == math.inf:
        return _sign(a[-1])
    if x == -math.inf:
        return _sign(a[-1]) * (-1) ** (len(a) - 1)
    u, v = x.numerator, x.denominator
    # sign of v^d a(u/v) = sum a_k u^k v^(d-k), v > 0
    acc = 0
    vp = 1
    for c in reversed(a):
        acc = acc * u + c * vp
        vp *= v
    return _sign(acc)


def _variations(signs) -> int:
    s = [x for x in signs if x]
    return sum(1 for p, q in zip(s, s[1:]) if p != q)


def _as_point(x):
    if isinstance(x, float) and math.isinf(x):
        return x
    return Fraction(x)


def distinct_real_roots(f: IntPoly, a=-math.inf, b=math.inf) -> int:
    """Number of distinct real roots of f in (a, b]."""
    f = _trim(list(f))
    if len(f) <= 1:
        return 0
    chain = sturm_chain(squarefree_part(f))
    a, b = _as_point(a), _as_point(b)
    if not a < b:
        raise DomainError("need a < b")
    return _variations([_sign_at(c, a) for c in chain]) - _variations(
        [_sign_at(c, b) for c in chain]
    )


def real_roots_with_multiplicity(f: IntPoly, a=-math.inf, b=math.inf) -> int:
    """Real roots of f in (a, b] counted with multiplicity.

    A root of multiplicity m is a root of each of f, gcd(f, f'), ... m times.
    """
    total = 0
    g = _trim(list(f))
    while len(g) > 1:
        total += distinct_real_roots(g, a, b)
        g = gcd_with_derivative(g)
    return total


def sturm_count(P: Polynomial, a: float, b: float) -> int:
    """Distinct real roots of P in (a, b]."""
    if not a < b:
        raise DomainError("need a < b")
    return distinct_real_roots(integer_coeffs(P), a, b)


# modular fast path for whole-line counts


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
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


@lru_cache(maxsize=1)
def _prime_table(count: int = 2048) -> tuple[int, ...]:
    out = []
    # below 2^30 so that a sum of three residue products fits in int64
    p = (1 << 30) - 1
    while len(out) < count:
        if _is_prime(p):
            out.append(p)
        p -= 2
    return tuple(out)


def _primes_for_bits(bits: float) -> list[int]:
    table = _prime_table()
    out, acc = [], 0.0
    for p in table:
        if acc > bits:
            break
        out.append(p)
        acc += math.log2(p)
    else:
        raise OverflowError("coefficients too large for the modular Sturm path")
    return out


def _residues(a: IntPoly, P: np.ndarray) -> np.ndarray:
    if max(abs(x) for x in a) < 2**62:
        return np.array(a, dtype=np.int64)[None, :] % P[:, None]
    return np.array([[x % int(p) for x in a] for p in P], dtype=np.int64)


def _count_all_real_modular(f: IntPoly):
    """Distinct real roots of integer f over the whole line.

    Returns None when f is not square-free or when a prime turns out to be
    unlucky, in which case the caller uses the exact integer chain.
    """
    n = len(f) - 1
    df = _derivative(f)
    norm_f = math.log2(math.sqrt(sum(x * x for x in f)))
    norm_df = math.log2(math.sqrt(sum(x * x for x in df)))
    # Hadamard bound on every subresultant coefficient, two bits of headroom
    bits = max(n - 1, 0) * norm_f + n * norm_df + 2
    P = np.array(_primes_for_bits(bits), dtype=np.int64)
    lcs = np.zeros((P.size, n + 1), dtype=np.int64)
    degs = np.zeros((P.size, n + 1), dtype=np.int64)
    length = chain_leading_coeffs(_residues(f, P), _residues(df, P), P, lcs, degs)
    if length < 0:
        return None
    rows = np.ascontiguousarray(lcs[:, :length].T)
    lc_signs = crt_signs(rows, P, np.empty(length, np.int64)).tolist()
    degrees = degs[0, :length].tolist()
    # sign corrections turning subresultants into Sturm polynomials
    c = [1, 1]
    psi_sign = -1
    dprev = None
    for i in range(1, len(degrees) - 1):
        d = degrees[i - 1] - degrees[i]
        if dprev is None:
            beta_sign = (-1) ** (d + 1)
        else:
            psi_sign = (-lc_signs[i - 1]) ** dprev * psi_sign ** (dprev - 1)
            beta_sign = -lc_signs[i - 1] * psi_sign**d
        c.append(-c[i - 1] * beta_sign * lc_signs[i] ** (d + 1))
        dprev = d
    top = [ci * si for ci, si in zip(c, lc_signs)]
    bottom = [t * (-1) ** dg for t, dg in zip(top, degrees)]
    return _variations(bottom) - _variations(top)


def count_real_integer(f: IntPoly) -> int:
    """Real roots of integer polynomial f with multiplicity."""
    f = _trim(list(f))
    if len(f) <= 1:
        return 0
    try:
        fast = _count_all_real_modular(f)
    except OverflowError:
        fast = None
    if fast is not None:
        return fast
    return real_roots_with_multiplicity(f)
