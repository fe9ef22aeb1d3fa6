"""Compiled kernels for the modular subresultant chain.

All residues live below 2^30, so a sum of three residue products stays
below 2^62; reduction uses a float reciprocal and one correction step.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _red(x, p, pinv):
    q = np.int64(np.float64(x) * pinv)
    r = x - q * p
    if r < 0:
        r += p
    elif r >= p:
        r -= p
    return r


@njit(cache=True)
def _powmod(b, e, p, pinv):
    r = 1
    while e > 0:
        if e & 1:
            r = _red(r * b, p, pinv)
        b = _red(b * b, p, pinv)
        e >>= 1
    return r


@njit(cache=True)
def chain_leading_coeffs(FA, FD, primes, lcs, degs):
    """Leading coefficients and degrees of the subresultant chain of (f, f').

    FA, FD hold f and f' reduced modulo each prime (one row per prime).
    Fills lcs and degs row by row and returns the chain length, or -1 when
    f has a repeated factor or some prime disagrees with the others.
    """
    K = primes.size
    n = FA.shape[1] - 1
    length = -1
    A = np.empty(n + 1, np.int64)
    B = np.empty(n + 1, np.int64)
    R = np.empty(n + 1, np.int64)
    for k in range(K):
        p = primes[k]
        pinv = 1.0 / p
        da = n
        db = n - 1
        for i in range(n + 1):
            A[i] = FA[k, i]
        for i in range(n):
            B[i] = FD[k, i]
        if A[da] == 0 or B[db] == 0:
            return -1
        lcs[k, 0] = A[da]
        lcs[k, 1] = B[db]
        degs[k, 0] = da
        degs[k, 1] = db
        cnt = 2
        psi = p - 1
        dprev = 0
        while db > 0:
            d = da - db
            g = A[da]
            if cnt == 2:
                beta = 1 if (d + 1) % 2 == 0 else p - 1
            else:
                num = _powmod(p - g, dprev, p, pinv)
                if dprev > 1:
                    den = _powmod(psi, dprev - 1, p, pinv)
                    psi = _red(num * _powmod(den, p - 2, p, pinv), p, pinv)
                else:
                    psi = num
                beta = _red((p - g) * _powmod(psi, d, p, pinv), p, pinv)
            inv = _powmod(beta, p - 2, p, pinv)
            lb = B[db]
            if d == 1:
                # two elimination steps at once, already divided by beta
                top_a = A[da]
                gg = _red(lb * A[da - 1] + (p - top_a) * B[db - 1], p, pinv)
                al = _red(_red(lb * lb, p, pinv) * inv, p, pinv)
                be = _red((p - _red(lb * top_a, p, pinv)) * inv, p, pinv)
                ga = _red((p - gg) * inv, p, pinv)
                R[0] = _red(al * A[0] + ga * B[0], p, pinv)
                for j in range(1, db):
                    R[j] = _red(al * A[j] + ga * B[j] + be * B[j - 1], p, pinv)
            else:
                for i in range(da + 1):
                    R[i] = A[i]
                for i in range(da, db - 1, -1):
                    c = R[i]
                    off = i - db
                    for j in range(i):
                        R[j] = _red(R[j] * lb, p, pinv)
                    if c != 0:
                        for j in range(db):
                            R[off + j] = _red(R[off + j] + (p - c) * B[j], p, pinv)
                for i in range(db):
                    R[i] = _red(R[i] * inv, p, pinv)
            top = db - 1
            while top >= 0 and R[top] == 0:
                top -= 1
            if top < 0:
                return -1
            for i in range(db + 1):
                A[i] = B[i]
            da = db
            for i in range(top + 1):
                B[i] = R[i]
            db = top
            lcs[k, cnt] = B[db]
            degs[k, cnt] = db
            cnt += 1
            dprev = d
        if length == -1:
            length = cnt
        elif length != cnt:
            return -1
        for i in range(cnt):
            if degs[k, i] != degs[0, i]:
                return -1
    return length


@njit(cache=True)
def crt_signs(residues, primes, out):
    """Signs of integers x with |x| < M/2 from their residues (rows = values).

    Garner's mixed-radix digits of x mod M are compared, most significant
    first, with those of (M - 1)/2, which are (p_i - 1)/2.
    """
    K = primes.size
    L = residues.shape[0]
    # prefix_inv[i] = (p_0 ... p_{i-1})^(-1) mod p_i
    prefix_inv = np.empty(K, np.int64)
    cross = np.empty((K, K), np.int64)
    for i in range(K):
        for j in range(i):
            cross[i, j] = primes[j] % primes[i]
    for i in range(K):
        p = primes[i]
        pinv = 1.0 / p
        acc = 1
        for j in range(i):
            acc = _red(acc * cross[i, j], p, pinv)
        prefix_inv[i] = _powmod(acc, p - 2, p, pinv)
    digits = np.empty((K, L), np.int64)
    acc = np.empty(L, np.int64)
    # values in the inner loop are independent, which keeps the pipeline full
    for i in range(K):
        p = primes[i]
        pinv = 1.0 / p
        acc[:] = 0
        for j in range(i - 1, -1, -1):
            c = cross[i, j]
            for v in range(L):
                acc[v] = _red(acc[v] * c + digits[j, v], p, pinv)
        for v in range(L):
            digits[i, v] = _red((residues[v, i] - acc[v] + p) * prefix_inv[i], p, pinv)
    for v in range(L):
        s = 0
        for i in range(K - 1, -1, -1):
            if digits[i, v] != 0:
                s = 1
                break
        if s:
            for i in range(K - 1, -1, -1):
                h = (primes[i] - 1) // 2
                if digits[i, v] < h:
                    break
                if digits[i, v] > h:
                    s = -1
                    break
        out[v] = s
    return out
