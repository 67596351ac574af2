"""Compiled inner loops for bulk stream generation.

These mirror :func:`ciprng.prng.ci_round` and :func:`ciprng.prng.legacy_round`
draw for draw; the tests check both paths produce identical outputs.
"""
import numpy as np
from numba import njit

_MASK32 = np.uint32(0xFFFFFFFF)


@njit(cache=True, inline="always")
def _next(z):
    z ^= (z << np.uint32(13)) & _MASK32
    z ^= z >> np.uint32(17)
    z ^= (z << np.uint32(5)) & _MASK32
    return z


@njit(cache=True)
def ci_rounds(images, n, b, z, x, rounds):
    out = np.empty(rounds, dtype=np.int64)
    z = np.uint32(z)
    un = np.uint32(n)
    for r in range(rounds):
        z = _next(z)
        k = b + np.int64(z & np.uint32(1))
        for _ in range(k):
            z = _next(z)
            s = np.int64(z % un)  # 0-based component
            m = np.int64(1) << (n - 1 - s)
            x = (x & ~m) | (images[x] & m)
        out[r] = x
    return out, np.int64(z), x


@njit(cache=True)
def legacy_rounds(images, n, bounds, modulus, z, x, rounds):
    out = np.empty(rounds, dtype=np.int64)
    z = np.uint32(z)
    comps = np.empty(n, dtype=np.int64)
    for r in range(rounds):
        z = _next(z)
        draw = np.int64(z % np.uint32(modulus))
        k = 0
        while draw >= bounds[k]:
            k += 1
        for j in range(n):
            comps[j] = j
        for j in range(k):
            z = _next(z)
            pick = j + np.int64(z % np.uint32(n - j))
            tmp = comps[j]
            comps[j] = comps[pick]
            comps[pick] = tmp
            m = np.int64(1) << (n - 1 - comps[j])
            x = (x & ~m) | (images[x] & m)
        out[r] = x
    return out, np.int64(z), x
