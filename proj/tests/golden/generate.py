#!/usr/bin/env python3
# Copyright 2026 The BTDM Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the golden vectors in this directory.

Written independently of the C++ sources: BCH codewords come from integer
polynomial arithmetic over GF(2), symbols from scipy's normal quantile.
"""

import math
import os
import random

import numpy as np
from scipy.stats import norm

HERE = os.path.dirname(os.path.abspath(__file__))

PRIMITIVE = {5: 0b100101, 7: 0b10001001, 8: 0b100011101}


def gf_mul(a, b, m):
    poly = PRIMITIVE[m]
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return out


def gf_pow(a, e, m):
    out = 1
    for _ in range(e):
        out = gf_mul(out, a, m)
    return out


def minimal_poly(e, m):
    n = (1 << m) - 1
    conj = []
    x = e % n
    while x not in conj:
        conj.append(x)
        x = (2 * x) % n
    poly = [1]  # GF(2^m) coefficients, lowest degree first
    for c in conj:
        root = gf_pow(2, c, m)
        nxt = [0] * (len(poly) + 1)
        for i, coef in enumerate(poly):
            nxt[i + 1] ^= coef
            nxt[i] ^= gf_mul(coef, root, m)
        poly = nxt
    assert all(c in (0, 1) for c in poly)
    return sum(c << i for i, c in enumerate(poly)), frozenset(conj)


def gf2_polymul(a, b):
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_polymod(a, g):
    dg = g.bit_length() - 1
    while a and a.bit_length() - 1 >= dg:
        a ^= g << (a.bit_length() - 1 - dg)
    return a


def bch_generator(m, t):
    g, seen = 1, set()
    for i in range(1, 2 * t + 1):
        poly, conj = minimal_poly(i, m)
        if conj & seen:
            continue
        seen |= conj
        g = gf2_polymul(g, poly)
    return g


def bch_golden(name, m, t, n_eff, k_eff, count, rng):
    g = bch_generator(m, t)
    r = g.bit_length() - 1
    assert n_eff - k_eff == r
    with open(os.path.join(HERE, name), "w") as out:
        out.write(f"# m={m} t={t} n={n_eff} k={k_eff} payload_hex codeword_hex\n")
        payloads = [0, (1 << k_eff) - 1] + [rng.getrandbits(k_eff) for _ in range(count - 2)]
        for p in payloads:
            word = (p << r) | gf2_polymod(p << r, g)
            assert gf2_polymod(word, g) == 0
            out.write(f"{p:0{(k_eff + 3) // 4}x} {word:0{(n_eff + 3) // 4}x}\n")


def cube_split(x_odd, x_even, l_odd, l_even):
    def centre(x, l):
        return 0.0 if l == 0 else norm.ppf((2 * x + 1) / 2 ** (l + 1))

    w = complex(centre(x_odd, l_odd), centre(x_even, l_even))
    if w == 0:
        return 0j
    e = math.exp(-abs(w) ** 2 / 2)
    return math.sqrt((1 - e) / (1 + e)) * w / abs(w)


def symbol(bits, t, ell, f=2.0):
    ell1 = int(math.floor(math.log2(t * (t - 1) // 2)))
    parts = 4 * t - 8
    ell2 = ell - ell1
    lens = [ell2 // parts + (1 if i < ell2 % parts else 0) for i in range(parts)]
    idx = int("".join(map(str, bits[:ell1])) or "0", 2)
    pairs = [(p, q) for p in range(t) for q in range(p + 1, t)]
    p, q = pairs[idx]
    pos, xs = ell1, []
    for ln in lens:
        xs.append(int("".join(map(str, bits[pos:pos + ln])) or "0", 2))
        pos += ln
    a = [cube_split(xs[2 * i], xs[2 * i + 1], lens[2 * i], lens[2 * i + 1]) for i in range(parts // 2)]
    a1, a2 = np.array(a[: t - 2]), np.array(a[t - 2:])
    ip = np.vdot(a1, a2)
    u = np.zeros((t, 2), dtype=complex)
    u[p] = [f, -ip / f]
    u[q] = [0, f]
    others = [r for r in range(t) if r not in (p, q)]
    u[others, 0] = a1
    u[others, 1] = a2
    return u / np.linalg.norm(u, axis=0)


def symbol_golden(name, t, ell, count, rng):
    with open(os.path.join(HERE, name), "w") as out:
        out.write(f"# T={t} L=2 ell={ell} f=2 payload_hex then T*2 (re im) pairs, row-major\n")
        for _ in range(count):
            v = rng.getrandbits(ell)
            bits = [int(c) for c in format(v, f"0{ell}b")]
            u = symbol(bits, t, ell)
            nums = " ".join(f"{z.real:.17g} {z.imag:.17g}" for z in u.reshape(-1))
            out.write(f"{v:0{(ell + 3) // 4}x} {nums}\n")


def main():
    rng = random.Random(20260101)
    bch_golden("bch_220_204.txt", 8, 2, 220, 204, 40, rng)
    bch_golden("bch_65_37.txt", 7, 4, 65, 37, 40, rng)
    bch_golden("bch_20_15.txt", 5, 1, 20, 15, 20, rng)
    symbol_golden("symbol_t4_ell10.txt", 4, 10, 20, rng)
    symbol_golden("symbol_t10_ell37.txt", 10, 37, 20, rng)
    symbol_golden("symbol_t30_ell124.txt", 30, 124, 20, rng)


if __name__ == "__main__":
    main()
