"""Generalized Dwork pencils: parameter lists, cancelled lists, the residue
matrix with its symbolic root-of-unity normalization, and brute-force point
counting oracles over small finite fields for geometric validation.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import kernels
from .errors import (
    BadWeights,
    BudgetExceeded,
    PDividesParameter,
    SingularFiber,
)
from .frobenius import FrobeniusMatrix, residue_matrix
from .hypergeom import make_datum
from .lvalues import padic_log_of_integer
from .padics import PAdicNumber
from .specfun import loop_budget, psi_p_value

log = logging.getLogger(__name__)


def _lcm(*xs):
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


@dataclass(frozen=True)
class PencilSpec:
    """Weighted-diagonal pencil data and the derived hypergeometric lists."""

    n: int
    d: int
    w: tuple
    p: int
    a: tuple                   # full upper list (1/d, ..., (d-1)/d)
    b: tuple                   # full lower list (n ones, then j/w_i)
    a_c: tuple                 # cancelled lists
    b_c: tuple
    s: int

    @property
    def d_prime(self):
        return len(self.a_c)

    @property
    def epsilon_order(self):
        """Order bound for the normalization root of unity."""
        return _lcm(4, self.d_prime, self.d, *self.w)

    def to_json(self):
        return {"n": self.n, "d": self.d, "w": list(self.w), "p": self.p,
                "a": [str(x) for x in self.a], "b": [str(x) for x in self.b],
                "a_cancelled": [str(x) for x in self.a_c],
                "b_cancelled": [str(x) for x in self.b_c],
                "s": self.s, "epsilon_order": self.epsilon_order}


def katz_lists(n, d, w, p):
    """Parameter lists of the weighted pencil
    w_0 x_0^d + ... + w_n x_n^d - lambda d x_0^{w_0} ... x_n^{w_n}."""
    w = tuple(int(x) for x in w)
    if len(w) != n + 1 or any(x <= 0 for x in w) or sum(w) != d or d <= n:
        raise BadWeights(f"need n+1 positive weights summing to d > n; "
                         f"got n={n}, d={d}, w={w}")
    g = 0
    for x in w:
        g = gcd(g, x)
    if g != 1:
        raise BadWeights(f"gcd of weights is {g}, must be 1")
    if d % p == 0 or any(x % p == 0 for x in w):
        raise PDividesParameter(f"p={p} divides d or a weight")
    a = tuple(Fraction(k, d) for k in range(1, d))
    ones = tuple(Fraction(1) for _ in range(n))
    rest = tuple(Fraction(j, wi) for wi in w for j in range(1, wi))
    b = ones + rest
    assert len(a) == len(b) == d - 1
    # multiset cancellation of common entries
    from collections import Counter
    ca, cb = Counter(a), Counter(b)
    common = ca & cb
    a_c = []
    cc = common.copy()
    for x in a:
        if cc[x] > 0:
            cc[x] -= 1
        else:
            a_c.append(x)
    cc = common.copy()
    b_c = []
    for x in b:
        if cc[x] > 0:
            cc[x] -= 1
        else:
            b_c.append(x)
    return PencilSpec(n=n, d=d, w=w, p=p, a=a, b=b,
                      a_c=tuple(a_c), b_c=tuple(b_c), s=n)


@dataclass
class KatzFrobenius:
    """Residue matrix of a pencil, normalized up to the symbolic root of
    unity (order dividing epsilon_order); the matrix itself is the canonical
    one with the first shifted column fixed."""

    spec: PencilSpec
    matrix: FrobeniusMatrix
    epsilon_order: int
    L: PAdicNumber                   # the distinguished log combination
    odd_reflection_zero: bool        # psi^(r) vanishing for odd r, checked

    def to_json(self):
        return {"spec": self.spec.to_json(),
                "epsilon_order": self.epsilon_order,
                "L": self.L.to_json(),
                "odd_reflection_zero": self.odd_reflection_zero,
                "matrix": self.matrix.to_json()}


def katz_frobenius(spec, c, T, prec):
    """Residue matrix for the cancelled datum; requires pairwise coprime
    weights so the non-unit lower parameters are pairwise distinct."""
    for i in range(len(spec.w)):
        for j in range(i + 1, len(spec.w)):
            if gcd(spec.w[i], spec.w[j]) != 1:
                raise BadWeights("weights must be pairwise coprime here")
    p = spec.p
    datum = make_datum(spec.a_c, spec.b_c, p)
    fm = residue_matrix(datum, c, "degenerate", T, prec)
    # L = -d p^-1 log(d^(p-1)) + sum_{w_i>1} w_i p^-1 log(w_i^(p-1))
    L = padic_log_of_integer(spec.d, prec + 2, p) * (-spec.d)
    for wi in spec.w:
        if wi > 1:
            L = L + padic_log_of_integer(wi, prec + 2, p) * wi
    # reflection vanishing of the odd-order polygamma sums (both lists are
    # stable under x -> 1-x), which places the coefficients in the ring
    # generated by L and odd zeta values
    odd_zero = True
    for r in range(1, max(spec.s, 2), 2):
        v = psi_p_value(r, spec.a_c, spec.b_c, prec, p)
        if not v.is_zero():
            odd_zero = False
    return KatzFrobenius(spec=spec, matrix=fm,
                         epsilon_order=spec.epsilon_order, L=L,
                         odd_reflection_zero=odd_zero)


# ---------------------------------------------------------------------------
# finite fields (table-coded) and point counts
# ---------------------------------------------------------------------------

def _fp_poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _fp_poly_mod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return a[:dm] + [0] * max(0, dm - len(a[:dm]))


def _find_irreducible(p, e):
    """Monic irreducible of degree e over F_p (naive: no factor of
    degree <= e//2); e is small here."""
    import itertools
    def poly_pow_mod(base, exp, mod):
        result = [1]
        b = base
        while exp:
            if exp & 1:
                result = _fp_poly_mod(_fp_poly_mul(result, b, p), mod, p)
            b = _fp_poly_mod(_fp_poly_mul(b, b, p), mod, p)
            exp >>= 1
        return result
    for tail in itertools.product(range(p), repeat=e):
        m = list(tail) + [1]
        if m[0] == 0:
            continue
        # x^(p^k) ≡ x mod m has gcd criterion; cheap version: m irreducible
        # iff x^(p^e) ≡ x and x^(p^(e/l)) != x for prime l | e
        xq = poly_pow_mod([0, 1], p ** e, m)
        if (xq[1] - 1) % p != 0 or any(c % p for i, c in enumerate(xq)
                                       if i != 1):
            continue
        good = True
        for l in {f for f, _ in _small_factor(e)}:
            xr = poly_pow_mod([0, 1], p ** (e // l), m)
            same = (xr[1] - 1) % p == 0 and all(
                c % p == 0 for i, c in enumerate(xr) if i != 1)
            if same:
                good = False
                break
        if good:
            return m
    raise BadWeights(f"no irreducible of degree {e} found (p={p})")


def _small_factor(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


class FqTables:
    """F_{p^e} with elements coded 0..q-1 (base-p digit packing) and dense
    add/mul/neg tables for the counting kernels."""

    def __init__(self, p, e):
        self.p = p
        self.e = e
        self.q = p ** e
        q = self.q
        if e == 1:
            add = (np.arange(q)[:, None] + np.arange(q)[None, :]) % p
            mul = (np.arange(q)[:, None] * np.arange(q)[None, :]) % p
            neg = (-np.arange(q)) % p
        else:
            m = _find_irreducible(p, e)
            def decode(x):
                out = []
                for _ in range(e):
                    out.append(x % p)
                    x //= p
                return out
            def encode(cs):
                out = 0
                for c in reversed(cs[:e]):
                    out = out * p + c
                return out
            add = np.empty((q, q), np.int64)
            mul = np.empty((q, q), np.int64)
            neg = np.empty(q, np.int64)
            polys = [decode(x) for x in range(q)]
            for x in range(q):
                neg[x] = encode([(-c) % p for c in polys[x]])
                for y in range(q):
                    add[x, y] = encode([(cx + cy) % p for cx, cy
                                        in zip(polys[x], polys[y])])
                    prod = _fp_poly_mod(_fp_poly_mul(polys[x], polys[y], p),
                                        m, p)
                    mul[x, y] = encode(prod)
        self.add = add.astype(np.int64)
        self.mul = mul.astype(np.int64)
        self.neg = neg.astype(np.int64)

    def power_table(self, exponent):
        out = np.empty(self.q, np.int64)
        for x in range(self.q):
            acc = 1
            b = x
            ee = exponent
            while ee:
                if ee & 1:
                    acc = self.mul[acc, b]
                b = self.mul[b, b]
                ee >>= 1
            out[x] = acc if exponent > 0 else 1
        return out

    def embed_int(self, k):
        """Image of an integer (prime subfield)."""
        return k % self.p

    def pow_int(self, x, exponent):
        acc = 1
        b = x
        while exponent:
            if exponent & 1:
                acc = int(self.mul[acc, b])
            b = int(self.mul[b, b])
            exponent >>= 1
        return acc


def point_count(spec, lam0, e=1):
    """Exact number of projective points of the pencil fiber at lambda =
    lam0 over F_{p^e}, by exhaustive enumeration of the affine cone."""
    p = spec.p
    fq = FqTables(p, e)
    q = fq.q
    nvars = spec.n + 1
    if q ** nvars > loop_budget():
        raise BudgetExceeded(f"q^(n+1) = {q}^{nvars} over budget")
    lam = int(lam0) % q if e == 1 else int(lam0) % q
    # smooth iff lambda^d != 1
    if fq.pow_int(lam, spec.d) == 1:
        raise SingularFiber(f"lambda^d = 1 at lambda={lam0}")
    powd = fq.power_table(spec.d)
    poww = np.stack([fq.power_table(wi) for wi in spec.w])
    wcodes = np.array([wi % p for wi in spec.w], np.int64)
    dlam = int(fq.mul[spec.d % p, lam])
    cone = kernels.cone_count(fq.add, fq.mul, fq.neg, powd, poww,
                              wcodes, dlam, q, nvars)
    assert (cone - 1) % (q - 1) == 0
    return (cone - 1) // (q - 1)


def legendre_ap(lam0, p):
    """a_p of y^2 = x(x-1)(x-lam0) by the quadratic-character sum."""
    lam = lam0 % p
    if lam in (0, 1):
        raise SingularFiber(f"lambda = {lam} is a singular Legendre fiber")
    return -kernels.legendre_sum(p, lam)
