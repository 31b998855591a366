"""Hypergeometric parameter data: Dwork primes, the differential operator and
its companion matrix, the hypergeometric series, the residue constants in
both closed forms, and the canonical bases of the formal solution module.

The canonical basis is assembled as a coordinate matrix S(z) over the exact
rationals: columns for the non-unit lower parameters come from the
eigenvector recursion (annihilated by D + b_k - 1), and columns for the
lower parameters equal to 1 are built by an initial-value ODE solve, using
the constant terms forced at z = 0 together with the shift relations
D v_1 = 0, D v_m = -v_{m-1}.  Unique solvability holds because every shift
matrix j*I + N(0) (j >= 1) is invertible: the eigenvalues of N(0) are 0 and
b_j - 1 in (-1, 0].
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, floor

from .errors import (
    HypothesisViolation,
    NotPIntegral,
    PoleInParameters,
    RepeatedNode,
    SingularBasis,
)
from .padics import PAdicRing, frac_vp
from .series import QQ, SeriesMatrix, TruncSeries, solve_regular_ode
from .specfun import gamma_p

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Dwork primes
# ---------------------------------------------------------------------------

def t_shift(alpha, p):
    """The unique integer T in [0, p) with alpha + T ≡ 0 mod p."""
    alpha = Fraction(alpha)
    if alpha.denominator % p == 0:
        raise NotPIntegral(f"{alpha} is not p-integral at p={p}")
    return (-alpha.numerator * pow(alpha.denominator, -1, p)) % p


def dwork_prime(alpha, p, iterations=1):
    """Iterate alpha -> (alpha + T_alpha)/p."""
    a = Fraction(alpha)
    for _ in range(iterations):
        a = (a + t_shift(a, p)) / p
    return a


# ---------------------------------------------------------------------------
# parameter data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HGDatum:
    """Parameter pair (a; b) in Z_(p) with the unit lower parameters (b_j = 1)
    grouped first; s counts them."""

    a: tuple
    b: tuple
    p: int
    s: int

    @property
    def n(self):
        return len(self.a)

    @property
    def a1(self):
        return tuple(dwork_prime(x, self.p) for x in self.a)

    @property
    def b1(self):
        return tuple(dwork_prime(x, self.p) for x in self.b)

    def primed(self):
        return HGDatum(a=self.a1, b=self.b1, p=self.p, s=self.s)

    def mu(self, k):
        """mu_k = p(1 - b_k^(1)) - (1 - b_k), an integer in [0, p)."""
        bk = self.b[k]
        bk1 = dwork_prime(bk, self.p)
        m = self.p * (1 - bk1) - (1 - bk)
        assert m.denominator == 1 and 0 <= m < self.p
        return int(m)

    def c_k(self, k, primed=False):
        """prod_{i != k} (b_k - b_i) over the (possibly primed) lower list."""
        b = self.b1 if primed else self.b
        out = Fraction(1)
        for i, bi in enumerate(b):
            if i != k:
                out *= b[k] - bi
        return out

    def to_json(self):
        return {"a": [str(x) for x in self.a], "b": [str(x) for x in self.b],
                "p": self.p, "s": self.s}


def make_datum(a, b, p):
    """Build an HGDatum, moving unit lower parameters to the front."""
    a = tuple(Fraction(x) for x in a)
    b = tuple(Fraction(x) for x in b)
    if len(a) != len(b):
        raise HypothesisViolation("parameter lists must have equal length")
    ones = tuple(x for x in b if x == 1)
    rest = tuple(x for x in b if x != 1)
    for x in a + b:
        if x == 0 or frac_vp(x, p) < 0:
            raise NotPIntegral(f"parameter {x} is not in Z_(p) for p={p}")
    return HGDatum(a=a, b=ones + rest, p=p, s=len(ones))


def validate(datum, mode):
    """Parameter checks for the two residue-formula regimes."""
    a, b, s = datum.a, datum.b, datum.s
    if mode == "hypothesis":
        if s != 0:
            raise HypothesisViolation("unit lower parameters not allowed here")
        lo = 0
    elif mode == "degenerate":
        if s < 1:
            raise HypothesisViolation("degenerate mode needs some b_j = 1")
        lo = s
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for x in a:
        if not 0 < x < 1:
            raise HypothesisViolation(f"upper parameter {x} outside (0,1)")
    for j in range(lo, len(b)):
        if not 0 < b[j] < 1:
            raise HypothesisViolation(f"lower parameter {b[j]} outside (0,1)")
        for x in a:
            if (x - b[j]).denominator == 1:
                raise HypothesisViolation(
                    f"a_i - b_j integral: {x} - {b[j]}")
    tail = b[lo:]
    if len(set(tail)) != len(tail):
        raise HypothesisViolation(f"lower parameters not distinct: {tail}")
    return True


# ---------------------------------------------------------------------------
# series and operator
# ---------------------------------------------------------------------------

def hg_series(a, b, T, ring=QQ):
    """F(a; b; z) mod z^T by the Pochhammer ratio recursion."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    for x in b:
        if x.denominator == 1 and x <= 0:
            raise PoleInParameters(f"lower parameter {x} in Z_<=0")
    coeffs = [Fraction(1)]
    for i in range(1, T):
        c = coeffs[-1]
        for x in a:
            c *= x + (i - 1)
        for x in b:
            c /= x + (i - 1)
        coeffs.append(c)
    return TruncSeries(ring, [ring(c) for c in coeffs], T)


def _sym_poly_coeffs(xs):
    """Coefficients of prod_i (x + xs_i), little-endian (S_0 .. S_n)."""
    poly = [Fraction(1)]
    for x in xs:
        poly = [Fraction(0)] + poly
        for i in range(len(poly) - 1):
            poly[i] += x * poly[i + 1]
    return poly


def companion(a, b, T, ring=QQ):
    """The series q_0..q_{n-1} with
    P = (1-z)(D^n + q_{n-1} D^{n-1} + ... + q_0) and the companion matrix of
    the D-action on (w, Dw, ..., D^{n-1}w): ones on the subdiagonal, last
    column -q_j.  Identity used: (1-z) q_i = S_i(b-1) - z S_i(a)."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    n = len(a)
    Sb = _sym_poly_coeffs([x - 1 for x in b])
    Sa = _sym_poly_coeffs(a)
    geom = TruncSeries(ring, [ring.one] * T, T)          # 1/(1-z)
    qs = []
    for i in range(n):
        numer = TruncSeries(ring, [ring(Sb[i]), ring(-Sa[i])], T)
        qs.append(numer * geom)
    zero = TruncSeries.zero(ring, T)
    one = TruncSeries.one(ring, T)
    rows = []
    for r in range(n):
        row = [zero] * n
        if r >= 1:
            row[r - 1] = one
        row[n - 1] = row[n - 1] - qs[r]
        rows.append(row)
    NH = SeriesMatrix(ring, rows, T)
    return qs, NH


# ---------------------------------------------------------------------------
# residue constants
# ---------------------------------------------------------------------------

def _plus(x):
    return x if x > 0 else Fraction(1)


def _fracpart(x):
    return Fraction(x) - floor(Fraction(x))


def _gamma_quotient(rational, gamma_num_args, gamma_den_args, p, prec):
    """(exact rational) * prod Gamma_p(num)/prod Gamma_p(den), delivered at
    absolute precision `prec`.  The gamma factors are units, so the needed
    relative precision is prec - v_p(rational), computed exactly up front."""
    v = frac_vp(rational, p)
    rel = max(prec - v, 2)
    ring = PAdicRing(p, rel)
    out = ring(rational)
    for arg in gamma_num_args:
        out = out * gamma_p(arg, rel, p)
    for arg in gamma_den_args:
        out = out / gamma_p(arg, rel, p)
    return out


def gamma_k(datum, k, prec):
    """Residue constant by the counting formula:
    (-1)^Z(b_k) p^(-Z'(b_k')) K'(b_k')/K(b_k) *
    prod_i Gamma_p({b_i-b_k}) / Gamma_p({a_i-b_k});  prec is absolute."""
    a, b, p = datum.a, datum.b, datum.p
    a1, b1 = datum.a1, datum.b1
    bk, bk1 = b[k], b1[k]

    def K(xs, ys, t):
        out = Fraction(1)
        for x in xs:
            out *= _plus(x - t)
        for y in ys:
            out /= _plus(y - t)
        return out

    def Z(xs, ys, t):
        return sum(1 for x in xs if x < t) - sum(1 for y in ys if y < t)

    rational = Fraction(-1) ** Z(a, b, bk) \
        * Fraction(p) ** (-Z(a1, b1, bk1)) \
        * K(a1, b1, bk1) / K(a, b, bk)
    return _gamma_quotient(rational,
                           [_fracpart(bi - bk) for bi in b],
                           [_fracpart(ai - bk) for ai in a], p, prec)


def _pochhammer(x, m):
    out = Fraction(1)
    for i in range(m):
        out *= Fraction(x) + i
    return out


def gamma_k_alt(datum, k, prec):
    """Residue constant by the gamma-quotient form:
    p^-1 prod_i (1-b_k+a_i)_mu / Gamma_p(1-b_k+a_i+mu) *
         prod_j Gamma_p(1-b_k+b_j+mu) / (1-b_k+b_j)_mu;  prec is absolute."""
    a, b, p = datum.a, datum.b, datum.p
    bk = b[k]
    mu = datum.mu(k)
    rational = Fraction(1, p)
    for ai in a:
        rational *= _pochhammer(1 - bk + ai, mu)
    for bj in b:
        rational /= _pochhammer(1 - bk + bj, mu)
    return _gamma_quotient(rational,
                           [1 - bk + bj + mu for bj in b],
                           [1 - bk + ai + mu for ai in a], p, prec)


def gamma_prime_1(datum, prec):
    """p^-s prod_{i>s} (1-b_i^(1))/(1-b_i) * prod_i Gamma_p(b_i)/Gamma_p(a_i)."""
    a, b, p, s = datum.a, datum.b, datum.p, datum.s
    b1 = datum.b1
    rational = Fraction(p) ** (-s)
    for i in range(s, len(b)):
        rational *= (1 - b1[i]) / (1 - b[i])
    return _gamma_quotient(rational, list(b), list(a), p, prec)


def gamma_prime_k(datum, k, prec):
    """gamma_k ((b_k^(1)-1)/(b_k-1))^s prod_{i>s, i!=k} (b_k^(1)-b_i^(1))/(b_k-b_i)."""
    b, b1, s = datum.b, datum.b1, datum.s
    rational = ((b1[k] - 1) / (b[k] - 1)) ** s
    for i in range(s, len(b)):
        if i != k:
            rational *= (b1[k] - b1[i]) / (b[k] - b[i])
    return gamma_k(datum, k, prec - frac_vp(rational, datum.p)) * rational


# ---------------------------------------------------------------------------
# Euler interpolation sums
# ---------------------------------------------------------------------------

def euler_sum(xs, r):
    """sum_k (prod_{j!=k} 1/(x_k-x_j)) x_k^r; 0 for r < m-1, 1 at r = m-1."""
    xs = [Fraction(x) for x in xs]
    if len(set(xs)) != len(xs):
        raise RepeatedNode("nodes must be pairwise distinct")
    total = Fraction(0)
    for k, xk in enumerate(xs):
        w = Fraction(1)
        for j, xj in enumerate(xs):
            if j != k:
                w /= xk - xj
        total += w * xk ** r
    return total


# ---------------------------------------------------------------------------
# canonical bases
# ---------------------------------------------------------------------------

@dataclass
class OmegaBasis:
    """Coordinate matrix S(z) over QQ: column m < s holds the m-th shifted
    column (unit lower parameters), column k >= s the eigenvector column for
    b_k, all in the basis (w, Dw, ..., D^{n-1}w)."""

    datum: HGDatum
    S: SeriesMatrix
    T: int

    def constant_matrix(self):
        return self.S.constant_term()


def _eigen_column(datum, k, T):
    """Coordinates of the eigenvector column for b_k (0-based k >= s)."""
    a, b = datum.a, datum.b
    n = len(a)
    bk = b[k]
    alpha = [1 - bk + x for x in a]
    beta = [1 - bk + x for x in b]
    qs, _ = companion(alpha, beta, T)
    check_G = hg_series([bk - x for x in a], [1 + bk - x for x in b], T)
    y = [None] * n
    y[n - 1] = TruncSeries(QQ, [1, -1], T) * check_G      # (1-z) * series
    for i in range(n - 2, -1, -1):
        y[i] = qs[i + 1] * y[n - 1] - y[i + 1].D()
    coords = []
    eps = bk - 1
    for m in range(n):
        acc = TruncSeries.zero(QQ, T)
        for i in range(m, n):
            acc = acc + y[i] * (comb(i, m) * eps ** (i - m))
        coords.append(acc)
    return coords, y


@lru_cache(maxsize=64)
def omega_hat_basis(datum, T):
    """The canonical basis coordinate matrix; valid for degenerate-mode data
    and for hypothesis-mode data (s = 0).  Cached: the basis is reused across
    lift constants and verification reruns."""
    validate(datum, "degenerate" if datum.s >= 1 else "hypothesis")
    n, s, b = datum.n, datum.s, datum.b
    _, NH = companion(datum.a, datum.b, T)
    cols = []
    if s >= 1:
        # polynomial x^(s-m) prod_{i>s} (x + b_i - 1) gives the z=0 coords
        tailpoly = [Fraction(1)]
        for i in range(s, n):
            tailpoly = [Fraction(0)] + tailpoly
            for j in range(len(tailpoly) - 1):
                tailpoly[j] += (b[i] - 1) * tailpoly[j + 1]
        prev = None
        for m in range(1, s + 1):
            shifted = [Fraction(0)] * (s - m) + tailpoly
            shifted += [Fraction(0)] * (n - len(shifted))
            v0 = [Fraction(-1) ** (m + 1) * shifted[j] for j in range(n)]
            if prev is None:
                rhs = [TruncSeries.zero(QQ, T) for _ in range(n)]
            else:
                rhs = [-c for c in prev]
            col = solve_regular_ode(0, NH, rhs, v0)
            cols.append(col)
            prev = col
    for k in range(s, n):
        coords, _ = _eigen_column(datum, k, T)
        cols.append(coords)
    S = SeriesMatrix(QQ, [[cols[j][i] for j in range(n)] for i in range(n)], T)
    const = S.constant_term()
    det = _det_frac(const)
    if det == 0:
        raise SingularBasis("constant-term matrix is singular")
    log.debug("omega basis built: n=%d s=%d det S(0)=%s", n, s, det)
    return OmegaBasis(datum=datum, S=S, T=T)


def _det_frac(rows):
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def omega_apply(datum, k, j, T):
    """Apply the operator column for b_k to the conjugated solution for b_j:
    sum_i y_i^[k] (D + b_k - b_j)^i applied to G_j.  Equals the constant
    prod_{i != k}(b_i - b_k) when j = k, and 0 for j != k (distinct-mode)."""
    a, b = datum.a, datum.b
    n = len(a)
    _, y = _eigen_column(datum, k, T)
    Gj = hg_series([1 - b[j] + x for x in a], [1 - b[j] + x for x in b], T)
    shift = b[k] - b[j]
    acc = TruncSeries.zero(QQ, T)
    for i in range(n):
        term = Gj
        for _ in range(i):
            term = term.D() + term * shift
        acc = acc + y[i] * term
    return acc
