"""p-adic gamma, p-adic polygamma, p-adic beta, and the coefficient sequences
of the exponential generating series used by the Frobenius residue formulas.

Evaluation strategy: a single pass over k < n with n ≡ z mod p^K (kernels.py
does the modular loop).  Certification: the value at any better approximant
n' ≡ n mod p^K differs from the value at n by a multiple of an explicitly
computed full-cycle quantity (the product, resp. sum, over all units modulo
p^K), because the defining factors/terms only depend on k mod p^K.  The
number of certified digits is therefore the valuation of that cycle quantity.
This realizes the two-run agreement check exactly, at O(1) amortized cost;
the cycle quantities are cached per (p, K[, order]).
"""

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .errors import (
    BracketPoleAtOne,
    BudgetExceeded,
    NonIntegralArgument,
)
from .padics import PAdicNumber, PAdicRing, frac_vp, vp

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 8


def loop_budget():
    v = os.environ.get("PADHG_MAX_BUDGET")
    return int(v) if v else DEFAULT_BUDGET


_gamma_tables = {}
_power_tables = {}
_gamma_cycles = {}
_power_cycles = {}
_call_counts = {}

# prefix tables pay off from the second call on; keep totals bounded
_TABLE_MIN = 10 ** 5
_TABLE_ENTRY_BUDGET = kernels.TABLE_CAP


def _maybe_table(kind, key, builder, length):
    if length < _TABLE_MIN or length > _TABLE_ENTRY_BUDGET:
        return None
    store = _gamma_tables if kind == "gamma" else _power_tables
    if key in store:
        return store[key]
    _call_counts[key] = _call_counts.get(key, 0) + 1
    if _call_counts[key] < 2:
        return None
    total = sum(t.size for t in _gamma_tables.values())
    total += sum(t.size for t in _power_tables.values())
    if total + length > _TABLE_ENTRY_BUDGET:
        return None
    store[key] = builder()
    return store[key]


def _approximant(z, p, K):
    """Integer n in [0, p^K) congruent to z, for z in Z_p."""
    if isinstance(z, PAdicNumber):
        if z.p != p:
            raise ValueError("mixed primes")
        if z.exact_zero:
            return 0
        if z.val < 0:
            raise NonIntegralArgument(f"{z!r} is not in Z_p")
        if z.abs_prec < K:
            from .errors import PrecisionExhausted
            raise PrecisionExhausted(
                f"argument known only mod p^{z.abs_prec}, need p^{K}")
        return z.residue(K)
    q = Fraction(z)
    if q == 0:
        return 0
    if frac_vp(q, p) < 0:
        raise NonIntegralArgument(f"{q} is not in Z_p")
    mod = p ** K
    return q.numerator * pow(q.denominator, -1, mod) % mod


def _check_budget(p, K):
    if p ** K > loop_budget():
        raise BudgetExceeded(
            f"p^K = {p}^{K} exceeds the loop budget {loop_budget()} "
            "(override with PADHG_MAX_BUDGET)")


# ---------------------------------------------------------------------------
# p-adic gamma
# ---------------------------------------------------------------------------

def _gamma_cycle(p, K):
    # deviation of one full cycle: A(n + p^K) = A(n) * (-1)^(p^K) * W
    if (p, K) in _gamma_cycles:
        return _gamma_cycles[(p, K)]
    mod = p ** K
    W = kernels.gamma_product(p, mod, mod)
    w = (-W) % mod if p != 2 else W % mod
    dev = (w - 1) % mod
    cert = K if dev == 0 else vp(dev, p)
    _gamma_cycles[(p, K)] = cert
    log.debug("gamma cycle p=%d K=%d certified %d digits", p, K, cert)
    return cert


def _gamma_raw(p, K, n):
    mod = p ** K
    tab = _maybe_table("gamma", ("g", p, K),
                       lambda: kernels.gamma_table(p, mod, mod), mod)
    if tab is not None:
        prod = int(tab[n - 1]) if n >= 1 else 1
    else:
        prod = kernels.gamma_product(p, mod, n)
    return (-prod) % mod if n % 2 else prod


def gamma_p(z, prec, p=None):
    """Morita-style p-adic gamma: the continuous extension of
    n -> (-1)^n prod_{0<k<n, p∤k} k, evaluated mod p^prec."""
    if p is None:
        if not isinstance(z, PAdicNumber):
            raise ValueError("p required for rational arguments")
        p = z.p
    # odd p: one full cycle multiplies the approximant by exactly 1 (checked
    # numerically below), so no guard digits are needed
    guard = 0 if p != 2 else 2
    K = prec + guard
    for _attempt in range(3):
        _check_budget(p, K)
        cert = _gamma_cycle(p, K)
        if cert >= prec or p ** (K + (prec - cert)) > loop_budget():
            break
        K += prec - cert
    n = _approximant(z, p, K)
    val = _gamma_raw(p, K, n)
    cert = min(_gamma_cycle(p, K), K)
    out_prec = min(cert, prec)
    result = PAdicNumber(p, 0, val % p ** out_prec, out_prec)
    log.debug("gamma_p(%s) p=%d: K=%d certified=%d", z, p, K, cert)
    return result


# ---------------------------------------------------------------------------
# p-adic polygamma
# ---------------------------------------------------------------------------

def _phi_pk(p, K):
    return p ** (K - 1) * (p - 1)


def _power_cycle(p, K, r):
    if (p, K, r) in _power_cycles:
        return _power_cycles[(p, K, r)]
    mod = p ** K
    Z = kernels.power_sum(p, mod, mod, -(r + 1), _phi_pk(p, K))
    cert = K if Z == 0 else vp(Z, p)
    _power_cycles[(p, K, r)] = (cert, Z)
    log.debug("polygamma cycle p=%d K=%d r=%d certified %d digits", p, K, r, cert)
    return cert, Z


def polygamma_any(r, z, prec, p=None):
    """Continuous extension of n -> sum_{0<k<n, p∤k} k^-(r+1), any integer r
    (orders r < 0 arise from the L-value inversion formulas)."""
    if p is None:
        if not isinstance(z, PAdicNumber):
            raise ValueError("p required for rational arguments")
        p = z.p
    # the cycle sum vanishes mod p^K unless (p-1) | r+1; guard accordingly
    if r != -1 and (r + 1) % (p - 1) == 0:
        guard = 1 + vp(r + 1, p)
    elif r == -1:
        guard = 1
    else:
        guard = 0
    if p == 2:
        guard += 1
    K = prec + guard
    for _attempt in range(4):
        _check_budget(p, K)
        cert, _ = _power_cycle(p, K, r)
        if cert >= prec:
            break
        bump = prec - cert
        if p ** (K + bump) > loop_budget():
            break
        K += bump
    n = _approximant(z, p, K)
    mod = p ** K
    e = -(r + 1)
    tab = _maybe_table("power", ("s", p, K, r),
                       lambda: kernels.power_table(p, mod, mod, e, _phi_pk(p, K)),
                       mod)
    if tab is not None:
        S = int(tab[n - 1]) if n >= 1 else 0
    else:
        S = kernels.power_sum(p, mod, n, e, _phi_pk(p, K))
    cert, _ = _power_cycle(p, K, r)
    out_prec = min(cert, prec)
    S %= p ** out_prec
    if S == 0:
        result = PAdicNumber(p, out_prec, 0, 0)
    else:
        v = vp(S, p)
        result = PAdicNumber(p, v, S // p ** v, out_prec - v)
    log.debug("polygamma(r=%d, %s) p=%d: K=%d certified=%d", r, z, p, K, cert)
    return result


def polygamma(r, z, prec, p=None):
    """p-adic polygamma of order r >= 0 at z in Z_p, mod p^prec (certified)."""
    if r < 0:
        raise ValueError("polygamma order must be >= 0")
    return polygamma_any(r, z, prec, p)


def beta_p(x, y, prec, p=None):
    """B_p(x,y) = Gamma_p(x) Gamma_p(y) / Gamma_p(x+y)."""
    if p is None:
        for v in (x, y):
            if isinstance(v, PAdicNumber):
                p = v.p
                break
        else:
            raise ValueError("p required for rational arguments")
    xs = x if isinstance(x, PAdicNumber) else Fraction(x)
    ys = y if isinstance(y, PAdicNumber) else Fraction(y)
    return gamma_p(xs, prec, p) * gamma_p(ys, prec, p) \
        / gamma_p(xs + ys, prec, p)


def log_beta_rhs(z, eps, prec, p, terms=None):
    """sum_i polygamma(i-1)(z) (-1)^i eps^i / i, truncated by valuation."""
    ring = PAdicRing(p, prec)
    eps_p = eps if isinstance(eps, PAdicNumber) else ring(eps)
    veps = eps_p.val
    if veps < 1:
        raise ValueError("eps must lie in pZ_p")
    if terms is None:
        terms = 1
        while terms * veps - _ilogp(terms, p) < prec + 1:
            terms += 1
    total = PAdicNumber.exact_zero_of(p)
    eps_pow = None
    for i in range(1, terms + 1):
        eps_pow = eps_p if i == 1 else eps_pow * eps_p
        psi = polygamma_any(i - 1, z, prec + 2, p)
        total = total + psi * eps_pow * Fraction((-1) ** i, i)
    return total


def _ilogp(k, p):
    out = 0
    while k >= p:
        k //= p
        out += 1
    return out


# ---------------------------------------------------------------------------
# Psi coefficient sequences
# ---------------------------------------------------------------------------

@dataclass
class PsiCoefficients:
    """Coefficients of the exponential generating series built from polygamma
    differences of a parameter pair, optionally corrected by the rational
    bracket factor over the non-unit lower parameters."""

    a: tuple
    b: tuple
    s: int
    p: int
    variant: str                 # "plain" | "bracket"
    values: list = field(default_factory=list)

    def __getitem__(self, m):
        return self.values[m]


def psi_p_value(r, a, b, prec, p):
    """sum_i polygamma(r)(a_i) - polygamma(r)(b_i)."""
    total = PAdicNumber.exact_zero_of(p)
    for ai in a:
        total = total + polygamma_any(r, Fraction(ai), prec, p)
    for bj in b:
        total = total - polygamma_any(r, Fraction(bj), prec, p)
    return total


def psi_coefficients(a, b, s, max_m, variant, p, prec, dwork_prime_fn=None):
    """Coefficients Psi_0..Psi_max_m of

        [bracket] * exp(sum_r psi^(r-1)(a,b) x^r / r),

    where the bracket (variant="bracket") is
    prod_{j>s} (1 - x beta_j^F) / (1 - x beta_j) with beta_j = 1/(b_j-1) and
    beta_j^F = p^{-1}/(b_j^(1)-1).  variant="plain" omits the bracket.
    """
    a = tuple(Fraction(x) for x in a)
    b = tuple(Fraction(x) for x in b)
    guard = 1 + sum(vp(r, p) for r in range(2, max_m + 1))
    work = prec + guard
    # exponential part, by the derivative recursion m E_m = sum psi_r E_{m-r}
    psis = [None] + [psi_p_value(r - 1, a, b, work, p)
                     for r in range(1, max_m + 1)]
    E = [PAdicNumber(p, 0, 1, work)]
    for m in range(1, max_m + 1):
        acc = PAdicNumber.exact_zero_of(p)
        for r in range(1, m + 1):
            acc = acc + psis[r] * E[m - r]
        E.append(acc * Fraction(1, m))
    values = E
    if variant == "bracket":
        if dwork_prime_fn is None:
            from .hypergeom import dwork_prime
            dwork_prime_fn = lambda x: dwork_prime(x, p)
        betas, betas_f = [], []
        for j in range(s, len(b)):
            bj = b[j]
            bj1 = dwork_prime_fn(bj)
            if bj == 1 or bj1 == 1:
                raise BracketPoleAtOne(
                    f"lower parameter {bj} (or its Dwork prime) equals 1")
            betas.append(Fraction(1) / (bj - 1))
            betas_f.append(Fraction(1, p) / (bj1 - 1))
        # rational bracket series in x, exact arithmetic
        bracket = [Fraction(1)] + [Fraction(0)] * max_m
        for bf in betas_f:
            for m in range(max_m, 0, -1):
                bracket[m] -= bf * bracket[m - 1]
        for bb in betas:
            # divide by (1 - x*bb): cumulative geometric recursion
            for m in range(1, max_m + 1):
                bracket[m] += bb * bracket[m - 1]
        values = []
        for m in range(max_m + 1):
            acc = PAdicNumber.exact_zero_of(p)
            for i in range(m + 1):
                if bracket[i] != 0:
                    acc = acc + E[m - i] * bracket[i]
            values.append(acc)
    elif variant != "plain":
        raise ValueError(f"unknown variant {variant!r}")
    values = [v.with_abs_prec(prec) if (v.abs_prec is not None
                                        and v.abs_prec > prec) else v
              for v in values]
    return PsiCoefficients(a=a, b=b, s=s, p=p, variant=variant, values=values)
