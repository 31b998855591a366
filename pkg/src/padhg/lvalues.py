"""Dirichlet characters modulo N and p-adic L-values computed from polygamma
sums, together with the inversion formula expressing polygamma values as
linear combinations of L-values (used as a round-trip cross-check).

Character values are stored as exponents of a root of unity of the character
order; they are materialized either in Q_p via Teichmuller roots (when the
order divides p-1) or in the unramified cyclotomic ring Z_p[x]/Phi_ord.
All evaluations of a character inside the L-value formulas use the primitive
character of its conductor.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import (
    BadModulus,
    ModulusDivisibleByP,
    NonPrimitive,
    RIsOne,
)
from .padics import CycloRing, PAdicNumber, PAdicRing, iwasawa_log, teichmuller
from .specfun import polygamma_any

log = logging.getLogger(__name__)

FACTOR_LIMIT = 10 ** 6


def factorize(N):
    """Trial-division factorization, enforced desk scale."""
    if N > FACTOR_LIMIT:
        raise BadModulus(f"modulus {N} exceeds the factorization limit")
    out = []
    n = N
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


def euler_phi(N):
    return len([k for k in range(1, N + 1) if gcd(k, N) == 1]) if N <= 10 \
        else _phi_from_factors(factorize(N))


def _phi_from_factors(factors):
    out = 1
    for l, e in factors:
        out *= l ** (e - 1) * (l - 1)
    return out


def _primitive_root(l, e):
    # primitive root mod l^e for odd prime l
    q = l ** e
    phi_l = l - 1
    fac = [f for f, _ in factorize(phi_l)]
    g = None
    for cand in range(2, l):
        if all(pow(cand, phi_l // f, l) != 1 for f in fac):
            g = cand
            break
    if e == 1:
        return g
    if pow(g, phi_l, l * l) == 1:
        g += l
    return g


def _local_generators(l, e):
    """Generators and their orders for (Z/l^e)^x."""
    if l == 2:
        if e == 1:
            return [], []
        if e == 2:
            return [3], [2]
        return [2 ** e - 1, 5], [2, 2 ** (e - 2)]
    return [_primitive_root(l, e)], [l ** (e - 1) * (l - 1)]


def _dlog_table(q, gens, orders):
    """residue mod q -> exponent tuple on the local generators."""
    table = {1 % q: tuple([0] * len(gens))}
    if not gens:
        return table
    ranges = [range(d) for d in orders]
    for exps in itertools.product(*ranges):
        r = 1
        for g, t in zip(gens, exps):
            r = r * pow(g, t, q) % q
        table.setdefault(r, exps)
    return table


@dataclass(frozen=True)
class DirichletCharacter:
    """Character mod N, stored by its exponent vector on the unit-group
    generators; values are exponents of a primitive `order`-th root."""

    modulus: int
    order: int
    conductor: int
    index: int
    exponents: tuple            # e_k for k in 0..N-1 (None when gcd(k,N)>1)
    prim_exponents: tuple       # same, mod the conductor

    def value_exponent(self, k):
        return self.exponents[k % self.modulus]

    def prim_value_exponent(self, k):
        return self.prim_exponents[k % self.conductor]

    def is_trivial(self):
        return self.conductor == 1

    def to_json(self):
        return {"modulus": self.modulus, "order": self.order,
                "conductor": self.conductor, "index": self.index,
                "values": [None if e is None else e for e in self.exponents]}


def enumerate_characters(N, p=None, prec=None):
    """All phi(N) Dirichlet characters modulo N, with conductors; enumeration
    is lexicographic in the generator-exponent tuples (the CLI index)."""
    if N < 1:
        raise BadModulus("modulus must be positive")
    if p is not None and N % p == 0:
        raise ModulusDivisibleByP(f"p={p} divides N={N}")
    factors = factorize(N) if N > 1 else []
    locals_ = []
    for l, e in factors:
        q = l ** e
        gens, orders = _local_generators(l, e)
        locals_.append((q, gens, orders, _dlog_table(q, gens, orders)))
    all_orders = [d for (_, _, orders, _) in locals_ for d in orders]
    L = 1
    for d in all_orders:
        L = L * d // gcd(L, d)
    # dlogs of every residue class coprime to N
    dlogs = {}
    for k in range(N if N > 1 else 1):
        if gcd(k, N) != 1:
            continue
        vec = []
        ok = True
        for (q, gens, orders, table) in locals_:
            t = table.get(k % q)
            if t is None:
                ok = False
                break
            vec.extend(t)
        if ok:
            dlogs[k] = tuple(vec)
    chars = []
    ranges = [range(d) for d in all_orders]
    divisors = sorted(d for d in range(1, N + 1) if N % d == 0) if N > 1 else [1]
    for index, tvec in enumerate(itertools.product(*ranges) if all_orders
                                 else [()]):
        # order of this character
        ordv = 1
        for t, d in zip(tvec, all_orders):
            o = d // gcd(d, t)
            ordv = ordv * o // gcd(ordv, o)
        exps = [None] * max(N, 1)
        for k, vec in dlogs.items():
            e = 0
            for t, x, d in zip(tvec, vec, all_orders):
                e = (e + t * x * (L // d)) % L
            exps[k] = e * ordv // L % ordv
        if N == 1:
            exps = [0]
        # conductor: minimal divisor f with chi trivial on units ≡ 1 mod f
        conductor = N
        for f in divisors:
            if all(exps[k] == 0 for k in dlogs if k % f == 1 % max(f, 1)):
                conductor = f
                break
        prim = [None] * conductor
        for k in range(conductor):
            if gcd(k, conductor) != 1:
                continue
            a = _coprime_lift(k, conductor, factors, N)
            prim[k] = exps[a % N] if N > 1 else 0
        chars.append(DirichletCharacter(
            modulus=N, order=ordv, conductor=conductor, index=index,
            exponents=tuple(exps), prim_exponents=tuple(prim)))
    return chars


def _coprime_lift(k, f, factors, N):
    """a ≡ k mod f with gcd(a, N) = 1, via CRT over the prime powers of N."""
    if N == 1:
        return 0
    residues = []
    moduli = []
    for l, e in factors:
        q = l ** e
        c = 0
        ff = f
        while ff % l == 0:
            ff //= l
            c += 1
        if c > 0:
            residues.append(k % l ** c)
            moduli.append((l ** c, q))
        else:
            residues.append(1)
            moduli.append((1, q))
    a, mod = 0, 1
    for r, (small, q) in zip(residues, moduli):
        # lift residue r mod small to mod q (any unit lift works; r is a unit)
        target = r if small > 1 else 1
        # CRT combine a mod `mod` with target mod q
        g = gcd(mod, q)
        assert g == 1
        inv = pow(mod, -1, q)
        a = a + mod * ((target - a) * inv % q)
        mod *= q
    return a % mod


# ---------------------------------------------------------------------------
# value rings
# ---------------------------------------------------------------------------

class CharacterValueRing:
    """Smallest ring holding the needed roots of unity: Q_p via Teichmuller
    when order | p-1, else the unramified cyclotomic ring."""

    def __init__(self, order, p, prec):
        self.order = max(order, 1)
        self.p = p
        self.prec = prec
        self.scalars = PAdicRing(p, prec)
        if (p - 1) % self.order == 0:
            self.mode = "teichmuller"
            self.cyclo = None
            zeta = self._teich_root(self.order)
        else:
            self.mode = "cyclo"
            self.cyclo = CycloRing(self.order, p, prec)
            zeta = self.cyclo.zeta()
        self._powers = [self.one]
        for _ in range(1, self.order):
            self._powers.append(self._powers[-1] * zeta)

    def _teich_root(self, d):
        p = self.p
        if d == 1:
            return self.scalars(1)
        g = _primitive_root(p, 1)
        t = teichmuller(self.scalars(g))
        return t ** ((p - 1) // d)

    @property
    def zero(self):
        return self.scalars.zero if self.mode == "teichmuller" \
            else self.cyclo.zero

    @property
    def one(self):
        return self.scalars(1) if self.mode == "teichmuller" \
            else self.cyclo.one

    def root(self, e):
        """zeta^e for the distinguished root of order `order`."""
        return self._powers[e % self.order]

    def embed(self, x):
        """Rationals and PAdic scalars into the ring."""
        if self.mode == "teichmuller":
            return x if isinstance(x, PAdicNumber) else self.scalars(x)
        return self.cyclo.embed(x)

    def char_value(self, chi, k, primitive=True, inverse=False):
        """chi(k) (primitive evaluation by default) in this ring, or zero."""
        e = chi.prim_value_exponent(k) if primitive else chi.value_exponent(k)
        if e is None:
            return self.zero
        if chi.order > 1 and self.order % chi.order != 0:
            raise ValueError("value ring does not contain the needed roots")
        e = e * (self.order // max(chi.order, 1))
        if inverse:
            e = -e
        return self.root(e)


# ---------------------------------------------------------------------------
# L-values
# ---------------------------------------------------------------------------

@dataclass
class LValueResult:
    r: int
    character: DirichletCharacter
    value: object               # PAdicNumber or CycloElement
    modulus_used: int
    p: int
    prec: int
    source: str

    def to_json(self):
        val = self.value.to_json()
        return {"r": self.r, "p": self.p, "modulus": self.modulus_used,
                "character": self.character.to_json() if self.character
                else None,
                "value": val, "certified_prec": self.prec,
                "source": self.source}


def _psi_at(r, k, N, prec, p):
    return polygamma_any(r - 1, Fraction(k, N), prec, p)


def lp_value(r, chi, N, prec, p, ring=None):
    """L_p(r, chi*omega^(1-r)) as the polygamma sum
    -(1/N^r) sum_{k=1}^{N-1} chi(k) polygamma(r-1)(k/N),
    with chi evaluated through the primitive character of its conductor."""
    f = chi.conductor
    if f <= 1:
        raise NonPrimitive("the trivial character is excluded here (f > 1)")
    if N % f != 0:
        raise BadModulus(f"N={N} is not a multiple of the conductor {f}")
    if gcd(N, p) != 1:
        raise ModulusDivisibleByP(f"p={p} divides N={N}")
    if ring is None:
        ring = CharacterValueRing(chi.order, p, prec)
    work = prec + 2
    total = ring.zero
    for k in range(1, N):
        if gcd(k, f) != 1:
            continue
        cv = ring.char_value(chi, k)
        total = total + cv * _psi_at(r, k, N, work, p)
    value = total * (Fraction(-1) / Fraction(N) ** r)
    return LValueResult(r=r, character=chi, value=value, modulus_used=N,
                        p=p, prec=prec, source="lvalue-polygamma-sum")


def zeta_p(r, N, prec, p):
    """zeta_p(r) from the trivial-character polygamma sum over k/N:
    sum_k polygamma(r-1)(k/N) = (N - N^r)(1 - p^-r) zeta_p(r) for r != 1."""
    if r == 1:
        raise RIsOne("r = 1 is the logarithm identity, not a zeta value")
    if N < 2:
        raise BadModulus("auxiliary N must be >= 2")
    if gcd(N, p) != 1:
        raise ModulusDivisibleByP(f"p={p} divides N={N}")
    work = prec + 2
    total = PAdicNumber.exact_zero_of(p)
    for k in range(1, N):
        total = total + _psi_at(r, k, N, work, p)
    denom = (Fraction(N) - Fraction(N) ** r) * (1 - Fraction(p) ** (-r))
    value = total / PAdicRing(p, work)(denom)
    return LValueResult(r=r, character=None, value=value, modulus_used=N,
                        p=p, prec=prec, source="zeta-from-polygamma-sum")


def lp_trivial(r, prec, p, aux=None):
    """L_p(r, omega^(1-r)) for r != 1 via an auxiliary modulus."""
    if aux is None:
        aux = 2 if p != 2 else 3
    work = prec + 2
    total = PAdicNumber.exact_zero_of(p)
    for k in range(1, aux):
        total = total + _psi_at(r, k, aux, work, p)
    denom = Fraction(aux) - Fraction(aux) ** r
    return total / PAdicRing(p, work)(denom)


def padic_log_of_integer(m, prec, p):
    """p^{-1} log(m^(p-1)) as a PAdicNumber (m prime to p)."""
    u = PAdicNumber.from_rational(Fraction(m) ** (p - 1), p, prec + 2)
    return iwasawa_log(u) * Fraction(1, p)


def log_identity_check(N, prec, p):
    """Residual of: sum_k polygamma(0)(k/N) = -N p^{-1} log(N^{p-1})."""
    if N < 2:
        raise BadModulus("N must be >= 2")
    if gcd(N, p) != 1:
        raise ModulusDivisibleByP(f"p={p} divides N={N}")
    work = prec + 2
    total = PAdicNumber.exact_zero_of(p)
    for k in range(1, N):
        total = total + _psi_at(1, k, N, work, p)
    rhs = padic_log_of_integer(N, work, p) * (-N)
    return total - rhs


def aggregate_lvalue(r, chi, N, factors, prec, p, ring):
    """The per-character aggregate entering the inversion formula:

      f>1       : prod_i (1 - chi(l_i) l_i^-r) L_p(r, chi omega^(1-r))
      f=1, r!=1 : (prod_i (1-l_i^-r) - N^(1-r) prod_i (1-l_i^-1)) L_p(r, ...)
      f=1, r=1  : prod_i (1-l_i^-1)
                  (sum_i p^-1 log(l_i^(p-1))/(l_i-1) + p^-1 log(N^(p-1)))
    """
    primes = [l for l, _ in factors]
    if chi.conductor > 1:
        base = lp_value(r, chi, chi.conductor, prec, p, ring=ring).value
        out = base
        for l in primes:
            factor = ring.one - ring.char_value(chi, l) \
                * ring.embed(Fraction(1, l ** r) if r >= 0
                             else Fraction(l ** (-r)))
            out = out * factor
        return out
    if r != 1:
        lp = lp_trivial(r, prec, p)
        c1 = Fraction(1)
        c2 = Fraction(1)
        for l in primes:
            c1 *= 1 - Fraction(l) ** (-r)
            c2 *= 1 - Fraction(1, l)
        scalar = (c1 - Fraction(N) ** (1 - r) * c2)
        return ring.embed(lp * scalar)
    acc = PAdicNumber.exact_zero_of(p)
    for l in primes:
        acc = acc + padic_log_of_integer(l, prec, p) * Fraction(1, l - 1)
    acc = acc + padic_log_of_integer(N, prec, p)
    c2 = Fraction(1)
    for l in primes:
        c2 *= 1 - Fraction(1, l)
    return ring.embed(acc * c2)


def polygamma_from_lvalues(r, k, N, prec, p):
    """Reassemble polygamma(r-1)(k/N) from the character aggregates:
    -(N^r/phi(N)) sum_chi chi(k)^{-1} L_r(chi), chi over primitive characters
    of conductor dividing N.  Returns an element of the common value ring."""
    if N <= 1:
        raise BadModulus("N must be > 1")
    if gcd(k, N) != 1:
        raise BadModulus(f"k={k} is not coprime to N={N}")
    if gcd(N, p) != 1:
        raise ModulusDivisibleByP(f"p={p} divides N={N}")
    factors = factorize(N)
    chars = enumerate_characters(N, p)
    L = 1
    for chi in chars:
        L = L * chi.order // gcd(L, chi.order)
    ring = CharacterValueRing(L, p, prec)
    total = ring.zero
    for chi in chars:
        agg = aggregate_lvalue(r, chi, N, factors, prec, p, ring)
        total = total + ring.char_value(chi, k, inverse=True) * agg
    phi = _phi_from_factors(factors)
    value = total * (-Fraction(N) ** r / phi)
    return value, ring
