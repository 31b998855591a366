"""Exact p-adic numbers at fixed finite precision, Teichmuller lifts, the
Iwasawa logarithm, and the unramified cyclotomic extension rings needed for
Dirichlet character values.

A ``PAdicNumber`` is an element of Q_p known modulo p^(val+prec), stored as a
valuation plus a unit residue with ``prec`` significant digits.  Arithmetic
never reports more digits than the inputs justify: addition keeps the minimum
absolute precision, multiplication the minimum relative precision.  All values
are immutable; everything in this module is safe to share between threads.
"""

from fractions import Fraction
from math import gcd

from .errors import (
    DenominatorDivisibleByP,
    DivisionByZero,
    InvalidLift,
    NonInvertible,
    NotAUnit,
    PrecisionExhausted,
    RamifiedExtension,
)


def vp(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero is undefined")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def frac_vp(q, p):
    """p-adic valuation of a nonzero Fraction (or int)."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("valuation of zero is undefined")
    return vp(q.numerator, p) - vp(q.denominator, p)


class PAdicNumber:
    """Element of Q_p modulo p^(val+prec).

    ``unit`` is an integer in [0, p^prec) with p∤unit whenever prec > 0; the
    represented value is p^val * unit + O(p^(val+prec)).  Two degenerate
    shapes exist: the exact zero (``exact_zero`` flag), and inexact zeros
    (prec == 0, unit == 0) meaning "O(p^val)": a value certified only to
    vanish modulo p^val.
    """

    __slots__ = ("p", "val", "unit", "prec", "exact_zero")

    def __init__(self, p, val, unit, prec, exact_zero=False):
        self.p = p
        if exact_zero:
            self.val = 0
            self.unit = 0
            self.prec = 0
            self.exact_zero = True
            return
        self.exact_zero = False
        if prec < 0:
            prec = 0
        unit %= p ** prec if prec > 0 else 1
        if prec > 0 and unit == 0:
            # all certified digits vanished: inexact zero at abs precision
            self.val = val + prec
            self.unit = 0
            self.prec = 0
            return
        if prec > 0 and unit % p == 0:
            shift = vp(unit, p)
            shift = min(shift, prec)
            val += shift
            prec -= shift
            unit = (unit // p ** shift) % (p ** prec if prec > 0 else 1)
            if prec == 0:
                unit = 0
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- constructors --------------------------------------------------

    @classmethod
    def exact_zero_of(cls, p):
        return cls(p, 0, 0, 0, exact_zero=True)

    @classmethod
    def from_rational(cls, q, p, prec):
        """The unique element congruent to q modulo p^(v_p(q)+prec)."""
        q = Fraction(q)
        if prec < 1:
            raise ValueError("prec must be >= 1")
        if q == 0:
            return cls.exact_zero_of(p)
        num, den = q.numerator, q.denominator
        if den == 0:
            raise DenominatorDivisibleByP("zero denominator")
        v = vp(num, p) - vp(den, p)
        num //= p ** max(vp(num, p), 0)
        den //= p ** max(vp(den, p), 0)
        mod = p ** prec
        if den % p == 0:
            raise DenominatorDivisibleByP(f"{q} has p in its reduced denominator")
        unit = num * pow(den, -1, mod) % mod
        return cls(p, v, unit, prec)

    # -- basic queries ---------------------------------------------------

    @property
    def abs_prec(self):
        if self.exact_zero:
            return None                     # infinite
        return self.val + self.prec

    def is_zero(self):
        """True when no nonzero digit is certified (exact or inexact zero)."""
        return self.exact_zero or self.prec == 0

    def is_unit(self):
        return (not self.is_zero()) and self.val == 0

    def valuation(self):
        """Valuation; for inexact zeros this is the certified lower bound."""
        if self.exact_zero:
            return None
        return self.val

    def lift(self):
        """A rational representative (the canonical one below p^abs_prec)."""
        if self.exact_zero or self.prec == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, k):
        """Integer residue modulo p^k (val >= 0 required, k <= abs_prec)."""
        if self.exact_zero:
            return 0
        if self.abs_prec < k:
            raise PrecisionExhausted(f"residue mod p^{k} not certified "
                                     f"(abs prec {self.abs_prec})")
        if self.val < 0:
            raise NotAUnit("negative valuation has no integer residue")
        if self.prec == 0:
            return 0
        return self.unit * self.p ** self.val % self.p ** k

    def digits(self):
        """Little-endian base-p digits of the unit part."""
        out = []
        u = self.unit
        for _ in range(self.prec):
            u, r = divmod(u, self.p)
            out.append(r)
        return out

    # -- precision bookkeeping -------------------------------------------

    def with_abs_prec(self, k):
        """Reduce (never extend) to absolute precision k."""
        if self.exact_zero:
            return self
        if self.prec == 0:
            return PAdicNumber(self.p, min(self.val, k), 0, 0)
        newprec = min(self.prec, k - self.val)
        if newprec <= 0:
            return PAdicNumber(self.p, k, 0, 0)
        return PAdicNumber(self.p, self.val, self.unit % self.p ** newprec, newprec)

    def agreement_prec(self, other):
        """Largest k (up to joint abs precision) with self ≡ other mod p^k."""
        other = self._coerce(other)
        d = self - other
        if d.exact_zero:
            a, b = self.abs_prec, other.abs_prec
            if a is None and b is None:
                return None                 # exact agreement
            return min(x for x in (a, b) if x is not None)
        return d.val

    def agrees(self, other, digits):
        ap = self.agreement_prec(other)
        return ap is None or ap >= digits

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PAdicNumber):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                return PAdicNumber.exact_zero_of(self.p)
            # exact rational: give it enough digits never to be the bottleneck
            v = frac_vp(q, self.p)
            margin = self.prec + abs(self.val - v) + 2 if not self.exact_zero else 2
            return PAdicNumber.from_rational(q, self.p, max(margin, 2))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.exact_zero:
            return other
        if other.exact_zero:
            return self
        a, b = self, other
        n = min(a.abs_prec, b.abs_prec)
        m = min(a.val, b.val)
        rel = n - m
        if rel <= 0:
            return PAdicNumber(self.p, n, 0, 0)
        mod = self.p ** rel
        s = (a.unit * self.p ** (a.val - m) + b.unit * self.p ** (b.val - m)) % mod
        return PAdicNumber(self.p, m, s, rel)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.p ** self.prec
        return PAdicNumber(self.p, self.val, (-self.unit) % mod, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = Fraction(other)
            if q == 0:
                return PAdicNumber.exact_zero_of(self.p)
            if self.exact_zero:
                return self
            v = frac_vp(q, self.p)
            if self.prec == 0:
                return PAdicNumber(self.p, self.val + v, 0, 0)
            mod = self.p ** self.prec
            uq = (q / Fraction(self.p) ** v)
            unit = self.unit * (uq.numerator % mod) % mod \
                * pow(uq.denominator, -1, mod) % mod
            return PAdicNumber(self.p, self.val + v, unit, self.prec)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.exact_zero or other.exact_zero:
            return PAdicNumber.exact_zero_of(self.p)
        if self.prec == 0 or other.prec == 0:
            return PAdicNumber(self.p, self.val + other.val, 0, 0)
        rel = min(self.prec, other.prec)
        mod = self.p ** rel
        return PAdicNumber(self.p, self.val + other.val,
                           self.unit * other.unit % mod, rel)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of (certified) zero")
        mod = self.p ** self.prec
        return PAdicNumber(self.p, -self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by (certified) zero")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e == 0:
            return PAdicNumber(self.p, 0, 1, max(self.prec, 1))
        if e < 0:
            return self.inverse() ** (-e)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- presentation -----------------------------------------------------

    def __repr__(self):
        if self.exact_zero:
            return f"0 (exact, p={self.p})"
        if self.prec == 0:
            return f"O({self.p}^{self.val})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.abs_prec})"

    def to_json(self):
        if self.exact_zero:
            return {"p": self.p, "val": 0, "unit": [], "prec": None}
        return {"p": self.p, "val": self.val, "unit": self.digits(),
                "prec": self.prec}

    @classmethod
    def from_json(cls, obj):
        p = obj["p"]
        if obj["prec"] is None:
            return cls.exact_zero_of(p)
        unit = sum(d * p ** i for i, d in enumerate(obj["unit"]))
        return cls(p, obj["val"], unit, obj["prec"])


class PAdicRing:
    """Handle for Q_p at working relative precision ``prec``."""

    def __init__(self, p, prec):
        self.p = p
        self.prec = prec

    @property
    def zero(self):
        return PAdicNumber.exact_zero_of(self.p)

    @property
    def one(self):
        return PAdicNumber(self.p, 0, 1, self.prec)

    def __call__(self, q):
        """Coerce a rational (or PAdicNumber) into this ring."""
        if isinstance(q, PAdicNumber):
            if q.p != self.p:
                raise ValueError("mixed primes")
            return q
        q = Fraction(q)
        if q == 0:
            return self.zero
        return PAdicNumber.from_rational(q, self.p, self.prec)

    def is_zero(self, x):
        return x.is_zero()

    def inv(self, x):
        return x.inverse()

    def __repr__(self):
        return f"PAdicRing({self.p}, prec={self.prec})"

    def __eq__(self, other):
        return (isinstance(other, PAdicRing)
                and other.p == self.p and other.prec == self.prec)

    def __hash__(self):
        return hash(("PAdicRing", self.p, self.prec))


# ---------------------------------------------------------------------------
# Teichmuller lifts, Iwasawa logarithm, binomial powers
# ---------------------------------------------------------------------------

def teichmuller(a, prec=None):
    """The (p-1)-st root of unity congruent to the unit ``a`` mod p.

    Computed by iterating x -> x^p, which gains one digit per step.
    """
    if not isinstance(a, PAdicNumber):
        raise TypeError("teichmuller expects a PAdicNumber")
    if not a.is_unit():
        raise NotAUnit("teichmuller lift requires a p-adic unit")
    p = a.p
    M = a.prec if prec is None else min(prec, a.prec)
    mod = p ** M
    x = a.residue(1) % p
    for _ in range(M + 1):
        x = pow(x, p, mod)
    return PAdicNumber(p, 0, x, M)


def iwasawa_log(u, prec=None):
    """Iwasawa branch of log: kills roots of unity, log(1+x) series on 1+pZ_p.

    For p = 2 the series domain is 1+4Z_2; the factor -1 (the only extra
    2-adic root of unity) is removed first.
    """
    if not isinstance(u, PAdicNumber):
        raise TypeError("iwasawa_log expects a PAdicNumber")
    if not u.is_unit():
        raise NotAUnit("log requires a p-adic unit")
    p = u.p
    M = u.prec if prec is None else min(prec, u.prec)
    # guard digits cover the divisions by k in the series
    guard = 1
    k = p
    while k <= M + guard + 1:
        guard += 1
        k *= p
    work = M + guard + 1
    u = u.with_abs_prec(min(u.abs_prec, work))
    if p == 2:
        u1 = u if u.residue(2) % 4 == 1 else -u
    else:
        u1 = u / teichmuller(u)
    x = u1 - 1
    if x.is_zero():
        # torsion or 1: log is certified zero at the working precision
        if x.exact_zero:
            return PAdicNumber.exact_zero_of(p)
        return PAdicNumber(p, min(x.val, work), 0, 0)
    vx = x.val

    def ilogp(k):
        out = 0
        while k >= p:
            k //= p
            out += 1
        return out

    total = PAdicNumber.exact_zero_of(p)
    xk = None
    k = 1
    # k*vx - ilogp(k) is increasing in k (vx >= 1), so stop at first crossing
    while k * vx - ilogp(k) < work:
        xk = x if k == 1 else xk * x
        total = total + xk * Fraction((-1) ** (k + 1), k)
        k += 1
    if total.abs_prec is not None and total.abs_prec > M:
        return total.with_abs_prec(M)
    return total


def unit_pow_rational(c, alpha):
    """c^alpha for c in 1+pZ_p (1+4Z_2 if p=2) and alpha in Z_(p), via the
    binomial series sum binom(alpha,k) (c-1)^k, whose terms are p-integral."""
    if not isinstance(c, PAdicNumber):
        raise TypeError("unit_pow_rational expects a PAdicNumber base")
    alpha = Fraction(alpha)
    p = c.p
    x = c - 1
    if x.is_zero():
        return PAdicNumber(p, 0, 1, c.prec)
    if x.val < (2 if p == 2 else 1):
        raise InvalidLift(f"base {c!r} not in 1+pZ_p")
    if frac_vp(alpha, p) < 0:
        raise NotAUnit("exponent must be p-integral")
    total = PAdicNumber(p, 0, 1, c.prec)
    term = PAdicNumber(p, 0, 1, c.prec)
    binom = Fraction(1)
    kmax = (c.abs_prec or c.prec) + 2
    for k in range(1, kmax + 1):
        binom *= Fraction(alpha - (k - 1), k)
        term = term * x
        if binom == 0:
            break
        total = total + term * binom
    return total


# ---------------------------------------------------------------------------
# cyclotomic extension rings
# ---------------------------------------------------------------------------

def _poly_divmod_int(num, den):
    # exact division of integer polynomial lists (little-endian), den monic
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        out[i - dd] = c
        if c:
            for j, dj in enumerate(den):
                num[i - dd + j] -= c * dj
    assert all(c == 0 for c in num[:dd]), "non-exact polynomial division"
    return out


def cyclotomic_polynomial(m):
    """Integer coefficients (little-endian) of the m-th cyclotomic polynomial."""
    poly = [-1] + [0] * (m - 1) + [1]            # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divmod_int(poly, cyclotomic_polynomial(d))
    return poly


def _poly_gcd_ext_fp(a, b, p):
    # extended gcd for little-endian polys over F_p: returns (g, s) with
    # s*a ≡ g mod b; used for invertibility mod p
    def trim(x):
        while x and x[-1] % p == 0:
            x = x[:-1]
        return [c % p for c in x]

    def polymod(x, y):
        x = trim(list(x))
        y = trim(list(y))
        inv_lead = pow(y[-1], -1, p)
        while len(x) >= len(y) and x:
            c = x[-1] * inv_lead % p
            shift = len(x) - len(y)
            for j in range(len(y)):
                x[shift + j] = (x[shift + j] - c * y[j]) % p
            x = trim(x)
        return x

    def polydiv(x, y):
        # quotient of x by y over F_p
        x = trim(list(x))
        y = trim(list(y))
        inv_lead = pow(y[-1], -1, p)
        q = [0] * max(len(x) - len(y) + 1, 1)
        while len(x) >= len(y) and x:
            c = x[-1] * inv_lead % p
            shift = len(x) - len(y)
            q[shift] = c
            for j in range(len(y)):
                x[shift + j] = (x[shift + j] - c * y[j]) % p
            x = trim(x)
        return q, x

    def polymul(x, y):
        out = [0] * (len(x) + len(y) - 1) if x and y else []
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    out[i + j] = (out[i + j] + xi * yj) % p
        return out

    def polysub(x, y):
        n = max(len(x), len(y))
        return [( (x[i] if i < len(x) else 0) - (y[i] if i < len(y) else 0)) % p
                for i in range(n)]

    r0, r1 = trim(list(b)), trim(list(a))
    s0, s1 = [0], [1]
    while r1:
        q, r = polydiv(r0, r1)
        r0, r1 = r1, trim(r)
        s0, s1 = s1, trim(polysub(s0, polymul(q, s1)))
    return r0, s0


class CycloElement:
    """Residue in Z_p[x]/Phi_m(x); coefficient vector of PAdicNumber."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = tuple(coeffs)

    def _check(self, other):
        if isinstance(other, CycloElement):
            if other.ring.m != self.ring.m or other.ring.p != self.ring.p:
                raise ValueError("mixed cyclotomic rings")
            return other
        return self.ring.embed(other)

    def __add__(self, other):
        other = self._check(other)
        return CycloElement(self.ring,
                            [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.ring, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PAdicNumber)):
            return CycloElement(self.ring, [a * other for a in self.coeffs])
        other = self._check(other)
        return self.ring._reduce_product(self.coeffs, other.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, PAdicNumber)):
            return CycloElement(self.ring, [a / other for a in self.coeffs])
        other = self._check(other)
        return self * other.inverse()

    def inverse(self):
        return self.ring.inverse(self)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def constant_part(self):
        """The PAdic constant coefficient; raises if higher terms survive."""
        if any(not c.is_zero() for c in self.coeffs[1:]):
            raise ValueError("element is not rational (nonzero higher coeffs)")
        return self.coeffs[0]

    def agrees(self, other, digits):
        other = self._check(other)
        return all(a.agrees(b, digits)
                   for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return f"Cyclo(m={self.ring.m}; {list(self.coeffs)})"

    def to_json(self):
        return {"m": self.ring.m, "coeffs": [c.to_json() for c in self.coeffs]}


class CycloRing:
    """Z_p[x]/Phi_m(x) at precision ``prec`` with p∤m (unramified)."""

    def __init__(self, m, p, prec):
        if m < 1:
            raise ValueError("m must be positive")
        if m % p == 0:
            raise RamifiedExtension(f"p={p} divides m={m}")
        self.m = m
        self.p = p
        self.prec = prec
        self.phi = cyclotomic_polynomial(m)
        self.degree = len(self.phi) - 1
        self.scalars = PAdicRing(p, prec)

    # -- constructors ------------------------------------------------------

    @property
    def zero(self):
        z = self.scalars.zero
        return CycloElement(self, [z] * self.degree)

    @property
    def one(self):
        return self.embed(1)

    def embed(self, q):
        """Ring homomorphism from scalars (rationals or PAdic) into the ring."""
        c0 = self.scalars(q) if not isinstance(q, PAdicNumber) else q
        z = self.scalars.zero
        return CycloElement(self, [c0] + [z] * (self.degree - 1))

    def zeta(self):
        """The distinguished root of unity: the class of x (order exactly m)."""
        if self.degree == 1:
            # Phi_1 = x-1, Phi_2 = x+1: the class of x is ±1
            return self.embed(1 if self.m == 1 else -1)
        z = self.scalars.zero
        coeffs = [z] * self.degree
        coeffs[1] = self.scalars(1)
        return CycloElement(self, coeffs)

    def from_poly(self, coeffs):
        """Element from little-endian coefficient list (rationals or PAdic)."""
        cs = [c if isinstance(c, PAdicNumber) else self.scalars(c)
              for c in coeffs]
        return self._reduce_coeffs(cs)

    # -- internals ---------------------------------------------------------

    def _reduce_coeffs(self, coeffs):
        coeffs = list(coeffs)
        z = self.scalars.zero
        while len(coeffs) < self.degree:
            coeffs.append(z)
        for i in range(len(coeffs) - 1, self.degree - 1, -1):
            c = coeffs[i]
            if not c.is_zero():
                for j in range(self.degree + 1):
                    if self.phi[j]:
                        coeffs[i - self.degree + j] = \
                            coeffs[i - self.degree + j] - c * self.phi[j]
            coeffs = coeffs[:i]
        return CycloElement(self, coeffs[:self.degree])

    def _reduce_product(self, a, b):
        out = [PAdicNumber.exact_zero_of(self.p)] * (2 * self.degree - 1)
        for i, ai in enumerate(a):
            if ai.is_zero() and ai.exact_zero:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return self._reduce_coeffs(out)

    def inverse(self, elem):
        """Hensel-lifted inverse; NonInvertible when a zero divisor mod p."""
        vals = [c.val for c in elem.coeffs if not c.is_zero()]
        if not vals:
            raise NonInvertible("inverse of (certified) zero")
        vmin = min(vals)
        if vmin != 0:
            # factor the p-power out so the core element is integral
            scaled = CycloElement(self, [c * Fraction(1, self.p) ** vmin
                                         for c in elem.coeffs])
            return scaled.inverse() * Fraction(1, self.p) ** vmin
        a_mod_p = []
        for c in elem.coeffs:
            if c.is_zero() or c.val > 0:
                a_mod_p.append(0)
            else:
                a_mod_p.append(c.residue(1))
        g, s = _poly_gcd_ext_fp(a_mod_p, self.phi, self.p)
        if len(g) != 1 or g[0] % self.p == 0:
            raise NonInvertible("zero divisor modulo p")
        ginv = pow(g[0], -1, self.p)
        x = self.from_poly([c * ginv % self.p for c in s])
        # x ≡ elem^{-1} mod p; each Newton step doubles the certified digits
        steps = 1
        while (1 << steps) < self.prec + 1:
            steps += 1
        for _ in range(steps + 1):
            x = x * (self.embed(2) - elem * x)
        return x

    def frobenius(self, elem):
        """The ring automorphism x -> x^p (arithmetic Frobenius)."""
        zp = self.zeta() ** self.p if self.degree > 1 else self.zeta()
        powers = [self.one]
        for _ in range(1, self.degree):
            powers.append(powers[-1] * zp)
        out = self.zero
        for c, pw in zip(elem.coeffs, powers):
            out = out + pw * c
        return out

    def __repr__(self):
        return f"CycloRing(m={self.m}, p={self.p}, prec={self.prec})"
