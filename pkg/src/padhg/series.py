"""Truncated power series and series matrices over an exact coefficient ring
(rationals, Q_p, or a cyclotomic extension), plus the Frobenius substitution
z -> c z^p and the coefficient-recursive solver for regular ODEs.

A ``TruncSeries`` represents z^offset * sum_j c_j z^j known modulo
z^(offset+T).  Offsets implement the bounded-pole (Laurent) variant; only
finitely many negative exponents ever arise.  All values are immutable.
"""

from fractions import Fraction

from .errors import (
    DimensionMismatch,
    DivisionByZero,
    InvalidLift,
    NonUnitConstantTerm,
    SingularRecursion,
)
from .padics import PAdicNumber, frac_vp


class QQRing:
    """Coefficient-ring handle for exact rationals."""

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, q):
        return Fraction(q)

    def is_zero(self, x):
        return x == 0

    def inv(self, x):
        if x == 0:
            raise DivisionByZero("inverse of zero rational")
        return 1 / Fraction(x)

    def __repr__(self):
        return "QQ"


QQ = QQRing()


class TruncSeries:
    __slots__ = ("ring", "coeffs", "T", "offset")

    def __init__(self, ring, coeffs, T=None, offset=0):
        self.ring = ring
        coeffs = list(coeffs)
        if T is None:
            T = len(coeffs)
        if len(coeffs) < T:
            coeffs += [ring.zero] * (T - len(coeffs))
        self.coeffs = tuple(coeffs[:T])
        self.T = T
        self.offset = offset

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, ring, T, offset=0):
        return cls(ring, [], T, offset)

    @classmethod
    def one(cls, ring, T):
        return cls(ring, [ring.one], T)

    @classmethod
    def z_power(cls, ring, k, T, scale=None):
        c = ring.one if scale is None else scale
        return cls(ring, [c], T, offset=k)

    @classmethod
    def from_rational_coeffs(cls, ring, rationals, T, offset=0):
        return cls(ring, [ring(c) for c in rationals], T, offset)

    # -- shape ------------------------------------------------------------

    @property
    def valid_to(self):
        """Exponent bound: the series is known modulo z^valid_to."""
        return self.offset + self.T

    def coeff(self, k):
        """Coefficient of z^k (absolute exponent)."""
        j = k - self.offset
        if j < 0:
            return self.ring.zero
        if j >= self.T:
            raise IndexError(f"coefficient of z^{k} beyond truncation")
        return self.coeffs[j]

    def normalized(self, offset=0, T=None):
        """Re-express at the given offset (must not exceed current one)."""
        if offset > self.offset:
            for j in range(self.offset, offset):
                if not self.ring.is_zero(self.coeff(j)):
                    raise ValueError("cannot raise offset past nonzero term")
        if T is None:
            T = self.valid_to - offset
        shift = self.offset - offset
        coeffs = [self.ring.zero] * max(shift, 0) + list(self.coeffs)
        if shift < 0:
            coeffs = coeffs[-shift:]
        return TruncSeries(self.ring, coeffs, T, offset)

    def truncate(self, T):
        return TruncSeries(self.ring, self.coeffs[:T], T, self.offset)

    # -- arithmetic ---------------------------------------------------------

    def _align(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries(self.ring, [self.ring(other)], self.T)
        o = min(self.offset, other.offset)
        valid = min(self.valid_to, other.valid_to)
        return self.normalized(o, valid - o), other.normalized(o, valid - o)

    def __add__(self, other):
        a, b = self._align(other)
        return TruncSeries(a.ring, [x + y for x, y in zip(a.coeffs, b.coeffs)],
                           a.T, a.offset)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.ring, [-c for c in self.coeffs], self.T,
                           self.offset)

    def __sub__(self, other):
        a, b = self._align(other)
        return TruncSeries(a.ring, [x - y for x, y in zip(a.coeffs, b.coeffs)],
                           a.T, a.offset)

    def __rsub__(self, other):
        return (-self) + other

    def scalar_mul(self, c):
        return TruncSeries(self.ring, [x * c for x in self.coeffs], self.T,
                           self.offset)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            # ring coefficients multiply ints/Fractions/ring elements directly
            return self.scalar_mul(other)
        T = min(self.T, other.T)
        out = [self.ring.zero] * T
        for i, a in enumerate(self.coeffs[:T]):
            if self.ring.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs[:T - i]):
                if self.ring.is_zero(b):
                    continue
                out[i + j] = out[i + j] + a * b
        return TruncSeries(self.ring, out, T, self.offset + other.offset)

    __rmul__ = __mul__

    def inverse(self):
        """Inverse modulo z^T; leading coefficient must be invertible."""
        g0 = self.coeffs[0]
        if self.ring.is_zero(g0):
            raise NonUnitConstantTerm("leading coefficient is (certified) zero")
        inv0 = self.ring.inv(g0)
        out = [self.ring.zero] * self.T
        out[0] = inv0
        for k in range(1, self.T):
            acc = self.ring.zero
            for i in range(1, k + 1):
                if i < self.T and not self.ring.is_zero(self.coeffs[i]):
                    acc = acc + self.coeffs[i] * out[k - i]
            out[k] = -(inv0 * acc)
        return TruncSeries(self.ring, out, self.T, -self.offset)

    def __truediv__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scalar_mul(self.ring.inv(self.ring(other)))
        return self * other.inverse()

    # -- operators ----------------------------------------------------------

    def D(self):
        """Euler operator z d/dz: z^k -> k z^k."""
        return TruncSeries(self.ring,
                           [(self.offset + j) * c if not self.ring.is_zero(c)
                            else self.ring.zero
                            for j, c in enumerate(self.coeffs)],
                           self.T, self.offset)

    def scale_z(self, lam):
        """Composition with the scalar substitution z -> lam*z."""
        lam = self.ring(lam) if isinstance(lam, (int, Fraction)) else lam
        out = []
        power = lam ** self.offset if self.offset >= 0 else None
        if self.offset < 0:
            power = self.ring.inv(lam) ** (-self.offset)
        for c in self.coeffs:
            out.append(c * power)
            power = power * lam
        return TruncSeries(self.ring, out, self.T, self.offset)

    def frobenius_substitute(self, c, p, T_out=None):
        """f(c z^p) truncated; requires c in 1+pZ_p (or rational of that form)."""
        _validate_lift(c, p)
        if T_out is None:
            T_out = self.T
        new_offset = p * self.offset
        out = [self.ring.zero] * T_out
        cpow = _lift_power(self.ring, c, self.offset)
        for j, a in enumerate(self.coeffs):
            e = p * j                      # relative exponent in the output
            if e >= T_out:
                break
            if not self.ring.is_zero(a):
                out[e] = a * cpow
            cpow = cpow * _lift_power(self.ring, c, 1)
        return TruncSeries(self.ring, out, T_out, new_offset)

    def evaluate(self, x):
        """sum c_j x^(offset+j) by Horner; offset must be >= 0."""
        if self.offset < 0:
            raise ValueError("cannot evaluate a Laurent tail")
        acc = self.ring.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        for _ in range(self.offset):
            acc = acc * x
        return acc

    # -- predicates -----------------------------------------------------------

    def is_certified_zero(self):
        return all(self.ring.is_zero(c) for c in self.coeffs)

    def __repr__(self):
        head = ", ".join(repr(c) for c in self.coeffs[:4])
        return (f"TruncSeries(offset={self.offset}, T={self.T}, "
                f"coeffs=[{head}{', ...' if self.T > 4 else ''}])")

    def to_json(self):
        def enc(c):
            if isinstance(c, (int, Fraction)):
                return str(Fraction(c))
            return c.to_json()
        return {"T": self.T, "offset": self.offset,
                "coeffs": [enc(c) for c in self.coeffs]}


def _validate_lift(c, p):
    if isinstance(c, PAdicNumber):
        d = c - 1
        if not d.is_zero() and d.val < (2 if p == 2 else 1):
            raise InvalidLift("Frobenius lift constant must lie in 1+pZ_p")
        return
    q = Fraction(c)
    d = q - 1
    if d != 0 and frac_vp(d, p) < (2 if p == 2 else 1):
        raise InvalidLift("Frobenius lift constant must lie in 1+pZ_p")


def _lift_power(ring, c, e):
    if isinstance(c, PAdicNumber):
        base = c
    else:
        base = ring(c)
    if e == 0:
        return ring.one
    if e < 0:
        return ring.inv(_lift_power(ring, c, -e))
    out = base
    for _ in range(e - 1):
        out = out * base
    return out


# ---------------------------------------------------------------------------
# constant matrices over a ring
# ---------------------------------------------------------------------------

def _const_valuation(x):
    if isinstance(x, PAdicNumber):
        return None if x.is_zero() else x.val
    return None if x == 0 else 0


def ring_matrix_inverse(ring, rows):
    """Gauss-Jordan inverse of a constant matrix; pivots chosen
    minimal-valuation over Q_p to avoid spurious precision loss."""
    n = len(rows)
    a = [list(r) for r in rows]
    inv = [[ring.one if i == j else ring.zero for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot, pivot_val = None, None
        for r in range(col, n):
            v = _const_valuation(a[r][col])
            if v is None:
                continue
            if pivot is None or v < pivot_val:
                pivot, pivot_val = r, v
        if pivot is None:
            raise SingularRecursion("singular constant matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        scale = ring.inv(a[col][col])
        a[col] = [x * scale for x in a[col]]
        inv[col] = [x * scale for x in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if ring.is_zero(f):
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def ring_matrix_solve(ring, rows, rhs):
    """Solve A x = b for a constant matrix A and vector b."""
    inv = ring_matrix_inverse(ring, rows)
    return [_dot(ring, row, rhs) for row in inv]


def _dot(ring, xs, ys):
    acc = ring.zero
    for x, y in zip(xs, ys):
        acc = acc + x * y
    return acc


# ---------------------------------------------------------------------------
# series matrices
# ---------------------------------------------------------------------------

class SeriesMatrix:
    """Square matrix of TruncSeries (entries normalized to offset 0)."""

    __slots__ = ("ring", "n", "T", "entries")

    def __init__(self, ring, entries, T=None):
        self.ring = ring
        self.n = len(entries)
        norm = []
        Tmin = None
        for row in entries:
            if len(row) != self.n:
                raise DimensionMismatch("matrix must be square")
            out_row = []
            for e in row:
                if not isinstance(e, TruncSeries):
                    e = TruncSeries(ring, [ring(e)], T or 1)
                if e.offset != 0:
                    e = e.normalized(0)
                out_row.append(e)
                Tmin = e.T if Tmin is None else min(Tmin, e.T)
            norm.append(out_row)
        # never extend past what an entry certifies
        self.T = min(T, Tmin) if T is not None and Tmin else (Tmin or T or 1)
        self.entries = [[e.truncate(self.T) for e in row] for row in norm]

    @classmethod
    def identity(cls, ring, n, T):
        return cls(ring, [[TruncSeries.one(ring, T) if i == j
                           else TruncSeries.zero(ring, T)
                           for j in range(n)] for i in range(n)], T)

    @classmethod
    def zero(cls, ring, n, T):
        return cls(ring, [[TruncSeries.zero(ring, T) for _ in range(n)]
                          for _ in range(n)], T)

    @classmethod
    def from_constant(cls, ring, rows, T):
        return cls(ring, [[TruncSeries(ring, [ring(x)], T) for x in row]
                          for row in rows], T)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def map(self, fn):
        return SeriesMatrix(self.ring,
                            [[fn(e) for e in row] for row in self.entries])

    def __add__(self, other):
        self._compat(other)
        return SeriesMatrix(self.ring,
                            [[a + b for a, b in zip(r1, r2)]
                             for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._compat(other)
        return SeriesMatrix(self.ring,
                            [[a - b for a, b in zip(r1, r2)]
                             for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return self.map(lambda e: -e)

    def _compat(self, other):
        if not isinstance(other, SeriesMatrix) or other.n != self.n:
            raise DimensionMismatch("incompatible matrices")

    def __mul__(self, other):
        if isinstance(other, SeriesMatrix):
            self._compat(other)
            T = min(self.T, other.T)
            out = []
            for i in range(self.n):
                row = []
                for j in range(self.n):
                    acc = TruncSeries.zero(self.ring, T)
                    for k in range(self.n):
                        acc = acc + self.entries[i][k] * other.entries[k][j]
                    row.append(acc)
                out.append(row)
            return SeriesMatrix(self.ring, out, T)
        return self.map(lambda e: e * other)

    def scalar_mul(self, c):
        return self.map(lambda e: e.scalar_mul(c))

    def apply_vector(self, vec):
        """Matrix times a vector of TruncSeries."""
        out = []
        for i in range(self.n):
            acc = TruncSeries.zero(self.ring, self.T)
            for k in range(self.n):
                acc = acc + self.entries[i][k] * vec[k]
            out.append(acc)
        return out

    def D(self):
        return self.map(lambda e: e.D())

    def frobenius_substitute(self, c, p, T_out=None):
        return SeriesMatrix(self.ring,
                            [[e.frobenius_substitute(c, p, T_out or self.T)
                              for e in row] for row in self.entries])

    def constant_term(self):
        return [[e.coeff(0) for e in row] for row in self.entries]

    def coefficient(self, k):
        return [[e.coeff(k) if k < e.valid_to else self.ring.zero
                 for e in row] for row in self.entries]

    def inverse(self):
        """Series inverse; requires invertible constant term."""
        n, T = self.n, self.T
        a0 = self.constant_term()
        try:
            x0 = ring_matrix_inverse(self.ring, a0)
        except SingularRecursion:
            raise NonUnitConstantTerm("constant-term matrix is singular")
        coeffs = [x0]
        acoef = [self.coefficient(k) for k in range(T)]
        for k in range(1, T):
            acc = [[self.ring.zero] * n for _ in range(n)]
            for i in range(1, k + 1):
                ai = acoef[i]
                xk = coeffs[k - i]
                for r in range(n):
                    for cidx in range(n):
                        s = acc[r][cidx]
                        for m in range(n):
                            s = s + ai[r][m] * xk[m][cidx]
                        acc[r][cidx] = s
            neg = [[-x for x in row] for row in acc]
            coeffs.append([[_dot(self.ring, x0[r], [neg[m][cidx]
                                                    for m in range(n)])
                            for cidx in range(n)] for r in range(n)])
        entries = [[TruncSeries(self.ring,
                                [coeffs[k][i][j] for k in range(T)], T)
                    for j in range(n)] for i in range(n)]
        return SeriesMatrix(self.ring, entries, T)

    def det(self):
        """Determinant by cofactor expansion (n is small here)."""
        n = self.n
        if n == 1:
            return self.entries[0][0]
        acc = TruncSeries.zero(self.ring, self.T)
        for j in range(n):
            minor = SeriesMatrix(self.ring,
                                 [[self.entries[r][c]
                                   for c in range(n) if c != j]
                                  for r in range(1, n)], self.T)
            term = self.entries[0][j] * minor.det()
            acc = acc + term if j % 2 == 0 else acc - term
        return acc

    def is_certified_zero(self):
        return all(e.is_certified_zero() for row in self.entries for e in row)

    def to_json(self):
        return {"n": self.n, "T": self.T,
                "entries": [[e.to_json() for e in row]
                            for row in self.entries]}


# ---------------------------------------------------------------------------
# regular ODE solver
# ---------------------------------------------------------------------------

def solve_regular_ode(lmbda, N, rhs, v0):
    """Unique v with (D - lmbda) v + N v = rhs and v(0) = v0, solved
    coefficient-by-coefficient:

        v_j = ((j - lmbda) I + N_0)^(-1) (rhs_j - sum_{i<j} N_{j-i} v_i).

    ``N`` is a SeriesMatrix, ``rhs`` a vector of TruncSeries, ``v0`` a vector
    of ring constants.  Raises SingularRecursion when some shift matrix is
    not invertible at working precision.
    """
    ring, n, T = N.ring, N.n, N.T
    ncoef = [N.coefficient(k) for k in range(T)]
    rhs_c = [[r.coeff(k) if k < r.valid_to else ring.zero for r in rhs]
             for k in range(T)]
    vs = [list(v0)]
    lam = ring(lmbda) if isinstance(lmbda, (int, Fraction)) else lmbda
    for j in range(1, T):
        b = list(rhs_c[j])
        for i in range(j):
            ni = ncoef[j - i]
            vi = vs[i]
            for r in range(n):
                b[r] = b[r] - _dot(ring, ni[r], vi)
        shift = [[ncoef[0][r][c] + (ring(j) - lam if r == c else ring.zero)
                  for c in range(n)] for r in range(n)]
        try:
            vs.append(ring_matrix_solve(ring, shift, b))
        except SingularRecursion:
            raise SingularRecursion(f"shift matrix singular at order {j}")
    return [TruncSeries(ring, [vs[k][r] for k in range(T)], T)
            for r in range(n)]
