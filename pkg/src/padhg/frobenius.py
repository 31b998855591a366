"""Assembly of the explicit Frobenius matrices on hypergeometric modules, the
coordinate transport to the D-power basis, the intertwiner residual check,
the change-of-lift transform, the syntomic extension series, and Teichmuller
specialization.

Sign and orientation conventions (derived once, used everywhere).  Write a
module element as a column vector over the basis (w, Dw, ..., D^{n-1}w); the
Euler operator acts as v -> D.v + N_H v where N_H has ones on the subdiagonal
and -q_j in the last column.  For an intertwiner Phi with matrix A defined by
Phi(e_i) = sum_j A_{ji} f_j (columns = images) and the lift t(z) = c z^p, the
defining relation D Phi = p Phi D becomes

    D.A + N_H A = p A N_H'(c z^p),

where N_H' is the companion matrix of the source (Dwork-primed) parameters.
The n = 1 case a=(1/2), b=(1) pins the signs: A = (1-z)^{1/2} (1-cz^p)^{-1/2}
solves it.

In the canonical basis the matrix has the block shape: an upper-triangular
column-scaled Toeplitz block in the coefficient sequence (p-powers down the
columns) for the unit lower parameters, and a diagonal of constants times
z^{mu_k} for the rest.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadSpecializationPoint,
    DimensionMismatch,
)
from .hypergeom import (
    HGDatum,
    companion,
    gamma_k,
    gamma_prime_1,
    gamma_prime_k,
    omega_hat_basis,
    validate,
)
from .padics import PAdicNumber, PAdicRing, iwasawa_log, unit_pow_rational
from .series import QQ, SeriesMatrix, TruncSeries
from .specfun import psi_coefficients

log = logging.getLogger(__name__)


@dataclass
class FrobeniusMatrix:
    """Matrix of the intertwiner in a declared basis.

    ``entries`` maps source basis vectors (columns) to target coordinates;
    normalization tags record which basis vector is sent to which."""

    datum: HGDatum
    c: object                    # Fraction or PAdicNumber
    mode: str                    # "degenerate" | "hypothesis"
    basis: str                   # "omega-hat" | "D-power"
    normalization: str
    entries: SeriesMatrix
    prec: int

    def to_json(self):
        return {"datum": self.datum.to_json(),
                "c": str(self.c) if isinstance(self.c, Fraction)
                else self.c.to_json(),
                "mode": self.mode, "basis": self.basis,
                "normalization": self.normalization,
                "certified_prec": self.prec,
                "entries": self.entries.to_json()}


def _as_padic_c(c, ring):
    if isinstance(c, PAdicNumber):
        return c
    return ring(Fraction(c))


def _log_factor(c, ring, p):
    """-(1/p) log c (Iwasawa branch), zero for c = 1."""
    cp = _as_padic_c(c, ring)
    d = cp - 1
    if d.is_zero():
        return PAdicNumber.exact_zero_of(p)
    return iwasawa_log(cp) * Fraction(-1, p)


def _convolved_sequence(psi_values, mlog, max_j, p, ring):
    """e_j = sum_{i+i'=j} mlog^i / i! * Psi_{i'}."""
    out = []
    for j in range(max_j + 1):
        acc = PAdicNumber.exact_zero_of(p)
        fact = Fraction(1)
        mpow = ring(1)
        for i in range(j + 1):
            if i > 0:
                fact = fact * i
                mpow = mpow * mlog
            acc = acc + mpow * psi_values[j - i] * Fraction(1, fact)
            if i > 0 and mpow.is_zero():
                break                  # higher terms only gain valuation
        out.append(acc)
    return out


def residue_matrix(datum, c, mode, T, prec):
    """The Frobenius matrix in the canonical basis.

    degenerate: columns m <= s get p^(m-1) e_{m-k} in rows k <= m with
    e_j the log-convolved coefficient sequence; columns k > s get
    c^(1-b_k^(1)) (gamma'_k/gamma'_1) z^(mu_k).
    hypothesis: all columns diagonal, c^(1-b_k^(1)) (c_k^F/c_k) gamma_k z^(mu_k).
    """
    validate(datum, mode)
    p, n, s = datum.p, datum.n, datum.s
    work = prec + (1 if p >= 5 else 2)
    ring = PAdicRing(p, work)
    zero = TruncSeries.zero(ring, T)
    cols = []
    if mode == "degenerate":
        psis = psi_coefficients(datum.a, datum.b, s, max(s - 1, 0),
                                "bracket", p, work)
        mlog = _log_factor(c, ring, p)
        es = _convolved_sequence(psis.values, mlog, s - 1, p, ring)
        for m in range(1, s + 1):
            col = [zero] * n
            for k in range(1, m + 1):
                val = es[m - k] * Fraction(p) ** (m - 1)
                col[k - 1] = TruncSeries(ring, [val], T)
            cols.append(col)
        for k in range(s, n):
            col = [zero] * n
            cc = _column_constant_degenerate(datum, k, c, ring, work)
            col[k] = TruncSeries.z_power(ring, datum.mu(k), T, scale=cc)
            cols.append(col)
        normalization = "first-shifted-column-fixed"
    elif mode == "hypothesis":
        for k in range(n):
            col = [zero] * n
            cc = _column_constant_hypothesis(datum, k, c, ring, work)
            col[k] = TruncSeries.z_power(ring, datum.mu(k), T, scale=cc)
            cols.append(col)
        normalization = "eigencolumn-constants-paired"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    B = SeriesMatrix(ring, [[cols[j][i] for j in range(n)]
                            for i in range(n)], T)
    return FrobeniusMatrix(datum=datum, c=Fraction(c) if not
                           isinstance(c, PAdicNumber) else c,
                           mode=mode, basis="omega-hat",
                           normalization=normalization, entries=B, prec=prec)


def _c_power(c, exponent, ring):
    cp = _as_padic_c(c, ring)
    if (cp - 1).is_zero():
        return ring(1)
    return unit_pow_rational(cp, exponent)


def _column_constant_degenerate(datum, k, c, ring, prec):
    g1 = gamma_prime_1(datum, prec)
    gk = gamma_prime_k(datum, k, prec)
    cpow = _c_power(c, 1 - datum.b1[k], ring)
    return cpow * gk / g1


def _column_constant_hypothesis(datum, k, c, ring, prec):
    gk = gamma_k(datum, k, prec)
    ratio = datum.c_k(k, primed=True) / datum.c_k(k)
    cpow = _c_power(c, 1 - datum.b1[k], ring)
    return cpow * gk * ratio


# ---------------------------------------------------------------------------
# coordinate transport
# ---------------------------------------------------------------------------

def qq_matrix_to_ring(M, ring):
    """Convert a SeriesMatrix over QQ into the given p-adic ring."""
    def conv(e):
        return TruncSeries(ring, [ring(c) for c in e.coeffs], e.T, e.offset)
    return SeriesMatrix(ring, [[conv(e) for e in row] for row in M.entries],
                        M.T)


def to_coordinates(fm, target_basis, source_basis):
    """A(z) = S(z) B(z) S^F(c z^p)^(-1): the intertwiner matrix in the
    (w, Dw, ..., D^{n-1}w) coordinates.  Exact rational inversion when the
    lift constant is rational."""
    B = fm.entries
    ring = B.ring
    p = fm.datum.p
    T = min(B.T, target_basis.T, source_basis.T)
    S = target_basis.S
    SF = source_basis.S
    if isinstance(fm.c, Fraction):
        M = SF.frobenius_substitute(fm.c, p, T)
        Minv = M.inverse()                    # exact over QQ
        A = qq_matrix_to_ring(S, ring) * B * qq_matrix_to_ring(Minv, ring)
    else:
        SF_p = qq_matrix_to_ring(SF, ring)
        M = SF_p.frobenius_substitute(fm.c, p, T)
        A = qq_matrix_to_ring(S, ring) * B * M.inverse()
    return FrobeniusMatrix(datum=fm.datum, c=fm.c, mode=fm.mode,
                           basis="D-power", normalization=fm.normalization,
                           entries=A, prec=fm.prec)


# ---------------------------------------------------------------------------
# the intertwiner differential equation
# ---------------------------------------------------------------------------

def intertwiner_residual(A, NH, N1, c, p):
    """R = D.A + N_H A - p A N_H^(1)(c z^p); zero iff A interlaces the two
    connections as a Frobenius at the truncated order."""
    ring = A.ring
    if NH.ring is QQ or isinstance(NH.ring, type(QQ)):
        NH = qq_matrix_to_ring(NH, ring)
    if N1.ring is QQ or isinstance(N1.ring, type(QQ)):
        N1 = qq_matrix_to_ring(N1, ring)
    if NH.n != A.n or N1.n != A.n:
        raise DimensionMismatch("companion and intertwiner sizes differ")
    N1_sub = N1.frobenius_substitute(c, p, A.T)
    return A.D() + NH * A - (A * N1_sub).scalar_mul(Fraction(p))


def residual_report(R, z_order=None):
    """Certification summary of a residual matrix.

    Returns (certified_zero, m_eff, witness): m_eff is the minimal absolute
    precision over all (certified-zero) coefficients; witness locates the
    first coefficient that is certifiably nonzero, as (row, col, z-order)."""
    m_eff = None
    witness = None
    bound = z_order if z_order is not None else R.T
    for i, row in enumerate(R.entries):
        for j, e in enumerate(row):
            for idx, coeff in enumerate(e.coeffs):
                if e.offset + idx >= bound:
                    break
                if isinstance(coeff, PAdicNumber):
                    if coeff.is_zero():
                        ap = coeff.abs_prec
                        if ap is not None:
                            m_eff = ap if m_eff is None else min(m_eff, ap)
                    else:
                        if witness is None or e.offset + idx < witness[2]:
                            witness = (i, j, e.offset + idx)
                else:
                    if coeff != 0 and witness is None:
                        witness = (i, j, e.offset + idx)
    return witness is None, m_eff, witness


def full_verification(datum, c, T, prec, mode=None):
    """Build everything and check the intertwiner equation; returns a dict
    with the matrices and the residual report."""
    if mode is None:
        mode = "degenerate" if datum.s >= 1 else "hypothesis"
    source = datum.primed()
    fm = residue_matrix(datum, c, mode, T, prec)
    target_basis = omega_hat_basis(datum, T)
    source_basis = omega_hat_basis(source, T)
    Afm = to_coordinates(fm, target_basis, source_basis)
    _, NH = companion(datum.a, datum.b, T)
    _, N1 = companion(source.a, source.b, T)
    R = intertwiner_residual(Afm.entries, NH, N1, fm.c, datum.p)
    ok, m_eff, witness = residual_report(R)
    log.info("verification %s c=%s: zero=%s m_eff=%s witness=%s",
             datum.to_json(), c, ok, m_eff, witness)
    return {"matrix_omega": fm, "matrix_coords": Afm, "residual": R,
            "certified_zero": ok, "m_eff": m_eff, "witness": witness,
            "target_basis": target_basis, "source_basis": source_basis,
            "NH": NH, "N1": N1}


# ---------------------------------------------------------------------------
# change of Frobenius lift
# ---------------------------------------------------------------------------

def change_frobenius(fm, c_new):
    """Transform the canonical-basis matrix from lift z^p to c z^p:
    eigen-columns scale by c^(1-b_k^(1)); shifted columns convolve with the
    powers of -log(c)."""
    if fm.basis != "omega-hat":
        raise ValueError("change of lift applies to the canonical basis")
    base_c = fm.c
    if not (isinstance(base_c, Fraction) and base_c == 1):
        raise ValueError("start from the plain lift (c = 1)")
    datum = fm.datum
    p, n, s = datum.p, datum.n, datum.s
    ring = fm.entries.ring
    T = fm.entries.T
    cp = _as_padic_c(c_new, ring)
    d = cp - 1
    mlog = PAdicNumber.exact_zero_of(p) if d.is_zero() else -iwasawa_log(cp)
    cols = [[fm.entries[i, j] for i in range(n)] for j in range(n)]
    new_cols = []
    for m in range(1, s + 1):
        acc = [TruncSeries.zero(ring, T) for _ in range(n)]
        fact = Fraction(1)
        mpow = ring(1)
        for i in range(m):
            if i > 0:
                fact = fact * i
                mpow = mpow * mlog
            scale = mpow * Fraction(1, fact)
            for r in range(n):
                acc[r] = acc[r] + cols[m - i - 1][r] * scale
            if i > 0 and mpow.is_zero():
                break
        new_cols.append(acc)
    for k in range(s, n):
        cpow = _c_power(c_new, 1 - datum.b1[k], ring)
        new_cols.append([cols[k][r] * cpow for r in range(n)])
    B = SeriesMatrix(ring, [[new_cols[j][i] for j in range(n)]
                            for i in range(n)], T)
    return FrobeniusMatrix(datum=datum, c=Fraction(c_new)
                           if not isinstance(c_new, PAdicNumber) else c_new,
                           mode=fm.mode, basis="omega-hat",
                           normalization=fm.normalization,
                           entries=B, prec=fm.prec)


# ---------------------------------------------------------------------------
# syntomic extension series
# ---------------------------------------------------------------------------

def syntomic_series(datum, c, prec):
    """Coefficients over the shifted basis vectors of the extension class:

        coeff_k = sum_{i+j=s+1-k} (-p^{-1} log c)^i / i! * Psi_j,  1 <= k <= s,

    where the Psi_j are the bracket coefficients of the rank-(n+1)
    extension datum (an extra upper parameter 0 and an extra unit lower
    parameter), whose bracket product runs over the original non-unit lower
    parameters; numerically these coincide with the rank-n bracket values."""
    validate(datum, "degenerate")
    p, s = datum.p, datum.s
    work = prec + (1 if p >= 5 else 2)
    ring = PAdicRing(p, work)
    psis = psi_coefficients(datum.a, datum.b, s, s, "bracket", p, work)
    mlog = _log_factor(c, ring, p)
    es = _convolved_sequence(psis.values, mlog, s, p, ring)
    return [es[s + 1 - k] for k in range(1, s + 1)]


# ---------------------------------------------------------------------------
# Teichmuller specialization
# ---------------------------------------------------------------------------

def clear_poles(A, c, p, order):
    """Multiply entrywise by ((1-z)(1-c z^p))^order.  The matrix entries are
    overconvergent with poles at z = 1 (and its Frobenius preimage); after
    clearing, the z-Taylor tail decays p-adically, so truncated evaluation on
    the unit circle stabilizes."""
    ring = A.ring
    onez = TruncSeries(ring, [ring(1), ring(-1)], A.T)
    cz = _as_padic_c(c, ring) if not isinstance(c, Fraction) else ring(c)
    onezp = TruncSeries(ring, [ring(1)] + [ring(0)] * (p - 1) + [-cz], A.T)
    f = TruncSeries.one(ring, A.T)
    for _ in range(order):
        f = f * onez * onezp
    return A.map(lambda e: e * f)


def specialize_frobenius(A, c, p, alpha, clear_order=None):
    """Frobenius matrix of the fiber at a Teichmuller point alpha: clear the
    z = 1 poles, evaluate the (now decaying) series, divide the pole factor
    back out.  Returns (matrix, certified_digits)."""
    if clear_order is None:
        clear_order = A.n + 1
    C = clear_poles(A, c, p, clear_order)
    M, cert = evaluate_at_teichmuller(C, alpha)
    ring = A.ring
    calpha = (_as_padic_c(c, ring) if not isinstance(c, Fraction)
              else ring(c)) * alpha ** p
    denom = ((ring(1) - alpha) * (ring(1) - calpha)) ** clear_order
    scale = denom.inverse()
    return [[x * scale for x in row] for row in M], cert


def char_poly_2x2(M):
    """(trace, det) of a 2x2 fiber matrix."""
    t = M[0][0] + M[1][1]
    d = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return t, d


def unit_root_quadratic(trace, det):
    """Hensel-style unit root of X^2 - trace X + det (det of valuation > 0,
    trace a unit)."""
    u = trace
    for _ in range(6):
        u = trace - det / u
    return u


def evaluate_at_teichmuller(A, alpha):
    """Entrywise evaluation at a Teichmuller point; certified digits are the
    agreement between the full and the half truncation (empirical z-tail)."""
    if not isinstance(alpha, PAdicNumber):
        raise BadSpecializationPoint("alpha must be a PAdicNumber")
    p = alpha.p
    if not alpha.is_unit():
        raise BadSpecializationPoint("alpha must be a unit")
    if not (alpha ** p - alpha).is_zero():
        raise BadSpecializationPoint("alpha is not a Teichmuller point")
    d1 = alpha - 1
    if d1.is_zero() or d1.val > 0:
        raise BadSpecializationPoint("alpha ≡ 1 is a singular fiber")
    full = [[e.evaluate(alpha) for e in row] for row in A.entries]
    half = [[e.truncate(max(A.T // 2, 1)).evaluate(alpha)
             for e in row] for row in A.entries]
    cert = None
    for i in range(A.n):
        for j in range(A.n):
            ap = full[i][j].agreement_prec(half[i][j])
            if ap is not None:
                cert = ap if cert is None else min(cert, ap)
    return full, cert
