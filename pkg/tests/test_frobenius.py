import random
from fractions import Fraction

import pytest

from padhg.frobenius import (
    change_frobenius,
    clear_poles,
    evaluate_at_teichmuller,
    full_verification,
    intertwiner_residual,
    residual_report,
    residue_matrix,
    specialize_frobenius,
    syntomic_series,
    to_coordinates,
    unit_root_quadratic,
)
from padhg.hypergeom import companion, make_datum, omega_hat_basis
from padhg.padics import PAdicNumber, PAdicRing, iwasawa_log, teichmuller
from padhg.series import QQ, SeriesMatrix, TruncSeries
from padhg.specfun import psi_coefficients, psi_p_value
from padhg.errors import BadSpecializationPoint

from conftest import random_unit_fraction


def test_n1_closed_form():
    # a=(1/2), b=(1), c=1: A = (1-z)^(1/2) (1-z^p)^(-1/2) up to normalization
    p = 5
    d = make_datum([Fraction(1, 2)], [1], p)
    out = full_verification(d, Fraction(1), 20, 8)
    assert out["certified_zero"]
    A = out["matrix_coords"].entries[0, 0]

    def binom(alpha, k):
        o = Fraction(1)
        for i in range(k):
            o *= (alpha - i) / (i + 1)
        return o

    T = 20
    sq = TruncSeries(QQ, [binom(Fraction(1, 2), k) * (-1) ** k
                          for k in range(T)], T)
    zp = TruncSeries(QQ, [0] * 5 + [1], T)
    inv_sq = TruncSeries(QQ, [binom(Fraction(-1, 2), k) * (-1) ** k
                              for k in range(T)], T)
    expect = sq * inv_sq.frobenius_substitute(1, 5)
    ring = A.ring
    for j in range(T):
        assert A.coeffs[j].agrees(ring(expect.coeffs[j]), 6), j


def test_residue_matrix_shape_degenerate():
    # s = n = 2: [[1, p Psi_1], [0, p]]
    p = 5
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, 1], p)
    fm = residue_matrix(d, Fraction(1), "degenerate", 12, 8)
    B = fm.entries
    assert B[0, 0].coeffs[0].agrees(1, 8)
    assert B[1, 0].is_certified_zero()
    assert B[1, 1].coeffs[0].agrees(Fraction(p), 8)
    psi1 = psi_p_value(0, d.a, d.b, 10, p)
    assert B[0, 1].coeffs[0].agrees(psi1 * p, 7)
    assert fm.basis == "omega-hat" and fm.mode == "degenerate"


def test_residue_matrix_block_structure_mixed():
    p = 7
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, Fraction(1, 2)], p)
    fm = residue_matrix(d, Fraction(1), "degenerate", 12, 6)
    B = fm.entries
    # lower-right entry carries z^mu_k
    mu = d.mu(1)
    assert mu > 0
    ent = B[1, 1]
    assert all(ent.coeffs[j].is_zero() for j in range(mu))
    assert not ent.coeffs[mu].is_zero()
    assert B[0, 1].is_certified_zero() and B[1, 0].is_certified_zero()


def test_determinant_closed_form():
    # det B = p^(s(s-1)/2) prod_{k>s} c^(1-b1_k)(gamma'_k/gamma'_1) z^(sum mu)
    from padhg.hypergeom import gamma_prime_1, gamma_prime_k
    p = 7
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, Fraction(1, 2)], p)
    fm = residue_matrix(d, Fraction(1), "degenerate", 12, 6)
    det = fm.entries.det()
    mu = d.mu(1)
    lead = det.coeffs[mu]
    expect = gamma_prime_k(d, 1, 8) / gamma_prime_1(d, 8)  # p^0 * ratio
    assert lead.agrees(expect, 5)
    for j in range(fm.entries.T):
        if j != mu:
            assert det.coeffs[j].is_zero(), j


def test_to_coordinates_self_map_identity_sanity():
    # B = I and the same basis on both sides gives A(0) = I
    p = 5
    d = make_datum([Fraction(1, 2)], [Fraction(1, 3)], p)
    ob = omega_hat_basis(d, 10)
    ring = PAdicRing(p, 8)
    fmI = residue_matrix(d, Fraction(1), "hypothesis", 10, 8)
    eye = SeriesMatrix.identity(ring, 1, 10)
    fmI.entries = eye
    A = to_coordinates(fmI, ob, ob)
    const = A.entries.constant_term()
    assert const[0][0].agrees(1, 7)


@pytest.mark.parametrize("a,b,p,c", [
    ([Fraction(1, 2)], [1], 5, Fraction(1)),
    ([Fraction(1, 2)], [1], 5, Fraction(6)),
    ([Fraction(1, 3), Fraction(2, 3)], [1, 1], 5, Fraction(6)),
    ([Fraction(1, 4), Fraction(3, 4)], [1, 1], 3, Fraction(4)),
    ([Fraction(1, 3), Fraction(2, 3)], [1, Fraction(1, 2)], 7, Fraction(8)),
    ([Fraction(1, 3), Fraction(2, 3)],
     [Fraction(1, 5), Fraction(4, 5)], 7, Fraction(1)),
])
def test_intertwiner_residual_vanishes(a, b, p, c):
    d = make_datum(a, b, p)
    prec = 10 if p == 3 else (8 if p == 5 else 6)
    out = full_verification(d, c, 28, prec)
    assert out["certified_zero"], out["witness"]
    assert out["m_eff"] >= 4


def test_negative_control_shifted_column_scale():
    # scaling a single shifted column breaks the p-power grading: the
    # residual must show up at z-order <= 1
    p = 5
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, 1], p)
    fm = residue_matrix(d, Fraction(1), "degenerate", 20, 8)
    B = fm.entries
    ring = B.ring
    ent = [[B[i, j] for j in range(2)] for i in range(2)]
    ent[1][1] = ent[1][1] * ring(Fraction(6))
    fm.entries = SeriesMatrix(ring, ent, B.T)
    tb = omega_hat_basis(d, 20)
    sb = omega_hat_basis(d.primed(), 20)
    A = to_coordinates(fm, tb, sb)
    _, NH = companion(d.a, d.b, 20)
    _, N1 = companion(d.a1, d.b1, 20)
    R = intertwiner_residual(A.entries, NH, N1, fm.c, p)
    ok, _, witness = residual_report(R)
    assert not ok and witness[2] <= 1


def test_negative_control_mu_shift():
    # wrong z-power on an eigencolumn fails at low order
    p = 7
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, Fraction(1, 2)], p)
    fm = residue_matrix(d, Fraction(1), "degenerate", 20, 6)
    B = fm.entries
    ring = B.ring
    z = TruncSeries(ring, [ring(0), ring(1)], B.T)
    ent = [[B[i, j] for j in range(2)] for i in range(2)]
    ent[1][1] = ent[1][1] * z
    fm.entries = SeriesMatrix(ring, ent, B.T)
    tb = omega_hat_basis(d, 20)
    sb = omega_hat_basis(d.primed(), 20)
    A = to_coordinates(fm, tb, sb)
    _, NH = companion(d.a, d.b, 20)
    _, N1 = companion(d.a1, d.b1, 20)
    R = intertwiner_residual(A.entries, NH, N1, fm.c, p)
    ok, _, witness = residual_report(R)
    assert not ok


def test_eigencolumn_scaling_lies_in_centralizer():
    # scaling one eigen-column constant keeps the residual at zero: the
    # truncated equation determines the matrix only up to the centralizer
    # of the source connection (this is why the geometric cross-check of
    # the unit roots exists)
    p = 7
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, Fraction(1, 2)], p)
    fm = residue_matrix(d, Fraction(1), "degenerate", 20, 6)
    B = fm.entries
    ring = B.ring
    ent = [[B[i, j] for j in range(2)] for i in range(2)]
    ent[1][1] = ent[1][1] * ring(Fraction(8))
    fm.entries = SeriesMatrix(ring, ent, B.T)
    tb = omega_hat_basis(d, 20)
    sb = omega_hat_basis(d.primed(), 20)
    A = to_coordinates(fm, tb, sb)
    _, NH = companion(d.a, d.b, 20)
    _, N1 = companion(d.a1, d.b1, 20)
    R = intertwiner_residual(A.entries, NH, N1, fm.c, p)
    ok, m_eff, _ = residual_report(R)
    assert ok and m_eff >= 4


def test_change_frobenius_trivial_and_column_scaling():
    p = 7
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, Fraction(1, 2)], p)
    fm = residue_matrix(d, Fraction(1), "degenerate", 16, 6)
    same = change_frobenius(fm, Fraction(1))
    ok, _, _ = residual_report(same.entries - fm.entries)
    assert ok
    cnew = Fraction(8)
    moved = change_frobenius(fm, cnew)
    direct = residue_matrix(d, cnew, "degenerate", 16, 6)
    ok2, meff, _ = residual_report(moved.entries - direct.entries)
    assert ok2 and meff >= 4
    # the eigencolumn scales by c^(1 - b1_k)
    from padhg.padics import unit_pow_rational
    ring = fm.entries.ring
    scale = unit_pow_rational(ring(cnew), 1 - d.b1[1])
    diff = moved.entries[1, 1] - fm.entries[1, 1] * scale
    assert diff.is_certified_zero()


def test_group_like_composition():
    # data with doubly-primed parameters equal to the original: the product
    # A(z) sigma(A'(z)) satisfies the squared-lift equation
    p = 5
    d = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, 1], p)
    d1 = d.primed()
    assert d1.primed().a == d.a and d1.primed().b == d.b
    T, prec = 24, 8
    out = full_verification(d, Fraction(1), T, prec)
    out1 = full_verification(d1, Fraction(1), T, prec)
    A = out["matrix_coords"].entries
    A1 = out1["matrix_coords"].entries
    M = A * A1.frobenius_substitute(Fraction(1), p)
    _, NH = companion(d.a, d.b, T)
    ring = A.ring
    from padhg.frobenius import qq_matrix_to_ring
    NHp = qq_matrix_to_ring(NH, ring)
    _, N2 = companion(d.a, d.b, T)       # doubly-primed = original
    N2p = qq_matrix_to_ring(N2, ring)
    sub = N2p.frobenius_substitute(Fraction(1), p) \
        .frobenius_substitute(Fraction(1), p)
    R = M.D() + NHp * M - (M * sub).scalar_mul(Fraction(p * p))
    ok, meff, wit = residual_report(R)
    assert ok and meff >= 3, wit


def test_syntomic_series_contract_and_example():
    p = 5
    d = make_datum([Fraction(1, 4), Fraction(3, 4)], [1, 1], p)
    for c in (Fraction(1), Fraction(6)):
        coeffs = syntomic_series(d, c, 6)
        assert len(coeffs) == d.s
        # coefficient of the deepest shifted vector: the worked constant
        ring = PAdicRing(p, 8)
        logc = PAdicNumber.exact_zero_of(p) if c == 1 \
            else iwasawa_log(ring(c)) * Fraction(1, p)
        u = PAdicNumber.from_rational(Fraction(64) ** (p - 1), p, 9)
        log64 = iwasawa_log(u) * Fraction(1, p)
        expect = (log64 + logc) * (log64 + logc) * Fraction(1, 2)
        assert coeffs[0].agrees(expect, 4), (c, coeffs[0], expect)
        # k = s coefficient at c=1 is Psi_1
        if c == 1:
            psi1 = psi_p_value(0, d.a, d.b, 8, p)
            assert coeffs[-1].agrees(psi1, 4)


def test_evaluate_at_teichmuller_constant_and_errors():
    p = 7
    ring = PAdicRing(p, 6)
    M = SeriesMatrix.from_constant(ring, [[2, 0], [0, 3]], 8)
    alpha = teichmuller(ring(3))
    vals, cert = evaluate_at_teichmuller(M, alpha)
    assert vals[0][0].agrees(2, 5) and vals[1][1].agrees(3, 5)
    with pytest.raises(BadSpecializationPoint):
        evaluate_at_teichmuller(M, ring(3))     # not a Teichmuller point
    with pytest.raises(BadSpecializationPoint):
        evaluate_at_teichmuller(M, teichmuller(ring(1)))


def test_specialization_trace_stability():
    # T vs T/2 agreement grows after pole clearing
    p = 7
    d = make_datum([Fraction(1, 2), Fraction(1, 2)], [1, 1], p)
    out = full_verification(d, Fraction(1), 64, 6)
    A = out["matrix_coords"].entries
    ring = A.ring
    alpha = teichmuller(PAdicRing(p, 6)(3))
    M, cert = specialize_frobenius(A, Fraction(1), p, alpha)
    assert cert >= 2
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    assert det.val == 1                      # weights 0 and 1
    assert (det * Fraction(1, p)).agrees(1, 2)
