"""Command-line front end: every computation of the library behind one verb,
with reproducible JSON output.

Rationals are written "num/den"; parameter lists are comma-separated.  Exit
codes: 0 success (for verify-intertwiner: residual certified zero), 1
mathematical validation error (machine-readable JSON on stdout), 2 usage
error.
"""

import argparse
import json
import random
import sys
from fractions import Fraction

from . import kernels
from .errors import PadhgError
from .frobenius import (
    full_verification,
    residue_matrix,
    specialize_frobenius,
    syntomic_series,
)
from .hypergeom import (
    gamma_k,
    gamma_k_alt,
    hg_series,
    make_datum,
    omega_hat_basis,
)
from .lvalues import (
    enumerate_characters,
    log_identity_check,
    lp_value,
    polygamma_from_lvalues,
    zeta_p,
)
from .dwork import katz_frobenius, katz_lists, legendre_ap, point_count
from .padics import PAdicNumber, PAdicRing, teichmuller
from .specfun import gamma_p, polygamma


def _frac(text):
    return Fraction(text)


def _fraclist(text):
    return [Fraction(x) for x in text.split(",")]


def _emit(obj, args):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":")) \
        if getattr(args, "json", False) \
        else json.dumps(obj, sort_keys=True, indent=2)
    print(text)


def _padic_out(value, source):
    return {"value": value.to_json(), "source": source,
            "certified_prec": value.abs_prec}


def cmd_gamma(args):
    v = gamma_p(args.z, args.prec, args.p)
    _emit(_padic_out(v, "gamma-limit-product"), args)
    return 0


def cmd_polygamma(args):
    v = polygamma(args.r, args.z, args.prec, args.p)
    _emit(_padic_out(v, "polygamma-limit-sum"), args)
    return 0


def cmd_zeta(args):
    res = zeta_p(args.r, args.aux, args.prec, args.p)
    out = res.to_json()
    _emit(out, args)
    return 0


def cmd_lvalue(args):
    chars = enumerate_characters(args.modulus, args.p)
    if not 0 <= args.char_index < len(chars):
        raise PadhgError(f"char index out of range 0..{len(chars)-1}")
    chi = chars[args.char_index]
    res = lp_value(args.r, chi, args.modulus, args.prec, args.p)
    _emit(res.to_json(), args)
    return 0


def cmd_polygamma_inverse(args):
    val, ring = polygamma_from_lvalues(args.r, args.k, args.modulus,
                                       args.prec, args.p)
    out = {"value": val.to_json(), "ring": ring.mode,
           "source": "polygamma-from-lvalues", "certified_prec": args.prec}
    _emit(out, args)
    return 0


def cmd_hg_series(args):
    f = hg_series(args.a, args.b, args.terms)
    out = {"coeffs": [str(c) for c in f.coeffs], "T": f.T,
           "source": "hypergeometric-series"}
    _emit(out, args)
    return 0


def cmd_gamma_k(args):
    datum = make_datum(args.a, args.b, args.p)
    g1 = gamma_k(datum, args.k, args.prec)
    g2 = gamma_k_alt(datum, args.k, args.prec)
    out = {"counting_form": g1.to_json(), "quotient_form": g2.to_json(),
           "agree_digits": g1.agreement_prec(g2),
           "source": "residue-constant"}
    _emit(out, args)
    return 0


def cmd_basis(args):
    datum = make_datum(args.a, args.b, args.p)
    ob = omega_hat_basis(datum, args.terms)
    out = {"datum": datum.to_json(),
           "S": [[e.to_json() for e in row] for row in ob.S.entries],
           "source": "canonical-basis"}
    _emit(out, args)
    return 0


def cmd_frobenius(args):
    datum = make_datum(args.a, args.b, args.p)
    mode = "degenerate" if datum.s >= 1 else "hypothesis"
    fm = residue_matrix(datum, args.c, mode, args.terms, args.prec)
    _emit(fm.to_json(), args)
    return 0


def cmd_verify(args):
    datum = make_datum(args.a, args.b, args.p)
    out = full_verification(datum, args.c, args.terms, args.prec)
    report = {"certified_zero": out["certified_zero"],
              "m_eff": out["m_eff"],
              "witness": out["witness"],
              "T": args.terms,
              "source": "intertwiner-residual"}
    _emit(report, args)
    return 0 if out["certified_zero"] else 1


def cmd_syntomic(args):
    datum = make_datum(args.a, args.b, args.p)
    coeffs = syntomic_series(datum, args.c, args.prec)
    out = {"coefficients": [c.to_json() for c in coeffs],
           "source": "syntomic-extension-series",
           "certified_prec": min((c.abs_prec for c in coeffs
                                  if c.abs_prec is not None), default=None)}
    _emit(out, args)
    return 0


def cmd_dwork(args):
    spec = katz_lists(args.n, args.d, args.w, args.p)
    if args.matrix:
        kf = katz_frobenius(spec, args.c, args.terms, args.prec)
        _emit(kf.to_json(), args)
    else:
        _emit(spec.to_json(), args)
    return 0


def cmd_pointcount(args):
    spec = katz_lists(args.n, args.d, args.w, args.p)
    count = point_count(spec, args.lambda0, args.ext)
    out = {"count": count, "q": args.p ** args.ext,
           "source": "exhaustive-point-count"}
    _emit(out, args)
    return 0


def cmd_legendre(args):
    ap = legendre_ap(args.lambda0, args.p)
    _emit({"a_p": ap, "p": args.p, "lambda": args.lambda0,
           "source": "exhaustive-point-count"}, args)
    return 0


def cmd_specialize(args):
    datum = make_datum(args.a, args.b, args.p)
    out = full_verification(datum, args.c, args.terms, args.prec)
    ring = PAdicRing(args.p, args.prec)
    alpha = teichmuller(ring(args.alpha))
    M, cert = specialize_frobenius(out["matrix_coords"].entries, args.c,
                                   args.p, alpha)
    _emit({"matrix": [[x.to_json() for x in row] for row in M],
           "certified_digits": cert,
           "source": "teichmuller-specialization"}, args)
    return 0


# ---------------------------------------------------------------------------
# selftest suites
# ---------------------------------------------------------------------------

def _suite_specfun(rng, report):
    from .padics import frac_vp
    p = 5
    for _ in range(5):
        num = rng.randrange(1, 40)
        den = rng.randrange(1, 40)
        while den % p == 0:
            den = rng.randrange(1, 40)
        z = Fraction(num, den)
        lhs = gamma_p(z + 1, 6, p)
        # unit branch: -z Gamma(z); p-divisible branch: -Gamma(z)
        if frac_vp(z, p) == 0:
            rhs = -PAdicRing(p, 8)(z) * gamma_p(z, 6, p)
        else:
            rhs = -gamma_p(z, 6, p)
        report("gamma-functional-equation", lhs.agrees(rhs, 6),
               lhs.agreement_prec(rhs))
        for r in (0, 1):
            d = polygamma(r, z + 1, 6, p) - polygamma(r, z, 6, p)
            if frac_vp(z, p) == 0:
                expect = PAdicRing(p, 8)(z) ** (-(r + 1))
            else:
                expect = PAdicNumber.exact_zero_of(p)
            ok = d.agrees(expect, 5)
            report(f"polygamma-step-r{r}", ok, d.agreement_prec(expect))


def _suite_padics(rng, report):
    from .padics import frac_vp
    for p in (3, 5, 7):
        M = 6
        for _ in range(10):
            q1 = Fraction(rng.randrange(-40, 40), rng.randrange(1, 30))
            q2 = Fraction(rng.randrange(-40, 40), rng.randrange(1, 30))
            if q1.denominator % p == 0 or q2.denominator % p == 0:
                continue
            x1 = PAdicNumber.from_rational(q1, p, M + 3) if q1 else None
            x2 = PAdicNumber.from_rational(q2, p, M + 3) if q2 else None
            if x1 is None or x2 is None:
                continue
            prod = PAdicNumber.from_rational(q1 * q2, p, M + 3)
            report("rational-homomorphism", (x1 * x2).agrees(prod, M), M)
        u = rng.randrange(1, p ** 3)
        if u % p:
            t = teichmuller(PAdicNumber.from_rational(u, p, 6))
            report("teichmuller-root", (t ** (p - 1)).agrees(1, 6), 6)


def _suite_series(rng, report):
    from .series import QQ, SeriesMatrix, TruncSeries, solve_regular_ode
    T = 12
    z = TruncSeries(QQ, [0, 1] + [0] * (T - 2), T)
    geo = TruncSeries(QQ, [1] * T, T)
    N = SeriesMatrix(QQ, [[z * geo * Fraction(-1, 2)]], T)
    v = solve_regular_ode(0, N, [TruncSeries.zero(QQ, T)], [Fraction(1)])[0]
    res = v.D() + N.entries[0][0] * v
    report("ode-residual", res.is_certified_zero(), T)
    a = TruncSeries(QQ, [rng.randrange(-5, 5) for _ in range(9)], 9)
    b = TruncSeries(QQ, [rng.randrange(-5, 5) for _ in range(9)], 9)
    lhs = (a * b).frobenius_substitute(1, 3)
    rhs = a.frobenius_substitute(1, 3) * b.frobenius_substitute(1, 3)
    report("substitution-homomorphism", (lhs - rhs).is_certified_zero(), 9)


def _suite_lvalues(rng, report):
    res = log_identity_check(3, 5, 7)
    report("log-identity-N3", res.is_zero(), res.abs_prec or res.val)
    z2 = zeta_p(3, 2, 5, 7).value
    z3 = zeta_p(3, 3, 5, 7).value
    report("zeta3-consistency", z2.agrees(z3, 5), z2.agreement_prec(z3))


def _suite_hypergeom(rng, report):
    from .hypergeom import euler_sum
    d = make_datum([Fraction(1, 3), Fraction(2, 3)],
                   [Fraction(1, 5), Fraction(4, 5)], 7)
    for k in range(2):
        g1 = gamma_k(d, k, 7)
        g2 = gamma_k_alt(d, k, 7)
        report(f"residue-constant-forms-k{k}", g1.agrees(g2, 7),
               g1.agreement_prec(g2))
    xs = [Fraction(1), Fraction(2), Fraction(5)]
    report("euler-interpolation", euler_sum(xs, 2) == 1
           and euler_sum(xs, 1) == 0, None)


def _suite_frobenius(rng, report):
    datum = make_datum([Fraction(1, 3), Fraction(2, 3)], [1, 1], 5)
    out = full_verification(datum, Fraction(1), 24, 6)
    report("intertwiner-13-23", out["certified_zero"], out["m_eff"])


def _suite_dwork(rng, report):
    spec = katz_lists(2, 4, (1, 1, 2), 7)
    report("cancelled-lists", spec.a_c == (Fraction(1, 4), Fraction(3, 4))
           and spec.b_c == (1, 1), None)
    ap = legendre_ap(3, 7)
    report("legendre-hasse", abs(ap) <= 2 * 7 ** 0.5, None)


_SUITES = {"padics": _suite_padics, "series": _suite_series,
           "specfun": _suite_specfun, "lvalues": _suite_lvalues,
           "hypergeom": _suite_hypergeom, "frobenius": _suite_frobenius,
           "dwork": _suite_dwork}


def cmd_selftest(args):
    rng = random.Random(args.seed)
    results = []
    failures = 0

    def report(name, ok, prec):
        nonlocal failures
        results.append({"check": name, "ok": bool(ok),
                        "certified_prec": prec})
        if not ok:
            failures += 1

    suites = [args.suite] if args.suite else sorted(_SUITES)
    for name in suites:
        if name not in _SUITES:
            raise PadhgError(f"unknown suite {name!r}")
        _SUITES[name](rng, report)
    _emit({"results": results, "failures": failures,
           "seed": args.seed, "backend": kernels.backend_name()}, args)
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _common(sub, prec=True, terms=False):
    sub.add_argument("--p", type=int, required=True, help="the prime p")
    if prec:
        sub.add_argument("--prec", type=int, default=8,
                         help="target p-adic digits M")
    if terms:
        sub.add_argument("--terms", type=int, default=64,
                         help="series truncation order T")
    sub.add_argument("--json", action="store_true",
                     help="compact single-line JSON")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="padhg",
        description="exact p-adic special functions, Dirichlet L-values and "
                    "Frobenius matrices on hypergeometric equations")
    sp = ap.add_subparsers(dest="verb", required=True)

    g = sp.add_parser("gamma", help="p-adic gamma value")
    g.add_argument("--z", type=_frac, required=True)
    _common(g)
    g.set_defaults(fn=cmd_gamma)

    g = sp.add_parser("polygamma", help="p-adic polygamma value")
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--z", type=_frac, required=True)
    _common(g)
    g.set_defaults(fn=cmd_polygamma)

    g = sp.add_parser("zeta", help="p-adic zeta value via an auxiliary modulus")
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--aux", type=int, default=2)
    _common(g)
    g.set_defaults(fn=cmd_zeta)

    g = sp.add_parser("lvalue", help="p-adic Dirichlet L-value")
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--modulus", type=int, required=True)
    g.add_argument("--char-index", type=int, required=True)
    _common(g)
    g.set_defaults(fn=cmd_lvalue)

    g = sp.add_parser("polygamma-inverse",
                      help="polygamma value reassembled from L-values")
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--modulus", type=int, required=True)
    _common(g)
    g.set_defaults(fn=cmd_polygamma_inverse)

    g = sp.add_parser("hg-series", help="hypergeometric series coefficients")
    g.add_argument("--a", type=_fraclist, required=True)
    g.add_argument("--b", type=_fraclist, required=True)
    g.add_argument("--terms", type=int, default=16)
    g.add_argument("--json", action="store_true")
    g.set_defaults(fn=cmd_hg_series)

    g = sp.add_parser("gamma-k", help="residue constant, both closed forms")
    g.add_argument("--a", type=_fraclist, required=True)
    g.add_argument("--b", type=_fraclist, required=True)
    g.add_argument("--k", type=int, required=True)
    _common(g)
    g.set_defaults(fn=cmd_gamma_k)

    g = sp.add_parser("basis", help="canonical basis coordinate matrix")
    g.add_argument("--a", type=_fraclist, required=True)
    g.add_argument("--b", type=_fraclist, required=True)
    _common(g, prec=False, terms=True)
    g.set_defaults(fn=cmd_basis)

    g = sp.add_parser("frobenius", help="residue matrix in the canonical basis")
    g.add_argument("--a", type=_fraclist, required=True)
    g.add_argument("--b", type=_fraclist, required=True)
    g.add_argument("--c", type=_frac, default=Fraction(1))
    _common(g, terms=True)
    g.set_defaults(fn=cmd_frobenius)

    g = sp.add_parser("verify-intertwiner",
                      help="machine-check the intertwiner equation")
    g.add_argument("--a", type=_fraclist, required=True)
    g.add_argument("--b", type=_fraclist, required=True)
    g.add_argument("--c", type=_frac, default=Fraction(1))
    _common(g, terms=True)
    g.set_defaults(fn=cmd_verify)

    g = sp.add_parser("syntomic", help="syntomic extension series coefficients")
    g.add_argument("--a", type=_fraclist, required=True)
    g.add_argument("--b", type=_fraclist, required=True)
    g.add_argument("--c", type=_frac, default=Fraction(1))
    _common(g)
    g.set_defaults(fn=cmd_syntomic)

    g = sp.add_parser("dwork", help="generalized pencil parameter lists")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--w", type=lambda s: [int(x) for x in s.split(",")],
                   required=True)
    g.add_argument("--c", type=_frac, default=Fraction(1))
    g.add_argument("--matrix", action="store_true",
                   help="also build the residue matrix")
    _common(g, terms=True)
    g.set_defaults(fn=cmd_dwork)

    g = sp.add_parser("pointcount", help="projective point count of a fiber")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--w", type=lambda s: [int(x) for x in s.split(",")],
                   required=True)
    g.add_argument("--lambda0", type=int, required=True)
    g.add_argument("--ext", type=int, default=1, help="field degree e")
    _common(g, prec=False)
    g.set_defaults(fn=cmd_pointcount)

    g = sp.add_parser("legendre", help="a_p of a Legendre fiber by counting")
    g.add_argument("--lambda0", type=int, required=True,
                   dest="lambda0")
    _common(g, prec=False)
    g.set_defaults(fn=cmd_legendre)

    g = sp.add_parser("specialize",
                      help="Frobenius matrix of a Teichmuller fiber")
    g.add_argument("--a", type=_fraclist, required=True)
    g.add_argument("--b", type=_fraclist, required=True)
    g.add_argument("--c", type=_frac, default=Fraction(1))
    g.add_argument("--alpha", type=int, required=True,
                   help="residue of the Teichmuller point")
    _common(g, terms=True)
    g.set_defaults(fn=cmd_specialize)

    g = sp.add_parser("selftest", help="run the property suites")
    g.add_argument("--suite", default=None,
                   help=f"one of: {', '.join(sorted(_SUITES))}")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--json", action="store_true")
    g.set_defaults(fn=cmd_selftest)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except PadhgError as exc:
        print(json.dumps({"error": exc.code, "detail": exc.detail},
                         sort_keys=True))
        return 1


if __name__ == "__main__":
    sys.exit(main())
