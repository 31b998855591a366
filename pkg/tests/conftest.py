import random

import pytest


@pytest.fixture
def rng():
    return random.Random(20240817)


def random_unit_fraction(rng, p, max_den=40):
    """Random rational in (0,1) with denominator prime to p."""
    from fractions import Fraction
    while True:
        den = rng.randrange(2, max_den)
        if den % p == 0:
            continue
        num = rng.randrange(1, den)
        f = Fraction(num, den)
        if 0 < f < 1:
            return f


def random_zp_fraction(rng, p, max_abs=60):
    """Random rational in Z_(p) (denominator prime to p)."""
    from fractions import Fraction
    while True:
        den = rng.randrange(1, max_abs)
        if den % p == 0:
            continue
        num = rng.randrange(-max_abs, max_abs)
        return Fraction(num, den)
