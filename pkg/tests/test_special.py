"""Reference tests for the hand-rolled special functions.

Expected values were frozen from 40-digit arbitrary-precision summation.
"""

import numpy as np
import pytest

from seastab.special import exp1, j0, j1, j1c, j2c

J0_REF = {
    0.05: 0.99937509764946858,
    0.5: 0.9384698072408129,
    1.0: 0.76519768655796655,
    2.5: -0.048383776468197996,
    5.0: -0.1775967713143383,
    8.0: 0.17165080713755391,
    11.0: -0.17119030040719609,
    11.9: 0.025049441699589645,
    12.1: 0.069666773606807312,
    15.0: -0.014224472826780773,
    20.0: 0.16702466434058315,
    35.0: -0.12684568275631257,
    60.0: -0.09147180408906187,
    120.0: 0.071823415829156128,
    300.0: -0.033298554876305668,
}

J1_REF = {
    0.05: 0.024992188313759701,
    0.5: 0.24226845767487389,
    1.0: 0.44005058574493352,
    2.5: 0.49709410246427404,
    5.0: -0.32757913759146522,
    8.0: 0.23463634685391462,
    11.0: -0.1767852989567215,
    11.9: -0.22898324966192406,
    12.1: -0.21574897337692481,
    15.0: 0.20510403861352276,
    20.0: 0.066833124175850046,
    35.0: 0.04399094217962564,
    60.0: 0.046598383758166318,
    120.0: -0.011805211433001891,
    300.0: -0.03188743137749995,
}

E1_REF = {
    0.01: 4.0379295765381138,
    0.1: 1.8229239584193906,
    0.5: 0.55977359477616081,
    1.0: 0.21938393439552027,
    2.0: 0.04890051070806112,
    5.0: 0.0011482955912753258,
    10.0: 4.1569689296853243e-6,
    30.0: 3.0215520106888125e-15,
}

J2C_REF = {
    1e-08: 0.125,
    0.05: 0.12497396036775377,
    1.0: 0.11490348493190048,
    5.0: 0.0018626046511100886,
    11.9: -0.00044865490766685211,
    12.1: -0.00071940277946749684,
    40.0: -6.6560917647377475e-7,
}


@pytest.mark.parametrize("x,ref", sorted(J0_REF.items()))
def test_j0_reference(x, ref):
    assert j0(x) == pytest.approx(ref, abs=5e-11)


@pytest.mark.parametrize("x,ref", sorted(J1_REF.items()))
def test_j1_reference(x, ref):
    assert j1(x) == pytest.approx(ref, abs=5e-11)


@pytest.mark.parametrize("x,ref", sorted(E1_REF.items()))
def test_exp1_reference(x, ref):
    assert exp1(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("x,ref", sorted(J2C_REF.items()))
def test_j2c_reference(x, ref):
    assert j2c(x) == pytest.approx(ref, rel=1e-8, abs=1e-14)


def test_vectorized_matches_scalar():
    xs = np.array([0.3, 2.0, 7.7, 13.4, 50.0])
    assert np.allclose(j0(xs), [j0(x) for x in xs], rtol=1e-13)
    assert np.allclose(j1(xs), [j1(x) for x in xs], rtol=1e-13)


def test_j1c_regular_at_origin():
    assert j1c(0.0) == pytest.approx(0.5, abs=1e-15)
    assert j1c(1e-8) == pytest.approx(0.5, rel=1e-12)
    assert j1c(3.0) == pytest.approx(j1(3.0) / 3.0, rel=1e-13)


def test_j1_odd_symmetry():
    assert j1(-2.5) == pytest.approx(-J1_REF[2.5], rel=1e-12)


def test_exp1_rejects_nonpositive():
    with pytest.raises(ValueError):
        exp1(0.0)
