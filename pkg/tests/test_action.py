import numpy as np
import pytest

from seastab.action import (
    SEA_PREF,
    action_extended,
    action_extended_with_test,
    action_quartic,
    action_quartic_from_table,
    build_pair_table,
    gram_matrix,
    pair_integral,
    pair_integral_simpson,
    regularized_action,
    sea_kernel,
)
from seastab.model import CouplingParams, SeaConfig, compute_m3, compute_m5
from seastab.quadrature import QuadSettings, integrate

ONE = SeaConfig((1.0,), (1.0,))
TWO = SeaConfig((1.0, 2.0), (1.0, 1.0))
# same (m3, m5) moments as TWO but a different mass/weight layout
TWO_ALT = SeaConfig((1.0, 2.5), (0.3038812439028114, 0.9210288148409441))


def test_pair_integral_diagonal_closed_form():
    assert pair_integral(1.0, 1.0, 1.0, 1.0, 2.0) == pytest.approx(32.0, abs=1e-10)
    assert pair_integral(1.3, 1.3, 1.3, 1.3, 2.5) == pytest.approx(
        16.0 * 1.3**6 * 2.5, rel=1e-12)


def test_pair_integral_against_simpson():
    val = pair_integral(1.0, 1.0, 1.0, 2.0, 0.5)
    ref = pair_integral_simpson(1.0, 1.0, 1.0, 2.0, 0.5, n=16384)
    assert val == pytest.approx(ref, rel=1e-8)
    # equals -4 * integral of H(a,1,2)
    direct = -4.0 * integrate(
        lambda a: __import__("seastab.kernels", fromlist=["_H_arr"])._H_arr(a, 1.0, 2.0),
        0.0, 0.5, points=[1.0])
    assert val == pytest.approx(direct, rel=1e-10)


def test_pair_integral_symmetries():
    rng = np.random.default_rng(12)
    for _ in range(20):
        x, y, u, v = rng.uniform(0.3, 2.0, 4)
        a_max = rng.uniform(4.5, 8.0)
        base = pair_integral(x, y, u, v, a_max)
        assert pair_integral(y, x, u, v, a_max) == pytest.approx(base, rel=1e-12, abs=1e-14)
        assert pair_integral(u, v, x, y, a_max) == pytest.approx(base, rel=1e-12, abs=1e-14)


def test_table_symmetry_and_reuse():
    table = build_pair_table(TWO, 6.0)
    assert table.get(1.0, 2.0, 2.0, 2.0) == table.get(2.0, 2.0, 2.0, 1.0)
    assert table.get(1.0, 1.0, 1.0, 1.0) == pytest.approx(16.0 * 6.0, rel=1e-12)


def test_action_quartic_closed_form():
    val = action_quartic(ONE, 2.0)
    assert val == pytest.approx(32.0 * SEA_PREF, rel=1e-10)
    assert val == pytest.approx(5.214e-9, rel=1e-3)


def test_action_quartic_zero_weights():
    cfg = SeaConfig((1.0, 2.0), (0.0, 0.0))
    assert action_quartic(cfg, 6.0) == 0.0


def test_action_quartic_weight_homogeneity():
    rng = np.random.default_rng(13)
    for _ in range(5):
        lam = rng.uniform(0.5, 2.0)
        scaled = TWO.replace(weights=tuple(lam * w for w in TWO.weights))
        assert action_quartic(scaled, 6.0) == pytest.approx(
            lam**4 * action_quartic(TWO, 6.0), rel=1e-10)


def test_action_quartic_matches_table_route():
    direct = action_quartic(TWO, 6.0)
    table = build_pair_table(TWO, 6.0)
    assert action_quartic_from_table(TWO, table) == pytest.approx(direct, rel=1e-9)


def test_gram_matrix_positive_semidefinite():
    G = gram_matrix(TWO, 6.0)
    evals = np.linalg.eigvalsh(G)
    assert evals.min() >= -1e-10
    quartic = SEA_PREF * float(
        np.kron(TWO.weight_array(), TWO.weight_array()) @ G
        @ np.kron(TWO.weight_array(), TWO.weight_array()))
    assert quartic == pytest.approx(action_quartic(TWO, 6.0), rel=1e-9)
    assert quartic >= 0.0


def test_action_extended_terms():
    params = CouplingParams(c3=0.0, c4=0.0, a_max=2.0)
    assert action_extended(ONE, params) == pytest.approx(action_quartic(ONE, 2.0), rel=1e-12)
    params = CouplingParams(c3=1.0, c4=2.0, a_max=2.0)
    assert action_extended(ONE, params) == pytest.approx(
        action_quartic(ONE, 2.0) + 3.0, rel=1e-12)


def test_extended_difference_independent_of_a_max():
    # equal (m3, m5) makes the tail cancel in differences
    assert compute_m3(TWO) == pytest.approx(compute_m3(TWO_ALT), abs=1e-18)
    assert compute_m5(TWO) == pytest.approx(compute_m5(TWO_ALT), abs=1e-18)
    diffs = []
    top = max(TWO.max_mass, TWO_ALT.max_mass) ** 2
    for factor in (1.5, 2.0, 4.0):
        a_max = factor * top
        diffs.append(action_quartic(TWO, a_max) - action_quartic(TWO_ALT, a_max))
    assert diffs[1] == pytest.approx(diffs[0], rel=1e-8)
    assert diffs[2] == pytest.approx(diffs[0], rel=1e-8)


def test_sea_kernel_tail_is_two_moment_form():
    Y, _ = sea_kernel(TWO)
    m3, m5 = compute_m3(TWO), compute_m5(TWO)
    for a in (4.5, 6.0, 9.0):
        expected = 512.0 * np.pi**5 * m5 / a + 128.0 * np.pi**5 * m3
        assert float(Y(np.float64(a))) == pytest.approx(expected, rel=1e-12)


def test_with_test_sea_reduces_to_plain():
    params = CouplingParams(a_max=6.0, c3=0.3, c4=-0.1)
    plain = action_extended(TWO, params)
    assert action_extended_with_test(TWO, params, None, 1.4, 0.0) == pytest.approx(
        plain, rel=1e-12)


def test_regularized_action_zero_config():
    cfg = SeaConfig((1.0, 2.0), (0.0, 0.0))
    for eps in (0.5, 0.01):
        assert regularized_action(cfg, eps) == 0.0


def test_regularized_action_independent_of_split():
    val1 = regularized_action(TWO, 0.01, a_max=6.0)
    val2 = regularized_action(TWO, 0.01, a_max=11.0)
    assert val2 == pytest.approx(val1, rel=1e-8)


def test_regularized_action_cauchy():
    values = [regularized_action(TWO, 2.0**-k) for k in range(4, 13)]
    diffs = np.abs(np.diff(values))
    # geometric-type decay: each halving of eps roughly halves the distance
    for d1, d2 in zip(diffs[:-1], diffs[1:]):
        assert d2 < 0.75 * d1
    assert diffs[-1] < 1e-3 * abs(values[-1])


def test_regularized_action_difference_limit():
    # with equal (m3, m5) all counter-term ambiguity cancels in differences
    quartic_diff = action_quartic(TWO, 8.0) - action_quartic(TWO_ALT, 8.0)
    eps = 2.0**-14
    reg_diff = regularized_action(TWO, eps, a_max=8.0) \
        - regularized_action(TWO_ALT, eps, a_max=8.0)
    assert reg_diff == pytest.approx(quartic_diff, rel=1e-4)


def test_regularized_action_rejects_bad_eps():
    with pytest.raises(ValueError):
        regularized_action(TWO, 0.0)
