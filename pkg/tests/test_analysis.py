import math
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyincidence.analysis import (ABOVE, BELOW, INSIDE, NonGenericProjection, balanced_fit_points,
                                    bound_report, family_constant, fit_exponent, generic_project,
                                    loglog_table, regime_check, write_report_csv)
from polyincidence.generators import gen_extremal_grid, gen_product_config, gen_random_config
from polyincidence.incidence import Config, IncidenceSet, incidences_bruteforce, trivial_bounds
from polyincidence.varieties import Flat, line_through

F = Fraction


def report_for(cfg, epsilon=0):
    return bound_report(cfg, incidences_bruteforce(cfg), epsilon)


# bound reports ------------------------------------------------------------------

def test_linear_term_absorbs_small_counts():
    cfg = Config(2, 1, [(0, 0), (1, 1)], [line_through((0, 0), (1, 1))])
    rep = report_for(cfg)
    assert rep.incidences == 2 <= rep.rhs_linear == F(9, 2)
    assert rep.minimal_A == 0


def test_grid_n4_needs_no_constant():
    rep = report_for(gen_extremal_grid(4))
    assert (rep.n_points, rep.n_objects, rep.incidences) == (128, 64, 256)
    assert rep.rhs_linear == 288
    assert abs(float(rep.rhs_main) - 128 ** (2 / 3) * 64 ** (2 / 3)) < 1e-9
    assert rep.minimal_A == 0


def test_product_of_n4_grids_has_positive_constant():
    cfg = gen_product_config(gen_extremal_grid(4), gen_extremal_grid(4))
    # |I| is 256^2 by multiplicativity; avoid the 67M-pair scan here
    rep = bound_report(cfg, _sized(cfg, 256 ** 2), epsilon=0.1)
    assert rep.epsilon == F(1, 10)
    P, L = 128 ** 2, 64 ** 2
    expected = (256 ** 2 - 1.5 * (P + L)) / (P ** (2 / 3 + 0.1) * L ** (2 / 3))
    assert rep.minimal_A > 0
    assert abs(float(rep.minimal_A) - expected) < 1e-9
    assert len(rep.row()["minimal_A"].split(".")[1]) >= 6


def _sized(cfg, size):
    P = cfg.n_points
    return IncidenceSet(P, cfg.n_objects, [(i % P, i // P) for i in range(size)])


@given(st.integers(1, 3000), st.integers(1, 3000), st.integers(0, 10 ** 6), st.sampled_from([0, 0.05, 0.1]))
def test_minimal_constant_is_tight(P, L, extra, eps):
    I = min(P * L, int(1.5 * (P + L)) + extra)
    cfg = Config(1, 0, [(i,) for i in range(P)], [])
    cfg.objects = [Flat((0,), ())] * L      # counts only
    rep = bound_report(cfg, IncidenceSet(P, L, [(i % P, i // P) for i in range(I)]), eps)
    assert rep.holds(rep.minimal_A)
    if rep.minimal_A > 0:
        assert not rep.holds(rep.minimal_A * (1 - Decimal("1e-6")))


def test_report_row_and_csv():
    rep = report_for(gen_extremal_grid(2), 0.05)
    row = rep.row()
    assert row["epsilon"] == "1/20" and row["regime"] == INSIDE
    text = write_report_csv([rep])
    assert text.splitlines()[0] == ("family,params,n_points,n_objects,incidences,epsilon,"
                                    "rhs_main,rhs_linear,minimal_A,regime")


def test_rhs_main_is_rounded_down():
    rep = report_for(gen_extremal_grid(3))
    exact_cube = Decimal(54 * 27) ** 2       # (|P| |L|)^2 = rhs_main^3
    assert rep.rhs_main ** 3 <= exact_cube


# family constant ------------------------------------------------------------------

def test_single_report_constant():
    rep = report_for(gen_extremal_grid(3))
    assert family_constant([rep]) == rep.minimal_A


def test_grid_family_constant_is_finite_and_monotone():
    reports = [report_for(gen_extremal_grid(N), 0.05) for N in range(1, 7)]
    running = [family_constant(reports[:i]) for i in range(1, len(reports) + 1)]
    assert running == sorted(running)
    assert running[-1].is_finite()


def test_family_constant_rejects_mixed_epsilon():
    a = report_for(gen_extremal_grid(2), 0)
    b = report_for(gen_extremal_grid(2), 0.1)
    with pytest.raises(ValueError, match="epsilon"):
        family_constant([a, b])
    with pytest.raises(ValueError):
        family_constant([])


# exponent fits ------------------------------------------------------------------

def test_grid_family_slope_is_one():
    counts = [(2 * N ** 3, N ** 3, incidences_bruteforce(gen_extremal_grid(N)).size) for N in range(2, 7)]
    counts += [(2 * N ** 3, N ** 3, N ** 4) for N in (7, 8)]
    fit = fit_exponent(balanced_fit_points(counts))
    assert abs(fit.slope - 1) < 1e-12 and fit.max_residual < 1e-9


def test_constant_family_has_zero_slope():
    fit = fit_exponent([(1.0, 3.0), (2.0, 3.0), (5.0, 3.0)])
    assert abs(fit.slope) < 1e-12 and abs(fit.intercept - 3) < 1e-12


def test_product_family_slope():
    counts = []
    for N in range(2, 6):
        I = incidences_bruteforce(gen_extremal_grid(N)).size ** 2
        counts.append((4 * N ** 6, N ** 6, I))
    fit = fit_exponent(balanced_fit_points(counts))
    assert 0.98 <= fit.slope <= 1.02


def test_fit_needs_three_points():
    with pytest.raises(ValueError):
        fit_exponent([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        balanced_fit_points([(1, 0, 1)])


def test_loglog_table_roundtrip():
    pts = balanced_fit_points([(2, 1, 1), (16, 8, 16), (54, 27, 81)])
    rows = [tuple(map(float, line.split())) for line in loglog_table(pts).splitlines()]
    assert rows == pts


# regimes ------------------------------------------------------------------------

def test_regime_examples():
    assert regime_check((100, 5)) == BELOW
    assert regime_check((100, 10 ** 5)) == ABOVE
    assert regime_check((1000, 1000), C2=2) == INSIDE
    assert regime_check((100, 10)) == INSIDE
    with pytest.raises(ValueError):
        regime_check((1, 1), C2=F(1, 2))


@given(st.integers(1, 10 ** 4), st.integers(1, 10 ** 6), st.integers(1, 5))
def test_regime_matches_real_comparison(P, L, C2):
    got = regime_check((P, L), C2)
    lo, hi = C2 * math.sqrt(P), P * P / C2
    if abs(L - lo) > 1e-6 * L and abs(L - hi) > 1e-6 * L:
        want = BELOW if L < lo else ABOVE if L > hi else INSIDE
        assert got == want


def test_below_the_regime_the_trivial_bound_is_linear():
    # |L| < |P|^(1/2) gives |I| <= |L| |P|^(1/2) + |P| < 2 |P|
    for seed in range(20):
        cfg = gen_random_config(100, 1 + seed % 9, 2, 1, seed, plant=60)
        assert regime_check(cfg) == BELOW
        inc = incidences_bruteforce(cfg)
        assert inc.size <= min(trivial_bounds(cfg)) < 2 * cfg.n_points


# generic projection ---------------------------------------------------------------

def test_projection_needs_room():
    cfg = gen_extremal_grid(2)
    with pytest.raises(ValueError, match="d must exceed 2k"):
        generic_project(cfg)


@pytest.mark.parametrize("seed", range(5))
def test_projection_preserves_incidences_of_lines_in_space(seed):
    cfg = gen_random_config(40, 12, 3, 1, seed, plant=25)
    before = incidences_bruteforce(cfg)
    image = generic_project(cfg, seed=seed)
    assert image.d == 2
    assert (image.n_points, image.n_objects) == (cfg.n_points, cfg.n_objects)
    assert incidences_bruteforce(image) == before
    assert image.metadata["projection"]["draws"] <= 3


def test_projection_of_planes_in_five_space():
    cfg = gen_random_config(30, 6, 5, 2, 4, plant=15)
    image = generic_project(cfg, seed=1)
    assert image.d == 4
    assert incidences_bruteforce(image) == incidences_bruteforce(cfg)


def test_skew_lines_keep_their_incidences():
    f = line_through((0, 0, 0), (1, 0, 0))
    g = line_through((0, 0, 1), (0, 1, 1))
    pts = [(0, 0, 0), (2, 0, 0), (0, 0, 1), (0, 3, 1), (5, 5, 5)]
    cfg = Config(3, 1, pts, [f, g])
    image = generic_project(cfg, seed=0)
    assert incidences_bruteforce(image) == incidences_bruteforce(cfg)
    assert incidences_bruteforce(image).size == 4


def test_projection_retries_run_out():
    cfg = gen_random_config(10, 3, 3, 1, 0, plant=5)
    with pytest.raises(NonGenericProjection, match="after 0 draws"):
        generic_project(cfg, retries=0)
