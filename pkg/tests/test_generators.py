from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyincidence.generators import (FAMILIES, FamilySpec, gen_affine_rich, gen_complex_unit_circles,
                                      gen_extremal_grid, gen_product_config, gen_quaternion_grid,
                                      gen_random_config, gen_sum_product, random_affine_rich,
                                      random_quaternion_grid, random_sum_product, random_unit_circles,
                                      transform_richness)
from polyincidence.incidence import check_axioms, incidences_bruteforce
from polyincidence.varieties import flats_intersection

F = Fraction


# extremal grid -----------------------------------------------------------------

def test_grid_n1():
    cfg = gen_extremal_grid(1)
    assert (cfg.n_points, cfg.n_objects) == (2, 1)
    assert incidences_bruteforce(cfg).size == 1


def test_grid_n2():
    cfg = gen_extremal_grid(2)
    assert (cfg.n_points, cfg.n_objects) == (16, 8)
    assert incidences_bruteforce(cfg).size == 16


@pytest.mark.parametrize("N", range(1, 6))
def test_grid_every_line_has_n_points(N):
    cfg = gen_extremal_grid(N)
    inc = incidences_bruteforce(cfg)
    assert cfg.n_points == 2 * N ** 3 and cfg.n_objects == N ** 3
    assert inc.size == N ** 4
    assert set(inc.object_degrees().tolist()) == {N}


def test_grid_rejects_zero():
    with pytest.raises(ValueError):
        gen_extremal_grid(0)


# products ----------------------------------------------------------------------

def test_product_of_single_grids():
    cfg = gen_product_config(gen_extremal_grid(1), gen_extremal_grid(1))
    assert (cfg.d, cfg.k) == (4, 2)
    assert incidences_bruteforce(cfg).size == 1


def test_product_of_n2_grids():
    cfg = gen_product_config(gen_extremal_grid(2), gen_extremal_grid(2))
    assert incidences_bruteforce(cfg).size == 256


def test_product_multiplicative_on_random_factors():
    for seed in range(4):
        a = gen_random_config(12, 5, 2, 1, seed, plant=8)
        b = gen_random_config(10, 4, 2, 1, seed + 100, plant=6)
        prod = gen_product_config(a, b)
        assert incidences_bruteforce(prod).size == incidences_bruteforce(a).size * incidences_bruteforce(b).size


def test_product_axioms_with_single_line_factors():
    # one line per factor: nothing shared, so every axiom holds
    cfg = gen_product_config(gen_extremal_grid(1), gen_extremal_grid(1))
    assert check_axioms(cfg, incidences_bruteforce(cfg)).passed


def test_product_pair_axiom_fails_with_parallel_structure():
    cfg = gen_product_config(gen_extremal_grid(2), gen_extremal_grid(2))
    rep = check_axioms(cfg, incidences_bruteforce(cfg))
    assert "ii" in rep.failed
    a, b = rep["ii"].witness
    meet = flats_intersection(cfg.objects[a], cfg.objects[b])
    assert meet is not None and meet.dim >= 1


def test_product_needs_planar_factors():
    with pytest.raises(ValueError):
        gen_product_config(gen_random_config(3, 2, 4, 2, 0), gen_extremal_grid(1))


# sum-product --------------------------------------------------------------------

def test_sum_product_single_flat():
    cfg = gen_sum_product([2], [1], [1])
    assert cfg.points == [(F(2), F(2))]
    assert incidences_bruteforce(cfg).size == 1


def test_sum_product_two_matrices():
    cfg = gen_sum_product([2, 3], [0, 1], [0, 1])
    assert cfg.n_objects == 4
    inc = incidences_bruteforce(cfg)
    assert min(inc.object_degrees().tolist()) >= 2


def test_sum_product_rejects_singular_difference():
    with pytest.raises(ValueError, match="matrices 0 and 1"):
        gen_sum_product([[[1, 0], [0, 1]], [[1, 1], [0, 2]]], [(0, 0)], [(1, 1)])


@pytest.mark.parametrize("k,n,seed", [(1, 5, 0), (1, 8, 1), (2, 4, 2), (2, 5, 3), (3, 3, 4)])
def test_sum_product_degrees_and_pairwise_meets(k, n, seed):
    cfg = random_sum_product(k, n, seed)
    inc = incidences_bruteforce(cfg)
    assert min(inc.object_degrees().tolist()) >= n
    on = [set() for _ in cfg.objects]
    for i, j in inc.pairs:
        on[j].add(i)
    for a, b in combinations(range(cfg.n_objects), 2):
        meet = flats_intersection(cfg.objects[a], cfg.objects[b])
        assert meet is None or meet.dim == 0
        assert len(on[a] & on[b]) <= 1


def test_sum_product_rejects_coinciding_flats():
    with pytest.raises(ValueError, match="coincide"):
        gen_sum_product([0, 1], [0, 1], [0])


# affine-rich --------------------------------------------------------------------

def test_identity_transform_holds_diagonal_point():
    cfg = gen_affine_rich([(3, 4)], [([[1, 0], [0, 1]], (0, 0))])
    assert cfg.objects[0].contains((F(3), F(4), F(3), F(4)))


def test_shift_on_two_points():
    cfg = gen_affine_rich([0, 1], [(1, 1)])
    inc = incidences_bruteforce(cfg)
    assert inc.size == 1
    (i, _), = inc.pairs
    assert cfg.points[i] == (F(0), F(1))


def test_dependent_transforms_are_rejected():
    with pytest.raises(ValueError, match="transforms 0 and 1"):
        gen_affine_rich([(0, 0)], [([[1, 0], [0, 1]], (0, 0)), ([[1, 0], [0, 2]], (0, 0))])
    with pytest.raises(ValueError, match="not invertible"):
        gen_affine_rich([(0, 0)], [([[1, 1], [1, 1]], (0, 0))])


def test_affine_base_must_fit_in_the_box():
    with pytest.raises(ValueError, match="do not fit"):
        random_affine_rich(2, 30, 3, seed=0, side=3)


def test_affine_degrees_match_direct_counts():
    for seed in range(5):
        cfg = random_affine_rich(2, 10, 3, seed)
        base = sorted({p[:2] for p in cfg.points})
        inc = incidences_bruteforce(cfg)
        for j, f in enumerate(cfg.objects):
            A = [[f.directions[c][2 + r] for c in range(2)] for r in range(2)]
            v = f.base[2:]
            assert inc.object_degrees()[j] == transform_richness(base, (A, v))


@given(st.integers(0, 10 ** 6), st.integers(2, 6))
def test_rich_transform_iff_rich_flat(seed, r):
    cfg = random_affine_rich(2, 12, 4, seed)
    base = sorted({p[:2] for p in cfg.points})
    degrees = incidences_bruteforce(cfg).object_degrees().tolist()
    for f, deg in zip(cfg.objects, degrees):
        A = [[f.directions[c][2 + i] for c in range(2)] for i in range(2)]
        rich = transform_richness(base, (A, f.base[2:])) >= r
        assert rich == (deg >= r)


# unit circles -------------------------------------------------------------------

def test_unit_distance_pair():
    cfg = gen_complex_unit_circles([((0, 0), (0, 0)), ((1, 0), (0, 0))])
    assert incidences_bruteforce(cfg).size == 2


def test_distance_two_pair():
    cfg = gen_complex_unit_circles([((0, 0), (0, 0)), ((2, 0), (0, 0))])
    assert incidences_bruteforce(cfg).size == 0


def _complex_sq_distance(p, q):
    dz = complex(float(p[0] - q[0]), float(p[1] - q[1]))
    dw = complex(float(p[2] - q[2]), float(p[3] - q[3]))
    re = (p[0] - q[0]) ** 2 - (p[1] - q[1]) ** 2 + (p[2] - q[2]) ** 2 - (p[3] - q[3]) ** 2
    im = 2 * ((p[0] - q[0]) * (p[1] - q[1]) + (p[2] - q[2]) * (p[3] - q[3]))
    assert abs(complex(float(re), float(im)) - (dz * dz + dw * dw)) < 1e-9
    return re, im


def test_unit_circle_count_matches_pair_enumeration():
    for seed in range(3):
        cfg = random_unit_circles(20, seed)
        oracle = sum(1 for p in cfg.points for q in cfg.points if p != q and _complex_sq_distance(p, q) == (1, 0))
        assert incidences_bruteforce(cfg).size == oracle
        assert oracle > 0


# quaternion grid ---------------------------------------------------------------

def test_quaternion_lines_carry_every_x():
    X = [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 1, 0)]
    cfg = gen_quaternion_grid(X, [(0, 1, 0, 0), (1, 0, 0, 1)], [(0, 0, 0, 0), (1, 1, 0, 0)])
    inc = incidences_bruteforce(cfg)
    assert (cfg.d, cfg.k) == (8, 4)
    assert set(inc.object_degrees().tolist()) == {3}


def test_random_quaternion_grid_axioms():
    cfg = random_quaternion_grid(3, 2, 2, seed=1)
    inc = incidences_bruteforce(cfg)
    assert min(inc.object_degrees().tolist()) >= 3
    rep = check_axioms(cfg, inc)
    assert rep["ii"].status == "pass"


# random -------------------------------------------------------------------------

def test_random_determinism():
    a = gen_random_config(30, 10, 4, 2, seed=9)
    b = gen_random_config(30, 10, 4, 2, seed=9)
    assert a.dumps() == b.dumps()


def test_random_configs_are_almost_always_empty():
    empty = sum(incidences_bruteforce(gen_random_config(30, 10, 2, 1, seed)).size == 0 for seed in range(100))
    assert empty >= 95


def test_random_with_no_points():
    cfg = gen_random_config(0, 5, 2, 1, seed=0)
    assert incidences_bruteforce(cfg).size == 0


def test_random_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        gen_random_config(3, 2, 3, 2, seed=0)
    with pytest.raises(ValueError):
        gen_random_config(3, 2, 3, 1, seed=0, plant=4)


def test_planted_points_are_incident():
    cfg = gen_random_config(40, 6, 4, 2, seed=3, plant=25)
    assert incidences_bruteforce(cfg).size >= 25


# family specs --------------------------------------------------------------------

@pytest.mark.parametrize("family", FAMILIES)
def test_family_spec_is_deterministic(family):
    params = {"extremal_grid": {"N": 2}, "product": {"N1": 1, "N2": 2}, "sum_product": {"k": 2, "n": 3},
              "affine_rich": {"d": 2, "n_base": 6}, "unit_circles": {"n": 8},
              "quaternion": {"n_x": 2}, "random": {"n": 20, "m": 4, "d": 4, "k": 2, "plant": 5}}[family]
    spec = FamilySpec(family, params, seed=11)
    assert spec.build().dumps() == spec.build().dumps()
    again = FamilySpec.from_json(spec.to_json())
    assert again == spec
    assert again.build().metadata["spec"] == spec.to_json()


def test_unknown_family():
    with pytest.raises(ValueError, match="unknown family"):
        FamilySpec("hexagons")
