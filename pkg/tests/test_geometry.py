import pytest

from qcurrents.geometry import (
    CurveConfig,
    check_delta_reproduces,
    check_derivation_preserves_R,
    check_dual_bases,
    check_pairing_derivation_invariance,
    delta_kernel,
    pair_against,
    pair_K,
    project,
)
from qcurrents.kernels import ZW, green_kernel, shift_difference_series
from qcurrents.series import HSeries, KernelFn, Region, Window


@pytest.fixture(scope="module")
def cfg():
    return CurveConfig(K=5, max_mode=8)


def test_dual_bases_and_lagrangian(cfg):
    res = check_dual_bases(cfg)
    assert res["dual_basis"] and res["lagrangian"]


def test_pair_nonzero_iff_total_minus_one(cfg):
    # the residue orientation is pinned so that <z^a, z^b> = [a+b == -1]
    for a in range(-4, 4):
        for b in range(-4, 4):
            v = pair_K(cfg.mode(a), cfg.mode(b))
            want = HSeries.const(1 if a + b == -1 else 0, cfg.K)
            assert v == want


def test_projection_split_and_idempotence(cfg):
    f = cfg.mode(3) + cfg.mode(-2)
    assert project(f, "R") == cfg.mode(3)
    assert project(f, "L") == cfg.mode(-2)
    assert project(project(f, "R"), "R") == project(f, "R")
    assert (project(f, "R") + project(f, "L")) == f
    assert project(cfg.mode(-1), "R").is_zero()


def test_shifted_complement_stays_in_complement(cfg):
    # all binomial terms of z^{-1} shifted by h stay at negative exponents,
    # which is what forces the correction term to vanish
    shifted = cfg.mode(-1).shift_subst("z", 1)
    assert project(shifted, "R").is_zero()
    image = cfg.mode(-3).diff_op("z", shift_difference_series(2, cfg.K))
    assert project(image, "R").is_zero()


def test_derivation(cfg):
    assert check_derivation_preserves_R(cfg)
    assert check_pairing_derivation_invariance(cfg)


def test_delta_kernel_reproduces(cfg):
    assert check_delta_reproduces(cfg, Window.cube(-5, 5, 2))


def test_delta_equals_green_plus_swap(cfg):
    window = Window.cube(-6, 6, 2)
    delta = delta_kernel(cfg, window)
    G = green_kernel(cfg, window, Region(("w", "z")))      # z << w
    G21 = green_kernel(cfg, window, ZW)                    # w << z
    # as windowed term sets the two halves tile the delta support
    merged = dict(G.rename({}, region=ZW, window=window).terms)
    for e, hs in G21.terms.items():
        assert e not in merged
        merged[e] = hs
    assert KernelFn(ZW, merged, window, cfg.K) == delta


def test_green_coefficient_rows(cfg):
    # coefficient of z^a in G is the dual mode in w
    window = Window.cube(-6, 6, 2)
    G = green_kernel(cfg, window, Region(("w", "z")))
    for a in range(0, 5):
        col = pair_against(G, "z", cfg.mode(-a - 1, var="z"))
        assert col == cfg.mode(-a - 1, var="w",
                               window=Window((window.bounds[0],)))


def test_mode_range_errors(cfg):
    with pytest.raises(ValueError):
        cfg.r_mode_exp(cfg.max_mode + 1)
    with pytest.raises(ValueError):
        cfg.lam_mode_exp(-1)
