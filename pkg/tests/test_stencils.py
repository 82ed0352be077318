import math
from fractions import Fraction

import numpy as np
import pytest

from rosenau_fp.lattice import (
    DimensionError,
    ParameterError,
    SignedLatticeFunction,
    char_fn,
    delta_density,
    moment,
    three_point_density,
)
from rosenau_fp.spectral import symbol
from rosenau_fp.stencils import (
    apply_stencil,
    derivative_stencil,
    evolve_higher_order,
    gn_kernel,
    higher_order_generator,
    moment_condition_check,
    spectral_higher_order_solution,
)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def test_gn_kernel_order_one_is_two_point():
    k = gn_kernel(1, 0.5)
    assert k.exact == (Fraction(1, 2), Fraction(0), Fraction(1, 2))


def test_gn_kernel_order_two_values():
    k = gn_kernel(2, 0.5)
    assert k.exact == (
        Fraction(-1, 4),
        Fraction(1),
        Fraction(-1, 2),
        Fraction(1),
        Fraction(-1, 4),
    )
    assert sum(k.exact) == 1


@pytest.mark.parametrize("n", range(1, 9))
def test_gn_kernel_sum_and_symmetry(n):
    k = gn_kernel(n, 0.3)
    assert sum(k.exact) == 1
    assert k.exact == k.exact[::-1]
    assert k.function.j_min == -n and k.function.j_max == n


@pytest.mark.parametrize("n", range(1, 9))
def test_gn_kernel_charfn_identity(n):
    eps = 0.4
    k = gn_kernel(n, eps)
    xi = np.linspace(-20, 20, 181)
    lhs = char_fn(k.function, xi)
    rhs = 1.0 - (1.0 - np.cos(eps * xi)) ** n
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_gn_kernel_range_check():
    with pytest.raises(ParameterError):
        gn_kernel(0, 0.5)
    with pytest.raises(ParameterError):
        gn_kernel(13, 0.5)
    with pytest.raises(ParameterError):
        gn_kernel(2, -1.0)


# ---------------------------------------------------------------------------
# stencils
# ---------------------------------------------------------------------------

def test_stencil_small_orders():
    assert derivative_stencil(1).coeffs == (1, -2, 1)
    assert derivative_stencil(2).coeffs == (1, -4, 6, -4, 1)
    assert derivative_stencil(3).coeffs == (1, -6, 15, -20, 15, -6, 1)


@pytest.mark.parametrize("n", range(1, 13))
def test_stencil_structure(n):
    st = derivative_stencil(n)
    c = st.coeffs
    assert len(c) == 2 * n + 1
    assert c == c[::-1]
    assert sum(c) == 0
    signs = [(-1) ** (n - k) for k in range(-n, n + 1)]
    assert all(ci * si > 0 for ci, si in zip(c, signs))
    assert c == tuple((-1) ** (n - k) * math.comb(2 * n, n - k) for k in range(-n, n + 1))
    assert st.coefficient(0) == c[n] and st.coefficient(n + 3) == 0


@pytest.mark.parametrize("n", range(1, 13))
def test_moment_conditions_exact(n):
    tab = moment_condition_check(n)
    values = dict(tab.rows)
    for m in range(2 * n):
        assert values[m] == 0
    assert values[2 * n] == math.factorial(2 * n)


def test_apply_stencil_second_difference():
    out = apply_stencil([0.0, 1.0, 4.0, 9.0], 1, 1.0)
    assert np.array_equal(out, np.array([2.0, 2.0]))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_apply_stencil_polynomial_exactness(n):
    eps = 1.0
    x = np.arange(-(n + 3), n + 4, dtype=float) * eps
    # degree < 2n is annihilated
    low = x ** (2 * n - 1) + 3.0 * x ** max(0, 2 * n - 3) - 7.0
    out = apply_stencil(low, n, eps)
    scale = np.max(np.abs(low)) / eps ** (2 * n)
    assert np.max(np.abs(out)) <= 1e-9 * scale
    # v^(2n) maps to the constant (2n)!
    out = apply_stencil(x ** (2 * n), n, eps)
    assert np.max(np.abs(out - math.factorial(2 * n))) <= 1e-6 * math.factorial(2 * n)


def test_apply_stencil_short_input():
    with pytest.raises(DimensionError):
        apply_stencil([1.0, 2.0], 1, 1.0)


# ---------------------------------------------------------------------------
# higher-order lattice generator
# ---------------------------------------------------------------------------

def test_generator_order_one_matches_diffusion_part():
    g = three_point_density(2, 2, 0.5).as_signed()
    out = higher_order_generator(g, 1)
    # 2/eps^2 * (P*g - g)
    p = SignedLatticeFunction(eps=g.eps, coeffs=np.array([0.5, 0.0, 0.5]), j_min=-1)
    conv = np.convolve(p.coeffs, g.coeffs)
    conv[1:-1] -= g.coeffs
    expected = 2.0 / g.eps**2 * conv
    assert out.j_min == g.j_min - 1
    assert np.max(np.abs(out.coeffs - expected)) <= 1e-12


def test_generator_order_two_point_mass():
    g = delta_density(1, 0)
    out = higher_order_generator(g, 2)
    eps = 1.0
    expected = np.array([-1.0, 4.0, -6.0, 4.0, -1.0]) / eps**4
    sub = out.coeffs[out.coeffs.nonzero()]
    center = -out.j_min
    assert np.array_equal(out.coeffs[center - 2 : center + 3], expected)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_generator_moment_identities(n):
    g = three_point_density(2, 3, 0.7)
    A = higher_order_generator(g, n)
    for m in range(2 * n):
        assert abs(moment(A, m)) <= 1e-9
    top = moment(A, 2 * n)
    assert top == pytest.approx((-1) ** (n + 1) * math.factorial(2 * n), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_generator_symbol_multiplier(n):
    g = three_point_density(2, 2, 0.5)
    A = higher_order_generator(g, n)
    xi = np.linspace(-9, 9, 73)
    lhs = char_fn(A, xi)
    rhs = symbol("discrete-2n", xi, g.eps, n=n) * char_fn(g, xi)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs) + 1)


# ---------------------------------------------------------------------------
# order-2n evolution, lattice vs spectral
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3])
def test_evolution_moment_laws(n):
    g0 = three_point_density(2, 2, 0.5)
    t = 0.02 * g0.eps ** (2 * n) / 2**n * 2**(2 * n)
    ft = evolve_higher_order(g0, n, t)
    for m in range(2 * n):
        assert abs(moment(ft, m) - moment(g0, m)) <= 1e-9
    rate = (-1) ** (n + 1) * math.factorial(2 * n)
    assert moment(ft, 2 * n) - moment(g0, 2 * n) == pytest.approx(rate * t, rel=1e-6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_evolution_matches_spectral_mode(n):
    g0 = three_point_density(2, 2, 0.5)
    t = 0.01
    ft = evolve_higher_order(g0, n, t)
    xi = np.linspace(0.1, 25.0, 200)
    lhs = char_fn(ft, xi)
    rhs = spectral_higher_order_solution(
        lambda z: char_fn(g0, z), n, g0.eps, t, xi, "discrete"
    )
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_spectral_modes_and_validation():
    ghat = lambda xi: np.exp(-0.5 * np.asarray(xi) ** 2)
    assert spectral_higher_order_solution(ghat, 2, 0.5, 0.0, 1.3, "exact") == pytest.approx(
        math.exp(-0.5 * 1.3**2)
    )
    with pytest.raises(ParameterError):
        spectral_higher_order_solution(ghat, 2, 0.5, 1.0, 1.0, "upstrăm")
    with pytest.raises(ParameterError):
        spectral_higher_order_solution(ghat, 2, 0.5, -1.0, 1.0, "exact")


def test_spectral_exact_mode_fourth_moment_rate():
    # m4(t) = m4(0) - 24*t for unit mass, read off by the order-4 stencil in xi
    g0 = three_point_density(2, 2, 0.5)
    ghat = lambda xi: char_fn(g0, xi)
    t = 0.03
    h = 0.02
    xi = np.arange(-4, 5, dtype=float) * h

    def fourth_moment(fn):
        # Richardson-extrapolated central fourth difference of Re f at 0
        def stencil_value(step):
            samples = np.real(fn(np.arange(-2, 3, dtype=float) * step))
            return float(apply_stencil(samples, 2, step)[0])

        coarse, fine = stencil_value(h), stencil_value(h / 2)
        return (4.0 * fine - coarse) / 3.0

    m4_0 = fourth_moment(ghat)
    assert m4_0 == pytest.approx(moment(g0, 4), rel=1e-6)
    m4_t = fourth_moment(
        lambda z: spectral_higher_order_solution(ghat, 2, g0.eps, t, z, "exact")
    )
    assert m4_t == pytest.approx(moment(g0, 4) - 24.0 * t, rel=1e-6)


def test_rosenau_and_discrete_modes_converge_together():
    # at fixed xi the two bounded symbols differ by O(eps^2)
    ghat = lambda xi: np.exp(-0.5 * np.asarray(xi) ** 2)
    xi, t, n = 1.5, 0.2, 2
    diffs = []
    for eps in (0.2, 0.1, 0.05):
        a = spectral_higher_order_solution(ghat, n, eps, t, xi, "discrete")
        b = spectral_higher_order_solution(ghat, n, eps, t, xi, "exact")
        diffs.append(abs(a - b))
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[1] / diffs[0] == pytest.approx(0.25, abs=0.1)
