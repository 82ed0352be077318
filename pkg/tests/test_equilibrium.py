import math

import numpy as np
import pytest

from rosenau_fp.equilibrium import maxwellian_comparison, stationary_law, stationary_oracle
from rosenau_fp.evolution import apply_T
from rosenau_fp.lattice import (
    ParameterError,
    ResourceLimitError,
    char_fn,
    entropy,
    moment,
)
from rosenau_fp.spectral import lattice_xi_grid, stationary_charfn


def test_stationary_law_small_case():
    law = stationary_law(1)
    assert np.array_equal(law.coeffs, np.array([1, 4, 6, 4, 1]) / 16)


def test_stationary_law_normalization_and_moments():
    for N in (1, 2, 4, 8, 16):
        law = stationary_law(N)
        assert abs(moment(law, 0) - 1.0) <= 1e-12
        assert abs(moment(law, 1)) <= 1e-13
        assert abs(moment(law, 2) - 1.0) <= 1e-12
        assert np.array_equal(law.coeffs, law.coeffs[::-1])


def test_stationary_law_exact_path_matches_binomials():
    law = stationary_law(4)
    exact = np.array([math.comb(64, i) / 2**64 for i in range(65)])
    assert np.array_equal(law.coeffs, exact)


def test_stationary_law_loggamma_path():
    # N = 33 is past the exact-integer range (4N^2 = 4356)
    law = stationary_law(33)
    assert abs(moment(law, 0) - 1.0) <= 1e-12
    assert abs(moment(law, 2) - 1.0) <= 1e-11
    assert np.array_equal(law.coeffs, law.coeffs[::-1])


def test_stationary_oracle_small_case():
    law = stationary_oracle(1)
    assert np.max(np.abs(law.coeffs - np.array([1, 4, 6, 4, 1]) / 16)) <= 1e-16


@pytest.mark.parametrize("N", [1, 2, 4, 8])
def test_double_oracle_agreement(N):
    a = stationary_law(N)
    b = stationary_oracle(N)
    assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-12


@pytest.mark.parametrize("N", [1, 2, 4, 8])
def test_fixed_point_of_T(N):
    law = stationary_law(N)
    assert np.max(np.abs(apply_T(law).coeffs - law.coeffs)) <= 1e-13


@pytest.mark.parametrize("N", [1, 2, 4])
def test_oracle_charfn_formula(N):
    law = stationary_oracle(N)
    xi = lattice_xi_grid(N, 128)
    assert np.max(np.abs(char_fn(law, xi) - stationary_charfn(xi, N))) <= 1e-12


def test_oracle_resource_limit():
    with pytest.raises(ResourceLimitError):
        stationary_oracle(17)
    with pytest.raises(ParameterError):
        stationary_oracle(0)


def test_maxwellian_comparison_trend():
    tab = maxwellian_comparison([2, 4, 8])
    assert tab.columns == ["N", "sup_density_err", "d2_maxwellian"]
    sup = tab.column("sup_density_err")
    d2 = tab.column("d2_maxwellian")
    assert sup[0] > sup[1] > sup[2]
    assert d2[0] > d2[1] > d2[2]
    # local-limit error shrinks at least quadratically over two doublings
    assert sup[0] / sup[2] >= 2.0
    assert all(v > 0 and math.isfinite(v) for v in d2)


def test_maxwellian_comparison_single_N():
    tab = maxwellian_comparison(4)
    assert len(tab.rows) == 1 and tab.rows[0][0] == 4
    with pytest.raises(ParameterError):
        maxwellian_comparison(1)


def test_equilibrium_entropy_bounded():
    for N in (2, 4):
        law = stationary_law(N)
        assert 0.0 < entropy(law) <= math.log(4 * N * N + 1)
