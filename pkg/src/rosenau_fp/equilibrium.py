"""Exact discrete equilibrium and its Gaussian limit.

The unique fixed point of the lattice dynamics in the density space is the
centered binomial law

    f_inf[j] = 2**(-4*N**2) * C(4*N**2, 2*N**2 + j),   |j| <= 2*N**2,

equivalently the law of (1/N) * sum of 2*N**2 i.i.d. steps taking values
-1, 0, +1 with probabilities 1/4, 1/2, 1/4.  Both constructions are provided
and must agree coefficient-wise.
"""

import math

import numpy as np
from scipy.special import gammaln

from .lattice import (
    LatticeDensity,
    ParameterError,
    ResourceLimitError,
    SignedLatticeFunction,
    convolve,
    new_lattice_density,
)
from .report import ReportTable
from .spectral import continuous_xi_grid, fourier_distance, gaussian_evaluator, stationary_evaluator

#: largest exact-integer binomial row; above this log-gamma is used.  The
#: fixed-point identity amplifies coefficient error by 2*N**2, so the exact
#: path must cover every resolution the desk-scale checks touch.
EXACT_BINOMIAL_LIMIT = 4096

#: convolution oracle is O(N^4) work, keep it small
ORACLE_N_LIMIT = 16


def stationary_law(N):
    """Closed-form equilibrium density for resolution N."""
    M = 4 * N * N
    if M <= EXACT_BINOMIAL_LIMIT:
        # big-int ratio -> correctly rounded double, even past float range
        scale = 2**M
        coeffs = np.array([math.comb(M, i) / scale for i in range(M + 1)])
    else:
        i = np.arange(M + 1)
        # grouping the two log-factorials keeps the row exactly symmetric
        logc = gammaln(M + 1) - (gammaln(i + 1) + gammaln(M - i + 1)) - M * math.log(2.0)
        coeffs = np.exp(logc)
    return new_lattice_density(N, coeffs)


def stationary_oracle(N):
    """Equilibrium via the 2*N**2-fold convolution power of (1/4, 1/2, 1/4)."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ParameterError(f"resolution N must be a positive integer, got {N!r}")
    if N > ORACLE_N_LIMIT:
        raise ResourceLimitError(f"convolution oracle limited to N <= {ORACLE_N_LIMIT}")
    base = SignedLatticeFunction(
        eps=1.0 / N, coeffs=np.array([0.25, 0.5, 0.25]), j_min=-1, N=int(N)
    )
    acc = base
    for _ in range(2 * N * N - 1):
        acc = convolve(acc, base)
    return LatticeDensity(N=int(N), coeffs=acc.coeffs)


def maxwellian_comparison(N_values):
    """Distance of the equilibrium to the standard Gaussian, per resolution.

    Columns: N, sup_density_err (sup_j |N*f_inf[j] - M(j*eps)| against the
    Gaussian density), d2_maxwellian (grid d_2 between the characteristic
    functions).  Both columns shrink as N grows.
    """
    if isinstance(N_values, (int, np.integer)):
        N_values = [int(N_values)]
    grid = continuous_xi_grid()
    gauss = gaussian_evaluator(0.0, 1.0)
    rows = []
    for N in N_values:
        N = int(N)
        if N < 2:
            raise ParameterError("maxwellian comparison needs N >= 2")
        law = stationary_law(N)
        v = law.j_values / N
        density_err = float(np.max(np.abs(N * law.coeffs - np.exp(-0.5 * v * v) / math.sqrt(2 * math.pi))))
        d2 = fourier_distance(stationary_evaluator(N), gauss, 2.0, grid)
        rows.append([N, density_err, d2.value])
    return ReportTable(
        columns=["N", "sup_density_err", "d2_maxwellian"],
        rows=rows,
        metadata={"grid": f"{grid.size} points in ({grid.min():.6g}, {grid.max():.6g}]"},
    )
