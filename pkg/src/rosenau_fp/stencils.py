"""Signed convolution kernels and the even-order central-difference stencils.

With P the two-point kernel (1/2 at each of +-eps), the signed kernel

    G_n = sum_{k=1..n} (-1)^(k+1) * C(n, k) * P^(*k)

has unit coefficient sum and symbol 1 - (1 - cos(eps*xi))^n.  The operator
(-1)^(n+1) * 2^n * eps^(-2n) * (G_n * h - h) approximates the 2n-th
derivative of h: its coefficients are the signed binomial row
(-1)^(n-k) * C(2n, n-k), exact on polynomials of degree < 2n and mapping
v^(2n) to (2n)!.  The evolution generator A_n = 2^n * eps^(-2n) * (G_n - id)
carries symbol -(2*(1 - cos(eps*xi))/eps^2)^n.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import (
    DimensionError,
    LatticeDensity,
    ParameterError,
    SignedLatticeFunction,
)
from .report import ReportTable

MAX_HALF_ORDER = 12


def _check_half_order(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_HALF_ORDER:
        raise ParameterError(f"half-order n must satisfy 1 <= n <= {MAX_HALF_ORDER}, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class KernelGn:
    """The signed kernel G_n on offsets -n..n, exact and as floats."""

    n: int
    eps: float
    exact: tuple  # Fractions indexed by offset + n
    function: SignedLatticeFunction


@dataclass(frozen=True)
class Stencil:
    """Integer coefficients c_k, k = -n..n, to be scaled by eps**(-2n) at use."""

    n: int
    coeffs: tuple
    scale: str

    def coefficient(self, k):
        if abs(k) > self.n:
            return 0
        return self.coeffs[k + self.n]


def _p_power_exact(k):
    """k-fold self-convolution of (1/2, 0, 1/2) on offsets -k..k, in Fractions."""
    out = [Fraction(0)] * (2 * k + 1)
    for i in range(k + 1):
        out[2 * i] = Fraction(math.comb(k, i), 2**k)
    return out


def _gn_exact(n):
    g = [Fraction(0)] * (2 * n + 1)
    for k in range(1, n + 1):
        sign = Fraction((-1) ** (k + 1) * math.comb(n, k))
        pk = _p_power_exact(k)
        off = n - k
        for i, val in enumerate(pk):
            g[off + i] += sign * val
    return g


def gn_kernel(n, eps):
    """Signed kernel G_n on the lattice of step eps; coefficient sum is exactly 1."""
    n = _check_half_order(n)
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    exact = _gn_exact(n)
    assert sum(exact) == 1
    coeffs = np.array([float(x) for x in exact])
    return KernelGn(
        n=n,
        eps=float(eps),
        exact=tuple(exact),
        function=SignedLatticeFunction(eps=float(eps), coeffs=coeffs, j_min=-n),
    )


def derivative_stencil(n):
    """Central stencil for the 2n-th derivative: c_k = (-1)**(n-k) * C(2n, n-k).

    Equals (-1)**(n+1) * 2**n * (G_n - id) in exact arithmetic; the scale
    eps**(-2n) is applied by ``apply_stencil``.
    """
    n = _check_half_order(n)
    exact = _gn_exact(n)
    sign = (-1) ** (n + 1) * 2**n
    coeffs = []
    for k in range(-n, n + 1):
        value = sign * (exact[k + n] - (1 if k == 0 else 0))
        assert value.denominator == 1
        coeffs.append(int(value))
    assert coeffs == [(-1) ** (n - k) * math.comb(2 * n, n - k) for k in range(-n, n + 1)]
    return Stencil(n=n, coeffs=tuple(coeffs), scale=f"eps**(-{2 * n})")


def moment_condition_check(n):
    """Exact integer moment table: sum_k c_k * k**m for m = 0..2n.

    All rows below m = 2n vanish and the top row equals (2n)!.
    """
    n = _check_half_order(n)
    st = derivative_stencil(n)
    rows = []
    for m in range(2 * n + 1):
        total = sum(c * k**m for k, c in zip(range(-n, n + 1), st.coeffs))
        rows.append([m, total])
    return ReportTable(columns=["m", "sum_ck_km"], rows=rows, metadata={"n": n})


def apply_stencil(h, n, eps):
    """Approximate the 2n-th derivative of samples h on a uniform grid of step eps.

    Returns values at the len(h) - 2n interior points only; the n points at
    each boundary have no stencil value and are not extrapolated.
    """
    n = _check_half_order(n)
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size < 2 * n + 1:
        raise DimensionError(f"need at least {2 * n + 1} samples for half-order {n}")
    c = np.array(derivative_stencil(n).coeffs, dtype=float)
    return np.correlate(h, c, mode="valid") / eps ** (2 * n)


def _as_signed(g):
    if isinstance(g, LatticeDensity):
        return g.as_signed()
    if isinstance(g, SignedLatticeFunction):
        return g
    raise ParameterError(f"expected a lattice value, got {type(g).__name__}")


def _gn_convolve_minus_id(g, kernel):
    """G_n * g - g on the union index range."""
    conv = np.convolve(kernel.function.coeffs, g.coeffs)
    n = kernel.n
    conv[n : n + g.coeffs.size] -= g.coeffs
    return SignedLatticeFunction(eps=g.eps, coeffs=conv, j_min=g.j_min - n, N=g.N)


def higher_order_generator(g, n):
    """A_n(g) = 2**n * eps**(-2n) * (G_n * g - g).

    Lattice-exact moment identities: moments 1 .. 2n-1 of A_n(g) vanish and
    the 2n-th moment equals (-1)**(n+1) * (2n)! * mass(g).
    """
    n = _check_half_order(n)
    g = _as_signed(g)
    kern = gn_kernel(n, g.eps)
    diff = _gn_convolve_minus_id(g, kern)
    scale = 2**n / g.eps ** (2 * n)
    return SignedLatticeFunction(
        eps=g.eps, coeffs=scale * diff.coeffs, j_min=diff.j_min, N=g.N
    )


def evolve_higher_order(g, n, t, lambda_max=1.0, tail_tol=1e-14):
    """exp(t * A_n) g via the exponential series of the G_n convolution.

    Each step evaluates exp(-lam) * sum_i lam^i/i! * B^i g with B = G_n
    convolution and lam = 2**n * eps**(-2n) * dt capped at ``lambda_max``;
    the series for a signed kernel is truncated once i > lam and the term's
    weighted l1 norm falls below ``tail_tol``.  No renormalization is applied:
    the coefficient sum of G_n is exactly 1, so mass is conserved by every
    term.
    """
    n = _check_half_order(n)
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")
    g = _as_signed(g)
    if t == 0:
        return g
    kern = gn_kernel(n, g.eps)
    rate = 2**n / g.eps ** (2 * n)
    lam_total = rate * t
    n_steps = max(1, math.ceil(lam_total / lambda_max))
    lam = lam_total / n_steps
    coeffs = np.array(g.coeffs, dtype=float)
    j_min = g.j_min
    for _ in range(n_steps):
        weight = math.exp(-lam)
        term = coeffs
        term_j_min = j_min
        acc = weight * term
        acc_j_min = term_j_min
        i = 0
        while True:
            i += 1
            term = np.convolve(kern.function.coeffs, term)
            term_j_min -= n
            weight *= lam / i
            acc = np.concatenate([np.zeros(n), acc, np.zeros(n)])
            acc_j_min -= n
            acc += weight * term
            if i > lam and weight * np.abs(term).sum() < tail_tol:
                break
        coeffs, j_min = acc, acc_j_min
    return SignedLatticeFunction(eps=g.eps, coeffs=coeffs, j_min=j_min, N=g.N)


def spectral_higher_order_solution(g0_hat, n, eps, t, xi, mode):
    """Fourier-side solution exp(t * sigma(xi)) * g0_hat(xi) of an order-2n diffusion.

    ``mode`` selects sigma: 'rosenau' is -(xi^2/(1+eps^2 xi^2))^n, 'discrete'
    is -(2(1-cos(eps*xi))/eps^2)^n, 'exact' is -xi^(2n).
    """
    n = _check_half_order(n)
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")
    xi_arr = np.asarray(xi, dtype=float)
    if mode == "rosenau":
        sig = np.asarray(-((xi_arr**2 / (1.0 + eps**2 * xi_arr**2)) ** n))
    elif mode == "discrete":
        if not eps > 0:
            raise ParameterError(f"eps must be positive, got {eps}")
        sig = np.asarray(-((2.0 * (1.0 - np.cos(eps * xi_arr)) / eps**2) ** n))
    elif mode == "exact":
        sig = np.asarray(-(xi_arr ** (2 * n)))
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    ev = g0_hat.eval if hasattr(g0_hat, "eval") else g0_hat
    out = np.exp(t * sig) * np.asarray(ev(xi_arr))
    if np.ndim(xi) == 0:
        return complex(out)
    return out
