"""Lattice probability densities and signed lattice functions.

A density of resolution N lives on the velocity lattice {j*eps : |j| <= 2*N**2}
with eps = 1/N.  Coefficient arrays use the storage convention
idx = 0 .. 4*N**2 with physical index j = idx - 2*N**2.
"""

import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

logger = logging.getLogger(__name__)

#: largest coefficient array any constructor will allocate
GRID_CAP = 2**20

#: renormalize (and report) when |sum - 1| exceeds this
MASS_TOL = 1e-12

#: coefficients in [-NEG_CLIP, 0) are clipped to zero; below it is an error
NEG_CLIP = 1e-15


class LatticeError(ValueError):
    """Base class for lattice value errors."""


class DimensionError(LatticeError):
    """Coefficient array has the wrong length for the stated resolution."""


class NegativityError(LatticeError):
    """A density coefficient is negative beyond the clip tolerance."""


class DegenerateInputError(LatticeError):
    """Total mass is zero or not a finite positive number."""


class ParameterError(LatticeError):
    """An argument is outside its admissible range."""


class IncompatibleLatticeError(LatticeError):
    """Operands live on lattices with different steps."""


class ProjectionFailureError(LatticeError):
    """Moment projection produced inadmissible weights."""


class ResourceLimitError(LatticeError):
    """Requested resolution exceeds the configured grid cap."""


class PreconditionError(LatticeError):
    """A documented precondition of the operation is violated."""


def _check_lattice_size(N):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ParameterError(f"resolution N must be a positive integer, got {N!r}")
    if 4 * N * N + 1 > GRID_CAP:
        raise ResourceLimitError(
            f"lattice of resolution N={N} needs {4 * N * N + 1} points, cap is {GRID_CAP}"
        )


@dataclass(frozen=True)
class LatticeDensity:
    """Probability masses phi_j >= 0 with unit total mass on {j*eps : |j| <= 2N^2}."""

    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        _check_lattice_size(self.N)
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size != 4 * self.N * self.N + 1:
            raise DimensionError(
                f"expected {4 * self.N * self.N + 1} coefficients for N={self.N}, got {c.size}"
            )
        if not np.all(np.isfinite(c)):
            raise DegenerateInputError("coefficients must be finite")
        if np.any(c < 0):
            raise NegativityError(f"negative coefficient {c.min():.3e}")
        s = c.sum()
        if abs(s - 1.0) > MASS_TOL:
            raise DegenerateInputError(f"total mass {s!r} is not 1 within {MASS_TOL}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def eps(self):
        return 1.0 / self.N

    @property
    def j_values(self):
        return np.arange(-2 * self.N * self.N, 2 * self.N * self.N + 1)

    def as_signed(self):
        return SignedLatticeFunction(
            eps=self.eps, coeffs=self.coeffs, j_min=-2 * self.N * self.N, N=self.N
        )


@dataclass(frozen=True)
class SignedLatticeFunction:
    """Real lattice coefficients on {j*eps : j_min <= j <= j_min + len - 1}.

    Unlike a density, the coefficients may be negative and the index range is
    explicit (convolutions extend it).  ``N`` is set when the function is tied
    to the standard lattice of a resolution, else ``None``.
    """

    eps: float
    coeffs: np.ndarray
    j_min: int
    N: int | None = None

    def __post_init__(self):
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ParameterError(f"lattice step must be positive, got {self.eps!r}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise DimensionError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise DegenerateInputError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def j_max(self):
        return self.j_min + self.coeffs.size - 1

    @property
    def j_values(self):
        return np.arange(self.j_min, self.j_min + self.coeffs.size)


@dataclass(frozen=True)
class MomentSummary:
    """Mass, mean velocity and temperature (second moment about the mean)."""

    mass: float
    mean: float
    temperature: float


def _parts(g):
    """(eps, coeffs, j_values) for either lattice value type."""
    if isinstance(g, LatticeDensity):
        return g.eps, g.coeffs, g.j_values
    if isinstance(g, SignedLatticeFunction):
        return g.eps, g.coeffs, g.j_values
    raise ParameterError(f"expected a lattice value, got {type(g).__name__}")


def new_lattice_density(N, coeffs):
    """Validate, clip tiny negatives, and renormalize a coefficient vector.

    The input must have length 4*N**2 + 1; entries below -1e-15 raise, entries
    in [-1e-15, 0) are clipped to zero.  If the total mass differs from 1 by
    more than 1e-12 the vector is renormalized and the factor is reported at
    log level INFO.
    """
    _check_lattice_size(N)
    c = np.array(coeffs, dtype=float)
    if c.ndim != 1 or c.size != 4 * N * N + 1:
        raise DimensionError(f"expected {4 * N * N + 1} coefficients for N={N}, got {c.size}")
    if not np.all(np.isfinite(c)):
        raise DegenerateInputError("coefficients must be finite")
    if np.any(c < -NEG_CLIP):
        raise NegativityError(f"coefficient {c.min():.3e} below -{NEG_CLIP}")
    np.clip(c, 0.0, None, out=c)
    s = c.sum()
    if not (s > 0 and math.isfinite(s)):
        raise DegenerateInputError(f"total mass {s!r} is degenerate")
    if abs(s - 1.0) > MASS_TOL:
        logger.info("renormalizing density: mass %.17g, factor %.17g", s, 1.0 / s)
        c /= s
    elif s != 1.0:
        c /= s
    return LatticeDensity(N=N, coeffs=c)


def delta_density(N, j=0):
    """Point mass at lattice site j."""
    _check_lattice_size(N)
    if abs(j) > 2 * N * N:
        raise ParameterError(f"site j={j} outside |j| <= {2 * N * N}")
    c = np.zeros(4 * N * N + 1)
    c[j + 2 * N * N] = 1.0
    return LatticeDensity(N=N, coeffs=c)


def random_density(N, rng):
    """Uniformly random masses over the whole lattice, normalized."""
    _check_lattice_size(N)
    c = rng.random(4 * N * N + 1)
    return new_lattice_density(N, c)


def moment(g, k):
    """k-th raw moment sum_j (j*eps)**k * g_j; k = 0 gives the mass."""
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ParameterError(f"moment order must be a nonnegative integer, got {k!r}")
    if k > 12:
        raise ParameterError(f"moment order {k} exceeds the supported maximum 12")
    eps, c, j = _parts(g)
    if k == 0:
        return float(c.sum())
    v = j * eps
    return float(np.dot(v**k, c))


def moments(g):
    """MomentSummary of a density: mass, mean, temperature = m2/m0 - mean**2."""
    m0 = moment(g, 0)
    if abs(m0) < 1e-300:
        raise DegenerateInputError("cannot summarize moments of a zero-mass value")
    mean = moment(g, 1) / m0
    temp = moment(g, 2) / m0 - mean * mean
    if -1e-12 < temp < 0.0:
        temp = 0.0
    return MomentSummary(mass=m0, mean=mean, temperature=temp)


def psi_functional(g, psi):
    """sum_j psi(g_j) for a convex psi with psi(0) = 0."""
    _, c, _ = _parts(g)
    return float(sum(psi(x) for x in c))


def entropy(g):
    """Shannon entropy -sum_j g_j log g_j with the convention 0*log 0 = 0."""
    _, c, _ = _parts(g)
    pos = c[c > 0]
    return float(-np.dot(pos, np.log(pos)))


def char_fn(g, xi):
    """Characteristic function sum_j g_j exp(-i*eps*xi*j).

    ``xi`` may be a scalar or an array; the lattice makes the result periodic
    in xi with period 2*pi/eps.
    """
    eps, c, j = _parts(g)
    xi_arr = np.asarray(xi, dtype=float)
    scalar = xi_arr.ndim == 0
    flat = np.atleast_1d(xi_arr).ravel()
    out = np.empty(flat.shape, dtype=complex)
    # block the outer product so large grids stay within a few MB
    block = max(1, 2_000_000 // max(j.size, 1))
    for start in range(0, flat.size, block):
        chunk = flat[start : start + block]
        out[start : start + block] = np.exp(-1j * eps * np.outer(chunk, j)) @ c
    if scalar:
        return complex(out[0])
    return out.reshape(xi_arr.shape)


def convolve(a, b):
    """Lattice convolution (a*b)_j = sum_m a_m b_{j-m}; index ranges add."""
    if isinstance(a, LatticeDensity):
        a = a.as_signed()
    if isinstance(b, LatticeDensity):
        b = b.as_signed()
    if not isinstance(a, SignedLatticeFunction) or not isinstance(b, SignedLatticeFunction):
        raise ParameterError("convolve expects lattice values")
    if not math.isclose(a.eps, b.eps, rel_tol=0.0, abs_tol=1e-15):
        raise IncompatibleLatticeError(f"lattice steps differ: {a.eps!r} vs {b.eps!r}")
    c = np.convolve(a.coeffs, b.coeffs)
    N = a.N if a.N == b.N else None
    return SignedLatticeFunction(eps=a.eps, coeffs=c, j_min=a.j_min + b.j_min, N=N)


def three_point_density(N, k, theta0):
    """Masses w at +-k*eps and 1-2w at 0 with w = theta0 / (2*(k*eps)**2).

    Mean is exactly 0 and the second moment exactly theta0.
    """
    _check_lattice_size(N)
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= 2 * N * N:
        raise ParameterError(f"site k={k!r} outside 1 <= k <= {2 * N * N}")
    if theta0 < 0:
        raise ParameterError(f"theta0 must be nonnegative, got {theta0}")
    spread2 = (k / N) ** 2
    if theta0 > spread2 * (1 + 1e-15):
        raise ParameterError(
            f"theta0={theta0} not representable at sites +-{k}*eps: needs theta0 <= {spread2}"
        )
    w = theta0 / (2.0 * spread2)
    c = np.zeros(4 * N * N + 1)
    ctr = 2 * N * N
    c[ctr - k] = w
    c[ctr + k] = w
    c[ctr] = 1.0 - 2.0 * w
    return LatticeDensity(N=N, coeffs=c)


def _project_moments(c, v, u0, m2_target):
    """One multiplicative correction pass w -> w*(1 + a*v + b*(v^2 - m2)).

    (a, b) solve the 2x2 system that makes mean and raw second moment exact
    after the subsequent renormalization.
    """
    m1 = np.dot(v, c)
    m2 = np.dot(v**2, c)
    m3 = np.dot(v**3, c)
    m4 = np.dot(v**4, c)
    A = np.array(
        [
            [m2 - u0 * m1, m3 - m2 * m1],
            [m3 - m2_target * m1, m4 - m2 * m2],
        ]
    )
    rhs = np.array([u0 - m1, m2_target - m2])
    try:
        a, b = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise ProjectionFailureError(f"moment projection system is singular: {exc}") from exc
    return c * (1.0 + a * v + b * (v**2 - m2))


def gaussian_cells_density(N, u0, theta0, project=True):
    """Gaussian cell masses with an optional exact moment correction.

    Cell j receives the N(u0, theta0) mass of [j*eps - eps/2, j*eps + eps/2),
    computed from CDF differences, then the vector is renormalized.  With
    ``project=True`` a multiplicative linear-quadratic correction enforces
    mean u0 and temperature theta0 to within 1e-10; corrections that would
    clip more than 1e-8 of mass raise ProjectionFailureError.
    """
    _check_lattice_size(N)
    if not theta0 > 0:
        raise ParameterError(f"theta0 must be positive, got {theta0}")
    eps = 1.0 / N
    sd = math.sqrt(theta0)
    j = np.arange(-2 * N * N, 2 * N * N + 1)
    lo = (j * eps - 0.5 * eps - u0) / sd
    hi = (j * eps + 0.5 * eps - u0) / sd
    c = ndtr(hi) - ndtr(lo)
    s = c.sum()
    if not s > 0:
        raise DegenerateInputError("Gaussian mass on the lattice is zero")
    c = c / s
    if project:
        v = j * eps
        m2_target = theta0 + u0 * u0
        clipped_total = 0.0
        for _ in range(8):
            c = _project_moments(c, v, u0, m2_target)
            neg = c < 0
            if np.any(neg):
                clipped_total += float(-c[neg].sum())
                if clipped_total > 1e-8:
                    raise ProjectionFailureError(
                        f"moment projection clipped {clipped_total:.3e} of mass"
                    )
                c[neg] = 0.0
            c = c / c.sum()
            mean_err = abs(np.dot(v, c) - u0)
            m2_err = abs(np.dot(v**2, c) - m2_target)
            if mean_err <= 1e-13 and m2_err <= 1e-13:
                break
        mean = float(np.dot(v, c))
        temp = float(np.dot(v**2, c)) - mean * mean
        if abs(mean - u0) > 1e-10 or abs(temp - theta0) > 1e-10:
            raise ProjectionFailureError(
                f"projection left moment errors mean={mean - u0:.3e}, theta={temp - theta0:.3e}"
            )
    return new_lattice_density(N, c)


def construct_initial(kind, N, **params):
    """Build named initial data: 'three-point' (k, theta0) or 'gaussian-cells' (u0, theta0)."""
    if kind == "three-point":
        return three_point_density(N, params.pop("k"), params.pop("theta0"))
    if kind == "gaussian-cells":
        return gaussian_cells_density(N, params.pop("u0", 0.0), params.pop("theta0"))
    raise ParameterError(f"unknown initial-data kind {kind!r}")


def density_to_dict(g):
    """JSON-ready form: {"N": int, "coeffs": [...]} with j = idx - 2N^2."""
    return {"N": int(g.N), "coeffs": [float(x) for x in g.coeffs]}


def density_from_dict(obj):
    try:
        N = obj["N"]
        coeffs = obj["coeffs"]
    except (TypeError, KeyError) as exc:
        raise DimensionError(f"density object needs keys 'N' and 'coeffs': {exc}") from exc
    return new_lattice_density(int(N), coeffs)


def save_density(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(density_to_dict(g), fh)
        fh.write("\n")


def load_density(path):
    with open(path, "r", encoding="utf-8") as fh:
        return density_from_dict(json.load(fh))
