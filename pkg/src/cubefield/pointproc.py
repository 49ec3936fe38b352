"""Killed point processes on [-1, 1] and the product variables Y, Y_phi.

A mixture model for the walk increments carries a spin measure nu on
[-1, 1] (the law of xi = 1 - 2*omega).  The killed walk from the origin is
described by the point process of T_alpha i.i.d. spins plus an initial
point; the product of all points,

    Y = xi_0 * prod_{j=1}^{T_alpha} xi_j,

has moments E[Y^k] = (1 + c (1 - rho_k))^-1 and ties the point-process
layer to the Green function:

    (1-alpha) G(x, y) = E[ ((1-Y)/2)^d ((1+Y)/2)^(N-d) ],  d = ||x XOR y||.

The phi-th convolution root Y_phi (negative-binomial point process, seen
as a mixed Poisson process) satisfies E[Y_phi^k] = E[Y^k]^phi.

Samplers work on (sign, log|Y|) pairs internally so products of hundreds
of spins cannot underflow.
"""

from dataclasses import dataclass, field
from math import comb, exp, inf, log

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from . import increments
from .errors import DomainError
from .walk import GreenSpec, green_spectral

_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-12, limit=200)


# ---------------------------------------------------------------------------
# spin measures


@dataclass(frozen=True)
class DiscreteSpin:
    """Finitely many atoms on [-1, 1]."""
    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        wts = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        if len(pts) != len(wts) or not pts:
            raise DomainError("points and weights must be nonempty and equal length")
        if any(abs(p) > 1.0 for p in pts):
            raise DomainError("spin atoms must lie in [-1, 1]")
        if any(w < 0 for w in wts) or abs(sum(wts) - 1.0) > 1e-12:
            raise DomainError("weights must be nonnegative and sum to 1")

    def moment(self, k):
        return sum(w * p ** k for p, w in zip(self.points, self.weights))

    def abs_moment(self, theta):
        self._no_zero_atom(theta)
        return sum(w * abs(p) ** theta for p, w in zip(self.points, self.weights))

    def abs_moment_split(self, theta):
        """(integral over [-1,0], integral over (0,1]) of |xi|^theta."""
        self._no_zero_atom(theta)
        neg = sum(w * abs(p) ** theta for p, w in zip(self.points, self.weights) if p <= 0)
        pos = sum(w * p ** theta for p, w in zip(self.points, self.weights) if p > 0)
        return neg, pos

    def mass_nonpositive(self):
        return sum(w for p, w in zip(self.points, self.weights) if p <= 0)

    def has_atom_at_zero(self):
        return any(w > 0 and p == 0.0 for p, w in zip(self.points, self.weights))

    def sample(self, rng, size=None):
        return rng.choice(self.points, p=self.weights, size=size)

    def _no_zero_atom(self, theta):
        if theta > 0 and self.has_atom_at_zero():
            raise DomainError("measure has an atom at zero; |xi|^theta integrals undefined")


def delta_spin(value: float) -> DiscreteSpin:
    return DiscreteSpin((value,), (1.0,))


@dataclass(frozen=True)
class BetaOmegaSpin:
    """Pushforward of omega ~ Beta(a, b) under xi = 1 - 2*omega."""
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("Beta parameters must be positive")

    def moment(self, k):
        return increments.rho_k(increments.DeFinettiBeta(self.a, self.b), k)

    def abs_moment(self, theta):
        neg, pos = self.abs_moment_split(theta)
        return neg + pos

    def abs_moment_split(self, theta):
        dens = self._omega_density
        # xi <= 0 is omega >= 1/2
        neg = quad(lambda w: (2 * w - 1.0) ** theta * dens(w), 0.5, 1.0, **_QUAD_OPTS)[0]
        pos = quad(lambda w: (1.0 - 2 * w) ** theta * dens(w), 0.0, 0.5, **_QUAD_OPTS)[0]
        return neg, pos

    def _omega_density(self, w):
        if w <= 0.0 or w >= 1.0:
            return 0.0
        ln = (self.a - 1) * log(w) + (self.b - 1) * log(1 - w) \
            - (gammaln(self.a) + gammaln(self.b) - gammaln(self.a + self.b))
        return exp(ln)

    def mass_nonpositive(self):
        from scipy.special import betainc
        return 1.0 - float(betainc(self.a, self.b, 0.5))

    def has_atom_at_zero(self):
        return False

    def sample(self, rng, size=None):
        return 1.0 - 2.0 * rng.beta(self.a, self.b, size=size)


@dataclass(frozen=True)
class SymmetricBetaMagnitudeSpin:
    """xi = S * R with S = +-1 equiprobable and R ~ Beta(a, b) on (0, 1]."""
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("Beta parameters must be positive")

    def moment(self, k):
        if k % 2 == 1:
            return 0.0
        return self.abs_moment(k)

    def abs_moment(self, theta):
        # E[R^theta] = Gamma(a+theta)Gamma(a+b) / (Gamma(a+b+theta)Gamma(a))
        return exp(gammaln(self.a + theta) + gammaln(self.a + self.b)
                   - gammaln(self.a + self.b + theta) - gammaln(self.a))

    def abs_moment_split(self, theta):
        half = 0.5 * self.abs_moment(theta)
        return half, half

    def mass_nonpositive(self):
        return 0.5

    def has_atom_at_zero(self):
        return False

    def sample(self, rng, size=None):
        r = rng.beta(self.a, self.b, size=size)
        signs = np.where(rng.random(size=size) < 0.5, 1.0, -1.0)
        return signs * r


def spin_measure_of(model) -> "SpinMeasure":
    """The spin measure attached to a mixture-type increment model."""
    match model:
        case increments.IIDBernoulli(p=p):
            return delta_spin(1.0 - 2.0 * p)
        case increments.DeFinettiDiscrete(atoms=atoms, weights=weights):
            return DiscreteSpin(tuple(1.0 - 2.0 * a for a in atoms), weights)
        case increments.DeFinettiBeta(a=a, b=b):
            return BetaOmegaSpin(a, b)
        case increments.SymmetricBetaSpin(a=a, b=b):
            return SymmetricBetaMagnitudeSpin(a, b)
    raise DomainError(f"{type(model).__name__} carries no spin measure")


SpinMeasure = DiscreteSpin | BetaOmegaSpin | SymmetricBetaMagnitudeSpin


# ---------------------------------------------------------------------------
# the product law


@dataclass(frozen=True)
class YLaw:
    """Product-of-points law: spin measure, killing alpha, divisibility index phi.

    phi = 1 is the geometric construction Y; phi = 1/2 is the half process
    entering the field's spin representation.  The initial measure defaults
    to a unit point mass at +1 (walk started at the origin).
    """
    spin: SpinMeasure
    alpha: float
    phi: float = 1.0
    initial: SpinMeasure = field(default_factory=lambda: delta_spin(1.0))

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0,1), got {self.alpha}")
        if self.phi <= 0:
            raise DomainError(f"phi must be positive, got {self.phi}")

    @classmethod
    def from_model(cls, model, alpha, phi=1.0, initial=None) -> "YLaw":
        spin = spin_measure_of(model)
        if initial is None:
            return cls(spin, alpha, phi)
        return cls(spin, alpha, phi, initial)

    @property
    def c(self) -> float:
        return self.alpha / (1.0 - self.alpha)


def moment_Y(law: YLaw, k: int) -> float:
    """E[Y_phi^k] = (1 + c (1 - rho_k))^(-phi) (origin-start convention)."""
    if k < 0:
        raise DomainError(f"moment order must be >= 0, got {k}")
    rho = law.spin.moment(k)
    return (1.0 + law.c * (1.0 - rho)) ** (-law.phi)


def sample_Y_signed_log(law: YLaw, rng: np.random.Generator,
                        size: int) -> tuple[np.ndarray, np.ndarray]:
    """(sign, log|Y|) pairs for the geometric (phi = 1) construction.

    sign is in {-1, 0, +1}; a zero spin gives sign 0 and log|Y| = -inf.
    """
    if law.phi != 1.0:
        raise DomainError("the geometric construction is the phi = 1 law; use sample_Y_phi")
    u = 1.0 - rng.random(size)
    counts = np.floor(np.log(u) / log(law.alpha)).astype(np.int64)
    signs, logs = _product_batches(law.spin, counts, rng)
    xi0 = np.asarray(law.initial.sample(rng, size=size), dtype=float)
    signs = signs * np.sign(xi0)
    with np.errstate(divide="ignore"):
        logs = logs + np.where(xi0 == 0.0, -inf, np.log(np.abs(xi0)))
    return signs, logs


def _product_batches(spin, counts, rng):
    """Per-row (sign, log-magnitude) of products of `counts[i]` fresh spins."""
    total = int(counts.sum())
    signs = np.ones(counts.shape, dtype=float)
    logs = np.zeros(counts.shape, dtype=float)
    if total == 0:
        return signs, logs
    draws = np.asarray(spin.sample(rng, size=total), dtype=float)
    with np.errstate(divide="ignore"):
        log_draws = np.where(draws == 0.0, -inf, np.log(np.abs(draws)))
    cum_log = np.concatenate([[0.0], np.cumsum(log_draws)])
    cum_sign = np.concatenate([[1.0], np.cumprod(np.sign(draws))])
    ends = np.cumsum(counts)
    starts = ends - counts
    with np.errstate(invalid="ignore"):
        logs = cum_log[ends] - cum_log[starts]
        signs = cum_sign[ends] / np.where(cum_sign[starts] == 0.0, 1.0, cum_sign[starts])
    # zero draws poison the running products; recompute affected rows directly
    bad = np.flatnonzero(~np.isfinite(logs) | (cum_sign[starts] == 0.0))
    for i in bad:
        chunk = draws[starts[i]:ends[i]]
        if chunk.size == 0:
            signs[i], logs[i] = 1.0, 0.0
        elif np.any(chunk == 0.0):
            signs[i], logs[i] = 0.0, -inf
        else:
            signs[i] = float(np.prod(np.sign(chunk)))
            logs[i] = float(np.sum(np.log(np.abs(chunk))))
    return signs, logs


def sample_Y(law: YLaw, rng: np.random.Generator, size: int | None = None):
    """Y itself (phi = 1): initial spin times T_alpha further i.i.d. spins."""
    n = 1 if size is None else size
    signs, logs = sample_Y_signed_log(law, rng, n)
    vals = signs * np.exp(logs)
    return float(vals[0]) if size is None else vals


def sample_Y_phi(law: YLaw, rng: np.random.Generator, size: int | None = None):
    """Y_phi via the mixed-Poisson construction.

    Draw lambda ~ Gamma(phi), M ~ Poisson(lambda c), multiply M i.i.d.
    spins.  No initial point: this is the pure convolution-root process.
    """
    n = 1 if size is None else size
    lam = rng.gamma(law.phi, size=n)
    counts = rng.poisson(lam * law.c)
    signs, logs = _product_batches(law.spin, counts.astype(np.int64), rng)
    vals = signs * np.exp(logs)
    return float(vals[0]) if size is None else vals


# ---------------------------------------------------------------------------
# transforms and sign probabilities


def laplace_neg_log_abs(law: YLaw, theta: float) -> float:
    """Laplace transform E[e^(-theta * (-log|Y|))] = E[|Y|^theta], phi = 1 form:

        (1 + c int (1-|xi|^theta) nu)^-1 * int |xi|^theta phi_0.
    """
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    _require_no_zero_atoms(law)
    nu_abs = law.spin.abs_moment(theta)
    init_abs = law.initial.abs_moment(theta)
    return init_abs / (1.0 + law.c * (1.0 - nu_abs))


def joint_sign_laplace(law: YLaw, theta: float, sign: int) -> float:
    """E[1{sign(Y) = sign} |Y|^theta]: the two-term (H(1) +- H(-1))/2 resolvent form."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    _require_no_zero_atoms(law)
    nu_neg, nu_pos = law.spin.abs_moment_split(theta)
    init_neg, init_pos = law.initial.abs_moment_split(theta)
    h_plus = (init_neg + init_pos) / (1.0 + law.c * (1.0 - nu_neg - nu_pos))
    h_minus = (1.0 - law.alpha) * (init_pos - init_neg) \
        / (1.0 - law.alpha * (nu_pos - nu_neg))
    return 0.5 * (h_plus + sign * h_minus)


def sign_probability(law: YLaw, sign: int) -> float:
    """P(Y > 0) or P(Y < 0):

        (1/2) (1 +- (1 + 2c nu_-)^-1 (1 - 2 phi0_-)),

    with nu_- and phi0_- the spin mass on [-1, 0].
    """
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    nu_neg = law.spin.mass_nonpositive()
    init_neg = law.initial.mass_nonpositive()
    return 0.5 * (1.0 + sign * (1.0 - 2.0 * init_neg) / (1.0 + 2.0 * law.c * nu_neg))


def _require_no_zero_atoms(law: YLaw):
    if law.spin.has_atom_at_zero() or law.initial.has_atom_at_zero():
        raise DomainError("spin or initial measure has an atom at zero")


# ---------------------------------------------------------------------------
# measure evolution and the Green-function tie


@dataclass(frozen=True)
class EvolvedMeasure:
    """Spin law of the walk's mixture parameter after t unkilled steps."""
    spin: SpinMeasure
    initial: SpinMeasure
    steps: int

    def moment(self, k: int) -> float:
        """E[psi_t^k] = (int xi^k nu)^t * int xi^k phi_0."""
        return self.spin.moment(k) ** self.steps * self.initial.moment(k)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        n = 1 if size is None else size
        out = np.asarray(self.initial.sample(rng, size=n), dtype=float)
        for _ in range(self.steps):
            out = out * np.asarray(self.spin.sample(rng, size=n), dtype=float)
        return float(out[0]) if size is None else out


def evolve_measure(spin: SpinMeasure, initial: SpinMeasure, t: int) -> EvolvedMeasure:
    if t < 0:
        raise DomainError(f"step count must be >= 0, got {t}")
    return EvolvedMeasure(spin, initial, t)


def killed_measure_moments(law: YLaw, ones: int, total: int,
                           method: str = "expansion",
                           rng: np.random.Generator | None = None,
                           draws: int = 200_000) -> float:
    """E[V^n (1-V)^(N-n)] for V = (1 - Y)/2: the killed de Finetti moments.

    Equals (1-alpha) G(x, y) whenever ||x XOR y|| = n in dimension N.  The
    expansion route rewrites the product as 2^-N sum_m coeff_m E[Y^m] with
    integer coefficients; the MC route averages over sampled Y.
    """
    if law.phi != 1.0:
        raise DomainError("killed de Finetti moments are a phi = 1 statement")
    if not 0 <= ones <= total:
        raise DomainError(f"need 0 <= ones <= total, got {ones}, {total}")
    if method == "expansion":
        # (1-Y)^n (1+Y)^(N-n) expanded in powers of Y, exact coefficients
        coeffs = np.zeros(total + 1)
        for i in range(ones + 1):
            for j in range(total - ones + 1):
                coeffs[i + j] += (-1) ** i * comb(ones, i) * comb(total - ones, j)
        moments = np.array([moment_Y(law, m) for m in range(total + 1)])
        return float(np.dot(coeffs, moments)) * 0.5 ** total
    if method == "mc":
        if rng is None:
            raise DomainError("the MC route needs an rng")
        y = sample_Y(law, rng, size=draws)
        v = 0.5 * (1.0 - y)
        return float(np.mean(v ** ones * (1.0 - v) ** (total - ones)))
    raise DomainError(f"unknown method {method!r}")


def killed_green_check(law: YLaw, model, N: int) -> float:
    """Max gap between the moment route and the spectral Green function over levels."""
    spec = GreenSpec(N, model, law.alpha)
    worst = 0.0
    for n in range(N + 1):
        x = (1 << n) - 1
        gap = abs(killed_measure_moments(law, n, N) - green_spectral(spec, 0, x))
        worst = max(worst, gap)
    return worst


# ---------------------------------------------------------------------------
# the Beta(a, 1) worked example


def beta_example_density(a: float, alpha: float, zeta: float) -> float:
    """Continuous density of the killed product for the symmetric Beta(a,1) spin law.

    The killed product zeta = prod_{j<=T_alpha} xi_j has an atom of mass
    (1-alpha) at +1 plus this continuous part on (-1, 1):

        f(z) = (1-alpha) alpha (a/2) |z|^(a(1-alpha) - 1),

    obtained by mixing the fixed-t densities
    (a / (2 Gamma(t))) |z|^(a-1) (-a log|z|)^(t-1) over P(T = t) = (1-alpha) alpha^t;
    the geometric-exponential mixture collapses to the single power above.
    Integrates to alpha, so atom + density carry total mass 1.
    """
    if a <= 0:
        raise DomainError(f"shape must be positive, got {a}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0,1), got {alpha}")
    z = abs(zeta)
    if z >= 1.0 or z == 0.0:
        return 0.0
    return (1.0 - alpha) * alpha * (a / 2.0) * z ** (a * (1.0 - alpha) - 1.0)


def beta_fixed_steps_density(a: float, t: int, zeta: float) -> float:
    """Density of the product of exactly t spins under the symmetric Beta(a,1) law.

    (a / 2 Gamma(t)) |z|^(a-1) (-a log|z|)^(t-1), assembled in log space so
    large t neither overflows the power nor the factorial.
    """
    if t < 1:
        raise DomainError(f"step count must be >= 1, got {t}")
    z = abs(zeta)
    if z >= 1.0 or z == 0.0:
        return 0.0
    log_val = log(a / 2.0) + (a - 1.0) * log(z) \
        + (t - 1) * log(-a * log(z)) - gammaln(t)
    return exp(log_val)


def beta_killed_product_sample(a: float, b: int, alpha: float,
                               rng: np.random.Generator,
                               size: int | None = None):
    """Killed product for symmetric Beta(a, b) spins, integer b >= 1.

    For fixed T = t >= 1 the magnitude is exp(-sum_{j=0}^{b-1} U_j/(a+j))
    with U_j i.i.d. Gamma(t); the sign is an independent fair coin.  T = 0
    returns +1 (origin start).
    """
    if b < 1 or b != int(b):
        raise DomainError(f"b must be a positive integer, got {b}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0,1), got {alpha}")
    n = 1 if size is None else size
    u = 1.0 - rng.random(n)
    t = np.floor(np.log(u) / log(alpha))
    log_mag = np.zeros(n)
    for j in range(int(b)):
        log_mag -= rng.gamma(np.where(t > 0, t, 1.0)) / (a + j)
    signs = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    vals = np.where(t == 0, 1.0, signs * np.exp(log_mag))
    return float(vals[0]) if size is None else vals
