"""The hypercube walk, its t-step kernels, and killed-walk Green functions.

The walk is X_{t+1} = X_t XOR Z_t with i.i.d. increments.  Killing happens
at an independent geometric time T_alpha, P(T_alpha = t) = (1-alpha) alpha^t,
and the killed-endpoint law from x is the row x of

    (1-alpha) G(x, y; alpha)
        = 2^-N [1 + sum_{A != 0} (1 + c (1 - rho_A))^-1 prod_{k in A} (-1)^(x[k]+y[k])]

with c = alpha/(1-alpha).  Everything here is a function of d = x XOR y, so
whole tables are one Walsh-Hadamard transform of the coefficient vector.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, floor, log

import numpy as np

from . import increments
from .errors import DomainError, ResourceLimitError
from .increments import IncrementModel, increment_pmf, is_exchangeable, is_limit, rho_k
from .polynomials import EXACT_N_LIMIT, cached_basis, krawtchouk_row
from .walsh import fwht, subset_signs

ORACLE_N_LIMIT = 12
SPECTRAL_ENUMERATION_N_LIMIT = 24


@dataclass(frozen=True)
class GreenSpec:
    """Dimension, increment law, and killing parameter: fixes the field covariance."""
    N: int
    model: IncrementModel
    alpha: float

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"dimension must be >= 1, got {self.N}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0,1), got {self.alpha}")
        if is_limit(self.model):
            raise DomainError("limit-regime models have no finite-N walk")

    @property
    def c(self) -> float:
        return self.alpha / (1.0 - self.alpha)


def step(x: int, model, N: int, rng: np.random.Generator) -> int:
    """One transition x -> x XOR Z."""
    return x ^ increments.sample_Z(model, N, rng)


def transition_matrix(model, N: int) -> np.ndarray:
    """Dense one-step kernel P(y|x) = P(Z = x XOR y), built from the increment law.

    Doubly stochastic; this is the oracle side of every spectral cross-check.
    """
    if N > ORACLE_N_LIMIT:
        raise ResourceLimitError(f"dense kernels are capped at N={ORACLE_N_LIMIT}, got {N}")
    pmf = increment_pmf(model, N)
    idx = np.arange(1 << N)
    return pmf[np.bitwise_xor.outer(idx, idx)]


def t_step_prob(model, N: int, t: int, x: int, y: int) -> float:
    """P(X_t = y | X_0 = x) from the spectral expansion with eigenvalues rho_A^t."""
    if t < 0:
        raise DomainError(f"step count must be >= 0, got {t}")
    _check_vertex(x, N)
    _check_vertex(y, N)
    d = (x ^ y).bit_count()
    if is_exchangeable(model):
        rho = np.array([rho_k(model, k, N) for k in range(N + 1)])
        return float(np.dot(_binom_pmf(N) * _q_table_col(N, d), rho ** t))
    if N > SPECTRAL_ENUMERATION_N_LIMIT:
        raise ResourceLimitError(
            f"subset enumeration is capped at N={SPECTRAL_ENUMERATION_N_LIMIT}, got {N}")
    rho = increments.rho_all_subsets(model, N)
    return float(np.dot(rho ** t, subset_signs(x ^ y, N))) / (1 << N)


def _binom_pmf(N: int) -> np.ndarray:
    if N <= EXACT_N_LIMIT:
        return np.array([comb(N, k) for k in range(N + 1)], dtype=float) * 0.5 ** N
    from scipy.special import gammaln
    k = np.arange(N + 1)
    return np.exp(gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1) - N * log(2.0))


def _q_table_col(N: int, d: int) -> np.ndarray:
    """Q_k(d) for k = 0..N."""
    if N <= EXACT_N_LIMIT:
        return cached_basis(N).q_row(d)
    return krawtchouk_row(N, d)


def spectral_weights(spec: GreenSpec) -> np.ndarray:
    """(1 + c (1 - rho_k))^-1 for k = 0..N (exchangeable models)."""
    if not is_exchangeable(spec.model):
        raise DomainError("size-indexed weights need an exchangeable model")
    rho = np.array([rho_k(spec.model, k, spec.N) for k in range(spec.N + 1)])
    return 1.0 / (1.0 + spec.c * (1.0 - rho))


def green_spectral(spec: GreenSpec, x: int, y: int) -> float:
    """(1-alpha) G(x, y; alpha), the killed-endpoint probability.

    Exchangeable models use the O(N) Krawtchouk form

        sum_k (1 + c(1-rho_k))^-1 Binom(N,1/2)(k) Q_k(d),  d = ||x XOR y||,

    written as an expectation over Binomial(N,1/2) so no term exceeds the
    binomial mass (stable for any N).
    """
    _check_vertex(x, spec.N)
    _check_vertex(y, spec.N)
    if is_exchangeable(spec.model):
        d = (x ^ y).bit_count()
        return float(np.dot(_binom_pmf(spec.N) * _q_table_col(spec.N, d),
                            spectral_weights(spec)))
    if spec.N > SPECTRAL_ENUMERATION_N_LIMIT:
        raise ResourceLimitError(
            f"subset enumeration is capped at N={SPECTRAL_ENUMERATION_N_LIMIT}, got {spec.N}")
    weights = subset_weights(spec)
    return float(np.dot(weights, subset_signs(x ^ y, spec.N))) / (1 << spec.N)


def subset_weights(spec: GreenSpec) -> np.ndarray:
    """(1 + c (1 - rho_A))^-1 for every subset bitmask A (2^N vector)."""
    rho = increments.rho_all_subsets(spec.model, spec.N)
    return 1.0 / (1.0 + spec.c * (1.0 - rho))


def green_xor_table(spec: GreenSpec) -> np.ndarray:
    """(1-alpha) G(x, y) for every displacement d = x XOR y, via one fast transform."""
    if spec.N > SPECTRAL_ENUMERATION_N_LIMIT:
        raise ResourceLimitError(
            f"subset enumeration is capped at N={SPECTRAL_ENUMERATION_N_LIMIT}, got {spec.N}")
    return fwht(subset_weights(spec)) / (1 << spec.N)


def green_matrix_spectral(spec: GreenSpec) -> np.ndarray:
    """Full 2^N x 2^N table of (1-alpha) G via the spectral route."""
    table = green_xor_table(spec)
    idx = np.arange(1 << spec.N)
    return table[np.bitwise_xor.outer(idx, idx)]


def green_matrix_oracle(spec: GreenSpec) -> np.ndarray:
    """(1-alpha)(I - alpha P)^-1 by dense solve; independent of the spectral route."""
    if spec.N > ORACLE_N_LIMIT:
        raise ResourceLimitError(f"the dense oracle is capped at N={ORACLE_N_LIMIT}, got {spec.N}")
    P = transition_matrix(spec.model, spec.N)
    n = 1 << spec.N
    return (1.0 - spec.alpha) * np.linalg.solve(np.eye(n) - spec.alpha * P, np.eye(n))


def green_hamming(spec: GreenSpec, u: int, v: int) -> float:
    """Killed-endpoint law of the Hamming level: P(||X_T|| = v | ||X_0|| = u).

    binom(N,v) 2^-N [1 + sum_k (1+c(1-rho_k))^-1 binom(N,k) Q_k(v) Q_k(u)].
    """
    if not is_exchangeable(spec.model):
        raise DomainError("the Hamming kernel needs an exchangeable model")
    if not (0 <= u <= spec.N and 0 <= v <= spec.N):
        raise DomainError(f"levels must lie in [0, {spec.N}], got u={u}, v={v}")
    w = spectral_weights(spec)
    qu, qv = _q_table_col(spec.N, u), _q_table_col(spec.N, v)
    binoms = np.array([comb(spec.N, k) for k in range(spec.N + 1)], dtype=float)
    series = float(np.dot(w * binoms * 0.5 ** spec.N, qu * qv))
    return comb(spec.N, v) * series


def sample_geometric_time(alpha: float, rng: np.random.Generator) -> int:
    """T_alpha with P(T = t) = (1-alpha) alpha^t, t >= 0, by CDF inversion."""
    u = 1.0 - rng.random()  # in (0, 1]
    return int(floor(log(u) / log(alpha)))


def sample_killed_endpoint(spec: GreenSpec, x0: int, rng: np.random.Generator) -> int:
    """Run the walk for an independent geometric time and return the endpoint."""
    _check_vertex(x0, spec.N)
    x = x0
    for _ in range(sample_geometric_time(spec.alpha, rng)):
        x = step(x, spec.model, spec.N, rng)
    return x


def coupon_collector_prob(t: int, N: int) -> float:
    """P(exactly t uniform site draws are needed to touch all N sites).

    Stirling2(t-1, N-1) * N! / N^t with the explicit alternating-sum
    Stirling number; exact integer arithmetic, float result.
    """
    if t < 1:
        raise DomainError(f"draw count must be >= 1, got {t}")
    if N < 1:
        raise DomainError(f"site count must be >= 1, got {N}")
    a, b = t - 1, N - 1
    if b == 0:
        return 1.0 if t == 1 else 0.0
    s2 = sum((-1) ** (b - j) * comb(b, j) * j ** a for j in range(b + 1)) // factorial(b)
    return float(Fraction(s2 * factorial(N), N ** t))


def _check_vertex(x: int, N: int):
    if x < 0 or x >> N:
        raise DomainError(f"vertex {x:#x} is not within {{0,1}}^{N}")
