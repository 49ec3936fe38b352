"""Increment laws for the hypercube walk and their spectral functionals.

A walk step is X_{t+1} = X_t XOR Z.  Each law of Z determines, for every
subset A of [N], the eigenvalue of the Walsh character of A,

    rho_A = E[prod_{j in A} (-1)^Z[j]],

and the killed-walk gap b_A = c (1 - rho_A) with c = alpha/(1-alpha).
Exchangeable laws have rho_A depending on |A| only.  The Limit* variants
describe N -> infinity regimes and carry only b_A.

Models are small frozen dataclasses; every operation is pure given an
explicit numpy Generator, so instances are safe to share across threads.
"""

from dataclasses import dataclass
from math import comb, fsum, isclose
from typing import Union

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError
from .polynomials import EXACT_N_LIMIT, krawtchouk_eval, krawtchouk_row
from .walsh import popcounts

# past this order the alternating binomial expansion cancels (~3^k * eps);
# exact-degree Gauss-Jacobi takes over
_BINOMIAL_EXPANSION_MAX_K = 10


@dataclass(frozen=True)
class IIDBernoulli:
    """Entries of Z i.i.d. Bernoulli(p); the mixing measure is a point mass at p."""
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must be in [0,1], got {self.p}")


@dataclass(frozen=True)
class DeFinettiDiscrete:
    """Exchangeable Z: draw omega from finitely many atoms, then i.i.d. Bernoulli(omega)."""
    atoms: tuple
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(float(a) for a in self.atoms))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.atoms) != len(self.weights) or not self.atoms:
            raise DomainError("atoms and weights must be nonempty and equal length")
        if any(not 0.0 <= a <= 1.0 for a in self.atoms):
            raise DomainError("atoms must lie in [0,1]")
        if any(w < 0 for w in self.weights) or not isclose(sum(self.weights), 1.0, abs_tol=1e-12):
            raise DomainError("weights must be nonnegative and sum to 1")


@dataclass(frozen=True)
class DeFinettiBeta:
    """Exchangeable Z with omega ~ Beta(a, b)."""
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("Beta parameters must be positive")


@dataclass(frozen=True)
class SingleFlip:
    """Z is a uniformly random unit vector: the simple walk."""


@dataclass(frozen=True)
class MFlip:
    """Exactly m entries of Z are 1, uniformly placed."""
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"flip count must be >= 1, got {self.m}")


@dataclass(frozen=True)
class RandomSiteHalf:
    """One uniformly chosen entry of Z is Bernoulli(1/2), the rest are 0.

    The lazy simple walk: Z = 0 with probability 1/2, Z = e_j with
    probability 1/(2N) each.
    """


@dataclass(frozen=True)
class MarkovEntries:
    """Entries Z[1..N] form a homogeneous two-state Markov chain (not exchangeable)."""
    initial: tuple
    transition: tuple

    def __post_init__(self):
        init = tuple(float(v) for v in self.initial)
        rows = tuple(tuple(float(v) for v in row) for row in self.transition)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "transition", rows)
        if len(init) != 2 or not isclose(sum(init), 1.0, abs_tol=1e-12) or min(init) < 0:
            raise DomainError("initial must be a distribution on {0,1}")
        if len(rows) != 2 or any(
            len(r) != 2 or min(r) < 0 or not isclose(sum(r), 1.0, abs_tol=1e-12) for r in rows
        ):
            raise DomainError("transition must be 2x2 row-stochastic")


@dataclass(frozen=True)
class SymmetricBetaSpin:
    """Spin measure symmetric about 0 whose magnitude |xi| is Beta(a, b) on (0,1].

    Equivalently omega = (1 - xi)/2 is symmetric about 1/2.
    """
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("Beta parameters must be positive")


@dataclass(frozen=True)
class LimitLinear:
    """Limit regime with b_A = 2|A|/gamma (vanishing killing, alpha_N = 1 - gamma/N)."""
    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")


@dataclass(frozen=True)
class LimitPoissonDirichlet:
    """Limit regime b_A = kappa * int (1-(1-2w)^|A|) w^-1 (1-w)^(kappa-1) dw."""
    kappa: float

    def __post_init__(self):
        if self.kappa <= 0:
            raise DomainError("kappa must be positive")


IncrementModel = Union[
    IIDBernoulli, DeFinettiDiscrete, DeFinettiBeta, SingleFlip, MFlip,
    RandomSiteHalf, MarkovEntries, SymmetricBetaSpin, LimitLinear,
    LimitPoissonDirichlet,
]

_LIMIT_TYPES = (LimitLinear, LimitPoissonDirichlet)
_DEFINETTI_TYPES = (IIDBernoulli, DeFinettiDiscrete, DeFinettiBeta, SymmetricBetaSpin)


def is_limit(model) -> bool:
    return isinstance(model, _LIMIT_TYPES)


def is_exchangeable(model) -> bool:
    return not isinstance(model, MarkovEntries)


def is_definetti(model) -> bool:
    """True when the entries of Z are a mixture of i.i.d. Bernoulli rows."""
    return isinstance(model, _DEFINETTI_TYPES)


def depends_on_dimension(model) -> bool:
    """True when the law of a single entry changes with N (no V_infinity version)."""
    return isinstance(model, (SingleFlip, MFlip, RandomSiteHalf))


def _beta_power_moment(a: float, b: float, k: int) -> float:
    """E[(1-2w)^k] for w ~ Beta(a,b).

    Binomial expansion in exact-integer coefficients for small k; exact-degree
    Gauss-Jacobi quadrature beyond, where the alternating expansion would
    cancel catastrophically.
    """
    if k == 0:
        return 1.0
    if k <= _BINOMIAL_EXPANSION_MAX_K:
        moment = 1.0  # E[w^j], running product
        terms = [1.0]
        for j in range(1, k + 1):
            moment *= (a + j - 1) / (a + b + j - 1)
            terms.append(comb(k, j) * (-2.0) ** j * moment)
        return fsum(terms)
    nodes, weights = roots_jacobi(k // 2 + 1, a - 1.0, b - 1.0)
    return float(np.dot(weights, nodes ** k) / weights.sum())


def rho_k(model, k: int, N: int | None = None) -> float:
    """Eigenvalue for any subset of size k; exchangeable models only."""
    if k < 0:
        raise DomainError(f"subset size must be >= 0, got {k}")
    if k == 0:
        return 1.0
    match model:
        case IIDBernoulli(p=p):
            return (1.0 - 2.0 * p) ** k
        case DeFinettiDiscrete(atoms=atoms, weights=weights):
            return fsum(w * (1.0 - 2.0 * a) ** k for a, w in zip(atoms, weights))
        case DeFinettiBeta(a=a, b=b):
            return _beta_power_moment(a, b, k)
        case SymmetricBetaSpin(a=a, b=b):
            if k % 2 == 1:
                return 0.0
            val = 1.0
            for i in range(k):
                val *= (a + i) / (a + b + i)
            return val
        case SingleFlip():
            _need_dimension(N, k)
            return 1.0 - 2.0 * k / N
        case MFlip(m=m):
            _need_dimension(N, k)
            if m > N:
                raise DomainError(f"flip count {m} exceeds dimension {N}")
            return float(krawtchouk_eval(m, k, N)) if N <= EXACT_N_LIMIT \
                else float(krawtchouk_row(N, k, m)[m])
        case RandomSiteHalf():
            # Z = 0 w.p. 1/2, Z = e_j w.p. 1/(2N): the signed product
            # averages to 1/2 + (N - 2k)/(2N) = 1 - k/N.
            _need_dimension(N, k)
            return 1.0 - k / N
        case MarkovEntries():
            raise DomainError("rho_k needs an exchangeable model; use rho_subset")
        case _ if is_limit(model):
            raise DomainError("limit-regime models define only b_A, not rho")
    raise DomainError(f"unknown model {model!r}")


def _need_dimension(N, k):
    if N is None:
        raise DomainError("this model needs the dimension N")
    if k > N:
        raise DomainError(f"subset size {k} exceeds dimension {N}")


def rho_subset(model, subset: int, N: int) -> float:
    """Eigenvalue rho_A = E[prod_{j in A} (-1)^Z[j]] for a subset bitmask."""
    if subset < 0 or subset >> N:
        raise DomainError(f"subset {subset:#x} is not within [{N}]")
    if is_limit(model):
        raise DomainError("limit-regime models define only b_A, not rho")
    if isinstance(model, MarkovEntries):
        return _markov_rho(model, subset)
    return rho_k(model, int(subset).bit_count(), N)


def _markov_rho(model: MarkovEntries, subset: int) -> float:
    if subset == 0:
        return 1.0
    T = np.array(model.transition)
    v = np.array(model.initial)
    top = subset.bit_length()
    # signed transfer pass over positions 1..max(A); later positions keep mass 1
    if subset & 1:
        v = v * (1.0, -1.0)
    for pos in range(1, top):
        v = v @ T
        if subset >> pos & 1:
            v = v * (1.0, -1.0)
    return float(v.sum())


def rho_all_subsets(model, N: int) -> np.ndarray:
    """rho_A for every subset bitmask of [N] as a 2^N vector.

    Exchangeable laws reduce to a popcount lookup; MarkovEntries uses a
    doubling pass that appends one chain position per round, O(N 2^N).
    """
    if is_limit(model):
        raise DomainError("limit-regime models define only b_A, not rho")
    if is_exchangeable(model):
        by_size = np.array([rho_k(model, k, N) for k in range(N + 1)])
        return by_size[popcounts(N)]
    T = np.array(model.transition)
    states = np.array([model.initial])  # row A -> mass vector over {0,1}
    states = np.vstack([states, states * (1.0, -1.0)])
    for _ in range(1, N):
        stepped = states @ T
        states = np.vstack([stepped, stepped * (1.0, -1.0)])
    return states.sum(axis=1)


def b_subset(model, subset: int, N: int | None, alpha: float | None) -> float:
    """Killed-walk gap b_A; limit-regime models ignore alpha."""
    size = int(subset).bit_count()
    match model:
        case LimitLinear(gamma=gamma):
            return 2.0 * size / gamma
        case LimitPoissonDirichlet(kappa=kappa):
            return _poisson_dirichlet_b(kappa, size)
        case _:
            if alpha is None or not 0.0 < alpha < 1.0:
                raise DomainError(f"alpha must be in (0,1), got {alpha}")
            if N is None:
                if depends_on_dimension(model):
                    raise DomainError(
                        f"{type(model).__name__} needs the dimension N for b_A")
                N = max(int(subset).bit_length(), 1)
            c = alpha / (1.0 - alpha)
            return c * (1.0 - rho_subset(model, subset, N))


def b_k(model, k: int, N: int | None, alpha: float | None) -> float:
    """Exchangeable-size version of b_subset."""
    match model:
        case LimitLinear(gamma=gamma):
            return 2.0 * k / gamma
        case LimitPoissonDirichlet(kappa=kappa):
            return _poisson_dirichlet_b(kappa, k)
        case _:
            if alpha is None or not 0.0 < alpha < 1.0:
                raise DomainError(f"alpha must be in (0,1), got {alpha}")
            return alpha / (1.0 - alpha) * (1.0 - rho_k(model, k, N))


def _poisson_dirichlet_b(kappa: float, size: int) -> float:
    # alternating sum kappa * sum_j (-1)^(j+1) 2^j/j * size_[j] / kappa_(j)
    total = 0.0
    falling, rising = 1.0, 1.0
    for j in range(1, size + 1):
        falling *= size - j + 1
        rising *= kappa + j - 1
        total += (-1.0) ** (j + 1) * 2.0 ** j / j * falling / rising
    return kappa * total


def sample_omega(model, rng: np.random.Generator) -> float:
    """One draw of the mixing probability omega for a de Finetti-type law."""
    match model:
        case IIDBernoulli(p=p):
            return p
        case DeFinettiDiscrete(atoms=atoms, weights=weights):
            return float(rng.choice(atoms, p=weights))
        case DeFinettiBeta(a=a, b=b):
            return float(rng.beta(a, b))
        case SymmetricBetaSpin(a=a, b=b):
            xi = rng.beta(a, b) * (1.0 if rng.random() < 0.5 else -1.0)
            return float((1.0 - xi) / 2.0)
    raise DomainError(f"{type(model).__name__} has no mixing measure")


def sample_spin_xi(model, rng: np.random.Generator) -> float:
    """One draw of the spin xi = 1 - 2*omega in [-1, 1]."""
    return 1.0 - 2.0 * sample_omega(model, rng)


def sample_Z(model, N: int, rng: np.random.Generator) -> int:
    """One increment draw as an N-bit mask."""
    if N < 1:
        raise DomainError(f"dimension must be >= 1, got {N}")
    match model:
        case SingleFlip():
            return 1 << int(rng.integers(N))
        case MFlip(m=m):
            if m > N:
                raise DomainError(f"flip count {m} exceeds dimension {N}")
            mask = 0
            for pos in rng.choice(N, size=m, replace=False):
                mask |= 1 << int(pos)
            return mask
        case RandomSiteHalf():
            return int(rng.integers(2)) << int(rng.integers(N))
        case MarkovEntries(initial=init, transition=rows):
            state = int(rng.random() < init[1])
            mask = state
            for pos in range(1, N):
                state = int(rng.random() < rows[state][1])
                mask |= state << pos
            return mask
        case _ if is_definetti(model):
            omega = sample_omega(model, rng)
            mask = 0
            for pos in np.flatnonzero(rng.random(N) < omega):
                mask |= 1 << int(pos)
            return mask
    raise DomainError(f"{type(model).__name__} is not samplable")


def increment_pmf(model, N: int) -> np.ndarray:
    """Probability of every increment value z in {0,1}^N as a 2^N vector.

    Enumerates the law directly from the model definition, independently of
    the spectral coefficients; this is the oracle side of dual-route checks.
    """
    if N < 1:
        raise DomainError(f"dimension must be >= 1, got {N}")
    if is_limit(model):
        raise DomainError("limit-regime models have no increment law")
    pc = popcounts(N)
    match model:
        case IIDBernoulli(p=p):
            return p ** pc * (1.0 - p) ** (N - pc)
        case DeFinettiDiscrete(atoms=atoms, weights=weights):
            out = np.zeros(1 << N)
            for a, w in zip(atoms, weights):
                out += w * a ** pc * (1.0 - a) ** (N - pc)
            return out
        case DeFinettiBeta(a=a, b=b):
            from scipy.special import betaln
            return np.exp(betaln(a + pc, b + N - pc) - betaln(a, b))
        case SymmetricBetaSpin(a=a, b=b):
            nodes, weights = roots_jacobi(N // 2 + 1, b - 1.0, a - 1.0)
            weights = weights / weights.sum()
            # xi = +r and -r branches, each with probability 1/2
            out = np.zeros(1 << N)
            for x, w in zip(nodes, weights):
                r = (1.0 + x) / 2.0  # Jacobi node on [-1,1] -> magnitude on [0,1]
                lo, hi = (1.0 - r) / 2.0, (1.0 + r) / 2.0
                out += 0.5 * w * (lo ** pc * hi ** (N - pc) + hi ** pc * lo ** (N - pc))
            return out
        case SingleFlip():
            out = np.zeros(1 << N)
            out[1 << np.arange(N)] = 1.0 / N
            return out
        case MFlip(m=m):
            if m > N:
                raise DomainError(f"flip count {m} exceeds dimension {N}")
            out = np.zeros(1 << N)
            out[pc == m] = 1.0 / comb(N, m)
            return out
        case RandomSiteHalf():
            out = np.zeros(1 << N)
            out[0] = 0.5
            out[1 << np.arange(N)] = 0.5 / N
            return out
        case MarkovEntries(initial=init, transition=rows):
            return _markov_pmf(init, np.array(rows), N)
    raise DomainError(f"unknown model {model!r}")


def _markov_pmf(init, T, N):
    # pmf over prefixes, doubling one position per round; bit p-1 = position p
    out = np.array(init)  # index = prefix mask of length 1
    last = np.array([0, 1])  # last bit per prefix
    for _ in range(1, N):
        stay = out * T[last, 0]
        move = out * T[last, 1]
        out = np.concatenate([stay, move])
        last = np.concatenate([np.zeros_like(last), np.ones_like(last)])
    return out


_MODEL_NAMES = {
    "iid-bernoulli": IIDBernoulli,
    "definetti-discrete": DeFinettiDiscrete,
    "definetti-beta": DeFinettiBeta,
    "single-flip": SingleFlip,
    "mflip": MFlip,
    "random-site-half": RandomSiteHalf,
    "markov-entries": MarkovEntries,
    "symmetric-beta-spin": SymmetricBetaSpin,
    "limit-linear": LimitLinear,
    "limit-poisson-dirichlet": LimitPoissonDirichlet,
}


def model_from_dict(spec: dict) -> IncrementModel:
    """Build a model from a JSON-style dict, e.g. {"model": "mflip", "M": 2}."""
    if "model" not in spec:
        raise DomainError("model spec needs a 'model' key")
    name = str(spec["model"]).lower().replace("_", "-")
    cls = _MODEL_NAMES.get(name)
    if cls is None:
        raise DomainError(f"unknown model name {spec['model']!r}; known: {sorted(_MODEL_NAMES)}")
    args = {k: v for k, v in spec.items() if k != "model"}
    lowered = {k.lower(): v for k, v in args.items()}
    try:
        match cls.__name__:
            case "IIDBernoulli":
                return IIDBernoulli(p=float(lowered["p"]))
            case "DeFinettiDiscrete":
                return DeFinettiDiscrete(atoms=tuple(lowered["atoms"]),
                                         weights=tuple(lowered["weights"]))
            case "DeFinettiBeta":
                return DeFinettiBeta(a=float(lowered["a"]), b=float(lowered["b"]))
            case "SingleFlip":
                return SingleFlip()
            case "MFlip":
                return MFlip(m=int(lowered["m"]))
            case "RandomSiteHalf":
                return RandomSiteHalf()
            case "MarkovEntries":
                return MarkovEntries(initial=tuple(lowered["initial"]),
                                     transition=tuple(tuple(r) for r in lowered["transition"]))
            case "SymmetricBetaSpin":
                return SymmetricBetaSpin(a=float(lowered["a"]), b=float(lowered["b"]))
            case "LimitLinear":
                return LimitLinear(gamma=float(lowered["gamma"]))
            case "LimitPoissonDirichlet":
                return LimitPoissonDirichlet(kappa=float(lowered["kappa"]))
    except KeyError as missing:
        raise DomainError(f"model {name!r} is missing parameter {missing}") from None
    raise AssertionError


def model_to_dict(model) -> dict:
    """Inverse of model_from_dict, for reports and reproducibility."""
    for name, cls in _MODEL_NAMES.items():
        if isinstance(model, cls):
            out = {"model": name}
            match model:
                case IIDBernoulli(p=p):
                    out["p"] = p
                case DeFinettiDiscrete(atoms=atoms, weights=weights):
                    out["atoms"] = list(atoms)
                    out["weights"] = list(weights)
                case DeFinettiBeta(a=a, b=b) | SymmetricBetaSpin(a=a, b=b):
                    out["a"] = a
                    out["b"] = b
                case MFlip(m=m):
                    out["M"] = m
                case MarkovEntries(initial=init, transition=rows):
                    out["initial"] = list(init)
                    out["transition"] = [list(r) for r in rows]
                case LimitLinear(gamma=gamma):
                    out["gamma"] = gamma
                case LimitPoissonDirichlet(kappa=kappa):
                    out["kappa"] = kappa
            return out
    raise DomainError(f"unknown model {model!r}")
