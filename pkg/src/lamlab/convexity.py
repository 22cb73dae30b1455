"""Test functions with declared convexity classes and numerical defect tests.

The defect tests are one-sided: a negative defect falsifies the convexity
property, a nonnegative one is evidence only. All built-in functions come
with vectorized evaluation over a leading batch axis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .matcore import det2_batch

# lambda grid for the rank-one segment test; the midpoint alone suffices for
# twice-differentiable f, the grid guards against boundary effects.
LAMBDA_GRID = np.arange(1, 10) / 10.0


class ConvexityClass(enum.Enum):
    LINEAR = "linear"
    CONVEX = "convex"
    POLYCONVEX = "polyconvex"
    RANK_ONE_CONVEX = "rank_one_convex"
    QUASIAFFINE = "quasiaffine"
    NONE = "none"


#: classes whose members are rank-one convex
RANK_ONE_CONVEX_CLASSES = frozenset({
    ConvexityClass.LINEAR,
    ConvexityClass.CONVEX,
    ConvexityClass.POLYCONVEX,
    ConvexityClass.RANK_ONE_CONVEX,
    ConvexityClass.QUASIAFFINE,
})


class FunctionDomain(enum.Enum):
    FULL = "full"          # all 2xn matrices
    PLUS = "plus"          # 2x2 matrices with entry (1,2) above the guard


@dataclass(frozen=True)
class TestFunction:
    """Evaluatable real function on 2xn matrices with a declared class.

    ``batch`` maps an (..., 2, n) array to an (...,) array of values. The
    declared class is a claim used by tests and reports; the library never
    trusts it beyond one-sided checks.
    """

    name: str
    n: int
    convexity_class: ConvexityClass
    batch: callable
    domain: FunctionDomain = FunctionDomain.FULL

    def __call__(self, X) -> float:
        X = np.asarray(X, dtype=float)
        return float(self.batch(X[None])[0])

    def eval_batch(self, Xs) -> np.ndarray:
        return np.asarray(self.batch(np.asarray(Xs, dtype=float)), dtype=float)

    @property
    def is_rank_one_convex_class(self) -> bool:
        return self.convexity_class in RANK_ONE_CONVEX_CLASSES


def make_linear(C, offset: float = 0.0, name: str = "linear") -> TestFunction:
    """The affine function X -> <C, X> + offset."""
    C = np.asarray(C, dtype=float)
    return TestFunction(
        name=name, n=C.shape[1], convexity_class=ConvexityClass.LINEAR,
        batch=lambda Xs: np.einsum("...jk,jk->...", Xs, C) + offset)


def make_polynomial(terms, n: int, name: str = "poly",
                    convexity_class: ConvexityClass = ConvexityClass.NONE) -> TestFunction:
    """Polynomial sum_t c_t * prod_ij X_ij^p_ij of total degree <= 4.

    ``terms`` is a list of (coeff, powers) with powers a (2, n) integer array.
    """
    coeffs = np.array([t[0] for t in terms], dtype=float)
    powers = np.array([np.asarray(t[1], dtype=int) for t in terms])
    if powers.shape[1:] != (2, n):
        raise ValueError(f"term powers must have shape (2, {n})")
    if powers.sum(axis=(1, 2)).max(initial=0) > 4:
        raise ValueError("polynomial degree must be <= 4")

    def batch(Xs):
        # (..., T): product over entries of X^p for each term
        prods = np.prod(Xs[..., None, :, :] ** powers, axis=(-2, -1))
        return prods @ coeffs

    return TestFunction(name=name, n=n, convexity_class=convexity_class, batch=batch)


def _default_linear_form(n: int) -> np.ndarray:
    # fixed deterministic coefficients, nothing special about them
    return np.arange(1, 2 * n + 1, dtype=float).reshape(2, n) / n


def builtin(name: str, n: int = 2) -> TestFunction:
    """Look up a built-in test function by id.

    Available ids: linear, norm_sq, x11_sq, neg_norm_sq for every n, and
    det, neg_det, det_plus_linear, neg_det_plus_linear for n = 2.
    Raises KeyError on unknown ids.
    """
    if name == "linear":
        return make_linear(_default_linear_form(n), name="linear")
    if name == "norm_sq":
        return TestFunction(
            name="norm_sq", n=n, convexity_class=ConvexityClass.CONVEX,
            batch=lambda Xs: np.sum(Xs * Xs, axis=(-2, -1)))
    if name == "x11_sq":
        return TestFunction(
            name="x11_sq", n=n, convexity_class=ConvexityClass.CONVEX,
            batch=lambda Xs: Xs[..., 0, 0] ** 2)
    if name == "neg_norm_sq":
        return TestFunction(
            name="neg_norm_sq", n=n, convexity_class=ConvexityClass.NONE,
            batch=lambda Xs: -np.sum(Xs * Xs, axis=(-2, -1)))
    if name in ("det", "neg_det", "det_plus_linear", "neg_det_plus_linear"):
        if n != 2:
            raise KeyError(f"builtin {name!r} requires n = 2")
        sign = -1.0 if name.startswith("neg_") else 1.0
        C = _default_linear_form(2) if name.endswith("plus_linear") else np.zeros((2, 2))

        def batch(Xs, sign=sign, C=C):
            return sign * det2_batch(Xs) + np.einsum("...jk,jk->...", Xs, C)

        return TestFunction(name=name, n=2,
                            convexity_class=ConvexityClass.QUASIAFFINE, batch=batch)
    raise KeyError(f"unknown builtin test function {name!r}")


BUILTIN_IDS = ("linear", "norm_sq", "x11_sq", "neg_norm_sq",
               "det", "neg_det", "det_plus_linear", "neg_det_plus_linear")


def builtins_for(n: int, rank_one_convex_only: bool = False):
    """All built-ins available at arity n, optionally only the rank-one convex ones."""
    out = []
    for name in BUILTIN_IDS:
        try:
            f = builtin(name, n)
        except KeyError:
            continue
        if rank_one_convex_only and not f.is_rank_one_convex_class:
            continue
        out.append(f)
    return out


def conjugate_function(f: TestFunction, A, B, name: str | None = None) -> TestFunction:
    """The composition X -> f(A X B)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    return TestFunction(
        name=name or f"{f.name}_conj", n=B.shape[0],
        convexity_class=f.convexity_class, domain=f.domain,
        batch=lambda Xs: f.batch(np.einsum("ij,...jk,kl->...il", A, Xs, B)))


# ---------------------------------------------------------------------------
# rank-one convexity: Monte-Carlo segment test


@dataclass(frozen=True)
class RankOneSearchResult:
    """Worst segment found by the rank-one convexity search."""

    defect: float
    X: np.ndarray | None
    Y: np.ndarray | None
    lam: float | None

    @property
    def falsified(self) -> bool:
        return self.defect < 0


def rank_one_convexity_search(f: TestFunction, samples: int, seed=0,
                              box: float = 1.0) -> RankOneSearchResult:
    """Sample rank-one segments and return the most negative Jensen gap.

    For each sample: X uniform in [-box, box] entries, Y = X + t a (x) b with
    random unit a, b and t up to box, and the gap
    lam f(X) + (1-lam) f(Y) - f(lam X + (1-lam) Y) minimized over the lambda
    grid. A negative result certifies that f is not rank-one convex; a
    nonnegative result is only evidence.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    n = f.n
    worst = RankOneSearchResult(np.inf, None, None, None)
    chunk = 4096
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        done += m
        X = rng.uniform(-box, box, size=(m, 2, n))
        a = rng.normal(size=(m, 2))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b = rng.normal(size=(m, n))
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        t = rng.uniform(0.1, 1.0, size=(m, 1, 1)) * box
        Y = X + t * a[:, :, None] * b[:, None, :]
        fX = f.eval_batch(X)
        fY = f.eval_batch(Y)
        for lam in LAMBDA_GRID:
            gap = lam * fX + (1 - lam) * fY - f.eval_batch(lam * X + (1 - lam) * Y)
            i = int(np.argmin(gap))
            if gap[i] < worst.defect:
                worst = RankOneSearchResult(float(gap[i]), X[i].copy(), Y[i].copy(),
                                            float(lam))
    return worst


def rank_one_convexity_defect(f: TestFunction, samples: int, seed=0,
                              box: float = 1.0) -> float:
    """Most negative rank-one Jensen gap found by sampling (see search)."""
    return rank_one_convexity_search(f, samples, seed, box).defect


# ---------------------------------------------------------------------------
# quasiconvexity: integral test with separable sine displacement fields


@dataclass(frozen=True)
class TestField:
    """Smooth displacement on the unit cube, zero on the boundary.

    phi(x) = sum_r amp_r * c_r * prod_j sin(pi k_rj x_j) with c_r in R^2 and
    integer frequencies k_rj >= 1, so phi vanishes on the boundary exactly
    and the gradient is available analytically. ``grid`` is the midpoint
    quadrature resolution per axis.
    """

    amps: np.ndarray      # (M,)
    coeffs: np.ndarray    # (M, 2)
    freqs: np.ndarray     # (M, n) positive integers
    grid: int = 256

    def __post_init__(self):
        amps = np.atleast_1d(np.asarray(self.amps, dtype=float))
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(len(amps), 2)
        freqs = np.asarray(self.freqs, dtype=int).reshape(len(amps), -1)
        if np.any(freqs < 1):
            raise ValueError("frequencies must be positive integers")
        if self.grid < 2:
            raise ValueError("grid must be >= 2")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "freqs", freqs)

    @property
    def n(self) -> int:
        return self.freqs.shape[1]

    def gradient_grid(self) -> np.ndarray:
        """Analytic gradient at the midpoint grid, shape (grid^n, 2, n)."""
        n = self.n
        xs = (np.arange(self.grid) + 0.5) / self.grid
        axes = np.meshgrid(*([xs] * n), indexing="ij")
        pts = np.stack([a.ravel() for a in axes], axis=-1)  # (P, n)
        G = np.zeros((pts.shape[0], 2, n))
        for amp, c, k in zip(self.amps, self.coeffs, self.freqs):
            sin = np.sin(np.pi * k * pts)       # (P, n)
            cos = np.cos(np.pi * k * pts)
            for j in range(n):
                prof = np.pi * k[j] * cos[:, j]
                for l in range(n):
                    if l != j:
                        prof = prof * sin[:, l]
                G[:, 0, j] += amp * c[0] * prof
                G[:, 1, j] += amp * c[1] * prof
        return G


def random_test_field(rng, n: int = 2, modes: int = 3, grid: int = 256,
                      max_freq: int = 5, amp: float = 0.3,
                      odd_freqs: bool = True) -> TestField:
    """Random sine displacement field.

    Frequencies are odd by default: midpoint quadrature then integrates the
    null-Lagrangian cross terms of the determinant exactly, so quasiaffine
    functions show machine-zero defects at any resolution.
    """
    rng = np.random.default_rng(rng)
    if odd_freqs:
        kmax = max(1, (max_freq + 1) // 2)
        freqs = 2 * rng.integers(0, kmax, size=(modes, n)) + 1
    else:
        freqs = rng.integers(1, max_freq + 1, size=(modes, n))
    coeffs = rng.normal(size=(modes, 2))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    amps = rng.uniform(0.2, 1.0, size=modes) * amp / modes
    return TestField(amps=amps, coeffs=coeffs, freqs=freqs, grid=grid)


def quasiconvexity_defect(f: TestFunction, X0, field: TestField) -> float:
    """Mean of f(X0 + grad phi) over the unit cube minus f(X0).

    Midpoint quadrature at the field's grid resolution. Negative values
    certify failure of the quasiconvexity inequality for this witness.
    Raises DomainError if a quadrature point leaves the function's domain.
    """
    X0 = np.asarray(X0, dtype=float)
    if X0.shape != (2, field.n):
        raise ValueError(f"X0 must have shape (2, {field.n})")
    if f.n != field.n:
        raise ValueError("function arity and field dimension disagree")
    pts = X0[None] + field.gradient_grid()
    if f.domain is FunctionDomain.PLUS:
        from .duality import DELTA_PLUS
        x12 = pts[:, 0, 1]
        if x12.min() < DELTA_PLUS or x12.max() > 1.0 / DELTA_PLUS:
            raise DomainError("quadrature points leave the positive-entry domain")
    vals = f.eval_batch(pts)
    return float(vals.mean()) - f(X0)
