"""Finitely supported probability measures on 2xn matrices.

A measure is a weighted list of matrix atoms. Weights must be positive and
sum to one; atoms closer than a merge tolerance are combined into a single
atom carrying the weight-averaged matrix, so every measure has a canonical
form. All operations are pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NotSquareError
from .matcore import det2_batch

# Weight-sum validation tolerance.
WEIGHT_TOL = 1e-12

# Entrywise distance below which two atoms are considered identical.
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on 2xn matrices.

    Parameters
    ----------
    weights : (N,) array of positive weights summing to 1.
    matrices : (N, 2, n) array of atom locations.
    normalize : divide weights by their sum instead of validating it.
    merge : combine atoms within ``merge_tol`` of each other (canonical form).
    """

    weights: np.ndarray
    matrices: np.ndarray
    normalize: bool = field(default=False, repr=False, compare=False)
    merge: bool = field(default=True, repr=False, compare=False)
    merge_tol: float = field(default=MERGE_TOL, repr=False, compare=False)

    def __post_init__(self):
        w = np.atleast_1d(np.array(self.weights, dtype=float))
        m = np.array(self.matrices, dtype=float)
        if m.ndim == 2:
            m = m[None]
        if m.ndim != 3 or m.shape[0] != w.shape[0] or m.shape[1] != 2 or m.shape[2] < 2:
            raise ValueError(f"atoms must have shape (N, 2, n >= 2), got {m.shape}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(m))):
            raise ValueError("weights and atoms must be finite")
        if np.any(w <= 0):
            raise ValueError("all weights must be > 0")
        total = w.sum()
        if self.normalize:
            w = w / total
        elif abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1 within {WEIGHT_TOL}")
        if self.merge:
            w, m = _merge_atoms(w, m, self.merge_tol)
        w.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "matrices", m)

    @property
    def n(self) -> int:
        return self.matrices.shape[2]

    def __len__(self) -> int:
        return self.weights.shape[0]

    def atoms(self):
        """Iterate over (weight, matrix) pairs."""
        return zip(self.weights, self.matrices)

    def barycenter(self) -> np.ndarray:
        return barycenter(self)

    @classmethod
    def dirac(cls, X) -> "DiscreteMeasure":
        return cls(np.array([1.0]), np.asarray(X, dtype=float)[None])

    @classmethod
    def from_atoms(cls, pairs, **kwargs) -> "DiscreteMeasure":
        """Build from an iterable of (weight, matrix) pairs."""
        pairs = list(pairs)
        w = np.array([p[0] for p in pairs], dtype=float)
        m = np.array([np.asarray(p[1], dtype=float) for p in pairs])
        return cls(w, m, **kwargs)


def _merge_atoms(w: np.ndarray, m: np.ndarray, tol: float):
    """Greedy merge of atoms within entrywise distance tol.

    The merged atom carries the weight-averaged matrix of its group, so the
    barycenter is preserved exactly.
    """
    out_w: list[float] = []
    out_m: list[np.ndarray] = []
    for wi, mi in zip(w, m):
        for idx, mo in enumerate(out_m):
            if np.abs(mi - mo).max() <= tol:
                tw = out_w[idx] + wi
                out_m[idx] = (out_w[idx] * mo + wi * mi) / tw
                out_w[idx] = tw
                break
        else:
            out_w.append(float(wi))
            out_m.append(mi.copy())
    return np.array(out_w), np.array(out_m)


def barycenter(mu: DiscreteMeasure) -> np.ndarray:
    """First moment sum_i w_i X_i."""
    return np.einsum("i,ijk->jk", mu.weights, mu.matrices)


def pushforward(mu: DiscreteMeasure, f, **kwargs) -> DiscreteMeasure:
    """Image measure under an atom-wise map, in canonical merged form.

    ``f`` receives one (2, n) matrix and returns one matrix; weights are
    carried over unchanged and coincident images merge.
    """
    images = np.array([np.asarray(f(X), dtype=float) for X in mu.matrices])
    return DiscreteMeasure(mu.weights.copy(), images, **kwargs)


def polyconvexity_defect(mu: DiscreteMeasure) -> float:
    """int det dmu - det(barycenter); zero iff the measure is polyconvex."""
    if mu.n != 2:
        raise NotSquareError("polyconvexity defect requires 2x2 atoms")
    mean_det = float(mu.weights @ det2_batch(mu.matrices))
    b = barycenter(mu)
    return mean_det - float(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0])


def jensen_defect(f, mu: DiscreteMeasure) -> float:
    """int f dmu - f(barycenter).

    Nonnegative for convex f on any measure and for rank-one convex f on
    laminates. ``f`` may be a TestFunction or any callable on matrices.
    """
    if hasattr(f, "eval_batch"):
        vals = np.asarray(f.eval_batch(mu.matrices), dtype=float)
    else:
        vals = np.array([float(f(X)) for X in mu.matrices])
    mean_f = float(mu.weights @ vals)
    return mean_f - float(f(barycenter(mu)))


def _moment_table(mu: DiscreteMeasure, degree: int) -> np.ndarray:
    """All mixed entry-moments of degree 1..degree, in a fixed order."""
    flat = mu.matrices.reshape(len(mu), -1)  # (N, 2n)
    cols = flat.shape[1]
    vals = []
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(range(cols), d):
            prod = np.ones(len(mu))
            for c in combo:
                prod = prod * flat[:, c]
            vals.append(float(mu.weights @ prod))
    return np.array(vals)


def moment_distance(mu: DiscreteMeasure, nu: DiscreteMeasure, degree: int) -> float:
    """Max absolute difference of mixed entry-moments up to the given degree.

    A desk-scale proxy for weak-* distance between measures sharing a
    common compact support set. Degree must be 1, 2 or 3.
    """
    if mu.n != nu.n:
        raise ValueError("measures must share the same column count n")
    if degree not in (1, 2, 3):
        raise ValueError("degree must be in {1, 2, 3}")
    return float(np.abs(_moment_table(mu, degree) - _moment_table(nu, degree)).max())


def measures_allclose(mu: DiscreteMeasure, nu: DiscreteMeasure,
                      weight_tol: float = 1e-10, matrix_tol: float = 1e-10) -> bool:
    """Atom-wise equality up to greedy matching within the given tolerances."""
    if mu.n != nu.n or len(mu) != len(nu):
        return False
    unused = list(range(len(nu)))
    for wi, mi in mu.atoms():
        for pos, j in enumerate(unused):
            if (abs(wi - nu.weights[j]) <= weight_tol
                    and np.abs(mi - nu.matrices[j]).max() <= matrix_tol):
                unused.pop(pos)
                break
        else:
            return False
    return True
