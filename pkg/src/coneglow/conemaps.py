"""Order-preserving homogeneous maps on the open positive cone.

Map descriptions are immutable trees built from weighted power means,
Schoen's four-species interaction map, the three-branch triangle map, a
nonnegative matrix, and closure operations (compose, sum, positive
scale).  Every node evaluates on batches: ``_eval_batch`` maps an
``(m, n)`` array of cone points to an ``(m, n)`` array.

The weighted mean with exponent ``r`` is ``(sum_i sigma_i x_i**r)**(1/r)``
for finite nonzero r, the weighted geometric mean at r = 0, and the
max/min over the support of sigma at r = +-inf.  All of these are
order-preserving and homogeneous of degree one, which is what every
result used here requires.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import logsumexp

from .errors import DomainError, NonterminationError
from .spaces import as_cone_point, hilbert_metric, to_slice

SIGMA_TOL = 1e-12
JSON_SIGMA_TOL = 1e-9


def _as_batch(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise DomainError("expected a vector or a batch of vectors")
    if not np.all(np.isfinite(arr)):
        raise DomainError("cone points must be finite")
    if np.any(arr <= 0.0):
        raise DomainError("cone points must have strictly positive entries")
    return arr, single


@dataclass(frozen=True, eq=False)
class MeanTerm:
    """One ``coeff * M_{r,sigma}`` term of a coordinate function."""

    r: float
    sigma: np.ndarray
    coeff: float

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 1 or sigma.size == 0:
            raise DomainError("sigma must be a nonempty weight vector")
        if np.any(sigma < 0.0) or not np.all(np.isfinite(sigma)):
            raise DomainError("sigma weights must be finite and nonnegative")
        if abs(float(np.sum(sigma)) - 1.0) > SIGMA_TOL:
            raise DomainError("sigma weights must sum to 1")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "coeff", float(self.coeff))
        if not self.coeff > 0.0:
            raise DomainError("mean coefficients must be strictly positive")
        if math.isnan(self.r):
            raise DomainError("mean exponent must not be NaN")

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        supp = self.sigma > 0.0
        sub = X[:, supp]
        if self.r == math.inf:
            vals = np.max(sub, axis=1)
        elif self.r == -math.inf:
            vals = np.min(sub, axis=1)
        else:
            logs = np.log(sub)
            weights = self.sigma[supp]
            if self.r == 0.0:
                vals = np.exp(logs @ weights)
            else:
                vals = np.exp(logsumexp(self.r * logs, axis=1, b=weights) / self.r)
        return self.coeff * vals


class MapSpec:
    """Base class for map-description tree nodes."""

    dim: int

    def _eval_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class MatrixMap(MapSpec):
    matrix: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise DomainError("matrix must be square and nonempty")
        if np.any(A < 0.0) or not np.all(np.isfinite(A)):
            raise DomainError("matrix entries must be finite and nonnegative")
        if np.any(np.all(A == 0.0, axis=1)):
            raise DomainError("matrix must have no zero row")
        object.__setattr__(self, "matrix", A)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _eval_batch(self, X):
        return X @ self.matrix.T


@dataclass(frozen=True, eq=False)
class MeanSumMap(MapSpec):
    """Coordinate functions that are positive sums of weighted means."""

    terms: tuple[tuple[MeanTerm, ...], ...]

    def __post_init__(self):
        terms = tuple(tuple(row) for row in self.terms)
        if not terms:
            raise DomainError("at least one coordinate is required")
        n = len(terms)
        for row in terms:
            if not row:
                raise DomainError("each coordinate needs at least one term")
            for term in row:
                if not isinstance(term, MeanTerm):
                    raise DomainError("coordinate terms must be MeanTerm")
                if term.sigma.size != n:
                    raise DomainError("sigma length must equal the dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return len(self.terms)

    def _eval_batch(self, X):
        out = np.empty_like(X)
        for i, row in enumerate(self.terms):
            acc = row[0].evaluate(X)
            for term in row[1:]:
                acc = acc + term.evaluate(X)
            out[:, i] = acc
        return out


def _harmonic_pair(s, t):
    # theta(s, t) = (1/s + 1/t)**-1, written to survive entries near e**700
    return 1.0 / (1.0 / s + 1.0 / t)


@dataclass(frozen=True, eq=False)
class SchoenMap(MapSpec):
    """Four-species interaction map with harmonic pair couplings.

    ``coefficients`` has rows ``(a_i, b_i, c_i, d_i)``.  Coordinates 1-2
    couple through theta(x1, x2) and coordinates 3-4 through
    theta(x3, x4); all four share theta(x1, x4) and theta(x2, x3):

        f_i(x) = a_i x_i + b_i theta(pair_i) + c_i theta(x1, x4)
                 + d_i theta(x2, x3)
    """

    coefficients: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.coefficients, dtype=float)
        if C.shape != (4, 4) or not np.all(np.isfinite(C)):
            raise DomainError("coefficients must be a finite 4x4 array")
        if np.any(C[:, 0] <= 0.0):
            raise DomainError("diagonal coefficients a_i must be positive")
        if np.any(C[:, 1:] < 0.0):
            raise DomainError("coupling coefficients must be nonnegative")
        if np.any(np.all(C[:, 1:] == 0.0, axis=1)):
            raise DomainError("each row needs a positive coupling coefficient")
        object.__setattr__(self, "coefficients", C)

    @property
    def dim(self) -> int:
        return 4

    def _eval_batch(self, X):
        t12 = _harmonic_pair(X[:, 0], X[:, 1])
        t34 = _harmonic_pair(X[:, 2], X[:, 3])
        t14 = _harmonic_pair(X[:, 0], X[:, 3])
        t23 = _harmonic_pair(X[:, 1], X[:, 2])
        pair = np.stack([t12, t12, t34, t34], axis=1)
        C = self.coefficients
        return (X * C[:, 0] + pair * C[:, 1]
                + t14[:, None] * C[:, 2] + t23[:, None] * C[:, 3])


@dataclass(frozen=True, eq=False)
class TriangleMap(MapSpec):
    """Three-branch map on the positive octant with parameter c in [0, 1/3].

    The branch is selected by the maximal coordinate; at ties all
    applicable branches agree, so taking the first maximal index is safe.
    Its normalized fixed-point set is a union of three segments meeting
    at the barycenter, collapsing to the barycenter at c = 1/3 and
    becoming unbounded at c = 0.
    """

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        if not (0.0 <= self.c <= 1.0 / 3.0):
            raise DomainError("triangle parameter must lie in [0, 1/3]")

    @property
    def dim(self) -> int:
        return 3

    def _eval_batch(self, X):
        cs = self.c * np.sum(X, axis=1)
        mu = np.stack(
            [
                np.maximum(np.maximum(X[:, 1], X[:, 2]), cs),
                np.maximum(np.maximum(X[:, 0], X[:, 2]), cs),
                np.maximum(np.maximum(X[:, 0], X[:, 1]), cs),
            ],
            axis=1,
        )
        branch = np.argmax(X, axis=1)
        rows = np.arange(X.shape[0])
        out = mu[rows, branch][:, None].repeat(3, axis=1)
        out[rows, branch] = X[rows, branch]
        return out


@dataclass(frozen=True, eq=False)
class ComposeMap(MapSpec):
    """Composition of equal-dimension maps; the last child applies first."""

    children: tuple[MapSpec, ...]

    def __post_init__(self):
        children = tuple(self.children)
        if not children:
            raise DomainError("compose needs at least one child")
        dims = {child.dim for child in children}
        if len(dims) != 1:
            raise DomainError("composed maps must share one dimension")
        object.__setattr__(self, "children", children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def _eval_batch(self, X):
        for child in reversed(self.children):
            X = child._eval_batch(X)
        return X


@dataclass(frozen=True, eq=False)
class SumMap(MapSpec):
    children: tuple[MapSpec, ...]

    def __post_init__(self):
        children = tuple(self.children)
        if not children:
            raise DomainError("sum needs at least one child")
        dims = {child.dim for child in children}
        if len(dims) != 1:
            raise DomainError("summed maps must share one dimension")
        object.__setattr__(self, "children", children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def _eval_batch(self, X):
        acc = self.children[0]._eval_batch(X)
        for child in self.children[1:]:
            acc = acc + child._eval_batch(X)
        return acc


@dataclass(frozen=True, eq=False)
class ScaleMap(MapSpec):
    alpha: float
    child: MapSpec

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise DomainError("scale factor must be positive and finite")

    @property
    def dim(self) -> int:
        return self.child.dim

    def _eval_batch(self, X):
        return self.alpha * self.child._eval_batch(X)


def eval_map(spec: MapSpec, x) -> np.ndarray:
    """Evaluate ``spec`` at a cone point or an ``(m, n)`` batch of them."""
    X, single = _as_batch(x)
    if X.shape[1] != spec.dim:
        raise DomainError(f"map expects dimension {spec.dim}, got {X.shape[1]}")
    with np.errstate(over="ignore", invalid="ignore"):
        Y = spec._eval_batch(X)
    if not np.all(np.isfinite(Y)):
        raise OverflowError(
            "map evaluation overflowed the floating range; reduce the "
            "sampling box radius or rescale the input"
        )
    return Y[0] if single else Y


def normalized_map(spec: MapSpec, x) -> np.ndarray:
    """The self-map of Sigma0: evaluate and rescale to last entry 1."""
    X, single = _as_batch(x)
    if np.any(X[:, -1] != 1.0):
        raise DomainError("normalized map expects points on Sigma0")
    Y = eval_map(spec, X)
    Y = Y / Y[:, -1][:, None]
    return Y[0] if single else Y


def conjugate_map(spec: MapSpec, y) -> np.ndarray:
    """Log-coordinate conjugate of the normalized map, a self-map of V0."""
    arr = np.asarray(y, dtype=float)
    single = arr.ndim == 1
    Y = arr[None, :] if single else arr
    if np.any(Y[:, -1] != 0.0):
        raise DomainError("conjugate map expects points in V0")
    with np.errstate(over="ignore"):
        X = np.exp(Y)
    if not np.all(np.isfinite(X)):
        raise OverflowError("exp overflowed; reduce the coordinate box")
    X[:, -1] = 1.0
    out = np.log(normalized_map(spec, X))
    out[:, -1] = 0.0
    return out[0] if single else out


@dataclass(frozen=True)
class EigenResult:
    """Power-iteration outcome on the normalized slice.

    ``eigenvalue`` is read off the normalization coordinate at the final
    iterate; ``cw_range`` is the min/max coordinate ratio there
    (diagnostic bracket of the eigenvalue).
    """

    vector: np.ndarray
    eigenvalue: float
    iterations: int
    converged: bool
    final_step: float
    cw_range: tuple[float, float]


def power_iteration(spec: MapSpec, x0, tol: float = 1e-12,
                    max_iter: int = 10 ** 5) -> EigenResult:
    """Iterate the normalized map until the Hilbert-metric step is < tol.

    Exhausting the budget is reported honestly via ``converged=False``,
    not raised: an unbounded or empty eigenspace makes the iteration
    wander forever.
    """
    if not tol > 0.0:
        raise DomainError("tolerance must be positive")
    x = to_slice(as_cone_point(x0))
    if x.size != spec.dim:
        raise DomainError("start point dimension mismatch")
    step = math.inf
    iterations = 0
    while iterations < max_iter:
        nxt = normalized_map(spec, x)
        step = hilbert_metric(nxt, x)
        x = nxt
        iterations += 1
        if step < tol:
            break
    fx = eval_map(spec, x)
    ratios = fx / x
    return EigenResult(
        vector=x,
        eigenvalue=float(fx[-1]),
        iterations=iterations,
        converged=step < tol,
        final_step=float(step),
        cw_range=(float(np.min(ratios)), float(np.max(ratios))),
    )


class LinearOracleResult(NamedTuple):
    exists: bool
    unique: bool


def linear_oracle(A) -> LinearOracleResult:
    """Exact existence/uniqueness test for positive eigenvectors of a
    nonnegative matrix.

    Decomposes the adjacency digraph into communicating classes, computes
    each class's spectral radius, and applies the classical
    characterization: a positive eigenvector exists iff the final classes
    (no outgoing access) are exactly the basic classes (radius equal to
    the overall spectral radius), and it is unique up to scaling iff
    there is exactly one basic final class.
    """
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DomainError("matrix must be square and nonempty")
    if np.any(M < 0.0) or not np.all(np.isfinite(M)):
        raise DomainError("matrix entries must be finite and nonnegative")
    n = M.shape[0]
    ncomp, labels = connected_components(
        csr_matrix(M > 0.0), directed=True, connection="strong"
    )
    radii = np.empty(ncomp)
    for comp in range(ncomp):
        idx = np.nonzero(labels == comp)[0]
        radii[comp] = _class_spectral_radius(M[np.ix_(idx, idx)])
    rho = float(np.max(radii))
    basic = {c for c in range(ncomp) if abs(radii[c] - rho) <= 1e-8 * rho}
    final = set(range(ncomp))
    for i in range(n):
        for j in range(n):
            if M[i, j] > 0.0 and labels[i] != labels[j]:
                final.discard(labels[i])
    exists = final == basic
    unique = exists and len(basic) == 1
    return LinearOracleResult(exists, unique)


def _class_spectral_radius(sub: np.ndarray, tol: float = 1e-10,
                           max_iter: int = 10 ** 5) -> float:
    """Spectral radius of an irreducible block via shifted power iteration.

    Adding the identity makes the block primitive, so the coordinate
    ratios bracket the shifted radius and contract onto it.
    """
    k = sub.shape[0]
    if k == 1:
        return float(sub[0, 0])
    B = sub + np.eye(k)
    v = np.ones(k)
    for _ in range(max_iter):
        w = B @ v
        ratios = w / v
        lo, hi = float(np.min(ratios)), float(np.max(ratios))
        v = w / np.sum(w)
        if hi - lo <= tol * max(1.0, hi):
            return 0.5 * (lo + hi) - 1.0
    raise NonterminationError("class spectral radius did not converge")


def is_order_preserving_homogeneous_probe(spec: MapSpec, trials: int = 64,
                                          seed: int = 0) -> bool:
    """Randomized check of order preservation and degree-1 homogeneity.

    Samples comparable pairs x <= y and positive scalings; returns False
    on any violation beyond 1e-9 relative.  A passing probe is evidence,
    not proof.
    """
    if trials < 1:
        raise DomainError("at least one trial is required")
    rng = np.random.default_rng(seed)
    n = spec.dim
    rel = 1e-9
    for _ in range(trials):
        x = np.exp(rng.uniform(-3.0, 3.0, size=n))
        y = x + rng.uniform(0.0, 2.0, size=n)
        fx = eval_map(spec, x)
        fy = eval_map(spec, y)
        scale = np.maximum(1.0, np.abs(fx))
        if np.any(fy < fx - rel * scale):
            return False
        alpha = float(np.exp(rng.uniform(math.log(1e-3), math.log(1e3))))
        fax = eval_map(spec, alpha * x)
        if np.max(np.abs(fax - alpha * fx)) > rel * alpha * float(np.max(np.abs(fx))):
            return False
    return True


# ---------------------------------------------------------------------------
# JSON wire format


def _mean_term_to_dict(term: MeanTerm) -> dict:
    if term.r == math.inf:
        r = "inf"
    elif term.r == -math.inf:
        r = "-inf"
    else:
        r = term.r
    return {"r": r, "sigma": term.sigma.tolist(), "coeff": term.coeff}


def _mean_term_from_dict(obj: dict) -> MeanTerm:
    r = obj["r"]
    if isinstance(r, str):
        text = r.strip().lower()
        if text in ("inf", "+inf"):
            r = math.inf
        elif text == "-inf":
            r = -math.inf
        else:
            raise DomainError(f"unrecognized mean exponent {r!r}")
    sigma = np.asarray(obj["sigma"], dtype=float)
    total = float(np.sum(sigma))
    if abs(total - 1.0) > JSON_SIGMA_TOL:
        raise DomainError("sigma weights must sum to 1 within 1e-9")
    return MeanTerm(r=float(r), sigma=sigma / total, coeff=float(obj["coeff"]))


def map_spec_to_dict(spec: MapSpec) -> dict:
    if isinstance(spec, MatrixMap):
        return {"kind": "matrix", "matrix": spec.matrix.tolist()}
    if isinstance(spec, SchoenMap):
        return {"kind": "schoen", "coefficients": spec.coefficients.tolist()}
    if isinstance(spec, TriangleMap):
        return {"kind": "triangle", "c": spec.c}
    if isinstance(spec, MeanSumMap):
        return {
            "kind": "meansum",
            "coordinates": [
                [_mean_term_to_dict(t) for t in row] for row in spec.terms
            ],
        }
    if isinstance(spec, ComposeMap):
        return {"kind": "compose",
                "children": [map_spec_to_dict(c) for c in spec.children]}
    if isinstance(spec, SumMap):
        return {"kind": "sum",
                "children": [map_spec_to_dict(c) for c in spec.children]}
    if isinstance(spec, ScaleMap):
        return {"kind": "scale", "alpha": spec.alpha,
                "child": map_spec_to_dict(spec.child)}
    raise DomainError(f"unknown map spec node {type(spec).__name__}")


def map_spec_from_dict(obj) -> MapSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError("map spec nodes must be objects with a 'kind' tag")
    kind = obj["kind"]
    try:
        if kind == "matrix":
            return MatrixMap(np.asarray(obj["matrix"], dtype=float))
        if kind == "schoen":
            return SchoenMap(np.asarray(obj["coefficients"], dtype=float))
        if kind == "triangle":
            return TriangleMap(float(obj["c"]))
        if kind == "meansum":
            rows = tuple(
                tuple(_mean_term_from_dict(t) for t in row)
                for row in obj["coordinates"]
            )
            return MeanSumMap(rows)
        if kind == "compose":
            return ComposeMap(tuple(map_spec_from_dict(c) for c in obj["children"]))
        if kind == "sum":
            return SumMap(tuple(map_spec_from_dict(c) for c in obj["children"]))
        if kind == "scale":
            return ScaleMap(float(obj["alpha"]), map_spec_from_dict(obj["child"]))
    except KeyError as exc:
        raise DomainError(f"map spec node {kind!r} is missing field {exc}") from exc
    raise DomainError(f"unrecognized map kind {kind!r}")


def map_spec_to_json(spec: MapSpec) -> str:
    return json.dumps(map_spec_to_dict(spec), indent=2)


def map_spec_from_json(text: str) -> MapSpec:
    return map_spec_from_dict(json.loads(text))


def demo_schoen_composition() -> ComposeMap:
    """The bundled composition of two Schoen maps used in the docs and
    the acceptance suite; its unique normalized eigenvector is known."""
    first = SchoenMap(np.array([
        [1.0, 2.0, 3.0, 4.0],
        [2.0, 1.0, 1.0, 1.0],
        [3.0, 1.0, 3.0, 5.0],
        [4.0, 3.0, 1.0, 2.0],
    ]))
    second = SchoenMap(np.array([
        [2.0, 5.0, 7.0, 2.0],
        [3.0, 3.0, 1.0, 1.0],
        [4.0, 4.0, 13.0, 1.0],
        [1.0, 2.0, 7.0, 8.0],
    ]))
    return ComposeMap((first, second))
