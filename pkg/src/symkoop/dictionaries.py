"""Observable dictionaries and their induced group representations.

A dictionary is an ordered set of scalar observables psi_1..psi_K with a
vector-valued evaluation Psi(x). For a group element gamma acting on state
space, the induced feature-space representation is the K x K matrix R with

    Psi(gamma x) = R Psi(x)   for all x,

which exists exactly when the span of the dictionary is invariant under the
substitution. R is what conjugation transport of a fitted operator needs.

Monomial ordering contract: graded lexicographic, i.e. ascending total
degree, and within a degree the order produced by
``itertools.combinations_with_replacement`` on variable indices
(for dim=2, degree 2: x1^2, x1*x2, x2^2). Representation matrices are only
reproducible relative to this fixed ordering.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DictionaryNotClosedError, InputError

CLOSURE_TOL = 1e-8


class Dictionary:
    """Base class: subclasses set kind, dim, size, labels and implement
    ``evaluate``; ``evaluate_matrix`` maps column-states to column-features."""

    kind = "abstract"

    def evaluate(self, x):
        raise NotImplementedError

    def evaluate_matrix(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != self.dim:
            raise InputError(
                f"expected a {self.dim} x M state matrix, got shape {X.shape}"
            )
        out = np.empty((self.size, X.shape[1]))
        for k in range(X.shape[1]):
            out[:, k] = self.evaluate(X[:, k])
        return out

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InputError(
                f"state shape {x.shape} does not match dictionary dim {self.dim}"
            )
        return x

    def to_spec(self):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} dim={self.dim} size={self.size}>"


class IdentityDictionary(Dictionary):
    """Psi(x) = x; EDMD with this dictionary is plain DMD."""

    kind = "identity"

    def __init__(self, dim):
        if dim < 1:
            raise InputError("dim must be positive")
        self.dim = int(dim)
        self.size = self.dim
        self.labels = tuple(f"x{i + 1}" for i in range(dim))

    def evaluate(self, x):
        return self._check(x).copy()

    def evaluate_matrix(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != self.dim:
            raise InputError(
                f"expected a {self.dim} x M state matrix, got shape {X.shape}"
            )
        return X.copy()

    def to_spec(self):
        return {"kind": "identity", "dim": self.dim}


def _monomial_label(exponents):
    parts = []
    for i, e in enumerate(exponents):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return "*".join(parts) if parts else "1"


class MonomialDictionary(Dictionary):
    """Every monomial of total degree in [0 or 1, max_degree], graded-lex."""

    kind = "monomial"

    def __init__(self, dim, max_degree, include_constant=True):
        if dim < 1 or max_degree < 1:
            raise InputError("dim and max_degree must be positive")
        self.dim = int(dim)
        self.max_degree = int(max_degree)
        self.include_constant = bool(include_constant)
        exponents = []
        for degree in range(0 if include_constant else 1, max_degree + 1):
            for combo in itertools.combinations_with_replacement(
                range(dim), degree
            ):
                e = [0] * dim
                for v in combo:
                    e[v] += 1
                exponents.append(tuple(e))
        self.exponents = tuple(exponents)
        self.size = len(exponents)
        self.labels = tuple(_monomial_label(e) for e in exponents)
        self._index_of = {e: k for k, e in enumerate(exponents)}

    def evaluate(self, x):
        x = self._check(x)
        out = np.ones(self.size)
        for k, exps in enumerate(self.exponents):
            for i, e in enumerate(exps):
                for _ in range(e):
                    out[k] *= x[i]
        return out

    def evaluate_matrix(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != self.dim:
            raise InputError(
                f"expected a {self.dim} x M state matrix, got shape {X.shape}"
            )
        out = np.ones((self.size, X.shape[1]))
        for k, exps in enumerate(self.exponents):
            for i, e in enumerate(exps):
                for _ in range(e):
                    out[k] *= X[i]
        return out

    def to_spec(self):
        return {
            "kind": "monomial",
            "dim": self.dim,
            "max_degree": self.max_degree,
            "include_constant": self.include_constant,
        }


class CustomDictionary(Dictionary):
    """User-supplied scalar observables."""

    kind = "custom"

    def __init__(self, dim, observables, labels=None):
        if not observables:
            raise InputError("need at least one observable")
        self.dim = int(dim)
        self.observables = tuple(observables)
        self.size = len(self.observables)
        self.labels = tuple(labels) if labels else tuple(
            f"psi{k + 1}" for k in range(self.size)
        )
        if len(self.labels) != self.size:
            raise InputError("labels and observables must have equal length")

    def evaluate(self, x):
        x = self._check(x)
        return np.array([float(f(x)) for f in self.observables])

    def to_spec(self):
        # callables are not serializable; the spec records shape only
        return {"kind": "custom", "dim": self.dim, "size": self.size,
                "labels": list(self.labels)}


class TransformedDictionary(Dictionary):
    """A dictionary composed with the inverse action of a group element:
    psi'_k(x) = psi_k(gamma^-1 x). This is the dictionary an operator keeps
    when it is transported by reusing the same matrix on a mapped set."""

    kind = "transformed"

    def __init__(self, base, gamma, element_label):
        gamma = np.asarray(gamma, dtype=float)
        if gamma.shape != (base.dim, base.dim):
            raise InputError("gamma shape does not match base dictionary dim")
        self.base = base
        self.gamma = gamma
        self.element_label = element_label
        self.dim = base.dim
        self.size = base.size
        self.labels = tuple(f"{lbl}.{element_label}" for lbl in base.labels)

    def evaluate(self, x):
        x = self._check(x)
        return self.base.evaluate(self.gamma.T @ x)

    def evaluate_matrix(self, X):
        X = np.asarray(X, dtype=float)
        return self.base.evaluate_matrix(self.gamma.T @ X)

    def to_spec(self):
        return {
            "kind": "transformed",
            "base": self.base.to_spec(),
            "matrix": self.gamma.tolist(),
            "element_label": self.element_label,
        }


def dictionary_from_spec(spec, dim=None):
    """Build a dictionary from its JSON spec; ``dim`` fills in when the
    spec omits it (e.g. {"kind": "identity"})."""
    kind = spec.get("kind")
    d = spec.get("dim", dim)
    if kind in ("identity", "monomial") and d is None:
        raise ConfigurationError("dictionary spec needs a 'dim'")
    if kind == "identity":
        return IdentityDictionary(d)
    if kind == "monomial":
        return MonomialDictionary(
            d,
            max_degree=spec.get("max_degree", 2),
            include_constant=spec.get("include_constant", True),
        )
    if kind == "transformed":
        base = dictionary_from_spec(spec["base"], dim=d)
        return TransformedDictionary(
            base, np.array(spec["matrix"], dtype=float),
            spec.get("element_label", "g"),
        )
    if kind == "custom":
        raise ConfigurationError(
            "custom dictionaries hold callables and cannot be rebuilt from JSON"
        )
    raise ConfigurationError(f"unknown dictionary kind {kind!r}")


def lift(dictionary, pairs):
    """Lift snapshot pairs into feature space: Yp = Psi(Xp), Yf = Psi(Xf)."""
    if pairs.dim != dictionary.dim:
        raise InputError("snapshot dimension does not match dictionary")
    return dictionary.evaluate_matrix(pairs.Xp), dictionary.evaluate_matrix(pairs.Xf)


# ---------------------------------------------------------------------------
# induced representation

@dataclass(frozen=True)
class FeatureRepresentation:
    """K x K matrix R with Psi(gamma x) = R Psi(x), plus the max-norm defect
    of that identity measured on an out-of-sample probe cloud."""

    label: str
    matrix: np.ndarray
    residual: float

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def inverse_matrix(self):
        if _is_signed_permutation(self.matrix):
            return self.matrix.T
        return np.linalg.inv(self.matrix)

    def to_dict(self):
        return {
            "label": self.label,
            "K": self.size,
            "matrix": self.matrix.tolist(),
            "residual": self.residual,
        }


def _is_signed_permutation(m):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    nonzero = m != 0.0
    if not (np.all(nonzero.sum(axis=0) == 1) and np.all(nonzero.sum(axis=1) == 1)):
        return False
    return bool(np.all(np.abs(m[nonzero]) == 1.0))


def _signed_perm_monomial_rep(dictionary, g):
    """Exact representation for a signed-permutation gamma on a monomial
    dictionary: each monomial maps to a single monomial with sign
    (product of the per-variable signs raised to the exponents)."""
    gamma = g.matrix
    col = [int(np.argmax(np.abs(gamma[i]))) for i in range(g.dim)]
    sign = [gamma[i, col[i]] for i in range(g.dim)]
    R = np.zeros((dictionary.size, dictionary.size))
    for k, exps in enumerate(dictionary.exponents):
        s = 1.0
        target = [0] * g.dim
        for i, e in enumerate(exps):
            if e:
                target[col[i]] += e
                if sign[i] < 0 and e % 2 == 1:
                    s = -s
        R[k, dictionary._index_of[tuple(target)]] = s
    return R


def induced_representation(dictionary, g, probe_count=None, tol=CLOSURE_TOL, seed=0):
    """Compute the feature-space representation R of a group element.

    Exact paths: identity dictionaries (R = gamma) and monomial dictionaries
    under signed-permutation elements (multi-index bookkeeping). Otherwise R
    is identified by least squares on a seeded probe cloud in [-1, 1]^dim
    and validated out-of-sample; a defect above ``tol`` (relative to the
    probe feature norms) raises DictionaryNotClosedError.
    """
    if dictionary.dim != g.dim:
        raise InputError("dictionary and element dimensions differ")

    if dictionary.kind == "identity":
        return FeatureRepresentation(label=g.label, matrix=g.matrix.copy(),
                                     residual=0.0)
    if dictionary.kind == "monomial" and _is_signed_permutation(g.matrix):
        R = _signed_perm_monomial_rep(dictionary, g)
        return FeatureRepresentation(label=g.label, matrix=R, residual=0.0)

    K = dictionary.size
    if probe_count is None:
        probe_count = 4 * K
    if probe_count < K:
        raise InputError(f"probe_count must be at least K={K}")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(dictionary.dim, probe_count))
    A = dictionary.evaluate_matrix(X)
    B = dictionary.evaluate_matrix(g.matrix @ X)
    R, *_ = np.linalg.lstsq(A.T, B.T, rcond=None)
    R = R.T

    fresh = rng.uniform(-1.0, 1.0, size=(dictionary.dim, 10 * K))
    F = dictionary.evaluate_matrix(fresh)
    defect = np.max(np.abs(dictionary.evaluate_matrix(g.matrix @ fresh) - R @ F))
    residual = defect / max(1.0, np.max(np.abs(F)))
    if residual > tol:
        raise DictionaryNotClosedError(
            f"dictionary span is not invariant under element {g.label!r} "
            f"(out-of-sample defect {residual:.3e} > tol {tol:.1e}); "
            "the feature-space representation does not exist for this "
            "dictionary, so conjugation transport is unavailable",
            residual=residual,
        )
    return FeatureRepresentation(label=g.label, matrix=R, residual=float(residual))
