"""Least-squares Koopman approximation on lifted snapshot data.

The finite-dimensional operator is the minimum-Frobenius-norm solution of
min_K ||K Yp - Yf||_F, computed as K = Yf pinv(Yp) through a truncated SVD.
The matrix advances feature vectors, Psi(x_{k+1}) ~ K Psi(x_k), so
observables (and therefore eigenfunctions) evolve through row vectors:
eigenfunctions are built from left eigenvectors, phi(x) = w^T Psi(x).
"""

import json
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dictionaries import Dictionary, dictionary_from_spec, lift
from .dynamics import snapshots
from .errors import DegenerateDataError, InputError

DEFAULT_RANK_TOL = 1e-12


@dataclass(frozen=True)
class KoopmanApprox:
    """A K x K operator approximation on one invariant set or trajectory."""

    matrix: np.ndarray
    dictionary: Dictionary
    set_label: str
    fit_residual: float
    rank_used: int
    provenance: Optional[dict] = None  # None: fitted from data

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def is_transported(self):
        return self.provenance is not None and self.provenance.get("transported", False)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending modulus) with unit-norm left eigenvectors."""

    eigenvalues: np.ndarray          # (K,) complex
    coefficients: np.ndarray         # (K, K) complex, row i satisfies w^T K = lam w^T

    @property
    def size(self):
        return len(self.eigenvalues)


def fit_edmd(Yp, Yf, rank_tol=DEFAULT_RANK_TOL, *, dictionary, set_label="fit"):
    """Fit K = Yf pinv(Yp) with singular values below rank_tol * sigma_max
    truncated. Returns the operator with its relative Frobenius residual
    ||K Yp - Yf||_F / ||Yf||_F and the retained rank."""
    Yp = np.asarray(Yp, dtype=float)
    Yf = np.asarray(Yf, dtype=float)
    if Yp.ndim != 2 or Yp.shape != Yf.shape:
        raise InputError(
            f"Yp and Yf must be equal-shape 2-D matrices, got {Yp.shape} and {Yf.shape}"
        )
    if Yp.shape[1] < 1:
        raise InputError("need at least one snapshot pair")
    if not np.any(Yp):
        raise DegenerateDataError("Yp is all zero; no operator is identifiable")
    if rank_tol <= 0:
        raise InputError("rank_tol must be positive")

    U, s, Vt = np.linalg.svd(Yp, full_matrices=False)
    rank = int(np.sum(s >= rank_tol * s[0]))
    pinv = (Vt[:rank].T / s[:rank]) @ U[:, :rank].T
    K = Yf @ pinv

    Yf_norm = np.linalg.norm(Yf)
    residual = float(np.linalg.norm(K @ Yp - Yf) / Yf_norm) if Yf_norm > 0 else 0.0
    return KoopmanApprox(
        matrix=K,
        dictionary=dictionary,
        set_label=set_label,
        fit_residual=residual,
        rank_used=rank,
    )


def fit_snapshots(pairs, dictionary, rank_tol=DEFAULT_RANK_TOL, set_label="fit"):
    """Lift snapshot pairs with the dictionary and fit."""
    Yp, Yf = lift(dictionary, pairs)
    return fit_edmd(Yp, Yf, rank_tol, dictionary=dictionary, set_label=set_label)


def fit_trajectory(traj, dictionary, rank_tol=DEFAULT_RANK_TOL, set_label="fit"):
    return fit_snapshots(snapshots(traj), dictionary, rank_tol, set_label=set_label)


def predict(op, x0, steps):
    """Feature-space forecast: rows Psi(x0), K Psi(x0), ..., K^steps Psi(x0)."""
    if steps < 0:
        raise InputError("steps must be nonnegative")
    v = op.dictionary.evaluate(x0)
    out = np.empty((steps + 1, op.size))
    out[0] = v
    for k in range(steps):
        v = op.matrix @ v
        out[k + 1] = v
    return out


def spectrum(op):
    """Dense eigendecomposition with deterministic ordering.

    Eigenvalues sorted by descending modulus, ties broken by descending real
    part then ascending imaginary part (conjugate pairs end up adjacent).
    Left eigenvectors are unit 2-norm with the first nonzero entry's real
    part nonnegative. Eigensolver failures propagate as LinAlgError.
    """
    lam, W = np.linalg.eig(op.matrix.T)  # columns: K^T w = lam w, i.e. w^T K = lam w^T
    order = np.lexsort((lam.imag, -lam.real, -np.abs(lam)))
    lam = lam[order]
    W = W[:, order]
    coeffs = np.empty((op.size, op.size), dtype=complex)
    scale = np.linalg.norm(op.matrix)
    for i in range(op.size):
        w = W[:, i] / np.linalg.norm(W[:, i])
        nz = np.nonzero(np.abs(w) > 1e-12 * np.max(np.abs(w)))[0][0]
        if w[nz].real < 0 or (w[nz].real == 0 and w[nz].imag < 0):
            w = -w
        defect = np.linalg.norm(w @ op.matrix - lam[i] * w)
        if scale > 0 and defect > 1e-8 * scale:
            raise np.linalg.LinAlgError(
                f"left eigenpair {i} defect {defect:.3e} exceeds 1e-8 * ||K||"
            )
        coeffs[i] = w
    return Spectrum(eigenvalues=lam, coefficients=coeffs)


def eigenfunction_eval(spec, index, dictionary, x):
    """Evaluate the index-th approximate eigenfunction, w^T Psi(x)."""
    if not 0 <= index < spec.size:
        raise InputError(f"eigenfunction index {index} out of range [0, {spec.size})")
    return complex(spec.coefficients[index] @ dictionary.evaluate(x))


def eigenvalue_hausdorff(a, b):
    """Hausdorff distance between two finite eigenvalue multisets."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# ---------------------------------------------------------------------------
# JSON export

def operator_to_dict(op):
    out = {
        "set_label": op.set_label,
        "K": op.matrix.tolist(),
        "dictionary": op.dictionary.to_spec(),
        "fit_residual": op.fit_residual,
        "rank_used": op.rank_used,
    }
    if op.provenance is not None:
        out["provenance"] = op.provenance
    return out


def operator_from_dict(data):
    dictionary = dictionary_from_spec(data["dictionary"])
    matrix = np.array(data["K"], dtype=float)
    if matrix.shape != (dictionary.size, dictionary.size):
        raise InputError(
            f"operator matrix shape {matrix.shape} does not match dictionary "
            f"size {dictionary.size}"
        )
    return KoopmanApprox(
        matrix=matrix,
        dictionary=dictionary,
        set_label=data["set_label"],
        fit_residual=float(data["fit_residual"]),
        rank_used=int(data["rank_used"]),
        provenance=data.get("provenance"),
    )


def save_operator(op, path):
    with open(path, "w") as fh:
        json.dump(operator_to_dict(op), fh, indent=2)


def load_operator(path):
    with open(path) as fh:
        return operator_from_dict(json.load(fh))


def spectrum_to_list(spec):
    return [
        {
            "re": float(lam.real),
            "im": float(lam.imag),
            "w_re": spec.coefficients[i].real.tolist(),
            "w_im": spec.coefficients[i].imag.tolist(),
        }
        for i, lam in enumerate(spec.eigenvalues)
    ]


def spectrum_from_list(entries):
    eigenvalues = np.array([e["re"] + 1j * e["im"] for e in entries])
    coefficients = np.array(
        [np.array(e["w_re"]) + 1j * np.array(e["w_im"]) for e in entries]
    )
    return Spectrum(eigenvalues=eigenvalues, coefficients=coefficients)


def relabel(op, set_label):
    return replace(op, set_label=set_label)
