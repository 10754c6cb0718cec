"""Transport of local Koopman operators across symmetry-related invariant
sets, global block-diagonal assembly, and the verification suite.

Two transport routes exist for an operator K_i fitted on an invariant set
M_i when a group element g maps M_i into M_j:

* conjugation (same dictionary on both sets):  K_j = R K_i R^-1, where R is
  the induced feature-space representation of g;
* dictionary transport (same matrix): keep K_j = K_i but evolve the
  transformed dictionary psi_k(gamma^-1 x).

Either way no data from M_j is needed. The global operator on the union of
the sets is the block diagonal of the local ones, and it is stored and
applied blockwise so cross-set entries are exactly zero.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dictionaries import TransformedDictionary
from .dynamics import step
from .errors import InputError, IsotropyRequiredError, SymkoopError
from .koopman import KoopmanApprox, eigenvalue_hausdorff


@dataclass(frozen=True)
class InvariantSetRegistry:
    """Labels of the invariant sets, which one carries the data-fitted
    operator, and which group element maps the base set onto each other."""

    labels: tuple
    base_label: str
    mapping: dict  # non-base label -> group element label
    samples: Optional[dict] = None  # label -> representative states (n, dim)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels) or not self.labels:
            raise InputError("registry labels must be distinct and nonempty")
        if self.base_label not in self.labels:
            raise InputError(f"base label {self.base_label!r} not in labels")
        expected = set(self.labels) - {self.base_label}
        if set(self.mapping) != expected:
            raise InputError(
                "mapping must cover exactly the non-base labels "
                f"{sorted(expected)}, got {sorted(self.mapping)}"
            )


@dataclass(frozen=True)
class GlobalKoopman:
    """Block-diagonal composite keyed by invariant-set labels."""

    blocks: tuple  # of (label, KoopmanApprox) in registry order

    @property
    def labels(self):
        return [label for label, _ in self.blocks]

    @property
    def total_size(self):
        return sum(op.size for _, op in self.blocks)

    def block(self, label):
        for lbl, op in self.blocks:
            if lbl == label:
                return op
        raise InputError(f"unknown invariant-set label {label!r}")

    def block_slice(self, label):
        start = 0
        for lbl, op in self.blocks:
            if lbl == label:
                return slice(start, start + op.size)
            start += op.size
        raise InputError(f"unknown invariant-set label {label!r}")

    def as_matrix(self):
        """Dense block-diagonal matrix (for export and inspection only;
        prediction never goes through this)."""
        n = self.total_size
        out = np.zeros((n, n))
        start = 0
        for _, op in self.blocks:
            out[start:start + op.size, start:start + op.size] = op.matrix
            start += op.size
        return out


# ---------------------------------------------------------------------------
# transport

def transport_case1(op, rep, target_label=None):
    """Conjugate a fitted operator into the image set: K_j = R K_i R^-1.

    The result keeps the same dictionary and carries provenance marking it
    as transported rather than fitted; the stored residual is copied from
    the source fit.
    """
    if rep.size != op.size:
        raise InputError(
            f"representation size {rep.size} does not match operator size {op.size}"
        )
    try:
        r_inv = rep.inverse_matrix
    except np.linalg.LinAlgError as err:
        raise SymkoopError(
            f"representation {rep.label!r} is singular; construction should "
            "have rejected it"
        ) from err
    if target_label is None:
        target_label = f"{op.set_label}:{rep.label}"
    return KoopmanApprox(
        matrix=rep.matrix @ op.matrix @ r_inv,
        dictionary=op.dictionary,
        set_label=target_label,
        fit_residual=op.fit_residual,
        rank_used=op.rank_used,
        provenance={
            "transported": True,
            "method": "conjugation",
            "base_label": op.set_label,
            "element": rep.label,
            "rep_residual": rep.residual,
        },
    )


def transport_case2(op, g, target_label=None):
    """Transport by transforming the dictionary instead of the matrix.

    Returns ``(operator, dictionary)`` where the operator matrix is the
    unchanged K_i and the dictionary evaluates psi_k(gamma^-1 x). The pair
    governs feature evolution on the image set.
    """
    if op.dictionary.dim != g.dim:
        raise InputError("operator dictionary and element dimensions differ")
    if target_label is None:
        target_label = f"{op.set_label}:{g.label}"
    transformed = TransformedDictionary(op.dictionary, g.matrix, g.label)
    new_op = KoopmanApprox(
        matrix=op.matrix.copy(),
        dictionary=transformed,
        set_label=target_label,
        fit_residual=op.fit_residual,
        rank_used=op.rank_used,
        provenance={
            "transported": True,
            "method": "dictionary",
            "base_label": op.set_label,
            "element": g.label,
        },
    )
    return new_op, transformed


def assemble_global(registry, base, reps, fitted_overrides=None):
    """Build the global block-diagonal operator in registry label order.

    ``reps`` maps each non-base label to the FeatureRepresentation of its
    registry element; those blocks are produced by conjugation transport.
    ``fitted_overrides`` may supply data-fitted operators for labels whose
    blocks should not be transported (partially symmetric partitions).
    """
    if base.set_label != registry.base_label:
        raise InputError(
            f"base operator is labeled {base.set_label!r}, registry expects "
            f"{registry.base_label!r}"
        )
    fitted_overrides = fitted_overrides or {}
    blocks = []
    for label in registry.labels:
        if label == registry.base_label:
            blocks.append((label, base))
        elif label in fitted_overrides:
            blocks.append((label, fitted_overrides[label]))
        else:
            if label not in reps:
                raise InputError(f"no feature representation supplied for {label!r}")
            blocks.append((label, transport_case1(base, reps[label], label)))
    return GlobalKoopman(blocks=tuple(blocks))


def global_predict(gk, label, x0, steps, full=False):
    """Evolve a state's features under the global operator.

    The start vector is Psi_label(x0) embedded in the stacked feature space
    with zeros elsewhere, and the global matrix is applied blockwise (never
    as a dense multiply), so off-block components stay exactly zero and the
    labeled slice reproduces block-local prediction bit for bit. With
    ``full=True`` the whole stacked vectors are returned instead of the
    labeled slice.
    """
    if steps < 0:
        raise InputError("steps must be nonnegative")
    op = gk.block(label)
    vectors = [np.zeros(o.size) for _, o in gk.blocks]
    vectors[gk.labels.index(label)] = op.dictionary.evaluate(x0)
    out = np.empty((steps + 1, gk.total_size))
    out[0] = np.concatenate(vectors)
    for k in range(steps):
        vectors = [o.matrix @ v for (_, o), v in zip(gk.blocks, vectors)]
        out[k + 1] = np.concatenate(vectors)
    return out if full else out[:, gk.block_slice(label)]


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class ConjugationReport:
    """Comparison of an independently fitted operator against a transported
    one: matrix error, spectral error, and pass flags."""

    frobenius_error: float
    hausdorff_distance: float
    frobenius_tol: Optional[float]
    hausdorff_tol: Optional[float]

    @property
    def passed(self):
        ok = True
        if self.frobenius_tol is not None:
            ok &= self.frobenius_error <= self.frobenius_tol
        if self.hausdorff_tol is not None:
            ok &= self.hausdorff_distance <= self.hausdorff_tol
        return bool(ok)

    def to_dict(self):
        return {
            "frobenius_error": self.frobenius_error,
            "hausdorff_distance": self.hausdorff_distance,
            "frobenius_tol": self.frobenius_tol,
            "hausdorff_tol": self.hausdorff_tol,
            "passed": self.passed,
        }


def verify_conjugation(op_i, op_j, rep, frobenius_tol=1e-10, hausdorff_tol=None):
    """Check K_j against R K_i R^-1.

    Pass ``frobenius_tol`` for the exact tier (K_j fitted on exactly
    transformed data) and ``hausdorff_tol`` for the statistical tier (K_j
    fitted on an independent trajectory of the mirrored set); either
    tolerance may be None to skip that criterion.
    """
    if op_i.size != op_j.size or op_i.size != rep.size:
        raise InputError("operator and representation sizes must match")
    transported = rep.matrix @ op_i.matrix @ rep.inverse_matrix
    denom = np.linalg.norm(op_j.matrix)
    frob = float(np.linalg.norm(op_j.matrix - transported) / denom) if denom else 0.0
    haus = eigenvalue_hausdorff(
        np.linalg.eigvals(op_j.matrix), np.linalg.eigvals(transported)
    )
    return ConjugationReport(
        frobenius_error=frob,
        hausdorff_distance=haus,
        frobenius_tol=frobenius_tol,
        hausdorff_tol=hausdorff_tol,
    )


def commutator_norm(op, rep):
    """||K R - R K||_F / ||K||_F, with no isotropy precondition (diagnostic
    use; expected to be large when the element moves the fitted set)."""
    K, R = op.matrix, rep.matrix
    return float(np.linalg.norm(K @ R - R @ K) / np.linalg.norm(K))


def data_stabilizer_labels(group, states, tol=1e-8):
    """Labels of the elements mapping a sample cloud into itself: g
    qualifies when every transformed sample lands within
    tol * (1 + |x|) of some sample. This is the setwise-stabilizer
    evidence ``verify_commutation`` asks for."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    labels = []
    for g in group.elements:
        mapped = states @ g.matrix.T
        dist = np.linalg.norm(mapped[:, None, :] - states[None, :, :], axis=2)
        nearest = dist.min(axis=1)
        if np.all(nearest <= tol * (1.0 + np.linalg.norm(mapped, axis=1))):
            labels.append(g.label)
    return tuple(labels)


def verify_commutation(op, rep, stabilizer_labels):
    """Commutator norm of K with R, allowed only for elements stabilizing
    the fitted set (its isotropy, g . M = M); for anything else
    finite-dimensional commutation is not implied and the check refuses.

    ``stabilizer_labels`` is the caller's evidence, e.g. from
    ``data_stabilizer_labels`` on the fitted samples or from a pointwise
    isotropy report.
    """
    if rep.label not in stabilizer_labels:
        raise IsotropyRequiredError(
            f"element {rep.label!r} is not in the isotropy of the fitted set; "
            "commutation with the local operator is only guaranteed for "
            "elements mapping the set to itself (use conjugation transport "
            "across sets instead)"
        )
    return commutator_norm(op, rep)


@dataclass(frozen=True)
class InvariantImageReport:
    """Fraction of transformed samples whose forward orbit stays in the
    claimed image set."""

    fraction: float
    n_samples: int
    horizon: int
    failed_indices: tuple

    def to_dict(self):
        return {
            "fraction": self.fraction,
            "n_samples": self.n_samples,
            "horizon": self.horizon,
            "failed_indices": list(self.failed_indices),
        }


def verify_invariant_set_image(system, g, samples, dt, horizon, membership):
    """Push samples of M_i through g and integrate; report the fraction
    whose entire forward orbit satisfies the M_j membership predicate."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    failed = []
    for idx, x in enumerate(samples):
        y = g.matrix @ x
        ok = bool(membership(y))
        for _ in range(horizon):
            if not ok:
                break
            y = step(system, y, dt)
            ok = bool(membership(y))
        if not ok:
            failed.append(idx)
    n = len(samples)
    return InvariantImageReport(
        fraction=(n - len(failed)) / n,
        n_samples=n,
        horizon=horizon,
        failed_indices=tuple(failed),
    )


# ---------------------------------------------------------------------------
# JSON formats

def registry_to_dict(registry):
    out = {
        "labels": list(registry.labels),
        "base": registry.base_label,
        "mapping": dict(registry.mapping),
    }
    if registry.samples:
        out["samples"] = {
            label: np.asarray(states).tolist()
            for label, states in registry.samples.items()
        }
    return out


def registry_from_dict(data):
    samples = data.get("samples")
    if samples is not None:
        samples = {
            label: np.array(states, dtype=float) for label, states in samples.items()
        }
    labels = tuple(data["labels"])
    return InvariantSetRegistry(
        labels=labels,
        base_label=data.get("base", labels[0] if labels else ""),
        mapping=dict(data["mapping"]),
        samples=samples,
    )


def save_registry(registry, path):
    with open(path, "w") as fh:
        json.dump(registry_to_dict(registry), fh, indent=2)


def load_registry(path):
    with open(path) as fh:
        return registry_from_dict(json.load(fh))


def global_to_dict(gk):
    from .koopman import operator_to_dict

    return {
        "labels": gk.labels,
        "total_size": gk.total_size,
        "blocks": [
            dict(operator_to_dict(op), label=label) for label, op in gk.blocks
        ],
    }


def global_from_dict(data):
    from .koopman import operator_from_dict

    blocks = tuple(
        (entry["label"], operator_from_dict(entry)) for entry in data["blocks"]
    )
    return GlobalKoopman(blocks=blocks)


def save_global(gk, path):
    with open(path, "w") as fh:
        json.dump(global_to_dict(gk), fh, indent=2)


def load_global(path):
    with open(path) as fh:
        return global_from_dict(json.load(fh))
