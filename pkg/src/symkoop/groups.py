"""Finite symmetry groups realized as orthogonal state-space matrices.

A group is generated from matrix generators by closing under products,
stored as an ordered element list (identity first) plus a Cayley table of
product indices. Group elements act on states by matrix multiplication and
on scalar observables by ``(g * f)(x) = f(g^-1 x)``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, step
from .errors import InputError, NonFiniteGroupError, SymkoopError

MATRIX_MATCH_TOL = 1e-10  # max-norm tolerance for element identification
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class GroupElement:
    """A labeled orthogonal matrix acting on state space."""

    label: str
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"element {self.label!r}: matrix must be square")
        defect = np.max(np.abs(m.T @ m - np.eye(m.shape[0])))
        if defect > ORTHOGONALITY_TOL:
            raise InputError(
                f"element {self.label!r} is not orthogonal (defect {defect:.3e})"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def inverse_matrix(self):
        # valid because construction enforces orthogonality
        return self.matrix.T


@dataclass(frozen=True)
class FiniteMatrixGroup:
    """Ordered elements (index 0 = identity) with their Cayley table."""

    elements: tuple
    cayley: np.ndarray  # (order, order) int, cayley[i][j] = index of g_i g_j
    dim: int
    generator_labels: tuple = ()

    @property
    def order(self):
        return len(self.elements)

    @property
    def identity(self):
        return self.elements[0]

    def labels(self):
        return [g.label for g in self.elements]

    def index_of(self, label):
        for i, g in enumerate(self.elements):
            if g.label == label:
                return i
        raise InputError(f"no element labeled {label!r} in group")

    def element(self, label):
        return self.elements[self.index_of(label)]

    def multiply(self, i, j):
        return int(self.cayley[i, j])

    def inverse_index(self, i):
        hits = np.nonzero(self.cayley[i] == 0)[0]
        if len(hits) != 1:
            raise SymkoopError(f"element index {i} has no unique inverse")
        return int(hits[0])


@dataclass(frozen=True)
class IsotropyReport:
    """Subset of element indices fixing a sampled trajectory."""

    member_indices: tuple
    is_subgroup: bool
    tolerance: float


@dataclass(frozen=True)
class EquivarianceReport:
    """Per-element equivariance defects of the one-step map."""

    entries: tuple  # of (label, max_defect, passed)
    tolerance: float

    @property
    def all_passed(self):
        return all(passed for _, _, passed in self.entries)

    def to_dict(self):
        return {
            "tolerance": self.tolerance,
            "all_passed": self.all_passed,
            "elements": [
                {"label": lbl, "max_defect": defect, "passed": passed}
                for lbl, defect, passed in self.entries
            ],
        }


def _find_match(matrices, m):
    for i, known in enumerate(matrices):
        if np.max(np.abs(known - m)) <= MATRIX_MATCH_TOL:
            return i
    return None


def generate_group(generators, max_order=64, dim=None):
    """Close a set of orthogonal generators under multiplication.

    The identity gets index 0 (inserted if absent); products keep the label
    of the earliest discovered equivalent, new ones are labeled
    ``"<a>*<b>"``. Raises NonFiniteGroupError if closure exceeds
    ``max_order`` elements, and InputError on dimension mismatches.
    """
    generators = list(generators)
    if not generators:
        if dim is None:
            raise InputError("empty generator set requires an explicit dim")
        identity = GroupElement("e", np.eye(dim))
        return FiniteMatrixGroup(
            elements=(identity,),
            cayley=np.zeros((1, 1), dtype=int),
            dim=dim,
        )

    dim = generators[0].dim
    if any(g.dim != dim for g in generators):
        raise InputError("generators must share one dimension")

    eye = np.eye(dim)
    elements = [GroupElement("e", eye)]
    matrices = [eye]
    for g in generators:
        if _find_match(matrices, g.matrix) is None:
            elements.append(g)
            matrices.append(g.matrix)
        elif np.max(np.abs(g.matrix - eye)) <= MATRIX_MATCH_TOL:
            # a generator equal to the identity keeps the canonical slot
            elements[0] = GroupElement(g.label, eye)

    # breadth-first closure under products
    frontier = list(range(len(elements)))
    while frontier:
        new_frontier = []
        for i in frontier:
            for j in range(len(elements)):
                for a, b in ((i, j), (j, i)):
                    prod = elements[a].matrix @ elements[b].matrix
                    if _find_match(matrices, prod) is None:
                        if len(elements) >= max_order:
                            raise NonFiniteGroupError(
                                f"closure exceeded max_order={max_order}; "
                                "generators may not generate a finite group "
                                "at this matching tolerance"
                            )
                        label = f"{elements[a].label}*{elements[b].label}"
                        elements.append(GroupElement(label, prod))
                        matrices.append(elements[-1].matrix)
                        new_frontier.append(len(elements) - 1)
        frontier = new_frontier

    order = len(elements)
    cayley = np.empty((order, order), dtype=int)
    for i in range(order):
        for j in range(order):
            k = _find_match(matrices, elements[i].matrix @ elements[j].matrix)
            if k is None:
                raise SymkoopError("closure fixed point lost during table build")
            cayley[i, j] = k

    group = FiniteMatrixGroup(
        elements=tuple(elements),
        cayley=cayley,
        dim=dim,
        generator_labels=tuple(g.label for g in generators),
    )
    report = check_axioms(group)
    if not report["ok"]:
        raise SymkoopError(f"generated table violates group axioms: {report}")
    return group


def check_axioms(group):
    """Exhaustively verify closure, identity, inverses, and associativity
    on the Cayley table. Returns a dict report with per-axiom booleans."""
    n = group.order
    cayley = group.cayley
    closure = bool(np.all((cayley >= 0) & (cayley < n)))
    identity = bool(
        np.all(cayley[0] == np.arange(n)) and np.all(cayley[:, 0] == np.arange(n))
    )
    inverses = all(np.any(cayley[i] == 0) for i in range(n))
    assoc = True
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if cayley[cayley[i, j], k] != cayley[i, cayley[j, k]]:
                    assoc = False
                    break
    ok = closure and identity and inverses and assoc
    return {
        "order": n,
        "closure": closure,
        "identity": identity,
        "inverses": inverses,
        "associativity": assoc,
        "ok": ok,
    }


def builtin_group(system_name):
    """The declared symmetry group of a built-in system."""
    from .dynamics import BUILTIN_SYMMETRY_GENERATORS

    if system_name not in BUILTIN_SYMMETRY_GENERATORS:
        raise InputError(f"no built-in symmetry group for {system_name!r}")
    gens = [
        GroupElement(label, matrix)
        for label, matrix in BUILTIN_SYMMETRY_GENERATORS[system_name]
    ]
    return generate_group(gens)


# ---------------------------------------------------------------------------
# actions

def act_on_state(g, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (g.dim,):
        raise InputError(f"state shape {x.shape} does not match element dim {g.dim}")
    return g.matrix @ x


def act_on_function(g, f):
    """Return the observable x -> f(g^-1 x)."""
    ginv = g.inverse_matrix

    def transformed(x):
        return f(ginv @ np.asarray(x, dtype=float))

    return transformed


def transform_trajectory(traj, g):
    """Apply a group element to every sample of a trajectory."""
    if traj.dim != g.dim:
        raise InputError("trajectory and element dimensions differ")
    return Trajectory(dim=traj.dim, dt=traj.dt, states=traj.states @ g.matrix.T)


def transform_snapshots(pairs, g):
    """Apply a group element to both snapshot matrices."""
    if pairs.dim != g.dim:
        raise InputError("snapshot and element dimensions differ")
    from .dynamics import SnapshotPairs

    return SnapshotPairs(dim=pairs.dim, Xp=g.matrix @ pairs.Xp, Xf=g.matrix @ pairs.Xf)


# ---------------------------------------------------------------------------
# checks

def check_equivariance(system, group, dt, samples, tol=1e-12):
    """Measure, per non-identity element, the worst relative defect of
    step(g x) - g step(x) over the sample states."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    stepped = [step(system, x, dt) for x in samples]
    entries = []
    for g in group.elements[1:]:
        worst = 0.0
        for x, fx in zip(samples, stepped):
            lhs = step(system, g.matrix @ x, dt)
            defect = np.linalg.norm(lhs - g.matrix @ fx) / (
                1.0 + np.linalg.norm(fx)
            )
            worst = max(worst, defect)
        entries.append((g.label, worst, worst <= tol))
    return EquivarianceReport(entries=tuple(entries), tolerance=tol)


def isotropy_set(group, traj, tol=1e-8):
    """Elements fixing every sampled state of the trajectory, membership
    decided by the relative test |g x_t - x_t| <= tol (1 + |x_t|)."""
    states = traj.states
    norms = 1.0 + np.linalg.norm(states, axis=1)
    members = []
    for i, g in enumerate(group.elements):
        residual = np.linalg.norm(states @ g.matrix.T - states, axis=1)
        if np.all(residual <= tol * norms):
            members.append(i)
    member_set = set(members)
    is_subgroup = all(
        group.multiply(i, j) in member_set for i in members for j in members
    )
    return IsotropyReport(
        member_indices=tuple(members), is_subgroup=is_subgroup, tolerance=tol
    )


def conjugate_isotropy(group, report, g):
    """Isotropy of the transformed trajectory, computed algebraically as
    the conjugate subgroup {g h g^-1 : h in members} via the Cayley table."""
    gi = _element_index(group, g)
    gi_inv = group.inverse_index(gi)
    members = sorted(
        group.multiply(group.multiply(gi, j), gi_inv) for j in report.member_indices
    )
    member_set = set(members)
    is_subgroup = all(
        group.multiply(i, j) in member_set for i in members for j in members
    )
    return IsotropyReport(
        member_indices=tuple(members),
        is_subgroup=is_subgroup,
        tolerance=report.tolerance,
    )


def _element_index(group, g):
    for i, h in enumerate(group.elements):
        if np.max(np.abs(h.matrix - g.matrix)) <= MATRIX_MATCH_TOL:
            return i
    raise InputError(f"element {g.label!r} not found in group")


# ---------------------------------------------------------------------------
# JSON format: {"dim": n, "generators": [{"label": ..., "matrix": [[...]]}]}

def group_to_dict(group):
    gen_labels = group.generator_labels or tuple(
        g.label for g in group.elements[1:]
    )
    generators = [
        {"label": lbl, "matrix": group.element(lbl).matrix.tolist()}
        for lbl in gen_labels
    ]
    return {"dim": group.dim, "generators": generators}


def group_from_dict(data, max_order=64):
    gens = [
        GroupElement(entry["label"], np.array(entry["matrix"], dtype=float))
        for entry in data.get("generators", [])
    ]
    return generate_group(gens, max_order=max_order, dim=data.get("dim"))


def save_group(group, path):
    with open(path, "w") as fh:
        json.dump(group_to_dict(group), fh, indent=2)


def load_group(path, max_order=64):
    with open(path) as fh:
        return group_from_dict(json.load(fh), max_order=max_order)
