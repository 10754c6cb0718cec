"""Named end-to-end verification scenarios for the built-in systems.

Each check re-derives what the theory guarantees from freshly simulated,
seeded data: group axioms, one-step equivariance, exact-tier conjugation
(operator fitted on exactly transformed data), statistical-tier conjugation
(operator fitted on an independent trajectory of the mirrored set),
similarity invariance of spectra, commutation on symmetric data, and
invariance of transformed sets. The CLI ``verify`` command runs these; the
acceptance test suite asserts them with pinned tolerances.
"""

from dataclasses import dataclass

import numpy as np

from . import dictionaries, dynamics, equivariant, groups, koopman
from .errors import ConfigurationError

EQUIVARIANCE_TOL = 1e-12
EXACT_TIER_TOL = 1e-10
SPECTRUM_TOL = 1e-8
COMMUTATION_TOL = 1e-8

# Seed-to-seed eigenvalue spread of reseeded same-set fits, measured once by
# seed_spread() with the samplers and fit settings below, then frozen. The
# statistical conjugation tier passes at 3x this spread.
STAT_TIER_SPREAD = {
    "toggle_switch": 0.045454100652963514,
    "hamiltonian": 0.0037321276457658037,
}

# Per-system experiment constants: sampling boxes for equivariance probes,
# the trajectory used by the exact tier (chosen for well-conditioned lifted
# data), and initial-condition samplers for trajectories inside the base
# invariant set.
_BOXES = {
    "lorenz": [(-20.0, 20.0), (-25.0, 25.0), (0.0, 45.0)],
    "toggle_switch": [(0.0, 4.0), (0.0, 4.0)],
    "hamiltonian": [(-4.0, 4.0), (-4.0, 4.0)],
}

_EXACT_TIER_RUNS = {
    "lorenz": (np.array([1.0, 1.0, 1.05]), 0.01, 500),
    "toggle_switch": (np.array([3.5, 1.2]), 0.05, 100),
    "hamiltonian": (np.array([3.4, 0.2]), 0.001, 400),
}

_STAT_TIER_RUNS = {  # (dt, n_steps, mirror element)
    "toggle_switch": (0.05, 100, "swap"),
    "hamiltonian": (0.001, 400, "swap"),
}


def sample_box(name, n, rng):
    lo, hi = np.array(_BOXES[name]).T
    return rng.uniform(lo, hi, size=(n, len(lo)))


def draw_base_state(name, rng):
    """A random initial condition inside the base invariant set."""
    if name == "toggle_switch":
        # right region x1 > x2, inside the basin of (2 + sqrt 3, 2 - sqrt 3)
        return np.array([rng.uniform(2.2, 3.6), rng.uniform(0.1, 1.2)])
    if name == "hamiltonian":
        # around the center (3, 0): sector q > |p| inside q^2 + p^2 < 18
        return np.array([rng.uniform(2.4, 3.6), rng.uniform(-0.5, 0.5)])
    if name == "lorenz":
        return np.array([1.0, 1.0, 1.05]) + rng.uniform(-0.5, 0.5, size=3)
    raise ConfigurationError(f"no sampler for {name!r}")


def membership_predicates(name):
    """Invariant-set membership tests keyed by registry label."""
    if name == "toggle_switch":
        return {
            "right": lambda x: x[0] > x[1],
            "left": lambda x: x[1] > x[0],
        }
    if name == "hamiltonian":
        inside = lambda x: x[0] * x[0] + x[1] * x[1] < 18.0
        return {
            "IS-1": lambda x: x[0] > abs(x[1]) and inside(x),
            "IS-2": lambda x: x[1] > abs(x[0]) and inside(x),
            "IS-3": lambda x: -x[0] > abs(x[1]) and inside(x),
            "IS-4": lambda x: -x[1] > abs(x[0]) and inside(x),
        }
    raise ConfigurationError(f"no membership predicates for {name!r}")


def builtin_registry(name):
    """Invariant-set registry for a built-in system.

    The Lorenz entries are trajectory segments (the two wings of the
    attractor are exchanged, not preserved, by the flow; the per-trajectory
    conjugation result is what applies), the others are true invariant sets.
    """
    if name == "toggle_switch":
        return equivariant.InvariantSetRegistry(
            labels=("right", "left"), base_label="right",
            mapping={"left": "swap"},
        )
    if name == "hamiltonian":
        return equivariant.InvariantSetRegistry(
            labels=("IS-1", "IS-2", "IS-3", "IS-4"), base_label="IS-1",
            mapping={"IS-2": "swap", "IS-3": "negate", "IS-4": "swap*negate"},
        )
    if name == "lorenz":
        return equivariant.InvariantSetRegistry(
            labels=("blue", "magenta"), base_label="blue",
            mapping={"magenta": "rot_pi_z"},
        )
    raise ConfigurationError(f"no registry for {name!r}")


def exact_tier_trajectory(name):
    x0, dt, n = _EXACT_TIER_RUNS[name]
    return dynamics.simulate(dynamics.make_system(name), x0, dt, n)


def base_dictionaries(name):
    dim = dynamics.make_system(name).dim
    return {
        "identity": dictionaries.IdentityDictionary(dim),
        "monomial2": dictionaries.MonomialDictionary(dim, 2),
    }


# ---------------------------------------------------------------------------
# checks

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    metrics: dict
    detail: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "metrics": self.metrics,
            "detail": self.detail,
        }


def check_group_axioms(name):
    group = groups.builtin_group(name)
    report = groups.check_axioms(group)
    return CheckResult(
        name=f"group_axioms:{name}",
        passed=report["ok"],
        metrics=report,
        detail=f"order {group.order} table verified exhaustively",
    )


def check_equivariance(name, n_samples=1000, tol=EQUIVARIANCE_TOL, seed=0):
    system = dynamics.make_system(name)
    group = groups.builtin_group(name)
    samples = sample_box(name, n_samples, np.random.default_rng(seed))
    report = groups.check_equivariance(
        system, group, dynamics.DEFAULT_DT[name], samples, tol=tol
    )
    worst = max((d for _, d, _ in report.entries), default=0.0)
    return CheckResult(
        name=f"equivariance:{name}",
        passed=report.all_passed,
        metrics={"worst_defect": worst, "tol": tol, "n_samples": n_samples},
        detail=f"max relative defect {worst:.3e} over {n_samples} states",
    )


def check_conjugation_exact(name, tol=EXACT_TIER_TOL):
    """Fit on a trajectory, refit on its exactly transformed snapshots, and
    compare against conjugation by the induced representation."""
    group = groups.builtin_group(name)
    pairs = dynamics.snapshots(exact_tier_trajectory(name))
    worst = 0.0
    for dict_name, dictionary in base_dictionaries(name).items():
        base = koopman.fit_snapshots(pairs, dictionary, set_label="base")
        for g in group.elements[1:]:
            rep = dictionaries.induced_representation(dictionary, g)
            mirrored = koopman.fit_snapshots(
                groups.transform_snapshots(pairs, g), dictionary,
                set_label=f"image:{g.label}",
            )
            report = equivariant.verify_conjugation(
                base, mirrored, rep, frobenius_tol=tol
            )
            worst = max(worst, report.frobenius_error)
    return CheckResult(
        name=f"conjugation_exact:{name}",
        passed=worst <= tol,
        metrics={"worst_frobenius_error": worst, "tol": tol},
        detail=f"worst relative Frobenius error {worst:.3e} "
               "(identity and monomial-2 dictionaries, all elements)",
    )


def stat_tier_fit(name, rng, mirror=None):
    """Fit an identity-dictionary operator on a fresh seeded trajectory of
    the base set (or of its mirror image under ``mirror``)."""
    system = dynamics.make_system(name)
    dt, n_steps, _ = _STAT_TIER_RUNS[name]
    x0 = draw_base_state(name, rng)
    if mirror is not None:
        x0 = mirror.matrix @ x0
    traj = dynamics.simulate(system, x0, dt, n_steps)
    return koopman.fit_trajectory(
        traj, dictionaries.IdentityDictionary(system.dim),
        set_label="stat-tier",
    )


def seed_spread(name, n_seeds=10, base_seed=2024):
    """Seed-to-seed eigenvalue Hausdorff spread of reseeded same-set fits.

    This is the oracle behind STAT_TIER_SPREAD: the maximum distance between
    the base fit's eigenvalues and those of ``n_seeds`` refits from fresh
    initial conditions in the same invariant set.
    """
    base = stat_tier_fit(name, np.random.default_rng(base_seed))
    ev = np.linalg.eigvals(base.matrix)
    spread = 0.0
    for k in range(n_seeds):
        other = stat_tier_fit(name, np.random.default_rng(100 + k))
        spread = max(
            spread, koopman.eigenvalue_hausdorff(np.linalg.eigvals(other.matrix), ev)
        )
    return spread


def check_conjugation_statistical(name, base_seed=2024, indep_seed=999):
    """Transported operator vs an operator fitted on independent data from
    the mirrored set, judged against 3x the frozen seed-to-seed spread."""
    _, _, mirror_label = _STAT_TIER_RUNS[name]
    group = groups.builtin_group(name)
    mirror = group.element(mirror_label)
    base = stat_tier_fit(name, np.random.default_rng(base_seed))
    indep = stat_tier_fit(name, np.random.default_rng(indep_seed), mirror=mirror)
    rep = dictionaries.induced_representation(base.dictionary, mirror)
    tol = 3.0 * STAT_TIER_SPREAD[name]
    report = equivariant.verify_conjugation(
        base, indep, rep, frobenius_tol=None, hausdorff_tol=tol
    )
    return CheckResult(
        name=f"conjugation_statistical:{name}",
        passed=report.passed,
        metrics=report.to_dict(),
        detail=f"eigenvalue Hausdorff {report.hausdorff_distance:.4f} "
               f"vs 3x frozen spread {tol:.4f}",
    )


def check_spectrum_invariance(name, tol=SPECTRUM_TOL):
    group = groups.builtin_group(name)
    pairs = dynamics.snapshots(exact_tier_trajectory(name))
    worst = 0.0
    for dictionary in base_dictionaries(name).values():
        op = koopman.fit_snapshots(pairs, dictionary, set_label="base")
        ev = np.linalg.eigvals(op.matrix)
        for g in group.elements:
            rep = dictionaries.induced_representation(dictionary, g)
            transported = equivariant.transport_case1(op, rep)
            worst = max(
                worst,
                koopman.eigenvalue_hausdorff(
                    ev, np.linalg.eigvals(transported.matrix)
                ),
            )
    return CheckResult(
        name=f"spectrum_invariance:{name}",
        passed=worst <= tol,
        metrics={"worst_hausdorff": worst, "tol": tol},
        detail=f"worst eigenvalue displacement under conjugation {worst:.3e}",
    )


def check_commutation_symmetric(name="toggle_switch", tol=COMMUTATION_TOL):
    """Fit on a trajectory united with its mirror image; the swap element
    stabilizes that data set, so K must commute with its representation."""
    group = groups.builtin_group(name)
    _, _, mirror_label = _STAT_TIER_RUNS[name]
    mirror = group.element(mirror_label)
    traj = exact_tier_trajectory(name)
    pairs = dynamics.snapshots(traj)
    union = dynamics.merge_snapshots(pairs, groups.transform_snapshots(pairs, mirror))
    dictionary = dictionaries.IdentityDictionary(group.dim)
    op = koopman.fit_snapshots(union, dictionary, set_label="union")
    stabilizers = equivariant.data_stabilizer_labels(group, union.Xp.T)
    rep = dictionaries.induced_representation(dictionary, mirror)
    norm = equivariant.verify_commutation(op, rep, stabilizers)
    return CheckResult(
        name=f"commutation_symmetric:{name}",
        passed=norm <= tol,
        metrics={"commutator_norm": norm, "tol": tol, "stabilizers": list(stabilizers)},
        detail=f"relative commutator norm {norm:.3e} on swap-invariant data",
    )


def check_invariant_set_image(name, n_samples=20, horizon=None, seed=5):
    """Invariance-of-image check: g maps invariant sets to invariant sets.
    of the base set are transformed by each registry element and integrated;
    every forward orbit must stay in the image set."""
    system = dynamics.make_system(name)
    group = groups.builtin_group(name)
    registry = builtin_registry(name)
    predicates = membership_predicates(name)
    if horizon is None:
        horizon = {"toggle_switch": 200, "hamiltonian": 1000}[name]
    rng = np.random.default_rng(seed)
    samples = np.array([draw_base_state(name, rng) for _ in range(n_samples)])
    dt = _STAT_TIER_RUNS[name][0]
    fractions = {}
    for label, element_label in registry.mapping.items():
        report = equivariant.verify_invariant_set_image(
            system, group.element(element_label), samples, dt, horizon,
            predicates[label],
        )
        fractions[label] = report.fraction
    passed = all(f == 1.0 for f in fractions.values())
    return CheckResult(
        name=f"invariant_set_image:{name}",
        passed=passed,
        metrics={"fractions": fractions, "horizon": horizon},
        detail="forward orbits of transformed samples stayed in the image sets"
               if passed else f"orbit escapes: {fractions}",
    )


ALL_CHECKS = [
    ("group_axioms:lorenz", lambda: check_group_axioms("lorenz")),
    ("group_axioms:toggle_switch", lambda: check_group_axioms("toggle_switch")),
    ("group_axioms:hamiltonian", lambda: check_group_axioms("hamiltonian")),
    ("equivariance:lorenz", lambda: check_equivariance("lorenz")),
    ("equivariance:toggle_switch", lambda: check_equivariance("toggle_switch")),
    ("equivariance:hamiltonian", lambda: check_equivariance("hamiltonian")),
    ("conjugation_exact:lorenz", lambda: check_conjugation_exact("lorenz")),
    ("conjugation_exact:toggle_switch", lambda: check_conjugation_exact("toggle_switch")),
    ("conjugation_exact:hamiltonian", lambda: check_conjugation_exact("hamiltonian")),
    ("conjugation_statistical:toggle_switch",
     lambda: check_conjugation_statistical("toggle_switch")),
    ("conjugation_statistical:hamiltonian",
     lambda: check_conjugation_statistical("hamiltonian")),
    ("spectrum_invariance:lorenz", lambda: check_spectrum_invariance("lorenz")),
    ("spectrum_invariance:toggle_switch",
     lambda: check_spectrum_invariance("toggle_switch")),
    ("spectrum_invariance:hamiltonian",
     lambda: check_spectrum_invariance("hamiltonian")),
    ("commutation_symmetric:toggle_switch", check_commutation_symmetric),
    ("invariant_set_image:toggle_switch",
     lambda: check_invariant_set_image("toggle_switch")),
    ("invariant_set_image:hamiltonian",
     lambda: check_invariant_set_image("hamiltonian")),
]


def check_names():
    return [name for name, _ in ALL_CHECKS]


def run_verification(names=None):
    """Run the selected checks (all by default) and collect the results."""
    selected = ALL_CHECKS if names is None else [
        (n, fn) for n, fn in ALL_CHECKS if n in set(names)
    ]
    return [fn() for _, fn in selected]
