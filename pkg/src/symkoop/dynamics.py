"""Benchmark dynamical systems, fixed-step RK4 integration, and snapshot
extraction.

Built-in systems:

* ``lorenz`` : the Lorenz equations, invariant under the half-turn
  (x, y, z) -> (-x, -y, z).
* ``toggle_switch`` : a bistable genetic toggle switch, invariant under the
  coordinate swap (x1, x2) -> (x2, x1) when its parameters are symmetric.
* ``hamiltonian`` : a double-well-style Hamiltonian flow with the Klein
  four-group of symmetries (swap, negation, and their product).

All trajectories are produced by a fixed-step classical 4th-order
Runge-Kutta scheme so that snapshot spacing is exactly uniform.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, InputError, NumericalDivergenceError

CONTINUOUS = "continuous"
DISCRETE = "discrete"


@dataclass(frozen=True)
class SystemDef:
    """A named dynamical system: continuous vector field or discrete map."""

    name: str
    dim: int
    params: dict
    field: Callable[[np.ndarray, dict], np.ndarray]
    kind: str = CONTINUOUS


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled states, one row per sample."""

    dim: int
    dt: float
    states: np.ndarray  # shape (n_samples, dim)

    @property
    def n_states(self):
        return self.states.shape[0]


@dataclass(frozen=True)
class SnapshotPairs:
    """Paired data matrices of consecutive states, one column per pair."""

    dim: int
    Xp: np.ndarray  # dim x M
    Xf: np.ndarray  # dim x M

    @property
    def n_pairs(self):
        return self.Xp.shape[1]


# ---------------------------------------------------------------------------
# built-in vector fields
#
# Fields are written with explicit multiplies (no pow) so that applying a
# signed-permutation symmetry to the input commutes with the arithmetic
# bit-for-bit; the equivariance checks rely on this being exact.

def lorenz_field(x, params):
    sigma, rho, beta = params["sigma"], params["rho"], params["beta"]
    return np.array(
        [
            sigma * (x[1] - x[0]),
            x[0] * (rho - x[2]) - x[1],
            x[0] * x[1] - beta * x[2],
        ]
    )


def toggle_switch_field(x, params):
    a1, a2 = params["alpha1"], params["alpha2"]
    k1, k2 = params["kappa1"], params["kappa2"]
    beta, theta = params["beta"], params["theta"]
    return np.array(
        [
            a1 / (1.0 + x[1] ** beta) - k1 * x[0],
            a2 / (1.0 + x[0] ** theta) - k2 * x[1],
        ]
    )


def hamiltonian_field(x, params):
    q, p = x[0], x[1]
    return np.array([p * p * p - 9.0 * p, q * q * q - 9.0 * q])


def hamiltonian_energy(q, p):
    """Conserved energy H(q, p) = p^4/4 - 9 p^2/2 - q^4/4 + 9 q^2/2.

    Antisymmetric under the swap q <-> p, even in each variable; its zero
    level set (the lines p = +/-q and the circle q^2 + p^2 = 18) separates
    the four families of periodic orbits around (+/-3, 0) and (0, +/-3).
    """
    return 0.25 * p**4 - 4.5 * p**2 - 0.25 * q**4 + 4.5 * q**2


# Toggle-switch defaults: the repression strengths must exceed the pitchfork
# threshold alpha = 2 (at kappa=1, beta=theta=2) for two stable equilibria
# to exist; alpha = 4 puts them at (2 + sqrt(3), 2 - sqrt(3)) and mirror.
_BUILTINS = {
    "lorenz": (3, {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0}, lorenz_field),
    "toggle_switch": (
        2,
        {
            "alpha1": 4.0,
            "alpha2": 4.0,
            "kappa1": 1.0,
            "kappa2": 1.0,
            "beta": 2.0,
            "theta": 2.0,
        },
        toggle_switch_field,
    ),
    "hamiltonian": (2, {}, hamiltonian_field),
}

DEFAULT_DT = {"lorenz": 0.01, "toggle_switch": 0.01, "hamiltonian": 0.001}

# State-space matrices generating each system's symmetry group.
BUILTIN_SYMMETRY_GENERATORS = {
    "lorenz": [("rot_pi_z", np.diag([-1.0, -1.0, 1.0]))],
    "toggle_switch": [("swap", np.array([[0.0, 1.0], [1.0, 0.0]]))],
    "hamiltonian": [
        ("swap", np.array([[0.0, 1.0], [1.0, 0.0]])),
        ("negate", np.array([[-1.0, 0.0], [0.0, -1.0]])),
    ],
}


def system_names():
    return sorted(_BUILTINS)


def make_system(name, params=None):
    """Build a built-in system, optionally overriding named parameters."""
    if name not in _BUILTINS:
        raise ConfigurationError(
            f"unknown system {name!r}; available: {', '.join(system_names())}"
        )
    dim, defaults, field = _BUILTINS[name]
    merged = dict(defaults)
    for key, value in (params or {}).items():
        if key not in defaults:
            raise ConfigurationError(
                f"unknown parameter {key!r} for system {name!r}"
            )
        merged[key] = float(value)
    return SystemDef(name=name, dim=dim, params=merged, field=field)


# ---------------------------------------------------------------------------
# evaluation and integration

def _check_state(system, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (system.dim,):
        raise InputError(
            f"state has shape {x.shape}, system {system.name!r} expects ({system.dim},)"
        )
    return x


def vector_field(system, x):
    """Evaluate the continuous-time field f(x) with the system's parameters."""
    if system.kind != CONTINUOUS:
        raise InputError(f"system {system.name!r} is not continuous-time")
    x = _check_state(system, x)
    out = np.asarray(system.field(x, system.params), dtype=float)
    if out.shape != x.shape:
        raise InputError(
            f"field of {system.name!r} returned shape {out.shape}, expected {x.shape}"
        )
    return out


def step(system, x, dt):
    """Advance one sample interval.

    Continuous systems take one classical RK4 step of size ``dt``; discrete
    systems apply their map once and ignore ``dt``. RK4 commutes exactly
    with any linear symmetry of an equivariant field, so this discretization
    preserves the group structure the rest of the toolkit relies on.
    """
    x = _check_state(system, x)
    if system.kind == DISCRETE:
        out = np.asarray(system.field(x, system.params), dtype=float)
        if out.shape != x.shape:
            raise InputError(
                f"map of {system.name!r} returned shape {out.shape}, expected {x.shape}"
            )
    else:
        if dt <= 0:
            raise InputError(f"dt must be positive, got {dt}")
        f, p = system.field, system.params
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = np.asarray(f(x, p), dtype=float)
            if k1.shape != x.shape:
                raise InputError(
                    f"field of {system.name!r} returned shape {k1.shape}, "
                    f"expected {x.shape}"
                )
            k2 = f(x + (0.5 * dt) * k1, p)
            k3 = f(x + (0.5 * dt) * k2, p)
            k4 = f(x + dt * k3, p)
            out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NumericalDivergenceError(
            f"non-finite state produced by {system.name!r} step"
        )
    return out


def simulate(system, x0, dt, n_steps, discard=0):
    """Integrate ``n_steps + discard`` steps and drop the first ``discard``
    states (transient removal). Returns a Trajectory of n_steps + 1 states.
    """
    x0 = _check_state(system, x0)
    if n_steps < 1:
        raise InputError("n_steps must be a positive integer")
    if discard < 0:
        raise InputError("discard must be nonnegative")
    total = n_steps + discard
    states = np.empty((total + 1, system.dim))
    states[0] = x0
    for k in range(total):
        try:
            states[k + 1] = step(system, states[k], dt)
        except NumericalDivergenceError as err:
            raise NumericalDivergenceError(
                f"{system.name!r} diverged at step {k + 1} of {total}",
                step_index=k + 1,
            ) from err
    return Trajectory(dim=system.dim, dt=float(dt), states=states[discard:])


def snapshots(traj):
    """Split a trajectory into consecutive-state pairs: Xf[:, k] is the
    successor of Xp[:, k]."""
    if traj.n_states < 2:
        raise InputError("need at least 2 states to form snapshot pairs")
    Xp = np.ascontiguousarray(traj.states[:-1].T)
    Xf = np.ascontiguousarray(traj.states[1:].T)
    return SnapshotPairs(dim=traj.dim, Xp=Xp, Xf=Xf)


def merge_snapshots(*pairs_list):
    """Concatenate snapshot pairs column-wise (e.g. a trajectory and its
    symmetry image, or several trajectories of one invariant set)."""
    if not pairs_list:
        raise InputError("nothing to merge")
    dims = {p.dim for p in pairs_list}
    if len(dims) != 1:
        raise InputError(f"mixed snapshot dimensions: {sorted(dims)}")
    return SnapshotPairs(
        dim=dims.pop(),
        Xp=np.concatenate([p.Xp for p in pairs_list], axis=1),
        Xf=np.concatenate([p.Xf for p in pairs_list], axis=1),
    )


# ---------------------------------------------------------------------------
# trajectory CSV format: header "t,x1,...,xn", time column k*dt, values
# written as shortest round-trip decimals so load(save(x)) == x exactly.

def save_trajectory(traj, path):
    with open(path, "w") as fh:
        fh.write("t," + ",".join(f"x{i + 1}" for i in range(traj.dim)) + "\n")
        for k in range(traj.n_states):
            row = [repr(float(k * traj.dt))]
            row += [repr(float(v)) for v in traj.states[k]]
            fh.write(",".join(row) + "\n")


def load_trajectory(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("t,"):
        raise ConfigurationError(f"{path}:1: expected header 't,x1,...,xn'")
    dim = len(lines[0].split(",")) - 1
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != dim + 1:
            raise ConfigurationError(
                f"{path}:{lineno}: expected {dim + 1} fields, got {len(parts)}"
            )
        try:
            rows.append([float(v) for v in parts])
        except ValueError as err:
            raise ConfigurationError(f"{path}:{lineno}: {err}") from err
    if len(rows) < 2:
        raise ConfigurationError(
            f"{path}: need at least 2 data rows to recover the sample interval"
        )
    data = np.array(rows)
    return Trajectory(dim=dim, dt=float(data[1, 0] - data[0, 0]), states=data[:, 1:])
