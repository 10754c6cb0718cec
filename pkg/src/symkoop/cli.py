"""Command-line surface: simulate, fit, transport, assemble, spectrum,
verify, and group check.

Exit codes: 0 success, 1 check failure, 2 configuration or parse error,
3 numerical divergence. Values in a config JSON (via --config) fill in any
flag left at its default; explicit flags win. Every JSON output embeds the
resolved configuration for provenance.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dictionaries, dynamics, equivariant, groups, koopman, scenarios
from .errors import (
    ConfigurationError,
    DictionaryNotClosedError,
    InputError,
    NumericalDivergenceError,
    SymkoopError,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigurationError(f"cannot read config {path}: {err}") from err
    if not isinstance(cfg, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return cfg


def _resolve(args, config, key, default=None):
    """flag > config file > default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    return config.get(key, default)


def _parse_json_flag(text, what):
    if text is None:
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"invalid JSON for {what}: {err}") from err


def _parse_state(text, dim=None):
    try:
        x = np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError as err:
        raise ConfigurationError(f"invalid state {text!r}: {err}") from err
    if dim is not None and x.shape != (dim,):
        raise ConfigurationError(
            f"state {text!r} has {len(x)} components, system expects {dim}"
        )
    return x


def _require_readable(path, what):
    if path is None:
        raise ConfigurationError(f"missing required {what}")
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"{what} {path!r} does not exist or is not a file")
    return p


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(args):
    config = _load_config(args.config)
    name = _resolve(args, config, "system")
    if name is None:
        raise ConfigurationError("simulate needs --system")
    params = _parse_json_flag(_resolve(args, config, "params"), "--params")
    system = dynamics.make_system(name, params)
    dt = float(_resolve(args, config, "dt", dynamics.DEFAULT_DT[name]))
    steps = int(_resolve(args, config, "steps", 500))
    discard = int(_resolve(args, config, "discard", 0))
    seed = int(_resolve(args, config, "seed", 0))
    outdir = Path(_resolve(args, config, "out", "."))
    outdir.mkdir(parents=True, exist_ok=True)

    starts = [_parse_state(text, system.dim) for text in (args.x0 or [])]
    n_random = int(_resolve(args, config, "random_starts", 0))
    if n_random:
        starts.extend(scenarios.sample_box(name, n_random, np.random.default_rng(seed)))
    if not starts and not args.emit_phase_portrait:
        raise ConfigurationError("simulate needs --x0 (repeatable) or --random-starts")

    for i, x0 in enumerate(starts):
        traj = dynamics.simulate(system, x0, dt, steps, discard)
        path = outdir / f"{name}_traj{i:02d}.csv"
        dynamics.save_trajectory(traj, path)
        final = traj.states[-1]
        line = (
            f"{path}: {steps} steps, dt={dt}, final state "
            + "(" + ", ".join(f"{v:.6g}" for v in final) + ")"
        )
        if name == "hamiltonian":
            drift = abs(
                dynamics.hamiltonian_energy(*traj.states[-1])
                - dynamics.hamiltonian_energy(*traj.states[0])
            )
            line += f", energy drift {drift:.3e}"
        print(line)

    if args.emit_phase_portrait:
        _emit_phase_portrait(system, dt, args.emit_phase_portrait)
    return EXIT_OK


def _emit_phase_portrait(system, dt, path):
    """Plot-ready CSV (traj_id,t,x1..xn): a fan of trajectories covering the
    regions of the phase portrait. No rendering happens in-process."""
    rng = np.random.default_rng(0)
    name = system.name
    runs = []
    if name == "toggle_switch":
        for x0 in scenarios.sample_box(name, 14, rng):
            runs.append((x0, 400, 0))
        runs.append((np.array([0.5, 0.5]), 400, 0))   # separatrix segment
        runs.append((np.array([2.5, 2.5]), 400, 0))
    elif name == "lorenz":
        runs.append((np.array([1.0, 1.0, 1.05]), 5000, 500))
        runs.append((np.array([-1.0, -1.0, 1.05]), 5000, 500))
    elif name == "hamiltonian":
        for x0 in ([2.0, 0.0], [2.6, 0.0], [3.3, 0.0], [3.9, 0.0]):
            base = np.array(x0)
            for g in groups.builtin_group(name).elements:
                runs.append((g.matrix @ base, 1200, 0))
    else:
        raise ConfigurationError(f"no phase portrait recipe for {name!r}")
    with open(path, "w") as fh:
        fh.write(
            "traj_id,t," + ",".join(f"x{i + 1}" for i in range(system.dim)) + "\n"
        )
        for tid, (x0, steps, discard) in enumerate(runs):
            traj = dynamics.simulate(system, x0, dt, steps, discard)
            for k in range(traj.n_states):
                row = [str(tid), repr(k * dt)]
                row += [repr(float(v)) for v in traj.states[k]]
                fh.write(",".join(row) + "\n")
    print(f"wrote phase portrait data to {path}")


def cmd_fit(args):
    config = _load_config(args.config)
    traj_path = _require_readable(_resolve(args, config, "traj"), "trajectory CSV")
    traj = dynamics.load_trajectory(traj_path)
    dict_spec = _parse_json_flag(
        _resolve(args, config, "dictionary"), "--dictionary"
    ) or {"kind": "identity"}
    dictionary = dictionaries.dictionary_from_spec(dict_spec, dim=traj.dim)
    rank_tol = float(_resolve(args, config, "rank_tol", koopman.DEFAULT_RANK_TOL))
    set_label = _resolve(args, config, "set_label", "fit")
    op = koopman.fit_trajectory(traj, dictionary, rank_tol, set_label=set_label)
    payload = koopman.operator_to_dict(op)
    payload["config"] = {
        "traj": str(traj_path),
        "dictionary": dictionary.to_spec(),
        "rank_tol": rank_tol,
        "set_label": set_label,
    }
    _write_json(_resolve(args, config, "out", "operator.json"), payload)
    ev = np.linalg.eigvals(op.matrix)
    print(f"fit residual {op.fit_residual:.3e}, rank {op.rank_used}/{op.size}")
    print("eigenvalues:", ", ".join(f"{v:.6g}" for v in ev))
    return EXIT_OK


def _load_operator_checked(path):
    return koopman.load_operator(_require_readable(path, "operator JSON"))


def cmd_transport(args):
    config = _load_config(args.config)
    op = _load_operator_checked(_resolve(args, config, "operator"))
    group = groups.load_group(_require_readable(_resolve(args, config, "group"), "group JSON"))
    element_label = _resolve(args, config, "element")
    if element_label is None:
        raise ConfigurationError("transport needs --element")
    g = group.element(element_label)
    dict_spec = _resolve(args, config, "dictionary")
    dictionary = (
        dictionaries.dictionary_from_spec(_parse_json_flag(dict_spec, "--dictionary"),
                                          dim=group.dim)
        if dict_spec else op.dictionary
    )
    seed = int(_resolve(args, config, "seed", 0))
    rep = dictionaries.induced_representation(dictionary, g, seed=seed)
    target = _resolve(args, config, "target_label") or f"{op.set_label}:{element_label}"
    transported = equivariant.transport_case1(op, rep, target_label=target)
    payload = koopman.operator_to_dict(transported)
    payload["config"] = {
        "operator": str(_resolve(args, config, "operator")),
        "group": str(_resolve(args, config, "group")),
        "element": element_label,
        "seed": seed,
    }
    _write_json(_resolve(args, config, "out", "transported.json"), payload)
    return EXIT_OK


def cmd_assemble(args):
    config = _load_config(args.config)
    registry = equivariant.load_registry(
        _require_readable(_resolve(args, config, "registry"), "registry JSON")
    )
    base = _load_operator_checked(_resolve(args, config, "base_operator"))
    group = groups.load_group(
        _require_readable(_resolve(args, config, "group"), "group JSON")
    )
    seed = int(_resolve(args, config, "seed", 0))
    reps = {}
    for label, element_label in registry.mapping.items():
        try:
            g = group.element(element_label)
        except InputError as err:
            raise ConfigurationError(
                f"registry maps {label!r} through unknown element {element_label!r}"
            ) from err
        reps[label] = dictionaries.induced_representation(
            base.dictionary, g, seed=seed
        )
    gk = equivariant.assemble_global(registry, base, reps)
    payload = equivariant.global_to_dict(gk)
    payload["config"] = {
        "registry": str(_resolve(args, config, "registry")),
        "base_operator": str(_resolve(args, config, "base_operator")),
        "group": str(_resolve(args, config, "group")),
        "seed": seed,
    }
    _write_json(_resolve(args, config, "out", "global.json"), payload)
    print(f"{'label':<12} {'size':>4} {'origin':<12} {'residual':>10}")
    for label, op in gk.blocks:
        origin = "transported" if op.is_transported else "fitted"
        print(f"{label:<12} {op.size:>4} {origin:<12} {op.fit_residual:>10.3e}")
    return EXIT_OK


def cmd_spectrum(args):
    config = _load_config(args.config)
    op = _load_operator_checked(_resolve(args, config, "operator"))
    spec = koopman.spectrum(op)
    for i, lam in enumerate(spec.eigenvalues):
        print(f"lambda_{i}: {lam.real:+.9g} {lam.imag:+.9g}i  |lambda|={abs(lam):.9g}")
    out = _resolve(args, config, "out")
    if out:
        _write_json(out, {"set_label": op.set_label,
                          "eigenvalues": koopman.spectrum_to_list(spec)})
    return EXIT_OK


def cmd_verify(args):
    config = _load_config(args.config)
    if args.list:
        for name in scenarios.check_names():
            print(name)
        return EXIT_OK
    names = _resolve(args, config, "checks")
    if names is not None:
        names = [n for n in str(names).split(",") if n]
        unknown = set(names) - set(scenarios.check_names())
        if unknown:
            raise ConfigurationError(f"unknown checks: {sorted(unknown)}")
        if not names:
            print("warning: no checks run")
            return EXIT_OK
    results = scenarios.run_verification(names)
    if not results:
        print("warning: no checks run")
        return EXIT_OK
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {result.name}: {result.detail}")
    out = _resolve(args, config, "out")
    if out:
        _write_json(out, {
            "all_passed": all(r.passed for r in results),
            "checks": [r.to_dict() for r in results],
        })
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def cmd_group_check(args):
    config = _load_config(args.config)
    group = groups.load_group(
        _require_readable(_resolve(args, config, "group"), "group JSON")
    )
    report = groups.check_axioms(group)
    print(f"order {report['order']}: " + ", ".join(
        f"{axiom}={'ok' if report[axiom] else 'FAIL'}"
        for axiom in ("closure", "identity", "inverses", "associativity")
    ))
    out = _resolve(args, config, "out")
    if out:
        _write_json(out, report)
    return EXIT_OK if report["ok"] else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="symkoop",
        description="Koopman operators for symmetric dynamical systems: "
                    "fit locally, transport globally by group conjugation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("simulate", help="integrate a built-in system to CSV")
    common(p)
    p.add_argument("--system", choices=dynamics.system_names())
    p.add_argument("--params", help="JSON parameter overrides")
    p.add_argument("--x0", action="append", help="initial state 'a,b,...' (repeatable)")
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--discard", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--random-starts", dest="random_starts", type=int)
    p.add_argument("--emit-phase-portrait", dest="emit_phase_portrait",
                   help="write plot-ready portrait CSV to this path")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("fit", help="fit a Koopman operator from a trajectory CSV")
    common(p)
    p.add_argument("--traj")
    p.add_argument("--dictionary", help='e.g. {"kind": "monomial", "max_degree": 2}')
    p.add_argument("--rank-tol", dest="rank_tol", type=float)
    p.add_argument("--set-label", dest="set_label")
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("transport", help="conjugate an operator across symmetry")
    common(p)
    p.add_argument("--operator")
    p.add_argument("--group")
    p.add_argument("--element")
    p.add_argument("--dictionary", help="override the operator's dictionary spec")
    p.add_argument("--target-label", dest="target_label")
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=cmd_transport)

    p = sub.add_parser("assemble", help="build the global block-diagonal operator")
    common(p)
    p.add_argument("--registry")
    p.add_argument("--base-operator", dest="base_operator")
    p.add_argument("--group")
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=cmd_assemble)

    p = sub.add_parser("spectrum", help="eigenvalues and eigenfunction coefficients")
    common(p)
    p.add_argument("--operator")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("verify", help="run the built-in verification scenarios")
    common(p)
    p.add_argument("--checks", help="comma-separated check names (default: all)")
    p.add_argument("--list", action="store_true", help="list check names and exit")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("group", help="group-file utilities")
    gsub = p.add_subparsers(dest="group_command", required=True)
    pc = gsub.add_parser("check", help="verify group axioms from a group JSON")
    common(pc)
    pc.add_argument("--group")
    pc.set_defaults(fn=cmd_group_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DictionaryNotClosedError as err:
        print(f"error: {err}\nhint: raise the monomial max_degree so the "
              "dictionary spans a group-invariant space", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalDivergenceError as err:
        where = f" (step {err.step_index})" if err.step_index is not None else ""
        print(f"error: numerical divergence{where}: {err}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ConfigurationError, InputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SymkoopError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
