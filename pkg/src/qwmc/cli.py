"""Command-line entry point: ``qwmc <subcommand> [flags]``.

Subcommands: physics, walk, mc, iqae, scaling, compare, repro.  Every
subcommand accepts ``--config FILE``, a flat ``key = value`` file whose keys are
flag names (``shots_per_round`` or ``shots-per-round``).  Explicit flags win
over the file.  ``QWMC_THREADS`` sets the worker-thread count for scaling runs.

Random streams come from ``--seed`` through :func:`qwmc.seeding.derive_seed`.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import artifacts, baseline, estimation, physics, walk
from . import statevector as sv
from .errors import QwmcError, ValidationError
from .seeding import derive_seed

QUANTUM_SHOTS = 500_000
CLASSICAL_SHOTS = 1_000_000


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _beam_flags(p, shots=None):
    p.add_argument("--energy", type=_positive_float, default=10.0, help="photon energy, MeV")
    p.add_argument("--dx", type=_positive_float, default=1.0, help="step length, cm")
    p.add_argument("--steps", type=_positive_int, default=15)
    if shots is not None:
        p.add_argument("--shots", type=_positive_int, default=shots)
    p.add_argument("--seed", type=int, default=0)


def _iqae_flags(p):
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--shots-per-round", type=_positive_int, default=30)
    p.add_argument("--threshold", type=int, default=None,
                   help="depth the photon must pass; default: all steps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("physics", help="per-step interaction table (CSV)")
    _beam_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("walk", help="quantum-walk depth distribution (CSV)")
    _beam_flags(p, QUANTUM_SHOTS)
    p.add_argument("--out", default="dist.csv")

    p = sub.add_parser("mc", help="classical Monte Carlo depth distribution (CSV)")
    _beam_flags(p, CLASSICAL_SHOTS)
    p.add_argument("--out", default="mc.csv")

    p = sub.add_parser("iqae", help="amplitude estimate of photon survival (JSON)")
    _beam_flags(p)
    _iqae_flags(p)
    p.add_argument("--out", default="iqae.json")

    p = sub.add_parser("scaling", help="error versus query count for IQAE and sampling (CSV)")
    _beam_flags(p)
    _iqae_flags(p)
    p.add_argument("--epsilons", type=_float_list, default=list(baseline.SCALING_EPSILONS))
    p.add_argument("--reps", type=_positive_int, default=20)
    p.add_argument("--classical-reps", type=_positive_int, default=None)
    p.add_argument("--out", default="scaling.csv")

    p = sub.add_parser("compare", help="MSE and KL between two distribution CSVs (JSON)")
    p.add_argument("--a", required=True, help="distribution P")
    p.add_argument("--b", required=True, help="reference distribution Q")
    p.add_argument("--out", default="report.json")

    p = sub.add_parser("repro", help="regenerate the distribution table and scaling study")
    p.add_argument("--table1", action="store_true")
    p.add_argument("--fig5", action="store_true")
    p.add_argument("--energy", type=_positive_float, default=10.0)
    p.add_argument("--dx", type=_positive_float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")

    for p in sub.choices.values():
        p.add_argument("--config", help="key = value file of flag defaults")
    return parser


def load_config(path) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror or exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("_", "-")] = value
    return values


def _with_config(argv: list) -> list:
    """Splice config-file entries in front of the explicit flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv
    path = argv[i + 1]
    extra = []
    for key, value in load_config(path).items():
        if value.lower() in ("true", "yes", "on"):
            extra.append(f"--{key}")
        elif value.lower() not in ("false", "no", "off"):
            extra += [f"--{key}", value]
    return argv[:1] + extra + argv[1:]


def _schedule(args) -> physics.StepSchedule:
    return physics.build_schedule(physics.PhotonBeam(args.energy, args.dx, args.steps))


def _dist_rows(labels, exact, sampled):
    return [(lab, float(e), float(s)) for lab, e, s in zip(labels, exact, sampled)]


def cmd_physics(args):
    beam = physics.PhotonBeam(args.energy, args.dx, args.steps)
    schedule = physics.build_schedule(beam)
    survival = physics.cumulative_survival(schedule)
    rows = [(k, (k + 1) * beam.step_length, p, float(s))
            for k, (p, s) in enumerate(zip(schedule, survival))]
    text = artifacts.render_csv(artifacts.PHYSICS_HEADER, rows)
    if args.out:
        artifacts.emit_csv(artifacts.PHYSICS_HEADER, rows, args.out)
        mu = physics.linear_attenuation(beam.energy)
        return f"physics: mu={artifacts.format_float(mu)} /cm, {len(rows)} steps -> {args.out}"
    sys.stdout.write(text)
    return None


def quantum_distributions(schedule, shots, seed):
    """Exact statevector distribution and a sampled one from the same walk."""
    wc = walk.build_walk(schedule)
    state = sv.run(wc.circuit)
    exact = walk.extract_distribution(state, wc.layout, wc.num_steps)
    rng = np.random.default_rng(seed)
    sampled = walk.sampled_distribution(state, wc.layout, wc.num_steps, shots, rng)
    return exact, sampled


def cmd_walk(args):
    schedule = _schedule(args)
    exact, sampled = quantum_distributions(schedule, args.shots, derive_seed(args.seed, "walk"))
    rows = _dist_rows(exact.labels(), exact.as_array(), sampled.as_array())
    artifacts.emit_csv(artifacts.DIST_HEADER, rows, args.out)
    return (f"walk: {args.steps} steps, {args.shots} shots, survived exact="
            f"{exact.survived:.6f} sampled={sampled.survived:.6f} -> {args.out}")


def cmd_mc(args):
    schedule = _schedule(args)
    exact = baseline.exact_chain_distribution(schedule)
    mc = baseline.mc_transport(baseline.McConfig(schedule, args.shots,
                                                 derive_seed(args.seed, "mc")))
    rows = _dist_rows(exact.labels(), exact.as_array(), mc.as_array())
    artifacts.emit_csv(artifacts.DIST_HEADER, rows, args.out)
    return (f"mc: {args.steps} steps, {args.shots} photons, survived={mc.survived:.6f}"
            f" -> {args.out}")


def _config(args) -> estimation.IqaeConfig:
    return estimation.IqaeConfig(epsilon=args.epsilon, alpha=args.alpha,
                                 shots_per_round=args.shots_per_round)


def cmd_iqae(args):
    config = _config(args)
    schedule = _schedule(args)
    wc = walk.build_walk(schedule)
    good = estimation.survival_predicate(wc, args.threshold)
    result = estimation.iqae(wc, good, config, derive_seed(args.seed, "iqae"))
    exact = estimation.exact_amplitude(wc, good)
    payload = result.to_dict()
    payload.update({
        "steps": args.steps,
        "threshold": good.threshold,
        "shots_per_round": config.shots_per_round,
        "exact_amplitude": exact,
        "abs_error": abs(result.estimate - exact),
        "query_bound": estimation.chernoff_hoeffding_bound(config.epsilon, config.alpha),
    })
    artifacts.emit_json(payload, args.out)
    return (f"iqae: a_hat={result.estimate:.6f} in [{result.interval[0]:.6f}, "
            f"{result.interval[1]:.6f}], N_q={result.oracle_queries} -> {args.out}")


def run_scaling(schedule, epsilons, reps, seed, config, threshold=None, classical_reps=None):
    rows = baseline.scaling_experiment(schedule, epsilons, reps, seed, threshold, config,
                                       classical_replications=classical_reps)
    return rows, baseline.slopes(rows)


def cmd_scaling(args):
    config = _config(args)
    rows, slopes = run_scaling(_schedule(args), args.epsilons, args.reps,
                               derive_seed(args.seed, "scaling"), config, args.threshold,
                               args.classical_reps)
    artifacts.emit_csv(artifacts.SCALING_HEADER, rows, args.out)
    parts = ", ".join(f"{m} slope={s:.3f}" for m, s in slopes.items())
    return f"scaling: {len(rows)} rows, {parts} -> {args.out}"


def cmd_compare(args):
    labels_a, a = artifacts.read_distribution_csv(args.a)
    labels_b, b = artifacts.read_distribution_csv(args.b)
    if labels_a != labels_b:
        raise ValidationError(f"{args.a} and {args.b} have different outcome labels")
    report = baseline.compare(a, b, labels_a)
    artifacts.emit_json(report.to_dict(), args.out)
    return f"compare: mse={report.mse:.3e} kl={report.kl_divergence:.3e} -> {args.out}"


def table1(energy=10.0, dx=1.0, seed=0, steps=(15, 31), quantum_shots=QUANTUM_SHOTS,
           classical_shots=CLASSICAL_SHOTS) -> list:
    rows = []
    for n in steps:
        schedule = physics.build_schedule(physics.PhotonBeam(energy, dx, n))
        _, sampled = quantum_distributions(schedule, quantum_shots,
                                           derive_seed(seed, "table1", n, "quantum"))
        mc = baseline.mc_transport(baseline.McConfig(
            schedule, classical_shots, derive_seed(seed, "table1", n, "classical")))
        report = baseline.compare(sampled, mc)
        rows.append({"steps": n, "mse": report.mse, "kl_divergence": report.kl_divergence,
                     "kl_reverse": report.kl_reverse, "bins": report.bins})
    return rows


def cmd_repro(args):
    both = not (args.table1 or args.fig5)
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror or exc}") from None
    lines = []
    if args.table1 or both:
        rows = table1(args.energy, args.dx, args.seed)
        artifacts.emit_json({"quantum_shots": QUANTUM_SHOTS, "classical_shots": CLASSICAL_SHOTS,
                             "rows": rows}, out / "table1.json")
        artifacts.emit_csv(("steps", "mse", "kl_divergence", "kl_reverse"), rows,
                           out / "table1.csv")
        lines += [f"table1: {r['steps']} steps mse={r['mse']:.3e} kl={r['kl_divergence']:.3e}"
                  for r in rows]
    if args.fig5 or both:
        schedule = physics.build_schedule(physics.PhotonBeam(args.energy, args.dx, 15))
        rows, slopes = run_scaling(schedule, baseline.SCALING_EPSILONS, 20,
                                   args.seed, estimation.IqaeConfig())
        artifacts.emit_csv(artifacts.SCALING_HEADER, rows, out / "scaling.csv")
        artifacts.emit_json({"slopes": slopes}, out / "slopes.json")
        lines.append("fig5: " + ", ".join(f"{m} slope={s:.3f}" for m, s in slopes.items()))
    return "; ".join(lines)


COMMANDS = {
    "physics": cmd_physics,
    "walk": cmd_walk,
    "mc": cmd_mc,
    "iqae": cmd_iqae,
    "scaling": cmd_scaling,
    "compare": cmd_compare,
    "repro": cmd_repro,
}


def run(argv=None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_with_config(argv))
    except ValidationError as exc:
        print(f"qwmc: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        summary = COMMANDS[args.command](args)
    except (QwmcError, ValueError) as exc:
        print(f"qwmc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qwmc {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if summary:
        print(summary)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
