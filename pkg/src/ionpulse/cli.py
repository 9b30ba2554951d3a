"""Command-line front end.

Subcommands: ``prepare`` (run the five-pulse preparation and report the
trajectory), ``ramsey-scan`` (sample the detuning fringe and emit
CSV/JSON), ``run`` (execute a .pseq program), and ``verify`` (check the
trajectory against its closed forms over a range of ion numbers, plus a
dense-matrix spot check).

Exit codes: 0 on success, 1 when a physics check fails, 2 on usage or
parse errors.  All numbers printed here are produced by the simulation
modules; output formats are fixed so identical flags give identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from .hilbert import (
    Frame,
    SimulationError,
    StateVector,
    TrapParams,
    fock_populations,
)
from .pulses import PulseKind, PulseMode, PulseSpec, apply_pulse, dense_matrix
from .protocol import (
    RamseyConfig,
    best_ghz_fidelity,
    prepare_max_entangled,
    preparation_sequence,
    ramsey_scan,
    result_to_csv,
    result_to_json_dict,
    verify_trajectory,
)
from . import seqlang

FIDELITY_GATE = 1e-9
SCAN_GATE = 1e-9
RESIDUAL_GATE = 1e-10
ORACLE_GATE = 1e-12


def _add_trap_flags(parser: argparse.ArgumentParser, with_ions: bool = True) -> None:
    if with_ions:
        parser.add_argument("--ions", type=int, default=2, help="number of ions (default 2)")
    parser.add_argument("--nu", type=float, default=1.0, help="trap frequency (default 1)")
    parser.add_argument("--eta", type=float, default=0.1, help="Lamb-Dicke parameter (default 0.1)")
    parser.add_argument("--rabi", type=float, default=1.0, help="carrier Rabi frequency (default 1)")
    parser.add_argument("--nmax", type=int, default=4, help="Fock cutoff (default 4)")
    parser.add_argument(
        "--mode", choices=["ideal", "physical"], default="ideal", help="pulse mode (default ideal)"
    )


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", metavar="PATH", help="write data to PATH instead of stdout")
    parser.add_argument("--format", choices=["csv", "json"], default="csv", help="data format")
    parser.add_argument("--dump-state", action="store_true", help="emit the final state as JSON")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized spot checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionpulse",
        description="Simulate entangling pulse sequences on N trapped ions plus one vibrational mode.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_prep = sub.add_parser("prepare", help="run the five-pulse entangled-state preparation")
    _add_trap_flags(p_prep)
    _add_output_flags(p_prep)
    p_prep.add_argument(
        "--omega0", type=float, default=None, help="transition frequency, reported lab-frame phase only"
    )

    p_scan = sub.add_parser("ramsey-scan", help="scan the Ramsey fringe over a detuning grid")
    _add_trap_flags(p_scan)
    _add_output_flags(p_scan)
    p_scan.add_argument("--delta-min", type=float, required=True, help="first detuning of the grid")
    p_scan.add_argument("--delta-max", type=float, required=True, help="last detuning of the grid")
    p_scan.add_argument("--points", type=int, required=True, help="number of grid points")
    p_scan.add_argument("--wait", type=float, required=True, help="free evolution time T")
    if hasattr(p_scan, "_negative_number_matcher"):
        # stock argparse does not treat "-2e-5" as a number, only "-2" or "-2.0"
        p_scan._negative_number_matcher = re.compile(r"^-(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?$")

    p_run = sub.add_parser("run", help="execute a .pseq pulse program")
    p_run.add_argument("file", help="program file (.pseq)")
    _add_output_flags(p_run)

    p_verify = sub.add_parser("verify", help="check trajectories against their closed forms")
    _add_trap_flags(p_verify, with_ions=False)
    _add_output_flags(p_verify)
    p_verify.add_argument("--ions-min", type=int, default=1, help="first ion count (default 1)")
    p_verify.add_argument("--ions-max", type=int, default=8, help="last ion count (default 8)")
    p_verify.add_argument("--tamper-step", type=int, default=None, help=argparse.SUPPRESS)
    return parser


def _params_from_args(args: argparse.Namespace, parser: argparse.ArgumentParser, n_ions: int | None = None) -> TrapParams:
    try:
        return TrapParams(
            n_ions=n_ions if n_ions is not None else args.ions,
            trap_freq=args.nu,
            lamb_dicke=args.eta,
            base_rabi=args.rabi,
            fock_cutoff=args.nmax,
        )
    except ValueError as exc:
        parser.error(str(exc))
        raise AssertionError("unreachable")  # pragma: no cover


def _write_data(text: str, args: argparse.Namespace) -> bool:
    """Write payload to --output or stdout; True when it went to a file."""
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
        return True
    sys.stdout.write(text)
    return False


def _print_step_table(rows: list[tuple[int, str, float, float, list[float]]]) -> None:
    for index, kind, clock, norm, populations in rows:
        pops = ",".join(f"{p:.6f}" for p in populations)
        print(f"step {index}  {kind:<12s} t={clock:.15g}  norm={norm:.12f}  fock=[{pops}]")


def _maybe_dump_state(state: StateVector, args: argparse.Namespace) -> None:
    if not getattr(args, "dump_state", False):
        return
    payload = state.dump_json() + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)


def cmd_prepare(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params_from_args(args, parser)
    mode = PulseMode(args.mode)
    report = prepare_max_entangled(params, mode, omega0=args.omega0)
    print(f"fidelity: {report.fidelity_vs_target:.12f}")
    if report.phi_schroedinger is not None:
        print(f"phi: {report.phi_schroedinger:.15g}")
    rows = [
        (
            i + 1,
            spec.kind.value,
            state.clock,
            state.norm(),
            [float(x) for x in fock_populations(state)],
        )
        for i, (spec, state) in enumerate(zip(preparation_sequence(params, mode), report.step_states))
    ]
    _print_step_table(rows)
    _maybe_dump_state(report.final_state, args)
    return 0 if report.fidelity_vs_target >= 1.0 - FIDELITY_GATE else 1


def cmd_ramsey_scan(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _params_from_args(args, parser)
    if args.points < 1:
        parser.error(f"--points must be >= 1, got {args.points}")
    if args.wait < 0:
        parser.error(f"--wait must be >= 0, got {args.wait}")
    if args.points == 1:
        grid = np.array([args.delta_min])
    else:
        grid = np.linspace(args.delta_min, args.delta_max, args.points)
    config = RamseyConfig(
        params=params,
        wait_time=args.wait,
        detuning_grid=tuple(float(d) for d in grid),
        mode=PulseMode(args.mode),
    )
    result = ramsey_scan(config)
    if args.format == "json":
        payload = json.dumps(result_to_json_dict(result)) + "\n"
    else:
        payload = result_to_csv(result)
    to_file = _write_data(payload, args)
    summary = f"max_abs_error: {result.max_abs_error:.14e}"
    print(summary) if to_file else print(summary, file=sys.stderr)
    return 0 if result.max_abs_error <= SCAN_GATE else 1


def cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    program, diagnostics = seqlang.parse(source)
    for diag in diagnostics:
        print(str(diag), file=sys.stderr)
    if program is None:
        return 2
    try:
        final, trace = seqlang.execute(program)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fid, _ = best_ghz_fidelity(final)
    if args.format == "json":
        data = {
            "steps": [
                {
                    "step": t.index,
                    "kind": t.kind,
                    "clock": t.clock,
                    "norm": t.norm,
                    "fock_populations": t.fock_populations,
                }
                for t in trace
            ],
            "fidelity": fid,
        }
        if args.dump_state:
            data["final_state"] = final.to_dump()
        _write_data(json.dumps(data) + "\n", args)
        return 0
    print(f"fidelity: {fid:.12f}")
    _print_step_table([(t.index, t.kind, t.clock, t.norm, t.fock_populations) for t in trace])
    _maybe_dump_state(final, args)
    return 0


def _oracle_spot_check(seed: int) -> float:
    """Dense-matrix vs matrix-free application on a few random states."""
    rng = np.random.default_rng(seed)
    params = TrapParams(n_ions=2, trap_freq=1.0, lamb_dicke=0.1, base_rabi=1.0, fock_cutoff=3)
    specs = [
        PulseSpec(PulseKind.CARRIER_PI_HALF, target_ion=2),
        PulseSpec(PulseKind.JC_PI, target_ion=2, target_n=0, mode=PulseMode.PHYSICAL),
        PulseSpec(PulseKind.DISPERSIVE_SINGLE_PI, target_ion=2, target_n=1, mode=PulseMode.PHYSICAL),
        PulseSpec(PulseKind.DISPERSIVE_COLLECTIVE_PI, target_n=1, mode=PulseMode.PHYSICAL),
    ]
    worst = 0.0
    for spec in specs:
        matrix = dense_matrix(spec, params, t0=0.0)
        for _ in range(5):
            vec = rng.standard_normal(params.dim) + 1j * rng.standard_normal(params.dim)
            vec /= np.linalg.norm(vec)
            state = StateVector(vec.copy(), params, Frame(), clock=0.0)
            apply_pulse(state, spec, check_leakage=False)
            worst = max(worst, float(np.max(np.abs(state.amplitudes - matrix @ vec))))
    return worst


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.ions_min < 1 or args.ions_max < args.ions_min:
        parser.error("require 1 <= --ions-min <= --ions-max")
    ok = True
    for n in range(args.ions_min, args.ions_max + 1):
        params = _params_from_args(args, parser, n_ions=n)
        report = prepare_max_entangled(params, PulseMode(args.mode))
        if args.tamper_step is not None and 1 <= args.tamper_step <= len(report.step_states):
            tampered = report.step_states[args.tamper_step - 1]
            tampered.blocks[1:] *= np.exp(0.01j)
        check = verify_trajectory(report, tolerance=RESIDUAL_GATE)
        residuals = " ".join(f"{r:.3e}" for r in check.residuals)
        status = "ok" if check.passed else "FAIL"
        print(f"N={n}  residuals: {residuals}  max={max(check.residuals):.3e}  {status}")
        ok = ok and check.passed
    worst = _oracle_spot_check(args.seed)
    oracle_ok = worst <= ORACLE_GATE
    print(f"oracle check: max deviation {worst:.3e} (seed {args.seed})  {'ok' if oracle_ok else 'FAIL'}")
    print(f"all residuals within {RESIDUAL_GATE:.1e}: {'PASS' if ok and oracle_ok else 'FAIL'}")
    return 0 if ok and oracle_ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    handlers = {
        "prepare": cmd_prepare,
        "ramsey-scan": cmd_ramsey_scan,
        "run": cmd_run,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args, parser)
    except SystemExit as exc:  # parser.error inside handlers
        return int(exc.code) if exc.code is not None else 0
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:  # pragma: no cover - console-script shim
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
