"""``revkit`` command-line interface.

Exit codes: 0 success, 2 input error, 3 verification failure, 4 simulation
conflict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import warnings

from . import __version__
from .bennett import (
    bennett_embed,
    parse_dag,
    parse_schedule,
    pebble_bennett_recursive,
    pebble_exhaustive,
    verify_report_text,
    verify_schedule,
)
from .energy import (
    MechanicalParams,
    adiabatic_dissipation,
    efficiency_vs_landauer,
    in_adiabatic_regime,
    landauer_limit,
    load_params,
    ops_per_composite_for,
    ops_per_watt,
    rotary_drag_power,
    signal_energy,
)
from .errors import ParseError, RevkitError, ValidationError
from .grc import MAX_WIDTH, classify, information_loss, read_op_file, verify_no_merge
from .twolal import (
    LevelConflictError,
    build_shift_register,
    energy_summary,
    pure_delay,
    read_circuit,
    shift_register_output,
    simulate,
    write_trace,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_CONFLICT = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _header(args, target: str = "") -> str:
    parts = ["# revkit", args.command]
    if target:
        parts.append(target)
    parts.append(f"seed={args.seed}")
    return " ".join(parts)


def _overrides(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise CliError(f"--set expects key=value, got {pair!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise CliError(f"--set {key.strip()}: bad number {value!r}") from None
    return out


def _params(args, extra: dict | None = None):
    overrides = _overrides(getattr(args, "set", None))
    overrides.update(extra or {})
    return load_params(args.params, overrides)


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args) -> int:
    opfile = read_op_file(args.opfile)
    if opfile.op is None:
        raise CliError(f"{args.opfile}: no transition table")
    dist = opfile.dist
    if args.dist:
        dist = read_op_file(args.dist).dist
        if dist is None:
            raise CliError(f"{args.dist}: no distribution")
    result = {"class": str(classify(opfile.op))}
    if dist is not None:
        report = information_loss(opfile.op, dist, args.temp)
        ok, witness = verify_no_merge(opfile.op, dist)
        result.update({
            "input_entropy_bits": report.input_entropy,
            "output_entropy_bits": report.output_entropy,
            "loss_bits": report.loss,
            "temperature_K": report.temperature,
            "min_heat_J": report.min_heat,
            "no_merge": ok,
            "merge_witness": None if witness is None else
            [str(witness.first), str(witness.second), str(witness.image)],
        })
    if args.format == "json":
        _emit(args, json.dumps(result, indent=2) + "\n")
        return EXIT_OK
    lines = [_header(args, args.opfile)]
    for key, value in result.items():
        if value is None:
            continue
        if isinstance(value, list):
            value = f"{value[0]} and {value[1]} -> {value[2]}"
        elif isinstance(value, bool):
            value = str(value).lower()
        lines.append(f"{key}: {value}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_compile(args) -> int:
    with open(args.netlist) as fh:
        dag = parse_dag(fh.read(), source=args.netlist)
    schedule = bennett_embed(dag)
    out = schedule.to_text()
    code = EXIT_OK
    report_text = ""
    if args.verify:
        if schedule.width > MAX_WIDTH:
            report_text = f"verify: skipped (width {schedule.width} > {MAX_WIDTH})\n"
        else:
            report = verify_schedule(schedule, dag)
            report_text = verify_report_text(report) + "\n"
            if not report.passed:
                code = EXIT_VERIFY
    summary = f"# {len(schedule)} steps, width {schedule.width}, ancillas {schedule.n_ancillas}\n"
    if args.output:
        _emit(args, out)
        sys.stdout.write(_header(args, args.netlist) + "\n" + summary + report_text)
    else:
        sys.stdout.write(_header(args, args.netlist) + "\n" + summary + out + report_text)
    return code


def cmd_verify(args) -> int:
    with open(args.netlist) as fh:
        dag = parse_dag(fh.read(), source=args.netlist)
    with open(args.schedule) as fh:
        schedule = parse_schedule(fh.read(), source=args.schedule)
    report = verify_schedule(schedule, dag)
    sys.stdout.write(_header(args, args.schedule) + "\n" + verify_report_text(report) + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_sim(args) -> int:
    extra = {"ramp_time": args.tau} if args.tau is not None else {}
    params = _params(args, extra)
    circuit = read_circuit(args.circuit)
    tracing = bool(args.trace) or args.format == "csv"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = simulate(circuit, args.cycles, params, trace=tracing)
    summary = energy_summary(result)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            write_trace(result, fh)
    if args.format == "csv":
        write_trace(result, sys.stdout)
    elif args.format == "json":
        data = {"seed": args.seed, "circuit": args.circuit, "params": params.as_dict(), **summary.as_dict()}
        if result.outputs:
            data["outputs"] = {k: [v for _, v in reads] for k, reads in result.outputs.items()}
        sys.stdout.write(json.dumps(data, indent=2) + "\n")
    else:
        sys.stdout.write(_header(args, args.circuit) + "\n" + summary.to_text())
        for name, reads in result.outputs.items():
            bits = "".join("x" if v is None else str(v) for _, v in reads)
            sys.stdout.write(f"output {name:<16} {bits}\n")
    return EXIT_OK


def _energy_rows(args) -> list[tuple[str, float, str]]:
    extra = {"temperature": args.temp} if args.temp is not None else {}
    params = _params(args, extra)
    rows = [
        ("temperature", params.temperature, "K"),
        ("landauer_floor", landauer_limit(params.temperature), "J"),
        ("signal_energy_CV2", signal_energy(params), "J"),
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rows.append(("adiabatic_per_transition", adiabatic_dissipation(params), "J"))
    rows += [
        ("adiabatic_to_signal_ratio", params.rc / params.ramp_time, "1"),
        ("in_adiabatic_regime", float(in_adiabatic_regime(params)), "bool"),
    ]
    mech = MechanicalParams(**{k: v for k, v in (("rotary_drag", args.drag), ("frequency", args.frequency))
                               if v is not None})
    device = args.device_energy if args.device_energy is not None else mech.nand_energy
    rows += [
        ("device_energy", device, "J"),
        ("efficiency_vs_landauer", efficiency_vs_landauer(device, params.temperature), "1"),
        ("device_ops_per_watt", ops_per_watt(device), "1/J"),
    ]
    if args.flops_per_watt is not None:
        rows.append(("device_ops_per_flop", ops_per_composite_for(device, args.flops_per_watt), "1"))
    power, per_cycle = rotary_drag_power(mech)
    rows += [
        ("rotary_drag_power", power, "W"),
        ("rotary_energy_per_cycle", per_cycle, "J"),
    ]
    return rows


def cmd_energy(args) -> int:
    rows = _energy_rows(args)
    if args.format == "json":
        data = {"seed": args.seed, **{name: value for name, value, _ in rows}}
        _emit(args, json.dumps(data, indent=2) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "value", "unit"])
        for name, value, unit in rows:
            w.writerow([name, repr(value), unit])
        _emit(args, buf.getvalue())
    else:
        lines = [_header(args)]
        lines += [f"{name:<26} {value:<14.6g} {unit}" for name, value, unit in rows]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_pebble(args) -> int:
    if args.recursive is not None:
        strategy = pebble_bennett_recursive(args.n, args.recursive)
    else:
        strategy = pebble_exhaustive(args.n, args.pebbles, clean=args.clean)
    sys.stdout.write(_header(args) + "\n")
    if strategy is None:
        sys.stdout.write(f"infeasible: n={args.n} with {args.pebbles} pebbles\n")
        return EXIT_VERIFY
    sys.stdout.write(str(strategy) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    """Random shift-register patterns checked against the pure-delay oracle."""
    rng = random.Random(args.seed)
    failures = 0
    sys.stdout.write(_header(args) + "\n")
    for trial in range(args.trials):
        n = rng.randint(1, args.max_stages)
        pattern = [rng.randint(0, 1) for _ in range(rng.randint(1, args.max_length))]
        cycles = n + len(pattern)
        result = simulate(build_shift_register(n, pattern, args.ticks), cycles)
        got = shift_register_output(result.outputs)
        if got != pure_delay(pattern, n, cycles) or result.ledger.violation_events:
            failures += 1
            sys.stdout.write(f"trial {trial}: n={n} pattern={''.join(map(str, pattern))} FAIL\n")
    sys.stdout.write(f"trials {args.trials} failures {failures}\n")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="revkit", description="Reversible computing toolkit.")
    p.add_argument("--version", action="version", version=f"revkit {__version__}")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="classify a transition table; report entropy loss")
    c.add_argument("opfile")
    c.add_argument("--dist", help="distribution file (overrides one in the op file)")
    c.add_argument("--temp", type=float, help="temperature in K for the heat floor")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("compile", help="compile a netlist into a reversible schedule")
    c.add_argument("netlist")
    c.add_argument("--verify", action="store_true", help="exhaustively verify the schedule")
    c.add_argument("-o", "--output", help="write the schedule here")
    c.set_defaults(func=cmd_compile)

    c = sub.add_parser("verify", help="verify a schedule file against a netlist")
    c.add_argument("schedule")
    c.add_argument("netlist")
    c.set_defaults(func=cmd_verify)

    for name, func, helptext in (("sim", cmd_sim, "simulate a 2LAL circuit"),
                                 ("energy", cmd_energy, "figure-of-merit table")):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("--params", help="params file (default: $REVKIT_PARAMS)")
        c.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a technology parameter")
        c.set_defaults(func=func)
        if name == "sim":
            c.add_argument("circuit")
            c.add_argument("--cycles", type=int, default=1)
            c.add_argument("--tau", type=float, help="ramp time in seconds")
            c.add_argument("--trace", help="write the trace CSV here")
            c.add_argument("--format", choices=("text", "json", "csv"), default="text")
        else:
            c.add_argument("--temp", type=float, help="temperature in K")
            c.add_argument("--device-energy", type=float, help="per-op device energy in J (default 3.9e-26)")
            c.add_argument("--flops-per-watt", type=float, help="back-solve device ops per composite op")
            c.add_argument("--drag", type=float, help="rotary drag coefficient in J*s")
            c.add_argument("--frequency", type=float, help="mechanical operating frequency in Hz")
            c.add_argument("--format", choices=("text", "csv", "json"), default="text")
            c.add_argument("-o", "--output")

    c = sub.add_parser("pebble", help="reversible pebble game on a chain")
    c.add_argument("n", type=int)
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--pebbles", type=int, help="minimum-move search under this pebble budget")
    g.add_argument("--recursive", type=int, metavar="K", help="Bennett k-ary recursive strategy")
    c.add_argument("--clean", action="store_true", help="require only the last segment pebbled at the end")
    c.set_defaults(func=cmd_pebble)

    c = sub.add_parser("sweep", help="random shift-register patterns vs the pure-delay oracle")
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--max-stages", type=int, default=16)
    c.add_argument("--max-length", type=int, default=16)
    c.add_argument("--ticks", type=int, default=2, help="ticks per clock interval")
    c.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except LevelConflictError as exc:
        print(f"simulation conflict: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RevkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
