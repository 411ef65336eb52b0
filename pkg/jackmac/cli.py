"""``jackmac`` command-line front end.

Exit status is 0 on success, 1 when a verification suite finds a mismatch,
and 2 for usage errors, malformed inputs and I/O failures.
"""

import sys
import json
import logging
import argparse

from dataclasses import replace
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np

from .csm import Grouping, MacDesign, inventory, structure_report
from .datapath import Mode, ModeName
from .exceptions import ConfigError, FormatMismatchError, JackMacError
from .formats import EncodedTensor, FormatDescriptor, PRESETS as FORMAT_PRESETS, decode_tensor, encode_tensor
from .jackunit import JackUnit
from .oracle import relative_errors
from .settings import debug_enabled
from .simkernel import (
    ArrayConfig,
    PRESETS as ARRAY_PRESETS,
    WorkloadSpec,
    atomic_write_text,
    compare_modes,
    conv_execute,
    estimate_cycles,
    gemm_execute,
    read_csv,
    read_tensor,
    read_values,
    write_tensor,
)
from .verify import SUITES, run_suite


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _print_json(payload: dict):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _print_table(rows: Sequence[Sequence[str]]):
    width = max(len(row[0]) for row in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}")


def _split(text: str) -> List[str]:
    items = [item.strip() for item in text.split(",")]
    if not all(items):
        raise ConfigError(f"malformed list {text!r}")

    return items


def _load_config(value: Optional[str]) -> ArrayConfig:
    if value is None:
        return ArrayConfig.preset("jack")

    if value.lower() in ARRAY_PRESETS:
        return ArrayConfig.preset(value)

    return ArrayConfig.from_json(Path(value).read_text("utf-8"))


def _load_operand(path: str, mode: Mode) -> EncodedTensor:
    """JKT1 codes in the mode's element format, or FP32 values to quantize."""
    if path.lower().endswith(".csv"):
        values = read_csv(path)
    else:
        values = read_tensor(path, mode.block_size if mode.is_mx else None)

    if isinstance(values, EncodedTensor):
        if values.format != mode.element_format:
            raise FormatMismatchError(f"{path} holds {values.format}, mode {mode} takes {mode.element_format}")

        return values

    return encode_tensor(np.asarray(values, dtype=np.float64), mode.element_format)


def _write_report(path: Optional[str], payload: dict):
    if path is not None:
        atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_quantize(args) -> int:
    fmt = FormatDescriptor.preset(args.format)
    if args.block_size is not None:
        fmt = fmt.with_block_size(args.block_size)

    values = read_values(args.input)
    tensor = encode_tensor(np.asarray(values, dtype=np.float64), fmt)
    decoded = decode_tensor(tensor)
    stats = relative_errors(decoded, values, floor=0.0)

    write_tensor(args.out, decoded if args.dequantize else tensor)
    logger.debug("quantized %s to %s into %s", args.input, fmt, args.out)

    if args.json:
        _print_json(
            {"format": str(fmt), "shape": list(tensor.shape), "out": args.out, "errors": stats.to_dict()}
        )
    else:
        _print_table(
            [
                ["format", str(fmt)],
                ["shape", "x".join(str(d) for d in tensor.shape)],
                ["max rel err", f"{stats.max:.6g}"],
                ["mean rel err", f"{stats.mean:.6g}"],
                ["median rel err", f"{stats.median:.6g}"],
            ]
        )

    return EXIT_OK


def cmd_mac(args) -> int:
    builder = JackUnit.mac(args.mode)
    if args.block_size is not None:
        builder.block_size(args.block_size)

    if args.bits:
        builder.x_bits(*(int(v, 0) for v in _split(args.x)), shared_exponent=args.shared_x)
        builder.w_bits(*(int(v, 0) for v in _split(args.w)), shared_exponent=args.shared_w)
    else:
        builder.x(*(float(v) for v in _split(args.x)))
        builder.w(*(float(v) for v in _split(args.w)))

    if args.acc is not None:
        if args.bits:
            builder.acc_bits(int(args.acc, 0))
        else:
            builder.acc(float(args.acc))

    result = builder.grouped(not args.ungrouped).run()

    if args.json:
        _print_json(result.to_dict())
        return EXIT_OK

    _print_table(
        [
            ["mode", str(result.mode)],
            ["output", f"0x{result.output.bits:04x} ({result.output.format})"],
            ["value", repr(result.value)],
            ["e_max", str(result.e_max)],
            ["raw accumulator", str(result.raw_accumulator)],
            ["active submodules", ", ".join(sorted(s.value for s in result.active_submodules.submodules))],
            ["saturated", str(result.saturated).lower()],
            ["flushed", str(result.flushed).lower()],
        ]
    )

    return EXIT_OK


def _finish_execute(args, result: EncodedTensor, report) -> int:
    write_tensor(args.out, result)
    _write_report(args.report, report.to_dict())

    if args.json:
        _print_json(report.to_dict())
    else:
        _print_table(report.summary() + [["checksum", report.result_checksum]])

    return EXIT_OK


def cmd_gemm(args) -> int:
    cfg = _load_config(args.config)
    mode = Mode.of(args.mode, args.block_size)

    a = _load_operand(args.a, mode)
    w = _load_operand(args.w, mode)
    result, report = gemm_execute(a, w, cfg, mode)

    return _finish_execute(args, result, report)


def cmd_conv(args) -> int:
    cfg = _load_config(args.config)
    mode = Mode.of(args.mode, args.block_size)

    x = _load_operand(args.x, mode)
    w = _load_operand(args.w, mode)
    result, report = conv_execute(x, w, cfg, mode, args.stride)

    return _finish_execute(args, result, report)


def cmd_simulate(args) -> int:
    spec = WorkloadSpec.from_json(Path(args.workload).read_text("utf-8"))
    cfg = _load_config(args.config)
    if args.no_memory:
        cfg = cfg.with_(memory_model=False)

    report = estimate_cycles(spec, cfg)
    _write_report(args.out, report.to_dict())

    comparison = None
    if args.compare is not None:
        other = replace(spec, mode=Mode.of(args.compare).name.value)
        comparison = compare_modes(other, spec, cfg)

    if args.json:
        _print_json(comparison.to_dict() if comparison else report.to_dict())
        return EXIT_OK

    _print_table(report.summary())
    if comparison is not None:
        print()
        _print_table(
            [
                [f"speedup over {comparison.label_a}", f"{comparison.speedup:.2f}x"],
                ["compute-only speedup", f"{comparison.compute_speedup:.2f}x"],
                ["multiplier ratio", f"{comparison.multiplier_ratio:.2f}x"],
            ]
        )

    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    status = EXIT_OK

    for name in names:
        result = run_suite(name, args.trials, args.seed)

        if args.json:
            _print_json(result.to_dict())
        else:
            verdict = "ok" if result.passed else "FAILED"
            print(f"{name}: {verdict} ({result.cases} cases, {result.failures} failures, seed {result.seed})")
            if result.counterexample:
                print(f"  counterexample: {result.counterexample}")

        if not result.passed:
            status = EXIT_FAILED

    return status


def cmd_report(args) -> int:
    if args.inventory:
        _print_json(inventory(args.design).to_dict())
    else:
        _print_json(structure_report(args.grouping, args.lanes).to_dict())

    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jackmac", description="Jack MAC unit model and array simulator")
    commands = parser.add_subparsers(dest="command", metavar="command", required=True)

    modes = [m.value for m in ModeName]

    quantize = commands.add_parser("quantize", help="quantize FP32 values into a target format")
    quantize.add_argument("--in", dest="input", required=True, help="FP32 JKT1 tensor or CSV file")
    quantize.add_argument("--format", required=True, choices=list(FORMAT_PRESETS))
    quantize.add_argument("--out", required=True)
    quantize.add_argument("--block-size", type=int, default=None)
    quantize.add_argument("--dequantize", action="store_true", help="write the FP32 decode instead of codes")
    quantize.add_argument("--json", action="store_true")
    quantize.set_defaults(handler=cmd_quantize)

    mac = commands.add_parser("mac", help="run one lane set through the unit")
    mac.add_argument("--mode", required=True, choices=modes)
    mac.add_argument("--x", required=True, help="comma-separated activations")
    mac.add_argument("--w", required=True, help="comma-separated weights")
    mac.add_argument("--acc", default=None, help="incoming 16-bit partial sum")
    mac.add_argument("--bits", action="store_true", help="read lists and --acc as raw code patterns")
    mac.add_argument("--shared-x", type=int, default=0, help="activation shared exponent with --bits")
    mac.add_argument("--shared-w", type=int, default=0, help="weight shared exponent with --bits")
    mac.add_argument("--block-size", type=int, default=None)
    mac.add_argument("--ungrouped", action="store_true", help="use one shifter per sub-multiplier")
    mac.add_argument("--json", action="store_true")
    mac.set_defaults(handler=cmd_mac)

    gemm = commands.add_parser("gemm", help="C = A . W^T on the simulated array")
    gemm.add_argument("--a", required=True)
    gemm.add_argument("--w", required=True)
    conv = commands.add_parser("conv", help="valid HWC convolution on the simulated array")
    conv.add_argument("--x", required=True)
    conv.add_argument("--w", required=True)
    conv.add_argument("--stride", type=int, default=1)

    for sub, handler in ((gemm, cmd_gemm), (conv, cmd_conv)):
        sub.add_argument("--mode", required=True, choices=modes)
        sub.add_argument("--block-size", type=int, default=None)
        sub.add_argument("--config", default=None, help="preset name or ArrayConfig JSON file")
        sub.add_argument("--out", required=True)
        sub.add_argument("--report", default=None, help="write the SimReport JSON here")
        sub.add_argument("--json", action="store_true")
        sub.set_defaults(handler=handler)

    simulate = commands.add_parser("simulate", help="estimate cycles for a workload")
    simulate.add_argument("--workload", required=True, help="WorkloadSpec JSON file")
    simulate.add_argument("--config", default=None, help="preset name or ArrayConfig JSON file")
    simulate.add_argument("--out", default=None)
    simulate.add_argument("--compare", default=None, choices=modes, help="report the speedup over this mode")
    simulate.add_argument("--no-memory", action="store_true", help="compute cycles only")
    simulate.add_argument("--json", action="store_true")
    simulate.set_defaults(handler=cmd_simulate)

    verify = commands.add_parser("verify", help="run a property suite")
    verify.add_argument("--suite", required=True, choices=list(SUITES) + ["all"])
    verify.add_argument("--trials", type=int, default=None)
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--json", action="store_true")
    verify.set_defaults(handler=cmd_verify)

    report = commands.add_parser("report", help="structural counts")
    kind = report.add_mutually_exclusive_group(required=True)
    kind.add_argument("--structure", action="store_true")
    kind.add_argument("--inventory", action="store_true")
    report.add_argument("--grouping", default=Grouping.GROUPED_2D.value, choices=[g.value for g in Grouping])
    report.add_argument("--lanes", type=int, default=16, choices=[4, 16])
    report.add_argument("--design", default=MacDesign.JACK.value, choices=[d.value for d in MacDesign])
    report.set_defaults(handler=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=logging.DEBUG if debug_enabled() else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (JackMacError, ValueError, OSError) as e:
        print(f"jackmac: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
