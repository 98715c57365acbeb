"""
Symatch Command Line Entry Point
Runs benchmarks and analyses of symmetry-matching decoders for BB codes
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .config.settings import ERROR_MESSAGES, LOG_FILE, load_user_config
from .core.belief_propagation import BPConfig, bp_convergence_study
from .core.cylinder import logical_pairs
from .core.errors import SymatchError
from .core.harness import BudgetExceeded, ExhaustSpec, SweepSpec, run_exhaustive, run_sweep
from .core.pipelines import DecoderFactory, UnknownVariant
from .core.registry import CodeRegistry, UnknownCode
from .core.symmetry import discover_symmetries_gauss
from .core.topology import anyon_analysis, unfrustrated_torus
from .utils.file_utils import FileUtilsError, emit_results
from .utils.logger import get_logger, setup_exception_logging, setup_logging


def _rates(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma separated rates, got {text!r}")


def _ints(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='symatch',
        description="Symmetry-matching decoders for bivariate bicycle codes",
    )
    parser.add_argument('--config', type=Path, help="YAML configuration overriding the defaults")
    parser.add_argument('--codes-file', type=Path, action='append', default=[],
                        help="Extra code registry YAML (repeatable)")
    parser.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    parser.add_argument('--quiet', action='store_true', help="Log to the log file only")
    parser.add_argument('--workers', type=int, default=None, help="Worker processes")

    commands = parser.add_subparsers(dest='command', required=True)

    codes = commands.add_parser('codes', help="Code registry")
    codes.add_argument('action', choices=['list'])

    commands.add_parser('decoders', help="List decoder variants")

    sweep = commands.add_parser('sweep', help="Monte Carlo logical error rate sweep")
    sweep.add_argument('--code', required=True)
    sweep.add_argument('--decoder', required=True)
    sweep.add_argument('--p', type=_rates, required=True, help="Comma separated error rates")
    sweep.add_argument('--shots', type=int, required=True)
    sweep.add_argument('--seed', type=int, default=0)
    sweep.add_argument('--counting', choices=['any-logical', 'per-logical'], default='any-logical')
    sweep.add_argument('--out', type=Path)
    sweep.add_argument('--format', choices=['json', 'csv'])

    exhaust = commands.add_parser('exhaust', help="Decode every error of a given weight")
    exhaust.add_argument('--code', required=True)
    exhaust.add_argument('--decoder', required=True)
    exhaust.add_argument('--weight', type=int, required=True)
    exhaust.add_argument('--tally', choices=['vertical', 'horizontal', 'both'], default='both')
    exhaust.add_argument('--extended', action='store_true', help="Run past the enumeration budget")
    exhaust.add_argument('--out', type=Path)
    exhaust.add_argument('--format', choices=['json', 'csv'])

    symmetries = commands.add_parser('symmetries', help="Symmetry generators of a code")
    symmetries.add_argument('--code', required=True)
    symmetries.add_argument('--logicals', action='store_true',
                            help="Also derive logical pairs with the cylinder trick")
    symmetries.add_argument('--emit', choices=['json'], help="Print the full report as JSON")

    topology = commands.add_parser('topology', help="Toric-code copies and translation actions")
    topology.add_argument('--code', required=True)
    topology.add_argument('--width', type=int)
    topology.add_argument('--torus', type=_ints, help="Explicit Lx,Ly for the symmetry count")

    study = commands.add_parser('bp-study', help="BP non-convergence counts per iteration cap")
    study.add_argument('--code', required=True)
    study.add_argument('--weight', type=int, required=True)
    study.add_argument('--caps', type=_ints, default=[10, 100, 1000])

    return parser


def _print_json(data: Any):
    print(json.dumps(data, indent=2, sort_keys=True))


def _write_or_print(document: Dict[str, Any], out: Optional[Path], fmt: Optional[str]):
    if out is None:
        _print_json(document)
    else:
        path = emit_results(document, out, fmt)
        print(f"Results written to {path}")


def _cmd_codes(args, config) -> int:
    for name, spec in sorted(CodeRegistry.get_available_codes().items()):
        print(f"{name:10s} {spec.parameters:16s} {spec.description}")
    return 0


def _cmd_decoders(args, config) -> int:
    for name, description in DecoderFactory.get_available_decoders().items():
        print(f"{name:24s} {description}")
    return 0


def _cmd_sweep(args, config) -> int:
    spec = SweepSpec(
        code=args.code,
        decoder=args.decoder,
        rates=tuple(args.p),
        shots=args.shots,
        seed=args.seed,
        counting=args.counting,
    )
    result = run_sweep(spec, config, args.workers, [str(path) for path in args.codes_file])
    _write_or_print(result.to_document(), args.out, args.format)
    return 0


def _cmd_exhaust(args, config) -> int:
    spec = ExhaustSpec(code=args.code, decoder=args.decoder, weight=args.weight, tally=args.tally)
    result = run_exhaustive(
        spec, config, args.workers, [str(path) for path in args.codes_file], extended=args.extended,
    )
    _write_or_print(result.to_document(), args.out, args.format)
    return 0


def _cmd_symmetries(args, config) -> int:
    code = CodeRegistry.create_code(args.code)
    generators = discover_symmetries_gauss(code)
    report: Dict[str, Any] = {
        'code': code.describe(),
        'symmetry_count': code.symmetry_count,
        'generators': [symmetry.to_dict() for symmetry in generators],
    }
    if args.logicals:
        max_doublings = int(config['cylinder']['max-doublings'])
        report['logical_pairs'] = [
            {'horizontal': horizontal.nonzero()[0].tolist(), 'vertical': vertical.nonzero()[0].tolist()}
            for horizontal, vertical in logical_pairs(code, max_doublings)
        ]
    if args.emit == 'json':
        _print_json(report)
        return 0

    print(f"{code.name}: {len(generators)} generators, symmetry count {code.symmetry_count}")
    for symmetry in generators:
        print(f"{symmetry.check_count:6d}  {symmetry.support}")
    for index, pair in enumerate(report.get('logical_pairs', [])):
        print(f"logical pair {index}: horizontal weight {len(pair['horizontal'])}, "
              f"vertical weight {len(pair['vertical'])}")
    return 0


def _cmd_topology(args, config) -> int:
    code = CodeRegistry.create_code(args.code)
    size = tuple(args.torus) if args.torus else None
    if size is not None and len(size) != 2:
        raise ValueError("--torus takes exactly Lx,Ly")
    settings = config['topology']
    analysis = anyon_analysis(code, width=args.width, order_cap=int(settings['order-cap']))
    torus = unfrustrated_torus(code, analysis, size)
    _print_json({
        'code': code.describe(),
        'anyons': analysis.to_dict(),
        'torus': torus._asdict(),
    })
    return 0


def _cmd_bp_study(args, config) -> int:
    code = CodeRegistry.create_code(args.code)
    counts = bp_convergence_study(code, args.weight, args.caps, BPConfig.from_dict(config['bp']))
    _print_json({'code': code.name, 'weight': args.weight,
                 'nonconverged': {str(cap): count for cap, count in counts.items()}})
    return 0


COMMANDS = {
    'codes': _cmd_codes,
    'decoders': _cmd_decoders,
    'sweep': _cmd_sweep,
    'exhaust': _cmd_exhaust,
    'symmetries': _cmd_symmetries,
    'topology': _cmd_topology,
    'bp-study': _cmd_bp_study,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point."""
    args = build_parser().parse_args(argv)

    setup_logging(log_level=args.log_level, console_output=not args.quiet)
    setup_exception_logging()
    logger = get_logger(__name__)
    logger.debug(f"Log file: {LOG_FILE}")

    try:
        config = load_user_config(args.config) if args.config else load_user_config()
        for path in args.codes_file:
            CodeRegistry.load_yaml(path)
        return COMMANDS[args.command](args, config)
    except UnknownCode as e:
        logger.error(ERROR_MESSAGES['unknown_code'].format(name=getattr(args, 'code', '')))
        logger.debug(str(e))
        return 2
    except UnknownVariant:
        logger.error(ERROR_MESSAGES['unknown_variant'].format(
            name=getattr(args, 'decoder', ''), available=list(DecoderFactory.get_available_decoders()),
        ))
        return 2
    except BudgetExceeded as e:
        logger.error(str(e))
        return 2
    except (ValueError, FileUtilsError) as e:
        logger.error(ERROR_MESSAGES['config'].format(detail=e))
        return 2
    except SymatchError as e:
        logger.error(ERROR_MESSAGES['analysis'].format(detail=e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
