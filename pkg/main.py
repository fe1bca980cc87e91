"""
Main script for dblcat-fibrations
Batch front end: certification commands, corpus generation, diagram export
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Load environment variables
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

current_dir = Path(__file__).parent.absolute()
if str(current_dir) not in sys.path:
    sys.path.insert(0, str(current_dir))

from dblcat_fibrations import __version__
from dblcat_fibrations.config import load_settings
from dblcat_fibrations.constants import EXIT_IO_ERROR, EXIT_OK, FIBRATION_KINDS
from dblcat_fibrations.bisimp import ZigZag
from dblcat_fibrations.reflect import REFLECTIONS
from dblcat_fibrations.workbench import FibrationWorkbench

logger = logging.getLogger("dblcat_fibrations")


def create_env_template(path: str = ".env") -> bool:
    """
    Create example .env file with every setting

    Returns:
        bool: True if created successfully
    """
    env_template = """# ================================
# DBLCAT-FIBRATIONS - CONFIGURATION
# ================================

# Maximum number of cells any single enumeration may produce
DBLCAT_MAX_CELLS=1000000

# Comparison mode: iso (strict isomorphisms) or equiv (equivalences, for non-gaunt input)
DBLCAT_MODE=iso

# Kernel comparison window "M,N"
DBLCAT_WINDOW=3,3

# Re-check unique lifts of composable pairs (slower)
DBLCAT_PARANOID=false

# DEBUG, INFO, WARNING, ERROR
DBLCAT_LOG_LEVEL=WARNING

# ================================
# CORPUS GENERATION
# ================================

DBLCAT_CORPUS_SIZE=200
DBLCAT_BASE_OBJECTS=6
"""
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(env_template)
        print(f"{path} file created successfully", file=sys.stderr)
        return True
    except OSError as e:
        print(f"Error creating {path} file: {e}", file=sys.stderr)
        return False


def library_status() -> Dict[str, Optional[str]]:
    """Installed versions of the libraries the package uses (None when missing)"""
    status = {}
    for name, module in (("pydantic", "pydantic"), ("tqdm", "tqdm"), ("python-dotenv", "dotenv")):
        try:
            imported = __import__(module)
            status[name] = getattr(imported, "__version__", "installed")
        except ImportError:
            status[name] = None
    return status


def show_system_info(workbench: FibrationWorkbench) -> Dict[str, Any]:
    info = workbench.get_info()
    info['libraries'] = library_status()
    return info


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--mode', choices=['iso', 'equiv'], default=None,
                        help='Comparison mode (default: DBLCAT_MODE or iso)')
    common.add_argument('--window', nargs=2, type=int, metavar=('M', 'N'), default=None,
                        help='Kernel comparison window (default: DBLCAT_WINDOW or 3 3)')
    common.add_argument('--max-cells', type=int, default=None,
                        help='Enumeration cap per command (default: DBLCAT_MAX_CELLS or 10^6)')
    common.add_argument('--paranoid', action='store_true', default=None,
                        help='Run degree-2 re-checks in fibration certificates')
    common.add_argument('--out', type=str, default=None, help='Output file or directory')
    common.add_argument('--verbose', '-v', action='store_true', help='Log at INFO level')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="dblcat-fib",
        description="dblcat-fibrations - certify fibrations of finite double categories"
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--create-env', action='store_true', help='Create example .env file')
    parser.add_argument('--info', action='store_true', help='Show versions and settings')
    commands = parser.add_subparsers(dest='command')

    validate = commands.add_parser('validate', parents=[common], help='Check the laws of instance files')
    validate.add_argument('paths', nargs='+')

    fibcheck = commands.add_parser('fibcheck', parents=[common], help='Certify a fibration')
    fibcheck.add_argument('paths', nargs='+')
    fibcheck.add_argument('--kind', choices=list(FIBRATION_KINDS), default='left-cart',
                          help='Horizontal variance first (ignored for 2-functors)')

    reflect = commands.add_parser('reflect', parents=[common], help='Reflect a fibration')
    reflect.add_argument('path')
    reflect.add_argument('--variant', choices=sorted(REFLECTIONS), default='perp')

    roundtrip = commands.add_parser('roundtrip', parents=[common], help='Compare D with its double reflection')
    roundtrip.add_argument('paths', nargs='+')

    unstraighten = commands.add_parser('unstraighten', parents=[common], help='Unstraighten a functor into Cat')
    unstraighten.add_argument('path')
    unstraighten.add_argument('--level', type=int, choices=[1, 2], default=1)

    straighten = commands.add_parser('straighten', parents=[common], help='Straighten a cocartesian fibration')
    straighten.add_argument('path')

    compare = commands.add_parser('compare-psi', parents=[common], help='Degreewise kernel comparisons')
    compare.add_argument('paths', nargs='+')
    compare.add_argument('--kernels', nargs='+', choices=sorted(ZigZag.COMPARISONS),
                         default=['K', 'zeta', 'eta', 'theta', 'T'])

    dot = commands.add_parser('export-dot', parents=[common], help='Write DOT diagrams')
    dot.add_argument('path')

    gen = commands.add_parser('gen', parents=[common], help='Generate a seeded corpus')
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--size', type=int, default=None, help='Entries (default: DBLCAT_CORPUS_SIZE)')
    gen.add_argument('--base-objects', type=int, default=None,
                     help='Bound on base objects (default: DBLCAT_BASE_OBJECTS)')
    return parser


def _dispatch(workbench: FibrationWorkbench, args: argparse.Namespace):
    command = args.command
    if command == 'validate':
        return workbench.run_batch('validate', args.paths)
    if command == 'fibcheck':
        return workbench.run_batch('fibcheck', args.paths, kind=args.kind)
    if command == 'reflect':
        return workbench.run('reflect', path=args.path, variant=args.variant, out=args.out)
    if command == 'roundtrip':
        return workbench.run_batch('roundtrip', args.paths)
    if command == 'unstraighten':
        return workbench.run('unstraighten', path=args.path, level=args.level, out=args.out)
    if command == 'straighten':
        return workbench.run('straighten', path=args.path, out=args.out)
    if command == 'compare-psi':
        window = tuple(args.window) if args.window else None
        return workbench.run_batch('compare-psi', args.paths, kernels=tuple(args.kernels), window=window)
    if command == 'export-dot':
        return workbench.run('export-dot', path=args.path, out=args.out)
    return workbench.run('gen', seed=args.seed, out=args.out or 'corpus', size=args.size,
                         base_objects=args.base_objects)


def main(argv: Optional[List[str]] = None) -> int:
    """Main function; returns the exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.create_env:
        return EXIT_OK if create_env_template() else EXIT_IO_ERROR

    overrides = {
        'mode': getattr(args, 'mode', None),
        'window': getattr(args, 'window', None),
        'max_cells': getattr(args, 'max_cells', None),
        'paranoid': getattr(args, 'paranoid', None),
    }
    if getattr(args, 'verbose', False):
        overrides['log_level'] = 'INFO'
    try:
        settings = load_settings(overrides)
    except ValueError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
    logging.basicConfig(level=getattr(logging, settings.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    workbench = FibrationWorkbench(settings)

    if args.info:
        print(json.dumps(show_system_info(workbench), indent=2, sort_keys=True, default=str))
        return EXIT_OK
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_IO_ERROR

    try:
        code, report = _dispatch(workbench, args)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
    print(json.dumps(report, indent=2, sort_keys=True, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
