#!/usr/bin/env python3
"""
Command-line entry point: construct, verify and benchmark g.d.s. matrices.

Subcommands:
  gen3    symmetric orthogonal 3x3 g.d.s. matrix (stable or unstable formula)
  gen     basis | gds | eig | ybe-seed | ybe constructions
  verify  check a matrix file (gds, orth, ybe, eig)
  bench   reproduce an accuracy table as CSV + JSON sidecar

Reports go to stdout as single-line JSON; logs go to stderr.
Exit codes: 0 success, 1 a check failed, 2 usage or validation error.
"""
import argparse
import json
import logging
import math
import os
import re
import sys
from typing import List, Optional, Tuple

import numpy as np
from dotenv import load_dotenv

from gds_core.config import Config
from gds_core.construct import (
    build_gds3_stable, build_gds3_unstable, extend_to_un_basis, build_gds_from_block,
    build_eig_gds, build_ybe_seed, build_ybe_gds,
)
from gds_core.dense import as_matrix, require_square
from gds_core.errors import GdsError, DomainError, MatrixFileError
from gds_core.models import EigSpec, YbeSeedSpec, ExperimentConfig, ExperimentId
from gds_core.verify import gds_report, is_gds, is_orthogonal, ybe_residual, verify_eigenpairs
from gds_stats.experiments import (
    derive_seed, random_matrix, random_orthogonal, run_experiment, check_acceptance,
)
from gds_stats.report import build_report, export_rows_to_csv, export_report_to_json, sidecar_path
from gds_utils.matrix_io import read_matrix, write_matrix, infer_format

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

CHECKS = ('gds', 'orth', 'ybe', 'eig')

_NUMBER = r'(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'
_PAIR_RE = re.compile(rf'^([+-]?{_NUMBER})([+-]{_NUMBER})i$')


def setup_logging():
    """Configure root logging once: stderr always, a file when GDS_LOG_FILE is set."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_FILE:
        handlers.append(logging.FileHandler(Config.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL, logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


def emit(payload: dict):
    """Print one report as a single JSON line."""
    print(json.dumps(payload))


# ============ Flag parsing ============

def parse_pairs(text: str) -> Tuple[complex, ...]:
    """
    Parse "c1+s1i,c2-s2i,..." into complex numbers.

    Raises:
        DomainError: Malformed token, or s = 0 (real eigenvalues belong in --r/--p)
    """
    pairs = []
    for token in (t.strip() for t in text.split(',')):
        if not token:
            continue
        match = _PAIR_RE.match(token.replace(' ', ''))
        if not match:
            raise DomainError(f"cannot parse eigenvalue pair '{token}'; expected c+si, e.g. -0.8+0.6i")
        c, s = float(match.group(1)), float(match.group(2))
        if s == 0:
            raise DomainError(f"pair '{token}' has s = 0; declare real eigenvalues via --r/--p")
        pairs.append(complex(c, s))
    return tuple(pairs)


def parse_vector(text: str, name: str) -> Tuple[float, ...]:
    """Parse a comma separated list of reals."""
    try:
        return tuple(float(t) for t in text.split(',') if t.strip())
    except ValueError:
        raise DomainError(f"--{name} must be a comma separated list of numbers, got '{text}'") from None


def _default_out(kind: str, fmt: Optional[str]) -> str:
    return f"{kind}.{fmt or 'json'}"


def _basis_input(args, n: int) -> np.ndarray:
    """Matrix X fed to the U_n completion: --x file if given, else seeded normal entries."""
    if args.x:
        x = read_matrix(args.x)
        if x.shape != (n, n):
            raise DomainError(f"--x must hold a {n}x{n} matrix, got {x.shape[0]}x{x.shape[1]}")
        return x
    return random_matrix(n, derive_seed(args.seed, 0, 0))


# ============ Commands ============

def cmd_gen3(args) -> int:
    """Write the 3x3 matrix for --z and print its report."""
    builder = build_gds3_stable if args.variant == 'stable' else build_gds3_unstable
    a = builder(args.z)
    out = args.out or _default_out('gen3', args.format)
    write_matrix(a, out, args.format)
    emit({'command': 'gen3', 'variant': args.variant, 'z': args.z, 'out': out, **gds_report(a).to_dict()})
    return EXIT_OK


def cmd_gen(args) -> int:
    """Run one of the constructions and print the report of the written matrix."""
    extra = {}
    kind = args.kind

    if kind in ('basis', 'gds'):
        if args.n is None or args.n < (1 if kind == 'basis' else 2):
            raise DomainError(f"--n is required for --kind {kind} (at least {1 if kind == 'basis' else 2})")
        q = extend_to_un_basis(_basis_input(args, args.n))
        if kind == 'basis':
            a = q
            extra['first_column_error'] = float(np.linalg.norm(q[:, 0] - 1.0 / np.sqrt(args.n)))
        else:
            w = random_orthogonal(args.n - 1, derive_seed(args.seed, 0, 1))
            a = build_gds_from_block(q, w)

    elif kind == 'eig':
        if args.r is None:
            raise DomainError("--r is required for --kind eig")
        spec = EigSpec(r=args.r, p=args.p, pairs=parse_pairs(args.pairs or ''))
        spec.validate()
        if args.n is not None and args.n != spec.n:
            raise DomainError(f"--n {args.n} disagrees with r + p + 2m = {spec.n}")
        q = extend_to_un_basis(_basis_input(args, spec.n))
        a = build_eig_gds(spec, q)
        extra['eig_residual'] = verify_eigenpairs(a, spec, q)

    elif kind in ('ybe-seed', 'ybe'):
        if args.n is None or args.d is None:
            raise DomainError(f"--n and --d are required for --kind {kind}")
        spec = YbeSeedSpec(n=args.n, d=parse_vector(args.d, 'd'))
        if kind == 'ybe-seed':
            a = build_ybe_seed(spec)
        else:
            spec.validate_orthogonal()
            p = extend_to_un_basis(_basis_input(args, args.n))
            a = build_ybe_gds(build_ybe_seed(spec), p)
        extra['ybe_residual'] = ybe_residual(a)

    else:
        raise DomainError(f"unknown kind '{kind}'")

    out = args.out or _default_out(kind, args.format)
    write_matrix(a, out, args.format)
    if kind == 'eig':
        sidecar = os.path.splitext(out)[0] + '.eig.json'
        _write_eig_sidecar(sidecar, spec, q)
        extra['spec_file'] = sidecar
    emit({'command': 'gen', 'kind': kind, 'seed': args.seed, 'out': out,
          **gds_report(a).to_dict(), **extra})
    return EXIT_OK


def _write_eig_sidecar(path: str, spec: EigSpec, q: np.ndarray):
    payload = {**spec.to_dict(), 'q': {'rows': q.shape[0], 'cols': q.shape[1],
                                       'data': [float(v) for v in q.ravel()]}}
    with open(path, 'w') as f:
        json.dump(payload, f)
        f.write('\n')


def _read_eig_sidecar(path: str) -> Tuple[EigSpec, np.ndarray]:
    try:
        with open(path) as f:
            payload = json.load(f)
        spec = EigSpec(r=int(payload['r']), p=int(payload.get('p', 0)),
                       pairs=tuple(complex(c, s) for c, s in payload.get('pairs', [])))
        qd = payload['q']
        q = as_matrix(np.array(qd['data'], dtype=np.float64).reshape(qd['rows'], qd['cols']), 'q')
    except OSError as e:
        raise MatrixFileError(f"{path}: cannot read spec file: {e}") from None
    except json.JSONDecodeError as e:
        raise MatrixFileError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    except (KeyError, TypeError, ValueError) as e:
        raise MatrixFileError(f"{path}: malformed spec file: {e}") from None
    return spec, q


def cmd_verify(args) -> int:
    """Run the requested checks on a matrix file; exit 1 if any fails."""
    checks = [c.strip() for c in args.checks.split(',') if c.strip()]
    unknown = [c for c in checks if c not in CHECKS]
    if unknown or not checks:
        raise DomainError(f"--checks must list some of {', '.join(CHECKS)}; got '{args.checks}'")

    a = read_matrix(args.input, args.format)
    tol = args.tol
    results = {}

    if 'gds' in checks or 'orth' in checks:
        require_square(a, 'matrix')
        report = gds_report(a)
        if 'gds' in checks:
            results['gds'] = {'err_rows': report.err_rows, 'err_columns': report.err_columns,
                              'passed': is_gds(a, tol)}
        if 'orth' in checks:
            results['orth'] = {'err_orth': report.err_orth, 'passed': is_orthogonal(a, tol)}
    if 'ybe' in checks:
        residual = ybe_residual(a)
        results['ybe'] = {'residual': residual, 'passed': residual <= tol}
    if 'eig' in checks:
        if not args.spec:
            raise DomainError("--checks eig needs --spec (the .eig.json written by gen --kind eig)")
        spec, q = _read_eig_sidecar(args.spec)
        spec.validate()
        residual = verify_eigenpairs(a, spec, q)
        results['eig'] = {'residual': residual, 'passed': residual <= tol}

    passed = all(r['passed'] for r in results.values())
    emit({'command': 'verify', 'file': args.input, 'rows': a.shape[0], 'cols': a.shape[1],
          'tol': tol, 'checks': results, 'passed': passed})
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_bench(args) -> int:
    """Reproduce one experiment; exit 1 if any row misses its acceptance bound."""
    experiment = ExperimentId.parse(args.id)
    cfg = ExperimentConfig.default(experiment, seed=args.seed)
    rows = run_experiment(cfg, workers=args.workers)
    passed = check_acceptance(experiment, rows)

    out = args.out or os.path.join(Config.RESULTS_DIR, f"{experiment.value}.csv")
    export_rows_to_csv(rows, out)
    sidecar = sidecar_path(out)
    export_report_to_json(build_report(cfg, rows, passed), sidecar)
    emit({'command': 'bench', 'id': experiment.value, 'seed': cfg.seed, 'out': out,
          'sidecar': sidecar, 'rows': len(rows), 'passed': passed})
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ============ Parser ============

def build_parser(default_seed: int) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Construct and verify generalized doubly stochastic matrices',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py gen3 --z 1 --variant stable --out a.json
  python main.py gen --kind eig --r 2 --p 3 --pairs "0.6+0.8i,-0.8+0.6i" --seed 0
  python main.py gen --kind ybe --n 2 --d "1,-1,1,1" --seed 0
  python main.py verify --in a.json --checks gds,orth
  python main.py bench --id table3 --seed 0
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def add_output(p):
        p.add_argument('--out', default=None, help='Output matrix file (default <kind>.<format>)')
        p.add_argument('--format', choices=('json', 'csv'), default=None,
                       help='Matrix file format (default: from the extension, else json)')

    g3 = sub.add_parser('gen3', help='3x3 symmetric orthogonal g.d.s. matrix')
    g3.add_argument('--z', type=float, required=True, help='Free entry, in [-1/3, 1]')
    g3.add_argument('--variant', choices=('stable', 'unstable'), default='stable',
                    help='Root choice; unstable loses accuracy for z near 0')
    add_output(g3)
    g3.set_defaults(handler=cmd_gen3)

    gen = sub.add_parser('gen', help='Basis, g.d.s., prescribed-spectrum or Yang-Baxter constructions')
    gen.add_argument('--kind', required=True, choices=('basis', 'gds', 'eig', 'ybe-seed', 'ybe'))
    gen.add_argument('--n', type=int, default=None, help='Dimension (base dimension for ybe kinds)')
    gen.add_argument('--seed', type=int, default=default_seed, help='Random seed (env GDS_DEFAULT_SEED)')
    gen.add_argument('--r', type=int, default=None, help='Multiplicity of eigenvalue +1 (eig)')
    gen.add_argument('--p', type=int, default=0, help='Multiplicity of eigenvalue -1 (eig)')
    gen.add_argument('--pairs', default='', help='Complex pairs "c1+s1i,c2+s2i" (eig)')
    gen.add_argument('--d', default=None, help='Comma separated scalings, n^2 values (ybe kinds)')
    gen.add_argument('--x', default=None, help='Matrix file overriding the random input of the basis completion')
    add_output(gen)
    gen.set_defaults(handler=cmd_gen)

    ver = sub.add_parser('verify', help='Check a matrix file')
    ver.add_argument('--in', dest='input', required=True, help='Matrix file')
    ver.add_argument('--format', choices=('json', 'csv'), default=None)
    ver.add_argument('--checks', default='gds,orth', help=f"Comma list among {', '.join(CHECKS)}")
    ver.add_argument('--spec', default=None, help='Spectrum sidecar (.eig.json) for the eig check')
    ver.add_argument('--tol', type=float, default=Config.VERIFY_TOL, help='Pass threshold (default 1e-10)')
    ver.set_defaults(handler=cmd_verify)

    bench = sub.add_parser('bench', help='Reproduce an accuracy table')
    bench.add_argument('--id', required=True, help=f"One of {', '.join(e.value for e in ExperimentId)}")
    bench.add_argument('--seed', type=int, default=default_seed)
    bench.add_argument('--out', default=None, help='CSV path (default <GDS_RESULTS_DIR>/<id>.csv)')
    bench.add_argument('--workers', type=int, default=None, help='Thread count (env GDS_WORKERS)')
    bench.set_defaults(handler=cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()

    invalid = Config.validate()
    if invalid:
        logger.error(f"❌ Configuration error: malformed {', '.join(invalid)}")
        return EXIT_USAGE

    parser = build_parser(Config.default_seed())
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    if getattr(args, 'seed', 0) is not None and not 0 <= getattr(args, 'seed', 0) < 2 ** 64:
        logger.error(f"❌ --seed must be a 64-bit unsigned integer, got {args.seed}")
        return EXIT_USAGE
    if not 0 < getattr(args, 'tol', 1.0) < math.inf:
        logger.error(f"❌ --tol must be a positive finite number, got {args.tol}")
        return EXIT_USAGE

    try:
        return args.handler(args)
    except GdsError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
