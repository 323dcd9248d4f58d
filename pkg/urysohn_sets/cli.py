import argparse
import logging
import sys

from .amalgamation import amalgamate
from .approximation import (
    COUNTABLE_ONLY, URYSOHN, classify, completion_age_test, h_join_trace, hat_map,
)
from .config import (
    BUILD_DOMAIN_CAP, COMPLETION_BUDGET, COMPLETION_DENOMINATOR, DEFAULT_SEED,
    DEFAULT_WORKERS, FALSIFY_CAP, FALSIFY_DENOMINATOR, FALSIFY_SAMPLES,
)
from .distance_sets import dense_subset
from .errors import InvalidInput, SearchBudget, SearchFailure
from .four_values import METHODS, check_four_values
from .fraisse import audit_extension, build
from .io_utils import (
    classification_lines, format_build_log, format_rat, format_space,
    fourvalues_lines, parse_rat, read_space, save_json,
)
from .pipeline import fixture_records, run_fixtures
from .setexpr import parse_setexpr

EXIT_OK, EXIT_NEGATIVE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _shared(text: str) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(','))):
        src, _, dst = item.partition(':')
        try:
            out[int(src)] = int(dst)
        except ValueError as e:
            raise InvalidInput(f"bad shared pair {item!r}") from e
    return out


def _emit(lines, prose=None, machine=False):
    if prose and not machine:
        print(f"# {prose}")
    for line in lines:
        print(line)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='urysohn-sets', description="Distance sets of universal and Urysohn metric spaces")
    parser.add_argument('--machine', action='store_true', help="Only key=value lines on stdout")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p = sub.add_parser('check4v', help="Decide the 4-values condition")
    p.add_argument('set', nargs='?')
    p.add_argument('--set', dest='set_flag')
    p.add_argument('--method', choices=METHODS, default='auto')
    p.add_argument('--samples', type=int, default=FALSIFY_SAMPLES)
    p.add_argument('--denom', type=int, default=FALSIFY_DENOMINATOR)
    p.add_argument('--cap', type=parse_rat, default=FALSIFY_CAP)
    p.add_argument('--seed', type=int, default=DEFAULT_SEED)
    p.add_argument('--workers', type=int, default=DEFAULT_WORKERS)

    p = sub.add_parser('classify', help="Classify a distance set")
    p.add_argument('set', nargs='?')
    p.add_argument('--set', dest='set_flag')

    p = sub.add_parser('amalgamate', help="Amalgamate two space files over R")
    p.add_argument('A')
    p.add_argument('B')
    p.add_argument('--shared', default='')
    p.add_argument('--set', dest='set_flag', required=True)

    for name, text in (('build', "Build a finite approximation"), ('audit', "Build, then audit the extension property")):
        p = sub.add_parser(name, help=text)
        p.add_argument('--set', dest='set_flag', required=True)
        p.add_argument('--stages', type=int, required=True)
        p.add_argument('--seed', type=int, default=DEFAULT_SEED)
        p.add_argument('--domain-cap', type=int, default=BUILD_DOMAIN_CAP)

    p = sub.add_parser('hjoin', help="h-join of two equinumerous spaces")
    p.add_argument('A')
    p.add_argument('B')
    p.add_argument('--set', dest='set_flag', required=True)
    p.add_argument('--h', type=parse_rat, required=True)
    p.add_argument('--r', type=parse_rat, required=True)

    p = sub.add_parser('hatmap', help="Round a space into the rationals of R")
    p.add_argument('--space', required=True)
    p.add_argument('--set', dest='set_flag', required=True)
    p.add_argument('--eps', type=parse_rat, required=True)
    p.add_argument('--dense', type=int, help="Round into the first N elements of the dense enumeration of R")

    p = sub.add_parser('agetest', help="Is a space in the age of the completion?")
    p.add_argument('--space', required=True)
    p.add_argument('--set', dest='set_flag', required=True)
    p.add_argument('--eps', type=parse_rat, required=True)
    p.add_argument('--budget', type=int, default=COMPLETION_BUDGET)
    p.add_argument('--denom', type=int, default=COMPLETION_DENOMINATOR)

    p = sub.add_parser('fixtures', help="Run the fixture catalog")
    p.add_argument('names', nargs='*')
    p.add_argument('--workers', type=int, default=DEFAULT_WORKERS)
    p.add_argument('--json', dest='json_path', help="Also save the results as JSON")
    return parser


def _set_of(args):
    text = getattr(args, 'set_flag', None) or getattr(args, 'set', None)
    if not text:
        raise UsageError("a set expression is required")
    return parse_setexpr(text)


def _check4v(args) -> int:
    R = _set_of(args)
    options = {}
    if args.method == 'falsifier':
        options = dict(samples=args.samples, max_denominator=args.denom, cap=args.cap,
                       seed=args.seed, workers=args.workers)
    elif args.method in ('auto', 'interval'):
        options = dict(workers=args.workers, seed=args.seed)
    verdict = check_four_values(R, method=args.method, **options)
    lines = fourvalues_lines(verdict)
    if 'seed' not in verdict.details:
        lines.append(f"seed={args.seed}")
    _emit(lines, f"4-values condition for {R}", args.machine)
    return {True: EXIT_OK, False: EXIT_NEGATIVE, None: EXIT_UNKNOWN}[verdict.holds]


def _classify(args) -> int:
    R = _set_of(args)
    c = classify(R)
    _emit(classification_lines(c), f"classification of {R}", args.machine)
    if c.conditional:
        return EXIT_UNKNOWN
    return EXIT_OK if c.verdict in (URYSOHN, COUNTABLE_ONLY) else EXIT_NEGATIVE


def _amalgamate(args) -> int:
    R = _set_of(args)
    A, B = read_space(args.A), read_space(args.B)
    result = amalgamate(A, B, _shared(args.shared), R)
    if not args.machine:
        for ch in result.choices:
            print(f"# d({ch.pair[0]},{ch.pair[1]})={format_rat(ch.value)} from [{format_rat(ch.u)},{format_rat(ch.l)}]")
    sys.stdout.write(format_space(result.C, {'A': result.embed_A, 'B': result.embed_B}))
    return EXIT_OK


def _build(args) -> int:
    R = _set_of(args)
    state = build(R, args.stages, seed=args.seed, domain_cap=args.domain_cap)
    if args.command == 'audit':
        report = audit_extension(state, args.domain_cap, state.values)
        lines = [f"audit={'pass' if report.passed else 'fail'}", f"checked={report.checked}",
                 f"realized={report.realized}", f"pending={len(report.pending)}",
                 f"seed={args.seed}", f"stages={state.stage}", f"points={state.M.n}"]
        lines += [f"pending_type={t}" for t in report.pending]
        _emit(lines, f"extension audit over {R}", args.machine)
        return EXIT_OK if report.passed else EXIT_NEGATIVE
    sys.stdout.write(format_build_log(state.log))
    print(f"seed={args.seed}")
    sys.stdout.write(format_space(state.M))
    return EXIT_OK


def _hjoin(args) -> int:
    R = _set_of(args)
    A, B = read_space(args.A), read_space(args.B)
    P, chain, trace = h_join_trace(A, B, args.h, R, r=args.r)
    lines = [f"gamma={format_rat(chain[0])}"]
    lines += [f"level={t.level} l={format_rat(t.l)} k={format_rat(t.k)} h={format_rat(t.h)}" for t in trace]
    _emit(lines, f"{args.h}-join over {R}", args.machine)
    sys.stdout.write(format_space(P))
    return EXIT_OK


def _hatmap(args) -> int:
    R = _set_of(args)
    A = read_space(args.space)
    S = dense_subset(R, args.dense) if args.dense else None
    plan, B = hat_map(A, R, S=S, eps=args.eps)
    lines = [f"delta={format_rat(plan.delta)}"]
    lines += [f"hat {format_rat(x)} = {format_rat(y)}" for x, y in sorted(plan.hat.items())]
    _emit(lines, f"rounding into {R}", args.machine)
    sys.stdout.write(format_space(B))
    return EXIT_OK


def _agetest(args) -> int:
    R = _set_of(args)
    A = read_space(args.space)
    verdict = completion_age_test(A, R, args.eps, budget=args.budget, denominator=args.denom)
    lines = [f"agetest={verdict.status}", f"nodes={verdict.nodes}"]
    for key, value in verdict.certificate.items():
        lines.append(f"{key}={value}")
    _emit(lines, f"completion age over {R}", args.machine)
    if verdict.B is not None:
        sys.stdout.write(format_space(verdict.B))
    return {'witness': EXIT_OK, 'impossible': EXIT_NEGATIVE}.get(verdict.status, EXIT_UNKNOWN)


def _fixtures(args) -> int:
    results = run_fixtures(names=args.names or None, workers=args.workers)
    for r in results:
        status = 'pass' if r.passed else 'fail'
        detail = r.error or f"fourvalues={r.fourvalues} verdict={r.verdict}"
        print(f"fixture={r.name} status={status} {detail}")
    if args.json_path:
        save_json(fixture_records(results), args.json_path)
    passed = sum(r.passed for r in results)
    print(f"passed={passed} total={len(results)}")
    return EXIT_OK if passed == len(results) else EXIT_NEGATIVE


COMMANDS = {
    'check4v': _check4v, 'classify': _classify, 'amalgamate': _amalgamate,
    'build': _build, 'audit': _build, 'hjoin': _hjoin, 'hatmap': _hatmap,
    'agetest': _agetest, 'fixtures': _fixtures,
}


def run(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error={e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING if args.machine else logging.INFO,
        format='%(asctime)s [%(levelname)s] %(message)s'
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidInput) as e:
        print(f"error={e}")
        return EXIT_USAGE
    except SearchBudget as e:
        print(f"error={type(e).__name__}: {e}")
        return EXIT_UNKNOWN
    except SearchFailure as e:
        print(f"error={type(e).__name__}: {e}")
        return EXIT_NEGATIVE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
