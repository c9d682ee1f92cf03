"""Command line front end.

    cfinvar validate --model xor.scm.yaml
    cfinvar analyze --model xor.scm.yaml --target Y --intervene Z --given Y
    cfinvar adjust --graph chain.dag.yaml --exposure Z --outcome Y --max-size 2
    cfinvar bounds --graph zy.dag.yaml --obs half.obs.yaml --target Y --intervene Z
    cfinvar enumerate-fci --model mod2.scm.yaml --intervene Z --inputs X
    cfinvar experiment measure-zero --graph zy.dag.yaml --target Y --intervene Z --n 1000 --seed 0

Reports are YAML on stdout (or --output). Errors produce a report with the error name, message and exit code:
1 for input and validation errors, 2 for unsupported structure, 3 for resource limits.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from typing import Any, NoReturn, Sequence

import cfinvar
from cfinvar.config import ADJUSTMENT_READINGS, get_config, load_config, use_config
from cfinvar.documents import (
    parse_function,
    parse_graph,
    parse_model,
    parse_observation,
    render_function,
    render_vector,
)
from cfinvar.exceptions import CfinvarException, InvalidQueryError, ParseError, ValidationError
from cfinvar.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    ExperimentReport,
    dci_embedding_demo,
    demo_unbounded_degree,
    fci_rarity,
    measure_zero_as_ci,
)
from cfinvar.graph import (
    adjustment_reading_discrepancies,
    enumerate_adjustment_sets,
    implied_independences,
)
from cfinvar.invariance import as_ci_report, dci_report, enumerate_fci_functions, is_fci
from cfinvar.io import dump_csv, dump_yaml, dump_yaml_str, read_text
from cfinvar.logger import get_logger
from cfinvar.misc import parse_rational, plain, render_set
from cfinvar.polytope import (
    BoundsResult,
    ConditionalQuery,
    build_polytope,
    ci_degree_bounds,
    conditional_query_bounds,
)
from cfinvar.scm import validate_model

__all__ = ['build_parser', 'main', 'run_command']

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Argument errors become InvalidQueryError (exit 1) instead of argparse's own exit."""

    def error(self, message: str) -> NoReturn:
        raise InvalidQueryError(f'{self.prog}: {message}')


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as ex:
        raise argparse.ArgumentTypeError(str(ex)) from ex


def _variables(text: str) -> tuple[str, ...]:
    """'A,B' -> ('A', 'B'); '' -> ()."""
    return tuple(name.strip() for name in text.split(',') if name.strip())


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', '-v', action='store_true', help='Debug logging and progress bars.')
    common.add_argument('--log-file', default=None, help='Also write the log to this file.')
    common.add_argument('--config', default=None, help='YAML file overriding the default configuration.')
    common.add_argument('--output', '-o', default=None, help='Write the report to this file instead of stdout.')

    parser = _Parser(prog='cfinvar', description='Counterfactual invariance on discrete causal models.')
    parser.add_argument('--version', '-V', action='version', version=f'cfinvar {cfinvar.__version__}')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    validate = commands.add_parser('validate', parents=[common], help='Validate a model or graph document.')
    source = validate.add_mutually_exclusive_group(required=True)
    source.add_argument('--model', help='Model document.')
    source.add_argument('--graph', help='Graph document.')

    analyze = commands.add_parser('analyze', parents=[common], help='Invariance notions on a model.')
    analyze.add_argument('--model', required=True, help='Model document.')
    analyze.add_argument('--target', required=True, help='Target Y.')
    analyze.add_argument('--intervene', required=True, help='Intervened variable Z.')
    analyze.add_argument(
        '--given',
        action='append',
        type=_variables,
        default=None,
        help='Conditioning set W as "A,B" (repeatable; "" for the empty set). Default: the empty set.',
    )
    analyze.add_argument('--function', default=None, help='Function document for functional invariance.')

    adjust = commands.add_parser('adjust', parents=[common], help='Adjustment sets and implied independences.')
    adjust.add_argument('--graph', required=True, help='Graph document.')
    adjust.add_argument('--exposure', required=True, help='Intervened variable Z.')
    adjust.add_argument('--outcome', required=True, help='Outcome Y.')
    adjust.add_argument('--max-size', type=int, default=None, help='Largest adjustment set.')
    adjust.add_argument('--reading', choices=ADJUSTMENT_READINGS, default=None, help='Reading of condition 2.')
    adjust.add_argument(
        '--function-inputs',
        type=_variables,
        default=None,
        help='Inputs "A,B" of a function f; independences are then stated for f instead of the outcome.',
    )

    bounds = commands.add_parser('bounds', parents=[common], help='Bounds over observationally equivalent models.')
    bounds.add_argument('--graph', required=True, help='Graph document.')
    bounds.add_argument('--obs', required=True, help='Observation document.')
    bounds.add_argument('--target', required=True, help='Target Y.')
    bounds.add_argument('--intervene', required=True, help='Root intervened variable Z.')
    bounds.add_argument('--query-value', default=None, help='y of P(Y(z) = y | Z = factual).')
    bounds.add_argument('--query-level', default=None, help='z of P(Y(z) = y | Z = factual).')
    bounds.add_argument('--factual-level', default=None, help='factual level of P(Y(z) = y | Z = factual).')

    fci = commands.add_parser('enumerate-fci', parents=[common], help='All functionally invariant functions.')
    fci.add_argument('--model', required=True, help='Model document.')
    fci.add_argument('--intervene', required=True, help='Intervened variable Z.')
    fci.add_argument('--inputs', required=True, type=_variables, help='Inputs "A,B".')
    fci.add_argument('--codomain-size', type=int, default=2, help='Number of output values 0..k-1.')

    experiment = commands.add_parser('experiment', help='Randomized and grid experiments.')
    experiments = experiment.add_subparsers(dest='experiment', required=True, parser_class=_Parser)
    randomized = argparse.ArgumentParser(add_help=False)
    randomized.add_argument('--graph', required=True, help='Graph document.')
    randomized.add_argument('--target', required=True, help='Target Y.')
    randomized.add_argument('--intervene', required=True, help='Intervened variable Z.')
    randomized.add_argument('--n', type=int, default=1000, help='Number of samples.')
    randomized.add_argument('--seed', type=int, required=True, help='Master seed.')
    randomized.add_argument('--csv', default=None, help='Write the per-sample table to this CSV file.')

    zero = experiments.add_parser('measure-zero', parents=[common, randomized], help='Exact invariance is rare.')
    zero.add_argument('--obs', default=None, help='Observation document. Default: a random independent law.')
    zero.add_argument('--epsilon', type=_rational, default=Fraction(1, 10), help='Near invariance threshold.')

    rarity = experiments.add_parser('fci-rarity', parents=[common, randomized], help='F-CI functions are Nd(Z).')
    rarity.add_argument('--inputs', required=True, type=_variables, help='Inputs "A,B".')
    rarity.add_argument('--codomain-size', type=int, default=2, help='Number of output values.')

    embedding = experiments.add_parser('dci-embedding', parents=[common], help='Gap of a target copying w.')
    embedding.add_argument('--graph', required=True, help='Graph document.')
    embedding.add_argument('--target', required=True, help='Target Y.')
    embedding.add_argument('--intervene', required=True, help='Intervened variable Z.')
    embedding.add_argument('--mediator', required=True, help='The parent w of the target.')
    embedding.add_argument('--grid', type=int, default=11, help='Points on the equivalence segment.')
    embedding.add_argument('--p', type=_rational, default=Fraction(1, 2), help='P(w = 0 | Z = z).')
    embedding.add_argument('--csv', default=None, help='Write the per-point table to this CSV file.')

    unbounded = experiments.add_parser('unbounded-degree', parents=[common], help='Degree along the segment.')
    unbounded.add_argument('--p', type=_rational, default=Fraction(1, 2), help='P(Y = 0 | Z = z).')
    unbounded.add_argument('--grid', type=int, default=11, help='Points on the equivalence segment.')
    unbounded.add_argument('--csv', default=None, help='Write the per-point table to this CSV file.')
    return parser


def _cmd_validate(args: argparse.Namespace) -> dict[str, Any]:
    if args.graph is not None:
        dag = parse_graph(read_text(args.graph))
        return {'valid': True, 'variables': list(dag.nodes), 'edges': [f'{a} -> {b}' for a, b in dag.edges]}
    model = parse_model(read_text(args.model))
    report = validate_model(model)
    return {
        'valid': report.ok,
        'variables': list(model.variables),
        'edges': [f'{a} -> {b}' for a, b in model.dag.edges],
        'warnings': list(report.warnings),
    }


def _cmd_analyze(args: argparse.Namespace) -> dict[str, Any]:
    model = parse_model(read_text(args.model))
    almost_sure = as_ci_report(model, args.target, args.intervene)
    report = {
        'target': args.target,
        'intervene': args.intervene,
        'as_ci_degree': almost_sure.degree,
        'as_ci': almost_sure.holds,
        'as_ci_pairs': almost_sure.metadata['pairs'],
        'as_ci_witness': almost_sure.witness,
        'dci': {},
    }
    for conditioning in args.given or [()]:
        distributional = dci_report(model, args.target, args.intervene, conditioning)
        report['dci'][render_set(conditioning)] = {
            'gap': distributional.gap,
            'holds': distributional.holds,
            'witness': distributional.witness,
            'skipped_cells': len(distributional.metadata['skipped_cells']),
        }
    if args.function is not None:
        functional = is_fci(model, parse_function(read_text(args.function), model.dag), args.intervene)
        report['fci'] = {
            'inputs': functional.metadata['inputs'],
            'degree': functional.degree,
            'holds': functional.holds,
            'witness': functional.witness,
        }
    return report


def _cmd_adjust(args: argparse.Namespace) -> dict[str, Any]:
    dag = parse_graph(read_text(args.graph))
    valid = enumerate_adjustment_sets(dag, args.exposure, args.outcome, args.max_size, args.reading)
    target = args.outcome if args.function_inputs is None else 'Yhat'
    statements = implied_independences(
        dag, target, args.exposure, args.max_size, args.function_inputs, args.reading
    )
    return {
        'exposure': args.exposure,
        'outcome': args.outcome,
        'reading': args.reading or get_config().adjustment_reading,
        'valid_sets': [result.render() for result in valid],
        'independences': [statement.render() for statement in statements],
        'reading_discrepancies': [
            render_set(members)
            for members in adjustment_reading_discrepancies(dag, args.exposure, args.outcome, args.max_size)
        ],
    }


def _bounds_document(bounds: BoundsResult, tables: dict) -> dict[str, Any]:
    return {
        'min': bounds.min,
        'max': bounds.max,
        'argmin': render_vector(bounds.argmin, tables),
        'argmax': render_vector(bounds.argmax, tables),
    }


def _cmd_bounds(args: argparse.Namespace) -> dict[str, Any]:
    dag = parse_graph(read_text(args.graph))
    observed = parse_observation(read_text(args.obs))
    polytope = build_polytope(dag, observed, args.intervene)
    degree = ci_degree_bounds(dag, observed, args.target, args.intervene, polytope=polytope)
    report = {
        'target': args.target,
        'intervene': args.intervene,
        'response_tuples': polytope.dimension,
        'affine_dimension': polytope.affine_dimension(),
        'degree_min': degree.min,
        'degree_max': degree.max,
        'as_ci_possible': degree.as_ci_possible,
        'as_ci_forced': degree.as_ci_forced,
        'argmin': render_vector(degree.argmin, polytope.tables),
        'argmax': render_vector(degree.argmax, polytope.tables),
    }
    query = (args.query_value, args.query_level, args.factual_level)
    if any(part is not None for part in query):
        if any(part is None for part in query):
            raise InvalidQueryError('--query-value, --query-level and --factual-level go together')
        target_domain = dag.domain(args.target)
        levels = dag.domain(args.intervene)
        conditional = ConditionalQuery(
            args.target,
            target_domain.parse(args.query_value),
            levels.parse(args.query_level),
            levels.parse(args.factual_level),
        )
        report['query'] = {
            'event': f'{args.target}({args.intervene}={args.query_level}) = {args.query_value}',
            'given': f'{args.intervene}={args.factual_level}',
            **_bounds_document(conditional_query_bounds(dag, observed, args.intervene, conditional), polytope.tables),
        }
    return report


def _cmd_enumerate_fci(args: argparse.Namespace) -> dict[str, Any]:
    model = parse_model(read_text(args.model))
    if args.codomain_size < 1:
        raise InvalidQueryError('codomain must have at least one value')
    enumeration = enumerate_fci_functions(model, args.inputs, range(args.codomain_size), args.intervene)
    return {
        'inputs': list(enumeration.inputs),
        'intervene': args.intervene,
        'scanned': enumeration.scanned,
        'count': len(enumeration.functions),
        'nd_inputs': list(enumeration.nd_inputs),
        'nd_function_count': enumeration.nd_function_count,
        'equals_nd_class': enumeration.equals_nd_class,
        'functions': [render_function(function) for function in enumeration.functions],
    }


def _write_csv(report: ExperimentReport, path: str | None) -> None:
    if path is None:
        return
    header = CSV_HEADER if report.name in ('measure-zero', 'fci-rarity') else tuple(report.records[0])
    rows = report.csv_rows() if header == CSV_HEADER else [plain(dict(record)) for record in report.records]
    dump_csv(rows, path, header)
    logger.info('wrote %d rows to %s', len(rows), path)


def _cmd_experiment(args: argparse.Namespace) -> dict[str, Any]:
    if args.experiment == 'unbounded-degree':
        report = demo_unbounded_degree(args.p, args.grid, verbose=args.verbose)
    elif args.experiment == 'dci-embedding':
        dag = parse_graph(read_text(args.graph))
        report = dci_embedding_demo(dag, args.intervene, args.mediator, args.target, args.grid, args.p)
    else:
        dag = parse_graph(read_text(args.graph))
        config = ExperimentConfig(
            dag,
            args.intervene,
            args.target,
            n=args.n,
            seed=args.seed,
            epsilon=getattr(args, 'epsilon', Fraction(1, 10)),
            output=args.csv,
            inputs=getattr(args, 'inputs', ()),
            codomain_size=getattr(args, 'codomain_size', 2),
            observed=parse_observation(read_text(args.obs)) if getattr(args, 'obs', None) else None,
        )
        run = measure_zero_as_ci if args.experiment == 'measure-zero' else fci_rarity
        report = run(config, verbose=args.verbose)
    _write_csv(report, args.csv)
    return report.to_document()


COMMANDS = {
    'validate': _cmd_validate,
    'analyze': _cmd_analyze,
    'adjust': _cmd_adjust,
    'bounds': _cmd_bounds,
    'enumerate-fci': _cmd_enumerate_fci,
    'experiment': _cmd_experiment,
}


def _error_report(ex: Exception, exit_code: int) -> dict[str, Any]:
    report = {'error': type(ex).__name__, 'exit_code': exit_code, 'message': str(ex)}
    if isinstance(ex, ParseError):
        report['line'] = ex.line
        report['position'] = ex.position
    if isinstance(ex, ValidationError):
        report['violations'] = list(ex.violations)
    return report


def run_command(argv: Sequence[str]) -> tuple[int, dict[str, Any]]:
    """Run one command.

    Args:
        argv (Sequence[str]): Arguments without the program name.

    Returns:
        tuple[int, dict[str, Any]]: exit code and the report as plain data.

    """
    try:
        args = build_parser().parse_args(list(argv))
        path = getattr(args, 'config', None)
        with use_config(get_config() if path is None else load_config(path)):
            if getattr(args, 'verbose', False) or getattr(args, 'log_file', None) is not None:
                level = logging.DEBUG if args.verbose else logging.INFO
                get_logger('cfinvar', filename=args.log_file, level=level)
            report = COMMANDS[args.command](args)
    except CfinvarException as ex:
        logger.debug('command failed', exc_info=True)
        return ex.exit_code, _error_report(ex, ex.exit_code)
    except OSError as ex:
        return 1, _error_report(ex, 1)
    return 0, {'command': args.command, **plain(report)}


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point."""
    argv = sys.argv[1:] if argv is None else list(argv)
    code, report = run_command(argv)
    destination = argparse.ArgumentParser(add_help=False)
    destination.add_argument('--output', '-o', default=None)
    output = destination.parse_known_args(argv)[0].output
    if output is not None:
        dump_yaml(report, output)
    else:
        sys.stdout.write(dump_yaml_str(report))
    return code


if __name__ == '__main__':
    sys.exit(main())
