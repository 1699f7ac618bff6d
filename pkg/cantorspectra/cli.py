#!/usr/bin/env python3
"""
Command-line interface for cantorspectra.

This module provides the command-line entry point for the cantorspectra tool.
"""

import sys
import time
import argparse
import logging
from fractions import Fraction
from typing import Optional, Tuple

from . import (
    __version__,
    CantorSpectraConfig,
    CantorSpectraException,
    SpecFormatError,
    SpectraReport,
    configure_logging,
    enable_verbose_logging,
)
from .exactnum import common_field, field_from_string, parse_element, parse_element_list
from .operations import (
    CatalogEntry,
    Tower,
    build_tower,
    catalog_listing,
    convergence_diagnostic,
    eigen_verdict,
    eigenvalue_group_admissibility,
    ergodicity_certificate,
    image_group,
    infinitesimal_report,
    load_spec,
    lookup,
    measure_enclosure,
    rational_member,
    stationary_measure,
    subgroup_from_generators,
    suffix_criterion,
    suffix_vectors,
    torsion_audit,
    torsion_quotient,
)
from .operations.catalog import GROUP
from .operations.spectra import AUDIT_HEADER

logger = logging.getLogger(__name__)

NOTE_EXACT = "exact: field identities, lattice computations and modular arithmetic are exact"
NOTE_INTERVAL = "interval: norms, suffix sums and enclosures are outward-rounded interval bounds"


def create_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser."""
    parser = argparse.ArgumentParser(
        description='cantorspectra - Eigenvalue analysis for minimal Cantor systems',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    cantorspectra catalog                                          List built-in systems
    cantorspectra measures --catalog fibonacci --level 3           Exact measure vector at level 3
    cantorspectra eigen --catalog fibonacci --alpha "(-1+sqrt(5))/2" --N 30
                                                                   Run the eigenvalue criteria
    cantorspectra rational --catalog odometer2 --frac 1/3          Rational subgroup membership
    cantorspectra invariants --catalog inf-demo                    Image group and infinitesimals
    cantorspectra torsion --catalog sec43                          Torsion of I/E
    cantorspectra audit --catalog fibonacci --m 1 --wbox 4 --N 25  Torsion audit of candidates
    cantorspectra suffixes --spec tower.json --level 2             Suffix vectors at a level
    cantorspectra diagnostic --catalog fibonacci --m 1 --N 40      Measure convergence series
"""
    )

    parser.add_argument('--version', '-V', action='version', version=f'cantorspectra {__version__}')
    parser.add_argument('--verbose', '-v', action='store_true', help='Enable verbose output')
    parser.add_argument('--log-file', help='Also write log messages to this file')
    parser.add_argument('--format', choices=CantorSpectraConfig.VALID_FORMATS,
                        help='Report format (default: json)')
    parser.add_argument('--output', '-o', help='Write the report to a file instead of stdout')
    parser.add_argument('--timing', action='store_true',
                        help='Include wall-clock timing (makes reports non-reproducible)')
    parser.add_argument('--config-level', choices=['global', 'directory'],
                        default='directory', help='Deepest configuration file level read (default: directory)')
    parser.add_argument('--max-degree', dest='max_field_degree', type=int,
                        help='Largest number field degree accepted')
    parser.add_argument('--bits', dest='enclosure_bits', type=int,
                        help='Binary precision of interval enclosures')
    parser.add_argument('--digits', dest='report_digits', type=int,
                        help='Decimal digits of interval tags in reports')

    subparsers = parser.add_subparsers(dest='command', help='Commands')

    # Measures command
    measures_parser = subparsers.add_parser('measures', help='Invariant measure vectors and ergodicity')
    _add_tower_source(measures_parser)
    measures_parser.add_argument('--level', type=int, default=1, help='Level n of mu_n (default: 1)')
    measures_parser.add_argument('--eps', help='Target width of the measure enclosure (p/q)')

    # Eigen command
    eigen_parser = subparsers.add_parser('eigen', help='Run the eigenvalue criteria on a candidate')
    _add_tower_source(eigen_parser)
    _add_battery_args(eigen_parser)
    eigen_parser.add_argument('--alpha', required=True,
                              help='Candidate: p/q, (a+b*sqrt(d))/c or coords:[...]@<minpoly>')
    eigen_parser.add_argument('--field', help='Field for --alpha, e.g. "x^2-5" (largest root)')
    eigen_parser.add_argument('--use-declared', action='store_true',
                              help='Let catalog eigenvalues known by construction certify')
    eigen_parser.add_argument('--expect', choices=['eigen', 'refuted'],
                              help='Exit with code 2 if the verdict contradicts this')

    # Rational command
    rational_parser = subparsers.add_parser('rational', help='Membership of p/q in the rational subgroup')
    _add_tower_source(rational_parser)
    rational_parser.add_argument('--frac', required=True, help='Rational p/q')
    rational_parser.add_argument('--depth', type=int, help='Levels searched directly')
    rational_parser.add_argument('--expect', choices=['member', 'non-member'],
                                 help='Exit with code 2 if the verdict contradicts this')

    # Invariants command
    invariants_parser = subparsers.add_parser('invariants', help='Image group and infinitesimals')
    _add_tower_source(invariants_parser)
    invariants_parser.add_argument('--level', type=int, default=1,
                                   help='Level n of the image group (default: 1)')

    # Torsion command
    torsion_parser = subparsers.add_parser('torsion', help='Invariant factors of I/E')
    _add_group_source(torsion_parser)
    torsion_parser.add_argument('--egens', help='Generators of E, comma separated')

    # Audit command
    audit_parser = subparsers.add_parser('audit', help='Torsion audit over enumerated candidates')
    _add_tower_source(audit_parser)
    _add_battery_args(audit_parser)
    audit_parser.add_argument('--wbox', type=int, help='Box bound on integer vectors w')
    audit_parser.add_argument('--kmax', type=int, help='Largest multiplier k')
    audit_parser.add_argument('--threads', type=int, help='Worker threads for candidates')

    # Suffixes command
    suffixes_parser = subparsers.add_parser('suffixes', help='Suffix vectors and the suffix criterion')
    _add_tower_source(suffixes_parser)
    suffixes_parser.add_argument('--level', type=int, default=1, help='Level n (default: 1)')
    suffixes_parser.add_argument('--alpha', help='Candidate for the suffix criterion')
    suffixes_parser.add_argument('--field', help='Field for --alpha')
    suffixes_parser.add_argument('--N', dest='N', type=int, help='Last level of the criterion')

    # Diagnostic command
    diagnostic_parser = subparsers.add_parser('diagnostic', help='Convergence series of h_n mu_m - P_{n,m}')
    _add_tower_source(diagnostic_parser)
    diagnostic_parser.add_argument('--m', dest='m', type=int, help='Base level m')
    diagnostic_parser.add_argument('--N', dest='N', type=int, help='Last level N')

    # Catalog command
    subparsers.add_parser('catalog', help='List built-in systems')

    # Admissible command
    admissible_parser = subparsers.add_parser('admissible',
                                              help='Group-level admissibility of an eigenvalue group')
    _add_group_source(admissible_parser)
    admissible_parser.add_argument('--ggens', required=True, help='Generators of the candidate group')

    return parser


def _add_tower_source(subparser):
    source = subparser.add_mutually_exclusive_group(required=True)
    source.add_argument('--catalog', '-c', help='Built-in system name')
    source.add_argument('--spec', '-s', help='DiagramSpec JSON file')
    subparser.add_argument('--levels', type=int, help='Levels to build')
    subparser.add_argument('--telescope-bound', dest='telescope_bound', type=int,
                           help='Raw levels composed at most to reach positivity')


def _add_battery_args(subparser):
    subparser.add_argument('--m', dest='m', type=int, help='Base level m (default: 2)')
    subparser.add_argument('--N', dest='N', type=int, help='Deepest level N (default: 30)')
    subparser.add_argument('--depth', type=int, help='Depth of the rational membership search')
    subparser.add_argument('--eps', help='Target width of enclosures (p/q)')
    subparser.add_argument('--divergence-floor', dest='divergence_floor',
                           help='Lower bound separating divergence evidence from decay (p/q)')


def _add_group_source(subparser):
    subparser.add_argument('--catalog', '-c', help='Group-level catalog entry (sec42, sec43)')
    subparser.add_argument('--level', type=int, help='Approximation level for sec42')
    subparser.add_argument('--field', help='Field of the generators, e.g. "x^2-5"')
    subparser.add_argument('--igens', help='Generators of I, comma separated')


def _load_config(parsed_args) -> CantorSpectraConfig:
    config = CantorSpectraConfig()
    if parsed_args.config_level != 'global':
        config.load_directory_config()
    config.apply_args(parsed_args)
    return config.validate()


def _load_tower(parsed_args, config, min_levels: int = 0) -> Tuple[Tower, Optional[CatalogEntry]]:
    entry = None
    if getattr(parsed_args, 'spec', None):
        spec = load_spec(parsed_args.spec)
    else:
        entry = lookup(parsed_args.catalog)
        spec = entry.spec()
    levels = max(config.get('levels'), min_levels)
    return build_tower(spec, levels, config.get('telescope_bound')), entry


def _parse_field(parsed_args, config):
    text = getattr(parsed_args, 'field', None)
    if not text:
        return None
    return field_from_string(text, max_degree=config.get('max_field_degree'),
                             check_irreducible=config.get('check_irreducible'))


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.replace(" ", ""))
    except (ValueError, ZeroDivisionError):
        raise SpecFormatError(f"Cannot parse rational {text!r}")


def _load_groups(parsed_args, config, need_e: bool):
    """(I, E) from a group-level catalog entry or from explicit generator lists."""
    if parsed_args.catalog:
        entry = lookup(parsed_args.catalog)
        if entry.kind != GROUP:
            raise SpecFormatError(f"Catalog entry {entry.name!r} has no group-level data")
        return entry.groups(parsed_args.level)
    if not parsed_args.igens or (need_e and not parsed_args.egens):
        raise SpecFormatError("Give --catalog or generator lists (--igens, --egens)")
    field_ = _parse_field(parsed_args, config)
    igens = parse_element_list(parsed_args.igens, field_)
    egens = parse_element_list(parsed_args.egens, field_) if need_e else []
    field_ = field_ or common_field(igens + egens)
    I = subgroup_from_generators(field_, igens)
    E = subgroup_from_generators(field_, egens) if need_e else None
    return I, E


def _run_measures(parsed_args, config, report) -> int:
    t, _ = _load_tower(parsed_args, config, parsed_args.level + 1)
    n = parsed_args.level
    report.add_result('tower', t.to_dict())
    report.add_result('ergodicity', ergodicity_certificate(t, config.get('depth')))
    try:
        measure = stationary_measure(t, config.get('max_field_degree'))
        values = measure.vector(n)
        report.add_result('perron_root', measure.perron_root)
        report.add_result('field', measure.field)
        report.add_result('measure', measure.measure_vector(n))
        report.add_result('measure_approx',
                          [v.enclosure(config.get('enclosure_bits')) for v in values])
        report.add_note(NOTE_EXACT)
    except CantorSpectraException as e:
        report.add_note(f"no exact measure: {e}")
    report.add_result('enclosure', measure_enclosure(t, n, config.get_fraction('eps')))
    report.add_note("enclosure: hull of P_{N,n}(l,k)/h_N(l) over l, valid for every invariant measure")
    return 0


def _run_eigen(parsed_args, config, report) -> int:
    m, N = config.get('m'), config.get('N')
    t, entry = _load_tower(parsed_args, config, N + 1)
    alpha = parse_element(parsed_args.alpha, _parse_field(parsed_args, config))
    declared = None
    if parsed_args.use_declared and entry is not None:
        declared = entry.declared_group()
    verdict, criteria = eigen_verdict(
        t, alpha, m, N, config.get('depth'), declared=declared,
        bits=config.get('enclosure_bits'), floor=config.get_fraction('divergence_floor'),
        max_degree=config.get('max_field_degree'))
    report.add_result('verdict', verdict)
    report.add_result('criteria', criteria)
    report.add_note(NOTE_EXACT)
    report.add_note(NOTE_INTERVAL)
    report.add_note("PassesUpTo(N) is evidence only; it is never a proof that alpha is an eigenvalue")
    if parsed_args.expect == 'eigen' and verdict.refuted:
        return 2
    if parsed_args.expect == 'refuted' and not verdict.refuted:
        return 2
    return 0


def _run_rational(parsed_args, config, report) -> int:
    t, _ = _load_tower(parsed_args, config)
    value = _parse_fraction(parsed_args.frac)
    result = rational_member(t, value.numerator, value.denominator, config.get('depth'))
    report.add_result('verdict', result.describe())
    report.add_result('membership', result)
    report.add_note(NOTE_EXACT)
    if parsed_args.expect == 'member' and not result.is_member:
        return 2
    if parsed_args.expect == 'non-member' and result.is_member:
        return 2
    return 0


def _run_invariants(parsed_args, config, report) -> int:
    t, _ = _load_tower(parsed_args, config, parsed_args.level)
    max_degree = config.get('max_field_degree')
    report.add_result('ergodicity', ergodicity_certificate(t, config.get('depth')))
    report.add_result('image_group', image_group(t, parsed_args.level, max_degree=max_degree))
    report.add_result('infinitesimals', infinitesimal_report(t, max_degree=max_degree))
    report.add_note(NOTE_EXACT)
    return 0


def _run_torsion(parsed_args, config, report) -> int:
    I, E = _load_groups(parsed_args, config, need_e=True)
    quotient = torsion_quotient(I, E)
    report.add_result('I', I)
    report.add_result('E', E)
    report.add_result('quotient', quotient)
    report.add_result('torsion_order', quotient.torsion_order)
    report.add_note(NOTE_EXACT)
    return 0


def _run_audit(parsed_args, config, report) -> int:
    m, N = config.get('m'), config.get('N')
    t, _ = _load_tower(parsed_args, config, N + 1)
    audit = torsion_audit(
        t, m, config.get('wbox'), config.get('kmax'), N, config.get('depth'),
        threads=config.get('threads'), bits=config.get('enclosure_bits'),
        floor=config.get_fraction('divergence_floor'),
        max_degree=config.get('max_field_degree'))
    report.add_result('audit', audit)
    report.add_result('flag_count', len(audit.flags))
    report.add_note(AUDIT_HEADER)
    report.add_note(NOTE_INTERVAL)
    return 0


def _run_suffixes(parsed_args, config, report) -> int:
    n = parsed_args.level
    N = config.get('N') if parsed_args.alpha else n
    t, _ = _load_tower(parsed_args, config, max(n, N) + 1)
    suffixes = suffix_vectors(t, n)
    report.add_result('suffix_vectors', {
        "level": n,
        "per_vertex": [{"vertex": l, "tails": suffixes.vectors[l], "attained": suffixes.attained(l)}
                       for l in range(len(suffixes.vectors))],
    })
    if parsed_args.alpha:
        alpha = parse_element(parsed_args.alpha, _parse_field(parsed_args, config))
        report.add_result('suffix_criterion', suffix_criterion(
            t, alpha, N, n, config.get('enclosure_bits'), config.get_fraction('divergence_floor')))
        report.add_note(NOTE_INTERVAL)
    return 0


def _run_diagnostic(parsed_args, config, report) -> int:
    m, N = config.get('m'), config.get('N')
    t, _ = _load_tower(parsed_args, config, N)
    report.add_result('diagnostic', convergence_diagnostic(
        t, m, N, bits=config.get('enclosure_bits'), max_degree=config.get('max_field_degree')))
    report.add_note(NOTE_INTERVAL)
    return 0


def _run_admissible(parsed_args, config, report) -> int:
    I, _ = _load_groups(parsed_args, config, need_e=False)
    gamma = parse_element_list(parsed_args.ggens, I.field)
    result = eigenvalue_group_admissibility(I, subgroup_from_generators(I.field, gamma, require_one=False))
    report.add_result('admissibility', result)
    report.add_result('admissible', result.admissible)
    report.add_note(NOTE_EXACT)
    return 0


def main(args=None) -> int:
    """Main entry point for the cantorspectra command-line tool."""
    parser = create_parser()
    parsed_args = parser.parse_args(args)

    # Enable verbose logging if requested
    if parsed_args.verbose:
        enable_verbose_logging(parsed_args.log_file)
    elif parsed_args.log_file:
        configure_logging(logging.INFO, parsed_args.log_file)

    # If no command is specified, show help
    if not parsed_args.command:
        parser.print_help()
        return 1

    started = time.perf_counter()
    try:
        config = _load_config(parsed_args)
        report = SpectraReport(command=parsed_args.command, version=__version__,
                               config=config.as_dict(), digits=config.get('report_digits'))

        # Handle commands
        if parsed_args.command == 'measures':
            exit_code = _run_measures(parsed_args, config, report)
        elif parsed_args.command == 'eigen':
            exit_code = _run_eigen(parsed_args, config, report)
        elif parsed_args.command == 'rational':
            exit_code = _run_rational(parsed_args, config, report)
        elif parsed_args.command == 'invariants':
            exit_code = _run_invariants(parsed_args, config, report)
        elif parsed_args.command == 'torsion':
            exit_code = _run_torsion(parsed_args, config, report)
        elif parsed_args.command == 'audit':
            exit_code = _run_audit(parsed_args, config, report)
        elif parsed_args.command == 'suffixes':
            exit_code = _run_suffixes(parsed_args, config, report)
        elif parsed_args.command == 'diagnostic':
            exit_code = _run_diagnostic(parsed_args, config, report)
        elif parsed_args.command == 'catalog':
            report.add_result('entries', catalog_listing())
            exit_code = 0
        elif parsed_args.command == 'admissible':
            exit_code = _run_admissible(parsed_args, config, report)
        else:
            parser.print_help()
            return 1

        if parsed_args.timing:
            report.set_timing(time.perf_counter() - started)

        fmt = config.get('format')
        if parsed_args.output:
            if not report.save_to_file(parsed_args.output, fmt):
                return 1
            logger.info(f"Report written to {parsed_args.output}")
        else:
            sys.stdout.write(report.render(fmt))
        return exit_code

    except CantorSpectraException as e:
        print(f"ERROR: {type(e).__name__}: {str(e)}", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"UNEXPECTED ERROR: {str(e)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
