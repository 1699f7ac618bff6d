"""
cantorspectra - Eigenvalue analysis for minimal Cantor systems

Builds Kakutani-Rohlin tower sequences from Bratteli diagram data and
computes exact invariants: invariant measures, image and infinitesimal
subgroups, rational subgroup membership and verdicts on candidate
additive eigenvalues.
"""

import os
import logging

__version__ = "0.1.0"

# Set up package-level logger
logger = logging.getLogger(__name__)
logger.setLevel(logging.WARNING)

# Create console handler if not already present
if not logger.handlers:
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(
        logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    )
    logger.addHandler(console_handler)

# Import core functionality
from .exceptions import (
    CantorSpectraException,
    FieldError,
    LatticeError,
    MeasureError,
    PreconditionError,
    SpecFormatError,
    TowerError,
)
from .config import CantorSpectraConfig
from .data import SpectraReport, encode
from .exactnum import (
    FieldElement,
    IntervalReal,
    NumberField,
    RATIONALS,
    field_create,
    field_from_string,
    parse_element,
    quadratic_field,
)
from .intlattice import QLattice, hnf, lattice_member, quotient_invariants, snf
from .operations import (
    DiagramSpec,
    SubgroupOfR,
    Tower,
    build_tower,
    eigen_verdict,
    enumerate_candidates,
    ergodicity_certificate,
    image_group,
    infinitesimal_report,
    lookup,
    rational_member,
    stationary_measure,
    torsion_audit,
    torsion_quotient,
)


def load_tower(name_or_spec, levels=32, telescope_bound=10):
    """
    Build a tower from a catalog name, a spec file path or a DiagramSpec.

    Args:
        name_or_spec: Catalog name, path to a JSON spec file, or DiagramSpec
        levels: Number of levels to build
        telescope_bound: Raw levels composed at most to reach positivity

    Returns:
        Tower
    """
    from .operations import load_spec

    if isinstance(name_or_spec, DiagramSpec):
        spec = name_or_spec
    elif os.path.isfile(str(name_or_spec)):
        spec = load_spec(str(name_or_spec))
    else:
        spec = lookup(str(name_or_spec)).spec()
    return build_tower(spec, levels, telescope_bound)


def check_eigenvalue(name_or_spec, alpha, m=2, N=30, levels=32):
    """
    Run the eigenvalue criteria battery on one candidate.

    Args:
        name_or_spec: Catalog name, spec file path or DiagramSpec
        alpha: Candidate as text (e.g. "(-1+sqrt(5))/2") or FieldElement
        m: Base level for the decomposition
        N: Last level inspected

    Returns:
        Verdict
    """
    t = load_tower(name_or_spec, levels=max(levels, N + 1))
    if not isinstance(alpha, FieldElement):
        alpha = parse_element(str(alpha))
    verdict, _ = eigen_verdict(t, alpha, m, N)
    return verdict


def configure_logging(level=logging.INFO, log_file=None):
    """
    Configure logging for cantorspectra

    Args:
        level: Logging level (default: INFO)
        log_file: Path to log file (if None, only console logging is used)
    """
    logger.setLevel(level)

    # Clear existing handlers
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(
        logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    )
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(
            logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        )
        logger.addHandler(file_handler)


def enable_verbose_logging(log_file=None):
    """
    Enable verbose (debug) logging
    """
    configure_logging(logging.DEBUG, log_file)
    # Also set environment variable for modules that check it directly
    os.environ['CANTOR_SPECTRA_VERBOSE'] = '1'


# Export public API
__all__ = [
    # Exceptions
    'CantorSpectraException',
    'FieldError',
    'LatticeError',
    'MeasureError',
    'PreconditionError',
    'SpecFormatError',
    'TowerError',

    # Classes
    'CantorSpectraConfig',
    'SpectraReport',
    'FieldElement',
    'IntervalReal',
    'NumberField',
    'QLattice',
    'DiagramSpec',
    'SubgroupOfR',
    'Tower',
    'RATIONALS',

    # Exact arithmetic and lattices
    'encode',
    'field_create',
    'field_from_string',
    'parse_element',
    'quadratic_field',
    'hnf',
    'snf',
    'lattice_member',
    'quotient_invariants',

    # Tower analysis
    'build_tower',
    'eigen_verdict',
    'enumerate_candidates',
    'ergodicity_certificate',
    'image_group',
    'infinitesimal_report',
    'lookup',
    'rational_member',
    'stationary_measure',
    'torsion_audit',
    'torsion_quotient',

    # High-level functions
    'load_tower',
    'check_eigenvalue',

    # Utility functions
    'configure_logging',
    'enable_verbose_logging',

    # Version
    '__version__'
]
