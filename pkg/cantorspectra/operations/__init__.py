"""
Operations package for cantorspectra.

This package provides the tower model, invariant measures, dimension-group
invariants, the eigenvalue criteria battery and the built-in catalog.
"""

from .tower import (
    DiagramSpec,
    SuffixSet,
    Tower,
    TowerPath,
    build_tower,
    enumerate_paths,
    explicit_spec,
    heights,
    load_spec,
    odometer_spec,
    path_height,
    path_vertices,
    products,
    stationary_spec,
    sturmian_spec,
    suffix_of_path,
    suffix_vectors,
    telescope,
)
from .measure import (
    ErgodicityCertificate,
    MeasureVector,
    StationaryMeasure,
    birkhoff_bound,
    ergodicity_certificate,
    is_primitive,
    measure_enclosure,
    perron_eigen,
    stationary_measure,
)
from .dimgroup import (
    AdmissibilityReport,
    InfinitesimalReport,
    RationalMembership,
    SubgroupOfR,
    eigenvalue_group_admissibility,
    image_group,
    infinitesimal_report,
    rational_member,
    subgroup_from_generators,
    torsion_quotient,
)
from .spectra import (
    AuditReport,
    Candidate,
    CriteriaReport,
    Decomposition,
    DiagnosticResult,
    Verdict,
    convergence_diagnostic,
    decompose,
    eigen_verdict,
    enumerate_candidates,
    orthogonality_test,
    return_phase,
    return_time,
    suffix_criterion,
    summability_test,
    torsion_audit,
)
from .catalog import CatalogEntry, catalog, catalog_listing, lookup

__all__ = [
    # Tower model
    'DiagramSpec',
    'SuffixSet',
    'Tower',
    'TowerPath',
    'build_tower',
    'enumerate_paths',
    'explicit_spec',
    'heights',
    'load_spec',
    'odometer_spec',
    'path_height',
    'path_vertices',
    'products',
    'stationary_spec',
    'sturmian_spec',
    'suffix_of_path',
    'suffix_vectors',
    'telescope',

    # Measures
    'ErgodicityCertificate',
    'MeasureVector',
    'StationaryMeasure',
    'birkhoff_bound',
    'ergodicity_certificate',
    'is_primitive',
    'measure_enclosure',
    'perron_eigen',
    'stationary_measure',

    # Dimension group
    'AdmissibilityReport',
    'InfinitesimalReport',
    'RationalMembership',
    'SubgroupOfR',
    'eigenvalue_group_admissibility',
    'image_group',
    'infinitesimal_report',
    'rational_member',
    'subgroup_from_generators',
    'torsion_quotient',

    # Eigenvalue criteria
    'AuditReport',
    'Candidate',
    'CriteriaReport',
    'Decomposition',
    'DiagnosticResult',
    'Verdict',
    'convergence_diagnostic',
    'decompose',
    'eigen_verdict',
    'enumerate_candidates',
    'orthogonality_test',
    'return_phase',
    'return_time',
    'suffix_criterion',
    'summability_test',
    'torsion_audit',

    # Catalog
    'CatalogEntry',
    'catalog',
    'catalog_listing',
    'lookup',
]
