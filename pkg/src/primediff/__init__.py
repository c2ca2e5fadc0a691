"""Workbench for difference sets avoiding shifted primes.

The package studies sets A of positive integers whose pairwise differences
never hit (p - 1) / d for a prime p.  It ships the arithmetic tables and
Dirichlet characters needed for Chebyshev sums in progressions, a discrete
Fourier layer with Farey arc dissections, exponential sums over von
Mangoldt weights, an energy-based density increment step, exact and
heuristic extremal-set search, and an iteration driver whose traces can be
independently re-certified.  The `primediff` console script exposes all of
it as reproducible, manifest-stamped experiments.
"""

from .arith import (
    ArithTables,
    DirichletCharacter,
    ExceptionalDatum,
    build_tables,
    characters_mod,
    euler_phi,
    is_prime,
    mobius_of,
    psi,
    psi_chi,
    ramanujan,
    tau,
    tau_closed_form,
    verify_inversion,
)
from .avoider import (
    ForbiddenSet,
    SearchResult,
    find_forbidden_pair,
    greedy_avoiding,
    growth_table,
    is_avoiding,
    max_avoiding_exact,
)
from .driver import (
    Budget,
    DensityIncrement,
    InnerProductStats,
    IterationConfig,
    LargeDOrSmallAlpha,
    SmallAlpha,
    SmallN,
    StructureFound,
    Trace,
    TraceStep,
    certify,
    inner_product_stats,
    iterate_once,
    run,
    trace_to_jsonl,
)
from .errors import (
    CertificationError,
    DomainError,
    EnergyShortfall,
    PreconditionError,
    ResourceError,
)
from .increment import (
    DensitySet,
    EnergyStats,
    EnergyTable,
    IncrementOutcome,
    Progression,
    averaging_projection,
    energy_table,
    extract_progression,
    l2_witness,
    rescale,
)
from .mangoldt import (
    BoundRow,
    MangoldtWeight,
    Prediction,
    lambda_hat_rational,
    major_prediction,
    major_sup_ratio,
    render_csv_rows,
    spectrum_report,
    vinogradov_bound,
)
from .spectral import (
    ArcFamily,
    FareyArc,
    IntegerSignal,
    SpectrumGrid,
    TorusPoint,
    arc_energy,
    convolve,
    dirichlet_approx,
    grid_spectrum,
    transform_at,
)

__version__ = "0.1.0"

__all__ = [
    "ArithTables",
    "ArcFamily",
    "BoundRow",
    "Budget",
    "CertificationError",
    "DensityIncrement",
    "DensitySet",
    "DirichletCharacter",
    "DomainError",
    "EnergyShortfall",
    "EnergyStats",
    "EnergyTable",
    "ExceptionalDatum",
    "FareyArc",
    "ForbiddenSet",
    "IncrementOutcome",
    "InnerProductStats",
    "IntegerSignal",
    "IterationConfig",
    "LargeDOrSmallAlpha",
    "MangoldtWeight",
    "Prediction",
    "PreconditionError",
    "Progression",
    "ResourceError",
    "SearchResult",
    "SmallAlpha",
    "SmallN",
    "SpectrumGrid",
    "StructureFound",
    "TorusPoint",
    "Trace",
    "TraceStep",
    "arc_energy",
    "averaging_projection",
    "build_tables",
    "certify",
    "characters_mod",
    "convolve",
    "dirichlet_approx",
    "energy_table",
    "euler_phi",
    "extract_progression",
    "find_forbidden_pair",
    "greedy_avoiding",
    "grid_spectrum",
    "growth_table",
    "inner_product_stats",
    "is_avoiding",
    "is_prime",
    "iterate_once",
    "l2_witness",
    "lambda_hat_rational",
    "major_prediction",
    "major_sup_ratio",
    "max_avoiding_exact",
    "mobius_of",
    "psi",
    "psi_chi",
    "ramanujan",
    "render_csv_rows",
    "rescale",
    "run",
    "spectrum_report",
    "tau",
    "tau_closed_form",
    "trace_to_jsonl",
    "transform_at",
    "verify_inversion",
    "vinogradov_bound",
]
