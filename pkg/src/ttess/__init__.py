"""T-tessellations on fixed line sets.

Enumeration of every T-tessellation a line set supports, reconstruction
from two labelling schemes, combinatorial count bounds, and Monte-Carlo
estimation of the Gibbs tessellation mass.
"""

from .cells import Cell, extract_cells
from .enumeration import CountSurvey, count_survey, enumerate_all, grid_lines
from .errors import (
    BudgetExceeded,
    DegenerateConfiguration,
    InconsistentScheme,
    InvalidReduction,
    InvalidTessellation,
    MalformedMarks,
    NonTermination,
    SchemeViolation,
    StabilityViolation,
    TTessError,
)
from .geometry import (
    BAND_MARGIN,
    BORDER,
    Event,
    EventKind,
    EventTable,
    Line,
    Window,
    build_event_table,
    build_scene,
    choose_time_axis,
    horizontal_line,
    sample_poisson_lines,
    sample_uniform_lines,
    unit_square,
    vertical_line,
)
from .gibbs import (
    AreaVariance,
    BoundSeries,
    Composite,
    FourKBound,
    NLines,
    PartitionEstimate,
    RateBound,
    TotalLength,
    energy,
    estimate_partition,
    parse_energy,
    partition_series_bound,
)
from .reconstruct import (
    CertifiedScheme2,
    CutResult,
    RebuildResult,
    ReconstructionDiff,
    Scheme1,
    Scheme2,
    build_scheme2,
    cutting,
    extract_scheme1,
    extract_scheme2,
    initial_pretessellation,
    parent_seek,
    rebuild_from_scheme1,
    rebuild_from_scheme2,
    refine_orphans,
    select_initial_orphans,
    validate_scheme2,
    virtual_murder_counts,
)
from .render import render_svg
from .tessellation import (
    BirthTree,
    Classification,
    Pretessellation,
    Prototessellation,
    TTessellation,
    ValidationReport,
    Violation,
    birth_tree,
    death_tree,
    marks_from_trees,
    murder_counts,
    other_children_counts,
    require_ttessellation,
    validate,
)

__version__ = "0.1.0"
