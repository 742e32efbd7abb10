"""timecat: timed process theories as duoid-graded diagrams and pinwheel cells."""

from .duoid import (
    MAX_PLUS,
    MIN_PLUS_BROKEN,
    TRIVIAL,
    DuoidSpec,
    Grade,
    LawReport,
    check_duoid_laws,
    grade_leq,
    par_grade,
    seq_grade,
)
from .signature import (
    CellDecl,
    DoubleSignature,
    Edge,
    Generator,
    Path,
    PolygraphMorphism,
    SignatureError,
    SignatureMorphism,
    TimedPolygraph,
    apply_polygraph_morphism,
    apply_signature_morphism,
    draw,
    draw_morphism,
    validate_polygraph,
)
from .tilted import (
    CellGen,
    InterpretOps,
    Slice,
    SliceTerm,
    TermError,
    TwoGraph,
    compose_terms,
    identity_term,
    interpret,
    normalize,
    terms_equal,
    tilt,
    whisker,
)
from .pinwheel import (
    BRAID_NATURALITY,
    SIGMA_CANCEL,
    CellError,
    KleisliMap,
    PinwheelCell,
    RewriteRule,
    RuleError,
    SkewCellError,
    apply_quotient_rewrites,
    canonical_bundle,
    cell_from_generator,
    cells_equal,
    compose_kleisli,
    default_rules,
    duration,
    flatten,
    hcompose,
    identity_cell_h,
    identity_cell_v,
    is_cell_at,
    pinwheel_unit,
    vcompose,
)
from .tiling import (
    BraidMark,
    NonSweepableError,
    OverlapOrGapError,
    Tile,
    Tiling,
    TilingError,
    WireSeg,
    assemble_tiling,
    is_binary_composable,
    validate_tiling,
)
from .network import (
    Network,
    NetworkError,
    asap_starts,
    canonical_cell,
    network_from_term,
    network_from_tiling,
    network_makespan,
    scheduled_tiling,
)
from .graded import (
    CycleError,
    DagNode,
    DepDAG,
    Diagram,
    Gen,
    Id,
    LayoutError,
    Par,
    Regrade,
    Seq,
    Sym,
    TypingError,
    UnitId,
    axioms_check,
    compile_cell,
    dag_from_network,
    earliest_starts,
    eq_semantic,
    grade,
    implicit_polygraph,
    makespan,
    makespan_by_enumeration,
    makespan_dp,
    to_dag,
    to_pinwheel,
    typecheck,
    wait,
    weak_interchange,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
