"""Link diagrams in the real projective space.

Combinatorial diagrams on a disk with antipodal boundary identification,
descending-diagram data and crossing-change planning, Reidemeister-move
simplification to canonical unknot and unlink form, and an exact bracket
polynomial certifier.
"""

from .diagram import (
    AFTER,
    BEFORE,
    FORWARD,
    OVER,
    REVERSED,
    UNDER,
    BoundaryPass,
    CrossingPass,
    Diagram,
    DiagramError,
    PointRef,
    arc_distance,
    arcs_of,
    components_of,
    crossing_partition,
    crossings_between,
    first_pass,
    homology_class,
    local_writhe,
    net_of,
    self_crossings,
    total_writhe,
)
from .codec import (
    EmbeddingReport,
    ParseError,
    parse_data,
    parse_diagram,
    serialize_data,
    serialize_diagram,
    validate_embedding,
    validate_structural,
)
from .descend import (
    CrossingChangePlan,
    DashedPart,
    DescendError,
    DescendingData,
    SimplifyingSet,
    apply_plan,
    build_simplifying_set,
    check_descending,
    check_descending_knot,
    check_simple_descending,
    check_simplifying_set,
    classify_crossing,
    crossing_leq,
    dashed_part_of,
    default_data,
    extract_simple_diagram,
    label_simple_components,
    orientation_determined_by,
    parse_plan,
    plan_descending,
    plan_descending_knot,
    serialize_plan,
)
from .invariant import (
    DELTA,
    MU,
    ONE,
    BracketPolynomial,
    bracket,
    equivalent_up_to_unit,
    poly,
)
from .moves import (
    MoveError,
    MoveSite,
    MoveTrace,
    apply_move,
    diagram_hash,
    find_sites,
    parse_trace,
    recognize_standard_unlink,
    replay_trace,
    serialize_trace,
    simplify_descending,
)
from .genlib import (
    four_line_diagrams,
    oriented_standard_unlink,
    random_diagram,
    standard_unlink,
)

__all__ = [name for name in dir() if not name.startswith("_")]
