"""Contour drawing toolkit: stroke model, consensus matching, boundary
benchmark, min/mean multi-target loss, and a scored drawing game."""

from .strokes import (
    Point,
    Stroke,
    Drawing,
    DrawingFormatError,
    build_drawing,
    parse_drawing,
    serialize_drawing,
    resample_stroke,
    rasterize_drawing,
    rasterize_strokes,
    drawing_stats,
)
from .svg_import import SvgImportError, import_svg
from .raster import (
    BinaryMap,
    SoftMap,
    threshold,
    thin,
    nms,
    distance_transform,
    squared_distance_transform,
)
from .matching import Tolerance, MatchResult, match_pixels, pr_from_match, f1_score
from .consensus import ConsensusResult, consensus_drawings, stroke_match_fraction
from .bench import ImageEval, EvalSummary, evaluate_prediction, aggregate
from .mmloss import (
    LossConfig,
    TargetSet,
    LossBreakdown,
    DiscriminatorOracle,
    LogisticPixelDiscriminator,
    TinyModel,
    l1_term,
    gan_generator_term,
    mm_loss_eval,
    mm_loss_grad,
    train_toy,
    three_line_fixture,
)
from .game import (
    GameParams,
    RewardField,
    GameSession,
    generate_field,
    new_session,
    score_segment,
    finalize,
    classify_submission,
)

__version__ = "0.1.0"
