"""fusecraft: pixel-level grayscale image fusion and quality metrics.

Two fusion engines share one pipeline: a rule-based Mamdani system with
centroid defuzzification, and a grid-partitioned Sugeno system trained
by hybrid least-squares / gradient descent. Ten quality indices score
the results, and the CLI (``fusecraft``) wraps fuse / evaluate / compare.
"""

from ._version import __version__
from .anfis import (
    AllRulesSilentWarning,
    AnfisSettings,
    SugenoFis,
    TrainingReport,
    default_training_data,
    forward,
    grid_partition,
    load_model,
    lse_consequents,
    predict,
    premise_gradient_step,
    save_model,
    train_hybrid,
)
from .config import (
    config_digest,
    default_anfis_settings,
    default_fuzzy_fis,
    engine_to_doc,
    parse_config,
    parse_config_text,
)
from .fuzzy import (
    FuzzyRule,
    Gaussian,
    GeneralizedBell,
    LinguisticVariable,
    MamdaniFis,
    MembershipFunction,
    Trapezoidal,
    Triangular,
    build_fis,
    default_fis,
    default_rule_base,
    evaluate,
    evaluate_lut,
    membership,
)
from .image_io import (
    Image,
    PixelColumn,
    crop_to_common,
    from_column,
    load_image,
    save_image,
    to_column,
)
from .metrics import (
    MetricsReport,
    correlation_coefficient,
    entropy,
    evaluate_all,
    fusion_factor,
    fusion_index,
    fusion_symmetry,
    histogram,
    image_quality_index,
    joint_histogram,
    mutual_information,
    psnr,
    rmse,
    spatial_frequency,
)
from .pipeline import FusionJob, fuse_fuzzy, fuse_neuro_fuzzy, run_job

__all__ = [name for name in dir() if not name.startswith("_")]
