"""Core-set selection that keeps a public task working while hiding or
misleading a secret one.

Two experiment families:

* regression: select the rows whose public-model residual plus hide penalty
  is smallest, so least-squares fits on the published subset still predict
  the public target but fail (or recover a planted decoy) on the secret one;
* classification: score rows by per-example gradient norms from two label
  granularities and select class-balanced subsets that starve one task while
  feeding the other.

Plus a small mean-preserving, dispersion-inflating subset selector for
scalar samples.
"""

from .classifier import (
    TASK_COARSE,
    TASK_FINE,
    TASKS,
    GradientTrace,
    SoftmaxClassifier,
    TrainConfig,
    accuracy,
    example_gradient_norms,
    train_tracer,
)
from .dataset import (
    DEFAULT_HIERARCHY,
    ROLE_COARSE,
    ROLE_FINE,
    ROLE_PUBLIC,
    ROLE_SECRET,
    Dataset,
    GeneratorManifest,
    HierarchySpec,
    gen_hierarchical,
    gen_linear,
    gen_normal_scalar,
    read_csv,
    read_manifest,
    stratified_split,
    write_csv,
    write_manifest,
)
from .errors import (
    ConstantTargetError,
    CsvParseError,
    EmptyClassError,
    InfeasibleSelectionError,
    UnderdeterminedError,
)
from .linear import (
    LeastSquaresRegressor,
    LinearModel,
    fit_least_squares,
    r_squared,
    score_model,
)
from .masking import (
    CONSTRUCTION_COARSE_MASKING,
    CONSTRUCTION_FINE_MASKING,
    CONSTRUCTION_MIN_NORM_COARSE,
    CONSTRUCTION_MIN_NORM_FINE,
    CONSTRUCTION_RANDOM,
    CONSTRUCTIONS,
    EPSILON,
    MaskingCoreSetSelector,
    ScoreVector,
    TaskPairReport,
    class_balanced_select,
    evaluate_coreset,
    make_scores,
)
from .pipelines import (
    BucketSweepReport,
    LinearPipelineReport,
    MaskPipelineReport,
    canonical_json,
    cosine_similarity,
    render,
    render_text,
    run_bucket_seeds,
    run_bucket_sweep,
    run_linear_pipeline,
    run_linear_seeds,
    run_mask_pipeline,
    run_mask_seeds,
    summarize_bucket_runs,
    summarize_linear_runs,
    summarize_mask_runs,
)
from .rng import derive_seed, stream
from .selection import (
    HIDE_MODES,
    HIDE_NONE,
    HIDE_PLANT,
    HIDE_VALUE,
    PLANT_AGAINST_PUBLIC,
    PLANT_AGAINST_SECRET,
    CoreSet,
    HideConfig,
    PrivacyCoreSetSelector,
    make_plant,
    point_losses,
    select_bottom_k,
    select_moment_coreset,
)

__version__ = "0.1.0"

__all__ = [
    "TASK_COARSE",
    "TASK_FINE",
    "TASKS",
    "GradientTrace",
    "SoftmaxClassifier",
    "TrainConfig",
    "accuracy",
    "example_gradient_norms",
    "train_tracer",
    "DEFAULT_HIERARCHY",
    "ROLE_COARSE",
    "ROLE_FINE",
    "ROLE_PUBLIC",
    "ROLE_SECRET",
    "Dataset",
    "GeneratorManifest",
    "HierarchySpec",
    "gen_hierarchical",
    "gen_linear",
    "gen_normal_scalar",
    "read_csv",
    "read_manifest",
    "stratified_split",
    "write_csv",
    "write_manifest",
    "ConstantTargetError",
    "CsvParseError",
    "EmptyClassError",
    "InfeasibleSelectionError",
    "UnderdeterminedError",
    "LeastSquaresRegressor",
    "LinearModel",
    "fit_least_squares",
    "r_squared",
    "score_model",
    "CONSTRUCTION_COARSE_MASKING",
    "CONSTRUCTION_FINE_MASKING",
    "CONSTRUCTION_MIN_NORM_COARSE",
    "CONSTRUCTION_MIN_NORM_FINE",
    "CONSTRUCTION_RANDOM",
    "CONSTRUCTIONS",
    "EPSILON",
    "MaskingCoreSetSelector",
    "ScoreVector",
    "TaskPairReport",
    "class_balanced_select",
    "evaluate_coreset",
    "make_scores",
    "BucketSweepReport",
    "LinearPipelineReport",
    "MaskPipelineReport",
    "canonical_json",
    "cosine_similarity",
    "render",
    "render_text",
    "run_bucket_seeds",
    "run_bucket_sweep",
    "run_linear_pipeline",
    "run_linear_seeds",
    "run_mask_pipeline",
    "run_mask_seeds",
    "summarize_bucket_runs",
    "summarize_linear_runs",
    "summarize_mask_runs",
    "derive_seed",
    "stream",
    "HIDE_MODES",
    "HIDE_NONE",
    "HIDE_PLANT",
    "HIDE_VALUE",
    "PLANT_AGAINST_PUBLIC",
    "PLANT_AGAINST_SECRET",
    "CoreSet",
    "HideConfig",
    "PrivacyCoreSetSelector",
    "make_plant",
    "point_losses",
    "select_bottom_k",
    "select_moment_coreset",
]
