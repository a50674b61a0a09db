"""Image-quality, photorealism, and alignment metrics with Likert-scale
rescaling and human-MOS comparison reports."""

from .alignment import (
    AlignmentRow,
    MosRecord,
    build_comparison_table,
    cosine_alignment,
    mad,
    mape,
    read_metric_csv,
    read_mos_csv,
)
from .errors import (
    ConfigError,
    DecodeError,
    DegenerateInputError,
    IngestionError,
    PairResolutionError,
    VerityError,
)
from .features import (
    FeatureLayer,
    FeatureMatrix,
    KernelParams,
    LayeredFeatures,
    ProbMatrix,
    builtin_feature_provider,
    extract_features_builtin,
    fid,
    inception_score,
    kid,
    load_features,
    load_probabilities,
    lpips_distance,
    matrix_sqrt_psd,
    perceptual_distance,
)
from .ibs import (
    IbsBin,
    IbsTable,
    LIKERT_LABELS,
    builtin_tables,
    default_table_path,
    ibs_scale,
    likert_of_score,
    load_ibs_tables,
)
from .image import (
    GrayImage,
    Histogram,
    ImageBuffer,
    gray_histogram,
    load_image,
    resize_bilinear,
    to_gray,
    to_hsv,
)
from .imagestats import ImageStats, aggregate_stats, image_stats
from .nfss import (
    NfssComponents,
    NfssConfig,
    default_patch_sizes,
    nfss_alpha,
    nfss_evaluate,
    nfss_score,
)
from .pixel_metrics import (
    MsSsimParams,
    PSNR_SENTINEL_DB,
    SsimParams,
    entropy,
    hist_correlation,
    ms_ssim,
    psnr,
    ssim,
    ssim_patch_mean,
    vif,
)

__version__ = "0.1.0"
