"""Frequency-domain image style mixing and GMM-smoothed feature style mixing."""

from .config import PRESETS, ConfigError, RunConfig
from .feature_mixer import (
    ChannelStats,
    MixParams,
    apply_stats,
    channel_stats,
    mix_features,
    mix_stats,
    shuffle_stats,
    smooth_feature_style_mix,
)
from .gmm import GmmModel, fit_gmm, smooth_stats, top_component
from .pipeline import RunReport, emit_report, run_manifest
from .rng import derive_stream, sample_beta, sample_omega
from .spectral import (
    PolarSpectrum,
    forward_dft,
    image_style_mix,
    mix_amplitude,
    polar_decompose,
    reconstruct_channel,
    recompose,
)
from .tensor_io import (
    FormatError,
    ManifestEntry,
    ManifestError,
    load_image,
    load_tensor,
    parse_manifest,
    save_image,
    save_tensor,
)

__version__ = "0.1.0"
