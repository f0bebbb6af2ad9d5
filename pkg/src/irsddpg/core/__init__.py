"""Physical-layer model: channels, MMSE reception, rates and feasibility maps."""

from irsddpg.core.channels import (
    complex_gaussian,
    sample_channel_list,
    sample_channels,
    sample_irs_bs_channel,
    sample_user_channels,
    steering_vector,
)
from irsddpg.core.feasibility import (
    circular_error,
    mrt_precoder,
    normalize_precoders,
    project_unit_modulus,
    quantize_phases,
    random_irs,
    random_precoders,
)
from irsddpg.core.rates import (
    effective_channel,
    effective_channels,
    filter_mse,
    mmse_filter,
    sum_rate,
    sum_rate_value,
    user_rate,
)
from irsddpg.core.system import ChannelSet, IrsPhaseVector, PrecoderSet, RateReport, SystemConfig

__all__ = [
    "ChannelSet",
    "IrsPhaseVector",
    "PrecoderSet",
    "RateReport",
    "SystemConfig",
    "circular_error",
    "complex_gaussian",
    "effective_channel",
    "effective_channels",
    "filter_mse",
    "mmse_filter",
    "mrt_precoder",
    "normalize_precoders",
    "project_unit_modulus",
    "quantize_phases",
    "random_irs",
    "random_precoders",
    "sample_channel_list",
    "sample_channels",
    "sample_irs_bs_channel",
    "sample_user_channels",
    "steering_vector",
    "sum_rate",
    "sum_rate_value",
    "user_rate",
]
