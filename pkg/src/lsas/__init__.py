"""Link-level and analytic tools for multi-cell large-scale antenna systems.

Covers pilot-contaminated MMSE channel estimation, the MMSE-receiver uplink
sum-rate and its deterministic equivalent, and TDD reciprocity mismatch with
zero-forcing precoding.
"""

from .asymptotic import (AsymptoticRate, XiTable, c_inf, c_inf_special, c_limit,
                         deterministic_equivalent, xi_coeff, xi_table)
from .channel import (ChannelSet, CorrelationSet, assemble_channel, build_correlation,
                      covariances, draw_channels, gen_smallscale)
from .config import ExperimentSpec, load_config, parse_config, serialize_config
from .estimation import (EstimateSet, equivalent_channel_sample, error_covariance,
                         estimate_channels, estimate_statistics, interference_noise_cov,
                         mmse_estimate, observe_pilot)
from .exceptions import (ConfigError, DegenerateBoundError, ExperimentError, GeometryError,
                         SingularMatrixError, UnboundedLimitError)
from .experiments import ResultRow, distributed_vs_collocated, run_experiment
from .rate_mc import ErgodicRate, RateSample, ergodic_sumrate_mc, instantaneous_sumrate
from .reciprocity import (MismatchBound, MismatchConfig, RfGains, calibrated_zf_precoder,
                          downlink_sumrate, effective_channels, ergodic_mismatch,
                          mismatch_bound, normalized_loss, sample_rf_gains, zf_precoder)
from .scenario import (LargeScaleMap, Layout, Scenario, build_layout, compute_largescale,
                       drop_users, realize)

__version__ = "0.1.0"
