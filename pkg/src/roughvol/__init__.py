"""Forward-start volatility swaps and forward smiles under rough Bergomi."""

__version__ = "0.1.0"

from .asymptotics import (
    DecayFit, DecaySeries, LimitConstants, compare_prediction, decay_series, decay_slope,
    limit_constants, malliavin_kernel, predicted_error,
)
from .black_scholes import bs_price, bs_vega, g_operator, h_operator, implied_vol, zero_vanna_strike
from .errors import *  # noqa: F401,F403
from .gaussian_process import (
    JointCovariance, TimeGrid, build_joint_covariance, fbm_autocovariance, fbm_bm_covariance, sample_paths,
)
from .pricing import (
    ForwardSmile, MCEstimate, SmileReport, forward_smile, price_forward_start_call, vol_swap_strike,
    zero_vanna_report,
)
from .rbergomi import MCConfig, ModelParams, SimulatedScenario, simulate_scenario, variance_path
