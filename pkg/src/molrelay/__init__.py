"""molrelay: link-level analytics and Monte Carlo simulation for
diffusion-based cooperative molecular nano-networks.

Layers, bottom up:

channel     free-diffusion peak-concentration arithmetic (CGS units)
detection   relay LRT, linear destination fusion, exact mixture LRT
analytics   closed-form end-to-end error probabilities and baselines
simulator   seedable counter-based Monte Carlo of the full chain
config      JSON scenario schema, presets
sweep       experiment runner producing the fixed CSV contract
cli         `molrelay` command-line entry point
"""

from .channel import (
    Emission,
    Link,
    Medium,
    MuiModel,
    impulse_response,
    mui_from_interferers,
    peak_gain,
    peak_time,
)
from .detection import (
    DetectionPerformance,
    FusionBranch,
    FusionWeights,
    RelayDetector,
    build_fusion_weights,
    build_relay_detector,
    exact_destination_decide,
    exact_destination_llr,
    fusion_decide,
    log_q_function,
    q_function,
    relay_decide,
    relay_performance,
)
from .analytics import (
    NetworkConfig,
    PerformanceReport,
    RelayHop,
    analytic_pe_cooperative,
    analytic_pe_miso,
    analytic_pe_simo,
    analytic_pe_siso,
    destination_detection,
    performance_report,
)
from .simulator import (
    DetectorComparison,
    McEstimate,
    TrialOutcome,
    compare_detectors,
    estimate_pe,
    run_trial,
)

__version__ = "0.1.0"
