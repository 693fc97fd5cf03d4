"""Wasserstein-based performance and robustness analysis of stochastic jump linear systems."""

from .exceptions import (
    ClassMismatch,
    ComponentExplosion,
    ConfigError,
    DimensionMismatch,
    JumpWassError,
    KernelInvalid,
    NotPSD,
    NotStochastic,
    NumericalFailure,
    SemanticsUnsupported,
    WeightInvalid,
    WindowTooLarge,
)
from .gaussian_mixture import Gaussian, GaussianMixture, mix, moment_match, pushforward, sample
from .jump_process import (
    IIDProcess,
    MarkovProcess,
    SemiMarkovProcess,
    compose_independent,
    embed_semi_markov,
    occupation_sequence,
    sample_mode,
    step_markov,
)
from .monte_carlo import MomentEstimate, SimulationConfig, ms_stability_check, simulate
from .propagation import (
    SJLS,
    WTrajectory,
    analyze,
    exact_propagate,
    exact_w_series,
    merge_step,
    split_step,
)
from .wasserstein import w2_gaussian_to_dirac, w2_gaussians, w2_mixture_to_dirac

__version__ = "0.1.0"
