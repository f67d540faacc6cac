"""Adversarial generation of binary sequences that miscalibrate partial forecasters.

The package builds a flow network on the binary tree stage by stage, turns it
into a random generator of outcome sequences, and audits the resulting
semimeasure and the selection rules that expose each registered forecaster.
"""
from .core import indicator, pair, schedule, unpair
from .forecasters import (
    Constant,
    Delayed,
    ForecasterProgram,
    Laplace,
    Markov,
    Parity,
    TwoPoint,
    UndefinedAfter,
    approx_below,
    hard_bit,
    load_pool,
    sample_forecast,
    weak_pdf,
)
from .netflow import Edge, Network, bar_Q, flow_R, semimeasure_Q, support_member, validate
from .construction import BuildParams, beta_min, build_network, build_step, relation_B, w_index
from .sampler import Halted, Reached, generate, reach_mass
from .checking import Always, GammaRule, JRule, Never, Product, calib_deviation, oakes_sequence
from .analysis import audit_S_series, hard_portion_oracle, martingale_check, miscalibration_experiment

__version__ = "0.1.0"
