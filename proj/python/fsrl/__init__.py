"""Decentralized multi-agent dynamic spectrum access simulator."""

from fsrl._core import (
    NumericalFailure,
    VerificationFailure,
    binary_time_ref,
    cp1_reward,
    default_config,
    encode_state,
    fsrl_reward,
    jain,
    network_throughput,
    norm_cdf,
    norm_inv,
    quantile_huber_loss,
    risk_alpha,
    run_single,
    state_dim,
    step_adhoc,
    step_broadcast,
    tdl_likelihood,
    throughput,
    throughput_std,
    verify,
    wang_transform,
    weight,
)

__all__ = [
    "NumericalFailure",
    "VerificationFailure",
    "binary_time_ref",
    "cp1_reward",
    "default_config",
    "encode_state",
    "fsrl_reward",
    "jain",
    "network_throughput",
    "norm_cdf",
    "norm_inv",
    "quantile_huber_loss",
    "risk_alpha",
    "run_single",
    "state_dim",
    "step_adhoc",
    "step_broadcast",
    "tdl_likelihood",
    "throughput",
    "throughput_std",
    "verify",
    "wang_transform",
    "weight",
]
