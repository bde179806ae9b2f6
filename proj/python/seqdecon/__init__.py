"""Streaming spectral deconvolution from sequences of blurred, noisy,
resolution-limited observations.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from seqdecon._core import (  # noqa: F401
    AveragedStat,
    ConsistentVariance,
    Rng,
    SpectralBasis,
    StateDoc,
    SufStat,
    TailVariance,
    b_bar,
    b_statistic,
    dense_operator,
    diagonalize,
    epsilon_tail,
    estimate,
    from_spectral,
    gamma_n,
    gcv_select_tau,
    gen_theta_peaked,
    gen_theta_smooth,
    merge,
    omega_sq,
    oracle_risks,
    oracle_weights,
    psi_hat,
    ridge_estimate,
    ridge_weights,
    risk_estimate,
    rr,
    run_experiment,
    sample_kernel,
    sample_random_eigenvalues,
    simulate_observation_x,
    simulate_observation_y,
    to_spectral,
    to_spectral_complex,
    true_risk,
    validate_shared_diagonalization,
    weights_li,
    weights_main,
    weights_monotone,
    weights_soft,
    weights_tp,
)

__all__ = [name for name in dir() if not name.startswith("_")]
