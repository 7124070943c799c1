//! Analytic stabilizer decay near the Clifford point θ_h = π/2.
//!
//! Residual couplings away from θ_h = π/2 act as random X' rotations with
//! variance `(δα)²`, flipping the stabilizer sign with probability
//! `p₀ = ½(1 − exp(−2(δα)²))` per step. After `t` steps
//! `⟨Z'(t)⟩ = (1 − 2p₀)^t = exp[−t(π²/2)(1 − 2θ_h/π)²]`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::stochastic::{sample_chunks, Estimate, Moments};

/// Interpolation of `(δα)²` between its anchors (π²/4 at θ_h = 0, 0 at θ_h = π/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaVariance {
    /// `(π²/4)(1 − 2θ_h/π)²`; consistent with the exponential decay law.
    #[default]
    Squared,
    /// `(π²/4)(1 − 2θ_h/π)`; kept for comparison only.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizerParams {
    pub theta_h: f64,
    pub steps: usize,
}

impl StabilizerParams {
    pub fn new(theta_h: f64, steps: usize) -> Result<Self> {
        check_theta(theta_h)?;
        Ok(StabilizerParams { theta_h, steps })
    }
}

fn check_theta(theta_h: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta_h) {
        return Err(Error::validation(format!(
            "theta_h = {theta_h} outside [0, pi/2]"
        )));
    }
    Ok(())
}

pub fn alpha_variance(theta_h: f64) -> Result<f64> {
    alpha_variance_with(theta_h, AlphaVariance::Squared)
}

pub fn alpha_variance_with(theta_h: f64, form: AlphaVariance) -> Result<f64> {
    check_theta(theta_h)?;
    let u = 1.0 - 2.0 * theta_h / PI;
    let base = PI * PI / 4.0;
    Ok(match form {
        AlphaVariance::Squared => base * u * u,
        AlphaVariance::Linear => base * u,
    })
}

pub fn flip_probability(theta_h: f64) -> Result<f64> {
    flip_probability_with(theta_h, AlphaVariance::Squared)
}

pub fn flip_probability_with(theta_h: f64, form: AlphaVariance) -> Result<f64> {
    let v = alpha_variance_with(theta_h, form)?;
    Ok(-0.5 * (-2.0 * v).exp_m1())
}

/// `(1 − 2p₀)^t`.
pub fn stabilizer_expectation(params: &StabilizerParams) -> f64 {
    stabilizer_expectation_with(params, AlphaVariance::Squared)
}

pub fn stabilizer_expectation_with(params: &StabilizerParams, form: AlphaVariance) -> f64 {
    let p0 = flip_probability_with(params.theta_h, form).expect("params validated on construction");
    powu(1.0 - 2.0 * p0, params.steps)
}

/// `exp[−t(π²/2)(1 − 2θ_h/π)²]`, the closed exponential form.
pub fn stabilizer_expectation_closed_form(params: &StabilizerParams) -> f64 {
    let u = 1.0 - 2.0 * params.theta_h / PI;
    (-(params.steps as f64) * PI * PI / 2.0 * u * u).exp()
}

fn powu(base: f64, exp: usize) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}

/// Monte Carlo of the ±1 chain that starts at +1 and flips with probability
/// `p₀` each step. Deterministic per seed for any worker count.
pub fn flip_process_simulate(
    params: &StabilizerParams,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if n_samples == 0 {
        return Err(Error::validation("n_samples must be >= 1"));
    }
    let p0 = flip_probability(params.theta_h)?;
    let steps = params.steps;
    let parts = sample_chunks(n_samples, seed, |rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            let mut sign = 1.0;
            for _ in 0..steps {
                if rng.random::<f64>() < p0 {
                    sign = -sign;
                }
            }
            m.push(sign);
        }
        m
    });
    Ok(parts
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .estimate())
}
