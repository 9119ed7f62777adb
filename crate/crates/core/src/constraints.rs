//! Constraint slacks of the EE problem.
//!
//! Every constraint is affine in `P_ce` for fixed reflection coefficients,
//! which is what makes [`power_floor`] a closed form.

use crate::error::{Constraint, Error, Result};
use crate::params::SystemParams;
use crate::rate_model::{sinr_pair, ApproxCoeffs};
use crate::scenario::ScenarioChannel;

/// Relative tolerance used when re-checking a solution.
pub const REL_TOL: f64 = 1e-9;
/// Absolute tolerance on the harvest constraint, in watts.
pub const HARVEST_TOL_W: f64 = 1e-12;

/// SINR the exact rate needs: `2^(R_min / T_t,k) - 1`.
pub fn exact_sinr_target(params: &SystemParams, k: usize) -> f64 {
    (params.r_min / params.t_t[k]).exp2() - 1.0
}

/// `ℵ_k = (R_min - T_t,k Φ_k) / (T_t,k Π_k)`; the bounded rate meets `R_min`
/// iff `log2 γ_k ≥ ℵ_k`.
pub fn aleph(coeffs: &ApproxCoeffs, params: &SystemParams, k: usize) -> f64 {
    (params.r_min - params.t_t[k] * coeffs.phi[k]) / (params.t_t[k] * coeffs.pi[k])
}

/// SINR the bounded rate needs: `2^ℵ_k`.
pub fn approx_sinr_target(coeffs: &ApproxCoeffs, params: &SystemParams, k: usize) -> f64 {
    aleph(coeffs, params, k).exp2()
}

/// Interference-plus-noise seen by sensor `k`, in watts.
fn interference(
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    params: &SystemParams,
    k: usize,
) -> f64 {
    let noma = if k == 1 {
        p_ce_w * gammas[0] * channel.g_hat[0]
    } else {
        0.0
    };
    noma + channel.sigma2_e * p_ce_w * (gammas[0] + gammas[1]) + params.sigma2_n_w
}

/// `signal_k - target_k · interference_k` for both sensors, in watts.
pub fn qos_slack(
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    targets: [f64; 2],
    params: &SystemParams,
) -> [f64; 2] {
    [0, 1].map(|k| {
        p_ce_w * gammas[k] * channel.g_hat[k]
            - targets[k] * interference(p_ce_w, gammas, channel, params, k)
    })
}

/// Harvested power over both modes minus the circuit demand, in watts.
pub fn harvest_slack(
    p_ce_w: f64,
    gamma: f64,
    channel: &ScenarioChannel,
    params: &SystemParams,
    k: usize,
) -> f64 {
    let incident = p_ce_w * channel.g_f[k];
    params.xi * (1.0 - gamma) * incident * params.t_t[k] + params.xi * incident * params.t_h[k]
        - params.p_c_rs_w * params.t_t[k]
}

/// Smallest CE power meeting QoS (at the given SINR targets) and the harvest
/// constraint with `gammas` held fixed. Errors when no power up to `P_max`
/// works, naming the binding constraint.
pub fn power_floor(
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    targets: [f64; 2],
    params: &SystemParams,
) -> Result<f64> {
    let mut floor = 0.0f64;
    let mut binding = None;
    let e = channel.sigma2_e * (gammas[0] + gammas[1]);
    for k in 0..2 {
        let noma = if k == 1 {
            gammas[0] * channel.g_hat[0]
        } else {
            0.0
        };
        let slope = gammas[k] * channel.g_hat[k] - targets[k] * (noma + e);
        let c = if k == 0 {
            Constraint::QosSensor1
        } else {
            Constraint::QosSensor2
        };
        if slope <= 0.0 {
            return Err(Error::infeasible(c));
        }
        let need = targets[k] * params.sigma2_n_w / slope;
        if need > floor {
            floor = need;
            binding = Some(c);
        }
    }
    for k in 0..2 {
        let per_watt =
            params.xi * channel.g_f[k] * (params.t_t[k] * (1.0 - gammas[k]) + params.t_h[k]);
        let need = params.p_c_rs_w * params.t_t[k] / per_watt;
        if need > floor {
            floor = need;
            binding = Some(Constraint::Harvest(k + 1));
        }
    }
    if floor > params.p_max_w {
        return Err(Error::infeasible(binding.unwrap_or(Constraint::PowerCap)));
    }
    Ok(floor)
}

/// Every violated constraint of the original problem at `(P_ce, Γ)`, with
/// QoS checked on exact rates.
pub fn violations(
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> Vec<Constraint> {
    let mut out = Vec::new();
    let gamma = sinr_pair(p_ce_w, gammas, channel, params);
    for k in 0..2 {
        let rate = params.t_t[k] * (1.0 + gamma[k]).log2();
        if !(rate >= params.r_min * (1.0 - REL_TOL)) {
            out.push(if k == 0 {
                Constraint::QosSensor1
            } else {
                Constraint::QosSensor2
            });
        }
    }
    if !(p_ce_w >= 0.0 && p_ce_w <= params.p_max_w * (1.0 + REL_TOL)) {
        out.push(Constraint::PowerCap);
    }
    for k in 0..2 {
        if !(gammas[k] > 0.0 && gammas[k] <= 1.0) {
            out.push(Constraint::ReflectionRange(k + 1));
        }
    }
    for k in 0..2 {
        if gammas[k] > 0.0
            && gammas[k] <= 1.0
            && harvest_slack(p_ce_w, gammas[k], channel, params, k) < -HARVEST_TOL_W
        {
            out.push(Constraint::Harvest(k + 1));
        }
    }
    out
}

/// Allocation-free form of `violations(..).is_empty()`.
pub fn is_feasible(
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> bool {
    if !(p_ce_w >= 0.0 && p_ce_w <= params.p_max_w * (1.0 + REL_TOL)) {
        return false;
    }
    if gammas.iter().any(|g| !(*g > 0.0 && *g <= 1.0)) {
        return false;
    }
    let gamma = sinr_pair(p_ce_w, gammas, channel, params);
    (0..2).all(|k| {
        params.t_t[k] * (1.0 + gamma[k]).log2() >= params.r_min * (1.0 - REL_TOL)
            && harvest_slack(p_ce_w, gammas[k], channel, params, k) >= -HARVEST_TOL_W
    })
}
