//! Stage one: EE-optimal CE transmit power for fixed reflection coefficients.
//!
//! Each outer iteration
//! 1. tightens the log bound at the SINR of the current power,
//! 2. sets the Dinkelbach parameter `ψ = R̄ / P_T`,
//! 3. takes one projected subgradient step on the multipliers
//!    `(λ, μ1, μ2, β1, β2)`,
//! 4. solves the stationarity cubic of the Lagrangian for the next power.
//!
//! The loop stops once the Dinkelbach residual `|R̄(P⁺) − ψ P_T(P⁺)|` at the
//! new power drops below `delta_max`, or after `i_max` iterations.

use serde::Serialize;

use crate::constraints::{self, approx_sinr_target, exact_sinr_target, harvest_slack, qos_slack};
use crate::cubic;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rate_model::{approx_coeffs, sinr_pair, sum_rate_approx, total_power, ApproxCoeffs};
use crate::scenario::ScenarioChannel;

/// Lagrange multipliers; all entries stay non-negative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DualState {
    pub lambda: f64,
    pub mu: [f64; 2],
    pub beta: [f64; 2],
    pub iter: usize,
}

/// Aggregates of the stationarity condition and the resulting cubic
/// `a P³ + b P² + c P + d = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CardanoCoeffs {
    pub cap_a: f64,
    pub cap_b: f64,
    pub cap_c: f64,
    pub cap_d: f64,
    pub cap_g: f64,
    pub q_k: [f64; 2],
    pub p_h_k: [f64; 2],
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Shift parameters; `NaN` when `a = 0`.
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl CardanoCoeffs {
    /// `G = 0` or `B·D = 0` leaves at most a quadratic.
    pub fn is_degenerate(&self) -> bool {
        self.cap_g == 0.0 || self.cap_b * self.cap_d == 0.0
    }
}

pub fn cardano_coefficients(
    channel: &ScenarioChannel,
    gammas: [f64; 2],
    coeffs: &ApproxCoeffs,
    duals: &DualState,
    psi: f64,
    params: &SystemParams,
) -> CardanoCoeffs {
    let n = params.sigma2_n_w;
    let ln2 = std::f64::consts::LN_2;
    let cap_a = params.t_t[0] * coeffs.pi[0] * n;
    let cap_b = channel.sigma2_e * (gammas[0] + gammas[1]);
    let cap_c = params.t_t[1] * coeffs.pi[1] * n;
    let cap_d = gammas[0] * channel.g_hat[0] + cap_b;
    let q_k = [0, 1].map(|k| {
        let noma = if k == 1 {
            gammas[0] * channel.g_hat[0]
        } else {
            0.0
        };
        gammas[k] * channel.g_hat[k] - approx_sinr_target(coeffs, params, k) * (noma + cap_b)
    });
    // harvest per watt of CE power, through the true forward gain
    let p_h_k = [0, 1].map(|k| {
        params.xi * (1.0 - gammas[k]) * channel.g_f[k] * params.t_t[k]
            + params.xi * channel.g_f[k] * params.t_h[k]
    });
    let cost: f64 = (0..2)
        .map(|k| psi / params.kappa[k] * (params.t_t[k] + params.t_h[k]))
        .sum();
    let cap_g = duals.mu[0] * q_k[0]
        + duals.mu[1] * q_k[1]
        + duals.beta[0] * p_h_k[0]
        + duals.beta[1] * p_h_k[1]
        - cost
        - duals.lambda;
    let a = ln2 * cap_b * cap_d * cap_g;
    let b = ln2 * cap_b * cap_g * n + ln2 * cap_d * cap_g * n;
    let c = ln2 * cap_g * n * n + cap_a * cap_d + cap_c * cap_b;
    let d = cap_a * n + cap_c * n;
    let (p, q, r) = if a != 0.0 {
        cubic::shift_params(a, b, c, d)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    CardanoCoeffs {
        cap_a,
        cap_b,
        cap_c,
        cap_d,
        cap_g,
        q_k,
        p_h_k,
        a,
        b,
        c,
        d,
        p,
        q,
        r,
    }
}

pub fn solve_cubic(coeffs: &CardanoCoeffs) -> Result<Vec<f64>> {
    cubic::real_roots(coeffs.a, coeffs.b, coeffs.c, coeffs.d)
}

/// Everything needed to evaluate the Lagrangian at a candidate power.
#[derive(Clone, Copy, Debug)]
pub struct PowerContext<'a> {
    pub channel: &'a ScenarioChannel,
    pub gammas: [f64; 2],
    pub coeffs: &'a ApproxCoeffs,
    pub duals: &'a DualState,
    pub psi: f64,
    /// Lowest power meeting QoS and harvest constraints.
    pub floor: f64,
}

impl PowerContext<'_> {
    /// Lagrangian at fixed multipliers.
    pub fn lagrangian(&self, p_ce_w: f64, params: &SystemParams) -> f64 {
        let gamma = sinr_pair(p_ce_w, self.gammas, self.channel, params);
        let rate = sum_rate_approx(gamma, self.coeffs, params).unwrap_or(f64::NEG_INFINITY);
        let targets = [0, 1].map(|k| approx_sinr_target(self.coeffs, params, k));
        let qos = qos_slack(p_ce_w, self.gammas, self.channel, targets, params);
        let harvest =
            [0, 1].map(|k| harvest_slack(p_ce_w, self.gammas[k], self.channel, params, k));
        rate - self.psi * total_power(p_ce_w, params)
            + self.duals.mu[0] * qos[0]
            + self.duals.mu[1] * qos[1]
            + self.duals.lambda * (params.p_max_w - p_ce_w)
            + self.duals.beta[0] * harvest[0]
            + self.duals.beta[1] * harvest[1]
    }
}

/// Picks the next CE power among the positive real roots (clamped into
/// `[floor, P_max]`), the floor itself and `P_max`, by Lagrangian value.
/// Never returns zero.
pub fn select_power_candidate(roots: &[f64], ctx: &PowerContext<'_>, params: &SystemParams) -> f64 {
    let lo = ctx.floor.max(f64::MIN_POSITIVE).min(params.p_max_w);
    let mut candidates: Vec<f64> = roots
        .iter()
        .filter(|r| r.is_finite() && **r > 0.0)
        .map(|r| r.clamp(lo, params.p_max_w))
        .collect();
    if ctx.floor > 0.0 {
        candidates.push(lo);
    }
    candidates.push(params.p_max_w);
    let mut best = params.p_max_w;
    let mut best_val = f64::NEG_INFINITY;
    for p in candidates {
        let v = ctx.lagrangian(p, params);
        if v > best_val || (v == best_val && p < best) {
            best = p;
            best_val = v;
        }
    }
    best
}

/// One projected subgradient step with steps `ω_i / √iter`.
pub fn update_duals(
    duals: &DualState,
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    coeffs: &ApproxCoeffs,
    params: &SystemParams,
) -> DualState {
    let iter = duals.iter + 1;
    let scale = 1.0 / (iter as f64).sqrt();
    let w = params.step_sizes.map(|w| w * scale);
    let targets = [0, 1].map(|k| approx_sinr_target(coeffs, params, k));
    let qos = qos_slack(p_ce_w, gammas, channel, targets, params);
    let harvest = [0, 1].map(|k| harvest_slack(p_ce_w, gammas[k], channel, params, k));
    DualState {
        lambda: (duals.lambda - w[0] * (params.p_max_w - p_ce_w)).max(0.0),
        mu: [
            (duals.mu[0] - w[1] * qos[0]).max(0.0),
            (duals.mu[1] - w[2] * qos[1]).max(0.0),
        ],
        beta: [
            (duals.beta[0] - w[3] * harvest[0]).max(0.0),
            (duals.beta[1] - w[4] * harvest[1]).max(0.0),
        ],
        iter,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    /// Dinkelbach parameter used in this iteration.
    pub psi: f64,
    /// CE power produced by this iteration.
    pub p_ce_w: f64,
    /// `|R̄(P) − ψ P_T(P)|` at that power.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageOneResult {
    pub p_ce_w: f64,
    /// EE at `p_ce_w`.
    pub psi: f64,
    /// Bound coefficients tightened at the returned power.
    pub coeffs: ApproxCoeffs,
    pub duals: DualState,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations: usize,
}

/// Optional warm start.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageOneInit {
    pub p_ce_w: Option<f64>,
    pub duals: Option<DualState>,
}

pub fn run_ocetp(
    channel: &ScenarioChannel,
    gammas: [f64; 2],
    params: &SystemParams,
    init: Option<StageOneInit>,
) -> Result<StageOneResult> {
    if gammas.iter().any(|g| !(*g > 0.0 && *g <= 1.0)) {
        return Err(Error::invalid(format!(
            "reflection coefficients {gammas:?} outside (0, 1]"
        )));
    }
    let targets = [exact_sinr_target(params, 0), exact_sinr_target(params, 1)];
    let floor = constraints::power_floor(gammas, channel, targets, params)?;
    let init = init.unwrap_or_default();
    let mut p = init
        .p_ce_w
        .unwrap_or(params.p_max_w / 2.0)
        .clamp(floor.max(f64::MIN_POSITIVE), params.p_max_w);
    let mut duals = init.duals.unwrap_or_default();
    let mut trace = Vec::new();
    let mut converged = false;

    while trace.len() < params.i_max {
        let coeffs = approx_coeffs(sinr_pair(p, gammas, channel, params))?;
        let rate = sum_rate_approx(sinr_pair(p, gammas, channel, params), &coeffs, params)?;
        let psi = rate / total_power(p, params);
        duals = update_duals(&duals, p, gammas, channel, &coeffs, params);

        let cubic = cardano_coefficients(channel, gammas, &coeffs, &duals, psi, params);
        let roots = if cubic.a == 0.0 && cubic.b == 0.0 && cubic.c == 0.0 && cubic.d == 0.0 {
            Vec::new()
        } else {
            solve_cubic(&cubic)?
        };
        let ctx = PowerContext {
            channel,
            gammas,
            coeffs: &coeffs,
            duals: &duals,
            psi,
            floor,
        };
        let next = select_power_candidate(&roots, &ctx, params);
        if !(next.is_finite() && next > 0.0) {
            return Err(Error::Numerical(format!(
                "stage-one power update produced {next}"
            )));
        }
        let next_rate = sum_rate_approx(sinr_pair(next, gammas, channel, params), &coeffs, params)?;
        let residual = (next_rate - psi * total_power(next, params)).abs();
        trace.push(IterationRecord {
            psi,
            p_ce_w: next,
            residual,
        });
        p = next;
        if residual < params.delta_max {
            converged = true;
            break;
        }
    }
    let gamma = sinr_pair(p, gammas, channel, params);
    let final_coeffs = approx_coeffs(gamma)?;
    let final_psi = sum_rate_approx(gamma, &final_coeffs, params)? / total_power(p, params);
    Ok(StageOneResult {
        p_ce_w: p,
        psi: final_psi,
        coeffs: final_coeffs,
        duals,
        iterations: trace.len(),
        trace,
        converged,
    })
}
