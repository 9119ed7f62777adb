//! Two-stage alternating optimization: stage-one CE power at the initial
//! reflection coefficients, then reflection coefficients at that power,
//! alternating while the exact EE improves.

use serde::Serialize;

use crate::constraints::violations;
use crate::error::{Constraint, Error, Result};
use crate::ocetp::{run_ocetp, StageOneResult};
use crate::params::SystemParams;
use crate::rate_model::{approx_coeffs, sinr_pair, sum_rate_exact, total_power, ApproxCoeffs};
use crate::reflection::{
    best_reflection, gamma_bounds, joint_power_floor, optimal_reflection, ReflectionSolution,
};
use crate::scenario::ScenarioChannel;

/// Operating point with its exact-rate figures of merit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub p_ce_w: f64,
    pub gamma: [f64; 2],
    /// Exact sum rate in bps/Hz.
    pub rate: f64,
    pub p_total_w: f64,
    /// `rate / p_total_w` in bits/Hz/J.
    pub ee: f64,
    /// All constraints hold at this point.
    pub feasible: bool,
    /// Stage-one iterations (0 when no iterative stage ran).
    pub iterations: usize,
}

impl Solution {
    pub fn at(
        p_ce_w: f64,
        gamma: [f64; 2],
        channel: &ScenarioChannel,
        params: &SystemParams,
    ) -> Self {
        let rate = sum_rate_exact(sinr_pair(p_ce_w, gamma, channel, params), params);
        let p_total_w = total_power(p_ce_w, params);
        Solution {
            p_ce_w,
            gamma,
            rate,
            p_total_w,
            ee: rate / p_total_w,
            feasible: violations(p_ce_w, gamma, channel, params).is_empty(),
            iterations: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AobwsOutcome {
    /// Absent when no power makes `gamma_init` feasible.
    pub stage_one: Option<StageOneResult>,
    /// Bound-based closed-form reflection at the first stage-one power, when
    /// its range is non-empty.
    pub closed_form: Option<ReflectionSolution>,
    pub ocetp: Option<Solution>,
    pub aobws: Solution,
    /// Power/reflection alternations performed.
    pub rounds: usize,
}

/// Stage one alone, at `params.gamma_init`.
pub fn run_ocetp_solution(
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> Result<(StageOneResult, Solution)> {
    let stage_one = run_ocetp(channel, params.gamma_init, params, None)?;
    let mut sol = Solution::at(stage_one.p_ce_w, params.gamma_init, channel, params);
    sol.iterations = stage_one.iterations;
    Ok((stage_one, sol))
}

/// Closed-form stage two at the given power and anchors.
pub fn closed_form_reflection(
    p_ce_w: f64,
    coeffs: &ApproxCoeffs,
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> Result<ReflectionSolution> {
    let bounds = gamma_bounds(p_ce_w, channel, coeffs, params);
    optimal_reflection(&bounds, channel, p_ce_w, params)
}

/// Best reflection pair at a fixed CE power, starting from `gamma_init`.
pub fn reflection_at(
    p_ce_w: f64,
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> Result<Solution> {
    let mut best = Solution::at(p_ce_w, params.gamma_init, channel, params);
    if let Ok(coeffs) = approx_coeffs(sinr_pair(p_ce_w, params.gamma_init, channel, params)) {
        if let Ok(cf) = closed_form_reflection(p_ce_w, &coeffs, channel, params) {
            keep_better(&mut best, Solution::at(p_ce_w, cf.gamma, channel, params));
        }
    }
    let g = best_reflection(p_ce_w, channel, params, params.gamma_init)?;
    keep_better(&mut best, Solution::at(p_ce_w, g, channel, params));
    if !best.feasible {
        return Err(Error::infeasible(Constraint::NoFeasiblePoint));
    }
    Ok(best)
}

/// Replaces `best` when `cand` is feasible and strictly better (or `best`
/// is infeasible).
fn keep_better(best: &mut Solution, cand: Solution) -> bool {
    if cand.feasible && (!best.feasible || cand.ee > best.ee) {
        *best = cand;
        true
    } else {
        false
    }
}

/// Best point on the curve `P ↦ (P, best_reflection(P))`, scanned on a log
/// grid from the joint feasibility floor to `P_max` and refined by
/// golden-section search around the best scan point.
///
/// Alternating steps stall where a harvest limit couples power and
/// reflection: lowering the power needs a lower `Γ` at the same time.
pub fn envelope_search(channel: &ScenarioChannel, params: &SystemParams) -> Option<Solution> {
    const SCAN: usize = 64;
    let floor = joint_power_floor(channel, params)?;
    let eval = |p: f64| {
        best_reflection(p, channel, params, params.gamma_init)
            .ok()
            .map(|g| Solution::at(p, g, channel, params))
            .filter(|s| s.feasible)
    };
    let ratio = (params.p_max_w / floor).max(1.0);
    let grid: Vec<f64> = (0..SCAN)
        .map(|i| (floor * ratio.powf(i as f64 / (SCAN - 1) as f64)).min(params.p_max_w))
        .collect();
    let mut best: Option<(usize, Solution)> = None;
    for (i, &p) in grid.iter().enumerate() {
        if let Some(s) = eval(p) {
            if best.as_ref().is_none_or(|(_, b)| s.ee > b.ee) {
                best = Some((i, s));
            }
        }
    }
    let (i, mut top) = best?;
    let (mut lo, mut hi) = (grid[i.saturating_sub(1)], grid[(i + 1).min(SCAN - 1)]);
    let score = |p: f64| eval(p).map_or(f64::NEG_INFINITY, |s| s.ee);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (score(x1), score(x2));
    for _ in 0..60 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = score(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = score(x2);
        }
    }
    for p in [x1, x2] {
        if let Some(s) = eval(p) {
            if s.ee > top.ee {
                top = s;
            }
        }
    }
    Some(top)
}

/// Stage one at `gamma_init`, then alternating reflection and power updates.
/// A step is kept only if it raises the exact EE, so the result never falls
/// below the stage-one point. When `gamma_init` admits no feasible power the
/// search starts from the envelope instead.
pub fn run_aobws_detailed(
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> Result<AobwsOutcome> {
    params.validate()?;
    let (stage_one, ocetp, stage_one_err) = match run_ocetp_solution(channel, params) {
        Ok((s, sol)) => (Some(s), Some(sol), None),
        Err(e) if e.is_infeasible() => (None, None, Some(e)),
        Err(e) => return Err(e),
    };
    if let Some(sol) = ocetp.as_ref().filter(|s| !s.feasible) {
        return Err(Error::Numerical(format!(
            "stage-one point violates {:?}",
            violations(sol.p_ce_w, sol.gamma, channel, params)
        )));
    }
    let closed_form = stage_one
        .as_ref()
        .and_then(|s| closed_form_reflection(s.p_ce_w, &s.coeffs, channel, params).ok());
    let mut best = ocetp
        .clone()
        .unwrap_or_else(|| Solution::at(params.p_max_w, params.gamma_init, channel, params));
    if let (Some(cf), Some(s)) = (&closed_form, &stage_one) {
        keep_better(&mut best, Solution::at(s.p_ce_w, cf.gamma, channel, params));
    }
    if let Some(env) = envelope_search(channel, params) {
        keep_better(&mut best, env);
    }
    if !best.feasible {
        return Err(stage_one_err.unwrap_or_else(|| Error::infeasible(Constraint::NoFeasiblePoint)));
    }
    let mut rounds = 0;
    while rounds < params.ao_rounds {
        rounds += 1;
        let g = best_reflection(best.p_ce_w, channel, params, best.gamma)?;
        let cand = Solution::at(best.p_ce_w, g, channel, params);
        let mut improved = keep_better(&mut best, cand);
        match run_ocetp(channel, best.gamma, params, None) {
            Ok(s) => {
                let cand = Solution::at(s.p_ce_w, best.gamma, channel, params);
                improved |= keep_better(&mut best, cand);
            }
            Err(e) if e.is_infeasible() => {}
            Err(e) => return Err(e),
        }
        if !improved {
            break;
        }
    }
    best.iterations = stage_one.as_ref().map_or(0, |s| s.iterations);
    Ok(AobwsOutcome {
        stage_one,
        closed_form,
        ocetp,
        aobws: best,
        rounds,
    })
}

pub fn run_aobws(channel: &ScenarioChannel, params: &SystemParams) -> Result<Solution> {
    run_aobws_detailed(channel, params).map(|o| o.aobws)
}
