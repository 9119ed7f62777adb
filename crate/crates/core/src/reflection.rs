//! Stage two: closed-form reflection coefficients at the stage-one power.
//!
//! For fixed `P*_ce` the bounded sum rate grows with each `Γ_k`, so each
//! sensor takes the top of its feasible range
//!
//! ```text
//! 2^ℵ_k (σ²_T + I_NOMA,k) / (P* |Ĥ_k|²)  ≤  Γ_k  ≤  min{1 − P^c_RS/(ξ P^I_k) + T_h,k/T_t,k, 1}
//! ```
//!
//! with `σ²_T = σ²_e P* θ + σ²_n` and `I_NOMA,2 = P* Γ1 |Ĥ1|²`. Sensors are
//! processed in index order so sensor 2 sees the already chosen `Γ1`.
//! The upper end is where the harvested energy exactly covers the circuit
//! demand `P^c_RS T_t,k`.

use serde::Serialize;

use crate::constraints::{aleph, exact_sinr_target, is_feasible};
use crate::error::{Constraint, Error, Result};
use crate::params::SystemParams;
use crate::rate_model::{exact_ee, sum_rate_approx, ApproxCoeffs};
use crate::scenario::{incident_power, ScenarioChannel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReflectionBounds {
    pub lower: [f64; 2],
    /// Upper end clamped to 1.
    pub upper: [f64; 2],
    /// Harvest-limited upper end before clamping.
    pub raw_upper: [f64; 2],
    pub aleph: [f64; 2],
    pub sigma2_t: f64,
    pub i_noma: [f64; 2],
    pub theta: f64,
    pub coeffs: ApproxCoeffs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    /// Harvest-limited: `Γ*` sits strictly below 1.
    UpperInterior,
    /// Harvesting mode alone powers the sensor: `Γ* = 1`.
    SaturatedOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReflectionSolution {
    pub gamma: [f64; 2],
    pub case_tag: [CaseTag; 2],
    /// Back-off applied to sensor 2 when both sensors saturated.
    pub sic_nu: Option<f64>,
}

/// Bounds with an explicit reflection-sum target and sensor-1 choice.
fn bounds_with(
    p_ce_star: f64,
    channel: &ScenarioChannel,
    coeffs: &ApproxCoeffs,
    params: &SystemParams,
    theta: f64,
    gamma1: Option<f64>,
) -> ReflectionBounds {
    let sigma2_t = channel.sigma2_e * p_ce_star * theta + params.sigma2_n_w;
    let aleph = [0, 1].map(|k| aleph(coeffs, params, k));
    let raw_upper = [0, 1].map(|k| harvest_upper(p_ce_star, channel, params, k));
    let upper = raw_upper.map(|u| u.min(1.0));
    let lower0 = aleph[0].exp2() * sigma2_t / (p_ce_star * channel.g_hat[0]);
    let g1 = gamma1.unwrap_or(lower0.max(upper[0]));
    let i_noma = [0.0, p_ce_star * g1 * channel.g_hat[0]];
    let lower1 = aleph[1].exp2() * (sigma2_t + i_noma[1]) / (p_ce_star * channel.g_hat[1]);
    ReflectionBounds {
        lower: [lower0, lower1],
        upper,
        raw_upper,
        aleph,
        sigma2_t,
        i_noma,
        theta,
        coeffs: *coeffs,
    }
}

pub fn gamma_bounds(
    p_ce_star: f64,
    channel: &ScenarioChannel,
    coeffs: &ApproxCoeffs,
    params: &SystemParams,
) -> ReflectionBounds {
    bounds_with(p_ce_star, channel, coeffs, params, params.theta(), None)
}

pub fn optimal_reflection(
    bounds: &ReflectionBounds,
    channel: &ScenarioChannel,
    p_ce_star: f64,
    params: &SystemParams,
) -> Result<ReflectionSolution> {
    let mut gamma = [0.0; 2];
    let mut case_tag = [CaseTag::UpperInterior; 2];
    for k in 0..2 {
        if !(bounds.upper[k] > 0.0) || bounds.lower[k] > bounds.upper[k] {
            return Err(Error::infeasible(Constraint::ReflectionRange(k + 1)));
        }
        gamma[k] = bounds.upper[k];
        if bounds.raw_upper[k] >= 1.0 {
            case_tag[k] = CaseTag::SaturatedOne;
        }
    }

    let mut sic_nu = None;
    if gamma == [1.0, 1.0] {
        let gap = |g2: f64| p_ce_star * (g2 * channel.g_hat[1] - channel.g_hat[0]);
        let mut nu = params.nu;
        loop {
            if nu >= 0.5 {
                return Err(Error::infeasible(Constraint::SicGap));
            }
            if gap(1.0 - nu) <= params.p_gap_w {
                break;
            }
            nu *= 2.0;
        }
        gamma[1] = 1.0 - nu;
        sic_nu = Some(nu);
        if gamma[1] < bounds.lower[1] {
            return Err(Error::infeasible(Constraint::QosSensor2));
        }
    }

    // the QoS bounds froze Γ1 + Γ2 at θ; re-check them at the chosen sum
    let actual = bounds_with(
        p_ce_star,
        channel,
        &bounds.coeffs,
        params,
        gamma[0] + gamma[1],
        Some(gamma[0]),
    );
    for k in 0..2 {
        if gamma[k] < actual.lower[k] {
            return Err(Error::infeasible(if k == 0 {
                Constraint::QosSensor1
            } else {
                Constraint::QosSensor2
            }));
        }
    }

    Ok(ReflectionSolution {
        gamma,
        case_tag,
        sic_nu,
    })
}

/// Bounded sum rate as stage two sees it: the estimation-error term is
/// frozen at `σ²_T = σ²_e P θ + σ²_n`, so only the desired signals and the
/// NOMA interference on sensor 2 move with `Γ`.
pub fn stage_two_rate(
    gammas: [f64; 2],
    p_ce_w: f64,
    channel: &ScenarioChannel,
    coeffs: &ApproxCoeffs,
    theta: f64,
    params: &SystemParams,
) -> Result<f64> {
    let sigma2_t = channel.sigma2_e * p_ce_w * theta + params.sigma2_n_w;
    let s1 = p_ce_w * gammas[0] * channel.g_hat[0];
    let s2 = p_ce_w * gammas[1] * channel.g_hat[1];
    sum_rate_approx([s1 / sigma2_t, s2 / (s1 + sigma2_t)], coeffs, params)
}

/// Largest reflection coefficient the harvest constraint allows, unclamped.
fn harvest_upper(p_ce_w: f64, channel: &ScenarioChannel, params: &SystemParams, k: usize) -> f64 {
    let p_i = incident_power(p_ce_w, channel.g_f[k]);
    1.0 - params.p_c_rs_w / (params.xi * p_i) + params.t_h[k] / params.t_t[k]
}

/// Corners of the exact feasible region in `(Γ1, Γ2)` at a fixed CE power.
///
/// At fixed power both QoS constraints are half-planes and the harvest
/// constraints are box limits. With `T_t,1 = T_t,2` the exact sum rate is
/// `T_t log2(1 + P(Γ1|Ĥ1|² + Γ2|Ĥ2|²) / (σ²_e P (Γ1 + Γ2) + σ²_n))`, a
/// monotone function of a linear-fractional form, so its maximum over the
/// region is attained at one of these corners. `(1, 1)` is kept only when it
/// meets the SIC gap.
pub fn feasible_vertices(
    p_ce_w: f64,
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> Vec<[f64; 2]> {
    let e = channel.sigma2_e;
    let h = channel.g_hat;
    let t = [exact_sinr_target(params, 0), exact_sinr_target(params, 1)];
    let n = params.sigma2_n_w / p_ce_w;
    let u = [0, 1].map(|k| harvest_upper(p_ce_w, channel, params, k).min(1.0));
    // a Γ1 + b Γ2 = c
    let lines = [
        [1.0, 0.0, u[0]],
        [0.0, 1.0, u[1]],
        [h[0] - t[0] * e, -t[0] * e, t[0] * n],
        [-t[1] * (h[0] + e), h[1] - t[1] * e, t[1] * n],
    ];
    let mut out: Vec<[f64; 2]> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let [a1, b1, c1] = lines[i];
            let [a2, b2, c2] = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det == 0.0 || !det.is_finite() {
                continue;
            }
            let g = [(c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det];
            if !(g[0] > 0.0 && g[1] > 0.0 && g[0] <= 1.0 && g[1] <= 1.0) {
                continue;
            }
            if g == [1.0, 1.0] && p_ce_w * (h[1] - h[0]) > params.p_gap_w {
                continue;
            }
            if is_feasible(p_ce_w, g, channel, params) && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// Smallest CE power at which some reflection pair is feasible, found by
/// bisection (feasibility is monotone in power). `None` when even `P_max`
/// admits no feasible pair.
pub fn joint_power_floor(channel: &ScenarioChannel, params: &SystemParams) -> Option<f64> {
    let feasible = |p: f64| !feasible_vertices(p, channel, params).is_empty();
    let mut hi = params.p_max_w;
    if !feasible(hi) {
        return None;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Highest exact-EE reflection pair at a fixed CE power among the feasible
/// corners and `incumbent`. The incumbent wins ties. Errors when neither the
/// incumbent nor any corner is feasible.
pub fn best_reflection(
    p_ce_w: f64,
    channel: &ScenarioChannel,
    params: &SystemParams,
    incumbent: [f64; 2],
) -> Result<[f64; 2]> {
    let mut best = is_feasible(p_ce_w, incumbent, channel, params)
        .then(|| (exact_ee(p_ce_w, incumbent, channel, params), incumbent));
    for g in feasible_vertices(p_ce_w, channel, params) {
        let ee = exact_ee(p_ce_w, g, channel, params);
        if best.is_none_or(|(b, _)| ee > b) {
            best = Some((ee, g));
        }
    }
    best.map(|(_, g)| g)
        .ok_or(Error::infeasible(Constraint::NoFeasiblePoint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_model::approx_coeffs;

    fn bounds(lower: [f64; 2], raw_upper: [f64; 2]) -> ReflectionBounds {
        ReflectionBounds {
            lower,
            upper: raw_upper.map(|u| u.min(1.0)),
            raw_upper,
            aleph: [0.0; 2],
            sigma2_t: 0.0,
            i_noma: [0.0; 2],
            theta: 1.0,
            coeffs: approx_coeffs([1.0, 1.0]).unwrap(),
        }
    }

    // Gains chosen so the post-selection QoS re-check is loose.
    fn spread_channel() -> ScenarioChannel {
        ScenarioChannel::synthetic([1e-3, 1e-3], [1e-6, 3e-6], 0.0)
    }

    fn strong_channel() -> ScenarioChannel {
        ScenarioChannel::synthetic([1e-3, 1e-3], [1e-6, 1.05e-6], 0.0)
    }

    #[test]
    fn cancelling_terms_give_unit_upper() {
        // with ξ = 1 the bound reduces to 1 − P^c/P^I + T_h/T_t
        let params = SystemParams {
            xi: 1.0,
            p_c_rs_w: 1e-6,
            ..Default::default()
        };
        let ch = ScenarioChannel::synthetic([1e-6, 1e-6], [1e-12, 2e-12], 0.0);
        let coeffs = approx_coeffs([5.0, 5.0]).unwrap();
        let b = gamma_bounds(1.0, &ch, &coeffs, &params);
        assert!((b.raw_upper[0] - 1.0).abs() < 1e-12);
        assert!(b.upper[0] <= 1.0);
    }

    #[test]
    fn table_circuit_power_saturates_upper() {
        let params = SystemParams {
            xi: 1.0,
            ..Default::default()
        };
        let ch = ScenarioChannel::synthetic([1e-6, 1e-6], [1e-12, 2e-12], 0.0);
        let coeffs = approx_coeffs([5.0, 5.0]).unwrap();
        let b = gamma_bounds(1.0, &ch, &coeffs, &params);
        assert!((b.raw_upper[0] - 1.6838).abs() < 1e-4);
        assert_eq!(b.upper[0], 1.0);
    }

    #[test]
    fn harvester_efficiency_enters_upper_bound() {
        let params = SystemParams::default();
        let ch = ScenarioChannel::synthetic([1e-6, 1e-6], [1e-12, 2e-12], 0.0);
        let coeffs = approx_coeffs([5.0, 5.0]).unwrap();
        let b = gamma_bounds(1.0, &ch, &coeffs, &params);
        let expected = 2.0 - params.p_c_rs_w / (0.6 * 1e-6);
        assert!((b.raw_upper[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn small_rate_target_shrinks_lower_bound() {
        let ch = ScenarioChannel::synthetic([1e-6, 1e-6], [1e-12, 2e-12], 1e-15);
        let coeffs = approx_coeffs([5.0, 5.0]).unwrap();
        let mut prev = f64::INFINITY;
        for r_min in [0.5, 0.1, 1e-3, 1e-6] {
            let params = SystemParams {
                r_min,
                ..Default::default()
            };
            let b = gamma_bounds(1.0, &ch, &coeffs, &params);
            assert!(b.lower[0] > 0.0 && b.lower[0] < prev);
            prev = b.lower[0];
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn harvest_limited_case() {
        let params = SystemParams::default();
        let sol = optimal_reflection(
            &bounds([0.2, 0.3], [0.9, 0.8]),
            &spread_channel(),
            1.0,
            &params,
        )
        .unwrap();
        assert_eq!(sol.gamma, [0.9, 0.8]);
        assert_eq!(sol.case_tag, [CaseTag::UpperInterior; 2]);
        assert_eq!(sol.sic_nu, None);
    }

    #[test]
    fn saturated_case_with_gap_met() {
        let params = SystemParams {
            p_gap_w: 1.0,
            ..Default::default()
        };
        let sol = optimal_reflection(
            &bounds([0.2, 0.3], [1.4, 1.7]),
            &spread_channel(),
            1.0,
            &params,
        )
        .unwrap();
        assert_eq!(sol.case_tag, [CaseTag::SaturatedOne; 2]);
        assert_eq!(sol.gamma[0], 1.0);
        assert_eq!(sol.gamma[1], 1.0 - params.nu);
        assert_eq!(sol.sic_nu, Some(params.nu));
    }

    #[test]
    fn sic_backoff_escalates() {
        // gap at (1, 1 − ν) is P(|Ĥ2|²(1 − ν) − |Ĥ1|²)
        let ch = strong_channel();
        let params = SystemParams {
            p_gap_w: 1e-8,
            nu: 0.01,
            ..Default::default()
        };
        let sol = optimal_reflection(&bounds([0.2, 0.3], [1.4, 1.7]), &ch, 1.0, &params).unwrap();
        let nu = sol.sic_nu.unwrap();
        assert!(nu > 0.01);
        assert!(1.0 * (sol.gamma[1] * ch.g_hat[1] - ch.g_hat[0]) <= params.p_gap_w);
        // the previous step did not meet the gap
        assert!((1.0 - nu / 2.0) * ch.g_hat[1] - ch.g_hat[0] > params.p_gap_w);
    }

    #[test]
    fn sic_gap_unreachable() {
        let ch = ScenarioChannel::synthetic([1e-3, 1e-3], [1e-6, 4e-6], 0.0);
        let params = SystemParams::default();
        let err =
            optimal_reflection(&bounds([0.2, 0.3], [1.4, 1.7]), &ch, 1.0, &params).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                constraint: Constraint::SicGap
            }
        ));
    }

    #[test]
    fn empty_range_is_infeasible() {
        let params = SystemParams::default();
        let err = optimal_reflection(
            &bounds([0.95, 0.3], [0.6, 0.8]),
            &strong_channel(),
            1.0,
            &params,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                constraint: Constraint::ReflectionRange(1)
            }
        ));
    }

    fn bpp_channel(seed: u64) -> (ScenarioChannel, SystemParams) {
        use crate::scenario::{place_sensors_bpp, Topology};
        let params = SystemParams::default();
        let field = place_sensors_bpp(2, 5.0, [0.0, 40.0], seed).unwrap();
        let t = Topology::fixed([field.d_f(0), field.d_f(1)], [50.0, 30.0]).unwrap();
        (ScenarioChannel::draw(&t, &params, seed).unwrap(), params)
    }

    #[test]
    fn vertices_are_feasible_and_beat_the_box_grid() {
        let (ch, params) = bpp_channel(4);
        let p = 0.2;
        let verts = feasible_vertices(p, &ch, &params);
        assert!(!verts.is_empty());
        let best = best_reflection(p, &ch, &params, params.gamma_init).unwrap();
        let top = exact_ee(p, best, &ch, &params);
        for &g in &verts {
            assert!(is_feasible(p, g, &ch, &params));
        }
        for i in 1..=100 {
            for j in 1..=100 {
                let g = [i as f64 / 100.0, j as f64 / 100.0];
                if is_feasible(p, g, &ch, &params) {
                    assert!(exact_ee(p, g, &ch, &params) <= top * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn incumbent_kept_on_ties() {
        let (ch, params) = bpp_channel(4);
        let p = 0.2;
        let best = best_reflection(p, &ch, &params, params.gamma_init).unwrap();
        assert_eq!(best_reflection(p, &ch, &params, best).unwrap(), best);
    }

    #[test]
    fn joint_floor_is_tight() {
        let (ch, params) = bpp_channel(19);
        let floor = joint_power_floor(&ch, &params).unwrap();
        assert!(!feasible_vertices(floor, &ch, &params).is_empty());
        assert!(feasible_vertices(floor * (1.0 - 1e-6), &ch, &params).is_empty());
    }

    #[test]
    fn no_power_is_enough_for_huge_rate() {
        let (ch, params) = bpp_channel(4);
        let params = SystemParams {
            r_min: 20.0,
            ..params
        };
        assert_eq!(joint_power_floor(&ch, &params), None);
        assert!(best_reflection(1.0, &ch, &params, params.gamma_init)
            .unwrap_err()
            .is_infeasible());
    }

    #[test]
    fn stage_two_rate_matches_bound_at_theta() {
        let ch = spread_channel();
        let params = SystemParams::default();
        let ch = ScenarioChannel {
            sigma2_e: 1e-8,
            ..ch
        };
        let g = [0.3, 0.6];
        let p = 2.0;
        let z = crate::rate_model::sinr_pair(p, g, &ch, &params);
        let coeffs = approx_coeffs(z).unwrap();
        let frozen = stage_two_rate(g, p, &ch, &coeffs, 0.9, &params).unwrap();
        let exact = crate::rate_model::sum_rate_exact(z, &params);
        assert!((frozen - exact).abs() < 1e-12);
    }
}
