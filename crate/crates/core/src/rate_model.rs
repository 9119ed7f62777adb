//! SINRs, sum rates, power consumption and energy efficiency.
//!
//! Rates are per unit bandwidth (bps/Hz), so EE comes out in bits/Hz/J and
//! does not depend on `bw_hz`.
//!
//! The total power follows the per-sensor sum literally:
//! `P_T = Σ_k (P_ce / κ_k)(T_t,k + T_h,k) + P^c_ce + P^c_RSU`, which counts
//! the CE transmit power once per sensor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::scenario::ScenarioChannel;

/// SINRs of (sensor 1, sensor 2). Sensor 2 is decoded first and sees sensor
/// 1 as interference; both see the channel-estimation error.
pub fn sinr_pair(
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> [f64; 2] {
    let s1 = p_ce_w * gammas[0] * channel.g_hat[0];
    let s2 = p_ce_w * gammas[1] * channel.g_hat[1];
    let err = channel.sigma2_e * p_ce_w * (gammas[0] + gammas[1]);
    let n = params.sigma2_n_w;
    [s1 / (err + n), s2 / (s1 + err + n)]
}

pub fn sum_rate_exact(gamma: [f64; 2], params: &SystemParams) -> f64 {
    params.t_t[0] * (1.0 + gamma[0]).log2() + params.t_t[1] * (1.0 + gamma[1]).log2()
}

/// Coefficients of the lower bound `Π log2(z) + Φ ≤ log2(1 + z)`, tight at
/// the anchor SINRs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxCoeffs {
    pub pi: [f64; 2],
    pub phi: [f64; 2],
    pub anchor: [f64; 2],
}

fn bound_coeffs(z0: f64) -> (f64, f64) {
    let pi = z0 / (1.0 + z0);
    let phi = z0.ln_1p() / std::f64::consts::LN_2 - pi * z0.log2();
    (pi, phi)
}

pub fn approx_coeffs(gamma_anchor: [f64; 2]) -> Result<ApproxCoeffs> {
    if gamma_anchor.iter().any(|z| !(z.is_finite() && *z > 0.0)) {
        return Err(Error::invalid(format!(
            "bound anchors must be positive and finite, got {gamma_anchor:?}"
        )));
    }
    let (pi0, phi0) = bound_coeffs(gamma_anchor[0]);
    let (pi1, phi1) = bound_coeffs(gamma_anchor[1]);
    Ok(ApproxCoeffs {
        pi: [pi0, pi1],
        phi: [phi0, phi1],
        anchor: gamma_anchor,
    })
}

/// Lower-bounded sum rate. Needs both SINRs strictly positive.
pub fn sum_rate_approx(
    gamma: [f64; 2],
    coeffs: &ApproxCoeffs,
    params: &SystemParams,
) -> Result<f64> {
    if gamma.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::Domain(format!(
            "log2 of non-positive SINR {gamma:?}"
        )));
    }
    Ok((0..2)
        .map(|k| params.t_t[k] * (coeffs.pi[k] * gamma[k].log2() + coeffs.phi[k]))
        .sum())
}

pub fn total_power(p_ce_w: f64, params: &SystemParams) -> f64 {
    let tx: f64 = (0..2)
        .map(|k| p_ce_w / params.kappa[k] * (params.t_t[k] + params.t_h[k]))
        .sum();
    tx + params.p_c_ce_w + params.p_c_rsu_w
}

pub fn energy_efficiency(rate: f64, p_total_w: f64) -> Result<f64> {
    if !(p_total_w > 0.0) {
        return Err(Error::invalid("total power must be > 0"));
    }
    Ok(rate / p_total_w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub gamma: [f64; 2],
    pub rate_exact: f64,
    pub rate_approx: f64,
    pub p_total_w: f64,
    /// `rate_approx / p_total_w`.
    pub ee: f64,
}

/// Evaluates the model at one operating point. With `coeffs = None` the
/// bound is tightened at the point itself, so both rates coincide.
pub fn rate_report(
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    coeffs: Option<&ApproxCoeffs>,
    params: &SystemParams,
) -> Result<RateReport> {
    let gamma = sinr_pair(p_ce_w, gammas, channel, params);
    let own;
    let coeffs = match coeffs {
        Some(c) => c,
        None => {
            own = approx_coeffs(gamma)?;
            &own
        }
    };
    let rate_approx = sum_rate_approx(gamma, coeffs, params)?;
    let p_total_w = total_power(p_ce_w, params);
    Ok(RateReport {
        gamma,
        rate_exact: sum_rate_exact(gamma, params),
        rate_approx,
        p_total_w,
        ee: energy_efficiency(rate_approx, p_total_w)?,
    })
}

/// Exact-rate EE at `(p_ce_w, gammas)`.
pub fn exact_ee(
    p_ce_w: f64,
    gammas: [f64; 2],
    channel: &ScenarioChannel,
    params: &SystemParams,
) -> f64 {
    let gamma = sinr_pair(p_ce_w, gammas, channel, params);
    sum_rate_exact(gamma, params) / total_power(p_ce_w, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_params() -> SystemParams {
        SystemParams {
            sigma2_n_w: 1e-12,
            ..Default::default()
        }
    }

    #[test]
    fn sinr_hand_values() {
        let ch = ScenarioChannel::synthetic([1e-6; 2], [1e-12, 4e-12], 0.0);
        let g = sinr_pair(1.0, [0.3, 0.8], &ch, &unit_params());
        assert!((g[0] - 0.3).abs() < 1e-12);
        assert!((g[1] - 3.2 / 1.3).abs() < 1e-12);
        assert_eq!(sinr_pair(0.0, [0.3, 0.8], &ch, &unit_params()), [0.0, 0.0]);
    }

    #[test]
    fn sinr_vanishes_as_error_grows() {
        let params = unit_params();
        let mut prev = [f64::INFINITY; 2];
        for e in [0.0, 1e-13, 1e-12, 1e-10, 1e-6, 1.0] {
            let ch = ScenarioChannel::synthetic([1e-6; 2], [1e-12, 4e-12], e);
            let g = sinr_pair(1.0, [0.3, 0.8], &ch, &params);
            assert!(g[0] < prev[0] && g[1] < prev[1]);
            prev = g;
        }
        assert!(prev[0] < 1e-11 && prev[1] < 1e-11);
    }

    #[test]
    fn exact_rate_values() {
        let p = SystemParams::default();
        assert_eq!(sum_rate_exact([0.0, 0.0], &p), 0.0);
        assert!((sum_rate_exact([1.0, 1.0], &p) - 1.0).abs() < 1e-15);
        assert!((sum_rate_exact([3.0, 1.0], &p) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn bound_coefficient_values() {
        let c = approx_coeffs([1.0, 3.0]).unwrap();
        assert_eq!(c.pi[0], 0.5);
        assert!((c.phi[0] - 1.0).abs() < 1e-15);
        assert_eq!(c.pi[1], 0.75);
        assert!((c.phi[1] - 0.811278).abs() < 1e-6);
        assert!(approx_coeffs([0.0, 1.0]).is_err());
        assert!(approx_coeffs([1.0, -2.0]).is_err());
    }

    #[test]
    fn approx_rate_values() {
        let p = SystemParams::default();
        let c = approx_coeffs([1.0, 1.0]).unwrap();
        let approx = sum_rate_approx([2.0, 2.0], &c, &p).unwrap();
        assert!((approx - 1.5).abs() < 1e-12);
        let exact = sum_rate_exact([2.0, 2.0], &p);
        assert!((exact - 3f64.log2()).abs() < 1e-12);
        assert!(approx < exact);
        assert!(sum_rate_approx([0.0, 2.0], &c, &p).is_err());
        let tiny = sum_rate_approx([1e-300, 1e-300], &c, &p).unwrap();
        assert!(tiny < -400.0);
    }

    #[test]
    fn total_power_values() {
        let p = SystemParams::default();
        assert!((total_power(0.0, &p) - 1.1).abs() < 1e-15);
        assert!((total_power(1.0, &p) - (2.0 / 0.9 + 1.1)).abs() < 1e-12);
        assert!((total_power(1.0, &p) - 3.3222).abs() < 1e-4);
        let unit = SystemParams {
            kappa: [1.0, 1.0],
            ..Default::default()
        };
        assert!((total_power(1.0, &unit) - 3.1).abs() < 1e-12);
    }

    #[test]
    fn ee_values() {
        assert_eq!(energy_efficiency(0.0, 3.1).unwrap(), 0.0);
        assert_eq!(energy_efficiency(1.5, 3.0).unwrap(), 0.5);
        assert!(energy_efficiency(1.0, 0.0).is_err());
        assert!(energy_efficiency(1.0, -1.0).is_err());
    }

    #[test]
    fn report_is_tight_without_explicit_coeffs() {
        let ch = ScenarioChannel::synthetic([1e-6; 2], [1e-12, 4e-12], 1e-14);
        let r = rate_report(0.7, [0.4, 0.9], &ch, None, &unit_params()).unwrap();
        assert!((r.rate_exact - r.rate_approx).abs() < 1e-12);
        assert!((r.ee * r.p_total_w - r.rate_approx).abs() <= 1e-12 * r.rate_approx.abs());
    }

    proptest! {
        #[test]
        fn bound_is_below_and_tight(z0 in 1e-3f64..1e3, z in 1e-3f64..1e3) {
            let c = approx_coeffs([z0, z0]).unwrap();
            let lhs = c.pi[0] * z.log2() + c.phi[0];
            prop_assert!(lhs <= (1.0 + z).log2() + 1e-9);
            let at_anchor = c.pi[0] * z0.log2() + c.phi[0];
            prop_assert!((at_anchor - (1.0 + z0).log2()).abs() <= 1e-9);
        }

        #[test]
        fn ee_is_scale_invariant(r in 0.0f64..10.0, p in 0.1f64..10.0, c in 0.01f64..100.0) {
            let a = energy_efficiency(r, p).unwrap();
            let b = energy_efficiency(r * c, p * c).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }

        #[test]
        fn sinr2_decreases_in_gamma1(g1 in 0.05f64..0.9, dg in 0.01f64..0.1, e in 0.0f64..1e-12) {
            let ch = ScenarioChannel::synthetic([1e-6; 2], [1e-12, 4e-12], e);
            let p = unit_params();
            let lo = sinr_pair(1.0, [g1, 0.5], &ch, &p);
            let hi = sinr_pair(1.0, [g1 + dg, 0.5], &ch, &p);
            prop_assert!(hi[1] < lo[1]);
        }
    }
}
