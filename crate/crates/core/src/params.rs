//! System constants and algorithm knobs.
//!
//! All internal quantities are SI: watts, hertz, meters. dBm values are
//! converted once at the configuration boundary with [`dbm_to_watts`].

use serde::Serialize;

use crate::error::{Error, Result};

/// `P_W = 10^((dBm - 30) / 10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemParams {
    /// Bandwidth in Hz. Rates are reported per Hz, so this only scales
    /// absolute throughput.
    pub bw_hz: f64,
    pub sigma2_n_w: f64,
    pub p_max_w: f64,
    /// Energy-harvester efficiency.
    pub xi: f64,
    /// Power-amplifier efficiency per sensor.
    pub kappa: [f64; 2],
    pub p_c_ce_w: f64,
    pub p_c_rsu_w: f64,
    pub p_c_rs_w: f64,
    /// Minimum per-sensor rate in bps/Hz.
    pub r_min: f64,
    pub alpha: f64,
    /// Relative channel-estimation error.
    pub rho: f64,
    pub t_t: [f64; 2],
    pub t_h: [f64; 2],
    /// Reflection coefficients held fixed during stage one.
    pub gamma_init: [f64; 2],
    /// Override for the reflection-sum target; `None` uses `gamma_init` summed.
    pub theta: Option<f64>,
    pub p_gap_w: f64,
    /// Initial back-off of the near sensor when both sensors saturate.
    pub nu: f64,
    /// Base subgradient steps for (λ, μ1, μ2, β1, β2).
    pub step_sizes: [f64; 5],
    pub i_max: usize,
    pub delta_max: f64,
    /// Cap on power/reflection alternations in the two-stage optimizer.
    pub ao_rounds: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        let sigma2_n_w = dbm_to_watts(-114.0);
        Self {
            bw_hz: 1e6,
            sigma2_n_w,
            p_max_w: dbm_to_watts(40.0),
            xi: 0.6,
            kappa: [0.9, 0.9],
            p_c_ce_w: 0.1,
            p_c_rsu_w: 1.0,
            p_c_rs_w: dbm_to_watts(-35.0),
            r_min: 0.5,
            alpha: 4.0,
            rho: 0.005,
            t_t: [0.5, 0.5],
            t_h: [0.5, 0.5],
            gamma_init: [0.5, 0.5],
            theta: None,
            p_gap_w: 10.0 * sigma2_n_w,
            nu: 0.05,
            step_sizes: [1e-2, 1e6, 1e6, 1e6, 1e6],
            i_max: 20,
            delta_max: 1e-3,
            ao_rounds: 10,
        }
    }
}

impl SystemParams {
    /// Reflection-sum target used to freeze the interference term in stage two.
    pub fn theta(&self) -> f64 {
        self.theta
            .unwrap_or(self.gamma_init[0] + self.gamma_init[1])
    }

    /// Checks every range invariant, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, field: &str, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Config {
                    key: field.to_string(),
                    msg: msg.to_string(),
                })
            }
        }
        let pos = |x: f64| x.is_finite() && x > 0.0;
        check(pos(self.bw_hz), "bw_hz", "must be > 0")?;
        check(pos(self.sigma2_n_w), "noise_dbm", "must be > 0")?;
        check(pos(self.p_max_w), "p_max_dbm", "must be > 0")?;
        check(self.xi > 0.0 && self.xi <= 1.0, "xi", "must lie in (0, 1]")?;
        for k in 0..2 {
            check(
                self.kappa[k] > 0.0 && self.kappa[k] <= 1.0,
                "kappa",
                "each entry must lie in (0, 1]",
            )?;
            check(
                pos(self.t_t[k]) && pos(self.t_h[k]),
                "t_t/t_h",
                "time fractions must be > 0",
            )?;
            check(
                (self.t_t[k] + self.t_h[k] - 1.0).abs() <= 1e-12,
                "t_t/t_h",
                "t_t + t_h must equal 1",
            )?;
            check(
                self.gamma_init[k] > 0.0 && self.gamma_init[k] <= 1.0,
                "gamma_init",
                "each entry must lie in (0, 1]",
            )?;
        }
        check(pos(self.p_c_ce_w), "p_c_ce_w", "must be > 0")?;
        check(pos(self.p_c_rsu_w), "p_c_rsu_w", "must be > 0")?;
        check(pos(self.p_c_rs_w), "p_c_rs_dbm", "must be > 0")?;
        check(pos(self.r_min), "r_min", "must be > 0")?;
        check(
            self.alpha.is_finite() && self.alpha >= 0.0,
            "alpha",
            "must be >= 0",
        )?;
        check(
            self.rho >= 0.0 && self.rho < 1.0,
            "rho",
            "must lie in [0, 1)",
        )?;
        check(self.nu > 0.0 && self.nu < 1.0, "nu", "must lie in (0, 1)")?;
        check(
            self.theta().is_finite() && self.theta() > 0.0,
            "theta",
            "must be > 0",
        )?;
        check(pos(self.p_gap_w), "p_gap_w", "must be > 0")?;
        check(
            self.step_sizes.iter().all(|&w| pos(w)),
            "step_sizes",
            "all steps must be > 0",
        )?;
        check(self.i_max >= 1, "i_max", "must be >= 1")?;
        check(self.ao_rounds >= 1, "ao_rounds", "must be >= 1")?;
        check(pos(self.delta_max), "delta_max", "must be > 0")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversions() {
        assert!((dbm_to_watts(40.0) - 10.0).abs() < 1e-12);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(-114.0) - 3.981071705534969e-15).abs() < 1e-27);
        assert!((watts_to_dbm(dbm_to_watts(-35.0)) + 35.0).abs() < 1e-12);
    }

    #[test]
    fn defaults_are_valid() {
        let p = SystemParams::default();
        p.validate().unwrap();
        assert!((p.p_c_rs_w - 3.1622776601683794e-7).abs() < 1e-18);
        assert_eq!(p.theta(), 1.0);
    }

    #[test]
    fn rejects_out_of_range() {
        let p = SystemParams {
            rho: 1.2,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "rho"),
            other => panic!("unexpected {other:?}"),
        }
        let p = SystemParams {
            t_t: [0.6, 0.5],
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
