//! Topologies, fading draws and the imperfect-CSI channel view.
//!
//! Path-loss convention: the forward link follows the amplitude model
//! `H_f = d_f^-α · h_f`, so the forward power gain is `d_f^-2α · |h_f|²`.
//! The composite large-scale gain `d_k = d_f^-α · d_b^-α` is the variance of
//! the composite channel `H_k`, which is split into an estimate `Ĥ_k` and an
//! error of variance `σ²_e`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemParams;

const CHANNEL_STREAM: u64 = 0x6368_616e;
const PLACEMENT_STREAM: u64 = 0x6270_7021;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Positions {
    pub ce: [f64; 2],
    pub rsu: [f64; 2],
    pub sensors: [[f64; 2]; 2],
}

/// Distances of a two-sensor cluster. Index 0 is sensor 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Topology {
    pub d_f: [f64; 2],
    pub d_b: [f64; 2],
    pub positions: Option<Positions>,
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Topology {
    pub fn fixed(d_f: [f64; 2], d_b: [f64; 2]) -> Result<Self> {
        let t = Topology {
            d_f,
            d_b,
            positions: None,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn from_positions(positions: Positions) -> Result<Self> {
        let d_f = positions.sensors.map(|s| dist(positions.ce, s));
        let d_b = positions.sensors.map(|s| dist(s, positions.rsu));
        let t = Topology {
            d_f,
            d_b,
            positions: Some(positions),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .d_f
            .iter()
            .chain(&self.d_b)
            .any(|d| !(d.is_finite() && *d > 0.0))
        {
            return Err(Error::invalid("distances must be strictly positive"));
        }
        if let Some(pos) = &self.positions {
            for k in 0..2 {
                let df = dist(pos.ce, pos.sensors[k]);
                let db = dist(pos.sensors[k], pos.rsu);
                if (df - self.d_f[k]).abs() > 1e-9 * df || (db - self.d_b[k]).abs() > 1e-9 * db {
                    return Err(Error::invalid("distances disagree with positions"));
                }
            }
        }
        Ok(())
    }
}

/// Sensors scattered by a binomial point process around a CE at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensorField {
    pub radius_m: f64,
    pub ce: [f64; 2],
    pub rsu: [f64; 2],
    pub sensors: Vec<[f64; 2]>,
}

impl SensorField {
    pub fn d_f(&self, i: usize) -> f64 {
        dist(self.ce, self.sensors[i])
    }

    pub fn d_b(&self, i: usize) -> f64 {
        dist(self.sensors[i], self.rsu)
    }

    /// Two-sensor topology made of sensors `i` and `j`.
    pub fn pair(&self, i: usize, j: usize) -> Result<Topology> {
        if i == j || i >= self.sensors.len() || j >= self.sensors.len() {
            return Err(Error::invalid("pair indices must be distinct and in range"));
        }
        Topology::from_positions(Positions {
            ce: self.ce,
            rsu: self.rsu,
            sensors: [self.sensors[i], self.sensors[j]],
        })
    }
}

/// Places `n` sensors uniformly in a disc of `radius_m` around the CE (at
/// the origin). The RSU sits at `rsu`.
pub fn place_sensors_bpp(n: usize, radius_m: f64, rsu: [f64; 2], seed: u64) -> Result<SensorField> {
    if n == 0 {
        return Err(Error::invalid("sensor count must be >= 1"));
    }
    if !(radius_m.is_finite() && radius_m > 0.0) {
        return Err(Error::invalid("radius must be > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PLACEMENT_STREAM);
    let sensors = (0..n)
        .map(|_| {
            // sqrt of a uniform gives a uniform density over the disc area
            let r = radius_m * rng.random::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect();
    Ok(SensorField {
        radius_m,
        ce: [0.0, 0.0],
        rsu,
        sensors,
    })
}

/// Channel realization of one cluster. Per-sensor arrays are indexed by the
/// current label; after [`estimate_csi`] index 1 is the stronger sensor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioChannel {
    pub d_f: [f64; 2],
    pub d_b: [f64; 2],
    #[serde(skip)]
    pub h_f: [Complex64; 2],
    #[serde(skip)]
    pub h_b: [Complex64; 2],
    /// Unit-variance draw that realizes `Ĥ_k` once scaled by `σ²_Ĥk`.
    #[serde(skip)]
    pub h_hat: [Complex64; 2],
    /// Forward power gains `|H_f,k|²`.
    pub g_f: [f64; 2],
    /// Composite large-scale gains `d_f^-α · d_b^-α`.
    pub d_k: [f64; 2],
    /// `|Ĥ_k|²`.
    pub g_hat: [f64; 2],
    pub sigma2_e: f64,
    pub sigma2_hat: [f64; 2],
    /// Original sensor index of each label.
    pub labels: [usize; 2],
}

impl ScenarioChannel {
    /// Channel with directly specified gains, for hand-built cases.
    pub fn synthetic(g_f: [f64; 2], g_hat: [f64; 2], sigma2_e: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        ScenarioChannel {
            d_f: [1.0; 2],
            d_b: [1.0; 2],
            h_f: [one; 2],
            h_b: [one; 2],
            h_hat: [one; 2],
            g_f,
            d_k: [g_hat[0] + sigma2_e, g_hat[1] + sigma2_e],
            g_hat,
            sigma2_e,
            sigma2_hat: g_hat,
            labels: [0, 1],
        }
    }

    /// `sample_channels` followed by `estimate_csi`.
    pub fn draw(topology: &Topology, params: &SystemParams, seed: u64) -> Result<Self> {
        estimate_csi(&sample_channels(topology, params, seed)?, params)
    }

    fn swap_labels(&mut self) {
        self.d_f.swap(0, 1);
        self.d_b.swap(0, 1);
        self.h_f.swap(0, 1);
        self.h_b.swap(0, 1);
        self.h_hat.swap(0, 1);
        self.g_f.swap(0, 1);
        self.d_k.swap(0, 1);
        self.g_hat.swap(0, 1);
        self.sigma2_hat.swap(0, 1);
        self.labels.swap(0, 1);
    }
}

/// Circularly-symmetric complex Gaussian with unit variance.
fn cn01<R: Rng>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Draws Rayleigh fading for both links and composes the large-scale gains.
/// The CSI fields are left at their perfect-CSI values until
/// [`estimate_csi`] runs.
pub fn sample_channels(
    topology: &Topology,
    params: &SystemParams,
    seed: u64,
) -> Result<ScenarioChannel> {
    topology.validate()?;
    if !(params.alpha.is_finite() && params.alpha >= 0.0) {
        return Err(Error::invalid("path-loss exponent must be >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CHANNEL_STREAM);
    let mut h_f = [Complex64::default(); 2];
    let mut h_b = [Complex64::default(); 2];
    let mut h_hat = [Complex64::default(); 2];
    for k in 0..2 {
        h_f[k] = cn01(&mut rng);
        h_b[k] = cn01(&mut rng);
        h_hat[k] = cn01(&mut rng);
    }
    let a = params.alpha;
    let g_f = [0, 1].map(|k| topology.d_f[k].powf(-a).powi(2) * h_f[k].norm_sqr());
    let d_k = [0, 1].map(|k| topology.d_f[k].powf(-a) * topology.d_b[k].powf(-a));
    Ok(ScenarioChannel {
        d_f: topology.d_f,
        d_b: topology.d_b,
        h_f,
        h_b,
        h_hat,
        g_f,
        d_k,
        g_hat: [0, 1].map(|k| d_k[k] * h_hat[k].norm_sqr()),
        sigma2_e: 0.0,
        sigma2_hat: d_k,
        labels: [0, 1],
    })
}

/// Splits each composite channel into estimate and error.
///
/// One error variance serves both sensors: `σ²_e = ρ · d_far`, where the far
/// sensor has the smaller composite gain. The estimate variance is
/// `σ²_Ĥk = d_k - σ²_e`, so `σ²_Ĥk + σ²_e = d_k` holds for both sensors.
/// Sensors are relabeled so that `|Ĥ2|² > |Ĥ1|²`.
pub fn estimate_csi(channel: &ScenarioChannel, params: &SystemParams) -> Result<ScenarioChannel> {
    if !(params.rho >= 0.0 && params.rho < 1.0) {
        return Err(Error::invalid("relative channel error must lie in [0, 1)"));
    }
    let mut out = channel.clone();
    let d_far = out.d_k[0].min(out.d_k[1]);
    out.sigma2_e = params.rho * d_far;
    for k in 0..2 {
        out.sigma2_hat[k] = out.d_k[k] - out.sigma2_e;
        out.g_hat[k] = out.sigma2_hat[k] * out.h_hat[k].norm_sqr();
    }
    if out.g_hat[0] > out.g_hat[1] {
        out.swap_labels();
    }
    Ok(out)
}

/// `P^I_k = P_ce · |H_f,k|²`.
pub fn incident_power(p_ce_w: f64, g_f_k: f64) -> f64 {
    p_ce_w * g_f_k
}

/// Harvested power of sensor `k` (0-based) as
/// `(transmission mode, harvesting mode)`.
pub fn harvested_power(
    p_i_w: f64,
    gamma: f64,
    params: &SystemParams,
    k: usize,
) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!(
            "reflection coefficient {gamma} outside (0, 1]"
        )));
    }
    if p_i_w < 0.0 {
        return Err(Error::invalid("incident power must be >= 0"));
    }
    let tx = params.xi * (1.0 - gamma) * p_i_w * params.t_t[k];
    let eh = params.xi * p_i_w * params.t_h[k];
    Ok((tx, eh))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn bpp_points_stay_in_disc_and_are_seeded() {
        let a = place_sensors_bpp(2, 5.0, [0.0, 40.0], 7).unwrap();
        let b = place_sensors_bpp(2, 5.0, [0.0, 40.0], 7).unwrap();
        assert_eq!(a, b);
        for i in 0..2 {
            assert!(a.d_f(i) <= 5.0);
        }
        let c = place_sensors_bpp(2, 5.0, [0.0, 40.0], 8).unwrap();
        assert_ne!(a.sensors, c.sensors);
    }

    #[test]
    fn bpp_mean_radius_matches_uniform_disc() {
        // E[r] = 2R/3 for a uniform disc
        let field = place_sensors_bpp(1000, 5.0, [0.0, 40.0], 1).unwrap();
        let mean = (0..1000).map(|i| field.d_f(i)).sum::<f64>() / 1000.0;
        assert!(rel(mean, 10.0 / 3.0) < 0.02, "mean {mean}");
    }

    #[test]
    fn bpp_rejects_bad_arguments() {
        assert!(place_sensors_bpp(0, 5.0, [0.0, 0.0], 1).is_err());
        assert!(place_sensors_bpp(2, 0.0, [0.0, 0.0], 1).is_err());
        assert!(place_sensors_bpp(2, -1.0, [0.0, 0.0], 1).is_err());
    }

    #[test]
    fn pair_distances_match_positions() {
        let field = place_sensors_bpp(5, 5.0, [3.0, 40.0], 3).unwrap();
        let t = field.pair(1, 4).unwrap();
        assert_eq!(t.d_f, [field.d_f(1), field.d_f(4)]);
        assert_eq!(t.d_b, [field.d_b(1), field.d_b(4)]);
        assert!(field.pair(2, 2).is_err());
    }

    #[test]
    fn composite_gain_arithmetic() {
        let t = Topology::fixed([5.0, 5.0], [30.0, 30.0]).unwrap();
        let ch = sample_channels(&t, &SystemParams::default(), 3).unwrap();
        let expected = 1.0 / (625.0 * 810_000.0);
        assert!(rel(ch.d_k[0], expected) < 1e-12);
        assert!(rel(ch.d_k[0], 1.975e-9) < 1e-3);
        for k in 0..2 {
            assert!(rel(ch.g_f[k], 5f64.powf(-8.0) * ch.h_f[k].norm_sqr()) < 1e-12);
        }
    }

    #[test]
    fn zero_exponent_gives_unit_gain() {
        let t = Topology::fixed([10.0, 5.0], [50.0, 30.0]).unwrap();
        let params = SystemParams {
            alpha: 0.0,
            ..Default::default()
        };
        let ch = sample_channels(&t, &params, 1).unwrap();
        assert_eq!(ch.d_k, [1.0, 1.0]);
    }

    #[test]
    fn rayleigh_power_has_unit_mean() {
        let t = Topology::fixed([1.0, 1.0], [1.0, 1.0]).unwrap();
        let params = SystemParams::default();
        let n = 100_000;
        let mean = (0..n)
            .map(|s| sample_channels(&t, &params, s).unwrap().h_f[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn perfect_csi_limit() {
        let t = Topology::fixed([10.0, 5.0], [50.0, 30.0]).unwrap();
        let params = SystemParams {
            rho: 0.0,
            ..Default::default()
        };
        let ch = ScenarioChannel::draw(&t, &params, 11).unwrap();
        assert_eq!(ch.sigma2_e, 0.0);
        assert_eq!(ch.sigma2_hat, ch.d_k);
    }

    #[test]
    fn error_variance_arithmetic() {
        let t = Topology::fixed([5.0, 5.0], [30.0, 30.0]).unwrap();
        let params = SystemParams::default();
        let ch = ScenarioChannel::draw(&t, &params, 2).unwrap();
        let expected = 0.005 / (625.0 * 810_000.0);
        assert!((ch.sigma2_e - expected).abs() < 1e-15);
        assert!((ch.sigma2_e - 9.877e-12).abs() < 1e-15);
    }

    #[test]
    fn rho_at_or_above_one_is_rejected() {
        let t = Topology::fixed([5.0, 5.0], [30.0, 30.0]).unwrap();
        let ch = sample_channels(&t, &SystemParams::default(), 1).unwrap();
        let bad = SystemParams {
            rho: 1.0,
            ..Default::default()
        };
        assert!(estimate_csi(&ch, &bad).is_err());
    }

    #[test]
    fn relabels_to_put_stronger_sensor_second() {
        let t = Topology::fixed([3.0, 5.0], [20.0, 30.0]).unwrap();
        let params = SystemParams::default();
        let mut swapped = 0;
        for seed in 0..200 {
            let raw = sample_channels(&t, &params, seed).unwrap();
            let ch = estimate_csi(&raw, &params).unwrap();
            assert!(ch.g_hat[1] > ch.g_hat[0]);
            if ch.labels == [1, 0] {
                swapped += 1;
                assert_eq!(ch.d_f, [5.0, 3.0]);
                assert_eq!(ch.g_f, [raw.g_f[1], raw.g_f[0]]);
            }
            // idempotent on an ordered channel
            assert_eq!(estimate_csi(&ch, &params).unwrap(), ch);
        }
        assert!(swapped > 0);
    }

    #[test]
    fn incident_and_harvested_power() {
        assert_eq!(incident_power(1.0, 1e-8), 1e-8);
        assert_eq!(incident_power(0.0, 123.0), 0.0);
        assert!(rel(incident_power(10.0, 1.975e-9), 1.975e-8) < 1e-15);

        let params = SystemParams::default();
        let (tx, _) = harvested_power(1e-6, 1.0, &params, 0).unwrap();
        assert_eq!(tx, 0.0);
        let (tx, eh) = harvested_power(1e-6, 0.4, &params, 1).unwrap();
        assert!(rel(tx, 1.8e-7) < 1e-12);
        assert!(rel(eh, 3e-7) < 1e-12);
        assert!(harvested_power(1e-6, 0.0, &params, 0).is_err());
        assert!(harvested_power(1e-6, 1.5, &params, 0).is_err());
    }
}
