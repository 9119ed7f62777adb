//! Exhaustive grid search over `(P_ce, Γ1, Γ2)`.
//!
//! Uses the exact sum rate and the exact-rate QoS constraints, so its
//! optimum bounds what any bound-based method can reach on the same grid.
//! Grid points are `P_i = min(i·P_step, P_max)` for `i = 1..=⌈P_max/P_step⌉`
//! and likewise for each reflection coefficient.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aobws::Solution;
use crate::constraints::is_feasible;
use crate::error::{Constraint, Error, Result};
use crate::params::SystemParams;
use crate::rate_model::exact_ee;
use crate::scenario::ScenarioChannel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsConfig {
    pub p_step_w: f64,
    pub gamma_step: f64,
    pub p_max_w: f64,
    pub gamma_max: f64,
    /// Searches reflection coefficients only, at this CE power.
    #[serde(default)]
    pub p_fixed_w: Option<f64>,
}

impl EsConfig {
    /// Default resolution: `P_max / 400` and `0.005`.
    pub fn for_params(params: &SystemParams) -> Self {
        Self::with_resolution(params, 400, 0.005)
    }

    pub fn with_resolution(params: &SystemParams, power_points: usize, gamma_step: f64) -> Self {
        EsConfig {
            p_step_w: params.p_max_w / power_points as f64,
            gamma_step,
            p_max_w: params.p_max_w,
            gamma_max: 1.0,
            p_fixed_w: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p_fixed_w {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::invalid("fixed ES power must be > 0"));
            }
        } else if !(self.p_step_w > 0.0 && self.p_step_w <= self.p_max_w) {
            return Err(Error::invalid("need 0 < p_step <= p_max"));
        }
        if !(self.gamma_step > 0.0 && self.gamma_step <= self.gamma_max && self.gamma_max <= 1.0) {
            return Err(Error::invalid("need 0 < gamma_step <= gamma_max <= 1"));
        }
        Ok(())
    }

    fn count(step: f64, max: f64) -> usize {
        // guard against 0.3 / 0.1 = 2.9999999999999996
        let ratio = max / step;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * nearest {
            nearest as usize
        } else {
            ratio.ceil() as usize
        }
    }

    pub fn powers(&self) -> Vec<f64> {
        match self.p_fixed_w {
            Some(p) => vec![p],
            None => (1..=Self::count(self.p_step_w, self.p_max_w))
                .map(|i| (i as f64 * self.p_step_w).min(self.p_max_w))
                .collect(),
        }
    }

    pub fn reflections(&self) -> Vec<f64> {
        (1..=Self::count(self.gamma_step, self.gamma_max))
            .map(|j| (j as f64 * self.gamma_step).min(self.gamma_max))
            .collect()
    }

    /// `⌈P_max/P_step⌉ · ⌈Γ_max/Γ_step⌉²`.
    pub fn grid_size(&self) -> usize {
        self.powers().len() * self.reflections().len().pow(2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EsOutcome {
    pub solution: Solution,
    pub visited: usize,
    pub feasible_points: usize,
}

#[derive(Clone, Copy)]
struct Best {
    ee: f64,
    idx: (usize, usize, usize),
}

impl Best {
    /// Higher EE wins; ties go to the lowest (P, Γ1, Γ2) index.
    fn better(self, other: Option<Best>) -> bool {
        match other {
            None => true,
            Some(o) => self.ee > o.ee || (self.ee == o.ee && self.idx < o.idx),
        }
    }
}

fn pick(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), y) if x.better(y) => Some(x),
        (_, y @ Some(_)) => y,
        (x, None) => x,
    }
}

pub fn es_search_detailed(
    channel: &ScenarioChannel,
    params: &SystemParams,
    es: &EsConfig,
) -> Result<EsOutcome> {
    es.validate()?;
    let powers = es.powers();
    let refl = es.reflections();
    let (best, visited, feasible) = powers
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut best: Option<Best> = None;
            let mut visited = 0usize;
            let mut feasible = 0usize;
            for (j, &g1) in refl.iter().enumerate() {
                for (l, &g2) in refl.iter().enumerate() {
                    visited += 1;
                    if !is_feasible(p, [g1, g2], channel, params) {
                        continue;
                    }
                    feasible += 1;
                    let cand = Best {
                        ee: exact_ee(p, [g1, g2], channel, params),
                        idx: (i, j, l),
                    };
                    if cand.better(best) {
                        best = Some(cand);
                    }
                }
            }
            (best, visited, feasible)
        })
        .reduce(
            || (None, 0, 0),
            |a, b| (pick(a.0, b.0), a.1 + b.1, a.2 + b.2),
        );
    let best = best.ok_or(Error::infeasible(Constraint::NoFeasiblePoint))?;
    let (i, j, l) = best.idx;
    let solution = Solution::at(powers[i], [refl[j], refl[l]], channel, params);
    Ok(EsOutcome {
        solution,
        visited,
        feasible_points: feasible,
    })
}

pub fn es_search(
    channel: &ScenarioChannel,
    params: &SystemParams,
    es: &EsConfig,
) -> Result<Solution> {
    es_search_detailed(channel, params, es).map(|o| o.solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_model::exact_ee;
    use crate::scenario::Topology;

    fn scenario() -> (ScenarioChannel, SystemParams) {
        let params = SystemParams::default();
        let t = Topology::fixed([4.0, 3.0], [50.0, 30.0]).unwrap();
        (ScenarioChannel::draw(&t, &params, 21).unwrap(), params)
    }

    #[test]
    fn counts_follow_grid_formula() {
        let params = SystemParams::default();
        let es = EsConfig::with_resolution(&params, 200, 0.01);
        assert_eq!(es.powers().len(), 200);
        assert_eq!(es.reflections().len(), 100);
        assert_eq!(es.grid_size(), 200 * 100 * 100);
        let odd = EsConfig {
            p_step_w: 3.0,
            gamma_step: 0.3,
            p_max_w: 10.0,
            gamma_max: 1.0,
            p_fixed_w: None,
        };
        assert_eq!(odd.powers(), vec![3.0, 6.0, 9.0, 10.0]);
        assert_eq!(odd.reflections().len(), 4);
        assert_eq!(*odd.reflections().last().unwrap(), 1.0);
    }

    #[test]
    fn singleton_grid() {
        let (ch, params) = scenario();
        let es = EsConfig {
            p_step_w: params.p_max_w,
            gamma_step: 1.0,
            p_max_w: params.p_max_w,
            gamma_max: 1.0,
            p_fixed_w: None,
        };
        let out = es_search_detailed(&ch, &params, &es).unwrap();
        assert_eq!(out.visited, 1);
        assert_eq!(out.solution.p_ce_w, params.p_max_w);
        assert_eq!(out.solution.gamma, [1.0, 1.0]);
    }

    #[test]
    fn two_by_two_by_two_matches_enumeration() {
        let (ch, params) = scenario();
        let es = EsConfig {
            p_step_w: params.p_max_w / 2.0,
            gamma_step: 0.5,
            p_max_w: params.p_max_w,
            gamma_max: 1.0,
            p_fixed_w: None,
        };
        let out = es_search_detailed(&ch, &params, &es).unwrap();
        assert_eq!(out.visited, 8);
        let mut best = (f64::NEG_INFINITY, 0.0, [0.0; 2]);
        for p in [5.0, 10.0] {
            for g1 in [0.5, 1.0] {
                for g2 in [0.5, 1.0] {
                    if crate::constraints::violations(p, [g1, g2], &ch, &params).is_empty() {
                        let ee = exact_ee(p, [g1, g2], &ch, &params);
                        if ee > best.0 {
                            best = (ee, p, [g1, g2]);
                        }
                    }
                }
            }
        }
        assert_eq!(out.solution.ee, best.0);
        assert_eq!(out.solution.p_ce_w, best.1);
        assert_eq!(out.solution.gamma, best.2);
    }

    #[test]
    fn refinement_never_loses() {
        let (ch, params) = scenario();
        let coarse = EsConfig::with_resolution(&params, 20, 0.1);
        let fine = EsConfig::with_resolution(&params, 40, 0.05);
        let a = es_search(&ch, &params, &coarse).unwrap();
        let b = es_search(&ch, &params, &fine).unwrap();
        assert!(b.ee >= a.ee);
    }

    #[test]
    fn infeasible_grid_errors() {
        let (ch, params) = scenario();
        let params = SystemParams {
            r_min: 30.0,
            ..params
        };
        let es = EsConfig::with_resolution(&params, 4, 0.25);
        assert!(es_search(&ch, &params, &es).unwrap_err().is_infeasible());
    }

    #[test]
    fn bad_config_rejected() {
        let params = SystemParams::default();
        let mut es = EsConfig::for_params(&params);
        es.gamma_step = 0.0;
        assert!(es.validate().is_err());
        let mut es = EsConfig::for_params(&params);
        es.p_step_w = 2.0 * params.p_max_w;
        assert!(es.validate().is_err());
    }
}
