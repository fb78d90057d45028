//! Squeezing, loss, time and energy budgets for BosonSampling on a
//! macronode lattice with `m = n^2` modes and depth `k = m`.

use std::f64::consts::LN_10;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default wave-packet duration in seconds.
pub const DEFAULT_DELTA_T: f64 = 150e-9;

pub const MINUTE: f64 = 60.0;
pub const DAY: f64 = 86_400.0;
pub const YEAR: f64 = 365.25 * DAY;

fn check_r(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSqueezing(r))
    }
}

fn check_photons(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("photon number must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn check_delta_t(delta_t: f64) -> Result<()> {
    if delta_t > 0.0 && delta_t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("wave-packet duration {delta_t} must be positive")))
    }
}

/// Efficiency `tanh^2 r` of one teleportation.
pub fn gamma_from_r(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(r.tanh().powi(2))
}

/// End-to-end efficiency `(tanh r)^{4(k+1)}` of a depth-`k` circuit.
pub fn gamma_eff(r: f64, k: usize) -> Result<f64> {
    check_r(r)?;
    Ok((4.0 * (k as f64 + 1.0) * r.tanh().ln()).exp())
}

/// Inverse of [`gamma_eff`].
pub fn r_from_gamma_eff(gamma_eff: f64, k: usize) -> Result<f64> {
    if !(gamma_eff > 0.0 && gamma_eff < 1.0) {
        return Err(Error::InvalidEfficiency(gamma_eff));
    }
    Ok((gamma_eff.ln() / (4.0 * (k as f64 + 1.0))).exp().atanh())
}

/// `10 log10(e^{2r})`.
pub fn squeezing_db(r: f64) -> f64 {
    20.0 * r / LN_10
}

pub fn r_from_db(db: f64) -> f64 {
    db * LN_10 / 20.0
}

/// Expected number of trials until all `n` photons survive, `gamma_eff^{-n}`.
pub fn expected_trials(n: usize, gamma_eff: f64) -> Result<f64> {
    Ok(log_expected_trials(n, gamma_eff)?.exp())
}

/// `ln T = -n ln gamma_eff`, finite where `T` itself would overflow.
pub fn log_expected_trials(n: usize, gamma_eff: f64) -> Result<f64> {
    check_photons(n)?;
    if !(gamma_eff > 0.0 && gamma_eff <= 1.0) {
        return Err(Error::InvalidEfficiency(gamma_eff));
    }
    Ok(-(n as f64) * gamma_eff.ln())
}

/// Time for one experiment on an `(n^2 + 1) x (n^2 + 2)` lattice.
pub fn experiment_time(n: usize, delta_t: f64) -> Result<f64> {
    check_photons(n)?;
    check_delta_t(delta_t)?;
    let m = (n * n) as f64;
    Ok((m + 1.0) * (m + 2.0) * delta_t)
}

/// `ell = 4 n (k + 1)` with `k = n^2`.
pub fn ell(n: usize) -> usize {
    4 * n * (n * n + 1)
}

/// `(1/2) ln coth x`, which is its own inverse on `x > 0`.
pub fn half_log_coth(x: f64) -> f64 {
    // coth x = (1 + e^{-2x}) / (1 - e^{-2x})
    let e = (-2.0 * x).exp();
    0.5 * (e.ln_1p() - (-(-2.0 * x).exp_m1()).ln())
}

pub fn energy_scale(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(r.sinh().powi(2))
}

/// Squeezing that makes the expected wall-clock time of a successful
/// `n`-photon experiment equal `wall_clock`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WallClockSqueezing {
    pub r: f64,
    pub squeezing_db: f64,
    /// Trials affordable in the wall clock, `wall_clock / tau`.
    pub trials_budget: f64,
    /// Whether `r < (1/2) ln(1 + 2 ell / ln T_p)`.
    pub within_bound: bool,
}

pub fn r_for_wall_clock(n: usize, wall_clock: f64, delta_t: f64) -> Result<WallClockSqueezing> {
    let tau = experiment_time(n, delta_t)?;
    if !(wall_clock.is_finite() && wall_clock > tau) {
        return Err(Error::InfeasibleWallClock { wall_clock, tau });
    }
    let trials_budget = wall_clock / tau;
    let log_tp = trials_budget.ln();
    let ell = ell(n) as f64;
    let r = half_log_coth(log_tp / (2.0 * ell));
    let bound = 0.5 * (2.0 * ell / log_tp).ln_1p();
    Ok(WallClockSqueezing {
        r,
        squeezing_db: squeezing_db(r),
        trials_budget,
        within_bound: r < bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourcePlan {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub r: f64,
    pub squeezing_db: f64,
    pub gamma: f64,
    pub gamma_eff: f64,
    pub ell: usize,
    /// Expected trials `gamma_eff^{-n}`.
    #[serde(rename = "T")]
    pub trials: f64,
    pub delta_t: f64,
    pub tau: f64,
    pub wall_clock: f64,
    pub energy_scale: f64,
    pub within_bound: bool,
}

impl ResourcePlan {
    /// Plan for a given squeezing level.
    pub fn for_squeezing(n: usize, r: f64, delta_t: f64) -> Result<Self> {
        check_r(r)?;
        let m = n * n;
        let k = m;
        let tau = experiment_time(n, delta_t)?;
        let gamma_eff = gamma_eff(r, k)?;
        let trials = expected_trials(n, gamma_eff)?;
        let ell = ell(n);
        let bound = {
            let log_tp = log_expected_trials(n, gamma_eff)?;
            log_tp > 0.0 && r < 0.5 * (2.0 * ell as f64 / log_tp).ln_1p()
        };
        Ok(Self {
            n,
            m,
            k,
            r,
            squeezing_db: squeezing_db(r),
            gamma: gamma_from_r(r)?,
            gamma_eff,
            ell,
            trials,
            delta_t,
            tau,
            wall_clock: tau * trials,
            energy_scale: energy_scale(r)?,
            within_bound: bound,
        })
    }

    /// Plan whose expected wall clock equals `wall_clock` seconds.
    pub fn for_wall_clock(n: usize, wall_clock: f64, delta_t: f64) -> Result<Self> {
        let solved = r_for_wall_clock(n, wall_clock, delta_t)?;
        let mut plan = Self::for_squeezing(n, solved.r, delta_t)?;
        plan.within_bound = solved.within_bound;
        Ok(plan)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub ell: usize,
    pub db_1min: f64,
    pub db_1day: f64,
    pub db_1year: f64,
}

/// Squeezing needed for 1-minute, 1-day and 1-year experiments, per `n`.
pub fn sweep_curve(n_min: usize, n_max: usize, delta_t: f64) -> Result<Vec<CurveRow>> {
    if n_min < 2 || n_max < n_min {
        return Err(Error::InvalidParameter(format!("bad photon range {n_min}..{n_max}")));
    }
    (n_min..=n_max)
        .map(|n| {
            Ok(CurveRow {
                n,
                ell: ell(n),
                db_1min: r_for_wall_clock(n, MINUTE, delta_t)?.squeezing_db,
                db_1day: r_for_wall_clock(n, DAY, delta_t)?.squeezing_db,
                db_1year: r_for_wall_clock(n, YEAR, delta_t)?.squeezing_db,
            })
        })
        .collect()
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("n,ell,db_1min,db_1day,db_1year\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4}\n",
            row.n, row.ell, row.db_1min, row.db_1day, row.db_1year
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn efficiencies() {
        assert_eq!(gamma_from_r(0.0).unwrap(), 0.0);
        assert!((gamma_from_r(2.32).unwrap() - 0.9621047066).abs() < 1e-9);
        assert!(gamma_from_r(40.0).unwrap() <= 1.0);
        assert!(gamma_from_r(-1.0).is_err());
        assert!((gamma_eff(0.7, 0).unwrap() - 0.7f64.tanh().powi(4)).abs() < 1e-15);
        assert!((gamma_eff(2.32, 6).unwrap() - 0.58225).abs() < 1e-5);
        // 1 - tanh(12)^{4(k+1)} stays below 1e-8 up to k = 32 only
        for k in 0..=32 {
            assert!(gamma_eff(12.0, k).unwrap() >= 1.0 - 1e-8);
        }
        assert!((1.0 - gamma_eff(12.0, 100).unwrap() - 3.0503087e-8).abs() < 1e-14);
        assert_eq!(gamma_eff(0.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn inversion() {
        let r = r_from_gamma_eff(0.58, 6).unwrap();
        assert!((r - 2.316427).abs() < 1e-6);
        assert!((squeezing_db(r) - 20.1202).abs() < 1e-4);
        assert!((r_from_gamma_eff(0.9, 0).unwrap() - 2.1649333418).abs() < 1e-9);
        let g = 1f64.tanh().powi(4 * 4);
        assert!((r_from_gamma_eff(g, 3).unwrap() - 1.0).abs() < 1e-10);
        assert!(r_from_gamma_eff(1.0, 3).is_err());
        assert!(r_from_gamma_eff(0.0, 3).is_err());
    }

    #[test]
    fn trials_and_times() {
        assert_eq!(expected_trials(3, 1.0).unwrap(), 1.0);
        assert!((expected_trials(1, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(expected_trials(1, 0.0).is_err());
        assert!((experiment_time(1, 1.0).unwrap() - 6.0).abs() < 1e-15);
        assert!((experiment_time(20, DEFAULT_DELTA_T).unwrap() - 0.0241803).abs() < 1e-9);
        assert!((experiment_time(5, DEFAULT_DELTA_T).unwrap() - 1.053e-4).abs() < 1e-9);
        assert_eq!(ell(20), 32080);
    }

    #[test]
    fn wall_clock_plans() {
        let p = r_for_wall_clock(20, DAY, DEFAULT_DELTA_T).unwrap();
        assert!((p.r - 4.17759).abs() < 1e-5);
        assert!((p.squeezing_db - 36.2861).abs() < 1e-4);
        assert!((p.trials_budget - 3.5732e6).abs() < 1e2);
        assert!(p.within_bound);
        let p5 = r_for_wall_clock(5, DAY, DEFAULT_DELTA_T).unwrap();
        assert!((p5.r - 1.96272).abs() < 1e-5);
        assert!((p5.squeezing_db - 17.0480).abs() < 1e-4);
        let p6 = r_for_wall_clock(6, DAY, DEFAULT_DELTA_T).unwrap();
        assert!((p6.squeezing_db - 19.5212).abs() < 1e-4);
        assert!(p6.squeezing_db <= 20.1);
        assert!(matches!(
            r_for_wall_clock(5, 1e-5, DEFAULT_DELTA_T),
            Err(Error::InfeasibleWallClock { .. })
        ));
    }

    #[test]
    fn plan_round_trip() {
        let plan = ResourcePlan::for_wall_clock(20, DAY, DEFAULT_DELTA_T).unwrap();
        assert_eq!((plan.m, plan.k, plan.ell), (400, 400, 32080));
        assert!((plan.trials - 3.5732e6).abs() / 3.5732e6 < 1e-4);
        assert!((plan.wall_clock - DAY).abs() / DAY < 1e-6);
        assert!((plan.squeezing_db - 10.0 * (2.0 * plan.r).exp().log10()).abs() < 1e-12);
        assert!((plan.gamma_eff - plan.gamma.powi(2 * (plan.k as i32 + 1))).abs() < 1e-12);
    }

    #[test]
    fn energy() {
        assert_eq!(energy_scale(0.0).unwrap(), 0.0);
        assert!((energy_scale(1.0).unwrap() - 1.3810978455).abs() < 1e-9);
        let r: f64 = 15.0;
        let ratio = energy_scale(2.0 * r).unwrap() / energy_scale(r).unwrap();
        assert!((ratio / (2.0 * r).exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn curve_rows() {
        let rows = sweep_curve(2, 25, DEFAULT_DELTA_T).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].n > pair[0].n);
        }
        for row in &rows {
            assert!(row.db_1min > row.db_1day && row.db_1day > row.db_1year);
        }
        let n20 = rows.iter().find(|r| r.n == 20).unwrap();
        assert!((n20.db_1day - 36.3).abs() < 0.1);
        let csv = curve_csv(&rows[..1]);
        assert!(csv.starts_with("n,ell,db_1min,db_1day,db_1year\n2,40,"));
        assert!(sweep_curve(1, 4, DEFAULT_DELTA_T).is_err());
    }

    #[test]
    fn half_log_coth_is_self_inverse() {
        for i in 1..=500 {
            let x = f64::from(i) * 0.01;
            assert!((half_log_coth(half_log_coth(x)) - x).abs() < 1e-10, "x = {x}");
        }
    }
}
