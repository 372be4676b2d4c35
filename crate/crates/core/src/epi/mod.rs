//! Activity-decomposed transmission rate and reproduction number.

mod calibration;
mod sir;

pub use calibration::{
    consumption_weights, industry_work_risk, intensity_weights, load_epi_calibration,
    load_epi_params, load_place_table, normalized, Activity, Beta0, EpiCalibration, EpiParams,
    Place, PlaceContactTable, SchoolNorm,
};
pub use sir::{sir_integrate, SirSeries};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::PolicyLambda;

/// Transmission rate split by activity, relative to the pre-lockdown total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaBreakdown {
    pub work: f64,
    pub school: f64,
    pub consumption: f64,
    pub transport: f64,
    pub home: f64,
    pub total: f64,
    /// Unrescaled reproduction number.
    pub r0: f64,
    pub r0_sd: f64,
}

/// Reproduction number of one policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R0Estimate {
    /// Anchored so that the lockdown policy reproduces the external estimate.
    pub r0: f64,
    pub r0_sd: f64,
    pub r0_unrescaled: f64,
    pub r0_unrescaled_sd: f64,
}

/// Relative standard error applied to every reported R0.
pub const R0_REL_SD: f64 = 0.2;

fn check_lambda(lambda: &PolicyLambda, calib: &EpiCalibration) -> Result<()> {
    let n = calib.eta.len();
    if lambda.delta_w.len() != n || lambda.delta_c.len() != n {
        return Err(Error::Validation(format!(
            "policy covers {} industries, calibration {n}",
            lambda.delta_w.len()
        )));
    }
    let all = lambda
        .delta_w
        .iter()
        .chain(&lambda.delta_c)
        .chain([&lambda.delta_s, &lambda.delta_h]);
    for d in all {
        if !(0.0..=1.0).contains(d) {
            return Err(Error::Validation(format!(
                "policy share {d} is outside [0, 1]"
            )));
        }
    }
    Ok(())
}

fn working_share(lambda: &PolicyLambda, calib: &EpiCalibration) -> f64 {
    lambda
        .delta_w
        .iter()
        .zip(&calib.eta)
        .map(|(d, e)| d * e)
        .sum()
}

/// Fraction of students attending school.
pub fn school_attendance(lambda: &PolicyLambda, calib: &EpiCalibration) -> f64 {
    let mut going = working_share(lambda, calib);
    if calib.school_norm == SchoolNorm::Adults {
        let adults: f64 = calib.eta.iter().sum();
        if adults > 0.0 {
            going /= adults;
        }
    }
    lambda.delta_s + (1.0 - lambda.delta_s) * calib.g * going
}

/// Per-activity transmission rates under `lambda`.
pub fn beta_total(lambda: &PolicyLambda, calib: &EpiCalibration) -> Result<BetaBreakdown> {
    check_lambda(lambda, calib)?;
    let b0 = &calib.beta0;
    let risk_total: f64 = calib.eta.iter().zip(&calib.b_w).map(|(e, b)| e * b).sum();
    let workers: f64 = calib.eta.iter().sum();
    let commuters = calib.eta_s + workers;
    if !(risk_total > 0.0) || !(commuters > 0.0) {
        return Err(Error::Validation(
            "calibration has no workers or students".into(),
        ));
    }
    let work_risk: f64 = (0..calib.eta.len())
        .map(|i| lambda.delta_w[i] * calib.eta[i] * calib.b_w[i])
        .sum();
    let mu_s = school_attendance(lambda, calib);
    let moving = (mu_s * calib.eta_s + working_share(lambda, calib)) / commuters;
    let consumption: f64 = lambda
        .delta_c
        .iter()
        .zip(&calib.b_c)
        .map(|(d, b)| d * b)
        .sum();

    let work = b0.work * work_risk / risk_total;
    let school = b0.school * mu_s;
    let consumption = b0.consumption * consumption;
    let transport = b0.transport * moving * moving;
    let home = b0.home * ((1.0 - lambda.delta_h) * calib.kappa + lambda.delta_h);
    let total = work + school + consumption + transport + home;
    let r0 = calib.r0_pre * total;
    Ok(BetaBreakdown {
        work,
        school,
        consumption,
        transport,
        home,
        total,
        r0,
        r0_sd: R0_REL_SD * r0,
    })
}

/// Reproduction number of `lambda`, anchored on the lockdown policy.
pub fn r0_estimate(
    lambda: &PolicyLambda,
    lockdown: &PolicyLambda,
    calib: &EpiCalibration,
) -> Result<R0Estimate> {
    let beta = beta_total(lambda, calib)?;
    let base = beta_total(lockdown, calib)?.total;
    if !(base > 0.0) {
        return Err(Error::Numerical(
            "lockdown transmission rate is zero".into(),
        ));
    }
    let r0 = calib.r0_lockdown_anchor * beta.total / base;
    Ok(R0Estimate {
        r0,
        r0_sd: R0_REL_SD * r0,
        r0_unrescaled: beta.r0,
        r0_unrescaled_sd: beta.r0_sd,
    })
}
