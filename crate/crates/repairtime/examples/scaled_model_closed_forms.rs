//! The scale-only model: when the location is known to be zero, every
//! predictive quantity is closed form. This example prints the predictors,
//! the two interval kinds, and verifies the interval-defining identities
//! directly from the predictive survival function.

use repairtime::model::extract_hybrid_sample;
use repairtime::scaled::{
    scaled_equitailed_pi, scaled_hpd_pi, scaled_point_predictions, scaled_predictive_pdf,
    scaled_predictive_survival,
};
use repairtime::{HybridScheme, PredictionTarget, Result};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/ball_bearings.txt");

fn main() -> Result<()> {
    let lifetimes = repairtime::data::load_lifetimes(DATA)?;
    let scheme = HybridScheme::new(23, 20, 1.25)?;
    let sample = extract_hybrid_sample(&lifetimes, scheme)?;

    let target = PredictionTarget::new(2, 2)?;
    let points = scaled_point_predictions(&sample, &target)?;
    println!("m = 2 repairs of a k = 2 component series system");
    println!("  mean   {:.4}", points.sel);
    println!("  median {:.4}", points.ael);
    println!("  mode   {:.4}", points.mode);

    let eq = scaled_equitailed_pi(&sample, &target, 0.05)?;
    let hpd = scaled_hpd_pi(&sample, &target, 0.05)?;
    println!("  equi-tailed ({:.4},{:.4}) width {:.4}", eq.lower, eq.upper, eq.width());
    println!("  hpd         ({:.4},{:.4}) width {:.4}", hpd.lower, hpd.upper, hpd.width());

    // Each tail of the equi-tailed interval holds exactly alpha/2.
    let upper_tail = scaled_predictive_survival(eq.upper, &sample, &target)?;
    let lower_tail = 1.0 - scaled_predictive_survival(eq.lower, &sample, &target)?;
    println!("  tail masses {:.6} / {:.6} (both 0.025)", lower_tail, upper_tail);

    // The hpd interval has equal density at its endpoints and is narrower.
    let f_lo = scaled_predictive_pdf(hpd.lower, &sample, &target)?;
    let f_hi = scaled_predictive_pdf(hpd.upper, &sample, &target)?;
    println!("  endpoint densities {:.6} / {:.6}", f_lo, f_hi);
    assert!(hpd.width() <= eq.width());
    Ok(())
}
