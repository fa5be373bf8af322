//! How sensitive is the posterior-mean prediction to the prior precision on
//! the location? The curve scans tau = 0.5 * 10^(-l) over a ladder of
//! exponents; a flat right end means the data dominate any diffuse prior.

use repairtime::model::extract_hybrid_sample;
use repairtime::numerics::QuadratureSpec;
use repairtime::report::{OutputFormat, SensitivityReport};
use repairtime::twoparam::sensitivity_curve;
use repairtime::{HybridScheme, PredictionTarget, Result};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/ball_bearings.txt");

fn main() -> Result<()> {
    let lifetimes = repairtime::data::load_lifetimes(DATA)?;
    let scheme = HybridScheme::new(23, 20, 1.25)?;
    let sample = extract_hybrid_sample(&lifetimes, scheme)?;
    let target = PredictionTarget::new(1, 1)?;

    let exponents = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
    let rows = sensitivity_curve(&sample, &target, 0.0, &exponents, &QuadratureSpec::reporting())?;

    let report = SensitivityReport {
        units: Some("10^8 revolutions".into()),
        m: 1,
        k: 1,
        xi: 0.0,
        rows,
    };
    print!("{}", report.render(OutputFormat::Table)?);
    Ok(())
}
