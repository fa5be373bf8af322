//! Predictive density and survival curves for the next repair time,
//! emitted as two small CSV documents ready for plotting.

use repairtime::model::extract_hybrid_sample;
use repairtime::numerics::QuadratureSpec;
use repairtime::report::plot_csv;
use repairtime::twoparam::{Hyperparams, PredictiveContext};
use repairtime::{HybridScheme, PredictionTarget, Result};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/ball_bearings.txt");

fn main() -> Result<()> {
    let lifetimes = repairtime::data::load_lifetimes(DATA)?;
    let scheme = HybridScheme::new(23, 20, 1.25)?;
    let sample = extract_hybrid_sample(&lifetimes, scheme)?;

    let target = PredictionTarget::new(1, 1)?;
    let hyper = Hyperparams::new(0.0, 0.5)?;
    let ctx = PredictiveContext::new(sample, hyper, target, QuadratureSpec::reporting())?;

    // Cover essentially all predictive mass: the 99.9% equi-tailed interval.
    let range = ctx.equitailed_pi(0.001)?;
    let grid: Vec<f64> = (0..120)
        .map(|i| range.lower + (range.upper - range.lower) * i as f64 / 119.0)
        .collect();

    let mut density = Vec::with_capacity(grid.len());
    let mut survival = Vec::with_capacity(grid.len());
    for &u in &grid {
        density.push((u, ctx.predictive_pdf(u)?));
        survival.push((u, ctx.predictive_survival(u)?));
    }

    print!("{}", plot_csv(("u", "density"), &density));
    println!();
    print!("{}", plot_csv(("u", "survival"), &survival));
    Ok(())
}
