//! Full prediction table for the ball-bearing fatigue data: point
//! predictors and 95% intervals for every target on a (m, k) grid, under
//! both censoring designs used in the worked analysis.

use repairtime::model::extract_hybrid_sample;
use repairtime::numerics::QuadratureSpec;
use repairtime::report::{IntervalReport, IntervalRow, OutputFormat, PointReport, PointRow};
use repairtime::twoparam::{Hyperparams, PredictiveContext};
use repairtime::{HybridScheme, PredictionTarget, Result};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/ball_bearings.txt");

fn main() -> Result<()> {
    let lifetimes = repairtime::data::load_lifetimes(DATA)?;
    let hyper = Hyperparams::new(0.0, 0.5)?;

    for (label, r, t) in [("design 1: r = 20, T = 1.25", 20, 1.25), ("design 2: r = 20, T = 1", 20, 1.0)] {
        let scheme = HybridScheme::new(23, r, t)?;
        let sample = extract_hybrid_sample(&lifetimes, scheme)?;
        println!("{label} (observed d = {}, stop at {})", sample.d(), sample.t0());

        let seed = PredictionTarget::new(1, 1)?;
        let ctx = PredictiveContext::new(sample, hyper, seed, QuadratureSpec::reporting())?;

        let mut points = Vec::new();
        let mut intervals = Vec::new();
        for k in 1..=3u32 {
            for m in 1..=4u32 {
                let target = PredictionTarget::new(m, k)?;
                let ctx = ctx.with_target(target);
                points.push(PointRow {
                    m,
                    k,
                    sel: ctx.point_sel()?,
                    ael: ctx.point_ael()?,
                    mode: ctx.point_mode()?,
                });
                for pi in [ctx.equitailed_pi(0.05)?, ctx.hpd_pi(0.05)?] {
                    intervals.push(IntervalRow {
                        m,
                        k,
                        kind: pi.kind,
                        lower: pi.lower,
                        upper: pi.upper,
                        width: pi.width(),
                        level: pi.level,
                    });
                }
            }
        }

        let units = Some("10^8 revolutions".to_string());
        let point_report = PointReport { units: units.clone(), loss: None, rows: points };
        let interval_report = IntervalReport { units, rows: intervals };
        println!("{}", point_report.render(OutputFormat::Table)?);
        println!("{}", interval_report.render(OutputFormat::Table)?);
    }
    Ok(())
}
