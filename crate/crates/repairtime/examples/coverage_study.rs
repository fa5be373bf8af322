//! Frequentist performance of the Bayesian and plug-in interval methods,
//! estimated by simulation: expected risks of the three point predictors,
//! average interval width, and coverage probability.
//!
//! The replication count here is kept small so the example runs in a few
//! seconds; production studies use 2000 or more.

use repairtime::montecarlo::{run_performance_study, Method, SimConfig};
use repairtime::report::{OutputFormat, StudyReport};
use repairtime::twoparam::Hyperparams;
use repairtime::{PredictionTarget, RayleighParams, Result};

fn main() -> Result<()> {
    let cfg = SimConfig {
        n: 20,
        r: 17,
        t: 2.0,
        true_params: RayleighParams::new(0.0, 1.0)?,
        hyper: Hyperparams::new(0.0, 0.005)?,
        targets: vec![
            PredictionTarget::new(1, 1)?,
            PredictionTarget::new(2, 2)?,
            PredictionTarget::new(3, 3)?,
        ],
        alpha: 0.05,
        replications: 200,
        seed: 42,
        methods: vec![Method::BayesEquitailed, Method::BayesHpd, Method::Wald],
        ..SimConfig::default()
    };

    let study = run_performance_study(&cfg)?;
    let report = StudyReport {
        replications: study.replications,
        discarded: study.discarded,
        units: None,
        rows: study.rows,
    };
    print!("{}", report.render(OutputFormat::Table)?);
    Ok(())
}
