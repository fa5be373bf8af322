//! Prior model check: does a centered normal prior on the location, with
//! some precision tau, reproduce data like the ones we would see? The check
//! simulates targets from the truth and from each candidate posterior, then
//! selects the precision whose predictive replicas best match (variance
//! ratio closest to one from below).

use repairtime::montecarlo::{run_model_check, SimConfig};
use repairtime::report::{ModelCheckReport, OutputFormat};
use repairtime::twoparam::Hyperparams;
use repairtime::{PredictionTarget, RayleighParams, Result};

fn main() -> Result<()> {
    let cfg = SimConfig {
        n: 20,
        r: 16,
        t: 2.0,
        true_params: RayleighParams::new(0.0, 1.0)?,
        hyper: Hyperparams::new(0.0, 0.005)?,
        targets: vec![PredictionTarget::new(3, 2)?],
        replications: 300,
        seed: 42,
        ..SimConfig::default()
    };

    let result = run_model_check(&cfg)?;
    let report = ModelCheckReport {
        units: None,
        m: 3,
        k: 2,
        result,
    };
    print!("{}", report.render(OutputFormat::Table)?);
    Ok(())
}
