//! Shared fixtures for module tests.

use crate::model::{extract_hybrid_sample, HybridSample, HybridScheme};

/// Lifetimes of 23 ball bearings (millions of revolutions, scaled by 10^-2),
/// a classical reliability data set.
pub(crate) const BALL_BEARINGS: [f64; 23] = [
    0.1788, 0.2892, 0.3300, 0.4152, 0.4212, 0.4560, 0.4880, 0.5184, 0.5196, 0.5412, 0.5556,
    0.6780, 0.6864, 0.6864, 0.6888, 0.8412, 0.9312, 0.9864, 1.0512, 1.0584, 1.2792, 1.2804,
    1.7340,
];

/// Ball-bearing data censored at the r-th failure or time t.
pub(crate) fn bearing_sample(r: usize, t: f64) -> HybridSample {
    let scheme = HybridScheme::new(BALL_BEARINGS.len(), r, t).unwrap();
    extract_hybrid_sample(&BALL_BEARINGS, scheme).unwrap()
}

/// Three units, censored at the second failure or t = 2: observes (1, 2)
/// with d = 2, T0 = 2, delta = 9.
pub(crate) fn toy_sample() -> HybridSample {
    let scheme = HybridScheme::new(3, 2, 2.0).unwrap();
    extract_hybrid_sample(&[1.0, 2.0, 5.0], scheme).unwrap()
}
