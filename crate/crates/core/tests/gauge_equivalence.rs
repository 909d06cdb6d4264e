mod common;

use common::{random_gauge, scenario};
use proptest::prelude::*;
use risbound_core::channel::channel_for;
use risbound_core::gauge::{apply_complex_scaling, apply_diagonal_similarity, apply_gauge, apply_mobius, gauge_admissible};
use risbound_core::scenario::LoadSet;
use risbound_core::{ControlVector, ModelParameters, C64};

fn max_deviation(a: &ModelParameters, b: &ModelParameters) -> f64 {
    let n = a.n_s();
    (0..1u64 << n)
        .map(|idx| {
            let v = ControlVector::from_index(n, idx);
            (channel_for(a, &v).unwrap() - channel_for(b, &v).unwrap()).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn each_gauge_preserves_every_channel() {
    for seed in 0..6u64 {
        let loads = LoadSet::ALL[seed as usize % 3];
        let th = scenario(6, seed, loads);
        let phi = random_gauge(6, seed);
        let ds = apply_diagonal_similarity(&th, &phi.d).unwrap();
        assert!(max_deviation(&th, &ds) <= 1e-10);
        let cs = apply_complex_scaling(&th, C64::new(0.3, 0.4)).unwrap();
        assert!(max_deviation(&th, &cs) <= 1e-10);
        let mo = apply_mobius(&th, C64::new(0.0, 0.3)).unwrap();
        assert!(max_deviation(&th, &mo) <= 1e-10);
        assert!(gauge_admissible(&th, &phi).admissible());
        let all = apply_gauge(&th, &phi).unwrap();
        assert!(max_deviation(&th, &all) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composite_gauge_preserves_channels(seed in 0u64..10_000, n in 1usize..6, set in 0usize..3) {
        let th = scenario(n, seed, LoadSet::ALL[set]);
        let phi = random_gauge(n, seed);
        prop_assume!(gauge_admissible(&th, &phi).admissible());
        let tilde = apply_gauge(&th, &phi).unwrap();
        prop_assert!(max_deviation(&th, &tilde) <= 1e-10);
    }
}
