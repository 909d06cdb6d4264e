mod common;

use common::{brute_force, scenario};
use risbound_core::bounds::{ibd_bound, ni_bound, nio_bound, NioOptions};
use risbound_core::scenario::LoadSet;
use risbound_core::sdr::sdr_bound;
use risbound_sdp::SolverOptions;

#[test]
fn every_bound_dominates_the_exhaustive_optimum() {
    for seed in 0..24u64 {
        for loads in LoadSet::ALL {
            let n = 2 + (seed as usize % 5);
            let m = scenario(n, seed, loads);
            let (_, best) = brute_force(&m);
            let sdr = sdr_bound(&m, &SolverOptions::default()).unwrap();
            assert!(best <= sdr.bound * (1.0 + 1e-6) + 1e-9, "seed {seed} {:?}: {best} > SDR {}", loads.name, sdr.bound);
            let ni = ni_bound(&m);
            if ni.valid {
                let ni = ni.value.unwrap();
                assert!(best <= ni, "NI {ni} < {best}");
                let nio = nio_bound(&m, &NioOptions::default()).value.unwrap();
                assert!(best <= nio, "NIO {nio} < {best}");
                assert!(nio <= ni * (1.0 + 1e-12));
            }
            if loads.name == risbound_core::scenario::LoadSetName::Pm {
                let ibd = ibd_bound(&m).unwrap().0.value.unwrap();
                assert!(best <= ibd * (1.0 + 1e-8), "IBD {ibd} < {best}");
            }
        }
    }
}
