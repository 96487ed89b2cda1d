use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ztwist::code::{build_z4_toric, condense_ds};
use ztwist::decoder::{extract_syndrome, logical_failure, run_bench, sample_error, Decoder};
use ztwist::lattice::{RegionMask, RegionRole, TorusLattice};
use ztwist::logical::LogicalBasis;

fn ds(n: usize) -> ztwist::code::StabilizerCode {
    let l = TorusLattice::new(n, n).unwrap();
    condense_ds(&build_z4_toric(&l), &RegionMask::full(&l, RegionRole::CondensedDs)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recovery_clears_every_syndrome(seed in any::<u64>(), p in 0.0f64..0.3) {
        let code = ds(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = sample_error(code.dim(), code.n_sites(), p, &mut rng);
        let out = Decoder::new(&code).run(&extract_syndrome(&code, &frame)).unwrap();
        let mut net = frame.clone();
        net.mul_assign_unchecked(&out.recovery);
        prop_assert!(extract_syndrome(&code, &net).is_trivial());
        let basis = LogicalBasis::new(&code);
        prop_assert!(logical_failure(&code, &basis, &frame, &out.recovery).is_ok());
    }
}

#[test]
fn bench_is_deterministic() {
    let code = ds(3);
    let a = run_bench(&code, 0.05, 300, 11, false).unwrap();
    let b = run_bench(&code, 0.05, 300, 11, false).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.csv_row(), b.csv_row());
    assert!(a.csv_row().ends_with(','));
}

#[test]
fn zero_noise_never_fails() {
    let r = run_bench(&ds(2), 0.0, 50, 1, false).unwrap();
    assert_eq!((r.failures, r.fallback_trials), (0, 0));
}
