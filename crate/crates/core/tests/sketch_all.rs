mod common;

use proptest::prelude::*;

use common::small_instance;
use stream_maxcov::offline::{brute_force_opt, DEFAULT_ORACLE_CAP};
use stream_maxcov::streamalgs::sketch_all;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // ε = 0.1 gives 400 values per sketch, more than any universe here
    #[test]
    fn exact_sketches_find_the_optimum((stream, k) in small_instance(), seed: u64) {
        let oracle = brute_force_opt(&stream, k, DEFAULT_ORACLE_CAP).unwrap();
        let before = stream.passes_consumed();
        let solution = sketch_all(&stream, k, 0.1, seed, DEFAULT_ORACLE_CAP).unwrap();
        prop_assert_eq!(stream.passes_consumed() - before, 1);
        prop_assert_eq!(solution.exact_coverage, oracle.exact_coverage);
        prop_assert_eq!(solution.estimated_coverage, Some(oracle.exact_coverage as f64));
        prop_assert_eq!(solution.sorted_ids(), oracle.sorted_ids());
    }
}
