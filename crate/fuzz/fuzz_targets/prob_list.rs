#![no_main]

use libfuzzer_sys::fuzz_target;
use maac::cli::parse_prob_list;
use maac::pbin::pmf_dp;

fuzz_target!(|text: &str| {
    if let Ok(p) = parse_prob_list(text) {
        assert!(p.as_slice().iter().all(|x| (0.0..=1.0).contains(x)));
        if p.len() <= 256 {
            let f = pmf_dp(&p);
            assert_eq!(f.masses().len(), p.len() + 1);
            assert!((f.total() - 1.0).abs() < 1e-9);
        }
    }
});
