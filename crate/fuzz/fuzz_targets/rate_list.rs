#![no_main]

use libfuzzer_sys::fuzz_target;
use maac::cli::parse_rate_list;
use maac::region::{build_region, is_member, is_member_naive, DEFAULT_TOL};

fuzz_target!(|text: &str| {
    if let Ok(rates) = parse_rate_list(text) {
        assert!(rates.as_slice().iter().all(|r| r.is_finite() && *r >= 0.0));
        if (1..=12).contains(&rates.len()) {
            let region = build_region(rates.len()).unwrap();
            // The two methods sum in different orders, so exact agreement can
            // fail within rounding of the boundary; check each direction
            // against a slightly looser run of the other.
            let loose = DEFAULT_TOL + 1e-9;
            if is_member(&region, &rates, DEFAULT_TOL).unwrap().member {
                assert!(is_member_naive(&region, &rates, loose).unwrap());
            }
            if is_member_naive(&region, &rates, DEFAULT_TOL).unwrap() {
                assert!(is_member(&region, &rates, loose).unwrap().member);
            }
        }
    }
});
