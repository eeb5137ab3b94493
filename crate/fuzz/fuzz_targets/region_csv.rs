#![no_main]

use libfuzzer_sys::fuzz_target;
use maac::region::{export_region, CapacityRegion, RegionFormat};

fuzz_target!(|text: &str| {
    if let Ok(region) = CapacityRegion::from_csv(text) {
        let csv = export_region(&region, RegionFormat::Csv);
        assert_eq!(CapacityRegion::from_csv(&csv).unwrap(), region);
    }
});
