#![no_main]

use libfuzzer_sys::fuzz_target;
use maac::cli::{main_with_args, EXIT_USAGE};

// Argument parsing only: inputs that would start a long computation are
// filtered out before dispatch.
fuzz_target!(|text: &str| {
    let args: Vec<&str> = text.split_whitespace().collect();
    if args.iter().any(|a| a.len() > 64) || args.len() > 12 {
        return;
    }
    let heavy = [
        "certify",
        "scan",
        "maximize",
        "hessian-check",
        "curvature",
        "mi",
        "region",
        "member",
    ];
    if args.first().map_or(false, |c| heavy.contains(c)) {
        return;
    }
    if args
        .iter()
        .any(|a| a.parse::<u64>().map_or(false, |v| v > 16))
    {
        return;
    }
    let out = main_with_args(std::iter::once("maac").chain(args));
    assert!([0, 1, 2, EXIT_USAGE].contains(&out.status));
});
