//! Runs every experiment with its default configuration and prints one
//! verdict line per acceptance criterion. Exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use strichartz_lab::harness::{run, Experiment};

const TITLES: [&str; 9] = [
    "sharp constant of the Gaussian",
    "sextic form: space-time against constraint quadrature",
    "Euler-Lagrange fixed point at the Gaussian",
    "Picard extremizer pipeline",
    "bilinear decay across separations",
    "golden-ratio power sums",
    "multiplicative functional equation",
    "Fourier decay and bootstrap quantities",
    "discrete Fourier foundations",
];

fn main() -> ExitCode {
    let mut verdicts: BTreeMap<u8, (bool, Vec<String>)> = (1..=9).map(|c| (c, (true, Vec::new()))).collect();
    for experiment in Experiment::ALL {
        let outcome = match run(experiment, &experiment.default_config()) {
            Ok(o) => o,
            Err(e) => {
                for c in experiment.criteria() {
                    let entry = verdicts.get_mut(c).expect("criterion in 1..=9");
                    entry.0 = false;
                    entry.1.push(format!("{} failed to run: {e}", experiment.name()));
                }
                continue;
            }
        };
        let report = outcome.report;
        for check in &report.checks {
            let entry = verdicts.get_mut(&check.criterion).expect("criterion in 1..=9");
            entry.0 &= check.passed;
            if !check.passed {
                entry.1.push(format!("{} = {:.3e} (needs {} {:.1e})", check.name, check.value, check.relation, check.threshold));
            }
        }
        let timing = &report.timing;
        if let (Some(limit), Some(c)) = (timing.limit_s, timing.criterion) {
            let entry = verdicts.get_mut(&c).expect("criterion in 1..=9");
            entry.0 &= timing.within_limit;
            entry.1.push(format!("{:.2} s of {limit} s", timing.wall_clock_s));
        }
    }
    let mut all = true;
    for (c, (passed, notes)) in &verdicts {
        all &= passed;
        let notes = if notes.is_empty() { String::new() } else { format!(" [{}]", notes.join("; ")) };
        println!("criterion {c}: {} {}{notes}", if *passed { "PASS" } else { "FAIL" }, TITLES[*c as usize - 1]);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
