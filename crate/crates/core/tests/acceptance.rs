//! The ten acceptance criteria, one line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use pinwheel_core::verify::{run_suites, Session, Status, Suite, VerifyConfig};

const CRITERIA: [(Suite, &str); 10] = [
    (Suite::Cover, "exact cover of supertile(n), n = 0..6"),
    (Suite::Collared, "collared prototiles: 54 classes, stable"),
    (Suite::Chirality, "chirality system [[2,3],[3,2]], Perron (1/2, 1/2)"),
    (Suite::Perron, "collared Perron data"),
    (Suite::Module, "frequencies in (1/264)Z[1/5], depth <= 2"),
    (Suite::Oracle, "counting oracle over n = 5, 6, 7"),
    (Suite::Kernel, "kernel lattice rank 7 = span q1..q7"),
    (Suite::Symmetry, "half-turn symmetry only, census stabilises at 6"),
    (Suite::Pairing, "winding l = 1 and trace pairing in the module"),
    (Suite::Canonical, "canonical keys: motion invariance, mirror separation"),
];

fn main() -> ExitCode {
    let session = Session::new(VerifyConfig::default());
    let mut failed = 0;
    for (i, (suite, title)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let checks = run_suites(&session, &[*suite]);
        let ok = !checks.is_empty() && checks.iter().all(|c| c.status == Status::Pass);
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {title} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
        for c in &checks {
            println!("        {} {}: {}", c.status.as_str(), c.name, c.detail);
            for w in &c.witnesses {
                println!("          witness: {w}");
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
