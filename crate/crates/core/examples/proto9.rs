// Dev-only: full criterion-9 protocol rehearsal — per-n threshold
// estimation then probing just above each crossing.

use spine_core::gen::NamedFamily;
use spine_core::harness::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args[1].as_str();
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(20260810);
    let mult: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1.05);
    let samples: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(300);
    let (problem, grid): (SweepProblem, Vec<f64>) = match which {
        "2sat" => (
            SweepProblem::BoolFamily { family: NamedFamily::TwoSat, k: 2 },
            vec![0.8, 1.1, 1.4, 1.7, 2.0, 2.3, 2.6],
        ),
        "3sat" => (
            SweepProblem::BoolFamily { family: NamedFamily::KSat, k: 3 },
            vec![3.4, 3.8, 4.2, 4.6, 5.0, 5.4, 5.8],
        ),
        "3xor" => (
            SweepProblem::BoolFamily { family: NamedFamily::KXorSat, k: 3 },
            vec![0.5, 0.7, 0.9, 1.1, 1.3],
        ),
        _ => panic!(),
    };
    // stage 1: p_sat sweep for the crossings
    let cfg = SweepConfig {
        problem,
        n_list: vec![16, 24, 32],
        densities: grid,
        samples,
        seed,
        analyzers: Analyzers { spine: false, dpll: false, backbone: false, constraint_fracs: false, mus: false },
        budgets: SweepBudgets::default(),
        probe_etas: vec![],
    };
    let t0 = std::time::Instant::now();
    let pts = sweep(&cfg).unwrap();
    let est = threshold_estimate(&pts, 0.25).unwrap();
    for e in &est {
        println!("n={} c_half={:.3} sharpness={:.3}", e.n, e.c_half, e.sharpness);
    }
    // stage 2: probe each n just above its own crossing
    let mut fractions = Vec::new();
    for e in &est {
        let cfg = SweepConfig {
            problem,
            n_list: vec![e.n],
            densities: vec![e.c_half * mult],
            samples,
            seed: seed + 1,
            analyzers: Analyzers { spine: true, dpll: false, backbone: false, constraint_fracs: false, mus: false },
            budgets: SweepBudgets::default(),
            probe_etas: vec![0.1],
        };
        let p = sweep(&cfg).unwrap();
        let probe = discontinuity_probe(&p, &[0.1]).unwrap();
        fractions.push((e.n, p[0].c, probe.rows[0].fraction, p[0].reason.clone()));
    }
    for (n, c, f, reason) in &fractions {
        println!("probe n={n} c={c:.3} fraction={f:.3} reason={reason}");
    }
    println!("elapsed {:?}", t0.elapsed());
}
