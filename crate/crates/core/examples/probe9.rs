// Dev-only: criterion-9-style probe timing and signal check.
use spine_core::gen::NamedFamily;
use spine_core::harness::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args[1].as_str();
    let c: f64 = args[2].parse().unwrap();
    let samples: usize = args[3].parse().unwrap();
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(20260810);
    let problem = match which {
        "2sat" => SweepProblem::BoolFamily { family: NamedFamily::TwoSat, k: 2 },
        "3sat" => SweepProblem::BoolFamily { family: NamedFamily::KSat, k: 3 },
        "3xor" => SweepProblem::BoolFamily { family: NamedFamily::KXorSat, k: 3 },
        _ => panic!(),
    };
    let mut budgets = SweepBudgets::default();
    budgets.order.max_oracle_calls = 2_000_000;
    let cfg = SweepConfig {
        problem,
        n_list: vec![16, 24, 32],
        densities: vec![c],
        samples,
        seed,
        analyzers: Analyzers { spine: true, dpll: false, backbone: false, constraint_fracs: false, mus: false },
        budgets,
        probe_etas: vec![0.1, 0.3],
    };
    let pts = sweep(&cfg).unwrap();
    let probe = discontinuity_probe(&pts, &[0.1]).unwrap();
    let fr: Vec<f64> = probe.rows.iter().map(|r| r.fraction).collect();
    println!("seed={seed} c={c} fractions={:?} refusals={:?}", fr, pts.iter().map(|p| p.reason.clone()).collect::<Vec<_>>());
}
