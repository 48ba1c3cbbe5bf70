// Dev-only: time one spine cell.
use spine_core::gen::NamedFamily;
use spine_core::harness::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args[1].as_str();
    let n: usize = args[2].parse().unwrap();
    let c: f64 = args[3].parse().unwrap();
    let samples: usize = args[4].parse().unwrap();
    let calls: u64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(2_000_000);
    let problem = match which {
        "2sat" => SweepProblem::BoolFamily { family: NamedFamily::TwoSat, k: 2 },
        "3sat" => SweepProblem::BoolFamily { family: NamedFamily::KSat, k: 3 },
        "3xor" => SweepProblem::BoolFamily { family: NamedFamily::KXorSat, k: 3 },
        _ => panic!(),
    };
    let mut budgets = SweepBudgets::default();
    budgets.order.max_oracle_calls = calls;
    let cfg = SweepConfig {
        problem,
        n_list: vec![n],
        densities: vec![c],
        samples,
        seed: 20260810,
        analyzers: Analyzers { spine: true, dpll: false, backbone: false, constraint_fracs: false, mus: false },
        budgets,
        probe_etas: vec![],
    };
    let t0 = std::time::Instant::now();
    let pts = sweep(&cfg).unwrap();
    let p = &pts[0];
    let avail = p.records.iter().filter(|r| r.f_s.is_some()).count();
    let frac01 = p.records.iter().filter_map(|r| r.f_s).filter(|&f| f >= 0.1).count() as f64 / avail.max(1) as f64;
    println!(
        "n={} c={:.2} p_sat={:.3} f_s_mean={:?} P(f_s>=0.1)={:.3} avail={}/{} reason={} elapsed={:?}",
        p.n, p.c, p.p_sat, p.f_s_mean.map(|v| (v * 1000.0).round() / 1000.0), frac01, avail, samples, p.reason, t0.elapsed()
    );
}
