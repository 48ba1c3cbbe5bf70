// Dev-only calibration harness for probe densities and runtimes.

use spine_core::gen::NamedFamily;
use spine_core::harness::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("2sat");
    let (problem, grid): (SweepProblem, Vec<f64>) = match which {
        "2sat" => (
            SweepProblem::BoolFamily { family: NamedFamily::TwoSat, k: 2 },
            vec![0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.4],
        ),
        "3sat" => (
            SweepProblem::BoolFamily { family: NamedFamily::KSat, k: 3 },
            vec![3.6, 4.0, 4.4, 4.8, 5.2, 5.6, 6.0],
        ),
        "3xor" => (
            SweepProblem::BoolFamily { family: NamedFamily::KXorSat, k: 3 },
            vec![0.6, 0.8, 0.9, 1.0, 1.1, 1.2, 1.4],
        ),
        _ => panic!("unknown"),
    };
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(16);
    let samples: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(100);
    let spine = args.get(4).map(|s| s == "spine").unwrap_or(false);
    let mut budgets = SweepBudgets::default();
    budgets.order.max_oracle_calls = 2_000_000;
    let cfg = SweepConfig {
        problem,
        n_list: vec![n],
        densities: grid,
        samples,
        seed: 20260810,
        analyzers: Analyzers {
            spine,
            dpll: false,
            backbone: false,
            constraint_fracs: false,
            mus: false,
        },
        budgets,
        probe_etas: vec![],
    };
    let t0 = std::time::Instant::now();
    let pts = sweep(&cfg).unwrap();
    for p in &pts {
        let frac01 = p
            .records
            .iter()
            .filter_map(|r| r.f_s)
            .filter(|&f| f >= 0.1)
            .count() as f64
            / p.records.iter().filter(|r| r.f_s.is_some()).count().max(1) as f64;
        println!(
            "n={} c={:.2} p_sat={:.3} f_s_mean={:?} P(f_s>=0.1)={:.3} reason={}",
            p.n, p.c, p.p_sat, p.f_s_mean.map(|v| (v * 1000.0).round() / 1000.0), frac01, p.reason
        );
    }
    println!("elapsed {:?}", t0.elapsed());
}
