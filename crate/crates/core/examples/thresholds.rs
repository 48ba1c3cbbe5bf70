// Dev-only: criterion 6/7 threshold pilots.

use spine_core::gen::NamedFamily;
use spine_core::harness::*;

fn main() {
    let which = std::env::args().nth(1).unwrap();
    let samples: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let t0 = std::time::Instant::now();
    match which.as_str() {
        "2sat200" => {
            let cfg = SweepConfig {
                problem: SweepProblem::BoolFamily { family: NamedFamily::TwoSat, k: 2 },
                n_list: vec![200],
                densities: vec![0.6, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.5],
                samples,
                seed: 60,
                analyzers: Analyzers { spine: false, dpll: false, backbone: false, constraint_fracs: false, mus: false },
                budgets: SweepBudgets::default(),
                probe_etas: vec![],
            };
            let pts = sweep(&cfg).unwrap();
            for p in &pts {
                println!("c={:.2} p_sat={:.3}", p.c, p.p_sat);
            }
            let est = threshold_estimate(&pts, 0.25).unwrap();
            println!("c_half={:.4} (target 1.0 within 15%)", est[0].c_half);
        }
        "gbp256" => {
            let cfg = SweepConfig {
                problem: SweepProblem::Gbp,
                n_list: vec![256],
                densities: vec![0.9, 1.05, 1.2, 1.35, 1.5, 1.65, 1.8],
                samples,
                seed: 70,
                analyzers: Analyzers { spine: false, dpll: false, backbone: false, constraint_fracs: false, mus: false },
                budgets: SweepBudgets::default(),
                probe_etas: vec![],
            };
            let pts = sweep(&cfg).unwrap();
            for p in &pts {
                println!("c={:.2} p_yes={:.3}", p.c, p.p_sat);
            }
            let est = threshold_estimate(&pts, 0.25).unwrap();
            println!("c_half={:.4} (target 1.386 within 15%)", est[0].c_half);
        }
        "dpll50" => {
            let cfg = SweepConfig {
                problem: SweepProblem::BoolFamily { family: NamedFamily::KSat, k: 3 },
                n_list: vec![50],
                densities: vec![3.0, 4.3, 6.0],
                samples,
                seed: 100,
                analyzers: Analyzers { spine: false, dpll: true, backbone: false, constraint_fracs: false, mus: false },
                budgets: SweepBudgets::default(),
                probe_etas: vec![],
            };
            let pts = sweep(&cfg).unwrap();
            for p in &pts {
                println!("c={:.2} p_sat={:.3} dpll_median={:?}", p.c, p.p_sat, p.dpll_nodes_median);
            }
        }
        _ => panic!(),
    }
    println!("elapsed {:?}", t0.elapsed());
}
