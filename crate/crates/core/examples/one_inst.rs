// Dev-only: dissect spine cost on single instances.
use spine_core::gen::*;
use spine_core::model::*;
use spine_core::order::*;
use spine_core::solver::{decide, Decision};
use std::sync::Arc;

fn main() {
    let n: usize = std::env::args().nth(1).unwrap().parse().unwrap();
    let c: f64 = std::env::args().nth(2).unwrap().parse().unwrap();
    let count: usize = std::env::args().nth(3).unwrap().parse().unwrap();
    let base = named_family(NamedFamily::KSat, 3).unwrap();
    let cl = Arc::new(closure(&base).unwrap());
    let u = ConstraintUniverse::build(n, Arc::clone(&cl)).unwrap();
    let m = constraints_for_density(n, c);
    let mut params = SpineParams::default();
    params.want_constraint_spine = false;
    params.want_literal_spine = false;
    params.budget.max_oracle_calls = 3_000_000;
    let ts = Arc::new(base);
    for stream in 0..count as u64 {
        let spec = GenSpec::new(GenModel::SatNeg, n, m, Arc::clone(&ts), 777).with_stream(stream);
        let f = gen_sat_neg(&spec).unwrap();
        let sat = matches!(decide(&f).unwrap(), Decision::Sat(_));
        let t0 = std::time::Instant::now();
        let r = spine(&f, &u, &params);
        match r {
            Ok(rep) => println!(
                "stream={stream} sat={sat} f_s={:.3} elapsed={:?}",
                *rep.f_s.numer() as f64 / *rep.f_s.denom() as f64,
                t0.elapsed()
            ),
            Err(e) => println!("stream={stream} sat={sat} ERR {e} elapsed={:?}", t0.elapsed()),
        }
    }
}
