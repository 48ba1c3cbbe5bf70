//! `spine` — command-line toolkit for random constraint satisfaction
//! experiments: instance generation, exact decision/optimization, backbone
//! and spine order parameters, MUS extraction, structural analysis,
//! extremal optimization, and phase-transition sweeps.

mod config;

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use spine_core::gen::{
    self, closure, gen_csp, gen_graph, gen_sat_neg, named_family, GenModel, GenSpec, NamedFamily,
};
use spine_core::harness::{self, discontinuity_probe, emit_svg, sweep, threshold_estimate, PlotSpec};
use spine_core::heuristics::{backbone_estimate, col3_backbone_exact, eo_sample, pool_to_text, EoConfig, EoProblem};
use spine_core::io;
use spine_core::model::{ConstraintUniverse, Formula, TemplateSet};
use spine_core::order::{
    self, backbone, frac_line, graph as graph_order, literal_spine, spine, OrderBudget, SpineParams,
};
use spine_core::solver::{
    decide, opt, proof_metrics, refute_via_mus, to_cnf, write_dimacs, Decision, MusRefutation,
};
use spine_core::structure::{
    c_star, delta_star, implicate_check, is_xy_sparse, mus_extract, x_bound,
};

#[derive(Parser)]
#[command(name = "spine", version, about = "random CSP phase-transition toolkit")]
struct Cli {
    /// Base RNG seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Largest n admitted to exact order-parameter computations.
    #[arg(long = "budget-n", global = true, default_value_t = 24)]
    budget_n: usize,

    /// Key=value configuration file (sweep).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Csp,
    SatNeg,
    Graph,
}

#[derive(Clone, Copy, ValueEnum)]
enum UniverseArg {
    /// Templates of the instance file.
    Base,
    /// All signed variants of the templates (negation-model universe).
    Closure,
    /// Closure when the instance carries signs, base otherwise.
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum EoProblemArg {
    #[value(name = "3col")]
    ThreeCol,
    Gbp,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance or graph.
    Gen {
        #[arg(long, value_enum, default_value_t = ModelArg::SatNeg)]
        model: ModelArg,
        /// Template family: k-sat, 2-sat, 1-in-k-sat, k-xor-sat.
        #[arg(long, default_value = "k-sat")]
        family: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Constraint/edge count; alternative to --density.
        #[arg(long)]
        m: Option<usize>,
        /// Constraint density m/n (mean degree 2m/n for graphs).
        #[arg(long)]
        density: Option<f64>,
        /// Instance ordinal within the seed's batch.
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Decide satisfiability; optionally export DIMACS CNF.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        dimacs: Option<PathBuf>,
    },
    /// Minimum violated-constraint count and witness.
    Opt { instance: PathBuf },
    /// Exact spine report (variables, constraints, literals).
    Spine {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = UniverseArg::Auto)]
        universe: UniverseArg,
        /// Skip the constraint/literal spine and use family fast paths.
        #[arg(long)]
        fast: bool,
    },
    /// Exact backbone report.
    Backbone {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = UniverseArg::Auto)]
        universe: UniverseArg,
    },
    /// Minimally unsatisfiable subformula with certificates.
    Mus {
        instance: PathBuf,
        /// Also refute through the MUS and report DPLL/proof metrics.
        #[arg(long)]
        refute: bool,
    },
    /// Structural analyzers: c*, delta_r, sparsity, implicates.
    Analyze {
        instance: PathBuf,
        /// r for the r-deficiency maximum (rational p/q or decimal).
        #[arg(long)]
        r: Option<String>,
        /// x,y pair for the sparsity check, e.g. --sparse 0.5,0.4
        #[arg(long)]
        sparse: Option<String>,
        /// Evaluate the sparsity-bound closed form at y,c,k.
        #[arg(long)]
        x_bound: Option<String>,
        /// List implicates of length <= 2 per template.
        #[arg(long)]
        implicates: bool,
    },
    /// Extremal-optimization ground states and backbone estimate.
    Eo {
        graph: PathBuf,
        #[arg(long, value_enum)]
        problem: EoProblemArg,
        #[arg(long, default_value_t = 1.4)]
        tau: f64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Steps per restart (0 = 200 * n).
        #[arg(long, default_value_t = 0)]
        steps: usize,
        /// Compare against exact enumeration (small n).
        #[arg(long)]
        exact: bool,
    },
    /// Density sweep driven by a key=value config file.
    Sweep,
    /// SVG plot of a sweep CSV column.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = "p_sat")]
        column: String,
        /// Densities to mark with dashed verticals.
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<f64>,
        #[arg(long)]
        title: Option<String>,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => Ok(()),
        Err(e) => Err(e),
    }
}

fn parse_family(name: &str) -> Result<NamedFamily> {
    NamedFamily::parse(name).with_context(|| format!("unknown family `{name}`"))
}

fn parse_frac(s: &str) -> Result<order::Frac> {
    if let Some((p, q)) = s.split_once('/') {
        Ok(order::Frac::new(p.trim().parse()?, q.trim().parse()?))
    } else if let Ok(int) = s.parse::<i64>() {
        Ok(order::Frac::new(int, 1))
    } else {
        let f: f64 = s.parse()?;
        let denom = 1_000_000i64;
        Ok(order::Frac::new((f * denom as f64).round() as i64, denom))
    }
}

fn load_formula(path: &PathBuf) -> Result<Formula> {
    Ok(io::parse_instance(&io::read_file(path)?)?)
}

fn universe_for(f: &Formula, choice: UniverseArg) -> Result<ConstraintUniverse> {
    let has_signs = f.constraints.iter().any(|c| c.signs.is_some());
    let use_closure = match choice {
        UniverseArg::Base => false,
        UniverseArg::Closure => true,
        UniverseArg::Auto => f.is_boolean() && has_signs,
    };
    let ts: Arc<TemplateSet> = if use_closure {
        Arc::new(closure(&f.templates)?)
    } else {
        Arc::clone(&f.templates)
    };
    Ok(ConstraintUniverse::build(f.n, ts)?)
}

fn write_out(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => {
            io::write_file(path, contents)?;
            println!("wrote {}", path.display());
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let budget = OrderBudget::default();
    match cli.command {
        Command::Gen {
            model,
            family,
            k,
            n,
            m,
            density,
            stream,
        } => {
            let contents = match model {
                ModelArg::Graph => {
                    let m = match (m, density) {
                        (Some(m), _) => m,
                        (None, Some(c)) => gen::edges_for_mean_degree(n, c),
                        (None, None) => bail!("--m or --density required"),
                    };
                    io::write_graph(&gen_graph(n, m, cli.seed, stream)?)
                }
                ModelArg::Csp | ModelArg::SatNeg => {
                    let fam = parse_family(&family)?;
                    let ts = Arc::new(named_family(fam, k)?);
                    let m = match (m, density) {
                        (Some(m), _) => m,
                        (None, Some(c)) => gen::constraints_for_density(n, c),
                        (None, None) => bail!("--m or --density required"),
                    };
                    let f = match model {
                        ModelArg::Csp => gen_csp(
                            &GenSpec::new(GenModel::CspCounting, n, m, ts, cli.seed).with_stream(stream),
                        )?,
                        _ => gen_sat_neg(
                            &GenSpec::new(GenModel::SatNeg, n, m, ts, cli.seed).with_stream(stream),
                        )?,
                    };
                    io::write_instance(&f)?
                }
            };
            write_out(&cli.out, &contents)?;
        }
        Command::Solve { instance, dimacs } => {
            let f = load_formula(&instance)?;
            if let Some(path) = dimacs {
                let cnf = to_cnf(&f)?;
                let mut buf = Vec::new();
                write_dimacs(&cnf, &mut buf)?;
                io::write_file(&path, &String::from_utf8(buf)?)?;
            }
            match decide(&f)? {
                Decision::Sat(a) => {
                    let bits: String = (0..f.n as u32)
                        .map(|v| char::from_digit(a.get(v).unwrap_or(0) as u32, 10).unwrap())
                        .collect();
                    println!("SAT");
                    println!("v {bits}");
                }
                Decision::Unsat => println!("UNSAT"),
            }
        }
        Command::Opt { instance } => {
            let f = load_formula(&instance)?;
            let r = opt(&f)?;
            let bits: String = (0..f.n as u32)
                .map(|v| char::from_digit(r.witness.get(v).unwrap_or(0) as u32, 10).unwrap())
                .collect();
            println!("opt {}", r.value);
            println!("v {bits}");
        }
        Command::Spine {
            instance,
            universe,
            fast,
        } => {
            let f = load_formula(&instance)?;
            if f.n > cli.budget_n {
                bail!("n = {} exceeds --budget-n {}; raise it explicitly", f.n, cli.budget_n);
            }
            let u = universe_for(&f, universe)?;
            let params = SpineParams {
                budget: budget.clone(),
                want_constraint_spine: !fast,
                want_literal_spine: !fast && f.is_boolean(),
                use_fast_paths: fast,
            };
            let report = spine(&f, &u, &params)?;
            let mut text = report.to_text(Some(&u));
            if !fast && f.is_boolean() {
                let ls = literal_spine(&f, &budget)?;
                text.push_str(&format!(
                    "literal spine (standalone): {}\n",
                    ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
                ));
            }
            write_out(&cli.out, &text)?;
        }
        Command::Backbone { instance, universe } => {
            let f = load_formula(&instance)?;
            if f.n > cli.budget_n {
                bail!("n = {} exceeds --budget-n {}; raise it explicitly", f.n, cli.budget_n);
            }
            let u = universe_for(&f, universe)?;
            let report = backbone(&f, &u, &budget)?;
            write_out(&cli.out, &report.to_text(&u))?;
        }
        Command::Mus { instance, refute } => {
            let f = load_formula(&instance)?;
            let mus = mus_extract(&f)?;
            let mut text = format!(
                "mus constraints: [{}]\nmus n_vars: {}\n",
                mus.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
                mus.subformula.var_set().len()
            );
            if refute {
                match refute_via_mus(&f)? {
                    MusRefutation::Unsat { trace, mus: _ } => {
                        let cnf = to_cnf(&mus.subformula)?;
                        let (size, width) = proof_metrics(&cnf, &trace.proof)?;
                        text.push_str(&format!(
                            "dpll nodes: {}\nproof size: {size}\nproof width: {width}\npolicy: {}\n",
                            trace.node_count, trace.policy
                        ));
                    }
                    MusRefutation::Sat(_) => unreachable!("mus_extract succeeded"),
                }
            }
            if let Some(path) = &cli.out {
                io::write_file(path, &io::write_instance(&mus.subformula)?)?;
                text.push_str(&format!("wrote {}\n", path.display()));
            }
            print!("{text}");
        }
        Command::Analyze {
            instance,
            r,
            sparse,
            x_bound: xb,
            implicates,
        } => {
            let f = load_formula(&instance)?;
            let mut text = String::new();
            if f.m() > 0 {
                text.push_str(&c_star(&f)?.to_text());
            }
            if let Some(rs) = r {
                text.push_str(&delta_star(&f, parse_frac(&rs)?)?.to_text());
            }
            if let Some(xy) = sparse {
                let (xs, ys) = xy.split_once(',').context("--sparse expects x,y")?;
                let edges: Vec<Vec<u32>> = f.constraints.iter().map(|c| c.vars.clone()).collect();
                let v = is_xy_sparse(f.n, &edges, parse_frac(xs)?, parse_frac(ys)?, 1 << 24)?;
                text.push_str(&format!(
                    "sparse: {} (path: {:?}{})\n",
                    v.sparse,
                    v.path,
                    v.violating_set
                        .map(|s| format!(
                            ", violating set [{}]",
                            s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                        ))
                        .unwrap_or_default()
                ));
            }
            if let Some(yck) = xb {
                let parts: Vec<&str> = yck.split(',').collect();
                if parts.len() != 3 {
                    bail!("--x-bound expects y,c,k");
                }
                let x = x_bound(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?)?;
                text.push_str(&format!("x_bound = {x:.12}\n"));
            }
            if implicates {
                for tpl in &f.templates.templates {
                    let imps = implicate_check(&f.templates, tpl, 2)?;
                    text.push_str(&format!(
                        "template {} implicates(<=2): {}\n",
                        tpl.id,
                        if imps.is_empty() {
                            "none".to_string()
                        } else {
                            imps.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
                        }
                    ));
                }
            }
            write_out(&cli.out, &text)?;
        }
        Command::Eo {
            graph,
            problem,
            tau,
            restarts,
            steps,
            exact,
        } => {
            let g = io::parse_graph(&io::read_file(&graph)?)?;
            let problem = match problem {
                EoProblemArg::ThreeCol => EoProblem::ThreeCol,
                EoProblemArg::Gbp => EoProblem::Gbp,
            };
            let cfg = EoConfig {
                problem,
                tau,
                restarts,
                steps_per_restart: steps,
                seed: cli.seed,
                pool_cap: 4096,
            };
            let pool = eo_sample(&g, &cfg)?;
            let est = backbone_estimate(&pool, g.n)?;
            let mut text = format!(
                "tau={tau} restarts={restarts} steps={}\n",
                if steps == 0 { 200 * g.n } else { steps }
            );
            text.push_str(&frac_line("estimated f_BC", est.fraction));
            text.push_str(&format!(
                "\npool size: {}{}\n",
                est.pool_size,
                if est.truncated { " (truncated)" } else { "" }
            ));
            if exact {
                match problem {
                    EoProblem::Gbp => {
                        let ex = graph_order::gbp_backbone_exact(&g, 20)?;
                        text.push_str(&frac_line("exact f_BC", ex.fraction));
                        text.push_str(&format!(
                            "\nexact optimum: {} ({} optima)\n",
                            ex.opt_cut, ex.optimum_count
                        ));
                    }
                    EoProblem::ThreeCol => {
                        let ex = col3_backbone_exact(&g, 15)?;
                        text.push_str(&frac_line("exact f_BC", ex.fraction));
                        text.push_str(&format!(
                            "\nexact optimum: {} ({} optima)\n",
                            ex.opt_cost, ex.optimum_count
                        ));
                    }
                }
            }
            text.push_str(&pool_to_text(&pool));
            write_out(&cli.out, &text)?;
        }
        Command::Sweep => {
            let path = cli.config.context("sweep requires --config <path>")?;
            let text = io::read_file(&path)?;
            let parsed = config::parse_sweep_config(&text, cli.seed)?;
            let points = sweep(&parsed.config)?;
            let csv = harness::to_csv(&points)?;
            let out = cli
                .out
                .or(parsed.out)
                .context("sweep requires --out or `out=` in the config")?;
            io::write_file(&out, &csv)?;
            println!("wrote {}", out.display());
            if let Some(eps) = parsed.threshold_eps {
                for e in threshold_estimate(&points, eps)? {
                    println!(
                        "threshold {} n={}: c_eps={:.4} c_half={:.4} c_1meps={:.4} sharpness={:.4}",
                        e.problem, e.n, e.c_lo, e.c_half, e.c_hi, e.sharpness
                    );
                }
            }
            if !parsed.config.probe_etas.is_empty() {
                let probe = discontinuity_probe(&points, &parsed.config.probe_etas)?;
                for r in &probe.rows {
                    println!(
                        "probe {} n={} c={:.4} eta={}: fraction={:.4}",
                        r.problem, r.n, r.c, r.eta, r.fraction
                    );
                }
                for (eta, label) in &probe.trends {
                    println!("trend eta={eta}: {label}");
                }
            }
        }
        Command::Plot {
            csv,
            column,
            thresholds,
            title,
        } => {
            let text = io::read_file(&csv)?;
            let points = config::parse_csv_points(&text)?;
            let spec = PlotSpec {
                title: title.unwrap_or_else(|| column.clone()),
                column,
                thresholds,
            };
            let svg = emit_svg(&points, &spec)?;
            let out = cli.out.context("plot requires --out <path>")?;
            io::write_file(&out, &svg)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}
