//! Command-line front end: every analysis operation as a subcommand with
//! JSON (or edge-list) output.
//!
//! Exit codes: 0 = success, 1 = the analysis ran and the verdict is
//! negative (infeasible, rejected precondition, nothing found), 2 = usage
//! or input errors.

mod family;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use walkent::certify::{self, SaffOutcome, Verdict};
use walkent::spectral::{self, constant_diagonal_gap, PpscFunction};
use walkent::walks::{self, WalkMode};
use walkent::{acceptance, entropy, kks, Graph};

#[derive(Parser)]
#[command(
    name = "walkent",
    about = "Walk-class analysis, walk entropy, and centrality-collision certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Edgelist,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Reduced,
    Full,
    Lp,
}

impl From<ModeArg> for WalkMode {
    fn from(m: ModeArg) -> WalkMode {
        match m {
            ModeArg::Reduced => WalkMode::Reduced,
            ModeArg::Full => WalkMode::Full,
            ModeArg::Lp => WalkMode::Lp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FunctionArg {
    Exp,
    Resolvent,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a graph and emit it as an edge list or JSON
    Gen {
        /// Family spec (e.g. "kks(4,5)") or path to an edge-list file
        source: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Edgelist)]
        format: OutputFormat,
        /// Write to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Walk-class count and sizes
    Classes { source: String },
    /// Exact walk matrix; big integers are emitted as decimal strings
    WalkMatrix {
        source: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Reduced)]
        mode: ModeArg,
        /// Lift the 200-node cost guard on full mode
        #[arg(long)]
        force_full: bool,
    },
    /// Walk entropy of f(beta A)
    Entropy {
        source: String,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = FunctionArg::Exp)]
        function: FunctionArg,
        /// Resolvent coefficient (required with --function resolvent)
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Scan (0, beta-max] for entropic parameter values
    ScanEntropic {
        source: String,
        #[arg(long, default_value_t = 3.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = FunctionArg::Exp)]
        function: FunctionArg,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Check that a Cartesian product is entropic at beta
    VerifyCartesian {
        source_g: String,
        source_h: String,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Check the tensor-product construction at beta
    VerifyTensor {
        source_g: String,
        source_h: String,
        #[arg(long)]
        beta: f64,
        /// Series truncation order (default: smallest K meeting the
        /// 1e-14 tail rule)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Closed-form class scores of kks(c, m)
    KksScores {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        beta: f64,
    },
    /// Locate the entropic value of kks(c, c+1) inside (0, 1/(c-2))
    KksFindBeta {
        #[arg(long)]
        c: usize,
    },
    /// Verify the explicit eigenbasis of kks(c, m)
    KksVerifyEigen {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        m: usize,
    },
    /// LP collision certificate across walk-classes
    Certify {
        source: String,
        /// "all" or comma-separated class ids
        #[arg(long, default_value = "all")]
        classes: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Lp)]
        mode: ModeArg,
        #[arg(long, default_value_t = certify::DEFAULT_POSITIVITY_TOL)]
        tol_pos: f64,
        #[arg(long, default_value_t = certify::DEFAULT_FEASIBILITY_TOL)]
        tol_feas: f64,
        #[arg(long)]
        force_full: bool,
    },
    /// Set-average flip-flop check on the walk matrix
    Saff {
        source: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Reduced)]
        mode: ModeArg,
        #[arg(long, default_value_t = certify::SAFF_SIZE_CAP)]
        size_cap: usize,
    },
    /// Run the full acceptance suite and print a pass/fail table
    Reproduce,
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}

fn exit_code_for(e: &walkent::Error) -> i32 {
    use walkent::Error::*;
    match e {
        InvalidParameter(_) | Parse(_) | SizeCap { .. } | Io(_) => 2,
        _ => 1,
    }
}

/// Resolves a graph source: family spec first, then an edge-list file.
fn load_graph(source: &str) -> walkent::Result<Graph> {
    match family::parse(source) {
        Ok(g) => Ok(g),
        Err(spec_err) => {
            let path = std::path::Path::new(source);
            if path.exists() {
                let text = std::fs::read_to_string(path)?;
                Graph::parse_edge_list(&text, source)
            } else {
                Err(walkent::Error::Parse(format!(
                    "{spec_err} (and no file exists at {source:?})"
                )))
            }
        }
    }
}

fn make_function(function: FunctionArg, alpha: Option<f64>) -> walkent::Result<PpscFunction> {
    match function {
        FunctionArg::Exp => Ok(PpscFunction::Exp),
        FunctionArg::Resolvent => {
            let alpha = alpha.ok_or_else(|| {
                walkent::Error::InvalidParameter("--function resolvent requires --alpha".into())
            })?;
            PpscFunction::resolvent(alpha)
        }
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serialize"));
}

fn run(command: Command) -> walkent::Result<i32> {
    match command {
        Command::Gen {
            source,
            format,
            output,
        } => {
            let g = load_graph(&source)?;
            let text = match format {
                OutputFormat::Edgelist => g.to_edge_list_string(),
                OutputFormat::Json => {
                    format!("{}\n", serde_json::to_string_pretty(&g).expect("serialize"))
                }
            };
            match output {
                Some(path) => {
                    let mut f = std::fs::File::create(path)?;
                    f.write_all(text.as_bytes())?;
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Classes { source } => {
            let g = load_graph(&source)?;
            let p = walks::walk_classes(&g)?;
            print_json(&json!({
                "classes": p.class_count(),
                "sizes": p.sizes(),
            }));
            Ok(0)
        }
        Command::WalkMatrix {
            source,
            mode,
            force_full,
        } => {
            let g = load_graph(&source)?;
            let wm = walks::walk_matrix_with_override(&g, mode.into(), force_full)?;
            let columns: Vec<Vec<String>> = wm
                .columns
                .iter()
                .map(|col| col.iter().map(|v| v.to_string()).collect())
                .collect();
            print_json(&json!({
                "n": wm.n(),
                "mode": wm.mode,
                "min_poly_degree": wm.min_poly_degree,
                "ells": wm.ells,
                "columns": columns,
            }));
            Ok(0)
        }
        Command::Entropy {
            source,
            beta,
            function,
            alpha,
        } => {
            let g = load_graph(&source)?;
            let f = make_function(function, alpha)?;
            let diag = spectral::f_diag(&g, &f, beta)?;
            let value = entropy::entropy_of_diag(&diag);
            print_json(&json!({
                "beta": beta,
                "entropy": value,
                "max_entropy": (g.n() as f64).ln(),
                "gap": constant_diagonal_gap(&diag),
            }));
            Ok(0)
        }
        Command::ScanEntropic {
            source,
            beta_max,
            grid_step,
            tol,
            function,
            alpha,
        } => {
            let g = load_graph(&source)?;
            let f = make_function(function, alpha)?;
            let class_count = walks::walk_classes(&g)?.class_count();
            match entropy::scan_entropic_values(&g, &f, beta_max, grid_step, tol) {
                Ok(values) => {
                    if class_count > 2 && !values.is_empty() {
                        eprintln!(
                            "note: {class_count} walk-classes; reported values are scan \
                             candidates; confirm with `certify`"
                        );
                    }
                    let list: Vec<serde_json::Value> = values
                        .iter()
                        .map(|v| {
                            json!({
                                "beta": v.beta,
                                "bracket": [v.bracket.0, v.bracket.1],
                                "gap": v.gap,
                            })
                        })
                        .collect();
                    print_json(&json!(list));
                    Ok(if values.is_empty() { 1 } else { 0 })
                }
                Err(walkent::Error::WalkRegularInput) => {
                    print_json(&json!({
                        "status": "walk-regular",
                        "detail": "every beta gives the uniform distribution",
                    }));
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::VerifyCartesian {
            source_g,
            source_h,
            beta,
            tol,
        } => {
            let g = load_graph(&source_g)?;
            let h = load_graph(&source_h)?;
            match entropy::verify_cartesian_entropic(&g, &h, beta, tol) {
                Ok(report) => {
                    let passed = report.passed;
                    print_json(&serde_json::to_value(&report).expect("serialize"));
                    Ok(if passed { 0 } else { 1 })
                }
                Err(walkent::Error::Precondition(msg)) => {
                    print_json(&json!({ "status": "precondition-failed", "detail": msg }));
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::VerifyTensor {
            source_g,
            source_h,
            beta,
            k,
            tol,
        } => {
            let g = load_graph(&source_g)?;
            let h = load_graph(&source_h)?;
            let big_k = match k {
                Some(k) => k,
                None => entropy::tensor_truncation_order(&g, beta)?,
            };
            match entropy::verify_tensor_entropic(&g, beta, &h, big_k, tol) {
                Ok(report) => {
                    let passed = report.passed;
                    print_json(&serde_json::to_value(&report).expect("serialize"));
                    Ok(if passed { 0 } else { 1 })
                }
                Err(walkent::Error::Precondition(msg)) => {
                    print_json(&json!({ "status": "precondition-failed", "detail": msg }));
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::KksScores { c, m, beta } => {
            let cf = kks::KksClosedForm::new(c, m)?;
            let pieces = cf.pieces(beta);
            let mut out = json!({
                "c": c,
                "m": m,
                "beta": beta,
                "lambda": cf.lambda,
                "multiplicities": cf.multiplicities,
                "independent_score": cf.independent_score(beta),
                "clique_score": cf.clique_score(beta),
                "pieces": pieces,
            });
            if m == c + 1 && c >= 3 {
                let endpoint = 1.0 / (c as f64 - 2.0);
                if (beta - endpoint).abs() <= 1e-12 * endpoint {
                    let h = kks::hyperbolic_check(beta, c, m)?;
                    out["hyperbolic"] = serde_json::to_value(&h).expect("serialize");
                }
            }
            print_json(&out);
            Ok(0)
        }
        Command::KksFindBeta { c } => {
            let c_min = kks::discover_c_min(c.max(64))?;
            match kks::find_entropic_beta_kks(c) {
                Ok(v) => {
                    print_json(&json!({
                        "c": c,
                        "c_min": c_min,
                        "beta": v.beta,
                        "bracket": [v.bracket.0, v.bracket.1],
                        "gap": v.gap,
                    }));
                    Ok(0)
                }
                Err(walkent::Error::NoSignChange { f_lo, f_hi }) => {
                    print_json(&json!({
                        "status": "no-sign-change",
                        "c": c,
                        "c_min": c_min,
                        "f_lo": f_lo,
                        "f_hi": f_hi,
                    }));
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::KksVerifyEigen { c, m } => {
            let cf = kks::KksClosedForm::new(c, m)?;
            match kks::kks_eigenbasis(c, m) {
                Ok(basis) => {
                    print_json(&json!({
                        "c": c,
                        "m": m,
                        "n": basis.n,
                        "lambda": cf.lambda,
                        "multiplicities": cf.multiplicities,
                        "eigen_residual": basis.eigen_residual,
                        "orthonormality_residual": basis.orthonormality_residual,
                    }));
                    Ok(0)
                }
                Err(walkent::Error::ResidualCheck {
                    what,
                    residual,
                    tolerance,
                }) => {
                    print_json(&json!({
                        "status": "residual-check-failed",
                        "what": what,
                        "residual": residual,
                        "tolerance": tolerance,
                    }));
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::Certify {
            source,
            classes,
            mode,
            tol_pos,
            tol_feas,
            force_full,
        } => {
            let g = load_graph(&source)?;
            let selection: Option<Vec<usize>> = if classes.trim() == "all" {
                None
            } else {
                let ids: Result<Vec<usize>, _> = classes
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect();
                Some(ids.map_err(|_| {
                    walkent::Error::InvalidParameter(format!(
                        "--classes must be \"all\" or comma-separated ids, got {classes:?}"
                    ))
                })?)
            };
            let opts = certify::CertifyOptions {
                positivity_tol: tol_pos,
                feasibility_tol: tol_feas,
                force_full,
                ..Default::default()
            };
            let report =
                certify::certify_collision_with(&g, selection.as_deref(), mode.into(), opts)?;
            let code = if report.verdict == Verdict::Certified { 0 } else { 1 };
            print_json(&serde_json::to_value(&report).expect("serialize"));
            Ok(code)
        }
        Command::Saff {
            source,
            mode,
            size_cap,
        } => {
            let g = load_graph(&source)?;
            let wm = walks::walk_matrix(&g, mode.into())?;
            let rows = wm.rows();
            match certify::saff_check(&rows, size_cap)? {
                SaffOutcome::Satisfied {
                    distinct_rows,
                    multiplicity_cap,
                    pairs_checked,
                } => {
                    print_json(&json!({
                        "satisfied": true,
                        "distinct_rows": distinct_rows,
                        "multiplicity_cap": multiplicity_cap,
                        "pairs_checked": pairs_checked,
                    }));
                    Ok(0)
                }
                SaffOutcome::Counterexample { s, t } => {
                    let (matrix, s_idx, t_idx) = certify::expand_counterexample(&rows, &s, &t);
                    let refutation = certify::farkas_refutation(&matrix, &t_idx, &s_idx)?;
                    print_json(&json!({
                        "satisfied": false,
                        "s": s,
                        "t": t,
                        "farkas": refutation,
                    }));
                    Ok(1)
                }
            }
        }
        Command::Reproduce => {
            let results = acceptance::run_all();
            let mut all_passed = true;
            println!("{:-^72}", " acceptance ");
            for result in &results {
                println!(
                    "criterion {:<44} {}",
                    result.name,
                    if result.passed { "PASS" } else { "FAIL" }
                );
                for line in &result.details {
                    println!("    {line}");
                }
                all_passed &= result.passed;
            }
            println!("{:-^72}", "");
            println!(
                "{} of {} criteria passed",
                results.iter().filter(|r| r.passed).count(),
                results.len()
            );
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}
