//! Command-line front end: verify / classify / solve / kernel / torus /
//! sample, with JSON (default) or TSV reports.
//!
//! Exit codes: 0 success, 1 check failure, 2 input error.

use crate::config::{stable_hash, thread_cap, Config, OutputFormat};
use crate::ddt::{
    classify, normal_form, sample_solution, solve_alpha1, cubic_residual, CaseId, SampleOptions,
};
use crate::forms::{Dim, KForm};
use crate::io;
use crate::linearize::{
    build_p, build_q, build_s, build_t, kernel_t_with_comparison, kernel_ts_with_comparison,
    p_condition, surjectivity_obstruction,
};
use crate::registry::run_registry;
use crate::torus::{ellipticity_check, homotopy_index_scan, torus_cohomology};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "spin7", version, about = "Spin(7) exterior algebra and dDT verification toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Absolute arithmetic tolerance for float comparisons
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Classification tolerance
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_class: f64,
    /// Relative rank threshold for float kernels
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_rank: f64,
    /// Random seed
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_parser = ["json", "tsv"], default_value = "json")]
    pub format: String,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the identity registry and emit a certificate
    Verify {
        /// Substring or section filter (empty = all checks)
        #[arg(long, default_value = "")]
        filter: String,
        /// Exact-mode trials per randomized identity
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Float-mode trials per randomized identity
        #[arg(long, default_value_t = 1000)]
        trials_float: usize,
    },
    /// Normal form, solution case and table row of a 2-form (JSON file)
    Classify {
        form: PathBuf,
    },
    /// All three branches of the normal-form cubic for given mu
    Solve {
        /// Comma-separated mu_1,mu_2,mu_3,mu_4 (must sum to zero)
        #[arg(long)]
        mu: String,
        /// Branch 0, 1 or 2 (omit for all three)
        #[arg(long)]
        branch: Option<usize>,
    },
    /// Kernels of the linearized operators at a 2-form, with diagnostics
    Kernel {
        form: PathBuf,
        /// Directory for CSV dumps of the operator matrices
        #[arg(long)]
        dump_csv: Option<PathBuf>,
    },
    /// Fourier-mode cohomology, index and ellipticity on the flat torus
    Torus {
        /// l1 radius of the deterministic mode set
        #[arg(long, default_value_t = 2)]
        truncation: usize,
        /// Extra random modes
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Constant curvature 2-form (JSON file) deforming the complex
        #[arg(long)]
        deform: Option<PathBuf>,
        /// Steps of the index homotopy scan (0 = skip)
        #[arg(long, default_value_t = 0)]
        scan: usize,
    },
    /// Draw random solutions of the first equation in a given case family
    Sample {
        /// Case label: 1, 2, 3a, 3b, 4a, 4b, 5, 6, 7a, 7b, 7c, 8, 9, 10
        #[arg(long, default_value = "1")]
        case: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Keep the normal form unconjugated
        #[arg(long, default_value_t = false)]
        plain: bool,
    },
}

pub fn main_with(cli: Cli) -> i32 {
    if let Some(n) = thread_cap() {
        // ignore failure: the global pool may already exist in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut cfg = Config {
        tol: cli.common.tol,
        tol_class: cli.common.tol_class,
        tol_rank: cli.common.tol_rank,
        seed: cli.common.seed,
        format: if cli.common.format == "tsv" {
            OutputFormat::Tsv
        } else {
            OutputFormat::Json
        },
        ..Default::default()
    };
    if let Err(e) = cfg.validate() {
        eprintln!("invalid configuration: {e}");
        return 2;
    }
    match run(cli, &mut cfg) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            2
        }
        Err(CliError::Check(msg)) => {
            eprintln!("check failure: {msg}");
            1
        }
    }
}

enum CliError {
    Input(String),
    Check(String),
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn load_form_f64(path: &PathBuf) -> Result<KForm<f64>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let f = io::parse_form_f64(&text)?;
    if f.degree() != 2 || f.dim() != Dim::R8 {
        return Err(CliError::Input("expected a degree-2 form on R^8".into()));
    }
    Ok(f)
}

fn emit(common: &CommonArgs, json: String, tsv: String) -> Result<(), CliError> {
    let body = if common.format == "tsv" { tsv } else { json };
    match &common.out {
        Some(path) => std::fs::write(path, body)?,
        None => println!("{}", body),
    }
    Ok(())
}

fn run(cli: Cli, cfg: &mut Config) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify {
            filter,
            trials,
            trials_float,
        } => {
            let cert = run_registry(&filter, cfg, trials, trials_float);
            let json = serde_json::to_string_pretty(&cert).expect("serializable");
            let tsv = cert.to_tsv();
            emit(&cli.common, json, tsv)?;
            Ok(if cert.passed { 0 } else { 1 })
        }
        Command::Classify { form } => {
            let f = load_form_f64(&form)?;
            let c = classify(&f, cfg.tol_class).map_err(|e| CliError::Check(e.to_string()))?;
            let row = c.normal_form.as_ref().and_then(|nf| {
                crate::ddt::table1_row(c.case, nf, cfg.tol_class)
                    .ok()
                    .map(|(scalar, pi47)| (scalar, pi47.norm_f64()))
            });
            #[derive(Serialize)]
            struct Report<'a> {
                case: &'a str,
                also_matches: Vec<&'static str>,
                boundary_flag: bool,
                r1_norm: f64,
                r2_norm: f64,
                quartic: f64,
                cayley_like: f64,
                normal_form: Option<&'a crate::ddt::NormalForm>,
                table_scalar: Option<f64>,
                table_pi47_norm: Option<f64>,
            }
            let report = Report {
                case: c.case.label(),
                also_matches: c.also_matches.iter().map(|x| x.label()).collect(),
                boundary_flag: c.boundary_flag,
                r1_norm: c.r1_norm,
                r2_norm: c.r2_norm,
                quartic: c.quartic,
                cayley_like: c.cayley_like,
                normal_form: c.normal_form.as_ref(),
                table_scalar: row.map(|r| r.0),
                table_pi47_norm: row.map(|r| r.1),
            };
            let json = serde_json::to_string_pretty(&report).expect("serializable");
            let tsv = format!(
                "case\tr1_norm\tr2_norm\tquartic\tcayley_like\n{}\t{:e}\t{:e}\t{:e}\t{:e}\n",
                report.case, report.r1_norm, report.r2_norm, report.quartic, report.cayley_like
            );
            emit(&cli.common, json, tsv)?;
            Ok(0)
        }
        Command::Solve { mu, branch } => {
            let parts: Vec<f64> = mu
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Input(format!("bad mu list: {e}")))?;
            if parts.len() != 4 {
                return Err(CliError::Input("mu needs exactly four entries".into()));
            }
            let mu: [f64; 4] = [parts[0], parts[1], parts[2], parts[3]];
            if mu.iter().sum::<f64>().abs() > 1e-9 {
                return Err(CliError::Input("mu must sum to zero".into()));
            }
            let branches: Vec<usize> = match branch {
                Some(b) if b < 3 => vec![b],
                Some(_) => return Err(CliError::Input("branch must be 0, 1 or 2".into())),
                None => vec![0, 1, 2],
            };
            #[derive(Serialize)]
            struct Root {
                branch: usize,
                alpha1: f64,
                residual: f64,
            }
            let roots: Vec<Root> = branches
                .into_iter()
                .map(|b| {
                    let x = solve_alpha1(&mu, b);
                    Root {
                        branch: b,
                        alpha1: x,
                        residual: cubic_residual(&mu, x),
                    }
                })
                .collect();
            let json = serde_json::to_string_pretty(&roots).expect("serializable");
            let tsv = roots
                .iter()
                .map(|r| format!("{}\t{}\t{:e}", r.branch, r.alpha1, r.residual))
                .collect::<Vec<_>>()
                .join("\n");
            emit(&cli.common, json, format!("branch\talpha1\tresidual\n{}\n", tsv))?;
            Ok(0)
        }
        Command::Kernel { form, dump_csv } => {
            let f = load_form_f64(&form)?;
            let t_rep = kernel_t_with_comparison(&f, cfg.tol_rank);
            let ts_rep = kernel_ts_with_comparison(&f, cfg.tol_rank);
            let obstruction = surjectivity_obstruction(&f, cfg.tol_rank);
            if let Some(dir) = dump_csv {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("t_op.csv"), build_t(&f).to_csv())?;
                std::fs::write(dir.join("s_op.csv"), build_s(&f).to_csv())?;
                std::fs::write(dir.join("p_op.csv"), build_p(&f).to_csv())?;
                std::fs::write(dir.join("q_op.csv"), build_q(&f).to_csv())?;
            }
            #[derive(Serialize)]
            struct Report {
                dim_ker_t: usize,
                dist_t: Option<f64>,
                dim_ker_ts: usize,
                dist_ts: Option<f64>,
                obstruction_nullity: usize,
                /// None when P is numerically singular (quartic = 1 wall)
                p_condition: Option<f64>,
                quartic: f64,
            }
            let cond = p_condition(&f);
            let report = Report {
                dim_ker_t: t_rep.dimension,
                dist_t: t_rep.comparison,
                dim_ker_ts: ts_rep.dimension,
                dist_ts: ts_rep.comparison,
                obstruction_nullity: obstruction.dimension,
                p_condition: cond.is_finite().then_some(cond),
                quartic: crate::ddt::quartic_value(&f, crate::ddt::standard_structure_f64()),
            };
            let json = serde_json::to_string_pretty(&report).expect("serializable");
            let tsv = format!(
                "dim_ker_t\tdim_ker_ts\tobstruction_nullity\tp_condition\tquartic\n{}\t{}\t{}\t{:e}\t{:e}\n",
                report.dim_ker_t, report.dim_ker_ts, report.obstruction_nullity, report.p_condition.unwrap_or(f64::INFINITY), report.quartic
            );
            emit(&cli.common, json, tsv)?;
            Ok(0)
        }
        Command::Torus {
            truncation,
            samples,
            deform,
            scan,
        } => {
            let f = match deform {
                Some(path) => load_form_f64(&path)?,
                None => KForm::zero(Dim::R8, 2),
            };
            let s = crate::ddt::standard_structure_f64();
            let mut rng = ChaCha8Rng::seed_from_u64(stable_hash(cfg.seed, "torus"));
            let report = torus_cohomology(s, &f, truncation, samples, &mut rng);
            let ell = ellipticity_check(s, &f, 1000, &mut rng);
            let scan_table = if scan > 0 {
                Some(homotopy_index_scan(&f, scan, 1, 100, &mut rng))
            } else {
                None
            };
            #[derive(Serialize)]
            struct Report {
                cohomology: crate::torus::ComplexReport,
                expected_dimension: i64,
                ellipticity_min_det: f64,
                ellipticity_pass: bool,
                scan: Option<Vec<(f64, i64)>>,
            }
            let expected = crate::torus::expected_dimension(&report).value;
            let ok = report.index == 0 && ell.pass;
            let rep = Report {
                cohomology: report,
                expected_dimension: expected,
                ellipticity_min_det: ell.min_abs_det,
                ellipticity_pass: ell.pass,
                scan: scan_table,
            };
            let json = serde_json::to_string_pretty(&rep).expect("serializable");
            let tsv = format!(
                "h0\th1\th2\th27\tindex\texpected_dim\n{}\t{}\t{}\t{}\t{}\t{}\n",
                rep.cohomology.h0, rep.cohomology.h1, rep.cohomology.h2, rep.cohomology.h27,
                rep.cohomology.index, rep.expected_dimension
            );
            emit(&cli.common, json, tsv)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Sample { case, count, plain } => {
            let case_id = CaseId::from_label(&case)
                .filter(|c| *c != CaseId::NotASolution)
                .ok_or_else(|| CliError::Input(format!("unknown case label {:?}", case)))?;
            let mut rng = ChaCha8Rng::seed_from_u64(stable_hash(cfg.seed, "sample"));
            let opts = SampleOptions {
                conjugate: !plain,
                ..Default::default()
            };
            let mut forms = Vec::new();
            for _ in 0..count {
                let f = sample_solution(case_id, &mut rng, &opts);
                let nf = normal_form(&f, 1e-12, 10_000)
                    .map_err(|e| CliError::Check(e.to_string()))?;
                forms.push((io::form_to_json_f64(&f), nf.residual_norm));
            }
            #[derive(Serialize)]
            struct Entry {
                form: io::FormJson,
                normal_form_residual: f64,
            }
            let entries: Vec<Entry> = forms
                .into_iter()
                .map(|(form, normal_form_residual)| Entry {
                    form,
                    normal_form_residual,
                })
                .collect();
            let json = serde_json::to_string_pretty(&entries).expect("serializable");
            emit(&cli.common, json, "sample output is json-only\n".into())?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_subcommand_parses() {
        let cli = Cli::parse_from(["spin7", "solve", "--mu", "0,0,0,0", "--branch", "0"]);
        match cli.command {
            Command::Solve { mu, branch } => {
                assert_eq!(mu, "0,0,0,0");
                assert_eq!(branch, Some(0));
            }
            _ => panic!("wrong subcommand"),
        }
    }
}
