//! Command-line front end: compute constants, print the comparison table,
//! run the identity verification suite, dump exact coefficients, and manage
//! the result cache.
//!
//! Exit codes: 0 success, 1 verification suite found failures, 2 usage or
//! invalid arguments, 3 numerical failure (non-convergence or a failed
//! double-run certificate).

mod cache;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use srconst_core::constants::{self, ConstantKind, Method};
use srconst_core::exact;
use srconst_core::integrand::set_eval_overrides;
use srconst_core::verify;
use srconst_core::{em, Error};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "srconst",
    version,
    about = "Stirling–Ramanujan constants from exponential-period integrals, \
             with an Euler–Maclaurin cross-check"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
}

#[derive(Args)]
struct EvalOverrides {
    /// Branch crossover for kernel evaluation, strictly inside (0, 2pi)
    #[arg(long, global = true)]
    crossover: Option<f64>,
    /// Minimum number of series terms below the crossover
    #[arg(long, global = true)]
    series_terms: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one constant (S, S_tilde, Upsilon, gamma, glaisher_log, zeta)
    Constant {
        /// Constant family: S | S_tilde | Upsilon | gamma | glaisher_log | zeta
        #[arg(long)]
        kind: String,
        /// Order n (>= -1 for S/Upsilon, >= 0 for S_tilde, >= 2 for zeta)
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n: i32,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// integral | euler_maclaurin | both
        #[arg(long, default_value = "both")]
        method: String,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        /// JSON result cache path
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        overrides: EvalOverrides,
    },
    /// S_n comparison table for n = -1..max_n, both methods
    Table {
        #[arg(long = "max-n", default_value_t = 3)]
        max_n: i32,
        #[arg(long, default_value_t = 30)]
        digits: u32,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        #[command(flatten)]
        overrides: EvalOverrides,
    },
    /// Run the identity verification suite (exit 1 if any report fails)
    Verify {
        #[arg(long, default_value_t = 30)]
        digits: u32,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        #[command(flatten)]
        overrides: EvalOverrides,
    },
    /// Dump exact rational coefficients and polynomials
    Coeffs {
        /// b | r | r_hat | a_tilde | A | B | faulhaber | b_poly
        #[arg(long)]
        what: String,
        /// Order for polynomial dumps (A, B, faulhaber, b_poly, a_tilde)
        #[arg(long)]
        n: Option<u32>,
        /// Upper index for sequence dumps (b, r, r_hat)
        #[arg(long = "max-n")]
        max_n: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Inspect or clear the result cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Print all cache entries
    Show {
        #[arg(long)]
        cache: PathBuf,
    },
    /// Delete the cache file
    Clear {
        #[arg(long)]
        cache: PathBuf,
    },
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Domain(_) => ExitCode::from(2),
        Error::NonConverged { .. } | Error::CertificationFailed { .. } => ExitCode::from(3),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    exit_for(e)
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn install_overrides(o: &EvalOverrides) -> Result<(), Error> {
    if o.crossover.is_some() || o.series_terms.is_some() {
        set_eval_overrides(o.crossover, o.series_terms)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Constant { kind, n, digits, method, format, cache, overrides } => {
            if let Err(e) = install_overrides(&overrides) {
                return fail(&e);
            }
            cmd_constant(&kind, n, digits, &method, format, cache.as_deref())
        }
        Cmd::Table { max_n, digits, format, overrides } => {
            if let Err(e) = install_overrides(&overrides) {
                return fail(&e);
            }
            cmd_table(max_n, digits, format)
        }
        Cmd::Verify { digits, format, overrides } => {
            if let Err(e) = install_overrides(&overrides) {
                return fail(&e);
            }
            cmd_verify(digits, format)
        }
        Cmd::Coeffs { what, n, max_n, format } => cmd_coeffs(&what, n, max_n, format),
        Cmd::Cache { action } => cmd_cache(action),
    }
}

fn cmd_constant(
    kind: &str,
    n: i32,
    digits: u32,
    method: &str,
    format: Format,
    cache_path: Option<&std::path::Path>,
) -> ExitCode {
    let Some(kind) = ConstantKind::parse(kind) else {
        return usage(&format!(
            "unknown kind '{kind}' (expected S, S_tilde, Upsilon, gamma, glaisher_log, zeta)"
        ));
    };
    let Some(method) = Method::parse(method) else {
        return usage(&format!(
            "unknown method '{method}' (expected integral, euler_maclaurin, both)"
        ));
    };

    // consult the cache keyed by the full request tuple
    if let Some(path) = cache_path {
        let key = cache::cache_key(kind.as_str(), n, digits, method.as_str());
        match cache::lookup(path, &key) {
            Ok(Some(hit)) => {
                eprintln!("cache hit: {key}");
                match format {
                    Format::Plain => println!("{}", hit.value),
                    Format::Json => output::print_json(&json!([{
                        "kind": kind.as_str(),
                        "n": n,
                        "digits": digits,
                        "method": method.as_str(),
                        "value": hit.value,
                        "error_bound": hit.error_bound,
                        "nodes": null,
                        "truncation_T": null,
                    }])),
                }
                return ExitCode::SUCCESS;
            }
            Ok(None) => {}
            Err(msg) => return usage(&msg),
        }
    }

    let computation = match constants::compute(kind, n, digits, method) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let agreement = computation
        .agreement
        .as_ref()
        .map(|a| a.to_decimal_string(3));

    match format {
        Format::Plain => print!(
            "{}",
            output::constant_plain(&computation.results, agreement.as_deref())
        ),
        Format::Json => {
            let records: Vec<_> =
                computation.results.iter().map(output::constant_record).collect();
            output::print_json(&serde_json::Value::Array(records));
        }
    }

    if let Some(path) = cache_path {
        // one entry per method computed, plus one for the requested tuple
        for r in &computation.results {
            let key = cache::cache_key(r.kind.as_str(), r.n, r.digits, r.method_used.as_str());
            if let Err(msg) =
                cache::store(path, &key, r.decimal.clone(), r.error_bound.to_decimal_string(3))
            {
                return usage(&msg);
            }
        }
        if method == Method::Both {
            let key = cache::cache_key(kind.as_str(), n, digits, method.as_str());
            let r = &computation.results[0];
            if let Err(msg) =
                cache::store(path, &key, r.decimal.clone(), r.error_bound.to_decimal_string(3))
            {
                return usage(&msg);
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_table(max_n: i32, digits: u32, format: Format) -> ExitCode {
    match constants::constants_table(max_n, digits) {
        Ok(rows) => {
            match format {
                Format::Plain => print!("{}", output::table_plain(&rows)),
                Format::Json => output::print_json(&output::table_json(&rows)),
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn cmd_verify(digits: u32, format: Format) -> ExitCode {
    match verify::run_suite(digits) {
        Ok(reports) => {
            match format {
                Format::Plain => print!("{}", output::reports_plain(&reports)),
                Format::Json => {
                    let arr: Vec<_> = reports.iter().map(output::report_json).collect();
                    output::print_json(&serde_json::Value::Array(arr));
                }
            }
            if reports.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

fn cmd_coeffs(what: &str, n: Option<u32>, max_n: Option<u32>, format: Format) -> ExitCode {
    let result: Result<(String, Vec<String>), String> = match what {
        "b" => match max_n {
            // starts at b_{-1}
            Some(m) => Ok((
                "b_k".to_string(),
                (-1..=m as i32).map(|k| exact::b_coeff(k).to_string()).collect(),
            )),
            None => Err("--what b requires --max-n".into()),
        },
        "r" => match max_n {
            Some(m) => Ok((
                "r_n".to_string(),
                (0..=m).map(|k| exact::r_n(k as i32).to_string()).collect(),
            )),
            None => Err("--what r requires --max-n".into()),
        },
        "r_hat" => match max_n {
            Some(m) => Ok((
                "r_hat_n".to_string(),
                (0..=m).map(|k| exact::r_hat(k).to_string()).collect(),
            )),
            None => Err("--what r_hat requires --max-n".into()),
        },
        "a_tilde" => match n {
            Some(nn) => Ok((
                format!("a_tilde_j of A~_{nn}"),
                (0..=nn + 1)
                    .map(|j| exact::tilde_a(nn, j).expect("j in range").to_string())
                    .collect(),
            )),
            None => Err("--what a_tilde requires --n".into()),
        },
        "A" => match n {
            Some(nn) => Ok((
                format!("A_{nn}"),
                vec![em::asymptotic_polys(nn, nn / 2 + 2).a.to_string()],
            )),
            None => Err("--what A requires --n".into()),
        },
        "B" => match n {
            Some(nn) => Ok((
                format!("B_{nn}"),
                vec![em::asymptotic_polys(nn, nn / 2 + 2).b.to_string()],
            )),
            None => Err("--what B requires --n".into()),
        },
        "faulhaber" => match n {
            Some(nn) => Ok((
                format!("P_{nn}"),
                vec![exact::faulhaber_poly(nn).to_string()],
            )),
            None => Err("--what faulhaber requires --n".into()),
        },
        "b_poly" => match n {
            Some(nn) => {
                Ok((format!("b_{nn}(s)"), vec![exact::b_poly(nn).to_string()]))
            }
            None => Err("--what b_poly requires --n".into()),
        },
        _ => Err(format!(
            "unknown --what '{what}' (expected b, r, r_hat, a_tilde, A, B, faulhaber, b_poly)"
        )),
    };
    match result {
        Ok((label, vals)) => {
            match format {
                Format::Plain => println!("{}", vals.join(", ")),
                Format::Json => output::print_json(&json!({
                    "what": what,
                    "label": label,
                    "values": vals,
                })),
            }
            ExitCode::SUCCESS
        }
        Err(msg) => usage(&msg),
    }
}

fn cmd_cache(action: CacheAction) -> ExitCode {
    match action {
        CacheAction::Show { cache: path } => match cache::read_all(&path) {
            Ok(file) => {
                for (key, entry) in &file.entries {
                    println!("{key} = {} (error_bound<={})", entry.value, entry.error_bound);
                }
                println!("{} entries", file.entries.len());
                ExitCode::SUCCESS
            }
            Err(msg) => usage(&msg),
        },
        CacheAction::Clear { cache: path } => match cache::clear(&path) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => usage(&msg),
        },
    }
}
