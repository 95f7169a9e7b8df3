use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use qschlicht::caratheodory::{p_series, AtomicMeasure};
use qschlicht::classes::{convex_from_measure, starlike_from_p};
use qschlicht::explorer::{self, Functional, Suite, SweepConfig, SweepReport};
use qschlicht::extremal::{eq_series, f1_series, f2_series};
use qschlicht::functionals::{bieberbach_bounds, fs_bound, hankel_bound};
use qschlicht::{ClassParams, TruncatedSeries};

#[derive(Parser)]
#[command(name = "qschlicht", version, about = "q-starlike and q-convex coefficient explorer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Starlike,
    Convex,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Taylor coefficients of a class member.
    Coeffs {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 16)]
        order: usize,
        /// f1, f2, eq or measure:FILE
        #[arg(long)]
        source: String,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Print the stated coefficient bounds.
    Bounds {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// RE,IM
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Largest n for the convex coefficient bounds.
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Run a self-check suite; exits with status 1 if a check fails.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded extremal search over a parameter grid.
    Search {
        #[arg(long, value_parser = parse_functional)]
        functional: Functional,
        /// a:b:step or a comma list
        #[arg(long)]
        q_grid: String,
        #[arg(long, default_value = "0")]
        alpha_grid: String,
        /// Comma list of complex numbers such as -1,0.5,0.5+0.5i
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        mu_grid: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        order: usize,
        #[arg(long, default_value_t = 4)]
        k_atoms: usize,
        #[arg(long, default_value_t = 10)]
        n_check: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        no_extremals: bool,
        #[arg(long)]
        no_refine: bool,
        /// Worker count; overrides QSCHLICHT_THREADS.
        #[arg(long)]
        threads: Option<usize>,
        /// JSON report path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-evaluate the argmax of every cell of a saved report.
    Replay {
        report: PathBuf,
    },
    /// Bounds as q -> 1 against their classical values.
    Limits {
        /// Comma list, increasing
        #[arg(long)]
        q_list: String,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long)]
        json: bool,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: qschlicht::Error| e.to_string())
}

fn parse_functional(s: &str) -> Result<Functional, String> {
    s.parse().map_err(|e: qschlicht::Error| e.to_string())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().with_context(|| format!("not a number: {s:?}"))
}

/// `a:b:step` (inclusive) or `x,y,z`.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (parse_f64(a)?, parse_f64(b)?, parse_f64(step)?);
            if !(step > 0.0) || b < a {
                bail!("range {s:?} needs a <= b and a positive step");
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n)
                .map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [_] => s.split(',').map(parse_f64).collect(),
        _ => bail!("bad grid {s:?}"),
    }
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Complex64>()
                .map_err(|_| anyhow!("not a complex number: {t:?}"))
        })
        .collect()
}

fn parse_mu(s: &str) -> Result<Complex64> {
    match s.split(',').collect::<Vec<_>>().as_slice() {
        [re, im] => Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?)),
        [re] => Ok(Complex64::new(parse_f64(re)?, 0.0)),
        _ => bail!("--mu expects RE,IM"),
    }
}

fn member(class: Class, params: &ClassParams, source: &str) -> Result<TruncatedSeries> {
    if let Some(path) = source.strip_prefix("measure:") {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let m = AtomicMeasure::from_json(&text)?;
        return Ok(match class {
            Class::Starlike => starlike_from_p(&p_series(&m, params.order), params)?,
            Class::Convex => convex_from_measure(&m, params)?,
        });
    }
    match (class, source) {
        (Class::Starlike, "f1") => Ok(f1_series(params)),
        (Class::Starlike, "f2") => Ok(f2_series(params)),
        (Class::Convex, "eq") => Ok(eq_series(params).e_q),
        (Class::Convex, "f1" | "f2") => bail!("f1 and f2 are starlike; use --class starlike"),
        (Class::Starlike, "eq") => bail!("eq is convex; use --class convex"),
        _ => bail!("unknown source {source:?}; expected f1, f2, eq or measure:FILE"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Coeffs {
            class,
            q,
            alpha,
            order,
            source,
            json,
            csv,
        } => {
            let params = ClassParams::with_order(q, alpha, order)?;
            let f = member(class, &params, &source)?;
            if json {
                let coeffs: Vec<[f64; 2]> = f.coeffs().iter().map(|c| [c.re, c.im]).collect();
                let class = match class {
                    Class::Starlike => "starlike",
                    Class::Convex => "convex",
                };
                let v = json!({"class": class, "q": q, "alpha": alpha, "order": f.order(),
                               "source": source, "coeffs": coeffs});
                println!("{v}");
            } else if csv {
                println!("n,re,im");
                for (n, c) in f.coeffs().iter().enumerate() {
                    println!("{n},{},{}", c.re, c.im);
                }
            } else {
                for (n, c) in f.coeffs().iter().enumerate() {
                    println!("{n:>4}  {:>24.16e}  {:>24.16e}", c.re, c.im);
                }
            }
        }
        Command::Bounds { q, alpha, mu, n_max } => {
            let params = ClassParams::new(q, alpha)?;
            let mu = mu.as_deref().map(parse_mu).transpose()?.unwrap_or_default();
            let r = params.ratios();
            let fs = fs_bound(&params, mu);
            let h = hankel_bound(&params);
            let b = bieberbach_bounds(&params, n_max)?;
            let v = json!({
                "q": q, "alpha": alpha, "mu": [mu.re, mu.im],
                "l1": r.l1, "l2": r.l2, "l3": r.l3, "lalpha": r.lalpha,
                "fs_bound": fs, "hankel_bound": h,
                "bieberbach_convex": b[2..].to_vec(),
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Command::Verify {
            suite,
            q,
            alpha,
            samples,
            seed,
        } => {
            let rep = explorer::verify(suite, q, alpha, samples, seed)?;
            println!("{}", serde_json::to_string_pretty(&rep)?);
            return Ok(rep.passed);
        }
        Command::Search {
            functional,
            q_grid,
            alpha_grid,
            mu_grid,
            samples,
            seed,
            order,
            k_atoms,
            n_check,
            tol,
            no_extremals,
            no_refine,
            threads,
            out,
            csv,
        } => {
            let cfg = SweepConfig {
                seed,
                samples,
                q_grid: parse_grid(&q_grid)?,
                alpha_grid: parse_grid(&alpha_grid)?,
                mu_grid: parse_complex_list(&mu_grid)?,
                order,
                k_atoms,
                include_extremals: !no_extremals,
                functional,
                n_check,
                tol,
                refine: !no_refine,
                threads,
            };
            let rep = explorer::run_sweep(&cfg)?;
            let text = rep.to_json();
            match out {
                Some(path) => {
                    fs::write(&path, format!("{text}\n"))
                        .with_context(|| format!("writing {}", path.display()))?
                }
                None => println!("{text}"),
            }
            if let Some(path) = csv {
                fs::write(&path, rep.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
            for c in &rep.cells {
                let mu = c.mu.map_or(String::new(), |[re, im]| format!(" mu={re}{im:+}i"));
                eprintln!(
                    "q={} alpha={}{mu}: max={:.10} bound={:.10}{} {}",
                    c.q,
                    c.alpha,
                    c.empirical_max,
                    c.stated_bound,
                    if c.conjectural { " (conjectural)" } else { "" },
                    if c.violated { "EXCEEDED" } else { "ok" }
                );
            }
        }
        Command::Replay { report } => {
            let text = fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))?;
            let rep = SweepReport::from_json(&text)?;
            let mut ok = true;
            for (c, r) in rep.cells.iter().zip(rep.replay()?) {
                let good = r.abs_diff <= 1e-10;
                ok &= good;
                println!(
                    "q={} alpha={} recorded={} replayed={} diff={:e} {}",
                    c.q,
                    c.alpha,
                    c.empirical_max,
                    r.value,
                    r.abs_diff,
                    if good { "ok" } else { "MISMATCH" }
                );
            }
            return Ok(ok);
        }
        Command::Limits { q_list, alpha, json } => {
            let qs = q_list.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
            let table = explorer::run_limit_sweep(&qs, alpha)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&table)?);
            } else {
                println!("{:<18} {:>10} {:>20} {:>20} {:>12}", "entry", "q", "value", "target", "abs_error");
                for row in &table.rows {
                    for e in &row.entries {
                        println!(
                            "{:<18} {:>10} {:>20.14} {:>20.14} {:>12.3e}",
                            e.label, row.q, e.value, e.target, e.abs_error
                        );
                    }
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
