use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use geovar::asymptotics::variance_prediction;
use geovar::expsums::{quadruple_sum, quadruple_target, QUADRUPLE_GUARD};
use geovar::harness::{check_reports, emit_report, run_experiment, to_csv, ExperimentConfig};
use geovar::hecke::{eigenforms, EigenCache, EigenTable};
use geovar::measure::{decomposition_check, TestFunction};
use geovar::oscillatory::{compare_sampled, IvKernels, SamplerConfig};
use geovar::trace::{averaged_petersson_sides, classical_petersson_check, weights_for, KernelShape, WeightKernel};

/// Environment variable giving the default worker count for `variance`.
const THREADS_ENV: &str = "GEOVAR_THREADS";

#[derive(Parser)]
#[command(name = "geovar", about = "Quantum variance experiments for Hecke cusp forms on the vertical geodesic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute Hecke eigenforms of one weight and write the eigen-data cache.
    Eigen {
        #[arg(long)]
        weight: u32,
        #[arg(long = "primes-up-to")]
        primes_up_to: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose the geodesic measure of one eigenform.
    Measure {
        #[arg(long)]
        weight: u32,
        #[arg(long = "form-index", default_value_t = 0)]
        form_index: usize,
        /// Test function JSON; the default bump when omitted.
        #[arg(long)]
        psi: Option<PathBuf>,
        /// Primes with stored eigenvalues (the symmetric-square series needs many).
        #[arg(long, default_value_t = 16_000)]
        truncation: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Kloosterman sums and the quadruple-sum identity.
    Kloosterman {
        #[arg(long = "c-max", default_value_t = 50)]
        c_max: u64,
        #[arg(long = "verify-identity")]
        verify_identity: bool,
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, default_value_t = 1)]
        n: i64,
    },
    /// Both sides of the classical or averaged Petersson formula.
    Petersson {
        #[arg(long, value_enum, default_value_t = Mode::Averaged)]
        mode: Mode,
        /// Scale `K` (averaged) or the weight `k` (classical).
        #[arg(long = "K")]
        big_k: f64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Stationary-phase leading term against direct quadrature at sampled points.
    Phase {
        #[arg(long = "K")]
        big_k: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Main-term prediction for the weighted variance.
    Predict {
        #[arg(long = "K")]
        big_k: f64,
        #[arg(long)]
        psi1: Option<PathBuf>,
        #[arg(long)]
        psi2: Option<PathBuf>,
        /// `default` or a kernel JSON file.
        #[arg(long, default_value = "default")]
        h: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full experiment over the configured scales.
    Variance {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Averaged,
    Classical,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing {}", path.display()))
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let s = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, s + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{s}");
            Ok(())
        }
    }
}

fn psi_or_default(path: Option<&Path>) -> Result<TestFunction> {
    path.map_or_else(|| Ok(TestFunction::default()), read_json)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Eigen { weight, primes_up_to, out } => {
            let forms = eigenforms(weight, primes_up_to)?;
            let cache = EigenCache::from_forms(weight, &forms, primes_up_to as u64);
            emit(&cache, Some(&out))?;
            eprintln!("weight {weight}: {} eigenforms written to {}", forms.len(), out.display());
        }
        Command::Measure { weight, form_index, psi, truncation, report } => {
            let psi = psi_or_default(psi.as_deref())?;
            let forms = eigenforms(weight, truncation)?;
            let Some(f) = forms.get(form_index) else {
                bail!("weight {weight} has {} eigenforms, index {form_index} out of range", forms.len());
            };
            emit(&decomposition_check(f, &psi)?, report.as_deref())?;
        }
        Command::Kloosterman { c_max, verify_identity, m, n } => {
            if verify_identity {
                if c_max > QUADRUPLE_GUARD {
                    bail!("c-max {c_max} exceeds the brute-force ceiling {QUADRUPLE_GUARD}");
                }
                println!("c,computed,c^3*phi(c),match");
                let mut ok = true;
                for c in 1..=c_max {
                    let got = quadruple_sum(c)?;
                    let want = quadruple_target(c);
                    ok &= got == want;
                    println!("{c},{got},{want},{}", got == want);
                }
                if !ok {
                    bail!("quadruple-sum identity failed");
                }
            } else {
                println!("c,S({m},{n};c)");
                for c in 1..=c_max {
                    println!("{c},{}", geovar::expsums::kloosterman(m, n, c));
                }
            }
        }
        Command::Petersson { mode, big_k, m, n, report } => match mode {
            Mode::Classical => {
                let k = big_k as u32;
                if f64::from(k) != big_k {
                    bail!("classical mode needs an integer weight, got {big_k}");
                }
                let table = EigenTable::build([k], 100)?;
                emit(&classical_petersson_check(k, m, n, &table)?, report.as_deref())?;
            }
            Mode::Averaged => {
                let kernel = WeightKernel::default();
                let table = EigenTable::build(weights_for(&kernel, big_k), 100)?;
                emit(&averaged_petersson_sides(m, n, big_k, &kernel, &table)?, report.as_deref())?;
            }
        },
        Command::Phase { big_k, samples, seed, report } => {
            let rows = compare_sampled(big_k, samples, seed, &IvKernels::default(), &SamplerConfig::default())?;
            let worst = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
            eprintln!("{} points, worst relative error {worst:.3e}", rows.len());
            emit(&rows, report.as_deref())?;
        }
        Command::Predict { big_k, psi1, psi2, h, out } => {
            let psi1 = psi_or_default(psi1.as_deref())?;
            let psi2 = psi_or_default(psi2.as_deref())?;
            let shape = if h == "default" { KernelShape::default() } else { read_json(Path::new(&h))? };
            let p = variance_prediction(&psi1, &psi2, &WeightKernel::new(shape), big_k)?;
            emit(&p, out.as_deref())?;
        }
        Command::Variance { config, threads } => {
            let mut cfg: ExperimentConfig = config.as_deref().map_or_else(|| Ok(ExperimentConfig::default()), read_json)?;
            let env = std::env::var(THREADS_ENV).ok().map(|s| s.parse::<usize>()).transpose().context(THREADS_ENV)?;
            if let Some(t) = threads.or(env) {
                cfg.thread_count = t;
            }
            let reports = run_experiment(&cfg)?;
            print!("{}", to_csv(&reports));
            for w in emit_report(&reports, &cfg.output)? {
                eprintln!("wrote {}", w.display());
            }
            for r in &reports {
                if let (Some(ratio), Some(ok)) = (r.trend_ratio, r.trend_in_band) {
                    eprintln!("K = {}: empirical_M trend ratio {ratio:.4} ({})", r.big_k, if ok { "inside band" } else { "outside band" });
                }
            }
            check_reports(&reports, &cfg.tolerances)?;
        }
    }
    Ok(())
}
