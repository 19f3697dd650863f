//! `levyzoom`: scaling functions, rate functions, spectra and Monte Carlo
//! checks for Lévy triplets given as JSON.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use levyzoom::estimate::{self, LdpWindow};
use levyzoom::ext::fmt_csv;
use levyzoom::scaling::{self, PiecewiseLinearFn};
use levyzoom::simulate::{self, SimConfig, ToyModelParams};
use levyzoom::spectrum;
use levyzoom::triplet::TripletParseError;
use levyzoom::{LevyError, LevyTriplet, LimitKind};

#[derive(Parser, Debug)]
#[command(name = "levyzoom", version, about = "Small-time scaling of Lévy processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Small-time limit of a triplet (JSON)
    Classify(TripletArg),
    /// Closed-form scaling function on a q-grid (CSV q,tau0)
    TauTheoretical {
        #[command(flatten)]
        triplet: TripletArg,
        /// "lo:hi:step" or "lo:hi:dyadic"
        #[arg(long, allow_hyphen_values = true, default_value = "0.25:4:0.25")]
        q_grid: String,
    },
    /// Monte Carlo scaling function (CSV q,tau_hat,stderr,tau_theory)
    TauEmpirical {
        #[command(flatten)]
        triplet: TripletArg,
        #[arg(long, allow_hyphen_values = true, default_value = "0.2:4:0.2")]
        q_grid: String,
        #[arg(long, default_value = "16:16384:dyadic")]
        n_grid: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Legendre conjugate of the scaling function (CSV x,tau_star)
    Legendre {
        #[command(flatten)]
        source: PlfSource,
        #[arg(long, allow_hyphen_values = true, default_value = "-2:1:0.05")]
        x_grid: String,
    },
    /// Rate function of the rate sequence (JSON, or CSV x,rate,bound_only with --x-grid)
    RateFunction {
        #[command(flatten)]
        triplet: TripletArg,
        #[arg(long, allow_hyphen_values = true)]
        x_grid: Option<String>,
    },
    /// Probability that log|X(1/n)|/log n falls in an open window (JSON)
    Ldp {
        #[command(flatten)]
        triplet: TripletArg,
        #[arg(long)]
        n: u64,
        /// "a,b"; b may be "inf"
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Scaled small-time moments against their limit constant (JSON)
    Lemma2 {
        #[command(flatten)]
        triplet: TripletArg,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value = "4096:4096:dyadic")]
        n_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Multifractal formalism spectrum (JSON, or CSV h,d_formalism,d_levy with --h-grid)
    Spectrum {
        #[command(flatten)]
        triplet: TripletArg,
        #[arg(long, allow_hyphen_values = true)]
        h_grid: Option<String>,
    },
    /// Draws of X(dt) (CSV column x)
    Simulate {
        #[command(flatten)]
        triplet: TripletArg,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        n_samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
        /// Replace the jumps below delta by nothing instead of a matched Gaussian
        #[arg(long)]
        no_compensation: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Toy model moment: exact value and Monte Carlo estimate (JSON)
    Toy {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[command(flatten)]
        sim: SimArgs,
        /// Output file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct TripletArg {
    /// Triplet JSON file
    #[arg(long)]
    triplet: PathBuf,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlfSource {
    /// Triplet JSON file; the conjugate of its scaling function is taken
    #[arg(long, conflicts_with = "plf", required_unless_present = "plf")]
    triplet: Option<PathBuf>,
    /// Piecewise-linear function JSON file
    #[arg(long)]
    plf: Option<PathBuf>,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, env = "LEVYZOOM_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; the output does not depend on it
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig { workers: self.workers, ..SimConfig::with_seed(self.seed) }
    }
}

enum Failure {
    Usage(String),
    Domain(LevyError),
}

impl From<LevyError> for Failure {
    fn from(e: LevyError) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_triplet(path: &Path) -> CliResult<LevyTriplet> {
    LevyTriplet::from_json(&read_file(path)?).map_err(|e| match e {
        TripletParseError::Json(j) => usage(format!("{}: {j}", path.display())),
        TripletParseError::Invalid(v) => usage(format!("{}: {v}", path.display())),
    })
}

fn parse_num(s: &str) -> CliResult<f64> {
    levyzoom::ext::parse_ext(s).ok_or_else(|| usage(format!("not a number: {s:?}")))
}

/// `lo:hi:step` (inclusive) or `lo:hi:dyadic` (doubling from `lo`).
fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(usage(format!("grid {spec:?} must look like lo:hi:step or lo:hi:dyadic")));
    };
    let (lo, hi) = (parse_num(lo)?, parse_num(hi)?);
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(usage(format!("grid {spec:?} needs finite lo <= hi")));
    }
    let mut out = Vec::new();
    if step.trim() == "dyadic" {
        if lo <= 0.0 {
            return Err(usage(format!("dyadic grid {spec:?} needs lo > 0")));
        }
        let mut x = lo;
        while x <= hi * (1.0 + 1e-12) {
            out.push(x);
            x *= 2.0;
        }
    } else {
        let step = parse_num(step)?;
        if !(step > 0.0 && step.is_finite()) {
            return Err(usage(format!("grid {spec:?} needs a positive step")));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        out.extend((0..=count).map(|i| lo + step * i as f64));
    }
    Ok(out)
}

fn parse_n_grid(spec: &str) -> CliResult<Vec<u64>> {
    parse_grid(spec)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as u64)
            } else {
                Err(usage(format!("n-grid {spec:?} must contain positive integers, got {x}")))
            }
        })
        .collect()
}

fn parse_window(s: &str) -> CliResult<LdpWindow> {
    let Some((a, b)) = s.split_once(',') else {
        return Err(usage(format!("window {s:?} must look like a,b")));
    };
    LdpWindow::new(parse_num(a)?, parse_num(b)?).map_err(|e| usage(e.to_string()))
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    formalism: spectrum::SingularitySpectrum,
    closed_form: Option<spectrum::SingularitySpectrum>,
    agree: Option<bool>,
}

#[derive(Serialize)]
struct ToyReport {
    alpha: f64,
    n: u64,
    q: f64,
    exact: f64,
    estimate: f64,
    std_error: f64,
    z_score: f64,
    n_samples: usize,
    seed: u64,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Classify(a) => {
            let limit = load_triplet(&a.triplet)?.classify_small_time_limit()?;
            if limit.kind == LimitKind::NoNontrivialLimit {
                return Err(LevyError::NoLimit.into());
            }
            emit(a.out.as_deref(), &json(&limit))
        }
        Command::TauTheoretical { triplet, q_grid } => {
            let tau = scaling::theoretical_tau0(&load_triplet(&triplet.triplet)?)?;
            let rows = parse_grid(&q_grid)?.into_iter().map(|q| vec![fmt_csv(q), fmt_csv(tau.eval(q))]);
            emit(triplet.out.as_deref(), &csv("q,tau0", rows))
        }
        Command::TauEmpirical { triplet, q_grid, n_grid, samples, sim } => {
            let t = load_triplet(&triplet.triplet)?;
            let theory = scaling::theoretical_tau0(&t).ok();
            let ns = parse_n_grid(&n_grid)?;
            let mut rows = Vec::new();
            for q in parse_grid(&q_grid)? {
                let f = estimate::fit_tau0(&t, q, &ns, samples, &sim.config())?;
                for w in &f.warnings {
                    eprintln!("warning: {w}");
                }
                let th = theory.as_ref().map_or(f64::NAN, |tau| tau.eval(q));
                rows.push(vec![fmt_csv(q), fmt_csv(f.slope), fmt_csv(f.slope_std_error), fmt_csv(th)]);
            }
            emit(triplet.out.as_deref(), &csv("q,tau_hat,stderr,tau_theory", rows))
        }
        Command::Legendre { source, x_grid } => {
            let f: PiecewiseLinearFn = match (&source.triplet, &source.plf) {
                (Some(p), _) => scaling::theoretical_tau0(&load_triplet(p)?)?,
                (None, Some(p)) => {
                    let f: PiecewiseLinearFn = serde_json::from_str(&read_file(p)?)
                        .map_err(|e| usage(format!("{}: malformed piecewise-linear JSON: {e}", p.display())))?;
                    f.validate().map_err(|e| usage(format!("{}: {e}", p.display())))?;
                    f
                }
                (None, None) => return Err(usage("one of --triplet or --plf is required")),
            };
            let conj = scaling::legendre_transform(&f)?;
            let rows = parse_grid(&x_grid)?.into_iter().map(|x| vec![fmt_csv(x), fmt_csv(conj.eval(x))]);
            emit(source.out.as_deref(), &csv("x,tau_star", rows))
        }
        Command::RateFunction { triplet, x_grid } => {
            let rate = scaling::rate_function(&load_triplet(&triplet.triplet)?)?;
            let text = match x_grid {
                None => json(&rate),
                Some(g) => {
                    let rows = parse_grid(&g)?
                        .into_iter()
                        .map(|x| vec![fmt_csv(x), fmt_csv(rate.eval(x)), rate.is_bound_only(x).to_string()]);
                    csv("x,rate,bound_only", rows)
                }
            };
            emit(triplet.out.as_deref(), &text)
        }
        Command::Ldp { triplet, n, window, samples, sim } => {
            let t = load_triplet(&triplet.triplet)?;
            let w = parse_window(&window)?;
            let r = estimate::ldp_probability(&t, n, &w, samples, &sim.config())?;
            emit(triplet.out.as_deref(), &json(&r))
        }
        Command::Lemma2 { triplet, q, t: t_fixed, n_grid, samples, sim } => {
            let t = load_triplet(&triplet.triplet)?;
            let r = estimate::lemma2_check(&t, q, t_fixed, &parse_n_grid(&n_grid)?, samples, &sim.config())?;
            emit(triplet.out.as_deref(), &json(&r))
        }
        Command::Spectrum { triplet, h_grid } => {
            let t = load_triplet(&triplet.triplet)?;
            let formalism = spectrum::formalism_spectrum(&spectrum::zeta_from_tau0(&scaling::theoretical_tau0(&t)?))?;
            let closed_form = if t.sigma == 0.0 && levyzoom::bg_index(&t.measure) > 0.0 {
                spectrum::levy_spectrum(levyzoom::bg_index(&t.measure)).ok()
            } else {
                None
            };
            let text = match h_grid {
                None => {
                    let agree = closed_form.as_ref().map(|c| spectrum::spectra_agree(&formalism, c, spectrum::FORMALISM_TOL));
                    json(&SpectrumReport { formalism, closed_form, agree })
                }
                Some(g) => {
                    let rows = parse_grid(&g)?.into_iter().map(|h| {
                        let d = closed_form.as_ref().map_or(f64::NAN, |c| c.eval(h));
                        vec![fmt_csv(h), fmt_csv(formalism.eval(h)), fmt_csv(d)]
                    });
                    csv("h,d_formalism,d_levy", rows)
                }
            };
            emit(triplet.out.as_deref(), &text)
        }
        Command::Simulate { triplet, dt, n_samples, delta, no_compensation, sim } => {
            let t = load_triplet(&triplet.triplet)?;
            let cfg = SimConfig { truncation_delta: delta, gaussian_compensation: !no_compensation, ..sim.config() };
            let xs = simulate::batch_sample(&t, dt, n_samples, &cfg)?;
            emit(triplet.out.as_deref(), &csv("x", xs.into_iter().map(|x| vec![fmt_csv(x)])))
        }
        Command::Toy { alpha, n, q, samples, sim, out } => {
            let p = ToyModelParams::new(alpha, n)?;
            let exact = estimate::toy_moment_exact(&p, q)?;
            let r = estimate::toy_moment_mc(&p, q, samples, &sim.config())?;
            let report = ToyReport {
                alpha,
                n,
                q,
                exact,
                estimate: r.estimate,
                std_error: r.std_error,
                z_score: (r.estimate - exact) / r.std_error,
                n_samples: r.n_samples,
                seed: r.seed,
            };
            emit(out.as_deref(), &json(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
