//! Command-line scenarios and CSV rendering.
//!
//! Every flag can also be set through an environment variable with the
//! `SPINBOSON_` prefix; explicit flags win over the environment.

use std::f64::consts::FRAC_PI_6;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::acceptance::{run_all, AcceptanceParams};
use crate::closedform::rho12_closed;
use crate::diagnostics::{purity, q_from_joint, q_from_rho};
use crate::dynamics::{evolve_product, reduce, rho_series_field, QubitState};
use crate::error::{Error, Result};
use crate::fock::{default_n_max, uniform_grid, SimConfig};
use crate::oracle::{integrate, OracleConfig};
use crate::pointer::{coincidence_times, g_scalar, initial_pointer_states, pointer_coordinates, pointer_state_at, PointerSign};

#[derive(Debug, Clone, Parser)]
#[command(name = "spinboson", version, about = "Qubit coupled to a resonant bosonic mode: exact dynamics, pointer states and decoherence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Population inversion W(t') (default: upper-level start, t' in [0, 400]).
    Figure1,
    /// Exact and closed-form |rho12| (default: plus-pointer start, t' in [0, 200]).
    Figure2,
    /// Exact and closed-form |rho12| at short times (default: lower-state start, t' in [0, 10]).
    Figure3,
    /// Selected columns over a grid of (nbar, phi) values.
    Sweep(SweepArgs),
    /// Run the acceptance checks and write a pass/fail report.
    Verify,
    /// Pointer-state components, |q(t')| and coincidence times.
    PointerDemo,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Mean photon number of the coherent field.
    #[arg(long, global = true, env = "SPINBOSON_NBAR", default_value_t = 50.0)]
    pub nbar: f64,
    /// Phase of the coherent amplitude, radians.
    #[arg(long, global = true, env = "SPINBOSON_PHI", default_value_t = FRAC_PI_6, allow_hyphen_values = true)]
    pub phi: f64,
    /// Coupling g; times are reported as t' = g t.
    #[arg(long, global = true, env = "SPINBOSON_G", default_value_t = 1.0)]
    pub g: f64,
    /// Fock cutoff (default ceil(nbar + 10 sqrt(nbar) + 10)).
    #[arg(long, global = true, env = "SPINBOSON_NMAX")]
    pub nmax: Option<usize>,
    /// End of the t' grid (scenario default if omitted).
    #[arg(long = "tmax-prime", global = true, env = "SPINBOSON_TMAX_PRIME")]
    pub tmax_prime: Option<f64>,
    /// Number of grid intervals (scenario default if omitted).
    #[arg(long, global = true, env = "SPINBOSON_STEPS")]
    pub steps: Option<usize>,
    /// upper, lower, plus-pointer, minus-pointer or custom:re_a,im_a,re_b,im_b.
    #[arg(long, global = true, env = "SPINBOSON_INITIAL")]
    pub initial: Option<Initial>,
    /// Keep only the rotating-wave terms in the ODE oracle (default).
    #[arg(long, global = true, overrides_with = "no_rwa")]
    pub rwa: bool,
    /// Integrate the full generator, counter-rotating terms included (also SPINBOSON_RWA=false).
    #[arg(long = "no-rwa", global = true, overrides_with = "rwa")]
    pub no_rwa: bool,
    /// Field frequency omega = delta0 for the ODE oracle, same units as g.
    #[arg(long, global = true, env = "SPINBOSON_OMEGA", default_value_t = 50.0)]
    pub omega: f64,
    /// Output file; stdout if omitted.
    #[arg(long, short, global = true, env = "SPINBOSON_OUTPUT")]
    pub output: Option<PathBuf>,
}

impl Options {
    /// `--rwa`/`--no-rwa`, then `SPINBOSON_RWA`, then `true`.
    pub fn rwa(&self) -> Result<bool> {
        if self.rwa {
            return Ok(true);
        }
        if self.no_rwa {
            return Ok(false);
        }
        match std::env::var("SPINBOSON_RWA") {
            Ok(v) => parse_bool(&v).ok_or_else(|| Error::InvalidParameter(format!("SPINBOSON_RWA: not a boolean: {v}"))),
            Err(_) => Ok(true),
        }
    }

    fn n_max_for(&self, nbar: f64) -> usize {
        self.nmax.unwrap_or_else(|| default_n_max(nbar))
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Some(true),
        "0" | "false" | "no" | "off" => Some(false),
        _ => None,
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated nbar values (default: --nbar).
    #[arg(long = "nbar-list", env = "SPINBOSON_NBAR_LIST", value_delimiter = ',')]
    pub nbar_list: Vec<f64>,
    /// Comma-separated phi values (default: --phi).
    #[arg(long = "phi-list", env = "SPINBOSON_PHI_LIST", value_delimiter = ',', allow_hyphen_values = true)]
    pub phi_list: Vec<f64>,
    /// Comma-separated output columns.
    #[arg(long, env = "SPINBOSON_COLUMNS", value_delimiter = ',', default_value = "w,abs_rho12")]
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Column {
    #[value(name = "w")]
    W,
    #[value(name = "rho11")]
    Rho11,
    #[value(name = "re_rho12")]
    ReRho12,
    #[value(name = "im_rho12")]
    ImRho12,
    #[value(name = "abs_rho12")]
    AbsRho12,
    #[value(name = "abs_rho12_closed")]
    AbsRho12Closed,
    #[value(name = "purity")]
    Purity,
    #[value(name = "q_abs")]
    QAbs,
    /// W from the ODE oracle.
    #[value(name = "oracle_w")]
    OracleW,
    /// Max amplitude difference, oracle vs analytic propagator.
    #[value(name = "oracle_diff")]
    OracleDiff,
}

impl Column {
    fn header(self) -> &'static str {
        match self {
            Column::W => "W",
            Column::Rho11 => "rho11",
            Column::ReRho12 => "re_rho12",
            Column::ImRho12 => "im_rho12",
            Column::AbsRho12 => "abs_rho12",
            Column::AbsRho12Closed => "abs_rho12_closed",
            Column::Purity => "purity",
            Column::QAbs => "q_abs",
            Column::OracleW => "oracle_W",
            Column::OracleDiff => "oracle_diff",
        }
    }

    fn needs_oracle(self) -> bool {
        matches!(self, Column::OracleW | Column::OracleDiff)
    }
}

/// Initial qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    Upper,
    Lower,
    PlusPointer,
    MinusPointer,
    Custom(C64, C64),
}

impl Initial {
    pub fn state(self, phi: f64) -> Result<QubitState> {
        let (plus, minus) = initial_pointer_states(phi);
        Ok(match self {
            Initial::Upper => QubitState::upper(),
            Initial::Lower => QubitState::lower(),
            Initial::PlusPointer => plus,
            Initial::MinusPointer => minus,
            Initial::Custom(a, b) => QubitState::normalized(a, b)?,
        })
    }
}

impl FromStr for Initial {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "upper" => Ok(Initial::Upper),
            "lower" => Ok(Initial::Lower),
            "plus-pointer" => Ok(Initial::PlusPointer),
            "minus-pointer" => Ok(Initial::MinusPointer),
            _ => {
                let body = s.strip_prefix("custom:").ok_or_else(|| {
                    format!("unknown initial state '{s}' (upper, lower, plus-pointer, minus-pointer, custom:re_a,im_a,re_b,im_b)")
                })?;
                let v: Vec<f64> = body
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| format!("custom amplitude '{x}': {e}")))
                    .collect::<std::result::Result<_, _>>()?;
                if v.len() != 4 {
                    return Err(format!("custom initial state needs 4 numbers, got {}", v.len()));
                }
                Ok(Initial::Custom(C64::new(v[0], v[1]), C64::new(v[2], v[3])))
            }
        }
    }
}

impl fmt::Display for Initial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Initial::Upper => f.write_str("upper"),
            Initial::Lower => f.write_str("lower"),
            Initial::PlusPointer => f.write_str("plus-pointer"),
            Initial::MinusPointer => f.write_str("minus-pointer"),
            Initial::Custom(a, b) => write!(f, "custom:{},{},{},{}", a.re, a.im, b.re, b.im),
        }
    }
}

/// One rendered CSV; `suffix` distinguishes secondary files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub suffix: Option<&'static str>,
    pub text: String,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Figure1 => "figure1",
            Command::Figure2 => "figure2",
            Command::Figure3 => "figure3",
            Command::Sweep(_) => "sweep",
            Command::Verify => "verify",
            Command::PointerDemo => "pointer-demo",
        }
    }

    /// `(t'_max, steps, initial)` used when the flags are absent.
    fn defaults(&self) -> (f64, usize, Initial) {
        match self {
            Command::Figure1 => (400.0, 4000, Initial::Upper),
            Command::Figure2 => (200.0, 4000, Initial::PlusPointer),
            Command::Figure3 => (10.0, 2000, Initial::Lower),
            Command::Sweep(_) => (10.0, 100, Initial::Upper),
            Command::Verify => (0.0, 0, Initial::Upper),
            Command::PointerDemo => (100.0, 1000, Initial::PlusPointer),
        }
    }
}

/// Resolved scenario parameters.
#[derive(Debug, Clone)]
struct Run {
    scenario: &'static str,
    nbar: f64,
    phi: f64,
    g: f64,
    n_max: usize,
    tmax: f64,
    steps: usize,
    initial: Initial,
    rwa: bool,
    omega: f64,
}

impl Run {
    fn resolve(cli: &Cli) -> Result<Self> {
        let o = &cli.opts;
        let (tmax, steps, initial) = cli.command.defaults();
        let run = Run {
            scenario: cli.command.name(),
            nbar: o.nbar,
            phi: o.phi,
            g: o.g,
            n_max: o.n_max_for(o.nbar),
            tmax: o.tmax_prime.unwrap_or(tmax),
            steps: o.steps.unwrap_or(steps),
            initial: o.initial.unwrap_or(initial),
            rwa: o.rwa()?,
            omega: o.omega,
        };
        if !(run.phi.is_finite()) {
            return Err(Error::InvalidParameter(format!("phi must be finite, got {}", run.phi)));
        }
        if !(run.tmax.is_finite() && run.tmax >= 0.0) {
            return Err(Error::InvalidParameter(format!("--tmax-prime must be non-negative, got {}", run.tmax)));
        }
        if run.steps == 0 && !matches!(cli.command, Command::Verify) {
            return Err(Error::InvalidParameter("--steps must be at least 1".into()));
        }
        Ok(run)
    }

    fn grid(&self) -> Vec<f64> {
        uniform_grid(self.tmax, self.steps)
    }

    fn config(&self) -> Result<SimConfig> {
        SimConfig::new(self.g, self.nbar, self.phi, self.n_max, self.grid())
    }

    fn require_positive_nbar(&self) -> Result<()> {
        if self.nbar > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{} needs nbar > 0, got {}", self.scenario, self.nbar)))
        }
    }

    fn comment(&self) -> String {
        format!(
            "# spinboson {} nbar={} phi={} g={} n_max={} tmax_prime={} steps={} initial={} rwa={} omega={}\n",
            self.scenario, self.nbar, self.phi, self.g, self.n_max, self.tmax, self.steps, self.initial, self.rwa, self.omega
        )
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_row(out: &mut String, cells: &[f64]) {
    let row: Vec<String> = cells.iter().map(|&x| num(x)).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

fn figure1(run: &Run) -> Result<String> {
    let cfg = run.config()?;
    let field = cfg.coherent()?;
    let q = run.initial.state(run.phi)?;
    let w: Vec<f64> = cfg.t_prime_grid.par_iter().map(|&t| 2.0 * rho_series_field(&q, &field, t).rho11 - 1.0).collect();
    let mut out = run.comment();
    out.push_str("t_prime,W\n");
    for (t, w) in cfg.t_prime_grid.iter().zip(w) {
        push_row(&mut out, &[*t, w]);
    }
    Ok(out)
}

fn coherence_figure(run: &Run) -> Result<String> {
    run.require_positive_nbar()?;
    let cfg = run.config()?;
    let field = cfg.coherent()?;
    let q = run.initial.state(run.phi)?;
    let (ap, bp) = pointer_coordinates(&q, run.phi);
    let rows: Vec<(f64, f64)> = cfg
        .t_prime_grid
        .par_iter()
        .map(|&t| {
            let exact = rho_series_field(&q, &field, t).rho12.norm();
            let closed = rho12_closed(ap, bp, run.phi, run.nbar, t).value.norm();
            (exact, closed)
        })
        .collect();
    let mut out = run.comment();
    out.push_str("t_prime,abs_rho12_exact,abs_rho12_closed\n");
    for (t, (e, c)) in cfg.t_prime_grid.iter().zip(rows) {
        push_row(&mut out, &[*t, e, c]);
    }
    Ok(out)
}

fn sweep(run: &Run, args: &SweepArgs, opts: &Options) -> Result<String> {
    let nbars = if args.nbar_list.is_empty() { vec![run.nbar] } else { args.nbar_list.clone() };
    let phis = if args.phi_list.is_empty() { vec![run.phi] } else { args.phi_list.clone() };
    if args.columns.is_empty() {
        return Err(Error::InvalidParameter("--columns is empty".into()));
    }
    let mut out = run.comment();
    let _ = writeln!(
        out,
        "# sweep nbar_list={:?} phi_list={:?} columns={}",
        nbars,
        phis,
        args.columns.iter().map(|c| c.header()).collect::<Vec<_>>().join(";")
    );
    out.push_str("nbar,phi,t_prime");
    for c in &args.columns {
        out.push(',');
        out.push_str(c.header());
    }
    out.push('\n');

    let grid = run.grid();
    for &nbar in &nbars {
        for &phi in &phis {
            let n_max = opts.n_max_for(nbar);
            let cfg = SimConfig::new(run.g, nbar, phi, n_max, grid.clone())?;
            let field = cfg.coherent()?;
            let q = run.initial.state(phi)?;
            if args.columns.contains(&Column::AbsRho12Closed) && !(nbar > 0.0) {
                return Err(Error::InvalidParameter("abs_rho12_closed needs nbar > 0".into()));
            }
            let oracle = if args.columns.iter().any(|c| c.needs_oracle()) {
                let ocfg = OracleConfig::resonant(run.g, run.omega, run.rwa)?;
                Some(integrate(&ocfg, &q, &field, &grid)?.states)
            } else {
                None
            };
            let (ap, bp) = pointer_coordinates(&q, phi);
            let rows: Vec<Vec<f64>> = grid
                .par_iter()
                .enumerate()
                .map(|(i, &t)| -> Result<Vec<f64>> {
                    let rho = reduce(&evolve_product(&q, &field, t)?);
                    let mut row = vec![nbar, phi, t];
                    for c in &args.columns {
                        row.push(match c {
                            Column::W => 2.0 * rho.rho11 - 1.0,
                            Column::Rho11 => rho.rho11,
                            Column::ReRho12 => rho.rho12.re,
                            Column::ImRho12 => rho.rho12.im,
                            Column::AbsRho12 => rho.rho12.norm(),
                            Column::AbsRho12Closed => rho12_closed(ap, bp, phi, nbar, t).value.norm(),
                            Column::Purity => purity(&rho),
                            Column::QAbs => q_from_rho(&rho).unwrap_or(f64::NAN),
                            Column::OracleW => {
                                let s = &oracle.as_ref().expect("oracle run")[i];
                                2.0 * reduce(s).rho11 - 1.0
                            }
                            Column::OracleDiff => {
                                let s = &oracle.as_ref().expect("oracle run")[i];
                                let e = evolve_product(&q, &field, t)?;
                                s.a.max_abs_diff(&e.a)?.max(s.b.max_abs_diff(&e.b)?)
                            }
                        });
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            for r in rows {
                push_row(&mut out, &r);
            }
        }
    }
    Ok(out)
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn verify(run: &Run, opts: &Options) -> Result<String> {
    run.require_positive_nbar()?;
    let mut params = AcceptanceParams::new(run.nbar, run.phi);
    // only an explicit --nmax replaces the acceptance truncation
    if let Some(n) = opts.nmax {
        params.n_max = n;
    }
    let results = run_all(&params)?;
    let mut out = format!(
        "# spinboson verify nbar={} phi={} n_max={} seed={}\n",
        params.nbar, params.phi, params.n_max, params.seed
    );
    out.push_str("id,name,passed,measured,threshold,detail\n");
    for r in &results {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.id, csv_quote(r.name), r.passed, num(r.measured), num(r.threshold), csv_quote(&r.detail));
    }
    Ok(out)
}

fn pointer_demo(run: &Run) -> Result<Vec<Output>> {
    run.require_positive_nbar()?;
    let cfg = run.config()?;
    let field = cfg.coherent()?;
    let q = run.initial.state(run.phi)?;
    let sign = if run.initial == Initial::MinusPointer { PointerSign::Minus } else { PointerSign::Plus };
    let rows: Vec<Vec<f64>> = cfg
        .t_prime_grid
        .par_iter()
        .map(|&t| -> Result<Vec<f64>> {
            let p = pointer_state_at(run.phi, run.nbar, t, PointerSign::Plus);
            let m = pointer_state_at(run.phi, run.nbar, t, PointerSign::Minus);
            let joint = evolve_product(&q, &field, t)?;
            let q_rho = q_from_rho(&reduce(&joint)).unwrap_or(f64::NAN);
            let q_joint = match g_scalar(run.phi, run.nbar, t, sign) {
                Ok(g) => q_from_joint(&joint, g, run.nbar).map(|r| r.q_abs).unwrap_or(f64::NAN),
                Err(_) => f64::NAN,
            };
            Ok(vec![
                t, p.alpha.re, p.alpha.im, p.beta.re, p.beta.im, m.alpha.re, m.alpha.im, m.beta.re, m.beta.im, q_rho, q_joint,
            ])
        })
        .collect::<Result<_>>()?;
    let mut main = run.comment();
    main.push_str("t_prime,plus_a_re,plus_a_im,plus_b_re,plus_b_im,minus_a_re,minus_a_im,minus_b_re,minus_b_im,q_rho,q_joint\n");
    for r in rows {
        push_row(&mut main, &r);
    }

    let period = std::f64::consts::PI * run.nbar.sqrt();
    let k_max = (((run.tmax / period) + 1.0) / 2.0).floor().max(1.0) as usize;
    let mut coin = run.comment();
    coin.push_str("k,t_prime,alpha_re,alpha_im,beta_re,beta_im\n");
    for (k, (t, s)) in coincidence_times(run.phi, run.nbar, k_max)?.into_iter().enumerate() {
        let _ = write!(coin, "{k},");
        push_row(&mut coin, &[t, s.alpha.re, s.alpha.im, s.beta.re, s.beta.im]);
    }
    Ok(vec![Output { suffix: None, text: main }, Output { suffix: Some("coincidences"), text: coin }])
}

/// Renders every CSV the command produces, without touching the filesystem.
pub fn render(cli: &Cli) -> Result<Vec<Output>> {
    let run = Run::resolve(cli)?;
    let single = |text| Ok(vec![Output { suffix: None, text }]);
    match &cli.command {
        Command::Figure1 => single(figure1(&run)?),
        Command::Figure2 | Command::Figure3 => single(coherence_figure(&run)?),
        Command::Sweep(args) => single(sweep(&run, args, &cli.opts)?),
        Command::Verify => single(verify(&run, &cli.opts)?),
        Command::PointerDemo => pointer_demo(&run),
    }
}

/// `out.csv` + `coincidences` -> `out_coincidences.csv`.
pub fn suffixed_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

/// Renders and writes the outputs to `--output` (or stdout).
pub fn execute(cli: &Cli) -> Result<()> {
    let outputs = render(cli)?;
    match &cli.opts.output {
        Some(path) => {
            for o in &outputs {
                let target = match o.suffix {
                    Some(s) => suffixed_path(path, s),
                    None => path.clone(),
                };
                std::fs::write(&target, &o.text)?;
            }
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            for (i, o) in outputs.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout)?;
                }
                stdout.write_all(o.text.as_bytes())?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("spinboson").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn initial_parsing() {
        assert_eq!("upper".parse::<Initial>().unwrap(), Initial::Upper);
        assert_eq!("minus-pointer".parse::<Initial>().unwrap(), Initial::MinusPointer);
        let c = "custom:1,0,0,1".parse::<Initial>().unwrap();
        assert_eq!(c, Initial::Custom(C64::new(1.0, 0.0), C64::new(0.0, 1.0)));
        let q = c.state(0.0).unwrap();
        assert!((q.norm_sqr() - 1.0).abs() < 1e-15);
        assert!("custom:1,2".parse::<Initial>().is_err());
        assert!("sideways".parse::<Initial>().is_err());
        assert_eq!(c.to_string().parse::<Initial>().unwrap(), c);
    }

    #[test]
    fn figure1_starts_at_one() {
        let out = render(&parse(&["figure1", "--steps", "10", "--tmax-prime", "5"])).unwrap();
        let text = &out[0].text;
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# spinboson figure1 nbar=50 "));
        assert_eq!(lines.next().unwrap(), "t_prime,W");
        assert_eq!(lines.next().unwrap(), "0.0000000000000000e0,1.0000000000000000e0");
        assert_eq!(text.lines().count(), 13);
    }

    #[test]
    fn figure_defaults() {
        let r = Run::resolve(&parse(&["figure2"])).unwrap();
        assert_eq!((r.tmax, r.steps, r.initial), (200.0, 4000, Initial::PlusPointer));
        let r = Run::resolve(&parse(&["figure3"])).unwrap();
        assert_eq!((r.tmax, r.steps, r.initial), (10.0, 2000, Initial::Lower));
        assert_eq!(r.n_max, default_n_max(50.0));
        let r = Run::resolve(&parse(&["figure1", "--initial", "lower", "--nmax", "160"])).unwrap();
        assert_eq!((r.tmax, r.initial, r.n_max), (400.0, Initial::Lower, 160));
    }

    #[test]
    fn rwa_flags_override_each_other() {
        assert!(!parse(&["sweep", "--no-rwa"]).opts.rwa().unwrap());
        assert!(parse(&["sweep", "--no-rwa", "--rwa"]).opts.rwa().unwrap());
        assert!(!parse(&["sweep", "--rwa", "--no-rwa"]).opts.rwa().unwrap());
    }

    #[test]
    fn bad_values_are_usage_errors() {
        assert!(Cli::try_parse_from(["spinboson", "figure1", "--initial", "nope"]).is_err());
        assert!(Cli::try_parse_from(["spinboson", "bogus"]).is_err());
        let e = render(&parse(&["figure1", "--nmax", "20"])).unwrap_err();
        assert!(!e.is_numerical_guard(), "{e}");
        let e = render(&parse(&["figure2", "--nbar", "0"])).unwrap_err();
        assert!(matches!(e, Error::InvalidParameter(_)));
        let e = render(&parse(&["figure1", "--steps", "0"])).unwrap_err();
        assert!(matches!(e, Error::InvalidParameter(_)));
    }

    #[test]
    fn sweep_columns() {
        let cli = parse(&["sweep", "--nbar-list", "10,20", "--phi-list", "0,0.5", "--columns", "w,purity,q_abs", "--steps", "4", "--tmax-prime", "2"]);
        let text = &render(&cli).unwrap()[0].text;
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "nbar,phi,t_prime,W,purity,q_abs");
        assert_eq!(lines.len(), 3 + 2 * 2 * 5);
        assert!(lines[3].starts_with("1.0000000000000000e1,0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0,"));
        assert!(Cli::try_parse_from(["spinboson", "sweep", "--columns", "nonsense"]).is_err());
    }

    #[test]
    fn pointer_demo_outputs() {
        let out = render(&parse(&["pointer-demo", "--steps", "20", "--tmax-prime", "70"])).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].suffix, Some("coincidences"));
        let coin: Vec<&str> = out[1].text.lines().collect();
        // pi sqrt(50) = 22.2, 3 pi sqrt(50) = 66.6
        assert_eq!(coin.len(), 2 + 2);
        assert!(coin[2].starts_with("0,2.2214414690791831e1,"));
    }

    #[test]
    fn suffix_paths() {
        assert_eq!(suffixed_path(Path::new("/tmp/out.csv"), "coincidences"), PathBuf::from("/tmp/out_coincidences.csv"));
        assert_eq!(suffixed_path(Path::new("out"), "x"), PathBuf::from("out_x"));
    }
}
