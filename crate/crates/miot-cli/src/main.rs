//! `miot` — transmission spectra, peak analysis and sensitivity sweeps for
//! the Raman-dressed atom-cavity model.
//!
//! Exit codes: 0 ok, 2 parse error, 3 parameter validation error, 4 no MIOT
//! peak, 5 numeric failure.

mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use miot_core::analysis;
use miot_core::error::Error as CoreError;
use miot_core::linalg::C64;
use miot_core::params::{validate, PhysicalParams, RawParams};
use miot_core::selection::{self, Polarization};
use miot_core::spectrum::{sample, Grid};
use miot_core::{eigenmodes, TAU};
use rayon::prelude::*;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "miot", version, about = "MIOT atom-cavity transmission toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Output format; spectra and sweeps default to csv, reports to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Transmission spectrum P_T(δ_p) on a uniform probe-detuning grid.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        /// Grid start, frequency with unit suffix (Hz/kHz/MHz).
        #[arg(long, default_value = "-4MHz")]
        dp_min: String,
        /// Grid end.
        #[arg(long, default_value = "4MHz")]
        dp_max: String,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Also write a gnuplot script next to the CSV (requires --out).
        #[arg(long)]
        plot: bool,
        #[command(flatten)]
        common: Common,
    },
    /// MIOT peak report: position, height, FWHM, Rabi peak pair.
    Peak {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Pulling coefficients c_c, c_t, c_r by finite differences.
    Pulling {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Peak analysis swept along one parameter axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter to sweep: g_alpha | g_beta | Delta | Omega_N | kappa | gamma | Gamma_S.
        #[arg(long)]
        axis: String,
        /// lo:hi:n[:log]; lo/hi accept unit suffixes.
        #[arg(long)]
        range: String,
        /// Worker threads (default: all cores). Output is identical for any value.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of the drive-free mode matrix and the dark-mode pick.
    Eigen {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Dipole selection-rule table for a probe polarization.
    Selection {
        #[arg(long, value_enum, default_value_t = Pol::X)]
        pol: Pol,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pol {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl From<Pol> for Polarization {
    fn from(p: Pol) -> Polarization {
        match p {
            Pol::X => Polarization::X,
            Pol::Y => Polarization::Y,
            Pol::Z => Polarization::Z,
            Pol::Plus => Polarization::Plus,
            Pol::Minus => Polarization::Minus,
        }
    }
}

enum CliError {
    Parse(String),
    Io(String),
    Core(CoreError),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<config::ParseError> for CliError {
    fn from(e: config::ParseError) -> Self {
        CliError::Parse(e.0)
    }
}

impl CliError {
    fn report(&self) -> (String, u8) {
        match self {
            CliError::Parse(m) => (m.clone(), 2),
            CliError::Io(m) => (m.clone(), 2),
            CliError::Core(e) => {
                let code = match e {
                    CoreError::NoPeak => 4,
                    CoreError::SingularSystem
                    | CoreError::StepTooLarge { .. }
                    | CoreError::ConvergenceFailure
                    | CoreError::BracketFailure => 5,
                    _ => 3,
                };
                (format!("{e}"), code)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (msg, code) = e.report();
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load_params(path: &Path) -> Result<(RawParams, PhysicalParams), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let raw = config::parse(&text)?;
    let params = validate(&raw)?;
    Ok((raw, params))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn hz(omega: f64) -> f64 {
    omega / TAU
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Spectrum {
            config,
            dp_min,
            dp_max,
            points,
            plot,
            common,
        } => cmd_spectrum(&config, &dp_min, &dp_max, points, plot, &common),
        Cmd::Peak { config, common } => cmd_peak(&config, &common),
        Cmd::Pulling { config, common } => cmd_pulling(&config, &common),
        Cmd::Sweep {
            config,
            axis,
            range,
            jobs,
            common,
        } => cmd_sweep(&config, &axis, &range, jobs, &common),
        Cmd::Eigen { config, common } => cmd_eigen(&config, &common),
        Cmd::Selection { pol, common } => cmd_selection(pol, &common),
    }
}

fn cmd_spectrum(
    config: &Path,
    dp_min: &str,
    dp_max: &str,
    points: usize,
    plot: bool,
    common: &Common,
) -> Result<(), CliError> {
    let (_, params) = load_params(config)?;
    let min = config::parse_freq_flag(dp_min)?;
    let max = config::parse_freq_flag(dp_max)?;
    if !(max > min) {
        return Err(CliError::Parse("--dp-max must exceed --dp-min".into()));
    }
    if points < 1 {
        return Err(CliError::Parse("--points must be at least 1".into()));
    }
    let spec = sample(
        &params,
        Grid {
            min,
            max,
            count: points,
            refine: false,
        },
    )?;

    let body = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("delta_p_Hz,P_T\n");
            for (dp, pt) in &spec.points {
                s.push_str(&format!("{},{}\n", hz(*dp), pt));
            }
            s
        }
        Format::Json => {
            let pts: Vec<_> = spec
                .points
                .iter()
                .map(|(dp, pt)| json!({"delta_p_Hz": hz(*dp), "P_T": pt}))
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "params_hash": format!("{:016x}", spec.params_hash),
                "points": pts,
            }))
            .unwrap();
            s.push('\n');
            s
        }
    };
    emit(&common.out, &body)?;

    if plot {
        let Some(out) = &common.out else {
            return Err(CliError::Parse("--plot requires --out".into()));
        };
        let script_path = out.with_extension("gp");
        let script = plot_script(out);
        std::fs::write(&script_path, script)
            .map_err(|e| CliError::Io(format!("{}: {e}", script_path.display())))?;
    }
    Ok(())
}

fn plot_script(csv: &Path) -> String {
    format!(
        "set datafile separator ','\n\
         set xlabel 'probe detuning delta_p / 2pi (Hz)'\n\
         set ylabel 'transmitted power fraction P_T'\n\
         set grid\n\
         set key off\n\
         plot '{}' every ::1 using 1:2 with lines lw 2\n",
        csv.display()
    )
}

fn cmd_peak(config: &Path, common: &Common) -> Result<(), CliError> {
    let (_, params) = load_params(config)?;
    let rep = analysis::peak_report(&params, None)?;
    let body = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let rabi = rep
                .rabi_peaks
                .map(|(l, r)| json!([hz(l), hz(r)]))
                .unwrap_or(serde_json::Value::Null);
            let mut s = serde_json::to_string_pretty(&json!({
                "position_Hz": hz(rep.position),
                "height": rep.height,
                "fwhm_Hz": hz(rep.fwhm),
                "rabi_peaks_Hz": rabi,
                "search_window_Hz": [hz(rep.search_window.0), hz(rep.search_window.1)],
                "evaluations": rep.evaluations,
                "tolerance_Hz": hz(rep.tolerance),
            }))
            .unwrap();
            s.push('\n');
            s
        }
        Format::Csv => {
            let (l, r) = rep
                .rabi_peaks
                .map(|(l, r)| (format!("{}", hz(l)), format!("{}", hz(r))))
                .unwrap_or_default();
            format!(
                "position_Hz,height,fwhm_Hz,rabi_minus_Hz,rabi_plus_Hz\n{},{},{},{l},{r}\n",
                hz(rep.position),
                rep.height,
                hz(rep.fwhm),
            )
        }
    };
    emit(&common.out, &body)
}

fn cmd_pulling(config: &Path, common: &Common) -> Result<(), CliError> {
    let (_, params) = load_params(config)?;
    let rep = analysis::pulling(&params)?;
    let body = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "c_c": rep.c_c,
                "c_t": rep.c_t,
                "c_r": rep.c_r,
                "approx_c_c": rep.approx_c_c,
                "approx_c_t": rep.approx_c_t,
                "approx_c_r": rep.approx_c_r,
                "step_Hz": hz(rep.steps[0]),
            }))
            .unwrap();
            s.push('\n');
            s
        }
        Format::Csv => format!(
            "c_c,c_t,c_r,approx_c_c,approx_c_t,approx_c_r\n{},{},{},{},{},{}\n",
            rep.c_c, rep.c_t, rep.c_r, rep.approx_c_c, rep.approx_c_t, rep.approx_c_r
        ),
    };
    emit(&common.out, &body)
}

struct SweepRow {
    value: f64,
    eta: f64,
    fwhm: f64,
    fwhm_approx: f64,
    height: f64,
    height_approx: f64,
    c_c: f64,
    c_t: f64,
    c_r: f64,
}

fn sweep_values(range: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(CliError::Parse(format!(
            "bad --range '{range}', expected lo:hi:n[:log]"
        )));
    }
    let lo = config::parse_freq_flag(parts[0])?;
    let hi = config::parse_freq_flag(parts[1])?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Parse(format!("bad count in --range '{range}'")))?;
    if n < 1 {
        return Err(CliError::Parse("--range count must be at least 1".into()));
    }
    let log = match parts.get(3) {
        None => false,
        Some(&"log") => true,
        Some(other) => {
            return Err(CliError::Parse(format!("bad --range scale '{other}'")));
        }
    };
    if log && !(lo > 0.0 && hi > 0.0) {
        return Err(CliError::Parse(
            "log range requires strictly positive endpoints".into(),
        ));
    }
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let t = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
        values.push(if log {
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        } else {
            lo + t * (hi - lo)
        });
    }
    Ok(values)
}

fn apply_axis(raw: &RawParams, axis: &str, value: f64) -> Result<RawParams, CliError> {
    let mut r = raw.clone();
    match axis {
        "g_alpha" => r.g_alpha = C64::new(value, 0.0),
        "g_beta" => r.g_beta = C64::new(value, 0.0),
        "Delta" => {
            r.delta = Some(value);
            r.mu = None;
            r.b_field = None;
        }
        "Omega_N" => r.omega_n = value,
        "kappa" => r.kappa = value,
        "gamma" => r.gamma = value,
        "Gamma_S" => r.gamma_s = value,
        other => {
            return Err(CliError::Parse(format!("unknown sweep axis '{other}'")));
        }
    }
    Ok(r)
}

fn sweep_point(raw: &RawParams, axis: &str, value: f64) -> Result<SweepRow, CliError> {
    let r = apply_axis(raw, axis, value)?;
    let p = validate(&r)?;
    let d = p.derived();
    let peak = analysis::find_peak(&p, None)?;
    let width = analysis::fwhm(&p, peak)?;
    let pull = analysis::pulling(&p)?;
    Ok(SweepRow {
        value,
        eta: d.eta,
        fwhm: width,
        fwhm_approx: analysis::width_approx(&p),
        height: peak.height,
        height_approx: analysis::height_approx(&p),
        c_c: pull.c_c,
        c_t: pull.c_t,
        c_r: pull.c_r,
    })
}

fn cmd_sweep(
    config: &Path,
    axis: &str,
    range: &str,
    jobs: Option<usize>,
    common: &Common,
) -> Result<(), CliError> {
    let (raw, _) = load_params(config)?;
    apply_axis(&raw, axis, 0.0)?; // reject bad axis names before computing
    let values = sweep_values(range)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Parse(format!("--jobs: {e}")))?;
    // Indexed parallel map; emission below is in index order, so the output
    // is byte-identical for any worker count.
    let results: Vec<Result<SweepRow, CliError>> = pool.install(|| {
        values
            .par_iter()
            .map(|&v| sweep_point(&raw, axis, v))
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }

    let body = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!(
                "{axis}_Hz,eta,fwhm_Hz,fwhm_approx_Hz,height,height_approx,c_c,c_t,c_r\n"
            );
            for row in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    hz(row.value),
                    row.eta,
                    hz(row.fwhm),
                    hz(row.fwhm_approx),
                    row.height,
                    row.height_approx,
                    row.c_c,
                    row.c_t,
                    row.c_r
                ));
            }
            s
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|row| {
                    json!({
                        format!("{axis}_Hz"): hz(row.value),
                        "eta": row.eta,
                        "fwhm_Hz": hz(row.fwhm),
                        "fwhm_approx_Hz": hz(row.fwhm_approx),
                        "height": row.height,
                        "height_approx": row.height_approx,
                        "c_c": row.c_c,
                        "c_t": row.c_t,
                        "c_r": row.c_r,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&items).unwrap();
            s.push('\n');
            s
        }
    };
    emit(&common.out, &body)
}

fn cmd_eigen(config: &Path, common: &Common) -> Result<(), CliError> {
    let (_, params) = load_params(config)?;
    let dec = eigenmodes::decompose(&params)?;
    let body = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let vals: Vec<_> = dec
                .eigenvalues
                .iter()
                .map(|l| json!({"re_Hz": hz(l.re), "im_Hz": hz(l.im)}))
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "eigenvalues": vals,
                "dark_index": dec.dark_index,
                "dark_linewidth_Hz": hz(dec.dark_linewidth()),
                "dark_position_Hz": hz(dec.peak_position(dec.dark_index)),
            }))
            .unwrap();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("index,re_Hz,im_Hz,is_dark\n");
            for (k, l) in dec.eigenvalues.iter().enumerate() {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    k,
                    hz(l.re),
                    hz(l.im),
                    (k == dec.dark_index) as u8
                ));
            }
            s
        }
    };
    emit(&common.out, &body)
}

fn axis_name(a: miot_core::selection::Axis) -> &'static str {
    match a {
        miot_core::selection::Axis::X => "x",
        miot_core::selection::Axis::Y => "y",
        miot_core::selection::Axis::Z => "z",
    }
}

fn cmd_selection(pol: Pol, common: &Common) -> Result<(), CliError> {
    let rep = selection::selection_table(pol.into());
    let body = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let entries: Vec<_> = rep
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "initial": axis_name(e.initial),
                        "m_final": e.m_final,
                        "re": e.value.re,
                        "im": e.value.im,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "polarization": format!("{:?}", rep.polarization).to_lowercase(),
                "entries": entries,
                "rules_hold": rep.rules_hold,
                "failures": rep.failures,
            }))
            .unwrap();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("initial,m_final,re,im\n");
            for e in &rep.entries {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    axis_name(e.initial),
                    e.m_final,
                    e.value.re,
                    e.value.im
                ));
            }
            s
        }
    };
    emit(&common.out, &body)
}
