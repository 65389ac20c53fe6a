//! Command-line experiment runner.
//!
//! Every subcommand writes one table, as CSV (a `#` provenance line, a
//! header, then rows) or as JSON with the same field names. `--assert`
//! turns the run into a pass/fail check against the acceptance thresholds.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::conjecture::{conjecture_form, stability_spectrum, ConstantSign};
use crate::continuum::{
    convergence_order, dispersion, lemma_scaling_check, strictly_decreasing, symbol_limit_check,
};
use crate::decouple::{char_poly_stencils, degeneracy_probe, recurrence_step, residual, ProbeConfig, SampleKind};
use crate::error::{QwError, Result};
use crate::lattice::{plane_wave, random_field, Field, Grid, SeededRng};
use crate::tensoralg::{dirac_rep, pauli, CMat};
use crate::walks::WalkKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Thresholds applied by `--assert`.
pub mod thresholds {
    use crate::walks::WalkKind;

    pub fn residual(kind: WalkKind) -> f64 {
        match kind {
            WalkKind::Dirac2 | WalkKind::Weyl3 => 1e-12,
            WalkKind::Dirac3 => 1e-10,
        }
    }
    pub const MIN_SLOPE: f64 = 0.9;
    pub const DISPERSION_EXACT: f64 = 1e-12;
    pub const PHASE_PRODUCT: f64 = 1e-10;
    pub const LEMMA_PAULI_EPS: f64 = 0.05;
    pub const LEMMA_PAULI_TOL: f64 = 0.05;
    pub const GENERIC_FRACTION: f64 = 0.95;
    pub const MODE_MODULUS: f64 = 1.0 + 1e-12;
}

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Decoupled quantum walk experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Exit with status 1 if any acceptance threshold is violated.
    #[arg(long)]
    assert: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Residual of the decoupled recurrence along a walk trajectory.
    DecoupleResidual {
        #[arg(long)]
        walk: String,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long)]
        eps: f64,
        /// Sites per axis, `N` or `N1,N2[,N3]`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Start from a plane wave with this momentum instead of a random field.
        #[arg(long)]
        k: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenfrequencies of the walk symbol against the continuum branches.
    Dispersion {
        #[arg(long)]
        walk: String,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long)]
        eps: f64,
        /// Number of random Brillouin-zone momenta.
        #[arg(long, default_value_t = 0)]
        ksamples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Extra explicit momenta, `kx,ky[,kz]`; may be repeated.
        #[arg(long)]
        k: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Symbol of the decoupled form against its continuum target over eps.
    Convergence {
        #[arg(long)]
        walk: String,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long)]
        k: String,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        eps_list: String,
        #[command(flatten)]
        output: Output,
    },
    /// Determinant scaling of `Id - prod exp(-eps alpha_i A_i)`.
    LemmaCheck {
        #[arg(long)]
        dim: usize,
        /// Coefficients `a1,a2,a3`; drawn uniformly from [-1, 1) with `--seed` when omitted.
        #[arg(long = "A")]
        a: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        eps_list: String,
        #[command(flatten)]
        output: Output,
    },
    /// The corner-stencil two-step scheme: limit, constants and mode stability.
    ConjectureCheck {
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long)]
        eps_list: String,
        #[arg(long, value_enum, default_value = "off")]
        literal_sign: Switch,
        #[arg(long, default_value = "0.5,0.3,0.2")]
        k: String,
        #[arg(long, default_value_t = 0.9)]
        omega: f64,
        /// Number of random momenta in the mode-stability scan.
        #[arg(long, default_value_t = 500)]
        modes: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Optional file for the per-momentum table `k1,k2,k3,a_re,a_im,maxmod`.
        #[arg(long)]
        modes_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalue multiplicity patterns across the Brillouin zone.
    Degeneracy {
        #[arg(long)]
        walk: String,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = crate::decouple::DEGENERACY_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone)]
enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
            Cell::Bool(b) => serde_json::Value::from(*b),
        }
    }
}

fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&x.abs()) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A named-column table plus the pass/fail checks collected while
/// building it.
#[derive(Debug, Default)]
struct Report {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    checks: Vec<(String, bool)>,
    notes: Vec<String>,
}

impl Report {
    fn new(header: &[&'static str]) -> Self {
        Report {
            header: header.to_vec(),
            ..Default::default()
        }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn render(&self, provenance: &str, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = String::new();
                let _ = writeln!(s, "# {provenance}");
                let _ = writeln!(s, "{}", self.header.join(","));
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                s
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: serde_json::Map<String, serde_json::Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let doc = serde_json::json!({ "provenance": provenance, "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON serialization");
                s.push('\n');
                s
            }
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| QwError::Parse(format!("malformed number '{t}' in '{s}'")))
        })
        .collect()
}

fn parse_momentum(s: &str, n: usize) -> Result<Vec<f64>> {
    let k = parse_list(s)?;
    if k.len() != n {
        return Err(QwError::Parse(format!(
            "momentum '{s}' has {} components, expected {n}",
            k.len()
        )));
    }
    Ok(k)
}

fn parse_grid(s: &str, n: usize) -> Result<Vec<usize>> {
    let sizes: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| QwError::Parse(format!("malformed grid size '{t}'")))
        })
        .collect::<Result<_>>()?;
    match sizes.len() {
        1 => Ok(vec![sizes[0]; n]),
        len if len == n => Ok(sizes),
        len => Err(QwError::Parse(format!("grid has {len} axes, walk needs {n}"))),
    }
}

fn padded_k(k: &[f64]) -> [Cell; 3] {
    let get = |i: usize| Cell::Num(k.get(i).copied().unwrap_or(0.0));
    [get(0), get(1), get(2)]
}

fn slope_checks(report: &mut Report, errs: &[(f64, f64)]) {
    report.check("errors strictly decreasing in eps", strictly_decreasing(errs));
    match convergence_order(errs) {
        Ok(slope) => {
            report.notes.push(format!("log-log slope {slope:.4}"));
            report.check(
                format!("slope {slope:.4} >= {}", thresholds::MIN_SLOPE),
                slope >= thresholds::MIN_SLOPE,
            );
        }
        Err(e) => {
            report.notes.push(format!("slope unavailable: {e}"));
            report.check("slope computable", false);
        }
    }
}

fn decouple_residual_cmd(
    walk: &str,
    mass: f64,
    eps: f64,
    grid: &str,
    steps: usize,
    seed: u64,
    k: Option<&str>,
) -> Result<Report> {
    let kind: WalkKind = walk.parse()?;
    let w = kind.build(kind.effective_mass(mass), eps)?;
    let grid = Grid::new(&parse_grid(grid, kind.ndim())?, eps)?;
    let f0 = match k {
        Some(k) => {
            let k = parse_momentum(k, kind.ndim())?;
            let mut v = vec![Complex64::new(0.0, 0.0); kind.components()];
            v[0] = Complex64::new(1.0, 0.0);
            plane_wave(&k, &v, &grid)?
        }
        None => random_field(seed, &grid, kind.components()),
    };
    let dec = char_poly_stencils(&w.stencil)?;
    let res = residual(&w.stencil, &dec, &f0, steps)?;
    let mut report = Report::new(&["step", "residual"]);
    for (t, r) in res.iter().enumerate() {
        report.rows.push(vec![Cell::Int(t as i64), Cell::Num(*r)]);
    }
    let max = res.iter().copied().fold(0.0, f64::max);
    let tol = thresholds::residual(kind);
    report.notes.push(format!("max residual {max:e}"));
    report.check(format!("max residual {max:e} <= {tol:e}"), max <= tol);
    Ok(report)
}

fn dispersion_cmd(
    walk: &str,
    mass: f64,
    eps: f64,
    ksamples: usize,
    seed: u64,
    explicit: &[String],
) -> Result<Report> {
    let kind: WalkKind = walk.parse()?;
    let m = kind.effective_mass(mass);
    let w = kind.build(m, eps)?;
    let n = kind.ndim();
    let mut rng = SeededRng::new(seed);
    let mut ks: Vec<Vec<f64>> = (0..ksamples).map(|_| rng.brillouin(n, eps)).collect();
    for s in explicit {
        ks.push(parse_momentum(s, n)?);
    }
    if ks.is_empty() {
        return Err(QwError::Invalid("no momenta: pass --ksamples and/or --k".into()));
    }
    let table = dispersion(&w.stencil, m, &ks)?;
    let mut report = Report::new(&["k1", "k2", "k3", "branch", "omega_eps", "omega_cont", "abs_err"]);
    for row in &table.rows {
        let mut cells: Vec<Cell> = padded_k(&row.k).into();
        cells.extend([
            Cell::Int(row.branch as i64),
            Cell::Num(row.omega_eps),
            Cell::Num(row.omega_cont),
            Cell::Num(row.abs_err),
        ]);
        report.rows.push(cells);
    }

    let d = kind.components();
    let mut worst_product = 0.0f64;
    for chunk in table.rows.chunks(d) {
        let phase: f64 = chunk.iter().map(|r| r.omega_eps * eps).sum();
        worst_product = worst_product.max((Complex64::from_polar(1.0, -phase) - 1.0).norm());
    }
    report.check(
        format!("eigenvalue product deviation {worst_product:e} <= {:e}", thresholds::PHASE_PRODUCT),
        worst_product <= thresholds::PHASE_PRODUCT,
    );
    match kind {
        WalkKind::Dirac2 => {
            let (sm, cm) = (m * eps).sin_cos();
            let worst = table
                .rows
                .iter()
                .map(|r| {
                    let (s1, c1) = (r.k[0] * eps).sin_cos();
                    let (s2, c2) = (r.k[1] * eps).sin_cos();
                    ((r.omega_eps * eps).cos() - (cm * c1 * c2 + sm * s1 * s2)).abs()
                })
                .fold(0.0, f64::max);
            report.check(
                format!("closed-form cos identity deviation {worst:e} <= {:e}", thresholds::DISPERSION_EXACT),
                worst <= thresholds::DISPERSION_EXACT,
            );
        }
        WalkKind::Weyl3 => {
            let worst = table
                .rows
                .iter()
                .filter(|r| r.k.iter().filter(|x| **x != 0.0).count() <= 1)
                .map(|r| r.abs_err)
                .fold(0.0, f64::max);
            report.check(
                format!("on-axis dispersion error {worst:e} <= {:e}", thresholds::DISPERSION_EXACT),
                worst <= thresholds::DISPERSION_EXACT,
            );
        }
        WalkKind::Dirac3 => {}
    }
    Ok(report)
}

fn convergence_cmd(walk: &str, mass: f64, k: &str, omega: f64, eps_list: &str) -> Result<Report> {
    let kind: WalkKind = walk.parse()?;
    let m = kind.effective_mass(mass);
    let k = parse_momentum(k, kind.ndim())?;
    let eps_list = parse_list(eps_list)?;
    let errs = symbol_limit_check(
        |eps| char_poly_stencils(&kind.build(m, eps)?.stencil),
        omega,
        &k,
        m,
        &eps_list,
    )?;
    let mut report = Report::new(&["eps", "error"]);
    for (eps, e) in &errs {
        report.rows.push(vec![Cell::Num(*eps), Cell::Num(*e)]);
    }
    slope_checks(&mut report, &errs);
    Ok(report)
}

fn lemma_cmd(dim: usize, a: Option<&str>, seed: u64, eps_list: &str) -> Result<Report> {
    let alphas: Vec<CMat> = match dim {
        2 => (1..=3).map(pauli).collect::<Result<_>>()?,
        4 => dirac_rep().alpha.to_vec(),
        other => return Err(QwError::UnsupportedDim(other)),
    };
    let a = match a {
        Some(s) => parse_momentum(s, 3)?,
        None => {
            let mut rng = SeededRng::new(seed);
            (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect()
        }
    };
    let eps_list = parse_list(eps_list)?;
    let rows = lemma_scaling_check(&alphas, &a, &eps_list)?;
    let mut report = Report::new(&["eps", "ratio_re", "ratio_im", "target_re", "target_im", "abs_err"]);
    for r in &rows {
        report.rows.push(vec![
            Cell::Num(r.eps),
            Cell::Num(r.ratio.re),
            Cell::Num(r.ratio.im),
            Cell::Num(r.target.re),
            Cell::Num(r.target.im),
            Cell::Num(r.abs_err),
        ]);
    }
    report.notes.push(format!("A = {a:?}"));
    let errs: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.abs_err)).collect();
    if errs.iter().all(|(_, e)| *e == 0.0) {
        report.check("ratio equals target to round-off", true);
    } else {
        slope_checks(&mut report, &errs);
    }
    for r in rows.iter().filter(|r| r.eps <= thresholds::LEMMA_PAULI_EPS) {
        report.check(
            format!("|ratio - target| = {:e} <= {} at eps = {}", r.abs_err, thresholds::LEMMA_PAULI_TOL, r.eps),
            r.abs_err <= thresholds::LEMMA_PAULI_TOL,
        );
    }
    Ok(report)
}

/// One recurrence step on a constant dyadic field at `m = 0`; returns the
/// largest deviation from the constant.
fn constant_field_defect(eps: f64, sign: ConstantSign) -> Result<f64> {
    let grid = Grid::new(&[4, 4, 4], eps)?;
    let f = Field::constant(&grid, &[Complex64::new(0.75, -0.5)]);
    let dec = conjecture_form(0.0, eps, sign)?;
    let next = recurrence_step(&dec, &[f.clone(), f.clone()])?;
    Ok(next.sub(&f)?.max_abs())
}

#[allow(clippy::too_many_arguments)]
fn conjecture_cmd(
    mass: f64,
    eps_list: &str,
    literal: bool,
    k: &str,
    omega: f64,
    modes: usize,
    seed: u64,
) -> Result<(Report, Report)> {
    let sign = if literal {
        ConstantSign::Literal
    } else {
        ConstantSign::Corrected
    };
    let eps_list = parse_list(eps_list)?;
    let k = parse_momentum(k, 3)?;
    let errs = symbol_limit_check(|eps| conjecture_form(mass, eps, sign), omega, &k, mass, &eps_list)?;
    let mut report = Report::new(&["eps", "error"]);
    for (eps, e) in &errs {
        report.rows.push(vec![Cell::Num(*eps), Cell::Num(*e)]);
    }
    let eps0 = *eps_list
        .first()
        .ok_or_else(|| QwError::Invalid("empty eps list".into()))?;
    let defect = constant_field_defect(eps0, sign)?;
    report.notes.push(format!("constant-field defect {defect:e}"));
    report.check(format!("constant field preserved exactly (defect {defect:e})"), defect == 0.0);
    slope_checks(&mut report, &errs);

    let mut rng = SeededRng::new(seed);
    let ks: Vec<Vec<f64>> = (0..modes).map(|_| rng.brillouin(3, eps0)).collect();
    let spectrum = stability_spectrum(mass, eps0, &ks)?;
    let mut mode_report = Report::new(&["k1", "k2", "k3", "a_re", "a_im", "maxmod"]);
    for mode in &spectrum {
        let mut cells: Vec<Cell> = padded_k(&mode.k).into();
        cells.extend([
            Cell::Num(mode.a_hat.re),
            Cell::Num(mode.a_hat.im),
            Cell::Num(mode.max_modulus()),
        ]);
        mode_report.rows.push(cells);
    }
    if !spectrum.is_empty() {
        let worst = spectrum.iter().map(|m| m.max_modulus()).fold(0.0, f64::max);
        report.check(
            format!("max mode-root modulus {worst:.16} <= 1 + 1e-12"),
            worst <= thresholds::MODE_MODULUS,
        );
    }
    Ok((report, mode_report))
}

fn degeneracy_cmd(walk: &str, mass: f64, eps: f64, samples: usize, tol: f64, seed: u64) -> Result<Report> {
    let kind: WalkKind = walk.parse()?;
    let w = kind.build(kind.effective_mass(mass), eps)?;
    let probe = degeneracy_probe(&w.stencil, &ProbeConfig { samples, tol, seed })?;
    let mut report = Report::new(&["sample", "kind", "k1", "k2", "k3", "pattern", "accidental"]);
    for (i, s) in probe.samples.iter().enumerate() {
        let pattern: Vec<String> = s.pattern.iter().map(|p| p.to_string()).collect();
        let mut cells = vec![Cell::Int(i as i64), Cell::Text(s.kind.name().into())];
        cells.extend(padded_k(&s.k));
        cells.extend([Cell::Text(pattern.join("-")), Cell::Bool(s.accidental)]);
        report.rows.push(cells);
    }
    report.notes.push(format!(
        "generic pattern {:?} at {:.3} of random samples",
        probe.generic, probe.generic_fraction
    ));
    report.check("generic pattern has distinct eigenvalues", probe.generically_distinct());
    report.check(
        format!(
            "generic fraction {:.3} >= {}",
            probe.generic_fraction,
            thresholds::GENERIC_FRACTION
        ),
        probe.generic_fraction >= thresholds::GENERIC_FRACTION,
    );
    if let Some(origin) = probe.samples.iter().find(|s| s.kind == SampleKind::Origin) {
        report.notes.push(format!(
            "origin pattern {:?}{}",
            origin.pattern,
            if origin.accidental { " (accidental)" } else { "" }
        ));
    }
    Ok(report)
}

fn write_out(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn provenance(argv: &[String]) -> String {
    let args = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    format!("qwalk {} argv: qwalk {}", env!("CARGO_PKG_VERSION"), args)
}

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let prov = provenance(&argv);

    let outcome = match &cli.command {
        Command::DecoupleResidual {
            walk,
            mass,
            eps,
            grid,
            steps,
            seed,
            k,
            output,
        } => decouple_residual_cmd(walk, *mass, *eps, grid, *steps, *seed, k.as_deref())
            .map(|r| (r, None, output)),
        Command::Dispersion {
            walk,
            mass,
            eps,
            ksamples,
            seed,
            k,
            output,
        } => dispersion_cmd(walk, *mass, *eps, *ksamples, *seed, k).map(|r| (r, None, output)),
        Command::Convergence {
            walk,
            mass,
            k,
            omega,
            eps_list,
            output,
        } => convergence_cmd(walk, *mass, k, *omega, eps_list).map(|r| (r, None, output)),
        Command::LemmaCheck {
            dim,
            a,
            seed,
            eps_list,
            output,
        } => lemma_cmd(*dim, a.as_deref(), *seed, eps_list).map(|r| (r, None, output)),
        Command::ConjectureCheck {
            mass,
            eps_list,
            literal_sign,
            k,
            omega,
            modes,
            seed,
            modes_out,
            output,
        } => conjecture_cmd(
            *mass,
            eps_list,
            *literal_sign == Switch::On,
            k,
            *omega,
            *modes,
            *seed,
        )
        .map(|(r, m)| (r, modes_out.as_ref().map(|p| (m, p)), output)),
        Command::Degeneracy {
            walk,
            mass,
            eps,
            samples,
            tol,
            seed,
            output,
        } => degeneracy_cmd(walk, *mass, *eps, *samples, *tol, *seed).map(|r| (r, None, output)),
    };

    let (report, extra, output) = match outcome {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    if let Err(e) = write_out(output.out.as_ref(), &report.render(&prov, output.format)) {
        eprintln!("error: writing output: {e}");
        return EXIT_USAGE;
    }
    if let Some((modes, path)) = extra {
        if let Err(e) = write_out(Some(path), &modes.render(&prov, output.format)) {
            eprintln!("error: writing {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    if output.assert {
        let mut all = true;
        for (what, ok) in &report.checks {
            eprintln!("[{}] {what}", if *ok { "PASS" } else { "FAIL" });
            all &= ok;
        }
        if !all {
            return EXIT_ASSERT;
        }
    }
    EXIT_OK
}
