//! Executes a validated [`RunConfig`].

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anharm::perturbation::{asymptotic_fit_points, degenerate_slope, single_term_c1};
use anharm::report::write_residuals;
use anharm::scan::{hellmann_feynman_check, uniform_grid};
use anharm::wavefunction::unconverged_states;
use anharm::{
    convergence_study, find_avoided_crossing, fit_response_a, scan_field, DoubleWellParams,
    FieldFamily, FitWindow, GridSpec, Model, PositionGrid, Report, ResponseCoefficients, ScanConfig,
    SpectralResult,
};

use crate::config::{Command, ModelSpec, RunConfig};
use crate::CliError;

/// Console summary (12 decimals) that doubles as the full-precision report.
#[derive(Default)]
struct Summary {
    lines: Vec<(String, Value)>,
}

enum Value {
    Num(f64),
    Text(String),
}

impl Summary {
    fn num(&mut self, key: impl Into<String>, v: f64) {
        self.lines.push((key.into(), Value::Num(v)));
    }

    fn text(&mut self, key: impl Into<String>, v: impl ToString) {
        self.lines.push((key.into(), Value::Text(v.to_string())));
    }

    fn print<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for (k, v) in &self.lines {
            match v {
                Value::Num(x) => writeln!(out, "{k} = {x:.12}")?,
                Value::Text(s) => writeln!(out, "{k} = {s}")?,
            }
        }
        Ok(())
    }

    fn report(&self) -> Report {
        let mut r = Report::new();
        for (k, v) in &self.lines {
            match v {
                Value::Num(x) => r.number(k, *x),
                Value::Text(s) => r.text(k, s),
            };
        }
        r
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn base_model(cfg: &RunConfig) -> Result<Model<f64>, CliError> {
    Ok(match &cfg.model {
        ModelSpec::DoubleWell { alpha, beta } => {
            Model::double_well(&DoubleWellParams::new(*alpha, *beta, 0.0)?, cfg.mass, cfg.hbar)?
        }
        ModelSpec::Lambdas(l) => Model::new(l.clone(), cfg.mass, cfg.hbar)?,
    })
}

fn family(cfg: &RunConfig) -> Result<FieldFamily<f64>, CliError> {
    Ok(FieldFamily::new(base_model(cfg)?, cfg.n_basis, cfg.pivot)?)
}

fn scan_config(cfg: &RunConfig, levels: usize) -> ScanConfig {
    ScanConfig {
        pivot: cfg.pivot,
        ..ScanConfig::new(cfg.n_basis, levels)
    }
}

fn warn_unconverged(res: &SpectralResult<f64>, k: usize) {
    let bad = unconverged_states(res, k, 1e-6);
    if !bad.is_empty() {
        eprintln!("warning: states {bad:?} keep ≥1e-6 of their norm in the top basis functions; increase N");
    }
}

fn basis_lines(s: &mut Summary, fam: &FieldFamily<f64>) {
    s.text("n_basis", fam.basis.n_basis);
    s.text("pivot", fam.basis.pivot);
    s.num("r0_squared", fam.basis.r0_squared());
}

type CsvWriter<'a> = &'a dyn Fn(&mut dyn Write) -> io::Result<()>;

/// Writes the main CSV to `output` (or `stdout`) and the summary to stdout,
/// or to stderr when stdout carries the CSV.
fn emit<W: Write>(
    cfg: &RunConfig,
    stdout: &mut W,
    summary: &Summary,
    csv: Option<CsvWriter>,
) -> Result<(), CliError> {
    let stdout_err = |e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    match (csv, &cfg.output) {
        (Some(write), Some(path)) => {
            write_file(path, |w| write(w))?;
            summary.print(stdout).map_err(stdout_err)?;
        }
        (Some(write), None) => {
            write(stdout).map_err(stdout_err)?;
            summary.print(&mut io::stderr()).map_err(stdout_err)?;
        }
        (None, _) => summary.print(stdout).map_err(stdout_err)?,
    }
    if let Some(path) = &cfg.report {
        write_file(path, |w| summary.report().write(w))?;
    }
    Ok(())
}

pub fn run<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    match cfg.command {
        Command::Spectrum => spectrum(cfg, stdout),
        Command::Scan => scan(cfg, stdout),
        Command::Wavefunction => wavefunction(cfg, stdout),
        Command::Response => response(cfg, stdout),
        Command::Repulsion => repulsion(cfg, stdout),
        Command::Converge => converge(cfg, stdout),
    }
}

fn spectrum<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    let fam = family(cfg)?;
    let res = fam.spectrum(cfg.p)?;
    let k = cfg.levels.min(cfg.n_basis);
    warn_unconverged(&res, k);
    let e = res.eigenvalues();
    let mut s = Summary::default();
    s.num("p", cfg.p);
    for (n, &x) in e.iter().take(k).enumerate() {
        s.num(format!("E_{n}"), x);
    }
    basis_lines(&mut s, &fam);
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "n,E")?;
        for (n, x) in e.iter().enumerate() {
            writeln!(w, "{n},{x:.11e}")?;
        }
        Ok(())
    };
    let csv: Option<CsvWriter> = cfg.output.as_ref().map(|_| &write as _);
    emit(cfg, stdout, &s, csv)
}

fn scan<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    let grid = uniform_grid(cfg.p_min, cfg.p_max, cfg.p_step)?;
    let scan = scan_field(&base_model(cfg)?, &grid, &scan_config(cfg, cfg.levels))?;
    let mut s = Summary::default();
    s.text("points", grid.len());
    s.text("levels", cfg.levels);
    s.text("n_basis", scan.basis.n_basis);
    s.num("r0_squared", scan.basis.r0_squared());
    if grid.len() >= 3 {
        s.num("hellmann_feynman_residual", hellmann_feynman_check(&scan)?);
    }
    emit(cfg, stdout, &s, Some(&|w: &mut dyn Write| scan.write_csv(w)))
}

fn wavefunction<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    let fam = family(cfg)?;
    let res = fam.spectrum(cfg.p)?;
    warn_unconverged(&res, cfg.levels);
    let grid = GridSpec::new(cfg.q_min, cfg.q_max, cfg.q_points)?;
    let table = PositionGrid::tabulate(&res, cfg.levels, grid)?;
    let mut s = Summary::default();
    s.num("p", cfg.p);
    for n in 0..cfg.levels {
        s.num(format!("E_{n}"), res.eigenvalues()[n]);
        let norm: f64 = table.values[n].iter().map(|v| v * v).sum::<f64>() * grid.step();
        s.num(format!("grid_norm_{n}"), norm);
    }
    basis_lines(&mut s, &fam);
    emit(cfg, stdout, &s, Some(&|w: &mut dyn Write| table.write_csv(w)))
}

fn response<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    if !(cfg.p_min <= 0.0 && cfg.fit_window <= cfg.p_max + 1e-12) {
        return Err(CliError::Config(format!(
            "the field grid [{}, {}] must contain 0 and the fit window [0, {}]",
            cfg.p_min, cfg.p_max, cfg.fit_window
        )));
    }
    let model = base_model(cfg)?;
    let fam = FieldFamily::new(model.clone(), cfg.n_basis, cfg.pivot)?;
    let res = fam.spectrum(0.0)?;
    warn_unconverged(&res, 2);
    let grid = uniform_grid(cfg.p_min, cfg.p_max, cfg.p_step)?;
    let scan = scan_field(&model, &grid, &scan_config(cfg, 1))?;

    let degenerate = ResponseCoefficients::from_perturbation(&res);
    let c1 = degenerate.c1;
    let a = fit_response_a(&scan, c1, cfg.fit_window)?;
    let fitted = degenerate.with_fitted_a(a);

    let mut s = Summary::default();
    s.num("E_0", res.eigenvalues()[0]);
    s.num("E_1", res.eigenvalues()[1]);
    basis_lines(&mut s, &fam);
    s.num("c1", c1);
    s.num("c1_single_term", single_term_c1(&res));
    s.num("q01_abs", -degenerate_slope(&res));
    s.num("a_degenerate", degenerate.a);
    s.num("omega_degenerate", degenerate.omega);
    s.num("fit_window", cfg.fit_window);
    s.num("a_fitted", fitted.a);
    s.num("omega_fitted", fitted.omega);
    if let Some(p_big) = cfg.asymptote {
        let big = uniform_grid(p_big, 4.0 * p_big, p_big / 20.0)?;
        let far = scan_field(&model, &big, &scan_config(cfg, 1))?;
        let fit = asymptotic_fit_points(&far.p_values, &far.energies[0])?;
        s.num("asymptote_p_min", p_big);
        s.num("asymptote_A", fit.intercept);
        s.num("asymptote_B", fit.slope);
        s.num("asymptote_max_residual", fit.max_residual);
        let l4 = model.lambda(4);
        if model.degree() == 4 && l4 > 0.0 {
            s.num("asymptote_B_well_depth", -0.75 * (4.0 * l4).powf(-1.0 / 3.0));
        }
    }

    let e0 = &scan.energies[0];
    let e00 = degenerate.e0_at_zero;
    if let Some(path) = &cfg.residuals {
        let model_values: Vec<f64> = scan.p_values.iter().map(|&p| fitted.predict(p)).collect();
        let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
        write_residuals(&mut w, &scan.p_values, e0, &model_values)?;
        w.flush().map_err(io_err(path))?;
    }
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "p,E0,quadratic,tanh_degenerate,tanh_fitted")?;
        for (&p, &e) in scan.p_values.iter().zip(e0) {
            writeln!(
                w,
                "{p:.11e},{e:.11e},{:.11e},{:.11e},{:.11e}",
                e00 + c1 * p * p,
                degenerate.predict(p),
                fitted.predict(p)
            )?;
        }
        Ok(())
    };
    emit(cfg, stdout, &s, Some(&write))
}

fn repulsion<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    let fam = family(cfg)?;
    let lo = cfg.levels;
    let x = find_avoided_crossing(&fam, lo, cfg.bracket)?;
    let m = x.models;
    let hi = lo + 1;
    let mut s = Summary::default();
    s.text("level_lo", lo);
    s.text("level_hi", hi);
    basis_lines(&mut s, &fam);
    s.num("p1", x.p1);
    s.num("gap_min", x.gap_min);
    s.num(format!("E_{lo}"), m.e_lo);
    s.num(format!("E_{hi}"), m.e_hi);
    s.num(format!("Q_{lo}{lo}"), m.q_lo);
    s.num(format!("Q_{hi}{hi}"), m.q_hi);
    s.num("c2", m.c2);

    let csv = match &cfg.output {
        Some(_) => {
            let points = 101;
            let rows = (0..points)
                .map(|k| {
                    let dp = cfg.window * (2.0 * k as f64 / (points - 1) as f64 - 1.0);
                    let res = fam.spectrum(x.p1 + dp)?;
                    Ok((dp, res.eigenvalues()[lo], res.eigenvalues()[hi]))
                })
                .collect::<Result<Vec<_>, anharm::Error>>()?;
            Some(rows)
        }
        None => None,
    };
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "p,dp,E_lo,E_hi,model_lo,model_hi")?;
        for &(dp, el, eh) in csv.iter().flatten() {
            writeln!(
                w,
                "{:.11e},{dp:.11e},{el:.11e},{eh:.11e},{:.11e},{:.11e}",
                x.p1 + dp,
                m.predict_lo(dp),
                m.predict_hi(dp)
            )?;
        }
        Ok(())
    };
    let out: Option<CsvWriter> = csv.as_ref().map(|_| &write as _);
    emit(cfg, stdout, &s, out)
}

fn converge<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<(), CliError> {
    let window = FitWindow {
        p_max: cfg.fit_window,
        step: cfg.p_step,
    };
    let table = convergence_study(&base_model(cfg)?, &cfg.n_list, window)?;
    let mut s = Summary::default();
    s.num("fit_window", cfg.fit_window);
    for r in &table.rows {
        let n = r.n_basis;
        s.num(format!("N{n}.r0_squared"), r.r0_squared);
        s.num(format!("N{n}.E_0"), r.e0);
        s.num(format!("N{n}.E_1"), r.e1);
        s.num(format!("N{n}.c1"), r.c1);
        s.num(format!("N{n}.c1_single_term"), r.c1_single);
        s.num(format!("N{n}.a"), r.a);
    }
    emit(cfg, stdout, &s, Some(&|w: &mut dyn Write| table.write_csv(w)))
}
