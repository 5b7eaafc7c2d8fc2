//! Command-line front end: configuration, the benchmark table, and CSV/JSON
//! output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::benchmark::{TableRow, TABLE, TABLE_M};
use crate::error::{Error, Result};
use crate::model::{Hamiltonian, ModelSpec, Parity, Sign};
use crate::nlie::{self, SolverConfig};
use crate::oracle::{self, IntegratorConfig};
use crate::relations::{self, Check, Connection, DeterminantSet};
use crate::spectrum::{Level, Method};
use crate::wkb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Table1,
    Nlie,
    Oracle,
    Wkb,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Wronskian,
    Tau,
    Fused,
    T11,
    Bethe,
    Duality,
}

/// Raw flags; anything left unset falls back to the config file, then to
/// the defaults of [`RunConfig`].
#[derive(Debug, Clone, Parser)]
#[command(name = "stokes-nlie", version, about = "Spectra of x^{2M} ± αx^{M-1} oscillators")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Flat `key = value` file with defaults for the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "M")]
    pub m: Option<f64>,
    /// Signed coupling; its sign selects ε.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// +1 (even) or -1 (odd); both sectors when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub parity: Option<i32>,
    /// Levels per parity sector.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub damping: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `ln 𝔄` curves of the integral-equation run.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Checks run by `verify`; all when omitted.
    #[arg(long = "check", value_enum)]
    pub checks: Vec<CheckKind>,
    /// Levels per family in the spectral determinants.
    #[arg(long)]
    pub det_levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub m: f64,
    pub alpha: f64,
    pub parity: Option<Parity>,
    pub levels: usize,
    pub solver: SolverConfig,
    pub out: Option<PathBuf>,
    pub curves: Option<PathBuf>,
    pub format: Format,
    pub checks: Vec<CheckKind>,
    pub det_levels: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            m: 3.0,
            alpha: 1.0,
            parity: None,
            levels: 2,
            solver: SolverConfig::default(),
            out: None,
            curves: None,
            format: Format::Csv,
            checks: Vec::new(),
            det_levels: 60,
        }
    }

    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => parse_config_file(p)?,
            None => BTreeMap::new(),
        };
        let mut c = Self::new(cli.command);
        for (k, v) in &file {
            c.set(k, v)?;
        }
        if let Some(v) = cli.m {
            c.m = v;
        }
        if let Some(v) = cli.alpha {
            c.alpha = v;
        }
        if let Some(v) = cli.parity {
            c.parity = Some(Parity::from_value(v)?);
        }
        if let Some(v) = cli.levels {
            c.levels = v;
        }
        let g = &mut c.solver.grid;
        if let Some(v) = cli.theta_min {
            g.theta_min = v;
        }
        if let Some(v) = cli.theta_max {
            g.theta_max = v;
        }
        if let Some(v) = cli.grid_points {
            g.n = v;
        }
        if let Some(v) = cli.delta {
            c.solver.delta = v;
        }
        if let Some(v) = cli.damping {
            c.solver.damping = v;
        }
        if let Some(v) = cli.tol {
            c.solver.tol = v;
        }
        if let Some(v) = cli.max_iter {
            c.solver.max_iter = v;
        }
        if cli.out.is_some() {
            c.out = cli.out.clone();
        }
        if cli.curves.is_some() {
            c.curves = cli.curves.clone();
        }
        if let Some(v) = cli.format {
            c.format = v;
        }
        if !cli.checks.is_empty() {
            c.checks = cli.checks.clone();
        }
        if let Some(v) = cli.det_levels {
            c.det_levels = v;
        }
        c.validate()?;
        Ok(c)
    }

    /// Applies one `key = value` setting. Keys are flag names, with `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidConfig(format!("cannot parse {key} = {value} as {what}"));
        let f = || value.parse::<f64>().map_err(|_| bad("a number"));
        let u = || value.parse::<usize>().map_err(|_| bad("a count"));
        match key.replace('_', "-").as_str() {
            "M" | "m" => self.m = f()?,
            "alpha" => self.alpha = f()?,
            "parity" => {
                let v = value.trim_start_matches('+').parse::<i32>().map_err(|_| bad("±1"))?;
                self.parity = Some(Parity::from_value(v)?);
            }
            "levels" => self.levels = u()?,
            "theta-min" => self.solver.grid.theta_min = f()?,
            "theta-max" => self.solver.grid.theta_max = f()?,
            "grid-points" => self.solver.grid.n = u()?,
            "delta" => self.solver.delta = f()?,
            "damping" => self.solver.damping = f()?,
            "tol" => self.solver.tol = f()?,
            "max-iter" => self.solver.max_iter = u()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "curves" => self.curves = Some(PathBuf::from(value)),
            "format" => self.format = Format::from_str(value, true).map_err(|_| bad("csv or json"))?,
            "det-levels" => self.det_levels = u()?,
            "check" => {
                self.checks = value
                    .split(',')
                    .map(|s| CheckKind::from_str(s.trim(), true).map_err(|_| bad("a check name")))
                    .collect::<Result<_>>()?
            }
            _ => return Err(Error::InvalidConfig(format!("unknown configuration key {key}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        Hamiltonian::new(self.m, self.alpha)?;
        if self.levels == 0 {
            return Err(Error::InvalidConfig("levels must be positive".into()));
        }
        if self.command == Command::Nlie {
            self.spec(Parity::Even)?.check_nlie_range()?;
            self.solver.validate(self.m)?;
        }
        if self.command == Command::Verify {
            relations_m(self.m)?;
            if self.det_levels < 10 {
                return Err(Error::InvalidConfig("det-levels must be at least 10".into()));
            }
        }
        Ok(())
    }

    pub fn spec(&self, parity: Parity) -> Result<ModelSpec> {
        ModelSpec::from_signed(self.m, self.alpha, parity)
    }

    fn parities(&self) -> Vec<Parity> {
        match self.parity {
            Some(p) => vec![p],
            None => vec![Parity::Even, Parity::Odd],
        }
    }
}

fn relations_m(m: f64) -> Result<u32> {
    crate::model::odd_half_index(m)
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Twelve significant digits, `%g` style.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        trim(&format!("{v:.*}", (11 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub method: String,
    #[serde(rename = "M")]
    pub m: f64,
    pub alpha: f64,
    pub eps: i32,
    pub parity: i32,
    pub j: usize,
    /// Number, or the `0*` / `◇` markers for degenerate WKB cells.
    #[serde(rename = "E")]
    pub energy: String,
    pub theta: f64,
    pub residual: f64,
    pub err_est: f64,
}

impl LevelRow {
    pub fn from_level(l: &Level, m: f64, alpha: f64) -> Self {
        Self {
            method: l.method.tag().into(),
            m,
            alpha,
            eps: l.sign.value() as i32,
            parity: l.parity.value() as i32,
            j: l.j,
            energy: fmt_num(l.energy),
            theta: l.theta,
            residual: l.residual,
            err_est: l.err_est,
        }
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.method.clone(),
            fmt_num(self.m),
            fmt_num(self.alpha),
            self.eps.to_string(),
            self.parity.to_string(),
            self.j.to_string(),
            self.energy.clone(),
            fmt_num(self.theta),
            fmt_num(self.residual),
            fmt_num(self.err_est),
        ]
    }
}

pub const LEVEL_COLUMNS: [&str; 10] = ["method", "M", "alpha", "eps", "parity", "j", "E", "theta", "residual", "err_est"];
pub const CURVE_COLUMNS: [&str; 5] = ["theta", "re_lnA_plus", "im_lnA_plus", "re_lnA_minus", "im_lnA_minus"];
pub const CHECK_COLUMNS: [&str; 5] = ["check", "param_json", "value", "tolerance", "pass"];
pub const TABLE_COLUMNS: [&str; 12] = [
    "alpha", "parity", "oracle", "wkb", "nlie", "printed_reference", "printed_wkb", "printed_nlie",
    "oracle_rel_diff", "wkb_abs_diff", "nlie_vs_oracle_rel", "nlie_vs_printed_rel",
];

/// One side-by-side cell of the benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub alpha: f64,
    pub parity: i32,
    pub oracle: Option<f64>,
    pub wkb: String,
    pub nlie: Option<f64>,
    pub printed_reference: f64,
    pub printed_wkb: String,
    pub printed_nlie: f64,
    pub oracle_rel_diff: Option<f64>,
    pub wkb_abs_diff: Option<f64>,
    pub nlie_vs_oracle_rel: Option<f64>,
    pub nlie_vs_printed_rel: Option<f64>,
    /// Messages of cells that failed.
    pub errors: Vec<String>,
}

impl TableCell {
    fn fields(&self) -> Vec<String> {
        let o = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| "failed".into());
        vec![
            fmt_num(self.alpha),
            self.parity.to_string(),
            o(self.oracle),
            self.wkb.clone(),
            o(self.nlie),
            fmt_num(self.printed_reference),
            self.printed_wkb.clone(),
            fmt_num(self.printed_nlie),
            o(self.oracle_rel_diff),
            self.wkb_abs_diff.map(fmt_num).unwrap_or_else(|| "n/a".into()),
            o(self.nlie_vs_oracle_rel),
            o(self.nlie_vs_printed_rel),
        ]
    }
}

/// Levels from the integral equations, `j < levels` for the sign of
/// `alpha` and each requested parity. Also returns the curves of the last
/// parity solved.
pub fn run_nlie(cfg: &RunConfig) -> Result<(Vec<Level>, Vec<[f64; 5]>)> {
    let kernels = cfg.solver.kernels(cfg.m)?;
    let mut levels = Vec::new();
    let mut curves = Vec::new();
    for p in cfg.parities() {
        let spec = cfg.spec(p)?;
        let state = nlie::solve(&spec, &cfg.solver, &kernels)?;
        for j in 0..cfg.levels {
            levels.push(state.extract_level(j, spec.sign)?);
        }
        curves = state.export_ln_cap_a();
    }
    Ok((levels, curves))
}

pub fn run_oracle(cfg: &RunConfig) -> Result<Vec<Level>> {
    let ic = IntegratorConfig::default();
    let mut out = Vec::new();
    for p in cfg.parities() {
        let spec = cfg.spec(p)?;
        let lv: Result<Vec<Level>> = (0..cfg.levels)
            .into_par_iter()
            .map(|j| oracle::shoot_eigenvalue(&spec, j, &ic))
            .collect();
        out.extend(lv?);
    }
    Ok(out)
}

/// WKB levels; degenerate cells come back with `E` set to their marker.
pub fn run_wkb(cfg: &RunConfig) -> Result<Vec<LevelRow>> {
    let h = Hamiltonian::new(cfg.m, cfg.alpha)?;
    let mut out = Vec::new();
    for p in cfg.parities() {
        for j in 0..cfg.levels {
            let n = 2 * j + usize::from(p == Parity::Odd);
            let w = wkb::wkb_energy(n, &h)?;
            let row = match w.to_level(&h) {
                Some(l) => LevelRow::from_level(&Level { j, ..l }, cfg.m, cfg.alpha),
                None => LevelRow {
                    method: Method::Wkb.tag().into(),
                    m: cfg.m,
                    alpha: cfg.alpha,
                    eps: h.sign().value() as i32,
                    parity: p.value() as i32,
                    j,
                    energy: w.label(),
                    theta: f64::NAN,
                    residual: f64::NAN,
                    err_est: f64::NAN,
                },
            };
            out.push(row);
        }
    }
    Ok(out)
}

fn table_cell(row: &TableRow, col: usize, solver: &SolverConfig) -> TableCell {
    let parity = if col == 0 { Parity::Even } else { Parity::Odd };
    let mut errors = Vec::new();
    let ic = IntegratorConfig::default();
    let spec = ModelSpec::from_signed(TABLE_M, row.alpha, parity);
    let oracle = spec
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|s| oracle::shoot_eigenvalue(s, 0, &ic).map_err(|e| e.to_string()))
        .map(|l| l.energy)
        .map_err(|e| errors.push(format!("oracle: {e}")))
        .ok();
    let wkb_label;
    let mut wkb_value = None;
    match Hamiltonian::new(TABLE_M, row.alpha).and_then(|h| wkb::wkb_energy(col, &h)) {
        Ok(w) => {
            wkb_label = w.energy.map(fmt_num).unwrap_or_else(|| w.label());
            wkb_value = w.energy;
        }
        Err(e) => {
            wkb_label = "failed".into();
            errors.push(format!("wkb: {e}"));
        }
    }
    let nlie = spec
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|s| {
            let k = solver.kernels(TABLE_M).map_err(|e| e.to_string())?;
            let st = nlie::solve(s, solver, &k).map_err(|e| e.to_string())?;
            st.extract_level(0, s.sign).map_err(|e| e.to_string())
        })
        .map(|l| l.energy)
        .map_err(|e| errors.push(format!("nlie: {e}")))
        .ok();
    let r = |a: Option<f64>, b: f64| a.map(|a| ((a - b) / b).abs());
    TableCell {
        alpha: row.alpha,
        parity: parity.value() as i32,
        oracle,
        wkb: wkb_label,
        nlie,
        printed_reference: row.reference[col],
        printed_wkb: row.wkb[col].label(),
        printed_nlie: row.nlie[col],
        oracle_rel_diff: r(oracle, row.reference[col]),
        wkb_abs_diff: match (wkb_value, row.wkb[col].value()) {
            (Some(a), Some(b)) => Some((a - b).abs()),
            _ => None,
        },
        nlie_vs_oracle_rel: oracle.and_then(|o| r(nlie, o)),
        nlie_vs_printed_rel: r(nlie, row.nlie[col]),
        errors,
    }
}

/// All 22 cells of the `M = 3` benchmark table, rows by signed coupling.
pub fn run_table1(solver: &SolverConfig) -> Vec<TableCell> {
    let jobs: Vec<(usize, usize)> = (0..TABLE.len()).flat_map(|r| [(r, 0), (r, 1)]).collect();
    jobs.par_iter().map(|&(r, c)| table_cell(&TABLE[r], c, solver)).collect()
}

fn z(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Relation checks at the configured `(M, |α|)`.
pub fn run_verify(cfg: &RunConfig) -> Result<Vec<Check>> {
    let alpha = cfg.alpha.abs();
    let ic = IntegratorConfig::default();
    let conn = Connection::new(cfg.m, alpha, ic)?;
    let all = [
        CheckKind::Wronskian,
        CheckKind::Tau,
        CheckKind::Fused,
        CheckKind::T11,
        CheckKind::Bethe,
        CheckKind::Duality,
    ];
    let kinds: &[CheckKind] = if cfg.checks.is_empty() { &all } else { &cfg.checks };
    let complex_points = [z(0.5, 0.0), z(1.7, 0.0), z(-0.3, 0.8)];
    let needs_dets = kinds.iter().any(|k| matches!(k, CheckKind::T11 | CheckKind::Bethe));
    let dets = if needs_dets {
        Some(DeterminantSet::from_oracle(cfg.m, alpha, cfg.det_levels, &ic)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for k in kinds {
        match k {
            CheckKind::Wronskian => out.extend(relations::wronskian_checks(&conn, &complex_points)?),
            CheckKind::Tau => {
                for &e in &complex_points {
                    for s in Sign::both() {
                        for j in 1..3 {
                            let a = conn.tau(j, s, e)?;
                            let b = conn.tau_shifted(j, s, e)?;
                            out.push(Check::new(
                                "tau_shift",
                                serde_json::json!({"alpha": alpha, "E": [e.re, e.im], "j": j, "eps": s.value()}),
                                (a - b).norm() / a.norm(),
                                1e-6,
                            ));
                        }
                    }
                }
            }
            CheckKind::Fused => out.extend(relations::fused_entry_checks(&conn, &complex_points, 1e-4)?),
            CheckKind::T11 => {
                let es: Vec<f64> = (0..10).map(|i| 0.1 + 1.9 * i as f64 / 9.0).collect();
                out.extend(relations::t11_checks(&conn, dets.as_ref().unwrap(), &es, 1e-3)?);
            }
            CheckKind::Bethe => {
                let d = dets.as_ref().unwrap();
                for (s, p, j) in [
                    (Sign::Plus, Parity::Even, 0),
                    (Sign::Plus, Parity::Odd, 0),
                    (Sign::Plus, Parity::Even, 1),
                ] {
                    let e = d.get(s, p).eigenvalues[j];
                    let res = d.bethe_residual(s, p, e)?.norm();
                    out.push(Check::new(
                        "bethe_residual",
                        serde_json::json!({"alpha": alpha, "eps": s.value(), "parity": p.value(), "j": j, "E": e, "levels": cfg.det_levels}),
                        res,
                        1e-2,
                    ));
                }
            }
            CheckKind::Duality => {
                let r = relations::duality_check(cfg.m, 5, &ic)?;
                let p = serde_json::json!({"M": cfg.m, "alpha": cfg.m});
                out.push(Check::new("duality_spectra", p.clone(), r.max_rel_diff, 1e-6));
                out.push(Check::new("zero_mode_energy", p.clone(), r.zero_mode.abs(), 1e-6));
                out.push(Check::new("zero_mode_residual", p.clone(), r.zero_mode_residual, 1e-10));
                out.push(Check::new(
                    "factorized_rayleigh",
                    p,
                    (r.rayleigh_quotient / r.factorized_level - 1.0).abs(),
                    1e-4,
                ));
            }
        }
    }
    Ok(out)
}

fn write_csv<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wr.write_record(header).map_err(io)?;
    for r in rows {
        wr.write_record(&r).map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit<T: Serialize>(cfg: &RunConfig, header: &[&str], rows: &[T], fields: impl Fn(&T) -> Vec<String>) -> Result<()> {
    let mut w = sink(&cfg.out)?;
    match cfg.format {
        Format::Csv => write_csv(w, header, rows.iter().map(fields)),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
            Ok(())
        }
    }
}

fn check_fields(c: &Check) -> Vec<String> {
    vec![
        c.check.clone(),
        c.param_json.clone(),
        fmt_num(c.value),
        fmt_num(c.tolerance),
        c.pass.to_string(),
    ]
}

/// Runs one command; `Ok(false)` means a check did not pass.
pub fn execute(cfg: &RunConfig) -> Result<bool> {
    match cfg.command {
        Command::Nlie => {
            let (levels, curves) = run_nlie(cfg)?;
            let rows: Vec<LevelRow> = levels.iter().map(|l| LevelRow::from_level(l, cfg.m, cfg.alpha)).collect();
            emit(cfg, &LEVEL_COLUMNS, &rows, LevelRow::fields)?;
            if let Some(p) = &cfg.curves {
                let f = std::fs::File::create(p)?;
                write_csv(f, &CURVE_COLUMNS, curves.iter().map(|r| r.iter().map(|v| fmt_num(*v)).collect()))?;
            }
            Ok(true)
        }
        Command::Oracle => {
            let rows: Vec<LevelRow> = run_oracle(cfg)?
                .iter()
                .map(|l| LevelRow::from_level(l, cfg.m, cfg.alpha))
                .collect();
            emit(cfg, &LEVEL_COLUMNS, &rows, LevelRow::fields)?;
            Ok(true)
        }
        Command::Wkb => {
            let rows = run_wkb(cfg)?;
            emit(cfg, &LEVEL_COLUMNS, &rows, LevelRow::fields)?;
            Ok(true)
        }
        Command::Table1 => {
            let cells = run_table1(&cfg.solver);
            emit(cfg, &TABLE_COLUMNS, &cells, TableCell::fields)?;
            for c in &cells {
                for e in &c.errors {
                    eprintln!("alpha {} parity {}: {e}", c.alpha, c.parity);
                }
            }
            Ok(true)
        }
        Command::Verify => {
            let checks = run_verify(cfg)?;
            emit(cfg, &CHECK_COLUMNS, &checks, check_fields)?;
            Ok(checks.iter().all(|c| c.pass))
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidModel(_)
        | Error::InvalidConfig(_)
        | Error::AlphaOutOfRange { .. }
        | Error::OutsideValidRegion { .. } => 2,
        Error::NonConvergence { .. }
        | Error::PlateauInstability { .. }
        | Error::LevelOutsideGrid { .. }
        | Error::NoSignChange(_)
        | Error::PoleProximity(_)
        | Error::Integration(_) => 3,
        Error::Verification(_) => 4,
        Error::Io(_) | Error::Json(_) => 1,
    }
}

/// Parses `args`, runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = RunConfig::from_cli(&cli).and_then(|cfg| execute(&cfg));
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("some checks failed");
            4
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.4356), "1.4356");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.5e-9), "-2.5e-9");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn config_file_and_flag_override() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# defaults\nM = 3\nalpha = -1.5\ngrid_points = 8192\nlevels = 4\n").unwrap();
        let cli = Cli::try_parse_from([
            "stokes-nlie",
            "nlie",
            "--config",
            p.to_str().unwrap(),
            "--levels",
            "1",
            "--parity",
            "-1",
        ])
        .unwrap();
        let c = RunConfig::from_cli(&cli).unwrap();
        assert_eq!(c.alpha, -1.5);
        assert_eq!(c.solver.grid.n, 8192);
        assert_eq!(c.levels, 1);
        assert_eq!(c.parity, Some(Parity::Odd));
        assert!(parse_config("oops").is_err());
        let mut c = RunConfig::new(Command::Oracle);
        assert!(c.set("nonsense", "1").is_err());
    }

    #[test]
    fn alpha_above_m_is_a_validation_error() {
        assert_eq!(run(["stokes-nlie", "nlie", "--M", "3", "--alpha", "4"]), 2);
        assert_eq!(run(["stokes-nlie", "oracle", "--parity", "3"]), 2);
    }
}
