//! Grids of signed percentage errors of the truncated expansion against the
//! exact series, with CSV output in raw (full-precision) and display
//! (3-significant-figure, 101-clamped) forms.

use std::fmt::Write as _;
use std::path::Path;

use crate::asym::percent_error;
use crate::error::{Error, Result};
use crate::params::CmpParams;

/// Signed percentage errors over a (lambda, nu, order) grid.
///
/// Cells hold true values; the 101 sentinel for |error| > clamp_threshold is
/// applied only when rendering the display form, never in raw CSV.
#[derive(Debug, Clone)]
pub struct ErrorTable {
    pub lambda_grid: Vec<f64>,
    pub nu_grid: Vec<f64>,
    pub orders: Vec<u32>,
    /// Row-major over (lambda, nu, order).
    cells: Vec<f64>,
    pub clamp_threshold: f64,
}

fn float_range(start: f64, step: f64, count: usize) -> Vec<f64> {
    // build from integer multiples so 0.1 + 7*0.2 comes out as 1.5 exactly
    (0..count)
        .map(|i| ((start + step * i as f64) * 1e6).round() / 1e6)
        .collect()
}

impl ErrorTable {
    /// Leading/first/second-order errors over lambda, nu in {0.1, 0.3, ..., 1.9}.
    pub fn preset_table1(rel_tol: f64) -> Result<ErrorTable> {
        Self::compute(
            float_range(0.1, 0.2, 10),
            float_range(0.1, 0.2, 10),
            vec![1, 2, 3],
            rel_tol,
        )
    }

    /// Same orders over lambda in {3..10}, nu in {2.5, 3, ..., 5}.
    pub fn preset_table2(rel_tol: f64) -> Result<ErrorTable> {
        Self::compute(
            float_range(3.0, 1.0, 8),
            float_range(2.5, 0.5, 6),
            vec![1, 2, 3],
            rel_tol,
        )
    }

    pub fn compute(
        lambda_grid: Vec<f64>,
        nu_grid: Vec<f64>,
        orders: Vec<u32>,
        rel_tol: f64,
    ) -> Result<ErrorTable> {
        let mut cells = Vec::with_capacity(lambda_grid.len() * nu_grid.len() * orders.len());
        for &l in &lambda_grid {
            for &n in &nu_grid {
                let p = CmpParams::new(l, n)?;
                for &o in &orders {
                    cells.push(percent_error(p, o, rel_tol)?);
                }
            }
        }
        Ok(ErrorTable {
            lambda_grid,
            nu_grid,
            orders,
            cells,
            clamp_threshold: 100.0,
        })
    }

    /// Raw cell value at grid indices.
    pub fn cell(&self, lambda_idx: usize, nu_idx: usize, order_idx: usize) -> f64 {
        let per_lambda = self.nu_grid.len() * self.orders.len();
        self.cells[lambda_idx * per_lambda + nu_idx * self.orders.len() + order_idx]
    }

    /// Raw cell looked up by values (1e-9 tolerance on the grid points).
    pub fn cell_at(&self, lambda: f64, nu: f64, order: u32) -> Option<f64> {
        let li = self.lambda_grid.iter().position(|&v| (v - lambda).abs() < 1e-9)?;
        let ni = self.nu_grid.iter().position(|&v| (v - nu).abs() < 1e-9)?;
        let oi = self.orders.iter().position(|&v| v == order)?;
        Some(self.cell(li, ni, oi))
    }

    fn rows(&self) -> impl Iterator<Item = (f64, f64, u32, f64)> + '_ {
        let mut idx = 0;
        let mut out = Vec::with_capacity(self.cells.len());
        for &l in &self.lambda_grid {
            for &n in &self.nu_grid {
                for &o in &self.orders {
                    out.push((l, n, o, self.cells[idx]));
                    idx += 1;
                }
            }
        }
        out.into_iter()
    }

    /// CSV text; raw mode keeps full precision (shortest round-tripping
    /// decimal), display mode applies 3-significant-figure rounding and the
    /// 101 clamp. LF line endings either way.
    pub fn to_csv(&self, raw: bool) -> String {
        let mut s = String::from("lambda,nu,order,percent_error\n");
        for (l, n, o, v) in self.rows() {
            if raw {
                let _ = writeln!(s, "{l},{n},{o},{v}");
            } else {
                let _ = writeln!(s, "{l},{n},{o},{}", format_display(v, self.clamp_threshold));
            }
        }
        s
    }

    pub fn write_csv(&self, path: &Path, raw: bool) -> Result<()> {
        std::fs::write(path, self.to_csv(raw))
            .map_err(|e| Error::InvalidParameters(format!("cannot write {}: {e}", path.display())))
    }

    /// Parse a raw CSV produced by [`to_csv`]; grids are reconstructed in
    /// order of first appearance.
    pub fn from_csv(text: &str) -> Result<ErrorTable> {
        let mut lines = text.lines();
        match lines.next() {
            Some("lambda,nu,order,percent_error") => {}
            other => {
                return Err(Error::InvalidParameters(format!(
                    "unexpected CSV header: {other:?}"
                )))
            }
        }
        let mut lambda_grid: Vec<f64> = Vec::new();
        let mut nu_grid: Vec<f64> = Vec::new();
        let mut orders: Vec<u32> = Vec::new();
        let mut cells = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut field = |name: &str| {
                parts
                    .next()
                    .ok_or_else(|| {
                        Error::InvalidParameters(format!("row {i}: missing field {name}"))
                    })
            };
            let l: f64 = parse(field("lambda")?, i)?;
            let n: f64 = parse(field("nu")?, i)?;
            let o: u32 = field("order")?
                .parse()
                .map_err(|_| Error::InvalidParameters(format!("row {i}: bad order")))?;
            let v: f64 = parse(field("percent_error")?, i)?;
            if !lambda_grid.iter().any(|&g| g == l) {
                lambda_grid.push(l);
            }
            if !nu_grid.iter().any(|&g| g == n) {
                nu_grid.push(n);
            }
            if !orders.contains(&o) {
                orders.push(o);
            }
            cells.push(v);
        }
        let expect = lambda_grid.len() * nu_grid.len() * orders.len();
        if cells.len() != expect {
            return Err(Error::InvalidParameters(format!(
                "CSV is not a full grid: {} rows for {expect} cells",
                cells.len()
            )));
        }
        Ok(ErrorTable {
            lambda_grid,
            nu_grid,
            orders,
            cells,
            clamp_threshold: 100.0,
        })
    }
}

fn parse(s: &str, row: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::InvalidParameters(format!("row {row}: bad float {s:?}")))
}

/// 3-significant-figure rendering with the overflow sentinel: values beyond
/// the clamp become +/-101; otherwise the decimal count tracks the magnitude
/// (so 5.2988 -> "-5.30", 0.03249 -> "0.032", -99.96 -> "-100").
pub fn format_display(v: f64, clamp: f64) -> String {
    if !v.is_finite() {
        return if v > 0.0 { "101".into() } else { "-101".into() };
    }
    if v.abs() > clamp {
        return if v > 0.0 { "101".into() } else { "-101".into() };
    }
    let a = v.abs();
    let decimals = if a >= 99.95 {
        0
    } else if a >= 9.995 {
        1
    } else if a >= 0.9995 {
        2
    } else {
        3
    };
    format!("{v:.decimals$}")
}
