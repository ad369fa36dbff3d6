//! Limiting constant tables `c(l, k)` and `p(l, k)`, closed forms for the
//! first-degree law and the `4n/k^2` second-degree law, and numerical
//! checks of the series identities the tables satisfy.

mod identities;
mod moments;
pub mod tail;

pub use identities::{
    identity_checks, p_bound_check, IdentityOptions, IdentityReport, PBoundCheck, PViolation,
    RowCheck, SumCheck, ZCheck,
};
pub use moments::{column_moments, CBound, ColumnMoments};

use std::io::Write;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ratio, rational_string, to_f64, Grid, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    /// Loopless constants, `E N_n(l, k) ~ n c(l, k)`.
    C,
    /// Upper bounds for looped counts, `E P_n(l, k) <= p(l, k)`.
    P,
}

/// Cheap truncation indicators computed with the table. The refined
/// estimate used by the identity checks lives in [`tail`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableDiagnostics {
    /// `sum_{k <= kmax} v(l, k)` per row.
    pub row_sums: Vec<f64>,
    /// `(kmax - 1/2) v(l, kmax)`: first-order mass beyond the last column,
    /// assuming the `1/k^2` row decay.
    pub row_tail_first_order: Vec<f64>,
    pub total: f64,
}

/// Truncated `(lmax + 1) x (kmax + 1)` table, indexed from zero.
#[derive(Debug, Clone)]
pub struct AnalyticTable {
    pub kind: TableKind,
    pub lmax: usize,
    pub kmax: usize,
    pub mode: Mode,
    exact: Option<Grid<BigRational>>,
    float: Grid<f64>,
    pub diagnostics: TableDiagnostics,
}

impl AnalyticTable {
    pub fn get(&self, l: usize, k: usize) -> f64 {
        self.float.get(l, k).copied().unwrap_or(0.0)
    }

    pub fn exact(&self, l: usize, k: usize) -> Option<&BigRational> {
        self.exact.as_ref().and_then(|g| g.get(l, k))
    }

    pub fn float_grid(&self) -> &Grid<f64> {
        &self.float
    }

    /// CSV `l,k,value`; exact values print as `num/den`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let kind = match self.kind {
            TableKind::C => "ctable",
            TableKind::P => "ptable",
        };
        writeln!(
            w,
            "{} kind={kind} lmax={} kmax={} mode={}",
            crate::edgelist::MAGIC,
            self.lmax,
            self.kmax,
            self.mode
        )?;
        writeln!(w, "l,k,value")?;
        for l in 0..=self.lmax {
            for k in 0..=self.kmax {
                match self.exact(l, k) {
                    Some(v) => writeln!(w, "{l},{k},{}", rational_string(v))?,
                    None => writeln!(w, "{l},{k},{:e}", self.get(l, k))?,
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    fn finish(
        kind: TableKind,
        mode: Mode,
        exact: Option<Grid<BigRational>>,
        float: Grid<f64>,
    ) -> Self {
        let lmax = float.rows() - 1;
        let kmax = float.cols() - 1;
        let row_sums: Vec<f64> = (0..=lmax).map(|l| float.row(l).iter().sum()).collect();
        let row_tail_first_order = (0..=lmax)
            .map(|l| (kmax as f64 - 0.5).max(0.0) * float.at(l, kmax))
            .collect();
        let total = row_sums.iter().sum();
        Self {
            kind,
            lmax,
            kmax,
            mode,
            exact,
            float,
            diagnostics: TableDiagnostics {
                row_sums,
                row_tail_first_order,
                total,
            },
        }
    }
}

/// `c(1, k) = (2k^2 + 14k) / ((k+1)(k+2)(k+3)(k+4))`.
pub fn c_first_row(k: usize) -> BigRational {
    let k = k as i64;
    ratio(2 * k * k + 14 * k, (k + 1) * (k + 2) * (k + 3) * (k + 4))
}

pub(crate) fn c_first_row_f64(k: usize) -> f64 {
    let k = k as f64;
    (2.0 * k * k + 14.0 * k) / ((k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0))
}

/// `c(l, k)` for `l <= lmax`, `k <= kmax`. The rectangle is closed under the
/// recurrence, so every entry is exact (or exact up to rounding in float mode).
pub fn c_table(lmax: usize, kmax: usize, mode: Mode) -> Result<AnalyticTable> {
    if lmax < 1 {
        return Err(Error::InvalidArgument("lmax must be at least 1".into()));
    }
    match mode {
        Mode::Float => Ok(AnalyticTable::finish(
            TableKind::C,
            mode,
            None,
            c_grid_f64(lmax, kmax),
        )),
        Mode::Exact => {
            let mut g = Grid::new(lmax + 1, kmax + 1, BigRational::zero());
            for k in 1..=kmax {
                *g.at_mut(1, k) = c_first_row(k);
            }
            for l in 2..=lmax {
                for k in 1..=kmax {
                    let v = (g.at(l, k - 1) * ratio((l + k - 1) as i64, 1)
                        + g.at(l - 1, k) * ratio((l - 1) as i64, 1))
                        / ratio((2 * l + k + 2) as i64, 1);
                    *g.at_mut(l, k) = v;
                }
            }
            let float = g.map(to_f64);
            Ok(AnalyticTable::finish(TableKind::C, mode, Some(g), float))
        }
    }
}

pub(crate) fn c_grid_f64(lmax: usize, kmax: usize) -> Grid<f64> {
    let mut g = Grid::new(lmax + 1, kmax + 1, 0.0);
    for k in 1..=kmax {
        *g.at_mut(1, k) = c_first_row_f64(k);
    }
    for l in 2..=lmax {
        for k in 1..=kmax {
            let (lf, kf) = (l as f64, k as f64);
            *g.at_mut(l, k) = (g.at(l, k - 1) * (lf + kf - 1.0) + g.at(l - 1, k) * (lf - 1.0))
                / (2.0 * lf + kf + 2.0);
        }
    }
    g
}

/// `p(l, k)`: `p(2, 0) = 1`, zero for `l < 2` and for `l = 2, k > 0`.
pub fn p_table(lmax: usize, kmax: usize, mode: Mode) -> Result<AnalyticTable> {
    if lmax < 2 {
        return Err(Error::InvalidArgument("lmax must be at least 2".into()));
    }
    match mode {
        Mode::Float => Ok(AnalyticTable::finish(
            TableKind::P,
            mode,
            None,
            p_grid_f64(lmax, kmax),
        )),
        Mode::Exact => {
            let mut g = Grid::new(lmax + 1, kmax + 1, BigRational::zero());
            *g.at_mut(2, 0) = BigRational::one();
            for l in 3..=lmax {
                for k in 0..=kmax {
                    let mut v = g.at(l - 1, k) * ratio((l - 1) as i64, 1);
                    if k > 0 {
                        v += g.at(l, k - 1) * ratio((l + k - 3) as i64, 1);
                    }
                    *g.at_mut(l, k) = v / ratio((2 * l + k - 2) as i64, 1);
                }
            }
            let float = g.map(to_f64);
            Ok(AnalyticTable::finish(TableKind::P, mode, Some(g), float))
        }
    }
}

pub(crate) fn p_grid_f64(lmax: usize, kmax: usize) -> Grid<f64> {
    let mut g = Grid::new(lmax + 1, kmax + 1, 0.0);
    *g.at_mut(2, 0) = 1.0;
    for l in 3..=lmax {
        for k in 0..=kmax {
            let (lf, kf) = (l as f64, k as f64);
            let mut v = g.at(l - 1, k) * (lf - 1.0);
            if k > 0 {
                v += g.at(l, k - 1) * (lf + kf - 3.0);
            }
            *g.at_mut(l, k) = v / (2.0 * lf + kf - 2.0);
        }
    }
    g
}

/// `4n / (d(d+1)(d+2))`.
pub fn m1_closed(n: u64, d: u64) -> Result<f64> {
    if d < 1 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let d = d as f64;
    Ok(4.0 * n as f64 / (d * (d + 1.0) * (d + 2.0)))
}

pub fn m1_closed_exact(n: u64, d: u64) -> Result<BigRational> {
    if d < 1 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let d = d as i64;
    Ok(ratio(4 * n as i64, d * (d + 1) * (d + 2)))
}

/// Leading term `4n / k^2` of the expected number of vertices with second degree `k`.
pub fn m2_leading(n: u64, k: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "second degree must be at least 1".into(),
        ));
    }
    Ok(4.0 * n as f64 / (k as f64 * k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_values() {
        let t = c_table(6, 6, Mode::Exact).unwrap();
        assert_eq!(t.exact(1, 2).unwrap(), &ratio(1, 10));
        assert_eq!(t.exact(1, 1).unwrap(), &ratio(2, 15));
        assert_eq!(t.exact(2, 1).unwrap(), &ratio(2, 105));
        assert!(t.exact(5, 0).unwrap().is_zero());
        assert!(t.exact(0, 3).unwrap().is_zero());
        assert_eq!(t.get(1, 2), 0.1);
    }

    #[test]
    fn p_values() {
        let t = p_table(6, 6, Mode::Exact).unwrap();
        assert!(t.exact(2, 0).unwrap().is_one());
        assert_eq!(t.exact(4, 0).unwrap(), &ratio(1, 4));
        assert_eq!(t.exact(3, 1).unwrap(), &ratio(1, 10));
        for l in 2..=6 {
            assert_eq!(t.exact(l, 0).unwrap(), &ratio(1, 1 << (l - 2)));
        }
        for k in 1..=6 {
            assert!(t.exact(2, k).unwrap().is_zero());
            assert!(t.exact(1, k).unwrap().is_zero());
        }
    }

    #[test]
    fn modes_agree() {
        let e = c_table(40, 40, Mode::Exact).unwrap();
        let f = c_table(40, 40, Mode::Float).unwrap();
        let pe = p_table(40, 40, Mode::Exact).unwrap();
        let pf = p_table(40, 40, Mode::Float).unwrap();
        for l in 0..=40 {
            for k in 0..=40 {
                for (a, b) in [(e.get(l, k), f.get(l, k)), (pe.get(l, k), pf.get(l, k))] {
                    assert!(
                        a == b || ((a - b) / a).abs() < 1e-12,
                        "({l},{k}): {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert!((m1_closed(30, 1).unwrap() - 20.0).abs() < 1e-12);
        assert!((m1_closed(30, 2).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(m1_closed(0, 7).unwrap(), 0.0);
        assert!(m1_closed(5, 0).is_err());
        assert_eq!(m1_closed_exact(9, 1).unwrap(), ratio(6, 1));
        assert_eq!(m2_leading(1_000_000, 100).unwrap(), 400.0);
        assert_eq!(m2_leading(17, 2).unwrap(), 17.0);
        assert!(m2_leading(5, 0).is_err());
    }

    #[test]
    fn rejects_degenerate_windows() {
        assert!(c_table(0, 5, Mode::Float).is_err());
        assert!(p_table(1, 5, Mode::Exact).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = c_table(1, 2, Mode::Exact).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("# pa-secdeg v1 kind=ctable lmax=1 kmax=2 mode=exact\nl,k,value\n"));
        assert!(s.contains("\n1,2,1/10\n"));
        assert!(s.ends_with('\n'));
    }
}
