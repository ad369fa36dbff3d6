use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::tail::{estimate_c_tail, TailConfig};
use super::{AnalyticTable, TableKind};
use crate::numeric::{ratio, to_f64, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityOptions {
    /// Tolerance for the total and row sums after tail correction.
    pub tol: f64,
    /// Tolerance for the column identity residual.
    pub z_tol: f64,
    /// Rows `1..=rows` get a row-sum check.
    pub rows: usize,
    /// Columns `1..=z_columns` get the column identity check.
    pub z_columns: usize,
    /// `None` reports raw truncated sums only.
    pub tail: Option<TailConfig>,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            z_tol: 1e-9,
            rows: 20,
            z_columns: 50,
            tail: Some(TailConfig::default()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SumCheck {
    pub truncated: f64,
    pub tail: f64,
    pub expected: f64,
    /// `|truncated - expected|`.
    pub raw_residual: f64,
    /// `|truncated + tail - expected|`.
    pub residual: f64,
    pub pass: bool,
}

impl SumCheck {
    fn new(truncated: f64, tail: f64, expected: f64, tol: f64) -> Self {
        let residual = (truncated + tail - expected).abs();
        Self {
            truncated,
            tail,
            expected,
            raw_residual: (truncated - expected).abs(),
            residual,
            pass: residual < tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RowCheck {
    pub l: usize,
    #[serde(flatten)]
    pub sum: SumCheck,
}

/// `sum_{l>=2} (l+k) l (l+1) c(l,k)` against `6 sum_{s<=k} c(1,s)`.
#[derive(Debug, Clone, Serialize)]
pub struct ZCheck {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative up to rounding since every omitted term is positive.
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PViolation {
    pub l: usize,
    pub k: usize,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PBoundCheck {
    pub cells: usize,
    /// Largest `p(l,k) l (l+1) / 6` over the table.
    pub worst_ratio: f64,
    pub violations: Vec<PViolation>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub lmax: usize,
    pub kmax: usize,
    pub mode: Mode,
    pub options: IdentityOptions,
    pub total: SumCheck,
    pub rows: Vec<RowCheck>,
    pub z: Vec<ZCheck>,
    pub p_bound: Option<PBoundCheck>,
    pub pass: bool,
}

/// Panics if the tables have the wrong kinds.
pub fn identity_checks(
    c: &AnalyticTable,
    p: Option<&AnalyticTable>,
    opts: &IdentityOptions,
) -> IdentityReport {
    assert_eq!(c.kind, TableKind::C, "first table must be a c-table");
    let (lmax, kmax) = (c.lmax, c.kmax);
    let tail = opts.tail.map(|cfg| {
        let cfg = TailConfig {
            l_ext: cfg.l_ext.max(lmax),
            k_ext: cfg.k_ext.max(kmax + 1),
        };
        estimate_c_tail(lmax, kmax, cfg)
    });

    let g = c.float_grid();
    let total_truncated: f64 = (0..=lmax).map(|l| g.row(l).iter().sum::<f64>()).sum();
    let total = SumCheck::new(
        total_truncated,
        tail.as_ref().map_or(0.0, |t| t.total_tail),
        1.0,
        opts.tol,
    );

    let rows: Vec<RowCheck> = (1..=opts.rows.min(lmax))
        .map(|l| {
            let lf = l as f64;
            RowCheck {
                l,
                sum: SumCheck::new(
                    g.row(l).iter().sum(),
                    tail.as_ref().map_or(0.0, |t| t.row_tail[l]),
                    4.0 / (lf * (lf + 1.0) * (lf + 2.0)),
                    opts.tol,
                ),
            }
        })
        .collect();

    let z = (1..=opts.z_columns.min(kmax))
        .map(|k| {
            let (lhs, rhs, residual) = match c.exact(1, k) {
                Some(_) => {
                    let mut lhs = BigRational::zero();
                    for l in 2..=lmax {
                        lhs += c.exact(l, k).unwrap() * ratio(((l + k) * l * (l + 1)) as i64, 1);
                    }
                    let mut rhs = BigRational::zero();
                    for s in 1..=k {
                        rhs += c.exact(1, s).unwrap();
                    }
                    rhs *= ratio(6, 1);
                    let residual = to_f64(&(&rhs - &lhs));
                    (to_f64(&lhs), to_f64(&rhs), residual)
                }
                None => {
                    let lhs: f64 = (2..=lmax)
                        .map(|l| ((l + k) * l * (l + 1)) as f64 * c.get(l, k))
                        .sum();
                    let rhs = 6.0 * (1..=k).map(|s| c.get(1, s)).sum::<f64>();
                    (lhs, rhs, rhs - lhs)
                }
            };
            ZCheck {
                k,
                lhs,
                rhs,
                residual,
                pass: residual.abs() < opts.z_tol,
            }
        })
        .collect::<Vec<_>>();

    let p_bound = p.map(p_bound_check);

    let pass = total.pass
        && rows.iter().all(|r| r.sum.pass)
        && z.iter().all(|z| z.pass)
        && p_bound.as_ref().is_none_or(|p| p.pass);
    IdentityReport {
        lmax,
        kmax,
        mode: c.mode,
        options: *opts,
        total,
        rows,
        z,
        p_bound,
        pass,
    }
}

/// `p(l,k) <= 6 / (l(l+1))` over every cell with `l >= 1`.
pub fn p_bound_check(p: &AnalyticTable) -> PBoundCheck {
    assert_eq!(p.kind, TableKind::P, "expected a p-table");
    let mut cells = 0;
    let mut worst_ratio = 0.0f64;
    let mut violations = Vec::new();
    for l in 1..=p.lmax {
        let w = (l * (l + 1)) as i64;
        let bound = 6.0 / w as f64;
        for k in 0..=p.kmax {
            cells += 1;
            let value = p.get(l, k);
            let over = match p.exact(l, k) {
                Some(v) => v * ratio(w, 1) > ratio(6, 1),
                None => value > bound * (1.0 + 1e-12),
            };
            worst_ratio = worst_ratio.max(value / bound);
            if over {
                violations.push(PViolation { l, k, value, bound });
            }
        }
    }
    PBoundCheck {
        cells,
        worst_ratio,
        pass: violations.is_empty(),
        violations,
    }
}
