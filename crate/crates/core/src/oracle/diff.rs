use num_traits::Zero;
use serde::Serialize;

use super::{dp_expectations, enumerate_exact_with_cap, ExpectationTable};
use crate::analytic::p_table;
use crate::error::Result;
use crate::numeric::{rational_string, to_f64, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellRef {
    EN(usize, usize),
    EP(usize, usize),
    M1(usize),
}

/// A cell where `E P_n(l,k)` exceeds the limiting bound `p(l,k)`.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Exception {
    pub l: usize,
    pub k: usize,
    pub value: String,
    pub bound: String,
    pub value_f64: f64,
    pub bound_f64: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffReport {
    pub n: usize,
    pub mode: Mode,
    pub cells_compared: usize,
    pub mismatches: usize,
    pub max_abs_diff: f64,
    pub worst_cell: Option<CellRef>,
    /// Both tables exact and every shared cell equal as a rational.
    pub identical: bool,
    /// Cells inside one window only, and nonzero there.
    pub uncovered: Vec<CellRef>,
    pub lemma2_exceptions: Vec<Lemma2Exception>,
}

impl DiffReport {
    /// Exact mode asks for identity; float mode for agreement within `tol`.
    pub fn pass(&self, tol: f64) -> bool {
        self.uncovered.is_empty()
            && match self.mode {
                Mode::Exact => self.identical,
                Mode::Float => self.max_abs_diff < tol,
            }
    }
}

/// Cell-by-cell comparison over the union of the two windows.
pub fn compare(a: &ExpectationTable, b: &ExpectationTable) -> DiffReport {
    let exact = match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => Some((x, y)),
        _ => None,
    };
    let mut r = DiffReport {
        n: a.n,
        mode: if exact.is_some() {
            Mode::Exact
        } else {
            Mode::Float
        },
        cells_compared: 0,
        mismatches: 0,
        max_abs_diff: 0.0,
        worst_cell: None,
        identical: exact.is_some() && a.n == b.n,
        uncovered: Vec::new(),
        lemma2_exceptions: Vec::new(),
    };

    let mut visit =
        |cell: CellRef, fa: Option<f64>, fb: Option<f64>, same: Option<bool>| match (fa, fb) {
            (Some(x), Some(y)) => {
                r.cells_compared += 1;
                let d = (x - y).abs();
                let differs = same.map_or(d != 0.0, |s| !s);
                if differs {
                    r.mismatches += 1;
                    r.identical = false;
                }
                if d > r.max_abs_diff || (differs && r.worst_cell.is_none()) {
                    r.max_abs_diff = r.max_abs_diff.max(d);
                    r.worst_cell = Some(cell);
                }
            }
            (Some(v), None) | (None, Some(v)) => {
                if v != 0.0 {
                    r.uncovered.push(cell);
                }
            }
            (None, None) => {}
        };

    // Cross-multiplied so tables with different scales still compare exactly.
    let same = |x: Option<&num_bigint::BigUint>, y: Option<&num_bigint::BigUint>| {
        let (ex, ey) = exact?;
        Some(x? * &ey.scale == y? * &ex.scale)
    };

    for l in 0..=a.lmax.max(b.lmax) {
        for k in 0..=a.kmax.max(b.kmax) {
            let s = same(
                exact.and_then(|(x, _)| x.en.get(l, k)),
                exact.and_then(|(_, y)| y.en.get(l, k)),
            );
            visit(CellRef::EN(l, k), a.en(l, k), b.en(l, k), s);
            let s = same(
                exact.and_then(|(x, _)| x.ep.get(l, k)),
                exact.and_then(|(_, y)| y.ep.get(l, k)),
            );
            visit(CellRef::EP(l, k), a.ep(l, k), b.ep(l, k), s);
        }
    }
    for d in 0..=a.dmax.max(b.dmax) {
        let s = same(
            exact.and_then(|(x, _)| x.m1.get(d)),
            exact.and_then(|(_, y)| y.m1.get(d)),
        );
        visit(CellRef::M1(d), a.m1(d), b.m1(d), s);
    }
    if a.n != b.n {
        r.identical = false;
    }
    r
}

/// Cells with `E P_n(l,k) > p(l,k)`, compared exactly when the table is exact.
pub fn lemma2_exceptions(t: &ExpectationTable) -> Result<Vec<Lemma2Exception>> {
    let mode = t.exact().map_or(Mode::Float, |_| Mode::Exact);
    let p = p_table(t.lmax.max(2), t.kmax, mode)?;
    let mut out = Vec::new();
    for l in 2..=t.lmax {
        for k in 0..=t.kmax {
            let (value, bound) = (t.ep(l, k).unwrap_or(0.0), p.get(l, k));
            let e = match (t.ep_exact(l, k), p.exact(l, k)) {
                (Some(v), Some(b)) if !v.is_zero() && &v > b => Lemma2Exception {
                    l,
                    k,
                    value: rational_string(&v),
                    bound: rational_string(b),
                    value_f64: to_f64(&v),
                    bound_f64: to_f64(b),
                },
                (None, _) if value > bound => Lemma2Exception {
                    l,
                    k,
                    value: format!("{value:e}"),
                    bound: format!("{bound:e}"),
                    value_f64: value,
                    bound_f64: bound,
                },
                _ => continue,
            };
            out.push(e);
        }
    }
    Ok(out)
}

/// Full-window DP against full enumeration at the same `n`. The
/// enumeration side is always exact; `mode` selects the DP arithmetic.
pub fn dp_vs_enum(n: usize, mode: Mode, cap: usize) -> Result<DiffReport> {
    let e = enumerate_exact_with_cap(n, cap)?;
    let d = dp_expectations(n, e.lmax, e.kmax, e.dmax, mode)?;
    let mut r = match mode {
        Mode::Exact => compare(&d, &e),
        Mode::Float => compare(&d, &e.clone().into_float()),
    };
    r.lemma2_exceptions = lemma2_exceptions(&e)?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_equals_enumeration() {
        for n in 1..=6 {
            let r = dp_vs_enum(n, Mode::Exact, 8).unwrap();
            assert!(r.identical && r.pass(0.0), "n={n}: {r:?}");
            assert_eq!(r.max_abs_diff, 0.0);
            assert!(r.uncovered.is_empty());
        }
    }

    #[test]
    fn float_dp_is_close() {
        let r = dp_vs_enum(5, Mode::Float, 8).unwrap();
        assert_eq!(r.mode, Mode::Float);
        assert!(r.max_abs_diff < 1e-12 && r.pass(1e-12));
    }

    #[test]
    fn small_n_lemma2_exception() {
        let r = dp_vs_enum(2, Mode::Exact, 8).unwrap();
        let e = r
            .lemma2_exceptions
            .iter()
            .find(|e| (e.l, e.k) == (3, 0))
            .unwrap();
        assert_eq!((e.value.as_str(), e.bound.as_str()), ("2/3", "1/2"));
    }

    #[test]
    fn mismatched_windows_are_flagged() {
        let a = dp_expectations(4, 5, 8, 5, Mode::Exact).unwrap();
        let b = dp_expectations(4, 3, 4, 5, Mode::Exact).unwrap();
        let r = compare(&a, &b);
        assert!(!r.uncovered.is_empty());
        assert!(r.identical);
        assert!(!r.pass(0.0));
    }

    #[test]
    fn different_n_differ() {
        let a = dp_expectations(4, 5, 8, 5, Mode::Exact).unwrap();
        let b = dp_expectations(5, 5, 8, 5, Mode::Exact).unwrap();
        let r = compare(&a, &b);
        assert!(!r.identical && r.mismatches > 0 && r.max_abs_diff > 0.0);
    }
}
