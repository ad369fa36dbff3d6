use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{c_grid_f64, AnalyticTable, TableKind};
use crate::error::{Error, Result};
use crate::numeric::{ln_falling, ln_rational, ratio, to_f64};

/// Constructive constants for `c(l, k) <= C(k) 2^{-l} (l-1)!/(l-k)!`,
/// `l >= k >= 1`, stored as `ln C(k)`.
///
/// `C(0) = 0` and `C(k) = max(C(k-1), c(k, k) 2^k / (k-1)!)`: the bound is
/// tight on the diagonal and the induction in `l` carries it down each column.
#[derive(Debug, Clone, Serialize)]
pub struct CBound {
    ln_c: Vec<f64>,
}

impl CBound {
    /// Needs the diagonal `c(k, k)` for every `k <= kmax`.
    pub fn from_table(table: &AnalyticTable, kmax: usize) -> Result<Self> {
        if table.kind != TableKind::C {
            return Err(Error::InvalidArgument("C(k) needs a c-table".into()));
        }
        if table.lmax < kmax || table.kmax < kmax {
            return Err(Error::Window(format!(
                "C(k) up to k={kmax} needs the diagonal of a {kmax}x{kmax} table"
            )));
        }
        let diag = |k: usize| match table.exact(k, k) {
            Some(v) => ln_rational(v),
            None => table.get(k, k).ln(),
        };
        Ok(Self::from_diagonal(kmax, diag))
    }

    /// Float-only variant that builds its own `kmax x kmax` table.
    pub fn compute(kmax: usize) -> Self {
        let g = c_grid_f64(kmax.max(1), kmax);
        Self::from_diagonal(kmax, |k| g.at(k, k).ln())
    }

    fn from_diagonal(kmax: usize, ln_diag: impl Fn(usize) -> f64) -> Self {
        let mut ln_c = vec![f64::NEG_INFINITY; kmax + 1];
        let mut ln_fact = 0.0; // ln (k-1)!
        for k in 1..=kmax {
            if k >= 2 {
                ln_fact += ((k - 1) as f64).ln();
            }
            let candidate = ln_diag(k) + k as f64 * std::f64::consts::LN_2 - ln_fact;
            ln_c[k] = ln_c[k - 1].max(candidate);
        }
        Self { ln_c }
    }

    pub fn kmax(&self) -> usize {
        self.ln_c.len() - 1
    }

    pub fn ln_constant(&self, k: usize) -> f64 {
        self.ln_c[k]
    }

    /// `ln` of the bound on `c(l, k)`; requires `l >= k`.
    pub fn ln_bound(&self, l: usize, k: usize) -> f64 {
        assert!(l >= k, "bound only holds for l >= k");
        if k == 0 {
            return f64::NEG_INFINITY;
        }
        self.ln_c[k] - l as f64 * std::f64::consts::LN_2 + ln_falling(l, k)
    }

    /// Upper bound on `sum_{l >= from} w(l) c(l, k)` for `from >= k`, where
    /// `w(l+1)/w(l)` is non-increasing.
    pub fn tail_sum(&self, k: usize, from: usize, ln_w: impl Fn(usize) -> f64) -> f64 {
        assert!(from >= k.max(1));
        if k == 0 || self.ln_c[k] == f64::NEG_INFINITY {
            return 0.0;
        }
        let mut l = from;
        let mut ln_term = self.ln_bound(l, k) + ln_w(l);
        let mut sum = 0.0;
        loop {
            let term = ln_term.exp();
            sum += term;
            // Consecutive-term ratio (1/2) l/(l+1-k) w(l+1)/w(l) only decreases.
            let ln_ratio = (l as f64).ln() - ((l + 1 - k) as f64).ln() - std::f64::consts::LN_2
                + ln_w(l + 1)
                - ln_w(l);
            if ln_ratio < (0.75f64).ln() {
                let r = ln_ratio.exp();
                return sum + term * r / (1.0 - r);
            }
            ln_term += ln_ratio;
            l += 1;
        }
    }
}

/// `x_k = sum_{l>=2} c(l,k)`, `y_k = sum l c(l,k)`, `z_k = sum l(l+1) c(l,k)`.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnMoments {
    pub k: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Upper bounds on the truncated parts `l > lmax`.
    pub x_tail: f64,
    pub y_tail: f64,
    pub z_tail: f64,
    /// Set when `lmax < k`: rows `lmax < l < k` are outside the reach of the
    /// `C(k)` bound and their tail uses the row sums `4/(l(l+1)(l+2))` instead.
    pub row_sum_fallback: bool,
}

pub fn column_moments(table: &AnalyticTable, k: usize, tol: f64) -> Result<ColumnMoments> {
    if table.kind != TableKind::C {
        return Err(Error::InvalidArgument(
            "column moments need a c-table".into(),
        ));
    }
    if k > table.kmax {
        return Err(Error::Window(format!(
            "column {k} beyond kmax={}",
            table.kmax
        )));
    }
    let lmax = table.lmax;
    let (x, y, z) = match table.exact(0, 0) {
        Some(_) => {
            let (mut x, mut y, mut z) = (
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
            );
            for l in 2..=lmax {
                let c = table.exact(l, k).expect("exact table");
                x += c;
                y += c * ratio(l as i64, 1);
                z += c * ratio((l * (l + 1)) as i64, 1);
            }
            (to_f64(&x), to_f64(&y), to_f64(&z))
        }
        None => (2..=lmax).fold((0.0, 0.0, 0.0), |(x, y, z), l| {
            let c = table.get(l, k);
            let lf = l as f64;
            (x + c, y + lf * c, z + lf * (lf + 1.0) * c)
        }),
    };

    let weights: [fn(usize) -> f64; 3] = [
        |_| 0.0,
        |l| (l as f64).ln(),
        |l| (l as f64).ln() + ((l + 1) as f64).ln(),
    ];
    let mut tails = [0.0; 3];
    let mut row_sum_fallback = false;
    if k >= 1 {
        let bound = if lmax >= k {
            CBound::from_table(table, k)?
        } else {
            CBound::compute(k)
        };
        let start = (lmax + 1).max(k);
        for (tail, w) in tails.iter_mut().zip(weights) {
            *tail = bound.tail_sum(k, start, w);
            for l in (lmax + 1)..k {
                row_sum_fallback = true;
                let lf = l as f64;
                *tail += 4.0 / (lf * (lf + 1.0) * (lf + 2.0)) * w(l).exp();
            }
        }
    }
    if let Some(&worst) = tails.iter().max_by(|a, b| a.total_cmp(b)) {
        if worst > tol {
            return Err(Error::Tolerance { k, lmax, tol });
        }
    }
    Ok(ColumnMoments {
        k,
        x,
        y,
        z,
        x_tail: tails[0],
        y_tail: tails[1],
        z_tail: tails[2],
        row_sum_fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::c_table;
    use crate::numeric::Mode;

    #[test]
    fn bound_holds_cell_by_cell() {
        let t = c_table(120, 60, Mode::Exact).unwrap();
        let b = CBound::from_table(&t, 60).unwrap();
        for k in 1..=60 {
            for l in k..=120 {
                let ln_c = ln_rational(t.exact(l, k).unwrap());
                assert!(
                    ln_c <= b.ln_bound(l, k) + 1e-9,
                    "c({l},{k}) above its bound"
                );
            }
        }
    }

    #[test]
    fn constants_are_monotone() {
        let b = CBound::compute(80);
        assert_eq!(b.ln_constant(0), f64::NEG_INFINITY);
        for k in 1..80 {
            assert!(b.ln_constant(k + 1) >= b.ln_constant(k));
        }
    }

    #[test]
    fn first_column() {
        let t = c_table(600, 50, Mode::Float).unwrap();
        let m = column_moments(&t, 0, 0.0).unwrap();
        assert_eq!((m.x, m.y, m.z), (0.0, 0.0, 0.0));
        for k in 1..=50 {
            let m = column_moments(&t, k, 1e-12).unwrap();
            assert!(m.x <= m.y / 2.0 + 1e-18 && m.y / 2.0 <= m.z / 6.0 + 1e-18);
            assert!(!m.row_sum_fallback);
        }
    }

    #[test]
    fn z_is_bounded_by_first_row_mass() {
        let t = c_table(600, 60, Mode::Float).unwrap();
        for k in 1..=60 {
            let m = column_moments(&t, k, 1e-9).unwrap();
            let rhs: f64 = 6.0 * (1..=k).map(|s| t.get(1, s)).sum::<f64>() / k as f64;
            assert!(m.z <= rhs * (1.0 + 1e-12), "k={k}: z={} rhs={rhs}", m.z);
        }
    }

    #[test]
    fn x_approaches_two_over_k_squared() {
        // |x_k - 2/((k+1)(k+2))| k^3 / ln^2 k stays bounded.
        let t = c_table(600, 50, Mode::Float).unwrap();
        let scaled: Vec<f64> = (2..=50)
            .map(|k| {
                let m = column_moments(&t, k, 1e-9).unwrap();
                let kf = k as f64;
                (m.x - 2.0 / ((kf + 1.0) * (kf + 2.0))).abs() * kf.powi(3) / kf.ln().powi(2)
            })
            .collect();
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        assert!(max < 10.0, "scaled residual {max}");
    }

    #[test]
    fn loose_constants_limit_the_reachable_columns() {
        // C(k) never drops below C(1) = 4/15, so at l = 300 the bound is
        // useless beyond k ~ 37.
        let t = c_table(300, 40, Mode::Float).unwrap();
        assert!(column_moments(&t, 30, 1e-9).is_ok());
        assert!(column_moments(&t, 40, 1.0).is_err());
    }

    #[test]
    fn short_table_falls_back_to_row_sums() {
        let t = c_table(10, 30, Mode::Float).unwrap();
        let m = column_moments(&t, 30, f64::INFINITY).unwrap();
        assert!(m.row_sum_fallback);
        assert!(m.x_tail > 0.0);
        assert!(matches!(
            column_moments(&t, 30, 1e-12),
            Err(Error::Tolerance { .. })
        ));
    }
}
