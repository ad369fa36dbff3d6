//! Mass of the `c`-table outside a truncation rectangle.
//!
//! Rows of `c` decay like `1/k^2` in `k`, so a few hundred columns leave
//! percent-level mass behind. The estimate extends the recurrence in `f64`
//! to a much larger rectangle and closes the remaining column tail with the
//! first-order rule `sum_{j > K} a_j ~ (K - 1/2) a_K`, exact for `a_j ~ A/j^2`
//! up to `O(K^{-3})`. Rows past the extension are closed the same way from
//! the `A/l^3` decay of row masses.

use serde::Serialize;

use super::c_first_row_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TailConfig {
    pub l_ext: usize,
    pub k_ext: usize,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self {
            l_ext: 2_000,
            k_ext: 100_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub config: TailConfig,
    /// `row_tail[l]`: estimated `sum_{k > kmax} c(l, k)` for `l <= lmax`.
    pub row_tail: Vec<f64>,
    /// Estimated mass of every cell outside `[0, lmax] x [0, kmax]`.
    pub total_tail: f64,
    /// Mass of the last extension row, which also sets the closing term for
    /// the rows beyond it.
    pub boundary_row_mass: f64,
}

pub fn estimate_c_tail(lmax: usize, kmax: usize, config: TailConfig) -> TailEstimate {
    let TailConfig { l_ext, k_ext } = config;
    assert!(
        l_ext >= lmax && k_ext > kmax,
        "extension must contain the table"
    );
    let closing = k_ext as f64 - 0.5;

    let mut prev = vec![0.0f64; k_ext + 1];
    let mut cur = vec![0.0f64; k_ext + 1];
    let mut row_tail = vec![0.0; lmax + 1];
    let mut total_tail = 0.0;
    let mut last_column = 0.0;
    let mut boundary_row_mass = 0.0;

    for l in 1..=l_ext {
        if l == 1 {
            for (k, v) in cur.iter_mut().enumerate() {
                *v = c_first_row_f64(k);
            }
        } else {
            let lf = l as f64;
            cur[0] = 0.0;
            for k in 1..=k_ext {
                let kf = k as f64;
                cur[k] =
                    (cur[k - 1] * (lf + kf - 1.0) + prev[k] * (lf - 1.0)) / (2.0 * lf + kf + 2.0);
            }
        }
        let first_outside = if l <= lmax { kmax + 1 } else { 1 };
        let outside: f64 = cur[first_outside..].iter().sum();
        total_tail += outside;
        if l <= lmax {
            row_tail[l] = outside + closing * cur[k_ext];
        }
        last_column += cur[k_ext];
        if l == l_ext {
            boundary_row_mass = cur.iter().sum::<f64>() + closing * cur[k_ext];
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    total_tail += closing * last_column;
    // Row masses decay like A/l^3; sum_{l > L} l^{-3} ~ 1/(2 (L + 1/2)^2).
    let lf = l_ext as f64;
    total_tail += boundary_row_mass * lf.powi(3) / (2.0 * (lf + 0.5).powi(2));

    TailEstimate {
        config,
        row_tail,
        total_tail,
        boundary_row_mass,
    }
}
