use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{ExactValues, ExpectationTable, Provenance};
use crate::error::{Error, Result};
use crate::numeric::{Grid, Mode};

/// Runs the recurrences from `G_1^1` (one looped vertex) to `G_1^n`.
///
/// Every in-window value is exact: `EN(l,k)` only reads `EN(l-1,k)`,
/// `EN(l,k-1)` and, for `l = 1`, `M1(k)`, so the rectangle is closed once
/// `M1` is carried up to `max(dmax, kmax)`.
pub fn dp_expectations(
    n: usize,
    lmax: usize,
    kmax: usize,
    dmax: usize,
    mode: Mode,
) -> Result<ExpectationTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if lmax < 2 || kmax < 1 || dmax < 2 {
        return Err(Error::Window(format!(
            "need lmax >= 2, kmax >= 1, dmax >= 2 to hold the initial state, got {lmax}x{kmax}, dmax={dmax}"
        )));
    }
    Ok(match mode {
        Mode::Exact => exact(n, lmax, kmax, dmax),
        Mode::Float => float(n, lmax, kmax, dmax),
    })
}

/// `u <- u (q - a)`; a negative factor may only ever meet a zero.
fn keep(u: &mut BigUint, q: usize, a: usize, what: &str) {
    if a > q {
        assert!(
            u.is_zero(),
            "{what}: negative coefficient on a nonzero value"
        );
    } else if !u.is_zero() {
        *u *= (q - a) as u64;
    }
}

fn exact(n: usize, lmax: usize, kmax: usize, dmax: usize) -> ExpectationTable {
    let dm = dmax.max(kmax);
    let zero = BigUint::zero();
    let mut en = Grid::new(lmax + 1, kmax + 1, zero.clone());
    let mut ep = Grid::new(lmax + 1, kmax + 1, zero.clone());
    let mut m1 = vec![zero; dm + 1];
    *ep.at_mut(2, 0) = BigUint::one();
    m1[2] = BigUint::one();
    // scale = (2i-1)!!
    let mut scale = BigUint::one();

    for i in 1..n {
        let q = 2 * i + 1;
        let cap = 2 * (i + 1);

        // Descending sweeps read predecessors before they are overwritten.
        for l in (1..=lmax).rev() {
            for k in (1..=kmax.min(cap.saturating_sub(2 * l))).rev() {
                let (a, inflow) = if l == 1 {
                    (k + 2, en.at(1, k - 1) * k as u64 + &m1[k] * k as u64)
                } else {
                    (
                        2 * l + k,
                        en.at(l - 1, k) * (l - 1) as u64 + en.at(l, k - 1) * (l + k - 1) as u64,
                    )
                };
                let u = en.at_mut(l, k);
                keep(u, q, a, "EN");
                *u += inflow;
            }
        }

        for l in (2..=lmax).rev() {
            for k in (0..=kmax.min((cap + 2).saturating_sub(2 * l))).rev() {
                let (a, inflow) = if l == 2 {
                    if k > 0 {
                        continue;
                    }
                    (2, scale.clone())
                } else {
                    let mut v = ep.at(l - 1, k) * (l - 1) as u64;
                    if k > 0 {
                        v += ep.at(l, k - 1) * (l + k - 3) as u64;
                    }
                    (2 * l + k - 2, v)
                };
                let u = ep.at_mut(l, k);
                keep(u, q, a, "EP");
                *u += inflow;
            }
        }

        for d in (1..=dm.min(i + 2)).rev() {
            let inflow = match d {
                1 => &scale * (2 * i) as u64,
                2 => &m1[1] + &scale,
                _ => &m1[d - 1] * (d - 1) as u64,
            };
            keep(&mut m1[d], q, d, "M1");
            m1[d] += inflow;
        }

        scale *= q as u64;
    }

    m1.truncate(dmax + 1);
    ExpectationTable::from_exact(n, Provenance::Dp, ExactValues { scale, en, ep, m1 })
}

fn float(n: usize, lmax: usize, kmax: usize, dmax: usize) -> ExpectationTable {
    let dm = dmax.max(kmax);
    let mut en = Grid::new(lmax + 1, kmax + 1, 0.0f64);
    let mut ep = en.clone();
    let mut en_next = en.clone();
    let mut ep_next = en.clone();
    let mut m1 = vec![0.0f64; dm + 1];
    let mut m1_next = m1.clone();
    *ep.at_mut(2, 0) = 1.0;
    m1[2] = 1.0;
    // `usize -> f64` conversions do not vectorize; read k from a table.
    let ks: Vec<f64> = (0..=kmax).map(|k| k as f64).collect();
    // Largest spoil coefficient in the window; past it no factor is negative.
    let amax = (2 * lmax + kmax).max(dm);

    for i in 1..n {
        let q = 2 * i + 1;
        let r = 1.0 / q as f64;
        let cap = 2 * (i + 1);
        if q < amax {
            assert_negative_factors_meet_zeros(&en, &ep, &m1, q);
        }

        for l in 1..=lmax {
            let hi = kmax.min(cap.saturating_sub(2 * l));
            if hi == 0 {
                continue;
            }
            let out = &mut en_next.row_mut(l)[..=hi];
            let old = &en.row(l)[..=hi];
            if l == 1 {
                en_first_row(out, old, &m1[..=hi], &ks[..=hi], r);
            } else {
                en_row(out, old, &en.row(l - 1)[..=hi], &ks[..=hi], l as f64, r);
            }
        }

        *ep_next.at_mut(2, 0) = ep.at(2, 0) * (1.0 - 2.0 * r) + r;
        for l in 3..=lmax {
            let Some(hi) = (cap + 2).checked_sub(2 * l).map(|h| h.min(kmax)) else {
                continue;
            };
            let out = &mut ep_next.row_mut(l)[..=hi];
            ep_row(
                out,
                &ep.row(l)[..=hi],
                &ep.row(l - 1)[..=hi],
                &ks[..=hi],
                l as f64,
                r,
            );
        }

        let top = dm.min(i + 2);
        m1_next[1] = m1[1] * (1.0 - r) + 2.0 * i as f64 * r;
        m1_next[2] = m1[2] * (1.0 - 2.0 * r) + (m1[1] + 1.0) * r;
        for d in 3..=top {
            let df = d as f64;
            m1_next[d] = m1[d] * (1.0 - df * r) + (df - 1.0) * m1[d - 1] * r;
        }

        std::mem::swap(&mut en, &mut en_next);
        std::mem::swap(&mut ep, &mut ep_next);
        std::mem::swap(&mut m1, &mut m1_next);
    }

    m1.truncate(dmax + 1);
    ExpectationTable::from_float(n, Provenance::Dp, en, ep, m1)
}

/// Only cells on the anti-diagonals just past the reachable range can meet
/// a negative factor in this step.
fn assert_negative_factors_meet_zeros(en: &Grid<f64>, ep: &Grid<f64>, m1: &[f64], q: usize) {
    let lmax = en.rows() - 1;
    let cell =
        |g: &Grid<f64>, l: usize, s: usize| s.checked_sub(2 * l).and_then(|k| g.get(l, k).copied());
    for s in q + 1..=q + 3 {
        for l in 1..=lmax {
            let a = cell(en, l, s).unwrap_or(0.0);
            let b = if l >= 3 {
                cell(ep, l, s + 2).unwrap_or(0.0)
            } else {
                0.0
            };
            assert!(
                a == 0.0 && b == 0.0,
                "negative coefficient on a nonzero value"
            );
        }
    }
    assert!(
        m1.iter().skip(q + 1).all(|&v| v == 0.0),
        "M1: negative coefficient on a nonzero value"
    );
}

// Row kernels: slices are cut to the active range so the loops carry no
// bounds checks and vectorize.

fn en_first_row(out: &mut [f64], old: &[f64], m1: &[f64], ks: &[f64], r: f64) {
    let len = out.len();
    let (old, m1, ks) = (&old[..len], &m1[..len], &ks[..len]);
    for k in 1..out.len() {
        let kf = ks[k];
        out[k] = old[k] * (1.0 - (kf + 2.0) * r) + kf * (old[k - 1] + m1[k]) * r;
    }
}

fn en_row(out: &mut [f64], old: &[f64], prev: &[f64], ks: &[f64], lf: f64, r: f64) {
    let len = out.len();
    let (old, prev, ks) = (&old[..len], &prev[..len], &ks[..len]);
    for k in 1..out.len() {
        let kf = ks[k];
        out[k] = old[k] * (1.0 - (2.0 * lf + kf) * r)
            + ((lf - 1.0) * prev[k] + (lf + kf - 1.0) * old[k - 1]) * r;
    }
}

fn ep_row(out: &mut [f64], old: &[f64], prev: &[f64], ks: &[f64], lf: f64, r: f64) {
    let len = out.len();
    let (old, prev, ks) = (&old[..len], &prev[..len], &ks[..len]);
    out[0] = old[0] * (1.0 - (2.0 * lf - 2.0) * r) + (lf - 1.0) * prev[0] * r;
    for k in 1..out.len() {
        let kf = ks[k];
        out[k] = old[k] * (1.0 - (2.0 * lf + kf - 2.0) * r)
            + ((lf - 1.0) * prev[k] + (lf + kf - 3.0) * old[k - 1]) * r;
    }
}
