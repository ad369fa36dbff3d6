//! Exact expectations `E N_n(l,k)`, `E P_n(l,k)` and `M1_n(d)` by two
//! independent routes: the conditional-expectation recurrences, and brute
//! force over every slot sequence of a small graph.
//!
//! Exact values are stored as integers over the common scale `(2n-1)!!`,
//! the number of equally likely slot sequences. Enumeration counts are
//! already in that form, and the recurrences stay integral after
//! multiplying step `i` by `(2i-1)!!`, so both routes compare numerator to
//! numerator.

mod diff;
mod dp;
mod enumerate;

pub use diff::{compare, dp_vs_enum, lemma2_exceptions, CellRef, DiffReport, Lemma2Exception};
pub use dp::dp_expectations;
pub use enumerate::{enumerate_exact, enumerate_exact_with_cap, DEFAULT_ENUM_CAP};

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::numeric::{big_ratio_f64, Grid, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Dp,
    Enumeration,
}

/// Integer numerators over `scale = (2n-1)!!`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValues {
    pub scale: BigUint,
    pub en: Grid<BigUint>,
    pub ep: Grid<BigUint>,
    pub m1: Vec<BigUint>,
}

/// Expectations over the window `l <= lmax`, `k <= kmax`, `d <= dmax`.
/// Accessors return `None` outside the window.
#[derive(Debug, Clone)]
pub struct ExpectationTable {
    pub n: usize,
    pub lmax: usize,
    pub kmax: usize,
    pub dmax: usize,
    pub mode: Mode,
    pub provenance: Provenance,
    exact: Option<ExactValues>,
    en: Grid<f64>,
    ep: Grid<f64>,
    m1: Vec<f64>,
}

fn rational(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

impl ExpectationTable {
    pub(crate) fn from_exact(n: usize, provenance: Provenance, exact: ExactValues) -> Self {
        let s = &exact.scale;
        let en = exact.en.map(|v| big_ratio_f64(v, s));
        let ep = exact.ep.map(|v| big_ratio_f64(v, s));
        let m1 = exact.m1.iter().map(|v| big_ratio_f64(v, s)).collect();
        Self {
            n,
            lmax: en.rows() - 1,
            kmax: en.cols() - 1,
            dmax: exact.m1.len() - 1,
            mode: Mode::Exact,
            provenance,
            exact: Some(exact),
            en,
            ep,
            m1,
        }
    }

    pub(crate) fn from_float(
        n: usize,
        provenance: Provenance,
        en: Grid<f64>,
        ep: Grid<f64>,
        m1: Vec<f64>,
    ) -> Self {
        Self {
            n,
            lmax: en.rows() - 1,
            kmax: en.cols() - 1,
            dmax: m1.len() - 1,
            mode: Mode::Float,
            provenance,
            exact: None,
            en,
            ep,
            m1,
        }
    }

    /// Drops the exact numerators.
    pub fn into_float(mut self) -> Self {
        self.exact = None;
        self.mode = Mode::Float;
        self
    }

    pub fn exact(&self) -> Option<&ExactValues> {
        self.exact.as_ref()
    }

    pub fn en(&self, l: usize, k: usize) -> Option<f64> {
        self.en.get(l, k).copied()
    }

    pub fn ep(&self, l: usize, k: usize) -> Option<f64> {
        self.ep.get(l, k).copied()
    }

    pub fn m1(&self, d: usize) -> Option<f64> {
        self.m1.get(d).copied()
    }

    pub fn en_exact(&self, l: usize, k: usize) -> Option<BigRational> {
        let e = self.exact.as_ref()?;
        e.en.get(l, k).map(|v| rational(v, &e.scale))
    }

    pub fn ep_exact(&self, l: usize, k: usize) -> Option<BigRational> {
        let e = self.exact.as_ref()?;
        e.ep.get(l, k).map(|v| rational(v, &e.scale))
    }

    pub fn m1_exact(&self, d: usize) -> Option<BigRational> {
        let e = self.exact.as_ref()?;
        e.m1.get(d).map(|v| rational(v, &e.scale))
    }

    /// `sum_{l <= lmax} EN(l,k) + EP(l,k)`, which is `E X_n(k)` once the
    /// window holds every row that can carry second degree `k`.
    pub fn column_sum(&self, k: usize) -> Option<f64> {
        (k <= self.kmax).then(|| {
            (0..=self.lmax)
                .map(|l| self.en.at(l, k) + self.ep.at(l, k))
                .sum()
        })
    }

    pub fn column_sum_exact(&self, k: usize) -> Option<BigRational> {
        let e = self.exact.as_ref()?;
        if k > self.kmax {
            return None;
        }
        let mut num = BigUint::zero();
        for l in 0..=self.lmax {
            num += e.en.at(l, k);
            num += e.ep.at(l, k);
        }
        Some(rational(&num, &e.scale))
    }

    /// True when no reachable cell lies outside the window: loopless
    /// vertices have `2l + k <= 2n`, looped ones `2l + k <= 2n + 2`, degrees
    /// are at most `n + 1`.
    pub fn covers_all(&self) -> bool {
        self.lmax > self.n && self.kmax >= 2 * self.n && self.dmax > self.n
    }

    /// `(sum EN + sum EP, sum M1)`; both equal `n` on a full window.
    pub fn mass(&self) -> (f64, f64) {
        let census = self.en.iter().chain(self.ep.iter()).map(|(_, v)| v).sum();
        (census, self.m1.iter().sum())
    }

    /// Exact analogue of [`mass`](Self::mass) as numerators over the scale.
    pub fn mass_exact(&self) -> Option<(BigUint, BigUint)> {
        let e = self.exact.as_ref()?;
        let census = e.en.iter().chain(e.ep.iter()).map(|(_, v)| v).sum();
        Some((census, e.m1.iter().sum()))
    }

    /// CSV `kind,l,k,value` over the nonzero cells. `M1` rows leave `l`
    /// empty and put `d` in the `k` column; exact values print as `num/den`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "{} kind=expectations n={} lmax={} kmax={} dmax={} mode={} provenance={}",
            crate::edgelist::MAGIC,
            self.n,
            self.lmax,
            self.kmax,
            self.dmax,
            self.mode,
            match self.provenance {
                Provenance::Dp => "dp",
                Provenance::Enumeration => "enumeration",
            }
        )?;
        writeln!(w, "kind,l,k,value")?;
        let exact = self.exact.as_ref();
        let fmt = |num: Option<&BigUint>, v: f64| match (num, exact) {
            (Some(num), Some(e)) => crate::numeric::rational_string(&rational(num, &e.scale)),
            _ => format!("{v:e}"),
        };
        for (name, grid, nums) in [
            ("EN", &self.en, exact.map(|e| &e.en)),
            ("EP", &self.ep, exact.map(|e| &e.ep)),
        ] {
            for ((l, k), &v) in grid.iter() {
                if v != 0.0 || nums.is_some_and(|g| !g.at(l, k).is_zero()) {
                    writeln!(w, "{name},{l},{k},{}", fmt(nums.map(|g| g.at(l, k)), v))?;
                }
            }
        }
        for (d, &v) in self.m1.iter().enumerate() {
            let num = exact.map(|e| &e.m1[d]);
            if v != 0.0 || num.is_some_and(|x| !x.is_zero()) {
                writeln!(w, "M1,,{d},{}", fmt(num, v))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells = |g: &Grid<f64>| {
            g.iter()
                .filter(|(_, &v)| v != 0.0)
                .map(|((l, k), &v)| serde_json::json!([l, k, v]))
                .collect::<Vec<_>>()
        };
        serde_json::json!({
            "version": crate::VERSION_TAG,
            "n": self.n,
            "lmax": self.lmax,
            "kmax": self.kmax,
            "dmax": self.dmax,
            "mode": self.mode,
            "provenance": self.provenance,
            "EN": cells(&self.en),
            "EP": cells(&self.ep),
            "M1": self.m1.iter().enumerate().filter(|(_, &v)| v != 0.0)
                .map(|(d, &v)| serde_json::json!([d, v])).collect::<Vec<_>>(),
        })
    }
}
