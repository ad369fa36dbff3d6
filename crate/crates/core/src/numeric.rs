//! Small numeric helpers shared by the analytic tables and the oracles.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected exact|float)")),
        }
    }
}

/// Dense row-major matrix indexed `(row, col)` from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn new(rows: usize, cols: usize, fill: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![fill; rows * cols],
        }
    }
}

impl<T> Grid<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&T> {
        (r < self.rows && c < self.cols).then(|| &self.data[r * self.cols + c])
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut T {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| ((i / cols, i % cols), v))
    }
}

/// `(2n - 1)!! = 1 * 3 * ... * (2n - 1)`, with `(-1)!! = 1` for `n = 0`.
pub fn odd_double_factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| {
        acc * BigUint::from(2 * i as u64 - 1)
    })
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `num / den` as `f64` without reducing the fraction first.
pub fn big_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let top = |x: &BigUint| {
        let shift = x.bits().saturating_sub(64);
        ((x >> shift).to_f64().expect("64-bit value"), shift as i64)
    };
    let (a, sa) = top(num);
    let (b, sb) = top(den);
    let e = sa - sb;
    // Split the power of two so neither factor overflows on its own.
    let half = (e / 2).clamp(-1100, 1100) as i32;
    let rest = (e - half as i64).clamp(-1100, 1100) as i32;
    a / b * 2f64.powi(half) * 2f64.powi(rest)
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a rational; `-inf` for zero, NaN for negatives.
pub fn ln_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    match (r.numer().to_biguint(), r.denom().to_biguint()) {
        (Some(p), Some(q)) => ln_biguint(&p) - ln_biguint(&q),
        _ => f64::NAN,
    }
}

/// `ln((l - 1)! / (l - k)!)` for `l >= k >= 1`.
pub fn ln_falling(l: usize, k: usize) -> f64 {
    debug_assert!(l >= k && k >= 1);
    ((l - k + 1)..l).map(|j| (j as f64).ln()).sum()
}

pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
