use num_bigint::BigUint;
use rayon::prelude::*;

use super::{ExactValues, ExpectationTable, Provenance};
use crate::error::{Error, Result};
use crate::multigraph::AttachmentHistory;
use crate::numeric::{odd_double_factorial, Grid};
use crate::statistics::joint_counts;

/// `(2*8-1)!! = 2,027,025` histories take a few seconds.
pub const DEFAULT_ENUM_CAP: usize = 8;

pub fn enumerate_exact(n: usize) -> Result<ExpectationTable> {
    enumerate_exact_with_cap(n, DEFAULT_ENUM_CAP)
}

/// Visits every slot sequence of `G_1^n` once. Step `t` has `2t - 1`
/// equally likely slots: the `2t - 2` endpoints already placed, or a loop.
/// Index `h` in `[0, (2n-1)!!)` is decoded mixed-radix, step 1 first.
pub fn enumerate_exact_with_cap(n: usize, cap: usize) -> Result<ExpectationTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    let total: u64 = (1..=n as u64).map(|t| 2 * t - 1).product();
    let (lmax, kmax, dmax) = (n + 1, 2 * n, n + 1);

    let chunks = 256u64.min(total);
    let acc = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Counts::new(lmax, kmax, dmax);
            let mut slots = Vec::with_capacity(2 * n);
            let mut targets = Vec::with_capacity(n);
            for h in (c * total / chunks)..((c + 1) * total / chunks) {
                decode(n, h, &mut slots, &mut targets);
                acc.add_history(&targets);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Counts::new(lmax, kmax, dmax), Counts::merge);

    let big = |g: &Grid<u64>| g.map(|&v| BigUint::from(v));
    Ok(ExpectationTable::from_exact(
        n,
        Provenance::Enumeration,
        ExactValues {
            scale: odd_double_factorial(n),
            en: big(&acc.en),
            ep: big(&acc.ep),
            m1: acc.m1.iter().map(|&v| BigUint::from(v)).collect(),
        },
    ))
}

fn decode(n: usize, mut h: u64, slots: &mut Vec<u32>, targets: &mut Vec<u32>) {
    slots.clear();
    targets.clear();
    for t in 1..=n {
        let radix = 2 * t as u64 - 1;
        let digit = (h % radix) as usize;
        h /= radix;
        let target = if digit < slots.len() {
            slots[digit]
        } else {
            t as u32
        };
        slots.push(t as u32);
        slots.push(target);
        targets.push(target);
    }
}

struct Counts {
    en: Grid<u64>,
    ep: Grid<u64>,
    m1: Vec<u64>,
}

impl Counts {
    fn new(lmax: usize, kmax: usize, dmax: usize) -> Self {
        Self {
            en: Grid::new(lmax + 1, kmax + 1, 0),
            ep: Grid::new(lmax + 1, kmax + 1, 0),
            m1: vec![0; dmax + 1],
        }
    }

    fn add_history(&mut self, targets: &[u32]) {
        let g = AttachmentHistory::from_raw(targets.to_vec()).into_graph();
        let census = joint_counts(&g);
        for (&(l, k), &c) in &census.loopless {
            *self.en.at_mut(l as usize, k as usize) += c;
        }
        for (&(l, k), &c) in &census.looped {
            *self.ep.at_mut(l as usize, k as usize) += c;
        }
        for (&d, &c) in &census.degree_hist {
            self.m1[d as usize] += c;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let add = |a: &mut Grid<u64>, b: &Grid<u64>| {
            for ((l, k), v) in b.iter() {
                *a.at_mut(l, k) += v;
            }
        };
        add(&mut self.en, &other.en);
        add(&mut self.ep, &other.ep);
        for (a, b) in self.m1.iter_mut().zip(&other.m1) {
            *a += b;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    #[test]
    fn one_and_two_vertices() {
        let t = enumerate_exact(1).unwrap();
        assert_eq!(t.ep_exact(2, 0), Some(ratio(1, 1)));
        assert_eq!(t.mass(), (1.0, 1.0));

        let t = enumerate_exact(2).unwrap();
        assert_eq!(t.ep_exact(2, 0), Some(ratio(2, 3)));
        assert_eq!(t.ep_exact(3, 0), Some(ratio(2, 3)));
        assert_eq!(t.en_exact(1, 2), Some(ratio(2, 3)));
        for d in 1..=3 {
            assert_eq!(t.m1_exact(d), Some(ratio(2, 3)));
        }
        // E X_2(0) = 4/3.
        assert_eq!(t.column_sum_exact(0), Some(ratio(4, 3)));
    }

    #[test]
    fn boundary_cell() {
        // E N_3(2, 2) = 2/15.
        assert_eq!(
            enumerate_exact(3).unwrap().en_exact(2, 2),
            Some(ratio(2, 15))
        );
    }

    #[test]
    fn decoding_covers_each_history_once() {
        let n = 4;
        let total = 105u64;
        let mut seen = std::collections::BTreeMap::new();
        let (mut slots, mut targets) = (Vec::new(), Vec::new());
        for h in 0..total {
            decode(n, h, &mut slots, &mut targets);
            *seen.entry(targets.clone()).or_insert(0u64) += 1;
        }
        // 105 slot sequences collapse onto the 4! target histories.
        assert_eq!(seen.len(), 24);
        assert_eq!(seen.values().sum::<u64>(), total);
        assert_eq!(seen[&vec![1, 2, 3, 4]], 1);
        // Attaching to vertex 1 at step 2 happens through either of its 2 slots.
        assert_eq!(seen[&vec![1, 1, 3, 4]], 2);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_exact(9),
            Err(Error::EnumerationCap { n: 9, cap: 8 })
        ));
        assert!(enumerate_exact_with_cap(3, 2).is_err());
    }
}
