//! Degree and second-degree census of a realized graph.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::Result;
use crate::multigraph::MultiGraph;

/// Sparse census: `loopless[(l, k)]` is `N_n(l, k)`, `looped[(l, k)]` is
/// `P_n(l, k)`, `secdeg_hist[k]` is `X_n(k)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JointCounts {
    pub n: usize,
    pub loopless: BTreeMap<(u32, u64), u64>,
    pub looped: BTreeMap<(u32, u64), u64>,
    pub degree_hist: BTreeMap<u32, u64>,
    pub secdeg_hist: BTreeMap<u64, u64>,
}

pub fn degree_histogram(g: &MultiGraph) -> BTreeMap<u32, u64> {
    let mut hist = BTreeMap::new();
    for &d in g.degrees() {
        *hist.entry(d).or_insert(0) += 1;
    }
    hist
}

pub fn second_degree_histogram(g: &MultiGraph) -> BTreeMap<u64, u64> {
    let mut hist = BTreeMap::new();
    for k in g.second_degrees() {
        *hist.entry(k).or_insert(0) += 1;
    }
    hist
}

pub fn joint_counts(g: &MultiGraph) -> JointCounts {
    let mut out = JointCounts {
        n: g.vertex_count(),
        ..Default::default()
    };
    let second = g.second_degrees();
    for (i, (&d, &k)) in g.degrees().iter().zip(&second).enumerate() {
        let looped = g.loop_count(i + 1).expect("vertex in range") > 0;
        let cell = if looped {
            &mut out.looped
        } else {
            &mut out.loopless
        };
        *cell.entry((d, k)).or_insert(0) += 1;
        *out.degree_hist.entry(d).or_insert(0) += 1;
        *out.secdeg_hist.entry(k).or_insert(0) += 1;
    }
    out
}

/// Dense per-replicate summary used by the Monte-Carlo harness: index `k`
/// (or `d`) up to the requested maximum, everything above is dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub secdeg: Vec<u64>,
    pub degree: Vec<u64>,
    pub loopless_by_k: Vec<u64>,
    pub looped_by_k: Vec<u64>,
}

pub fn profile(g: &MultiGraph, kmax: usize, dmax: usize) -> Profile {
    let mut p = Profile {
        secdeg: vec![0; kmax + 1],
        degree: vec![0; dmax + 1],
        loopless_by_k: vec![0; kmax + 1],
        looped_by_k: vec![0; kmax + 1],
    };
    let second = g.second_degrees();
    for (i, (&d, &k)) in g.degrees().iter().zip(&second).enumerate() {
        if (d as usize) <= dmax {
            p.degree[d as usize] += 1;
        }
        if (k as usize) <= kmax {
            let k = k as usize;
            p.secdeg[k] += 1;
            if g.loop_count(i + 1).expect("vertex in range") > 0 {
                p.looped_by_k[k] += 1;
            } else {
                p.loopless_by_k[k] += 1;
            }
        }
    }
    p
}

impl JointCounts {
    pub fn loopless(&self, l: u32, k: u64) -> u64 {
        self.loopless.get(&(l, k)).copied().unwrap_or(0)
    }

    pub fn looped(&self, l: u32, k: u64) -> u64 {
        self.looped.get(&(l, k)).copied().unwrap_or(0)
    }

    /// Violations of the census identities, empty when consistent.
    pub fn consistency_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let total: u64 = self.loopless.values().chain(self.looped.values()).sum();
        if total != self.n as u64 {
            errs.push(format!("sum of N and P is {total}, expected {}", self.n));
        }
        let mut by_k: BTreeMap<u64, u64> = BTreeMap::new();
        for (&(_, k), &c) in self.loopless.iter().chain(&self.looped) {
            *by_k.entry(k).or_insert(0) += c;
        }
        if by_k != self.secdeg_hist {
            errs.push("column sums of N + P differ from X_n(k)".into());
        }
        let half_edges: u64 = self.degree_hist.iter().map(|(&d, &c)| d as u64 * c).sum();
        if self.n >= 1 && !half_edges.is_multiple_of(2) {
            errs.push(format!("odd degree total {half_edges}"));
        }
        for &(l, k) in self.loopless.keys() {
            if l == 0 || (k == 0 && self.n >= 2) {
                errs.push(format!("loopless vertex in impossible cell ({l},{k})"));
            }
            if 2 * l as u64 + k > 2 * self.n as u64 {
                errs.push(format!("loopless cell ({l},{k}) exceeds 2n"));
            }
        }
        for &(l, k) in self.looped.keys() {
            if l < 2 || 2 * l as u64 + k > 2 * self.n as u64 + 2 {
                errs.push(format!("looped cell ({l},{k}) out of range"));
            }
        }
        errs
    }

    /// CSV with columns `kind,l,k,count`; histogram rows leave `l` empty
    /// and put the degree or second degree in the `k` column.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} kind=stats n={}", crate::edgelist::MAGIC, self.n)?;
        writeln!(w, "kind,l,k,count")?;
        for (&(l, k), c) in &self.loopless {
            writeln!(w, "N,{l},{k},{c}")?;
        }
        for (&(l, k), c) in &self.looped {
            writeln!(w, "P,{l},{k},{c}")?;
        }
        for (d, c) in &self.degree_hist {
            writeln!(w, "deg,,{d},{c}")?;
        }
        for (k, c) in &self.secdeg_hist {
            writeln!(w, "secdeg,,{k},{c}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "version": crate::VERSION_TAG,
            "n": self.n,
            "N": self.loopless.iter().map(|(&(l, k), &c)| [l as u64, k, c]).collect::<Vec<_>>(),
            "P": self.looped.iter().map(|(&(l, k), &c)| [l as u64, k, c]).collect::<Vec<_>>(),
            "deg": self.degree_hist.iter().map(|(&d, &c)| [d as u64, c]).collect::<Vec<_>>(),
            "secdeg": self.secdeg_hist.iter().map(|(&k, &c)| [k, c]).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::AttachmentHistory;

    fn graph(t: &[usize]) -> MultiGraph {
        AttachmentHistory::new(t.to_vec()).unwrap().into_graph()
    }

    #[test]
    fn histograms() {
        let g = graph(&[1, 1, 2]);
        assert_eq!(
            degree_histogram(&g),
            BTreeMap::from([(1, 1), (2, 1), (3, 1)])
        );
        assert_eq!(
            second_degree_histogram(&g),
            BTreeMap::from([(1, 2), (2, 1)])
        );
        assert_eq!(degree_histogram(&graph(&[1])), BTreeMap::from([(2, 1)]));
        assert_eq!(
            second_degree_histogram(&graph(&[1])),
            BTreeMap::from([(0, 1)])
        );
        assert_eq!(
            second_degree_histogram(&graph(&[1, 1])),
            BTreeMap::from([(0, 1), (2, 1)])
        );
    }

    #[test]
    fn census() {
        let c = joint_counts(&graph(&[1, 1, 2]));
        assert_eq!(c.loopless(2, 2), 1);
        assert_eq!(c.loopless(1, 1), 1);
        assert_eq!(c.looped(3, 1), 1);
        assert_eq!(c.loopless.len() + c.looped.len(), 3);
        assert!(c.consistency_errors().is_empty());

        let c = joint_counts(&graph(&[1]));
        assert_eq!(c.looped, BTreeMap::from([((2, 0), 1)]));
        assert!(c.loopless.is_empty());

        let c = joint_counts(&graph(&[1, 2]));
        assert_eq!(c.looped, BTreeMap::from([((2, 0), 2)]));
    }

    #[test]
    fn empty_census() {
        let c = joint_counts(&graph(&[]));
        assert_eq!(c.n, 0);
        assert!(c.secdeg_hist.is_empty());
        assert!(c.consistency_errors().is_empty());
    }

    #[test]
    fn profile_truncates() {
        let g = graph(&[1, 1, 2]);
        let p = profile(&g, 1, 2);
        assert_eq!(p.secdeg, vec![0, 2]);
        assert_eq!(p.degree, vec![0, 1, 1]);
        assert_eq!(p.loopless_by_k, vec![0, 1]);
        assert_eq!(p.looped_by_k, vec![0, 1]);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        joint_counts(&graph(&[1])).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# pa-secdeg v1 kind=stats n=1\nkind,l,k,count\nP,2,0,1\ndeg,,2,1\nsecdeg,,0,1\n"
        );
    }
}
