use std::collections::BTreeSet;

use proptest::prelude::*;
use secdeg::analytic::{c_table, p_table};
use secdeg::edgelist;
use secdeg::experiments::{monte_carlo, ExperimentConfig};
use secdeg::oracle::dp_expectations;
use secdeg::{generate, joint_counts, AttachmentHistory, Mode, MultiGraph};

fn history() -> impl Strategy<Value = AttachmentHistory> {
    prop::collection::vec(0.0f64..1.0, 0..200).prop_map(|u| {
        let targets = u
            .iter()
            .enumerate()
            .map(|(i, x)| 1 + (x * (i + 1) as f64) as usize)
            .collect();
        AttachmentHistory::new(targets).unwrap()
    })
}

// Second degree straight from the edge list.
fn brute_second_degree(g: &MultiGraph, v: usize) -> usize {
    let mut neighbors = BTreeSet::new();
    let mut ends_at_v = 0;
    for (a, b) in g.edges() {
        if a == b {
            continue;
        }
        if a == v {
            neighbors.insert(b);
            ends_at_v += 1;
        } else if b == v {
            neighbors.insert(a);
            ends_at_v += 1;
        }
    }
    neighbors
        .iter()
        .map(|&q| g.degree(q).unwrap())
        .sum::<usize>()
        - ends_at_v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn degree_invariants(h in history()) {
        let n = h.len();
        let g = MultiGraph::from_history(&h);
        prop_assert_eq!(g.edge_count(), n);
        prop_assert_eq!(g.degrees().iter().map(|&d| d as usize).sum::<usize>(), 2 * n);
        for v in 1..=n {
            let hits = h.targets().iter().filter(|&&s| s as usize == v).count();
            prop_assert_eq!(g.degree(v).unwrap(), 1 + hits);
            prop_assert_eq!(g.has_loop(v).unwrap(), h.target(v) == v);
            prop_assert!(g.loop_count(v).unwrap() <= 1);
        }
    }

    #[test]
    fn second_degree_matches_definition(h in history()) {
        let n = h.len();
        let g = h.into_graph();
        for v in 1..=n {
            let d2 = g.second_degree(v).unwrap();
            prop_assert_eq!(d2, brute_second_degree(&g, v));
            prop_assert!(d2 <= 2 * n - g.degree(v).unwrap());
            if g.degree(v).unwrap() == 1 && !g.has_loop(v).unwrap() {
                let q = g.neighbors(v).unwrap()[0] as usize;
                prop_assert_eq!(d2, g.degree(q).unwrap() - 1);
            }
        }
    }

    #[test]
    fn collapse_preserves_totals(h in history(), m in 1usize..5) {
        let keep = h.len() - h.len() % m;
        let h = AttachmentHistory::new(h.targets()[..keep].iter().map(|&s| s as usize).collect()).unwrap();
        let g = h.into_graph();
        let c = g.collapse(m).unwrap();
        prop_assert_eq!(c.vertex_count(), keep / m);
        prop_assert_eq!(c.edge_count(), g.edge_count());
        for b in 1..=c.vertex_count() {
            let block: usize = (m * (b - 1) + 1..=m * b).map(|v| g.degree(v).unwrap()).sum();
            prop_assert_eq!(c.degree(b).unwrap(), block);
        }
        for v in 1..=c.vertex_count() {
            prop_assert_eq!(c.second_degree(v).unwrap(), brute_second_degree(&c, v));
        }
        prop_assert_eq!(g.collapse(1).unwrap(), g);
    }

    #[test]
    fn census_identities(h in history()) {
        let g = h.into_graph();
        let census = joint_counts(&g);
        prop_assert!(census.consistency_errors().is_empty(), "{:?}", census.consistency_errors());
    }

    #[test]
    fn edge_list_round_trip(h in history(), m in 1usize..4) {
        let keep = h.len() - h.len() % m;
        let h = AttachmentHistory::new(h.targets()[..keep].iter().map(|&s| s as usize).collect()).unwrap();
        let mut buf = Vec::new();
        edgelist::write(&mut buf, &h, m).unwrap();
        let back = edgelist::read(buf.as_slice()).unwrap();
        prop_assert_eq!(back.history, h);
        prop_assert_eq!(back.m, m);
    }

    #[test]
    fn generate_is_deterministic(n in 0usize..2000, seed in any::<u64>()) {
        let a = generate(n, seed).unwrap();
        prop_assert_eq!(a.len(), n);
        prop_assert_eq!(&a, &generate(n, seed).unwrap());
        let g = a.into_graph();
        prop_assert_eq!(g.degrees().iter().map(|&d| d as usize).sum::<usize>(), 2 * n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dp_mass_is_conserved(n in 1usize..40) {
        let t = dp_expectations(n, n + 1, 2 * n, n + 1, Mode::Exact).unwrap();
        let (census, m1) = t.mass_exact().unwrap();
        let scale = t.exact().unwrap().scale.clone();
        prop_assert_eq!(census, scale.clone() * n as u64);
        prop_assert_eq!(m1, scale * n as u64);
    }

    #[test]
    fn pooled_replicates_match(n in 1usize..300, r1 in 1usize..6, r2 in 1usize..6, seed in any::<u64>()) {
        let mut cfg = ExperimentConfig::new(n, r1 + r2, seed);
        let all = monte_carlo(&cfg).unwrap();
        cfg.reps = r1;
        let a = monte_carlo(&cfg).unwrap();
        cfg.reps = r2;
        cfg.first_replicate = r1 as u64;
        let b = monte_carlo(&cfg).unwrap();
        let pooled = a.merge(&b).unwrap();
        prop_assert_eq!(pooled.secdeg, all.secdeg);
        prop_assert_eq!(pooled.degree, all.degree);
    }
}

#[test]
fn analytic_tables_are_bounded() {
    let c = c_table(60, 60, Mode::Exact).unwrap();
    let p = p_table(60, 60, Mode::Exact).unwrap();
    for l in 0..=60 {
        for k in 0..=60 {
            assert!(c.get(l, k) >= 0.0 && p.get(l, k) >= 0.0);
            if l >= 1 {
                assert!(
                    p.get(l, k) <= 6.0 / (l * (l + 1)) as f64 + 1e-15,
                    "({l},{k})"
                );
            }
        }
    }
}
