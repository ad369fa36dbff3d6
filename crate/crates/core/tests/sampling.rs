use std::collections::BTreeMap;

use secdeg::oracle::enumerate_exact;
use secdeg::{generate, generate_collapsed, joint_counts, replicate_seed};

#[test]
fn loop_at_two_has_probability_one_third() {
    let samples = 200_000u64;
    let loops = (0..samples)
        .filter(|&r| generate(2, replicate_seed(41, r)).unwrap().target(2) == 2)
        .count() as f64;
    let freq = loops / samples as f64;
    let se = (2.0 / 9.0 / samples as f64).sqrt();
    assert!((freq - 1.0 / 3.0).abs() < 5.0 * se, "{freq}");
}

#[test]
fn five_vertex_census_matches_enumeration() {
    let n = 5;
    let samples = 1_000_000u64;
    let exact = enumerate_exact(n).unwrap();
    // Per-cell sums and sums of squares; key (looped, l, k).
    let mut acc: BTreeMap<(bool, usize, usize), (u64, u64)> = BTreeMap::new();
    for r in 0..samples {
        let g = generate(n, replicate_seed(5, r)).unwrap().into_graph();
        let c = joint_counts(&g);
        let cells = c
            .loopless
            .iter()
            .map(|(&(l, k), &v)| ((false, l as usize, k as usize), v));
        let looped = c
            .looped
            .iter()
            .map(|(&(l, k), &v)| ((true, l as usize, k as usize), v));
        for (key, v) in cells.chain(looped) {
            let e = acc.entry(key).or_default();
            e.0 += v;
            e.1 += v * v;
        }
    }
    let s = samples as f64;
    for l in 0..=exact.lmax {
        for k in 0..=exact.kmax {
            for looped in [false, true] {
                let expected = if looped {
                    exact.ep(l, k)
                } else {
                    exact.en(l, k)
                }
                .unwrap();
                let (sum, sq) = acc.get(&(looped, l, k)).copied().unwrap_or((0, 0));
                let mean = sum as f64 / s;
                let var = (sq as f64 / s - mean * mean) * s / (s - 1.0);
                let se = (var / s).sqrt();
                if expected == 0.0 {
                    assert_eq!(sum, 0, "({looped},{l},{k})");
                } else {
                    assert!(
                        (mean - expected).abs() <= 5.0 * se + 1e-12,
                        "({looped},{l},{k}): {mean} vs {expected}, se {se}"
                    );
                }
            }
        }
    }
}

#[test]
fn census_fuzz() {
    let mut seen = 0;
    for r in 0..10_000u64 {
        let seed = replicate_seed(2024, r);
        let n = (seed % 10_000) as usize + 1;
        let g = generate(n, seed).unwrap().into_graph();
        let c = joint_counts(&g);
        assert!(
            c.consistency_errors().is_empty(),
            "n={n}: {:?}",
            c.consistency_errors()
        );
        seen += c.n;
    }
    assert!(seen > 1_000_000);
}

#[test]
fn collapsed_graphs_keep_edges() {
    let g = generate_collapsed(10_000, 3, 8).unwrap();
    assert_eq!(g.vertex_count(), 10_000);
    assert_eq!(g.edge_count(), 30_000);
    let one = generate_collapsed(1, 2, 3).unwrap();
    assert_eq!(one.degree(1).unwrap(), 4);
    assert_eq!(one.edge_count(), 2);
    let same = generate_collapsed(500, 1, 6).unwrap();
    assert_eq!(same, generate(500, 6).unwrap().into_graph());
}

#[test]
fn large_graph_handshake() {
    let g = generate(100_000, 99).unwrap().into_graph();
    assert_eq!(g.degrees().iter().map(|&d| d as u64).sum::<u64>(), 200_000);
}
