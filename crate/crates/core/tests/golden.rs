use serde_json::Value;

use secdeg::experiments::{
    concentration_report, cv_trend, theorem1_report, theorem2_report, Theorem2Source,
};

fn golden(name: &str) -> Value {
    let path = format!("{}/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn theorem2_ratios() {
    let g = golden("theorem2.json");
    let c = g["envelope_c"].as_f64().unwrap();
    let tol = g["ratio_tol"].as_f64().unwrap();
    let n = g["n"].as_u64().unwrap() as usize;
    let r = theorem2_report(n, 10, 40, Theorem2Source::Dp, c).unwrap();
    assert!(r.pass);
    for (row, want) in r.rows.iter().zip(g["ratios"].as_array().unwrap()) {
        assert_eq!(row.k as u64, want["k"].as_u64().unwrap());
        assert!(
            (row.ratio - want["ratio"].as_f64().unwrap()).abs() < tol,
            "k={}",
            row.k
        );
    }

    let s = &g["small_k"];
    let r = theorem2_report(
        s["n"].as_u64().unwrap() as usize,
        2,
        2,
        Theorem2Source::Dp,
        c,
    )
    .unwrap();
    assert!((r.rows[0].ratio - s["ratio"].as_f64().unwrap()).abs() < tol);
}

#[test]
fn theorem1_pilots() {
    let g = golden("theorem1.json");
    let tol = g["rel_tol"].as_f64().unwrap();
    for p in g["pilots"].as_array().unwrap() {
        let m = p["m"].as_u64().unwrap() as usize;
        let r = theorem1_report(
            p["n"].as_u64().unwrap() as usize,
            m,
            10,
            p["reps"].as_u64().unwrap() as usize,
            p["seed"].as_u64().unwrap(),
            None,
            tol,
        )
        .unwrap();
        assert!(r.pass);
        let worst = r.rows.iter().map(|x| x.rel_err).fold(0.0, f64::max);
        assert!(
            (worst - p["max_rel_err"].as_f64().unwrap()).abs() < 5e-5,
            "m={m}: {worst}"
        );
    }
}

#[test]
fn concentration_pilot() {
    let g = golden("concentration.json");
    let reps = g["reps"].as_u64().unwrap() as usize;
    let seed = g["seed"].as_u64().unwrap();
    let cv_max = g["cv_max"].as_f64().unwrap();
    let ks: Vec<usize> = (1..=10).collect();
    let small = concentration_report(10_000, &ks, reps, seed, Some(2), f64::INFINITY).unwrap();
    let large = concentration_report(100_000, &ks, reps, seed, Some(3), cv_max).unwrap();
    for (report, key) in [(&small, "n_small"), (&large, "n_large")] {
        for (row, want) in report.rows.iter().zip(g[key]["rows"].as_array().unwrap()) {
            assert!(
                (row.cv - want["cv"].as_f64().unwrap()).abs() < 5e-5,
                "{key} k={}",
                row.k
            );
            assert!((row.cv_se - want["cv_se"].as_f64().unwrap()).abs() < 5e-5);
            assert_eq!(
                row.exceedances as u64,
                want["exceedances"].as_u64().unwrap()
            );
        }
    }
    assert!(large.pass);
    assert!(cv_trend(&small, &large).pass);
}
