//! Seeded Monte-Carlo harness and the theorem-level reports built on it.
//!
//! Replicate `r` draws its graph from [`replicate_seed`]`(seed, r)`, and
//! every per-replicate observable is an integer. Sums and sums of squares
//! are therefore exact, so results do not depend on the thread count and
//! runs over disjoint replicate ranges pool exactly.

mod reports;

pub use reports::{
    bound_checks, concentration_report, cv_trend, lemma1_check, lemma2_check, theorem1_report,
    theorem2_report, theorem4_check, BoundOptions, BoundReport, ConcentrationConfig,
    ConcentrationRow, CvTrendConfig, CvTrendRow, Lemma1Row, Lemma2Row, Report, Theorem1Config,
    Theorem1Row, Theorem2Config, Theorem2Row, Theorem2Source, Theorem4Row, BOOTSTRAP_RESAMPLES,
    THEOREM2_DP_LMAX,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{generate, generate_collapsed, replicate_seed};
use crate::numeric::Mode;
use crate::oracle::dp_expectations;
use crate::statistics::{profile, Profile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    pub kmax: usize,
    pub dmax: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Index of the first replicate, so that `[0, R)` and `[R, 2R)` can be
    /// run separately and pooled.
    pub first_replicate: u64,
}

impl ExperimentConfig {
    pub fn new(n: usize, reps: usize, seed: u64) -> Self {
        Self {
            n,
            m: 1,
            reps,
            kmax: 20,
            dmax: 20,
            seed,
            threads: None,
            first_replicate: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.m < 1 || self.reps < 1 {
            return Err(Error::InvalidArgument(format!(
                "need n >= 1, m >= 1, reps >= 1 (got n={}, m={}, reps={})",
                self.n, self.m, self.reps
            )));
        }
        Ok(())
    }
}

/// Summary of one integer observable over the replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub index: usize,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
    pub min: u64,
    pub max: u64,
    #[serde(skip)]
    count: u64,
    #[serde(skip)]
    sum: u128,
    #[serde(skip)]
    sum_sq: u128,
}

impl Summary {
    fn from_values(index: usize, values: impl Iterator<Item = u64>) -> Self {
        let mut s = Summary {
            index,
            mean: 0.0,
            sd: 0.0,
            se: 0.0,
            min: u64::MAX,
            max: 0,
            count: 0,
            sum: 0,
            sum_sq: 0,
        };
        for v in values {
            s.count += 1;
            s.sum += v as u128;
            s.sum_sq += (v as u128) * (v as u128);
            s.min = s.min.min(v);
            s.max = s.max.max(v);
        }
        s.finish()
    }

    fn finish(mut self) -> Self {
        let r = self.count as u128;
        if r == 0 {
            self.min = 0;
            return self;
        }
        self.mean = self.sum as f64 / r as f64;
        if r > 1 {
            // Exact numerator r * sum x^2 - (sum x)^2 >= 0.
            let num = r * self.sum_sq - self.sum * self.sum;
            self.sd = (num as f64 / (r * (r - 1)) as f64).sqrt();
            self.se = self.sd / (r as f64).sqrt();
        }
        self
    }

    /// Pools two disjoint replicate sets.
    pub fn merge(&self, other: &Summary) -> Summary {
        Summary {
            index: self.index,
            mean: 0.0,
            sd: 0.0,
            se: 0.0,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
        .finish()
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub config: ExperimentConfig,
    /// `X_n(k)` for `k <= kmax`.
    pub secdeg: Vec<Summary>,
    /// `#(d)` for `d <= dmax`.
    pub degree: Vec<Summary>,
    /// Column marginals `sum_l N(l,k)` and `sum_l P(l,k)`.
    pub loopless_by_k: Vec<Summary>,
    pub looped_by_k: Vec<Summary>,
    /// Filled by [`attach_expectations`](Self::attach_expectations).
    pub expected: Option<Expected>,
    #[serde(skip)]
    replicates: Vec<Profile>,
}

/// Reference values next to the sample means. DP columns need `m = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct Expected {
    pub secdeg_dp: Option<Vec<f64>>,
    pub degree_dp: Option<Vec<f64>>,
    /// `4n / k^2`, zero at `k = 0`.
    pub secdeg_closed: Vec<f64>,
    /// `2nm(m+1) / (d(d+1)(d+2))` for `d >= m`, zero below.
    pub degree_closed: Vec<f64>,
}

impl MonteCarloReport {
    /// Per-replicate profiles in replicate order.
    pub fn replicates(&self) -> &[Profile] {
        &self.replicates
    }

    /// Replicate values of `X_n(k)`.
    pub fn secdeg_samples(&self, k: usize) -> Vec<u64> {
        self.replicates.iter().map(|p| p.secdeg[k]).collect()
    }

    /// Float DP (window 64 rows) and closed-form values for every reported index.
    pub fn attach_expectations(&mut self) -> Result<()> {
        let c = &self.config;
        let (n, m) = (c.n as f64, c.m as f64);
        let (secdeg_dp, degree_dp) = if c.m == 1 {
            let t = dp_expectations(c.n, 64, c.kmax.max(1), c.dmax.max(2), Mode::Float)?;
            (
                Some((0..=c.kmax).map(|k| t.column_sum(k).unwrap()).collect()),
                Some((0..=c.dmax).map(|d| t.m1(d).unwrap()).collect()),
            )
        } else {
            (None, None)
        };
        let secdeg_closed = (0..=c.kmax)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    4.0 * n / (k * k) as f64
                }
            })
            .collect();
        let degree_closed = (0..=c.dmax)
            .map(|d| {
                let df = d as f64;
                if d < c.m {
                    0.0
                } else {
                    2.0 * n * m * (m + 1.0) / (df * (df + 1.0) * (df + 2.0))
                }
            })
            .collect();
        self.expected = Some(Expected {
            secdeg_dp,
            degree_dp,
            secdeg_closed,
            degree_closed,
        });
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["version"] = crate::VERSION_TAG.into();
        v["kind"] = "mc".into();
        v
    }

    /// Pools with a run over the following replicate range.
    pub fn merge(&self, other: &MonteCarloReport) -> Result<MonteCarloReport> {
        let (a, b) = (&self.config, &other.config);
        if (a.n, a.m, a.kmax, a.dmax, a.seed) != (b.n, b.m, b.kmax, b.dmax, b.seed)
            || b.first_replicate != a.first_replicate + a.reps as u64
        {
            return Err(Error::InvalidArgument(
                "only consecutive replicate ranges of the same experiment pool".into(),
            ));
        }
        let zip = |x: &[Summary], y: &[Summary]| x.iter().zip(y).map(|(s, t)| s.merge(t)).collect();
        let mut config = a.clone();
        config.reps += b.reps;
        Ok(MonteCarloReport {
            config,
            secdeg: zip(&self.secdeg, &other.secdeg),
            degree: zip(&self.degree, &other.degree),
            loopless_by_k: zip(&self.loopless_by_k, &other.loopless_by_k),
            looped_by_k: zip(&self.looped_by_k, &other.looped_by_k),
            expected: None,
            replicates: self
                .replicates
                .iter()
                .chain(&other.replicates)
                .cloned()
                .collect(),
        })
    }

    /// CSV `observable,index,mean,sd,se,min,max,dp,closed_form`; the last
    /// two are empty unless expectations are attached.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let c = &self.config;
        writeln!(
            w,
            "{} kind=mc n={} m={} reps={} seed={} first_replicate={}",
            crate::edgelist::MAGIC,
            c.n,
            c.m,
            c.reps,
            c.seed,
            c.first_replicate
        )?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "observable",
            "index",
            "mean",
            "sd",
            "se",
            "min",
            "max",
            "dp",
            "closed_form",
        ])?;
        let e = self.expected.as_ref();
        let none: Option<&Vec<f64>> = None;
        for (name, rows, dp, closed) in [
            (
                "secdeg",
                &self.secdeg,
                e.and_then(|e| e.secdeg_dp.as_ref()),
                e.map(|e| &e.secdeg_closed),
            ),
            (
                "deg",
                &self.degree,
                e.and_then(|e| e.degree_dp.as_ref()),
                e.map(|e| &e.degree_closed),
            ),
            ("N_by_k", &self.loopless_by_k, none, none),
            ("P_by_k", &self.looped_by_k, none, none),
        ] {
            let cell =
                |v: Option<&Vec<f64>>, i: usize| v.map_or(String::new(), |v| v[i].to_string());
            for s in rows {
                out.write_record([
                    name.to_string(),
                    s.index.to_string(),
                    s.mean.to_string(),
                    s.sd.to_string(),
                    s.se.to_string(),
                    s.min.to_string(),
                    s.max.to_string(),
                    cell(dp, s.index),
                    cell(closed, s.index),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn monte_carlo(cfg: &ExperimentConfig) -> Result<MonteCarloReport> {
    use rayon::prelude::*;

    cfg.validate()?;
    let reps: Vec<u64> = (0..cfg.reps as u64)
        .map(|r| cfg.first_replicate + r)
        .collect();
    // Collecting an indexed parallel iterator keeps replicate order.
    let profiles = with_threads(cfg.threads, || {
        reps.par_iter()
            .map(|&r| {
                let seed = replicate_seed(cfg.seed, r);
                let g = if cfg.m == 1 {
                    generate(cfg.n, seed).map(|h| h.into_graph())
                } else {
                    generate_collapsed(cfg.n, cfg.m, seed)
                }?;
                Ok(profile(&g, cfg.kmax, cfg.dmax))
            })
            .collect::<Result<Vec<Profile>>>()
    })??;

    let summarize = |len: usize, get: fn(&Profile) -> &Vec<u64>| {
        (0..len)
            .map(|i| Summary::from_values(i, profiles.iter().map(|p| get(p)[i])))
            .collect::<Vec<_>>()
    };
    Ok(MonteCarloReport {
        config: cfg.clone(),
        secdeg: summarize(cfg.kmax + 1, |p| &p.secdeg),
        degree: summarize(cfg.dmax + 1, |p| &p.degree),
        loopless_by_k: summarize(cfg.kmax + 1, |p| &p.loopless_by_k),
        looped_by_k: summarize(cfg.kmax + 1, |p| &p.looped_by_k),
        expected: None,
        replicates: profiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::joint_counts;

    #[test]
    fn summary_moments() {
        let s = Summary::from_values(0, [1u64, 2, 3, 4].into_iter());
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.se - s.sd / 2.0).abs() < 1e-15);
        assert_eq!((s.min, s.max), (1, 4));
        let one = Summary::from_values(0, [7u64].into_iter());
        assert_eq!((one.mean, one.sd, one.se), (7.0, 0.0, 0.0));
    }

    #[test]
    fn single_replicate_reproduces_generate() {
        let mut cfg = ExperimentConfig::new(500, 1, 42);
        cfg.kmax = 30;
        cfg.dmax = 30;
        let r = monte_carlo(&cfg).unwrap();
        let g = generate(500, replicate_seed(42, 0)).unwrap().into_graph();
        let census = joint_counts(&g);
        for k in 0..=30u64 {
            let x = census.secdeg_hist.get(&k).copied().unwrap_or(0);
            assert_eq!(r.secdeg[k as usize].mean, x as f64);
        }
        for d in 0..=30u32 {
            let c = census.degree_hist.get(&d).copied().unwrap_or(0);
            assert_eq!(r.degree[d as usize].mean, c as f64);
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let mut cfg = ExperimentConfig::new(2_000, 12, 9);
        cfg.threads = Some(1);
        let a = monte_carlo(&cfg).unwrap();
        cfg.threads = Some(4);
        let b = monte_carlo(&cfg).unwrap();
        assert_eq!(a.secdeg, b.secdeg);
        assert_eq!(a.degree, b.degree);
        assert_eq!(a.replicates(), b.replicates());
    }

    #[test]
    fn replicate_ranges_pool_exactly() {
        let mut cfg = ExperimentConfig::new(1_000, 10, 5);
        let first = monte_carlo(&cfg).unwrap();
        cfg.first_replicate = 10;
        let second = monte_carlo(&cfg).unwrap();
        cfg.first_replicate = 0;
        cfg.reps = 20;
        let all = monte_carlo(&cfg).unwrap();
        let pooled = first.merge(&second).unwrap();
        assert_eq!(pooled.secdeg, all.secdeg);
        assert_eq!(pooled.degree, all.degree);
        assert!(second.merge(&first).is_err());
    }

    #[test]
    fn two_vertex_mean() {
        // E X_2(0) = 4/3.
        let mut cfg = ExperimentConfig::new(2, 100_000, 3);
        cfg.kmax = 2;
        cfg.dmax = 3;
        let r = monte_carlo(&cfg).unwrap();
        let s = &r.secdeg[0];
        assert!((s.mean - 4.0 / 3.0).abs() < 5.0 * s.se, "{s:?}");
        assert!(s.min as f64 <= s.mean && s.mean <= s.max as f64);
    }

    #[test]
    fn invalid_config() {
        assert!(monte_carlo(&ExperimentConfig::new(0, 1, 1)).is_err());
        assert!(monte_carlo(&ExperimentConfig::new(1, 0, 1)).is_err());
    }

    #[test]
    fn expectations_columns() {
        let mut cfg = ExperimentConfig::new(2000, 3, 5);
        cfg.kmax = 4;
        cfg.dmax = 4;
        let mut r = monte_carlo(&cfg).unwrap();
        r.attach_expectations().unwrap();
        let e = r.expected.as_ref().unwrap();
        assert!((e.degree_dp.as_ref().unwrap()[1] - 2.0 * 1999.0 / 3.0).abs() < 1e-9);
        assert_eq!(e.secdeg_closed[2], 2000.0);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",dp,closed_form"));
        assert!(text
            .lines()
            .any(|l| l.starts_with("N_by_k,1,") && l.ends_with(",,")));
        assert_eq!(r.to_json()["kind"], "mc");
    }
}
