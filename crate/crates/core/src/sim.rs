//! Randomized and exhaustive oracles for the coloring model.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::census::{pyramid_counts, TriangleCensus};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moments::{t3_mean_var_exact, Statistic};
use crate::report::to_f64;

/// Default cap on `c^|V|` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticChoice {
    T2,
    T3,
    Both,
}

impl StatisticChoice {
    fn wants(self, s: Statistic) -> bool {
        matches!(
            (self, s),
            (StatisticChoice::Both, _)
                | (StatisticChoice::T2, Statistic::T2)
                | (StatisticChoice::T3, Statistic::T3)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub c: u32,
    pub replications: u64,
    pub seed: u64,
    pub statistic: StatisticChoice,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c < 2 {
            return Err(Error::BadParams(format!(
                "need c >= 2 colors, got {}",
                self.c
            )));
        }
        if self.replications == 0 {
            return Err(Error::BadParams("replications must be >= 1".into()));
        }
        Ok(())
    }
}

/// Raw per-replication statistic values, in replication order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Samples {
    pub t2: Option<Vec<u64>>,
    pub t3: Option<Vec<u64>>,
}

/// Color stream for one replication: ChaCha8 keyed by the seed, with the
/// replication index as the stream id.
pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// Draws `cfg.replications` uniform colorings and evaluates the statistics.
/// The result depends only on the graph and `cfg`, not on the thread count.
pub fn sample_values(g: &Graph, tc: &TriangleCensus, cfg: &SimConfig) -> Result<Samples> {
    cfg.validate()?;
    let want_t2 = cfg.statistic.wants(Statistic::T2);
    let want_t3 = cfg.statistic.wants(Statistic::T3);
    let n = g.vertex_count();
    let pairs: Vec<(u64, u64)> = (0..cfg.replications)
        .into_par_iter()
        .map_init(
            || vec![0u32; n],
            |colors, rep| {
                let mut rng = replication_rng(cfg.seed, rep);
                for slot in colors.iter_mut() {
                    *slot = rng.gen_range(0..cfg.c);
                }
                let t2 = if want_t2 {
                    g.edges()
                        .iter()
                        .filter(|&&(u, v)| colors[u as usize] == colors[v as usize])
                        .count() as u64
                } else {
                    0
                };
                let t3 = if want_t3 {
                    tc.triangles
                        .iter()
                        .filter(|t| {
                            let a = colors[t[0] as usize];
                            a == colors[t[1] as usize] && a == colors[t[2] as usize]
                        })
                        .count() as u64
                } else {
                    0
                };
                (t2, t3)
            },
        )
        .collect();
    Ok(Samples {
        t2: want_t2.then(|| pairs.iter().map(|p| p.0).collect()),
        t3: want_t3.then(|| pairs.iter().map(|p| p.1).collect()),
    })
}

/// Writes values as consecutive little-endian `u64`.
pub fn write_raw<W: Write>(mut w: W, values: &[u64]) -> std::io::Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

/// A cluster of sample values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomEstimate {
    pub center: f64,
    pub mass: f64,
    pub spread: f64,
}

/// How to rescale a statistic before looking for atoms: the values
/// `(T - E T) / scale` are split wherever consecutive sorted values are more
/// than `gap` apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub scale: f64,
    pub gap: f64,
}

/// Per-statistic summary.
#[derive(Clone, Debug, Serialize)]
pub struct StatSummary {
    pub statistic: Statistic,
    pub exact_mean: f64,
    pub exact_variance: f64,
    pub mean: f64,
    pub variance: f64,
    pub fourth_central_moment: f64,
    /// `(value, P(T <= value))` at each observed value.
    pub ecdf: Vec<(u64, f64)>,
    /// Kolmogorov distance of the standardized sample to the standard
    /// normal; absent when the exact variance is zero.
    pub ks_normal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomEstimate>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub statistics: Vec<StatSummary>,
}

/// Exact mean and variance of a statistic, from the closed forms.
pub fn exact_mean_var(
    g: &Graph,
    tc: &TriangleCensus,
    c: u32,
    s: Statistic,
) -> (BigRational, BigRational) {
    match s {
        Statistic::T2 => {
            let e = BigRational::from_integer(BigInt::from(g.edge_count()));
            let x = BigRational::new(1.into(), c.into());
            let mean = &e * &x;
            let var = &mean * (BigRational::from_integer(1.into()) - x);
            (mean, var)
        }
        Statistic::T3 => t3_mean_var_exact(&pyramid_counts(tc), c),
    }
}

pub fn summarize(
    statistic: Statistic,
    values: &[u64],
    exact_mean: f64,
    exact_variance: f64,
    atoms: Option<AtomSpec>,
) -> StatSummary {
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &v in values {
        let d = v as f64 - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut ecdf = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if sorted.get(i + 1) != Some(&v) {
            ecdf.push((v, (i + 1) as f64 / n));
        }
    }
    let ks_normal = (exact_variance > 0.0).then(|| {
        let sd = exact_variance.sqrt();
        let z: Vec<f64> = sorted
            .iter()
            .map(|&v| (v as f64 - exact_mean) / sd)
            .collect();
        ks_statistic(&z, standard_normal_cdf).expect("nonempty sample")
    });
    let atoms = atoms.map(|spec| {
        let scaled: Vec<f64> = sorted
            .iter()
            .map(|&v| (v as f64 - exact_mean) / spec.scale)
            .collect();
        detect_atoms(&scaled, spec.gap)
    });
    StatSummary {
        statistic,
        exact_mean,
        exact_variance,
        mean,
        variance: m2 / n,
        fourth_central_moment: m4 / n,
        ecdf,
        ks_normal,
        atoms,
    }
}

/// Monte Carlo run with summaries for the requested statistics. `atoms`
/// applies to the triangle count only.
pub fn sample_statistics(
    g: &Graph,
    tc: &TriangleCensus,
    cfg: &SimConfig,
    atoms: Option<AtomSpec>,
) -> Result<(SimReport, Samples)> {
    let samples = sample_values(g, tc, cfg)?;
    let mut statistics = Vec::new();
    for (stat, values, atom_spec) in [
        (Statistic::T2, &samples.t2, None),
        (Statistic::T3, &samples.t3, atoms),
    ] {
        if let Some(values) = values {
            let (mean, var) = exact_mean_var(g, tc, cfg.c, stat);
            statistics.push(summarize(
                stat,
                values,
                to_f64(&mean),
                to_f64(&var),
                atom_spec,
            ));
        }
    }
    Ok((
        SimReport {
            config: cfg.clone(),
            statistics,
        },
        samples,
    ))
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    static N: std::sync::LazyLock<Normal> =
        std::sync::LazyLock::new(|| Normal::new(0.0, 1.0).expect("valid normal"));
    N.cdf(x)
}

/// Kolmogorov distance between the empirical law of `sorted` and a
/// continuous reference CDF, evaluated at both sides of every jump.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        let below = i as f64 / n;
        let at = j as f64 / n;
        sup = sup.max((at - f).abs()).max((below - f).abs());
        i = j;
    }
    Ok(sup.clamp(0.0, 1.0))
}

/// Splits sorted values into clusters at gaps wider than `gap`.
pub fn detect_atoms(sorted: &[f64], gap: f64) -> Vec<AtomEstimate> {
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            let cluster = &sorted[start..i];
            if !cluster.is_empty() {
                let m = cluster.len() as f64;
                let center = cluster.iter().sum::<f64>() / m;
                let var = cluster.iter().map(|v| (v - center).powi(2)).sum::<f64>() / m;
                out.push(AtomEstimate {
                    center,
                    mass: m / n,
                    spread: var.sqrt(),
                });
            }
            start = i;
        }
    }
    out
}

/// Joint law of `(T2, T3)` by enumerating every coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    pub c: u32,
    /// `c^|V|`
    pub total: BigUint,
    /// Number of colorings giving each `(T2, T3)`.
    pub joint: BTreeMap<(u64, u64), u64>,
}

/// Exact central moments of one statistic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMoments {
    pub mean: BigRational,
    pub variance: BigRational,
    pub central4: BigRational,
}

impl ExactMoments {
    /// `E Z^4 - 3`; `None` when the variance is zero.
    pub fn excess4(&self) -> Option<BigRational> {
        (!self.variance.is_zero()).then(|| {
            &self.central4 / (&self.variance * &self.variance) - BigRational::from_integer(3.into())
        })
    }
}

impl ExactDistribution {
    pub fn pmf(&self, s: Statistic) -> BTreeMap<u64, BigRational> {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for (&(t2, t3), &n) in &self.joint {
            let key = match s {
                Statistic::T2 => t2,
                Statistic::T3 => t3,
            };
            *counts.entry(key).or_default() += n;
        }
        let total = BigInt::from(self.total.clone());
        counts
            .into_iter()
            .map(|(k, n)| (k, BigRational::new(n.into(), total.clone())))
            .collect()
    }

    pub fn moments(&self, s: Statistic) -> ExactMoments {
        let pmf = self.pmf(s);
        let int = |v: u64| BigRational::from_integer(v.into());
        let mean: BigRational = pmf.iter().map(|(&v, p)| int(v) * p).sum();
        let mut variance = BigRational::zero();
        let mut central4 = BigRational::zero();
        for (&v, p) in &pmf {
            let d = int(v) - &mean;
            let d2 = &d * &d;
            variance += &d2 * p;
            central4 += &d2 * &d2 * p;
        }
        ExactMoments {
            mean,
            variance,
            central4,
        }
    }
}

pub fn exact_distribution(g: &Graph, tc: &TriangleCensus, c: u32) -> Result<ExactDistribution> {
    exact_distribution_with_cap(g, tc, c, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates all `c^|V|` colorings, split into blocks by the colors of the
/// first two vertices.
pub fn exact_distribution_with_cap(
    g: &Graph,
    tc: &TriangleCensus,
    c: u32,
    cap: u64,
) -> Result<ExactDistribution> {
    if c < 2 {
        return Err(Error::BadParams(format!("need c >= 2 colors, got {c}")));
    }
    let n = g.vertex_count();
    let total = BigUint::from(c).pow(n as u32);
    if total > BigUint::from(cap) {
        return Err(Error::TooLarge {
            colorings: total.to_string(),
            cap,
        });
    }
    let prefix = n.min(2);
    let blocks = (c as u64).pow(prefix as u32);
    let joint = (0..blocks)
        .into_par_iter()
        .fold(HashMap::<(u64, u64), u64>::new, |mut acc, block| {
            let mut colors = vec![0u32; n];
            let mut b = block;
            for slot in colors.iter_mut().take(prefix) {
                *slot = (b % c as u64) as u32;
                b /= c as u64;
            }
            loop {
                let t2 = g
                    .edges()
                    .iter()
                    .filter(|&&(u, v)| colors[u as usize] == colors[v as usize])
                    .count() as u64;
                let t3 = tc
                    .triangles
                    .iter()
                    .filter(|t| {
                        let a = colors[t[0] as usize];
                        a == colors[t[1] as usize] && a == colors[t[2] as usize]
                    })
                    .count() as u64;
                *acc.entry((t2, t3)).or_default() += 1;
                // odometer over the suffix
                let mut i = prefix;
                loop {
                    if i == n {
                        return acc;
                    }
                    colors[i] += 1;
                    if colors[i] < c {
                        break;
                    }
                    colors[i] = 0;
                    i += 1;
                }
            }
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    Ok(ExactDistribution {
        c,
        total,
        joint: joint.into_iter().collect(),
    })
}
