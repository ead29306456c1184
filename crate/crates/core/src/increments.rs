//! Distribution of the number of increments of HAD_k words and the scaling
//! constant estimate built from it.
//!
//! The increments of a word are the insertion gaps with no non-zero letter to
//! their right: one plus the number of trailing zeros. A new particle landing
//! in such a gap takes no life from anyone and opens a new heap, so the mean
//! number of increments of a long random word estimates `λ_k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exec::{fold_indices, substream, Execution};
use crate::prob::{
    decimal_string, factorial, fraction_string, ratio_to_f64, round6, ExactProbability,
};
use crate::sampler::HadSampler;
use crate::series::series_table_with;
use crate::words::{trailing_zeros, Alphabet};

/// Largest `n` for which the exact distribution is computed.
pub const EXACT_INCREMENT_LIMIT: usize = 13;

/// The golden ratio, conjectured value of `λ_2`.
pub const PHI: f64 = 1.618_033_988_749_895;
/// `(√5 - 1) / 2 = φ - 1`, the conjectured limiting geometric parameter.
pub const P_STAR: f64 = 0.618_033_988_749_895;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Pmf {
    Exact(BTreeMap<usize, ExactProbability>),
    Sampled {
        counts: BTreeMap<usize, u64>,
        samples: u64,
        seed: u64,
    },
}

/// Law of the raw increment count (`1 +` trailing zeros) of a length-`n`
/// word, either exact or estimated from samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementDistribution {
    k: Alphabet,
    n: usize,
    pmf: Pmf,
}

impl IncrementDistribution {
    pub fn k(&self) -> Alphabet {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        match self.pmf {
            Pmf::Exact(_) => Mode::Exact,
            Pmf::Sampled { .. } => Mode::Sampled,
        }
    }

    pub fn samples(&self) -> Option<u64> {
        match self.pmf {
            Pmf::Sampled { samples, .. } => Some(samples),
            Pmf::Exact(_) => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.pmf {
            Pmf::Sampled { seed, .. } => Some(seed),
            Pmf::Exact(_) => None,
        }
    }

    /// Exact probabilities, in exact mode.
    pub fn exact_pmf(&self) -> Option<&BTreeMap<usize, ExactProbability>> {
        match &self.pmf {
            Pmf::Exact(p) => Some(p),
            Pmf::Sampled { .. } => None,
        }
    }

    /// Raw sample counts, in sampled mode.
    pub fn sample_counts(&self) -> Option<&BTreeMap<usize, u64>> {
        match &self.pmf {
            Pmf::Sampled { counts, .. } => Some(counts),
            Pmf::Exact(_) => None,
        }
    }

    pub fn pmf(&self) -> BTreeMap<usize, f64> {
        match &self.pmf {
            Pmf::Exact(p) => p.iter().map(|(&i, q)| (i, q.to_f64())).collect(),
            Pmf::Sampled {
                counts, samples, ..
            } => counts
                .iter()
                .map(|(&i, &c)| (i, c as f64 / *samples as f64))
                .collect(),
        }
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.pmf().get(&i).copied().unwrap_or(0.0)
    }

    /// Exact mean in exact mode; the sample mean as a fraction otherwise.
    pub fn mean_ratio(&self) -> BigRational {
        match &self.pmf {
            Pmf::Exact(p) => p
                .iter()
                .map(|(&i, q)| q.as_ratio() * BigRational::from_integer(i.into()))
                .sum(),
            Pmf::Sampled {
                counts, samples, ..
            } => {
                let total: u128 = counts.iter().map(|(&i, &c)| i as u128 * c as u128).sum();
                BigRational::new(total.into(), (*samples).into())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        ratio_to_f64(&self.mean_ratio())
    }

    /// Unbiased sample variance of the increment count (sampled mode), or the
    /// exact variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        match &self.pmf {
            Pmf::Exact(p) => p
                .iter()
                .map(|(&i, q)| q.to_f64() * (i as f64 - mean).powi(2))
                .sum(),
            Pmf::Sampled {
                counts, samples, ..
            } => {
                if *samples < 2 {
                    return 0.0;
                }
                let ss: f64 = counts
                    .iter()
                    .map(|(&i, &c)| c as f64 * (i as f64 - mean).powi(2))
                    .sum();
                ss / (*samples - 1) as f64
            }
        }
    }

    /// Sum of the probabilities: exactly one in exact mode.
    pub fn total_ratio(&self) -> BigRational {
        match &self.pmf {
            Pmf::Exact(p) => p.values().map(|q| q.as_ratio().clone()).sum(),
            Pmf::Sampled {
                counts, samples, ..
            } => BigRational::new(counts.values().sum::<u64>().into(), (*samples).into()),
        }
    }

    fn pmf_strings(&self) -> Map<String, Value> {
        match &self.pmf {
            Pmf::Exact(p) => p
                .iter()
                .map(|(i, q)| (i.to_string(), Value::String(q.to_string())))
                .collect(),
            Pmf::Sampled {
                counts, samples, ..
            } => counts
                .iter()
                .map(|(i, &c)| {
                    let q = BigRational::new(c.into(), (*samples).into());
                    (i.to_string(), Value::String(decimal_string(&q, 6)))
                })
                .collect(),
        }
    }

    fn mean_string(&self) -> String {
        match self.mode() {
            Mode::Exact => fraction_string(&self.mean_ratio()),
            Mode::Sampled => decimal_string(&self.mean_ratio(), 6),
        }
    }

    /// `{"mode","k","n","samples"?,"seed"?,"pmf","mean","fitted_p","lambda_hat"}`.
    pub fn to_json(&self) -> Value {
        let mean = self.mean();
        let mut obj = Map::new();
        obj.insert("mode".into(), json!(self.mode().as_str()));
        obj.insert("k".into(), json!(self.k.k()));
        obj.insert("n".into(), json!(self.n));
        if let Pmf::Sampled { samples, seed, .. } = self.pmf {
            obj.insert("samples".into(), json!(samples));
            obj.insert("seed".into(), json!(seed));
        }
        obj.insert("pmf".into(), Value::Object(self.pmf_strings()));
        obj.insert("mean".into(), json!(self.mean_string()));
        obj.insert("fitted_p".into(), json!(round6(1.0 / mean)));
        obj.insert("lambda_hat".into(), json!(round6(mean)));
        Value::Object(obj)
    }

    /// `i,probability` rows. With `shift`, `i` counts trailing zeros only
    /// (raw count minus one), the convention used for plotting.
    pub fn to_csv(&self, shift: bool) -> String {
        let mut out = String::from("i,probability\n");
        let strings = self.pmf_strings();
        for (i, _) in self.pmf() {
            let label = if shift { i - 1 } else { i };
            let p = strings[&i.to_string()].as_str().unwrap_or_default();
            let _ = writeln!(out, "{label},{p}");
        }
        out
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    Ok(())
}

/// `Pr[#inc = i] = sum_{|w| = n, #inc(w) = i} F_k(w) / n!`, exactly.
pub fn exact_increment_distribution(n: usize, k: Alphabet) -> Result<IncrementDistribution> {
    exact_increment_distribution_with(n, k, Execution::default())
}

pub fn exact_increment_distribution_with(
    n: usize,
    k: Alphabet,
    exec: Execution,
) -> Result<IncrementDistribution> {
    check_n(n)?;
    if n > EXACT_INCREMENT_LIMIT {
        return Err(Error::TooLarge {
            what: "exact increment distribution",
            n,
            limit: EXACT_INCREMENT_LIMIT,
        });
    }
    let table = series_table_with(n, k, exec)?;
    let mut by_inc: BTreeMap<usize, BigUint> = BTreeMap::new();
    for (w, c) in table.counts() {
        *by_inc.entry(1 + trailing_zeros(w.letters())).or_default() += c;
    }
    let mass = factorial(n);
    let pmf = by_inc
        .into_iter()
        .map(|(i, c)| (i, ExactProbability::from_counts(&c, &mass)))
        .collect();
    Ok(IncrementDistribution {
        k,
        n,
        pmf: Pmf::Exact(pmf),
    })
}

/// Exact `E[#inc_k]` over words of length `n`.
pub fn expected_increments(n: usize, k: Alphabet) -> Result<BigRational> {
    Ok(exact_increment_distribution(n, k)?.mean_ratio())
}

/// Empirical distribution over `samples` independent runs of length `n`.
pub fn sampled_increment_distribution(
    n: usize,
    k: Alphabet,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<IncrementDistribution> {
    check_n(n)?;
    if samples == 0 {
        return Err(Error::Degenerate("at least one sample is required"));
    }
    let counts = fold_indices(
        exec,
        samples,
        || HadSampler::new(n, k.k()),
        BTreeMap::new,
        |sampler, acc: &mut BTreeMap<usize, u64>, i| {
            let lives = sampler.sample(&mut substream(seed, i));
            let zeros = lives.iter().rev().take_while(|&&d| d == 0).count();
            *acc.entry(1 + zeros).or_default() += 1;
        },
        |mut a, b| {
            for (i, c) in b {
                *a.entry(i).or_default() += c;
            }
            a
        },
    );
    Ok(IncrementDistribution {
        k,
        n,
        pmf: Pmf::Sampled {
            counts,
            samples,
            seed,
        },
    })
}

/// Maximum-likelihood geometric parameter on `{1, 2, ...}` and the per-point
/// distance to that geometric law.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricFit {
    pub p_hat: f64,
    /// `(i, |Pr[i] - p̂ (1 - p̂)^{i-1}|)` for `i` from 1 to the largest
    /// observed value.
    pub residuals: Vec<(usize, f64)>,
}

impl GeometricFit {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|&(_, r)| r).fold(0.0, f64::max)
    }
}

pub fn geometric_pmf(p: f64, i: usize) -> f64 {
    p * (1.0 - p).powi(i as i32 - 1)
}

/// `|Pr[i] - p (1 - p)^{i-1}|` for `i = 1..=up_to`.
pub fn geometric_residuals(pmf: &BTreeMap<usize, f64>, p: f64, up_to: usize) -> Vec<(usize, f64)> {
    (1..=up_to)
        .map(|i| {
            let observed = pmf.get(&i).copied().unwrap_or(0.0);
            (i, (observed - geometric_pmf(p, i)).abs())
        })
        .collect()
}

/// Fits `p̂ = 1 / mean` to a probability mass function on the positive
/// integers.
pub fn geometric_fit_pmf(pmf: &BTreeMap<usize, f64>) -> Result<GeometricFit> {
    let total: f64 = pmf.values().sum();
    if pmf.is_empty() || total <= 0.0 || pmf.contains_key(&0) {
        return Err(Error::Degenerate("geometric fit needs mass on 1, 2, ..."));
    }
    let mean: f64 = pmf.iter().map(|(&i, &q)| i as f64 * q).sum::<f64>() / total;
    if mean.is_nan() || mean < 1.0 {
        return Err(Error::Degenerate("mean below one"));
    }
    let p_hat = 1.0 / mean;
    let up_to = pmf.keys().next_back().copied().unwrap_or(1);
    Ok(GeometricFit {
        p_hat,
        residuals: geometric_residuals(pmf, p_hat, up_to),
    })
}

pub fn geometric_fit(d: &IncrementDistribution) -> Result<GeometricFit> {
    geometric_fit_pmf(&d.pmf())
}

/// Estimate of the scaling constant from the mean number of increments.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingEstimate {
    pub mode: Mode,
    pub k: Alphabet,
    pub n: usize,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Exact mean in exact mode, the sample mean otherwise.
    pub mean_increments: BigRational,
    pub lambda_hat: f64,
    pub fitted_p: f64,
    /// Half-width of the 95% normal interval around `lambda_hat` (sampled
    /// mode only).
    pub half_width: Option<f64>,
    pub phi: f64,
    pub p_star: f64,
}

impl ScalingEstimate {
    pub fn from_distribution(d: &IncrementDistribution) -> Self {
        let mean_increments = d.mean_ratio();
        let lambda_hat = ratio_to_f64(&mean_increments);
        let half_width = d.samples().map(|s| 1.96 * (d.variance() / s as f64).sqrt());
        Self {
            mode: d.mode(),
            k: d.k(),
            n: d.n(),
            samples: d.samples(),
            seed: d.seed(),
            mean_increments,
            lambda_hat,
            fitted_p: 1.0 / lambda_hat,
            half_width,
            phi: PHI,
            p_star: P_STAR,
        }
    }

    /// `φ - λ̂`.
    pub fn gap_to_phi(&self) -> f64 {
        self.phi - self.lambda_hat
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("mode".into(), json!(self.mode.as_str()));
        obj.insert("k".into(), json!(self.k.k()));
        obj.insert("n".into(), json!(self.n));
        if let Some(samples) = self.samples {
            obj.insert("samples".into(), json!(samples));
        }
        if let Some(seed) = self.seed {
            obj.insert("seed".into(), json!(seed));
        }
        let mean = match self.mode {
            Mode::Exact => fraction_string(&self.mean_increments),
            Mode::Sampled => decimal_string(&self.mean_increments, 6),
        };
        obj.insert("mean".into(), json!(mean));
        obj.insert("lambda_hat".into(), json!(round6(self.lambda_hat)));
        obj.insert("fitted_p".into(), json!(round6(self.fitted_p)));
        obj.insert(
            "half_width".into(),
            self.half_width.map_or(Value::Null, |h| json!(round6(h))),
        );
        obj.insert("phi".into(), json!(round6(self.phi)));
        obj.insert("p_star".into(), json!(round6(self.p_star)));
        obj.insert("gap_to_phi".into(), json!(round6(self.gap_to_phi())));
        Value::Object(obj)
    }
}

/// Exact-mode estimate for `n <= 13`.
pub fn lambda_estimate_exact(n: usize, k: Alphabet) -> Result<ScalingEstimate> {
    Ok(ScalingEstimate::from_distribution(
        &exact_increment_distribution(n, k)?,
    ))
}

pub fn lambda_estimate(
    n: usize,
    k: Alphabet,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<ScalingEstimate> {
    Ok(ScalingEstimate::from_distribution(
        &sampled_increment_distribution(n, k, samples, seed, exec)?,
    ))
}

/// Fraction of each digit `0..=k` among all letters of the sampled words.
pub fn digit_frequencies(
    n: usize,
    k: Alphabet,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    check_n(n)?;
    if samples == 0 {
        return Err(Error::Degenerate("at least one sample is required"));
    }
    let width = k.k() as usize + 1;
    let counts = fold_indices(
        exec,
        samples,
        || HadSampler::new(n, k.k()),
        || vec![0u64; width],
        |sampler, acc: &mut Vec<u64>, i| {
            for &d in sampler.sample(&mut substream(seed, i)) {
                acc[d as usize] += 1;
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let total = (n as u64 * samples) as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Exact mean as a float, for reports.
pub fn mean_f64(mean: &BigRational) -> f64 {
    if mean.is_zero() {
        0.0
    } else {
        ratio_to_f64(mean)
    }
}
