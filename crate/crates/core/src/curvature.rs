//! Menger-type curvature `curv^α_{μ;p}(x, r)`: the `(n+1)`-fold weighted sum
//! over ordered tuples from `B(x, r)` of `h_min^p / diam^{p(1+α)+n(n+1)}`.
//!
//! Two evaluators: exhaustive enumeration (deterministic, bounded by a tuple
//! budget) and Monte Carlo, either iid by weight or stratified by the dyadic
//! annulus of the tuple's farthest point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{diameter, h_min};
use crate::measure::DiscreteMeasure;
use crate::numeric::{dist, pairwise_sum};
use crate::scales::{ScaleConfig, ScaleProfile};

pub const DEFAULT_TUPLE_BUDGET: u128 = 100_000_000;
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Samples per RNG stream; fixes the reduction shape independent of threads.
pub const MC_CHUNK: usize = 4096;
/// Deepest annulus level; atoms closer than `r·2⁻³⁰` share it.
pub const MAX_LEVEL: u32 = 30;
const MIN_PER_STRATUM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvMethod {
    Exhaustive,
    MonteCarlo,
}

impl CurvMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CurvMethod::Exhaustive => "exhaustive",
            CurvMethod::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    Uniform,
    AnnulusStratified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Exhaustive when within budget, Monte Carlo otherwise.
    #[default]
    Auto,
    Exhaustive,
    #[serde(alias = "mc")]
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureEstimate {
    pub value: f64,
    /// Standard error of the estimate; 0 for exhaustive results.
    pub std_error: f64,
    pub method: CurvMethod,
    pub tuples_evaluated: u64,
    pub p: f64,
    pub alpha: f64,
    /// No atoms in the ball; the value is 0 by definition.
    pub empty: bool,
}

/// Evaluator selection and Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvOptions {
    pub method: MethodChoice,
    pub samples: usize,
    pub seed: u64,
    pub strategy: SamplingStrategy,
    pub budget: u128,
}

impl Default for CurvOptions {
    fn default() -> Self {
        CurvOptions {
            method: MethodChoice::Auto,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            strategy: SamplingStrategy::AnnulusStratified,
            budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

fn check_params(p: f64, alpha: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must lie in [1, ∞), got {p}")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("must lie in [0, 1), got {alpha}")));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be positive and finite, got {r}")));
    }
    Ok(())
}

#[inline]
fn integrand_exponent(n: usize, p: f64, alpha: f64) -> f64 {
    p * alpha + (n * (n + 1)) as f64
}

/// `h_min(x, y₁, …, y_{n+1})^p / diam^{p(1+α)+n(n+1)}` with `n + 1 = tuple.len()`;
/// zero whenever `h_min = 0`.
pub fn curv_integrand<P: AsRef<[f64]>>(x: &[f64], tuple: &[P], p: f64, alpha: f64) -> f64 {
    let n = tuple.len().saturating_sub(1);
    let mut points: Vec<&[f64]> = Vec::with_capacity(tuple.len() + 1);
    points.push(x);
    points.extend(tuple.iter().map(AsRef::as_ref));
    kernel(&points, n, p, integrand_exponent(n, p, alpha))
}

#[inline]
fn kernel(points: &[&[f64]], n: usize, p: f64, tail_exponent: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let h = h_min(points);
    if h == 0.0 {
        return 0.0;
    }
    let d = diameter(points);
    (h / d).powf(p) / d.powf(tail_exponent)
}

fn tuple_count(k: usize, n: usize) -> u128 {
    (k as u128).checked_pow(n as u32 + 1).unwrap_or(u128::MAX)
}

fn empty_estimate(method: CurvMethod, p: f64, alpha: f64) -> CurvatureEstimate {
    CurvatureEstimate {
        value: 0.0,
        std_error: 0.0,
        method,
        tuples_evaluated: 0,
        p,
        alpha,
        empty: true,
    }
}

/// Exhaustive sum with the default tuple budget.
pub fn curv_exhaustive(mu: &DiscreteMeasure, x: &[f64], r: f64, p: f64, alpha: f64) -> Result<CurvatureEstimate> {
    curv_exhaustive_with_budget(mu, x, r, p, alpha, DEFAULT_TUPLE_BUDGET)
}

/// Exact weighted sum over all ordered `(n+1)`-tuples of atoms in `B(x, r)`.
///
/// Atoms are taken in ascending index order. Tuples sharing a first atom form
/// a row summed left to right in lexicographic order, each term being
/// `(w_{i₁}·w_{i₂}·…)·f`; rows (computed in parallel) are combined by
/// [`pairwise_sum`]. The result is therefore independent of thread count.
pub fn curv_exhaustive_with_budget(
    mu: &DiscreteMeasure,
    x: &[f64],
    r: f64,
    p: f64,
    alpha: f64,
    budget: u128,
) -> Result<CurvatureEstimate> {
    check_params(p, alpha)?;
    check_radius(r)?;
    mu.check_point(x)?;
    let idx = mu.ball_indices(x, r);
    exhaustive_over(mu, x, &idx, p, alpha, budget)
}

fn exhaustive_over(
    mu: &DiscreteMeasure,
    x: &[f64],
    idx: &[usize],
    p: f64,
    alpha: f64,
    budget: u128,
) -> Result<CurvatureEstimate> {
    if idx.is_empty() {
        return Ok(empty_estimate(CurvMethod::Exhaustive, p, alpha));
    }
    let n = mu.intrinsic_dim();
    let tuples = tuple_count(idx.len(), n);
    if tuples > budget {
        return Err(Error::BudgetExceeded { tuples, budget });
    }
    let tail = integrand_exponent(n, p, alpha);
    let rows: Vec<f64> = idx
        .par_iter()
        .map(|&first| exhaustive_row(mu, x, idx, first, n, p, tail))
        .collect();
    Ok(CurvatureEstimate {
        value: pairwise_sum(&rows),
        std_error: 0.0,
        method: CurvMethod::Exhaustive,
        tuples_evaluated: tuples.min(u64::MAX as u128) as u64,
        p,
        alpha,
        empty: false,
    })
}

fn exhaustive_row(
    mu: &DiscreteMeasure,
    x: &[f64],
    idx: &[usize],
    first: usize,
    n: usize,
    p: f64,
    tail: f64,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let k = idx.len();
    // Odometer over the remaining n positions.
    let mut odo = vec![0usize; n];
    let mut points: Vec<&[f64]> = vec![x; n + 2];
    points[1] = mu.point(first);
    let mut acc = 0.0;
    loop {
        let mut w = mu.weight(first);
        for (slot, &o) in odo.iter().enumerate() {
            let i = idx[o];
            w *= mu.weight(i);
            points[slot + 2] = mu.point(i);
        }
        let f = kernel(&points, n, p, tail);
        if f != 0.0 {
            acc += w * f;
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return acc;
            }
            pos -= 1;
            odo[pos] += 1;
            if odo[pos] < k {
                break;
            }
            odo[pos] = 0;
        }
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }

    /// Variance of the sample mean.
    fn mean_variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count - 1) as f64 / self.count as f64
    }
}

/// Atoms of the ball sorted by annulus level, with cumulative weights, so that
/// any union of consecutive levels is a contiguous range.
struct Sampler<'a> {
    mu: &'a DiscreteMeasure,
    atoms: Vec<usize>,
    cumulative: Vec<f64>,
}

impl Sampler<'_> {
    /// Draws an atom with probability proportional to weight from `atoms[lo..hi]`.
    fn draw(&self, rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
        let start = if lo == 0 { 0.0 } else { self.cumulative[lo - 1] };
        let end = self.cumulative[hi - 1];
        let u = start + rng.random::<f64>() * (end - start);
        let pos = self.cumulative[lo..hi].partition_point(|&c| c <= u);
        self.atoms[lo + pos.min(hi - lo - 1)]
    }
}

/// One stratum: tuples whose atoms all lie in `atoms[lo..]` with at least one
/// in `atoms[lo..mid]` (the stratum's own annulus).
struct Stratum {
    lo: usize,
    mid: usize,
    /// Stratum mass `M_k^{n+1} − M_{k+1}^{n+1}`.
    mass: f64,
    /// Probability of the first in-annulus coordinate being at each position.
    first_position: Vec<f64>,
}

fn chunk_rng(seed: u64, stratum: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stratum << 40) | chunk);
    rng
}

/// Monte Carlo estimate of `curv^α_{μ;p}(x, r)`.
///
/// Samples are drawn in chunks of [`MC_CHUNK`], each from its own counter-based
/// stream, and combined in chunk order, so results depend on `seed` but not on
/// the number of worker threads.
#[allow(clippy::too_many_arguments)]
pub fn curv_monte_carlo(
    mu: &DiscreteMeasure,
    x: &[f64],
    r: f64,
    p: f64,
    alpha: f64,
    samples: usize,
    seed: u64,
    strategy: SamplingStrategy,
) -> Result<CurvatureEstimate> {
    check_params(p, alpha)?;
    check_radius(r)?;
    mu.check_point(x)?;
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let idx = mu.ball_indices(x, r);
    if idx.is_empty() {
        return Ok(empty_estimate(CurvMethod::MonteCarlo, p, alpha));
    }
    let n = mu.intrinsic_dim();
    let levels: Vec<u32> = idx.iter().map(|&i| annulus_level(dist(mu.point(i), x), r)).collect();
    let mut order: Vec<usize> = (0..idx.len()).collect();
    order.sort_by_key(|&k| (levels[k], idx[k]));
    let atoms: Vec<usize> = order.iter().map(|&k| idx[k]).collect();
    let sorted_levels: Vec<u32> = order.iter().map(|&k| levels[k]).collect();
    let mut cumulative = Vec::with_capacity(atoms.len());
    let mut running = 0.0;
    for &i in &atoms {
        running += mu.weight(i);
        cumulative.push(running);
    }
    let sampler = Sampler { mu, atoms, cumulative };
    let strata = match strategy {
        SamplingStrategy::Uniform => vec![Stratum {
            lo: 0,
            mid: sampler.atoms.len(),
            mass: mu.mass_of(&idx).powi(n as i32 + 1),
            first_position: vec![1.0],
        }],
        SamplingStrategy::AnnulusStratified => build_strata(&sampler, &sorted_levels, n),
    };
    let allocation = allocate(&strata, samples);
    let tail = integrand_exponent(n, p, alpha);

    let mut value_terms = Vec::with_capacity(strata.len());
    let mut variance_terms = Vec::with_capacity(strata.len());
    let mut drawn = 0u64;
    for (s, (stratum, &count)) in strata.iter().zip(&allocation).enumerate() {
        let chunks = count.div_ceil(MC_CHUNK);
        let moments: Vec<Moments> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = MC_CHUNK.min(count - c * MC_CHUNK);
                let mut rng = chunk_rng(seed, s as u64, c as u64);
                sample_chunk(&sampler, stratum, x, n, p, tail, len, &mut rng)
            })
            .collect();
        let total = moments.into_iter().fold(Moments::default(), Moments::merge);
        drawn += total.count;
        value_terms.push(stratum.mass * total.mean);
        variance_terms.push(stratum.mass * stratum.mass * total.mean_variance());
    }
    Ok(CurvatureEstimate {
        value: pairwise_sum(&value_terms),
        std_error: pairwise_sum(&variance_terms).sqrt(),
        method: CurvMethod::MonteCarlo,
        tuples_evaluated: drawn,
        p,
        alpha,
        empty: false,
    })
}

/// `⌊log₂(r/d)⌋`, capped at [`MAX_LEVEL`]; level 0 is the outer annulus.
fn annulus_level(d: f64, r: f64) -> u32 {
    if d <= r * 2f64.powi(-(MAX_LEVEL as i32)) {
        return MAX_LEVEL;
    }
    ((r / d).log2().floor().max(0.0) as u32).min(MAX_LEVEL)
}

fn build_strata(sampler: &Sampler<'_>, levels: &[u32], n: usize) -> Vec<Stratum> {
    let len = levels.len();
    let mass_from = |lo: usize| {
        let before = if lo == 0 { 0.0 } else { sampler.cumulative[lo - 1] };
        sampler.cumulative[len - 1] - before
    };
    let mut strata = Vec::new();
    let mut lo = 0;
    while lo < len {
        let mid = lo + levels[lo..].partition_point(|&l| l == levels[lo]);
        let outer = mass_from(lo);
        let inner = if mid < len { mass_from(mid) } else { 0.0 };
        let annulus = outer - inner;
        // Position j is the first in-annulus coordinate: the j earlier ones lie
        // strictly inside, the later ones anywhere in the suffix.
        let by_position: Vec<f64> = (0..=n)
            .map(|j| inner.powi(j as i32) * annulus * outer.powi((n - j) as i32))
            .collect();
        let mass = pairwise_sum(&by_position);
        if mass > 0.0 {
            strata.push(Stratum {
                lo,
                mid,
                mass,
                first_position: by_position.iter().map(|v| v / mass).collect(),
            });
        }
        lo = mid;
    }
    strata
}

fn allocate(strata: &[Stratum], samples: usize) -> Vec<usize> {
    let total: f64 = pairwise_sum(&strata.iter().map(|s| s.mass).collect::<Vec<_>>());
    strata
        .iter()
        .map(|s| ((samples as f64 * s.mass / total).round() as usize).max(MIN_PER_STRATUM))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn sample_chunk(
    sampler: &Sampler<'_>,
    stratum: &Stratum,
    x: &[f64],
    n: usize,
    p: f64,
    tail: f64,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Moments {
    let end = sampler.atoms.len();
    let mut points: Vec<&[f64]> = vec![x; n + 2];
    let mut moments = Moments::default();
    for _ in 0..len {
        let first = pick(&stratum.first_position, rng.random::<f64>());
        for slot in 0..=n {
            let atom = match slot.cmp(&first) {
                std::cmp::Ordering::Less => sampler.draw(rng, stratum.mid, end),
                std::cmp::Ordering::Equal => sampler.draw(rng, stratum.lo, stratum.mid),
                std::cmp::Ordering::Greater => sampler.draw(rng, stratum.lo, end),
            };
            points[slot + 1] = sampler.mu.point(atom);
        }
        moments.push(kernel(&points, n, p, tail));
    }
    moments
}

fn pick(probabilities: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (j, &q) in probabilities.iter().enumerate() {
        acc += q;
        if u < acc {
            return j;
        }
    }
    probabilities.iter().rposition(|&q| q > 0.0).unwrap_or(0)
}

/// Evaluates with the method chosen by `opts`.
pub fn curv_estimate(
    mu: &DiscreteMeasure,
    x: &[f64],
    r: f64,
    p: f64,
    alpha: f64,
    opts: &CurvOptions,
) -> Result<CurvatureEstimate> {
    match opts.method {
        MethodChoice::Exhaustive => curv_exhaustive_with_budget(mu, x, r, p, alpha, opts.budget),
        MethodChoice::MonteCarlo => curv_monte_carlo(mu, x, r, p, alpha, opts.samples, opts.seed, opts.strategy),
        MethodChoice::Auto => {
            check_radius(r)?;
            mu.check_point(x)?;
            let k = mu.ball_indices(x, r).len();
            if tuple_count(k, mu.intrinsic_dim()) <= opts.budget {
                curv_exhaustive_with_budget(mu, x, r, p, alpha, opts.budget)
            } else {
                curv_monte_carlo(mu, x, r, p, alpha, opts.samples, opts.seed, opts.strategy)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureProfile {
    pub profile: ScaleProfile,
    pub estimates: Vec<CurvatureEstimate>,
}

/// Curvature at every radius of the ladder. Monte Carlo scales use the seed
/// `opts.seed + j` at scale `j`.
pub fn curv_profile(
    mu: &DiscreteMeasure,
    x: &[f64],
    p: f64,
    alpha: f64,
    scales: &ScaleConfig,
    opts: &CurvOptions,
) -> Result<CurvatureProfile> {
    scales.validate()?;
    let radii = scales.radii();
    let estimates = radii
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let scale_opts = CurvOptions {
                seed: opts.seed.wrapping_add(j as u64),
                ..*opts
            };
            curv_estimate(mu, x, r, p, alpha, &scale_opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let values = estimates.iter().map(|e| e.value).collect();
    Ok(CurvatureProfile {
        profile: ScaleProfile::new(radii, values, alpha, scales.ratio)?,
        estimates,
    })
}
