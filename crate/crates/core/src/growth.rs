//! Empirical growth of the conjugator translation norm and the conjugator
//! length function, with affine upper envelopes.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conjugacy;
use crate::cvp;
use crate::group::{Ball, Isometry, SplitGroup};
use crate::linalg::{self, Matrix};
use crate::{Error, Result};

/// Largest `n` for which [`empirical_clf`] enumerates all pairs.
pub const EXHAUSTIVE_CLF_MAX: usize = 6;

/// Default rejection-sampling budget per requested pair.
pub const DEFAULT_ATTEMPTS_PER_PAIR: usize = 2_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub n: usize,
    pub tnorm_emp: f64,
    pub clf_emp: Option<usize>,
    pub samples_used: usize,
}

/// `f(x) <= slope * x + intercept` on every fitted point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub sample_count: usize,
}

impl AffineFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// `k0`: covering-radius bound, `k1`: `max |(Id - w)^+|`, `k3`: `max |w|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthConstants {
    pub k0: f64,
    pub k1: f64,
    pub k3: f64,
}

impl GrowthConstants {
    pub fn of(g: &SplitGroup) -> Result<Self> {
        Ok(GrowthConstants {
            k0: cvp_radius_bound(g)?,
            k1: pinv_norm_bound(g),
            k3: spherical_norm_bound(g),
        })
    }

    /// `k1 k3 n + k0`.
    pub fn envelope(&self, n: f64) -> f64 {
        self.k1 * self.k3 * n + self.k0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SamplingOptions {
    pub attempts_per_pair: usize,
    /// Words for `h` and `k` have length uniform in `0..=max(2, n^p)`.
    /// Random words of length `L` move about `sqrt L`, so `p = 2` lets
    /// translations reach the scale `n`.
    pub word_len_power: u32,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            attempts_per_pair: DEFAULT_ATTEMPTS_PER_PAIR,
            word_len_power: 2,
        }
    }
}

fn pair_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn random_word(g: &SplitGroup, rng: &mut ChaCha8Rng, max_len: usize) -> Isometry {
    let gens = g.generators();
    let mut x = Isometry::identity(g.dim());
    if gens.is_empty() {
        return x;
    }
    let len = rng.gen_range(0..=max_len);
    for _ in 0..len {
        x = x.compose_unchecked(&gens[rng.gen_range(0..gens.len())]);
    }
    x
}

fn translation_size(h: &Isometry, hp: &Isometry) -> f64 {
    h.translation.norm() + hp.translation.norm()
}

/// `count` pairs `(h, k h k^{-1})` with `|λ| + |λ'| <= n`, from random words.
pub fn sample_conjugate_pairs(g: &SplitGroup, n: usize, count: usize, seed: u64) -> Result<Vec<(Isometry, Isometry)>> {
    sample_conjugate_pairs_with(g, n, count, seed, SamplingOptions::default())
}

pub fn sample_conjugate_pairs_with(
    g: &SplitGroup,
    n: usize,
    count: usize,
    seed: u64,
    opts: SamplingOptions,
) -> Result<Vec<(Isometry, Isometry)>> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(seed, n));
    let max_len = n.saturating_pow(opts.word_len_power).max(2);
    let budget = count.saturating_mul(opts.attempts_per_pair);
    let eps = g.tolerances().eps;
    let mut out = Vec::with_capacity(count);
    for _ in 0..budget {
        let h = random_word(g, &mut rng, max_len);
        let k = random_word(g, &mut rng, max_len);
        let hp = k.compose_unchecked(&h).compose_unchecked(&k.inverse());
        if translation_size(&h, &hp) <= n as f64 + eps {
            out.push((h, hp));
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(Error::CapExceeded {
        what: "sampling attempts",
        cap: budget,
    })
}

/// Per-`n` maxima of `ctn` over sampled pairs, made nondecreasing.
pub fn empirical_tnorm(g: &SplitGroup, n_max: usize, count: usize, seed: u64) -> Result<Vec<GrowthRecord>> {
    let mut records = Vec::with_capacity(n_max + 1);
    let mut running = 0.0f64;
    for n in 0..=n_max {
        let pairs = sample_conjugate_pairs(g, n, count, seed)?;
        let mut best = 0.0f64;
        for (h, hp) in &pairs {
            let r = conjugacy::min_norm_conjugator(g, h, hp)?
                .ok_or_else(|| Error::Inconsistent("sampled pair is not conjugate".into()))?;
            best = best.max(r.ctn);
        }
        running = running.max(best);
        records.push(GrowthRecord {
            n,
            tnorm_emp: running,
            clf_emp: None,
            samples_used: pairs.len(),
        });
    }
    Ok(records)
}

/// Result of [`empirical_clf`]. `tnorm_emp` is left at 0 in these records;
/// merge with [`empirical_tnorm`] output via [`merge_records`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClfOutput {
    pub records: Vec<GrowthRecord>,
    /// Pairs whose conjugator length exceeded `max_radius`.
    pub exceeded: usize,
}

/// Per-`n` maxima of `cl(h, h')` over pairs with `ℓ(h) + ℓ(h') <= n`.
///
/// For `n <= EXHAUSTIVE_CLF_MAX` every conjugate pair in the ball is used;
/// beyond that, pairs are sampled. Conjugator lengths are searched in the
/// ball of radius `max_radius`.
pub fn empirical_clf(g: &SplitGroup, n_max: usize, count: usize, seed: u64, max_radius: usize) -> Result<ClfOutput> {
    g.require_discrete()?;
    let ball = g.ball(max_radius.max(n_max.min(EXHAUSTIVE_CLF_MAX)))?;
    let eps = 10.0 * g.tolerances().lattice;
    let mut records = Vec::with_capacity(n_max + 1);
    let mut exceeded = 0usize;
    let mut running = 0usize;
    let exhaustive = exhaustive_cl(g, &ball, n_max.min(EXHAUSTIVE_CLF_MAX))?;
    for n in 0..=n_max {
        let (best, used) = if n <= EXHAUSTIVE_CLF_MAX {
            let mut best = 0;
            let mut used = 0;
            for p in exhaustive.iter().filter(|p| p.word_sum <= n) {
                used += 1;
                match p.cl {
                    Some(c) => best = best.max(c),
                    None => exceeded += 1,
                }
            }
            (best, used)
        } else {
            sampled_clf(g, &ball, n, count, seed, eps, &mut exceeded)?
        };
        running = running.max(best);
        records.push(GrowthRecord {
            n,
            tnorm_emp: 0.0,
            clf_emp: Some(running),
            samples_used: used,
        });
    }
    Ok(ClfOutput { records, exceeded })
}

fn sampled_clf(
    g: &SplitGroup,
    ball: &Ball,
    n: usize,
    count: usize,
    seed: u64,
    eps: f64,
    exceeded: &mut usize,
) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(seed, n) ^ 0xC1F);
    let budget = count.max(1).saturating_mul(DEFAULT_ATTEMPTS_PER_PAIR);
    let (mut best, mut used) = (0, 0);
    for _ in 0..budget {
        if used == count {
            break;
        }
        let h = random_word(g, &mut rng, n);
        let k = random_word(g, &mut rng, n);
        let hp = k.compose_unchecked(&h).compose_unchecked(&k.inverse());
        let (Some(lh), Some(lhp)) = (ball.word_length(&h), ball.word_length(&hp)) else {
            continue;
        };
        if lh + lhp > n {
            continue;
        }
        used += 1;
        match ball.conjugator_length(&h, &hp, eps) {
            Some(c) => best = best.max(c),
            None => *exceeded += 1,
        }
    }
    Ok((best, used))
}

/// One conjugate pair from exhaustive enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    pub h: Isometry,
    pub h_prime: Isometry,
    /// `ℓ(h) + ℓ(h')`.
    pub word_sum: usize,
    /// `None` when no conjugator lies in the search ball.
    pub cl: Option<usize>,
    pub ctn: f64,
}

fn exhaustive_cl(g: &SplitGroup, ball: &Ball, n: usize) -> Result<Vec<PairedSample>> {
    let eps = 10.0 * g.tolerances().lattice;
    let elems: Vec<(&Isometry, usize)> = ball.iter().filter(|(_, l)| *l <= n).collect();
    let mut out = Vec::new();
    for &(h, lh) in &elems {
        for &(hp, lhp) in &elems {
            if lh + lhp > n {
                continue;
            }
            let Some(r) = conjugacy::min_norm_conjugator(g, h, hp)? else {
                continue;
            };
            out.push(PairedSample {
                h: h.clone(),
                h_prime: hp.clone(),
                word_sum: lh + lhp,
                cl: ball.conjugator_length(h, hp, eps),
                ctn: r.ctn,
            });
        }
    }
    Ok(out)
}

/// All conjugate pairs with `ℓ(h) + ℓ(h') <= n_max`, with `cl` searched up
/// to `max_radius` and `ctn` from [`conjugacy::min_norm_conjugator`].
pub fn paired_cl_ctn(g: &SplitGroup, n_max: usize, max_radius: usize) -> Result<Vec<PairedSample>> {
    g.require_discrete()?;
    let ball = g.ball(max_radius.max(n_max))?;
    exhaustive_cl(g, &ball, n_max)
}

/// Affine envelopes `A cl - B <= ctn <= C cl + D`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub sample_count: usize,
}

impl Sandwich {
    /// Number of points `(cl, ctn)` outside the envelopes by more than `eps`.
    pub fn violations(&self, points: &[(f64, f64)], eps: f64) -> usize {
        points
            .iter()
            .filter(|&&(cl, ctn)| ctn > self.c * cl + self.d + eps || ctn < self.a * cl - self.b - eps)
            .count()
    }
}

/// Fits both envelopes from `(cl, ctn)` points. The lower one comes from an
/// upper envelope `cl <= C' ctn + D'`, rearranged; if `C' = 0` it is the
/// trivial bound `ctn >= 0`.
pub fn fit_sandwich(points: &[(f64, f64)]) -> Result<Sandwich> {
    let upper = fit_affine_upper_points(points)?;
    let swapped: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (y, x)).collect();
    let lower = fit_affine_upper_points(&swapped)?;
    let (a, b) = if lower.slope > 0.0 {
        (1.0 / lower.slope, lower.intercept / lower.slope)
    } else {
        (0.0, 0.0)
    };
    Ok(Sandwich {
        a,
        b,
        c: upper.slope,
        d: upper.intercept,
        sample_count: points.len(),
    })
}

/// Affine upper envelope of `(n, tnorm_emp)`.
pub fn fit_affine_upper(records: &[GrowthRecord]) -> Result<AffineFit> {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.n as f64, r.tnorm_emp)).collect();
    fit_affine_upper_points(&pts)
}

/// Affine upper envelope of `(clf_emp, n)` records; records without a CLF
/// value are skipped.
pub fn fit_affine_upper_clf(records: &[GrowthRecord]) -> Result<AffineFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.clf_emp.map(|c| (r.n as f64, c as f64)))
        .collect();
    fit_affine_upper_points(&pts)
}

/// Upper supporting line of the points with nonnegative slope and intercept.
///
/// Among the edges of the upper convex hull, picks the one above the mean
/// abscissa, which minimizes the summed gap to the points. Negative slopes
/// are clamped to 0 and the intercept raised to keep the line above.
pub fn fit_affine_upper_points(points: &[(f64, f64)]) -> Result<AffineFit> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("affine fit needs at least two points".into()));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidInput("affine fit needs finite points".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    // Keep the highest point per abscissa.
    pts.dedup_by(|b, a| a.0 == b.0);
    let hull = upper_hull(&pts);
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let mut slope = 0.0;
    if hull.len() >= 2 {
        let i = hull
            .windows(2)
            .position(|w| mean_x <= w[1].0)
            .unwrap_or(hull.len() - 2);
        let (p, q) = (hull[i], hull[i + 1]);
        slope = (q.1 - p.1) / (q.0 - p.0);
    }
    let slope = slope.max(0.0);
    let intercept = points.iter().map(|&(x, y)| y - slope * x).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let max_residual = points
        .iter()
        .map(|&(x, y)| slope * x + intercept - y)
        .fold(0.0, f64::max);
    Ok(AffineFit {
        slope,
        intercept,
        max_residual,
        sample_count: points.len(),
    })
}

fn upper_hull(sorted: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in sorted {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// `k1 = max_{w ∈ H_0} |(Id - w)^+|`.
pub fn pinv_norm_bound(g: &SplitGroup) -> f64 {
    let n = g.dim();
    g.spherical_group()
        .iter()
        .map(|w| linalg::pseudoinverse(&(&Matrix::identity(n) - w), g.tolerances()).operator_norm())
        .fold(0.0, f64::max)
}

/// `k3 = max_{w ∈ H_0} |w|`.
pub fn spherical_norm_bound(g: &SplitGroup) -> f64 {
    g.spherical_group().iter().map(Matrix::operator_norm).fold(0.0, f64::max)
}

/// `k0`: the largest `sum |b_i| / 2` over LLL-reduced bases of
/// `Fix(w) ∩ L_H` (integer part, taken modulo the real part), `w ∈ H_0`.
pub fn cvp_radius_bound(g: &SplitGroup) -> Result<f64> {
    let tol = g.tolerances();
    let mut k0 = 0.0f64;
    for w in g.spherical_group() {
        let fix = conjugacy::fix_lattice(g, w)?;
        let real = fix.real_span(tol);
        let projected: Vec<_> = fix.int_basis.iter().map(|b| real.reject(b)).collect();
        k0 = k0.max(cvp::covering_radius_bound(&cvp::lll_reduce(&projected)));
    }
    Ok(k0)
}

/// CSV with columns `n,tnorm_emp,clf_emp,samples_used`.
pub fn write_csv<W: Write>(records: &[GrowthRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "tnorm_emp", "clf_emp", "samples_used"])?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            format!("{:.12}", r.tnorm_emp),
            r.clf_emp.map(|c| c.to_string()).unwrap_or_default(),
            r.samples_used.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Takes `tnorm` records and fills `clf_emp` (and the larger sample count)
/// from `clf` records with the same `n`.
pub fn merge_records(tnorm: &[GrowthRecord], clf: &[GrowthRecord]) -> Vec<GrowthRecord> {
    tnorm
        .iter()
        .map(|t| {
            let c = clf.iter().find(|c| c.n == t.n);
            GrowthRecord {
                clf_emp: c.and_then(|c| c.clf_emp),
                samples_used: t.samples_used.max(c.map_or(0, |c| c.samples_used)),
                ..t.clone()
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub records: Vec<GrowthRecord>,
    pub tnorm_fit: AffineFit,
    pub clf_fit: Option<AffineFit>,
    pub constants: GrowthConstants,
    pub clf_exceeded: usize,
    pub seed: u64,
    pub count: usize,
}

impl GrowthReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
