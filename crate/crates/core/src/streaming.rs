//! Streaming setting: rows arrive one at a time instead of living in a fixed
//! matrix. Each incoming pair is corrupted independently with probability
//! `beta`, and the quantile-step method estimates its threshold from a batch
//! of fresh pairs every iteration. A small half-normal toolbox backs the
//! feasibility check for (quantile, corruption-rate) combinations.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{dot_unchecked, norm, quantile_in_place, sign_step_mut, Vector};
use crate::rng::{role_rng, StreamRole};
use crate::solvers::{IterationTrace, TraceRow};

/// How corrupted right-hand sides are chosen at generation time.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamAdversary {
    /// b = <a, x_star> + delta with delta uniform on [-c, c], resampled away
    /// from exactly zero.
    UniformAdditive { half_width: f64 },
    /// b = <a, x_adv> for a fixed phantom solution: the corrupted pairs are
    /// perfectly consistent with the wrong vector.
    PhantomSolution(Vector),
    /// b = 0 regardless of the row.
    ZeroOut,
}

/// Generator of (row, rhs) pairs with independent per-pair corruption.
///
/// Rows are standard n-variate Gaussians, handed out raw; the solver
/// normalizes before stepping, which changes nothing about the methods (they
/// are invariant under row rescaling) but keeps the step-length contracts of
/// the fixed-matrix setting.
#[derive(Debug, Clone)]
pub struct StreamSource {
    dim: usize,
    beta: f64,
    adversary: StreamAdversary,
    sample_size: usize,
    rng: ChaCha8Rng,
}

pub const DEFAULT_STREAM_SAMPLE_SIZE: usize = 400;

impl StreamSource {
    pub fn new(dim: usize, beta: f64, adversary: StreamAdversary, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig {
                reason: "stream dimension must be at least 1".into(),
            });
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::BetaOutOfRange { beta });
        }
        if let StreamAdversary::PhantomSolution(x_adv) = &adversary {
            if x_adv.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: x_adv.len(),
                });
            }
        }
        if let StreamAdversary::UniformAdditive { half_width } = adversary {
            if !(half_width > 0.0) || !half_width.is_finite() {
                return Err(Error::InvalidConfig {
                    reason: format!("additive half-width must be positive and finite, got {half_width}"),
                });
            }
        }
        Ok(StreamSource {
            dim,
            beta,
            adversary,
            sample_size: DEFAULT_STREAM_SAMPLE_SIZE,
            rng: role_rng(seed, StreamRole::StreamingPairs),
        })
    }

    pub fn with_sample_size(mut self, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidConfig {
                reason: "quantile sample size must be at least 1".into(),
            });
        }
        self.sample_size = s;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    /// Draws the next pair. Per pair: the row first, then the corruption
    /// coin, then any adversary value, so streams replay exactly for a seed.
    pub fn next_pair(&mut self, x_star: &[f64]) -> Result<(Vector, f64, bool)> {
        if x_star.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x_star.len(),
            });
        }
        let mut a = vec![0.0; self.dim];
        loop {
            for v in a.iter_mut() {
                *v = self.rng.sample(StandardNormal);
            }
            // Degenerate draws would break the later normalization.
            if norm(&a) > 1e-8 {
                break;
            }
        }
        let corrupted = self.rng.random_bool(self.beta);
        let b = if corrupted {
            match &self.adversary {
                StreamAdversary::UniformAdditive { half_width } => {
                    let clean = dot_unchecked(&a, x_star);
                    let mut delta = 0.0;
                    while delta == 0.0 {
                        delta = self.rng.random_range(-half_width..*half_width);
                    }
                    clean + delta
                }
                StreamAdversary::PhantomSolution(x_adv) => dot_unchecked(&a, x_adv),
                StreamAdversary::ZeroOut => 0.0,
            }
        } else {
            dot_unchecked(&a, x_star)
        };
        Ok((Vector::from_raw(a), b, corrupted))
    }
}

/// Quantile-step method on a stream: every iteration spends `sample_size`
/// fresh pairs purely on threshold estimation (gamma = q-quantile of their
/// normalized residual magnitudes at the current iterate), then one more pair
/// on the actual signed step. Starts from the origin unless `x0` overrides.
pub fn streaming_quantile_sgd(
    source: &mut StreamSource,
    q: f64,
    iterations: usize,
    x_star: &[f64],
    x0: Option<&[f64]>,
) -> Result<(Vector, IterationTrace)> {
    if !(q > 0.0 && q < 1.0) || !q.is_finite() {
        return Err(Error::QuantileOutOfRange { q });
    }
    if x_star.len() != source.dim {
        return Err(Error::DimensionMismatch {
            expected: source.dim,
            got: x_star.len(),
        });
    }
    let mut x: Vec<f64> = match x0 {
        Some(v) => {
            if v.len() != source.dim {
                return Err(Error::DimensionMismatch {
                    expected: source.dim,
                    got: v.len(),
                });
            }
            v.to_vec()
        }
        None => vec![0.0; source.dim],
    };

    let e0 = distance(&x, x_star);
    let rel_err = |x: &[f64]| -> f64 {
        let d = distance(x, x_star);
        if e0 > 0.0 {
            d / e0
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };

    let mut trace = IterationTrace::default();
    trace.rows.push(TraceRow {
        iteration: 0,
        relative_error: Some(rel_err(&x)),
        step_size: 0.0,
        accepted: None,
        threshold: None,
    });

    let mut residuals = Vec::with_capacity(source.sample_size);
    for k in 1..=iterations {
        residuals.clear();
        for _ in 0..source.sample_size {
            let (a, b, _) = source.next_pair(x_star)?;
            let scale = norm(&a);
            residuals.push((dot_unchecked(&a, &x) - b).abs() / scale);
        }
        let gamma = quantile_in_place(&mut residuals, q);

        let (a, b, _) = source.next_pair(x_star)?;
        let scale = norm(&a);
        let row: Vec<f64> = a.iter().map(|v| v / scale).collect();
        sign_step_mut(&mut x, &row, b / scale, gamma);

        trace.rows.push(TraceRow {
            iteration: k,
            relative_error: Some(rel_err(&x)),
            step_size: gamma,
            accepted: None,
            threshold: Some(gamma),
        });
    }

    Ok((Vector::from_raw(x), trace))
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        let d = x[i] - y[i];
        acc += d * d;
    }
    acc.sqrt()
}

/// Standard half-normal distribution |Z|, Z ~ N(0,1).
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfNormal;

impl HalfNormal {
    /// P(|Z| <= z) = erf(z / sqrt(2)); zero for negative z.
    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else {
            erf(z / SQRT_2)
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        half_normal_quantile(q)
    }

    /// E|Z| = sqrt(2/pi).
    pub fn mean(&self) -> f64 {
        (2.0 / PI).sqrt()
    }
}

/// z such that P(|Z| <= z) = q, found by bisection on the CDF to absolute
/// accuracy well under 1e-10.
pub fn half_normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) || !q.is_finite() {
        return Err(Error::BadDomain {
            reason: format!("half-normal quantile needs q in (0,1), got {q}"),
        });
    }
    let cdf = |z: f64| erf(z / SQRT_2);
    let mut hi = 1.0;
    while cdf(hi) < q && hi < 1e9 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// erf via its Maclaurin series for small arguments and a continued fraction
/// for the complement beyond 2, where the series loses digits.
fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= 2.0 {
        erf_series(x)
    } else {
        1.0 - erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) * sum_k (-1)^k x^(2k+1) / (k! (2k+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..200 {
        term *= -x2 / k as f64;
        let add = term / (2 * k + 1) as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // sqrt(pi) e^(x^2) erfc(x) = 1 / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    // evaluated with modified Lentz.
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for n in 1..200 {
        let a_n = n as f64 / 2.0;
        d = x + a_n * d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a_n / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

pub const STREAMING_RATE_CONSTANT: f64 = 1.99;

/// Whether the streaming method's contraction condition holds at (q, beta):
/// the (q+beta)-quantile of the half-normal must stay below
/// C (1 - 2 beta) sqrt(2/pi). Conservative in q and beta: lowering either
/// only helps.
pub fn streaming_feasible(q: f64, beta: f64) -> Result<bool> {
    streaming_feasible_with(q, beta, STREAMING_RATE_CONSTANT)
}

pub fn streaming_feasible_with(q: f64, beta: f64, c: f64) -> Result<bool> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::BadDomain {
            reason: format!("feasibility needs q > 0, got {q}"),
        });
    }
    if !(0.0..0.5).contains(&beta) {
        return Err(Error::BadDomain {
            reason: format!("feasibility needs beta in [0, 1/2), got {beta}"),
        });
    }
    if q + beta >= 1.0 {
        return Err(Error::BadDomain {
            reason: format!("feasibility needs q + beta < 1, got {}", q + beta),
        });
    }
    let phi = half_normal_quantile(q + beta)?;
    Ok(phi < c * (1.0 - 2.0 * beta) * (2.0 / PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    fn consistent_source(dim: usize, seed: u64) -> StreamSource {
        StreamSource::new(dim, 0.0, StreamAdversary::ZeroOut, seed).unwrap()
    }

    #[test]
    fn beta_zero_pairs_are_exactly_consistent() {
        let mut src = consistent_source(6, 1);
        let x_star = vec![1.0, -2.0, 0.5, 0.0, 3.0, -0.25];
        for _ in 0..200 {
            let (a, b, corrupted) = src.next_pair(&x_star).unwrap();
            assert!(!corrupted);
            assert_eq!(dot(&a, &x_star).unwrap(), b);
        }
    }

    #[test]
    fn phantom_adversary_is_consistent_with_the_phantom() {
        let x_adv = Vector::new(vec![5.0, 5.0, 5.0]).unwrap();
        let mut src =
            StreamSource::new(3, 0.5, StreamAdversary::PhantomSolution(x_adv.clone()), 2).unwrap();
        let x_star = vec![0.0, 0.0, 0.0];
        let mut corrupted_seen = 0;
        for _ in 0..200 {
            let (a, b, corrupted) = src.next_pair(&x_star).unwrap();
            if corrupted {
                corrupted_seen += 1;
                assert_eq!(dot(&a, &x_adv).unwrap(), b);
            } else {
                assert_eq!(dot(&a, &x_star).unwrap(), b);
            }
        }
        assert!(corrupted_seen > 50);
    }

    #[test]
    fn corruption_frequency_matches_beta() {
        let beta = 0.3;
        let mut src = StreamSource::new(4, beta, StreamAdversary::ZeroOut, 3).unwrap();
        let x_star = vec![1.0, 1.0, 1.0, 1.0];
        let n = 100_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let (_, _, corrupted) = src.next_pair(&x_star).unwrap();
            hits += corrupted as usize;
        }
        let freq = hits as f64 / n as f64;
        let tol = 3.0 * (beta * (1.0 - beta) / n as f64).sqrt();
        assert!(
            (freq - beta).abs() < tol,
            "corruption frequency {freq} outside {beta} +- {tol}"
        );
    }

    #[test]
    fn source_validation() {
        assert!(StreamSource::new(0, 0.1, StreamAdversary::ZeroOut, 0).is_err());
        assert!(StreamSource::new(3, 1.0, StreamAdversary::ZeroOut, 0).is_err());
        assert!(StreamSource::new(3, -0.1, StreamAdversary::ZeroOut, 0).is_err());
        let short = Vector::new(vec![1.0]).unwrap();
        assert!(StreamSource::new(3, 0.1, StreamAdversary::PhantomSolution(short), 0).is_err());
        assert!(StreamSource::new(3, 0.1, StreamAdversary::UniformAdditive { half_width: 0.0 }, 0)
            .is_err());
        assert!(consistent_source(3, 0).with_sample_size(0).is_err());
    }

    #[test]
    fn fixed_point_when_started_at_the_solution() {
        let mut src = consistent_source(5, 7).with_sample_size(20).unwrap();
        let x_star = vec![2.0, -1.0, 0.5, 3.0, 0.0];
        let (x, trace) =
            streaming_quantile_sgd(&mut src, 0.5, 50, &x_star, Some(&x_star)).unwrap();
        assert_eq!(x.as_slice(), &x_star[..]);
        for row in &trace.rows[1..] {
            assert_eq!(row.step_size, 0.0);
            assert_eq!(row.relative_error, Some(0.0));
        }
    }

    #[test]
    fn consistent_stream_converges() {
        let mut src = consistent_source(20, 11);
        let x_star: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let (_, trace) = streaming_quantile_sgd(&mut src, 0.5, 20_000, &x_star, None).unwrap();
        let last = trace.final_relative_error().unwrap();
        assert!(last < 1e-3, "relative error only reached {last}");
    }

    #[test]
    fn heavy_corruption_still_converges_with_small_quantile() {
        let mut src = StreamSource::new(
            10,
            0.35,
            StreamAdversary::UniformAdditive { half_width: 5.0 },
            13,
        )
        .unwrap()
        .with_sample_size(100)
        .unwrap();
        let x_star: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
        let (_, trace) = streaming_quantile_sgd(&mut src, 0.1, 50_000, &x_star, None).unwrap();
        let last = trace.final_relative_error().unwrap();
        assert!(last < 1e-2, "relative error only reached {last}");
    }

    #[test]
    fn streaming_run_is_deterministic() {
        let x_star = vec![1.0, -1.0, 2.0];
        let run = || {
            let mut src = StreamSource::new(
                3,
                0.2,
                StreamAdversary::UniformAdditive { half_width: 2.0 },
                21,
            )
            .unwrap()
            .with_sample_size(30)
            .unwrap();
            streaming_quantile_sgd(&mut src, 0.4, 200, &x_star, None).unwrap()
        };
        let (x1, t1) = run();
        let (x2, t2) = run();
        let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&x1), bits(&x2));
        assert_eq!(t1, t2);
    }

    #[test]
    fn half_normal_median_and_endpoints() {
        let z = half_normal_quantile(0.5).unwrap();
        assert!((z - 0.674489750).abs() < 1e-8, "median came out {z}");
        assert!(half_normal_quantile(1e-9).unwrap() < 1e-8);
        assert!(half_normal_quantile(0.0).is_err());
        assert!(half_normal_quantile(1.0).is_err());
        let hn = HalfNormal;
        assert!((hn.mean() - 0.7978845608).abs() < 1e-9);
    }

    #[test]
    fn half_normal_quantile_is_monotone_and_inverts_the_cdf() {
        let hn = HalfNormal;
        let mut prev = 0.0;
        for i in 1..40 {
            let q = i as f64 / 40.0;
            let z = half_normal_quantile(q).unwrap();
            assert!(z > prev, "not increasing at q = {q}");
            assert!((hn.cdf(z) - q).abs() < 1e-10, "round trip off at q = {q}");
            prev = z;
        }
        // Far tail exercises the continued-fraction branch of erf.
        let z = half_normal_quantile(0.9999999).unwrap();
        assert!((hn.cdf(z) - 0.9999999).abs() < 1e-10);
        assert!(z > 5.0);
    }

    #[test]
    fn feasibility_matches_known_pairs() {
        assert!(streaming_feasible(1e-6, 0.35).unwrap());
        assert!(streaming_feasible(0.1, 0.32).unwrap());
        assert!(streaming_feasible(0.3, 0.25).unwrap());
        assert!(streaming_feasible(0.5, 0.18).unwrap());
        assert!(!streaming_feasible(0.5, 0.35).unwrap());
    }

    #[test]
    fn feasibility_domain_errors() {
        assert!(streaming_feasible(0.0, 0.2).is_err());
        assert!(streaming_feasible(0.6, 0.5).is_err());
        assert!(streaming_feasible(0.9, 0.2).is_err());
    }

    #[test]
    fn feasibility_is_monotone_on_a_grid() {
        let qs: Vec<f64> = (1..19).map(|i| i as f64 / 20.0).collect();
        let betas: Vec<f64> = (0..10).map(|i| i as f64 / 20.0).collect();
        for (qi, &q) in qs.iter().enumerate() {
            for (bi, &beta) in betas.iter().enumerate() {
                if q + beta >= 1.0 {
                    continue;
                }
                if streaming_feasible(q, beta).unwrap() {
                    if qi > 0 {
                        assert!(streaming_feasible(qs[qi - 1], beta).unwrap());
                    }
                    if bi > 0 {
                        assert!(streaming_feasible(q, betas[bi - 1]).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_to_error_ratio_distribution_is_stable() {
        // On a consistent stream the threshold scales linearly with the
        // error, so threshold / ||e_k|| should look the same early and late.
        // Two-sample Kolmogorov-Smirnov over 1000 iterations each. Dimension
        // 50 keeps the contraction slow enough that the late iterations stay
        // far above the floating-point cancellation floor of the residuals.
        let mut src = consistent_source(50, 31).with_sample_size(50).unwrap();
        let x_star: Vec<f64> = (0..50).map(|i| (i as f64 + 1.0) * 0.3).collect();
        let (_, trace) = streaming_quantile_sgd(&mut src, 0.5, 2000, &x_star, None).unwrap();
        let e0 = norm(&x_star);
        // Thresholds are computed at the PREVIOUS iterate, so pair row k's
        // threshold with row k-1's error.
        let ratios: Vec<f64> = (1..=2000)
            .map(|k| trace.rows[k].threshold.unwrap()
                / (trace.rows[k - 1].relative_error.unwrap() * e0))
            .collect();
        let early: Vec<f64> = ratios[..1000].to_vec();
        let late: Vec<f64> = ratios[1000..].to_vec();
        let d = ks_distance(&early, &late);
        assert!(d < 0.05, "KS distance {d} between early and late ratios");
    }

    fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            let fa = i as f64 / a.len() as f64;
            let fb = j as f64 / b.len() as f64;
            d = d.max((fa - fb).abs());
        }
        d
    }
}
