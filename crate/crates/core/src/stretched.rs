//! Stretched-exponential diagnostics for cₙ ~ C·μⁿ·μ₁^{n^σ}·n^g: the ratio
//! expansion, σ estimators with and without a known growth rate, and μ₁.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::numeric::{ln, pow_rational};
use crate::ratio::{default_window, extrapolate_exponents, intercepts, log_gradient, EstimatorSeq, Extrapolation};
use crate::series::ExactSeries;

fn check_sigma(sigma: &Rational) -> Result<()> {
    if *sigma <= 0 || *sigma >= 1 {
        return Err(Error::Invalid(format!("stretch exponent must lie in (0,1), got {sigma}")));
    }
    Ok(())
}

fn npow(n: u64, e: &Rational, bits: u32) -> Float {
    pow_rational(n, e, bits)
}

/// Truncated large-n expansion of rₙ. σ = 1/2, 1/3 and 1/4 use their own
/// collected forms; other σ use the generic truncation.
pub fn ratio_expansion(mu: &Float, mu1: &Float, sigma: &Rational, g: &Float, n: u64) -> Result<Float> {
    check_sigma(sigma)?;
    if *mu <= 0 || *mu1 <= 0 {
        return Err(Error::Invalid("growth constants must be positive".into()));
    }
    let bits = mu.prec();
    let l = ln(&Float::with_val(bits, mu1));
    let l2 = Float::with_val(bits, l.square_ref());
    let l3 = Float::with_val(bits, &l2 * &l);
    let g = Float::with_val(bits, g);
    let inv = |e: (i32, u32)| npow(n, &Rational::from(e), bits);
    let half = Rational::from((1, 2));
    let third = Rational::from((1, 3));
    let quarter = Rational::from((1, 4));
    let mut s = Float::with_val(bits, 1);
    if *sigma == half {
        s += Float::with_val(bits, &l / 2u32) * inv((-1, 2));
        s += (Float::with_val(bits, &l2 / 8u32) + &g) * inv((-1, 1));
        let c = Float::with_val(bits, &g * 24u32) + 6u32;
        s += (Float::with_val(bits, &l * c) + &l3) / 48u32 * inv((-3, 2));
    } else if *sigma == third {
        s += Float::with_val(bits, &l / 3u32) * inv((-2, 3));
        s += Float::with_val(bits, &g * inv((-1, 1)));
        s += Float::with_val(bits, &l2 / 18u32) * inv((-4, 3));
        let c = Float::with_val(bits, &g * 6u32) + 2u32;
        s += Float::with_val(bits, &l * c) / 18u32 * inv((-5, 3));
    } else if *sigma == quarter {
        s += Float::with_val(bits, &l / 4u32) * inv((-3, 4));
        s += Float::with_val(bits, &g * inv((-1, 1)));
        s += Float::with_val(bits, &l2 / 32u32) * inv((-3, 2));
        let c = Float::with_val(bits, &g * 8u32) + 3u32;
        s += Float::with_val(bits, &l * c) / 32u32 * inv((-7, 4));
    } else {
        let sf = Float::with_val(bits, sigma);
        let one_m: Rational = 1 - sigma.clone();
        s += Float::with_val(bits, &sf * &l) * npow(n, &Rational::from(-&one_m), bits);
        s += Float::with_val(bits, &g * inv((-1, 1)));
        let s2 = Float::with_val(bits, sf.square_ref());
        s += Float::with_val(bits, &s2 * &l2) / 2u32 * npow(n, &(-2 * one_m.clone()), bits);
        // ((σ−σ²) + 2gσ)·log μ₁ / (2n^{2−σ})
        let c = Float::with_val(bits, &sf - &s2) + Float::with_val(bits, &g * &sf) * 2u32;
        let e = Rational::from(sigma - 2u32);
        s += Float::with_val(bits, &c * &l) / 2u32 * npow(n, &e, bits);
        let s3 = Float::with_val(bits, &s2 * &sf);
        s += Float::with_val(bits, &s3 * &l3) / 6u32 * npow(n, &(-3 * one_m), bits);
    }
    Ok(s * mu)
}

/// Ratio intercepts relabelled for a stretched singularity: the abscissa is
/// n^{-(1-σ)}, the order of the surviving correction.
pub fn stretched_intercepts(r: &EstimatorSeq, level: u8, sigma: &Rational) -> Result<EstimatorSeq> {
    check_sigma(sigma)?;
    if level > 2 {
        return Err(Error::Invalid(format!("stretched intercept level must be 1 or 2, got {level}")));
    }
    let mut out = intercepts(r, level)?;
    out.abscissa = 1 - sigma.clone();
    out.label = format!("stretched_{}", out.label);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnownMuMethod {
    /// Local log-log gradient of |xₙ/μ − 1|, plus one.
    GradientLogRatio,
    /// Local log-log gradient of dₙ = log(bₙ/μⁿ) − log(bₙ₋₁/μⁿ⁻¹), plus one.
    GradientLogDiff,
}

/// σ̃ₙ from ratios (or linear intercepts) with a known growth rate μ.
pub fn sigma_known_mu(x: &EstimatorSeq, mu: &Float, method: KnownMuMethod) -> Result<EstimatorSeq> {
    if *mu <= 0 {
        return Err(Error::Invalid("growth rate must be positive".into()));
    }
    let bits = x.bits();
    let inner = match method {
        KnownMuMethod::GradientLogRatio => {
            x.pointwise("x_over_mu_minus_1", Rational::from(0), |_, v| Some(Float::with_val(bits, v / mu) - 1u32))
        }
        KnownMuMethod::GradientLogDiff => x.pointwise("d", Rational::from(0), |_, v| {
            (*v > 0).then(|| ln(&Float::with_val(bits, v / mu)))
        }),
    };
    let mut out = log_gradient(&inner, "sigma");
    for (_, v) in out.values.iter_mut() {
        *v += 1u32;
    }
    out.gaps.extend(inner.gaps);
    out.gaps.sort_unstable();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownMuMethod {
    /// rₙ/rₙ₋₁ − 1.
    RatioOfRatios,
    /// bₙ^{1/n}/bₙ₋₁^{1/(n−1)} − 1.
    RootRatio,
}

/// Local log-log gradient of a quantity behaving like n^{σ−2}; returns the
/// gradient itself, so σ = value + 2.
pub fn sigma_unknown_mu(s: &ExactSeries, bits: u32, method: UnknownMuMethod) -> Result<EstimatorSeq> {
    let b = s.values(bits);
    if let Some((n, _)) = b.values.iter().find(|(_, v)| *v <= 0) {
        return Err(Error::Invalid(format!("coefficient at index {n} is not positive")));
    }
    let q = match method {
        UnknownMuMethod::RatioOfRatios => {
            let r = crate::series::ratios(s, bits)?;
            r.pairwise("ratio_of_ratios", Rational::from(0), |_, cur, prev| Some(Float::with_val(bits, cur / prev) - 1u32))
        }
        UnknownMuMethod::RootRatio => b.pairwise("root_ratio", Rational::from(0), |n, cur, prev| {
            if n < 2 {
                return None;
            }
            let a = Float::with_val(bits, ln(cur) / n);
            let c = Float::with_val(bits, ln(prev) / (n - 1));
            Some((a - c).exp() - 1u32)
        }),
    };
    let pos = q.pointwise("positive", Rational::from(0), |_, v| (*v > 0).then(|| v.clone()));
    let mut out = log_gradient(&pos, "sigma_minus_2");
    out.gaps.extend(q.gaps);
    out.gaps.extend(pos.gaps);
    out.gaps.sort_unstable();
    out.gaps.dedup();
    Ok(out)
}

/// Exponents e > 0 of the leading corrections n^{-e} to (rₙ/μ − 1)·n^{1−σ}.
pub fn mu1_correction_exponents(sigma: &Rational, count: usize) -> Vec<Rational> {
    let one_m: Rational = 1 - sigma.clone();
    let mut es: Vec<Rational> = Vec::new();
    for a in 1..=count as u32 + 1 {
        for b in 0..=count as u32 + 1 {
            es.push(Rational::from(&one_m * (a - 1)) + b);
        }
    }
    for b in 1..=count as u32 + 1 {
        es.push(Rational::from(sigma + b) - 1u32);
    }
    es.retain(|e| *e > 0);
    es.sort();
    es.dedup();
    es.truncate(count);
    es
}

/// Exponents of the leading corrections to σ̃ₙ. Linear intercepts cancel the
/// 1/n term of the ratios, which removes the n^{-σ} correction.
pub fn sigma_correction_exponents(sigma: &Rational, on_intercepts: bool, count: usize) -> Vec<Rational> {
    let mut es = mu1_correction_exponents(sigma, count + 1);
    if on_intercepts {
        es.retain(|e| e != sigma);
    }
    es.truncate(count);
    es
}

/// Extrapolate a σ̃ₙ sequence with corrections built from a trial σ.
pub fn extrapolate_sigma(seq: &EstimatorSeq, trial: &Rational, on_intercepts: bool, window: Option<usize>) -> Result<Extrapolation> {
    check_sigma(trial)?;
    let ex = sigma_correction_exponents(trial, on_intercepts, 3);
    let window = window.unwrap_or_else(|| default_window(seq.len()).max(ex.len() + 2));
    extrapolate_exponents(seq, &ex, window)
}

#[derive(Clone, Debug)]
pub struct Mu1Estimate {
    /// (rₙ/μ − 1)·n^{1−σ}, tending to σ·log μ₁.
    pub seq: EstimatorSeq,
    /// Extrapolated σ·log μ₁.
    pub sigma_log_mu1: Float,
    pub mu1: Float,
    pub window: usize,
    /// Correction exponents used in the extrapolation.
    pub exponents: Vec<Rational>,
}

/// μ₁ from ratios with μ and σ given. The tail of the sequence is fitted to
/// a constant plus the `corrections` leading corrections over `window` points.
pub fn mu1_estimate(
    r: &EstimatorSeq,
    mu: &Float,
    sigma: &Rational,
    corrections: usize,
    window: Option<usize>,
) -> Result<Mu1Estimate> {
    check_sigma(sigma)?;
    let bits = r.bits();
    let one_m: Rational = 1 - sigma.clone();
    let seq = r.pointwise("sigma_log_mu1", sigma.clone(), |n, v| {
        Some((Float::with_val(bits, v / mu) - 1u32) * npow(n, &one_m, bits))
    });
    let exponents = mu1_correction_exponents(sigma, corrections);
    let window = window.unwrap_or_else(|| default_window(seq.len()).max(exponents.len() + 2));
    let fit = extrapolate_exponents(&seq, &exponents, window)?;
    let sigma_log_mu1 = fit.intercept;
    let mu1 = Float::with_val(bits, &sigma_log_mu1 / Float::with_val(bits, sigma)).exp();
    Ok(Mu1Estimate { seq, sigma_log_mu1, mu1, window, exponents })
}

/// The four σ sequences and the μ₁ sequence for one series.
#[derive(Clone, Debug)]
pub struct StretchDiagnostics {
    pub sigma_gradient_log_ratio: Option<EstimatorSeq>,
    pub sigma_gradient_log_diff: Option<EstimatorSeq>,
    /// Already shifted by +2, so it estimates σ directly.
    pub sigma_ratio_of_ratios: EstimatorSeq,
    pub sigma_root_ratio: EstimatorSeq,
    pub mu1: Option<Mu1Estimate>,
    pub sigma: Rational,
}

/// Known-μ estimators run on linear intercepts when `use_intercepts` is set,
/// otherwise on the ratios.
pub fn stretch_diagnostics(
    s: &ExactSeries,
    mu: Option<&Float>,
    sigma: &Rational,
    use_intercepts: bool,
    bits: u32,
) -> Result<StretchDiagnostics> {
    check_sigma(sigma)?;
    let shift = |mut e: EstimatorSeq| {
        for (_, v) in e.values.iter_mut() {
            *v += 2u32;
        }
        e.label = "sigma".into();
        e
    };
    let rr = shift(sigma_unknown_mu(s, bits, UnknownMuMethod::RatioOfRatios)?);
    let rt = shift(sigma_unknown_mu(s, bits, UnknownMuMethod::RootRatio)?);
    let (mut a, mut b, mut m) = (None, None, None);
    if let Some(mu) = mu {
        let r = crate::series::ratios(s, bits)?;
        let x = if use_intercepts { intercepts(&r, 1)? } else { r.clone() };
        a = Some(sigma_known_mu(&x, mu, KnownMuMethod::GradientLogRatio)?);
        b = Some(sigma_known_mu(&r, mu, KnownMuMethod::GradientLogDiff)?);
        m = mu1_estimate(&r, mu, sigma, 3, None).ok();
    }
    Ok(StretchDiagnostics {
        sigma_gradient_log_ratio: a,
        sigma_gradient_log_diff: b,
        sigma_ratio_of_ratios: rr,
        sigma_root_ratio: rt,
        mu1: m,
        sigma: sigma.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u32 = 256;

    fn f(x: f64) -> Float {
        Float::with_val(B, x)
    }

    #[test]
    fn trivial_mu1_reduces_to_power_law() {
        for s in [(1, 2), (1, 3), (1, 4), (2, 5)] {
            let v = ratio_expansion(&f(16.0), &f(1.0), &Rational::from(s), &f(-2.0), 40).unwrap();
            assert!((v.to_f64() - 16.0 * (1.0 - 2.0 / 40.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn half_example() {
        let e1 = (-1f64).exp();
        let v = ratio_expansion(&f(1.0), &f(e1), &Rational::from((1, 2)), &f(0.0), 100).unwrap();
        let want = 1.0 - 1.0 / 20.0 + 1.0 / 800.0 - 7.0 / 48000.0;
        assert!((v.to_f64() - want).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(ratio_expansion(&f(1.0), &f(1.0), &Rational::from(1), &f(0.0), 5).is_err());
        assert!(stretched_intercepts(&EstimatorSeq::new("r", vec![], Rational::from(1)), 3, &Rational::from((1, 2))).is_err());
    }

    #[test]
    fn exponents_for_common_sigmas() {
        let e = mu1_correction_exponents(&Rational::from((1, 2)), 3);
        assert_eq!(e, vec![Rational::from((1, 2)), Rational::from(1), Rational::from((3, 2))]);
        let e = mu1_correction_exponents(&Rational::from((1, 3)), 3);
        assert_eq!(e, vec![Rational::from((1, 3)), Rational::from((2, 3)), Rational::from(1)]);
        let e = mu1_correction_exponents(&Rational::from((1, 4)), 3);
        assert_eq!(e, vec![Rational::from((1, 4)), Rational::from((3, 4)), Rational::from(1)]);
    }
}
