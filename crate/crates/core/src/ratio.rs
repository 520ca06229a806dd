//! Ratio-method estimators for power-law asymptotics: modified ratios,
//! intercept ladders, exponent and growth estimators, and tail extrapolation.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::numeric::{fit_least_squares, fmt_float, ln, pow_rational};

/// A sequence of estimates indexed by n, with a suggested plotting abscissa
/// n^{-p}.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorSeq {
    pub label: String,
    pub values: Vec<(u64, Float)>,
    pub abscissa: Rational,
    /// First index whose value depends on predicted (not exact) data.
    pub first_predicted: Option<u64>,
    /// Indices skipped because the estimator was undefined there.
    pub gaps: Vec<u64>,
}

impl EstimatorSeq {
    pub fn new(label: impl Into<String>, values: Vec<(u64, Float)>, abscissa: Rational) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0].0 < w[1].0));
        EstimatorSeq { label: label.into(), values, abscissa, first_predicted: None, gaps: Vec::new() }
    }

    /// Values `v[0]` at index `start`, `v[1]` at `start + 1`, ...
    pub fn from_floats(label: impl Into<String>, start: u64, v: Vec<Float>, abscissa: Rational) -> Self {
        let values = v.into_iter().enumerate().map(|(i, x)| (start + i as u64, x)).collect();
        Self::new(label, values, abscissa)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: u64) -> Option<&Float> {
        self.values.binary_search_by_key(&n, |(k, _)| *k).ok().map(|i| &self.values[i].1)
    }

    pub fn last(&self) -> Option<&(u64, Float)> {
        self.values.last()
    }

    pub fn bits(&self) -> u32 {
        self.values.first().map_or(64, |(_, v)| v.prec())
    }

    /// Same estimator restricted to indices `lo..=hi`.
    pub fn range(&self, lo: u64, hi: u64) -> EstimatorSeq {
        let values = self.values.iter().filter(|(n, _)| (lo..=hi).contains(n)).cloned().collect();
        EstimatorSeq { values, ..self.clone() }
    }

    fn derived(&self, label: &str, values: Vec<(u64, Float)>, abscissa: Rational, gaps: Vec<u64>) -> EstimatorSeq {
        let first_predicted = self.first_predicted;
        EstimatorSeq { label: label.into(), values, abscissa, first_predicted, gaps }
    }

    /// Two-column text: abscissa n^{-p} (or n itself when p = 0) and value.
    pub fn plot_columns(&self, sig: usize) -> String {
        let bits = self.bits();
        let neg = Rational::from(-&self.abscissa);
        let lines: Vec<String> = self
            .values
            .iter()
            .map(|(n, v)| {
                let x = if self.abscissa == 0 { Float::with_val(bits, *n) } else { pow_rational(*n, &neg, bits) };
                format!("{} {}", fmt_float(&x, sig), fmt_float(v, sig))
            })
            .collect();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    /// Map consecutive pairs (n−1, n) through `f`; `None` records a gap at n.
    pub(crate) fn pairwise<F>(&self, label: &str, abscissa: Rational, mut f: F) -> EstimatorSeq
    where
        F: FnMut(u64, &Float, &Float) -> Option<Float>,
    {
        let mut values = Vec::new();
        let mut gaps = Vec::new();
        for w in self.values.windows(2) {
            let (m, prev) = (&w[0].0, &w[0].1);
            let (n, cur) = (&w[1].0, &w[1].1);
            if *n != m + 1 {
                continue;
            }
            match f(*n, cur, prev) {
                Some(v) if v.is_finite() => values.push((*n, v)),
                _ => gaps.push(*n),
            }
        }
        let mut out = self.derived(label, values, abscissa, gaps);
        out.first_predicted = self.first_predicted;
        out
    }

    pub(crate) fn pointwise<F>(&self, label: &str, abscissa: Rational, mut f: F) -> EstimatorSeq
    where
        F: FnMut(u64, &Float) -> Option<Float>,
    {
        let mut values = Vec::new();
        let mut gaps = Vec::new();
        for (n, v) in &self.values {
            match f(*n, v) {
                Some(x) if x.is_finite() => values.push((*n, x)),
                _ => gaps.push(*n),
            }
        }
        self.derived(label, values, abscissa, gaps)
    }
}

fn fl(bits: u32, n: u64) -> Float {
    Float::with_val(bits, n)
}

/// r2ₙ = (n²rₙ − (n−1)²rₙ₋₁)/(2n).
pub fn modified_ratios(r: &EstimatorSeq) -> EstimatorSeq {
    let bits = r.bits();
    r.pairwise("modified_ratio", Rational::from(1), |n, cur, prev| {
        let a = Float::with_val(bits, cur * fl(bits, n * n));
        let b = Float::with_val(bits, prev * fl(bits, (n - 1) * (n - 1)));
        Some((a - b) / fl(bits, 2 * n))
    })
}

/// Linear (1), quadratic (2) and cubic (3) intercepts of the ratios.
pub fn intercepts(r: &EstimatorSeq, level: u8) -> Result<EstimatorSeq> {
    let bits = r.bits();
    let l1 = r.pairwise("intercept_1", Rational::from(2), |n, cur, prev| {
        let a = Float::with_val(bits, cur * fl(bits, n));
        let b = Float::with_val(bits, prev * fl(bits, n - 1));
        Some(a - b)
    });
    if level == 1 {
        return Ok(l1);
    }
    let l2 = l1.pairwise("intercept_2", Rational::from(3), |n, cur, prev| {
        let a = Float::with_val(bits, cur * fl(bits, n * n));
        let b = Float::with_val(bits, prev * fl(bits, (n - 1) * (n - 1)));
        Some((a - b) / fl(bits, 2 * n - 1))
    });
    if level == 2 {
        return Ok(l2);
    }
    if level != 3 {
        return Err(Error::Invalid(format!("intercept level must be 1, 2 or 3, got {level}")));
    }
    Ok(l2.pairwise("intercept_3", Rational::from(4), |n, cur, prev| {
        let a = Float::with_val(bits, cur * fl(bits, n * n * n));
        let b = Float::with_val(bits, prev * fl(bits, (n - 1) * (n - 1) * (n - 1)));
        Some((a - b) / fl(bits, 3 * n * n - 3 * n + 1))
    }))
}

/// γₙ = n(z_c·rₙ − 1) + 1.
pub fn exponent_gamma(r: &EstimatorSeq, zc: &Float) -> EstimatorSeq {
    let bits = r.bits();
    r.pointwise("gamma", Rational::from(1), |n, v| {
        let t = Float::with_val(bits, v * zc) - 1u32;
        Some(t * fl(bits, n) + 1u32)
    })
}

/// δₙ = 1 + n²(1 − rₙ/rₙ₋₁).
pub fn exponent_delta(r: &EstimatorSeq) -> Result<EstimatorSeq> {
    if let Some((n, _)) = r.values.iter().find(|(_, v)| v.is_zero()) {
        return Err(Error::ZeroCoefficient(*n));
    }
    let bits = r.bits();
    Ok(r.pairwise("delta", Rational::from(1), |n, cur, prev| {
        let s = Float::with_val(bits, cur / prev);
        Some((1u32 - s) * fl(bits, n * n) + 1u32)
    }))
}

/// μₙ = n·rₙ/(n+γ−1); indices where the denominator vanishes become gaps.
pub fn growth_given_exponent(r: &EstimatorSeq, gamma: &Float) -> EstimatorSeq {
    let bits = r.bits();
    r.pointwise("mu", Rational::from(1), |n, v| {
        let d = Float::with_val(bits, gamma + n) - 1u32;
        if d.is_zero() {
            return None;
        }
        Some(Float::with_val(bits, v * n) / d)
    })
}

/// n²(sₙ − 1) with sₙ = rₙ/rₙ₋₁.
pub fn divergence_test(r: &EstimatorSeq) -> EstimatorSeq {
    let bits = r.bits();
    r.pairwise("divergence", Rational::from(1), |n, cur, prev| {
        if prev.is_zero() {
            return None;
        }
        let s = Float::with_val(bits, cur / prev) - 1u32;
        Some(s * fl(bits, n * n))
    })
}

/// Negated local log-log gradient of |(rₙ/μ − 1)n − g|.
pub fn delta_exponent(r: &EstimatorSeq, mu: &Float, g: &Float) -> EstimatorSeq {
    let bits = r.bits();
    let resid = r.pointwise("delta_resid", Rational::from(0), |n, v| {
        let t = Float::with_val(bits, v / mu) - 1u32;
        Some(t * fl(bits, n) - g)
    });
    let mut out = log_gradient(&resid, "Delta");
    for (_, v) in out.values.iter_mut() {
        *v = Float::with_val(bits, -&*v);
    }
    out.gaps.extend(resid.gaps);
    out.gaps.sort_unstable();
    out
}

/// (log|xₙ| − log|xₙ₋₁|)/(log n − log(n−1)); zero values or a sign change
/// between neighbours leave a gap.
pub(crate) fn log_gradient(x: &EstimatorSeq, label: &str) -> EstimatorSeq {
    let bits = x.bits();
    x.pairwise(label, Rational::from(1), |n, cur, prev| {
        if cur.is_zero() || prev.is_zero() || cur.is_sign_negative() != prev.is_sign_negative() {
            return None;
        }
        let a = ln(&Float::with_val(bits, cur.abs_ref()));
        let b = ln(&Float::with_val(bits, prev.abs_ref()));
        let den = ln(&fl(bits, n)) - ln(&fl(bits, n - 1));
        Some((a - b) / den)
    })
}

/// Result of fitting the tail of an estimator against n^{-p}.
#[derive(Clone, Debug)]
pub struct Extrapolation {
    /// The n → ∞ estimate.
    pub intercept: Float,
    /// Coefficients of x, x², ... in order.
    pub slopes: Vec<Float>,
    pub residual: Float,
    pub window: usize,
    pub abscissa: Rational,
}

impl Extrapolation {
    pub fn slope(&self) -> &Float {
        &self.slopes[0]
    }
}

/// min(10, ⌈len/2⌉), never below 2.
pub fn default_window(len: usize) -> usize {
    10.min(len.div_ceil(2)).max(2)
}

/// Least-squares line through the last `window` points against n^{-p}.
pub fn extrapolate_tail(seq: &EstimatorSeq, p: &Rational, window: usize) -> Result<Extrapolation> {
    extrapolate_poly(seq, p, 1, window)
}

/// Polynomial of `degree` in x = n^{-p} through the last `window` points.
pub fn extrapolate_poly(seq: &EstimatorSeq, p: &Rational, degree: usize, window: usize) -> Result<Extrapolation> {
    if window < degree + 1 || window < 2 || seq.len() < window {
        return Err(Error::Invalid(format!(
            "extrapolation needs window >= {} and that many points (window {window}, have {})",
            (degree + 1).max(2),
            seq.len()
        )));
    }
    let bits = seq.bits();
    let neg = Rational::from(-p);
    let tail = &seq.values[seq.len() - window..];
    let xs: Vec<Float> = tail.iter().map(|(n, _)| pow_rational(*n, &neg, bits)).collect();
    let ys: Vec<Float> = tail.iter().map(|(_, v)| v.clone()).collect();
    let powers: Vec<Box<dyn Fn(&Float) -> Float>> = (0..=degree)
        .map(|k| -> Box<dyn Fn(&Float) -> Float> {
            Box::new(move |x: &Float| Float::with_val(x.prec(), rug::ops::Pow::pow(x, k as u32)))
        })
        .collect();
    let basis: Vec<&dyn Fn(&Float) -> Float> = powers.iter().map(|b| b.as_ref()).collect();
    let fit = fit_least_squares(&xs, &ys, &basis)
        .map_err(|_| Error::Invalid("degenerate abscissae in tail extrapolation".into()))?;
    let mut c = fit.coeffs.into_iter();
    let intercept = c.next().unwrap();
    Ok(Extrapolation { intercept, slopes: c.collect(), residual: fit.residual, window, abscissa: p.clone() })
}

/// Fit the last `window` points to c₀ + Σ cᵢ·n^{-eᵢ}; returns c₀ and the cᵢ.
pub fn extrapolate_exponents(seq: &EstimatorSeq, exponents: &[Rational], window: usize) -> Result<Extrapolation> {
    if window < exponents.len() + 1 || seq.len() < window {
        return Err(Error::Invalid(format!(
            "extrapolation needs window >= {} and that many points (window {window}, have {})",
            exponents.len() + 1,
            seq.len()
        )));
    }
    let bits = seq.bits();
    let tail = &seq.values[seq.len() - window..];
    let xs: Vec<Float> = tail.iter().map(|(n, _)| Float::with_val(bits, *n)).collect();
    let ys: Vec<Float> = tail.iter().map(|(_, v)| v.clone()).collect();
    let fns: Vec<Box<dyn Fn(&Float) -> Float>> = std::iter::once(Rational::new())
        .chain(exponents.iter().cloned())
        .map(|e| -> Box<dyn Fn(&Float) -> Float> {
            let e = Float::with_val(bits, -e);
            Box::new(move |n: &Float| Float::with_val(n.prec(), rug::ops::Pow::pow(n, &e)))
        })
        .collect();
    let basis: Vec<&dyn Fn(&Float) -> Float> = fns.iter().map(|f| f.as_ref()).collect();
    let fit = fit_least_squares(&xs, &ys, &basis)
        .map_err(|_| Error::Invalid("degenerate abscissae in tail extrapolation".into()))?;
    let mut c = fit.coeffs.into_iter();
    let intercept = c.next().unwrap();
    let abscissa = exponents.first().cloned().unwrap_or_default();
    Ok(Extrapolation { intercept, slopes: c.collect(), residual: fit.residual, window, abscissa })
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u32 = 256;

    fn seq(f: impl Fn(u64) -> Float, lo: u64, hi: u64) -> EstimatorSeq {
        EstimatorSeq::new("t", (lo..=hi).map(|n| (n, f(n))).collect(), Rational::from(1))
    }

    fn q(a: i64, b: i64) -> Float {
        Float::with_val(B, Rational::from((a, b)))
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(B, a - b).abs() < tol
    }

    #[test]
    fn modified_ratio_examples() {
        let r = seq(|_| q(1, 1), 1, 5);
        assert_eq!(*modified_ratios(&r).get(3).unwrap(), q(5, 6));
        let r = seq(|n| q(n as i64, 1), 1, 8);
        for (n, v) in modified_ratios(&r).values {
            let n = n as i64;
            assert!(close(&v, &q(3 * n * n - 3 * n + 1, 2 * n), 1e-70));
        }
    }

    #[test]
    fn intercept_examples() {
        let r = seq(|n| q(n as i64, 1), 1, 8);
        for (n, v) in intercepts(&r, 1).unwrap().values {
            assert_eq!(v, 2 * n - 1);
        }
        // r = μ(1 + g/n) → l = μ
        let r = seq(|n| q(12, 1) * (q(1, 1) + q(-3, n as i64)), 1, 30);
        for (_, v) in intercepts(&r, 1).unwrap().values {
            assert!(close(&v, &q(12, 1), 1e-70));
        }
    }

    #[test]
    fn gamma_delta_mu_on_constructed_family() {
        let mu = q(16, 1);
        let gamma = q(-13, 2);
        let r = seq(|n| Float::with_val(B, &mu * (Float::with_val(B, &gamma + n) - 1u32)) / n, 2, 40);
        let g = exponent_gamma(&r, &q(1, 16));
        assert!(close(g.get(10).unwrap(), &gamma, 1e-70));
        let m = growth_given_exponent(&r, &gamma);
        assert!(m.values.iter().all(|(_, v)| close(v, &mu, 1e-70)));

        let two = q(2, 1);
        let r2 = seq(|n| Float::with_val(B, &mu * (Float::with_val(B, &two + n) - 1u32)) / n, 2, 40);
        let d = exponent_delta(&r2).unwrap();
        assert!(close(d.get(10).unwrap(), &two, 1e-70));
        // Away from γ ∈ {1, 2}: δₙ = 1 + n(γ − 1)/(n + γ − 2).
        let d = exponent_delta(&r).unwrap();
        for n in [10u64, 25] {
            let want = Float::with_val(B, &gamma - 1u32) * n / (Float::with_val(B, &gamma + n) - 2u32) + 1u32;
            assert!(close(d.get(n).unwrap(), &want, 1e-70));
        }

        let c = seq(|_| q(16, 1), 2, 10);
        assert!(exponent_gamma(&c, &q(1, 16)).values.iter().all(|(_, v)| *v == 1));
        assert!(exponent_delta(&c).unwrap().values.iter().all(|(_, v)| *v == 1));
    }

    #[test]
    fn factorials_diverge_in_mu() {
        let r = seq(|n| q(n as i64, 1), 1, 10);
        let m = growth_given_exponent(&r, &q(1, 1));
        assert!(m.values.iter().all(|(n, v)| *v == *n));
    }

    #[test]
    fn pole_is_a_gap() {
        let r = seq(|_| q(3, 1), 1, 6);
        let m = growth_given_exponent(&r, &q(-2, 1));
        assert_eq!(m.gaps, vec![3]);
    }

    #[test]
    fn divergence_of_pure_geometric_is_zero() {
        let r = seq(|_| q(7, 1), 1, 10);
        assert!(divergence_test(&r).values.iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn extrapolation_examples() {
        let p = Rational::from((3, 2));
        let s = EstimatorSeq::new(
            "line",
            (5..30).map(|n| (n, q(4, 1) + q(7, 1) * pow_rational(n, &Rational::from((-3, 2)), B))).collect(),
            p.clone(),
        );
        let e = extrapolate_tail(&s, &p, 10).unwrap();
        assert!(close(&e.intercept, &q(4, 1), 1e-60));
        assert!(close(e.slope(), &q(7, 1), 1e-60));
        assert!(e.residual < 1e-60);
        let c = seq(|_| q(9, 1), 1, 12);
        let e = extrapolate_tail(&c, &Rational::from(1), 5).unwrap();
        assert!(close(&e.intercept, &q(9, 1), 1e-60) && close(e.slope(), &q(0, 1), 1e-60));
        assert!(extrapolate_tail(&c, &Rational::from(1), 1).is_err());
        assert_eq!(default_window(100), 10);
        assert_eq!(default_window(7), 4);
    }
}
