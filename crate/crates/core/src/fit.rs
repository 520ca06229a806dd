//! Sliding-window linear fits of coefficients or ratios to asymptotic forms.
//!
//! Every window solves a square system exactly (rationals when the data and
//! basis are rational, otherwise high-precision floats). Traces are indexed by
//! the last index in each window.

use rayon::prelude::*;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::numeric::{fmt_float, ln, pow_rational, Scalar};
use crate::ratio::EstimatorSeq;
use crate::series::ExactSeries;

/// Per-window parameter estimates.
#[derive(Clone, Debug)]
pub struct FitTrace {
    pub params: Vec<String>,
    pub rows: Vec<(u64, Vec<Float>)>,
    /// Window end indices whose system was singular or whose data was unusable.
    pub skipped: Vec<u64>,
    /// For ratio fits: rₙ ≈ Σ cᵢ·n^{-eᵢ} with these eᵢ.
    pub ratio_exponents: Option<Vec<Rational>>,
    pub note: Option<String>,
}

impl FitTrace {
    pub fn column(&self, i: usize) -> EstimatorSeq {
        let values = self.rows.iter().map(|(n, p)| (*n, p[i].clone())).collect();
        EstimatorSeq::new(self.params[i].clone(), values, Rational::from(1))
    }

    pub fn last(&self) -> Option<&(u64, Vec<Float>)> {
        self.rows.last()
    }

    pub fn row(&self, end: u64) -> Option<&[Float]> {
        self.rows.iter().find(|(n, _)| *n == end).map(|(_, p)| p.as_slice())
    }

    /// Evaluate a ratio-fit row as a function of n.
    pub fn evaluate_ratio(&self, params: &[Float], n: u64) -> Result<Float> {
        let ex = self.ratio_exponents.as_ref().ok_or_else(|| Error::Invalid("not a ratio fit".into()))?;
        let bits = params[0].prec();
        let mut s = Float::new(bits);
        for (c, e) in params.iter().zip(ex) {
            s += Float::with_val(bits, c * pow_rational(n, &Rational::from(-e), bits));
        }
        Ok(s)
    }

    /// `window_end_n,param1,...`, values to working precision less three guard digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("window_end_n");
        for i in 0..self.params.len() {
            out.push_str(&format!(",param{}", i + 1));
        }
        out.push('\n');
        for (n, p) in &self.rows {
            out.push_str(&n.to_string());
            for v in p {
                let d = ((v.prec() as f64) / std::f64::consts::LOG2_10) as usize;
                out.push(',');
                out.push_str(&fmt_float(v, d.saturating_sub(3).max(1)));
            }
            out.push('\n');
        }
        out
    }
}

type Basis<'a> = dyn Fn(u64) -> Vec<Float> + Sync + 'a;

/// Slide a width-`w` window over consecutive points, solving basis·c = y.
fn slide(points: &[(u64, Float)], w: usize, basis: &Basis) -> (Vec<(u64, Vec<Float>)>, Vec<u64>) {
    if points.len() < w {
        return (Vec::new(), Vec::new());
    }
    let results: Vec<(u64, Option<Vec<Float>>)> = points
        .par_windows(w)
        .map(|win| {
            let end = win[w - 1].0;
            if win.windows(2).any(|p| p[1].0 != p[0].0 + 1) {
                return (end, None);
            }
            let a: Vec<Vec<Float>> = win.iter().map(|(k, _)| basis(*k)).collect();
            let b: Vec<Float> = win.iter().map(|(_, y)| y.clone()).collect();
            (end, Float::solve(a, b).ok())
        })
        .collect();
    split(results)
}

fn split<T>(results: Vec<(u64, Option<T>)>) -> (Vec<(u64, T)>, Vec<u64>) {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (n, r) in results {
        match r {
            Some(p) => rows.push((n, p)),
            None => skipped.push(n),
        }
    }
    (rows, skipped)
}

fn trace(params: &[&str], (rows, skipped): (Vec<(u64, Vec<Float>)>, Vec<u64>)) -> FitTrace {
    FitTrace { params: params.iter().map(|s| s.to_string()).collect(), rows, skipped, ratio_exponents: None, note: None }
}

fn sigma_f(sigma: &Rational, bits: u32) -> Float {
    Float::with_val(bits, sigma)
}

fn check_sigma(sigma: &Rational) -> Result<()> {
    if *sigma <= 0 || *sigma >= 1 {
        return Err(Error::Invalid(format!("stretch exponent must lie in (0,1), got {sigma}")));
    }
    Ok(())
}

/// (k, log bₖ) for k ≥ 1 with bₖ > 0; other indices are dropped.
fn log_points(s: &ExactSeries, bits: u32) -> Vec<(u64, Float)> {
    s.values(bits).values.into_iter().filter(|(k, v)| *k >= 1 && *v > 0).map(|(k, v)| (k, ln(&v))).collect()
}

fn kf(k: u64, bits: u32) -> Float {
    Float::with_val(bits, k)
}

fn need(have: usize, want: usize) -> Result<()> {
    if have < want {
        return Err(Error::Invalid(format!("fit needs at least {want} usable points, have {have}")));
    }
    Ok(())
}

/// log bₖ = c₁k + c₂k^σ + c₃log k + c₄ → (log μ, log μ₁, g, log C).
pub fn fit_log_coeffs_4pt(s: &ExactSeries, sigma: &Rational, bits: u32) -> Result<FitTrace> {
    check_sigma(sigma)?;
    let pts = log_points(s, bits);
    need(pts.len(), 4)?;
    let sg = sigma_f(sigma, bits);
    let basis = move |k: u64| {
        let x = kf(k, bits);
        vec![x.clone(), Float::with_val(bits, rug::ops::Pow::pow(&x, &sg)), ln(&x), Float::with_val(bits, 1)]
    };
    Ok(trace(&["log_mu", "log_mu1", "g", "log_C"], slide(&pts, 4, &basis)))
}

/// log bₖ − k·log μ = c₁k^σ + c₂log k + c₃ → (log μ₁, g, log C).
pub fn fit_log_coeffs_3pt(s: &ExactSeries, mu: &Float, sigma: &Rational, bits: u32) -> Result<FitTrace> {
    check_sigma(sigma)?;
    let lmu = ln(&Float::with_val(bits, mu));
    let pts: Vec<(u64, Float)> =
        log_points(s, bits).into_iter().map(|(k, y)| (k, y - Float::with_val(bits, &lmu * k))).collect();
    need(pts.len(), 3)?;
    let sg = sigma_f(sigma, bits);
    let basis = move |k: u64| {
        let x = kf(k, bits);
        vec![Float::with_val(bits, rug::ops::Pow::pow(&x, &sg)), ln(&x), Float::with_val(bits, 1)]
    };
    Ok(trace(&["log_mu1", "g", "log_C"], slide(&pts, 3, &basis)))
}

fn ratio_basis(exps: Vec<Rational>, bits: u32) -> impl Fn(u64) -> Vec<Float> + Sync {
    move |n: u64| exps.iter().map(|e| pow_rational(n, &Rational::from(-e), bits)).collect()
}

fn usable(r: &EstimatorSeq) -> Vec<(u64, Float)> {
    r.values.iter().filter(|(n, _)| *n >= 1).cloned().collect()
}

/// rₙ = c₁ + c₂n^{-(1-σ)} + c₃/n + c₄n^{-(2-2σ)}. At σ = 1/2 the last two
/// coincide and the basis becomes {1, n^{-1/2}, n^{-1}, n^{-3/2}}.
pub fn fit_ratios_4pt(r: &EstimatorSeq, sigma: &Rational) -> Result<FitTrace> {
    check_sigma(sigma)?;
    let bits = r.bits();
    let pts = usable(r);
    need(pts.len(), 4)?;
    let one_m: Rational = 1 - sigma.clone();
    let half = *sigma == (1, 2);
    let exps = if half {
        vec![Rational::from(0), Rational::from((1, 2)), Rational::from(1), Rational::from((3, 2))]
    } else {
        vec![Rational::from(0), one_m.clone(), Rational::from(1), 2 * one_m]
    };
    let mut t = if half {
        let mut t = trace(&["mu", "mu_sigma_log_mu1", "mu_g_shifted", "mu_c_3_2"], slide(&pts, 4, &ratio_basis(exps.clone(), bits)));
        t.note = Some(
            "sigma = 1/2: basis {1, n^-1/2, n^-1, n^-3/2}; third coefficient is mu*(g + log^2(mu1)/8), fourth is mu*(log^3(mu1) + (6+24g)log(mu1))/48".into(),
        );
        t
    } else {
        trace(&["mu", "mu_sigma_log_mu1", "mu_g", "mu_sigma2_log2_mu1_over_2"], slide(&pts, 4, &ratio_basis(exps.clone(), bits)))
    };
    t.ratio_exponents = Some(exps);
    Ok(t)
}

/// g from the third coefficient of a σ = 1/2 ratio fit.
pub fn g_from_half_fit(mu: &Float, shifted: &Float, log_mu1: &Float) -> Float {
    let bits = mu.prec();
    let sq = Float::with_val(bits, log_mu1.square_ref()) / 8u32;
    Float::with_val(bits, shifted / mu) - sq
}

/// rₙ = μ(1 + g/n + h/n² + j/n³) → (μ, μg, μh, μj).
pub fn fit_ratios_powerlaw(r: &EstimatorSeq) -> Result<FitTrace> {
    let bits = r.bits();
    let pts = usable(r);
    need(pts.len(), 4)?;
    let exps: Vec<Rational> = (0..4).map(Rational::from).collect();
    let mut t = trace(&["mu", "mu_g", "mu_h", "mu_j"], slide(&pts, 4, &ratio_basis(exps.clone(), bits)));
    t.ratio_exponents = Some(exps);
    Ok(t)
}

/// [`fit_ratios_powerlaw`] over exact ratios of an exact series, solved in
/// rationals and rounded to `bits` only at the end.
pub fn fit_ratios_powerlaw_exact(s: &ExactSeries, bits: u32) -> Result<FitTrace> {
    let c = s.coeffs();
    let mut pts = Vec::new();
    for i in 1..c.len() {
        let n = s.offset + i as u64;
        if n >= 1 && c[i - 1].cmp0() != std::cmp::Ordering::Equal {
            pts.push((n, Rational::from(&c[i] / &c[i - 1])));
        }
    }
    need(pts.len(), 4)?;
    let results: Vec<(u64, Option<Vec<Float>>)> = pts
        .par_windows(4)
        .map(|win| {
            let end = win[3].0;
            if win.windows(2).any(|p| p[1].0 != p[0].0 + 1) {
                return (end, None);
            }
            let a: Vec<Vec<Rational>> = win
                .iter()
                .map(|(n, _)| (0..4u32).map(|e| Rational::from((1, rug::ops::Pow::pow(rug::Integer::from(*n), e)))).collect())
                .collect();
            let b: Vec<Rational> = win.iter().map(|(_, y)| y.clone()).collect();
            let sol = Rational::solve(a, b).ok().map(|x| x.iter().map(|q| Float::with_val(bits, q)).collect());
            (end, sol)
        })
        .collect();
    let mut t = trace(&["mu", "mu_g", "mu_h", "mu_j"], split(results));
    t.ratio_exponents = Some((0..4).map(Rational::from).collect());
    Ok(t)
}

/// rₙ − μ = c₁n^{-(1-σ)} + c₂/n + c₃n^{-(2-2σ)} with μ and σ given; at
/// σ = 1/2 the basis is {n^{-1/2}, n^{-1}, n^{-3/2}}.
pub fn fit_ratios_3param(r: &EstimatorSeq, mu: &Float, sigma: &Rational) -> Result<FitTrace> {
    check_sigma(sigma)?;
    let bits = r.bits();
    let pts: Vec<(u64, Float)> = usable(r).into_iter().map(|(n, v)| (n, v - mu)).collect();
    need(pts.len(), 3)?;
    let one_m: Rational = 1 - sigma.clone();
    let half = *sigma == (1, 2);
    let exps = if half {
        vec![Rational::from((1, 2)), Rational::from(1), Rational::from((3, 2))]
    } else {
        vec![one_m.clone(), Rational::from(1), 2 * one_m]
    };
    let mut t = trace(&["mu_sigma_log_mu1", "mu_g", "mu_sigma2_log2_mu1_over_2"], slide(&pts, 3, &ratio_basis(exps, bits)));
    if half {
        t.params[1] = "mu_g_shifted".into();
        t.params[2] = "mu_c_3_2".into();
        t.note = Some("sigma = 1/2: basis {n^-1/2, n^-1, n^-3/2}; second coefficient is mu*(g + log^2(mu1)/8)".into());
    }
    Ok(t)
}

/// log bₖ − g·log k = c₁k + c₂ + c₃/k → (log μ, log C, c₃).
pub fn fit_amplitude(s: &ExactSeries, g: &Float, bits: u32) -> Result<FitTrace> {
    let pts: Vec<(u64, Float)> = log_points(s, bits)
        .into_iter()
        .map(|(k, y)| {
            let t = Float::with_val(bits, g * ln(&kf(k, bits)));
            (k, y - t)
        })
        .collect();
    need(pts.len(), 3)?;
    let basis = move |k: u64| vec![kf(k, bits), Float::with_val(bits, 1), Float::with_val(bits, 1) / kf(k, bits)];
    Ok(trace(&["log_mu", "log_C", "c3"], slide(&pts, 3, &basis)))
}

/// Cₙ = bₙ·n^{-g}/μⁿ.
pub fn amplitude_estimates(s: &ExactSeries, mu: &Float, g: &Float, bits: u32) -> EstimatorSeq {
    let lmu = ln(&Float::with_val(bits, mu));
    let b = s.values(bits);
    let mut out = b.pointwise("amplitude", Rational::from(1), |k, v| {
        if k == 0 || *v <= 0 {
            return None;
        }
        let e = Float::with_val(bits, g * ln(&kf(k, bits))) + Float::with_val(bits, &lmu * k);
        Some(Float::with_val(bits, v * (-e).exp()))
    });
    out.label = "amplitude".into();
    out
}

/// cₙ ~ C·μⁿ·μ₁^{n^σ}·n^g, power law when μ₁ is absent.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticModel {
    pub mu: Float,
    pub mu1: Option<Float>,
    pub sigma: Option<Rational>,
    pub g: Float,
    pub amplitude: Option<Float>,
    pub uncertainty: ModelUncertainty,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelUncertainty {
    pub mu: Option<Float>,
    pub mu1: Option<Float>,
    pub g: Option<Float>,
    pub amplitude: Option<Float>,
}

impl AsymptoticModel {
    pub fn power_law(mu: Float, g: Float, amplitude: Option<Float>) -> Result<Self> {
        Self::new(mu, None, None, g, amplitude)
    }

    pub fn new(mu: Float, mu1: Option<Float>, sigma: Option<Rational>, g: Float, amplitude: Option<Float>) -> Result<Self> {
        if mu <= 0 {
            return Err(Error::Invalid("growth rate must be positive".into()));
        }
        match (&mu1, &sigma) {
            (None, None) => {}
            (Some(m1), Some(s)) => {
                if *m1 <= 0 {
                    return Err(Error::Invalid("mu1 must be positive".into()));
                }
                check_sigma(s)?;
            }
            _ => return Err(Error::Invalid("mu1 and sigma go together".into())),
        }
        Ok(AsymptoticModel { mu, mu1, sigma, g, amplitude, uncertainty: ModelUncertainty::default() })
    }

    pub fn is_power_law(&self) -> bool {
        self.mu1.is_none()
    }

    pub fn critical_point(&self) -> Float {
        Float::with_val(self.mu.prec(), 1) / &self.mu
    }

    /// log(cₙ/C).
    fn log_shape(&self, n: u64) -> Float {
        let bits = self.mu.prec();
        let x = kf(n, bits);
        let mut s = Float::with_val(bits, ln(&self.mu) * n) + Float::with_val(bits, &self.g * ln(&x));
        if let (Some(m1), Some(sg)) = (&self.mu1, &self.sigma) {
            s += Float::with_val(bits, ln(m1) * pow_rational(n, sg, bits));
        }
        s
    }

    /// The model's cₙ/cₙ₋₁ (amplitude cancels).
    pub fn ratio(&self, n: u64) -> Float {
        (self.log_shape(n) - self.log_shape(n - 1)).exp()
    }

    pub fn coefficient(&self, n: u64) -> Option<Float> {
        self.amplitude.as_ref().map(|c| Float::with_val(c.prec(), c * self.log_shape(n).exp()))
    }
}
