//! Stieltjes continued fractions, Hankel minors and lower bounds on the
//! growth rate.

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numeric::leading_minors;
use crate::ratio::{extrapolate_tail, EstimatorSeq};
use crate::series::{ratios, ExactSeries};

/// A(x) = α₀/(1 − α₁x/(1 − α₂x/(1 − …))).
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    pub alphas: Vec<Rational>,
    pub source: String,
}

impl ContinuedFraction {
    pub fn depth(&self) -> usize {
        self.alphas.len() - 1
    }

    /// Index of the first negative αᵢ, if any.
    pub fn first_negative(&self) -> Option<usize> {
        self.alphas.iter().position(|a| a.cmp0() == std::cmp::Ordering::Less)
    }

    /// Power-series coefficients 0..=order of the truncated fraction.
    pub fn reexpand(&self, order: usize) -> Vec<Rational> {
        let m = order + 1;
        let mut t = one(m);
        for a in self.alphas[1..].iter().rev() {
            // T ← 1/(1 − a·x·T)
            let mut d = vec![Rational::new(); m];
            d[0] = Rational::from(1);
            for i in 1..m {
                d[i] = -Rational::from(a * &t[i - 1]);
            }
            t = invert(&d);
        }
        t.iter().map(|c| Rational::from(c * &self.alphas[0])).collect()
    }

    pub fn alpha_strings(&self) -> Vec<String> {
        self.alphas.iter().map(|a| a.to_string()).collect()
    }
}

fn one(m: usize) -> Vec<Rational> {
    let mut v = vec![Rational::new(); m];
    v[0] = Rational::from(1);
    v
}

// Inverse of a power series with constant term 1.
fn invert(d: &[Rational]) -> Vec<Rational> {
    let m = d.len();
    let mut out: Vec<Rational> = Vec::with_capacity(m);
    out.push(Rational::from(1));
    for i in 1..m {
        let mut s = Rational::new();
        for j in 1..=i {
            s -= Rational::from(&d[j] * &out[i - j]);
        }
        out.push(s);
    }
    out
}

/// S-fraction coefficients α₀..α_depth by the quotient-difference algorithm
/// in exact arithmetic. αⱼ uses coefficients a₀..aⱼ.
pub fn sfraction(s: &ExactSeries, depth: usize) -> Result<ContinuedFraction> {
    let a = s.coeffs();
    if a[0].cmp0() == std::cmp::Ordering::Equal {
        return Err(Error::ZeroCoefficient(s.offset));
    }
    if depth + 1 > a.len() {
        return Err(Error::Invalid(format!("depth {depth} needs {} coefficients, have {}", depth + 1, a.len())));
    }
    let mut alphas = vec![a[0].clone()];
    if depth == 0 {
        return Ok(ContinuedFraction { alphas, source: s.name.clone() });
    }
    // q₁⁽ⁿ⁾ = aₙ₊₁/aₙ for n = 0..depth−1
    let mut q = Vec::with_capacity(depth);
    for n in 0..depth {
        if a[n].cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::QdBreakdown(1));
        }
        q.push(Rational::from(&a[n + 1] / &a[n]));
    }
    let mut e_prev: Vec<Rational> = vec![Rational::new(); depth];
    let mut k = 1;
    loop {
        alphas.push(q[0].clone());
        if alphas.len() > depth {
            break;
        }
        // eₖ⁽ⁿ⁾ = qₖ⁽ⁿ⁺¹⁾ − qₖ⁽ⁿ⁾ + eₖ₋₁⁽ⁿ⁺¹⁾
        let e: Vec<Rational> = (0..q.len() - 1)
            .map(|n| Rational::from(&q[n + 1] - &q[n]) + &e_prev[n + 1])
            .collect();
        alphas.push(e[0].clone());
        if alphas.len() > depth {
            break;
        }
        // qₖ₊₁⁽ⁿ⁾ = qₖ⁽ⁿ⁺¹⁾·eₖ⁽ⁿ⁺¹⁾/eₖ⁽ⁿ⁾
        let mut nq = Vec::with_capacity(e.len() - 1);
        for n in 0..e.len() - 1 {
            if e[n].cmp0() == std::cmp::Ordering::Equal {
                return Err(Error::QdBreakdown(2 * k + 1));
            }
            nq.push(Rational::from(&q[n + 1] * &e[n + 1]) / &e[n]);
        }
        q = nq;
        e_prev = e;
        k += 1;
    }
    Ok(ContinuedFraction { alphas, source: s.name.clone() })
}

/// S-fraction to the full depth the series allows.
pub fn sfraction_full(s: &ExactSeries) -> Result<ContinuedFraction> {
    sfraction(s, s.len() - 1)
}

/// Leading principal minors of H₀ = [a_{i+j}] and H₁ = [a_{i+j+1}].
#[derive(Clone, Debug, PartialEq)]
pub struct HankelReport {
    pub h0: Vec<Rational>,
    pub h1: Vec<Rational>,
    /// First non-positive minor as (shift, size).
    pub first_nonpositive: Option<(u8, usize)>,
}

impl HankelReport {
    pub fn all_positive(&self) -> bool {
        self.first_nonpositive.is_none()
    }
}

fn hankel_minors(a: &[Rational], shift: usize, size: usize) -> Vec<Rational> {
    if size == 0 {
        return Vec::new();
    }
    let mut den = Integer::from(1);
    for c in &a[shift..shift + 2 * size - 1] {
        den.lcm_mut(c.denom());
    }
    let m: Vec<Vec<Integer>> = (0..size)
        .map(|i| (0..size).map(|j| (a[shift + i + j].numer() * Integer::from(&den / a[shift + i + j].denom()))).collect())
        .collect();
    leading_minors(&m)
        .into_iter()
        .enumerate()
        .map(|(k, d)| Rational::from((d, Integer::from(rug::ops::Pow::pow(&den, k as u32 + 1)))))
        .collect()
}

pub fn hankel_check(s: &ExactSeries) -> HankelReport {
    let a = s.coeffs();
    let n = a.len();
    let h0 = hankel_minors(a, 0, n.div_ceil(2));
    let h1 = hankel_minors(a, 1, n / 2);
    let bad = |v: &[Rational]| v.iter().position(|d| d.cmp0() != std::cmp::Ordering::Greater);
    let first_nonpositive = match (bad(&h0), bad(&h1)) {
        (Some(i), Some(j)) if j < i => Some((1, j + 1)),
        (Some(i), _) => Some((0, i + 1)),
        (None, Some(j)) => Some((1, j + 1)),
        (None, None) => None,
    };
    HankelReport { h0, h1, first_nonpositive }
}

/// Largest ratio aₙ/aₙ₋₁ over the exact range, with the n attaining it.
pub fn logconvex_bound(s: &ExactSeries, bits: u32) -> Result<(u64, Float)> {
    if s.coeffs().iter().any(|c| c.cmp0() != std::cmp::Ordering::Greater) {
        return Err(Error::Invalid("log-convexity bound needs positive coefficients".into()));
    }
    let r = ratios(&s.exact_only(), bits)?;
    let mut best = r.values[0].clone();
    for (n, v) in &r.values[1..] {
        if *v > best.1 {
            best = (*n, v.clone());
        }
    }
    Ok(best)
}

/// β = 2θ/(2−θ).
pub fn bound_beta(theta: &Rational) -> Result<Rational> {
    if *theta <= 0 || *theta > 1 {
        return Err(Error::Invalid(format!("theta must lie in (0,1], got {theta}")));
    }
    Ok((2 * theta.clone()) / (2 - theta.clone()))
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    /// (n, aₙ/aₙ₋₁) at the largest exact ratio.
    pub logconvex_bound: Option<(u64, Float)>,
    /// bₙ = (√αₙ + √αₙ₋₁)² for n ≥ 2.
    pub hhr_bounds: Vec<(u64, Float)>,
    /// max bₙ.
    pub bound: Float,
    /// Indices i where αᵢ < αᵢ₋₂ (even and odd subsequences not non-decreasing).
    pub monotonicity_violations: Vec<usize>,
    /// Indices n where bₙ < bₙ₋₁.
    pub decreasing_at: Vec<u64>,
    /// False only when the series is known to be a Stieltjes moment sequence.
    pub conjectural: bool,
    /// Extrapolated bound and abscissa exponent β.
    pub extrapolated: Option<(Float, Rational)>,
}

impl BoundReport {
    pub fn status(&self) -> &'static str {
        if self.conjectural {
            "conjectural"
        } else {
            "proven"
        }
    }

    pub fn hhr_seq(&self) -> EstimatorSeq {
        EstimatorSeq::new("hhr_bound", self.hhr_bounds.clone(), Rational::from(2))
    }

    /// Linear extrapolation of the last `window` bₙ against n^{-β}.
    pub fn extrapolate(&mut self, theta: &Rational, window: usize) -> Result<()> {
        let beta = bound_beta(theta)?;
        let e = extrapolate_tail(&self.hhr_seq(), &beta, window)?;
        self.extrapolated = Some((e.intercept, beta));
        Ok(())
    }
}

pub fn hhr_bounds(cf: &ContinuedFraction, bits: u32) -> Result<BoundReport> {
    if let Some(i) = cf.first_negative() {
        return Err(Error::NegativeAlpha(i));
    }
    if cf.alphas.len() < 3 {
        return Err(Error::Invalid("bounds need continued-fraction depth at least 2".into()));
    }
    // αₙ + αₙ₋₁ + 2√(αₙαₙ₋₁): one rounding in the square root.
    let hhr: Vec<(u64, Float)> = (2..cf.alphas.len())
        .map(|n| {
            let (a, b) = (&cf.alphas[n], &cf.alphas[n - 1]);
            let root = Float::with_val(bits, &Rational::from(a * b)).sqrt() * 2u32;
            (n as u64, root + Float::with_val(bits, &Rational::from(a + b)))
        })
        .collect();
    let monotonicity_violations = (3..cf.alphas.len()).filter(|&i| cf.alphas[i] < cf.alphas[i - 2]).collect();
    let decreasing_at = hhr.windows(2).filter(|w| w[1].1 < w[0].1).map(|w| w[1].0).collect();
    let bound = hhr.iter().map(|(_, b)| b).max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap().clone();
    Ok(BoundReport {
        logconvex_bound: None,
        hhr_bounds: hhr,
        bound,
        monotonicity_violations,
        decreasing_at,
        conjectural: true,
        extrapolated: None,
    })
}

/// Log-convexity and continued-fraction bounds from every exact coefficient.
pub fn bound_report(s: &ExactSeries, stieltjes_proven: bool, bits: u32) -> Result<BoundReport> {
    let cf = sfraction_full(&s.exact_only())?;
    let mut rep = hhr_bounds(&cf, bits)?;
    rep.logconvex_bound = Some(logconvex_bound(s, bits)?);
    rep.conjectural = !stieltjes_proven;
    Ok(rep)
}
