//! Differential approximants: linear ODEs in θ = z·d/dz with polynomial
//! coefficients whose formal solution matches a series prefix.

mod ensemble;

use std::fmt;

use rug::{Float, Integer, Rational};

pub use ensemble::{default_grid, extend_series, reject_defective, EnsembleMember, EnsembleOptions, PredictionEnsemble, Stat};

use crate::error::{Error, Result};
use crate::numeric::{poly_roots, solve_rational_particular, Complex, Poly, Precision, Scalar, Singular};
use crate::series::ExactSeries;

/// Σₖ Qₖ(z)·θᵏF = P(z) with deg Qₖ = Nₖ, deg P = L (L = −1: homogeneous),
/// normalised by Q_M(0) = 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DAConfig {
    pub order: usize,
    pub degrees: Vec<usize>,
    pub inhom: i32,
    pub mode: Arithmetic,
}

impl DAConfig {
    pub fn new(degrees: Vec<usize>, inhom: i32) -> Result<Self> {
        if degrees.len() < 2 {
            return Err(Error::Invalid("an approximant needs order at least 1".into()));
        }
        if inhom < -1 {
            return Err(Error::Invalid(format!("inhomogeneous degree must be >= -1, got {inhom}")));
        }
        Ok(DAConfig { order: degrees.len() - 1, degrees, inhom, mode: Arithmetic::Exact })
    }

    pub fn with_mode(mut self, mode: Arithmetic) -> Self {
        self.mode = mode;
        self
    }

    /// Every degree lowered by one (Q_M kept at degree 1 or more); `None`
    /// when nothing can be lowered.
    pub fn shrunk(&self) -> Option<DAConfig> {
        let m = self.order;
        let degrees: Vec<usize> =
            self.degrees.iter().enumerate().map(|(k, &d)| if k == m { d.saturating_sub(1).max(1) } else { d.saturating_sub(1) }).collect();
        (degrees != self.degrees).then(|| DAConfig { degrees, ..self.clone() })
    }

    /// L + Σ(Nₖ + 1): unknowns, and the number of coefficients consumed.
    pub fn unknowns(&self) -> usize {
        let s: usize = self.degrees.iter().map(|d| d + 1).sum();
        (s as i64 + i64::from(self.inhom)) as usize
    }
}

impl fmt::Display for DAConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.degrees.iter().map(|x| x.to_string()).collect();
        write!(f, "M={} N=[{}] L={}", self.order, d.join(","), self.inhom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffApproximant<T: Scalar> {
    /// Q₀..Q_M.
    pub q: Vec<Poly<T>>,
    pub p: Poly<T>,
    pub config: DAConfig,
    /// Coefficients c₀..c_{N−1} were matched.
    pub consumed: usize,
}

/// A root of Q_M and the local exponent there. With F ~ (1 − z/zᵢ)^{−γ},
/// 1/(1−4z) reports γ = 1 at z = 1/4.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityEstimate {
    pub location: Complex,
    /// None at roots that are not simple.
    pub exponent: Option<Complex>,
    pub defect: Option<String>,
}

fn pow_n<T: Scalar>(like: &T, n: usize, k: usize) -> T {
    like.int_like(&Integer::from(Integer::u_pow_u(n as u32, k as u32)))
}

type Solver<T> = fn(Vec<Vec<T>>, Vec<T>) -> std::result::Result<Vec<T>, Singular>;

fn build<T: Scalar>(c: &[T], config: &DAConfig, solve: Solver<T>) -> Result<DiffApproximant<T>> {
    let n_eq = config.unknowns();
    if n_eq > c.len() {
        return Err(Error::Invalid(format!("{config} needs {n_eq} coefficients, have {}", c.len())));
    }
    let like = &c[0];
    let m = config.order;
    // Unknown layout: q_{k,j} for each k (skipping q_{M,0}), then p_0..p_L.
    let mut cols: Vec<(usize, usize)> = Vec::new();
    for (k, &d) in config.degrees.iter().enumerate() {
        for j in 0..=d {
            if !(k == m && j == 0) {
                cols.push((k, j));
            }
        }
    }
    let n_p = (config.inhom + 1) as usize;
    let mut a = Vec::with_capacity(n_eq);
    let mut b = Vec::with_capacity(n_eq);
    for n in 0..n_eq {
        let mut row: Vec<T> = cols
            .iter()
            .map(|&(k, j)| if j > n { like.zero_like() } else { pow_n(like, n - j, k).mul(&c[n - j]) })
            .collect();
        for i in 0..n_p {
            row.push(if i == n { like.i64_like(-1) } else { like.zero_like() });
        }
        a.push(row);
        b.push(pow_n(like, n, m).mul(&c[n]).neg());
    }
    let x = solve(a, b).map_err(|_| Error::Defective(format!("{config}: singular coefficient-matching system")))?;
    let mut q: Vec<Vec<T>> = config.degrees.iter().map(|&d| vec![like.zero_like(); d + 1]).collect();
    q[m][0] = like.one_like();
    for (v, &(k, j)) in x.iter().zip(&cols) {
        q[k][j] = v.clone();
    }
    let p = Poly::new(x[cols.len()..].to_vec());
    Ok(DiffApproximant { q: q.into_iter().map(Poly::new).collect(), p, config: config.clone(), consumed: n_eq })
}

/// Exact approximant from the exact coefficients of `s` (offset ignored: the
/// first stored coefficient is c₀).
pub fn build_da_exact(s: &ExactSeries, config: &DAConfig) -> Result<DiffApproximant<Rational>> {
    build(s.coeffs(), config, Rational::solve)
}

/// Like [`build_da_exact`], but a singular consistent system yields one of
/// its solutions (free unknowns zero) instead of an error. Useful when the
/// series satisfies a smaller equation than `config` describes.
pub fn build_da_exact_particular(s: &ExactSeries, config: &DAConfig) -> Result<DiffApproximant<Rational>> {
    build(s.coeffs(), config, |a, b| solve_rational_particular(&a, &b))
}

pub fn build_da_float(s: &ExactSeries, config: &DAConfig, bits: u32) -> Result<DiffApproximant<Float>> {
    let c: Vec<Float> = s.coeffs().iter().map(|x| Float::with_val(bits, x)).collect();
    build(&c, config, Float::solve)
}

/// Build in the configured arithmetic; exact solutions are rounded to `bits`
/// afterwards.
pub fn build_da(s: &ExactSeries, config: &DAConfig, bits: u32) -> Result<DiffApproximant<Float>> {
    match config.mode {
        Arithmetic::Float => build_da_float(s, config, bits),
        Arithmetic::Exact => Ok(build_da_exact(s, config)?.to_float(bits)),
    }
}

impl DiffApproximant<Rational> {
    pub fn to_float(&self, bits: u32) -> DiffApproximant<Float> {
        DiffApproximant {
            q: self.q.iter().map(|p| p.to_float(bits)).collect(),
            p: self.p.to_float(bits),
            config: self.config.clone(),
            consumed: self.consumed,
        }
    }
}

impl<T: Scalar> DiffApproximant<T> {
    /// Σₖ q_{k,0}·nᵏ, the factor multiplying cₙ in the recurrence.
    fn leading(&self, n: usize, like: &T) -> T {
        let mut s = like.zero_like();
        for (k, qk) in self.q.iter().enumerate() {
            s = s.add(&qk.coeff(0, like).mul(&pow_n(like, n, k)));
        }
        s
    }

    /// Right-hand side of the recurrence for cₙ given c₀..cₙ₋₁.
    fn rest(&self, n: usize, c: &[T], like: &T) -> T {
        let mut s = self.p.coeff(n, like);
        for (k, qk) in self.q.iter().enumerate() {
            for (j, qkj) in qk.coeffs().iter().enumerate().skip(1) {
                if j > n {
                    break;
                }
                s = s.sub(&qkj.mul(&pow_n(like, n - j, k)).mul(&c[n - j]));
            }
        }
        s
    }

    /// Continue `known` by `count` coefficients. Known values past the
    /// consumed prefix enter the recurrence as they are. Stops early,
    /// returning what it has and the offending index, where the recurrence's
    /// leading factor vanishes.
    pub fn predict_coefficients(&self, known: &[T], count: usize) -> (Vec<T>, Option<usize>) {
        let like = &known[0];
        let mut c: Vec<T> = known.to_vec();
        let mut out = Vec::with_capacity(count);
        for n in known.len()..known.len() + count {
            let d = self.leading(n, like);
            if d.is_zero() {
                return (out, Some(n));
            }
            let v = self.rest(n, &c, like).div(&d);
            c.push(v.clone());
            out.push(v);
        }
        (out, None)
    }

    /// Recompute c₀..c_{N−1} from the recurrence, `None` where its leading
    /// factor vanishes.
    pub fn regenerate(&self, known: &[T]) -> Vec<Option<T>> {
        let like = &known[0];
        (0..self.consumed)
            .map(|n| {
                let d = self.leading(n, like);
                (!d.is_zero()).then(|| self.rest(n, known, like).div(&d))
            })
            .collect()
    }
}

impl<T: Scalar + fmt::Display> DiffApproximant<T> {
    /// Roots of Q_M with indicial exponents at simple roots.
    pub fn singularities(&self, digits: u32) -> Result<Vec<SingularityEstimate>> {
        let m = self.config.order;
        let qm = &self.q[m];
        if qm.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        let roots = poly_roots(qm, digits)?;
        let bits = Precision::digits(digits).bits() + 32;
        let tol = Float::with_val(bits, Float::i_exp(1, -(Precision::digits(digits / 3).bits() as i32)));
        let dqm = qm.derivative();
        let qm1 = &self.q[m - 1];
        let mut out = Vec::with_capacity(roots.len());
        for (i, z) in roots.iter().enumerate() {
            let z = Complex::new(Float::with_val(bits, &z.re), Float::with_val(bits, &z.im));
            let scale = z.abs();
            let multiple = roots.iter().enumerate().any(|(j, w)| {
                j != i && {
                    let w = Complex::new(Float::with_val(bits, &w.re), Float::with_val(bits, &w.im));
                    z.sub(&w).abs() < Float::with_val(bits, &tol * &scale)
                }
            });
            let exponent = if multiple || z.abs().is_zero() {
                None
            } else {
                // λ = M − 1 − Q_{M−1}(z)/(z·Q_M'(z)) with F ~ (1 − z/zᵢ)^λ; γ = −λ.
                let num = qm1.eval_complex(&z);
                let den = z.mul(&dqm.eval_complex(&z));
                let lambda = num.div(&den);
                let mut g = lambda;
                g.re -= (m - 1) as u32;
                Some(g)
            };
            let defect = if multiple {
                Some("multiple root: indicial formula not applied".to_string())
            } else if exponent.is_none() {
                Some("root at the origin".to_string())
            } else {
                None
            };
            out.push(SingularityEstimate { location: z, exponent, defect });
        }
        Ok(out)
    }
}

impl SingularityEstimate {
    pub fn is_positive_real(&self) -> bool {
        self.location.is_real() && self.location.re > 0
    }

    /// The exponent when it is real.
    pub fn gamma(&self) -> Option<&Float> {
        self.exponent.as_ref().filter(|g| g.im.is_zero()).map(|g| &g.re)
    }
}

/// The smallest positive real singularity, the usual physical one for
/// series with positive coefficients.
pub fn physical(sing: &[SingularityEstimate]) -> Option<&SingularityEstimate> {
    sing.iter().filter(|s| s.is_positive_real()).min_by(|a, b| a.location.re.partial_cmp(&b.location.re).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(n: usize) -> ExactSeries {
        ExactSeries::from_integers("geo", 0, (0..n).map(|k| Integer::from(Integer::u_pow_u(4, k as u32))).collect()).unwrap()
    }

    #[test]
    fn geometric_first_order() {
        let cfg = DAConfig::new(vec![1, 1], -1).unwrap();
        assert_eq!(cfg.unknowns(), 3);
        let da = build_da_exact(&geometric(3), &cfg).unwrap();
        // (1−4z)θF − 4zF = 0
        assert_eq!(da.q[1].coeffs(), &[Rational::from(1), Rational::from(-4)]);
        assert_eq!(da.q[0].coeffs(), &[Rational::new(), Rational::from(-4)]);
        let (pred, stop) = da.predict_coefficients(geometric(3).coeffs(), 5);
        assert!(stop.is_none());
        for (i, v) in pred.iter().enumerate() {
            assert_eq!(*v, Rational::from(Integer::u_pow_u(4, 3 + i as u32)));
        }
        let s = da.singularities(40).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].location.re.to_f64() - 0.25).abs() < 1e-30);
        let g = s[0].exponent.as_ref().unwrap();
        assert!((g.re.to_f64() - 1.0).abs() < 1e-30 && g.im.is_zero());
    }

    #[test]
    fn polynomial_inhomogeneous() {
        let s = ExactSeries::from_u64("p", &[3, 1, 4]).unwrap();
        let da = build_da_exact(&s, &DAConfig::new(vec![0, 0], 1).unwrap()).unwrap();
        let (pred, _) = da.predict_coefficients(s.coeffs(), 4);
        assert!(pred.iter().all(|v| *v == 0));
        let regen = da.regenerate(s.coeffs());
        // n = 2 is resonant (Q₀(0) + 2 = 0); every other index regenerates.
        assert!(regen[2].is_none());
        assert!(regen.iter().zip(s.coeffs()).all(|(r, c)| r.as_ref().is_none_or(|r| r == c)));
        // Zero padding leaves the system underdetermined.
        let padded = ExactSeries::from_u64("p", &[3, 1, 4, 0]).unwrap();
        assert!(matches!(build_da_exact(&padded, &DAConfig::new(vec![0, 0], 2).unwrap()), Err(Error::Defective(_))));
    }

    #[test]
    fn exponential_continuation() {
        let mut f = Integer::from(1);
        let mut c = Vec::new();
        for k in 0..8u32 {
            if k > 0 {
                f *= k;
            }
            c.push(Rational::from((1, f.clone())));
        }
        let s = ExactSeries::new("exp", 0, c).unwrap();
        // θF − zF = 0
        let da = build_da_exact(&s, &DAConfig::new(vec![1, 0], -1).unwrap()).unwrap();
        let (pred, _) = da.predict_coefficients(s.coeffs(), 5);
        let mut f = Integer::from(5040);
        for (i, v) in pred.iter().enumerate() {
            f *= 8 + i as u32 - 1 + 1;
            assert_eq!(*v, Rational::from((1, f.clone())));
        }
    }

    #[test]
    fn too_few_terms() {
        let cfg = DAConfig::new(vec![3, 3, 3], 0).unwrap();
        assert!(build_da_exact(&geometric(5), &cfg).is_err());
        assert!(DAConfig::new(vec![1], -1).is_err());
    }
}
