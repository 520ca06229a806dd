//! Dense univariate polynomials, ascending coefficient order.

use std::fmt;

use rug::Float;

use super::{Complex, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    /// Build from ascending coefficients; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^i` (zero beyond the degree), shaped like `like`.
    pub fn coeff(&self, i: usize, like: &T) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(|| like.zero_like())
    }

    pub fn eval(&self, z: &T) -> T {
        let mut acc = z.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly<T> {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&c.i64_like(i as i64)))
                .collect(),
        )
    }

    pub fn mul(&self, o: &Poly<T>) -> Poly<T> {
        if self.is_zero() || o.is_zero() {
            return Poly::new(Vec::new());
        }
        let z = self.coeffs[0].zero_like();
        let mut out = vec![z; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn to_float(&self, bits: u32) -> Poly<Float> {
        Poly::new(self.coeffs.iter().map(|c| c.to_float(bits)).collect())
    }

    /// Evaluate at a complex point after rounding coefficients to `z`'s precision.
    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let bits = z.prec();
        let mut acc = Complex::zero(bits);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z);
            acc.re += c.to_float(bits);
        }
        acc
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*z"),
                _ => format!("({c})*z^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}
