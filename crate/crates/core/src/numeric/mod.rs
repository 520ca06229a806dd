//! Exact and high-precision arithmetic kernels.
//!
//! Integers and rationals come from GMP through `rug`; floats are MPFR values
//! whose precision is always carried explicitly by a [`Precision`].

pub mod complex;
pub mod linalg;
pub mod lsq;
pub mod poly;
pub mod roots;

use std::fmt::Debug;

pub use rug::{Float, Integer, Rational};

pub use complex::Complex;
pub use linalg::{det_integer, leading_minors, solve_linear, solve_rational_particular, Singular};
pub use lsq::{fit_least_squares, LsqFit};
pub use poly::Poly;
pub use roots::poly_roots;

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 100;

/// Working precision, stored in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub fn digits(digits: u32) -> Self {
        Precision { digits: digits.max(1) }
    }

    pub fn decimal_digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa bits needed to hold `digits` decimal digits.
    pub fn bits(&self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }

    /// `10^(-digits)`, the relative resolution of this precision.
    pub fn epsilon(&self) -> Float {
        let ten = self.float(10);
        let e = self.float(-i64::from(self.digits));
        pow(&ten, &e)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::digits(DEFAULT_DIGITS)
    }
}

/// `a^b` for positive `a` at the precision of `a`.
pub fn pow(a: &Float, b: &Float) -> Float {
    use rug::ops::Pow;
    Float::with_val(a.prec(), a.pow(b))
}

/// `n^p` with a rational exponent, evaluated at `bits` of precision.
pub fn pow_rational(n: u64, p: &Rational, bits: u32) -> Float {
    let base = Float::with_val(bits, n);
    let e = Float::with_val(bits, p);
    pow(&base, &e)
}

pub fn ln(x: &Float) -> Float {
    Float::with_val(x.prec(), x.ln_ref())
}

pub fn abs(x: &Float) -> Float {
    Float::with_val(x.prec(), x.abs_ref())
}

/// Decimal rendering with `sig` significant digits.
pub fn fmt_float(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let s = x.to_string_radix(10, Some(sig));
    tidy_exponent(&s)
}

// MPFR writes 1.5e1; turn modest exponents into plain decimals.
fn tidy_exponent(s: &str) -> String {
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    if !(-30..=40).contains(&exp) {
        return s.to_string();
    }
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: String = format!("{ip}{fp}");
    let point = ip.len() as i64 + exp;
    let mut out = String::new();
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    if neg {
        out.insert(0, '-');
    }
    out
}

/// Field elements the generic elimination and polynomial code runs over.
///
/// Constructors take `self` as a template so floats inherit its precision.
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn int_like(&self, v: &Integer) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn to_float(&self, bits: u32) -> Float;
    fn one_like(&self) -> Self {
        self.int_like(&Integer::from(1))
    }
    fn i64_like(&self, v: i64) -> Self {
        self.int_like(&Integer::from(v))
    }
    /// Solve `a·x = b`; exact for rationals, pivoted elimination for floats.
    fn solve(a: Vec<Vec<Self>>, b: Vec<Self>) -> Result<Vec<Self>, Singular>;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn int_like(&self, v: &Integer) -> Self {
        Rational::from(v)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn to_float(&self, bits: u32) -> Float {
        Float::with_val(bits, self)
    }
    fn solve(a: Vec<Vec<Self>>, b: Vec<Self>) -> Result<Vec<Self>, Singular> {
        linalg::solve_rational(&a, &b)
    }
}

impl Scalar for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn int_like(&self, v: &Integer) -> Self {
        Float::with_val(self.prec(), v)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self / o)
    }
    fn neg(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn to_float(&self, bits: u32) -> Float {
        Float::with_val(bits, self)
    }
    fn solve(a: Vec<Vec<Self>>, b: Vec<Self>) -> Result<Vec<Self>, Singular> {
        linalg::solve_float(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_bits() {
        assert_eq!(Precision::digits(100).bits(), 333);
        assert_eq!(Precision::digits(15).bits(), 50);
    }

    #[test]
    fn formatting() {
        let p = Precision::digits(30);
        assert_eq!(fmt_float(&p.float(12.5), 10), "12.5");
        let x = Float::with_val(p.bits(), Rational::from((1, 8)));
        assert_eq!(fmt_float(&x, 5), "0.125");
        assert_eq!(fmt_float(&p.float(-3), 5), "-3");
    }

    #[test]
    fn rational_power() {
        let x = pow_rational(9, &Rational::from((1, 2)), 200);
        assert_eq!(x, 3);
    }
}
