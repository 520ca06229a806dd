//! Simultaneous polynomial root finding (Aberth–Ehrlich, Durand–Kerner retry).

use rug::Float;

use super::{Complex, Poly, Scalar};
use crate::error::Error;

const MAX_ITER: usize = 4000;

/// All complex roots of `p` to `digits` decimal digits, ordered by (|z|, arg).
pub fn poly_roots<T: Scalar + std::fmt::Display>(p: &Poly<T>, digits: u32) -> Result<Vec<Complex>, Error> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Err(Error::Invalid(format!("poly_roots needs degree >= 1, got {p}")));
    }
    let target = super::Precision::digits(digits).bits();
    let bits = target + 64;
    let fp = p.to_float(bits);

    // Exact zero roots come off first.
    let zeros = fp.coeffs().iter().take_while(|c| c.is_zero()).count();
    let reduced = Poly::new(fp.coeffs()[zeros..].to_vec());

    let mut roots: Vec<Complex> = (0..zeros).map(|_| Complex::zero(bits)).collect();
    if reduced.degree().unwrap_or(0) > 0 {
        let found = aberth(&reduced, bits, target, 0.4)
            .or_else(|| aberth(&reduced, bits, target, 1.3))
            .or_else(|| durand_kerner(&reduced, bits, target))
            .ok_or_else(|| Error::NoConvergence(format!("{p}")))?;
        roots.extend(found);
    }

    let tol_exp = -(target as i32) + 16;
    for r in roots.iter_mut() {
        // Snap numerically-real roots onto the real axis.
        let scale = r.abs();
        if !scale.is_zero() {
            let rel = Float::with_val(bits, r.im.abs_ref()) / &scale;
            if rel < Float::with_val(bits, Float::i_exp(1, tol_exp)) {
                r.im = Float::new(bits);
            }
        }
        r.re.set_prec(target);
        r.im.set_prec(target);
    }
    roots.sort_by(|a, b| {
        a.abs()
            .partial_cmp(&b.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.arg().partial_cmp(&b.arg()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(roots)
}

fn initial_guesses(p: &Poly<Float>, bits: u32, rotation: f64) -> Vec<Complex> {
    let n = p.degree().unwrap();
    let c = p.coeffs();
    // Geometric mean of root moduli as the starting circle.
    let ratio = Float::with_val(bits, &c[0] / &c[n]).abs();
    let r = if ratio.is_zero() {
        Float::with_val(bits, 1)
    } else {
        let e = Float::with_val(bits, 1) / Float::with_val(bits, n as u32);
        super::pow(&ratio, &e)
    };
    let two_pi = Float::with_val(bits, rug::float::Constant::Pi) * 2u32;
    (0..n)
        .map(|k| {
            let theta = Float::with_val(bits, &two_pi * (k as u32)) / (n as u32) + rotation;
            Complex::polar(&r, &theta)
        })
        .collect()
}

fn eval_with_derivative(p: &Poly<Float>, z: &Complex) -> (Complex, Complex) {
    let bits = z.prec();
    let mut f = Complex::zero(bits);
    let mut df = Complex::zero(bits);
    for c in p.coeffs().iter().rev() {
        df = df.mul(z).add(&f);
        f = f.mul(z);
        f.re += c;
    }
    (f, df)
}

fn converged(step: &Complex, z: &Complex, target: u32) -> bool {
    let s = step.abs();
    if s.is_zero() {
        return true;
    }
    let scale = z.abs().max(&Float::with_val(z.prec(), Float::i_exp(1, -(target as i32))));
    let rel = s / scale;
    rel < Float::with_val(z.prec(), Float::i_exp(1, -(target as i32) - 4))
}

fn aberth(p: &Poly<Float>, bits: u32, target: u32, rotation: f64) -> Option<Vec<Complex>> {
    let mut z = initial_guesses(p, bits, rotation);
    let n = z.len();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (f, df) = eval_with_derivative(p, &z[i]);
            if f.abs().is_zero() {
                done[i] = true;
                continue;
            }
            let newton = f.div(&df);
            let mut s = Complex::zero(bits);
            for j in 0..n {
                if j != i {
                    s = s.add(&z[i].sub(&z[j]).recip());
                }
            }
            let one = Complex::real(Float::with_val(bits, 1));
            let w = newton.div(&one.sub(&newton.mul(&s)));
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            done[i] = converged(&w, &z[i], target);
            z[i] = z[i].sub(&w);
        }
        if done.iter().all(|&d| d) {
            return Some(z);
        }
    }
    None
}

fn durand_kerner(p: &Poly<Float>, bits: u32, target: u32) -> Option<Vec<Complex>> {
    let n = p.degree().unwrap();
    let lead = p.coeffs()[n].clone();
    let monic = Poly::new(p.coeffs().iter().map(|c| Float::with_val(bits, c / &lead)).collect());
    let mut z = initial_guesses(&monic, bits, 0.785);
    for _ in 0..MAX_ITER {
        let mut all = true;
        for i in 0..n {
            let f = monic.eval_complex(&z[i]);
            let mut den = Complex::real(Float::with_val(bits, 1));
            for j in 0..n {
                if j != i {
                    den = den.mul(&z[i].sub(&z[j]));
                }
            }
            let w = f.div(&den);
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            all &= converged(&w, &z[i], target);
            z[i] = z[i].sub(&w);
        }
        if all {
            return Some(z);
        }
    }
    None
}
