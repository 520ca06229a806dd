//! Dyck paths counted by semilength and height: a sequence with a known
//! stretched-exponential asymptotic form.

use rayon::prelude::*;
use rug::{Assign, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::fit::AsymptoticModel;
use crate::series::ExactSeries;

/// Paths of semilength 0..=max_n staying within heights 0..=h.
fn bounded_counts(max_n: usize, h: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); max_n + 1];
    out[0] = Integer::from(1);
    if h == 0 {
        return out;
    }
    let mut cur = vec![Integer::new(); h + 1];
    cur[0] = Integer::from(1);
    let mut next = vec![Integer::new(); h + 1];
    for step in 1..=2 * max_n {
        for (y, slot) in next.iter_mut().enumerate() {
            let below = if y > 0 { Some(&cur[y - 1]) } else { None };
            let above = if y < h { Some(&cur[y + 1]) } else { None };
            match (below, above) {
                (Some(a), Some(b)) => slot.assign(a + b),
                (Some(a), None) | (None, Some(a)) => slot.assign(a),
                (None, None) => slot.assign(0),
            }
        }
        std::mem::swap(&mut cur, &mut next);
        if step % 2 == 0 {
            out[step / 2] = cur[0].clone();
        }
    }
    out
}

/// `d[n][h]`: Dyck paths of length 2n with maximum height exactly h, for
/// 0 ≤ h ≤ n ≤ max_n.
pub fn dyck_counts(max_n: usize) -> Vec<Vec<Integer>> {
    let bounded: Vec<Vec<Integer>> = (0..=max_n).into_par_iter().map(|h| bounded_counts(max_n, h)).collect();
    (0..=max_n)
        .map(|n| {
            (0..=n)
                .map(|h| if h == 0 { bounded[0][n].clone() } else { Integer::from(&bounded[h][n] - &bounded[h - 1][n]) })
                .collect()
        })
        .collect()
}

/// Σₕ d_{n,h}·yʰ for n = 0..=max_n.
pub fn dyck_series(y: &Rational, max_n: usize) -> Result<ExactSeries> {
    if *y <= 0 || *y >= 1 {
        return Err(Error::Invalid(format!("height weight must lie in (0,1), got {y}")));
    }
    let d = dyck_counts(max_n);
    let coeffs: Vec<Rational> = d
        .par_iter()
        .map(|row| {
            // Horner in y over the row.
            let mut acc = Rational::new();
            for c in row.iter().rev() {
                acc *= y;
                acc += c;
            }
            acc
        })
        .collect();
    ExactSeries::new(format!("dyck(y={y})"), 0, coeffs)
}

/// The known asymptotic form of [`dyck_series`] at weight y.
pub fn dyck_truth(y: &Rational, bits: u32) -> Result<AsymptoticModel> {
    if *y <= 0 || *y >= 1 {
        return Err(Error::Invalid(format!("height weight must lie in (0,1), got {y}")));
    }
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let yf = Float::with_val(bits, y);
    let r = -Float::with_val(bits, yf.ln_ref());
    let pow = |x: &Float, e: (i32, i32)| -> Float {
        let e = Float::with_val(bits, Rational::from(e));
        rug::ops::Pow::pow(x.clone(), e)
    };
    let two = Float::with_val(bits, 2u32);
    let a = pow(&two, (5, 3)) * pow(&pi, (5, 6)) / Float::with_val(bits, 3u32).sqrt();
    let e = pow(&Float::with_val(bits, &pi / 2u32), (2, 3)) * 3u32;
    let one_m = Float::with_val(bits, 1u32 - &yf);
    let c = one_m / Float::with_val(bits, yf.square_ref()) * Float::with_val(bits, r.cbrt_ref()) * a;
    let mu1 = (-(e * pow(&r, (2, 3)))).exp();
    AsymptoticModel::new(
        Float::with_val(bits, 4u32),
        Some(mu1),
        Some(Rational::from((1, 3))),
        Float::with_val(bits, Rational::from((-5, 6))),
        Some(c),
    )
}
