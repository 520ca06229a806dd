//! Linear least squares through the normal equations.

use rug::Float;

use super::linalg::{solve_float, Singular};

#[derive(Clone, Debug)]
pub struct LsqFit {
    pub coeffs: Vec<Float>,
    /// Root-mean-square misfit over the nodes.
    pub residual: Float,
}

/// Fit `ys ≈ Σ c_j·basis_j(xs)`; precision follows the first node.
pub fn fit_least_squares(
    xs: &[Float],
    ys: &[Float],
    basis: &[&dyn Fn(&Float) -> Float],
) -> Result<LsqFit, Singular> {
    let m = basis.len();
    if xs.len() != ys.len() || xs.len() < m || m == 0 {
        return Err(Singular);
    }
    let bits = xs[0].prec();
    let rows: Vec<Vec<Float>> = xs.iter().map(|x| basis.iter().map(|f| f(x)).collect()).collect();

    let mut gram = vec![vec![Float::new(bits); m]; m];
    let mut rhs = vec![Float::new(bits); m];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..m {
            for j in i..m {
                gram[i][j] += Float::with_val(bits, &row[i] * &row[j]);
            }
            rhs[i] += Float::with_val(bits, &row[i] * y);
        }
    }
    for i in 0..m {
        for j in 0..i {
            gram[i][j] = gram[j][i].clone();
        }
    }
    let coeffs = solve_float(gram, rhs)?;

    let mut ss = Float::new(bits);
    for (row, y) in rows.iter().zip(ys) {
        let mut fit = Float::new(bits);
        for (b, c) in row.iter().zip(&coeffs) {
            fit += Float::with_val(bits, b * c);
        }
        let d = Float::with_val(bits, y - &fit);
        ss += d.square();
    }
    let residual = (ss / xs.len() as u32).sqrt();
    Ok(LsqFit { coeffs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(x: &Float) -> Float {
        Float::with_val(x.prec(), 1)
    }
    fn ident(x: &Float) -> Float {
        x.clone()
    }

    #[test]
    fn exact_line() {
        let xs: Vec<Float> = (0..6).map(|i| Float::with_val(200, i)).collect();
        let ys: Vec<Float> = xs.iter().map(|x| Float::with_val(200, x * 3u32) + 2u32).collect();
        let fit = fit_least_squares(&xs, &ys, &[&one, &ident]).unwrap();
        assert!((Float::with_val(200, &fit.coeffs[0] - 2u32)).abs() < 1e-50);
        assert!((Float::with_val(200, &fit.coeffs[1] - 3u32)).abs() < 1e-50);
        assert!(fit.residual < 1e-50);
    }

    #[test]
    fn constant_data() {
        let xs: Vec<Float> = (1..5).map(|i| Float::with_val(200, i)).collect();
        let ys = vec![Float::with_val(200, 5); 4];
        let fit = fit_least_squares(&xs, &ys, &[&one, &ident]).unwrap();
        assert!((Float::with_val(200, &fit.coeffs[0] - 5u32)).abs() < 1e-50);
        assert!(fit.coeffs[1].clone().abs() < 1e-50);
    }

    #[test]
    fn noisy_line() {
        // Fixed LCG noise of amplitude 1e-3.
        let mut state: u64 = 12345;
        let xs: Vec<Float> = (0..40).map(|i| Float::with_val(128, i) / 10u32).collect();
        let ys: Vec<Float> = xs
            .iter()
            .map(|x| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let u = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                Float::with_val(128, x * 3u32) + 2u32 + u * 2e-3
            })
            .collect();
        let fit = fit_least_squares(&xs, &ys, &[&one, &ident]).unwrap();
        assert!(fit.residual > 0 && fit.residual < 1e-3);
        assert!((fit.coeffs[0].to_f64() - 2.0).abs() < 1e-3);
        assert!((fit.coeffs[1].to_f64() - 3.0).abs() < 1e-3);
    }

    #[test]
    fn collinear_basis() {
        let xs: Vec<Float> = (0..4).map(|i| Float::with_val(100, i)).collect();
        let ys = xs.clone();
        assert!(fit_least_squares(&xs, &ys, &[&ident, &ident]).is_err());
    }
}
