//! Dense linear solves: fraction-free elimination for exact data and
//! partially pivoted elimination for floats.

use rug::{Float, Integer, Rational};

use super::Scalar;

/// The system has no unique solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Singular;

impl std::fmt::Display for Singular {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("singular linear system")
    }
}

impl std::error::Error for Singular {}

/// Solve `a·x = b` over any [`Scalar`].
pub fn solve_linear<T: Scalar>(a: Vec<Vec<T>>, b: Vec<T>) -> Result<Vec<T>, Singular> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Singular);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    T::solve(a, b)
}

fn lcm_of_denominators<'a>(row: impl Iterator<Item = &'a Rational>) -> Integer {
    let mut l = Integer::from(1);
    for v in row {
        l.lcm_mut(v.denom());
    }
    l
}

/// Bareiss elimination on the integer-scaled augmented matrix, then exact
/// back substitution.
pub(crate) fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, Singular> {
    let n = b.len();
    let mut m: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            let scale = lcm_of_denominators(a[i].iter().chain(std::iter::once(&b[i])));
            a[i].iter()
                .chain(std::iter::once(&b[i]))
                .map(|v| {
                    let s = Rational::from(v * &scale);
                    s.into_numer_denom().0
                })
                .collect()
        })
        .collect();

    let mut prev = Integer::from(1);
    for k in 0..n {
        let piv = (k..n).find(|&i| m[i][k] != 0).ok_or(Singular)?;
        m.swap(k, piv);
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let rk = row[k].clone();
            for j in (k + 1)..=n {
                let mut v = Integer::from(&row[j] * &pivot_row[k]);
                v -= Integer::from(&rk * &pivot_row[j]);
                v.div_exact_mut(&prev);
                row[j] = v;
            }
            row[k] = Integer::new();
        }
        prev = m[k][k].clone();
    }

    let mut x = vec![Rational::new(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from(&m[i][n]);
        for j in (i + 1)..n {
            acc -= Rational::from(&m[i][j] * &x[j]);
        }
        acc /= &m[i][i];
        x[i] = acc;
    }
    Ok(x)
}

/// One solution of a consistent but possibly rank-deficient rational system
/// (square or not): columns without a pivot are set to zero.
pub fn solve_rational_particular(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, Singular> {
    let rows = b.len();
    let cols = a.first().map_or(0, |r| r.len());
    if a.len() != rows || a.iter().any(|r| r.len() != cols) {
        return Err(Singular);
    }
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(r, v)| r.iter().chain(std::iter::once(v)).cloned().collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c].cmp0() != std::cmp::Ordering::Equal) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::from(1 / &m[r][c]);
        for v in m[r][c..].iter_mut() {
            *v *= &inv;
        }
        let (top, rest) = m.split_at_mut(r + 1);
        let prow = &top[r];
        for row in rest.iter_mut() {
            if row[c].cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row[c..].iter_mut().zip(&prow[c..]) {
                *v -= Rational::from(&f * pv);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| row[cols].cmp0() != std::cmp::Ordering::Equal) {
        return Err(Singular);
    }
    let mut x = vec![Rational::new(); cols];
    for (i, &c) in pivots.iter().enumerate().rev() {
        let mut acc = m[i][cols].clone();
        for j in (c + 1)..cols {
            if x[j].cmp0() != std::cmp::Ordering::Equal {
                acc -= Rational::from(&m[i][j] * &x[j]);
            }
        }
        x[c] = acc;
    }
    Ok(x)
}

/// Gaussian elimination with row equilibration and partial pivoting.
pub(crate) fn solve_float(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Result<Vec<Float>, Singular> {
    let n = b.len();
    let prec = a[0][0].prec();
    // Pivots below this, relative to an equilibrated row, count as zero.
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) * 7 / 8));

    for i in 0..n {
        let mut scale = Float::new(prec);
        for v in &a[i] {
            let av = Float::with_val(prec, v.abs_ref());
            if av > scale {
                scale = av;
            }
        }
        if scale.is_zero() {
            return Err(Singular);
        }
        for v in a[i].iter_mut() {
            *v /= &scale;
        }
        b[i] /= &scale;
    }

    for k in 0..n {
        let mut best = k;
        let mut best_abs = Float::with_val(prec, a[k][k].abs_ref());
        for i in (k + 1)..n {
            let v = Float::with_val(prec, a[i][k].abs_ref());
            if v > best_abs {
                best = i;
                best_abs = v;
            }
        }
        if best_abs <= tiny {
            return Err(Singular);
        }
        a.swap(k, best);
        b.swap(k, best);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let (btop, brest) = b.split_at_mut(k + 1);
        for (row, bi) in rest.iter_mut().zip(brest.iter_mut()) {
            if row[k].is_zero() {
                continue;
            }
            let f = Float::with_val(prec, &row[k] / &pivot_row[k]);
            for j in (k + 1)..n {
                let t = Float::with_val(prec, &f * &pivot_row[j]);
                row[j] -= t;
            }
            row[k] = Float::new(prec);
            let t = Float::with_val(prec, &f * &btop[k]);
            *bi -= t;
        }
    }

    let mut x = vec![Float::new(prec); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for j in (i + 1)..n {
            acc -= Float::with_val(prec, &a[i][j] * &x[j]);
        }
        acc /= &a[i][i];
        x[i] = acc;
    }
    Ok(x)
}

/// Determinant of a square integer matrix (Bareiss, with row swaps).
pub fn det_integer(mut m: Vec<Vec<Integer>>) -> Integer {
    let n = m.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut sign = 1;
    let mut prev = Integer::from(1);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i][k] != 0) else {
            return Integer::new();
        };
        if piv != k {
            m.swap(k, piv);
            sign = -sign;
        }
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            for j in (k + 1)..n {
                let mut v = Integer::from(&row[j] * &pivot_row[k]);
                v -= Integer::from(&row[k] * &pivot_row[j]);
                v.div_exact_mut(&prev);
                row[j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    if sign < 0 {
        -prev
    } else {
        prev
    }
}

/// Leading principal minors `det m[..k][..k]` for k = 1..=n.
///
/// Without row swaps the Bareiss pivots are exactly these minors; when a
/// pivot vanishes the remaining minors are computed one at a time.
pub fn leading_minors(m: &[Vec<Integer>]) -> Vec<Integer> {
    let n = m.len();
    let mut w: Vec<Vec<Integer>> = m.to_vec();
    let mut out = Vec::with_capacity(n);
    let mut prev = Integer::from(1);
    for k in 0..n {
        if w[k][k] == 0 {
            for size in (k + 1)..=n {
                let sub: Vec<Vec<Integer>> = m[..size].iter().map(|r| r[..size].to_vec()).collect();
                out.push(det_integer(sub));
            }
            return out;
        }
        out.push(w[k][k].clone());
        let (top, rest) = w.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            for j in (k + 1)..n {
                let mut v = Integer::from(&row[j] * &pivot_row[k]);
                v -= Integer::from(&row[k] * &pivot_row[j]);
                v.div_exact_mut(&prev);
                row[j] = v;
            }
        }
        prev = w[k][k].clone();
    }
    out
}
