//! Ensembles of approximants: defect rejection and aggregated predictions.

use rayon::prelude::*;
use rug::Float;

use super::{build_da, build_da_exact_particular, physical, Arithmetic, DAConfig, DiffApproximant};
use crate::error::{Error, Result};
use crate::series::{ExactSeries, Predicted};

#[derive(Clone, Debug)]
pub struct EnsembleOptions {
    /// Coefficients to predict past the known ones.
    pub count: usize,
    /// Members with a root inside (1 − δ)·median physical modulus are dropped.
    pub delta: f64,
    /// Physical-root outlier cut in standard deviations.
    pub sigma_cut: f64,
    /// Concurrent exact solves.
    pub exact_concurrency: usize,
    pub bits: u32,
}

impl EnsembleOptions {
    pub fn new(count: usize, bits: u32) -> Self {
        EnsembleOptions { count, delta: 0.05, sigma_cut: 3.0, exact_concurrency: 4, bits }
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleMember {
    pub config: DAConfig,
    /// Smallest positive real root of Q_M and its exponent.
    pub critical_point: Option<Float>,
    pub exponent: Option<Float>,
    pub min_root_modulus: Option<Float>,
    pub coeffs: Vec<Float>,
    pub ratios: Vec<Float>,
    /// Why the member is left out of the aggregates.
    pub excluded: Option<String>,
    /// How a singular system was worked around, if it was.
    pub substitution: Option<String>,
}

/// Mean, sample standard deviation, and leading significant digits shared
/// by every contributing member.
#[derive(Clone, Debug, PartialEq)]
pub struct Stat {
    pub mean: Float,
    pub std: Float,
    pub agreed_digits: u32,
    pub members: usize,
    /// Values dropped by the outlier cut.
    pub outliers: usize,
}

impl Stat {
    fn of(values: &[&Float], bits: u32) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mut mean = Float::new(bits);
        for v in values {
            mean += *v;
        }
        mean /= n as u32;
        let mut ss = Float::new(bits);
        let mut spread = Float::new(bits);
        for v in values {
            let d = Float::with_val(bits, *v - &mean).abs();
            ss += Float::with_val(bits, d.square_ref());
            if d > spread {
                spread = d;
            }
        }
        let std = if n > 1 { (ss / (n as u32 - 1)).sqrt() } else { Float::new(bits) };
        let agreed_digits = if mean.is_zero() {
            0
        } else if spread.is_zero() {
            (f64::from(bits) * std::f64::consts::LOG10_2).floor() as u32
        } else {
            let rel = Float::with_val(bits, &spread / &mean).abs();
            (-rel.log10().to_f64()).floor().max(0.0) as u32
        };
        Some(Stat { mean, std, agreed_digits, members: n, outliers: 0 })
    }

    /// [`Stat::of`] over the values within `cut` robust standard deviations
    /// (1.4826·MAD) of the median.
    fn clipped(values: &[&Float], bits: u32, cut: f64) -> Option<Stat> {
        if values.len() < 3 {
            return Stat::of(values, bits);
        }
        let med = median(values.iter().map(|v| Float::with_val(bits, *v)).collect());
        let dev: Vec<Float> = values.iter().map(|v| Float::with_val(bits, *v - &med).abs()).collect();
        let mad = median(dev.clone());
        if mad.is_zero() {
            return Stat::of(values, bits);
        }
        let lim = mad * Float::with_val(bits, 1.4826 * cut);
        let keep: Vec<&Float> = values.iter().zip(&dev).filter(|(_, d)| **d <= lim).map(|(v, _)| *v).collect();
        let st = Stat::of(&keep, bits)?;
        Some(Stat { outliers: values.len() - keep.len(), ..st })
    }

    pub fn predicted(&self) -> Predicted {
        Predicted { value: self.mean.clone(), uncertainty: self.std.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct PredictionEnsemble {
    pub series_name: String,
    /// Index of the first predicted coefficient.
    pub first_index: u64,
    /// Sorted by config.
    pub members: Vec<EnsembleMember>,
    pub coeffs: Vec<Stat>,
    pub ratios: Vec<Stat>,
    pub critical_point: Option<Stat>,
    pub exponent: Option<Stat>,
}

impl PredictionEnsemble {
    pub fn accepted(&self) -> impl Iterator<Item = &EnsembleMember> {
        self.members.iter().filter(|m| m.excluded.is_none())
    }

    /// The input series with the aggregated predictions as its tail.
    pub fn to_series(&self, s: &ExactSeries) -> Result<ExactSeries> {
        s.exact_only().with_tail(
            Some(self.coeffs.iter().map(Stat::predicted).collect()),
            Some(self.ratios.iter().map(Stat::predicted).collect()),
        )
    }
}

/// Every config of order in `orders` whose degrees differ pairwise by at most
/// `spread`, for each inhomogeneous degree in `inhom`, consuming exactly
/// `available` coefficients.
pub fn default_grid(available: usize, orders: &[usize], inhom: std::ops::RangeInclusive<i32>, spread: usize) -> Vec<DAConfig> {
    let mut out = Vec::new();
    for &m in orders {
        if m == 0 {
            continue;
        }
        let k = m + 1;
        for l in inhom.clone() {
            // Σ Nₖ = available − L − (M + 1)
            let total = available as i64 - i64::from(l) - k as i64;
            if total < 1 {
                continue;
            }
            let total = total as usize;
            let lo = (total / k).saturating_sub(spread);
            let hi = total.div_ceil(k) + spread;
            let mut cur = Vec::with_capacity(k);
            compositions(total, k, lo, hi, &mut cur, &mut |d| {
                let (mn, mx) = (d.iter().min().unwrap(), d.iter().max().unwrap());
                if mx - mn <= spread && d[m] >= 1 {
                    out.push(DAConfig { order: m, degrees: d.to_vec(), inhom: l, mode: Arithmetic::Exact });
                }
            });
        }
    }
    out.sort();
    out
}

fn compositions(left: usize, parts: usize, lo: usize, hi: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if parts == 0 {
        if left == 0 {
            f(cur);
        }
        return;
    }
    for v in lo..=hi.min(left) {
        cur.push(v);
        compositions(left - v, parts - 1, lo, hi, cur, f);
        cur.pop();
    }
}

fn median(mut v: Vec<Float>) -> Float {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2].clone()
    } else {
        Float::with_val(v[0].prec(), &v[n / 2 - 1] + &v[n / 2]) / 2u32
    }
}

/// Mark members with a spurious root nearer the origin than the physical
/// one, then physical-root outliers. Members already excluded stay so.
pub fn reject_defective(members: &mut [EnsembleMember], delta: f64, sigma_cut: f64) -> Result<()> {
    for m in members.iter_mut() {
        if m.excluded.is_none() && m.critical_point.is_none() {
            m.excluded = Some("no positive real singularity".into());
        }
    }
    let live = members.iter().filter(|m| m.excluded.is_none()).count();
    if live >= 3 {
        let moduli: Vec<Float> = members.iter().filter(|m| m.excluded.is_none()).map(|m| m.critical_point.clone().unwrap()).collect();
        let bits = moduli[0].prec();
        let floor = median(moduli) * Float::with_val(bits, 1.0 - delta);
        for m in members.iter_mut().filter(|m| m.excluded.is_none()) {
            if m.min_root_modulus.as_ref().is_some_and(|r| *r < floor) {
                m.excluded = Some("spurious singularity inside the physical radius".into());
            }
        }
        let zs: Vec<&Float> = members.iter().filter(|m| m.excluded.is_none()).filter_map(|m| m.critical_point.as_ref()).collect();
        if zs.len() >= 3 {
            let st = Stat::of(&zs, bits).unwrap();
            let cut = Float::with_val(bits, &st.std * sigma_cut);
            if !cut.is_zero() {
                for m in members.iter_mut().filter(|m| m.excluded.is_none()) {
                    let d = Float::with_val(bits, m.critical_point.as_ref().unwrap() - &st.mean).abs();
                    if d > cut {
                        m.excluded = Some(format!("critical point beyond {sigma_cut} standard deviations"));
                    }
                }
            }
        }
    }
    if members.iter().all(|m| m.excluded.is_some()) {
        return Err(Error::EnsembleEmpty);
    }
    Ok(())
}

/// A series satisfying a smaller equation than `config` makes its system
/// singular. Exact members then take a particular solution, which still
/// matches every consumed coefficient; failing that, degrees are lowered
/// until the system is regular.
fn fit_member(s: &ExactSeries, config: &DAConfig, bits: u32) -> Result<(DAConfig, Option<String>, DiffApproximant<Float>)> {
    let err = match build_da(s, config, bits) {
        Ok(d) => return Ok((config.clone(), None, d)),
        Err(Error::Defective(e)) => e,
        Err(e) => return Err(e),
    };
    if config.mode == Arithmetic::Exact {
        if let Ok(d) = build_da_exact_particular(s, config) {
            return Ok((config.clone(), Some("rank-deficient system, particular solution".into()), d.to_float(bits)));
        }
    }
    let mut cfg = config.clone();
    while let Some(c) = cfg.shrunk() {
        cfg = c;
        if let Ok(d) = build_da(s, &cfg, bits) {
            return Ok((cfg, Some(format!("lowered from {config}")), d));
        }
    }
    Err(Error::Defective(err))
}

fn run_member(s: &ExactSeries, known: &[Float], config: &DAConfig, opts: &EnsembleOptions) -> EnsembleMember {
    let mut member = EnsembleMember {
        config: config.clone(),
        critical_point: None,
        exponent: None,
        min_root_modulus: None,
        coeffs: Vec::new(),
        ratios: Vec::new(),
        excluded: None,
        substitution: None,
    };
    let da = match fit_member(s, config, opts.bits) {
        Ok((cfg, how, da)) => {
            member.config = cfg;
            member.substitution = how;
            da
        }
        Err(e) => {
            member.excluded = Some(e.to_string());
            return member;
        }
    };
    let digits = (f64::from(opts.bits) * std::f64::consts::LOG10_2) as u32 / 2;
    match da.singularities(digits.max(15)) {
        Ok(sing) => {
            member.min_root_modulus = sing.first().map(|z| z.location.abs());
            if let Some(p) = physical(&sing) {
                member.critical_point = Some(p.location.re.clone());
                member.exponent = p.gamma().cloned();
            }
        }
        Err(e) => member.excluded = Some(e.to_string()),
    }
    let (pred, stop) = da.predict_coefficients(known, opts.count);
    let mut prev = known.last().unwrap().clone();
    for c in &pred {
        member.ratios.push(Float::with_val(opts.bits, c / &prev));
        prev = c.clone();
    }
    member.coeffs = pred;
    if let (Some(n), None) = (stop, &member.excluded) {
        if member.coeffs.is_empty() {
            member.excluded = Some(format!("recurrence leading factor vanishes at n={n}"));
        }
    }
    member
}

/// Fit every config in `grid` to the exact coefficients of `s` and aggregate
/// the accepted members' predictions. Members that fail to build are
/// recorded as excluded.
pub fn extend_series(s: &ExactSeries, grid: &[DAConfig], opts: &EnsembleOptions) -> Result<PredictionEnsemble> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty approximant grid".into()));
    }
    let s = s.exact_only();
    let bits = opts.bits;
    let known: Vec<Float> = s.coeffs().iter().map(|c| Float::with_val(bits, c)).collect();
    let mut grid = grid.to_vec();
    grid.sort();
    grid.dedup();
    let (exact, float): (Vec<DAConfig>, Vec<DAConfig>) = grid.into_iter().partition(|c| c.mode == Arithmetic::Exact);
    let mut members: Vec<EnsembleMember> = float.par_iter().map(|c| run_member(&s, &known, c, opts)).collect();
    if !exact.is_empty() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.exact_concurrency.max(1))
            .build()
            .map_err(|e| Error::ResourceCap(e.to_string()))?;
        members.extend(pool.install(|| exact.par_iter().map(|c| run_member(&s, &known, c, opts)).collect::<Vec<_>>()));
    }
    members.sort_by(|a, b| a.config.cmp(&b.config));
    for i in 1..members.len() {
        if members[i].excluded.is_none() && members[..i].iter().any(|m| m.excluded.is_none() && m.config == members[i].config) {
            members[i].excluded = Some(format!("duplicate of {}", members[i].config));
        }
    }
    reject_defective(&mut members, opts.delta, opts.sigma_cut)?;

    let accepted: Vec<&EnsembleMember> = members.iter().filter(|m| m.excluded.is_none()).collect();
    let aggregate = |pick: &dyn Fn(&EnsembleMember) -> &Vec<Float>| -> Vec<Stat> {
        let mut out: Vec<Stat> = Vec::new();
        for i in 0..opts.count {
            let vals: Vec<&Float> = accepted.iter().filter_map(|m| pick(m).get(i)).collect();
            match Stat::clipped(&vals, bits, opts.sigma_cut) {
                Some(mut st) => {
                    // Uncertainty never shrinks further out.
                    if let Some(prev) = out.last() {
                        let rel_prev = Float::with_val(bits, &prev.std / &prev.mean).abs();
                        let floor = Float::with_val(bits, &rel_prev * &st.mean).abs();
                        if st.std < floor {
                            st.std = floor;
                        }
                    }
                    out.push(st)
                }
                None => break,
            }
        }
        out
    };
    let coeffs = aggregate(&|m| &m.coeffs);
    let ratios = aggregate(&|m| &m.ratios);
    let zc: Vec<&Float> = accepted.iter().filter_map(|m| m.critical_point.as_ref()).collect();
    let ex: Vec<&Float> = accepted.iter().filter_map(|m| m.exponent.as_ref()).collect();
    Ok(PredictionEnsemble {
        series_name: s.name.clone(),
        first_index: s.offset + s.len() as u64,
        critical_point: Stat::of(&zc, bits),
        exponent: Stat::of(&ex, bits),
        members,
        coeffs,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Integer;

    fn member(z: f64, min: f64) -> EnsembleMember {
        EnsembleMember {
            config: DAConfig::new(vec![1, 1], -1).unwrap(),
            critical_point: Some(Float::with_val(64, z)),
            exponent: None,
            min_root_modulus: Some(Float::with_val(64, min)),
            coeffs: vec![],
            ratios: vec![],
            excluded: None,
            substitution: None,
        }
    }

    #[test]
    fn grid_shapes() {
        let g = default_grid(17, &[2, 3], -1..=2, 2);
        assert!(!g.is_empty());
        for c in &g {
            assert_eq!(c.unknowns(), 17);
            let mx = c.degrees.iter().max().unwrap();
            let mn = c.degrees.iter().min().unwrap();
            assert!(mx - mn <= 2);
        }
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn planted_spurious_root_removed() {
        let mut ms = vec![member(0.25, 0.25), member(0.25, 0.25), member(0.25, 0.125), member(0.25, 0.25)];
        reject_defective(&mut ms, 0.05, 3.0).unwrap();
        let kept: Vec<bool> = ms.iter().map(|m| m.excluded.is_none()).collect();
        assert_eq!(kept, vec![true, true, false, true]);
    }

    #[test]
    fn identical_members_survive() {
        let mut ms = vec![member(0.1, 0.1); 5];
        reject_defective(&mut ms, 0.05, 3.0).unwrap();
        assert!(ms.iter().all(|m| m.excluded.is_none()));
        let mut none = vec![member(0.1, 0.1); 3];
        for m in none.iter_mut() {
            m.critical_point = None;
        }
        assert!(matches!(reject_defective(&mut none, 0.05, 3.0), Err(Error::EnsembleEmpty)));
    }

    #[test]
    fn geometric_has_zero_spread() {
        let s = ExactSeries::from_integers("geo", 0, (0..12u32).map(|k| Integer::from(Integer::u_pow_u(3, k))).collect()).unwrap();
        let grid: Vec<DAConfig> = [(vec![1, 1], -1), (vec![1, 1], 0), (vec![2, 1], -1), (vec![1, 2], 0)]
            .into_iter()
            .map(|(d, l)| DAConfig::new(d, l).unwrap())
            .collect();
        let e = extend_series(&s, &grid, &EnsembleOptions::new(5, 200)).unwrap();
        assert!(e.accepted().count() >= 1);
        assert_eq!(e.ratios.len(), 5);
        for r in &e.ratios {
            assert!((r.mean.to_f64() - 3.0).abs() < 1e-40);
            assert!(r.std.to_f64() < 1e-40);
        }
    }
}
