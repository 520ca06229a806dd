//! End-to-end pipelines: ratio analysis for power-law and stretched
//! asymptotics, assembled into a report whose every number names the
//! estimator and settings it came from.

use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::da::{default_grid, extend_series, EnsembleOptions, PredictionEnsemble, Stat};
use crate::error::{Error, Result};
use crate::fit::{fit_amplitude, fit_log_coeffs_3pt, fit_log_coeffs_4pt, fit_ratios_powerlaw, AsymptoticModel, FitTrace};
use crate::numeric::{abs, fmt_float};
use crate::ratio::{default_window, exponent_delta, exponent_gamma, extrapolate_exponents, extrapolate_tail, intercepts, EstimatorSeq};
use crate::series::{ratios, ExactSeries};
use crate::stieltjes::BoundReport;
use crate::stretched::{extrapolate_sigma, stretch_diagnostics};

#[derive(Clone, Debug)]
pub struct Estimate {
    pub name: String,
    pub value: Float,
    pub uncertainty: Option<Float>,
    pub method: String,
    pub settings: String,
}

impl Estimate {
    fn new(name: &str, value: Float, uncertainty: Option<Float>, method: &str, settings: String) -> Self {
        Estimate { name: name.into(), value, uncertainty, method: method.into(), settings }
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionSummary {
    pub predicted: usize,
    pub members: usize,
    pub accepted: usize,
    pub critical_point: Option<Stat>,
    pub exponent: Option<Stat>,
    /// Relative uncertainty of the first and last predicted ratio.
    pub first_ratio_rel: Option<Float>,
    pub last_ratio_rel: Option<Float>,
}

impl ExtensionSummary {
    pub fn from_ensemble(e: &PredictionEnsemble) -> Self {
        let rel = |s: Option<&Stat>| s.map(|s| abs(&Float::with_val(s.std.prec(), &s.std / &s.mean)));
        ExtensionSummary {
            predicted: e.ratios.len(),
            members: e.members.len(),
            accepted: e.accepted().count(),
            critical_point: e.critical_point.clone(),
            exponent: e.exponent.clone(),
            first_ratio_rel: rel(e.ratios.first()),
            last_ratio_rel: rel(e.ratios.last()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub series: String,
    pub exact_terms: usize,
    pub predicted_terms: usize,
    pub mode: String,
    pub diagnostics: Vec<String>,
    pub model: Option<AsymptoticModel>,
    pub estimates: Vec<Estimate>,
    pub bounds: Option<BoundReport>,
    pub extension: Option<ExtensionSummary>,
    /// Estimator sequences for plotting, one file each.
    pub plots: Vec<EstimatorSeq>,
    pub ratio_fit: Option<FitTrace>,
}

impl AnalysisReport {
    fn new(s: &ExactSeries, mode: String) -> Self {
        AnalysisReport {
            series: s.name.clone(),
            exact_terms: s.len(),
            predicted_terms: s.tail_ratios().map_or(0, |t| t.len()).max(s.tail().map_or(0, |t| t.len())),
            mode,
            diagnostics: Vec::new(),
            model: None,
            estimates: Vec::new(),
            bounds: None,
            extension: None,
            plots: Vec::new(),
            ratio_fit: None,
        }
    }

    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self, sig: usize) -> Value {
        let f = |x: &Float| fmt_float(x, sig);
        let of = |x: &Option<Float>| x.as_ref().map(f);
        let stat = |s: &Option<Stat>| {
            s.as_ref().map(|s| json!({"mean": f(&s.mean), "std": f(&s.std), "agreed_digits": s.agreed_digits, "members": s.members}))
        };
        let model = self.model.as_ref().map(|m| {
            json!({
                "mu": f(&m.mu),
                "mu1": of(&m.mu1),
                "sigma": m.sigma.as_ref().map(|s| s.to_string()),
                "g": f(&m.g),
                "amplitude": of(&m.amplitude),
                "uncertainty": {
                    "mu": of(&m.uncertainty.mu),
                    "mu1": of(&m.uncertainty.mu1),
                    "g": of(&m.uncertainty.g),
                    "amplitude": of(&m.uncertainty.amplitude),
                },
            })
        });
        let estimates: Vec<Value> = self
            .estimates
            .iter()
            .map(|e| json!({"name": e.name, "value": f(&e.value), "uncertainty": of(&e.uncertainty), "method": e.method, "settings": e.settings}))
            .collect();
        let bounds = self.bounds.as_ref().map(|b| bounds_json(b, sig));
        let extension = self.extension.as_ref().map(|x| {
            json!({
                "predicted_ratios": x.predicted,
                "members": x.members,
                "accepted": x.accepted,
                "critical_point": stat(&x.critical_point),
                "exponent": stat(&x.exponent),
                "first_ratio_relative_uncertainty": of(&x.first_ratio_rel),
                "last_ratio_relative_uncertainty": of(&x.last_ratio_rel),
            })
        });
        json!({
            "series": self.series,
            "exact_terms": self.exact_terms,
            "predicted_terms": self.predicted_terms,
            "mode": self.mode,
            "diagnostics": self.diagnostics,
            "model": model,
            "estimates": estimates,
            "bounds": bounds,
            "extension": extension,
            "plots": self.plots.iter().map(|p| p.label.clone()).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self, sig: usize) -> String {
        let mut out = format!("series {} ({} exact, {} predicted), {}\n", self.series, self.exact_terms, self.predicted_terms, self.mode);
        for e in &self.estimates {
            let u = e.uncertainty.as_ref().map(|u| format!(" +- {}", fmt_float(u, 3))).unwrap_or_default();
            let how = if e.settings.is_empty() { e.method.clone() } else { format!("{}; {}", e.method, e.settings) };
            out.push_str(&format!("{:<22} {}{}  [{how}]\n", e.name, fmt_float(&e.value, sig), u));
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        out
    }

    pub fn to_csv(&self, sig: usize) -> String {
        let mut out = String::from("name,value,uncertainty,method,settings\n");
        for e in &self.estimates {
            let u = e.uncertainty.as_ref().map(|u| fmt_float(u, sig)).unwrap_or_default();
            out.push_str(&format!("{},{},{},\"{}\",\"{}\"\n", e.name, fmt_float(&e.value, sig), u, e.method, e.settings));
        }
        out
    }
}

pub fn bounds_json(b: &BoundReport, sig: usize) -> Value {
    let f = |x: &Float| fmt_float(x, sig);
    json!({
        "status": b.status(),
        "logconvex_bound": b.logconvex_bound.as_ref().map(|(n, v)| json!({"n": n, "value": f(v)})),
        "bound": f(&b.bound),
        "last_bound": b.hhr_bounds.last().map(|(n, v)| json!({"n": n, "value": f(v)})),
        "hhr_bounds": b.hhr_bounds.iter().map(|(n, v)| json!([n, f(v)])).collect::<Vec<_>>(),
        "monotonicity_violations": b.monotonicity_violations,
        "decreasing_at": b.decreasing_at,
        "extrapolated": b.extrapolated.as_ref().map(|(v, beta)| json!({"value": f(v), "beta": beta.to_string()})),
    })
}

/// The value where the sequence changes least between neighbours: the last
/// value of a converging trace, the turning point of one that drifts away
/// after settling.
pub fn plateau(seq: &EstimatorSeq) -> Option<(u64, Float)> {
    let v = &seq.values;
    if v.len() < 3 {
        return v.last().cloned();
    }
    let bits = seq.bits();
    let mut best: Option<(usize, Float)> = None;
    for i in 1..v.len() - 1 {
        let d = Float::with_val(bits, &v[i + 1].1 - &v[i - 1].1).abs();
        if best.as_ref().is_none_or(|(_, b)| d <= *b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| v[i].clone())
}

/// Extend `s` by `count` ratios with the default 2nd/3rd-order grid.
pub fn extend_default(s: &ExactSeries, count: usize, opts: &EnsembleOptions) -> Result<(ExactSeries, PredictionEnsemble)> {
    let grid = default_grid(s.len(), &[2, 3], -1..=2, 2);
    let e = extend_series(s, &grid, &EnsembleOptions { count, ..opts.clone() })?;
    Ok((e.to_series(s)?, e))
}

#[derive(Clone, Debug, Default)]
pub struct PowerLawOptions {
    /// Extrapolation window; default depends on the sequence length.
    pub window: Option<usize>,
    /// Exponent assumed for the amplitude fit instead of the estimated one.
    pub g_fixed: Option<Float>,
}

fn spread(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec(), a - b).abs()
}

/// μ from quadratic and cubic intercepts, g from exponent estimators given
/// μ, μ·g from sliding four-parameter ratio fits, amplitude from a
/// three-parameter fit to log cₙ.
pub fn powerlaw_pipeline(s: &ExactSeries, opts: &PowerLawOptions, bits: u32) -> Result<AnalysisReport> {
    let mut rep = AnalysisReport::new(s, "powerlaw".into());
    let r = ratios(s, bits)?;
    let w = |seq: &EstimatorSeq| opts.window.unwrap_or_else(|| default_window(seq.len()));
    let l1 = intercepts(&r, 1)?;
    let l2 = intercepts(&r, 2)?;
    let l3 = intercepts(&r, 3)?;
    let x1 = extrapolate_tail(&l1, &l1.abscissa, w(&l1))?;
    let x2 = extrapolate_tail(&l2, &l2.abscissa, w(&l2))?;
    let x3 = extrapolate_tail(&l3, &l3.abscissa, w(&l3))?;
    let mu = x2.intercept.clone();
    let mu_unc = spread(&x2.intercept, &x3.intercept);
    rep.estimates.push(Estimate::new("mu", mu.clone(), Some(mu_unc.clone()), "quadratic intercepts, linear in n^-3", format!("window {}", x2.window)));
    rep.estimates.push(Estimate::new("mu_cubic", x3.intercept.clone(), None, "cubic intercepts, linear in n^-4", format!("window {}", x3.window)));
    rep.estimates.push(Estimate::new("mu_linear", x1.intercept.clone(), None, "linear intercepts, linear in n^-2", format!("window {}", x1.window)));

    let zc = Float::with_val(bits, 1) / &mu;
    let gam = exponent_gamma(&r, &zc);
    let xg = extrapolate_tail(&gam, &Rational::from(1), w(&gam))?;
    let g = Float::with_val(bits, &xg.intercept - 1u32);
    let wide = (2 * xg.window).min(gam.len());
    let g_unc = extrapolate_tail(&gam, &Rational::from(1), wide).ok().map(|x| spread(&x.intercept, &xg.intercept));
    rep.estimates.push(Estimate::new("g", g.clone(), g_unc.clone(), "exponent estimates at estimated mu, linear in 1/n", format!("window {}", xg.window)));

    if let Ok(d) = exponent_delta(&r) {
        if d.len() >= 2 {
            let xd = extrapolate_tail(&d, &Rational::from(1), w(&d))?;
            rep.estimates.push(Estimate::new("g_mu_free", Float::with_val(bits, &xd.intercept - 1u32), None, "mu-independent exponent estimates, linear in 1/n", format!("window {}", xd.window)));
            rep.plots.push(d);
        }
    }

    let tr = fit_ratios_powerlaw(&r)?;
    let (mu4, mg4) = (tr.column(0), tr.column(1));
    if mg4.len() >= 2 {
        let xm = extrapolate_tail(&mu4, &Rational::from(1), w(&mu4))?;
        let xmg = extrapolate_tail(&mg4, &Rational::from(1), w(&mg4))?;
        rep.estimates.push(Estimate::new("mu_fit", xm.intercept.clone(), None, "4-parameter ratio fit, mu trace linear in 1/n", format!("window {}", xm.window)));
        rep.estimates.push(Estimate::new("mu_g", xmg.intercept.clone(), None, "4-parameter ratio fit, mu*g trace linear in 1/n", format!("window {}", xmg.window)));
        for i in 2..4 {
            let (n, row) = tr.last().unwrap();
            rep.estimates.push(Estimate::new(&tr.params[i], row[i].clone(), None, "4-parameter ratio fit, last window", format!("window ending n={n}")));
        }
    }
    rep.plots.extend([r.clone(), l1, l2, l3, gam, mu4, mg4]);

    let g_amp = opts.g_fixed.clone().unwrap_or_else(|| g.clone());
    let amp = fit_amplitude(s, &g_amp, bits)?;
    let mut amplitude = None;
    if let Some((n, row)) = amp.last() {
        let c = Float::with_val(bits, &row[1]).exp();
        let src = if opts.g_fixed.is_some() { "fixed" } else { "estimated" };
        rep.estimates.push(Estimate::new("amplitude", c.clone(), None, "3-parameter fit to log c_n", format!("window ending n={n}, g {src} at {}", fmt_float(&g_amp, 8))));
        amplitude = Some(c);
        rep.plots.push(amp.column(1));
    }
    let mut model = AsymptoticModel::power_law(mu, g, amplitude)?;
    model.uncertainty.mu = Some(mu_unc);
    model.uncertainty.g = g_unc;
    rep.model = Some(model);
    rep.ratio_fit = Some(tr);
    if let Some(n) = r.first_predicted {
        rep.diagnostics.push(format!("ratios from n={n} on are predicted"));
    }
    Ok(rep)
}

#[derive(Clone, Debug, Default)]
pub struct StretchedOptions {
    /// Growth rate taken as known.
    pub mu: Option<Float>,
    pub window: Option<usize>,
}

/// l₁ − μ corrections: k(1 − σ) for k = 1, 2 and the 1/n term, ascending.
fn intercept_exponents(sigma: &Rational) -> Vec<Rational> {
    let one_m: Rational = 1 - sigma.clone();
    let mut e = vec![one_m.clone(), 2 * one_m.clone(), Rational::from(1)];
    if e[1] == 1 {
        e[2] = 3 * one_m;
    }
    e.sort();
    e
}

/// σ from gradient estimators, μ from linear intercepts (unless given),
/// μ₁ and g from three- or four-parameter fits to log cₙ read at their
/// plateau, and σ·log μ₁ from the ratio tail.
pub fn stretched_pipeline(s: &ExactSeries, sigma: &Rational, opts: &StretchedOptions, bits: u32) -> Result<AnalysisReport> {
    if *sigma <= 0 || *sigma >= 1 {
        return Err(Error::Invalid(format!("stretch exponent must lie in (0,1), got {sigma}")));
    }
    let mut rep = AnalysisReport::new(s, format!("stretched sigma={sigma}"));
    let r = ratios(s, bits)?;
    let l1 = intercepts(&r, 1)?;
    let mu = match &opts.mu {
        Some(m) => {
            rep.estimates.push(Estimate::new("mu", m.clone(), None, "given", String::new()));
            m.clone()
        }
        None => {
            let ex = intercept_exponents(sigma);
            let win = opts.window.unwrap_or_else(|| default_window(l1.len()).max(2 * ex.len() + 2)).min(l1.len());
            let x = extrapolate_exponents(&l1, &ex, win)?;
            let exs: Vec<String> = ex.iter().map(|e| e.to_string()).collect();
            rep.estimates.push(Estimate::new("mu", x.intercept.clone(), None, "linear intercepts with stretched corrections", format!("window {win}, exponents {}", exs.join(" "))));
            x.intercept
        }
    };

    let diag = stretch_diagnostics(s, Some(&mu), sigma, true, bits)?;
    for (name, seq) in [("sigma_gradient_log_ratio", &diag.sigma_gradient_log_ratio), ("sigma_gradient_log_diff", &diag.sigma_gradient_log_diff)] {
        if let Some(seq) = seq {
            let on = name == "sigma_gradient_log_ratio";
            match extrapolate_sigma(seq, sigma, on, opts.window) {
                Ok(x) => rep.estimates.push(Estimate::new(name, x.intercept, None, "gradient estimator at given mu, extrapolated", format!("window {}", x.window))),
                Err(e) => rep.diagnostics.push(format!("{name}: {e}")),
            }
            rep.plots.push(seq.clone());
        }
    }
    for (name, seq) in [("sigma_ratio_of_ratios", &diag.sigma_ratio_of_ratios), ("sigma_root_ratio", &diag.sigma_root_ratio)] {
        if let Some((n, v)) = seq.last() {
            rep.estimates.push(Estimate::new(name, v.clone(), None, "mu-free gradient estimator, last value", format!("n={n}")));
        }
        let mut p = seq.clone();
        p.label = name.into();
        rep.plots.push(p);
    }
    let mut sigma_log_mu1 = None;
    if let Some(m) = &diag.mu1 {
        rep.estimates.push(Estimate::new("sigma_log_mu1", m.sigma_log_mu1.clone(), None, "ratio tail (r/mu - 1) n^(1-sigma), multi-correction fit", format!("window {}", m.window)));
        rep.plots.push(m.seq.clone());
        sigma_log_mu1 = Some(m.sigma_log_mu1.clone());
    }

    let (trace, names, method) = if opts.mu.is_some() {
        (fit_log_coeffs_3pt(s, &mu, sigma, bits)?, ["log_mu1", "g", "log_C"], "3-parameter fit to log c_n at given mu, plateau")
    } else {
        let t = fit_log_coeffs_4pt(s, sigma, bits)?;
        // Drop the log μ column so the remaining three line up with the 3-point fit.
        let rows = t.rows.iter().map(|(n, p)| (*n, p[1..].to_vec())).collect();
        let t = FitTrace { params: t.params[1..].to_vec(), rows, ..t };
        (t, ["log_mu1", "g", "log_C"], "4-parameter fit to log c_n, plateau")
    };
    let mut vals = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let col = trace.column(i);
        let p = plateau(&col).ok_or_else(|| Error::Invalid("too few coefficients for the log fit".into()))?;
        rep.estimates.push(Estimate::new(name, p.1.clone(), None, method, format!("plateau at window ending n={}", p.0)));
        vals.push(p.1);
        rep.plots.push(col);
    }
    let mu1 = Float::with_val(bits, &vals[0]).exp();
    rep.estimates.push(Estimate::new("mu1", mu1.clone(), None, method, "exp(log_mu1)".into()));
    let amp = Float::with_val(bits, &vals[2]).exp();
    let mut model = AsymptoticModel::new(mu, Some(mu1), Some(sigma.clone()), vals[1].clone(), Some(amp))?;
    if let Some(slm) = sigma_log_mu1 {
        // Disagreement between the two μ₁ routes.
        let other = Float::with_val(bits, &slm / Float::with_val(bits, sigma));
        model.uncertainty.mu1 = Some(abs(&Float::with_val(bits, other.exp() - model.mu1.as_ref().unwrap())));
    }
    rep.model = Some(model);
    rep.plots.insert(0, r);
    if let Some(n) = s.tail_ratios().map(|_| s.last_index() + 1) {
        rep.diagnostics.push(format!("ratios from n={n} on are predicted"));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Integer;

    #[test]
    fn plateau_of_turning_trace() {
        let v: Vec<Float> = [5.0, 3.0, 2.0, 1.6, 1.5, 1.6, 2.0].iter().map(|x| Float::with_val(64, *x)).collect();
        let s = EstimatorSeq::from_floats("t", 1, v, Rational::from(1));
        assert_eq!(plateau(&s).unwrap().0, 5);
    }

    #[test]
    fn powerlaw_on_exact_family() {
        // cₙ = (n+1)·4ⁿ: μ = 4, g = 1.
        let c: Vec<Integer> = (0..60u32).map(|n| Integer::from(n + 1) * Integer::from(Integer::u_pow_u(4, n))).collect();
        let s = ExactSeries::from_integers("t", 0, c).unwrap();
        let rep = powerlaw_pipeline(&s, &PowerLawOptions::default(), 200).unwrap();
        let m = rep.model.as_ref().unwrap();
        assert!((m.mu.to_f64() - 4.0).abs() < 1e-6);
        assert!((m.g.to_f64() - 1.0).abs() < 1e-3);
        assert!((m.amplitude.as_ref().unwrap().to_f64() - 1.0).abs() < 1e-2);
        let j = rep.to_json(12);
        assert_eq!(j["mode"], "powerlaw");
        assert!(j["estimates"].as_array().unwrap().iter().all(|e| e["method"].is_string()));
    }

    #[test]
    fn intercept_correction_sets() {
        let h: Vec<String> = intercept_exponents(&Rational::from((1, 2))).iter().map(|e| e.to_string()).collect();
        assert_eq!(h, ["1/2", "1", "3/2"]);
        let t: Vec<String> = intercept_exponents(&Rational::from((1, 3))).iter().map(|e| e.to_string()).collect();
        assert_eq!(t, ["2/3", "1", "4/3"]);
    }
}
