//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs without the libtest harness so the lines always print. The process
//! fails if any criterion fails, except criteria listed in `BLOCKED`, which
//! cannot pass without data this repository does not have; those still
//! print FAIL.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use papseries::analysis::{extend_default, powerlaw_pipeline, stretched_pipeline, AnalysisReport, PowerLawOptions, StretchedOptions};
use papseries::da::{default_grid, extend_series, EnsembleOptions};
use papseries::dyck::{dyck_counts, dyck_series, dyck_truth};
use papseries::fit::fit_log_coeffs_3pt;
use papseries::numeric::Precision;
use papseries::perm::{classify_wilf, count_avoiders, PatternSet, Permutation};
use papseries::ratio::intercepts;
use papseries::series::{ingest_bfile, ratios, Dataset, ExactSeries};
use papseries::stieltjes::{bound_report, hankel_check, sfraction_full};
use papseries::stretched::{extrapolate_sigma, mu1_estimate, sigma_known_mu, KnownMuMethod};
use rug::{Float, Integer, Rational};

const A047889: &str = include_str!("data/b047889.txt");

/// Criterion 4 for Av(31245) needs at least 39 terms of A116485; only the
/// 28 printed terms are embedded.
const BLOCKED: &[u32] = &[4];

fn bits() -> u32 {
    Precision::digits(100).bits()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn pattern(w: &str) -> PatternSet {
    PatternSet::single(w.parse::<Permutation>().unwrap())
}

fn catalan(n: usize) -> Vec<Integer> {
    let mut c = vec![Integer::from(1)];
    for k in 1..=n {
        c.push(Integer::from(&c[k - 1] * (4 * k as u64 - 2)) / (k as u64 + 1));
    }
    c
}

fn estimate(rep: &AnalysisReport, name: &str) -> f64 {
    rep.estimate(name).unwrap_or_else(|| panic!("no estimate {name}")).value.to_f64()
}

/// |got − want| within half a unit in the 4th significant figure of `want`.
fn four_figures(got: f64, want: f64) -> bool {
    (got - want).abs() <= 0.5 * 10f64.powi(want.abs().log10().floor() as i32 - 3)
}

fn c1() -> Outcome {
    let t = Instant::now();
    let mut bad = Vec::new();
    for (info, s) in Dataset.classes().iter().zip(Dataset.all()) {
        let got = single_threaded(|| count_avoiders(&pattern(info.pattern), 10));
        let want: Vec<Integer> = s.integer_coeffs().unwrap().into_iter().take(11).collect();
        if got.counts != want {
            bad.push(info.name.clone());
        }
    }
    let el = t.elapsed();
    outcome(bad.is_empty() && el < Duration::from_secs(300), format!("16 classes, n<=10, mismatches {bad:?}, {el:.1?} single-threaded"))
}

fn c2() -> Outcome {
    let t = Instant::now();
    let classes = classify_wilf(5, 9);
    let el = t.elapsed();
    let got: BTreeSet<BTreeSet<String>> =
        classes.iter().map(|c| c.patterns.iter().map(|p| p.to_string()).collect()).collect();
    let want: BTreeSet<BTreeSet<String>> =
        Dataset.classes().iter().map(|c| c.members.iter().map(|m| m.to_string()).collect()).collect();
    let sizes: Vec<usize> = classes.iter().map(|c| c.patterns.len()).collect();
    outcome(
        got == want && classes.len() == 16 && el < Duration::from_secs(600),
        format!("{} classes, sizes {sizes:?}, memberships {}, {el:.1?}", classes.len(), if got == want { "identical" } else { "differ" }),
    )
}

fn c3() -> Outcome {
    let cat = catalan(12);
    let counts_ok = Permutation::all(3).into_iter().all(|t| count_avoiders(&PatternSet::single(t), 12).counts == cat);
    let s = ExactSeries::from_integers("catalan", 0, catalan(30)).unwrap();
    let cf = sfraction_full(&s).unwrap();
    let alphas_ok = cf.alphas.iter().all(|a| *a == 1);
    let b = bound_report(&s, true, bits()).unwrap();
    let bound_ok = b.bound == 4 && b.hhr_bounds.iter().all(|(_, v)| *v == 4);
    outcome(
        counts_ok && alphas_ok && bound_ok,
        format!("S3 counts {counts_ok}, alpha==1 to depth {} {alphas_ok}, bound {}", cf.depth(), b.bound.to_f64()),
    )
}

/// (class, prefix for the continued-fraction bound, its printed value,
/// prefix for the log-convex bound, its printed value). The continued-fraction
/// value is the last bₙ at that prefix.
const BOUNDS: [(&str, usize, f64, usize, f64); 16] = [
    ("25314", 26, 12.4622, 26, 10.8809),
    ("31524", 26, 12.6417, 26, 11.0042),
    ("35214", 27, 13.1159, 27, 11.2336),
    ("43251", 27, 13.5111, 27, 11.4821),
    ("34215", 27, 13.7131, 27, 11.6002),
    ("12345", 102, 15.9395, 102, 14.8735),
    ("53124", 26, 13.5836, 26, 11.3441),
    ("32541", 27, 13.8447, 27, 11.5813),
    ("35124", 27, 13.7433, 27, 11.4025),
    ("31245", 39, 14.3792, 39, 12.5274),
    ("42351", 28, 14.0314, 28, 11.5749),
    ("42315", 27, 14.5633, 27, 11.8117),
    ("35241", 27, 14.6253, 27, 11.6779),
    ("53241", 26, 15.4445, 27, 11.9590),
    ("53421", 27, 16.3053, 27, 12.4079),
    ("52341", 24, 17.2302, 24, 12.1992),
];

fn c4() -> Outcome {
    let fixture = ingest_bfile(A047889, "A047889").unwrap();
    let mut failures = Vec::new();
    for (class, st_len, st, lc_len, lc) in BOUNDS {
        let s = if class == "12345" { fixture.clone() } else { Dataset.get(class).unwrap() };
        if s.len() < st_len.max(lc_len) {
            failures.push(format!("{class}: {} terms available, {} needed", s.len(), st_len.max(lc_len)));
            continue;
        }
        let b = bound_report(&s.prefix(st_len).unwrap(), false, bits()).unwrap();
        let last = b.hhr_bounds.last().unwrap().1.to_f64();
        if !four_figures(last, st) {
            failures.push(format!("{class}: St {last:.5} vs {st}"));
        }
        let l = bound_report(&s.prefix(lc_len).unwrap(), false, bits()).unwrap().logconvex_bound.unwrap().1.to_f64();
        if (l / lc - 1.0).abs() > 1e-3 {
            failures.push(format!("{class}: l-c {l:.5} vs {lc}"));
        }
    }
    outcome(failures.is_empty(), format!("{}/16 classes match; {}", 16 - failures.len(), failures.join("; ")))
}

fn c5() -> Outcome {
    let mut series = Dataset.all();
    series.push(ingest_bfile(A047889, "A047889").unwrap());
    let mut bad = Vec::new();
    let mut minors = 0;
    for s in &series {
        let h = hankel_check(s);
        minors += h.h0.len() + h.h1.len();
        if !h.all_positive() {
            bad.push(format!("{} at {:?}", s.name, h.first_nonpositive));
        }
    }
    outcome(bad.is_empty(), format!("{} series, {minors} leading minors, non-positive: {bad:?}", series.len()))
}

/// Ratios r18..r39 of Av(12453) as printed.
const ACTUAL_12453: [f64; 22] = [
    10.46393544, 10.65465504, 10.82822539, 10.98685140, 11.13238007, 11.26636895, 11.39013998, 11.50482182,
    11.61138359, 11.71066190, 11.80338255, 11.89017822, 11.97160282, 12.04814337, 12.12022972, 12.18824275,
    12.25252103, 12.31336663, 12.37104982, 12.42581319, 12.47787509, 12.52743256,
];

fn c6() -> Outcome {
    let t = Instant::now();
    let full = Dataset.get("12453").unwrap();
    let s = full.prefix(17).unwrap();
    // r_k = c_{k-1}/c_{k-2}: predicting r18..r39 means c17..c38.
    let grid = default_grid(s.len(), &[3], -1..=2, 2);
    let e = extend_series(&s, &grid, &EnsembleOptions::new(22, bits())).unwrap();
    let el = t.elapsed();
    let exact = ratios(&full, bits()).unwrap();
    let mut digits = Vec::new();
    let mut worst_cover = 0f64;
    let mut printed_vs_exact = 0f64;
    for (i, r) in e.ratios.iter().enumerate() {
        let actual = ACTUAL_12453[i];
        if let Some(x) = exact.get(17 + i as u64) {
            printed_vs_exact = printed_vs_exact.max((x.to_f64() - actual).abs());
        }
        let err = (r.mean.to_f64() - actual).abs();
        digits.push(-(err / actual).log10());
        worst_cover = worst_cover.max(err / r.std.to_f64());
    }
    // Least-squares slope of correct digits against index.
    let n = digits.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = digits.iter().sum::<f64>() / n;
    let slope = digits.iter().enumerate().map(|(i, d)| (i as f64 - mx) * (d - my)).sum::<f64>()
        / digits.iter().enumerate().map(|(i, _)| (i as f64 - mx).powi(2)).sum::<f64>();
    let (first, last) = (digits[0], *digits.last().unwrap());
    let pass = e.ratios.len() == 22
        && first >= 8.0
        && last >= 4.0
        && slope < 0.0
        && worst_cover <= 10.0
        && printed_vs_exact < 1e-8
        && el < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "{} of {} approximants kept; r18 {first:.1} digits, r39 {last:.1} digits, slope {slope:.2}/term, max error/std {worst_cover:.1}, {el:.1?}",
            e.accepted().count(),
            e.members.len()
        ),
    )
}

fn c7_c8() -> (Outcome, Outcome) {
    let bits = bits();
    let fixture = ingest_bfile(A047889, "A047889").unwrap();
    let s = fixture.prefix(26).unwrap();
    let (x, e) = extend_default(&s, 75, &EnsembleOptions::new(75, bits)).unwrap();
    let rep = powerlaw_pipeline(&x, &PowerLawOptions { g_fixed: Some(Float::with_val(bits, -7.5)), ..Default::default() }, bits).unwrap();
    let (mu2, mu3) = (estimate(&rep, "mu"), estimate(&rep, "mu_cubic"));
    let mug = estimate(&rep, "mu_g");
    let c = estimate(&rep, "amplitude");
    let tr = rep.ratio_fit.as_ref().unwrap();
    // The paper's r_100 is c_99/c_98, index 99 here.
    let r100 = tr.evaluate_ratio(&tr.last().unwrap().1, 99).unwrap().to_f64();
    let inside = |v: f64, lo: f64, hi: f64| (lo..=hi).contains(&v);
    let a = inside(mu2, 15.995, 16.005) && inside(mu3, 15.995, 16.005);
    let b = inside(mug, -122.0, -118.0);
    let cc = inside(c, 270.0, 281.0);
    let d = (r100 - 14.852).abs() <= 0.001;
    let c7 = outcome(
        a && b && cc && d,
        format!("(a) mu {mu2:.6}/{mu3:.6} {a}, (b) mu*g {mug:.2} {b}, (c) C {c:.2} {cc}, (d) r100 {r100:.7} {d}"),
    );
    let zc = e.critical_point.as_ref().unwrap();
    let dz = (zc.mean.to_f64() - 0.0625).abs();
    let c8 = outcome(dz <= 1e-4, format!("z_c {:.10} +- {:.1e} from {} approximants, |z_c - 1/16| {dz:.1e}", zc.mean.to_f64(), zc.std.to_f64(), zc.members));
    (c7, c8)
}

/// Coefficients exp(n log μ + n^σ log μ₁ + g log n), n = 1..=len, rounded to rationals.
fn synthetic(mu: f64, log_mu1: f64, sigma: &Rational, g: f64, len: u64, bits: u32) -> ExactSeries {
    let lmu = Float::with_val(bits, mu).ln();
    let s = Float::with_val(bits, sigma);
    let v: Vec<Rational> = (1..=len)
        .map(|n| {
            let nf = Float::with_val(bits, n);
            let ns = rug::ops::Pow::pow(nf.clone(), &s);
            let e = Float::with_val(bits, &lmu * &nf) + ns * log_mu1 + nf.ln() * g;
            e.exp().to_rational().unwrap()
        })
        .collect();
    ExactSeries::new("synthetic", 1, v).unwrap()
}

fn c9() -> Outcome {
    let t = Instant::now();
    let bits = 400;
    let mut worst = (0f64, 0f64, 0f64);
    let mut failures = 0;
    for sig in [(1, 4), (1, 3), (1, 2)] {
        let sigma = Rational::from(sig);
        let sf = sigma.to_f64();
        for mu in [4.0, 12.0] {
            for lm1 in [-1.0, -3.0] {
                for g in [-1.0, -4.0] {
                    let s = synthetic(mu, lm1, &sigma, g, 500, bits);
                    let r = ratios(&s, bits).unwrap();
                    let muf = Float::with_val(bits, mu);
                    let l = intercepts(&r, 1).unwrap();
                    let mut ds = 0f64;
                    for m in [KnownMuMethod::GradientLogRatio, KnownMuMethod::GradientLogDiff] {
                        let seq = sigma_known_mu(&l, &muf, m).unwrap();
                        let x = extrapolate_sigma(&seq, &sigma, true, None).unwrap();
                        ds = ds.max((x.intercept.to_f64() - sf).abs());
                    }
                    let m1 = mu1_estimate(&r, &muf, &sigma, 3, None).unwrap();
                    let dm = (m1.mu1.to_f64() / lm1.exp() - 1.0).abs();
                    let fit = fit_log_coeffs_3pt(&s, &muf, &sigma, bits).unwrap();
                    let dg = (fit.last().unwrap().1[1].to_f64() - g).abs();
                    if ds > 0.05 || dm > 0.02 || dg > 0.1 {
                        failures += 1;
                    }
                    worst = (worst.0.max(ds), worst.1.max(dm), worst.2.max(dg));
                }
            }
        }
    }
    let el = t.elapsed();
    outcome(
        failures == 0 && el < Duration::from_secs(120),
        format!(
            "24 sequences, {failures} out of tolerance; worst |dsigma| {:.4}, mu1 rel {:.2e}, |dg| {:.4}; {el:.1?}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn c10() -> Outcome {
    let bits = bits();
    let y = Rational::from((1, 2));
    let rows_ok = dyck_counts(15).iter().zip(catalan(15)).all(|(row, c)| row.iter().fold(Integer::new(), |a, b| a + b) == c);
    let s = dyck_series(&y, 400).unwrap();
    let rep = stretched_pipeline(&s, &Rational::from((1, 3)), &StretchedOptions::default(), bits).unwrap();
    let truth = dyck_truth(&y, bits).unwrap();
    let want = truth.mu1.unwrap().ln().to_f64() / 3.0;
    let mu = estimate(&rep, "mu");
    let sigma = estimate(&rep, "sigma_gradient_log_ratio");
    let slm = estimate(&rep, "sigma_log_mu1");
    let pass = rows_ok && (mu - 4.0).abs() <= 0.01 && (sigma - 1.0 / 3.0).abs() <= 0.05 && (slm / want - 1.0).abs() <= 0.05;
    outcome(
        pass,
        format!("row sums {rows_ok}, mu {mu:.6}, sigma {sigma:.4}, sigma*log mu1 {slm:.5} vs {want:.5} ({:.2}%)", 100.0 * (slm / want - 1.0).abs()),
    )
}

fn c11() -> Outcome {
    let bits = bits();
    let s = Dataset.get("25314").unwrap();
    let (x, _) = extend_default(&s, 100, &EnsembleOptions::new(100, bits)).unwrap();
    let rep = powerlaw_pipeline(&x, &PowerLawOptions::default(), bits).unwrap();
    let (mu, g) = (estimate(&rep, "mu"), estimate(&rep, "g"));
    let a = (mu - 12.567).abs() <= 0.002 && (g + 3.214).abs() <= 0.02;

    let s = Dataset.get("53421").unwrap();
    let (x, _) = extend_default(&s, 200, &EnsembleOptions::new(200, bits)).unwrap();
    // Only the predicted ratios are used; coefficients follow by chaining.
    let x = x.clone().with_tail(None, x.tail_ratios().map(|t| t.to_vec())).unwrap();
    let opts = StretchedOptions { mu: Some(Float::with_val(bits, 19.4092)), window: None };
    let rep = stretched_pipeline(&x, &Rational::from((1, 2)), &opts, bits).unwrap();
    let lm1 = estimate(&rep, "log_mu1");
    let b = (lm1 + 3.13).abs() <= 0.1;
    outcome(a && b, format!("Av(25314) 27+100: mu {mu:.5}, g {g:.4} {a}; Av(53421) 27+200: log mu1 {lm1:.4} {b}"))
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "enumeration exactness", c1()),
        (2, "Wilf classification", c2()),
        (3, "Catalan baselines", c3()),
        (4, "Stieltjes bounds", c4()),
        (5, "Hankel positivity", c5()),
        (6, "series extension oracle", c6()),
    ];
    let (c7, c8) = c7_c8();
    results.push((7, "Av(12345) pipeline", c7));
    results.push((8, "DA singularity accuracy", c8));
    results.push((9, "stretched-exponential recovery", c9()));
    results.push((10, "Dyck end-to-end", c10()));
    results.push((11, "spot checks", c11()));
    let mut unexpected = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && BLOCKED.contains(id) { " [input data unavailable]" } else { "" };
        println!("criterion {id:>2} {tag} {name}: {}{note}", o.detail);
        if !o.pass && !BLOCKED.contains(id) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
