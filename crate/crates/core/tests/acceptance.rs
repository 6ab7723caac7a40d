//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 10-15 need a UPSID-formatted corpus; point `PHONET_UPSID_CORPUS`
//! at one to run them, otherwise they are reported as SKIP.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ndarray::Array2;
use phonet_core::corpus::{consonant_frequencies, synthesize_corpus, FrequencyProfile, SynthConfig};
use phonet_core::netbuild::{build_bipartite, project_langgraph, project_phonet};
use phonet_core::nullmodel::{control_report, generate_replicate, NullModelConfig, PipelineParams};
use phonet_core::pipeline::{run_pipeline_on, RunConfig};
use phonet_core::rng::{choose_distinct, seeded, uniform_below, unit_f64};
use phonet_core::spectra::{
    eig_symmetric, eigvec_frequency_correlation, fit_power_law_tail, Spectrum, SpectrumEnd,
};
use phonet_core::typology::{
    classify_by_eigenvector, classify_languages, cross_prevalence, learn_tree,
    markedness_overlap, overlap_with_hierarchy, Example, Label, TreeNode,
};

use common::*;

type Outcome = Result<String, String>;

struct Suite {
    failed: Vec<usize>,
}

impl Suite {
    fn check(&mut self, n: usize, name: &str, f: impl FnOnce() -> Outcome) {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {n:>2} {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                println!("FAIL criterion {n:>2} {name}: {detail} ({secs:.2}s)");
                self.failed.push(n);
            }
        }
    }

    fn skip(&self, n: usize, name: &str, why: &str) {
        println!("SKIP criterion {n:>2} {name}: {why}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spectral_identities() -> Outcome {
    let mut rng = seeded(0xA11CE);
    let mut worst = [0.0f64; 4];
    for trial in 0..50 {
        let n = 1 + uniform_below(&mut rng, 100) as usize;
        let m = random_symmetric_int(&mut rng, n, 50);
        let frob = frobenius(&m);
        let s = eig_symmetric(m.view(), 1e-8).map_err(|e| format!("trial {trial}: {e}"))?;
        let trace: f64 = m.diag().sum();
        let sum: f64 = s.eigenvalues().iter().sum();
        let sq: f64 = s.eigenvalues().iter().map(|l| l * l).sum();
        let trace_err = (sum - trace).abs() / frob;
        let sq_err = (sq - frob * frob).abs() / (frob * frob);
        let v = s.eigenvectors();
        let mut resid = 0.0f64;
        for k in 0..n {
            let r = m.dot(&v.column(k)) - &v.column(k) * s.eigenvalue(k);
            resid = resid.max(r.dot(&r).sqrt() / frob);
        }
        let gram = v.t().dot(v) - Array2::<f64>::eye(n);
        let gram_err = gram.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for (w, e) in worst.iter_mut().zip([trace_err, sq_err, resid, gram_err]) {
            *w = w.max(e);
        }
        ensure(
            trace_err <= 1e-8 && sq_err <= 1e-8 && resid <= 1e-8 && gram_err <= 1e-8,
            || {
                format!(
                    "trial {trial} (n = {n}): trace {trace_err:.2e}, sum of squares {sq_err:.2e}, residual {resid:.2e}, Gram {gram_err:.2e}"
                )
            },
        )?;
    }
    Ok(format!(
        "50 matrices; worst trace {:.1e}, squares {:.1e}, residual {:.1e}, Gram {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn disconnected_edges() -> Outcome {
    let weights = [10.0, 8.0, 6.0, 4.0, 2.0];
    let n = 2 * weights.len();
    let mut m = Array2::zeros((n, n));
    for (k, &w) in weights.iter().enumerate() {
        m[[2 * k, 2 * k + 1]] = w;
        m[[2 * k + 1, 2 * k]] = w;
    }
    let s = eig_symmetric(m.view(), 1e-8).map_err(|e| e.to_string())?;
    let expected: [f64; 10] = [10.0, 8.0, 6.0, 4.0, 2.0, -2.0, -4.0, -6.0, -8.0, -10.0];
    for (k, (&got, &want)) in s.eigenvalues().iter().zip(&expected).enumerate() {
        ensure((got - want).abs() <= 1e-10, || format!("eigenvalue {k}: {got} vs {want}"))?;
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = s.eigenvector(0);
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut err = 0.0f64;
    for i in 0..n {
        let want = if i < 2 { h } else { 0.0 };
        err = err.max((sign * v[i] - want).abs());
    }
    ensure(err <= 1e-10, || format!("principal eigenvector off by {err:.2e}"))?;
    Ok(format!("eigenvalues exact to 1e-10, principal eigenvector error {err:.1e}"))
}

fn proportionate_cooccurrence() -> Outcome {
    let mut rng = seeded(0xF00D);
    let n = 50;
    let f: Vec<f64> = (0..n).map(|_| 1.0 + 99.0 * unit_f64(&mut rng)).collect();
    let c = 0.37;
    let mut x = Array2::from_shape_fn((n, n), |(i, j)| c * f[i] * f[j]);
    let s = eig_symmetric(x.view(), 1e-8).map_err(|e| e.to_string())?;
    let r_full = eigvec_frequency_correlation(&s, 0, &f).map_err(|e| e.to_string())?.r;
    let r_full_oracle = pearson_oracle(&s.eigenvector(0).to_vec(), &f).abs();
    ensure((r_full.abs() - 1.0).abs() <= 1e-10, || format!("full matrix r = {r_full}"))?;
    ensure((r_full_oracle - 1.0).abs() <= 1e-10, || format!("oracle r = {r_full_oracle}"))?;
    for i in 0..n {
        x[[i, i]] = 0.0;
    }
    let s = eig_symmetric(x.view(), 1e-8).map_err(|e| e.to_string())?;
    let r_zeroed = pearson_oracle(&s.eigenvector(0).to_vec(), &f).abs();
    ensure(r_zeroed >= 0.99, || format!("zero-diagonal r = {r_zeroed}"))?;
    Ok(format!("|r| = 1 - {:.1e}; zero diagonal |r| = {r_zeroed:.6}", 1.0 - r_full.abs()))
}

fn projection_oracle() -> Outcome {
    for seed in 0..100u64 {
        let corpus = random_corpus(seed, 30, 20, 4);
        let a = build_bipartite(&corpus);
        let phonet = project_phonet(&a);
        let lang = project_langgraph(&a);
        ensure(phonet.weights() == brute_phonet(&corpus), || {
            format!("corpus {seed}: PhoNet differs from the oracle")
        })?;
        ensure(lang.weights() == brute_langgraph(&corpus), || {
            format!("corpus {seed}: LangGraph differs from the oracle")
        })?;
        let upper: u64 = (0..phonet.order())
            .flat_map(|i| (i + 1..phonet.order()).map(move |j| (i, j)))
            .map(|(i, j)| phonet.weight(i, j))
            .sum();
        let pairs: u64 = corpus
            .languages()
            .iter()
            .map(|l| (l.size() * l.size().saturating_sub(1) / 2) as u64)
            .sum();
        ensure(upper == pairs, || format!("corpus {seed}: upper sum {upper} vs {pairs}"))?;
    }
    Ok("100 corpora match entry-exactly".into())
}

fn diagonal_spectrum(values: &[f64]) -> Spectrum<f64> {
    let m = Array2::from_diag(&ndarray::Array1::from(values.to_vec()));
    eig_symmetric(m.view(), 1e-8).expect("diagonal matrix decomposes")
}

fn power_law() -> Outcome {
    let (a_pos, a_neg) = (-1.33, -0.88);
    let k = 50;
    let mut values: Vec<f64> = (1..=k).map(|r| 500.0 * (r as f64).powf(a_pos)).collect();
    values.extend((1..=k).map(|r| -300.0 * (r as f64).powf(a_neg)));
    let s = diagonal_spectrum(&values);
    for (end, want) in [(SpectrumEnd::Positive, a_pos), (SpectrumEnd::Negative, a_neg)] {
        let fit = fit_power_law_tail(&s, end, k).map_err(|e| e.to_string())?;
        ensure((fit.exponent - want).abs() <= 1e-9 && (fit.r_squared - 1.0).abs() <= 1e-9, || {
            format!("{end}: exponent {} R^2 {}", fit.exponent, fit.r_squared)
        })?;
    }
    let mut hits = 0;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = seeded(1000 + seed);
        let noisy: Vec<f64> = (1..=k)
            .map(|r| 500.0 * (r as f64).powf(a_pos) * (1.0 + 0.01 * normal(&mut rng)))
            .collect();
        let fit = fit_power_law_tail(&diagonal_spectrum(&noisy), SpectrumEnd::Positive, k)
            .map_err(|e| e.to_string())?;
        let dev = (fit.exponent - a_pos).abs();
        worst = worst.max(dev);
        if dev <= 0.05 {
            hits += 1;
        }
    }
    ensure(hits >= 18, || format!("noisy fits within 0.05 in {hits}/20 seeds"))?;
    Ok(format!("exact fits to 1e-9; noisy {hits}/20 within 0.05 (worst {worst:.4})"))
}

fn decision_tree() -> Outcome {
    let mut rng = seeded(0x7EE);
    let n_features = 8;
    let rows: Vec<Vec<bool>> = (0..64)
        .map(|_| (0..n_features).map(|_| unit_f64(&mut rng) < 0.5).collect())
        .collect();
    let separable: Vec<Example> = rows
        .iter()
        .map(|f| Example::new(f.clone(), if f[3] { Label::Positive } else { Label::Negative }))
        .collect();
    let tree = learn_tree(&separable, 2).map_err(|e| e.to_string())?;
    ensure(tree.n_splits() == 1 && tree.training_errors() == 0, || {
        format!("separable: {} splits, {} errors", tree.n_splits(), tree.training_errors())
    })?;
    ensure(matches!(tree.root(), TreeNode::Split { feature: 3, .. }), || {
        "separable: root does not split on feature 3".into()
    })?;

    let shuffled: Vec<Example> = rows
        .iter()
        .map(|f| {
            let class = if unit_f64(&mut rng) < 0.5 { Label::Positive } else { Label::Negative };
            Example::new(f.clone(), class)
        })
        .collect();
    let n = shuffled.len();
    let pos = shuffled.iter().filter(|e| e.class == Label::Positive).count();
    let analytic = pos.min(n - pos) as f64 / n as f64;
    let stump = learn_tree(&shuffled, n).map_err(|e| e.to_string())?;
    ensure(stump.n_splits() == 0 && stump.training_error() == analytic, || {
        format!("forbidden splits: error {} vs analytic {analytic}", stump.training_error())
    })?;

    let grown = learn_tree(&shuffled, 2).map_err(|e| e.to_string())?;
    let replay = shuffled
        .iter()
        .filter(|e| grown.predict(&e.features) != e.class)
        .count();
    ensure(replay == grown.training_errors(), || {
        format!("replay {replay} vs reported {}", grown.training_errors())
    })?;
    Ok(format!(
        "one split on feature 3; stump error {analytic} exact; replay {replay}/{n} matches"
    ))
}

fn sorted_quadruple(q: [Option<f64>; 4]) -> Vec<Option<u64>> {
    let mut v: Vec<Option<u64>> = q.iter().map(|x| x.map(f64::to_bits)).collect();
    v.sort();
    v
}

fn experiment_machinery() -> Outcome {
    let corpus = synthesize_corpus(&SynthConfig::new(25, 40, 6, FrequencyProfile::Uniform, 31))
        .map_err(|e| e.to_string())?;
    let a = build_bipartite(&corpus);
    let phonet = project_phonet(&a);
    let lang = project_langgraph(&a);
    let freq = consonant_frequencies(&corpus);
    let s = eig_symmetric(phonet.to_float::<f64>().view(), 1e-8).map_err(|e| e.to_string())?;
    let sl = eig_symmetric(lang.to_float::<f64>().view(), 1e-8).map_err(|e| e.to_string())?;
    let (sf, slf) = (s.flipped(), sl.flipped());
    for idx in [1, 2] {
        let c = classify_by_eigenvector(&s, idx, &freq, 5, 0.15).map_err(|e| e.to_string())?;
        let cf = classify_by_eigenvector(&sf, idx, &freq, 5, 0.15).map_err(|e| e.to_string())?;
        let l = classify_languages(&sl, idx).map_err(|e| e.to_string())?;
        let lf = classify_languages(&slf, idx).map_err(|e| e.to_string())?;
        let swapped = |x: &[Label]| x.iter().map(|l| l.opposite()).collect::<Vec<_>>();
        ensure(cf.labels == swapped(&c.labels) && lf.labels == swapped(&l.labels), || {
            format!("eigenvector {}: flipped labels are not swapped", idx + 1)
        })?;
        let t = cross_prevalence(&corpus, &l, &c).map_err(|e| e.to_string())?;
        let tf = cross_prevalence(&corpus, &lf, &cf).map_err(|e| e.to_string())?;
        ensure(tf == t.swapped(), || format!("eigenvector {}: table not swapped", idx + 1))?;
        ensure(sorted_quadruple(t.quadruple()) == sorted_quadruple(tf.quadruple()), || {
            format!("eigenvector {}: quadruple multiset changed", idx + 1)
        })?;
    }

    // l0 = {c0, c2}, l1 = {c0, c1, c3}; L+ = {l0, l1}, C+ = {c0, c1}.
    let hand = corpus_from_membership(
        &vec![vec![false]; 4],
        &[
            vec![true, false, true, false],
            vec![true, true, false, true],
            vec![false, false, true, true],
        ],
        false,
    );
    let lang_labels = phonet_core::typology::classify_by_sign(&[1.0, 1.0, -1.0], 1)
        .map_err(|e| e.to_string())?;
    let cons_labels = phonet_core::typology::classify_by_sign(&[1.0, 1.0, -1.0, -1.0], 1)
        .map_err(|e| e.to_string())?;
    let cell = cross_prevalence(&hand, &lang_labels, &cons_labels)
        .map_err(|e| e.to_string())?
        .value(Label::Positive, Label::Positive)
        .map_err(|e| e.to_string())?;
    ensure(cell == Some(0.75), || format!("hand corpus cell {cell:?}"))?;

    // Nested prefix inventories: the principal eigenvector orders consonants
    // by membership, so each inventory is its own hierarchy prefix.
    let n = 12;
    let member: Vec<Vec<bool>> = (1..=n).map(|s| (0..n).map(|c| c < s).collect()).collect();
    let nested = corpus_from_membership(&vec![vec![true]; n], &member, false);
    let ps = eig_symmetric(
        project_phonet(&build_bipartite(&nested)).to_float::<f64>().view(),
        1e-8,
    )
    .map_err(|e| e.to_string())?;
    let ps = if ps.eigenvector(0).sum() < 0.0 { ps.flipped() } else { ps };
    let prefix = markedness_overlap(&nested, &ps).map_err(|e| e.to_string())?.mean_overlap;
    ensure(prefix == 1.0, || format!("prefix inventories mean overlap {prefix}"))?;

    // Hypergeometric: a fixed hierarchy against uniformly drawn inventories.
    let (n, size, n_lang) = (60usize, 6usize, 4000usize);
    let mut rng = seeded(0x4E5);
    let mut scratch = Vec::new();
    let member: Vec<Vec<bool>> = (0..n_lang)
        .map(|_| {
            let chosen = choose_distinct(&mut rng, n, size, &mut scratch);
            (0..n).map(|c| chosen.binary_search(&c).is_ok()).collect()
        })
        .collect();
    let random = corpus_from_membership(&vec![vec![true]; n], &member, true);
    let report = overlap_with_hierarchy(&random, (0..n).collect());
    let (nf, sf) = (n as f64, size as f64);
    let expect = sf / nf;
    let var_hits = sf * (sf / nf) * ((nf - sf) / nf) * ((nf - sf) / (nf - 1.0));
    let se = (var_hits.sqrt() / sf) / (n_lang as f64).sqrt();
    let z = (report.mean_overlap - expect) / se;
    ensure(z.abs() <= 3.0, || {
        format!("random overlap {} vs s/n {expect} ({z:.2} SE)", report.mean_overlap)
    })?;
    Ok(format!(
        "flip equivariance exact; hand cell 0.75; prefix overlap 1; random overlap {:.4} vs {expect:.4} ({z:+.2} SE)",
        report.mean_overlap
    ))
}

/// Hypergeometric standard deviation of `|S_i ∩ S_j|` for independent uniform
/// subsets of sizes `fi`, `fj` out of `l`.
fn overlap_sd(fi: f64, fj: f64, l: f64) -> f64 {
    if l <= 1.0 {
        return 0.0;
    }
    (fj * (fi / l) * ((l - fi) / l) * ((l - fj) / (l - 1.0))).sqrt()
}

fn null_model() -> Outcome {
    let (n_lang, n_cons, n_rep) = (20usize, 30usize, 100usize);
    let base = synthesize_corpus(&SynthConfig::new(n_lang, n_cons, 8, FrequencyProfile::Uniform, 2024))
        .map_err(|e| e.to_string())?;
    let config = NullModelConfig::from_corpus(&base, 2024, n_rep);
    let f = config.source_frequencies.clone();
    let mut sum = Array2::<f64>::zeros((n_cons, n_cons));
    for r in 0..n_rep {
        let corpus = generate_replicate(&config, base.catalog(), base.consonants(), r)
            .map_err(|e| e.to_string())?;
        ensure(consonant_frequencies(&corpus) == f, || {
            format!("replicate {r} changed the frequencies")
        })?;
        sum += &project_phonet(&build_bipartite(&corpus)).to_float::<f64>();
    }
    let mean = sum / n_rep as f64;
    let mut outside = Vec::new();
    let mut pairs = 0;
    let mut worst_z = 0.0f64;
    for i in 0..n_cons {
        for j in i + 1..n_cons {
            pairs += 1;
            let (fi, fj, l) = (f[i] as f64, f[j] as f64, n_lang as f64);
            let expect = fi * fj / l;
            let se = overlap_sd(fi, fj, l) / (n_rep as f64).sqrt();
            let dev = (mean[[i, j]] - expect).abs();
            let z = if se > 0.0 { dev / se } else if dev == 0.0 { 0.0 } else { f64::INFINITY };
            worst_z = worst_z.max(z);
            if z > 3.0 {
                outside.push((i, j, z));
            }
        }
    }

    let report = control_report(&config, &base, &PipelineParams::default()).map_err(|e| e.to_string())?;
    let min_r = report
        .replicates
        .iter()
        .map(|r| r.principal_correlation)
        .fold(f64::INFINITY, f64::min);
    let mut high_error = BTreeMap::new();
    for idx in [1usize, 2] {
        let count = report
            .replicates
            .iter()
            .filter(|r| {
                r.eigvecs
                    .iter()
                    .find(|e| e.index == idx)
                    .and_then(|e| e.tree_error)
                    .is_some_and(|err| err >= 0.30)
            })
            .count();
        high_error.insert(idx + 1, count);
    }
    let detail = format!(
        "frequencies exact on {n_rep} replicates; {}/{pairs} pairs beyond 3 SE (worst {worst_z:.2}, {:.1} expected by chance); min r {min_r:.4}; tree error >= 0.30 in {}/{n_rep} (eig 2) and {}/{n_rep} (eig 3) replicates",
        outside.len(),
        pairs as f64 * 0.0027,
        high_error[&2],
        high_error[&3]
    );
    let ok = outside.is_empty()
        && min_r >= 0.95
        && high_error.values().all(|&c| c * 10 >= n_rep * 8);
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn read_bundle(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let corpus = synthesize_corpus(&SynthConfig::new(10, 30, 6, FrequencyProfile::Uniform, 9))
        .map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bundles = Vec::new();
    for run in ["a", "b"] {
        let cfg = RunConfig {
            output_dir: tmp.path().join(run),
            seed: 17,
            ..RunConfig::default()
        };
        run_pipeline_on(&corpus, &cfg).map_err(|e| e.to_string())?;
        bundles.push(read_bundle(&cfg.output_dir));
    }
    ensure(bundles[0] == bundles[1], || "bundles differ".into())?;
    Ok(format!("{} artifacts byte-identical", bundles[0].len()))
}

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<String, String> {
    let line = format!("{name} {got:.4} (target {want} ± {tol})");
    if (got - want).abs() <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn collect(parts: Vec<Result<String, String>>) -> Outcome {
    let ok = parts.iter().all(|p| p.is_ok());
    let text = parts
        .into_iter()
        .map(|p| p.unwrap_or_else(|e| format!("[{e}]")))
        .collect::<Vec<_>>()
        .join("; ");
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn upsid_suite(suite: &mut Suite, path: &Path) {
    let corpus = match phonet_core::load_corpus(path) {
        Ok(c) => c,
        Err(e) => {
            for n in 10..=15 {
                suite.check(n, "UPSID reproduction", || Err(format!("cannot load corpus: {e}")));
            }
            return;
        }
    };
    let tmp = tempfile::tempdir().expect("temp dir");
    let cfg = RunConfig {
        output_dir: tmp.path().join("upsid"),
        ..RunConfig::default()
    };
    let summary = match run_pipeline_on(&corpus, &cfg) {
        Ok(s) => s,
        Err(e) => {
            for n in 10..=15 {
                suite.check(n, "UPSID reproduction", || Err(format!("pipeline failed: {e}")));
            }
            return;
        }
    };
    suite.check(10, "graph census", || {
        let got = (
            summary.n_languages,
            summary.n_consonants,
            summary.bipartite_edges,
            summary.phonet_edges,
        );
        let detail = format!("languages, consonants, edges, PhoNet edges = {got:?}");
        if got == (317, 541, 7022, 30412) {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
    suite.check(11, "Frobenius fractions", || {
        let f = &summary.phonet.frobenius_fractions;
        collect(
            [0.89, 0.92, 0.93]
                .iter()
                .enumerate()
                .map(|(k, &want)| within(&format!("k={}", k + 1), f[k], want, 0.01))
                .collect(),
        )
    });
    suite.check(12, "principal eigenvector vs frequency", || {
        let r = summary.principal_correlation().ok_or("correlation unavailable")?;
        within("r", r, 0.99, 0.01)
    });
    suite.check(13, "power-law exponents", || {
        let mut parts = Vec::new();
        for (end, want, r2) in [(SpectrumEnd::Positive, -1.33, 0.95), (SpectrumEnd::Negative, -0.88, 0.88)] {
            match summary.fit(end) {
                Some(fit) => {
                    parts.push(within(&format!("{end} exponent"), fit.exponent, want, 0.07));
                    let line = format!("{end} R^2 {:.4} (>= {r2})", fit.r_squared);
                    parts.push(if fit.r_squared >= r2 { Ok(line) } else { Err(line) });
                }
                None => parts.push(Err(format!("{end} fit unavailable"))),
            }
        }
        collect(parts)
    });
    suite.check(14, "cross-prevalence quadruples", || {
        let targets = [(2usize, [0.35, 0.08, 0.07, 0.32]), (3, [0.34, 0.06, 0.19, 0.18])];
        let mut parts = Vec::new();
        for (k, want) in targets {
            let q = summary
                .experiment(k)
                .and_then(|e| e.cross_prevalence)
                .map(|t| t.quadruple());
            let Some(q) = q else {
                parts.push(Err(format!("eigenvector {k}: no table")));
                continue;
            };
            let got: Vec<f64> = q.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
            let close = |g: &[f64]| g.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 0.02);
            let reversed: Vec<f64> = got.iter().rev().copied().collect();
            let line = format!("eigenvector {k}: {:.3?} vs {want:?}", got);
            parts.push(if close(&got) || close(&reversed) { Ok(line) } else { Err(line) });
        }
        collect(parts)
    });
    suite.check(15, "tree errors and markedness", || {
        let mut parts = Vec::new();
        for k in [2, 3] {
            match summary.experiment(k).map(|e| e.tree_error.clone()) {
                Some(Ok(err)) => {
                    let line = format!("eigenvector {k} tree error {err:.4} (< 0.15)");
                    parts.push(if err < 0.15 { Ok(line) } else { Err(line) });
                }
                _ => parts.push(Err(format!("eigenvector {k}: no tree"))),
            }
        }
        let m = summary.markedness_mean;
        let line = format!("markedness mean overlap {m:.4} (> 0.5)");
        parts.push(if m > 0.5 { Ok(line) } else { Err(line) });
        collect(parts)
    });
}

fn main() -> ExitCode {
    let mut suite = Suite { failed: Vec::new() };
    suite.check(1, "spectral identities", spectral_identities);
    suite.check(2, "disconnected-edge fixture", disconnected_edges);
    suite.check(3, "proportionate co-occurrence fixture", proportionate_cooccurrence);
    suite.check(4, "projection oracle", projection_oracle);
    suite.check(5, "power-law fit", power_law);
    suite.check(6, "decision tree", decision_tree);
    suite.check(7, "experiment machinery", experiment_machinery);
    suite.check(8, "null model", null_model);
    suite.check(9, "determinism", determinism);

    match std::env::var_os("PHONET_UPSID_CORPUS") {
        Some(path) => upsid_suite(&mut suite, Path::new(&path)),
        None => {
            for (n, name) in [
                (10, "graph census"),
                (11, "Frobenius fractions"),
                (12, "principal eigenvector vs frequency"),
                (13, "power-law exponents"),
                (14, "cross-prevalence quadruples"),
                (15, "tree errors and markedness"),
            ] {
                suite.skip(n, name, "set PHONET_UPSID_CORPUS to a UPSID-formatted corpus");
            }
        }
    }

    if suite.failed.is_empty() {
        println!("acceptance: all runnable criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {:?}", suite.failed);
        ExitCode::FAILURE
    }
}
