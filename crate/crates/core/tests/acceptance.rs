//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Run with `cargo test -p surprise-core --test acceptance`.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surprise_core::electorate::{build_electorate, Class, Electorate};
use surprise_core::harness::config::Config;
use surprise_core::harness::output::write_csv;
use surprise_core::harness::{run_sweep, SweepResult};
use surprise_core::media::{build_prior, MediaPrior, MediaSpec};
use surprise_core::netgen::{sample_counts_homogeneous, BlockProbs, NetworkSampler, Backend};
use surprise_core::perception::{predict, predict_linear, surprise_fractions};
use surprise_core::stats::{chi_square_two_sample, mean_se, spearman};
use surprise_core::theory::{
    classify_regime, corollary_range, exact_expectation, minority_threshold, Outlook, RegimeParams, Side,
};

/// Fixed once for the whole suite.
const SEED: u64 = 0x5eed_2016;

struct Outcome {
    pass: bool,
    detail: String,
}

fn trials(e: &Electorate, bp: BlockProbs, prior: &MediaPrior, n: u64, seed: u64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|t| {
            let counts = sample_counts_homogeneous(e, bp, surprise_core::seeds::derive(seed, t));
            let f = surprise_fractions(e, &counts, prior);
            (f.majority, f.minority)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let e = build_electorate(5200, 4800).unwrap();
    let media = MediaSpec::influential(0.5, 0.0);
    let rp = RegimeParams::for_electorate(&e, 0.2, 0.18, media);
    let in_range = corollary_range(&rp).is_some_and(|(lo, hi)| lo < 0.2 && 0.2 < hi);
    let prior = build_prior(&media, &e).unwrap();
    let results = trials(&e, BlockProbs::new(0.2, 0.18).unwrap(), &prior, 100, SEED);
    let dirty: Vec<usize> = (0..results.len())
        .filter(|&t| results[t] != (0.0, 0.0))
        .collect();
    let surprised: f64 = results.iter().map(|(a, b)| a * 5200.0 + b * 4800.0).sum();
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: in_range && dirty.is_empty() && secs < 5.0,
        detail: format!(
            "p in range: {in_range}; trials with surprise: {} of 100; surprised voters total: {surprised:.0}; {secs:.2}s",
            dirty.len()
        ),
    }
}

fn criterion_2() -> Outcome {
    let e = build_electorate(5200, 4800).unwrap();
    let media = MediaSpec::influential(0.01, 0.0);
    let threshold = minority_threshold(&RegimeParams::for_electorate(&e, 0.3, 0.1, media));
    let prior = build_prior(&media, &e).unwrap();
    let results = trials(&e, BlockProbs::new(0.3, 0.1).unwrap(), &prior, 100, SEED);
    let exact = results.iter().filter(|&&r| r == (0.0, 1.0)).count();
    Outcome {
        pass: (threshold - 0.1092).abs() < 5e-5 && 0.3 > threshold && exact == 100,
        detail: format!("minority threshold {threshold:.4}; trials with (0.0, 1.0): {exact} of 100"),
    }
}

fn criterion_3() -> Outcome {
    let e = build_electorate(5200, 4800).unwrap();
    let bp = BlockProbs::new(0.15, 0.1).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for delta in [-0.1, 0.0, 0.1] {
        let media = MediaSpec::uninfluential(1.0, 0.5, delta);
        let prior = build_prior(&media, &e).unwrap();
        let verdict = classify_regime(&RegimeParams::for_electorate(&e, 0.15, 0.1, media));
        let results = trials(&e, bp, &prior, 100, SEED);
        let exact = results.iter().filter(|&&r| r == (0.0, 1.0)).count();
        let flagged = verdict.majority_prediction == Outlook::NearCritical
            || verdict.minority_prediction == Outlook::NearCritical;
        pass &= exact == 100 || flagged;
        parts.push(format!(
            "delta={delta}: {exact}/100 exact, theory {}/{}",
            verdict.majority_prediction, verdict.minority_prediction
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_4() -> Outcome {
    let mut disagreements = 0;
    let mut checked = 0;
    for mass in [2.0, 10.0, 100.0, 1e4, 1e6] {
        for offset in [-0.1, -0.02, 0.0, 0.02, 0.1] {
            // offset = delta - epsilon, so alpha = t(1/2 - offset)
            let prior = MediaPrior::new_unchecked(mass * (0.5 - offset), mass * (0.5 + offset));
            for class in [Class::H1, Class::H2] {
                for n1 in 0..=60 {
                    for n2 in 0..=60 {
                        checked += 1;
                        if predict(&prior, class, n1, n2) != predict_linear(&prior, class, n1, n2) {
                            disagreements += 1;
                        }
                    }
                }
            }
        }
    }
    Outcome {
        pass: disagreements == 0,
        detail: format!("{disagreements} disagreements in {checked} cases"),
    }
}

/// Voter-level samples of (n_same, n_other) for one class until `want` are collected.
fn voter_samples(sampler: &NetworkSampler, e: &Electorate, class: Class, want: usize, seed: u64) -> (Vec<u32>, Vec<u32>) {
    let (mut same, mut other) = (Vec::with_capacity(want), Vec::with_capacity(want));
    let mut graph = 0;
    while same.len() < want {
        let counts = sampler.sample(surprise_core::seeds::derive(seed, graph));
        for v in e.voters(class) {
            if same.len() == want {
                break;
            }
            same.push(counts.same(v));
            other.push(counts.other(v));
        }
        graph += 1;
    }
    (same, other)
}

fn criterion_5() -> Outcome {
    let e = build_electorate(104, 96).unwrap();
    let bp = BlockProbs::new(0.3, 0.2).unwrap();
    let homogeneous = NetworkSampler::new(&e, bp, None, Backend::Homogeneous).unwrap();
    let edgewise = NetworkSampler::new(&e, bp, None, Backend::Edgewise).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for class in [Class::H1, Class::H2] {
        let (hs, ho) = voter_samples(&homogeneous, &e, class, 10_000, SEED);
        let (es, eo) = voter_samples(&edgewise, &e, class, 10_000, SEED ^ 1);
        for (name, a, b) in [("same", &hs, &es), ("other", &ho, &eo)] {
            let test = chi_square_two_sample(a, b);
            pass &= test.p_value >= 0.001;
            parts.push(format!("{class:?} n_{name}: p={:.3}", test.p_value));
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = 2000;
    let draws = 1000;
    let mut within = 0;
    for draw in 0..draws {
        let n1 = rng.random_range(1001..=1300);
        let e = build_electorate(n1, n - n1).unwrap();
        let eps = e.margin().value();
        let p: f64 = rng.random_range(0.01..0.5);
        let q: f64 = rng.random_range(0.0..=p);
        let c: f64 = rng.random_range(0.0..1.0);
        let delta: f64 = rng.random_range(-(0.5 - eps)..=(0.5 + eps));
        let rp = RegimeParams::for_electorate(&e, p, q, MediaSpec::influential(c, delta));
        let expected = exact_expectation(&rp, Side::Majority);
        let shift = 2.0 * c * n as f64 * (eps - delta) + 1.0;
        let counts = sample_counts_homogeneous(&e, BlockProbs::new(p, q).unwrap(), surprise_core::seeds::derive(SEED, draw));
        let xs: Vec<f64> = e
            .voters(Class::H1)
            .map(|v| {
                let (a, b) = counts.by_class(v, Class::H1);
                f64::from(b) - f64::from(a) - shift
            })
            .collect();
        let (mean, se) = mean_se(&xs);
        if (mean - expected).abs() <= 3.0 * se {
            within += 1;
        }
    }
    Outcome {
        pass: within * 100 >= draws * 99,
        detail: format!("{within} of {draws} draws within 3 SE"),
    }
}

fn sweep_config() -> Config {
    Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/c_sweep.toml")).unwrap()
}

fn criterion_7(result: &SweepResult, secs: f64) -> Outcome {
    let rows = |label: &str| result.series(label);
    let low = rows("delta=-0.1");
    let xs: Vec<f64> = low.iter().map(|r| r.axis_value).collect();
    let ys: Vec<f64> = low.iter().map(|r| r.min_frac).collect();
    let rho = spearman(&xs, &ys);
    let monotone = ys.windows(2).all(|w| w[1] <= w[0]);
    let high_min = rows("delta=0.1").iter().map(|r| r.min_frac).fold(f64::INFINITY, f64::min);
    let maj_max = low
        .iter()
        .chain(rows("delta=0").iter())
        .map(|r| r.maj_frac)
        .fold(0.0, f64::max);
    let pass = rho <= -0.8 && monotone && high_min >= 0.9 && maj_max <= 0.1 && secs < 1800.0;
    Outcome {
        pass,
        detail: format!(
            "delta=-0.1 minority: spearman {rho:.3}, non-increasing {monotone}; \
             delta=+0.1 minority min {high_min:.4}; majority max for delta<=0 {maj_max:.4}; {secs:.0}s"
        ),
    }
}

fn csv_bytes(result: &SweepResult) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).unwrap();
    buf
}

fn criterion_8(reference: &SweepResult) -> Outcome {
    let spec = sweep_config().sweep_spec().unwrap();
    let base = csv_bytes(reference);
    let mut parts = vec![format!("1 worker: {} bytes", base.len())];
    let mut pass = true;
    for workers in [4, 8] {
        let same = csv_bytes(&run_sweep(&spec, Some(workers)).unwrap()) == base;
        pass &= same;
        parts.push(format!("{workers} workers identical: {same}"));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn report(id: u32, outcome: &Outcome) -> bool {
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    println!("criterion {id}: {tag} ({})", outcome.detail);
    outcome.pass
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, &criterion_1());
    ok &= report(2, &criterion_2());
    ok &= report(3, &criterion_3());
    ok &= report(4, &criterion_4());
    ok &= report(5, &criterion_5());
    ok &= report(6, &criterion_6());

    let start = Instant::now();
    let spec = sweep_config().sweep_spec().unwrap();
    let sweep = run_sweep(&spec, Some(1)).unwrap();
    ok &= report(7, &criterion_7(&sweep, start.elapsed().as_secs_f64()));
    ok &= report(8, &criterion_8(&sweep));

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
