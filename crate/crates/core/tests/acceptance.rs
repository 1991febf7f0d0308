//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its own PASS/FAIL line; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use confmodel::algebra::{all_roots_oracle, solve_low_degree};
use confmodel::continuation::PolarGridSpec;
use confmodel::modeler::{model, model_equally_spaced, ConformalModel, ModelCase};
use confmodel::render::{component_count, figure_fields, figure_pair, FIGURE_RESOLUTION};
use confmodel::verify::{
    critical_value_defect, image_containment, injectivity_sample, residual_sup, verify_model,
};
use confmodel::verify::{Tolerances, VerificationReport};
use confmodel::{Complex, ComplexPolynomial, EquallySpacedForm, FiniteBlaschkeProduct};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn worked_example() -> FiniteBlaschkeProduct {
    FiniteBlaschkeProduct::with_zeros(vec![c(0.0, 0.0), c(0.75, 0.0), c(0.25, 0.875)]).unwrap()
}

fn uniform_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex {
    Complex::from_polar(
        radius * rng.gen::<f64>().sqrt(),
        2.0 * PI * rng.gen::<f64>(),
    )
}

fn unimodular(rng: &mut ChaCha8Rng) -> Complex {
    Complex::from_polar(1.0, 2.0 * PI * rng.gen::<f64>())
}

/// Minimum over permutations of the maximum pairwise distance.
fn matching_distance(a: &[Complex], b: &[Complex]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    fn go(
        a: &[Complex],
        b: &[Complex],
        used: &mut Vec<bool>,
        k: usize,
        worst: f64,
        best: &mut f64,
    ) {
        if worst >= *best {
            return;
        }
        if k == a.len() {
            *best = worst;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(a, b, used, k + 1, worst.max((a[k] - b[j]).norm()), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}

/// The critical values of `B`, computed afresh from its critical points.
fn critical_values_of(b: &FiniteBlaschkeProduct) -> Vec<Complex> {
    let cd = b.critical_points_in_disk().unwrap();
    cd.points.iter().map(|p| b.eval(p.z)).collect()
}

/// The example plus 20 random generic cubics, modelled and verified once and
/// shared by the criteria that inspect them.
type Run = Result<(ConformalModel, VerificationReport), String>;

struct GenericCorpus {
    runs: Vec<(FiniteBlaschkeProduct, Run)>,
    elapsed: Duration,
}

fn generic_corpus() -> GenericCorpus {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_917);
    let mut products = vec![worked_example()];
    for _ in 0..20 {
        let zeros = (0..3).map(|_| uniform_disk(&mut rng, 0.9)).collect();
        products.push(FiniteBlaschkeProduct::with_zeros(zeros).unwrap());
    }
    let spec = PolarGridSpec::default();
    let runs = products
        .into_iter()
        .map(|b| {
            let run = model(&b)
                .and_then(|m| {
                    verify_model(&b, &m, &spec, &Tolerances::default(), 0).map(|r| (m, r))
                })
                .map_err(|e| e.to_string());
            (b, run)
        })
        .collect();
    GenericCorpus {
        runs,
        elapsed: start.elapsed(),
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn example_critical_points() -> Outcome {
    let start = Instant::now();
    let b = worked_example();
    let cd = b.critical_points_in_disk().unwrap();
    let found: Vec<Complex> = cd.points.iter().map(|p| p.z).collect();
    let published = [c(0.2014, 0.6494), c(0.4599, 0.0103)];
    let published_gap = matching_distance(&found, &published);
    let oracle: Vec<Complex> = all_roots_oracle(&b.derivative_numerator())
        .unwrap()
        .into_iter()
        .filter(|z| z.norm() < 1.0)
        .collect();
    let oracle_gap = matching_distance(&found, &oracle);
    let elapsed = start.elapsed();
    outcome(
        published_gap <= 5e-4 && oracle_gap <= 1e-8 && elapsed < Duration::from_secs(1),
        format!(
            "points {:.5}, {:.5}; off published by {published_gap:.1e}, off oracle by {oracle_gap:.1e}, {elapsed:.2?}",
            found[0], found[1]
        ),
    )
}

fn end_to_end_residual(corpus: &GenericCorpus) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (k, (_, run)) in corpus.runs.iter().enumerate() {
        match run {
            Ok((m, r)) if m.case == ModelCase::Degree3Generic => worst = worst.max(r.residual_sup),
            Ok((m, _)) => failures.push(format!("#{k} routed to {}", m.case.as_str())),
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    outcome(
        failures.is_empty() && worst <= 1e-8 && corpus.elapsed < Duration::from_secs(30),
        format!(
            "{} products, worst residual {worst:.1e}, {:.2?}{}",
            corpus.runs.len(),
            corpus.elapsed,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

fn closed_form_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = PolarGridSpec::default();
    let mut worst: f64 = 0.0;
    let mut coeff_worst: f64 = 0.0;
    for n in 2..=8u32 {
        for _ in 0..5 {
            let lambda = unimodular(&mut rng);
            let base = uniform_disk(&mut rng, 0.9);
            let form = EquallySpacedForm::new(lambda, base, n).unwrap();
            let m = model_equally_spaced(&form).unwrap();
            // the published polynomial, assembled independently
            let bn = base.powu(n);
            let mut expected = vec![c(0.0, 0.0); n as usize + 1];
            expected[0] = -lambda * bn;
            expected[n as usize] = lambda * (base.norm().powi(2 * n as i32) - 1.0);
            let expected = ComplexPolynomial::new(expected);
            coeff_worst = coeff_worst.max(m.p.sub(&expected).max_abs_coeff());
            worst = worst.max(residual_sup(&form.to_blaschke(), &m, &spec).unwrap());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && coeff_worst <= 1e-15 && elapsed < Duration::from_secs(10),
        format!("35 models, worst |B - p o phi| {worst:.1e}, coefficient drift {coeff_worst:.1e}, {elapsed:.2?}"),
    )
}

fn branch_uniqueness(corpus: &GenericCorpus) -> Outcome {
    let unique = corpus
        .runs
        .iter()
        .filter(|(_, run)| matches!(run, Ok((_, r)) if r.unique_branch == Some(true)))
        .count();
    outcome(
        unique == corpus.runs.len(),
        format!(
            "{unique}/{} runs with exactly one passing seed",
            corpus.runs.len()
        ),
    )
}

fn critical_value_gate(corpus: &GenericCorpus) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (b, run) in &corpus.runs {
        if let Ok((m, _)) = run {
            if m.case == ModelCase::Degree3Generic {
                let ks = critical_values_of(b);
                worst = worst.max(critical_value_defect(m, ks[0], ks[1]).unwrap());
                checked += 1;
            }
        }
    }
    outcome(
        checked == corpus.runs.len() && worst <= 1e-10,
        format!("{checked} generic models, worst defect {worst:.1e}"),
    )
}

fn injectivity_and_image(corpus: &GenericCorpus) -> Outcome {
    let spec = PolarGridSpec::default();
    let mut models: Vec<ConformalModel> = corpus
        .runs
        .iter()
        .filter_map(|(_, run)| run.as_ref().ok())
        .filter(|(_, r)| r.passed)
        .map(|(m, _)| m.clone())
        .collect();
    let passing_generic = models.len();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [2, 3, 5] {
        let form =
            EquallySpacedForm::new(unimodular(&mut rng), uniform_disk(&mut rng, 0.9), n).unwrap();
        models.push(model_equally_spaced(&form).unwrap());
    }
    let mut min_sep = f64::INFINITY;
    let mut crossings = 0;
    let mut violations = 0;
    for m in &models {
        let sample = injectivity_sample(m, 2000, 1e-3, &spec, 0).unwrap();
        min_sep = min_sep.min(sample.min_separation);
        crossings += sample.crossings.len();
        violations += image_containment(m, &spec).unwrap();
    }
    outcome(
        passing_generic == corpus.runs.len() && min_sep > 0.0 && crossings == 0 && violations == 0,
        format!(
            "{} models x 2000 pairs, min separation {min_sep:.3e}, {crossings} boundary crossings, {violations} containment violations",
            models.len()
        ),
    )
}

fn solver_certification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_solver: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for k in 0..200 {
        let degree = 1 + k % 4;
        let roots: Vec<Complex> = loop {
            let candidate: Vec<Complex> =
                (0..degree).map(|_| uniform_disk(&mut rng, 1.5)).collect();
            let separated = (0..degree)
                .all(|i| (i + 1..degree).all(|j| (candidate[i] - candidate[j]).norm() >= 1e-3));
            if separated {
                break candidate;
            }
        };
        let p = ComplexPolynomial::from_roots(&roots).scale(unimodular(&mut rng));
        let solved = solve_low_degree(&p).unwrap();
        let oracle = all_roots_oracle(&p).unwrap();
        worst_solver = worst_solver.max(matching_distance(&solved, &roots));
        worst_oracle = worst_oracle.max(matching_distance(&solved, &oracle));
    }
    outcome(
        worst_solver <= 1e-9 && worst_oracle <= 1e-8,
        format!("200 polynomials, worst root error {worst_solver:.1e}, worst oracle disagreement {worst_oracle:.1e}"),
    )
}

fn figure_topology() -> Outcome {
    let start = Instant::now();
    let b = worked_example();
    let m = model(&b).unwrap();
    let ks = critical_values_of(&b);
    let (lo, hi) = (
        ks[0].norm().min(ks[1].norm()),
        ks[0].norm().max(ks[1].norm()),
    );
    let (b_field, p_field) = figure_fields(&b, &m, FIGURE_RESOLUTION);
    let thresholds = [0.9 * lo, (lo + hi) / 2.0, 0.99];
    let expected = [3, 2, 1];
    let b_counts: Vec<usize> = thresholds
        .iter()
        .map(|&t| component_count(&b_field, t))
        .collect();
    let p_counts: Vec<usize> = thresholds
        .iter()
        .map(|&t| component_count(&p_field, t))
        .collect();
    let first = figure_pair(&b, &m, 800);
    let second = figure_pair(&b, &m, 800);
    let deterministic = first == second;
    let elapsed = start.elapsed();
    outcome(
        b_counts == expected && p_counts == expected && deterministic && elapsed < Duration::from_secs(10),
        format!(
            "components on D {b_counts:?}, on D_p {p_counts:?} (expected {expected:?}), deterministic svg {deterministic}, {elapsed:.2?}"
        ),
    )
}

fn degenerate_routing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut products = Vec::new();
    for _ in 0..10 {
        let zeros = (0..2).map(|_| uniform_disk(&mut rng, 0.9)).collect();
        products.push(FiniteBlaschkeProduct::new(unimodular(&mut rng), zeros).unwrap());
    }
    for _ in 0..5 {
        // the cube of an equally spaced triple moved by an automorphism:
        // a double critical point at the preimage of the origin
        let base = uniform_disk(&mut rng, 0.8);
        let a = uniform_disk(&mut rng, 0.6);
        let zeros = (0..3)
            .map(|k| {
                let w = base * Complex::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
                (w - a) / (1.0 - a.conj() * w)
            })
            .collect();
        products.push(FiniteBlaschkeProduct::new(unimodular(&mut rng), zeros).unwrap());
    }
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (k, b) in products.iter().enumerate() {
        match model(b) {
            Ok(m) if m.case == ModelCase::EquallySpaced && m.pre_automorphism.is_some() => {
                // independent spot check off the construction grid
                let off_grid = (0..500)
                    .map(|_| {
                        let z = uniform_disk(&mut rng, 0.999);
                        (b.eval(z) - m.composite(z).unwrap()).norm()
                    })
                    .fold(0.0, f64::max);
                worst = worst.max(m.residual_certificate).max(off_grid);
            }
            Ok(m) => failures.push(format!("#{k} routed to {}", m.case.as_str())),
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    outcome(
        failures.is_empty() && worst <= 1e-9,
        format!(
            "10 quadratic + 5 double-critical cubics, worst residual {worst:.1e}{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

fn main() -> ExitCode {
    let corpus = generic_corpus();
    let results = [
        ("example critical points", example_critical_points()),
        ("end-to-end residual", end_to_end_residual(&corpus)),
        ("closed-form identity", closed_form_identity()),
        ("branch uniqueness", branch_uniqueness(&corpus)),
        ("critical-value gate", critical_value_gate(&corpus)),
        ("injectivity and image", injectivity_and_image(&corpus)),
        ("solver certification", solver_certification()),
        ("figure topology", figure_topology()),
        ("degree-2 and degenerate routing", degenerate_routing()),
    ];
    let mut all = true;
    for (k, (name, o)) in results.iter().enumerate() {
        all &= o.passed;
        println!(
            "criterion {} [{}] {name}: {}",
            k + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
