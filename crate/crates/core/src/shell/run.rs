use std::time::Instant;

use crate::certificate::Certificate;
use crate::coxeter::{q_factorial, CoxeterMatrix, CoxeterSystem, GenSet};
use crate::error::{Error, Result};
use crate::fock::{self, DeformationTensor, FockScene};
use crate::linalg::{complex_gaussian, max_abs, CVec, PowerIteration};
use crate::opspace::{self, CoefficientTuple};
use crate::qmap::{self, OperatorFamily, QuasiMultiplicativeMap, CP_GRAM_MAX_ROWS};
use crate::wick::{self, MomentQuery};

use super::report::Report;
use super::scenario::{Kind, ScenarioSpec};

/// Default scalar deformation for `positivity` and `blocklength`.
pub const DEFAULT_SCALAR: f64 = 0.5;
/// Generators above which the all-subsets parabolic checks are skipped.
pub const MAX_SUBSET_RANK: usize = 8;
/// Carrier dimension above which the Fock-built family is refused.
pub const MAX_FAMILY_DIM: usize = 1024;

/// Runs the pipeline for `spec.kind`. Module errors end the run early and are
/// recorded in the report with their error code.
pub fn run(spec: &ScenarioSpec) -> Report {
    let start = Instant::now();
    let mut report = Report::new(spec.clone());
    let outcome = spec.validate().and_then(|()| match spec.kind {
        Kind::Coxeter => run_coxeter(spec, &mut report),
        Kind::Positivity => run_positivity(spec, &mut report),
        Kind::Blocklength => run_blocklength(spec, &mut report),
        Kind::Fock => run_fock(spec, &mut report),
        Kind::Wick => run_wick(spec, &mut report),
        Kind::Opspace => run_opspace(spec, &mut report),
    });
    if let Err(e) = outcome {
        report.set_error(&e);
    }
    report.finish(start.elapsed().as_secs_f64() * 1e3);
    report
}

fn count_check(label: &str, bad: usize) -> Certificate {
    Certificate::at_most(label, bad as f64, 0.0)
}

fn run_coxeter(spec: &ScenarioSpec, report: &mut Report) -> Result<()> {
    let matrix = spec.coxeter_matrix()?;
    let sys = CoxeterSystem::build(&matrix)?;
    let sigma0 = sys.element(sys.sigma0())?;
    report.observe("order", sys.order());
    report.observe("rank", sys.rank());
    report.observe("longest_length", sigma0.length);
    report.observe("longest_word", &sigma0.word);
    let counts = sys.length_counts();
    report.observe("length_counts", format!("{counts:?}"));

    let top = counts.last().copied().unwrap_or(0);
    report.push(Certificate::at_most("unique longest element", (top as f64 - 1.0).abs(), 0.0));

    let mut es_bad = 0;
    for a in sys.ids() {
        let expected = i64::from(a == sys.sigma0());
        if sys.euler_solomon(a)? != expected {
            es_bad += 1;
        }
    }
    report.push(count_check("Euler-Solomon indicator mismatches", es_bad));

    if sys.rank() <= MAX_SUBSET_RANK {
        let mut bad = 0;
        for j in GenSet::full(sys.rank()).subsets() {
            let check = sys.coset_factorization(j)?;
            if check.cosets * check.subgroup_order != sys.order() || !check.bijective || !check.lengths_add {
                bad += 1;
            }
        }
        report.push(count_check("coset factorization failures over all J", bad));
    } else {
        report.observe("coset_factorization", "skipped (rank too large)");
    }

    let (seen, conflicts) = sys.reduced_word_stats();
    report.observe("reduced_words_seen", seen);
    report.push(count_check("block set conflicts across reduced words", conflicts));

    let n = sys.rank();
    if matrix == CoxeterMatrix::type_a(n) {
        let expected = q_factorial(n + 1);
        let got: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        let bad = if got.len() != expected.len() {
            got.len().max(expected.len())
        } else {
            got.iter().zip(&expected).filter(|(a, b)| a != b).count()
        };
        report.push(count_check("Poincare polynomial coefficient mismatches", bad));
    }
    Ok(())
}

/// The family acting on `H^{⊗(n+1)}` by the amplified deformation, for type `A_n`.
pub fn fock_family(matrix: &CoxeterMatrix, tensor: &DeformationTensor) -> Result<OperatorFamily> {
    let n = matrix.rank();
    if *matrix != CoxeterMatrix::type_a(n) {
        return Err(Error::InvalidScenario(
            "an operator family from q needs a type A group (generators act on adjacent tensor slots)".into(),
        ));
    }
    let slots = n + 1;
    let dim = (tensor.dim() as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if dim > MAX_FAMILY_DIM as u128 {
        return Err(Error::SizeBudget {
            what: "operator family dimension",
            needed: dim.min(usize::MAX as u128) as usize,
            limit: MAX_FAMILY_DIM,
        });
    }
    let ops = (1..=n).map(|i| tensor.amplify(i, slots)).collect::<Result<Vec<_>>>()?;
    OperatorFamily::new(matrix.clone(), ops)
}

fn run_positivity(spec: &ScenarioSpec, report: &mut Report) -> Result<()> {
    let tol = spec.tolerances();
    let matrix = spec.coxeter_matrix()?;
    let sys = CoxeterSystem::build(&matrix)?;
    let family = match spec.qspec()? {
        Some(q) => {
            report.observe("family", "amplified deformation T_i on H^(n+1)");
            fock_family(&matrix, &DeformationTensor::from_q(&q))?
        }
        None => {
            let s = spec.scalar.unwrap_or(DEFAULT_SCALAR);
            report.observe("family", format!("scalar {s}"));
            OperatorFamily::scalar(matrix.clone(), s)
        }
    };
    report.observe("order", sys.order());
    report.observe("carrier_dim", family.dim());
    report.extend(family.validate(&tol));

    let map = QuasiMultiplicativeMap::new(&sys, &family)?;
    let pos = map.positivity_certificate(&tol)?;
    report.observe("strictly_positive", pos.context.get("strict").cloned().unwrap_or_default());
    report.push(pos);
    report.push(map.alternating_coset_check(&tol)?);
    if sys.rank() <= MAX_SUBSET_RANK {
        let mut worst: Option<Certificate> = None;
        for j in GenSet::full(sys.rank()).subsets() {
            let c = map.factorization_check(j, &tol)?.with("J", j);
            if worst.as_ref().is_none_or(|w| c.value > w.value || c.value.is_nan()) {
                worst = Some(c);
            }
        }
        if let Some(mut w) = worst {
            w.label = "factorization P(W) = P(D_J)P(W_J), worst J".into();
            report.push(w);
        }
    }
    if sys.order() * family.dim() <= CP_GRAM_MAX_ROWS {
        report.push(map.cp_gram_certificate(&tol)?);
    } else {
        report.observe("complete_positivity", "skipped (block Gram too large)");
    }
    Ok(())
}

fn run_blocklength(spec: &ScenarioSpec, report: &mut Report) -> Result<()> {
    let tol = spec.tolerances();
    let sys = CoxeterSystem::build(&spec.coxeter_matrix()?)?;
    let q = spec.scalar.unwrap_or(DEFAULT_SCALAR);
    let min_eig = qmap::scalar_blocklength_min_eig(&sys, q)?;
    let threshold = qmap::locate_blocklength_threshold(&sys, 50)?;
    report.observe("order", sys.order());
    report.observe("scalar", q);
    report.observe("negative_threshold", format!("{threshold:.12}"));
    report.push(
        Certificate::at_least(
            "block-length kernel q^{||s||} PSD",
            min_eig,
            tol.psd_threshold(sys.order() as f64),
        )
        .with("scalar", q),
    );
    Ok(())
}

fn seeded_vector(seed: u64, d: usize) -> CVec {
    let mut rng = opspace::trial_rng(seed, 0);
    let v = CVec::from_fn(d, |_, _| complex_gaussian(&mut rng));
    let n = crate::linalg::vec_norm(&v);
    v / crate::linalg::c(n)
}

fn run_fock(spec: &ScenarioSpec, report: &mut Report) -> Result<()> {
    let tol = spec.tolerances();
    let tensor = spec.deformation()?;
    let validation = tensor.validate(&tol);
    let valid = validation.iter().all(|c| c.passed);
    report.extend(validation);
    if !valid {
        return Ok(());
    }
    report.observe("tensor_norm", tensor.norm());
    let scene = FockScene::build(tensor.clone(), spec.levels, &tol)?;
    report.observe("level_dims", format!("{:?}", scene.level_dims()));
    report.observe("quotient_dims", format!("{:?}", scene.quotient_dims()));

    report.push(fock::gram_recursion_residual(&scene)?);
    let f = seeded_vector(spec.seed, scene.dim());
    report.push(fock::adjointness_residual(&scene, &f)?);
    report.push(fock::vacuum_annihilation(&scene, &f)?);
    if scene.cap() >= 1 {
        report.push(fock::relation_residual_all(&scene)?);
        report.push(fock::sum_rule_residual(&scene));
    }
    if tensor.norm() < 1.0 {
        report.push(fock::domination_check(&scene)?);
        report.extend(fock::operator_norm_bounds(&scene, &f, 1e-8)?);
    }
    if let Some(q) = spec.qspec()? {
        report.extend(fock::norm_suite(&scene, &q)?);
        let mut worst: f64 = 0.0;
        for i in 0..scene.dim() {
            let built = scene.annihilation_basis(i);
            for n in 1..=scene.cap() {
                let explicit = fock::explicit_annihilation(&q, i, n)?;
                worst = worst.max(max_abs(&(built.block(n, n - 1).expect("annihilation block") - explicit)));
            }
        }
        report.push(Certificate::at_most("explicit annihilation formula", worst, 1e-12));
    }
    let cyclic = tensor.cyclicity_residual() <= tol.validation_for(tensor.norm());
    report.observe("cyclic_coefficients", cyclic);
    if cyclic && scene.cap() >= 2 {
        report.push(fock::right_commutant_check(&scene)?);
    }
    Ok(())
}

/// Longest word length used when a wick scenario names no word.
pub const EXHAUSTIVE_WICK_LENGTH: usize = 6;

fn run_wick(spec: &ScenarioSpec, report: &mut Report) -> Result<()> {
    let tol = spec.tolerances();
    let q = spec
        .qspec()?
        .ok_or_else(|| Error::InvalidScenario("wick needs q".into()))?;
    let tensor = DeformationTensor::from_q(&q);
    match spec.word0() {
        Some(word) => {
            let cap = spec.levels.max(word.len() / 2);
            let scene = FockScene::build(tensor.clone(), cap, &tol)?;
            let query = MomentQuery::new(word, q.clone())?;
            let cert = query.compare(&scene)?;
            report.observe("moment_diagram", cert.context["diagram"].clone());
            report.observe("moment_matrix", cert.context["matrix"].clone());
            report.push(cert);
        }
        None => {
            let max_len = EXHAUSTIVE_WICK_LENGTH.min(2 * spec.levels.max(1));
            let scene = FockScene::build(tensor.clone(), max_len / 2, &tol)?;
            let mut worst: Option<Certificate> = None;
            let mut words = 0;
            for len in 1..=max_len {
                for w in wick::all_words(q.dim(), len) {
                    let c = MomentQuery::new(w, q.clone())?.compare(&scene)?;
                    words += 1;
                    if worst.as_ref().is_none_or(|b| c.value > b.value || c.value.is_nan()) {
                        worst = Some(c);
                    }
                }
            }
            report.observe("words_compared", words);
            if let Some(mut w) = worst {
                w.label = format!("diagram vs matrix moments, worst {}", w.label);
                report.push(w);
            }
        }
    }
    let trace = wick::traciality_check(&tensor, 4, &tol)?;
    report.observe("trace_structural_residual", trace.structural.value);
    report.observe("trace_empirical_residual", trace.empirical.value);
    report.push(Certificate::at_most(
        "structural trace implies empirical trace",
        if trace.consistent() { 0.0 } else { 1.0 },
        0.0,
    ));
    Ok(())
}

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_AUX_DIM: usize = 2;

fn run_opspace(spec: &ScenarioSpec, report: &mut Report) -> Result<()> {
    let tol = spec.tolerances();
    let tensor = spec.deformation()?;
    let validation = tensor.validate(&tol);
    let valid = validation.iter().all(|c| c.passed);
    report.extend(validation);
    if !valid {
        return Ok(());
    }
    let scene = FockScene::build(tensor, spec.levels, &tol)?;
    let trials = spec.trials.unwrap_or(DEFAULT_TRIALS);
    let aux = spec.aux_dim.unwrap_or(DEFAULT_AUX_DIM);
    let terms = scene.dim();
    let reports = opspace::sandwich_check(spec.seed, trials, terms, aux, &scene)?;
    report.observe("trials", reports.len());
    report.observe("q", scene.tensor().norm());
    report.observe("truncation", "middle and tensor-square norms are truncated lower bounds");
    report.extend(reports.iter().map(|r| r.certificate()));
    if trials > 0 {
        let t = CoefficientTuple::gaussian(&mut opspace::trial_rng(spec.seed, 0), aux, terms);
        report.push(opspace::embedded_norm_monotone(&t, &scene)?);
    }
    if let Some(m) = spec.m {
        let power = PowerIteration {
            seed: spec.seed,
            ..PowerIteration::default()
        };
        let witness = opspace::injectivity_witness(m, &scene, &power)?;
        report.observe("tensor_square_norm", witness.norm);
        report.observe("contradiction_regime", witness.contradiction_regime);
        report.extend(witness.certificates(1e-6));
    }
    Ok(())
}
