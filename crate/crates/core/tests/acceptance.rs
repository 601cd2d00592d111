//! End-to-end acceptance gate. Runs every criterion, prints one PASS/FAIL
//! line each, and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use qcb::dense::{dense_expectation, min_eigenvalue};
use qcb::env::{reward_variance, term_means, Arm};
use qcb::hamiltonians::{
    actions, cluster_hamiltonian, cluster_means, cluster_phase, ising_hamiltonian, ising_phase,
    recommendation_context, sample_context, ClusterParams, ContextDistribution, ContextParams,
    Family, IsingParams,
};
use qcb::linucb::ambient::check_equivalence;
use qcb::linucb::{GramBasis, DEFAULT_TOLERANCE};
use qcb::lower_bound::{build_hard_instance, uniform_policy_regret};
use qcb::runner::{
    run_experiment, write_outputs, ExperimentConfig, FamilyKind, Settings, PHASE_FILE, REGRET_FILE,
};
use qcb::{Observable, PauliString, StabilizerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn settings(pairs: &[(&str, &str)]) -> Settings {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn effective_dimension() -> Outcome {
    let mut r = rng(1);
    let mut found = Vec::new();
    for n in [10, 100] {
        for (family, want) in [(Family::Ising, 2), (Family::Cluster, 3)] {
            let dist = ContextDistribution::default_for(family);
            let mut basis = GramBasis::new(DEFAULT_TOLERANCE).map_err(err)?;
            for _ in 0..1000 {
                let (_, o) = sample_context(&dist, n, &mut r).map_err(err)?;
                basis.update(&o).map_err(err)?;
            }
            found.push(format!("{}@{n}={}", family.name(), basis.len()));
            if basis.len() != want {
                return Err(format!(
                    "{} at n={n}: d_eff {} != {want}",
                    family.name(),
                    basis.len()
                ));
            }
        }
    }
    Ok(found.join(" "))
}

fn named_states(n: usize) -> Vec<StabilizerState> {
    let ctors: [fn(usize) -> qcb::Result<StabilizerState>; 7] = [
        StabilizerState::all_plus,
        StabilizerState::all_minus,
        StabilizerState::all_one,
        StabilizerState::neel_z,
        StabilizerState::x_alternating,
        |n| StabilizerState::cluster_state(n, 1),
        |n| StabilizerState::cluster_state(n, -1),
    ];
    ctors.iter().filter_map(|f| f(n).ok()).collect()
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(2);
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    let mut compare = |s: &StabilizerState, p: PauliString| -> Result<(), String> {
        let fast = s.expectation(&p).map_err(err)?;
        let slow = dense_expectation(s, &Observable::single(p.clone(), 1.0)).map_err(err)?;
        worst = worst.max((fast - slow).abs());
        checked += 1;
        if (fast - slow).abs() > 1e-12 {
            return Err(format!("{s} on {p}: {fast} vs {slow}"));
        }
        Ok(())
    };
    for n in 1..=3 {
        let mut states = named_states(n);
        for _ in 0..20 {
            states.push(StabilizerState::random(n, &mut r).map_err(err)?);
        }
        for s in &states {
            for i in 0..4u64.pow(n as u32) {
                compare(s, PauliString::from_index(n, i as usize))?;
            }
        }
    }
    for n in [4, 5] {
        let mut states = named_states(n);
        for _ in 0..5 {
            states.push(StabilizerState::random(n, &mut r).map_err(err)?);
        }
        for i in 0..500 {
            let s = &states[i % states.len()];
            compare(s, PauliString::random(n, &mut r))?;
        }
    }
    Ok(format!("{checked} expectations, max |diff| {worst:.1e}"))
}

fn full_basis_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let rep = check_equivalence(2, 3, 500, 1.0, seed).map_err(err)?;
        worst = worst.max(rep.max_score_diff);
        if !rep.passed(1e-8) {
            return Err(format!("seed {seed}: {rep:?}"));
        }
    }
    Ok(format!(
        "20 seeds x 500 rounds identical, max score diff {worst:.1e}"
    ))
}

/// Dense-oracle means with exact ties (up to rounding) going to the smallest
/// index.
fn brute_force_phase(states: &[StabilizerState], o: &Observable) -> Result<usize, String> {
    let means: Vec<f64> = states
        .iter()
        .map(|s| dense_expectation(s, o))
        .collect::<qcb::Result<_>>()
        .map_err(err)?;
    let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(means
        .iter()
        .position(|&m| m >= best - 1e-9)
        .expect("non-empty"))
}

fn phase_boundaries() -> Outcome {
    let n = 4;
    let ising = actions(Family::Ising, n).map_err(err)?;
    for i in 0..=400 {
        let h = (i as f64 - 200.0) / 100.0;
        let o = recommendation_context(&ising_hamiltonian(n, IsingParams { h }).map_err(err)?);
        let dense = brute_force_phase(&ising, &o)?;
        if dense != ising_phase(h) {
            return Err(format!(
                "ising h={h}: dense {dense}, closed form {}",
                ising_phase(h)
            ));
        }
    }
    let cluster = actions(Family::Cluster, n).map_err(err)?;
    for i in 0..=40 {
        for j in 0..=40 {
            let (j1, j2) = ((i as f64 - 20.0) / 10.0, (j as f64 - 20.0) / 10.0);
            let o = recommendation_context(
                &cluster_hamiltonian(n, ClusterParams { j1, j2 }).map_err(err)?,
            );
            let dense = brute_force_phase(&cluster, &o)?;
            if dense != cluster_phase(j1, j2) {
                return Err(format!(
                    "cluster ({j1},{j2}): dense {dense}, closed form {}",
                    cluster_phase(j1, j2)
                ));
            }
        }
    }
    Ok("401 ising + 1681 cluster grid points agree".into())
}

fn learning_behavior() -> Outcome {
    let n = 10;
    let config = ExperimentConfig::from_settings(
        FamilyKind::Cluster,
        &settings(&[
            ("qubits", "10"),
            ("rounds", "2000"),
            ("reps", "20"),
            ("seed", "0"),
        ]),
    )
    .map_err(err)?;
    let res = run_experiment(&config).map_err(err)?;
    let reg = &res.curve.mean_regret;
    let early = reg[999];
    let late = reg[1999] - reg[999];
    let ratio = late / early;
    let cls = &res.curve.mean_classifier;
    let miss = (cls[1999] - cls[1799]) / 200.0;

    // points from round 200 on, grouped by exact phase, keeping only
    // parameters whose best-vs-runner-up margin is at least n/2
    let mut by_phase: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for p in res.phase_points.iter().filter(|p| p.round >= 200) {
        let Some(ContextParams::Cluster(ClusterParams { j1, j2 })) = p.params else {
            return Err("cluster phase point without parameters".into());
        };
        let mut m = cluster_means(n, j1, j2);
        m.sort_by(|a, b| b.total_cmp(a));
        if m[0] - m[1] >= 0.5 * n as f64 {
            *by_phase
                .entry(p.optimal)
                .or_default()
                .entry(p.chosen)
                .or_default() += 1;
        }
    }
    let mut purity = Vec::new();
    let mut pure = by_phase.len() == 5;
    for (phase, counts) in &by_phase {
        let total: usize = counts.values().sum();
        let (&major, &count) = counts.iter().max_by_key(|(_, &c)| c).expect("non-empty");
        let frac = count as f64 / total as f64;
        pure &= major == *phase && frac >= 0.9;
        purity.push(format!("{phase}:{:.1}%", 100.0 * frac));
    }
    let summary = format!(
        "(a) growth ratio {ratio:.3} (b) final-10% misclassification {:.1}% (c) purity [{}]",
        100.0 * miss,
        purity.join(" ")
    );
    if ratio < 0.35 && miss < 0.15 && pure {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn unbiasedness() -> Outcome {
    const SAMPLES: usize = 10_000;
    let n = 10;
    let mut r = rng(6);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let mut check = |arm: &dyn Arm, o: &Observable, r: &mut ChaCha8Rng| -> Result<(), String> {
        let terms = term_means(arm, o).map_err(err)?;
        let exact: f64 = terms.iter().map(|(w, mu)| w * mu).sum();
        let sum: f64 = (0..SAMPLES)
            .map(|_| qcb::env::sample_from_terms(&terms, r))
            .sum();
        let mean = sum / SAMPLES as f64;
        let se = (reward_variance(&terms) / SAMPLES as f64).sqrt();
        let z = if se > 0.0 {
            (mean - exact).abs() / se
        } else if (mean - exact).abs() < 1e-9 {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
        checked += 1;
        if z > 5.0 {
            return Err(format!(
                "{} on {o}: mean {mean}, exact {exact}, {z:.2} SE",
                arm.label()
            ));
        }
        Ok(())
    };
    for family in [Family::Ising, Family::Cluster] {
        let dist = ContextDistribution::default_for(family);
        let states = actions(family, n).map_err(err)?;
        for _ in 0..50 {
            let (_, o) = sample_context(&dist, n, &mut r).map_err(err)?;
            for s in &states {
                check(s, &o, &mut r)?;
            }
        }
    }
    let inst = build_hard_instance(2, 4, 15, 6000, None, &mut r).map_err(err)?;
    let arms = inst.arms();
    for _ in 0..50 {
        let o = inst
            .context_observable(r.random_range(0..inst.c_prime))
            .map_err(err)?;
        for a in &arms {
            check(a, &o, &mut r)?;
        }
    }
    Ok(format!(
        "{checked} (context, action) pairs, worst deviation {worst:.2} SE"
    ))
}

fn lower_bound_instance() -> Outcome {
    let (n, k, c, delta, t, runs) = (1, 4, 3, 0.2, 6000, 100);
    let mut r = rng(7);
    let mut regrets = Vec::with_capacity(runs);
    for _ in 0..runs {
        let inst = build_hard_instance(n, k, c, t, Some(delta), &mut r).map_err(err)?;
        for arm in inst.arms() {
            let lam = min_eigenvalue(&arm.density_matrix().map_err(err)?);
            if lam < -1e-12 {
                return Err(format!("{} has eigenvalue {lam}", arm.label()));
            }
        }
        regrets.push(uniform_policy_regret(&inst, &mut r).map_err(err)?.0);
    }
    // positivity on larger instances, with the default and the largest
    // admissible explicit delta
    for n in 2..=3 {
        for seed in 0..5 {
            for explicit in [false, true] {
                let mut r = rng(100 + seed);
                let mut inst = build_hard_instance(n, 3, 12, 1200, None, &mut r).map_err(err)?;
                if explicit {
                    let max_load = *inst.loads().iter().max().expect("k >= 2") as f64;
                    inst = build_hard_instance(
                        n,
                        3,
                        12,
                        1200,
                        Some(1.0 / max_load),
                        &mut rng(100 + seed),
                    )
                    .map_err(err)?;
                }
                for arm in inst.arms() {
                    let lam = min_eigenvalue(&arm.density_matrix().map_err(err)?);
                    if lam < -1e-12 {
                        return Err(format!("n={n} {} has eigenvalue {lam}", arm.label()));
                    }
                }
            }
        }
    }
    let mean = regrets.iter().sum::<f64>() / runs as f64;
    let var = regrets.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let se = (var / runs as f64).sqrt();
    let expected = delta * t as f64 * (k - 1) as f64 / k as f64;
    let summary = format!("mean regret {mean:.2} ± {se:.2} vs {expected}; all actions positive");
    if (mean - expected).abs() <= 3.0 * se {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(err)?;
    let b = tempfile::tempdir().map_err(err)?;
    for (family, extra) in [
        (
            FamilyKind::Cluster,
            [("qubits", "10"), ("rounds", "1000"), ("reps", "8")],
        ),
        (
            FamilyKind::Ising,
            [("qubits", "6"), ("rounds", "1000"), ("reps", "8")],
        ),
        (
            FamilyKind::LowerBound,
            [("qubits", "2"), ("rounds", "1000"), ("reps", "8")],
        ),
    ] {
        for dir in [a.path(), b.path()] {
            let mut s = settings(&extra);
            s.insert("seed".into(), "8".into());
            s.insert("out".into(), dir.display().to_string());
            let config = ExperimentConfig::from_settings(family, &s).map_err(err)?;
            let res = run_experiment(&config).map_err(err)?;
            write_outputs(&config, &res).map_err(err)?;
        }
        for f in [REGRET_FILE, PHASE_FILE] {
            let (x, y) = (
                fs::read(a.path().join(f)).map_err(err)?,
                fs::read(b.path().join(f)).map_err(err)?,
            );
            if x != y {
                return Err(format!("{family} {f} differs between runs"));
            }
        }
    }
    Ok("regret.csv and phase.csv byte-identical for three families".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("effective dimension", effective_dimension),
        ("stabilizer vs dense oracle", oracle_equivalence),
        ("compressed vs full-basis LinUCB", full_basis_equivalence),
        ("phase boundaries", phase_boundaries),
        ("learning behavior", learning_behavior),
        ("reward unbiasedness", unbiasedness),
        ("lower-bound instance", lower_bound_instance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name} ({secs:.2}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2}s): {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
