//! Ising and generalized-cluster context families and their action sets.
//!
//! All chains are periodic: site `n` wraps to site `0`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{QcbError, Result};
use crate::pauli::{Observable, PauliLetter, PauliString};
use crate::stabilizer::StabilizerState;

use PauliLetter::{X, Z};

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct IsingParams {
    pub h: f64,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ClusterParams {
    pub j1: f64,
    pub j2: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Ising,
    Cluster,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Ising => "ising",
            Family::Cluster => "cluster",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = QcbError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ising" => Ok(Family::Ising),
            "cluster" => Ok(Family::Cluster),
            other => Err(QcbError::config(format!("unknown family {other:?}"))),
        }
    }
}

/// Parameters of one sampled context.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ContextParams {
    Ising(IsingParams),
    Cluster(ClusterParams),
}

impl ContextParams {
    /// `(param1, param2)` as logged in phase output.
    pub fn columns(&self) -> (f64, Option<f64>) {
        match *self {
            ContextParams::Ising(p) => (p.h, None),
            ContextParams::Cluster(p) => (p.j1, Some(p.j2)),
        }
    }
}

/// Closed real interval.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(QcbError::config(format!("invalid interval [{min}, {max}]")));
        }
        Ok(Interval { min, max })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            rng.random_range(self.min..=self.max)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

pub const DEFAULT_RANGE: (f64, f64) = (-2.0, 2.0);

/// Uniform distribution over a family's parameter box.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ContextDistribution {
    Ising { h: Interval },
    Cluster { j1: Interval, j2: Interval },
}

impl ContextDistribution {
    pub fn default_for(family: Family) -> Self {
        let r = Interval {
            min: DEFAULT_RANGE.0,
            max: DEFAULT_RANGE.1,
        };
        match family {
            Family::Ising => ContextDistribution::Ising { h: r },
            Family::Cluster => ContextDistribution::Cluster { j1: r, j2: r },
        }
    }

    pub fn family(&self) -> Family {
        match self {
            ContextDistribution::Ising { .. } => Family::Ising,
            ContextDistribution::Cluster { .. } => Family::Cluster,
        }
    }

    /// Largest Hilbert-Schmidt norm of a context over the parameter box. Each
    /// family's norm is `sqrt(n (1 + Σ coupling²))`, maximised at a corner.
    pub fn max_context_norm(&self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            ContextDistribution::Ising { h } => (n * (1.0 + h.max_abs().powi(2))).sqrt(),
            ContextDistribution::Cluster { j1, j2 } => {
                (n * (1.0 + j1.max_abs().powi(2) + j2.max_abs().powi(2))).sqrt()
            }
        }
    }
}

fn periodic(n: usize, sites: &[(usize, PauliLetter)]) -> PauliString {
    let wrapped: Vec<_> = sites.iter().map(|&(s, l)| (s % n, l)).collect();
    PauliString::from_sites(n, &wrapped)
}

/// `Σ_i Z_i Z_{i+1} + h X_i`.
pub fn ising_hamiltonian(n: usize, p: IsingParams) -> Result<Observable> {
    if n < 3 {
        return Err(QcbError::config(format!(
            "Ising chain needs at least 3 qubits, got {n}"
        )));
    }
    let mut terms = Vec::with_capacity(2 * n);
    for i in 0..n {
        terms.push((periodic(n, &[(i, Z), (i + 1, Z)]), 1.0));
        terms.push((periodic(n, &[(i, X)]), p.h));
    }
    Observable::from_terms(n, terms)
}

/// `Σ_i Z_i − j1 X_i X_{i+1} − j2 X_{i−1} Z_i X_{i+1}`.
pub fn cluster_hamiltonian(n: usize, p: ClusterParams) -> Result<Observable> {
    if n < 4 {
        return Err(QcbError::config(format!(
            "cluster chain needs at least 4 qubits, got {n}"
        )));
    }
    let mut terms = Vec::with_capacity(3 * n);
    for i in 0..n {
        terms.push((periodic(n, &[(i, Z)]), 1.0));
        terms.push((periodic(n, &[(i, X), (i + 1, X)]), -p.j1));
        terms.push((periodic(n, &[(i + n - 1, X), (i, Z), (i + 1, X)]), -p.j2));
    }
    Observable::from_terms(n, terms)
}

/// The context handed to the learner: `−H`, so the highest reward is the
/// lowest energy.
pub fn recommendation_context(h: &Observable) -> Observable {
    h.negated()
}

pub fn hamiltonian(n: usize, params: ContextParams) -> Result<Observable> {
    match params {
        ContextParams::Ising(p) => ising_hamiltonian(n, p),
        ContextParams::Cluster(p) => cluster_hamiltonian(n, p),
    }
}

/// Draws parameters uniformly from the box and returns them with the negated
/// Hamiltonian.
pub fn sample_context<R: Rng + ?Sized>(
    dist: &ContextDistribution,
    n: usize,
    rng: &mut R,
) -> Result<(ContextParams, Observable)> {
    let params = match dist {
        ContextDistribution::Ising { h } => ContextParams::Ising(IsingParams { h: h.sample(rng) }),
        ContextDistribution::Cluster { j1, j2 } => {
            let j1 = j1.sample(rng);
            let j2 = j2.sample(rng);
            ContextParams::Cluster(ClusterParams { j1, j2 })
        }
    };
    Ok((params, recommendation_context(&hamiltonian(n, params)?)))
}

fn check_action_n(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(QcbError::config(format!(
            "action sets need an even qubit count of at least 4, got {n}"
        )));
    }
    Ok(())
}

/// Ground states of the limiting Ising Hamiltonians, ordered
/// `h → −∞`, `h = 0`, `h → +∞`.
pub fn ising_actions(n: usize) -> Result<Vec<StabilizerState>> {
    check_action_n(n)?;
    Ok(vec![
        StabilizerState::all_plus(n)?,
        StabilizerState::neel_z(n)?,
        StabilizerState::all_minus(n)?,
    ])
}

/// Ground states of the limiting cluster Hamiltonians, ordered
/// `(−∞,0)`, `(0,∞)`, `(∞,0)`, `(0,−∞)`, `(0,0)`.
pub fn cluster_actions(n: usize) -> Result<Vec<StabilizerState>> {
    check_action_n(n)?;
    Ok(vec![
        StabilizerState::x_alternating(n)?,
        StabilizerState::cluster_state(n, 1)?,
        StabilizerState::all_plus(n)?,
        StabilizerState::cluster_state(n, -1)?,
        StabilizerState::all_one(n)?,
    ])
}

pub fn actions(family: Family, n: usize) -> Result<Vec<StabilizerState>> {
    match family {
        Family::Ising => ising_actions(n),
        Family::Cluster => cluster_actions(n),
    }
}

/// Mean reward of each Ising action on `−H_ising(h)`.
pub fn ising_means(n: usize, h: f64) -> [f64; 3] {
    let n = n as f64;
    [-h * n, n, h * n]
}

/// Mean reward of each cluster action on `−H_cluster(j1, j2)`.
pub fn cluster_means(n: usize, j1: f64, j2: f64) -> [f64; 5] {
    let n = n as f64;
    [-j1 * n, j2 * n, j1 * n, -j2 * n, n]
}

/// Smallest index attaining the maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Optimal Ising action: 0 for `h ≤ −1`, 1 for `−1 < h ≤ 1`, 2 for `h > 1`.
pub fn ising_phase(h: f64) -> usize {
    if h <= -1.0 {
        0
    } else if h <= 1.0 {
        1
    } else {
        2
    }
}

/// Optimal cluster action. Inside the open unit box it is `all_one`; outside,
/// the coupling of largest magnitude picks one of the four ordered phases.
/// Boundaries go to the smaller index.
pub fn cluster_phase(j1: f64, j2: f64) -> usize {
    argmax(&[-j1, j2, j1, -j2, 1.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{dense_expectation, dense_hs_inner};
    use crate::pauli::hs_inner;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn ising_expansion() {
        let h = ising_hamiltonian(3, IsingParams { h: 2.0 }).unwrap();
        assert_eq!(h.len(), 6);
        for zz in ["ZZI", "IZZ", "ZIZ"] {
            assert_eq!(h.coefficient(&ps(zz)), 1.0);
        }
        for x in ["XII", "IXI", "IIX"] {
            assert_eq!(h.coefficient(&ps(x)), 2.0);
        }
        assert_eq!(
            ising_hamiltonian(4, IsingParams { h: 0.0 }).unwrap().len(),
            4
        );
        assert!(ising_hamiltonian(2, IsingParams { h: 1.0 }).is_err());
    }

    #[test]
    fn ising_inner_products() {
        let a = ising_hamiltonian(3, IsingParams { h: 2.0 }).unwrap();
        let b = ising_hamiltonian(3, IsingParams { h: 0.0 }).unwrap();
        assert_eq!(hs_inner(&a, &b).unwrap(), 3.0);
        assert!((dense_hs_inner(&a, &b).unwrap() - 3.0).abs() < 1e-12);

        let c = ising_hamiltonian(4, IsingParams { h: 1.0 }).unwrap();
        assert_eq!(hs_inner(&c, &c).unwrap(), 8.0);
        assert!((dense_hs_inner(&c, &c).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cluster_expansion() {
        let h = cluster_hamiltonian(4, ClusterParams { j1: 1.0, j2: 0.0 }).unwrap();
        assert_eq!(h.len(), 8);
        assert_eq!(h.coefficient(&ps("XXII")), -1.0);
        assert_eq!(h.coefficient(&ps("XIIX")), -1.0);

        let h = cluster_hamiltonian(4, ClusterParams { j1: 0.0, j2: -1.0 }).unwrap();
        for xzx in ["XZXI", "IXZX", "XIXZ", "ZXIX"] {
            assert_eq!(h.coefficient(&ps(xzx)), 1.0);
        }
        assert!(cluster_hamiltonian(3, ClusterParams { j1: 0.0, j2: 0.0 }).is_err());

        let zero = cluster_hamiltonian(4, ClusterParams { j1: 0.0, j2: 0.0 }).unwrap();
        let one = StabilizerState::all_one(4).unwrap();
        assert_eq!(one.expectation_observable(&zero).unwrap(), -4.0);
        assert!((dense_expectation(&one, &zero).unwrap() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn recommendation_context_negates() {
        let h = ising_hamiltonian(4, IsingParams { h: 0.3 }).unwrap();
        let o = recommendation_context(&h);
        assert_eq!(o.coefficient(&ps("ZZII")), -1.0);
        assert_eq!(recommendation_context(&o), h);

        let neel = StabilizerState::neel_z(4).unwrap();
        let o0 = recommendation_context(&ising_hamiltonian(4, IsingParams { h: 0.0 }).unwrap());
        assert_eq!(neel.expectation_observable(&o0).unwrap(), 4.0);
        assert!((dense_expectation(&neel, &o0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn stabilizer_means_on_ising_contexts() {
        let plus = StabilizerState::all_plus(4).unwrap();
        let o = ising_hamiltonian(4, IsingParams { h: -2.0 })
            .unwrap()
            .negated();
        assert_eq!(plus.expectation_observable(&o).unwrap(), 8.0);
        assert!((dense_expectation(&plus, &o).unwrap() - 8.0).abs() < 1e-12);

        let neel = StabilizerState::neel_z(4).unwrap();
        let o = ising_hamiltonian(4, IsingParams { h: 0.7 })
            .unwrap()
            .negated();
        assert_eq!(neel.expectation_observable(&o).unwrap(), 4.0);
        assert!((dense_expectation(&neel, &o).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn action_sets_and_exact_means() {
        assert_eq!(ising_actions(10).unwrap().len(), 3);
        assert_eq!(cluster_actions(10).unwrap().len(), 5);
        assert!(ising_actions(7).is_err());
        assert!(cluster_actions(2).is_err());

        let o = ising_hamiltonian(4, IsingParams { h: 0.5 })
            .unwrap()
            .negated();
        let means: Vec<f64> = ising_actions(4)
            .unwrap()
            .iter()
            .map(|s| s.expectation_observable(&o).unwrap())
            .collect();
        assert_eq!(means, [-2.0, 4.0, 2.0]);
        for (s, m) in ising_actions(4).unwrap().iter().zip(&means) {
            assert!((dense_expectation(s, &o).unwrap() - m).abs() < 1e-12);
        }

        let o = cluster_hamiltonian(4, ClusterParams { j1: 2.0, j2: 0.0 })
            .unwrap()
            .negated();
        let means: Vec<f64> = cluster_actions(4)
            .unwrap()
            .iter()
            .map(|s| s.expectation_observable(&o).unwrap())
            .collect();
        assert_eq!(means, [-8.0, 0.0, 8.0, 0.0, 4.0]);
        for (s, m) in cluster_actions(4).unwrap().iter().zip(&means) {
            assert!((dense_expectation(s, &o).unwrap() - m).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_means_match_stabilizer_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4, 10] {
            let ia = ising_actions(n).unwrap();
            let ca = cluster_actions(n).unwrap();
            for _ in 0..20 {
                let h = rng.random_range(-3.0..3.0);
                let o = ising_hamiltonian(n, IsingParams { h }).unwrap().negated();
                let got: Vec<f64> = ia
                    .iter()
                    .map(|s| s.expectation_observable(&o).unwrap())
                    .collect();
                for (g, e) in got.iter().zip(ising_means(n, h)) {
                    assert!((g - e).abs() < 1e-9);
                }
                let (j1, j2) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let o = cluster_hamiltonian(n, ClusterParams { j1, j2 })
                    .unwrap()
                    .negated();
                let got: Vec<f64> = ca
                    .iter()
                    .map(|s| s.expectation_observable(&o).unwrap())
                    .collect();
                for (g, e) in got.iter().zip(cluster_means(n, j1, j2)) {
                    assert!((g - e).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn means_per_site_do_not_depend_on_n() {
        for (j1, j2) in [(0.3, -1.7), (1.2, 0.4), (-0.5, 0.5)] {
            let per_site = |n: usize| -> Vec<f64> {
                let o = cluster_hamiltonian(n, ClusterParams { j1, j2 })
                    .unwrap()
                    .negated();
                cluster_actions(n)
                    .unwrap()
                    .iter()
                    .map(|s| s.expectation_observable(&o).unwrap() / n as f64)
                    .collect()
            };
            let a = per_site(4);
            let b = per_site(10);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ising_phase_sweep() {
        let actions = ising_actions(6).unwrap();
        for i in 0..=400 {
            let h = (i as f64 - 200.0) / 100.0;
            let o = ising_hamiltonian(6, IsingParams { h }).unwrap().negated();
            let means: Vec<f64> = actions
                .iter()
                .map(|s| s.expectation_observable(&o).unwrap())
                .collect();
            assert_eq!(argmax(&means), ising_phase(h), "h = {h}");
        }
    }

    #[test]
    fn cluster_phase_regions() {
        for a in 0..41 {
            for b in 0..41 {
                let j1 = (a as f64 - 20.0) / 10.0;
                let j2 = (b as f64 - 20.0) / 10.0;
                let expected = argmax(&cluster_means(4, j1, j2));
                assert_eq!(cluster_phase(j1, j2), expected, "({j1}, {j2})");
                let m = j1.abs().max(j2.abs());
                if m < 1.0 {
                    assert_eq!(expected, 4);
                } else if j1 > 1.0_f64.max(j2.abs()) {
                    assert_eq!(expected, 2);
                } else if -j1 > 1.0_f64.max(j2.abs()) {
                    assert_eq!(expected, 0);
                } else if j2 > 1.0_f64.max(j1.abs()) {
                    assert_eq!(expected, 1);
                } else if -j2 > 1.0_f64.max(j1.abs()) {
                    assert_eq!(expected, 3);
                }
            }
        }
    }

    #[test]
    fn sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fixed = ContextDistribution::Ising {
            h: Interval::new(1.0, 1.0).unwrap(),
        };
        for _ in 0..10 {
            let (p, _) = sample_context(&fixed, 4, &mut rng).unwrap();
            assert_eq!(p, ContextParams::Ising(IsingParams { h: 1.0 }));
        }

        let dist = ContextDistribution::default_for(Family::Ising);
        let draws = 100_000;
        let mut sum = 0.0;
        let ContextDistribution::Ising { h } = dist else {
            unreachable!()
        };
        for _ in 0..draws {
            sum += h.sample(&mut rng);
        }
        assert!((sum / draws as f64).abs() < 0.03);

        let cl = ContextDistribution::default_for(Family::Cluster);
        let (p, o) = sample_context(&cl, 4, &mut rng).unwrap();
        let ContextParams::Cluster(ClusterParams { j1, j2 }) = p else {
            panic!("wrong family")
        };
        assert_ne!(j1, j2);
        assert_eq!(
            o,
            cluster_hamiltonian(4, ClusterParams { j1, j2 })
                .unwrap()
                .negated()
        );
    }

    #[test]
    fn intervals_validate() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(f64::NAN, 0.0).is_err());
        assert_eq!("cluster".parse::<Family>().unwrap(), Family::Cluster);
        assert!("potts".parse::<Family>().is_err());
    }

    #[test]
    fn context_norm_bound_is_attained_at_the_corner() {
        let dist = ContextDistribution::default_for(Family::Cluster);
        let o = cluster_hamiltonian(10, ClusterParams { j1: -2.0, j2: 2.0 }).unwrap();
        assert!((dist.max_context_norm(10) - o.norm()).abs() < 1e-12);
        let dist = ContextDistribution::default_for(Family::Ising);
        let o = ising_hamiltonian(10, IsingParams { h: 2.0 }).unwrap();
        assert!((dist.max_context_norm(10) - o.norm()).abs() < 1e-12);
    }
}
