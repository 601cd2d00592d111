//! Stabilizer states used as bandit actions, with exact Pauli expectations.

use std::fmt;

use rand::Rng;

use crate::error::{QcbError, Result};
use crate::pauli::{commutes, Observable, PauliLetter, PauliString, Phase, PhasedPauli};

/// Row-reduced symplectic matrix of the generators. Each row remembers which
/// generators were XORed together to produce it.
#[derive(Clone, Debug)]
struct Reduction {
    rows: Vec<Row>,
}

#[derive(Clone, Debug)]
struct Row {
    bits: Vec<u64>,
    pivot: usize,
    combo: Vec<u64>,
}

fn bit(v: &[u64], i: usize) -> bool {
    (v[i / 64] >> (i % 64)) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn symplectic(p: &PauliString) -> Vec<u64> {
    // X part in the first half, Z part in the second, on separate word ranges
    // so bit offsets stay word-aligned.
    let mut v = p.x_bits().to_vec();
    v.extend_from_slice(p.z_bits());
    v
}

impl Reduction {
    /// Returns `None` when the generators are linearly dependent over GF(2).
    fn build(generators: &[PhasedPauli]) -> Option<Reduction> {
        let k = generators.len();
        let combo_words = k.div_ceil(64).max(1);
        let mut pending: Vec<(Vec<u64>, Vec<u64>)> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut combo = vec![0u64; combo_words];
                combo[i / 64] |= 1 << (i % 64);
                (symplectic(&g.string), combo)
            })
            .collect();
        let total_bits = pending.first().map_or(0, |(b, _)| b.len() * 64);

        let mut rows: Vec<Row> = Vec::with_capacity(k);
        for col in 0..total_bits {
            let Some(idx) = pending.iter().position(|(b, _)| bit(b, col)) else {
                continue;
            };
            let (bits, combo) = pending.swap_remove(idx);
            for (b, c) in pending.iter_mut() {
                if bit(b, col) {
                    xor_into(b, &bits);
                    xor_into(c, &combo);
                }
            }
            for r in rows.iter_mut() {
                if bit(&r.bits, col) {
                    xor_into(&mut r.bits, &bits);
                    xor_into(&mut r.combo, &combo);
                }
            }
            rows.push(Row {
                bits,
                pivot: col,
                combo,
            });
        }
        // Anything left over reduced to zero: a dependent generator.
        if rows.len() < k {
            return None;
        }
        Some(Reduction { rows })
    }

    /// Generator subset whose product has the same symplectic vector as `p`,
    /// or `None` if `p` is outside their span.
    fn solve(&self, p: &PauliString, combo_words: usize) -> Option<Vec<u64>> {
        let mut target = symplectic(p);
        let mut combo = vec![0u64; combo_words];
        for r in &self.rows {
            if bit(&target, r.pivot) {
                xor_into(&mut target, &r.bits);
                xor_into(&mut combo, &r.combo);
            }
        }
        target.iter().all(|&w| w == 0).then_some(combo)
    }
}

/// A pure n-qubit state fixed by n commuting, independent, signed Pauli
/// generators.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    generators: Vec<PhasedPauli>,
    label: String,
    reduction: Reduction,
}

impl StabilizerState {
    /// Validates the generator set: exactly `n` of them, real phases, pairwise
    /// commuting and GF(2)-independent.
    pub fn new(n: usize, generators: Vec<PhasedPauli>, label: impl Into<String>) -> Result<Self> {
        if n == 0 {
            return Err(QcbError::config(
                "stabilizer state needs at least one qubit",
            ));
        }
        if generators.len() != n {
            return Err(QcbError::Invariant(format!(
                "{} generators given for {n} qubits",
                generators.len()
            )));
        }
        for g in &generators {
            QcbError::check_dim(n, g.string.num_qubits())?;
            if g.phase.as_real().is_none() {
                return Err(QcbError::Invariant(format!(
                    "generator {g} is not Hermitian"
                )));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !commutes(&a.string, &b.string)? {
                    return Err(QcbError::Invariant(format!(
                        "generators {a} and {b} anticommute"
                    )));
                }
            }
        }
        let reduction = Reduction::build(&generators)
            .ok_or_else(|| QcbError::Invariant("generators are not independent".into()))?;
        Ok(StabilizerState {
            n,
            generators,
            label: label.into(),
            reduction,
        })
    }

    fn product_state(
        n: usize,
        letter_at: impl Fn(usize) -> (Phase, PauliLetter),
        label: &str,
    ) -> Result<Self> {
        let gens = (0..n)
            .map(|i| {
                let (phase, l) = letter_at(i);
                PhasedPauli::new(phase, PauliString::from_sites(n, &[(i, l)]))
            })
            .collect();
        StabilizerState::new(n, gens, label)
    }

    fn check_min(n: usize, min: usize, what: &str) -> Result<()> {
        if n < min {
            return Err(QcbError::config(format!(
                "{what} needs at least {min} qubits, got {n}"
            )));
        }
        Ok(())
    }

    fn check_even(n: usize, what: &str) -> Result<()> {
        if !n.is_multiple_of(2) {
            return Err(QcbError::config(format!(
                "{what} needs an even qubit count, got {n}"
            )));
        }
        Ok(())
    }

    /// `|+…+⟩`, generators `+X_i`.
    pub fn all_plus(n: usize) -> Result<Self> {
        Self::check_min(n, 2, "all_plus")?;
        Self::product_state(n, |_| (Phase::ONE, PauliLetter::X), "all_plus")
    }

    /// `|−…−⟩`, generators `−X_i`.
    pub fn all_minus(n: usize) -> Result<Self> {
        Self::check_min(n, 2, "all_minus")?;
        Self::product_state(n, |_| (Phase::MINUS_ONE, PauliLetter::X), "all_minus")
    }

    /// `|1…1⟩`, generators `−Z_i`.
    pub fn all_one(n: usize) -> Result<Self> {
        Self::check_min(n, 2, "all_one")?;
        Self::product_state(n, |_| (Phase::MINUS_ONE, PauliLetter::Z), "all_one")
    }

    /// Néel state `|0101…⟩`, generators `+Z_0, −Z_1, +Z_2, …`.
    pub fn neel_z(n: usize) -> Result<Self> {
        Self::check_min(n, 2, "neel_z")?;
        Self::check_even(n, "neel_z")?;
        Self::product_state(n, |i| (alternating(i), PauliLetter::Z), "neel_z")
    }

    /// `|+−+−…⟩`, generators `+X_0, −X_1, +X_2, …`.
    pub fn x_alternating(n: usize) -> Result<Self> {
        Self::check_min(n, 2, "x_alternating")?;
        Self::check_even(n, "x_alternating")?;
        Self::product_state(n, |i| (alternating(i), PauliLetter::X), "x_alternating")
    }

    /// Periodic cluster state with generators `sign·X_{i−1} Z_i X_{i+1}`.
    pub fn cluster_state(n: usize, sign: i8) -> Result<Self> {
        Self::check_min(n, 3, "cluster_state")?;
        let phase = match sign {
            1 => Phase::ONE,
            -1 => Phase::MINUS_ONE,
            s => {
                return Err(QcbError::config(format!(
                    "cluster sign must be +1 or -1, got {s}"
                )))
            }
        };
        let gens = (0..n)
            .map(|i| {
                let sites = [
                    ((i + n - 1) % n, PauliLetter::X),
                    (i, PauliLetter::Z),
                    ((i + 1) % n, PauliLetter::X),
                ];
                PhasedPauli::new(phase, PauliString::from_sites(n, &sites))
            })
            .collect();
        let label = if sign > 0 {
            "cluster_plus"
        } else {
            "cluster_minus"
        };
        StabilizerState::new(n, gens, label)
    }

    /// A random stabilizer state built by greedily accepting random strings
    /// that commute with, and are independent of, those already chosen.
    /// Signs are uniform. Not the uniform measure over stabilizer states.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut gens: Vec<PhasedPauli> = Vec::with_capacity(n);
        while gens.len() < n {
            let p = PauliString::random(n, rng);
            if p.is_identity() {
                continue;
            }
            let mut ok = true;
            for g in &gens {
                if !commutes(&g.string, &p)? {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let phase = if rng.random_bool(0.5) {
                Phase::ONE
            } else {
                Phase::MINUS_ONE
            };
            gens.push(PhasedPauli::new(phase, p));
            if Reduction::build(&gens).is_none() {
                gens.pop();
            }
        }
        StabilizerState::new(n, gens, "random")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PhasedPauli] {
        &self.generators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Tr(ρ p)`: the sign `σ` when `σ·p` lies in the stabilizer group, else 0.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        QcbError::check_dim(self.n, p.num_qubits())?;
        if p.is_identity() {
            return Ok(1.0);
        }
        let combo_words = self.n.div_ceil(64);
        let Some(combo) = self.reduction.solve(p, combo_words) else {
            return Ok(0.0);
        };
        let mut acc = PhasedPauli::identity(self.n);
        for (i, g) in self.generators.iter().enumerate() {
            if bit(&combo, i) {
                acc = acc.mul(g)?;
            }
        }
        if acc.string != *p {
            return Err(QcbError::Invariant(format!(
                "reduction produced {} instead of {p}",
                acc.string
            )));
        }
        acc.phase.as_real().ok_or_else(|| {
            QcbError::Invariant(format!("imaginary phase {} accumulated for {p}", acc.phase))
        })
    }

    /// `Tr(ρ O)` summed term by term.
    pub fn expectation_observable(&self, o: &Observable) -> Result<f64> {
        QcbError::check_dim(self.n, o.num_qubits())?;
        let mut total = 0.0;
        for (p, w) in o.terms() {
            total += w * self.expectation(p)?;
        }
        Ok(total)
    }
}

fn alternating(i: usize) -> Phase {
    if i.is_multiple_of(2) {
        Phase::ONE
    } else {
        Phase::MINUS_ONE
    }
}

impl fmt::Display for StabilizerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.label)?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("]")
    }
}
