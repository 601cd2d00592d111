//! Pauli strings and real-weighted Pauli-sum observables.
//!
//! A string is stored in symplectic form: one bit vector for the X part and one
//! for the Z part, packed into 64-bit words. `Y` sets both bits. Products track
//! the phase as a power of `i`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use rand::Rng;

use crate::error::{QcbError, Result};

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ];

    fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }
}

/// A fourth root of unity, stored as the exponent `k` in `i^k`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    /// `Some(±1.0)` for a real phase, `None` for `±i`.
    pub fn as_real(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn from_sign(sign: f64) -> Self {
        if sign < 0.0 {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// An n-qubit tensor product of single-site Paulis. Site 0 is the leftmost
/// letter in the textual form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (site, &l) in letters.iter().enumerate() {
            p.set(site, l);
        }
        p
    }

    /// Identity everywhere except the listed `(site, letter)` pairs.
    ///
    /// Panics if a site is out of range.
    pub fn from_sites(n: usize, sites: &[(usize, PauliLetter)]) -> Self {
        let mut p = PauliString::identity(n);
        for &(site, l) in sites {
            p.set(site, l);
        }
        p
    }

    /// Builds a string from its symplectic bit vectors. Bits at or beyond `n`
    /// must be clear.
    pub fn from_symplectic(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        debug_assert_eq!(z.len(), words_for(n));
        PauliString { n, x, z }
    }

    /// Uniform over all `4^n` strings, identity included.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = PauliString::identity(n);
        for site in 0..n {
            p.set(site, PauliLetter::ALL[rng.random_range(0..4)]);
        }
        p
    }

    /// The `index`-th string in base-4 order (`I, X, Y, Z` per site, site 0
    /// most significant). Used to enumerate the full Pauli basis for small n.
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut p = PauliString::identity(n);
        for site in (0..n).rev() {
            p.set(site, PauliLetter::ALL[index % 4]);
            index /= 4;
        }
        p
    }

    /// Inverse of [`PauliString::from_index`].
    pub fn index(&self) -> usize {
        (0..self.n).fold(0, |acc, site| {
            let digit = match self.letter(site) {
                PauliLetter::I => 0,
                PauliLetter::X => 1,
                PauliLetter::Y => 2,
                PauliLetter::Z => 3,
            };
            acc * 4 + digit
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn letter(&self, site: usize) -> PauliLetter {
        assert!(
            site < self.n,
            "site {site} out of range for {} qubits",
            self.n
        );
        let (w, b) = (site / WORD, site % WORD);
        PauliLetter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, site: usize, letter: PauliLetter) {
        assert!(
            site < self.n,
            "site {site} out of range for {} qubits",
            self.n
        );
        let (w, b) = (site / WORD, site % WORD);
        let (xb, zb) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn letters(&self) -> impl Iterator<Item = PauliLetter> + '_ {
        (0..self.n).map(|s| self.letter(s))
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn x_bits(&self) -> &[u64] {
        &self.x
    }

    pub fn z_bits(&self) -> &[u64] {
        &self.z
    }

    fn check_same(&self, other: &PauliString) -> Result<()> {
        QcbError::check_dim(self.n, other.n)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QcbError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|c| {
                PauliLetter::from_char(c)
                    .ok_or_else(|| QcbError::Parse(format!("bad Pauli letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(QcbError::Parse("empty Pauli string".into()));
        }
        Ok(PauliString::from_letters(&letters))
    }
}

/// A Pauli string times a fourth root of unity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: Phase,
    pub string: PauliString,
}

impl PhasedPauli {
    pub fn new(phase: Phase, string: PauliString) -> Self {
        PhasedPauli { phase, string }
    }

    pub fn identity(n: usize) -> Self {
        PhasedPauli::new(Phase::ONE, PauliString::identity(n))
    }

    pub fn mul(&self, rhs: &PhasedPauli) -> Result<PhasedPauli> {
        let prod = pauli_product(&self.string, &rhs.string)?;
        Ok(PhasedPauli::new(
            self.phase * rhs.phase * prod.phase,
            prod.string,
        ))
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase, self.string)
    }
}

/// Matrix product `p·q = phase·r` of two Pauli strings.
pub fn pauli_product(p: &PauliString, q: &PauliString) -> Result<PhasedPauli> {
    p.check_same(q)?;
    // Per-site exponent of i, summed over sites:
    //   X·Y = +i Z, X·Z = -i Y, Y·Z = +i X, Y·X = -i Z, Z·X = +i Y, Z·Y = -i X
    let mut plus = 0u32;
    let mut minus = 0u32;
    for w in 0..p.x.len() {
        let (x1, z1, x2, z2) = (p.x[w], p.z[w], q.x[w], q.z[w]);
        let px = x1 & !z1;
        let py = x1 & z1;
        let pz = !x1 & z1;
        let qx = x2 & !z2;
        let qy = x2 & z2;
        let qz = !x2 & z2;
        plus += (px & qy).count_ones() + (py & qz).count_ones() + (pz & qx).count_ones();
        minus += (px & qz).count_ones() + (py & qx).count_ones() + (pz & qy).count_ones();
    }
    let exponent = (plus + 3 * minus) % 4;
    let x = p.x.iter().zip(&q.x).map(|(a, b)| a ^ b).collect();
    let z = p.z.iter().zip(&q.z).map(|(a, b)| a ^ b).collect();
    Ok(PhasedPauli::new(
        Phase::from_exponent(exponent),
        PauliString { n: p.n, x, z },
    ))
}

/// Whether `p` and `q` commute: the symplectic form vanishes over GF(2).
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.check_same(q)?;
    let form: u32 = (0..p.x.len())
        .map(|w| ((p.x[w] & q.z[w]) ^ (p.z[w] & q.x[w])).count_ones())
        .sum();
    Ok(form.is_multiple_of(2))
}

/// A real linear combination of Pauli strings on `n` qubits.
///
/// Canonical form: no duplicate strings, no coefficient exactly `0.0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl Observable {
    pub fn zero(n: usize) -> Self {
        Observable {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Builds from a term list, merging repeated strings by adding their
    /// coefficients.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut o = Observable::zero(n);
        for (p, w) in terms {
            o.add_term(p, w)?;
        }
        Ok(o)
    }

    pub fn single(p: PauliString, weight: f64) -> Self {
        let n = p.num_qubits();
        let mut terms = BTreeMap::new();
        if weight != 0.0 {
            terms.insert(p, weight);
        }
        Observable { n, terms }
    }

    pub fn add_term(&mut self, p: PauliString, weight: f64) -> Result<()> {
        QcbError::check_dim(self.n, p.num_qubits())?;
        match self.terms.entry(p) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += weight;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if weight != 0.0 {
                    e.insert(weight);
                }
            }
        }
        Ok(())
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Observable, scale: f64) -> Result<()> {
        QcbError::check_dim(self.n, other.n)?;
        for (p, &w) in &other.terms {
            let entry = self.terms.entry(p.clone()).or_insert(0.0);
            *entry += scale * w;
        }
        self.terms.retain(|_, w| *w != 0.0);
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Observable {
        let terms = self
            .terms
            .iter()
            .map(|(p, &w)| (p.clone(), w * factor))
            .filter(|(_, w)| *w != 0.0)
            .collect();
        Observable { n: self.n, terms }
    }

    pub fn negated(&self) -> Observable {
        self.scaled(-1.0)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> + '_ {
        self.terms.iter().map(|(p, &w)| (p, w))
    }

    /// Sum of absolute coefficients; bounds any per-term measurement sum.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|w| w.abs()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Reads the `coeff<TAB>letters` line format written by `Display`. Blank
    /// lines are skipped; the qubit count comes from the first string.
    pub fn parse(text: &str) -> Result<Observable> {
        let mut n = None;
        let mut terms = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (coeff, letters) = line.split_once(char::is_whitespace).ok_or_else(|| {
                QcbError::Parse(format!("expected `coeff<TAB>letters`, got {line:?}"))
            })?;
            let w: f64 = coeff
                .parse()
                .map_err(|_| QcbError::Parse(format!("bad coefficient {coeff:?}")))?;
            let p: PauliString = letters.parse()?;
            n.get_or_insert(p.num_qubits());
            terms.push((p, w));
        }
        let n = n.ok_or_else(|| QcbError::Parse("no terms; qubit count unknown".into()))?;
        Observable::from_terms(n, terms)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, w) in &self.terms {
            writeln!(f, "{w}\t{p}")?;
        }
        Ok(())
    }
}

/// Hilbert-Schmidt inner product normalised by the dimension, `Tr(ab)/2^n`.
/// Distinct strings are trace-orthogonal, so only shared keys contribute.
pub fn hs_inner(a: &Observable, b: &Observable) -> Result<f64> {
    QcbError::check_dim(a.n, b.n)?;
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    Ok(small
        .terms
        .iter()
        .filter_map(|(p, w)| large.terms.get(p).map(|v| w * v))
        .sum())
}
