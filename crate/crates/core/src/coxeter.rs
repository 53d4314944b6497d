//! Finite Coxeter groups as enumerated element tables.
//!
//! Elements are discovered breadth-first by length, expanding parents in
//! table order and generators in ascending order, so the first word reaching
//! an element is its ShortLex-minimal reduced word. Element identity during
//! enumeration comes from an exact signed-permutation model for the classical
//! types A, B and D and from the geometric representation (rounded matrix
//! fingerprints) otherwise.
//!
//! Generator indices are 0-based throughout the API.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMat;

pub const DEFAULT_BUDGET: usize = 50_000;

/// Absolute tolerance of the geometric fingerprints.
const FINGERPRINT_SCALE: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct CoxeterMatrix {
    n: usize,
    m: Vec<u32>,
}

impl CoxeterMatrix {
    /// Builds a matrix from rows. Off-diagonal `0` stands for an infinite
    /// bond and is rejected like any other entry below 2.
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        let mut m = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCoxeterMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            m.extend_from_slice(row);
        }
        for i in 0..n {
            if m[i * n + i] != 1 {
                return Err(Error::InvalidCoxeterMatrix(format!(
                    "diagonal entry m[{0}][{0}] must be 1",
                    i + 1
                )));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = m[i * n + j];
                if v != m[j * n + i] {
                    return Err(Error::InvalidCoxeterMatrix(format!(
                        "not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if v == 0 {
                    return Err(Error::InvalidCoxeterMatrix(format!(
                        "infinite bond at ({}, {}) is not supported",
                        i + 1,
                        j + 1
                    )));
                }
                if v < 2 {
                    return Err(Error::InvalidCoxeterMatrix(format!(
                        "off-diagonal entry at ({}, {}) must be >= 2",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(CoxeterMatrix { n, m })
    }

    fn from_bonds(n: usize, bonds: &[(usize, usize, u32)]) -> Self {
        let mut m = vec![2; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        for &(i, j, v) in bonds {
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
        CoxeterMatrix { n, m }
    }

    /// `A_n`, the symmetric group on `n + 1` letters.
    pub fn type_a(n: usize) -> Self {
        let bonds: Vec<_> = (1..n).map(|i| (i - 1, i, 3)).collect();
        Self::from_bonds(n, &bonds)
    }

    /// `B_n` with the 4-bond between the last two generators.
    pub fn type_b(n: usize) -> Self {
        let mut bonds: Vec<_> = (1..n).map(|i| (i - 1, i, 3)).collect();
        if n >= 2 {
            bonds.last_mut().unwrap().2 = 4;
        }
        Self::from_bonds(n, &bonds)
    }

    /// `D_n` (n ≥ 2): a path `s_1 … s_{n-1}` with `s_n` attached to `s_{n-2}`.
    pub fn type_d(n: usize) -> Self {
        assert!(n >= 2, "D_n needs n >= 2");
        let mut bonds: Vec<_> = (1..n - 1).map(|i| (i - 1, i, 3)).collect();
        if n >= 3 {
            bonds.push((n - 3, n - 1, 3));
        }
        Self::from_bonds(n, &bonds)
    }

    /// Dihedral group `I_2(m)` of order `2m`.
    pub fn dihedral(m: u32) -> Self {
        Self::from_bonds(2, &[(0, 1, m)])
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.m[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.m.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// Coxeter matrix of the parabolic subgroup generated by `gens` (in order).
    pub fn restrict(&self, gens: &[usize]) -> Self {
        let k = gens.len();
        let mut m = vec![1; k * k];
        for (a, &i) in gens.iter().enumerate() {
            for (b, &j) in gens.iter().enumerate() {
                m[a * k + b] = self.get(i, j);
            }
        }
        CoxeterMatrix { n: k, m }
    }
}

impl TryFrom<Vec<Vec<u32>>> for CoxeterMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<u32>>) -> Result<Self> {
        CoxeterMatrix::new(rows)
    }
}

impl From<CoxeterMatrix> for Vec<Vec<u32>> {
    fn from(m: CoxeterMatrix) -> Self {
        m.rows()
    }
}

/// Named finite Coxeter types constructible from text such as `A3`, `B_4`,
/// `D4` or `I2(5)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    D(usize),
    I2(u32),
}

impl CoxeterType {
    pub fn matrix(self) -> CoxeterMatrix {
        match self {
            CoxeterType::A(n) => CoxeterMatrix::type_a(n),
            CoxeterType::B(n) => CoxeterMatrix::type_b(n),
            CoxeterType::D(n) => CoxeterMatrix::type_d(n),
            CoxeterType::I2(m) => CoxeterMatrix::dihedral(m),
        }
    }
}

impl FromStr for CoxeterType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidArgument(format!("unknown Coxeter type {s:?}"));
        let upper = t.to_ascii_uppercase();
        if let Some(rest) = upper.strip_prefix("I2") {
            let inner = rest
                .trim_start_matches('_')
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(bad)?;
            let m: u32 = inner.trim().parse().map_err(|_| bad())?;
            if m < 2 {
                return Err(bad());
            }
            return Ok(CoxeterType::I2(m));
        }
        let (head, tail) = upper.split_at(1);
        let n: usize = tail.trim_start_matches('_').parse().map_err(|_| bad())?;
        match head {
            "A" if n >= 1 => Ok(CoxeterType::A(n)),
            "B" if n >= 1 => Ok(CoxeterType::B(n)),
            "D" if n >= 2 => Ok(CoxeterType::D(n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterType::A(n) => write!(f, "A{n}"),
            CoxeterType::B(n) => write!(f, "B{n}"),
            CoxeterType::D(n) => write!(f, "D{n}"),
            CoxeterType::I2(m) => write!(f, "I2({m})"),
        }
    }
}

/// A set of generator indices, stored as a bitmask (rank ≤ 64).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenSet(pub u64);

impl GenSet {
    pub const EMPTY: GenSet = GenSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            GenSet(u64::MAX)
        } else {
            GenSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        GenSet(it.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn insert(self, i: usize) -> Self {
        GenSet(self.0 | (1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: GenSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// All subsets, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = GenSet> {
        // Standard submask enumeration, reversed into increasing order.
        let mut subs = Vec::with_capacity(1 << self.len());
        let mut s = self.0;
        loop {
            subs.push(GenSet(s));
            if s == 0 {
                break;
            }
            s = (s - 1) & self.0;
        }
        subs.into_iter().rev()
    }
}

impl fmt::Display for GenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("s{}", i + 1)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub id: ElementId,
    /// ShortLex-minimal reduced word.
    pub word: Word,
    pub length: usize,
}

/// How element identity is decided during enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Exact signed permutations when the matrix is a standard A/B/D matrix,
    /// geometric fingerprints otherwise.
    Auto,
    /// Rounded matrices of the geometric representation.
    Geometric,
}

#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    matrix: CoxeterMatrix,
    elements: Vec<Element>,
    cayley: Vec<usize>,
    block_sets: Vec<GenSet>,
    sigma0: ElementId,
    reduced_words_seen: usize,
    block_set_conflicts: usize,
}

trait Realization {
    type State;
    fn identity(&self) -> Self::State;
    fn right_mul(&self, state: &Self::State, s: usize) -> Self::State;
    fn key(&self, state: &Self::State) -> Vec<i64>;
}

/// Signed permutations of `1..=k`; `w[p]` is the signed image of `p + 1`.
struct SignedPerms {
    gens: Vec<Vec<i32>>,
    points: usize,
}

impl SignedPerms {
    fn swap(points: usize, a: usize) -> Vec<i32> {
        let mut g: Vec<i32> = (1..=points as i32).collect();
        g.swap(a, a + 1);
        g
    }

    fn for_matrix(m: &CoxeterMatrix) -> Option<Self> {
        let n = m.rank();
        if n == 0 {
            return None;
        }
        if *m == CoxeterMatrix::type_a(n) {
            let points = n + 1;
            let gens = (0..n).map(|i| Self::swap(points, i)).collect();
            return Some(SignedPerms { gens, points });
        }
        if n >= 2 && *m == CoxeterMatrix::type_b(n) {
            let mut gens: Vec<_> = (0..n - 1).map(|i| Self::swap(n, i)).collect();
            let mut flip: Vec<i32> = (1..=n as i32).collect();
            flip[n - 1] = -(n as i32);
            gens.push(flip);
            return Some(SignedPerms { gens, points: n });
        }
        if n >= 2 && *m == CoxeterMatrix::type_d(n) {
            let mut gens: Vec<_> = (0..n - 1).map(|i| Self::swap(n, i)).collect();
            let mut g: Vec<i32> = (1..=n as i32).collect();
            g[n - 2] = -(n as i32);
            g[n - 1] = -(n as i32 - 1);
            gens.push(g);
            return Some(SignedPerms { gens, points: n });
        }
        None
    }
}

impl Realization for SignedPerms {
    type State = Vec<i32>;

    fn identity(&self) -> Vec<i32> {
        (1..=self.points as i32).collect()
    }

    fn right_mul(&self, w: &Vec<i32>, s: usize) -> Vec<i32> {
        self.gens[s]
            .iter()
            .map(|&g| {
                let img = w[g.unsigned_abs() as usize - 1];
                if g < 0 {
                    -img
                } else {
                    img
                }
            })
            .collect()
    }

    fn key(&self, w: &Vec<i32>) -> Vec<i64> {
        w.iter().map(|&x| x as i64).collect()
    }
}

/// Geometric representation: `s_i(α_j) = α_j + 2 cos(π/m_ij) α_i`.
struct Geometric {
    gens: Vec<RMat>,
    n: usize,
}

impl Geometric {
    fn new(m: &CoxeterMatrix) -> Self {
        let n = m.rank();
        let bilinear = |i: usize, j: usize| -> f64 {
            if i == j {
                1.0
            } else {
                -(std::f64::consts::PI / m.get(i, j) as f64).cos()
            }
        };
        let gens = (0..n)
            .map(|i| {
                RMat::from_fn(n, n, |k, j| {
                    let delta = if k == j { 1.0 } else { 0.0 };
                    if k == i {
                        delta - 2.0 * bilinear(i, j)
                    } else {
                        delta
                    }
                })
            })
            .collect();
        Geometric { gens, n }
    }
}

impl Realization for Geometric {
    type State = RMat;

    fn identity(&self) -> RMat {
        RMat::identity(self.n, self.n)
    }

    fn right_mul(&self, state: &RMat, s: usize) -> RMat {
        state * &self.gens[s]
    }

    fn key(&self, state: &RMat) -> Vec<i64> {
        state
            .iter()
            .map(|x| {
                let k = (x * FINGERPRINT_SCALE).round() as i64;
                // Collapse -0.
                if k == 0 {
                    0
                } else {
                    k
                }
            })
            .collect()
    }
}

struct Table {
    words: Vec<Word>,
    lengths: Vec<usize>,
    cayley: Vec<usize>,
    block_sets: Vec<GenSet>,
    reduced_words_seen: usize,
    block_set_conflicts: usize,
}

fn enumerate<R: Realization>(n: usize, budget: usize, real: &R) -> Result<Table> {
    const UNSET: usize = usize::MAX;
    let mut states = vec![real.identity()];
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    index.insert(real.key(&states[0]), 0);
    let mut t = Table {
        words: vec![Word::default()],
        lengths: vec![0],
        cayley: vec![UNSET; n],
        block_sets: vec![GenSet::EMPTY],
        reduced_words_seen: 1,
        block_set_conflicts: 0,
    };

    let mut head = 0;
    while head < states.len() {
        for s in 0..n {
            if t.cayley[head * n + s] != UNSET {
                continue;
            }
            let next = real.right_mul(&states[head], s);
            let key = real.key(&next);
            let target = match index.get(&key) {
                Some(&j) => {
                    let (lh, lj) = (t.lengths[head], t.lengths[j]);
                    if lj != lh + 1 {
                        return Err(Error::InvalidCoxeterMatrix(format!(
                            "right multiplication changed length by {} (realization not faithful)",
                            lj as i64 - lh as i64
                        )));
                    }
                    // Another reduced word for j ending in s.
                    t.reduced_words_seen += 1;
                    if t.block_sets[j] != t.block_sets[head].insert(s) {
                        t.block_set_conflicts += 1;
                    }
                    j
                }
                None => {
                    let j = states.len();
                    if j >= budget {
                        return Err(Error::BudgetExceeded { budget });
                    }
                    let mut w = t.words[head].clone();
                    w.0.push(s);
                    t.words.push(w);
                    t.lengths.push(t.lengths[head] + 1);
                    t.block_sets.push(t.block_sets[head].insert(s));
                    t.cayley.extend(std::iter::repeat_n(UNSET, n));
                    t.reduced_words_seen += 1;
                    index.insert(key, j);
                    states.push(next);
                    j
                }
            };
            t.cayley[head * n + s] = target;
            t.cayley[target * n + s] = head;
        }
        head += 1;
    }
    Ok(t)
}

impl CoxeterSystem {
    pub fn build(m: &CoxeterMatrix) -> Result<Self> {
        Self::build_with(m, DEFAULT_BUDGET, Backend::Auto)
    }

    pub fn build_with_budget(m: &CoxeterMatrix, budget: usize) -> Result<Self> {
        Self::build_with(m, budget, Backend::Auto)
    }

    pub fn build_with(m: &CoxeterMatrix, budget: usize, backend: Backend) -> Result<Self> {
        let n = m.rank();
        if n > 64 {
            return Err(Error::InvalidCoxeterMatrix("rank above 64".into()));
        }
        let table = match (backend, SignedPerms::for_matrix(m)) {
            (Backend::Auto, Some(perms)) => enumerate(n, budget, &perms)?,
            _ => enumerate(n, budget, &Geometric::new(m))?,
        };
        let elements: Vec<Element> = table
            .words
            .into_iter()
            .zip(table.lengths)
            .enumerate()
            .map(|(i, (word, length))| Element {
                id: ElementId(i),
                word,
                length,
            })
            .collect();
        let max_len = elements.iter().map(|e| e.length).max().unwrap_or(0);
        let longest: Vec<_> = elements.iter().filter(|e| e.length == max_len).collect();
        if longest.len() != 1 {
            return Err(Error::InvalidCoxeterMatrix(format!(
                "{} elements of maximal length (expected a unique longest element)",
                longest.len()
            )));
        }
        let sigma0 = longest[0].id;
        Ok(CoxeterSystem {
            matrix: m.clone(),
            elements,
            cayley: table.cayley,
            block_sets: table.block_sets,
            sigma0,
            reduced_words_seen: table.reduced_words_seen,
            block_set_conflicts: table.block_set_conflicts,
        })
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> ElementId {
        ElementId(0)
    }

    pub fn sigma0(&self) -> ElementId {
        self.sigma0
    }

    pub fn generators(&self) -> GenSet {
        GenSet::full(self.rank())
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.order()).map(ElementId)
    }

    fn check(&self, a: ElementId) -> Result<()> {
        if a.0 < self.order() {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                id: a.0,
                order: self.order(),
            })
        }
    }

    fn check_set(&self, j: GenSet) -> Result<()> {
        if j.is_subset(self.generators()) {
            Ok(())
        } else {
            Err(Error::InvalidGenerator {
                index: j.iter().find(|&i| i >= self.rank()).unwrap_or(64),
                count: self.rank(),
            })
        }
    }

    pub fn element(&self, a: ElementId) -> Result<&Element> {
        self.check(a)?;
        Ok(&self.elements[a.0])
    }

    /// `a · s` for a generator `s`.
    pub fn right_mul(&self, a: ElementId, s: usize) -> Result<ElementId> {
        self.check(a)?;
        if s >= self.rank() {
            return Err(Error::InvalidGenerator {
                index: s,
                count: self.rank(),
            });
        }
        Ok(self.step(a, s))
    }

    #[inline]
    pub(crate) fn step(&self, a: ElementId, s: usize) -> ElementId {
        ElementId(self.cayley[a.0 * self.rank() + s])
    }

    /// The element spelled by an arbitrary (not necessarily reduced) word.
    pub fn element_of_word(&self, word: &[usize]) -> Result<ElementId> {
        word.iter()
            .try_fold(self.identity(), |acc, &s| self.right_mul(acc, s))
    }

    pub fn multiply(&self, a: ElementId, b: ElementId) -> Result<ElementId> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.elements[b.0]
            .word
            .0
            .iter()
            .fold(a, |acc, &s| self.step(acc, s)))
    }

    pub fn invert(&self, a: ElementId) -> Result<ElementId> {
        self.check(a)?;
        Ok(self.elements[a.0]
            .word
            .0
            .iter()
            .rev()
            .fold(self.identity(), |acc, &s| self.step(acc, s)))
    }

    pub fn length(&self, a: ElementId) -> Result<usize> {
        Ok(self.element(a)?.length)
    }

    /// Generators appearing in a reduced word of `a`.
    pub fn block_set(&self, a: ElementId) -> Result<GenSet> {
        self.check(a)?;
        Ok(self.block_sets[a.0])
    }

    pub fn block_length(&self, a: ElementId) -> Result<usize> {
        Ok(self.block_set(a)?.len())
    }

    /// `J_σ = { s : |σ s| = |σ| + 1 }`.
    pub fn descent_complement(&self, a: ElementId) -> Result<GenSet> {
        self.check(a)?;
        let len = self.elements[a.0].length;
        Ok(GenSet::from_indices(
            (0..self.rank()).filter(|&s| self.elements[self.step(a, s).0].length == len + 1),
        ))
    }

    /// Minimal-length coset representatives `D_J` of `W / W_J`, in id order.
    pub fn coset_minima(&self, j: GenSet) -> Result<Vec<ElementId>> {
        self.check_set(j)?;
        let mut out = Vec::new();
        for a in self.ids() {
            if j.is_subset(self.descent_complement(a)?) {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// `Σ_{J ⊆ J_σ} (-1)^{|J|}`, evaluated by explicit subset enumeration.
    pub fn euler_solomon(&self, a: ElementId) -> Result<i64> {
        let jset = self.descent_complement(a)?;
        Ok(jset
            .subsets()
            .map(|sub| if sub.len() % 2 == 0 { 1 } else { -1 })
            .sum())
    }

    pub fn enumerate_parabolic(&self, j: GenSet) -> Result<Parabolic> {
        self.check_set(j)?;
        let gens: Vec<usize> = j.iter().collect();
        let sub_matrix = self.matrix.restrict(&gens);
        let subsystem = CoxeterSystem::build_with_budget(&sub_matrix, self.order().max(1))?;
        let embedding = subsystem
            .elements
            .iter()
            .map(|e| {
                e.word
                    .0
                    .iter()
                    .fold(self.identity(), |acc, &s| self.step(acc, gens[s]))
            })
            .collect();
        Ok(Parabolic {
            subsystem,
            generators: gens,
            embedding,
        })
    }

    /// Verifies `W = D_J · W_J` with unique factorisations and additive lengths.
    pub fn coset_factorization(&self, j: GenSet) -> Result<CosetCheck> {
        let minima = self.coset_minima(j)?;
        let para = self.enumerate_parabolic(j)?;
        let mut hits = vec![0usize; self.order()];
        let mut lengths_add = true;
        for &tau in &minima {
            for (sub, &w) in para.embedding.iter().enumerate() {
                let prod = self.multiply(tau, w)?;
                hits[prod.0] += 1;
                let expected = self.elements[tau.0].length + para.subsystem.elements[sub].length;
                lengths_add &= self.elements[prod.0].length == expected;
            }
        }
        Ok(CosetCheck {
            cosets: minima.len(),
            subgroup_order: para.subsystem.order(),
            bijective: hits.iter().all(|&h| h == 1),
            lengths_add,
        })
    }

    /// Number of elements of each length, index = length.
    pub fn length_counts(&self) -> Vec<u64> {
        let max = self.elements[self.sigma0.0].length;
        let mut counts = vec![0u64; max + 1];
        for e in &self.elements {
            counts[e.length] += 1;
        }
        counts
    }

    /// Total reduced words examined while building the table, and how many of
    /// them disagreed with the canonical block set.
    pub fn reduced_word_stats(&self) -> (usize, usize) {
        (self.reduced_words_seen, self.block_set_conflicts)
    }

    pub fn block_sets_consistent(&self) -> bool {
        self.block_set_conflicts == 0
    }

    /// Rewrites the canonical word of `a` by `moves` random braid moves. The
    /// result is again a reduced word for `a`.
    pub fn random_reduced_word<R: Rng + ?Sized>(&self, a: ElementId, rng: &mut R, moves: usize) -> Result<Word> {
        let mut word = self.element(a)?.word.0.clone();
        let mut sites = Vec::new();
        for _ in 0..moves {
            sites.clear();
            for p in 0..word.len() {
                for t in 0..self.rank() {
                    let s = word[p];
                    if t == s {
                        continue;
                    }
                    let m = self.matrix.get(s, t) as usize;
                    if p + m > word.len() {
                        continue;
                    }
                    let alternating = (0..m).all(|k| word[p + k] == if k % 2 == 0 { s } else { t });
                    if alternating {
                        sites.push((p, s, t, m));
                    }
                }
            }
            if sites.is_empty() {
                break;
            }
            let (p, s, t, m) = sites[rng.random_range(0..sites.len())];
            for k in 0..m {
                word[p + k] = if k % 2 == 0 { t } else { s };
            }
        }
        Ok(Word(word))
    }
}

#[derive(Debug, Clone)]
pub struct Parabolic {
    /// `W_J` as a Coxeter system in its own right; generator `k` is `generators[k]` of `W`.
    pub subsystem: CoxeterSystem,
    pub generators: Vec<usize>,
    /// Element of `W` for each element id of the subsystem.
    pub embedding: Vec<ElementId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CosetCheck {
    pub cosets: usize,
    pub subgroup_order: usize,
    pub bijective: bool,
    pub lengths_add: bool,
}

/// `Π_{k=1}^{n} (1 + q + … + q^{k-1})` as integer coefficients.
pub fn q_factorial(n: usize) -> Vec<i64> {
    let mut poly = vec![1i64];
    for k in 1..=n {
        let mut next = vec![0i64; poly.len() + k - 1];
        for (i, &a) in poly.iter().enumerate() {
            for j in 0..k {
                next[i + j] += a;
            }
        }
        poly = next;
    }
    poly
}
