//! Root systems of types A, B, C and D in the simple-root basis.
//!
//! Roots are integer coordinate vectors over the fundamental roots
//! `r_1, ..., r_l`; a fundamental reflection acts through the Cartan
//! integers, so everything here is exact integer arithmetic.
//!
//! Conventions, pinned by tests:
//! * `cartan[i][j] = 2(r_j, r_i) / (r_i, r_i)`, so `w_i(r_j) = r_j - cartan[i][j] r_i`.
//! * B_l has its short fundamental root at `r_1` (`w_1(r_2) = r_2 + 2 r_1`);
//!   C_l has its long fundamental root at `r_l` (`w_{l-1}(r_l) = r_l + 2 r_{l-1}`);
//!   in D_l both `r_1` and `r_2` hang off `r_3`.
//! * A word `w_{a_1} w_{a_2} ... w_{a_m}` acts as a composition of maps, so the
//!   rightmost letter is applied first.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::VerificationReport;

/// Largest rank for which the full root set is enumerated.
pub const MAX_RANK: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("rank {rank} is below the minimum {min} for type {family}")]
    RankTooSmall {
        family: Family,
        rank: usize,
        min: usize,
    },
    #[error("rank {0} exceeds the enumeration cap {MAX_RANK}")]
    RankCapExceeded(usize),
    #[error("reflection index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("root has {got} coordinates, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("unknown series {0:?}")]
    UnknownSeries(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub fn min_rank(self) -> usize {
        match self {
            Family::A | Family::B | Family::C => 2,
            Family::D => 4,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = RootError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            other => Err(RootError::UnknownSeries(other.to_string())),
        }
    }
}

/// A family together with its rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesType {
    family: Family,
    rank: usize,
}

impl SeriesType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootError> {
        if rank < family.min_rank() {
            return Err(RootError::RankTooSmall {
                family,
                rank,
                min: family.min_rank(),
            });
        }
        Ok(SeriesType { family, rank })
    }

    /// Skips the minimum-rank check; used where a smaller diagram is still
    /// meaningful (D_3 as the twisted D^1_3).
    pub(crate) fn new_unchecked(family: Family, rank: usize) -> Self {
        SeriesType { family, rank }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl fmt::Display for SeriesType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.rank)
    }
}

/// A vector in the simple-root basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root(Vec<i32>);

impl Root {
    pub fn new(coords: Vec<i32>) -> Self {
        Root(coords)
    }

    pub fn zero(rank: usize) -> Self {
        Root(vec![0; rank])
    }

    /// The fundamental root `r_i` (1-based).
    pub fn simple(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i - 1] = 1;
        Root(v)
    }

    /// `r_a + r_{a+1} + ... + r_b` (1-based, inclusive); zero when `a > b`.
    pub fn sum(rank: usize, a: usize, b: usize) -> Self {
        let mut v = vec![0; rank];
        for c in v.iter_mut().take(b).skip(a.saturating_sub(1)) {
            *c = 1;
        }
        Root(v)
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// 1-based indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len())
            .filter(|&i| self.0[i] != 0)
            .map(|i| i + 1)
            .collect()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.0.iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}r{}", i + 1)?;
            } else {
                write!(f, "{sign}{mag}r{}", i + 1)?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for &Root {
    type Output = Root;
    fn add(self, rhs: &Root) -> Root {
        Root(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Root {
    type Output = Root;
    fn sub(self, rhs: &Root) -> Root {
        Root(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Root {
    type Output = Root;
    fn neg(self) -> Root {
        Root(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&Root> for i32 {
    type Output = Root;
    fn mul(self, rhs: &Root) -> Root {
        Root(rhs.0.iter().map(|a| self * a).collect())
    }
}

/// Cartan integers, `entries[i][j] = 2(r_j, r_i)/(r_i, r_i)` (0-based storage).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanMatrix {
    entries: Vec<Vec<i32>>,
}

impl CartanMatrix {
    pub fn from_entries(entries: Vec<Vec<i32>>) -> Self {
        CartanMatrix { entries }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// Entry for fundamental roots `i`, `j` (1-based).
    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.entries[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<i32>] {
        &self.entries
    }

    /// Principal submatrix on the given 1-based indices.
    pub fn restrict(&self, indices: &[usize]) -> CartanMatrix {
        CartanMatrix {
            entries: indices
                .iter()
                .map(|&i| indices.iter().map(|&j| self.get(i, j)).collect())
                .collect(),
        }
    }
}

pub fn cartan_matrix(series: SeriesType) -> CartanMatrix {
    let l = series.rank;
    let mut m = vec![vec![0i32; l]; l];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize, ij: i32, ji: i32| {
        m[i - 1][j - 1] = ij;
        m[j - 1][i - 1] = ji;
    };
    match series.family {
        Family::A => (1..l).for_each(|i| link(i, i + 1, -1, -1)),
        Family::B => {
            link(1, 2, -2, -1);
            (2..l).for_each(|i| link(i, i + 1, -1, -1));
        }
        Family::C => {
            (1..l - 1).for_each(|i| link(i, i + 1, -1, -1));
            link(l - 1, l, -2, -1);
        }
        Family::D => {
            link(1, 3, -1, -1);
            link(2, 3, -1, -1);
            (3..l).for_each(|i| link(i, i + 1, -1, -1));
        }
    }
    CartanMatrix { entries: m }
}

/// Relative squared lengths of the fundamental roots, chosen so that
/// `cartan[i][j] * len[i]` is symmetric.
fn root_lengths(series: SeriesType) -> Vec<i32> {
    let l = series.rank;
    match series.family {
        Family::A | Family::D => vec![1; l],
        Family::B => (1..=l).map(|i| if i == 1 { 1 } else { 2 }).collect(),
        Family::C => (1..=l).map(|i| if i == l { 2 } else { 1 }).collect(),
    }
}

/// A product of fundamental reflections, letters 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylWord(Vec<usize>);

impl WeylWord {
    pub fn new(letters: Vec<usize>) -> Self {
        WeylWord(letters)
    }

    /// `w_1 w_2 ... w_l`.
    pub fn coxeter(rank: usize) -> Self {
        WeylWord((1..=rank).collect())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        WeylWord(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &WeylWord) -> Self {
        WeylWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("w{i}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Images of a root under successive applications of a word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub series: String,
    pub word: WeylWord,
    pub start: Root,
    pub steps: Vec<Root>,
}

/// Outcome of the Coxeter-element lemma `w(r_i) = r_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftOutcome {
    Holds,
    Fails,
    /// The orthogonality/length hypotheses do not hold for this index.
    NotApplicable,
}

/// A root system given by a Cartan matrix, with its full root set.
#[derive(Debug, Clone)]
pub struct RootSystem {
    label: String,
    cartan: CartanMatrix,
    lengths: Vec<i32>,
    roots: Vec<Root>,
    index: HashSet<Root>,
}

impl RootSystem {
    pub fn new(series: SeriesType) -> Result<Self, RootError> {
        if series.rank > MAX_RANK {
            return Err(RootError::RankCapExceeded(series.rank));
        }
        Ok(Self::from_cartan(
            series.to_string(),
            cartan_matrix(series),
            root_lengths(series),
        ))
    }

    fn from_cartan(label: String, cartan: CartanMatrix, lengths: Vec<i32>) -> Self {
        let mut sys = RootSystem {
            label,
            cartan,
            lengths,
            roots: Vec::new(),
            index: HashSet::new(),
        };
        sys.enumerate();
        sys
    }

    /// Closure of the fundamental roots under all fundamental reflections.
    fn enumerate(&mut self) {
        let l = self.rank();
        let mut seen: HashSet<Root> = HashSet::new();
        let mut queue: VecDeque<Root> = (1..=l).map(|i| Root::simple(l, i)).collect();
        for r in &queue {
            seen.insert(r.clone());
        }
        while let Some(r) = queue.pop_front() {
            for i in 1..=l {
                let img = self.reflect_unchecked(i, &r);
                if seen.insert(img.clone()) {
                    queue.push_back(img);
                }
            }
        }
        let mut roots: Vec<Root> = seen.iter().cloned().collect();
        roots.sort();
        self.roots = roots;
        self.index = seen;
    }

    /// Sub-system generated by the given fundamental roots (1-based).
    pub fn subsystem(&self, indices: &[usize]) -> RootSystem {
        let lengths = indices.iter().map(|&i| self.lengths[i - 1]).collect();
        let label = format!("{}[{:?}]", self.label, indices);
        RootSystem::from_cartan(label, self.cartan.restrict(indices), lengths)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> Vec<Root> {
        self.roots.iter().filter(|r| r.is_positive()).cloned().collect()
    }

    pub fn contains(&self, r: &Root) -> bool {
        self.index.contains(r)
    }

    pub fn simple(&self, i: usize) -> Root {
        Root::simple(self.rank(), i)
    }

    fn reflect_unchecked(&self, i: usize, v: &Root) -> Root {
        let row = &self.cartan.entries[i - 1];
        let pairing: i32 = v.0.iter().zip(row).map(|(c, a)| c * a).sum();
        let mut out = v.clone();
        out.0[i - 1] -= pairing;
        out
    }

    fn check_dim(&self, v: &Root) -> Result<(), RootError> {
        if v.rank() != self.rank() {
            return Err(RootError::DimensionMismatch {
                got: v.rank(),
                expected: self.rank(),
            });
        }
        Ok(())
    }

    /// Fundamental reflection `w_i` applied to `v`.
    pub fn reflect(&self, i: usize, v: &Root) -> Result<Root, RootError> {
        if i == 0 || i > self.rank() {
            return Err(RootError::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            });
        }
        self.check_dim(v)?;
        Ok(self.reflect_unchecked(i, v))
    }

    pub fn apply_word(&self, word: &WeylWord, v: &Root) -> Result<Root, RootError> {
        self.check_dim(v)?;
        let mut out = v.clone();
        for &i in word.0.iter().rev() {
            out = self.reflect(i, &out)?;
        }
        Ok(out)
    }

    /// `w^power(v)`; negative powers use the inverse word.
    pub fn apply_power(&self, word: &WeylWord, power: i64, v: &Root) -> Result<Root, RootError> {
        let step = if power < 0 { word.inverse() } else { word.clone() };
        let mut out = v.clone();
        for _ in 0..power.unsigned_abs() {
            out = self.apply_word(&step, &out)?;
        }
        Ok(out)
    }

    pub fn orbit(&self, word: &WeylWord, start: &Root, steps: usize) -> Result<OrbitTrace, RootError> {
        let mut cur = start.clone();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            cur = self.apply_word(word, &cur)?;
            out.push(cur.clone());
        }
        Ok(OrbitTrace {
            series: self.label.clone(),
            word: word.clone(),
            start: start.clone(),
            steps: out,
        })
    }

    /// Twice the invariant inner product.
    pub fn form(&self, u: &Root, v: &Root) -> i32 {
        let mut s = 0;
        for (i, &ui) in u.0.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.0.iter().enumerate() {
                s += ui * vj * self.cartan.entries[i][j] * self.lengths[i];
            }
        }
        s
    }

    pub fn orthogonal(&self, u: &Root, v: &Root) -> bool {
        self.form(u, v) == 0
    }

    /// Whether a word permutes the root set.
    pub fn word_permutes_roots(&self, word: &WeylWord) -> bool {
        let mut images = HashSet::with_capacity(self.roots.len());
        for r in &self.roots {
            match self.apply_word(word, r) {
                Ok(img) if self.contains(&img) => {
                    images.insert(img);
                }
                _ => return false,
            }
        }
        images.len() == self.roots.len()
    }

    /// Membership in the sub-system generated by the fundamental roots with
    /// the given indices: the support must lie in the index set and the
    /// restricted vector must be a root of that sub-system.
    pub fn in_subsystem(&self, sub: &RootSystem, indices: &[usize], v: &Root) -> bool {
        if !v.support().iter().all(|i| indices.contains(i)) {
            return false;
        }
        let restricted = Root(indices.iter().map(|&i| v.0[i - 1]).collect());
        sub.contains(&restricted)
    }

    /// Whether the hypotheses of the Coxeter-element lemma hold at index `i`:
    /// `r_i` orthogonal to `r_j` for `j > i+1`, `r_{i+1}` orthogonal to `r_k`
    /// for `k < i`, equal lengths and `w_i(r_{i+1}) = r_i + r_{i+1}`.
    pub fn shift_applies(&self, i: usize) -> bool {
        let l = self.rank();
        if i == 0 || i >= l {
            return false;
        }
        let c = &self.cartan;
        (i + 2..=l).all(|j| c.get(i, j) == 0)
            && (1..i).all(|k| c.get(i + 1, k) == 0)
            && self.lengths[i - 1] == self.lengths[i]
            && c.get(i, i + 1) == -1
    }
}

pub fn reflect(series: SeriesType, i: usize, v: &Root) -> Result<Root, RootError> {
    RootSystem::new(series)?.reflect(i, v)
}

pub fn apply_word(series: SeriesType, word: &WeylWord, v: &Root) -> Result<Root, RootError> {
    RootSystem::new(series)?.apply_word(word, v)
}

pub fn enumerate_positive_roots(series: SeriesType) -> Result<Vec<Root>, RootError> {
    Ok(RootSystem::new(series)?.positive_roots())
}

pub fn expected_positive_root_count(series: SeriesType) -> usize {
    let l = series.rank;
    match series.family {
        Family::A => l * (l + 1) / 2,
        Family::B | Family::C => l * l,
        Family::D => l * (l - 1),
    }
}

pub fn verify_coxeter_shift(series: SeriesType, i: usize) -> Result<ShiftOutcome, RootError> {
    let sys = RootSystem::new(series)?;
    Ok(shift_outcome(&sys, i))
}

fn shift_outcome(sys: &RootSystem, i: usize) -> ShiftOutcome {
    if !sys.shift_applies(i) {
        return ShiftOutcome::NotApplicable;
    }
    let w = WeylWord::coxeter(sys.rank());
    match sys.apply_word(&w, &sys.simple(i)) {
        Ok(img) if img == sys.simple(i + 1) => ShiftOutcome::Holds,
        _ => ShiftOutcome::Fails,
    }
}

/// Fundamental-root indices generating the rank `l-1` subgroup whose cosets
/// make up the low-boundary subset for this series.
pub fn subsystem_indices(series: SeriesType) -> Vec<usize> {
    let l = series.rank;
    match series.family {
        Family::C => (2..=l).collect(),
        _ => (1..l).collect(),
    }
}

/// Membership of `w^power(g)` in the designated sub-system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorptionEntry {
    pub generator: String,
    pub root: Root,
    pub power: usize,
    pub image: Root,
    pub contained: bool,
    /// What the boundary argument needs: `true` inside the absorbed range,
    /// `false` at an escape power.
    pub expected: bool,
}

impl AbsorptionEntry {
    pub fn holds(&self) -> bool {
        self.contained == self.expected
    }
}

/// A generator-bearing root, the powers at which its image must stay inside
/// the sub-system, and the powers at which it must leave.
struct GeneratorSpec {
    label: &'static str,
    root: Root,
    contained: std::ops::RangeInclusive<usize>,
    escapes: Vec<usize>,
}

fn generator_specs(series: SeriesType) -> Vec<GeneratorSpec> {
    let l = series.rank;
    let r1 = Root::simple(l, 1);
    let neg_r1 = -&r1;
    let spec = |label, root: &Root, contained, escapes| GeneratorSpec {
        label,
        root: root.clone(),
        contained,
        escapes,
    };
    match series.family {
        Family::A => vec![
            spec("x_1", &r1, 0..=l - 2, vec![l - 1]),
            spec("h_r1 (-r1)", &neg_r1, 0..=l - 2, vec![l - 1]),
        ],
        Family::B => {
            // t = 2r_1 + r_2 + ... + r_l, s = r_2 + ... + r_l
            let t = &Root::sum(l, 1, l) + &r1;
            let s = Root::sum(l, 2, l);
            vec![
                spec("x_1", &r1, 0..=l - 2, vec![l - 1]),
                spec("h_t", &t, 1..=l - 2, vec![0, l - 1]),
                spec("h_t (-t)", &(-&t), 1..=l - 2, vec![0, l - 1]),
                spec("x_s (char 2)", &s, 1..=l - 2, vec![0, l - 1]),
                spec("x_-r1 (char 2)", &neg_r1, 0..=l - 2, vec![l - 1]),
            ]
        }
        Family::C => vec![
            spec("x_1", &r1, 1..=l - 2, vec![0, l - 1]),
            spec("h_r1 (-r1)", &neg_r1, 1..=l - 2, vec![0, l - 1]),
        ],
        Family::D if l % 2 == 1 => vec![
            spec("x_r1", &r1, 0..=l - 3, vec![l - 2]),
            spec("h_r1 (-r1)", &neg_r1, 0..=l - 3, vec![l - 2]),
        ],
        Family::D => vec![
            spec("x_r1", &r1, 0..=l - 4, vec![l - 2]),
            spec("x_-r1", &neg_r1, 0..=l - 4, vec![l - 2]),
            spec("x_r3", &Root::simple(l, 3), 0..=l - 4, vec![l - 3]),
        ],
    }
}

pub fn absorption_certificate(series: SeriesType) -> Result<Vec<AbsorptionEntry>, RootError> {
    let sys = RootSystem::new(series)?;
    Ok(absorption_entries(&sys, series))
}

fn absorption_entries(sys: &RootSystem, series: SeriesType) -> Vec<AbsorptionEntry> {
    let indices = subsystem_indices(series);
    let sub = sys.subsystem(&indices);
    let w = WeylWord::coxeter(series.rank);
    let mut out = Vec::new();
    for g in generator_specs(series) {
        let mut powers: Vec<(usize, bool)> = g.contained.clone().map(|i| (i, true)).collect();
        powers.extend(g.escapes.iter().map(|&i| (i, false)));
        powers.sort();
        for (i, expected) in powers {
            let image = sys
                .apply_power(&w, i as i64, &g.root)
                .expect("dimensions match");
            let contained = sys.in_subsystem(&sub, &indices, &image);
            out.push(AbsorptionEntry {
                generator: g.label.to_string(),
                root: g.root.clone(),
                power: i,
                image,
                contained,
                expected,
            });
        }
    }
    out
}

/// Witness that `n_w^power` is outside the rank `l-1` subgroup: a root of the
/// sub-system mapped by `w^power` onto a fundamental root outside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessWitness {
    pub power: i64,
    pub witness: Root,
    pub image: Root,
    pub target: Root,
    pub witness_in_sub: bool,
    pub target_outside_sub: bool,
}

impl DisjointnessWitness {
    pub fn holds(&self) -> bool {
        self.image == self.target && self.witness_in_sub && self.target_outside_sub
    }
}

pub fn disjointness_certificate(series: SeriesType) -> Result<Vec<DisjointnessWitness>, RootError> {
    let sys = RootSystem::new(series)?;
    Ok(disjointness_witnesses(&sys, series))
}

fn disjointness_witnesses(sys: &RootSystem, series: SeriesType) -> Vec<DisjointnessWitness> {
    let l = series.rank;
    let indices = subsystem_indices(series);
    let sub = sys.subsystem(&indices);
    let w = WeylWord::coxeter(l);
    // (power, witness index, target index)
    let plan: Vec<(i64, usize, usize)> = match series.family {
        Family::A => (1..l).map(|i| (i as i64, l - i, l)).collect(),
        Family::B => (1..=l - 2).map(|i| (i as i64, l - i, l)).collect(),
        Family::C => (1..=l - 2).map(|i| (-(i as i64), i + 1, 1)).collect(),
        Family::D if l % 2 == 1 => (1..=l - 3).map(|i| (i as i64, l - i, l)).collect(),
        Family::D => (1..=l.saturating_sub(4)).map(|i| (i as i64, l - i, l)).collect(),
    };
    plan.into_iter()
        .map(|(power, wi, ti)| {
            let witness = Root::simple(l, wi);
            let target = Root::simple(l, ti);
            let image = sys.apply_power(&w, power, &witness).expect("dimensions match");
            DisjointnessWitness {
                power,
                witness_in_sub: sys.in_subsystem(&sub, &indices, &witness),
                target_outside_sub: !sys.in_subsystem(&sub, &indices, &target),
                witness,
                image,
                target,
            }
        })
        .collect()
}

fn pow_text(i: i64, v: &Root) -> String {
    match i {
        1 => format!("w({v})"),
        _ => format!("w^{i}({v})"),
    }
}

/// Evaluates every orbit identity the boundary arguments for this series use.
pub fn verify_series_orbit(series: SeriesType) -> Result<VerificationReport, RootError> {
    let sys = RootSystem::new(series)?;
    let l = series.rank;
    let f = series.family;
    let tag = format!("{f}l");
    let id = |s: &str| format!("{tag}.{s}");
    let w = WeylWord::coxeter(l);
    let r = |i: usize| Root::simple(l, i);
    let sum = |a: usize, b: usize| Root::sum(l, a, b);
    let pw = |i: usize, v: &Root| sys.apply_power(&w, i as i64, v).expect("dimensions match");
    let mut rep = VerificationReport::new(f.to_string(), l);

    rep.check_eq(
        &id("positive"),
        "|Phi+|",
        &sys.positive_roots().len(),
        &expected_positive_root_count(series),
    );
    rep.check_true(&id("perm"), format!("{w} permutes Phi"), sys.word_permutes_roots(&w));

    match f {
        Family::A => {
            for i in 1..l {
                rep.check_eq(&id("refl"), format!("w{i}(r{})", i + 1), &sys.reflect(i, &r(i + 1))?, &(&r(i) + &r(i + 1)));
            }
            for i in 1..l {
                rep.check_eq(&id("orbit.step"), pow_text(1, &r(i)), &pw(1, &r(i)), &r(i + 1));
            }
            let top = sum(1, l);
            for j in 1..l {
                let partial = WeylWord::new((j..l).collect());
                rep.check_eq(&id("partial"), format!("{partial}(r{l})"), &sys.apply_word(&partial, &r(l))?, &sum(j, l));
            }
            rep.check_eq(&id("orbit.wrap"), pow_text(1, &r(l)), &pw(1, &r(l)), &(-&top));
            rep.check_eq(&id("orbit.close"), pow_text(1, &(-&top)), &pw(1, &(-&top)), &r(1));
            let trace = sys.orbit(&w, &r(1), l + 1)?;
            let first_return = trace.steps.iter().position(|s| *s == r(1)).map(|p| p + 1);
            rep.check_eq(&id("orbit.cycle"), "orbit length of r1", &first_return.unwrap_or(0), &(l + 1));
        }
        Family::B => {
            rep.check_eq(&id("refl"), "w1(r2)", &sys.reflect(1, &r(2))?, &(&r(2) + &(2 * &r(1))));
            rep.check_eq(&id("refl"), "w2(r1)", &sys.reflect(2, &r(1))?, &(&r(1) + &r(2)));
            for i in 2..l {
                rep.check_eq(&id("eq1"), pow_text(1, &r(i)), &pw(1, &r(i)), &r(i + 1));
            }
            rep.check_eq(&id("w.r1"), pow_text(1, &r(1)), &pw(1, &r(1)), &sum(1, 2));
            for j in 2..l {
                rep.check_eq(&id("pot1"), pow_text(1, &sum(1, j)), &pw(1, &sum(1, j)), &sum(1, j + 1));
            }
            for i in 1..l {
                rep.check_eq(&id("eq.negy"), pow_text(i as i64, &r(1)), &pw(i, &r(1)), &sum(1, i + 1));
            }
            for i in 2..l {
                rep.check_eq(&id("partial"), format!("w{i}({})", sum(i + 1, l)), &sys.reflect(i, &sum(i + 1, l))?, &sum(i, l));
            }
            let t = &sum(1, l) + &r(1);
            let s = sum(2, l);
            rep.check_eq(&id("w.rl"), pow_text(1, &r(l)), &pw(1, &r(l)), &(-&t));
            rep.check_eq(&id("eq3"), pow_text(1, &sum(1, l)), &pw(1, &sum(1, l)), &(-&r(1)));
            for i in 1..l {
                rep.check_eq(&id("eq4"), pow_text(i as i64, &t), &pw(i, &t), &r(i + 1));
            }
            for i in 1..l {
                let expected = &r(i + 1) - &(2 * &sum(1, i + 1));
                rep.check_eq(&id("eq5"), pow_text(i as i64, &s), &pw(i, &s), &expected);
            }
            rep.check_true(&id("roots"), format!("{t}, {s} in Phi"), sys.contains(&t) && sys.contains(&s));
        }
        Family::C => {
            rep.check_eq(&id("refl"), format!("w{}(r{l})", l - 1), &sys.reflect(l - 1, &r(l))?, &(&r(l) + &(2 * &r(l - 1))));
            rep.check_eq(&id("refl"), format!("w{l}(r{})", l - 1), &sys.reflect(l, &r(l - 1))?, &(&r(l - 1) + &r(l)));
            for i in 1..=l - 2 {
                rep.check_eq(&id("step"), pow_text(1, &r(i)), &pw(1, &r(i)), &r(i + 1));
            }
            let head = WeylWord::new((1..=l - 2).collect());
            rep.check_eq(&id("head"), format!("{head}(r{})", l - 1), &sys.apply_word(&head, &r(l - 1))?, &sum(1, l - 1));
            rep.check_eq(&id("wrl1"), pow_text(1, &r(l - 1)), &pw(1, &r(l - 1)), &sum(1, l));
            for i in 1..=l - 2 {
                let img = sys.apply_power(&w, -(i as i64), &r(i + 1))?;
                rep.check_eq(&id("disj"), pow_text(-(i as i64), &r(i + 1)), &img, &r(1));
            }
        }
        Family::D => {
            rep.check_eq(&id("w.r1"), pow_text(1, &r(1)), &pw(1, &r(1)), &(&r(2) + &r(3)));
            rep.check_eq(&id("w.r2"), pow_text(1, &r(2)), &pw(1, &r(2)), &(&r(3) + &r(1)));
            for i in 3..l {
                rep.check_eq(&id("step"), pow_text(1, &r(i)), &pw(1, &r(i)), &r(i + 1));
            }
            for start in [1, 2] {
                for i in 1..=l - 2 {
                    let img = pw(i, &r(start));
                    let body = sum(3, i + 2);
                    let ok = img == &body + &r(1) || img == &body + &r(2);
                    rep.push(
                        &id("pot3"),
                        pow_text(i as i64, &r(start)),
                        format!("{body}+y, y in {{r1, r2}}"),
                        img.to_string(),
                        ok,
                    );
                }
            }
        }
    }

    for i in 1..l {
        let outcome = shift_outcome(&sys, i);
        let expected = shift_expected(series, i);
        rep.push(
            &id("shift"),
            format!("w(r{i}) = r{} [{outcome:?}]", i + 1),
            format!("{expected:?}"),
            format!("{outcome:?}"),
            outcome == expected,
        );
    }

    for e in absorption_entries(&sys, series) {
        rep.push(
            &id("absorb"),
            format!("{}: {} in sub-system", e.generator, pow_text(e.power as i64, &e.root)),
            e.expected.to_string(),
            format!("{} ({})", e.contained, e.image),
            e.holds(),
        );
    }
    for d in disjointness_witnesses(&sys, series) {
        rep.push(
            &id("disjoint"),
            pow_text(d.power, &d.witness),
            d.target.to_string(),
            d.image.to_string(),
            d.holds(),
        );
    }
    Ok(rep)
}

/// Where the Coxeter-element lemma is expected to apply for each series.
fn shift_expected(series: SeriesType, i: usize) -> ShiftOutcome {
    let l = series.rank;
    let applies = match series.family {
        Family::A => (1..l).contains(&i),
        Family::B => (2..l).contains(&i),
        Family::C => (1..=l - 2).contains(&i),
        Family::D => (3..l).contains(&i),
    };
    if applies {
        ShiftOutcome::Holds
    } else {
        ShiftOutcome::NotApplicable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn st(f: Family, l: usize) -> SeriesType {
        SeriesType::new(f, l).unwrap()
    }

    #[test]
    fn rank_bounds() {
        assert!(SeriesType::new(Family::D, 3).is_err());
        assert!(SeriesType::new(Family::B, 1).is_err());
        assert!(SeriesType::new(Family::A, 2).is_ok());
        assert_eq!(
            RootSystem::new(st(Family::A, 31)).unwrap_err(),
            RootError::RankCapExceeded(31)
        );
    }

    #[test]
    fn cartan_shapes() {
        let a3 = cartan_matrix(st(Family::A, 3));
        assert_eq!(a3.rows(), &[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        let d4 = cartan_matrix(st(Family::D, 4));
        assert_eq!(d4.get(1, 3), -1);
        assert_eq!(d4.get(2, 3), -1);
        assert_eq!(d4.get(1, 2), 0);
        assert_eq!(d4.get(3, 4), -1);
        assert_eq!(d4.get(1, 4), 0);
        for f in [Family::A, Family::B, Family::C, Family::D] {
            let s = st(f, 6);
            let c = cartan_matrix(s);
            let len = root_lengths(s);
            for i in 1..=6 {
                assert_eq!(c.get(i, i), 2);
                for j in 1..=6 {
                    assert!([0, -1, -2, 2].contains(&c.get(i, j)));
                    assert_eq!(c.get(i, j) * len[i - 1], c.get(j, i) * len[j - 1]);
                    assert_eq!(c.get(i, j) == 0, c.get(j, i) == 0);
                }
            }
        }
    }

    #[test]
    fn reflection_fixtures() {
        let b2 = RootSystem::new(st(Family::B, 2)).unwrap();
        assert_eq!(b2.reflect(1, &b2.simple(2)).unwrap(), Root::new(vec![2, 1]));
        let c5 = RootSystem::new(st(Family::C, 5)).unwrap();
        assert_eq!(c5.reflect(4, &c5.simple(5)).unwrap(), Root::new(vec![0, 0, 0, 2, 1]));
        let a4 = RootSystem::new(st(Family::A, 4)).unwrap();
        assert_eq!(a4.reflect(2, &a4.simple(2)).unwrap(), -&a4.simple(2));
        assert_eq!(a4.reflect(2, &a4.simple(3)).unwrap(), Root::new(vec![0, 1, 1, 0]));
        assert!(matches!(a4.reflect(5, &a4.simple(1)), Err(RootError::IndexOutOfRange { .. })));
        assert!(matches!(a4.reflect(0, &a4.simple(1)), Err(RootError::IndexOutOfRange { .. })));
        assert!(a4.reflect(1, &Root::simple(3, 1)).is_err());
    }

    #[test]
    fn coxeter_word_convention() {
        let s = st(Family::A, 4);
        let w = WeylWord::coxeter(4);
        assert_eq!(apply_word(s, &w, &Root::simple(4, 1)).unwrap(), Root::simple(4, 2));
        assert_eq!(apply_word(s, &w, &Root::simple(4, 4)).unwrap(), -&Root::sum(4, 1, 4));
        let v = Root::new(vec![3, -1, 0, 2]);
        assert_eq!(apply_word(s, &WeylWord::new(vec![]), &v).unwrap(), v);
        let b = st(Family::B, 5);
        assert_eq!(
            apply_word(b, &WeylWord::coxeter(5), &Root::simple(5, 1)).unwrap(),
            Root::sum(5, 1, 2)
        );
    }

    #[test]
    fn positive_root_counts() {
        assert_eq!(enumerate_positive_roots(st(Family::A, 3)).unwrap().len(), 6);
        assert_eq!(enumerate_positive_roots(st(Family::B, 3)).unwrap().len(), 9);
        assert_eq!(enumerate_positive_roots(st(Family::D, 4)).unwrap().len(), 12);
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for l in f.min_rank()..=12 {
                let s = st(f, l);
                let sys = RootSystem::new(s).unwrap();
                assert_eq!(sys.positive_roots().len(), expected_positive_root_count(s), "{s}");
                assert_eq!(sys.roots().len(), 2 * expected_positive_root_count(s));
                for r in sys.roots() {
                    assert!(r.coords().iter().all(|&c| c >= 0) || r.coords().iter().all(|&c| c <= 0));
                }
            }
        }
    }

    #[test]
    fn coxeter_shift_examples() {
        for i in 1..6 {
            assert_eq!(verify_coxeter_shift(st(Family::A, 6), i).unwrap(), ShiftOutcome::Holds);
        }
        for i in 1..=4 {
            assert_eq!(verify_coxeter_shift(st(Family::C, 6), i).unwrap(), ShiftOutcome::Holds);
        }
        assert_eq!(verify_coxeter_shift(st(Family::B, 6), 1).unwrap(), ShiftOutcome::NotApplicable);
        assert_eq!(verify_coxeter_shift(st(Family::C, 6), 5).unwrap(), ShiftOutcome::NotApplicable);
        assert_eq!(verify_coxeter_shift(st(Family::A, 6), 6).unwrap(), ShiftOutcome::NotApplicable);
    }

    #[test]
    fn orbit_examples() {
        let a6 = RootSystem::new(st(Family::A, 6)).unwrap();
        let w = WeylWord::coxeter(6);
        assert_eq!(a6.apply_word(&w, &(-&Root::sum(6, 1, 6))).unwrap(), Root::simple(6, 1));

        let b5 = RootSystem::new(st(Family::B, 5)).unwrap();
        let t = &Root::sum(5, 1, 5) + &Root::simple(5, 1);
        assert_eq!(b5.apply_power(&WeylWord::coxeter(5), 2, &t).unwrap(), Root::simple(5, 3));

        let d6 = RootSystem::new(st(Family::D, 6)).unwrap();
        let img = d6.apply_power(&WeylWord::coxeter(6), 3, &Root::simple(6, 1)).unwrap();
        let body = Root::sum(6, 3, 5);
        assert!(img == &body + &Root::simple(6, 1) || img == &body + &Root::simple(6, 2));
    }

    #[test]
    fn absorption_examples() {
        let a6 = absorption_certificate(st(Family::A, 6)).unwrap();
        let e = a6.iter().find(|e| e.generator == "x_1" && e.power == 3).unwrap();
        assert_eq!(e.image, Root::simple(6, 4));
        assert!(e.contained);
        let e = a6.iter().find(|e| e.generator == "x_1" && e.power == 5).unwrap();
        assert_eq!(e.image, Root::simple(6, 6));
        assert!(!e.contained);

        let c6 = absorption_certificate(st(Family::C, 6)).unwrap();
        let e = c6.iter().find(|e| e.generator == "x_1" && e.power == 4).unwrap();
        assert_eq!(e.image, Root::simple(6, 5));
        assert!(e.contained);

        for f in [Family::A, Family::B, Family::C, Family::D] {
            for l in 5..=12 {
                for e in absorption_certificate(st(f, l)).unwrap() {
                    assert!(e.holds(), "{f}{l}: {e:?}");
                }
            }
        }
    }

    #[test]
    fn disjointness_examples() {
        let find = |f, l, i: i64| {
            disjointness_certificate(st(f, l))
                .unwrap()
                .into_iter()
                .find(|d| d.power.abs() == i)
                .unwrap()
        };
        let d = find(Family::A, 6, 2);
        assert_eq!(d.witness, Root::simple(6, 4));
        assert!(d.holds());
        let d = find(Family::B, 5, 3);
        assert_eq!(d.witness, Root::simple(5, 2));
        assert_eq!(d.image, Root::simple(5, 5));
        let d = find(Family::D, 6, 1);
        assert_eq!(d.witness, Root::simple(6, 5));
        assert_eq!(d.image, Root::simple(6, 6));
    }

    #[test]
    fn reports_pass_for_ranks_five_and_up() {
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for l in 5..=14 {
                let rep = verify_series_orbit(st(f, l)).unwrap();
                let bad: Vec<_> = rep.failures().collect();
                assert!(bad.is_empty(), "{f}{l}: {bad:#?}");
            }
        }
        let a5 = verify_series_orbit(st(Family::A, 5)).unwrap();
        assert!(a5.ids().iter().any(|i| i.starts_with("Al.orbit")));
    }

    #[test]
    fn root_display() {
        assert_eq!(Root::new(vec![2, 1, 0, -1]).to_string(), "2r1+r2-r4");
        assert_eq!(Root::zero(3).to_string(), "0");
        assert_eq!(Root::new(vec![-1, -1]).to_string(), "-r1-r2");
    }

    fn series_strategy() -> impl Strategy<Value = SeriesType> {
        (0..4usize, 4..=10usize).prop_map(|(f, l)| {
            let fam = [Family::A, Family::B, Family::C, Family::D][f];
            SeriesType::new(fam, l).unwrap()
        })
    }

    proptest! {
        #[test]
        fn reflections_are_involutions_permuting_roots(s in series_strategy(), idx in 0..100usize) {
            let sys = RootSystem::new(s).unwrap();
            let r = &sys.roots()[idx % sys.roots().len()];
            for i in 1..=s.rank() {
                let img = sys.reflect(i, r).unwrap();
                prop_assert!(sys.contains(&img));
                prop_assert_eq!(&sys.reflect(i, &img).unwrap(), r);
            }
        }

        #[test]
        fn words_are_linear_and_invertible(
            s in series_strategy(),
            letters in prop::collection::vec(1..=4usize, 0..12),
            u in prop::collection::vec(-3..=3i32, 4),
            v in prop::collection::vec(-3..=3i32, 4),
        ) {
            let l = s.rank();
            let sys = RootSystem::new(s).unwrap();
            let pad = |mut x: Vec<i32>| { x.resize(l, 0); Root::new(x) };
            let (u, v) = (pad(u), pad(v));
            let w = WeylWord::new(letters);
            let wu = sys.apply_word(&w, &u).unwrap();
            let wv = sys.apply_word(&w, &v).unwrap();
            prop_assert_eq!(sys.apply_word(&w, &(&u + &v)).unwrap(), &wu + &wv);
            prop_assert_eq!(sys.apply_word(&w.inverse(), &wu).unwrap(), u.clone());
            prop_assert_eq!(sys.form(&wu, &wv), sys.form(&u, &v));
        }
    }

    #[test]
    fn coxeter_element_permutes_roots() {
        for f in [Family::A, Family::B, Family::C, Family::D] {
            let sys = RootSystem::new(st(f, 8)).unwrap();
            assert!(sys.word_permutes_roots(&WeylWord::coxeter(8)));
        }
    }
}
