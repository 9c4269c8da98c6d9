//! Cohomology of the level group `Γ = {γ ∈ SL₂(Z) : γ₁₁ ≡ γ₂₂ ≡ 1, γ₂₁ ≡ 0 mod p}`
//! with coefficients in `L_k ⊗ det^m` and its truncations, and the normalized
//! Hecke operator attached to `h = diag(1, p)`.
//!
//! Matrices of `Γ` are written in standard coordinates. The module side works in
//! highest-weight-first coordinates `w γ w` (`w` the antidiagonal swap), where `Γ`
//! becomes a subgroup of the level subgroup of the truncation code and `h`
//! becomes `diag(p, 1)`.
//!
//! `Γ` is free for `p ≥ 5`. A free basis is produced by Reidemeister–Schreier
//! over `PSL₂(Z) = ⟨s, u | s², u³⟩`, and elements are rewritten in it by tracing
//! a Euclid word through the coset graph.

use crate::hwmod::{irreducible_lattice, HwError, DEFAULT_DIMENSION_CAP};
use crate::linalg::{
    binomial, pow_big, rat_from_int, rat_mul, rat_zeros, smith_diagonal, unimodular_inverse, vp, IntMat, RatMat,
};
use crate::modular::{crt_lift, eigen_coefficient_bound, large_primes, quotient_charpoly_mod, rank_mod};
use crate::pbw::{build_structure_constants, PbwError, SRoot, StructureConstants};
use crate::rootsys::{build_root_system, CartanDatum};
use crate::trunc::{build_truncation, KLetter, ModMatrix, TruncError, TruncatedModule, TruncationSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;
use thiserror::Error;

pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];
const S_MAT: Mat2 = [[0, -1], [1, 0]];
const U_MAT: Mat2 = [[0, -1], [1, 1]];

pub const SUPPORTED_PRIMES: [u64; 4] = [5, 7, 11, 13];

#[derive(Debug, Error)]
pub enum CohError {
    #[error("determinant {0} is not 1")]
    Determinant(i64),
    #[error("prime {0} is not supported (expected one of 5, 7, 11, 13)")]
    UnsupportedPrime(u64),
    #[error("{0:?} is not in the level group")]
    NotInGroup(Mat2),
    #[error("generator file: {0}")]
    Config(String),
    #[error("coset bookkeeping failed: {0}")]
    Cosets(String),
    #[error("rewriting {0:?} produced a word with a different value")]
    Rewrite(Mat2),
    #[error(transparent)]
    Trunc(#[from] TruncError),
    #[error(transparent)]
    Module(#[from] HwError),
    #[error(transparent)]
    Pbw(#[from] PbwError),
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_det(a: &Mat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Inverse of a determinant-one matrix.
pub fn mat_inv(a: &Mat2) -> Mat2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

fn mat_neg(a: &Mat2) -> Mat2 {
    [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]]
}

/// Highest-weight-first coordinates `w γ w`.
pub fn to_hw(g: &Mat2) -> Mat2 {
    [[g[1][1], g[1][0]], [g[0][1], g[0][0]]]
}

/// `L_k ⊗ det^m` for `GL₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductiveWeight {
    pub k: u32,
    pub m: i64,
}

impl ReductiveWeight {
    pub fn new(k: u32, m: i64) -> Self {
        ReductiveWeight { k, m }
    }

    /// Value on `diag(a, d)` in highest-weight-first coordinates: `a^{k+m} d^m`.
    pub fn character(&self, a: &BigRational, d: &BigRational) -> BigRational {
        let e = self.k as i32 + self.m as i32;
        a.pow(e) * d.pow(self.m as i32)
    }

    /// `π(diag(a, d))` on the weight vector `f^{(j)} v`, same coordinates.
    pub fn torus_on(&self, j: u32, a: &BigRational, d: &BigRational) -> BigRational {
        let e1 = (self.k - j) as i32 + self.m as i32;
        let e2 = j as i32 + self.m as i32;
        a.pow(e1) * d.pow(e2)
    }

    /// `λ̃(h)` for `h = diag(p, 1)` (highest-weight-first coordinates).
    pub fn on_hecke_element(&self, p: u64) -> BigRational {
        self.character(&BigRational::from_integer(BigInt::from(p)), &BigRational::one())
    }
}

fn modp(x: i64, p: u64) -> i64 {
    x.rem_euclid(p as i64)
}

/// Membership in `Γ`. Errors when the determinant is not 1.
pub fn kstar_membership(g: &Mat2, p: u64) -> Result<bool, CohError> {
    let d = mat_det(g);
    if d != 1 {
        return Err(CohError::Determinant(d));
    }
    Ok(modp(g[0][0] - 1, p) == 0 && modp(g[1][1] - 1, p) == 0 && modp(g[1][0], p) == 0)
}

/// Picks the sign of a matrix that is in `Γ` up to `±1`.
fn into_group(g: &Mat2, p: u64) -> Option<Mat2> {
    if kstar_membership(g, p).ok()? {
        Some(*g)
    } else {
        let n = mat_neg(g);
        kstar_membership(&n, p).ok()?.then_some(n)
    }
}

/// Letters of a word in `S = [[0,−1],[1,0]]` and powers of `T = [[1,1],[0,1]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StLetter {
    S,
    T(i64),
}

/// `g = ε · Π letters` with `ε = ±1`, by the Euclidean algorithm on the first column.
pub fn st_decompose(g: &Mat2) -> (Vec<StLetter>, i64) {
    let mut m = *g;
    let mut out = Vec::new();
    while m[1][0] != 0 {
        let q = m[0][0].div_euclid(m[1][0]);
        if q != 0 {
            out.push(StLetter::T(q));
        }
        out.push(StLetter::S);
        let a = m[0][0] - q * m[1][0];
        let b = m[0][1] - q * m[1][1];
        m = [[m[1][0], m[1][1]], [-a, -b]];
    }
    let sign = m[0][0];
    let n = m[0][1] * sign;
    if n != 0 {
        out.push(StLetter::T(n));
    }
    (out, sign)
}

pub fn st_value(word: &[StLetter]) -> Mat2 {
    word.iter().fold(IDENTITY, |acc, l| match l {
        StLetter::S => mat_mul(&acc, &S_MAT),
        StLetter::T(n) => mat_mul(&acc, &[[1, *n], [0, 1]]),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Letter {
    S,
    U,
}

impl Letter {
    fn matrix(self) -> Mat2 {
        match self {
            Letter::S => S_MAT,
            Letter::U => U_MAT,
        }
    }
    fn slot(self) -> usize {
        match self {
            Letter::S => 0,
            Letter::U => 1,
        }
    }
}

/// Word in the free basis: generator index and exponent `±1`.
pub type FreeWord = Vec<(usize, i8)>;

fn free_reduce(w: FreeWord) -> FreeWord {
    let mut out: FreeWord = Vec::with_capacity(w.len());
    for l in w {
        if let Some(last) = out.last() {
            if last.0 == l.0 && last.1 == -l.1 {
                out.pop();
                continue;
            }
        }
        out.push(l);
    }
    out
}

fn invert_word(w: &FreeWord) -> FreeWord {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

/// Free basis of `Γ` with the coset data needed to rewrite elements in it.
#[derive(Clone, Debug)]
pub struct CongruenceGroup {
    pub p: u64,
    /// Free basis, every element lying in `Γ`.
    pub generators: Vec<Mat2>,
    /// Cosets `Γ\PSL₂(Z)`, keyed by the bottom row mod `p` up to sign.
    pub num_cosets: usize,
    coset_index: HashMap<(i64, i64), usize>,
    transversal: Vec<Mat2>,
    next: Vec<[usize; 2]>,
    edge_words: Vec<[FreeWord; 2]>,
}

fn coset_key(c: i64, d: i64, p: u64) -> (i64, i64) {
    let a = (modp(c, p), modp(d, p));
    let b = (modp(-c, p), modp(-d, p));
    a.min(b)
}

/// Reidemeister–Schreier free basis of `Γ`, checked against the Euler
/// characteristic `rank = 1 + [PSL₂(Z) : Γ]/6`.
pub fn free_generators(p: u64) -> Result<CongruenceGroup, CohError> {
    if !SUPPORTED_PRIMES.contains(&p) {
        return Err(CohError::UnsupportedPrime(p));
    }
    let start = coset_key(0, 1, p);
    let mut coset_index = HashMap::from([(start, 0usize)]);
    let mut keys = vec![start];
    let mut transversal = vec![IDENTITY];
    let mut tree: Vec<[bool; 2]> = vec![[false; 2]];
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for l in [Letter::S, Letter::U] {
            let g = mat_mul(&transversal[c], &l.matrix());
            let key = coset_key(g[1][0], g[1][1], p);
            if let std::collections::hash_map::Entry::Vacant(e) = coset_index.entry(key) {
                e.insert(keys.len());
                keys.push(key);
                transversal.push(g);
                tree.push([false; 2]);
                tree[c][l.slot()] = true;
                queue.push_back(keys.len() - 1);
            }
        }
    }
    let n = keys.len();
    if n as u64 != (p * p - 1) / 2 {
        return Err(CohError::Cosets(format!("{n} cosets")));
    }
    let next: Vec<[usize; 2]> = (0..n)
        .map(|c| {
            [Letter::S, Letter::U].map(|l| {
                let g = mat_mul(&transversal[c], &l.matrix());
                coset_index[&coset_key(g[1][0], g[1][1], p)]
            })
        })
        .collect();
    let schreier = |c: usize, l: Letter| schreier_element(&transversal, &next, p, c, l);

    let mut generators: Vec<Mat2> = Vec::new();
    let mut edge_words: Vec<[FreeWord; 2]> = vec![[Vec::new(), Vec::new()]; n];
    let new_gen = |m: Mat2, gens: &mut Vec<Mat2>| -> FreeWord {
        gens.push(m);
        vec![(gens.len() - 1, 1)]
    };
    // s-edges come in pairs c ↔ cs with γ(cs, s) = γ(c, s)⁻¹
    for c in 0..n {
        let d = next[c][0];
        if d == c {
            return Err(CohError::Cosets("fixed point of s".into()));
        }
        if c > d {
            continue;
        }
        if tree[c][0] || tree[d][0] {
            continue;
        }
        let w = new_gen(schreier(c, Letter::S)?, &mut generators);
        edge_words[d][0] = invert_word(&w);
        edge_words[c][0] = w;
    }
    // u-edges come in triangles whose product is trivial
    for c in 0..n {
        let orbit = [c, next[c][1], next[next[c][1]][1]];
        if orbit[1] == c || next[orbit[2]][1] != c {
            return Err(CohError::Cosets("u-orbit is not a triangle".into()));
        }
        if c != *orbit.iter().min().unwrap() {
            continue;
        }
        let nontree: Vec<usize> = (0..3).filter(|&i| !tree[orbit[i]][1]).collect();
        let Some((&last, rest)) = nontree.split_last() else { continue };
        for &i in rest {
            edge_words[orbit[i]][1] = new_gen(schreier(orbit[i], Letter::U)?, &mut generators);
        }
        // w_last · w_{last+1} · w_{last+2} = 1
        let w1 = edge_words[orbit[(last + 1) % 3]][1].clone();
        let w2 = edge_words[orbit[(last + 2) % 3]][1].clone();
        let mut w = invert_word(&w2);
        w.extend(invert_word(&w1));
        edge_words[orbit[last]][1] = free_reduce(w);
    }
    let group = CongruenceGroup { p, generators, num_cosets: n, coset_index, transversal, next, edge_words };
    for c in 0..n {
        for l in [Letter::S, Letter::U] {
            let expected = schreier_element(&group.transversal, &group.next, p, c, l)?;
            if group.word_value(&group.edge_words[c][l.slot()]) != expected {
                return Err(CohError::Cosets(format!("edge ({c}, {l:?}) has the wrong value")));
            }
        }
    }
    if n % 6 != 0 || group.generators.len() != 1 + n / 6 {
        return Err(CohError::Cosets(format!("{} generators for {n} cosets", group.generators.len())));
    }
    Ok(group)
}

/// `t_c · l · t_{cl}⁻¹`, with the sign that puts it in `Γ`.
fn schreier_element(transversal: &[Mat2], next: &[[usize; 2]], p: u64, c: usize, l: Letter) -> Result<Mat2, CohError> {
    let t = mat_mul(&mat_mul(&transversal[c], &l.matrix()), &mat_inv(&transversal[next[c][l.slot()]]));
    into_group(&t, p).ok_or(CohError::Cosets(format!("Schreier element {t:?} outside the group")))
}

impl CongruenceGroup {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Index of `Γ` in `SL₂(Z)`.
    pub fn index(&self) -> usize {
        2 * self.num_cosets
    }

    pub fn word_value(&self, w: &FreeWord) -> Mat2 {
        w.iter().fold(IDENTITY, |acc, &(g, e)| {
            let m = if e > 0 { self.generators[g] } else { mat_inv(&self.generators[g]) };
            mat_mul(&acc, &m)
        })
    }

    /// Word in the free basis with value `g`.
    pub fn rewrite(&self, g: &Mat2) -> Result<FreeWord, CohError> {
        if !kstar_membership(g, self.p)? {
            return Err(CohError::NotInGroup(*g));
        }
        let (st, _) = st_decompose(g);
        let mut letters = Vec::new();
        for l in st {
            match l {
                StLetter::S => letters.push(Letter::S),
                StLetter::T(n) if n > 0 => {
                    for _ in 0..n {
                        letters.extend([Letter::S, Letter::U]);
                    }
                }
                StLetter::T(n) => {
                    for _ in 0..(-n) {
                        letters.extend([Letter::U, Letter::U, Letter::S]);
                    }
                }
            }
        }
        let mut c = 0usize;
        let mut out = Vec::new();
        for l in letters {
            out.extend(self.edge_words[c][l.slot()].iter().copied());
            c = self.next[c][l.slot()];
        }
        if c != 0 {
            return Err(CohError::Rewrite(*g));
        }
        let out = free_reduce(out);
        if self.word_value(&out) != *g {
            return Err(CohError::Rewrite(*g));
        }
        Ok(out)
    }

    pub fn coset_of(&self, g: &Mat2) -> usize {
        self.coset_index[&coset_key(g[1][0], g[1][1], self.p)]
    }

    pub fn transversal(&self) -> &[Mat2] {
        &self.transversal
    }
}

/// Generator list from text: one matrix per line as `a b c d`, `#` comments.
pub fn parse_generator_file(text: &str) -> Result<Vec<Mat2>, CohError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<i64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<i64>().map_err(|e| CohError::Config(format!("line {}: {e}", no + 1))))
            .collect::<Result<_, _>>()?;
        if v.len() != 4 {
            return Err(CohError::Config(format!("line {}: expected 4 entries", no + 1)));
        }
        out.push([[v[0], v[1]], [v[2], v[3]]]);
    }
    Ok(out)
}

/// Abelianized words of a candidate basis: the matrix must be unimodular for
/// the candidates to be a free basis.
pub fn abelianization_matrix(group: &CongruenceGroup, gens: &[Mat2]) -> Result<IntMat, CohError> {
    let g = group.rank();
    let mut m = IntMat::zeros(gens.len(), g);
    for (i, x) in gens.iter().enumerate() {
        for (k, e) in group.rewrite(x)? {
            let v = m.get(i, k) + BigInt::from(e);
            m.set(i, k, v);
        }
    }
    Ok(m)
}

/// Coset data for the double coset `Γ h Γ = ⊔ Γ h γ_i`.
#[derive(Clone, Debug)]
pub struct HeckeSetup {
    pub group: Arc<CongruenceGroup>,
    /// Elements `η_j` whose cocycle values are the coordinates on `Z¹`.
    pub basis: Vec<Mat2>,
    pub reps: Vec<Mat2>,
    /// `twist[i][j] = (η_j(i), ρ_i(η_j))` with `h γ_i η_j = ρ_i(η_j) h γ_{η_j(i)}`.
    pub twist: Vec<Vec<(usize, Mat2)>>,
    twist_words: Vec<Vec<FreeWord>>,
    /// Rewriting of the basis in the free basis of the group.
    basis_words: Vec<FreeWord>,
}

/// `γ_i = [[1, i], [0, 1]]` for `0 ≤ i < p`.
pub fn coset_reps(p: u64) -> Vec<Mat2> {
    (0..p as i64).map(|i| [[1, i], [0, 1]]).collect()
}

/// Another system of representatives: each `γ_i` is moved inside its coset by
/// elements of `h⁻¹Γh ∩ Γ`, and the list is shuffled.
pub fn shuffled_coset_reps(p: u64, seed: u64) -> Vec<Mat2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = p as i64;
    let mut reps: Vec<Mat2> = (0..pi)
        .map(|i| {
            let s: i64 = rng.gen_range(-2..=2);
            let t: i64 = rng.gen_range(-2..=2);
            mat_mul(&[[1, 0], [pi * pi * s, 1]], &[[1, i + pi * t], [0, 1]])
        })
        .collect();
    reps.shuffle(&mut rng);
    reps
}

/// `h M h⁻¹` for `h = diag(1, p)`, if integral.
fn conj_by_h(m: &Mat2, p: u64) -> Option<Mat2> {
    let pi = p as i64;
    (m[0][1] % pi == 0).then(|| [[m[0][0], m[0][1] / pi], [m[1][0] * pi, m[1][1]]])
}

impl HeckeSetup {
    pub fn new(group: Arc<CongruenceGroup>, reps: Vec<Mat2>) -> Result<Self, CohError> {
        let basis = group.generators.clone();
        Self::with_basis(group, reps, basis)
    }

    /// Uses `basis` for cocycle coordinates. It must be a free basis of `Γ`;
    /// the abelianization check rejects most other lists.
    pub fn with_basis(group: Arc<CongruenceGroup>, reps: Vec<Mat2>, basis: Vec<Mat2>) -> Result<Self, CohError> {
        let p = group.p;
        if reps.len() != p as usize {
            return Err(CohError::Cosets(format!("{} representatives, expected {p}", reps.len())));
        }
        for g in reps.iter().chain(&basis) {
            if !kstar_membership(g, p)? {
                return Err(CohError::NotInGroup(*g));
            }
        }
        if basis.len() != group.rank() {
            return Err(CohError::Config(format!("{} generators, the group has rank {}", basis.len(), group.rank())));
        }
        let ab = abelianization_matrix(&group, &basis)?;
        if ab.det().abs() != BigInt::one() {
            return Err(CohError::Config("generators do not form a free basis".into()));
        }
        for i in 0..reps.len() {
            for j in 0..i {
                if conj_by_h(&mat_mul(&reps[i], &mat_inv(&reps[j])), p).is_some() {
                    return Err(CohError::Cosets(format!("representatives {j} and {i} share a coset")));
                }
            }
        }
        let mut twist = Vec::new();
        let mut twist_words = Vec::new();
        for gi in &reps {
            let mut row = Vec::new();
            let mut words = Vec::new();
            for eta in &basis {
                let lhs = mat_mul(gi, eta);
                let hits: Vec<(usize, Mat2)> = reps
                    .iter()
                    .enumerate()
                    .filter_map(|(j, gj)| conj_by_h(&mat_mul(&lhs, &mat_inv(gj)), p).map(|r| (j, r)))
                    .collect();
                if hits.len() != 1 {
                    return Err(CohError::Cosets(format!("{} matching cosets", hits.len())));
                }
                let (j, rho) = hits[0];
                if !kstar_membership(&rho, p)? {
                    return Err(CohError::NotInGroup(rho));
                }
                words.push(group.rewrite(&rho)?);
                row.push((j, rho));
            }
            twist.push(row);
            twist_words.push(words);
        }
        for j in 0..basis.len() {
            let mut seen = vec![false; reps.len()];
            for row in &twist {
                seen[row[j].0] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(CohError::Cosets("twist is not a permutation".into()));
            }
        }
        let basis_words = basis.iter().map(|b| group.rewrite(b)).collect::<Result<_, _>>()?;
        Ok(HeckeSetup { group, basis, reps, twist, twist_words, basis_words })
    }

    pub fn p(&self) -> u64 {
        self.group.p
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// A `Γ`-module with `Z`-lattice or truncated coordinates.
pub trait Coefficients: Sync {
    type M: Clone + Send;
    fn dim(&self) -> usize;
    fn zero(&self) -> Self::M;
    fn identity(&self) -> Self::M;
    fn act(&self, g: &Mat2) -> Result<Self::M, CohError>;
    fn compose(&self, a: &Self::M, b: &Self::M) -> Self::M;
    fn add(&self, a: &Self::M, b: &Self::M) -> Self::M;
    fn neg(&self, a: &Self::M) -> Self::M;
    /// `λ̃(h) π(h⁻¹)`.
    fn hecke_scalar(&self) -> Self::M;
    /// Integer lift of a matrix.
    fn lift(&self, a: &Self::M) -> IntMat;
    fn from_lift(&self, m: IntMat) -> Self::M;
    /// `p`-exponents of the coordinates, `None` for a lattice.
    fn exponents(&self) -> Option<Vec<u32>>;
}

/// `π(exp(t e))` on the basis `f^{(j)} v` of `L_k(Z)`.
pub fn raising_exp(k: u32, t: &BigInt) -> IntMat {
    let n = k as usize + 1;
    let mut m = IntMat::zeros(n, n);
    for j in 0..n {
        let mut tn = BigInt::one();
        for s in 0..=j {
            // e^{(s)} f^{(j)} v = binom(k − j + s, s) f^{(j−s)} v
            m.set(j - s, j, &tn * binomial(&BigInt::from(k as usize - j + s), s as u64));
            tn *= t;
        }
    }
    m
}

/// `π(exp(t f))` on the same basis.
pub fn lowering_exp(k: u32, t: &BigInt) -> IntMat {
    let n = k as usize + 1;
    let mut m = IntMat::zeros(n, n);
    for j in 0..n {
        let mut tn = BigInt::one();
        for s in 0..n - j {
            m.set(j + s, j, &tn * binomial(&BigInt::from(j + s), s as u64));
            tn *= t;
        }
    }
    m
}

/// `L_k(Z) ⊗ det^m` with the basis `f^{(j)} v`, `j = 0..=k`.
#[derive(Clone, Debug)]
pub struct LatticeCoefficients {
    pub weight: ReductiveWeight,
    pub p: u64,
}

impl LatticeCoefficients {
    pub fn new(weight: ReductiveWeight, p: u64) -> Self {
        LatticeCoefficients { weight, p }
    }

    /// `π` of a highest-weight-first matrix, through the Euclid factorization
    /// into `exp(t e)`, `exp(t f)` and `±1`.
    pub fn act_hw(&self, g: &Mat2) -> IntMat {
        let k = self.weight.k;
        let (word, sign) = st_decompose(g);
        let one = BigInt::one();
        // S = exp(−e) exp(f) exp(−e)
        let e_neg = raising_exp(k, &-&one);
        let s_mat = e_neg.mul(&lowering_exp(k, &one)).mul(&e_neg);
        let mut acc = IntMat::identity(k as usize + 1);
        for l in &word {
            acc = match l {
                StLetter::S => acc.mul(&s_mat),
                StLetter::T(n) => acc.mul(&raising_exp(k, &BigInt::from(*n))),
            };
        }
        if sign < 0 && k % 2 == 1 {
            acc = acc.scale(&BigInt::from(-1));
        }
        acc
    }
}

impl Coefficients for LatticeCoefficients {
    type M = IntMat;

    fn dim(&self) -> usize {
        self.weight.k as usize + 1
    }
    fn zero(&self) -> IntMat {
        IntMat::zeros(self.dim(), self.dim())
    }
    fn identity(&self) -> IntMat {
        IntMat::identity(self.dim())
    }
    fn act(&self, g: &Mat2) -> Result<IntMat, CohError> {
        let d = mat_det(g);
        if d != 1 {
            return Err(CohError::Determinant(d));
        }
        Ok(self.act_hw(&to_hw(g)))
    }
    fn compose(&self, a: &IntMat, b: &IntMat) -> IntMat {
        a.mul(b)
    }
    fn add(&self, a: &IntMat, b: &IntMat) -> IntMat {
        a.add(b)
    }
    fn neg(&self, a: &IntMat) -> IntMat {
        a.scale(&BigInt::from(-1))
    }
    fn hecke_scalar(&self) -> IntMat {
        let n = self.dim();
        let lam = self.weight.on_hecke_element(self.p);
        let hinv = BigRational::new(BigInt::one(), BigInt::from(self.p));
        let mut m = IntMat::zeros(n, n);
        for j in 0..n {
            let v = &lam * self.weight.torus_on(j as u32, &hinv, &BigRational::one());
            assert!(v.is_integer());
            m.set(j, j, v.to_integer());
        }
        m
    }
    fn lift(&self, a: &IntMat) -> IntMat {
        a.clone()
    }
    fn from_lift(&self, m: IntMat) -> IntMat {
        m
    }
    fn exponents(&self) -> Option<Vec<u32>> {
        None
    }
}

/// `L^[r]_k` through the truncation machinery: elements of `Γ` act through the
/// factorization `x_−(C/A) · diag(A, 1/A) · x_+(B/A)` of `[[A, B], [C, D]]`.
#[derive(Clone, Debug)]
pub struct TruncatedCoefficients {
    pub weight: ReductiveWeight,
    pub module: TruncatedModule,
}

pub fn sl2_structure() -> Result<Arc<StructureConstants>, CohError> {
    let rs = build_root_system(&CartanDatum::parse("A1").expect("A1 parses")).expect("A1 builds");
    Ok(Arc::new(build_structure_constants(&rs)?))
}

impl TruncatedCoefficients {
    pub fn new(weight: ReductiveWeight, p: u64, r: u32) -> Result<Self, CohError> {
        Self::with_structure(sl2_structure()?, weight, p, r)
    }

    pub fn with_structure(
        sc: Arc<StructureConstants>,
        weight: ReductiveWeight,
        p: u64,
        r: u32,
    ) -> Result<Self, CohError> {
        let lattice = irreducible_lattice(sc, &[weight.k as i64], Some(r as i64), DEFAULT_DIMENSION_CAP)?;
        let module = build_truncation(Arc::new(lattice), TruncationSpec::new(p, r))?;
        Ok(TruncatedCoefficients { weight, module })
    }

    fn letters(g_hw: &Mat2) -> Vec<KLetter> {
        let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        let [[a, b], [c, _]] = *g_hw;
        vec![
            KLetter::Root { root: SRoot::minus(0), t: q(c, a) },
            KLetter::Torus(vec![q(a, 1)]),
            KLetter::Root { root: SRoot::plus(0), t: q(b, a) },
        ]
    }
}

impl Coefficients for TruncatedCoefficients {
    type M = ModMatrix;

    fn dim(&self) -> usize {
        self.module.dim()
    }
    fn zero(&self) -> ModMatrix {
        ModMatrix::new(self.module.p(), self.module.basis_exps.clone(), IntMat::zeros(self.dim(), self.dim()))
    }
    fn identity(&self) -> ModMatrix {
        self.module.identity()
    }
    fn act(&self, g: &Mat2) -> Result<ModMatrix, CohError> {
        let d = mat_det(g);
        if d != 1 {
            return Err(CohError::Determinant(d));
        }
        let hw = to_hw(g);
        if modp(hw[0][0], self.module.p()) == 0 {
            return Err(CohError::NotInGroup(*g));
        }
        Ok(self.module.kstar_element_action(&Self::letters(&hw))?)
    }
    fn compose(&self, a: &ModMatrix, b: &ModMatrix) -> ModMatrix {
        a.compose(b)
    }
    fn add(&self, a: &ModMatrix, b: &ModMatrix) -> ModMatrix {
        a.add(b)
    }
    fn neg(&self, a: &ModMatrix) -> ModMatrix {
        a.scale(&BigInt::from(-1))
    }
    fn hecke_scalar(&self) -> ModMatrix {
        let p = self.module.p();
        let n = self.dim();
        let mut m = IntMat::zeros(n, n);
        for s in &self.module.slots {
            let Some(off) = self.module.slot_offset(s.space) else { continue };
            for i in 0..s.rank {
                m.set(off + i, off + i, pow_big(p, s.ht as u32));
            }
        }
        ModMatrix::new(p, self.module.basis_exps.clone(), m)
    }
    fn lift(&self, a: &ModMatrix) -> IntMat {
        a.m.clone()
    }
    fn from_lift(&self, m: IntMat) -> ModMatrix {
        ModMatrix::new(self.module.p(), self.module.basis_exps.clone(), m)
    }
    fn exponents(&self) -> Option<Vec<u32>> {
        Some(self.module.basis_exps.clone())
    }
}

/// `L^[r]_k` read off the explicit `Sym^k` model: the top-left block of `π(γ)`
/// on `f^{(j)} v`, `j < r`. Independent of the truncation machinery.
#[derive(Clone, Debug)]
pub struct SymTruncation {
    pub weight: ReductiveWeight,
    pub p: u64,
    pub r: u32,
}

impl SymTruncation {
    fn size(&self) -> usize {
        (self.r as usize).min(self.weight.k as usize + 1)
    }
    fn exps(&self) -> Vec<u32> {
        (0..self.size() as u32).map(|j| self.r - j).collect()
    }
}

/// Coefficient of `f^{(i)} v` in `π(g) f^{(j)} v` for a highest-weight-first
/// `g = [[a, b], [c, d]]`, from the substitution `P(u₀,u₁) ↦ P(a u₀ + c u₁, b u₀ + d u₁)`
/// on `f^{(j)} v = binom(k, j) u₀^{k−j} u₁^j`.
pub fn sym_entry(k: u32, g: &Mat2, i: u32, j: u32) -> BigRational {
    let [[a, b], [c, d]] = g.map(|r| r.map(BigInt::from));
    let mut acc = BigInt::zero();
    // s powers of u₁ from the first factor, i − s from the second
    for s in 0..=i.min(k - j) {
        if i - s > j {
            continue;
        }
        let t1 = binomial(&BigInt::from(k - j), s as u64)
            * num_traits::pow(a.clone(), (k - j - s) as usize)
            * num_traits::pow(c.clone(), s as usize);
        let t2 = binomial(&BigInt::from(j), (i - s) as u64)
            * num_traits::pow(b.clone(), (j + s - i) as usize)
            * num_traits::pow(d.clone(), (i - s) as usize);
        acc += t1 * t2;
    }
    let kb = BigInt::from(k);
    BigRational::new(acc * binomial(&kb, j as u64), binomial(&kb, i as u64))
}

impl Coefficients for SymTruncation {
    type M = ModMatrix;

    fn dim(&self) -> usize {
        self.size()
    }
    fn zero(&self) -> ModMatrix {
        ModMatrix::new(self.p, self.exps(), IntMat::zeros(self.size(), self.size()))
    }
    fn identity(&self) -> ModMatrix {
        ModMatrix::identity(self.p, &self.exps())
    }
    fn act(&self, g: &Mat2) -> Result<ModMatrix, CohError> {
        let d = mat_det(g);
        if d != 1 {
            return Err(CohError::Determinant(d));
        }
        let hw = to_hw(g);
        let n = self.size();
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = sym_entry(self.weight.k, &hw, i as u32, j as u32);
                assert!(v.is_integer());
                m.set(i, j, v.to_integer());
            }
        }
        // the block is a module map on the quotient only for the level group
        if hw[0][1].rem_euclid(self.p as i64) != 0 {
            return Err(CohError::NotInGroup(*g));
        }
        Ok(ModMatrix::new(self.p, self.exps(), m))
    }
    fn compose(&self, a: &ModMatrix, b: &ModMatrix) -> ModMatrix {
        a.compose(b)
    }
    fn add(&self, a: &ModMatrix, b: &ModMatrix) -> ModMatrix {
        a.add(b)
    }
    fn neg(&self, a: &ModMatrix) -> ModMatrix {
        a.scale(&BigInt::from(-1))
    }
    fn hecke_scalar(&self) -> ModMatrix {
        let n = self.size();
        let d: Vec<BigInt> = (0..n as u32).map(|j| pow_big(self.p, j)).collect();
        ModMatrix::new(self.p, self.exps(), IntMat::diagonal(&d))
    }
    fn lift(&self, a: &ModMatrix) -> IntMat {
        a.m.clone()
    }
    fn from_lift(&self, m: IntMat) -> ModMatrix {
        ModMatrix::new(self.p, self.exps(), m)
    }
    fn exponents(&self) -> Option<Vec<u32>> {
        Some(self.exps())
    }
}

/// Cocycle value `c(w) = Σ π(prefix) c(letter)` expressed through the values on
/// the free basis: entry `k` is the coefficient of `c(y_k)`.
fn word_cocycle<C: Coefficients>(c: &C, gens: &[(C::M, C::M)], w: &FreeWord) -> Vec<C::M> {
    let mut out: Vec<C::M> = vec![c.zero(); gens.len()];
    let mut prefix = c.identity();
    for &(g, e) in w {
        if e > 0 {
            out[g] = c.add(&out[g], &prefix);
            prefix = c.compose(&prefix, &gens[g].0);
        } else {
            // c(y⁻¹) = −π(y⁻¹) c(y)
            prefix = c.compose(&prefix, &gens[g].1);
            out[g] = c.add(&out[g], &c.neg(&prefix));
        }
    }
    out
}

/// `π` of the free basis of the group and of its inverses.
fn generator_actions<C: Coefficients>(c: &C, group: &CongruenceGroup) -> Result<Vec<(C::M, C::M)>, CohError> {
    group.generators.iter().map(|g| Ok((c.act(g)?, c.act(&mat_inv(g))?))).collect()
}

/// Assembles `rows × cols` blocks of size `n` into one integer matrix.
fn assemble<C: Coefficients>(c: &C, blocks: &[Vec<C::M>]) -> IntMat {
    let n = c.dim();
    let rows = blocks.len();
    let cols = blocks.first().map_or(0, |r| r.len());
    let mut out = IntMat::zeros(rows * n, cols * n);
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            out.paste(i * n, j * n, &c.lift(b));
        }
    }
    out
}

/// `δ: M → M^g`, `m ↦ ((π(η_j) − 1) m)_j`, on the chosen basis.
pub fn coboundary_matrix<C: Coefficients>(c: &C, setup: &HeckeSetup) -> Result<IntMat, CohError> {
    let neg_id = c.neg(&c.identity());
    let blocks: Vec<Vec<C::M>> =
        setup.basis.iter().map(|g| Ok(vec![c.add(&c.act(g)?, &neg_id)])).collect::<Result<_, CohError>>()?;
    Ok(assemble(c, &blocks))
}

/// Normalized Hecke operator on `Z¹ = M^g` (coordinates: values on the basis),
/// as blocks `[j][k]` with `(𝕋c)(η_j) = Σ_k block[j][k] c(η_k)`.
pub fn hecke_blocks<C: Coefficients>(c: &C, setup: &HeckeSetup, normalized: bool) -> Result<Vec<Vec<C::M>>, CohError> {
    let group = &setup.group;
    let gens = generator_actions(c, group)?;
    let g = setup.rank();
    let scalar = if normalized { c.hecke_scalar() } else { c.identity() };
    let outer: Vec<C::M> =
        setup.reps.iter().map(|gi| Ok(c.compose(&c.act(&mat_inv(gi))?, &scalar))).collect::<Result<_, CohError>>()?;
    // blocks against the free basis y_k
    let mut rows: Vec<Vec<C::M>> = vec![vec![c.zero(); g]; g];
    for (i, words) in setup.twist_words.iter().enumerate() {
        for (j, w) in words.iter().enumerate() {
            for (k, a) in word_cocycle(c, &gens, w).iter().enumerate() {
                rows[j][k] = c.add(&rows[j][k], &c.compose(&outer[i], a));
            }
        }
    }
    if setup.basis == group.generators {
        return Ok(rows);
    }
    if c.exponents().is_some() {
        return Err(CohError::Config("a custom basis needs lattice coefficients".into()));
    }
    // change of coordinates c(η_j) = Σ_k conv[j][k] c(y_k)
    let conv: Vec<Vec<C::M>> = setup.basis_words.iter().map(|w| word_cocycle(c, &gens, w)).collect();
    let conv_inv = unimodular_inverse(&assemble(c, &conv));
    let n = c.dim();
    let t = assemble(c, &rows).mul(&conv_inv);
    let mut out = vec![Vec::new(); g];
    for (j, row) in out.iter_mut().enumerate() {
        for k in 0..g {
            let blk = t.submatrix(j * n, (j + 1) * n, k * n, (k + 1) * n);
            row.push(c.from_lift(blk));
        }
    }
    Ok(out)
}

/// `𝕋` on `Z¹` as one integer matrix.
pub fn hecke_matrix<C: Coefficients>(c: &C, setup: &HeckeSetup) -> Result<IntMat, CohError> {
    Ok(assemble(c, &hecke_blocks(c, setup, true)?))
}

/// `T(h)` without the factor `λ̃(h)`, with rational entries:
/// `(Tc)(η_j) = Σ_i π(γ_i⁻¹) π(h⁻¹) c(ρ_i(η_j))` on the default basis.
pub fn unnormalized_hecke(setup: &HeckeSetup, weight: ReductiveWeight) -> Result<RatMat, CohError> {
    let p = setup.p();
    let c = LatticeCoefficients::new(weight, p);
    let n = c.dim();
    let g = setup.rank();
    let gens = generator_actions(&c, &setup.group)?;
    let hinv = BigRational::new(BigInt::one(), BigInt::from(p));
    let torus: Vec<BigRational> = (0..=weight.k).map(|j| weight.torus_on(j, &hinv, &BigRational::one())).collect();
    let mut out = rat_zeros(g * n, g * n);
    for (i, gi) in setup.reps.iter().enumerate() {
        let outer = rat_from_int(&c.act(&mat_inv(gi))?);
        for (j, w) in setup.twist_words[i].iter().enumerate() {
            for (k, a) in word_cocycle(&c, &gens, w).iter().enumerate() {
                let mut scaled = rat_from_int(a);
                for (row, t) in scaled.iter_mut().zip(&torus) {
                    for x in row.iter_mut() {
                        *x *= t;
                    }
                }
                let blk = rat_mul(&outer, &scaled);
                for (bi, row) in blk.into_iter().enumerate() {
                    for (bj, x) in row.into_iter().enumerate() {
                        out[j * n + bi][k * n + bj] += x;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rational rank of `a` from ranks modulo a few large primes. Exact whenever
/// it reaches the number of columns, which is the case for `k ≥ 1`.
fn rational_rank(a: &IntMat) -> usize {
    let r = large_primes().take(3).map(|q| rank_mod(a, q)).max().unwrap_or(0);
    if r == a.cols() || a.rows() * a.cols() <= 400 {
        return if r == a.cols() { r } else { a.rank() };
    }
    r
}

/// `H¹(Γ, L_k(Q_p) ⊗ det^m)` with the normalized Hecke operator.
#[derive(Clone, Debug)]
pub struct LatticeH1 {
    pub weight: ReductiveWeight,
    pub dim_cocycles: usize,
    pub dim_coboundaries: usize,
    pub dim_h0: usize,
    pub dim_h1: usize,
    /// `𝕋` on `Z¹`, which has integral entries.
    pub hecke: IntMat,
    pub coboundary: IntMat,
    /// Charpoly `Σ a_i X^{n−i}` of `𝕋` on `H¹`.
    pub charpoly: Vec<BigInt>,
    /// `𝕋` maps coboundaries to coboundaries (checked modulo three primes).
    pub preserves_coboundaries: bool,
}

impl LatticeH1 {
    /// `dim H¹ = (g − 1)(k + 1) + dim H⁰` for a free group of rank `g`.
    pub fn euler_formula_holds(&self, rank: usize) -> bool {
        self.dim_h1 == (rank - 1) * (self.weight.k as usize + 1) + self.dim_h0
    }
}

pub fn lattice_h1(setup: &HeckeSetup, weight: ReductiveWeight) -> Result<LatticeH1, CohError> {
    let c = LatticeCoefficients::new(weight, setup.p());
    let hecke = hecke_matrix(&c, setup)?;
    let coboundary = coboundary_matrix(&c, setup)?;
    let rank = rational_rank(&coboundary);
    let image = hecke.mul(&coboundary);
    let joint = coboundary.hstack(&image);
    let preserves_coboundaries = large_primes().take(3).all(|q| rank_mod(&joint, q) <= rank);
    let dim_cocycles = hecke.rows();
    let dim_h1 = dim_cocycles - rank;
    let bound = eigen_coefficient_bound(&hecke, dim_h1);
    let charpoly = crt_lift(dim_h1, &bound, |q| quotient_charpoly_mod(&hecke, &coboundary, rank, q));
    Ok(LatticeH1 {
        weight,
        dim_cocycles,
        dim_coboundaries: rank,
        dim_h0: c.dim() - rank,
        dim_h1,
        hecke,
        coboundary,
        charpoly,
        preserves_coboundaries,
    })
}

/// Orders of cohomology with coefficients in a finite module, as `p`-exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedH1 {
    /// `log_p #M`.
    pub module_exp: u64,
    pub h0_exp: u64,
    pub h1_exp: u64,
    /// Elementary divisors of `[δ | diag(p^e)]` that are not units.
    pub torsion: Vec<BigInt>,
}

/// `#H¹ = #M^g / #δ(M)`, from the Smith form of `[δ | diag(p^{e})]`.
pub fn truncated_h1<C: Coefficients>(c: &C, setup: &HeckeSetup) -> Result<TruncatedH1, CohError> {
    let p = setup.p();
    let exps = c.exponents().ok_or_else(|| CohError::Config("finite coefficients expected".into()))?;
    let delta = coboundary_matrix(c, setup)?;
    let g = setup.rank();
    let moduli: Vec<BigInt> = (0..g).flat_map(|_| exps.iter().map(|&e| pow_big(p, e))).collect();
    let stacked = delta.hstack(&IntMat::diagonal(&moduli));
    let diag = smith_diagonal(&stacked);
    let mut s = 0u64;
    let mut torsion = Vec::new();
    for d in diag {
        let v = vp(&d, p).expect("full row rank") as u64;
        if v > 0 {
            torsion.push(d.abs());
        }
        s += v;
    }
    let module_exp: u64 = exps.iter().map(|&e| e as u64).sum();
    let image = g as u64 * module_exp - s;
    Ok(TruncatedH1 { module_exp, h0_exp: module_exp - image, h1_exp: s, torsion })
}

/// `λ̃(h) π(h⁻¹)` on `f^{(j)} v` has valuation at least `ht = j`, and equals
/// `p^{ht}` exactly.
pub fn hecke_scalar_check(weight: ReductiveWeight, p: u64) -> bool {
    let lam = weight.on_hecke_element(p);
    let hinv = BigRational::new(BigInt::one(), BigInt::from(p));
    (0..=weight.k).all(|j| {
        let v = &lam * weight.torus_on(j, &hinv, &BigRational::one());
        let ok_val = crate::linalg::vp_rational(&v, p).is_some_and(|e| e >= j as i64);
        ok_val && v == BigRational::from_integer(pow_big(p, j))
    })
}

/// Whether `λ̃(h) π(h γ_i)⁻¹` maps `L(Z, r)` into `p^r L(Z)` for every
/// representative. With `normalized = false` the factor `λ̃(h)` is dropped.
pub fn annihilation_check(
    setup: &HeckeSetup,
    weight: ReductiveWeight,
    r: u32,
    normalized: bool,
) -> Result<bool, CohError> {
    let p = setup.p();
    let c = LatticeCoefficients::new(weight, p);
    let hinv = BigRational::new(BigInt::one(), BigInt::from(p));
    let lam = if normalized { weight.on_hecke_element(p) } else { BigRational::one() };
    // diagonal of λ̃(h)π(h⁻¹) composed with the generators p^{max(r−j,0)} of L(Z, r)
    let diag: Vec<BigRational> = (0..=weight.k)
        .map(|j| {
            let s = BigRational::from_integer(pow_big(p, r.saturating_sub(j)));
            &lam * weight.torus_on(j, &hinv, &BigRational::one()) * s
        })
        .collect();
    for gi in &setup.reps {
        let a = c.act(&mat_inv(gi))?;
        for i in 0..a.rows() {
            for (j, d) in diag.iter().enumerate() {
                let v = BigRational::from_integer(a.get(i, j).clone()) * d;
                if let Some(e) = crate::linalg::vp_rational(&v, p) {
                    if e < r as i64 {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn setup(p: u64) -> HeckeSetup {
        let g = Arc::new(free_generators(p).unwrap());
        HeckeSetup::new(g, coset_reps(p)).unwrap()
    }

    #[test]
    fn free_ranks_match_euler_characteristic() {
        for (p, rank) in [(5, 3), (7, 5), (11, 11), (13, 15)] {
            let g = free_generators(p).unwrap();
            assert_eq!(g.rank(), rank, "p = {p}");
            assert_eq!(g.index() as u64, p * p - 1);
            for y in &g.generators {
                assert!(kstar_membership(y, p).unwrap());
            }
        }
        assert!(matches!(free_generators(3), Err(CohError::UnsupportedPrime(3))));
    }

    #[test]
    fn membership() {
        assert!(kstar_membership(&[[1, 1], [0, 1]], 5).unwrap());
        assert!(kstar_membership(&[[1, 0], [5, 1]], 5).unwrap());
        assert!(!kstar_membership(&[[1, 0], [1, 1]], 5).unwrap());
        assert!(!kstar_membership(&[[-1, 0], [0, -1]], 5).unwrap());
        assert!(matches!(kstar_membership(&[[2, 0], [0, 1]], 5), Err(CohError::Determinant(2))));
    }

    fn sl2() -> impl Strategy<Value = Mat2> {
        proptest::collection::vec((0..2usize, -3i64..=3), 1..8).prop_map(|w| {
            w.into_iter().fold(IDENTITY, |acc, (side, t)| {
                let m = if side == 0 { [[1, t], [0, 1]] } else { [[1, 0], [t, 1]] };
                mat_mul(&acc, &m)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn euclid_words_multiply_back(g in sl2()) {
            let (w, sign) = st_decompose(&g);
            let v = st_value(&w);
            prop_assert_eq!(if sign > 0 { v } else { mat_neg(&v) }, g);
        }

        #[test]
        fn rewriting_round_trips(w in proptest::collection::vec((0..3usize, any::<bool>()), 0..6)) {
            let g = free_generators(5).unwrap();
            let word: FreeWord = w.into_iter().map(|(i, inv)| (i, if inv { -1 } else { 1 })).collect();
            let value = g.word_value(&word);
            let back = g.rewrite(&value).unwrap();
            prop_assert_eq!(g.word_value(&back), value);
            prop_assert_eq!(back, free_reduce(word));
        }

        #[test]
        fn lattice_action_matches_substitution(g in sl2(), k in 0u32..7) {
            let c = LatticeCoefficients::new(ReductiveWeight::new(k, 0), 5);
            let a = c.act_hw(&g);
            for i in 0..=k {
                for j in 0..=k {
                    prop_assert_eq!(BigRational::from_integer(a.get(i as usize, j as usize).clone()), sym_entry(k, &g, i, j));
                }
            }
        }

        #[test]
        fn lattice_action_is_multiplicative(g in sl2(), h in sl2(), k in 0u32..6) {
            let c = LatticeCoefficients::new(ReductiveWeight::new(k, 1), 7);
            prop_assert_eq!(c.act(&mat_mul(&g, &h)).unwrap(), c.act(&g).unwrap().mul(&c.act(&h).unwrap()));
        }
    }

    #[test]
    fn twist_is_a_permutation_of_cosets() {
        let s = setup(5);
        for (i, row) in s.twist.iter().enumerate() {
            for (j, (target, rho)) in row.iter().enumerate() {
                assert!(kstar_membership(rho, 5).unwrap());
                let b = s.basis[j][0][1];
                assert_eq!(*target as i64, (i as i64 + b).rem_euclid(5));
            }
        }
    }

    #[test]
    fn truncation_machinery_agrees_with_sym_model() {
        let s = setup(5);
        let sc = sl2_structure().unwrap();
        for k in [0u32, 1, 2, 3, 7, 12] {
            for r in 1..=3 {
                let w = ReductiveWeight::new(k, 0);
                let t = TruncatedCoefficients::with_structure(sc.clone(), w, 5, r).unwrap();
                let o = SymTruncation { weight: w, p: 5, r };
                for y in &s.group.generators {
                    assert_eq!(t.act(y).unwrap(), o.act(y).unwrap(), "k={k} r={r} {y:?}");
                }
                assert_eq!(truncated_h1(&t, &s).unwrap(), truncated_h1(&o, &s).unwrap());
            }
        }
    }

    #[test]
    fn trivial_coefficients() {
        let s = setup(5);
        let h = lattice_h1(&s, ReductiveWeight::new(0, 0)).unwrap();
        assert_eq!((h.dim_h0, h.dim_h1), (1, 3));
        assert!(h.euler_formula_holds(3));
        let pinned: Vec<BigInt> = [1, -7, 11, -5].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(h.charpoly, pinned);
    }

    #[test]
    fn dimensions_follow_euler_characteristic() {
        for p in [5, 7] {
            let s = setup(p);
            for k in 0..6 {
                let h = lattice_h1(&s, ReductiveWeight::new(k, 0)).unwrap();
                assert!(h.euler_formula_holds(s.rank()), "p={p} k={k}");
                assert_eq!(h.dim_h0, usize::from(k == 0));
                assert!(h.preserves_coboundaries);
                assert_eq!(h.charpoly.len(), h.dim_h1 + 1);
            }
        }
    }

    #[test]
    fn charpoly_does_not_depend_on_representatives() {
        let g = Arc::new(free_generators(5).unwrap());
        let a = HeckeSetup::new(g.clone(), coset_reps(5)).unwrap();
        for seed in [1, 2] {
            let b = HeckeSetup::new(g.clone(), shuffled_coset_reps(5, seed)).unwrap();
            assert_ne!(a.reps, b.reps);
            for k in [0, 2, 3] {
                let w = ReductiveWeight::new(k, 0);
                assert_eq!(lattice_h1(&a, w).unwrap().charpoly, lattice_h1(&b, w).unwrap().charpoly);
            }
        }
    }

    #[test]
    fn custom_basis_gives_the_same_operator_up_to_conjugacy() {
        let g = Arc::new(free_generators(5).unwrap());
        let y = &g.generators;
        let text = format!(
            "# Nielsen moves of the default basis\n{} {} {} {}\n{} {} {} {}\n{} {} {} {}\n",
            y[2][0][0],
            y[2][0][1],
            y[2][1][0],
            y[2][1][1],
            mat_mul(&y[0], &y[1])[0][0],
            mat_mul(&y[0], &y[1])[0][1],
            mat_mul(&y[0], &y[1])[1][0],
            mat_mul(&y[0], &y[1])[1][1],
            y[1][0][0],
            y[1][0][1],
            y[1][1][0],
            y[1][1][1],
        );
        let basis = parse_generator_file(&text).unwrap();
        let custom = HeckeSetup::with_basis(g.clone(), coset_reps(5), basis).unwrap();
        let default = HeckeSetup::new(g.clone(), coset_reps(5)).unwrap();
        for k in [0, 2] {
            let w = ReductiveWeight::new(k, 0);
            assert_eq!(lattice_h1(&custom, w).unwrap().charpoly, lattice_h1(&default, w).unwrap().charpoly);
        }
        let bad = vec![y[0], y[0], y[1]];
        assert!(HeckeSetup::with_basis(g.clone(), coset_reps(5), bad).is_err());
        assert!(parse_generator_file("1 2 3").is_err());
    }

    #[test]
    fn normalization_controls_divisibility() {
        let s = setup(5);
        for k in 0..6 {
            for r in 1..4 {
                assert!(annihilation_check(&s, ReductiveWeight::new(k, 0), r, true).unwrap());
                if k >= 1 {
                    assert!(!annihilation_check(&s, ReductiveWeight::new(k, 0), r, false).unwrap());
                }
            }
            assert!(hecke_scalar_check(ReductiveWeight::new(k, 0), 5));
            assert!(hecke_scalar_check(ReductiveWeight::new(k, -2), 7));
        }
    }

    #[test]
    fn scaling_relation() {
        let s = setup(5);
        let w = ReductiveWeight::new(3, 1);
        let c = LatticeCoefficients::new(w, 5);
        let plain = assemble(&c, &hecke_blocks(&c, &s, false).unwrap());
        let norm = hecke_matrix(&c, &s).unwrap();
        // λ̃(h)π(h⁻¹) = p^{k+m} · π(h⁻¹), and π(h⁻¹) = diag(p^{j−k−m})
        let lam = w.on_hecke_element(5).to_integer();
        assert_eq!(lam, BigInt::from(625));
        let scal = c.hecke_scalar();
        for j in 0..4 {
            assert_eq!(scal.get(j, j), &pow_big(5, j as u32));
        }
        assert_ne!(plain, norm);
        let t = unnormalized_hecke(&s, w).unwrap();
        let lam = w.on_hecke_element(5);
        let scaled: Vec<Vec<BigRational>> = t.iter().map(|row| row.iter().map(|x| x * &lam).collect()).collect();
        assert_eq!(crate::linalg::rat_to_int(&scaled).unwrap(), norm);
        assert!(crate::linalg::rat_to_int(&t).is_none());
    }
}
