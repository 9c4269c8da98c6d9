//! Chevalley basis and the Kostant Z-form.
//!
//! Structure constants are read off a concrete faithful representation built
//! from the Cartan matrix alone, with root vectors fixed through extraspecial
//! pairs. Straightening rewrites words into the PBW order
//! `X₋ᵃ Hᵇ X₊ᶜ` (negative block, binomial toral block, positive block), working
//! over exact rationals and certifying integrality where the Z-form demands it.

use crate::linalg::{binomial, binomial_i64, factorial, rat_mul as qmul, rat_zeros, RatMat};
use crate::rootsys::RootSystem;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PbwError {
    #[error("structure constant check failed: {0}")]
    Inconsistent(String),
    #[error("non-integral coefficient {coeff} at {monomial}")]
    NonIntegral { coeff: String, monomial: String },
    #[error("toral block of length {len} exceeds divided-power degree {k}")]
    ToralDegree { len: u32, k: u32 },
    #[error("cannot parse expression: {0}")]
    Parse(String),
}

/// A root with sign: `pos` selects `±β_idx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SRoot {
    pub pos: bool,
    pub idx: usize,
}

impl SRoot {
    pub fn plus(idx: usize) -> Self {
        SRoot { pos: true, idx }
    }
    pub fn minus(idx: usize) -> Self {
        SRoot { pos: false, idx }
    }
    pub fn neg(self) -> Self {
        SRoot { pos: !self.pos, idx: self.idx }
    }
}

/// Chevalley basis element: a root vector or a simple coroot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieElem {
    X(SRoot),
    H(usize),
}

pub type LieVec = BTreeMap<LieElem, BigRational>;

fn lv_add(v: &mut LieVec, e: LieElem, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let slot = v.entry(e).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        v.remove(&e);
    }
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

type QMat = RatMat;

fn qzeros(n: usize) -> QMat {
    rat_zeros(n, n)
}

fn qbracket(a: &QMat, b: &QMat) -> QMat {
    let ab = qmul(a, b);
    let ba = qmul(b, a);
    ab.iter().zip(&ba).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

fn qscale(a: &QMat, c: &BigRational) -> QMat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

fn qis_zero(a: &QMat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// `a = c · b` for some rational `c`; returns `c` (requires `b ≠ 0`).
fn qratio(a: &QMat, b: &QMat) -> Option<BigRational> {
    let mut ratio: Option<BigRational> = None;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            if y.is_zero() {
                if !x.is_zero() {
                    return None;
                }
                continue;
            }
            let r = x / y;
            match &ratio {
                None => ratio = Some(r),
                Some(old) if *old != r => return None,
                _ => {}
            }
        }
    }
    ratio
}

/// A finite-dimensional irreducible representation given by the matrices of
/// the Chevalley generators `e_i`, `f_i` on a weight basis, over Q.
#[derive(Clone, Debug)]
pub struct GeneratorRep {
    pub e: Vec<QMat>,
    pub f: Vec<QMat>,
    pub weights: Vec<Vec<i64>>,
}

impl GeneratorRep {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn h(&self, i: usize) -> QMat {
        let n = self.dim();
        let mut m = qzeros(n);
        for k in 0..n {
            m[k][k] = q(self.weights[k][i]);
        }
        m
    }
}

/// Builds the irreducible module of highest weight `λ` level by level: every
/// new vector `f_j w` is identified through its images under all `e_i`, which
/// determine it because the module has no singular vectors below the top.
pub fn build_generator_rep(rs: &RootSystem, lambda: &[i64], max_dim: usize) -> GeneratorRep {
    let n = rs.rank();
    // vectors are indexed globally; levels[d] lists the indices at depth d
    let mut weights: Vec<Vec<i64>> = vec![lambda.to_vec()];
    let mut levels: Vec<Vec<usize>> = vec![vec![0]];
    // sparse actions: e_act[i][v] = image of v (map index -> coeff)
    let mut e_act: Vec<Vec<BTreeMap<usize, BigRational>>> = vec![vec![BTreeMap::new()]; n];
    let mut f_act: Vec<Vec<BTreeMap<usize, BigRational>>> = vec![vec![BTreeMap::new()]; n];

    loop {
        let prev = levels.last().unwrap().clone();
        // candidates grouped by weight
        let mut by_weight: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
        for &w in &prev {
            for j in 0..n {
                let wt: Vec<i64> = weights[w].iter().zip(&rs.simple_root_weights[j]).map(|(a, b)| a - b).collect();
                by_weight.entry(wt).or_default().push((w, j));
            }
        }
        let mut new_level = Vec::new();
        for (wt, cands) in by_weight {
            // signature of f_j w: concatenation of e_i f_j w over i, in the basis of depth d−1
            let sig_of = |w: usize,
                          j: usize,
                          e_act: &Vec<Vec<BTreeMap<usize, BigRational>>>,
                          f_act: &Vec<Vec<BTreeMap<usize, BigRational>>>| {
                let mut sig: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
                for i in 0..n {
                    // e_i f_j w = f_j e_i w + δ_ij μ(h_i) w
                    for (u, cu) in &e_act[i][w] {
                        for (t, ct) in &f_act[j][*u] {
                            let s = sig.entry((i, *t)).or_insert_with(BigRational::zero);
                            *s += cu * ct;
                        }
                    }
                    if i == j {
                        let s = sig.entry((i, w)).or_insert_with(BigRational::zero);
                        *s += q(weights[w][i]);
                    }
                }
                sig.retain(|_, v| !v.is_zero());
                sig
            };
            let sigs: Vec<BTreeMap<(usize, usize), BigRational>> =
                cands.iter().map(|&(w, j)| sig_of(w, j, &e_act, &f_act)).collect();
            // independent subset by incremental elimination over Q
            let keys: Vec<(usize, usize)> = {
                let mut ks: Vec<(usize, usize)> = sigs.iter().flat_map(|s| s.keys().cloned()).collect();
                ks.sort();
                ks.dedup();
                ks
            };
            let dense: Vec<Vec<BigRational>> = sigs
                .iter()
                .map(|s| keys.iter().map(|k| s.get(k).cloned().unwrap_or_else(BigRational::zero)).collect())
                .collect();
            let chosen = independent_rows(&dense);
            let base_index = weights.len();
            for (slot, &c) in chosen.iter().enumerate() {
                let id = base_index + slot;
                weights.push(wt.clone());
                for i in 0..n {
                    e_act[i].push(BTreeMap::new());
                    f_act[i].push(BTreeMap::new());
                }
                for ((i, t), v) in &sigs[c] {
                    e_act[*i][id].insert(*t, v.clone());
                }
                new_level.push(id);
            }
            // express every candidate in the chosen basis
            let basis_rows: Vec<Vec<BigRational>> = chosen.iter().map(|&c| dense[c].clone()).collect();
            for (ci, &(w, j)) in cands.iter().enumerate() {
                if let Some(coeffs) = express_in_rows(&basis_rows, &dense[ci]) {
                    for (slot, cf) in coeffs.into_iter().enumerate() {
                        if !cf.is_zero() {
                            f_act[j][w].insert(base_index + slot, cf);
                        }
                    }
                } else {
                    panic!("candidate outside the span of the chosen basis");
                }
            }
            assert!(weights.len() <= max_dim, "representation exceeds {max_dim}");
        }
        if new_level.is_empty() {
            break;
        }
        levels.push(new_level);
    }
    let dim = weights.len();
    let dense = |act: &Vec<Vec<BTreeMap<usize, BigRational>>>| -> Vec<QMat> {
        act.iter()
            .map(|per| {
                let mut m = qzeros(dim);
                for (src, img) in per.iter().enumerate() {
                    for (tgt, c) in img {
                        m[*tgt][src] = c.clone();
                    }
                }
                m
            })
            .collect()
    };
    GeneratorRep { e: dense(&e_act), f: dense(&f_act), weights }
}

/// Indices of a maximal linearly independent subset of rows (greedy, in order).
fn independent_rows(rows: &[Vec<BigRational>]) -> Vec<usize> {
    let mut echelon: Vec<(usize, Vec<BigRational>)> = Vec::new(); // (pivot col, row)
    let mut chosen = Vec::new();
    for (idx, r) in rows.iter().enumerate() {
        let mut v = r.clone();
        for (pc, er) in &echelon {
            if !v[*pc].is_zero() {
                let f = &v[*pc] / &er[*pc];
                for (x, y) in v.iter_mut().zip(er) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            echelon.push((pc, v));
            chosen.push(idx);
        }
    }
    chosen
}

/// Solve `Σ c_k rows[k] = target` (rows independent).
fn express_in_rows(rows: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = rows.len();
    let m = target.len();
    // Gaussian elimination on the transposed system (m equations, k unknowns)
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k).map(|j| rows[j][i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..=k {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if (r..m).any(|i| !a[i][k].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (row, &c) in piv_cols.iter().enumerate() {
        sol[c] = a[row][k].clone();
    }
    Some(sol)
}

/// Bracket table of a Chevalley basis.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub rs: RootSystem,
    /// `N_{α,β}` for signed roots with `α + β ∈ Φ`.
    pub n: BTreeMap<(SRoot, SRoot), i64>,
    /// Coroot of each positive root in simple-coroot coordinates.
    pub coroots: Vec<Vec<i64>>,
    /// Root vectors `x_β` (positive then negative) as matrices in the defining representation.
    pub rep: GeneratorRep,
    pub root_mats: BTreeMap<SRoot, QMat>,
}

impl StructureConstants {
    pub fn coords(&self, r: SRoot) -> Vec<i64> {
        let c = &self.rs.positive_roots[r.idx].coords;
        if r.pos {
            c.clone()
        } else {
            c.iter().map(|x| -x).collect()
        }
    }

    pub fn sroot_of(&self, coords: &[i64]) -> Option<SRoot> {
        if let Some(i) = self.rs.positive_index(coords) {
            return Some(SRoot::plus(i));
        }
        let neg: Vec<i64> = coords.iter().map(|x| -x).collect();
        self.rs.positive_index(&neg).map(SRoot::minus)
    }

    pub fn num_positive(&self) -> usize {
        self.rs.num_positive()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    /// `β(h_i)` for a signed root.
    pub fn root_on_coroot(&self, r: SRoot, i: usize) -> i64 {
        let v = self.rs.pairing(&self.rs.positive_roots[r.idx].coords, i);
        if r.pos {
            v
        } else {
            -v
        }
    }

    /// `[a, b]` in the Chevalley basis.
    pub fn bracket(&self, a: LieElem, b: LieElem) -> LieVec {
        let mut out = LieVec::new();
        match (a, b) {
            (LieElem::H(_), LieElem::H(_)) => {}
            (LieElem::H(i), LieElem::X(r)) => lv_add(&mut out, b, q(self.root_on_coroot(r, i))),
            (LieElem::X(r), LieElem::H(i)) => lv_add(&mut out, a, q(-self.root_on_coroot(r, i))),
            (LieElem::X(r), LieElem::X(s)) => {
                if r.idx == s.idx && r.pos != s.pos {
                    let sign = if r.pos { 1 } else { -1 };
                    for (i, &c) in self.coroots[r.idx].iter().enumerate() {
                        lv_add(&mut out, LieElem::H(i), q(sign * c));
                    }
                } else if let Some(&nv) = self.n.get(&(r, s)) {
                    let sum: Vec<i64> = self.coords(r).iter().zip(self.coords(s)).map(|(x, y)| x + y).collect();
                    let t = self.sroot_of(&sum).expect("sum is a root");
                    lv_add(&mut out, LieElem::X(t), q(nv));
                }
            }
        }
        out
    }

    pub fn bracket_vec(&self, a: &LieVec, b: &LieVec) -> LieVec {
        let mut out = LieVec::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                for (e, c) in self.bracket(*ea, *eb) {
                    lv_add(&mut out, e, c * ca * cb);
                }
            }
        }
        out
    }

    /// `(−ad z)^t (y) / t!` for `t = 0..=tmax`.
    pub fn neg_ad_powers(&self, z: LieElem, y: LieElem, tmax: u32) -> Vec<LieVec> {
        let mut out = Vec::with_capacity(tmax as usize + 1);
        let mut cur: LieVec = [(y, BigRational::one())].into_iter().collect();
        let zv: LieVec = [(z, BigRational::one())].into_iter().collect();
        out.push(cur.clone());
        for t in 1..=tmax {
            if cur.is_empty() {
                out.push(LieVec::new());
                continue;
            }
            let b = self.bracket_vec(&zv, &cur);
            cur = b.into_iter().map(|(e, c)| (e, -c)).collect();
            let ft = BigRational::from_integer(factorial(t as u64));
            out.push(cur.iter().map(|(e, c)| (*e, c / &ft)).collect());
        }
        out
    }

    /// Matrix of a Lie element in the defining representation.
    pub fn lie_matrix(&self, v: &LieVec) -> QMat {
        let dim = self.rep.dim();
        let mut m = qzeros(dim);
        for (e, c) in v {
            let base = match e {
                LieElem::X(r) => self.root_mats[r].clone(),
                LieElem::H(i) => self.rep.h(*i),
            };
            for a in 0..dim {
                for b in 0..dim {
                    if !base[a][b].is_zero() {
                        m[a][b] += &base[a][b] * c;
                    }
                }
            }
        }
        m
    }
}

/// Largest `q` with `β − qα` a root (signed coordinates).
pub fn root_string_below(rs: &RootSystem, alpha: &[i64], beta: &[i64]) -> i64 {
    let mut qv = 0;
    loop {
        let next: Vec<i64> = beta.iter().zip(alpha).map(|(b, a)| b - (qv + 1) * a).collect();
        if next.iter().all(|&x| x == 0) || !rs.is_root(&next) {
            return qv;
        }
        qv += 1;
    }
}

/// Index of the extraspecial pair `(α, β)` of a non-simple positive root, as positive-root indices.
pub fn extraspecial_pair(rs: &RootSystem, xi: usize) -> (usize, usize) {
    let target = &rs.positive_roots[xi].coords;
    for a in 0..xi {
        let rest: Vec<i64> = target.iter().zip(&rs.positive_roots[a].coords).map(|(x, y)| x - y).collect();
        if let Some(b) = rs.positive_index(&rest) {
            if a < b {
                return (a, b);
            }
        }
    }
    panic!("root {xi} has no special pair");
}

/// Root vectors `x_{±β}` acting on `rep`, fixed from the simple generators
/// through extraspecial pairs: `x_ξ = [x_α, x_β]/(q+1)` and
/// `x_{−ξ} = −[x_{−α}, x_{−β}]/(q+1)`.
pub fn root_vector_matrices(rs: &RootSystem, rep: &GeneratorRep) -> BTreeMap<SRoot, RatMat> {
    let mut root_mats: BTreeMap<SRoot, QMat> = BTreeMap::new();
    for k in 0..rs.num_positive() {
        let c = &rs.positive_roots[k].coords;
        if rs.heights[k] == 1 {
            let i = c.iter().position(|&x| x == 1).unwrap();
            root_mats.insert(SRoot::plus(k), rep.e[i].clone());
            root_mats.insert(SRoot::minus(k), rep.f[i].clone());
        } else {
            let (a, b) = extraspecial_pair(rs, k);
            let qv = root_string_below(rs, &rs.positive_roots[a].coords, &rs.positive_roots[b].coords);
            let inv = BigRational::new(BigInt::one(), BigInt::from(qv + 1));
            let xp = qscale(&qbracket(&root_mats[&SRoot::plus(a)], &root_mats[&SRoot::plus(b)]), &inv);
            let xm = qscale(&qbracket(&root_mats[&SRoot::minus(a)], &root_mats[&SRoot::minus(b)]), &(-inv));
            root_mats.insert(SRoot::plus(k), xp);
            root_mats.insert(SRoot::minus(k), xm);
        }
    }
    root_mats
}

/// Evaluates words and PBW elements on an irreducible representation built
/// directly from the Cartan matrix, with no straightening involved.
pub struct RepOracle {
    pub rep: GeneratorRep,
    pub mats: BTreeMap<SRoot, RatMat>,
}

impl RepOracle {
    pub fn new(rs: &RootSystem, lambda: &[i64], max_dim: usize) -> Self {
        let rep = build_generator_rep(rs, lambda, max_dim);
        let mats = root_vector_matrices(rs, &rep);
        RepOracle { rep, mats }
    }

    pub fn factor_matrix(&self, f: Factor) -> RatMat {
        let n = self.rep.dim();
        let mut out = crate::linalg::rat_identity(n);
        match f {
            Factor::Root(r, k) => {
                for _ in 0..k {
                    out = qmul(&self.mats[&r], &out);
                }
                qscale(&out, &BigRational::new(BigInt::one(), factorial(k as u64)))
            }
            Factor::Toral(i, k) => {
                let h = self.rep.h(i);
                for t in 0..k {
                    let mut shifted = h.clone();
                    for (d, row) in shifted.iter_mut().enumerate() {
                        row[d] -= q(t as i64);
                    }
                    out = qmul(&shifted, &out);
                }
                qscale(&out, &BigRational::new(BigInt::one(), factorial(k as u64)))
            }
        }
    }

    pub fn word_matrix(&self, word: &[Factor]) -> RatMat {
        let mut out = crate::linalg::rat_identity(self.rep.dim());
        for f in word {
            out = qmul(&out, &self.factor_matrix(*f));
        }
        out
    }

    pub fn monomial_word(m: &Monomial) -> Vec<Factor> {
        let mut w = Vec::new();
        for (k, &e) in m.a.iter().enumerate() {
            if e > 0 {
                w.push(Factor::Root(SRoot::minus(k), e));
            }
        }
        for (i, &e) in m.b.iter().enumerate() {
            if e > 0 {
                w.push(Factor::Toral(i, e));
            }
        }
        for (k, &e) in m.c.iter().enumerate() {
            if e > 0 {
                w.push(Factor::Root(SRoot::plus(k), e));
            }
        }
        w
    }

    pub fn element_matrix(&self, u: &UElement) -> RatMat {
        let n = self.rep.dim();
        let mut out = rat_zeros(n, n);
        for (m, c) in &u.terms {
            let mm = self.word_matrix(&Self::monomial_word(m));
            for i in 0..n {
                for j in 0..n {
                    if !mm[i][j].is_zero() {
                        out[i][j] += &mm[i][j] * c;
                    }
                }
            }
        }
        out
    }
}

pub fn build_structure_constants(rs: &RootSystem) -> Result<StructureConstants, PbwError> {
    let n = rs.rank();
    let mut omega1 = vec![0; n];
    omega1[0] = 1;
    let rep = build_generator_rep(rs, &omega1, 64);
    let s = rs.num_positive();
    let root_mats = root_vector_matrices(rs, &rep);
    let coroots: Vec<Vec<i64>> = rs.positive_roots.iter().map(|r| rs.coroot(&r.coords)).collect();
    let string_q = |alpha: &[i64], beta: &[i64]| root_string_below(rs, alpha, beta);
    let mut sc = StructureConstants { rs: rs.clone(), n: BTreeMap::new(), coroots, rep, root_mats };
    // [x_β, x_{−β}] = h_β
    for k in 0..s {
        let br = qbracket(&sc.root_mats[&SRoot::plus(k)], &sc.root_mats[&SRoot::minus(k)]);
        let mut hv = LieVec::new();
        for (i, &c) in sc.coroots[k].iter().enumerate() {
            lv_add(&mut hv, LieElem::H(i), q(c));
        }
        if br != sc.lie_matrix(&hv) {
            return Err(PbwError::Inconsistent(format!("[x_β, x_−β] ≠ h_β for root {k}")));
        }
        if qis_zero(&sc.root_mats[&SRoot::plus(k)]) {
            return Err(PbwError::Inconsistent("representation is not faithful".into()));
        }
    }
    let all: Vec<SRoot> = (0..s).map(SRoot::plus).chain((0..s).map(SRoot::minus)).collect();
    for &r in &all {
        for &t in &all {
            let sum: Vec<i64> = sc.coords(r).iter().zip(sc.coords(t)).map(|(x, y)| x + y).collect();
            if sum.iter().all(|&x| x == 0) {
                continue;
            }
            let br = qbracket(&sc.root_mats[&r], &sc.root_mats[&t]);
            match sc.sroot_of(&sum) {
                Some(u) => {
                    let ratio = qratio(&br, &sc.root_mats[&u])
                        .ok_or_else(|| PbwError::Inconsistent("bracket not proportional to root vector".into()))?;
                    if !ratio.is_integer() {
                        return Err(PbwError::Inconsistent("non-integral structure constant".into()));
                    }
                    let nv = ratio.to_integer().to_i64().unwrap();
                    let qv = string_q(&sc.coords(r), &sc.coords(t));
                    if nv.abs() != qv + 1 {
                        return Err(PbwError::Inconsistent(format!("|N| = {} but q + 1 = {}", nv.abs(), qv + 1)));
                    }
                    sc.n.insert((r, t), nv);
                }
                None => {
                    if !qis_zero(&br) {
                        return Err(PbwError::Inconsistent("bracket of roots with non-root sum is nonzero".into()));
                    }
                }
            }
        }
    }
    check_antisymmetry_and_jacobi(&sc)?;
    Ok(sc)
}

fn check_antisymmetry_and_jacobi(sc: &StructureConstants) -> Result<(), PbwError> {
    for (&(a, b), &v) in &sc.n {
        if sc.n.get(&(b, a)) != Some(&-v) {
            return Err(PbwError::Inconsistent("antisymmetry".into()));
        }
    }
    let s = sc.num_positive();
    let mut basis: Vec<LieElem> = (0..s).map(|k| LieElem::X(SRoot::plus(k))).collect();
    basis.extend((0..s).map(|k| LieElem::X(SRoot::minus(k))));
    basis.extend((0..sc.rank()).map(LieElem::H));
    let single = |e: LieElem| -> LieVec { [(e, BigRational::one())].into_iter().collect() };
    for &x in &basis {
        for &y in &basis {
            for &z in &basis {
                let mut total = LieVec::new();
                for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                    let inner = sc.bracket(b, c);
                    for (e, cf) in sc.bracket_vec(&single(a), &inner) {
                        lv_add(&mut total, e, cf);
                    }
                }
                if !total.is_empty() {
                    return Err(PbwError::Inconsistent("Jacobi identity".into()));
                }
            }
        }
    }
    Ok(())
}

/// PBW monomial `X₋ᵃ Hᵇ X₊ᶜ` with divided powers and binomial toral factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub c: Vec<u32>,
}

impl Monomial {
    pub fn one(s: usize, l: usize) -> Self {
        Monomial { a: vec![0; s], b: vec![0; l], c: vec![0; s] }
    }

    pub fn negative(a: Vec<u32>, l: usize) -> Self {
        let s = a.len();
        Monomial { a, b: vec![0; l], c: vec![0; s] }
    }

    pub fn toral_length(&self) -> u32 {
        self.b.iter().sum()
    }

    pub fn is_negative_only(&self) -> bool {
        self.b.iter().all(|&x| x == 0) && self.c.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={:?} b={:?} c={:?}", self.a, self.b, self.c)
    }
}

/// Element of the enveloping algebra in PBW coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UElement {
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl UElement {
    pub fn zero() -> Self {
        UElement { terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut u = UElement::zero();
        u.add_term(m, c);
        u
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &UElement, c: &BigRational) {
        for (m, v) in &other.terms {
            let slot = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *slot += v * c;
        }
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn scale(&self, c: &BigRational) -> UElement {
        let mut out = UElement::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn max_toral_length(&self) -> u32 {
        self.terms.keys().map(|m| m.toral_length()).max().unwrap_or(0)
    }

    /// Integer coefficients; errors on the first non-integral one.
    pub fn to_integral(&self) -> Result<BTreeMap<Monomial, BigInt>, PbwError> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            if !c.is_integer() {
                return Err(PbwError::NonIntegral { coeff: c.to_string(), monomial: m.to_string() });
            }
            out.insert(m.clone(), c.to_integer());
        }
        Ok(out)
    }
}

/// A factor of a word to be straightened.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// Divided power `x_β^{(n)}`.
    Root(SRoot, u32),
    /// Binomial `binom(h_i, n)`.
    Toral(usize, u32),
}

/// Straightening engine with a memo table keyed by (generator, monomial).
pub struct Straightener {
    pub sc: Arc<StructureConstants>,
    memo: HashMap<(LieElem, Monomial), Arc<UElement>>,
    pos_memo: HashMap<(usize, Vec<u32>), Arc<Vec<(Vec<u32>, BigRational)>>>,
}

impl Straightener {
    pub fn new(sc: Arc<StructureConstants>) -> Self {
        Straightener { sc, memo: HashMap::new(), pos_memo: HashMap::new() }
    }

    fn s(&self) -> usize {
        self.sc.num_positive()
    }

    fn l(&self) -> usize {
        self.sc.rank()
    }

    pub fn one(&self) -> UElement {
        UElement::monomial(Monomial::one(self.s(), self.l()), BigRational::one())
    }

    /// `g · m` in PBW coordinates for a Chevalley basis element `g`.
    pub fn left_mul(&mut self, g: LieElem, m: &Monomial) -> Arc<UElement> {
        let key = (g, m.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let res = Arc::new(self.left_mul_uncached(g, m));
        self.memo.insert(key, res.clone());
        res
    }

    pub fn apply_lie(&mut self, g: LieElem, x: &UElement) -> UElement {
        let mut out = UElement::zero();
        for (m, c) in &x.terms {
            let r = self.left_mul(g, m);
            out.add_scaled(&r, c);
        }
        out
    }

    pub fn apply_lie_vec(&mut self, v: &LieVec, x: &UElement) -> UElement {
        let mut out = UElement::zero();
        for (e, c) in v {
            let r = self.apply_lie(*e, x);
            out.add_scaled(&r, c);
        }
        out
    }

    /// `g^{(n)} · x`.
    pub fn apply_divided(&mut self, g: LieElem, n: u32, x: &UElement) -> UElement {
        let mut cur = x.clone();
        for _ in 0..n {
            cur = self.apply_lie(g, &cur);
        }
        if n > 1 {
            cur = cur.scale(&BigRational::new(BigInt::one(), factorial(n as u64)));
        }
        cur
    }

    pub fn apply_factor(&mut self, f: Factor, x: &UElement) -> UElement {
        match f {
            Factor::Root(r, n) => self.apply_divided(LieElem::X(r), n, x),
            Factor::Toral(i, n) => {
                let mut cur = x.clone();
                for t in 0..n {
                    let mut next = self.apply_lie(LieElem::H(i), &cur);
                    next.add_scaled(&cur, &q(-(t as i64)));
                    cur = next;
                }
                cur.scale(&BigRational::new(BigInt::one(), factorial(n as u64)))
            }
        }
    }

    /// Rewrites the product of `word` (left to right) in PBW order.
    pub fn straighten(&mut self, word: &[Factor]) -> UElement {
        let mut acc = self.one();
        for f in word.iter().rev() {
            acc = self.apply_factor(*f, &acc);
        }
        acc
    }

    /// Straightens `word · X₋ᵃ`.
    pub fn straighten_onto(&mut self, word: &[Factor], a: &[u32]) -> UElement {
        let mut acc = UElement::monomial(Monomial::negative(a.to_vec(), self.l()), BigRational::one());
        for f in word.iter().rev() {
            acc = self.apply_factor(*f, &acc);
        }
        acc
    }

    fn left_mul_uncached(&mut self, g: LieElem, m: &Monomial) -> UElement {
        match g {
            LieElem::H(i) => self.mul_toral(i, m),
            LieElem::X(r) if !r.pos => self.mul_negative(r.idx, m),
            LieElem::X(r) => self.mul_positive(r.idx, m),
        }
    }

    fn mul_toral(&mut self, i: usize, m: &Monomial) -> UElement {
        // h_i X₋ᵃ = X₋ᵃ (h_i − ν(h_i)) with ν the weight of the negative block
        let mut shift = 0i64;
        for (k, &ak) in m.a.iter().enumerate() {
            if ak > 0 {
                shift += ak as i64 * self.sc.root_on_coroot(SRoot::plus(k), i);
            }
        }
        // h binom(h, b) = (b+1) binom(h, b+1) + b binom(h, b)
        let bi = m.b[i] as i64;
        let mut out = UElement::zero();
        let mut up = m.clone();
        up.b[i] += 1;
        out.add_term(up, q(bi + 1));
        out.add_term(m.clone(), q(bi - shift));
        out
    }

    fn first_nonzero(v: &[u32]) -> Option<usize> {
        v.iter().position(|&x| x > 0)
    }

    fn mul_negative(&mut self, k: usize, m: &Monomial) -> UElement {
        let first = Self::first_nonzero(&m.a);
        match first {
            None => {
                let mut out = m.clone();
                out.a[k] = 1;
                UElement::monomial(out, BigRational::one())
            }
            Some(j) if k < j => {
                let mut out = m.clone();
                out.a[k] = 1;
                UElement::monomial(out, BigRational::one())
            }
            Some(j) if k == j => {
                let mut out = m.clone();
                out.a[k] += 1;
                let n = out.a[k] as i64;
                UElement::monomial(out, q(n))
            }
            Some(j) => {
                // y z^{(a)} = Σ_t z^{(a−t)} (−ad z)^t(y)/t!
                let a1 = m.a[j];
                let mut rest = m.clone();
                rest.a[j] = 0;
                let z = LieElem::X(SRoot::minus(j));
                let powers = self.sc.neg_ad_powers(z, LieElem::X(SRoot::minus(k)), a1);
                let mut out = UElement::zero();
                let rest_u = UElement::monomial(rest, BigRational::one());
                for (t, lv) in powers.iter().enumerate() {
                    if lv.is_empty() {
                        continue;
                    }
                    let inner = self.apply_lie_vec(lv, &rest_u);
                    let outer = self.apply_divided(z, a1 - t as u32, &inner);
                    out.add_scaled(&outer, &BigRational::one());
                }
                out
            }
        }
    }

    fn mul_positive(&mut self, k: usize, m: &Monomial) -> UElement {
        if let Some(j) = Self::first_nonzero(&m.a) {
            let a1 = m.a[j];
            let mut rest = m.clone();
            rest.a[j] = 0;
            let z = LieElem::X(SRoot::minus(j));
            let powers = self.sc.neg_ad_powers(z, LieElem::X(SRoot::plus(k)), a1);
            let rest_u = UElement::monomial(rest, BigRational::one());
            let mut out = UElement::zero();
            for (t, lv) in powers.iter().enumerate() {
                if lv.is_empty() {
                    continue;
                }
                let inner = self.apply_lie_vec(lv, &rest_u);
                let outer = self.apply_divided(z, a1 - t as u32, &inner);
                out.add_scaled(&outer, &BigRational::one());
            }
            return out;
        }
        // x_β binom(h, b) = binom(h − β(h), b) x_β
        let l = self.l();
        let mut toral: Vec<(Vec<u32>, BigInt)> = vec![(vec![], BigInt::one())];
        for i in 0..l {
            let s = -self.sc.root_on_coroot(SRoot::plus(k), i);
            let bi = m.b[i];
            let mut next = Vec::new();
            for (prefix, c) in &toral {
                for u in 0..=bi {
                    let coeff = binomial_i64(s, (bi - u) as u64);
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut p = prefix.clone();
                    p.push(u);
                    next.push((p, c * coeff));
                }
            }
            toral = next;
        }
        let pos = self.pos_left_mul(k, &m.c);
        let mut out = UElement::zero();
        for (b, cb) in &toral {
            for (c, cc) in pos.iter() {
                let mono = Monomial { a: m.a.clone(), b: b.clone(), c: c.clone() };
                out.add_term(mono, BigRational::from_integer(cb.clone()) * cc);
            }
        }
        out
    }

    /// `x_β · X₊ᶜ` inside the positive part.
    fn pos_left_mul(&mut self, k: usize, c: &[u32]) -> Arc<Vec<(Vec<u32>, BigRational)>> {
        let key = (k, c.to_vec());
        if let Some(v) = self.pos_memo.get(&key) {
            return v.clone();
        }
        let res: Vec<(Vec<u32>, BigRational)> = match Self::first_nonzero(c) {
            None => {
                let mut v = c.to_vec();
                v[k] = 1;
                vec![(v, BigRational::one())]
            }
            Some(j) if k < j => {
                let mut v = c.to_vec();
                v[k] = 1;
                vec![(v, BigRational::one())]
            }
            Some(j) if k == j => {
                let mut v = c.to_vec();
                v[k] += 1;
                let n = v[k] as i64;
                vec![(v, q(n))]
            }
            Some(j) => {
                let c1 = c[j];
                let mut rest = c.to_vec();
                rest[j] = 0;
                let z = LieElem::X(SRoot::plus(j));
                let powers = self.sc.neg_ad_powers(z, LieElem::X(SRoot::plus(k)), c1);
                let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
                for (t, lv) in powers.iter().enumerate() {
                    for (e, coeff) in lv {
                        let LieElem::X(r) = e else { panic!("positive bracket left the positive part") };
                        assert!(r.pos && r.idx > j);
                        let inner = self.pos_left_mul(r.idx, &rest);
                        for (v, cv) in inner.iter() {
                            // z^{(c1−t)} prepended; all roots of v come after j
                            let mut w = v.clone();
                            w[j] = c1 - t as u32;
                            let slot = acc.entry(w).or_insert_with(BigRational::zero);
                            *slot += cv * coeff;
                        }
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            }
        };
        let rc = Arc::new(res);
        self.pos_memo.insert(key, rc.clone());
        rc
    }
}

/// `λ(Hᵇ) = Π binom(λ(h_i), b_i)`.
pub fn eval_toral(b: &[u32], lambda: &[i64]) -> BigInt {
    b.iter().zip(lambda).fold(BigInt::one(), |acc, (&bi, &li)| acc * binomial(&BigInt::from(li), bi as u64))
}

/// `x_α^{(k)} · X₋ᵃ` in PBW order with certified integer coefficients and toral
/// blocks of length at most `k`.
pub fn divided_power_commute(
    st: &mut Straightener,
    alpha: usize,
    k: u32,
    a: &[u32],
) -> Result<BTreeMap<Monomial, BigInt>, PbwError> {
    let u = st.straighten_onto(&[Factor::Root(SRoot::plus(alpha), k)], a);
    let out = u.to_integral()?;
    for m in out.keys() {
        if m.toral_length() > k {
            return Err(PbwError::ToralDegree { len: m.toral_length(), k });
        }
    }
    Ok(out)
}

/// Parses words such as `"e1 f1^(2) h2 e[1,1]"`: `e_i`, `f_i`, `h_i` name simple
/// generators, `e[..]`/`f[..]` name root vectors by simple-root coordinates,
/// and `^(n)` takes a divided power (a binomial for `h`).
pub fn parse_word(sc: &StructureConstants, expr: &str) -> Result<Vec<Factor>, PbwError> {
    let mut out = Vec::new();
    for tok in expr.split_whitespace() {
        let (head, power) = match tok.find('^') {
            Some(pos) => {
                let p = tok[pos + 1..].trim_start_matches('(').trim_end_matches(')');
                let n: u32 = p.parse().map_err(|_| PbwError::Parse(tok.to_string()))?;
                (&tok[..pos], n)
            }
            None => (tok, 1),
        };
        let kind = head.chars().next().ok_or_else(|| PbwError::Parse(tok.to_string()))?;
        let body = &head[1..];
        let l = sc.rank();
        let root_coords: Vec<i64> = if body.starts_with('[') && body.ends_with(']') {
            body[1..body.len() - 1]
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| PbwError::Parse(tok.to_string()))?
        } else {
            let i: usize = body.parse().map_err(|_| PbwError::Parse(tok.to_string()))?;
            if i == 0 || i > l {
                return Err(PbwError::Parse(format!("{tok}: index out of range 1..={l}")));
            }
            let mut v = vec![0; l];
            v[i - 1] = 1;
            v
        };
        if root_coords.len() != l {
            return Err(PbwError::Parse(format!("{tok}: expected {l} coordinates")));
        }
        match kind {
            'e' | 'f' => {
                let idx = sc
                    .rs
                    .positive_index(&root_coords)
                    .ok_or_else(|| PbwError::Parse(format!("{tok}: not a positive root")))?;
                let r = if kind == 'e' { SRoot::plus(idx) } else { SRoot::minus(idx) };
                out.push(Factor::Root(r, power));
            }
            'h' => {
                let i = root_coords.iter().position(|&x| x == 1).filter(|_| root_coords.iter().sum::<i64>() == 1);
                let i = i.ok_or_else(|| PbwError::Parse(format!("{tok}: only simple coroots are allowed")))?;
                out.push(Factor::Toral(i, power));
            }
            _ => return Err(PbwError::Parse(tok.to_string())),
        }
    }
    Ok(out)
}

impl fmt::Display for UElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}·[{m}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
