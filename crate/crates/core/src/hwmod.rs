//! Integral Verma modules and the irreducible lattice `L_λ(Z) = V_λ(Z)/U_λ(Z)`.
//!
//! Weight spaces are indexed by `λ − μ` in simple-root coordinates. Each
//! Verma space has the basis `X₋ᵃ v` over Kostant partitions `a`; the maximal
//! submodule is propagated level by level and saturated, and the quotient is
//! presented by a canonical Hermite-form projection.

use crate::linalg::{hermite_rows, integer_kernel, rat_identity, IntMat, RatMat};
use crate::pbw::{eval_toral, Factor, PbwError, SRoot, Straightener, StructureConstants};
use crate::rootsys::{NotBelow, RootSystem, Weight};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};
use thiserror::Error;

pub const DEFAULT_DIMENSION_CAP: usize = 3000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HwError {
    #[error("weight {0:?} is not dominant")]
    NotDominant(Weight),
    #[error("weight is not below the highest weight")]
    NotBelow,
    #[error("module dimension {weyl} exceeds the cap {cap}")]
    DimensionCap { weyl: String, cap: usize },
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error("action on {0:?} is not integral")]
    NonIntegral(Vec<u32>),
}

impl From<NotBelow> for HwError {
    fn from(_: NotBelow) -> Self {
        HwError::NotBelow
    }
}

/// All exponent vectors `a` over the positive roots with `Σ a_k β_k = target`.
pub fn kostant_partitions(rs: &RootSystem, target: &[i64]) -> Vec<Vec<u32>> {
    fn rec(rs: &RootSystem, k: usize, rest: &mut Vec<i64>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == rs.num_positive() {
            if rest.iter().all(|&x| x == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let root = &rs.positive_roots[k].coords;
        let mut n = 0u32;
        loop {
            cur[k] = n;
            rec(rs, k + 1, rest, cur, out);
            if rest.iter().zip(root).any(|(r, c)| r < c) {
                break;
            }
            for (r, c) in rest.iter_mut().zip(root) {
                *r -= c;
            }
            n += 1;
        }
        for (r, c) in rest.iter_mut().zip(root) {
            *r += *c * n as i64;
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    if target.iter().any(|&x| x < 0) {
        return out;
    }
    let mut rest = target.to_vec();
    let mut cur = vec![0; rs.num_positive()];
    rec(rs, 0, &mut rest, &mut cur, &mut out);
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VermaWeightSpace {
    pub lambda: Weight,
    pub mu: Weight,
    pub monomials: Vec<Vec<u32>>,
}

pub fn verma_weight_basis(rs: &RootSystem, lambda: &[i64], mu: &[i64]) -> Result<VermaWeightSpace, NotBelow> {
    let diff = rs.difference_in_roots(lambda, mu)?;
    Ok(VermaWeightSpace { lambda: lambda.to_vec(), mu: mu.to_vec(), monomials: kostant_partitions(rs, &diff) })
}

/// `λ − Σ c_i α_i` in fundamental-weight coordinates.
pub fn weight_below(rs: &RootSystem, lambda: &[i64], diff: &[i64]) -> Weight {
    let d = rs.root_to_weight(diff);
    lambda.iter().zip(d).map(|(a, b)| a - b).collect()
}

pub fn dominant_conjugate(rs: &RootSystem, mu: &[i64]) -> Weight {
    let mut w = mu.to_vec();
    let cartan = rs.cartan();
    while let Some(i) = (0..w.len()).find(|&i| w[i] < 0) {
        let c = w[i];
        for j in 0..w.len() {
            w[j] -= c * cartan[i][j];
        }
    }
    w
}

/// `μ` is a weight of the irreducible module of highest weight `λ`.
pub fn in_weight_set(rs: &RootSystem, lambda: &[i64], mu: &[i64]) -> bool {
    rs.difference_in_roots(lambda, &dominant_conjugate(rs, mu)).is_ok()
}

#[derive(Clone, Debug)]
pub struct WeightSpace {
    pub mu: Weight,
    /// `λ − μ` in simple-root coordinates.
    pub diff: Vec<i64>,
    pub ht: i64,
    pub verma: Vec<Vec<u32>>,
    /// Columns: a basis of `U_λ(Z, μ)` in the Verma basis (saturated).
    pub submodule: IntMat,
    /// `dim L × dim V` projection onto the quotient, in Hermite form.
    pub proj: IntMat,
    /// Integral right inverse of `proj`.
    pub section: IntMat,
}

impl WeightSpace {
    pub fn dim(&self) -> usize {
        self.proj.rows()
    }
}

#[derive(Clone, Debug)]
pub struct MaximalSubmoduleLattice {
    pub lambda: Weight,
    pub mu: Weight,
    pub basis: IntMat,
}

/// Integer matrix of one generator between two weight spaces.
#[derive(Clone, Debug)]
pub struct ActionBlock {
    pub source: usize,
    pub target: usize,
    pub matrix: IntMat,
}

pub struct HighestWeightLattice {
    pub sc: Arc<StructureConstants>,
    pub lambda: Weight,
    /// Weight spaces with `ht_λ(μ) ≤ depth` were built.
    pub depth: i64,
    pub full_depth: i64,
    pub spaces: Vec<WeightSpace>,
    index: HashMap<Vec<i64>, usize>,
    straightener: Mutex<Straightener>,
}

impl std::fmt::Debug for HighestWeightLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HighestWeightLattice")
            .field("lambda", &self.lambda)
            .field("depth", &self.depth)
            .field("dims", &self.spaces.iter().map(|s| s.dim()).collect::<Vec<_>>())
            .finish()
    }
}

fn verma_column(
    st: &mut Straightener,
    lambda: &[i64],
    g: Factor,
    a: &[u32],
) -> Result<BTreeMap<Vec<u32>, BigInt>, HwError> {
    let u = st.straighten_onto(&[g], a);
    let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for (m, c) in &u.terms {
        if m.c.iter().any(|&x| x > 0) {
            continue;
        }
        let v = c * BigRational::from_integer(eval_toral(&m.b, lambda));
        *acc.entry(m.a.clone()).or_insert_with(BigRational::zero) += v;
    }
    let mut out = BTreeMap::new();
    for (k, v) in acc {
        if v.is_zero() {
            continue;
        }
        if !v.is_integer() {
            return Err(HwError::NonIntegral(a.to_vec()));
        }
        out.insert(k, v.to_integer());
    }
    Ok(out)
}

fn verma_matrix(
    st: &mut Straightener,
    lambda: &[i64],
    g: Factor,
    source: &[Vec<u32>],
    target: &[Vec<u32>],
) -> Result<IntMat, HwError> {
    let pos: HashMap<&Vec<u32>, usize> = target.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut m = IntMat::zeros(target.len(), source.len());
    for (j, a) in source.iter().enumerate() {
        for (img, c) in verma_column(st, lambda, g, a)? {
            let i = *pos.get(&img).expect("image lies in the target weight space");
            m.set(i, j, c);
        }
    }
    Ok(m)
}

/// Weyl's dimension formula `Π ⟨λ+ρ, β^∨⟩ / ⟨ρ, β^∨⟩`.
pub fn weyl_dimension(rs: &RootSystem, lambda: &[i64]) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for r in &rs.positive_roots {
        let co = rs.coroot(&r.coords);
        let a: i64 = co.iter().zip(lambda).map(|(c, l)| c * (l + 1)).sum();
        let b: i64 = co.iter().sum();
        num *= a;
        den *= b;
    }
    num / den
}

/// Weight multiplicities from Freudenthal's recursion, keyed by `λ − μ` in
/// simple-root coordinates. Uses only the inner product on weights.
pub fn freudenthal_multiplicities(rs: &RootSystem, lambda: &[i64]) -> BTreeMap<Vec<i64>, u64> {
    let l = rs.rank();
    let depth = rs.depth(lambda);
    let rho = rs.rho();
    let lr: Weight = lambda.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let norm_top = rs.weight_inner(&lr, &lr);
    let mut mult: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
    mult.insert(vec![0; l], BigRational::one());
    let roots: Vec<(Vec<i64>, Weight)> =
        rs.positive_roots.iter().map(|r| (r.coords.clone(), rs.root_to_weight(&r.coords))).collect();
    for h in 1..=depth {
        for diff in compositions(h, l) {
            let mu = weight_below(rs, lambda, &diff);
            let mr: Weight = mu.iter().zip(&rho).map(|(a, b)| a + b).collect();
            let den = &norm_top - rs.weight_inner(&mr, &mr);
            if !den.is_positive() {
                continue;
            }
            let mut num = BigRational::zero();
            for (rc, rw) in &roots {
                let mut j = 1i64;
                loop {
                    let up: Vec<i64> = diff.iter().zip(rc).map(|(d, c)| d - j * c).collect();
                    if up.iter().any(|&x| x < 0) {
                        break;
                    }
                    if let Some(m) = mult.get(&up) {
                        let w: Weight = mu.iter().zip(rw).map(|(a, b)| a + j * b).collect();
                        num += m * rs.weight_inner(&w, rw);
                    }
                    j += 1;
                }
            }
            let m = num * BigRational::from_integer(2.into()) / den;
            if !m.is_zero() {
                mult.insert(diff, m);
            }
        }
    }
    mult.into_iter()
        .map(|(k, v)| {
            assert!(v.is_integer() && !v.is_negative(), "Freudenthal recursion produced {v}");
            (k, v.to_integer().to_u64().unwrap())
        })
        .collect()
}

/// Non-negative integer vectors of length `l` summing to `h`, in lexicographic order.
pub fn compositions(h: i64, l: usize) -> Vec<Vec<i64>> {
    fn rec(h: i64, l: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() + 1 == l {
            cur.push(h);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=h {
            cur.push(x);
            rec(h - x, l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if l == 0 {
        return out;
    }
    rec(h, l, &mut Vec::new(), &mut out);
    out
}

/// Builds `L_λ(Z)` on all weight spaces with `ht_λ(μ) ≤ depth` (the whole
/// module when `depth` is `None`). The dimension cap applies to full builds.
pub fn irreducible_lattice(
    sc: Arc<StructureConstants>,
    lambda: &[i64],
    depth: Option<i64>,
    cap: usize,
) -> Result<HighestWeightLattice, HwError> {
    let rs = sc.rs.clone();
    if lambda.len() != rs.rank() || !RootSystem::is_dominant(lambda) {
        return Err(HwError::NotDominant(lambda.to_vec()));
    }
    let full_depth = rs.depth(lambda);
    let depth = depth.map_or(full_depth, |d| d.min(full_depth));
    if depth == full_depth {
        let weyl = weyl_dimension(&rs, lambda);
        if weyl > BigInt::from(cap) {
            return Err(HwError::DimensionCap { weyl: weyl.to_string(), cap });
        }
    }
    let l = rs.rank();
    let mut st = Straightener::new(sc.clone());
    let mut spaces: Vec<WeightSpace> = vec![WeightSpace {
        mu: lambda.to_vec(),
        diff: vec![0; l],
        ht: 0,
        verma: vec![vec![0; rs.num_positive()]],
        submodule: IntMat::zeros(1, 0),
        proj: IntMat::identity(1),
        section: IntMat::identity(1),
    }];
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    index.insert(vec![0; l], 0);
    let mut level: Vec<usize> = vec![0];
    let mut total_dim = 1usize;
    for h in 1..=depth {
        let mut cands: BTreeSet<Vec<i64>> = BTreeSet::new();
        for &s in &level {
            for j in 0..l {
                let mut d = spaces[s].diff.clone();
                d[j] += 1;
                if in_weight_set(&rs, lambda, &weight_below(&rs, lambda, &d)) {
                    cands.insert(d);
                }
            }
        }
        let mut next = Vec::new();
        for diff in cands {
            let verma = kostant_partitions(&rs, &diff);
            let mut cols: Vec<IntMat> = Vec::new();
            for j in 0..l {
                if diff[j] == 0 {
                    continue;
                }
                let mut up = diff.clone();
                up[j] -= 1;
                let (up_verma, up_sub) = match index.get(&up) {
                    Some(&u) => (spaces[u].verma.clone(), spaces[u].submodule.clone()),
                    None => {
                        let v = kostant_partitions(&rs, &up);
                        let n = v.len();
                        (v, IntMat::identity(n))
                    }
                };
                if up_sub.cols() == 0 {
                    continue;
                }
                let fj = Factor::Root(SRoot::minus(rs.simple_index(j)), 1);
                let a = verma_matrix(&mut st, lambda, fj, &up_verma, &verma)?;
                cols.push(a.mul(&up_sub));
            }
            let dv = verma.len();
            let span = cols.into_iter().fold(IntMat::zeros(dv, 0), |acc, c| acc.hstack(&c));
            let proj = integer_kernel(&span.transpose());
            let dl = proj.rows();
            assert!(dl > 0, "weight {diff:?} of the irreducible module has a trivial quotient");
            let submodule = integer_kernel(&proj).transpose();
            let (hm, u) = hermite_rows(&proj.transpose(), true);
            assert_eq!(hm.submatrix(0, dl, 0, dl), IntMat::identity(dl), "projection is not surjective");
            let section = u.transpose().submatrix(0, dv, 0, dl);
            total_dim += dl;
            let mu = weight_below(&rs, lambda, &diff);
            index.insert(diff.clone(), spaces.len());
            next.push(spaces.len());
            spaces.push(WeightSpace { mu, diff, ht: h, verma, submodule, proj, section });
        }
        if depth != full_depth && total_dim > cap {
            return Err(HwError::DimensionCap { weyl: format!(">{total_dim}"), cap });
        }
        level = next;
    }
    Ok(HighestWeightLattice {
        sc,
        lambda: lambda.to_vec(),
        depth,
        full_depth,
        spaces,
        index,
        straightener: Mutex::new(st),
    })
}

impl HighestWeightLattice {
    pub fn rs(&self) -> &RootSystem {
        &self.sc.rs
    }

    pub fn is_complete(&self) -> bool {
        self.depth == self.full_depth
    }

    pub fn dim(&self) -> usize {
        self.spaces.iter().map(|s| s.dim()).sum()
    }

    pub fn space_index(&self, diff: &[i64]) -> Option<usize> {
        self.index.get(diff).copied()
    }

    pub fn space_of_weight(&self, mu: &[i64]) -> Option<usize> {
        let diff = self.rs().difference_in_roots(&self.lambda, mu).ok()?;
        self.space_index(&diff)
    }

    /// Offset of each weight space in the concatenated basis.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.spaces.len());
        let mut acc = 0;
        for s in &self.spaces {
            out.push(acc);
            acc += s.dim();
        }
        out
    }

    /// Shift of `λ − μ` caused by a generator.
    fn diff_shift(&self, g: Factor) -> Vec<i64> {
        match g {
            Factor::Toral(..) => vec![0; self.rs().rank()],
            Factor::Root(r, n) => {
                let c = &self.rs().positive_roots[r.idx].coords;
                let sign = if r.pos { -1 } else { 1 };
                c.iter().map(|x| sign * x * n as i64).collect()
            }
        }
    }

    /// Integer blocks of `g` between built weight spaces. Components landing
    /// outside the built range are dropped.
    pub fn generator_action(&self, g: Factor) -> Result<Vec<ActionBlock>, HwError> {
        match g {
            Factor::Root(r, n) if r.pos && n > 1 => self.raising_power_action(r, n),
            _ => self.straightened_action(g),
        }
    }

    /// `ρ(x_β)ⁿ / n!` for a positive root, composed along the weight chain.
    /// Raising never leaves the built range, so no component is lost.
    fn raising_power_action(&self, root: SRoot, n: u32) -> Result<Vec<ActionBlock>, HwError> {
        let step: HashMap<usize, ActionBlock> =
            self.straightened_action(Factor::Root(root, 1))?.into_iter().map(|b| (b.source, b)).collect();
        let fact: BigInt = (1..=n).map(BigInt::from).product();
        let mut out = Vec::new();
        for si in 0..self.spaces.len() {
            let mut cur = si;
            let mut m = IntMat::identity(self.spaces[si].dim());
            let mut ok = true;
            for _ in 0..n {
                let Some(b) = step.get(&cur) else {
                    ok = false;
                    break;
                };
                m = b.matrix.mul(&m);
                cur = b.target;
            }
            if !ok {
                continue;
            }
            let mut q = IntMat::zeros(m.rows(), m.cols());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let (d, r) = m.get(i, j).div_rem(&fact);
                    if !r.is_zero() {
                        return Err(HwError::NonIntegral(vec![n]));
                    }
                    q.set(i, j, d);
                }
            }
            out.push(ActionBlock { source: si, target: cur, matrix: q });
        }
        Ok(out)
    }

    fn straightened_action(&self, g: Factor) -> Result<Vec<ActionBlock>, HwError> {
        let shift = self.diff_shift(g);
        let mut st = self.straightener.lock().unwrap();
        let mut out = Vec::new();
        for (si, sp) in self.spaces.iter().enumerate() {
            let td: Vec<i64> = sp.diff.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let Some(ti) = self.space_index(&td) else { continue };
            let tgt = &self.spaces[ti];
            let a = verma_matrix(&mut st, &self.lambda, g, &sp.verma, &tgt.verma)?;
            assert!(tgt.proj.mul(&a).mul(&sp.submodule).is_zero(), "submodule not preserved");
            let m = tgt.proj.mul(&a).mul(&sp.section);
            out.push(ActionBlock { source: si, target: ti, matrix: m });
        }
        Ok(out)
    }

    pub fn dense_action(&self, g: Factor) -> Result<IntMat, HwError> {
        let offs = self.offsets();
        let n = self.dim();
        let mut m = IntMat::zeros(n, n);
        for b in self.generator_action(g)? {
            m.paste(offs[b.target], offs[b.source], &b.matrix);
        }
        Ok(m)
    }

    /// `x_β(t) = Σ_n tⁿ ρ(x_β^{(n)})` on the built weight spaces.
    pub fn chevalley_generator_matrix(&self, root: SRoot, t: &BigRational) -> Result<RatMat, HwError> {
        let n = self.dim();
        let mut out = rat_identity(n);
        let mut tn = BigRational::one();
        for k in 1..=(self.depth as u32 + 1) {
            tn *= t;
            let m = self.dense_action(Factor::Root(root, k))?;
            if m.is_zero() {
                break;
            }
            for i in 0..n {
                for j in 0..n {
                    let v = m.get(i, j);
                    if !v.is_zero() {
                        out[i][j] += &tn * BigRational::from_integer(v.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[e_i, f_i] = h_i` and `[h_i, e_j] = ⟨α_j, α_i^∨⟩ e_j` on every weight
    /// space whose neighbours were all built.
    pub fn serre_check(&self) -> Result<bool, HwError> {
        let rs = self.rs().clone();
        let l = rs.rank();
        let n = self.dim();
        let offs = self.offsets();
        let inner: Vec<usize> =
            (0..self.spaces.len()).filter(|&s| self.is_complete() || self.spaces[s].ht < self.depth).collect();
        let restrict = |m: &IntMat| -> Vec<IntMat> {
            inner.iter().map(|&s| m.submatrix(0, n, offs[s], offs[s] + self.spaces[s].dim())).collect()
        };
        let mut e = Vec::new();
        let mut f = Vec::new();
        let mut h = Vec::new();
        for i in 0..l {
            let si = rs.simple_index(i);
            e.push(self.dense_action(Factor::Root(SRoot::plus(si), 1))?);
            f.push(self.dense_action(Factor::Root(SRoot::minus(si), 1))?);
            h.push(self.dense_action(Factor::Toral(i, 1))?);
        }
        for i in 0..l {
            for j in 0..l {
                let ef = e[i].mul(&f[j]).sub(&f[j].mul(&e[i]));
                let want = if i == j { h[i].clone() } else { IntMat::zeros(n, n) };
                if restrict(&ef) != restrict(&want) {
                    return Ok(false);
                }
                let he = h[i].mul(&e[j]).sub(&e[j].mul(&h[i]));
                let c = BigInt::from(rs.cartan()[j][i]);
                if restrict(&he) != restrict(&e[j].scale(&c)) {
                    return Ok(false);
                }
            }
        }
        // h acts on each weight space by the scalar μ(h_i)
        for (s, sp) in self.spaces.iter().enumerate() {
            for (i, hm) in h.iter().enumerate() {
                let blk = hm.submatrix(offs[s], offs[s] + sp.dim(), offs[s], offs[s] + sp.dim());
                if blk != IntMat::identity(sp.dim()).scale(&BigInt::from(sp.mu[i])) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Rank identity `dim V = dim U + dim L` for every built weight space.
    pub fn exactness_check(&self) -> bool {
        self.spaces.iter().all(|s| {
            s.verma.len() == s.submodule.cols() + s.dim() && s.proj.mul(&s.section) == IntMat::identity(s.dim())
        })
    }
}

pub fn maximal_submodule(
    sc: Arc<StructureConstants>,
    lambda: &[i64],
    mu: &[i64],
) -> Result<MaximalSubmoduleLattice, HwError> {
    let rs = sc.rs.clone();
    let diff = rs.difference_in_roots(lambda, mu)?;
    let ht: i64 = diff.iter().sum();
    let lat = irreducible_lattice(sc, lambda, Some(ht), usize::MAX)?;
    let basis = match lat.space_index(&diff) {
        Some(s) => lat.spaces[s].submodule.clone(),
        None => IntMat::identity(kostant_partitions(&rs, &diff).len()),
    };
    Ok(MaximalSubmoduleLattice { lambda: lambda.to_vec(), mu: mu.to_vec(), basis })
}

/// Index of the sublattice of the weight lattice generated by the weights of
/// `L_{λ₀}`.
pub fn weight_lattice_index(sc: Arc<StructureConstants>, lambda0: &[i64]) -> Result<BigInt, HwError> {
    let rs = sc.rs.clone();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for diff in freudenthal_multiplicities(&rs, lambda0).keys() {
        rows.push(weight_below(&rs, lambda0, diff));
    }
    let m = IntMat::from_i64(&rows);
    let basis = crate::linalg::row_lattice_basis(&m);
    if basis.rows() < rs.rank() {
        return Ok(BigInt::zero());
    }
    Ok(basis.det().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_det;
    use crate::pbw::build_structure_constants;
    use crate::rootsys::{build_root_system, CartanDatum};
    use proptest::prelude::*;

    fn sc(label: &str) -> Arc<StructureConstants> {
        Arc::new(build_structure_constants(&build_root_system(&CartanDatum::parse(label).unwrap()).unwrap()).unwrap())
    }

    fn lattice(label: &str, lambda: &[i64]) -> HighestWeightLattice {
        irreducible_lattice(sc(label), lambda, None, DEFAULT_DIMENSION_CAP).unwrap()
    }

    #[test]
    fn composed_raising_powers_match_straightening() {
        for (label, lambda, depth) in
            [("A2", vec![2, 2], None), ("B2", vec![2, 1], None), ("G2", vec![1, 0], None), ("B2", vec![3, 3], Some(3))]
        {
            let l = irreducible_lattice(sc(label), &lambda, depth, DEFAULT_DIMENSION_CAP).unwrap();
            for idx in 0..l.sc.num_positive() {
                for n in 2..=4 {
                    let dense = |blocks: Vec<ActionBlock>| {
                        let mut m: BTreeMap<(usize, usize), IntMat> = BTreeMap::new();
                        for b in blocks.into_iter().filter(|b| !b.matrix.is_zero()) {
                            m.insert((b.source, b.target), b.matrix);
                        }
                        m
                    };
                    let g = Factor::Root(SRoot::plus(idx), n);
                    assert_eq!(
                        dense(l.generator_action(g).unwrap()),
                        dense(l.straightened_action(g).unwrap()),
                        "{label} {lambda:?} root {idx} n {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn verma_bases() {
        let s = sc("A2");
        let b = verma_weight_basis(&s.rs, &[2, 2], &[2, 2]).unwrap();
        assert_eq!(b.monomials.len(), 1);
        let b = verma_weight_basis(&s.rs, &[2, 2], &[1, 1]).unwrap();
        assert_eq!(b.monomials.len(), 2);
        let a1 = sc("A1");
        assert_eq!(verma_weight_basis(&a1.rs, &[4], &[2]).unwrap().monomials, vec![vec![1]]);
        assert!(verma_weight_basis(&a1.rs, &[4], &[6]).is_err());
    }

    #[test]
    fn a2_dimensions() {
        let l = lattice("A2", &[1, 0]);
        assert_eq!(l.dim(), 3);
        let l = lattice("A2", &[1, 1]);
        assert_eq!(l.dim(), 8);
        let zero = l.space_of_weight(&[0, 0]).unwrap();
        assert_eq!(l.spaces[zero].dim(), 2);
    }

    #[test]
    fn sl2_weight_spaces() {
        for k in 0..7 {
            let l = lattice("A1", &[k]);
            assert_eq!(l.spaces.len(), k as usize + 1);
            assert!(l.spaces.iter().all(|s| s.dim() == 1));
        }
    }

    #[test]
    fn dimensions_match_oracles() {
        for (label, lambda) in [
            ("A2", vec![2, 1]),
            ("A2", vec![0, 3]),
            ("B2", vec![1, 1]),
            ("B2", vec![2, 0]),
            ("C2", vec![1, 1]),
            ("G2", vec![1, 0]),
            ("G2", vec![0, 1]),
            ("A3", vec![1, 0, 1]),
        ] {
            let l = lattice(label, &lambda);
            let fr = freudenthal_multiplicities(&l.sc.rs, &lambda);
            assert_eq!(BigInt::from(l.dim()), weyl_dimension(&l.sc.rs, &lambda), "{label} {lambda:?}");
            let got: BTreeMap<Vec<i64>, u64> = l.spaces.iter().map(|s| (s.diff.clone(), s.dim() as u64)).collect();
            assert_eq!(got, fr, "{label} {lambda:?}");
            assert!(l.exactness_check());
            assert!(l.serre_check().unwrap(), "{label} {lambda:?}");
        }
    }

    #[test]
    fn weyl_dimension_examples() {
        let a2 = sc("A2");
        assert_eq!(weyl_dimension(&a2.rs, &[1, 1]), BigInt::from(8));
        assert_eq!(weyl_dimension(&a2.rs, &[3, 3]), BigInt::from(64));
        let g2 = sc("G2");
        assert_eq!(weyl_dimension(&g2.rs, &[1, 0]), BigInt::from(7));
        assert_eq!(weyl_dimension(&g2.rs, &[0, 1]), BigInt::from(14));
    }

    #[test]
    fn sl2_divided_action() {
        let k = 6;
        let l = lattice("A1", &[k]);
        let e = l.generator_action(Factor::Root(SRoot::plus(0), 1)).unwrap();
        for b in &e {
            // source f^(j) v, target f^(j−1) v
            let j = l.spaces[b.source].ht;
            assert_eq!(b.matrix, IntMat::from_i64(&[vec![k - j + 1]]));
        }
        let f = l.generator_action(Factor::Root(SRoot::minus(0), 1)).unwrap();
        assert_eq!(f[0].matrix, IntMat::from_i64(&[vec![1]]));
        let h = l.generator_action(Factor::Toral(0, 1)).unwrap();
        for b in &h {
            assert_eq!(b.matrix, IntMat::from_i64(&[vec![l.spaces[b.source].mu[0]]]));
        }
    }

    #[test]
    fn chevalley_matrices_standard() {
        let t = BigRational::from_integer(BigInt::from(7));
        let l = lattice("A1", &[1]);
        let x = l.chevalley_generator_matrix(SRoot::plus(0), &t).unwrap();
        assert_eq!(x, crate::linalg::rat_from_int(&IntMat::from_i64(&[vec![1, 7], vec![0, 1]])));
        let l = lattice("A2", &[1, 0]);
        let x = l.chevalley_generator_matrix(SRoot::plus(0), &t).unwrap();
        let want = IntMat::from_i64(&[vec![1, 7, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(x, crate::linalg::rat_from_int(&want));
        let l = lattice("B2", &[1, 1]);
        for k in 0..4 {
            for r in [SRoot::plus(k), SRoot::minus(k)] {
                let x = l.chevalley_generator_matrix(r, &BigRational::new(3.into(), 5.into())).unwrap();
                assert!(rat_det(&x).is_one());
            }
        }
        let zero = l.chevalley_generator_matrix(SRoot::plus(3), &BigRational::zero()).unwrap();
        assert_eq!(zero, rat_identity(l.dim()));
    }

    #[test]
    fn lattice_indices() {
        assert_eq!(weight_lattice_index(sc("A1"), &[1]).unwrap(), BigInt::from(1));
        assert_eq!(weight_lattice_index(sc("A1"), &[2]).unwrap(), BigInt::from(2));
        assert_eq!(weight_lattice_index(sc("A2"), &[1, 0]).unwrap(), BigInt::from(1));
        assert_eq!(weight_lattice_index(sc("A2"), &[1, 1]).unwrap(), BigInt::from(3));
    }

    #[test]
    fn submodule_examples() {
        // f^(k+1) v spans the submodule just below the bottom weight
        let m = maximal_submodule(sc("A1"), &[3], &[-5]).unwrap();
        assert_eq!(m.basis, IntMat::identity(1));
        let m = maximal_submodule(sc("A2"), &[1, 1], &[0, 0]).unwrap();
        assert_eq!(m.basis.cols(), 0);
        let m = maximal_submodule(sc("A2"), &[1, 0], &[-3, 2]).unwrap();
        assert!(m.basis.cols() > 0);
        assert_eq!(crate::linalg::smith_diagonal(&m.basis).iter().filter(|x| !x.is_zero()).count(), m.basis.cols());
        assert!(crate::linalg::smith_diagonal(&m.basis).iter().all(|x| x.is_zero() || x.is_one()));
    }

    /// Radical of the contravariant form on a Verma weight space, computed by
    /// pairing `X₋ᵃ v` against raising words.
    fn shapovalov_rank(s: &Arc<StructureConstants>, lambda: &[i64], verma: &[Vec<u32>]) -> (usize, IntMat) {
        let mut st = Straightener::new(s.clone());
        let n = verma.len();
        let mut g = IntMat::zeros(n, n);
        for (i, a) in verma.iter().enumerate() {
            let word: Vec<Factor> = a
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &e)| e > 0)
                .map(|(k, &e)| Factor::Root(SRoot::plus(k), e))
                .collect();
            for (j, b) in verma.iter().enumerate() {
                let u = st.straighten_onto(&word, b);
                let mut v = BigRational::zero();
                for (m, c) in &u.terms {
                    if m.a.iter().all(|&x| x == 0) && m.c.iter().all(|&x| x == 0) {
                        v += c * BigRational::from_integer(eval_toral(&m.b, lambda));
                    }
                }
                assert!(v.is_integer());
                g.set(i, j, v.to_integer());
            }
        }
        (g.rank(), g)
    }

    #[test]
    fn submodule_is_form_radical() {
        for (label, lambda) in [("A2", vec![1, 1]), ("A2", vec![2, 0]), ("B2", vec![1, 1]), ("G2", vec![1, 0])] {
            let s = sc(label);
            let l = irreducible_lattice(s.clone(), &lambda, None, DEFAULT_DIMENSION_CAP).unwrap();
            for sp in &l.spaces {
                let (rank, g) = shapovalov_rank(&s, &lambda, &sp.verma);
                assert_eq!(rank, sp.dim(), "{label} {lambda:?} {:?}", sp.diff);
                assert!(g.mul(&sp.submodule).is_zero());
            }
        }
    }

    #[test]
    fn depth_limited_build() {
        let l = irreducible_lattice(sc("A2"), &[128, 3], Some(2), DEFAULT_DIMENSION_CAP).unwrap();
        let dims: Vec<usize> = l.spaces.iter().map(|s| s.dim()).collect();
        assert_eq!(dims, vec![1, 1, 1, 1, 2, 1]);
        assert!(!l.is_complete());
        assert!(l.serre_check().unwrap());
    }

    #[test]
    fn dimension_cap() {
        let err = irreducible_lattice(sc("A2"), &[20, 20], None, 3000).unwrap_err();
        assert!(matches!(err, HwError::DimensionCap { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn divided_actions_integral(l1 in 0i64..4, l2 in 0i64..4, k in 0usize..4, n in 1u32..4) {
            let l = lattice("B2", &[l1, l2]);
            for r in [SRoot::plus(k), SRoot::minus(k)] {
                prop_assert!(l.generator_action(Factor::Root(r, n)).is_ok());
            }
        }
    }
}
