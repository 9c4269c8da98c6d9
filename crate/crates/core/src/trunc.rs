//! Truncations `L^[r]_λ(Z) = L_λ(Z)/L_λ(Z,r)` as finite abelian p-groups.
//!
//! Only weight spaces with `ht_λ(μ) < r` survive; the space at height `j`
//! contributes `(Z/p^{r−j})^{dim}`. Maps are integer matrices whose rows are
//! reduced modulo the exponent of the target slot.

use crate::hwmod::{ActionBlock, HighestWeightLattice};
use crate::linalg::{congruence_exponent, mod_inverse, pow_big, rational_mod, vp_rational, IntMat};
use crate::pbw::{Factor, SRoot};
use crate::rootsys::{weight_congruent, Weight};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TruncError {
    #[error("lattice built to depth {built}, truncation needs {needed}")]
    Depth { built: i64, needed: i64 },
    #[error("{generator} does not preserve the truncating submodule")]
    Divisibility { generator: String },
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("slot shapes differ between the two truncations")]
    ShapeMismatch,
    #[error("letter {0} violates the valuation constraint")]
    Valuation(String),
    #[error("map is not well defined on the quotient at {0:?}")]
    NotWellDefined(Vec<i64>),
    #[error(transparent)]
    Module(#[from] crate::hwmod::HwError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationSpec {
    pub p: u64,
    pub r: u32,
}

impl TruncationSpec {
    pub fn new(p: u64, r: u32) -> Self {
        TruncationSpec { p, r }
    }

    pub fn congruence_exponent(&self) -> u32 {
        congruence_exponent(self.p, self.r)
    }

    pub fn modulus(&self) -> BigInt {
        pow_big(self.p, self.r)
    }
}

/// Scale exponents `(μ, max(r − ht, 0))` of the truncating submodule over the
/// built weight spaces.
pub fn truncating_submodule(l: &HighestWeightLattice, spec: TruncationSpec) -> Vec<(Weight, u32)> {
    l.spaces.iter().map(|s| (s.mu.clone(), (spec.r as i64 - s.ht).max(0) as u32)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub space: usize,
    pub mu: Weight,
    pub diff: Vec<i64>,
    pub ht: i64,
    pub rank: usize,
    pub exponent: u32,
}

/// Integer matrix of a map between truncations, row `i` reduced mod `p^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    pub p: u64,
    pub row_exps: Vec<u32>,
    pub m: IntMat,
}

impl ModMatrix {
    pub fn new(p: u64, row_exps: Vec<u32>, m: IntMat) -> Self {
        let mut out = ModMatrix { p, row_exps, m };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        for i in 0..self.m.rows() {
            let md = pow_big(self.p, self.row_exps[i]);
            for j in 0..self.m.cols() {
                let v = self.m.get(i, j).mod_floor(&md);
                self.m.set(i, j, v);
            }
        }
    }

    pub fn identity(p: u64, exps: &[u32]) -> Self {
        ModMatrix::new(p, exps.to_vec(), IntMat::identity(exps.len()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ModMatrix) -> ModMatrix {
        ModMatrix::new(self.p, self.row_exps.clone(), self.m.mul(&other.m))
    }

    pub fn add(&self, other: &ModMatrix) -> ModMatrix {
        ModMatrix::new(self.p, self.row_exps.clone(), self.m.add(&other.m))
    }

    pub fn scale(&self, c: &BigInt) -> ModMatrix {
        ModMatrix::new(self.p, self.row_exps.clone(), self.m.scale(c))
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }
}

/// Generator of the Iwahori-type algebra: `x_{−β}^{(n)}` or `p^{n·ht β} x_β^{(n)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SGenerator {
    pub root: usize,
    pub raising: bool,
    pub n: u32,
}

impl SGenerator {
    pub fn factor(&self) -> Factor {
        let r = if self.raising { SRoot::plus(self.root) } else { SRoot::minus(self.root) };
        Factor::Root(r, self.n)
    }

    pub fn scale_exp(&self, l: &HighestWeightLattice) -> u32 {
        if self.raising {
            self.n * l.rs().heights[self.root] as u32
        } else {
            0
        }
    }

    pub fn label(&self, l: &HighestWeightLattice) -> String {
        let c: Vec<String> = l.rs().positive_roots[self.root].coords.iter().map(|x| x.to_string()).collect();
        let body = format!("{}[{}]^({})", if self.raising { "e" } else { "f" }, c.join(","), self.n);
        let s = self.scale_exp(l);
        if self.raising && s > 0 {
            format!("p^{s}*{body}")
        } else {
            body
        }
    }
}

/// All generators with `1 ≤ n ≤ n_max`, lowering before raising, roots in order.
pub fn s_generators(num_positive: usize, n_max: u32) -> Vec<SGenerator> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for raising in [false, true] {
            for root in 0..num_positive {
                out.push(SGenerator { root, raising, n });
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct TruncatedModule {
    pub lattice: Arc<HighestWeightLattice>,
    pub spec: TruncationSpec,
    /// Weight spaces with `ht ≤ r`, including the height-`r` ones of exponent zero.
    pub slots: Vec<Slot>,
    /// Exponent of each basis coordinate (slots with positive exponent only).
    pub basis_exps: Vec<u32>,
    slot_offset: Vec<Option<usize>>,
}

pub fn build_truncation(
    lattice: Arc<HighestWeightLattice>,
    spec: TruncationSpec,
) -> Result<TruncatedModule, TruncError> {
    if !lattice.is_complete() && lattice.depth < spec.r as i64 {
        return Err(TruncError::Depth { built: lattice.depth, needed: spec.r as i64 });
    }
    let mut slots = Vec::new();
    let mut basis_exps = Vec::new();
    let mut slot_offset = vec![None; lattice.spaces.len()];
    for (i, s) in lattice.spaces.iter().enumerate() {
        if s.ht > spec.r as i64 {
            continue;
        }
        let exponent = (spec.r as i64 - s.ht) as u32;
        if exponent > 0 {
            slot_offset[i] = Some(basis_exps.len());
            basis_exps.extend(std::iter::repeat_n(exponent, s.dim()));
        }
        slots.push(Slot { space: i, mu: s.mu.clone(), diff: s.diff.clone(), ht: s.ht, rank: s.dim(), exponent });
    }
    Ok(TruncatedModule { lattice, spec, slots, basis_exps, slot_offset })
}

impl TruncatedModule {
    /// `log_p #L^[r]`.
    pub fn cardinality_exponent(&self) -> u64 {
        self.slots.iter().map(|s| s.rank as u64 * s.exponent as u64).sum()
    }

    pub fn dim(&self) -> usize {
        self.basis_exps.len()
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn identity(&self) -> ModMatrix {
        ModMatrix::identity(self.spec.p, &self.basis_exps)
    }

    pub fn slot_offset(&self, space: usize) -> Option<usize> {
        self.slot_offset.get(space).copied().flatten()
    }

    fn scaled_exp(&self, ht: i64) -> u32 {
        (self.spec.r as i64 - ht).max(0) as u32
    }

    /// Checks that `p^scale · g` maps `L_λ(Z,r)` into itself on every built
    /// pair of weight spaces, column by column.
    pub fn preserves_submodule(&self, blocks: &[ActionBlock], scale: u32) -> bool {
        let p = self.spec.p;
        for b in blocks {
            let a = self.scaled_exp(self.lattice.spaces[b.source].ht);
            let t = self.scaled_exp(self.lattice.spaces[b.target].ht);
            // p^{scale + a} A must be divisible by p^t
            if scale + a >= t {
                continue;
            }
            let need = pow_big(p, t - scale - a);
            for i in 0..b.matrix.rows() {
                for j in 0..b.matrix.cols() {
                    if !(b.matrix.get(i, j) % &need).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Induced map of `p^scale · g` on the truncation.
    pub fn induced(&self, blocks: &[ActionBlock], scale: u32) -> ModMatrix {
        let n = self.dim();
        let mut m = IntMat::zeros(n, n);
        let c = pow_big(self.spec.p, scale);
        for b in blocks {
            let (Some(so), Some(to)) = (self.slot_offset(b.source), self.slot_offset(b.target)) else { continue };
            m.paste(to, so, &b.matrix.scale(&c));
        }
        ModMatrix::new(self.spec.p, self.basis_exps.clone(), m)
    }

    pub fn s_generator_action(&self, g: SGenerator) -> Result<ModMatrix, TruncError> {
        let blocks = self.lattice.generator_action(g.factor())?;
        let scale = g.scale_exp(&self.lattice);
        if !self.preserves_submodule(&blocks, scale) {
            return Err(TruncError::Divisibility { generator: g.label(&self.lattice) });
        }
        Ok(self.induced(&blocks, scale))
    }

    /// Action of a product of elements of the level subgroup, letters applied
    /// left to right as matrices (the leftmost letter is the outermost factor).
    pub fn kstar_element_action(&self, word: &[KLetter]) -> Result<ModMatrix, TruncError> {
        let mut acc = self.identity();
        for letter in word {
            acc = acc.compose(&self.letter_action(letter)?);
        }
        Ok(acc)
    }

    fn letter_action(&self, letter: &KLetter) -> Result<ModMatrix, TruncError> {
        let p = self.spec.p;
        let modulus = self.spec.modulus();
        match letter {
            KLetter::Root { root, t } => {
                let ht = self.lattice.rs().heights[root.idx];
                let need = if root.pos { ht } else { 0 };
                let v = vp_rational(t, p);
                if let Some(v) = v {
                    if v < need {
                        return Err(TruncError::Valuation(format!("{root:?} t={t}")));
                    }
                }
                let mut out = self.identity();
                if t.is_zero() {
                    return Ok(out);
                }
                // positive letters factor as u^n · p^{n ht} x^{(n)} with u = t / p^{ht}
                let u = if root.pos { t / BigRational::from_integer(pow_big(p, ht as u32)) } else { t.clone() };
                let u_mod = rational_mod(&u, &modulus).expect("p-integral parameter");
                let mut un = BigInt::one();
                let mut n = 1u32;
                while (n as i64) * ht < self.spec.r as i64 {
                    un = (&un * &u_mod).mod_floor(&modulus);
                    let g = SGenerator { root: root.idx, raising: root.pos, n };
                    let term = self.s_generator_action(g)?;
                    out = out.add(&term.scale(&un));
                    n += 1;
                }
                Ok(out)
            }
            KLetter::Torus(units) => {
                let n = self.dim();
                let mut m = IntMat::zeros(n, n);
                for s in &self.slots {
                    let Some(off) = self.slot_offset(s.space) else { continue };
                    let mut val = BigInt::one();
                    for (u, &e) in units.iter().zip(&s.mu) {
                        if vp_rational(u, p) != Some(0) {
                            return Err(TruncError::Valuation(format!("torus entry {u}")));
                        }
                        let um = rational_mod(u, &modulus).unwrap();
                        let base = if e < 0 { mod_inverse(&um, &modulus).unwrap() } else { um };
                        val = (val * base.modpow(&BigInt::from(e.unsigned_abs()), &modulus)).mod_floor(&modulus);
                    }
                    for k in 0..s.rank {
                        m.set(off + k, off + k, val.clone());
                    }
                }
                Ok(ModMatrix::new(p, self.basis_exps.clone(), m))
            }
        }
    }
}

/// Letter of a word in the level subgroup: a root element `x_β(t)` with
/// `v_p(t) ≥ ht β` for positive `β` (`≥ 0` for negative), or a torus element
/// `Π h_i(u_i)` with unit entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KLetter {
    Root { root: SRoot, t: BigRational },
    Torus(Vec<BigRational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub equal_off_moved: bool,
    pub large_on_moved: bool,
    pub congruent: bool,
    pub congruence_exponent: u32,
}

impl HypothesisReport {
    pub fn all(&self) -> bool {
        self.equal_off_moved && self.large_on_moved && self.congruent
    }
}

pub fn check_hypotheses(lambda: &[i64], lambda2: &[i64], spec: TruncationSpec, moved: &[usize]) -> HypothesisReport {
    let r = spec.r as i64;
    let equal_off_moved = (0..lambda.len()).all(|i| moved.contains(&i) || lambda[i] == lambda2[i]);
    let large_on_moved = moved.iter().all(|&i| lambda[i] > r && lambda2[i] > r);
    let m = spec.congruence_exponent();
    HypothesisReport {
        equal_off_moved,
        large_on_moved,
        congruent: weight_congruent(lambda, lambda2, spec.p, m),
        congruence_exponent: m,
    }
}

/// The correspondence `X₋ᵃ v̄_λ ↦ X₋ᵃ v̄_{λ′}` between two truncations.
#[derive(Clone, Debug)]
pub struct PhiMap {
    pub hypotheses: HypothesisReport,
    pub shape_match: bool,
    /// Rows use the exponents of the target truncation.
    pub matrix: ModMatrix,
    /// Every weight block is invertible mod p.
    pub bijective: bool,
}

/// Builds the map after checking the three hypotheses; the first failed one
/// is named in the error.
pub fn phi_isomorphism(src: &TruncatedModule, dst: &TruncatedModule, moved: &[usize]) -> Result<PhiMap, TruncError> {
    let h = check_hypotheses(&src.lattice.lambda, &dst.lattice.lambda, src.spec, moved);
    if !h.equal_off_moved {
        return Err(TruncError::Hypothesis("weights differ outside the moved simple roots".into()));
    }
    if !h.large_on_moved {
        return Err(TruncError::Hypothesis(format!("moved coordinates must exceed r = {}", src.spec.r)));
    }
    if !h.congruent {
        return Err(TruncError::Hypothesis(format!(
            "weights are not congruent mod {}^{}",
            src.spec.p, h.congruence_exponent
        )));
    }
    let phi = phi_unchecked(src, dst, moved)?;
    if !phi.shape_match {
        return Err(TruncError::ShapeMismatch);
    }
    Ok(phi)
}

/// Same construction without the hypothesis gate, for controls. Fails only
/// when the slot shapes differ or the map does not descend to the quotient.
pub fn phi_unchecked(src: &TruncatedModule, dst: &TruncatedModule, moved: &[usize]) -> Result<PhiMap, TruncError> {
    let hypotheses = check_hypotheses(&src.lattice.lambda, &dst.lattice.lambda, src.spec, moved);
    let p = src.spec.p;
    let shape_match = src.spec == dst.spec
        && src.slots.len() == dst.slots.len()
        && src
            .slots
            .iter()
            .zip(&dst.slots)
            .all(|(a, b)| a.diff == b.diff && a.rank == b.rank && a.exponent == b.exponent);
    if !shape_match {
        return Ok(PhiMap {
            hypotheses,
            shape_match,
            matrix: ModMatrix::new(p, dst.basis_exps.clone(), IntMat::zeros(dst.dim(), src.dim())),
            bijective: false,
        });
    }
    let mut m = IntMat::zeros(dst.dim(), src.dim());
    let mut bijective = true;
    for (a, b) in src.slots.iter().zip(&dst.slots) {
        let (Some(so), Some(to)) = (src.slot_offset(a.space), dst.slot_offset(b.space)) else { continue };
        let ss = &src.lattice.spaces[a.space];
        let ds = &dst.lattice.spaces[b.space];
        let md = pow_big(p, a.exponent);
        // the source submodule must land in p^e times the target lattice plus its submodule
        let leak = ds.proj.mul(&ss.submodule);
        for i in 0..leak.rows() {
            for j in 0..leak.cols() {
                if !(leak.get(i, j) % &md).is_zero() {
                    return Err(TruncError::NotWellDefined(a.diff.clone()));
                }
            }
        }
        let blk = ds.proj.mul(&ss.section);
        let det = blk.det();
        if (det % BigInt::from(p)).is_zero() {
            bijective = false;
        }
        m.paste(to, so, &blk);
    }
    Ok(PhiMap { hypotheses, shape_match, matrix: ModMatrix::new(p, dst.basis_exps.clone(), m), bijective })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivarianceEntry {
    pub generator: String,
    pub pass: bool,
}

/// Compares `Φ ∘ g` and `g ∘ Φ` for every generator with `n ≤ r`.
pub fn local_constancy_check(
    phi: &PhiMap,
    src: &TruncatedModule,
    dst: &TruncatedModule,
) -> Result<Vec<EquivarianceEntry>, TruncError> {
    let mut out = Vec::new();
    if !phi.shape_match {
        return Err(TruncError::ShapeMismatch);
    }
    for g in s_generators(src.lattice.rs().num_positive(), src.spec.r) {
        let gs = src.s_generator_action(g)?;
        let gd = dst.s_generator_action(g)?;
        let lhs = phi.matrix.compose(&gs);
        let rhs = gd.compose(&phi.matrix);
        out.push(EquivarianceEntry { generator: g.label(&src.lattice), pass: lhs == rhs });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hwmod::{irreducible_lattice, DEFAULT_DIMENSION_CAP};
    use crate::pbw::{build_structure_constants, StructureConstants};
    use crate::rootsys::{build_root_system, CartanDatum};

    fn sc(label: &str) -> Arc<StructureConstants> {
        Arc::new(build_structure_constants(&build_root_system(&CartanDatum::parse(label).unwrap()).unwrap()).unwrap())
    }

    fn trunc(label: &str, lambda: &[i64], p: u64, r: u32, depth: Option<i64>) -> TruncatedModule {
        let l = irreducible_lattice(sc(label), lambda, depth, DEFAULT_DIMENSION_CAP).unwrap();
        build_truncation(Arc::new(l), TruncationSpec::new(p, r)).unwrap()
    }

    #[test]
    fn cardinalities() {
        assert_eq!(trunc("A1", &[10], 5, 2, Some(2)).cardinality_exponent(), 3);
        let t = trunc("A2", &[3, 3], 5, 2, None);
        assert_eq!(t.cardinality_exponent(), 4);
        assert_eq!(t.slots.len(), 6);
        assert_eq!(trunc("A2", &[3, 3], 5, 0, None).cardinality_exponent(), 0);
        assert_eq!(trunc("A2", &[128, 3], 5, 2, Some(2)).cardinality_exponent(), 4);
    }

    #[test]
    fn submodule_scales() {
        let l = irreducible_lattice(sc("A1"), &[4], None, 100).unwrap();
        let s: Vec<u32> = truncating_submodule(&l, TruncationSpec::new(5, 2)).into_iter().map(|x| x.1).collect();
        assert_eq!(s, vec![2, 1, 0, 0, 0]);
        let s: Vec<u32> = truncating_submodule(&l, TruncationSpec::new(5, 0)).into_iter().map(|x| x.1).collect();
        assert!(s.iter().all(|&x| x == 0));
    }

    #[test]
    fn sl2_generator_entries() {
        let t = trunc("A1", &[10], 5, 2, None);
        let f = t.s_generator_action(SGenerator { root: 0, raising: false, n: 1 }).unwrap();
        assert_eq!(f.m, IntMat::from_i64(&[vec![0, 0], vec![1, 0]]));
        let e = t.s_generator_action(SGenerator { root: 0, raising: true, n: 1 }).unwrap();
        // 5·e on f v = 5·10 ≡ 0 mod 25
        assert_eq!(e.m, IntMat::from_i64(&[vec![0, 50 % 25], vec![0, 0]]));
        let t = trunc("A1", &[11], 5, 2, None);
        let e = t.s_generator_action(SGenerator { root: 0, raising: true, n: 1 }).unwrap();
        assert_eq!(e.m, IntMat::from_i64(&[vec![0, 5], vec![0, 0]]));
        let e2 = t.s_generator_action(SGenerator { root: 0, raising: true, n: 2 }).unwrap();
        assert!(e2.is_zero());
    }

    #[test]
    fn generator_divisibility_exhaustive_small() {
        for (label, lambda) in [("A1", vec![4]), ("A2", vec![2, 1]), ("B2", vec![1, 2])] {
            for p in [2, 3, 5] {
                for r in [1, 2] {
                    let t = trunc(label, &lambda, p, r, None);
                    for g in s_generators(t.lattice.rs().num_positive(), r + 2) {
                        assert!(t.s_generator_action(g).is_ok(), "{label} {lambda:?} p={p} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn unscaled_raising_fails_divisibility() {
        let t = trunc("A1", &[4], 5, 2, None);
        let blocks = t.lattice.generator_action(Factor::Root(SRoot::plus(0), 1)).unwrap();
        assert!(!t.preserves_submodule(&blocks, 0));
        assert!(t.preserves_submodule(&blocks, 1));
    }

    #[test]
    fn constancy_positive_cases() {
        let a = trunc("A1", &[10], 5, 2, Some(2));
        let b = trunc("A1", &[135], 5, 2, Some(2));
        let phi = phi_isomorphism(&a, &b, &[0]).unwrap();
        assert!(phi.bijective);
        assert!(local_constancy_check(&phi, &a, &b).unwrap().iter().all(|e| e.pass));
        let a = trunc("A1", &[4], 2, 1, Some(1));
        let b = trunc("A1", &[8], 2, 1, Some(1));
        assert!(phi_isomorphism(&a, &b, &[0]).is_ok());
        let a = trunc("A2", &[3, 3], 5, 2, Some(2));
        let b = trunc("A2", &[128, 3], 5, 2, Some(2));
        let phi = phi_isomorphism(&a, &b, &[0]).unwrap();
        assert!(local_constancy_check(&phi, &a, &b).unwrap().iter().all(|e| e.pass));
        let same = phi_isomorphism(&a, &a, &[0]).unwrap();
        assert_eq!(same.matrix, a.identity());
    }

    #[test]
    fn hypothesis_rejections() {
        let a = trunc("A2", &[3, 3], 5, 2, Some(2));
        let b = trunc("A2", &[28, 3], 5, 2, Some(2));
        assert!(matches!(phi_isomorphism(&a, &b, &[0]), Err(TruncError::Hypothesis(_))));
        let c = trunc("A2", &[128, 4], 5, 2, Some(2));
        assert!(matches!(phi_isomorphism(&a, &c, &[0]), Err(TruncError::Hypothesis(_))));
    }

    #[test]
    fn neighbour_weight_breaks_equivariance() {
        let a = trunc("A1", &[10], 5, 2, Some(2));
        let b = trunc("A1", &[11], 5, 2, Some(2));
        let phi = phi_unchecked(&a, &b, &[0]).unwrap();
        assert!(local_constancy_check(&phi, &a, &b).unwrap().iter().any(|e| !e.pass));
    }

    #[test]
    fn pairs_congruent_mod_p_squared_stay_equivariant_at_r2() {
        // at r = 2 every weight-dependent entry is p·m mod p², so m mod p decides
        for (label, l1, l2) in [("A1", vec![10], vec![35]), ("A2", vec![3, 3], vec![28, 3])] {
            let a = trunc(label, &l1, 5, 2, Some(2));
            let b = trunc(label, &l2, 5, 2, Some(2));
            let phi = phi_unchecked(&a, &b, &[0]).unwrap();
            assert!(!phi.hypotheses.congruent);
            assert!(local_constancy_check(&phi, &a, &b).unwrap().iter().all(|e| e.pass));
        }
    }

    #[test]
    fn kstar_letters() {
        let t = trunc("A1", &[6], 5, 3, None);
        assert_eq!(t.kstar_element_action(&[]).unwrap(), t.identity());
        // x_−(1) agrees with the Chevalley matrix reduced mod p^r
        let one = BigRational::one();
        let lower = t.kstar_element_action(&[KLetter::Root { root: SRoot::minus(0), t: one.clone() }]).unwrap();
        let full = t.lattice.chevalley_generator_matrix(SRoot::minus(0), &one).unwrap();
        let n = t.dim();
        let want = IntMat::from_rows((0..n).map(|i| (0..n).map(|j| full[i][j].to_integer()).collect()).collect(), n);
        assert_eq!(lower, ModMatrix::new(5, t.basis_exps.clone(), want));
        let five = BigRational::from_integer(5.into());
        let upper = t.kstar_element_action(&[KLetter::Root { root: SRoot::plus(0), t: five.clone() }]).unwrap();
        let full = t.lattice.chevalley_generator_matrix(SRoot::plus(0), &five).unwrap();
        let want = IntMat::from_rows((0..n).map(|i| (0..n).map(|j| full[i][j].to_integer()).collect()).collect(), n);
        assert_eq!(upper, ModMatrix::new(5, t.basis_exps.clone(), want));
        assert!(t.kstar_element_action(&[KLetter::Root { root: SRoot::plus(0), t: one }]).is_err());
        let tor = t.kstar_element_action(&[KLetter::Torus(vec![BigRational::from_integer(2.into())])]).unwrap();
        assert_eq!(tor.m.get(0, 0), &BigInt::from(64));
    }
}
