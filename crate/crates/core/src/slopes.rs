//! Slopes of an operator preserving a `Z_p`-lattice: characteristic
//! polynomials, Newton polygons, the elementary-divisor bound on slope
//! multiplicities, and its application to `H¹` of the level group.

use crate::arithcoh::{
    lattice_h1, sl2_structure, truncated_h1, CohError, HeckeSetup, ReductiveWeight, TruncatedCoefficients,
};
use crate::hwmod::weight_lattice_index;
use crate::linalg::{smith_diagonal, solve_rational, vp, IntMat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SlopeError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("negative slope bound {0}")]
    NegativeBeta(BigRational),
    #[error("sublattice basis is not {0}")]
    BadSublattice(&'static str),
    #[error("hypothesis r > β + 1 fails for r = {r}, β = {beta}")]
    Hypothesis { r: u32, beta: BigRational },
    #[error(transparent)]
    Cohomology(#[from] CohError),
}

/// Characteristic polynomial `det(X − T) = Σ c_i X^{n−i}` by Berkowitz's
/// division-free recurrence.
pub fn charpoly(t: &IntMat) -> Result<Vec<BigInt>, SlopeError> {
    if !t.is_square() {
        return Err(SlopeError::NotSquare);
    }
    let n = t.rows();
    let mut poly = vec![BigInt::one()];
    for k in 0..n {
        // leading (k+1)×(k+1) block [[M, c], [row, a]]
        let a = t.get(k, k).clone();
        let row: Vec<BigInt> = (0..k).map(|j| t.get(k, j).clone()).collect();
        let mut v: Vec<BigInt> = (0..k).map(|i| t.get(i, k).clone()).collect();
        let mut toeplitz = vec![BigInt::one(), -a];
        for _ in 0..k {
            let dot: BigInt = row.iter().zip(&v).map(|(x, y)| x * y).sum();
            toeplitz.push(-dot);
            v = (0..k).map(|i| (0..k).map(|j| t.get(i, j) * &v[j]).sum()).collect();
        }
        let mut next = vec![BigInt::zero(); k + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, c) in poly.iter().enumerate() {
                if i >= j && i - j < toeplitz.len() {
                    *slot += &toeplitz[i - j] * c;
                }
            }
        }
        poly = next;
    }
    Ok(poly)
}

/// Lower convex hull of `(i, v_p(a_i))` for `Σ a_i X^{n−i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// `(i, v_p(a_i))`, `None` for zero coefficients.
    pub points: Vec<(usize, Option<i64>)>,
    pub vertices: Vec<(usize, i64)>,
    /// `(slope, horizontal length)` in increasing slope order.
    pub segments: Vec<(BigRational, usize)>,
    /// Roots at zero (slope `∞`).
    pub infinite: usize,
}

pub fn newton_polygon(poly: &[BigInt], p: u64) -> Result<NewtonPolygon, SlopeError> {
    let points: Vec<(usize, Option<i64>)> =
        poly.iter().enumerate().map(|(i, a)| (i, vp(a, p).map(i64::from))).collect();
    let finite: Vec<(usize, i64)> = points.iter().filter_map(|&(i, v)| v.map(|v| (i, v))).collect();
    if finite.is_empty() {
        return Err(SlopeError::ZeroPolynomial);
    }
    let n = poly.len() - 1;
    let last = finite.last().unwrap().0;
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &finite {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            let cross = (x2 as i128 - x1 as i128) * (pt.1 as i128 - y1 as i128)
                - (y2 as i128 - y1 as i128) * (pt.0 as i128 - x1 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut segments: Vec<(BigRational, usize)> = Vec::new();
    for w in hull.windows(2) {
        let len = w[1].0 - w[0].0;
        let slope = BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(len));
        segments.push((slope, len));
    }
    Ok(NewtonPolygon { points, vertices: hull, segments, infinite: n - last })
}

/// Slopes with multiplicities; `d(β)` counts slopes `≤ β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeProfile {
    pub slopes: Vec<(BigRational, usize)>,
    pub infinite: usize,
}

impl SlopeProfile {
    pub fn dim(&self) -> usize {
        self.slopes.iter().map(|s| s.1).sum::<usize>() + self.infinite
    }

    pub fn d(&self, beta: &BigRational) -> usize {
        self.slopes.iter().filter(|(a, _)| a <= beta).map(|s| s.1).sum()
    }

    /// `α · d_α` is an integer for every slope.
    pub fn integral_products(&self) -> bool {
        self.slopes.iter().all(|(a, d)| (a * BigRational::from_integer(BigInt::from(*d))).is_integer())
    }
}

pub fn newton_slopes(poly: &[BigInt], p: u64) -> Result<SlopeProfile, SlopeError> {
    let np = newton_polygon(poly, p)?;
    let mut slopes: Vec<(BigRational, usize)> = Vec::new();
    for (s, len) in np.segments {
        match slopes.last_mut() {
            Some(last) if last.0 == s => last.1 += len,
            _ => slopes.push((s, len)),
        }
    }
    Ok(SlopeProfile { slopes, infinite: np.infinite })
}

pub fn slope_dimension(t: &IntMat, p: u64, beta: &BigRational) -> Result<usize, SlopeError> {
    if beta.is_negative() {
        return Err(SlopeError::NegativeBeta(beta.clone()));
    }
    Ok(newton_slopes(&charpoly(t)?, p)?.d(beta))
}

/// The two sides of the elementary-divisor bound on `Σ d_i (r − α_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionBound {
    /// `(α_i, d_i)` for the slopes `≤ β`.
    pub slopes: Vec<(BigRational, usize)>,
    pub lhs: BigInt,
    /// `v_p` of the image of `T` on the sublattice modulo `p^r`.
    pub rhs: u64,
    pub holds: bool,
    /// Slopes with `r − α_i < 0`, whose terms enter the sum with negative sign.
    pub negative_terms: Vec<BigRational>,
    /// `d(β) ≤ rhs`, checked only when `r > β + 1`.
    pub d_beta_bound: Option<bool>,
    pub d_beta: usize,
}

/// `T` restricted to the sublattice spanned by the columns of `basis`.
fn restrict(t: &IntMat, basis: &IntMat) -> Result<IntMat, SlopeError> {
    let d = basis.cols();
    if basis.rows() != t.rows() || basis.rank() != d {
        return Err(SlopeError::BadSublattice("of full column rank"));
    }
    let bt = basis.transpose();
    let gram = bt.mul(basis);
    let image = bt.mul(&t.mul(basis));
    let mut out = IntMat::zeros(d, d);
    for j in 0..d {
        let sol = solve_rational(&gram, &image.col(j)).ok_or(SlopeError::BadSublattice("of full column rank"))?;
        for (i, x) in sol.into_iter().enumerate() {
            if !x.is_integer() {
                return Err(SlopeError::BadSublattice("stable under T"));
            }
            out.set(i, j, x.to_integer());
        }
    }
    if t.mul(basis) != basis.mul(&out) {
        return Err(SlopeError::BadSublattice("stable under T"));
    }
    Ok(out)
}

/// Checks `Σ d_i (r − α_i) ≤ v_p #(L/p^r / ker T)` on the slope-`≤ β` sublattice
/// `L` given by `sublattice` (the whole lattice when `None`).
pub fn verify_dimension_bound(
    t: &IntMat,
    p: u64,
    beta: &BigRational,
    r: u32,
    sublattice: Option<&IntMat>,
) -> Result<DimensionBound, SlopeError> {
    if !t.is_square() {
        return Err(SlopeError::NotSquare);
    }
    if beta.is_negative() {
        return Err(SlopeError::NegativeBeta(beta.clone()));
    }
    let local = match sublattice {
        Some(b) => restrict(t, b)?,
        None => t.clone(),
    };
    let profile = newton_slopes(&charpoly(&local)?, p)?;
    if profile.infinite > 0 || profile.slopes.iter().any(|(a, _)| a > beta) {
        return Err(SlopeError::BadSublattice("contained in the slope ≤ β part"));
    }
    let rr = BigRational::from_integer(BigInt::from(r));
    let mut lhs = BigRational::zero();
    let mut negative_terms = Vec::new();
    for (a, d) in &profile.slopes {
        let term = (&rr - a) * BigRational::from_integer(BigInt::from(*d));
        if term.is_negative() {
            negative_terms.push(a.clone());
        }
        lhs += term;
    }
    assert!(lhs.is_integer(), "slope multiplicities give integral sums");
    let lhs = lhs.to_integer();
    let rhs: u64 = smith_diagonal(&local)
        .iter()
        .map(|s| match vp(s, p) {
            Some(v) => (r as i64 - v as i64).max(0) as u64,
            None => 0,
        })
        .sum();
    let d_beta = profile.d(beta);
    let d_beta_bound = (rr > beta + BigRational::one()).then_some(d_beta as u64 <= rhs);
    Ok(DimensionBound {
        slopes: profile.slopes,
        holds: lhs <= BigInt::from(rhs),
        lhs,
        rhs,
        negative_terms,
        d_beta_bound,
        d_beta,
    })
}

/// `d(λ̃, 1, β)` on `H¹` with field coefficients against `v_p #H¹(Γ, L^[r])`.
#[derive(Clone, Debug)]
pub struct DivisibilityReport {
    pub weight: ReductiveWeight,
    pub charpoly: Vec<BigInt>,
    pub slopes: SlopeProfile,
    pub d_beta: usize,
    pub trunc_exponent: u64,
    pub pass: bool,
}

fn check_hypothesis(beta: &BigRational, r: u32) -> Result<(), SlopeError> {
    if beta.is_negative() {
        return Err(SlopeError::NegativeBeta(beta.clone()));
    }
    if BigRational::from_integer(BigInt::from(r)) <= beta + BigRational::one() {
        return Err(SlopeError::Hypothesis { r, beta: beta.clone() });
    }
    Ok(())
}

pub fn divisibility_pipeline(
    setup: &HeckeSetup,
    weight: ReductiveWeight,
    beta: &BigRational,
    r: u32,
) -> Result<DivisibilityReport, SlopeError> {
    check_hypothesis(beta, r)?;
    let p = setup.p();
    let h = lattice_h1(setup, weight)?;
    let slopes = newton_slopes(&h.charpoly, p)?;
    let d_beta = slopes.d(beta);
    let coeffs = TruncatedCoefficients::new(weight, p, r)?;
    let trunc_exponent = truncated_h1(&coeffs, setup)?.h1_exp;
    Ok(DivisibilityReport {
        weight,
        charpoly: h.charpoly,
        slopes,
        d_beta,
        trunc_exponent,
        pass: d_beta as u64 <= trunc_exponent,
    })
}

/// `⌈p r / (p − 1)⌉`.
pub fn period_exponent(p: u64, r: u32) -> u32 {
    (p * r as u64).div_ceil(p - 1) as u32
}

/// Moves `k` into `Λ(r) = [0, r + period]` by subtracting multiples of the
/// period, keeping the result above `r`.
pub fn reduce_weight(k: u64, r: u32, period: u64) -> u64 {
    let top = r as u64 + period;
    if k <= top {
        return k;
    }
    let steps = (k - top).div_ceil(period);
    k - steps * period
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepEntry {
    pub k: u32,
    pub reduced: u64,
    pub d: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct UniformBound {
    pub c: u64,
    pub lambda_set_size: usize,
    /// `p^{⌈pr/(p−1)⌉} · f`.
    pub period: u64,
    pub sweep: Vec<SweepEntry>,
}

impl UniformBound {
    pub fn pass(&self) -> bool {
        self.sweep.iter().all(|e| e.pass)
    }
}

/// `p^{⌈pr/(p−1)⌉} · f` with `f` the weight-lattice index of the standard
/// representation.
pub fn congruence_period(p: u64, r: u32) -> Result<u64, SlopeError> {
    let sc = sl2_structure()?;
    let f = weight_lattice_index(sc, &[1]).map_err(CohError::from)?;
    let f = f.to_u64().expect("small index");
    Ok(p.pow(period_exponent(p, r)) * f)
}

/// `max_{k ∈ Λ(r)} v_p #H¹(Γ, L^[r]_k)` and `#Λ(r)`.
pub fn lambda_constant(setup: &HeckeSetup, r: u32) -> Result<(u64, usize), SlopeError> {
    let p = setup.p();
    let top = r as u64 + congruence_period(p, r)?;
    let sc = sl2_structure()?;
    let exps: Vec<u64> = (0..=top)
        .into_par_iter()
        .map(|k| {
            let c = TruncatedCoefficients::with_structure(sc.clone(), ReductiveWeight::new(k as u32, 0), p, r)?;
            Ok(truncated_h1(&c, setup)?.h1_exp)
        })
        .collect::<Result<_, SlopeError>>()?;
    Ok((exps.iter().copied().max().unwrap_or(0), exps.len()))
}

pub fn uniform_bound(
    setup: &HeckeSetup,
    beta: &BigRational,
    r: u32,
    k_range: std::ops::RangeInclusive<u32>,
) -> Result<UniformBound, SlopeError> {
    check_hypothesis(beta, r)?;
    let p = setup.p();
    let period = congruence_period(p, r)?;
    let (c, lambda_set_size) = lambda_constant(setup, r)?;
    let sweep = k_range
        .collect::<Vec<u32>>()
        .into_par_iter()
        .map(|k| {
            let h = lattice_h1(setup, ReductiveWeight::new(k, 0))?;
            let d = newton_slopes(&h.charpoly, p)?.d(beta);
            Ok(SweepEntry { k, reduced: reduce_weight(k as u64, r, period), d, pass: d as u64 <= c })
        })
        .collect::<Result<Vec<_>, SlopeError>>()?;
    Ok(UniformBound { c, lambda_set_size, period, sweep })
}

/// Parses `a` or `a/b`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: BigInt = num.trim().parse().ok()?;
    let den: BigInt = den.trim().parse().ok()?;
    (!den.is_zero()).then(|| BigRational::new(num, den))
}

/// `gcd`-free helper for tests and callers that need slopes as fractions.
pub fn as_fraction(x: &BigRational) -> (BigInt, BigInt) {
    let g = x.numer().gcd(x.denom());
    (x.numer() / &g, x.denom() / &g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithcoh::{coset_reps, free_generators, SymTruncation};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn poly_from_roots(roots: &[BigInt]) -> Vec<BigInt> {
        let mut poly = vec![BigInt::one()];
        for r in roots {
            let mut next = poly.clone();
            next.push(BigInt::zero());
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] -= r * c;
            }
            poly = next;
        }
        poly
    }

    fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMat {
        let mut u = IntMat::identity(n);
        for _ in 0..3 * n {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let c = BigInt::from(rng.gen_range(-2i64..=2));
            let mut e = IntMat::identity(n);
            e.set(i, j, c);
            u = u.mul(&e);
        }
        u
    }

    #[test]
    fn charpolys() {
        assert_eq!(charpoly(&IntMat::identity(2)).unwrap(), ints(&[1, -2, 1]));
        let p = 5;
        let d = IntMat::from_i64(&[vec![1, 0, 0], vec![0, p, 0], vec![0, 0, p * p]]);
        assert_eq!(charpoly(&d).unwrap(), poly_from_roots(&ints(&[1, p, p * p])));
        // companion of X² − pX + p³
        let comp = IntMat::from_i64(&[vec![0, -p * p * p], vec![1, p]]);
        assert_eq!(charpoly(&comp).unwrap(), ints(&[1, -p, p * p * p]));
        assert!(charpoly(&IntMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn newton_examples() {
        for p in [2i64, 3, 5, 7] {
            let prof = newton_slopes(&ints(&[1, -p, p * p * p]), p as u64).unwrap();
            assert_eq!(prof.slopes, vec![(q(1, 1), 1), (q(2, 1), 1)]);
            let prof = newton_slopes(&ints(&[1, 0, -p * p]), p as u64).unwrap();
            assert_eq!(prof.slopes, vec![(q(1, 1), 2)]);
        }
        let prof = newton_slopes(&poly_from_roots(&ints(&[1, 1, 1, 1])), 5).unwrap();
        assert_eq!(prof.slopes, vec![(q(0, 1), 4)]);
        // X³ − 5X²: slope 0 once, ∞ twice
        let prof = newton_slopes(&ints(&[1, -5, 0, 0]), 5).unwrap();
        assert_eq!((prof.slopes.clone(), prof.infinite), (vec![(q(1, 1), 1)], 2));
        assert_eq!(prof.dim(), 3);
        // X² − 5 has slope 1/2 twice
        let prof = newton_slopes(&ints(&[1, 0, -5]), 5).unwrap();
        assert_eq!(prof.slopes, vec![(q(1, 2), 2)]);
        assert!(prof.integral_products());
        assert!(newton_slopes(&ints(&[0, 0]), 5).is_err());
    }

    #[test]
    fn slope_dimensions() {
        let p = 5;
        let d = IntMat::from_i64(&[vec![1, 0, 0], vec![0, p, 0], vec![0, 0, p * p]]);
        assert_eq!(slope_dimension(&d, 5, &q(1, 1)).unwrap(), 2);
        let comp = IntMat::from_i64(&[vec![0, -p * p * p], vec![1, p]]);
        assert_eq!(slope_dimension(&comp, 5, &q(1, 1)).unwrap(), 1);
        assert_eq!(slope_dimension(&IntMat::identity(3), 5, &q(0, 1)).unwrap(), 3);
        assert!(slope_dimension(&d, 5, &q(-1, 1)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn slopes_of_split_polynomials(roots in proptest::collection::vec((1i64..5, 0u32..4, any::<bool>()), 1..7), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let pi = p as i64;
            // units u not divisible by p, root ±u p^j
            let rs: Vec<BigInt> = roots.iter().map(|&(u, j, s)| {
                let u = if u % pi == 0 { u + 1 } else { u };
                BigInt::from(if s { u } else { -u }) * BigInt::from(pi).pow(j)
            }).collect();
            let prof = newton_slopes(&poly_from_roots(&rs), p).unwrap();
            let mut expected: Vec<u32> = roots.iter().map(|r| r.1).collect();
            expected.sort();
            let mut got: Vec<u32> = Vec::new();
            for (s, m) in &prof.slopes {
                prop_assert!(s.is_integer());
                got.extend(std::iter::repeat_n(s.to_integer().to_u32().unwrap(), *m));
            }
            prop_assert_eq!(got, expected);
            prop_assert!(prof.integral_products());
        }

        #[test]
        fn d_is_monotone(coeffs in proptest::collection::vec(-50i64..50, 1..6), a in 0i64..6, b in 0i64..6) {
            let mut poly = vec![BigInt::one()];
            poly.extend(coeffs.iter().map(|&c| BigInt::from(c)));
            if let Ok(prof) = newton_slopes(&poly, 5) {
                let (lo, hi) = (a.min(b), a.max(b));
                prop_assert!(prof.d(&q(lo, 2)) <= prof.d(&q(hi, 2)));
                prop_assert_eq!(prof.dim(), coeffs.len());
            }
        }
    }

    #[test]
    fn split_diagonal_bound_is_sharp() {
        let p = 5;
        let d = IntMat::from_i64(&[vec![1, 0, 0], vec![0, p, 0], vec![0, 0, p * p]]);
        let rep = verify_dimension_bound(&d, 5, &q(2, 1), 3, None).unwrap();
        assert_eq!((rep.lhs.clone(), rep.rhs), (BigInt::from(6), 6));
        assert!(rep.holds);
        assert_eq!(rep.d_beta_bound, None);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let u = random_unimodular(3, &mut rng);
            let conj = crate::linalg::unimodular_inverse(&u).mul(&d).mul(&u);
            let again = verify_dimension_bound(&conj, 5, &q(2, 1), 3, None).unwrap();
            assert_eq!((again.lhs, again.rhs, again.slopes), (rep.lhs.clone(), rep.rhs, rep.slopes.clone()));
        }
    }

    #[test]
    fn non_semisimple_block() {
        let t = IntMat::from_i64(&[vec![5, 1], vec![0, 5]]);
        let rep = verify_dimension_bound(&t, 5, &q(1, 1), 3, None).unwrap();
        assert_eq!(rep.lhs, BigInt::from(4));
        assert_eq!(rep.rhs, 4);
        assert!(rep.holds);
        assert_eq!(rep.d_beta_bound, Some(true));
    }

    #[test]
    fn sublattice_restriction() {
        let p = 5;
        // slope ≤ 1 part of diag(1, p, p³) is spanned by e1, e2
        let d = IntMat::from_i64(&[vec![1, 0, 0], vec![0, p, 0], vec![0, 0, p * p * p]]);
        assert!(verify_dimension_bound(&d, 5, &q(1, 1), 3, None).is_err());
        let b = IntMat::from_i64(&[vec![1, 0], vec![0, 1], vec![0, 0]]);
        let rep = verify_dimension_bound(&d, 5, &q(1, 1), 3, Some(&b)).unwrap();
        assert_eq!((rep.lhs.clone(), rep.rhs, rep.d_beta), (BigInt::from(5), 5, 2));
        assert_eq!(rep.d_beta_bound, Some(true));
        let bad = IntMat::from_i64(&[vec![1], vec![0], vec![1]]);
        assert!(verify_dimension_bound(&d, 5, &q(1, 1), 3, Some(&bad)).is_err());
        // r below a slope: the term is negative and flagged
        let rep = verify_dimension_bound(&d, 5, &q(3, 1), 2, None).unwrap();
        assert_eq!(rep.negative_terms, vec![q(3, 1)]);
        assert!(rep.holds);
    }

    #[test]
    fn weight_reduction() {
        assert_eq!(period_exponent(5, 2), 3);
        assert_eq!(period_exponent(5, 3), 4);
        assert_eq!(congruence_period(5, 2).unwrap(), 125);
        let k2 = reduce_weight(135, 2, 125);
        assert_eq!(k2, 10);
        assert!(k2 > 2 && (135 - k2).is_multiple_of(125));
        assert_eq!(reduce_weight(127, 2, 125), 127);
        assert_eq!(reduce_weight(128, 2, 125), 3);
        assert_eq!(reduce_weight(1000, 3, 625), 375);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6"), Some(q(1, 2)));
        assert_eq!(parse_rational(" 2 "), Some(q(2, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(as_fraction(&q(4, 6)), (BigInt::from(2), BigInt::from(3)));
    }

    #[test]
    fn divisibility_pipeline_small_weights() {
        let g = Arc::new(free_generators(5).unwrap());
        let setup = HeckeSetup::new(g, coset_reps(5)).unwrap();
        let rep = divisibility_pipeline(&setup, ReductiveWeight::new(0, 0), &q(0, 1), 2).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.d_beta, 2);
        for k in [2u32, 4] {
            let rep = divisibility_pipeline(&setup, ReductiveWeight::new(k, 0), &q(1, 1), 3).unwrap();
            assert!(rep.pass, "k = {k}: d = {} > E = {}", rep.d_beta, rep.trunc_exponent);
            let oracle = SymTruncation { weight: ReductiveWeight::new(k, 0), p: 5, r: 3 };
            assert_eq!(truncated_h1(&oracle, &setup).unwrap().h1_exp, rep.trunc_exponent);
        }
        assert!(matches!(
            divisibility_pipeline(&setup, ReductiveWeight::new(2, 0), &q(1, 1), 2),
            Err(SlopeError::Hypothesis { .. })
        ));
    }

    #[test]
    fn truncation_exponent_grows_with_r() {
        let g = Arc::new(free_generators(5).unwrap());
        let setup = HeckeSetup::new(g, coset_reps(5)).unwrap();
        for k in [0u32, 3, 6] {
            let mut prev = 0;
            for r in 0..4 {
                let c = SymTruncation { weight: ReductiveWeight::new(k, 0), p: 5, r };
                let e = truncated_h1(&c, &setup).unwrap().h1_exp;
                assert!(e >= prev);
                prev = e;
            }
        }
    }
}
