//! Word-size prime fields: characteristic polynomials modulo 62-bit primes and
//! Chinese remaindering, for matrices whose exact charpoly has huge coefficients.

use crate::linalg::IntMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1u64 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, q);
        }
        a = mul_mod(a, a, q);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, q: u64) -> u64 {
    pow_mod(a, q - 2, q)
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^62`, descending.
pub fn large_primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while n > 2 {
            let c = n;
            n -= 2;
            if is_prime_u64(c) {
                return Some(c);
            }
        }
        None
    })
}

pub fn reduce(x: &BigInt, q: u64) -> u64 {
    x.mod_floor(&BigInt::from(q)).to_u64().unwrap()
}

pub fn reduce_matrix(a: &IntMat, q: u64) -> Vec<Vec<u64>> {
    (0..a.rows()).map(|i| a.row(i).iter().map(|x| reduce(x, q)).collect()).collect()
}

/// Characteristic polynomial `Σ c_i X^{n−i}` (with `c_0 = 1`) over `F_q`,
/// through reduction to upper Hessenberg form.
pub fn charpoly_mod(mut h: Vec<Vec<u64>>, q: u64) -> Vec<u64> {
    let n = h.len();
    for m in 1..n.saturating_sub(1) {
        let Some(piv) = (m..n).find(|&i| h[i][m - 1] != 0) else { continue };
        if piv != m {
            h.swap(piv, m);
            for row in h.iter_mut() {
                row.swap(piv, m);
            }
        }
        let inv = inv_mod(h[m][m - 1], q);
        for i in m + 1..n {
            if h[i][m - 1] == 0 {
                continue;
            }
            let u = mul_mod(h[i][m - 1], inv, q);
            for j in 0..n {
                let v = mul_mod(u, h[m][j], q);
                h[i][j] = (h[i][j] + q - v) % q;
            }
            for row in h.iter_mut() {
                let v = mul_mod(u, row[i], q);
                row[m] = (row[m] + v) % q;
            }
        }
    }
    // polys[m] = charpoly of the leading m×m block, coefficients low degree first
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let mut next = vec![0u64; m + 1];
        let prev = &polys[m - 1];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % q;
            next[d] = (next[d] + q - mul_mod(h[m - 1][m - 1], c, q)) % q;
        }
        let mut prod = 1u64;
        for i in 1..m {
            prod = mul_mod(prod, h[m - i][m - i - 1], q);
            let coeff = mul_mod(prod, h[m - i - 1][m - 1], q);
            if coeff == 0 {
                continue;
            }
            for (d, &c) in polys[m - i - 1].iter().enumerate() {
                next[d] = (next[d] + q - mul_mod(coeff, c, q)) % q;
            }
        }
        polys.push(next);
    }
    let mut out = polys.pop().unwrap();
    out.reverse();
    out
}

/// Row echelon basis of the column span of `b` over `F_q`: returns pivot rows
/// and the reduced basis vectors (each with a unit at its pivot).
fn column_echelon(b: &[Vec<u64>], rows: usize, q: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let cols = b.first().map_or(0, |r| r.len());
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for j in 0..cols {
        let mut v: Vec<u64> = (0..rows).map(|i| b[i][j]).collect();
        for (bv, &pr) in basis.iter().zip(&pivots) {
            if v[pr] != 0 {
                let f = v[pr];
                for i in 0..rows {
                    v[i] = (v[i] + q - mul_mod(f, bv[i], q)) % q;
                }
            }
        }
        if let Some(pr) = v.iter().position(|&x| x != 0) {
            let inv = inv_mod(v[pr], q);
            for x in v.iter_mut() {
                *x = mul_mod(*x, inv, q);
            }
            // keep earlier vectors reduced at the new pivot
            for bv in basis.iter_mut() {
                if bv[pr] != 0 {
                    let f = bv[pr];
                    for i in 0..rows {
                        bv[i] = (bv[i] + q - mul_mod(f, v[i], q)) % q;
                    }
                }
            }
            basis.push(v);
            pivots.push(pr);
        }
    }
    (pivots, basis)
}

/// Rank of an integer matrix modulo `q`.
pub fn rank_mod(a: &IntMat, q: u64) -> usize {
    column_echelon(&reduce_matrix(a, q), a.rows(), q).0.len()
}

/// Charpoly over `F_q` of the map induced by `t` on `F_q^n / span(b)`, or
/// `None` when the span has rank different from `expected_rank` modulo `q`.
pub fn quotient_charpoly_mod(t: &IntMat, b: &IntMat, expected_rank: usize, q: u64) -> Option<Vec<u64>> {
    let n = t.rows();
    let tq = reduce_matrix(t, q);
    let bq = reduce_matrix(b, q);
    let (pivots, basis) = column_echelon(&bq, n, q);
    if pivots.len() != expected_rank {
        return None;
    }
    let free: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    let m = free.len();
    let mut quo = vec![vec![0u64; m]; m];
    for (cj, &j) in free.iter().enumerate() {
        let mut v: Vec<u64> = (0..n).map(|i| tq[i][j]).collect();
        for (bv, &pr) in basis.iter().zip(&pivots) {
            if v[pr] != 0 {
                let f = v[pr];
                for i in 0..n {
                    v[i] = (v[i] + q - mul_mod(f, bv[i], q)) % q;
                }
            }
        }
        for (ci, &i) in free.iter().enumerate() {
            quo[ci][cj] = v[i];
        }
    }
    Some(charpoly_mod(quo, q))
}

/// Exact integer polynomial from residues, given `|c_i| ≤ bound` for all `i`.
pub fn crt_lift<F>(degree: usize, bound: &BigInt, mut residue: F) -> Vec<BigInt>
where
    F: FnMut(u64) -> Option<Vec<u64>>,
{
    let target = bound * 2 + 1;
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); degree + 1];
    for q in large_primes() {
        if modulus > target {
            break;
        }
        let Some(res) = residue(q) else { continue };
        assert_eq!(res.len(), degree + 1);
        let qb = BigInt::from(q);
        // x ≡ acc (mod M), x ≡ r (mod q)
        let minv = BigInt::from(inv_mod(reduce(&modulus, q), q));
        for (a, &r) in acc.iter_mut().zip(&res) {
            let diff = (BigInt::from(r) - &*a).mod_floor(&qb);
            let k = (diff * &minv).mod_floor(&qb);
            *a += &modulus * k;
        }
        modulus *= qb;
    }
    let half = &modulus / 2;
    acc.into_iter().map(|a| if a > half { a - &modulus } else { a }).collect()
}

/// `(R+1)^n` with `R` the largest absolute row sum: bounds every coefficient of
/// any monic factor of the characteristic polynomial of degree `n`.
pub fn eigen_coefficient_bound(t: &IntMat, n: usize) -> BigInt {
    let r: BigInt = t.max_abs_row_sum() + 1;
    num_traits::pow(r, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime_u64(2305843009213693951));
        assert!(!is_prime_u64(2305843009213693953));
        let ps: Vec<u64> = large_primes().take(3).collect();
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn small_charpolys() {
        let q = 1_000_000_007;
        // [[1,2],[3,4]]: X² − 5X − 2
        let c = charpoly_mod(vec![vec![1, 2], vec![3, 4]], q);
        assert_eq!(c, vec![1, q - 5, q - 2]);
        let c = charpoly_mod(vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]], q);
        assert_eq!(c, vec![1, 0, 0, q - 1]);
    }

    #[test]
    fn quotient_of_invariant_line() {
        // T fixes e1 with eigenvalue 2, quotient eigenvalue 3
        let t = IntMat::from_i64(&[vec![2, 5], vec![0, 3]]);
        let b = IntMat::from_i64(&[vec![1], vec![0]]);
        let bound = eigen_coefficient_bound(&t, 1);
        let c = crt_lift(1, &bound, |q| quotient_charpoly_mod(&t, &b, 1, q));
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(-3)]);
    }
}
