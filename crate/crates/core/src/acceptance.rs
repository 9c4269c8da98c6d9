//! The ten acceptance criteria, shared by the `accept` subcommand and the
//! `acceptance` integration test. Every comparison is exact; the only pinned
//! tolerances are the wall-clock budgets.

use crate::arithcoh::{
    annihilation_check, coset_reps, free_generators, hecke_matrix, hecke_scalar_check, lattice_h1, shuffled_coset_reps,
    unnormalized_hecke, HeckeSetup, LatticeCoefficients, ReductiveWeight,
};
use crate::hwmod::{
    freudenthal_multiplicities, irreducible_lattice, weyl_dimension, HighestWeightLattice, DEFAULT_DIMENSION_CAP,
};
use crate::linalg::{rat_to_int, unimodular_inverse, IntMat};
use crate::pbw::{
    build_structure_constants, divided_power_commute, Factor, RepOracle, SRoot, Straightener, StructureConstants,
};
use crate::rootsys::{build_root_system, CartanDatum};
use crate::slopes::{divisibility_pipeline, uniform_bound, verify_dimension_bound};
use crate::trunc::{
    build_truncation, local_constancy_check, phi_isomorphism, phi_unchecked, s_generators, TruncationSpec,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Wall-clock budgets per criterion, in seconds.
pub const BUDGETS: [u64; 10] = [60, 120, 30, 10, 120, 120, 30, 600, 1200, 60];

/// Randomized commutations and oracle words per type.
pub const RANDOM_TRIALS: usize = 200;

/// Seed for every randomized check.
pub const SEED: u64 = 20_240_611;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {} [{:.1}s / {}s]: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            BUDGETS[self.id - 1],
            self.detail
        )
    }
}

type Check = Result<(bool, String), String>;

fn timed(id: usize, title: &'static str, f: impl FnOnce() -> Check) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let within = elapsed <= Duration::from_secs(BUDGETS[id - 1]);
    let detail = if within { detail } else { format!("{detail}; over budget") };
    Outcome { id, title, pass: ok && within, detail, elapsed }
}

fn structure(label: &str) -> Result<Arc<StructureConstants>, String> {
    let datum = CartanDatum::parse(label).map_err(|e| e.to_string())?;
    let rs = build_root_system(&datum).map_err(|e| e.to_string())?;
    Ok(Arc::new(build_structure_constants(&rs).map_err(|e| e.to_string())?))
}

fn dominant_weights(rank: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out.into_iter().flat_map(|w| (0..=max).map(move |m| [w.clone(), vec![m]].concat())).collect();
    }
    out
}

fn hecke_setup(p: u64) -> Result<HeckeSetup, String> {
    let g = Arc::new(free_generators(p).map_err(|e| e.to_string())?);
    HeckeSetup::new(g, coset_reps(p)).map_err(|e| e.to_string())
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// S-generators with `n ≤ r + 2` preserve `L_λ(Z, r)`.
pub fn criterion_1() -> Outcome {
    timed(1, "S-invariance of the truncating submodule", || {
        let mut checks = 0usize;
        let mut failures = Vec::new();
        for label in ["A1", "A2", "B2"] {
            let sc = structure(label)?;
            let rank = sc.rank();
            let results: Vec<Result<(usize, Vec<String>), String>> = dominant_weights(rank, 4)
                .into_par_iter()
                .map(|lambda| {
                    let l = Arc::new(
                        irreducible_lattice(sc.clone(), &lambda, None, DEFAULT_DIMENSION_CAP)
                            .map_err(|e| e.to_string())?,
                    );
                    let mut truncs = Vec::new();
                    for p in [2u64, 3, 5] {
                        for r in [1u32, 2] {
                            truncs.push((
                                p,
                                r,
                                build_truncation(l.clone(), TruncationSpec::new(p, r)).map_err(|e| e.to_string())?,
                            ));
                        }
                    }
                    let mut n_checks = 0;
                    let mut bad = Vec::new();
                    for g in s_generators(sc.num_positive(), 4) {
                        let blocks = l.generator_action(g.factor()).map_err(|e| e.to_string())?;
                        for (p, r, t) in truncs.iter().filter(|t| g.n <= t.1 + 2) {
                            n_checks += 1;
                            if !t.preserves_submodule(&blocks, g.scale_exp(&l)) {
                                bad.push(format!("{label} {lambda:?} p={p} r={r} {}", g.label(&l)));
                            }
                        }
                    }
                    Ok((n_checks, bad))
                })
                .collect();
            for r in results {
                let (n, bad) = r?;
                checks += n;
                failures.extend(bad);
            }
        }
        Ok((
            failures.is_empty(),
            format!(
                "{checks} generator checks, {} failures {:?}",
                failures.len(),
                failures.iter().take(3).collect::<Vec<_>>()
            ),
        ))
    })
}

fn random_word(rng: &mut ChaCha8Rng, s: usize, l: usize) -> Vec<Factor> {
    let len = rng.gen_range(1..=5);
    (0..len)
        .map(|_| match rng.gen_range(0..3) {
            0 => Factor::Root(SRoot::plus(rng.gen_range(0..s)), rng.gen_range(1..=2)),
            1 => Factor::Root(SRoot::minus(rng.gen_range(0..s)), rng.gen_range(1..=2)),
            _ => Factor::Toral(rng.gen_range(0..l), rng.gen_range(1..=2)),
        })
        .collect()
}

/// Divided-power commutations are integral with bounded toral length, and
/// straightened words agree with the module-action oracle.
pub fn criterion_2() -> Outcome {
    timed(2, "straightening integrality and soundness", || {
        let mut summary = Vec::new();
        let mut ok = true;
        for (label, lambda) in [("A1", vec![3]), ("A2", vec![1, 1]), ("B2", vec![1, 1]), ("G2", vec![1, 0])] {
            let sc = structure(label)?;
            let s = sc.num_positive();
            let l = sc.rank();
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let mut st = Straightener::new(sc.clone());
            let mut integral = 0;
            for _ in 0..RANDOM_TRIALS {
                let alpha = rng.gen_range(0..s);
                let k = rng.gen_range(1..=3);
                let a: Vec<u32> = (0..s).map(|_| if rng.gen_bool(0.4) { rng.gen_range(0..=2) } else { 0 }).collect();
                if divided_power_commute(&mut st, alpha, k, &a).is_ok() {
                    integral += 1;
                }
            }
            let oracle = RepOracle::new(&sc.rs, &lambda, 200);
            let mut sound = 0;
            for _ in 0..RANDOM_TRIALS {
                let w = random_word(&mut rng, s, l);
                if oracle.word_matrix(&w) == oracle.element_matrix(&st.straighten(&w)) {
                    sound += 1;
                }
            }
            ok &= integral == RANDOM_TRIALS && sound == RANDOM_TRIALS;
            summary.push(format!("{label}: {integral}/{RANDOM_TRIALS} integral, {sound}/{RANDOM_TRIALS} sound"));
        }
        Ok((ok, summary.join("; ")))
    })
}

fn matches_oracles(l: &HighestWeightLattice, lambda: &[i64]) -> bool {
    let mults = freudenthal_multiplicities(l.rs(), lambda);
    let built: usize = l.spaces.iter().filter(|s| s.dim() > 0).count();
    l.spaces.iter().all(|s| mults.get(&s.diff).copied().unwrap_or(0) == s.dim() as u64)
        && built == mults.len()
        && BigInt::from(l.dim()) == weyl_dimension(l.rs(), lambda)
}

/// Dimensions and weight multiplicities of the integral lattices.
pub fn criterion_3() -> Outcome {
    timed(3, "irreducible lattice dimensions", || {
        let a2 = structure("A2")?;
        let fund = irreducible_lattice(a2.clone(), &[1, 0], None, DEFAULT_DIMENSION_CAP).map_err(|e| e.to_string())?;
        let adj = irreducible_lattice(a2.clone(), &[1, 1], None, DEFAULT_DIMENSION_CAP).map_err(|e| e.to_string())?;
        let zero = adj.space_of_weight(&[0, 0]).map(|i| adj.spaces[i].dim());
        let mut ok = fund.dim() == 3 && adj.dim() == 8 && zero == Some(2);
        let mut count = 0;
        for (label, max) in [("A1", 8), ("A2", 2), ("B2", 2), ("G2", 1)] {
            let sc = structure(label)?;
            for lambda in dominant_weights(sc.rank(), max) {
                let l =
                    irreducible_lattice(sc.clone(), &lambda, None, DEFAULT_DIMENSION_CAP).map_err(|e| e.to_string())?;
                ok &= matches_oracles(&l, &lambda);
                count += 1;
            }
        }
        Ok((
            ok,
            format!(
                "A2 (1,0) dim {}, (1,1) dim {} zero weight {:?}; {count} modules match Freudenthal/Weyl",
                fund.dim(),
                adj.dim(),
                zero
            ),
        ))
    })
}

/// `log_p` of a few truncation cardinalities.
pub fn criterion_4() -> Outcome {
    timed(4, "truncation cardinalities", || {
        let mut got = Vec::new();
        for (label, lambda, p, r) in [("A1", vec![10], 5u64, 2u32), ("A2", vec![3, 3], 5, 2), ("A2", vec![3, 3], 5, 0)]
        {
            let l = irreducible_lattice(structure(label)?, &lambda, Some(r as i64), DEFAULT_DIMENSION_CAP)
                .map_err(|e| e.to_string())?;
            let t = build_truncation(Arc::new(l), TruncationSpec::new(p, r)).map_err(|e| e.to_string())?;
            got.push(t.cardinality_exponent());
        }
        Ok((got == [3, 4, 0], format!("exponents {got:?}, expected [3, 4, 0]")))
    })
}

fn truncation(label: &str, lambda: &[i64], p: u64, r: u32) -> Result<crate::trunc::TruncatedModule, String> {
    let l = irreducible_lattice(structure(label)?, lambda, Some(r as i64), DEFAULT_DIMENSION_CAP)
        .map_err(|e| e.to_string())?;
    build_truncation(Arc::new(l), TruncationSpec::new(p, r)).map_err(|e| e.to_string())
}

/// Φ-equivariance for congruent weights, and the two controls.
pub fn criterion_5() -> Outcome {
    timed(5, "local constancy", || {
        let mut ok = true;
        let mut notes = Vec::new();
        for (label, l1, l2) in [("A1", vec![10], vec![135]), ("A2", vec![3, 3], vec![128, 3])] {
            let a = truncation(label, &l1, 5, 2)?;
            let b = truncation(label, &l2, 5, 2)?;
            let phi = phi_isomorphism(&a, &b, &[0]).map_err(|e| e.to_string())?;
            let eq = local_constancy_check(&phi, &a, &b).map_err(|e| e.to_string())?;
            let good = phi.bijective && eq.iter().all(|e| e.pass);
            ok &= good;
            notes.push(format!(
                "{label} {l1:?}~{l2:?}: {}/{} equivariant",
                eq.iter().filter(|e| e.pass).count(),
                eq.len()
            ));
        }
        // modulus p² instead of p³: the control is expected to break equivariance
        for (label, l1, l2) in [("A1", vec![10], vec![35]), ("A2", vec![3, 3], vec![28, 3])] {
            let a = truncation(label, &l1, 5, 2)?;
            let b = truncation(label, &l2, 5, 2)?;
            let phi = phi_unchecked(&a, &b, &[0]).map_err(|e| e.to_string())?;
            let eq = local_constancy_check(&phi, &a, &b).map_err(|e| e.to_string())?;
            let broken = eq.iter().any(|e| !e.pass);
            ok &= broken;
            notes.push(format!(
                "mod p² control {label} {l1:?}~{l2:?}: {}",
                if broken { "fails as required" } else { "stays equivariant" }
            ));
        }
        let a = truncation("A1", &[10], 5, 2)?;
        let b = truncation("A1", &[11], 5, 2)?;
        let phi = phi_unchecked(&a, &b, &[0]).map_err(|e| e.to_string())?;
        let broken = local_constancy_check(&phi, &a, &b).map_err(|e| e.to_string())?.iter().any(|e| !e.pass);
        ok &= broken;
        notes.push(format!("neighbour control [10]~[11]: {}", if broken { "fails" } else { "stays equivariant" }));
        Ok((ok, notes.join("; ")))
    })
}

/// Integrality of the normalized Hecke operator and its annihilation of the
/// truncating submodule.
pub fn criterion_6() -> Outcome {
    timed(6, "Hecke integrality and annihilation", || {
        let setup = hecke_setup(5)?;
        let mut ok = setup.rank() == 3;
        let mut notes = vec![format!("rank {}", setup.rank())];
        let mut controls = 0;
        for k in 0..=10u32 {
            for m in [-1i64, 0, 1] {
                let w = ReductiveWeight::new(k, m);
                ok &= hecke_scalar_check(w, 5);
                let t = unnormalized_hecke(&setup, w).map_err(|e| e.to_string())?;
                let lam = w.on_hecke_element(5);
                let scaled: Vec<Vec<BigRational>> =
                    t.iter().map(|row| row.iter().map(|x| x * &lam).collect()).collect();
                let norm = hecke_matrix(&LatticeCoefficients::new(w, 5), &setup).map_err(|e| e.to_string())?;
                ok &= rat_to_int(&scaled).as_ref() == Some(&norm);
                for r in 1..=3 {
                    ok &= annihilation_check(&setup, w, r, true).map_err(|e| e.to_string())?;
                    if k >= 1 && m == 0 {
                        let control = annihilation_check(&setup, w, r, false).map_err(|e| e.to_string())?;
                        ok &= !control;
                        controls += usize::from(!control);
                    }
                }
            }
        }
        notes.push(format!(
            "k ≤ 10, m ∈ {{-1,0,1}}: valuations, integrality, annihilation; {controls}/30 unnormalized controls fail"
        ));
        Ok((ok, notes.join("; ")))
    })
}

/// The elementary-divisor bound on synthetic lattices.
pub fn criterion_7() -> Outcome {
    timed(7, "dimension bound on synthetic lattices", || {
        let d = IntMat::from_i64(&[vec![1, 0, 0], vec![0, 5, 0], vec![0, 0, 25]]);
        let base = verify_dimension_bound(&d, 5, &q(2, 1), 3, None).map_err(|e| e.to_string())?;
        let mut ok = base.lhs == BigInt::from(6) && base.rhs == 6 && base.holds;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut invariant = 0;
        for _ in 0..20 {
            let mut u = IntMat::identity(3);
            for _ in 0..9 {
                let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
                if i != j {
                    let mut e = IntMat::identity(3);
                    e.set(i, j, BigInt::from(rng.gen_range(-2i64..=2)));
                    u = u.mul(&e);
                }
            }
            let conj = unimodular_inverse(&u).mul(&d).mul(&u);
            let rep = verify_dimension_bound(&conj, 5, &q(2, 1), 3, None).map_err(|e| e.to_string())?;
            if rep.lhs == base.lhs && rep.rhs == base.rhs && rep.slopes == base.slopes {
                invariant += 1;
            }
        }
        ok &= invariant == 20;
        let jordan = IntMat::from_i64(&[vec![5, 1], vec![0, 5]]);
        let j = verify_dimension_bound(&jordan, 5, &q(1, 1), 3, None).map_err(|e| e.to_string())?;
        ok &= j.holds && j.lhs == BigInt::from(4);
        Ok((
            ok,
            format!(
                "diag LHS {} RHS {}; {invariant}/20 conjugates invariant; Jordan block LHS {} ≤ RHS {}",
                base.lhs, base.rhs, j.lhs, j.rhs
            ),
        ))
    })
}

/// `d(λ̃, 1, 1) ≤ v_5 #H¹(Γ, L^[3])` over a grid of weights.
pub fn criterion_8() -> Outcome {
    timed(8, "divisibility pipeline", || {
        let setup = hecke_setup(5)?;
        let rows: Vec<Result<(u32, usize, u64, bool), String>> = [0u32, 2, 4, 6, 8, 10]
            .into_par_iter()
            .map(|k| {
                let r = divisibility_pipeline(&setup, ReductiveWeight::new(k, 0), &q(1, 1), 3)
                    .map_err(|e| e.to_string())?;
                Ok((k, r.d_beta, r.trunc_exponent, r.pass))
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
        let ok = rows.iter().all(|r| r.3);
        let txt: Vec<String> = rows.iter().map(|(k, d, e, _)| format!("k={k}: {d}≤{e}")).collect();
        Ok((ok, txt.join(", ")))
    })
}

/// Uniform bound from `Λ(3)` over `k ∈ [2, 50]`, in two disjoint sweeps.
pub fn criterion_9() -> Outcome {
    timed(9, "uniform slope bound", || {
        let setup = hecke_setup(5)?;
        let beta = q(1, 1);
        let a = uniform_bound(&setup, &beta, 3, 2..=25).map_err(|e| e.to_string())?;
        let b = uniform_bound(&setup, &beta, 3, 26..=50).map_err(|e| e.to_string())?;
        let max_d = a.sweep.iter().chain(&b.sweep).map(|e| e.d).max().unwrap_or(0);
        let ok = a.c == b.c && a.pass() && b.pass() && a.lambda_set_size == 629;
        Ok((
            ok,
            format!("C = {} and {} over {} weights; max d(k) = {max_d} for k in 2..=50", a.c, b.c, a.lambda_set_size),
        ))
    })
}

/// Charpoly of the induced operator on `H¹` under a second set of representatives.
pub fn criterion_10() -> Outcome {
    timed(10, "independence of coset representatives", || {
        let g = Arc::new(free_generators(5).map_err(|e| e.to_string())?);
        let a = HeckeSetup::new(g.clone(), coset_reps(5)).map_err(|e| e.to_string())?;
        let b = HeckeSetup::new(g.clone(), shuffled_coset_reps(5, SEED)).map_err(|e| e.to_string())?;
        let mut ok = a.reps != b.reps;
        let mut same = 0;
        for k in 0..=6 {
            let w = ReductiveWeight::new(k, 0);
            let ca = lattice_h1(&a, w).map_err(|e| e.to_string())?.charpoly;
            let cb = lattice_h1(&b, w).map_err(|e| e.to_string())?.charpoly;
            if ca == cb {
                same += 1;
            }
        }
        ok &= same == 7;
        Ok((ok, format!("{same}/7 weights k ≤ 6 give identical charpolys")))
    })
}

pub fn run_all() -> Vec<Outcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}
