//! Dense symmetric generalized eigensolver at extended precision: equilibrate
//! the overlap to unit diagonal, rank-revealing pivoted Cholesky to discard
//! numerically dependent directions, reduction to standard form by triangular
//! solves, and cyclic Jacobi for the eigenvalues.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::hp::{big_from_rat, rat_from_big, RM};
use super::KrylovError;
use crate::Rat;

pub(crate) struct SubspaceSolve {
    pub values: Vec<Rat>,
    pub rank: usize,
}

fn is_greater(a: &BigFloat, b: &BigFloat) -> bool {
    a.cmp(b).is_some_and(|v| v > 0)
}

fn two_pow_neg(k: usize, p: usize) -> BigFloat {
    big_from_rat(&Rat::new(BigInt::one(), BigInt::one() << k), p)
}

/// Ritz values of H v = E S v restricted to the subspace that survives rank
/// filtering of S, ascending. S and H symmetric; S must have a positive
/// diagonal (exact rational check).
#[allow(clippy::needless_range_loop)]
pub(crate) fn generalized_eigenvalues(
    s: &[Vec<Rat>],
    h: &[Vec<Rat>],
    p: usize,
) -> Result<SubspaceSolve, KrylovError> {
    let n = s.len();
    if n == 0 {
        return Ok(SubspaceSolve { values: Vec::new(), rank: 0 });
    }
    for (i, row) in s.iter().enumerate() {
        if !row[i].is_positive() {
            return Err(KrylovError::OverlapNotPositive);
        }
    }

    // Equilibrate to unit diagonal: moment matrices span hundreds of orders
    // of magnitude, and the pivot threshold below is relative to O(1).
    let one = big_from_rat(&Rat::one(), p);
    let scale: Vec<BigFloat> = (0..n)
        .map(|i| one.div(&big_from_rat(&s[i][i], p).sqrt(p, RM), p, RM))
        .collect();
    let build = |m: &[Vec<Rat>]| -> Vec<Vec<BigFloat>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        big_from_rat(&m[i][j], p)
                            .mul(&scale[i], p, RM)
                            .mul(&scale[j], p, RM)
                    })
                    .collect()
            })
            .collect()
    };
    let mut a = build(s);
    let ht = build(h);

    // Pivoted Cholesky with diagonal pivoting; directions whose pivot falls
    // below 2^(-p/2) relative to the unit diagonal carry no information at
    // working precision and are discarded.
    let threshold = two_pow_neg(p / 2, p);
    let mut lower = vec![vec![BigFloat::from_words(&[0], astro_float::Sign::Pos, 0); n]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = n;
    for k in 0..n {
        let mut best = k;
        for j in k + 1..n {
            if is_greater(&a[j][j], &a[best][best]) {
                best = j;
            }
        }
        if best != k {
            perm.swap(k, best);
            a.swap(k, best);
            for row in a.iter_mut() {
                row.swap(k, best);
            }
            lower.swap(k, best);
        }
        if !is_greater(&a[k][k], &threshold) {
            rank = k;
            break;
        }
        let pivot_root = a[k][k].sqrt(p, RM);
        lower[k][k] = pivot_root.clone();
        for i in k + 1..n {
            lower[i][k] = a[i][k].div(&pivot_root, p, RM);
        }
        for i in k + 1..n {
            for j in k + 1..=i {
                let update = lower[i][k].mul(&lower[j][k], p, RM);
                a[i][j] = a[i][j].sub(&update, p, RM);
                a[j][i] = a[i][j].clone();
            }
        }
    }
    if rank == 0 {
        return Ok(SubspaceSolve { values: Vec::new(), rank: 0 });
    }

    // Reduced standard problem A = L⁻¹ H̃ L⁻ᵀ on the retained pivots.
    let hr: Vec<Vec<BigFloat>> = (0..rank)
        .map(|i| (0..rank).map(|j| ht[perm[i]][perm[j]].clone()).collect())
        .collect();
    let forward = |rhs: &dyn Fn(usize, usize) -> BigFloat| -> Vec<Vec<BigFloat>> {
        let mut x = vec![vec![BigFloat::from_words(&[0], astro_float::Sign::Pos, 0); rank]; rank];
        for col in 0..rank {
            for row in 0..rank {
                let mut acc = rhs(row, col);
                for t in 0..row {
                    acc = acc.sub(&lower[row][t].mul(&x[t][col], p, RM), p, RM);
                }
                x[row][col] = acc.div(&lower[row][row], p, RM);
            }
        }
        x
    };
    let x = forward(&|i, j| hr[i][j].clone());
    let y = forward(&|i, j| x[j][i].clone());
    let half = big_from_rat(&crate::rat(1, 2), p);
    let mut reduced: Vec<Vec<BigFloat>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| y[j][i].add(&y[i][j], p, RM).mul(&half, p, RM))
                .collect()
        })
        .collect();

    let mut values: Vec<Rat> = jacobi(&mut reduced, p).iter().map(rat_from_big).collect();
    values.sort();
    Ok(SubspaceSolve { values, rank })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi at precision p;
/// terminates when the largest off-diagonal entry falls below 2^(8-p)
/// relative to the largest diagonal entry.
#[allow(clippy::needless_range_loop)]
fn jacobi(a: &mut [Vec<BigFloat>], p: usize) -> Vec<BigFloat> {
    let n = a.len();
    if n == 1 {
        return vec![a[0][0].clone()];
    }
    let one = big_from_rat(&Rat::one(), p);
    let eps = two_pow_neg(p.saturating_sub(8), p);
    for _ in 0..100 {
        let mut off_max = BigFloat::from_words(&[0], astro_float::Sign::Pos, 0);
        let mut diag_max = off_max.clone();
        for i in 0..n {
            let d = a[i][i].abs();
            if is_greater(&d, &diag_max) {
                diag_max = d;
            }
            for j in i + 1..n {
                let v = a[i][j].abs();
                if is_greater(&v, &off_max) {
                    off_max = v;
                }
            }
        }
        if !is_greater(&off_max, &diag_max.mul(&eps, p, RM)) {
            break;
        }
        for pi in 0..n - 1 {
            for qi in pi + 1..n {
                if a[pi][qi].is_zero() {
                    continue;
                }
                let apq = a[pi][qi].clone();
                let theta = a[qi][qi]
                    .sub(&a[pi][pi], p, RM)
                    .div(&apq.add(&apq, p, RM), p, RM);
                // t = sign(theta) / (|theta| + sqrt(theta^2 + 1))
                let root = theta
                    .mul(&theta, p, RM)
                    .add(&one, p, RM)
                    .sqrt(p, RM);
                let mut t = one.div(&theta.abs().add(&root, p, RM), p, RM);
                if theta.is_negative() {
                    t = t.neg();
                }
                let c = one.div(&t.mul(&t, p, RM).add(&one, p, RM).sqrt(p, RM), p, RM);
                let s_rot = t.mul(&c, p, RM);

                let t_apq = t.mul(&apq, p, RM);
                a[pi][pi] = a[pi][pi].sub(&t_apq, p, RM);
                a[qi][qi] = a[qi][qi].add(&t_apq, p, RM);
                a[pi][qi] = BigFloat::from_words(&[0], astro_float::Sign::Pos, 0);
                a[qi][pi] = a[pi][qi].clone();
                for i in 0..n {
                    if i == pi || i == qi {
                        continue;
                    }
                    let aip = a[i][pi].clone();
                    let aiq = a[i][qi].clone();
                    let new_p = c.mul(&aip, p, RM).sub(&s_rot.mul(&aiq, p, RM), p, RM);
                    let new_q = s_rot.mul(&aip, p, RM).add(&c.mul(&aiq, p, RM), p, RM);
                    a[i][pi] = new_p.clone();
                    a[pi][i] = new_p;
                    a[i][qi] = new_q.clone();
                    a[qi][i] = new_q;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i].clone()).collect()
}
