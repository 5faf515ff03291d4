//! Feasibility of systems of linear equalities and (strict) inequalities over Q.
//!
//! Equalities are substituted away by Gaussian elimination, the remaining
//! inequalities by Fourier-Motzkin elimination. Dimensions in this crate are
//! at most 3 and facet counts small, so the quadratic blow-up is harmless.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `coeffs . x >= rhs`
    Ge,
    /// `coeffs . x > rhs`
    Gt,
    /// `coeffs . x == rhs`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rel: Relation,
    pub rhs: BigRational,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigRational>, rel: Relation, rhs: BigRational) -> Self {
        Constraint { coeffs, rel, rhs }
    }
}

/// Whether some `x` in Q^n satisfies every constraint.
pub fn feasible(n: usize, constraints: &[Constraint]) -> bool {
    let mut eqs: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    let mut ineqs: Vec<(Vec<BigRational>, bool, BigRational)> = Vec::new();
    for c in constraints {
        assert_eq!(c.coeffs.len(), n, "constraint dimension mismatch");
        match c.rel {
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs.clone())),
            Relation::Ge => ineqs.push((c.coeffs.clone(), false, c.rhs.clone())),
            Relation::Gt => ineqs.push((c.coeffs.clone(), true, c.rhs.clone())),
        }
    }

    // Substitute each equality into everything else.
    while let Some((a, b)) = eqs.pop() {
        let Some(k) = a.iter().position(|x| !x.is_zero()) else {
            if !b.is_zero() {
                return false;
            }
            continue;
        };
        let pivot = a[k].clone();
        let eliminate = |coeffs: &mut Vec<BigRational>, rhs: &mut BigRational| {
            if coeffs[k].is_zero() {
                return;
            }
            let f = &coeffs[k] / &pivot;
            for (c, ai) in coeffs.iter_mut().zip(&a) {
                *c -= &f * ai;
            }
            *rhs -= &f * &b;
        };
        for (c, r) in eqs.iter_mut() {
            eliminate(c, r);
        }
        for (c, _, r) in ineqs.iter_mut() {
            eliminate(c, r);
        }
    }

    for k in 0..n {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for (c, strict, r) in ineqs.drain(..) {
            if c[k].is_positive() {
                pos.push((c, strict, r));
            } else if c[k].is_negative() {
                neg.push((c, strict, r));
            } else {
                rest.push((c, strict, r));
            }
        }
        for (cp, sp, rp) in &pos {
            for (cn, sn, rn) in &neg {
                // cp/cp[k] - cn/cn[k] cancels x_k
                let fp = cp[k].recip();
                let fn_ = -cn[k].recip();
                let coeffs: Vec<BigRational> =
                    cp.iter().zip(cn).map(|(x, y)| x * &fp + y * &fn_).collect();
                let rhs = rp * &fp + rn * &fn_;
                rest.push((coeffs, *sp || *sn, rhs));
            }
        }
        rest.sort();
        rest.dedup();
        ineqs = rest;
    }

    ineqs.iter().all(|(_, strict, r)| {
        let zero = BigRational::zero();
        if *strict {
            zero > *r
        } else {
            zero >= *r
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational;

    fn c(coeffs: &[i64], rel: Relation, rhs: i64) -> Constraint {
        Constraint::new(coeffs.iter().map(|&x| rational(x, 1)).collect(), rel, rational(rhs, 1))
    }

    #[test]
    fn triangle_strata() {
        // x >= 0, y >= 0, -x - y >= -1
        let facets = [([1, 0], 0), ([0, 1], 0), ([-1, -1], -1)];
        let all = |active: &[usize]| -> Vec<Constraint> {
            facets
                .iter()
                .enumerate()
                .map(|(i, (n, a))| {
                    let rel = if active.contains(&i) { Relation::Eq } else { Relation::Gt };
                    c(n, rel, *a)
                })
                .collect()
        };
        assert!(feasible(2, &all(&[])));
        assert!(feasible(2, &all(&[0])));
        assert!(feasible(2, &all(&[0, 1])));
        assert!(!feasible(2, &all(&[0, 1, 2])));
    }

    #[test]
    fn strictness_matters() {
        assert!(feasible(1, &[c(&[1], Relation::Ge, 0), c(&[-1], Relation::Ge, 0)]));
        assert!(!feasible(1, &[c(&[1], Relation::Gt, 0), c(&[-1], Relation::Ge, 0)]));
        assert!(!feasible(2, &[c(&[1, 1], Relation::Eq, 1), c(&[1, 1], Relation::Eq, 2)]));
    }
}
