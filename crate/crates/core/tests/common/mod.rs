#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use troplag_core::curve::{enumerate_topologies, internal_directions_from_leaves, Skeleton, ToricDegree};
use troplag_core::error::Error;
use troplag_core::lattice::{IntMatrix, IntVector};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn iv(c: &[i64]) -> IntVector {
    IntVector::from_i64s(c).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn random_vector(r: &mut impl Rng, bound: i64) -> [i64; 3] {
    loop {
        let v = [r.gen_range(-bound..=bound), r.gen_range(-bound..=bound), r.gen_range(-bound..=bound)];
        if v != [0, 0, 0] {
            return v;
        }
    }
}

pub fn random_primitive(r: &mut impl Rng, bound: i64) -> IntVector {
    loop {
        let v = random_vector(r, bound);
        if gcd(gcd(v[0], v[1]), v[2]) == 1 {
            return iv(&v);
        }
    }
}

/// Nonzero vectors in `[-5, 5]^3` summing to zero.
pub fn random_degree(r: &mut impl Rng, kappa: usize, bound: i64) -> ToricDegree {
    loop {
        let mut vs: Vec<[i64; 3]> = (0..kappa - 1).map(|_| random_vector(r, bound)).collect();
        let last = [0, 1, 2].map(|k| -vs.iter().map(|v| v[k]).sum::<i64>());
        if last != [0, 0, 0] && last.iter().all(|x| x.abs() <= bound) {
            vs.push(last);
            return ToricDegree { vectors: vs.iter().map(|v| iv(v)).collect() };
        }
    }
}

/// A random balanced 3-valent tree with `kappa` leaves and one line direction per leaf.
pub struct Case {
    pub skeleton: Skeleton,
    pub z: Vec<IntVector>,
}

pub fn random_case(r: &mut impl Rng, kappa: usize) -> Case {
    let topologies = enumerate_topologies(kappa);
    loop {
        let degree = random_degree(r, kappa, 5);
        let topo = &topologies[r.gen_range(0..topologies.len())];
        match internal_directions_from_leaves(topo, &degree) {
            Ok(skeleton) => {
                let z = (0..kappa).map(|_| random_primitive(r, 5)).collect();
                return Case { skeleton, z };
            }
            Err(Error::Degenerate(_)) => continue,
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}

/// Seeded corpus of `count` trees with 2 < kappa <= 6.
pub fn corpus(seed: u64, count: usize) -> Vec<Case> {
    let mut r = rng(seed);
    (0..count).map(|_| {
        let kappa = r.gen_range(3..=6);
        random_case(&mut r, kappa)
    }).collect()
}

/// Laplace expansion, for small matrices.
pub fn laplace_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * laplace_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn abs(x: &BigInt) -> BigInt {
    x.abs()
}
