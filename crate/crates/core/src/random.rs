//! Seeded generators for algebras, modules and cochains.
//!
//! Algebras are drawn only from constructions that preserve the KV identity
//! (catalog entries, direct sums, semidirect products, basis changes), and
//! every output is re-checked before it is returned.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{semidirect, KvAlgebra, KvModule, Tensor3};
use crate::fixtures;
use crate::linalg::Mat;
use crate::rat::{q, r, Rat};

pub type KvRng = ChaCha8Rng;

pub fn rng(seed: u64) -> KvRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn catalog(n_max: usize) -> Vec<KvAlgebra> {
    [
        fixtures::aff(),
        fixtures::assoc1(),
        fixtures::zero(1),
        fixtures::zero(2),
        fixtures::nil2(),
        fixtures::left_unit2(),
        fixtures::radiant2(),
        fixtures::lsa2(),
    ]
    .into_iter()
    .filter(|a| a.dim() <= n_max.max(1))
    .collect()
}

/// Small rational: mostly integers in `[-2, 2]`, occasionally halves.
pub fn small_rat(rng: &mut KvRng) -> Rat {
    let n = rng.gen_range(-2i64..=2);
    if rng.gen_bool(0.2) {
        q(n, 2)
    } else {
        r(n)
    }
}

pub fn small_vec(rng: &mut KvRng, len: usize) -> Vec<Rat> {
    (0..len).map(|_| small_rat(rng)).collect()
}

/// Random invertible matrix: a product of a unit lower and a unit upper
/// triangular matrix with small entries, times a diagonal of `+-1, +-2`.
pub fn invertible(rng: &mut KvRng, n: usize) -> Mat {
    let mut lo = Mat::identity(n);
    let mut up = Mat::identity(n);
    for i in 0..n {
        for j in 0..i {
            lo[(i, j)] = r(rng.gen_range(-1i64..=1));
            up[(j, i)] = r(rng.gen_range(-1i64..=1));
        }
        up[(i, i)] = r(*[-2i64, -1, 1, 2].choose(rng).expect("nonempty"));
    }
    lo.mul(&up).expect("square")
}

/// A verified KV algebra of dimension at most `n_max` (at least 1).
/// Seed 0 returns the `aff` fixture unchanged.
pub fn random_kv(seed: u64, n_max: usize) -> KvAlgebra {
    if seed == 0 && n_max >= 2 {
        return fixtures::aff();
    }
    let mut g = rng(seed);
    random_kv_with(&mut g, n_max)
}

pub fn random_kv_with(g: &mut KvRng, n_max: usize) -> KvAlgebra {
    let n_max = n_max.max(1);
    let cat = catalog(n_max);
    let mut a = cat.choose(g).expect("catalog nonempty").clone();
    let steps = g.gen_range(0..=2);
    for _ in 0..steps {
        let room = n_max - a.dim();
        match g.gen_range(0..3) {
            0 if room > 0 => {
                let fitting: Vec<&KvAlgebra> = cat.iter().filter(|b| b.dim() <= room).collect();
                if let Some(b) = fitting.choose(g) {
                    a = a.direct_sum(b);
                }
            }
            1 if room >= a.dim() => {
                let arc = Arc::new(a.clone());
                let w = if g.gen_bool(0.5) {
                    arc.regular_bimodule()
                } else {
                    arc.regular_left_module()
                };
                a = semidirect(&w);
            }
            1 if room > 0 => {
                let arc = Arc::new(a.clone());
                a = semidirect(&KvModule::zero(arc, g.gen_range(1..=room)));
            }
            _ => {
                let phi = invertible(g, a.dim());
                a = a.change_basis(&phi).expect("invertible");
            }
        }
    }
    let phi = invertible(g, a.dim());
    let out = a.change_basis(&phi).expect("invertible");
    assert!(out.is_kv(), "generator produced a non-KV algebra");
    out
}

/// Random verified bimodule of dimension at most `m_max` (at least 1).
pub fn random_module(g: &mut KvRng, a: &Arc<KvAlgebra>, m_max: usize) -> KvModule {
    let m_max = m_max.max(1);
    let n = a.dim();
    let mut parts: Vec<KvModule> = Vec::new();
    let mut dim = 0;
    loop {
        let room = m_max - dim;
        let choice = g.gen_range(0..5);
        let part = match choice {
            0 if n <= room => a.regular_bimodule(),
            1 if n <= room => a.regular_left_module(),
            2 => random_character(g, a),
            3 if n <= room => a.regular_bimodule().left_part(),
            _ => KvModule::zero(a.clone(), 1),
        };
        dim += part.dim();
        parts.push(part);
        if dim >= m_max || g.gen_bool(0.4) {
            break;
        }
    }
    let mut w = parts[0].clone();
    for p in &parts[1..] {
        w = w.direct_sum(p).expect("same algebra");
    }
    let p = invertible(g, w.dim());
    let out = w.conjugate(&p).expect("invertible");
    assert!(out.is_module(), "generator produced a non-module");
    out
}

/// Random verified left module (right action zero).
pub fn random_left_module(g: &mut KvRng, a: &Arc<KvAlgebra>, m_max: usize) -> KvModule {
    let m_max = m_max.max(1);
    let n = a.dim();
    let mut w = random_character(g, a);
    while w.dim() < m_max && g.gen_bool(0.6) {
        let part = if n + w.dim() <= m_max && g.gen_bool(0.5) {
            a.regular_left_module()
        } else {
            random_character(g, a)
        };
        w = w.direct_sum(&part).expect("same algebra");
    }
    let p = invertible(g, w.dim());
    let out = w.conjugate(&p).expect("invertible");
    debug_assert!(out.is_module() && out.is_left_module());
    out
}

/// One-dimensional left module from a random functional vanishing on
/// commutators.
pub fn random_character(g: &mut KvRng, a: &Arc<KvAlgebra>) -> KvModule {
    let n = a.dim();
    let br = a.lie_bracket();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            rows.push(br.fiber(i, j).to_vec());
        }
    }
    // Functionals vanishing on every [e_i, e_j].
    let ann = Mat::from_rows(rows).expect("uniform").kernel();
    let mut lambda = vec![Rat::zero(); n];
    for b in ann.basis() {
        let c = r(g.gen_range(-2i64..=2));
        for (x, y) in lambda.iter_mut().zip(b) {
            *x += &c * y;
        }
    }
    fixtures::character_module(a.clone(), &lambda)
}

pub fn random_tensor(g: &mut KvRng, d0: usize, d1: usize, d2: usize) -> Tensor3 {
    let data = small_vec(g, d0 * d1 * d2);
    Tensor3::from_values([d0, d1, d2], data).expect("sized")
}

/// Arbitrary (generally non-KV) bilinear product on `F^n`.
pub fn random_bilinear(g: &mut KvRng, n: usize) -> Tensor3 {
    random_tensor(g, n, n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_zero_is_fixture() {
        assert_eq!(random_kv(0, 3), fixtures::aff());
    }

    #[test]
    fn deterministic_and_verified() {
        for seed in 0..40 {
            let a = random_kv(seed, 3);
            assert!(a.dim() <= 3 && a.dim() >= 1);
            assert!(a.is_kv());
            assert_eq!(a, random_kv(seed, 3));
        }
    }

    #[test]
    fn modules_verified() {
        let mut g = rng(7);
        for _ in 0..20 {
            let a = Arc::new(random_kv_with(&mut g, 3));
            let w = random_module(&mut g, &a, 3);
            assert!(w.dim() <= 3 && w.is_module());
            let l = random_left_module(&mut g, &a, 3);
            assert!(l.is_left_module() && l.is_module());
        }
    }

    #[test]
    fn invertible_is_invertible() {
        let mut g = rng(1);
        for n in 0..5 {
            assert!(invertible(&mut g, n).inverse().is_some());
        }
    }
}
