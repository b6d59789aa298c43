//! Named algebras, modules and graded models used throughout the crate.

use std::sync::Arc;

use crate::algebra::{KvAlgebra, KvModule, Tensor3};
use crate::rat::{r, Rat};

/// Affine group algebra: `e1 e2 = e2`, every other product zero.
pub fn aff() -> KvAlgebra {
    KvAlgebra::from_entries(2, &[(0, 1, 1, r(1))]).named("aff")
}

/// One-dimensional idempotent algebra `e e = e`.
pub fn assoc1() -> KvAlgebra {
    KvAlgebra::from_entries(1, &[(0, 0, 0, r(1))]).named("assoc1")
}

/// `n`-dimensional algebra with zero product.
pub fn zero(n: usize) -> KvAlgebra {
    KvAlgebra::zero(n).named(format!("zero{n}"))
}

/// Commutative nilpotent algebra `e1 e1 = e2`.
pub fn nil2() -> KvAlgebra {
    KvAlgebra::from_entries(2, &[(0, 0, 1, r(1))]).named("nil2")
}

/// `e1 e1 = e1`, `e1 e2 = e2`: associative, `e1` is a left unit.
pub fn left_unit2() -> KvAlgebra {
    KvAlgebra::from_entries(2, &[(0, 0, 0, r(1)), (0, 1, 1, r(1))]).named("left_unit2")
}

/// `e1 e1 = -e1`, `e2 e2 = e2`: a product of two idempotent lines
/// admitting the right identity `H = -e1 + e2`.
pub fn radiant2() -> KvAlgebra {
    KvAlgebra::from_entries(2, &[(0, 0, 0, r(-1)), (1, 1, 1, r(1))]).named("radiant2")
}

/// Non-associative KV algebra `e1 e1 = 2 e1`, `e1 e2 = e2`, `e2 e1 = 0`,
/// `e2 e2 = e1`.
pub fn lsa2() -> KvAlgebra {
    KvAlgebra::from_entries(
        2,
        &[(0, 0, 0, r(2)), (0, 1, 1, r(1)), (1, 1, 0, r(1))],
    )
    .named("lsa2")
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "aff",
    "assoc1",
    "zero1",
    "zero2",
    "zero3",
    "nil2",
    "left_unit2",
    "radiant2",
    "lsa2",
];

pub fn by_name(name: &str) -> Option<KvAlgebra> {
    Some(match name {
        "aff" => aff(),
        "assoc1" => assoc1(),
        "nil2" => nil2(),
        "left_unit2" => left_unit2(),
        "radiant2" => radiant2(),
        "lsa2" => lsa2(),
        _ => {
            let n: usize = name.strip_prefix("zero")?.parse().ok()?;
            zero(n)
        }
    })
}

/// One-dimensional left module `a w = lambda(a) w`. It is a KV-module
/// exactly when `lambda` vanishes on commutators.
pub fn character_module(algebra: Arc<KvAlgebra>, lambda: &[Rat]) -> KvModule {
    let n = algebra.dim();
    let mut left = Tensor3::zeros(n, 1, 1);
    for (i, l) in lambda.iter().enumerate() {
        left.set(i, 0, 0, l.clone());
    }
    KvModule::new(algebra, left, Tensor3::zeros(1, n, 1)).expect("character shapes")
}

/// The module for the radiant example: `radiant2` acting on a line with
/// `e1 -> 0`, `e2 -> 2`.
pub fn radiant2_module() -> KvModule {
    character_module(Arc::new(radiant2()), &[r(0), r(2)])
}

/// A parallel 2-cochain for [`radiant2_module`]: `g(e2, e2) = 1`.
pub fn radiant2_parallel() -> Vec<Rat> {
    vec![r(0), r(0), r(0), r(1)]
}

/// Truncated polynomial model: `aff` acting on `W = span{1, u, u^2}` by
/// `e1 -> u d/du` and `e2 -> u^2 d/du`, truncated above degree two.
pub fn poly_module() -> KvModule {
    let a = Arc::new(aff());
    let mut left = Tensor3::zeros(2, 3, 3);
    left.set(0, 1, 1, r(1));
    left.set(0, 2, 2, r(2));
    left.set(1, 1, 2, r(1));
    KvModule::new(a, left, Tensor3::zeros(3, 2, 3)).expect("poly shapes")
}

/// Truncated product on `span{1, u, u^2}`.
pub fn poly_theta() -> Tensor3 {
    let mut t = Tensor3::zeros(3, 3, 3);
    for i in 0..3 {
        for j in 0..3 {
            if i + j < 3 {
                t.set(i, j, i + j, r(1));
            }
        }
    }
    t
}

/// Companion `psi : A x W -> A` with `psi(a, 1) = a` and `psi(e1, u) = e2`.
/// Stored as `[a][w][k]`.
pub fn poly_psi() -> Tensor3 {
    let mut t = Tensor3::zeros(2, 3, 2);
    t.set(0, 0, 0, r(1));
    t.set(1, 0, 1, r(1));
    t.set(0, 1, 1, r(1));
    t
}
