//! Seeded invariant battery. Each instance draws its random data from its
//! own seed (see [`instance_seed`]), so a failure can be replayed alone.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{KvModule, Tensor3};
use crate::cochain::Cochain;
use crate::complex::{KvComplex, Variant};
use crate::deform::{curvature_check, kv_bracket, kv_defect};
use crate::ext::{algebra_extension, bigrade, is_homogeneous, Semidirect};
use crate::graded::{self, is_kv_chain};
use crate::linalg::Mat;
use crate::random::{self, small_vec, KvRng};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invariant {
    DeltaSquared,
    DegreeZeroBridge,
    Functoriality,
    BidegreeLaw,
    BracketBridge,
    SelfBracket,
    CenterInJacobi,
    CommutatorJacobi,
    ModuleRoundTrip,
    AlgebraRoundTrip,
    CurvatureIdentity,
    GradedEquivalence,
}

impl Invariant {
    pub const ALL: [Invariant; 12] = [
        Invariant::DeltaSquared,
        Invariant::DegreeZeroBridge,
        Invariant::Functoriality,
        Invariant::BidegreeLaw,
        Invariant::BracketBridge,
        Invariant::SelfBracket,
        Invariant::CenterInJacobi,
        Invariant::CommutatorJacobi,
        Invariant::ModuleRoundTrip,
        Invariant::AlgebraRoundTrip,
        Invariant::CurvatureIdentity,
        Invariant::GradedEquivalence,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub invariant: Invariant,
    pub instance_seed: u64,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub count: usize,
    pub mutant: bool,
    pub tallies: BTreeMap<Invariant, Tally>,
    pub failures: Vec<Failure>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, witness: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(witness())
    }
}

fn err(e: crate::Error) -> String {
    format!("error: {e}")
}

fn complex(w: &KvModule, variant: Variant) -> std::result::Result<KvComplex, String> {
    Ok(KvComplex::new(w.clone()).map_err(err)?.with_variant(variant))
}

fn random_cochain(g: &mut KvRng, n: usize, m: usize, q: usize) -> Cochain {
    let len = n.pow(q as u32) * m;
    Cochain::from_values(n, m, q, small_vec(g, len)).expect("length matches")
}

/// `d d f = 0` on a random module and on the regular bimodule, `q` in
/// `1..=2`. The witness is a failing basis cochain of lowest degree.
pub fn check_delta_squared(g: &mut KvRng, variant: Variant) -> Check {
    let a = Arc::new(random::random_kv_with(g, 3));
    let w = random::random_module(g, &a, 3);
    let q = g.gen_range(1..=2);
    delta_squared_on(g, &w, q, variant)?;
    delta_squared_on(g, &a.regular_bimodule(), q, variant)
}

fn delta_squared_on(g: &mut KvRng, w: &KvModule, q: usize, variant: Variant) -> Check {
    let a = w.algebra();
    let f = random_cochain(g, a.dim(), w.dim(), q);
    let cx = complex(w, variant)?;
    let dd = cx.coboundary(&cx.coboundary(&f).map_err(err)?).map_err(err)?;
    if dd.is_zero() {
        return Ok(());
    }
    // Shrink: a basis cochain of the lowest degree that still fails.
    for q in 1..=q {
        for idx in 0..a.dim().pow(q as u32) * w.dim() {
            let mut v = vec![Rat::zero(); a.dim().pow(q as u32) * w.dim()];
            v[idx] = Rat::one();
            let e = Cochain::from_values(a.dim(), w.dim(), q, v).expect("length");
            let dd = cx.coboundary(&cx.coboundary(&e).map_err(err)?).map_err(err)?;
            if let Some(t) = dd.first_nonzero() {
                return Err(format!(
                    "n={} m={} q={q} basis cochain {idx}: dd nonzero at {t:?}",
                    a.dim(),
                    w.dim()
                ));
            }
        }
    }
    Err(format!("n={} m={} q={q}: dd f nonzero", a.dim(), w.dim()))
}

/// `(d d w)(a,b) = -(a,b,w)` for arbitrary `w`, and `d d w = 0` on `J(W)`.
pub fn check_degree_zero(g: &mut KvRng) -> Check {
    let a = Arc::new(random::random_kv_with(g, 3));
    let w = random::random_module(g, &a, 3);
    let cx = complex(&w, Variant::Normative)?;
    let x = small_vec(g, w.dim());
    let d1 = cx.coboundary0_unchecked(&x).map_err(err)?;
    let dd = cx.coboundary(&d1).map_err(err)?;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let neg: Vec<Rat> = assoc_left(&w, i, j, &x).iter().map(|v| -v).collect();
            if dd.at(&[i, j]) != neg.as_slice() {
                return Err(format!("(dd w)({i},{j}) != -(a,b,w)"));
            }
        }
    }
    for v in w.jacobi().basis() {
        let dd = cx.coboundary(&cx.coboundary0(v).map_err(err)?).map_err(err)?;
        ensure(dd.is_zero(), || "dd w != 0 for w in J(W)".into())?;
    }
    Ok(())
}

fn assoc_left(w: &KvModule, i: usize, j: usize, x: &[Rat]) -> Vec<Rat> {
    let a = w.algebra();
    let (ei, ej) = (a.basis(i), a.basis(j));
    let ab = a.mul(&ei, &ej).expect("shape");
    let l = w.act_left(&ab, x).expect("shape");
    let r = w.act_left(&ei, &w.act_left(&ej, x).expect("shape")).expect("shape");
    l.iter().zip(&r).map(|(p, q)| p - q).collect()
}

/// `d(phi o f) = phi o d f` for a module map `phi : W -> W'`.
pub fn check_functoriality(g: &mut KvRng) -> Check {
    let a = Arc::new(random::random_kv_with(g, 3));
    let w = random::random_module(g, &a, 2);
    let extra = random::random_module(g, &a, 2);
    let sum = w.direct_sum(&extra).map_err(err)?;
    let p = random::invertible(g, sum.dim());
    let target = sum.conjugate(&p).map_err(err)?;
    let mut incl = Mat::zeros(sum.dim(), w.dim());
    for i in 0..w.dim() {
        incl[(i, i)] = Rat::one();
    }
    let phi = p.mul(&incl).map_err(err)?;
    let q = g.gen_range(1..=2);
    let f = random_cochain(g, a.dim(), w.dim(), q);
    let lhs = complex(&target, Variant::Normative)?
        .coboundary(&f.map_values(&phi).map_err(err)?)
        .map_err(err)?;
    let rhs = complex(&w, Variant::Normative)?
        .coboundary(&f)
        .map_err(err)?
        .map_values(&phi)
        .map_err(err)?;
    ensure(lhs == rhs, || format!("q={q}: d(phi f) != phi(d f)"))
}

/// `d` maps the `(p,q)` component on `A (+) W` into `(p, q+1)`.
pub fn check_bidegree(g: &mut KvRng) -> Check {
    let a = Arc::new(random::random_kv_with(g, 2));
    let w = random::random_module(g, &a, 2);
    let v = random::random_module(g, &a, 2);
    let s = Semidirect::new(&w, &v).map_err(err)?;
    let big = s.n() + s.m();
    let k = g.gen_range(1..=2);
    let f = random_cochain(g, big, s.k(), k);
    for part in bigrade(&f, s.n()) {
        let d = s.complex().coboundary(&part.cochain).map_err(err)?;
        if !is_homogeneous(&d, s.n(), part.p) {
            return Err(format!("component ({},{}) leaves its row", part.p, part.q));
        }
    }
    Ok(())
}

/// `d_{mu_0} nu = d nu` over a verified base.
pub fn check_bracket_bridge(g: &mut KvRng) -> Check {
    let a = Arc::new(random::random_kv_with(g, 3));
    let n = a.dim();
    let nu = random::random_tensor(g, n, n, n);
    let cx = complex(&a.regular_bimodule(), Variant::Normative)?;
    let lhs = kv_bracket(a.product(), &nu).map_err(err)?;
    let rhs = cx.coboundary(&Cochain::from_bilinear(&nu)).map_err(err)?;
    ensure(lhs == rhs, || format!("n={n}: d_mu0 nu != d nu"))
}

/// `d_mu mu = 2[(a,b,c)_mu - (b,a,c)_mu]` for arbitrary `mu`.
pub fn check_self_bracket(g: &mut KvRng) -> Check {
    let n = g.gen_range(1..=3);
    let mu = random::random_tensor(g, n, n, n);
    let lhs = kv_bracket(&mu, &mu).map_err(err)?;
    let rhs = kv_defect(&mu).map_err(err)?.scale(&Rat::from_int(2));
    ensure(lhs == rhs, || format!("n={n}: d_mu mu != 2 defect"))
}

pub fn check_center(g: &mut KvRng) -> Check {
    let a = random::random_kv_with(g, 3);
    let j = a.jacobi().map_err(err)?;
    ensure(a.center().is_subspace_of(&j).map_err(err)?, || "center not in J(A)".into())
}

/// The commutator satisfies the Jacobi identity.
pub fn check_commutator(g: &mut KvRng) -> Check {
    let a = random::random_kv_with(g, 3);
    let n = a.dim();
    let br = a.lie_bracket();
    let bra = |x: &[Rat], y: &[Rat]| crate::deform::bilinear(&br, x, y);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (a.basis(i), a.basis(j), a.basis(k));
                let t1 = bra(&x, &bra(&y, &z));
                let t2 = bra(&y, &bra(&z, &x));
                let t3 = bra(&z, &bra(&x, &y));
                if t1.iter().zip(&t2).zip(&t3).any(|((p, q), r)| !(p + q + r).is_zero()) {
                    return Err(format!("Jacobi fails at ({i},{j},{k})"));
                }
            }
        }
    }
    Ok(())
}

/// cocycle -> module extension -> canonical section -> cocycle, and a
/// shifted section stays in the same class.
pub fn check_module_round_trip(g: &mut KvRng) -> Check {
    let a = Arc::new(random::random_kv_with(g, 2));
    let w = random::random_module(g, &a, 2);
    let v = random::random_module(g, &a, 2);
    let s = Semidirect::new(&w, &v).map_err(err)?;
    let z = s.e11_matrix(1).map_err(err)?.kernel();
    let mut coords = vec![Rat::zero(); s.e11_matrix(0).map_err(err)?.rows()];
    for b in z.basis() {
        let c = random::small_rat(g);
        for (x, y) in coords.iter_mut().zip(b) {
            *x += &c * y;
        }
    }
    let f = s.e11_cochain(1, &coords).map_err(err)?;
    let ext = s.module_extension(&f).map_err(err)?;
    let back = s.cocycle_from_section(&ext, &ext.canonical_section()).map_err(err)?;
    ensure(back.cochain == f, || "canonical section does not return f".into())?;
    let phi = crate::ext::theta_from_coords(&small_vec(g, s.k() * s.m()), s.k(), s.m());
    let mut sigma = ext.canonical_section();
    let ip = ext.injection().mul(&phi).map_err(err)?;
    for r in 0..sigma.rows() {
        for c in 0..sigma.cols() {
            sigma[(r, c)] += &ip[(r, c)];
        }
    }
    let shifted = s.cocycle_from_section(&ext, &sigma).map_err(err)?.cochain;
    ensure(s.extensions_equivalent(&f, &shifted).map_err(err)?, || {
        "shifted section left the class".into()
    })?;
    let other = s.module_extension(&shifted).map_err(err)?;
    ensure(ext.equivalence_shear(&other).map_err(err)?.is_some(), || {
        "no shear between cohomologous extensions".into()
    })
}

/// omega -> algebra extension -> canonical section -> omega, with the KV
/// residual of the total equal to `d omega`.
pub fn check_algebra_round_trip(g: &mut KvRng) -> Check {
    let a = Arc::new(random::random_kv_with(g, 2));
    let w = random::random_module(g, &a, 2);
    let (n, m) = (a.dim(), w.dim());
    let cx = complex(&w, Variant::Normative)?;
    let z = cx.coboundary_matrix(2).map_err(err)?.kernel();
    let mut omega = Cochain::zero(n, m, 2);
    for b in z.basis() {
        let c = random::small_rat(g);
        omega = omega.add(&Cochain::from_values(n, m, 2, b.clone()).expect("len").scale(&c));
    }
    let ext = algebra_extension(&w, &omega).map_err(err)?;
    ensure(ext.total.is_kv(), || "cocycle extension is not KV".into())?;
    ensure(ext.kv_residual().is_zero(), || "residual nonzero".into())?;
    let back = ext.cocycle_from_section(&ext.canonical_section()).map_err(err)?;
    ensure(back == omega, || "canonical section does not return omega".into())?;
    let psi = random_cochain(g, n, m, 1);
    let shifted = omega.add(&cx.coboundary(&psi).map_err(err)?);
    let other = algebra_extension(&w, &shifted).map_err(err)?;
    ensure(ext.equivalence_shear(&other).map_err(err)?.is_some(), || {
        "no shear between cohomologous algebra extensions".into()
    })
}

/// `R_direct - R_comm = -d S` for random symmetric `S`.
pub fn check_curvature(g: &mut KvRng) -> Check {
    let a = Arc::new(random::random_kv_with(g, 3));
    let n = a.dim();
    let raw = random::random_tensor(g, n, n, n);
    let mut s = Tensor3::zeros(n, n, n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s.set(i, j, k, raw.get(i, j, k) + raw.get(j, i, k));
            }
        }
    }
    let rep = curvature_check(&a, &s).map_err(err)?;
    ensure(rep.identity_holds, || format!("n={n}: curvature residual != -d S"))
}

/// `G_theta` is KV iff theta is a derivation cocycle and a KV-chain.
pub fn check_graded(g: &mut KvRng) -> Check {
    let (gr, theta) = graded::random_instance(g);
    let kv = gr.deform(&theta).map_err(err)?.is_kv();
    let expected = gr.is_theta_cocycle(&theta).map_err(err)? && is_kv_chain(&theta).map_err(err)?;
    ensure(kv == expected, || format!("is_kv(G_theta) = {kv}, conditions = {expected}"))?;
    let (lower, upper) = gr.jacobi_inclusions().map_err(err)?;
    ensure(lower && upper, || "J(G) grading inclusions fail".into())
}

pub fn run_check(inv: Invariant, g: &mut KvRng, variant: Variant) -> Check {
    match inv {
        Invariant::DeltaSquared => check_delta_squared(g, variant),
        Invariant::DegreeZeroBridge => check_degree_zero(g),
        Invariant::Functoriality => check_functoriality(g),
        Invariant::BidegreeLaw => check_bidegree(g),
        Invariant::BracketBridge => check_bracket_bridge(g),
        Invariant::SelfBracket => check_self_bracket(g),
        Invariant::CenterInJacobi => check_center(g),
        Invariant::CommutatorJacobi => check_commutator(g),
        Invariant::ModuleRoundTrip => check_module_round_trip(g),
        Invariant::AlgebraRoundTrip => check_algebra_round_trip(g),
        Invariant::CurvatureIdentity => check_curvature(g),
        Invariant::GradedEquivalence => check_graded(g),
    }
}

/// Instance seed for `(seed, index, invariant)`.
pub fn instance_seed(seed: u64, index: usize, inv: Invariant) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
        .wrapping_mul(31)
        .wrapping_add(inv as u64)
}

pub fn run(seed: u64, count: usize, variant: Variant) -> BatteryReport {
    run_selected(seed, count, variant, &Invariant::ALL)
}

pub fn run_selected(seed: u64, count: usize, variant: Variant, which: &[Invariant]) -> BatteryReport {
    let mut tallies = BTreeMap::new();
    let mut failures = Vec::new();
    for &inv in which {
        let mut tally = Tally { passed: 0, failed: 0 };
        for i in 0..count {
            let s = instance_seed(seed, i, inv);
            let mut g = random::rng(s);
            match run_check(inv, &mut g, variant) {
                Ok(()) => tally.passed += 1,
                Err(witness) => {
                    tally.failed += 1;
                    failures.push(Failure {
                        invariant: inv,
                        instance_seed: s,
                        witness,
                    });
                }
            }
        }
        tallies.insert(inv, tally);
    }
    BatteryReport {
        seed,
        count,
        mutant: variant != Variant::Normative,
        tallies,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_instance_passes() {
        let rep = run(0, 1, Variant::Normative);
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.tallies.len(), Invariant::ALL.len());
    }

    #[test]
    fn deterministic() {
        assert_eq!(run(3, 2, Variant::Normative), run(3, 2, Variant::Normative));
    }

    #[test]
    fn mutant_is_caught() {
        let rep = run_selected(0, 10, Variant::FlippedRightTerm, &[Invariant::DeltaSquared]);
        assert!(!rep.passed());
        assert!(rep.failures[0].witness.contains("dd"));
    }
}
