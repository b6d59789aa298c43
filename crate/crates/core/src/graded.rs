//! Z/2-graded KV-algebras `G = A (+) W` with `W` an odd left module
//! (`W A = 0`), connectionlike pairs and their deformations.
//!
//! Coordinates on `G` put `A` first (`0..n`) and `W` after (`n..n+m`).

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{semidirect, unflatten, KvAlgebra, KvModule, Tensor3};
use crate::cochain::Cochain;
use crate::complex::KvComplex;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::{Mat, Subspace};
use crate::random::{self, KvRng};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedKvAlgebra {
    odd: KvModule,
    total: Arc<KvAlgebra>,
}

impl GradedKvAlgebra {
    /// `odd` must be a left KV-module with zero right action.
    pub fn new(odd: KvModule) -> Result<Self> {
        odd.algebra().require_kv()?;
        if !odd.right().is_zero() {
            return Err(Error::Precondition("odd part must satisfy W A = 0".into()));
        }
        odd.require_module()?;
        let total = Arc::new(semidirect(&odd));
        total.require_kv()?;
        Ok(GradedKvAlgebra { odd, total })
    }

    pub fn even(&self) -> &Arc<KvAlgebra> {
        self.odd.algebra()
    }

    pub fn odd(&self) -> &KvModule {
        &self.odd
    }

    /// `(a,w)(a',w') = (aa', aw')`.
    pub fn total(&self) -> &Arc<KvAlgebra> {
        &self.total
    }

    pub fn n(&self) -> usize {
        self.even().dim()
    }

    pub fn m(&self) -> usize {
        self.odd.dim()
    }

    pub fn complex(&self) -> Result<KvComplex> {
        KvComplex::new(self.total.regular_bimodule())
    }

    fn parity(&self, i: usize) -> usize {
        usize::from(i >= self.n())
    }

    /// `(r, s, p)` pieces of a `G`-valued cochain: `r` even arguments, `s` odd
    /// arguments, value parity `p`. Only nonzero pieces are listed.
    pub fn components(&self, f: &Cochain) -> Vec<(usize, usize, usize, Cochain)> {
        let q = f.degree();
        let mut out = Vec::new();
        for s in 0..=q {
            for p in 0..2 {
                let c = self.graded_component(f, q - s, s, p);
                if !c.is_zero() {
                    out.push((q - s, s, p, c));
                }
            }
        }
        out
    }

    pub fn graded_component(&self, f: &Cochain, r: usize, s: usize, p: usize) -> Cochain {
        let big = self.n() + self.m();
        let q = f.degree();
        let mut out = Cochain::zero(big, f.value_dim(), q);
        if r + s != q {
            return out;
        }
        let mut args = vec![0usize; q];
        for t in 0..big.pow(q as u32) {
            unflatten(t, big, &mut args);
            let odd = args.iter().filter(|&&i| i >= self.n()).count();
            if odd != s {
                continue;
            }
            let v: Vec<Rat> = f
                .at(&args)
                .iter()
                .enumerate()
                .map(|(k, x)| if self.parity(k) == p { x.clone() } else { Rat::zero() })
                .collect();
            out.set(&args, &v);
        }
        out
    }

    /// `theta : W x W -> W` as a `G`-valued 2-cochain.
    pub fn theta_cochain(&self, theta: &Tensor3) -> Result<Cochain> {
        let (n, m) = (self.n(), self.m());
        if theta.dims() != [m, m, m] {
            return Err(Error::DimensionMismatch("theta must be m x m x m".into()));
        }
        Ok(Cochain::from_fn(n + m, n + m, 2, |t| {
            let mut v = vec![Rat::zero(); n + m];
            if t[0] >= n && t[1] >= n {
                for (k, x) in theta.fiber(t[0] - n, t[1] - n).iter().enumerate() {
                    v[n + k] = x.clone();
                }
            }
            v
        }))
    }

    /// First triple violating `a theta(w,w') = theta(aw,w') + theta(w,aw')`.
    pub fn derivation_violation(&self, theta: &Tensor3) -> Result<Option<(usize, usize, usize)>> {
        let (n, m) = (self.n(), self.m());
        if theta.dims() != [m, m, m] {
            return Err(Error::DimensionMismatch("theta must be m x m x m".into()));
        }
        let a = self.even();
        for i in 0..n {
            let e = a.basis(i);
            for x in 0..m {
                for y in 0..m {
                    let lhs = self.odd.act_left(&e, theta.fiber(x, y))?;
                    let r1 = bil(theta, self.odd.basis_left(i, x), &unit(m, y));
                    let r2 = bil(theta, &unit(m, x), self.odd.basis_left(i, y));
                    if lhs.iter().zip(&r1).zip(&r2).any(|((l, p), q)| l != &(p + q)) {
                        return Ok(Some((i, x, y)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Whether `theta` is a KV-cocycle of `G`. The derivation rule and the
    /// general coboundary are both evaluated and must agree.
    pub fn is_theta_cocycle(&self, theta: &Tensor3) -> Result<bool> {
        let direct = self.derivation_violation(theta)?.is_none();
        let general = self.complex()?.is_cocycle(&self.theta_cochain(theta)?)?;
        if direct != general {
            return Err(Error::Precondition(
                "derivation rule and coboundary disagree on theta".into(),
            ));
        }
        Ok(direct)
    }

    /// `(a,w)(a',w') = (aa', aw' + theta(w,w'))`.
    pub fn deform(&self, theta: &Tensor3) -> Result<KvAlgebra> {
        let (n, m) = (self.n(), self.m());
        if theta.dims() != [m, m, m] {
            return Err(Error::DimensionMismatch("theta must be m x m x m".into()));
        }
        let mut t = self.total.product().clone();
        for x in 0..m {
            for y in 0..m {
                for (k, c) in theta.fiber(x, y).iter().enumerate() {
                    t.set(n + x, n + y, n + k, c.clone());
                }
            }
        }
        KvAlgebra::new(t)
    }

    pub fn pair_cochain(&self, pair: &ConnectionlikePair) -> Result<Cochain> {
        let (n, m) = (self.n(), self.m());
        pair.check_shapes(n, m)?;
        let mut c = self.theta_cochain(&pair.theta)?;
        for i in 0..n {
            for al in 0..m {
                let mut v = vec![Rat::zero(); n + m];
                for (k, x) in pair.psi.fiber(i, al).iter().enumerate() {
                    v[k] = x.clone();
                }
                c.set(&[i, n + al], &v);
                c.set(&[n + al, i], &v);
            }
        }
        Ok(c)
    }

    pub fn is_connectionlike(&self, pair: &ConnectionlikePair) -> Result<ConnectionlikeReport> {
        let (n, m) = (self.n(), self.m());
        pair.check_shapes(n, m)?;
        let a = self.even();
        let (theta, psi) = (&pair.theta, &pair.psi);
        // psi(x, w) for x in A given by coordinates.
        let psi_a = |x: &[Rat], w: usize| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); n];
            for (i, c) in x.iter().enumerate() {
                if !c.is_zero() {
                    for (o, v) in out.iter_mut().zip(psi.fiber(i, w)) {
                        *o += c * v;
                    }
                }
            }
            out
        };
        let psi_w = |i: usize, y: &[Rat]| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); n];
            for (w, c) in y.iter().enumerate() {
                if !c.is_zero() {
                    for (o, v) in out.iter_mut().zip(psi.fiber(i, w)) {
                        *o += c * v;
                    }
                }
            }
            out
        };
        let mut c3_definition = true;
        let mut c3_proof = true;
        for i in 0..n {
            for x in 0..m {
                for y in 0..m {
                    // psi(theta(w,w'), a) = psi(w, psi(w', a)) with w = x, w' = y.
                    let lhs = psi_w(i, theta.fiber(x, y));
                    if lhs != psi_a(&psi_a(&a.basis(i), y), x) {
                        c3_definition = false;
                    }
                    // psi(a, theta(w', w'')) = psi(psi(a, w'), w'') with w' = x, w'' = y.
                    if lhs != psi_a(&psi_a(&a.basis(i), x), y) {
                        c3_proof = false;
                    }
                }
            }
        }
        let mut system2 = true;
        for i in 0..n {
            let e = a.basis(i);
            for j in 0..n {
                for w in 0..m {
                    let lhs = a.mul(&e, psi.fiber(j, w))?;
                    let r1 = psi_a(a.basis_mul(i, j), w);
                    let r2 = psi_w(j, self.odd.basis_left(i, w));
                    if lhs.iter().zip(&r1).zip(&r2).any(|((l, p), q)| l != &(p + q)) {
                        system2 = false;
                    }
                }
            }
        }
        let c2 = self.is_theta_cocycle(theta)?;
        let cocycle = self.complex()?.is_cocycle(&self.pair_cochain(pair)?)?;
        Ok(ConnectionlikeReport {
            c1_symmetric: true,
            c2_theta_cocycle: c2,
            c3_definition,
            c3_proof,
            system1: c2,
            system2,
            system3: c3_proof,
            pair_is_cocycle: cocycle,
            kv_chain: is_kv_chain(theta)?,
            degenerate: theta.is_zero() && psi.is_zero(),
        })
    }

    /// Extracts `(theta, psi)` from a 2-cochain on `G` when it has only the
    /// `W x W -> W` and mixed `A`-valued components, `psi` is symmetric,
    /// `d c = 0` and `theta` is a KV-chain.
    pub fn connectionlike_from_cocycle(
        &self,
        c: &Cochain,
    ) -> Result<std::result::Result<ConnectionlikePair, Rejection>> {
        let (n, m) = (self.n(), self.m());
        if c.degree() != 2 || c.arg_dim() != n + m || c.value_dim() != n + m {
            return Err(Error::DimensionMismatch("expected a 2-cochain of G with values in G".into()));
        }
        let allowed = |r: usize, s: usize, p: usize| (r, s, p) == (0, 2, 1) || (r, s, p) == (1, 1, 0);
        for (r, s, p, _) in self.components(c) {
            if !allowed(r, s, p) {
                return Ok(Err(Rejection::ExtraComponent { r, s, p }));
            }
        }
        let mut theta = Tensor3::zeros(m, m, m);
        let mut psi = Tensor3::zeros(n, m, n);
        for x in 0..m {
            for y in 0..m {
                for k in 0..m {
                    theta.set(x, y, k, c.at(&[n + x, n + y])[n + k].clone());
                }
            }
        }
        for i in 0..n {
            for al in 0..m {
                if c.at(&[i, n + al]) != c.at(&[n + al, i]) {
                    return Ok(Err(Rejection::AsymmetricPsi { a: i, w: al }));
                }
                for k in 0..n {
                    psi.set(i, al, k, c.at(&[i, n + al])[k].clone());
                }
            }
        }
        if let Some(t) = self.complex()?.coboundary(c)?.first_nonzero() {
            return Ok(Err(Rejection::NotCocycle { witness: t }));
        }
        if let Some(t) = kv_chain_violation(&theta)? {
            return Ok(Err(Rejection::NotKvChain { witness: t }));
        }
        Ok(Ok(ConnectionlikePair { theta, psi }))
    }

    /// Dimension of the exact 2-cochains of `G` supported on the
    /// connectionlike components with `psi` symmetric.
    pub fn exact_connectionlike_dim(&self) -> Result<usize> {
        let (n, m) = (self.n(), self.m());
        let big = n + m;
        let cx = self.complex()?;
        let image = cx.coboundary_matrix(1)?.image();
        let mut support = Vec::new();
        let cell = |a: usize, b: usize, k: usize| (a * big + b) * big + k;
        for x in 0..m {
            for y in 0..m {
                for k in 0..m {
                    let mut v = vec![Rat::zero(); big * big * big];
                    v[cell(n + x, n + y, n + k)] = Rat::one();
                    support.push(v);
                }
            }
        }
        for i in 0..n {
            for al in 0..m {
                for k in 0..n {
                    let mut v = vec![Rat::zero(); big * big * big];
                    v[cell(i, n + al, k)] = Rat::one();
                    v[cell(n + al, i, k)] = Rat::one();
                    support.push(v);
                }
            }
        }
        let shaped = Subspace::span(big * big * big, &support)?;
        Ok(image.intersect(&shaped)?.dim())
    }

    /// Whether the pair's cochain is a coboundary in `C(G, G)`.
    pub fn is_exact(&self, pair: &ConnectionlikePair) -> Result<bool> {
        Ok(self.complex()?.is_coboundary(&self.pair_cochain(pair)?)?.is_some())
    }

    /// `J(W)` placed in the odd coordinates of `G`.
    pub fn jacobi_odd(&self) -> Result<Subspace> {
        let (n, m) = (self.n(), self.m());
        let vecs: Vec<Vec<Rat>> = self
            .odd
            .jacobi()
            .basis()
            .iter()
            .map(|v| {
                let mut out = vec![Rat::zero(); n];
                out.extend(v.iter().cloned());
                out
            })
            .collect();
        Subspace::span(n + m, &vecs)
    }

    /// `J(A) (+) J(W)` inside `G`.
    pub fn jacobi_split(&self) -> Result<Subspace> {
        let (n, m) = (self.n(), self.m());
        let even: Vec<Vec<Rat>> = self
            .even()
            .jacobi()?
            .basis()
            .iter()
            .map(|v| {
                let mut out = v.clone();
                out.extend(std::iter::repeat_n(Rat::zero(), m));
                out
            })
            .collect();
        Subspace::span(n + m, &even)?.sum(&self.jacobi_odd()?)
    }

    /// Checks `J(W) <= J(G) <= J(A) (+) J(W)`.
    pub fn jacobi_inclusions(&self) -> Result<(bool, bool)> {
        let jg = self.total.jacobi()?;
        Ok((
            self.jacobi_odd()?.is_subspace_of(&jg)?,
            jg.is_subspace_of(&self.jacobi_split()?)?,
        ))
    }
}

/// `theta : W x W -> W` with `psi : A x W -> A` stored as `[a][w][k]` and
/// read symmetrically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionlikePair {
    pub theta: Tensor3,
    pub psi: Tensor3,
}

impl ConnectionlikePair {
    fn check_shapes(&self, n: usize, m: usize) -> Result<()> {
        if self.theta.dims() != [m, m, m] || self.psi.dims() != [n, m, n] {
            return Err(Error::DimensionMismatch(format!(
                "theta must be {m}x{m}x{m} and psi {n}x{m}x{n}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionlikeReport {
    pub c1_symmetric: bool,
    pub c2_theta_cocycle: bool,
    /// `psi(theta(w,w'),a) = psi(w,psi(w',a))`.
    pub c3_definition: bool,
    /// `psi(a,theta(w',w'')) = psi(psi(a,w'),w'')`.
    pub c3_proof: bool,
    pub system1: bool,
    /// `a psi(a',w) - psi(aa',w) - psi(a',aw) = 0`.
    pub system2: bool,
    pub system3: bool,
    /// The combined cochain is a cocycle of `G`.
    pub pair_is_cocycle: bool,
    pub kv_chain: bool,
    pub degenerate: bool,
}

impl ConnectionlikeReport {
    pub fn holds(&self) -> bool {
        self.c1_symmetric && self.c2_theta_cocycle && self.c3_definition && self.c3_proof
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Rejection {
    ExtraComponent { r: usize, s: usize, p: usize },
    AsymmetricPsi { a: usize, w: usize },
    NotCocycle { witness: Vec<usize> },
    NotKvChain { witness: [usize; 3] },
}

fn unit(m: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); m];
    v[i] = Rat::one();
    v
}

fn bil(t: &Tensor3, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    crate::deform::bilinear(t, x, y)
}

/// First triple where `(w,w',w'')_theta != (w',w,w'')_theta`.
pub fn kv_chain_violation(theta: &Tensor3) -> Result<Option<[usize; 3]>> {
    let [m, m1, m2] = theta.dims();
    if m != m1 || m != m2 {
        return Err(Error::DimensionMismatch("theta must be m x m x m".into()));
    }
    let assoc = |x: usize, y: usize, z: usize| -> Vec<Rat> {
        let l = bil(theta, theta.fiber(x, y), &unit(m, z));
        let r = bil(theta, &unit(m, x), theta.fiber(y, z));
        l.iter().zip(&r).map(|(a, b)| a - b).collect()
    };
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if assoc(x, y, z) != assoc(y, x, z) {
                    return Ok(Some([x, y, z]));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_kv_chain(theta: &Tensor3) -> Result<bool> {
    Ok(kv_chain_violation(theta)?.is_none())
}

/// `aff` acting on `span{1, u, u^2}` with the truncated product and the
/// companion `psi`.
pub fn fixture() -> (GradedKvAlgebra, ConnectionlikePair) {
    let g = GradedKvAlgebra::new(fixtures::poly_module()).expect("fixture is graded");
    let pair = ConnectionlikePair {
        theta: fixtures::poly_theta(),
        psi: fixtures::poly_psi(),
    };
    (g, pair)
}

/// The linear space of KV-cocycles `theta`, as flattened `m x m x m` tables.
pub fn theta_cocycles(g: &GradedKvAlgebra) -> Result<Subspace> {
    let (n, m) = (g.n(), g.m());
    let dim = m * m * m;
    let mut cols = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mut v = vec![Rat::zero(); dim];
        v[idx] = Rat::one();
        let theta = Tensor3::from_values([m, m, m], v)?;
        let mut col = Vec::with_capacity(n * m * m * m);
        for i in 0..n {
            let e = g.even().basis(i);
            for x in 0..m {
                for y in 0..m {
                    let lhs = g.odd().act_left(&e, theta.fiber(x, y))?;
                    let r1 = bil(&theta, g.odd().basis_left(i, x), &unit(m, y));
                    let r2 = bil(&theta, &unit(m, x), g.odd().basis_left(i, y));
                    col.extend(lhs.iter().zip(&r1).zip(&r2).map(|((l, p), q)| l - p - q));
                }
            }
        }
        cols.push(col);
    }
    if dim == 0 || n == 0 {
        return Ok(Subspace::full(dim));
    }
    Ok(Mat::from_cols(n * m * m * m, &cols)?.kernel())
}

/// A random graded algebra together with a candidate `theta`: either an
/// arbitrary small table or a combination of derivation cocycles.
pub fn random_instance(g: &mut KvRng) -> (GradedKvAlgebra, Tensor3) {
    use rand::Rng;
    let a = Arc::new(random::random_kv_with(g, 2));
    let w = random::random_left_module(g, &a, 2);
    let gr = GradedKvAlgebra::new(w).expect("left modules give graded algebras");
    let m = gr.m();
    let cocycles = theta_cocycles(&gr).expect("shapes");
    let theta = match g.gen_range(0..3) {
        0 => random::random_tensor(g, m, m, m),
        _ if cocycles.dim() == 0 => Tensor3::zeros(m, m, m),
        1 => {
            let b = &cocycles.basis()[g.gen_range(0..cocycles.dim())];
            Tensor3::from_values([m, m, m], b.clone()).expect("shape")
        }
        _ => {
            let mut v = vec![Rat::zero(); m * m * m];
            for b in cocycles.basis() {
                let c = random::small_rat(g);
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &c * y;
                }
            }
            Tensor3::from_values([m, m, m], v).expect("shape")
        }
    };
    (gr, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, r};

    #[test]
    fn deformation_equivalence_random() {
        let mut g = random::rng(77);
        let (mut yes, mut no) = (0, 0);
        for _ in 0..30 {
            let (gr, theta) = random_instance(&mut g);
            let kv = gr.deform(&theta).unwrap().is_kv();
            let expected = gr.is_theta_cocycle(&theta).unwrap() && is_kv_chain(&theta).unwrap();
            assert_eq!(kv, expected);
            if kv {
                yes += 1;
            } else {
                no += 1;
            }
            assert_eq!(gr.jacobi_inclusions().unwrap(), (true, true));
        }
        assert!(yes > 0 && no > 0, "{yes} {no}");
    }

    #[test]
    fn fixture_pair_is_connectionlike() {
        let (g, pair) = fixture();
        let rep = g.is_connectionlike(&pair).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert!(rep.system1 && rep.system2 && rep.system3);
        assert!(rep.pair_is_cocycle && rep.kv_chain && !rep.degenerate);
        for t in [r(1), r(-1), q(1, 2)] {
            assert!(g.deform(&pair.theta.scale(&t)).unwrap().is_kv());
        }
    }

    #[test]
    fn zero_pair_is_degenerate() {
        let (g, _) = fixture();
        let pair = ConnectionlikePair {
            theta: Tensor3::zeros(3, 3, 3),
            psi: Tensor3::zeros(2, 3, 2),
        };
        let rep = g.is_connectionlike(&pair).unwrap();
        assert!(rep.holds() && rep.degenerate);
        assert_eq!(g.deform(&pair.theta).unwrap(), *g.total().as_ref());
    }

    #[test]
    fn extraction_round_trip() {
        let (g, pair) = fixture();
        let c = g.pair_cochain(&pair).unwrap();
        assert_eq!(g.connectionlike_from_cocycle(&c).unwrap().unwrap(), pair);
        let mut bad = c.clone();
        bad.set(&[0, 0], &[r(1), r(0), r(0), r(0), r(0)]);
        assert!(matches!(
            g.connectionlike_from_cocycle(&bad).unwrap(),
            Err(Rejection::ExtraComponent { r: 2, s: 0, p: 0 })
        ));
        let mut asym = c;
        asym.set(&[0, 2], &[r(5), r(0), r(0), r(0), r(0)]);
        assert!(matches!(
            g.connectionlike_from_cocycle(&asym).unwrap(),
            Err(Rejection::AsymmetricPsi { .. })
        ));
    }

    #[test]
    fn components_sum_back() {
        let (g, _) = fixture();
        let mut rng = random::rng(3);
        let f = Cochain::from_values(5, 5, 2, random::small_vec(&mut rng, 125)).unwrap();
        let mut sum = Cochain::zero(5, 5, 2);
        for (r, s, _, c) in g.components(&f) {
            assert_eq!(r + s, 2);
            sum = sum.add(&c);
        }
        assert_eq!(sum, f);
    }

    #[test]
    fn jacobi_inclusions_on_fixture() {
        let (g, _) = fixture();
        assert_eq!(g.jacobi_inclusions().unwrap(), (true, true));
    }

    #[test]
    fn exact_pairs_on_fixture() {
        let (g, pair) = fixture();
        // The truncation admits one exact pair: theta(u,u) = u^2 = d b with
        // b(u) = -e2.
        assert_eq!(g.exact_connectionlike_dim().unwrap(), 1);
        let mut theta = Tensor3::zeros(3, 3, 3);
        theta.set(1, 1, 2, r(1));
        let exact = ConnectionlikePair {
            theta,
            psi: Tensor3::zeros(2, 3, 2),
        };
        assert!(g.is_exact(&exact).unwrap());
        assert!(g.is_connectionlike(&exact).unwrap().holds());
        assert!(!g.is_exact(&pair).unwrap());
    }

    #[test]
    fn kv_chain_search() {
        // A commutative associative product is a KV-chain; some small
        // integer tables are not.
        assert!(is_kv_chain(&fixtures::poly_theta()).unwrap());
        let mut found = None;
        'outer: for code in 0..3usize.pow(8) {
            let mut t = Tensor3::zeros(2, 2, 2);
            let mut c = code;
            for idx in 0..8 {
                let v = (c % 3) as i64 - 1;
                c /= 3;
                t.set(idx / 4, (idx / 2) % 2, idx % 2, r(v));
            }
            if let Some(w) = kv_chain_violation(&t).unwrap() {
                found = Some((t, w));
                break 'outer;
            }
        }
        assert!(found.is_some());
    }
}
