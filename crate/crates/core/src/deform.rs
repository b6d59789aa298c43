//! Formal deformations `mu_t = mu_0 + t mu_1 + t^2 mu_2 + ...` of a
//! KV-algebra product.
//!
//! The order-`k` coefficient of `(a,b,c)_t - (b,a,c)_t` is the residual
//! `E_k`; a jet is a KV family through order `K` when `E_1 = ... = E_K = 0`.
//! With the bracket `d_mu nu` these residuals split as
//! `E_k = d mu_k + 1/2 sum_{i+j=k, i,j>0} d_{mu_i} mu_j`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{KvAlgebra, Tensor3};
use crate::cochain::Cochain;
use crate::complex::KvComplex;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rat::{q, Rat};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 4;

/// `t(x, y)` for a bilinear tensor `t[i][j][k]`.
pub fn bilinear(t: &Tensor3, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let [d0, d1, d2] = t.dims();
    let mut out = vec![Rat::zero(); d2];
    for i in 0..d0 {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..d1 {
            if y[j].is_zero() {
                continue;
            }
            let c = &x[i] * &y[j];
            for (o, v) in out.iter_mut().zip(t.fiber(i, j)) {
                if !v.is_zero() {
                    *o += &c * v;
                }
            }
        }
    }
    out
}

fn basis(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[i] = Rat::one();
    v
}

fn check_square(t: &Tensor3) -> Result<usize> {
    let [a, b, c] = t.dims();
    if a != b || b != c {
        return Err(Error::DimensionMismatch("bilinear map must be n x n x n".into()));
    }
    Ok(a)
}

fn add_into(out: &mut [Rat], sign: i64, v: &[Rat]) {
    for (o, x) in out.iter_mut().zip(v) {
        if sign > 0 {
            *o += x;
        } else {
            *o -= x;
        }
    }
}

/// The eight-term bracket
///
/// ```text
/// d_mu nu(a,b,c) = -mu(a,nu(b,c)) + nu(mu(a,b),c) + nu(b,mu(a,c)) - mu(nu(b,a),c)
///                  + mu(b,nu(a,c)) - nu(mu(b,a),c) - nu(a,mu(b,c)) + mu(nu(a,b),c)
/// ```
///
/// as a 3-cochain with values in `|A|`.
pub fn kv_bracket(mu: &Tensor3, nu: &Tensor3) -> Result<Cochain> {
    let n = check_square(mu)?;
    if check_square(nu)? != n {
        return Err(Error::DimensionMismatch("bracket arguments differ in size".into()));
    }
    Ok(Cochain::from_fn(n, n, 3, |t| {
        let (a, b, c) = (basis(n, t[0]), basis(n, t[1]), basis(n, t[2]));
        let mut out = vec![Rat::zero(); n];
        add_into(&mut out, -1, &bilinear(mu, &a, &bilinear(nu, &b, &c)));
        add_into(&mut out, 1, &bilinear(nu, &bilinear(mu, &a, &b), &c));
        add_into(&mut out, 1, &bilinear(nu, &b, &bilinear(mu, &a, &c)));
        add_into(&mut out, -1, &bilinear(mu, &bilinear(nu, &b, &a), &c));
        add_into(&mut out, 1, &bilinear(mu, &b, &bilinear(nu, &a, &c)));
        add_into(&mut out, -1, &bilinear(nu, &bilinear(mu, &b, &a), &c));
        add_into(&mut out, -1, &bilinear(nu, &a, &bilinear(mu, &b, &c)));
        add_into(&mut out, 1, &bilinear(mu, &bilinear(nu, &a, &b), &c));
        out
    }))
}

/// `(a,b,c)_mu - (b,a,c)_mu` for an arbitrary bilinear `mu`.
pub fn kv_defect(mu: &Tensor3) -> Result<Cochain> {
    let n = check_square(mu)?;
    Ok(Cochain::from_fn(n, n, 3, |t| {
        let (a, b, c) = (basis(n, t[0]), basis(n, t[1]), basis(n, t[2]));
        let mut out = vec![Rat::zero(); n];
        add_into(&mut out, 1, &bilinear(mu, &bilinear(mu, &a, &b), &c));
        add_into(&mut out, -1, &bilinear(mu, &a, &bilinear(mu, &b, &c)));
        add_into(&mut out, -1, &bilinear(mu, &bilinear(mu, &b, &a), &c));
        add_into(&mut out, 1, &bilinear(mu, &b, &bilinear(mu, &a, &c)));
        out
    }))
}

/// A truncated formal family of products over a fixed KV base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    base: Arc<KvAlgebra>,
    coefficients: Vec<Tensor3>,
}

impl Jet {
    pub fn new(base: Arc<KvAlgebra>, coefficients: Vec<Tensor3>) -> Result<Self> {
        base.require_kv()?;
        let n = base.dim();
        if coefficients.iter().any(|t| t.dims() != [n, n, n]) {
            return Err(Error::DimensionMismatch(format!(
                "jet coefficients must be {n} x {n} x {n}"
            )));
        }
        Ok(Jet { base, coefficients })
    }

    pub fn base(&self) -> &Arc<KvAlgebra> {
        &self.base
    }

    pub fn coefficients(&self) -> &[Tensor3] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// `mu_k`, with `mu_0` the base product and zero beyond the order.
    pub fn mu(&self, k: usize) -> Tensor3 {
        let n = self.base.dim();
        match k {
            0 => self.base.product().clone(),
            _ => self
                .coefficients
                .get(k - 1)
                .cloned()
                .unwrap_or_else(|| Tensor3::zeros(n, n, n)),
        }
    }

    pub fn push(&mut self, mu: Tensor3) -> Result<()> {
        let n = self.base.dim();
        if mu.dims() != [n, n, n] {
            return Err(Error::DimensionMismatch("jet coefficient shape".into()));
        }
        self.coefficients.push(mu);
        Ok(())
    }

    /// The product `mu_0 + t mu_1 + ... ` at a rational `t`.
    pub fn evaluate(&self, t: &Rat) -> Tensor3 {
        let mut out = self.base.product().clone();
        let mut pow = Rat::one();
        for c in &self.coefficients {
            pow = &pow * t;
            out = out.add(&c.scale(&pow));
        }
        out
    }

    fn complex(&self) -> Result<KvComplex> {
        KvComplex::new(self.base.regular_bimodule())
    }

    /// `E_k` by direct expansion of the order-`k` coefficient.
    pub fn residual(&self, k: usize) -> Cochain {
        let n = self.base.dim();
        let mus: Vec<Tensor3> = (0..=k).map(|i| self.mu(i)).collect();
        Cochain::from_fn(n, n, 3, |t| {
            let (a, b, c) = (basis(n, t[0]), basis(n, t[1]), basis(n, t[2]));
            let mut out = vec![Rat::zero(); n];
            for i in 0..=k {
                let (mi, mj) = (&mus[i], &mus[k - i]);
                add_into(&mut out, 1, &bilinear(mi, &bilinear(mj, &a, &b), &c));
                add_into(&mut out, -1, &bilinear(mi, &a, &bilinear(mj, &b, &c)));
                add_into(&mut out, -1, &bilinear(mi, &bilinear(mj, &b, &a), &c));
                add_into(&mut out, 1, &bilinear(mi, &b, &bilinear(mj, &a, &c)));
            }
            out
        })
    }

    /// `sum_{i+j=k, i,j>0} d_{mu_i} mu_j`.
    pub fn bracket_sum(&self, k: usize) -> Result<Cochain> {
        let n = self.base.dim();
        let mut out = Cochain::zero(n, n, 3);
        for i in 1..k {
            out = out.add(&kv_bracket(&self.mu(i), &self.mu(k - i))?);
        }
        Ok(out)
    }

    /// `E_1, ..., E_K`. Each is checked against
    /// `d mu_k + 1/2 sum d_{mu_i} mu_j`.
    pub fn residuals(&self) -> Result<Vec<Cochain>> {
        let cx = self.complex()?;
        let half = q(1, 2);
        let mut out = Vec::with_capacity(self.order());
        for k in 1..=self.order() {
            let e = self.residual(k);
            let bridge = cx
                .coboundary(&Cochain::from_bilinear(&self.mu(k)))?
                .add(&self.bracket_sum(k)?.scale(&half));
            if bridge != e {
                return Err(Error::Precondition(format!(
                    "order {k} residual disagrees with its bracket expansion"
                )));
            }
            out.push(e);
        }
        Ok(out)
    }

    /// First order `k` with `E_k != 0`, with a witness triple.
    pub fn first_failure(&self) -> Result<Option<(usize, Vec<usize>)>> {
        for (i, e) in self.residuals()?.iter().enumerate() {
            if let Some(w) = e.first_nonzero() {
                return Ok(Some((i + 1, w)));
            }
        }
        Ok(None)
    }

    pub fn is_kv_family(&self) -> Result<bool> {
        Ok(self.first_failure()?.is_none())
    }

    /// Attempts to extend a KV family of order `k - 1` by one term.
    pub fn solve_next_order(&self) -> Result<NextOrder> {
        if let Some((order, witness)) = self.first_failure()? {
            return Err(Error::Precondition(format!(
                "lower residual E_{order} is nonzero at {witness:?}"
            )));
        }
        let k = self.order() + 1;
        let cx = self.complex()?;
        let residual = self.bracket_sum(k)?.scale(&q(-1, 2));
        let d_residual = cx.coboundary(&residual)?;
        let solution = cx.is_coboundary(&residual)?.map(|c| c.to_bilinear());
        let obstruction = match solution {
            Some(_) => None,
            None => Some(obstruction_certificate(&cx, &residual)?),
        };
        Ok(NextOrder {
            order: k,
            residual_is_cocycle: d_residual.is_zero(),
            residual,
            solution,
            obstruction,
        })
    }
}

/// A row vector `y` with `y * d = 0` on 2-cochains and `y . R != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub functional: Vec<Rat>,
    pub pairing: Rat,
}

impl Obstruction {
    /// Re-checks the certificate against the complex.
    pub fn verify(&self, cx: &KvComplex, residual: &Cochain) -> Result<bool> {
        let d = cx.coboundary_matrix(2)?;
        let killed = d.transpose().mul_vec(&self.functional)?.iter().all(Rat::is_zero);
        let pairing: Rat = self
            .functional
            .iter()
            .zip(residual.values())
            .map(|(a, b)| a * b)
            .sum();
        Ok(killed && !pairing.is_zero() && pairing == self.pairing)
    }
}

fn obstruction_certificate(cx: &KvComplex, residual: &Cochain) -> Result<Obstruction> {
    let d = cx.coboundary_matrix(2)?;
    let left_kernel = d.transpose().kernel();
    for y in left_kernel.basis() {
        let pairing: Rat = y.iter().zip(residual.values()).map(|(a, b)| a * b).sum();
        if !pairing.is_zero() {
            return Ok(Obstruction {
                functional: y.clone(),
                pairing,
            });
        }
    }
    Err(Error::Precondition("residual lies in the image of d".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NextOrder {
    pub order: usize,
    /// `R_k = -1/2 sum_{i+j=k, i,j>0} d_{mu_i} mu_j`.
    pub residual: Cochain,
    /// Whether `d R_k = 0`; reported, not assumed.
    pub residual_is_cocycle: bool,
    /// Some `mu_k` with `d mu_k = R_k`.
    pub solution: Option<Tensor3>,
    pub obstruction: Option<Obstruction>,
}

/// `phi_t = 1 + t theta_1 + ... + t^K theta_K` acting on the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    pub thetas: Vec<Mat>,
}

impl Flow {
    pub fn order(&self) -> usize {
        self.thetas.len()
    }

    fn coef(&self, n: usize, k: usize) -> Mat {
        match k {
            0 => Mat::identity(n),
            _ => self.thetas.get(k - 1).cloned().unwrap_or_else(|| Mat::zeros(n, n)),
        }
    }

    /// Coefficients `eta_0 = 1, eta_1, ..., eta_K` of `phi_t^{-1}`, from
    /// `eta_k = -sum_{j=1..k} theta_j eta_{k-j}`.
    pub fn inverse(&self, n: usize) -> Result<Vec<Mat>> {
        let mut eta = vec![Mat::identity(n)];
        for k in 1..=self.order() {
            let mut acc = Mat::zeros(n, n);
            for j in 1..=k {
                let p = self.coef(n, j).mul(&eta[k - j])?;
                acc = mat_sub(&acc, &p);
            }
            eta.push(acc);
        }
        Ok(eta)
    }
}

fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] -= &b[(i, j)];
        }
    }
    out
}

/// The jet of `phi_t(phi_t^{-1}(a) phi_t^{-1}(b))` through the flow's order.
pub fn pushforward_jet(flow: &Flow, base: Arc<KvAlgebra>) -> Result<Jet> {
    let n = base.dim();
    if flow.thetas.iter().any(|t| t.rows() != n || t.cols() != n) {
        return Err(Error::DimensionMismatch("flow coefficients must be n x n".into()));
    }
    let eta = flow.inverse(n)?;
    let mu0 = base.product();
    let mut coefficients = Vec::with_capacity(flow.order());
    for k in 1..=flow.order() {
        let mut t = Tensor3::zeros(n, n, n);
        for a in 0..n {
            for b in 0..n {
                let mut out = vec![Rat::zero(); n];
                for i in 0..=k {
                    let th = flow.coef(n, i);
                    for j in 0..=k - i {
                        let l = k - i - j;
                        let x = eta[j].col(a);
                        let y = eta[l].col(b);
                        let p = th.mul_vec(&bilinear(mu0, &x, &y))?;
                        add_into(&mut out, 1, &p);
                    }
                }
                for (c, v) in out.into_iter().enumerate() {
                    t.set(a, b, c, v);
                }
            }
        }
        coefficients.push(t);
    }
    Jet::new(base, coefficients)
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub dim_c2: usize,
    pub dim_z2: usize,
    pub dim_b2: usize,
    pub dim_h2: usize,
    /// A basis of the 2-cocycles `Z_2(A, |A|)`.
    pub tangent: Vec<Cochain>,
    /// Cocycles spanning a complement of the coboundaries.
    pub classes: Vec<Cochain>,
    pub rigid: bool,
}

pub fn rigidity_report(a: &Arc<KvAlgebra>) -> Result<RigidityReport> {
    let cx = KvComplex::new(a.regular_bimodule())?;
    let n = a.dim();
    let z = cx.coboundary_matrix(2)?.kernel();
    let tangent = z
        .basis()
        .iter()
        .map(|v| Cochain::from_values(n, n, 2, v.clone()))
        .collect::<Result<Vec<_>>>()?;
    let rep = cx.cohomology(2)?;
    let d2 = rep.degree(2).expect("degree 2 computed");
    Ok(RigidityReport {
        dim_c2: d2.dim_c,
        dim_z2: d2.dim_z,
        dim_b2: d2.dim_b,
        dim_h2: d2.dim_h,
        tangent,
        classes: d2.representatives.clone(),
        rigid: d2.dim_h == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    /// `R_direct - R_comm`, indexed `(X, Y, Z)`.
    pub residual: Cochain,
    /// `d S` for the regular bimodule.
    pub delta_s: Cochain,
    /// Whether `residual = -d S` holds.
    pub identity_holds: bool,
    /// Whether `R = [S(X,-), S(Y,-)]` holds, i.e. the residual vanishes.
    pub commutator_formula_holds: bool,
}

pub fn is_symmetric(s: &Tensor3) -> bool {
    let [n, _, _] = s.dims();
    (0..n).all(|i| (0..n).all(|j| s.fiber(i, j) == s.fiber(j, i)))
}

/// Compares the curvature of `X -> mu_0(X, -) + S(X, -)` with the
/// commutator of the `S(X, -)`.
pub fn curvature_check(a: &Arc<KvAlgebra>, s: &Tensor3) -> Result<CurvatureReport> {
    a.require_kv()?;
    let n = a.dim();
    if s.dims() != [n, n, n] {
        return Err(Error::DimensionMismatch("S must be n x n x n".into()));
    }
    if !is_symmetric(s) {
        return Err(Error::Precondition("S is not symmetric".into()));
    }
    let mu = a.product().add(s);
    let br = a.lie_bracket();
    let residual = Cochain::from_fn(n, n, 3, |t| {
        let (x, y, z) = (basis(n, t[0]), basis(n, t[1]), basis(n, t[2]));
        let mut out = vec![Rat::zero(); n];
        add_into(&mut out, 1, &bilinear(&mu, &x, &bilinear(&mu, &y, &z)));
        add_into(&mut out, -1, &bilinear(&mu, &y, &bilinear(&mu, &x, &z)));
        add_into(&mut out, -1, &bilinear(&mu, &bilinear(&br, &x, &y), &z));
        add_into(&mut out, -1, &bilinear(s, &x, &bilinear(s, &y, &z)));
        add_into(&mut out, 1, &bilinear(s, &y, &bilinear(s, &x, &z)));
        out
    });
    let cx = KvComplex::new(a.regular_bimodule())?;
    let delta_s = cx.coboundary(&Cochain::from_bilinear(s))?;
    let identity_holds = residual == delta_s.neg();
    let commutator_formula_holds = residual.is_zero();
    Ok(CurvatureReport {
        residual,
        delta_s,
        identity_holds,
        commutator_formula_holds,
    })
}
