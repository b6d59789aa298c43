//! Bigraded cochains on a semidirect product and the extension theory of
//! KV-modules and KV-algebras.
//!
//! For modules `W`, `V` over `A`, the algebra `G = A (+) W` acts on `V`
//! through its `A` part. A cochain on `G` has bidegree `(p, q)` when it is
//! supported on argument tuples with exactly `p` entries from `W` and `q`
//! from `A`. The subcomplex `C_{1,*}` computes `E_1^{1,*}`, which classifies
//! module extensions `0 -> V -> T -> W -> 0`. Algebra extensions of `A` by
//! an abelian `W` are classified by `H^2(A, W)`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{semidirect, unflatten, KvAlgebra, KvModule, Tensor3};
use crate::cochain::{table_cells, Cochain};
use crate::complex::KvComplex;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Subspace};
use crate::rat::Rat;

/// A cochain on `A (+) W` together with its bidegree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bigraded {
    pub p: usize,
    pub q: usize,
    pub cochain: Cochain,
}

/// Number of tuple entries that index the `W` summand (indices `>= n`).
pub fn w_count(args: &[usize], n: usize) -> usize {
    args.iter().filter(|&&i| i >= n).count()
}

/// Splits `f` into nonzero homogeneous components, ordered by `p`.
pub fn bigrade(f: &Cochain, n: usize) -> Vec<Bigraded> {
    let k = f.degree();
    let big = f.arg_dim();
    let vd = f.value_dim();
    let mut parts: Vec<Cochain> = (0..=k).map(|_| Cochain::zero(big, vd, k)).collect();
    let mut args = vec![0usize; k];
    for t in 0..big.pow(k as u32) {
        unflatten(t, big, &mut args);
        let v = f.at(&args);
        if v.iter().any(|x| !x.is_zero()) {
            parts[w_count(&args, n)].set(&args, v);
        }
    }
    parts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(p, cochain)| Bigraded { p, q: k - p, cochain })
        .collect()
}

/// True when `f` vanishes on every tuple whose `W` count differs from `p`.
pub fn is_homogeneous(f: &Cochain, n: usize, p: usize) -> bool {
    bigrade(f, n).iter().all(|b| b.p == p)
}

/// Membership in `F^p`: every component has `W` degree at least `p`.
pub fn in_upper_filtration(f: &Cochain, n: usize, p: usize) -> bool {
    bigrade(f, n).iter().all(|b| b.p >= p)
}

/// Membership in `F_p`: every component has `W` degree at most `p`.
pub fn in_lower_filtration(f: &Cochain, n: usize, p: usize) -> bool {
    bigrade(f, n).iter().all(|b| b.p <= p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Degree {
    pub q: usize,
    pub dim_c: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    /// Cocycles spanning a complement of the coboundaries.
    pub representatives: Vec<Cochain>,
}

#[derive(Clone, Debug, Serialize)]
pub struct E1Report {
    pub degrees: Vec<E1Degree>,
}

impl E1Report {
    pub fn dims_h(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim_h).collect()
    }
}

/// The pair `(W, V)` of modules over `A`, with `G = A (+) W` acting on `V`.
#[derive(Clone, Debug)]
pub struct Semidirect {
    w: KvModule,
    v: KvModule,
    total: Arc<KvAlgebra>,
    complex: KvComplex,
}

impl Semidirect {
    pub fn new(w: &KvModule, v: &KvModule) -> Result<Self> {
        if w.algebra() != v.algebra() {
            return Err(Error::DimensionMismatch(
                "W and V must be modules over the same algebra".into(),
            ));
        }
        w.algebra().require_kv()?;
        w.require_module()?;
        v.require_module()?;
        let total = Arc::new(semidirect(w));
        let v_on_g = v.pull_back_to(total.clone())?;
        let complex = KvComplex::new(v_on_g)?;
        Ok(Semidirect {
            w: w.clone(),
            v: v.clone(),
            total,
            complex,
        })
    }

    pub fn n(&self) -> usize {
        self.w.algebra().dim()
    }

    pub fn m(&self) -> usize {
        self.w.dim()
    }

    pub fn k(&self) -> usize {
        self.v.dim()
    }

    pub fn w(&self) -> &KvModule {
        &self.w
    }

    pub fn v(&self) -> &KvModule {
        &self.v
    }

    pub fn total(&self) -> &Arc<KvAlgebra> {
        &self.total
    }

    /// The complex `C(A (+) W, V)`.
    pub fn complex(&self) -> &KvComplex {
        &self.complex
    }

    pub fn bigrade(&self, f: &Cochain) -> Vec<Bigraded> {
        bigrade(f, self.n())
    }

    /// Flat indices of `(q+1)`-tuples on `G` with exactly one `W` entry.
    pub fn e11_tuples(&self, q: usize) -> Vec<usize> {
        let (n, big) = (self.n(), self.n() + self.m());
        let len = q + 1;
        let mut out = Vec::new();
        let mut args = vec![0usize; len];
        for t in 0..big.pow(len as u32) {
            unflatten(t, big, &mut args);
            if w_count(&args, n) == 1 {
                out.push(t);
            }
        }
        out
    }

    /// Dimension of `C_{1,q}`.
    pub fn e11_dim(&self, q: usize) -> usize {
        (q + 1) * self.n().pow(q as u32) * self.m() * self.k()
    }

    fn check_budget(&self, q: usize) -> Result<()> {
        let cells = table_cells(self.n() + self.m(), self.k(), q + 1);
        let budget = self.complex.budget();
        if cells > budget {
            return Err(Error::Budget {
                degree: q + 1,
                cells,
                budget,
            });
        }
        Ok(())
    }

    /// `theta : W -> V` given as a `k x m` matrix (column `alpha` is
    /// `theta(w_alpha)`).
    fn check_theta(&self, theta: &Mat) -> Result<()> {
        if theta.rows() != self.k() || theta.cols() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "map W -> V must be {} x {}",
                self.k(),
                self.m()
            )));
        }
        Ok(())
    }

    /// `theta` as a 1-cochain on `G` vanishing on `A`.
    pub fn lift_map(&self, theta: &Mat) -> Result<Cochain> {
        self.check_theta(theta)?;
        let n = self.n();
        Ok(Cochain::from_fn(n + self.m(), self.k(), 1, |a| {
            if a[0] < n {
                vec![Rat::zero(); theta.rows()]
            } else {
                theta.col(a[0] - n)
            }
        }))
    }

    /// `d theta(a,w) = -a theta(w) + theta(aw)` and
    /// `d theta(w,a) = theta(wa) - theta(w) a`, as a `(1,1)` cochain.
    pub fn e11_coboundary0(&self, theta: &Mat) -> Result<Bigraded> {
        self.check_theta(theta)?;
        let (n, m, k) = (self.n(), self.m(), self.k());
        let a = self.w.algebra();
        let mut c = Cochain::zero(n + m, k, 2);
        for i in 0..n {
            let e = a.basis(i);
            for al in 0..m {
                let th = theta.col(al);
                let aw = self.w.basis_left(i, al);
                let wa = self.w.basis_right(al, i);
                let a_th = self.v.act_left(&e, &th)?;
                let th_a = self.v.act_right(&th, &e)?;
                let th_aw = theta.mul_vec(aw)?;
                let th_wa = theta.mul_vec(wa)?;
                let left: Vec<Rat> = a_th.iter().zip(&th_aw).map(|(x, y)| y - x).collect();
                let right: Vec<Rat> = th_wa.iter().zip(&th_a).map(|(x, y)| x - y).collect();
                c.set(&[i, n + al], &left);
                c.set(&[n + al, i], &right);
            }
        }
        Ok(Bigraded { p: 1, q: 1, cochain: c })
    }

    /// Matrix of `d : C_{1,q} -> C_{1,q+1}` in the coordinates of
    /// [`Self::e11_tuples`]. For `q = 0` the domain is `L(W, V)` with
    /// coordinate `alpha * k + beta`.
    pub fn e11_matrix(&self, q: usize) -> Result<Mat> {
        self.check_budget(q + 1)?;
        let (m, k) = (self.m(), self.k());
        if q == 0 {
            let targets = self.e11_tuples(1);
            let mut cols = Vec::with_capacity(m * k);
            for al in 0..m {
                for be in 0..k {
                    let mut theta = Mat::zeros(k, m);
                    theta[(be, al)] = Rat::one();
                    let c = self.e11_coboundary0(&theta)?.cochain;
                    cols.push(self.coords_on(&c, &targets));
                }
            }
            return Mat::from_cols(targets.len() * k, &cols);
        }
        let sources = self.e11_tuples(q);
        let targets = self.e11_tuples(q + 1);
        Ok(self.complex.restricted_matrix(q + 1, &sources, &targets))
    }

    fn coords_on(&self, c: &Cochain, tuples: &[usize]) -> Vec<Rat> {
        let k = self.k();
        let mut out = Vec::with_capacity(tuples.len() * k);
        for &t in tuples {
            out.extend_from_slice(&c.values()[t * k..(t + 1) * k]);
        }
        out
    }

    /// Coordinates of a `(1,q)` cochain; `None` if it is not homogeneous.
    pub fn e11_coords(&self, f: &Cochain) -> Option<Vec<Rat>> {
        if f.degree() == 0 || !is_homogeneous(f, self.n(), 1) {
            return None;
        }
        Some(self.coords_on(f, &self.e11_tuples(f.degree() - 1)))
    }

    /// The `(1,q)` cochain with the given coordinates.
    pub fn e11_cochain(&self, q: usize, coords: &[Rat]) -> Result<Cochain> {
        let tuples = self.e11_tuples(q);
        let k = self.k();
        if coords.len() != tuples.len() * k {
            return Err(Error::DimensionMismatch("E1 coordinate length".into()));
        }
        let mut c = Cochain::zero(self.n() + self.m(), k, q + 1);
        let mut args = vec![0usize; q + 1];
        for (r, &t) in tuples.iter().enumerate() {
            unflatten(t, self.n() + self.m(), &mut args);
            c.set(&args, &coords[r * k..(r + 1) * k]);
        }
        Ok(c)
    }

    /// Cohomology of `C_{1,0} -> C_{1,1} -> ...` through `C_{1,q_max}`.
    pub fn e11_cohomology(&self, q_max: usize) -> Result<E1Report> {
        let mut degrees = Vec::new();
        let mut prev: Option<Subspace> = None;
        for q in 0..=q_max {
            let mat = self.e11_matrix(q)?;
            let dim_c = mat.cols();
            let z = mat.kernel();
            let b = prev.take().unwrap_or_else(|| Subspace::zero(dim_c));
            let reps = b.complement_from(z.basis())?;
            let representatives = if q == 0 {
                reps.iter()
                    .map(|x| self.lift_map(&theta_from_coords(x, self.k(), self.m())))
                    .collect::<Result<Vec<_>>>()?
            } else {
                reps.iter()
                    .map(|x| self.e11_cochain(q, x))
                    .collect::<Result<Vec<_>>>()?
            };
            degrees.push(E1Degree {
                q,
                dim_c,
                dim_z: z.dim(),
                dim_b: b.dim(),
                dim_h: z.dim() - b.dim(),
                representatives,
            });
            prev = Some(mat.image());
        }
        Ok(E1Report { degrees })
    }

    /// `theta` with `f - g = e11_coboundary0(theta)`, if one exists.
    pub fn cohomologous(&self, f: &Cochain, g: &Cochain) -> Result<Option<Mat>> {
        let diff = f.sub(g);
        let Some(coords) = self.e11_coords(&diff) else {
            return Err(Error::Precondition(
                "cochains are not of bidegree (1,1)".into(),
            ));
        };
        if diff.degree() != 2 {
            return Err(Error::Precondition("cochains are not of bidegree (1,1)".into()));
        }
        let mat = self.e11_matrix(0)?;
        Ok(mat
            .solve(&coords)?
            .map(|x| theta_from_coords(&x, self.k(), self.m())))
    }

    pub fn extensions_equivalent(&self, f: &Cochain, g: &Cochain) -> Result<bool> {
        Ok(self.cohomologous(f, g)?.is_some())
    }

    /// The cocycle system of a `(1,1)` cochain written through
    /// `theta(a,w) = f(a,w)` and `psi(a,w) = f(w,a)`:
    ///
    /// ```text
    /// -a theta(b,w) + theta(ab,w) + theta(b,aw) + b theta(a,w) - theta(ba,w) - theta(a,bw)
    /// -a psi(b,w) + psi(b,aw) + psi(ab,w) - psi(a,w) b - psi(b,wa) - theta(a,wb) + theta(a,w) b
    /// ```
    ///
    /// Returned as tables indexed `[a][b][w]` and `[a][w][b]`; both vanish
    /// exactly when `f` is a cocycle.
    pub fn cocycle_system(&self, f: &Cochain) -> Result<(Cochain, Cochain)> {
        let (n, m, k) = (self.n(), self.m(), self.k());
        if f.degree() != 2 || f.arg_dim() != n + m || f.value_dim() != k {
            return Err(Error::DimensionMismatch("expected a 2-cochain on A (+) W".into()));
        }
        let a = self.w.algebra();
        let lin = |coefs: &[Rat], g: &dyn Fn(usize) -> Vec<Rat>| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); k];
            for (i, c) in coefs.iter().enumerate() {
                if !c.is_zero() {
                    for (o, x) in out.iter_mut().zip(g(i)) {
                        *o += c * &x;
                    }
                }
            }
            out
        };
        let th = |i: usize, al: usize| f.at(&[i, n + al]).to_vec();
        let ps = |i: usize, al: usize| f.at(&[n + al, i]).to_vec();
        let th_a = |x: &[Rat], al: usize| lin(x, &|i| th(i, al));
        let th_w = |i: usize, y: &[Rat]| lin(y, &|al| th(i, al));
        let ps_a = |x: &[Rat], al: usize| lin(x, &|i| ps(i, al));
        let ps_w = |i: usize, y: &[Rat]| lin(y, &|al| ps(i, al));
        let left = |i: usize, v: &[Rat]| self.v.act_left(&a.basis(i), v);
        let right = |v: &[Rat], i: usize| self.v.act_right(v, &a.basis(i));
        let acc = |out: &mut Vec<Rat>, sign: i64, v: &[Rat]| {
            for (o, x) in out.iter_mut().zip(v) {
                if sign > 0 {
                    *o += x;
                } else {
                    *o -= x;
                }
            }
        };
        let mut first = Cochain::zero(n + m, k, 3);
        let mut second = Cochain::zero(n + m, k, 3);
        for i in 0..n {
            for j in 0..n {
                let ab = a.basis_mul(i, j);
                let ba = a.basis_mul(j, i);
                for al in 0..m {
                    let mut r = vec![Rat::zero(); k];
                    acc(&mut r, -1, &left(i, &th(j, al))?);
                    acc(&mut r, 1, &th_a(ab, al));
                    acc(&mut r, 1, &th_w(j, self.w.basis_left(i, al)));
                    acc(&mut r, 1, &left(j, &th(i, al))?);
                    acc(&mut r, -1, &th_a(ba, al));
                    acc(&mut r, -1, &th_w(i, self.w.basis_left(j, al)));
                    first.set(&[i, j, n + al], &r);

                    // second rule at (a, w, b) = (e_i, w_al, e_j)
                    let mut s = vec![Rat::zero(); k];
                    acc(&mut s, -1, &left(i, &ps(j, al))?);
                    acc(&mut s, 1, &ps_w(j, self.w.basis_left(i, al)));
                    acc(&mut s, 1, &ps_a(ab, al));
                    acc(&mut s, -1, &right(&ps(i, al), j)?);
                    acc(&mut s, -1, &ps_w(j, self.w.basis_right(al, i)));
                    acc(&mut s, -1, &th_w(i, self.w.basis_right(al, j)));
                    acc(&mut s, 1, &right(&th(i, al), j)?);
                    second.set(&[i, n + al, j], &s);
                }
            }
        }
        Ok((first, second))
    }

    /// `T = V (+) W` with `a(v,w) = (av + f(a,w), aw)` and
    /// `(v,w)a = (va + f(w,a), wa)`, with no identity checks.
    pub fn extension_total(&self, f: &Cochain) -> Result<KvModule> {
        let (n, m, k) = (self.n(), self.m(), self.k());
        if f.degree() != 2 || f.arg_dim() != n + m || f.value_dim() != k {
            return Err(Error::DimensionMismatch(
                "extension cochain must be a 2-cochain on A (+) W with values in V".into(),
            ));
        }
        let d = k + m;
        let mut left = Tensor3::zeros(n, d, d);
        let mut right = Tensor3::zeros(d, n, d);
        for i in 0..n {
            for x in 0..k {
                for y in 0..k {
                    left.set(i, x, y, self.v.left().get(i, x, y).clone());
                    right.set(x, i, y, self.v.right().get(x, i, y).clone());
                }
            }
            for al in 0..m {
                for be in 0..m {
                    left.set(i, k + al, k + be, self.w.left().get(i, al, be).clone());
                    right.set(k + al, i, k + be, self.w.right().get(al, i, be).clone());
                }
                for (y, c) in f.at(&[i, n + al]).iter().enumerate() {
                    left.set(i, k + al, y, c.clone());
                }
                for (y, c) in f.at(&[n + al, i]).iter().enumerate() {
                    right.set(k + al, i, y, c.clone());
                }
            }
        }
        KvModule::new(self.w.algebra().clone(), left, right)
    }

    /// The extension built from a `(1,1)` cocycle. A non-cocycle yields a
    /// total space failing the module identities, reported with its witness.
    pub fn module_extension(&self, f: &Cochain) -> Result<ModuleExtension> {
        if !is_homogeneous(f, self.n(), 1) {
            return Err(Error::Precondition("cochain is not of bidegree (1,1)".into()));
        }
        let total = self.extension_total(f)?;
        total.require_module()?;
        Ok(ModuleExtension {
            kernel: self.v.clone(),
            quotient: self.w.clone(),
            total,
        })
    }

    /// `f_s(a,w) = a s(w) - s(aw)`, `f_s(w,a) = s(w) a - s(wa)` for a
    /// section `s : W -> T` given as a `(k+m) x m` matrix.
    pub fn cocycle_from_section(&self, ext: &ModuleExtension, sigma: &Mat) -> Result<Bigraded> {
        let (n, m, k) = (self.n(), self.m(), self.k());
        if ext.quotient != self.w || ext.kernel != self.v {
            return Err(Error::Precondition("extension does not match (W, V)".into()));
        }
        let p = ext.projection();
        if sigma.rows() != k + m || sigma.cols() != m || p.mul(sigma)? != Mat::identity(m) {
            return Err(Error::Precondition("sigma is not a section of the projection".into()));
        }
        let a = self.w.algebra();
        let t = &ext.total;
        let mut c = Cochain::zero(n + m, k, 2);
        for i in 0..n {
            let e = a.basis(i);
            for al in 0..m {
                let s = sigma.col(al);
                let a_s = t.act_left(&e, &s)?;
                let s_aw = sigma.mul_vec(self.w.basis_left(i, al))?;
                let s_a = t.act_right(&s, &e)?;
                let s_wa = sigma.mul_vec(self.w.basis_right(al, i))?;
                let left: Vec<Rat> = a_s.iter().zip(&s_aw).map(|(x, y)| x - y).collect();
                let right: Vec<Rat> = s_a.iter().zip(&s_wa).map(|(x, y)| x - y).collect();
                if left[k..].iter().chain(&right[k..]).any(|x| !x.is_zero()) {
                    return Err(Error::Precondition(
                        "section cochain leaves the kernel; the extension is not exact".into(),
                    ));
                }
                c.set(&[i, n + al], &left[..k]);
                c.set(&[n + al, i], &right[..k]);
            }
        }
        Ok(Bigraded { p: 1, q: 1, cochain: c })
    }
}

/// `k x m` matrix from `L(W, V)` coordinates `alpha * k + beta`.
pub fn theta_from_coords(x: &[Rat], k: usize, m: usize) -> Mat {
    let mut t = Mat::zeros(k, m);
    for al in 0..m {
        for be in 0..k {
            t[(be, al)] = x[al * k + be].clone();
        }
    }
    t
}

/// `0 -> V -> T -> W -> 0` with `T = V (+) W` as vector spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleExtension {
    pub kernel: KvModule,
    pub quotient: KvModule,
    pub total: KvModule,
}

impl ModuleExtension {
    pub fn injection(&self) -> Mat {
        let (k, m) = (self.kernel.dim(), self.quotient.dim());
        let mut i = Mat::zeros(k + m, k);
        for x in 0..k {
            i[(x, x)] = Rat::one();
        }
        i
    }

    pub fn projection(&self) -> Mat {
        let (k, m) = (self.kernel.dim(), self.quotient.dim());
        let mut p = Mat::zeros(m, k + m);
        for x in 0..m {
            p[(x, k + x)] = Rat::one();
        }
        p
    }

    pub fn canonical_section(&self) -> Mat {
        self.projection().transpose()
    }

    /// Checks that the injection and projection are module maps.
    pub fn is_exact(&self) -> Result<bool> {
        let a = self.total.algebra();
        let (i, p) = (self.injection(), self.projection());
        for x in 0..a.dim() {
            let e = a.basis(x);
            for v in 0..self.kernel.dim() {
                let bv = unit(self.kernel.dim(), v);
                if i.mul_vec(&self.kernel.act_left(&e, &bv)?)?
                    != self.total.act_left(&e, &i.mul_vec(&bv)?)?
                    || i.mul_vec(&self.kernel.act_right(&bv, &e)?)?
                        != self.total.act_right(&i.mul_vec(&bv)?, &e)?
                {
                    return Ok(false);
                }
            }
            for t in 0..self.total.dim() {
                let bt = unit(self.total.dim(), t);
                if p.mul_vec(&self.total.act_left(&e, &bt)?)?
                    != self.quotient.act_left(&e, &p.mul_vec(&bt)?)?
                    || p.mul_vec(&self.total.act_right(&bt, &e)?)?
                        != self.quotient.act_right(&p.mul_vec(&bt)?, &e)?
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A shear `(v,w) -> (v + phi(w), w)` intertwining the two total
    /// modules, found by solving the intertwining equations directly.
    pub fn equivalence_shear(&self, other: &ModuleExtension) -> Result<Option<Mat>> {
        if self.kernel != other.kernel || self.quotient != other.quotient {
            return Err(Error::Precondition("extensions of different modules".into()));
        }
        let (k, m) = (self.kernel.dim(), self.quotient.dim());
        let a = self.total.algebra();
        let d = k + m;
        // Unknown phi[(x, al)] at index al * k + x. S = I + E where E maps
        // w_al to phi(w_al). Conditions: S(a.t) - a.S(t) = 0, S(t.a) - S(t).a = 0.
        let unknowns = k * m;
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        let mut rhs: Vec<Rat> = Vec::new();
        for i in 0..a.dim() {
            let e = a.basis(i);
            for t in 0..d {
                let bt = unit(d, t);
                for side in 0..2 {
                    let (src, dst_const) = if side == 0 {
                        (self.total.act_left(&e, &bt)?, other.total.act_left(&e, &bt)?)
                    } else {
                        (self.total.act_right(&bt, &e)?, other.total.act_right(&bt, &e)?)
                    };
                    // constant part: src - dst_const; linear part in phi.
                    let mut lin = vec![vec![Rat::zero(); unknowns]; d];
                    // E(src): the W part of src mapped by phi.
                    for al in 0..m {
                        let c = &src[k + al];
                        if c.is_zero() {
                            continue;
                        }
                        for x in 0..k {
                            lin[x][al * k + x] += c;
                        }
                    }
                    // - a.E(t) or - E(t).a: only when t is a W basis vector.
                    if t >= k {
                        let al = t - k;
                        for x in 0..k {
                            let bx = unit(d, x);
                            let img = if side == 0 {
                                other.total.act_left(&e, &bx)?
                            } else {
                                other.total.act_right(&bx, &e)?
                            };
                            for (y, c) in img.iter().enumerate() {
                                if !c.is_zero() {
                                    lin[y][al * k + x] -= c;
                                }
                            }
                        }
                    }
                    for y in 0..d {
                        rows.push(std::mem::take(&mut lin[y]));
                        rhs.push(&dst_const[y] - &src[y]);
                    }
                }
            }
        }
        if unknowns == 0 {
            return Ok(if rhs.iter().all(Rat::is_zero) {
                Some(Mat::zeros(k, m))
            } else {
                None
            });
        }
        let sys = Mat::from_rows(rows)?;
        Ok(sys.solve(&rhs)?.map(|x| theta_from_coords(&x, k, m)))
    }
}

fn unit(d: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); d];
    v[i] = Rat::one();
    v
}

/// `0 -> W -> T -> A -> 0` with `W` abelian; `T = W (+) A` with `W` on the
/// first coordinates and product `(w,a)(w',a') = (aw' + wa' + omega(a,a'), aa')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraExtension {
    pub kernel: KvModule,
    pub total: KvAlgebra,
}

/// Builds the extension product for any 2-cochain `omega`; the total is KV
/// exactly when `omega` is a cocycle.
pub fn algebra_extension(w: &KvModule, omega: &Cochain) -> Result<AlgebraExtension> {
    let a = w.algebra();
    let (n, m) = (a.dim(), w.dim());
    if omega.degree() != 2 || omega.arg_dim() != n || omega.value_dim() != m {
        return Err(Error::DimensionMismatch("omega must lie in C_2(A, W)".into()));
    }
    let d = m + n;
    let mut t = Tensor3::zeros(d, d, d);
    for i in 0..n {
        for j in 0..n {
            for (k, c) in a.basis_mul(i, j).iter().enumerate() {
                t.set(m + i, m + j, m + k, c.clone());
            }
            for (k, c) in omega.at(&[i, j]).iter().enumerate() {
                t.set(m + i, m + j, k, c.clone());
            }
        }
        for al in 0..m {
            for be in 0..m {
                t.set(m + i, al, be, w.left().get(i, al, be).clone());
                t.set(al, m + i, be, w.right().get(al, i, be).clone());
            }
        }
    }
    Ok(AlgebraExtension {
        kernel: w.clone(),
        total: KvAlgebra::new(t)?,
    })
}

impl AlgebraExtension {
    pub fn base(&self) -> &Arc<KvAlgebra> {
        self.kernel.algebra()
    }

    pub fn canonical_section(&self) -> Mat {
        let (n, m) = (self.base().dim(), self.kernel.dim());
        let mut s = Mat::zeros(m + n, n);
        for i in 0..n {
            s[(m + i, i)] = Rat::one();
        }
        s
    }

    pub fn projection(&self) -> Mat {
        self.canonical_section().transpose()
    }

    /// The `W` components of `(x,y,z) - (y,x,z)` on triples of base
    /// elements, as a 3-cochain in `C_3(A, W)`.
    pub fn kv_residual(&self) -> Cochain {
        let (n, m) = (self.base().dim(), self.kernel.dim());
        Cochain::from_fn(n, m, 3, |t| {
            let x = self.total.basis_associator(m + t[0], m + t[1], m + t[2]);
            let y = self.total.basis_associator(m + t[1], m + t[0], m + t[2]);
            (0..m).map(|k| &x[k] - &y[k]).collect()
        })
    }

    /// `omega(a,a') = s(a) s(a') - s(aa')` for a section `s : A -> T`.
    pub fn cocycle_from_section(&self, sigma: &Mat) -> Result<Cochain> {
        let a = self.base().clone();
        let (n, m) = (a.dim(), self.kernel.dim());
        if sigma.rows() != m + n || sigma.cols() != n || self.projection().mul(sigma)? != Mat::identity(n)
        {
            return Err(Error::Precondition("sigma is not a section of the projection".into()));
        }
        let mut c = Cochain::zero(n, m, 2);
        for i in 0..n {
            for j in 0..n {
                let prod = self.total.mul(&sigma.col(i), &sigma.col(j))?;
                let s_ab = sigma.mul_vec(a.basis_mul(i, j))?;
                let diff: Vec<Rat> = prod.iter().zip(&s_ab).map(|(x, y)| x - y).collect();
                if diff[m..].iter().any(|x| !x.is_zero()) {
                    return Err(Error::Precondition(
                        "the projection is not multiplicative".into(),
                    ));
                }
                c.set(&[i, j], &diff[..m]);
            }
        }
        Ok(c)
    }

    /// A map `phi : A -> W` such that `(w,a) -> (w + phi(a), a)` is an algebra
    /// isomorphism from `self.total` to `other.total`, solved directly from
    /// the multiplication tables.
    pub fn equivalence_shear(&self, other: &AlgebraExtension) -> Result<Option<Mat>> {
        if self.kernel != other.kernel {
            return Err(Error::Precondition("extensions by different modules".into()));
        }
        let (n, m) = (self.base().dim(), self.kernel.dim());
        let d = m + n;
        let t1 = &self.total;
        let t2 = &other.total;
        for al in 0..m {
            for be in 0..m {
                if !t2.basis_mul(al, be).iter().all(Rat::is_zero) {
                    return Err(Error::Precondition("kernel is not abelian".into()));
                }
            }
        }
        // Unknown phi[(al, i)] at index i * m + al; S = I + E, E(e_{m+i}) = phi(e_i).
        let unknowns = n * m;
        let e_img = |x: usize, u: usize| -> Vec<Rat> {
            // E_u applied to basis vector x.
            let (i, al) = (u / m.max(1), u % m.max(1));
            let mut v = vec![Rat::zero(); d];
            if x == m + i {
                v[al] = Rat::one();
            }
            v
        };
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for x in 0..d {
            for y in 0..d {
                let prod1 = t1.basis_mul(x, y);
                let prod2 = t2.basis_mul(x, y);
                // S(xy) - S(x)S(y) = 0, expanded to first order in E.
                let mut lin = vec![vec![Rat::zero(); unknowns]; d];
                for u in 0..unknowns {
                    let mut col = vec![Rat::zero(); d];
                    for (z, c) in prod1.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        for (r, v) in e_img(z, u).iter().enumerate() {
                            col[r] += c * v;
                        }
                    }
                    let ex = e_img(x, u);
                    let ey = e_img(y, u);
                    let ux = unit(d, x);
                    let uy = unit(d, y);
                    let p1 = t2.mul(&ex, &uy)?;
                    let p2 = t2.mul(&ux, &ey)?;
                    for r in 0..d {
                        col[r] -= &p1[r] + &p2[r];
                        lin[r][u] = col[r].clone();
                    }
                }
                for r in 0..d {
                    rows.push(std::mem::take(&mut lin[r]));
                    rhs.push(&prod2[r] - &prod1[r]);
                }
            }
        }
        if unknowns == 0 {
            return Ok(if rhs.iter().all(Rat::is_zero) {
                Some(Mat::zeros(m, n))
            } else {
                None
            });
        }
        let sys = Mat::from_rows(rows)?;
        Ok(sys.solve(&rhs)?.map(|x| {
            let mut phi = Mat::zeros(m, n);
            for i in 0..n {
                for al in 0..m {
                    phi[(al, i)] = x[i * m + al].clone();
                }
            }
            phi
        }))
    }
}


#[cfg(test)]
mod more_tests {
    use super::*;
    use crate::fixtures;
    use crate::random::{self, small_vec};

    #[test]
    fn cocycle_system_matches_coboundary() {
        let mut g = random::rng(31);
        for _ in 0..6 {
            let a = Arc::new(random::random_kv_with(&mut g, 2));
            let w = random::random_module(&mut g, &a, 2);
            let v = random::random_module(&mut g, &a, 2);
            let s = Semidirect::new(&w, &v).unwrap();
            let dim = s.e11_matrix(1).unwrap().cols();
            let f = s.e11_cochain(1, &small_vec(&mut g, dim)).unwrap();
            let df = s.complex().coboundary(&f).unwrap();
            let (first, second) = s.cocycle_system(&f).unwrap();
            let n = s.n();
            for i in 0..n {
                for j in 0..n {
                    for al in 0..s.m() {
                        assert_eq!(first.at(&[i, j, n + al]), df.at(&[i, j, n + al]));
                        assert_eq!(second.at(&[i, n + al, j]), df.at(&[i, n + al, j]));
                    }
                }
            }
        }
    }

    #[test]
    fn shears_agree_with_cohomology() {
        let a = Arc::new(fixtures::aff());
        let w = a.regular_bimodule();
        let s = Semidirect::new(&w, &w).unwrap();
        let rep = s.e11_cohomology(1).unwrap();
        let reps = &rep.degrees[1].representatives;
        assert!(!reps.is_empty());
        let zero = Cochain::zero(4, 2, 2);
        let split = s.module_extension(&zero).unwrap();
        let mut g = random::rng(3);
        for f in reps {
            let ext = s.module_extension(f).unwrap();
            assert!(split.equivalence_shear(&ext).unwrap().is_none());
            assert!(!s.extensions_equivalent(f, &zero).unwrap());
            let theta = theta_from_coords(&small_vec(&mut g, 4), 2, 2);
            let f2 = f.add(&s.e11_coboundary0(&theta).unwrap().cochain);
            let ext2 = s.module_extension(&f2).unwrap();
            let phi = ext.equivalence_shear(&ext2).unwrap().unwrap();
            assert!(s.extensions_equivalent(f, &f2).unwrap());
            let diff = s.e11_coboundary0(&phi).unwrap().cochain;
            assert_eq!(diff, f2.sub(f));
        }
    }
}
