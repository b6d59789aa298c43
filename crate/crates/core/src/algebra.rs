//! KV-algebras, their bimodules, and the standard module constructions.
//!
//! An algebra is stored by structure constants: `e_i * e_j = sum_k G[i][j][k] e_k`.
//! A bimodule `W` over an `n`-dimensional algebra carries a left tensor
//! `a_i * w_a = sum_b L[i][a][b] w_b` and a right tensor
//! `w_a * a_i = sum_b R[a][i][b] w_b`.
//!
//! Neither the KV identity nor the module identities are enforced at
//! construction; candidate products that fail them are representable and are
//! rejected by [`KvAlgebra::kv_violation`] and [`KvModule::module_violation`],
//! which report the first failing basis triple in lexicographic order.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Subspace};
use crate::rat::Rat;

/// Dense three-index table of rationals, last index fastest.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<Rat>,
}

impl Tensor3 {
    pub fn zeros(d0: usize, d1: usize, d2: usize) -> Self {
        Tensor3 {
            dims: [d0, d1, d2],
            data: vec![Rat::zero(); d0 * d1 * d2],
        }
    }

    pub fn from_nested(t: Vec<Vec<Vec<Rat>>>) -> Result<Self> {
        let d0 = t.len();
        let d1 = t.first().map_or(0, Vec::len);
        let d2 = t.first().and_then(|x| x.first()).map_or(0, Vec::len);
        let mut out = Tensor3::zeros(d0, d1, d2);
        for (i, a) in t.into_iter().enumerate() {
            if a.len() != d1 {
                return Err(Error::DimensionMismatch(format!(
                    "tensor slice {i} has {} rows, expected {d1}",
                    a.len()
                )));
            }
            for (j, b) in a.into_iter().enumerate() {
                if b.len() != d2 {
                    return Err(Error::DimensionMismatch(format!(
                        "tensor fiber ({i},{j}) has length {}, expected {d2}",
                        b.len()
                    )));
                }
                for (k, x) in b.into_iter().enumerate() {
                    out.set(i, j, k, x);
                }
            }
        }
        Ok(out)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Rat>>> {
        let [d0, d1, _] = self.dims;
        (0..d0)
            .map(|i| (0..d1).map(|j| self.fiber(i, j).to_vec()).collect())
            .collect()
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.data[self.offset(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, x: Rat) {
        let o = self.offset(i, j, k);
        self.data[o] = x;
    }

    pub fn add_at(&mut self, i: usize, j: usize, k: usize, x: &Rat) {
        let o = self.offset(i, j, k);
        self.data[o] += x;
    }

    /// The vector `T[i][j][..]`.
    pub fn fiber(&self, i: usize, j: usize) -> &[Rat] {
        let o = self.offset(i, j, 0);
        &self.data[o..o + self.dims[2]]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn values(&self) -> &[Rat] {
        &self.data
    }

    pub fn from_values(dims: [usize; 3], data: Vec<Rat>) -> Result<Self> {
        if data.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {:?} tensor",
                data.len(),
                dims
            )));
        }
        Ok(Tensor3 { dims, data })
    }

    pub fn add(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, other.dims, "tensor shapes differ");
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, other.dims, "tensor shapes differ");
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }
}

impl Serialize for Tensor3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_nested().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tensor3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nested = Vec::<Vec<Vec<Rat>>>::deserialize(d)?;
        Tensor3::from_nested(nested).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor3{:?}{:?}", self.dims, self.to_nested())
    }
}

fn axpy(acc: &mut [Rat], c: &Rat, x: &[Rat]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += c * b;
        }
    }
}

fn sub_vec(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_len(what: &str, v: &[Rat], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} coordinates, expected {n}",
            v.len()
        )));
    }
    Ok(())
}

/// A finite-dimensional algebra given by structure constants.
#[derive(Clone, PartialEq, Eq)]
pub struct KvAlgebra {
    dim: usize,
    product: Tensor3,
    name: Option<String>,
}

impl fmt::Debug for KvAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KvAlgebra")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("product", &self.product.to_nested())
            .finish()
    }
}

impl KvAlgebra {
    pub fn new(product: Tensor3) -> Result<Self> {
        let [a, b, c] = product.dims();
        if a != b || b != c {
            return Err(Error::DimensionMismatch(format!(
                "product tensor has shape {a}x{b}x{c}, expected n x n x n"
            )));
        }
        Ok(KvAlgebra {
            dim: a,
            product,
            name: None,
        })
    }

    pub fn zero(n: usize) -> Self {
        KvAlgebra::new(Tensor3::zeros(n, n, n)).expect("square shape")
    }

    /// Algebra from a sparse list of `(i, j, k, c)` meaning `e_i e_j += c e_k`.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, Rat)]) -> Self {
        let mut t = Tensor3::zeros(n, n, n);
        for (i, j, k, c) in entries {
            t.add_at(*i, *j, *k, c);
        }
        KvAlgebra::new(t).expect("square shape")
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn product(&self) -> &Tensor3 {
        &self.product
    }

    /// `e_i e_j` as a coordinate vector.
    pub fn basis_mul(&self, i: usize, j: usize) -> &[Rat] {
        self.product.fiber(i, j)
    }

    pub fn mul(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        check_len("left factor", x, self.dim)?;
        check_len("right factor", y, self.dim)?;
        let mut out = vec![Rat::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                axpy(&mut out, &(xi * yj), self.basis_mul(i, j));
            }
        }
        Ok(out)
    }

    pub fn basis(&self, i: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim];
        v[i] = Rat::one();
        v
    }

    /// `(a,b,c) = (ab)c - a(bc)`.
    pub fn associator(&self, a: &[Rat], b: &[Rat], c: &[Rat]) -> Result<Vec<Rat>> {
        let ab_c = self.mul(&self.mul(a, b)?, c)?;
        let a_bc = self.mul(a, &self.mul(b, c)?)?;
        Ok(sub_vec(&ab_c, &a_bc))
    }

    pub fn basis_associator(&self, i: usize, j: usize, k: usize) -> Vec<Rat> {
        let n = self.dim;
        let mut out = vec![Rat::zero(); n];
        // (e_i e_j) e_k
        for (l, c) in self.basis_mul(i, j).iter().enumerate() {
            axpy(&mut out, c, self.basis_mul(l, k));
        }
        // - e_i (e_j e_k)
        for (l, c) in self.basis_mul(j, k).iter().enumerate() {
            axpy(&mut out, &-c, self.basis_mul(i, l));
        }
        out
    }

    /// First basis triple `(i,j,k)` with `(e_i,e_j,e_k) != (e_j,e_i,e_k)`.
    pub fn kv_violation(&self) -> Option<[usize; 3]> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.basis_associator(i, j, k) != self.basis_associator(j, i, k) {
                        return Some([i, j, k]);
                    }
                }
            }
        }
        None
    }

    pub fn is_kv(&self) -> bool {
        self.kv_violation().is_none()
    }

    pub fn is_associative(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| self.basis_associator(i, j, k).iter().all(Rat::is_zero)))
        })
    }

    pub fn require_kv(&self) -> Result<()> {
        match self.kv_violation() {
            None => Ok(()),
            Some([i, j, k]) => Err(Error::Precondition(format!(
                "algebra is not KV: (e{i},e{j},e{k}) != (e{j},e{i},e{k})"
            ))),
        }
    }

    /// Commutator bracket `[e_i, e_j] = e_i e_j - e_j e_i`.
    pub fn lie_bracket(&self) -> Tensor3 {
        let n = self.dim;
        let mut t = Tensor3::zeros(n, n, n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.set(i, j, k, self.product.get(i, j, k) - self.product.get(j, i, k));
                }
            }
        }
        t
    }

    /// Jacobi elements `J(A) = {x : (a,b,x) = 0 for all a, b}`; requires KV.
    pub fn jacobi(&self) -> Result<Subspace> {
        self.require_kv()?;
        Ok(self.jacobi_unchecked())
    }

    fn jacobi_unchecked(&self) -> Subspace {
        let n = self.dim;
        let mut rows = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                // Column l of the block is (e_i, e_j, e_l).
                let cols: Vec<Vec<Rat>> = (0..n).map(|l| self.basis_associator(i, j, l)).collect();
                for k in 0..n {
                    rows.push((0..n).map(|l| cols[l][k].clone()).collect());
                }
            }
        }
        kernel_of_rows(n, rows)
    }

    /// Center `{c : c x = x c for all x}`.
    pub fn center(&self) -> Subspace {
        let n = self.dim;
        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                rows.push(
                    (0..n)
                        .map(|l| self.product.get(l, i, k) - self.product.get(i, l, k))
                        .collect(),
                );
            }
        }
        kernel_of_rows(n, rows)
    }

    /// Block direct sum `A (+) B` with `A` on the first coordinates.
    pub fn direct_sum(&self, other: &KvAlgebra) -> KvAlgebra {
        let (n, m) = (self.dim, other.dim);
        let mut t = Tensor3::zeros(n + m, n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.set(i, j, k, self.product.get(i, j, k).clone());
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    t.set(n + i, n + j, n + k, other.product.get(i, j, k).clone());
                }
            }
        }
        KvAlgebra::new(t).expect("square shape")
    }

    /// Transport of structure along `phi`: `mu'(a,b) = phi(mu(phi^-1 a, phi^-1 b))`.
    pub fn change_basis(&self, phi: &Mat) -> Result<KvAlgebra> {
        let n = self.dim;
        if phi.rows() != n || phi.cols() != n {
            return Err(Error::DimensionMismatch("basis change must be n x n".into()));
        }
        let inv = phi
            .inverse()
            .ok_or_else(|| Error::Precondition("basis change is singular".into()))?;
        let mut t = Tensor3::zeros(n, n, n);
        for i in 0..n {
            for j in 0..n {
                let x = inv.col(i);
                let y = inv.col(j);
                let z = phi.mul_vec(&self.mul(&x, &y)?)?;
                for (k, c) in z.into_iter().enumerate() {
                    t.set(i, j, k, c);
                }
            }
        }
        KvAlgebra::new(t)
    }

    /// Same underlying space with a different product tensor.
    pub fn with_product(&self, product: Tensor3) -> Result<KvAlgebra> {
        if product.dims() != self.product.dims() {
            return Err(Error::DimensionMismatch(
                "replacement product has a different shape".into(),
            ));
        }
        KvAlgebra::new(product)
    }

    /// `|A|` as a bimodule over `A` by left and right multiplication.
    pub fn regular_bimodule(self: &Arc<Self>) -> KvModule {
        let n = self.dim;
        let mut left = Tensor3::zeros(n, n, n);
        let mut right = Tensor3::zeros(n, n, n);
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    left.set(i, a, b, self.product.get(i, a, b).clone());
                    right.set(a, i, b, self.product.get(a, i, b).clone());
                }
            }
        }
        KvModule::new(self.clone(), left, right).expect("regular shapes")
    }

    /// `|A|` with the left multiplication only.
    pub fn regular_left_module(self: &Arc<Self>) -> KvModule {
        let n = self.dim;
        let reg = self.regular_bimodule();
        KvModule::new(self.clone(), reg.left, Tensor3::zeros(n, n, n)).expect("regular shapes")
    }
}

fn kernel_of_rows(cols: usize, rows: Vec<Vec<Rat>>) -> Subspace {
    if rows.is_empty() {
        return Subspace::full(cols);
    }
    Mat::from_rows(rows).expect("uniform rows").kernel()
}

/// Which module identity failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleIdentity {
    /// `(a,b,w) = (b,a,w)`
    LeftSymmetry,
    /// `(a,w,b) = (w,a,b)`
    Mixed,
}

/// First failing basis instance `(identity, i, j, alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleViolation {
    pub identity: ModuleIdentity,
    pub a: usize,
    pub b: usize,
    pub w: usize,
}

/// A bimodule over a (candidate) KV-algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct KvModule {
    algebra: Arc<KvAlgebra>,
    dim: usize,
    left: Tensor3,
    right: Tensor3,
}

impl fmt::Debug for KvModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KvModule")
            .field("algebra_dim", &self.algebra.dim)
            .field("dim", &self.dim)
            .field("left", &self.left.to_nested())
            .field("right", &self.right.to_nested())
            .finish()
    }
}

impl KvModule {
    pub fn new(algebra: Arc<KvAlgebra>, left: Tensor3, right: Tensor3) -> Result<Self> {
        let n = algebra.dim;
        let [l0, l1, l2] = left.dims();
        let [r0, r1, r2] = right.dims();
        let m = l1;
        if l0 != n || l2 != m || r0 != m || r1 != n || r2 != m {
            return Err(Error::DimensionMismatch(format!(
                "module tensors {l0}x{l1}x{l2} and {r0}x{r1}x{r2} do not fit algebra of dim {n}"
            )));
        }
        Ok(KvModule {
            algebra,
            dim: m,
            left,
            right,
        })
    }

    /// `m`-dimensional module with both actions zero.
    pub fn zero(algebra: Arc<KvAlgebra>, m: usize) -> Self {
        let n = algebra.dim;
        KvModule::new(algebra, Tensor3::zeros(n, m, m), Tensor3::zeros(m, n, m))
            .expect("zero shapes")
    }

    pub fn algebra(&self) -> &Arc<KvAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left(&self) -> &Tensor3 {
        &self.left
    }

    pub fn right(&self) -> &Tensor3 {
        &self.right
    }

    pub fn is_left_module(&self) -> bool {
        self.right.is_zero()
    }

    pub fn is_right_module(&self) -> bool {
        self.left.is_zero()
    }

    /// `e_i w_a`.
    pub fn basis_left(&self, i: usize, a: usize) -> &[Rat] {
        self.left.fiber(i, a)
    }

    /// `w_a e_i`.
    pub fn basis_right(&self, a: usize, i: usize) -> &[Rat] {
        self.right.fiber(a, i)
    }

    pub fn act_left(&self, a: &[Rat], w: &[Rat]) -> Result<Vec<Rat>> {
        check_len("algebra element", a, self.algebra.dim)?;
        check_len("module element", w, self.dim)?;
        let mut out = vec![Rat::zero(); self.dim];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (al, wa) in w.iter().enumerate() {
                if !wa.is_zero() {
                    axpy(&mut out, &(ai * wa), self.basis_left(i, al));
                }
            }
        }
        Ok(out)
    }

    pub fn act_right(&self, w: &[Rat], a: &[Rat]) -> Result<Vec<Rat>> {
        check_len("module element", w, self.dim)?;
        check_len("algebra element", a, self.algebra.dim)?;
        let mut out = vec![Rat::zero(); self.dim];
        for (al, wa) in w.iter().enumerate() {
            if wa.is_zero() {
                continue;
            }
            for (i, ai) in a.iter().enumerate() {
                if !ai.is_zero() {
                    axpy(&mut out, &(wa * ai), self.basis_right(al, i));
                }
            }
        }
        Ok(out)
    }

    /// The three mixed associators `((a,b,w), (a,w,b), (w,a,b))`.
    pub fn mixed_associators(
        &self,
        a: &[Rat],
        b: &[Rat],
        w: &[Rat],
    ) -> Result<[Vec<Rat>; 3]> {
        let alg = &self.algebra;
        let ab = alg.mul(a, b)?;
        let abw = sub_vec(&self.act_left(&ab, w)?, &self.act_left(a, &self.act_left(b, w)?)?);
        let awb = sub_vec(
            &self.act_right(&self.act_left(a, w)?, b)?,
            &self.act_left(a, &self.act_right(w, b)?)?,
        );
        let wab = sub_vec(&self.act_right(&self.act_right(w, a)?, b)?, &self.act_right(w, &ab)?);
        Ok([abw, awb, wab])
    }

    /// `(e_i, e_j, w_a)` on basis elements.
    pub fn basis_left_associator(&self, i: usize, j: usize, a: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim];
        for (l, c) in self.algebra.basis_mul(i, j).iter().enumerate() {
            axpy(&mut out, c, self.basis_left(l, a));
        }
        for (l, c) in self.basis_left(j, a).iter().enumerate() {
            axpy(&mut out, &-c, self.basis_left(i, l));
        }
        out
    }

    fn basis_mixed(&self, i: usize, a: usize, j: usize) -> (Vec<Rat>, Vec<Rat>) {
        let m = self.dim;
        // (e_i, w_a, e_j) = (e_i w_a) e_j - e_i (w_a e_j)
        let mut awb = vec![Rat::zero(); m];
        for (l, c) in self.basis_left(i, a).iter().enumerate() {
            axpy(&mut awb, c, self.basis_right(l, j));
        }
        for (l, c) in self.basis_right(a, j).iter().enumerate() {
            axpy(&mut awb, &-c, self.basis_left(i, l));
        }
        // (w_a, e_i, e_j) = (w_a e_i) e_j - w_a (e_i e_j)
        let mut wab = vec![Rat::zero(); m];
        for (l, c) in self.basis_right(a, i).iter().enumerate() {
            axpy(&mut wab, c, self.basis_right(l, j));
        }
        for (l, c) in self.algebra.basis_mul(i, j).iter().enumerate() {
            axpy(&mut wab, &-c, self.basis_right(a, l));
        }
        (awb, wab)
    }

    /// First failing basis instance of either module identity.
    pub fn module_violation(&self) -> Option<ModuleViolation> {
        let (n, m) = (self.algebra.dim, self.dim);
        for i in 0..n {
            for j in 0..n {
                for a in 0..m {
                    if self.basis_left_associator(i, j, a) != self.basis_left_associator(j, i, a) {
                        return Some(ModuleViolation {
                            identity: ModuleIdentity::LeftSymmetry,
                            a: i,
                            b: j,
                            w: a,
                        });
                    }
                    let (awb, wab) = self.basis_mixed(i, a, j);
                    if awb != wab {
                        return Some(ModuleViolation {
                            identity: ModuleIdentity::Mixed,
                            a: i,
                            b: j,
                            w: a,
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_module(&self) -> bool {
        self.module_violation().is_none()
    }

    pub fn require_module(&self) -> Result<()> {
        match self.module_violation() {
            None => Ok(()),
            Some(v) => Err(Error::Precondition(format!(
                "not a KV-module: {:?} fails at (a=e{}, b=e{}, w={})",
                v.identity, v.a, v.b, v.w
            ))),
        }
    }

    /// Jacobi elements `J(W) = {w : (a,b,w) = 0 for all a, b}`.
    pub fn jacobi(&self) -> Subspace {
        let (n, m) = (self.algebra.dim, self.dim);
        let mut rows = Vec::with_capacity(n * n * m);
        for i in 0..n {
            for j in 0..n {
                let cols: Vec<Vec<Rat>> =
                    (0..m).map(|a| self.basis_left_associator(i, j, a)).collect();
                for k in 0..m {
                    rows.push((0..m).map(|a| cols[a][k].clone()).collect());
                }
            }
        }
        kernel_of_rows(m, rows)
    }

    fn same_algebra(&self, other: &KvModule) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::DimensionMismatch(
                "modules are over different algebras".into(),
            ));
        }
        Ok(())
    }

    /// Direct sum of modules over the same algebra.
    pub fn direct_sum(&self, other: &KvModule) -> Result<KvModule> {
        self.same_algebra(other)?;
        let (n, m1, m2) = (self.algebra.dim, self.dim, other.dim);
        let m = m1 + m2;
        let mut left = Tensor3::zeros(n, m, m);
        let mut right = Tensor3::zeros(m, n, m);
        for i in 0..n {
            for a in 0..m1 {
                for b in 0..m1 {
                    left.set(i, a, b, self.left.get(i, a, b).clone());
                    right.set(a, i, b, self.right.get(a, i, b).clone());
                }
            }
            for a in 0..m2 {
                for b in 0..m2 {
                    left.set(i, m1 + a, m1 + b, other.left.get(i, a, b).clone());
                    right.set(m1 + a, i, m1 + b, other.right.get(a, i, b).clone());
                }
            }
        }
        KvModule::new(self.algebra.clone(), left, right)
    }

    /// The isomorphic module obtained by the change of basis `w -> P w`.
    pub fn conjugate(&self, p: &Mat) -> Result<KvModule> {
        let (n, m) = (self.algebra.dim, self.dim);
        let inv = p
            .inverse()
            .ok_or_else(|| Error::Precondition("module basis change is singular".into()))?;
        if p.rows() != m {
            return Err(Error::DimensionMismatch("basis change must be m x m".into()));
        }
        let mut left = Tensor3::zeros(n, m, m);
        let mut right = Tensor3::zeros(m, n, m);
        for i in 0..n {
            let e = self.algebra.basis(i);
            for a in 0..m {
                let w = inv.col(a);
                let l = p.mul_vec(&self.act_left(&e, &w)?)?;
                let r = p.mul_vec(&self.act_right(&w, &e)?)?;
                for b in 0..m {
                    left.set(i, a, b, l[b].clone());
                    right.set(a, i, b, r[b].clone());
                }
            }
        }
        KvModule::new(self.algebra.clone(), left, right)
    }

    /// Keeps the left action only.
    pub fn left_part(&self) -> KvModule {
        let n = self.algebra.dim;
        KvModule::new(
            self.algebra.clone(),
            self.left.clone(),
            Tensor3::zeros(self.dim, n, self.dim),
        )
        .expect("same shapes")
    }

    /// `L(W, V)` with `(a.f)(w) = a f(w) - f(a w)` and `(f.a)(w) = f(w) a`.
    ///
    /// Coordinates: the map sending `w_a` to `v_b` (and other basis vectors
    /// to zero) has index `a * dim(V) + b`.
    pub fn hom(w: &KvModule, v: &KvModule) -> Result<KvModule> {
        KvModule::multilinear_hom(w, v, 1)
    }

    /// `L_q(W, W)`, the `q`-linear maps from `W` to itself.
    pub fn multilinear(w: &KvModule, q: usize) -> Result<KvModule> {
        KvModule::multilinear_hom(w, w, q)
    }

    /// `L_q(W, V)` with
    /// `(a.f)(w_1..w_q) = a f(w_1..w_q) - sum_t f(.., a w_t, ..)` and
    /// `(f.a)(w_1..w_q) = f(w_1..w_q) a`.
    ///
    /// Coordinates are flattened big-endian over `(a_1, .., a_q; b)`.
    pub fn multilinear_hom(w: &KvModule, v: &KvModule, q: usize) -> Result<KvModule> {
        w.same_algebra(v)?;
        let n = w.algebra.dim;
        let (mw, mv) = (w.dim, v.dim);
        let args = mw.pow(q as u32);
        let size = args * mv;
        let mut left = Tensor3::zeros(n, size, size);
        let mut right = Tensor3::zeros(size, n, size);
        let mut digits = vec![0usize; q];
        for i in 0..n {
            for t in 0..args {
                unflatten(t, mw, &mut digits);
                for b in 0..mv {
                    let src = t * mv + b;
                    // a f term: the image of f_{t,b} at tuple t is v_b.
                    for (b2, c) in v.basis_left(i, b).iter().enumerate() {
                        if !c.is_zero() {
                            left.add_at(i, src, t * mv + b2, c);
                        }
                    }
                    for (b2, c) in v.basis_right(b, i).iter().enumerate() {
                        if !c.is_zero() {
                            right.add_at(src, i, t * mv + b2, c);
                        }
                    }
                    // - f(.., a w_s, ..): contributes at tuples u that agree with t
                    // off slot s and whose slot-s entry maps onto t[s].
                    for s in 0..q {
                        for g in 0..mw {
                            let c = w.left.get(i, g, digits[s]);
                            if c.is_zero() {
                                continue;
                            }
                            let mut u = digits.clone();
                            u[s] = g;
                            let ui = flatten(&u, mw);
                            left.add_at(i, src, ui * mv + b, &-c);
                        }
                    }
                }
            }
        }
        KvModule::new(w.algebra.clone(), left, right)
    }

    /// The module `V` viewed over the semidirect product `A (+) W`, with
    /// `(a,w) v = a v` and `v (a,w) = v a`.
    pub fn pull_back_to(&self, total: Arc<KvAlgebra>) -> Result<KvModule> {
        let n = self.algebra.dim;
        let big = total.dim;
        if big < n {
            return Err(Error::DimensionMismatch(
                "total algebra is smaller than the base".into(),
            ));
        }
        let m = self.dim;
        let mut left = Tensor3::zeros(big, m, m);
        let mut right = Tensor3::zeros(m, big, m);
        for i in 0..n {
            for a in 0..m {
                for b in 0..m {
                    left.set(i, a, b, self.left.get(i, a, b).clone());
                    right.set(a, i, b, self.right.get(a, i, b).clone());
                }
            }
        }
        KvModule::new(total, left, right)
    }
}

/// Semidirect product `A (+) W` with `(a,w)(a',w') = (aa', aw' + wa')`.
/// Coordinates `0..n` are `A`, `n..n+m` are `W`.
pub fn semidirect(w: &KvModule) -> KvAlgebra {
    let a = &w.algebra;
    if w.dim == 0 {
        return (**a).clone();
    }
    let (n, m) = (a.dim, w.dim);
    let d = n + m;
    let mut t = Tensor3::zeros(d, d, d);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                t.set(i, j, k, a.product.get(i, j, k).clone());
            }
        }
        for al in 0..m {
            for be in 0..m {
                t.set(i, n + al, n + be, w.left.get(i, al, be).clone());
                t.set(n + al, i, n + be, w.right.get(al, i, be).clone());
            }
        }
    }
    KvAlgebra::new(t).expect("square shape")
}

pub(crate) fn flatten(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

pub(crate) fn unflatten(mut idx: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = idx % base;
        idx /= base;
    }
}
