//! The KV cochain complex `C(A, W)` and its cohomology.
//!
//! For `q >= 1` the coboundary of `f` is
//!
//! ```text
//! df(a_1..a_{q+1}) = sum_{j=1}^{q} (-1)^j [ a_j f(a_1..^a_j..a_{q+1})
//!                      - sum_{s != j} f(a_1..^a_j.., a_j a_s in slot s, ..a_{q+1})
//!                      + f(a_1..^a_j..a_q, a_j) a_{q+1} ]
//! ```
//!
//! and in degree zero `dw(a) = -aw + wa` on the Jacobi elements `J(W)`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{flatten, unflatten, KvAlgebra, KvModule};
use crate::cochain::{table_cells, Cochain};
use crate::error::{Error, Result};
use crate::linalg::{Mat, Subspace};
use crate::rat::Rat;

/// Default cap on the number of cells of any cochain table.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "KVCOHOM_BUDGET";

pub fn budget_from_env() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Deliberately broken coboundaries, used to check that the invariant
/// battery notices a wrong formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Variant {
    #[default]
    Normative,
    /// Sign of the right-action term flipped.
    FlippedRightTerm,
}

#[derive(Clone, Debug)]
pub struct KvComplex {
    module: KvModule,
    budget: u128,
    variant: Variant,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub dim_c: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub representatives: Vec<Cochain>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub degrees: Vec<DegreeReport>,
}

impl CohomologyReport {
    pub fn dims_h(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim_h).collect()
    }

    pub fn degree(&self, q: usize) -> Option<&DegreeReport> {
        self.degrees.iter().find(|d| d.degree == q)
    }
}

impl KvComplex {
    /// Complex of a verified module over a verified KV algebra.
    pub fn new(module: KvModule) -> Result<Self> {
        module.algebra().require_kv()?;
        module.require_module()?;
        Ok(KvComplex::unchecked(module))
    }

    /// No identity checks; the complex property may fail.
    pub fn unchecked(module: KvModule) -> Self {
        KvComplex {
            module,
            budget: budget_from_env(),
            variant: Variant::Normative,
        }
    }

    /// `C(A, |A|)`.
    pub fn regular(algebra: KvAlgebra) -> Result<Self> {
        KvComplex::new(Arc::new(algebra).regular_bimodule())
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn module(&self) -> &KvModule {
        &self.module
    }

    pub fn algebra(&self) -> &Arc<KvAlgebra> {
        self.module.algebra()
    }

    pub fn n(&self) -> usize {
        self.algebra().dim()
    }

    pub fn m(&self) -> usize {
        self.module.dim()
    }

    pub fn budget(&self) -> u128 {
        self.budget
    }

    pub fn check_budget(&self, q: usize) -> Result<()> {
        let cells = table_cells(self.n(), self.m(), q);
        if cells > self.budget {
            return Err(Error::Budget {
                degree: q,
                cells,
                budget: self.budget,
            });
        }
        Ok(())
    }

    pub fn zero_cochain(&self, q: usize) -> Cochain {
        Cochain::zero(self.n(), self.m(), q)
    }

    fn check_cochain(&self, f: &Cochain) -> Result<()> {
        if f.arg_dim() != self.n() || f.value_dim() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "cochain over dims ({},{}) in a complex over ({},{})",
                f.arg_dim(),
                f.value_dim(),
                self.n(),
                self.m()
            )));
        }
        Ok(())
    }

    /// Calls `emit(beta, source_index, coefficient)` for every term of
    /// `df(e_t)_beta`, where `t` has `q + 1` entries and `source_index` is a
    /// flat index into the degree-`q` table.
    fn for_each_term(&self, t: &[usize], mut emit: impl FnMut(usize, usize, Rat)) {
        let alg = self.algebra();
        let (n, m) = (self.n(), self.m());
        let q = t.len() - 1;
        let mut rest = Vec::with_capacity(q);
        let mut u = Vec::with_capacity(q);
        for jj in 0..q {
            let sign = if jj % 2 == 0 { -Rat::one() } else { Rat::one() };
            let aj = t[jj];
            rest.clear();
            rest.extend(t.iter().enumerate().filter(|&(p, _)| p != jj).map(|(_, &x)| x));
            let rest_idx = flatten(&rest, n);
            // a_j f(rest)
            for al in 0..m {
                for (be, c) in self.module.basis_left(aj, al).iter().enumerate() {
                    if !c.is_zero() {
                        emit(be, rest_idx * m + al, &sign * c);
                    }
                }
            }
            // - f(rest with a_j a_s in slot s)
            for s in 0..q {
                for (k, c) in alg.basis_mul(aj, rest[s]).iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    u.clear();
                    u.extend_from_slice(&rest);
                    u[s] = k;
                    let ui = flatten(&u, n);
                    let coef = -(&sign * c);
                    for be in 0..m {
                        emit(be, ui * m + be, coef.clone());
                    }
                }
            }
            // f(a_1..^a_j..a_q, a_j) a_{q+1}
            u.clear();
            u.extend(t[..q].iter().enumerate().filter(|&(p, _)| p != jj).map(|(_, &x)| x));
            u.push(aj);
            let ui = flatten(&u, n);
            let last = t[q];
            let rsign = match self.variant {
                Variant::Normative => sign.clone(),
                Variant::FlippedRightTerm => -&sign,
            };
            for al in 0..m {
                for (be, c) in self.module.basis_right(al, last).iter().enumerate() {
                    if !c.is_zero() {
                        emit(be, ui * m + al, &rsign * c);
                    }
                }
            }
        }
    }

    /// `df` for `q >= 1`. Degree-0 input must go through [`Self::coboundary0`].
    pub fn coboundary(&self, f: &Cochain) -> Result<Cochain> {
        self.check_cochain(f)?;
        let q = f.degree();
        if q == 0 {
            return Err(Error::Precondition(
                "degree-0 cochains use coboundary0".into(),
            ));
        }
        let (n, m) = (self.n(), self.m());
        let mut out = Cochain::zero(n, m, q + 1);
        let vals = f.values();
        let mut t = vec![0usize; q + 1];
        let mut acc = vec![Rat::zero(); m];
        for ti in 0..n.pow((q + 1) as u32) {
            unflatten(ti, n, &mut t);
            for a in acc.iter_mut() {
                *a = Rat::zero();
            }
            self.for_each_term(&t, |be, src, c| {
                let v = &vals[src];
                if !v.is_zero() {
                    acc[be] += c * v;
                }
            });
            out.set(&t, &acc);
        }
        Ok(out)
    }

    /// `dw(a) = -aw + wa` for `w` in `J(W)`.
    pub fn coboundary0(&self, w: &[Rat]) -> Result<Cochain> {
        if !self.module.jacobi().contains(w)? {
            return Err(Error::Precondition(
                "degree-0 cochains must be Jacobi elements of the module".into(),
            ));
        }
        self.coboundary0_unchecked(w)
    }

    /// The same formula without the `J(W)` membership check.
    pub fn coboundary0_unchecked(&self, w: &[Rat]) -> Result<Cochain> {
        if w.len() != self.m() {
            return Err(Error::DimensionMismatch("module element length".into()));
        }
        let alg = self.algebra().clone();
        let mut out = Cochain::zero(self.n(), self.m(), 1);
        for i in 0..self.n() {
            let a = alg.basis(i);
            let aw = self.module.act_left(&a, w)?;
            let wa = self.module.act_right(w, &a)?;
            let v: Vec<Rat> = aw.iter().zip(&wa).map(|(x, y)| y - x).collect();
            out.set(&[i], &v);
        }
        Ok(out)
    }

    /// Matrix of `d` on `C_q` in the flattened bases. For `q = 0` the domain
    /// is `J(W)` in its echelon basis.
    pub fn coboundary_matrix(&self, q: usize) -> Result<Mat> {
        let (n, m) = (self.n(), self.m());
        self.check_budget(q)?;
        self.check_budget(q + 1)?;
        if q == 0 {
            let j = self.module.jacobi();
            let cols = j
                .basis()
                .iter()
                .map(|w| self.coboundary0_unchecked(w).map(Cochain::into_values))
                .collect::<Result<Vec<_>>>()?;
            return Mat::from_cols(n * m, &cols);
        }
        let rows = n.pow((q + 1) as u32) * m;
        let cols = n.pow(q as u32) * m;
        let mut mat = Mat::zeros(rows, cols);
        let mut t = vec![0usize; q + 1];
        for ti in 0..n.pow((q + 1) as u32) {
            unflatten(ti, n, &mut t);
            self.for_each_term(&t, |be, src, c| {
                mat[(ti * m + be, src)] += c;
            });
        }
        Ok(mat)
    }

    /// Matrix of `d` between subspaces spanned by selected basis tuples:
    /// columns are `(sources[c], alpha)`, rows are `(targets[r], beta)`.
    /// Terms reaching tuples outside `sources` are dropped, so the result is
    /// the restriction of `d` only when `d` maps the source span into the
    /// target span.
    pub fn restricted_matrix(&self, q: usize, sources: &[usize], targets: &[usize]) -> Mat {
        let (n, m) = (self.n(), self.m());
        let col_of: std::collections::HashMap<usize, usize> =
            sources.iter().enumerate().map(|(c, &s)| (s, c)).collect();
        let mut mat = Mat::zeros(targets.len() * m, sources.len() * m);
        let mut t = vec![0usize; q + 1];
        for (r, &ti) in targets.iter().enumerate() {
            unflatten(ti, n, &mut t);
            self.for_each_term(&t, |be, src, c| {
                if let Some(&col) = col_of.get(&(src / m)) {
                    mat[(r * m + be, col * m + src % m)] += c;
                }
            });
        }
        mat
    }

    pub fn is_cocycle(&self, f: &Cochain) -> Result<bool> {
        if f.degree() == 0 {
            return Ok(self.coboundary0_unchecked(f.values())?.is_zero());
        }
        Ok(self.coboundary(f)?.is_zero())
    }

    /// A preimage of `f` under `d`, if `f` is exact. Degree-1 preimages are
    /// degree-0 cochains in `J(W)`.
    pub fn is_coboundary(&self, f: &Cochain) -> Result<Option<Cochain>> {
        self.check_cochain(f)?;
        let q = f.degree();
        if q == 0 {
            return Ok(if f.is_zero() { Some(f.clone()) } else { None });
        }
        let mat = self.coboundary_matrix(q - 1)?;
        let Some(x) = mat.solve(f.values())? else {
            return Ok(None);
        };
        let (n, m) = (self.n(), self.m());
        if q == 1 {
            let j = self.module.jacobi();
            let mut w = vec![Rat::zero(); m];
            for (c, b) in x.iter().zip(j.basis()) {
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi += c * bi;
                }
            }
            return Ok(Some(Cochain::from_values(n, m, 0, w)?));
        }
        Ok(Some(Cochain::from_values(n, m, q - 1, x)?))
    }

    /// Dimensions of cochains, cocycles, coboundaries and cohomology for
    /// degrees `0..=q_max`, with representatives of each cohomology space.
    pub fn cohomology(&self, q_max: usize) -> Result<CohomologyReport> {
        self.algebra().require_kv()?;
        self.module.require_module()?;
        for q in 0..=q_max + 1 {
            self.check_budget(q)?;
        }
        let (n, m) = (self.n(), self.m());
        let mut degrees = Vec::with_capacity(q_max + 1);
        let mut prev_image: Option<Subspace> = None;
        for q in 0..=q_max {
            let mat = self.coboundary_matrix(q)?;
            let dim_c = mat.cols();
            let z = mat.kernel();
            let b = prev_image.take().unwrap_or_else(|| Subspace::zero(dim_c));
            let reps = b.complement_from(z.basis())?;
            let representatives = if q == 0 {
                let j = self.module.jacobi();
                reps.iter()
                    .map(|x| {
                        let mut w = vec![Rat::zero(); m];
                        for (c, bv) in x.iter().zip(j.basis()) {
                            for (wi, bi) in w.iter_mut().zip(bv) {
                                *wi += c * bi;
                            }
                        }
                        Cochain::from_values(n, m, 0, w)
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                reps.into_iter()
                    .map(|v| Cochain::from_values(n, m, q, v))
                    .collect::<Result<Vec<_>>>()?
            };
            degrees.push(DegreeReport {
                degree: q,
                dim_c,
                dim_z: z.dim(),
                dim_b: b.dim(),
                dim_h: z.dim() - b.dim(),
                representatives,
            });
            prev_image = Some(mat.image());
        }
        Ok(CohomologyReport { degrees })
    }
}
