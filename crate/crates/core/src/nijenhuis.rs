//! Chevalley-Eilenberg comparison complex.
//!
//! The commutator of a KV algebra is a Lie bracket, and `L(A, W)` is a left
//! module over that Lie algebra `A_L` through `(a f)(b) = a f(b) - f([a,b])`.
//! The Nijenhuis-style cohomology is `H_N^q(A, W) = H_CE^{q-1}(A_L, L(A, W))`.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{KvModule, Tensor3};
use crate::error::{Error, Result};
use crate::linalg::{Mat, Subspace};
use crate::rat::Rat;

/// A Lie algebra with a representation, both by structure constants.
#[derive(Clone, Debug)]
pub struct CeComplex {
    n: usize,
    bracket: Tensor3,
    /// `rho[i]` is the action of `e_i` on the module, as a matrix.
    rho: Vec<Mat>,
    module_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CeDegree {
    pub degree: usize,
    pub dim_c: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
}

/// One row per KV degree `q >= 1`, computed from CE degree `q - 1`.
#[derive(Clone, Debug, Serialize)]
pub struct NijenhuisReport {
    pub degrees: Vec<NijenhuisDegree>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NijenhuisDegree {
    pub degree: usize,
    pub ce_degree: usize,
    pub dim_c: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
}

impl NijenhuisReport {
    pub fn dims_h(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim_h).collect()
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl CeComplex {
    pub fn new(bracket: Tensor3, rho: Vec<Mat>) -> Result<Self> {
        let [n, n2, n3] = bracket.dims();
        if n != n2 || n != n3 || rho.len() != n {
            return Err(Error::DimensionMismatch(
                "bracket must be n x n x n with one action matrix per basis vector".into(),
            ));
        }
        let module_dim = rho.first().map_or(0, Mat::rows);
        if rho.iter().any(|r| r.rows() != module_dim || r.cols() != module_dim) {
            return Err(Error::DimensionMismatch("action matrices must be square".into()));
        }
        Ok(CeComplex {
            n,
            bracket,
            rho,
            module_dim,
        })
    }

    /// `A_L` acting on `L(A, W)` for a KV-module `W`.
    ///
    /// Module coordinates: index `b * m + beta` is the coefficient of `w_beta`
    /// in `f(e_b)`.
    pub fn nijenhuis(w: &KvModule) -> Result<Self> {
        let a = w.algebra();
        a.require_kv()?;
        w.require_module()?;
        let (n, m) = (a.dim(), w.dim());
        let br = a.lie_bracket();
        let d = n * m;
        let mut rho = Vec::with_capacity(n);
        for i in 0..n {
            let mut mat = Mat::zeros(d, d);
            for b0 in 0..n {
                for be0 in 0..m {
                    let col = b0 * m + be0;
                    // e_i f(e_b0)
                    for (be, c) in w.basis_left(i, be0).iter().enumerate() {
                        mat[(b0 * m + be, col)] += c;
                    }
                    // - f([e_i, e_b]) picks the e_b0 coefficient of the bracket
                    for b in 0..n {
                        let c = br.get(i, b, b0);
                        if !c.is_zero() {
                            mat[(b * m + be0, col)] -= c;
                        }
                    }
                }
            }
            rho.push(mat);
        }
        CeComplex::new(br, rho)
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn cochain_dim(&self, k: usize) -> usize {
        if k > self.n {
            return 0;
        }
        subsets(self.n, k).len() * self.module_dim
    }

    /// Matrix of `d : C^k -> C^{k+1}` on alternating cochains, indexed by
    /// `(subset rank) * module_dim + mu`.
    pub fn differential_matrix(&self, k: usize) -> Mat {
        let n = self.n;
        let dm = self.module_dim;
        let src = if k <= n { subsets(n, k) } else { Vec::new() };
        let dst = if k < n { subsets(n, k + 1) } else { Vec::new() };
        let index: HashMap<&[usize], usize> =
            src.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let mut mat = Mat::zeros(dst.len() * dm, src.len() * dm);
        for (r, s) in dst.iter().enumerate() {
            // sum_i (-1)^i x_i phi(.. ^x_i ..)
            for i in 0..=k {
                let rest: Vec<usize> = s.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &x)| x).collect();
                let c_idx = index[rest.as_slice()];
                let sign = if i % 2 == 0 { Rat::one() } else { -Rat::one() };
                let rho = &self.rho[s[i]];
                for mu in 0..dm {
                    for nu in 0..dm {
                        let c = &rho[(mu, nu)];
                        if !c.is_zero() {
                            mat[(r * dm + mu, c_idx * dm + nu)] += &sign * c;
                        }
                    }
                }
            }
            // sum_{i<j} (-1)^{i+j} phi([x_i, x_j], .. ^x_i .. ^x_j ..)
            for i in 0..=k {
                for j in i + 1..=k {
                    let rest: Vec<usize> = s
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != i && p != j)
                        .map(|(_, &x)| x)
                        .collect();
                    let sign = if (i + j) % 2 == 0 { Rat::one() } else { -Rat::one() };
                    for (l, c) in self.bracket.fiber(s[i], s[j]).iter().enumerate() {
                        if c.is_zero() || rest.contains(&l) {
                            continue;
                        }
                        // Move l from the front into sorted position.
                        let pos = rest.iter().filter(|&&x| x < l).count();
                        let mut sorted = rest.clone();
                        sorted.insert(pos, l);
                        let perm = if pos % 2 == 0 { Rat::one() } else { -Rat::one() };
                        let c_idx = index[sorted.as_slice()];
                        let coef = &sign * &perm * c;
                        for mu in 0..dm {
                            mat[(r * dm + mu, c_idx * dm + mu)] += &coef;
                        }
                    }
                }
            }
        }
        mat
    }

    pub fn differential(&self, k: usize, phi: &[Rat]) -> Result<Vec<Rat>> {
        self.differential_matrix(k).mul_vec(phi)
    }

    /// `H_CE^k` dimensions for `k = 0..=k_max`.
    pub fn cohomology(&self, k_max: usize) -> Vec<CeDegree> {
        let mut out = Vec::with_capacity(k_max + 1);
        let mut prev: Option<Subspace> = None;
        for k in 0..=k_max {
            let d = self.differential_matrix(k);
            let dim_c = self.cochain_dim(k);
            let z = if d.rows() == 0 { Subspace::full(dim_c) } else { d.kernel() };
            let dim_b = prev.take().map_or(0, |b| b.dim());
            out.push(CeDegree {
                degree: k,
                dim_c,
                dim_z: z.dim(),
                dim_b,
                dim_h: z.dim() - dim_b,
            });
            prev = Some(if d.rows() == 0 {
                Subspace::zero(0)
            } else {
                d.image()
            });
        }
        out
    }
}

/// `H_N^q` for `q = 1..=q_max`.
pub fn nijenhuis_cohomology(w: &KvModule, q_max: usize) -> Result<NijenhuisReport> {
    let ce = CeComplex::nijenhuis(w)?;
    if q_max == 0 {
        return Ok(NijenhuisReport { degrees: Vec::new() });
    }
    let degrees = ce
        .cohomology(q_max - 1)
        .into_iter()
        .map(|d| NijenhuisDegree {
            degree: d.degree + 1,
            ce_degree: d.degree,
            dim_c: d.dim_c,
            dim_z: d.dim_z,
            dim_b: d.dim_b,
            dim_h: d.dim_h,
        })
        .collect();
    Ok(NijenhuisReport { degrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random;
    use std::sync::Arc;

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn abelian_trivial_action() {
        let n = 3;
        let ce = CeComplex::new(Tensor3::zeros(n, n, n), vec![Mat::zeros(2, 2); n]).unwrap();
        for d in ce.cohomology(4) {
            assert_eq!(d.dim_h, binom(n, d.degree) * 2);
            assert_eq!(d.dim_c, d.dim_h);
        }
    }

    #[test]
    fn square_zero_on_aff() {
        let a = Arc::new(fixtures::aff());
        for w in [a.regular_bimodule(), a.regular_left_module()] {
            let ce = CeComplex::nijenhuis(&w).unwrap();
            let mut g = random::rng(9);
            for k in 0..3 {
                let phi = random::small_vec(&mut g, ce.cochain_dim(k));
                let d1 = ce.differential(k, &phi).unwrap();
                let d2 = ce.differential(k + 1, &d1).unwrap();
                assert!(d2.iter().all(Rat::is_zero));
            }
        }
    }

    #[test]
    fn representation_property() {
        // rho([e_i, e_j]) = [rho(e_i), rho(e_j)] on L(A, W).
        let mut g = random::rng(4);
        for _ in 0..5 {
            let a = Arc::new(random::random_kv_with(&mut g, 3));
            let w = random::random_module(&mut g, &a, 2);
            let ce = CeComplex::nijenhuis(&w).unwrap();
            let n = a.dim();
            let d = ce.module_dim();
            for i in 0..n {
                for j in 0..n {
                    let lhs = ce.rho[i].mul(&ce.rho[j]).unwrap();
                    let rhs = ce.rho[j].mul(&ce.rho[i]).unwrap();
                    let mut br = Mat::zeros(d, d);
                    for (l, c) in ce.bracket.fiber(i, j).iter().enumerate() {
                        for r in 0..d {
                            for s in 0..d {
                                br[(r, s)] += c * &ce.rho[l][(r, s)];
                            }
                        }
                    }
                    for r in 0..d {
                        for s in 0..d {
                            assert_eq!(&lhs[(r, s)] - &rhs[(r, s)], br[(r, s)].clone());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn report_is_consistent() {
        let a = Arc::new(fixtures::aff());
        let rep = nijenhuis_cohomology(&a.regular_bimodule(), 3).unwrap();
        assert_eq!(rep.degrees.len(), 3);
        for d in &rep.degrees {
            assert_eq!(d.dim_h, d.dim_z - d.dim_b);
            assert_eq!(d.ce_degree + 1, d.degree);
        }
        // C_CE^0 = L(A, W) has dimension n * m.
        assert_eq!(rep.degrees[0].dim_c, 4);
    }
}
