//! Independent reference computations, written directly from structure
//! constants without going through the library's own operators.

#![allow(dead_code)]

use kvcohom::linalg::Subspace;
use kvcohom::{Cochain, KvModule, Mat, Rat, Tensor3};

fn zeros(m: usize) -> Vec<Rat> {
    vec![Rat::zero(); m]
}

fn axpy(out: &mut [Rat], c: &Rat, v: &[Rat]) {
    if c.is_zero() {
        return;
    }
    for (o, x) in out.iter_mut().zip(v) {
        *o += &(c * x);
    }
}

/// `e_i e_j` read straight from the table.
pub fn mul(t: &Tensor3, i: usize, j: usize) -> Vec<Rat> {
    let n = t.dims()[2];
    (0..n).map(|k| t.get(i, j, k).clone()).collect()
}

fn mul_vec_left(t: &Tensor3, v: &[Rat], k: usize) -> Vec<Rat> {
    let mut out = zeros(t.dims()[2]);
    for (l, c) in v.iter().enumerate() {
        axpy(&mut out, c, &mul(t, l, k));
    }
    out
}

fn mul_vec_right(t: &Tensor3, i: usize, v: &[Rat]) -> Vec<Rat> {
    let mut out = zeros(t.dims()[2]);
    for (l, c) in v.iter().enumerate() {
        axpy(&mut out, c, &mul(t, i, l));
    }
    out
}

/// `(e_i, e_j, e_k) = (e_i e_j) e_k - e_i (e_j e_k)`.
pub fn associator(t: &Tensor3, i: usize, j: usize, k: usize) -> Vec<Rat> {
    let left = mul_vec_left(t, &mul(t, i, j), k);
    let right = mul_vec_right(t, i, &mul(t, j, k));
    left.iter().zip(&right).map(|(a, b)| a - b).collect()
}

pub fn is_kv(t: &Tensor3) -> bool {
    let n = t.dims()[0];
    (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| associator(t, i, j, k) == associator(t, j, i, k))))
}

pub fn bracket(t: &Tensor3, i: usize, j: usize) -> Vec<Rat> {
    mul(t, i, j).iter().zip(&mul(t, j, i)).map(|(a, b)| a - b).collect()
}

/// `2[(a,b,c) - (b,a,c)]` flattened as a 3-cochain.
pub fn defect(t: &Tensor3) -> Vec<Rat> {
    let n = t.dims()[0];
    let two = Rat::from_int(2);
    let mut out = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let d: Vec<Rat> = associator(t, i, j, k)
                    .iter()
                    .zip(&associator(t, j, i, k))
                    .map(|(a, b)| &two * &(a - b))
                    .collect();
                out.extend(d);
            }
        }
    }
    out
}

pub fn commutator_jacobi(t: &Tensor3) -> bool {
    let n = t.dims()[0];
    let br_vec = |x: &[Rat], k: usize| -> Vec<Rat> {
        let mut out = zeros(n);
        for (l, c) in x.iter().enumerate() {
            axpy(&mut out, c, &bracket(t, l, k));
        }
        out
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]
                let a = br_vec(&bracket(t, i, j), k);
                let b = br_vec(&bracket(t, j, k), i);
                let c = br_vec(&bracket(t, k, i), j);
                if (0..n).any(|l| !(&(&a[l] + &b[l]) + &c[l]).is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn s_tensor(alpha: &Rat, beta: &Rat) -> Tensor3 {
    // S((l,m),(l',m')) = (a l l', b l l' + a (l m' + m l'))
    let mut s = Tensor3::zeros(2, 2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let (l, m) = (Rat::from_int((i == 0) as i64), Rat::from_int((i == 1) as i64));
            let (l2, m2) = (Rat::from_int((j == 0) as i64), Rat::from_int((j == 1) as i64));
            s.set(i, j, 0, alpha * &(&l * &l2));
            s.set(i, j, 1, &(beta * &(&l * &l2)) + &(alpha * &(&(&l * &m2) + &(&m * &l2))));
        }
    }
    s
}

fn act_left(w: &KvModule, i: usize, v: &[Rat]) -> Vec<Rat> {
    let m = w.dim();
    let mut out = zeros(m);
    for (al, c) in v.iter().enumerate() {
        let fiber: Vec<Rat> = (0..m).map(|b| w.left().get(i, al, b).clone()).collect();
        axpy(&mut out, c, &fiber);
    }
    out
}

fn act_right(w: &KvModule, v: &[Rat], i: usize) -> Vec<Rat> {
    let m = w.dim();
    let mut out = zeros(m);
    for (al, c) in v.iter().enumerate() {
        let fiber: Vec<Rat> = (0..m).map(|b| w.right().get(al, i, b).clone()).collect();
        axpy(&mut out, c, &fiber);
    }
    out
}

/// `(e_i e_j) x - e_i (e_j x)`.
pub fn left_associator(w: &KvModule, i: usize, j: usize, x: &[Rat]) -> Vec<Rat> {
    let t = w.algebra().product();
    let mut out = zeros(w.dim());
    for (l, c) in mul(t, i, j).iter().enumerate() {
        axpy(&mut out, c, &act_left(w, l, x));
    }
    let inner = act_left(w, j, x);
    let outer = act_left(w, i, &inner);
    out.iter().zip(&outer).map(|(a, b)| a - b).collect()
}

pub fn left_associator_vanishes(w: &KvModule, x: &[Rat]) -> bool {
    let n = w.algebra().dim();
    (0..n).all(|i| (0..n).all(|j| left_associator(w, i, j, x).iter().all(Rat::is_zero)))
}

/// `a -> -a x + x a`.
pub fn coboundary0(w: &KvModule, x: &[Rat]) -> Cochain {
    let n = w.algebra().dim();
    Cochain::from_fn(n, w.dim(), 1, |t| {
        let l = act_left(w, t[0], x);
        let r = act_right(w, x, t[0]);
        r.iter().zip(&l).map(|(a, b)| a - b).collect()
    })
}

/// The coboundary of a cochain of degree `q >= 1`, term by term.
pub fn coboundary(w: &KvModule, f: &Cochain) -> Cochain {
    let t = w.algebra().product();
    let (n, m, q) = (w.algebra().dim(), w.dim(), f.degree());
    assert!(q >= 1);
    Cochain::from_fn(n, m, q + 1, |args| {
        let mut out = zeros(m);
        for j in 0..q {
            let rest: Vec<usize> = (0..=q).filter(|&s| s != j).map(|s| args[s]).collect();
            let mut term = act_left(w, args[j], f.at(&rest));
            for s in (0..=q).filter(|&s| s != j) {
                let slot = if s < j { s } else { s - 1 };
                for (l, c) in mul(t, args[j], args[s]).iter().enumerate() {
                    let mut a = rest.clone();
                    a[slot] = l;
                    axpy(&mut term, &-c, f.at(&a));
                }
            }
            let mut a: Vec<usize> = (0..q).filter(|&s| s != j).map(|s| args[s]).collect();
            a.push(args[j]);
            let last = act_right(w, f.at(&a), args[q]);
            axpy(&mut term, &Rat::one(), &last);
            let sign = if j % 2 == 0 { -Rat::one() } else { Rat::one() };
            axpy(&mut out, &sign, &term);
        }
        out
    })
}

/// `d(C_q)` inside `C_{q+1}`.
pub fn coboundary_image(w: &KvModule, q: usize) -> Subspace {
    let (n, m) = (w.algebra().dim(), w.dim());
    let len = n.pow(q as u32) * m;
    let vecs: Vec<Vec<Rat>> = (0..len)
        .map(|idx| {
            let mut v = zeros(len);
            v[idx] = Rat::one();
            let f = Cochain::from_values(n, m, q, v).unwrap();
            coboundary(w, &f).into_values()
        })
        .collect();
    Subspace::span(n.pow(q as u32 + 1) * m, &vecs).unwrap()
}

pub fn in_image(mat: &Mat, v: &[Rat]) -> bool {
    mat.solve(v).unwrap().is_some()
}

/// `H` with `e_i H = e_i` for all `i`, searched over integers in `[-2, 2]`.
pub fn right_identity(t: &Tensor3) -> Option<Vec<Rat>> {
    let n = t.dims()[0];
    let total = 5usize.pow(n as u32);
    (0..total).find_map(|code| {
        let mut c = code;
        let h: Vec<Rat> = (0..n)
            .map(|_| {
                let v = (c % 5) as i64 - 2;
                c /= 5;
                Rat::from_int(v)
            })
            .collect();
        let ok = (0..n).all(|i| {
            let e: Vec<Rat> = (0..n).map(|k| Rat::from_int((k == i) as i64)).collect();
            mul_vec_right(t, i, &h) == e
        });
        ok.then_some(h)
    })
}

/// First nonzero `g` with entries in `{-1, 0, 1}` and
/// `a g(b,c) - g(ab,c) - g(b,ac) = 0` for the left action.
pub fn parallel_basis_cochain(w: &KvModule) -> Option<Cochain> {
    let t = w.algebra().product();
    let (n, m) = (w.algebra().dim(), w.dim());
    let len = n * n * m;
    for code in 1..3usize.pow(len as u32) {
        let mut c = code;
        let vals: Vec<Rat> = (0..len)
            .map(|_| {
                let v = (c % 3) as i64 - 1;
                c /= 3;
                Rat::from_int(v)
            })
            .collect();
        if vals.iter().all(Rat::is_zero) {
            continue;
        }
        let g = Cochain::from_values(n, m, 2, vals).unwrap();
        let parallel = (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let mut r = act_left(w, i, g.at(&[j, k]));
                    for (l, c) in mul(t, i, j).iter().enumerate() {
                        axpy(&mut r, &-c, g.at(&[l, k]));
                    }
                    for (l, c) in mul(t, i, k).iter().enumerate() {
                        axpy(&mut r, &-c, g.at(&[j, l]));
                    }
                    r.iter().all(Rat::is_zero)
                })
            })
        });
        if parallel {
            return Some(g);
        }
    }
    None
}
