//! Geometric examples: the `S_{alpha,beta}` cocycles on the affine algebra,
//! geodesics of the deformed connections, and radiant primitives of
//! parallel 2-cochains.
//!
//! Geodesic integration is the one place that uses floating point.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{KvAlgebra, KvModule, Tensor3};
use crate::cochain::Cochain;
use crate::complex::KvComplex;
use crate::deform::kv_bracket;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::{Mat, Subspace};
use crate::rat::Rat;

pub fn aff_algebra() -> KvAlgebra {
    fixtures::aff()
}

/// `S(e1,e1) = alpha e1 + beta e2`, `S(e1,e2) = S(e2,e1) = alpha e2`,
/// `S(e2,e2) = 0`.
pub fn s_alpha_beta(alpha: &Rat, beta: &Rat) -> Tensor3 {
    let mut s = Tensor3::zeros(2, 2, 2);
    s.set(0, 0, 0, alpha.clone());
    s.set(0, 0, 1, beta.clone());
    s.set(0, 1, 1, alpha.clone());
    s.set(1, 0, 1, alpha.clone());
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SCocycleReport {
    pub alpha: Rat,
    pub beta: Rat,
    pub cocycle: bool,
    pub self_bracket_zero: bool,
    /// `None` when `alpha = 0`, where no claim is made.
    pub not_coboundary: Option<bool>,
    /// `mu + t S` passes the KV check at each sampled `t`.
    pub family: Vec<(Rat, bool)>,
}

impl SCocycleReport {
    pub fn passed(&self) -> bool {
        self.cocycle
            && self.self_bracket_zero
            && self.not_coboundary != Some(false)
            && self.family.iter().all(|(_, ok)| *ok)
    }
}

pub fn family_samples() -> Vec<Rat> {
    vec![Rat::from_int(1), Rat::from_int(-1), Rat::new(1, 2), Rat::from_int(7)]
}

pub fn s_cocycle_suite(alpha: &Rat, beta: &Rat) -> Result<SCocycleReport> {
    let a = Arc::new(aff_algebra());
    let s = s_alpha_beta(alpha, beta);
    let cx = KvComplex::new(a.regular_bimodule())?;
    let sc = Cochain::from_bilinear(&s);
    let cocycle = cx.is_cocycle(&sc)?;
    let self_bracket_zero = kv_bracket(&s, &s)?.is_zero();
    let not_coboundary = if alpha.is_zero() {
        None
    } else {
        Some(cx.is_coboundary(&sc)?.is_none())
    };
    let family = family_samples()
        .into_iter()
        .map(|t| {
            let ok = a.with_product(a.product().add(&s.scale(&t))).map(|b| b.is_kv()).unwrap_or(false);
            (t, ok)
        })
        .collect();
    Ok(SCocycleReport {
        alpha: alpha.clone(),
        beta: beta.clone(),
        cocycle,
        self_bracket_zero,
        not_coboundary,
        family,
    })
}

/// `2 x'' + alpha x'^2 = 0`, `2 y'' + beta x'^2 + (1 + 2 alpha) x' y' = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicProblem {
    pub alpha: f64,
    pub beta: f64,
    /// `(x, y, x', y')` at `t0`.
    pub state: [f64; 4],
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
    pub blow_up_threshold: f64,
    pub blow_up_tolerance: f64,
    pub min_step: f64,
    /// Accepted local discrepancy between one step and two half steps.
    pub local_tolerance: f64,
}

impl GeodesicProblem {
    pub fn new(alpha: f64, beta: f64, state: [f64; 4], t0: f64, t1: f64) -> Self {
        GeodesicProblem {
            alpha,
            beta,
            state,
            t0,
            t1,
            step: 1e-3,
            blow_up_threshold: 1e8,
            blow_up_tolerance: 1e-6,
            min_step: 1e-14,
            local_tolerance: 1e-12,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.beta, self.t0, self.t1]
            .iter()
            .chain(&self.state)
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Input("geodesic parameters must be finite".into()));
        }
        if !(self.step > 0.0 && self.blow_up_threshold > 0.0 && self.min_step > 0.0) {
            return Err(Error::Input("step sizes and threshold must be positive".into()));
        }
        Ok(())
    }

    fn rhs(&self, s: &[f64; 4]) -> [f64; 4] {
        let (vx, vy) = (s[2], s[3]);
        [
            vx,
            vy,
            -0.5 * self.alpha * vx * vx,
            -0.5 * (self.beta * vx * vx + (1.0 + 2.0 * self.alpha) * vx * vy),
        ]
    }

    fn rk4(&self, s: &[f64; 4], h: f64) -> [f64; 4] {
        let add = |a: &[f64; 4], b: &[f64; 4], c: f64| {
            [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]]
        };
        let k1 = self.rhs(s);
        let k2 = self.rhs(&add(s, &k1, h / 2.0));
        let k3 = self.rhs(&add(s, &k2, h / 2.0));
        let k4 = self.rhs(&add(s, &k3, h));
        let mut out = *s;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    ReachedEnd,
    /// The velocity left the threshold within `[t_star - width, t_star]`
    /// (in the direction of integration).
    BlowUp { t_star: f64, width: f64 },
    StepUnderflow { t: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    /// Samples in integration order; `t` is strictly monotone.
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,vx,vy\n");
        for s in &self.samples {
            out.push_str(&format!("{:e},{:e},{:e},{:e},{:e}\n", s.t, s.x, s.y, s.vx, s.vy));
        }
        out
    }
}

/// Classical RK4 with the nominal step, halved whenever one step and two half
/// steps disagree beyond the local tolerance. The run stops at `t1`, when a
/// velocity exceeds the blow-up threshold, or when the step underflows.
pub fn integrate_geodesic(p: &GeodesicProblem) -> Result<Trajectory> {
    p.validate()?;
    let dir = if p.t1 >= p.t0 { 1.0 } else { -1.0 };
    let mut t = p.t0;
    let mut s = p.state;
    let push = |samples: &mut Vec<Sample>, t: f64, s: &[f64; 4]| {
        samples.push(Sample {
            t,
            x: s[0],
            y: s[1],
            vx: s[2],
            vy: s[3],
        })
    };
    let mut samples = Vec::new();
    push(&mut samples, t, &s);
    let blown = |s: &[f64; 4]| {
        !s.iter().all(|x| x.is_finite()) || s[2].abs() > p.blow_up_threshold || s[3].abs() > p.blow_up_threshold
    };
    let mut h = p.step;
    loop {
        let remaining = (p.t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok(Trajectory {
                samples,
                termination: Termination::ReachedEnd,
            });
        }
        let hh = h.min(remaining);
        let full = p.rk4(&s, dir * hh);
        let half = p.rk4(&p.rk4(&s, dir * hh / 2.0), dir * hh / 2.0);
        let scale = 1.0 + half.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let err = full
            .iter()
            .zip(&half)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if blown(&half) || !(err <= p.local_tolerance * scale) {
            if blown(&half) && hh <= p.blow_up_tolerance {
                return Ok(Trajectory {
                    samples,
                    termination: Termination::BlowUp {
                        t_star: t + dir * hh,
                        width: hh,
                    },
                });
            }
            h = hh / 2.0;
            if h < p.min_step {
                return Ok(Trajectory {
                    samples,
                    termination: Termination::StepUnderflow { t },
                });
            }
            continue;
        }
        let next_t = t + dir * hh;
        if next_t == t {
            return Ok(Trajectory {
                samples,
                termination: Termination::StepUnderflow { t },
            });
        }
        t = if hh == remaining { p.t1 } else { next_t };
        s = half;
        push(&mut samples, t, &s);
        if blown(&s) {
            return Ok(Trajectory {
                samples,
                termination: Termination::BlowUp { t_star: t, width: hh },
            });
        }
        h = (2.0 * h).min(p.step);
    }
}

/// `x(t) = (2/alpha) ln|alpha t / 2 + u| + v`.
pub fn closed_form_x(alpha: f64, u: f64, v: f64, t: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::Precondition("alpha must be nonzero".into()));
    }
    let s = alpha * t / 2.0 + u;
    if s == 0.0 {
        return Err(Error::Precondition(format!("x has a pole at t = {t}")));
    }
    Ok(2.0 / alpha * s.abs().ln() + v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub expected: f64,
    pub points: usize,
}

/// Fits `y' + beta x' / (1 + alpha)` against `1/x'` on a log-log scale; its
/// slope plus one is the exponent of the non-logarithmic part of `y` as a
/// power of `alpha t / 2 + u`.
pub fn y_power_law_fit(traj: &Trajectory, alpha: f64, beta: f64) -> Result<PowerLawFit> {
    if alpha == 0.0 || alpha == -1.0 {
        return Err(Error::Precondition("alpha must avoid 0 and -1".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &traj.samples {
        let r = s.vy + beta * s.vx / (1.0 + alpha);
        if s.vx != 0.0 && r != 0.0 && r.is_finite() && s.vx.is_finite() {
            xs.push((1.0 / s.vx).abs().ln());
            ys.push(r.abs().ln());
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::Precondition("fit window has fewer than three usable points".into()));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 1e-12 * n as f64 {
        return Err(Error::Precondition("fit window is degenerate".into()));
    }
    Ok(PowerLawFit {
        exponent: sxy / sxx + 1.0,
        expected: -(1.0 + alpha) / alpha,
        points: n,
    })
}

/// Solutions `H` of `e_i H = e_i` for every `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadiantSet {
    pub particular: Vec<Rat>,
    /// Directions that can be added to `particular`.
    pub directions: Subspace,
}

impl RadiantSet {
    pub fn contains(&self, h: &[Rat]) -> Result<bool> {
        let d: Vec<Rat> = h.iter().zip(&self.particular).map(|(a, b)| a - b).collect();
        self.directions.contains(&d)
    }
}

pub fn find_radiant(a: &KvAlgebra) -> Result<Option<RadiantSet>> {
    let n = a.dim();
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            rows.push((0..n).map(|j| a.basis_mul(i, j)[k].clone()).collect());
            rhs.push(if i == k { Rat::one() } else { Rat::zero() });
        }
    }
    if n == 0 {
        return Ok(Some(RadiantSet {
            particular: Vec::new(),
            directions: Subspace::zero(0),
        }));
    }
    let m = Mat::from_rows(rows)?;
    Ok(m.solve(&rhs)?.map(|particular| RadiantSet {
        particular,
        directions: m.kernel(),
    }))
}

/// `theta(a) = g(H, a)` for a right identity `H` and a 2-cochain `g` with
/// values in the left module `W` that is parallel:
/// `a g(b,c) - g(ab,c) - g(b,ac) = 0`. Then `d theta = -g`.
pub fn radiant_primitive(w: &KvModule, h: &[Rat], g: &Cochain) -> Result<Cochain> {
    let a = w.algebra();
    let (n, m) = (a.dim(), w.dim());
    if h.len() != n || g.degree() != 2 || g.arg_dim() != n || g.value_dim() != m {
        return Err(Error::DimensionMismatch("H must lie in A and g in C_2(A, W)".into()));
    }
    for i in 0..n {
        let e = a.basis(i);
        if a.mul(&e, h)? != e {
            return Err(Error::Precondition(format!("e{} H != e{}", i + 1, i + 1)));
        }
    }
    let left = w.left_part();
    if let Some(v) = left.module_violation() {
        return Err(Error::Precondition(format!("W is not a left KV-module: {v:?}")));
    }
    if let Some(t) = parallel_violation(&left, g)? {
        return Err(Error::Precondition(format!("g is not parallel at {t:?}")));
    }
    let theta = Cochain::from_fn(n, m, 1, |x| {
        g.eval(&[h.to_vec(), a.basis(x[0])]).expect("shapes checked")
    });
    let cx = KvComplex::new(left)?;
    let dt = cx.coboundary(&theta)?;
    if !dt.add(g).is_zero() {
        return Err(Error::Precondition("d theta + g does not vanish".into()));
    }
    Ok(theta)
}

/// First basis triple where `a g(b,c) - g(ab,c) - g(b,ac)` is nonzero.
pub fn parallel_violation(w: &KvModule, g: &Cochain) -> Result<Option<[usize; 3]>> {
    let a = w.algebra();
    let n = a.dim();
    for i in 0..n {
        let e = a.basis(i);
        for j in 0..n {
            for k in 0..n {
                let mut r = w.act_left(&e, g.at(&[j, k]))?;
                let g1 = g.eval(&[a.basis_mul(i, j).to_vec(), a.basis(k)])?;
                let g2 = g.eval(&[a.basis(j), a.basis_mul(i, k).to_vec()])?;
                for ((x, y), z) in r.iter_mut().zip(&g1).zip(&g2) {
                    *x -= y;
                    *x -= z;
                }
                if r.iter().any(|x| !x.is_zero()) {
                    return Ok(Some([i, j, k]));
                }
            }
        }
    }
    Ok(None)
}

/// The parallel 2-cochains of a left module, as a subspace of `C_2(A, W)`.
pub fn parallel_cochains(w: &KvModule) -> Result<Subspace> {
    let a = w.algebra();
    let (n, m) = (a.dim(), w.dim());
    let dim = n * n * m;
    let mut cols = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mut v = vec![Rat::zero(); dim];
        v[idx] = Rat::one();
        let g = Cochain::from_values(n, m, 2, v)?;
        let mut col = Vec::with_capacity(n * n * n * m);
        for i in 0..n {
            let e = a.basis(i);
            for j in 0..n {
                for k in 0..n {
                    let mut r = w.act_left(&e, g.at(&[j, k]))?;
                    let g1 = g.eval(&[a.basis_mul(i, j).to_vec(), a.basis(k)])?;
                    let g2 = g.eval(&[a.basis(j), a.basis_mul(i, k).to_vec()])?;
                    for ((x, y), z) in r.iter_mut().zip(&g1).zip(&g2) {
                        *x -= y;
                        *x -= z;
                    }
                    col.extend(r);
                }
            }
        }
        cols.push(col);
    }
    if dim == 0 {
        return Ok(Subspace::zero(0));
    }
    Ok(Mat::from_cols(n * n * n * m, &cols)?.kernel())
}
