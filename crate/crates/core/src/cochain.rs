//! Dense multilinear cochains `A^q -> W`.
//!
//! The value of a degree-`q` cochain on basis arguments `(e_{i_1}, .., e_{i_q})`
//! is a vector of length `m`; the table is flattened big-endian over the
//! arguments with the value coordinate last:
//! `index = (sum_t i_t n^(q-t)) * m + beta`.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{flatten, unflatten, Tensor3};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rat::Rat;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cochain {
    degree: usize,
    arg_dim: usize,
    value_dim: usize,
    values: Vec<Rat>,
}

impl Serialize for Cochain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Cochain", 2)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

/// Number of cells of a degree-`q` cochain table, saturating.
pub fn table_cells(n: usize, m: usize, q: usize) -> u128 {
    (n as u128)
        .checked_pow(q as u32)
        .and_then(|p| p.checked_mul(m as u128))
        .unwrap_or(u128::MAX)
}

impl Cochain {
    pub fn zero(n: usize, m: usize, q: usize) -> Self {
        Cochain {
            degree: q,
            arg_dim: n,
            value_dim: m,
            values: vec![Rat::zero(); n.pow(q as u32) * m],
        }
    }

    pub fn from_values(n: usize, m: usize, q: usize, values: Vec<Rat>) -> Result<Self> {
        let want = n.pow(q as u32) * m;
        if values.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "degree-{q} cochain over dims ({n},{m}) needs {want} values, got {}",
                values.len()
            )));
        }
        Ok(Cochain {
            degree: q,
            arg_dim: n,
            value_dim: m,
            values,
        })
    }

    /// Builds a cochain from its values on basis tuples.
    pub fn from_fn(n: usize, m: usize, q: usize, mut f: impl FnMut(&[usize]) -> Vec<Rat>) -> Self {
        let mut c = Cochain::zero(n, m, q);
        let mut args = vec![0usize; q];
        for t in 0..n.pow(q as u32) {
            unflatten(t, n, &mut args);
            let v = f(&args);
            assert_eq!(v.len(), m, "value has wrong length");
            c.values[t * m..(t + 1) * m].clone_from_slice(&v);
        }
        c
    }

    /// The identity map of `F^n` as a 1-cochain.
    pub fn identity(n: usize) -> Self {
        Cochain::from_fn(n, n, 1, |a| {
            let mut v = vec![Rat::zero(); n];
            v[a[0]] = Rat::one();
            v
        })
    }

    /// A bilinear tensor `T[i][j][k]` as a 2-cochain.
    pub fn from_bilinear(t: &Tensor3) -> Self {
        let [n, n2, m] = t.dims();
        assert_eq!(n, n2, "bilinear tensor must be square in its arguments");
        Cochain::from_values(n, m, 2, t.values().to_vec()).expect("sized")
    }

    pub fn to_bilinear(&self) -> Tensor3 {
        assert_eq!(self.degree, 2, "not a 2-cochain");
        Tensor3::from_values([self.arg_dim, self.arg_dim, self.value_dim], self.values.clone())
            .expect("sized")
    }

    /// A 1-cochain as the `m x n` matrix whose column `i` is `f(e_i)`.
    pub fn to_matrix(&self) -> Mat {
        assert_eq!(self.degree, 1, "not a 1-cochain");
        let cols: Vec<Vec<Rat>> = (0..self.arg_dim).map(|i| self.at(&[i]).to_vec()).collect();
        Mat::from_cols(self.value_dim, &cols).expect("sized")
    }

    pub fn from_matrix(m: &Mat) -> Self {
        Cochain::from_fn(m.cols(), m.rows(), 1, |a| m.col(a[0]))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn arg_dim(&self) -> usize {
        self.arg_dim
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rat> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rat::is_zero)
    }

    pub fn tuple_index(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.degree);
        flatten(args, self.arg_dim)
    }

    /// Value on basis arguments.
    pub fn at(&self, args: &[usize]) -> &[Rat] {
        let t = self.tuple_index(args) * self.value_dim;
        &self.values[t..t + self.value_dim]
    }

    pub fn set(&mut self, args: &[usize], value: &[Rat]) {
        let t = self.tuple_index(args) * self.value_dim;
        self.values[t..t + self.value_dim].clone_from_slice(value);
    }

    /// Evaluation on arbitrary arguments by multilinearity.
    pub fn eval(&self, args: &[Vec<Rat>]) -> Result<Vec<Rat>> {
        if args.len() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "{} arguments for a degree-{} cochain",
                args.len(),
                self.degree
            )));
        }
        for a in args {
            if a.len() != self.arg_dim {
                return Err(Error::DimensionMismatch("argument length".into()));
            }
        }
        let mut out = vec![Rat::zero(); self.value_dim];
        let mut idx = vec![0usize; self.degree];
        for t in 0..self.arg_dim.pow(self.degree as u32) {
            unflatten(t, self.arg_dim, &mut idx);
            let mut c = Rat::one();
            for (a, &i) in args.iter().zip(&idx) {
                if a[i].is_zero() {
                    c = Rat::zero();
                    break;
                }
                c *= &a[i];
            }
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(&self.values[t * self.value_dim..]) {
                *o += &c * v;
            }
        }
        Ok(out)
    }

    fn check_same(&self, other: &Cochain) {
        assert!(
            self.degree == other.degree
                && self.arg_dim == other.arg_dim
                && self.value_dim == other.value_dim,
            "cochains live in different spaces"
        );
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.check_same(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Cochain { values, ..self.clone_shape() }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.check_same(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Cochain { values, ..self.clone_shape() }
    }

    pub fn scale(&self, c: &Rat) -> Cochain {
        let values = self.values.iter().map(|a| a * c).collect();
        Cochain { values, ..self.clone_shape() }
    }

    pub fn neg(&self) -> Cochain {
        self.scale(&-Rat::one())
    }

    fn clone_shape(&self) -> Cochain {
        Cochain {
            degree: self.degree,
            arg_dim: self.arg_dim,
            value_dim: self.value_dim,
            values: Vec::new(),
        }
    }

    /// `phi o f` for a linear map `phi` given as a `k x m` matrix.
    pub fn map_values(&self, phi: &Mat) -> Result<Cochain> {
        if phi.cols() != self.value_dim {
            return Err(Error::DimensionMismatch(
                "value map does not match the cochain's value space".into(),
            ));
        }
        let k = phi.rows();
        let tuples = self.arg_dim.pow(self.degree as u32);
        let mut values = Vec::with_capacity(tuples * k);
        for t in 0..tuples {
            let v = &self.values[t * self.value_dim..(t + 1) * self.value_dim];
            values.extend(phi.mul_vec(v)?);
        }
        Cochain::from_values(self.arg_dim, k, self.degree, values)
    }

    /// First basis tuple where the cochain is nonzero.
    pub fn first_nonzero(&self) -> Option<Vec<usize>> {
        let m = self.value_dim.max(1);
        let pos = self.values.iter().position(|x| !x.is_zero())?;
        let mut args = vec![0usize; self.degree];
        unflatten(pos / m, self.arg_dim, &mut args);
        Some(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    #[test]
    fn flattening_is_big_endian() {
        let c = Cochain::from_fn(3, 2, 2, |a| vec![r(a[0] as i64), r(a[1] as i64)]);
        // (i1, i2) = (2, 1) sits at tuple 2*3 + 1 = 7.
        assert_eq!(&c.values()[14..16], &[r(2), r(1)]);
        assert_eq!(c.at(&[2, 1]), &[r(2), r(1)]);
    }

    #[test]
    fn eval_is_multilinear() {
        let c = Cochain::from_fn(2, 1, 2, |a| vec![r((a[0] * 2 + a[1] + 1) as i64)]);
        let x = vec![r(1), r(2)];
        let y = vec![r(3), r(-1)];
        // sum x_i y_j c(i,j) with c = [[1,2],[3,4]]
        let expected = r(3) - r(2) + r(2 * 3 * 3) - r(2 * 4);
        assert_eq!(c.eval(&[x, y]).unwrap(), vec![expected]);
    }

    #[test]
    fn bilinear_round_trip() {
        let mut t = Tensor3::zeros(2, 2, 2);
        t.set(0, 1, 1, r(1));
        let c = Cochain::from_bilinear(&t);
        assert_eq!(c.at(&[0, 1]), &[r(0), r(1)]);
        assert_eq!(c.to_bilinear(), t);
    }

    #[test]
    fn matrix_round_trip() {
        let m = Mat::from_ints(&[&[1, 2, 3], &[4, 5, 6]]);
        let c = Cochain::from_matrix(&m);
        assert_eq!(c.at(&[1]), &[r(2), r(5)]);
        assert_eq!(c.to_matrix(), m);
    }

    #[test]
    fn degree_zero_is_a_vector() {
        let c = Cochain::from_values(3, 2, 0, vec![r(1), r(2)]).unwrap();
        assert_eq!(c.at(&[]), &[r(1), r(2)]);
        assert!(Cochain::from_values(3, 2, 1, vec![r(1)]).is_err());
    }
}
