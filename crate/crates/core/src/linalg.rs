//! Dense exact linear algebra over [`Rat`].
//!
//! Elimination is fraction-free: every row is first scaled to integers and
//! reduced with Bareiss' exact-division scheme, so intermediate entries stay
//! bounded by minors of the input. Rationals only reappear when the echelon
//! form is normalised to reduced row-echelon form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Rat>>", into = "Vec<Vec<Rat>>")]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from equal-length rows. A zero-row input has zero columns.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(
                "matrix rows have unequal lengths".into(),
            ));
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer convenience constructor; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Rat>]) -> Result<Self> {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let rows = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend_from_slice(other.row(i));
                r
            })
            .collect();
        Mat::from_rows(rows)
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        Rref::of(self)
    }

    pub fn rank(&self) -> usize {
        bareiss(integer_rows(self), self.cols).1.len()
    }

    /// Basis of `{v : self * v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let rref = self.rref();
        let basis = rref.kernel_vectors();
        Subspace::span(self.cols, &basis).expect("kernel vectors have ambient length")
    }

    /// Span of the columns.
    pub fn image(&self) -> Subspace {
        Subspace::from_rref(self.transpose().rref())
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(n)).ok()?;
        let rref = aug.rref();
        if (0..n).any(|i| rref.pivots.get(i) != Some(&i)) {
            return None;
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = rref.rows[i][n + j].clone();
            }
        }
        Some(inv)
    }

    /// Some `x` with `self * x = b`, or `None` when `b` is not in the column space.
    pub fn solve(&self, b: &[Rat]) -> Result<Option<Vec<Rat>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let aug = self.hstack(&Mat::from_cols(self.rows, &[b.to_vec()])?)?;
        let rref = aug.rref();
        if rref.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (k, &p) in rref.pivots.iter().enumerate() {
            x[p] = rref.rows[k][self.cols].clone();
        }
        Ok(Some(x))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl TryFrom<Vec<Vec<Rat>>> for Mat {
    type Error = Error;
    fn try_from(rows: Vec<Vec<Rat>>) -> Result<Self> {
        Mat::from_rows(rows)
    }
}

impl From<Mat> for Vec<Vec<Rat>> {
    fn from(m: Mat) -> Self {
        m.to_rows()
    }
}

/// Reduced row-echelon form: nonzero rows only, with their pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub cols: usize,
    pub rows: Vec<Vec<Rat>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    fn of(m: &Mat) -> Self {
        let (ints, pivots) = bareiss(integer_rows(m), m.cols);
        let rank = pivots.len();
        let mut rows: Vec<Vec<Rat>> = ints
            .into_iter()
            .take(rank)
            .map(|r| r.into_iter().map(Rat::from).collect())
            .collect();
        // Back-substitution from the last pivot upwards.
        for k in (0..rank).rev() {
            let p = pivots[k];
            let inv = rows[k][p].recip().expect("pivot is nonzero");
            for x in rows[k].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            let (above, rest) = rows.split_at_mut(k);
            let pivot_row = &rest[0];
            for row in above.iter_mut() {
                let f = row[p].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        Rref {
            cols: m.cols,
            rows,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// One kernel vector per free column, with a 1 in that column.
    pub fn kernel_vectors(&self) -> Vec<Vec<Rat>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (k, &p) in self.pivots.iter().enumerate() {
                    v[p] = -&self.rows[k][f];
                }
                v
            })
            .collect()
    }
}

/// Scales each row by the lcm of its denominators.
fn integer_rows(m: &Mat) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect()
}

/// Fraction-free elimination to row-echelon form. Returns the reduced rows
/// (pivot rows first) and the pivot columns.
fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let prow = &top[r];
        let pv = &prow[c];
        for row in bottom.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = pv * &row[j] - &f * &prow[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = top[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// A linear subspace of `F^ambient`, held as a reduced row-echelon basis so
/// that equal subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rat>>,
    #[serde(skip)]
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::from_rref(Mat::identity(ambient).rref())
    }

    pub fn span(ambient: usize, vectors: &[Vec<Rat>]) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Subspace::zero(ambient));
        }
        let m = Mat::from_rows(vectors.to_vec())?;
        if m.cols() != ambient {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {} in ambient dimension {ambient}",
                m.cols()
            )));
        }
        Ok(Subspace::from_rref(m.rref()))
    }

    fn from_rref(r: Rref) -> Self {
        Subspace {
            ambient: r.cols,
            basis: r.rows,
            pivots: r.pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// The residual of `v` after subtracting its echelon projection.
    fn residual(&self, v: &[Rat]) -> Vec<Rat> {
        let mut w = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let f = w[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                self.ambient
            )));
        }
        Ok(self.residual(v).iter().all(Rat::is_zero))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rat]) -> Result<Option<Vec<Rat>>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &v)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        // Solve sum a_i s_i - sum b_j o_j = 0 and map back through the s_i.
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| v.iter().map(|x| -x).collect()));
        let m = Mat::from_cols(self.ambient, &cols)?;
        let k = m.kernel();
        let vecs: Vec<Vec<Rat>> = k
            .basis()
            .iter()
            .map(|coef| {
                let mut v = vec![Rat::zero(); self.ambient];
                for (c, b) in coef.iter().zip(&self.basis) {
                    if c.is_zero() {
                        continue;
                    }
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += c * y;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient, &vecs)
    }

    /// Vectors from `candidates`, in order, that extend `self` independently.
    /// Their span is a complement of `self` inside `self + span(candidates)`.
    pub fn complement_from(&self, candidates: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>> {
        let mut acc = self.clone();
        let mut picked = Vec::new();
        for c in candidates {
            if !acc.contains(c)? {
                picked.push(c.clone());
                let mut v = acc.basis.clone();
                v.push(c.clone());
                acc = Subspace::span(self.ambient, &v)?;
            }
        }
        Ok(picked)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of ambient dimension {} and {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }
}
