use std::fmt;

use super::field::Field;
use crate::error::{Error, Result};

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    pub reduced: Matrix<F>,
    /// Pivot column of each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: F) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.data.iter().position(|x| !x.is_zero()).map(|p| (p / self.cols, p % self.cols))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, F::plus)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, F::minus)
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(&F, &F) -> F) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| op(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Self {
        self.map(F::negated)
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conjugate())
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.plus(self.get(i, i)))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn vstack(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(Matrix { rows: self.rows + rhs.rows, cols: self.cols, data })
    }

    /// `[[a, b], [c, d]]`.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        a.hstack(b)?.vstack(&c.hstack(d)?)
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn write_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Gauss-Jordan elimination with first-nonzero pivoting.
    pub fn echelon(&self) -> Echelon<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inverse().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j).minus(&factor.times(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the null space, one basis vector per column.
    pub fn kernel(&self) -> Self {
        let Echelon { reduced, pivots } = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Self::zeros(self.cols, free.len());
        for (col, &f) in free.iter().enumerate() {
            k.set(f, col, F::one());
            for (row, &p) in pivots.iter().enumerate() {
                k.set(p, col, reduced.get(row, f).negated());
            }
        }
        k
    }

    /// Linearly independent subset of the columns spanning the column space.
    pub fn column_basis(&self) -> Self {
        let pivots = self.echelon().pivots;
        self.select_columns(&pivots)
    }

    /// Standard basis vectors completing the column space to the whole
    /// codomain; their images span the cokernel.
    pub fn cokernel_basis(&self) -> Self {
        let aug = self.hstack(&Self::identity(self.rows)).expect("same row count");
        let pivots = aug.echelon().pivots;
        let extra: Vec<usize> = pivots.iter().filter(|&&p| p >= self.cols).map(|p| p - self.cols).collect();
        Self::identity(self.rows).select_columns(&extra)
    }

    /// Some `X` with `self * X = rhs`, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve: row counts differ");
        let aug = self.hstack(rhs).expect("same row count");
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, reduced.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Columns of `self` that extend a basis of span(`sub`) to a basis of
    /// span(`sub`) + span(`self`). Both matrices have the same row count.
    pub fn quotient_representatives(&self, sub: &Self) -> Self {
        let aug = sub.hstack(self).expect("same row count");
        let pivots = aug.echelon().pivots;
        let picked: Vec<usize> = pivots.iter().filter(|&&p| p >= sub.cols).map(|p| p - sub.cols).collect();
        self.select_columns(&picked)
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank, kernel and cokernel of a matrix, as returned by [`solve_linear`].
#[derive(Clone, Debug)]
pub struct LinearReport<F: Field> {
    pub rank: usize,
    pub kernel: Matrix<F>,
    pub cokernel: Matrix<F>,
}

/// Exact rank/kernel/cokernel in one call.
pub fn solve_linear<F: Field>(m: &Matrix<F>) -> LinearReport<F> {
    LinearReport { rank: m.rank(), kernel: m.kernel(), cokernel: m.cokernel_basis() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::field::{integer, rational, Gaussian, Rational};

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| integer(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_has_full_rank_and_trivial_kernel() {
        let i = Matrix::<Rational>::identity(4);
        let rep = solve_linear(&i);
        assert_eq!(rep.rank, 4);
        assert_eq!(rep.kernel.ncols(), 0);
        assert_eq!(rep.cokernel.ncols(), 0);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let z = Matrix::<Rational>::zeros(3, 2);
        let rep = solve_linear(&z);
        assert_eq!(rep.rank, 0);
        assert_eq!(rep.kernel.ncols(), 2);
        assert_eq!(rep.cokernel.ncols(), 3);
    }

    #[test]
    fn rank_one_kernel_is_two_minus_one() {
        let a = q(&[&[1, 2], &[2, 4]]);
        let rep = solve_linear(&a);
        assert_eq!(rep.rank, 1);
        assert_eq!(rep.kernel.ncols(), 1);
        // The kernel line is spanned by (2, -1).
        let k = rep.kernel.column(0);
        assert_eq!(&k[0] * integer(-1), &k[1] * integer(2));
        assert!(a.mul(&rep.kernel).unwrap().is_zero());
        assert_eq!(rep.cokernel.ncols(), 1);
    }

    #[test]
    fn solve_finds_a_solution_or_reports_inconsistency() {
        let a = q(&[&[1, 1], &[0, 2]]);
        let b = q(&[&[3], &[4]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        let singular = q(&[&[1, 2], &[2, 4]]);
        assert!(singular.solve(&q(&[&[1], &[0]])).is_none());
    }

    #[test]
    fn gaussian_elimination_over_qi() {
        let i = Gaussian::new(integer(0), integer(1));
        let one = Gaussian::one();
        // [[1, i], [i, -1]] has rank 1 over Q(i).
        let m = Matrix::from_rows(vec![vec![one.clone(), i.clone()], vec![i.clone(), one.negated()]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert!(m.mul(&m.kernel()).unwrap().is_zero());
        let half = Gaussian::from_rational(&rational(1, 2));
        assert_eq!(half.times(&Gaussian::from_int(2)), one);
    }

    #[test]
    fn quotient_representatives_complete_a_subspace() {
        let v = Matrix::<Rational>::identity(3);
        let sub = q(&[&[1], &[1], &[0]]);
        let reps = v.quotient_representatives(&sub);
        assert_eq!(reps.ncols(), 2);
        assert_eq!(sub.hstack(&reps).unwrap().rank(), 3);
    }
}
