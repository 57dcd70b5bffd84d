//! Finite groups given by multiplication tables, their rational group
//! rings, and matrices over those rings.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{Field, Matrix, Rational};

/// A finite group presented by its full multiplication table.
///
/// Construct through [`FiniteGroup::from_table`], which validates the group
/// axioms and precomputes inverses and conjugacy classes.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let m = table.len();
        if m == 0 || table.iter().any(|row| row.len() != m) {
            return Err(Error::TableShape);
        }
        for (row, entries) in table.iter().enumerate() {
            for (col, &value) in entries.iter().enumerate() {
                if value >= m {
                    return Err(Error::TableOutOfRange { row, col, value, order: m });
                }
            }
        }
        // Left and right translations by a group element are bijections, so
        // a repeated entry in a row or column rules out an inverse for it.
        for by_row in [true, false] {
            for a in 0..m {
                let mut seen = vec![false; m];
                for x in 0..m {
                    let v = if by_row { table[a][x] } else { table[x][a] };
                    if std::mem::replace(&mut seen[v], true) {
                        return Err(Error::NoInverse { element: a });
                    }
                }
            }
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or(Error::NoIdentity)?;
        let mut inverse = vec![0; m];
        for a in 0..m {
            inverse[a] = (0..m)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or(Error::NoInverse { element: a })?;
        }
        for a in 0..m {
            for b in 0..m {
                let ab = table[a][b];
                for c in 0..m {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::NonAssociative { a, b, c });
                    }
                }
            }
        }
        let mut class_of = vec![usize::MAX; m];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        // Start with the identity so class 0 is always {e}.
        let order: Vec<usize> = std::iter::once(identity).chain((0..m).filter(|&a| a != identity)).collect();
        for a in order {
            if class_of[a] != usize::MAX {
                continue;
            }
            let idx = classes.len();
            let mut class: Vec<usize> = (0..m).map(|g| table[table[g][a]][inverse[g]]).collect();
            class.sort_unstable();
            class.dedup();
            for &x in &class {
                class_of[x] = idx;
            }
            classes.push(class);
        }
        let labels = (0..m).map(|i| if i == identity { "e".to_string() } else { format!("g{i}") }).collect();
        Ok(FiniteGroup { mult: table, identity, inverse, classes, class_of, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for a group of order {}",
                labels.len(),
                self.order()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn trivial() -> Self {
        Self::from_table(vec![vec![0]]).expect("trivial group")
    }

    /// Cyclic group of order `n`, element `i` standing for `g^i`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic group")
    }

    /// Group of permutations given by their images, closed under composition.
    /// `(p * q)(i) = p(q(i))`.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self> {
        let find = |p: &Vec<usize>| perms.iter().position(|q| q == p);
        let mut table = vec![vec![0; perms.len()]; perms.len()];
        for (a, p) in perms.iter().enumerate() {
            for (b, q) in perms.iter().enumerate() {
                let pq: Vec<usize> = q.iter().map(|&i| p[i]).collect();
                table[a][b] = find(&pq).ok_or_else(|| Error::InvalidArgument("permutations not closed".into()))?;
            }
        }
        Self::from_table(table)
    }

    /// The symmetric group on three letters, identity first.
    pub fn symmetric3() -> Self {
        let perms = vec![
            vec![0, 1, 2],
            vec![1, 0, 2],
            vec![0, 2, 1],
            vec![2, 1, 0],
            vec![1, 2, 0],
            vec![2, 0, 1],
        ];
        Self::from_permutations(&perms).expect("S3")
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Matrix of `x -> x * g^{-1}` on Q[pi] in the group basis. This is the
    /// left action of pi that commutes with left multiplication by the ring.
    pub fn translation_matrix<F: Field>(&self, g: usize) -> Matrix<F> {
        let m = self.order();
        let gi = self.inverse[g];
        let mut out = Matrix::zeros(m, m);
        for y in 0..m {
            out.set(self.mult[y][gi], y, F::one());
        }
        out
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {}, {} classes)", self.order(), self.classes.len())
    }
}

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Element of F[pi], coefficients indexed by group element.
#[derive(Clone, PartialEq)]
pub struct GroupRingElement<F = Rational> {
    group: Arc<FiniteGroup>,
    coeffs: Vec<F>,
}

impl<F: Field> GroupRingElement<F> {
    pub fn new(group: Arc<FiniteGroup>, coeffs: Vec<F>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                group.order()
            )));
        }
        Ok(GroupRingElement { group, coeffs })
    }

    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        let m = group.order();
        GroupRingElement { group, coeffs: vec![F::zero(); m] }
    }

    pub fn one(group: Arc<FiniteGroup>) -> Self {
        Self::basis(group.clone(), group.identity())
    }

    pub fn basis(group: Arc<FiniteGroup>, g: usize) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[g] = F::one();
        e
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Field::is_zero)
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.plus(b)).collect();
        GroupRingElement { group: self.group.clone(), coeffs }
    }

    pub fn minus(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.minus(b)).collect();
        GroupRingElement { group: self.group.clone(), coeffs }
    }

    pub fn negated(&self) -> Self {
        self.scale(&F::one().negated())
    }

    pub fn scale(&self, s: &F) -> Self {
        GroupRingElement { group: self.group.clone(), coeffs: self.coeffs.iter().map(|a| a.times(s)).collect() }
    }

    pub fn times(&self, rhs: &Self) -> Self {
        let g = &self.group;
        let mut out = vec![F::zero(); g.order()];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in rhs.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let ab = g.mul(a, b);
                out[ab] = out[ab].plus(&x.times(y));
            }
        }
        GroupRingElement { group: g.clone(), coeffs: out }
    }

    /// The anti-involution `sum a_g g -> sum conj(a_g) g^{-1}`.
    pub fn bar(&self) -> Self {
        let g = &self.group;
        let mut out = vec![F::zero(); g.order()];
        for (a, x) in self.coeffs.iter().enumerate() {
            out[g.inverse(a)] = x.conjugate();
        }
        GroupRingElement { group: g.clone(), coeffs: out }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> GroupRingElement<G> {
        GroupRingElement { group: self.group.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Matrix of left multiplication by `self` on F[pi] in the group basis.
    pub fn left_multiplication(&self) -> Matrix<F> {
        let g = &self.group;
        let m = g.order();
        let mut out = Matrix::<F>::zeros(m, m);
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for y in 0..m {
                let row = g.mul(a, y);
                let v = out.get(row, y).plus(x);
                out.set(row, y, v);
            }
        }
        out
    }
}

impl<F: Field> fmt::Debug for GroupRingElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| format!("({c}){}", self.group.labels()[g]))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Outcome of [`idempotent_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdempotentReport {
    pub idempotent: bool,
    pub central: bool,
}

pub fn idempotent_check<F: Field>(p: &GroupRingElement<F>) -> IdempotentReport {
    let g = p.group();
    let central = (0..g.order()).all(|x| {
        let e = GroupRingElement::basis(g.clone(), x);
        e.times(p) == p.times(&e)
    });
    IdempotentReport { idempotent: p.times(p) == *p, central }
}

/// Matrix with entries in F[pi].
#[derive(Clone, PartialEq)]
pub struct GroupAlgebraMatrix<F = Rational> {
    group: Arc<FiniteGroup>,
    rows: usize,
    cols: usize,
    /// Row-major entries, each a length-|pi| coefficient vector.
    entries: Vec<Vec<F>>,
}

impl<F: Field> GroupAlgebraMatrix<F> {
    pub fn from_elements(group: Arc<FiniteGroup>, rows: usize, cols: usize, elems: Vec<GroupRingElement<F>>) -> Result<Self> {
        if elems.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for {rows}x{cols}", elems.len())));
        }
        if elems.iter().any(|e| !same_group(&e.group, &group)) {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupAlgebraMatrix { group, rows, cols, entries: elems.into_iter().map(|e| e.coeffs).collect() })
    }

    pub fn zeros(group: Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        let m = group.order();
        GroupAlgebraMatrix { group, rows, cols, entries: vec![vec![F::zero(); m]; rows * cols] }
    }

    pub fn identity(group: Arc<FiniteGroup>, n: usize) -> Self {
        let mut out = Self::zeros(group.clone(), n, n);
        let e = group.identity();
        for i in 0..n {
            out.entries[i * n + i][e] = F::one();
        }
        out
    }

    /// Embeds a matrix over F, scalars sitting on the identity element.
    pub fn from_scalar_matrix(group: Arc<FiniteGroup>, m: &Matrix<F>) -> Self {
        let mut out = Self::zeros(group.clone(), m.nrows(), m.ncols());
        let e = group.identity();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.entries[i * m.ncols() + j][e] = m.get(i, j).clone();
            }
        }
        out
    }

    pub fn scalar(group: Arc<FiniteGroup>, elem: GroupRingElement<F>) -> Self {
        GroupAlgebraMatrix { group, rows: 1, cols: 1, entries: vec![elem.coeffs] }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> GroupRingElement<F> {
        GroupRingElement { group: self.group.clone(), coeffs: self.entries[i * self.cols + j].clone() }
    }

    pub fn set_entry(&mut self, i: usize, j: usize, e: &GroupRingElement<F>) {
        self.entries[i * self.cols + j] = e.coeffs.clone();
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.iter().all(Field::is_zero))
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|e| e.iter().any(|x| !x.is_zero()))
            .map(|p| (p / self.cols.max(1), p % self.cols.max(1)))
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if !same_group(&self.group, &rhs.group) {
            return Err(Error::GroupMismatch);
        }
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.plus(y)).collect())
            .collect();
        Ok(GroupAlgebraMatrix { group: self.group.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&F::one().negated())
    }

    pub fn scale(&self, s: &F) -> Self {
        let entries = self.entries.iter().map(|e| e.iter().map(|x| x.times(s)).collect()).collect();
        GroupAlgebraMatrix { group: self.group.clone(), rows: self.rows, cols: self.cols, entries }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if !same_group(&self.group, &rhs.group) {
            return Err(Error::GroupMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let g = &self.group;
        let m = g.order();
        let mut out = Self::zeros(g.clone(), self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self.entries[i * self.cols + l];
                if a.iter().all(Field::is_zero) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.entries[l * rhs.cols + j];
                    let dst = &mut out.entries[i * rhs.cols + j];
                    for (x, ax) in a.iter().enumerate() {
                        if ax.is_zero() {
                            continue;
                        }
                        for (y, by) in b.iter().enumerate() {
                            if by.is_zero() {
                                continue;
                            }
                            let xy = g.mul(x, y);
                            dst[xy] = dst[xy].plus(&ax.times(by));
                        }
                    }
                    debug_assert_eq!(dst.len(), m);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.entries[i * self.cols + j].clone());
            }
        }
        GroupAlgebraMatrix { group: self.group.clone(), rows: self.cols, cols: self.rows, entries }
    }

    /// Transpose with the anti-involution applied entrywise.
    pub fn adjoint(&self) -> Self {
        let t = self.transpose();
        let entries = t
            .entries
            .iter()
            .map(|e| {
                let mut out = vec![F::zero(); e.len()];
                for (a, x) in e.iter().enumerate() {
                    out[self.group.inverse(a)] = x.conjugate();
                }
                out
            })
            .collect();
        GroupAlgebraMatrix { entries, ..t }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> GroupAlgebraMatrix<G> {
        GroupAlgebraMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.iter().map(&f).collect()).collect(),
        }
    }

    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch("inconsistent 2x2 block shapes".into()));
        }
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut out = Self::zeros(a.group.clone(), rows, cols);
        for (blk, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            if !same_group(&blk.group, &a.group) {
                return Err(Error::GroupMismatch);
            }
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    out.entries[(r0 + i) * cols + c0 + j] = blk.entries[i * blk.cols + j].clone();
                }
            }
        }
        Ok(out)
    }

    pub fn regular_representation(&self) -> Matrix<F> {
        regular_representation(self)
    }
}

impl<F: Field> fmt::Debug for GroupAlgebraMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GroupAlgebraMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.entry(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Replaces every entry by its m x m left-multiplication matrix.
///
/// The result has size `(rows * m) x (cols * m)` and is a unital ring
/// homomorphism on square matrices.
pub fn regular_representation<F: Field>(a: &GroupAlgebraMatrix<F>) -> Matrix<F> {
    let m = a.group.order();
    let mut out = Matrix::zeros(a.rows * m, a.cols * m);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let block = a.entry(i, j).left_multiplication();
            out.write_block(i * m, j * m, &block);
        }
    }
    out
}

/// Block-diagonal action of `g` on `(F[pi])^rank` by right translation.
pub fn translation_action<F: Field>(group: &FiniteGroup, g: usize, rank: usize) -> Matrix<F> {
    let m = group.order();
    let block = group.translation_matrix::<F>(g);
    let mut out = Matrix::zeros(rank * m, rank * m);
    for r in 0..rank {
        out.write_block(r * m, r * m, &block);
    }
    out
}
