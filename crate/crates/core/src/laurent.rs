//! Laurent-polynomial matrices over rational group rings, weights, and
//! finite truncation windows.
//!
//! A [`LaurentMatrix`] is stored by coefficient: `M = sum_d z^d T_d` with each
//! `T_d` a [`GroupAlgebraMatrix`]. Entrywise access through
//! [`LaurentPolynomial`] is available for I/O.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, Field, Matrix, Rational};
use crate::group::{same_group, FiniteGroup, GroupAlgebraMatrix, GroupRingElement};
use crate::numeric::{spectral_norm, to_dmatrix};

/// Entry of a Laurent matrix: finitely many nonzero group-ring coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentPolynomial {
    group: Arc<FiniteGroup>,
    terms: BTreeMap<i64, GroupRingElement>,
}

impl LaurentPolynomial {
    pub fn new(group: Arc<FiniteGroup>, terms: impl IntoIterator<Item = (i64, GroupRingElement)>) -> Result<Self> {
        let mut map: BTreeMap<i64, GroupRingElement> = BTreeMap::new();
        for (d, c) in terms {
            if !same_group(c.group(), &group) {
                return Err(Error::GroupMismatch);
            }
            let sum = match map.remove(&d) {
                Some(prev) => prev.plus(&c),
                None => c,
            };
            if !sum.is_zero() {
                map.insert(d, sum);
            }
        }
        Ok(LaurentPolynomial { group, terms: map })
    }

    pub fn terms(&self) -> &BTreeMap<i64, GroupRingElement> {
        &self.terms
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Matrix over Q[pi][z, z^-1], kept as a finite sum of z-graded coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentMatrix {
    group: Arc<FiniteGroup>,
    rows: usize,
    cols: usize,
    /// Nonzero coefficients only.
    terms: BTreeMap<i64, GroupAlgebraMatrix>,
}

impl LaurentMatrix {
    pub fn zeros(group: Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        LaurentMatrix { group, rows, cols, terms: BTreeMap::new() }
    }

    pub fn identity(group: Arc<FiniteGroup>, n: usize) -> Self {
        Self::constant(GroupAlgebraMatrix::identity(group, n))
    }

    pub fn constant(t: GroupAlgebraMatrix) -> Self {
        Self::monomial(0, t)
    }

    /// `z^d * t`.
    pub fn monomial(d: i64, t: GroupAlgebraMatrix) -> Self {
        let mut out = Self::zeros(t.group().clone(), t.nrows(), t.ncols());
        if !t.is_zero() {
            out.terms.insert(d, t);
        }
        out
    }

    pub fn from_terms(
        group: Arc<FiniteGroup>,
        rows: usize,
        cols: usize,
        terms: impl IntoIterator<Item = (i64, GroupAlgebraMatrix)>,
    ) -> Result<Self> {
        let mut out = Self::zeros(group, rows, cols);
        for (d, t) in terms {
            out = out.add(&Self::monomial(d, t))?;
        }
        Ok(out)
    }

    /// Builds from a grid of entries in row-major order.
    pub fn from_entries(group: Arc<FiniteGroup>, rows: usize, cols: usize, entries: &[LaurentPolynomial]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for {rows}x{cols}", entries.len())));
        }
        let mut terms: BTreeMap<i64, GroupAlgebraMatrix> = BTreeMap::new();
        for (idx, p) in entries.iter().enumerate() {
            if !same_group(p.group(), &group) {
                return Err(Error::GroupMismatch);
            }
            for (&d, c) in p.terms() {
                let t = terms.entry(d).or_insert_with(|| GroupAlgebraMatrix::zeros(group.clone(), rows, cols));
                t.set_entry(idx / cols, idx % cols, c);
            }
        }
        Ok(LaurentMatrix { group, rows, cols, terms })
    }

    pub fn entry(&self, i: usize, j: usize) -> LaurentPolynomial {
        let terms = self.terms.iter().map(|(&d, t)| (d, t.entry(i, j)));
        LaurentPolynomial::new(self.group.clone(), terms).expect("same group")
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

    pub fn terms(&self) -> &BTreeMap<i64, GroupAlgebraMatrix> {
        &self.terms
    }

    /// Coefficient of `z^d` (zero when absent).
    pub fn coefficient(&self, d: i64) -> GroupAlgebraMatrix {
        self.terms
            .get(&d)
            .cloned()
            .unwrap_or_else(|| GroupAlgebraMatrix::zeros(self.group.clone(), self.rows, self.cols))
    }

    /// Hull `[min_deg, max_deg]` of the z-support, `None` for the zero matrix.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let lo = *self.terms.keys().next()?;
        let hi = *self.terms.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.terms.values().next().and_then(GroupAlgebraMatrix::first_nonzero)
    }

    fn check_shape(&self, rhs: &Self) -> Result<()> {
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
        self.check_shape(rhs)?;
        let mut terms = self.terms.clone();
        for (&d, t) in &rhs.terms {
            let sum = match terms.remove(&d) {
                Some(prev) => prev.add(t)?,
                None => t.clone(),
            };
            if !sum.is_zero() {
                terms.insert(d, sum);
            }
        }
        Ok(LaurentMatrix { terms, ..self.clone_shape() })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_terms(|_, t| t.neg())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if Zero::is_zero(s) {
            return self.clone_shape();
        }
        self.map_terms(|_, t| t.scale(s))
    }

    /// Convolution product `self * rhs`.
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
        let mut out = Self::zeros(self.group.clone(), self.rows, rhs.cols);
        for (&a, ta) in &self.terms {
            for (&b, tb) in &rhs.terms {
                out = out.add(&Self::monomial(a + b, ta.mul(tb)?))?;
            }
        }
        Ok(out)
    }

    /// Multiplies by `z^d`.
    pub fn shift(&self, d: i64) -> Self {
        let terms = self.terms.iter().map(|(&e, t)| (e + d, t.clone())).collect();
        LaurentMatrix { terms, ..self.clone_shape() }
    }

    /// Substitutes `z -> z^{-1}`.
    pub fn reverse(&self) -> Self {
        let terms = self.terms.iter().map(|(&e, t)| (-e, t.clone())).collect();
        LaurentMatrix { terms, ..self.clone_shape() }
    }

    pub fn transpose(&self) -> Self {
        LaurentMatrix {
            group: self.group.clone(),
            rows: self.cols,
            cols: self.rows,
            terms: self.terms.iter().map(|(&d, t)| (d, t.transpose())).collect(),
        }
    }

    /// Transpose under the involution `g -> g^{-1}`, `z -> z^{-1}`.
    pub fn adjoint(&self) -> Self {
        LaurentMatrix {
            group: self.group.clone(),
            rows: self.cols,
            cols: self.rows,
            terms: self.terms.iter().map(|(&d, t)| (-d, t.adjoint())).collect(),
        }
    }

    /// Evaluates `z = lambda`.
    pub fn specialize<F: Field>(&self, lambda: &F) -> Result<GroupAlgebraMatrix<F>> {
        let inv = lambda.inverse().ok_or(Error::ZeroLambda)?;
        let mut out = GroupAlgebraMatrix::<F>::zeros(self.group.clone(), self.rows, self.cols);
        for (&d, t) in &self.terms {
            let base = if d >= 0 { lambda } else { &inv };
            let mut power = F::one();
            for _ in 0..d.unsigned_abs() {
                power = power.times(base);
            }
            let lifted = t.map(|q| F::from_rational(q)).scale(&power);
            out = out.add(&lifted)?;
        }
        Ok(out)
    }

    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let group = a.group.clone();
        let mut degrees: Vec<i64> = [a, b, c, d].iter().flat_map(|m| m.terms.keys().copied()).collect();
        degrees.sort_unstable();
        degrees.dedup();
        let mut out = Self::zeros(group, a.rows + c.rows, a.cols + b.cols);
        for deg in degrees {
            let t = GroupAlgebraMatrix::block2(&a.coefficient(deg), &b.coefficient(deg), &c.coefficient(deg), &d.coefficient(deg))?;
            out = out.add(&Self::monomial(deg, t))?;
        }
        if out.rows != a.rows + c.rows || out.cols != a.cols + b.cols {
            return Err(Error::DimensionMismatch("block shapes".into()));
        }
        Ok(out)
    }

    fn clone_shape(&self) -> Self {
        Self::zeros(self.group.clone(), self.rows, self.cols)
    }

    fn map_terms(&self, f: impl Fn(i64, &GroupAlgebraMatrix) -> GroupAlgebraMatrix) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&d, t)| (d, f(d, t)))
            .filter(|(_, t)| !t.is_zero())
            .collect();
        LaurentMatrix { terms, ..self.clone_shape() }
    }
}

/// Positive weight `k` of the graded inner product, kept exactly and as a
/// float.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    k: Rational,
    k_float: f64,
}

impl Weight {
    pub fn new(k: Rational) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::BadWeight(k.to_string()));
        }
        let k_float = rational_to_f64(&k);
        Ok(Weight { k, k_float })
    }

    pub fn one() -> Self {
        Weight { k: <Rational as One>::one(), k_float: 1.0 }
    }

    pub fn exact(&self) -> &Rational {
        &self.k
    }

    pub fn float(&self) -> f64 {
        self.k_float
    }

    /// `k^e` for any integer exponent.
    pub fn pow(&self, e: i64) -> Rational {
        let base = if e >= 0 { self.k.clone() } else { self.k.recip() };
        num_traits::pow(base, e.unsigned_abs() as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSide {
    TwoSided,
    /// Only nonnegative z-degrees (the `C[z]` side).
    NonNeg,
    /// Only nonpositive z-degrees (the `C[z^-1]` side).
    NonPos,
}

/// Contiguous range of z-degrees `[n_min, n_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TruncationWindow {
    pub side: WindowSide,
    pub n_min: i64,
    pub n_max: i64,
}

impl TruncationWindow {
    pub fn new(side: WindowSide, n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::EmptyWindow);
        }
        match side {
            WindowSide::NonNeg if n_min < 0 => Err(Error::BadWindow(format!("nonneg window starts at {n_min}"))),
            WindowSide::NonPos if n_max > 0 => Err(Error::BadWindow(format!("nonpos window ends at {n_max}"))),
            _ => Ok(TruncationWindow { side, n_min, n_max }),
        }
    }

    pub fn two_sided(n_min: i64, n_max: i64) -> Result<Self> {
        Self::new(WindowSide::TwoSided, n_min, n_max)
    }

    pub fn nonneg(n_min: i64, n_max: i64) -> Result<Self> {
        Self::new(WindowSide::NonNeg, n_min, n_max)
    }

    pub fn nonpos(n_min: i64, n_max: i64) -> Result<Self> {
        Self::new(WindowSide::NonPos, n_min, n_max)
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.n_min..=self.n_max).contains(&n)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.n_min..=self.n_max
    }

    /// Position of degree `n` inside the window.
    pub fn offset(&self, n: i64) -> usize {
        debug_assert!(self.contains(n));
        (n - self.n_min) as usize
    }
}

/// Exact matrix of a Laurent matrix restricted to finite windows.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub matrix: Matrix<Rational>,
    pub domain: TruncationWindow,
    pub codomain: TruncationWindow,
    /// Q-dimension of one codomain / domain z-degree slot.
    pub row_block: usize,
    pub col_block: usize,
    /// Codomain degrees that were dropped because they fell outside the
    /// window, as inclusive bands.
    pub overflow: Vec<(i64, i64)>,
}

impl Truncation {
    /// Block from domain degree `n` to codomain degree `n_out`.
    pub fn block(&self, n_out: i64, n: i64) -> Matrix<Rational> {
        self.matrix.block(
            self.codomain.offset(n_out) * self.row_block,
            self.domain.offset(n) * self.col_block,
            self.row_block,
            self.col_block,
        )
    }
}

/// Collapses a set of degrees into sorted inclusive bands.
pub(crate) fn bands(mut degrees: Vec<i64>) -> Vec<(i64, i64)> {
    degrees.sort_unstable();
    degrees.dedup();
    let mut out: Vec<(i64, i64)> = Vec::new();
    for d in degrees {
        match out.last_mut() {
            Some((_, hi)) if *hi + 1 == d => *hi = d,
            _ => out.push((d, d)),
        }
    }
    out
}

/// Truncation on a single window (domain and codomain alike).
pub fn weighted_truncation(m: &LaurentMatrix, window: &TruncationWindow, k: &Weight) -> Result<Truncation> {
    weighted_truncation_between(m, window, window, k)
}

/// Matrix of `m` from the domain window to the codomain window in the
/// orthonormal basis `e_n = k^{-n} z^n`.
///
/// Block `(n', n)` equals `k^{n'-n}` times the regular representation of
/// the coefficient of `z^{n'-n}`. Images landing outside the codomain window
/// are dropped and listed in [`Truncation::overflow`].
pub fn weighted_truncation_between(
    m: &LaurentMatrix,
    domain: &TruncationWindow,
    codomain: &TruncationWindow,
    k: &Weight,
) -> Result<Truncation> {
    let order = m.group().order();
    let row_block = m.nrows() * order;
    let col_block = m.ncols() * order;
    let mut out = Matrix::zeros(codomain.len() * row_block, domain.len() * col_block);
    let mut dropped = Vec::new();
    let reps: Vec<(i64, Matrix<Rational>)> = m.terms().iter().map(|(&d, t)| (d, t.regular_representation())).collect();
    for n in domain.degrees() {
        for (d, rep) in &reps {
            let target = n + d;
            if !codomain.contains(target) {
                dropped.push(target);
                continue;
            }
            let block = rep.scale(&k.pow(*d));
            out.write_block(codomain.offset(target) * row_block, domain.offset(n) * col_block, &block);
        }
    }
    Ok(Truncation {
        matrix: out,
        domain: *domain,
        codomain: *codomain,
        row_block,
        col_block,
        overflow: bands(dropped),
    })
}

/// Triangle-inequality bound `sum_d k^d ||T_d||_2` on the k-norm of `m`.
pub fn weighted_norm_bound(m: &LaurentMatrix, k: &Weight) -> f64 {
    m.terms()
        .iter()
        .map(|(&d, t)| k.float().powi(d as i32) * spectral_norm(&to_dmatrix(&t.regular_representation())))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};

    fn trivial() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::trivial())
    }

    fn scalar(g: &Arc<FiniteGroup>, q: Rational) -> GroupAlgebraMatrix {
        GroupAlgebraMatrix::from_scalar_matrix(g.clone(), &Matrix::from_rows(vec![vec![q]]).unwrap())
    }

    fn z_times(g: &Arc<FiniteGroup>, t: GroupAlgebraMatrix) -> LaurentMatrix {
        let _ = g;
        LaurentMatrix::monomial(1, t)
    }

    #[test]
    fn difference_of_squares() {
        let g = trivial();
        let h = GroupAlgebraMatrix::from_scalar_matrix(
            g.clone(),
            &Matrix::from_rows(vec![vec![integer(1), integer(2)], vec![integer(0), integer(3)]]).unwrap(),
        );
        let i = LaurentMatrix::identity(g.clone(), 2);
        let zh = z_times(&g, h.clone());
        let lhs = i.sub(&zh).unwrap().mul(&i.add(&zh).unwrap()).unwrap();
        let rhs = i.sub(&LaurentMatrix::monomial(2, h.mul(&h).unwrap())).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn z_times_z_inverse_is_one() {
        let g = trivial();
        let one = scalar(&g, integer(1));
        let z = LaurentMatrix::monomial(1, one.clone());
        let zi = LaurentMatrix::monomial(-1, one);
        assert_eq!(z.mul(&zi).unwrap(), LaurentMatrix::identity(g, 1));
    }

    #[test]
    fn degree_range_tracks_support() {
        let g = trivial();
        let one = scalar(&g, integer(1));
        let m = LaurentMatrix::from_terms(g.clone(), 1, 1, [(-2, one.clone()), (3, one.clone())]).unwrap();
        assert_eq!(m.degree_range(), Some((-2, 3)));
        let cancelled = m.add(&LaurentMatrix::monomial(3, one.neg())).unwrap();
        assert_eq!(cancelled.degree_range(), Some((-2, -2)));
        assert_eq!(LaurentMatrix::zeros(g, 1, 1).degree_range(), None);
    }

    #[test]
    fn shift_truncation_unit_weight() {
        let g = trivial();
        let z = LaurentMatrix::monomial(1, scalar(&g, integer(1)));
        let w = TruncationWindow::nonneg(0, 2).unwrap();
        let t = weighted_truncation(&z, &w, &Weight::one()).unwrap();
        let expected = Matrix::from_rows(vec![
            vec![integer(0), integer(0), integer(0)],
            vec![integer(1), integer(0), integer(0)],
            vec![integer(0), integer(1), integer(0)],
        ])
        .unwrap();
        assert_eq!(t.matrix, expected);
        assert_eq!(t.overflow, vec![(3, 3)]);
    }

    #[test]
    fn shift_truncation_half_weight() {
        let g = trivial();
        let z = LaurentMatrix::monomial(1, scalar(&g, integer(1)));
        let w = TruncationWindow::nonneg(0, 2).unwrap();
        let t = weighted_truncation(&z, &w, &Weight::new(rational(1, 2)).unwrap()).unwrap();
        assert_eq!(t.matrix.get(1, 0), &rational(1, 2));
        assert_eq!(t.matrix.get(2, 1), &rational(1, 2));
    }

    #[test]
    fn window_validation() {
        assert_eq!(TruncationWindow::two_sided(2, 1).unwrap_err(), Error::EmptyWindow);
        assert!(TruncationWindow::nonneg(-1, 3).is_err());
        assert!(TruncationWindow::nonpos(-3, 1).is_err());
        assert!(TruncationWindow::nonpos(-3, 0).is_ok());
        assert!(Weight::new(integer(0)).is_err());
        assert!(Weight::new(rational(-1, 2)).is_err());
    }

    #[test]
    fn norm_bound_of_identity_and_shift() {
        let g = trivial();
        let h = scalar(&g, integer(3));
        let zh = LaurentMatrix::monomial(1, h);
        let k = Weight::new(rational(1, 4)).unwrap();
        assert!((weighted_norm_bound(&zh, &k) - 0.75).abs() < 1e-12);
        assert!((weighted_norm_bound(&LaurentMatrix::identity(g, 2), &k) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn specialize_and_reverse() {
        let g = trivial();
        let one = scalar(&g, integer(1));
        let m = LaurentMatrix::identity(g.clone(), 1).sub(&LaurentMatrix::monomial(1, one.clone())).unwrap();
        let at2 = m.specialize(&integer(2)).unwrap();
        assert_eq!(at2.entry(0, 0).coeffs(), &[integer(-1)]);
        assert_eq!(m.reverse().reverse(), m);
        assert_eq!(m.reverse().degree_range(), Some((-1, 0)));
        assert_eq!(m.specialize(&integer(0)).unwrap_err(), Error::ZeroLambda);
    }

    #[test]
    fn entries_round_trip() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let half = rational(1, 2);
        let p = GroupRingElement::new(g.clone(), vec![half.clone(), half]).unwrap();
        let poly = LaurentPolynomial::new(g.clone(), [(0, GroupRingElement::one(g.clone())), (1, p.negated())]).unwrap();
        let m = LaurentMatrix::from_entries(g.clone(), 1, 1, &[poly.clone()]).unwrap();
        assert_eq!(m.entry(0, 0), poly);
        assert_eq!(m.degree_range(), Some((0, 1)));
    }
}
