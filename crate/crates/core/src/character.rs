//! Virtual characters: the K0(C[pi]) bookkeeping for modules over a
//! finite group ring.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{integer, Field, Matrix, Rational};
use crate::group::{translation_action, FiniteGroup};

/// Rational class function, one value per conjugacy class (class order as
/// in [`FiniteGroup::conjugacy_classes`]; class 0 is the identity).
#[derive(Clone, PartialEq, Eq)]
pub struct VirtualCharacter {
    group: Arc<FiniteGroup>,
    values: Vec<Rational>,
}

impl VirtualCharacter {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != group.conjugacy_classes().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} conjugacy classes",
                values.len(),
                group.conjugacy_classes().len()
            )));
        }
        Ok(VirtualCharacter { group, values })
    }

    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        let n = group.conjugacy_classes().len();
        VirtualCharacter { group, values: vec![<Rational as Zero>::zero(); n] }
    }

    /// `multiplicity` copies of the regular character.
    pub fn regular(group: Arc<FiniteGroup>, multiplicity: i64) -> Self {
        let mut c = Self::zero(group.clone());
        c.values[0] = integer(multiplicity * group.order() as i64);
        c
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Dimension of the underlying virtual representation.
    pub fn degree(&self) -> &Rational {
        &self.values[0]
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect();
        VirtualCharacter { group: self.group.clone(), values }
    }

    pub fn minus(&self, rhs: &Self) -> Self {
        let values = self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect();
        VirtualCharacter { group: self.group.clone(), values }
    }

    pub fn scaled(&self, s: i64) -> Self {
        let s = integer(s);
        VirtualCharacter { group: self.group.clone(), values: self.values.iter().map(|a| a * &s).collect() }
    }

    /// `chi(g^{-1})`, the character of the dual representation.
    pub fn conjugate(&self) -> Self {
        let g = &self.group;
        let values = g
            .conjugacy_classes()
            .iter()
            .map(|class| self.values[g.class_of(g.inverse(class[0]))].clone())
            .collect();
        VirtualCharacter { group: g.clone(), values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Values rendered as canonical `"num/den"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.values.iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Debug for VirtualCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

/// True iff `chi` is an integer multiple of the regular character, i.e. its
/// class in the reduced group vanishes.
pub fn reduced_class_is_zero(chi: &VirtualCharacter) -> bool {
    let m = integer(chi.group.order() as i64);
    let t = &chi.values[0] / &m;
    t.denom().is_one() && chi.values[1..].iter().all(Zero::is_zero)
}

/// Character of the group action on the span of the columns of `basis`,
/// a subspace of `(F[pi])^rank` acted on by right translation.
///
/// For every group element `g` this solves `g * S = S * X_g` exactly and
/// reads the class value off `trace(X_g)`. The columns must be linearly
/// independent.
pub fn character_of_invariant_subspace<F: Field>(
    group: &Arc<FiniteGroup>,
    rank: usize,
    basis: &Matrix<F>,
) -> Result<VirtualCharacter> {
    let m = group.order();
    if basis.nrows() != rank * m {
        return Err(Error::DimensionMismatch(format!(
            "basis has {} rows, module (F[pi])^{rank} has dimension {}",
            basis.nrows(),
            rank * m
        )));
    }
    if basis.ncols() == 0 {
        return Ok(VirtualCharacter::zero(group.clone()));
    }
    if basis.rank() != basis.ncols() {
        return Err(Error::InvalidArgument("subspace basis columns are dependent".into()));
    }
    let mut traces: Vec<Option<F>> = vec![None; group.conjugacy_classes().len()];
    for g in 0..m {
        let action = translation_action::<F>(group, g, rank);
        let moved = action.mul(basis)?;
        let x = basis.solve(&moved).ok_or(Error::NotInvariant { element: g })?;
        let class = group.class_of(g);
        if traces[class].is_none() {
            traces[class] = Some(x.trace());
        }
    }
    let values = traces
        .into_iter()
        .enumerate()
        .map(|(class, t)| t.expect("every class visited").to_rational().ok_or(Error::IrrationalCharacter { class }))
        .collect::<Result<Vec<_>>>()?;
    VirtualCharacter::new(group.clone(), values)
}
