//! Chain complexes of based free modules, chain maps, homology with a group
//! action, cones, mapping tori, duals and specialization.

use std::fmt;
use std::sync::Arc;

use crate::character::{character_of_invariant_subspace, VirtualCharacter};
use crate::error::{Error, Result};
use crate::exact::{Field, Gaussian, Matrix, Rational};
use crate::group::{same_group, FiniteGroup, GroupAlgebraMatrix};
use crate::laurent::LaurentMatrix;

/// Coefficient ring of a complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingTag {
    Q,
    GaussianQ,
    GroupRing,
    GaussianGroupRing,
    Laurent,
}

impl RingTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RingTag::Q => "Q",
            RingTag::GaussianQ => "Q(i)",
            RingTag::GroupRing => "Q[pi]",
            RingTag::GaussianGroupRing => "Q(i)[pi]",
            RingTag::Laurent => "Q[pi][z,z^-1]",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "Q" => RingTag::Q,
            "Q(i)" => RingTag::GaussianQ,
            "Q[pi]" => RingTag::GroupRing,
            "Q(i)[pi]" => RingTag::GaussianGroupRing,
            "Q[pi][z,z^-1]" => RingTag::Laurent,
            other => return Err(Error::Parse { what: "ring tag", detail: other.to_string() }),
        })
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Matrices that can serve as differentials: module maps between based
/// free modules over one of the supported rings.
pub trait ModuleMap: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// Field over which the Q-linear (flattened) picture lives.
    type Scalar: Field;

    fn ring() -> RingTag;
    fn zeros(group: &Arc<FiniteGroup>, rows: usize, cols: usize) -> Self;
    fn identity(group: &Arc<FiniteGroup>, n: usize) -> Self;
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `self * rhs`.
    fn compose(&self, rhs: &Self) -> Result<Self>;
    fn add(&self, rhs: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn first_nonzero(&self) -> Option<(usize, usize)>;
    fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self>;
    /// Transpose composed with the ring's anti-involution.
    fn adjoint(&self) -> Self;
    /// Group the entries live over, if any.
    fn group(&self) -> Option<&Arc<FiniteGroup>>;
    /// Q-dimension (over `Scalar`) of one free generator.
    fn generator_dim(group: &FiniteGroup) -> usize;
    /// The matrix over `Scalar` of the underlying linear map.
    fn flatten(&self) -> Result<Matrix<Self::Scalar>>;

    fn signed(&self, sign: i64) -> Self {
        if sign < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl<F: Field> ModuleMap for Matrix<F> {
    type Scalar = F;

    fn ring() -> RingTag {
        if F::NAME == "Q" {
            RingTag::Q
        } else {
            RingTag::GaussianQ
        }
    }
    fn zeros(_: &Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        Matrix::zeros(rows, cols)
    }
    fn identity(_: &Arc<FiniteGroup>, n: usize) -> Self {
        Matrix::identity(n)
    }
    fn nrows(&self) -> usize {
        Matrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        Matrix::ncols(self)
    }
    fn compose(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        Matrix::add(self, rhs)
    }
    fn neg(&self) -> Self {
        Matrix::neg(self)
    }
    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }
    fn first_nonzero(&self) -> Option<(usize, usize)> {
        Matrix::first_nonzero(self)
    }
    fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        Matrix::block2(a, b, c, d)
    }
    fn adjoint(&self) -> Self {
        self.conjugate_transpose()
    }
    fn group(&self) -> Option<&Arc<FiniteGroup>> {
        None
    }
    fn generator_dim(_: &FiniteGroup) -> usize {
        1
    }
    fn flatten(&self) -> Result<Matrix<F>> {
        Ok(self.clone())
    }
}

impl<F: Field> ModuleMap for GroupAlgebraMatrix<F> {
    type Scalar = F;

    fn ring() -> RingTag {
        if F::NAME == "Q" {
            RingTag::GroupRing
        } else {
            RingTag::GaussianGroupRing
        }
    }
    fn zeros(group: &Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        GroupAlgebraMatrix::zeros(group.clone(), rows, cols)
    }
    fn identity(group: &Arc<FiniteGroup>, n: usize) -> Self {
        GroupAlgebraMatrix::identity(group.clone(), n)
    }
    fn nrows(&self) -> usize {
        GroupAlgebraMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        GroupAlgebraMatrix::ncols(self)
    }
    fn compose(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        GroupAlgebraMatrix::add(self, rhs)
    }
    fn neg(&self) -> Self {
        GroupAlgebraMatrix::neg(self)
    }
    fn is_zero(&self) -> bool {
        GroupAlgebraMatrix::is_zero(self)
    }
    fn first_nonzero(&self) -> Option<(usize, usize)> {
        GroupAlgebraMatrix::first_nonzero(self)
    }
    fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        GroupAlgebraMatrix::block2(a, b, c, d)
    }
    fn adjoint(&self) -> Self {
        GroupAlgebraMatrix::adjoint(self)
    }
    fn group(&self) -> Option<&Arc<FiniteGroup>> {
        Some(GroupAlgebraMatrix::group(self))
    }
    fn generator_dim(group: &FiniteGroup) -> usize {
        group.order()
    }
    fn flatten(&self) -> Result<Matrix<F>> {
        Ok(self.regular_representation())
    }
}

impl ModuleMap for LaurentMatrix {
    type Scalar = Rational;

    fn ring() -> RingTag {
        RingTag::Laurent
    }
    fn zeros(group: &Arc<FiniteGroup>, rows: usize, cols: usize) -> Self {
        LaurentMatrix::zeros(group.clone(), rows, cols)
    }
    fn identity(group: &Arc<FiniteGroup>, n: usize) -> Self {
        LaurentMatrix::identity(group.clone(), n)
    }
    fn nrows(&self) -> usize {
        LaurentMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        LaurentMatrix::ncols(self)
    }
    fn compose(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        LaurentMatrix::add(self, rhs)
    }
    fn neg(&self) -> Self {
        LaurentMatrix::neg(self)
    }
    fn is_zero(&self) -> bool {
        LaurentMatrix::is_zero(self)
    }
    fn first_nonzero(&self) -> Option<(usize, usize)> {
        LaurentMatrix::first_nonzero(self)
    }
    fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        LaurentMatrix::block2(a, b, c, d)
    }
    fn adjoint(&self) -> Self {
        LaurentMatrix::adjoint(self)
    }
    fn group(&self) -> Option<&Arc<FiniteGroup>> {
        Some(LaurentMatrix::group(self))
    }
    fn generator_dim(group: &FiniteGroup) -> usize {
        group.order()
    }
    fn flatten(&self) -> Result<Matrix<Rational>> {
        Err(Error::LaurentRing)
    }
}

/// Finite chain complex `C_{d_max} -> ... -> C_{d_min}` with homological
/// indexing. `differential(j)` maps degree `j` to degree `j - 1`.
#[derive(Clone, PartialEq)]
pub struct ChainComplex<M: ModuleMap> {
    group: Arc<FiniteGroup>,
    d_min: i64,
    ranks: Vec<usize>,
    /// `diffs[i]` is the differential out of degree `d_min + i + 1`.
    diffs: Vec<M>,
}

impl<M: ModuleMap> ChainComplex<M> {
    /// Validates shapes, groups and `d o d = 0`.
    pub fn new(group: Arc<FiniteGroup>, d_min: i64, ranks: Vec<usize>, diffs: Vec<M>) -> Result<Self> {
        let expected = ranks.len().saturating_sub(1);
        if diffs.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} differentials for {} degrees",
                diffs.len(),
                ranks.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.nrows() != ranks[i] || d.ncols() != ranks[i + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "differential out of degree {} is {}x{}, ranks are {} -> {}",
                    d_min + i as i64 + 1,
                    d.nrows(),
                    d.ncols(),
                    ranks[i + 1],
                    ranks[i]
                )));
            }
            if let Some(g) = d.group() {
                if !same_group(g, &group) {
                    return Err(Error::GroupMismatch);
                }
            }
        }
        let c = ChainComplex { group, d_min, ranks, diffs };
        c.check_square_zero()?;
        Ok(c)
    }

    /// Complex over the trivial group.
    pub fn over_trivial(d_min: i64, ranks: Vec<usize>, diffs: Vec<M>) -> Result<Self> {
        Self::new(Arc::new(FiniteGroup::trivial()), d_min, ranks, diffs)
    }

    pub fn empty(group: Arc<FiniteGroup>) -> Self {
        ChainComplex { group, d_min: 0, ranks: Vec::new(), diffs: Vec::new() }
    }

    fn check_square_zero(&self) -> Result<()> {
        for i in 1..self.diffs.len() {
            let dd = self.diffs[i - 1].compose(&self.diffs[i])?;
            if let Some((row, col)) = dd.first_nonzero() {
                return Err(Error::NotAComplex { degree: self.d_min + i as i64 + 1, row, col });
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> RingTag {
        M::ring()
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn d_min(&self) -> i64 {
        self.d_min
    }

    /// Highest degree, `d_min - 1` for the empty complex.
    pub fn d_max(&self) -> i64 {
        self.d_min + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.d_min..=self.d_max()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Rank in degree `j`, zero outside the range.
    pub fn rank(&self, j: i64) -> usize {
        if j < self.d_min || j > self.d_max() {
            0
        } else {
            self.ranks[(j - self.d_min) as usize]
        }
    }

    /// `d_j : C_j -> C_{j-1}`, a zero matrix at the ends.
    pub fn differential(&self, j: i64) -> M {
        if j > self.d_min && j <= self.d_max() {
            self.diffs[(j - self.d_min - 1) as usize].clone()
        } else {
            M::zeros(&self.group, self.rank(j - 1), self.rank(j))
        }
    }

    pub fn differentials(&self) -> &[M] {
        &self.diffs
    }

    /// Same complex with degrees shifted up by `s`.
    pub fn shifted(&self, s: i64) -> Self {
        ChainComplex { d_min: self.d_min + s, ..self.clone() }
    }

    /// Maps every differential, re-validating the result.
    pub fn map_differentials<N: ModuleMap>(&self, f: impl Fn(&M) -> Result<N>) -> Result<ChainComplex<N>> {
        let diffs = self.diffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        ChainComplex::new(self.group.clone(), self.d_min, self.ranks.clone(), diffs)
    }
}

impl<M: ModuleMap> fmt::Debug for ChainComplex<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainComplex")
            .field("ring", &self.ring())
            .field("d_min", &self.d_min)
            .field("ranks", &self.ranks)
            .field("diffs", &self.diffs)
            .finish()
    }
}

/// Degreewise maps `f_j : C_j -> D_j`, checked against both complexes.
#[derive(Clone, PartialEq, Debug)]
pub struct ChainMap<M: ModuleMap> {
    source: ChainComplex<M>,
    target: ChainComplex<M>,
    /// `maps[i]` is `f` in degree `source.d_min + i`.
    maps: Vec<M>,
}

impl<M: ModuleMap> ChainMap<M> {
    pub fn new(source: ChainComplex<M>, target: ChainComplex<M>, maps: Vec<M>) -> Result<Self> {
        if maps.len() != source.ranks.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} component maps for {} source degrees",
                maps.len(),
                source.ranks.len()
            )));
        }
        if !same_group(&source.group, &target.group) {
            return Err(Error::GroupMismatch);
        }
        for (i, f) in maps.iter().enumerate() {
            let j = source.d_min + i as i64;
            if f.ncols() != source.rank(j) || f.nrows() != target.rank(j) {
                return Err(Error::DimensionMismatch(format!(
                    "map in degree {j} is {}x{}, expected {}x{}",
                    f.nrows(),
                    f.ncols(),
                    target.rank(j),
                    source.rank(j)
                )));
            }
        }
        let out = ChainMap { source, target, maps };
        for j in out.source.degrees() {
            let lhs = out.component(j - 1).compose(&out.source.differential(j))?;
            let rhs = out.target.differential(j).compose(&out.component(j))?;
            let diff = lhs.add(&rhs.neg())?;
            if let Some((row, col)) = diff.first_nonzero() {
                return Err(Error::NotAChainMap { degree: j, row, col });
            }
        }
        Ok(out)
    }

    pub fn identity(c: &ChainComplex<M>) -> Self {
        let maps = c.ranks.iter().map(|&r| M::identity(&c.group, r)).collect();
        ChainMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn source(&self) -> &ChainComplex<M> {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex<M> {
        &self.target
    }

    pub fn maps(&self) -> &[M] {
        &self.maps
    }

    /// `f_j`, a zero matrix outside the source range.
    pub fn component(&self, j: i64) -> M {
        if j >= self.source.d_min && j <= self.source.d_max() {
            self.maps[(j - self.source.d_min) as usize].clone()
        } else {
            M::zeros(&self.source.group, self.target.rank(j), self.source.rank(j))
        }
    }
}

/// Mapping cone of `f : C -> D`: degree `j` is `D_j + C_{j-1}` with
/// differential `(d_D, (-1)^j f; 0, d_C)`.
pub fn mapping_cone<M: ModuleMap>(f: &ChainMap<M>) -> Result<ChainComplex<M>> {
    let (c, d) = (&f.source, &f.target);
    let group = c.group.clone();
    if c.is_empty() && d.is_empty() {
        return Ok(ChainComplex::empty(group));
    }
    let lo = if c.is_empty() { d.d_min } else if d.is_empty() { c.d_min + 1 } else { d.d_min.min(c.d_min + 1) };
    let hi = if c.is_empty() { d.d_max() } else if d.is_empty() { c.d_max() + 1 } else { d.d_max().max(c.d_max() + 1) };
    let ranks: Vec<usize> = (lo..=hi).map(|j| d.rank(j) + c.rank(j - 1)).collect();
    let mut diffs = Vec::new();
    for j in lo + 1..=hi {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let top_right = f.component(j - 1).signed(sign);
        let bottom_left = M::zeros(&group, c.rank(j - 2), d.rank(j));
        diffs.push(M::block2(&d.differential(j), &top_right, &bottom_left, &c.differential(j - 1))?);
    }
    ChainComplex::new(group, lo, ranks, diffs)
}

/// Algebraic mapping torus: the cone of `I - z h` on `P[z, z^-1]`.
pub fn mapping_torus(h: &ChainMap<GroupAlgebraMatrix>) -> Result<ChainComplex<LaurentMatrix>> {
    if h.source != h.target {
        return Err(Error::InvalidArgument("mapping torus needs a self-map".into()));
    }
    let p = laurent_lift(&h.source)?;
    let maps = h
        .maps
        .iter()
        .map(|m| {
            let id = LaurentMatrix::identity(m.group().clone(), m.nrows());
            id.sub(&LaurentMatrix::monomial(1, m.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    mapping_cone(&ChainMap::new(p.clone(), p, maps)?)
}

/// `C` as a complex over the Laurent ring with constant differentials.
pub fn laurent_lift(c: &ChainComplex<GroupAlgebraMatrix>) -> Result<ChainComplex<LaurentMatrix>> {
    c.map_differentials(|d| Ok(LaurentMatrix::constant(d.clone())))
}

/// Substitutes `z -> z^-1` in every differential.
pub fn reverse_complex(c: &ChainComplex<LaurentMatrix>) -> Result<ChainComplex<LaurentMatrix>> {
    c.map_differentials(|d| Ok(d.reverse()))
}

/// Dual complex: degree `j` is `C_{n-j}` and the differential out of degree
/// `j` is the adjoint of `d_{n-j+1}`.
pub fn dual_complex<M: ModuleMap>(c: &ChainComplex<M>, n: i64) -> Result<ChainComplex<M>> {
    if c.is_empty() {
        return Ok(c.clone());
    }
    let lo = n - c.d_max();
    let hi = n - c.d_min;
    let ranks = (lo..=hi).map(|j| c.rank(n - j)).collect();
    let diffs = (lo + 1..=hi).map(|j| c.differential(n - j + 1).adjoint()).collect();
    ChainComplex::new(c.group.clone(), lo, ranks, diffs)
}

/// Evaluates `z = lambda` in every differential.
pub fn specialize<F: Field>(c: &ChainComplex<LaurentMatrix>, lambda: &F) -> Result<ChainComplex<GroupAlgebraMatrix<F>>> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    c.map_differentials(|d| d.specialize(lambda))
}

pub fn specialize_map<F: Field>(f: &ChainMap<LaurentMatrix>, lambda: &F) -> Result<ChainMap<GroupAlgebraMatrix<F>>> {
    let maps = f.maps.iter().map(|m| m.specialize(lambda)).collect::<Result<Vec<_>>>()?;
    ChainMap::new(specialize(&f.source, lambda)?, specialize(&f.target, lambda)?, maps)
}

/// Lifts a rational complex to Q(i).
pub fn to_gaussian(c: &ChainComplex<GroupAlgebraMatrix>) -> Result<ChainComplex<GroupAlgebraMatrix<Gaussian>>> {
    c.map_differentials(|d| Ok(d.map(Gaussian::from_rational)))
}

/// Homology of one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyDegree<F: Field> {
    pub degree: i64,
    pub dim: usize,
    /// Character of the group action; `None` when a trace fell outside Q.
    pub character: Option<VirtualCharacter>,
    /// Cycles whose classes form a basis of the homology, as columns.
    pub witnesses: Matrix<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomologyReport<F: Field> {
    pub ring: RingTag,
    pub degrees: Vec<HomologyDegree<F>>,
}

impl<F: Field> HomologyReport<F> {
    pub fn dim(&self, j: i64) -> usize {
        self.degrees.iter().find(|d| d.degree == j).map_or(0, |d| d.dim)
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.iter().map(|d| d.dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim).collect()
    }
}

/// Exact homology through the flattened (regular-representation) picture.
///
/// With a nontrivial group the action by right translation commutes with
/// every differential, so cycles and boundaries are invariant and their
/// characters are attached.
pub fn homology<M: ModuleMap>(c: &ChainComplex<M>) -> Result<HomologyReport<M::Scalar>> {
    if M::ring() == RingTag::Laurent {
        return Err(Error::LaurentRing);
    }
    let gdim = M::generator_dim(&c.group);
    let with_group = gdim > 1;
    let mut degrees = Vec::new();
    for j in c.degrees() {
        let n = c.rank(j) * gdim;
        let out = c.differential(j).flatten()?;
        let cycles = if out.nrows() == 0 { Matrix::identity(n) } else { out.kernel() };
        let boundaries = c.differential(j + 1).flatten()?.column_basis();
        let dim = cycles.ncols() - boundaries.ncols();
        let witnesses = cycles.quotient_representatives(&boundaries);
        let character = if with_group {
            let kc = character_of_invariant_subspace(&c.group, c.rank(j), &cycles);
            let bc = character_of_invariant_subspace(&c.group, c.rank(j), &boundaries);
            match (kc, bc) {
                (Ok(k), Ok(b)) => Some(k.minus(&b)),
                (Err(Error::IrrationalCharacter { .. }), _) | (_, Err(Error::IrrationalCharacter { .. })) => None,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        } else {
            Some(VirtualCharacter::new(c.group.clone(), vec![crate::exact::integer(dim as i64)])?)
        };
        degrees.push(HomologyDegree { degree: j, dim, character, witnesses });
    }
    Ok(HomologyReport { ring: M::ring(), degrees })
}

/// `sum_j (-1)^j rank_j` with ranks over the coefficient ring.
pub fn euler_characteristic<M: ModuleMap>(c: &ChainComplex<M>) -> i64 {
    c.degrees().map(|j| sign(j) * c.rank(j) as i64).sum()
}

/// `sum_j (-1)^j dim H_j` over the scalar field.
pub fn homology_euler<F: Field>(h: &HomologyReport<F>) -> i64 {
    h.degrees.iter().map(|d| sign(d.degree) * d.dim as i64).sum()
}

/// Equivariant Euler characteristic from chain ranks, checked against the
/// value computed from homology characters.
pub fn equivariant_euler<F: Field>(c: &ChainComplex<GroupAlgebraMatrix<F>>) -> Result<VirtualCharacter> {
    let from_chains = VirtualCharacter::regular(c.group.clone(), euler_characteristic(c));
    let report = homology(c)?;
    let mut from_homology = VirtualCharacter::zero(c.group.clone());
    for d in &report.degrees {
        let Some(chi) = &d.character else { return Ok(from_chains) };
        from_homology = if sign(d.degree) > 0 { from_homology.plus(chi) } else { from_homology.minus(chi) };
    }
    if from_chains != from_homology {
        return Err(Error::ClassMismatch(format!(
            "chain-level {from_chains:?} vs homology-level {from_homology:?}"
        )));
    }
    Ok(from_chains)
}

pub(crate) fn sign(j: i64) -> i64 {
    if j.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
