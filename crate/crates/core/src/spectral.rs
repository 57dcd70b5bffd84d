//! Floating-point scans of truncated weighted operators: smallest singular
//! values across weights, homology along circles of specialization points,
//! and a finite-window index experiment.
//!
//! Grid points are independent; with the `parallel` feature they run on the
//! rayon pool and are collected in grid order.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SVD};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::complexes::{mapping_torus, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, Matrix, Rational};
use crate::group::{FiniteGroup, GroupAlgebraMatrix};
use crate::laurent::{LaurentMatrix, TruncationWindow};
use crate::numeric::{complex_singular_values, numerical_rank, singular_values, to_dmatrix};

pub use crate::numeric::operator_norm;

/// How singular values are turned into ranks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericalRankPolicy {
    /// Singular values at or below `rel_tol * sigma_max` count as zero.
    pub rel_tol: f64,
    pub min_depth: usize,
}

impl Default for NumericalRankPolicy {
    fn default() -> Self {
        NumericalRankPolicy { rel_tol: 1e-9, min_depth: 1 }
    }
}

impl NumericalRankPolicy {
    pub fn new(rel_tol: f64, min_depth: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {rel_tol} must be positive")));
        }
        Ok(NumericalRankPolicy { rel_tol, min_depth })
    }
}

fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub norm: f64,
    /// `k* = 1 / ||h||`.
    pub k_star: f64,
    /// Weights in `(0, k*)` are certified.
    pub certified: (f64, f64),
}

pub fn fredholm_threshold(h: &GroupAlgebraMatrix) -> Result<Threshold> {
    if h.is_zero() {
        return Err(Error::ZeroMap);
    }
    let norm = operator_norm(h);
    Ok(Threshold { norm, k_star: 1.0 / norm, certified: (0.0, 1.0 / norm) })
}

/// `n` logarithmically spaced points from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) || n == 0 {
        return Err(Error::InvalidArgument(format!("bad grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect())
}

/// Default weight grid: `points` values spanning a factor of 8 on each side
/// of `k*`.
pub fn default_k_grid(k_star: f64, points: usize) -> Result<Vec<f64>> {
    geometric_grid(k_star / 8.0, k_star * 8.0, points)
}

/// Float matrix of `m` between windows in the basis `k^{-n} z^n`.
pub fn float_truncation(m: &LaurentMatrix, domain: &TruncationWindow, codomain: &TruncationWindow, k: f64) -> DMatrix<f64> {
    let order = m.group().order();
    let rb = m.nrows() * order;
    let cb = m.ncols() * order;
    let mut out = DMatrix::zeros(codomain.len() * rb, domain.len() * cb);
    for (&d, t) in m.terms() {
        let block = to_dmatrix(&t.regular_representation()) * k.powi(d as i32);
        for n in domain.degrees() {
            let target = n + d;
            if codomain.contains(target) {
                out.view_mut((codomain.offset(target) * rb, domain.offset(n) * cb), (rb, cb)).copy_from(&block);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub k: f64,
    /// One value per depth, in the order of `SigmaScan::depths`.
    pub sigma_min: Vec<f64>,
    /// Relative change between the two largest depths.
    pub relative_change: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaScan {
    pub depths: Vec<usize>,
    pub tolerance: f64,
    pub points: Vec<SigmaPoint>,
}

/// Smallest singular value of `M` on the two-sided window `[-N, N]`.
///
/// The codomain is widened by the z-degree hull of `M` so that no block is
/// dropped: the matrix is the exact restriction of the bilateral operator to
/// the window.
pub fn sigma_min_at(m: &LaurentMatrix, k: f64, depth: usize) -> Result<f64> {
    let n = depth as i64;
    let (lo, hi) = m.degree_range().unwrap_or((0, 0));
    let domain = TruncationWindow::two_sided(-n, n)?;
    let codomain = TruncationWindow::two_sided(-n + lo.min(0), n + hi.max(0))?;
    let t = float_truncation(m, &domain, &codomain, k);
    Ok(singular_values(&t).last().copied().unwrap_or(0.0))
}

pub fn sigma_min_scan(m: &LaurentMatrix, k_grid: &[f64], depths: &[usize], policy: &NumericalRankPolicy) -> Result<SigmaScan> {
    if k_grid.is_empty() || depths.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    if let Some(k) = k_grid.iter().find(|k| !(**k > 0.0)) {
        return Err(Error::BadWeight(k.to_string()));
    }
    let mut grid = k_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    if depths[0] < policy.min_depth {
        return Err(Error::DepthTooSmall { depth: depths[0], slack: policy.min_depth });
    }
    let points = par_map(&grid, |&k| -> Result<SigmaPoint> {
        let sigma_min = depths.iter().map(|&n| sigma_min_at(m, k, n)).collect::<Result<Vec<_>>>()?;
        let relative_change = match sigma_min.as_slice() {
            [.., a, b] => {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            }
            _ => 0.0,
        };
        Ok(SigmaPoint { k, sigma_min, relative_change, stable: relative_change <= 0.05 })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SigmaScan { depths, tolerance: policy.rel_tol, points })
}

/// Characteristic polynomial `det(x I - A)`, coefficients from the constant
/// term up, computed exactly.
pub fn characteristic_polynomial(a: &Matrix<Rational>) -> Result<Vec<Rational>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch("characteristic polynomial of a non-square matrix".into()));
    }
    // Faddeev-LeVerrier.
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = Matrix::<Rational>::identity(n);
    for k in 1..=n {
        let amk = a.mul(&mk)?;
        let c = -amk.trace() / Rational::from_integer(BigInt::from(k));
        coeffs[n - k] = c.clone();
        mk = amk.add(&Matrix::identity(n).scale(&c))?;
    }
    Ok(coeffs)
}

fn eval(poly: &[Rational], x: &Rational) -> Rational {
    poly.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Divides by `(x - r)`; `r` must be a root.
fn deflate(poly: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = poly.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for i in (1..=n).rev() {
        carry = &poly[i] + carry * r;
        out[i - 1] = carry.clone();
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Splits off every rational root (with multiplicity); returns the roots
/// and the remaining factor.
pub fn rational_roots(poly: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut p: Vec<Rational> = poly.to_vec();
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        roots.push(Rational::zero());
    }
    loop {
        if p.len() <= 1 {
            break;
        }
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let (Some(a0), Some(an)) = (ints[0].abs().to_u64(), ints.last().unwrap().abs().to_u64()) else { break };
        if a0 > 1_000_000_000_000 || an > 1_000_000_000_000 {
            break;
        }
        let mut found = None;
        'search: for q in divisors(an) {
            for num in divisors(a0) {
                for s in [1i64, -1] {
                    let cand = Rational::new(BigInt::from(num) * s, BigInt::from(q));
                    if eval(&p, &cand).is_zero() {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                p = deflate(&p, &r);
                roots.push(r);
            }
            None => break,
        }
    }
    roots.sort();
    (roots, p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularRadius {
    pub radius: f64,
    /// Exact value as `"num/den"` when the eigenvalue is rational.
    pub exact: Option<String>,
}

/// Radii `1/|mu|` over the nonzero eigenvalues `mu` of the regular
/// representation of `h`. Rational eigenvalues give exact radii; the rest
/// are found numerically from the remaining factor.
pub fn singular_radii(h: &GroupAlgebraMatrix) -> Result<Vec<SingularRadius>> {
    let poly = characteristic_polynomial(&h.regular_representation())?;
    let (roots, rest) = rational_roots(&poly);
    let mut out: Vec<SingularRadius> = Vec::new();
    for r in roots.iter().filter(|r| !r.is_zero()) {
        let radius = r.abs().recip();
        let exact = radius.to_string();
        if !out.iter().any(|s| s.exact.as_deref() == Some(exact.as_str())) {
            out.push(SingularRadius { radius: rational_to_f64(&radius), exact: Some(exact) });
        }
    }
    if rest.len() > 2 {
        let deg = rest.len() - 1;
        let lead = rational_to_f64(&rest[deg]);
        let companion = DMatrix::from_fn(deg, deg, |i, j| {
            if i == 0 {
                -rational_to_f64(&rest[deg - 1 - j]) / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        for mu in companion.complex_eigenvalues().iter() {
            let abs = mu.norm();
            if abs > 0.0 {
                let radius = 1.0 / abs;
                if !out.iter().any(|s| s.exact.is_none() && (s.radius - radius).abs() <= 1e-9 * radius) {
                    out.push(SingularRadius { radius, exact: None });
                }
            }
        }
    }
    out.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub index: usize,
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    /// Numerical homology dimensions, lowest degree first.
    pub homology: Vec<usize>,
    pub vanishes: bool,
    /// Distance to the nearest root `1/mu` of `det(I - lambda h)`.
    pub root_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaScan {
    pub radius: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub degrees: (i64, i64),
    /// Only filled in when `P` sits in a single degree.
    pub singular_radii: Option<Vec<SingularRadius>>,
    pub points: Vec<LambdaPoint>,
}

fn complex_specialization(m: &LaurentMatrix, lambda: Complex64) -> DMatrix<Complex64> {
    let order = m.group().order();
    let mut out = DMatrix::<Complex64>::zeros(m.nrows() * order, m.ncols() * order);
    for (&d, t) in m.terms() {
        let scale = lambda.powi(d as i32);
        let rep = to_dmatrix(&t.regular_representation());
        out += rep.map(|x| Complex64::new(x, 0.0) * scale);
    }
    out
}

/// Numerical homology of `cone(I - lambda h)` at `S` equally spaced points
/// of the circle `|lambda| = k`, starting on the positive real axis.
pub fn lambda_circle_scan(h: &ChainMap<GroupAlgebraMatrix>, radius: f64, samples: usize, policy: &NumericalRankPolicy) -> Result<LambdaScan> {
    if !(radius > 0.0) {
        return Err(Error::BadWeight(radius.to_string()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is needed".into()));
    }
    let t = mapping_torus(h)?;
    let p = h.source();
    let m = t.group().order();
    let mut roots: Vec<Complex64> = Vec::new();
    for hj in h.maps() {
        if hj.nrows() == 0 {
            continue;
        }
        let eig = to_dmatrix(&hj.regular_representation()).complex_eigenvalues();
        roots.extend(eig.iter().filter(|mu| mu.norm() > 1e-300).map(|mu| mu.inv()));
    }
    let singular_radii = if p.ranks().iter().filter(|&&r| r > 0).count() == 1 {
        let j = p.degrees().find(|&j| p.rank(j) > 0).expect("one nonzero degree");
        Some(singular_radii(&h.component(j))?)
    } else {
        None
    };
    let idx: Vec<usize> = (0..samples).collect();
    let points = par_map(&idx, |&s| {
        let theta = 2.0 * PI * s as f64 / samples as f64;
        let lambda = if s == 0 { Complex64::new(radius, 0.0) } else { Complex64::from_polar(radius, theta) };
        let ranks: Vec<(i64, usize)> = (t.d_min()..=t.d_max() + 1)
            .map(|j| {
                let d = complex_specialization(&t.differential(j), lambda);
                (j, numerical_rank(&complex_singular_values(&d), policy.rel_tol))
            })
            .collect();
        let rank_of = |j: i64| ranks.iter().find(|(d, _)| *d == j).map_or(0, |(_, r)| *r);
        let homology: Vec<usize> = t.degrees().map(|j| t.rank(j) * m - rank_of(j) - rank_of(j + 1)).collect();
        let vanishes = homology.iter().all(|&d| d == 0);
        let root_distance = roots.iter().map(|r| (r - lambda).norm()).min_by(f64::total_cmp);
        LambdaPoint { index: s, theta, re: lambda.re, im: lambda.im, homology, vanishes, root_distance }
    });
    Ok(LambdaScan {
        radius,
        samples,
        tolerance: policy.rel_tol,
        degrees: (t.d_min(), t.d_max()),
        singular_radii,
        points,
    })
}

/// A finite-window chain complex of float matrices; every coordinate
/// carries the z-degree it sits at.
#[derive(Clone, Debug)]
pub struct WindowComplex {
    pub d_min: i64,
    /// `diffs[i]` maps degree `d_min + i + 1` to `d_min + i`.
    pub diffs: Vec<DMatrix<f64>>,
    /// Per degree, the z-degree of every coordinate.
    pub labels: Vec<Vec<i64>>,
    /// Per degree, whether each coordinate lies in the boundary band.
    pub boundary: Vec<Vec<bool>>,
}

impl WindowComplex {
    pub fn d_max(&self) -> i64 {
        self.d_min + self.labels.len() as i64 - 1
    }

    fn dim(&self, j: i64) -> usize {
        if j < self.d_min || j > self.d_max() {
            0
        } else {
            self.labels[(j - self.d_min) as usize].len()
        }
    }

    fn diff(&self, j: i64) -> DMatrix<f64> {
        if j > self.d_min && j <= self.d_max() {
            self.diffs[(j - self.d_min - 1) as usize].clone()
        } else {
            DMatrix::zeros(self.dim(j - 1), self.dim(j))
        }
    }

    /// Dual complex of formal dimension `n`: degree `j` is degree `n - j`
    /// here, differentials are transposed and z-labels negated.
    pub fn dual(&self, n: i64) -> WindowComplex {
        let lo = n - self.d_max();
        let hi = n - self.d_min;
        let diffs = (lo + 1..=hi).map(|j| self.diff(n - j + 1).transpose()).collect();
        let at = |j: i64| (j - self.d_min) as usize;
        let labels = (lo..=hi).map(|j| self.labels[at(n - j)].iter().map(|z| -z).collect()).collect();
        let boundary = (lo..=hi).map(|j| self.boundary[at(n - j)].clone()).collect();
        WindowComplex { d_min: lo, diffs, labels, boundary }
    }

    /// `D = beta + beta^*` from even to odd degrees, with the coordinate
    /// boundary flags of domain and codomain.
    pub fn even_operator(&self) -> (DMatrix<f64>, Vec<bool>, Vec<bool>) {
        let degrees: Vec<i64> = (self.d_min..=self.d_max()).collect();
        let even: Vec<i64> = degrees.iter().copied().filter(|j| j.rem_euclid(2) == 0).collect();
        let odd: Vec<i64> = degrees.iter().copied().filter(|j| j.rem_euclid(2) == 1).collect();
        let offsets = |set: &[i64]| {
            let mut acc = 0;
            set.iter()
                .map(|&j| {
                    let o = acc;
                    acc += self.dim(j);
                    (j, o)
                })
                .collect::<Vec<_>>()
        };
        let (eo, oo) = (offsets(&even), offsets(&odd));
        let rows: usize = odd.iter().map(|&j| self.dim(j)).sum();
        let cols: usize = even.iter().map(|&j| self.dim(j)).sum();
        let mut d = DMatrix::zeros(rows, cols);
        let find = |set: &[(i64, usize)], j: i64| set.iter().find(|(d, _)| *d == j).map(|(_, o)| *o);
        for &(j, c0) in &eo {
            if let Some(r0) = find(&oo, j - 1) {
                let b = self.diff(j);
                d.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(&b);
            }
            if let Some(r0) = find(&oo, j + 1) {
                let b = self.diff(j + 1).transpose();
                d.view_mut((r0, c0), (b.nrows(), b.ncols())).copy_from(&b);
            }
        }
        let flags = |set: &[i64]| set.iter().flat_map(|&j| self.boundary[(j - self.d_min) as usize].clone()).collect();
        (d, flags(&odd), flags(&even))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullCount {
    pub total: usize,
    pub interior: usize,
    pub boundary: usize,
}

/// Near-null space of `m` (relative tolerance) split into interior and
/// boundary modes by the eigenvalues of `V^T P_boundary V`.
pub fn classified_kernel(m: &DMatrix<f64>, boundary: &[bool], rel_tol: f64) -> NullCount {
    let (r, c) = m.shape();
    if c == 0 {
        return NullCount { total: 0, interior: 0, boundary: 0 };
    }
    let square = if r < c {
        let mut s = DMatrix::zeros(c, c);
        s.view_mut((0, 0), (r, c)).copy_from(m);
        s
    } else {
        m.clone()
    };
    let svd = SVD::new(square, false, true);
    let v_t = svd.v_t.expect("requested");
    let sigma = &svd.singular_values;
    let max = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * max;
    let null_rows: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= cutoff).collect();
    let total = null_rows.len();
    if total == 0 {
        return NullCount { total: 0, interior: 0, boundary: 0 };
    }
    let mut gram = DMatrix::<f64>::zeros(total, total);
    for (a, &ra) in null_rows.iter().enumerate() {
        for (b, &rb) in null_rows.iter().enumerate() {
            gram[(a, b)] = (0..c).filter(|&x| boundary[x]).map(|x| v_t[(ra, x)] * v_t[(rb, x)]).sum();
        }
    }
    let eig = gram.symmetric_eigenvalues();
    let interior = eig.iter().filter(|&&e| e < 0.5).count();
    NullCount { total, interior, boundary: total - interior }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReading {
    pub depth: usize,
    pub kernel: NullCount,
    pub cokernel: NullCount,
    /// Interior kernel minus interior cokernel.
    pub index: i64,
}

pub fn index_reading(w: &WindowComplex, depth: usize, rel_tol: f64) -> IndexReading {
    let (d, row_flags, col_flags) = w.even_operator();
    let kernel = classified_kernel(&d, &col_flags, rel_tol);
    let cokernel = classified_kernel(&d.transpose(), &row_flags, rel_tol);
    IndexReading { depth, kernel, cokernel, index: kernel.interior as i64 - cokernel.interior as i64 }
}

/// The compact piece glued onto the half-telescope: a complex `F` over the
/// group ring at z-degree zero and a chain map `f : F -> T`, whose entries
/// must lie in nonnegative z-degrees.
#[derive(Clone, Debug)]
pub struct Attachment {
    pub complex: ChainComplex<GroupAlgebraMatrix>,
    pub map: Vec<LaurentMatrix>,
}

#[derive(Clone, Debug)]
pub struct IndexModel {
    pub h: ChainMap<GroupAlgebraMatrix>,
    pub attachment: Option<Attachment>,
    /// Use the full telescope on `[-N, N]` instead of the half-line `[0, N]`.
    pub two_sided: bool,
}

impl IndexModel {
    /// Point complex `Q` glued at `z^0` to the half-telescope of `h = 1`
    /// on `Q`.
    pub fn ray() -> Self {
        let g = Arc::new(FiniteGroup::trivial());
        let one = GroupAlgebraMatrix::identity(g.clone(), 1);
        let p = ChainComplex::new(g.clone(), 0, vec![1], vec![]).expect("valid");
        let h = ChainMap::new(p.clone(), p.clone(), vec![one.clone()]).expect("valid");
        let attachment = Attachment { complex: p, map: vec![LaurentMatrix::constant(one)] };
        IndexModel { h, attachment: Some(attachment), two_sided: false }
    }

    /// The full telescope of `h` with nothing attached.
    pub fn pure(h: ChainMap<GroupAlgebraMatrix>) -> Self {
        IndexModel { h, attachment: None, two_sided: true }
    }

    /// `chi` and `chi^lf` of the model.
    pub fn euler_pair(&self) -> (i64, i64) {
        if self.two_sided {
            (0, 0)
        } else {
            (crate::complexes::euler_characteristic(self.h.source()), 0)
        }
    }
}

/// Boundary band width used for a window of depth `N`.
pub fn boundary_width(depth: usize) -> usize {
    (depth / 4).max(2)
}

/// Builds the window complex of the model: the cone of `(id, f)` from `F`
/// to `F + T^+` restricted to z-degrees `[0, N]` (or the full telescope on
/// `[-N, N]`), in the basis `k^{-n} z^n`.
pub fn window_complex(model: &IndexModel, k: f64, depth: usize) -> Result<WindowComplex> {
    let t = mapping_torus(&model.h)?;
    let n = depth as i64;
    let window = if model.two_sided { TruncationWindow::two_sided(-n, n)? } else { TruncationWindow::nonneg(0, n)? };
    let width = boundary_width(depth) as i64;
    let near_end = |z: i64| z > n - width || (model.two_sided && z < -n + width);
    let m = t.group().order();
    let empty = ChainComplex::empty(t.group().clone());
    let (f_cx, f_maps) = match &model.attachment {
        Some(a) => {
            if a.map.len() != a.complex.ranks().len() {
                return Err(Error::DimensionMismatch("attaching map needs one matrix per degree of F".into()));
            }
            for (i, fm) in a.map.iter().enumerate() {
                let j = a.complex.d_min() + i as i64;
                if fm.nrows() != t.rank(j) || fm.ncols() != a.complex.rank(j) {
                    return Err(Error::DimensionMismatch(format!("attaching map in degree {j} has the wrong shape")));
                }
                if fm.degree_range().is_some_and(|(lo, _)| lo < 0) {
                    return Err(Error::InvalidArgument("attaching map must land in nonnegative z-degrees".into()));
                }
            }
            (&a.complex, a.map.as_slice())
        }
        None => (&empty, &[][..]),
    };
    let f_at = |j: i64| -> Option<&LaurentMatrix> {
        if f_cx.is_empty() || j < f_cx.d_min() || j > f_cx.d_max() {
            None
        } else {
            Some(&f_maps[(j - f_cx.d_min()) as usize])
        }
    };
    // Chain-map condition on the Laurent level.
    for j in f_cx.degrees() {
        let fj = f_at(j).expect("in range");
        let lhs = t.differential(j).mul(fj)?;
        let f_prev = f_at(j - 1).cloned().unwrap_or_else(|| LaurentMatrix::zeros(t.group().clone(), t.rank(j - 1), f_cx.rank(j - 1)));
        let rhs = f_prev.mul(&LaurentMatrix::constant(f_cx.differential(j)))?;
        if let Some((row, col)) = lhs.sub(&rhs)?.first_nonzero() {
            return Err(Error::NotAChainMap { degree: j, row, col });
        }
    }
    let lo = if f_cx.is_empty() { t.d_min() } else { t.d_min().min(f_cx.d_min()) };
    let hi = if f_cx.is_empty() { t.d_max() } else { t.d_max().max(f_cx.d_max() + 1) };
    let zero_window = TruncationWindow::two_sided(0, 0)?;
    let fdim = |j: i64| f_cx.rank(j) * m;
    let tdim = |j: i64| t.rank(j) * m * window.len();
    let dim = |j: i64| fdim(j) + tdim(j) + fdim(j - 1);
    let mut labels = Vec::new();
    let mut boundary = Vec::new();
    for j in lo..=hi {
        let mut l = vec![0; fdim(j)];
        for z in window.degrees() {
            l.extend(std::iter::repeat(z).take(t.rank(j) * m));
        }
        l.extend(std::iter::repeat(0).take(fdim(j - 1)));
        boundary.push(l.iter().enumerate().map(|(i, &z)| i >= fdim(j) && i < fdim(j) + tdim(j) && near_end(z)).collect());
        labels.push(l);
    }
    let mut diffs = Vec::new();
    for j in lo + 1..=hi {
        let mut b = DMatrix::zeros(dim(j - 1), dim(j));
        let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        // F_j -> F_{j-1}
        let df = to_dmatrix(&f_cx.differential(j).regular_representation());
        b.view_mut((0, 0), (fdim(j - 1), fdim(j))).copy_from(&df);
        // T_j -> T_{j-1}
        let dt = float_truncation(&t.differential(j), &window, &window, k);
        b.view_mut((fdim(j - 1), fdim(j)), (tdim(j - 1), tdim(j))).copy_from(&dt);
        // F_{j-1} -> F_{j-1} by (-1)^j id and -> T_{j-1} by (-1)^j f
        let c0 = fdim(j) + tdim(j);
        for i in 0..fdim(j - 1) {
            b[(i, c0 + i)] = sign;
        }
        if let Some(fm) = f_at(j - 1) {
            let ft = float_truncation(fm, &zero_window, &window, k) * sign;
            b.view_mut((fdim(j - 1), c0), (tdim(j - 1), fdim(j - 1))).copy_from(&ft);
        }
        // F_{j-1} -> F_{j-2}
        let df = to_dmatrix(&f_cx.differential(j - 1).regular_representation());
        b.view_mut((fdim(j - 1) + tdim(j - 1), c0), (fdim(j - 2), fdim(j - 1))).copy_from(&df);
        diffs.push(b);
    }
    Ok(WindowComplex { d_min: lo, diffs, labels, boundary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexPoint {
    pub k: f64,
    pub readings: Vec<IndexReading>,
    /// Same index at the two largest depths.
    pub stable: bool,
    pub stabilized_index: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexScan {
    pub exploratory: bool,
    pub depths: Vec<usize>,
    pub tolerance: f64,
    pub chi: i64,
    pub chi_lf: i64,
    /// Formal dimension when the dual model was scanned.
    pub dual_dimension: Option<i64>,
    pub boundary_width: Vec<usize>,
    pub points: Vec<IndexPoint>,
}

/// Index of `D = beta + beta^*` on the window for every `k` and depth.
///
/// With `dual_dimension = Some(n)` the dual window complex of formal
/// dimension `n` is scanned instead. The dual lives over `z^-1`, so its
/// weight `k` is read off the original window at weight `1/k`.
pub fn index_window_experiment(
    model: &IndexModel,
    k_grid: &[f64],
    depths: &[usize],
    dual_dimension: Option<i64>,
    policy: &NumericalRankPolicy,
) -> Result<IndexScan> {
    if k_grid.is_empty() || depths.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    if let Some(k) = k_grid.iter().find(|k| !(**k > 0.0)) {
        return Err(Error::BadWeight(k.to_string()));
    }
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    if depths[0] < policy.min_depth {
        return Err(Error::DepthTooSmall { depth: depths[0], slack: policy.min_depth });
    }
    let mut grid = k_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let points = par_map(&grid, |&k| -> Result<IndexPoint> {
        let mut readings = Vec::new();
        for &n in &depths {
            let w = match dual_dimension {
                Some(dim) => window_complex(model, 1.0 / k, n)?.dual(dim),
                None => window_complex(model, k, n)?,
            };
            readings.push(index_reading(&w, n, policy.rel_tol));
        }
        let stable = match readings.as_slice() {
            [.., a, b] => a.index == b.index,
            _ => false,
        };
        let stabilized_index = stable.then(|| readings.last().expect("nonempty").index);
        Ok(IndexPoint { k, readings, stable, stabilized_index })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (chi, chi_lf) = model.euler_pair();
    let (chi, chi_lf) = match dual_dimension {
        Some(n) if n.rem_euclid(2) == 1 => (-chi, -chi_lf),
        _ => (chi, chi_lf),
    };
    Ok(IndexScan {
        exploratory: true,
        boundary_width: depths.iter().map(|&n| boundary_width(n)).collect(),
        depths,
        tolerance: policy.rel_tol,
        chi,
        chi_lf,
        dual_dimension,
        points,
    })
}

/// Plain-text CSV renderings for plotting.
pub trait CsvReport {
    fn to_csv(&self) -> String;
}

impl CsvReport for SigmaScan {
    fn to_csv(&self) -> String {
        let mut s = String::from("k,depth,sigma_min,stable\n");
        for p in &self.points {
            for (n, v) in self.depths.iter().zip(&p.sigma_min) {
                s.push_str(&format!("{},{},{},{}\n", p.k, n, v, p.stable));
            }
        }
        s
    }
}

impl CsvReport for LambdaScan {
    fn to_csv(&self) -> String {
        let mut s = String::from("index,theta,re,im,vanishes,homology\n");
        for p in &self.points {
            let dims: Vec<String> = p.homology.iter().map(|d| d.to_string()).collect();
            s.push_str(&format!("{},{},{},{},{},{}\n", p.index, p.theta, p.re, p.im, p.vanishes, dims.join(" ")));
        }
        s
    }
}

impl CsvReport for IndexScan {
    fn to_csv(&self) -> String {
        let mut s = String::from("k,depth,kernel,interior_kernel,cokernel,interior_cokernel,index,stable\n");
        for p in &self.points {
            for r in &p.readings {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    p.k, r.depth, r.kernel.total, r.kernel.interior, r.cokernel.total, r.cokernel.interior, r.index, p.stable
                ));
            }
        }
        s
    }
}
