//! Seeded generators for test populations: complexes built from elementary
//! pieces under a random change of basis, and chain self-maps on them.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complexes::{ChainComplex, ChainMap};
use crate::exact::{integer, rational, Rational};
use crate::group::{FiniteGroup, GroupAlgebraMatrix, GroupRingElement};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub group: Arc<FiniteGroup>,
    /// Largest rank in any degree.
    pub max_rank: usize,
    /// Complexes live in degrees `0..=top`, with `top` at most this.
    pub max_top: i64,
    /// Numerators are drawn from `-max_num..=max_num`.
    pub max_num: i64,
    /// Denominators are drawn from `1..=max_den`.
    pub max_den: i64,
    /// Number of elementary row operations in each change of basis.
    pub mixing: usize,
}

impl RandomSpec {
    pub fn over(group: Arc<FiniteGroup>) -> Self {
        RandomSpec { group, max_rank: 3, max_top: 2, max_num: 3, max_den: 2, mixing: 3 }
    }
}

pub fn random_rational<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Rational {
    rational(rng.gen_range(-spec.max_num..=spec.max_num), rng.gen_range(1..=spec.max_den))
}

pub fn random_element<R: Rng>(rng: &mut R, spec: &RandomSpec) -> GroupRingElement {
    let coeffs = (0..spec.group.order()).map(|_| random_rational(rng, spec)).collect();
    GroupRingElement::new(spec.group.clone(), coeffs).expect("length matches")
}

pub fn random_matrix<R: Rng>(rng: &mut R, spec: &RandomSpec, rows: usize, cols: usize) -> GroupAlgebraMatrix {
    let elems = (0..rows * cols).map(|_| random_element(rng, spec)).collect();
    GroupAlgebraMatrix::from_elements(spec.group.clone(), rows, cols, elems).expect("shape matches")
}

/// Strictly upper triangular, hence nilpotent.
pub fn random_nilpotent<R: Rng>(rng: &mut R, spec: &RandomSpec, n: usize) -> GroupAlgebraMatrix {
    let mut m = random_matrix(rng, spec, n, n);
    let zero = GroupRingElement::zero(spec.group.clone());
    for i in 0..n {
        for j in 0..=i {
            m.set_entry(i, j, &zero);
        }
    }
    m
}

/// Change of basis as a product of elementary matrices, with its inverse.
fn random_basis_change<R: Rng>(rng: &mut R, spec: &RandomSpec, n: usize) -> (GroupAlgebraMatrix, GroupAlgebraMatrix) {
    let mut b = GroupAlgebraMatrix::identity(spec.group.clone(), n);
    let mut b_inv = b.clone();
    if n < 2 {
        return (b, b_inv);
    }
    for _ in 0..spec.mixing {
        let i = rng.gen_range(0..n);
        let mut k = rng.gen_range(0..n - 1);
        if k >= i {
            k += 1;
        }
        let a = random_element(rng, spec);
        let mut e = GroupAlgebraMatrix::identity(spec.group.clone(), n);
        e.set_entry(i, k, &a);
        let mut e_inv = GroupAlgebraMatrix::identity(spec.group.clone(), n);
        e_inv.set_entry(i, k, &a.negated());
        b = e.mul(&b).expect("square");
        b_inv = b_inv.mul(&e_inv).expect("square");
    }
    (b, b_inv)
}

/// One summand starting in degree `j`: a single module, or a contractible
/// pair `P_{j+1} -> P_j` with identity differential.
#[derive(Clone, Copy, Debug)]
struct Piece {
    pair: bool,
}

/// A random complex together with a random chain self-map.
#[derive(Clone, Debug)]
pub struct RandomPair {
    pub complex: ChainComplex<GroupAlgebraMatrix>,
    pub map: ChainMap<GroupAlgebraMatrix>,
}

pub fn random_complex<R: Rng>(rng: &mut R, spec: &RandomSpec) -> ChainComplex<GroupAlgebraMatrix> {
    random_pair(rng, spec).complex
}

/// Builds `P` as a sum of single modules and contractible pairs, mixes the
/// bases, and takes `h = B D B^-1 + d s + s d` where `D` respects the pieces.
pub fn random_pair<R: Rng>(rng: &mut R, spec: &RandomSpec) -> RandomPair {
    let g = spec.group.clone();
    let top = rng.gen_range(0..=spec.max_top);
    let len = (top + 1) as usize;
    let mut ranks = vec![0usize; len];
    let mut pieces: Vec<Vec<Piece>> = vec![Vec::new(); len];
    for j in 0..len {
        let budget = spec.max_rank.saturating_sub(ranks[j]);
        let count = rng.gen_range(0..=budget);
        for _ in 0..count {
            if ranks[j] >= spec.max_rank {
                break;
            }
            let pair = j + 1 < len && ranks[j + 1] < spec.max_rank && rng.gen_bool(0.4);
            pieces[j].push(Piece { pair });
            ranks[j] += 1;
            if pair {
                ranks[j + 1] += 1;
            }
        }
    }
    // Generator layout per degree: singles and pair bottoms of degree j,
    // then pair tops coming from degree j - 1.
    let mut layout: Vec<Vec<(usize, bool)>> = vec![Vec::new(); len];
    for j in 0..len {
        for (idx, p) in pieces[j].iter().enumerate() {
            layout[j].push((idx, false));
            if p.pair {
                layout[j + 1].push((idx, true));
            }
        }
    }
    let pos = |j: usize, idx: usize, top_half: bool| layout[j].iter().position(|&(i, t)| i == idx && t == top_half).expect("present");
    let one = GroupRingElement::one(g.clone());
    let mut normal_diffs = Vec::new();
    for j in 1..len {
        let mut d = GroupAlgebraMatrix::zeros(g.clone(), ranks[j - 1], ranks[j]);
        for (idx, p) in pieces[j - 1].iter().enumerate() {
            if p.pair {
                d.set_entry(pos(j - 1, idx, false), pos(j, idx, true), &one);
            }
        }
        normal_diffs.push(d);
    }
    // D: arbitrary on singles within a degree, one scalar per pair.
    let mut normal_h: Vec<GroupAlgebraMatrix> = ranks.iter().map(|&r| GroupAlgebraMatrix::zeros(g.clone(), r, r)).collect();
    for j in 0..len {
        let singles: Vec<usize> = pieces[j].iter().enumerate().filter(|(_, p)| !p.pair).map(|(i, _)| pos(j, i, false)).collect();
        for &a in &singles {
            for &b in &singles {
                normal_h[j].set_entry(a, b, &random_element(rng, spec));
            }
        }
        for (idx, p) in pieces[j].iter().enumerate() {
            if p.pair {
                let c = random_element(rng, spec);
                normal_h[j].set_entry(pos(j, idx, false), pos(j, idx, false), &c);
                normal_h[j + 1].set_entry(pos(j + 1, idx, true), pos(j + 1, idx, true), &c);
            }
        }
    }
    let changes: Vec<_> = ranks.iter().map(|&r| random_basis_change(rng, spec, r)).collect();
    let diffs: Vec<GroupAlgebraMatrix> = (1..len)
        .map(|j| changes[j - 1].0.mul(&normal_diffs[j - 1]).and_then(|x| x.mul(&changes[j].1)).expect("shapes"))
        .collect();
    let complex = ChainComplex::new(g.clone(), 0, ranks.clone(), diffs).expect("pieces form a complex");
    let s: Vec<GroupAlgebraMatrix> = (0..len).map(|j| random_matrix(rng, spec, complex.rank(j as i64 + 1), ranks[j])).collect();
    let s_at = |j: i64| -> GroupAlgebraMatrix {
        if j >= 0 && (j as usize) < len {
            s[j as usize].clone()
        } else {
            GroupAlgebraMatrix::zeros(g.clone(), complex.rank(j + 1), complex.rank(j))
        }
    };
    let maps = (0..len)
        .map(|j| {
            let jj = j as i64;
            let conj = changes[j].0.mul(&normal_h[j]).and_then(|x| x.mul(&changes[j].1)).expect("square");
            let ds = complex.differential(jj + 1).mul(&s_at(jj)).expect("shapes");
            let sd = s_at(jj - 1).mul(&complex.differential(jj)).expect("shapes");
            conj.add(&ds).and_then(|x| x.add(&sd)).expect("shapes")
        })
        .collect();
    let map = ChainMap::new(complex.clone(), complex.clone(), maps).expect("chain map by construction");
    RandomPair { complex, map }
}

/// Random complex over `Q` in degrees `0..=top` with ranks up to `max_rank`.
pub fn random_rational_complex<R: Rng>(rng: &mut R, max_rank: usize, max_top: i64) -> ChainComplex<GroupAlgebraMatrix> {
    let spec = RandomSpec { max_rank, max_top, max_num: 4, max_den: 3, mixing: 4, ..RandomSpec::over(Arc::new(FiniteGroup::trivial())) };
    random_complex(rng, &spec)
}

/// Random integer in `lo..=hi` as a rational.
pub fn random_integer<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    integer(rng.gen_range(lo..=hi))
}
