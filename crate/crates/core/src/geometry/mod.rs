//! Poincaré-disk geometry, the Bolza surface group and its Dirichlet octagon.

mod exact;

pub use exact::ExactElement;

use crate::error::{LabError, Result};
use num_complex::Complex64;
use rustc_hash::FxHashSet;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

/// Evaluation routines reject points with `|z| ≥ 1 − EPS_BOUNDARY`.
pub const EPS_BOUNDARY: f64 = 1e-6;

pub const FOLD_ITERATION_CAP: usize = 1000;

/// Largest cumulative element count `group_enumerate` will produce by default.
pub const DEFAULT_ELEMENT_CAP: usize = 4_000_000;

/// A point of the open unit disk, the universal cover with metric `4|dz|²/(1−|z|²)²`.
pub type DiskPoint = Complex64;

/// Disk isometry `z ↦ (az + b)/(b̄z + ā)` with `|a|² − |b|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub a: Complex64,
    pub b: Complex64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    pub fn new(a: Complex64, b: Complex64) -> Self {
        GroupElement { a, b }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    #[inline]
    fn denominator(&self, z: Complex64) -> Complex64 {
        self.b.conj() * z + self.a.conj()
    }

    /// Action without domain checks.
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / self.denominator(z)
    }

    /// Complex derivative `1/(b̄z + ā)²`.
    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = self.denominator(z);
        1.0 / (d * d)
    }

    /// Second complex derivative `−2b̄/(b̄z + ā)³`.
    #[inline]
    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        let d = self.denominator(z);
        -2.0 * self.b.conj() / (d * d * d)
    }

    pub fn determinant(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// Max-norm distance between matrices, with `±` identified.
    pub fn projective_distance(&self, other: &GroupElement) -> f64 {
        let same = (self.a - other.a).norm().max((self.b - other.b).norm());
        let flipped = (self.a + other.a).norm().max((self.b + other.b).norm());
        same.min(flipped)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.projective_distance(&GroupElement::IDENTITY) <= tol
    }
}

fn check_open_disk(z: Complex64) -> Result<()> {
    if !(z.norm_sqr() < 1.0) {
        return Err(LabError::Domain(format!("point {z} is not inside the unit disk")));
    }
    Ok(())
}

/// Rejects points outside the disk of radius `1 − EPS_BOUNDARY`.
pub fn check_evaluation_point(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0 - EPS_BOUNDARY) {
        return Err(LabError::Domain(format!(
            "point {z} lies within {EPS_BOUNDARY} of the boundary circle"
        )));
    }
    Ok(())
}

pub fn mobius_apply(g: &GroupElement, z: DiskPoint) -> Result<DiskPoint> {
    check_open_disk(z)?;
    Ok(g.apply(z))
}

pub fn mobius_derivative(g: &GroupElement, z: DiskPoint) -> Result<Complex64> {
    check_open_disk(z)?;
    Ok(g.derivative(z))
}

/// Hyperbolic distance for curvature −1.
pub fn hyp_distance(z: DiskPoint, w: DiskPoint) -> Result<f64> {
    check_open_disk(z)?;
    check_open_disk(w)?;
    Ok(hyp_distance_unchecked(z, w))
}

#[inline]
pub(crate) fn hyp_distance_unchecked(z: Complex64, w: Complex64) -> f64 {
    let ratio = (z - w).norm() / (1.0 - w.conj() * z).norm();
    2.0 * ratio.min(1.0).atanh()
}

/// Point at hyperbolic distance `t·d(p, q)` from `p` on the geodesic to `q`.
pub fn geodesic_point(p: Complex64, q: Complex64, t: f64) -> Complex64 {
    let to_origin = GroupElement::new(Complex64::new(1.0, 0.0), -p);
    let scale = 1.0 / (1.0 - p.norm_sqr()).sqrt();
    let to_origin = GroupElement::new(to_origin.a * scale, to_origin.b * scale);
    let image = to_origin.apply(q);
    if image.norm() == 0.0 {
        return p;
    }
    let d = 2.0 * image.norm().atanh();
    let moved = image / image.norm() * (t * d / 2.0).tanh();
    to_origin.inverse().apply(moved)
}

/// The regular octagon with vertices `2^{-1/4} e^{i(kπ/4 − π/8)}`.
pub struct Octagon;

impl Octagon {
    pub fn vertex_radius() -> f64 {
        2f64.powf(-0.25)
    }

    /// Vertex `k` (mod 8) at angle `kπ/4 − π/8`; side `k` joins vertices `k` and `k+1`.
    pub fn vertex(k: usize) -> Complex64 {
        let angle = (k % 8) as f64 * FRAC_PI_4 - FRAC_PI_8;
        Complex64::from_polar(Self::vertex_radius(), angle)
    }

    /// Hyperbolic distance from the centre to a vertex.
    pub fn circumradius() -> f64 {
        (3.0 + 2.0 * 2f64.sqrt()).acosh()
    }

    /// Hyperbolic distance from the centre to a side midpoint.
    pub fn inradius() -> f64 {
        (1.0 + 2f64.sqrt()).acosh()
    }

    pub fn side_length() -> f64 {
        hyp_distance_unchecked(Self::vertex(0), Self::vertex(1))
    }

    /// Point on side `k` at arclength fraction `t` from vertex `k`.
    pub fn side_point(k: usize, t: f64) -> Complex64 {
        geodesic_point(Self::vertex(k), Self::vertex(k + 1), t)
    }
}

/// Group elements grouped by word length.
#[derive(Clone, Debug)]
pub struct WordShells {
    shells: Vec<Vec<GroupElement>>,
}

impl WordShells {
    pub fn identity_only() -> Self {
        WordShells {
            shells: vec![vec![GroupElement::IDENTITY]],
        }
    }

    pub fn max_word_length(&self) -> usize {
        self.shells.len() - 1
    }

    pub fn shell(&self, n: usize) -> &[GroupElement] {
        &self.shells[n]
    }

    pub fn shells(&self) -> &[Vec<GroupElement>] {
        &self.shells
    }

    pub fn len(&self) -> usize {
        self.shells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupElement> {
        self.shells.iter().flatten()
    }

    /// Elements of word length at most `n`.
    pub fn truncated(&self, n: usize) -> WordShells {
        WordShells {
            shells: self.shells[..=n.min(self.max_word_length())].to_vec(),
        }
    }
}

/// The Bolza surface group acting on the disk.
#[derive(Clone, Debug)]
pub struct FuchsianGroup {
    generators: Vec<GroupElement>,
    exact_generators: Vec<ExactElement>,
    element_cap: usize,
}

impl FuchsianGroup {
    /// Generators `g_k` (`a = 1+√2`, `b = √(2+2√2)e^{ikπ/4}`) at indices `k`,
    /// and their inverses at `k + 4`. Generator `j` maps side `j + 4` onto side `j`.
    pub fn bolza() -> Self {
        let mut exact_generators: Vec<ExactElement> =
            (0..4).map(ExactElement::generator).collect();
        for k in 0..4 {
            exact_generators.push(exact_generators[k].inverse());
        }
        let generators = exact_generators
            .iter()
            .map(|e| {
                let (a, b) = e.to_float();
                GroupElement::new(a, b)
            })
            .collect();
        FuchsianGroup {
            generators,
            exact_generators,
            element_cap: DEFAULT_ELEMENT_CAP,
        }
    }

    pub fn with_element_cap(mut self, cap: usize) -> Self {
        self.element_cap = cap;
        self
    }

    pub fn element_cap(&self) -> usize {
        self.element_cap
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn generator(&self, j: usize) -> &GroupElement {
        &self.generators[j % 8]
    }

    /// Breadth-first enumeration by word length with exact deduplication.
    ///
    /// All relators have even length, so a neighbour of shell `n` lies in
    /// shell `n − 1` or `n + 1`; only two exact shells are kept alive.
    pub fn enumerate(&self, max_word_length: usize) -> Result<WordShells> {
        let mut shells = vec![vec![GroupElement::IDENTITY]];
        let mut previous: FxHashSet<ExactElement> = FxHashSet::default();
        let mut current_list = vec![ExactElement::IDENTITY];
        let mut current: FxHashSet<ExactElement> = current_list.iter().copied().collect();
        let mut total = 1usize;
        for _ in 1..=max_word_length {
            let mut next_set: FxHashSet<ExactElement> = FxHashSet::default();
            let mut next_list = Vec::new();
            for x in &current_list {
                for g in &self.exact_generators {
                    let y = x.compose(g).canonical();
                    if previous.contains(&y) || current.contains(&y) || !next_set.insert(y) {
                        continue;
                    }
                    next_list.push(y);
                    if total + next_list.len() > self.element_cap {
                        return Err(LabError::Resource(format!(
                            "word length {max_word_length} needs more than {} group elements",
                            self.element_cap
                        )));
                    }
                }
            }
            total += next_list.len();
            shells.push(
                next_list
                    .iter()
                    .map(|e| {
                        let (a, b) = e.to_float();
                        GroupElement::new(a, b)
                    })
                    .collect(),
            );
            previous = std::mem::replace(&mut current, next_set);
            current_list = next_list;
        }
        Ok(WordShells { shells })
    }

    /// True when `z` lies in the closed Dirichlet octagon up to `tol`.
    pub fn in_domain(&self, z: Complex64, tol: f64) -> bool {
        let c = z.norm_sqr();
        self.generators
            .iter()
            .all(|g| g.apply(z).norm_sqr() >= c - tol)
    }

    /// Greedy fold: repeatedly apply the generator that moves `z` closest to 0.
    pub fn fold(&self, z: DiskPoint) -> Result<(DiskPoint, GroupElement)> {
        check_evaluation_point(z)?;
        let mut w = z;
        let mut total = GroupElement::IDENTITY;
        for _ in 0..FOLD_ITERATION_CAP {
            let current = w.norm_sqr();
            let mut best = current;
            let mut best_index = None;
            for (j, g) in self.generators.iter().enumerate() {
                let r = g.apply(w).norm_sqr();
                if r < best {
                    best = r;
                    best_index = Some(j);
                }
            }
            match best_index {
                Some(j) if best < current - 1e-14 * (1.0 - current).max(1e-3) => {
                    let g = &self.generators[j];
                    w = g.apply(w);
                    total = g.compose(&total);
                }
                _ => return Ok((w, total)),
            }
        }
        Err(LabError::convergence(
            format!("folding {z} did not terminate within {FOLD_ITERATION_CAP} iterations"),
            Vec::new(),
        ))
    }
}

pub fn group_enumerate(group: &FuchsianGroup, max_word_length: usize) -> Result<WordShells> {
    group.enumerate(max_word_length)
}

pub fn fold_to_domain(group: &FuchsianGroup, z: DiskPoint) -> Result<(DiskPoint, GroupElement)> {
    group.fold(z)
}
