//! Structured triangulations of the octagon (with side identifications) and
//! of geodesic disks.
//!
//! Both meshes use the same ring layout: ring `i` of `n` has `8i` vertices,
//! eight per sector, and sector `k` of ring `i` holds `j = 0..i`.

use crate::error::{LabError, Result};
use crate::geometry::{geodesic_point, hyp_distance_unchecked, FuchsianGroup, GroupElement, Octagon};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// Tolerance for matching paired boundary vertices.
pub const PAIRING_TOLERANCE: f64 = 1e-8;

/// Boundary vertex `first` on side `side` is mapped to `second` on side
/// `side + 4` by generator `side + 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub first: usize,
    pub second: usize,
    pub side: usize,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Complex64>,
    pub triangles: Vec<[usize; 3]>,
    pub pairings: Vec<Pairing>,
    pub h: f64,
    rings: usize,
    class_of: Vec<usize>,
    class_rep: Vec<usize>,
    to_rep: Vec<GroupElement>,
}

fn ring_index(i: usize, k: usize, j: usize) -> usize {
    if i == 0 {
        return 0;
    }
    1 + 4 * i * (i - 1) + (k * i + j) % (8 * i)
}

fn ring_triangles(n: usize) -> Vec<[usize; 3]> {
    let mut triangles = Vec::with_capacity(8 * n * n);
    for i in 0..n {
        for k in 0..8 {
            for j in 0..=i {
                triangles.push([ring_index(i, k, j), ring_index(i + 1, k, j), ring_index(i + 1, k, j + 1)]);
                if j < i {
                    triangles.push([ring_index(i, k, j), ring_index(i + 1, k, j + 1), ring_index(i, k, j + 1)]);
                }
            }
        }
    }
    triangles
}

fn ring_vertices(n: usize, place: impl Fn(usize, usize, usize) -> Complex64) -> Vec<Complex64> {
    let mut vertices = vec![Complex64::new(0.0, 0.0); 1 + 4 * n * (n + 1)];
    for i in 1..=n {
        for k in 0..8 {
            for j in 0..i {
                vertices[ring_index(i, k, j)] = place(i, k, j);
            }
        }
    }
    vertices
}

fn max_edge(vertices: &[Complex64], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| hyp_distance_unchecked(vertices[a], vertices[b]))
        .fold(0.0, f64::max)
}

fn octagon_layout(n: usize) -> (Vec<Complex64>, Vec<[usize; 3]>) {
    let origin = Complex64::new(0.0, 0.0);
    let vertices = ring_vertices(n, |i, k, j| {
        let target = Octagon::side_point(k, j as f64 / i as f64);
        geodesic_point(origin, target, i as f64 / n as f64)
    });
    (vertices, ring_triangles(n))
}

impl Mesh {
    /// Rings used to build the mesh.
    pub fn rings(&self) -> usize {
        self.rings
    }

    pub fn class_count(&self) -> usize {
        self.class_rep.len()
    }

    pub fn class_of(&self, vertex: usize) -> usize {
        self.class_of[vertex]
    }

    pub fn class_representative(&self, class: usize) -> usize {
        self.class_rep[class]
    }

    /// Element mapping the vertex position to its class representative's position.
    pub fn to_representative(&self, vertex: usize) -> &GroupElement {
        &self.to_rep[vertex]
    }

    /// Vertices of the outer ring.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let n = self.rings;
        (0..8 * n).map(|p| ring_index(n, 0, 0) + p).collect()
    }

    pub fn is_boundary(&self, vertex: usize) -> bool {
        vertex >= ring_index(self.rings, 0, 0)
    }

    /// Partner of a boundary vertex across `side` (0..8), and the element realising it.
    pub fn partner(&self, vertex: usize, side: usize) -> Option<(usize, usize)> {
        self.pairings.iter().find_map(|p| {
            if p.first == vertex && p.side == side {
                Some((p.second, (p.side + 4) % 8))
            } else if p.second == vertex && (p.side + 4) % 8 == side {
                Some((p.first, p.side))
            } else {
                None
            }
        })
    }

    /// Twice the signed Euclidean area of a triangle.
    pub fn signed_area2(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        let (u, v) = (b - a, c - a);
        u.re * v.im - u.im * v.re
    }

    /// Mesh without identifications: a geodesic disk of hyperbolic radius `radius` about 0.
    pub fn geodesic_disk(radius: f64, rings: usize) -> Mesh {
        let vertices = ring_vertices(rings, |i, k, j| {
            let angle = (k as f64 + j as f64 / i as f64) * FRAC_PI_4;
            let rho = (i as f64 / rings as f64 * radius / 2.0).tanh();
            Complex64::from_polar(rho, angle)
        });
        let triangles = ring_triangles(rings);
        let count = vertices.len();
        Mesh {
            h: max_edge(&vertices, &triangles),
            vertices,
            triangles,
            pairings: Vec::new(),
            rings,
            class_of: (0..count).collect(),
            class_rep: (0..count).collect(),
            to_rep: vec![GroupElement::IDENTITY; count],
        }
    }
}

/// Octagon mesh with the coarsest ring count whose longest hyperbolic edge is at most `target_h`.
pub fn build_mesh(group: &FuchsianGroup, target_h: f64) -> Result<Mesh> {
    if !(target_h > 0.0) {
        return Err(LabError::Mesh(format!("target mesh size {target_h} must be positive")));
    }
    let (v1, t1) = octagon_layout(1);
    let mut n = ((max_edge(&v1, &t1) / target_h).ceil() as usize).max(1);
    while n > 1 {
        let (v, t) = octagon_layout(n - 1);
        if max_edge(&v, &t) <= target_h {
            n -= 1;
        } else {
            break;
        }
    }
    loop {
        let (v, t) = octagon_layout(n);
        if max_edge(&v, &t) <= target_h || n > 5000 {
            break;
        }
        n += 1;
    }
    build_mesh_with_rings(group, n)
}

/// Octagon mesh with `rings` rings.
pub fn build_mesh_with_rings(group: &FuchsianGroup, rings: usize) -> Result<Mesh> {
    let n = rings.max(1);
    let (vertices, triangles) = octagon_layout(n);
    let boundary_start = ring_index(n, 0, 0);
    // Side s holds ring positions s·n ..= s·n + n.
    let side_vertex = |s: usize, j: usize| boundary_start + ((s % 8) * n + j) % (8 * n);
    let mut pairings = Vec::new();
    for side in 0..4 {
        let g = group.generator(side + 4);
        for j in 0..=n {
            let first = side_vertex(side, j);
            let image = g.apply(vertices[first]);
            let candidates = (0..=n).map(|l| side_vertex(side + 4, l));
            let (second, dist) = candidates
                .map(|c| (c, (vertices[c] - image).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("side has vertices");
            if dist > PAIRING_TOLERANCE {
                return Err(LabError::Mesh(format!(
                    "boundary vertex {first} on side {side} has no partner within {PAIRING_TOLERANCE} (nearest {dist:e})"
                )));
            }
            pairings.push(Pairing { first, second, side });
        }
    }

    // Union-find over pairings, then transport elements from each class representative.
    let count = vertices.len();
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in &pairings {
        let (a, b) = (find(&mut parent, p.first), find(&mut parent, p.second));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut class_of = vec![usize::MAX; count];
    let mut class_rep = Vec::new();
    for v in 0..count {
        let root = find(&mut parent, v);
        if class_of[root] == usize::MAX {
            class_of[root] = class_rep.len();
            class_rep.push(root);
        }
        class_of[v] = class_of[root];
    }
    let mut to_rep: Vec<Option<GroupElement>> = vec![None; count];
    for &r in &class_rep {
        to_rep[r] = Some(GroupElement::IDENTITY);
    }
    // Edges v → w with element e: e(x_v) = x_w.
    let mut changed = true;
    while changed {
        changed = false;
        for p in &pairings {
            let forward = *group.generator(p.side + 4);
            let edges = [(p.first, p.second, forward), (p.second, p.first, forward.inverse())];
            for (v, w, e) in edges {
                // to_rep[v] = to_rep[w] ∘ e
                if to_rep[v].is_none() {
                    if let Some(tw) = to_rep[w] {
                        to_rep[v] = Some(tw.compose(&e));
                        changed = true;
                    }
                }
            }
        }
    }
    let to_rep: Vec<GroupElement> = to_rep
        .into_iter()
        .enumerate()
        .map(|(v, e)| e.ok_or_else(|| LabError::Mesh(format!("vertex {v} is disconnected from its class"))))
        .collect::<Result<_>>()?;
    for v in 0..count {
        let rep = class_rep[class_of[v]];
        let image = to_rep[v].apply(vertices[v]);
        if (image - vertices[rep]).norm() > PAIRING_TOLERANCE {
            return Err(LabError::Mesh(format!("class transport for vertex {v} misses its representative")));
        }
    }
    Ok(Mesh {
        h: max_edge(&vertices, &triangles),
        vertices,
        triangles,
        pairings,
        rings: n,
        class_of,
        class_rep,
        to_rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn coarse_mesh_size_and_orientation() {
        let group = FuchsianGroup::bolza();
        let mesh = build_mesh(&group, 0.2).unwrap();
        assert!((100..=10_000).contains(&mesh.vertices.len()));
        assert!(mesh.h <= 0.2);
        assert!((0..mesh.triangles.len()).all(|t| mesh.signed_area2(t) > 0.0));
    }

    #[test]
    fn pairings_are_realised_by_generators() {
        let group = FuchsianGroup::bolza();
        let mesh = build_mesh_with_rings(&group, 5).unwrap();
        assert_eq!(mesh.pairings.len(), 4 * 6);
        for p in &mesh.pairings {
            let image = group.generator(p.side + 4).apply(mesh.vertices[p.first]);
            assert!((image - mesh.vertices[p.second]).norm() < 1e-12);
            assert_eq!(mesh.partner(p.first, p.side), Some((p.second, p.side + 4)));
        }
        // Eight octagon corners form a single class.
        let corners: Vec<usize> = (0..8).map(|k| ring_index(5, k, 0)).collect();
        assert!(corners.iter().all(|&v| mesh.class_of(v) == mesh.class_of(corners[0])));
        assert_eq!(mesh.class_count(), mesh.vertices.len() - 4 * 5 - 3);
    }

    fn angle_sums(mesh: &Mesh) -> Vec<f64> {
        let mut angle = vec![0.0; mesh.class_count()];
        for tri in &mesh.triangles {
            for i in 0..3 {
                let (a, b, c) = (mesh.vertices[tri[i]], mesh.vertices[tri[(i + 1) % 3]], mesh.vertices[tri[(i + 2) % 3]]);
                angle[mesh.class_of(tri[i])] += ((c - a) / (b - a)).arg().abs();
            }
        }
        angle
    }

    // Interior angle sums are exact; boundary classes see the chord-versus-arc defect, which is O(h).
    #[test]
    fn class_angle_sums_are_full_turns() {
        let group = FuchsianGroup::bolza();
        let mut defects = Vec::new();
        for rings in [6, 12] {
            let mesh = build_mesh_with_rings(&group, rings).unwrap();
            let sums = angle_sums(&mesh);
            let mut defect: f64 = 0.0;
            for v in 0..mesh.vertices.len() {
                let err = (sums[mesh.class_of(v)] - 2.0 * PI).abs();
                if mesh.is_boundary(v) {
                    defect = defect.max(err);
                } else {
                    assert!(err < 1e-9, "{err}");
                }
            }
            defects.push(defect);
        }
        assert!(defects[0] / defects[1] > 1.8, "{defects:?}");
    }
}
