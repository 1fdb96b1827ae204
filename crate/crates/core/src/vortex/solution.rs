//! Nonlinear solves and evaluation of the conformal factor.

use super::fem::{barycentric_gradients, newton, Dof, FemSystem};
use super::mesh::Mesh;
use crate::differentials::AutomorphicForm;
use crate::error::{LabError, Result};
use crate::geometry::FuchsianGroup;
use num_complex::Complex64;
use std::sync::Arc;

/// Barycentric coordinate below which a point is not in any triangle.
pub const LOCATE_TOLERANCE: f64 = -0.25;

/// Conformal factor `u`, its gradient, and the discrete Laplacian at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalValue {
    pub u: f64,
    pub u_x: f64,
    pub u_y: f64,
    /// `Δ_{g₀}u`, interpolated linearly.
    pub laplacian: f64,
}

// P2 data per triangle: corner values, edge midpoints (01, 12, 20) and corner Laplacians.
#[derive(Clone, Copy, Debug)]
struct Patch {
    u: [f64; 3],
    mid: [f64; 3],
    lap: [f64; 3],
}

#[derive(Clone, Debug)]
struct Locator {
    lo: f64,
    cell: f64,
    cells: usize,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    fn new(mesh: &Mesh) -> Locator {
        let extent = mesh.vertices.iter().map(|v| v.re.abs().max(v.im.abs())).fold(0.0, f64::max) + 1e-9;
        let cells = ((mesh.triangles.len() as f64 / 2.0).sqrt().ceil() as usize).max(1);
        let cell = 2.0 * extent / cells as f64;
        let mut buckets = vec![Vec::new(); cells * cells];
        let index = |x: f64| (((x + extent) / cell).floor().max(0.0) as usize).min(cells - 1);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let p = tri.map(|i| mesh.vertices[i]);
            let (x0, x1) = (index(p.iter().map(|p| p.re).fold(f64::MAX, f64::min)), index(p.iter().map(|p| p.re).fold(f64::MIN, f64::max)));
            let (y0, y1) = (index(p.iter().map(|p| p.im).fold(f64::MAX, f64::min)), index(p.iter().map(|p| p.im).fold(f64::MIN, f64::max)));
            for ix in x0..=x1 {
                for iy in y0..=y1 {
                    buckets[iy * cells + ix].push(t as u32);
                }
            }
        }
        Locator {
            lo: -extent,
            cell,
            cells,
            buckets,
        }
    }

    fn candidates(&self, z: Complex64) -> &[u32] {
        let index = |x: f64| (((x - self.lo) / self.cell).floor().max(0.0) as usize).min(self.cells - 1);
        &self.buckets[index(z.im) * self.cells + index(z.re)]
    }
}

fn barycentric(p: [Complex64; 3], z: Complex64) -> [f64; 3] {
    let (grads, _) = barycentric_gradients(p);
    let l1 = grads[1].re * (z - p[0]).re + grads[1].im * (z - p[0]).im;
    let l2 = grads[2].re * (z - p[0]).re + grads[2].im * (z - p[0]).im;
    [1.0 - l1 - l2, l1, l2]
}

/// Discrete conformal factor on a mesh, with P2 reconstruction for evaluation.
#[derive(Clone, Debug)]
pub struct ConformalSolution {
    mesh: Arc<Mesh>,
    m: u32,
    periodic: bool,
    group: Option<FuchsianGroup>,
    /// Nodal values per vertex class.
    u: Vec<f64>,
    alpha: Vec<f64>,
    /// `Δ_{g₀}u` per vertex class, from the stiffness action.
    laplacian: Vec<f64>,
    /// `u_x − i u_y` per class at the representative.
    gradient: Vec<Complex64>,
    residual_norm: f64,
    trace: Vec<f64>,
    patches: Vec<Patch>,
    locator: Locator,
}

impl ConformalSolution {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Nodal values per vertex class.
    pub fn nodal_values(&self) -> &[f64] {
        &self.u
    }

    pub fn nodal_alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `Δ_{g₀}u` per vertex class.
    pub fn nodal_laplacian(&self) -> &[f64] {
        &self.laplacian
    }

    /// Value at a mesh vertex.
    pub fn vertex_value(&self, vertex: usize) -> f64 {
        self.u[self.mesh.class_of(vertex)]
    }

    /// Final `max_i |R_i|/M_i`.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// Residual norm after each Newton step.
    pub fn residual_trace(&self) -> &[f64] {
        &self.trace
    }

    /// `max u`, `min u` over the nodes.
    pub fn range(&self) -> (f64, f64) {
        let max = self.u.iter().copied().fold(f64::MIN, f64::max);
        let min = self.u.iter().copied().fold(f64::MAX, f64::min);
        (min, max)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        mesh: Arc<Mesh>,
        m: u32,
        group: Option<FuchsianGroup>,
        u_vertex: &[f64],
        alpha: Vec<f64>,
        laplacian: Vec<f64>,
        residual_norm: f64,
        trace: Vec<f64>,
    ) -> ConformalSolution {
        let classes = mesh.class_count();
        let mut u = vec![0.0; classes];
        for (v, value) in u_vertex.iter().enumerate() {
            u[mesh.class_of(v)] = *value;
        }
        // Area-weighted P1 gradients, transported to each class representative.
        let mut gradient = vec![Complex64::new(0.0, 0.0); classes];
        let mut weight = vec![0.0; classes];
        for tri in &mesh.triangles {
            let p = tri.map(|i| mesh.vertices[i]);
            let (grads, area) = barycentric_gradients(p);
            let g: Complex64 = (0..3).map(|i| grads[i] * u_vertex[tri[i]]).sum();
            let centroid = (p[0] + p[1] + p[2]) / 3.0;
            let w = area * super::fem::conformal_density(centroid);
            for &v in tri {
                let c = mesh.class_of(v);
                let d = mesh.to_representative(v).derivative(mesh.vertices[v]);
                gradient[c] += w * g.conj() / d;
                weight[c] += w;
            }
        }
        for (g, w) in gradient.iter_mut().zip(&weight) {
            *g /= *w;
        }
        let corner_gradient = |v: usize| -> Complex64 {
            let c = mesh.class_of(v);
            (gradient[c] * mesh.to_representative(v).derivative(mesh.vertices[v])).conj()
        };
        let patches = mesh
            .triangles
            .iter()
            .map(|tri| {
                let values = tri.map(|v| u_vertex[v]);
                let grads = tri.map(corner_gradient);
                let mid = [(0usize, 1usize), (1, 2), (2, 0)].map(|(i, j)| {
                    let e = mesh.vertices[tri[j]] - mesh.vertices[tri[i]];
                    let dg = grads[i] - grads[j];
                    0.5 * (values[i] + values[j]) + (dg.re * e.re + dg.im * e.im) / 8.0
                });
                Patch {
                    u: values,
                    mid,
                    lap: tri.map(|v| laplacian[mesh.class_of(v)]),
                }
            })
            .collect();
        let locator = Locator::new(&mesh);
        ConformalSolution {
            periodic: group.is_some(),
            group,
            m,
            u,
            alpha,
            laplacian,
            gradient,
            residual_norm,
            trace,
            patches,
            locator,
            mesh,
        }
    }

    fn locate(&self, z: Complex64) -> Result<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in self.locator.candidates(z) {
            let t = t as usize;
            let p = self.mesh.triangles[t].map(|i| self.mesh.vertices[i]);
            let b = barycentric(p, z);
            let worst = b[0].min(b[1]).min(b[2]);
            if worst >= -1e-12 {
                return Ok((t, b));
            }
            if best.is_none_or(|(_, _, w)| worst > w) {
                best = Some((t, b, worst));
            }
        }
        match best {
            Some((t, b, worst)) if worst >= LOCATE_TOLERANCE => Ok((t, b)),
            _ => Err(LabError::Mesh(format!("point {z} is not covered by the mesh"))),
        }
    }

    /// P2 value and gradient at a point covered by the mesh chart.
    pub fn eval_local(&self, w: Complex64) -> Result<ConformalValue> {
        let (t, l) = self.locate(w)?;
        let patch = &self.patches[t];
        let p = self.mesh.triangles[t].map(|i| self.mesh.vertices[i]);
        let (grads, _) = barycentric_gradients(p);
        let edges = [(0usize, 1usize), (1, 2), (2, 0)];
        let mut u = 0.0;
        let mut g = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            u += patch.u[i] * l[i] * (2.0 * l[i] - 1.0);
            g += grads[i] * (patch.u[i] * (4.0 * l[i] - 1.0));
        }
        for (e, &(i, j)) in edges.iter().enumerate() {
            u += 4.0 * patch.mid[e] * l[i] * l[j];
            g += (grads[j] * l[i] + grads[i] * l[j]) * (4.0 * patch.mid[e]);
        }
        let laplacian = (0..3).map(|i| patch.lap[i] * l[i]).sum();
        Ok(ConformalValue {
            u,
            u_x: g.re,
            u_y: g.im,
            laplacian,
        })
    }

    /// Value and chart gradient at any disk point; periodic solutions fold first.
    pub fn eval(&self, z: Complex64) -> Result<ConformalValue> {
        match &self.group {
            None => self.eval_local(z),
            Some(group) => {
                let (w, g) = group.fold(z)?;
                let value = self.eval_local(w)?;
                // ∂_z u(z) = ∂_w u(w) γ′(z)
                let grad = Complex64::new(value.u_x, -value.u_y) * g.derivative(z);
                Ok(ConformalValue {
                    u_x: grad.re,
                    u_y: -grad.im,
                    ..value
                })
            }
        }
    }

    /// Recovered gradient `(u_x, u_y)` at a vertex in its own chart.
    pub fn vertex_gradient(&self, vertex: usize) -> (f64, f64) {
        let c = self.mesh.class_of(vertex);
        let d = self.mesh.to_representative(vertex).derivative(self.mesh.vertices[vertex]);
        let g = self.gradient[c] * d;
        (g.re, -g.im)
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }
}

/// `α = |A|²_{g₀}` at each vertex class representative.
pub fn nodal_alpha(mesh: &Mesh, form: &AutomorphicForm) -> Result<Vec<f64>> {
    (0..mesh.class_count())
        .map(|c| form.alpha_fast(mesh.vertices[mesh.class_representative(c)]))
        .collect()
}

fn check_alpha(alpha: &[f64]) -> Result<()> {
    if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(LabError::Domain(format!("|A|² must be finite and non-negative, found {a}")));
    }
    Ok(())
}

fn class_dofs(mesh: &Mesh) -> Vec<Dof> {
    (0..mesh.vertices.len()).map(|v| Dof::Free(mesh.class_of(v))).collect()
}

/// Solves `Δ_{g₀}u = e^{2u} − 1 − (m−1)e^{−2(m−1)u}α` on the closed surface, starting from `u = 0`.
pub fn solve_vortex(group: &FuchsianGroup, mesh: Arc<Mesh>, alpha: Vec<f64>, m: u32, tol: f64) -> Result<ConformalSolution> {
    let start = vec![0.0; mesh.class_count()];
    solve_vortex_with_initial(group, mesh, alpha, m, tol, start)
}

/// As [`solve_vortex`] with a given initial guess per vertex class.
pub fn solve_vortex_with_initial(
    group: &FuchsianGroup,
    mesh: Arc<Mesh>,
    alpha: Vec<f64>,
    m: u32,
    tol: f64,
    initial: Vec<f64>,
) -> Result<ConformalSolution> {
    if m < 2 {
        return Err(LabError::Config(format!("vortex degree m = {m} is excluded; need m ≥ 2")));
    }
    let classes = mesh.class_count();
    if alpha.len() != classes || initial.len() != classes {
        return Err(LabError::Mesh(format!("expected {classes} nodal values")));
    }
    check_alpha(&alpha)?;
    let dofs = class_dofs(&mesh);
    let system = FemSystem::assemble(&mesh.vertices, &mesh.triangles, &dofs, classes)?;
    let result = newton(&system, &alpha, m, tol, initial)?;
    let stiff = system.apply_stiffness(&result.u);
    let laplacian = stiff.iter().zip(&system.mass).map(|(k, m)| -k / m).collect();
    let u_vertex: Vec<f64> = (0..mesh.vertices.len()).map(|v| result.u[mesh.class_of(v)]).collect();
    Ok(ConformalSolution::from_parts(
        mesh,
        m,
        Some(group.clone()),
        &u_vertex,
        alpha,
        laplacian,
        result.residual_norm,
        result.trace,
    ))
}

/// Dirichlet problem on a mesh without identifications: interior nodes solve the
/// vortex equation with data `alpha(z)`, boundary nodes take `boundary(z)`.
pub fn solve_dirichlet(
    mesh: Arc<Mesh>,
    m: u32,
    alpha: impl Fn(Complex64) -> f64,
    boundary: impl Fn(Complex64) -> f64,
    tol: f64,
) -> Result<ConformalSolution> {
    if m < 2 {
        return Err(LabError::Config(format!("vortex degree m = {m} is excluded; need m ≥ 2")));
    }
    let mut dofs = Vec::with_capacity(mesh.vertices.len());
    let mut free = Vec::new();
    for (v, z) in mesh.vertices.iter().enumerate() {
        if mesh.is_boundary(v) {
            dofs.push(Dof::Fixed(boundary(*z)));
        } else {
            dofs.push(Dof::Free(free.len()));
            free.push(v);
        }
    }
    let alpha_free: Vec<f64> = free.iter().map(|&v| alpha(mesh.vertices[v])).collect();
    let system = FemSystem::assemble(&mesh.vertices, &mesh.triangles, &dofs, free.len())?;
    let result = newton(&system, &alpha_free, m, tol, vec![0.0; free.len()])?;
    let stiff = system.apply_stiffness(&result.u);
    let mut u_vertex = vec![0.0; mesh.vertices.len()];
    let mut laplacian = vec![0.0; mesh.vertices.len()];
    let mut alpha_all = vec![0.0; mesh.vertices.len()];
    for (v, dof) in dofs.iter().enumerate() {
        match *dof {
            Dof::Fixed(value) => {
                u_vertex[v] = value;
                alpha_all[v] = alpha(mesh.vertices[v]);
            }
            Dof::Free(i) => {
                u_vertex[v] = result.u[i];
                laplacian[v] = -stiff[i] / system.mass[i];
                alpha_all[v] = alpha_free[i];
            }
        }
    }
    Ok(ConformalSolution::from_parts(
        mesh,
        m,
        None,
        &u_vertex,
        alpha_all,
        laplacian,
        result.residual_norm,
        result.trace,
    ))
}

/// `(u, ∂_x u, ∂_y u)` at `z`.
pub fn eval_conformal(solution: &ConformalSolution, z: Complex64) -> Result<(f64, f64, f64)> {
    let v = solution.eval(z)?;
    Ok((v.u, v.u_x, v.u_y))
}

/// Gaussian curvature of `e^{2u}g₀` at `z`: the algebraic value
/// `−1 + (m−1)α e^{−2mu}` and the mesh value `e^{−2u}(−1 − Δ_{g₀}u)`.
pub fn curvature_eval(solution: &ConformalSolution, form: &AutomorphicForm, z: Complex64) -> Result<(f64, f64)> {
    let v = solution.eval(z)?;
    let alpha = form.alpha_fast(z)?;
    let m = f64::from(solution.m);
    let k_alg = -1.0 + (m - 1.0) * alpha * (-2.0 * m * v.u).exp();
    let k_mesh = (-2.0 * v.u).exp() * (-1.0 - v.laplacian);
    Ok((k_alg, k_mesh))
}
