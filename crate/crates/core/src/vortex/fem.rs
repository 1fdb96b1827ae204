//! P1 finite elements for `Δ_{g₀}u = G(u)` with
//! `G(u) = e^{2u} − 1 − (m−1)e^{−2(m−1)u}α`.
//!
//! `Δ_{g₀} = ((1−|z|²)²/4)Δ`, so the weak form uses the Euclidean stiffness
//! matrix and a lumped mass weighted by `ρ = 4/(1−|z|²)²`.

use crate::error::{LabError, Result};
use num_complex::Complex64;

// Degree-5 Dunavant rule: (weight, barycentric coordinates).
const DUNAVANT7: [(f64, [f64; 3]); 7] = [
    (0.225, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
    (0.132394152788506, [0.059715871789770, 0.470142064105115, 0.470142064105115]),
    (0.132394152788506, [0.470142064105115, 0.059715871789770, 0.470142064105115]),
    (0.132394152788506, [0.470142064105115, 0.470142064105115, 0.059715871789770]),
    (0.125939180544827, [0.797426985353087, 0.101286507323456, 0.101286507323456]),
    (0.125939180544827, [0.101286507323456, 0.797426985353087, 0.101286507323456]),
    (0.125939180544827, [0.101286507323456, 0.101286507323456, 0.797426985353087]),
];

pub fn conformal_density(z: Complex64) -> f64 {
    let q = 1.0 - z.norm_sqr();
    4.0 / (q * q)
}

/// Degree of freedom attached to a mesh vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dof {
    Free(usize),
    Fixed(f64),
}

/// Compressed sparse rows.
#[derive(Clone, Debug)]
pub struct Csr {
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Csr {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::new();
        let mut val: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *val.last_mut().expect("entry exists") += v;
            } else {
                col.push(c);
                val.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Csr { row_ptr, col, val }
    }

    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            *o = acc;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.rows())
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .find(|&k| self.col[k] == r)
                    .map_or(0.0, |k| self.val[k])
            })
            .collect()
    }
}

/// Gradients of the barycentric coordinates and the Euclidean area.
pub fn barycentric_gradients(p: [Complex64; 3]) -> ([Complex64; 3], f64) {
    let area2 = (p[1] - p[0]).re * (p[2] - p[0]).im - (p[1] - p[0]).im * (p[2] - p[0]).re;
    let grad = |j: usize, k: usize| {
        let e = p[k] - p[j];
        Complex64::new(-e.im, e.re) / area2
    };
    ([grad(1, 2), grad(2, 0), grad(0, 1)], 0.5 * area2)
}

/// Assembled discrete operator for the free degrees of freedom.
#[derive(Clone, Debug)]
pub struct FemSystem {
    pub stiffness: Csr,
    /// Stiffness coupling to fixed values.
    pub lift: Vec<f64>,
    /// `∫ ρ φ_i` per free degree of freedom.
    pub mass: Vec<f64>,
}

impl FemSystem {
    pub fn assemble(vertices: &[Complex64], triangles: &[[usize; 3]], dofs: &[Dof], n_free: usize) -> Result<FemSystem> {
        let mut triplets = Vec::with_capacity(9 * triangles.len());
        let mut lift = vec![0.0; n_free];
        let mut mass = vec![0.0; n_free];
        for (t, tri) in triangles.iter().enumerate() {
            let p = tri.map(|i| vertices[i]);
            let (grads, area) = barycentric_gradients(p);
            if !(area > 0.0) {
                return Err(LabError::Mesh(format!("triangle {t} is degenerate or inverted")));
            }
            let mut local_mass = [0.0; 3];
            for (w, bary) in DUNAVANT7 {
                let x = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
                let rho = conformal_density(x);
                for i in 0..3 {
                    local_mass[i] += w * area * rho * bary[i];
                }
            }
            for i in 0..3 {
                let Dof::Free(r) = dofs[tri[i]] else { continue };
                mass[r] += local_mass[i];
                for j in 0..3 {
                    let k = area * (grads[i].re * grads[j].re + grads[i].im * grads[j].im);
                    match dofs[tri[j]] {
                        Dof::Free(c) => triplets.push((r, c, k)),
                        Dof::Fixed(value) => lift[r] += k * value,
                    }
                }
            }
        }
        Ok(FemSystem {
            stiffness: Csr::from_triplets(n_free, triplets),
            lift,
            mass,
        })
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// `(Ku)_i + lift_i`, the weak form of `−Δu` scaled by the mass.
    pub fn apply_stiffness(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.stiffness.mul(u, &mut out);
        for (o, l) in out.iter_mut().zip(&self.lift) {
            *o += l;
        }
        out
    }
}

/// Nonlinearity `G` and its derivative.
#[inline]
pub fn nonlinearity(u: f64, alpha: f64, m: u32) -> (f64, f64) {
    let k = f64::from(m) - 1.0;
    let e2 = (2.0 * u).exp();
    let damp = (-2.0 * k * u).exp() * alpha;
    (e2 - 1.0 - k * damp, 2.0 * e2 + 2.0 * k * k * damp)
}

/// Newton outcome: nodal values, final `max|R_i|/M_i`, and the residual trace.
#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub u: Vec<f64>,
    pub residual_norm: f64,
    pub trace: Vec<f64>,
}

fn residual(system: &FemSystem, u: &[f64], alpha: &[f64], m: u32) -> Vec<f64> {
    let mut r = system.apply_stiffness(u);
    for i in 0..u.len() {
        r[i] += system.mass[i] * nonlinearity(u[i], alpha[i], m).0;
    }
    r
}

fn pointwise_norm(r: &[f64], mass: &[f64]) -> f64 {
    r.iter().zip(mass).map(|(r, m)| (r / m).abs()).fold(0.0, f64::max)
}

fn merit(r: &[f64], mass: &[f64]) -> f64 {
    r.iter().zip(mass).map(|(r, m)| r * r / m).sum()
}

/// Preconditioned conjugate gradients for `(K + diag(d)) x = b`.
fn conjugate_gradient(k: &Csr, extra_diag: &[f64], b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = b.len();
    let diag: Vec<f64> = k.diagonal().iter().zip(extra_diag).map(|(a, d)| a + d).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        k.mul(x, out);
        for i in 0..n {
            out[i] += extra_diag[i] * x[i];
        }
    };
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return Ok(x);
    }
    for _ in 0..(20 * n).max(100) {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= tol * b_norm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(LabError::convergence("conjugate gradients did not converge", Vec::new()))
}

/// Damped Newton iteration from `u0` until `max|R_i|/M_i ≤ tol`.
pub fn newton(system: &FemSystem, alpha: &[f64], m: u32, tol: f64, u0: Vec<f64>) -> Result<NewtonResult> {
    let mut u = u0;
    let mut r = residual(system, &u, alpha, m);
    let mut norm = pointwise_norm(&r, &system.mass);
    let mut trace = vec![norm];
    for _ in 0..60 {
        if norm <= tol {
            return Ok(NewtonResult {
                u,
                residual_norm: norm,
                trace,
            });
        }
        let jac_diag: Vec<f64> = u
            .iter()
            .zip(alpha)
            .zip(&system.mass)
            .map(|((u, a), mass)| mass * nonlinearity(*u, *a, m).1)
            .collect();
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = conjugate_gradient(&system.stiffness, &jac_diag, &rhs, 1e-13)?;
        let current = merit(&r, &system.mass);
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(u, d)| u + step * d).collect();
            let r_trial = residual(system, &trial, alpha, m);
            let value = merit(&r_trial, &system.mass);
            if value.is_finite() && (value <= (1.0 - 1e-4 * step) * current || step < 1e-10) {
                u = trial;
                r = r_trial;
                break;
            }
            step *= 0.5;
        }
        let next = pointwise_norm(&r, &system.mass);
        trace.push(next);
        if !(next < norm) && step < 1e-10 {
            break;
        }
        norm = next;
    }
    if norm <= tol {
        return Ok(NewtonResult {
            u,
            residual_norm: norm,
            trace,
        });
    }
    Err(LabError::convergence(
        format!("Newton iteration stalled at residual {norm:e} (tolerance {tol:e})"),
        trace,
    ))
}
