//! Relative Poincaré series `Θ(z) = Σ_γ f(γz) γ′(z)^m` over a word-length ball.
//!
//! The truncated sum is re-expanded once as a Taylor polynomial about 0
//! (valid on `|z| ≤ MASTER_RADIUS`) and tabulated as low-degree local
//! expansions on a square grid for fast evaluation along orbits.

use crate::dynamics::frame::SectionJet;
use crate::error::{LabError, Result};
use crate::geometry::{check_evaluation_point, FuchsianGroup, GroupElement, Octagon, WordShells};
use num_complex::Complex64;
use std::sync::Arc;

/// Radius up to which the global Taylor polynomial is used.
pub const MASTER_RADIUS: f64 = 0.9;
/// Radius up to which the local grid expansions are used.
pub const GRID_RADIUS: f64 = 0.87;
const GRID_HALF_WIDTH: f64 = 0.88;
const GRID_SPACING: f64 = 0.01;
const GRID_DEGREE: usize = 12;
const TAYLOR_TOLERANCE: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub derivative: Complex64,
    pub tail_estimate: f64,
}

struct TaylorGrid {
    cells_per_side: usize,
    coefficients: Vec<Complex64>,
}

impl TaylorGrid {
    fn empty() -> Self {
        TaylorGrid {
            cells_per_side: 0,
            coefficients: Vec::new(),
        }
    }

    fn center(&self, i: usize) -> f64 {
        -GRID_HALF_WIDTH + (i as f64 + 0.5) * GRID_SPACING
    }

    fn build(master: &[Complex64]) -> Self {
        let cells_per_side = (2.0 * GRID_HALF_WIDTH / GRID_SPACING).round() as usize;
        let stride = GRID_DEGREE + 1;
        let mut grid = TaylorGrid {
            cells_per_side,
            coefficients: vec![Complex64::new(0.0, 0.0); cells_per_side * cells_per_side * stride],
        };
        let mut work = vec![Complex64::new(0.0, 0.0); master.len()];
        for iy in 0..cells_per_side {
            for ix in 0..cells_per_side {
                let c = Complex64::new(grid.center(ix), grid.center(iy));
                if c.norm() > GRID_RADIUS + GRID_SPACING {
                    continue;
                }
                work.copy_from_slice(master);
                let base = (iy * cells_per_side + ix) * stride;
                let mut len = work.len();
                // Repeated synthetic division by (z − c) yields the shifted coefficients.
                for k in 0..stride {
                    if len == 0 {
                        break;
                    }
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in (0..len).rev() {
                        let next = work[i] + acc * c;
                        work[i] = acc;
                        acc = next;
                    }
                    grid.coefficients[base + k] = acc;
                    // work[..len − 1] now holds the quotient.
                    len -= 1;
                }
            }
        }
        grid
    }

    #[inline]
    fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let index = |t: f64| {
            let i = ((t + GRID_HALF_WIDTH) / GRID_SPACING).floor();
            (i.max(0.0) as usize).min(self.cells_per_side - 1)
        };
        let (ix, iy) = (index(z.re), index(z.im));
        let c = Complex64::new(self.center(ix), self.center(iy));
        let stride = GRID_DEGREE + 1;
        let base = (iy * self.cells_per_side + ix) * stride;
        horner(&self.coefficients[base..base + stride], z - c)
    }
}

#[inline]
fn horner(coefficients: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut derivative = Complex64::new(0.0, 0.0);
    for c in coefficients.iter().rev() {
        derivative = derivative * z + value;
        value = value * z + c;
    }
    (value, derivative)
}

fn binomial_ln(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

// Stirling series; arguments here are ≥ 1.
fn ln_gamma(x: f64) -> f64 {
    if x < 20.0 {
        let mut shift = 0.0;
        let mut y = x;
        while y < 20.0 {
            shift -= y.ln();
            y += 1.0;
        }
        return shift + ln_gamma(y);
    }
    let inv = 1.0 / x;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv * inv * (1.0 / 360.0 - inv * inv / 1260.0))
}

/// Number of Taylor terms so that every term's remainder on `|z| ≤ MASTER_RADIUS`
/// is below tolerance, uniformly in `x = |b/a|`.
fn taylor_order(m: u32, degree: usize) -> usize {
    let p = (degree + 2 * m as usize) as f64;
    let r = MASTER_RADIUS;
    let mut n = 32usize;
    loop {
        let nf = n as f64;
        let mut worst = f64::NEG_INFINITY;
        for i in 1..400 {
            let x = i as f64 / 400.0;
            let log_bound = f64::from(m) * (1.0 - x * x).ln()
                + binomial_ln(nf + p - 1.0, p - 1.0)
                + nf * (r * x).ln()
                - (1.0 - r * x).ln()
                + degree as f64 * 2f64.ln();
            worst = worst.max(log_bound);
        }
        if worst < TAYLOR_TOLERANCE.ln() || n > 4000 {
            return n;
        }
        n += 8;
    }
}

/// Degree-`m` holomorphic differential built from a polynomial seed.
pub struct AutomorphicForm {
    m: u32,
    seed: Vec<Complex64>,
    group: FuchsianGroup,
    shells: Arc<WordShells>,
    master: Vec<Complex64>,
    grid: TaylorGrid,
    tail_scale: f64,
}

impl std::fmt::Debug for AutomorphicForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AutomorphicForm")
            .field("m", &self.m)
            .field("seed", &self.seed)
            .field("truncation", &self.shells.max_word_length())
            .field("tail_scale", &self.tail_scale)
            .finish_non_exhaustive()
    }
}

impl AutomorphicForm {
    /// Truncation word length used when a config does not set one.
    pub fn default_truncation(m: u32) -> usize {
        if m == 2 {
            7
        } else {
            6
        }
    }

    pub fn new(group: &FuchsianGroup, m: u32, seed: &[Complex64], truncation: usize) -> Result<Self> {
        if m < 2 {
            return Err(LabError::Config(format!(
                "degree m = {m} is not supported: the series needs m ≥ 2 and degree 1 is excluded"
            )));
        }
        if seed.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Ok(Self::zero(group, m));
        }
        let shells = Arc::new(group.enumerate(truncation)?);
        Self::from_shells(group, shells, m, seed)
    }

    /// The zero differential of degree `m`.
    pub fn zero(group: &FuchsianGroup, m: u32) -> Self {
        AutomorphicForm {
            m,
            seed: Vec::new(),
            group: group.clone(),
            shells: Arc::new(WordShells::identity_only()),
            master: Vec::new(),
            grid: TaylorGrid::empty(),
            tail_scale: 0.0,
        }
    }

    /// Builds the series over pre-enumerated elements, which may be shared between forms.
    pub fn from_shells(group: &FuchsianGroup, shells: Arc<WordShells>, m: u32, seed: &[Complex64]) -> Result<Self> {
        if m < 2 {
            return Err(LabError::Config(format!(
                "degree m = {m} is not supported: the series needs m ≥ 2 and degree 1 is excluded"
            )));
        }
        let mut seed = seed.to_vec();
        while seed.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            seed.pop();
        }
        if seed.is_empty() {
            return Ok(Self::zero(group, m));
        }
        let master = master_coefficients(&shells, m, &seed);
        let grid = TaylorGrid::build(&master);
        let mut form = AutomorphicForm {
            m,
            seed,
            group: group.clone(),
            shells,
            master,
            grid,
            tail_scale: 0.0,
        };
        form.tail_scale = form.compute_tail_scale();
        Ok(form)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn seed(&self) -> &[Complex64] {
        &self.seed
    }

    pub fn is_zero(&self) -> bool {
        self.seed.is_empty()
    }

    pub fn truncation(&self) -> usize {
        self.shells.max_word_length()
    }

    pub fn element_count(&self) -> usize {
        self.shells.len()
    }

    pub fn taylor_terms(&self) -> usize {
        self.master.len()
    }

    pub fn group(&self) -> &FuchsianGroup {
        &self.group
    }

    fn seed_eval(&self, w: Complex64) -> (Complex64, Complex64) {
        horner(&self.seed, w)
    }

    /// Term-wise sum over all stored elements, valid anywhere in the disk.
    pub fn direct_sum(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut derivative = Complex64::new(0.0, 0.0);
        if self.is_zero() {
            return (value, derivative);
        }
        for g in self.shells.iter() {
            let (v, d) = self.term(g, z);
            value += v;
            derivative += d;
        }
        (value, derivative)
    }

    #[inline]
    fn term(&self, g: &GroupElement, z: Complex64) -> (Complex64, Complex64) {
        let m = self.m as i32;
        let w = g.apply(z);
        let d1 = g.derivative(z);
        let d2 = g.second_derivative(z);
        let (f, fp) = self.seed_eval(w);
        let dm1 = d1.powi(m - 1);
        let dm = dm1 * d1;
        (f * dm, fp * dm * d1 + f * f64::from(self.m) * dm1 * d2)
    }

    /// Contribution of word-length shell `n` at `z`.
    pub fn shell_sum(&self, z: Complex64, n: usize) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.shells.shell(n).iter().map(|g| self.term(g, z).0).sum()
    }

    /// `Σ |f(γz)| |γ′(z)|^m` over shell `n`.
    pub fn shell_abs_sum(&self, z: Complex64, n: usize) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.shells
            .shell(n)
            .iter()
            .map(|g| self.seed_eval(g.apply(z)).0.norm() * g.derivative(z).norm().powi(self.m as i32))
            .sum()
    }

    fn compute_tail_scale(&self) -> f64 {
        let last = self.truncation();
        let mut points = vec![Complex64::new(0.0, 0.0)];
        for k in 0..8 {
            points.push(Octagon::vertex(k) * 0.999);
            points.push(Octagon::vertex(k) * 0.5);
            points.push(Octagon::side_point(k, 0.5));
            points.push(Octagon::side_point(k, 0.25) * 0.8);
        }
        let m = self.m as i32;
        points
            .iter()
            .map(|w| self.shell_abs_sum(*w, last) * (1.0 - w.norm_sqr()).powi(m))
            .fold(0.0, f64::max)
    }

    /// Size of the last word-length shell at `z`, scaled as a weight-`m` quantity.
    pub fn tail_estimate(&self, z: Complex64) -> f64 {
        self.tail_scale / (1.0 - z.norm_sqr()).powi(self.m as i32)
    }

    /// Invariant tail size `τ`, the maximum of `(1−|w|²)^m Σ_last |f(γw)||γ′(w)|^m` over sample points.
    pub fn tail_scale(&self) -> f64 {
        self.tail_scale
    }

    pub fn series_eval(&self, z: Complex64) -> Result<SeriesValue> {
        check_evaluation_point(z)?;
        let (value, derivative) = if self.is_zero() {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        } else if z.norm() <= MASTER_RADIUS {
            horner(&self.master, z)
        } else {
            self.direct_sum(z)
        };
        Ok(SeriesValue {
            value,
            derivative,
            tail_estimate: if self.is_zero() { 0.0 } else { self.tail_estimate(z) },
        })
    }

    /// `α = |A|²_{g₀} = |Θ(z)|² ((1−|z|²)/2)^{2m}`.
    pub fn alpha_eval(&self, z: Complex64) -> Result<f64> {
        let v = self.series_eval(z)?;
        Ok(alpha_from_value(v.value, z, self.m))
    }

    /// Fast `(Θ, Θ′)` for points of the fundamental domain or its neighbourhood.
    pub fn fast_eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        if self.is_zero() {
            return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        }
        let r = z.norm();
        if r <= GRID_RADIUS {
            Ok(self.grid.eval(z))
        } else if r <= MASTER_RADIUS {
            Ok(horner(&self.master, z))
        } else {
            let (w, g) = self.group.fold(z)?;
            let (v, d) = self.fast_eval(w)?;
            let jet = SectionJet {
                value: v,
                dz: d,
                dzbar: Complex64::new(0.0, 0.0),
            }
            .pull_back(self.m as i32, &g, z);
            Ok((jet.value, jet.dz))
        }
    }

    pub fn alpha_fast(&self, z: Complex64) -> Result<f64> {
        let (v, _) = self.fast_eval(z)?;
        Ok(alpha_from_value(v, z, self.m))
    }
}

pub fn alpha_from_value(value: Complex64, z: Complex64, m: u32) -> f64 {
    value.norm_sqr() * ((1.0 - z.norm_sqr()) / 2.0).powi(2 * m as i32)
}

/// Taylor coefficients about 0 of the truncated sum.
///
/// Each term is `(b̄z+ā)^{−P} Σ_j P_j z^j` with `P = deg f + 2m`, and
/// `(b̄z+ā)^{−P} = ā^{−P} Σ_n C(n+P−1, n) q^n z^n` with `q = −b̄/ā`.
fn master_coefficients(shells: &WordShells, m: u32, seed: &[Complex64]) -> Vec<Complex64> {
    let degree = seed.len() - 1;
    let p = degree + 2 * m as usize;
    let n_terms = taylor_order(m, degree);
    let zero = Complex64::new(0.0, 0.0);
    let mut sums = vec![vec![zero; n_terms]; degree + 1];
    let mut numerator = vec![zero; degree + 1];
    let mut power = vec![zero; degree + 1];
    let mut scratch = vec![zero; degree + 1];
    let seed_scale: f64 = seed.iter().map(|c| c.norm()).sum();
    for g in shells.iter() {
        let abar = g.a.conj();
        let bbar = g.b.conj();
        // numerator = Σ_k c_k (az+b)^k (b̄z+ā)^{d−k}
        numerator.iter_mut().for_each(|c| *c = zero);
        for (k, ck) in seed.iter().enumerate() {
            power.iter_mut().for_each(|c| *c = zero);
            power[0] = Complex64::new(1.0, 0.0);
            for step in 0..degree {
                let len = step + 1;
                let (lin, cst) = if step < k { (g.a, g.b) } else { (bbar, abar) };
                scratch[..=len].iter_mut().for_each(|c| *c = zero);
                for i in 0..len {
                    scratch[i] += power[i] * cst;
                    scratch[i + 1] += power[i] * lin;
                }
                power[..=len].copy_from_slice(&scratch[..=len]);
            }
            for i in 0..=degree {
                numerator[i] += power[i] * ck;
            }
        }
        let q = -bbar / abar;
        let pw = abar.powi(-(p as i32));
        let cutoff = (1e-30 * seed_scale).powi(2);
        for (j, s) in sums.iter_mut().enumerate() {
            let c = numerator[j];
            let mut term = pw * c;
            for (n, slot) in s.iter_mut().enumerate() {
                *slot += term;
                term *= q;
                if n % 32 == 31 && term.norm_sqr() < cutoff {
                    break;
                }
            }
        }
    }
    let mut master = vec![zero; n_terms];
    let mut binom = vec![1.0f64; n_terms];
    for k in 1..n_terms {
        binom[k] = binom[k - 1] * (k + p - 1) as f64 / k as f64;
    }
    for (n, out) in master.iter_mut().enumerate() {
        for (j, s) in sums.iter().enumerate() {
            if n >= j {
                *out += s[n - j] * binom[n - j];
            }
        }
    }
    master
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn master_matches_direct_sum() {
        let group = FuchsianGroup::bolza();
        let seed = [Complex64::new(1.0, 0.0), Complex64::new(0.2, -0.4), Complex64::new(0.0, 0.3)];
        let form = AutomorphicForm::new(&group, 3, &seed, 3).unwrap();
        for z in [Complex64::new(0.1, 0.2), Complex64::new(-0.6, 0.55), Complex64::new(0.0, -0.89)] {
            let (v, d) = form.direct_sum(z);
            let s = form.series_eval(z).unwrap();
            assert!((s.value - v).norm() < 1e-11 * v.norm().max(1.0), "{z}: {} vs {v}", s.value);
            assert!((s.derivative - d).norm() < 1e-10 * d.norm().max(1.0));
            let (fv, fd) = form.fast_eval(z).unwrap();
            assert!((fv - v).norm() < 1e-11 * v.norm().max(1.0));
            assert!((fd - d).norm() < 1e-10 * d.norm().max(1.0));
        }
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(1.0)).abs() < 1e-12);
        assert!((ln_gamma(20.0) - (1..20).map(|k| (k as f64).ln()).sum::<f64>()).abs() < 1e-10);
    }
}
