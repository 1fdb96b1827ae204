//! Plain-text mesh format.
//!
//! ```text
//! thermolab-mesh v1
//! v x y
//! t i j k
//! p i j
//! u i value
//! ```
//!
//! `p i j` pairs boundary vertex `i` with its image `j`; `u` lines are optional
//! nodal values of the conformal factor.

use super::mesh::{build_mesh_with_rings, Mesh};
use super::solution::ConformalSolution;
use crate::cli::format_float;
use crate::error::{LabError, Result};
use crate::geometry::FuchsianGroup;
use num_complex::Complex64;
use std::fmt::Write;

pub const MESH_HEADER: &str = "thermolab-mesh v1";

/// Serialises a mesh and, optionally, nodal values of a solution on it.
pub fn write_mesh(mesh: &Mesh, solution: Option<&ConformalSolution>) -> String {
    let mut out = String::new();
    out.push_str(MESH_HEADER);
    out.push('\n');
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {}", format_float(v.re), format_float(v.im));
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "t {} {} {}", t[0], t[1], t[2]);
    }
    for p in &mesh.pairings {
        let _ = writeln!(out, "p {} {}", p.first, p.second);
    }
    if let Some(sol) = solution {
        for v in 0..mesh.vertices.len() {
            let _ = writeln!(out, "u {v} {}", format_float(sol.vertex_value(v)));
        }
    }
    out
}

/// Contents of a mesh file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeshFile {
    pub vertices: Vec<Complex64>,
    pub triangles: Vec<[usize; 3]>,
    pub pairs: Vec<(usize, usize)>,
    pub values: Vec<(usize, f64)>,
}

fn parse<T: std::str::FromStr>(token: Option<&str>, line: usize) -> Result<T> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| LabError::Mesh(format!("malformed mesh line {line}")))
}

pub fn parse_mesh(text: &str) -> Result<MeshFile> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == MESH_HEADER => {}
        _ => return Err(LabError::Mesh(format!("missing header {MESH_HEADER:?}"))),
    }
    let mut file = MeshFile::default();
    for (n, line) in lines {
        let n = n + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            None => continue,
            Some("v") => file.vertices.push(Complex64::new(parse(tokens.next(), n)?, parse(tokens.next(), n)?)),
            Some("t") => file.triangles.push([parse(tokens.next(), n)?, parse(tokens.next(), n)?, parse(tokens.next(), n)?]),
            Some("p") => file.pairs.push((parse(tokens.next(), n)?, parse(tokens.next(), n)?)),
            Some("u") => file.values.push((parse(tokens.next(), n)?, parse(tokens.next(), n)?)),
            Some(other) => return Err(LabError::Mesh(format!("unknown record {other:?} on line {n}"))),
        }
        if tokens.next().is_some() {
            return Err(LabError::Mesh(format!("trailing data on mesh line {n}")));
        }
    }
    let count = file.vertices.len();
    let in_range = file.triangles.iter().flatten().all(|&i| i < count)
        && file.pairs.iter().all(|&(i, j)| i < count && j < count)
        && file.values.iter().all(|&(i, _)| i < count);
    if !in_range {
        return Err(LabError::Mesh("vertex index out of range".into()));
    }
    Ok(file)
}

/// Reads an octagon mesh written by [`write_mesh`], rebuilding its identifications.
pub fn read_mesh(group: &FuchsianGroup, text: &str) -> Result<(Mesh, MeshFile)> {
    let file = parse_mesh(text)?;
    // 1 + 4n(n+1) vertices for n rings.
    let count = file.vertices.len();
    let rings = (((count as f64 - 1.0) / 4.0 + 0.25).sqrt() - 0.5).round() as usize;
    if rings == 0 || 1 + 4 * rings * (rings + 1) != count {
        return Err(LabError::Mesh(format!("{count} vertices do not form a ring mesh")));
    }
    let mesh = build_mesh_with_rings(group, rings)?;
    let same_vertices = mesh.vertices.iter().zip(&file.vertices).all(|(a, b)| (a - b).norm() <= 1e-10);
    let pairs: Vec<(usize, usize)> = mesh.pairings.iter().map(|p| (p.first, p.second)).collect();
    if !same_vertices || mesh.triangles != file.triangles || pairs != file.pairs {
        return Err(LabError::Mesh("mesh does not match the standard octagon layout".into()));
    }
    Ok((mesh, file))
}
