//! Discretizations of the zero-trace field space: a weighted 1-D radial grid
//! for balls with radial data, and structured P1 triangulations for boxes and
//! disks.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::ball_volume;

/// Uniform radial grid on `[0, radius]` with shell-volume element weights
/// `ω₁(N) (r_{i+1}^N - r_i^N)`. Node `n_r` carries the Dirichlet mask; `r = 0`
/// is an ordinary interior node.
#[derive(Debug, Clone)]
pub struct RadialMesh {
    pub dim: usize,
    pub radius: f64,
    pub center: Vec<f64>,
    pub nodes: Vec<f64>,
    pub elem_weight: Vec<f64>,
    pub lumped_mass: Vec<f64>,
}

/// P1 triangle mesh with per-element constant gradients.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub points: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    pub tri_area: Vec<f64>,
    /// Gradient of the three hat functions on each triangle.
    pub tri_grads: Vec<[[f64; 2]; 3]>,
    pub tri_centroid: Vec<[f64; 2]>,
    pub lumped_mass: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum Mesh {
    Radial(RadialMesh),
    Tri(TriMesh),
}

impl Mesh {
    /// Radial mesh for an N-ball, `n_r` elements.
    pub fn radial(dim: usize, radius: f64, n_r: usize, center: Vec<f64>) -> Result<Arc<Mesh>> {
        if n_r < 2 {
            return Err(Error::Validation(format!("mesh.resolution: need >= 2, got {n_r}")));
        }
        if !(radius > 0.0) || dim < 2 || center.len() != dim {
            return Err(Error::Validation("mesh.radial: bad radius/dimension".into()));
        }
        let h = radius / n_r as f64;
        let nodes: Vec<f64> = (0..=n_r).map(|i| i as f64 * h).collect();
        let unit = ball_volume(dim, 1.0);
        let pw = |r: f64| unit * r.powi(dim as i32);
        let elem_weight: Vec<f64> =
            (0..n_r).map(|i| pw(nodes[i + 1]) - pw(nodes[i])).collect();
        let lumped_mass: Vec<f64> = (0..=n_r)
            .map(|i| {
                let lo = (nodes[i] - 0.5 * h).max(0.0);
                let hi = (nodes[i] + 0.5 * h).min(radius);
                pw(hi) - pw(lo)
            })
            .collect();
        debug_assert!(elem_weight.iter().all(|w| *w > 0.0));
        Ok(Arc::new(Mesh::Radial(RadialMesh { dim, radius, center, nodes, elem_weight, lumped_mass })))
    }

    /// Structured polar triangulation of a disk: `rings` concentric rings with
    /// a fixed angular resolution close to the radial spacing, boundary
    /// exactly on the circle.
    pub fn disk(rings: usize, radius: f64, center: [f64; 2]) -> Result<Arc<Mesh>> {
        if rings < 2 {
            return Err(Error::Validation(format!("mesh.resolution: need >= 2 rings, got {rings}")));
        }
        if !(radius > 0.0) {
            return Err(Error::Validation("mesh.disk: radius must be positive".into()));
        }
        let n_theta = (((2.0 * std::f64::consts::PI * rings as f64) / 4.0).ceil() as usize * 4).max(8);
        let h = radius / rings as f64;
        let mut points = vec![[center[0], center[1]]];
        for k in 1..=rings {
            let r = k as f64 * h;
            for j in 0..n_theta {
                let th = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
                points.push([center[0] + r * th.cos(), center[1] + r * th.sin()]);
            }
        }
        let idx = |k: usize, j: usize| -> usize { 1 + (k - 1) * n_theta + (j % n_theta) };
        let mut triangles = Vec::new();
        for j in 0..n_theta {
            triangles.push([0, idx(1, j), idx(1, j + 1)]);
        }
        for k in 1..rings {
            for j in 0..n_theta {
                let a = idx(k, j);
                let b = idx(k + 1, j);
                let c = idx(k + 1, j + 1);
                let d = idx(k, j + 1);
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        let mut boundary = vec![false; points.len()];
        for j in 0..n_theta {
            boundary[idx(rings, j)] = true;
        }
        Ok(Arc::new(Mesh::Tri(TriMesh::build(points, triangles, boundary)?)))
    }

    /// Uniform criss-cross triangulation of `[0, a] x [0, b]`.
    pub fn box2d(nx: usize, ny: usize, sides: [f64; 2]) -> Result<Arc<Mesh>> {
        if nx < 2 || ny < 2 {
            return Err(Error::Validation(format!("mesh.resolution: need >= 2 cells, got {nx}x{ny}")));
        }
        if !(sides[0] > 0.0 && sides[1] > 0.0) {
            return Err(Error::Validation("mesh.box2d: sides must be positive".into()));
        }
        let (a, b) = (sides[0], sides[1]);
        let mut points = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                points.push([a * i as f64 / nx as f64, b * j as f64 / ny as f64]);
            }
        }
        let idx = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v00 = idx(i, j);
                let v10 = idx(i + 1, j);
                let v01 = idx(i, j + 1);
                let v11 = idx(i + 1, j + 1);
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        let mut boundary = vec![false; points.len()];
        for j in 0..=ny {
            for i in 0..=nx {
                if i == 0 || i == nx || j == 0 || j == ny {
                    boundary[idx(i, j)] = true;
                }
            }
        }
        Ok(Arc::new(Mesh::Tri(TriMesh::build(points, triangles, boundary)?)))
    }

    pub fn n_nodes(&self) -> usize {
        match self {
            Mesh::Radial(m) => m.nodes.len(),
            Mesh::Tri(m) => m.points.len(),
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        match self {
            Mesh::Radial(m) => i == m.nodes.len() - 1,
            Mesh::Tri(m) => m.boundary[i],
        }
    }

    pub fn lumped_mass(&self) -> &[f64] {
        match self {
            Mesh::Radial(m) => &m.lumped_mass,
            Mesh::Tri(m) => &m.lumped_mass,
        }
    }

    /// Point in the ambient space (radial nodes are placed on the first axis
    /// through the center, which is exact for radial data).
    pub fn ambient_point(&self, i: usize) -> Vec<f64> {
        match self {
            Mesh::Radial(m) => {
                let mut x = m.center.clone();
                x[0] += m.nodes[i];
                x
            }
            Mesh::Tri(m) => m.points[i].to_vec(),
        }
    }

    /// Coordinates written to CSV exports: `r` for radial meshes, `x, y` for
    /// planar ones.
    pub fn export_coords(&self, i: usize) -> Vec<f64> {
        match self {
            Mesh::Radial(m) => vec![m.nodes[i]],
            Mesh::Tri(m) => m.points[i].to_vec(),
        }
    }

    pub fn coord_names(&self) -> &'static [&'static str] {
        match self {
            Mesh::Radial(_) => &["r"],
            Mesh::Tri(_) => &["x", "y"],
        }
    }

    /// Mesh quadrature of `∫ |∇u_h|^p` for a nodal field.
    pub fn grad_p_energy(&self, values: &[f64], p: f64) -> f64 {
        match self {
            Mesh::Radial(m) => {
                let mut total = 0.0;
                for e in 0..m.nodes.len() - 1 {
                    let h = m.nodes[e + 1] - m.nodes[e];
                    let g = (values[e + 1] - values[e]) / h;
                    total += m.elem_weight[e] * g.abs().powf(p);
                }
                total
            }
            Mesh::Tri(m) => {
                let mut total = 0.0;
                for (t, tri) in m.triangles.iter().enumerate() {
                    let mut gx = 0.0;
                    let mut gy = 0.0;
                    for (v, &node) in tri.iter().enumerate() {
                        gx += values[node] * m.tri_grads[t][v][0];
                        gy += values[node] * m.tri_grads[t][v][1];
                    }
                    total += m.tri_area[t] * (gx * gx + gy * gy).powf(0.5 * p);
                }
                total
            }
        }
    }
}

impl TriMesh {
    fn build(
        points: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<TriMesh> {
        let mut tri_area = Vec::with_capacity(triangles.len());
        let mut tri_grads = Vec::with_capacity(triangles.len());
        let mut tri_centroid = Vec::with_capacity(triangles.len());
        let mut lumped_mass = vec![0.0; points.len()];
        let mut fixed = triangles;
        for tri in fixed.iter_mut() {
            let [i0, i1, i2] = *tri;
            let (p0, p1, p2) = (points[i0], points[i1], points[i2]);
            let two_a = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            if two_a < 0.0 {
                tri.swap(1, 2);
            }
        }
        for tri in &fixed {
            let (p0, p1, p2) = (points[tri[0]], points[tri[1]], points[tri[2]]);
            let two_a = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            if !(two_a > 1e-300) {
                return Err(Error::Validation(format!(
                    "degenerate triangle {tri:?} (doubled area {two_a:.3e})"
                )));
            }
            let area = 0.5 * two_a;
            tri_area.push(area);
            // ∇φ_i = (y_j - y_k, x_k - x_j) / (2A), (i, j, k) cyclic
            let grads = [
                [(p1[1] - p2[1]) / two_a, (p2[0] - p1[0]) / two_a],
                [(p2[1] - p0[1]) / two_a, (p0[0] - p2[0]) / two_a],
                [(p0[1] - p1[1]) / two_a, (p1[0] - p0[0]) / two_a],
            ];
            tri_grads.push(grads);
            tri_centroid.push([
                (p0[0] + p1[0] + p2[0]) / 3.0,
                (p0[1] + p1[1] + p2[1]) / 3.0,
            ]);
            for &v in tri {
                lumped_mass[v] += area / 3.0;
            }
        }
        Ok(TriMesh {
            points,
            triangles: fixed,
            boundary,
            tri_area,
            tri_grads,
            tri_centroid,
            lumped_mass,
        })
    }
}

/// Nodal field over a mesh; boundary values are identically zero.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub values: Vec<f64>,
    mesh: Arc<Mesh>,
}

impl DiscreteField {
    pub fn zeros(mesh: &Arc<Mesh>) -> DiscreteField {
        DiscreteField { values: vec![0.0; mesh.n_nodes()], mesh: mesh.clone() }
    }

    /// Interpolate an ambient-space function; boundary nodes forced to zero.
    pub fn from_fn(mesh: &Arc<Mesh>, f: impl Fn(&[f64]) -> f64) -> DiscreteField {
        let mut values = Vec::with_capacity(mesh.n_nodes());
        for i in 0..mesh.n_nodes() {
            values.push(if mesh.is_boundary(i) { 0.0 } else { f(&mesh.ambient_point(i)) });
        }
        DiscreteField { values, mesh: mesh.clone() }
    }

    pub fn from_values(mesh: &Arc<Mesh>, mut values: Vec<f64>) -> Result<DiscreteField> {
        if values.len() != mesh.n_nodes() {
            return Err(Error::Validation(format!(
                "field has {} values for {} nodes",
                values.len(),
                mesh.n_nodes()
            )));
        }
        for i in 0..values.len() {
            if mesh.is_boundary(i) {
                values[i] = 0.0;
            }
        }
        Ok(DiscreteField { values, mesh: mesh.clone() })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn enforce_boundary(&mut self) {
        for i in 0..self.values.len() {
            if self.mesh.is_boundary(i) {
                self.values[i] = 0.0;
            }
        }
    }

    /// Mass-weighted L² norm (a true domain L² norm for lumped quadrature).
    pub fn l2(&self) -> f64 {
        let mass = self.mesh.lumped_mass();
        self.values
            .iter()
            .zip(mass)
            .map(|(v, m)| m * v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// ‖u - v‖ / max(‖u‖, ‖v‖) in the mass-weighted L² norm; 0 when both are
    /// (numerically) zero.
    pub fn rel_l2_distance(&self, other: &DiscreteField) -> f64 {
        assert!(Arc::ptr_eq(&self.mesh, other.mesh()) || self.values.len() == other.values.len());
        let mass = self.mesh.lumped_mass();
        let mut d2 = 0.0;
        let mut a2 = 0.0;
        let mut b2 = 0.0;
        for ((u, v), m) in self.values.iter().zip(&other.values).zip(mass) {
            d2 += m * (u - v) * (u - v);
            a2 += m * u * u;
            b2 += m * v * v;
        }
        let scale = a2.max(b2).sqrt();
        if scale < 1e-14 {
            0.0
        } else {
            d2.sqrt() / scale
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn radial_mesh_weights_sum_to_ball_volume() {
        for &(dim, radius, n) in &[(2usize, 1.0f64, 17usize), (3, 2.0, 9), (5, 1.0, 33)] {
            let mesh = Mesh::radial(dim, radius, n, vec![0.0; dim]).unwrap();
            if let Mesh::Radial(m) = &*mesh {
                let total: f64 = m.elem_weight.iter().sum();
                assert_relative_eq!(total, ball_volume(dim, radius), max_relative = 1e-12);
                let mass: f64 = m.lumped_mass.iter().sum();
                assert_relative_eq!(mass, ball_volume(dim, radius), max_relative = 1e-12);
            } else {
                unreachable!()
            }
        }
    }

    #[test]
    fn disk_mesh_positive_areas_and_boundary_on_circle() {
        let mesh = Mesh::disk(8, 1.0, [0.0, 0.0]).unwrap();
        if let Mesh::Tri(m) = &*mesh {
            assert!(m.tri_area.iter().all(|a| *a > 0.0));
            let total: f64 = m.tri_area.iter().sum();
            // inscribed polygon area is slightly below pi
            assert!(total < PI && total > 0.99 * PI, "area {total}");
            for (i, p) in m.points.iter().enumerate() {
                if m.boundary[i] {
                    assert_relative_eq!((p[0] * p[0] + p[1] * p[1]).sqrt(), 1.0, max_relative = 1e-12);
                }
            }
            assert!(m.boundary.iter().filter(|b| **b).count() > 8);
        } else {
            unreachable!()
        }
    }

    #[test]
    fn box_mesh_area_and_boundary() {
        let mesh = Mesh::box2d(4, 3, [2.0, 1.5]).unwrap();
        if let Mesh::Tri(m) = &*mesh {
            let total: f64 = m.tri_area.iter().sum();
            assert_relative_eq!(total, 3.0, max_relative = 1e-12);
            assert_eq!(m.points.len(), 20);
            assert_eq!(m.boundary.iter().filter(|b| **b).count(), 14);
        } else {
            unreachable!()
        }
    }

    #[test]
    fn field_boundary_always_zero() {
        let mesh = Mesh::disk(6, 1.0, [0.0, 0.0]).unwrap();
        let f = DiscreteField::from_fn(&mesh, |_| 3.0);
        for i in 0..mesh.n_nodes() {
            if mesh.is_boundary(i) {
                assert_eq!(f.values[i], 0.0);
            } else {
                assert_eq!(f.values[i], 3.0);
            }
        }
    }

    #[test]
    fn grad_energy_of_linear_field_on_box() {
        // u = x on [0,1]^2 has |∇u| = 1 everywhere (ignoring the boundary
        // clamp, so use raw values instead of from_fn).
        let mesh = Mesh::box2d(5, 5, [1.0, 1.0]).unwrap();
        let mut vals = vec![0.0; mesh.n_nodes()];
        for i in 0..mesh.n_nodes() {
            vals[i] = mesh.ambient_point(i)[0];
        }
        assert_relative_eq!(mesh.grad_p_energy(&vals, 2.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(mesh.grad_p_energy(&vals, 4.0), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn rel_distance_basics() {
        let mesh = Mesh::radial(2, 1.0, 16, vec![0.0, 0.0]).unwrap();
        let a = DiscreteField::from_fn(&mesh, |x| 1.0 - x[0]);
        let b = DiscreteField::from_fn(&mesh, |x| 2.0 * (1.0 - x[0]));
        let z = DiscreteField::zeros(&mesh);
        assert_eq!(z.rel_l2_distance(&z), 0.0);
        assert_relative_eq!(a.rel_l2_distance(&b), 0.5, max_relative = 1e-12);
    }
}
