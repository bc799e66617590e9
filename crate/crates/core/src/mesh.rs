//! Structured surface meshes and OBJ export.

use std::io::{self, Write};

use crate::fmt::format_g;
use crate::quadrature::neumaier_sum;

/// Vertices `X(x_i, y_j)` on an `nx × ny` parameter grid, stored row-major
/// (`index = i * ny + j`), with per-vertex conformal factor `u`, mean
/// curvature `H` and Gaussian curvature `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub nx: usize,
    pub ny: usize,
    /// Parameter steps of the grid.
    pub hx: f64,
    pub hy: f64,
    pub vertices: Vec<[f64; 3]>,
    pub u: Vec<f64>,
    pub mean_curvature: Vec<f64>,
    pub gaussian_curvature: Vec<f64>,
}

impl SurfaceMesh {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn vertex(&self, i: usize, j: usize) -> [f64; 3] {
        self.vertices[self.index(i, j)]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `Σ H² dμ` with `dμ = 4u² dx dy`, summed over the periodic grid.
    pub fn willmore_energy(&self) -> f64 {
        let cell = self.hx * self.hy;
        neumaier_sum(
            self.mean_curvature
                .iter()
                .zip(&self.u)
                .map(|(h, u)| h * h * 4.0 * u * u * cell),
        )
    }

    /// Writes `v x y z` lines followed by seam-wrapped quads `f a b c d`
    /// (1-based), coordinates with 9 significant digits.
    pub fn write_obj<W: Write>(&self, out: W) -> io::Result<()> {
        write_grid_obj(out, self.nx, self.ny, &self.vertices, true)
    }
}

/// OBJ for a row-major `nx × ny` vertex grid. With `wrap`, quads close the
/// seams in both directions (a torus); otherwise only interior cells are
/// emitted.
pub fn write_grid_obj<W: Write>(
    mut out: W,
    nx: usize,
    ny: usize,
    vertices: &[[f64; 3]],
    wrap: bool,
) -> io::Result<()> {
    for v in vertices {
        writeln!(
            out,
            "v {} {} {}",
            format_g(v[0], 9),
            format_g(v[1], 9),
            format_g(v[2], 9)
        )?;
    }
    let (cx, cy) = if wrap {
        (nx, ny)
    } else {
        (nx.saturating_sub(1), ny.saturating_sub(1))
    };
    let idx = |i: usize, j: usize| i * ny + j + 1;
    for i in 0..cx {
        let ip = (i + 1) % nx;
        for j in 0..cy {
            let jp = (j + 1) % ny;
            writeln!(
                out,
                "f {} {} {} {}",
                idx(i, j),
                idx(ip, j),
                idx(ip, jp),
                idx(i, jp)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_layout() {
        let mesh = SurfaceMesh {
            nx: 2,
            ny: 3,
            hx: 1.0,
            hy: 1.0,
            vertices: (0..6).map(|i| [i as f64, 0.5, -1.25]).collect(),
            u: vec![1.0; 6],
            mean_curvature: vec![0.0; 6],
            gaussian_curvature: vec![0.0; 6],
        };
        let mut buf = Vec::new();
        mesh.write_obj(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.iter().filter(|l| l.starts_with("v ")).count(), 6);
        assert_eq!(lines.iter().filter(|l| l.starts_with("f ")).count(), 6);
        assert_eq!(lines[0], "v 0 0.5 -1.25");
        assert_eq!(lines[6], "f 1 4 5 2");
        // last quad wraps in both directions
        assert_eq!(lines[11], "f 6 3 1 4");

        let mut buf = Vec::new();
        write_grid_obj(&mut buf, 2, 3, &mesh.vertices, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(faces, ["f 1 4 5 2", "f 2 5 6 3"]);
    }
}
