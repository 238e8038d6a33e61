//! Uniform, nested triangulations of the unit square.
//!
//! A mesh at level `L` has `n = 2^L` cells per side. Every grid cell
//! `[ih,(i+1)h] x [jh,(j+1)h]` is split by one of its diagonals into a
//! *lower* triangle (index `2c`) and an *upper* triangle (index `2c + 1`),
//! where `c = j n + i` is the row-major cell index. All cells of a mesh use
//! the same diagonal, see [`Diagonal`]. Node `(i, j)` sits at `(i/n, j/n)`
//! and has index `j (n + 1) + i`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported refinement level; keeps every node and triangle index
/// below `2^32`.
pub const MAX_LEVEL: u32 = 15;

pub type Point = [f64; 2];

/// Which diagonal splits the grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Diagonal {
    /// From `(ih, jh)` to `((i+1)h, (j+1)h)`. Lower triangle
    /// `[(i,j), (i+1,j), (i+1,j+1)]`, upper `[(i,j), (i+1,j+1), (i,j+1)]`.
    #[default]
    Rising,
    /// From `((i+1)h, jh)` to `(ih, (j+1)h)`. Lower triangle
    /// `[(i,j), (i+1,j), (i,j+1)]`, upper `[(i+1,j), (i+1,j+1), (i,j+1)]`.
    Falling,
}

impl Diagonal {
    pub fn name(&self) -> &'static str {
        match self {
            Diagonal::Rising => "rising",
            Diagonal::Falling => "falling",
        }
    }
}

impl FromStr for Diagonal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rising" => Ok(Diagonal::Rising),
            "falling" => Ok(Diagonal::Falling),
            other => Err(Error::Parse(format!(
                "unknown diagonal {other:?} (expected rising or falling)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    level: u32,
    diagonal: Diagonal,
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    interior_mask: Vec<bool>,
    element_area: f64,
}

/// Containing triangle and barycentric weights of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointLocation {
    pub element: usize,
    pub bary: [f64; 3],
}

/// Builds the level-`level` mesh of `[0,1]^2` with rising diagonals.
pub fn build_uniform_mesh(level: u32) -> Result<TriMesh> {
    build_uniform_mesh_with(level, Diagonal::Rising)
}

pub fn build_uniform_mesh_with(level: u32, diagonal: Diagonal) -> Result<TriMesh> {
    if level > MAX_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            max: MAX_LEVEL,
        });
    }
    let n = 1usize << level;
    let scale = n as f64;
    let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
    let mut interior_mask = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            nodes.push([i as f64 / scale, j as f64 / scale]);
            interior_mask.push(i > 0 && i < n && j > 0 && j < n);
        }
    }
    let node = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            match diagonal {
                Diagonal::Rising => {
                    triangles.push([node(i, j), node(i + 1, j), node(i + 1, j + 1)]);
                    triangles.push([node(i, j), node(i + 1, j + 1), node(i, j + 1)]);
                }
                Diagonal::Falling => {
                    triangles.push([node(i, j), node(i + 1, j), node(i, j + 1)]);
                    triangles.push([node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)]);
                }
            }
        }
    }
    let h = 1.0 / scale;
    Ok(TriMesh {
        level,
        diagonal,
        nodes,
        triangles,
        interior_mask,
        element_area: 0.5 * h * h,
    })
}

impl TriMesh {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn diagonal(&self) -> Diagonal {
        self.diagonal
    }

    /// Cells per side.
    pub fn cells_per_side(&self) -> usize {
        1 << self.level
    }

    /// Mesh size `h = 2^-L` (length of a cell side).
    pub fn h(&self) -> f64 {
        1.0 / self.cells_per_side() as f64
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior_mask
    }

    pub fn element_area(&self) -> f64 {
        self.element_area
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_interior_nodes(&self) -> usize {
        let m = self.cells_per_side() - 1;
        m * m
    }

    pub fn vertices(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.vertices(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Signed area of triangle `t` from its vertex coordinates.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Finds the lowest-index triangle containing `p` together with the
    /// barycentric coordinates of `p` in it.
    pub fn locate_point(&self, p: Point) -> Result<PointLocation> {
        let [x, y] = p;
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::PointOutsideDomain { point: p });
        }
        let n = self.cells_per_side();
        // Scaling by a power of two is exact, so the local coordinates below
        // are exact for grid-aligned queries.
        let sx = x * n as f64;
        let sy = y * n as f64;
        let candidates = |s: f64| {
            let f = (s.floor() as usize).min(n - 1);
            let lo = if s == f as f64 && f > 0 { f - 1 } else { f };
            lo..=f
        };
        for j in candidates(sy) {
            for i in candidates(sx) {
                let xi = sx - i as f64;
                let eta = sy - j as f64;
                if !(0.0..=1.0).contains(&xi) || !(0.0..=1.0).contains(&eta) {
                    continue;
                }
                let cell = j * n + i;
                let (lower, bary) = match self.diagonal {
                    Diagonal::Rising if xi >= eta => (true, [1.0 - xi, xi - eta, eta]),
                    Diagonal::Rising => (false, [1.0 - eta, xi, eta - xi]),
                    Diagonal::Falling if xi + eta <= 1.0 => (true, [1.0 - xi - eta, xi, eta]),
                    Diagonal::Falling => (false, [1.0 - eta, xi + eta - 1.0, 1.0 - xi]),
                };
                return Ok(PointLocation {
                    element: 2 * cell + usize::from(!lower),
                    bary,
                });
            }
        }
        unreachable!("every point of the closed unit square lies in some cell")
    }

    /// Index of the level-`coarse_level` triangle that contains fine
    /// triangle `t` of this mesh.
    pub fn ancestor(&self, t: usize, coarse_level: u32) -> Result<usize> {
        if coarse_level > self.level {
            return Err(Error::LevelOrder {
                coarse: coarse_level,
                fine: self.level,
            });
        }
        let n = self.cells_per_side();
        let shift = self.level - coarse_level;
        let r = 1usize << shift;
        let cell = t / 2;
        let (fi, fj) = (cell % n, cell / n);
        let (ci, cj) = (fi >> shift, fj >> shift);
        let (a, b) = (fi % r, fj % r);
        let fine_lower = t.is_multiple_of(2);
        let lower = match self.diagonal {
            Diagonal::Rising => a > b || (a == b && fine_lower),
            Diagonal::Falling => a + b < r - 1 || (a + b == r - 1 && fine_lower),
        };
        let coarse_cell = cj * (n >> shift) + ci;
        Ok(2 * coarse_cell + usize::from(!lower))
    }

    /// Writes the mesh as a plain-text listing: a header line, one
    /// `node <index> <x> <y> <interior>` line per node and one
    /// `tri <index> <a> <b> <c>` line per triangle.
    pub fn to_listing(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# level={} diagonal={} nodes={} triangles={}",
            self.level,
            self.diagonal.name(),
            self.num_nodes(),
            self.num_triangles()
        );
        for (k, (p, inner)) in self.nodes.iter().zip(&self.interior_mask).enumerate() {
            let _ = writeln!(out, "node {k} {} {} {}", p[0], p[1], u8::from(*inner));
        }
        for (k, [a, b, c]) in self.triangles.iter().enumerate() {
            let _ = writeln!(out, "tri {k} {a} {b} {c}");
        }
        out
    }

    pub fn write_listing(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_listing()).map_err(|source: io::Error| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Maps every coarse triangle to the fine triangles it is the union of.
pub fn nested_element_map(coarse: &TriMesh, fine: &TriMesh) -> Result<Vec<Vec<usize>>> {
    if coarse.level > fine.level {
        return Err(Error::LevelOrder {
            coarse: coarse.level,
            fine: fine.level,
        });
    }
    if coarse.diagonal != fine.diagonal {
        return Err(Error::invalid("meshes use different diagonals"));
    }
    let mut map =
        vec![Vec::with_capacity(1 << (2 * (fine.level - coarse.level))); coarse.num_triangles()];
    for t in 0..fine.num_triangles() {
        map[fine.ancestor(t, coarse.level)?].push(t);
    }
    Ok(map)
}
