//! P1 finite elements with homogeneous Dirichlet conditions.

use std::sync::Arc;

use crate::control::PwcControl;
use crate::error::{Error, Result};
use crate::linalg::{norm2, pcg, BandedCholesky, CsrMatrix};
use crate::mesh::{Point, TriMesh};

/// Default relative tolerance of the linear solves.
pub const LINEAR_TOL: f64 = 1e-12;

/// Continuous piecewise-linear function given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Function {
    mesh: Arc<TriMesh>,
    values: Vec<f64>,
}

impl P1Function {
    pub fn new(mesh: Arc<TriMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_nodes() {
            return Err(Error::LengthMismatch {
                expected: mesh.num_nodes(),
                found: values.len(),
            });
        }
        Ok(Self { mesh, values })
    }

    pub fn zero(mesh: Arc<TriMesh>) -> Self {
        let n = mesh.num_nodes();
        Self {
            mesh,
            values: vec![0.0; n],
        }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<TriMesh>, f: impl Fn(Point) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|p| f(*p)).collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn nodal_values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_nodal_values(self) -> Vec<f64> {
        self.values
    }

    /// True when every boundary node carries exactly zero.
    pub fn vanishes_on_boundary(&self) -> bool {
        self.values
            .iter()
            .zip(self.mesh.interior_mask())
            .all(|(v, inner)| *inner || *v == 0.0)
    }

    /// Value at `p`, interpolated on the containing triangle.
    pub fn evaluate(&self, p: Point) -> Result<f64> {
        let loc = self.mesh.locate_point(p)?;
        let tri = self.mesh.triangles()[loc.element];
        Ok(loc
            .bary
            .iter()
            .zip(tri)
            .map(|(b, k)| b * self.values[k])
            .sum())
    }

    /// Mean of `self` over triangle `t`.
    pub fn element_mean(&self, t: usize) -> Result<f64> {
        let tri = self.mesh.triangles().get(t).ok_or(Error::IndexOutOfRange {
            index: t,
            len: self.mesh.num_triangles(),
        })?;
        Ok(tri.iter().map(|k| self.values[*k]).sum::<f64>() / 3.0)
    }

    /// `sum_k c_k f_k` over functions on a shared mesh.
    pub fn linear_combination(terms: &[(f64, &P1Function)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::invalid("empty combination"))?;
        let mut values = vec![0.0; first.values.len()];
        for (c, f) in terms {
            check_same_mesh(&first.mesh, &f.mesh)?;
            for (v, w) in values.iter_mut().zip(&f.values) {
                *v += c * w;
            }
        }
        Ok(Self {
            mesh: first.mesh.clone(),
            values,
        })
    }
}

pub(crate) fn check_same_mesh(expected: &TriMesh, found: &TriMesh) -> Result<()> {
    if expected.level() != found.level() {
        return Err(Error::MeshMismatch {
            expected: expected.level(),
            found: found.level(),
        });
    }
    if expected.diagonal() != found.diagonal() {
        return Err(Error::invalid("meshes use different diagonals"));
    }
    Ok(())
}

/// Interior unknown of node `k`, in row-major order of the interior grid.
pub fn interior_index(mesh: &TriMesh, k: usize) -> Option<usize> {
    let n = mesh.cells_per_side();
    let (i, j) = (k % (n + 1), k / (n + 1));
    mesh.interior_mask()[k].then(|| (j - 1) * (n - 1) + (i - 1))
}

/// Node carrying interior unknown `u`.
pub fn node_of_unknown(mesh: &TriMesh, u: usize) -> usize {
    let n = mesh.cells_per_side();
    let (i, j) = (u % (n - 1) + 1, u / (n - 1) + 1);
    j * (n + 1) + i
}

/// Gradients of the three barycentric basis functions on a triangle.
fn basis_gradients(v: &[Point; 3]) -> ([[f64; 2]; 3], f64) {
    let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let mut g = [[0.0; 2]; 3];
    for a in 0..3 {
        let b = v[(a + 1) % 3];
        let c = v[(a + 2) % 3];
        g[a] = [(b[1] - c[1]) / det, (c[0] - b[0]) / det];
    }
    (g, 0.5 * det)
}

/// Element stiffness matrix `int_T grad phi_a . grad phi_b`.
pub fn element_stiffness(v: &[Point; 3]) -> [[f64; 3]; 3] {
    let (g, area) = basis_gradients(v);
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let e = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
            k[a][b] = e;
            k[b][a] = e;
        }
    }
    k
}

/// Stiffness operator on the interior unknowns, optionally with a direct
/// factorization attached.
#[derive(Debug, Clone)]
pub struct StiffnessSystem {
    mesh: Arc<TriMesh>,
    matrix: CsrMatrix,
    factor: Option<Arc<BandedCholesky>>,
}

pub fn assemble_stiffness(mesh: Arc<TriMesh>) -> StiffnessSystem {
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangles()[t];
        let k = element_stiffness(&mesh.vertices(t));
        for a in 0..3 {
            let Some(r) = interior_index(&mesh, tri[a]) else {
                continue;
            };
            for b in 0..3 {
                if let Some(c) = interior_index(&mesh, tri[b]) {
                    triplets.push((r, c, k[a][b]));
                }
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(mesh.num_interior_nodes(), triplets);
    StiffnessSystem {
        mesh,
        matrix,
        factor: None,
    }
}

impl StiffnessSystem {
    /// Attaches a banded Cholesky factor; later solves use it and fall back
    /// to CG refinement only if the residual check fails.
    pub fn factorize(mut self) -> Result<Self> {
        if self.matrix.dim() > 0 {
            self.factor = Some(Arc::new(BandedCholesky::factor(&self.matrix)?));
        }
        Ok(self)
    }

    pub fn is_factorized(&self) -> bool {
        self.factor.is_some()
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn num_unknowns(&self) -> usize {
        self.matrix.dim()
    }

    /// Solves `A x = rhs` so that `||A x - rhs|| <= tol * max(1, ||rhs||)`
    /// and lifts `x` to a P1 function vanishing on the boundary.
    pub fn solve(&self, rhs: &[f64], tol: f64) -> Result<P1Function> {
        let n = self.num_unknowns();
        if rhs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: rhs.len(),
            });
        }
        if !(tol > 0.0) {
            return Err(Error::invalid("solver tolerance must be positive"));
        }
        let mut x = match &self.factor {
            Some(f) => f.solve(rhs),
            None => vec![0.0; n],
        };
        if n > 0 {
            pcg(&self.matrix, rhs, &mut x, tol, 10 * n)?;
        }
        Ok(self.lift(&x))
    }

    /// P1 function with interior values `x` and zero boundary values.
    pub fn lift(&self, x: &[f64]) -> P1Function {
        let mut values = vec![0.0; self.mesh.num_nodes()];
        for (u, xu) in x.iter().enumerate() {
            values[node_of_unknown(&self.mesh, u)] = *xu;
        }
        P1Function {
            mesh: self.mesh.clone(),
            values,
        }
    }

    /// Interior part of the nodal values of `f`.
    pub fn restrict(&self, f: &P1Function) -> Vec<f64> {
        (0..self.num_unknowns())
            .map(|u| f.values[node_of_unknown(&self.mesh, u)])
            .collect()
    }

    /// `A x` for the interior values of `f`.
    pub fn apply(&self, f: &P1Function) -> Vec<f64> {
        self.matrix.mul(&self.restrict(f))
    }
}

/// Free-function form of [`StiffnessSystem::solve`].
pub fn solve_spd(system: &StiffnessSystem, rhs: &[f64], tol: f64) -> Result<P1Function> {
    system.solve(rhs, tol)
}

/// Load vector `(u, phi_i)` for a piecewise-constant `u`.
pub fn assemble_load_pwc(mesh: &TriMesh, u: &PwcControl) -> Result<Vec<f64>> {
    check_same_mesh(mesh, u.mesh())?;
    let mut rhs = vec![0.0; mesh.num_interior_nodes()];
    let w = mesh.element_area() / 3.0;
    for (tri, ut) in mesh.triangles().iter().zip(u.values()) {
        for k in tri {
            if let Some(r) = interior_index(mesh, *k) {
                rhs[r] += ut * w;
            }
        }
    }
    Ok(rhs)
}

/// Load vector `sum_j c_j phi_i(x_j)` for interior point sources.
pub fn assemble_point_load(mesh: &TriMesh, points: &[Point], coeffs: &[f64]) -> Result<Vec<f64>> {
    if points.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            found: coeffs.len(),
        });
    }
    let mut rhs = vec![0.0; mesh.num_interior_nodes()];
    for (p, c) in points.iter().zip(coeffs) {
        if !is_strictly_interior(*p) {
            return Err(Error::PointOnBoundary { point: *p });
        }
        let loc = mesh.locate_point(*p)?;
        let tri = mesh.triangles()[loc.element];
        for (b, k) in loc.bary.iter().zip(tri) {
            if let Some(r) = interior_index(mesh, k) {
                rhs[r] += c * b;
            }
        }
    }
    Ok(rhs)
}

pub(crate) fn is_strictly_interior(p: Point) -> bool {
    p.iter().all(|c| *c > 0.0 && *c < 1.0)
}

/// Euclidean norm of an interior vector.
pub fn vector_norm(v: &[f64]) -> f64 {
    norm2(v)
}
