//! Piecewise-constant controls: one value per triangle.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{check_same_mesh, P1Function};
use crate::mesh::{build_uniform_mesh_with, Diagonal, Point, TriMesh};

#[derive(Debug, Clone, PartialEq)]
pub struct PwcControl {
    mesh: Arc<TriMesh>,
    values: Vec<f64>,
}

/// Constant bilateral bounds `ua <= u <= ub`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxBounds {
    ua: f64,
    ub: f64,
}

impl BoxBounds {
    pub fn new(ua: f64, ub: f64) -> Result<Self> {
        if !(ua.is_finite() && ub.is_finite()) || ua > ub {
            return Err(Error::invalid(format!(
                "bounds must be finite with ua <= ub, got [{ua}, {ub}]"
            )));
        }
        Ok(Self { ua, ub })
    }

    pub fn lower(&self) -> f64 {
        self.ua
    }

    pub fn upper(&self) -> f64 {
        self.ub
    }

    pub fn clamp(&self, v: f64) -> f64 {
        self.ub.min(self.ua.max(v))
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.ua..=self.ub).contains(&v)
    }
}

impl PwcControl {
    pub fn new(mesh: Arc<TriMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_triangles() {
            return Err(Error::LengthMismatch {
                expected: mesh.num_triangles(),
                found: values.len(),
            });
        }
        Ok(Self { mesh, values })
    }

    pub fn constant(mesh: Arc<TriMesh>, c: f64) -> Self {
        let n = mesh.num_triangles();
        Self {
            mesh,
            values: vec![c; n],
        }
    }

    /// Control with value `f(centroid)` on every triangle.
    pub fn from_fn(mesh: Arc<TriMesh>, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..mesh.num_triangles())
            .map(|t| f(mesh.centroid(t)))
            .collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn level(&self) -> u32 {
        self.mesh.level()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &PwcControl) -> Result<Self> {
        check_same_mesh(&self.mesh, &other.mesh)?;
        Ok(Self {
            mesh: self.mesh.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &PwcControl) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    pub fn is_within(&self, bounds: &BoxBounds) -> bool {
        self.values.iter().all(|v| bounds.contains(*v))
    }

    /// Plain-text form: `level=<L>`, then `diagonal=falling` for falling
    /// meshes, then one value per line in triangle order.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(24 * self.values.len() + 32);
        let _ = writeln!(out, "level={}", self.level());
        if self.mesh.diagonal() != Diagonal::Rising {
            let _ = writeln!(out, "diagonal={}", self.mesh.diagonal().name());
        }
        for v in &self.values {
            let _ = writeln!(out, "{v:?}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty control file".into()))?;
        let level: u32 = header
            .trim()
            .strip_prefix("level=")
            .and_then(|l| l.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad control header {header:?}")))?;
        let mut lines = lines.peekable();
        let diagonal = match lines
            .peek()
            .and_then(|l| l.trim().strip_prefix("diagonal="))
        {
            Some(d) => {
                let d = d.parse()?;
                lines.next();
                d
            }
            None => Diagonal::Rising,
        };
        let mesh = Arc::new(build_uniform_mesh_with(level, diagonal)?);
        let values = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{l:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mesh, values)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text)
    }
}

pub fn clip_to_box(u: &PwcControl, bounds: &BoxBounds) -> PwcControl {
    u.map(|v| bounds.clamp(v))
}

/// `(u, v)_U`, exact for piecewise constants.
pub fn l2_inner(u: &PwcControl, v: &PwcControl) -> Result<f64> {
    check_same_mesh(&u.mesh, &v.mesh)?;
    Ok(u.mesh.element_area()
        * u.values
            .iter()
            .zip(&v.values)
            .map(|(a, b)| a * b)
            .sum::<f64>())
}

pub fn l2_norm(u: &PwcControl) -> f64 {
    (u.mesh.element_area() * u.values.iter().map(|a| a * a).sum::<f64>()).sqrt()
}

/// Injects `u` into the finer mesh `fine` of the same family.
pub fn prolong(u: &PwcControl, fine: &Arc<TriMesh>) -> Result<PwcControl> {
    if u.mesh.diagonal() != fine.diagonal() {
        return Err(Error::invalid("meshes use different diagonals"));
    }
    if u.level() == fine.level() {
        return Ok(u.clone());
    }
    let values = (0..fine.num_triangles())
        .map(|t| fine.ancestor(t, u.level()).map(|p| u.values[p]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PwcControl {
        mesh: fine.clone(),
        values,
    })
}

/// `||prolong(u_coarse) - u_ref||_U` on the partition of `u_ref`.
pub fn l2_error(u_coarse: &PwcControl, u_ref: &PwcControl) -> Result<f64> {
    let lifted = prolong(u_coarse, u_ref.mesh())?;
    Ok(l2_norm(&lifted.sub(u_ref)?))
}

/// Element means of `f`: its `U`-orthogonal projection onto piecewise
/// constants.
pub fn pi0_project(f: &P1Function) -> PwcControl {
    let mesh = f.mesh().clone();
    let nodal = f.nodal_values();
    let values = mesh
        .triangles()
        .iter()
        .map(|tri| tri.iter().map(|k| nodal[*k]).sum::<f64>() / 3.0)
        .collect();
    PwcControl { mesh, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_mesh;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mesh(level: u32) -> Arc<TriMesh> {
        Arc::new(build_uniform_mesh(level).unwrap())
    }

    fn random(m: &Arc<TriMesh>, rng: &mut ChaCha8Rng, r: f64) -> PwcControl {
        PwcControl::new(
            m.clone(),
            (0..m.num_triangles())
                .map(|_| rng.gen_range(-r..r))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bounds_validation() {
        assert!(BoxBounds::new(1.0, 0.0).is_err());
        assert!(BoxBounds::new(f64::NAN, 0.0).is_err());
        assert!(BoxBounds::new(2.0, 2.0).is_ok());
    }

    #[test]
    fn clip_cases() {
        let b = BoxBounds::new(-7.0, 15.0).unwrap();
        let m = mesh(1);
        let inside =
            PwcControl::new(m.clone(), vec![-7.0, 0.0, 3.0, 15.0, 1.0, 2.0, -6.5, 14.9]).unwrap();
        assert_eq!(clip_to_box(&inside, &b), inside);
        let u = PwcControl::new(m.clone(), vec![20.0, -7.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let c = clip_to_box(&u, &b);
        assert_eq!(c.values()[0], 15.0);
        assert_eq!(c.values()[1], -7.0);
    }

    #[test]
    fn inner_product_cases() {
        for level in [0, 3, 5] {
            let m = mesh(level);
            let one = PwcControl::constant(m.clone(), 1.0);
            assert!((l2_inner(&one, &one).unwrap() - 1.0).abs() < 1e-13);
            let two = PwcControl::constant(m.clone(), 2.0);
            let three = PwcControl::constant(m.clone(), 3.0);
            assert!((l2_inner(&two, &three).unwrap() - 6.0).abs() < 1e-12);
            assert!((l2_norm(&PwcControl::constant(m.clone(), -4.0)) - 4.0).abs() < 1e-13);
            assert_eq!(l2_norm(&PwcControl::constant(m, 0.0)), 0.0);
        }
        let m = mesh(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (u, v) = (random(&m, &mut rng, 5.0), random(&m, &mut rng, 5.0));
        let mut oracle = 0.0;
        for t in 0..m.num_triangles() {
            oracle += m.signed_area(t) * u.values()[t] * v.values()[t];
        }
        assert!((l2_inner(&u, &v).unwrap() - oracle).abs() < 1e-14);
        assert!(l2_inner(&u, &PwcControl::constant(mesh(3), 1.0)).is_err());
    }

    #[test]
    fn prolong_cases() {
        let m = mesh(2);
        let c = PwcControl::constant(m.clone(), 1.5);
        assert_eq!(prolong(&c, &m).unwrap(), c);
        let fine = mesh(4);
        let p = prolong(&c, &fine).unwrap();
        assert!(p.values().iter().all(|v| *v == 1.5));
        assert!((l2_norm(&p) - l2_norm(&c)).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random(&m, &mut rng, 3.0);
        let p = prolong(&u, &fine).unwrap();
        assert!((l2_norm(&p) - l2_norm(&u)).abs() < 1e-14);
        assert!(prolong(&p, &m).is_err());
    }

    #[test]
    fn l2_error_cases() {
        let c = mesh(2);
        let f = mesh(3);
        let zero = PwcControl::constant(c.clone(), 0.0);
        let one = PwcControl::constant(f.clone(), 1.0);
        assert!((l2_error(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random(&c, &mut rng, 2.0);
        assert_eq!(l2_error(&u, &u).unwrap(), 0.0);
        let mut r = prolong(&u, &f).unwrap();
        assert_eq!(l2_error(&u, &r).unwrap(), 0.0);
        let delta = 0.37;
        r.values_mut()[17] += delta;
        let expected = delta * f.element_area().sqrt();
        assert!((l2_error(&u, &r).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn pi0_cases() {
        let m = mesh(3);
        let c = P1Function::interpolate(m.clone(), |_| -2.0);
        assert!(pi0_project(&c)
            .values()
            .iter()
            .all(|v| (*v + 2.0).abs() < 1e-15));
        let x = P1Function::interpolate(m.clone(), |p| p[0]);
        let px = pi0_project(&x);
        for t in 0..m.num_triangles() {
            assert!((px.values()[t] - m.centroid(t)[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn pi0_is_orthogonal_to_piecewise_constants() {
        let m = mesh(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = P1Function::new(
            m.clone(),
            (0..m.num_nodes())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        )
        .unwrap();
        let p = pi0_project(&f);
        for _ in 0..10 {
            let w = random(&m, &mut rng, 1.0);
            // (f - pi0 f, w)_U with the edge-midpoint rule, exact for P1 x P0.
            let mut residual = 0.0;
            for t in 0..m.num_triangles() {
                let v = m.vertices(t);
                let quad: f64 = (0..3)
                    .map(|a| {
                        let (q, r) = (v[a], v[(a + 1) % 3]);
                        f.evaluate([(q[0] + r[0]) / 2.0, (q[1] + r[1]) / 2.0])
                            .unwrap()
                    })
                    .sum::<f64>()
                    / 3.0;
                residual += m.element_area() * (quad - p.values()[t]) * w.values()[t];
            }
            assert!(residual.abs() <= 1e-13);
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let m = mesh(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random(&m, &mut rng, 10.0);
        assert_eq!(PwcControl::from_text(&u.to_text()).unwrap(), u);
        assert!(PwcControl::from_text("").is_err());
        assert!(PwcControl::from_text("lvl=2\n").is_err());
        assert!(PwcControl::from_text("level=1\n1.0\n").is_err());
        assert!(PwcControl::from_text("level=0\n1.0\nabc\n").is_err());
        assert!(PwcControl::from_text("level=0\ndiagonal=up\n1.0\n2.0\n").is_err());
    }

    #[test]
    fn falling_meshes_survive_text_round_trip() {
        let m = Arc::new(build_uniform_mesh_with(2, Diagonal::Falling).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = random(&m, &mut rng, 3.0);
        let text = u.to_text();
        assert!(text.starts_with("level=2\ndiagonal=falling\n"));
        let back = PwcControl::from_text(&text).unwrap();
        assert_eq!(back.mesh().diagonal(), Diagonal::Falling);
        assert_eq!(back, u);
        assert!(l2_inner(&u, &random(&mesh(2), &mut rng, 1.0)).is_err());
    }

    #[test]
    fn falling_prolongation_preserves_norm() {
        let c = Arc::new(build_uniform_mesh_with(2, Diagonal::Falling).unwrap());
        let f = Arc::new(build_uniform_mesh_with(4, Diagonal::Falling).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random(&c, &mut rng, 3.0);
        let p = prolong(&u, &f).unwrap();
        assert!((l2_norm(&p) - l2_norm(&u)).abs() < 1e-13);
        for t in 0..f.num_triangles() {
            assert_eq!(
                c.locate_point(f.centroid(t)).unwrap().element,
                f.ancestor(t, 2).unwrap()
            );
        }
        assert!(prolong(&u, &mesh(4)).is_err());
    }

    proptest! {
        #[test]
        fn clip_is_idempotent_and_nonexpansive(
            a in prop::collection::vec(-30.0f64..30.0, 8),
            b in prop::collection::vec(-30.0f64..30.0, 8),
        ) {
            let m = mesh(1);
            let bounds = BoxBounds::new(-7.0, 15.0).unwrap();
            let u = PwcControl::new(m.clone(), a).unwrap();
            let v = PwcControl::new(m, b).unwrap();
            let cu = clip_to_box(&u, &bounds);
            prop_assert_eq!(clip_to_box(&cu, &bounds), cu.clone());
            let cv = clip_to_box(&v, &bounds);
            prop_assert!(l2_norm(&cu.sub(&cv).unwrap()) <= l2_norm(&u.sub(&v).unwrap()) + 1e-12);
        }

        #[test]
        fn triangle_inequality(
            a in prop::collection::vec(-5.0f64..5.0, 32),
            b in prop::collection::vec(-5.0f64..5.0, 32),
        ) {
            let m = mesh(2);
            let u = PwcControl::new(m.clone(), a).unwrap();
            let v = PwcControl::new(m, b).unwrap();
            let s = u.add_scaled(1.0, &v).unwrap();
            prop_assert!(l2_norm(&s) <= l2_norm(&u) + l2_norm(&v) + 1e-12);
        }
    }
}
