use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::control::PwcControl;
use crate::error::{Error, Result};
use crate::mesh::Diagonal;
use crate::objective::ProblemData;
use crate::scalarize::{BBConfig, Scalarization};

/// Stable 64-bit FNV-1a digest of everything that determines a reference
/// solution besides its parameter and level.
pub fn problem_key(problem: &ProblemData, bb: &BBConfig, eps: f64, diagonal: Diagonal) -> String {
    let mut text = String::new();
    for k in 0..2 {
        for o in problem.observations(k) {
            let _ = write!(
                text,
                "o{k}:{:x},{:x},{:x};",
                o.point[0].to_bits(),
                o.point[1].to_bits(),
                o.target.to_bits()
            );
        }
    }
    let [l1, l2] = problem.lambda();
    let b = problem.bounds();
    let _ = write!(
        text,
        "l:{:x},{:x};b:{:x},{:x};tol:{:x};lin:{:x};it:{};fb:{:x};warm:{};eps:{:x};diag:{}",
        l1.to_bits(),
        l2.to_bits(),
        b.lower().to_bits(),
        b.upper().to_bits(),
        bb.tol.to_bits(),
        bb.linear_tol.to_bits(),
        bb.max_iter,
        bb.fallback_step.to_bits(),
        bb.warm_start,
        eps.to_bits(),
        diagonal.name()
    );
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// On-disk store of controls keyed by (problem digest, scalarization, level).
#[derive(Debug, Clone)]
pub struct ControlCache {
    dir: PathBuf,
    key: String,
}

impl ControlCache {
    pub fn new(dir: PathBuf, key: String) -> Self {
        Self { dir, key }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn control_path(&self, scalarization: &Scalarization, level: u32) -> PathBuf {
        let (tag, [a, b]) = match scalarization {
            Scalarization::WeightedSum(w) => ("wsm", w.get()),
            Scalarization::ReferencePoint(z) => ("rpm", *z),
        };
        self.dir.join(format!(
            "{tag}_{}_{:016x}_{:016x}_L{level}.ctl",
            self.key,
            a.to_bits(),
            b.to_bits()
        ))
    }

    pub fn sweep_path(&self, level: u32, l_max: usize, h_perp: f64, h_par: f64) -> PathBuf {
        self.dir.join(format!(
            "rpm_sweep_{}_{l_max}_{:016x}_{:016x}_L{level}.txt",
            self.key,
            h_perp.to_bits(),
            h_par.to_bits()
        ))
    }

    pub fn load(&self, scalarization: &Scalarization, level: u32) -> Option<PwcControl> {
        let path = self.control_path(scalarization, level);
        PwcControl::read(&path).ok().filter(|u| u.level() == level)
    }

    pub fn store(&self, scalarization: &Scalarization, control: &PwcControl) -> Result<()> {
        self.ensure_dir()?;
        control.write(&self.control_path(scalarization, control.level()))
    }

    /// Reference points of a cached sweep, one `z1 z2` pair per line.
    pub fn load_sweep(
        &self,
        level: u32,
        l_max: usize,
        h_perp: f64,
        h_par: f64,
    ) -> Option<Vec<[f64; 2]>> {
        let text = std::fs::read_to_string(self.sweep_path(level, l_max, h_perp, h_par)).ok()?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let mut it = l.split_whitespace().map(|s| s.parse::<f64>().ok());
                Some([it.next()??, it.next()??])
            })
            .collect()
    }

    pub fn store_sweep(
        &self,
        level: u32,
        l_max: usize,
        h_perp: f64,
        h_par: f64,
        zetas: &[[f64; 2]],
    ) -> Result<()> {
        self.ensure_dir()?;
        let mut text = String::new();
        for z in zetas {
            let _ = writeln!(text, "{:?} {:?}", z[0], z[1]);
        }
        let path = self.sweep_path(level, l_max, h_perp, h_par);
        std::fs::write(&path, text).map_err(|source| Error::Io { path, source })
    }

    fn ensure_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|source| Error::Io {
            path: self.dir.clone(),
            source,
        })
    }
}
