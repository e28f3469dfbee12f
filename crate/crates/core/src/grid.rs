//! Cumulative Hardy–Littlewood integral `J(T) = ∫₀ᵀ |ζ(½+it)|² dt` on a cached grid.
//!
//! Nodes sit on a fixed lattice `t_k = 10 + k·w` (default `w = ½`). Every base
//! panel `[t_k, t_{k+1}]` is integrated by adaptive Gauss–Kronrod 10/21 until
//! the Kronrod–Gauss difference is below `tol · max(K, 10⁻³·w)`, where `K` is
//! the panel integral. The integral over `[0, 10]` is the constant [`HEAD_J`].
//! Because the lattice is fixed, extending a grid yields exactly the same
//! nodes as building it in one call.
//!
//! # Cache file layout
//!
//! All numbers little-endian.
//!
//! | offset | type      | field                         |
//! |-------:|-----------|-------------------------------|
//! | 0      | `[u8; 8]` | magic `ZETAGRID`              |
//! | 8      | `u32`     | format version (currently 1)  |
//! | 12     | `f64`     | `t_max`                       |
//! | 20     | `f64`     | `tol`                         |
//! | 28     | `f64`     | base panel width `w`          |
//! | 36     | `f64`     | `J(10)`                       |
//! | 44     | `u64`     | node count `n`                |
//! | 52     | `n × 24`  | records `(t, |ζ|², J(t))`     |
//!
//! A JSON sidecar `<file>.json` carries build metadata, and writers hold an
//! exclusive lock on `<file>.lock`.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk21, gl20};
use crate::zeta::modulus_sq_unchecked;
use crate::{EULER_GAMMA, LN_2PI};

/// `∫₀¹⁰ |ζ(½+it)|² dt`, evaluated once at 40 digits.
pub const HEAD_J: f64 = 9.982_734_637_918_992_531_4;
/// Lower end of the sampled part of the grid.
pub const GRID_START: f64 = 10.0;
pub const DEFAULT_BASE_WIDTH: f64 = 0.5;
pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"ZETAGRID";
const HEADER_LEN: usize = 52;
const RECORD_LEN: usize = 24;
const MAX_DEPTH: u32 = 14;
const CHUNK: usize = 2048;

/// Build metadata, written to the JSON sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildInfo {
    pub format_version: u32,
    pub t_min: f64,
    pub t_max: f64,
    pub tol: f64,
    pub base_width: f64,
    pub head_j: f64,
    pub node_count: u64,
    /// Largest `error / max(K, 10⁻³·w)` over all panels.
    pub achieved_tol: f64,
    pub gk_panels: u64,
    pub build_seconds: f64,
    pub threads: usize,
    pub producer: String,
}

/// Immutable grid of `(t, |ζ|², J(t))`.
#[derive(Debug, Clone)]
pub struct ZetaGrid {
    tol: f64,
    base_width: f64,
    ts: Vec<f64>,
    modulus_sq: Vec<f64>,
    cumulative: Vec<f64>,
    info: BuildInfo,
}

/// The asymptotic comparison `J(T) = T ln T − (1 + ln 2π − 2c)T + R(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HliComparison {
    pub t: f64,
    pub j_value: f64,
    pub main_term: f64,
    pub remainder: f64,
    /// `|R(T)| / T^{1/3 + δ}`.
    pub exponent_witness: f64,
    pub delta: f64,
}

/// `T ln T − (1 + ln 2π − 2c)·T`.
pub fn main_term(t: f64) -> f64 {
    t * t.ln() - (1.0 + LN_2PI - 2.0 * EULER_GAMMA) * t
}

struct PanelResult {
    left_modulus: f64,
    integral: f64,
    ratio: f64,
    panels: u64,
    converged: bool,
}

fn integrate_panel(a: f64, b: f64, tol: f64) -> PanelResult {
    let floor = 1e-3 * (b - a);
    let r = adaptive_gk21(&[a, b], tol * floor, tol, MAX_DEPTH, modulus_sq_unchecked);
    PanelResult {
        left_modulus: modulus_sq_unchecked(a),
        integral: r.value,
        ratio: r.error / r.value.abs().max(floor),
        panels: r.panels as u64,
        converged: r.converged,
    }
}

fn lattice_len(t_max: f64, width: f64) -> usize {
    ((t_max - GRID_START) / width - 1e-9).ceil() as usize + 1
}

impl ZetaGrid {
    /// Builds the grid on `[10, t_max]` with the default panel width.
    pub fn build(t_max: f64, tol: f64) -> Result<Self> {
        Self::build_with_width(t_max, tol, DEFAULT_BASE_WIDTH)
    }

    /// Builds with an explicit base panel width (used for refinement studies).
    pub fn build_with_width(t_max: f64, tol: f64, base_width: f64) -> Result<Self> {
        validate(t_max, tol)?;
        if !(base_width > 0.0 && base_width <= 1.0) {
            return Err(Error::domain("build_grid", base_width, "0 < base width <= 1"));
        }
        let mut grid = ZetaGrid {
            tol,
            base_width,
            ts: vec![GRID_START],
            modulus_sq: vec![modulus_sq_unchecked(GRID_START)],
            cumulative: vec![HEAD_J],
            info: BuildInfo {
                format_version: FORMAT_VERSION,
                t_min: GRID_START,
                t_max: GRID_START,
                tol,
                base_width,
                head_j: HEAD_J,
                node_count: 1,
                producer: format!("zetaladder {}", env!("CARGO_PKG_VERSION")),
                ..BuildInfo::default()
            },
        };
        grid.append_to(t_max)?;
        Ok(grid)
    }

    /// Returns a new grid reaching at least `t_max`, reusing every existing node.
    pub fn extended(&self, t_max: f64) -> Result<Self> {
        let mut g = self.clone();
        if t_max > g.t_max() {
            g.append_to(t_max)?;
        }
        Ok(g)
    }

    fn append_to(&mut self, t_max: f64) -> Result<()> {
        let start = Instant::now();
        let w = self.base_width;
        let first = self.ts.len() - 1;
        let last = lattice_len(t_max, w) - 1;
        if last <= first {
            return Ok(());
        }
        let tol = self.tol;
        let indices: Vec<usize> = (first..last).collect();
        let results: Vec<Vec<PanelResult>> = indices
            .par_chunks(CHUNK)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&k| {
                        let a = GRID_START + k as f64 * w;
                        integrate_panel(a, a + w, tol)
                    })
                    .collect()
            })
            .collect();
        let mut achieved = self.info.achieved_tol;
        let mut panels = self.info.gk_panels;
        let mut all_converged = true;
        self.ts.reserve(last - first);
        for (i, r) in results.iter().flatten().enumerate() {
            let k = first + i;
            if i > 0 {
                self.modulus_sq[k] = r.left_modulus;
            }
            let next = self.cumulative[k] + r.integral;
            self.ts.push(GRID_START + (k + 1) as f64 * w);
            self.cumulative.push(next);
            self.modulus_sq.push(f64::NAN);
            achieved = achieved.max(r.ratio);
            panels += r.panels;
            all_converged &= r.converged;
        }
        let end = *self.ts.last().unwrap();
        *self.modulus_sq.last_mut().unwrap() = modulus_sq_unchecked(end);
        if !all_converged {
            return Err(Error::ToleranceNotMet { achieved });
        }
        self.info.t_max = end;
        self.info.node_count = self.ts.len() as u64;
        self.info.achieved_tol = achieved;
        self.info.gk_panels = panels;
        self.info.build_seconds += start.elapsed().as_secs_f64();
        self.info.threads = rayon::current_num_threads();
        Ok(())
    }

    pub fn t_min(&self) -> f64 {
        GRID_START
    }

    pub fn t_max(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn base_width(&self) -> f64 {
        self.base_width
    }

    pub fn info(&self) -> &BuildInfo {
        &self.info
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.ts
    }

    pub fn node_modulus_sq(&self) -> &[f64] {
        &self.modulus_sq
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(t >= GRID_START && t <= self.t_max()) {
            return Err(Error::OutOfRange {
                t,
                t_min: GRID_START,
                t_max: self.t_max(),
            });
        }
        Ok(())
    }

    fn panel_index(&self, t: f64) -> usize {
        let k = ((t - GRID_START) / self.base_width).floor() as usize;
        k.min(self.ts.len() - 1)
    }

    /// Ratio of the stored panel integral to its 20-point Gauss–Legendre
    /// value; scaling in-panel pieces by it keeps `J` continuous at nodes.
    fn panel_scale(&self, k: usize) -> f64 {
        if k + 1 >= self.ts.len() {
            return 1.0;
        }
        let g = gl20().integrate(self.ts[k], self.ts[k + 1], modulus_sq_unchecked);
        let stored = self.cumulative[k + 1] - self.cumulative[k];
        if g > 0.0 {
            stored / g
        } else {
            1.0
        }
    }

    fn in_panel(&self, k: usize, a: f64, b: f64) -> f64 {
        self.panel_scale(k) * gl20().integrate(a, b, modulus_sq_unchecked)
    }

    /// `J(T)` for `10 ≤ T ≤ t_max`: stored cumulative plus a 20-point
    /// Gauss–Legendre integral from the preceding node, rescaled so that `J`
    /// is continuous and monotone across nodes.
    pub fn j_integral(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let k = self.panel_index(t);
        let base = self.cumulative[k];
        let a = self.ts[k];
        if t == a {
            return Ok(base);
        }
        Ok(base + self.in_panel(k, a, t))
    }

    /// `J(T₂) − J(T₁)`, evaluated so that every piece is a nonnegative quadrature.
    pub fn j_segment(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check(t1)?;
        self.check(t2)?;
        if t1 > t2 {
            return Err(Error::precondition("j_segment", format!("T1 = {t1} > T2 = {t2}")));
        }
        if t1 == t2 {
            return Ok(0.0);
        }
        let k1 = self.panel_index(t1);
        let k2 = self.panel_index(t2);
        if k1 == k2 {
            return Ok(self.in_panel(k1, t1, t2));
        }
        let left_end = self.ts[k1 + 1];
        let mut total = self.in_panel(k1, t1, left_end);
        total += self.cumulative[k2] - self.cumulative[k1 + 1];
        if t2 > self.ts[k2] {
            total += self.in_panel(k2, self.ts[k2], t2);
        }
        Ok(total)
    }

    /// Compares `J(T)` with its main term.
    pub fn hli_compare(&self, t: f64, delta: f64) -> Result<HliComparison> {
        if !(t >= 100.0) {
            return Err(Error::domain("hli_compare", t, "T >= 100"));
        }
        if !(delta > 0.0 && delta <= 0.2) {
            return Err(Error::domain("hli_compare", delta, "0 < delta <= 0.2"));
        }
        let j = self.j_integral(t)?;
        let m = main_term(t);
        let r = j - m;
        Ok(HliComparison {
            t,
            j_value: j,
            main_term: m,
            remainder: r,
            exponent_witness: r.abs() / t.powf(1.0 / 3.0 + delta),
            delta,
        })
    }

    /// Index of the last node `≤ y`, for solvers that bracket on the lattice.
    pub fn node_at_or_below(&self, y: f64) -> usize {
        self.panel_index(y.max(GRID_START))
    }

    /// Serializes the grid and its sidecar, holding the writer lock.
    pub fn save(&self, path: &Path) -> Result<()> {
        let _lock = CacheLock::exclusive(path)?;
        let io = |e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        };
        let mut buf = Vec::with_capacity(HEADER_LEN + RECORD_LEN * self.ts.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        for v in [self.t_max(), self.tol, self.base_width, HEAD_J] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf.extend_from_slice(&(self.ts.len() as u64).to_le_bytes());
        for i in 0..self.ts.len() {
            for v in [self.ts[i], self.modulus_sq[i], self.cumulative[i]] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(io)?;
            }
        }
        let tmp = with_suffix(path, ".tmp");
        fs::write(&tmp, &buf).map_err(io)?;
        fs::rename(&tmp, path).map_err(io)?;
        let json = serde_json::to_string_pretty(&self.info)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        fs::write(with_suffix(path, ".json"), json).map_err(io)?;
        Ok(())
    }

    /// Reads a grid written by [`ZetaGrid::save`], validating the header and records.
    pub fn load(path: &Path) -> Result<Self> {
        let _lock = CacheLock::shared(path)?;
        let corrupt = |msg: &str| Error::Cache {
            path: path.to_path_buf(),
            message: msg.to_string(),
        };
        let mut file = File::open(path).map_err(|e| Error::Cache {
            path: path.to_path_buf(),
            message: format!("cannot open: {e}"),
        })?;
        let mut buf = Vec::new();
        file.read_to_end(&mut buf).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        if buf.len() < HEADER_LEN || &buf[..8] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
        let version = u32_at(8);
        if version != FORMAT_VERSION {
            return Err(corrupt(&format!("unsupported version {version}")));
        }
        let (t_max, tol, width, head) = (f64_at(12), f64_at(20), f64_at(28), f64_at(36));
        let n = u64::from_le_bytes(buf[44..52].try_into().unwrap()) as usize;
        if buf.len() != HEADER_LEN + n * RECORD_LEN || n == 0 {
            return Err(corrupt("length does not match node count"));
        }
        if head != HEAD_J {
            return Err(corrupt("head constant mismatch"));
        }
        let mut ts = Vec::with_capacity(n);
        let mut modulus_sq = Vec::with_capacity(n);
        let mut cumulative = Vec::with_capacity(n);
        for i in 0..n {
            let o = HEADER_LEN + i * RECORD_LEN;
            ts.push(f64_at(o));
            modulus_sq.push(f64_at(o + 8));
            cumulative.push(f64_at(o + 16));
        }
        let lattice_ok = ts.iter().enumerate().all(|(i, &t)| t == GRID_START + i as f64 * width);
        if !lattice_ok || *ts.last().unwrap() != t_max {
            return Err(corrupt("nodes are not on the declared lattice"));
        }
        if cumulative.windows(2).any(|w| !(w[1] >= w[0])) || cumulative[0] != HEAD_J {
            return Err(corrupt("cumulative integral is not nondecreasing"));
        }
        let info = fs::read_to_string(with_suffix(path, ".json"))
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok())
            .unwrap_or_else(|| BuildInfo {
                format_version: version,
                t_min: GRID_START,
                t_max,
                tol,
                base_width: width,
                head_j: head,
                node_count: n as u64,
                ..BuildInfo::default()
            });
        Ok(ZetaGrid {
            tol,
            base_width: width,
            ts,
            modulus_sq,
            cumulative,
            info,
        })
    }
}

fn validate(t_max: f64, tol: f64) -> Result<()> {
    if !(t_max >= 100.0) || !t_max.is_finite() {
        return Err(Error::domain("build_grid", t_max, "t_max >= 100"));
    }
    if !(1e-10..=1e-3).contains(&tol) {
        return Err(Error::domain("build_grid", tol, "1e-10 <= tol <= 1e-3"));
    }
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Advisory lock on `<cache>.lock`, released on drop.
struct CacheLock {
    file: File,
}

impl CacheLock {
    fn open(path: &Path) -> Result<File> {
        let lock_path = with_suffix(path, ".lock");
        if let Some(dir) = lock_path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.to_path_buf(),
                    source: e,
                })?;
            }
        }
        OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&lock_path)
            .map_err(|e| Error::Io {
                path: lock_path,
                source: e,
            })
    }

    fn exclusive(path: &Path) -> Result<Self> {
        let file = Self::open(path)?;
        file.lock().map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(Self { file })
    }

    fn shared(path: &Path) -> Result<Self> {
        let file = Self::open(path)?;
        file.lock_shared().map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(Self { file })
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = self.file.flush();
        let _ = self.file.unlock();
    }
}

/// A grid together with its cache location; grows on demand.
#[derive(Debug, Clone)]
pub struct GridStore {
    path: Option<PathBuf>,
    allow_build: bool,
    grid: Option<Arc<ZetaGrid>>,
}

impl GridStore {
    /// In-memory store without persistence.
    pub fn in_memory() -> Self {
        Self {
            path: None,
            allow_build: true,
            grid: None,
        }
    }

    /// Store backed by a cache file. An existing file is loaded eagerly; a
    /// corrupt one is reported rather than silently rebuilt.
    pub fn open(path: impl Into<PathBuf>, allow_build: bool) -> Result<Self> {
        let path = path.into();
        let grid = if path.exists() {
            Some(Arc::new(ZetaGrid::load(&path)?))
        } else {
            None
        };
        Ok(Self {
            path: Some(path),
            allow_build,
            grid,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn current(&self) -> Option<Arc<ZetaGrid>> {
        self.grid.clone()
    }

    /// Returns a grid covering `t_max` at tolerance `tol` or tighter, extending
    /// or rebuilding (and re-saving) as needed.
    pub fn ensure(&mut self, t_max: f64, tol: f64) -> Result<Arc<ZetaGrid>> {
        if let Some(g) = &self.grid {
            if g.tol() <= tol && g.t_max() >= t_max {
                return Ok(g.clone());
            }
        }
        if !self.allow_build {
            return Err(Error::Cache {
                path: self.path.clone().unwrap_or_default(),
                message: format!(
                    "grid to t = {t_max} at tol {tol:e} not cached and building is disabled"
                ),
            });
        }
        let grid = match &self.grid {
            Some(g) if g.tol() <= tol => g.extended(t_max)?,
            Some(g) => ZetaGrid::build(t_max.max(g.t_max()), tol)?,
            None => ZetaGrid::build(t_max.max(100.0), tol)?,
        };
        if let Some(p) = &self.path {
            grid.save(p)?;
        }
        let grid = Arc::new(grid);
        self.grid = Some(grid.clone());
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_term_value() {
        assert!((main_term(100.0) - 292.17).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_build_parameters() {
        assert!(ZetaGrid::build(50.0, 1e-8).is_err());
        assert!(ZetaGrid::build(200.0, 1e-2).is_err());
        assert!(ZetaGrid::build(200.0, 1e-12).is_err());
    }

    #[test]
    fn lookup_at_node_returns_stored_value() {
        let g = ZetaGrid::build(120.0, 1e-8).unwrap();
        for k in [0, 7, g.len() - 1] {
            assert_eq!(g.j_integral(g.nodes()[k]).unwrap(), g.cumulative()[k]);
        }
        assert!(g.j_integral(9.0).is_err());
        assert!(g.j_integral(g.t_max() + 1.0).is_err());
    }

    #[test]
    fn segment_is_additive_and_nonnegative() {
        let g = ZetaGrid::build(150.0, 1e-9).unwrap();
        let (a, b, c) = (12.3, 77.77, 141.2);
        let ab = g.j_segment(a, b).unwrap();
        let bc = g.j_segment(b, c).unwrap();
        let ac = g.j_segment(a, c).unwrap();
        assert!((ab + bc - ac).abs() <= 1e-12 * ac);
        assert_eq!(g.j_segment(a, a).unwrap(), 0.0);
        assert!(g.j_segment(b, a).is_err());
        assert!(g.j_segment(100.1, 100.2).unwrap() >= 0.0);
    }
}
