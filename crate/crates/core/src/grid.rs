//! Sampling grids, field samples, and the EXCF1 dump format.
//!
//! A `GridSpec` describes a regular node lattice of pitch `h` covering
//! a rectangular extent, with node `(row, col)` at world position
//! `(x0 + col h, y0 + row h)`. Values are stored row-major from the
//! bottom-left node. Each node also names the half-open cell
//! `[x - h/2, x + h/2) x [y - h/2, y + h/2)` centered on it, which is
//! the unit of all connectivity and path computations.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::Error;
use crate::geom::{Point, Rect};
use crate::Result;

/// Relative slack used when deciding whether a length is an integer
/// multiple of the pitch and when snapping world coordinates to nodes.
const SNAP_TOL: f64 = 1e-6;

/// A regular sampling lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pitch: f64,
    extent: Rect,
    padding: f64,
    nx: usize,
    ny: usize,
}

impl GridSpec {
    /// Builds a grid whose extent sides must be integer multiples of
    /// `pitch` (the node lattice includes both ends of each side).
    /// `padding` widens the synthesis domain on every side; it is not
    /// part of the reported extent.
    pub fn new(pitch: f64, extent: Rect, padding: f64) -> Result<Self> {
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(Error::Config(format!("pitch must be positive, got {pitch}")));
        }
        if !(padding.is_finite() && padding >= 0.0) {
            return Err(Error::Config(format!("padding must be nonnegative, got {padding}")));
        }
        let spans = [extent.width() / pitch, extent.height() / pitch];
        for s in spans {
            if (s - s.round()).abs() > SNAP_TOL * s.max(1.0) {
                return Err(Error::Config(format!(
                    "extent side {s} pitches is not an integer number of cells"
                )));
            }
        }
        Ok(GridSpec {
            pitch,
            extent,
            padding,
            nx: spans[0].round() as usize + 1,
            ny: spans[1].round() as usize + 1,
        })
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn extent(&self) -> Rect {
        self.extent
    }

    pub fn padding(&self) -> f64 {
        self.padding
    }

    /// Nodes along the x axis.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Nodes along the y axis.
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn idx(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.ny && col < self.nx);
        row * self.nx + col
    }

    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.nx, idx % self.nx)
    }

    pub fn node_x(&self, col: usize) -> f64 {
        self.extent.x0 + col as f64 * self.pitch
    }

    pub fn node_y(&self, row: usize) -> f64 {
        self.extent.y0 + row as f64 * self.pitch
    }

    pub fn node_point(&self, idx: usize) -> Point {
        let (row, col) = self.row_col(idx);
        Point::new(self.node_x(col), self.node_y(row))
    }

    /// The node whose half-open cell contains `p`, if any.
    pub fn cell_of(&self, p: &Point) -> Option<(usize, usize)> {
        let col = ((p.x - self.extent.x0) / self.pitch + 0.5 + SNAP_TOL).floor();
        let row = ((p.y - self.extent.y0) / self.pitch + 0.5 + SNAP_TOL).floor();
        if col < 0.0 || row < 0.0 || col >= self.nx as f64 || row >= self.ny as f64 {
            return None;
        }
        Some((row as usize, col as usize))
    }

    /// Inclusive node index ranges for the nodes lying inside `rect`.
    /// Fails when the rectangle reaches outside the extent or contains
    /// no node.
    pub fn window(&self, rect: &Rect) -> Result<Window> {
        if !self.extent.contains_rect(rect, SNAP_TOL * self.pitch) {
            return Err(Error::Geometry(format!(
                "rectangle {rect:?} is not contained in the extent {:?}",
                self.extent
            )));
        }
        let tol = SNAP_TOL;
        let c0 = ((rect.x0 - self.extent.x0) / self.pitch - tol).ceil().max(0.0) as usize;
        let r0 = ((rect.y0 - self.extent.y0) / self.pitch - tol).ceil().max(0.0) as usize;
        let c1 = (((rect.x1 - self.extent.x0) / self.pitch + tol).floor() as usize).min(self.nx - 1);
        let r1 = (((rect.y1 - self.extent.y0) / self.pitch + tol).floor() as usize).min(self.ny - 1);
        if c1 < c0 || r1 < r0 {
            return Err(Error::Geometry(format!("rectangle {rect:?} contains no grid node")));
        }
        Ok(Window { r0, r1, c0, c1 })
    }

    /// The whole extent as a window.
    pub fn full_window(&self) -> Window {
        Window {
            r0: 0,
            r1: self.ny - 1,
            c0: 0,
            c1: self.nx - 1,
        }
    }
}

/// An inclusive rectangular range of node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub r0: usize,
    pub r1: usize,
    pub c0: usize,
    pub c1: usize,
}

impl Window {
    pub fn rows(&self) -> usize {
        self.r1 - self.r0 + 1
    }

    pub fn cols(&self) -> usize {
        self.c1 - self.c0 + 1
    }

    pub fn count(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.r0 && row <= self.r1 && col >= self.c0 && col <= self.c1
    }
}

/// Marks a sample as the piecewise-constant coarsening of another
/// sample on the lattice `epsilon Z^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelMeta {
    pub is_discretized: bool,
    pub epsilon: f64,
}

/// One synthesized (or injected) field realization. Immutable after
/// construction; identical inputs reproduce identical bits.
#[derive(Debug, Clone)]
pub struct FieldSample {
    grid: GridSpec,
    values: Vec<f64>,
    seed: u64,
    level_meta: Option<LevelMeta>,
}

impl FieldSample {
    pub(crate) fn from_parts(
        grid: GridSpec,
        values: Vec<f64>,
        seed: u64,
        level_meta: Option<LevelMeta>,
    ) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        FieldSample {
            grid,
            values,
            seed,
            level_meta,
        }
    }

    /// A deterministic synthetic sample, mostly useful in tests and
    /// for injecting closed-form fields.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for row in 0..grid.ny() {
            for col in 0..grid.nx() {
                values.push(f(grid.node_x(col), grid.node_y(row)));
            }
        }
        FieldSample::from_parts(grid, values, 0, None)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn level_meta(&self) -> Option<LevelMeta> {
        self.level_meta
    }

    pub fn value_at(&self, row: usize, col: usize) -> f64 {
        self.values[self.grid.idx(row, col)]
    }
}

const MAGIC: &[u8; 5] = b"EXCF1";

/// Writes a field dump: magic `EXCF1`, little-endian `u32` rows, `u32`
/// cols, `f64` x0, `f64` y0, `f64` pitch, `u64` seed, then rows x cols
/// `f64` values row-major from the bottom-left node.
pub fn write_field(path: &Path, field: &FieldSample) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&(field.grid.ny() as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&(field.grid.nx() as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&field.grid.extent().x0.to_le_bytes()).map_err(io)?;
    w.write_all(&field.grid.extent().y0.to_le_bytes()).map_err(io)?;
    w.write_all(&field.grid.pitch().to_le_bytes()).map_err(io)?;
    w.write_all(&field.seed.to_le_bytes()).map_err(io)?;
    for v in &field.values {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a field dump written by [`write_field`]. The padding used at
/// synthesis time is not part of the format; the reader restores a
/// grid with zero padding.
pub fn read_field(path: &Path) -> Result<FieldSample> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if &magic != MAGIC {
        return Err(Error::format(path, "bad magic, not an EXCF1 field dump"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    let mut read_u32 = |r: &mut BufReader<File>| -> Result<u32> {
        r.read_exact(&mut b4).map_err(|e| Error::io(path, e))?;
        Ok(u32::from_le_bytes(b4))
    };
    let rows = read_u32(&mut r)? as usize;
    let cols = read_u32(&mut r)? as usize;
    let mut read_f64 = |r: &mut BufReader<File>| -> Result<f64> {
        r.read_exact(&mut b8).map_err(|e| Error::io(path, e))?;
        Ok(f64::from_le_bytes(b8))
    };
    let x0 = read_f64(&mut r)?;
    let y0 = read_f64(&mut r)?;
    let pitch = read_f64(&mut r)?;
    let mut seed_bytes = [0u8; 8];
    r.read_exact(&mut seed_bytes).map_err(|e| Error::io(path, e))?;
    let seed = u64::from_le_bytes(seed_bytes);
    if rows < 2 || cols < 2 {
        return Err(Error::format(path, format!("grid {rows}x{cols} is too small")));
    }
    let extent = Rect::new(
        x0,
        y0,
        x0 + (cols - 1) as f64 * pitch,
        y0 + (rows - 1) as f64 * pitch,
    )?;
    let grid = GridSpec::new(pitch, extent, 0.0)?;
    let mut values = vec![0.0f64; rows * cols];
    let mut buf = vec![0u8; rows * cols * 8];
    r.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
    for (v, chunk) in values.iter_mut().zip(buf.chunks_exact(8)) {
        *v = f64::from_le_bytes(chunk.try_into().unwrap());
    }
    let mut tail = [0u8; 1];
    match r.read(&mut tail) {
        Ok(0) => {}
        Ok(_) => return Err(Error::format(path, "trailing bytes after the value payload")),
        Err(e) => return Err(Error::io(path, e)),
    }
    Ok(FieldSample::from_parts(grid, values, seed, None))
}
