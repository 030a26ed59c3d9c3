//! Field synthesis: white noise convolved with a truncated radial filter.
//!
//! Independent `N(0, h^2)` noise is attached to every node of the
//! padded lattice (variance `h^2` is the cell area, so the discrete
//! convolution approximates the continuum white-noise integral) and
//! convolved with the sampled filter in the frequency domain. The
//! padding, at least one truncation radius wide, makes the circular
//! convolution agree with the linear one on the cropped extent. A
//! single global rescale pins the discrete variance to the analytic
//! `kappa(0)`, absorbing truncation and pitch drift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::Error;
use crate::grid::{FieldSample, GridSpec, LevelMeta};
use crate::kernel::{eval_kernel, eval_q, KernelSpec};
use crate::Result;

/// Derives the seed of one Monte Carlo stream from a master seed and a
/// stream index. Streams are independent of how work is scheduled:
/// stream `i` sees the same seed no matter which other streams run.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(index ^ 0x6A09_E667_F3BC_C909);
    splitmix64(a ^ b.rotate_left(17))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Synthesizes one stationary centered Gaussian realization on `grid`.
///
/// Requires `grid.padding() >= kernel.truncation_radius` (so no
/// wrap-around reaches the cropped extent) and a pitch no coarser than
/// a quarter truncation radius (so the stencil resolves the filter).
/// Identical `(kernel, grid, seed)` triples produce bit-identical
/// values.
pub fn sample_field(kernel: &KernelSpec, grid: &GridSpec, seed: u64) -> Result<FieldSample> {
    kernel.validate()?;
    let h = grid.pitch();
    let trunc = kernel.truncation_radius;
    if grid.padding() < trunc - 1e-12 {
        return Err(Error::Config(format!(
            "padding {} is below the kernel truncation radius {trunc}",
            grid.padding()
        )));
    }
    if h > trunc / 4.0 {
        return Err(Error::Config(format!(
            "pitch {h} is too coarse for truncation radius {trunc} (need h <= {})",
            trunc / 4.0
        )));
    }

    let pad = (grid.padding() / h - 1e-9).ceil() as usize;
    let rows = grid.ny() + 2 * pad;
    let cols = grid.nx() + 2 * pad;
    let n_total = rows * cols;

    // Noise scan order is row-major over the padded lattice, which
    // fixes the realization for a given seed independent of threading.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise: Vec<Complex<f64>> = (0..n_total)
        .map(|_| Complex::new(h * rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();

    // Filter stencil on the same lattice, wrapped so the origin sits at
    // index (0, 0); entries beyond the truncation radius vanish.
    let trunc_sq = trunc * trunc;
    let mut stencil: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n_total];
    let mut stencil_sq_sum = 0.0f64;
    for r in 0..rows {
        let dy = r.min(rows - r) as f64 * h;
        for c in 0..cols {
            let dx = c.min(cols - c) as f64 * h;
            let d2 = dx * dx + dy * dy;
            if d2 <= trunc_sq {
                let q = eval_q(kernel, d2.sqrt());
                stencil[r * cols + c] = Complex::new(q, 0.0);
                stencil_sq_sum += q * q;
            }
        }
    }

    // Discrete variance of the convolution is h^2 sum q^2; rescale so
    // the empirical variance equals the analytic kappa(0) exactly.
    let discrete_var = stencil_sq_sum * h * h;
    if discrete_var <= 0.0 {
        return Err(Error::Config("kernel stencil vanishes on this grid".into()));
    }
    let kappa0 = eval_kernel(kernel, 0.0)?;
    let rescale = (kappa0 / discrete_var).sqrt();

    let mut planner = FftPlanner::new();
    fft2(&mut planner, &mut noise, rows, cols, false);
    fft2(&mut planner, &mut stencil, rows, cols, false);
    let inv_n = 1.0 / n_total as f64;
    for (a, b) in noise.iter_mut().zip(stencil.iter()) {
        *a *= *b * inv_n;
    }
    fft2(&mut planner, &mut noise, rows, cols, true);

    let mut values = Vec::with_capacity(grid.node_count());
    for r in 0..grid.ny() {
        let base = (r + pad) * cols + pad;
        for c in 0..grid.nx() {
            values.push(noise[base + c].re * rescale);
        }
    }
    Ok(FieldSample::from_parts(*grid, values, seed, None))
}

/// Row-column 2D FFT, in place. rustfft transforms are unnormalized;
/// callers account for the `rows * cols` factor.
fn fft2(planner: &mut FftPlanner<f64>, data: &mut [Complex<f64>], rows: usize, cols: usize, inverse: bool) {
    let row_fft = if inverse {
        planner.plan_fft_inverse(cols)
    } else {
        planner.plan_fft_forward(cols)
    };
    for row in data.chunks_exact_mut(cols) {
        row_fft.process(row);
    }
    let col_fft = if inverse {
        planner.plan_fft_inverse(rows)
    } else {
        planner.plan_fft_forward(rows)
    };
    let mut column = vec![Complex::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_fft.process(&mut column);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}

/// Piecewise-constant coarsening on the lattice `epsilon Z^2`.
///
/// Every node inherits the value at the center of the half-open cell
/// `center + [-eps/2, eps/2)^2` containing it; a node exactly half way
/// between centers therefore belongs to the cell of the larger center.
/// `epsilon` must be an integer multiple of the pitch. Centers falling
/// outside the extent are clamped to the nearest sampled node, which
/// only affects a boundary margin thinner than `epsilon / 2`.
pub fn discretize(field: &FieldSample, epsilon: f64) -> Result<FieldSample> {
    let grid = field.grid();
    let h = grid.pitch();
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let k = (epsilon / h).round();
    if k < 1.0 || (epsilon / h - k).abs() > 1e-6 * k {
        return Err(Error::Config(format!(
            "epsilon {epsilon} is not an integer multiple of the pitch {h}"
        )));
    }

    let col_src = center_map(grid.extent().x0, h, grid.nx(), epsilon);
    let row_src = center_map(grid.extent().y0, h, grid.ny(), epsilon);
    if col_src.is_empty() || row_src.is_empty() {
        return Err(Error::Config("discretization lattice misses the extent".into()));
    }

    let values = field.values();
    let mut out = Vec::with_capacity(grid.node_count());
    for r in 0..grid.ny() {
        let base = row_src[r] * grid.nx();
        for c in 0..grid.nx() {
            out.push(values[base + col_src[c]]);
        }
    }
    Ok(FieldSample::from_parts(
        *grid,
        out,
        field.seed(),
        Some(LevelMeta {
            is_discretized: true,
            epsilon,
        }),
    ))
}

/// For each node index along one axis, the index of the node at the
/// center of its `epsilon` cell (clamped into the sampled range).
fn center_map(origin: f64, h: f64, n: usize, epsilon: f64) -> Vec<usize> {
    (0..n)
        .map(|i| {
            let w = origin + i as f64 * h;
            // Half-open cells: the boundary at center + eps/2 belongs
            // to the next cell up, hence the upward bias on ties.
            let m = (w / epsilon + 0.5 + 1e-9).floor();
            let center = m * epsilon;
            let src = ((center - origin) / h).round();
            src.clamp(0.0, (n - 1) as f64) as usize
        })
        .collect()
}

/// Largest absolute difference between two samples over the nodes of
/// `rect`. The samples must share pitch and extent.
pub fn sup_abs_diff(a: &FieldSample, b: &FieldSample, rect: &crate::geom::Rect) -> Result<f64> {
    let ga = a.grid();
    let gb = b.grid();
    if ga.pitch() != gb.pitch() || ga.extent() != gb.extent() {
        return Err(Error::Geometry(
            "samples live on different grids; cannot compare".into(),
        ));
    }
    let w = ga.window(rect)?;
    let (va, vb) = (a.values(), b.values());
    let mut sup = 0.0f64;
    for r in w.r0..=w.r1 {
        for c in w.c0..=w.c1 {
            let i = ga.idx(r, c);
            sup = sup.max((va[i] - vb[i]).abs());
        }
    }
    Ok(sup)
}
