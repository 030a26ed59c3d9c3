//! Excursion sets: node masks, connected components, crossing events.
//!
//! The excursion set at level `level` keeps the cells whose value is at
//! least `-level`, so raising the level only opens more cells. Cells
//! are 8-connected: sharing an edge or just a corner joins them. That
//! convention matches the contact rule used by every path construction
//! in this crate (two open paths that cross geometrically always touch
//! in the 8-neighbor sense even when they share no cell).

use crate::error::Error;
use crate::geom::Rect;
use crate::grid::{FieldSample, GridSpec, Window};
use crate::Result;

/// Connectivity used for component labeling. Only the 8-neighbor rule
/// is meaningful for octile path lengths, so no other variant exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Eight,
}

/// Open/closed verdict for every cell at one level.
#[derive(Debug, Clone)]
pub struct ExcursionMask {
    grid: GridSpec,
    level: f64,
    bits: Vec<bool>,
}

impl ExcursionMask {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn bit(&self, row: usize, col: usize) -> bool {
        self.bits[self.grid.idx(row, col)]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn open_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Builds a mask directly from bits, for synthetic fixtures.
    pub fn from_bits(grid: GridSpec, level: f64, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.node_count() {
            return Err(Error::Geometry(format!(
                "mask has {} bits for {} nodes",
                bits.len(),
                grid.node_count()
            )));
        }
        Ok(ExcursionMask { grid, level, bits })
    }
}

/// Cells with value at least `-level` are open.
pub fn excursion_mask(field: &FieldSample, level: f64) -> Result<ExcursionMask> {
    if !level.is_finite() {
        return Err(Error::Config(format!("level must be finite, got {level}")));
    }
    let bits = field.values().iter().map(|v| *v >= -level).collect();
    Ok(ExcursionMask {
        grid: *field.grid(),
        level,
        bits,
    })
}

/// Connected components of the open cells inside one window.
///
/// Labels start at 1 and are assigned in order of first appearance in
/// the row-major scan, so the labeling is a pure function of the mask.
/// Label 0 marks closed cells.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    mask: ExcursionMask,
    window: Window,
    labels: Vec<u32>,
    component_cells: Vec<Vec<u32>>,
    connectivity: Connectivity,
}

impl ComponentLabeling {
    pub fn mask(&self) -> &ExcursionMask {
        &self.mask
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn n_components(&self) -> usize {
        self.component_cells.len()
    }

    /// Label of a node given by grid row/col; `None` outside the
    /// labeled window, `Some(0)` for closed cells inside it.
    pub fn label_of_node(&self, row: usize, col: usize) -> Option<u32> {
        if !self.window.contains(row, col) {
            return None;
        }
        let wr = row - self.window.r0;
        let wc = col - self.window.c0;
        Some(self.labels[wr * self.window.cols() + wc])
    }

    /// Grid node indices of one component, in row-major order.
    pub fn component_cells(&self, label: u32) -> &[u32] {
        &self.component_cells[(label - 1) as usize]
    }

    pub fn component_size(&self, label: u32) -> usize {
        self.component_cells(label).len()
    }

    /// Window-linear labels, row-major within the window.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }
}

/// Labels the whole grid.
pub fn label_components(mask: &ExcursionMask) -> ComponentLabeling {
    label_window(mask, mask.grid.full_window())
}

/// Labels the open cells restricted to `window`. Connectivity through
/// cells outside the window does not count.
pub fn label_window(mask: &ExcursionMask, window: Window) -> ComponentLabeling {
    let cols = window.cols();
    let rows = window.rows();
    let n = rows * cols;
    let grid = &mask.grid;

    // Union-find over window-linear indices, path-halving finds.
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut i: u32) -> u32 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }

    let open = |wr: usize, wc: usize| -> bool {
        mask.bits[grid.idx(window.r0 + wr, window.c0 + wc)]
    };

    for wr in 0..rows {
        for wc in 0..cols {
            if !open(wr, wc) {
                continue;
            }
            let me = (wr * cols + wc) as u32;
            // Already-scanned neighbors: W, SW, S, SE.
            if wc > 0 && open(wr, wc - 1) {
                let a = find(&mut parent, me);
                let b = find(&mut parent, me - 1);
                parent[a.max(b) as usize] = a.min(b);
            }
            if wr > 0 {
                let below = me - cols as u32;
                if wc > 0 && open(wr - 1, wc - 1) {
                    let a = find(&mut parent, me);
                    let b = find(&mut parent, below - 1);
                    parent[a.max(b) as usize] = a.min(b);
                }
                if open(wr - 1, wc) {
                    let a = find(&mut parent, me);
                    let b = find(&mut parent, below);
                    parent[a.max(b) as usize] = a.min(b);
                }
                if wc + 1 < cols && open(wr - 1, wc + 1) {
                    let a = find(&mut parent, me);
                    let b = find(&mut parent, below + 1);
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
    }

    // Final labels in first-touch row-major order.
    let mut labels = vec![0u32; n];
    let mut root_label: Vec<u32> = vec![0; n];
    let mut component_cells: Vec<Vec<u32>> = Vec::new();
    for wr in 0..rows {
        for wc in 0..cols {
            if !open(wr, wc) {
                continue;
            }
            let i = (wr * cols + wc) as u32;
            let root = find(&mut parent, i) as usize;
            if root_label[root] == 0 {
                component_cells.push(Vec::new());
                root_label[root] = component_cells.len() as u32;
            }
            let label = root_label[root];
            labels[i as usize] = label;
            let node = grid.idx(window.r0 + wr, window.c0 + wc) as u32;
            component_cells[(label - 1) as usize].push(node);
        }
    }

    ComponentLabeling {
        mask: mask.clone(),
        window,
        labels,
        component_cells,
        connectivity: Connectivity::Eight,
    }
}

/// Which side pair of a rectangle a crossing must join.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossDir {
    LeftRight,
    BottomTop,
}

/// True when some open component, relabeled inside `rect`, touches both
/// opposite sides. Connectivity through cells outside the rectangle
/// does not help.
pub fn detect_crossing(labeling: &ComponentLabeling, rect: &Rect, dir: CrossDir) -> Result<bool> {
    Ok(!crossing_labels(labeling, rect, dir)?.is_empty())
}

/// Labels (in `labeling`) of the components achieving a crossing of
/// `rect`. A component qualifies only if its restriction to the
/// rectangle stays connected and touches both opposite sides; it is
/// reported under the label it carries in `labeling` when the
/// rectangle lies inside the labeled window, which lets callers
/// intersect crossing events across several rectangles.
pub fn crossing_labels(
    labeling: &ComponentLabeling,
    rect: &Rect,
    dir: CrossDir,
) -> Result<Vec<u32>> {
    let mask = &labeling.mask;
    let window = mask.grid.window(rect)?;
    let local = label_window(mask, window);
    let cols = window.cols();
    let rows = window.rows();

    let mut on_near = vec![false; local.n_components() + 1];
    let mut crossing = Vec::new();
    match dir {
        CrossDir::LeftRight => {
            for wr in 0..rows {
                on_near[local.labels[wr * cols] as usize] = true;
            }
            for wr in 0..rows {
                let l = local.labels[wr * cols + cols - 1];
                if l != 0 && on_near[l as usize] {
                    on_near[l as usize] = false;
                    crossing.push(l);
                }
            }
        }
        CrossDir::BottomTop => {
            for wc in 0..cols {
                on_near[local.labels[wc] as usize] = true;
            }
            for wc in 0..cols {
                let l = local.labels[(rows - 1) * cols + wc];
                if l != 0 && on_near[l as usize] {
                    on_near[l as usize] = false;
                    crossing.push(l);
                }
            }
        }
    }
    on_near[0] = false;

    // Map local crossing labels to the caller's labeling when possible.
    let mut out = Vec::with_capacity(crossing.len());
    for l in crossing {
        let cell = local.component_cells(l)[0] as usize;
        let (row, col) = mask.grid.row_col(cell);
        match labeling.label_of_node(row, col) {
            Some(parent) if parent != 0 => out.push(parent),
            _ => out.push(l),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
