//! Graph distances inside excursion components.
//!
//! Open cells form a graph under 8-connectivity; axial moves cost one
//! grid pitch and diagonal moves cost `sqrt(2)` pitches. Every distance
//! is kept as an integer pair (axial steps, diagonal steps) and the
//! comparison key `a + b*sqrt(2)` is recomputed from the counts at each
//! relaxation, so results carry no accumulated rounding and do not
//! depend on visit order. Distinct count pairs of any realistic size
//! give distinct keys because `sqrt(2)` is badly approximable by
//! rationals, so the key never aliases two different step mixes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use crate::error::Error;
use crate::excursion::{label_window, ComponentLabeling};
use crate::geom::{Point, Rect};
use crate::grid::GridSpec;
use crate::Result;

/// Components larger than this are refused by the diameter routines
/// unless the caller raises the cap explicitly.
pub const DEFAULT_DIAMETER_CAP: usize = 20_000;

const NO_NODE: u32 = u32::MAX;

/// Why a point-to-point query produced no path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathFailure {
    /// An endpoint landed on a closed cell.
    EndpointClosed,
    /// Both endpoints are open but lie in different components.
    NotConnected,
}

/// Outcome of a point-to-point distance query. Unreachable endpoints
/// are an ordinary outcome, not an error: `reachable` is false, the
/// length is infinite and `failure` says why.
#[derive(Debug, Clone)]
pub struct PathResult {
    pub reachable: bool,
    pub length: f64,
    /// Grid node indices from start to end, present when reachable.
    pub cells: Option<Vec<u32>>,
    pub failure: Option<PathFailure>,
}

impl PathResult {
    fn failed(failure: PathFailure) -> Self {
        PathResult {
            reachable: false,
            length: f64::INFINITY,
            cells: None,
            failure: Some(failure),
        }
    }
}

/// How much work a diameter query may spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMode {
    /// True maximum of the distance over all cell pairs.
    Exact,
    /// Two-sweep lower bound; the true diameter is at most twice it.
    DoubleSweep,
}

/// Diameter of one component with the pair of cells realizing it.
#[derive(Debug, Clone)]
pub struct DiameterReport {
    pub label: u32,
    pub diameter: f64,
    pub mode: DiameterMode,
    /// Grid node indices of the witness pair.
    pub witness: (u32, u32),
}

/// Sum of component diameters inside one box.
#[derive(Debug, Clone)]
pub struct SStatistic {
    pub total: f64,
    pub reports: Vec<DiameterReport>,
}

/// One component flattened to dense indices; neighbors are rebuilt
/// from grid coordinates on the fly instead of stored.
struct CompactGraph<'a> {
    grid: &'a GridSpec,
    cells: &'a [u32],
    grid_to_compact: Vec<u32>,
}

/// Full single-source scan: comparison keys in step units, the step
/// counts behind them, and the predecessor tree.
struct Scan {
    keys: Vec<f64>,
    prev: Vec<u32>,
}

impl<'a> CompactGraph<'a> {
    fn new(grid: &'a GridSpec, cells: &'a [u32]) -> Self {
        let mut grid_to_compact = vec![NO_NODE; grid.node_count()];
        for (i, &cell) in cells.iter().enumerate() {
            grid_to_compact[cell as usize] = i as u32;
        }
        CompactGraph {
            grid,
            cells,
            grid_to_compact,
        }
    }

    fn n(&self) -> usize {
        self.cells.len()
    }

    fn compact_of(&self, cell: u32) -> Option<usize> {
        let i = self.grid_to_compact[cell as usize];
        (i != NO_NODE).then_some(i as usize)
    }

    fn for_each_neighbor(&self, i: usize, mut visit: impl FnMut(usize, bool)) {
        let (row, col) = self.grid.row_col(self.cells[i] as usize);
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (r, c) = (row as i64 + dr, col as i64 + dc);
                if r < 0 || c < 0 || r >= ny as i64 || c >= nx as i64 {
                    continue;
                }
                let j = self.grid_to_compact[self.grid.idx(r as usize, c as usize)];
                if j != NO_NODE {
                    visit(j as usize, dr != 0 && dc != 0);
                }
            }
        }
    }

    /// Dijkstra from `source`; stops early once `target` settles.
    fn dijkstra(&self, source: usize, target: Option<usize>) -> Scan {
        let n = self.n();
        let mut keys = vec![f64::INFINITY; n];
        let mut counts = vec![(0u32, 0u32); n];
        let mut prev = vec![NO_NODE; n];
        let mut done = vec![false; n];
        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = BinaryHeap::new();
        keys[source] = 0.0;
        heap.push(Reverse((0u64, source as u32)));
        while let Some(Reverse((_, iu))) = heap.pop() {
            let i = iu as usize;
            if done[i] {
                continue;
            }
            done[i] = true;
            if target == Some(i) {
                break;
            }
            let (a, b) = counts[i];
            self.for_each_neighbor(i, |j, diagonal| {
                if done[j] {
                    return;
                }
                let (na, nb) = if diagonal { (a, b + 1) } else { (a + 1, b) };
                let key = na as f64 + nb as f64 * SQRT_2;
                if key < keys[j] {
                    keys[j] = key;
                    counts[j] = (na, nb);
                    prev[j] = iu;
                    heap.push(Reverse((key.to_bits(), j as u32)));
                }
            });
        }
        Scan { keys, prev }
    }

    /// Farthest settled node and its key.
    fn farthest(&self, scan: &Scan) -> (usize, f64) {
        let mut best = (0, 0.0);
        for (i, &k) in scan.keys.iter().enumerate() {
            if k.is_finite() && k > best.1 {
                best = (i, k);
            }
        }
        best
    }

    fn path_to(&self, scan: &Scan, mut i: usize) -> Vec<u32> {
        let mut cells = vec![self.cells[i]];
        while scan.prev[i] != NO_NODE {
            i = scan.prev[i] as usize;
            cells.push(self.cells[i]);
        }
        cells.reverse();
        cells
    }
}

/// Shortest open path between two points, snapped to their cells.
pub fn chemical_distance(
    labeling: &ComponentLabeling,
    from: Point,
    to: Point,
) -> Result<PathResult> {
    let grid = labeling.mask().grid();
    let (r1, c1) = grid
        .cell_of(&from)
        .ok_or_else(|| Error::Geometry(format!("point {from:?} is outside the grid extent")))?;
    let (r2, c2) = grid
        .cell_of(&to)
        .ok_or_else(|| Error::Geometry(format!("point {to:?} is outside the grid extent")))?;
    let l1 = labeling.label_of_node(r1, c1).ok_or_else(|| {
        Error::Geometry(format!("start point {from:?} is outside the labeled window"))
    })?;
    let l2 = labeling.label_of_node(r2, c2).ok_or_else(|| {
        Error::Geometry(format!("end point {to:?} is outside the labeled window"))
    })?;
    if l1 == 0 || l2 == 0 {
        return Ok(PathResult::failed(PathFailure::EndpointClosed));
    }
    if l1 != l2 {
        return Ok(PathResult::failed(PathFailure::NotConnected));
    }

    let cells = labeling.component_cells(l1);
    let g = CompactGraph::new(grid, cells);
    let s = g.compact_of(grid.idx(r1, c1) as u32).expect("endpoint is in its component");
    let t = g.compact_of(grid.idx(r2, c2) as u32).expect("endpoint is in its component");
    if s == t {
        return Ok(PathResult {
            reachable: true,
            length: 0.0,
            cells: Some(vec![cells[s]]),
            failure: None,
        });
    }
    let scan = g.dijkstra(s, Some(t));
    debug_assert!(scan.keys[t].is_finite(), "component must connect its own cells");
    Ok(PathResult {
        reachable: true,
        length: scan.keys[t] * grid.pitch(),
        cells: Some(g.path_to(&scan, t)),
        failure: None,
    })
}

/// Diameter of one labeled component under the default size cap.
pub fn chemical_diameter(
    labeling: &ComponentLabeling,
    label: u32,
    mode: DiameterMode,
) -> Result<DiameterReport> {
    chemical_diameter_with_cap(labeling, label, mode, Some(DEFAULT_DIAMETER_CAP))
}

/// Diameter of one labeled component. `cap` bounds the component size
/// because the exact scan can touch every cell from many sources;
/// `None` removes the bound.
pub fn chemical_diameter_with_cap(
    labeling: &ComponentLabeling,
    label: u32,
    mode: DiameterMode,
    cap: Option<usize>,
) -> Result<DiameterReport> {
    if label == 0 || label as usize > labeling.n_components() {
        return Err(Error::Geometry(format!(
            "label {label} out of range, labeling has {} components",
            labeling.n_components()
        )));
    }
    let cells = labeling.component_cells(label);
    if let Some(cap) = cap {
        if cells.len() > cap {
            return Err(Error::CapExceeded {
                cells: cells.len(),
                cap,
            });
        }
    }
    let grid = labeling.mask().grid();
    if cells.len() == 1 {
        return Ok(DiameterReport {
            label,
            diameter: 0.0,
            mode,
            witness: (cells[0], cells[0]),
        });
    }
    let g = CompactGraph::new(grid, cells);
    let (key, (wa, wb)) = match mode {
        DiameterMode::Exact => exact_diameter(&g),
        DiameterMode::DoubleSweep => double_sweep(&g),
    };
    Ok(DiameterReport {
        label,
        diameter: key * grid.pitch(),
        mode,
        witness: (cells[wa], cells[wb]),
    })
}

/// Two sweeps: farthest node from an arbitrary start, then farthest
/// from that. Returns a diameter lower bound within a factor of two.
fn double_sweep(g: &CompactGraph) -> (f64, (usize, usize)) {
    let scan0 = g.dijkstra(0, None);
    let (u, _) = g.farthest(&scan0);
    let scan_u = g.dijkstra(u, None);
    let (w, lb) = g.farthest(&scan_u);
    (lb, (u, w))
}

/// Exact diameter without scanning from every cell.
///
/// After a double sweep, take the node `c` halfway along the sweep path
/// and scan from it. Any pair (x, y) satisfies
/// `d(x, y) <= d(c, x) + d(c, y) <= 2 * max(d(c, x), d(c, y))`, so once
/// nodes are processed in decreasing `d(c, .)` order and the current
/// best `lb` reaches `2 * d(c, v)` for the next node `v`, every pair
/// with both ends unprocessed is already beaten by `lb` and every pair
/// with a processed end was measured by that node's full scan. The
/// strict margin on the stop test only delays stopping, never lets an
/// unmeasured pair through.
fn exact_diameter(g: &CompactGraph) -> (f64, (usize, usize)) {
    let scan0 = g.dijkstra(0, None);
    let (u, _) = g.farthest(&scan0);
    let scan_u = g.dijkstra(u, None);
    let (w, mut lb) = g.farthest(&scan_u);
    let mut witness = (u, w);

    let path = {
        let mut i = w;
        let mut p = vec![i];
        while scan_u.prev[i] != NO_NODE {
            i = scan_u.prev[i] as usize;
            p.push(i);
        }
        p
    };
    let mut center = path[0];
    let mut center_gap = f64::INFINITY;
    for &i in &path {
        let gap = (scan_u.keys[i] - lb / 2.0).abs();
        if gap < center_gap {
            center_gap = gap;
            center = i;
        }
    }

    let scan_c = g.dijkstra(center, None);
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| {
        scan_c.keys[b]
            .partial_cmp(&scan_c.keys[a])
            .expect("keys are finite inside one component")
            .then(a.cmp(&b))
    });

    for &v in &order {
        if 2.0 * scan_c.keys[v] <= lb * (1.0 - 1e-12) {
            break;
        }
        let scan_v = g.dijkstra(v, None);
        let (far, ecc) = g.farthest(&scan_v);
        if ecc > lb {
            lb = ecc;
            witness = (v, far);
        }
    }
    (lb, witness)
}

/// Sum of component diameters after restriction to `rect`.
///
/// The open cells inside the box are relabeled first, so a component
/// split by the box boundary contributes one term per piece and
/// connectivity through cells outside the box does not count.
pub fn s_statistic(
    labeling: &ComponentLabeling,
    rect: &Rect,
    mode: DiameterMode,
) -> Result<SStatistic> {
    s_statistic_with_cap(labeling, rect, mode, Some(DEFAULT_DIAMETER_CAP))
}

pub fn s_statistic_with_cap(
    labeling: &ComponentLabeling,
    rect: &Rect,
    mode: DiameterMode,
    cap: Option<usize>,
) -> Result<SStatistic> {
    let mask = labeling.mask();
    let window = mask.grid().window(rect)?;
    let local = label_window(mask, window);
    let mut reports = Vec::with_capacity(local.n_components());
    let mut total = 0.0;
    for label in 1..=local.n_components() as u32 {
        let report = chemical_diameter_with_cap(&local, label, mode, cap)?;
        total += report.diameter;
        reports.push(report);
    }
    Ok(SStatistic { total, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursion::{excursion_mask, label_components, ExcursionMask};
    use crate::grid::GridSpec;
    use crate::kernel::KernelSpec;
    use crate::synth::{derive_seed, sample_field};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_grid(nx: usize, ny: usize, pitch: f64) -> GridSpec {
        GridSpec::new(
            pitch,
            Rect::new(0.0, 0.0, (nx - 1) as f64 * pitch, (ny - 1) as f64 * pitch).unwrap(),
            0.0,
        )
        .unwrap()
    }

    fn labeling_from(rows: &[&str], pitch: f64) -> ComponentLabeling {
        let ny = rows.len();
        let nx = rows[0].len();
        let g = unit_grid(nx, ny, pitch);
        let mut bits = vec![false; nx * ny];
        for (i, row) in rows.iter().rev().enumerate() {
            for (j, ch) in row.chars().enumerate() {
                bits[i * nx + j] = ch == '#';
            }
        }
        label_components(&ExcursionMask::from_bits(g, 0.0, bits).unwrap())
    }

    /// Independent single-source scan without the count bookkeeping:
    /// plain float accumulation over the same octile moves.
    fn naive_scan(l: &ComponentLabeling, start_cell: u32) -> Vec<(u32, f64)> {
        let grid = l.mask().grid();
        let h = grid.pitch();
        let mut dist = std::collections::HashMap::new();
        dist.insert(start_cell, 0.0f64);
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u64, start_cell)));
        while let Some(Reverse((kb, cell))) = heap.pop() {
            let d = f64::from_bits(kb);
            if d > dist[&cell] {
                continue;
            }
            let (row, col) = grid.row_col(cell as usize);
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (r, c) = (row as i64 + dr, col as i64 + dc);
                    if r < 0 || c < 0 || r >= grid.ny() as i64 || c >= grid.nx() as i64 {
                        continue;
                    }
                    let (r, c) = (r as usize, c as usize);
                    if l.label_of_node(r, c).unwrap_or(0) == 0 {
                        continue;
                    }
                    let step = if dr != 0 && dc != 0 { SQRT_2 * h } else { h };
                    let cand = d + step;
                    let j = grid.idx(r, c) as u32;
                    if cand < *dist.get(&j).unwrap_or(&f64::INFINITY) {
                        dist.insert(j, cand);
                        heap.push(Reverse((cand.to_bits(), j)));
                    }
                }
            }
        }
        let mut out: Vec<_> = dist.into_iter().collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// Max distance over every cell pair of one component.
    fn naive_diameter(l: &ComponentLabeling, label: u32) -> f64 {
        let mut best = 0.0f64;
        for &cell in l.component_cells(label) {
            for &(_, d) in &naive_scan(l, cell) {
                best = best.max(d);
            }
        }
        best
    }

    #[test]
    fn straight_corridor_counts_axial_steps() {
        let l = labeling_from(&["...........", "###########", "..........."], 0.5);
        let r = chemical_distance(&l, Point::new(0.0, 0.5), Point::new(5.0, 0.5)).unwrap();
        assert!(r.reachable);
        assert_eq!(r.length, 5.0);
        assert_eq!(r.cells.as_ref().unwrap().len(), 11);
    }

    #[test]
    fn l_corridor_cuts_the_corner() {
        // Arms of 11 cells sharing the corner cell: 18 axial steps and
        // one diagonal that clips the inside of the turn.
        let mut rows = vec![String::from("###########")];
        for _ in 0..10 {
            rows.push(String::from("..........#"));
        }
        rows.reverse();
        let refs: Vec<&str> = rows.iter().map(|s| s.as_str()).collect();
        let l = labeling_from(&refs, 0.25);
        let r = chemical_distance(&l, Point::new(0.0, 0.0), Point::new(2.5, 2.5)).unwrap();
        assert!(r.reachable);
        assert!((r.length - (18.0 + SQRT_2) * 0.25).abs() < 1e-12);
        assert_eq!(r.cells.as_ref().unwrap().len(), 20);
    }

    #[test]
    fn full_square_runs_the_diagonal() {
        let l = labeling_from(&["#####"; 5], 1.0);
        let r = chemical_distance(&l, Point::new(0.0, 0.0), Point::new(4.0, 4.0)).unwrap();
        assert!((r.length - 4.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn failures_are_soft_outcomes() {
        let l = labeling_from(&["##.##", ".....", "....."], 1.0);
        let closed = chemical_distance(&l, Point::new(0.0, 0.0), Point::new(4.0, 2.0)).unwrap();
        assert!(!closed.reachable);
        assert_eq!(closed.failure, Some(PathFailure::EndpointClosed));
        assert!(closed.length.is_infinite());
        assert!(closed.cells.is_none());

        let split = chemical_distance(&l, Point::new(0.0, 2.0), Point::new(4.0, 2.0)).unwrap();
        assert_eq!(split.failure, Some(PathFailure::NotConnected));
    }

    #[test]
    fn same_cell_gives_zero() {
        let l = labeling_from(&["###", "###"], 1.0);
        let r = chemical_distance(&l, Point::new(0.1, 0.2), Point::new(-0.3, -0.1)).unwrap();
        assert_eq!(r.length, 0.0);
        assert_eq!(r.cells.unwrap().len(), 1);
    }

    #[test]
    fn exact_diameter_matches_all_pairs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(501);
        for _ in 0..30 {
            let g = unit_grid(7, 7, 1.0);
            let bits: Vec<bool> = (0..49).map(|_| rng.gen_bool(0.6)).collect();
            let l = label_components(&ExcursionMask::from_bits(g, 0.0, bits).unwrap());
            for label in 1..=l.n_components() as u32 {
                let want = naive_diameter(&l, label);
                let got = chemical_diameter(&l, label, DiameterMode::Exact).unwrap();
                assert!(
                    (got.diameter - want).abs() <= 1e-9 * want.max(1.0),
                    "exact diameter {} differs from oracle {want}",
                    got.diameter
                );
                // The witness pair must realize the reported value.
                let grid = l.mask().grid();
                let d = chemical_distance(
                    &l,
                    grid.node_point(got.witness.0 as usize),
                    grid.node_point(got.witness.1 as usize),
                )
                .unwrap();
                assert!((d.length - got.diameter).abs() <= 1e-9 * want.max(1.0));
            }
        }
    }

    #[test]
    fn double_sweep_brackets_the_exact_diameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(502);
        for _ in 0..30 {
            let g = unit_grid(9, 6, 1.0);
            let bits: Vec<bool> = (0..54).map(|_| rng.gen_bool(0.55)).collect();
            let l = label_components(&ExcursionMask::from_bits(g, 0.0, bits).unwrap());
            for label in 1..=l.n_components() as u32 {
                let exact = chemical_diameter(&l, label, DiameterMode::Exact).unwrap();
                let sweep = chemical_diameter(&l, label, DiameterMode::DoubleSweep).unwrap();
                assert!(sweep.diameter <= exact.diameter + 1e-9);
                assert!(exact.diameter <= 2.0 * sweep.diameter + 1e-9);
            }
        }
    }

    #[test]
    fn distances_obey_metric_axioms() {
        let kernel = KernelSpec::bargmann_fock();
        let g = GridSpec::new(0.25, Rect::new(0.0, 0.0, 5.0, 5.0).unwrap(), 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(503);
        for trial in 0..5u64 {
            let f = sample_field(&kernel, &g, derive_seed(77, trial)).unwrap();
            let l = label_components(&excursion_mask(&f, 0.3).unwrap());
            // Three random cells of the largest component.
            let biggest = (1..=l.n_components() as u32)
                .max_by_key(|&lb| l.component_size(lb))
                .unwrap();
            let cells = l.component_cells(biggest);
            if cells.len() < 3 {
                continue;
            }
            let pick = |rng: &mut ChaCha8Rng| {
                g.node_point(cells[rng.gen_range(0..cells.len())] as usize)
            };
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let dxy = chemical_distance(&l, x, y).unwrap().length;
            let dyx = chemical_distance(&l, y, x).unwrap().length;
            let dyz = chemical_distance(&l, y, z).unwrap().length;
            let dxz = chemical_distance(&l, x, z).unwrap().length;
            assert_eq!(chemical_distance(&l, x, x).unwrap().length, 0.0);
            assert!((dxy - dyx).abs() < 1e-12, "asymmetry {dxy} vs {dyx}");
            assert!(dxz <= dxy + dyz + 1e-12, "triangle violated");
        }
    }

    #[test]
    fn convex_region_stays_near_the_straight_line() {
        // Open disk of radius 1.5; endpoints sit 0.45 (4.5 pitches)
        // inside the boundary, so the octile path never detours.
        let g = GridSpec::new(0.1, Rect::new(-2.0, -2.0, 2.0, 2.0).unwrap(), 0.0).unwrap();
        let f = crate::grid::FieldSample::from_fn(g, |x, y| 1.5 - x.hypot(y));
        let l = label_components(&excursion_mask(&f, 0.0).unwrap());
        let h = 0.1;
        for angle_deg in [0.0f64, 22.5, 45.0, 67.5] {
            let t = angle_deg.to_radians();
            let p = Point::new(1.05 * t.cos(), 1.05 * t.sin());
            let q = Point::new(-p.x, -p.y);
            let d = chemical_distance(&l, p, q).unwrap();
            assert!(d.reachable);
            // The octile metric is within 8.3% of straight-line
            // distance between cell centers; snapping can move each
            // endpoint by up to half a cell diagonal.
            let (r1, c1) = g.cell_of(&p).unwrap();
            let (r2, c2) = g.cell_of(&q).unwrap();
            let centers = g.node_point(g.idx(r1, c1)).dist(&g.node_point(g.idx(r2, c2)));
            assert!(
                d.length <= 1.09 * centers,
                "octile detour too long at {angle_deg} deg: {} vs {centers}",
                d.length
            );
            assert!(d.length >= p.dist(&q) - 2.0 * SQRT_2 * h);
        }
    }

    #[test]
    fn distance_shrinks_when_the_level_rises() {
        let kernel = KernelSpec::bargmann_fock();
        let g = GridSpec::new(0.25, Rect::new(0.0, 0.0, 5.0, 5.0).unwrap(), 5.0).unwrap();
        for trial in 0..5u64 {
            let f = sample_field(&kernel, &g, derive_seed(78, trial)).unwrap();
            let lo = label_components(&excursion_mask(&f, 0.2).unwrap());
            let hi = label_components(&excursion_mask(&f, 1.0).unwrap());
            let biggest = (1..=lo.n_components() as u32)
                .max_by_key(|&lb| lo.component_size(lb))
                .unwrap();
            let cells = lo.component_cells(biggest);
            if cells.len() < 2 {
                continue;
            }
            let p = g.node_point(cells[0] as usize);
            let q = g.node_point(cells[cells.len() - 1] as usize);
            let d_lo = chemical_distance(&lo, p, q).unwrap().length;
            let d_hi = chemical_distance(&hi, p, q).unwrap().length;
            assert!(d_hi <= d_lo + 1e-12, "larger set produced a longer path");
        }
    }

    #[test]
    fn oversized_component_hits_the_cap() {
        let rows = vec!["#".repeat(60); 60];
        let refs: Vec<&str> = rows.iter().map(|s| s.as_str()).collect();
        let l = labeling_from(&refs, 1.0);
        let err = chemical_diameter_with_cap(&l, 1, DiameterMode::Exact, Some(100)).unwrap_err();
        match err {
            Error::CapExceeded { cells, cap } => {
                assert_eq!(cells, 3600);
                assert_eq!(cap, 100);
            }
            other => panic!("expected CapExceeded, got {other:?}"),
        }
        // Without the cap the query is allowed.
        let ok =
            chemical_diameter_with_cap(&l, 1, DiameterMode::DoubleSweep, None).unwrap();
        assert!((ok.diameter - 59.0 * SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn box_restriction_splits_components_for_the_sum() {
        // Two horizontal bars joined by a bridge outside the box: the
        // restriction sees two components of width 5 cells each.
        let l = labeling_from(
            &["#####..", "......#", "#####.#", "......#", "#####.."],
            1.0,
        );
        let rect = Rect::new(0.0, 0.0, 4.0, 4.0).unwrap();
        let s = s_statistic(&l, &rect, DiameterMode::Exact).unwrap();
        assert_eq!(s.reports.len(), 3);
        assert!((s.total - 12.0).abs() < 1e-12);
        for r in &s.reports {
            assert!((r.diameter - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn s_statistic_matches_oracle_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(504);
        for _ in 0..15 {
            let g = unit_grid(8, 8, 0.5);
            let bits: Vec<bool> = (0..64).map(|_| rng.gen_bool(0.5)).collect();
            let l = label_components(&ExcursionMask::from_bits(g, 0.0, bits).unwrap());
            let rect = Rect::new(0.5, 0.0, 3.0, 2.5).unwrap();
            let s = s_statistic(&l, &rect, DiameterMode::Exact).unwrap();
            let window = g.window(&rect).unwrap();
            let local = label_window(l.mask(), window);
            let mut want = 0.0;
            for label in 1..=local.n_components() as u32 {
                want += naive_diameter(&local, label);
            }
            assert!((s.total - want).abs() < 1e-9, "{} vs {want}", s.total);
        }
    }
}
