//! Level-curve extraction and boundary-based diameter certificates.
//!
//! Curves of `{f = -level}` are traced with marching squares over the
//! node lattice of a clip box. A virtual ring of strongly negative
//! nodes surrounds the box, which closes every curve: where the
//! excursion set meets the box the interpolated crossings collapse
//! onto the box edge (the ring value is so low that the interpolation
//! parameter underflows below one ulp), so clip runs lie exactly on
//! the node lines and can be measured separately from the true level
//! set. Nodes sitting exactly at the level are nudged one part in
//! 1e12 into the open side so the traced curves separate exactly the
//! cells the mask calls open.

use std::collections::HashMap;

use crate::chem_dist::{chemical_diameter_with_cap, DiameterMode};
use crate::error::Error;
use crate::excursion::{excursion_mask, label_window, ComponentLabeling};
use crate::geom::{Point, Rect};
use crate::grid::FieldSample;
use crate::Result;

const VOID: f64 = -1e30;

/// One closed level curve. Vertices run around the loop once; the
/// edge from the last vertex back to the first is implied.
#[derive(Debug, Clone)]
pub struct ContourCurve {
    vertices: Vec<Point>,
    /// Total loop length, including any runs along the clip box.
    pub length: f64,
    /// Portion of the loop lying on the clip box edges.
    pub box_edge_length: f64,
    /// True when the loop touches the clip box.
    pub clipped: bool,
    /// Label of the open component this loop bounds, in the labeling
    /// carried by the owning set.
    pub component: u32,
}

impl ContourCurve {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
}

/// All level curves inside one clip box, with the component labeling
/// they were traced against.
#[derive(Debug, Clone)]
pub struct ContourSet {
    level: f64,
    clip_box: Rect,
    labeling: ComponentLabeling,
    curves: Vec<ContourCurve>,
}

impl ContourSet {
    pub fn level(&self) -> f64 {
        self.level
    }

    /// The box actually used, snapped inward to the node lattice.
    pub fn clip_box(&self) -> &Rect {
        &self.clip_box
    }

    pub fn curves(&self) -> &[ContourCurve] {
        &self.curves
    }

    /// Labeling of the open cells inside the clip box; curve
    /// `component` fields refer to these labels.
    pub fn labeling(&self) -> &ComponentLabeling {
        &self.labeling
    }

    /// Length of the true level set inside the box: clip runs along
    /// the box edges do not count.
    pub fn level_set_length(&self) -> f64 {
        self.curves
            .iter()
            .map(|c| c.length - c.box_edge_length)
            .sum()
    }
}

/// Traces every closed curve of `{f = -level}` inside `rect`.
pub fn extract_contours(field: &FieldSample, level: f64, rect: &Rect) -> Result<ContourSet> {
    let mask = excursion_mask(field, level)?;
    let grid = field.grid();
    let window = grid.window(rect)?;
    let labeling = label_window(&mask, window);

    let rows = window.rows();
    let cols = window.cols();
    let h = grid.pitch();
    let x0 = grid.node_x(window.c0);
    let y0 = grid.node_y(window.r0);
    let clip_box = Rect::new(x0, y0, grid.node_x(window.c1), grid.node_y(window.r1))?;

    // Window values with exact-level nodes nudged into the open side.
    let t = -level;
    let delta = 1e-12 * (1.0 + t.abs());
    let mut wv = Vec::with_capacity(rows * cols);
    for wr in 0..rows {
        for wc in 0..cols {
            let v = field.values()[grid.idx(window.r0 + wr, window.c0 + wc)];
            wv.push(if v == t { t + delta } else { v });
        }
    }

    // Extended lattice: one ring of void nodes around the window.
    let ext_rows = rows + 2;
    let ext_cols = cols + 2;
    let value = |er: usize, ec: usize| -> f64 {
        if er >= 1 && er <= rows && ec >= 1 && ec <= cols {
            wv[(er - 1) * cols + (ec - 1)]
        } else {
            VOID
        }
    };
    let px = |ec: usize| x0 + (ec as f64 - 1.0) * h;
    let py = |er: usize| y0 + (er as f64 - 1.0) * h;

    // Crossing on the edge from node a to node b; exactly one side is
    // open. The same formula runs for both cells sharing the edge, so
    // the two copies of the point are bitwise identical.
    let crossing = |ar: usize, ac: usize, br: usize, bc: usize| -> Point {
        let va = value(ar, ac);
        let vb = value(br, bc);
        let s = ((t - va) / (vb - va)).clamp(0.0, 1.0);
        Point::new(
            px(ac) + s * (px(bc) - px(ac)),
            py(ar) + s * (py(br) - py(ar)),
        )
    };
    // Edge identity: horizontal edges point right, vertical edges up.
    let edge_key = |er: usize, ec: usize, vertical: bool| -> u64 {
        (((er * ext_cols + ec) as u64) << 1) | vertical as u64
    };

    // Segments with endpoints named by edge, plus the component label
    // of the inside corners of the producing cell.
    let mut seg_ends: Vec<[(u64, Point); 2]> = Vec::new();
    let mut seg_label: Vec<u32> = Vec::new();

    for er in 0..ext_rows - 1 {
        for ec in 0..ext_cols - 1 {
            let inside = [
                value(er, ec) > t,
                value(er, ec + 1) > t,
                value(er + 1, ec + 1) > t,
                value(er + 1, ec) > t,
            ];
            let case = inside[0] as usize
                | (inside[1] as usize) << 1
                | (inside[2] as usize) << 2
                | (inside[3] as usize) << 3;
            if case == 0 || case == 15 {
                continue;
            }

            // Edges of this cell: bottom, right, top, left.
            let bottom = || (edge_key(er, ec, false), crossing(er, ec, er, ec + 1));
            let right = || (edge_key(er, ec + 1, true), crossing(er, ec + 1, er + 1, ec + 1));
            let top = || (edge_key(er + 1, ec, false), crossing(er + 1, ec, er + 1, ec + 1));
            let left = || (edge_key(er, ec, true), crossing(er, ec, er + 1, ec));

            let mut segs: Vec<[(u64, Point); 2]> = Vec::with_capacity(2);
            match case {
                1 => segs.push([left(), bottom()]),
                2 => segs.push([bottom(), right()]),
                4 => segs.push([right(), top()]),
                8 => segs.push([top(), left()]),
                3 => segs.push([left(), right()]),
                6 => segs.push([bottom(), top()]),
                12 => segs.push([left(), right()]),
                9 => segs.push([bottom(), top()]),
                14 => segs.push([left(), bottom()]),
                13 => segs.push([bottom(), right()]),
                11 => segs.push([right(), top()]),
                7 => segs.push([top(), left()]),
                5 | 10 => {
                    // Saddle: the cell-center average decides whether
                    // the two open corners join through the cell.
                    let avg = (value(er, ec)
                        + value(er, ec + 1)
                        + value(er + 1, ec)
                        + value(er + 1, ec + 1))
                        / 4.0;
                    let joined = avg > t;
                    match (case, joined) {
                        (5, true) => {
                            segs.push([bottom(), right()]);
                            segs.push([top(), left()]);
                        }
                        (5, false) => {
                            segs.push([left(), bottom()]);
                            segs.push([right(), top()]);
                        }
                        (10, true) => {
                            segs.push([left(), bottom()]);
                            segs.push([right(), top()]);
                        }
                        _ => {
                            segs.push([bottom(), right()]);
                            segs.push([top(), left()]);
                        }
                    }
                }
                _ => unreachable!(),
            }

            // Any open corner names the component: all open corners of
            // one cell are mutually 8-adjacent, hence share a label.
            let corners = [(er, ec), (er, ec + 1), (er + 1, ec + 1), (er + 1, ec)];
            let mut label = 0u32;
            for (k, &(cr, cc)) in corners.iter().enumerate() {
                if inside[k] {
                    label = labeling
                        .label_of_node(window.r0 + cr - 1, window.c0 + cc - 1)
                        .expect("open corners are real nodes inside the window");
                    break;
                }
            }
            debug_assert!(label != 0);
            for s in segs {
                seg_ends.push(s);
                seg_label.push(label);
            }
        }
    }

    // Every crossing edge is interior to the extended lattice, so it
    // is seen by exactly the two cells sharing it: the segment graph
    // is 2-regular on crossings and decomposes into closed loops.
    let mut by_key: HashMap<u64, Vec<(u32, u8)>> = HashMap::new();
    for (i, ends) in seg_ends.iter().enumerate() {
        for (e, (key, _)) in ends.iter().enumerate() {
            by_key.entry(*key).or_default().push((i as u32, e as u8));
        }
    }
    for (key, touches) in &by_key {
        if touches.len() != 2 {
            return Err(Error::Invariant(format!(
                "edge {key} is touched by {} segments instead of 2",
                touches.len()
            )));
        }
    }

    let x1 = clip_box.x1;
    let y1 = clip_box.y1;
    let on_box_line = |p: &Point| -> bool {
        p.x == x0 || p.x == x1 || p.y == y0 || p.y == y1
    };
    let same_box_line = |p: &Point, q: &Point| -> bool {
        (p.x == x0 && q.x == x0)
            || (p.x == x1 && q.x == x1)
            || (p.y == y0 && q.y == y0)
            || (p.y == y1 && q.y == y1)
    };

    let mut used = vec![false; seg_ends.len()];
    let mut curves = Vec::new();
    for start in 0..seg_ends.len() {
        if used[start] {
            continue;
        }
        let mut vertices: Vec<Point> = Vec::new();
        let component = seg_label[start];
        let (mut cur, mut enter) = (start, 0u8);
        loop {
            used[cur] = true;
            let exit = 1 - enter;
            let (key, point) = seg_ends[cur][exit as usize];
            if vertices.last() != Some(&point) {
                vertices.push(point);
            }
            let touches = &by_key[&key];
            let (next, next_end) = if touches[0] == (cur as u32, exit) {
                touches[1]
            } else {
                touches[0]
            };
            cur = next as usize;
            enter = next_end;
            if cur == start && enter == 0 {
                break;
            }
        }
        while vertices.len() > 1 && vertices.last() == vertices.first() {
            vertices.pop();
        }
        if vertices.len() < 2 {
            continue;
        }

        let mut length = 0.0;
        let mut box_edge_length = 0.0;
        let mut clipped = false;
        for i in 0..vertices.len() {
            let p = &vertices[i];
            let q = &vertices[(i + 1) % vertices.len()];
            let d = p.dist(q);
            length += d;
            if same_box_line(p, q) {
                box_edge_length += d;
            }
            clipped |= on_box_line(p);
        }
        curves.push(ContourCurve {
            vertices,
            length,
            box_edge_length,
            clipped,
            component,
        });
    }

    Ok(ContourSet {
        level,
        clip_box,
        labeling,
        curves,
    })
}

/// Outer boundary and holes of one component, as curve indices into
/// the owning [`ContourSet`].
#[derive(Debug, Clone)]
pub struct ComponentBoundary {
    pub label: u32,
    pub contour: usize,
    pub holes: Vec<usize>,
    /// Length of the outer curve plus all hole curves, clip runs
    /// included.
    pub boundary_length: f64,
}

/// Sorts the curves of one component into its outer boundary and its
/// holes. The outer curve is the one of largest enclosed area: holes
/// lie strictly inside it, so they are strictly smaller. Fails with
/// `ClassificationFailure` when the remaining curves are not all
/// inside the outer one and pairwise exterior, which happens when a
/// saddle resolution disagrees with 8-connectivity.
pub fn jordan_decompose(set: &ContourSet, label: u32) -> Result<ComponentBoundary> {
    let labeling = set.labeling();
    if label == 0 || label as usize > labeling.n_components() {
        return Err(Error::Geometry(format!(
            "label {label} out of range, labeling has {} components",
            labeling.n_components()
        )));
    }
    let candidates: Vec<usize> = (0..set.curves.len())
        .filter(|&i| set.curves[i].component == label)
        .collect();
    if candidates.is_empty() {
        return Err(Error::ClassificationFailure {
            label,
            reason: "component has no boundary curves".into(),
        });
    }

    let contour = *candidates
        .iter()
        .max_by(|&&a, &&b| {
            let aa = polygon_area(set.curves[a].vertices());
            let ab = polygon_area(set.curves[b].vertices());
            aa.partial_cmp(&ab).expect("areas are finite")
        })
        .expect("candidates are nonempty");

    let holes: Vec<usize> = candidates.iter().copied().filter(|&i| i != contour).collect();
    for &hole in &holes {
        let v = &set.curves[hole].vertices()[0];
        if !point_in_polygon(v, set.curves[contour].vertices()) {
            return Err(Error::ClassificationFailure {
                label,
                reason: "a hole curve lies outside the contour".into(),
            });
        }
    }
    for (a, &ha) in holes.iter().enumerate() {
        for &hb in holes.iter().skip(a + 1) {
            let va = &set.curves[ha].vertices()[0];
            let vb = &set.curves[hb].vertices()[0];
            if point_in_polygon(va, set.curves[hb].vertices())
                || point_in_polygon(vb, set.curves[ha].vertices())
            {
                return Err(Error::ClassificationFailure {
                    label,
                    reason: "two hole curves are nested".into(),
                });
            }
        }
    }

    let boundary_length = set.curves[contour].length
        + holes.iter().map(|&i| set.curves[i].length).sum::<f64>();
    Ok(ComponentBoundary {
        label,
        contour,
        holes,
        boundary_length,
    })
}

/// Certificate that a component's graph diameter is controlled by its
/// boundary length.
#[derive(Debug, Clone)]
pub struct DiameterBoundCheck {
    pub label: u32,
    pub diameter: f64,
    pub boundary_length: f64,
    /// `2 * boundary_length * (1 + tol)`.
    pub limit: f64,
    pub holds: bool,
    pub clipped: bool,
}

/// Checks `diameter <= 2 * boundary_length * (1 + tol)` for one
/// component of the contour set's clip box. The tolerance absorbs the
/// octile overhead of grid paths over continuum geodesics.
pub fn verify_diameter_bound(
    set: &ContourSet,
    label: u32,
    tol: f64,
    cap: Option<usize>,
) -> Result<DiameterBoundCheck> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tolerance must be >= 0, got {tol}")));
    }
    let boundary = jordan_decompose(set, label)?;
    let report = chemical_diameter_with_cap(set.labeling(), label, DiameterMode::Exact, cap)?;
    let limit = 2.0 * boundary.boundary_length * (1.0 + tol);
    let clipped = set.curves[boundary.contour].clipped
        || boundary.holes.iter().any(|&i| set.curves[i].clipped);
    Ok(DiameterBoundCheck {
        label,
        diameter: report.diameter,
        boundary_length: boundary.boundary_length,
        limit,
        holds: report.diameter <= limit,
        clipped,
    })
}

/// Euclidean diameter of a simple polygon checked against half its
/// perimeter. The diameter of a polygon is attained at a vertex pair,
/// and any two boundary points are joined along the shorter boundary
/// arc, so `diameter <= perimeter / 2` for every simple polygon.
#[derive(Debug, Clone)]
pub struct PolygonBound {
    pub diameter: f64,
    pub half_perimeter: f64,
    pub holds: bool,
}

/// Validates that `polygon` is simple and returns its vertex-pair
/// diameter against half the perimeter.
pub fn interior_diameter_bound(polygon: &[Point]) -> Result<PolygonBound> {
    let n = polygon.len();
    if n < 3 {
        return Err(Error::Geometry(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    for p in polygon {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::Geometry("polygon vertex is not finite".into()));
        }
    }
    for i in 0..n {
        if polygon[i] == polygon[(i + 1) % n] {
            return Err(Error::Geometry(format!("zero-length edge at vertex {i}")));
        }
    }
    // Non-adjacent edge pairs must not touch at all; adjacent edges
    // must not fold back onto each other.
    for i in 0..n {
        let (a1, a2) = (&polygon[i], &polygon[(i + 1) % n]);
        for j in i + 1..n {
            let (b1, b2) = (&polygon[j], &polygon[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_touch(a1, a2, b1, b2) {
                return Err(Error::Geometry(format!(
                    "edges {i} and {j} intersect, polygon is not simple"
                )));
            }
        }
        let prev = &polygon[(i + n - 1) % n];
        let next = &polygon[(i + 1) % n];
        let cur = &polygon[i];
        if orient(prev, cur, next) == 0.0
            && (prev.x - cur.x) * (next.x - cur.x) + (prev.y - cur.y) * (next.y - cur.y) > 0.0
        {
            return Err(Error::Geometry(format!("polygon folds back at vertex {i}")));
        }
    }

    let mut perimeter = 0.0;
    for i in 0..n {
        perimeter += polygon[i].dist(&polygon[(i + 1) % n]);
    }
    let mut diameter = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            diameter = diameter.max(polygon[i].dist(&polygon[j]));
        }
    }
    let half_perimeter = perimeter / 2.0;
    Ok(PolygonBound {
        diameter,
        half_perimeter,
        holds: diameter <= half_perimeter * (1.0 + 1e-12),
    })
}

/// Unsigned polygon area by the shoelace formula.
pub fn polygon_area(polygon: &[Point]) -> f64 {
    let n = polygon.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = &polygon[i];
        let q = &polygon[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    twice.abs() / 2.0
}

/// Parity ray cast along +x with each edge half-open in y, so passing
/// exactly through a vertex is counted once.
pub fn point_in_polygon(p: &Point, polygon: &[Point]) -> bool {
    let n = polygon.len();
    let mut inside = false;
    for i in 0..n {
        let a = &polygon[i];
        let b = &polygon[(i + 1) % n];
        if (a.y <= p.y) != (b.y <= p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x_cross > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// True when closed segments share any point.
fn segments_touch(a1: &Point, a2: &Point, b1: &Point, b2: &Point) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |d: f64, p: &Point, q: &Point, r: &Point| -> bool {
        d == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(d1, b1, b2, a1) || on(d2, b1, b2, a2) || on(d3, a1, a2, b1) || on(d4, a1, a2, b2)
}
