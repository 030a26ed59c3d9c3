//! The thin-rectangle structure: frame geometry, the two structure
//! events, coarse path shortening, and crossing assembly.
//!
//! For a target separation `x` the geometry places a long rectangle H
//! of height `l = (ln x)^(1+delta)` spanning both endpoints, plus four
//! frame rectangles around the origin and four around `(x, 0)`. The
//! first structure event asks for nine lengthwise crossings on the
//! coarsened field at the harder level; the second asks the coarse
//! field to track the fine one uniformly on H. Together they let a
//! long connection be rerouted through H at controlled length.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::SQRT_2;

use crate::chem_dist::{PathFailure, PathResult};
use crate::error::Error;
use crate::excursion::{
    crossing_labels, detect_crossing, excursion_mask, label_components, ComponentLabeling,
    CrossDir,
};
use crate::geom::{Point, Rect};
use crate::grid::FieldSample;
use crate::synth::sup_abs_diff;
use crate::Result;

/// Crossing directions of the four frame rectangles, long axis first:
/// the side bands are crossed vertically, the top and bottom bands
/// horizontally, so the four crossings close into a circuit.
pub const FRAME_DIRS: [CrossDir; 4] = [
    CrossDir::BottomTop,
    CrossDir::BottomTop,
    CrossDir::LeftRight,
    CrossDir::LeftRight,
];

const FRAME_NAMES: [&str; 4] = ["H1", "H2", "H3", "H4"];
const FRAME_NAMES_SHIFTED: [&str; 4] = ["H1p", "H2p", "H3p", "H4p"];

/// The thin rectangle and its eight frame rectangles.
#[derive(Debug, Clone)]
pub struct StructureGeometry {
    pub x: f64,
    pub delta: f64,
    /// Height of the thin rectangle: `(ln x)^(1+delta)`.
    pub l: f64,
    /// Length of the thin rectangle: `x + l`.
    pub big_l: f64,
    pub h_rect: Rect,
    /// Frames around the origin: left band, right band, bottom band,
    /// top band.
    pub frames: [Rect; 4],
    /// The same frames translated by `(x, 0)`.
    pub frames_shifted: [Rect; 4],
}

/// Builds the geometry for separation `x` and tail exponent `delta`.
pub fn build_geometry(x: f64, delta: f64) -> Result<StructureGeometry> {
    if !(x > 3.0) || !x.is_finite() {
        return Err(Error::Config(format!("x must exceed 3, got {x}")));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Config(format!("delta must be positive, got {delta}")));
    }
    let l = x.ln().powf(1.0 + delta);
    let big_l = x + l;
    let h_rect = Rect::new(-l / 2.0, -l / 2.0, -l / 2.0 + big_l, l / 2.0)?;
    let frames = [
        Rect::new(-l / 2.0, -l / 2.0, -l / 6.0, l / 2.0)?,
        Rect::new(l / 6.0, -l / 2.0, l / 2.0, l / 2.0)?,
        Rect::new(-l / 2.0, -l / 2.0, l / 2.0, -l / 6.0)?,
        Rect::new(-l / 2.0, l / 6.0, l / 2.0, l / 2.0)?,
    ];
    let frames_shifted = [
        frames[0].shifted(x, 0.0),
        frames[1].shifted(x, 0.0),
        frames[2].shifted(x, 0.0),
        frames[3].shifted(x, 0.0),
    ];
    Ok(StructureGeometry {
        x,
        delta,
        l,
        big_l,
        h_rect,
        frames,
        frames_shifted,
    })
}

/// Outcome of the structure-event detectors. The crossing part lists
/// one entry per rectangle, H first; the uniform-closeness part is
/// filled only by [`detect_g2`] or the combined detector.
#[derive(Debug, Clone)]
pub struct StructureEventReport {
    pub g1: bool,
    pub per_subevent: Vec<(String, bool)>,
    pub g2: Option<bool>,
    pub sup_diff: Option<f64>,
}

/// Detects the nine lengthwise crossings of the coarsened field at
/// the harder level `level_prime`.
pub fn detect_g1(
    field_eps: &FieldSample,
    geom: &StructureGeometry,
    level_prime: f64,
) -> Result<StructureEventReport> {
    if !field_eps.level_meta().map_or(false, |m| m.is_discretized) {
        return Err(Error::Config(
            "the crossing event is defined on a coarsened field".into(),
        ));
    }
    let mask = excursion_mask(field_eps, level_prime)?;
    let labeling = label_components(&mask);

    let mut per_subevent = Vec::with_capacity(9);
    let mut g1 = detect_crossing(&labeling, &geom.h_rect, CrossDir::LeftRight)?;
    per_subevent.push(("H".to_string(), g1));
    for (frames, names) in [
        (&geom.frames, &FRAME_NAMES),
        (&geom.frames_shifted, &FRAME_NAMES_SHIFTED),
    ] {
        for i in 0..4 {
            let hit = detect_crossing(&labeling, &frames[i], FRAME_DIRS[i])?;
            g1 &= hit;
            per_subevent.push((names[i].to_string(), hit));
        }
    }
    Ok(StructureEventReport {
        g1,
        per_subevent,
        g2: None,
        sup_diff: None,
    })
}

/// Uniform closeness of the coarse field to the fine one over H:
/// holds when `sup |f - f_eps| < level / 2`.
pub fn detect_g2(
    field: &FieldSample,
    field_eps: &FieldSample,
    geom: &StructureGeometry,
    level: f64,
) -> Result<(bool, f64)> {
    if !level.is_finite() {
        return Err(Error::Config(format!("level must be finite, got {level}")));
    }
    let sup = sup_abs_diff(field, field_eps, &geom.h_rect)?;
    Ok((sup < level / 2.0, sup))
}

/// Runs both detectors: crossings at `level / 2` on the coarse field,
/// closeness at `level` against the fine field.
pub fn detect_structure_events(
    field: &FieldSample,
    field_eps: &FieldSample,
    geom: &StructureGeometry,
    level: f64,
) -> Result<StructureEventReport> {
    let mut report = detect_g1(field_eps, geom, level / 2.0)?;
    let (g2, sup) = detect_g2(field, field_eps, geom, level)?;
    report.g2 = Some(g2);
    report.sup_diff = Some(sup);
    Ok(report)
}

/// A path rebuilt through coarse squares, with the area-counting
/// bound it was checked against.
#[derive(Debug, Clone)]
pub struct ShortenedPath {
    pub result: PathResult,
    /// Number of distinct squares the path visits.
    pub square_count: usize,
    /// `2 * sqrt(2) * area(H) / epsilon`.
    pub bound: f64,
    /// Path length over the bound; at most 1 by construction.
    pub ratio: f64,
}

/// Replaces a path between `y1` and `y2` by straight segments between
/// centers of open `epsilon`-squares inside H.
///
/// A square is open when its center node is open in the coarse mask,
/// which makes every fine node of the square open; squares are
/// 8-adjacent. The breadth-first route visits each square at most
/// once, so its length is at most `sqrt(2) * epsilon` per square and
/// in particular at most `2 * sqrt(2) * area(H) / epsilon`; exceeding
/// that bound is reported as an invariant violation.
pub fn shorten_path(
    labeling_eps: &ComponentLabeling,
    geom: &StructureGeometry,
    y1: Point,
    y2: Point,
    epsilon: f64,
) -> Result<ShortenedPath> {
    let mask = labeling_eps.mask();
    let grid = mask.grid();
    let h = grid.pitch();
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let k = (epsilon / h).round();
    if k < 1.0 || (epsilon - k * h).abs() > 1e-6 * epsilon {
        return Err(Error::Config(format!(
            "epsilon {epsilon} is not an integer multiple of the pitch {h}"
        )));
    }
    if !grid.extent().contains_rect(&geom.h_rect, 1e-9 * h) {
        return Err(Error::Geometry(format!(
            "H {:?} is not contained in the extent {:?}",
            geom.h_rect,
            grid.extent()
        )));
    }

    // Squares are indexed by the integer pair closest to p / epsilon,
    // the same half-open convention the coarsening uses.
    let square_of = |p: &Point| -> (i64, i64) {
        (
            (p.x / epsilon + 0.5 + 1e-9).floor() as i64,
            (p.y / epsilon + 0.5 + 1e-9).floor() as i64,
        )
    };
    let center = |sq: (i64, i64)| -> Point {
        Point::new(sq.0 as f64 * epsilon, sq.1 as f64 * epsilon)
    };
    let open = |sq: (i64, i64)| -> bool {
        let c = center(sq);
        if !geom.h_rect.contains(&c) {
            return false;
        }
        match grid.cell_of(&c) {
            Some((row, col)) => mask.bit(row, col),
            None => false,
        }
    };

    let bound = 2.0 * SQRT_2 * geom.h_rect.area() / epsilon;
    let start = square_of(&y1);
    let goal = square_of(&y2);
    let soft = |failure: PathFailure| ShortenedPath {
        result: PathResult {
            reachable: false,
            length: f64::INFINITY,
            cells: None,
            failure: Some(failure),
        },
        square_count: 0,
        bound,
        ratio: f64::INFINITY,
    };
    if !open(start) || !open(goal) {
        return Ok(soft(PathFailure::EndpointClosed));
    }

    let mut prev: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
    let mut queue = VecDeque::new();
    prev.insert(start, start);
    queue.push_back(start);
    let mut reached = false;
    'bfs: while let Some(sq) = queue.pop_front() {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let next = (sq.0 + dx, sq.1 + dy);
                if prev.contains_key(&next) || !open(next) {
                    continue;
                }
                prev.insert(next, sq);
                if next == goal {
                    reached = true;
                    break 'bfs;
                }
                queue.push_back(next);
            }
        }
    }
    if !reached && start != goal {
        return Ok(soft(PathFailure::NotConnected));
    }

    let mut squares = vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = prev[&cur];
        squares.push(cur);
    }
    squares.reverse();
    debug_assert_eq!(
        squares.iter().collect::<HashSet<_>>().len(),
        squares.len(),
        "a breadth-first route never repeats a square"
    );

    let mut axial = 0u64;
    let mut diagonal = 0u64;
    for pair in squares.windows(2) {
        if pair[0].0 != pair[1].0 && pair[0].1 != pair[1].1 {
            diagonal += 1;
        } else {
            axial += 1;
        }
    }
    let length = (axial as f64 + diagonal as f64 * SQRT_2) * epsilon;
    if length > bound * (1.0 + 1e-12) {
        return Err(Error::Invariant(format!(
            "shortened path length {length} exceeds the area bound {bound}"
        )));
    }
    let cells = squares
        .iter()
        .map(|&sq| {
            let (row, col) = grid.cell_of(&center(sq)).expect("open squares have centers");
            grid.idx(row, col) as u32
        })
        .collect();
    Ok(ShortenedPath {
        result: PathResult {
            reachable: true,
            length,
            cells: Some(cells),
            failure: None,
        },
        square_count: squares.len(),
        bound,
        ratio: length / bound,
    })
}

/// Detects the overlapping-tile crossings that assemble into one
/// lengthwise crossing of the `big_l x l` rectangle anchored at the
/// origin: horizontal `2l x l` tiles advancing by `l`, and vertical
/// `l x 2l` tiles over each overlap. Returns the conjunction; when it
/// holds, the direct crossing is re-detected and any disagreement is
/// an invariant violation, since a vertical crossing must meet both
/// horizontal crossings it overlaps.
pub fn assemble_long_crossing(
    field_eps: &FieldSample,
    level_prime: f64,
    big_l: f64,
    l: f64,
) -> Result<bool> {
    if !(l > 0.0) || !(big_l >= l) || !big_l.is_finite() {
        return Err(Error::Config(format!(
            "tile size must satisfy 0 < l <= L, got l = {l}, L = {big_l}"
        )));
    }
    let n_h = ((big_l / l).ceil() as usize).saturating_sub(1).max(1);
    let grid = field_eps.grid();
    let needed = Rect::new(
        0.0,
        0.0,
        (n_h + 1) as f64 * l,
        if n_h >= 2 { 2.0 * l } else { l },
    )?;
    if !grid.extent().contains_rect(&needed, 1e-9 * grid.pitch()) {
        return Err(Error::Geometry(format!(
            "tiling {needed:?} is not contained in the extent {:?}",
            grid.extent()
        )));
    }

    let mask = excursion_mask(field_eps, level_prime)?;
    let labeling = label_components(&mask);
    let mut conjunction = true;
    for i in 0..n_h {
        let tile = Rect::new(i as f64 * l, 0.0, (i + 2) as f64 * l, l)?;
        conjunction &= detect_crossing(&labeling, &tile, CrossDir::LeftRight)?;
    }
    for j in 1..n_h {
        let tile = Rect::new(j as f64 * l, 0.0, (j + 1) as f64 * l, 2.0 * l)?;
        conjunction &= detect_crossing(&labeling, &tile, CrossDir::BottomTop)?;
    }

    if conjunction {
        let direct = Rect::new(0.0, 0.0, big_l, l)?;
        if !detect_crossing(&labeling, &direct, CrossDir::LeftRight)? {
            return Err(Error::Invariant(
                "tile conjunction held but the direct crossing is absent".into(),
            ));
        }
    }
    Ok(conjunction)
}

/// Constructive witness that the nine crossings and a long connection
/// combine: one coarse component realizes all nine crossings, and
/// both endpoints reach it through the fine excursion set without
/// leaving their local boxes.
#[derive(Debug, Clone)]
pub struct ConnectionStructure {
    /// Label (in the coarse labeling) of a component crossing all
    /// nine rectangles, when one exists.
    pub component: Option<u32>,
    pub origin_contact: bool,
    pub target_contact: bool,
    pub verified: bool,
}

/// Checks the constructive consequence of the structure events: on a
/// trial where the nine crossings hold and the endpoints are joined
/// in the fine excursion set, the rerouted path must exist. Both
/// labelings must cover the full extent.
pub fn verify_connection_structure(
    labeling_f: &ComponentLabeling,
    labeling_eps: &ComponentLabeling,
    geom: &StructureGeometry,
) -> Result<ConnectionStructure> {
    if geom.l >= geom.x {
        return Err(Error::Geometry(format!(
            "frames around 0 and x overlap: l = {} >= x = {}",
            geom.l, geom.x
        )));
    }

    let mut common: Option<Vec<u32>> = None;
    let mut intersect = |labels: Vec<u32>| {
        common = Some(match common.take() {
            None => labels,
            Some(prev) => prev.into_iter().filter(|l| labels.contains(l)).collect(),
        });
    };
    intersect(crossing_labels(labeling_eps, &geom.h_rect, CrossDir::LeftRight)?);
    for (frames, dirs) in [
        (&geom.frames, &FRAME_DIRS),
        (&geom.frames_shifted, &FRAME_DIRS),
    ] {
        for i in 0..4 {
            intersect(crossing_labels(labeling_eps, &frames[i], dirs[i])?);
        }
    }
    let component = common.unwrap_or_default().first().copied();

    let (origin_contact, target_contact) = match component {
        None => (false, false),
        Some(label) => {
            let half = geom.l / 2.0;
            let origin_box = Rect::new(-half, -half, half, half)?;
            let target_box = origin_box.shifted(geom.x, 0.0);
            (
                contact_through_box(labeling_f, labeling_eps, &origin_box, Point::new(0.0, 0.0), label)?,
                contact_through_box(
                    labeling_f,
                    labeling_eps,
                    &target_box,
                    Point::new(geom.x, 0.0),
                    label,
                )?,
            )
        }
    };
    Ok(ConnectionStructure {
        component,
        origin_contact,
        target_contact,
        verified: component.is_some() && origin_contact && target_contact,
    })
}

/// Breadth-first search from `start` through fine open cells inside
/// `rect`, looking for a cell of the coarse component `label` or an
/// 8-neighbor of one.
fn contact_through_box(
    labeling_f: &ComponentLabeling,
    labeling_eps: &ComponentLabeling,
    rect: &Rect,
    start: Point,
    label: u32,
) -> Result<bool> {
    let mask = labeling_f.mask();
    let grid = mask.grid();
    let window = grid.window(rect)?;
    let (sr, sc) = grid
        .cell_of(&start)
        .ok_or_else(|| Error::Geometry(format!("point {start:?} is outside the grid extent")))?;
    if !window.contains(sr, sc) || !mask.bit(sr, sc) {
        return Ok(false);
    }

    let touches = |row: usize, col: usize| -> bool {
        if labeling_eps.label_of_node(row, col) == Some(label) {
            return true;
        }
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                let (r, c) = (row as i64 + dr, col as i64 + dc);
                if r < 0 || c < 0 || r >= grid.ny() as i64 || c >= grid.nx() as i64 {
                    continue;
                }
                if labeling_eps.label_of_node(r as usize, c as usize) == Some(label) {
                    return true;
                }
            }
        }
        false
    };

    let cols = window.cols();
    let mut seen = vec![false; window.rows() * cols];
    let mut queue = VecDeque::new();
    seen[(sr - window.r0) * cols + (sc - window.c0)] = true;
    queue.push_back((sr, sc));
    while let Some((row, col)) = queue.pop_front() {
        if touches(row, col) {
            return Ok(true);
        }
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (r, c) = (row as i64 + dr, col as i64 + dc);
                if r < 0 || c < 0 {
                    continue;
                }
                let (r, c) = (r as usize, c as usize);
                if !window.contains(r, c) || !mask.bit(r, c) {
                    continue;
                }
                let s = (r - window.r0) * cols + (c - window.c0);
                if !seen[s] {
                    seen[s] = true;
                    queue.push_back((r, c));
                }
            }
        }
    }
    Ok(false)
}
