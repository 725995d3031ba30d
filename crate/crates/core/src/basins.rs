//! Basin classification on a rectangular grid, connected components of
//! equal (cycle, phase), and PPM rendering.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{ComplexValue, SpherePoint};
use crate::orbits::CriticalPortrait;
use crate::ratmap::RationalMap;

pub const DEFAULT_TRAP_RADIUS: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 500;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BasinError {
    #[error("the portrait has no superattracting cycle to trap orbits")]
    NoSuperattractingCycle,
    #[error("trap disks of radius {radius:e} around {a:?} and {b:?} overlap")]
    TrapOverlap {
        a: SpherePoint,
        b: SpherePoint,
        radius: f64,
    },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("point {0} lies outside the grid")]
    OutOfBounds(ComplexValue),
    #[error("point {0} lies in an unresolved cell")]
    Unresolved(ComplexValue),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, BasinError> {
        if !(x_min < x_max && y_min < y_max) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(BasinError::BadGrid(format!("empty rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]")));
        }
        Ok(Bounds { x_min, x_max, y_min, y_max })
    }

    pub fn square(half_width: f64) -> Self {
        Bounds::new(-half_width, half_width, -half_width, half_width).expect("positive half width")
    }
}

/// Outcome for one cell. `phase = (entry - steps) mod period`: the centre
/// lies in the basin of `cycle[phase]` under the period-th iterate, so `f`
/// shifts the phase by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub cycle: Option<u32>,
    pub phase: u32,
    /// Index of the cycle point whose trap disk was entered first.
    pub entry: u32,
    pub steps: u32,
}

impl Cell {
    pub const UNRESOLVED: Cell = Cell {
        cycle: None,
        phase: 0,
        entry: 0,
        steps: 0,
    };

    pub fn is_resolved(&self) -> bool {
        self.cycle.is_some()
    }

    pub fn key(&self) -> Option<(u32, u32)> {
        self.cycle.map(|c| (c, self.phase))
    }
}

/// First-entry classification against disjoint chordal trap disks.
#[derive(Clone, Debug, Serialize)]
pub struct BasinClassifier {
    pub cycles: Vec<Vec<SpherePoint>>,
    pub trap_radius: f64,
    pub max_iter: usize,
}

impl BasinClassifier {
    pub fn new(cycles: Vec<Vec<SpherePoint>>, trap_radius: f64, max_iter: usize) -> Result<Self, BasinError> {
        if cycles.is_empty() {
            return Err(BasinError::NoSuperattractingCycle);
        }
        if !(trap_radius > 0.0) {
            return Err(BasinError::BadGrid(format!("trap radius {trap_radius} must be positive")));
        }
        let points: Vec<&SpherePoint> = cycles.iter().flatten().collect();
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                if a.chordal(b) <= 2.0 * trap_radius {
                    return Err(BasinError::TrapOverlap {
                        a: **a,
                        b: **b,
                        radius: trap_radius,
                    });
                }
            }
        }
        Ok(BasinClassifier {
            cycles,
            trap_radius,
            max_iter,
        })
    }

    /// Uses the superattracting cycles of the portrait, in discovery order.
    pub fn from_portrait(portrait: &CriticalPortrait, trap_radius: f64, max_iter: usize) -> Result<Self, BasinError> {
        let cycles = portrait
            .superattracting_cycles()
            .into_iter()
            .map(|c| c.cycle.clone())
            .collect();
        Self::new(cycles, trap_radius, max_iter)
    }

    fn trapped(&self, x: &SpherePoint) -> Option<(u32, u32)> {
        for (ci, cycle) in self.cycles.iter().enumerate() {
            for (k, c) in cycle.iter().enumerate() {
                if x.chordal(c) < self.trap_radius {
                    return Some((ci as u32, k as u32));
                }
            }
        }
        None
    }

    pub fn classify(&self, f: &RationalMap, start: &SpherePoint) -> Cell {
        let mut x = *start;
        for steps in 0..=self.max_iter {
            if let Some((cycle, entry)) = self.trapped(&x) {
                let period = self.cycles[cycle as usize].len() as i64;
                return Cell {
                    cycle: Some(cycle),
                    phase: (entry as i64 - steps as i64).rem_euclid(period) as u32,
                    entry,
                    steps: steps as u32,
                };
            }
            if steps < self.max_iter {
                x = f.eval_sphere(&x);
            }
        }
        Cell::UNRESOLVED
    }

    pub fn period(&self, cycle: u32) -> usize {
        self.cycles[cycle as usize].len()
    }
}

/// Row-major cells; row 0 is the top edge (`y_max`).
#[derive(Clone, Debug)]
pub struct BasinGrid {
    pub bounds: Bounds,
    pub width: usize,
    pub height: usize,
    pub classifier: BasinClassifier,
    pub cells: Vec<Cell>,
}

fn cell_center(bounds: &Bounds, width: usize, height: usize, col: usize, row: usize) -> ComplexValue {
    let dx = (bounds.x_max - bounds.x_min) / width as f64;
    let dy = (bounds.y_max - bounds.y_min) / height as f64;
    ComplexValue::new(bounds.x_min + (col as f64 + 0.5) * dx, bounds.y_max - (row as f64 + 0.5) * dy)
}

fn cell_index(bounds: &Bounds, width: usize, height: usize, p: ComplexValue) -> Result<usize, BasinError> {
    if !(p.re >= bounds.x_min && p.re <= bounds.x_max && p.im >= bounds.y_min && p.im <= bounds.y_max) {
        return Err(BasinError::OutOfBounds(p));
    }
    let col = ((p.re - bounds.x_min) / (bounds.x_max - bounds.x_min) * width as f64) as usize;
    let row = ((bounds.y_max - p.im) / (bounds.y_max - bounds.y_min) * height as f64) as usize;
    Ok(row.min(height - 1) * width + col.min(width - 1))
}

impl BasinGrid {
    pub fn center(&self, col: usize, row: usize) -> ComplexValue {
        cell_center(&self.bounds, self.width, self.height, col, row)
    }

    pub fn index_of(&self, p: ComplexValue) -> Result<usize, BasinError> {
        cell_index(&self.bounds, self.width, self.height, p)
    }

    pub fn cell_at(&self, p: ComplexValue) -> Result<Cell, BasinError> {
        Ok(self.cells[self.index_of(p)?])
    }

    pub fn summary(&self) -> GridSummary {
        let mut counts: Vec<PhaseCount> = Vec::new();
        for (ci, cycle) in self.classifier.cycles.iter().enumerate() {
            for phase in 0..cycle.len() {
                counts.push(PhaseCount {
                    cycle: ci as u32,
                    phase: phase as u32,
                    cells: 0,
                });
            }
        }
        let offsets = phase_offsets(&self.classifier);
        let mut unresolved = 0;
        for c in &self.cells {
            match c.cycle {
                Some(ci) => counts[offsets[ci as usize] + c.phase as usize].cells += 1,
                None => unresolved += 1,
            }
        }
        GridSummary {
            bounds: self.bounds,
            width: self.width,
            height: self.height,
            trap_radius: self.classifier.trap_radius,
            max_iter: self.classifier.max_iter,
            cycles: self.classifier.cycles.clone(),
            counts,
            unresolved,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseCount {
    pub cycle: u32,
    pub phase: u32,
    pub cells: usize,
}

/// Grid metadata written next to a rendered image.
#[derive(Clone, Debug, Serialize)]
pub struct GridSummary {
    pub bounds: Bounds,
    pub width: usize,
    pub height: usize,
    pub trap_radius: f64,
    pub max_iter: usize,
    pub cycles: Vec<Vec<SpherePoint>>,
    pub counts: Vec<PhaseCount>,
    pub unresolved: usize,
}

fn phase_offsets(c: &BasinClassifier) -> Vec<usize> {
    let mut acc = 0;
    c.cycles
        .iter()
        .map(|cy| {
            let o = acc;
            acc += cy.len();
            o
        })
        .collect()
}

pub fn classify_grid_with(
    f: &RationalMap,
    classifier: BasinClassifier,
    bounds: Bounds,
    width: usize,
    height: usize,
) -> Result<BasinGrid, BasinError> {
    if width == 0 || height == 0 {
        return Err(BasinError::BadGrid(format!("resolution {width}x{height}")));
    }
    let cells: Vec<Cell> = (0..height)
        .into_par_iter()
        .flat_map_iter(|row| {
            let classifier = &classifier;
            (0..width).map(move |col| {
                let z = cell_center(&bounds, width, height, col, row);
                classifier.classify(f, &SpherePoint::finite(z))
            })
        })
        .collect();
    Ok(BasinGrid {
        bounds,
        width,
        height,
        classifier,
        cells,
    })
}

pub fn classify_grid(
    f: &RationalMap,
    portrait: &CriticalPortrait,
    bounds: Bounds,
    resolution: (usize, usize),
    trap_radius: f64,
    max_iter: usize,
) -> Result<BasinGrid, BasinError> {
    let classifier = BasinClassifier::from_portrait(portrait, trap_radius, max_iter)?;
    classify_grid_with(f, classifier, bounds, resolution.0, resolution.1)
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub label: u32,
    pub cycle: u32,
    pub phase: u32,
    pub pixel_count: usize,
    /// Centre of the first cell in row-major order.
    pub representative: ComplexValue,
}

#[derive(Clone, Debug)]
pub struct ComponentLabeling {
    pub bounds: Bounds,
    pub width: usize,
    pub height: usize,
    pub labels: Vec<Option<u32>>,
    pub components: Vec<Component>,
}

/// 4-connected components of equal (cycle, phase), labelled in row-major
/// order of discovery.
pub fn label_components(grid: &BasinGrid) -> ComponentLabeling {
    let (w, h) = (grid.width, grid.height);
    let mut labels: Vec<Option<u32>> = vec![None; w * h];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        let Some(key) = grid.cells[start].key() else { continue };
        if labels[start].is_some() {
            continue;
        }
        let label = components.len() as u32;
        labels[start] = Some(label);
        queue.push_back(start);
        let mut count = 0;
        while let Some(i) = queue.pop_front() {
            count += 1;
            let (row, col) = (i / w, i % w);
            let mut nbrs = [None; 4];
            if col > 0 {
                nbrs[0] = Some(i - 1);
            }
            if col + 1 < w {
                nbrs[1] = Some(i + 1);
            }
            if row > 0 {
                nbrs[2] = Some(i - w);
            }
            if row + 1 < h {
                nbrs[3] = Some(i + w);
            }
            for j in nbrs.into_iter().flatten() {
                if labels[j].is_none() && grid.cells[j].key() == Some(key) {
                    labels[j] = Some(label);
                    queue.push_back(j);
                }
            }
        }
        components.push(Component {
            label,
            cycle: key.0,
            phase: key.1,
            pixel_count: count,
            representative: grid.center(start % w, start / w),
        });
    }
    ComponentLabeling {
        bounds: grid.bounds,
        width: w,
        height: h,
        labels,
        components,
    }
}

/// Label of the component whose cell contains `p`.
pub fn component_of(labeling: &ComponentLabeling, p: ComplexValue) -> Result<u32, BasinError> {
    let i = cell_index(&labeling.bounds, labeling.width, labeling.height, p)?;
    labeling.labels[i].ok_or(BasinError::Unresolved(p))
}

/// Colours for (cycle, phase) pairs, cycled through in order of the flat
/// phase index. Unresolved cells are black.
#[derive(Clone, Debug)]
pub struct Palette {
    pub colors: Vec<[u8; 3]>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            colors: vec![
                [250, 250, 245],
                [214, 69, 65],
                [52, 120, 198],
                [242, 177, 52],
                [76, 166, 95],
                [142, 84, 176],
                [60, 180, 190],
                [205, 110, 160],
                [150, 150, 80],
                [110, 90, 60],
            ],
        }
    }
}

impl Palette {
    fn color(&self, flat: usize) -> [u8; 3] {
        self.colors[flat % self.colors.len()]
    }
}

/// Binary PPM (P6) with header `P6\n<w> <h>\n255\n`.
pub fn render_ppm(grid: &BasinGrid, palette: &Palette) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", grid.width, grid.height);
    let offsets = phase_offsets(&grid.classifier);
    let mut out = Vec::with_capacity(header.len() + 3 * grid.cells.len());
    out.extend_from_slice(header.as_bytes());
    for c in &grid.cells {
        let rgb = match c.cycle {
            Some(ci) => palette.color(offsets[ci as usize] + c.phase as usize),
            None => [0, 0, 0],
        };
        out.extend_from_slice(&rgb);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::paper_g;
    use crate::numerics::{c64, Polynomial};
    use crate::orbits::critical_portrait;

    fn grid_for(f: &RationalMap, half: f64, n: usize) -> BasinGrid {
        let portrait = critical_portrait(f).unwrap();
        classify_grid(f, &portrait, Bounds::square(half), (n, n), DEFAULT_TRAP_RADIUS, DEFAULT_MAX_ITER).unwrap()
    }

    fn poly(c: &[f64]) -> RationalMap {
        RationalMap::polynomial(Polynomial::from_real(c)).unwrap()
    }

    #[test]
    fn g_basins_on_coarse_grid() {
        let g = paper_g();
        let grid = grid_for(&g, 3.0, 100);
        let a = grid.cell_at(c64(0.0, 0.0)).unwrap();
        let b = grid.cell_at(c64(-2.0, 0.0)).unwrap();
        let far = grid.cell_at(c64(2.99, 2.99)).unwrap();
        assert_eq!(a.cycle, b.cycle);
        assert_eq!(grid.classifier.period(a.cycle.unwrap()), 2);
        assert_ne!(a.phase, b.phase);
        let inf = grid.classifier.cycles[far.cycle.unwrap() as usize].clone();
        assert!(inf[0].is_infinity());
        // The point 10 itself, outside this grid.
        let ten = grid.classifier.classify(&g, &SpherePoint::real(10.0));
        assert_eq!(ten.cycle, far.cycle);

        let lab = label_components(&grid);
        let l0 = component_of(&lab, c64(0.0, 0.0)).unwrap();
        let l2 = component_of(&lab, c64(-2.0, 0.0)).unwrap();
        assert_ne!(l0, l2);
        assert!(matches!(component_of(&lab, c64(5.0, 0.0)), Err(BasinError::OutOfBounds(_))));
    }

    #[test]
    fn single_cell_at_zero() {
        let g = paper_g();
        let portrait = critical_portrait(&g).unwrap();
        let b = Bounds::new(-0.01, 0.01, -0.01, 0.01).unwrap();
        let grid = classify_grid(&g, &portrait, b, (1, 1), DEFAULT_TRAP_RADIUS, DEFAULT_MAX_ITER).unwrap();
        let c = grid.cells[0];
        let cycle = &grid.classifier.cycles[c.cycle.unwrap() as usize];
        assert_eq!(cycle.len(), 2);
        assert!(cycle.iter().any(|p| p.approx_eq(&SpherePoint::real(-2.0), 1e-9)));
    }

    #[test]
    fn basilica_components_swap() {
        let f = poly(&[-1.0, 0.0, 1.0]);
        let grid = grid_for(&f, 2.0, 81);
        let lab = label_components(&grid);
        let a = grid.cell_at(c64(0.0, 0.0)).unwrap();
        let b = grid.cell_at(c64(-1.0, 0.0)).unwrap();
        assert_ne!(component_of(&lab, c64(0.0, 0.0)), component_of(&lab, c64(-1.0, 0.0)));
        assert_eq!(a.cycle, b.cycle);
        let p = grid.classifier.period(a.cycle.unwrap()) as u32;
        assert_eq!((a.phase + 1) % p, b.phase);
    }

    #[test]
    fn cube_has_two_components() {
        let grid = grid_for(&poly(&[0.0, 0.0, 0.0, 1.0]), 2.0, 31);
        assert_eq!(label_components(&grid).components.len(), 2);
    }

    #[test]
    fn unresolved_grid_has_no_labels() {
        let g = paper_g();
        let portrait = critical_portrait(&g).unwrap();
        let grid = classify_grid(&g, &portrait, Bounds::square(3.0), (8, 8), DEFAULT_TRAP_RADIUS, 0).unwrap();
        assert!(grid.cells.iter().all(|c| !c.is_resolved()));
        assert!(label_components(&grid).components.is_empty());
    }

    #[test]
    fn overlapping_traps_rejected() {
        let cycles = vec![vec![SpherePoint::real(0.0)], vec![SpherePoint::real(1e-7)]];
        assert!(matches!(BasinClassifier::new(cycles, 1e-6, 10), Err(BasinError::TrapOverlap { .. })));
        assert_eq!(BasinClassifier::new(vec![], 1e-6, 10).unwrap_err(), BasinError::NoSuperattractingCycle);
    }

    #[test]
    fn ppm_header_and_determinism() {
        let g = paper_g();
        let grid = grid_for(&g, 3.0, 2);
        let bytes = render_ppm(&grid, &Palette::default());
        assert!(bytes.starts_with(b"P6\n2 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 12);
        assert_eq!(bytes, render_ppm(&grid_for(&g, 3.0, 2), &Palette::default()));
    }
}
