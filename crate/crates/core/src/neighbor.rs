//! Cell lists for short-range pair searches in a periodic box.

use crate::error::{Error, Result};
use crate::state::{norm2, sub, BoxGeometry, Vec3};

/// Pair `(i, j)` with `i < j` and its minimal-image displacement `x_i - x_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub i: usize,
    pub j: usize,
    pub disp: Vec3,
}

/// Particles binned into `m^3` cubic cells of side at least the build radius.
#[derive(Debug, Clone)]
pub struct CellList {
    geometry: BoxGeometry,
    radius: f64,
    cells_per_side: usize,
    cell_size: f64,
    cell_of: Vec<usize>,
    // CSR layout: members of cell c are members[start[c]..start[c + 1]]
    start: Vec<usize>,
    members: Vec<usize>,
}

impl CellList {
    /// Bin wrapped positions. `radius` may not exceed `L / 2`.
    pub fn build(positions: &[Vec3], geometry: &BoxGeometry, radius: f64) -> Result<Self> {
        let l = geometry.side_length();
        if !geometry.is_periodic() {
            return Err(Error::config("neighbor", "cell lists need a periodic box"));
        }
        if !(radius > 0.0) || radius > 0.5 * l {
            return Err(Error::config(
                "neighbor.radius",
                format!("radius {radius} must lie in (0, L/2 = {}]", 0.5 * l),
            ));
        }
        let m = ((l / radius).floor() as usize).max(1);
        let cell_size = l / m as f64;
        let ncell = m * m * m;

        let coord = |x: f64| -> usize { ((x / cell_size) as usize).min(m - 1) };
        let cell_of: Vec<usize> = positions
            .iter()
            .map(|p| {
                let w = geometry.wrap(*p);
                (coord(w[0]) * m + coord(w[1])) * m + coord(w[2])
            })
            .collect();

        let mut start = vec![0usize; ncell + 1];
        for &c in &cell_of {
            start[c + 1] += 1;
        }
        for c in 0..ncell {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut members = vec![0usize; positions.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            members[fill[c]] = i;
            fill[c] += 1;
        }

        Ok(Self {
            geometry: *geometry,
            radius,
            cells_per_side: m,
            cell_size,
            cell_of,
            start,
            members,
        })
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_of(&self, i: usize) -> usize {
        self.cell_of[i]
    }

    pub fn cell_members(&self, c: usize) -> &[usize] {
        &self.members[self.start[c]..self.start[c + 1]]
    }

    pub fn occupied_cells(&self) -> usize {
        self.start.windows(2).filter(|w| w[1] > w[0]).count()
    }

    /// Distinct cells in the 3x3x3 block around `c`, ascending.
    fn neighbor_cells(&self, c: usize, out: &mut Vec<usize>) {
        let m = self.cells_per_side;
        let (cx, cy, cz) = (c / (m * m), (c / m) % m, c % m);
        let offsets: &[usize] = match m {
            1 => &[0],
            2 => &[0, 1],
            _ => &[m - 1, 0, 1],
        };
        out.clear();
        for &dx in offsets {
            for &dy in offsets {
                for &dz in offsets {
                    out.push((((cx + dx) % m) * m + (cy + dy) % m) * m + (cz + dz) % m);
                }
            }
        }
        out.sort_unstable();
    }

    /// Every unordered pair closer than `radius`, sorted by `(i, j)`.
    pub fn pairs_within(&self, positions: &[Vec3], radius: f64) -> Result<Vec<Pair>> {
        if radius > self.radius {
            return Err(Error::config(
                "neighbor.radius",
                format!("query radius {radius} exceeds build radius {}", self.radius),
            ));
        }
        let r2 = radius * radius;
        let mut out = Vec::new();
        let mut row: Vec<Pair> = Vec::new();
        let mut cells = Vec::with_capacity(27);
        for i in 0..positions.len() {
            row.clear();
            self.neighbor_cells(self.cell_of[i], &mut cells);
            for &c in &cells {
                for &j in self.cell_members(c) {
                    if j <= i {
                        continue;
                    }
                    let d = self.geometry.minimal_image(sub(&positions[i], &positions[j]));
                    if norm2(&d) < r2 {
                        row.push(Pair { i, j, disp: d });
                    }
                }
            }
            row.sort_unstable_by_key(|p| p.j);
            out.extend_from_slice(&row);
        }
        Ok(out)
    }
}
