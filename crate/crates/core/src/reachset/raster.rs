//! Square occupancy grid over `[-1, 1]^2` in the `(z, R)` plane.

use std::collections::{HashMap, VecDeque};

/// `n x n` cells; cell `(i, j)` covers `z` index `i` and `R` index `j`, stored at `j * n + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    n: usize,
    cells: Vec<bool>,
}

impl Raster {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            cells: vec![false; n * n],
        }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn cell_width(&self) -> f64 {
        2.0 / self.n as f64
    }

    /// Coordinate of the center of row or column `k`.
    pub fn center(&self, k: usize) -> f64 {
        -1.0 + (k as f64 + 0.5) * self.cell_width()
    }

    /// Cell index containing coordinate `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let k = ((x + 1.0) / self.cell_width()).floor();
        k.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.n + i]
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.cells[j * self.n + i] = true;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Iterates occupied cell centers `(z, R)`.
    pub fn occupied_centers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            (0..self.n)
                .filter(move |&i| self.get(i, j))
                .map(move |i| (self.center(i), self.center(j)))
        })
    }

    /// True when every occupied cell of `self` is occupied in `other`.
    pub fn is_subset_of(&self, other: &Raster) -> bool {
        self.n == other.n && self.cells.iter().zip(&other.cells).all(|(a, b)| !*a || *b)
    }

    pub fn union_with(&mut self, other: &Raster) {
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a |= *b;
        }
    }

    /// Image under `R -> -R`; exact on the grid.
    pub fn mirrored(&self) -> Raster {
        let mut out = Raster::new(self.n);
        for j in 0..self.n {
            let src = &self.cells[j * self.n..(j + 1) * self.n];
            let dst = self.n - 1 - j;
            out.cells[dst * self.n..(dst + 1) * self.n].copy_from_slice(src);
        }
        out
    }

    pub fn mark_point(&mut self, z: f64, r: f64) {
        let (i, j) = (self.index_of(z), self.index_of(r));
        self.set(i, j);
    }

    /// Marks every cell the segment passes through (sampled at quarter-cell spacing).
    pub fn mark_segment(&mut self, a: [f64; 2], b: [f64; 2]) {
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let steps = (4.0 * len / self.cell_width()).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            self.mark_point(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]));
        }
    }

    /// Marks cells whose centers lie in the closed triangle.
    pub fn fill_triangle(&mut self, a: [f64; 2], b: [f64; 2], c: [f64; 2]) {
        let area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if area == 0.0 {
            return;
        }
        let lo_z = self.index_of(a[0].min(b[0]).min(c[0]));
        let hi_z = self.index_of(a[0].max(b[0]).max(c[0]));
        let lo_r = self.index_of(a[1].min(b[1]).min(c[1]));
        let hi_r = self.index_of(a[1].max(b[1]).max(c[1]));
        let edge = |p: [f64; 2], q: [f64; 2], x: f64, y: f64| {
            ((q[0] - p[0]) * (y - p[1]) - (q[1] - p[1]) * (x - p[0])) * area.signum()
        };
        for j in lo_r..=hi_r {
            let y = self.center(j);
            for i in lo_z..=hi_z {
                let x = self.center(i);
                if edge(a, b, x, y) >= 0.0 && edge(b, c, x, y) >= 0.0 && edge(c, a, x, y) >= 0.0 {
                    self.set(i, j);
                }
            }
        }
    }

    pub fn fill_quad(&mut self, p: [[f64; 2]; 4]) {
        self.fill_triangle(p[0], p[1], p[2]);
        self.fill_triangle(p[0], p[2], p[3]);
    }

    /// Keeps only the 4-connected occupied component containing cell `(i, j)`.
    pub fn retain_component(&mut self, i: usize, j: usize) {
        let mut keep = vec![false; self.cells.len()];
        if self.get(i, j) {
            let mut queue = VecDeque::from([(i, j)]);
            keep[j * self.n + i] = true;
            while let Some((a, b)) = queue.pop_front() {
                for (x, y) in self.neighbors(a, b) {
                    let k = y * self.n + x;
                    if self.cells[k] && !keep[k] {
                        keep[k] = true;
                        queue.push_back((x, y));
                    }
                }
            }
        }
        self.cells = keep;
    }

    /// Occupies every unoccupied 4-connected component that does not touch the
    /// grid border and has at most `max_cells` cells.
    pub fn fill_small_holes(&mut self, max_cells: usize) {
        let mut seen = vec![false; self.cells.len()];
        for start in 0..self.cells.len() {
            if self.cells[start] || seen[start] {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            let mut open = false;
            while let Some(k) = queue.pop_front() {
                let (a, b) = (k % self.n, k / self.n);
                if a == 0 || b == 0 || a == self.n - 1 || b == self.n - 1 {
                    open = true;
                }
                for (x, y) in self.neighbors(a, b) {
                    let m = y * self.n + x;
                    if !self.cells[m] && !seen[m] {
                        seen[m] = true;
                        comp.push(m);
                        queue.push_back(m);
                    }
                }
            }
            if !open && comp.len() <= max_cells {
                for k in comp {
                    self.cells[k] = true;
                }
            }
        }
    }

    fn neighbors(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        [
            (i.wrapping_sub(1), j),
            (i + 1, j),
            (i, j.wrapping_sub(1)),
            (i, j + 1),
        ]
        .into_iter()
        .filter(move |&(x, y)| x < n && y < n)
    }

    /// Closed iso-contours of the occupancy at level 1/2, by marching squares
    /// on the grid padded with one empty ring. Vertices sit on midpoints
    /// between neighbouring cell centers.
    pub fn boundary(&self) -> Vec<Vec<[f64; 2]>> {
        let n = self.n as isize;
        let occ = |i: isize, j: isize| -> bool {
            i >= 0 && j >= 0 && i < n && j < n && self.cells[(j * n + i) as usize]
        };
        // Edge ids: horizontal edge from center (i, j) to (i+1, j) is (i, j, 0);
        // vertical edge from (i, j) to (i, j+1) is (i, j, 1).
        type Edge = (isize, isize, u8);
        let mut links: HashMap<Edge, Vec<Edge>> = HashMap::new();
        let mut connect = |a: Edge, b: Edge| {
            links.entry(a).or_default().push(b);
            links.entry(b).or_default().push(a);
        };
        for j in -1..n {
            for i in -1..n {
                let bl = occ(i, j);
                let br = occ(i + 1, j);
                let tr = occ(i + 1, j + 1);
                let tl = occ(i, j + 1);
                let case = (bl as u8) | (br as u8) << 1 | (tr as u8) << 2 | (tl as u8) << 3;
                let bottom = (i, j, 0);
                let top = (i, j + 1, 0);
                let left = (i, j, 1);
                let right = (i + 1, j, 1);
                match case {
                    0 | 15 => {}
                    1 | 14 => connect(left, bottom),
                    2 | 13 => connect(bottom, right),
                    3 | 12 => connect(left, right),
                    4 | 11 => connect(right, top),
                    6 | 9 => connect(bottom, top),
                    7 | 8 => connect(left, top),
                    // Saddles: keep diagonal occupied cells connected.
                    5 => {
                        connect(left, top);
                        connect(bottom, right);
                    }
                    10 => {
                        connect(left, bottom);
                        connect(right, top);
                    }
                    _ => unreachable!(),
                }
            }
        }
        let point = |e: Edge| -> [f64; 2] {
            let h = self.cell_width();
            let x = -1.0 + (e.0 as f64 + 0.5) * h;
            let y = -1.0 + (e.1 as f64 + 0.5) * h;
            if e.2 == 0 {
                [x + 0.5 * h, y]
            } else {
                [x, y + 0.5 * h]
            }
        };
        let mut keys: Vec<Edge> = links.keys().copied().collect();
        keys.sort_unstable_by_key(|e| (e.1, e.0, e.2));
        let mut visited: HashMap<Edge, bool> = HashMap::new();
        let mut loops = Vec::new();
        for start in keys {
            if visited.contains_key(&start) {
                continue;
            }
            let mut poly = vec![point(start)];
            visited.insert(start, true);
            let mut prev = start;
            let mut cur = links[&start][0];
            while cur != start {
                visited.insert(cur, true);
                poly.push(point(cur));
                let next = links[&cur]
                    .iter()
                    .copied()
                    .find(|e| *e != prev)
                    .unwrap_or(start);
                prev = cur;
                cur = next;
            }
            poly.push(point(start));
            loops.push(poly);
        }
        loops
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_and_mirror() {
        let mut r = Raster::new(8);
        assert_eq!(r.center(0), -0.875);
        assert_eq!(r.index_of(1.0), 7);
        assert_eq!(r.index_of(-1.0), 0);
        r.mark_point(0.1, 0.6);
        let m = r.mirrored();
        assert!(m.get(r.index_of(0.1), r.index_of(-0.6)));
        assert_eq!(m.mirrored(), r);
    }

    #[test]
    fn single_cell_boundary_is_a_diamond() {
        let mut r = Raster::new(4);
        r.set(1, 1);
        let b = r.boundary();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].len(), 5);
        assert_eq!(b[0].first(), b[0].last());
    }

    #[test]
    fn hole_filling_respects_size_and_border() {
        let mut r = Raster::new(6);
        for k in 0..6 {
            r.set(k, 2);
            r.set(k, 4);
        }
        r.set(0, 3);
        r.set(5, 3);
        r.fill_small_holes(3);
        assert!(!r.get(2, 3));
        r.fill_small_holes(4);
        assert!(r.get(2, 3));
        assert!(!r.get(2, 0));
    }

    #[test]
    fn triangle_fill_uses_centers() {
        let mut r = Raster::new(10);
        r.fill_triangle([-1.0, -1.0], [1.01, -1.0], [-1.0, 1.01]);
        assert!(r.get(0, 0) && r.get(9, 0) && !r.get(9, 9));
        assert_eq!(r.count(), 55);
    }
}
