use crate::geometry::{PixelRegion, MOORE_OFFSETS};

/// Closed outer boundary of a region as an 8-connected chain of pixel centres.
///
/// The last point adjoins the first. Pixels on one-pixel-wide spurs are visited
/// once per pass, so a point may occur more than once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contour {
    pub points: Vec<(usize, usize)>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|&(x, y)| (x as f64, y as f64))
            .collect()
    }
}

/// Occupancy grid of a region's bounding box, padded by one pixel on every side.
struct LocalGrid {
    x0: isize,
    y0: isize,
    w: isize,
    h: isize,
    cells: Vec<bool>,
}

impl LocalGrid {
    fn new(region: &PixelRegion) -> Self {
        let min_x = region.pixels.iter().map(|p| p.0).min().unwrap_or(0) as isize;
        let max_x = region.pixels.iter().map(|p| p.0).max().unwrap_or(0) as isize;
        let min_y = region.pixels.iter().map(|p| p.1).min().unwrap_or(0) as isize;
        let max_y = region.pixels.iter().map(|p| p.1).max().unwrap_or(0) as isize;
        let (x0, y0) = (min_x - 1, min_y - 1);
        let (w, h) = (max_x - min_x + 3, max_y - min_y + 3);
        let mut cells = vec![false; (w * h) as usize];
        for &(x, y) in &region.pixels {
            cells[((y as isize - y0) * w + (x as isize - x0)) as usize] = true;
        }
        LocalGrid {
            x0,
            y0,
            w,
            h,
            cells,
        }
    }

    fn contains(&self, x: isize, y: isize) -> bool {
        let (lx, ly) = (x - self.x0, y - self.y0);
        lx >= 0 && ly >= 0 && lx < self.w && ly < self.h && self.cells[(ly * self.w + lx) as usize]
    }
}

fn direction_of(from: (isize, isize), to: (isize, isize)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    MOORE_OFFSETS
        .iter()
        .position(|&o| o == d)
        .expect("backtrack pixel must be an 8-neighbour")
}

/// Moore-neighbour boundary following, clockwise from the first pixel in raster order.
///
/// Terminates when the start pixel is re-entered and the next step repeats the
/// first move.
pub fn trace_contour(region: &PixelRegion) -> Contour {
    let Some(&(sx, sy)) = region.pixels.first() else {
        return Contour { points: Vec::new() };
    };
    let grid = LocalGrid::new(region);
    let start = (sx as isize, sy as isize);

    // Clockwise scan around `p` beginning just after `backtrack`.
    let step = |p: (isize, isize),
                backtrack: (isize, isize)|
     -> Option<((isize, isize), (isize, isize))> {
        let d0 = direction_of(p, backtrack);
        let mut prev = backtrack;
        for k in 1..=8 {
            let (dx, dy) = MOORE_OFFSETS[(d0 + k) % 8];
            let c = (p.0 + dx, p.1 + dy);
            if grid.contains(c.0, c.1) {
                return Some((c, prev));
            }
            prev = c;
        }
        None
    };

    // Raster-first pixel: its west neighbour is background.
    let Some((second, mut backtrack)) = step(start, (start.0 - 1, start.1)) else {
        return Contour {
            points: vec![(sx, sy)],
        };
    };
    let mut points = vec![(sx, sy)];
    let mut current = second;
    let limit = 8 * region.area() + 16;
    while points.len() <= limit {
        points.push((current.0 as usize, current.1 as usize));
        let (next, bt) = step(current, backtrack).expect("connected pixel has a neighbour");
        if current == start && next == second {
            points.pop();
            break;
        }
        backtrack = bt;
        current = next;
    }
    Contour { points }
}
