use super::{Graph, LinkId};
use crate::geometry::Vec2;

const CELL: f64 = 0.1;

/// Uniform bucket grid over link bounding boxes.
#[derive(Clone, Debug, Default)]
pub(crate) struct LinkGrid {
    cols: usize,
    rows: usize,
    cells: Vec<Vec<LinkId>>,
}

impl LinkGrid {
    pub(crate) fn build(g: &Graph) -> LinkGrid {
        let ext = g.extent();
        let cols = ((ext.w / CELL).ceil() as usize).max(1);
        let rows = ((ext.h / CELL).ceil() as usize).max(1);
        let mut grid = LinkGrid { cols, rows, cells: vec![Vec::new(); cols * rows] };
        for l in g.links() {
            let (a, b) = g.endpoints(l.id);
            let (c0, r0) = grid.cell_of(Vec2::new(a.x.min(b.x), a.y.min(b.y)));
            let (c1, r1) = grid.cell_of(Vec2::new(a.x.max(b.x), a.y.max(b.y)));
            for r in r0..=r1 {
                for c in c0..=c1 {
                    grid.cells[r * cols + c].push(l.id);
                }
            }
        }
        grid
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let c = ((p.x / CELL).floor().max(0.0) as usize).min(self.cols - 1);
        let r = ((p.y / CELL).floor().max(0.0) as usize).min(self.rows - 1);
        (c, r)
    }

    /// Links whose bounding box cell range overlaps the query square, sorted.
    pub(crate) fn candidates(&self, p: Vec2, r: f64) -> Vec<LinkId> {
        if self.cells.is_empty() {
            return Vec::new();
        }
        let (c0, r0) = self.cell_of(Vec2::new(p.x - r, p.y - r));
        let (c1, r1) = self.cell_of(Vec2::new(p.x + r, p.y + r));
        let mut out = Vec::new();
        for row in r0..=r1 {
            for col in c0..=c1 {
                out.extend_from_slice(&self.cells[row * self.cols + col]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
