//! Barnes-Hut quadtree over weighted points.

use crate::layout::{Layout, Point};

/// Subdivision stops here even if distinct points still share a cell.
const MAX_DEPTH: usize = 48;

#[derive(Debug, Clone)]
pub struct Cell {
    /// Lower-left corner of the square cell.
    pub origin: Point,
    pub side: f64,
    pub mass: f64,
    pub centroid: Point,
    /// Indices into [`QuadTree::cells`], `None` for empty quadrants.
    pub children: [Option<usize>; 4],
    /// Vertices stored in a leaf; empty for internal cells.
    pub members: Vec<usize>,
}

impl Cell {
    pub fn is_leaf(&self) -> bool {
        self.children.iter().all(Option::is_none)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.origin.x
            && p.x <= self.origin.x + self.side
            && p.y >= self.origin.y
            && p.y <= self.origin.y + self.side
    }
}

#[derive(Debug, Clone)]
pub struct QuadTree {
    cells: Vec<Cell>,
}

impl QuadTree {
    pub fn root(&self) -> Option<&Cell> {
        self.cells.first()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &Cell {
        &self.cells[index]
    }

    /// Index of the leaf whose member list contains `v`.
    pub fn leaf_of(&self, v: usize, at: Point) -> Option<usize> {
        let mut idx = 0;
        let mut cell = self.cells.first()?;
        loop {
            if cell.is_leaf() {
                return cell.members.contains(&v).then_some(idx);
            }
            let next = cell
                .children
                .iter()
                .flatten()
                .copied()
                .find(|&c| self.cells[c].contains(at) && self.subtree_has(c, v))?;
            idx = next;
            cell = &self.cells[idx];
        }
    }

    fn subtree_has(&self, index: usize, v: usize) -> bool {
        let cell = &self.cells[index];
        if cell.is_leaf() {
            cell.members.contains(&v)
        } else {
            cell.children
                .iter()
                .flatten()
                .any(|&c| self.subtree_has(c, v))
        }
    }

    /// Approximate FR repulsion on a point at `at` with weight `weight`:
    /// `Σ_j weight·w_j·k²/d_j` along `at − x_j`.
    ///
    /// A cell of side `s` whose centroid is at distance `d` is used as a
    /// single mass when `s/d < theta` and `at` lies outside it. Vertex `skip`
    /// is excluded from leaf sums.
    pub fn repulsion(
        &self,
        positions: &[Point],
        masses: &[f64],
        at: Point,
        skip: usize,
        weight: f64,
        k: f64,
        theta: f64,
    ) -> Point {
        let k2 = k * k;
        let mut force = Point::ZERO;
        let mut stack = Vec::with_capacity(64);
        if !self.cells.is_empty() {
            stack.push(0);
        }
        while let Some(i) = stack.pop() {
            let cell = &self.cells[i];
            if cell.is_leaf() {
                for &j in &cell.members {
                    if j == skip {
                        continue;
                    }
                    let delta = at - positions[j];
                    let d2 = delta.norm_sq();
                    if d2 > 0.0 {
                        force += delta * (weight * masses[j] * k2 / d2);
                    }
                }
                continue;
            }
            let delta = at - cell.centroid;
            let d2 = delta.norm_sq();
            if cell.side * cell.side < theta * theta * d2 && !cell.contains(at) {
                force += delta * (weight * cell.mass * k2 / d2);
            } else {
                // Reverse push keeps children visited in quadrant order.
                for c in cell.children.iter().rev().flatten() {
                    stack.push(*c);
                }
            }
        }
        force
    }
}

/// Builds the tree over all vertices of `layout` with the given masses.
///
/// Leaves hold a single vertex, or several vertices at an identical position
/// (their masses are summed in the leaf).
pub fn build_quadtree(layout: &Layout, masses: &[f64]) -> QuadTree {
    assert_eq!(layout.len(), masses.len(), "one mass per vertex");
    let mut tree = QuadTree { cells: Vec::new() };
    let Some((lo, hi)) = layout.bounds() else {
        return tree;
    };
    let side = (hi.x - lo.x).max(hi.y - lo.y);
    let side = if side > 0.0 { side } else { 1.0 };
    let members: Vec<usize> = (0..layout.len()).collect();
    build_cell(
        &mut tree.cells,
        &layout.points,
        masses,
        members,
        lo,
        side,
        0,
    );
    tree
}

fn build_cell(
    cells: &mut Vec<Cell>,
    pos: &[Point],
    masses: &[f64],
    members: Vec<usize>,
    origin: Point,
    side: f64,
    depth: usize,
) -> usize {
    let index = cells.len();
    let mass: f64 = members.iter().map(|&i| masses[i]).sum();
    let mut centroid = Point::ZERO;
    for &i in &members {
        centroid += pos[i] * masses[i];
    }
    let centroid = if mass > 0.0 {
        centroid * (1.0 / mass)
    } else {
        pos[members[0]]
    };
    cells.push(Cell {
        origin,
        side,
        mass,
        centroid,
        children: [None; 4],
        members: Vec::new(),
    });

    let first = pos[members[0]];
    let all_same = members.iter().all(|&i| pos[i] == first);
    if members.len() == 1 || all_same || depth >= MAX_DEPTH {
        cells[index].members = members;
        return index;
    }

    let half = side / 2.0;
    let mid = Point::new(origin.x + half, origin.y + half);
    let mut quads: [Vec<usize>; 4] = Default::default();
    for i in members {
        let q = usize::from(pos[i].x >= mid.x) + 2 * usize::from(pos[i].y >= mid.y);
        quads[q].push(i);
    }
    let mut children = [None; 4];
    for (q, list) in quads.into_iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        let child_origin = Point::new(
            if q & 1 == 1 { mid.x } else { origin.x },
            if q & 2 == 2 { mid.y } else { origin.y },
        );
        children[q] = Some(build_cell(
            cells,
            pos,
            masses,
            list,
            child_origin,
            half,
            depth + 1,
        ));
    }
    cells[index].children = children;
    index
}
