//! Incremental triangulation of a box with constrained segments.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::geom::{on_segment, orient, strictly_inside, Pt};

/// Link id used for the bounding box sides.
pub const BORDER: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Loc {
    Vertex(usize),
    Edge(usize, usize),
    Face(usize),
    Outside,
}

#[derive(Debug, Clone)]
pub struct Tri {
    pub pts: Vec<Pt>,
    tris: Vec<Option<[usize; 3]>>,
    edge_tri: HashMap<(usize, usize), usize>,
    at: Vec<BTreeSet<usize>>,
    cadj: Vec<BTreeMap<usize, u32>>,
}

impl Tri {
    /// Box with corners `lo` and `hi`; corner indices are 0..4 counter-clockwise
    /// from `lo`.
    pub fn new_box(lo: &Pt, hi: &Pt) -> Self {
        let mut t = Tri { pts: Vec::new(), tris: Vec::new(), edge_tri: HashMap::new(), at: Vec::new(), cadj: Vec::new() };
        for p in [Pt::new(lo.x.clone(), lo.y.clone()), Pt::new(hi.x.clone(), lo.y.clone()), Pt::new(hi.x.clone(), hi.y.clone()), Pt::new(lo.x.clone(), hi.y.clone())] {
            t.push_point(p);
        }
        t.add([0, 1, 2]);
        t.add([0, 2, 3]);
        for i in 0..4 {
            t.constrain(i, (i + 1) % 4, BORDER);
        }
        t
    }

    fn push_point(&mut self, p: Pt) -> usize {
        self.pts.push(p);
        self.at.push(BTreeSet::new());
        self.cadj.push(BTreeMap::new());
        self.pts.len() - 1
    }

    fn add(&mut self, mut t: [usize; 3]) -> usize {
        if orient(&self.pts[t[0]], &self.pts[t[1]], &self.pts[t[2]]) == Ordering::Less {
            t.swap(1, 2);
        }
        debug_assert_eq!(orient(&self.pts[t[0]], &self.pts[t[1]], &self.pts[t[2]]), Ordering::Greater);
        let id = self.tris.len();
        self.tris.push(Some(t));
        for k in 0..3 {
            self.edge_tri.insert((t[k], t[(k + 1) % 3]), id);
            self.at[t[k]].insert(id);
        }
        id
    }

    fn remove(&mut self, id: usize) -> [usize; 3] {
        let t = self.tris[id].take().expect("live triangle");
        for k in 0..3 {
            self.edge_tri.remove(&(t[k], t[(k + 1) % 3]));
            self.at[t[k]].remove(&id);
        }
        t
    }

    pub fn tri(&self, id: usize) -> [usize; 3] {
        self.tris[id].expect("live triangle")
    }

    pub fn live(&self) -> impl Iterator<Item = (usize, [usize; 3])> + '_ {
        self.tris.iter().enumerate().filter_map(|(i, t)| t.map(|t| (i, t)))
    }

    pub fn triangles_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.at[v].iter().copied()
    }

    /// Triangle lying to the left of the directed edge `a -> b`.
    pub fn left(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_tri.get(&(a, b)).copied()
    }

    /// Number of triangle slots, live or dead.
    pub fn slots(&self) -> usize {
        self.tris.len()
    }

    /// Triangle on the other side of edge `a -> b` of a triangle containing it ccw.
    pub fn across(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_tri.get(&(b, a)).copied()
    }

    pub fn locate(&self, p: &Pt) -> Loc {
        if let Some(i) = self.pts.iter().position(|q| q == p) {
            return Loc::Vertex(i);
        }
        for (id, t) in self.live() {
            let [a, b, c] = t.map(|i| &self.pts[i]);
            if strictly_inside(a, b, c, p) {
                return Loc::Face(id);
            }
            for k in 0..3 {
                let (x, y) = (t[k], t[(k + 1) % 3]);
                if on_segment(&self.pts[x], &self.pts[y], p) {
                    return Loc::Edge(x, y);
                }
            }
        }
        Loc::Outside
    }

    /// Inserts a point strictly inside the box; returns `None` when it
    /// coincides with a vertex or lies outside.
    pub fn insert(&mut self, p: Pt) -> Option<usize> {
        match self.locate(&p) {
            Loc::Face(t) => Some(self.split_triangle(t, p)),
            Loc::Edge(a, b) if self.constraint(a, b) != Some(BORDER) => Some(self.split_edge(a, b, p)),
            _ => None,
        }
    }

    pub fn split_triangle(&mut self, id: usize, p: Pt) -> usize {
        let [a, b, c] = self.remove(id);
        let v = self.push_point(p);
        self.add([a, b, v]);
        self.add([b, c, v]);
        self.add([c, a, v]);
        v
    }

    /// Splits edge `ab` at `p`, carrying any constraint to both halves.
    pub fn split_edge(&mut self, a: usize, b: usize, p: Pt) -> usize {
        let link = self.unconstrain(a, b);
        let sides: Vec<usize> = [self.edge_tri.get(&(a, b)), self.edge_tri.get(&(b, a))].into_iter().flatten().copied().collect();
        let v = self.push_point(p);
        for id in sides {
            let t = self.remove(id);
            let k = (0..3).find(|&k| !(t[k] == a || t[k] == b)).expect("apex");
            let (x, y, c) = (t[(k + 1) % 3], t[(k + 2) % 3], t[k]);
            self.add([x, v, c]);
            self.add([v, y, c]);
        }
        if let Some(l) = link {
            self.constrain(a, v, l);
            self.constrain(v, b, l);
        }
        v
    }

    pub fn constrain(&mut self, a: usize, b: usize, link: u32) {
        self.cadj[a].insert(b, link);
        self.cadj[b].insert(a, link);
    }

    pub fn unconstrain(&mut self, a: usize, b: usize) -> Option<u32> {
        self.cadj[b].remove(&a);
        self.cadj[a].remove(&b)
    }

    pub fn constraint(&self, a: usize, b: usize) -> Option<u32> {
        self.cadj[a].get(&b).copied()
    }

    /// Constrained neighbours of `v` with their link ids.
    pub fn constrained_at(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.cadj[v].iter().map(|(&u, &l)| (u, l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inserts_and_splits() {
        let mut t = Tri::new_box(&Pt::int(0, 0), &Pt::int(10, 10));
        assert_eq!(t.live().count(), 2);
        let c = t.insert(Pt::int(5, 5)).unwrap();
        // (5,5) lies on the diagonal, so both triangles split.
        assert_eq!(t.live().count(), 4);
        assert_eq!(t.triangles_at(c).count(), 4);
        t.insert(Pt::int(2, 1)).unwrap();
        assert_eq!(t.live().count(), 6);
        assert!(t.insert(Pt::int(2, 1)).is_none());
        assert!(t.insert(Pt::int(0, 5)).is_none());
        assert!(t.insert(Pt::int(20, 5)).is_none());
        t.constrain(0, c, 7);
        let m = t.split_edge(0, c, Pt::int(1, 1));
        assert_eq!(t.constraint(0, m), Some(7));
        assert_eq!(t.constraint(m, c), Some(7));
        assert_eq!(t.constraint(0, c), None);
    }

}
