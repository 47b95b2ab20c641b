//! Mutable drawing state: sites, polylines and face regions over a triangulation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::geom::{ccw_between, Pt, Q};
use super::tri::Tri;
use super::RenderError;
use crate::story::Vertex;

/// Box corner standing in for the point at infinity.
pub(crate) const B: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum LinkKey {
    Edge(Vertex, Vertex),
    Tether(u32),
}

impl LinkKey {
    pub fn edge(a: Vertex, b: Vertex) -> Self {
        LinkKey::Edge(a.min(b), a.max(b))
    }
}

/// Target cyclic order of links around each node (triangulation index).
pub(crate) type Rotation = HashMap<usize, Vec<LinkKey>>;

/// Angular range `(prev, next)` a new link must leave a node through.
type Sector = Option<(Pt, Pt)>;

#[derive(Debug, Clone)]
pub(crate) struct Canvas {
    pub tri: Tri,
    /// Triangulation index of every input point, in input order.
    pub sites: Vec<usize>,
    pub site_of: BTreeMap<Vertex, usize>,
    pub free: BTreeSet<usize>,
    polylines: Vec<Vec<usize>>,
    live: HashMap<LinkKey, u32>,
    next_tether: u32,
}

impl Canvas {
    pub fn new(points: &[Pt]) -> Result<Self, RenderError> {
        let (lo, hi) = bounding_box(points);
        let mut tri = Tri::new_box(&lo, &hi);
        let mut sites = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            sites.push(tri.insert(p.clone()).ok_or(RenderError::CoincidentPoints(i))?);
        }
        let free = sites.iter().copied().collect();
        Ok(Canvas {
            tri,
            sites,
            site_of: BTreeMap::new(),
            free,
            polylines: Vec::new(),
            live: HashMap::new(),
            next_tether: 0,
        })
    }

    pub fn place(&mut self, v: Vertex, site: usize) {
        self.free.remove(&site);
        self.site_of.insert(v, site);
    }

    pub fn site(&self, v: Vertex) -> usize {
        self.site_of[&v]
    }

    pub fn new_tether(&mut self) -> LinkKey {
        self.next_tether += 1;
        LinkKey::Tether(self.next_tether - 1)
    }

    pub fn drawn_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out: Vec<_> = self
            .live
            .keys()
            .filter_map(|k| match *k {
                LinkKey::Edge(a, b) => Some((a, b)),
                LinkKey::Tether(_) => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Polyline of a drawn edge, oriented from `a` to `b`.
    pub fn path(&self, a: Vertex, b: Vertex) -> Vec<usize> {
        let mut p = self.polylines[self.live[&LinkKey::edge(a, b)] as usize].clone();
        if p[0] != self.site(a) {
            p.reverse();
        }
        p
    }

    pub fn point(&self, i: usize) -> &Pt {
        &self.tri.pts[i]
    }

    pub fn delete(&mut self, key: LinkKey) {
        if let Some(id) = self.live.remove(&key) {
            for w in self.polylines[id as usize].windows(2) {
                self.tri.unconstrain(w[0], w[1]);
            }
        }
    }

    /// Deletes the edges of `v` and returns its site to the free pool.
    pub fn remove_vertex(&mut self, v: Vertex) -> usize {
        let keys: Vec<LinkKey> = self
            .live
            .keys()
            .filter(|k| matches!(**k, LinkKey::Edge(a, b) if a == v || b == v))
            .copied()
            .collect();
        for k in keys {
            self.delete(k);
        }
        let s = self.site_of.remove(&v).expect("placed vertex");
        self.free.insert(s);
        s
    }

    fn direction(&self, x: usize, key: LinkKey) -> Option<Pt> {
        let id = *self.live.get(&key)?;
        let (y, _) = self.tri.constrained_at(x).find(|&(_, l)| l == id)?;
        Some(self.tri.pts[y].sub(&self.tri.pts[x]))
    }

    fn sector(&self, x: usize, rot: &Rotation, key: LinkKey) -> Sector {
        let r = rot.get(&x)?;
        let pos = r.iter().position(|&k| k == key).expect("link in rotation");
        let n = r.len();
        let next = (1..n).find_map(|s| self.direction(x, r[(pos + s) % n]))?;
        let prev = (1..n).find_map(|s| self.direction(x, r[(pos + n - s) % n]))?;
        Some((prev, next))
    }

    fn in_sector(&self, x: usize, t: usize, sec: &Sector) -> bool {
        let Some((prev, next)) = sec else { return true };
        let [a, b, c] = self.tri.tri(t).map(|i| &self.tri.pts[i]);
        let d = Pt::centroid(a, b, c).sub(&self.tri.pts[x]);
        ccw_between(prev, &d, next)
    }

    /// Draws `key` from `x` to `y` inside the current face, leaving both
    /// endpoints at the positions `rot` prescribes among the drawn links.
    pub fn route(&mut self, key: LinkKey, x: usize, y: usize, rot: &Rotation) -> Result<(), RenderError> {
        let (sx, sy) = (self.sector(x, rot, key), self.sector(y, rot, key));
        let starts: Vec<usize> = self.tri.triangles_at(x).filter(|&t| self.in_sector(x, t, &sx)).collect();
        let ends: HashSet<usize> = self.tri.triangles_at(y).filter(|&t| self.in_sector(y, t, &sy)).collect();
        let path = if let Some(&t) = starts.iter().find(|t| ends.contains(t)) {
            let [a, b, c] = self.tri.tri(t).map(|i| &self.tri.pts[i]);
            let m = Pt::centroid(a, b, c);
            vec![x, self.tri.split_triangle(t, m), y]
        } else {
            let crossed = self.dual_path(x, y, &starts, &ends).ok_or(RenderError::NoRoute(format!("{key:?}")))?;
            let mut path = vec![x];
            for (a, b) in crossed {
                let m = self.tri.pts[a].midpoint(&self.tri.pts[b]);
                path.push(self.tri.split_edge(a, b, m));
            }
            path.push(y);
            path
        };
        let id = self.polylines.len() as u32;
        for w in path.windows(2) {
            self.tri.constrain(w[0], w[1], id);
        }
        self.polylines.push(path);
        self.live.insert(key, id);
        Ok(())
    }

    /// Edges crossed by a shortest dual walk that leaves a start triangle
    /// opposite `x` and enters an end triangle opposite `y`.
    fn dual_path(&self, x: usize, y: usize, starts: &[usize], ends: &HashSet<usize>) -> Option<Vec<(usize, usize)>> {
        let mut parent: HashMap<usize, (usize, (usize, usize))> = HashMap::new();
        let mut seen: HashSet<usize> = starts.iter().copied().collect();
        let mut queue: VecDeque<(usize, Vec<(usize, usize)>)> = starts
            .iter()
            .map(|&t| (t, vec![opposite(self.tri.tri(t), x)]))
            .collect();
        while let Some((t, exits)) = queue.pop_front() {
            for (a, b) in exits {
                if self.tri.constraint(a, b).is_some() {
                    continue;
                }
                let Some(next) = self.tri.across(a, b) else { continue };
                if ends.contains(&next) && a != y && b != y {
                    let mut out = vec![(a, b)];
                    let mut cur = t;
                    while let Some(&(p, e)) = parent.get(&cur) {
                        out.push(e);
                        cur = p;
                    }
                    out.reverse();
                    return Some(out);
                }
                if seen.insert(next) {
                    parent.insert(next, (t, (a, b)));
                    let v = self.tri.tri(next);
                    queue.push_back((next, (0..3).map(|k| (v[k], v[(k + 1) % 3])).collect()));
                }
            }
        }
        None
    }

    /// Region label of every live triangle; regions are the faces of the
    /// drawing formed by all constrained segments.
    pub fn regions(&self) -> Regions {
        let mut label = vec![u32::MAX; self.tri.slots()];
        let mut count = 0;
        for (t, _) in self.tri.live() {
            if label[t] != u32::MAX {
                continue;
            }
            label[t] = count;
            let mut stack = vec![t];
            while let Some(u) = stack.pop() {
                let v = self.tri.tri(u);
                for k in 0..3 {
                    let (a, b) = (v[k], v[(k + 1) % 3]);
                    if self.tri.constraint(a, b).is_some() {
                        continue;
                    }
                    if let Some(w) = self.tri.across(a, b) {
                        if label[w] == u32::MAX {
                            label[w] = count;
                            stack.push(w);
                        }
                    }
                }
            }
            count += 1;
        }
        Regions { label }
    }

    /// Region of the face to the left of dart `u -> v`.
    pub fn left_region(&self, reg: &Regions, u: Vertex, v: Vertex) -> u32 {
        let p = self.path(u, v);
        reg.label[self.tri.left(p[0], p[1]).expect("segment has a left triangle")]
    }

    /// Region around a node with no drawn links.
    pub fn point_region(&self, reg: &Regions, node: usize) -> u32 {
        reg.label[self.tri.triangles_at(node).next().expect("node has triangles")]
    }

    /// Ccw order of drawn graph edges around `v`, as neighbour vertices.
    pub fn geometric_rotation(&self, v: Vertex) -> Vec<Vertex> {
        let s = self.site(v);
        let mut nbrs: Vec<(Pt, Vertex)> = self
            .live.keys().filter_map(|k| match *k {
                LinkKey::Edge(a, b) if a == v => Some(b),
                LinkKey::Edge(a, b) if b == v => Some(a),
                _ => None,
            })
            .map(|u| (self.direction(s, LinkKey::edge(u, v)).expect("drawn"), u))
            .collect();
        nbrs.sort_by(|a, b| super::geom::angle_cmp(&a.0, &b.0));
        nbrs.into_iter().map(|(_, u)| u).collect()
    }
}

pub(crate) struct Regions {
    pub label: Vec<u32>,
}

fn opposite(t: [usize; 3], x: usize) -> (usize, usize) {
    let k = t.iter().position(|&v| v == x).expect("vertex of triangle");
    (t[(k + 1) % 3], t[(k + 2) % 3])
}

fn bounding_box(points: &[Pt]) -> (Pt, Pt) {
    let one = Q::from_integer(1.into());
    if points.is_empty() {
        return (Pt::int(-1, -1), Pt::int(1, 1));
    }
    let min = |f: fn(&Pt) -> &Q| points.iter().map(f).min().expect("nonempty").clone();
    let max = |f: fn(&Pt) -> &Q| points.iter().map(f).max().expect("nonempty").clone();
    let (x0, x1, y0, y1) = (min(|p| &p.x), max(|p| &p.x), min(|p| &p.y), max(|p| &p.y));
    let pad = (&x1 - &x0).max(&y1 - &y0).max(one.clone()) / Q::from_integer(4.into()) + one;
    (Pt::new(x0 - &pad, y0 - &pad), Pt::new(x1 + &pad, y1 + pad))
}
