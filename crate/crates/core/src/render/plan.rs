//! Building drawings step by step: initial layout, arrivals and reroutes.
//!
//! New links are routed against a target map made of the certificate
//! embedding plus temporary tethers. Tethers attach every loose piece of a
//! face (hole components, isolated vertices, free points, the box corner) to
//! one corner of the face it must end up in. Links are inserted tree links
//! first, so every later link splits a face whose sides are fixed by the
//! rotations alone.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::canvas::{Canvas, LinkKey, Rotation, B};
use super::RenderError;
use crate::embedding::{walk_darts, Embedding, Face};
use crate::solver::Reroute;
use crate::story::Vertex;
use crate::weighted::WeightedEmbedding;

enum Item {
    Walk(Vec<Vertex>),
    Isolated(Vertex),
    Free(usize),
    Infinity,
}

type Link = (LinkKey, usize, usize);

fn base_rotation(c: &Canvas, e: &Embedding) -> Rotation {
    e.rotations()
        .iter()
        .filter(|(v, _)| c.site_of.contains_key(v))
        .map(|(v, r)| (c.site(*v), r.iter().map(|&u| LinkKey::edge(*v, u)).collect()))
        .collect()
}

fn insert_before(rot: &mut Rotation, node: usize, before: Option<LinkKey>, key: LinkKey) {
    let r = rot.entry(node).or_default();
    match before.and_then(|b| r.iter().position(|&k| k == b)) {
        Some(p) => r.insert(p, key),
        None => r.push(key),
    }
}

/// Adds a star of tethers from the corner `anchor` (node, link it precedes).
fn tether(c: &mut Canvas, rot: &mut Rotation, anchor: (usize, LinkKey), items: Vec<Item>, out: &mut Vec<Link>) {
    for item in items {
        let (node, before) = match item {
            Item::Walk(w) => (c.site(w[1]), Some(LinkKey::edge(w[0], w[1]))),
            Item::Isolated(v) => (c.site(v), None),
            Item::Free(s) => (s, None),
            Item::Infinity => (B, None),
        };
        let key = c.new_tether();
        insert_before(rot, anchor.0, Some(anchor.1), key);
        insert_before(rot, node, before, key);
        out.push((key, anchor.0, node));
    }
}

fn route_all(c: &mut Canvas, links: &[Link], rot: &Rotation) -> Result<(), RenderError> {
    for &(key, x, y) in links {
        c.route(key, x, y, rot)?;
    }
    Ok(())
}

fn drop_tethers(c: &mut Canvas, links: &[Link]) {
    for &(key, _, _) in links {
        if matches!(key, LinkKey::Tether(_)) {
            c.delete(key);
        }
    }
}

fn canonical_walk(w: &[Vertex]) -> Vec<Vertex> {
    Face { walks: vec![w.to_vec()], isolated: Vec::new() }.canonical().walks.remove(0)
}

/// Draws the first window: vertices on the leading points in label order,
/// remaining points free, all placed per the face weights.
pub(crate) fn initial_layout(c: &mut Canvas, w: &WeightedEmbedding) -> Result<(), RenderError> {
    let e = &w.embedding;
    let sites = c.sites.clone();
    for (v, &s) in e.vertices().zip(&sites) {
        c.place(v, s);
    }
    let mut spare: VecDeque<usize> = sites[e.vertex_count()..].iter().copied().collect();
    let mut rot = base_rotation(c, e);
    let mut links: Vec<Link> = e.edges().into_iter().map(|(a, b)| (LinkKey::edge(a, b), c.site(a), c.site(b))).collect();
    for (fi, face) in e.faces().iter().enumerate() {
        let Some(principal) = face.walks.first() else { continue };
        let mut items: Vec<Item> = face.walks[1..].iter().cloned().map(Item::Walk).collect();
        items.extend(face.isolated.iter().map(|&v| Item::Isolated(v)));
        for _ in 0..w.weights[fi] {
            items.push(Item::Free(spare.pop_front().ok_or(RenderError::Weights)?));
        }
        if fi == e.outer() {
            items.push(Item::Infinity);
        }
        let anchor = (c.site(principal[1]), LinkKey::edge(principal[0], principal[1]));
        tether(c, &mut rot, anchor, items, &mut links);
    }
    let ordered = tree_first(&links, B);
    route_all(c, &ordered, &rot)?;
    drop_tethers(c, &links);
    Ok(())
}

/// Links reordered so a breadth-first spanning tree from `root` comes first.
fn tree_first(links: &[Link], root: usize) -> Vec<Link> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(_, x, y)) in links.iter().enumerate() {
        adj.entry(x).or_default().push(i);
        adj.entry(y).or_default().push(i);
    }
    let mut seen = BTreeSet::from([root]);
    let mut used = vec![false; links.len()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &i in adj.get(&x).into_iter().flatten() {
            let (_, a, b) = links[i];
            let y = if a == x { b } else { a };
            if seen.insert(y) {
                used[i] = true;
                order.push(links[i]);
                queue.push_back(y);
            }
        }
    }
    order.extend(links.iter().zip(&used).filter(|(_, &u)| !u).map(|(l, _)| *l));
    order
}

/// Region of face `fi` of `e` in the current drawing.
fn face_region(c: &Canvas, reg: &super::canvas::Regions, e: &Embedding, fi: usize, fallback: usize) -> u32 {
    let face = &e.faces()[fi];
    if let Some(w) = face.walks.first() {
        c.left_region(reg, w[0], w[1])
    } else if let Some(&v) = face.isolated.first() {
        c.point_region(reg, c.site(v))
    } else {
        c.point_region(reg, fallback)
    }
}

/// Moves the free point at `p` across the logged edge by redrawing it.
fn reroute(c: &mut Canvas, common: &Embedding, r: &Reroute, p: usize) -> Result<(), RenderError> {
    let [x, y] = r.edge;
    let (a, b) = if common.face_of_dart((x, y)) == Some(r.from_face) { (x, y) } else { (y, x) };
    if common.face_of_dart((a, b)) != Some(r.from_face) || common.face_of_dart((b, a)) != Some(r.to_face) {
        return Err(RenderError::Certificate(format!("reroute edge {a}-{b} does not separate the logged faces")));
    }
    let reg = c.regions();
    let (rf, rg) = (c.left_region(&reg, a, b), c.left_region(&reg, b, a));
    let key = LinkKey::edge(a, b);
    let mut rot = base_rotation(c, common);
    let mut links = Vec::new();
    for (fi, dart, anchor, region) in [(r.from_face, (a, b), b, rf), (r.to_face, (b, a), a, rg)] {
        let face = &common.faces()[fi];
        let mut items: Vec<Item> = face
            .walks
            .iter()
            .filter(|w| !walk_darts(w).any(|d| d == dart))
            .cloned()
            .map(Item::Walk)
            .collect();
        items.extend(face.isolated.iter().map(|&v| Item::Isolated(v)));
        for &s in &c.free {
            let here = c.point_region(&reg, s) == region;
            if (s == p && fi == r.to_face) || (s != p && here) {
                items.push(Item::Free(s));
            }
        }
        if fi == common.outer() {
            items.push(Item::Infinity);
        }
        tether(c, &mut rot, (c.site(anchor), key), items, &mut links);
    }
    c.delete(key);
    route_all(c, &links, &rot)?;
    c.route(key, c.site(a), c.site(b), &rot)?;
    drop_tethers(c, &links);
    Ok(())
}

/// Advances the drawing from window `i-1` to window `i`.
pub(crate) fn insert_step(
    c: &mut Canvas,
    next: &WeightedEmbedding,
    v_out: Option<Vertex>,
    v_in: Vertex,
    log: Option<&Reroute>,
) -> Result<(), RenderError> {
    let freed = v_out.map(|v| c.remove_vertex(v));
    let rm = next.embedding.remove_vertex(v_in).map_err(|e| RenderError::Certificate(e.to_string()))?;
    let (common, f) = (rm.embedding, rm.merged);
    if let Some(r) = log {
        let p = freed.ok_or_else(|| RenderError::Certificate("reroute without a departing vertex".into()))?;
        reroute(c, &common, r, p)?;
    }
    let reg = c.regions();
    let any = *c.free.first().ok_or(RenderError::Weights)?;
    let region = face_region(c, &reg, &common, f, any);
    let p = match freed.filter(|&s| c.point_region(&reg, s) == region) {
        Some(s) => s,
        None => c.free.iter().copied().find(|&s| c.point_region(&reg, s) == region).ok_or(RenderError::Weights)?,
    };
    c.place(v_in, p);
    let e = &next.embedding;
    let nbrs: Vec<Vertex> = e.rotation(v_in).unwrap_or(&[]).to_vec();
    if nbrs.is_empty() {
        return Ok(());
    }
    let face = &common.faces()[f];
    // Component of the face boundary holding each neighbour.
    let mut comp: HashMap<Vertex, usize> = HashMap::new();
    let mut items = Vec::new();
    for (wi, w) in face.walks.iter().enumerate() {
        if w.iter().any(|u| nbrs.contains(u)) {
            comp.extend(w.iter().map(|&u| (u, wi)));
        } else {
            items.push((Item::Walk(w.clone()), walk_face(e, w)?));
        }
    }
    for (ii, &u) in face.isolated.iter().enumerate() {
        if nbrs.contains(&u) {
            comp.insert(u, face.walks.len() + ii);
        } else {
            items.push((Item::Isolated(u), e.face_of_isolated(u).ok_or(RenderError::Weights)?));
        }
    }
    if f == common.outer() {
        items.push((Item::Infinity, e.outer()));
    }
    let mut spare: VecDeque<usize> = c.free.iter().copied().filter(|&s| c.point_region(&reg, s) == region).collect();
    let faces = e.faces_at(v_in);
    for &g in &faces {
        for _ in 0..next.weights[g] {
            items.push((Item::Free(spare.pop_front().ok_or(RenderError::Weights)?), g));
        }
    }
    if !spare.is_empty() {
        return Err(RenderError::Weights);
    }
    let mut rot = base_rotation(c, e);
    let mut links = Vec::new();
    for &g in &faces {
        let u = *nbrs.iter().filter(|&&u| e.face_of_dart((v_in, u)) == Some(g)).min().expect("dart in face");
        let (mine, keep): (Vec<_>, Vec<_>) = std::mem::take(&mut items).into_iter().partition(|(_, h)| *h == g);
        items = keep;
        let mine = mine.into_iter().map(|(item, _)| item).collect();
        tether(c, &mut rot, (c.site(u), LinkKey::edge(u, v_in)), mine, &mut links);
    }
    let mut seen = BTreeSet::new();
    let (tree, rest): (Vec<Vertex>, Vec<Vertex>) = nbrs.iter().partition(|u| seen.insert(comp[u]));
    for u in tree.into_iter().chain(rest) {
        links.push((LinkKey::edge(u, v_in), p, c.site(u)));
    }
    route_all(c, &links, &rot)?;
    drop_tethers(c, &links);
    Ok(())
}

/// Face of `e` whose walks include `w` up to rotation.
fn walk_face(e: &Embedding, w: &[Vertex]) -> Result<usize, RenderError> {
    let target = canonical_walk(w);
    e.faces()
        .iter()
        .position(|f| f.walks.iter().any(|x| canonical_walk(x) == target))
        .ok_or_else(|| RenderError::Certificate("hole component changed between windows".into()))
}
