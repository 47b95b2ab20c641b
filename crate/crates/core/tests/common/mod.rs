//! Independent oracles shared by the property and acceptance tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// Counts labeled plane embeddings by brute force over rotation systems.
///
/// A connected component contributes one option per (genus-zero rotation
/// system, outer face); isolated vertices contribute one option with no inner
/// face. Components are then nested: each picks the unbounded region or an
/// inner face of another component, without cycles.
pub fn count_plane_embeddings(vertices: &[u32], edges: &[(u32, u32)]) -> Option<u64> {
    let mut adj: BTreeMap<u32, Vec<u32>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(a, b) in edges {
        adj.get_mut(&a)?.push(b);
        adj.get_mut(&b)?.push(a);
    }
    let comps = components(&adj);
    // Per component: inner-face counts of each option.
    let mut options: Vec<Vec<usize>> = Vec::new();
    for c in &comps {
        if c.len() == 1 {
            options.push(vec![0]);
            continue;
        }
        let mut opts = Vec::new();
        for rot in rotation_systems(c, &adj) {
            let f = face_count(&rot);
            let e: usize = rot.values().map(Vec::len).sum::<usize>() / 2;
            if c.len() + f == e + 2 {
                opts.extend(std::iter::repeat_n(f - 1, f));
            }
        }
        if opts.is_empty() {
            return None;
        }
        options.push(opts);
    }
    let mut total = 0u64;
    let mut pick = vec![0usize; comps.len()];
    loop {
        let inner: Vec<usize> = pick.iter().zip(&options).map(|(&p, o)| o[p]).collect();
        total += nestings(&inner);
        let mut i = 0;
        while i < pick.len() {
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            return Some(total);
        }
    }
}

fn components(adj: &BTreeMap<u32, Vec<u32>>) -> Vec<Vec<u32>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &v in adj.keys() {
        if !seen.insert(v) {
            continue;
        }
        let mut comp = vec![v];
        let mut i = 0;
        while i < comp.len() {
            for &u in &adj[&comp[i]] {
                if seen.insert(u) {
                    comp.push(u);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

/// Every assignment of a cyclic neighbour order to each vertex.
fn rotation_systems(comp: &[u32], adj: &BTreeMap<u32, Vec<u32>>) -> Vec<BTreeMap<u32, Vec<u32>>> {
    let mut out = vec![BTreeMap::new()];
    for &v in comp {
        let cycles = cyclic_orders(&adj[&v]);
        out = out
            .into_iter()
            .flat_map(|m: BTreeMap<u32, Vec<u32>>| {
                cycles.iter().map(move |c| {
                    let mut m = m.clone();
                    m.insert(v, c.clone());
                    m
                })
            })
            .collect();
    }
    out
}

/// Permutations of `items` with the first element fixed.
fn cyclic_orders(items: &[u32]) -> Vec<Vec<u32>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    permute(&mut items[1..].to_vec(), 0, &mut |p| {
        let mut c = vec![items[0]];
        c.extend_from_slice(p);
        out.push(c);
    });
    out
}

fn permute(v: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Orbits of the face permutation `(u, v) -> (v, successor of u around v)`.
fn face_count(rot: &BTreeMap<u32, Vec<u32>>) -> usize {
    let mut seen = BTreeSet::new();
    let mut faces = 0;
    for (&u, nbrs) in rot {
        for &v in nbrs {
            if seen.contains(&(u, v)) {
                continue;
            }
            faces += 1;
            let (mut a, mut b) = (u, v);
            while seen.insert((a, b)) {
                let r = &rot[&b];
                let i = r.iter().position(|&x| x == a).unwrap();
                (a, b) = (b, r[(i + 1) % r.len()]);
            }
        }
    }
    faces
}

/// Acyclic parent choices: each component sits in the unbounded region or in
/// one of the inner faces of another component.
fn nestings(inner: &[usize]) -> u64 {
    let m = inner.len();
    let mut count = 0;
    // Choice per component: 0 = unbounded, otherwise an index into `slots`.
    let slots: Vec<usize> = (0..m).flat_map(|j| std::iter::repeat_n(j, inner[j])).collect();
    let mut choice = vec![0usize; m];
    loop {
        let parent: Vec<Option<usize>> = choice.iter().map(|&c| c.checked_sub(1).map(|s| slots[s])).collect();
        let acyclic = (0..m).all(|i| {
            let mut cur = parent[i];
            for _ in 0..m {
                match cur {
                    None => return true,
                    Some(j) if j == i => return false,
                    Some(j) => cur = parent[j],
                }
            }
            false
        });
        if acyclic {
            count += 1;
        }
        let mut i = 0;
        while i < m {
            choice[i] += 1;
            if choice[i] <= slots.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == m {
            return count;
        }
    }
}

/// All graphs on vertex set `1..=v` as edge lists.
pub fn all_graphs(v: u32) -> Vec<Vec<(u32, u32)>> {
    let pairs: Vec<(u32, u32)> = (1..=v).flat_map(|a| (a + 1..=v).map(move |b| (a, b))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect())
        .collect()
}
