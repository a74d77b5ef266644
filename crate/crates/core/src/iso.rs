//! Structure-preserving bijections between parks.
//!
//! A park is flattened into a vertex-labelled digraph whose relations carry
//! small integer colours: garden membership, alleys, edge ends, face
//! boundaries, the involution, partners and vertex pairs. Colour refinement
//! prunes candidates; backtracking finds a bijection; cyclic face boundaries
//! are checked on complete bijections.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::Result;
use crate::park::{Involution, Park, ParkIndex, Role};
use crate::permgroup::Color;

const IN_GARDEN: u8 = 0;
const ALLEY: u8 = 1;
const EDGE_START: u8 = 2;
const EDGE_END: u8 = 3;
const BOUNDARY: u8 = 4;
const INVOLUTION: u8 = 5;
const PARTNER: u8 = 6;
const PAIR: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Sort {
    Garden,
    Face,
    Edge,
    Vertex,
    Node,
}

/// A bijection between two parks, per sort of object.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParkMap {
    pub gardens: BTreeMap<String, String>,
    pub faces: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
    pub vertices: BTreeMap<String, String>,
    pub nodes: BTreeMap<String, String>,
    pub alleys: BTreeMap<String, String>,
    /// Corner label `k` of the first park goes to `k + rotation` (mod `s`),
    /// after reversing the cyclic order when `reflected`.
    pub rotation: usize,
    pub reflected: bool,
}

struct Graph {
    sorts: Vec<Sort>,
    ids: Vec<String>,
    labels: Vec<(Sort, usize, usize)>,
    rel: HashMap<(usize, usize), Vec<u8>>,
    out: Vec<Vec<usize>>,
    /// Face boundaries as element indices, in order.
    boundaries: Vec<(usize, Vec<usize>)>,
}

struct Options {
    swap_colors: bool,
    with_involution: bool,
    reflect: bool,
    corner_map: Box<dyn Fn(usize) -> usize>,
}

fn build(park: &Park, opts: &Options) -> Graph {
    let mut sorts = Vec::new();
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut index: HashMap<(Sort, &str), usize> = HashMap::new();
    let flip_color = |c: Color| if opts.swap_colors { c.opposite() } else { c };
    let flip_role = |r: Role| match (opts.swap_colors, r) {
        (false, r) => r,
        (true, Role::Entrance) => Role::Exit,
        (true, Role::Exit) => Role::Entrance,
    };
    let mut items: Vec<(Sort, &str, usize, usize)> = Vec::new();
    for g in &park.gardens {
        items.push((Sort::Garden, &g.id, g.kind as usize, 0));
        for f in &g.faces {
            items.push((Sort::Face, &f.id, flip_color(f.color) as usize, f.degree));
        }
        for e in &g.edges {
            items.push((Sort::Edge, &e.id, e.kind as usize, e.length));
        }
        for v in &g.vertices {
            items.push((Sort::Vertex, &v.id, (opts.corner_map)(v.corner), 0));
        }
    }
    for n in &park.nodes {
        items.push((Sort::Node, &n.id, flip_role(n.role) as usize, n.genus));
    }
    for (sort, id, a, b) in items {
        index.insert((sort, id), sorts.len());
        sorts.push(sort);
        ids.push(id.to_string());
        labels.push((sort, a, b));
    }

    let n = sorts.len();
    let mut rel: HashMap<(usize, usize), Vec<u8>> = HashMap::new();
    let mut link = |a: usize, b: usize, r: u8| rel.entry((a, b)).or_default().push(r);
    let mut boundaries = Vec::new();
    for g in &park.gardens {
        let gi = index[&(Sort::Garden, g.id.as_str())];
        if let Some(p) = &g.partner {
            link(gi, index[&(Sort::Garden, p.as_str())], PARTNER);
        }
        for f in &g.faces {
            let fi = index[&(Sort::Face, f.id.as_str())];
            link(fi, gi, IN_GARDEN);
            let mut seq = Vec::new();
            for e in &f.boundary {
                let ei = index[&(Sort::Edge, e.as_str())];
                link(fi, ei, BOUNDARY);
                seq.push(ei);
            }
            if opts.reflect {
                seq.reverse();
            }
            boundaries.push((fi, seq));
        }
        for e in &g.edges {
            let ei = index[&(Sort::Edge, e.id.as_str())];
            link(ei, gi, IN_GARDEN);
            if e.ends.len() == 2 {
                let (start, end) = if opts.reflect { (EDGE_END, EDGE_START) } else { (EDGE_START, EDGE_END) };
                link(ei, index[&(Sort::Vertex, e.ends[0].as_str())], start);
                link(ei, index[&(Sort::Vertex, e.ends[1].as_str())], end);
            }
        }
        for v in &g.vertices {
            let vi = index[&(Sort::Vertex, v.id.as_str())];
            link(vi, gi, IN_GARDEN);
            if let Some(p) = &v.pair {
                link(vi, index[&(Sort::Vertex, p.as_str())], PAIR);
            }
        }
    }
    for a in &park.alleys {
        link(
            index[&(Sort::Face, a.face.as_str())],
            index[&(Sort::Node, a.node.as_str())],
            ALLEY,
        );
    }
    if opts.with_involution {
        let inv = &park.involution;
        for (sort, map) in [
            (Sort::Garden, &inv.gardens),
            (Sort::Face, &inv.faces),
            (Sort::Edge, &inv.edges),
            (Sort::Vertex, &inv.vertices),
            (Sort::Node, &inv.nodes),
        ] {
            for (k, v) in map {
                if let (Some(&a), Some(&b)) = (index.get(&(sort, k.as_str())), index.get(&(sort, v.as_str()))) {
                    link(a, b, INVOLUTION);
                }
            }
        }
    }
    for v in rel.values_mut() {
        v.sort_unstable();
    }
    let mut out = vec![Vec::new(); n];
    for &(a, b) in rel.keys() {
        out[a].push(b);
        if a != b {
            out[b].push(a);
        }
    }
    for o in &mut out {
        o.sort_unstable();
        o.dedup();
    }
    Graph {
        sorts,
        ids,
        labels,
        rel,
        out,
        boundaries,
    }
}

/// Joint colour refinement of two graphs; returns the stable colours.
fn refine(g1: &Graph, g2: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut names: BTreeMap<(Sort, usize, usize), usize> = BTreeMap::new();
    for l in g1.labels.iter().chain(&g2.labels) {
        let next = names.len();
        names.entry(*l).or_insert(next);
    }
    let mut c1: Vec<usize> = g1.labels.iter().map(|l| names[l]).collect();
    let mut c2: Vec<usize> = g2.labels.iter().map(|l| names[l]).collect();
    let signature = |g: &Graph, colors: &[usize], a: usize| {
        let mut sig: Vec<(u8, bool, usize)> = Vec::new();
        for &b in &g.out[a] {
            if let Some(rs) = g.rel.get(&(a, b)) {
                sig.extend(rs.iter().map(|&r| (r, true, colors[b])));
            }
            if a != b {
                if let Some(rs) = g.rel.get(&(b, a)) {
                    sig.extend(rs.iter().map(|&r| (r, false, colors[b])));
                }
            }
        }
        sig.sort_unstable();
        (colors[a], sig)
    };
    let mut classes = 0;
    loop {
        let mut table: BTreeMap<(usize, Vec<(u8, bool, usize)>), usize> = BTreeMap::new();
        let s1: Vec<_> = (0..c1.len()).map(|a| signature(g1, &c1, a)).collect();
        let s2: Vec<_> = (0..c2.len()).map(|a| signature(g2, &c2, a)).collect();
        for s in s1.iter().chain(&s2) {
            let next = table.len();
            table.entry(s.clone()).or_insert(next);
        }
        c1 = s1.iter().map(|s| table[s]).collect();
        c2 = s2.iter().map(|s| table[s]).collect();
        if table.len() == classes {
            return (c1, c2);
        }
        classes = table.len();
    }
}

/// Backtracking over bijections `g1 -> g2` with equal refined colours,
/// calling `accept` on every complete structure-preserving bijection until
/// it returns true. With `involutive`, the bijection must be its own
/// inverse (both graphs must then share element indices).
fn search(g1: &Graph, g2: &Graph, involutive: bool, accept: &mut dyn FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    let n = g1.sorts.len();
    if n != g2.sorts.len() {
        return None;
    }
    let (c1, c2) = refine(g1, g2);
    let mut h1: Vec<usize> = c1.clone();
    let mut h2: Vec<usize> = c2.clone();
    h1.sort_unstable();
    h2.sort_unstable();
    if h1 != h2 {
        return None;
    }
    let mut class_size: HashMap<usize, usize> = HashMap::new();
    for &c in &c1 {
        *class_size.entry(c).or_default() += 1;
    }
    // order: grow from the smallest classes through neighbours
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let seed = (0..n)
            .filter(|&a| !placed[a])
            .min_by_key(|&a| (class_size[&c1[a]], a))
            .expect("unplaced element exists");
        placed[seed] = true;
        order.push(seed);
        let mut head = order.len() - 1;
        while head < order.len() {
            let a = order[head];
            head += 1;
            let mut nbrs: Vec<usize> = g1.out[a].iter().copied().filter(|&b| !placed[b]).collect();
            nbrs.sort_by_key(|&b| (class_size[&c1[b]], b));
            for b in nbrs {
                if !placed[b] {
                    placed[b] = true;
                    order.push(b);
                }
            }
        }
    }
    let mut candidates: HashMap<usize, Vec<usize>> = HashMap::new();
    for (b, &c) in c2.iter().enumerate() {
        candidates.entry(c).or_default().push(b);
    }

    struct State<'a> {
        g1: &'a Graph,
        g2: &'a Graph,
        map: Vec<usize>,
        used: Vec<bool>,
        mapped: Vec<usize>,
    }
    const FREE: usize = usize::MAX;

    fn consistent(st: &State, a: usize, b: usize) -> bool {
        let empty: Vec<u8> = Vec::new();
        let get = |g: &Graph, x: usize, y: usize| g.rel.get(&(x, y)).unwrap_or(&empty).clone();
        if get(st.g1, a, a) != get(st.g2, b, b) {
            return false;
        }
        for &k in &st.mapped {
            let mk = st.map[k];
            if get(st.g1, a, k) != get(st.g2, b, mk) || get(st.g1, k, a) != get(st.g2, mk, b) {
                return false;
            }
        }
        true
    }

    fn assign(st: &mut State, a: usize, b: usize) -> bool {
        if st.map[a] != FREE || st.used[b] || !consistent(st, a, b) {
            return false;
        }
        st.map[a] = b;
        st.used[b] = true;
        st.mapped.push(a);
        true
    }

    fn undo(st: &mut State, a: usize) {
        st.used[st.map[a]] = false;
        st.map[a] = FREE;
        st.mapped.pop();
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        st: &mut State,
        depth: usize,
        order: &[usize],
        c1: &[usize],
        candidates: &HashMap<usize, Vec<usize>>,
        involutive: bool,
        accept: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let mut depth = depth;
        while depth < order.len() && st.map[order[depth]] != FREE {
            depth += 1;
        }
        if depth == order.len() {
            return accept(&st.map);
        }
        let a = order[depth];
        for &b in &candidates[&c1[a]] {
            if !assign(st, a, b) {
                continue;
            }
            let mut paired = false;
            if involutive && a != b {
                if st.map[b] != FREE || !assign(st, b, a) {
                    undo(st, a);
                    continue;
                }
                paired = true;
            }
            if go(st, depth + 1, order, c1, candidates, involutive, accept) {
                return true;
            }
            if paired {
                undo(st, b);
            }
            undo(st, a);
        }
        false
    }

    let mut st = State {
        g1,
        g2,
        map: vec![FREE; n],
        used: vec![false; n],
        mapped: Vec::new(),
    };
    if go(&mut st, 0, &order, &c1, &candidates, involutive, accept) {
        Some(st.map)
    } else {
        None
    }
}

fn boundaries_agree(g1: &Graph, g2: &Graph, map: &[usize]) -> bool {
    let target: HashMap<usize, &Vec<usize>> = g2.boundaries.iter().map(|(f, s)| (*f, s)).collect();
    g1.boundaries.iter().all(|(f, seq)| {
        let image: Vec<usize> = seq.iter().map(|&e| map[e]).collect();
        target
            .get(&map[*f])
            .is_some_and(|t| crate::park::same_cycle(&image, t))
    })
}

fn to_park_map(g1: &Graph, g2: &Graph, map: &[usize], rotation: usize, reflected: bool) -> ParkMap {
    let mut out = ParkMap {
        rotation,
        reflected,
        ..ParkMap::default()
    };
    for (a, &b) in map.iter().enumerate() {
        let target = match g1.sorts[a] {
            Sort::Garden => &mut out.gardens,
            Sort::Face => &mut out.faces,
            Sort::Edge => &mut out.edges,
            Sort::Vertex => &mut out.vertices,
            Sort::Node => &mut out.nodes,
        };
        target.insert(g1.ids[a].clone(), g2.ids[b].clone());
    }
    out
}

/// Finds a bijection between two parks preserving every structure and the
/// involutions, with corner labels matched up to cyclic rotation (and
/// reversal when `allow_reflection`).
pub fn isomorphism(p1: &Park, p2: &Park, allow_reflection: bool) -> Result<Option<ParkMap>> {
    ParkIndex::build(p1)?;
    ParkIndex::build(p2)?;
    if p1.s != p2.s || p1.t != p2.t {
        return Ok(None);
    }
    let plain = Options {
        swap_colors: false,
        with_involution: true,
        reflect: false,
        corner_map: Box::new(|k| k),
    };
    let g2 = build(p2, &plain);
    let s = p1.s;
    let reflections: &[bool] = if allow_reflection { &[false, true] } else { &[false] };
    for &reflected in reflections {
        for rotation in 0..s.max(1) {
            let corner_map: Box<dyn Fn(usize) -> usize> = Box::new(move |k: usize| {
                if s == 0 {
                    return k;
                }
                let base = if reflected { (s - (k % s)) % s } else { k - 1 };
                (base + rotation) % s + 1
            });
            let opts = Options {
                swap_colors: false,
                with_involution: true,
                reflect: reflected,
                corner_map,
            };
            let g1 = build(p1, &opts);
            let mut check = |map: &[usize]| boundaries_agree(&g1, &g2, map);
            if let Some(map) = search(&g1, &g2, false, &mut check) {
                let mut pm = to_park_map(&g1, &g2, &map, rotation, reflected);
                let node_of: HashMap<(&str, &str), &str> = p2
                    .alleys
                    .iter()
                    .map(|a| ((a.face.as_str(), a.node.as_str()), a.id.as_str()))
                    .collect();
                for a in &p1.alleys {
                    let key = (pm.faces[&a.face].as_str(), pm.nodes[&a.node].as_str());
                    if let Some(id) = node_of.get(&key) {
                        pm.alleys.insert(a.id.clone(), id.to_string());
                    }
                }
                return Ok(Some(pm));
            }
        }
    }
    Ok(None)
}

/// Searches for a park involution of `park` ignoring the stored one: an
/// involutive bijection onto the colour-swapped park that keeps corner
/// labels and passes park validation.
pub fn find_involution(park: &Park) -> Result<Option<Involution>> {
    ParkIndex::build(park)?;
    let plain = Options {
        swap_colors: false,
        with_involution: false,
        reflect: false,
        corner_map: Box::new(|k| k),
    };
    let swapped = Options {
        swap_colors: true,
        with_involution: false,
        reflect: false,
        corner_map: Box::new(|k| k),
    };
    let g1 = build(park, &plain);
    let g2 = build(park, &swapped);
    let mut found: Option<Involution> = None;
    let mut accept = |map: &[usize]| {
        if !boundaries_agree(&g1, &g2, map) {
            return false;
        }
        let mut inv = Involution::default();
        for (a, &b) in map.iter().enumerate() {
            let target = match g1.sorts[a] {
                Sort::Garden => &mut inv.gardens,
                Sort::Face => &mut inv.faces,
                Sort::Edge => &mut inv.edges,
                Sort::Vertex => &mut inv.vertices,
                Sort::Node => &mut inv.nodes,
            };
            target.insert(g1.ids[a].clone(), g2.ids[b].clone());
        }
        let mut candidate = park.clone();
        candidate.involution = inv.clone();
        let ok = candidate
            .validate()
            .map(|r| !r.violates(crate::park::Clause::Involution))
            .unwrap_or(false);
        if ok {
            found = Some(inv);
        }
        ok
    };
    search(&g1, &g2, true, &mut accept);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::park::fixtures::*;

    #[test]
    fn parks_are_isomorphic_to_themselves() {
        for p in [example1(), simplest(), two_real()] {
            let w = isomorphism(&p, &p, false).unwrap().expect("self-isomorphic");
            assert_eq!(w.faces.len(), p.faces().count());
        }
    }

    #[test]
    fn relabeled_copy_is_isomorphic() {
        let p = two_real();
        let q = p.relabeled(|id| format!("z{id}"));
        let w = isomorphism(&p, &q, false).unwrap().unwrap();
        assert!(w.faces.values().all(|v| v.starts_with('z')));
    }

    #[test]
    fn different_corner_counts_are_not_isomorphic() {
        assert!(isomorphism(&two_real(), &simplest(), true).unwrap().is_none());
    }

    #[test]
    fn changed_length_breaks_isomorphism() {
        let p = simplest();
        let mut q = p.clone();
        q.gardens[0].edges[0].length += 1;
        assert!(isomorphism(&p, &q, false).unwrap().is_none());
    }

    #[test]
    fn example1_involution_is_found() {
        let p = example1();
        let inv = find_involution(&p).unwrap().expect("involution");
        assert_eq!(inv.nodes["N1"], "X1");
        assert_eq!(inv.nodes["N2"], "X2");
    }

    #[test]
    fn unequal_signatures_have_no_involution() {
        let mut p = simplest();
        for n in &mut p.nodes {
            if n.role == Role::Exit {
                n.genus = 1;
            }
        }
        assert!(find_involution(&p).unwrap().is_none());
    }
}
