//! Reading the park of a function off its monodromy.
//!
//! Faces are cycles of `e` (white cycles on white sheets, black on black),
//! entrances and exits are orbits of `<x_1..x_t>` on white and black sheets,
//! and gardens are orbits of `<e, c_1..c_{s+1}>`. The real locus of a garden
//! is cut into arc-lifts: over mirror arc `i` the sheets `w` and `c_i(w)` meet
//! along one lift, named `(i, w)` by its white sheet. Arc-lifts glue through
//! unbranched corners and across the seam `(s+1, w) ~ (1, e(w))` into edges.
//!
//! The real structure `T` (see [`MonodromyRep::real_structure`]) supplies the
//! park involution and decides which gardens are self-paired.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::iso;
use crate::monodromy::{GenericityMode, MonodromyRep};
use crate::park::{
    Alley, Edge, EdgeKind, EntranceSignature, Face, Garden, GardenKind, Involution, Node, Park, Role,
    Vertex,
};
use crate::permgroup::{orbits, Color, Permutation, UnionFind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedFace {
    pub id: String,
    pub color: Color,
    pub degree: usize,
    /// The `e`-cycle, starting at its smallest sheet.
    pub sheets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedNode {
    pub id: String,
    pub role: Role,
    pub sheets: Vec<usize>,
    pub faces: Vec<String>,
    pub signature: EntranceSignature,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Faces {
    pub white: Vec<ExtractedFace>,
    pub black: Vec<ExtractedFace>,
}

/// A lift of mirror arc `arc` (in `1..=s+1`) joining white sheet `white`
/// to `c_arc(white)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcLift {
    pub arc: usize,
    pub white: usize,
}

/// Everything read off one representation; ids follow sheet order, and the
/// black partner of `W<i>` under the real structure is `B<i>` (likewise
/// `N<i>`/`X<i>`).
struct Reader<'a> {
    m: &'a MonodromyRep,
    t: Permutation,
    white_faces: Vec<Vec<usize>>,
    black_faces: Vec<Vec<usize>>,
    face_of_sheet: Vec<String>,
}

impl<'a> Reader<'a> {
    fn new(m: &'a MonodromyRep) -> Result<Self> {
        let relations = m.validate_relations();
        if !relations.ok {
            return Err(Error::NonRealizable(relations.failures.join("; ")));
        }
        let generic = m.validate_genericity(GenericityMode::Geometric);
        if !generic.ok {
            let why: Vec<String> = generic.violations.iter().map(|v| format!("{}: {}", v.site, v.reason)).collect();
            return Err(Error::NonRealizable(why.join("; ")));
        }
        let t = m
            .canonical_real_structure()
            .ok_or_else(|| Error::NonRealizable("no real structure".into()))?;
        let ground = m.ground();
        let white_faces: Vec<Vec<usize>> = m.e().cycles(Some(&ground.whites().collect::<Vec<_>>()))?;
        let black_faces: Vec<Vec<usize>> = white_faces
            .iter()
            .map(|cycle| {
                let image: Vec<usize> = cycle.iter().map(|&a| t.apply(a)).collect();
                let start = (0..image.len()).min_by_key(|&i| image[i]).unwrap_or(0);
                image[start..].iter().chain(&image[..start]).copied().collect()
            })
            .collect();
        let mut face_of_sheet = vec![String::new(); ground.size()];
        for (i, (w, b)) in white_faces.iter().zip(&black_faces).enumerate() {
            for &a in w {
                face_of_sheet[a] = format!("W{}", i + 1);
            }
            for &a in b {
                face_of_sheet[a] = format!("B{}", i + 1);
            }
        }
        Ok(Reader {
            m,
            t,
            white_faces,
            black_faces,
            face_of_sheet,
        })
    }

    fn faces(&self) -> Faces {
        let build = |color: Color, prefix: char, cycles: &[Vec<usize>]| {
            cycles
                .iter()
                .enumerate()
                .map(|(i, c)| ExtractedFace {
                    id: format!("{prefix}{}", i + 1),
                    color,
                    degree: c.len(),
                    sheets: c.clone(),
                })
                .collect()
        };
        Faces {
            white: build(Color::White, 'W', &self.white_faces),
            black: build(Color::Black, 'B', &self.black_faces),
        }
    }

    fn nodes(&self) -> Result<Vec<ExtractedNode>> {
        let m = self.m;
        let ground = m.ground();
        let xs: Vec<&Permutation> = m.x().iter().collect();
        let whites: Vec<usize> = ground.whites().collect();
        let entrances = orbits(ground.size(), &xs, Some(&whites))?;
        let mut out = Vec::new();
        for (role, prefix) in [(Role::Entrance, 'N'), (Role::Exit, 'X')] {
            for (i, white_orbit) in entrances.iter().enumerate() {
                let sheets: Vec<usize> = match role {
                    Role::Entrance => white_orbit.clone(),
                    Role::Exit => {
                        let mut v: Vec<usize> = white_orbit.iter().map(|&a| self.t.apply(a)).collect();
                        v.sort_unstable();
                        v
                    }
                };
                let mut faces: Vec<String> = sheets.iter().map(|&a| self.face_of_sheet[a].clone()).collect();
                faces.sort_by_key(|f| f[1..].parse::<usize>().unwrap_or(0));
                faces.dedup();
                let degrees: Vec<usize> = faces
                    .iter()
                    .map(|f| {
                        let i: usize = f[1..].parse().expect("face ids are numbered");
                        self.white_faces[i - 1].len()
                    })
                    .collect();
                let inside: usize = degrees.iter().sum();
                if inside != sheets.len() {
                    return Err(Error::Internal(format!(
                        "an e-cycle leaves the orbit of {prefix}{}",
                        i + 1
                    )));
                }
                let range = match role {
                    Role::Entrance => ground.whites(),
                    Role::Exit => ground.blacks(),
                };
                let b = m
                    .x()
                    .iter()
                    .filter(|x| {
                        let moved = x.moved_within(range.clone());
                        !moved.is_empty() && moved.iter().flatten().all(|a| sheets.binary_search(a).is_ok())
                    })
                    .count() as i64;
                let k = degrees.len() as i64;
                let twice_g = b + 2 - k - inside as i64;
                if twice_g < 0 || twice_g % 2 != 0 {
                    return Err(Error::NonRealizable(format!(
                        "{prefix}{} has index {b} with {k} faces of total degree {inside}: 2g = {twice_g}",
                        i + 1
                    )));
                }
                let signature = EntranceSignature::new((twice_g / 2) as usize, degrees);
                debug_assert_eq!(signature.b, b);
                out.push(ExtractedNode {
                    id: format!("{prefix}{}", i + 1),
                    role,
                    sheets,
                    faces,
                    signature,
                });
            }
        }
        Ok(out)
    }

    fn alleys(&self) -> Result<Vec<Alley>> {
        let mut out = Vec::new();
        for node in self.nodes()? {
            for f in &node.faces {
                out.push(Alley {
                    id: format!("a{f}"),
                    face: f.clone(),
                    node: node.id.clone(),
                });
            }
        }
        out.sort_by_key(|a| face_order(&a.face));
        Ok(out)
    }

    fn gardens(&self) -> Result<GardenData> {
        let m = self.m;
        let ground = m.ground();
        let d = ground.degree();
        let s = m.corner_points();
        let arcs = s + 1;
        let n = ground.size();
        let c = m.c();
        let e = m.e();

        // arc-lift (i, w) for i in 1..=s+1 has index (i-1)*d + w
        let lift = |arc: usize, w: usize| (arc - 1) * d + w;
        let unlift = |ix: usize| ArcLift {
            arc: ix / d + 1,
            white: ix % d,
        };
        let lifts = arcs * d;

        // corner orbits; a size-four orbit is a vertex
        let mut vertex_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut vertex_list: Vec<(usize, Vec<usize>)> = Vec::new();
        for k in 1..=s {
            for orbit in orbits(n, &[&c[k - 1], &c[k]], None)? {
                match orbit.len() {
                    2 => {}
                    4 => {
                        let id = vertex_list.len();
                        for &a in &orbit {
                            vertex_of.insert((k, a), id);
                        }
                        vertex_list.push((k, orbit));
                    }
                    other => {
                        return Err(Error::Internal(format!("corner {k} has an orbit of size {other}")));
                    }
                }
            }
        }

        // successor of each arc-lift along the boundary direction
        let next = |ix: usize| -> Option<usize> {
            let ArcLift { arc, white } = unlift(ix);
            if arc == arcs {
                Some(lift(1, e.apply(white)))
            } else if vertex_of.contains_key(&(arc, white)) {
                None
            } else {
                Some(lift(arc + 1, white))
            }
        };
        for w in ground.whites() {
            let a = c[arcs - 1].apply(w);
            if c[0].apply(e.apply(w)) != e.apply(a) {
                return Err(Error::Internal(format!("seam gluing is inconsistent at sheet {w}")));
            }
        }
        let mut prev = vec![None; lifts];
        for ix in 0..lifts {
            if let Some(j) = next(ix) {
                if prev[j].is_some() {
                    return Err(Error::Internal("arc-lift with two predecessors".into()));
                }
                prev[j] = Some(ix);
            }
        }

        // chains: paths from a lift without predecessor, then remaining cycles
        let mut chain_of = vec![usize::MAX; lifts];
        let mut chains: Vec<(Vec<usize>, EdgeKind)> = Vec::new();
        for start in 0..lifts {
            if prev[start].is_none() {
                let mut path = vec![start];
                let mut cur = start;
                while let Some(j) = next(cur) {
                    path.push(j);
                    cur = j;
                    if path.len() > lifts {
                        return Err(Error::Internal("open chain does not terminate".into()));
                    }
                }
                chains.push((path, EdgeKind::Segment));
            }
        }
        let mut on_path = vec![false; lifts];
        for (p, _) in &chains {
            for &ix in p {
                on_path[ix] = true;
            }
        }
        for start in 0..lifts {
            if on_path[start] {
                continue;
            }
            let mut cycle = vec![start];
            on_path[start] = true;
            let mut cur = next(start).ok_or_else(|| Error::Internal("closed chain breaks".into()))?;
            while cur != start {
                if on_path[cur] {
                    return Err(Error::Internal("closed chain meets another chain".into()));
                }
                on_path[cur] = true;
                cycle.push(cur);
                cur = next(cur).ok_or_else(|| Error::Internal("closed chain breaks".into()))?;
            }
            chains.push((cycle, EdgeKind::Loop));
        }
        chains.sort_by_key(|(p, _)| *p.iter().min().expect("chains are non-empty"));
        for (i, (p, _)) in chains.iter().enumerate() {
            for &ix in p {
                chain_of[ix] = i;
            }
        }

        // garden components
        let mut gens: Vec<&Permutation> = vec![e];
        gens.extend(c.iter());
        let components = orbits(n, &gens, None)?;
        let mut component_of = vec![0usize; n];
        for (i, comp) in components.iter().enumerate() {
            for &a in comp {
                component_of[a] = i;
            }
        }

        // the real structure on arc-lifts, chains, vertices and components
        let t = &self.t;
        let lift_image = |ix: usize| {
            let ArcLift { arc, white } = unlift(ix);
            lift(arc, c[arc - 1].apply(t.apply(white)))
        };
        let chain_image: Vec<usize> = chains.iter().map(|(p, _)| chain_of[lift_image(p[0])]).collect();
        let chain_fixed: Vec<bool> = chains.iter().map(|(p, _)| lift_image(p[0]) == p[0]).collect();
        let vertex_image: Vec<usize> = vertex_list
            .iter()
            .map(|(k, orbit)| vertex_of[&(*k, t.apply(orbit[0]))])
            .collect();
        let component_image: Vec<usize> = components.iter().map(|comp| component_of[t.apply(comp[0])]).collect();

        let edge_id = |i: usize| format!("E{}", i + 1);
        let vertex_id = |i: usize| format!("V{}", i + 1);
        let garden_id = |i: usize| format!("G{}", i + 1);

        // face boundaries as runs of chains
        let boundary = |sheets: &[usize], color: Color| -> Vec<String> {
            let mut seq: Vec<usize> = Vec::new();
            for &a in sheets {
                for arc in 1..=arcs {
                    let w = match color {
                        Color::White => a,
                        Color::Black => c[arc - 1].apply(a),
                    };
                    seq.push(chain_of[lift(arc, w)]);
                }
            }
            seq.dedup();
            while seq.len() > 1 && seq.first() == seq.last() {
                seq.pop();
            }
            seq.into_iter().map(edge_id).collect()
        };

        let mut gardens: Vec<Garden> = Vec::new();
        for (gi, comp) in components.iter().enumerate() {
            let mut faces = Vec::new();
            for (i, cycle) in self.white_faces.iter().enumerate() {
                if component_of[cycle[0]] == gi {
                    faces.push(Face {
                        id: format!("W{}", i + 1),
                        color: Color::White,
                        degree: cycle.len(),
                        boundary: boundary(cycle, Color::White),
                    });
                }
            }
            for (i, cycle) in self.black_faces.iter().enumerate() {
                if component_of[cycle[0]] == gi {
                    faces.push(Face {
                        id: format!("B{}", i + 1),
                        color: Color::Black,
                        degree: cycle.len(),
                        boundary: boundary(cycle, Color::Black),
                    });
                }
            }
            faces.sort_by_key(|a| face_order(&a.id));
            let in_garden = |white: usize| component_of[white] == gi;
            let mut edges = Vec::new();
            let mut chain_ids = Vec::new();
            for (ci, (path, kind)) in chains.iter().enumerate() {
                if !in_garden(unlift(path[0]).white) {
                    continue;
                }
                chain_ids.push(ci);
                let geometric = s.max(1);
                let length = (1..=geometric)
                    .map(|arc| path.iter().filter(|&&ix| unlift(ix).arc == arc).count())
                    .min()
                    .unwrap_or(0);
                let ends = match kind {
                    EdgeKind::Loop => Vec::new(),
                    EdgeKind::Segment => {
                        let first = unlift(path[0]);
                        let last = unlift(*path.last().expect("non-empty"));
                        vec![
                            vertex_id(vertex_of[&(first.arc - 1, first.white)]),
                            vertex_id(vertex_of[&(last.arc, last.white)]),
                        ]
                    }
                };
                edges.push(Edge {
                    id: edge_id(ci),
                    length,
                    kind: *kind,
                    ends,
                });
            }
            let vertices: Vec<Vertex> = vertex_list
                .iter()
                .enumerate()
                .filter(|(_, (_, orbit))| component_of[orbit[0]] == gi)
                .map(|(vi, (k, _))| Vertex {
                    id: vertex_id(vi),
                    corner: *k,
                    pair: (vertex_image[vi] != vi).then(|| vertex_id(vertex_image[vi])),
                })
                .collect();

            let kind = if component_image[gi] != gi {
                GardenKind::SeparatedPairMember
            } else {
                // orientable exactly when the fixed real locus cuts the garden in two
                let face_index: BTreeMap<&str, usize> =
                    faces.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect();
                let mut sides_of_chain: HashMap<usize, Vec<usize>> = HashMap::new();
                for f in &faces {
                    for eid in &f.boundary {
                        let ci: usize = eid[1..].parse::<usize>().expect("edge ids are numbered") - 1;
                        sides_of_chain.entry(ci).or_default().push(face_index[f.id.as_str()]);
                    }
                }
                let mut uf = UnionFind::new(faces.len());
                for &ci in &chain_ids {
                    if chain_fixed[ci] {
                        continue;
                    }
                    if let Some(sides) = sides_of_chain.get(&ci) {
                        for w in sides.windows(2) {
                            uf.union(w[0], w[1]);
                        }
                    }
                }
                if uf.set_count() > 1 {
                    GardenKind::Orientable
                } else {
                    GardenKind::NonOrientable
                }
            };
            gardens.push(Garden {
                id: garden_id(gi),
                kind,
                partner: (component_image[gi] != gi).then(|| garden_id(component_image[gi])),
                faces,
                edges,
                vertices,
            });
            let _ = comp;
        }

        let mut involution = Involution::default();
        for i in 0..self.white_faces.len() {
            let (w, b) = (format!("W{}", i + 1), format!("B{}", i + 1));
            involution.faces.insert(w.clone(), b.clone());
            involution.faces.insert(b, w);
        }
        for (i, &j) in chain_image.iter().enumerate() {
            involution.edges.insert(edge_id(i), edge_id(j));
        }
        for (i, &j) in vertex_image.iter().enumerate() {
            involution.vertices.insert(vertex_id(i), vertex_id(j));
        }
        for (i, &j) in component_image.iter().enumerate() {
            involution.gardens.insert(garden_id(i), garden_id(j));
        }
        Ok(GardenData {
            gardens,
            involution,
            lifts: chains
                .iter()
                .map(|(p, _)| p.iter().map(|&ix| unlift(ix)).collect())
                .collect(),
        })
    }
}

struct GardenData {
    gardens: Vec<Garden>,
    involution: Involution,
    lifts: Vec<Vec<ArcLift>>,
}

fn face_order(id: &str) -> (usize, bool) {
    (id[1..].parse().unwrap_or(usize::MAX), id.starts_with('B'))
}

/// White faces are `e`-cycles on white sheets. Black faces are the images of
/// the white ones under the real structure, which are the `e`-cycles on
/// black sheets.
pub fn extract_faces(m: &MonodromyRep) -> Result<Faces> {
    Ok(Reader::new(m)?.faces())
}

/// Entrances are orbits of `<x_1..x_t>` on white sheets; exits are their
/// images under the real structure. The index `b` of a node counts the cone
/// generators supported inside it.
pub fn extract_nodes(m: &MonodromyRep) -> Result<Vec<ExtractedNode>> {
    Reader::new(m)?.nodes()
}

pub fn extract_alleys(m: &MonodromyRep) -> Result<Vec<Alley>> {
    Reader::new(m)?.alleys()
}

/// Gardens with fine structure, plus the arc-lifts making up each edge.
pub fn extract_gardens(m: &MonodromyRep) -> Result<(Vec<Garden>, Vec<Vec<ArcLift>>)> {
    let data = Reader::new(m)?.gardens()?;
    Ok((data.gardens, data.lifts))
}

/// Searches for a park involution of `park` from scratch, ignoring the one
/// stored in it.
pub fn find_park_involution(park: &Park) -> Result<Option<Involution>> {
    iso::find_involution(park)
}

/// The park of a valid generic representation.
pub fn monodromy_to_park(m: &MonodromyRep) -> Result<Park> {
    let reader = Reader::new(m)?;
    let nodes = reader.nodes()?;
    let alleys = reader.alleys()?;
    let mut data = reader.gardens()?;
    for i in 0..nodes.len() / 2 {
        let (a, b) = (format!("N{}", i + 1), format!("X{}", i + 1));
        data.involution.nodes.insert(a.clone(), b.clone());
        data.involution.nodes.insert(b, a);
    }
    let park = Park {
        s: m.corner_points(),
        t: m.cone_points(),
        gardens: data.gardens,
        nodes: nodes
            .iter()
            .map(|n| Node {
                id: n.id.clone(),
                role: n.role,
                genus: n.signature.g,
            })
            .collect(),
        alleys,
        involution: data.involution,
    };
    let report = park.validate()?;
    if !report.ok {
        let why: Vec<String> = report.violations.iter().map(|v| format!("{}: {}", v.clause, v.detail)).collect();
        return Err(Error::Internal(format!("extracted park is invalid: {}", why.join("; "))));
    }
    Ok(park)
}
