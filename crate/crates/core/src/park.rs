//! Parks: gardens of colored faces, entrances and exits joined to faces by
//! alleys, and a color-swapping involution on all of it.
//!
//! Ids are strings and unique within their sort (gardens, faces, edges,
//! vertices, nodes, alleys). A garden whose faces carry boundary lists is
//! "fine"; a garden without them is "coarse" and only its global counts are
//! checked.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::permgroup::Color;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Park {
    /// Number of real critical values; corner labels run over `1..=s`.
    pub s: usize,
    /// Number of conjugate pairs of non-real critical values.
    pub t: usize,
    pub gardens: Vec<Garden>,
    pub nodes: Vec<Node>,
    pub alleys: Vec<Alley>,
    pub involution: Involution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GardenKind {
    Orientable,
    NonOrientable,
    SeparatedPairMember,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Garden {
    pub id: String,
    pub kind: GardenKind,
    #[serde(default)]
    pub partner: Option<String>,
    pub faces: Vec<Face>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Face {
    pub id: String,
    pub color: Color,
    pub degree: usize,
    /// Edges met walking once around the face, in order.
    #[serde(default)]
    pub boundary: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Segment,
    Loop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: String,
    pub length: usize,
    pub kind: EdgeKind,
    /// `[start, end]` for a segment (possibly equal), empty for a loop.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ends: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: String,
    /// Position of the critical value in the cyclic order, in `1..=s`.
    pub corner: usize,
    #[serde(default)]
    pub pair: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Entrance,
    Exit,
}

impl Role {
    pub fn color(self) -> Color {
        match self {
            Role::Entrance => Color::White,
            Role::Exit => Color::Black,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub role: Role,
    /// Weight: genus of the entrance or exit surface.
    pub genus: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alley {
    pub id: String,
    pub face: String,
    pub node: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Involution {
    #[serde(default)]
    pub nodes: BTreeMap<String, String>,
    #[serde(default)]
    pub faces: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
    #[serde(default)]
    pub vertices: BTreeMap<String, String>,
    #[serde(default)]
    pub gardens: BTreeMap<String, String>,
}

/// Topological data of one entrance or exit: genus `g`, the degrees of its
/// `k` alleys, and its index `b = 2g - 2 + k + Σ d^j`, the number of simple
/// branch points of its covering over a disk.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntranceSignature {
    pub g: usize,
    pub k: usize,
    pub degrees: Vec<usize>,
    pub b: i64,
}

impl EntranceSignature {
    pub fn new(g: usize, mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable();
        let k = degrees.len();
        let b = 2 * g as i64 - 2 + k as i64 + degrees.iter().sum::<usize>() as i64;
        EntranceSignature { g, k, degrees, b }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeSignature {
    pub role: Role,
    #[serde(flatten)]
    pub signature: EntranceSignature,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GardenSignature {
    pub kind: GardenKind,
    pub white_degrees: Vec<usize>,
    pub black_degrees: Vec<usize>,
    pub edge_lengths: Vec<usize>,
    pub loops: usize,
    pub corners: Vec<usize>,
}

/// Global type data of a park in a canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TopSummary {
    pub d: usize,
    pub g: usize,
    pub n: usize,
    pub t: usize,
    pub s: usize,
    pub gardens: Vec<GardenSignature>,
    pub nodes: Vec<NodeSignature>,
}

impl fmt::Display for TopSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} g={} n={} t={} s={}", self.d, self.g, self.n, self.t, self.s)
    }
}

/// The park condition or garden rule a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    /// Alleys join entrances to white faces and exits to black faces.
    AlleyColor,
    /// Every face has exactly one alley.
    OneAlleyPerFace,
    /// Every entrance and exit has an alley.
    NodeHasAlley,
    /// The involution swaps entrances and exits and respects all structure.
    Involution,
    /// Neighbouring faces have different colors.
    FaceColoring,
    /// Every vertex lies in the closure of exactly four edges.
    FourEdgeVertex,
    /// Corner labels follow the cyclic order `1..=s`.
    CornerLabel,
    /// Separated gardens come in partnered pairs; self-paired gardens do not.
    GardenPairing,
    /// White and black face degrees both sum to the total degree.
    DegreeBalance,
    /// Node indices are non-negative and entrance indices sum to `t`.
    Signature,
    /// Edges, faces and vertices are internally consistent.
    CellStructure,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::AlleyColor => "park condition (i): alleys connect entrances to white faces and exits to black faces",
            Clause::OneAlleyPerFace => "park condition (ii): each face has exactly one alley",
            Clause::NodeHasAlley => "park condition (iii): at least one alley at each entrance or exit",
            Clause::Involution => "park condition (iv): involution sending entrances to exits",
            Clause::FaceColoring => "garden coloring (i): neighbouring faces have different colours",
            Clause::FourEdgeVertex => "garden vertex rule: each vertex lies in the closure of exactly four edges",
            Clause::CornerLabel => "garden cyclic order (iii): corner labels in 1..s",
            Clause::GardenPairing => "garden pairing: separated gardens come in partnered pairs",
            Clause::DegreeBalance => "degree balance: white and black degrees agree",
            Clause::Signature => "entrance signature arithmetic",
            Clause::CellStructure => "cell structure",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Clause {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParkViolation {
    pub clause: Clause,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParkReport {
    pub ok: bool,
    pub violations: Vec<ParkViolation>,
}

impl ParkReport {
    pub fn violates(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }
}

/// Position lookups for every id of a park.
#[derive(Debug, Clone)]
pub(crate) struct ParkIndex {
    pub gardens: HashMap<String, usize>,
    /// face id -> (garden, face)
    pub faces: HashMap<String, (usize, usize)>,
    pub edges: HashMap<String, (usize, usize)>,
    pub vertices: HashMap<String, (usize, usize)>,
    pub nodes: HashMap<String, usize>,
    pub alleys: HashMap<String, usize>,
}

impl ParkIndex {
    /// Fails with an invalid-argument error on duplicate or dangling ids.
    pub fn build(park: &Park) -> Result<Self> {
        fn insert<V>(map: &mut HashMap<String, V>, sort: &str, id: &str, v: V) -> Result<()> {
            if map.insert(id.to_string(), v).is_some() {
                return invalid(format!("duplicate {sort} id {id:?}"));
            }
            Ok(())
        }
        let mut ix = ParkIndex {
            gardens: HashMap::new(),
            faces: HashMap::new(),
            edges: HashMap::new(),
            vertices: HashMap::new(),
            nodes: HashMap::new(),
            alleys: HashMap::new(),
        };
        for (gi, g) in park.gardens.iter().enumerate() {
            insert(&mut ix.gardens, "garden", &g.id, gi)?;
            for (i, f) in g.faces.iter().enumerate() {
                insert(&mut ix.faces, "face", &f.id, (gi, i))?;
            }
            for (i, e) in g.edges.iter().enumerate() {
                insert(&mut ix.edges, "edge", &e.id, (gi, i))?;
            }
            for (i, v) in g.vertices.iter().enumerate() {
                insert(&mut ix.vertices, "vertex", &v.id, (gi, i))?;
            }
        }
        for (i, n) in park.nodes.iter().enumerate() {
            insert(&mut ix.nodes, "node", &n.id, i)?;
        }
        for (i, a) in park.alleys.iter().enumerate() {
            insert(&mut ix.alleys, "alley", &a.id, i)?;
        }

        let need = |map_has: bool, what: &str, id: &str| -> Result<()> {
            if map_has {
                Ok(())
            } else {
                invalid(format!("dangling {what} reference {id:?}"))
            }
        };
        for g in &park.gardens {
            if let Some(p) = &g.partner {
                need(ix.gardens.contains_key(p), "garden", p)?;
            }
            for f in &g.faces {
                for e in &f.boundary {
                    need(ix.edges.contains_key(e), "edge", e)?;
                }
            }
            for e in &g.edges {
                for v in &e.ends {
                    need(ix.vertices.contains_key(v), "vertex", v)?;
                }
            }
            for v in &g.vertices {
                if let Some(p) = &v.pair {
                    need(ix.vertices.contains_key(p), "vertex", p)?;
                }
            }
        }
        for a in &park.alleys {
            need(ix.faces.contains_key(&a.face), "face", &a.face)?;
            need(ix.nodes.contains_key(&a.node), "node", &a.node)?;
        }
        let inv = &park.involution;
        let sorts: [(&BTreeMap<String, String>, &str, &dyn Fn(&str) -> bool); 5] = [
            (&inv.nodes, "node", &|id| ix.nodes.contains_key(id)),
            (&inv.faces, "face", &|id| ix.faces.contains_key(id)),
            (&inv.edges, "edge", &|id| ix.edges.contains_key(id)),
            (&inv.vertices, "vertex", &|id| ix.vertices.contains_key(id)),
            (&inv.gardens, "garden", &|id| ix.gardens.contains_key(id)),
        ];
        for (map, sort, has) in sorts {
            for (k, v) in map {
                need(has(k), sort, k)?;
                need(has(v), sort, v)?;
            }
        }
        Ok(ix)
    }
}

impl Park {
    pub fn from_json(text: &str) -> Result<Park> {
        let park: Park = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("park JSON: {e}")))?;
        ParkIndex::build(&park)?;
        Ok(park)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("park serializes")
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.gardens.iter().flat_map(|g| g.faces.iter())
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.gardens.iter().flat_map(|g| g.edges.iter())
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.gardens.iter().flat_map(|g| g.vertices.iter())
    }

    pub fn face(&self, id: &str) -> Option<&Face> {
        self.faces().find(|f| f.id == id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Signature of a node from its weight and the degrees of its alleys.
    pub fn node_signature(&self, node_id: &str) -> Result<NodeSignature> {
        let node = self
            .node(node_id)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown node {node_id:?}")))?;
        let degrees: Vec<usize> = self
            .alleys
            .iter()
            .filter(|a| a.node == node_id)
            .map(|a| {
                self.face(&a.face)
                    .map(|f| f.degree)
                    .ok_or_else(|| Error::InvalidArgument(format!("dangling face {:?}", a.face)))
            })
            .collect::<Result<_>>()?;
        Ok(NodeSignature {
            role: node.role,
            signature: EntranceSignature::new(node.genus, degrees),
        })
    }

    /// Signatures of all entrances, in node order.
    pub fn entrance_signatures(&self) -> Result<Vec<EntranceSignature>> {
        self.nodes
            .iter()
            .filter(|n| n.role == Role::Entrance)
            .map(|n| self.node_signature(&n.id).map(|s| s.signature))
            .collect()
    }

    /// Checks every park condition and garden rule; dangling ids are an error.
    pub fn validate(&self) -> Result<ParkReport> {
        let ix = ParkIndex::build(self)?;
        let mut out = Vec::new();
        let mut flag = |clause: Clause, detail: String| out.push(ParkViolation { clause, detail });

        // alleys
        let mut alleys_of_face: HashMap<&str, usize> = HashMap::new();
        let mut alleys_of_node: HashMap<&str, usize> = HashMap::new();
        for a in &self.alleys {
            let (gi, fi) = ix.faces[&a.face];
            let face = &self.gardens[gi].faces[fi];
            let node = &self.nodes[ix.nodes[&a.node]];
            if face.color != node.role.color() {
                flag(
                    Clause::AlleyColor,
                    format!("alley {} joins {:?} {} to {} face {}", a.id, node.role, node.id, face.color, face.id),
                );
            }
            *alleys_of_face.entry(&a.face).or_default() += 1;
            *alleys_of_node.entry(&a.node).or_default() += 1;
        }
        for f in self.faces() {
            let count = alleys_of_face.get(f.id.as_str()).copied().unwrap_or(0);
            if count != 1 {
                flag(Clause::OneAlleyPerFace, format!("face {} has {count} alleys", f.id));
            }
        }
        for n in &self.nodes {
            if alleys_of_node.get(n.id.as_str()).copied().unwrap_or(0) == 0 {
                flag(Clause::NodeHasAlley, format!("{:?} {} has no alley", n.role, n.id));
            }
        }

        // gardens
        for g in &self.gardens {
            match (g.kind, &g.partner) {
                (GardenKind::SeparatedPairMember, None) => {
                    flag(Clause::GardenPairing, format!("separated garden {} has no partner", g.id))
                }
                (GardenKind::SeparatedPairMember, Some(p)) => {
                    let other = &self.gardens[ix.gardens[p]];
                    if *p == g.id
                        || other.kind != GardenKind::SeparatedPairMember
                        || other.partner.as_deref() != Some(g.id.as_str())
                    {
                        flag(Clause::GardenPairing, format!("garden {} and {} are not mutual partners", g.id, p));
                    }
                }
                (_, Some(p)) => flag(
                    Clause::GardenPairing,
                    format!("self-paired garden {} names partner {}", g.id, p),
                ),
                (_, None) => {}
            }
            if g.faces.is_empty() {
                flag(Clause::CellStructure, format!("garden {} has no faces", g.id));
            }
            for f in &g.faces {
                if f.degree == 0 {
                    flag(Clause::CellStructure, format!("face {} has degree 0", f.id));
                }
            }
            for v in &g.vertices {
                if v.corner == 0 || v.corner > self.s {
                    flag(
                        Clause::CornerLabel,
                        format!("vertex {} has corner label {} outside 1..{}", v.id, v.corner, self.s),
                    );
                }
            }
            let local_vertices: BTreeSet<&str> = g.vertices.iter().map(|v| v.id.as_str()).collect();
            for e in &g.edges {
                match e.kind {
                    EdgeKind::Segment if e.ends.len() != 2 => {
                        flag(Clause::CellStructure, format!("segment {} needs two ends", e.id))
                    }
                    EdgeKind::Loop if !e.ends.is_empty() => {
                        flag(Clause::CellStructure, format!("loop {} has ends", e.id))
                    }
                    _ => {}
                }
                for v in &e.ends {
                    if !local_vertices.contains(v.as_str()) {
                        flag(Clause::CellStructure, format!("edge {} ends at vertex {} of another garden", e.id, v));
                    }
                }
            }
            if !g.edges.is_empty() {
                let mut ends: HashMap<&str, usize> = HashMap::new();
                for e in &g.edges {
                    for v in &e.ends {
                        *ends.entry(v.as_str()).or_default() += 1;
                    }
                }
                for v in &g.vertices {
                    let count = ends.get(v.id.as_str()).copied().unwrap_or(0);
                    if count != 4 {
                        flag(Clause::FourEdgeVertex, format!("vertex {} has {count} edge-ends", v.id));
                    }
                }
            }
            let fine = !g.faces.is_empty() && g.faces.iter().all(|f| !f.boundary.is_empty());
            if fine {
                let local_edges: BTreeSet<&str> = g.edges.iter().map(|e| e.id.as_str()).collect();
                let mut sides: HashMap<&str, (usize, usize)> = HashMap::new();
                for f in &g.faces {
                    for e in &f.boundary {
                        if !local_edges.contains(e.as_str()) {
                            flag(Clause::CellStructure, format!("face {} is bounded by edge {} of another garden", f.id, e));
                            continue;
                        }
                        let entry = sides.entry(e.as_str()).or_default();
                        match f.color {
                            Color::White => entry.0 += 1,
                            Color::Black => entry.1 += 1,
                        }
                    }
                }
                for e in &g.edges {
                    let (w, b) = sides.get(e.id.as_str()).copied().unwrap_or((0, 0));
                    if (w, b) != (1, 1) {
                        flag(
                            Clause::FaceColoring,
                            format!("edge {} borders {w} white and {b} black faces", e.id),
                        );
                    }
                }
            }
        }

        // degrees and signatures
        let white: usize = self.faces().filter(|f| f.color == Color::White).map(|f| f.degree).sum();
        let black: usize = self.faces().filter(|f| f.color == Color::Black).map(|f| f.degree).sum();
        if white != black {
            flag(Clause::DegreeBalance, format!("white degrees sum to {white}, black to {black}"));
        }
        let mut entrance_b = 0i64;
        for n in &self.nodes {
            let sig = self.node_signature(&n.id)?;
            if sig.signature.b < 0 {
                flag(Clause::Signature, format!("node {} has index {}", n.id, sig.signature.b));
            }
            if n.role == Role::Entrance {
                entrance_b += sig.signature.b;
            }
        }
        if entrance_b != self.t as i64 {
            flag(
                Clause::Signature,
                format!("entrance indices sum to {entrance_b} but t = {}", self.t),
            );
        }

        for v in self.check_involution(&ix) {
            flag(Clause::Involution, v);
        }

        Ok(ParkReport {
            ok: out.is_empty(),
            violations: out,
        })
    }

    fn check_involution(&self, ix: &ParkIndex) -> Vec<String> {
        let inv = &self.involution;
        let mut bad = Vec::new();
        let sorts: [(&BTreeMap<String, String>, &str, Vec<&str>); 5] = [
            (&inv.nodes, "node", self.nodes.iter().map(|n| n.id.as_str()).collect()),
            (&inv.faces, "face", self.faces().map(|f| f.id.as_str()).collect()),
            (&inv.edges, "edge", self.edges().map(|e| e.id.as_str()).collect()),
            (&inv.vertices, "vertex", self.vertices().map(|v| v.id.as_str()).collect()),
            (&inv.gardens, "garden", self.gardens.iter().map(|g| g.id.as_str()).collect()),
        ];
        for (map, sort, ids) in &sorts {
            for id in ids {
                match map.get(*id) {
                    None => bad.push(format!("{sort} {id} has no image")),
                    Some(img) => {
                        if map.get(img).map(String::as_str) != Some(*id) {
                            bad.push(format!("{sort} {id} -> {img} is not undone by the involution"));
                        }
                    }
                }
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        let garden_of_face = |id: &str| &self.gardens[ix.faces[id].0].id;
        for n in &self.nodes {
            let m = &self.nodes[ix.nodes[&inv.nodes[&n.id]]];
            if m.role == n.role {
                bad.push(format!("node {} maps to {} of the same role", n.id, m.id));
            }
            if m.genus != n.genus {
                bad.push(format!("node {} of weight {} maps to {} of weight {}", n.id, n.genus, m.id, m.genus));
            }
        }
        let node_of_face: HashMap<&str, &str> =
            self.alleys.iter().map(|a| (a.face.as_str(), a.node.as_str())).collect();
        for g in &self.gardens {
            let img = &inv.gardens[&g.id];
            let h = &self.gardens[ix.gardens[img]];
            if h.kind != g.kind {
                bad.push(format!("garden {} ({:?}) maps to {} ({:?})", g.id, g.kind, h.id, h.kind));
            }
            match g.kind {
                GardenKind::SeparatedPairMember => {
                    if g.partner.as_deref() != Some(img.as_str()) {
                        bad.push(format!("separated garden {} maps to {} instead of its partner", g.id, img));
                    }
                }
                _ => {
                    if *img != g.id {
                        bad.push(format!("self-paired garden {} maps to {}", g.id, img));
                    }
                }
            }
            for f in &g.faces {
                let fimg = &inv.faces[&f.id];
                let fi = &self.gardens[ix.faces[fimg].0].faces[ix.faces[fimg].1];
                if fi.color == f.color {
                    bad.push(format!("face {} maps to {} of the same color", f.id, fi.id));
                }
                if fi.degree != f.degree {
                    bad.push(format!("face {} of degree {} maps to {} of degree {}", f.id, f.degree, fi.id, fi.degree));
                }
                if garden_of_face(fimg) != img {
                    bad.push(format!("face {} maps outside the image of its garden", f.id));
                }
                if let (Some(n), Some(m)) = (node_of_face.get(f.id.as_str()), node_of_face.get(fimg.as_str())) {
                    if inv.nodes.get(*n).map(String::as_str) != Some(*m) {
                        bad.push(format!("alley of face {} is not carried to the alley of {}", f.id, fimg));
                    }
                }
                let mapped: Vec<&str> = f.boundary.iter().map(|e| inv.edges[e].as_str()).collect();
                let target: Vec<&str> = fi.boundary.iter().map(String::as_str).collect();
                if !same_cycle(&mapped, &target) {
                    bad.push(format!("boundary of face {} is not carried to the boundary of {}", f.id, fi.id));
                }
            }
            for e in &g.edges {
                let eimg = &inv.edges[&e.id];
                let (hg, hi) = ix.edges[eimg];
                let ei = &self.gardens[hg].edges[hi];
                if self.gardens[hg].id != *img {
                    bad.push(format!("edge {} maps outside the image of its garden", e.id));
                }
                if ei.length != e.length || ei.kind != e.kind {
                    bad.push(format!("edge {} maps to {} with different length or kind", e.id, ei.id));
                }
                let mapped: Vec<&str> = e.ends.iter().map(|v| inv.vertices[v].as_str()).collect();
                let target: Vec<&str> = ei.ends.iter().map(String::as_str).collect();
                if mapped != target {
                    bad.push(format!("ends of edge {} are not carried to the ends of {}", e.id, ei.id));
                }
            }
            for v in &g.vertices {
                let vimg = &inv.vertices[&v.id];
                let (hg, hi) = ix.vertices[vimg];
                let vi = &self.gardens[hg].vertices[hi];
                if self.gardens[hg].id != *img {
                    bad.push(format!("vertex {} maps outside the image of its garden", v.id));
                }
                if vi.corner != v.corner {
                    bad.push(format!("vertex {} at corner {} maps to {} at corner {}", v.id, v.corner, vi.id, vi.corner));
                }
                if let Some(p) = &v.pair {
                    if p != vimg || p == &v.id {
                        bad.push(format!("vertex {} is paired with {} but the involution sends it to {}", v.id, p, vimg));
                    }
                }
            }
            if g.kind == GardenKind::Orientable
                && !g.edges.is_empty()
                && !g.edges.iter().any(|e| inv.edges[&e.id] == e.id)
            {
                bad.push(format!("orientable garden {} has no edge fixed by the involution", g.id));
            }
        }
        bad
    }

    /// `Σ_gardens (V - E) + Σ_nodes (2 - 2g - k)`; loops count as neutral.
    ///
    /// Coarse gardens without an edge list count `-V`, which is what the
    /// four-edge vertex rule forces.
    pub fn euler_characteristic(&self) -> Result<i64> {
        let mut chi = 0i64;
        for g in &self.gardens {
            let v = g.vertices.len() as i64;
            if g.edges.is_empty() {
                chi -= v;
            } else {
                let segments = g.edges.iter().filter(|e| e.kind == EdgeKind::Segment).count() as i64;
                chi += v - segments;
            }
        }
        for n in &self.nodes {
            let k = self.alleys.iter().filter(|a| a.node == n.id).count() as i64;
            chi += 2 - 2 * n.genus as i64 - k;
        }
        Ok(chi)
    }

    pub fn genus(&self) -> Result<usize> {
        let chi = self.euler_characteristic()?;
        let twice = 2 - chi;
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::NonRealizable(format!("Euler characteristic {chi} gives no genus")));
        }
        Ok((twice / 2) as usize)
    }

    pub fn total_degree(&self) -> Result<usize> {
        let white: usize = self.faces().filter(|f| f.color == Color::White).map(|f| f.degree).sum();
        let black: usize = self.faces().filter(|f| f.color == Color::Black).map(|f| f.degree).sum();
        if white != black {
            return Err(Error::Inconsistent(format!(
                "white degrees sum to {white}, black to {black}"
            )));
        }
        Ok(white)
    }

    /// Degree, genus, critical value counts and sorted signatures.
    ///
    /// `t` is the sum of entrance indices and `n = 2t + s`.
    pub fn type_summary(&self) -> Result<TopSummary> {
        let d = self.total_degree()?;
        let g = self.genus()?;
        let t: i64 = self.entrance_signatures()?.iter().map(|s| s.b).sum();
        let t = usize::try_from(t).map_err(|_| Error::NonRealizable(format!("negative index sum {t}")))?;
        let mut gardens: Vec<GardenSignature> = self.gardens.iter().map(garden_signature).collect();
        gardens.sort();
        let mut nodes: Vec<NodeSignature> =
            self.nodes.iter().map(|n| self.node_signature(&n.id)).collect::<Result<_>>()?;
        nodes.sort();
        Ok(TopSummary {
            d,
            g,
            n: 2 * t + self.s,
            t,
            s: self.s,
            gardens,
            nodes,
        })
    }

    /// Renames every id with `f`, keeping the structure.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Park {
        let map = |m: &BTreeMap<String, String>| m.iter().map(|(k, v)| (f(k), f(v))).collect();
        Park {
            s: self.s,
            t: self.t,
            gardens: self
                .gardens
                .iter()
                .map(|g| Garden {
                    id: f(&g.id),
                    kind: g.kind,
                    partner: g.partner.as_deref().map(&f),
                    faces: g
                        .faces
                        .iter()
                        .map(|x| Face {
                            id: f(&x.id),
                            color: x.color,
                            degree: x.degree,
                            boundary: x.boundary.iter().map(|e| f(e)).collect(),
                        })
                        .collect(),
                    edges: g
                        .edges
                        .iter()
                        .map(|e| Edge {
                            id: f(&e.id),
                            length: e.length,
                            kind: e.kind,
                            ends: e.ends.iter().map(|v| f(v)).collect(),
                        })
                        .collect(),
                    vertices: g
                        .vertices
                        .iter()
                        .map(|v| Vertex {
                            id: f(&v.id),
                            corner: v.corner,
                            pair: v.pair.as_deref().map(&f),
                        })
                        .collect(),
                })
                .collect(),
            nodes: self
                .nodes
                .iter()
                .map(|n| Node {
                    id: f(&n.id),
                    role: n.role,
                    genus: n.genus,
                })
                .collect(),
            alleys: self
                .alleys
                .iter()
                .map(|a| Alley {
                    id: f(&a.id),
                    face: f(&a.face),
                    node: f(&a.node),
                })
                .collect(),
            involution: Involution {
                nodes: map(&self.involution.nodes),
                faces: map(&self.involution.faces),
                edges: map(&self.involution.edges),
                vertices: map(&self.involution.vertices),
                gardens: map(&self.involution.gardens),
            },
        }
    }
}

fn garden_signature(g: &Garden) -> GardenSignature {
    let degrees = |c: Color| {
        let mut v: Vec<usize> = g.faces.iter().filter(|f| f.color == c).map(|f| f.degree).collect();
        v.sort_unstable();
        v
    };
    let mut edge_lengths: Vec<usize> = g.edges.iter().map(|e| e.length).collect();
    edge_lengths.sort_unstable();
    let mut corners: Vec<usize> = g.vertices.iter().map(|v| v.corner).collect();
    corners.sort_unstable();
    GardenSignature {
        kind: g.kind,
        white_degrees: degrees(Color::White),
        black_degrees: degrees(Color::Black),
        edge_lengths,
        loops: g.edges.iter().filter(|e| e.kind == EdgeKind::Loop).count(),
        corners,
    }
}

/// Whether two sequences agree up to cyclic rotation.
pub(crate) fn same_cycle<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..b.len()).any(|r| (0..a.len()).all(|i| a[i] == b[(i + r) % b.len()]))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn simplest_park_is_valid() {
        let p = simplest();
        let r = p.validate().unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(p.euler_characteristic().unwrap(), 2);
        assert_eq!(p.genus().unwrap(), 0);
        assert_eq!(p.total_degree().unwrap(), 3);
        let s = p.type_summary().unwrap();
        assert_eq!((s.d, s.g, s.t, s.s, s.n), (3, 0, 2, 0, 4));
    }

    #[test]
    fn exit_alley_on_white_face_is_rejected() {
        let mut p = simplest();
        for a in &mut p.alleys {
            a.face = "W".into();
        }
        let r = p.validate().unwrap();
        assert!(!r.ok);
        assert!(r.violates(Clause::AlleyColor));
    }

    #[test]
    fn example1_is_a_torus_of_degree_four() {
        let p = example1();
        let r = p.validate().unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(p.euler_characteristic().unwrap(), 0);
        assert_eq!(p.genus().unwrap(), 1);
        assert_eq!(p.total_degree().unwrap(), 4);
        let s = p.type_summary().unwrap();
        assert_eq!((s.d, s.g, s.n), (4, 1, 8));
        for i in 1..=2 {
            assert_eq!(p.involution.nodes[&format!("N{i}")], format!("X{i}"));
        }
    }

    #[test]
    fn two_real_park_counts() {
        let p = two_real();
        assert!(p.validate().unwrap().ok, "{:?}", p.validate().unwrap());
        assert_eq!(p.euler_characteristic().unwrap(), 2);
        assert_eq!(p.genus().unwrap(), 0);
        let s = p.type_summary().unwrap();
        assert_eq!((s.d, s.g, s.t, s.s, s.n), (3, 0, 1, 2, 4));
    }

    #[test]
    fn raising_weights_raises_genus() {
        let p = simplest();
        let mut q = p.clone();
        for n in &mut q.nodes {
            n.genus += 1;
        }
        assert_eq!(q.genus().unwrap(), p.genus().unwrap() + 2);
    }

    #[test]
    fn single_face_park_has_degree_one() {
        let p = single_loop(1, 0);
        assert!(p.validate().unwrap().ok);
        assert_eq!(p.total_degree().unwrap(), 1);
    }

    #[test]
    fn unbalanced_degrees_are_inconsistent() {
        let mut p = single_loop(2, 0);
        p.gardens[0].faces[1].degree = 1;
        assert!(matches!(p.total_degree(), Err(Error::Inconsistent(_))));
        assert!(p.validate().unwrap().violates(Clause::DegreeBalance));
    }

    #[test]
    fn dangling_ids_are_invalid_argument() {
        let mut p = simplest();
        p.alleys[0].face = "nowhere".into();
        assert!(matches!(p.validate(), Err(Error::InvalidArgument(_))));
        let mut p = simplest();
        p.gardens[0].faces[0].id = p.gardens[0].faces[1].id.clone();
        assert!(matches!(p.validate(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn signature_arithmetic_holds() {
        let p = example1();
        for n in &p.nodes {
            let s = p.node_signature(&n.id).unwrap().signature;
            assert_eq!(s.b, 2 * s.g as i64 - 2 + s.k as i64 + s.degrees.iter().sum::<usize>() as i64);
        }
        assert_eq!(EntranceSignature::new(0, vec![3]).b, 2);
        assert_eq!(EntranceSignature::new(1, vec![2]).b, 3);
    }

    #[test]
    fn summary_is_invariant_under_relabeling_by_the_involution() {
        for p in [example1(), two_real(), simplest()] {
            let inv = p.involution.clone();
            let q = p.relabeled(|id| {
                for m in [&inv.nodes, &inv.faces, &inv.edges, &inv.vertices, &inv.gardens] {
                    if let Some(x) = m.get(id) {
                        return format!("{x}'");
                    }
                }
                format!("{id}'")
            });
            assert!(q.validate().unwrap().ok);
            assert_eq!(q.type_summary().unwrap(), p.type_summary().unwrap());
        }
    }

    #[test]
    fn same_cycle_compares_rotations() {
        assert!(same_cycle(&[1, 2, 3], &[3, 1, 2]));
        assert!(!same_cycle(&[1, 2, 3], &[3, 2, 1]));
        assert!(same_cycle::<u8>(&[], &[]));
    }
}
