//! Orbifold monodromy of a generic real meromorphic function.
//!
//! A degree `d` real function is a `2d`-sheeted orbifold covering of a disk
//! with `t` cone points of order two and `s` corner points. The covering is
//! encoded by the images of the generators
//!
//! ```text
//! x_1..x_t, e, c_1..c_{s+1}
//! x_i^2 = c_i^2 = (c_i c_{i+1})^2 = 1,  x_1...x_t e = 1,  c_1 = e c_{s+1} e^-1
//! ```
//!
//! with all words evaluated right to left. Corner `k` (for `k = 1..s`) sits
//! between the mirror arcs of `c_k` and `c_{k+1}`; the seam relation joins the
//! ends of the boundary chain and is not a corner.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::permgroup::{orbits, Color, GroundSet, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonodromyRep {
    ground: GroundSet,
    x: Vec<Permutation>,
    e: Permutation,
    c: Vec<Permutation>,
    e_supplied: bool,
}

/// On-disk layout of a representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyFile {
    pub degree: usize,
    pub cone_points: usize,
    pub corner_points: usize,
    pub x: Vec<Permutation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Permutation>,
    pub c: Vec<Permutation>,
}

impl MonodromyRep {
    /// Assembles a representation; `e` is derived from the cone generators
    /// when omitted.
    ///
    /// Only sizes are checked here. Relations are checked by
    /// [`MonodromyRep::validate_relations`].
    pub fn new(
        degree: usize,
        x: Vec<Permutation>,
        e: Option<Permutation>,
        c: Vec<Permutation>,
    ) -> Result<Self> {
        let ground = GroundSet::new(degree)?;
        let n = ground.size();
        if c.is_empty() {
            return invalid("the reflection list c_1..c_{s+1} must be non-empty");
        }
        for (name, list) in [("x", &x), ("c", &c)] {
            for (i, p) in list.iter().enumerate() {
                if p.len() != n {
                    return invalid(format!(
                        "{name}_{} has {} images, expected 2d = {n}",
                        i + 1,
                        p.len()
                    ));
                }
            }
        }
        if let Some(e) = &e {
            if e.len() != n {
                return invalid(format!("e has {} images, expected 2d = {n}", e.len()));
            }
        }
        let e_supplied = e.is_some();
        let e = match e {
            Some(e) => e,
            None => derive_e(n, &x)?,
        };
        Ok(MonodromyRep {
            ground,
            x,
            e,
            c,
            e_supplied,
        })
    }

    pub fn from_file(file: MonodromyFile) -> Result<Self> {
        if file.x.len() != file.cone_points {
            return invalid(format!(
                "cone_points = {} but {} x-permutations given",
                file.cone_points,
                file.x.len()
            ));
        }
        if file.c.len() != file.corner_points + 1 {
            return invalid(format!(
                "corner_points = {} requires {} c-permutations, got {}",
                file.corner_points,
                file.corner_points + 1,
                file.c.len()
            ));
        }
        MonodromyRep::new(file.degree, file.x, file.e, file.c)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MonodromyFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("monodromy JSON: {e}")))?;
        MonodromyRep::from_file(file)
    }

    pub fn to_file(&self) -> MonodromyFile {
        MonodromyFile {
            degree: self.degree(),
            cone_points: self.cone_points(),
            corner_points: self.corner_points(),
            x: self.x.clone(),
            e: Some(self.e.clone()),
            c: self.c.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("monodromy serializes")
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn degree(&self) -> usize {
        self.ground.degree()
    }

    /// `t`, the number of conjugate pairs of non-real critical values.
    pub fn cone_points(&self) -> usize {
        self.x.len()
    }

    /// `s`, the number of real critical values.
    pub fn corner_points(&self) -> usize {
        self.c.len() - 1
    }

    pub fn x(&self) -> &[Permutation] {
        &self.x
    }

    pub fn e(&self) -> &Permutation {
        &self.e
    }

    pub fn c(&self) -> &[Permutation] {
        &self.c
    }

    /// `c_k c_{k+1}` for corner `k` in `1..=s`.
    pub fn corner(&self, k: usize) -> Permutation {
        self.c[k - 1].compose(&self.c[k]).expect("sizes checked")
    }

    /// `n = 2t + s`, the number of critical values.
    pub fn critical_value_count(&self) -> usize {
        2 * self.cone_points() + self.corner_points()
    }

    /// Number of white transpositions in each corner element; a corner with
    /// two carries a pair of critical points swapped by the real structure.
    pub fn corner_multiplicities(&self) -> Vec<usize> {
        (1..=self.corner_points())
            .map(|k| self.corner(k).moved_within(self.ground.whites()).len())
            .collect()
    }

    /// Number of critical points of the function, `2t + Σ_k μ_k`.
    pub fn critical_point_count(&self) -> usize {
        2 * self.cone_points() + self.corner_multiplicities().iter().sum::<usize>()
    }

    fn all_generators(&self) -> Vec<&Permutation> {
        self.x
            .iter()
            .chain(std::iter::once(&self.e))
            .chain(self.c.iter())
            .collect()
    }

    pub fn is_transitive(&self) -> bool {
        orbits(self.ground.size(), &self.all_generators(), None)
            .map(|o| o.len() == 1)
            .unwrap_or(false)
    }

    /// Checks every relation of the presentation and transitivity.
    pub fn validate_relations(&self) -> RelationReport {
        let mut failures = Vec::new();
        let n = self.ground.size();
        let square_is_id = |p: &Permutation| p.compose(p).map(|q| q.is_identity()).unwrap_or(false);
        for (i, x) in self.x.iter().enumerate() {
            if !square_is_id(x) {
                failures.push(format!("x_{}^2 = 1 fails", i + 1));
            }
        }
        for (i, c) in self.c.iter().enumerate() {
            if !square_is_id(c) {
                failures.push(format!("c_{}^2 = 1 fails", i + 1));
            }
        }
        for k in 1..=self.corner_points() {
            if !square_is_id(&self.corner(k)) {
                failures.push(format!("(c_{} c_{})^2 = 1 fails", k, k + 1));
            }
        }
        let mut product = Permutation::identity(n);
        for x in &self.x {
            product = product.compose(x).expect("sizes checked");
        }
        if !product.compose(&self.e).expect("sizes checked").is_identity() {
            failures.push("x_1...x_t e = 1 fails".to_string());
        }
        if self.e_supplied {
            let derived = product.inverse();
            if derived != self.e {
                failures.push(format!(
                    "supplied e = {} differs from (x_1...x_t)^-1 = {}",
                    self.e, derived
                ));
            }
        }
        let s1 = self.corner_points() + 1;
        let seam = self.c[s1 - 1].conjugate(&self.e).expect("sizes checked");
        if seam != self.c[0] {
            failures.push(format!("c_1 = e c_{s1} e^-1 fails"));
        }
        if !self.is_transitive() {
            failures.push("the monodromy group is not transitive on the 2d sheets".to_string());
        }
        RelationReport {
            ok: failures.is_empty(),
            failures,
        }
    }

    /// Checks the branching conditions of a generic real function.
    ///
    /// Geometric mode inspects white restrictions of cone and corner
    /// elements, requires the black part of each cone element to be a single
    /// transposition (the conjugate branch point is simple too), and requires a
    /// real structure (see [`MonodromyRep::real_structure`]). Strict mode
    /// checks the literal conditions that cone and corner elements fix every
    /// black sheet.
    pub fn validate_genericity(&self, mode: GenericityMode) -> GenericityReport {
        let mut violations = Vec::new();
        let whites = self.ground.whites();
        let blacks = self.ground.blacks();
        for (i, x) in self.x.iter().enumerate() {
            let site = Site::Cone(i + 1);
            if !x.preserves(whites.clone()) {
                violations.push(Violation::new(site, "does not preserve sheet colors"));
                continue;
            }
            if x.moved_within(whites.clone()).iter().map(Vec::len).collect::<Vec<_>>() != [2] {
                violations.push(Violation::new(site, "white restriction is not a single transposition"));
            }
            let black_cycles: Vec<usize> = x.moved_within(blacks.clone()).iter().map(Vec::len).collect();
            match mode {
                GenericityMode::Strict => {
                    if !black_cycles.is_empty() {
                        violations.push(Violation::new(site, "moves black elements"));
                    }
                }
                GenericityMode::Geometric => {
                    if black_cycles != [2] {
                        violations.push(Violation::new(site, "black restriction is not a single transposition"));
                    }
                }
            }
        }
        for k in 1..=self.corner_points() {
            let site = Site::Corner(k);
            let corner = self.corner(k);
            if !corner.preserves(whites.clone()) {
                violations.push(Violation::new(site, "does not preserve sheet colors"));
                continue;
            }
            let white_cycles: Vec<usize> = corner.moved_within(whites.clone()).iter().map(Vec::len).collect();
            if !(white_cycles == [2] || white_cycles == [2, 2]) {
                violations.push(Violation::new(
                    site,
                    "white restriction is neither a transposition nor a product of two disjoint transpositions",
                ));
            }
            if mode == GenericityMode::Strict && !corner.moved_within(blacks.clone()).is_empty() {
                violations.push(Violation::new(site, "moves black elements"));
            }
        }
        for (i, c) in self.c.iter().enumerate() {
            let swaps = (0..self.ground.size())
                .all(|a| self.ground.color(c.apply(a)) != self.ground.color(a) && c.apply(c.apply(a)) == a);
            if !swaps {
                violations.push(Violation::new(
                    Site::Reflection(i + 1),
                    "is not a product of d disjoint white-black transpositions",
                ));
            }
        }
        if mode == GenericityMode::Geometric && self.real_structure().is_none() {
            violations.push(Violation::new(
                Site::RealStructure,
                "no color-swapping involution commutes with the monodromy",
            ));
        }
        GenericityReport {
            ok: violations.is_empty(),
            mode,
            violations,
        }
    }

    /// A fixed-point-free, color-swapping involution of the sheets commuting
    /// with every generator: the action of the antiholomorphic involution on
    /// the fiber. For a transitive group it is determined by the image of
    /// sheet 0; the candidate with the smallest such image is returned.
    pub fn real_structure(&self) -> Option<Permutation> {
        self.real_structures().into_iter().next()
    }

    /// All real structures, ordered by the image of sheet 0.
    pub fn real_structures(&self) -> Vec<Permutation> {
        let gens = self.all_generators();
        let n = self.ground.size();
        let mut out = Vec::new();
        'candidate: for target in self.ground.blacks() {
            let mut images = vec![usize::MAX; n];
            images[0] = target;
            let mut stack = vec![0usize];
            while let Some(a) = stack.pop() {
                for g in &gens {
                    let (ga, gt) = (g.apply(a), g.apply(images[a]));
                    if images[ga] == usize::MAX {
                        images[ga] = gt;
                        stack.push(ga);
                    } else if images[ga] != gt {
                        continue 'candidate;
                    }
                }
            }
            if images.contains(&usize::MAX) {
                continue;
            }
            let Ok(t) = Permutation::from_images(images) else {
                continue;
            };
            let ok = (0..n).all(|a| t.apply(t.apply(a)) == a && self.ground.color(t.apply(a)) != self.ground.color(a));
            if ok {
                out.push(t);
            }
        }
        out
    }

    /// The real structure used for extraction. When several exist, the one
    /// giving the smallest [`MonodromyRep::aligned_key`] is chosen, so the
    /// choice commutes with colour-preserving relabeling.
    pub fn canonical_real_structure(&self) -> Option<Permutation> {
        let all = self.real_structures();
        if all.len() <= 1 {
            return all.into_iter().next();
        }
        all.into_iter().min_by_key(|t| self.aligned_key(t))
    }

    /// The colour-preserving relabeling sending white sheet `a` to
    /// `sigma(a)` and turning `t` into the aligned swap `w_a <-> b_a`.
    pub fn aligning_relabel(&self, t: &Permutation, sigma: &Permutation) -> Permutation {
        let d = self.degree();
        let mut images = vec![0; 2 * d];
        for a in 0..d {
            images[a] = sigma.apply(a);
            images[t.apply(a)] = d + sigma.apply(a);
        }
        Permutation::from_images(images).expect("aligning relabel is a bijection")
    }

    /// Generator images concatenated, the ordering key for representatives.
    pub fn image_key(&self) -> Vec<u8> {
        self.x
            .iter()
            .chain(std::iter::once(&self.e))
            .chain(self.c.iter())
            .flat_map(|p| p.images().iter().map(|&a| a as u8))
            .collect()
    }

    /// Smallest [`MonodromyRep::image_key`] over relabelings that turn the
    /// real structure `t` into the aligned swap; equal exactly for pairs
    /// `(M, t)` related by a colour-preserving relabeling.
    pub fn aligned_key(&self, t: &Permutation) -> Vec<u8> {
        crate::permgroup::all_permutations(self.degree())
            .iter()
            .map(|sigma| {
                self.conjugated(&self.aligning_relabel(t, sigma))
                    .expect("aligning relabel preserves colours")
                    .image_key()
            })
            .min()
            .unwrap_or_default()
    }

    /// Genus of the covering surface from Riemann-Hurwitz, counting critical
    /// points: `g = (2t + Σ μ_k - 2d + 2) / 2`. When every real critical value
    /// carries a single critical point this is `(n - 2d + 2) / 2`.
    pub fn genus_from_counts(&self) -> Result<usize> {
        genus_from_critical_points(self.degree(), self.critical_point_count())
    }

    /// Conjugates every generator by a color-preserving permutation `j`.
    pub fn conjugated(&self, j: &Permutation) -> Result<MonodromyRep> {
        if j.len() != self.ground.size() {
            return invalid("conjugating permutation has the wrong size");
        }
        if !j.preserves(self.ground.whites()) {
            return invalid("conjugating permutation must preserve colors");
        }
        let conj = |p: &Permutation| p.conjugate(j).expect("sizes checked");
        Ok(MonodromyRep {
            ground: self.ground,
            x: self.x.iter().map(conj).collect(),
            e: conj(&self.e),
            c: self.c.iter().map(conj).collect(),
            e_supplied: self.e_supplied,
        })
    }

    /// Colour of sheet `a`.
    pub fn color(&self, a: usize) -> Color {
        self.ground.color(a)
    }
}

/// `g = (points - 2d + 2) / 2`, rejecting negative or half-integral values.
pub fn genus_from_critical_points(degree: usize, points: usize) -> Result<usize> {
    let twice = points as i64 - 2 * degree as i64 + 2;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::NonRealizable(format!(
            "{points} critical points at degree {degree} give 2g = {twice}"
        )));
    }
    Ok((twice / 2) as usize)
}

/// `(x_1 ∘ ... ∘ x_t)^-1`, the identity when `t = 0`.
pub fn derive_e(n: usize, x: &[Permutation]) -> Result<Permutation> {
    let mut product = Permutation::identity(n);
    for p in x {
        product = product.compose(p)?;
    }
    Ok(product.inverse())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GenericityMode {
    Strict,
    #[default]
    Geometric,
}

/// Where a genericity violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Cone(usize),
    Corner(usize),
    Reflection(usize),
    RealStructure,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Cone(i) => write!(f, "x_{i}"),
            Site::Corner(k) => write!(f, "corner {k}"),
            Site::Reflection(i) => write!(f, "c_{i}"),
            Site::RealStructure => f.write_str("real structure"),
        }
    }
}

impl Serialize for Site {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub site: Site,
    pub reason: String,
}

impl Violation {
    fn new(site: Site, reason: &str) -> Self {
        Violation {
            site,
            reason: reason.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericityReport {
    pub ok: bool,
    pub mode: GenericityMode,
    pub violations: Vec<Violation>,
}
