//! Park isomorphism, the orbit-and-conjugation criterion for equivalence of
//! representations, exhaustive enumeration and classification.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::extraction::monodromy_to_park;
use crate::iso::{self, ParkMap};
use crate::monodromy::{GenericityMode, MonodromyRep};
use crate::park::{Park, TopSummary};
use crate::permgroup::{all_involutions, all_permutations, orbits, Permutation};

/// A structure-preserving bijection `p1 -> p2` commuting with the
/// involutions, if one exists.
pub fn park_isomorphic(p1: &Park, p2: &Park, allow_reflection: bool) -> Result<Option<ParkMap>> {
    iso::isomorphism(p1, p2, allow_reflection)
}

/// Searches for a colour-preserving `j` with `j e_1 j^-1 = e_2`,
/// `j c_1 j^-1 = c'_1` and `j` carrying the orbits of `<x_i>` in `m1` onto
/// those in `m2`. Finding one certifies that the two functions are
/// topologically equivalent; not finding one decides nothing.
pub fn monodromy_equivalent(m1: &MonodromyRep, m2: &MonodromyRep) -> Result<Option<Permutation>> {
    let params = |m: &MonodromyRep| (m.degree(), m.cone_points(), m.corner_points());
    if params(m1) != params(m2) {
        return invalid(format!(
            "parameters (d, t, s) differ: {:?} vs {:?}",
            params(m1),
            params(m2)
        ));
    }
    let d = m1.degree();
    let n = 2 * d;
    let (c1, c2) = (&m1.c()[0], &m2.c()[0]);
    let partition = |m: &MonodromyRep| -> Result<Vec<usize>> {
        let xs: Vec<&Permutation> = m.x().iter().collect();
        let mut label = vec![0; n];
        for (i, orbit) in orbits(n, &xs, None)?.iter().enumerate() {
            for &a in orbit {
                label[a] = i;
            }
        }
        Ok(label)
    };
    let (o1, o2) = (partition(m1)?, partition(m2)?);
    for sigma in all_permutations(d) {
        let mut images = vec![0; n];
        for w in 0..d {
            images[w] = sigma.apply(w);
        }
        // j(c_1 w) = c'_1(j w) fixes j on black sheets
        for w in 0..d {
            images[c1.apply(w)] = c2.apply(images[w]);
        }
        let Ok(j) = Permutation::from_images(images) else {
            continue;
        };
        if !j.preserves(0..d) {
            continue;
        }
        if m1.e().conjugate(&j)? != *m2.e() || c1.conjugate(&j)? != *c2 {
            continue;
        }
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut back: HashMap<usize, usize> = HashMap::new();
        let orbit_ok = (0..n).all(|a| {
            let (x, y) = (o1[a], o2[j.apply(a)]);
            *seen.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x
        });
        if orbit_ok {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Dedup {
    #[default]
    None,
    JEquivalence,
    ParkIsomorphism,
}

impl std::str::FromStr for Dedup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" | "none" => Ok(Dedup::None),
            "jequiv" | "j_equivalence" => Ok(Dedup::JEquivalence),
            "park" | "park_isomorphism" => Ok(Dedup::ParkIsomorphism),
            other => invalid(format!("unknown dedup mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_sheets: usize,
    pub max_generators: usize,
    /// Bound on the number of generator tuples examined.
    pub max_search: u128,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_sheets: 10,
            max_generators: 8,
            max_search: 2_000_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnumeratedClass {
    pub representative: MonodromyRep,
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub degree: usize,
    pub cone_points: usize,
    pub corner_points: usize,
    pub dedup: Dedup,
    /// Representations whose real structure is the aligned swap `w_a <-> b_a`.
    pub raw_count: usize,
    pub classes: Vec<EnumeratedClass>,
    /// With park deduplication: the class count when corner orders may also
    /// be reversed.
    pub reflection_classes: Option<usize>,
}

/// All valid generic representations with parameters `(d, t, s)` whose real
/// structure is the aligned swap. Every valid generic representation is
/// conjugate by a colour-preserving relabeling to one of these.
///
/// With the aligned real structure, `x_i` is `(w_a w_b)(b_a b_b)` and `c_i`
/// sends `w_a` to `b_{π_i(a)}` and `b_a` to `w_{π_i(a)}` for an involution
/// `π_i`; the seam forces `π_{s+1} = ε^-1 π_1 ε` where `ε` is `e` on whites.
pub fn generate(d: usize, t: usize, s: usize, limits: &EnumerationLimits) -> Result<Vec<MonodromyRep>> {
    if d == 0 {
        return invalid("degree must be positive");
    }
    if 2 * d > limits.max_sheets {
        return Err(Error::ResourceLimit(format!(
            "2d = {} exceeds the sheet bound {}",
            2 * d,
            limits.max_sheets
        )));
    }
    if t + s > limits.max_generators {
        return Err(Error::ResourceLimit(format!(
            "t + s = {} exceeds the generator bound {}",
            t + s,
            limits.max_generators
        )));
    }
    let n = 2 * d;
    let transpositions: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let involutions = all_involutions(d);
    let space = (transpositions.len() as u128).pow(t as u32) * (involutions.len() as u128).pow(s as u32 + 1);
    if space > limits.max_search {
        return Err(Error::ResourceLimit(format!(
            "search space of {space} tuples exceeds the bound {}",
            limits.max_search
        )));
    }
    if t > 0 && transpositions.is_empty() {
        return Ok(Vec::new());
    }
    let x_of = |(a, b): (usize, usize)| {
        Permutation::from_cycles(n, &[&[a, b], &[d + a, d + b]]).expect("valid cycles")
    };
    let c_of = |pi: &Permutation| {
        let mut images = vec![0; n];
        for a in 0..d {
            images[a] = d + pi.apply(a);
            images[d + a] = pi.apply(a);
        }
        Permutation::from_images(images).expect("valid reflection")
    };
    let is_corner = |p: &Permutation, q: &Permutation| {
        let r = p.compose(q).expect("same size");
        let lens: Vec<usize> = r.moved_within(0..d).iter().map(Vec::len).collect();
        lens == [2] || lens == [2, 2]
    };

    // all x-tuples, indexed so the outer loop can run in parallel
    let x_count = transpositions.len().pow(t as u32);
    let results: Vec<Vec<MonodromyRep>> = (0..x_count.max(1))
        .into_par_iter()
        .map(|mut code| {
            let mut xs = Vec::with_capacity(t);
            for _ in 0..t {
                xs.push(x_of(transpositions[code % transpositions.len()]));
                code /= transpositions.len();
            }
            let e = crate::monodromy::derive_e(n, &xs).expect("sizes agree");
            let eps: Vec<usize> = (0..d).map(|a| e.apply(a)).collect();
            let mut found = Vec::new();
            // depth-first over π_1..π_s with the corner condition between neighbours
            let mut chosen: Vec<Permutation> = Vec::with_capacity(s.max(1));
            fn walk(
                count: usize,
                involutions: &[Permutation],
                chosen: &mut Vec<Permutation>,
                done: &mut dyn FnMut(&[Permutation]),
                is_corner: &dyn Fn(&Permutation, &Permutation) -> bool,
            ) {
                if chosen.len() == count {
                    done(chosen);
                    return;
                }
                for pi in involutions {
                    if let Some(prev) = chosen.last() {
                        if !is_corner(prev, pi) {
                            continue;
                        }
                    }
                    chosen.push(pi.clone());
                    walk(count, involutions, chosen, done, is_corner);
                    chosen.pop();
                }
            }
            let mut done = |pis: &[Permutation]| {
                // π_{s+1} = ε^-1 π_1 ε on white indices
                let first = &pis[0];
                let last_images: Vec<usize> = (0..d)
                    .map(|a| {
                        let b = first.apply(eps[a]);
                        eps.iter().position(|&x| x == b).expect("ε is a bijection")
                    })
                    .collect();
                let last = Permutation::from_images(last_images).expect("conjugate is a bijection");
                let mut cs: Vec<Permutation> = pis.iter().map(&c_of).collect();
                if s == 0 {
                    if last != pis[0] {
                        return;
                    }
                } else {
                    if !is_corner(&pis[s - 1], &last) {
                        return;
                    }
                    cs.push(c_of(&last));
                }
                let Ok(m) = MonodromyRep::new(d, xs.clone(), None, cs) else {
                    return;
                };
                if m.is_transitive()
                    && m.validate_relations().ok
                    && m.validate_genericity(GenericityMode::Geometric).ok
                {
                    found.push(m);
                }
            };
            walk(s.max(1), &involutions, &mut chosen, &mut done, &is_corner);
            found
        })
        .collect();
    let mut all: Vec<MonodromyRep> = results.into_iter().flatten().collect();
    all.sort_by_cached_key(MonodromyRep::image_key);
    all.dedup_by(|a, b| a.image_key() == b.image_key());
    Ok(all)
}

/// Key that is equal exactly for representations satisfying the
/// orbit-and-conjugation criterion with each other.
fn j_key(m: &MonodromyRep) -> Vec<u8> {
    let d = m.degree();
    let n = 2 * d;
    let c1 = &m.c()[0];
    let xs: Vec<&Permutation> = m.x().iter().collect();
    let orbit_list = orbits(n, &xs, None).expect("sizes agree");
    all_permutations(d)
        .iter()
        .map(|sigma| {
            // j sends c_1 to the aligned swap
            let mut images = vec![0; n];
            for w in 0..d {
                images[w] = sigma.apply(w);
                images[c1.apply(w)] = d + sigma.apply(w);
            }
            let j = Permutation::from_images(images).expect("bijection");
            let e = m.e().conjugate(&j).expect("sizes agree");
            let mut blocks: Vec<Vec<u8>> = orbit_list
                .iter()
                .map(|o| {
                    let mut b: Vec<u8> = o.iter().map(|&a| j.apply(a) as u8).collect();
                    b.sort_unstable();
                    b
                })
                .collect();
            blocks.sort();
            let mut key: Vec<u8> = e.images().iter().map(|&a| a as u8).collect();
            for b in blocks {
                key.push(u8::MAX);
                key.extend(b);
            }
            key
        })
        .min()
        .unwrap_or_default()
}

/// Key equal exactly for representations conjugate by a relabeling that
/// keeps the aligned real structure.
fn conjugacy_key(m: &MonodromyRep) -> Vec<u8> {
    let t = m.canonical_real_structure().expect("generic input has a real structure");
    m.aligned_key(&t)
}

fn group_by_key(reps: &[MonodromyRep], key: impl Fn(&MonodromyRep) -> Vec<u8> + Sync + Send) -> Vec<Vec<usize>> {
    let keys: Vec<Vec<u8>> = reps.par_iter().map(key).collect();
    let mut groups: BTreeMap<&[u8], Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        groups.entry(k).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// Partitions parks into isomorphism classes: first by type summary, then
/// by pairwise isomorphism against each class's first member.
fn park_classes(parks: &[(Park, TopSummary)], allow_reflection: bool) -> Result<Vec<Vec<usize>>> {
    let mut buckets: BTreeMap<&TopSummary, Vec<usize>> = BTreeMap::new();
    for (i, (_, s)) in parks.iter().enumerate() {
        buckets.entry(s).or_default().push(i);
    }
    let bucket_list: Vec<Vec<usize>> = buckets.into_values().collect();
    let per_bucket: Vec<Result<Vec<Vec<usize>>>> = bucket_list
        .par_iter()
        .map(|members| {
            let mut classes: Vec<Vec<usize>> = Vec::new();
            for &i in members {
                let mut placed = false;
                for class in &mut classes {
                    if park_isomorphic(&parks[class[0]].0, &parks[i].0, allow_reflection)?.is_some() {
                        class.push(i);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    classes.push(vec![i]);
                }
            }
            Ok(classes)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_bucket {
        out.extend(r?);
    }
    out.sort_by_key(|c| c[0]);
    Ok(out)
}

fn representative(reps: &[MonodromyRep], members: &[usize]) -> MonodromyRep {
    members
        .iter()
        .map(|&i| &reps[i])
        .min_by_key(|m| m.to_json())
        .expect("classes are non-empty")
        .clone()
}

/// Enumerates `(d, t, s)` and deduplicates as requested. Classes are listed
/// by their smallest serialized member.
pub fn enumerate_monodromies(
    d: usize,
    t: usize,
    s: usize,
    dedup: Dedup,
    limits: &EnumerationLimits,
) -> Result<Enumeration> {
    let reps = generate(d, t, s, limits)?;
    let mut reflection_classes = None;
    let groups: Vec<Vec<usize>> = match dedup {
        Dedup::None => (0..reps.len()).map(|i| vec![i]).collect(),
        Dedup::JEquivalence => group_by_key(&reps, j_key),
        Dedup::ParkIsomorphism => {
            let conj = group_by_key(&reps, conjugacy_key);
            let parks: Vec<(Park, TopSummary)> = conj
                .par_iter()
                .map(|g| {
                    let p = monodromy_to_park(&reps[g[0]])?;
                    let s = p.type_summary()?;
                    Ok((p, s))
                })
                .collect::<Result<_>>()?;
            let merge = |classes: Vec<Vec<usize>>| -> Vec<Vec<usize>> {
                let mut out: Vec<Vec<usize>> = classes
                    .into_iter()
                    .map(|c| {
                        let mut members: Vec<usize> = c.iter().flat_map(|&k| conj[k].iter().copied()).collect();
                        members.sort_unstable();
                        members
                    })
                    .collect();
                out.sort_by_key(|c| c[0]);
                out
            };
            let mirrored = park_classes(&parks, true)?;
            reflection_classes = Some(mirrored.len());
            merge(park_classes(&parks, false)?)
        }
    };
    let mut classes: Vec<EnumeratedClass> = groups
        .iter()
        .map(|g| EnumeratedClass {
            representative: representative(&reps, g),
            size: g.len(),
        })
        .collect();
    classes.sort_by_cached_key(|c| c.representative.to_json());
    Ok(Enumeration {
        degree: d,
        cone_points: t,
        corner_points: s,
        dedup,
        raw_count: reps.len(),
        classes,
        reflection_classes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub class: usize,
    pub summary: TopSummary,
    /// Indices into the classified list.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassTable {
    pub rows: Vec<ClassRow>,
}

impl ClassTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Aligned columns: class, d, g, n, t, s, member indices.
    pub fn to_text(&self) -> String {
        let header = ["class", "d", "g", "n", "t", "s", "members"];
        let rows: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                let members: Vec<String> = r.members.iter().map(ToString::to_string).collect();
                [
                    r.class.to_string(),
                    r.summary.d.to_string(),
                    r.summary.g.to_string(),
                    r.summary.n.to_string(),
                    r.summary.t.to_string(),
                    r.summary.s.to_string(),
                    members.join(","),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[&str]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}", w = *w))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &header);
        for r in &rows {
            let cells: Vec<&str> = r.iter().map(String::as_str).collect();
            line(&mut out, &cells);
        }
        out
    }
}

/// Groups representations by type summary, then by park isomorphism.
pub fn classify(reps: &[MonodromyRep]) -> Result<ClassTable> {
    let parks: Vec<(Park, TopSummary)> = reps
        .par_iter()
        .map(|m| {
            let p = monodromy_to_park(m)?;
            let s = p.type_summary()?;
            Ok((p, s))
        })
        .collect::<Result<_>>()?;
    let classes = park_classes(&parks, false)?;
    let mut rows: Vec<ClassRow> = classes
        .into_iter()
        .map(|members| ClassRow {
            class: 0,
            summary: parks[members[0]].1.clone(),
            members,
        })
        .collect();
    rows.sort_by(|a, b| a.summary.cmp(&b.summary).then(a.members[0].cmp(&b.members[0])));
    for (i, r) in rows.iter_mut().enumerate() {
        r.class = i + 1;
    }
    Ok(ClassTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::fixtures::{degree_one, f3, two_real};

    #[test]
    fn representation_is_equivalent_to_itself() {
        let m = f3();
        let j = monodromy_equivalent(&m, &m).unwrap().unwrap();
        assert_eq!(m.e().conjugate(&j).unwrap(), *m.e());
    }

    #[test]
    fn conjugate_is_equivalent() {
        let m = two_real();
        let j0 = Permutation::from_cycles(6, &[&[0, 2], &[4, 5]]).unwrap();
        let n = m.conjugated(&j0).unwrap();
        assert!(monodromy_equivalent(&m, &n).unwrap().is_some());
    }

    #[test]
    fn parameter_mismatch_is_invalid() {
        assert!(matches!(monodromy_equivalent(&f3(), &two_real()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn degree_one_has_one_class() {
        let e = enumerate_monodromies(1, 0, 0, Dedup::ParkIsomorphism, &EnumerationLimits::default()).unwrap();
        assert_eq!(e.classes.len(), 1);
        assert_eq!(e.raw_count, 1);
        assert_eq!(e.classes[0].representative.c()[0], *degree_one().c().first().unwrap());
    }

    #[test]
    fn dedup_counts_are_monotone() {
        let limits = EnumerationLimits::default();
        let raw = enumerate_monodromies(3, 1, 2, Dedup::None, &limits).unwrap();
        let j = enumerate_monodromies(3, 1, 2, Dedup::JEquivalence, &limits).unwrap();
        let p = enumerate_monodromies(3, 1, 2, Dedup::ParkIsomorphism, &limits).unwrap();
        assert!(p.classes.len() <= j.classes.len());
        assert!(j.classes.len() <= raw.classes.len());
        assert_eq!(raw.classes.len(), raw.raw_count);
    }

    #[test]
    fn classify_groups_conjugates() {
        let m = two_real();
        let j0 = Permutation::from_cycles(6, &[&[0, 1], &[3, 4]]).unwrap();
        let table = classify(&[m.clone(), m.conjugated(&j0).unwrap()]).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].members, vec![0, 1]);
        let table = classify(&[f3(), two_real()]).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(classify(&[]).unwrap().rows.is_empty());
        assert!(table.to_text().starts_with("class"));
    }
}
