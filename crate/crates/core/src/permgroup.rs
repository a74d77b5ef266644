//! Permutations of a finite two-colored ground set.
//!
//! The ground set of a degree `d` representation has `2d` elements. The sheet
//! `(i, w)` is encoded as `i - 1` and `(i, b)` as `d + i - 1`, so the color of
//! an element is decided by a single comparison.
//!
//! Products are applied right to left: `p.compose(&q)` is the map
//! `a -> p(q(a))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::White => f.write_str("white"),
            Color::Black => f.write_str("black"),
        }
    }
}

/// The `2d` sheets over a base point: whites `0..d`, blacks `d..2d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    degree: usize,
}

impl GroundSet {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 {
            return invalid("ground set degree must be positive");
        }
        Ok(GroundSet { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        2 * self.degree
    }

    pub fn color(&self, a: usize) -> Color {
        if a < self.degree {
            Color::White
        } else {
            Color::Black
        }
    }

    pub fn white(&self, i: usize) -> usize {
        i
    }

    pub fn black(&self, i: usize) -> usize {
        self.degree + i
    }

    pub fn whites(&self) -> std::ops::Range<usize> {
        0..self.degree
    }

    pub fn blacks(&self) -> std::ops::Range<usize> {
        self.degree..2 * self.degree
    }
}

/// A bijection of `0..n`, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.images
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &b in &images {
            if b >= n || seen[b] {
                return invalid(format!("{images:?} is not a bijection of 0..{n}"));
            }
            seen[b] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return invalid(format!("cycles {cycles:?} are not disjoint cycles on 0..{n}"));
                }
                touched[a] = true;
                images[a] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition `(a b)` on `0..n`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a == b {
            return invalid("a transposition needs two distinct points");
        }
        Permutation::from_cycles(n, &[&[a, b]])
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.images[a]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(a, &b)| a == b)
    }

    /// `self ∘ q`: apply `q` first.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        if self.len() != q.len() {
            return invalid(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                q.len()
            ));
        }
        Ok(Permutation {
            images: q.images.iter().map(|&b| self.images[b]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (a, &b) in self.images.iter().enumerate() {
            images[b] = a;
        }
        Permutation { images }
    }

    /// `j ∘ self ∘ j⁻¹`.
    pub fn conjugate(&self, j: &Permutation) -> Result<Permutation> {
        if self.len() != j.len() {
            return invalid(format!(
                "cannot conjugate a permutation of size {} by one of size {}",
                self.len(),
                j.len()
            ));
        }
        let mut images = vec![0; self.len()];
        for (a, &b) in self.images.iter().enumerate() {
            images[j.images[a]] = j.images[b];
        }
        Ok(Permutation { images })
    }

    /// Cycles of the permutation, optionally restricted to an invariant subset.
    ///
    /// Cycles are rotated to start at their minimum and sorted by it; fixed
    /// points appear as singletons.
    pub fn cycles(&self, restrict: Option<&[usize]>) -> Result<Vec<Vec<usize>>> {
        let n = self.len();
        let domain: Vec<usize> = match restrict {
            None => (0..n).collect(),
            Some(set) => {
                let mut inside = vec![false; n];
                for &a in set {
                    if a >= n {
                        return invalid(format!("element {a} outside ground set of size {n}"));
                    }
                    inside[a] = true;
                }
                for &a in set {
                    if !inside[self.images[a]] {
                        return invalid(format!(
                            "restriction set is not invariant: {a} maps to {}",
                            self.images[a]
                        ));
                    }
                }
                let mut v: Vec<usize> = set.to_vec();
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for &start in &domain {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut a = self.images[start];
            while a != start {
                seen[a] = true;
                cycle.push(a);
                a = self.images[a];
            }
            out.push(cycle);
        }
        Ok(out)
    }

    /// Sorted multiset of cycle lengths over the whole ground set.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lengths: Vec<usize> = self
            .cycles(None)
            .expect("unrestricted cycles never fail")
            .iter()
            .map(Vec::len)
            .collect();
        lengths.sort_unstable();
        lengths
    }

    /// Non-trivial cycles whose points all lie in `range`.
    pub fn moved_within(&self, range: std::ops::Range<usize>) -> Vec<Vec<usize>> {
        let subset: Vec<usize> = range.collect();
        match self.cycles(Some(&subset)) {
            Ok(cs) => cs.into_iter().filter(|c| c.len() > 1).collect(),
            Err(_) => Vec::new(),
        }
    }

    /// Whether the permutation maps `range` onto itself.
    pub fn preserves(&self, range: std::ops::Range<usize>) -> bool {
        range.clone().all(|a| range.contains(&self.images[a]))
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation without fixed points, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles(None).map_err(|_| fmt::Error)?;
        let mut any = false;
        for c in cycles.iter().filter(|c| c.len() > 1) {
            any = true;
            let parts: Vec<String> = c.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }

    /// Blocks sorted by minimum element, each block sorted.
    pub fn blocks(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut index_of_root = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            let r = self.find(a);
            if index_of_root[r] == usize::MAX {
                index_of_root[r] = out.len();
                out.push(Vec::new());
            }
            out[index_of_root[r]].push(a);
        }
        out
    }
}

/// Orbits of the group generated by `generators` on `0..n`, or on an
/// invariant subset when `restrict` is given.
///
/// Orbits are sorted internally and ordered by minimum element.
pub fn orbits(
    n: usize,
    generators: &[&Permutation],
    restrict: Option<&[usize]>,
) -> Result<Vec<Vec<usize>>> {
    for g in generators {
        if g.len() != n {
            return invalid(format!(
                "generator of size {} on a ground set of size {n}",
                g.len()
            ));
        }
    }
    let mut uf = UnionFind::new(n);
    for g in generators {
        for a in 0..n {
            uf.union(a, g.apply(a));
        }
    }
    match restrict {
        None => Ok(uf.blocks()),
        Some(set) => {
            let mut inside = vec![false; n];
            for &a in set {
                if a >= n {
                    return invalid(format!("element {a} outside ground set of size {n}"));
                }
                inside[a] = true;
            }
            for g in generators {
                for &a in set {
                    if !inside[g.apply(a)] {
                        return invalid(format!(
                            "restriction set is not invariant under {g}: {a} maps to {}",
                            g.apply(a)
                        ));
                    }
                }
            }
            Ok(uf
                .blocks()
                .into_iter()
                .filter(|b| inside[b[0]])
                .collect())
        }
    }
}

/// All permutations of `0..n` in lexicographic order of image arrays.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation {
            images: images.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| images[i] < images[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| images[j] > images[i]).unwrap();
        images.swap(i, j);
        images[i + 1..].reverse();
    }
    out
}

/// All involutions (including the identity) of `0..n`.
pub fn all_involutions(n: usize) -> Vec<Permutation> {
    fn extend(images: &mut Vec<usize>, from: usize, out: &mut Vec<Permutation>) {
        let n = images.len();
        let Some(a) = (from..n).find(|&a| images[a] == usize::MAX) else {
            out.push(Permutation {
                images: images.clone(),
            });
            return;
        };
        images[a] = a;
        extend(images, a + 1, out);
        for b in a + 1..n {
            if images[b] == usize::MAX {
                images[a] = b;
                images[b] = a;
                extend(images, a + 1, out);
                images[b] = usize::MAX;
            }
        }
        images[a] = usize::MAX;
    }
    let mut out = Vec::new();
    extend(&mut vec![usize::MAX; n], 0, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(images: &[usize]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let id = Permutation::identity(3);
        let t01 = p(&[1, 0, 2]);
        let t12 = p(&[0, 2, 1]);
        assert_eq!(id.compose(&t01).unwrap(), t01);
        assert!(t01.compose(&t01).unwrap().is_identity());
        // q = (1 2) first, then p = (0 1): 0 -> 1, 1 -> 2, 2 -> 0
        assert_eq!(t01.compose(&t12).unwrap(), p(&[1, 2, 0]));
        assert!(matches!(
            t01.compose(&Permutation::identity(4)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn inverse_examples() {
        assert!(Permutation::identity(5).inverse().is_identity());
        assert_eq!(p(&[1, 0, 2]).inverse(), p(&[1, 0, 2]));
        // (0 1 2) -> (0 2 1)
        assert_eq!(p(&[1, 2, 0]).inverse(), p(&[2, 0, 1]));
    }

    #[test]
    fn cycles_examples() {
        assert_eq!(
            Permutation::identity(4).cycles(None).unwrap(),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
        assert_eq!(
            p(&[1, 2, 0, 3]).cycles(None).unwrap(),
            vec![vec![0, 1, 2], vec![3]]
        );
        let q = Permutation::from_cycles(4, &[&[0, 3], &[1, 2]]).unwrap();
        assert_eq!(q.cycles(Some(&[1, 2])).unwrap(), vec![vec![1, 2]]);
        assert!(matches!(q.cycles(Some(&[0, 1])), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn orbits_examples() {
        assert_eq!(orbits(3, &[], None).unwrap(), vec![vec![0], vec![1], vec![2]]);
        let t01 = p(&[1, 0, 2]);
        let t12 = p(&[0, 2, 1]);
        assert_eq!(orbits(3, &[&t01], None).unwrap(), vec![vec![0, 1], vec![2]]);
        assert_eq!(orbits(3, &[&t01, &t12], None).unwrap(), vec![vec![0, 1, 2]]);
        assert!(orbits(3, &[&t01], Some(&[1, 2])).is_err());
        assert_eq!(orbits(3, &[&t01], Some(&[0, 1])).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn conjugate_examples() {
        let t01 = p(&[1, 0, 2]);
        let t02 = p(&[2, 1, 0]);
        assert_eq!(t01.conjugate(&Permutation::identity(3)).unwrap(), t01);
        assert_eq!(t01.conjugate(&t02).unwrap(), p(&[0, 2, 1]));
        let c3 = p(&[1, 2, 0]);
        assert_eq!(c3.conjugate(&t01).unwrap().cycle_type(), vec![3]);
    }

    #[test]
    fn from_images_rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![2, 0]).is_err());
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
        let q: Permutation = serde_json::from_str("[1,0,2]").unwrap();
        assert_eq!(serde_json::to_string(&q).unwrap(), "[1,0,2]");
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(all_permutations(4).len(), 24);
        assert_eq!(all_involutions(4).len(), 10);
        assert_eq!(all_involutions(5).len(), 26);
        assert_eq!(all_permutations(1), vec![Permutation::identity(1)]);
    }

    #[test]
    fn display_uses_cycle_notation() {
        assert_eq!(p(&[1, 2, 0, 3]).to_string(), "(0 1 2)");
        assert_eq!(Permutation::identity(2).to_string(), "()");
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
        (1..=max)
            .prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    fn arb_pair(max: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
        (1..=max).prop_flat_map(|n| {
            let v: Vec<usize> = (0..n).collect();
            (Just(v.clone()).prop_shuffle(), Just(v).prop_shuffle()).prop_map(|(a, b)| {
                (
                    Permutation::from_images(a).unwrap(),
                    Permutation::from_images(b).unwrap(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn product_with_inverse_is_all_fixed_points(q in arb_perm(12)) {
            let r = q.compose(&q.inverse()).unwrap();
            prop_assert!(r.cycles(None).unwrap().iter().all(|c| c.len() == 1));
        }

        #[test]
        fn conjugation_preserves_cycle_type((q, j) in arb_pair(12)) {
            prop_assert_eq!(q.conjugate(&j).unwrap().cycle_type(), q.cycle_type());
        }

        #[test]
        fn cycles_lie_inside_orbits((a, b) in arb_pair(12)) {
            let orbs = orbits(a.len(), &[&a, &b], None).unwrap();
            let mut block = vec![0; a.len()];
            for (i, o) in orbs.iter().enumerate() {
                for &x in o { block[x] = i; }
            }
            for c in a.cycles(None).unwrap() {
                prop_assert!(c.iter().all(|&x| block[x] == block[c[0]]));
            }
        }

        #[test]
        fn cycles_and_orbits_are_deterministic((a, b) in arb_pair(10)) {
            let s1 = serde_json::to_string(&(a.cycles(None).unwrap(), orbits(a.len(), &[&a, &b], None).unwrap())).unwrap();
            let s2 = serde_json::to_string(&(a.cycles(None).unwrap(), orbits(a.len(), &[&a, &b], None).unwrap())).unwrap();
            prop_assert_eq!(s1, s2);
        }
    }
}
