//! Exact single and composite Hurwitz numbers.
//!
//! `H_g(d^1..d^k)` counts connected degree `d = Σ d^j` coverings of a disk by
//! a genus `g` surface with `k` boundary circles of degrees `d^j` and `b`
//! simple branch points, weighted by `1/|Aut|`:
//! `H = #{(τ_1..τ_b) transpositions : τ_b ∘ ... ∘ τ_1 has cycle type (d^j),
//! <τ_i> transitive} / d!`.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::park::Park;

pub const DEFAULT_MAX_DEGREE: usize = 6;

/// Environment variable naming a persistent memo file.
pub const CACHE_ENV: &str = "PARKSCOPE_CACHE";

/// `b = 2g - 2 + k + Σ d^j`, the number of simple branch points.
pub fn branch_count(g: usize, degrees: &[usize]) -> Result<usize> {
    let b = signed_branch_count(g, degrees)?;
    usize::try_from(b).map_err(|_| {
        Error::NonRealizable(format!("genus {g} with boundary degrees {degrees:?} gives b = {b}"))
    })
}

fn signed_branch_count(g: usize, degrees: &[usize]) -> Result<i64> {
    if degrees.is_empty() {
        return invalid("at least one boundary degree is required");
    }
    if degrees.contains(&0) {
        return invalid("boundary degrees must be positive");
    }
    Ok(2 * g as i64 - 2 + degrees.len() as i64 + degrees.iter().sum::<usize>() as i64)
}

/// `(b_1 + ... + b_n)! / (b_1! ... b_n!)`.
pub fn interleaving_factor(bs: &[usize]) -> BigUint {
    let mut total = 0usize;
    let mut out = BigUint::one();
    for &b in bs {
        for i in 1..=b {
            total += 1;
            out = out * BigUint::from(total) / BigUint::from(i);
        }
    }
    out
}

/// `"num/den"`, or `"num"` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let parse = |s: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::InvalidArgument(format!("bad rational {text:?}: {e}")))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return invalid(format!("zero denominator in {text:?}"));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(text)?)),
    }
}

/// Cache key `"g:d1,d2,..."` with degrees ascending.
pub fn cache_key(g: usize, degrees: &[usize]) -> String {
    let mut d = degrees.to_vec();
    d.sort_unstable();
    let parts: Vec<String> = d.iter().map(ToString::to_string).collect();
    format!("{g}:{}", parts.join(","))
}

fn check_degree(degrees: &[usize], max_degree: usize) -> Result<usize> {
    let d: usize = degrees.iter().sum();
    if d > max_degree {
        return Err(Error::ResourceLimit(format!(
            "degree {d} exceeds the configured bound {max_degree}"
        )));
    }
    Ok(d)
}

/// Layered count over (partial product, blocks of the generated partition).
pub fn single_hurwitz_uncached(g: usize, degrees: &[usize], max_degree: usize) -> Result<BigRational> {
    let b = signed_branch_count(g, degrees)?;
    let d = check_degree(degrees, max_degree)?;
    if b < 0 {
        return Ok(BigRational::zero());
    }
    let mut target = degrees.to_vec();
    target.sort_unstable();
    let transpositions: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();

    type State = (Vec<u8>, Vec<u8>);
    let start: State = ((0..d as u8).collect(), (0..d as u8).collect());
    let mut layer: HashMap<State, u128> = HashMap::from([(start, 1)]);
    for _ in 0..b {
        let mut next: HashMap<State, u128> = HashMap::with_capacity(layer.len() * 2);
        for ((perm, blocks), count) in &layer {
            for &(i, j) in &transpositions {
                let p: Vec<u8> = perm
                    .iter()
                    .map(|&a| match a as usize {
                        x if x == i => j as u8,
                        x if x == j => i as u8,
                        _ => a,
                    })
                    .collect();
                let (bi, bj) = (blocks[i], blocks[j]);
                let merged: Vec<u8> = blocks.iter().map(|&x| if x == bj { bi } else { x }).collect();
                let slot = next.entry((p, canonical_blocks(&merged))).or_insert(0);
                *slot = slot
                    .checked_add(*count)
                    .ok_or_else(|| Error::ResourceLimit("transposition count overflows".into()))?;
            }
        }
        layer = next;
    }
    let mut total: u128 = 0;
    for ((perm, blocks), count) in layer {
        if blocks.iter().all(|&x| x == 0) && cycle_type(&perm) == target {
            total += count;
        }
    }
    Ok(BigRational::new(BigInt::from(total), factorial(d)))
}

/// Plain depth-first enumeration of all `b`-tuples; an independent oracle
/// for small cases.
pub fn single_hurwitz_naive(g: usize, degrees: &[usize]) -> Result<BigRational> {
    let b = signed_branch_count(g, degrees)?;
    if b < 0 {
        return Ok(BigRational::zero());
    }
    let d: usize = degrees.iter().sum();
    let mut target = degrees.to_vec();
    target.sort_unstable();
    let transpositions: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut count: u64 = 0;
    fn dfs(
        left: usize,
        d: usize,
        ts: &[(usize, usize)],
        chosen: &mut Vec<(usize, usize)>,
        target: &[usize],
        count: &mut u64,
    ) {
        if left == 0 {
            let mut perm: Vec<u8> = (0..d as u8).collect();
            let mut uf = crate::permgroup::UnionFind::new(d);
            for &(i, j) in chosen.iter() {
                for a in perm.iter_mut() {
                    if *a as usize == i {
                        *a = j as u8;
                    } else if *a as usize == j {
                        *a = i as u8;
                    }
                }
                uf.union(i, j);
            }
            if uf.set_count() == 1 && cycle_type(&perm) == target {
                *count += 1;
            }
            return;
        }
        for &t in ts {
            chosen.push(t);
            dfs(left - 1, d, ts, chosen, target, count);
            chosen.pop();
        }
    }
    dfs(b as usize, d, &transpositions, &mut chosen, &target, &mut count);
    Ok(BigRational::new(BigInt::from(count), factorial(d)))
}

fn canonical_blocks(blocks: &[u8]) -> Vec<u8> {
    let mut rename = [u8::MAX; 256];
    let mut next = 0u8;
    blocks
        .iter()
        .map(|&x| {
            if rename[x as usize] == u8::MAX {
                rename[x as usize] = next;
                next += 1;
            }
            rename[x as usize]
        })
        .collect()
}

fn cycle_type(perm: &[u8]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut a = start;
        while !seen[a] {
            seen[a] = true;
            a = perm[a] as usize;
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable();
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// A memo of single Hurwitz numbers, optionally backed by a JSON file.
///
/// Writers hold the lock while updating the map and rewriting the file
/// through a temporary sibling and a rename.
#[derive(Debug)]
pub struct HurwitzCache {
    path: Option<PathBuf>,
    map: Mutex<BTreeMap<String, String>>,
}

impl HurwitzCache {
    pub fn in_memory() -> Self {
        HurwitzCache {
            path: None,
            map: Mutex::new(BTreeMap::new()),
        }
    }

    /// Loads `path` if it exists; a missing file starts an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let map = match std::fs::read_to_string(&path) {
            Ok(text) if text.trim().is_empty() => BTreeMap::new(),
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| Error::InvalidArgument(format!("cache {}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(HurwitzCache {
            path: Some(path),
            map: Mutex::new(map),
        })
    }

    /// The cache named by `PARKSCOPE_CACHE`, or an in-memory one.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CACHE_ENV) {
            Some(p) if !p.is_empty() => HurwitzCache::open(PathBuf::from(p)),
            _ => Ok(HurwitzCache::in_memory()),
        }
    }

    pub fn get(&self, key: &str) -> Result<Option<BigRational>> {
        let map = self.map.lock().map_err(|_| Error::Internal("cache lock poisoned".into()))?;
        map.get(key).map(|v| parse_rational(v)).transpose()
    }

    pub fn insert(&self, key: &str, value: &BigRational) -> Result<()> {
        let mut map = self.map.lock().map_err(|_| Error::Internal("cache lock poisoned".into()))?;
        map.insert(key.to_string(), format_rational(value));
        if let Some(path) = &self.path {
            let text = serde_json::to_string_pretty(&*map)?;
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, path)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Single and composite Hurwitz numbers with a degree bound and a memo.
#[derive(Debug)]
pub struct HurwitzCalculator {
    pub max_degree: usize,
    cache: HurwitzCache,
}

impl HurwitzCalculator {
    pub fn new(max_degree: usize, cache: HurwitzCache) -> Self {
        HurwitzCalculator { max_degree, cache }
    }

    pub fn cache(&self) -> &HurwitzCache {
        &self.cache
    }

    pub fn single(&self, g: usize, degrees: &[usize]) -> Result<BigRational> {
        signed_branch_count(g, degrees)?;
        check_degree(degrees, self.max_degree)?;
        let key = cache_key(g, degrees);
        if let Some(v) = self.cache.get(&key)? {
            return Ok(v);
        }
        let v = single_hurwitz_uncached(g, degrees, self.max_degree)?;
        self.cache.insert(&key, &v)?;
        Ok(v)
    }

    /// Multinomial of entrance indices times the single Hurwitz numbers of
    /// the entrances.
    pub fn park(&self, park: &Park) -> Result<BigRational> {
        let signatures = park.entrance_signatures()?;
        let mut bs = Vec::new();
        let mut product = BigRational::one();
        for s in &signatures {
            let b = usize::try_from(s.b)
                .map_err(|_| Error::NonRealizable(format!("entrance with index {}", s.b)))?;
            bs.push(b);
            product *= self.single(s.g, &s.degrees)?;
        }
        Ok(product * BigRational::from_integer(BigInt::from(interleaving_factor(&bs))))
    }
}

fn shared() -> Result<&'static HurwitzCalculator> {
    static SHARED: OnceLock<HurwitzCalculator> = OnceLock::new();
    if let Some(c) = SHARED.get() {
        return Ok(c);
    }
    let calc = HurwitzCalculator::new(DEFAULT_MAX_DEGREE, HurwitzCache::from_env()?);
    Ok(SHARED.get_or_init(|| calc))
}

/// `H_g(degrees)` with the default degree bound and the process-wide memo.
pub fn single_hurwitz(g: usize, degrees: &[usize]) -> Result<BigRational> {
    shared()?.single(g, degrees)
}

/// The Hurwitz number of a park with the default bound and memo.
pub fn park_hurwitz(park: &Park) -> Result<BigRational> {
    shared()?.park(park)
}
