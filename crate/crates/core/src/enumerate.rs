//! Enumeration of collared prototiles, vertex stars and symmetric corona
//! chains inside large supertiles.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::context::{CollarConvention, Context};
use crate::error::{Error, Result};
use crate::field::ExactScalar;
use crate::kernel::{self, PlanePoint};
use crate::par;
use crate::patch::{anchored_key, canonicalize_with_anchor, symmetry_group, CanonicalKey, Patch};
use crate::substitution::{inflate_all, subdivision_rule, supertile, Supertile};
use crate::tile::Chirality;

/// A supertile together with its spatial index.
pub struct LevelContext {
    pub supertile: Supertile,
    pub context: Context,
}

/// Shared, lazily built contexts by level.
pub fn level_context(level: u32) -> Result<Arc<LevelContext>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<LevelContext>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("cache lock").get(&level) {
        return Ok(c.clone());
    }
    let s = supertile(level)?;
    let context = Context::new(s.tiles.clone());
    let built = Arc::new(LevelContext {
        supertile: s,
        context,
    });
    Ok(cache
        .lock()
        .expect("cache lock")
        .entry(level)
        .or_insert(built)
        .clone())
}

/// The collared patch of tile `i`: the tile and its 1-corona, with the
/// centre tile first.
pub fn collared_patch(ctx: &Context, i: usize, conv: CollarConvention) -> Result<Patch> {
    let corona = ctx.corona(&[i], 1, conv)?;
    let mut tiles = vec![ctx.tile(i).clone()];
    tiles.extend(corona.into_iter().filter(|&j| j != i).map(|j| ctx.tile(j).clone()));
    Ok(Patch::new(tiles))
}

/// Key of a collared tile, anchored at its centre.
pub fn collared_key(ctx: &Context, i: usize, conv: CollarConvention) -> Result<CanonicalKey> {
    Ok(anchored_key(&collared_patch(ctx, i, conv)?, 0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollaredClass {
    pub key: CanonicalKey,
    /// Occurrences among the surrounded tiles of the context.
    pub count_context: u64,
    pub center_chirality: Chirality,
    pub symmetry_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub level: u32,
    pub convention: CollarConvention,
    /// Sorted by key hash.
    pub classes: Vec<CollaredClass>,
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn keys(&self) -> Vec<&CanonicalKey> {
        self.classes.iter().map(|c| &c.key).collect()
    }

    pub fn index_of(&self, key: &CanonicalKey) -> Option<usize> {
        self.classes.binary_search_by(|c| c.key.cmp(key)).ok()
    }

    pub fn same_classes(&self, other: &Catalog) -> bool {
        self.keys() == other.keys()
    }
}

/// Collared classes of all surrounded tiles of supertile(`level`).
pub fn collared_catalog(level: u32, conv: CollarConvention) -> Result<Catalog> {
    let lc = level_context(level)?;
    let ctx = &lc.context;
    let idx: Vec<usize> = (0..ctx.len()).filter(|&i| ctx.is_surrounded(i)).collect();
    let keys = par::map(&idx, |&i| collared_key(ctx, i, conv));
    let mut counts: BTreeMap<CanonicalKey, u64> = BTreeMap::new();
    for k in keys {
        *counts.entry(k?).or_default() += 1;
    }
    let classes = counts
        .into_iter()
        .map(|(key, n)| {
            let symmetry_order = symmetry_group(&key.representative()).order;
            CollaredClass {
                center_chirality: key.anchor_chirality(),
                key,
                count_context: n,
                symmetry_order,
            }
        })
        .collect();
    Ok(Catalog {
        level,
        convention: conv,
        classes,
    })
}

/// Collared classes at `level`, checked against `level + 1`.
pub fn enumerate_collared_prototiles(level: u32, conv: CollarConvention) -> Result<Catalog> {
    let a = collared_catalog(level, conv)?;
    let b = collared_catalog(level + 1, conv)?;
    if !a.same_classes(&b) {
        return Err(Error::NonStabilization {
            level: level + 1,
            previous: a.len(),
            current: b.len(),
        });
    }
    Ok(a)
}

/// Searches `from..=max_level` for the first level whose catalogue equals
/// the next one.
pub fn stabilized_collared(from: u32, max_level: u32, conv: CollarConvention) -> Result<Catalog> {
    let mut prev = collared_catalog(from, conv)?;
    for level in from + 1..=max_level {
        let next = collared_catalog(level, conv)?;
        if prev.same_classes(&next) {
            return Ok(prev);
        }
        prev = next;
    }
    Err(Error::NonStabilization {
        level: max_level,
        previous: prev.len(),
        current: prev.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterKind {
    Vertex,
    Midpoint,
    /// Midpoint of the common segment of two edge-sharing tiles.
    Segment,
}

/// Star centres of a context: every tile vertex, and every hypotenuse
/// midpoint that is not a vertex.
pub fn star_centers(ctx: &Context) -> Vec<(ExactScalar, CenterKind)> {
    let mut seen: HashSet<ExactScalar> = HashSet::new();
    let mut out = Vec::new();
    for t in ctx.tiles() {
        for v in t.vertices() {
            if seen.insert(v.clone()) {
                out.push((v, CenterKind::Vertex));
            }
        }
    }
    for t in ctx.tiles() {
        let m = t.hypotenuse_midpoint();
        if seen.insert(m.clone()) {
            out.push((m, CenterKind::Midpoint));
        }
    }
    out
}

/// Star centres plus the midpoint of every segment shared by two tiles.
/// A half turn swapping two tiles across an edge fixes exactly such a point.
pub fn symmetry_candidates(ctx: &Context) -> Vec<(ExactScalar, CenterKind)> {
    let mut out = star_centers(ctx);
    let mut seen: HashSet<ExactScalar> = out.iter().map(|(p, _)| p.clone()).collect();
    for i in 0..ctx.len() {
        for &j in ctx.sharing_edge(i) {
            let j = j as usize;
            if j < i {
                continue;
            }
            for m in shared_segment_midpoints(&ctx.tile(i).vertices(), &ctx.tile(j).vertices()) {
                if seen.insert(m.clone()) {
                    out.push((m, CenterKind::Segment));
                }
            }
        }
    }
    out
}

fn shared_segment_midpoints(t: &[ExactScalar; 3], s: &[ExactScalar; 3]) -> Vec<ExactScalar> {
    let mut out = Vec::new();
    for i in 0..3 {
        let (a, b) = (&t[i], &t[(i + 1) % 3]);
        for j in 0..3 {
            let (c, d) = (&s[j], &s[(j + 1) % 3]);
            let mut ends: Vec<&ExactScalar> = Vec::new();
            for p in [a, b] {
                if kernel::on_segment(p, c, d) {
                    ends.push(p);
                }
            }
            for p in [c, d] {
                if kernel::on_segment(p, a, b) && !ends.contains(&p) {
                    ends.push(p);
                }
            }
            if ends.len() == 2 {
                out.push(ExactScalar::midpoint(ends[0], ends[1]));
            }
        }
    }
    out
}

/// The star of `p` as a marked patch, if complete in the context.
pub fn star_patch(ctx: &Context, p: &ExactScalar) -> Result<(Patch, Vec<usize>)> {
    let q = ctx
        .point(p)
        .ok_or_else(|| Error::Invalid(format!("{p:?} is not representable in the context")))?;
    let ids = ctx.star(&q)?;
    let tiles = ids.iter().map(|&j| ctx.tile(j).clone()).collect();
    Ok((Patch::new(tiles).with_marker(p.clone()), ids))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCoronaClass {
    pub key: CanonicalKey,
    pub count_context: u64,
    pub kinds: Vec<CenterKind>,
    pub symmetry_order: usize,
    /// Rotation angle over π of the non-trivial symmetry, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_angle_over_pi: Option<String>,
    /// The non-trivial symmetry fixes the marked centre.
    pub fixes_center: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCatalog {
    pub level: u32,
    pub classes: Vec<VertexCoronaClass>,
}

impl VertexCatalog {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn same_classes(&self, other: &VertexCatalog) -> bool {
        self.classes.len() == other.classes.len()
            && self.classes.iter().zip(&other.classes).all(|(a, b)| a.key == b.key)
    }

    pub fn symmetric(&self) -> impl Iterator<Item = &VertexCoronaClass> {
        self.classes.iter().filter(|c| c.symmetry_order > 1)
    }
}

/// Stars around every complete vertex and hypotenuse midpoint of
/// supertile(`level`), up to direct isometry.
pub fn vertex_corona_catalog(level: u32) -> Result<VertexCatalog> {
    let lc = level_context(level)?;
    let ctx = &lc.context;
    let centers = star_centers(ctx);
    let found = par::map(&centers, |(p, kind)| {
        let q = ctx.point(p)?;
        if !ctx.point_surrounded(&q) {
            return None;
        }
        let (patch, _) = star_patch(ctx, p).ok()?;
        Some((canonicalize_with_anchor(&patch).0, *kind))
    });
    let mut acc: BTreeMap<CanonicalKey, (u64, Vec<CenterKind>)> = BTreeMap::new();
    for (key, kind) in found.into_iter().flatten() {
        let e = acc.entry(key).or_default();
        e.0 += 1;
        if !e.1.contains(&kind) {
            e.1.push(kind);
            e.1.sort();
        }
    }
    let classes = acc
        .into_iter()
        .map(|(key, (count, kinds))| {
            let rep = key.representative();
            let sym = symmetry_group(&rep);
            VertexCoronaClass {
                fixes_center: sym.order > 1 && sym.center == rep.marker,
                symmetry_order: sym.order,
                symmetry_angle_over_pi: sym.angle_over_pi,
                key,
                count_context: count,
                kinds,
            }
        })
        .collect();
    Ok(VertexCatalog { level, classes })
}

/// Vertex stars at `level`, checked against `level + 1`.
pub fn vertex_coronas(level: u32) -> Result<VertexCatalog> {
    let a = vertex_corona_catalog(level)?;
    let b = vertex_corona_catalog(level + 1)?;
    if !a.same_classes(&b) {
        return Err(Error::NonStabilization {
            level: level + 1,
            previous: a.len(),
            current: b.len(),
        });
    }
    Ok(a)
}

/// Key of the `n`-corona of the star at `p`, marked at `p`, together with
/// whether the half turn about `p` preserves it.
fn star_corona(ctx: &Context, star: &[usize], p: &ExactScalar, n: u32) -> Result<(CanonicalKey, bool)> {
    let ids = ctx.corona(star, n, CollarConvention::Closed)?;
    let patch = Patch::new(ids.iter().map(|&j| ctx.tile(j).clone()).collect()).with_marker(p.clone());
    let sym = symmetry_group(&patch);
    let symmetric = sym.is_half_turn() && sym.center.as_ref() == Some(p);
    Ok((canonicalize_with_anchor(&patch).0, symmetric))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    /// Corona radius around the star.
    pub n: u32,
    /// Distinct symmetric `n`-coronas whose smaller coronas are all symmetric.
    pub count: usize,
    /// Occurrences examined at this radius (complete inside the context).
    pub occurrences: usize,
    pub key_hashes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub level: u32,
    pub rows: Vec<CensusRow>,
}

impl CensusReport {
    pub fn count_at(&self, n: u32) -> Option<usize> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.count)
    }

    /// The count reached from the largest radius on which it no longer changes.
    pub fn stabilized_count(&self) -> Option<usize> {
        let last = self.rows.last()?;
        let tail = self.rows.iter().rev().take_while(|r| r.count == last.count).count();
        (tail >= 2).then_some(last.count)
    }

    pub fn non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].count <= w[0].count)
    }
}

/// Counts half-turn symmetric corona chains around star centres of
/// supertile(`level`) for radii `1..=n_max`. Only centres whose `n`-corona
/// is complete in the context contribute at radius `n`.
pub fn symmetric_chain_census(level: u32, n_max: u32) -> Result<CensusReport> {
    if n_max == 0 {
        return Err(Error::Invalid("census radius must be at least 1".into()));
    }
    let lc = level_context(level)?;
    let ctx = &lc.context;
    let centers = star_centers(ctx);
    // Symmetric stars are the only possible chain roots.
    let roots: Vec<(ExactScalar, Vec<usize>)> = par::map(&centers, |(p, _)| {
        let (patch, ids) = star_patch(ctx, p).ok()?;
        let sym = symmetry_group(&patch);
        (sym.order > 1).then(|| (p.clone(), ids))
    })
    .into_iter()
    .flatten()
    .collect();
    // Per root, the keys of its symmetric coronas until the chain breaks or
    // the context runs out.
    let chains = par::map(&roots, |(p, star)| {
        let mut keys = Vec::new();
        for n in 1..=n_max {
            match star_corona(ctx, star, p, n) {
                Ok((key, true)) => keys.push(Some(key)),
                Ok((_, false)) => {
                    keys.push(None);
                    break;
                }
                Err(_) => break,
            }
        }
        keys
    });
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let mut occurrences = 0;
        let mut keys: HashSet<&CanonicalKey> = HashSet::new();
        for chain in &chains {
            if let Some(entry) = chain.get(n as usize - 1) {
                occurrences += 1;
                if let Some(k) = entry {
                    keys.insert(k);
                }
            }
        }
        if occurrences == 0 {
            return Err(Error::InsufficientContext(format!(
                "no star of supertile({level}) has a complete {n}-corona"
            )));
        }
        let mut key_hashes: Vec<String> = keys.iter().map(|k| k.hash.clone()).collect();
        key_hashes.sort();
        rows.push(CensusRow {
            n,
            count: key_hashes.len(),
            occurrences,
            key_hashes,
        });
    }
    Ok(CensusReport { level, rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricStar {
    pub key: CanonicalKey,
    pub kinds: Vec<CenterKind>,
    pub count_context: u64,
    /// Centre of the first occurrence in the context.
    pub at: ExactScalar,
    /// Hash of the symmetric star at the same centre after one subdivision.
    pub successor: String,
}

/// Half-turn symmetric stars and the subdivision map between them. A tiling
/// with a half-turn symmetry is a backward orbit of this map, so such tilings
/// up to rotation correspond to its periodic points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricStarReport {
    pub level: u32,
    /// Sorted by key hash.
    pub stars: Vec<SymmetricStar>,
    /// Hashes of the periodic stars, sorted.
    pub periodic: Vec<String>,
    /// Whether subdivision permutes the symmetric stars.
    pub is_permutation: bool,
}

impl SymmetricStarReport {
    pub fn tiling_count(&self) -> usize {
        self.periodic.len()
    }

    /// `|f^N(S)|` for `N = 0..=n_max`: the symmetric stars that sit at the
    /// centre of a symmetric chain `N` subdivisions deep.
    pub fn census(&self, n_max: u32) -> Vec<usize> {
        let next: HashMap<&str, &str> = self
            .stars
            .iter()
            .map(|s| (s.key.hash.as_str(), s.successor.as_str()))
            .collect();
        let mut current: HashSet<&str> = next.keys().copied().collect();
        let mut out = vec![current.len()];
        for _ in 0..n_max {
            current = current.iter().filter_map(|h| next.get(h).copied()).collect();
            out.push(current.len());
        }
        out
    }
}

/// The star at `Φ(p)` in the subdivision of a marked star.
pub fn subdivided_star(key: &CanonicalKey) -> Result<CanonicalKey> {
    let rep = key.representative();
    let p = rep
        .marker
        .clone()
        .ok_or_else(|| Error::Invalid("star key without centre".into()))?;
    let rule = subdivision_rule()?;
    let ctx = Context::new(inflate_all(&rep.tiles));
    let (patch, _) = star_patch(&ctx, &rule.inflate_point(&p))?;
    Ok(canonicalize_with_anchor(&patch).0)
}

pub fn symmetric_stars(level: u32) -> Result<SymmetricStarReport> {
    let lc = level_context(level)?;
    let ctx = &lc.context;
    let candidates = symmetry_candidates(ctx);
    let found = par::map(&candidates, |(p, kind)| {
        let (patch, _) = star_patch(ctx, p).ok()?;
        let sym = symmetry_group(&patch);
        (sym.order > 1).then(|| (canonicalize_with_anchor(&patch).0, *kind, p.clone()))
    });
    let mut acc: BTreeMap<CanonicalKey, (u64, Vec<CenterKind>, ExactScalar)> = BTreeMap::new();
    for (key, kind, p) in found.into_iter().flatten() {
        let e = acc.entry(key).or_insert_with(|| (0, Vec::new(), p));
        e.0 += 1;
        if !e.1.contains(&kind) {
            e.1.push(kind);
            e.1.sort();
        }
    }
    let mut stars = Vec::with_capacity(acc.len());
    for (key, (count, kinds, at)) in acc {
        let successor = subdivided_star(&key)?.hash;
        stars.push(SymmetricStar {
            key,
            kinds,
            count_context: count,
            at,
            successor,
        });
    }
    let index: HashMap<&str, usize> = stars
        .iter()
        .enumerate()
        .map(|(i, s)| (s.key.hash.as_str(), i))
        .collect();
    let next: Vec<Option<usize>> = stars
        .iter()
        .map(|s| index.get(s.successor.as_str()).copied())
        .collect();
    if let Some(i) = next.iter().position(Option::is_none) {
        return Err(Error::InsufficientContext(format!(
            "successor {} of symmetric star {} is missing from supertile({level})",
            stars[i].successor, stars[i].key.hash
        )));
    }
    let next: Vec<usize> = next.into_iter().flatten().collect();
    let mut periodic = Vec::new();
    for start in 0..stars.len() {
        let mut i = next[start];
        for _ in 0..stars.len() {
            if i == start {
                periodic.push(stars[start].key.hash.clone());
                break;
            }
            i = next[i];
        }
    }
    periodic.sort();
    let mut image: Vec<usize> = next.clone();
    image.sort_unstable();
    image.dedup();
    Ok(SymmetricStarReport {
        level,
        is_permutation: image.len() == stars.len(),
        stars,
        periodic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::Tile;

    #[test]
    fn collared_counts_grow_to_the_stable_set() {
        let closed: Vec<usize> = (4..=5)
            .map(|l| collared_catalog(l, CollarConvention::Closed).unwrap().len())
            .collect();
        assert_eq!(closed, vec![88, 104]);
    }

    #[test]
    fn early_level_does_not_stabilise() {
        assert!(matches!(
            enumerate_collared_prototiles(4, CollarConvention::Closed),
            Err(Error::NonStabilization { level: 5, previous: 88, current: 104 })
        ));
    }

    #[test]
    fn edge_convention_is_coarser() {
        let edge = collared_catalog(5, CollarConvention::Edge).unwrap();
        let closed = collared_catalog(5, CollarConvention::Closed).unwrap();
        assert!(edge.len() < closed.len());
        assert_eq!(edge.len(), 24);
    }

    #[test]
    fn collared_patch_starts_with_centre() {
        let lc = level_context(3).unwrap();
        let ctx = &lc.context;
        let i = (0..ctx.len()).find(|&i| ctx.is_surrounded(i)).unwrap();
        let p = collared_patch(ctx, i, CollarConvention::Closed).unwrap();
        assert_eq!(&p.tiles[0], ctx.tile(i));
        let key = collared_key(ctx, i, CollarConvention::Closed).unwrap();
        assert_eq!(key.anchor, ctx.tile(i).chirality);
        let rep = key.representative();
        assert_eq!(rep.tiles[key.anchor_position()], Tile::reference(key.anchor));
        assert_eq!(rep.len(), p.len());
    }

    #[test]
    fn boundary_tile_has_no_collar() {
        let lc = level_context(2).unwrap();
        let ctx = &lc.context;
        let i = (0..ctx.len()).find(|&i| !ctx.is_surrounded(i)).unwrap();
        assert!(matches!(
            collared_key(ctx, i, CollarConvention::Closed),
            Err(Error::InsufficientContext(_))
        ));
    }

    #[test]
    fn star_centres_cover_every_vertex() {
        let lc = level_context(1).unwrap();
        let centres = star_centers(&lc.context);
        for t in lc.context.tiles() {
            for v in t.vertices() {
                assert!(centres.iter().any(|(p, _)| *p == v));
            }
        }
        assert!(centres.iter().all(|(_, k)| *k != CenterKind::Segment));
    }

    #[test]
    fn symmetric_vertex_stars_are_half_turns() {
        let cat = vertex_corona_catalog(4).unwrap();
        let sym: Vec<_> = cat.symmetric().collect();
        assert!(!sym.is_empty());
        for c in sym {
            assert_eq!(c.symmetry_order, 2);
            assert_eq!(c.symmetry_angle_over_pi.as_deref(), Some("1"));
            assert!(c.fixes_center);
        }
    }

    #[test]
    fn symmetric_star_subdivision_has_six_periodic_points() {
        let r = symmetric_stars(5).unwrap();
        assert_eq!(r.stars.len(), 7);
        assert_eq!(r.tiling_count(), 6);
        assert!(!r.is_permutation);
        assert_eq!(r.census(4), vec![7, 6, 6, 6, 6]);
        for s in &r.stars {
            let (patch, _) = star_patch(&level_context(5).unwrap().context, &s.at).unwrap();
            assert_eq!(canonicalize_with_anchor(&patch).0, s.key);
        }
    }
}
