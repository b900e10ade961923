//! Spatially indexed tile sets: adjacency, coronas, stars and the exact
//! "fully surrounded" test that decides whether local data is complete.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ExactScalar;
use crate::kernel::{self, GridPoint, Location, PlanePoint};
use crate::par;
use crate::tile::{Angle, Tile, LONG, SHORT};

/// Which neighbours count as adjacent when growing coronas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollarConvention {
    /// Tiles meeting in at least one point.
    #[default]
    Closed,
    /// Tiles sharing a boundary segment of positive length.
    Edge,
}

impl std::str::FromStr for CollarConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Self::Closed),
            "edge" => Ok(Self::Edge),
            other => Err(Error::Invalid(format!("unknown collar convention {other:?}"))),
        }
    }
}

impl CollarConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Closed => "closed",
            Self::Edge => "edge",
        }
    }
}

/// A point given in the context's own coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CtxPoint {
    Grid(GridPoint),
    Exact(ExactScalar),
}

struct Geom<P> {
    pts: Vec<[P; 3]>,
    cell: i64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl<P: PlanePoint> Geom<P> {
    fn new(pts: Vec<[P; 3]>, cell: i64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, tri) in pts.iter().enumerate() {
            for c in cells_of(tri, cell) {
                buckets.entry(c).or_default().push(i as u32);
            }
        }
        Self { pts, cell, buckets }
    }

    fn candidates(&self, tri: &[P; 3]) -> Vec<u32> {
        let mut out: Vec<u32> = cells_of(tri, self.cell)
            .into_iter()
            .filter_map(|c| self.buckets.get(&c))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn containing(&self, p: &P) -> Vec<(u32, Location)> {
        let Some(list) = self.buckets.get(&p.cell(self.cell)) else {
            return Vec::new();
        };
        list.iter()
            .filter_map(|&j| {
                let loc = kernel::locate(p, &self.pts[j as usize]);
                loc.is_inside().then_some((j, loc))
            })
            .collect()
    }

    fn angle_sum(&self, p: &P, among: &[u32]) -> Angle {
        let mut sum = Angle::default();
        for &j in among {
            sum += Angle::of_location(kernel::locate(p, &self.pts[j as usize]));
        }
        sum
    }

    fn touching(&self, i: usize) -> Vec<u32> {
        let tri = &self.pts[i];
        self.candidates(tri)
            .into_iter()
            .filter(|&j| j as usize != i && kernel::touching(tri, &self.pts[j as usize]))
            .collect()
    }

    /// All boundary points of tile `i` are covered by a full turn of tiles
    /// from `around` (which must contain every tile touching `i`).
    fn surrounded(&self, i: usize, around: &[u32]) -> bool {
        let tri = &self.pts[i];
        let mut all: Vec<u32> = around.to_vec();
        all.push(i as u32);
        for v in tri {
            if self.angle_sum(v, &all) != Angle::FULL {
                return false;
            }
        }
        for k in 0..3 {
            let (a, b) = (&tri[k], &tri[(k + 1) % 3]);
            let mut cuts: Vec<P> = vec![a.clone(), b.clone()];
            for &j in around {
                for q in &self.pts[j as usize] {
                    if kernel::on_segment(q, a, b) && !cuts.contains(q) {
                        cuts.push(q.clone());
                    }
                }
            }
            cuts.sort_by(|p, q| P::cmp_along(a, b, p, q));
            for w in cuts.windows(2) {
                let m = P::midpoint(&w[0], &w[1]);
                if self.angle_sum(&m, &all) != Angle::FULL {
                    return false;
                }
            }
            for q in &cuts[1..cuts.len() - 1] {
                if self.angle_sum(q, &all) != Angle::FULL {
                    return false;
                }
            }
        }
        true
    }

    fn overlaps_any(&self, tri: &[P; 3]) -> bool {
        self.candidates(tri)
            .into_iter()
            .any(|j| !kernel::interiors_disjoint(tri, &self.pts[j as usize]))
    }
}

fn cells_of<P: PlanePoint>(tri: &[P; 3], cell: i64) -> Vec<(i64, i64)> {
    let cs = tri.clone().map(|p| p.cell(cell));
    let (x0, x1) = (cs.iter().map(|c| c.0).min().unwrap(), cs.iter().map(|c| c.0).max().unwrap());
    let (y0, y1) = (cs.iter().map(|c| c.1).min().unwrap(), cs.iter().map(|c| c.1).max().unwrap());
    let mut out = Vec::with_capacity(((x1 - x0 + 1) * (y1 - y0 + 1)) as usize);
    for x in x0..=x1 {
        for y in y0..=y1 {
            out.push((x, y));
        }
    }
    out
}

enum AnyGeom {
    Grid { geom: Geom<GridPoint>, scale: BigInt },
    Exact(Geom<ExactScalar>),
}

macro_rules! with_geom {
    ($self:expr, $g:ident => $body:expr) => {
        match &$self.geom {
            AnyGeom::Grid { geom: $g, .. } => $body,
            AnyGeom::Exact($g) => $body,
        }
    };
}

/// A finite set of tiles with pairwise disjoint interiors, indexed for
/// exact neighbourhood queries.
pub struct Context {
    tiles: Vec<Tile>,
    geom: AnyGeom,
    lookup: HashMap<Tile, u32>,
    touching: OnceLock<Vec<Vec<u32>>>,
    sharing: OnceLock<Vec<Vec<u32>>>,
    surrounded: OnceLock<Vec<bool>>,
}

const GRID_LIMIT: i64 = 1 << 60;

fn to_grid(verts: &[[ExactScalar; 3]]) -> Option<(Vec<[GridPoint; 3]>, BigInt)> {
    if verts.iter().flatten().any(|p| !p.is_gaussian_rational()) {
        return None;
    }
    let mut lcm = BigInt::one();
    for p in verts.iter().flatten() {
        lcm = lcm.lcm(p.denominator());
    }
    // Even scale keeps every midpoint of two vertices on the grid.
    let scale = lcm * 2;
    let conv = |p: &ExactScalar| -> Option<GridPoint> {
        let f: BigInt = &scale / p.denominator();
        let n = p.numerators();
        let x: i64 = (&n[0] * &f).to_i64()?;
        let y: i64 = (&n[1] * &f).to_i64()?;
        (x.abs() < GRID_LIMIT && y.abs() < GRID_LIMIT).then_some(GridPoint { x, y })
    };
    let mut out = Vec::with_capacity(verts.len());
    for tri in verts {
        out.push([conv(&tri[0])?, conv(&tri[1])?, conv(&tri[2])?]);
    }
    Some((out, scale))
}

impl Context {
    pub fn new(tiles: Vec<Tile>) -> Self {
        let verts: Vec<[ExactScalar; 3]> = par::map(&tiles, |t| t.vertices());
        let lookup = tiles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let geom = match to_grid(&verts) {
            Some((pts, scale)) => {
                let cell = (&scale * BigInt::from(2)).to_i64().unwrap_or(i64::MAX / 4);
                AnyGeom::Grid {
                    geom: Geom::new(pts, cell),
                    scale,
                }
            }
            None => AnyGeom::Exact(Geom::new(verts, 2)),
        };
        Self {
            tiles,
            geom,
            lookup,
            touching: OnceLock::new(),
            sharing: OnceLock::new(),
            surrounded: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile(&self, i: usize) -> &Tile {
        &self.tiles[i]
    }

    pub fn index_of(&self, t: &Tile) -> Option<usize> {
        self.lookup.get(t).map(|&i| i as usize)
    }

    /// Whether integer-grid predicates are in use.
    pub fn is_grid(&self) -> bool {
        matches!(self.geom, AnyGeom::Grid { .. })
    }

    /// Converts a field point into context coordinates, if representable.
    pub fn point(&self, p: &ExactScalar) -> Option<CtxPoint> {
        match &self.geom {
            AnyGeom::Exact(_) => Some(CtxPoint::Exact(p.clone())),
            AnyGeom::Grid { scale, .. } => {
                if !p.is_gaussian_rational() {
                    return None;
                }
                let (q, r) = scale.div_rem(p.denominator());
                if r != BigInt::from(0) {
                    return None;
                }
                let n = p.numerators();
                Some(CtxPoint::Grid(GridPoint {
                    x: (&n[0] * &q).to_i64()?,
                    y: (&n[1] * &q).to_i64()?,
                }))
            }
        }
    }

    /// Vertex `k` of tile `i` in context coordinates.
    pub fn vertex(&self, i: usize, k: usize) -> CtxPoint {
        match &self.geom {
            AnyGeom::Grid { geom, .. } => CtxPoint::Grid(geom.pts[i][k]),
            AnyGeom::Exact(geom) => CtxPoint::Exact(geom.pts[i][k].clone()),
        }
    }

    pub fn hypotenuse_midpoint(&self, i: usize) -> CtxPoint {
        match &self.geom {
            AnyGeom::Grid { geom, .. } => {
                let t = &geom.pts[i];
                CtxPoint::Grid(GridPoint::midpoint(&t[SHORT], &t[LONG]))
            }
            AnyGeom::Exact(geom) => {
                let t = &geom.pts[i];
                CtxPoint::Exact(ExactScalar::midpoint(&t[SHORT], &t[LONG]))
            }
        }
    }

    /// Tiles meeting tile `i` in at least one point.
    pub fn touching(&self, i: usize) -> &[u32] {
        &self.touching_all()[i]
    }

    fn touching_all(&self) -> &Vec<Vec<u32>> {
        self.touching.get_or_init(|| {
            let idx: Vec<usize> = (0..self.tiles.len()).collect();
            with_geom!(self, g => par::map(&idx, |&i| g.touching(i)))
        })
    }

    /// Tiles sharing a boundary segment of positive length with tile `i`.
    pub fn sharing_edge(&self, i: usize) -> &[u32] {
        &self.sharing.get_or_init(|| {
            let touching = self.touching_all();
            let idx: Vec<usize> = (0..self.tiles.len()).collect();
            with_geom!(self, g => par::map(&idx, |&i| {
                touching[i]
                    .iter()
                    .copied()
                    .filter(|&j| kernel::share_segment(&g.pts[i], &g.pts[j as usize]))
                    .collect()
            }))
        })[i]
    }

    pub fn neighbours(&self, i: usize, conv: CollarConvention) -> &[u32] {
        match conv {
            CollarConvention::Closed => self.touching(i),
            CollarConvention::Edge => self.sharing_edge(i),
        }
    }

    /// Every point of tile `i` has a full neighbourhood of tiles in the
    /// context, so everything touching it is known.
    pub fn is_surrounded(&self, i: usize) -> bool {
        self.surrounded.get_or_init(|| {
            let touching = self.touching_all();
            let idx: Vec<usize> = (0..self.tiles.len()).collect();
            with_geom!(self, g => par::map(&idx, |&i| g.surrounded(i, &touching[i])))
        })[i]
    }

    /// Tiles containing `p`, with the location of `p` in each.
    pub fn containing(&self, p: &CtxPoint) -> Vec<(usize, Location)> {
        let out = match (&self.geom, p) {
            (AnyGeom::Grid { geom, .. }, CtxPoint::Grid(q)) => geom.containing(q),
            (AnyGeom::Exact(geom), CtxPoint::Exact(q)) => geom.containing(q),
            _ => Vec::new(),
        };
        out.into_iter().map(|(j, l)| (j as usize, l)).collect()
    }

    /// The tiles around `p` fill a full turn.
    pub fn point_surrounded(&self, p: &CtxPoint) -> bool {
        let ids: Vec<u32> = self.containing(p).into_iter().map(|(j, _)| j as u32).collect();
        match (&self.geom, p) {
            (AnyGeom::Grid { geom, .. }, CtxPoint::Grid(q)) => geom.angle_sum(q, &ids) == Angle::FULL,
            (AnyGeom::Exact(geom), CtxPoint::Exact(q)) => geom.angle_sum(q, &ids) == Angle::FULL,
            _ => false,
        }
    }

    /// The star of `p`: all tiles containing it, or an error when the star
    /// is cut by the edge of the context.
    pub fn star(&self, p: &CtxPoint) -> Result<Vec<usize>> {
        if !self.point_surrounded(p) {
            return Err(Error::InsufficientContext(format!("star of {p:?} is incomplete")));
        }
        let mut s: Vec<usize> = self.containing(p).into_iter().map(|(j, _)| j).collect();
        s.sort_unstable();
        Ok(s)
    }

    /// The `n`-corona of a seed set: seeds plus `n` rounds of adjacent tiles.
    /// Each round requires every tile grown so far to be surrounded.
    pub fn corona(&self, seeds: &[usize], n: u32, conv: CollarConvention) -> Result<Vec<usize>> {
        let mut set: BTreeSet<usize> = seeds.iter().copied().collect();
        let mut frontier: Vec<usize> = set.iter().copied().collect();
        for round in 0..n {
            let mut next = Vec::new();
            for &i in &frontier {
                if !self.is_surrounded(i) {
                    return Err(Error::InsufficientContext(format!(
                        "tile {i} reaches the context edge in corona round {}",
                        round + 1
                    )));
                }
                for &j in self.neighbours(i, conv) {
                    if set.insert(j as usize) {
                        next.push(j as usize);
                    }
                }
            }
            frontier = next;
        }
        Ok(set.into_iter().collect())
    }

    /// Whether a tile not in the context would overlap one that is.
    pub fn overlaps_any(&self, t: &Tile) -> bool {
        let v = t.vertices();
        match &self.geom {
            AnyGeom::Exact(geom) => geom.overlaps_any(&v),
            AnyGeom::Grid { geom, scale } => {
                let pts: Option<Vec<GridPoint>> = v
                    .iter()
                    .map(|p| match self.point(p) {
                        Some(CtxPoint::Grid(g)) => Some(g),
                        _ => None,
                    })
                    .collect();
                match pts {
                    Some(p) => geom.overlaps_any(&[p[0], p[1], p[2]]),
                    None => {
                        let sc = scale.to_f64().unwrap_or(f64::MAX);
                        let f: Vec<(f64, f64)> = v.iter().map(|p| p.to_f64_pair()).collect();
                        let cell = geom.cell as f64;
                        let lo = |g: fn(&(f64, f64)) -> f64| {
                            let m = f.iter().map(g).fold(f64::INFINITY, f64::min);
                            ((m * sc - 2.0) / cell).floor() as i64
                        };
                        let hi = |g: fn(&(f64, f64)) -> f64| {
                            let m = f.iter().map(g).fold(f64::NEG_INFINITY, f64::max);
                            ((m * sc + 2.0) / cell).floor() as i64
                        };
                        let mut cand: Vec<u32> = Vec::new();
                        for x in lo(|p| p.0)..=hi(|p| p.0) {
                            for y in lo(|p| p.1)..=hi(|p| p.1) {
                                cand.extend(geom.buckets.get(&(x, y)).into_iter().flatten());
                            }
                        }
                        cand.sort_unstable();
                        cand.dedup();
                        cand.into_iter().any(|j| {
                            !kernel::interiors_disjoint(&v, &self.tiles[j as usize].vertices())
                        })
                    }
                }
            }
        }
    }

    /// Exhaustive check that no two tiles overlap, using the bucket index to
    /// enumerate every pair whose bounding boxes meet.
    pub fn pairwise_disjoint(&self) -> bool {
        let idx: Vec<usize> = (0..self.tiles.len()).collect();
        let ok: Vec<bool> = with_geom!(self, g => par::map(&idx, |&i| {
            g.candidates(&g.pts[i])
                .into_iter()
                .filter(|&j| j as usize > i)
                .all(|j| kernel::interiors_disjoint(&g.pts[i], &g.pts[j as usize]))
        }));
        ok.into_iter().all(|b| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::supertile;
    use crate::tile::Chirality;

    #[test]
    fn single_tile_is_not_surrounded() {
        let ctx = Context::new(vec![Tile::reference(Chirality::Minus)]);
        assert!(ctx.is_grid());
        assert!(!ctx.is_surrounded(0));
        assert!(ctx.corona(&[0], 0, CollarConvention::Closed).is_ok());
        assert!(matches!(
            ctx.corona(&[0], 1, CollarConvention::Closed),
            Err(Error::InsufficientContext(_))
        ));
    }

    #[test]
    fn seed_is_interior_of_level_two() {
        let s = supertile(2).unwrap();
        let ctx = Context::new(s.tiles.clone());
        assert!(ctx.is_surrounded(0));
        let c1 = ctx.corona(&[0], 1, CollarConvention::Closed).unwrap();
        assert!(c1.contains(&0));
        assert!(c1.len() > 5);
        let e1 = ctx.corona(&[0], 1, CollarConvention::Edge).unwrap();
        assert!(e1.len() < c1.len());
        assert!(e1.iter().all(|i| c1.contains(i)));
    }

    #[test]
    fn corner_tiles_are_not_surrounded() {
        let s = supertile(3).unwrap();
        let ctx = Context::new(s.tiles.clone());
        let region = s.region();
        // Every tile with a vertex on a region corner sits on the boundary.
        for (i, t) in ctx.tiles().iter().enumerate() {
            if t.vertices().iter().any(|v| region.contains(v)) {
                assert!(!ctx.is_surrounded(i));
            }
        }
    }
}
