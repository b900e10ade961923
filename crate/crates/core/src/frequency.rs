//! Substitution matrix on collared classes, exact Perron frequencies, patch
//! frequencies and the module they generate.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::context::{CollarConvention, Context};
use crate::enumerate::{collared_key, star_centers, Catalog};
use crate::error::{Error, Result};
use crate::par;
use crate::patch::{anchored_key, canonicalize_with_anchor, CanonicalKey, Patch};
use crate::substitution::inflate_all;
use crate::tile::{Chirality, Tile};

/// Default number of extra subdivisions tried when deciding a frequency.
pub const DEFAULT_BUDGET: u32 = 4;

/// `M[c'][c]`: children of collared class `c` whose collared class is `c'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionMatrix {
    pub keys: Vec<CanonicalKey>,
    pub entries: Vec<Vec<u64>>,
    pub convention: CollarConvention,
}

/// The `k`-fold subdivision of a collared class representative, with the
/// index range of the descendants of its centre.
pub fn subdivided_context(key: &CanonicalKey, k: u32) -> (Context, Range<usize>) {
    let rep = key.representative();
    let a = key.anchor_position();
    let mut tiles = rep.tiles;
    for _ in 0..k {
        tiles = inflate_all(&tiles);
    }
    let n = 5usize.pow(k);
    (Context::new(tiles), a * n..(a + 1) * n)
}

pub fn build_substitution_matrix(catalog: &Catalog) -> Result<SubstitutionMatrix> {
    let conv = catalog.convention;
    let columns = par::map(&catalog.classes, |c| -> Result<Vec<usize>> {
        let (ctx, range) = subdivided_context(&c.key, 1);
        range
            .map(|i| {
                let child = collared_key(&ctx, i, conv)?;
                catalog.index_of(&child).ok_or_else(|| Error::UncollarableChild {
                    key_hash: c.key.hash.clone(),
                })
            })
            .collect()
    });
    let n = catalog.len();
    let mut entries = vec![vec![0u64; n]; n];
    for (col, children) in columns.into_iter().enumerate() {
        for row in children? {
            entries[row][col] += 1;
        }
    }
    Ok(SubstitutionMatrix {
        keys: catalog.classes.iter().map(|c| c.key.clone()).collect(),
        entries,
        convention: conv,
    })
}

impl SubstitutionMatrix {
    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.dim())
            .map(|c| self.entries.iter().map(|row| row[c]).sum())
            .collect()
    }

    /// Rows and columns summed over centre chirality. Every column of one
    /// chirality must give the same collapsed column.
    pub fn chirality_collapse(&self) -> Result<[[u64; 2]; 2]> {
        let ch: Vec<usize> = self.keys.iter().map(|k| k.anchor.index()).collect();
        let mut out: [Option<[u64; 2]>; 2] = [None, None];
        for c in 0..self.dim() {
            let mut col = [0u64; 2];
            for (r, row) in self.entries.iter().enumerate() {
                col[ch[r]] += row[c];
            }
            match out[ch[c]] {
                None => out[ch[c]] = Some(col),
                Some(prev) if prev != col => {
                    return Err(Error::Invalid(format!(
                        "class {} collapses to {col:?}, others of its chirality to {prev:?}",
                        self.keys[c].hash
                    )))
                }
                _ => {}
            }
        }
        let [m, p] = out.map(|c| c.unwrap_or([0, 0]));
        Ok([[m[0], p[0]], [m[1], p[1]]])
    }

    /// Smallest `k` with `M^k` strictly positive, searched up to Wielandt's
    /// bound `(n-1)² + 1`; `None` means not primitive.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        primitivity_exponent(&self.entries)
    }

    pub fn as_bigint(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }
}

/// Boolean matrix as row bitsets.
#[derive(Clone, PartialEq, Eq)]
struct BoolMatrix {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl BoolMatrix {
    fn from_counts(m: &[Vec<u64>]) -> Self {
        let n = m.len();
        let words = n.div_ceil(64);
        let rows = m
            .iter()
            .map(|row| {
                let mut bits = vec![0u64; words];
                for (j, &x) in row.iter().enumerate() {
                    if x > 0 {
                        bits[j / 64] |= 1 << (j % 64);
                    }
                }
                bits
            })
            .collect();
        Self { n, rows }
    }

    fn mul(&self, other: &BoolMatrix) -> BoolMatrix {
        let words = self.n.div_ceil(64);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = vec![0u64; words];
                for k in 0..self.n {
                    if row[k / 64] >> (k % 64) & 1 == 1 {
                        for (a, b) in acc.iter_mut().zip(&other.rows[k]) {
                            *a |= b;
                        }
                    }
                }
                acc
            })
            .collect();
        BoolMatrix { n: self.n, rows }
    }

    fn all_positive(&self) -> bool {
        let full = |w: usize| -> u64 {
            let rem = self.n - 64 * w;
            if rem >= 64 {
                u64::MAX
            } else {
                (1u64 << rem) - 1
            }
        };
        self.rows
            .iter()
            .all(|row| row.iter().enumerate().all(|(w, &bits)| bits == full(w)))
    }
}

pub fn primitivity_exponent(m: &[Vec<u64>]) -> Option<usize> {
    let n = m.len();
    if n == 0 {
        return None;
    }
    let base = BoolMatrix::from_counts(m);
    let bound = (n - 1) * (n - 1) + 1;
    let mut p = base.clone();
    for k in 1..=bound {
        if p.all_positive() {
            return Some(k);
        }
        let next = p.mul(&base);
        if next == p {
            return None;
        }
        p = next;
    }
    None
}

/// Basis of the rational null space of an integer matrix, by fraction-free
/// (Bareiss) elimination followed by rational back substitution.
pub fn rational_nullspace(a: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate().rev() {
                let mut s = BigRational::zero();
                for j in pc + 1..cols {
                    if !m[i][j].is_zero() && !x[j].is_zero() {
                        s += BigRational::from(m[i][j].clone()) * &x[j];
                    }
                }
                x[pc] = -s / BigRational::from(m[i][pc].clone());
            }
            x
        })
        .collect()
}

/// Exact normalised Perron vector over the collared classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub keys: Vec<CanonicalKey>,
    #[serde(with = "ratio_vec")]
    pub values: Vec<BigRational>,
    pub convention: CollarConvention,
}

impl FrequencyTable {
    pub fn get(&self, key: &CanonicalKey) -> Option<&BigRational> {
        self.keys
            .binary_search_by(|k| k.cmp(key))
            .ok()
            .map(|i| &self.values[i])
    }

    pub fn sum(&self) -> BigRational {
        self.values.iter().fold(BigRational::zero(), |a, b| a + b)
    }
}

/// `v` with `M·v = 5·v`, `Σ v = 1`, checked to be strictly positive and
/// unique.
pub fn perron_vector(m: &[Vec<u64>]) -> Result<Vec<BigRational>> {
    let n = m.len();
    let a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigInt::from(m[i][j]) - if i == j { BigInt::from(5) } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let ker = rational_nullspace(&a);
    if ker.len() != 1 {
        return Err(Error::KernelDimension(ker.len()));
    }
    let v = &ker[0];
    let total = v.iter().fold(BigRational::zero(), |s, x| s + x);
    if total.is_zero() {
        return Err(Error::Invalid("Perron vector sums to zero".into()));
    }
    let v: Vec<BigRational> = v.iter().map(|x| x / &total).collect();
    if v.iter().any(|x| !x.is_positive()) {
        return Err(Error::Invalid("Perron vector is not strictly positive".into()));
    }
    if !is_eigenvector(m, &v, 5) {
        return Err(Error::Invalid("M·v ≠ 5·v".into()));
    }
    Ok(v)
}

/// Exact check of `M·v = λ·v`.
pub fn is_eigenvector(m: &[Vec<u64>], v: &[BigRational], lambda: i64) -> bool {
    let lambda = BigRational::from(BigInt::from(lambda));
    m.iter().zip(v).all(|(row, vi)| {
        let s = row
            .iter()
            .zip(v)
            .filter(|(x, _)| **x > 0)
            .fold(BigRational::zero(), |s, (x, y)| s + BigRational::from(BigInt::from(*x)) * y);
        s == &lambda * vi
    })
}

pub fn perron_frequencies(m: &SubstitutionMatrix) -> Result<FrequencyTable> {
    if m.column_sums().iter().any(|&s| s != 5) {
        return Err(Error::Invalid("column sums differ from 5".into()));
    }
    if m.primitivity_exponent().is_none() {
        return Err(Error::Invalid("substitution matrix is not primitive".into()));
    }
    Ok(FrequencyTable {
        keys: m.keys.clone(),
        values: perron_vector(&m.entries)?,
        convention: m.convention,
    })
}

/// A family of patches classified around each tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "radius")]
pub enum PatchFamily {
    /// The `n`-corona of a tile, anchored at that tile.
    TileCorona(u32),
    /// The `m`-corona of a vertex star, marked at its centre and anchored at
    /// each of its tiles in turn.
    StarCorona(u32),
}

impl PatchFamily {
    pub fn label(self) -> String {
        match self {
            PatchFamily::TileCorona(n) => format!("tile-corona-{n}"),
            PatchFamily::StarCorona(m) => format!("star-corona-{m}"),
        }
    }
}

type Counts = HashMap<CanonicalKey, u64>;

/// Anchored keys of a family around every descendant of the centre of
/// collared class `key` after `k` subdivisions.
fn classify_descendants(
    key: &CanonicalKey,
    k: u32,
    family: PatchFamily,
    conv: CollarConvention,
) -> Result<Counts> {
    let (ctx, range) = subdivided_context(key, k);
    let mut counts = Counts::new();
    match family {
        PatchFamily::TileCorona(n) => {
            for d in range {
                let ids = ctx.corona(&[d], n, conv)?;
                let mut tiles = vec![ctx.tile(d).clone()];
                tiles.extend(ids.into_iter().filter(|&j| j != d).map(|j| ctx.tile(j).clone()));
                *counts.entry(anchored_key(&Patch::new(tiles), 0)).or_default() += 1;
            }
        }
        PatchFamily::StarCorona(m) => {
            for (p, _) in star_centers(&ctx) {
                let Some(q) = ctx.point(&p) else { continue };
                let hits: Vec<usize> = ctx
                    .containing(&q)
                    .into_iter()
                    .map(|(j, _)| j)
                    .filter(|j| range.contains(j))
                    .collect();
                if hits.is_empty() {
                    continue;
                }
                let star = ctx.star(&q)?;
                let ids = ctx.corona(&star, m, CollarConvention::Closed)?;
                let tiles: Vec<Tile> = ids.iter().map(|&j| ctx.tile(j).clone()).collect();
                let patch = Patch::new(tiles).with_marker(p.clone());
                for d in hits {
                    let pos = ids.binary_search(&d).expect("star tile lies in its corona");
                    *counts.entry(anchored_key(&patch, pos)).or_default() += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Frequencies of every anchored patch of a family, computed at `k`
/// subdivisions: `Σ_c v_c · count_c / 5^k`.
fn family_at_level(
    table: &FrequencyTable,
    family: PatchFamily,
    k: u32,
) -> Result<BTreeMap<CanonicalKey, BigRational>> {
    let per_class = par::map(&table.keys, |key| classify_descendants(key, k, family, table.convention));
    let scale = BigRational::from(BigInt::from(5).pow(k));
    let mut out: BTreeMap<CanonicalKey, BigRational> = BTreeMap::new();
    for (counts, v) in per_class.into_iter().zip(&table.values) {
        for (key, n) in counts? {
            let add = v * BigRational::from(BigInt::from(n)) / &scale;
            *out.entry(key).or_insert_with(BigRational::zero) += add;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFrequencies {
    pub family: PatchFamily,
    /// Smallest number of subdivisions at which every patch was decided.
    pub level: u32,
    /// Frequencies at `level` and `level + 1` coincide.
    pub consistent: bool,
    /// Anchored key to frequency; for star families only canonical
    /// anchorings are kept, one entry per isometry class.
    #[serde(with = "ratio_map")]
    pub values: BTreeMap<CanonicalKey, BigRational>,
}

/// Frequencies of all classes of a family, searching the refinement level up
/// to `budget` and confirming at the next level.
pub fn family_frequencies(table: &FrequencyTable, family: PatchFamily, budget: u32) -> Result<FamilyFrequencies> {
    for k in 0..=budget {
        let here = match family_at_level(table, family, k) {
            Ok(v) => v,
            Err(Error::InsufficientContext(_)) => continue,
            Err(e) => return Err(e),
        };
        let next = family_at_level(table, family, k + 1)?;
        let consistent = here == next;
        let values = match family {
            PatchFamily::TileCorona(_) => here,
            PatchFamily::StarCorona(_) => canonical_only(here),
        };
        return Ok(FamilyFrequencies {
            family,
            level: k,
            consistent,
            values,
        });
    }
    Err(Error::UndecidedAtBudget { budget })
}

fn canonical_only(m: BTreeMap<CanonicalKey, BigRational>) -> BTreeMap<CanonicalKey, BigRational> {
    let keys: Vec<&CanonicalKey> = m.keys().collect();
    let keep = par::map(&keys, |k| canonicalize_with_anchor(&k.representative()).0 == **k);
    m.into_iter()
        .zip(keep)
        .filter_map(|((k, v), keep)| keep.then_some((k, v)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Placement {
    Present,
    Absent,
    Undecided,
}

/// Whether `p`, moved so that tile `anchor` lands on context tile `d`, is part
/// of the context.
fn placement(ctx: &Context, p: &Patch, anchor: usize, d: usize) -> Placement {
    let target = ctx.tile(d);
    if target.chirality != p.tiles[anchor].chirality {
        return Placement::Absent;
    }
    let g = target.motion.compose(&p.tiles[anchor].motion.inverse());
    let mut undecided = false;
    for (i, t) in p.tiles.iter().enumerate() {
        if i == anchor {
            continue;
        }
        let moved = t.moved(&g);
        if ctx.index_of(&moved).is_some() {
            continue;
        }
        if ctx.overlaps_any(&moved) {
            return Placement::Absent;
        }
        undecided = true;
    }
    if undecided {
        Placement::Undecided
    } else {
        Placement::Present
    }
}

/// Occurrences of `p` anchored at a tile of the context, counting only
/// placements lying entirely inside it.
pub fn count_occurrences(ctx: &Context, p: &Patch, anchor: usize) -> u64 {
    let idx: Vec<usize> = (0..ctx.len()).collect();
    par::map(&idx, |&d| placement(ctx, p, anchor, d) == Placement::Present)
        .into_iter()
        .filter(|&b| b)
        .count() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchFrequency {
    #[serde(with = "ratio")]
    pub value: BigRational,
    pub level: u32,
    pub consistent: bool,
}

fn frequency_by_placement(p: &Patch, anchor: usize, table: &FrequencyTable, k: u32) -> Option<BigRational> {
    let per_class = par::map(&table.keys, |key| {
        let (ctx, range) = subdivided_context(key, k);
        let mut n = 0u64;
        for d in range {
            match placement(&ctx, p, anchor, d) {
                Placement::Present => n += 1,
                Placement::Absent => {}
                Placement::Undecided => return None,
            }
        }
        Some(n)
    });
    let scale = BigRational::from(BigInt::from(5).pow(k));
    let mut total = BigRational::zero();
    for (n, v) in per_class.into_iter().zip(&table.values) {
        total += v * BigRational::from(BigInt::from(n?)) / &scale;
    }
    Some(total)
}

/// Frequency per unit area of the clopen set "tile `anchor` of `p` sits at
/// the puncture and the tiling agrees with `p`".
pub fn patch_frequency(p: &Patch, anchor: usize, table: &FrequencyTable, budget: u32) -> Result<PatchFrequency> {
    for k in 0..=budget {
        if let Some(value) = frequency_by_placement(p, anchor, table, k) {
            let consistent = frequency_by_placement(p, anchor, table, k + 1).as_ref() == Some(&value);
            return Ok(PatchFrequency {
                value,
                level: k,
                consistent,
            });
        }
    }
    Err(Error::UndecidedAtBudget { budget })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub level: u32,
    pub occurrences: u64,
    pub error: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub label: String,
    #[serde(with = "ratio")]
    pub freq: BigRational,
    pub diameter: f64,
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }

    pub fn within_bound(&self) -> bool {
        self.rows.last().is_some_and(|r| r.error <= r.bound)
    }

    pub fn passed(&self) -> bool {
        self.strictly_decreasing() && self.within_bound()
    }
}

/// `(3 + √5)·(diam + √5)·5^{-n/2}`: the perimeter of `supertile(n)` times
/// the width of the band where an occurrence can be cut off, over its area.
pub fn boundary_bound(diameter: f64, level: u32) -> f64 {
    let s5 = 5f64.sqrt();
    (3.0 + s5) * (diameter + s5) * 5f64.powf(-(level as f64) / 2.0)
}

/// Compares `occ_n / 5^n` in `supertile(n)` with an exact frequency.
pub fn counting_oracle(
    label: &str,
    p: &Patch,
    anchor: usize,
    freq: &BigRational,
    levels: &[u32],
) -> Result<OracleReport> {
    let diameter = p.diameter();
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let lc = crate::enumerate::level_context(n)?;
        let occ = count_occurrences(&lc.context, p, anchor);
        let exact = BigRational::new(BigInt::from(occ), BigInt::from(5).pow(n)) - freq;
        rows.push(OracleRow {
            level: n,
            occurrences: occ,
            error: exact.abs().to_f64().unwrap_or(f64::NAN),
            bound: boundary_bound(diameter, n),
        });
    }
    Ok(OracleReport {
        label: label.to_string(),
        freq: freq.clone(),
        diameter,
        rows,
    })
}

/// Membership data of one rational in `(1/264)·Z[1/5]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    /// Smallest `k ≥ 0` with `264·5^k·x ∈ Z`, when one exists.
    pub k_min: Option<u32>,
    pub in_module: bool,
}

pub fn module_membership(x: &BigRational) -> Membership {
    let mut d = x.denom().clone();
    let five = BigInt::from(5);
    let mut k = 0u32;
    while (&d % &five).is_zero() {
        d /= &five;
        k += 1;
    }
    let ok = (BigInt::from(264) % &d).is_zero();
    Membership {
        k_min: ok.then_some(k),
        in_module: ok,
    }
}

/// Generator `g` of the subgroup `g·Z` of `Q` spanned by the values.
pub fn generated_subgroup<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
    let values: Vec<&BigRational> = values.into_iter().collect();
    let l = values.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let g = values
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&(x.numer() * (&l / x.denom()))));
    BigRational::new(g, l)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub key_hash: String,
    pub family: String,
    #[serde(with = "ratio")]
    pub freq: BigRational,
    pub k_min: Option<u32>,
    pub in_module: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleReport {
    pub depth: u32,
    pub entries: Vec<FrequencyEntry>,
    /// The generated module is `generator·Z`.
    #[serde(with = "ratio")]
    pub generator: BigRational,
    pub generator_k_min: Option<u32>,
    /// Largest `k_min` among the entries.
    pub max_k_min: Option<u32>,
    /// Subdivision level used per family, and whether it was confirmed one
    /// level deeper.
    pub levels: Vec<(String, u32, bool)>,
}

impl ModuleReport {
    pub fn all_in_module(&self) -> bool {
        self.entries.iter().all(|e| e.in_module)
    }

    pub fn all_consistent(&self) -> bool {
        self.levels.iter().all(|l| l.2)
    }
}

/// The families covered at a depth: tile `n`-coronas for `n ≤ depth` and
/// star `m`-coronas for `m < depth`.
pub fn families_at_depth(depth: u32) -> Vec<PatchFamily> {
    let mut out: Vec<PatchFamily> = (1..=depth).map(PatchFamily::TileCorona).collect();
    out.extend((0..depth).map(PatchFamily::StarCorona));
    out
}

pub fn frequency_module_report(table: &FrequencyTable, depth: u32, budget: u32) -> Result<ModuleReport> {
    if depth == 0 {
        return Err(Error::Invalid("depth must be at least 1".into()));
    }
    let mut entries = Vec::new();
    let mut levels = Vec::new();
    for family in families_at_depth(depth) {
        let ff = family_frequencies(table, family, budget)?;
        levels.push((family.label(), ff.level, ff.consistent));
        for (key, freq) in ff.values {
            let m = module_membership(&freq);
            entries.push(FrequencyEntry {
                key_hash: key.hash,
                family: family.label(),
                freq,
                k_min: m.k_min,
                in_module: m.in_module,
            });
        }
    }
    let generator = generated_subgroup(entries.iter().map(|e| &e.freq));
    let max_k_min = entries.iter().filter_map(|e| e.k_min).max();
    Ok(ModuleReport {
        depth,
        generator_k_min: module_membership(&generator).k_min,
        generator,
        max_k_min,
        entries,
        levels,
    })
}

/// The frequency of a single tile of each chirality from the collared table.
pub fn chirality_frequencies(table: &FrequencyTable) -> [BigRational; 2] {
    let mut out = [BigRational::zero(), BigRational::zero()];
    for (k, v) in table.keys.iter().zip(&table.values) {
        out[k.anchor.index()] += v;
    }
    out
}

pub fn chirality_of_key(key: &CanonicalKey) -> Chirality {
    key.anchor
}

pub fn ratio_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(s.into()))?;
    let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(s.into()))?;
    if q.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(p, q))
}

pub(crate) mod ratio {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&ratio_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_ratio(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod ratio_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(ratio_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_ratio(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub(crate) mod ratio_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        key: CanonicalKey,
        freq: String,
    }

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<CanonicalKey, BigRational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|(k, v)| Entry {
            key: k.clone(),
            freq: ratio_string(v),
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<CanonicalKey, BigRational>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        v.into_iter()
            .map(|e| Ok((e.key, parse_ratio(&e.freq).map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn chirality_system_perron() {
        let v = perron_vector(&[vec![2, 3], vec![3, 2]]).unwrap();
        assert_eq!(v, vec![q(1, 2), q(1, 2)]);
        assert_eq!(primitivity_exponent(&[vec![2, 3], vec![3, 2]]), Some(1));
    }

    #[test]
    fn non_primitive_detected() {
        assert_eq!(primitivity_exponent(&[vec![0, 1], vec![1, 0]]), None);
        assert_eq!(primitivity_exponent(&[vec![1, 1], vec![1, 0]]), Some(2));
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a: Vec<Vec<BigInt>> = [[1, 2, 3], [2, 4, 6], [1, 1, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let ker = rational_nullspace(&a);
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], vec![q(1, 1), q(-2, 1), q(1, 1)]);
    }

    #[test]
    fn reducible_matrix_has_two_dimensional_eigenspace() {
        assert!(matches!(
            perron_vector(&[vec![5, 0], vec![0, 5]]),
            Err(Error::KernelDimension(2))
        ));
    }

    #[test]
    fn membership() {
        assert_eq!(module_membership(&q(1, 264)).k_min, Some(0));
        assert_eq!(module_membership(&q(7, 264 * 125)).k_min, Some(3));
        assert_eq!(module_membership(&q(1, 2)).k_min, Some(0));
        assert!(!module_membership(&q(1, 7)).in_module);
        assert!(!module_membership(&q(1, 528)).in_module);
    }

    #[test]
    fn subgroup_generator() {
        let v = [q(1, 4), q(1, 6)];
        assert_eq!(generated_subgroup(v.iter()), q(1, 12));
        let w = [q(2, 3), q(4, 3)];
        assert_eq!(generated_subgroup(w.iter()), q(2, 3));
    }

    #[test]
    fn ratio_round_trip() {
        assert_eq!(parse_ratio("-3/6").unwrap(), q(-1, 2));
        assert_eq!(ratio_string(&q(-1, 2)), "-1/2");
        assert!(parse_ratio("1/0").is_err());
    }
}
