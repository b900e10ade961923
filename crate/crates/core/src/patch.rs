//! Patches, canonical keys up to direct isometry, and patch symmetries.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::context::Context;
use crate::field::ExactScalar;
use crate::motion::RigidMotion;
use crate::tile::{Chirality, Tile};

/// A finite set of tiles with pairwise disjoint interiors, optionally with a
/// marked point (the centre of a vertex star).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub tiles: Vec<Tile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<ExactScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

impl Patch {
    pub fn new(tiles: Vec<Tile>) -> Self {
        Self {
            tiles,
            marker: None,
            context: None,
        }
    }

    pub fn with_marker(mut self, p: ExactScalar) -> Self {
        self.marker = Some(p);
        self
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn moved(&self, g: &RigidMotion) -> Patch {
        Patch {
            tiles: self.tiles.iter().map(|t| t.moved(g)).collect(),
            marker: self.marker.as_ref().map(|p| g.apply(p)),
            context: self.context.clone(),
        }
    }

    pub fn mirrored(&self) -> Patch {
        Patch {
            tiles: self.tiles.iter().map(Tile::mirrored).collect(),
            marker: self.marker.as_ref().map(ExactScalar::conj),
            context: self.context.clone(),
        }
    }

    /// Largest vertex-to-vertex distance, in floating point. Used only for
    /// error bounds.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .tiles
            .iter()
            .flat_map(|t| t.vertices().map(|v| v.to_f64_pair()))
            .collect();
        let mut d: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                d = d.max(((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt());
            }
        }
        d
    }

    /// Connected through shared edges.
    pub fn is_edge_connected(&self) -> bool {
        if self.tiles.is_empty() {
            return true;
        }
        let ctx = Context::new(self.tiles.clone());
        let mut seen = vec![false; ctx.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &j in ctx.sharing_edge(i) {
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    stack.push(j as usize);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn pairwise_disjoint(&self) -> bool {
        Context::new(self.tiles.clone()).pairwise_disjoint()
    }
}

/// A tile expressed relative to an anchor tile placed in reference pose.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormTile {
    pub chirality: Chirality,
    pub a: i64,
    pub b: u8,
    pub t: ExactScalar,
}

/// Isometry-class fingerprint of a patch. The anchor tile is moved onto its
/// reference prototile and every tile is recorded relative to it; the tile
/// list is sorted, so the key does not depend on input order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalKey {
    /// Chirality of the anchor, which sits at the identity motion.
    pub anchor: Chirality,
    pub tiles: Vec<NormTile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<ExactScalar>,
    pub hash: String,
}

impl PartialOrd for CanonicalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by hash first, so catalogues sort by key hash.
impl Ord for CanonicalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.hash
            .cmp(&other.hash)
            .then_with(|| self.anchor.cmp(&other.anchor))
            .then_with(|| self.tiles.cmp(&other.tiles))
            .then_with(|| self.marker.cmp(&other.marker))
    }
}

impl CanonicalKey {
    fn from_parts(anchor: Chirality, tiles: Vec<NormTile>, marker: Option<ExactScalar>) -> Self {
        let hash = key_hash(anchor, &tiles, marker.as_ref());
        Self {
            anchor,
            tiles,
            marker,
            hash,
        }
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// The representative patch in anchored pose.
    pub fn representative(&self) -> Patch {
        Patch {
            tiles: self
                .tiles
                .iter()
                .map(|n| Tile::new(n.chirality, RigidMotion::new(n.a, n.b, n.t.clone())))
                .collect(),
            marker: self.marker.clone(),
            context: None,
        }
    }

    /// Index, in the representative, of the anchor (the tile at identity).
    pub fn anchor_position(&self) -> usize {
        self.tiles
            .iter()
            .position(|n| n.chirality == self.anchor && n.a == 0 && n.b == 0 && n.t.is_zero())
            .expect("anchored key contains its anchor")
    }

    pub fn anchor_chirality(&self) -> Chirality {
        self.anchor
    }

    /// The serialisation that is hashed.
    pub fn serialize_exact(&self) -> String {
        serialize_exact(self.anchor, &self.tiles, self.marker.as_ref())
    }
}

fn serialize_exact(anchor: Chirality, tiles: &[NormTile], marker: Option<&ExactScalar>) -> String {
    let mut s = format!("{}|", anchor.as_str());
    for n in tiles {
        let [c1, c2, c3, c4] = n.t.to_strings();
        let _ = write!(s, "{}:{}:{}:{},{},{},{};", n.chirality.as_str(), n.a, n.b, c1, c2, c3, c4);
    }
    if let Some(m) = marker {
        let [c1, c2, c3, c4] = m.to_strings();
        let _ = write!(s, "@{c1},{c2},{c3},{c4}");
    }
    s
}

fn key_hash(anchor: Chirality, tiles: &[NormTile], marker: Option<&ExactScalar>) -> String {
    let digest = Sha256::digest(serialize_exact(anchor, tiles, marker).as_bytes());
    let mut out = String::with_capacity(16);
    for byte in &digest[..8] {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// Key of `p` with tile `k` as anchor. Two anchored keys are equal iff a
/// direct isometry maps one patch onto the other and anchor onto anchor.
pub fn anchored_key(p: &Patch, k: usize) -> CanonicalKey {
    let inv = p.tiles[k].motion.inverse();
    let mut tiles: Vec<NormTile> = p
        .tiles
        .iter()
        .map(|t| {
            let m = inv.compose(&t.motion);
            NormTile {
                chirality: t.chirality,
                a: m.a,
                b: m.b,
                t: m.t,
            }
        })
        .collect();
    tiles.sort_unstable();
    let marker = p.marker.as_ref().map(|q| inv.apply(q));
    CanonicalKey::from_parts(p.tiles[k].chirality, tiles, marker)
}

/// Pose-independent key of a patch with the motion taking it onto the
/// key's representative, and the chosen anchor. The anchor is the one whose
/// normalised tile list is smallest.
pub fn canonicalize_with_anchor(p: &Patch) -> (CanonicalKey, RigidMotion, usize) {
    assert!(!p.tiles.is_empty(), "cannot canonicalise an empty patch");
    let mut best: Option<(CanonicalKey, usize)> = None;
    for k in 0..p.tiles.len() {
        let key = anchored_key(p, k);
        let better = match &best {
            None => true,
            Some((b, _)) => {
                (key.anchor, &key.tiles, &key.marker) < (b.anchor, &b.tiles, &b.marker)
            }
        };
        if better {
            best = Some((key, k));
        }
    }
    let (key, k) = best.expect("non-empty");
    (key, p.tiles[k].motion.inverse(), k)
}

pub fn canonicalize(p: &Patch) -> (CanonicalKey, RigidMotion) {
    let (key, g, _) = canonicalize_with_anchor(p);
    (key, g)
}

/// A clopen set of the canonical transversal: tilings whose tile at the
/// puncture, together with its surroundings, agrees with a patch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClopenSetKey {
    /// Key anchored at the puncture tile.
    pub key: CanonicalKey,
    /// Index of the puncture tile in the patch the key was taken from.
    pub anchor_index: usize,
}

impl ClopenSetKey {
    pub fn new(p: &Patch, anchor_index: usize) -> Self {
        Self {
            key: anchored_key(p, anchor_index),
            anchor_index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub order: usize,
    /// The non-identity stabiliser elements.
    pub elements: Vec<RigidMotion>,
    /// Fixed point of the half turn, for order 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<ExactScalar>,
    /// Rotation angle of the non-trivial element, in units of π, when it is a
    /// multiple of a quarter turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_over_pi: Option<String>,
}

impl SymmetryReport {
    pub fn is_half_turn(&self) -> bool {
        self.order == 2 && self.angle_over_pi.as_deref() == Some("1")
    }
}

/// Direct isometries mapping the patch (and its marker) onto itself. Every
/// such map sends tile 0 to some tile `j` with the same anchored key.
pub fn symmetry_group(p: &Patch) -> SymmetryReport {
    let k0 = anchored_key(p, 0);
    let g0_inv = p.tiles[0].motion.inverse();
    let mut elements = Vec::new();
    for j in 1..p.tiles.len() {
        if p.tiles[j].chirality == p.tiles[0].chirality && anchored_key(p, j) == k0 {
            elements.push(p.tiles[j].motion.compose(&g0_inv));
        }
    }
    let order = elements.len() + 1;
    let (center, angle_over_pi) = match elements.as_slice() {
        [h] if h.a == 0 => {
            let angle = match h.b {
                1 => "1/2",
                2 => "1",
                3 => "3/2",
                _ => "0",
            };
            // u·c + t = c  ⇒  c = t / (1 - u)
            let one_minus_u = &ExactScalar::one() - &h.unit();
            let center = h.t.checked_div(&one_minus_u).ok();
            (center, Some(angle.to_string()))
        }
        _ => (None, None),
    };
    SymmetryReport {
        order,
        elements,
        center,
        angle_over_pi,
    }
}

/// Whether some direct isometry maps `p` onto `q`, found by brute force over
/// the images of tile 0 without using keys.
pub fn directly_congruent(p: &Patch, q: &Patch) -> bool {
    if p.tiles.len() != q.tiles.len() || p.marker.is_some() != q.marker.is_some() {
        return false;
    }
    let target: std::collections::HashSet<&Tile> = q.tiles.iter().collect();
    let t0 = &p.tiles[0];
    let t0_inv = t0.motion.inverse();
    q.tiles.iter().filter(|t| t.chirality == t0.chirality).any(|t| {
        let g = t.motion.compose(&t0_inv);
        p.tiles.iter().all(|s| target.contains(&s.moved(&g)))
            && match (&p.marker, &q.marker) {
                (Some(a), Some(b)) => &g.apply(a) == b,
                _ => true,
            }
    })
}
