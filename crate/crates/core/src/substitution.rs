//! The pinwheel inflate-and-subdivide rule and the nested supertiles grown
//! around its fixed point.
//!
//! Inflation is the similarity `Φ(z) = (2 - i)(z - 1)`, which maps the seed
//! `(0,0), (2,0), (2,1)` onto the 1-supertile `(-2,1), (2,-1), (3,1)` and fixes
//! `(3 + i)/2`. A tile `g·P` inflates to `(Φ g Φ⁻¹)·Φ(P)`, and `Φ(P)` is cut into
//! five unit tiles by the rule's pieces.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::field::ExactScalar;
use crate::kernel::{self, PlanePoint};
use crate::motion::RigidMotion;
use crate::par;
use crate::tile::{reference_vertices, Chirality, Tile, LONG, RIGHT, SHORT};

/// Default cap on supertile size: level 8.
pub const DEFAULT_MAX_TILES: u64 = 390_625;

pub fn max_tiles_from_env() -> u64 {
    std::env::var("PINWHEEL_MAX_TILES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_TILES)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub chirality: Chirality,
    pub motion: RigidMotion,
}

#[derive(Clone, Debug)]
pub struct SubdivisionRule {
    /// Linear part of `Φ`.
    pub inflation: ExactScalar,
    /// `Φ(z) = inflation · (z - center)`.
    pub center: ExactScalar,
    minus: [Piece; 5],
    plus: [Piece; 5],
}

impl SubdivisionRule {
    pub fn pieces(&self, parent: Chirality) -> &[Piece; 5] {
        match parent {
            Chirality::Minus => &self.minus,
            Chirality::Plus => &self.plus,
        }
    }

    pub fn inflate_point(&self, p: &ExactScalar) -> ExactScalar {
        &self.inflation * &(p - &self.center)
    }

    /// The five tiles of the subdivided inflation of `t`, in piece order.
    pub fn inflate(&self, t: &Tile) -> [Tile; 5] {
        let outer = t.motion.conjugate_by_similarity(&self.inflation, &self.center);
        self.pieces(t.chirality)
            .clone()
            .map(|p| Tile::new(p.chirality, outer.compose(&p.motion)))
    }

    /// Checks that the pieces of each parent chirality exactly cover the
    /// inflated prototile.
    pub fn self_check(&self) -> Result<()> {
        for parent in [Chirality::Minus, Chirality::Plus] {
            let big = reference_vertices(parent).map(|v| self.inflate_point(&v));
            let tiles: Vec<Tile> = self
                .pieces(parent)
                .iter()
                .map(|p| Tile::new(p.chirality, p.motion.clone()))
                .collect();
            let report = check_cover(&tiles, &big, 5);
            if !report.passed() {
                return Err(Error::Configuration(format!(
                    "{} pieces do not tile the inflated prototile: {report:?}",
                    parent.as_str()
                )));
            }
        }
        Ok(())
    }
}

fn minus_pieces() -> [Piece; 5] {
    let p = |chirality, b, re, im| Piece {
        chirality,
        motion: RigidMotion::new(0, b, ExactScalar::gaussian(re, im)),
    };
    [
        p(Chirality::Minus, 0, 0, 0),
        p(Chirality::Minus, 2, 2, 1),
        p(Chirality::Plus, 0, -2, 1),
        p(Chirality::Plus, 0, 0, 0),
        p(Chirality::Plus, 1, 2, -1),
    ]
}

/// Mirror pieces: `R_{-2α} ∘ conj ∘ piece ∘ conj`, since `Φ` maps the `Plus`
/// reference onto the conjugate 1-supertile rotated by `-2α`.
fn plus_pieces(minus: &[Piece; 5]) -> [Piece; 5] {
    let r = RigidMotion::rotation(-2, 0);
    minus.clone().map(|p| {
        let m = &p.motion;
        let mirrored = RigidMotion::new(-m.a, (4 - m.b) % 4, m.t.conj());
        Piece {
            chirality: p.chirality.flip(),
            motion: r.compose(&mirrored),
        }
    })
}

/// The canonical pinwheel rule, validated by its exact-cover self-check.
pub fn subdivision_rule() -> Result<SubdivisionRule> {
    let minus = minus_pieces();
    let plus = plus_pieces(&minus);
    let rule = SubdivisionRule {
        inflation: ExactScalar::gaussian(2, -1),
        center: ExactScalar::one(),
        minus,
        plus,
    };
    rule.self_check()?;
    Ok(rule)
}

fn rule() -> &'static SubdivisionRule {
    static RULE: std::sync::OnceLock<SubdivisionRule> = std::sync::OnceLock::new();
    RULE.get_or_init(|| subdivision_rule().expect("pinwheel subdivision rule self-check"))
}

pub fn inflate(t: &Tile) -> [Tile; 5] {
    rule().inflate(t)
}

/// Subdivides every tile of a patch once, keeping parent order.
pub fn inflate_all(tiles: &[Tile]) -> Vec<Tile> {
    par::map(tiles, inflate).into_iter().flatten().collect()
}

/// Twice the signed area of a triangle, as an element of `Q(√5)`.
fn twice_area(v: &[ExactScalar; 3]) -> ExactScalar {
    let w = &(&v[1] - &v[0]).conj() * &(&v[2] - &v[0]);
    // Imaginary part: keep the i and i√5 components.
    let n = w.numerators();
    ExactScalar::from_big_parts(
        [n[1].clone(), BigInt::zero(), n[3].clone(), BigInt::zero()],
        w.denominator().clone(),
    )
    .expect("nonzero denominator")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub tile_count: usize,
    pub expected_count: usize,
    /// Sum of tile areas equals the region area.
    pub area_matches: bool,
    /// Every tile lies in the closed region.
    pub contained: bool,
    pub pairwise_disjoint: bool,
}

impl CoverReport {
    /// Containment, disjointness and equal area together force the union of
    /// the closed tiles to be the whole region.
    pub fn passed(&self) -> bool {
        self.tile_count == self.expected_count
            && self.area_matches
            && self.contained
            && self.pairwise_disjoint
    }
}

pub fn check_cover(tiles: &[Tile], region: &[ExactScalar; 3], expected: usize) -> CoverReport {
    let areas = par::map(tiles, |t| twice_area(&t.vertices()));
    let mut total = ExactScalar::zero();
    for a in &areas {
        total = &total + &abs_real(a);
    }
    let region_area = abs_real(&twice_area(region));
    let verts: Vec<[ExactScalar; 3]> = par::map(tiles, |t| t.vertices());
    let contained = par::map(&verts, |v| v.iter().all(|p| kernel::locate(p, region).is_inside()))
        .into_iter()
        .all(|b| b);
    let ctx = Context::new(tiles.to_vec());
    CoverReport {
        tile_count: tiles.len(),
        expected_count: expected,
        area_matches: total == region_area,
        contained,
        pairwise_disjoint: ctx.pairwise_disjoint(),
    }
}

fn abs_real(x: &ExactScalar) -> ExactScalar {
    if x.re_sign() == Ordering::Less {
        -x
    } else {
        x.clone()
    }
}

/// Position of a tile inside its generation tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentRef {
    /// Index of the enclosing 1-supertile, i.e. of the parent tile one level up.
    pub parent: usize,
    /// Which of the five pieces the tile is.
    pub position: u8,
}

/// A level-`n` supertile: `5ⁿ` unit tiles filling `Φⁿ(seed)`. Tiles are stored
/// so that the children of tile `j` of level `n-1` sit at `5j..5j+5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Supertile {
    pub level: u32,
    pub tiles: Vec<Tile>,
}

impl Supertile {
    /// Vertices of `Φⁿ(seed)`: right angle, short-leg end, long-leg end.
    pub fn region(&self) -> [ExactScalar; 3] {
        region_of_level(self.level)
    }

    pub fn parent_of(&self, index: usize) -> Option<ParentRef> {
        (self.level > 0 && index < self.tiles.len()).then_some(ParentRef {
            parent: index / 5,
            position: (index % 5) as u8,
        })
    }

    /// Piece positions from the root down to the tile.
    pub fn path(&self, index: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.level as usize);
        let mut i = index;
        for _ in 0..self.level {
            out.push((i % 5) as u8);
            i /= 5;
        }
        out.reverse();
        out
    }

    /// Index of the level-`(n-k)` ancestor of a tile.
    pub fn ancestor(&self, index: usize, k: u32) -> usize {
        index / 5usize.pow(k)
    }

    /// Range of tile indices descending from the centre piece of the root,
    /// which reproduce `supertile(n-1)` in order.
    pub fn central_subsupertile(&self) -> std::ops::Range<usize> {
        0..self.tiles.len() / 5
    }

    pub fn chirality_counts(&self) -> [u64; 2] {
        let mut c = [0u64; 2];
        for t in &self.tiles {
            c[t.chirality.index()] += 1;
        }
        c
    }

    pub fn cover_report(&self) -> CoverReport {
        check_cover(&self.tiles, &self.region(), 5usize.pow(self.level))
    }

    /// Every vertex lies in `Z[i][1/5]`: no √5 part and a power-of-five
    /// denominator.
    pub fn coordinates_in_z_i_one_fifth(&self) -> bool {
        par::map(&self.tiles, |t| {
            t.vertices().iter().all(|v| {
                if !v.is_gaussian_rational() {
                    return false;
                }
                let mut d = v.denominator().clone();
                let five = BigInt::from(5);
                while (&d % &five).is_zero() {
                    d /= &five;
                }
                d.is_one()
            })
        })
        .into_iter()
        .all(|b| b)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("supertile serialises")
    }

    pub fn to_svg(&self, style: &SvgStyle) -> String {
        render_svg(&self.tiles, style)
    }
}

pub fn region_of_level(n: u32) -> [ExactScalar; 3] {
    let r = rule();
    let mut v = reference_vertices(Chirality::Minus);
    for _ in 0..n {
        v = v.map(|p| r.inflate_point(&p));
    }
    v
}

pub fn supertile(n: u32) -> Result<Supertile> {
    supertile_with_limit(n, max_tiles_from_env())
}

pub fn supertile_with_limit(n: u32, max_tiles: u64) -> Result<Supertile> {
    let requested = 5u64.checked_pow(n).unwrap_or(u64::MAX);
    if requested > max_tiles {
        return Err(Error::ResourceLimit {
            what: "supertile tiles",
            requested,
            limit: max_tiles,
        });
    }
    let mut tiles = vec![Tile::reference(Chirality::Minus)];
    for _ in 0..n {
        tiles = inflate_all(&tiles);
    }
    Ok(Supertile { level: n, tiles })
}

#[derive(Clone, Debug)]
pub struct SvgStyle {
    pub stroke: String,
    pub stroke_width: f64,
    pub fill_minus: String,
    pub fill_plus: String,
    /// Pixels per unit length.
    pub scale: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            stroke: "#222222".into(),
            stroke_width: 0.6,
            fill_minus: "#f2c14e".into(),
            fill_plus: "#5b8e7d".into(),
            scale: 12.0,
        }
    }
}

/// Presentation-only rendering; coordinates are rounded to 4 decimals.
pub fn render_svg(tiles: &[Tile], style: &SvgStyle) -> String {
    let pts: Vec<[(f64, f64); 3]> = par::map(tiles, |t| t.vertices().map(|v| v.to_f64_pair()));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in pts.iter().flatten() {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if tiles.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let s = style.scale;
    let pad = 1.0;
    let (w, h) = ((x1 - x0 + 2.0 * pad) * s, (y1 - y0 + 2.0 * pad) * s);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.4}" height="{h:.4}" viewBox="0 0 {w:.4} {h:.4}">"#
    );
    let _ = writeln!(
        out,
        r#"<g stroke="{}" stroke-width="{:.4}" stroke-linejoin="round">"#,
        style.stroke, style.stroke_width
    );
    for (t, tri) in tiles.iter().zip(&pts) {
        let fill = match t.chirality {
            Chirality::Minus => &style.fill_minus,
            Chirality::Plus => &style.fill_plus,
        };
        let mut d = String::new();
        for (k, &(x, y)) in tri.iter().enumerate() {
            // SVG's y axis points down.
            let (px, py) = ((x - x0 + pad) * s, (y1 - y + pad) * s);
            let _ = write!(d, "{}{px:.4},{py:.4}", if k == 0 { "" } else { " " });
        }
        let _ = writeln!(out, r#"<polygon points="{d}" fill="{fill}"/>"#);
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Vertices of a tile in `[right, short, long]` order, re-exported for tests.
pub fn vertex_triple(t: &Tile) -> (ExactScalar, ExactScalar, ExactScalar) {
    let v = t.vertices();
    (v[RIGHT].clone(), v[SHORT].clone(), v[LONG].clone())
}

/// Whether every tile of `inner` also appears in `outer`.
pub fn is_subpatch(inner: &[Tile], outer: &[Tile]) -> bool {
    let set: std::collections::HashSet<&Tile> = outer.iter().collect();
    inner.iter().all(|t| set.contains(t))
}

/// The midpoint helper used by examples: midpoint of two field points.
pub fn midpoint(p: &ExactScalar, q: &ExactScalar) -> ExactScalar {
    ExactScalar::midpoint(p, q)
}
