//! The two pinwheel prototiles and their placed copies.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::field::ExactScalar;
use crate::kernel::{self, Location, PlanePoint};
use crate::motion::RigidMotion;

/// Handedness of a tile. `Minus` is the handedness of the seed triangle
/// `(0,0), (2,0), (2,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Chirality {
    Minus,
    Plus,
}

impl Chirality {
    pub fn flip(self) -> Self {
        match self {
            Chirality::Minus => Chirality::Plus,
            Chirality::Plus => Chirality::Minus,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Chirality::Minus => 0,
            Chirality::Plus => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Chirality::Minus => "MINUS",
            Chirality::Plus => "PLUS",
        }
    }
}

/// Vertex slots, in storage order.
pub const RIGHT: usize = 0;
pub const SHORT: usize = 1;
pub const LONG: usize = 2;

/// Reference triangle `[right-angle, short-leg end, long-leg end]`.
/// The `Minus` reference is the seed; `Plus` is its complex conjugate.
pub fn reference_vertices(ch: Chirality) -> [ExactScalar; 3] {
    let short_y = match ch {
        Chirality::Minus => 1,
        Chirality::Plus => -1,
    };
    [
        ExactScalar::gaussian(2, 0),
        ExactScalar::gaussian(2, short_y),
        ExactScalar::gaussian(0, 0),
    ]
}

/// An interior angle written as `quarter·(π/2) + alpha·α`. The two generators
/// are rationally independent, so a sum is a full turn iff it equals `(4, 0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Angle {
    pub quarter: i32,
    pub alpha: i32,
}

impl Angle {
    pub const FULL: Angle = Angle { quarter: 4, alpha: 0 };
    pub const STRAIGHT: Angle = Angle { quarter: 2, alpha: 0 };

    pub fn at_vertex(slot: usize) -> Angle {
        match slot {
            RIGHT => Angle { quarter: 1, alpha: 0 },
            LONG => Angle { quarter: 0, alpha: 1 },
            _ => Angle { quarter: 1, alpha: -1 },
        }
    }

    pub fn of_location(loc: Location) -> Angle {
        match loc {
            Location::Outside => Angle::default(),
            Location::Vertex(k) => Angle::at_vertex(k),
            Location::Edge(_) => Angle::STRAIGHT,
            Location::Interior => Angle::FULL,
        }
    }
}

impl std::ops::AddAssign for Angle {
    fn add_assign(&mut self, o: Angle) {
        self.quarter += o.quarter;
        self.alpha += o.alpha;
    }
}

/// A placed prototile: `motion` applied to the reference triangle of
/// `chirality`. Motions of tiles never carry the reflection flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    pub chirality: Chirality,
    pub motion: RigidMotion,
}

impl Tile {
    pub fn new(chirality: Chirality, motion: RigidMotion) -> Self {
        debug_assert!(!motion.refl);
        Self { chirality, motion }
    }

    pub fn reference(chirality: Chirality) -> Self {
        Self::new(chirality, RigidMotion::identity())
    }

    /// `[right-angle, short-leg end, long-leg end]`.
    pub fn vertices(&self) -> [ExactScalar; 3] {
        let u = self.motion.unit();
        reference_vertices(self.chirality).map(|v| &(&u * &v) + &self.motion.t)
    }

    /// Image of the tile under a direct motion.
    pub fn moved(&self, g: &RigidMotion) -> Tile {
        Tile::new(self.chirality, g.compose(&self.motion))
    }

    /// Mirror image under complex conjugation.
    pub fn mirrored(&self) -> Tile {
        // conj ∘ g ∘ conj has unit conj(u) and translation conj(t).
        let m = &self.motion;
        Tile::new(
            self.chirality.flip(),
            RigidMotion::new(-m.a, (4 - m.b) % 4, m.t.conj()),
        )
    }

    pub fn centroid(&self) -> ExactScalar {
        let [a, b, c] = self.vertices();
        &(&(&a + &b) + &c) * &ExactScalar::from_parts([1, 0, 0, 0], 3)
    }

    /// Midpoint of the hypotenuse (short-leg end to long-leg end).
    pub fn hypotenuse_midpoint(&self) -> ExactScalar {
        let v = self.vertices();
        ExactScalar::midpoint(&v[SHORT], &v[LONG])
    }
}

/// Sign of `cross(long - right, short - right)`: `Less` for `Minus`.
pub fn handedness(vertices: &[ExactScalar; 3]) -> Ordering {
    ExactScalar::orient(&vertices[RIGHT], &vertices[LONG], &vertices[SHORT])
}

pub fn chirality_of(vertices: &[ExactScalar; 3]) -> Option<Chirality> {
    match handedness(vertices) {
        Ordering::Less => Some(Chirality::Minus),
        Ordering::Greater => Some(Chirality::Plus),
        Ordering::Equal => None,
    }
}

/// Sign of the vertex triple as listed.
pub fn orientation_sign(p: &ExactScalar, q: &ExactScalar, r: &ExactScalar) -> Ordering {
    ExactScalar::orient(p, q, r)
}

pub fn point_in_tile(p: &ExactScalar, t: &Tile) -> Location {
    kernel::locate(p, &t.vertices())
}

pub fn interiors_disjoint(t1: &Tile, t2: &Tile) -> bool {
    kernel::interiors_disjoint(&t1.vertices(), &t2.vertices())
}

/// The unique direct isometry taking `t1` onto `t2`, if chiralities match.
pub fn congruence(t1: &Tile, t2: &Tile) -> Option<RigidMotion> {
    (t1.chirality == t2.chirality).then(|| t2.motion.compose(&t1.motion.inverse()))
}

/// Squared length of the segment `pq`, an element of `Q(√5)`.
pub fn squared_distance(p: &ExactScalar, q: &ExactScalar) -> ExactScalar {
    (p - q).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_minus_and_ccw() {
        let seed = Tile::reference(Chirality::Minus);
        let v = seed.vertices();
        assert_eq!(v[RIGHT], ExactScalar::gaussian(2, 0));
        assert_eq!(v[SHORT], ExactScalar::gaussian(2, 1));
        assert_eq!(v[LONG], ExactScalar::gaussian(0, 0));
        assert_eq!(chirality_of(&v), Some(Chirality::Minus));
        let ccw = orientation_sign(
            &ExactScalar::gaussian(0, 0),
            &ExactScalar::gaussian(2, 0),
            &ExactScalar::gaussian(2, 1),
        );
        assert_eq!(ccw, Ordering::Greater);
    }

    #[test]
    fn leg_lengths() {
        for ch in [Chirality::Minus, Chirality::Plus] {
            let t = Tile::new(ch, RigidMotion::new(-4, 3, ExactScalar::gaussian(7, -2)));
            let v = t.vertices();
            assert_eq!(squared_distance(&v[RIGHT], &v[SHORT]), ExactScalar::from_int(1));
            assert_eq!(squared_distance(&v[RIGHT], &v[LONG]), ExactScalar::from_int(4));
            assert_eq!(squared_distance(&v[SHORT], &v[LONG]), ExactScalar::from_int(5));
            assert_eq!(chirality_of(&v), Some(ch));
        }
    }

    #[test]
    fn translated_seed_is_disjoint() {
        let seed = Tile::reference(Chirality::Minus);
        let moved = seed.moved(&RigidMotion::translation(ExactScalar::gaussian(10, 0)));
        assert!(interiors_disjoint(&seed, &moved));
        assert!(!interiors_disjoint(&seed, &seed));
    }

    #[test]
    fn self_congruence_is_identity() {
        let seed = Tile::reference(Chirality::Minus);
        assert!(congruence(&seed, &seed).unwrap().is_identity());
        assert!(congruence(&seed, &seed.mirrored()).is_none());
    }

    #[test]
    fn congruence_maps_vertices() {
        let t1 = Tile::new(Chirality::Plus, RigidMotion::new(2, 1, ExactScalar::gaussian(1, 1)));
        let t2 = Tile::new(Chirality::Plus, RigidMotion::new(-2, 3, ExactScalar::gaussian(-4, 0)));
        let g = congruence(&t1, &t2).unwrap();
        let img = t1.vertices().map(|p| g.apply(&p));
        assert_eq!(img, t2.vertices());
    }

    #[test]
    fn mirror_matches_conjugated_vertices() {
        let t = Tile::new(Chirality::Minus, RigidMotion::new(2, 1, ExactScalar::gaussian(3, 1)));
        let m = t.mirrored();
        assert_eq!(m.vertices(), t.vertices().map(|p| p.conj()));
    }
}
