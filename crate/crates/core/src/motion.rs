//! Direct isometries with symbolic rotation exponents.
//!
//! A motion acts on the left, `g·p = u·p + t` (or `u·conj(p) + t` when the
//! reflection flag is set), with `u = ((2+i)/√5)^a · i^b`. The right action
//! `T.(s, R_θ) = R_{-θ}(T - s)` used for tilings is the inverse of the left
//! action by `(s, R_θ)`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::field::ExactScalar;

/// `((2+i)/√5)^a` for any integer `a`, memoised.
pub fn alpha_power(a: i64) -> ExactScalar {
    static CACHE: OnceLock<RwLock<HashMap<i64, ExactScalar>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(u) = cache.read().expect("unit cache poisoned").get(&a) {
        return u.clone();
    }
    // (2±i)^|a| / √5^|a|; dividing by √5 is multiplying by √5/5.
    let base = if a >= 0 {
        ExactScalar::gaussian(2, 1)
    } else {
        ExactScalar::gaussian(2, -1)
    };
    let n = a.unsigned_abs();
    let mut u = base.pow(n as i64).expect("non-negative power");
    let fives = ExactScalar::from_int(5).pow((n / 2) as i64).expect("power of five");
    u = u.checked_div(&fives).expect("nonzero");
    if n % 2 == 1 {
        u = &u * &ExactScalar::from_parts([0, 0, 1, 0], 5);
    }
    cache
        .write()
        .expect("unit cache poisoned")
        .insert(a, u.clone());
    u
}

/// `i^b` for `b` taken mod 4.
pub fn quarter_power(b: u8) -> ExactScalar {
    match b % 4 {
        0 => ExactScalar::one(),
        1 => ExactScalar::i(),
        2 => ExactScalar::from_int(-1),
        _ => ExactScalar::gaussian(0, -1),
    }
}

/// The unit `((2+i)/√5)^a · i^b`.
pub fn rotation_unit(a: i64, b: u8) -> ExactScalar {
    let u = alpha_power(a);
    match b % 4 {
        0 => u,
        2 => -u,
        q => &u * &quarter_power(q),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RigidMotion {
    /// Exponent of the rotation by `α = arg(2+i)`.
    pub a: i64,
    /// Exponent of the quarter turn, in `0..4`.
    pub b: u8,
    pub t: ExactScalar,
    /// Conjugate before rotating. Only used to define the mirror prototile.
    #[serde(default)]
    pub refl: bool,
}

impl Default for RigidMotion {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidMotion {
    pub fn identity() -> Self {
        Self {
            a: 0,
            b: 0,
            t: ExactScalar::zero(),
            refl: false,
        }
    }

    pub fn new(a: i64, b: u8, t: ExactScalar) -> Self {
        Self {
            a,
            b: b % 4,
            t,
            refl: false,
        }
    }

    pub fn rotation(a: i64, b: u8) -> Self {
        Self::new(a, b, ExactScalar::zero())
    }

    pub fn translation(t: ExactScalar) -> Self {
        Self::new(0, 0, t)
    }

    /// Complex conjugation `p ↦ conj(p)`.
    pub fn reflection() -> Self {
        Self {
            refl: true,
            ..Self::identity()
        }
    }

    pub fn unit(&self) -> ExactScalar {
        rotation_unit(self.a, self.b)
    }

    pub fn is_identity(&self) -> bool {
        !self.refl && self.a == 0 && self.b == 0 && self.t.is_zero()
    }

    pub fn apply(&self, p: &ExactScalar) -> ExactScalar {
        let u = self.unit();
        if self.refl {
            &(&u * &p.conj()) + &self.t
        } else {
            &(&u * p) + &self.t
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        let u = self.unit();
        let inner_t = if self.refl { other.t.conj() } else { other.t.clone() };
        let t = &(&u * &inner_t) + &self.t;
        let (a, b) = if self.refl {
            (self.a - other.a, self.b.wrapping_sub(other.b) % 4)
        } else {
            (self.a + other.a, (self.b + other.b) % 4)
        };
        RigidMotion {
            a,
            b: b % 4,
            t,
            refl: self.refl != other.refl,
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        if self.refl {
            // p = u·conj(q - t)
            let u = self.unit();
            RigidMotion {
                a: self.a,
                b: self.b,
                t: -(&u * &self.t.conj()),
                refl: true,
            }
        } else {
            let inv_u = rotation_unit(-self.a, (4 - self.b) % 4);
            RigidMotion {
                a: -self.a,
                b: (4 - self.b) % 4,
                t: -(&inv_u * &self.t),
                refl: false,
            }
        }
    }

    /// The motion conjugated by `z ↦ λ(z - c)`, i.e. `Φ ∘ self ∘ Φ⁻¹`.
    /// Rotation exponents are unchanged.
    pub fn conjugate_by_similarity(&self, lambda: &ExactScalar, c: &ExactScalar) -> RigidMotion {
        assert!(!self.refl, "similarity conjugation of reflections is unsupported");
        // Φ g Φ⁻¹ (w) = u·w + λ(u·c + t - c)
        let u = self.unit();
        let t = lambda * &(&(&(&u * c) + &self.t) - c);
        RigidMotion::new(self.a, self.b, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_fixes_points() {
        let p = ExactScalar::gaussian(2, 0);
        assert_eq!(RigidMotion::identity().apply(&p), p);
    }

    #[test]
    fn alpha_rotation_of_two() {
        let g = RigidMotion::rotation(1, 0);
        let expected = ExactScalar::from_parts([0, 0, 4, 2], 5); // (4+2i)/√5
        assert_eq!(g.apply(&ExactScalar::from_int(2)), expected);
    }

    #[test]
    fn two_quarter_turns() {
        let q = RigidMotion::rotation(0, 1);
        assert_eq!(q.compose(&q).apply(&ExactScalar::one()), ExactScalar::from_int(-1));
    }

    #[test]
    fn inverse_of_identity() {
        assert!(RigidMotion::identity().inverse().is_identity());
    }

    #[test]
    fn compose_with_inverse() {
        let g = RigidMotion::new(3, 2, ExactScalar::gaussian(1, 1));
        assert!(g.compose(&g.inverse()).is_identity());
        assert!(g.inverse().compose(&g).is_identity());
    }

    #[test]
    fn opposite_alpha_rotations_cancel() {
        let g = RigidMotion::rotation(1, 0).compose(&RigidMotion::rotation(-1, 0));
        assert!(g.is_identity());
    }

    #[test]
    fn units_have_modulus_one() {
        for a in -6..=6 {
            for b in 0..4 {
                let u = rotation_unit(a, b);
                assert!(u.norm_sqr().is_one(), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn reflection_composition() {
        let r = RigidMotion::reflection();
        let g = RigidMotion::new(2, 1, ExactScalar::gaussian(3, -1));
        let p = ExactScalar::gaussian(5, 7);
        let rg = r.compose(&g);
        assert_eq!(rg.apply(&p), r.apply(&g.apply(&p)));
        let gr = g.compose(&r);
        assert_eq!(gr.apply(&p), g.apply(&r.apply(&p)));
        assert!(rg.compose(&rg.inverse()).is_identity());
        assert!(r.compose(&r).is_identity());
    }

    #[test]
    fn similarity_conjugation() {
        let lambda = ExactScalar::gaussian(2, -1);
        let c = ExactScalar::one();
        let g = RigidMotion::new(-2, 3, ExactScalar::gaussian(4, 1));
        let h = g.conjugate_by_similarity(&lambda, &c);
        let phi = |z: &ExactScalar| &lambda * &(z - &c);
        let p = ExactScalar::gaussian(-3, 2);
        assert_eq!(h.apply(&phi(&p)), phi(&g.apply(&p)));
    }
}
