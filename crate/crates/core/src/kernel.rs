//! Exact planar predicates shared by the field-valued and the integer-grid
//! point types.

use std::cmp::Ordering;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::field::{sign_a_plus_b_sqrt5, ExactScalar};

pub trait PlanePoint: Clone + Eq + Hash + Ord + Send + Sync + std::fmt::Debug {
    /// Sign of `cross(b - a, c - a)`; `Greater` is counter-clockwise.
    fn orient(a: &Self, b: &Self, c: &Self) -> Ordering;
    /// Sign of `dot(b - a, c - a)`.
    fn dot_sign(a: &Self, b: &Self, c: &Self) -> Ordering;
    fn midpoint(a: &Self, b: &Self) -> Self;
    /// Order of `p` and `q` along the direction `b - a`.
    fn cmp_along(a: &Self, b: &Self, p: &Self, q: &Self) -> Ordering;
    /// `(floor(x / cell), floor(y / cell))` for bucketing.
    fn cell(&self, cell: i64) -> (i64, i64);
}

impl PlanePoint for ExactScalar {
    fn orient(a: &Self, b: &Self, c: &Self) -> Ordering {
        let v = (b - a).conj();
        let w = c - a;
        (&v * &w).im_sign()
    }

    fn dot_sign(a: &Self, b: &Self, c: &Self) -> Ordering {
        let v = (b - a).conj();
        let w = c - a;
        (&v * &w).re_sign()
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        &(a + b) * &ExactScalar::from_parts([1, 0, 0, 0], 2)
    }

    fn cmp_along(a: &Self, b: &Self, p: &Self, q: &Self) -> Ordering {
        let v = (b - a).conj();
        (&v * &(p - q)).re_sign()
    }

    fn cell(&self, cell: i64) -> (i64, i64) {
        let n = self.numerators();
        let d = self.denominator() * cell;
        (floor_quadratic(&n[0], &n[2], &d), floor_quadratic(&n[1], &n[3], &d))
    }
}

/// `floor((a + b√5) / d)` for `d > 0`, exact.
fn floor_quadratic(a: &BigInt, b: &BigInt, d: &BigInt) -> i64 {
    let approx = (a.to_f64().unwrap_or(0.0) + b.to_f64().unwrap_or(0.0) * 5f64.sqrt())
        / d.to_f64().unwrap_or(1.0);
    let mut k = approx.floor() as i64;
    // k ≤ x  ⇔  a - k·d + b√5 ≥ 0
    let le = |k: i64| sign_a_plus_b_sqrt5(&(a - d * k), b) != Ordering::Less;
    while !le(k) {
        k -= 1;
    }
    while le(k + 1) {
        k += 1;
    }
    k
}

/// A point of `(1/D)·Z[i]` scaled by `D`, with all arithmetic in `i128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl PlanePoint for GridPoint {
    fn orient(a: &Self, b: &Self, c: &Self) -> Ordering {
        let (vx, vy) = ((b.x - a.x) as i128, (b.y - a.y) as i128);
        let (wx, wy) = ((c.x - a.x) as i128, (c.y - a.y) as i128);
        (vx * wy - vy * wx).cmp(&0)
    }

    fn dot_sign(a: &Self, b: &Self, c: &Self) -> Ordering {
        let (vx, vy) = ((b.x - a.x) as i128, (b.y - a.y) as i128);
        let (wx, wy) = ((c.x - a.x) as i128, (c.y - a.y) as i128);
        (vx * wx + vy * wy).cmp(&0)
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        debug_assert!((a.x + b.x) % 2 == 0 && (a.y + b.y) % 2 == 0);
        GridPoint {
            x: (a.x + b.x) / 2,
            y: (a.y + b.y) / 2,
        }
    }

    fn cmp_along(a: &Self, b: &Self, p: &Self, q: &Self) -> Ordering {
        let (vx, vy) = ((b.x - a.x) as i128, (b.y - a.y) as i128);
        let (dx, dy) = ((p.x - q.x) as i128, (p.y - q.y) as i128);
        (vx * dx + vy * dy).cmp(&0)
    }

    fn cell(&self, cell: i64) -> (i64, i64) {
        (self.x.div_euclid(cell), self.y.div_euclid(cell))
    }
}

/// Where a point sits relative to a closed triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Outside,
    /// On vertex `k` of the triangle.
    Vertex(usize),
    /// In the relative interior of edge `k`, the edge from vertex `k` to `k+1`.
    Edge(usize),
    Interior,
}

impl Location {
    pub fn is_inside(self) -> bool {
        self != Location::Outside
    }
}

/// True when `p` lies on the closed segment `[a, b]`.
pub fn on_segment<P: PlanePoint>(p: &P, a: &P, b: &P) -> bool {
    P::orient(a, b, p) == Ordering::Equal
        && P::dot_sign(a, b, p) != Ordering::Less
        && P::dot_sign(b, a, p) != Ordering::Less
}

pub fn locate<P: PlanePoint>(p: &P, tri: &[P; 3]) -> Location {
    for (k, v) in tri.iter().enumerate() {
        if p == v {
            return Location::Vertex(k);
        }
    }
    let ccw = P::orient(&tri[0], &tri[1], &tri[2]);
    debug_assert_ne!(ccw, Ordering::Equal, "degenerate triangle");
    let mut on_edge = None;
    for k in 0..3 {
        let o = P::orient(&tri[k], &tri[(k + 1) % 3], p);
        if o == Ordering::Equal {
            on_edge = Some(k);
        } else if o != ccw {
            return Location::Outside;
        }
    }
    match on_edge {
        Some(k) => Location::Edge(k),
        None => Location::Interior,
    }
}

/// Disjointness of open interiors, by the separating-axis test on the six edges.
pub fn interiors_disjoint<P: PlanePoint>(t: &[P; 3], s: &[P; 3]) -> bool {
    separated_by_edge(t, s) || separated_by_edge(s, t)
}

fn separated_by_edge<P: PlanePoint>(t: &[P; 3], s: &[P; 3]) -> bool {
    let ccw = P::orient(&t[0], &t[1], &t[2]);
    (0..3).any(|k| {
        let (a, b) = (&t[k], &t[(k + 1) % 3]);
        s.iter().all(|p| {
            let o = P::orient(a, b, p);
            o == Ordering::Equal || o == ccw.reverse()
        })
    })
}

/// Closed triangles meet. Assumes disjoint interiors, where contact reduces to
/// a vertex of one lying on the other.
pub fn touching<P: PlanePoint>(t: &[P; 3], s: &[P; 3]) -> bool {
    s.iter().any(|p| locate(p, t).is_inside()) || t.iter().any(|p| locate(p, s).is_inside())
}

/// The triangles share a boundary segment of positive length.
pub fn share_segment<P: PlanePoint>(t: &[P; 3], s: &[P; 3]) -> bool {
    for i in 0..3 {
        let (a, b) = (&t[i], &t[(i + 1) % 3]);
        for j in 0..3 {
            let (c, d) = (&s[j], &s[(j + 1) % 3]);
            if P::orient(a, b, c) != Ordering::Equal || P::orient(a, b, d) != Ordering::Equal {
                continue;
            }
            // Collinear: the overlap has positive length iff two distinct
            // points among the four endpoints lie on both segments.
            let mut shared: Vec<&P> = Vec::with_capacity(4);
            for p in [a, b] {
                if on_segment(p, c, d) {
                    shared.push(p);
                }
            }
            for p in [c, d] {
                if on_segment(p, a, b) && !shared.contains(&p) {
                    shared.push(p);
                }
            }
            if shared.len() >= 2 {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: i64, y: i64) -> GridPoint {
        GridPoint { x, y }
    }

    fn e(x: i64, y: i64) -> ExactScalar {
        ExactScalar::gaussian(x, y)
    }

    #[test]
    fn seed_orientation_is_ccw() {
        assert_eq!(ExactScalar::orient(&e(0, 0), &e(2, 0), &e(2, 1)), Ordering::Greater);
        assert_eq!(GridPoint::orient(&g(0, 0), &g(2, 0), &g(2, 1)), Ordering::Greater);
    }

    #[test]
    fn locate_cases() {
        let t = [g(0, 0), g(4, 0), g(4, 2)];
        assert_eq!(locate(&g(0, 0), &t), Location::Vertex(0));
        assert_eq!(locate(&g(2, 0), &t), Location::Edge(0));
        assert_eq!(locate(&g(3, 1), &t), Location::Interior);
        assert_eq!(locate(&g(2, 1), &t), Location::Edge(2));
        assert_eq!(locate(&g(1, 1), &t), Location::Outside);
    }

    #[test]
    fn disjointness() {
        let t = [g(0, 0), g(2, 0), g(2, 1)];
        let s = [g(0, 0), g(0, 1), g(2, 1)];
        assert!(interiors_disjoint(&t, &s));
        assert!(touching(&t, &s));
        assert!(share_segment(&t, &s));
        let far = [g(10, 0), g(12, 0), g(12, 1)];
        assert!(interiors_disjoint(&t, &far));
        assert!(!touching(&t, &far));
        let overlap = [g(1, 0), g(3, 0), g(3, 1)];
        assert!(!interiors_disjoint(&t, &overlap));
    }

    #[test]
    fn vertex_contact_is_not_a_shared_segment() {
        let t = [g(0, 0), g(2, 0), g(2, 1)];
        let s = [g(2, 1), g(4, 1), g(4, 2)];
        assert!(touching(&t, &s));
        assert!(!share_segment(&t, &s));
    }

    #[test]
    fn exact_floor() {
        let x = ExactScalar::from_parts([0, 0, 1, -1], 1); // √5 - i√5
        assert_eq!(x.cell(1), (2, -3));
        assert_eq!(e(-1, 3).cell(2), (-1, 1));
    }
}
