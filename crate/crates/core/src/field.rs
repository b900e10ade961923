//! Exact arithmetic in the biquadratic field `Q(i, √5)`.
//!
//! An element is stored as four integer numerators over one shared positive
//! denominator, `(n1 + n2·i + n3·√5 + n4·i·√5) / d`, kept in lowest terms so
//! that structural equality is field equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    num: [BigInt; 4],
    den: BigInt,
}

/// Sign of `a + b·√5` for integers `a`, `b`.
pub fn sign_a_plus_b_sqrt5(a: &BigInt, b: &BigInt) -> Ordering {
    let sa = a.sign_ord();
    let sb = b.sign_ord();
    match (sa, sb) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (x, y) if x == y => x,
        (Ordering::Greater, _) => (a * a).cmp(&(b * b * BigInt::from(5))),
        _ => (b * b * BigInt::from(5)).cmp(&(a * a)),
    }
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl ExactScalar {
    fn normalized(num: [BigInt; 4], den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if num.iter().all(Zero::is_zero) {
            return Self::zero();
        }
        let mut g = den.clone();
        for n in &num {
            g = g.gcd(n);
        }
        if den.is_negative() {
            g = -g;
        }
        if g.is_one() {
            return Self { num, den };
        }
        let [a, b, c, d] = num;
        Self {
            num: [&a / &g, &b / &g, &c / &g, &d / &g],
            den: &den / &g,
        }
    }

    pub fn zero() -> Self {
        Self {
            num: [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::gaussian(0, 1)
    }

    pub fn sqrt5() -> Self {
        Self::from_parts([0, 0, 1, 0], 1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::gaussian(n, 0)
    }

    /// `re + im·i` with integer parts.
    pub fn gaussian(re: i64, im: i64) -> Self {
        Self::from_parts([re, im, 0, 0], 1)
    }

    /// `(n1 + n2·i + n3·√5 + n4·i√5) / den`.
    pub fn from_parts(num: [i64; 4], den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::normalized(num.map(BigInt::from), BigInt::from(den))
    }

    pub fn from_big_parts(num: [BigInt; 4], den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_rationals(c: [BigRational; 4]) -> Self {
        let den = c
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let num = c.map(|r| r.numer() * (&den / r.denom()));
        Self::normalized(num, den)
    }

    /// The rational coordinates `(c1, c2, c3, c4)` on the basis `{1, i, √5, i√5}`.
    pub fn components(&self) -> [BigRational; 4] {
        std::array::from_fn(|k| BigRational::new(self.num[k].clone(), self.den.clone()))
    }

    pub fn numerators(&self) -> &[BigInt; 4] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one()
            && self.num[0].is_one()
            && self.num[1..].iter().all(Zero::is_zero)
    }

    /// True when the √5 components vanish, i.e. the value lies in `Q(i)`.
    pub fn is_gaussian_rational(&self) -> bool {
        self.num[2].is_zero() && self.num[3].is_zero()
    }

    /// True for Gaussian integers `a + b·i`, `a, b ∈ Z`.
    pub fn is_gaussian_integer(&self) -> bool {
        self.is_gaussian_rational() && self.den.is_one()
    }

    /// Complex conjugation: negates the `i` and `i√5` components.
    pub fn conj(&self) -> Self {
        let [a, b, c, d] = &self.num;
        Self {
            num: [a.clone(), -b, c.clone(), -d],
            den: self.den.clone(),
        }
    }

    /// The Galois automorphism `√5 ↦ −√5`.
    pub fn sqrt5_conj(&self) -> Self {
        let [a, b, c, d] = &self.num;
        Self {
            num: [a.clone(), b.clone(), -c, -d],
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x · σ(x) lies in Q(i) where σ flips √5; then divide by its norm.
        let s = self.sqrt5_conj();
        let n = self * &s;
        debug_assert!(n.is_gaussian_rational());
        let nc = n.conj();
        let norm = &n * &nc;
        let scale = BigRational::new(norm.den.clone(), norm.num[0].clone());
        let out = &s * &nc;
        Ok(out.scale(&scale))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Multiplies by a rational.
    pub fn scale(&self, r: &BigRational) -> Self {
        let num = self.num.clone().map(|n| n * r.numer());
        Self::normalized(num, &self.den * r.denom())
    }

    /// Squared modulus `x·conj(x)`, which lies in `Q(√5)`.
    pub fn norm_sqr(&self) -> Self {
        self * &self.conj()
    }

    /// Sign of the real part `(n1 + n3√5)/d`.
    pub fn re_sign(&self) -> Ordering {
        sign_a_plus_b_sqrt5(&self.num[0], &self.num[2])
    }

    /// Sign of the imaginary part `(n2 + n4√5)/d`.
    pub fn im_sign(&self) -> Ordering {
        sign_a_plus_b_sqrt5(&self.num[1], &self.num[3])
    }

    /// Floating-point approximation of `(re, im)`, for rendering only.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let s5 = 5f64.sqrt();
        let f = |n: &BigInt| -> f64 {
            BigRational::new(n.clone(), self.den.clone())
                .to_f64()
                .unwrap_or(f64::NAN)
        };
        (
            f(&self.num[0]) + s5 * f(&self.num[2]),
            f(&self.num[1]) + s5 * f(&self.num[3]),
        )
    }

    /// Integer power, negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// `"p/q"` strings for `(c1, c2, c3, c4)`.
    pub fn to_strings(&self) -> [String; 4] {
        self.components().map(|r| format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn from_strings<S: AsRef<str>>(parts: &[S]) -> Result<Self> {
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected 4 components, got {}", parts.len())));
        }
        let mut out: [BigRational; 4] = Default::default();
        for (slot, s) in out.iter_mut().zip(parts) {
            *slot = parse_rational(s.as_ref())?;
        }
        Ok(Self::from_rationals(out))
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(s.to_string()))?;
    let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(s.to_string()))?;
    if q.is_zero() {
        return Err(Error::Parse(s.to_string()));
    }
    Ok(BigRational::new(p, q))
}

fn mul_parts(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    let [a1, a2, a3, a4] = a;
    let [b1, b2, b3, b4] = b;
    let five = |x: BigInt| x * 5u32;
    [
        a1 * b1 - a2 * b2 + five(a3 * b3 - a4 * b4),
        a1 * b2 + a2 * b1 + five(a3 * b4 + a4 * b3),
        a1 * b3 + a3 * b1 - (a2 * b4 + a4 * b2),
        a1 * b4 + a4 * b1 + a2 * b3 + a3 * b2,
    ]
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        if self.den == rhs.den {
            let num = std::array::from_fn(|k| &self.num[k] + &rhs.num[k]);
            return ExactScalar::normalized(num, self.den.clone());
        }
        let num = std::array::from_fn(|k| &self.num[k] * &rhs.den + &rhs.num[k] * &self.den);
        ExactScalar::normalized(num, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        if self.den == rhs.den {
            let num = std::array::from_fn(|k| &self.num[k] - &rhs.num[k]);
            return ExactScalar::normalized(num, self.den.clone());
        }
        let num = std::array::from_fn(|k| &self.num[k] * &rhs.den - &rhs.num[k] * &self.den);
        ExactScalar::normalized(num, &self.den * &rhs.den)
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::normalized(mul_parts(&self.num, &rhs.num), &self.den * &rhs.den)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            num: self.num.clone().map(|n| -n),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

/// Lexicographic order on `(c1, c2, c3, c4)`. This is a representation order
/// used for deterministic tie-breaking, not a field ordering.
impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        for k in 0..4 {
            let l = &self.num[k] * &other.den;
            let r = &other.num[k] * &self.den;
            match l.cmp(&r) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let labels = ["", "i", "√5", "i√5"];
        let mut first = true;
        write!(f, "(")?;
        for (n, l) in self.num.iter().zip(labels) {
            if n.is_zero() {
                continue;
            }
            if !first {
                write!(f, "{}", if n.is_negative() { " - " } else { " + " })?;
            } else if n.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let m = n.abs();
            match (m.is_one(), l.is_empty()) {
                (true, false) => write!(f, "{l}")?,
                _ => write!(f, "{m}{l}")?,
            }
        }
        write!(f, ")")?;
        if !self.den.is_one() {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        ExactScalar::from_strings(&parts).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt5_squared_is_five() {
        let s = ExactScalar::sqrt5();
        assert_eq!(&s * &s, ExactScalar::from_int(5));
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = ExactScalar::i();
        assert_eq!(&i * &i, ExactScalar::from_int(-1));
    }

    #[test]
    fn norm_of_two_plus_i() {
        let z = ExactScalar::gaussian(2, 1);
        assert_eq!(&z * &z.conj(), ExactScalar::from_int(5));
    }

    #[test]
    fn rotation_unit_squared() {
        let u = ExactScalar::gaussian(2, 1)
            .checked_div(&ExactScalar::sqrt5())
            .unwrap();
        assert_eq!(&u * &u, ExactScalar::from_parts([3, 4, 0, 0], 5));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = ExactScalar::from_parts([3, -7, 2, 5], 11);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let x = ExactScalar::one();
        assert!(matches!(
            x.checked_div(&ExactScalar::zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn components_are_unique_representation() {
        let x = ExactScalar::from_parts([2, 4, 6, 8], 4);
        assert_eq!(x.components(), [q(1, 2), q(1, 1), q(3, 2), q(2, 1)]);
        assert_eq!(x, ExactScalar::from_parts([1, 2, 3, 4], 2));
    }

    #[test]
    fn sign_of_quadratic_reals() {
        let b = |n: i64| BigInt::from(n);
        assert_eq!(sign_a_plus_b_sqrt5(&b(3), &b(-1)), Ordering::Greater);
        assert_eq!(sign_a_plus_b_sqrt5(&b(2), &b(-1)), Ordering::Less);
        assert_eq!(sign_a_plus_b_sqrt5(&b(-9), &b(4)), Ordering::Less);
        assert_eq!(sign_a_plus_b_sqrt5(&b(-8), &b(4)), Ordering::Greater);
        assert_eq!(sign_a_plus_b_sqrt5(&b(0), &b(0)), Ordering::Equal);
    }

    #[test]
    fn serde_roundtrip() {
        let x = ExactScalar::from_parts([1, -2, 3, 0], 7);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"["1/7","-2/7","3/7","0/1"]"#);
        let y: ExactScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(ExactScalar::from_strings(&["1/0", "0", "0", "0"]).is_err());
        assert!(ExactScalar::from_strings(&["x", "0", "0", "0"]).is_err());
        assert!(ExactScalar::from_strings(&["0", "0", "0"]).is_err());
    }
}
