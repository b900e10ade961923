//! The boundary map `ε`, the glued loop `f = (ε, −1, −ε, 1)` over four
//! quadrants, and its winding number around 0.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `ε` restricted to the quarter circle, as a function of `θ ∈ [0, π/2]`.
#[derive(Clone)]
pub enum Epsilon {
    /// `ε(z) = z^m`; needs `m ≡ 2 (mod 4)`.
    Power(i64),
    /// A smooth map given by value and `θ`-derivative.
    Sampled {
        name: String,
        value: ComplexFn,
        derivative: ComplexFn,
    },
}

impl fmt::Debug for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Power(m) => write!(f, "z^{m}"),
            Epsilon::Sampled { name, .. } => write!(f, "{name}"),
        }
    }
}

impl Epsilon {
    pub fn z2() -> Self {
        Epsilon::Power(2)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let m = s
            .strip_prefix('z')
            .map(|r| r.trim_start_matches('^'))
            .and_then(|r| r.parse::<i64>().ok())
            .ok_or_else(|| Error::Parse(format!("epsilon {s:?}; expected z<m>, e.g. z2")))?;
        Ok(Epsilon::Power(m))
    }

    pub fn label(&self) -> String {
        match self {
            Epsilon::Power(m) => format!("z{m}"),
            Epsilon::Sampled { name, .. } => name.clone(),
        }
    }

    pub fn value(&self, theta: f64) -> Complex64 {
        match self {
            Epsilon::Power(m) => Complex64::from_polar(1.0, *m as f64 * theta),
            Epsilon::Sampled { value, .. } => value(theta),
        }
    }

    pub fn derivative(&self, theta: f64) -> Complex64 {
        match self {
            Epsilon::Power(m) => Complex64::i() * *m as f64 * Complex64::from_polar(1.0, *m as f64 * theta),
            Epsilon::Sampled { derivative, .. } => derivative(theta),
        }
    }

    /// `ε(1) = 1`, `ε(i) = −1` and `ε(−z) = ε(z)`, exactly for powers and to
    /// `1e-9` otherwise.
    pub fn check_boundary(&self) -> Result<()> {
        match self {
            Epsilon::Power(m) if m.rem_euclid(4) == 2 => Ok(()),
            Epsilon::Power(m) => Err(Error::Invalid(format!(
                "z^{m} does not send i to -1 with ε(-z) = ε(z)"
            ))),
            Epsilon::Sampled { name, value, .. } => {
                let tol = 1e-9;
                let ok = (value(0.0) - 1.0).norm() < tol
                    && (value(PI / 2.0) + 1.0).norm() < tol
                    && (0..16).all(|k| {
                        let t = k as f64 * PI / 16.0;
                        (value(t) - value(t + PI)).norm() < tol && (value(t).norm() - 1.0).abs() < tol
                    });
                if ok {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("{name} violates the boundary conditions")))
                }
            }
        }
    }
}

/// A stretch of loop whose argument moves from `start·π` by `delta·π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgPiece {
    #[serde(with = "rational64")]
    pub start: Rational64,
    #[serde(with = "rational64")]
    pub delta: Rational64,
}

impl ArgPiece {
    pub fn end(&self) -> Rational64 {
        self.start + self.delta
    }
}

fn same_point(a: Rational64, b: Rational64) -> bool {
    let d = a - b;
    d.is_integer() && d.to_integer().is_even()
}

/// A closed loop on the unit circle with exact argument bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicLoop {
    pub pieces: Vec<ArgPiece>,
}

impl SymbolicLoop {
    pub fn constant(arg: Rational64) -> Self {
        Self {
            pieces: vec![ArgPiece {
                start: arg,
                delta: Rational64::zero(),
            }],
        }
    }

    /// The glued loop for `ε(z) = z^m`.
    pub fn for_power(m: i64) -> Result<Self> {
        Epsilon::Power(m).check_boundary()?;
        let half = Rational64::new(m, 2);
        let one = Rational64::from_integer(1);
        let zero = Rational64::zero();
        Ok(Self {
            pieces: vec![
                ArgPiece { start: zero, delta: half },
                ArgPiece { start: one, delta: zero },
                ArgPiece { start: one, delta: half },
                ArgPiece { start: zero, delta: zero },
            ],
        })
    }

    /// Index of the first joint whose endpoints differ.
    pub fn discontinuity(&self) -> Option<usize> {
        let n = self.pieces.len();
        (0..n).find(|&k| !same_point(self.pieces[k].end(), self.pieces[(k + 1) % n].start))
    }

    pub fn index(&self) -> Result<i64> {
        if let Some(k) = self.discontinuity() {
            return Err(Error::Discontinuous(k));
        }
        let total: Rational64 = self.pieces.iter().map(|p| p.delta).sum();
        let turns = total / 2;
        if !turns.is_integer() {
            return Err(Error::Invalid(format!("total argument {total}π is not a multiple of 2π")));
        }
        Ok(turns.to_integer())
    }

    pub fn reversed(&self) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .rev()
                .map(|p| ArgPiece {
                    start: p.end(),
                    delta: -p.delta,
                })
                .collect(),
        }
    }

    /// Both loops traversed in turn; they must share their base point.
    pub fn concat(&self, other: &SymbolicLoop) -> Result<Self> {
        let a = self.pieces.first().map(|p| p.start);
        let b = other.pieces.first().map(|p| p.start);
        match (a, b) {
            (Some(a), Some(b)) if !same_point(a, b) => return Err(Error::Discontinuous(self.pieces.len())),
            _ => {}
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().copied());
        Ok(Self { pieces })
    }
}

/// The glued loop of an `ε`, parametrised by `t ∈ [0, 4)`, one unit per
/// quadrant.
#[derive(Clone, Debug)]
pub struct WindingLoop {
    pub epsilon: Epsilon,
    /// Traversal direction; `true` runs `t` from 4 down to 0.
    pub reversed: bool,
}

impl WindingLoop {
    pub fn new(epsilon: Epsilon) -> Result<Self> {
        epsilon.check_boundary()?;
        Ok(Self {
            epsilon,
            reversed: false,
        })
    }

    pub fn reverse(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    fn param(&self, t: f64) -> f64 {
        if self.reversed {
            4.0 - t
        } else {
            t
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        let t = self.param(t).rem_euclid(4.0);
        let q = (t.floor() as usize).min(3);
        let theta = (t - q as f64) * PI / 2.0;
        match q {
            0 => self.epsilon.value(theta),
            1 => Complex64::new(-1.0, 0.0),
            2 => -self.epsilon.value(theta),
            _ => Complex64::new(1.0, 0.0),
        }
    }

    /// `df/dt` inside quadrant `q`.
    fn derivative_in(&self, q: usize, s: f64) -> Complex64 {
        let theta = s * PI / 2.0;
        let sign = if self.reversed { -1.0 } else { 1.0 };
        let d = self.epsilon.derivative(theta) * (PI / 2.0) * sign;
        match q {
            0 => d,
            2 => -d,
            _ => Complex64::zero(),
        }
    }

    pub fn symbolic(&self) -> Option<SymbolicLoop> {
        match self.epsilon {
            Epsilon::Power(m) => {
                let l = SymbolicLoop::for_power(m).ok()?;
                Some(if self.reversed { l.reversed() } else { l })
            }
            Epsilon::Sampled { .. } => None,
        }
    }
}

/// Winding number: exact for symbolic `ε`, otherwise by sampled crossing
/// counting with 10⁴ samples.
pub fn winding_index(lp: &WindingLoop) -> Result<i64> {
    match lp.symbolic() {
        Some(s) => s.index(),
        None => sampled_winding(lp, 10_000),
    }
}

/// Signed crossings of the negative real axis over `samples` evenly spaced
/// points. Fails if the loop leaves the unit circle, jumps between samples,
/// or turns by `π/2` or more in one step.
pub fn sampled_winding(lp: &WindingLoop, samples: usize) -> Result<i64> {
    if samples < 8 {
        return Err(Error::Configuration("at least 8 samples are needed".into()));
    }
    let h = 4.0 / samples as f64;
    let pts: Vec<Complex64> = (0..samples).map(|k| lp.value(k as f64 * h)).collect();
    let mut crossings = 0i64;
    let mut total = 0.0;
    for k in 0..samples {
        let a = pts[k];
        let b = pts[(k + 1) % samples];
        if (a.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Discontinuous(k));
        }
        let step = (b / a).arg();
        if step.abs() >= PI / 2.0 {
            return Err(Error::CoarseSampling { index: k, step });
        }
        total += step;
        if a.re < 0.0 || b.re < 0.0 {
            if a.im >= 0.0 && b.im < 0.0 {
                crossings += 1;
            } else if a.im < 0.0 && b.im >= 0.0 {
                crossings -= 1;
            }
        }
    }
    let by_arg = (total / (2.0 * PI)).round() as i64;
    if by_arg != crossings {
        return Err(Error::Invalid(format!(
            "crossing count {crossings} disagrees with argument sum {by_arg}"
        )));
    }
    Ok(crossings)
}

/// `(1/2πi) ∮ f̄ df` by composite Simpson per quadrant with the analytic
/// derivative, using `samples` points in total.
pub fn numerical_index(lp: &WindingLoop, samples: usize) -> f64 {
    let per = (samples / 4).max(2) & !1;
    let h = 1.0 / per as f64;
    let mut total = Complex64::zero();
    for q in 0..4 {
        let g = |s: f64| {
            let (uq, us) = if lp.reversed { (3 - q, 1.0 - s) } else { (q, s) };
            lp.value(q as f64 + s).conj() * lp.derivative_in(uq, us)
        };
        let mut acc = g(0.0) + g(1.0);
        for k in 1..per {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += g(k as f64 * h) * w;
        }
        total += acc * (h / 3.0);
    }
    (total / Complex64::new(0.0, 2.0 * PI)).re
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub epsilon: String,
    pub symbolic: Option<i64>,
    pub sampled: i64,
    pub numerical: f64,
    pub residual: f64,
}

impl WindingReport {
    pub fn index(&self) -> i64 {
        self.symbolic.unwrap_or(self.sampled)
    }

    pub fn agrees(&self) -> bool {
        self.symbolic.is_none_or(|l| l == self.sampled) && self.numerical.round() as i64 == self.sampled
    }
}

pub fn winding_report(lp: &WindingLoop, samples: usize) -> Result<WindingReport> {
    let symbolic = lp.symbolic().map(|s| s.index()).transpose()?;
    let sampled = sampled_winding(lp, samples)?;
    let numerical = numerical_index(lp, samples);
    Ok(WindingReport {
        epsilon: lp.epsilon.label(),
        symbolic,
        sampled,
        residual: (numerical - numerical.round()).abs(),
        numerical,
    })
}

mod rational64 {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(d)?;
        let (p, q) = s.split_once('/').unwrap_or((&s, "1"));
        let p: i64 = p.parse().map_err(serde::de::Error::custom)?;
        let q: i64 = q.parse().map_err(serde::de::Error::custom)?;
        if q == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational64::new(p, q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_winds_once() {
        let lp = WindingLoop::new(Epsilon::z2()).unwrap();
        assert_eq!(winding_index(&lp).unwrap(), 1);
        let r = winding_report(&lp, 10_000).unwrap();
        assert!(r.agrees() && r.residual < 1e-6, "{r:?}");
    }

    #[test]
    fn reversed_negates() {
        let lp = WindingLoop::new(Epsilon::z2()).unwrap().reverse();
        assert_eq!(winding_index(&lp).unwrap(), -1);
        let r = winding_report(&lp, 10_000).unwrap();
        assert_eq!(r.sampled, -1);
        assert!((r.numerical + 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_loop_is_zero() {
        assert_eq!(SymbolicLoop::constant(Rational64::zero()).index().unwrap(), 0);
    }

    #[test]
    fn higher_powers() {
        for m in [-6i64, -2, 6, 10] {
            let lp = WindingLoop::new(Epsilon::Power(m)).unwrap();
            let r = winding_report(&lp, 10_000).unwrap();
            assert_eq!(r.symbolic, Some(m / 2));
            assert!(r.agrees(), "{r:?}");
        }
    }

    #[test]
    fn bad_powers_rejected() {
        assert!(WindingLoop::new(Epsilon::Power(4)).is_err());
        assert!(WindingLoop::new(Epsilon::Power(3)).is_err());
    }

    #[test]
    fn sampled_epsilon_matches_power() {
        let eps = Epsilon::Sampled {
            name: "z2-sampled".into(),
            value: Arc::new(|t| Complex64::from_polar(1.0, 2.0 * t)),
            derivative: Arc::new(|t| Complex64::i() * 2.0 * Complex64::from_polar(1.0, 2.0 * t)),
        };
        let lp = WindingLoop::new(eps).unwrap();
        assert_eq!(winding_index(&lp).unwrap(), 1);
    }

    #[test]
    fn coarse_sampling_detected() {
        let lp = WindingLoop::new(Epsilon::Power(22)).unwrap();
        assert!(matches!(sampled_winding(&lp, 40), Err(Error::CoarseSampling { .. })));
    }

    #[test]
    fn broken_joint_detected() {
        let mut l = SymbolicLoop::for_power(2).unwrap();
        l.pieces[1].start = Rational64::new(1, 2);
        assert!(matches!(l.index(), Err(Error::Discontinuous(0))));
    }

    #[test]
    fn parse_epsilon() {
        assert_eq!(Epsilon::parse("z2").unwrap().label(), "z2");
        assert_eq!(Epsilon::parse("z^6").unwrap().label(), "z6");
        assert!(Epsilon::parse("w2").is_err());
    }
}
