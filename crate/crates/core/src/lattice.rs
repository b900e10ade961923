//! Integer matrices, Smith and Hermite normal forms, and the boundary kernel
//! lattice `{x ∈ Z¹² : x_i + x_{i+6} constant}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: Vec<Vec<BigInt>>,
    pub ncols: usize,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl IntMatrix {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self::from_rows(vec![vec![BigInt::zero(); n]; m], n)
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.rows[i][i] = BigInt::one();
        }
        a
    }

    fn from_rows(rows: Vec<Vec<BigInt>>, ncols: usize) -> Self {
        let m = rows.len();
        Self {
            rows,
            ncols,
            row_labels: (1..=m).map(|i| format!("r{i}")).collect(),
            col_labels: (1..=ncols).map(|j| format!("c{j}")).collect(),
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            ncols,
        )
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Self {
        assert_eq!(rows.len(), self.nrows());
        assert_eq!(cols.len(), self.ncols);
        self.row_labels = rows;
        self.col_labels = cols;
        self
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let rows = (0..self.ncols)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        IntMatrix::from_rows(rows, self.nrows())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows(), "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..other.ncols)
                    .map(|j| {
                        r.iter()
                            .zip(&other.rows)
                            .filter(|(a, _)| !a.is_zero())
                            .fold(BigInt::zero(), |s, (a, o)| s + a * &o[j])
                    })
                    .collect()
            })
            .collect();
        IntMatrix::from_rows(rows, other.ncols)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).fold(BigInt::zero(), |s, (a, b)| s + a * b))
            .collect()
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        let n = self.nrows();
        assert_eq!(n, self.ncols, "determinant of a non-square matrix");
        let mut m = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        sign * &m[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.nrows() == self.ncols && self.det().abs().is_one()
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, x)| i == j || x.is_zero()))
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in &mut self.rows {
            r.swap(a, b);
        }
    }

    /// `row_dst += k · row_src`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        let src_row = self.rows[src].clone();
        for (d, s) in self.rows[dst].iter_mut().zip(&src_row) {
            *d += k * s;
        }
    }

    /// `col_dst += k · col_src`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in &mut self.rows {
            let s = r[src].clone();
            r[dst] += k * s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.rows[i] {
            *x = -x.clone();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols))
            .map(|i| self.d.rows[i][i].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// `d₁ | d₂ | …` over the nonzero diagonal.
    pub fn divisibility_chain(&self) -> bool {
        let d = self.diagonal();
        let nz: Vec<&BigInt> = d.iter().take_while(|x| !x.is_zero()).collect();
        d.iter().skip(nz.len()).all(Zero::is_zero)
            && nz.iter().all(|x| x.is_positive())
            && nz.windows(2).all(|w| (w[1] % w[0]).is_zero())
    }

    /// Columns of `V` past the rank: a Z-basis of the integer kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let r = self.rank();
        (r..self.v.ncols)
            .map(|j| self.v.rows.iter().map(|row| row[j].clone()).collect())
            .collect()
    }
}

/// Smith normal form `U·A·V = D`. The pivot is the entry of least nonzero
/// absolute value in the remaining block, first in row-major order.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.nrows(), a.ncols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d.rows[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.rows[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { u, d, v };
            };
            d.rows.swap(t, pi);
            u.rows.swap(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                let q = d.rows[i][t].div_floor(&d.rows[t][t]);
                if !q.is_zero() {
                    d.add_row(i, t, &-&q);
                    u.add_row(i, t, &-&q);
                }
                clean &= d.rows[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = d.rows[t][j].div_floor(&d.rows[t][t]);
                if !q.is_zero() {
                    d.add_col(j, t, &-&q);
                    v.add_col(j, t, &-&q);
                }
                clean &= d.rows[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let p = d.rows[t][t].clone();
            let offender = (t + 1..m).find(|&i| d.rows[i][t + 1..].iter().any(|x| !(x % &p).is_zero()));
            match offender {
                Some(i) => {
                    d.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.rows[t][t].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { u, d, v }
}

/// Row-style Hermite normal form of the lattice spanned by the rows: echelon
/// with positive pivots, entries above each pivot reduced into `[0, pivot)`,
/// zero rows dropped. Two generator sets span the same lattice iff their
/// forms are equal.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let n = a.ncols;
    let mut h = a.clone();
    let mut r = 0;
    for c in 0..n {
        if r == h.nrows() {
            break;
        }
        loop {
            let best = (r..h.nrows())
                .filter(|&i| !h.rows[i][c].is_zero())
                .min_by(|&i, &j| h.rows[i][c].abs().cmp(&h.rows[j][c].abs()));
            let Some(p) = best else { break };
            h.rows.swap(r, p);
            let mut done = true;
            for i in r + 1..h.nrows() {
                let q = h.rows[i][c].div_floor(&h.rows[r][c]);
                if !q.is_zero() {
                    h.add_row(i, r, &-q);
                }
                done &= h.rows[i][c].is_zero();
            }
            if done {
                break;
            }
        }
        if h.rows[r][c].is_zero() {
            continue;
        }
        if h.rows[r][c].is_negative() {
            h.negate_row(r);
        }
        for i in 0..r {
            let q = h.rows[i][c].div_floor(&h.rows[r][c]);
            if !q.is_zero() {
                h.add_row(i, r, &-q);
            }
        }
        r += 1;
    }
    h.rows.truncate(r);
    h.row_labels = (1..=r).map(|i| format!("h{i}")).collect();
    h
}

/// Reduces `x` against a Hermite form; zero remainder iff `x` lies in the
/// lattice.
pub fn reduce_by_hnf(h: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    let mut x = x.to_vec();
    for row in &h.rows {
        let Some(c) = row.iter().position(|v| !v.is_zero()) else {
            continue;
        };
        let q = x[c].div_floor(&row[c]);
        if !q.is_zero() {
            for (xi, ri) in x.iter_mut().zip(row) {
                *xi -= &q * ri;
            }
        }
    }
    x
}

pub fn in_lattice(h: &IntMatrix, x: &[BigInt]) -> bool {
    reduce_by_hnf(h, x).iter().all(Zero::is_zero)
}

/// Number of boundary coordinates on each side.
pub const HALF: usize = 6;

/// The 5×12 constraint matrix with rows `(e_i + e_{i+6}) − (e_{i+1} + e_{i+7})`.
pub fn constraint_matrix() -> IntMatrix {
    let rows: Vec<Vec<i64>> = (0..HALF - 1)
        .map(|i| {
            let mut r = vec![0i64; 2 * HALF];
            r[i] += 1;
            r[i + HALF] += 1;
            r[i + 1] -= 1;
            r[i + 1 + HALF] -= 1;
            r
        })
        .collect();
    let cols = (1..=HALF)
        .map(|i| format!("n{i}"))
        .chain((1..=HALF).map(|i| format!("n'{i}")))
        .collect();
    IntMatrix::from_i64(&rows).with_labels((1..HALF).map(|i| format!("row{i}")).collect(), cols)
}

/// The generators `q₁ … q₇` of the kernel.
pub fn q_vectors() -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(HALF + 1);
    let mut q1 = vec![0i64; 2 * HALF];
    q1[..HALF].fill(1);
    out.push(q1.clone());
    for k in 0..HALF {
        let mut q = q1.clone();
        q[k] = 0;
        q[HALF + k] = 1;
        out.push(q);
    }
    out
}

/// `x_i + x_{i+6}` takes the same value for every `i`.
pub fn satisfies_criterion(x: &[i64]) -> bool {
    let s = x[0] + x[HALF];
    (1..HALF).all(|i| x[i] + x[i + HALF] == s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub rank: usize,
    pub rank_ok: bool,
    pub q_in_kernel: Vec<bool>,
    pub equality: bool,
    pub divisibility_chain: bool,
    pub transforms_unimodular: bool,
    pub smith_identity: bool,
    pub hnf: Vec<Vec<i64>>,
    pub hnf_of_q: Vec<Vec<i64>>,
    pub witness: Option<String>,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.rank_ok
            && self.q_in_kernel.iter().all(|&b| b)
            && self.equality
            && self.divisibility_chain
            && self.transforms_unimodular
            && self.smith_identity
    }
}

pub fn verify_kernel_lattice() -> KernelReport {
    verify_kernel_lattice_with(&q_vectors())
}

/// Kernel check against arbitrary candidate generators.
pub fn verify_kernel_lattice_with(qs: &[Vec<i64>]) -> KernelReport {
    let c = constraint_matrix();
    let s = smith_normal_form(&c);
    let smith_identity = s.u.mul(&c).mul(&s.v).rows == s.d.rows && s.d.is_diagonal();
    let kernel = IntMatrix::from_rows(s.kernel_basis(), c.ncols);
    let rank = kernel.nrows();
    let q_in_kernel: Vec<bool> = qs
        .iter()
        .map(|q| {
            let x: Vec<BigInt> = q.iter().map(|&v| BigInt::from(v)).collect();
            c.mul_vec(&x).iter().all(Zero::is_zero)
        })
        .collect();
    let h_ker = hermite_normal_form(&kernel);
    let h_q = hermite_normal_form(&IntMatrix::from_i64(qs));
    let equality = h_ker == h_q;
    let to_i64 = |m: &IntMatrix| m.to_i64().expect("small entries");
    let mut witness = None;
    if let Some(i) = q_in_kernel.iter().position(|&b| !b) {
        witness = Some(format!("q{} = {:?} violates C·q = 0", i + 1, qs[i]));
    } else if !equality {
        let basis_row = kernel
            .rows
            .iter()
            .position(|x| !in_lattice(&h_q, x))
            .map(|i| format!("kernel basis vector {:?} is not in the span", kernel.rows[i]));
        witness = Some(basis_row.unwrap_or_else(|| {
            format!("HNF(kernel) = {:?} ≠ HNF(q) = {:?}", to_i64(&h_ker), to_i64(&h_q))
        }));
    }
    KernelReport {
        rank,
        rank_ok: rank == 7,
        q_in_kernel,
        equality,
        divisibility_chain: s.divisibility_chain(),
        transforms_unimodular: s.u.is_unimodular() && s.v.is_unimodular(),
        smith_identity,
        hnf: to_i64(&h_ker),
        hnf_of_q: to_i64(&h_q),
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub samples: usize,
    pub in_kernel: usize,
    /// Samples where `C·x = 0`, the sum criterion and span membership
    /// disagree.
    pub disagreements: Vec<Vec<i64>>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.in_kernel > 0 && self.in_kernel < self.samples
    }
}

/// Compares `C·x = 0`, the sum criterion and membership in the span of the
/// q-vectors on random vectors. Half the samples are drawn from the kernel
/// and half uniformly, so both sides of the equivalence are exercised.
pub fn membership_criterion_check(samples: usize, seed: u64) -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = constraint_matrix();
    let h_q = hermite_normal_form(&IntMatrix::from_i64(&q_vectors()));
    let mut in_kernel = 0;
    let mut disagreements = Vec::new();
    for k in 0..samples {
        let x: Vec<i64> = if k % 2 == 0 {
            let s: i64 = rng.gen_range(-20..=20);
            let mut x = vec![0i64; 2 * HALF];
            for i in 0..HALF {
                x[i] = rng.gen_range(-20..=20);
                x[i + HALF] = s - x[i];
            }
            if k % 4 == 2 {
                let i = rng.gen_range(0..2 * HALF);
                x[i] += if rng.gen_bool(0.5) { 1 } else { -1 };
            }
            x
        } else {
            (0..2 * HALF).map(|_| rng.gen_range(-20..=20)).collect()
        };
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let a = c.mul_vec(&big).iter().all(Zero::is_zero);
        let b = satisfies_criterion(&x);
        let s = in_lattice(&h_q, &big);
        in_kernel += usize::from(a);
        if a != b || a != s {
            disagreements.push(x);
        }
    }
    CriterionReport {
        samples,
        in_kernel,
        disagreements,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn smith_of_identity() {
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.u, IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(s.v, IntMatrix::identity(3));
    }

    #[test]
    fn smith_two_by_two() {
        let a = IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), big(&[2, 4]));
        assert_eq!(s.u.mul(&a).mul(&s.v).rows, s.d.rows);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
    }

    #[test]
    fn smith_needs_divisibility_fix() {
        let a = IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), big(&[1, 6]));
        assert!(s.divisibility_chain());
        assert_eq!(s.u.mul(&a).mul(&s.v).rows, s.d.rows);
    }

    #[test]
    fn hnf_of_permutation_is_identity() {
        let p = IntMatrix::from_i64(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(hermite_normal_form(&p).rows, IntMatrix::identity(3).rows);
    }

    #[test]
    fn hnf_reduces_above_pivot() {
        let a = IntMatrix::from_i64(&[vec![2, 3], vec![0, 2], vec![4, 6]]);
        let h = hermite_normal_form(&a);
        assert_eq!(h.to_i64().unwrap(), vec![vec![2, 1], vec![0, 2]]);
    }

    #[test]
    fn determinant() {
        let a = IntMatrix::from_i64(&[vec![0, 2, 1], vec![3, 1, 0], vec![1, 1, 1]]);
        assert_eq!(a.det(), BigInt::from(-4));
    }

    #[test]
    fn first_two_generators_satisfy_constraints() {
        let q = q_vectors();
        assert_eq!(q[0], vec![1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(q[1], vec![0, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0]);
        assert_eq!(q[6], vec![1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 1]);
        assert!(q.iter().all(|x| satisfies_criterion(x)));
    }

    #[test]
    fn kernel_lattice_matches_generators() {
        let r = verify_kernel_lattice();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.rank, 7);
        assert!(r.witness.is_none());
    }

    #[test]
    fn tampered_generator_reports_witness() {
        let mut qs = q_vectors();
        qs[3][0] = 2;
        let r = verify_kernel_lattice_with(&qs);
        assert!(!r.passed());
        assert!(r.witness.unwrap().starts_with("q4"));
    }

    #[test]
    fn sublattice_is_not_equal() {
        let mut qs = q_vectors();
        for x in &mut qs[1] {
            *x *= 2;
        }
        let r = verify_kernel_lattice_with(&qs);
        assert!(r.q_in_kernel.iter().all(|&b| b));
        assert!(!r.equality);
        assert!(r.witness.unwrap().contains("not in the span"));
    }

    #[test]
    fn criterion_on_random_vectors() {
        let r = membership_criterion_check(1000, 7);
        assert!(r.passed(), "{r:?}");
    }
}
