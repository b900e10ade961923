//! The verification suites and their machine-readable report.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::CollarConvention;
use crate::enumerate::{enumerate_collared_prototiles, symmetric_stars, vertex_coronas, Catalog};
use crate::error::{Error, Result};
use crate::field::ExactScalar;
use crate::frequency::{
    build_substitution_matrix, chirality_frequencies, counting_oracle, family_frequencies,
    frequency_module_report, is_eigenvector, perron_frequencies, perron_vector, rational_nullspace,
    ratio_string, FrequencyTable, PatchFamily, SubstitutionMatrix,
};
use crate::ktheory::pairings;
use crate::lattice::{membership_criterion_check, q_vectors, verify_kernel_lattice_with};
use crate::motion::RigidMotion;
use crate::par;
use crate::patch::{anchored_key, canonicalize, directly_congruent, symmetry_group, Patch};
use crate::substitution::supertile;
use crate::tile::{Chirality, Tile};
use crate::winding::{winding_report, Epsilon, WindingLoop};

pub const SCHEMA: &str = "pinwheel-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    UndecidedAtBudget,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::UndecidedAtBudget => "undecided-at-budget",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Cover,
    Collared,
    Chirality,
    Perron,
    Module,
    Oracle,
    Kernel,
    Symmetry,
    Pairing,
    Canonical,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Cover,
        Suite::Collared,
        Suite::Chirality,
        Suite::Perron,
        Suite::Module,
        Suite::Oracle,
        Suite::Kernel,
        Suite::Symmetry,
        Suite::Pairing,
        Suite::Canonical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cover => "cover",
            Suite::Collared => "collared",
            Suite::Chirality => "chirality",
            Suite::Perron => "perron",
            Suite::Module => "module",
            Suite::Oracle => "oracle",
            Suite::Kernel => "kernel",
            Suite::Symmetry => "symmetry",
            Suite::Pairing => "pairing",
            Suite::Canonical => "canonical",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub witnesses: Vec<String>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub cover_max_level: u32,
    pub cover_time_limit_s: f64,
    pub collared_level: u32,
    pub module_depth: u32,
    pub module_time_limit_s: f64,
    pub oracle_levels: Vec<u32>,
    pub symmetry_level: u32,
    pub census_depth: u32,
    pub budget: u32,
    pub seed: u64,
    pub criterion_samples: usize,
    pub kernel_time_limit_s: f64,
    pub canonical_motions: usize,
    pub winding_samples: usize,
    pub winding_tolerance: f64,
    pub epsilon: String,
    /// Replaces the kernel generators; used to exercise the failure path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_override: Option<Vec<Vec<i64>>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            cover_max_level: 6,
            cover_time_limit_s: 120.0,
            collared_level: 6,
            module_depth: 2,
            module_time_limit_s: 600.0,
            oracle_levels: vec![5, 6, 7],
            symmetry_level: 5,
            census_depth: 8,
            budget: crate::frequency::DEFAULT_BUDGET,
            seed: 20240601,
            criterion_samples: 1000,
            kernel_time_limit_s: 1.0,
            canonical_motions: 200,
            winding_samples: 10_000,
            winding_tolerance: 1e-6,
            epsilon: "z2".into(),
            q_override: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub version: String,
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn suites(&self) -> Vec<Suite> {
        let mut s: Vec<Suite> = self.checks.iter().map(|c| c.suite).collect();
        s.dedup();
        s
    }
}

/// Data shared between suites, computed on first use.
pub struct Session {
    pub config: VerifyConfig,
    catalog: OnceLock<Result<Catalog>>,
    matrix: OnceLock<Result<SubstitutionMatrix>>,
    table: OnceLock<Result<FrequencyTable>>,
}

fn shared<T: Clone>(cell: &OnceLock<Result<T>>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    match cell.get_or_init(f) {
        Ok(v) => Ok(v.clone()),
        Err(e) => Err(e.clone()),
    }
}

impl Session {
    pub fn new(config: VerifyConfig) -> Self {
        Self {
            config,
            catalog: OnceLock::new(),
            matrix: OnceLock::new(),
            table: OnceLock::new(),
        }
    }

    pub fn catalog(&self) -> Result<Catalog> {
        shared(&self.catalog, || {
            enumerate_collared_prototiles(self.config.collared_level, CollarConvention::Closed)
        })
    }

    pub fn matrix(&self) -> Result<SubstitutionMatrix> {
        shared(&self.matrix, || build_substitution_matrix(&self.catalog()?))
    }

    pub fn table(&self) -> Result<FrequencyTable> {
        shared(&self.table, || perron_frequencies(&self.matrix()?))
    }
}

struct Builder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Builder {
    fn new(suite: Suite) -> Self {
        Self {
            suite,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, status: Status, detail: String, witnesses: Vec<String>, start: Instant) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            status,
            detail,
            witnesses,
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    fn ok(&mut self, name: &str, ok: bool, detail: String, start: Instant) {
        self.push(name, Status::from_bool(ok), detail, Vec::new(), start);
    }

    fn error(&mut self, name: &str, e: &Error, start: Instant) {
        let status = match e {
            Error::UndecidedAtBudget { .. } | Error::ResourceLimit { .. } | Error::NonStabilization { .. } => {
                Status::UndecidedAtBudget
            }
            _ => Status::Fail,
        };
        self.push(name, status, e.to_string(), vec![e.to_string()], start);
    }
}

fn run_suite(session: &Session, suite: Suite) -> Vec<Check> {
    let mut b = Builder::new(suite);
    let cfg = &session.config;
    match suite {
        Suite::Cover => cover(&mut b, cfg),
        Suite::Collared => collared(&mut b, session),
        Suite::Chirality => chirality(&mut b, session),
        Suite::Perron => perron(&mut b, session),
        Suite::Module => module(&mut b, session),
        Suite::Oracle => oracle(&mut b, session),
        Suite::Kernel => kernel(&mut b, cfg),
        Suite::Symmetry => symmetry(&mut b, cfg),
        Suite::Pairing => pairing(&mut b, session),
        Suite::Canonical => canonical(&mut b, session),
    }
    b.checks
}

pub fn run_verification(config: VerifyConfig, suites: &[Suite]) -> VerificationReport {
    let session = Session::new(config);
    let checks = run_suites(&session, suites);
    VerificationReport {
        schema: SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: session.config,
        checks,
    }
}

pub fn run_suites(session: &Session, suites: &[Suite]) -> Vec<Check> {
    let mut ordered: Vec<Suite> = suites.to_vec();
    ordered.sort();
    ordered.dedup();
    ordered.into_iter().flat_map(|s| run_suite(session, s)).collect()
}

fn cover(b: &mut Builder, cfg: &VerifyConfig) {
    let start = Instant::now();
    let mut witnesses = Vec::new();
    let mut detail = Vec::new();
    for n in 0..=cfg.cover_max_level {
        match supertile(n) {
            Ok(s) => {
                let r = s.cover_report();
                detail.push(format!("n={n}: {} tiles", r.tile_count));
                if !r.passed() {
                    witnesses.push(format!("supertile({n}): {r:?}"));
                }
            }
            Err(e) => witnesses.push(format!("supertile({n}): {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= cfg.cover_time_limit_s {
        witnesses.push(format!("took {secs:.1} s, limit {} s", cfg.cover_time_limit_s));
    }
    let status = Status::from_bool(witnesses.is_empty());
    b.push("exact-cover", status, detail.join("; "), witnesses, start);
}

fn collared(b: &mut Builder, session: &Session) {
    let start = Instant::now();
    let cat = match session.catalog() {
        Ok(c) => c,
        Err(e) => return b.error("closed-count", &e, start),
    };
    let minus = cat.classes.iter().filter(|c| c.center_chirality == Chirality::Minus).count();
    let plus = cat.len() - minus;
    let mirror_missing: Vec<String> = par::map(&cat.classes, |c| {
        let m = anchored_key(&c.key.representative().mirrored(), c.key.anchor_position());
        (cat.index_of(&m).is_none()).then(|| c.key.hash.clone())
    })
    .into_iter()
    .flatten()
    .collect();
    let up_to_reflection = if mirror_missing.is_empty() { cat.len() / 2 } else { 0 };
    let ok = minus == 54 && plus == 54 && up_to_reflection == 54;
    b.push(
        "closed-count",
        Status::from_bool(ok),
        format!(
            "stable from level {} to {}; {} classes up to rotation ({minus} MINUS-centred, {plus} PLUS-centred), {up_to_reflection} up to reflection",
            cat.level,
            cat.level + 1,
            cat.len()
        ),
        mirror_missing.into_iter().map(|h| format!("mirror of {h} missing")).collect(),
        start,
    );
    let start = Instant::now();
    match enumerate_collared_prototiles(session.config.collared_level, CollarConvention::Edge) {
        Ok(e) => b.ok(
            "edge-count",
            true,
            format!("{} classes up to rotation, {} up to reflection (reported)", e.len(), e.len() / 2),
            start,
        ),
        Err(e) => b.error("edge-count", &e, start),
    }
}

fn q(p: i64, r: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(r))
}

fn chirality(b: &mut Builder, session: &Session) {
    let start = Instant::now();
    let m = match session.matrix() {
        Ok(m) => m,
        Err(e) => return b.error("collapse", &e, start),
    };
    match m.chirality_collapse() {
        Ok(c) => b.ok("collapse", c == [[2, 3], [3, 2]], format!("{c:?}"), start),
        Err(e) => b.error("collapse", &e, start),
    }
    let start = Instant::now();
    let small = vec![vec![2u64, 3], vec![3, 2]];
    match perron_vector(&small) {
        Ok(v) => {
            let ok = v == vec![q(1, 2), q(1, 2)] && is_eigenvector(&small, &v, 5);
            b.ok("perron-half", ok, format!("({}, {})", ratio_string(&v[0]), ratio_string(&v[1])), start);
        }
        Err(e) => b.error("perron-half", &e, start),
    }
    let start = Instant::now();
    match session.table() {
        Ok(t) => {
            let f = chirality_frequencies(&t);
            let ok = f[0] == q(1, 2) && f[1] == q(1, 2);
            b.ok(
                "collared-marginals",
                ok,
                format!("MINUS {}, PLUS {}", ratio_string(&f[0]), ratio_string(&f[1])),
                start,
            );
        }
        Err(e) => b.error("collared-marginals", &e, start),
    }
}

fn perron(b: &mut Builder, session: &Session) {
    let start = Instant::now();
    let m = match session.matrix() {
        Ok(m) => m,
        Err(e) => return b.error("matrix", &e, start),
    };
    let bad: Vec<String> = m
        .column_sums()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s != 5)
        .map(|(c, s)| format!("column {} sums to {s}", m.keys[c].hash))
        .collect();
    b.push("column-sums", Status::from_bool(bad.is_empty()), format!("{} columns", m.dim()), bad, start);
    let start = Instant::now();
    let e = m.primitivity_exponent();
    b.ok("primitive", e.is_some(), format!("M^{} > 0", e.map_or("?".into(), |k| k.to_string())), start);
    let start = Instant::now();
    let a: Vec<Vec<BigInt>> = m
        .as_bigint()
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row[i] -= 5;
            row
        })
        .collect();
    let dim = rational_nullspace(&a).len();
    b.ok("kernel-dimension", dim == 1, format!("dim ker(M - 5I) = {dim}"), start);
    let start = Instant::now();
    match session.table() {
        Ok(t) => {
            let positive = t.values.iter().all(|v| *v > BigRational::zero());
            let sum = t.sum();
            let eigen = is_eigenvector(&m.entries, &t.values, 5);
            b.ok(
                "perron-vector",
                positive && sum.is_one() && eigen,
                format!("positive {positive}, sum {}, M·v = 5v {eigen}", ratio_string(&sum)),
                start,
            );
        }
        Err(e) => b.error("perron-vector", &e, start),
    }
}

fn module(b: &mut Builder, session: &Session) {
    let start = Instant::now();
    let cfg = &session.config;
    let table = match session.table() {
        Ok(t) => t,
        Err(e) => return b.error("membership", &e, start),
    };
    match frequency_module_report(&table, cfg.module_depth, cfg.budget) {
        Ok(r) => {
            let mut witnesses: Vec<String> = r
                .entries
                .iter()
                .filter(|e| !e.in_module || e.k_min.is_none_or(|k| k > 8))
                .map(|e| format!("{} {} = {}", e.family, e.key_hash, ratio_string(&e.freq)))
                .collect();
            let collared_bad = table
                .keys
                .iter()
                .zip(&table.values)
                .filter(|(_, v)| {
                    let m = crate::frequency::module_membership(v);
                    !m.in_module || m.k_min.is_none_or(|k| k > 8)
                })
                .map(|(k, v)| format!("collared {} = {}", k.hash, ratio_string(v)));
            witnesses.extend(collared_bad);
            for (fam, level, consistent) in &r.levels {
                if !consistent {
                    witnesses.push(format!("{fam}: level {level} and {} disagree", level + 1));
                }
            }
            let secs = start.elapsed().as_secs_f64();
            if secs >= cfg.module_time_limit_s {
                witnesses.push(format!("took {secs:.1} s, limit {} s", cfg.module_time_limit_s));
            }
            b.push(
                "membership",
                Status::from_bool(witnesses.is_empty()),
                format!(
                    "{} collared + {} patch frequencies, module generated by {} (k_min {:?}), max k_min {:?}",
                    table.values.len(),
                    r.entries.len(),
                    ratio_string(&r.generator),
                    r.generator_k_min,
                    r.max_k_min
                ),
                witnesses,
                start,
            );
        }
        Err(e) => b.error("membership", &e, start),
    }
}

fn oracle(b: &mut Builder, session: &Session) {
    let start = Instant::now();
    let cfg = &session.config;
    let table = match session.table() {
        Ok(t) => t,
        Err(e) => return b.error("counting", &e, start),
    };
    let mut cases: Vec<(String, Patch, usize, BigRational)> = vec![(
        "single MINUS tile".into(),
        Patch::new(vec![Tile::reference(Chirality::Minus)]),
        0,
        q(1, 2),
    )];
    if let Some((k, v)) = table.keys.iter().zip(&table.values).max_by(|x, y| x.1.cmp(y.1)) {
        cases.push((format!("collared {}", k.hash), k.representative(), k.anchor_position(), v.clone()));
    }
    match family_frequencies(&table, PatchFamily::StarCorona(0), cfg.budget) {
        Ok(ff) => {
            if let Some((k, v)) = ff.values.iter().max_by(|x, y| x.1.cmp(y.1)) {
                cases.push((format!("vertex star {}", k.hash), k.representative(), k.anchor_position(), v.clone()));
            }
        }
        Err(e) => return b.error("counting", &e, start),
    }
    for (label, p, anchor, f) in cases {
        let start = Instant::now();
        match counting_oracle(&label, &p, anchor, &f, &cfg.oracle_levels) {
            Ok(r) => {
                let rows: Vec<String> = r
                    .rows
                    .iter()
                    .map(|x| format!("n={} occ={} err={:.3e} bound={:.3e}", x.level, x.occurrences, x.error, x.bound))
                    .collect();
                let witnesses = if r.passed() { Vec::new() } else { rows.clone() };
                b.push(
                    &format!("counting {label}"),
                    Status::from_bool(r.passed()),
                    format!("freq {}: {}", ratio_string(&f), rows.join(", ")),
                    witnesses,
                    start,
                );
            }
            Err(e) => b.error(&format!("counting {label}"), &e, start),
        }
    }
}

fn kernel(b: &mut Builder, cfg: &VerifyConfig) {
    let start = Instant::now();
    let qs = cfg.q_override.clone().unwrap_or_else(q_vectors);
    let r = verify_kernel_lattice_with(&qs);
    let c = membership_criterion_check(cfg.criterion_samples, cfg.seed);
    let secs = start.elapsed().as_secs_f64();
    let mut witnesses: Vec<String> = r.witness.iter().cloned().collect();
    witnesses.extend(c.disagreements.iter().map(|x| format!("criterion disagrees on {x:?}")));
    if secs >= cfg.kernel_time_limit_s {
        witnesses.push(format!("took {secs:.3} s, limit {} s", cfg.kernel_time_limit_s));
    }
    let ok = r.passed() && c.passed() && secs < cfg.kernel_time_limit_s;
    if !ok && witnesses.is_empty() {
        witnesses.push(format!("{r:?}"));
    }
    b.push(
        "kernel-lattice",
        Status::from_bool(ok),
        format!(
            "rank {}, HNF equality {}, {} of {} random vectors in the kernel, all three tests agree {}",
            r.rank,
            r.equality,
            c.in_kernel,
            c.samples,
            c.disagreements.is_empty()
        ),
        witnesses,
        start,
    );
}

fn symmetry(b: &mut Builder, cfg: &VerifyConfig) {
    let start = Instant::now();
    match vertex_coronas(cfg.symmetry_level) {
        Ok(cat) => {
            let sym: Vec<_> = cat.symmetric().collect();
            let bad: Vec<String> = sym
                .iter()
                .filter(|c| !(c.symmetry_order == 2 && c.symmetry_angle_over_pi.as_deref() == Some("1")))
                .map(|c| format!("{} order {} angle {:?}", c.key.hash, c.symmetry_order, c.symmetry_angle_over_pi))
                .collect();
            b.push(
                "vertex-coronas",
                Status::from_bool(bad.is_empty() && !sym.is_empty()),
                format!("{} vertex stars, {} symmetric, all half turns {}", cat.len(), sym.len(), bad.is_empty()),
                bad,
                start,
            );
        }
        Err(e) => b.error("vertex-coronas", &e, start),
    }
    let start = Instant::now();
    let here = symmetric_stars(cfg.symmetry_level);
    let next = symmetric_stars(cfg.symmetry_level + 1);
    match (here, next) {
        (Ok(r), Ok(r2)) => {
            let mut bad: Vec<String> = r
                .stars
                .iter()
                .filter_map(|s| {
                    let g = symmetry_group(&s.key.representative());
                    (!g.is_half_turn()).then(|| format!("{} order {} angle {:?}", s.key.hash, g.order, g.angle_over_pi))
                })
                .collect();
            let census = r.census(cfg.census_depth);
            let non_increasing = census.windows(2).all(|w| w[1] <= w[0]);
            let stable = census.last() == Some(&6) && census.iter().rev().take(2).all(|&c| c == 6);
            if r2.periodic != r.periodic {
                bad.push(format!("periodic stars differ between levels {} and {}", r.level, r2.level));
            }
            if !non_increasing || !stable {
                bad.push(format!("census {census:?}"));
            }
            b.push(
                "symmetric-census",
                Status::from_bool(bad.is_empty()),
                format!(
                    "{} symmetric stars, census over N = 0..={}: {census:?}, {} periodic (same at level {})",
                    r.stars.len(),
                    cfg.census_depth,
                    r.tiling_count(),
                    r2.level
                ),
                bad,
                start,
            );
        }
        (Err(e), _) | (_, Err(e)) => b.error("symmetric-census", &e, start),
    }
}

fn pairing(b: &mut Builder, session: &Session) {
    let start = Instant::now();
    let cfg = &session.config;
    let eps = match Epsilon::parse(&cfg.epsilon) {
        Ok(e) => e,
        Err(e) => return b.error("winding", &e, start),
    };
    match WindingLoop::new(eps.clone()).and_then(|l| winding_report(&l, cfg.winding_samples)) {
        Ok(w) => {
            let ok = w.symbolic == Some(1) && w.agrees() && w.residual < cfg.winding_tolerance;
            b.ok(
                "winding",
                ok,
                format!(
                    "{}: symbolic {:?}, sampled {}, integral {:.12} (residual {:.2e})",
                    w.epsilon, w.symbolic, w.sampled, w.numerical, w.residual
                ),
                start,
            );
        }
        Err(e) => b.error("winding", &e, start),
    }
    let start = Instant::now();
    let table = match session.table() {
        Ok(t) => t,
        Err(e) => return b.error("trace-pairing", &e, start),
    };
    match pairings(cfg.symmetry_level, &table, &eps, cfg.budget) {
        Ok(ps) => {
            let bad: Vec<String> = ps
                .iter()
                .filter(|p| !(p.in_module && p.consistent && p.value == &p.freq * BigRational::from(BigInt::from(p.l))))
                .map(|p| format!("{}: l={} value {}", p.center_key, p.l, ratio_string(&p.value)))
                .collect();
            let values: Vec<String> = ps
                .iter()
                .map(|p| format!("{}={}", p.center_key, ratio_string(&p.value)))
                .collect();
            b.push(
                "trace-pairing",
                Status::from_bool(bad.is_empty() && ps.len() == 6),
                format!("{} centres: {}", ps.len(), values.join(", ")),
                bad,
                start,
            );
        }
        Err(e) => b.error("trace-pairing", &e, start),
    }
}

/// A random motion with rotation `α^a·i^b` and translation in `Z[i]/10`.
pub fn random_motion(rng: &mut impl Rng) -> RigidMotion {
    let a = rng.gen_range(-3..=3);
    let b = rng.gen_range(0..4u8);
    let t = ExactScalar::from_parts([rng.gen_range(-50..=50), rng.gen_range(-50..=50), 0, 0], 10);
    RigidMotion::new(a, b, t)
}

fn canonical(b: &mut Builder, session: &Session) {
    let start = Instant::now();
    let cfg = &session.config;
    let cat = match session.catalog() {
        Ok(c) => c,
        Err(e) => return b.error("motion-invariance", &e, start),
    };
    let seeds: Vec<(usize, u64)> = cat
        .classes
        .iter()
        .enumerate()
        .map(|(i, _)| (i, cfg.seed.wrapping_add(i as u64)))
        .collect();
    let failures: Vec<String> = par::map(&seeds, |&(i, seed)| {
        let key = &cat.classes[i].key;
        let rep = key.representative();
        let a = key.anchor_position();
        let canonical = canonicalize(&rep).0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..cfg.canonical_motions).find_map(|_| {
            let g = random_motion(&mut rng);
            let moved = rep.moved(&g);
            (anchored_key(&moved, a) != *key || canonicalize(&moved).0 != canonical)
                .then(|| format!("{} under {g:?}", key.hash))
        })
    })
    .into_iter()
    .flatten()
    .collect();
    b.push(
        "motion-invariance",
        Status::from_bool(failures.is_empty()),
        format!(
            "{} classes × {} motions, centre-anchored and canonical keys",
            cat.len(),
            cfg.canonical_motions
        ),
        failures,
        start,
    );
    let start = Instant::now();
    let checked = par::map(&cat.classes, |c| {
        let rep = c.key.representative();
        let mirrored = rep.mirrored();
        let chiral = !directly_congruent(&rep, &mirrored);
        let distinct = canonicalize(&mirrored).0 != canonicalize(&rep).0
            && anchored_key(&mirrored, c.key.anchor_position()) != c.key;
        (chiral, chiral != distinct)
    });
    let chiral = checked.iter().filter(|x| x.0).count();
    let same: Vec<String> = cat
        .classes
        .iter()
        .zip(&checked)
        .filter(|(_, x)| x.1)
        .map(|(c, x)| format!("{} chiral {} but keys say otherwise", c.key.hash, x.0))
        .collect();
    b.push(
        "mirror-distinct",
        Status::from_bool(same.is_empty()),
        format!(
            "{chiral} chiral classes get distinct mirror keys; {} achiral classes match their mirror",
            cat.len() - chiral
        ),
        same,
        start,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn kernel_suite_alone() {
        let r = run_verification(VerifyConfig::default(), &[Suite::Kernel]);
        assert_eq!(r.suites(), vec![Suite::Kernel]);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.schema, SCHEMA);
    }

    #[test]
    fn tampered_generator_fails_with_witness() {
        let mut cfg = VerifyConfig::default();
        let mut qs = q_vectors();
        qs[2] = vec![2, 0, 1, 1, 1, 1, 0, 1, 0, 0, 0, 0];
        cfg.q_override = Some(qs);
        let r = run_verification(cfg, &[Suite::Kernel]);
        assert!(!r.passed());
        assert!(!r.checks[0].witnesses.is_empty());
    }

    #[test]
    fn status_serialises_kebab_case() {
        let s = serde_json::to_string(&Status::UndecidedAtBudget).unwrap();
        assert_eq!(s, "\"undecided-at-budget\"");
    }
}
