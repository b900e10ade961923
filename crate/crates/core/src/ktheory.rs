//! Trace pairing `l·μ(U)` on the half-turn symmetric centres and the K₀
//! bookkeeping built from it.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::context::CollarConvention;
use crate::enumerate::{level_context, star_patch, symmetric_stars, SymmetricStar};
use crate::error::{Error, Result};
use crate::frequency::{module_membership, patch_frequency, ratio, FrequencyTable};
use crate::lattice::{verify_kernel_lattice, KernelReport};
use crate::patch::{canonicalize_with_anchor, CanonicalKey, Patch};
use crate::winding::{winding_index, Epsilon, WindingLoop};

/// The 1-corona `U` of a symmetric star, found at its recorded occurrence in
/// `supertile(level)`, with the index of its canonical anchor.
pub fn star_one_corona(star: &SymmetricStar, level: u32) -> Result<(Patch, usize)> {
    let lc = level_context(level)?;
    let ctx = &lc.context;
    let (found, ids) = star_patch(ctx, &star.at)?;
    if canonicalize_with_anchor(&found).0 != star.key {
        return Err(Error::Invalid(format!(
            "symmetric star {} is not at its recorded centre in supertile({level})",
            star.key.hash
        )));
    }
    let corona = ctx.corona(&ids, 1, CollarConvention::Closed)?;
    let tiles = corona.iter().map(|&j| ctx.tile(j).clone()).collect();
    let patch = Patch::new(tiles).with_marker(star.at.clone());
    let (_, _, anchor) = canonicalize_with_anchor(&patch);
    Ok((patch, anchor))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub center_key: String,
    pub corona_key: String,
    pub epsilon: String,
    pub l: i64,
    /// `μ(U)`.
    #[serde(with = "ratio")]
    pub freq: BigRational,
    /// `l·μ(U)`.
    #[serde(with = "ratio")]
    pub value: BigRational,
    pub k_min: Option<u32>,
    pub in_module: bool,
    /// Subdivision level at which `μ(U)` was decided.
    pub level: u32,
    pub consistent: bool,
}

pub fn trace_pairing(
    star: &SymmetricStar,
    level: u32,
    table: &FrequencyTable,
    epsilon: &Epsilon,
    budget: u32,
) -> Result<PairingEntry> {
    let l = winding_index(&WindingLoop::new(epsilon.clone())?)?;
    let (u, anchor) = star_one_corona(star, level)?;
    let corona_key: CanonicalKey = canonicalize_with_anchor(&u).0;
    let f = patch_frequency(&u, anchor, table, budget)?;
    let value = &f.value * BigRational::from(BigInt::from(l));
    let m = module_membership(&value);
    Ok(PairingEntry {
        center_key: star.key.hash.clone(),
        corona_key: corona_key.hash,
        epsilon: epsilon.label(),
        l,
        freq: f.value,
        value,
        k_min: m.k_min,
        in_module: m.in_module,
        level: f.level,
        consistent: f.consistent,
    })
}

/// Pairings for every periodic symmetric star found in `supertile(level)`.
pub fn pairings(level: u32, table: &FrequencyTable, epsilon: &Epsilon, budget: u32) -> Result<Vec<PairingEntry>> {
    let report = symmetric_stars(level)?;
    report
        .stars
        .iter()
        .filter(|s| report.periodic.contains(&s.key.hash))
        .map(|s| trace_pairing(s, level, table, epsilon, budget))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub name: String,
    pub rank: Option<usize>,
    pub trace: Vec<String>,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K0Summary {
    pub kernel: KernelReport,
    pub summands: Vec<Summand>,
    pub pairing: Vec<PairingEntry>,
    pub all_in_module: bool,
}

impl K0Summary {
    pub fn passed(&self) -> bool {
        self.kernel.passed() && self.all_in_module
    }
}

/// `Z ⊕ Z⁶ ⊕ H²`: the `Z` summand (spanned by `q₁`) is traceless, the six
/// others pair to `l·μ(U)` at the symmetric centres, and the cohomological
/// summand is not computed.
pub fn k0_summary(pairing: Vec<PairingEntry>) -> K0Summary {
    let kernel = verify_kernel_lattice();
    let all_in_module = !pairing.is_empty() && pairing.iter().all(|p| p.in_module);
    let summands = vec![
        Summand {
            name: "Z.q1".into(),
            rank: Some(1),
            trace: vec!["0".into()],
            source: "recorded constant: the class of the unit is traceless".into(),
        },
        Summand {
            name: "Z.q2 + ... + Z.q7".into(),
            rank: Some(kernel.rank.saturating_sub(1)),
            trace: pairing.iter().map(|p| crate::frequency::ratio_string(&p.value)).collect(),
            source: "trace_pairing at the half-turn symmetric centres".into(),
        },
        Summand {
            name: "H2_c".into(),
            rank: None,
            trace: Vec::new(),
            source: "out of scope".into(),
        },
    ];
    K0Summary {
        kernel,
        summands,
        pairing,
        all_in_module,
    }
}
