//! Derived values checked against oracles computed independently of the
//! code under test.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use pinwheel_core::context::CollarConvention;
use pinwheel_core::enumerate::{collared_catalog, level_context, symmetric_stars};
use pinwheel_core::frequency::{
    boundary_bound, build_substitution_matrix, count_occurrences, family_frequencies,
    perron_frequencies, FrequencyTable, PatchFamily,
};
use pinwheel_core::ktheory::{star_one_corona, trace_pairing};
use pinwheel_core::lattice::{smith_normal_form, IntMatrix};
use pinwheel_core::patch::{anchored_key, Patch};
use pinwheel_core::substitution::{region_of_level, supertile};
use pinwheel_core::tile::{Chirality, Tile};
use pinwheel_core::winding::{numerical_index, Epsilon, WindingLoop};

fn table() -> FrequencyTable {
    let cat = collared_catalog(6, CollarConvention::Closed).unwrap();
    perron_frequencies(&build_substitution_matrix(&cat).unwrap()).unwrap()
}

#[test]
fn chirality_counts_match_closed_form() {
    // [[2,3],[3,2]] has eigenvalues 5 and -1, so from (1, 0) the MINUS count
    // is (5^n + (-1)^n) / 2.
    for n in 0..=6u32 {
        let s = supertile(n).unwrap();
        let total = 5i64.pow(n);
        let minus = (total + if n % 2 == 0 { 1 } else { -1 }) / 2;
        assert_eq!(s.chirality_counts(), [minus as u64, (total - minus) as u64]);
    }
}

#[test]
fn region_area_by_shoelace() {
    for n in 0..=6u32 {
        let v = region_of_level(n).map(|p| p.to_f64_pair());
        let twice = (v[1].0 - v[0].0) * (v[2].1 - v[0].1) - (v[2].0 - v[0].0) * (v[1].1 - v[0].1);
        assert!((twice.abs() / 2.0 - 5f64.powi(n as i32)).abs() < 1e-6);
    }
}

#[test]
fn tile_areas_sum_by_shoelace() {
    let s = supertile(4).unwrap();
    let total: f64 = s
        .tiles
        .iter()
        .map(|t| {
            let v = t.vertices().map(|p| p.to_f64_pair());
            ((v[1].0 - v[0].0) * (v[2].1 - v[0].1) - (v[2].0 - v[0].0) * (v[1].1 - v[0].1)).abs() / 2.0
        })
        .sum();
    assert!((total - 625.0).abs() < 1e-6);
}

#[test]
fn smith_by_hand() {
    // d1 = gcd of all entries = 2 and d1·d2 = |det| = |16 - 24| = 8.
    let s = smith_normal_form(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]));
    assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
}

#[test]
fn perron_vector_matches_power_iteration() {
    let cat = collared_catalog(6, CollarConvention::Closed).unwrap();
    let m = build_substitution_matrix(&cat).unwrap();
    let t = perron_frequencies(&m).unwrap();
    let n = m.dim();
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..400 {
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| m.entries[i][j] as f64 * v[j]).sum::<f64>())
            .collect();
        let s: f64 = w.iter().sum();
        v = w.into_iter().map(|x| x / s).collect();
    }
    for (exact, approx) in t.values.iter().zip(&v) {
        assert!((exact.to_f64().unwrap() - approx).abs() < 1e-12);
    }
}

#[test]
fn collared_frequencies_have_denominator_dividing_33000() {
    let t = table();
    let d = BigInt::from(264 * 125);
    for v in &t.values {
        assert!((v * BigRational::from(d.clone())).is_integer(), "{v}");
    }
    let minus: BigRational = t
        .keys
        .iter()
        .zip(&t.values)
        .filter(|(k, _)| k.anchor == Chirality::Minus)
        .map(|(_, v)| v.clone())
        .fold(BigRational::zero(), |a, b| a + b);
    assert_eq!(minus, BigRational::new(1.into(), 2.into()));
}

#[test]
fn single_tile_counting_converges() {
    let p = Patch::new(vec![Tile::reference(Chirality::Minus)]);
    let half = 0.5;
    let mut prev = f64::INFINITY;
    for n in 4..=7u32 {
        let ctx = &level_context(n).unwrap().context;
        let occ = count_occurrences(ctx, &p, 0) as f64;
        let err = (occ / 5f64.powi(n as i32) - half).abs();
        // Oracle: (5^n ± 1)/2 MINUS tiles, so the error is exactly 1/(2·5^n).
        assert!((err - 0.5 / 5f64.powi(n as i32)).abs() < 1e-15);
        assert!(err < prev);
        prev = err;
    }
}

#[test]
fn collared_counts_in_supertile_match_frequencies() {
    let t = table();
    let ctx = &level_context(7).unwrap().context;
    let mut counts = std::collections::HashMap::new();
    for i in 0..ctx.len() {
        if let Ok(ids) = ctx.corona(&[i], 1, CollarConvention::Closed) {
            let mut tiles = vec![ctx.tile(i).clone()];
            tiles.extend(ids.into_iter().filter(|&j| j != i).map(|j| ctx.tile(j).clone()));
            *counts.entry(anchored_key(&Patch::new(tiles), 0)).or_insert(0u64) += 1;
        }
    }
    let area = 5f64.powi(7);
    for (k, v) in t.keys.iter().zip(&t.values) {
        let c = counts.get(k).copied().unwrap_or(0) as f64 / area;
        let bound = boundary_bound(k.representative().diameter(), 7);
        assert!((c - v.to_f64().unwrap()).abs() < bound, "{} {c} vs {v}", k.hash);
    }
}

#[test]
fn refinement_levels_agree() {
    let t = table();
    let ff = family_frequencies(&t, PatchFamily::TileCorona(1), 3).unwrap();
    assert!(ff.consistent);
    let total: BigRational = ff.values.values().fold(BigRational::zero(), |a, b| a + b);
    assert_eq!(total, BigRational::from(BigInt::from(1)));
    assert_eq!(ff.values.len(), t.keys.len());
    for (k, v) in t.keys.iter().zip(&t.values) {
        assert_eq!(ff.values.get(k), Some(v));
    }
}

#[test]
fn vertex_star_keys_are_distinct_and_marked() {
    let t = table();
    let ff = family_frequencies(&t, PatchFamily::StarCorona(0), 3).unwrap();
    assert!(ff.consistent);
    let mut seen = HashSet::new();
    for k in ff.values.keys() {
        assert!(seen.insert(k.hash.clone()));
        assert!(k.marker.is_some());
    }
}

#[test]
fn pairing_matches_counted_corona_frequency() {
    let t = table();
    let stars = symmetric_stars(5).unwrap();
    let star = stars
        .stars
        .iter()
        .find(|s| stars.periodic.contains(&s.key.hash))
        .unwrap();
    let entry = trace_pairing(star, 5, &t, &Epsilon::z2(), 4).unwrap();
    assert_eq!(entry.l, 1);
    let (u, anchor) = star_one_corona(star, 5).unwrap();
    let ctx = &level_context(7).unwrap().context;
    let occ = count_occurrences(ctx, &u, anchor) as f64 / 5f64.powi(7);
    let bound = boundary_bound(u.diameter(), 7);
    assert!((occ - entry.freq.to_f64().unwrap()).abs() < bound);
    let reversed = WindingLoop::new(Epsilon::z2()).unwrap().reverse();
    assert!((numerical_index(&reversed, 10_000) + 1.0).abs() < 1e-6);
}

#[test]
fn module_generator_by_hand() {
    // gcd/lcm over reduced fractions: 1/132, 3/275, 163/33000 generate
    // (1/33000)·gcd(250, 360, 163) = 1/33000.
    let fr = [(1i64, 132i64), (3, 275), (163, 33000)];
    let l = fr.iter().fold(1i64, |a, &(_, q)| a.lcm(&q));
    let g = fr.iter().fold(0i64, |a, &(p, q)| a.gcd(&(p * (l / q))));
    assert_eq!((g, l), (1, 33000));
    let vals: Vec<BigRational> = fr
        .iter()
        .map(|&(p, q)| BigRational::new(p.into(), q.into()))
        .collect();
    assert_eq!(
        pinwheel_core::frequency::generated_subgroup(vals.iter()),
        BigRational::new(1.into(), 33000.into())
    );
}
