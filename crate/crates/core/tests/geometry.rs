use std::collections::HashSet;

use pinwheel_core::context::CollarConvention;
use pinwheel_core::enumerate::level_context;
use pinwheel_core::field::ExactScalar;
use pinwheel_core::patch::{canonicalize, Patch};
use pinwheel_core::substitution::{inflate, supertile};
use pinwheel_core::tile::{chirality_of, squared_distance, Chirality, Tile};

#[test]
fn supertiles_cover_their_regions() {
    for n in 0..=5 {
        let s = supertile(n).unwrap();
        let r = s.cover_report();
        assert!(r.passed(), "level {n}: {r:?}");
    }
}

#[test]
fn coordinates_stay_in_gaussian_rationals_with_five_power_denominators() {
    for n in 0..=6 {
        assert!(supertile(n).unwrap().coordinates_in_z_i_one_fifth(), "level {n}");
    }
}

#[test]
fn supertiles_nest() {
    for n in 1..=5 {
        let big = supertile(n).unwrap();
        let small = supertile(n - 1).unwrap();
        assert_eq!(&big.tiles[big.central_subsupertile()], &small.tiles[..]);
    }
}

#[test]
fn every_piece_is_a_unit_triangle_with_legs_one_and_two() {
    let [one, four, five] = [1, 4, 5].map(ExactScalar::from_int);
    for ch in [Chirality::Minus, Chirality::Plus] {
        for t in inflate(&Tile::reference(ch)) {
            let v = t.vertices();
            let mut d = [
                squared_distance(&v[0], &v[1]),
                squared_distance(&v[1], &v[2]),
                squared_distance(&v[0], &v[2]),
            ];
            d.sort_by(|a, b| (a - b).re_sign());
            assert_eq!(d, [one.clone(), four.clone(), five.clone()]);
            assert_eq!(chirality_of(&v), Some(t.chirality));
        }
    }
}

#[test]
fn each_parent_has_two_same_and_three_opposite_children() {
    for ch in [Chirality::Minus, Chirality::Plus] {
        let same = inflate(&Tile::reference(ch)).iter().filter(|t| t.chirality == ch).count();
        assert_eq!(same, 2);
    }
}

#[test]
fn corona_shells_touch_the_previous_shell() {
    let lc = level_context(5).unwrap();
    let ctx = &lc.context;
    let seed = ctx.index_of(&Tile::reference(Chirality::Minus)).unwrap();
    let mut prev: HashSet<usize> = [seed].into();
    for n in 1..=3 {
        let now: HashSet<usize> = ctx
            .corona(&[seed], n, CollarConvention::Closed)
            .unwrap()
            .into_iter()
            .collect();
        assert!(prev.is_subset(&now));
        for &j in now.difference(&prev) {
            assert!(
                ctx.touching(j).iter().any(|&k| prev.contains(&(k as usize))),
                "shell {n} tile {j} floats"
            );
        }
        prev = now;
    }
}

#[test]
fn adjacent_pairs_have_finitely_many_shapes() {
    // Finite local complexity: two-tile patches of touching tiles fall into a
    // finite set of classes that stops growing.
    let mut counts = Vec::new();
    for n in 3..=6 {
        let ctx = &level_context(n).unwrap().context;
        let mut keys = HashSet::new();
        for i in 0..ctx.len() {
            for &j in ctx.touching(i) {
                let j = j as usize;
                if i < j {
                    let p = Patch::new(vec![ctx.tile(i).clone(), ctx.tile(j).clone()]);
                    keys.insert(canonicalize(&p).0.hash);
                }
            }
        }
        counts.push(keys.len());
    }
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(counts[2], counts[3], "{counts:?}");
}

#[test]
fn mirroring_flips_chirality_and_is_an_involution() {
    for t in supertile(2).unwrap().tiles {
        let m = t.mirrored();
        assert_eq!(m.chirality, t.chirality.flip());
        assert_eq!(m.mirrored(), t);
    }
}
