use std::collections::BTreeMap;

use sdl_core::families::{
    act, ball_path_graph, grigorchuk_graph, grigorchuk_spec, hanoi_graph, hanoi_spec,
    lamplighter_graph, parse_spec, schreier_graph, sierpinski_graph, tree_ball_size, Family,
    FamilyError, TreeWord, GRIGORCHUK_SPEC, HANOI_SPEC,
};
use sdl_core::graph::Multigraph;
use sdl_core::metric::{all_pairs_distances, diameter};

fn delta(g: &Multigraph) -> u32 {
    diameter(&all_pairs_distances(g).unwrap())
}

/// Proper edges as a multiset of unordered pairs, after mapping vertices.
fn edge_multiset(
    g: &Multigraph,
    keep: impl Fn(usize) -> Option<usize>,
) -> BTreeMap<(usize, usize), u32> {
    let mut out = BTreeMap::new();
    for e in g.proper_edges() {
        if let (Some(u), Some(v)) = (keep(e.u), keep(e.v)) {
            *out.entry((u.min(v), u.max(v))).or_insert(0) += e.mult;
        }
    }
    out
}

#[test]
fn vertex_and_diameter_table() {
    for n in 1..=7 {
        let g = hanoi_graph(n).unwrap();
        assert_eq!(g.vertex_count(), 3usize.pow(n as u32));
        assert_eq!(delta(&g), (1 << n) - 1, "hanoi {n}");
    }
    for n in 1..=10 {
        let g = grigorchuk_graph(n).unwrap();
        assert_eq!(g.vertex_count(), 1 << n);
        assert_eq!(delta(&g), (1 << n) - 1, "grigorchuk {n}");
    }
    for n in 2..=8 {
        let g = lamplighter_graph(n).unwrap();
        assert_eq!(g.vertex_count(), n << n);
        assert!(g.is_transitive());
    }
    for n in 1..=6 {
        let g = sierpinski_graph(n).unwrap();
        assert_eq!(g.vertex_count(), (3usize.pow(n as u32) + 3) / 2);
        assert_eq!(delta(&g), 1 << (n - 1), "sierpinski {n}");
    }
    for n in 1..=6 {
        let g = ball_path_graph(n).unwrap();
        let ball = tree_ball_size(n);
        assert_eq!(g.vertex_count(), 2 * ball);
        assert_eq!(delta(&g) as usize, n + ball);
    }
}

#[test]
fn small_levels_by_hand() {
    let g = grigorchuk_graph(1).unwrap();
    assert_eq!(g.vertex_count(), 2);
    assert_eq!(g.multiplicity(0, 1), 1);
    // b, c each fix both letters at level 1, d fixes them too
    assert_eq!(g.loops_at(0) + g.loops_at(1), 6);

    let g = hanoi_graph(1).unwrap();
    assert_eq!(g.vertex_count(), 3);
    for x in 0..3 {
        assert_eq!(g.loops_at(x), 1);
    }
    assert_eq!(g.proper_edges().count(), 3);

    let g = lamplighter_graph(2).unwrap();
    // t and t⁻¹ coincide when n = 2, so every vertex has degree 2
    assert_eq!(g.regular_degree(), Some(2));
    let g = lamplighter_graph(3).unwrap();
    assert_eq!(g.regular_degree(), Some(3));
}

#[test]
fn every_generator_is_an_involution() {
    for (spec, max) in [(hanoi_spec(), 8), (grigorchuk_spec(), 8)] {
        for level in 1..=max {
            for gen in 0..spec.generators().len() {
                let perm = spec.level_permutation(gen, level);
                for (v, &u) in perm.iter().enumerate() {
                    assert_eq!(perm[u], v);
                }
            }
        }
    }
}

#[test]
fn grigorchuk_relations() {
    let spec = grigorchuk_spec();
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|s| spec.generator_index(s).unwrap());
    for level in 1..=10 {
        let pa = spec.level_permutation(a, level);
        let pb = spec.level_permutation(b, level);
        let pc = spec.level_permutation(c, level);
        let pd = spec.level_permutation(d, level);
        for w in 0..1usize << level {
            for p in [&pa, &pb, &pc, &pd] {
                assert_eq!(p[p[w]], w);
            }
            // bcd = 1 with any composition order, since b, c, d commute
            assert_eq!(pb[pc[pd[w]]], w, "level {level}");
            assert_eq!(pd[pc[pb[w]]], w, "level {level}");
        }
    }
}

#[test]
fn hanoi_fixed_words() {
    let spec = hanoi_spec();
    for level in 1..=7 {
        for (gen, letter) in [("a", 2u8), ("b", 1), ("c", 0)] {
            let g = spec.generator_index(gen).unwrap();
            let perm = spec.level_permutation(g, level);
            let fixed: Vec<usize> = (0..perm.len()).filter(|&v| perm[v] == v).collect();
            let expected = TreeWord::constant(letter, level).index(3);
            assert_eq!(fixed, vec![expected], "{gen} at level {level}");
        }
    }
}

#[test]
fn hanoi_loops() {
    for n in 1..=6 {
        let g = hanoi_graph(n).unwrap();
        let looped: Vec<String> = (0..g.vertex_count())
            .filter(|&x| g.loops_at(x) > 0)
            .map(|x| g.label(x))
            .collect();
        let expected: Vec<String> = (0..3u8)
            .map(|l| TreeWord::constant(l, n).to_string())
            .collect();
        assert_eq!(looped, expected);
        assert!(looped
            .iter()
            .all(|w| g.loops_at(TreeWord::parse(w).unwrap().index(3)) == 1));
    }
}

#[test]
fn hanoi_copy_structure() {
    for n in 2..=5 {
        let g = hanoi_graph(n).unwrap();
        let prev = hanoi_graph(n - 1).unwrap();
        let prev_edges = edge_multiset(&prev, Some);
        for letter in 0..3usize {
            let copy = edge_multiset(&g, |x| (x % 3 == letter).then_some(x / 3));
            assert_eq!(copy, prev_edges, "copy {letter} at level {n}");
            let loops: Vec<usize> = (0..g.vertex_count())
                .filter(|&x| x % 3 == letter && g.loops_at(x) > 0)
                .map(|x| x / 3)
                .collect();
            let corner = TreeWord::constant(letter as u8, n - 1).index(3);
            assert_eq!(loops, vec![corner]);
        }
        let bridges: u32 = g
            .proper_edges()
            .filter(|e| e.u % 3 != e.v % 3)
            .map(|e| e.mult)
            .sum();
        assert_eq!(bridges, 3, "level {n}");
    }
}

#[test]
fn spec_text_matches_built_ins() {
    let hanoi = parse_spec(HANOI_SPEC).unwrap();
    for n in 1..=4 {
        assert_eq!(schreier_graph(&hanoi, n).unwrap(), hanoi_graph(n).unwrap());
    }
    let grig = parse_spec(GRIGORCHUK_SPEC).unwrap();
    for n in 1..=6 {
        assert_eq!(
            schreier_graph(&grig, n).unwrap(),
            grigorchuk_graph(n).unwrap()
        );
    }
    let again = parse_spec(&hanoi.to_text()).unwrap();
    assert_eq!(again, hanoi);
}

#[test]
fn spec_errors() {
    assert!(parse_spec("alphabet 3\na = (0 3) [1, 1, 1]\n").is_err());
    assert!(parse_spec("alphabet 2\na = (0 1) [1, x]\n").is_err());
    assert!(parse_spec("alphabet 2\n").is_err());
    assert!(parse_spec("a = (0 1) [1, 1]\n").is_err());
    // non-involutive generator is accepted by the parser and rejected per level
    let odometer = parse_spec("alphabet 2\na = (0 1) [1, a]\n").unwrap();
    assert!(schreier_graph(&odometer, 1).is_ok());
    assert!(matches!(
        schreier_graph(&odometer, 2),
        Err(FamilyError::NotInvolution { .. })
    ));
}

#[test]
fn actions_on_words() {
    let spec = hanoi_spec();
    let w = TreeWord::parse("220").unwrap();
    assert_eq!(act(&spec, "a", &w).unwrap().to_string(), "221");
    assert_eq!(act(&spec, "b", &w).unwrap().to_string(), "020");
    assert!(act(&spec, "z", &w).is_err());
    let spec = grigorchuk_spec();
    let w = TreeWord::parse("0110").unwrap();
    assert_eq!(act(&spec, "a", &w).unwrap().to_string(), "1110");
    // b = (a, c): first letter 0 hands a to the tail
    assert_eq!(act(&spec, "b", &w).unwrap().to_string(), "0010");
}

#[test]
fn level_ranges_and_names() {
    assert!(hanoi_graph(0).is_err());
    assert!(hanoi_graph(9).is_err());
    assert!(grigorchuk_graph(13).is_err());
    assert!(lamplighter_graph(1).is_err());
    assert!(lamplighter_graph(11).is_err());
    for family in Family::ALL {
        assert_eq!(family.name().parse::<Family>().unwrap(), family);
    }
    assert_eq!("pascal".parse::<Family>().unwrap(), Family::Hanoi);
    assert!("basilica".parse::<Family>().is_err());
}

#[test]
fn family_graphs_round_trip_through_json() {
    for family in Family::ALL {
        let level = if family == Family::Cycle { 5 } else { 3 };
        let g = family.build(level).unwrap();
        assert_eq!(Multigraph::from_json(&g.to_json()).unwrap(), g, "{family}");
    }
}
