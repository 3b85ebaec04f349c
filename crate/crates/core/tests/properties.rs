//! Property tests over random small Gale diagrams.

use std::collections::BTreeSet;

use galereg::fiberhom::{self, Field};
use galereg::quadrangle::{
    enumerate_syzygy_quadrangles, is_cohen_macaulay, is_complete_intersection, regularity_fast,
};
use galereg::reduction::{
    chain_values, degree_drop_one, enumerate_partitions, halfspace_witness, is_perfectly_balanced,
    is_simple, new_quadrangle, reduced_gale, support_sets, ReductionDatum,
};
use galereg::zlattice::{gale_equivalent, kernel_lattice, orbit_key};
use galereg::{GaleDiagram, Lattice, Mat2, Vec2};
use num_integer::Integer;
use proptest::prelude::*;

const GENERATORS: [Mat2; 4] = [
    Mat2([[1, 1], [0, 1]]),
    Mat2([[1, 0], [1, 1]]),
    Mat2([[0, 1], [1, 0]]),
    Mat2([[-1, 0], [0, 1]]),
];

fn unimodular() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(0..GENERATORS.len(), 0..7).prop_map(|ks| {
        ks.into_iter()
            .fold(Mat2::IDENTITY, |m, k| m.mul(&GENERATORS[k]))
    })
}

/// Zero-sum spanning diagrams of `n` vectors: `n - 1` random vectors in
/// `[-c, c]^2` closed by their negated sum.
fn diagram(n: std::ops::RangeInclusive<usize>, c: i64) -> impl Strategy<Value = GaleDiagram> {
    n.prop_flat_map(move |n| prop::collection::vec((-c..=c, -c..=c), n - 1))
        .prop_filter_map("not spanning", |ps| {
            let mut vs: Vec<Vec2> = ps.into_iter().map(Vec2::from).collect();
            let s = vs.iter().fold(Vec2::ZERO, |a, &b| a + b);
            vs.push(-s);
            let g = GaleDiagram::new(vs).ok()?;
            Lattice::from_gale(&g).ok()?;
            Some(g)
        })
}

fn lattice(g: &GaleDiagram) -> Lattice {
    Lattice::from_gale(g).unwrap()
}

/// Saturated, nondegenerate, nonzero Gale vectors.
fn toric(n: std::ops::RangeInclusive<usize>, c: i64) -> impl Strategy<Value = Lattice> {
    diagram(n, c)
        .prop_map(|g| lattice(&g))
        .prop_filter("not toric", |l| {
            l.is_saturated() && l.is_nondegenerate() && l.nonzero_count() == l.n()
        })
}

fn shuffle(vs: &[Vec2], seed: usize) -> Vec<Vec2> {
    let mut out = vs.to_vec();
    for i in (1..out.len()).rev() {
        out.swap(
            i,
            (seed.wrapping_mul(2654435761).wrapping_add(i * 40503)) % (i + 1),
        );
    }
    out
}

fn quads_set(l: &Lattice, bound: i64) -> BTreeSet<(Vec2, Vec2, i64)> {
    enumerate_syzygy_quadrangles(l, bound)
        .unwrap()
        .into_iter()
        .map(|q| (q.v, q.w, q.total))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn basis_columns_sum_to_zero_and_have_rank_two(g in diagram(3..=7, 3)) {
        let l = lattice(&g);
        for c in l.basis() {
            prop_assert_eq!(c.iter().sum::<i64>(), 0);
        }
        prop_assert!(l.gale_vectors().iter().any(|a| l.gale_vectors().iter().any(|b| a.det(*b) != 0)));
    }

    #[test]
    fn kernel_lattices_are_saturated(n in 4usize..=6, rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 3)) {
        let mut a = vec![vec![1i64; n]];
        a.extend(rows.into_iter().take(n - 3).map(|r| r[..n].to_vec()));
        if let Ok(l) = kernel_lattice(&a) {
            prop_assert!(l.is_saturated());
            for row in &a {
                for c in l.basis() {
                    prop_assert_eq!(row.iter().zip(c).map(|(x, y)| x * y).sum::<i64>(), 0);
                }
            }
        }
    }

    #[test]
    fn non_saturation_prime_divides_every_minor(g in diagram(3..=6, 4)) {
        let l = lattice(&g);
        match l.non_saturation_prime() {
            None => prop_assert!(l.is_saturated()),
            Some(p) => {
                prop_assert!(!l.is_saturated());
                prop_assert!((2..p).all(|q| p % q != 0));
                let vs = l.gale_vectors();
                for a in &vs {
                    for b in &vs {
                        prop_assert_eq!(a.det(*b) % p, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn gale_equivalence_is_an_equivalence(g in diagram(3..=6, 3), u in unimodular(), v in unimodular(), seed in any::<usize>()) {
        let h = g.transform(&u);
        let k = h.transform(&v);
        let p = GaleDiagram::new(shuffle(k.vectors(), seed)).unwrap();
        prop_assert!(gale_equivalent(&g, &g, false));
        prop_assert!(gale_equivalent(&g, &h, false) && gale_equivalent(&h, &g, false));
        prop_assert!(gale_equivalent(&h, &k, false) && gale_equivalent(&g, &k, false));
        prop_assert!(gale_equivalent(&g, &p, true) && gale_equivalent(&p, &g, true));
    }

    #[test]
    fn orbit_key_matches_permutation_key(g in diagram(3..=6, 2), h in diagram(3..=6, 2), u in unimodular(), seed in any::<usize>()) {
        let (lg, lh) = (lattice(&g), lattice(&h));
        prop_assert_eq!(lg.orbit_key() == lh.orbit_key(), lg.permutation_key() == lh.permutation_key());
        let moved = GaleDiagram::new(shuffle(g.transform(&u).vectors(), seed)).unwrap();
        prop_assert_eq!(orbit_key(moved.vectors()), lg.orbit_key());
        prop_assert_eq!(lattice(&moved).permutation_key(), lg.permutation_key());
    }

    #[test]
    fn stripping_zero_coordinates_keeps_degree_and_regularity(l in toric(4..=5, 2), zeros in 1usize..=2) {
        let mut c1 = l.basis()[0].clone();
        let mut c2 = l.basis()[1].clone();
        c1.extend(std::iter::repeat(0).take(zeros));
        c2.extend(std::iter::repeat(0).take(zeros));
        let padded = Lattice::from_basis(c1, c2).unwrap();
        let (stripped, removed) = padded.strip_zero_coordinates().unwrap();
        prop_assert_eq!(removed, zeros);
        prop_assert!(stripped.same_lattice(&l));
        let (d0, r0, _) = fiberhom::degree_and_regularity(&l).unwrap();
        let (d1, r1, _) = fiberhom::degree_and_regularity(&padded).unwrap();
        prop_assert_eq!((d0, r0), (d1, r1));
    }

    #[test]
    fn gl2_transforms_preserve_predicates_and_regularity(l in toric(4..=6, 2), u in unimodular()) {
        let m = l.transform(&u);
        prop_assert!(m.same_lattice(&l));
        prop_assert_eq!(is_complete_intersection(&m), is_complete_intersection(&l));
        prop_assert_eq!(is_cohen_macaulay(&m), is_cohen_macaulay(&l));
        prop_assert_eq!(m.is_saturated(), l.is_saturated());
        prop_assert_eq!(regularity_fast(&m).unwrap(), regularity_fast(&l).unwrap());
    }

    #[test]
    fn hilbert_function_stabilizes_at_the_degree(l in toric(4..=5, 2)) {
        prop_assert_eq!(fiberhom::hilbert_degree(&l), fiberhom::degree_volume(&l));
    }

    #[test]
    fn pruned_oracle_matches_exhaustive_fibers(l in toric(4..=5, 2)) {
        let (deg, _, t) = fiberhom::degree_and_regularity(&l).unwrap();
        let h = l.hnf();
        let e = fiberhom::exhaustive_betti(&h, deg + 2, 3, Field::Rational);
        prop_assert_eq!(t.keyed(&h), e.keyed(&h));
    }

    #[test]
    fn oracle_tables_are_consistent(l in toric(4..=6, 2)) {
        let (deg, reg, t) = fiberhom::degree_and_regularity(&l).unwrap();
        prop_assert!(reg <= deg);
        prop_assert_eq!(regularity_fast(&l).unwrap(), reg);
        let gens: usize = t.at(1).map(|e| e.rank).sum();
        prop_assert_eq!(is_complete_intersection(&l), gens == 2);
        prop_assert_eq!(is_cohen_macaulay(&l), t.projective_dimension() == 2);
        let g = l.gale_vectors();
        let h = l.hnf();
        for i in 1..=3 {
            let mut seen = BTreeSet::new();
            for e in t.at(i) {
                let p = fiberhom::polygon_of(&l, &e.rep).unwrap();
                // The tight representative of the polygon lies in the same class.
                let (mut a, mut b) = (fiberhom::tight_representative(&g, &p.points), e.rep.clone());
                h.reduce(&mut a);
                h.reduce(&mut b);
                prop_assert_eq!(a, b);
                if !is_complete_intersection(&l) {
                    prop_assert!(seen.insert(p.normalized_points()), "two classes share a polygon");
                }
            }
        }
    }

    #[test]
    fn syzygy_quadrangles_have_total_at_least_four(l in toric(4..=6, 2)) {
        if !is_cohen_macaulay(&l) {
            let deg = fiberhom::degree_volume(&l);
            for q in enumerate_syzygy_quadrangles(&l, deg + 2).unwrap() {
                prop_assert!(q.total >= 4);
            }
        }
    }

    #[test]
    fn ci_with_two_quadrics_has_reg_three_and_deg_four(l in toric(4..=6, 2)) {
        if is_complete_intersection(&l) {
            let (deg, reg, t) = fiberhom::degree_and_regularity(&l).unwrap();
            let gens: Vec<i64> = t.at(1).flat_map(|e| std::iter::repeat(e.total).take(e.rank)).collect();
            if gens == [2, 2] {
                prop_assert_eq!((deg, reg), (4, 3));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn reduction_data_satisfy_the_chain_and_quadrangle_lemmas(l in toric(4..=6, 2)) {
        prop_assume!(!is_cohen_macaulay(&l));
        let (g, _) = galereg::quadrangle::normalize_unit_square(&l).unwrap();
        let lu = lattice(&g);
        for p in enumerate_partitions(&g).unwrap() {
            let d = ReductionDatum::new(g.clone(), p).unwrap();
            let (dl, rl, dq, rq) = chain_values(&d).unwrap();
            prop_assert!(rl <= rq && rq <= dq && dq <= dl);
            if rl >= dl - 1 {
                prop_assert_eq!(rq, rl);
            }
            let (_, lq) = reduced_gale(&d);
            let (ql, qq) = (quads_set(&lu, dl + 2), quads_set(&lq, dq + 2));
            if dq == dl {
                prop_assert!(qq.is_subset(&ql));
            }
            if is_perfectly_balanced(&d) && degree_drop_one(&d).unwrap() {
                prop_assert!(ql.is_subset(&qq));
                let extra: Vec<_> = qq.difference(&ql).collect();
                prop_assert_eq!(extra.len(), 1);
                let nq = new_quadrangle(&d).unwrap();
                prop_assert_eq!(extra[0].2, nq.total);
            }
        }
    }

    #[test]
    fn big_support_set_iff_simple(l in toric(4..=6, 2)) {
        prop_assume!(!is_cohen_macaulay(&l));
        let (g, _) = galereg::quadrangle::normalize_unit_square(&l).unwrap();
        for p in enumerate_partitions(&g).unwrap() {
            let d = ReductionDatum::new(g.clone(), p).unwrap();
            for (i, j) in [(1usize, 3usize), (2, 4), (3, 1), (4, 2)] {
                let pair: Vec<Vec2> = d.part(i).into_iter().chain(d.part(j)).collect();
                if !pair.iter().fold(Vec2::ZERO, |a, &b| a + b).is_zero() {
                    continue;
                }
                // <y_i, y_j> is an associated prime exactly when the rest of G
                // lies in a closed half-plane.
                let rest: Vec<Vec2> = (1..=4).filter(|&k| k != i && k != j).flat_map(|k| d.part(k)).collect();
                if halfspace_witness(&rest).is_none() {
                    continue;
                }
                let s = support_sets(&d, i);
                let big = s.degenerate || s.b.len() >= 2;
                prop_assert_eq!(big, is_simple(&d, (i.min(j), i.max(j))).unwrap().is_some(), "pair ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn family_degree_formulas(b in -3i64..=3, c in -3i64..=3) {
        prop_assume!(b != 0 && c != 0 && b.gcd(&c) == 1);
        let l6 = galereg::classify::n6_family_lattice(b, c).unwrap();
        let (deg, reg, _) = fiberhom::degree_and_regularity(&l6).unwrap();
        prop_assert_eq!((deg, reg), (1 + b.abs() + c.abs(), b.abs() + c.abs()));
        if (b, c) != (1, 1) && (b, c) != (-1, -1) {
            let l5 = galereg::classify::n5_family_lattice(b, c).unwrap();
            let want = 1 + b.abs().max(c.abs()).max((b - c).abs());
            let (deg, reg, _) = fiberhom::degree_and_regularity(&l5).unwrap();
            prop_assert_eq!((deg, reg), (want, want - 1));
        }
    }
}
