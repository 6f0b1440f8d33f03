//! Property tests over random lattice polygons, simplices and matrices.

use ehrhart_tensor::ehrhart::{
    discrete_moment, ehrhart_tensor_polynomial, moment_tensor, reciprocity_check, to_hr_vector,
};
use ehrhart_tensor::halfopen::{hr_halfopen, moment_halfopen, moment_halfopen_inclusion_exclusion, HalfOpenSimplex};
use ehrhart_tensor::json::{hvector_from_json, hvector_to_json, polynomial_from_json, polynomial_to_json, tensor_from_json, tensor_to_json};
use ehrhart_tensor::positivity::{classify_definiteness, sos_certificate, Definiteness};
use ehrhart_tensor::rational::{binomial, factorial, int, rat};
use ehrhart_tensor::tensor::outer_power_rational;
use ehrhart_tensor::triangulation::{
    ehrhart_matrix_pick, h1_pick, h2_pick, half_open_decomposition, is_generic_point, is_sparse_decomposition,
    sparse_decomposition, unimodular_triangulation, unimodular_triangulation_with_order,
};
use ehrhart_tensor::{convex_hull, IntPoint, Polytope, Rational, SymTensor};
use proptest::prelude::*;

fn polygon(bound: i64) -> impl Strategy<Value = Polytope> {
    prop::collection::vec((-bound..=bound, -bound..=bound), 3..8).prop_filter_map("degenerate", |pts| {
        convex_hull(&pts.into_iter().map(|(x, y)| IntPoint(vec![x, y])).collect::<Vec<_>>()).ok()
    })
}

fn simplex(d: usize, bound: i64) -> impl Strategy<Value = HalfOpenSimplex> {
    (prop::collection::vec(prop::collection::vec(-bound..=bound, d), d + 1), prop::collection::vec(any::<bool>(), d + 1))
        .prop_filter_map("degenerate or fully open", |(pts, mask)| {
            let removed: Vec<usize> = (0..pts.len()).filter(|&i| mask[i]).collect();
            HalfOpenSimplex::new(pts.into_iter().map(IntPoint).collect(), removed).ok()
        })
}

/// Products of elementary integer matrices and signed permutations.
fn unimodular_2d() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..4u8, -2i64..=2), 1..5).prop_map(|ops| {
        let mut m = vec![vec![1i64, 0], vec![0, 1]];
        for (op, k) in ops {
            m = match op {
                0 => vec![vec![m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]], m[1].clone()],
                1 => vec![m[0].clone(), vec![m[1][0] + k * m[0][0], m[1][1] + k * m[0][1]]],
                2 => vec![m[1].clone(), m[0].clone()],
                _ => vec![m[0].iter().map(|x| -x).collect(), m[1].clone()],
            };
        }
        m
    })
}

fn sym_matrix(d: usize, bound: i64) -> impl Strategy<Value = SymTensor> {
    prop::collection::vec(-bound..=bound, d * (d + 1) / 2).prop_map(move |vals| {
        let mut m = vec![vec![int(0); d]; d];
        let mut it = vals.into_iter();
        for i in 0..d {
            for j in i..d {
                let v = int(it.next().unwrap());
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        SymTensor::from_matrix(&m).unwrap()
    })
}

fn rational_matrix(m: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn translation_covariance(p in polygon(4), tx in -5i64..=5, ty in -5i64..=5, n in 0u64..=3) {
        let t = IntPoint(vec![tx, ty]);
        let q = p.translate(&t);
        let nt: Vec<Rational> = t.scaled(n as i64).to_rational();
        for r in 0..=2 {
            let mut expected = SymTensor::zeros(r, 2);
            for j in 0..=r {
                let c = Rational::from_integer(binomial(r as i64, j as i64));
                let term = discrete_moment(&p, r - j, n).sym_product(&outer_power_rational(&nt, j)).unwrap();
                expected = &expected + &term.scale(&c);
            }
            prop_assert_eq!(discrete_moment(&q, r, n), expected);
        }
    }

    #[test]
    fn unimodular_equivariance(p in polygon(3), m in unimodular_2d()) {
        let q = p.transform(&m).unwrap();
        let mr = rational_matrix(&m);
        for r in 0..=2 {
            for n in 0..=2 {
                prop_assert_eq!(discrete_moment(&q, r, n), discrete_moment(&p, r, n).push_forward(&mr).unwrap());
            }
            let hp = to_hr_vector(&p, r);
            let hq = to_hr_vector(&q, r);
            for (a, b) in hp.entries.iter().zip(&hq.entries) {
                prop_assert_eq!(a.push_forward(&mr).unwrap(), b.clone());
            }
        }
    }

    #[test]
    fn reciprocity_on_polygons(p in polygon(4), r in 0usize..=2, n in 1u64..=3) {
        prop_assert!(reciprocity_check(&p, r, n));
    }

    #[test]
    fn h_vector_sums_to_scaled_moment(p in polygon(4), r in 0usize..=2) {
        let h = to_hr_vector(&p, r);
        let f = Rational::from_integer(factorial(2 + r));
        prop_assert_eq!(h.total(), moment_tensor(&p, r).unwrap().scale(&f));
        prop_assert_eq!(h.to_polynomial(), ehrhart_tensor_polynomial(&p, r));
    }

    #[test]
    fn pick_formulas_do_not_depend_on_triangulation(p in polygon(4), a in (-3i64..=3, -3i64..=3)) {
        prop_assume!(a != (0, 0));
        let t1 = unimodular_triangulation(&p).unwrap();
        let t2 = unimodular_triangulation_with_order(&p, [a.0, a.1]).unwrap();
        prop_assert_eq!(h1_pick(&t1), h1_pick(&t2));
        prop_assert_eq!(h2_pick(&t1), h2_pick(&t2));
        prop_assert_eq!(ehrhart_matrix_pick(&t2), ehrhart_tensor_polynomial(&p, 2));
    }

    #[test]
    fn half_open_cells_add_up(p in polygon(4), w in (1i64..50, 1i64..50, 1i64..50), order in (-2i64..=2, 1i64..=2)) {
        let t = unimodular_triangulation_with_order(&p, [order.0, order.1]).unwrap();
        let tri = t.triangle_vertices(0);
        let total = w.0 + w.1 + w.2;
        let q: [Rational; 2] = [0, 1].map(|k| rat(w.0 * tri[0][k] + w.1 * tri[1][k] + w.2 * tri[2][k], total));
        prop_assume!(is_generic_point(&t, &q));
        let cells = half_open_decomposition(&t, &q).unwrap();
        let simplices: Vec<HalfOpenSimplex> =
            cells.iter().map(|c| HalfOpenSimplex::from_cell(&t, c).unwrap()).collect();
        for r in 0..=2 {
            for n in 0..=2 {
                let sum = simplices.iter().fold(SymTensor::zeros(r, 2), |a, s| &a + &moment_halfopen(s, r, n));
                prop_assert_eq!(sum, discrete_moment(&p, r, n));
            }
        }
    }

    #[test]
    fn halfopen_moment_paths_agree(s in simplex(2, 3), r in 0usize..=2, n in 0u64..=3) {
        prop_assert_eq!(moment_halfopen(&s, r, n), moment_halfopen_inclusion_exclusion(&s, r, n));
    }

    #[test]
    fn halfopen_moment_paths_agree_3d(s in simplex(3, 2), r in 0usize..=2, n in 0u64..=2) {
        prop_assert_eq!(moment_halfopen(&s, r, n), moment_halfopen_inclusion_exclusion(&s, r, n));
    }

    #[test]
    fn halfopen_h_vector_matches_enumeration(s in simplex(2, 3), r in 0usize..=2) {
        let poly = hr_halfopen(&s, r).unwrap().to_polynomial();
        for n in 1..=3u64 {
            prop_assert_eq!(poly.evaluate(&int(n as i64)), moment_halfopen(&s, r, n));
        }
    }

    #[test]
    fn halfopen_translation_keeps_h0_total(s in simplex(2, 3), tx in -3i64..=3, ty in -3i64..=3) {
        let moved = s.translate(&IntPoint(vec![tx, ty])).unwrap();
        prop_assert_eq!(hr_halfopen(&s, 0).unwrap(), hr_halfopen(&moved, 0).unwrap());
    }

    #[test]
    fn sos_reconstructs_psd_matrices(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..4)) {
        let mut m = vec![vec![int(0); 3]; 3];
        for row in &rows {
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += int(row[i] * row[j]);
                }
            }
        }
        let t = SymTensor::from_matrix(&m).unwrap();
        prop_assert!(classify_definiteness(&t).unwrap().classification.is_psd());
        let cert = sos_certificate(&t).unwrap();
        prop_assert!(cert.terms.iter().all(|term| term.lambda > int(0)));
        prop_assert_eq!(cert.reconstruct(3), t);
    }

    #[test]
    fn classification_agrees_with_sign_scan(t in sym_matrix(3, 4)) {
        let rep = classify_definiteness(&t).unwrap();
        let (mut neg, mut pos, mut zero) = (false, false, false);
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let v = t.apply(&[int(a), int(b), int(c)]).unwrap();
                    neg |= v < int(0);
                    pos |= v > int(0);
                    zero |= v == int(0);
                }
            }
        }
        use Definiteness::*;
        match rep.classification {
            PositiveDefinite => prop_assert!(!neg && !zero),
            NegativeDefinite => prop_assert!(!pos && !zero),
            PositiveSemidefinite => prop_assert!(!neg),
            NegativeSemidefinite => prop_assert!(!pos),
            Zero => prop_assert!(!neg && !pos),
            Indefinite => prop_assert!(rep.witness.is_some()),
        }
        if neg {
            prop_assert!(!rep.classification.is_psd());
        }
        if let Some(w) = &rep.witness {
            prop_assert!(t.apply(w).unwrap() < int(0));
        }
        if let Some(k) = &rep.kernel {
            let m = t.to_matrix().unwrap();
            for row in &m {
                let s: Rational = row.iter().zip(k).map(|(a, b)| a * b).sum();
                prop_assert_eq!(s, int(0));
            }
        }
    }

    #[test]
    fn sparse_decomposition_is_valid(p in polygon(5)) {
        let pieces = sparse_decomposition(&p).unwrap();
        prop_assert!(is_sparse_decomposition(&p, &pieces));
    }

    #[test]
    fn json_round_trips(p in polygon(4), r in 0usize..=2, s in simplex(3, 3)) {
        let poly = ehrhart_tensor_polynomial(&p, r);
        prop_assert_eq!(polynomial_from_json(&polynomial_to_json(&poly)).unwrap(), poly.clone());
        let h = to_hr_vector(&p, r);
        prop_assert_eq!(hvector_from_json(&hvector_to_json(&h)).unwrap(), h);
        for c in &poly.coeffs {
            prop_assert_eq!(&tensor_from_json(&tensor_to_json(c)).unwrap(), c);
        }
        let pj = serde_json::to_string(&p.to_json()).unwrap();
        prop_assert_eq!(Polytope::from_json(&serde_json::from_str(&pj).unwrap()).unwrap(), p);
        let sj = serde_json::to_string(&s.to_json()).unwrap();
        prop_assert_eq!(HalfOpenSimplex::from_json(&serde_json::from_str(&sj).unwrap()).unwrap(), s);
    }
}
