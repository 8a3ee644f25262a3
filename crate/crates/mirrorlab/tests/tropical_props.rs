//! Properties of the tropical theta function, its tiling and the charts.

use proptest::prelude::*;

use mirrorlab::charts::{chart_transition, ChartLabel};
use mirrorlab::lattice::{enumerate_norm_ball, gamma_act_moment, kappa, q, qf, LatticeVector, MomentPoint, RationalVector2, Q};
use mirrorlab::tropical::{facet, inside_edges, polytope_contains, tile_of, trop_phi, trop_term, Tile, TileOf};

fn rat(span: i64) -> impl Strategy<Value = Q> {
    (1i64..=24).prop_flat_map(move |d| (-span * d..=span * d).prop_map(move |n| qf(n, d)))
}

fn point() -> impl Strategy<Value = RationalVector2> {
    (rat(6), rat(6)).prop_map(|(a, b)| RationalVector2::new(a, b))
}

fn label() -> impl Strategy<Value = ChartLabel> {
    (-4i64..=4, -4i64..=4, 0i64..6).prop_map(|(m1, m2, k)| ChartLabel { m1, m2, k })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn periodicity(xi in point(), n in 0usize..19) {
        let ball = enumerate_norm_ball(&q(7));
        let g = ball[n % ball.len()];
        let gs = g.std_q();
        let lhs = trop_phi(&xi.add(&gs)).value - trop_phi(&xi).value;
        let rhs = -kappa(&gs) + xi.dot(&RationalVector2::ints(g.n1, g.n2));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn phi_dominates_every_term(xi in point(), a in -6i64..=6, b in -6i64..=6) {
        prop_assert!(trop_phi(&xi).value >= trop_term(&xi, &LatticeVector::new(a, b)));
    }

    #[test]
    fn tile_agrees_with_hexagon_edges(xi in point()) {
        match tile_of(&xi) {
            TileOf::Tile(t) => {
                prop_assert!(inside_edges(&t, &xi));
                for n in t.neighbors() {
                    prop_assert!(!inside_edges(&n, &xi));
                }
            }
            TileOf::Boundary(ms) => {
                prop_assert!(ms.len() >= 2);
                for m in ms {
                    prop_assert!(!inside_edges(&Tile::new(m.n1, m.n2), &xi));
                }
            }
        }
    }

    #[test]
    fn action_preserves_height_above_phi(xi in point(), h in rat(3), a in -3i64..=3, b in -3i64..=3) {
        let p = MomentPoint::new(xi.a.clone(), xi.b.clone(), trop_phi(&xi).value + h);
        let g = LatticeVector::new(a, b);
        let gp = gamma_act_moment(&g, &p);
        prop_assert_eq!(&gp.eta - trop_phi(&gp.xi()).value, &p.eta - trop_phi(&p.xi()).value);
        prop_assert_eq!(polytope_contains(&gp), polytope_contains(&p));
    }

    #[test]
    fn action_moves_tiles(xi in point(), a in -3i64..=3, b in -3i64..=3) {
        let g = LatticeVector::new(a, b);
        let p = MomentPoint::new(xi.a.clone(), xi.b.clone(), q(0));
        let moved = gamma_act_moment(&g, &p).xi();
        match (tile_of(&xi), tile_of(&moved)) {
            (TileOf::Tile(t), TileOf::Tile(u)) => prop_assert_eq!(u, Tile::new(t.m1 - a, t.m2 - b)),
            (TileOf::Boundary(x), TileOf::Boundary(y)) => prop_assert_eq!(x.len(), y.len()),
            _ => prop_assert!(false, "tile and boundary exchanged"),
        }
    }

    #[test]
    fn transitions_preserve_v0(a in label(), b in label()) {
        let t = chart_transition(&a, &b).unwrap();
        prop_assert!(t.preserves_v0());
        prop_assert_eq!(t.det().abs(), 1);
        let back = chart_transition(&b, &a).unwrap();
        prop_assert!(t.compose(&back).reduced_eq(&mirrorlab::charts::MonoMap::IDENTITY));
    }
}

#[test]
fn facet_data() {
    for (m1, m2) in [(0, 0), (1, 0), (-2, 1), (3, 3)] {
        let f = facet(&Tile::new(m1, m2));
        assert_eq!(f.normal, (-m1, -m2, 1));
        assert_eq!(f.offset, m1 * m1 + m1 * m2 + m2 * m2);
    }
}

#[test]
fn trivalent_vertex() {
    let t = trop_phi(&RationalVector2::ints(1, 1));
    assert_eq!(t.value, q(0));
    assert_eq!(t.maximizers, vec![LatticeVector::ZERO, LatticeVector::GAMMA2, LatticeVector::GAMMA1]);
    assert_eq!(trop_phi(&RationalVector2::ints(2, 1)).value, q(1));
}
