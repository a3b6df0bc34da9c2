use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;
use ttforge::fixtures;
use ttforge::freegroup::{fold, hall_completion};
use ttforge::graph::Reduction;
use ttforge::random::{corpus, CorpusBounds};
use ttforge::suspension::{CoverDescriptor, MappingTorus, Position, SuspensionError, TorusPoint};
use ttforge::{Dart, EdgeId, GraphMap, VertexId};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn tori() -> Vec<MappingTorus> {
    [fixtures::sigma(), fixtures::fib(), fixtures::cyc2()]
        .into_iter()
        .chain(corpus(9, 6, &CorpusBounds::default()))
        .map(|f| MappingTorus::new(f).unwrap())
        .collect()
}

#[test]
fn flow_laws_hold_at_a_thousand_points() {
    for (i, m) in tori().iter().enumerate() {
        let r = m.check_flow_laws(1000, i as u64);
        assert!(r.samples >= 1000);
        assert!(r.ok(), "{:?}", r.first_failure);
    }
}

#[test]
fn integer_times_follow_the_map_on_vertices() {
    for m in tori() {
        let f = m.map().clone();
        for v in f.domain().vertices() {
            let x = TorusPoint::at_section(Position::Vertex(v));
            let mut w = v;
            for n in 0..5i64 {
                assert_eq!(m.flow(&x, &q(n, 1)), TorusPoint::at_section(Position::Vertex(w)));
                w = f.vertex_image(w);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flow_is_additive(edge in 0usize..2, num in 1i64..12, t1 in 0i64..40, t2 in 0i64..40, h in 0i64..7) {
        let m = MappingTorus::new(fixtures::fib()).unwrap();
        let pos = Position::on_edge(m.graph(), EdgeId(edge), q(num, 12)).unwrap();
        let x = TorusPoint::new(pos, q(h, 7)).unwrap();
        let (s, t) = (q(t1, 9), q(t2, 5));
        let stepwise = m.flow(&m.flow(&x, &s), &t);
        prop_assert_eq!(stepwise, m.flow(&x, &(s + t)));
    }

    #[test]
    fn unit_time_applies_the_schedule(edge in 0usize..2, num in 1i64..24) {
        let m = MappingTorus::new(fixtures::sigma()).unwrap();
        let pos = Position::on_edge(m.graph(), EdgeId(edge), q(num, 24)).unwrap();
        let moved = m.flow(&TorusPoint::at_section(pos.clone()), &q(1, 1));
        prop_assert_eq!(moved, TorusPoint::at_section(m.schedule().eval(&pos)));
    }
}

#[test]
fn trivial_descriptor_round_trips() {
    for m in tori() {
        let d = CoverDescriptor::trivial(&m).unwrap();
        let (g, j) = d.section_first_return().unwrap();
        assert_eq!(j, 1);
        assert_eq!(d.degree(), 1);
        assert_eq!(g.domain().edge_count(), m.graph().edge_count());
        assert_eq!(d.check_projection(100, 3), 0);
    }
}

/// Every finite-index subgroup generated by two short words on the rose of
/// `FIB`, completed to a covering.
fn fib_covers(m: &MappingTorus) -> Vec<ttforge::freegroup::SubgroupGraph> {
    let g: Arc<ttforge::Graph> = m.map().domain().clone();
    let words = ["a a", "b b", "a b", "a -b", "b a a", "a b -a", "b b b"];
    let mut out = Vec::new();
    for x in words {
        for y in words {
            let loops = vec![g.parse_darts(x).unwrap(), g.parse_darts(y).unwrap()];
            let h = hall_completion(&fold(&g, VertexId(0), &loops));
            if h.degree().is_some_and(|d| d <= 3) && !out.iter().any(|o: &ttforge::freegroup::SubgroupGraph| o.same_subgroup(&h)) {
                out.push(h);
            }
        }
    }
    out
}

#[test]
fn descriptors_for_finite_index_subgroups() {
    let m = MappingTorus::new(fixtures::fib()).unwrap();
    let mut built = 0;
    for h in fib_covers(&m) {
        let deg = h.degree().unwrap();
        match CoverDescriptor::for_subgroup(&m, h, 12) {
            Ok(d) => {
                built += 1;
                assert_eq!(d.degree(), d.power() * deg);
                let (g, j) = d.section_first_return().unwrap();
                assert_eq!(j, d.power());
                assert_eq!(&g, d.lift());
                assert_eq!(d.dual_index(), j);
                assert_eq!(d.check_projection(100, 5), 0);
                // g covers F^j: projecting each lifted edge image gives F^j.
                let fj: GraphMap = m.map().power(j, Reduction::Keep).unwrap();
                for e in g.domain().edges() {
                    let projected: Vec<Dart> = d.cover().project_darts(g.edge_image(e));
                    assert_eq!(projected, fj.edge_image(d.cover().label(e)));
                }
            }
            Err(SuspensionError::NoPreservingPower(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(built >= 3, "only {built} descriptors");
}
