use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use redgraph::io::{graph_to_json, parse_graph, MeasureFile};
use redgraph::random::{
    random_connected, random_graph, random_mass_zero_measure, random_point, random_poly,
    random_probability_measure, small_rational, Topology,
};
use redgraph::rational::{int, rat};
use redgraph::{
    circle_graph, integrate, total_mass, GraphMeasure, GraphPoint, MetrizedGraph, PiecewisePoly,
};

fn graph(rng: &mut ChaCha8Rng, topo: usize) -> MetrizedGraph {
    match Topology::ALL.get(topo) {
        Some(&t) => random_graph(rng, t),
        None => random_connected(rng, 5, 4),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_is_bilinear(seed in any::<u64>(), topo in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph(&mut rng, topo);
        let (f1, f2) = (random_poly(&mut rng, &g, 2), random_poly(&mut rng, &g, 2));
        let (m1, m2) = (random_mass_zero_measure(&mut rng, &g), random_probability_measure(&mut rng, &g));
        let (a, b) = (small_rational(&mut rng, 5, 3), small_rational(&mut rng, 5, 3));
        let f = f1.combine(&a, &f2, &b).unwrap();
        prop_assert_eq!(
            integrate(&f, &m1).unwrap(),
            &a * integrate(&f1, &m1).unwrap() + &b * integrate(&f2, &m1).unwrap()
        );
        let m = m1.combine(&a, &m2, &b).unwrap();
        prop_assert_eq!(
            integrate(&f1, &m).unwrap(),
            &a * integrate(&f1, &m1).unwrap() + &b * integrate(&f1, &m2).unwrap()
        );
    }

    #[test]
    fn mass_is_additive(seed in any::<u64>(), topo in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph(&mut rng, topo);
        let m1 = random_probability_measure(&mut rng, &g).scale(&small_rational(&mut rng, 5, 3));
        let m2 = random_mass_zero_measure(&mut rng, &g).add(&random_probability_measure(&mut rng, &g)).unwrap();
        prop_assert_eq!(total_mass(&m1.add(&m2).unwrap()), total_mass(&m1) + total_mass(&m2));
        prop_assert_eq!(integrate(&PiecewisePoly::constant(&g, int(1)), &m2).unwrap(), total_mass(&m2));
    }

    #[test]
    fn canonical_points_agree_with_metric_points(seed in any::<u64>(), topo in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph(&mut rng, topo);
        for (i, e) in g.edges().iter().enumerate() {
            prop_assert_eq!(g.point(i, int(0)).unwrap(), GraphPoint::Vertex(e.from));
            prop_assert_eq!(g.point(i, e.length.clone()).unwrap(), GraphPoint::Vertex(e.to));
            let mid = &e.length / int(2);
            prop_assert_eq!(g.point(i, mid.clone()).unwrap(), GraphPoint::Edge { edge: i, offset: mid });
        }
        // a function takes the same value at every representative
        let f = random_poly(&mut rng, &g, 2);
        let p = random_point(&mut rng, &g);
        if let GraphPoint::Vertex(v) = p {
            for (i, e) in g.edges().iter().enumerate() {
                if e.from == v {
                    prop_assert_eq!(f.eval_on_edge(i, &int(0)), f.eval(&p));
                }
                if e.to == v {
                    prop_assert_eq!(f.eval_on_edge(i, &e.length), f.eval(&p));
                }
            }
        }
    }

    #[test]
    fn descriptors_round_trip(seed in any::<u64>(), topo in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph(&mut rng, topo);
        let json = graph_to_json(&g);
        let back = parse_graph(&json).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(graph_to_json(&back), json);
        let m = random_mass_zero_measure(&mut rng, &g);
        let text = serde_json::to_string(&MeasureFile::from_measure(&m)).unwrap();
        let file: MeasureFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(file.to_measure(&back).unwrap(), m);
    }
}

#[test]
fn spec_examples() {
    assert_eq!(circle_graph(&int(1)).unwrap().total_length(), int(1));
    assert_eq!(circle_graph(&int(5)).unwrap().total_length(), int(5));
    assert!(circle_graph(&int(0)).is_err());

    let ell = rat(7, 3);
    let g = circle_graph(&ell).unwrap();
    let g0 = redgraph::bundles::g0_closed_form(&ell).unwrap();
    let uniform = GraphMeasure::uniform(&g);
    assert_eq!(integrate(&g0, &uniform).unwrap(), int(0));
    assert_eq!(total_mass(&uniform), int(1));
    let d0 = GraphMeasure::dirac(&g, GraphPoint::Vertex(0), int(1)).unwrap();
    assert_eq!(total_mass(&d0.sub(&uniform).unwrap()), int(0));
}

#[test]
fn loops_and_multi_edges_are_accepted() {
    let g = MetrizedGraph::from_named(
        &["a", "b"],
        &[
            ("a", "a", int(1)),
            ("a", "b", int(2)),
            ("a", "b", int(2)),
            ("b", "b", rat(1, 2)),
        ],
    )
    .unwrap();
    assert_eq!(g.total_length(), rat(11, 2));
    assert!(MetrizedGraph::from_named(&["a", "b"], &[("a", "a", int(1))]).is_err());
}
