use hgbc::builtin::BuiltinPolygon;
use hgbc::fem::SolverConfig;
use hgbc::gbc::{DesignPair, FieldId, GbcEngine};
use hgbc::locality::{
    deboor_check, default_boundary_center, default_interior_center, local_vs_global_table,
    measure_decay, observed_deboor_constant, RingMesh,
};
use hgbc::sampling::SampleGrid;

fn engine(p: BuiltinPolygon) -> GbcEngine {
    let pair = DesignPair::new(
        p.design_mesh().unwrap(),
        p.default_computation_refinements(),
    );
    GbcEngine::new(pair, 1, SolverConfig::default()).unwrap()
}

#[test]
fn every_field_decays_on_non_rectangles() {
    for p in [
        BuiltinPolygon::ConvexQuad,
        BuiltinPolygon::NonconvexQuad,
        BuiltinPolygon::LShape,
    ] {
        let e = engine(p);
        let set = e.compute_global().unwrap();
        for id in set.field_ids() {
            let d = measure_decay(&set, id).unwrap();
            assert_eq!(d.ring_mesh, RingMesh::Coarse);
            let from2: Vec<f64> = d
                .ring_maxima
                .iter()
                .filter(|r| r.0 >= 2)
                .map(|r| r.1)
                .collect();
            assert!(
                from2.windows(2).all(|w| w[1] <= w[0] + 1e-12),
                "{p} {id}: {:?}",
                d.ring_maxima
            );
            if let Some(s) = d.sigma {
                assert!(s > 0.0 && s < 0.95, "{p} {id}: sigma {s}");
            }
            assert!(!d.growth_flagged || from2.len() < 2);
        }
    }
}

#[test]
fn convex_quad_boundary_sigma_in_unit_interval() {
    let e = engine(BuiltinPolygon::ConvexQuad);
    let set = e.compute_global().unwrap();
    let v = default_boundary_center(e.pair().coarse());
    let d = measure_decay(&set, FieldId::Boundary(v)).unwrap();
    let s = d.sigma.unwrap();
    assert!(s > 0.0 && s < 1.0);
    assert!(!d.sub_exponential);
    assert!(d.csv().starts_with("ring,max_abs_value\n1,1.0\n"));
}

#[test]
fn square_decays_linearly() {
    let e = engine(BuiltinPolygon::Square);
    let set = e.compute_global().unwrap();
    for id in set.field_ids() {
        let d = measure_decay(&set, id).unwrap();
        assert_eq!(d.ring_mesh, RingMesh::Fine);
        assert!(d.sub_exponential, "{id}");
    }
}

#[test]
fn default_centers() {
    let coarse = BuiltinPolygon::ConvexQuad.design_mesh().unwrap();
    let b = default_boundary_center(&coarse);
    assert!(coarse.is_boundary_vertex(b));
    // midpoint of the first polygon edge is itself a design vertex
    let mid = coarse.vertex(0).midpoint(coarse.vertex(1));
    assert!(coarse.vertex(b).distance(mid) < 1e-12);
    let i = default_interior_center(&coarse).unwrap();
    assert!(!coarse.is_boundary_vertex(i));
    assert_eq!(
        default_interior_center(&BuiltinPolygon::Square.design_mesh().unwrap()),
        None
    );
}

#[test]
fn local_vs_global_tables() {
    let e = engine(BuiltinPolygon::LShape);
    let grid = SampleGrid::new(e.pair().fine().clone(), 51).unwrap();
    let center = default_boundary_center(e.pair().coarse());
    let sat = e
        .pair()
        .coarse()
        .saturation_ring(hgbc::mesh::StarCenter::Vertex(center))
        .unwrap();
    let rings: Vec<usize> = (1..=sat).collect();
    let t = local_vs_global_table(&e, center, &rings, &grid).unwrap();
    assert!(t.is_non_increasing());
    let last = t.rows.last().unwrap();
    assert!(last.saturated && last.max_error <= 1e-10);
    assert!(t.rows.iter().all(|r| r.max_error >= 0.0));
    assert_eq!(t.samples, grid.len());
    assert!(local_vs_global_table(&e, center, &[3, 2], &grid).is_err());
    assert!(local_vs_global_table(&e, center, &[0, 1], &grid).is_err());
}

#[test]
fn deboor_explicit_sequences() {
    for k in 2..=12usize {
        let seq: Vec<f64> = (0..=k).rev().map(|m| m as f64).collect();
        let r = deboor_check(&seq, 1.0 / k as f64);
        assert!(r.passed(), "k = {k}: {r:?}");
        assert!((r.lambda.unwrap() - (1.0 - 1.0 / k as f64)).abs() < 1e-15);
    }
    assert!(!deboor_check(&[1.0, 0.0], 1.0).passed());
    let geo: Vec<f64> = (0..10).map(|m| 0.5f64.powi(m)).collect();
    let c = observed_deboor_constant(&geo).unwrap();
    assert!(deboor_check(&geo, c).passed());
}
