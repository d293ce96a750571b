use std::sync::Arc;

use hgbc::builtin::BuiltinPolygon;
use hgbc::fem::{solver_stats, FeField, FeSpace, SolverConfig};
use hgbc::gbc::{persist, verify_gbc_identities, DesignPair, FieldId, GbcEngine};
use hgbc::mesh::triangulate::initial_triangulation;
use hgbc::mesh::StarCenter;
use hgbc::sampling::SampleGrid;

fn engine(p: BuiltinPolygon, n: usize) -> GbcEngine {
    let pair = DesignPair::new(
        p.design_mesh().unwrap(),
        p.default_computation_refinements(),
    );
    GbcEngine::new(pair, n, SolverConfig::default()).unwrap()
}

#[test]
fn boundary_solve_is_linear_in_its_data() {
    let e = engine(BuiltinPolygon::NonconvexQuad, 2);
    let bv = e.pair().coarse().boundary_vertices();
    let (i, j) = (bv[3], bv[17]);
    let (a, b) = (0.7, -1.9);
    let ti = e.boundary_trace_hat(i).unwrap();
    let tj = e.boundary_trace_hat(j).unwrap();
    let combo: Vec<f64> = ti.iter().zip(&tj).map(|(x, y)| a * x + b * y).collect();
    let u = e.solver().solve(&vec![0.0; combo.len()], &combo).unwrap();
    let si = e.solve_boundary_gbc(i).unwrap();
    let sj = e.solve_boundary_gbc(j).unwrap();
    for ((u, x), y) in u.iter().zip(si.coefficients()).zip(sj.coefficients()) {
        assert!((u - (a * x + b * y)).abs() < 1e-10);
    }
}

#[test]
fn interior_green_form_is_symmetric() {
    let e = engine(BuiltinPolygon::ConvexQuad, 1);
    let interior = e.pair().coarse().interior_vertices();
    let picks = [interior[0], interior[10], interior[24], interior[48]];
    let fields: Vec<FeField> = picks
        .iter()
        .map(|&j| e.solve_interior_gbc(j).unwrap())
        .collect();
    let loads: Vec<Vec<f64>> = picks.iter().map(|&j| e.hat_load(j).unwrap()).collect();
    let k = e.stiffness();
    for a in 0..picks.len() {
        for b in 0..picks.len() {
            let kr = k.mul_vec(fields[b].coefficients());
            let quadratic: f64 = fields[a]
                .coefficients()
                .iter()
                .zip(&kr)
                .map(|(x, y)| x * y)
                .sum();
            let pairing: f64 = -loads[a]
                .iter()
                .zip(fields[b].coefficients())
                .map(|(x, y)| x * y)
                .sum::<f64>();
            assert!(
                (quadratic - pairing).abs() < 1e-8,
                "{a} {b}: {quadratic} vs {pairing}"
            );
        }
    }
}

#[test]
fn interior_fields_are_nonpositive() {
    let e = engine(BuiltinPolygon::LShape, 1);
    let set = e.compute_global().unwrap();
    for r in set.interior_fields().values() {
        assert!(r.coefficients().iter().all(|&c| c <= 0.0));
    }
}

#[test]
fn nonnegativity_margin_on_convex_quad() {
    for n in [1, 2] {
        let e = engine(BuiltinPolygon::ConvexQuad, n);
        let set = e.compute_global().unwrap();
        let grid = SampleGrid::new(e.pair().fine().clone(), 101).unwrap();
        let report = verify_gbc_identities(&set, grid.points()).unwrap();
        assert!(
            report.min_boundary_value >= -1e-8,
            "{}",
            report.min_boundary_value
        );
        assert!(report.failures(1e-9, 1e-8).is_empty());
    }
}

/// Energies of one boundary coordinate solved on successively finer meshes.
fn energies(
    design: &hgbc::mesh::Triangulation,
    vertex: usize,
    levels: std::ops::RangeInclusive<usize>,
) -> Vec<f64> {
    levels
        .map(|r| {
            let e = GbcEngine::new(
                DesignPair::new(design.clone(), r),
                1,
                SolverConfig::default(),
            )
            .unwrap();
            e.solve_boundary_gbc(vertex).unwrap().energy()
        })
        .collect()
}

#[test]
fn energy_decreases_and_cea_distance_contracts() {
    let design = initial_triangulation(&BuiltinPolygon::ConvexQuad.polygon())
        .unwrap()
        .refine_uniform();
    let v = 4;
    assert!(design.is_boundary_vertex(v));
    let e = energies(&design, v, 1..=5);
    for w in e.windows(2) {
        assert!(w[1] <= w[0] + 1e-10);
    }
    // nested spaces and equal traces: |∇(S_k − S_{k+1})|² = E_k − E_{k+1}
    let dist: Vec<f64> = e.windows(2).map(|w| (w[0] - w[1]).sqrt()).collect();
    for w in dist.windows(2) {
        assert!(w[1] / w[0] <= 0.7, "{dist:?}");
    }
}

#[test]
fn cea_identity_matches_explicit_difference() {
    let design = initial_triangulation(&BuiltinPolygon::ConvexQuad.polygon())
        .unwrap()
        .refine_uniform();
    let coarse = GbcEngine::new(
        DesignPair::new(design.clone(), 1),
        1,
        SolverConfig::default(),
    )
    .unwrap();
    let fine = GbcEngine::new(DesignPair::new(design, 2), 1, SolverConfig::default()).unwrap();
    let sc = coarse.solve_boundary_gbc(2).unwrap();
    let sf = fine.solve_boundary_gbc(2).unwrap();
    // carry the coarse field to the fine space; exact for nested linear elements
    let space: &Arc<FeSpace> = fine.space();
    let lifted = space.interpolate(|p| sc.eval(p).unwrap());
    let diff: Vec<f64> = sf
        .coefficients()
        .iter()
        .zip(&lifted)
        .map(|(a, b)| a - b)
        .collect();
    let d = FeField::new(space.clone(), diff).unwrap().energy();
    assert!((d - (sc.energy() - sf.energy())).abs() < 1e-10);
}

#[test]
fn one_factorization_serves_every_field() {
    let before = solver_stats();
    let e = engine(BuiltinPolygon::LShape, 2);
    let set = e.compute_global().unwrap();
    let after = solver_stats();
    assert_eq!(after.factorizations - before.factorizations, 1);
    assert_eq!(set.field_ids().len(), e.pair().coarse().vertex_count());
}

#[test]
fn local_fields_truncate_consistently() {
    let e = engine(BuiltinPolygon::ConvexQuad, 1);
    let grid = SampleGrid::new(e.pair().fine().clone(), 61).unwrap();
    let center = 5;
    assert!(matches!(e.field_id(center).unwrap(), FieldId::Interior(5)));
    let global = e.solve_gbc(FieldId::Interior(center)).unwrap();
    let coarse = e.pair().coarse();
    for k in 3..6 {
        let local = e.solve_local_gbc(center, k).unwrap();
        let max_error = grid.max_difference(&local.field, &global);
        let inner = coarse.star(StarCenter::Vertex(center), k - 2).unwrap();
        for (p, &(t, b)) in grid.points().iter().zip(grid.locations()) {
            if inner.triangle_indices.contains(&e.pair().fine_parent(t)) {
                let d = (local.field.eval_in(t, b) - global.eval_in(t, b)).abs();
                assert!(d <= max_error, "{p:?}");
            }
        }
        // nothing leaks outside the region
        for (&(t, b), _) in grid.locations().iter().zip(grid.points()) {
            if !local
                .region
                .triangle_indices
                .contains(&e.pair().fine_parent(t))
            {
                assert_eq!(local.field.eval_in(t, b), 0.0);
            }
        }
    }
}

#[test]
fn persisted_local_set_round_trips() {
    let e = engine(BuiltinPolygon::LShape, 2);
    let set = e.compute_local(3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    persist::save(&set, dir.path()).unwrap();
    let manifest = persist::read_manifest(dir.path()).unwrap();
    assert_eq!(manifest.provenance, "local");
    assert_eq!(manifest.ring, Some(3));
    let back = persist::load(dir.path()).unwrap();
    let grid = SampleGrid::new(e.pair().fine().clone(), 41).unwrap();
    let grid2 = SampleGrid::new(back.pair().fine().clone(), 41).unwrap();
    for id in set.field_ids() {
        let a = grid.evaluate(set.field(id).unwrap());
        let b = grid2.evaluate(back.field(id).unwrap());
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
