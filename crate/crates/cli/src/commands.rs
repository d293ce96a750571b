use std::fs;
use std::path::Path;
use std::time::Instant;

use hgbc::gbc::{persist, verify_gbc_identities, DesignPair, FieldId, GbcEngine};
use hgbc::locality::{
    default_boundary_center, default_interior_center, local_vs_global_table, measure_decay,
    DecayReport, RingMesh,
};
use hgbc::mesh::io::write_mesh;
use hgbc::mesh::Triangulation;
use hgbc::poisson::{
    run_benchmark_with, superpose, superposition_equivalence_check, vertex_samples,
    BenchmarkConfig, ManufacturedCase, Method,
};
use hgbc::sampling::SampleGrid;
use hgbc::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::config::{LocalityArgs, PoissonArgs, RunConfig};

/// Invariant violations, each printed verbatim at the end of a run.
pub type Failures = Vec<String>;

pub const POU_TOLERANCE: f64 = 1e-9;
pub const LINEAR_TOLERANCE: f64 = 1e-8;
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;
pub const SATURATION_TOLERANCE: f64 = 1e-10;
pub const SIGMA_LIMIT: f64 = 0.95;
pub const PARITY_BAND: (f64, f64) = (0.3, 3.0);
pub const ENERGY_RATE_MIN: f64 = 1.8;

fn write(path: &Path, text: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn prepare_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))
}

fn write_run_manifest(cfg: &RunConfig, command: &str, extra: serde_json::Value) -> Result<()> {
    let mut doc = cfg.to_json();
    doc["command"] = command.into();
    if let (Some(obj), serde_json::Value::Object(more)) = (doc.as_object_mut(), extra) {
        obj.extend(more);
    }
    write(
        &cfg.out.join("run.json"),
        serde_json::to_string_pretty(&doc).expect("json values serialize"),
    )
}

fn stats_row(name: &str, m: &Triangulation) -> Result<String> {
    Ok(format!(
        "{name},{},{},{},{},{:?},{:?}",
        m.vertex_count(),
        m.triangle_count(),
        m.boundary_vertices().len(),
        m.interior_vertices().len(),
        m.quasi_uniformity()?,
        m.mesh_size()
    ))
}

pub fn mesh(cfg: &RunConfig) -> Result<Failures> {
    prepare_out(cfg)?;
    let pair = DesignPair::new(cfg.design.clone(), cfg.refinements);
    write_mesh(pair.coarse(), cfg.out.join("design.json"))?;
    write_mesh(pair.fine(), cfg.out.join("computation.json"))?;
    let mut csv =
        String::from("mesh,vertices,triangles,boundary_vertices,interior_vertices,beta,size\n");
    for (name, m) in [("design", pair.coarse()), ("computation", pair.fine())] {
        let row = stats_row(name, m)?;
        println!(
            "{name}: {} vertices ({} boundary), {} triangles, beta {:.6}, size {:.6}",
            m.vertex_count(),
            m.boundary_vertices().len(),
            m.triangle_count(),
            m.quasi_uniformity()?,
            m.mesh_size()
        );
        csv.push_str(&row);
        csv.push('\n');
    }
    write(&cfg.out.join("mesh_stats.csv"), csv)?;
    write_run_manifest(cfg, "mesh", serde_json::json!({}))?;
    Ok(Vec::new())
}

pub fn gbc(cfg: &RunConfig) -> Result<Failures> {
    prepare_out(cfg)?;
    let mut failures = Vec::new();
    let start = Instant::now();
    let engine = GbcEngine::new(
        DesignPair::new(cfg.design.clone(), cfg.refinements),
        cfg.degree,
        cfg.solver,
    )?;
    let set = engine.compute_global()?;
    let solve_time = start.elapsed().as_secs_f64();
    println!(
        "computed {} boundary and {} interior fields on {} dofs in {:.3} s",
        set.boundary_fields().len(),
        set.interior_fields().len(),
        set.space().dof_count(),
        solve_time
    );

    let grid = SampleGrid::new(engine.pair().fine().clone(), cfg.grid)?;
    let report = verify_gbc_identities(&set, grid.points())?;
    println!("samples: {}", report.samples);
    println!(
        "partition of unity residual: {:e}",
        report.partition_of_unity
    );
    println!("linear precision residual: {:e}", report.linear_precision);
    println!(
        "boundary vertex interpolation residual: {:e}",
        report.vertex_interpolation
    );
    println!(
        "nonnegativity margin (min S_i): {:e}",
        report.min_boundary_value
    );
    println!(
        "interior weak residual: {:e}",
        report.interior_weak_residual
    );
    println!("max interior field value: {:e}", report.interior_max_value);
    failures.extend(report.failures(POU_TOLERANCE, LINEAR_TOLERANCE));

    let dir = cfg.out.join("gbc");
    persist::save(&set, &dir)?;
    let mut timings = String::from("field,seconds\n");
    for (id, secs) in set.solve_seconds() {
        timings.push_str(&format!("{},{secs:?}\n", id.file_stem()));
    }
    write(&cfg.out.join("timings.csv"), timings)?;

    let reloaded = persist::load(&dir)?;
    let grid2 = SampleGrid::new(reloaded.pair().fine().clone(), cfg.grid)?;
    let report2 = verify_gbc_identities(&reloaded, grid2.points())?;
    if report2 != report {
        failures.push("reloaded fields reproduce the identity residuals bit-identically".into());
    }
    let mismatched = set
        .field_ids()
        .par_iter()
        .filter(|&&id| {
            let a = grid.evaluate(set.field(id).unwrap());
            let b = match reloaded.field(id) {
                Some(f) => grid2.evaluate(f),
                None => return true,
            };
            a.iter().zip(&b).any(|(x, y)| x.to_bits() != y.to_bits())
        })
        .count();
    if mismatched > 0 {
        failures.push(format!(
            "reloaded fields evaluate bit-identically on the grid ({mismatched} fields differ)"
        ));
    }
    println!(
        "reload check: {}",
        if mismatched == 0 && report2 == report {
            "bit-identical"
        } else {
            "MISMATCH"
        }
    );
    write_run_manifest(
        cfg,
        "gbc",
        serde_json::json!({ "solve_seconds": solve_time }),
    )?;
    Ok(failures)
}

fn decay_summary_row(d: &DecayReport) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{}\n",
        d.field.file_stem(),
        match d.ring_mesh {
            RingMesh::Coarse => "coarse",
            RingMesh::Fine => "fine",
        },
        d.ring_maxima.len(),
        opt(d.sigma),
        opt(d.k_fit),
        d.growth_flagged,
        d.sub_exponential
    )
}

/// Violations of the decay invariant: maxima non-increasing from ring 2 on
/// and σ below [`SIGMA_LIMIT`].
fn decay_failures(d: &DecayReport) -> Vec<String> {
    let mut out = Vec::new();
    let tail: Vec<&(usize, f64)> = d.ring_maxima.iter().filter(|r| r.0 >= 2).collect();
    for w in tail.windows(2) {
        if w[1].1 > w[0].1 + 1e-12 {
            out.push(format!(
                "{}: ring maximum grows from ring {} ({:e}) to ring {} ({:e})",
                d.field.file_stem(),
                w[0].0,
                w[0].1,
                w[1].0,
                w[1].1
            ));
            break;
        }
    }
    if let Some(s) = d.sigma {
        if !(s < SIGMA_LIMIT) {
            out.push(format!(
                "{}: fitted sigma {s} >= {SIGMA_LIMIT}",
                d.field.file_stem()
            ));
        }
    }
    out
}

pub fn locality(cfg: &RunConfig, args: &LocalityArgs) -> Result<Failures> {
    prepare_out(cfg)?;
    let mut failures = Vec::new();
    let engine = GbcEngine::new(
        DesignPair::new(cfg.design.clone(), cfg.refinements),
        cfg.degree,
        cfg.solver,
    )?;
    let set = engine.compute_global()?;
    let coarse = engine.pair().coarse().clone();

    let decay_dir = cfg.out.join("decay");
    fs::create_dir_all(&decay_dir).map_err(|e| Error::io(&decay_dir, e))?;
    let reports: Vec<DecayReport> = set
        .field_ids()
        .par_iter()
        .map(|&id| measure_decay(&set, id))
        .collect::<Result<_>>()?;
    let mut summary =
        String::from("field,ring_mesh,rings,sigma,k_fit,growth_flagged,sub_exponential\n");
    for d in &reports {
        write(
            &decay_dir.join(format!("{}.csv", d.field.file_stem())),
            d.csv(),
        )?;
        summary.push_str(&decay_summary_row(d));
        failures.extend(decay_failures(d));
    }
    write(&cfg.out.join("decay_summary.csv"), summary)?;
    let flagged = reports.iter().filter(|d| d.sub_exponential).count();
    println!(
        "sub-exponential decay flagged on {flagged} of {} fields",
        reports.len()
    );

    let boundary = match args.boundary_center {
        Some(v) if !coarse.is_boundary_vertex(v) => {
            coarse.check_vertex(v)?;
            return Err(Error::NotBoundaryVertex(v));
        }
        Some(v) => v,
        None => default_boundary_center(&coarse),
    };
    let interior = match args.interior_center {
        Some(v) => {
            coarse.check_vertex(v)?;
            if coarse.is_boundary_vertex(v) {
                return Err(Error::NotInteriorVertex(v));
            }
            Some(v)
        }
        None => default_interior_center(&coarse),
    };
    let grid = SampleGrid::new(engine.pair().fine().clone(), cfg.grid)?;
    let mut centers = vec![FieldId::Boundary(boundary)];
    centers.extend(interior.map(FieldId::Interior));
    for id in centers {
        let d = reports
            .iter()
            .find(|d| d.field == id)
            .expect("every field has a decay report");
        println!(
            "decay {}: sigma {}, sub-exponential {}",
            id.file_stem(),
            d.sigma
                .map(|s| format!("{s:.4}"))
                .unwrap_or_else(|| "n/a".into()),
            if d.sub_exponential { "yes" } else { "no" }
        );
        let table = local_vs_global_table(&engine, id.vertex(), &args.rings, &grid)?;
        write(
            &cfg.out.join(format!("lvg_{}.csv", id.file_stem())),
            table.csv(),
        )?;
        println!(
            "local vs global {} (saturation ring {}):",
            id.file_stem(),
            table.saturation_ring
        );
        for r in &table.rows {
            println!(
                "  ring {:>2}  max error {:.6e}  rate {}",
                r.ring,
                r.max_error,
                r.rate
                    .map(|x| format!("{x:.3}"))
                    .unwrap_or_else(|| "-".into())
            );
            if r.saturated && !(r.max_error <= SATURATION_TOLERANCE) {
                failures.push(format!(
                    "{}: saturated ring {} error {:e} > {SATURATION_TOLERANCE:e}",
                    id.file_stem(),
                    r.ring,
                    r.max_error
                ));
            }
        }
        if !table.is_non_increasing() {
            failures.push(format!(
                "{}: local-vs-global errors are not monotone in the ring",
                id.file_stem()
            ));
        }
    }
    write_run_manifest(
        cfg,
        "locality",
        serde_json::json!({ "rings": args.rings, "boundary_center": boundary, "interior_center": interior }),
    )?;
    Ok(failures)
}

pub fn poisson(cfg: &RunConfig, args: &PoissonArgs) -> Result<Failures> {
    prepare_out(cfg)?;
    let mut failures = Vec::new();
    let cases = args
        .cases
        .iter()
        .map(|&c| ManufacturedCase::new(c))
        .collect::<Result<Vec<_>>>()?;
    let config = BenchmarkConfig {
        degree: cfg.degree,
        refinements: cfg.refinements,
        levels: args
            .levels
            .unwrap_or(2 + usize::from(cfg.paper_mode))
            .max(1),
        grid: cfg.grid,
        solver: cfg.solver,
        cases: cases.clone(),
    };
    let mut rng = StdRng::seed_from_u64(args.seed);
    let mut worst_random: f64 = 0.0;
    let mut worst_boundary: f64 = 0.0;
    let result = run_benchmark_with(&cfg.design, &config, |_, engine, set| {
        let nv = engine.pair().coarse().vertex_count();
        for _ in 0..args.samples {
            let g: Vec<f64> = (0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f: Vec<f64> = (0..nv).map(|_| rng.gen_range(-10.0..10.0)).collect();
            worst_random = worst_random.max(superposition_equivalence_check(engine, set, &g, &f)?);
        }
        let coarse = engine.pair().coarse();
        for &case in &cases {
            let (g, f) = vertex_samples(coarse, &case.problem());
            let u = superpose(set, &g, &f)?;
            for v in coarse.boundary_vertices() {
                let err = (u.coefficients()[engine.space().vertex_dof(v)] - g[v]).abs();
                worst_boundary = worst_boundary.max(err);
            }
        }
        Ok(())
    })?;
    write(&cfg.out.join("poisson.csv"), result.csv())?;
    write(&cfg.out.join("rates.csv"), result.rates_csv())?;

    println!("case method            level  max_error     energy_error");
    for r in &result.reports {
        println!(
            "{:>4} {:<18} {:>5}  {:.6e}  {:.6e}",
            r.case,
            r.method.tag(),
            r.refinement,
            r.max_error,
            r.energy_error
        );
    }
    for r in result.rates() {
        println!(
            "rate case {} {} {}->{}: max error x{:.3}, energy x{:.3}",
            r.case,
            r.method.tag(),
            r.from,
            r.to,
            r.max_error_ratio,
            r.energy_ratio
        );
    }
    let worst_case = result
        .equivalence_residuals
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let worst = worst_case.max(worst_random);
    println!("superposition equivalence residual: {worst:e}");
    println!("boundary exactness residual: {worst_boundary:e}");
    if !(worst <= EQUIVALENCE_TOLERANCE) {
        failures.push(format!(
            "superposition equivalence residual {worst:e} > {EQUIVALENCE_TOLERANCE:e}"
        ));
    }
    if !(worst_boundary <= 1e-9) {
        failures.push(format!(
            "boundary exactness residual {worst_boundary:e} > 1e-9"
        ));
    }
    for gbc in result
        .reports
        .iter()
        .filter(|r| r.method == Method::GbcSuperposition)
    {
        let fem = result
            .report(gbc.case, Method::DirectFem, gbc.refinement)
            .expect("both methods run at every level");
        let ratio = gbc.max_error / fem.max_error;
        if !(PARITY_BAND.0..=PARITY_BAND.1).contains(&ratio) {
            failures.push(format!(
                "case {} level {}: GBC/FEM max-error ratio {ratio:.3} outside [{}, {}]",
                gbc.case, gbc.refinement, PARITY_BAND.0, PARITY_BAND.1
            ));
        }
    }
    // A design level without interior vertices carries no source term, so
    // the energy rate is only checked from a level that has one.
    let last = config.levels.saturating_sub(1);
    let first_with_interior = (0..config.levels)
        .find(|&l| !cfg.design.refine_times(l).interior_vertices().is_empty())
        .unwrap_or(config.levels);
    if config.levels >= 2 && last > first_with_interior {
        println!("energy rate checked on levels {}->{last}", last - 1);
    } else if config.levels >= 2 {
        println!("energy rate check skipped: too few levels with interior design vertices (use --levels)");
    }
    for r in result
        .rates()
        .iter()
        .filter(|r| r.to == last && r.from >= first_with_interior)
    {
        if !(r.energy_ratio >= ENERGY_RATE_MIN) {
            failures.push(format!(
                "case {} {}: energy error ratio {:.3} < {ENERGY_RATE_MIN} on the finest refinement",
                r.case,
                r.method.tag(),
                r.energy_ratio
            ));
        }
    }
    write_run_manifest(
        cfg,
        "poisson",
        serde_json::json!({
            "levels": config.levels,
            "cases": args.cases,
            "seed": args.seed,
            "random_samples": args.samples,
            "interior_sign": hgbc::poisson::INTERIOR_SIGN,
        }),
    )?;
    Ok(failures)
}
