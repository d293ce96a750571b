use rayon::prelude::*;

use crate::error::Result;
use crate::fem::assembly::{assemble_load, assemble_stiffness};
use crate::gbc::GbcSet;
use crate::geometry::Point2;
use crate::mesh::Location;

/// Residuals of the coordinate identities for a global [`GbcSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub samples: usize,
    /// max |Σ S_i(x) − 1|
    pub partition_of_unity: f64,
    /// max ‖Σ S_i(x) v_i − x‖
    pub linear_precision: f64,
    /// min S_i(x); negative values are undershoot
    pub min_boundary_value: f64,
    pub max_boundary_value: f64,
    /// max |S_i(v_k) − δ_ik| over coarse boundary vertices v_k
    pub vertex_interpolation: f64,
    /// max |R_j| over boundary DOFs
    pub interior_on_boundary: f64,
    /// max R_j over all DOFs (should not be positive)
    pub interior_max_value: f64,
    /// ‖K Σ r_j + load(Σ h_j)‖_∞ on free DOFs
    pub interior_weak_residual: f64,
}

impl IdentityReport {
    /// Names of the checks that fail the given thresholds.
    pub fn failures(&self, pou_tol: f64, linear_tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.partition_of_unity <= pou_tol) {
            out.push(format!(
                "partition of unity residual {:e} > {pou_tol:e}",
                self.partition_of_unity
            ));
        }
        if !(self.linear_precision <= linear_tol) {
            out.push(format!(
                "linear precision residual {:e} > {linear_tol:e}",
                self.linear_precision
            ));
        }
        if !(self.vertex_interpolation <= 1e-9) {
            out.push(format!(
                "boundary vertex interpolation residual {:e} > 1e-9",
                self.vertex_interpolation
            ));
        }
        if self.interior_on_boundary != 0.0 {
            out.push(format!(
                "interior field nonzero on the boundary ({:e})",
                self.interior_on_boundary
            ));
        }
        if !(self.interior_weak_residual <= 1e-8) {
            out.push(format!(
                "interior weak residual {:e} > 1e-8",
                self.interior_weak_residual
            ));
        }
        out
    }
}

pub fn verify_gbc_identities(set: &GbcSet, samples: &[Point2]) -> Result<IdentityReport> {
    set.check_complete()?;
    let coarse = set.pair().coarse();
    let space = set.space();
    let mesh = space.mesh();
    let boundary: Vec<(Point2, &crate::fem::FeField)> = set
        .boundary_fields()
        .iter()
        .map(|(&v, f)| (coarse.vertex(v), f))
        .collect();

    let located: Vec<(Point2, usize, [f64; 3])> = samples
        .iter()
        .filter_map(|&p| match mesh.locate(p) {
            Location::Inside {
                triangle,
                barycentric,
            } => Some((p, triangle, barycentric)),
            Location::Outside => None,
        })
        .collect();

    let per_sample: Vec<[f64; 4]> = located
        .par_iter()
        .map(|&(p, t, b)| {
            let mut sum = 0.0;
            let mut lin = Point2::new(0.0, 0.0);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &(v, f) in &boundary {
                let s = f.eval_in(t, b);
                sum += s;
                lin = lin + s * v;
                lo = lo.min(s);
                hi = hi.max(s);
            }
            [(sum - 1.0).abs(), lin.distance(p), lo, hi]
        })
        .collect();
    let mut report = IdentityReport {
        samples: located.len(),
        partition_of_unity: 0.0,
        linear_precision: 0.0,
        min_boundary_value: f64::INFINITY,
        max_boundary_value: f64::NEG_INFINITY,
        vertex_interpolation: 0.0,
        interior_on_boundary: 0.0,
        interior_max_value: f64::NEG_INFINITY,
        interior_weak_residual: 0.0,
    };
    for r in per_sample {
        report.partition_of_unity = report.partition_of_unity.max(r[0]);
        report.linear_precision = report.linear_precision.max(r[1]);
        report.min_boundary_value = report.min_boundary_value.min(r[2]);
        report.max_boundary_value = report.max_boundary_value.max(r[3]);
    }

    for (&i, f) in set.boundary_fields() {
        for k in coarse.boundary_vertices() {
            let value = f.coefficients()[space.vertex_dof(k)];
            let expected = if k == i { 1.0 } else { 0.0 };
            report.vertex_interpolation = report.vertex_interpolation.max((value - expected).abs());
        }
    }

    let n = space.dof_count();
    let mut r_sum = vec![0.0; n];
    for f in set.interior_fields().values() {
        for (d, &c) in f.coefficients().iter().enumerate() {
            r_sum[d] += c;
            report.interior_max_value = report.interior_max_value.max(c);
            if space.is_boundary_dof(d) {
                report.interior_on_boundary = report.interior_on_boundary.max(c.abs());
            }
        }
    }
    if !set.interior_fields().is_empty() {
        let pair = set.pair();
        let load = assemble_load(space, space.degree() + 1, |t, _, b| {
            let parent = coarse.triangle(pair.fine_parent(t));
            let c = pair.coarse_coordinates(t, b);
            (0..3)
                .filter(|&k| !coarse.is_boundary_vertex(parent[k]))
                .map(|k| c[k])
                .sum()
        })?;
        let k = assemble_stiffness(space)?;
        let kr = k.mul_vec(&r_sum);
        report.interior_weak_residual = (0..n)
            .filter(|&d| !space.is_boundary_dof(d))
            .map(|d| (kr[d] + load[d]).abs())
            .fold(0.0, f64::max);
    }
    Ok(report)
}
