//! Ring-wise decay of coordinate fields and local-versus-global error tables.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gbc::{FieldId, GbcEngine, GbcSet};
use crate::geometry::Point2;
use crate::mesh::{StarCenter, Triangulation};
use crate::sampling::SampleGrid;

/// Maxima below this count as zero.
pub const NEGLIGIBLE: f64 = 1e-12;

const FIT_WINDOW_MIN_END: usize = 4;

/// Which mesh supplies the star rings used for bucketing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingMesh {
    Coarse,
    /// Used when the coarse mesh saturates in fewer than three rings.
    Fine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub field: FieldId,
    pub ring_mesh: RingMesh,
    /// (k, max |field| over fine vertices in ring k)
    pub ring_maxima: Vec<(usize, f64)>,
    /// Ratios a_{k+1}/a_k between consecutive rings with positive maxima.
    pub ratios: Vec<f64>,
    /// Geometric mean of the ratios; `None` with fewer than 3 positive rings.
    pub sigma: Option<f64>,
    pub k_fit: Option<f64>,
    /// Set when some ratio exceeds 1.
    pub growth_flagged: bool,
    pub linear_fit_residual: Option<f64>,
    pub geometric_fit_residual: Option<f64>,
    /// A straight line fits the maxima better than a geometric sequence,
    /// over rings 2 to max(⌊0.6 L⌋, 4) with L the last positive ring.
    pub sub_exponential: bool,
}

impl DecayReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("ring,max_abs_value\n");
        for (k, v) in &self.ring_maxima {
            writeln!(s, "{k},{v:?}").unwrap();
        }
        s
    }

    pub fn maxima(&self) -> Vec<f64> {
        self.ring_maxima.iter().map(|r| r.1).collect()
    }
}

/// Ring index of every fine vertex: the smallest ring among its incident
/// triangles, with rings taken from `ring_mesh`.
fn fine_vertex_rings(set: &GbcSet, v: usize) -> Result<(RingMesh, Vec<usize>)> {
    let pair = set.pair();
    let coarse = pair.coarse();
    let fine = pair.fine();
    let coarse_rings = coarse.triangle_rings(StarCenter::Vertex(v))?;
    let sat = coarse_rings.iter().copied().max().unwrap_or(1);
    let (mesh, tri_ring): (RingMesh, Vec<usize>) = if sat >= 3 || pair.refinements() == 0 {
        let r = (0..fine.triangle_count())
            .map(|t| coarse_rings[pair.fine_parent(t)])
            .collect();
        (RingMesh::Coarse, r)
    } else {
        (RingMesh::Fine, fine.triangle_rings(StarCenter::Vertex(v))?)
    };
    Ok((mesh, vertex_min(fine, &tri_ring)))
}

fn vertex_min(mesh: &Triangulation, tri_ring: &[usize]) -> Vec<usize> {
    (0..mesh.vertex_count())
        .map(|w| {
            mesh.vertex_to_triangles(w)
                .iter()
                .map(|&t| tri_ring[t])
                .min()
                .unwrap()
        })
        .collect()
}

pub fn measure_decay(set: &GbcSet, id: FieldId) -> Result<DecayReport> {
    let field = set.field(id).ok_or(Error::MissingField(id.vertex()))?;
    let (ring_mesh, rings) = fine_vertex_rings(set, id.vertex())?;
    let space = set.space();
    let last = rings.iter().copied().max().unwrap_or(1);
    let mut maxima = vec![0.0f64; last + 1];
    for (w, &k) in rings.iter().enumerate() {
        let value = field.coefficients()[space.vertex_dof(w)].abs();
        maxima[k] = maxima[k].max(value);
    }
    let ring_maxima: Vec<(usize, f64)> = (1..=last).map(|k| (k, maxima[k])).collect();
    Ok(decay_from_maxima(id, ring_mesh, ring_maxima))
}

/// σ, fits and flags for a given ring-maxima sequence.
pub fn decay_from_maxima(
    field: FieldId,
    ring_mesh: RingMesh,
    ring_maxima: Vec<(usize, f64)>,
) -> DecayReport {
    let positive: Vec<(usize, f64)> = ring_maxima
        .iter()
        .copied()
        .filter(|r| r.1 > NEGLIGIBLE)
        .collect();
    let ratios: Vec<f64> = positive
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| w[1].1 / w[0].1)
        .collect();
    let growth_flagged = ratios.iter().any(|&r| r > 1.0);
    let (sigma, k_fit) = if positive.len() >= 3 && !ratios.is_empty() {
        let log_sigma = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
        let log_k = positive
            .iter()
            .map(|&(k, a)| a.ln() - k as f64 * log_sigma)
            .sum::<f64>()
            / positive.len() as f64;
        (Some(log_sigma.exp()), Some(log_k.exp()))
    } else {
        (None, None)
    };
    // Rings close to saturation feel the domain boundary and collapse faster
    // than either model, so the fits stop at 60% of the last positive ring.
    let last = positive.last().map_or(0, |r| r.0);
    let window_end = (last * 3 / 5).max(FIT_WINDOW_MIN_END);
    let tail: Vec<(f64, f64)> = positive
        .iter()
        .filter(|r| r.0 >= 2 && r.0 <= window_end)
        .map(|&(k, a)| (k as f64, a))
        .collect();
    let (linear_fit_residual, geometric_fit_residual) = if tail.len() >= 3 {
        let norm = tail.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
        let (c0, c1) = least_squares(&tail);
        let lin = tail
            .iter()
            .map(|&(k, a)| (a - c0 - c1 * k).powi(2))
            .sum::<f64>()
            .sqrt();
        let logs: Vec<(f64, f64)> = tail.iter().map(|&(k, a)| (k, a.ln())).collect();
        let (g0, g1) = least_squares(&logs);
        let geo = tail
            .iter()
            .map(|&(k, a)| (a - (g0 + g1 * k).exp()).powi(2))
            .sum::<f64>()
            .sqrt();
        (Some(lin / norm), Some(geo / norm))
    } else {
        (None, None)
    };
    let sub_exponential = match (linear_fit_residual, geometric_fit_residual) {
        (Some(l), Some(g)) => l < g,
        _ => false,
    };
    DecayReport {
        field,
        ring_mesh,
        ring_maxima,
        ratios,
        sigma,
        k_fit,
        growth_flagged,
        linear_fit_residual,
        geometric_fit_residual,
        sub_exponential,
    }
}

/// Intercept and slope of the least-squares line through `pts`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeBoorCheck {
    pub c: f64,
    /// a_m ≥ c Σ_{j≥m} a_j for every m
    pub condition_holds: bool,
    pub first_violation: Option<usize>,
    /// 1 − c when the condition holds
    pub lambda: Option<f64>,
    /// a_m ≤ a_0 λ^m / c for every m (checked only when the condition holds)
    pub bound_holds: bool,
}

impl DeBoorCheck {
    pub fn passed(&self) -> bool {
        self.condition_holds && self.bound_holds
    }
}

pub fn deboor_check(seq: &[f64], c: f64) -> DeBoorCheck {
    let valid_c = c > 0.0 && c < 1.0;
    let mut tail = 0.0;
    let mut tails = vec![0.0; seq.len()];
    for m in (0..seq.len()).rev() {
        tail += seq[m];
        tails[m] = tail;
    }
    let first_violation = if valid_c {
        (0..seq.len()).find(|&m| seq[m] < 0.0 || seq[m] < c * tails[m] * (1.0 - 1e-12))
    } else {
        Some(0)
    };
    let condition_holds = first_violation.is_none();
    let lambda = condition_holds.then_some(1.0 - c);
    let bound_holds = match lambda {
        Some(l) => seq
            .iter()
            .enumerate()
            .all(|(m, &a)| a <= seq[0] * l.powi(m as i32) / c * (1.0 + 1e-12)),
        None => false,
    };
    DeBoorCheck {
        c,
        condition_holds,
        first_violation,
        lambda,
        bound_holds,
    }
}

/// min_m a_m / Σ_{j≥m} a_j over terms with a positive tail, when it lies in (0, 1).
pub fn observed_deboor_constant(seq: &[f64]) -> Option<f64> {
    let mut tail = 0.0;
    let mut best = f64::INFINITY;
    for &a in seq.iter().rev() {
        tail += a;
        if tail > 0.0 {
            best = best.min(a / tail);
        }
    }
    (best > 0.0 && best < 1.0).then_some(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalityRow {
    pub ring: usize,
    pub max_error: f64,
    /// error(k) / error(previous row)
    pub rate: Option<f64>,
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalityTable {
    pub field: FieldId,
    pub grid: usize,
    pub samples: usize,
    pub saturation_ring: usize,
    pub rows: Vec<LocalityRow>,
}

impl LocalityTable {
    pub fn csv(&self) -> String {
        let mut s = String::from("ring,max_error,rate\n");
        for r in &self.rows {
            let rate = r.rate.map(|x| format!("{x:?}")).unwrap_or_default();
            writeln!(s, "{},{:?},{}", r.ring, r.max_error, rate).unwrap();
        }
        s
    }

    /// Mean of the rate column over rows with ring in `from..=to`.
    pub fn mean_rate(&self, from: usize, to: usize) -> Option<f64> {
        let rates: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.ring >= from && r.ring <= to)
            .filter_map(|r| r.rate)
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].max_error <= w[0].max_error)
    }
}

/// Max grid deviation of the k-local field from the global one, for each k.
pub fn local_vs_global_table(
    engine: &GbcEngine,
    center: usize,
    rings: &[usize],
    grid: &SampleGrid,
) -> Result<LocalityTable> {
    if rings.is_empty() || rings.contains(&0) || rings.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "rings must be positive and strictly ascending, got {rings:?}"
        )));
    }
    let id = engine.field_id(center)?;
    let global = engine.solve_gbc(id)?;
    let saturation_ring = engine
        .pair()
        .coarse()
        .saturation_ring(StarCenter::Vertex(center))?;
    let errors: Vec<(f64, bool)> = rings
        .par_iter()
        .map(|&k| {
            let local = engine.solve_local_gbc(center, k)?;
            Ok((grid.max_difference(&local.field, &global), local.saturated))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<LocalityRow> = Vec::with_capacity(rings.len());
    for (&ring, &(max_error, saturated)) in rings.iter().zip(&errors) {
        let rate = rows
            .last()
            .and_then(|p| (p.max_error > 0.0).then(|| max_error / p.max_error));
        rows.push(LocalityRow {
            ring,
            max_error,
            rate,
            saturated,
        });
    }
    Ok(LocalityTable {
        field: id,
        grid: grid.resolution(),
        samples: grid.len(),
        saturation_ring,
        rows,
    })
}

/// Coarse boundary vertex nearest the midpoint of the first polygon edge
/// (vertices 0 and 1), lowest index on ties.
pub fn default_boundary_center(coarse: &Triangulation) -> usize {
    let target = coarse.vertex(0).midpoint(coarse.vertex(1));
    nearest(coarse, target, coarse.boundary_vertices())
}

/// Coarse interior vertex nearest the area centroid of the mesh.
pub fn default_interior_center(coarse: &Triangulation) -> Option<usize> {
    let interior = coarse.interior_vertices();
    if interior.is_empty() {
        return None;
    }
    let mut c = Point2::new(0.0, 0.0);
    for t in 0..coarse.triangle_count() {
        let [a, b, d] = coarse.triangle_points(t);
        let w = coarse.triangle_area(t) / 3.0;
        c = c + w * (a + b + d);
    }
    let c = (1.0 / coarse.area()) * c;
    Some(nearest(coarse, c, interior))
}

fn nearest(mesh: &Triangulation, p: Point2, candidates: Vec<usize>) -> usize {
    candidates
        .into_iter()
        .min_by(|&a, &b| {
            mesh.vertex(a)
                .distance(p)
                .total_cmp(&mesh.vertex(b).distance(p))
                .then(a.cmp(&b))
        })
        .expect("candidate list is not empty")
}
