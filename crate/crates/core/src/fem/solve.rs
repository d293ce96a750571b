//! Dirichlet-condensed SPD solves: envelope Cholesky under reverse
//! Cuthill-McKee ordering, or Jacobi-preconditioned conjugate gradients.

use std::cell::Cell;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fem::sparse::{CooMatrix, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Cholesky,
    ConjugateGradient,
}

pub const CG_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    /// Relative residual target for conjugate gradients.
    pub tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kind: SolverKind::Cholesky,
            tolerance: CG_TOLERANCE,
        }
    }
}

impl SolverConfig {
    pub fn cg(tolerance: f64) -> Self {
        SolverConfig {
            kind: SolverKind::ConjugateGradient,
            tolerance,
        }
    }
}

/// Per-thread counts of factorizations and solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub factorizations: usize,
    pub solves: usize,
}

thread_local! {
    static STATS: Cell<SolverStats> = const { Cell::new(SolverStats { factorizations: 0, solves: 0 }) };
}

pub fn solver_stats() -> SolverStats {
    STATS.with(|s| s.get())
}

fn bump(f: impl FnOnce(&mut SolverStats)) {
    STATS.with(|s| {
        let mut v = s.get();
        f(&mut v);
        s.set(v);
    });
}

/// Reverse Cuthill-McKee ordering of a symmetric pattern. Returns the new
/// order as a list of old indices.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let degree = |v: usize| adj[v].len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree(v), v));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(adj, seed);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree(w), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    level
}

fn pseudo_peripheral(adj: &[Vec<usize>], seed: usize) -> usize {
    let mut current = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let level = bfs_levels(adj, current);
        let depth = level
            .iter()
            .copied()
            .filter(|&l| l != usize::MAX)
            .max()
            .unwrap_or(0);
        if depth <= ecc && current != seed {
            break;
        }
        ecc = depth;
        let candidate = (0..adj.len())
            .filter(|&v| level[v] == depth)
            .min_by_key(|&v| (adj[v].len(), v))
            .unwrap();
        if candidate == current {
            break;
        }
        current = candidate;
    }
    current
}

/// Envelope (skyline) Cholesky factor L of P A Pᵀ.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    n: usize,
    // perm[new] = old
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|r| a.row(r).0.iter().copied().filter(|&c| c != r).collect())
            .collect();
        let perm = reverse_cuthill_mckee(&adj);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for &c in a.row(old).0 {
                first[new] = first[new].min(inv[c]);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut values = vec![0.0; start[n]];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                if j <= new {
                    values[start[new] + j - first[new]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = values[start[i] + j - fi];
                let li = &values[start[i] + k0 - fi..start[i] + j - fi];
                let lj = &values[start[j] + k0 - fj..start[j] + j - fj];
                s -= li.iter().zip(lj).map(|(x, y)| x * y).sum::<f64>();
                if j < i {
                    let d = values[start[j + 1] - 1];
                    values[start[i] + j - fi] = s / d;
                } else {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite {
                            row: perm[i],
                            pivot: s,
                        });
                    }
                    values[start[i] + i - fi] = s.sqrt();
                }
            }
        }
        bump(|s| s.factorizations += 1);
        Ok(SkylineCholesky {
            n,
            perm,
            first,
            start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi]
                .iter()
                .zip(&y[fi..i])
                .map(|(l, v)| l * v)
                .sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (k, l) in (fi..i).zip(row) {
                y[k] -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Jacobi-preconditioned CG with relative residual tolerance `tol` and at
/// most `max_iter` iterations.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.nrows();
    let dinv: Vec<f64> = (0..n).map(|i| 1.0 / a.get(i, i)).collect();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        let ap = a.mul_vec(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= tol * bnorm {
            return Ok(x);
        }
        if it + 1 == max_iter {
            break;
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: norm(&r) / bnorm,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Debug)]
enum Backend {
    Cholesky(SkylineCholesky),
    Cg(f64),
}

/// A stiffness matrix condensed onto its free DOFs, factored once and then
/// reused for any number of right-hand sides and Dirichlet data.
#[derive(Clone, Debug)]
pub struct DirichletSolver {
    n: usize,
    free: Vec<usize>,
    free_block: CsrMatrix,
    // free rows, all columns; only fixed columns are stored
    coupling: CsrMatrix,
    backend: Backend,
}

impl DirichletSolver {
    /// `free[i]` marks DOF i as unknown; every other DOF takes its value
    /// from the Dirichlet data passed to [`DirichletSolver::solve`].
    pub fn new(k: &CsrMatrix, free: &[bool], config: SolverConfig) -> Result<Self> {
        let n = k.nrows();
        if free.len() != n || k.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, free mask has {} entries",
                n,
                k.ncols(),
                free.len()
            )));
        }
        let free_list: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        let mut index = vec![usize::MAX; n];
        for (f, &d) in free_list.iter().enumerate() {
            index[d] = f;
        }
        let m = free_list.len();
        let mut ff = CooMatrix::new(m, m);
        let mut fc = CooMatrix::new(m, n);
        for (f, &d) in free_list.iter().enumerate() {
            let (cols, vals) = k.row(d);
            for (&c, &v) in cols.iter().zip(vals) {
                if index[c] != usize::MAX {
                    ff.push(f, index[c], v);
                } else {
                    fc.push(f, c, v);
                }
            }
        }
        let free_block = ff.to_csr();
        let backend = match config.kind {
            SolverKind::Cholesky => Backend::Cholesky(SkylineCholesky::factor(&free_block)?),
            SolverKind::ConjugateGradient => Backend::Cg(config.tolerance),
        };
        Ok(DirichletSolver {
            n,
            free: free_list,
            free_block,
            coupling: fc.to_csr(),
            backend,
        })
    }

    pub fn dof_count(&self) -> usize {
        self.n
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn free_block(&self) -> &CsrMatrix {
        &self.free_block
    }

    /// Solves K u = load on the free DOFs with u = `dirichlet` elsewhere.
    pub fn solve(&self, load: &[f64], dirichlet: &[f64]) -> Result<Vec<f64>> {
        if load.len() != self.n || dirichlet.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "expected vectors of length {}, got {} and {}",
                self.n,
                load.len(),
                dirichlet.len()
            )));
        }
        let lifted = self.coupling.mul_vec(dirichlet);
        let rhs: Vec<f64> = self
            .free
            .iter()
            .zip(&lifted)
            .map(|(&d, l)| load[d] - l)
            .collect();
        let x = self.solve_free(&rhs)?;
        let mut u = dirichlet.to_vec();
        for (&d, v) in self.free.iter().zip(x) {
            u[d] = v;
        }
        bump(|s| s.solves += 1);
        Ok(u)
    }

    /// Solves the condensed system K_ff x = rhs directly.
    pub fn solve_free(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.backend {
            Backend::Cholesky(c) => Ok(c.solve(rhs)),
            Backend::Cg(tol) => {
                let dim = self.free.len();
                conjugate_gradient(&self.free_block, rhs, *tol, (10 * dim).max(10))
            }
        }
    }
}
