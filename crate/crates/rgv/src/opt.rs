//! Small numerical building blocks shared by the exponent solvers: stable
//! log-sum-exp, golden-section line search, Euclidean simplex projection,
//! compass (pattern) search over low-dimensional feasible sets, a log-domain
//! Sinkhorn scaler for entropy-regularized couplings, and bisection.

/// Numerically stable `log(sum(exp(v)))` over finite and `-inf` entries.
pub fn logsumexp(vals: &[f64]) -> f64 {
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if m.is_infinite() {
        return m;
    }
    let s: f64 = vals.iter().map(|&v| (v - m).exp()).sum();
    m + s.ln()
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
/// Returns the located point and value.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    if f1 >= f2 && f1 >= fm {
        (x1, f1)
    } else if f2 >= fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
pub fn golden_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, negv) = golden_max(|t| -f(t), a, b, tol);
    (x, -negv)
}

/// Euclidean projection of `x` onto the simplex `{v >= 0, sum v = total}`.
pub fn project_simplex(x: &mut [f64], total: f64) {
    let n = x.len();
    if n == 0 {
        return;
    }
    let mut u: Vec<f64> = x.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - total) / (i + 1) as f64;
        if ui - t > 0.0 {
            rho = i + 1;
            theta = t;
        }
    }
    debug_assert!(rho > 0);
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Compass (pattern) search minimizing `f` over a feasible set described by
/// `f` itself returning `None` off the set. Directions are the signed axes
/// plus all sign diagonals, which copes with kinks of convex objectives.
pub fn compass_min(
    f: &dyn Fn(&[f64]) -> Option<f64>,
    x0: &[f64],
    step0: f64,
    step_min: f64,
    max_iter: usize,
) -> Option<(Vec<f64>, f64)> {
    let dim = x0.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        let mut d = vec![0.0; dim];
        d[i] = 1.0;
        dirs.push(d.clone());
        d[i] = -1.0;
        dirs.push(d);
    }
    if dim > 1 && dim <= 5 {
        let norm = 1.0 / (dim as f64).sqrt();
        for mask in 0..(1usize << dim) {
            let d: Vec<f64> = (0..dim)
                .map(|i| if mask >> i & 1 == 1 { norm } else { -norm })
                .collect();
            dirs.push(d);
        }
    }

    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut step = step0;
    for _ in 0..max_iter {
        let mut improved = false;
        for d in &dirs {
            let cand: Vec<f64> = x.iter().zip(d).map(|(&xi, &di)| xi + step * di).collect();
            if let Some(fc) = f(&cand) {
                if fc < fx - 1e-15 {
                    x = cand;
                    fx = fc;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < step_min {
                break;
            }
        }
    }
    Some((x, fx))
}

/// Log-domain Sinkhorn scaling: returns the coupling minimizing
/// `KL(pi || p (x) p) + lambda * <cost, pi>` over couplings with both
/// marginals equal to `p`. `cost` is row-major `n x n`.
pub fn sinkhorn_coupling(p: &[f64], cost: &[f64], lambda: f64) -> Vec<f64> {
    let n = p.len();
    let supp: Vec<usize> = (0..n).filter(|&i| p[i] > 0.0).collect();
    let logp: Vec<f64> = p
        .iter()
        .map(|&v| if v > 0.0 { v.ln() } else { 0.0 })
        .collect();
    // kernel: log p_i + log p_j - lambda * cost_ij  (support only)
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let m = |i: usize, j: usize| logp[i] + logp[j] - lambda * cost[i * n + j];
    let mut buf = vec![0.0; supp.len()];
    for _ in 0..20_000 {
        let mut delta: f64 = 0.0;
        for &i in &supp {
            for (t, &j) in supp.iter().enumerate() {
                buf[t] = v[j] + m(i, j);
            }
            let new_u = logp[i] - logsumexp(&buf);
            delta = delta.max((new_u - u[i]).abs());
            u[i] = new_u;
        }
        for &j in &supp {
            for (t, &i) in supp.iter().enumerate() {
                buf[t] = u[i] + m(i, j);
            }
            let new_v = logp[j] - logsumexp(&buf);
            delta = delta.max((new_v - v[j]).abs());
            v[j] = new_v;
        }
        if delta < 1e-14 {
            break;
        }
    }
    let mut pi = vec![0.0; n * n];
    for &i in &supp {
        for &j in &supp {
            pi[i * n + j] = (u[i] + v[j] + m(i, j)).exp();
        }
    }
    pi
}

/// The polytope of joints over `X x X` with both marginals pinned to `p`,
/// parametrized by the top-left `(n-1) x (n-1)` block.
#[derive(Debug, Clone)]
pub struct MarginalPolytope {
    p: Vec<f64>,
    n: usize,
}

impl MarginalPolytope {
    pub fn new(p: &[f64]) -> Self {
        Self {
            p: p.to_vec(),
            n: p.len(),
        }
    }

    pub fn dim(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    /// Reconstructs the full joint from free coordinates, or `None` when any
    /// implied entry would be negative.
    pub fn point(&self, z: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        debug_assert_eq!(z.len(), self.dim());
        let mut pi = vec![0.0; n * n];
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let v = z[i * (n - 1) + j];
                if v < -1e-12 {
                    return None;
                }
                pi[i * n + j] = v.max(0.0);
            }
        }
        // last column and last row from the marginals
        let mut last_row_total = self.p[n - 1];
        for i in 0..n - 1 {
            let mut row: f64 = 0.0;
            for j in 0..n - 1 {
                row += pi[i * n + j];
            }
            let rem = self.p[i] - row;
            if rem < -1e-12 {
                return None;
            }
            pi[i * n + (n - 1)] = rem.max(0.0);
        }
        for j in 0..n - 1 {
            let mut col: f64 = 0.0;
            for i in 0..n - 1 {
                col += pi[i * n + j];
            }
            let rem = self.p[j] - col;
            if rem < -1e-12 {
                return None;
            }
            pi[(n - 1) * n + j] = rem.max(0.0);
            last_row_total -= pi[(n - 1) * n + j];
        }
        // corner cell closes both the last row and last column
        let mut corner_col = self.p[n - 1];
        for i in 0..n - 1 {
            corner_col -= pi[i * n + (n - 1)];
        }
        if last_row_total < -1e-12 || (last_row_total - corner_col).abs() > 1e-9 {
            return None;
        }
        pi[(n - 1) * n + (n - 1)] = last_row_total.max(0.0);
        Some(pi)
    }

    pub fn coords(&self, pi: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = vec![0.0; self.dim()];
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                z[i * (n - 1) + j] = pi[i * n + j];
            }
        }
        z
    }

    /// Independent coupling `p (x) p`, always feasible.
    pub fn center(&self) -> Vec<f64> {
        let n = self.n;
        let mut pi = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                pi[i * n + j] = self.p[i] * self.p[j];
            }
        }
        pi
    }

    /// Per-coordinate upper bounds (coordinate `(i, j)` is at most
    /// `min(p_i, p_j)`), used to scale search steps and grids.
    pub fn coord_bounds(&self) -> Vec<f64> {
        let n = self.n;
        let mut b = Vec::with_capacity(self.dim());
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                b.push(self.p[i].min(self.p[j]));
            }
        }
        b
    }
}
