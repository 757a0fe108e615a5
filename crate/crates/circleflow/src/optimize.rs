//! Constrained minimization of the sharp functionals, symmetric-decreasing
//! rearrangement, and the interval Dirichlet-mass problem with its
//! closed-form solution and brute-force oracle.
//!
//! The interval problem: minimize `∫_{-r}^{r} w'² dy` over positive `w` with
//! `w(±r) = b` and `∫ w^{-2} = a`. The minimizer solves `w'' = τ w^{-3}`;
//! eliminating (τ, λ) through `β = arctan(r/λ)` (resp. `arctanh`) reduces the
//! transcendental system to the single monotone equation
//! `a b² = 4rβ/sin(2β)` (resp. `sinh`), which is solved by bisection.

use crate::error::{Error, Result};
use crate::functionals::{self, FunctionalKind};
use crate::spectral::{PeriodicFunction, POSITIVITY_FLOOR};

/// Data of the interval problem: mass `a`, boundary value `b`, half-length `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalProblem {
    pub a: f64,
    pub b: f64,
    pub r: f64,
}

impl LocalProblem {
    pub fn new(a: f64, b: f64, r: f64) -> Result<Self> {
        let ok = a > 0.0 && b > 0.0 && r > 0.0 && a.is_finite() && b.is_finite() && r.is_finite();
        if !ok {
            return Err(Error::InvalidInput(format!(
                "local problem needs positive finite (a, b, r), got ({a}, {b}, {r})"
            )));
        }
        Ok(Self { a, b, r })
    }
}

/// Which branch of the closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalCase {
    /// `a > 2r/b²`: τ > 0, minimizer dips below b.
    TauPos,
    /// `a < 2r/b²`: τ < 0, λ > r, minimizer bulges above b.
    TauNeg,
    /// `a = 2r/b²`: the constant b is admissible; infimum 0.
    Flat,
}

impl LocalCase {
    pub fn name(self) -> &'static str {
        match self {
            LocalCase::TauPos => "tau-positive",
            LocalCase::TauNeg => "tau-negative",
            LocalCase::Flat => "flat",
        }
    }
}

/// Closed-form solution of the interval problem.
#[derive(Debug, Clone, Copy)]
pub struct LocalSolution {
    pub problem: LocalProblem,
    pub case: LocalCase,
    /// Euler–Lagrange multiplier (0 in the flat case).
    pub tau: f64,
    /// Profile scale (infinite in the flat case).
    pub lambda: f64,
    pub infimum: f64,
}

impl LocalSolution {
    /// The minimizing profile at `y ∈ [-r, r]`.
    pub fn minimizer(&self, y: f64) -> f64 {
        match self.case {
            LocalCase::Flat => self.problem.b,
            LocalCase::TauPos => {
                self.tau.powf(0.25) * ((self.lambda * self.lambda + y * y) / self.lambda).sqrt()
            }
            LocalCase::TauNeg => {
                (-self.tau).powf(0.25) * ((self.lambda * self.lambda - y * y) / self.lambda).sqrt()
            }
        }
    }
}

/// Solve the interval problem in closed form.
pub fn solve_local(p: LocalProblem) -> Result<LocalSolution> {
    let LocalProblem { a, b, r } = p;
    let ab2 = a * b * b;
    let flat_gap = ab2 - 2.0 * r;
    if flat_gap.abs() <= 1e-13 * (ab2.abs() + 2.0 * r) {
        return Ok(LocalSolution {
            problem: p,
            case: LocalCase::Flat,
            tau: 0.0,
            lambda: f64::INFINITY,
            infimum: 0.0,
        });
    }
    let target = ab2 / (2.0 * r);
    if flat_gap > 0.0 {
        // 2β/sin(2β) = target on (0, π/2): strictly increasing from 1 to ∞.
        let h = |beta: f64| 2.0 * beta / (2.0 * beta).sin();
        let beta = bisect(h, 1e-12, std::f64::consts::FRAC_PI_2 - 1e-12, target, true)?;
        let lambda = r / beta.tan();
        let sqrt_tau = 2.0 * beta / a;
        let tau = sqrt_tau * sqrt_tau;
        let infimum = 2.0 * sqrt_tau * (r / lambda - (r / lambda).atan());
        Ok(LocalSolution {
            problem: p,
            case: LocalCase::TauPos,
            tau,
            lambda,
            infimum,
        })
    } else {
        // 2β/sinh(2β) = target on (0, ∞): strictly decreasing from 1 to 0.
        let h = |beta: f64| 2.0 * beta / (2.0 * beta).sinh();
        let mut hi = 1.0;
        while h(hi) > target {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::convergence(
                    "solve_local",
                    "no bracket for the arctanh branch",
                ));
            }
        }
        let beta = bisect(h, 1e-12, hi, target, false)?;
        let lambda = r / beta.tanh();
        let sqrt_tau = 2.0 * beta / a;
        let tau = -sqrt_tau * sqrt_tau;
        let infimum = 2.0 * sqrt_tau * (-r / lambda + (r / lambda).atanh());
        Ok(LocalSolution {
            problem: p,
            case: LocalCase::TauNeg,
            tau,
            lambda,
            infimum,
        })
    }
}

/// Bisection for h(β) = target on [lo, hi]; `increasing` gives the direction.
fn bisect(
    h: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    increasing: bool,
) -> Result<f64> {
    let (flo, fhi) = (h(lo), h(hi));
    let bracketed = if increasing {
        flo <= target && target <= fhi
    } else {
        fhi <= target && target <= flo
    };
    if !bracketed {
        return Err(Error::convergence(
            "solve_local",
            format!("target {target} outside bracket [{flo}, {fhi}]"),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let below = h(mid) < target;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brute-force oracle for the interval problem: minimize the discrete
/// Dirichlet energy on `m` interior nodes under the trapezoid mass
/// constraint, by augmented-Lagrangian gradient descent with
/// Barzilai–Borwein steps. Independent of the closed form.
pub fn local_oracle(p: LocalProblem, m: usize) -> Result<f64> {
    if m < 64 {
        return Err(Error::InvalidInput(format!(
            "oracle grid must be at least 64, got {m}"
        )));
    }
    let LocalProblem { a, b, r } = p;
    let h = 2.0 * r / (m + 1) as f64;
    let floor = 1e-8 * b;

    let energy = |w: &[f64]| -> f64 {
        let mut e = (w[0] - b).powi(2) + (b - w[m - 1]).powi(2);
        for i in 0..m - 1 {
            e += (w[i + 1] - w[i]).powi(2);
        }
        e / h
    };
    let mass = |w: &[f64]| -> f64 {
        let s: f64 = w.iter().map(|x| x.powi(-2)).sum();
        h * (s + 1.0 / (b * b))
    };
    let grad = |w: &[f64], mu: f64, rho: f64, g: &mut [f64]| -> f64 {
        let c = mass(w) - a;
        let lag = mu + rho * c;
        for i in 0..m {
            let left = if i == 0 { b } else { w[i - 1] };
            let right = if i == m - 1 { b } else { w[i + 1] };
            g[i] = (2.0 / h) * (2.0 * w[i] - left - right) - 2.0 * h * lag / w[i].powi(3);
        }
        c
    };

    // Start from a constant profile rescaled to roughly meet the mass.
    let interior_mass = a - h / (b * b);
    let mut w = if interior_mass > 0.0 {
        let s = (h * m as f64 / interior_mass).sqrt();
        vec![s.max(floor * 2.0); m]
    } else {
        vec![b; m]
    };

    let mut mu = 0.0;
    let mut rho = 10.0;
    let mut g = vec![0.0; m];
    let mut g_prev = vec![0.0; m];
    let mut w_prev = w.clone();
    let mut c_outer_prev = f64::INFINITY;

    for _outer in 0..60 {
        let mut step = 1e-3 * h;
        let mut _c = grad(&w, mu, rho, &mut g);
        for inner in 0..40_000 {
            let gnorm = g.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
            if gnorm < 1e-9 * (1.0 + energy(&w).abs() / r) {
                break;
            }
            if inner > 0 {
                // BB1 step from the last move.
                let mut sy = 0.0;
                let mut ss = 0.0;
                for i in 0..m {
                    let si = w[i] - w_prev[i];
                    let yi = g[i] - g_prev[i];
                    sy += si * yi;
                    ss += si * si;
                }
                if sy > 1e-300 {
                    step = (ss / sy).clamp(1e-12, 1e3);
                }
            }
            w_prev.copy_from_slice(&w);
            g_prev.copy_from_slice(&g);
            let mut t = step;
            for _ in 0..60 {
                let ok = w_prev
                    .iter()
                    .zip(&g_prev)
                    .all(|(wi, gi)| wi - t * gi > floor);
                if ok {
                    break;
                }
                t *= 0.5;
            }
            for i in 0..m {
                w[i] = w_prev[i] - t * g_prev[i];
            }
            _c = grad(&w, mu, rho, &mut g);
        }
        let c = mass(&w) - a;
        mu += rho * c;
        if c.abs() < 1e-10 * (1.0 + a) {
            return Ok(energy(&w));
        }
        if c.abs() > 0.25 * c_outer_prev {
            rho = (rho * 4.0).min(1e9);
        }
        c_outer_prev = c.abs();
    }
    Err(Error::convergence(
        "local_oracle",
        "augmented Lagrangian did not close the constraint",
    ))
}

/// Symmetric-decreasing rearrangement on the circle: the sorted values are
/// placed symmetrically about θ = 0, decreasing on [0, π]. The multiset of
/// nodal values is preserved exactly, hence so is every quadrature
/// `∫ u^p dθ`.
pub fn rearrange(u: &PeriodicFunction) -> PeriodicFunction {
    let n = u.len();
    let mut sorted = u.values().to_vec();
    sorted.sort_by(|x, y| y.partial_cmp(x).expect("finite values"));
    let mut out = vec![0.0; n];
    out[0] = sorted[0];
    for k in 1..n / 2 {
        out[k] = sorted[2 * k - 1];
        out[n - k] = sorted[2 * k];
    }
    out[n / 2] = sorted[n - 1];
    PeriodicFunction::from_values(out).expect("same grid")
}

/// Options for [`minimize`].
#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    /// Convergence tolerance on the sup-norm of the projected gradient,
    /// relative to (1 + |value|).
    pub grad_tol: f64,
    /// Moment constraints are kept below this absolute size.
    pub constraint_tol: f64,
    pub max_iters: usize,
    /// Record a history row every this many accepted iterates.
    pub history_stride: usize,
    /// Descend on log u instead of u (structural positivity).
    pub log_descent: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-7,
            constraint_tol: 1e-8,
            max_iters: 100_000,
            history_stride: 25,
            log_descent: false,
        }
    }
}

/// One history row of a minimization run.
#[derive(Debug, Clone, Copy)]
pub struct DescentRecord {
    pub iteration: usize,
    pub value: f64,
    pub grad_norm: f64,
    pub constraint_norm: f64,
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub minimizer: PeriodicFunction,
    pub value: f64,
    pub constraint_residuals: Vec<f64>,
    /// Normalized projections of the final gradient onto the constraint
    /// directions (the Lagrange multipliers, which vanish at true minima).
    pub multiplier_projections: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<DescentRecord>,
}

/// Newton-project u onto the moment-constraint set of `kind` (no-op for
/// unconstrained kinds).
pub fn project_onto_constraints(
    kind: FunctionalKind,
    u: &PeriodicFunction,
    tol: f64,
) -> Result<PeriodicFunction> {
    let constraints = functionals::constraint_set(kind);
    if constraints.is_empty() {
        return Ok(u.clone());
    }
    let mut u = u.clone();
    for _ in 0..80 {
        let res = functionals::constraint_residuals(kind, &u)?;
        if res.iter().all(|v| v.abs() < tol) {
            return Ok(u);
        }
        let grads = functionals::constraint_gradients(kind, &u)?;
        let k = grads.len();
        let mut gram = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                gram[i][j] = grads[i].inner(&grads[j]);
            }
        }
        let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        let mu = solve_dense(&gram, &rhs)
            .ok_or_else(|| Error::convergence("project_onto_constraints", "singular Gram matrix"))?;
        let mut candidate = u.clone();
        for (m, g) in mu.iter().zip(&grads) {
            candidate = candidate.add(&g.scale(*m));
        }
        // Damp the correction if it violates positivity.
        let mut damp = 1.0;
        while candidate.min() <= POSITIVITY_FLOOR && damp > 1e-8 {
            damp *= 0.5;
            candidate = u.clone();
            for (m, g) in mu.iter().zip(&grads) {
                candidate = candidate.add(&g.scale(*m * damp));
            }
        }
        if candidate.min() <= POSITIVITY_FLOOR {
            return Err(Error::positivity(
                "project_onto_constraints",
                candidate.min(),
                POSITIVITY_FLOOR,
            ));
        }
        u = candidate;
    }
    Err(Error::convergence(
        "project_onto_constraints",
        "moment correction did not converge",
    ))
}

/// Projected-gradient descent with Armijo backtracking and spectral
/// preconditioning. Constraint moments are maintained by tangent-space
/// projection of the search direction plus a Newton correction after every
/// step. The functional never increases between accepted iterates.
pub fn minimize(
    kind: FunctionalKind,
    u0: &PeriodicFunction,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    if kind == FunctionalKind::TotalQ {
        return Err(Error::InvalidInput(
            "total-q is not scale invariant; minimize the q functional instead".into(),
        ));
    }
    let m0 = u0.min();
    if m0 <= POSITIVITY_FLOOR {
        return Err(Error::positivity("minimize", m0, POSITIVITY_FLOOR));
    }
    let fourth_order = matches!(kind, FunctionalKind::SymQ | FunctionalKind::QCurv);

    let mut u = project_onto_constraints(kind, &u0.scale(1.0 / u0.max()), opts.constraint_tol)?;
    let mut value = functionals::evaluate(kind, &u)?;
    let mut history = Vec::new();
    let mut step = 1.0;
    // Previous iterate and direction for the Barzilai–Borwein trial step.
    let mut prev: Option<(PeriodicFunction, PeriodicFunction)> = None;

    let mut iterations = 0;
    loop {
        let grads = functionals::constraint_gradients(kind, &u)?;
        let g = functionals::gradient(kind, &u)?;
        let gt = project_tangent(&g, &grads);
        let grad_norm = gt.sup_norm();
        let res = functionals::constraint_residuals(kind, &u)?;
        let constraint_norm = res.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));

        if iterations % opts.history_stride == 0 {
            history.push(DescentRecord {
                iteration: iterations,
                value,
                grad_norm,
                constraint_norm,
            });
        }

        let scale = 1.0 + value.abs();
        if grad_norm <= opts.grad_tol * scale {
            return finish(kind, u, value, iterations, true, history);
        }
        if iterations >= opts.max_iters {
            return Err(Error::convergence(
                "minimize",
                format!(
                    "iteration cap {} reached at value {value:.9e}, grad {grad_norm:.3e}",
                    opts.max_iters
                ),
            ));
        }

        // Preconditioned direction, re-projected onto the tangent space.
        let effective = if opts.log_descent { gt.mul(&u) } else { gt };
        let d = project_tangent(&precondition(&effective, kind, fourth_order, &u)?, &grads);
        let slope = g.inner(&d);
        if slope <= 0.0 {
            return finish(kind, u, value, iterations, grad_norm <= 1e-4 * scale, history);
        }

        // Barzilai–Borwein trial step from the last accepted move, with the
        // grown Armijo step as fallback; backtracking keeps descent monotone.
        let mut s = step;
        if let Some((pu, pd)) = &prev {
            let su = u.sub(pu);
            let yd = d.sub(pd);
            let ss = su.inner(&su);
            let sy = su.inner(&yd);
            if sy > 1e-300 && ss > 0.0 {
                s = (ss / sy).clamp(1e-6, 1e4);
            }
        }
        prev = Some((u.clone(), d.clone()));
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = if opts.log_descent {
                u.mul(&d.scale(-s).map(f64::exp))
            } else {
                u.sub(&d.scale(s))
            };
            if candidate.min() <= POSITIVITY_FLOOR {
                s *= 0.5;
                continue;
            }
            let corrected = match project_onto_constraints(kind, &candidate, opts.constraint_tol) {
                Ok(c) => c,
                Err(_) => {
                    s *= 0.5;
                    continue;
                }
            };
            let new_value = functionals::evaluate(kind, &corrected)?;
            if new_value <= value - 1e-4 * s * slope {
                let renorm = corrected.scale(1.0 / corrected.max());
                value = functionals::evaluate(kind, &renorm)?;
                u = renorm;
                step = (s * 1.8).min(1e3);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // No further progress at this resolution; report honestly.
            let near = grad_norm <= 1e-3 * scale;
            return finish(kind, u, value, iterations, near, history);
        }
        iterations += 1;
    }
}

/// Remove the components of g along the constraint gradients.
fn project_tangent(g: &PeriodicFunction, grads: &[PeriodicFunction]) -> PeriodicFunction {
    if grads.is_empty() {
        return g.clone();
    }
    let k = grads.len();
    let mut gram = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = grads[i].inner(&grads[j]);
        }
        rhs[i] = grads[i].inner(g);
    }
    match solve_dense(&gram, &rhs) {
        Some(lam) => {
            let mut out = g.clone();
            for (l, d) in lam.iter().zip(grads) {
                out = out.sub(&d.scale(*l));
            }
            out
        }
        None => g.clone(),
    }
}

fn finish(
    kind: FunctionalKind,
    u: PeriodicFunction,
    value: f64,
    iterations: usize,
    converged: bool,
    mut history: Vec<DescentRecord>,
) -> Result<MinimizeResult> {
    let res = functionals::constraint_residuals(kind, &u)?;
    let g = functionals::gradient(kind, &u)?;
    let grads = functionals::constraint_gradients(kind, &u)?;
    let mut projections = Vec::with_capacity(grads.len());
    for d in &grads {
        projections.push(g.inner(d) / d.inner(d).sqrt().max(1e-300));
    }
    let gt_norm = project_tangent(&g, &grads).sup_norm();
    history.push(DescentRecord {
        iteration: iterations,
        value,
        grad_norm: gt_norm,
        constraint_norm: res.iter().fold(0.0f64, |mx, v| mx.max(v.abs())),
    });
    Ok(MinimizeResult {
        minimizer: u,
        value,
        constraint_residuals: res,
        multiplier_projections: projections,
        iterations,
        converged,
        history,
    })
}

/// Divide spectral mode k of g by the round-metric Hessian scale
/// `2·mass^m·(1 + k²)` (second-order kinds) or `2·mass^m·(1 + k⁴)`
/// (fourth-order kinds).
fn precondition(
    g: &PeriodicFunction,
    kind: FunctionalKind,
    fourth_order: bool,
    u: &PeriodicFunction,
) -> Result<PeriodicFunction> {
    let mass = match kind {
        FunctionalKind::BlaschkeSantalo | FunctionalKind::Yamabe => {
            crate::spectral::dealiased_integral(&[u], |x| x[0].powf(-2.0))?
        }
        _ => {
            let b = crate::spectral::dealiased_integral(&[u], |x| x[0].powf(-2.0 / 3.0))?;
            b * b * b
        }
    };
    let scale = 2.0 * mass.abs().max(1e-12);
    let mut c = g.to_coeffs();
    let weight = |k: f64| {
        if fourth_order {
            scale * (1.0 + k * k * k * k)
        } else {
            scale * (1.0 + k * k)
        }
    };
    c.c0 /= weight(0.0);
    for k in 1..=c.a.len() {
        c.a[k - 1] /= weight(k as f64);
        c.b[k - 1] /= weight(k as f64);
    }
    let half = (g.len() / 2) as f64;
    c.nyquist /= weight(half);
    c.to_function(g.len())
}

/// Gaussian elimination with partial pivoting for the small Gram systems.
fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot, pval) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|p, q| p.1.partial_cmp(&q.1).unwrap())?;
        if pval < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        x.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        for k in col + 1..n {
            let xk = x[k];
            x[col] -= m[col][k] * xk;
        }
        x[col] /= m[col][col];
    }
    Some(x)
}
