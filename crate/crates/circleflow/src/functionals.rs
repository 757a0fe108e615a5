//! The sharp-inequality functionals, their moment constraints, and analytic
//! gradients.
//!
//! Each functional is a product `A(u)·B(u)^m` of a quadratic form in u and a
//! power of a negative-power mass:
//!
//! * `J(u)   = ∫(u_θ² − u²) · ∫u^{-2}`            ≥ −4π² on the moment-constrained cone;
//! * `Y(u)   = ∫(u_θ² − u²/4) · ∫u^{-2}`          ≥ −π²  unconstrained;
//! * `𝐅(u)  = ∫(u_θθ² − 10u_θ² + 9u²)·(∫u^{-2/3})³ ≥ C₀ > 0 on its constrained cone;
//! * `F(u)   = ∫(u_θθ² − (5/2)u_θ² + (9/16)u²)·(∫u^{-2/3})³ ≥ 9π⁴ unconstrained;
//! * `TotalQ(u) = (1/9)∫(16u_θθ² − 40u_θ² + 9u²)` — the total Q-curvature
//!   ∫Q dS of the metric with factor u, in integrated-by-parts form.
//!
//! Gradients are exact gradients of the discrete functionals (same spectral
//! derivative and dealiased quadrature as the evaluation path), so central
//! differences of `evaluate` match `gradient` to roundoff-limited accuracy.

use crate::error::{Error, Result};
use crate::spectral::{dealiased_map, oversampled_len, PeriodicFunction, POSITIVITY_FLOOR};
use std::f64::consts::PI;

/// Which functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionalKind {
    /// Blaschke–Santaló-type product; sharp constant −4π².
    BlaschkeSantalo,
    /// Yamabe-type product; sharp constant −π².
    Yamabe,
    /// Symmetric-Q product; positive infimum, conjectured 144π⁴.
    SymQ,
    /// Q-curvature product; sharp constant 9π⁴.
    QCurv,
    /// Total Q-curvature at fixed factor (not scale-invariant).
    TotalQ,
}

impl FunctionalKind {
    pub const ALL_SHARP: [FunctionalKind; 4] = [
        FunctionalKind::BlaschkeSantalo,
        FunctionalKind::Yamabe,
        FunctionalKind::SymQ,
        FunctionalKind::QCurv,
    ];

    /// The sharp (or conjectured) lower bound for the product functionals.
    pub fn reference_constant(self) -> Option<f64> {
        match self {
            FunctionalKind::BlaschkeSantalo => Some(-4.0 * PI * PI),
            FunctionalKind::Yamabe => Some(-PI * PI),
            FunctionalKind::QCurv => Some(9.0 * PI.powi(4)),
            // Conjectured, not proven; reported as evidence only.
            FunctionalKind::SymQ => Some(144.0 * PI.powi(4)),
            FunctionalKind::TotalQ => None,
        }
    }

    /// True when the reference constant is only conjectured.
    pub fn constant_is_conjectural(self) -> bool {
        matches!(self, FunctionalKind::SymQ)
    }

    pub fn name(self) -> &'static str {
        match self {
            FunctionalKind::BlaschkeSantalo => "blaschke-santalo",
            FunctionalKind::Yamabe => "yamabe",
            FunctionalKind::SymQ => "sym-q",
            FunctionalKind::QCurv => "q",
            FunctionalKind::TotalQ => "total-q",
        }
    }
}

/// Quadratic-form coefficients (c4, c2, c0) meaning `∫(c4·u_θθ² + c2·u_θ² +
/// c0·u²)`, plus mass exponent and mass power.
struct Shape {
    c4: f64,
    c2: f64,
    c0: f64,
    /// Exponent inside the mass factor: ∫u^{mass_exp}.
    mass_exp: f64,
    /// Power on the mass factor.
    mass_pow: i32,
}

fn shape(kind: FunctionalKind) -> Shape {
    match kind {
        FunctionalKind::BlaschkeSantalo => Shape {
            c4: 0.0,
            c2: 1.0,
            c0: -1.0,
            mass_exp: -2.0,
            mass_pow: 1,
        },
        FunctionalKind::Yamabe => Shape {
            c4: 0.0,
            c2: 1.0,
            c0: -0.25,
            mass_exp: -2.0,
            mass_pow: 1,
        },
        FunctionalKind::SymQ => Shape {
            c4: 1.0,
            c2: -10.0,
            c0: 9.0,
            mass_exp: -2.0 / 3.0,
            mass_pow: 3,
        },
        FunctionalKind::QCurv => Shape {
            c4: 1.0,
            c2: -2.5,
            c0: 9.0 / 16.0,
            mass_exp: -2.0 / 3.0,
            mass_pow: 3,
        },
        FunctionalKind::TotalQ => Shape {
            c4: 16.0 / 9.0,
            c2: -40.0 / 9.0,
            c0: 1.0,
            mass_exp: 0.0,
            mass_pow: 0,
        },
    }
}

fn require_positive(u: &PeriodicFunction, context: &'static str) -> Result<()> {
    let m = u.min();
    if m <= POSITIVITY_FLOOR {
        return Err(Error::positivity(context, m, POSITIVITY_FLOOR));
    }
    Ok(())
}

/// Quadratic part `∫(c4 u_θθ² + c2 u_θ² + c0 u²) dθ`.
fn quadratic_part(u: &PeriodicFunction, s: &Shape) -> Result<f64> {
    let du = u.differentiate(1)?;
    let mut acc = s.c2 * du.inner(&du) + s.c0 * u.inner(u);
    if s.c4 != 0.0 {
        let d2u = u.differentiate(2)?;
        acc += s.c4 * d2u.inner(&d2u);
    }
    Ok(acc)
}

/// Derivative of the quadratic part: `2(c4 u⁗ − c2 u″ ... )` — formally
/// `2(c4 D₂ᵀD₂ + c2 DᵀD + c0) u` with the same discrete operators as the
/// evaluation, i.e. `2(c4 (D²)² u − c2 D² u + c0 u)` using D² = D∘D.
fn quadratic_gradient(u: &PeriodicFunction, s: &Shape) -> Result<PeriodicFunction> {
    let d2 = u.differentiate(1)?.differentiate(1)?;
    let mut acc = d2.scale(-s.c2).add(&u.scale(s.c0));
    if s.c4 != 0.0 {
        let d4 = u
            .differentiate(2)?
            .differentiate(2)?;
        acc = acc.add(&d4.scale(s.c4));
    }
    Ok(acc.scale(2.0))
}

/// Mass factor `∫ u^{mass_exp} dθ` with dealiased quadrature.
fn mass_part(u: &PeriodicFunction, s: &Shape) -> Result<f64> {
    if s.mass_pow == 0 {
        return Ok(0.0);
    }
    let p = s.mass_exp;
    crate::spectral::dealiased_integral(&[u], |x| x[0].powf(p))
}

/// Evaluate the functional.
pub fn evaluate(kind: FunctionalKind, u: &PeriodicFunction) -> Result<f64> {
    require_positive(u, "evaluate")?;
    let s = shape(kind);
    let quad = quadratic_part(u, &s)?;
    if s.mass_pow == 0 {
        return Ok(quad);
    }
    let mass = mass_part(u, &s)?;
    Ok(quad * mass.powi(s.mass_pow))
}

/// Analytic L²(dθ) gradient of the full product functional. Stationary
/// points satisfy the corresponding Euler–Lagrange equation with the
/// homogeneity multiplier already absorbed.
pub fn gradient(kind: FunctionalKind, u: &PeriodicFunction) -> Result<PeriodicFunction> {
    require_positive(u, "gradient")?;
    let s = shape(kind);
    let dquad = quadratic_gradient(u, &s)?;
    if s.mass_pow == 0 {
        return Ok(dquad);
    }
    let quad = quadratic_part(u, &s)?;
    let mass = mass_part(u, &s)?;
    // d/du [quad·mass^m] = quad'·mass^m + quad·m·mass^{m-1}·mass'.
    let p = s.mass_exp;
    let dmass = dealiased_map(&[u], |x| p * x[0].powf(p - 1.0))?;
    let m = s.mass_pow as f64;
    Ok(dquad
        .scale(mass.powi(s.mass_pow))
        .add(&dmass.scale(quad * m * mass.powi(s.mass_pow - 1))))
}

/// The moment constraints defining the symmetric cones: weights times a
/// negative power of u.
#[derive(Debug, Clone, Copy)]
pub struct MomentConstraint {
    /// Harmonic index of the weight.
    pub harmonic: u32,
    /// Cosine (false) or sine (true) weight.
    pub sine: bool,
    /// Exponent e in `∫ weight · u^{-e} dθ = 0`.
    pub exponent: f64,
}

impl MomentConstraint {
    fn weight(&self, theta: f64) -> f64 {
        let x = self.harmonic as f64 * theta;
        if self.sine {
            x.sin()
        } else {
            x.cos()
        }
    }
}

/// Constraint set for a functional kind. The full rotation families reduce
/// to finitely many moments: two for the Blaschke–Santaló cone, four for the
/// symmetric-Q cone (via `cos³x = (3cos x + cos 3x)/4`).
pub fn constraint_set(kind: FunctionalKind) -> Vec<MomentConstraint> {
    match kind {
        FunctionalKind::BlaschkeSantalo => vec![
            MomentConstraint {
                harmonic: 1,
                sine: false,
                exponent: 3.0,
            },
            MomentConstraint {
                harmonic: 1,
                sine: true,
                exponent: 3.0,
            },
        ],
        FunctionalKind::SymQ => vec![
            MomentConstraint {
                harmonic: 3,
                sine: false,
                exponent: 5.0 / 3.0,
            },
            MomentConstraint {
                harmonic: 3,
                sine: true,
                exponent: 5.0 / 3.0,
            },
            MomentConstraint {
                harmonic: 1,
                sine: false,
                exponent: 5.0 / 3.0,
            },
            MomentConstraint {
                harmonic: 1,
                sine: true,
                exponent: 5.0 / 3.0,
            },
        ],
        _ => Vec::new(),
    }
}

/// Values of the moment constraints at u (empty for unconstrained kinds).
pub fn constraint_residuals(kind: FunctionalKind, u: &PeriodicFunction) -> Result<Vec<f64>> {
    require_positive(u, "constraint_residuals")?;
    constraint_set(kind)
        .iter()
        .map(|c| {
            crate::extremals::weighted_negative_moment(u, c.exponent, |t| c.weight(t))
        })
        .collect()
}

/// L²(dθ) gradients of the moment constraints at u.
pub fn constraint_gradients(
    kind: FunctionalKind,
    u: &PeriodicFunction,
) -> Result<Vec<PeriodicFunction>> {
    require_positive(u, "constraint_gradients")?;
    let n = u.len();
    let m = oversampled_len(n);
    constraint_set(kind)
        .iter()
        .map(|c| {
            let e = c.exponent;
            // d/du ∫ w u^{-e} = −e w u^{-e-1}; evaluated on the oversampled
            // grid with the weight sampled there, then truncated back, which
            // is the exact adjoint of the dealiased moment quadrature.
            let fine = u.resample(m)?;
            let vals: Vec<f64> = fine
                .values()
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let t = crate::spectral::node(m, j);
                    -e * c.weight(t) * v.powf(-e - 1.0)
                })
                .collect();
            PeriodicFunction::from_values(vals)?.resample(n)
        })
        .collect()
}

/// Quadratic part of the Q-curvature functional from Fourier coefficients,
/// together with its coercivity minorant
/// `(π/4)Σ_{k≥2} k⁴(a_k²+b_k²) + (9π/8)c₀²`.
///
/// Requires vanishing first harmonics; returns `(lhs, rhs)` with `lhs ≥ rhs`.
pub fn fourier_lower_bound(u: &PeriodicFunction) -> Result<(f64, f64)> {
    let coeffs = u.to_coeffs();
    if coeffs.a[0].abs() > 1e-9 || coeffs.b[0].abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "fourier_lower_bound needs vanishing first harmonics, got a1={:.3e}, b1={:.3e}",
            coeffs.a[0], coeffs.b[0]
        )));
    }
    let mut lhs = (9.0 * PI / 8.0) * coeffs.c0 * coeffs.c0;
    let mut rhs = lhs;
    for k in 2..=coeffs.a.len() {
        let kk = (k * k) as f64;
        let k4 = kk * kk;
        let energy = coeffs.a[k - 1].powi(2) + coeffs.b[k - 1].powi(2);
        lhs += PI * (k4 - 2.5 * kk + 9.0 / 16.0) * energy;
        rhs += (PI / 4.0) * k4 * energy;
    }
    let half = u.len() / 2;
    let kk = (half * half) as f64;
    let k4 = kk * kk;
    let energy = coeffs.nyquist * coeffs.nyquist;
    lhs += PI * (k4 - 2.5 * kk + 9.0 / 16.0) * energy;
    rhs += (PI / 4.0) * k4 * energy;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use crate::extremals::{ExtremalParams, Family};
    use crate::transforms;

    const N: usize = 256;

    fn one() -> PeriodicFunction {
        PeriodicFunction::constant(N, 1.0).unwrap()
    }

    #[test]
    fn round_values() {
        let u = one();
        let j = evaluate(FunctionalKind::BlaschkeSantalo, &u).unwrap();
        assert!((j + 4.0 * PI * PI).abs() < 1e-10);
        let y = evaluate(FunctionalKind::Yamabe, &u).unwrap();
        assert!((y + PI * PI).abs() < 1e-10);
        let f = evaluate(FunctionalKind::QCurv, &u).unwrap();
        assert!((f - 9.0 * PI.powi(4)).abs() < 1e-8);
        let fs = evaluate(FunctionalKind::SymQ, &u).unwrap();
        assert!((fs - 144.0 * PI.powi(4)).abs() < 1e-7);
        // Total Q-curvature of the round metric is its length, 2π.
        let tq = evaluate(FunctionalKind::TotalQ, &u).unwrap();
        assert!((tq - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn scale_invariance() {
        let mut rng = ensemble::rng(4);
        let u = ensemble::random_smooth(&mut rng, N);
        for kind in FunctionalKind::ALL_SHARP {
            let base = evaluate(kind, &u).unwrap();
            for c in [0.1, 7.0] {
                let scaled = evaluate(kind, &u.scale(c)).unwrap();
                assert!(
                    (scaled - base).abs() < 1e-9 * base.abs(),
                    "{kind:?} not scale invariant: {base} vs {scaled}"
                );
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ensemble::rng(6);
        for kind in [
            FunctionalKind::BlaschkeSantalo,
            FunctionalKind::Yamabe,
            FunctionalKind::SymQ,
            FunctionalKind::QCurv,
            FunctionalKind::TotalQ,
        ] {
            for _ in 0..3 {
                let u = ensemble::random_smooth(&mut rng, N);
                let phi = ensemble::random_trig(&mut rng, N, 6, 0.5);
                let g = gradient(kind, &u).unwrap();
                let analytic = g.inner(&phi);
                let h = 1e-5;
                let ep = evaluate(kind, &u.add(&phi.scale(h))).unwrap();
                let em = evaluate(kind, &u.add(&phi.scale(-h))).unwrap();
                let fd = (ep - em) / (2.0 * h);
                assert!(
                    (analytic - fd).abs() < 1e-6 * fd.abs().max(1.0),
                    "{kind:?}: analytic {analytic} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_round_for_yamabe() {
        let g = gradient(FunctionalKind::Yamabe, &one()).unwrap();
        assert!(g.sup_norm() < 1e-10);
    }

    #[test]
    fn gradient_vanishes_on_yamabe_family() {
        let u = ExtremalParams::new(Family::Yamabe, 1.0, 2.0, 0.7)
            .unwrap()
            .sample(N)
            .unwrap();
        let g = gradient(FunctionalKind::Yamabe, &u).unwrap();
        assert!(g.sup_norm() < 1e-7, "gradient sup {:.3e}", g.sup_norm());
    }

    #[test]
    fn constraint_residual_cases() {
        let r = constraint_residuals(FunctionalKind::BlaschkeSantalo, &one()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|v| v.abs() < 1e-12));

        // ψ_λ-type members are π-periodic: all odd moments vanish.
        let u = ExtremalParams::new(Family::BlaschkeSantalo, 1.0, 2.0, 0.0)
            .unwrap()
            .sample(N)
            .unwrap();
        let r = constraint_residuals(FunctionalKind::BlaschkeSantalo, &u).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-10), "{r:?}");

        let u = PeriodicFunction::from_fn(N, |t| 1.0 + 0.3 * t.cos()).unwrap();
        let r = constraint_residuals(FunctionalKind::BlaschkeSantalo, &u).unwrap();
        assert!(r[0].abs() > 1e-2, "cos moment should not vanish: {r:?}");

        assert!(constraint_residuals(FunctionalKind::Yamabe, &u)
            .unwrap()
            .is_empty());
        assert_eq!(constraint_residuals(FunctionalKind::SymQ, &u).unwrap().len(), 4);
    }

    #[test]
    fn constraint_gradients_match_differences() {
        let mut rng = ensemble::rng(9);
        let u = ensemble::random_smooth(&mut rng, N);
        let phi = ensemble::random_trig(&mut rng, N, 4, 0.4);
        for kind in [FunctionalKind::BlaschkeSantalo, FunctionalKind::SymQ] {
            let grads = constraint_gradients(kind, &u).unwrap();
            let h = 1e-6;
            let rp = constraint_residuals(kind, &u.add(&phi.scale(h))).unwrap();
            let rm = constraint_residuals(kind, &u.add(&phi.scale(-h))).unwrap();
            for (i, g) in grads.iter().enumerate() {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                let an = g.inner(&phi);
                assert!(
                    (an - fd).abs() < 1e-6 * fd.abs().max(1.0),
                    "{kind:?} constraint {i}: {an} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn mobius_invariance_of_functionals() {
        // T_λ compresses features by up to λ², so the composed functions
        // need λ²·(bandwidth of u) modes; 2048 covers λ = 5 comfortably.
        let mut rng = ensemble::rng(12);
        let u = ensemble::random_positive(&mut rng, 2048, 4, 0.25);
        // J under T_λ.
        let base = evaluate(FunctionalKind::BlaschkeSantalo, &u).unwrap();
        for lambda in [1.0 / 3.0, 2.0, 5.0] {
            let tu = transforms::t_lambda(&u, lambda).unwrap();
            let v = evaluate(FunctionalKind::BlaschkeSantalo, &tu).unwrap();
            assert!(
                (v - base).abs() < 1e-7 * base.abs(),
                "J(T_{lambda}u) = {v} vs {base}"
            );
        }
        // F under 𝒯_{λ,α}.
        let base = evaluate(FunctionalKind::QCurv, &u).unwrap();
        let p = transforms::MobiusParams::new(2.0, 1.0).unwrap();
        let tu = transforms::script_t(&u, p).unwrap();
        let v = evaluate(FunctionalKind::QCurv, &tu).unwrap();
        assert!((v - base).abs() < 1e-7 * base.abs(), "F: {v} vs {base}");
        // 𝐅 under 𝐓_λ.
        let base = evaluate(FunctionalKind::SymQ, &u).unwrap();
        let tu = transforms::bold_t(&u, 2.0).unwrap();
        let v = evaluate(FunctionalKind::SymQ, &tu).unwrap();
        assert!((v - base).abs() < 1e-7 * base.abs(), "𝐅: {v} vs {base}");
    }

    #[test]
    fn quadratic_part_invariance_under_script_t() {
        // ∫(u_θθ² − (5/2)u_θ² + (9/16)u²) alone is 𝒯-invariant.
        let u = PeriodicFunction::from_fn(512, |t| 2.0 + t.cos()).unwrap();
        let s = shape(FunctionalKind::QCurv);
        let base = quadratic_part(&u, &s).unwrap();
        let p = transforms::MobiusParams::new(2.0, 1.0).unwrap();
        let tu = transforms::script_t(&u, p).unwrap();
        let v = quadratic_part(&tu, &s).unwrap();
        assert!((v - base).abs() < 1e-8 * base.abs().max(1.0), "{v} vs {base}");
    }

    #[test]
    fn total_q_equals_k_squared_integral() {
        // ∫Q dS = ∫k² dS on the same metric.
        use crate::geometry::{ConformalMetric, Convention};
        let mut rng = ensemble::rng(21);
        let u = ensemble::random_smooth(&mut rng, N);
        let lhs = evaluate(FunctionalKind::TotalQ, &u).unwrap();
        let g = ConformalMetric::new(u, Convention::Pow43).unwrap();
        let k = g.alpha_scalar_field(4.0).unwrap();
        let rhs = crate::spectral::dealiased_integral(&[&k, g.factor()], |x| {
            x[0] * x[0] * x[1].powf(-2.0 / 3.0)
        })
        .unwrap();
        assert!(
            (lhs - rhs).abs() < 1e-7 * rhs.abs(),
            "∫Q dS = {lhs} vs ∫k² dS = {rhs}"
        );
    }

    #[test]
    fn fourier_lower_bound_cases() {
        let (lhs, rhs) = fourier_lower_bound(&one()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "no k≥2 content: equality");
        for u in [
            PeriodicFunction::from_fn(N, |t| 1.0 + 0.1 * (2.0 * t).cos()).unwrap(),
            PeriodicFunction::from_fn(N, |t| 1.0 + 0.05 * (5.0 * t).cos()).unwrap(),
        ] {
            let (lhs, rhs) = fourier_lower_bound(&u).unwrap();
            assert!(lhs >= rhs, "coercivity violated: {lhs} < {rhs}");
            // lhs is exactly the quadratic part of the Q functional.
            let s = shape(FunctionalKind::QCurv);
            let direct = quadratic_part(&u, &s).unwrap();
            assert!((lhs - direct).abs() < 1e-9 * direct.abs().max(1.0));
        }
        let bad = PeriodicFunction::from_fn(N, |t| 1.0 + 0.3 * t.cos()).unwrap();
        assert!(fourier_lower_bound(&bad).is_err());
    }

    #[test]
    fn random_ensemble_respects_sharp_bounds() {
        // Unconstrained kinds on raw random functions; constrained kinds
        // after projection onto the moment cone happens in optimize tests.
        let mut rng = ensemble::rng(33);
        for _ in 0..50 {
            let u = ensemble::random_smooth(&mut rng, N);
            let y = evaluate(FunctionalKind::Yamabe, &u).unwrap();
            assert!(y >= -PI * PI * (1.0 + 1e-6), "Y(u) = {y} below sharp bound");
            let f = evaluate(FunctionalKind::QCurv, &u).unwrap();
            assert!(
                f >= 9.0 * PI.powi(4) * (1.0 - 1e-6),
                "F(u) = {f} below sharp bound"
            );
        }
    }

    #[test]
    fn rejects_nonpositive_input() {
        let f = PeriodicFunction::from_fn(N, |t| t.cos()).unwrap();
        assert!(matches!(
            evaluate(FunctionalKind::Yamabe, &f),
            Err(Error::PositivityViolation { .. })
        ));
    }
}
