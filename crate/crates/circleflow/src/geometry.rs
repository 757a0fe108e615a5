//! Conformal metrics on the circle and their curvature quantities.
//!
//! Two conventions are in play. First-order theory writes `g = w^{-4} g_s`
//! (`Pow4`): the α-scalar curvature is `R^α_g = w³(α w_θθ + w)`, with α = 1
//! the affine curvature κ and α = 4 the Yamabe-type curvature k. Fourth-order
//! theory writes `g = v^{-4/3} g_s` (`Pow43`): the Q-type curvatures are
//! `Q^α_g = v^{5/3}((α²/9) v_θθθθ + (10α/9) v_θθ + v)`, with α = 1 the
//! symmetric Q-curvature and α = 4 the Q-curvature. A `Pow43` metric with
//! factor `v` is the same metric as the `Pow4` one with factor `v^{1/3}`; the
//! bridge is explicit and used to compute coefficient curvatures for the
//! fourth-order operators.
//!
//! Every operator has two evaluation routes: the intrinsic one (nested
//! covariant derivatives, `∇_g = w² ∂_θ` resp. `v^{2/3} ∂_θ`) and the
//! pullback one (round-metric operator applied to the product with the
//! factor). Their agreement is exactly conformal covariance and is kept as a
//! standing test.

use crate::error::{Error, Result};
use crate::spectral::{dealiased_integral, dealiased_map, PeriodicFunction, POSITIVITY_FLOOR};

/// Metric convention tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `g = w^{-4} g_s`; length element `w^{-2} dθ`.
    Pow4,
    /// `g = v^{-4/3} g_s`; length element `v^{-2/3} dθ`.
    Pow43,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Pow4 => "pow4",
            Convention::Pow43 => "pow43",
        }
    }
}

/// Operator evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Nested covariant derivatives in the metric itself.
    #[default]
    Intrinsic,
    /// Round-metric operator conjugated by the conformal factor.
    Pullback,
}

/// Variant selector for the fourth-order operator family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PVariant {
    /// Coefficient curvature is the affine curvature κ; α = 1.
    Symmetric,
    /// Coefficient curvature is the 4-scalar curvature k; α = 4.
    Standard,
    /// Coefficient curvature is `R^α`; arbitrary α > 0.
    General(f64),
}

impl PVariant {
    pub fn alpha(self) -> f64 {
        match self {
            PVariant::Symmetric => 1.0,
            PVariant::Standard => 4.0,
            PVariant::General(a) => a,
        }
    }
}

/// A conformal metric: positive factor plus convention tag.
#[derive(Debug, Clone)]
pub struct ConformalMetric {
    factor: PeriodicFunction,
    convention: Convention,
}

/// A curvature field with its metric average.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    /// Curvature as a function of θ.
    pub field: PeriodicFunction,
    /// Metric mean: `total / length`.
    pub mean: f64,
    /// ∫ curvature dS_g.
    pub total: f64,
    /// ∫ dS_g.
    pub length: f64,
}

impl ConformalMetric {
    pub fn new(factor: PeriodicFunction, convention: Convention) -> Result<Self> {
        let m = factor.min();
        if m <= POSITIVITY_FLOOR {
            return Err(Error::positivity("conformal factor", m, POSITIVITY_FLOOR));
        }
        Ok(Self { factor, convention })
    }

    pub fn round(n: usize, convention: Convention) -> Result<Self> {
        Self::new(PeriodicFunction::constant(n, 1.0)?, convention)
    }

    pub fn factor(&self) -> &PeriodicFunction {
        &self.factor
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn grid_len(&self) -> usize {
        self.factor.len()
    }

    fn expect(&self, expected: Convention) -> Result<()> {
        if self.convention != expected {
            return Err(Error::ConventionMismatch {
                expected: expected.name(),
                got: self.convention.name(),
            });
        }
        Ok(())
    }

    /// Length element as a function: `w^{-2}` (Pow4) or `v^{-2/3}` (Pow43).
    pub fn length_element(&self) -> Result<PeriodicFunction> {
        match self.convention {
            Convention::Pow4 => self.factor.pow(-2.0),
            Convention::Pow43 => self.factor.pow(-2.0 / 3.0),
        }
    }

    /// Total length ∫ dS_g.
    pub fn total_length(&self) -> Result<f64> {
        let p = match self.convention {
            Convention::Pow4 => -2.0,
            Convention::Pow43 => -2.0 / 3.0,
        };
        dealiased_integral(&[&self.factor], |x| x[0].powf(p))
    }

    /// The same metric rewritten in the `Pow4` convention.
    pub fn to_pow4(&self) -> Result<Self> {
        match self.convention {
            Convention::Pow4 => Ok(self.clone()),
            Convention::Pow43 => Self::new(self.factor.pow(1.0 / 3.0)?, Convention::Pow4),
        }
    }

    /// The same metric rewritten in the `Pow43` convention.
    pub fn to_pow43(&self) -> Result<Self> {
        match self.convention {
            Convention::Pow4 => Self::new(self.factor.pow(3.0)?, Convention::Pow43),
            Convention::Pow43 => Ok(self.clone()),
        }
    }

    /// α-scalar curvature `R^α_g = w³(α w_θθ + w)` of a `Pow4` metric.
    /// α = 1 is the affine curvature κ_g, α = 4 the 4-scalar curvature k_g.
    pub fn alpha_scalar_curvature(&self, alpha: f64) -> Result<CurvatureReport> {
        self.expect(Convention::Pow4)?;
        if alpha <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        let w = &self.factor;
        let w2 = w.differentiate(2)?;
        let field = dealiased_map(&[w, &w2], |x| x[0].powi(3) * (alpha * x[1] + x[0]))?;
        self.report(field)
    }

    /// Affine curvature κ_g = R¹_g.
    pub fn affine_curvature(&self) -> Result<CurvatureReport> {
        self.alpha_scalar_curvature(1.0)
    }

    /// General α-Q-curvature `Q^α_g = v^{5/3}((α²/9) v⁗ + (10α/9) v″ + v)` of
    /// a `Pow43` metric.
    pub fn general_q_curvature(&self, alpha: f64) -> Result<CurvatureReport> {
        self.expect(Convention::Pow43)?;
        if alpha <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        let v = &self.factor;
        let v2 = v.differentiate(2)?;
        let v4 = v.differentiate(4)?;
        let a2 = alpha * alpha / 9.0;
        let a1 = 10.0 * alpha / 9.0;
        let field = dealiased_map(&[v, &v2, &v4], |x| {
            x[0].powf(5.0 / 3.0) * (a2 * x[2] + a1 * x[1] + x[0])
        })?;
        self.report(field)
    }

    /// Symmetric Q-curvature `Q^A_g = (1/9) v^{5/3}(v⁗ + 10 v″ + 9v)`.
    pub fn symmetric_q_curvature(&self) -> Result<CurvatureReport> {
        self.general_q_curvature(1.0)
    }

    /// Q-curvature `Q_g = (1/9) v^{5/3}(16 v⁗ + 40 v″ + 9v)`.
    pub fn q_curvature(&self) -> Result<CurvatureReport> {
        self.general_q_curvature(4.0)
    }

    /// `R^α` of the underlying metric as a field over θ, computed from the
    /// `Pow4` factor regardless of the stored convention. Used as the
    /// coefficient curvature of the fourth-order operators and in the
    /// `Q^α = (α/3) Δ_g R^α + (R^α)²` identity.
    pub fn alpha_scalar_field(&self, alpha: f64) -> Result<PeriodicFunction> {
        let w = match self.convention {
            Convention::Pow4 => self.factor.clone(),
            Convention::Pow43 => self.factor.pow(1.0 / 3.0)?,
        };
        let w2 = w.differentiate(2)?;
        dealiased_map(&[&w, &w2], |x| x[0].powi(3) * (alpha * x[1] + x[0]))
    }

    /// Covariant gradient `∇_g X = w² X_θ` (Pow4) resp. `v^{2/3} X_θ` (Pow43).
    pub fn grad(&self, x: &PeriodicFunction) -> Result<PeriodicFunction> {
        let dx = x.differentiate(1)?;
        match self.convention {
            Convention::Pow4 => dealiased_map(&[&self.factor, &dx], |a| a[0] * a[0] * a[1]),
            Convention::Pow43 => {
                dealiased_map(&[&self.factor, &dx], |a| a[0].powf(2.0 / 3.0) * a[1])
            }
        }
    }

    /// Laplace–Beltrami operator `Δ_g = ∇_g ∘ ∇_g` (one dimension).
    pub fn laplacian(&self, x: &PeriodicFunction) -> Result<PeriodicFunction> {
        self.grad(&self.grad(x)?)
    }

    /// Conformal Laplace–Beltrami operator `L^α_g ψ = α Δ_g ψ + R^α_g ψ` on a
    /// `Pow4` metric.
    pub fn apply_l(
        &self,
        alpha: f64,
        psi: &PeriodicFunction,
        mode: EvalMode,
    ) -> Result<PeriodicFunction> {
        self.expect(Convention::Pow4)?;
        let w = &self.factor;
        match mode {
            EvalMode::Intrinsic => {
                let lap = self.laplacian(psi)?;
                let r = self.alpha_scalar_field(alpha)?;
                dealiased_map(&[&lap, &r, psi], |x| alpha * x[0] + x[1] * x[2])
            }
            EvalMode::Pullback => {
                // L^α_g ψ = w³ ( α (wψ)_θθ + wψ ).
                let prod = dealiased_map(&[w, psi], |x| x[0] * x[1])?;
                let p2 = prod.differentiate(2)?;
                dealiased_map(&[w, &p2, &prod], |x| x[0].powi(3) * (alpha * x[1] + x[2]))
            }
        }
    }

    /// Fourth-order conformal operator on a `Pow43` metric:
    /// `P^α_g f = (α²/9) Δ²_g f + (10α/9) ∇_g(R^α_g ∇_g f) + Q^α_g f`,
    /// with the variant choosing α and the coefficient curvature.
    pub fn apply_p(
        &self,
        variant: PVariant,
        f: &PeriodicFunction,
        mode: EvalMode,
    ) -> Result<PeriodicFunction> {
        self.expect(Convention::Pow43)?;
        let alpha = variant.alpha();
        if alpha <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        let v = &self.factor;
        match mode {
            EvalMode::Intrinsic => {
                let bilap = self.laplacian(&self.laplacian(f)?)?;
                let coeff = self.alpha_scalar_field(alpha)?;
                let gf = self.grad(f)?;
                let cgf = dealiased_map(&[&coeff, &gf], |x| x[0] * x[1])?;
                let div = self.grad(&cgf)?;
                let q = self.general_q_curvature(alpha)?.field;
                dealiased_map(&[&bilap, &div, &q, f], |x| {
                    (alpha * alpha / 9.0) * x[0] + (10.0 * alpha / 9.0) * x[1] + x[2] * x[3]
                })
            }
            EvalMode::Pullback => {
                // P^α_g f = v^{5/3} ( (α²/9)(vf)⁗ + (10α/9)(vf)″ + vf ).
                let prod = dealiased_map(&[v, f], |x| x[0] * x[1])?;
                let p2 = prod.differentiate(2)?;
                let p4 = prod.differentiate(4)?;
                let a2 = alpha * alpha / 9.0;
                let a1 = 10.0 * alpha / 9.0;
                dealiased_map(&[v, &p4, &p2, &prod], |x| {
                    x[0].powf(5.0 / 3.0) * (a2 * x[1] + a1 * x[2] + x[3])
                })
            }
        }
    }

    /// Package a curvature field with its metric mean.
    fn report(&self, field: PeriodicFunction) -> Result<CurvatureReport> {
        let p = match self.convention {
            Convention::Pow4 => -2.0,
            Convention::Pow43 => -2.0 / 3.0,
        };
        let total = dealiased_integral(&[&field, &self.factor], |x| x[0] * x[1].powf(p))?;
        let length = dealiased_integral(&[&self.factor], |x| x[0].powf(p))?;
        Ok(CurvatureReport {
            field,
            mean: total / length,
            total,
            length,
        })
    }
}
