//! Domain descriptions and the explicit tent test function with its
//! closed-form gradient energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gamma;

/// Volume of the N-dimensional ball of radius `s`: `s^N π^{N/2} / Γ(1 + N/2)`.
pub fn ball_volume(n: usize, s: f64) -> f64 {
    assert!(s >= 0.0, "ball_volume requires s >= 0");
    let nf = n as f64;
    s.powi(n as i32) * std::f64::consts::PI.powf(nf / 2.0)
        / gamma(1.0 + nf / 2.0).expect("n >= 1")
}

/// A bounded domain, described by the quantities the certificates consume:
/// ambient dimension, Lebesgue measure, inradius and an incenter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    /// Ball of radius `radius` centered at `center`.
    Ball { dim: usize, radius: f64, center: Vec<f64> },
    /// Axis-aligned rectangle `[0, a] x [0, b]`.
    Box2d { sides: [f64; 2] },
    /// User-described domain. The geometry itself is not known to the crate;
    /// only the measured quantities are, and they are taken on trust after a
    /// consistency check.
    Custom { dim: usize, measure: f64, inradius: f64, incenter: Vec<f64> },
}

impl Domain {
    pub fn ball(dim: usize, radius: f64) -> Domain {
        Domain::Ball { dim, radius, center: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { dim, .. } => *dim,
            Domain::Box2d { .. } => 2,
            Domain::Custom { dim, .. } => *dim,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Domain::Ball { dim, radius, .. } => ball_volume(*dim, *radius),
            Domain::Box2d { sides } => sides[0] * sides[1],
            Domain::Custom { measure, .. } => *measure,
        }
    }

    /// Inradius: radius of the largest inscribed ball.
    pub fn inradius(&self) -> f64 {
        match self {
            Domain::Ball { radius, .. } => *radius,
            Domain::Box2d { sides } => 0.5 * sides[0].min(sides[1]),
            Domain::Custom { inradius, .. } => *inradius,
        }
    }

    /// An incenter: a point realizing the inradius. Need not be unique; the
    /// one used is recorded in emitted reports.
    pub fn incenter(&self) -> Vec<f64> {
        match self {
            Domain::Ball { center, .. } => center.clone(),
            Domain::Box2d { sides } => vec![0.5 * sides[0], 0.5 * sides[1]],
            Domain::Custom { incenter, .. } => incenter.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        match self {
            Domain::Ball { dim, radius, center } => {
                if *dim < 2 {
                    return fail(format!("domain.dim: need N >= 2, got {dim}"));
                }
                if !(*radius > 0.0) {
                    return fail(format!("domain.radius: need > 0, got {radius}"));
                }
                if center.len() != *dim {
                    return fail(format!(
                        "domain.center: {} coordinates for dim {dim}",
                        center.len()
                    ));
                }
            }
            Domain::Box2d { sides } => {
                if !(sides[0] > 0.0 && sides[1] > 0.0) {
                    return fail(format!("domain.sides: need > 0, got {sides:?}"));
                }
            }
            Domain::Custom { dim, measure, inradius, incenter } => {
                if *dim < 2 {
                    return fail(format!("domain.dim: need N >= 2, got {dim}"));
                }
                if !(*inradius > 0.0) {
                    return fail(format!("domain.inradius: need > 0, got {inradius}"));
                }
                if incenter.len() != *dim {
                    return fail(format!(
                        "domain.incenter: {} coordinates for dim {dim}",
                        incenter.len()
                    ));
                }
                // The inscribed ball must fit: ω(N, τ) <= measure.
                let wball = ball_volume(*dim, *inradius);
                if !(wball <= measure * (1.0 + 1e-12)) {
                    return fail(format!(
                        "domain: inscribed ball volume {wball:.6e} exceeds measure {measure:.6e}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The explicit test field: `delta` on the inner half of the inscribed ball,
/// a linear radial ramp down to 0 on its outer shell, 0 outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TentFunction {
    pub delta: f64,
    pub tau: f64,
    pub center: Vec<f64>,
    pub dim: usize,
}

impl TentFunction {
    pub fn new(domain: &Domain, delta: f64) -> TentFunction {
        assert!(delta > 0.0, "tent height must be positive");
        TentFunction {
            delta,
            tau: domain.inradius(),
            center: domain.incenter(),
            dim: domain.dim(),
        }
    }

    /// Value as a function of the distance `r` from the incenter.
    pub fn radial(&self, r: f64) -> f64 {
        if r >= self.tau {
            0.0
        } else if r <= 0.5 * self.tau {
            self.delta
        } else {
            2.0 * self.delta * (self.tau - r) / self.tau
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(xi, ci)| (xi - ci) * (xi - ci))
            .sum();
        self.radial(r2.sqrt())
    }
}

/// Closed-form gradient p-energy of the tent:
/// `∫ |∇u_δ|^p = 2^p δ^p ω(N, τ) (1 - 2^{-N}) / τ^p`.
pub fn tent_energy_p(delta: f64, tau: f64, n: usize, p: f64) -> f64 {
    assert!(delta > 0.0 && tau > 0.0 && p > 1.0 && n >= 2);
    (2.0 * delta / tau).powf(p) * ball_volume(n, tau) * (1.0 - 0.5f64.powi(n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn ball_volume_known() {
        assert_relative_eq!(ball_volume(2, 1.0), PI, max_relative = 1e-13);
        assert_relative_eq!(ball_volume(3, 1.0), 4.0 * PI / 3.0, max_relative = 1e-13);
        // Γ(7/2) = 15 sqrt(pi) / 8 by hand recurrence.
        let g72 = 15.0 * PI.sqrt() / 8.0;
        assert_relative_eq!(ball_volume(5, 1.0), PI.powf(2.5) / g72, max_relative = 1e-13);
        assert_relative_eq!(ball_volume(5, 1.0), 5.263_789_013_914_325, max_relative = 1e-12);
    }

    /// Independent quadrature of |∇u_δ|^p: the gradient magnitude is evaluated
    /// by central finite differences of the radial profile and integrated over
    /// spherical shells on a fine 1-D grid.
    fn tent_energy_shell_quadrature(delta: f64, tau: f64, n: usize, p: f64) -> f64 {
        let tent = TentFunction { delta, tau, center: vec![0.0; n], dim: n };
        let m = 200_000usize;
        let h = tau / m as f64;
        let fd = 1e-7 * tau;
        let surface = n as f64 * ball_volume(n, 1.0); // |S^{N-1}|
        let mut total = 0.0;
        for i in 0..m {
            let r = (i as f64 + 0.5) * h;
            let grad = (tent.radial(r + fd) - tent.radial(r - fd)).abs() / (2.0 * fd);
            total += grad.powf(p) * surface * r.powi(n as i32 - 1) * h;
        }
        total
    }

    #[test]
    fn tent_energy_matches_shell_quadrature_2d() {
        let want = tent_energy_shell_quadrature(1.0, 1.0, 2, 2.0);
        let got = tent_energy_p(1.0, 1.0, 2, 2.0);
        assert_relative_eq!(got, want, max_relative = 1e-4);
        assert_relative_eq!(got, 3.0 * PI, max_relative = 1e-13);
    }

    #[test]
    fn tent_energy_matches_shell_quadrature_5d() {
        let want = tent_energy_shell_quadrature(1.0, 1.0, 5, 4.0);
        let got = tent_energy_p(1.0, 1.0, 5, 4.0);
        assert_relative_eq!(got, want, max_relative = 1e-4);
        assert_relative_eq!(got, 81.588_729_715_672_03, max_relative = 1e-12);
    }

    #[test]
    fn tent_energy_delta_homogeneity() {
        for &(n, p) in &[(2usize, 2.0f64), (3, 2.5), (5, 4.0)] {
            let base = tent_energy_p(1.0, 0.7, n, p);
            let doubled = tent_energy_p(2.0, 0.7, n, p);
            assert_relative_eq!(doubled, 2.0f64.powf(p) * base, max_relative = 1e-12);
        }
    }

    #[test]
    fn tent_eval_interfaces_and_range() {
        let dom = Domain::ball(3, 2.0);
        let tent = TentFunction::new(&dom, 1.5);
        let tau = 2.0;
        assert_eq!(tent.eval(&[tau, 0.0, 0.0]), 0.0);
        assert_relative_eq!(tent.eval(&[0.5 * tau, 0.0, 0.0]), 1.5, max_relative = 1e-15);
        assert_relative_eq!(tent.eval(&[0.75 * tau, 0.0, 0.0]), 0.75, max_relative = 1e-12);
        // Sampled max inside is delta; outside it vanishes.
        let mut max_in: f64 = 0.0;
        for i in 0..200 {
            let r = tau * i as f64 / 199.0;
            max_in = max_in.max(tent.radial(r));
        }
        assert_relative_eq!(max_in, 1.5, max_relative = 1e-12);
        assert_eq!(tent.eval(&[3.0, 1.0, 0.0]), 0.0);
    }

    #[test]
    fn tent_numerical_gradient_on_ramp() {
        let dom = Domain::ball(2, 1.0);
        let tent = TentFunction::new(&dom, 2.0);
        // Ramp slope magnitude is 2 delta / tau away from the interfaces.
        let h = 1e-7;
        for &r in &[0.6, 0.7, 0.85, 0.95] {
            let g = (tent.radial(r + h) - tent.radial(r - h)).abs() / (2.0 * h);
            assert!((g - 4.0).abs() < 1e-6, "slope {g} at r={r}");
        }
    }

    #[test]
    fn custom_domain_validation() {
        let ok = Domain::Custom {
            dim: 2,
            measure: 10.0,
            inradius: 1.0,
            incenter: vec![0.0, 0.0],
        };
        assert!(ok.validate().is_ok());
        let bad = Domain::Custom {
            dim: 2,
            measure: 1.0,
            inradius: 1.0, // inscribed disk has area pi > 1
            incenter: vec![0.0, 0.0],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn box_derived_quantities() {
        let b = Domain::Box2d { sides: [3.0, 2.0] };
        assert_eq!(b.inradius(), 1.0);
        assert_eq!(b.measure(), 6.0);
        assert_eq!(b.incenter(), vec![1.5, 1.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            /// tent_energy_p(δ, cτ, N, p) = c^{N-p} tent_energy_p(δ, τ, N, p)
            #[test]
            fn tent_energy_tau_scaling(c in 0.1f64..10.0, p in 1.5f64..5.0, n in 2usize..6) {
                let base = tent_energy_p(1.3, 1.0, n, p);
                let scaled = tent_energy_p(1.3, c, n, p);
                let want = c.powf(n as f64 - p) * base;
                prop_assert!((scaled - want).abs() <= 1e-10 * want.abs());
            }
        }
    }
}
