//! Named builtin problem instances, addressable from the CLI by string id.

use crate::error::Result;
use crate::geometry::Domain;
use crate::model::{Nonlinearity, OperatorSpec, Weight};
use crate::theorem::{compute_constants, interval, AdmissibleInterval, CqSource, TheoremConstants};

/// Embedding constants for the unit disk at p = 2 (where no derived bound is
/// available): a rigorous elementary chain gives
/// `‖u‖_{L¹} <= sqrt(pi)/j01 ‖∇u‖_{L²}` and
/// `‖u‖_{L⁴}² <= (sqrt(pi) j01)^{-1} ‖∇u‖_{L²}²`,
/// with `j01` the first zero of the Bessel function J₀. Recorded as
/// user-supplied in certificates.
pub const DISK_C1: f64 = 0.737_040_508_087_341_2;
pub const DISK_C4: f64 = 0.484_362_756_869_399_3;

/// Growth exponent of the builtin disk instance.
pub const DISK_Q: f64 = 4.0;

/// The quartic-log instance: unit ball in R^5, 4-Laplacian, unit weight,
/// `f(t) = log(1 + t^4)`. Interval prefactor 2^4·31·(1/4) = 124.
pub fn log_quartic_ball() -> (Domain, OperatorSpec, Weight, Nonlinearity) {
    (
        Domain::ball(5, 1.0),
        OperatorSpec::p_laplacian(4.0).expect("p = 4 is valid"),
        Weight::one(),
        Nonlinearity::log_quartic(),
    )
}

/// Fully assembled capped-growth instance on the unit disk.
pub struct DiskInstance {
    pub domain: Domain,
    pub op: OperatorSpec,
    pub weight: Weight,
    pub nl: Nonlinearity,
    pub constants: TheoremConstants,
    /// The cap radius: `slack · max{κ, (q (G₁+G₂))^{1/(q-2)}}`.
    pub r: f64,
    /// Certified interval for the hand witness (γ = 1, δ = r).
    pub interval: AdmissibleInterval,
}

/// Build the capped-growth instance on the unit disk: identity coefficient
/// matrix (p = 2), unit weight, q = 4, and the cap radius `r` chosen a factor
/// `slack > 1` above the feasibility threshold. The hand witness is γ = 1,
/// δ = r; (h₂) then reads `H(r)/r² = r^{q-2}/q + 1/r > G₁ + G₂`.
pub fn piecewise_h_disk(slack: f64) -> Result<DiskInstance> {
    assert!(slack > 1.0, "slack must exceed 1 for strict feasibility");
    let domain = Domain::ball(2, 1.0);
    let op = OperatorSpec::identity_matrix(2);
    let weight = Weight::one();

    // The certificate constants do not depend on r, so compute them with a
    // placeholder nonlinearity carrying the same (a1, a2, q).
    let probe = Nonlinearity::piecewise_h(DISK_Q, 1.0)?;
    let constants = compute_constants(
        &domain,
        &op,
        &weight,
        &probe,
        CqSource::UserSupplied { cq: DISK_C4, c1: DISK_C1 },
    )?;
    let r_min = constants
        .kappa
        .max((DISK_Q * (constants.g1 + constants.g2)).powf(1.0 / (DISK_Q - 2.0)));
    let r = slack * r_min;
    let nl = Nonlinearity::piecewise_h(DISK_Q, r)?;
    let iv = interval(&constants, &nl, 1.0, r)?;
    Ok(DiskInstance { domain, op, weight, nl, constants, r, interval: iv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_instance_is_feasible_by_construction() {
        let inst = piecewise_h_disk(1.2).unwrap();
        assert!(inst.interval.feasible);
        assert!(inst.r > inst.constants.kappa);
        // r^{q-2}/q > G1 + G2 strictly
        let lhs = inst.r.powf(DISK_Q - 2.0) / DISK_Q;
        assert!(lhs > inst.constants.g1 + inst.constants.g2);
    }

    #[test]
    fn disk_constants_reference_values() {
        let inst = piecewise_h_disk(1.2).unwrap();
        let tc = &inst.constants;
        assert_eq!(tc.prefactor_c, 6.0); // 2^2 · 3 · (1/2) / 1
        assert!((tc.kappa - 0.460_658_865_961_780_6).abs() < 1e-13);
    }
}
