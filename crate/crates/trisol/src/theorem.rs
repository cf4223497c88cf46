//! The certified constants (κ, G₁, G₂, the interval prefactor), hypothesis
//! feasibility, admissible λ-intervals with their (γ, δ) witnesses, the
//! p-Laplacian specialization, and the two-solution threshold.

use serde::Serialize;

use crate::embedding::{cq_bound, EmbeddingBound};
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, Domain};
use crate::model::{Nonlinearity, OperatorKind, OperatorSpec, Weight};
use crate::numerics::minimize_scalar;

/// Tolerance used when evaluating primitives inside hypothesis checks.
const F_TOL: f64 = 1e-10;

/// Where the embedding constants fed into the theorem come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CqSource {
    /// Derive both c₁ and c_q from the explicit bounds (rejects p = N).
    PaperBound,
    /// Caller-certified constants.
    UserSupplied { cq: f64, c1: f64 },
}

/// Simplified p-Laplacian display values (Λ₁ = Λ₂ = 1/p); must agree with
/// the general formulas to machine precision.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PlapConstants {
    pub g1: f64,
    pub g2: f64,
    pub prefactor_c: f64,
}

/// All constants entering the certificate, together with an echo of the
/// inputs they were derived from.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremConstants {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub tau: f64,
    pub measure: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub k_min: f64,
    pub k_sup: f64,
    pub a1: f64,
    pub a2: f64,
    /// κ = (2^{N-p} / (ω_τ (2^N - 1) Λ₁))^{1/p} τ
    pub kappa: f64,
    /// G₁ = prefactor · ‖k‖_∞ c₁ / Λ₁^{1/p}
    pub g1: f64,
    /// G₂ = prefactor · ‖k‖_∞ c_q^q / (q Λ₁^{q/p})
    pub g2: f64,
    /// 2^p (2^N - 1) Λ₂ / (τ^p min k): multiplies both interval endpoints.
    pub prefactor_c: f64,
    pub c1: EmbeddingBound,
    pub cq: EmbeddingBound,
    /// Present for p-Laplacian operators: the simplified display values.
    pub plap: Option<PlapConstants>,
}

impl TheoremConstants {
    /// Right side of the strict inequality in the (γ, δ) hypothesis:
    /// `a₁ G₁ / γ^{p-1} + a₂ G₂ γ^{q-p}`.
    pub fn h2_rhs(&self, gamma: f64) -> f64 {
        self.a1 * self.g1 / gamma.powf(self.p - 1.0)
            + self.a2 * self.g2 * gamma.powf(self.q - self.p)
    }

    /// Diagnostic bound on the level-set ratio:
    /// `L(r) = c₁ a₁ r^{1/p-1} / Λ₁^{1/p} + c_q^q a₂ r^{q/p-1} / (q Λ₁^{q/p})`.
    pub fn l_bound(&self, r: f64) -> f64 {
        assert!(r > 0.0);
        self.c1.cq * self.a1 * r.powf(1.0 / self.p - 1.0) / self.lambda1.powf(1.0 / self.p)
            + self.cq.cq.powf(self.q) * self.a2 * r.powf(self.q / self.p - 1.0)
                / (self.q * self.lambda1.powf(self.q / self.p))
    }
}

/// Compute every constant of the certificate. `c₁` (the q = 1 embedding
/// constant) and `c_q` come from `cq_source`.
pub fn compute_constants(
    domain: &Domain,
    op: &OperatorSpec,
    weight: &Weight,
    nl: &Nonlinearity,
    cq_source: CqSource,
) -> Result<TheoremConstants> {
    domain.validate()?;
    let n = domain.dim();
    let nf = n as f64;
    let p = op.p;
    let q = nl.q;
    if !(q > 1.0) {
        return Err(Error::Validation(format!("nonlinearity.q: need q > 1, got {q}")));
    }
    if p < nf {
        let pstar = crate::embedding::critical_exponent(n, p);
        if !(q < pstar) {
            return Err(Error::Validation(format!(
                "nonlinearity.q: need q < p* = {pstar} for p < N, got {q}"
            )));
        }
    }
    let tau = domain.inradius();
    let measure = domain.measure();
    let (c1, cq) = match cq_source {
        CqSource::PaperBound => (cq_bound(n, p, 1.0, measure)?, cq_bound(n, p, q, measure)?),
        CqSource::UserSupplied { cq, c1 } => (
            EmbeddingBound::user_supplied(n, p, 1.0, c1)?,
            EmbeddingBound::user_supplied(n, p, q, cq)?,
        ),
    };

    let omega_tau = ball_volume(n, tau);
    let two_n = 2.0f64.powi(n as i32);
    let kappa =
        (2.0f64.powf(nf - p) / (omega_tau * (two_n - 1.0) * op.lambda1)).powf(1.0 / p) * tau;
    let prefactor_c = 2.0f64.powf(p) * (two_n - 1.0) * op.lambda2 / (tau.powf(p) * weight.k_min);
    let g1 = prefactor_c * weight.k_sup * c1.cq / op.lambda1.powf(1.0 / p);
    let g2 = prefactor_c * weight.k_sup * cq.cq.powf(q) / (q * op.lambda1.powf(q / p));

    let plap = if matches!(op.kind, OperatorKind::PLaplacian) {
        // Simplified displays for a(x, ∇u) = |∇u|^{p-2} ∇u.
        let shared = 2.0f64.powf(p) * (two_n - 1.0) / (tau.powf(p) * weight.k_min);
        Some(PlapConstants {
            g1: shared * weight.k_sup * c1.cq / p.powf((p - 1.0) / p),
            g2: shared * weight.k_sup * cq.cq.powf(q) / (q * p.powf((p - q) / p)),
            prefactor_c: shared / p,
        })
    } else {
        None
    };

    Ok(TheoremConstants {
        n,
        p,
        q,
        tau,
        measure,
        lambda1: op.lambda1,
        lambda2: op.lambda2,
        k_min: weight.k_min,
        k_sup: weight.k_sup,
        a1: nl.a1,
        a2: nl.a2,
        kappa,
        g1,
        g2,
        prefactor_c,
        c1,
        cq,
        plap,
    })
}

/// The full witness hypothesis: `δ > γκ` and strictly
/// `F(δ)/δ^p > a₁G₁/γ^{p-1} + a₂G₂γ^{q-p}`.
pub fn h2_holds(tc: &TheoremConstants, nl: &Nonlinearity, gamma: f64, delta: f64) -> Result<bool> {
    if !(gamma > 0.0 && delta > 0.0) {
        return Err(Error::Validation(format!(
            "h2 requires gamma, delta > 0, got ({gamma}, {delta})"
        )));
    }
    let f_delta = nl.primitive(delta, F_TOL)?;
    Ok(delta > gamma * tc.kappa && f_delta > 0.0 && f_delta / delta.powf(tc.p) > tc.h2_rhs(gamma))
}

/// Which display family produced an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMode {
    Theorem,
    PLaplacianSimplified,
    CorollaryThreshold,
}

/// A certified λ-interval. `feasible ⟺ lower < upper` by construction: when
/// only the geometric clause `δ > γκ` fails, the raw algebraic upper endpoint
/// would still exceed the lower one but certifies nothing, so it is collapsed
/// onto the lower endpoint and the clause is reported in `violation`.
/// Endpoints are always open (excluded).
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleInterval {
    pub lower: f64,
    pub upper: f64,
    pub gamma: f64,
    pub delta: f64,
    pub feasible: bool,
    pub mode: IntervalMode,
    pub violation: Option<String>,
}

impl AdmissibleInterval {
    pub fn contains(&self, lambda: f64) -> bool {
        self.feasible && lambda > self.lower && lambda < self.upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Endpoints of the certified interval for the witness (γ, δ):
/// `prefactor · ] δ^p/F(δ), 1/(a₁G₁/γ^{p-1} + a₂G₂γ^{q-p}) [`.
/// Infeasible witnesses yield an empty interval plus diagnostics, not an
/// error.
pub fn interval(
    tc: &TheoremConstants,
    nl: &Nonlinearity,
    gamma: f64,
    delta: f64,
) -> Result<AdmissibleInterval> {
    if !(gamma > 0.0 && delta > 0.0) {
        return Err(Error::Validation(format!(
            "interval requires gamma, delta > 0, got ({gamma}, {delta})"
        )));
    }
    let p = tc.p;
    let f_delta = nl.primitive(delta, F_TOL)?;
    let rhs = tc.h2_rhs(gamma);
    let raw_lower =
        if f_delta > 0.0 { tc.prefactor_c * delta.powf(p) / f_delta } else { f64::INFINITY };
    let raw_upper = if rhs > 0.0 { tc.prefactor_c / rhs } else { f64::INFINITY };
    let geometric_ok = delta > gamma * tc.kappa;
    let strict_ok = f_delta > 0.0 && f_delta / delta.powf(p) > rhs;
    let feasible = geometric_ok && strict_ok;

    let mode = if tc.plap.is_some() {
        IntervalMode::PLaplacianSimplified
    } else {
        IntervalMode::Theorem
    };
    let (upper, violation) = if feasible {
        (raw_upper, None)
    } else {
        let mut parts = Vec::new();
        if !geometric_ok {
            parts.push(format!(
                "geometric clause fails: delta = {delta:.6e} <= gamma*kappa = {:.6e} (raw upper \
                 endpoint {raw_upper:.6e} certifies nothing and is collapsed)",
                gamma * tc.kappa
            ));
        }
        if !strict_ok {
            parts.push(format!(
                "strict inequality fails: F(delta)/delta^p = {:.6e} <= rhs(gamma) = {rhs:.6e}",
                f_delta / delta.powf(p)
            ));
        }
        let upper = if geometric_ok { raw_upper } else { raw_upper.min(raw_lower) };
        (upper, Some(parts.join("; ")))
    };
    let out =
        AdmissibleInterval { lower: raw_lower, upper, gamma, delta, feasible, mode, violation };
    debug_assert_eq!(out.feasible, out.lower < out.upper);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchObjective {
    /// Maximize the upper endpoint.
    MaxUpper,
    /// Maximize the interval width.
    MaxWidth,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub gamma: f64,
    pub delta: f64,
    pub interval: AdmissibleInterval,
    pub evaluations: usize,
}

/// Closest miss when no feasible witness exists: the admissible grid point
/// maximizing the margin `F(δ)/δ^p - rhs(γ)` (negative throughout).
#[derive(Debug, Clone, Serialize)]
pub struct NearMiss {
    pub gamma: f64,
    pub delta: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum SearchOutcome {
    Feasible(SearchResult),
    Infeasible(NearMiss),
}

#[derive(Debug, Clone, Copy)]
pub struct SearchRanges {
    pub gamma: (f64, f64),
    pub delta: (f64, f64),
}

impl Default for SearchRanges {
    fn default() -> Self {
        SearchRanges { gamma: (1e-3, 1e3), delta: (1e-3, 1e3) }
    }
}

/// Automated witness choice: a logarithmic grid over (γ, δ) with `δ > γκ`
/// enforced, refined by coordinate descent (γ minimizes the hypothesis right
/// side, δ minimizes `δ^p/F(δ)`). Deterministic; ties break toward the
/// lexicographically smaller pair.
pub fn search_gamma_delta(
    tc: &TheoremConstants,
    nl: &Nonlinearity,
    objective: SearchObjective,
    budget: usize,
    ranges: SearchRanges,
) -> Result<SearchOutcome> {
    if budget < 1 {
        return Err(Error::Validation("search budget must be >= 1".into()));
    }
    let p = tc.p;
    let (glo, ghi) = ranges.gamma;
    let (dlo0, dhi) = ranges.delta;
    if !(glo > 0.0 && glo < ghi && dlo0 > 0.0 && dlo0 < dhi) {
        return Err(Error::Validation("search ranges must be positive and ordered".into()));
    }
    let mut evals = 0usize;

    let n_axis = ((budget as f64).sqrt() as usize).clamp(8, 48);
    let logspace =
        |lo: f64, hi: f64, k: usize, i: usize| lo * (hi / lo).powf(i as f64 / (k - 1) as f64);

    struct Best {
        score: f64,
        gamma: f64,
        delta: f64,
    }
    let mut best: Option<Best> = None;
    let mut near: Option<NearMiss> = None;
    for i in 0..n_axis {
        let gamma = logspace(glo, ghi, n_axis, i);
        let rhs = tc.h2_rhs(gamma);
        let dlo = dlo0.max(gamma * tc.kappa * (1.0 + 1e-9));
        if dlo >= dhi {
            continue;
        }
        for j in 0..n_axis {
            let delta = logspace(dlo, dhi, n_axis, j);
            let f_delta = nl.primitive(delta, F_TOL)?;
            evals += 1;
            let margin = f_delta / delta.powf(p) - rhs;
            if margin > 0.0 {
                let upper = tc.prefactor_c / rhs;
                let lower = tc.prefactor_c * delta.powf(p) / f_delta;
                let score = match objective {
                    SearchObjective::MaxUpper => upper,
                    SearchObjective::MaxWidth => upper - lower,
                };
                let better = match &best {
                    None => true,
                    Some(b) => score > b.score || (score == b.score && (gamma, delta) < (b.gamma, b.delta)),
                };
                if better {
                    best = Some(Best { score, gamma, delta });
                }
            } else if near.as_ref().map_or(true, |nm| margin > nm.margin) {
                near = Some(NearMiss { gamma, delta, margin });
            }
        }
    }

    let Some(seed) = best else {
        let nm = near.unwrap_or(NearMiss { gamma: glo, delta: dlo0, margin: f64::NEG_INFINITY });
        return Ok(SearchOutcome::Infeasible(nm));
    };

    // Coordinate refinement from the best grid point.
    let (mut gamma, mut delta) = (seed.gamma, seed.delta);
    for _ in 0..2 {
        // γ-step: the upper endpoint depends on γ alone; minimize the right
        // side subject to keeping the geometric clause at the current δ.
        let gmax = ghi.min(delta / tc.kappa * (1.0 - 1e-12));
        if glo < gmax {
            let (g_new, _) = minimize_scalar(|g| tc.h2_rhs(g), glo, gmax, 1e-10 * (gmax - glo))?;
            if h2_holds(tc, nl, g_new, delta)? {
                gamma = g_new;
            }
        }
        // δ-step: minimize δ^p / F(δ) over the admissible slice.
        let dlo = dlo0.max(gamma * tc.kappa * (1.0 + 1e-9));
        if dlo < dhi {
            let (d_new, _) = minimize_scalar(
                |d| match nl.primitive(d, F_TOL) {
                    Ok(f) if f > 0.0 => d.powf(p) / f,
                    _ => f64::INFINITY,
                },
                dlo,
                dhi,
                1e-10 * (dhi - dlo),
            )?;
            if h2_holds(tc, nl, gamma, d_new)? {
                delta = d_new;
            }
        }
    }

    let iv = interval(tc, nl, gamma, delta)?;
    debug_assert!(iv.feasible);
    Ok(SearchOutcome::Feasible(SearchResult { gamma, delta, interval: iv, evaluations: evals }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    /// `prefactor · inf_{δ>0} δ^p / F(δ)`: two nontrivial solutions for every
    /// λ above this value.
    pub threshold: f64,
    pub prefactor: f64,
    pub inf_ratio: f64,
    pub delta_star: f64,
    /// The infimum landed at the edge of the probe range; the true infimum
    /// over all δ > 0 may be smaller.
    pub boundary_suspect: bool,
}

#[derive(Debug, Clone, Serialize)]
pub enum ThresholdOutcome {
    Feasible(ThresholdResult),
    /// The potential never becomes positive on the probe range.
    Infeasible { best_delta: f64, best_potential: f64 },
}

/// Two-solution threshold `prefactor · inf_δ δ^p/F(δ)`, with the infimum
/// taken over `delta_range` (default `[1e-3, 1e3]`) by the 1-D minimizer.
pub fn corollary_threshold(
    tc: &TheoremConstants,
    nl: &Nonlinearity,
    delta_range: (f64, f64),
) -> Result<ThresholdOutcome> {
    let (lo, hi) = delta_range;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Validation(format!(
            "threshold range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    let p = tc.p;
    let phi = |d: f64| match nl.primitive(d, F_TOL) {
        Ok(f) if f > 0.0 => d.powf(p) / f,
        _ => f64::INFINITY,
    };
    let (delta_star, inf_ratio) = minimize_scalar(phi, lo, hi, 1e-9 * (hi - lo))?;
    if !inf_ratio.is_finite() {
        // Report the least-negative potential seen on a diagnostic grid.
        let mut best = (lo, f64::NEG_INFINITY);
        for i in 0..256 {
            let d = lo * (hi / lo).powf(i as f64 / 255.0);
            let f = nl.primitive(d, F_TOL)?;
            if f > best.1 {
                best = (d, f);
            }
        }
        return Ok(ThresholdOutcome::Infeasible { best_delta: best.0, best_potential: best.1 });
    }
    let edge = (hi / lo).powf(1.0 / 63.0); // one coarse-grid cell
    Ok(ThresholdOutcome::Feasible(ThresholdResult {
        threshold: tc.prefactor_c * inf_ratio,
        prefactor: tc.prefactor_c,
        inf_ratio,
        delta_star,
        boundary_suspect: delta_star <= lo * edge || delta_star >= hi / edge,
    }))
}
