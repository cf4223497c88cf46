//! Problem data: divergence-form operator specifications with structural
//! spot-checks, nonlinearities with growth certificates and cached
//! primitives, and positive weights with certified bounds.

use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::Domain;
use crate::numerics::{integrate_segmented, symmetric_eigen_bounds};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type DensityFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub enum OperatorKind {
    /// Density |ξ|^p / p, flux |ξ|^{p-2} ξ.
    PLaplacian,
    /// Density ½ ξᵀM ξ with a constant symmetric matrix M (p = 2).
    Matrix { entries: Vec<f64>, dim: usize },
    /// Caller-provided density A(x, ξ) and flux a(x, ξ) = ∇_ξ A.
    General { density: DensityFn, flux: GradientFn, isotropic: bool },
}

/// A divergence-form operator together with its structural certificate:
/// exponent `p`, two-sided ellipticity bounds, the growth constant of the
/// flux, and (optionally) a p-uniform convexity modulus.
#[derive(Clone)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub p: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub growth_c: f64,
    pub convexity_modulus: Option<f64>,
}

impl OperatorSpec {
    /// The usual p-Laplacian: Λ₁ = Λ₂ = 1/p; Clarkson gives the convexity
    /// modulus 1/(p 2^p) for p >= 2.
    pub fn p_laplacian(p: f64) -> Result<OperatorSpec> {
        if !(p > 1.0) {
            return Err(Error::Validation(format!("operator.p: need p > 1, got {p}")));
        }
        Ok(OperatorSpec {
            kind: OperatorKind::PLaplacian,
            p,
            lambda1: 1.0 / p,
            lambda2: 1.0 / p,
            growth_c: 1.0,
            convexity_modulus: if p >= 2.0 { Some(1.0 / (p * 2.0f64.powf(p))) } else { None },
        })
    }

    /// Constant symmetric coefficient matrix, density ½ ξᵀM ξ. Ellipticity
    /// bounds come from the eigenvalue range of M.
    pub fn matrix(entries: Vec<f64>, dim: usize) -> Result<OperatorSpec> {
        let (lo, hi) = symmetric_eigen_bounds(&entries, dim)?;
        if !(lo > 0.0) {
            return Err(Error::Validation(format!(
                "operator.matrix: not positive definite (min eigenvalue {lo})"
            )));
        }
        Ok(OperatorSpec {
            kind: OperatorKind::Matrix { entries, dim },
            p: 2.0,
            lambda1: 0.5 * lo,
            lambda2: 0.5 * hi,
            growth_c: hi,
            convexity_modulus: Some(lo / 8.0),
        })
    }

    pub fn identity_matrix(dim: usize) -> OperatorSpec {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        OperatorSpec::matrix(entries, dim).expect("identity is positive definite")
    }

    /// Fully general operator; the certificate values are caller-supplied and
    /// only spot-checked.
    pub fn general(
        density: DensityFn,
        flux: GradientFn,
        p: f64,
        lambda1: f64,
        lambda2: f64,
        growth_c: f64,
        convexity_modulus: Option<f64>,
        isotropic: bool,
    ) -> OperatorSpec {
        OperatorSpec {
            kind: OperatorKind::General { density, flux, isotropic },
            p,
            lambda1,
            lambda2,
            growth_c,
            convexity_modulus,
        }
    }

    /// Whether A(x, ξ) depends on ξ only through |ξ| and not on x, which is
    /// what the radial solver path requires.
    pub fn is_isotropic(&self) -> bool {
        match &self.kind {
            OperatorKind::PLaplacian => true,
            OperatorKind::Matrix { entries, dim } => {
                let d = *dim;
                let diag = entries[0];
                for i in 0..d {
                    for j in 0..d {
                        let want = if i == j { diag } else { 0.0 };
                        if (entries[i * d + j] - want).abs() > 1e-14 * (1.0 + diag.abs()) {
                            return false;
                        }
                    }
                }
                true
            }
            OperatorKind::General { isotropic, .. } => *isotropic,
        }
    }

    pub fn density(&self, x: &[f64], xi: &[f64]) -> f64 {
        match &self.kind {
            OperatorKind::PLaplacian => {
                let n2: f64 = xi.iter().map(|v| v * v).sum();
                n2.powf(0.5 * self.p) / self.p
            }
            OperatorKind::Matrix { entries, dim } => {
                let d = *dim;
                let mut acc = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        acc += entries[i * d + j] * xi[i] * xi[j];
                    }
                }
                0.5 * acc
            }
            OperatorKind::General { density, .. } => density(x, xi),
        }
    }

    /// Flux a(x, ξ) written into `out`. `eps` is the regularization used for
    /// p < 2 (kernel `(|ξ|² + ε²)^{(p-2)/2} ξ`); pass 0 for p >= 2.
    pub fn flux_into(&self, x: &[f64], xi: &[f64], eps: f64, out: &mut [f64]) {
        match &self.kind {
            OperatorKind::PLaplacian => {
                let n2: f64 = xi.iter().map(|v| v * v).sum();
                let scale = if self.p >= 2.0 {
                    if n2 == 0.0 { 0.0 } else { n2.powf(0.5 * (self.p - 2.0)) }
                } else {
                    (n2 + eps * eps).powf(0.5 * (self.p - 2.0))
                };
                for (o, v) in out.iter_mut().zip(xi) {
                    *o = scale * v;
                }
            }
            OperatorKind::Matrix { entries, dim } => {
                let d = *dim;
                for i in 0..d {
                    let mut acc = 0.0;
                    for j in 0..d {
                        acc += entries[i * d + j] * xi[j];
                    }
                    out[i] = acc;
                }
            }
            OperatorKind::General { flux, .. } => {
                let v = flux(x, xi);
                out.copy_from_slice(&v);
            }
        }
    }

    /// Density along a single direction (radial reduction). Only meaningful
    /// for isotropic operators.
    pub fn density_radial(&self, g: f64) -> f64 {
        debug_assert!(self.is_isotropic());
        match &self.kind {
            OperatorKind::PLaplacian => g.abs().powf(self.p) / self.p,
            OperatorKind::Matrix { entries, .. } => 0.5 * entries[0] * g * g,
            OperatorKind::General { density, .. } => {
                // isotropic by contract: evaluate along the first axis
                let dim = 8; // generous scratch; unused axes are zero
                let mut xi = vec![0.0; dim];
                xi[0] = g;
                density(&vec![0.0; dim], &xi)
            }
        }
    }

    /// Radial component of the flux for an isotropic operator.
    pub fn flux_radial(&self, g: f64, eps: f64) -> f64 {
        debug_assert!(self.is_isotropic());
        match &self.kind {
            OperatorKind::PLaplacian => {
                if self.p >= 2.0 {
                    if g == 0.0 { 0.0 } else { g.abs().powf(self.p - 2.0) * g }
                } else {
                    (g * g + eps * eps).powf(0.5 * (self.p - 2.0)) * g
                }
            }
            OperatorKind::Matrix { entries, .. } => entries[0] * g,
            OperatorKind::General { flux, .. } => {
                let dim = 8;
                let mut xi = vec![0.0; dim];
                xi[0] = g;
                flux(&vec![0.0; dim], &xi)[0]
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Structural condition spot-checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct AlphaWitness {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Option<Vec<f64>>,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Largest normalized violation seen (<= tol means pass).
    pub worst_margin: f64,
    pub witness: Option<AlphaWitness>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AlphaReport {
    pub conditions: Vec<ConditionCheck>,
    /// False when no convexity modulus was supplied: the convexity check then
    /// only covers the k = 0 (midpoint convexity) form.
    pub modulus_verified: bool,
    pub samples: usize,
}

impl AlphaReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }
}

fn sample_in_domain(domain: &Domain, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dim = domain.dim();
    match domain {
        Domain::Box2d { sides } => {
            vec![rng.gen::<f64>() * sides[0], rng.gen::<f64>() * sides[1]]
        }
        _ => {
            // Ball and Custom (inscribed ball): radius^N-corrected uniform draw.
            let center = domain.incenter();
            let radius = domain.inradius();
            let mut dir: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
            for (d, c) in dir.iter_mut().zip(&center) {
                *d = c + r * *d / norm;
            }
            dir
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; tails beyond ~8 sigma are irrelevant here.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_direction_scaled(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    // log-uniform magnitudes catch growth violations at both ends
    let mag = 10.0f64.powf(rng.gen_range(-3.0..3.0));
    for x in v.iter_mut() {
        *x *= mag / norm;
    }
    v
}

/// Spot-check the five structural conditions on random (x, ξ, η) triples:
/// normalization A(x,0)=0, flux growth, p-uniform convexity (with the
/// declared modulus when present), p-subhomogeneity 0 <= a·ξ <= pA, and the
/// two-sided ellipticity bounds. Reports one verdict per condition with the
/// worst witness; never silently passes.
pub fn check_alpha(
    op: &OperatorSpec,
    domain: &Domain,
    samples: usize,
    tol: f64,
    seed: u64,
) -> AlphaReport {
    assert!(samples >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = domain.dim();
    let p = op.p;
    let k_mod = op.convexity_modulus.unwrap_or(0.0);

    let mut worst: [(f64, Option<AlphaWitness>); 5] =
        std::array::from_fn(|_| (f64::NEG_INFINITY, None));
    let mut record = |idx: usize, margin: f64, wit: AlphaWitness| {
        if margin > worst[idx].0 {
            worst[idx] = (margin, Some(wit));
        }
    };

    let mut flux_buf = vec![0.0; dim];
    for _ in 0..samples {
        let x = sample_in_domain(domain, &mut rng);
        let xi = random_direction_scaled(dim, &mut rng);
        let eta = random_direction_scaled(dim, &mut rng);

        let zero = vec![0.0; dim];
        let a0 = op.density(&x, &zero);
        record(0, a0.abs(), AlphaWitness {
            x: x.clone(),
            xi: zero.clone(),
            eta: None,
            detail: format!("A(x,0) = {a0:.3e}"),
        });

        let xi_norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let a_xi = op.density(&x, &xi);
        op.flux_into(&x, &xi, 0.0, &mut flux_buf);
        let flux_norm = flux_buf.iter().map(|v| v * v).sum::<f64>().sqrt();
        let flux_dot_xi: f64 = flux_buf.iter().zip(&xi).map(|(a, b)| a * b).sum();

        // growth: |a(x,ξ)| <= c (1 + |ξ|^{p-1})
        let bound = op.growth_c * (1.0 + xi_norm.powf(p - 1.0));
        record(1, (flux_norm - bound) / bound.max(1e-300), AlphaWitness {
            x: x.clone(),
            xi: xi.clone(),
            eta: None,
            detail: format!("|a| = {flux_norm:.6e}, bound = {bound:.6e}"),
        });

        // p-uniform convexity at the midpoint
        let a_eta = op.density(&x, &eta);
        let mid: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| 0.5 * (a + b)).collect();
        let a_mid = op.density(&x, &mid);
        let diff_norm = xi
            .iter()
            .zip(&eta)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let conv_scale = a_xi.abs().max(a_eta.abs()).max(1.0);
        let conv_violation = a_mid + k_mod * diff_norm.powf(p) - 0.5 * a_xi - 0.5 * a_eta;
        record(2, conv_violation / conv_scale, AlphaWitness {
            x: x.clone(),
            xi: xi.clone(),
            eta: Some(eta.clone()),
            detail: format!(
                "A(mid) + k|ξ-η|^p - ½A(ξ) - ½A(η) = {conv_violation:.3e} (k = {k_mod:.3e})"
            ),
        });

        // p-subhomogeneity: 0 <= a·ξ <= p A
        let sub_scale = a_xi.abs().max(flux_dot_xi.abs()).max(1.0);
        let sub_violation = (-flux_dot_xi).max(flux_dot_xi - p * a_xi);
        record(3, sub_violation / sub_scale, AlphaWitness {
            x: x.clone(),
            xi: xi.clone(),
            eta: None,
            detail: format!("a·ξ = {flux_dot_xi:.6e}, pA = {:.6e}", p * a_xi),
        });

        // two-sided ellipticity: Λ₁|ξ|^p <= A <= Λ₂|ξ|^p
        let xi_p = xi_norm.powf(p);
        let ell_scale = (op.lambda2 * xi_p).max(1e-300);
        let ell_violation = (op.lambda1 * xi_p - a_xi).max(a_xi - op.lambda2 * xi_p);
        record(4, ell_violation / ell_scale, AlphaWitness {
            x: x.clone(),
            xi: xi.clone(),
            eta: None,
            detail: format!(
                "Λ₁|ξ|^p = {:.6e}, A = {a_xi:.6e}, Λ₂|ξ|^p = {:.6e}",
                op.lambda1 * xi_p,
                op.lambda2 * xi_p
            ),
        });
    }

    let names = [
        "alpha1 (A(x,0) = 0)",
        "alpha2 (flux growth)",
        "alpha3 (p-uniform convexity)",
        "alpha4 (p-subhomogeneity)",
        "alpha5 (two-sided ellipticity)",
    ];
    let conditions = names
        .iter()
        .zip(worst.iter_mut())
        .map(|(name, (margin, wit))| ConditionCheck {
            name,
            passed: *margin <= tol,
            worst_margin: *margin,
            witness: if *margin <= tol { None } else { wit.take() },
        })
        .collect();
    AlphaReport {
        conditions,
        modulus_verified: op.convexity_modulus.is_some(),
        samples,
    }
}

// ---------------------------------------------------------------------------
// Nonlinearities
// ---------------------------------------------------------------------------

/// Spacing of the cached primitive anchors.
const ANCHOR_STEP: f64 = 0.5;
const ANCHOR_TOL: f64 = 1e-12;

/// A continuous nonlinearity together with its growth certificate
/// `|f(t)| <= a1 + a2 |t|^{q-1}` and a cached primitive `F(s) = ∫_0^s f`.
///
/// The growth certificate is user input: it is spot-checked by
/// [`check_growth`], never derived.
pub struct Nonlinearity {
    pub name: Option<String>,
    f: ScalarFn,
    pub a1: f64,
    pub a2: f64,
    pub q: f64,
    pub breakpoints: Vec<f64>,
    exact_primitive: Option<ScalarFn>,
    /// Monotone table of (s, F(s)) anchors at multiples of [`ANCHOR_STEP`],
    /// grown lazily under an internal lock; concurrent reads are cheap.
    cache: RwLock<Vec<(f64, f64)>>,
}

impl Clone for Nonlinearity {
    fn clone(&self) -> Self {
        Nonlinearity {
            name: self.name.clone(),
            f: self.f.clone(),
            a1: self.a1,
            a2: self.a2,
            q: self.q,
            breakpoints: self.breakpoints.clone(),
            exact_primitive: self.exact_primitive.clone(),
            cache: RwLock::new(self.cache.read().unwrap().clone()),
        }
    }
}

impl Nonlinearity {
    pub fn from_fn(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a1: f64,
        a2: f64,
        q: f64,
    ) -> Nonlinearity {
        Nonlinearity {
            name: None,
            f: Arc::new(f),
            a1,
            a2,
            q,
            breakpoints: Vec::new(),
            exact_primitive: None,
            cache: RwLock::new(vec![(0.0, 0.0)]),
        }
    }

    pub fn with_breakpoints(mut self, bps: Vec<f64>) -> Nonlinearity {
        self.breakpoints = bps;
        self
    }

    pub fn with_exact_primitive(
        mut self,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Nonlinearity {
        self.exact_primitive = Some(Arc::new(g));
        self
    }

    pub fn named(mut self, name: &str) -> Nonlinearity {
        self.name = Some(name.to_string());
        self
    }

    /// Build from a parsed expression in the single variable `t`.
    pub fn from_expr(src: &str, a1: f64, a2: f64, q: f64) -> Result<Nonlinearity> {
        let expr = Expr::parse(src, &["t"])?;
        Ok(Nonlinearity::from_fn(move |t| expr.eval(&[t]), a1, a2, q).named(src))
    }

    /// `g(t) = log(1 + t^4)`, certified in class q = 6 with a1 = a2 = 1
    /// (its potential satisfies G(s) <= s^2). No closed-form primitive is
    /// attached: quadrature keeps this path independently checkable.
    pub fn log_quartic() -> Nonlinearity {
        Nonlinearity::from_fn(|t: f64| (1.0 + t.powi(4)).ln(), 1.0, 1.0, 6.0).named("log-quartic")
    }

    /// The capped-growth nonlinearity
    /// `h(t) = 1 + |t|^{q-1}` for |t| <= r, `(1+r²)(1+r^{q-1})/(1+t²)` beyond,
    /// certified with a1 = a2 = 1. Ships with its exact (odd) primitive and
    /// breakpoints at ±r.
    pub fn piecewise_h(q: f64, r: f64) -> Result<Nonlinearity> {
        if !(q > 2.0) {
            return Err(Error::Validation(format!("piecewise-h: need q > 2, got {q}")));
        }
        if !(r > 0.0) {
            return Err(Error::Validation(format!("piecewise-h: need r > 0, got {r}")));
        }
        let cap = (1.0 + r * r) * (1.0 + r.powf(q - 1.0));
        let h = move |t: f64| {
            if t.abs() <= r {
                1.0 + t.abs().powf(q - 1.0)
            } else {
                cap / (1.0 + t * t)
            }
        };
        let h_at_r = r + r.powf(q) / q;
        let primitive = move |s: f64| {
            let a = s.abs();
            let v = if a <= r {
                a + a.powf(q) / q
            } else {
                h_at_r + cap * (a.atan() - r.atan())
            };
            v * s.signum()
        };
        Ok(Nonlinearity::from_fn(h, 1.0, 1.0, q)
            .with_breakpoints(vec![-r, r])
            .with_exact_primitive(primitive)
            .named("piecewise-h"))
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn has_exact_primitive(&self) -> bool {
        self.exact_primitive.is_some()
    }

    /// `F(s) = ∫_0^s f(t) dt` to within `tol`, negative `s` by the sign
    /// convention of the oriented integral. Uses the exact primitive when one
    /// is attached, otherwise cached cumulative quadrature with breakpoints
    /// as panel boundaries.
    pub fn primitive(&self, s: f64, tol: f64) -> Result<f64> {
        if let Some(g) = &self.exact_primitive {
            return Ok(g(s));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let cells = (s.abs() / ANCHOR_STEP).ceil().max(1.0);
        if tol < cells * ANCHOR_TOL * 10.0 {
            // Tighter than the cache guarantees: integrate directly.
            return self.oriented_integral(0.0, s, tol);
        }
        let anchor = (s / ANCHOR_STEP).trunc() * ANCHOR_STEP;
        let base = self.anchor_value(anchor)?;
        Ok(base + self.oriented_integral(anchor, s, tol.min(1e-10))?)
    }

    /// Primitive for solver hot loops: never fails, falls back to 0-anchored
    /// best effort on quadrature trouble (which cannot occur for the builtin
    /// instances, all of which carry exact primitives or smooth integrands).
    pub fn primitive_lenient(&self, s: f64) -> f64 {
        self.primitive(s, 1e-9).unwrap_or(0.0)
    }

    fn oriented_integral(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let f = &self.f;
        if a <= b {
            Ok(integrate_segmented(|t| f(t), a, b, &self.breakpoints, tol)?.value)
        } else {
            Ok(-integrate_segmented(|t| f(t), b, a, &self.breakpoints, tol)?.value)
        }
    }

    /// Cumulative value at a multiple of [`ANCHOR_STEP`], building any missing
    /// intermediate anchors from the nearest cached one toward zero.
    fn anchor_value(&self, a: f64) -> Result<f64> {
        if a == 0.0 {
            return Ok(0.0);
        }
        {
            let cache = self.cache.read().unwrap();
            if let Some(v) = lookup_anchor(&cache, a) {
                return Ok(v);
            }
        }
        let mut cache = self.cache.write().unwrap();
        if let Some(v) = lookup_anchor(&cache, a) {
            return Ok(v);
        }
        // nearest cached anchor strictly between 0 and a (same sign)
        let sign = a.signum();
        let mut best = (0.0, 0.0);
        for &(s, v) in cache.iter() {
            if s * sign > best.0 * sign && s * sign <= a * sign && s.signum() == sign {
                best = (s, v);
            }
        }
        let (mut pos, mut acc) = best;
        while (a - pos).abs() > 0.25 * ANCHOR_STEP {
            let next = pos + sign * ANCHOR_STEP;
            acc += self.oriented_integral(pos, next, ANCHOR_TOL)?;
            insort_anchor(&mut cache, next, acc);
            pos = next;
        }
        Ok(acc)
    }
}

fn lookup_anchor(cache: &[(f64, f64)], s: f64) -> Option<f64> {
    cache
        .binary_search_by(|(k, _)| k.partial_cmp(&s).unwrap())
        .ok()
        .map(|i| cache[i].1)
}

fn insort_anchor(cache: &mut Vec<(f64, f64)>, s: f64, v: f64) {
    if let Err(i) = cache.binary_search_by(|(k, _)| k.partial_cmp(&s).unwrap()) {
        cache.insert(i, (s, v));
    }
}

// ---------------------------------------------------------------------------
// Hypothesis probes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct SpotVerdict {
    pub passed: bool,
    pub worst_t: f64,
    /// Positive values measure the size of the worst violation.
    pub worst_margin: f64,
    pub samples: usize,
}

/// Check `|f(t)| <= a1 + a2 |t|^{q-1}` on a symmetric grid over `[-t_max, t_max]`
/// (linear + log-spaced points, breakpoints included).
pub fn check_growth(nl: &Nonlinearity, t_max: f64, samples: usize) -> SpotVerdict {
    assert!(t_max > 0.0);
    let mut ts: Vec<f64> = vec![0.0];
    for bp in &nl.breakpoints {
        if bp.abs() <= t_max {
            ts.push(*bp);
        }
    }
    let n_lin = samples / 2;
    let n_log = samples - n_lin;
    for i in 0..n_lin {
        let t = t_max * (i as f64 + 1.0) / n_lin as f64;
        ts.push(t);
        ts.push(-t);
    }
    for i in 0..n_log {
        let t = t_max * 10.0f64.powf(-(i as f64) * 6.0 / n_log as f64);
        ts.push(t);
        ts.push(-t);
    }
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for &t in &ts {
        let bound = nl.a1 + nl.a2 * t.abs().powf(nl.q - 1.0);
        let margin = (nl.f(t).abs() - bound) / bound.max(1.0);
        if margin > worst.0 {
            worst = (margin, t);
        }
    }
    SpotVerdict {
        passed: worst.0 <= 1e-9,
        worst_t: worst.1,
        worst_margin: worst.0,
        samples: ts.len(),
    }
}

/// Sign condition on the potential. With `strict = false` this is the relaxed
/// form (`F >= 0` on ]0, delta[ only); `strict = true` additionally samples a
/// wide range of `s > delta`. `F` is checked against `-tol (1 + |F(delta)|)`.
pub fn check_h0(
    nl: &Nonlinearity,
    delta: f64,
    samples: usize,
    strict: bool,
    tol: f64,
) -> Result<SpotVerdict> {
    assert!(delta > 0.0);
    let f_delta = nl.primitive(delta, tol.max(1e-12))?.abs();
    let floor = -tol * (1.0 + f_delta);
    let hi = if strict { (10.0 * delta).max(100.0) } else { delta };
    let mut worst = (f64::NEG_INFINITY, 0.0);
    let mut count = 0;
    for i in 1..=samples {
        let s = hi * i as f64 / (samples as f64 + 1.0);
        if !strict && s >= delta {
            break;
        }
        let val = nl.primitive(s, tol.max(1e-12))?;
        count += 1;
        let margin = floor - val; // positive when F dips below the floor
        if margin > worst.0 {
            worst = (margin, s);
        }
    }
    Ok(SpotVerdict {
        passed: worst.0 <= 0.0,
        worst_t: worst.1,
        worst_margin: worst.0,
        samples: count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum H1Verdict {
    /// The ratio decays by at least the requested factor per decade.
    NumericallyConsistent,
    /// Neither clear decay nor clear growth at the probed range.
    Inconclusive,
    /// The ratio grows or fails to decay at all.
    Violated,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct H1Report {
    pub verdict: H1Verdict,
    /// Max of |f(t)|/|t|^{p-1} over the last three decade bands, oldest first.
    pub decade_maxes: [f64; 3],
    pub note: String,
}

/// Numeric probe of the sublinearity-at-infinity hypothesis
/// `f(t)/|t|^{p-1} -> 0`. A semi-decision: the report always states that the
/// hypothesis is asymptotic and must be certified by the user.
pub fn check_h1(nl: &Nonlinearity, p: f64, probe_max: f64, decay_factor: f64) -> H1Report {
    assert!(probe_max > 1.0);
    assert!(decay_factor >= 1.0);
    let ratio = |t: f64| nl.f(t).abs() / t.abs().powf(p - 1.0);
    let band_max = |lo: f64, hi: f64| -> f64 {
        let mut m = 0.0f64;
        for i in 0..=16 {
            let t = lo * (hi / lo).powf(i as f64 / 16.0);
            m = m.max(ratio(t)).max(ratio(-t));
        }
        m
    };
    let maxes = [
        band_max(probe_max / 1000.0, probe_max / 100.0),
        band_max(probe_max / 100.0, probe_max / 10.0),
        band_max(probe_max / 10.0, probe_max),
    ];
    const FLOOR: f64 = 1e-14;
    let verdict = if maxes[2] <= FLOOR
        || (maxes[1] <= maxes[0] / decay_factor && maxes[2] <= maxes[1] / decay_factor)
    {
        H1Verdict::NumericallyConsistent
    } else if maxes[2] >= 0.99 * maxes[0] && maxes[2] > FLOOR {
        H1Verdict::Violated
    } else {
        H1Verdict::Inconclusive
    };
    H1Report {
        verdict,
        decade_maxes: maxes,
        note: "sublinearity at infinity is an asymptotic hypothesis; this probe samples finitely \
               many points and the user certifies the limit"
            .to_string(),
    }
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub enum WeightKind {
    Constant(f64),
    /// k(x) = offset + gradient · x
    Affine { gradient: Vec<f64>, offset: f64 },
    /// Arbitrary positive field with sampled bounds.
    Field { k: FieldFn, samples: usize },
}

/// A positive continuous weight with certified bounds `k_min <= k <= k_sup`
/// on the closed domain. For sampled fields the bounds are widened by the
/// observed modulus-of-continuity slack, so `k_min` errs low (the safe
/// direction for the certified interval).
#[derive(Clone)]
pub struct Weight {
    pub kind: WeightKind,
    pub k_min: f64,
    pub k_sup: f64,
}

impl Weight {
    pub fn constant(c: f64) -> Result<Weight> {
        if !(c > 0.0) {
            return Err(Error::Validation(format!("weight must be positive, got {c}")));
        }
        Ok(Weight { kind: WeightKind::Constant(c), k_min: c, k_sup: c })
    }

    pub fn one() -> Weight {
        Weight::constant(1.0).unwrap()
    }

    /// Affine weight with exact extremes over a Ball or Box2d domain.
    pub fn affine(gradient: Vec<f64>, offset: f64, domain: &Domain) -> Result<Weight> {
        if gradient.len() != domain.dim() {
            return Err(Error::Validation(format!(
                "weight.gradient: {} coordinates for dim {}",
                gradient.len(),
                domain.dim()
            )));
        }
        let gnorm = gradient.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (lo, hi) = match domain {
            Domain::Ball { radius, center, .. } => {
                let at_center: f64 =
                    offset + gradient.iter().zip(center).map(|(g, c)| g * c).sum::<f64>();
                (at_center - gnorm * radius, at_center + gnorm * radius)
            }
            Domain::Box2d { sides } => {
                let mut lo = offset;
                let mut hi = offset;
                for (g, s) in gradient.iter().zip(sides) {
                    if *g >= 0.0 {
                        hi += g * s;
                    } else {
                        lo += g * s;
                    }
                }
                (lo, hi)
            }
            Domain::Custom { .. } => {
                return Err(Error::Validation(
                    "weight bounds on a custom domain cannot be derived (the geometry is not \
                     known); supply kmin/ksup explicitly"
                        .into(),
                ));
            }
        };
        if !(lo > 0.0) {
            return Err(Error::Validation(format!(
                "weight is not positive on the domain (min {lo})"
            )));
        }
        Ok(Weight { kind: WeightKind::Affine { gradient, offset }, k_min: lo, k_sup: hi })
    }

    /// Sampled bounds for an arbitrary field on a Ball or Box2d domain. The
    /// sampler subtracts its observed modulus-of-continuity slack from the
    /// minimum (and adds it to the supremum).
    pub fn from_field(
        k: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        domain: &Domain,
        samples: usize,
        seed: u64,
    ) -> Result<Weight> {
        if matches!(domain, Domain::Custom { .. }) {
            return Err(Error::Validation(
                "weight bounds on a custom domain cannot be sampled; supply kmin/ksup explicitly"
                    .into(),
            ));
        }
        let k: FieldFn = Arc::new(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = domain.dim();
        let scale = match domain {
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Box2d { sides } => sides[0].max(sides[1]),
            Domain::Custom { .. } => unreachable!(),
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut max_rate = 0.0f64;
        let h = 1e-4 * scale;
        for _ in 0..samples.max(16) {
            let x = sample_in_domain(domain, &mut rng);
            let v = k(&x);
            if !v.is_finite() {
                return Err(Error::Eval(format!("weight is non-finite at {x:?}")));
            }
            lo = lo.min(v);
            hi = hi.max(v);
            let mut xp = x.clone();
            let axis = rng.gen_range(0..dim);
            xp[axis] += h;
            let rate = (k(&xp) - v).abs() / h;
            max_rate = max_rate.max(rate);
        }
        // covering radius heuristic for the sample cloud
        let cover = scale / (samples.max(16) as f64).powf(1.0 / dim as f64);
        let slack = max_rate * cover;
        let k_min = lo - slack;
        if !(k_min > 0.0) {
            return Err(Error::Validation(format!(
                "sampled weight minimum {lo:.6e} minus continuity slack {slack:.6e} is not \
                 positive; supply kmin/ksup explicitly"
            )));
        }
        Ok(Weight {
            kind: WeightKind::Field { k, samples },
            k_min,
            k_sup: hi + slack,
        })
    }

    /// Field with caller-certified bounds.
    pub fn from_field_with_bounds(
        k: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        k_min: f64,
        k_sup: f64,
    ) -> Result<Weight> {
        if !(k_min > 0.0 && k_sup >= k_min) {
            return Err(Error::Validation(format!(
                "weight bounds must satisfy 0 < kmin <= ksup, got [{k_min}, {k_sup}]"
            )));
        }
        Ok(Weight { kind: WeightKind::Field { k: Arc::new(k), samples: 0 }, k_min, k_sup })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Affine { gradient, offset } => {
                offset + gradient.iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>()
            }
            WeightKind::Field { k, .. } => k(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, WeightKind::Constant(_))
    }
}
