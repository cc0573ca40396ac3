//! Classical Liouville densities on the phase plane.
//!
//! Every density is centred at the origin. Built-in families carry their
//! physical scales (`beta` in length units, `gamma` in momentum units,
//! `hbar` in action units); downstream spectra only depend on the
//! dimensionless combination `s = beta * gamma / hbar`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::special_functions::{finite_rule, QuadratureRule};

/// Half-width, in units of the scale parameters, of the box used to
/// integrate Gaussian densities. `exp(-100)` is far below double precision.
pub const GAUSSIAN_EXTENT: f64 = 10.0;

const START_POINTS: usize = 32;
const MAX_POINTS: usize = 1024;

/// Scale parameters shared by the centred families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseScales {
    beta: f64,
    gamma: f64,
    hbar: f64,
}

impl PhaseScales {
    pub fn new(beta: f64, gamma: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { beta, gamma, hbar })
    }

    /// Scales with `beta = gamma = sqrt(s)` and `hbar = 1`.
    pub fn symmetric(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
        }
        Self::new(s.sqrt(), s.sqrt(), 1.0)
    }

    /// Scales with a given `s`, aspect ratio `beta / gamma` and `hbar`.
    pub fn from_s(s: f64, aspect: f64, hbar: f64) -> Result<Self> {
        if !(s > 0.0 && aspect > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "s and aspect must be positive, got {s} and {aspect}"
            )));
        }
        Self::new((s * aspect * hbar).sqrt(), (s * hbar / aspect).sqrt(), hbar)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Dimensionless `beta * gamma / hbar`.
    pub fn s(&self) -> f64 {
        self.beta * self.gamma / self.hbar
    }

    /// `beta / gamma`; fixes the Fock basis together with `hbar`.
    pub fn aspect(&self) -> f64 {
        self.beta / self.gamma
    }

    /// Squared dimensionless radius `q²/β² + p²/γ²`.
    fn radius_sq(&self, q: f64, p: f64) -> f64 {
        let x = q / self.beta;
        let y = p / self.gamma;
        x * x + y * y
    }
}

/// `exp(-(q²/β² + p²/γ²)) / (π β γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDensity {
    pub scales: PhaseScales,
}

impl GaussianDensity {
    pub fn new(beta: f64, gamma: f64, hbar: f64) -> Result<Self> {
        Ok(Self { scales: PhaseScales::new(beta, gamma, hbar)? })
    }

    pub fn with_s(s: f64) -> Result<Self> {
        Ok(Self { scales: PhaseScales::symmetric(s)? })
    }

    pub fn evaluate(&self, q: f64, p: f64) -> f64 {
        let sc = &self.scales;
        (-sc.radius_sq(q, p)).exp() / (PI * sc.beta * sc.gamma)
    }

    pub fn s(&self) -> f64 {
        self.scales.s()
    }
}

/// Constant `1/(π β γ)` inside the ellipse `q²/β² + p²/γ² <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformEllipseDensity {
    pub scales: PhaseScales,
}

impl UniformEllipseDensity {
    pub fn new(beta: f64, gamma: f64, hbar: f64) -> Result<Self> {
        Ok(Self { scales: PhaseScales::new(beta, gamma, hbar)? })
    }

    pub fn with_s(s: f64) -> Result<Self> {
        Ok(Self { scales: PhaseScales::symmetric(s)? })
    }

    pub fn evaluate(&self, q: f64, p: f64) -> f64 {
        let sc = &self.scales;
        if sc.radius_sq(q, p) <= 1.0 {
            1.0 / (PI * sc.beta * sc.gamma)
        } else {
            0.0
        }
    }

    pub fn s(&self) -> f64 {
        self.scales.s()
    }
}

pub type RadialProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type PhaseSampler = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Density `g(q²/β² + p²/γ²)`, zero beyond `support_radius` (measured in
/// the dimensionless radius, so the support is `q²/β² + p²/γ² <= R²`).
///
/// `decay_rate` is an optional hint `κ` for profiles that fall off like
/// `exp(-κ u)`; the radial quantiser uses it to match its semi-infinite
/// rule to the integrand.
#[derive(Clone)]
pub struct RadialDensity {
    profile: RadialProfile,
    pub scales: PhaseScales,
    support_radius: Option<f64>,
    decay_rate: f64,
}

impl fmt::Debug for RadialDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialDensity")
            .field("scales", &self.scales)
            .field("support_radius", &self.support_radius)
            .field("decay_rate", &self.decay_rate)
            .finish_non_exhaustive()
    }
}

impl RadialDensity {
    pub fn new<F>(profile: F, scales: PhaseScales) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { profile: Arc::new(profile), scales, support_radius: None, decay_rate: 0.0 }
    }

    pub fn with_support_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "support radius must be positive, got {radius}"
            )));
        }
        self.support_radius = Some(radius);
        Ok(self)
    }

    pub fn with_decay_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("decay rate must be >= 0, got {rate}")));
        }
        self.decay_rate = rate;
        Ok(self)
    }

    pub fn from_gaussian(g: &GaussianDensity) -> Self {
        let norm = 1.0 / (PI * g.scales.beta * g.scales.gamma);
        Self::new(move |u| norm * (-u).exp(), g.scales).with_decay_rate(1.0).unwrap()
    }

    pub fn from_uniform_ellipse(e: &UniformEllipseDensity) -> Self {
        let norm = 1.0 / (PI * e.scales.beta * e.scales.gamma);
        Self::new(move |u| if u <= 1.0 { norm } else { 0.0 }, e.scales)
            .with_support_radius(1.0)
            .unwrap()
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// Profile value at the squared dimensionless radius `u`.
    pub fn profile(&self, u: f64) -> f64 {
        match self.support_radius {
            Some(r) if u > r * r => 0.0,
            _ => (self.profile)(u),
        }
    }

    pub fn evaluate(&self, q: f64, p: f64) -> f64 {
        self.profile(self.scales.radius_sq(q, p))
    }

    /// `∫_0^∞ u^power g(u) du` over the profile's support.
    fn radial_moment(&self, power: i32) -> Result<f64> {
        let f = |u: f64| u.powi(power) * self.profile(u);
        match self.support_radius {
            Some(r) => integrate_interval(&f, 0.0, r * r),
            None => integrate_half_line(&f),
        }
    }

    /// Profile extent (in dimensionless radius) beyond which it is negligible.
    fn effective_radius(&self) -> f64 {
        if let Some(r) = self.support_radius {
            return r;
        }
        let peak = self.profile(0.0).abs().max(f64::MIN_POSITIVE);
        let mut r = 4.0;
        while r < 1e4 && self.profile(r * r).abs() > 1e-20 * peak {
            r *= 1.5;
        }
        r.max(GAUSSIAN_EXTENT)
    }
}

/// Integration support of a [`GeneralDensity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Box { q_min: f64, q_max: f64, p_min: f64, p_max: f64 },
    /// Centred ellipse `q²/a² + p²/b² <= 1`.
    Ellipse { q_semi: f64, p_semi: f64 },
}

impl Support {
    pub fn centered_box(q_half: f64, p_half: f64) -> Result<Self> {
        if !(q_half > 0.0 && p_half > 0.0 && q_half.is_finite() && p_half.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "box half-widths must be positive, got {q_half} and {p_half}"
            )));
        }
        Ok(Support::Box { q_min: -q_half, q_max: q_half, p_min: -p_half, p_max: p_half })
    }

    pub fn contains(&self, q: f64, p: f64) -> bool {
        match *self {
            Support::Box { q_min, q_max, p_min, p_max } => {
                (q_min..=q_max).contains(&q) && (p_min..=p_max).contains(&p)
            }
            Support::Ellipse { q_semi, p_semi } => {
                let x = q / q_semi;
                let y = p / p_semi;
                x * x + y * y <= 1.0
            }
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Support::Box { q_min, q_max, p_min, p_max } => (q_max - q_min) * (p_max - p_min),
            Support::Ellipse { q_semi, p_semi } => PI * q_semi * p_semi,
        }
    }

    fn key(&self) -> (u8, [f64; 4]) {
        match *self {
            Support::Box { q_min, q_max, p_min, p_max } => (0, [q_min, q_max, p_min, p_max]),
            Support::Ellipse { q_semi, p_semi } => (1, [q_semi, p_semi, 0.0, 0.0]),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = match *self {
            Support::Box { q_min, q_max, p_min, p_max } => {
                q_min < q_max && p_min < p_max && [q_min, q_max, p_min, p_max].iter().all(|v| v.is_finite())
            }
            Support::Ellipse { q_semi, p_semi } => {
                q_semi > 0.0 && p_semi > 0.0 && q_semi.is_finite() && p_semi.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("degenerate support {self:?}")))
        }
    }

    /// Applies a tensor-product rule to `f` over the support. For a box the
    /// two rules act on `q` and `p`; for an ellipse they act on the radial
    /// fraction `r ∈ [0,1]` and the angle `φ ∈ [0, 2π]`. The rules must be
    /// finite-interval rules; they are remapped onto the target ranges.
    pub fn integrate<const K: usize, F>(
        &self,
        rules: (&QuadratureRule, &QuadratureRule),
        mut f: F,
    ) -> Result<[f64; K]>
    where
        F: FnMut(f64, f64) -> [f64; K],
    {
        let mut acc = [0.0; K];
        match *self {
            Support::Box { q_min, q_max, p_min, p_max } => {
                let qr = rules.0.mapped(q_min, q_max)?;
                let pr = rules.1.mapped(p_min, p_max)?;
                for (q, wq) in qr.iter() {
                    let mut row = [0.0; K];
                    for (p, wp) in pr.iter() {
                        let v = f(q, p);
                        for k in 0..K {
                            row[k] += wp * v[k];
                        }
                    }
                    for k in 0..K {
                        acc[k] += wq * row[k];
                    }
                }
            }
            Support::Ellipse { q_semi, p_semi } => {
                let rr = rules.0.mapped(0.0, 1.0)?;
                let ar = rules.1.mapped(0.0, 2.0 * PI)?;
                let angles: Vec<(f64, f64, f64)> =
                    ar.iter().map(|(phi, w)| (phi.cos(), phi.sin(), w)).collect();
                for (r, wr) in rr.iter() {
                    let mut row = [0.0; K];
                    for &(c, s, wa) in &angles {
                        let v = f(q_semi * r * c, p_semi * r * s);
                        for k in 0..K {
                            row[k] += wa * v[k];
                        }
                    }
                    let jac = wr * q_semi * p_semi * r;
                    for k in 0..K {
                        acc[k] += jac * row[k];
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Weighted nodes `(q, p, w)` of the tensor rule used by [`Support::integrate`].
    pub(crate) fn tensor_nodes(&self, rules: (&QuadratureRule, &QuadratureRule)) -> Result<Vec<(f64, f64, f64)>> {
        let mut out = Vec::with_capacity(rules.0.len() * rules.1.len());
        match *self {
            Support::Box { q_min, q_max, p_min, p_max } => {
                let qr = rules.0.mapped(q_min, q_max)?;
                let pr = rules.1.mapped(p_min, p_max)?;
                for (q, wq) in qr.iter() {
                    out.extend(pr.iter().map(|(p, wp)| (q, p, wq * wp)));
                }
            }
            Support::Ellipse { q_semi, p_semi } => {
                let rr = rules.0.mapped(0.0, 1.0)?;
                let ar = rules.1.mapped(0.0, 2.0 * PI)?;
                for (r, wr) in rr.iter() {
                    let jac = wr * q_semi * p_semi * r;
                    out.extend(ar.iter().map(|(phi, wa)| (q_semi * r * phi.cos(), p_semi * r * phi.sin(), jac * wa)));
                }
            }
        }
        Ok(out)
    }

    /// Integrates with Gauss–Legendre rules, doubling the resolution until
    /// two successive results agree to `rel_tol` relative to the largest
    /// component (or to `floor`, if that is larger). Returns the last
    /// estimate and whether it converged.
    pub fn integrate_refined<const K: usize, F>(
        &self,
        f: F,
        rel_tol: f64,
        floor: f64,
    ) -> Result<([f64; K], bool)>
    where
        F: Fn(f64, f64) -> [f64; K],
    {
        self.validate()?;
        let mut n = START_POINTS;
        let rule = finite_rule(n, -1.0, 1.0)?;
        let mut prev = self.integrate((&rule, &rule), &f)?;
        while n < MAX_POINTS {
            n *= 2;
            let rule = finite_rule(n, -1.0, 1.0)?;
            let cur = self.integrate((&rule, &rule), &f)?;
            let scale = cur.iter().fold(floor, |m, v| m.max(v.abs()));
            let done = (0..K).all(|k| (cur[k] - prev[k]).abs() <= rel_tol * scale);
            prev = cur;
            if done {
                return Ok((prev, true));
            }
        }
        Ok((prev, false))
    }
}

/// Arbitrary non-negative density given by a sampler on a finite support.
#[derive(Clone)]
pub struct GeneralDensity {
    sampler: PhaseSampler,
    support: Support,
    hbar: f64,
}

impl fmt::Debug for GeneralDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralDensity")
            .field("support", &self.support)
            .field("hbar", &self.hbar)
            .finish_non_exhaustive()
    }
}

impl GeneralDensity {
    pub fn new<F>(sampler: F, support: Support, hbar: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        support.validate()?;
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { sampler: Arc::new(sampler), support, hbar })
    }

    /// Uniform density on `[-q_half, q_half] × [-p_half, p_half]`.
    pub fn uniform_box(q_half: f64, p_half: f64, hbar: f64) -> Result<Self> {
        let support = Support::centered_box(q_half, p_half)?;
        let value = 1.0 / support.area();
        Self::new(move |_, _| value, support, hbar)
    }

    /// A Gaussian restricted to the box `±GAUSSIAN_EXTENT·(β, γ)`.
    pub fn from_gaussian(g: &GaussianDensity) -> Self {
        let g = *g;
        let sc = g.scales;
        let support =
            Support::centered_box(GAUSSIAN_EXTENT * sc.beta(), GAUSSIAN_EXTENT * sc.gamma()).unwrap();
        Self::new(move |q, p| g.evaluate(q, p), support, sc.hbar()).unwrap()
    }

    /// The uniform ellipse expressed through a sampler on its own support.
    pub fn from_uniform_ellipse(e: &UniformEllipseDensity) -> Self {
        let sc = e.scales;
        let value = 1.0 / (PI * sc.beta() * sc.gamma());
        let support = Support::Ellipse { q_semi: sc.beta(), p_semi: sc.gamma() };
        Self::new(move |_, _| value, support, sc.hbar()).unwrap()
    }

    /// A copy whose sampler is multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let inner = Arc::clone(&self.sampler);
        Self { sampler: Arc::new(move |q, p| factor * inner(q, p)), ..self.clone() }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn evaluate(&self, q: f64, p: f64) -> f64 {
        if self.support.contains(q, p) {
            (self.sampler)(q, p)
        } else {
            0.0
        }
    }

    /// Sampler value without the support test; used on quadrature nodes
    /// that lie on the boundary.
    pub(crate) fn sample(&self, q: f64, p: f64) -> f64 {
        (self.sampler)(q, p)
    }
}

/// Any of the supported Liouville densities.
#[derive(Debug, Clone)]
pub enum Density {
    Gaussian(GaussianDensity),
    UniformEllipse(UniformEllipseDensity),
    Radial(RadialDensity),
    General(GeneralDensity),
}

impl From<GaussianDensity> for Density {
    fn from(d: GaussianDensity) -> Self {
        Density::Gaussian(d)
    }
}

impl From<UniformEllipseDensity> for Density {
    fn from(d: UniformEllipseDensity) -> Self {
        Density::UniformEllipse(d)
    }
}

impl From<RadialDensity> for Density {
    fn from(d: RadialDensity) -> Self {
        Density::Radial(d)
    }
}

impl From<GeneralDensity> for Density {
    fn from(d: GeneralDensity) -> Self {
        Density::General(d)
    }
}

/// Domain used to integrate a density, and whether the density vanishes
/// outside it identically.
#[derive(Debug, Clone, Copy)]
struct Domain {
    support: Support,
    compact: bool,
}

impl Density {
    pub fn evaluate(&self, q: f64, p: f64) -> f64 {
        match self {
            Density::Gaussian(d) => d.evaluate(q, p),
            Density::UniformEllipse(d) => d.evaluate(q, p),
            Density::Radial(d) => d.evaluate(q, p),
            Density::General(d) => d.evaluate(q, p),
        }
    }

    pub fn hbar(&self) -> f64 {
        match self {
            Density::Gaussian(d) => d.scales.hbar(),
            Density::UniformEllipse(d) => d.scales.hbar(),
            Density::Radial(d) => d.scales.hbar(),
            Density::General(d) => d.hbar(),
        }
    }

    fn domain(&self) -> Domain {
        match self {
            Density::Gaussian(d) => {
                let sc = d.scales;
                Domain {
                    support: Support::centered_box(GAUSSIAN_EXTENT * sc.beta(), GAUSSIAN_EXTENT * sc.gamma())
                        .unwrap(),
                    compact: false,
                }
            }
            Density::UniformEllipse(d) => Domain {
                support: Support::Ellipse { q_semi: d.scales.beta(), p_semi: d.scales.gamma() },
                compact: true,
            },
            Density::Radial(d) => {
                let r = d.effective_radius();
                let sc = d.scales;
                match d.support_radius {
                    Some(_) => Domain {
                        support: Support::Ellipse { q_semi: r * sc.beta(), p_semi: r * sc.gamma() },
                        compact: true,
                    },
                    None => Domain {
                        support: Support::centered_box(r * sc.beta(), r * sc.gamma()).unwrap(),
                        compact: false,
                    },
                }
            }
            Density::General(d) => Domain { support: d.support, compact: true },
        }
    }

    /// Integrand evaluation on a domain node. Compact densities are sampled
    /// without a boundary test when the node comes from their own support.
    fn value_on_own_domain(&self, q: f64, p: f64) -> f64 {
        match self {
            Density::General(d) => d.sample(q, p),
            Density::UniformEllipse(d) => 1.0 / (PI * d.scales.beta() * d.scales.gamma()),
            _ => self.evaluate(q, p),
        }
    }

    /// `ΔqΔp`, analytic for the Gaussian and uniform-ellipse families and by
    /// quadrature otherwise.
    pub fn uncertainty_product(&self) -> Result<f64> {
        match self {
            Density::Gaussian(d) => Ok(d.scales.beta() * d.scales.gamma() / 2.0),
            Density::UniformEllipse(d) => Ok(d.scales.beta() * d.scales.gamma() / 4.0),
            Density::Radial(d) => {
                // ⟨q²⟩ = (π β³ γ / 2) ∫ u g(u) du and likewise for p²
                let m1 = d.radial_moment(1)?;
                let (b, g) = (d.scales.beta(), d.scales.gamma());
                Ok(PI * b * b * g * g * m1 / 2.0)
            }
            Density::General(d) => {
                let (m, converged) = d.support.integrate_refined(
                    |q, p| {
                        let r = d.sample(q, p);
                        [r * q, r * p, r * q * q, r * p * p]
                    },
                    1e-12,
                    1e-12,
                )?;
                if !converged {
                    return Err(Error::QuadratureNotConverged(
                        "second moments of general density".into(),
                    ));
                }
                let var_q = m[2] - m[0] * m[0];
                let var_p = m[3] - m[1] * m[1];
                Ok((var_q.max(0.0) * var_p.max(0.0)).sqrt())
            }
        }
    }

    /// `|∫ρ dq dp − 1|` by quadrature.
    pub fn normalization_residual(&self) -> Result<f64> {
        let total = match self {
            Density::Radial(d) => PI * d.scales.beta() * d.scales.gamma() * d.radial_moment(0)?,
            _ => {
                let dom = self.domain();
                let (v, _) = dom
                    .support
                    .integrate_refined(|q, p| [self.value_on_own_domain(q, p)], 1e-14, 1e-14)?;
                v[0]
            }
        };
        Ok((total - 1.0).abs())
    }

    /// `∫ ρ ρ' dq dp`.
    ///
    /// The integration domain is chosen independently of argument order: a
    /// compact support when one is present (the smaller one when both are),
    /// otherwise the intersection of the two effective boxes.
    pub fn overlap_integral(&self, other: &Density) -> Result<f64> {
        let a = self.domain();
        let b = other.domain();
        let support = match (a.compact, b.compact) {
            (true, false) => a.support,
            (false, true) => b.support,
            (true, true) => {
                let (aa, ba) = (a.support.area(), b.support.area());
                if aa < ba || (aa == ba && a.support.key() <= b.support.key()) {
                    a.support
                } else {
                    b.support
                }
            }
            (false, false) => intersect_boxes(a.support, b.support),
        };
        let f = |q: f64, p: f64| [self.evaluate_for_overlap(q, p, &support) * other.evaluate_for_overlap(q, p, &support)];
        let (v, _) = support.integrate_refined(f, 1e-13, 1e-300)?;
        Ok(v[0])
    }

    fn evaluate_for_overlap(&self, q: f64, p: f64, support: &Support) -> f64 {
        let own = self.domain();
        if own.compact && own.support == *support {
            self.value_on_own_domain(q, p)
        } else {
            self.evaluate(q, p)
        }
    }
}

fn intersect_boxes(a: Support, b: Support) -> Support {
    match (a, b) {
        (
            Support::Box { q_min: a0, q_max: a1, p_min: a2, p_max: a3 },
            Support::Box { q_min: b0, q_max: b1, p_min: b2, p_max: b3 },
        ) => Support::Box { q_min: a0.max(b0), q_max: a1.min(b1), p_min: a2.max(b2), p_max: a3.min(b3) },
        _ => a,
    }
}

fn integrate_interval<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64> {
    let mut n = START_POINTS;
    let mut prev = finite_rule(n, a, b)?.integrate(f);
    while n < 4 * MAX_POINTS {
        n *= 2;
        let cur = finite_rule(n, a, b)?.integrate(f);
        if (cur - prev).abs() <= 1e-13 * cur.abs().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

/// `∫_0^∞ f(u) du` by panels `[U, 2U]` until the panel contributions die out.
fn integrate_half_line<F: Fn(f64) -> f64>(f: &F) -> Result<f64> {
    let panel = finite_rule(64, -1.0, 1.0)?;
    let on = |a: f64, b: f64| -> Result<f64> { Ok(panel.mapped(a, b)?.integrate(f)) };
    let mut total = on(0.0, 1.0)?;
    let mut lo = 1.0;
    let mut small_run = 0;
    for _ in 0..200 {
        let part = on(lo, 2.0 * lo)?;
        total += part;
        lo *= 2.0;
        if part.abs() <= 1e-15 * total.abs().max(1e-300) {
            small_run += 1;
            if small_run >= 3 {
                return Ok(total);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::DivergentMoment(format!(
        "radial integral still accumulating at u = {lo:e}"
    )))
}
