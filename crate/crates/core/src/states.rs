//! Cat states: coherent states placed uniformly on a circle in phase space.
//!
//! Convention throughout: `[a, a†] = 1`, a coherent state `|β⟩ = D(β)|0⟩`
//! sits at the phase-space point `β`, and `D(β) = exp(β a† − β* a)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::ComplexSum;

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

/// `e^{iθ}` with the argument reduced first.
pub fn unit_phase(theta: f64) -> Complex64 {
    let t = wrap_angle(theta);
    Complex64::new(t.cos(), t.sin())
}

/// `e^{z}` for a complex exponent whose imaginary part may be large.
pub(crate) fn cexp(z: Complex64) -> Complex64 {
    z.re.exp() * unit_phase(z.im)
}

/// A point in phase space. Always finite.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ComplexAmplitude(Complex64);

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::try_from(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn from_polar(magnitude: f64, phase: f64) -> Result<Self> {
        if !magnitude.is_finite() || !phase.is_finite() {
            return Err(Error::NonFinite("amplitude"));
        }
        Self::try_from(magnitude * unit_phase(phase))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn abs(self) -> f64 {
        self.0.re.hypot(self.0.im)
    }

    /// Argument in `(−π, π]`.
    pub fn arg(self) -> f64 {
        let a = self.0.im.atan2(self.0.re);
        if a <= -PI {
            PI
        } else {
            a
        }
    }

    /// Rotates about the origin by `angle`.
    pub fn rotated(self, angle: f64) -> Self {
        ComplexAmplitude(self.0 * unit_phase(angle))
    }
}

impl TryFrom<Complex64> for ComplexAmplitude {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(ComplexAmplitude(z))
        } else {
            Err(Error::NonFinite("amplitude"))
        }
    }
}

impl From<ComplexAmplitude> for Complex64 {
    fn from(a: ComplexAmplitude) -> Complex64 {
        a.0
    }
}

/// How overlaps are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// Plain `1/√n` weight on each component. The state is only
    /// approximately normalized; cross terms `⟨α_j|α_k⟩` are kept out of the
    /// norm.
    #[default]
    Prefactor,
    /// Divide by the exact norm of the superposition.
    TrueNormalized,
}

/// `|cat⟩ = (1/√n) Σ_{j=1..n} c_j |e^{i2πj/n} α⟩`.
///
/// Two overrides cover the two-component variants: `coeffs` attaches a
/// unit-modulus weight to each component (relative phases), and
/// `positions` replaces the circle entirely (e.g. the rotated pair
/// `{α, α e^{iφ}}`).
#[derive(Clone, Debug, PartialEq)]
pub struct CatStateSpec {
    n: usize,
    alpha: ComplexAmplitude,
    coeffs: Option<Vec<Complex64>>,
    positions: Option<Vec<Complex64>>,
    convention: Convention,
}

const UNIT_MODULUS_TOL: f64 = 1e-12;

impl CatStateSpec {
    pub fn new(n: usize, alpha: ComplexAmplitude) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        Ok(CatStateSpec {
            n,
            alpha,
            coeffs: None,
            positions: None,
            convention: Convention::Prefactor,
        })
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_coeffs(mut self, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != self.n {
            return Err(Error::InvalidSpec(format!(
                "expected {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        for (j, c) in coeffs.iter().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite("coefficient"));
            }
            if (c.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::InvalidSpec(format!(
                    "coefficient {} has modulus {}, expected 1",
                    j + 1,
                    c.norm()
                )));
            }
        }
        self.coeffs = Some(coeffs);
        Ok(self)
    }

    pub fn with_positions(mut self, positions: Vec<ComplexAmplitude>) -> Result<Self> {
        if positions.len() != self.n {
            return Err(Error::InvalidSpec(format!(
                "expected {} positions, got {}",
                self.n,
                positions.len()
            )));
        }
        self.positions = Some(positions.into_iter().map(Complex64::from).collect());
        Ok(self)
    }

    /// `(|α⟩ + |α e^{iφ}⟩)/√2`: two components separated by an angle `φ`.
    pub fn rotated_pair(alpha: ComplexAmplitude, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFinite("phi"));
        }
        CatStateSpec::new(2, alpha)?.with_positions(vec![alpha, alpha.rotated(phi)])
    }

    /// `(|α⟩ + e^{iφ}|−α⟩)/√2`. On the circle `−α` is component 1 and `α`
    /// is component 2, so the coefficients are `[e^{iφ}, 1]`.
    pub fn phased_pair(alpha: ComplexAmplitude, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFinite("phi"));
        }
        CatStateSpec::new(2, alpha)?.with_coeffs(vec![unit_phase(phi), Complex64::new(1.0, 0.0)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> ComplexAmplitude {
        self.alpha
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Component weights `c_j`; all ones unless overridden.
    pub fn coefficients(&self) -> Vec<Complex64> {
        match &self.coeffs {
            Some(c) => c.clone(),
            None => vec![Complex64::new(1.0, 0.0); self.n],
        }
    }

    /// True for the plain circular cat: default positions and every
    /// coefficient equal to 1.
    pub fn is_uniform(&self) -> bool {
        self.positions.is_none()
            && self.coeffs.as_ref().is_none_or(|cs| {
                cs.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() <= UNIT_MODULUS_TOL)
            })
    }

    pub(crate) fn require_uniform(&self, what: &'static str) -> Result<()> {
        if self.is_uniform() {
            Ok(())
        } else {
            Err(Error::NonUniform(what))
        }
    }
}

/// `e^{i2πj/n}` for `j = 1..n`, exact at multiples of a quarter turn.
pub fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (1..=n)
        .map(|j| {
            let j = j % n;
            if (4 * j).is_multiple_of(n) {
                match 4 * j / n {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                }
            } else {
                unit_phase(2.0 * PI * j as f64 / n as f64)
            }
        })
        .collect()
}

/// Phase-space positions of the components, in index order `j = 1..n`.
pub fn component_positions(spec: &CatStateSpec) -> Vec<ComplexAmplitude> {
    raw_positions(spec).into_iter().map(ComplexAmplitude).collect()
}

pub(crate) fn raw_positions(spec: &CatStateSpec) -> Vec<Complex64> {
    match &spec.positions {
        Some(p) => p.clone(),
        None => {
            let a = spec.alpha.value();
            roots_of_unity(spec.n).into_iter().map(|w| w * a).collect()
        }
    }
}

/// `‖Σ_j c_j |α_j⟩ / √n‖`.
pub fn true_norm(spec: &CatStateSpec) -> f64 {
    let s = CoherentSuperposition::from_spec(spec);
    s.inner(&s).re.sqrt()
}

/// `⟨a|b⟩ = exp(−½|a − b|² + i Im(a* b))`.
pub fn coherent_inner(a: Complex64, b: Complex64) -> Complex64 {
    let d = b - a;
    let phase = a.re * b.im - a.im * b.re;
    cexp(Complex64::new(-0.5 * d.norm_sqr(), phase))
}

/// A general finite superposition `Σ_i w_i |p_i⟩` of coherent states.
///
/// Displacing one yields another (`D(δ)|p⟩ = e^{i Im(δ p*)}|p + δ⟩`), which
/// gives an oracle-free route to two-sided overlaps
/// `⟨cat|D(δ₂)† D(δ₁)|cat⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentSuperposition {
    pub weights: Vec<Complex64>,
    pub positions: Vec<Complex64>,
}

impl CoherentSuperposition {
    /// Weights carry the `1/√n` prefactor; no further normalization.
    pub fn from_spec(spec: &CatStateSpec) -> Self {
        let scale = 1.0 / (spec.n as f64).sqrt();
        CoherentSuperposition {
            weights: spec.coefficients().into_iter().map(|c| c * scale).collect(),
            positions: raw_positions(spec),
        }
    }

    pub fn displaced(&self, delta: Complex64) -> Self {
        let weights = self
            .weights
            .iter()
            .zip(&self.positions)
            .map(|(w, p)| w * unit_phase((delta * p.conj()).im))
            .collect();
        let positions = self.positions.iter().map(|p| p + delta).collect();
        CoherentSuperposition { weights, positions }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &CoherentSuperposition) -> Complex64 {
        let mut acc = ComplexSum::default();
        for (wa, pa) in self.weights.iter().zip(&self.positions) {
            for (wb, pb) in other.weights.iter().zip(&other.positions) {
                acc += wa.conj() * wb * coherent_inner(*pa, *pb);
            }
        }
        acc.value()
    }
}

/// A phase-space displacement `δ`, with the polar quantities measured
/// against a cat anchor `α`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Displacement(ComplexAmplitude);

impl Displacement {
    pub fn new(delta: ComplexAmplitude) -> Self {
        Displacement(delta)
    }

    pub fn from_complex(delta: Complex64) -> Result<Self> {
        Ok(Displacement(ComplexAmplitude::try_from(delta)?))
    }

    /// `δ` of magnitude `magnitude` at angle `relative_angle` from `α`.
    /// `relative_angle = π/2` puts `δ` perpendicular to `α`.
    pub fn relative_to(alpha: ComplexAmplitude, magnitude: f64, relative_angle: f64) -> Result<Self> {
        Ok(Displacement(ComplexAmplitude::from_polar(
            magnitude,
            alpha.arg() + relative_angle,
        )?))
    }

    pub fn delta(self) -> ComplexAmplitude {
        self.0
    }

    pub fn value(self) -> Complex64 {
        self.0.value()
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    /// `r = |α||δ|`.
    pub fn r(self, alpha: ComplexAmplitude) -> f64 {
        alpha.abs() * self.0.abs()
    }

    /// `θ = θ_δ − θ_α`, reduced to `(−π, π]`.
    pub fn theta(self, alpha: ComplexAmplitude) -> f64 {
        wrap_angle(self.0.arg() - alpha.arg())
    }

    /// `δ⊥ = |δ| sin θ`.
    pub fn perp(self, alpha: ComplexAmplitude) -> f64 {
        self.0.abs() * self.theta(alpha).sin()
    }

    /// `δ∥ = |δ| cos θ`.
    pub fn par(self, alpha: ComplexAmplitude) -> f64 {
        self.0.abs() * self.theta(alpha).cos()
    }
}

impl From<ComplexAmplitude> for Displacement {
    fn from(a: ComplexAmplitude) -> Self {
        Displacement(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn amp(re: f64, im: f64) -> ComplexAmplitude {
        ComplexAmplitude::new(re, im).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ComplexAmplitude::new(f64::NAN, 0.0).is_err());
        assert!(ComplexAmplitude::new(0.0, f64::INFINITY).is_err());
        assert!(ComplexAmplitude::from_polar(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn arg_range() {
        assert_eq!(amp(-1.0, 0.0).arg(), PI);
        assert_eq!(amp(-1.0, -0.0).arg(), PI);
        assert_abs_diff_eq!(amp(0.0, -2.0).arg(), -PI / 2.0);
        assert_eq!(amp(3.0, 4.0).abs(), 5.0);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-0.5), -0.5);
        assert_abs_diff_eq!(wrap_angle(1000.0), 1000.0 - 159.0 * 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(CatStateSpec::new(0, amp(1.0, 0.0)).is_err());
        let spec = CatStateSpec::new(3, amp(1.0, 0.0)).unwrap();
        assert!(spec.clone().with_coeffs(vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(spec
            .clone()
            .with_coeffs(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)])
            .is_err());
        let phased = spec.with_coeffs(vec![unit_phase(0.3), unit_phase(1.0), unit_phase(-2.0)]).unwrap();
        assert!(!phased.is_uniform());
    }

    #[test]
    fn positions_small_n() {
        let p1 = component_positions(&CatStateSpec::new(1, amp(2.0, 0.0)).unwrap());
        assert_eq!(p1, vec![amp(2.0, 0.0)]);

        let p2 = component_positions(&CatStateSpec::new(2, amp(3.0, 0.0)).unwrap());
        assert_eq!(p2, vec![amp(-3.0, 0.0), amp(3.0, 0.0)]);

        let p4 = component_positions(&CatStateSpec::new(4, amp(1.0, 0.0)).unwrap());
        assert_eq!(p4, vec![amp(0.0, 1.0), amp(-1.0, 0.0), amp(0.0, -1.0), amp(1.0, 0.0)]);
    }

    #[test]
    fn anchor_is_last_component() {
        for n in 1..12 {
            let a = amp(0.7, -1.3);
            let p = component_positions(&CatStateSpec::new(n, a).unwrap());
            assert_eq!(p[n - 1], a);
        }
    }

    #[test]
    fn true_norm_trivial_cases() {
        assert_abs_diff_eq!(true_norm(&CatStateSpec::new(1, amp(1.7, 0.4)).unwrap()), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            true_norm(&CatStateSpec::new(2, amp(0.0, 0.0)).unwrap()),
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn true_norm_approaches_one() {
        let norms: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&a| true_norm(&CatStateSpec::new(4, amp(a, 0.0)).unwrap()))
            .collect();
        let dist: Vec<f64> = norms.iter().map(|v| (v - 1.0).abs()).collect();
        assert!(dist[0] > dist[1] && dist[1] > dist[2], "{norms:?}");
        assert!(dist[2] < 1e-6);
    }

    #[test]
    fn displacement_components() {
        let alpha = amp(0.0, 2.0);
        let d = Displacement::from_complex(Complex64::new(-0.3, 0.0)).unwrap();
        assert_abs_diff_eq!(d.theta(alpha), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.perp(alpha), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(d.par(alpha), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.r(alpha), 0.6, epsilon = 1e-15);

        let d = Displacement::relative_to(alpha, 0.25, PI / 2.0).unwrap();
        assert_abs_diff_eq!(d.perp(alpha), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn coherent_inner_matches_closed_form() {
        let a = Complex64::new(0.4, -1.1);
        let b = Complex64::new(-0.2, 0.9);
        let expected = (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp();
        assert_abs_diff_eq!((coherent_inner(a, b) - expected).norm(), 0.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn positions_lie_on_circle(n in 1usize..40, mag in 0.0f64..20.0, ph in -PI..PI) {
            let a = ComplexAmplitude::from_polar(mag, ph).unwrap();
            for p in component_positions(&CatStateSpec::new(n, a).unwrap()) {
                prop_assert!((p.abs() - mag).abs() <= 1e-12 * mag.max(1.0));
            }
        }

        #[test]
        fn rotation_permutes_components(n in 1usize..24, mag in 0.1f64..10.0, ph in -PI..PI) {
            let a = ComplexAmplitude::from_polar(mag, ph).unwrap();
            let base = component_positions(&CatStateSpec::new(n, a).unwrap());
            let rot = component_positions(&CatStateSpec::new(n, a.rotated(2.0 * PI / n as f64)).unwrap());
            // rotating by 2π/n shifts index j -> j+1
            for j in 0..n {
                let d = (rot[j].value() - base[(j + 1) % n].value()).norm();
                prop_assert!(d <= 1e-12 * mag.max(1.0));
            }
        }

        #[test]
        fn perp_par_pythagoras(dm in 0.0f64..5.0, dp in -PI..PI, am in 0.1f64..5.0, ap in -PI..PI) {
            let alpha = ComplexAmplitude::from_polar(am, ap).unwrap();
            let d = Displacement::new(ComplexAmplitude::from_polar(dm, dp).unwrap());
            let lhs = d.perp(alpha).powi(2) + d.par(alpha).powi(2);
            prop_assert!((lhs - d.abs().powi(2)).abs() <= 1e-12);
        }
    }
}
