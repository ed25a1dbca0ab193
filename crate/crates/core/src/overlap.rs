//! The overlap function `⟨cat|D(δ)|cat⟩` and its approximation tiers.
//!
//! Tiers, from exact to asymptotic:
//!
//! * [`overlap_exact`] – the full double sum over component pairs, each term
//!   `c_j* c_k ⟨α_j|D(δ)|α_k⟩ / n`, evaluated in Cartesian form.
//! * [`overlap_exact_polar`] – the same sum through the `r = |α||δ|`,
//!   `θ = θ_δ − θ_α` parametrization. Kept as an independent path for
//!   cross-validation.
//! * [`overlap_band`] – the near-neighbour (`j ≈ k`) simplification applied
//!   to every pair. Unnormalized: equals `n` at `δ = 0`, and is only
//!   meaningful near the zeros of the overlap.
//! * [`overlap_diagonal`] – diagonal terms only,
//!   `(1/n) Σ_j cos[2r sin(θ − 2πj/n)]`.
//! * [`overlap_asymptotic`] – the `n → ∞` limit `J0(2|α||δ|)`.
//!
//! Pair sums are evaluated row by row (`j` outer, `k` inner) with
//! compensated accumulation. Rows may run in parallel; partial sums are
//! always combined in row order so results do not depend on [`Exec`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::parallel::{map_ordered, Exec};
use crate::specfun::j0;
use crate::states::{cexp, raw_positions, unit_phase, wrap_angle, CatStateSpec, ComplexAmplitude, Convention, Displacement};
use crate::sum::{ComplexSum, NeumaierSum};

/// Selects `(j, k)` pairs by circular index distance
/// `min(|j − k|, n − |j − k|)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SumMask {
    #[default]
    All,
    DiagonalOnly,
    OffDiagonalOnly,
    /// Pairs with circular distance `≤ width`.
    Band(usize),
}

impl SumMask {
    pub fn validate(self, n: usize) -> Result<()> {
        match self {
            SumMask::Band(width) if width > n => Err(Error::InvalidMask { width, n }),
            _ => Ok(()),
        }
    }

    pub fn contains(self, j: usize, k: usize, n: usize) -> bool {
        let d = j.abs_diff(k);
        let d = d.min(n - d);
        match self {
            SumMask::All => true,
            SumMask::DiagonalOnly => d == 0,
            SumMask::OffDiagonalOnly => d != 0,
            SumMask::Band(w) => d <= w,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    ExactCartesian,
    ExactPolar,
    BandApprox,
    DiagonalApprox,
    Asymptotic,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::ExactCartesian => "exact",
            Tier::ExactPolar => "polar",
            Tier::BandApprox => "band",
            Tier::DiagonalApprox => "diagonal",
            Tier::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapResult {
    pub value: Complex64,
    pub tier: Tier,
    pub mask: SumMask,
}

impl OverlapResult {
    /// `|⟨cat|cat^δ⟩|²`.
    pub fn intensity(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Whether the diagonal tier keeps the Gaussian envelope `e^{−|δ|²/2}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Envelope {
    /// Small-`δ` form: envelope set to 1.
    #[default]
    Dropped,
    Kept,
}

/// One `(j, k)` term of the exact double sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTerm {
    /// Zero-based component indices.
    pub j: usize,
    pub k: usize,
    /// Full term including the `1/n` prefactor and coefficients.
    pub value: Complex64,
    /// `exp(−½|δ + α_k − α_j|²)`; the term's modulus is this over `n`.
    pub gaussian: f64,
}

/// `c_j* c_k ⟨α_j|D(δ)|α_k⟩ / n` with
/// `⟨a|D(δ)|b⟩ = exp(i Im(δ(a* + b*)) + i Im(a* b)) · exp(−½|δ + b − a|²)`.
#[inline]
fn pair_term(a: Complex64, b: Complex64, ca: Complex64, cb: Complex64, delta: Complex64, inv_n: f64) -> (Complex64, f64) {
    let phase = (delta * (a.conj() + b.conj())).im + (a.re * b.im - a.im * b.re);
    let gaussian = (-0.5 * (delta + b - a).norm_sqr()).exp();
    (ca.conj() * cb * unit_phase(phase) * (gaussian * inv_n), gaussian)
}

/// Every term of the exact double sum, row-major.
pub fn pair_terms(spec: &CatStateSpec, delta: Displacement) -> Vec<PairTerm> {
    let n = spec.n();
    let pos = raw_positions(spec);
    let cs = spec.coefficients();
    let d = delta.value();
    let inv_n = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let (value, gaussian) = pair_term(pos[j], pos[k], cs[j], cs[k], d, inv_n);
            out.push(PairTerm { j, k, value, gaussian });
        }
    }
    out
}

fn reduce_rows(rows: Vec<Complex64>) -> Complex64 {
    rows.into_iter().collect::<ComplexSum>().value()
}

fn cartesian_sum(spec: &CatStateSpec, delta: Complex64, mask: SumMask, exec: Exec) -> Complex64 {
    let n = spec.n();
    let pos = raw_positions(spec);
    let cs = spec.coefficients();
    let inv_n = 1.0 / n as f64;
    let rows = map_ordered(exec, n, |j| {
        let mut acc = ComplexSum::default();
        for k in 0..n {
            if mask.contains(j, k, n) {
                acc += pair_term(pos[j], pos[k], cs[j], cs[k], delta, inv_n).0;
            }
        }
        acc.value()
    });
    reduce_rows(rows)
}

/// Exact overlap `⟨cat|D(δ)|cat⟩` restricted to `mask`.
///
/// Under [`Convention::TrueNormalized`] the result is divided by the
/// state's self-overlap computed by the same kernel, so `δ = 0` with the
/// full mask gives exactly `1`.
pub fn overlap_exact(spec: &CatStateSpec, delta: Displacement, mask: SumMask) -> Result<OverlapResult> {
    overlap_exact_with(spec, delta, mask, Exec::default())
}

pub fn overlap_exact_with(spec: &CatStateSpec, delta: Displacement, mask: SumMask, exec: Exec) -> Result<OverlapResult> {
    mask.validate(spec.n())?;
    let mut value = cartesian_sum(spec, delta.value(), mask, exec);
    if spec.convention() == Convention::TrueNormalized {
        value /= cartesian_sum(spec, Complex64::new(0.0, 0.0), SumMask::All, exec);
    }
    Ok(OverlapResult { value, tier: Tier::ExactCartesian, mask })
}

fn polar_sum(n: usize, alpha_mag: f64, r: f64, theta: f64, delta_sq: f64, mask: SumMask, exec: Exec) -> Complex64 {
    let nf = n as f64;
    let a2 = alpha_mag * alpha_mag;
    let rows = map_ordered(exec, n, |j0| {
        let mut acc = ComplexSum::default();
        for k0 in 0..n {
            if !mask.contains(j0, k0, n) {
                continue;
            }
            // one-based indices
            let (j, k) = ((j0 + 1) as f64, (k0 + 1) as f64);
            let diff = PI * (j - k) / nf;
            let s = wrap_angle(theta - PI * (j + k) / nf).sin();
            let phase = 2.0 * r * diff.cos() * s + a2 * (2.0 * diff).sin();
            let decay = delta_sq + 2.0 * a2 * (1.0 - (2.0 * diff).cos()) + 4.0 * r * diff.sin() * s;
            acc += cexp(Complex64::new(-0.5 * decay, phase));
        }
        acc.value() / nf
    });
    reduce_rows(rows)
}

/// The exact overlap in `(r, θ)` form. Uniform cats only.
///
/// The polar kernel indexes pairs as `(k, j)` relative to
/// [`overlap_exact`]; the two agree on any mask because masks are
/// symmetric in `j ↔ k`.
pub fn overlap_exact_polar(spec: &CatStateSpec, delta: Displacement, mask: SumMask) -> Result<OverlapResult> {
    overlap_exact_polar_with(spec, delta, mask, Exec::default())
}

pub fn overlap_exact_polar_with(spec: &CatStateSpec, delta: Displacement, mask: SumMask, exec: Exec) -> Result<OverlapResult> {
    spec.require_uniform("polar overlap")?;
    mask.validate(spec.n())?;
    let alpha = spec.alpha();
    let n = spec.n();
    let mut value = polar_sum(
        n,
        alpha.abs(),
        delta.r(alpha),
        delta.theta(alpha),
        delta.abs().powi(2),
        mask,
        exec,
    );
    if spec.convention() == Convention::TrueNormalized {
        value /= polar_sum(n, alpha.abs(), 0.0, 0.0, 0.0, SumMask::All, exec);
    }
    Ok(OverlapResult { value, tier: Tier::ExactPolar, mask })
}

/// `(e^{−|δ|²/2}/n) Σ_{j,k} cos[2r sin(θ − π(j+k)/n)]` over all pairs.
///
/// This is the `j ≈ k` simplification applied everywhere, including to
/// distant pairs where it does not hold. It is unnormalized (`n` at
/// `δ = 0`), and is close to the exact overlap only where both are small.
/// The normalization convention of `spec` is ignored.
pub fn overlap_band(spec: &CatStateSpec, delta: Displacement) -> Result<OverlapResult> {
    spec.require_uniform("band approximation")?;
    let n = spec.n();
    let nf = n as f64;
    let alpha = spec.alpha();
    let r = delta.r(alpha);
    let theta = delta.theta(alpha);
    let mut acc = NeumaierSum::default();
    for j in 1..=n {
        for k in 1..=n {
            acc += (2.0 * r * wrap_angle(theta - PI * (j + k) as f64 / nf).sin()).cos();
        }
    }
    let value = (-0.5 * delta.abs().powi(2)).exp() / nf * acc.value();
    Ok(OverlapResult {
        value: Complex64::new(value, 0.0),
        tier: Tier::BandApprox,
        mask: SumMask::All,
    })
}

fn diagonal_sum(n: usize, r: f64, theta: f64, terms: usize, scale: f64) -> f64 {
    let nf = n as f64;
    let acc: NeumaierSum = (1..=terms)
        .map(|j| (2.0 * r * wrap_angle(theta - 2.0 * PI * j as f64 / nf).sin()).cos())
        .collect();
    scale * acc.value()
}

/// `(1/n) Σ_{j=1..n} cos[2r sin(θ − 2πj/n)]`, optionally times
/// `e^{−|δ|²/2}`. For even `n` the half sum `(2/n) Σ_{j=1..n/2}` is also
/// evaluated and must agree.
pub fn overlap_diagonal(spec: &CatStateSpec, delta: Displacement, envelope: Envelope) -> Result<OverlapResult> {
    spec.require_uniform("diagonal approximation")?;
    let n = spec.n();
    let alpha = spec.alpha();
    let r = delta.r(alpha);
    let theta = delta.theta(alpha);
    let full = diagonal_sum(n, r, theta, n, 1.0 / n as f64);
    if n.is_multiple_of(2) {
        let half = diagonal_sum(n, r, theta, n / 2, 2.0 / n as f64);
        assert!(
            (full - half).abs() <= 1e-12,
            "half-sum identity violated: {full} vs {half}"
        );
    }
    let value = match envelope {
        Envelope::Dropped => full,
        Envelope::Kept => full * (-0.5 * delta.abs().powi(2)).exp(),
    };
    Ok(OverlapResult {
        value: Complex64::new(value, 0.0),
        tier: Tier::DiagonalApprox,
        mask: SumMask::DiagonalOnly,
    })
}

/// `J0(2|α||δ|)`, the `n → ∞` limit of the diagonal tier.
pub fn overlap_asymptotic(alpha: ComplexAmplitude, delta: Displacement) -> OverlapResult {
    OverlapResult {
        value: Complex64::new(j0(2.0 * delta.r(alpha)), 0.0),
        tier: Tier::Asymptotic,
        mask: SumMask::All,
    }
}

/// Two-component fringe intensity `cos²(2|α|δ⊥)`.
pub fn cat2_perp_intensity(alpha: ComplexAmplitude, delta: Displacement) -> f64 {
    (2.0 * alpha.abs() * delta.perp(alpha)).cos().powi(2)
}

/// Fringe intensity of the rotated pair `{α, α e^{iφ}}`:
/// `cos²(2|α| sin(φ/2) (δ⊥ sin(φ/2) + δ∥ cos(φ/2)))`.
pub fn cat2_rotated_intensity(alpha: ComplexAmplitude, phi: f64, delta: Displacement) -> f64 {
    let (s, c) = (0.5 * phi).sin_cos();
    (2.0 * alpha.abs() * s * (delta.perp(alpha) * s + delta.par(alpha) * c))
        .cos()
        .powi(2)
}

/// `|⟨cat2^φ|D(δ)|cat2^φ⟩|²` for `(|α⟩ + e^{iφ}|−α⟩)/norm`, from the exact
/// double sum.
///
/// The relative phase only enters the cross terms `⟨α|D(δ)|−α⟩`, which are
/// suppressed by `e^{−2|α|²}`. For large `|α|` the fringes therefore do not
/// move with `φ`; see `analysis::phased_fringe_offset`.
pub fn cat2_phased_intensity(alpha: ComplexAmplitude, phi: f64, delta: Displacement) -> Result<f64> {
    let spec = CatStateSpec::phased_pair(alpha, phi)?.with_convention(Convention::TrueNormalized);
    Ok(overlap_exact(&spec, delta, SumMask::All)?.intensity())
}
