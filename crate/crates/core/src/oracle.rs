//! Brute-force number-basis oracle.
//!
//! States are expanded on `|0⟩ … |N_max⟩`, displaced by explicit matrices
//! and overlapped by plain inner products. Nothing here shares code with the
//! closed-form kernels in [`crate::overlap`] and [`crate::wigner`], which
//! is what makes it useful as a cross-check.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{component_positions, unit_phase, CatStateSpec, ComplexAmplitude, Convention, Displacement};
use crate::sum::{ComplexSum, NeumaierSum};

/// Default ceiling on discarded probability.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-12;

/// Tolerance between the two displacement constructions.
const CONSTRUCTION_AGREEMENT: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncation that keeps the Poisson tail of a coherent state with mean
/// `|α|²` well below 1e-12.
pub fn recommended_n_max(alpha_mag: f64) -> usize {
    (alpha_mag * alpha_mag + 8.0 * alpha_mag + 16.0).ceil() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>, tail_bound: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty Fock vector".into()));
        }
        Ok(FockVector { coeffs, tail_bound })
    }

    pub fn vacuum(n_max: usize) -> Self {
        let mut coeffs = vec![ZERO; n_max + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        FockVector { coeffs, tail_bound: 0.0 }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Probability known to be missing from the truncated expansion.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect::<NeumaierSum>().value()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .collect::<ComplexSum>()
            .value()
    }

    /// `a|ψ⟩` within the truncation.
    pub fn annihilate(&self) -> FockVector {
        let n = self.coeffs.len();
        let mut out = vec![ZERO; n];
        for (m, (o, c)) in out.iter_mut().zip(&self.coeffs[1..]).enumerate() {
            *o = (m as f64 + 1.0).sqrt() * c;
        }
        FockVector { coeffs: out, tail_bound: self.tail_bound }
    }

    fn axpy(&mut self, w: Complex64, other: &FockVector) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += w * b;
        }
        self.tail_bound += w.norm() * other.tail_bound;
    }
}

/// `|α⟩` truncated at `n_max`, built by the recurrence
/// `c_m = c_{m−1} α / √m` from `c_0 = e^{−|α|²/2}`.
pub fn coherent_fock(alpha: ComplexAmplitude, n_max: usize, threshold: f64) -> Result<FockVector> {
    let a = alpha.value();
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
    coeffs.push(c);
    for m in 1..=n_max {
        c = c * a / (m as f64).sqrt();
        coeffs.push(c);
    }
    let kept: NeumaierSum = coeffs.iter().map(|c| c.norm_sqr()).collect();
    let tail = (1.0 - kept.value()).max(0.0);
    if tail > threshold {
        return Err(Error::TailBound { tail, threshold });
    }
    Ok(FockVector { coeffs, tail_bound: tail })
}

/// `⟨m|D(δ)|n⟩` for `m, n ≤ n_max`.
///
/// For `m = n + k` the element is `e^{ik arg δ} h_n^{(k)}` with
/// `h_n^{(k)} = √(n!/(n+k)!) |δ|^k e^{−|δ|²/2} L_n^{(k)}(|δ|²)`, generated by
/// the normalized Laguerre recurrence
///
/// `h_{n+1} = [(2n + 1 + k − x) h_n − √(n(n+k)) h_{n−1}] / √((n+1)(n+1+k))`.
///
/// Elements above the diagonal follow from `⟨n|D(δ)|n+k⟩ = (−1)^k conj(⟨n+k|D(δ)|n⟩)`.
/// Every entry equals the untruncated matrix element.
pub fn displacement_matrix(delta: Complex64, n_max: usize) -> Array2<Complex64> {
    let dim = n_max + 1;
    let x = delta.norm_sqr();
    let arg = delta.im.atan2(delta.re);
    let mut d = Array2::from_elem((dim, dim), ZERO);
    let mut ln_fact = 0.0;
    let mut h = vec![0.0; dim];
    for k in 0..dim {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let len = dim - k;
        let kf = k as f64;
        h[0] = if x == 0.0 {
            if k == 0 { 1.0 } else { 0.0 }
        } else {
            (0.5 * kf * x.ln() - 0.5 * x - 0.5 * ln_fact).exp()
        };
        if len > 1 {
            h[1] = h[0] * (1.0 + kf - x) / (kf + 1.0).sqrt();
        }
        for n in 1..len.saturating_sub(1) {
            let nf = n as f64;
            h[n + 1] = ((2.0 * nf + 1.0 + kf - x) * h[n] - (nf * (nf + kf)).sqrt() * h[n - 1])
                / ((nf + 1.0) * (nf + 1.0 + kf)).sqrt();
        }
        let below = unit_phase(kf * arg);
        let above = unit_phase(kf * (PI - arg));
        for n in 0..len {
            d[[n + k, n]] = below * h[n];
            if k > 0 {
                d[[n, n + k]] = above * h[n];
            }
        }
    }
    d
}

/// `exp(δ a† − δ* a)` of the truncated ladder operators, by scaling and
/// squaring a Taylor series.
///
/// Differs from [`displacement_matrix`] only near the truncation edge.
pub fn displacement_matrix_expm(delta: Complex64, n_max: usize) -> Array2<Complex64> {
    let dim = n_max + 1;
    let mut g = Array2::from_elem((dim, dim), ZERO);
    for m in 0..n_max {
        let s = ((m + 1) as f64).sqrt();
        g[[m + 1, m]] = delta * s; // δ a†
        g[[m, m + 1]] = -delta.conj() * s; // −δ* a
    }
    let norm = 2.0 * delta.norm() * (n_max as f64).sqrt();
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.5 {
        squarings += 1;
    }
    let g = g / Complex64::new(2f64.powi(squarings), 0.0);

    let mut result = Array2::from_elem((dim, dim), ZERO);
    for i in 0..dim {
        result[[i, i]] = Complex64::new(1.0, 0.0);
    }
    let mut term = result.clone();
    for k in 1..40 {
        term = term.dot(&g) / Complex64::new(k as f64, 0.0);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// `exp(δ a† − δ* a)|ψ⟩` with the truncated generator, as a sequence of
/// short Taylor steps acting on the vector.
fn expm_action(v: &[Complex64], delta: Complex64) -> Vec<Complex64> {
    let dim = v.len();
    let n_max = dim - 1;
    let norm = 2.0 * delta.norm() * (n_max.max(1) as f64).sqrt();
    let steps = (norm / 0.5).ceil().max(1.0) as usize;
    let h = delta / steps as f64;
    let sqrt: Vec<f64> = (0..=dim).map(|m| (m as f64).sqrt()).collect();
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        (0..dim)
            .map(|m| {
                let mut y = ZERO;
                if m > 0 {
                    y += h * sqrt[m] * x[m - 1];
                }
                if m + 1 < dim {
                    y -= h.conj() * sqrt[m + 1] * x[m + 1];
                }
                y
            })
            .collect()
    };
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut out = v.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..60 {
            term = apply(&term);
            let inv_k = 1.0 / k as f64;
            term.iter_mut().for_each(|z| *z *= inv_k);
            acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 * scale {
                break;
            }
        }
        out = acc;
    }
    out
}

/// `D(δ)|ψ⟩` within the truncation.
///
/// Applies the closed-form matrix elements and checks the result against
/// the truncated-generator exponential. Fails if more than `threshold`
/// probability leaves the basis, or if the constructions disagree.
pub fn displace_fock(state: &FockVector, delta: ComplexAmplitude, threshold: f64) -> Result<FockVector> {
    let d = delta.value();
    let n_max = state.n_max();
    let matrix = displacement_matrix(d, n_max);
    let v = ndarray::Array1::from(state.coeffs.clone());
    let out: Vec<Complex64> = matrix.dot(&v).to_vec();

    let before = state.norm_sqr();
    let after: f64 = out.iter().map(|c| c.norm_sqr()).collect::<NeumaierSum>().value();
    let lost = (before - after).max(0.0);
    if lost > threshold {
        return Err(Error::Headroom { lost, threshold });
    }

    let check = expm_action(&state.coeffs, d);
    let diff = out
        .iter()
        .zip(&check)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if diff > CONSTRUCTION_AGREEMENT * before.sqrt().max(1.0) {
        return Err(Error::OracleMismatch { diff });
    }
    Ok(FockVector { coeffs: out, tail_bound: state.tail_bound + lost })
}

/// `Σ_j c_j |α_j⟩ / √n` in the number basis, unnormalized.
pub fn cat_fock(spec: &CatStateSpec, n_max: usize, threshold: f64) -> Result<FockVector> {
    let scale = 1.0 / (spec.n() as f64).sqrt();
    let mut psi = FockVector { coeffs: vec![ZERO; n_max + 1], tail_bound: 0.0 };
    for (c, p) in spec.coefficients().into_iter().zip(component_positions(spec)) {
        psi.axpy(c * scale, &coherent_fock(p, n_max, threshold)?);
    }
    Ok(psi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOverlap {
    pub value: Complex64,
    /// Bound from the discarded probability of both operands.
    pub error_bound: f64,
}

/// `⟨cat|D(δ)|cat⟩` by explicit number-basis vectors.
pub fn overlap_fock_oracle(spec: &CatStateSpec, delta: Displacement, n_max: usize) -> Result<OracleOverlap> {
    let psi = cat_fock(spec, n_max, DEFAULT_TAIL_THRESHOLD)?;
    let shifted = displace_fock(&psi, delta.delta(), DEFAULT_TAIL_THRESHOLD)?;
    let mut value = psi.inner(&shifted);
    let norm_sqr = psi.norm_sqr();
    let mut error_bound = norm_sqr.sqrt() * (psi.tail_bound.sqrt() + shifted.tail_bound.sqrt());
    if spec.convention() == Convention::TrueNormalized {
        value /= norm_sqr;
        error_bound /= norm_sqr;
    }
    Ok(OracleOverlap { value, error_bound })
}

/// `W(β) = (2/π) Σ_m (−1)^m |⟨m|D(−β)|ψ⟩|²`, the displaced-parity form.
pub fn wigner_fock(state: &FockVector, beta: Complex64) -> Result<f64> {
    let shifted = displace_fock(state, ComplexAmplitude::try_from(-beta)?, DEFAULT_TAIL_THRESHOLD)?;
    let parity: NeumaierSum = shifted
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| if m % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() })
        .collect();
    Ok(2.0 / PI * parity.value())
}
