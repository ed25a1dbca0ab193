//! Figure curves, convergence metrics, zero finding, and the ring-source
//! mutual-coherence correspondence.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::overlap::{
    cat2_phased_intensity, overlap_asymptotic, overlap_band, overlap_diagonal, overlap_exact_polar_with,
    overlap_exact_with, Envelope, OverlapResult, SumMask, Tier,
};
use crate::parallel::{map_ordered, Exec};
use crate::specfun::j0;
use crate::states::{CatStateSpec, ComplexAmplitude, Convention, Displacement};

/// An `(x, y)` curve with an ordered parameter record.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSeries {
    label: String,
    points: Vec<(f64, f64)>,
    metadata: Vec<(String, String)>,
}

impl CurveSeries {
    /// `x` must be strictly increasing and `y` finite.
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, metadata: Vec<(String, String)>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::InvalidArgument("curve x values must be strictly increasing".into()));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFinite("curve sample"));
        }
        Ok(CurveSeries { label: label.into(), points, metadata })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// `# label=… key=value …`, then `x,y`, then one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "# label={}", self.label)?;
        for (k, v) in &self.metadata {
            write!(out, " {k}={v}")?;
        }
        writeln!(out)?;
        writeln!(out, "x,y")?;
        for (x, y) in &self.points {
            writeln!(out, "{},{}", format_value(*x), format_value(*y))?;
        }
        Ok(())
    }
}

/// Shortest round-trip text for `v`, switching to exponent form outside
/// `[1e-4, 1e15)` so tiny values do not expand into long zero runs.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// `count` evenly spaced values on `[start, end]`.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => {
            let step = (end - start) / (count - 1) as f64;
            (0..count).map(|i| start + i as f64 * step).collect()
        }
    }
}

/// Which real number a complex overlap is reduced to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Part {
    #[default]
    Real,
    Modulus,
    /// `|·|²`
    Intensity,
}

impl Part {
    pub fn apply(self, r: &OverlapResult) -> f64 {
        match self {
            Part::Real => r.value.re,
            Part::Modulus => r.value.norm(),
            Part::Intensity => r.value.norm_sqr(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Part::Real => "real",
            Part::Modulus => "modulus",
            Part::Intensity => "intensity",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// `θ_δ − θ_α`; `π/2` sweeps perpendicular to `α`.
    pub relative_angle: f64,
    pub part: Part,
    pub mask: SumMask,
    pub envelope: Envelope,
    pub exec: Exec,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            relative_angle: FRAC_PI_2,
            part: Part::Real,
            mask: SumMask::All,
            envelope: Envelope::Dropped,
            exec: Exec::default(),
        }
    }
}

/// One overlap evaluation at the requested tier.
pub fn evaluate_tier(spec: &CatStateSpec, tier: Tier, delta: Displacement, opts: &SweepOptions) -> Result<OverlapResult> {
    match tier {
        // points already run in parallel; keep each sum sequential
        Tier::ExactCartesian => overlap_exact_with(spec, delta, opts.mask, Exec::Sequential),
        Tier::ExactPolar => overlap_exact_polar_with(spec, delta, opts.mask, Exec::Sequential),
        Tier::BandApprox => overlap_band(spec, delta),
        Tier::DiagonalApprox => overlap_diagonal(spec, delta, opts.envelope),
        Tier::Asymptotic => Ok(overlap_asymptotic(spec.alpha(), delta)),
    }
}

/// Overlap versus `|δ|` along a fixed direction relative to `α`.
pub fn overlap_sweep(spec: &CatStateSpec, tier: Tier, delta_grid: &[f64], opts: &SweepOptions) -> Result<CurveSeries> {
    let alpha = spec.alpha();
    let ys = map_ordered(opts.exec, delta_grid.len(), |i| {
        let d = Displacement::relative_to(alpha, delta_grid[i], opts.relative_angle)?;
        evaluate_tier(spec, tier, d, opts).map(|r| opts.part.apply(&r))
    });
    let ys = ys.into_iter().collect::<Result<Vec<f64>>>()?;
    CurveSeries::new(
        format!("{}_n{}", tier.name(), spec.n()),
        delta_grid.iter().copied().zip(ys).collect(),
        meta(&[
            ("n", spec.n().to_string()),
            ("alpha", alpha.abs().to_string()),
            ("alpha_phase", alpha.arg().to_string()),
            ("delta_angle", opts.relative_angle.to_string()),
            ("tier", tier.name().to_string()),
            ("mask", format!("{:?}", opts.mask)),
            ("part", opts.part.name().to_string()),
            (
                "convention",
                match spec.convention() {
                    Convention::Prefactor => "prefactor".into(),
                    Convention::TrueNormalized => "normalized".into(),
                },
            ),
        ]),
    )
}

/// `|off-diagonal part of the exact overlap|` versus `n`, for real `α` and
/// `δ` at `relative_angle` from it.
pub fn offdiag_curve(alpha_mag: f64, delta_mag: f64, n_values: &[usize], relative_angle: f64) -> Result<CurveSeries> {
    offdiag_curve_with(alpha_mag, delta_mag, n_values, relative_angle, Exec::default())
}

pub fn offdiag_curve_with(
    alpha_mag: f64,
    delta_mag: f64,
    n_values: &[usize],
    relative_angle: f64,
    exec: Exec,
) -> Result<CurveSeries> {
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("n values must be strictly ascending".into()));
    }
    let alpha = ComplexAmplitude::real(alpha_mag)?;
    let delta = Displacement::relative_to(alpha, delta_mag, relative_angle)?;
    let ys = map_ordered(exec, n_values.len(), |i| -> Result<f64> {
        let spec = CatStateSpec::new(n_values[i], alpha)?;
        Ok(overlap_exact_with(&spec, delta, SumMask::OffDiagonalOnly, Exec::Sequential)?.value.norm())
    });
    let ys = ys.into_iter().collect::<Result<Vec<f64>>>()?;
    CurveSeries::new(
        format!("offdiag_alpha{alpha_mag}"),
        n_values.iter().map(|&n| n as f64).zip(ys).collect(),
        meta(&[
            ("alpha", alpha_mag.to_string()),
            ("delta", delta_mag.to_string()),
            ("delta_angle", relative_angle.to_string()),
            ("tier", "exact".into()),
            ("mask", "OffDiagonalOnly".into()),
        ]),
    )
}

/// Exact overlap next to its `J0(2|α||δ|)` limit on a shared `δ` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceCurve {
    pub overlap: CurveSeries,
    pub reference: CurveSeries,
}

impl ConvergenceCurve {
    fn deviations(&self) -> impl Iterator<Item = f64> + '_ {
        self.overlap.ys().zip(self.reference.ys()).map(|(a, b)| (a - b).abs())
    }

    /// `max |OF − J0|` over the sampled grid.
    pub fn sup_deviation(&self) -> f64 {
        self.deviations().fold(0.0, f64::max)
    }

    /// Root-mean-square deviation over the sampled grid.
    pub fn l2_deviation(&self) -> f64 {
        let n = self.overlap.points().len().max(1) as f64;
        (self.deviations().map(|d| d * d).sum::<f64>() / n).sqrt()
    }
}

pub fn convergence_curve(alpha_mag: f64, n: usize, delta_grid: &[f64], part: Part) -> Result<ConvergenceCurve> {
    let spec = CatStateSpec::new(n, ComplexAmplitude::real(alpha_mag)?)?;
    let opts = SweepOptions { part, ..SweepOptions::default() };
    let overlap = overlap_sweep(&spec, Tier::ExactCartesian, delta_grid, &opts)?;
    let reference = CurveSeries::new(
        "j0",
        delta_grid.iter().map(|&d| (d, j0(2.0 * alpha_mag * d))).collect(),
        meta(&[("alpha", alpha_mag.to_string()), ("tier", "asymptotic".into())]),
    )?;
    Ok(ConvergenceCurve { overlap, reference })
}

/// First sign change, located by linear interpolation between the
/// bracketing samples. A sample that is exactly zero counts as the root.
pub fn first_zero(series: &CurveSeries) -> Option<f64> {
    let pts = series.points();
    for (i, w) in pts.windows(2).enumerate() {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == 0.0 && i > 0 {
            return Some(x0);
        }
        if y0 * y1 < 0.0 {
            return Some(x0 - y0 * (x1 - x0) / (y1 - y0));
        }
    }
    match pts.last() {
        Some(&(x, y)) if y == 0.0 && pts.len() > 1 => Some(x),
        _ => None,
    }
}

/// First `x` whose `y` exceeds `threshold`.
pub fn threshold_crossing(series: &CurveSeries, threshold: f64) -> Option<f64> {
    series.points().iter().find(|(_, y)| *y > threshold).map(|(x, _)| *x)
}

/// Ring source of radius `r0`, screen at distance `R`, two points
/// `separation` apart, lengths in units where the wavelength is `wavelength`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VczParams {
    pub r0: f64,
    pub screen_distance: f64,
    pub wavelength: f64,
    pub separation: f64,
}

impl VczParams {
    pub fn new(r0: f64, screen_distance: f64, wavelength: f64, separation: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(r0) || !ok(screen_distance) || !ok(wavelength) || !separation.is_finite() || separation < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "ring parameters must be positive (separation non-negative): r0={r0} R={screen_distance} lambda={wavelength} sep={separation}"
            )));
        }
        Ok(VczParams { r0, screen_distance, wavelength, separation })
    }
}

/// Complex degree of coherence of a uniform ring source,
/// `J0(2π r0 |r1 − r2| / (λ R))`.
pub fn vcz_coherence(params: &VczParams) -> f64 {
    j0(2.0 * PI * params.r0 * params.separation / (params.wavelength * params.screen_distance))
}

/// The asymptotic overlap and the ring-source coherence on a shared axis,
/// with `r0 ↔ |α|`, `separation ↔ |δ|`, `R = 1`.
///
/// Optical units are a rescaling of the overlap argument: with
/// `[a, a†] = π/λ` the displacement enters as `δ π/λ`. At `λ = π` both
/// series reduce to `J0(2|α||δ|)`.
pub fn vcz_correspondence_report(alpha_mag: f64, wavelength: f64, separations: &[f64]) -> Result<(CurveSeries, CurveSeries)> {
    let alpha = ComplexAmplitude::real(alpha_mag)?;
    let mut quantum = Vec::with_capacity(separations.len());
    let mut optics = Vec::with_capacity(separations.len());
    for &sep in separations {
        let params = VczParams::new(alpha_mag, 1.0, wavelength, sep)?;
        let scaled = Displacement::new(ComplexAmplitude::real(sep * PI / wavelength)?);
        quantum.push((sep, overlap_asymptotic(alpha, scaled).value.re));
        optics.push((sep, vcz_coherence(&params)));
    }
    let md = meta(&[
        ("alpha", alpha_mag.to_string()),
        ("lambda", wavelength.to_string()),
        ("R", "1".into()),
    ]);
    Ok((
        CurveSeries::new("overlap_asymptotic", quantum, md.clone())?,
        CurveSeries::new("ring_coherence", optics, md)?,
    ))
}

fn first_local_max(xs: &[f64], ys: &[f64]) -> Option<f64> {
    (1..ys.len().saturating_sub(1))
        .find(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .map(|i| {
            // parabola through the three samples
            let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
            let h = xs[i + 1] - xs[i];
            let denom = y0 - 2.0 * y1 + y2;
            if denom == 0.0 {
                xs[i]
            } else {
                xs[i] + 0.5 * h * (y0 - y2) / denom
            }
        })
}

/// Shift of the first fringe maximum of `(|α⟩ + e^{iφ}|−α⟩)` relative to
/// `φ = 0`, along `δ⊥` with `α` real. Computed from the exact overlap.
pub fn phased_fringe_offset(alpha_mag: f64, phi: f64, delta_grid: &[f64]) -> Result<Option<f64>> {
    let alpha = ComplexAmplitude::real(alpha_mag)?;
    let curve = |phase: f64| -> Result<Vec<f64>> {
        delta_grid
            .iter()
            .map(|&d| cat2_phased_intensity(alpha, phase, Displacement::new(ComplexAmplitude::new(0.0, d)?)))
            .collect()
    };
    let base = first_local_max(delta_grid, &curve(0.0)?);
    let shifted = first_local_max(delta_grid, &curve(phi)?);
    Ok(base.zip(shifted).map(|(b, s)| s - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn curve_validation() {
        assert!(CurveSeries::new("a", vec![(0.0, 1.0), (0.0, 2.0)], vec![]).is_err());
        assert!(CurveSeries::new("a", vec![(0.0, 1.0), (1.0, f64::NAN)], vec![]).is_err());
        assert!(CurveSeries::new("a", vec![(0.0, 1.0), (1.0, 2.0)], vec![]).is_ok());
    }

    #[test]
    fn first_zero_cases() {
        let j0_series = CurveSeries::new(
            "j0",
            (0..=400).map(|i| {
                let d = i as f64 * 1e-3;
                (d, j0(20.0 * d))
            }).collect(),
            vec![],
        )
        .unwrap();
        let z = first_zero(&j0_series).unwrap();
        assert_abs_diff_eq!(z, 0.120241, epsilon = 1e-3);

        let positive = CurveSeries::new("p", vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.1)], vec![]).unwrap();
        assert_eq!(first_zero(&positive), None);

        let early = CurveSeries::new("e", vec![(0.0, 1.0), (1.0, -3.0), (2.0, 4.0)], vec![]).unwrap();
        let z = first_zero(&early).unwrap();
        assert!(z > 0.0 && z < 1.0);
        assert_abs_diff_eq!(z, 0.25);

        let touching = CurveSeries::new("t", vec![(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)], vec![]).unwrap();
        assert_eq!(first_zero(&touching), Some(1.0));
    }

    #[test]
    fn offdiag_single_component_is_zero() {
        let c = offdiag_curve(10.0, 0.2, &[1], FRAC_PI_2).unwrap();
        assert_eq!(c.points()[0].1, 0.0);
        assert!(offdiag_curve(10.0, 0.2, &[3, 2], FRAC_PI_2).is_err());
    }

    #[test]
    fn offdiag_flat_region() {
        let ns: Vec<usize> = (2..=40).collect();
        let c = offdiag_curve(10.0, 0.2, &ns, FRAC_PI_2).unwrap();
        for (n, y) in c.points() {
            assert!(*y >= 0.0);
            if *n <= 11.0 {
                assert!(*y < 1e-6, "n={n} y={y}");
            }
        }
        let alpha = ComplexAmplitude::real(10.0).unwrap();
        let d = Displacement::relative_to(alpha, 0.2, FRAC_PI_2).unwrap();
        for (n, y) in c.points() {
            let spec = CatStateSpec::new(*n as usize, alpha).unwrap();
            let all = crate::overlap::overlap_exact(&spec, d, SumMask::All).unwrap().value;
            let diag = crate::overlap::overlap_exact(&spec, d, SumMask::DiagonalOnly).unwrap().value;
            assert_abs_diff_eq!(*y, (all - diag).norm(), epsilon = 1e-12);
        }
    }

    #[test]
    fn offdiag_threshold_ratio_alpha4() {
        let ns: Vec<usize> = (1..=16).collect();
        let c = offdiag_curve(4.0, 0.2, &ns, FRAC_PI_2).unwrap();
        let n_star = threshold_crossing(&c, 1e-3).unwrap();
        assert!((1.5..=3.0).contains(&(n_star / 4.0)), "n* = {n_star}");
    }

    #[test]
    fn convergence_basics() {
        let grid = linspace(0.0, 0.4, 201);
        let c4 = convergence_curve(10.0, 4, &grid, Part::Real).unwrap();
        assert_abs_diff_eq!(c4.overlap.points()[0].1, 1.0, epsilon = 1e-10);
        let c16 = convergence_curve(10.0, 16, &grid, Part::Real).unwrap();
        assert!(c16.sup_deviation() < c4.sup_deviation());
        assert!(c16.l2_deviation() < c4.l2_deviation());
        let z = first_zero(&c16.overlap).unwrap();
        let target = crate::specfun::sensitivity_delta(10.0).unwrap();
        assert!((z / target - 1.0).abs() < 0.02, "{z} vs {target}");
    }

    #[test]
    fn two_component_zero_is_quarter_period() {
        for a in [5.0, 8.0, 12.0] {
            let spec = CatStateSpec::new(2, ComplexAmplitude::real(a).unwrap()).unwrap();
            let grid = linspace(0.0, 0.3, 3001);
            let c = overlap_sweep(&spec, Tier::ExactCartesian, &grid, &SweepOptions::default()).unwrap();
            let z = first_zero(&c).unwrap();
            assert!((z / (PI / (4.0 * a)) - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn vcz() {
        let p = VczParams::new(3.0, 1.0, 0.5, 0.0).unwrap();
        assert_eq!(vcz_coherence(&p), 1.0);
        let c = crate::specfun::j0_first_root();
        // r0 · sep / (λ R) = C / 2π
        let p = VczParams::new(2.0, 1.5, 0.7, c / (2.0 * PI) * 0.7 * 1.5 / 2.0).unwrap();
        assert_abs_diff_eq!(vcz_coherence(&p), 0.0, epsilon = 1e-10);
        assert!(VczParams::new(0.0, 1.0, 1.0, 0.1).is_err());
        assert!(VczParams::new(1.0, 1.0, 1.0, -0.1).is_err());

        let seps = linspace(0.0, 0.5, 101);
        for lambda in [0.3, 1.0, PI] {
            let (q, o) = vcz_correspondence_report(10.0, lambda, &seps).unwrap();
            // same J0 at arguments one ulp apart; the series amplifies that by ~I0(x)
            for (a, b) in q.ys().zip(o.ys()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
        let (q, _) = vcz_correspondence_report(10.0, PI, &seps).unwrap();
        for (x, y) in q.points() {
            assert_abs_diff_eq!(*y, j0(20.0 * x), epsilon = 1e-12);
        }
        let (q, o) = vcz_correspondence_report(10.0, PI, &[0.12024]).unwrap();
        assert!(q.points()[0].1.abs() < 1e-4 && o.points()[0].1.abs() < 1e-4);
    }

    #[test]
    fn sweep_tiers() {
        let spec = CatStateSpec::new(2, ComplexAmplitude::real(10.0).unwrap()).unwrap();
        let grid = linspace(0.0, 0.2, 41);
        let c = overlap_sweep(&spec, Tier::DiagonalApprox, &grid, &SweepOptions::default()).unwrap();
        for (x, y) in c.points() {
            assert_abs_diff_eq!(*y, (20.0 * x).cos(), epsilon = 1e-12);
        }
        let cart = overlap_sweep(&spec, Tier::ExactCartesian, &grid, &SweepOptions::default()).unwrap();
        let polar = overlap_sweep(&spec, Tier::ExactPolar, &grid, &SweepOptions::default()).unwrap();
        for (a, b) in cart.ys().zip(polar.ys()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_header() {
        let spec = CatStateSpec::new(16, ComplexAmplitude::real(10.0).unwrap()).unwrap();
        let c = overlap_sweep(&spec, Tier::ExactCartesian, &[0.0, 0.1], &SweepOptions::default()).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let head = lines.next().unwrap();
        assert!(head.starts_with("# label=exact_n16 n=16 alpha=10"));
        assert!(head.contains("tier=exact"));
        assert_eq!(lines.next(), Some("x,y"));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn phase_does_not_move_fringes() {
        let grid = linspace(0.0, 0.3, 601);
        let off = phased_fringe_offset(10.0, PI / 3.0, &grid).unwrap().unwrap();
        assert!(off.abs() < 1e-6, "{off}");
    }
}
