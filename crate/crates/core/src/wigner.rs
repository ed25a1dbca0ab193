//! Wigner functions of cat states on rectangular phase-space grids, and the
//! spacing of the central interference tiles.
//!
//! Grid coordinates are `β = x + i p` with `ħ = 1`, normalized so that
//! `∫ W dx dp = ⟨ψ|ψ⟩`. The vacuum is `(2/π) e^{−2|β|²}`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::{self, Write};

use ndarray::Array2;
use num_complex::Complex64;

use crate::analysis::format_value;
use crate::error::{Error, Result};
use crate::parallel::{map_ordered, Exec};
use crate::states::{cexp, raw_positions, true_norm, CatStateSpec, Convention};
use crate::sum::{ComplexSum, NeumaierSum};

/// Margin around `|α|` a grid needs to hold essentially all of the state.
pub const SUPPORT_MARGIN: f64 = 4.0;

/// Inclusive sample lattice `x_min..=x_max` × `p_min..=p_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeometry {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridGeometry {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        let g = GridGeometry { x_min, x_max, p_min, p_max, nx, np };
        g.validate()?;
        Ok(g)
    }

    /// `[−half, half]²` with `points` samples per side.
    pub fn square(half: f64, points: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, points, points)
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points per axis, got {}x{}",
                self.nx, self.np
            )));
        }
        let finite = [self.x_min, self.x_max, self.p_min, self.p_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.p_min >= self.p_max {
            return Err(Error::InvalidGrid(format!(
                "bad ranges x [{}, {}] p [{}, {}]",
                self.x_min, self.x_max, self.p_min, self.p_max
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, k: usize) -> f64 {
        self.p_min + k as f64 * self.dp()
    }

    /// Whether the window contains `[−(|α|+4), |α|+4]` on both axes.
    pub fn covers(&self, alpha_mag: f64) -> bool {
        let reach = alpha_mag + SUPPORT_MARGIN;
        self.x_min <= -reach && self.x_max >= reach && self.p_min <= -reach && self.p_max >= reach
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    geometry: GridGeometry,
    /// `values[[i, k]] = W(x_i + i p_k)`.
    values: Array2<f64>,
    covers_support: bool,
    expected_norm: f64,
}

impl WignerGrid {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// False when part of the state lies outside the window; the quadrature
    /// norm will then fall short.
    pub fn covers_support(&self) -> bool {
        self.covers_support
    }

    /// `⟨ψ|ψ⟩` under the spec's convention; the quadrature norm should
    /// approach this on a covering grid.
    pub fn expected_norm(&self) -> f64 {
        self.expected_norm
    }

    pub fn dx(&self) -> f64 {
        self.geometry.dx()
    }

    pub fn dp(&self) -> f64 {
        self.geometry.dp()
    }

    /// Rows of `x,p,W`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,p,W")?;
        for i in 0..self.geometry.nx {
            for k in 0..self.geometry.np {
                writeln!(
                    out,
                    "{},{},{}",
                    format_value(self.geometry.x(i)),
                    format_value(self.geometry.p(k)),
                    format_value(self.values[[i, k]])
                )?;
            }
        }
        Ok(())
    }

    /// One text line per `x` row, `np` whitespace-separated values, after a
    /// comment line with the geometry.
    pub fn write_matrix<W: Write>(&self, mut out: W) -> io::Result<()> {
        let g = &self.geometry;
        writeln!(
            out,
            "# nx={} np={} x_min={} x_max={} p_min={} p_max={}",
            g.nx, g.np, g.x_min, g.x_max, g.p_min, g.p_max
        )?;
        for row in self.values.rows() {
            let line: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Bilinear interpolation; `None` outside the window.
    pub fn sample(&self, x: f64, p: f64) -> Option<f64> {
        let g = &self.geometry;
        let eps = 1e-9;
        if x < g.x_min - eps || x > g.x_max + eps || p < g.p_min - eps || p > g.p_max + eps {
            return None;
        }
        let fx = ((x - g.x_min) / g.dx()).clamp(0.0, (g.nx - 1) as f64);
        let fp = ((p - g.p_min) / g.dp()).clamp(0.0, (g.np - 1) as f64);
        let i = (fx.floor() as usize).min(g.nx - 2);
        let k = (fp.floor() as usize).min(g.np - 2);
        let (tx, tp) = (fx - i as f64, fp - k as f64);
        let v = &self.values;
        Some(
            (1.0 - tx) * (1.0 - tp) * v[[i, k]]
                + tx * (1.0 - tp) * v[[i + 1, k]]
                + (1.0 - tx) * tp * v[[i, k + 1]]
                + tx * tp * v[[i + 1, k + 1]],
        )
    }
}

/// Cross-Wigner function of `|a⟩⟨b|` at `β`:
/// `(2/π) exp(−2(β − a)(β* − b*) − ½|a|² − ½|b|² + a b*)`.
pub fn cross_wigner(a: Complex64, b: Complex64, beta: Complex64) -> Complex64 {
    let e = -2.0 * (beta - a) * (beta.conj() - b.conj()) - 0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a * b.conj();
    2.0 / PI * cexp(e)
}

struct Components {
    positions: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    scale: f64,
}

impl Components {
    fn new(spec: &CatStateSpec) -> Self {
        let mut scale = 1.0 / spec.n() as f64;
        if spec.convention() == Convention::TrueNormalized {
            scale /= true_norm(spec).powi(2);
        }
        Components { positions: raw_positions(spec), coeffs: spec.coefficients(), scale }
    }

    /// `(j, k)` and `(k, j)` are complex conjugates, so the sum runs over
    /// `j ≤ k` and keeps real parts.
    fn paired(&self, beta: Complex64) -> f64 {
        let n = self.positions.len();
        let mut acc = NeumaierSum::default();
        for j in 0..n {
            let cj = self.coeffs[j];
            acc += (cj * cj.conj() * cross_wigner(self.positions[j], self.positions[j], beta)).re;
            for k in j + 1..n {
                let w = cj * self.coeffs[k].conj() * cross_wigner(self.positions[j], self.positions[k], beta);
                acc += 2.0 * w.re;
            }
        }
        self.scale * acc.value()
    }

    fn unpaired(&self, beta: Complex64) -> Complex64 {
        let n = self.positions.len();
        let mut acc = ComplexSum::default();
        for j in 0..n {
            for k in 0..n {
                acc += self.coeffs[j] * self.coeffs[k].conj() * cross_wigner(self.positions[j], self.positions[k], beta);
            }
        }
        acc.value() * self.scale
    }
}

/// `W(β)` of the cat state.
pub fn wigner_value(spec: &CatStateSpec, beta: Complex64) -> f64 {
    Components::new(spec).paired(beta)
}

/// The plain double sum over all `(j, k)` without conjugate pairing. Its
/// imaginary part is pure rounding residue.
pub fn wigner_value_unpaired(spec: &CatStateSpec, beta: Complex64) -> Complex64 {
    Components::new(spec).unpaired(beta)
}

pub fn wigner_cat(spec: &CatStateSpec, geometry: GridGeometry) -> Result<WignerGrid> {
    wigner_cat_with(spec, geometry, Exec::default())
}

/// Evaluates `W` on the grid, one `x` row per task.
pub fn wigner_cat_with(spec: &CatStateSpec, geometry: GridGeometry, exec: Exec) -> Result<WignerGrid> {
    geometry.validate()?;
    let comps = Components::new(spec);
    let rows = map_ordered(exec, geometry.nx, |i| {
        let x = geometry.x(i);
        (0..geometry.np)
            .map(|k| comps.paired(Complex64::new(x, geometry.p(k))))
            .collect::<Vec<f64>>()
    });
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let values = Array2::from_shape_vec((geometry.nx, geometry.np), flat)
        .map_err(|e| Error::InvalidGrid(e.to_string()))?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Wigner grid"));
    }
    let max_reach = raw_positions(spec).iter().map(|p| p.norm()).fold(0.0, f64::max);
    let expected_norm = match spec.convention() {
        Convention::TrueNormalized => 1.0,
        Convention::Prefactor => true_norm(spec).powi(2),
    };
    Ok(WignerGrid {
        geometry,
        values,
        covers_support: geometry.covers(max_reach),
        expected_norm,
    })
}

/// `Σ W dx dp`.
pub fn quadrature_norm(grid: &WignerGrid) -> f64 {
    let s: NeumaierSum = grid.values.iter().copied().collect();
    s.value() * grid.dx() * grid.dp()
}

/// Line through the origin along which tile spacing is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    P,
    /// The `x = p` line. Needed for compass states, whose tile corners sit
    /// on the `x` and `p` axes so `W` only touches zero there.
    Diagonal,
}

impl Axis {
    fn direction(self) -> (f64, f64) {
        match self {
            Axis::X => (1.0, 0.0),
            Axis::P => (0.0, 1.0),
            Axis::Diagonal => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        }
    }
}

/// Half-length of the sampled segment.
const TILE_WINDOW: f64 = 1.0;
const MIN_SAMPLES_PER_LOBE: f64 = 8.0;

/// Sign-change positions of `W` along `axis`, as arc length from the origin.
pub fn sign_changes(grid: &WignerGrid, axis: Axis) -> Result<Vec<f64>> {
    let (ux, up) = axis.direction();
    let h = grid.dx().min(grid.dp());
    let steps = (TILE_WINDOW / h).floor() as i64;
    let mut samples = Vec::with_capacity(2 * steps as usize + 1);
    for s in -steps..=steps {
        let t = s as f64 * h;
        let v = grid.sample(t * ux, t * up).ok_or_else(|| {
            Error::InvalidGrid(format!("grid does not contain the segment |t| ≤ {TILE_WINDOW} through the origin"))
        })?;
        samples.push((t, v));
    }
    let mut crossings = Vec::new();
    for w in samples.windows(2) {
        let ((t0, v0), (t1, v1)) = (w[0], w[1]);
        if v0 * v1 < 0.0 {
            crossings.push(t0 - v0 * (t1 - t0) / (v1 - v0));
        }
    }
    Ok(crossings)
}

/// Mean distance between consecutive sign changes of `W` along `axis`
/// within `|t| < 1` of the origin.
pub fn central_tile_spacing(grid: &WignerGrid, axis: Axis) -> Result<f64> {
    let crossings = sign_changes(grid, axis)?;
    if crossings.len() < 3 {
        return Err(Error::InsufficientResolution(format!(
            "{} sign changes along {:?}, need at least 3",
            crossings.len(),
            axis
        )));
    }
    let spacing = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    let h = grid.dx().min(grid.dp());
    if spacing < MIN_SAMPLES_PER_LOBE * h {
        return Err(Error::InsufficientResolution(format!(
            "spacing {spacing} resolved by fewer than {MIN_SAMPLES_PER_LOBE} samples of {h}"
        )));
    }
    Ok(spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{cat_fock, wigner_fock, DEFAULT_TAIL_THRESHOLD};
    use crate::states::ComplexAmplitude;
    use approx::assert_abs_diff_eq;

    fn amp(re: f64, im: f64) -> ComplexAmplitude {
        ComplexAmplitude::new(re, im).unwrap()
    }

    #[test]
    fn vacuum() {
        let spec = CatStateSpec::new(1, amp(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(wigner_value(&spec, Complex64::new(0.0, 0.0)), 2.0 / PI, epsilon = 1e-15);
        let b = Complex64::new(0.3, -0.7);
        assert_abs_diff_eq!(wigner_value(&spec, b), 2.0 / PI * (-2.0 * b.norm_sqr()).exp(), epsilon = 1e-15);

        let grid = wigner_cat(&spec, GridGeometry::square(6.0, 241).unwrap()).unwrap();
        assert_abs_diff_eq!(quadrature_norm(&grid), 1.0, epsilon = 1e-6);
        assert!(matches!(central_tile_spacing(&grid, Axis::X), Err(Error::InsufficientResolution(_))));
    }

    #[test]
    fn displaced_coherent_state() {
        let spec = CatStateSpec::new(1, amp(2.0, 0.0)).unwrap();
        for b in [Complex64::new(2.0, 0.0), Complex64::new(1.5, 0.3), Complex64::new(-1.0, 1.0)] {
            let shifted = b - Complex64::new(2.0, 0.0);
            assert_abs_diff_eq!(
                wigner_value(&spec, b),
                2.0 / PI * (-2.0 * shifted.norm_sqr()).exp(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn compass_matches_fock_oracle() {
        let spec = CatStateSpec::new(4, amp(3.0, 0.0)).unwrap();
        let psi = cat_fock(&spec, 128, DEFAULT_TAIL_THRESHOLD).unwrap();
        for i in 0..11 {
            for k in 0..11 {
                let b = Complex64::new(-2.0 + 0.4 * i as f64, -2.0 + 0.4 * k as f64);
                let closed = wigner_value(&spec, b);
                let fock = wigner_fock(&psi, b).unwrap();
                assert_abs_diff_eq!(closed, fock, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn pairing_realness() {
        let spec = CatStateSpec::new(5, amp(2.0, 1.0)).unwrap();
        for i in 0..20 {
            let b = Complex64::new(-3.0 + 0.3 * i as f64, 1.5 - 0.2 * i as f64);
            let full = wigner_value_unpaired(&spec, b);
            assert!(full.im.abs() < 1e-12);
            assert_abs_diff_eq!(full.re, wigner_value(&spec, b), epsilon = 1e-13);
        }
    }

    #[test]
    fn rotation_covariance() {
        let phi = 0.77;
        let base = CatStateSpec::new(3, amp(2.5, 0.5)).unwrap();
        let rot = CatStateSpec::new(3, base.alpha().rotated(phi)).unwrap();
        let r = Complex64::from_polar(1.0, phi);
        for i in 0..30 {
            let b = Complex64::new(-2.0 + 0.13 * i as f64, 1.0 - 0.09 * i as f64);
            assert_abs_diff_eq!(wigner_value(&base, b), wigner_value(&rot, b * r), epsilon = 1e-9);
        }
    }

    #[test]
    fn compass_norm() {
        let spec = CatStateSpec::new(4, amp(3.0, 0.0)).unwrap().with_convention(Convention::TrueNormalized);
        let grid = wigner_cat(&spec, GridGeometry::square(8.0, 321).unwrap()).unwrap();
        assert!(grid.covers_support());
        assert_abs_diff_eq!(quadrature_norm(&grid), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn narrow_window_flags_coverage() {
        let spec = CatStateSpec::new(4, amp(6.0, 0.0)).unwrap();
        let grid = wigner_cat(&spec, GridGeometry::square(1.0, 41).unwrap()).unwrap();
        assert!(!grid.covers_support());
        assert!(quadrature_norm(&grid) < 0.5);
    }

    #[test]
    fn two_component_fringes() {
        // cross term 2 e^{−2|β|²} cos(4|α| p): sign changes every π/(4|α|)
        let spec = CatStateSpec::new(2, amp(5.0, 0.0)).unwrap();
        let grid = wigner_cat(&spec, GridGeometry::square(1.2, 241).unwrap()).unwrap();
        let s = central_tile_spacing(&grid, Axis::P).unwrap();
        assert!((s / (PI / 20.0) - 1.0).abs() < 0.1, "{s}");
    }

    #[test]
    fn coarse_grid_rejected() {
        let spec = CatStateSpec::new(2, amp(5.0, 0.0)).unwrap();
        let grid = wigner_cat(&spec, GridGeometry::square(1.2, 41).unwrap()).unwrap();
        assert!(matches!(central_tile_spacing(&grid, Axis::P), Err(Error::InsufficientResolution(_))));
    }

    #[test]
    fn invalid_geometry() {
        assert!(GridGeometry::new(0.0, 1.0, 0.0, 1.0, 0, 5).is_err());
        assert!(GridGeometry::new(1.0, 0.0, 0.0, 1.0, 5, 5).is_err());
        assert!(GridGeometry::new(0.0, f64::NAN, 0.0, 1.0, 5, 5).is_err());
    }

    #[test]
    fn exec_modes_identical() {
        let spec = CatStateSpec::new(4, amp(2.0, 0.0)).unwrap();
        let g = GridGeometry::square(5.0, 51).unwrap();
        let a = wigner_cat_with(&spec, g, Exec::Sequential).unwrap();
        let b = wigner_cat_with(&spec, g, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_layout() {
        let spec = CatStateSpec::new(1, amp(0.0, 0.0)).unwrap();
        let grid = wigner_cat(&spec, GridGeometry::new(-1.0, 1.0, 0.0, 1.0, 3, 2).unwrap()).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,p,W");
        assert_eq!(lines.len(), 7);
        assert!(lines[3].starts_with("0,0,"));

        let mut buf = Vec::new();
        grid.write_matrix(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(1).unwrap().split_whitespace().count(), 2);
    }
}
