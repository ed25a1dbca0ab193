use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::io::Write as _;

use subplanck::analysis::{
    convergence_curve, evaluate_tier, first_zero, format_value, linspace, offdiag_curve, overlap_sweep, threshold_crossing,
    vcz_correspondence_report, CurveSeries, SweepOptions,
};
use subplanck::oracle::overlap_fock_oracle;
use subplanck::overlap::overlap_exact;
use subplanck::specfun::{j0_first_root, sensitivity_delta};
use subplanck::wigner::{central_tile_spacing, quadrature_norm, wigner_cat, GridGeometry, SUPPORT_MARGIN};
use subplanck::{CatStateSpec, ComplexAmplitude, Displacement, Envelope, SumMask, Tier};

use crate::args::{
    DeltaGridArgs, Fig1Args, Fig3Args, Format, OutputArgs, OverlapArgs, SensitivityArgs, TierArg, VczArgs, WignerArgs,
};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn emit(output: &OutputArgs, bytes: &[u8]) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|_| stdout.flush()) {
                // the reader went away, e.g. `| head`
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
            }
        }
    }
}

fn csv_only(output: &OutputArgs) -> Result<()> {
    match output.format {
        Format::Csv => Ok(()),
        Format::Matrix => Err(usage("--format matrix is only available for wigner")),
    }
}

fn delta_grid(g: &DeltaGridArgs) -> Result<Vec<f64>> {
    if !(g.delta_min.is_finite() && g.delta_max.is_finite()) || g.delta_min < 0.0 || g.delta_min >= g.delta_max {
        return Err(usage(format!(
            "need 0 <= --delta-min < --delta-max, got {} and {}",
            g.delta_min, g.delta_max
        )));
    }
    if g.delta_steps < 2 {
        return Err(usage("--delta-steps must be at least 2"));
    }
    Ok(linspace(g.delta_min, g.delta_max, g.delta_steps))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be positive, got {v}")))
    }
}

/// Shared-axis CSV: `# key=value …`, a header row, then one row per `x`.
fn wide_csv(meta: &[(&str, String)], x_name: &str, x: &[f64], columns: &[(String, Vec<f64>)]) -> String {
    let mut s = String::from("#");
    for (k, v) in meta {
        let _ = write!(s, " {k}={v}");
    }
    s.push('\n');
    s.push_str(x_name);
    for (name, _) in columns {
        let _ = write!(s, ",{name}");
    }
    s.push('\n');
    for (i, xi) in x.iter().enumerate() {
        s.push_str(&format_value(*xi));
        for (_, ys) in columns {
            let _ = write!(s, ",{}", format_value(ys[i]));
        }
        s.push('\n');
    }
    s
}

fn curve_csv(c: &CurveSeries) -> Vec<u8> {
    let mut buf = Vec::new();
    c.write_csv(&mut buf).expect("writing to memory");
    buf
}

pub fn overlap(a: &OverlapArgs) -> Result<()> {
    csv_only(&a.output)?;
    let tier = Tier::from(a.tier);
    let exact = matches!(a.tier, TierArg::Exact | TierArg::Polar);
    if a.state.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if a.mask != SumMask::All && !exact {
        return Err(usage("--mask applies only to the exact and polar tiers"));
    }
    if a.envelope.is_some() && a.tier != TierArg::Diagonal {
        return Err(usage("--envelope applies only to the diagonal tier"));
    }
    if a.oracle.is_some() && (!exact || a.mask != SumMask::All) {
        return Err(usage("--oracle needs an exact tier with the full mask"));
    }
    let grid = delta_grid(&a.grid)?;
    let alpha = ComplexAmplitude::from_polar(a.state.alpha_mag, a.state.alpha_phase)?;
    let spec = CatStateSpec::new(a.state.n, alpha)?.with_convention(a.state.convention.into());
    let opts = SweepOptions {
        relative_angle: a.delta_phase.map_or(FRAC_PI_2, |p| p - a.state.alpha_phase),
        part: a.part.into(),
        mask: a.mask,
        envelope: a.envelope.map_or(Envelope::Dropped, Envelope::from),
        ..SweepOptions::default()
    };
    let curve = overlap_sweep(&spec, tier, &grid, &opts)?;

    match first_zero(&curve) {
        Some(z) => eprintln!("first zero: {z}"),
        None => eprintln!("first zero: none on [{}, {}]", a.grid.delta_min, a.grid.delta_max),
    }
    if alpha.abs() > 0.0 {
        let ds = sensitivity_delta(alpha.abs())?;
        let d = Displacement::relative_to(alpha, ds, opts.relative_angle)?;
        let v = opts.part.apply(&evaluate_tier(&spec, tier, d, &opts)?);
        eprintln!("value at C/(2|alpha|) = {ds}: {v}");
    }
    if let Some(n_max) = a.oracle {
        let mut worst = 0.0f64;
        for &m in &grid {
            let d = Displacement::relative_to(alpha, m, opts.relative_angle)?;
            let reference = overlap_fock_oracle(&spec, d, n_max)?;
            worst = worst.max((overlap_exact(&spec, d, SumMask::All)?.value - reference.value).norm());
        }
        eprintln!("oracle (N_max = {n_max}): max |exact - oracle| = {worst:e}");
    }
    emit(&a.output, &curve_csv(&curve))
}

pub fn fig1(a: &Fig1Args) -> Result<()> {
    csv_only(&a.output)?;
    if a.alphas.is_empty() {
        return Err(usage("--alphas needs at least one value"));
    }
    for &alpha in &a.alphas {
        positive("each --alphas value", alpha)?;
    }
    positive("--delta", a.delta)?;
    positive("--threshold", a.threshold)?;
    let largest = a.alphas.iter().copied().fold(0.0, f64::max);
    let n_max = a.n_max.unwrap_or((4.0 * largest).ceil() as usize);
    if n_max < 1 {
        return Err(usage("--n-max must be at least 1"));
    }
    let ns: Vec<usize> = (1..=n_max).collect();
    let mut columns = Vec::new();
    for &alpha in &a.alphas {
        let c = offdiag_curve(alpha, a.delta, &ns, a.delta_angle)?;
        let flat = c.points().iter().filter(|(n, _)| *n <= alpha).map(|p| p.1).fold(0.0, f64::max);
        match threshold_crossing(&c, a.threshold) {
            Some(n_star) => eprintln!(
                "alpha {alpha}: max for n <= alpha {flat:e}, n* = {n_star}, n*/alpha = {}",
                n_star / alpha
            ),
            None => eprintln!("alpha {alpha}: max for n <= alpha {flat:e}, no crossing of {} up to n = {n_max}", a.threshold),
        }
        columns.push((format!("alpha{alpha}"), c.ys().collect()));
    }
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let meta = [
        ("label", "offdiag".to_string()),
        ("delta", a.delta.to_string()),
        ("delta_angle", a.delta_angle.to_string()),
        ("tier", "exact".into()),
        ("mask", "OffDiagonalOnly".into()),
    ];
    emit(&a.output, wide_csv(&meta, "n", &x, &columns).as_bytes())
}

pub fn fig3(a: &Fig3Args) -> Result<()> {
    csv_only(&a.output)?;
    if a.ns.is_empty() || a.ns.contains(&0) {
        return Err(usage("--n needs one or more values of at least 1"));
    }
    positive("--alpha-mag", a.alpha_mag)?;
    let grid = delta_grid(&a.grid)?;
    let mut columns = Vec::new();
    let mut reference = None;
    for &n in &a.ns {
        let c = convergence_curve(a.alpha_mag, n, &grid, a.part.into())?;
        let zero = first_zero(&c.overlap).map_or("none".to_string(), |z| z.to_string());
        eprintln!(
            "n {n}: sup |OF - J0| = {}, rms = {}, first zero {zero}",
            c.sup_deviation(),
            c.l2_deviation()
        );
        columns.push((format!("n{n}"), c.overlap.ys().collect()));
        reference = Some(c.reference);
    }
    if let Some(r) = reference {
        columns.push(("j0".to_string(), r.ys().collect()));
    }
    eprintln!("C/(2|alpha|) = {}", sensitivity_delta(a.alpha_mag)?);
    let meta = [
        ("label", "convergence".to_string()),
        ("alpha", a.alpha_mag.to_string()),
        ("delta_angle", FRAC_PI_2.to_string()),
        ("tier", "exact".into()),
        ("part", subplanck::analysis::Part::from(a.part).name().into()),
    ];
    emit(&a.output, wide_csv(&meta, "delta", &grid, &columns).as_bytes())
}

pub fn wigner(a: &WignerArgs) -> Result<()> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let alpha = ComplexAmplitude::from_polar(a.alpha_mag, a.alpha_phase)?;
    let reach = alpha.abs() + SUPPORT_MARGIN;
    let geometry = GridGeometry::new(
        a.x_min.unwrap_or(-reach),
        a.x_max.unwrap_or(reach),
        a.p_min.unwrap_or(-reach),
        a.p_max.unwrap_or(reach),
        a.nx,
        a.np,
    )?;
    let spec = CatStateSpec::new(a.n, alpha)?.with_convention(a.convention.into());
    let grid = wigner_cat(&spec, geometry)?;

    eprintln!(
        "quadrature norm: {} (expected {})",
        format_value(quadrature_norm(&grid)),
        format_value(grid.expected_norm())
    );
    if !grid.covers_support() {
        eprintln!("warning: grid does not cover ±(|alpha| + {SUPPORT_MARGIN}); the norm will fall short");
    }
    match central_tile_spacing(&grid, a.axis.into()) {
        Ok(s) => eprintln!("central tile spacing along {:?}: {s}", a.axis),
        Err(e) => eprintln!("central tile spacing along {:?}: unavailable ({e})", a.axis),
    }

    let mut buf = Vec::new();
    match a.output.format {
        Format::Csv => grid.write_csv(&mut buf),
        Format::Matrix => grid.write_matrix(&mut buf),
    }
    .expect("writing to memory");
    emit(&a.output, &buf)
}

pub fn sensitivity(a: &SensitivityArgs) -> Result<()> {
    csv_only(&a.output)?;
    let delta = sensitivity_delta(a.alpha_mag)?;
    let report = format!("quantity,value\nC,{}\nalpha,{}\ndelta,{delta}\n", j0_first_root(), a.alpha_mag);
    emit(&a.output, report.as_bytes())
}

pub fn vcz(a: &VczArgs) -> Result<()> {
    csv_only(&a.output)?;
    positive("--sep-max", a.sep_max)?;
    if a.sep_steps < 2 {
        return Err(usage("--sep-steps must be at least 2"));
    }
    let seps = linspace(0.0, a.sep_max, a.sep_steps);
    let (quantum, optics) = vcz_correspondence_report(a.alpha_mag, a.lambda, &seps)?;
    let worst = quantum.ys().zip(optics.ys()).map(|(q, o)| (q - o).abs()).fold(0.0, f64::max);
    eprintln!("max |overlap - coherence| = {worst:e}");
    for c in [&quantum, &optics] {
        match first_zero(c) {
            Some(z) => eprintln!("{}: first zero at separation {z}", c.label()),
            None => eprintln!("{}: no zero up to {}", c.label(), a.sep_max),
        }
    }
    let meta = [
        ("label", "ring_correspondence".to_string()),
        ("alpha", a.alpha_mag.to_string()),
        ("lambda", a.lambda.to_string()),
        ("R", "1".into()),
    ];
    let columns = vec![
        (quantum.label().to_string(), quantum.ys().collect()),
        (optics.label().to_string(), optics.ys().collect()),
    ];
    emit(&a.output, wide_csv(&meta, "separation", &seps, &columns).as_bytes())
}
