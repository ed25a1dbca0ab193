//! Bessel `J0`, its first zero, and the displacement at which a cat state
//! becomes orthogonal to its displaced copy.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Power series below this argument, Hankel expansion above.
/// Both branches are within 1e-12 of J0 on either side.
pub const SERIES_CUTOFF: f64 = 12.0;

/// Bessel function of the first kind, order zero.
///
/// Rejects NaN and infinities. `J0` is even, so negative arguments are
/// folded.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("bessel_j0 argument"));
    }
    Ok(j0(x))
}

pub(crate) fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_CUTOFF {
        j0_series(x)
    } else {
        j0_hankel(x)
    }
}

/// `Σ (−1)^m (x/2)^{2m} / (m!)²`, stopped once a term drops below 1e-17
/// of the running sum.
fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= -q / (m * m);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) || m > 200.0 {
            return sum;
        }
    }
}

/// Hankel asymptotic expansion, truncated at the smallest term.
fn j0_hankel(x: f64) -> f64 {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..100 {
        let odd = (2 * k - 1) as f64;
        a *= -(odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() >= last || a.abs() < 1e-18 {
            break;
        }
        last = a.abs();
        // a_k alternates into Q (odd k) and P (even k) with signs (−1)^⌊k/2⌋
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * a;
        } else {
            p += sign * a;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// An interval known to contain exactly one sign change of `J0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootBracket {
    lo: f64,
    hi: f64,
    tol: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && tol.is_finite()) || lo >= hi || tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("bracket [{lo}, {hi}] tol {tol}")));
        }
        if j0(lo).signum() == j0(hi).signum() {
            return Err(Error::BadBracket { lo, hi });
        }
        Ok(RootBracket { lo, hi, tol })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Bisection down to `tol`, finished with one secant step on the final
    /// bracket.
    pub fn solve(&self) -> f64 {
        let (mut lo, mut hi) = (self.lo, self.hi);
        let (mut flo, mut fhi) = (j0(lo), j0(hi));
        while hi - lo > self.tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = j0(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        if secant.is_finite() && secant >= lo && secant <= hi {
            secant
        } else {
            0.5 * (lo + hi)
        }
    }
}

/// First positive zero of `J0`, `C ≈ 2.404825557695773`.
pub fn j0_first_root() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        RootBracket::new(2.0, 3.0, 1e-14)
            .expect("J0 changes sign on [2, 3]")
            .solve()
    })
}

/// Smallest `|δ|` making the cat orthogonal to its displaced copy in the
/// large-`n` limit: `C / (2|α|)`.
pub fn sensitivity_delta(alpha_mag: f64) -> Result<f64> {
    if !alpha_mag.is_finite() || alpha_mag <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "alpha magnitude must be positive, got {alpha_mag}"
        )));
    }
    Ok(j0_first_root() / (2.0 * alpha_mag))
}
