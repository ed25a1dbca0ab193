use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use subplanck::oracle::{cat_fock, overlap_fock_oracle, wigner_fock, DEFAULT_TAIL_THRESHOLD};
use subplanck::overlap::overlap_exact;
use subplanck::states::CoherentSuperposition;
use subplanck::wigner::wigner_value;
use subplanck::{CatStateSpec, ComplexAmplitude, Convention, Displacement, SumMask};

fn spec(n: usize, am: f64, ap: f64, convention: Convention) -> CatStateSpec {
    CatStateSpec::new(n, ComplexAmplitude::from_polar(am, ap).unwrap())
        .unwrap()
        .with_convention(convention)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prefactor_convention_matches_oracle(n in 1usize..=6, am in 0.0f64..3.0, ap in -PI..PI, dm in 0.0f64..0.8, dp in -PI..PI) {
        let s = spec(n, am, ap, Convention::Prefactor);
        let d = Displacement::new(ComplexAmplitude::from_polar(dm, dp).unwrap());
        let exact = overlap_exact(&s, d, SumMask::All).unwrap().value;
        let oracle = overlap_fock_oracle(&s, d, 128).unwrap();
        prop_assert!((exact - oracle.value).norm() <= 1e-9, "{exact} vs {}", oracle.value);
    }

    #[test]
    fn wigner_matches_oracle(n in 1usize..=4, am in 0.0f64..2.5, ap in -PI..PI, x in -3.0f64..3.0, p in -3.0f64..3.0) {
        let s = spec(n, am, ap, Convention::TrueNormalized);
        // corners reach |α| + |β| ≈ 6.7; the cross-check needs headroom past that
        let psi = cat_fock(&s, 160, DEFAULT_TAIL_THRESHOLD).unwrap();
        let beta = Complex64::new(x, p);
        let oracle = wigner_fock(&psi, beta).unwrap() / psi.norm_sqr();
        prop_assert!((wigner_value(&s, beta) - oracle).abs() <= 1e-8);
    }

    #[test]
    fn two_sided_overlap_matches_oracle(n in 1usize..=4, am in 0.0f64..2.5, ap in -PI..PI,
                                        d1 in 0.0f64..0.5, p1 in -PI..PI, d2 in 0.0f64..0.5, p2 in -PI..PI) {
        let s = spec(n, am, ap, Convention::Prefactor);
        let (a, b) = (Complex64::from_polar(d1, p1), Complex64::from_polar(d2, p2));
        let cat = CoherentSuperposition::from_spec(&s);
        let two_sided = cat.displaced(b).inner(&cat.displaced(a));
        // D(b)† D(a) = e^{−i Im(b a*)} D(a − b)
        let diff = Displacement::from_complex(a - b).unwrap();
        let oracle = overlap_fock_oracle(&s, diff, 128).unwrap().value;
        let phase = Complex64::from_polar(1.0, -(b * a.conj()).im);
        prop_assert!((two_sided - phase * oracle).norm() <= 1e-9, "{two_sided} vs {}", phase * oracle);
    }
}
