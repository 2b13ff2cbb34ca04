use qflat_core::quadrature::{dlogq, q_chi, DerivativeOrder, DEFAULT_TOL, MAX_DEGREE};
use qflat_core::spaces::catalog;
use qflat_core::RootData;

fn op2() -> RootData {
    "OP2".parse().unwrap()
}

/// ln q for the Cayley plane at the edge of the parameter box, from
/// 40-digit quadrature of the unreduced integrand.
#[test]
fn cayley_plane_extremes() {
    for (n, tau, ln_ref) in [
        (16u32, 100.0, 46_269.047_723_751_22),
        (10, 400.0, 96_154.915_653_517_94),
        (3, 400.0, 28_954.311_942_186_47),
    ] {
        let q = q_chi(&op2(), n, tau, DEFAULT_TOL).unwrap();
        assert!((q.ln_value() - ln_ref).abs() < 1e-8, "n={n} tau={tau}: {}", q.ln_value());
        assert!(!q.value.is_finite(), "value overflows the double range");
    }
}

#[test]
fn whole_box_corners_converge() {
    for space in catalog() {
        for n in [0, MAX_DEGREE] {
            for tau in [1e-3, 400.0] {
                let d = dlogq(&space, n, tau, DerivativeOrder::Second, 1e-13);
                assert!(d.is_ok(), "{space} n={n} tau={tau}: {d:?}");
            }
        }
    }
}

#[test]
fn large_tau_curvature_tends_to_prefactor() {
    // (log q)″ → −(μ + 1/2)/τ² as τ → ∞ for every isotype.
    let q = dlogq(&op2(), 16, 400.0, DerivativeOrder::Second, DEFAULT_TOL).unwrap();
    let target = -8.0 / (400.0f64 * 400.0);
    assert!((q.value / target - 1.0).abs() < 1e-3, "{}", q.value);
}
