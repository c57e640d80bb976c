mod common;

use approx::assert_relative_eq;
use common::*;
use kobageo::metric::{estimate_m_shell, metric_bounds, BoundMethod, ShellBudget};

#[test]
fn disk_metric_closed_forms() {
    let d = disk();
    let b = metric_bounds(&d, &real(&[0.0]), &dir(&[1.0])).unwrap();
    assert_eq!((b.lower, b.upper), (1.0, 1.0));
    let b = metric_bounds(&d, &real(&[0.5]), &dir(&[1.0])).unwrap();
    assert_relative_eq!(b.upper, 4.0 / 3.0, epsilon = 1e-15);
    assert_eq!(b.lower_method, BoundMethod::ExactModel);
}

#[test]
fn bidisk_metric_is_max_over_factors() {
    let b = metric_bounds(&bidisk(), &real(&[0.5, 0.0]), &dir(&[1.0, 1.0])).unwrap();
    assert_relative_eq!(b.upper, 4.0 / 3.0, epsilon = 1e-15);
}

#[test]
fn custom_disk_brackets_exact_value() {
    let b = metric_bounds(&custom_disk(), &real(&[0.0]), &dir(&[1.0])).unwrap();
    assert!(b.lower >= 0.5);
    assert_relative_eq!(b.upper, 1.0, epsilon = 1e-9);
    assert!(b.lower <= 1.0 && 1.0 <= b.upper + 1e-9);
}

#[test]
fn custom_disk_off_center_brackets_poincare() {
    let d = custom_disk();
    for x in [0.3, 0.6, 0.9] {
        let b = metric_bounds(&d, &real(&[x]), &dir(&[1.0])).unwrap();
        let exact = 1.0 / (1.0 - x * x);
        assert!(b.lower <= exact * (1.0 + 1e-9) && exact <= b.upper * (1.0 + 1e-9), "{x}: {b:?}");
    }
}

#[test]
fn example52_upper_bound_deep_in_the_flat_region() {
    let d = ex52();
    let r = (-16.0f64).exp();
    let b = metric_bounds(&d, &pt(&[c(0.0, 0.0), c(0.0, r)]), &dir(&[1.0, 0.0])).unwrap();
    let rho = (1.0 / 16.0 - r * r).sqrt();
    assert!(b.upper <= 1.0 / rho * (1.0 + 1e-6));
    assert!(b.lower <= b.upper);
}

#[test]
fn ball_of_radius_two_at_center() {
    let d = kobageo::Domain::from_json(r#"{"kind":"ball","params":{"d":2,"radius":2.0}}"#).unwrap();
    let b = metric_bounds(&d, &real(&[0.0, 0.0]), &dir(&[1.0, 0.0])).unwrap();
    assert_relative_eq!(b.lower, 0.5, epsilon = 1e-12);
    assert_relative_eq!(b.upper, 0.5, epsilon = 1e-12);
}

#[test]
fn disk_shell_supremum() {
    // 1/kappa = 1 - |z|^2 = 2r - r^2 at delta = r
    let s = estimate_m_shell(&disk(), 0.1, None, &ShellBudget::default()).unwrap();
    assert!(s.m_lower >= 0.19 * (1.0 - 0.01), "{}", s.m_lower);
    assert!(s.m_upper <= 0.19 * (1.0 + 1e-9));
}

#[test]
fn example51_shell_lower_variant() {
    let d = ex51();
    let r = (-16.0f64).exp();
    let s = estimate_m_shell(&d, r, None, &ShellBudget::default()).unwrap();
    assert!(s.m_lower >= 0.25 * 0.9, "{}", s.m_lower);
    assert!(s.m_lower <= s.m_upper);
}

#[test]
fn ball_shell_upper_is_bounded() {
    let s = estimate_m_shell(&ball2(), 0.5, None, &ShellBudget::default()).unwrap();
    assert!(s.m_upper <= 1.0 + 1e-9);
    let (z, v) = s.witness.clone().unwrap();
    let m = ball2().model().unwrap().metric(z.coords(), v.coords()).unwrap();
    assert_relative_eq!(1.0 / m, s.m_lower, max_relative = 1e-12);
}

#[test]
fn shell_is_reproducible() {
    let b = ShellBudget { seed: 9, ..ShellBudget::default() };
    let a = estimate_m_shell(&ex52(), 1e-3, None, &b).unwrap();
    let c = estimate_m_shell(&ex52(), 1e-3, None, &b).unwrap();
    assert_eq!(a, c);
}
