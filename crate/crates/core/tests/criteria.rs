mod common;

use common::*;
use kobageo::criteria::{
    evl_check, example_claims_check, flat_radius, goldilocks_check, ConditionVerdict, EvlOptions,
    ExampleClaimsOptions, ExampleParams, GoldilocksOptions, GrowthForm, IntegralVerdict,
};
use kobageo::domain::Example52Params;
use kobageo::metric::{Ball, ShellBudget};
use kobageo::Error;

#[test]
fn disk_is_goldilocks() {
    let rep = goldilocks_check(
        &disk(),
        &GoldilocksOptions {
            eps0: Some(0.1),
            ..GoldilocksOptions::default()
        },
    )
    .unwrap();
    assert_eq!(rep.verdict_cond1, IntegralVerdict::Convergent, "{:?}", rep.decade_increments);
    for s in &rep.shells {
        let exact = 2.0 * s.r - s.r * s.r;
        assert!(s.m_lower <= s.m_upper && s.m_upper <= exact * (1.0 + 1e-9));
        assert!(s.m_lower >= exact * (1.0 - 1e-3), "r = {}: {}", s.r, s.m_lower);
    }
    let fit = rep.log_bound_fit.unwrap();
    assert!((fit.slope - 0.5).abs() < 0.05, "{fit:?}");
    assert_eq!(rep.verdict_cond2, ConditionVerdict::Holds);
}

#[test]
fn example52_shells_track_the_flat_radius() {
    let d = ex52();
    let rep = goldilocks_check(
        &d,
        &GoldilocksOptions {
            eps0: Some(1e-3),
            r_min: 1e-9,
            per_decade: 2,
            ..GoldilocksOptions::default()
        },
    )
    .unwrap();
    assert_eq!(rep.verdict_cond1, IntegralVerdict::Divergent, "{:?}", rep.decade_increments);
    // the domain lies in a ball of radius eps + delta/2, so the bound is only attainable far down
    for s in rep.shells.iter().filter(|s| s.r < 1e-5) {
        assert!(s.m_lower >= 0.98 * flat_radius(s.r), "r = {}: {} < {}", s.r, s.m_lower, flat_radius(s.r));
    }
}

#[test]
fn grid_outside_eps0_is_rejected() {
    let e = goldilocks_check(
        &disk(),
        &GoldilocksOptions {
            eps0: Some(0.1),
            r_grid: Some(vec![0.2, 0.1]),
            ..GoldilocksOptions::default()
        },
    )
    .unwrap_err();
    assert!(matches!(e, Error::Input(_)));
}

fn evl_opts(center: kobageo::Point, r0: f64) -> EvlOptions {
    EvlOptions {
        localizer: Ball { center, radius: 0.5 },
        form: GrowthForm::Log { alpha: 0.5 },
        a: None,
        r0,
        r_min: 1e-5,
        per_decade: 4,
        shell: ShellBudget::default(),
    }
}

#[test]
fn ball_satisfies_the_visibility_lemma() {
    let rep = evl_check(&ball2(), &evl_opts(real(&[1.0, 0.0]), 0.05)).unwrap();
    assert_eq!(rep.cond1, ConditionVerdict::Holds);
    assert_eq!(rep.cond2, ConditionVerdict::Holds);
    assert_eq!(rep.cond3, ConditionVerdict::Holds, "{:?}", rep.cond3_increments);
    // complex tangential directions give M(r) ~ sqrt(r)
    let fit = rep.m_power_fit.unwrap();
    assert!((fit.slope - 0.5).abs() < 0.05, "{fit:?}");
}

#[test]
fn custom_disk_condition_three_partials_converge() {
    let rep = evl_check(&custom_disk(), &evl_opts(real(&[1.0]), 0.05)).unwrap();
    assert_eq!(rep.cond3, ConditionVerdict::Holds, "{:?}", rep.cond3_increments);
    let last = *rep.cond3_partial.last().unwrap();
    assert!((last - (0.05 - 1e-5)).abs() < 0.05 * 0.05, "{last}");
}

#[test]
fn localizer_must_meet_the_boundary() {
    let e = evl_check(&disk(), &evl_opts(real(&[0.0]), 0.05)).unwrap_err();
    assert!(matches!(e, Error::Localizer(_)));
}

#[test]
fn example52_claims_at_small_radii() {
    let which = ExampleParams::Second(Example52Params { eps: 0.3, delta: 0.05 });
    let mut opts = ExampleClaimsOptions::for_example(&which);
    opts.radii = vec![(-16.0f64).exp(), (-25.0f64).exp()];
    opts.goldilocks = GoldilocksOptions {
        eps0: Some(1e-2),
        r_min: 1e-6,
        per_decade: 2,
        ..GoldilocksOptions::default()
    };
    let rep = example_claims_check(&which, &opts).unwrap();
    assert!(rep.all_passed, "{}", rep.to_csv());
}

#[test]
fn example52_claim_at_e_minus_four_names_the_failing_items() {
    let which = ExampleParams::Second(Example52Params { eps: 0.3, delta: 0.05 });
    let mut opts = ExampleClaimsOptions::for_example(&which);
    opts.radii = vec![(-4.0f64).exp()];
    opts.convexity_samples = 1000;
    opts.goldilocks = GoldilocksOptions {
        eps0: Some(1e-2),
        r_min: 1e-5,
        per_decade: 2,
        ..GoldilocksOptions::default()
    };
    let rep = example_claims_check(&which, &opts).unwrap();
    assert!(!rep.all_passed);
    assert!(!rep.items.iter().find(|i| i.name.starts_with("line_radius")).unwrap().passed);
}
