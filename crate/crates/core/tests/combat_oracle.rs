mod oracles;

use coaplan_core::combat::{integrate, resolve_engagement, EngagementSpec};
use oracles::{random_engagement, reference_losses};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Largest relative drift of `r·R² - b·B²` along an integration.
pub fn conservation_drift(e: &EngagementSpec) -> f64 {
    let c = |b: f64, r: f64| e.red_kill_rate * r * r - e.blue_kill_rate * b * b;
    let scale = (e.red_kill_rate * e.red_strength.powi(2))
        .max(e.blue_kill_rate * e.blue_strength.powi(2))
        .max(f64::MIN_POSITIVE);
    let c0 = c(e.blue_strength, e.red_strength);
    let mut worst = 0.0f64;
    integrate(e, |_, b, r| worst = worst.max((c(b, r) - c0).abs() / scale));
    worst
}

#[test]
fn equal_forces_equal_rates_lose_equally() {
    let e = EngagementSpec {
        blue_strength: 100.0,
        red_strength: 100.0,
        blue_kill_rate: 0.01,
        red_kill_rate: 0.01,
        duration_min: 30,
    };
    let a = resolve_engagement(&e);
    assert!((a.blue_loss - a.red_loss).abs() < 1e-9);
    // B(t) = 100·e^{-0.01t}
    assert!((a.blue_loss - 100.0 * (1.0 - (-0.3f64).exp())).abs() < 1e-9);
}

#[test]
fn overwhelmed_side_is_annihilated_early() {
    let e = EngagementSpec {
        blue_strength: 10.0,
        red_strength: 400.0,
        blue_kill_rate: 0.01,
        red_kill_rate: 0.05,
        duration_min: 60,
    };
    let a = resolve_engagement(&e);
    assert!(a.terminated_early);
    assert_eq!(a.blue_loss, 10.0);
    assert!(a.live_min < 60.0);
    let (rb, rr) = reference_losses(&e);
    assert_eq!(rb, 10.0);
    assert!(rel(a.red_loss, rr) <= 1e-3);
}

#[test]
fn thousand_random_engagements_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let e = random_engagement(&mut rng);
        assert!(conservation_drift(&e) <= 1e-6, "{e:?}");
        let a = resolve_engagement(&e);
        let (rb, rr) = reference_losses(&e);
        assert!(
            rel(a.blue_loss, rb) <= 1e-3,
            "{e:?}: {} vs {rb}",
            a.blue_loss
        );
        assert!(rel(a.red_loss, rr) <= 1e-3, "{e:?}: {} vs {rr}", a.red_loss);
    }
}

proptest! {
    #[test]
    fn losses_are_bounded_and_nonnegative(
        b in 0.0f64..1000.0, r in 0.0f64..1000.0, kb in 0.0f64..0.1, kr in 0.0f64..0.1, d in 0u32..120
    ) {
        let a = resolve_engagement(&EngagementSpec { blue_strength: b, red_strength: r, blue_kill_rate: kb, red_kill_rate: kr, duration_min: d });
        prop_assert!(a.blue_loss >= 0.0 && a.blue_loss <= b);
        prop_assert!(a.red_loss >= 0.0 && a.red_loss <= r);
        prop_assert!(a.live_min <= d as f64);
    }
}
