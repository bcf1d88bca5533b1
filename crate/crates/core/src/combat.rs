//! Engagement attrition (Lanchester square law) and supply consumption.
//!
//! `dB/dt = -r·R`, `dR/dt = -b·B`, integrated with classical RK4 at a fixed
//! 0.1 minute step. The square law conserves `r·R² - b·B²`.

use serde::{Deserialize, Serialize};

use crate::kb::RateTable;
use crate::plan::ActionNode;

/// Integration step, minutes.
pub const STEP_MIN: f64 = 0.1;
const STEPS_PER_MIN: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngagementSpec {
    pub blue_strength: f64,
    pub red_strength: f64,
    /// Blue's kill rate against red, per minute.
    pub blue_kill_rate: f64,
    /// Red's kill rate against blue, per minute.
    pub red_kill_rate: f64,
    pub duration_min: u32,
}

/// Outcome of one engagement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Attrition {
    pub blue_loss: f64,
    pub red_loss: f64,
    /// A side reached zero before the end of the engagement.
    pub terminated_early: bool,
    /// Minutes the engagement was live.
    pub live_min: f64,
}

/// Ledger entry for an engagement fought by a plan node. The node's actor is
/// blue, the engaged unit red.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttritionResult {
    pub node: u32,
    pub actor: String,
    pub target: String,
    pub blue_loss: f64,
    pub red_loss: f64,
    pub terminated_early: bool,
    pub live_min: f64,
}

/// Supplies drawn by one node from one unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupplyDelta {
    pub node: u32,
    pub unit: String,
    pub fuel_l: f64,
    pub ammo_u: f64,
    /// Demand the unit's remaining stock could not cover.
    #[serde(default)]
    pub shortfall_fuel_l: f64,
    #[serde(default)]
    pub shortfall_ammo_u: f64,
}

fn derivative(e: &EngagementSpec, b: f64, r: f64) -> (f64, f64) {
    (-e.red_kill_rate * r, -e.blue_kill_rate * b)
}

fn rk4_step(e: &EngagementSpec, b: f64, r: f64, h: f64) -> (f64, f64) {
    let (k1b, k1r) = derivative(e, b, r);
    let (k2b, k2r) = derivative(e, b + 0.5 * h * k1b, r + 0.5 * h * k1r);
    let (k3b, k3r) = derivative(e, b + 0.5 * h * k2b, r + 0.5 * h * k2r);
    let (k4b, k4r) = derivative(e, b + h * k3b, r + h * k3r);
    (
        b + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
        r + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
    )
}

/// First zero crossing inside a step from `(b, r)`, located by bisecting the
/// RK4 sub-step length. Returns the elapsed minutes and the state there.
fn crossing(e: &EngagementSpec, b: f64, r: f64) -> (f64, f64, f64) {
    let (mut lo, mut hi) = (0.0, STEP_MIN);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let (mb, mr) = rk4_step(e, b, r, mid);
        if mb <= 0.0 || mr <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (hb, hr) = rk4_step(e, b, r, hi);
    (hi, hb, hr)
}

/// Integrates an engagement, reporting `(t, B, R)` at t = 0 and after every
/// unclamped step.
pub fn integrate(e: &EngagementSpec, mut observe: impl FnMut(f64, f64, f64)) -> Attrition {
    let (b0, r0) = (e.blue_strength, e.red_strength);
    if b0 <= 0.0 || r0 <= 0.0 {
        return Attrition {
            blue_loss: 0.0,
            red_loss: 0.0,
            terminated_early: true,
            live_min: 0.0,
        };
    }
    let (mut b, mut r) = (b0, r0);
    observe(0.0, b, r);
    let steps = e.duration_min as u64 * STEPS_PER_MIN;
    for i in 0..steps {
        let t = i as f64 * STEP_MIN;
        let (nb, nr) = rk4_step(e, b, r, STEP_MIN);
        if nb <= 0.0 || nr <= 0.0 {
            let (f, cb, cr) = crossing(e, b, r);
            let (cb, cr) = if cb <= 0.0 {
                (0.0, cr.clamp(0.0, r))
            } else {
                (cb.clamp(0.0, b), 0.0)
            };
            return Attrition {
                blue_loss: b0 - cb,
                red_loss: r0 - cr,
                terminated_early: true,
                live_min: t + f,
            };
        }
        b = nb;
        r = nr;
        observe(t + STEP_MIN, b, r);
    }
    Attrition {
        blue_loss: b0 - b,
        red_loss: r0 - r,
        terminated_early: false,
        live_min: e.duration_min as f64,
    }
}

pub fn resolve_engagement(e: &EngagementSpec) -> Attrition {
    integrate(e, |_, _, _| {})
}

/// Consumption of one node. `engaged_min` is `Some` for engaging primitives:
/// ammunition then accrues only while the engagement is live (0 when nothing
/// was engaged). Fuel accrues over the whole window.
pub fn consume_supplies(
    n: &ActionNode,
    unit: &str,
    rates: &RateTable,
    engaged_min: Option<f64>,
) -> SupplyDelta {
    let duration = n.window.map_or(0, |w| w.duration()) as f64;
    let ammo_min = engaged_min.map_or(duration, |live| live.min(duration));
    SupplyDelta {
        node: n.id,
        unit: unit.to_string(),
        fuel_l: rates.fuel_l_per_min * duration,
        ammo_u: rates.ammo_u_per_min * ammo_min,
        shortfall_fuel_l: 0.0,
        shortfall_ammo_u: 0.0,
    }
}
