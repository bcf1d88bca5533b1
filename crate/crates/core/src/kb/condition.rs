use super::{Atom, ConditionExpr, Resource};
use crate::scenario::{Cell, Side};
use crate::world::WorldState;

/// Evaluates a template's applicability condition for an actor of `side`
/// (`actor` lists the units behind the actor id) anchored at `anchor`.
///
/// `exists_unit` counts only units with strength left; `actor_has_supply`
/// holds if any of the actor's units has the stock.
pub fn eval_condition(
    c: &ConditionExpr,
    w: &WorldState<'_>,
    anchor: Cell,
    side: Side,
    actor: &[String],
) -> bool {
    c.atoms.iter().all(|atom| match atom {
        Atom::ExistsUnit {
            side: rel,
            kind,
            within_km,
        } => {
            let wanted = rel.resolve(side);
            w.units.iter().any(|u| {
                u.side == wanted
                    && u.kind == *kind
                    && u.strength > 0.0
                    && w.distance_km(u.position, anchor) <= *within_km
            })
        }
        Atom::ActorHasSupply { resource, min } => {
            actor
                .iter()
                .filter_map(|id| w.unit(id))
                .any(|u| match resource {
                    Resource::Fuel => u.fuel_l >= *min,
                    Resource::Ammo => u.ammo_u >= *min,
                })
        }
        Atom::TerrainAt { kind } => w.terrain.cell(anchor).is_some_and(|t| t.kind == *kind),
    })
}
