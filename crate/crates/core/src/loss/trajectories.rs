use serde::Serialize;

use super::params::LossParams;
use crate::error::{Error, Result};
use crate::fock::{apply_annihilation, apply_number_damping, Side, SparseKet};

/// Largest `η τ` accepted by the first-order expansion.
pub const FIRST_ORDER_GUARD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Jump {
    pub side: Side,
    pub mode: usize,
}

/// One branch of the trajectory unravelling.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTerm {
    pub jumps: Vec<Jump>,
    pub weight: f64,
    /// Normalized conditional state.
    pub state: SparseKet,
}

/// No-jump branch plus one single-jump branch per mode and side.
///
/// The jump is applied to the damped state. Branches with vanishing weight
/// (zero rate, or no photon to lose) are omitted, so `τ = 0` gives one term.
pub fn first_order_trajectories(ket0: &SparseKet, loss: &LossParams, guard: f64) -> Result<Vec<TrajectoryTerm>> {
    let n2 = ket0.norm_sqr();
    if ket0.is_zero() || (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(n2));
    }
    for side in [Side::A, Side::B] {
        let value = loss.exposure(side);
        if value > guard {
            return Err(Error::NoiseTooLarge { value, guard });
        }
    }
    let damped = apply_number_damping(ket0, 0.5 * loss.exposure(Side::A), 0.5 * loss.exposure(Side::B));
    let mut terms = vec![TrajectoryTerm {
        jumps: Vec::new(),
        weight: damped.norm_sqr(),
        state: damped.clone().normalize(),
    }];
    for side in [Side::A, Side::B] {
        let rate = loss.exposure(side);
        if rate == 0.0 {
            continue;
        }
        for mode in 0..ket0.modes() {
            let jumped = apply_annihilation(&damped, side, mode);
            let weight = rate * jumped.norm_sqr();
            if weight > 0.0 {
                terms.push(TrajectoryTerm {
                    jumps: vec![Jump { side, mode }],
                    weight,
                    state: jumped.normalize(),
                });
            }
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::make_tmss_pairs;

    #[test]
    fn no_exposure_single_term() {
        let ket = make_tmss_pairs(0.5, 2, 20, 1e-9).unwrap();
        let t = first_order_trajectories(&ket, &LossParams::new(0.1, 0.1, 0.0).unwrap(), FIRST_ORDER_GUARD).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t[0].weight - 1.0).abs() < 1e-15);
        assert!((t[0].state.inner(&ket).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_mode_jump_weight() {
        let ket = make_tmss_pairs(0.5, 1, 40, 1e-15).unwrap();
        let loss = LossParams::new(0.0, 0.1, 1.0).unwrap();
        let t = first_order_trajectories(&ket, &loss, FIRST_ORDER_GUARD).unwrap();
        assert_eq!(t.len(), 2);
        let w = t[1].weight;
        assert!((w / (0.1 / 3.0) - 1.0).abs() < 0.15, "{w}");
    }

    #[test]
    fn guard_trips() {
        let ket = SparseKet::vacuum(1);
        let loss = LossParams::new(0.3, 0.0, 1.0).unwrap();
        assert!(matches!(
            first_order_trajectories(&ket, &loss, FIRST_ORDER_GUARD),
            Err(Error::NoiseTooLarge { .. })
        ));
    }
}
