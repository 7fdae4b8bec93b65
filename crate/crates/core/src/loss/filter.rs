use super::trajectories::TrajectoryTerm;
use crate::error::Result;
use crate::fock::{maximal_sector_state, project_sector, DensityOperator, SparseKet};

/// Input to the two-sided filter.
#[derive(Debug, Clone, Copy)]
pub enum Ensemble<'a> {
    Trajectories(&'a [TrajectoryTerm]),
    /// A state of unit trace, or a block of one (e.g. a single sector).
    Density(&'a DensityOperator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    pub j: u32,
    pub kept_probability: f64,
    /// Normalized; empty when nothing passes.
    pub kept_state: DensityOperator,
    /// `⟨j|ρ_kept|j⟩`; `None` when nothing passes.
    pub fidelity: Option<f64>,
}

impl FilterResult {
    pub fn infidelity(&self) -> Option<f64> {
        self.fidelity.map(|f| (1.0 - f).max(0.0))
    }
}

/// Keeps the component with `N_A = N_B = j`.
pub fn two_sided_filter(ensemble: Ensemble<'_>, j: u32) -> Result<FilterResult> {
    let (modes, kept) = match ensemble {
        Ensemble::Trajectories(terms) => {
            let Some(first) = terms.first() else {
                return Ok(empty(1, j));
            };
            let modes = first.state.modes();
            let projected: Vec<(f64, SparseKet)> = terms
                .iter()
                .map(|t| (t.weight, project_sector(&t.state, j, j)))
                .filter(|(_, k)| !k.is_zero())
                .collect();
            let rho = DensityOperator::from_mixture(modes, projected.iter().map(|(w, k)| (*w, k)))?;
            (modes, rho)
        }
        Ensemble::Density(rho) => (
            rho.modes(),
            rho.restrict(|k| k.a.total() == j && k.b.total() == j),
        ),
    };
    let kept_probability = kept.trace();
    let Some(state) = kept.normalized() else {
        return Ok(empty(modes, j));
    };
    let target = maximal_sector_state(modes as u32, j);
    let fidelity = state.expectation(&target).clamp(0.0, 1.0);
    Ok(FilterResult {
        j,
        kept_probability,
        kept_state: state,
        fidelity: Some(fidelity),
    })
}

fn empty(modes: usize, j: u32) -> FilterResult {
    FilterResult {
        j,
        kept_probability: 0.0,
        kept_state: DensityOperator::empty(modes),
        fidelity: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_annihilation, apply_number_damping, make_tmss_pairs, Side};
    use crate::loss::{first_order_trajectories, LossParams, FIRST_ORDER_GUARD};

    #[test]
    fn no_jump_branch_is_maximal() {
        let ket = make_tmss_pairs(0.5, 2, 20, 1e-9).unwrap();
        let damped = apply_number_damping(&ket, 0.05, 0.02).normalize();
        let term = TrajectoryTerm {
            jumps: vec![],
            weight: 1.0,
            state: damped,
        };
        let r = two_sided_filter(Ensemble::Trajectories(std::slice::from_ref(&term)), 3).unwrap();
        assert!(r.fidelity.unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn single_jump_is_rejected() {
        let ket = make_tmss_pairs(0.5, 2, 20, 1e-9).unwrap();
        let jumped = apply_annihilation(&ket, Side::B, 1).normalize();
        let term = TrajectoryTerm {
            jumps: vec![],
            weight: 0.1,
            state: jumped,
        };
        for j in 0..6 {
            let r = two_sided_filter(Ensemble::Trajectories(std::slice::from_ref(&term)), j).unwrap();
            assert_eq!(r.kept_probability, 0.0);
            assert!(r.fidelity.is_none());
        }
    }

    #[test]
    fn first_order_kept_probability() {
        let ket = make_tmss_pairs(0.5, 2, 40, 1e-15).unwrap();
        let loss = LossParams::new(0.01, 0.01, 1.0).unwrap();
        let traj = first_order_trajectories(&ket, &loss, FIRST_ORDER_GUARD).unwrap();
        let r = two_sided_filter(Ensemble::Trajectories(&traj), 1).unwrap();
        assert!((r.kept_probability - 0.28125 * (-0.02f64).exp()).abs() < 1e-12);
    }
}
