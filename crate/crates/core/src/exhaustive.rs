//! Brute force over every open-loop Skeptic policy on a finite stake grid.
//!
//! Reality is deterministic, so every adaptive Skeptic policy over the grid
//! produces the same path as some fixed stake sequence; enumerating sequences
//! covers all policies.

use num_rational::BigRational;

use crate::error::Error;
use crate::protocol::{apply_round, ForecastMove, GameState, ProtocolVariant, SkepticMove, VarianceSource};
use crate::reality::{decide, SignPolicy, TieState};
use crate::scalar::{rat, NumericMode, Scalar};

/// Violations kept verbatim in a report.
const MAX_RECORDED_VIOLATIONS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSearchReport {
    pub horizon: u32,
    pub policies: u64,
    /// Policies under which Reality triggered at least once.
    pub triggered: u64,
    /// Policies with no trigger and `K_N < 1`.
    pub declined: u64,
    /// Stake sequences with no trigger and `K_N >= 1`.
    pub violations: Vec<Vec<BigRational>>,
    pub violation_count: u64,
}

impl GridSearchReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0 && self.triggered + self.declined == self.policies
    }
}

/// `{0, 1/4, 1/2, ..., 2}`.
pub fn quarter_grid() -> Vec<BigRational> {
    (0..=8).map(|i| rat(i, 4)).collect()
}

struct Search {
    horizon: u32,
    grid: Vec<Scalar>,
    variances: Vec<Scalar>,
    policy: SignPolicy,
    report: GridSearchReport,
    path: Vec<usize>,
}

impl Search {
    fn visit(&mut self, state: &GameState, tie: TieState, triggered: bool) -> Result<(), Error> {
        let depth = self.path.len();
        if depth as u32 == self.horizon {
            self.report.policies += 1;
            if triggered {
                self.report.triggered += 1;
            } else if state.capital < state.mode().one() {
                self.report.declined += 1;
            } else {
                self.report.violation_count += 1;
                if self.report.violations.len() < MAX_RECORDED_VIOLATIONS {
                    let stakes = self.path.iter().map(|&i| self.grid[i].as_rational().cloned().unwrap_or_default());
                    self.report.violations.push(stakes.collect());
                }
            }
            return Ok(());
        }
        let variance = self.variances[depth].clone();
        for (i, stake) in self.grid.clone().iter().enumerate() {
            let smove = SkepticMove::new(NumericMode::Exact.zero(), stake.clone());
            let mut tie = tie;
            let decision = decide(
                &state.capital,
                state.round,
                &variance,
                &smove,
                state.variant,
                self.policy,
                &mut tie,
            );
            let (next, _) = apply_round(
                state,
                &ForecastMove {
                    variance: variance.clone(),
                },
                &smove,
                &decision.reality_move,
            )?;
            self.path.push(i);
            self.visit(&next, tie, triggered || decision.triggered)?;
            self.path.pop();
        }
        Ok(())
    }
}

/// Plays every sequence of quadratic stakes from `grid` (with `M = 0`) for
/// `horizon` rounds in exact mode and classifies each outcome.
pub fn search_quadratic_grid<F: VarianceSource + ?Sized>(
    forecaster: &F,
    horizon: u32,
    grid: &[BigRational],
    policy: SignPolicy,
) -> Result<GridSearchReport, Error> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon);
    }
    let variances = (1..=u64::from(horizon))
        .map(|n| forecaster.variance(n, NumericMode::Exact))
        .collect::<Result<Vec<_>, _>>()?;
    let mut search = Search {
        horizon,
        grid: grid.iter().map(|r| Scalar::Exact(r.clone())).collect(),
        variances,
        policy,
        report: GridSearchReport {
            horizon,
            policies: 0,
            triggered: 0,
            declined: 0,
            violations: Vec::new(),
            violation_count: 0,
        },
        path: Vec::with_capacity(horizon as usize),
    };
    let root = GameState::new(ProtocolVariant::Standard, NumericMode::Exact);
    search.visit(&root, TieState::default(), false)?;
    Ok(search.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecaster::Forecaster;

    #[test]
    fn tiny_grid_counts() {
        // v = 1, one round, stakes {0, 1}: V = 0 triggers, V = 1 gives f(1) = 0 and triggers too.
        let f = Forecaster::from_values(vec![rat(1, 1)]).unwrap();
        let report = search_quadratic_grid(&f, 1, &[rat(0, 1), rat(1, 1)], SignPolicy::PreferPositive).unwrap();
        assert_eq!((report.policies, report.triggered, report.declined), (2, 2, 0));

        // v = 1/2: V = 1 makes f(1) = 1/2 > 0, Reality stays at 0 and capital drops to 1/2.
        let f = Forecaster::from_values(vec![rat(1, 2)]).unwrap();
        let report = search_quadratic_grid(&f, 1, &[rat(0, 1), rat(1, 1)], SignPolicy::PreferPositive).unwrap();
        assert_eq!((report.policies, report.triggered, report.declined), (2, 1, 1));
        assert!(report.holds());
    }

    #[test]
    fn zero_variance_exposes_the_weak_inequality() {
        // With v_n = 0 a positive stake costs nothing at x = 0, so capital stays at 1.
        let f = Forecaster::from_values(vec![rat(0, 1), rat(0, 1)]).unwrap();
        let report = search_quadratic_grid(&f, 2, &[rat(1, 1)], SignPolicy::PreferPositive).unwrap();
        assert_eq!(report.violation_count, 1);
        assert_eq!(report.violations, vec![vec![rat(1, 1), rat(1, 1)]]);
        assert!(!report.holds());
    }
}
