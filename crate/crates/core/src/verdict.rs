//! Post-run analysis of a game ledger.
//!
//! Every check here is a finite-horizon proxy: the capital ceiling, the jump
//! ratio at triggers, monotone decline after the last trigger, lethality of
//! punishment, and strict decline of a Skeptic who never lets Reality trigger.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::forecaster::KolmogorovLedger;
use crate::protocol::{payoff, reaches_round, RoundRecord};
use crate::scalar::{NumericMode, Scalar};

/// Slack allowed above capital 1 in float mode.
pub const FLOAT_CEILING_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub horizon: u64,
    pub max_capital: Scalar,
    pub final_capital: Scalar,
    pub bankrupt_at: Option<u64>,
    pub trigger_rounds: Vec<u64>,
    pub kolmogorov_sum_at_horizon: Scalar,
    /// Minimum over triggers of `max(|S_{n-1}|, |S_n|) / n`.
    pub min_trigger_jump_ratio: Option<Scalar>,
    /// `S_N / N`.
    pub final_mean_outcome: Scalar,
    pub post_last_trigger_monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyOutcome {
    Pass,
    Fail { round: u64, detail: String },
    NotApplicable,
}

impl PropertyOutcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, PropertyOutcome::Fail { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    #[serde(rename = "CapitalCeiling")]
    pub capital_ceiling: PropertyOutcome,
    #[serde(rename = "TriggerJump")]
    pub trigger_jump: PropertyOutcome,
    #[serde(rename = "PostLastTriggerMonotone")]
    pub post_last_trigger_monotone: PropertyOutcome,
    #[serde(rename = "PunishmentLethal")]
    pub punishment_lethal: PropertyOutcome,
    #[serde(rename = "NoTriggerDecline")]
    pub no_trigger_decline: PropertyOutcome,
}

impl PropertyReport {
    pub fn entries(&self) -> [(&'static str, &PropertyOutcome); 5] {
        [
            ("CapitalCeiling", &self.capital_ceiling),
            ("TriggerJump", &self.trigger_jump),
            ("PostLastTriggerMonotone", &self.post_last_trigger_monotone),
            ("PunishmentLethal", &self.punishment_lethal),
            ("NoTriggerDecline", &self.no_trigger_decline),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.entries().iter().all(|(_, o)| !o.is_fail())
    }
}

fn malformed(round: u64, reason: impl Into<String>) -> Error {
    Error::MalformedTrace {
        round,
        reason: reason.into(),
    }
}

fn jump_ratio(before: &Scalar, after: &Scalar, n: u64) -> Scalar {
    let reach = before.abs().max(after.abs());
    &reach / &after.mode().from_u64(n)
}

/// Recomputes the ledger from capital 1 and summarises it. Fails on
/// non-contiguous rounds or any ledger-identity mismatch.
pub fn analyze_trace(trace: &[RoundRecord]) -> Result<Verdict, Error> {
    let first = trace.first().ok_or_else(|| malformed(0, "empty trace"))?;
    let mode = first.capital_after.mode();

    let mut capital = mode.one();
    let mut outcome_sum = mode.zero();
    let mut kolmogorov = KolmogorovLedger::new(mode);
    let mut max_capital: Option<Scalar> = None;
    let mut bankrupt_at = None;
    let mut trigger_rounds = Vec::new();
    let mut min_ratio: Option<Scalar> = None;
    let mut last_trigger_index = None;

    for (i, rec) in trace.iter().enumerate() {
        let n = i as u64 + 1;
        if rec.n != n {
            return Err(malformed(rec.n, format!("expected round {n}")));
        }
        if rec.capital_after.mode() != mode {
            return Err(malformed(n, "numeric mode changes mid-trace"));
        }
        let smove = rec.skeptic_move();
        if payoff(&smove, &rec.variance, &rec.outcome) != rec.payoff {
            return Err(malformed(n, "payoff does not match f_n(x_n)"));
        }
        let expected_capital = &capital + &rec.payoff;
        if expected_capital != rec.capital_after {
            return Err(malformed(
                n,
                format!("capital {} but ledger gives {expected_capital}", rec.capital_after),
            ));
        }
        let expected_sum = &outcome_sum + &rec.outcome;
        if expected_sum != rec.outcome_sum_after {
            return Err(malformed(
                n,
                format!("outcome sum {} but ledger gives {expected_sum}", rec.outcome_sum_after),
            ));
        }
        if rec.triggered != reaches_round(&rec.outcome, n) {
            return Err(malformed(n, "triggered flag disagrees with |x_n| >= n"));
        }

        if rec.triggered {
            trigger_rounds.push(n);
            last_trigger_index = Some(i);
            let ratio = jump_ratio(&outcome_sum, &rec.outcome_sum_after, n);
            min_ratio = Some(match min_ratio {
                Some(current) if current <= ratio => current,
                _ => ratio,
            });
        }
        if bankrupt_at.is_none() && rec.capital_after.is_negative() {
            bankrupt_at = Some(n);
        }
        max_capital = Some(match max_capital {
            Some(m) => m.max(rec.capital_after.clone()),
            None => rec.capital_after.clone(),
        });
        kolmogorov.push(&rec.variance);
        capital = expected_capital;
        outcome_sum = expected_sum;
    }

    let horizon = trace.len() as u64;
    let tail_start = last_trigger_index.map_or(0, |i| i + 1);
    let mut previous = match last_trigger_index {
        Some(i) => trace[i].capital_after.clone(),
        None => mode.one(),
    };
    let mut post_last_trigger_monotone = true;
    for rec in &trace[tail_start..] {
        if rec.capital_after > previous {
            post_last_trigger_monotone = false;
            break;
        }
        previous = rec.capital_after.clone();
    }

    Ok(Verdict {
        horizon,
        max_capital: max_capital.unwrap_or_else(|| mode.one()),
        final_mean_outcome: &outcome_sum / &mode.from_u64(horizon),
        final_capital: capital,
        bankrupt_at,
        trigger_rounds,
        kolmogorov_sum_at_horizon: kolmogorov.partial_sum,
        min_trigger_jump_ratio: min_ratio,
        post_last_trigger_monotone,
    })
}

fn ceiling(mode: NumericMode) -> Scalar {
    match mode {
        NumericMode::Exact => mode.one(),
        NumericMode::Float => Scalar::Float(1.0 + FLOAT_CEILING_TOLERANCE),
    }
}

pub fn check_properties(verdict: &Verdict, trace: &[RoundRecord]) -> PropertyReport {
    let mode = verdict.final_capital.mode();
    let one = mode.one();

    let limit = ceiling(mode);
    let capital_ceiling = match trace.iter().find(|r| !(r.capital_after <= limit)) {
        Some(r) => PropertyOutcome::Fail {
            round: r.n,
            detail: format!("K_{} = {} exceeds {limit}", r.n, r.capital_after),
        },
        None => PropertyOutcome::Pass,
    };

    let mut trigger_jump = if verdict.trigger_rounds.is_empty() {
        PropertyOutcome::NotApplicable
    } else {
        PropertyOutcome::Pass
    };
    let mut before = mode.zero();
    for r in trace {
        if r.triggered {
            let reach = before.abs().max(r.outcome_sum_after.abs());
            let half_n = &mode.from_u64(r.n) / &mode.from_i64(2);
            if !(reach >= half_n) {
                trigger_jump = PropertyOutcome::Fail {
                    round: r.n,
                    detail: format!("max(|S_n-1|, |S_n|) = {reach} < n/2"),
                };
                break;
            }
        }
        before = r.outcome_sum_after.clone();
    }

    let post_last_trigger_monotone = if verdict.post_last_trigger_monotone {
        PropertyOutcome::Pass
    } else {
        let start = verdict.trigger_rounds.last().copied().unwrap_or(0);
        let mut previous = trace
            .get((start as usize).wrapping_sub(1))
            .map_or_else(|| one.clone(), |r| r.capital_after.clone());
        let round = trace
            .iter()
            .skip(start as usize)
            .find(|r| {
                let rose = r.capital_after > previous;
                previous = r.capital_after.clone();
                rose
            })
            .map_or(start, |r| r.n);
        PropertyOutcome::Fail {
            round,
            detail: "capital rose after the last trigger".into(),
        }
    };

    let floor = -one.clone();
    let mut punished = trace.iter().filter(|r| r.stake_quadratic.is_negative()).peekable();
    let punishment_lethal = if punished.peek().is_none() {
        PropertyOutcome::NotApplicable
    } else {
        match punished.find(|r| !(r.capital_after <= floor)) {
            Some(r) => PropertyOutcome::Fail {
                round: r.n,
                detail: format!("V_{} < 0 but K_{} = {} > -1", r.n, r.n, r.capital_after),
            },
            None => PropertyOutcome::Pass,
        }
    };

    let staked_on_variance = trace
        .iter()
        .any(|r| r.variance.is_positive() && r.stake_quadratic.is_positive());
    let no_trigger_decline = if !verdict.trigger_rounds.is_empty() || !staked_on_variance {
        PropertyOutcome::NotApplicable
    } else if verdict.final_capital < one {
        PropertyOutcome::Pass
    } else {
        PropertyOutcome::Fail {
            round: verdict.horizon,
            detail: format!("no trigger yet final capital {} is not below 1", verdict.final_capital),
        }
    };

    PropertyReport {
        capital_ceiling,
        trigger_jump,
        post_last_trigger_monotone,
        punishment_lethal,
        no_trigger_decline,
    }
}
