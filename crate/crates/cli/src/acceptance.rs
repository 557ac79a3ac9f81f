//! Acceptance criteria, run by `ufp verify` and by the `acceptance` test target.
//!
//! Each criterion returns a one-line detail on success or the reason it failed.
//! Tolerances and golden values are fixed here.

use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rayon::prelude::*;
use ufp_core::trace::{read_trace_file, verdict_path};
use ufp_core::{
    analyze_trace, check_properties, punishment_magnitude, quarter_grid, rat, search_quadratic_grid, Forecaster,
    ForecasterSpec, NumericMode, PropertyOutcome, ProtocolVariant, RoundRecord, Scalar, Sign, SignPolicy, SkepticMove,
    VerdictDocument,
};

use crate::runner::{run_command, GameReport, RunConfig};

pub const CEILING_EXACT_ROUNDS: u64 = 2_000;
pub const CEILING_FLOAT_ROUNDS: u64 = 100_000;
pub const CEILING_FLOAT_TOLERANCE: f64 = 1e-9;
pub const CEILING_BUDGET: Duration = Duration::from_secs(60);
pub const CLOSED_FORM_ROUNDS: u64 = 1_000;
/// Bankruptcy round of avoider(eps = 1e-6) against `v_n = n^2 / 2`, from the
/// doubling recursion and from a stand-alone rational simulation.
pub const FORCED_BANKRUPTCY_ROUND: u64 = 19;
pub const SURVIVAL_ROUNDS: u64 = 10_000;
pub const EXHAUSTIVE_HORIZON: u32 = 6;
pub const EXHAUSTIVE_BUDGET: Duration = Duration::from_secs(120);
pub const AGREEMENT_ROUNDS: u64 = 1_000;

pub const GRID_SKEPTICS: [&str; 5] = [
    "zero",
    "avoider:eps=1e-6",
    "avoider:eps=1/8,decay=geo,ratio=1/2",
    "momentum:m=1",
    "momentum:m=-3",
];
pub const NON_ADVERSARIAL_SKEPTICS: [&str; 3] = ["zero", "momentum:m=1", "momentum:m=-3"];
pub const GRID_FORECASTERS: [&str; 3] = ["powerlaw:c=1,p=0", "powerlaw:c=1,p=1", "powerlaw:c=1/2,p=2"];

type Check = fn() -> Result<String, String>;

pub const CRITERIA: [(&str, Check); 10] = [
    ("CapitalCeiling", capital_ceiling),
    ("TriggerJump", trigger_jump),
    ("ZeroSkepticClosedForm", zero_skeptic_closed_form),
    ("ForcedBankruptcy", forced_bankruptcy),
    ("SurvivalSharpness", survival_sharpness),
    ("MomentumExploitation", momentum_exploitation),
    ("PunishmentLethality", punishment_lethality),
    ("ExhaustiveSmallInstance", exhaustive_small_instance),
    ("DeterminismRoundTrip", determinism_round_trip),
    ("ExactFloatTriggerAgreement", exact_float_trigger_agreement),
];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{}  {:<28} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub fn run_criterion(name: &str) -> Option<CriterionResult> {
    CRITERIA.iter().find(|(n, _)| *n == name).map(|&(name, check)| {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => CriterionResult {
                name,
                passed: true,
                detail,
                elapsed,
            },
            Err(detail) => CriterionResult {
                name,
                passed: false,
                detail,
                elapsed,
            },
        }
    })
}

/// Runs every criterion, printing one line each. Returns the exit code.
pub fn verify_command<W: Write>(mut out: W) -> i32 {
    let mut failed = 0;
    for (name, _) in CRITERIA {
        let result = run_criterion(name).expect("criterion is registered");
        if !result.passed {
            failed += 1;
        }
        let _ = writeln!(out, "{}", result.line());
    }
    let _ = writeln!(out, "{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    i32::from(failed > 0)
}

fn config(forecaster: &str, skeptic: &str, mode: NumericMode, horizon: u64) -> RunConfig {
    RunConfig {
        id: None,
        forecaster: forecaster.into(),
        skeptic: skeptic.into(),
        variant: ProtocolVariant::Standard,
        mode,
        horizon,
        sign_policy: SignPolicy::PreferPositive,
        stop_on_bankruptcy: false,
        out: PathBuf::new(),
    }
}

fn play(config: &RunConfig) -> Result<GameReport, String> {
    let label = format!("{} vs {}", config.skeptic, config.forecaster);
    config
        .resolve()
        .and_then(|m| m.play())
        .map_err(|e| format!("{label}: {e}"))
}

type GridRuns = Vec<(String, GameReport)>;

fn play_grid(skeptics: &[&str], mode: NumericMode, horizon: u64) -> Result<GridRuns, String> {
    let configs: Vec<RunConfig> = skeptics
        .iter()
        .flat_map(|s| GRID_FORECASTERS.iter().map(move |f| config(f, s, mode, horizon)))
        .collect();
    configs
        .par_iter()
        .map(|c| play(c).map(|r| (format!("{} vs {}", c.skeptic, c.forecaster), r)))
        .collect()
}

fn exact_grid() -> Result<&'static GridRuns, String> {
    static RUNS: OnceLock<Result<GridRuns, String>> = OnceLock::new();
    RUNS.get_or_init(|| play_grid(&GRID_SKEPTICS, NumericMode::Exact, CEILING_EXACT_ROUNDS))
        .as_ref()
        .map_err(Clone::clone)
}

fn ceiling_violation(runs: &GridRuns, limit: &Scalar) -> Option<String> {
    runs.iter().find_map(|(label, report)| {
        let bad = report.records.iter().find(|r| !(r.capital_after <= *limit))?;
        Some(format!("{label}: K_{} = {} > {limit}", bad.n, bad.capital_after))
    })
}

pub fn capital_ceiling() -> Result<String, String> {
    let start = Instant::now();
    let exact = exact_grid()?;
    if let Some(v) = ceiling_violation(exact, &NumericMode::Exact.one()) {
        return Err(format!("exact: {v}"));
    }
    let float = play_grid(&GRID_SKEPTICS, NumericMode::Float, CEILING_FLOAT_ROUNDS)?;
    if let Some(v) = ceiling_violation(&float, &Scalar::Float(1.0 + CEILING_FLOAT_TOLERANCE)) {
        return Err(format!("float: {v}"));
    }
    for (label, report) in exact.iter().chain(&float) {
        if let PropertyOutcome::Fail { detail, .. } = &report.document.properties.capital_ceiling {
            return Err(format!("{label}: property checker disagrees: {detail}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > CEILING_BUDGET {
        return Err(format!("ceiling held but took {:.1}s (budget 60s)", elapsed.as_secs_f64()));
    }
    Ok(format!(
        "{} exact games x {CEILING_EXACT_ROUNDS} rounds K <= 1; {} float games x {CEILING_FLOAT_ROUNDS} rounds K <= 1 + 1e-9",
        exact.len(),
        float.len()
    ))
}

pub fn trigger_jump() -> Result<String, String> {
    let mut checked = 0usize;
    for (label, report) in exact_grid()? {
        let mut before = NumericMode::Exact.zero();
        for r in &report.records {
            if r.triggered {
                checked += 1;
                let reach = before.abs().max(r.outcome_sum_after.abs());
                let half = Scalar::Exact(rat(r.n as i64, 2));
                if !(reach >= half) {
                    return Err(format!("{label}: round {} reaches only {reach}", r.n));
                }
            }
            before = r.outcome_sum_after.clone();
        }
        if report.document.properties.trigger_jump.is_fail() {
            return Err(format!("{label}: property checker reports a failure"));
        }
    }
    Ok(format!("{checked} triggered rounds satisfy max(|S_n-1|, |S_n|) >= n/2"))
}

pub fn zero_skeptic_closed_form() -> Result<String, String> {
    let report = play(&config("constant:c=1", "zero", NumericMode::Exact, CLOSED_FORM_ROUNDS))?;
    let records = &report.records;
    if let Some(r) = records.iter().find(|r| !r.triggered) {
        return Err(format!("round {} did not trigger", r.n));
    }
    let last = records.last().ok_or("empty trace")?;
    let n = CLOSED_FORM_ROUNDS as i64;
    let expected_sum = Scalar::Exact(rat(n * (n + 1) / 2, 1));
    if last.outcome_sum_after != expected_sum || last.capital_after != NumericMode::Exact.one() {
        return Err(format!("S_N = {}, K_N = {}", last.outcome_sum_after, last.capital_after));
    }
    Ok(format!("{} triggers, S_N = {}, K_N = {}", records.len(), last.outcome_sum_after, last.capital_after))
}

/// First `n` with `d_n > 1`, where `d_n = 2 d_(n-1) + eps n^2 / 2` is the
/// avoider's shortfall `1 - K_n` against `v_n = n^2 / 2`.
pub fn doubling_recursion_bankruptcy(eps: &BigRational, limit: u64) -> Option<u64> {
    let one = rat(1, 1);
    let mut shortfall = rat(0, 1);
    for n in 1..=limit {
        shortfall = &shortfall * rat(2, 1) + eps * rat((n * n) as i64, 2);
        if shortfall > one {
            return Some(n);
        }
    }
    None
}

pub fn forced_bankruptcy() -> Result<String, String> {
    let oracle = doubling_recursion_bankruptcy(&rat(1, 1_000_000), 100).ok_or("oracle found no bankruptcy")?;
    if oracle != FORCED_BANKRUPTCY_ROUND || oracle >= 100 {
        return Err(format!("oracle gives R = {oracle}, frozen value {FORCED_BANKRUPTCY_ROUND}"));
    }
    let report = play(&config("powerlaw:c=1/2,p=2", "avoider:eps=1e-6", NumericMode::Exact, 100))?;
    let verdict = &report.document.verdict;
    if verdict.bankrupt_at != Some(oracle) {
        return Err(format!("bankrupt_at = {:?}, oracle R = {oracle}", verdict.bankrupt_at));
    }
    if let Some(&n) = verdict.trigger_rounds.iter().find(|&&n| n <= oracle) {
        return Err(format!("trigger at round {n} before bankruptcy"));
    }
    Ok(format!("bankrupt_at = {oracle} = oracle R, no triggers before it"))
}

pub fn survival_sharpness() -> Result<String, String> {
    let report = play(&config(
        "constant:c=1",
        "avoider:eps=1/8,decay=geo,ratio=1/2",
        NumericMode::Exact,
        SURVIVAL_ROUNDS,
    ))?;
    let verdict = &report.document.verdict;
    let mut problems = Vec::new();
    if !verdict.trigger_rounds.is_empty() {
        let shown: Vec<u64> = verdict.trigger_rounds.iter().take(10).copied().collect();
        problems.push(format!(
            "expected zero triggers, got {} at rounds {shown:?}",
            verdict.trigger_rounds.len()
        ));
    }
    if let Some(n) = verdict.bankrupt_at {
        problems.push(format!("bankrupt at round {n}"));
    }
    let k = &verdict.final_capital;
    if !(k.is_positive() && *k < NumericMode::Exact.one()) {
        problems.push(format!("K_N = {:.6} outside (0, 1)", k.to_f64()));
    }
    if problems.is_empty() {
        Ok(format!("no triggers, no bankruptcy, K_N = {:.6}", k.to_f64()))
    } else {
        Err(format!("{}; K_N = {:.6}", problems.join("; "), k.to_f64()))
    }
}

pub fn momentum_exploitation() -> Result<String, String> {
    let report = play(&config("constant:c=1", "momentum:m=1", NumericMode::Exact, 2))?;
    let r = &report.records;
    let q = |n: i64| Scalar::Exact(rat(n, 1));
    let observed = (&r[0].outcome, &r[1].outcome, &r[0].capital_after, &r[1].capital_after);
    if observed != (&q(-1), &q(-2), &q(0), &q(-2)) || !r[0].triggered || !r[1].triggered {
        return Err(format!("x = ({}, {}), K = ({}, {})", observed.0, observed.1, observed.2, observed.3));
    }
    if report.document.verdict.bankrupt_at != Some(2) {
        return Err(format!("bankrupt_at = {:?}", report.document.verdict.bankrupt_at));
    }
    Ok("x1 = -1, x2 = -2, K1 = 0, K2 = -2, bankrupt_at = 2".into())
}

pub fn punishment_lethality() -> Result<String, String> {
    let mut modified = config("constant:c=0", "negv:v=-1/10", NumericMode::Exact, 1);
    modified.variant = ProtocolVariant::Modified;
    let report = play(&modified)?;
    let record = report.records.first().ok_or("empty trace")?;
    let exact = NumericMode::Exact;
    let expected = punishment_magnitude(
        &exact.one(),
        &SkepticMove::new(exact.zero(), Scalar::Exact(rat(-1, 10))),
        &exact.zero(),
        1,
        Sign::Positive,
    );
    if record.outcome != expected.outcome {
        return Err(format!("x_1 = {}, punishment rule gives {}", record.outcome, expected.outcome));
    }
    if !(record.capital_after <= -exact.one()) {
        return Err(format!("K_1 = {} > -1", record.capital_after));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut standard = modified.clone();
    standard.variant = ProtocolVariant::Standard;
    standard.out = dir.path().join("standard.jsonl");
    let code = match run_command(&standard) {
        Ok(_) => 0,
        Err(e) if e.to_string().contains("NegativeQuadraticStake") => e.exit_code(),
        Err(e) => return Err(format!("standard run failed for another reason: {e}")),
    };
    if code != 2 {
        return Err(format!("standard variant exit code {code}, expected 2"));
    }
    Ok(format!("modified: x_1 = {}, K_1 = {}; standard: exit 2", record.outcome, record.capital_after))
}

pub fn exhaustive_small_instance() -> Result<String, String> {
    let start = Instant::now();
    let spec = ForecasterSpec::power_law(rat(1, 2), 2).map_err(|e| e.to_string())?;
    let forecaster = Forecaster::from_spec(&spec).map_err(|e| e.to_string())?;
    let report = search_quadratic_grid(&forecaster, EXHAUSTIVE_HORIZON, &quarter_grid(), SignPolicy::PreferPositive)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected_policies = 9u64.pow(EXHAUSTIVE_HORIZON);
    if report.policies != expected_policies {
        return Err(format!("enumerated {} policies, expected {expected_policies}", report.policies));
    }
    if !report.holds() {
        return Err(format!(
            "{} policies neither trigger nor end below 1, e.g. {:?}",
            report.violation_count,
            report.violations.first()
        ));
    }
    if elapsed > EXHAUSTIVE_BUDGET {
        return Err(format!("held but took {:.1}s (budget 120s)", elapsed.as_secs_f64()));
    }
    Ok(format!(
        "{} policies: {} trigger, {} end with K_6 < 1",
        report.policies, report.triggered, report.declined
    ))
}

fn reanalyze(path: &std::path::Path) -> Result<String, String> {
    let records: Vec<RoundRecord> = read_trace_file(path).map_err(|e| e.to_string())?;
    let verdict = analyze_trace(&records).map_err(|e| e.to_string())?;
    let properties = check_properties(&verdict, &records);
    Ok(VerdictDocument { verdict, properties }.to_json())
}

pub fn determinism_round_trip() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let matchups = [
        config("powerlaw:c=1/2,p=2", "avoider:eps=1e-6", NumericMode::Exact, 200),
        config("constant:c=1", "avoider:eps=1/8,decay=geo,ratio=1/2", NumericMode::Float, 5_000),
        config("powerlaw:c=1,p=1", "momentum:m=-3", NumericMode::Exact, 300),
        config("powerlaw:c=1/2,p=2", "avoider:eps=1e-6", NumericMode::Float, 2_000),
    ];
    for (i, base) in matchups.iter().enumerate() {
        let mut paths = Vec::new();
        for copy in ["a", "b"] {
            let mut c = base.clone();
            c.out = dir.path().join(format!("{i}{copy}.jsonl"));
            run_command(&c).map_err(|e| e.to_string())?;
            paths.push(c.out);
        }
        let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
        if read(&paths[0])? != read(&paths[1])? {
            return Err(format!("{} vs {}: traces differ", base.skeptic, base.forecaster));
        }
        let written = std::fs::read_to_string(verdict_path(&paths[0])).map_err(|e| e.to_string())?;
        if reanalyze(&paths[0])? != written {
            return Err(format!("{} vs {}: re-analysis differs from written verdict", base.skeptic, base.forecaster));
        }
    }
    Ok(format!("{} matchups byte-identical on rerun; verdicts reproduced from trace files", matchups.len()))
}

pub fn exact_float_trigger_agreement() -> Result<String, String> {
    let exact = play_grid(&NON_ADVERSARIAL_SKEPTICS, NumericMode::Exact, AGREEMENT_ROUNDS)?;
    let float = play_grid(&NON_ADVERSARIAL_SKEPTICS, NumericMode::Float, AGREEMENT_ROUNDS)?;
    for ((label, e), (_, f)) in exact.iter().zip(&float) {
        if e.document.verdict.trigger_rounds != f.document.verdict.trigger_rounds {
            return Err(format!("{label}: trigger rounds differ between modes"));
        }
    }
    Ok(format!("{} matchups x {AGREEMENT_ROUNDS} rounds: identical trigger sets", exact.len()))
}
