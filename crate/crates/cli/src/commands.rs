use duopoly_core::cara::RiskAverseGame;
use duopoly_core::sim::{simulate_game, StrategyRule};
use duopoly_core::{Agent, Game, Model, RegulatorLaw, RiskProfile, StrategyReport};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Table};

pub struct Context {
    pub config: RunConfig,
    pub game: Game<f64>,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let model = Model::new(config.model)?;
        let game = Game::new(model, config.law)?;
        Ok(Self { config, game })
    }
}

fn check_y(y: f64) -> Result<(), CliError> {
    if y >= 0.0 && y.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--y must be a finite level >= 0, got {y}"
        )))
    }
}

fn gamma_profile(gamma: f64) -> Result<RiskProfile<f64>, CliError> {
    RiskProfile::new(gamma).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn value(ctx: &Context, y: f64) -> Result<Table, CliError> {
    check_y(y)?;
    let t = ctx.game.payoff_triple(y);
    let (s1, s2) = ctx.game.blended_payoffs(y);
    let region = ctx.game.strategy_at(y)?.region.label();
    let mut table = Table::new(vec!["y", "region", "L", "F", "S", "S1", "S2"]);
    table.push(vec![
        y.into(),
        region.into(),
        t.l.into(),
        t.f.into(),
        t.s.into(),
        s1.into(),
        s2.into(),
    ]);
    Ok(table)
}

pub fn thresholds(ctx: &Context, gamma: Option<f64>) -> Result<Table, CliError> {
    let t = *ctx.game.thresholds();
    let regime = ctx.game.regime().label();
    let mut table = Table::new(vec!["threshold", "value", "annotation", "regime"]);
    let note = |collapsed: bool| if collapsed { "collapsed" } else { "root" };
    let rows = [
        ("Y_L", t.y_l, "preemption"),
        ("Y_1", t.y_1, note(t.origin_1.is_collapsed())),
        ("Y_2", t.y_2, note(t.origin_2.is_collapsed())),
        ("Y_F", t.y_f, "follower"),
    ];
    for (name, v, a) in rows {
        table.push(vec![name.into(), v.into(), a.into(), regime.clone().into()]);
    }
    let gamma = match gamma {
        Some(g) => Some(gamma_profile(g)?),
        None => ctx.config.gamma,
    };
    if let Some(risk) = gamma {
        let cara = RiskAverseGame::new(ctx.game, risk);
        match cara.thresholds() {
            Ok(g) => {
                for (name, th) in [("Y_1_gamma", g.y_1), ("Y_2_gamma", g.y_2)] {
                    let a = if th.at_limit {
                        format!("gamma={} limit", risk.gamma())
                    } else {
                        format!("gamma={}", risk.gamma())
                    };
                    table.push(vec![
                        name.into(),
                        th.value.into(),
                        a.into(),
                        regime.clone().into(),
                    ]);
                }
            }
            Err(duopoly_core::Error::Unsupported(why)) => {
                for name in ["Y_1_gamma", "Y_2_gamma"] {
                    table.push(vec![
                        name.into(),
                        Cell::Empty,
                        why.into(),
                        regime.clone().into(),
                    ]);
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(table)
}

fn probabilities(report: &StrategyReport<f64>) -> (f64, f64) {
    report.profile.map_or((0.0, 0.0), |p| (p.p1, p.p2))
}

pub fn strategy(ctx: &Context, y: f64) -> Result<Table, CliError> {
    check_y(y)?;
    let r = ctx.game.strategy_at(y)?;
    let (p1, p2) = probabilities(&r);
    let mut table = Table::new(vec![
        "y", "region", "p1", "p2", "a1", "a2", "aS", "leader1", "leader2", "shared", "E1", "E2",
    ]);
    let o = r.outcome;
    let s = r.settled;
    table.push(vec![
        y.into(),
        r.region.label().into(),
        p1.into(),
        p2.into(),
        o.map(|o| o.a1).into(),
        o.map(|o| o.a2).into(),
        o.map(|o| o.a_s).into(),
        s.map(|s| s.leader1).into(),
        s.map(|s| s.leader2).into(),
        s.map(|s| s.shared).into(),
        r.payoffs.0.into(),
        r.payoffs.1.into(),
    ]);
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    #[value(name = "p1p2")]
    P1P2,
    #[value(name = "options")]
    Options,
    #[value(name = "thresholds_vs_gamma")]
    ThresholdsVsGamma,
}

pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl SweepRange {
    fn check(&self, what: &str, positive: bool) -> Result<(), CliError> {
        let lo_ok = if positive {
            self.lo > 0.0
        } else {
            self.lo >= 0.0
        };
        if !(lo_ok && self.lo < self.hi && self.hi.is_finite()) {
            return Err(CliError::Usage(format!(
                "{what} range must satisfy {} <= min < max, got [{}, {}]",
                if positive { "0 <" } else { "0" },
                self.lo,
                self.hi
            )));
        }
        if self.n < 2 {
            return Err(CliError::Usage(format!(
                "--grid must be >= 2, got {}",
                self.n
            )));
        }
        Ok(())
    }

    fn linear(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(move |i| {
            if i + 1 == self.n {
                self.hi
            } else {
                self.lo + step * i as f64
            }
        })
    }

    fn geometric(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let step = (b - a) / (self.n - 1) as f64;
        (0..self.n).map(move |i| {
            if i + 1 == self.n {
                self.hi
            } else {
                (a + step * i as f64).exp()
            }
        })
    }
}

pub fn sweep(ctx: &Context, quantity: Quantity, range: SweepRange) -> Result<Table, CliError> {
    match quantity {
        Quantity::P1P2 => {
            range.check("y", false)?;
            let mut table = Table::new(vec!["y", "p1", "p2", "region"]);
            for y in range.linear() {
                let r = ctx.game.strategy_at(y)?;
                let (p1, p2) = probabilities(&r);
                table.push(vec![
                    y.into(),
                    p1.into(),
                    p2.into(),
                    r.region.label().into(),
                ]);
            }
            Ok(table)
        }
        Quantity::Options => {
            range.check("y", false)?;
            let model = *ctx.game.model();
            let weak = Game::new(model, RegulatorLaw::weak_stackelberg(Agent::One))?;
            let cournot = Game::new(model, RegulatorLaw::cournot())?;
            let mut table = Table::new(vec![
                "y",
                "L",
                "F",
                "S",
                "L_minus_F",
                "E1_weak_stackelberg",
                "E1_cournot",
                "preference_option",
            ]);
            for y in range.linear() {
                let t = model.payoff_triple(y);
                let e_weak = weak.strategy_at(y)?.payoffs.0;
                let e_cournot = cournot.strategy_at(y)?.payoffs.0;
                table.push(vec![
                    y.into(),
                    t.l.into(),
                    t.f.into(),
                    t.s.into(),
                    (t.l - t.f).into(),
                    e_weak.into(),
                    e_cournot.into(),
                    (e_weak - e_cournot).into(),
                ]);
            }
            Ok(table)
        }
        Quantity::ThresholdsVsGamma => {
            range.check("gamma", true)?;
            let mut table = Table::new(vec!["gamma", "Y1_gamma", "Y2_gamma", "limit1", "limit2"]);
            for g in range.geometric() {
                let th = RiskAverseGame::new(ctx.game, gamma_profile(g)?).thresholds()?;
                table.push(vec![
                    g.into(),
                    th.y_1.value.into(),
                    th.y_2.value.into(),
                    th.y_1.at_limit.to_string().into(),
                    th.y_2.at_limit.to_string().into(),
                ]);
            }
            Ok(table)
        }
    }
}

pub struct SimOutcome {
    pub table: Table,
    pub warnings: Vec<String>,
    /// Set when too many trials never settled.
    pub failure: Option<CliError>,
}

fn flag(ok: Option<bool>) -> Cell {
    match ok {
        Some(true) => "PASS".into(),
        Some(false) => "FAIL".into(),
        None => "n/a".into(),
    }
}

pub fn simulate(
    ctx: &Context,
    y: f64,
    seed: Option<u64>,
    paths: Option<usize>,
) -> Result<SimOutcome, CliError> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(CliError::Usage(format!(
            "--y must be > 0 for a simulation, got {y}"
        )));
    }
    let mut section = ctx
        .config
        .sim
        .ok_or_else(|| CliError::Usage("the config has no sim section".into()))?;
    if let Some(s) = seed {
        section.config.seed = s;
    }
    if let Some(n) = paths {
        section.config.n_paths = n;
    }
    section
        .config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let game = &ctx.game;
    let rules = [
        StrategyRule::equilibrium(game, Agent::One),
        StrategyRule::equilibrium(game, Agent::Two),
    ];
    let report = simulate_game(game, &ctx.config.law, y, &rules, &section.config)?;
    let analytic = game.strategy_at(y)?;

    let mut table = Table::new(vec![
        "quantity",
        "analytic",
        "empirical",
        "std_err",
        "within_3se",
    ]);
    let outcome = analytic.outcome.filter(|_| y >= game.thresholds().y_l);
    let settled = analytic.settled.filter(|_| y >= game.thresholds().y_l);
    let proportions = [
        ("a1", outcome.map(|o| o.a1), report.round_outcome[0]),
        ("a2", outcome.map(|o| o.a2), report.round_outcome[1]),
        ("aS", outcome.map(|o| o.a_s), report.round_outcome[2]),
        ("leader1", settled.map(|s| s.leader1), report.settled[0]),
        ("leader2", settled.map(|s| s.leader2), report.settled[1]),
        ("shared", settled.map(|s| s.shared), report.settled[2]),
    ];
    for (name, want, freq) in proportions {
        let se = want.and_then(|p| freq.std_err_at(p));
        let ok = want.and_then(|p| freq.agrees_with(p, 3.0));
        let empirical = (freq.n > 0).then(|| freq.value());
        table.push(vec![
            name.into(),
            want.into(),
            empirical.into(),
            se.into(),
            flag(ok),
        ]);
    }
    for (name, want, stat) in [
        ("E1", analytic.payoffs.0, report.payoffs[0]),
        ("E2", analytic.payoffs.1, report.payoffs[1]),
    ] {
        table.push(vec![
            name.into(),
            want.into(),
            stat.mean.into(),
            stat.std_err().into(),
            flag(stat.agrees_with(want, 3.0)),
        ]);
    }
    let n = report.n_paths as f64;
    for (name, count) in [
        ("unsettled", report.unsettled),
        ("follower_truncated", report.follower_truncated),
    ] {
        table.push(vec![
            name.into(),
            Cell::Empty,
            (count as f64 / n).into(),
            Cell::Empty,
            Cell::Empty,
        ]);
    }

    let mut warnings = Vec::new();
    if report.n_paths < 2 {
        warnings.push("standard errors are undefined with fewer than two trials".to_string());
    }
    let unsettled = report.unsettled as f64 / n;
    let failure = (unsettled > section.max_unsettled_fraction).then(|| {
        CliError::Numerical(format!(
            "{:.1}% of trials never settled within the horizon (allowed {:.1}%)",
            100.0 * unsettled,
            100.0 * section.max_unsettled_fraction
        ))
    });
    Ok(SimOutcome {
        table,
        warnings,
        failure,
    })
}

pub fn regime(ctx: &Context) -> Result<Table, CliError> {
    let law = ctx.game.law();
    let regime = ctx.game.regime();
    let mut table = Table::new(vec!["field", "value"]);
    table.push(vec!["regime".into(), regime.label().into()]);
    table.push(vec![
        "favored".into(),
        regime
            .favored()
            .map_or(Cell::Empty, |a| a.to_string().into()),
    ]);
    for (name, v) in [
        ("q0", ctx.config.law.q0),
        ("q1", law.q1),
        ("q2", law.q2),
        ("qS", law.qs),
    ] {
        table.push(vec![name.into(), v.into()]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(RunConfig::baseline()).unwrap()
    }

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(x) => *x,
            other => panic!("not a number: {other:?}"),
        }
    }

    #[test]
    fn value_at_zero_and_follower_threshold() {
        let t = value(&ctx(), 0.0).unwrap();
        let row = &t.rows[0];
        assert_eq!(
            (num(&row[2]), num(&row[3]), num(&row[4])),
            (-10.0, 0.0, -10.0)
        );
        let y_f = ctx().game.thresholds().y_f;
        let row = &value(&ctx(), y_f).unwrap().rows[0];
        assert!(
            (num(&row[2]) - num(&row[4])).abs() < 1e-9
                && (num(&row[3]) - num(&row[4])).abs() < 1e-9
        );
        assert!(value(&ctx(), -1.0).is_err());
    }

    #[test]
    fn thresholds_table_rounds_to_the_baseline() {
        let t = thresholds(&ctx(), Some(1e-6)).unwrap();
        let values: Vec<f64> = t.rows.iter().map(|r| num(&r[1])).collect();
        for (got, want) in values.iter().zip([0.37, 0.53, 0.72, 1.83, 0.53, 0.72]) {
            assert!((got - want).abs() < 0.01);
        }
    }

    #[test]
    fn collapsed_regimes_are_annotated() {
        for (law, at) in [
            (RegulatorLaw::stackelberg(), 0usize),
            (RegulatorLaw::cournot(), 3),
        ] {
            let mut config = RunConfig::baseline();
            config.law = law;
            let c = Context::new(config).unwrap();
            let t = thresholds(&c, None).unwrap();
            assert_eq!(t.rows[1][2], Cell::from("collapsed"));
            assert_eq!(t.rows[2][2], Cell::from("collapsed"));
            assert_eq!(num(&t.rows[1][1]), num(&t.rows[at][1]));
        }
    }

    #[test]
    fn p1p2_jumps_at_the_thresholds() {
        let c = ctx();
        let th = *c.game.thresholds();
        let t = sweep(
            &c,
            Quantity::P1P2,
            SweepRange {
                lo: 0.37,
                hi: 1.83,
                n: 1000,
            },
        )
        .unwrap();
        for row in &t.rows {
            let (y, p1, p2) = (num(&row[0]), num(&row[1]), num(&row[2]));
            if y > th.y_1 && y < th.y_2 {
                assert_eq!((p1, p2), (1.0, 0.0));
            }
            if y > th.y_2 {
                assert_eq!((p1, p2), (1.0, 1.0));
            }
            if y > th.y_l && y < th.y_1 {
                assert!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0);
            }
        }
    }

    #[test]
    fn options_column_is_the_positive_part() {
        let t = sweep(
            &ctx(),
            Quantity::Options,
            SweepRange {
                lo: 0.0,
                hi: 2.5,
                n: 101,
            },
        )
        .unwrap();
        for row in &t.rows {
            let (l_minus_f, option) = (num(&row[4]), num(&row[7]));
            assert!((option - l_minus_f.max(0.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_sweep_increases() {
        let t = sweep(
            &ctx(),
            Quantity::ThresholdsVsGamma,
            SweepRange {
                lo: 1e-3,
                hi: 10.0,
                n: 20,
            },
        )
        .unwrap();
        let first = &t.rows[0];
        assert!((num(&first[1]) - 0.53).abs() < 0.01 && (num(&first[2]) - 0.72).abs() < 0.01);
        for w in t.rows.windows(2) {
            assert!(num(&w[1][1]) > num(&w[0][1]) && num(&w[1][2]) > num(&w[0][2]));
        }
        assert!(sweep(
            &ctx(),
            Quantity::ThresholdsVsGamma,
            SweepRange {
                lo: 0.0,
                hi: 1.0,
                n: 5
            }
        )
        .is_err());
    }

    #[test]
    fn simulation_above_follower_threshold_is_trivial() {
        let out = simulate(&ctx(), 2.5, Some(1), Some(200)).unwrap();
        assert!(out.failure.is_none());
        assert!(out
            .table
            .rows
            .iter()
            .take(8)
            .all(|r| r[4] == Cell::from("PASS")));
        let one = simulate(&ctx(), 0.5, Some(1), Some(1)).unwrap();
        assert_eq!(one.warnings.len(), 1);
    }
}
