//! Experiment runners behind the command-line tool.
//!
//! Each runner turns an [`ExperimentSpec`] into CSV text. Numbers are written
//! in scientific notation with 13 significant digits, a header row is always
//! present, and the output depends only on the [`ExperimentSpec`] (and its seed), never on
//! the thread count.
//!
//! | kind | columns |
//! |------|---------|
//! | validate-cop | `lambda_j,d,hops,power,rounds,outage_count,estimate,std_error,closed_form,abs_diff,pass` |
//! | validate-sop | `lambda_e,lambda_j,hops,power,rounds,outage_count,estimate,std_error,closed_form,abs_diff,pass` |
//! | tradeoff-curve | `d,hops,power,cop,sop,point` |
//! | optimal-tradeoff | `panel,beta,lambda_j,lambda_e,value` |
//! | table-fixture | `fixture,hop,distance,power_so_cop,power_qo_sop,optimal_cop,optimal_sop` |
//! | route-demo | `algorithm,row,hop,from_id,to_id,distance,power,achieved,status` |

use std::fmt::Write as _;

use crate::analytics::{b_so, path_cop, path_sop};
use crate::error::{Error, Result};
use crate::geometry::{generate_scenario, Region, Scenario};
use crate::montecarlo::{estimate_path_cop, estimate_path_sop, SimConfig, SimEstimate};
use crate::params::{PathSpec, SystemParams};
use crate::rng::{Purpose, StreamKey};
use crate::routing::{build_graph, default_endpoints, path_length, route_between, RouteResult};
use crate::tradeoff::{optimal_outage, solve_qo_sop, solve_so_cop, Objective};

pub const DESK_ROUNDS: u64 = 1_000_000;
pub const FULL_ROUNDS: u64 = 10_000_000;

/// Transmit powers of the COP/SOP tradeoff curve.
pub const CURVE_POWERS: [f64; 11] = [0.0, 0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0];

pub const TABLE_ONE_DISTANCES: [f64; 5] = [3.5726, 7.8148, 7.7836, 4.4240, 6.1104];
pub const TABLE_TWO_DISTANCES: [f64; 5] = [6.6027, 4.6456, 5.9676, 4.7477, 5.3562];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ValidateCop,
    ValidateSop,
    TradeoffCurve,
    OptimalTradeoff,
    TableFixture,
    RouteDemo,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ValidateCop => "validate-cop",
            Self::ValidateSop => "validate-sop",
            Self::TradeoffCurve => "tradeoff-curve",
            Self::OptimalTradeoff => "optimal-tradeoff",
            Self::TableFixture => "table-fixture",
            Self::RouteDemo => "route-demo",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            Self::ValidateCop | Self::ValidateSop | Self::RouteDemo
        )
    }
}

/// Everything a runner needs. Lists are sweep grids; fields a kind does not
/// use are ignored by it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Fixed parameters; swept quantities are overridden per row.
    pub base: SystemParams,
    pub seed: Option<u64>,
    pub rounds: u64,
    /// Side of the square simulation window.
    pub window: f64,
    pub lambda_j: Vec<f64>,
    pub lambda_e: Vec<f64>,
    pub link_distances: Vec<f64>,
    pub hops: usize,
    pub power: f64,
    pub powers: Vec<f64>,
    pub betas: Vec<f64>,
    /// Secrecy outage level at which tradeoff curves report their COP.
    pub anchor_sop: f64,
    pub fixture: Option<String>,
    /// Explicit hop distances; replaces the named fixture when set.
    pub distances: Option<Vec<f64>>,
    pub beta_so: Option<f64>,
    pub beta_co: Option<f64>,
    pub max_range: f64,
    pub nodes: usize,
    pub width: f64,
    pub height: f64,
    /// Replay this scenario instead of generating one.
    pub scenario: Option<Scenario>,
}

impl ExperimentSpec {
    /// The defaults of each kind, used by the reference experiments.
    pub fn new(kind: ExperimentKind) -> Self {
        let (lambda_j, lambda_e, link_distances, base) = match kind {
            ExperimentKind::ValidateCop => (
                vec![1e-4, 1e-3, 1e-2],
                vec![1e-4],
                vec![3.0, 4.0, 5.0],
                SystemParams::default(),
            ),
            ExperimentKind::ValidateSop => (
                vec![1e-3, 1e-2],
                vec![1e-4, 4e-4, 7e-4, 1e-3],
                vec![5.0],
                SystemParams::default(),
            ),
            ExperimentKind::TradeoffCurve => (
                vec![1e-3],
                vec![1e-3],
                vec![3.0, 4.0, 5.0],
                SystemParams::new(1e-3, 1e-3, 1.0, 1.0, 1.0, 4.0).expect("valid defaults"),
            ),
            ExperimentKind::OptimalTradeoff => (
                vec![1e-4, 1e-3],
                vec![1e-4, 1e-3],
                vec![5.0],
                SystemParams::default(),
            ),
            _ => (vec![1e-3], vec![1e-4], vec![5.0], SystemParams::default()),
        };
        Self {
            kind,
            base,
            seed: None,
            rounds: DESK_ROUNDS,
            window: 2000.0,
            lambda_j,
            lambda_e,
            link_distances,
            hops: 5,
            power: 1.0,
            powers: CURVE_POWERS.to_vec(),
            betas: (1..20).map(|i| i as f64 * 0.05).collect(),
            anchor_sop: 0.5,
            fixture: None,
            distances: None,
            beta_so: None,
            beta_co: None,
            max_range: 8.0,
            nodes: 20,
            width: 20.0,
            height: 20.0,
            scenario: None,
        }
    }

    fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::param(
                "seed",
                format!(
                    "{} is randomized and needs an explicit --seed",
                    self.kind.name()
                ),
            )
        })
    }
}

/// Result of one runner.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    /// Serialized scenario for replay (route-demo only).
    pub scenario: Option<String>,
    /// The route-demo destination could not be reached.
    pub unreachable: bool,
}

impl RunOutput {
    fn csv(csv: String) -> Self {
        Self {
            csv,
            scenario: None,
            unreachable: false,
        }
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    match spec.kind {
        ExperimentKind::ValidateCop => run_validate_cop(spec).map(RunOutput::csv),
        ExperimentKind::ValidateSop => run_validate_sop(spec).map(RunOutput::csv),
        ExperimentKind::TradeoffCurve => run_tradeoff_curve(spec).map(RunOutput::csv),
        ExperimentKind::OptimalTradeoff => run_optimal_tradeoff(spec).map(RunOutput::csv),
        ExperimentKind::TableFixture => run_table_fixture(spec).map(RunOutput::csv),
        ExperimentKind::RouteDemo => run_route_demo(spec),
    }
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn non_empty(field: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        Err(Error::param(field, "the sweep grid is empty"))
    } else {
        Ok(())
    }
}

fn check_shape(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::CrossCheck(format!("curve shape violated: {what}")))
    }
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

/// Values of `x` ordered by `key`, for shape checks on unsorted grids.
fn sorted_by_key(pairs: &mut [(f64, f64)]) -> Vec<f64> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.iter().map(|p| p.1).collect()
}

fn simulate(spec: &ExperimentSpec, path: &PathSpec, row: u64) -> Result<SimConfig> {
    let seed = StreamKey::new(spec.require_seed()?)
        .purpose(Purpose::Experiment)
        .index(row)
        .raw();
    SimConfig::centered(path, Region::square(spec.window)?, spec.rounds, seed)
}

pub fn run_validate_cop(spec: &ExperimentSpec) -> Result<String> {
    non_empty("lambda_j", &spec.lambda_j)?;
    non_empty("link_distance", &spec.link_distances)?;
    spec.require_seed()?;
    let mut out = String::from(
        "lambda_j,d,hops,power,rounds,outage_count,estimate,std_error,closed_form,abs_diff,pass\n",
    );
    let mut by_lambda: Vec<Vec<(f64, f64)>> = vec![Vec::new(); spec.link_distances.len()];
    let mut row = 0;
    for &lambda_j in &spec.lambda_j {
        let params = spec.base.with_lambda_j(lambda_j)?;
        for (i, &d) in spec.link_distances.iter().enumerate() {
            let path = PathSpec::uniform(spec.hops, d, spec.power)?;
            let closed = path_cop(&path, &params)?.probability();
            let est = estimate_path_cop(&simulate(spec, &path, row)?, &params)?;
            let diff = (est.estimate - closed).abs();
            let pass = diff <= (3.0 * est.std_error).max(0.005);
            write_validation_row(
                &mut out,
                &[num(lambda_j), num(d)],
                spec,
                &est,
                closed,
                diff,
                pass,
            );
            by_lambda[i].push((lambda_j, closed));
            row += 1;
        }
    }
    for mut pairs in by_lambda {
        check_shape(
            strictly(&sorted_by_key(&mut pairs), true),
            "COP must grow with jammer density",
        )?;
    }
    Ok(out)
}

fn write_validation_row(
    out: &mut String,
    lead: &[String],
    spec: &ExperimentSpec,
    est: &SimEstimate,
    closed: f64,
    diff: f64,
    pass: bool,
) {
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        lead.join(","),
        spec.hops,
        num(spec.power),
        est.rounds,
        est.outage_count,
        num(est.estimate),
        num(est.std_error),
        num(closed),
        num(diff),
        pass
    )
    .unwrap();
}

pub fn run_validate_sop(spec: &ExperimentSpec) -> Result<String> {
    non_empty("lambda_e", &spec.lambda_e)?;
    non_empty("lambda_j", &spec.lambda_j)?;
    spec.require_seed()?;
    let d = *spec
        .link_distances
        .first()
        .ok_or_else(|| Error::param("link_distance", "missing"))?;
    let path = PathSpec::uniform(spec.hops, d, spec.power)?;
    let mut out = String::from("lambda_e,lambda_j,hops,power,rounds,outage_count,estimate,std_error,closed_form,abs_diff,pass\n");
    let mut curves: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    let mut row = 0;
    for &lambda_j in &spec.lambda_j {
        let mut curve = Vec::new();
        for &lambda_e in &spec.lambda_e {
            let params = spec.base.with_lambda_j(lambda_j)?.with_lambda_e(lambda_e)?;
            let closed = path_sop(&path, &params)?.probability();
            let est = estimate_path_sop(&simulate(spec, &path, row)?, &params)?;
            let diff = (est.estimate - closed).abs();
            // the closed form is an upper bound
            let pass = est.estimate <= closed + 2.0 * est.std_error;
            write_validation_row(
                &mut out,
                &[num(lambda_e), num(lambda_j)],
                spec,
                &est,
                closed,
                diff,
                pass,
            );
            curve.push((lambda_e, closed));
            row += 1;
        }
        curves.push((lambda_j, curve));
    }
    let mut ordered: Vec<(f64, Vec<f64>)> = curves
        .into_iter()
        .map(|(lj, mut c)| (lj, sorted_by_key(&mut c)))
        .collect();
    for (_, c) in &ordered {
        let nonzero: Vec<f64> = c.iter().copied().filter(|v| *v > 0.0).collect();
        check_shape(
            strictly(&nonzero, true),
            "SOP must grow with eavesdropper density",
        )?;
    }
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in ordered.windows(2) {
        let below = w[1]
            .1
            .iter()
            .zip(&w[0].1)
            .all(|(hi_j, lo_j)| hi_j < lo_j || *lo_j == 0.0);
        check_shape(below, "denser jammers must lower the SOP curve")?;
    }
    Ok(out)
}

pub fn run_tradeoff_curve(spec: &ExperimentSpec) -> Result<String> {
    non_empty("powers", &spec.powers)?;
    non_empty("link_distance", &spec.link_distances)?;
    if !(spec.anchor_sop > 0.0 && spec.anchor_sop < 1.0) {
        return Err(Error::param(
            "anchor_sop",
            format!("must lie in (0, 1), got {}", spec.anchor_sop),
        ));
    }
    let params = &spec.base;
    let mut powers = spec.powers.clone();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    if powers[0] < 0.0 {
        return Err(Error::param("powers", "powers must be non-negative"));
    }
    let k = spec.hops;
    let mut out = String::from("d,hops,power,cop,sop,point\n");
    for &d in &spec.link_distances {
        let (mut cops, mut sops) = (Vec::new(), Vec::new());
        for &p in &powers {
            let (cop, sop) = if p == 0.0 {
                (1.0, 0.0)
            } else {
                let path = PathSpec::uniform(k, d, p)?;
                (
                    path_cop(&path, params)?.probability(),
                    path_sop(&path, params)?.probability(),
                )
            };
            writeln!(
                out,
                "{},{},{},{},{},grid",
                num(d),
                k,
                num(p),
                num(cop),
                num(sop)
            )
            .unwrap();
            cops.push(cop);
            sops.push(sop);
        }
        // COP saturates at 1 for tiny powers, so compare only where it moves
        let moving: Vec<f64> = cops.iter().copied().filter(|c| *c < 1.0).collect();
        check_shape(strictly(&moving, false), "COP must fall as power grows")?;
        let leaking: Vec<f64> = sops.iter().copied().filter(|s| *s > 0.0).collect();
        check_shape(strictly(&leaking, true), "SOP must grow with power")?;

        // power at which the path SOP equals the anchor, by exact inversion
        let b = b_so(params);
        if b > 0.0 {
            let weight = -(-spec.anchor_sop).ln_1p() / (k as f64 * b);
            let p = weight.powf(params.alpha() / 2.0);
            let path = PathSpec::uniform(k, d, p)?;
            let cop = path_cop(&path, params)?.probability();
            let sop = path_sop(&path, params)?.probability();
            writeln!(
                out,
                "{},{},{},{},{},sop-anchor",
                num(d),
                k,
                num(p),
                num(cop),
                num(sop)
            )
            .unwrap();
        }
    }
    Ok(out)
}

pub fn run_optimal_tradeoff(spec: &ExperimentSpec) -> Result<String> {
    non_empty("betas", &spec.betas)?;
    non_empty("lambda_e", &spec.lambda_e)?;
    non_empty("lambda_j", &spec.lambda_j)?;
    let d = *spec
        .link_distances
        .first()
        .ok_or_else(|| Error::param("link_distance", "missing"))?;
    let path = PathSpec::uniform(spec.hops, d, 1.0)?;
    let mut betas = spec.betas.clone();
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    let base = SystemParams::default()
        .with_gamma_c(spec.base.gamma_c())?
        .with_gamma_e(spec.base.gamma_e())?
        .with_p_jam(spec.base.p_jam())?
        .with_alpha(spec.base.alpha())?;
    let mut out = String::from("panel,beta,lambda_j,lambda_e,value\n");

    let mut optimum_curves = Vec::new();
    for &lambda_e in &spec.lambda_e {
        let params = base.with_lambda_e(lambda_e)?;
        let mut values = Vec::new();
        for &beta in &betas {
            let v = optimal_outage(path.total_length(), &params, beta);
            writeln!(
                out,
                "optimal-value,{},{},{},{}",
                num(beta),
                num(params.lambda_j()),
                num(lambda_e),
                num(v)
            )
            .unwrap();
            values.push(v);
        }
        check_shape(
            strictly(&values, false),
            "optimal outage must fall as the budget grows",
        )?;
        optimum_curves.push((lambda_e, values));
    }
    optimum_curves.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in optimum_curves.windows(2) {
        let above = w[1].1.iter().zip(&w[0].1).all(|(hi, lo)| hi > lo);
        check_shape(above, "more eavesdroppers must raise the optimal outage")?;
    }

    for &lambda_e in &spec.lambda_e {
        let params = base.with_lambda_e(lambda_e)?;
        let mut powers = Vec::new();
        for &beta in &betas {
            let p = solve_so_cop(&path, &params, beta)?.powers[0];
            writeln!(
                out,
                "so-cop-power,{},{},{},{}",
                num(beta),
                num(params.lambda_j()),
                num(lambda_e),
                num(p)
            )
            .unwrap();
            powers.push(p);
        }
        check_shape(
            strictly(&powers, true),
            "SO-COP power must grow with the secrecy budget",
        )?;
    }

    for &lambda_j in &spec.lambda_j {
        let params = base.with_lambda_j(lambda_j)?;
        let mut powers = Vec::new();
        for &beta in &betas {
            let p = solve_qo_sop(&path, &params, beta)?.powers[0];
            writeln!(
                out,
                "qo-sop-power,{},{},{},{}",
                num(beta),
                num(lambda_j),
                num(params.lambda_e()),
                num(p)
            )
            .unwrap();
            powers.push(p);
        }
        check_shape(
            strictly(&powers, false),
            "QO-SOP power must fall as the connection budget grows",
        )?;
    }
    Ok(out)
}

/// Hop distances and default budget of a named fixture.
pub fn fixture(name: &str) -> Result<(Vec<f64>, f64)> {
    match name {
        "table1" => Ok((TABLE_ONE_DISTANCES.to_vec(), 0.5)),
        "table2" => Ok((TABLE_TWO_DISTANCES.to_vec(), 0.4)),
        other => Err(Error::param(
            "fixture",
            format!("unknown fixture {other:?}; expected table1 or table2"),
        )),
    }
}

pub fn run_table_fixture(spec: &ExperimentSpec) -> Result<String> {
    let (name, distances, default_beta) = match (&spec.distances, &spec.fixture) {
        (Some(d), _) => ("custom".to_string(), d.clone(), 0.5),
        (None, Some(name)) => {
            let (d, beta) = fixture(name)?;
            (name.clone(), d, beta)
        }
        (None, None) => {
            return Err(Error::param(
                "fixture",
                "name a fixture (table1, table2) or give --distances",
            ))
        }
    };
    let path = PathSpec::from_distances(&distances)?;
    let so = solve_so_cop(&path, &spec.base, spec.beta_so.unwrap_or(default_beta))?;
    let qo = solve_qo_sop(&path, &spec.base, spec.beta_co.unwrap_or(default_beta))?;
    let mut out =
        String::from("fixture,hop,distance,power_so_cop,power_qo_sop,optimal_cop,optimal_sop\n");
    for (k, d) in distances.iter().enumerate() {
        writeln!(
            out,
            "{name},{},{},{},{},{},{}",
            k + 1,
            num(*d),
            num(so.powers[k]),
            num(qo.powers[k]),
            num(so.achieved_cop),
            num(qo.achieved_sop)
        )
        .unwrap();
    }
    Ok(out)
}

fn route_rows(out: &mut String, name: &str, r: &RouteResult) {
    for (k, w) in r.nodes.windows(2).enumerate() {
        writeln!(
            out,
            "{name},hop,{},{},{},{},{},,ok",
            k + 1,
            w[0],
            w[1],
            num(r.distances[k]),
            num(r.allocation.powers[k])
        )
        .unwrap();
    }
    writeln!(
        out,
        "{name},summary,{},{},{},{},,{},ok",
        r.distances.len(),
        r.nodes[0],
        r.nodes[r.nodes.len() - 1],
        num(r.total_length),
        num(r.achieved)
    )
    .unwrap();
}

pub fn run_route_demo(spec: &ExperimentSpec) -> Result<RunOutput> {
    let scenario = match &spec.scenario {
        Some(s) => s.clone(),
        None => generate_scenario(
            &spec.base,
            Region::new(spec.width, spec.height)?,
            spec.nodes,
            spec.require_seed()?,
        )?,
    };
    let beta_so = spec.beta_so.unwrap_or(0.4);
    let beta_co = spec.beta_co.unwrap_or(0.4);
    let graph = build_graph(&scenario, spec.max_range)?;
    let (src, dst) = default_endpoints(&scenario, &graph)?;
    let mut out = String::from("algorithm,row,hop,from_id,to_id,distance,power,achieved,status\n");
    let so = route_between(
        &graph,
        src,
        dst,
        &spec.base,
        Objective::MinimizeCop,
        beta_so,
    );
    let qo = route_between(
        &graph,
        src,
        dst,
        &spec.base,
        Objective::MinimizeSop,
        beta_co,
    );
    let unreachable = match (so, qo) {
        (Ok(so), Ok(qo)) => {
            if so.nodes != qo.nodes {
                return Err(Error::CrossCheck(
                    "the two routing problems chose different paths".into(),
                ));
            }
            for (r, beta) in [(&so, beta_so), (&qo, beta_co)] {
                let expected = optimal_outage(path_length(&r.distances), &spec.base, beta);
                if (expected - r.achieved).abs() > 1e-9 {
                    return Err(Error::CrossCheck(format!(
                        "route optimum {} disagrees with {expected}",
                        r.achieved
                    )));
                }
            }
            route_rows(&mut out, "so-cop", &so);
            route_rows(&mut out, "qo-sop", &qo);
            false
        }
        (Err(Error::Unreachable { .. }), _) | (_, Err(Error::Unreachable { .. })) => {
            for name in ["so-cop", "qo-sop"] {
                writeln!(out, "{name},summary,0,{src},{dst},,,,unreachable").unwrap();
            }
            true
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(RunOutput {
        csv: out,
        scenario: Some(scenario.to_text()),
        unreachable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(csv: &str) -> Vec<Vec<String>> {
        csv.lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    }

    fn field(v: &str) -> f64 {
        v.parse().unwrap()
    }

    #[test]
    fn randomized_kinds_need_a_seed() {
        for kind in [
            ExperimentKind::ValidateCop,
            ExperimentKind::ValidateSop,
            ExperimentKind::RouteDemo,
        ] {
            assert!(matches!(
                run(&ExperimentSpec::new(kind)),
                Err(Error::InvalidParam { field: "seed", .. })
            ));
        }
    }

    #[test]
    fn empty_grid_is_rejected() {
        let mut spec = ExperimentSpec::new(ExperimentKind::ValidateCop);
        spec.seed = Some(1);
        spec.lambda_j.clear();
        assert!(run_validate_cop(&spec).is_err());
    }

    #[test]
    fn validate_cop_rows() {
        let mut spec = ExperimentSpec::new(ExperimentKind::ValidateCop);
        spec.seed = Some(3);
        spec.rounds = 2_000;
        let csv = run_validate_cop(&spec).unwrap();
        let r = rows(&csv);
        assert_eq!(r.len(), 9);
        let row = r
            .iter()
            .find(|r| field(&r[0]) == 1e-3 && field(&r[1]) == 3.0)
            .unwrap();
        assert!((field(&row[8]) - 0.1991).abs() < 1e-4);
    }

    #[test]
    fn validate_sop_closed_forms() {
        let mut spec = ExperimentSpec::new(ExperimentKind::ValidateSop);
        spec.seed = Some(3);
        spec.rounds = 500;
        spec.lambda_e = vec![0.0, 1e-3];
        let r = rows(&run_validate_sop(&spec).unwrap());
        let zero = r.iter().find(|r| field(&r[0]) == 0.0).unwrap();
        assert_eq!(field(&zero[6]), 0.0);
        assert_eq!(field(&zero[8]), 0.0);
        let dense = r
            .iter()
            .find(|r| field(&r[0]) == 1e-3 && field(&r[1]) == 1e-3)
            .unwrap();
        assert!((field(&dense[8]) - 0.9585).abs() < 1e-4);
    }

    #[test]
    fn tradeoff_curve_anchor_and_zero_power() {
        let csv = run_tradeoff_curve(&ExperimentSpec::new(ExperimentKind::TradeoffCurve)).unwrap();
        let r = rows(&csv);
        assert_eq!(r.len(), 3 * 12);
        for (d, want) in [(3.0, 0.64), (4.0, 0.83), (5.0, 0.94)] {
            let anchor = r
                .iter()
                .find(|r| field(&r[0]) == d && r[5] == "sop-anchor")
                .unwrap();
            assert!((field(&anchor[4]) - 0.5).abs() < 1e-12);
            assert!((field(&anchor[3]) - want).abs() < 0.01);
            let zero = r
                .iter()
                .find(|r| field(&r[0]) == d && field(&r[2]) == 0.0)
                .unwrap();
            assert_eq!((field(&zero[3]), field(&zero[4])), (1.0, 0.0));
        }
    }

    #[test]
    fn optimal_tradeoff_panels() {
        let r = rows(
            &run_optimal_tradeoff(&ExperimentSpec::new(ExperimentKind::OptimalTradeoff)).unwrap(),
        );
        assert_eq!(r.len(), 19 * 6);
        for panel in ["optimal-value", "so-cop-power", "qo-sop-power"] {
            assert_eq!(r.iter().filter(|r| r[0] == panel).count(), 38);
        }
    }

    #[test]
    fn table_fixtures() {
        let mut spec = ExperimentSpec::new(ExperimentKind::TableFixture);
        spec.fixture = Some("table2".into());
        let r = rows(&run_table_fixture(&spec).unwrap());
        let so: Vec<f64> = r.iter().map(|r| field(&r[3])).collect();
        for (got, want) in so.iter().zip([3.7608, 1.8617, 3.0721, 1.9444, 2.4748]) {
            assert!((got - want).abs() <= 5e-4);
        }
        assert!((field(&r[0][5]) - 0.3681).abs() <= 5e-4);

        spec.fixture = Some("table1".into());
        let r = rows(&run_table_fixture(&spec).unwrap());
        let qo: Vec<f64> = r.iter().map(|r| field(&r[4])).collect();
        for (got, want) in qo.iter().zip([0.5708, 2.7314, 2.7097, 0.8754, 1.6699]) {
            assert!((got - want).abs() <= 5e-4);
        }

        spec.fixture = Some("table3".into());
        assert!(matches!(
            run_table_fixture(&spec),
            Err(Error::InvalidParam {
                field: "fixture",
                ..
            })
        ));
    }

    #[test]
    fn route_demo_replays() {
        let mut spec = ExperimentSpec::new(ExperimentKind::RouteDemo);
        spec.seed = Some(11);
        let first = run_route_demo(&spec).unwrap();
        let scenario = Scenario::from_text(first.scenario.as_deref().unwrap()).unwrap();
        spec.seed = None;
        spec.scenario = Some(scenario);
        let replay = run_route_demo(&spec).unwrap();
        assert_eq!(first, replay);
    }

    #[test]
    fn route_demo_reports_unreachable() {
        let mut spec = ExperimentSpec::new(ExperimentKind::RouteDemo);
        spec.seed = Some(2);
        spec.max_range = 0.5;
        let out = run_route_demo(&spec).unwrap();
        assert!(out.unreachable);
        assert!(out.csv.lines().skip(1).all(|l| l.ends_with("unreachable")));
    }
}
