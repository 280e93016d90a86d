//! Monte Carlo estimation of connection and secrecy outage.
//!
//! Every round redraws the jammer and eavesdropper processes and all fading
//! gains independently for each hop. A round is addressed by
//! `(seed, purpose, round, hop)`, so the outage count does not depend on how
//! rounds are split into batches or spread over threads.
//!
//! The hop-level decisions run on a lazily realised field (see the `field`
//! submodule): the comparison `SIR < threshold` is resolved with the smallest
//! number of draws that pins down its outcome, which is identical to what a
//! full realisation over the window would give.

mod field;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{poisson_count, Point, PointSet, Region};
use crate::params::{PathSpec, SystemParams};
use crate::rng::{Purpose, StreamKey};
use field::{gamma_sum, path_gain, JammerField, Preset, RingLayout};

/// Rounds per parallel work item.
const BATCH: u64 = 2048;

// Sub-stream tags inside a hop.
const JAM: u64 = 1;
const SIGNAL: u64 = 2;
const PROBE: u64 = 3;
const SUSPECTS: u64 = 4;
const EAVES: u64 = 5;

// Ring geometry. Connection probes sit at the receiver and settle after a few
// rings, so coarse rings are enough; the eavesdropper thinning is tighter with
// finer rings.
const COP_RING_RATIO: f64 = 1.5;
const SOP_RING_RATIO: f64 = 1.2;

/// A transmitter/receiver pair placed in the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedHop {
    pub tx: Point,
    pub rx: Point,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    rounds: u64,
    region: Region,
    hops: Vec<PlacedHop>,
    seed: u64,
}

impl SimConfig {
    pub fn new(rounds: u64, region: Region, hops: Vec<PlacedHop>, seed: u64) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::param("rounds", "at least one round is required"));
        }
        if hops.is_empty() {
            return Err(Error::InvalidPath("a path needs at least one hop".into()));
        }
        for (k, h) in hops.iter().enumerate() {
            for (end, p) in [("transmitter", h.tx), ("receiver", h.rx)] {
                if region.edge_distance(p) <= 0.0 {
                    return Err(Error::InvalidRegion(format!(
                        "hop {k} {end} ({}, {}) is not strictly inside the window",
                        p.x, p.y
                    )));
                }
            }
            if h.tx == h.rx {
                return Err(Error::InvalidPath(format!(
                    "hop {k} has coincident endpoints"
                )));
            }
            if !(h.power.is_finite() && h.power >= 0.0) {
                return Err(Error::InvalidPath(format!(
                    "hop {k} power {} is invalid",
                    h.power
                )));
            }
        }
        Ok(Self {
            rounds,
            region,
            hops,
            seed,
        })
    }

    /// Places the hops of `path` end to end along a horizontal line through
    /// the window centre, the whole path centred in the window.
    pub fn centered(path: &PathSpec, region: Region, rounds: u64, seed: u64) -> Result<Self> {
        let powers = path.powers()?;
        let c = region.center();
        let mut x = c.x - 0.5 * path.total_length();
        let hops = path
            .distances()
            .into_iter()
            .zip(powers)
            .map(|(d, power)| {
                let hop = PlacedHop {
                    tx: Point::new(x, c.y),
                    rx: Point::new(x + d, c.y),
                    power,
                };
                x += d;
                hop
            })
            .collect();
        Self::new(rounds, region, hops, seed)
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn hops(&self) -> &[PlacedHop] {
        &self.hops
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_rounds(&self, rounds: u64) -> Result<Self> {
        Self::new(rounds, self.region, self.hops.clone(), self.seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub outage_count: u64,
    pub rounds: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl SimEstimate {
    pub fn from_counts(outage_count: u64, rounds: u64) -> Self {
        assert!(rounds > 0 && outage_count <= rounds);
        let p = outage_count as f64 / rounds as f64;
        Self {
            outage_count,
            rounds,
            estimate: p,
            std_error: (p * (1.0 - p) / rounds as f64).sqrt(),
        }
    }
}

/// One SIR realisation of the link `tx -> rx` against the given jammers,
/// with fresh unit-mean exponential fading on every link.
pub fn simulate_link_sir<R: Rng + ?Sized>(
    tx: Point,
    rx: Point,
    p_tx: f64,
    jammers: &PointSet,
    params: &SystemParams,
    rng: &mut R,
) -> Result<f64> {
    if tx == rx {
        return Err(Error::InvalidPath(
            "transmitter and receiver coincide".into(),
        ));
    }
    if jammers.is_empty() {
        return Err(Error::EmptyJammerSet);
    }
    let alpha = params.alpha();
    let h: f64 = Exp1.sample(rng);
    let signal = p_tx * h * path_gain(tx.dist2(rx), alpha);
    let interference: f64 = jammers
        .iter()
        .map(|j| {
            let g: f64 = Exp1.sample(rng);
            params.p_jam() * g * path_gain(j.dist2(rx), alpha)
        })
        .sum();
    Ok(signal / interference)
}

/// Whether any of `eavesdroppers` sees the transmission from `tx` with an
/// SIR above `gamma_e`, for one fading realisation.
pub fn secrecy_outage_given<R: Rng + ?Sized>(
    tx: Point,
    p_tx: f64,
    jammers: &PointSet,
    eavesdroppers: &PointSet,
    params: &SystemParams,
    rng: &mut R,
) -> Result<bool> {
    let mut leaked = false;
    for e in eavesdroppers.iter() {
        // draw every link so the stream position does not depend on the outcome
        leaked |= simulate_link_sir(tx, *e, p_tx, jammers, params, rng)? > params.gamma_e();
    }
    Ok(leaked)
}

fn count_rounds<F>(rounds: u64, outage: F) -> u64
where
    F: Fn(u64) -> bool + Sync,
{
    let batches = rounds.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let end = ((b + 1) * BATCH).min(rounds);
            (b * BATCH..end).filter(|&r| outage(r)).count() as u64
        })
        .sum()
}

fn hop_connection_outage(
    layout: &RingLayout,
    hop: &PlacedHop,
    params: &SystemParams,
    key: StreamKey,
) -> bool {
    if params.gamma_c() == 0.0 {
        return false;
    }
    let h: f64 = Exp1.sample(&mut key.index(SIGNAL).rng());
    let signal = hop.power * h * path_gain(hop.tx.dist2(hop.rx), params.alpha());
    let mut field = JammerField::new(
        layout,
        params.lambda_j(),
        params.p_jam(),
        params.alpha(),
        key.index(JAM),
    );
    field.interference_exceeds(hop.rx, signal / params.gamma_c(), key.index(PROBE), None)
}

/// Eavesdropper thinning for one placed hop.
///
/// An eavesdropper can only beat the threshold if its direct-link fading
/// exceeds `c * G`, where `G` is its fading sum from the jammers of some disc
/// around the transmitter and `c` follows from the worst-case geometry of its
/// ring. That happens with probability `(1 + c)^-n`, so the eavesdroppers of
/// each ring are thinned to those "suspects" and only the suspects are drawn,
/// with `(h, G)` from their conditional law, and checked exactly.
struct SecrecyPlan {
    layout: RingLayout,
    /// Per eavesdropper ring: candidate discs `(k, c, ln(1 + c))`, largest first.
    discs: Vec<Vec<(usize, f64, f64)>>,
    /// Mean eavesdropper count per ring.
    eaves_mean: Vec<f64>,
}

impl SecrecyPlan {
    fn new(hop: &PlacedHop, region: Region, params: &SystemParams) -> Self {
        let layout =
            RingLayout::for_density(hop.tx, region, params.lambda_j(), 1.0, SOP_RING_RATIO);
        let regions = layout.regions();
        let ratio = params.gamma_e() * params.p_jam() / hop.power;
        let discs = (0..regions)
            .map(|e| {
                let a = layout.inner_radius(e);
                let b = layout.outer_radius(e);
                if a == 0.0 {
                    return Vec::new();
                }
                // the best disc radius is comparable to the ring radius
                (e.saturating_sub(3).max(1)..regions.min(e + 3))
                    .rev()
                    .map(|k| {
                        let rho = layout.inner_radius(k);
                        let c = ratio * path_gain(((rho + b) / a).powi(2), params.alpha());
                        (k, c, c.ln_1p())
                    })
                    .collect()
            })
            .collect();
        let eaves_mean = (0..regions)
            .map(|e| params.lambda_e() * layout.area(e))
            .collect();
        Self {
            layout,
            discs,
            eaves_mean,
        }
    }
}

fn hop_secrecy_outage(
    plan: &SecrecyPlan,
    hop: &PlacedHop,
    params: &SystemParams,
    key: StreamKey,
) -> bool {
    if params.lambda_e() == 0.0 || hop.power == 0.0 {
        return false;
    }
    let layout = &plan.layout;
    let alpha = params.alpha();
    let mut field = JammerField::new(
        layout,
        params.lambda_j(),
        params.p_jam(),
        alpha,
        key.index(JAM),
    );
    let regions = layout.regions();
    let mut below = vec![0u64; regions];
    for s in 1..regions {
        below[s] = below[s - 1] + field.count(s - 1);
    }

    let mut suspect_counts = key.index(SUSPECTS).rng();
    for e in 0..regions {
        // choose the disc giving the strongest thinning
        let (mut disc, mut c, mut score) = (0usize, 0.0, 0.0);
        for &(k, ck, log_ck) in &plan.discs[e] {
            let sk = below[k] as f64 * log_ck;
            if sk > score {
                (disc, c, score) = (k, ck, sk);
            }
            if score > 64.0 {
                break;
            }
        }
        let suspects = poisson_count(plan.eaves_mean[e] * (-score).exp(), &mut suspect_counts);
        for i in 0..suspects {
            let sk = key.index(EAVES).index(e as u64).index(i);
            let mut rng = sk.rng();
            let pos = layout.sample(e, &mut rng);
            let g = gamma_sum(below[disc], 1.0 / (1.0 + c), &mut rng);
            let x: f64 = Exp1.sample(&mut rng);
            let h = c * g + x;
            let signal = hop.power * h * path_gain(pos.dist2(hop.tx), alpha);
            let preset = Preset {
                regions: disc,
                fading_sum: g,
            };
            if !field.interference_exceeds(
                pos,
                signal / params.gamma_e(),
                sk.index(PROBE),
                Some(preset),
            ) {
                return true;
            }
        }
    }
    false
}

/// Path connection outage: a round fails if any hop's SIR falls below `gamma_c`.
pub fn estimate_path_cop(cfg: &SimConfig, params: &SystemParams) -> Result<SimEstimate> {
    let layouts: Vec<RingLayout> = cfg
        .hops
        .iter()
        .map(|h| RingLayout::for_density(h.rx, cfg.region, params.lambda_j(), 1.0, COP_RING_RATIO))
        .collect();
    let key = StreamKey::new(cfg.seed).purpose(Purpose::ConnectionSim);
    let count = count_rounds(cfg.rounds, |r| {
        let rk = key.index(r);
        cfg.hops
            .iter()
            .zip(&layouts)
            .enumerate()
            .any(|(k, (hop, layout))| {
                hop_connection_outage(layout, hop, params, rk.index(k as u64))
            })
    });
    Ok(SimEstimate::from_counts(count, cfg.rounds))
}

/// Path secrecy outage: a round fails if any eavesdropper sees any hop with
/// SIR above `gamma_e`. Hops are not combined. With no eavesdroppers the
/// estimate is exactly zero.
pub fn estimate_path_sop(cfg: &SimConfig, params: &SystemParams) -> Result<SimEstimate> {
    if params.lambda_e() == 0.0 {
        return Ok(SimEstimate::from_counts(0, cfg.rounds));
    }
    let plans: Vec<SecrecyPlan> = cfg
        .hops
        .iter()
        .map(|h| SecrecyPlan::new(h, cfg.region, params))
        .collect();
    let key = StreamKey::new(cfg.seed).purpose(Purpose::SecrecySim);
    let count = count_rounds(cfg.rounds, |r| {
        let rk = key.index(r);
        cfg.hops
            .iter()
            .zip(&plans)
            .enumerate()
            .any(|(k, (hop, plan))| hop_secrecy_outage(plan, hop, params, rk.index(k as u64)))
    });
    Ok(SimEstimate::from_counts(count, cfg.rounds))
}
