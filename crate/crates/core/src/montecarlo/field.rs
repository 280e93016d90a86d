//! Lazily realised jammer field.
//!
//! The simulation window is cut into concentric regions around a centre: a
//! sequence of annuli up to the largest disc that fits in the window, and the
//! remainder of the window. For every region the number of jammers is drawn
//! up front. Everything else is drawn only when a decision needs it:
//!
//! * For an interference probe at some point, the sum of the Exp(1) fading
//!   gains over the jammers of a region is a Gamma(N, 1) variate. Together
//!   with the minimum and maximum possible distance between the probe and
//!   the region it brackets that region's contribution.
//! * When the brackets cannot decide a threshold comparison, the region's
//!   positions are drawn (shared by all probes of the field) and the Gamma
//!   sum is split over the individual jammers with normalised exponentials,
//!   which is exactly a Dirichlet(1, ..., 1) split.
//!
//! A comparison therefore has the same outcome as summing the full
//! realisation, but usually costs a handful of draws instead of thousands.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::geometry::{poisson_count, Point, Region};
use crate::rng::StreamKey;

const COUNTS: u64 = 1;
const POSITIONS: u64 = 2;
const SUM: u64 = 3;
const SPLIT: u64 = 4;

/// `d^-alpha` from a squared distance.
#[inline]
pub(crate) fn path_gain(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-0.5 * alpha)
    }
}

/// Gamma(n, scale) with the convention that a sum over zero terms is zero.
pub(crate) fn gamma_sum<R: Rng + ?Sized>(n: u64, scale: f64, rng: &mut R) -> f64 {
    if n == 0 {
        return 0.0;
    }
    Gamma::new(n as f64, scale)
        .expect("positive gamma shape")
        .sample(rng)
}

/// Concentric regions around `center` covering a rectangular window.
#[derive(Debug, Clone)]
pub(crate) struct RingLayout {
    center: Point,
    window: Region,
    /// `radii[0] = 0 < ... < radii[m]`, the last one being the distance from
    /// the centre to the nearest window edge. Region `s < m` is the annulus
    /// `[radii[s], radii[s+1])`; region `m` is the rest of the window.
    radii: Vec<f64>,
    far: f64,
}

impl RingLayout {
    /// `first` is the outer radius of the innermost disc; following radii
    /// grow geometrically by `ratio`.
    pub(crate) fn new(center: Point, window: Region, first: f64, ratio: f64) -> Self {
        assert!(ratio > 1.0 && first > 0.0);
        let inner = window.edge_distance(center);
        assert!(
            inner > 0.0,
            "layout centre must lie strictly inside the window"
        );
        let mut radii = vec![0.0];
        let mut r = first;
        while r < inner {
            radii.push(r);
            r *= ratio;
        }
        radii.push(inner);
        let far = window
            .corners()
            .iter()
            .map(|c| c.dist(center))
            .fold(0.0, f64::max);
        Self {
            center,
            window,
            radii,
            far,
        }
    }

    /// Layout whose innermost disc holds `per_disc` points on average at `density`.
    pub(crate) fn for_density(
        center: Point,
        window: Region,
        density: f64,
        per_disc: f64,
        ratio: f64,
    ) -> Self {
        let first = if density > 0.0 {
            (per_disc / (std::f64::consts::PI * density)).sqrt()
        } else {
            f64::INFINITY
        };
        let first = first.min(window.edge_distance(center) * 0.999);
        Self::new(center, window, first.max(1e-9), ratio)
    }

    pub(crate) fn regions(&self) -> usize {
        self.radii.len()
    }

    fn outer_index(&self) -> usize {
        self.radii.len() - 1
    }

    pub(crate) fn inner_radius(&self, s: usize) -> f64 {
        self.radii[s]
    }

    /// Outer radius of region `s`; for the window remainder this is the
    /// distance to the farthest corner.
    pub(crate) fn outer_radius(&self, s: usize) -> f64 {
        if s < self.outer_index() {
            self.radii[s + 1]
        } else {
            self.far
        }
    }

    pub(crate) fn area(&self, s: usize) -> f64 {
        use std::f64::consts::PI;
        let a = self.radii[s];
        if s < self.outer_index() {
            let b = self.radii[s + 1];
            PI * (b * b - a * a)
        } else {
            self.window.area() - PI * a * a
        }
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> Point {
        let a = self.radii[s];
        if s < self.outer_index() {
            let b = self.radii[s + 1];
            let r = (a * a + rng.random::<f64>() * (b * b - a * a)).sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            Point::new(
                self.center.x + r * theta.cos(),
                self.center.y + r * theta.sin(),
            )
        } else {
            loop {
                let p = self.window.sample_uniform(rng);
                if p.dist2(self.center) >= a * a {
                    return p;
                }
            }
        }
    }

    #[cfg(test)]
    fn distance_bounds(&self, s: usize, at: Point) -> (f64, f64) {
        self.bounds(s, at.dist(self.center), at)
    }

    /// Bounds on the distance between `at` and any point of region `s`, with
    /// `t` the distance from `at` to the centre.
    fn bounds(&self, s: usize, t: f64, at: Point) -> (f64, f64) {
        let a = self.radii[s];
        if s < self.outer_index() {
            let b = self.radii[s + 1];
            ((a - t).max(t - b).max(0.0), b + t)
        } else {
            let far = self
                .window
                .corners()
                .iter()
                .map(|c| c.dist(at))
                .fold(0.0, f64::max);
            ((a - t).max(0.0), far)
        }
    }

    fn region_at_radius(&self, r: f64) -> usize {
        (self.radii.partition_point(|&b| b <= r) - 1).min(self.outer_index())
    }

    #[cfg(test)]
    fn region_of(&self, p: Point) -> usize {
        self.region_at_radius(p.dist(self.center))
    }

    /// All regions in increasing order of their minimum distance to `at`.
    /// Rings inside and outside the one holding `at` are each already
    /// ordered, so this is a merge.
    fn probe_order(&self, at: Point, out: &mut Vec<usize>) {
        out.clear();
        let t = at.dist(self.center);
        let home = self.region_at_radius(t);
        let last = self.outer_index();
        out.push(home);
        let (mut inward, mut outward) = (home, home + 1);
        loop {
            let take_inward = match (inward > 0, outward <= last) {
                (true, true) => t - self.radii[inward] <= self.radii[outward] - t,
                (true, false) => true,
                (false, true) => false,
                (false, false) => break,
            };
            if take_inward {
                inward -= 1;
                out.push(inward);
            } else {
                out.push(outward);
                outward += 1;
            }
        }
    }
}

/// The fading sum over regions `0..regions` is already fixed for this probe.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Preset {
    pub regions: usize,
    pub fading_sum: f64,
}

struct Pending {
    region: usize,
    sum: f64,
    lo: f64,
    hi: f64,
}

#[derive(Default)]
struct Scratch {
    order: Vec<usize>,
    shares: Vec<f64>,
    pending: Vec<Pending>,
}

/// One realisation of the jammer PPP over a [`RingLayout`].
pub(crate) struct JammerField<'a> {
    layout: &'a RingLayout,
    key: StreamKey,
    counts: Vec<u64>,
    points: Vec<Option<Vec<Point>>>,
    p_jam: f64,
    alpha: f64,
    scratch: Scratch,
}

impl<'a> JammerField<'a> {
    pub(crate) fn new(
        layout: &'a RingLayout,
        density: f64,
        p_jam: f64,
        alpha: f64,
        key: StreamKey,
    ) -> Self {
        let mut rng = key.index(COUNTS).rng();
        let counts = (0..layout.regions())
            .map(|s| poisson_count(density * layout.area(s), &mut rng))
            .collect();
        Self {
            layout,
            key,
            counts,
            points: vec![None; layout.regions()],
            p_jam,
            alpha,
            scratch: Scratch::default(),
        }
    }

    pub(crate) fn count(&self, s: usize) -> u64 {
        self.counts[s]
    }

    fn materialize(&mut self, s: usize) {
        if self.points[s].is_none() {
            let mut rng = self.key.index(POSITIONS).index(s as u64).rng();
            let pts = (0..self.counts[s])
                .map(|_| self.layout.sample(s, &mut rng))
                .collect();
            self.points[s] = Some(pts);
        }
    }

    /// Exact contribution of the jammers of region `s` at `at`, given that
    /// their fading gains toward `at` sum to `sum`.
    fn split_value(&mut self, s: usize, at: Point, sum: f64, probe: StreamKey) -> f64 {
        if sum == 0.0 {
            return 0.0;
        }
        self.materialize(s);
        let mut rng = probe.index(SPLIT).index(s as u64).rng();
        let (mut weights, mut weighted) = (0.0, 0.0);
        for p in self.points[s].as_deref().unwrap() {
            let e: f64 = Exp1.sample(&mut rng);
            weights += e;
            weighted += e * path_gain(p.dist2(at), self.alpha);
        }
        self.p_jam * sum * weighted / weights
    }

    /// Per-region fading sums for the preset regions: a fixed total shared
    /// out in proportion to independent gamma sums, i.e. a Dirichlet split.
    fn preset_shares<R: Rng>(
        &self,
        preset: Option<Preset>,
        rng: &mut R,
        shares: &mut Vec<f64>,
    ) -> usize {
        shares.clear();
        let Some(Preset {
            regions,
            fading_sum,
        }) = preset
        else {
            return 0;
        };
        shares.extend((0..regions).map(|s| gamma_sum(self.counts[s], 1.0, rng)));
        let total: f64 = shares.iter().sum();
        if total > 0.0 {
            shares.iter_mut().for_each(|y| *y *= fading_sum / total);
        }
        regions
    }

    /// Decides whether the aggregate jammer interference received at `at`
    /// strictly exceeds `threshold`. `probe` addresses the fading gains
    /// between this receiving point and the jammers.
    ///
    /// Regions are visited nearest first. Gamma sums come from one stream in
    /// that order, which is fixed by the geometry, so stopping early never
    /// changes the draws seen by later decisions.
    pub(crate) fn interference_exceeds(
        &mut self,
        at: Point,
        threshold: f64,
        probe: StreamKey,
        preset: Option<Preset>,
    ) -> bool {
        let mut sc = std::mem::take(&mut self.scratch);
        let out = self.decide(at, threshold, probe, preset, &mut sc);
        self.scratch = sc;
        out
    }

    fn decide(
        &mut self,
        at: Point,
        threshold: f64,
        probe: StreamKey,
        preset: Option<Preset>,
        sc: &mut Scratch,
    ) -> bool {
        let mut sums = probe.index(SUM).rng();
        let fixed = self.preset_shares(preset, &mut sums, &mut sc.shares);
        self.layout.probe_order(at, &mut sc.order);
        sc.pending.clear();
        let t = at.dist(self.layout.center);

        let (mut exact, mut lower) = (0.0, 0.0);
        for &s in &sc.order {
            if self.counts[s] == 0 {
                continue;
            }
            let sum = if s < fixed {
                sc.shares[s]
            } else {
                gamma_sum(self.counts[s], 1.0, &mut sums)
            };
            let (dmin, dmax) = self.layout.bounds(s, t, at);
            if dmin <= 0.0 {
                let v = self.split_value(s, at, sum, probe);
                exact += v;
                lower += v;
            } else {
                let scale = self.p_jam * sum;
                let lo = scale * path_gain(dmax * dmax, self.alpha);
                let hi = scale * path_gain(dmin * dmin, self.alpha);
                lower += lo;
                sc.pending.push(Pending {
                    region: s,
                    sum,
                    lo,
                    hi,
                });
            }
            if lower > threshold {
                return true;
            }
        }

        loop {
            let upper = exact + sc.pending.iter().map(|p| p.hi).sum::<f64>();
            let lower = exact + sc.pending.iter().map(|p| p.lo).sum::<f64>();
            if lower > threshold {
                return true;
            }
            if upper <= threshold {
                return false;
            }
            // refine the widest bracket
            let widest = sc
                .pending
                .iter()
                .enumerate()
                .max_by(|a, b| (a.1.hi - a.1.lo).total_cmp(&(b.1.hi - b.1.lo)))
                .map(|(i, _)| i)
                .expect("undecided comparison has an open bracket");
            let p = sc.pending.swap_remove(widest);
            exact += self.split_value(p.region, at, p.sum, probe);
        }
    }

    /// The interference at `at` from the same draws as
    /// [`Self::interference_exceeds`], with every region resolved.
    #[cfg(test)]
    fn full_value(&mut self, at: Point, probe: StreamKey, preset: Option<Preset>) -> f64 {
        let mut sums = probe.index(SUM).rng();
        let mut shares = Vec::new();
        let fixed = self.preset_shares(preset, &mut sums, &mut shares);
        let mut order = Vec::new();
        self.layout.probe_order(at, &mut order);
        let mut total = 0.0;
        for s in order {
            if self.counts[s] == 0 {
                continue;
            }
            let sum = if s < fixed {
                shares[s]
            } else {
                gamma_sum(self.counts[s], 1.0, &mut sums)
            };
            total += self.split_value(s, at, sum, probe);
        }
        total
    }
}
