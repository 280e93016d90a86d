//! Homogeneous Poisson point processes, Rayleigh fading draws and sampled
//! network scenarios.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rng::{Purpose, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Axis-aligned rectangle `[0, width] x [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    width: f64,
    height: f64,
}

impl Region {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
            return Err(Error::InvalidRegion(format!(
                "width and height must be positive, got {width} x {height}"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(0.0, 0.0),
            Point::new(self.width, 0.0),
            Point::new(0.0, self.height),
            Point::new(self.width, self.height),
        ]
    }

    /// Distance from `p` (assumed inside) to the nearest edge.
    pub fn edge_distance(&self, p: Point) -> f64 {
        p.x.min(self.width - p.x).min(p.y).min(self.height - p.y)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            rng.random::<f64>() * self.width,
            rng.random::<f64>() * self.height,
        )
    }
}

/// Points belonging to one region.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    /// Keeps each point independently with probability `keep`.
    pub fn thin<R: Rng + ?Sized>(&self, keep: f64, rng: &mut R) -> PointSet {
        PointSet::new(
            self.points
                .iter()
                .copied()
                .filter(|_| rng.random::<f64>() < keep)
                .collect(),
        )
    }
}

/// Draws a Poisson count with the given mean; a zero mean yields zero.
pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(mean)
        .expect("finite positive Poisson mean")
        .sample(rng);
    n as u64
}

/// Samples a homogeneous PPP of `density` points per unit area over `region`.
///
/// # Panics
///
/// If `density` is negative or not finite.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, region: &Region, rng: &mut R) -> PointSet {
    assert!(
        density.is_finite() && density >= 0.0,
        "density must be non-negative"
    );
    let n = poisson_count(density * region.area(), rng);
    PointSet::new((0..n).map(|_| region.sample_uniform(rng)).collect())
}

/// One Rayleigh power gain `|h|^2`, i.e. an Exp(1) variate.
#[inline]
pub fn sample_rayleigh_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Sampled legitimate nodes, jammers and eavesdroppers in a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub region: Region,
    pub legit_nodes: PointSet,
    pub jammers: PointSet,
    pub eavesdroppers: PointSet,
    pub seed: u64,
}

/// `n_legit` uniform legitimate nodes plus jammer and eavesdropper PPPs, all
/// derived from `seed`.
pub fn generate_scenario(
    params: &SystemParams,
    region: Region,
    n_legit: usize,
    seed: u64,
) -> Result<Scenario> {
    if n_legit < 2 {
        return Err(Error::param(
            "n_legit",
            format!("need at least 2 legitimate nodes, got {n_legit}"),
        ));
    }
    let key = StreamKey::new(seed);
    let mut rng = key.purpose(Purpose::LegitNodes).rng();
    let legit = (0..n_legit)
        .map(|_| region.sample_uniform(&mut rng))
        .collect();
    let jammers = sample_ppp(
        params.lambda_j(),
        &region,
        &mut key.purpose(Purpose::Jammers).rng(),
    );
    let eavesdroppers = sample_ppp(
        params.lambda_e(),
        &region,
        &mut key.purpose(Purpose::Eavesdroppers).rng(),
    );
    Ok(Scenario {
        region,
        legit_nodes: PointSet::new(legit),
        jammers,
        eavesdroppers,
        seed,
    })
}

impl Scenario {
    /// Line-oriented text form:
    ///
    /// ```text
    /// region <w> <h>
    /// seed <n>
    /// legit <x> <y>
    /// jammer <x> <y>
    /// eaves <x> <y>
    /// ```
    ///
    /// Coordinates use the shortest decimal form that round-trips, so
    /// [`Scenario::from_text`] restores the exact values.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "region {} {}", self.region.width, self.region.height).unwrap();
        writeln!(out, "seed {}", self.seed).unwrap();
        for (tag, set) in [
            ("legit", &self.legit_nodes),
            ("jammer", &self.jammers),
            ("eaves", &self.eavesdroppers),
        ] {
            for p in set.iter() {
                writeln!(out, "{tag} {} {}", p.x, p.y).unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut region = None;
        let mut seed = None;
        let (mut legit, mut jammers, mut eaves) = (Vec::new(), Vec::new(), Vec::new());

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| err(format!("bad number {s:?}: {e}")))
            };
            match fields.as_slice() {
                ["region", w, h] => {
                    region = Some(Region::new(num(w)?, num(h)?).map_err(|e| err(e.to_string()))?)
                }
                ["seed", n] => {
                    seed = Some(
                        n.parse::<u64>()
                            .map_err(|e| err(format!("bad seed {n:?}: {e}")))?,
                    )
                }
                [tag @ ("legit" | "jammer" | "eaves"), x, y] => {
                    let p = Point::new(num(x)?, num(y)?);
                    match *tag {
                        "legit" => legit.push(p),
                        "jammer" => jammers.push(p),
                        _ => eaves.push(p),
                    }
                }
                _ => return Err(err(format!("unrecognised line {line:?}"))),
            }
        }

        let region = region.ok_or(Error::Parse {
            line: 0,
            message: "missing `region` header".into(),
        })?;
        let seed = seed.ok_or(Error::Parse {
            line: 0,
            message: "missing `seed` header".into(),
        })?;
        if let Some(p) = legit
            .iter()
            .chain(&jammers)
            .chain(&eaves)
            .find(|p| !region.contains(**p))
        {
            return Err(Error::Parse {
                line: 0,
                message: format!("point ({}, {}) lies outside the region", p.x, p.y),
            });
        }
        Ok(Scenario {
            region,
            legit_nodes: PointSet::new(legit),
            jammers: PointSet::new(jammers),
            eavesdroppers: PointSet::new(eaves),
            seed,
        })
    }
}
