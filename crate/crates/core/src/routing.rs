//! Shortest-path routing over legitimate nodes followed by optimal power
//! allocation on the chosen path.
//!
//! Both optimal outage values grow with the total path length and with
//! nothing else about the route, so the best route for either problem is the
//! shortest path in the unit-disk graph weighted by Euclidean distance. The
//! shortest path is computed by synchronous distance-vector relaxation: in
//! each round every node recomputes its distance to the destination from its
//! neighbours' previous estimates only.

use crate::error::{Error, Result};
use crate::geometry::{Point, Scenario};
use crate::params::{PathSpec, SystemParams};
use crate::tradeoff::{solve_qo_sop, solve_so_cop, Objective, PowerAllocation};

/// Undirected graph joining nodes no farther apart than `max_range`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGraph {
    positions: Vec<Point>,
    /// Neighbour lists sorted by node id.
    adjacency: Vec<Vec<(usize, f64)>>,
    max_range: f64,
}

impl LinkGraph {
    /// Edge `(u, v)` exists iff `0 < |u - v| <= max_range`.
    pub fn from_points(positions: &[Point], max_range: f64) -> Result<Self> {
        if !(max_range.is_finite() && max_range > 0.0) {
            return Err(Error::param(
                "max_range",
                format!("must be positive and finite, got {max_range}"),
            ));
        }
        let n = positions.len();
        let mut adjacency = vec![Vec::new(); n];
        for u in 0..n {
            for v in u + 1..n {
                let d = positions[u].dist(positions[v]);
                if d > 0.0 && d <= max_range {
                    adjacency[u].push((v, d));
                    adjacency[v].push((u, d));
                }
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Ok(Self {
            positions: positions.to_vec(),
            adjacency,
            max_range,
        })
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, id: usize) -> Point {
        self.positions[id]
    }

    pub fn max_range(&self) -> f64 {
        self.max_range
    }

    /// `(neighbour, distance)` pairs in increasing id order.
    pub fn neighbors(&self, id: usize) -> &[(usize, f64)] {
        &self.adjacency[id]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adjacency[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, d)| d)
    }

    /// Each undirected edge once, as `(u, v, distance)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |(v, _)| *v > u)
                .map(move |&(v, d)| (u, v, d))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Node closest to `target`, lowest id on ties.
    pub fn closest_to(&self, target: Point) -> Option<usize> {
        (0..self.node_count()).min_by(|&a, &b| {
            self.positions[a]
                .dist2(target)
                .total_cmp(&self.positions[b].dist2(target))
                .then(a.cmp(&b))
        })
    }
}

/// Graph over the legitimate nodes of `scenario`; node ids are their indices.
pub fn build_graph(scenario: &Scenario, max_range: f64) -> Result<LinkGraph> {
    LinkGraph::from_points(scenario.legit_nodes.points(), max_range)
}

/// Length of a path given its hop distances, summed from the destination
/// backwards, the same association the relaxation uses.
pub fn path_length(distances: &[f64]) -> f64 {
    distances.iter().rev().fold(0.0, |acc, d| d + acc)
}

/// Distances to `dst` after relaxation, plus the number of rounds it took
/// to reach the fixed point.
pub fn distance_vector(graph: &LinkGraph, dst: usize) -> (Vec<f64>, usize) {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    dist[dst] = 0.0;
    let mut rounds = 0;
    for _ in 1..n.max(2) {
        let next: Vec<f64> = (0..n)
            .map(|v| {
                if v == dst {
                    return 0.0;
                }
                graph.adjacency[v]
                    .iter()
                    .map(|&(u, w)| w + dist[u])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        if next == dist {
            break;
        }
        dist = next;
        rounds += 1;
    }
    (dist, rounds)
}

/// Shortest `src -> dst` node sequence. Among equally long paths the
/// lexicographically smallest id sequence wins.
pub fn shortest_path(graph: &LinkGraph, src: usize, dst: usize) -> Result<Vec<usize>> {
    let n = graph.node_count();
    if src >= n || dst >= n {
        return Err(Error::param(
            "node",
            format!("ids {src}, {dst} must be below {n}"),
        ));
    }
    if src == dst {
        return Err(Error::InvalidPath("source and destination coincide".into()));
    }
    let (dist, _) = distance_vector(graph, dst);
    if dist[src].is_infinite() {
        return Err(Error::Unreachable { src, dst });
    }
    let mut route = vec![src];
    let mut visited = vec![false; n];
    visited[src] = true;
    let mut at = src;
    while at != dst {
        // neighbours are sorted, so the first tight edge has the smallest id
        let next = graph.adjacency[at]
            .iter()
            .find(|&&(u, w)| !visited[u] && w + dist[u] == dist[at])
            .map(|&(u, _)| u)
            .expect("a relaxed distance is attained by some neighbour");
        visited[next] = true;
        route.push(next);
        at = next;
    }
    Ok(route)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub nodes: Vec<usize>,
    pub distances: Vec<f64>,
    pub total_length: f64,
    pub allocation: PowerAllocation,
    /// The optimised outage value on this route.
    pub achieved: f64,
}

/// Default endpoints: the nodes closest to the lower-left and upper-right
/// corners of the scenario region.
pub fn default_endpoints(scenario: &Scenario, graph: &LinkGraph) -> Result<(usize, usize)> {
    let src = graph.closest_to(Point::new(0.0, 0.0));
    let dst = graph.closest_to(Point::new(
        scenario.region.width(),
        scenario.region.height(),
    ));
    match (src, dst) {
        (Some(s), Some(d)) if s != d => Ok((s, d)),
        _ => Err(Error::InvalidPath(
            "need two distinct corner nodes to pick a source and a destination".into(),
        )),
    }
}

/// Shortest path between the given endpoints, then optimal powers on it.
pub fn route_between(
    graph: &LinkGraph,
    src: usize,
    dst: usize,
    params: &SystemParams,
    objective: Objective,
    beta: f64,
) -> Result<RouteResult> {
    let nodes = shortest_path(graph, src, dst)?;
    let distances: Vec<f64> = nodes
        .windows(2)
        .map(|w| graph.weight(w[0], w[1]).expect("route follows graph edges"))
        .collect();
    let path = PathSpec::from_distances(&distances)?;
    let allocation = match objective {
        Objective::MinimizeCop => solve_so_cop(&path, params, beta)?,
        Objective::MinimizeSop => solve_qo_sop(&path, params, beta)?,
    };
    Ok(RouteResult {
        total_length: path_length(&distances),
        achieved: allocation.achieved(),
        nodes,
        distances,
        allocation,
    })
}

/// Minimum-COP route under a secrecy outage budget.
pub fn route_so_cop(
    scenario: &Scenario,
    max_range: f64,
    params: &SystemParams,
    beta_so: f64,
) -> Result<RouteResult> {
    let graph = build_graph(scenario, max_range)?;
    let (src, dst) = default_endpoints(scenario, &graph)?;
    route_between(&graph, src, dst, params, Objective::MinimizeCop, beta_so)
}

/// Minimum-SOP route under a connection outage budget.
pub fn route_qo_sop(
    scenario: &Scenario,
    max_range: f64,
    params: &SystemParams,
    beta_co: f64,
) -> Result<RouteResult> {
    let graph = build_graph(scenario, max_range)?;
    let (src, dst) = default_endpoints(scenario, &graph)?;
    route_between(&graph, src, dst, params, Objective::MinimizeSop, beta_co)
}
