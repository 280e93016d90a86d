//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use adhoc_secrecy::routing::{path_length, LinkGraph};
use adhoc_secrecy::Point;
use rand::Rng;

/// Minimum length over every simple `src -> dst` path, by plain depth-first
/// enumeration, with the node sequence of the first path (in enumeration
/// order, i.e. neighbours by increasing id) that attains it.
pub fn exhaustive_shortest(graph: &LinkGraph, src: usize, dst: usize) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut stack = vec![src];
    let mut hops = Vec::new();
    let mut on_path = vec![false; graph.node_count()];
    on_path[src] = true;
    walk(graph, dst, &mut stack, &mut hops, &mut on_path, &mut best);
    best
}

fn walk(
    graph: &LinkGraph,
    dst: usize,
    stack: &mut Vec<usize>,
    hops: &mut Vec<f64>,
    on_path: &mut [bool],
    best: &mut Option<(f64, Vec<usize>)>,
) {
    let at = *stack.last().unwrap();
    if at == dst {
        let len = path_length(hops);
        let better = match best {
            None => true,
            Some((b, nodes)) => len < *b || (len == *b && stack.as_slice() < nodes.as_slice()),
        };
        if better {
            *best = Some((len, stack.clone()));
        }
        return;
    }
    for &(next, w) in graph.neighbors(at) {
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        stack.push(next);
        hops.push(w);
        walk(graph, dst, stack, hops, on_path, best);
        hops.pop();
        stack.pop();
        on_path[next] = false;
    }
}

/// Every simple `src -> dst` path as hop distances.
pub fn all_simple_paths(graph: &LinkGraph, src: usize, dst: usize) -> Vec<Vec<f64>> {
    fn go(
        g: &LinkGraph,
        at: usize,
        dst: usize,
        seen: &mut [bool],
        hops: &mut Vec<f64>,
        out: &mut Vec<Vec<f64>>,
    ) {
        if at == dst {
            out.push(hops.clone());
            return;
        }
        for &(next, w) in g.neighbors(at) {
            if !seen[next] {
                seen[next] = true;
                hops.push(w);
                go(g, next, dst, seen, hops, out);
                hops.pop();
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; graph.node_count()];
    seen[src] = true;
    let mut out = Vec::new();
    go(graph, src, dst, &mut seen, &mut Vec::new(), &mut out);
    out
}

/// Uniform points in a `side x side` square.
pub fn random_points<R: Rng>(n: usize, side: f64, rng: &mut R) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect()
}

/// Parses CSV text into rows of fields, header dropped.
pub fn csv_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
