//! ε-chain graphs of a single map on a finite set of points.

use crate::action::FiniteAction;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::system::{FiniteSample, Point, Resolution, SystemDescriptor};
use crate::witness::{check_witness, Witness};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsGraph {
    /// Sorted successor lists.
    pub adj: Vec<Vec<usize>>,
    #[serde(with = "crate::rational::serde_rational")]
    pub epsilon: Rational,
}

impl EpsGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)], epsilon: Rational) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        Self { adj, epsilon }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj.iter().enumerate().flat_map(|(a, l)| l.iter().map(move |&b| (a, b))).collect()
    }
}

/// Edges `(x, y)` with `d(T x, y) < eps` among `points` of a rank-one system.
pub fn build_eps_graph_on(system: &SystemDescriptor, points: &[Point], epsilon: &Rational) -> Result<EpsGraph> {
    let mut adj = vec![Vec::new(); points.len()];
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            if system.image_distance(0, x, y)? < *epsilon {
                adj[i].push(j);
            }
        }
    }
    Ok(EpsGraph { adj, epsilon: epsilon.clone() })
}

pub fn build_eps_graph(sample: &FiniteSample, epsilon: &Rational) -> Result<EpsGraph> {
    let system = SystemDescriptor::FiniteSample(sample.clone());
    let points: Vec<Point> = (0..sample.len()).map(Point::Sample).collect();
    build_eps_graph_on(&system, &points, epsilon)
}

/// Strongly connected components (Tarjan, iterative), as a component id per node.
pub fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, i)) = call.last() {
            if i < adj[v].len() {
                let w = adj[v][i];
                call.last_mut().expect("frame").1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("scc stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Nodes on some directed cycle (a self-loop counts).
pub fn chain_recurrent_set(graph: &EpsGraph) -> Vec<usize> {
    let comp = scc(&graph.adj);
    let mut size = vec![0usize; graph.len()];
    for &c in &comp {
        size[c] += 1;
    }
    (0..graph.len())
        .filter(|&v| size[comp[v]] > 1 || graph.adj[v].contains(&v))
        .collect()
}

/// Shortest cycle through `x` as a node sequence starting at `x`
/// (successors explored in increasing order).
pub fn shortest_cycle(graph: &EpsGraph, x: usize) -> Option<Vec<usize>> {
    if graph.adj[x].contains(&x) {
        return Some(vec![x]);
    }
    let mut parent = vec![usize::MAX; graph.len()];
    let mut queue = VecDeque::from([x]);
    parent[x] = x;
    while let Some(v) = queue.pop_front() {
        for &w in &graph.adj[v] {
            if w == x {
                let mut path = vec![v];
                let mut u = v;
                while u != x {
                    u = parent[u];
                    path.push(u);
                }
                path.reverse();
                return Some(path);
            }
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Cycle through `x` whose worst step `d(T v, w)` is least, shortest among those.
pub fn bottleneck_cycle(graph: &EpsGraph, step: &[Vec<Rational>], x: usize) -> Option<Vec<usize>> {
    let mut levels: Vec<&Rational> = graph.edges().into_iter().map(|(a, b)| &step[a][b]).collect();
    levels.sort();
    levels.dedup();
    let below = |t: &Rational| {
        let edges: Vec<(usize, usize)> = graph.edges().into_iter().filter(|&(a, b)| step[a][b] <= *t).collect();
        shortest_cycle(&EpsGraph::from_edges(graph.len(), &edges, graph.epsilon.clone()), x)
    };
    // cycle existence is monotone in the level
    let (mut lo, mut hi) = (0, levels.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if below(levels[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    levels.get(lo).and_then(|t| below(t))
}

/// Cyclic models from bottleneck ε-cycles through an ε-dense set of
/// chain-recurrent points.
pub fn model_from_chains_on(
    system: &SystemDescriptor,
    points: &[Point],
    epsilon: &Rational,
    res: &Resolution,
) -> Result<Witness> {
    let graph = build_eps_graph_on(system, points, epsilon)?;
    let recurrent = chain_recurrent_set(&graph);
    if recurrent.is_empty() {
        return Err(Error::NoChain);
    }
    let mut step = vec![Vec::new(); points.len()];
    for (i, x) in points.iter().enumerate() {
        for y in points {
            step[i].push(system.image_distance(0, x, y)?);
        }
    }
    // greedy: a node already within eps of a chosen cycle adds nothing
    let mut covered: Vec<usize> = Vec::new();
    let mut table = Vec::new();
    let mut zeta = Vec::new();
    for &x in &recurrent {
        let mut near = false;
        for &y in &covered {
            if system.distance(&points[x], &points[y])? < *epsilon {
                near = true;
                break;
            }
        }
        if near {
            continue;
        }
        let cycle = bottleneck_cycle(&graph, &step, x).expect("recurrent node lies on a cycle");
        let base = table.len();
        let len = cycle.len();
        for (i, &v) in cycle.iter().enumerate() {
            table.push(base + (i + 1) % len);
            zeta.push(points[v].clone());
            covered.push(v);
        }
    }
    let action = FiniteAction::new(table.len(), vec![table])?;
    check_witness(system, &action, &zeta, &[0], epsilon, res)
}

pub fn model_from_chains(sample: &FiniteSample, epsilon: &Rational, res: &Resolution) -> Result<Witness> {
    let system = SystemDescriptor::FiniteSample(sample.clone());
    let points: Vec<Point> = (0..sample.len()).map(Point::Sample).collect();
    model_from_chains_on(&system, &points, epsilon, res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::system::SampleMetric;
    use num_traits::Zero;

    fn rotation8() -> FiniteSample {
        FiniteSample::exact(SampleMetric::Circle((0..8).map(|k| q(k, 8)).collect()), vec![(0..8).map(|k| (k + 1) % 8).collect()])
            .unwrap()
    }

    #[test]
    fn permutation_graph_all_recurrent() {
        let g = build_eps_graph(&rotation8(), &q(1, 100)).unwrap();
        assert_eq!(g.edges().len(), 8);
        assert_eq!(chain_recurrent_set(&g), (0..8).collect::<Vec<_>>());
        let path = EpsGraph::from_edges(3, &[(0, 1), (1, 2)], q(1, 2));
        assert!(chain_recurrent_set(&path).is_empty());
    }

    #[test]
    fn complete_graph_at_large_eps() {
        let g = build_eps_graph(&rotation8(), &q(1, 1)).unwrap();
        assert_eq!(g.edges().len(), 64);
    }

    #[test]
    fn exact_rotation_model() {
        let w = model_from_chains(&rotation8(), &q(1, 100), &Resolution::default()).unwrap();
        assert_eq!(w.size(), 8);
        assert!(w.density_defect.is_zero() && w.equivariance_defect.is_zero());
    }

    #[test]
    fn acyclic_sample_has_no_chain() {
        let s = FiniteSample::exact(SampleMetric::Line(vec![q(0, 1), q(1, 1), q(2, 1)]), vec![vec![1, 2, 2]]).unwrap();
        assert!(model_from_chains(&s, &q(1, 2), &Resolution::default()).is_ok());
        let s = FiniteSample::new(
            SampleMetric::Line(vec![q(0, 1), q(1, 1)]),
            vec![vec![crate::system::SampleImage::Coordinate(q(1, 1)), crate::system::SampleImage::Coordinate(q(3, 1))]],
        )
        .unwrap();
        assert_eq!(model_from_chains(&s, &q(1, 2), &Resolution::default()).unwrap_err(), Error::NoChain);
    }
}
