//! Networks, problem instances and candidate edge sets.
//!
//! Graphs are directed. An undirected network is stored as pairs of opposite
//! arcs that share a *link* id, activation probability and importance; the two
//! arcs of a link are always removed together and the link's importance is
//! counted once.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// Activation probability.
    pub p: f64,
    /// Operational importance of keeping the connection up.
    pub importance: f64,
    /// Logical link this arc belongs to. Equal to the arc's own position in
    /// directed graphs; shared by both arcs of an undirected connection.
    pub link: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    undirected: bool,
    link_count: usize,
}

fn check_unit(value: f64, err: fn(f64) -> Error) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(err(value))
    }
}

impl Graph {
    /// Directed graph from `(src, dst, p, importance)` tuples.
    pub fn directed<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64, f64)>,
    {
        let arcs = edges
            .into_iter()
            .enumerate()
            .map(|(link, (s, d, p, i))| Edge { src: NodeId(s), dst: NodeId(d), p, importance: i, link })
            .collect();
        Self::from_arcs(node_count, arcs, false)
    }

    /// Undirected graph: each `(a, b, p, importance)` becomes the arcs `a -> b`
    /// and `b -> a` at consecutive positions.
    pub fn undirected<I>(node_count: usize, links: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64, f64)>,
    {
        let mut arcs = Vec::new();
        for (link, (a, b, p, i)) in links.into_iter().enumerate() {
            arcs.push(Edge { src: NodeId(a), dst: NodeId(b), p, importance: i, link });
            arcs.push(Edge { src: NodeId(b), dst: NodeId(a), p, importance: i, link });
        }
        Self::from_arcs(node_count, arcs, true)
    }

    fn from_arcs(node_count: usize, edges: Vec<Edge>, undirected: bool) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); node_count];
        let mut seen = BTreeSet::new();
        let mut link_count = 0;
        for (idx, e) in edges.iter().enumerate() {
            for n in [e.src.0, e.dst.0] {
                if n >= node_count {
                    return Err(Error::UnknownNode { node: n, node_count });
                }
            }
            if e.src == e.dst {
                return Err(Error::SelfLoop(e.src.0));
            }
            check_unit(e.p, Error::ProbabilityOutOfRange)?;
            check_unit(e.importance, Error::ImportanceOutOfRange)?;
            if !seen.insert((e.src, e.dst)) {
                return Err(Error::DuplicateEdge { src: e.src.0, dst: e.dst.0 });
            }
            adjacency[e.src.0].push(idx);
            link_count = link_count.max(e.link + 1);
        }
        Ok(Graph { node_count, edges, adjacency, undirected, link_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of arcs.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Option<&Edge> {
        self.edges.get(index)
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    /// Number of logical links (connections as listed in an instance file).
    pub fn link_count(&self) -> usize {
        self.link_count
    }

    /// Indices of the arcs leaving `node`.
    pub fn out_edges(&self, node: NodeId) -> &[usize] {
        &self.adjacency[node.0]
    }

    /// Index of the first arc of every link, in link order.
    pub fn link_representatives(&self) -> Vec<usize> {
        let mut seen = vec![false; self.link_count];
        let mut reps = Vec::with_capacity(self.link_count);
        for (i, e) in self.edges.iter().enumerate() {
            if !seen[e.link] {
                seen[e.link] = true;
                reps.push(i);
            }
        }
        reps
    }

    /// Marks every arc that goes away when `removal` is applied: the listed
    /// arcs plus, in undirected graphs, their reverse arcs.
    fn removal_mask(&self, removal: &CandidateSet) -> Result<Vec<bool>> {
        removal.check(self)?;
        let mut dead_links = vec![false; self.link_count];
        for &i in removal.indices() {
            dead_links[self.edges[i].link] = true;
        }
        Ok(self.edges.iter().map(|e| dead_links[e.link]).collect())
    }

    /// Original indices of the arcs that survive `removal`, in order.
    pub fn surviving_indices(&self, removal: &CandidateSet) -> Result<Vec<usize>> {
        let dead = self.removal_mask(removal)?;
        Ok((0..self.edges.len()).filter(|&i| !dead[i]).collect())
    }

    /// `G \ E'`: a new graph without the removed arcs. Node count and arc order
    /// are preserved; link ids are renumbered densely.
    pub fn remove_edges(&self, removal: &CandidateSet) -> Result<Graph> {
        let keep = self.surviving_indices(removal)?;
        let mut relink = vec![usize::MAX; self.link_count];
        let mut next = 0;
        let arcs = keep
            .iter()
            .map(|&i| {
                let mut e = self.edges[i];
                if relink[e.link] == usize::MAX {
                    relink[e.link] = next;
                    next += 1;
                }
                e.link = relink[e.link];
                e
            })
            .collect();
        Self::from_arcs(self.node_count, arcs, self.undirected)
    }

    /// Nodes reachable from `sources` using only arcs for which `live` holds.
    pub fn reachable<F>(&self, sources: &[NodeId], mut live: F) -> Vec<bool>
    where
        F: FnMut(usize) -> bool,
    {
        let mut seen = vec![false; self.node_count];
        let mut stack: Vec<usize> = Vec::with_capacity(self.node_count);
        for s in sources {
            if !seen[s.0] {
                seen[s.0] = true;
                stack.push(s.0);
            }
        }
        while let Some(v) = stack.pop() {
            for &ei in &self.adjacency[v] {
                let d = self.edges[ei].dst.0;
                if !seen[d] && live(ei) {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen
    }
}

/// A graph together with its infected seed set and the weighting `lambda`
/// between expected influence and operational impact.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    graph: Graph,
    seeds: Vec<NodeId>,
    lambda: f64,
}

impl ProblemInstance {
    /// Seeds are deduplicated and sorted.
    pub fn new(graph: Graph, seeds: impl IntoIterator<Item = NodeId>, lambda: f64) -> Result<Self> {
        let seeds: BTreeSet<NodeId> = seeds.into_iter().collect();
        if seeds.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        if let Some(s) = seeds.iter().find(|s| s.0 >= graph.node_count()) {
            return Err(Error::UnknownNode { node: s.0, node_count: graph.node_count() });
        }
        check_unit(lambda, Error::LambdaOutOfRange)?;
        Ok(ProblemInstance { graph, seeds: seeds.into_iter().collect(), lambda })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn seeds(&self) -> &[NodeId] {
        &self.seeds
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// The same instance on `G \ removal`.
    pub fn without(&self, removal: &CandidateSet) -> Result<ProblemInstance> {
        Ok(ProblemInstance {
            graph: self.graph.remove_edges(removal)?,
            seeds: self.seeds.clone(),
            lambda: self.lambda,
        })
    }
}

/// An ordered set of distinct arc indices into some graph's edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    edges: Vec<usize>,
}

impl CandidateSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates the indices against `graph`.
    pub fn new(edges: Vec<usize>, graph: &Graph) -> Result<Self> {
        let set = CandidateSet { edges };
        set.check(graph)?;
        Ok(set)
    }

    /// Builds a set without a graph at hand; indices are validated when the
    /// set is applied.
    pub fn from_indices(edges: Vec<usize>) -> Self {
        CandidateSet { edges }
    }

    pub fn indices(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// A copy with `edge` appended.
    pub fn with(&self, edge: usize) -> Self {
        let mut edges = self.edges.clone();
        edges.push(edge);
        CandidateSet { edges }
    }

    pub(crate) fn check(&self, graph: &Graph) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &i in &self.edges {
            if i >= graph.edge_count() {
                return Err(Error::EdgeIndexOutOfRange { index: i, edge_count: graph.edge_count() });
            }
            if !seen.insert(i) {
                return Err(Error::RepeatedEdgeIndex(i));
            }
        }
        Ok(())
    }
}

/// Parameters of the directed Erdős–Rényi instance generator.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomInstanceParams {
    pub n_nodes: usize,
    pub edge_prob: f64,
    pub p_range: (f64, f64),
    pub i_range: (f64, f64),
    pub n_seeds: usize,
    pub lambda: f64,
}

impl Default for RandomInstanceParams {
    fn default() -> Self {
        RandomInstanceParams {
            n_nodes: 10,
            edge_prob: 0.2,
            p_range: (0.0, 1.0),
            i_range: (0.0, 1.0),
            n_seeds: 1,
            lambda: 1.0,
        }
    }
}

fn check_range((lo, hi): (f64, f64)) -> Result<()> {
    if 0.0 <= lo && lo <= hi && hi <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRange { lo, hi })
    }
}

/// Random instance: every ordered pair `(u, v)`, `u != v`, visited row-major,
/// becomes an arc with probability `edge_prob`; `p` and importance are uniform
/// on their ranges; seeds are drawn without replacement.
pub fn generate_random_instance(params: &RandomInstanceParams, rng_seed: u64) -> Result<ProblemInstance> {
    let n = params.n_nodes;
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if params.n_seeds == 0 {
        return Err(Error::EmptySeedSet);
    }
    if params.n_seeds > n {
        return Err(Error::TooManySeeds { n_seeds: params.n_seeds, n_nodes: n });
    }
    check_unit(params.edge_prob, Error::ProbabilityOutOfRange)?;
    check_range(params.p_range)?;
    check_range(params.i_range)?;

    let mut rng = rng::seeded(rng_seed);
    let uniform = |rng: &mut rng::StreamRng, (lo, hi): (f64, f64)| lo + (hi - lo) * rng.gen::<f64>();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            if rng.gen::<f64>() < params.edge_prob {
                let p = uniform(&mut rng, params.p_range);
                let i = uniform(&mut rng, params.i_range);
                edges.push((u, v, p, i));
            }
        }
    }
    let graph = Graph::directed(n, edges)?;

    // partial Fisher-Yates
    let mut pool: Vec<usize> = (0..n).collect();
    for k in 0..params.n_seeds {
        let j = k + rng::index_below(&mut rng, n - k);
        pool.swap(k, j);
    }
    let seeds = pool[..params.n_seeds].iter().map(|&s| NodeId(s));
    ProblemInstance::new(graph, seeds, params.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::directed(3, [(0, 1, 0.5, 0.1), (1, 2, 0.5, 0.2), (0, 2, 0.5, 0.3)]).unwrap()
    }

    #[test]
    fn remove_nothing_is_identity() {
        let g = triangle();
        assert_eq!(g.remove_edges(&CandidateSet::empty()).unwrap(), g);
    }

    #[test]
    fn remove_only_edge() {
        let g = Graph::directed(2, [(0, 1, 0.5, 0.3)]).unwrap();
        let r = g.remove_edges(&CandidateSet::new(vec![0], &g).unwrap()).unwrap();
        assert_eq!(r.node_count(), 2);
        assert_eq!(r.edge_count(), 0);
    }

    #[test]
    fn remove_middle_of_triangle() {
        let g = triangle();
        let r = g.remove_edges(&CandidateSet::new(vec![1], &g).unwrap()).unwrap();
        let pairs: Vec<_> = r.edges().iter().map(|e| (e.src.0, e.dst.0)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2)]);
        // the original is untouched
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn remove_rejects_bad_index() {
        let g = triangle();
        assert!(matches!(
            g.remove_edges(&CandidateSet::from_indices(vec![3])),
            Err(Error::EdgeIndexOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            g.remove_edges(&CandidateSet::from_indices(vec![1, 1])),
            Err(Error::RepeatedEdgeIndex(1))
        ));
    }

    #[test]
    fn undirected_removal_takes_both_arcs() {
        let g = Graph::undirected(3, [(0, 1, 0.4, 0.2), (1, 2, 0.6, 0.5)]).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.link_count(), 2);
        assert_eq!(g.link_representatives(), vec![0, 2]);
        let r = g.remove_edges(&CandidateSet::from_indices(vec![1])).unwrap();
        let pairs: Vec<_> = r.edges().iter().map(|e| (e.src.0, e.dst.0, e.link)).collect();
        assert_eq!(pairs, vec![(1, 2, 0), (2, 1, 0)]);
    }

    #[test]
    fn invariants_are_enforced() {
        assert_eq!(Graph::directed(2, [(0, 0, 0.5, 0.5)]), Err(Error::SelfLoop(0)));
        assert_eq!(Graph::directed(2, [(0, 1, 1.5, 0.5)]), Err(Error::ProbabilityOutOfRange(1.5)));
        assert_eq!(Graph::directed(2, [(0, 1, 0.5, -0.1)]), Err(Error::ImportanceOutOfRange(-0.1)));
        assert_eq!(
            Graph::directed(2, [(0, 1, 0.5, 0.5), (0, 1, 0.2, 0.2)]),
            Err(Error::DuplicateEdge { src: 0, dst: 1 })
        );
        assert_eq!(Graph::directed(2, [(0, 2, 0.5, 0.5)]), Err(Error::UnknownNode { node: 2, node_count: 2 }));
        assert_eq!(Graph::directed(0, []), Err(Error::EmptyGraph));
        let g = Graph::directed(2, []).unwrap();
        assert_eq!(ProblemInstance::new(g.clone(), [], 1.0), Err(Error::EmptySeedSet));
        assert_eq!(ProblemInstance::new(g.clone(), [NodeId(0)], 1.2), Err(Error::LambdaOutOfRange(1.2)));
        assert!(ProblemInstance::new(g, [NodeId(5)], 0.5).is_err());
    }

    #[test]
    fn generator_edge_cases() {
        let one = RandomInstanceParams { n_nodes: 1, n_seeds: 1, ..Default::default() };
        let inst = generate_random_instance(&one, 9).unwrap();
        assert_eq!(inst.node_count(), 1);
        assert_eq!(inst.graph().edge_count(), 0);
        assert_eq!(inst.seeds(), &[NodeId(0)]);

        let sparse = RandomInstanceParams { n_nodes: 12, edge_prob: 0.0, ..Default::default() };
        for seed in 0..5 {
            assert_eq!(generate_random_instance(&sparse, seed).unwrap().graph().edge_count(), 0);
        }

        let bad = RandomInstanceParams { n_nodes: 5, n_seeds: 6, ..Default::default() };
        assert_eq!(generate_random_instance(&bad, 0), Err(Error::TooManySeeds { n_seeds: 6, n_nodes: 5 }));
    }

    #[test]
    fn generator_is_deterministic() {
        let params = RandomInstanceParams { n_nodes: 9, edge_prob: 0.3, n_seeds: 2, ..Default::default() };
        let a = generate_random_instance(&params, 77).unwrap();
        let b = generate_random_instance(&params, 77).unwrap();
        let c = generate_random_instance(&params, 78).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.seeds().len(), 2);
        for e in a.graph().edges() {
            assert!((0.0..=1.0).contains(&e.p));
        }
    }

    #[test]
    fn reachability_respects_liveness() {
        let g = triangle();
        let all = g.reachable(&[NodeId(0)], |_| true);
        assert_eq!(all, vec![true, true, true]);
        let only_first = g.reachable(&[NodeId(0)], |e| e == 0);
        assert_eq!(only_first, vec![true, true, false]);
    }
}
