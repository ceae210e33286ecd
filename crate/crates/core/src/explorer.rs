//! Exchange-graph enumeration.
//!
//! Breadth-first closure of seed mutation, deduplicated by [`SeedKey`]. The
//! frontier is FIFO and directions are tried in ascending order, so node
//! order and witness sequences depend only on the root and the limits.
//! Candidate seeds are computed in parallel; insertion into the visited map
//! happens in a single sequential merge.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use log::{debug, warn};
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::canon::{canonical_form, QuiverCanonKey, DEFAULT_PERMUTATION_LIMIT};
use crate::error::{ExploreError, SeedError};
use crate::matrix::ExchangeMatrix;
use crate::quiver::Quiver;
use crate::seed::{ClusterVariable, Seed, SeedKey};

/// Parents expanded per merge step.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_seeds: usize,
    pub max_entry: BigInt,
    pub max_denominator_degree: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_seeds: 100_000,
            max_entry: BigInt::from(1u64 << 32),
            max_denominator_degree: u64::MAX,
        }
    }
}

impl EnumerationLimits {
    pub fn with_max_seeds(max_seeds: usize) -> Self {
        EnumerationLimits { max_seeds, ..Default::default() }
    }

    fn validate(&self) -> Result<(), ExploreError> {
        if self.max_seeds == 0
            || self.max_entry <= BigInt::from(0)
            || self.max_denominator_degree == 0
        {
            return Err(ExploreError::InvalidLimits);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub key: SeedKey,
    pub seed: Seed,
    /// 0-based mutation sequence from the root.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpillReason {
    EntryBound,
    DenominatorDegree,
    SeedLimit,
}

impl SpillReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SpillReason::EntryBound => "max_entry",
            SpillReason::DenominatorDegree => "max_denominator_degree",
            SpillReason::SeedLimit => "max_seeds",
        }
    }
}

/// A candidate that was computed but not inserted because a limit tripped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spill {
    pub from: usize,
    pub direction: usize,
    pub reason: SpillReason,
}

/// Nodes in discovery order plus directed, direction-labeled edges.
///
/// Direction labels refer to the source node's own cluster ordering. A node
/// reached along two different paths keeps the ordering of its first
/// discovery, so the label of the return edge is the position of the
/// exchanged variable in the target, not necessarily the same index.
#[derive(Debug, Clone)]
pub struct ExchangeGraph {
    nodes: Vec<Node>,
    index: HashMap<SeedKey, usize>,
    adjacency: Vec<Vec<Option<usize>>>,
}

impl ExchangeGraph {
    fn with_root(root: Seed) -> Self {
        let key = root.key();
        let n = root.n();
        let mut index = HashMap::new();
        index.insert(key.clone(), 0);
        ExchangeGraph {
            nodes: vec![Node { key, seed: root, witness: Vec::new() }],
            index,
            adjacency: vec![vec![None; n]],
        }
    }

    pub fn rank(&self) -> usize {
        self.nodes[0].seed.n()
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, key: &SeedKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn node(&self, key: &SeedKey) -> Option<&Node> {
        self.position(key).map(|i| &self.nodes[i])
    }

    /// Target of the edge leaving `node` in `direction`, if it is in the graph.
    pub fn neighbor(&self, node: usize, direction: usize) -> Option<usize> {
        self.adjacency[node][direction]
    }

    /// Edges `(from, direction, to)` in node order then direction order.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, dirs)| dirs.iter().enumerate().filter_map(move |(d, t)| t.map(|v| (u, d, v))))
            .collect()
    }

    /// True when every node has all `n` neighbors present.
    pub fn is_closed(&self) -> bool {
        self.adjacency.iter().all(|dirs| dirs.iter().all(Option::is_some))
    }

    fn insert(&mut self, seed: Seed, key: SeedKey, witness: Vec<usize>) -> usize {
        let id = self.nodes.len();
        let n = seed.n();
        self.index.insert(key.clone(), id);
        self.nodes.push(Node { key, seed, witness });
        self.adjacency.push(vec![None; n]);
        id
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub graph: ExchangeGraph,
    pub complete: bool,
    pub cluster_count: usize,
    pub cluster_variable_count: usize,
    pub spill: Vec<Spill>,
    /// Seeds with equal clusters whose matrices disagree under the matching permutation.
    pub diagnostics: Vec<String>,
}

impl EnumerationResult {
    pub fn stats_json(&self) -> serde_json::Value {
        serde_json::json!({
            "clusters": self.cluster_count,
            "variables": self.cluster_variable_count,
            "complete": self.complete,
        })
    }
}

pub fn enumerate(root: &Seed, limits: &EnumerationLimits) -> Result<EnumerationResult, ExploreError> {
    explore(root, limits, None)
}

/// The ball of radius `depth` around `center`.
pub fn neighborhood(center: &Seed, depth: usize) -> Result<EnumerationResult, ExploreError> {
    let limits = EnumerationLimits {
        max_seeds: usize::MAX,
        max_entry: BigInt::from(u64::MAX) * BigInt::from(u64::MAX),
        max_denominator_degree: u64::MAX,
    };
    explore(center, &limits, Some(depth))
}

enum Candidate {
    Seed(Seed),
    Spilled(SpillReason),
}

fn explore(
    root: &Seed,
    limits: &EnumerationLimits,
    max_depth: Option<usize>,
) -> Result<EnumerationResult, ExploreError> {
    limits.validate()?;
    let n = root.n();
    let mut graph = ExchangeGraph::with_root(root.clone());
    let mut spill = Vec::new();
    let mut diagnostics = Vec::new();
    let mut frontier: VecDeque<usize> = VecDeque::from([0]);
    let mut seed_limit_hit = false;

    'bfs: while !frontier.is_empty() {
        let take = frontier.len().min(CHUNK);
        let parents: Vec<usize> = frontier.drain(..take).collect();
        let mut jobs = Vec::new();
        for &p in &parents {
            let node = &graph.nodes[p];
            if max_depth.is_some_and(|d| node.witness.len() >= d) {
                continue;
            }
            for dir in 0..n {
                // The parent is already known along the last witness step.
                if node.witness.last() == Some(&dir) && graph.adjacency[p][dir].is_some() {
                    continue;
                }
                jobs.push((p, dir));
            }
        }
        let results: Vec<Result<Candidate, SeedError>> = jobs
            .par_iter()
            .map(|&(p, dir)| expand(&graph.nodes[p].seed, dir, limits))
            .collect();

        for (&(p, dir), res) in jobs.iter().zip(results) {
            let cand = match res {
                Ok(Candidate::Seed(s)) => s,
                Ok(Candidate::Spilled(reason)) => {
                    spill.push(Spill { from: p, direction: dir, reason });
                    continue;
                }
                Err(source) => {
                    let mut witness: Vec<usize> =
                        graph.nodes[p].witness.iter().map(|k| k + 1).collect();
                    witness.push(dir + 1);
                    return Err(ExploreError::ExchangeDivisionFailed { witness, source });
                }
            };
            let key = cand.key();
            if let Some(existing) = graph.position(&key) {
                check_consistency(&graph.nodes[existing].seed, &cand, &mut diagnostics);
                graph.adjacency[p][dir] = Some(existing);
                continue;
            }
            if graph.nodes.len() >= limits.max_seeds {
                spill.push(Spill { from: p, direction: dir, reason: SpillReason::SeedLimit });
                seed_limit_hit = true;
                break 'bfs;
            }
            let mut witness = graph.nodes[p].witness.clone();
            witness.push(dir);
            let id = graph.insert(cand, key, witness);
            graph.adjacency[p][dir] = Some(id);
            graph.adjacency[id][dir] = Some(p);
            frontier.push_back(id);
        }
    }

    let depth_bounded = max_depth.is_some();
    let complete = !seed_limit_hit && spill.is_empty() && (!depth_bounded || graph.is_closed());
    if complete {
        debug_assert!(graph.is_closed());
    }
    let cluster_variable_count = cluster_variables(&graph).len();
    debug!(
        "enumeration: {} seeds, {} variables, complete={complete}",
        graph.len(),
        cluster_variable_count
    );
    Ok(EnumerationResult {
        cluster_count: graph.len(),
        cluster_variable_count,
        complete,
        graph,
        spill,
        diagnostics,
    })
}

fn expand(seed: &Seed, dir: usize, limits: &EnumerationLimits) -> Result<Candidate, SeedError> {
    // The matrix bound is checked before any polynomial work.
    let matrix = seed.matrix().mutate(dir)?;
    if matrix.max_abs_entry() > limits.max_entry {
        return Ok(Candidate::Spilled(SpillReason::EntryBound));
    }
    let next = seed.mutate(dir)?;
    if next.variable(dir).denominator_degree() > limits.max_denominator_degree {
        return Ok(Candidate::Spilled(SpillReason::DenominatorDegree));
    }
    Ok(Candidate::Seed(next))
}

fn check_consistency(existing: &Seed, candidate: &Seed, diagnostics: &mut Vec<String>) {
    let agrees = existing
        .matching_permutation(candidate)
        .and_then(|perm| existing.matrix().permute(&perm).ok())
        .is_some_and(|m| &m == candidate.matrix());
    if !agrees {
        let msg = format!(
            "cluster {:?} reached with matrices {:?} and {:?}",
            candidate.renderings(),
            existing.matrix(),
            candidate.matrix()
        );
        warn!("{msg}");
        diagnostics.push(msg);
    }
}

/// All distinct cluster variables in the graph, ordered by denominator degree then rendering.
pub fn cluster_variables(graph: &ExchangeGraph) -> Vec<Arc<ClusterVariable>> {
    let mut seen: BTreeMap<(u64, String), Arc<ClusterVariable>> = BTreeMap::new();
    for node in graph.nodes() {
        for v in node.seed.cluster() {
            seen.entry((v.poly().denominator_degree(), v.text().to_owned()))
                .or_insert_with(|| v.clone());
        }
    }
    seen.into_values().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteType {
    Finite { clusters: usize, variables: usize },
    ExceededLimits,
}

pub fn is_finite_type(b: &ExchangeMatrix, limits: &EnumerationLimits) -> Result<FiniteType, ExploreError> {
    let r = enumerate(&Seed::initial(b.clone()), limits)?;
    Ok(if r.complete {
        FiniteType::Finite { clusters: r.cluster_count, variables: r.cluster_variable_count }
    } else {
        FiniteType::ExceededLimits
    })
}

#[derive(Debug, Clone)]
pub struct QuiverClass {
    pub key: QuiverCanonKey,
    pub representative: Quiver,
    /// 0-based mutation sequence from the input quiver.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MutationClassResult {
    pub classes: Vec<QuiverClass>,
    pub complete: bool,
}

/// Quivers reachable by mutation, up to isomorphism. `max_seeds` bounds the
/// number of classes and `max_entry` the multiplicities.
pub fn mutation_class_quivers(
    q: &Quiver,
    limits: &EnumerationLimits,
) -> Result<MutationClassResult, ExploreError> {
    limits.validate()?;
    let root = q.to_matrix();
    let key = canonical_form(&root, DEFAULT_PERMUTATION_LIMIT)?.key;
    let mut index: HashMap<QuiverCanonKey, usize> = HashMap::from([(key.clone(), 0)]);
    let mut classes = vec![QuiverClass { key, representative: q.clone(), witness: Vec::new() }];
    let mut frontier = VecDeque::from([0usize]);
    let mut complete = true;
    'bfs: while let Some(c) = frontier.pop_front() {
        let b = classes[c].representative.to_matrix();
        for dir in 0..b.n() {
            let next = b.mutate(dir)?;
            if next.max_abs_entry() > limits.max_entry {
                complete = false;
                continue;
            }
            let key = canonical_form(&next, DEFAULT_PERMUTATION_LIMIT)?.key;
            if index.contains_key(&key) {
                continue;
            }
            if classes.len() >= limits.max_seeds {
                complete = false;
                break 'bfs;
            }
            let mut witness = classes[c].witness.clone();
            witness.push(dir);
            index.insert(key.clone(), classes.len());
            classes.push(QuiverClass { key, representative: Quiver::from_matrix(&next), witness });
            frontier.push_back(classes.len() - 1);
        }
    }
    Ok(MutationClassResult { classes, complete })
}
