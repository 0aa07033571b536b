//! Two-level map-equation clustering.
//!
//! The random walk on an undirected graph visits vertex `α` with stationary
//! rate `p_α = s_α / 2W`, where `s_α` is the weighted degree and `W` the
//! total edge weight. A partition `M` into modules is scored by the
//! expected description length per step,
//!
//! ```text
//! L(M) = q↶ H(Q) + Σ_i p_i↻ H(P_i)
//! ```
//!
//! where `q_i` is the rate at which the walker exits module `i`,
//! `q↶ = Σ_i q_i` and `p_i↻ = q_i + Σ_{α∈i} p_α`. Expanding the entropies
//! gives the form used for incremental updates:
//!
//! ```text
//! L = plogp(q↶) − 2 Σ_i plogp(q_i) − Σ_α plogp(p_α) + Σ_i plogp(p_i↻)
//! ```
//!
//! [`infomap`] minimises `L` with Louvain-style local moving and module
//! aggregation, repeated from the vertex level until no round improves the
//! codelength.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::seed::derive_seed;

/// Moves that improve the codelength by less than this are treated as noise.
const MIN_MOVE_GAIN: f64 = 1e-14;
/// Upper bound on fine-tune/aggregate rounds per trial.
const MAX_ROUNDS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfomapConfig {
    pub seed: u64,
    pub trials: usize,
    /// Local-moving sweeps allowed per aggregation level.
    pub max_sweeps: usize,
    /// A sweep (or a whole round) improving `L` by less than this many bits
    /// ends the current phase.
    pub min_gain: f64,
}

impl Default for InfomapConfig {
    fn default() -> Self {
        InfomapConfig {
            seed: 1,
            trials: 10,
            max_sweeps: 100,
            min_gain: 1e-10,
        }
    }
}

/// Stationary visit rates of the undirected random walk.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDistribution {
    pub visit_rate: Vec<f64>,
    /// `2W`, twice the total edge weight.
    pub total_weight: f64,
}

pub fn compute_flow(g: &WeightedGraph) -> Result<FlowDistribution> {
    if g.m() == 0 {
        return Err(Error::NoFlow);
    }
    Ok(flow_or_zero(g))
}

fn flow_or_zero(g: &WeightedGraph) -> FlowDistribution {
    let total_weight = 2.0 * g.total_edge_weight();
    let visit_rate = if total_weight > 0.0 {
        (0..g.n()).map(|v| g.strength(v) / total_weight).collect()
    } else {
        vec![0.0; g.n()]
    };
    FlowDistribution {
        visit_rate,
        total_weight,
    }
}

#[inline]
fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Assignment of vertices to non-empty modules `0..module_count`, with the
/// per-module flow sums the codelength needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    module_of: Vec<usize>,
    exit: Vec<f64>,
    interior: Vec<f64>,
}

impl Partition {
    pub fn from_assignment(
        g: &WeightedGraph,
        flow: &FlowDistribution,
        assignment: &[usize],
    ) -> Result<Self> {
        check_sizes(g, flow)?;
        if assignment.len() != g.n() {
            return Err(Error::SizeMismatch {
                expected: g.n(),
                got: assignment.len(),
            });
        }
        let count = assignment.iter().max().map_or(0, |&m| m + 1);
        let mut size = vec![0usize; count];
        for &m in assignment {
            size[m] += 1;
        }
        if let Some(empty) = size.iter().position(|&s| s == 0) {
            return Err(Error::EmptyModule(empty));
        }
        Ok(Self::build(g, flow, assignment.to_vec(), count))
    }

    fn build(
        g: &WeightedGraph,
        flow: &FlowDistribution,
        module_of: Vec<usize>,
        count: usize,
    ) -> Self {
        let (exit, interior) = module_sums(g, flow, &module_of, count);
        Partition {
            module_of,
            exit,
            interior,
        }
    }

    /// Every vertex in its own module.
    pub fn singletons(g: &WeightedGraph, flow: &FlowDistribution) -> Result<Self> {
        Self::from_assignment(g, flow, &(0..g.n()).collect::<Vec<_>>())
    }

    /// All vertices in module 0.
    pub fn one_module(g: &WeightedGraph, flow: &FlowDistribution) -> Result<Self> {
        Self::from_assignment(g, flow, &vec![0; g.n()])
    }

    pub fn module_of(&self, v: VertexId) -> usize {
        self.module_of[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.module_of
    }

    pub fn module_count(&self) -> usize {
        self.exit.len()
    }

    /// Exit rate `q_i`.
    pub fn exit_rate(&self, module: usize) -> f64 {
        self.exit[module]
    }

    /// Summed visit rate of the members, `Σ_{α∈i} p_α`.
    pub fn interior_flow(&self, module: usize) -> f64 {
        self.interior[module]
    }

    /// `p_i↻ = q_i + Σ_{α∈i} p_α`.
    pub fn module_flow(&self, module: usize) -> f64 {
        self.exit[module] + self.interior[module]
    }

    /// Member lists, one per module, each sorted by vertex id.
    pub fn modules(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.module_count()];
        for (v, &m) in self.module_of.iter().enumerate() {
            out[m].push(v);
        }
        out
    }
}

fn check_sizes(g: &WeightedGraph, flow: &FlowDistribution) -> Result<()> {
    if flow.visit_rate.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: flow.visit_rate.len(),
        });
    }
    Ok(())
}

fn module_sums(
    g: &WeightedGraph,
    flow: &FlowDistribution,
    module_of: &[usize],
    count: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut exit = vec![0.0; count];
    let mut interior = vec![0.0; count];
    for (v, &m) in module_of.iter().enumerate() {
        interior[m] += flow.visit_rate[v];
    }
    if flow.total_weight > 0.0 {
        for e in g.edges() {
            let (a, b) = (module_of[e.u], module_of[e.v]);
            if a != b {
                let f = e.weight / flow.total_weight;
                exit[a] += f;
                exit[b] += f;
            }
        }
    }
    (exit, interior)
}

/// The two terms of the map equation, in bits per step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Codelength {
    pub value: f64,
    /// `q↶ H(Q)`.
    pub index_term: f64,
    /// `Σ_i p_i↻ H(P_i)`.
    pub module_terms: f64,
}

/// Evaluates the map equation from scratch in its entropy form.
///
/// Module sums are recomputed from the graph rather than taken from the
/// partition's cache, so this doubles as the reference for [`move_gain`].
pub fn codelength(
    g: &WeightedGraph,
    flow: &FlowDistribution,
    part: &Partition,
) -> Result<Codelength> {
    check_sizes(g, flow)?;
    if part.module_of.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: part.module_of.len(),
        });
    }
    let count = part.module_count();
    let (exit, interior) = module_sums(g, flow, &part.module_of, count);
    let mut members = vec![Vec::new(); count];
    for (v, &m) in part.module_of.iter().enumerate() {
        members[m].push(v);
    }
    if let Some(empty) = members.iter().position(|m| m.is_empty()) {
        return Err(Error::EmptyModule(empty));
    }

    let total_exit: f64 = exit.iter().sum();
    let mut index_term = 0.0;
    if total_exit > 0.0 {
        for &q in &exit {
            if q > 0.0 {
                index_term -= q * (q / total_exit).log2();
            }
        }
    }

    let mut module_terms = 0.0;
    for (i, mem) in members.iter().enumerate() {
        let p = exit[i] + interior[i];
        if p <= 0.0 {
            continue;
        }
        let mut h = 0.0;
        if exit[i] > 0.0 {
            let r = exit[i] / p;
            h -= r * r.log2();
        }
        for &v in mem {
            let pv = flow.visit_rate[v];
            if pv > 0.0 {
                let r = pv / p;
                h -= r * r.log2();
            }
        }
        module_terms += p * h;
    }

    Ok(Codelength {
        value: index_term + module_terms,
        index_term,
        module_terms,
    })
}

/// Module-dependent part of the codelength change for moving one node.
///
/// `out_v` is the node's total link flow, `to_old`/`to_new` its link flow into
/// the rest of the old module and into the target module.
#[allow(clippy::too_many_arguments)]
#[inline]
fn delta_codelength(
    total_exit: f64,
    old_exit: f64,
    old_interior: f64,
    new_exit: f64,
    new_interior: f64,
    node_flow: f64,
    out_v: f64,
    to_old: f64,
    to_new: f64,
) -> f64 {
    let old_exit_after = (old_exit - out_v + 2.0 * to_old).max(0.0);
    let new_exit_after = (new_exit + out_v - 2.0 * to_new).max(0.0);
    let old_interior_after = (old_interior - node_flow).max(0.0);
    let new_interior_after = new_interior + node_flow;
    let total_after = total_exit - old_exit - new_exit + old_exit_after + new_exit_after;

    (plogp(total_after) - plogp(total_exit))
        - 2.0 * (plogp(old_exit_after) + plogp(new_exit_after) - plogp(old_exit) - plogp(new_exit))
        + (plogp(old_exit_after + old_interior_after) + plogp(new_exit_after + new_interior_after)
            - plogp(old_exit + old_interior)
            - plogp(new_exit + new_interior))
}

/// `L(after) − L(before)` for moving `v` into `target_module`, in `O(deg v)`.
///
/// `target_module == part.module_count()` denotes a fresh empty module.
/// Negative values are improvements.
pub fn move_gain(
    g: &WeightedGraph,
    flow: &FlowDistribution,
    part: &Partition,
    v: VertexId,
    target_module: usize,
) -> f64 {
    let current = part.module_of[v];
    if target_module == current || flow.total_weight <= 0.0 {
        return 0.0;
    }
    let mut to_old = 0.0;
    let mut to_new = 0.0;
    let mut out_v = 0.0;
    for (u, w) in g.neighbors(v) {
        let f = w / flow.total_weight;
        out_v += f;
        let m = part.module_of[u];
        if m == current {
            to_old += f;
        } else if m == target_module {
            to_new += f;
        }
    }
    let (new_exit, new_interior) = if target_module < part.module_count() {
        (part.exit[target_module], part.interior[target_module])
    } else {
        (0.0, 0.0)
    };
    let total_exit: f64 = part.exit.iter().sum();
    delta_codelength(
        total_exit,
        part.exit[current],
        part.interior[current],
        new_exit,
        new_interior,
        flow.visit_rate[v],
        out_v,
        to_old,
        to_new,
    )
}

/// Flow network the optimiser works on: node visit rates plus symmetric link
/// flows, already normalised by `2W`.
#[derive(Debug, Clone)]
struct FlowNet {
    flow: Vec<f64>,
    out: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    link_flow: Vec<f64>,
}

impl FlowNet {
    fn from_graph(g: &WeightedGraph) -> Self {
        let total = 2.0 * g.total_edge_weight();
        let n = g.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * g.m());
        let mut link_flow = Vec::with_capacity(2 * g.m());
        offsets.push(0);
        for v in 0..n {
            for (u, w) in g.neighbors(v) {
                targets.push(u);
                link_flow.push(w / total);
            }
            offsets.push(targets.len());
        }
        let out: Vec<f64> = (0..n)
            .map(|v| link_flow[offsets[v]..offsets[v + 1]].iter().sum())
            .collect();
        FlowNet {
            flow: out.clone(),
            out,
            offsets,
            targets,
            link_flow,
        }
    }

    fn n(&self) -> usize {
        self.flow.len()
    }

    fn links(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.link_flow[r].iter().copied())
    }

    /// Collapses every module into one node; intra-module links vanish into
    /// the node's visit rate.
    fn aggregate(&self, module_of: &[usize], count: usize) -> FlowNet {
        let mut members = vec![Vec::new(); count];
        for (v, &m) in module_of.iter().enumerate() {
            members[m].push(v);
        }
        let mut flow = vec![0.0; count];
        let mut offsets = Vec::with_capacity(count + 1);
        let mut targets = Vec::new();
        let mut link_flow = Vec::new();
        let mut acc = vec![0.0; count];
        let mut touched = Vec::new();
        offsets.push(0);
        for (m, mem) in members.iter().enumerate() {
            for &v in mem {
                flow[m] += self.flow[v];
                for (u, f) in self.links(v) {
                    let mu = module_of[u];
                    if mu != m {
                        if acc[mu] == 0.0 {
                            touched.push(mu);
                        }
                        acc[mu] += f;
                    }
                }
            }
            touched.sort_unstable();
            for &mu in &touched {
                targets.push(mu);
                link_flow.push(acc[mu]);
                acc[mu] = 0.0;
            }
            touched.clear();
            offsets.push(targets.len());
        }
        let out = (0..count)
            .map(|m| link_flow[offsets[m]..offsets[m + 1]].iter().sum())
            .collect();
        FlowNet {
            flow,
            out,
            offsets,
            targets,
            link_flow,
        }
    }

    /// Codelength of an assignment over this net. The constant node-entropy
    /// term is taken over this net's nodes, so values are only comparable
    /// between assignments of the same net.
    fn codelength(&self, module_of: &[usize], count: usize) -> f64 {
        let mut exit = vec![0.0; count];
        let mut interior = vec![0.0; count];
        for v in 0..self.n() {
            let m = module_of[v];
            interior[m] += self.flow[v];
            for (u, f) in self.links(v) {
                if module_of[u] != m {
                    exit[m] += f;
                }
            }
        }
        let total_exit: f64 = exit.iter().sum();
        plogp(total_exit)
            - 2.0 * exit.iter().map(|&q| plogp(q)).sum::<f64>()
            - self.flow.iter().map(|&p| plogp(p)).sum::<f64>()
            + exit
                .iter()
                .zip(&interior)
                .map(|(&q, &s)| plogp(q + s))
                .sum::<f64>()
    }
}

/// Mutable module bookkeeping during local moving.
struct ModuleState {
    module_of: Vec<usize>,
    exit: Vec<f64>,
    interior: Vec<f64>,
    size: Vec<usize>,
    total_exit: f64,
    free: BTreeSet<usize>,
}

impl ModuleState {
    fn from_assignment(net: &FlowNet, module_of: &[usize], count: usize) -> Self {
        let mut exit = vec![0.0; count];
        let mut interior = vec![0.0; count];
        let mut size = vec![0; count];
        for v in 0..net.n() {
            let m = module_of[v];
            size[m] += 1;
            interior[m] += net.flow[v];
            for (u, f) in net.links(v) {
                if module_of[u] != m {
                    exit[m] += f;
                }
            }
        }
        let free = (0..count).filter(|&m| size[m] == 0).collect();
        ModuleState {
            module_of: module_of.to_vec(),
            total_exit: exit.iter().sum(),
            exit,
            interior,
            size,
            free,
        }
    }

    fn singletons(net: &FlowNet) -> Self {
        let n = net.n();
        ModuleState {
            module_of: (0..n).collect(),
            exit: net.out.clone(),
            interior: net.flow.clone(),
            size: vec![1; n],
            total_exit: net.out.iter().sum(),
            free: BTreeSet::new(),
        }
    }

    fn gain(&self, net: &FlowNet, v: usize, target: usize, to_old: f64, to_new: f64) -> f64 {
        let current = self.module_of[v];
        let (new_exit, new_interior) = if target < self.exit.len() {
            (self.exit[target], self.interior[target])
        } else {
            (0.0, 0.0)
        };
        delta_codelength(
            self.total_exit,
            self.exit[current],
            self.interior[current],
            new_exit,
            new_interior,
            net.flow[v],
            net.out[v],
            to_old,
            to_new,
        )
    }

    fn apply(&mut self, net: &FlowNet, v: usize, target: usize, to_old: f64, to_new: f64) {
        let current = self.module_of[v];
        if target == self.exit.len() {
            self.exit.push(0.0);
            self.interior.push(0.0);
            self.size.push(0);
        }
        self.free.remove(&target);
        let old_exit = self.exit[current];
        let new_exit = self.exit[target];
        self.exit[current] = (old_exit - net.out[v] + 2.0 * to_old).max(0.0);
        self.exit[target] = (new_exit + net.out[v] - 2.0 * to_new).max(0.0);
        self.interior[current] = (self.interior[current] - net.flow[v]).max(0.0);
        self.interior[target] += net.flow[v];
        self.total_exit += self.exit[current] + self.exit[target] - old_exit - new_exit;
        self.size[current] -= 1;
        self.size[target] += 1;
        if self.size[current] == 0 {
            self.exit[current] = 0.0;
            self.interior[current] = 0.0;
            self.free.insert(current);
        }
        self.module_of[v] = target;
    }

    /// Renumbers non-empty modules densely in order of first appearance.
    fn compact(&self) -> (Vec<usize>, usize) {
        canonical(&self.module_of)
    }
}

fn canonical(module_of: &[usize]) -> (Vec<usize>, usize) {
    let mut remap = std::collections::HashMap::new();
    let out = module_of
        .iter()
        .map(|&m| {
            let next = remap.len();
            *remap.entry(m).or_insert(next)
        })
        .collect();
    (out, remap.len())
}

/// Repeated sweeps of greedy single-node moves. Returns the total
/// codelength reduction achieved.
fn local_moving(
    net: &FlowNet,
    state: &mut ModuleState,
    rng: &mut ChaCha8Rng,
    config: &InfomapConfig,
) -> f64 {
    let n = net.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut acc = vec![0.0; state.exit.len().max(n) + 1];
    let mut touched: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for _ in 0..config.max_sweeps.max(1) {
        order.shuffle(rng);
        let mut sweep_gain = 0.0;
        for &v in &order {
            let current = state.module_of[v];
            for (u, f) in net.links(v) {
                let m = state.module_of[u];
                if m >= acc.len() {
                    acc.resize(m + 1, 0.0);
                }
                if acc[m] == 0.0 {
                    touched.push(m);
                }
                acc[m] += f;
            }
            let to_old = acc[current];

            let mut best_gain = 0.0;
            let mut best_target = current;
            let mut consider = |target: usize, to_new: f64, best_gain: &mut f64| {
                let gain = state.gain(net, v, target, to_old, to_new);
                if gain < *best_gain || (gain == *best_gain && target < best_target) {
                    *best_gain = gain;
                    best_target = target;
                }
            };
            touched.sort_unstable();
            for &m in &touched {
                if m != current {
                    consider(m, acc[m], &mut best_gain);
                }
            }
            if state.size[current] > 1 {
                let fresh = state.free.first().copied().unwrap_or(state.exit.len());
                consider(fresh, 0.0, &mut best_gain);
            }

            if best_target != current && best_gain < -MIN_MOVE_GAIN {
                let to_new = if best_target < acc.len() {
                    acc[best_target]
                } else {
                    0.0
                };
                state.apply(net, v, best_target, to_old, to_new);
                sweep_gain -= best_gain;
            }
            for &m in &touched {
                acc[m] = 0.0;
            }
            touched.clear();
            if acc.len() < state.exit.len() + 1 {
                acc.resize(state.exit.len() + 1, 0.0);
            }
        }
        total += sweep_gain;
        if sweep_gain < config.min_gain {
            break;
        }
    }
    total
}

/// One optimisation trial on a connected flow network.
fn optimize(net: &FlowNet, config: &InfomapConfig, seed: u64) -> (f64, Vec<usize>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = net.n();
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut count = n;
    let mut best = net.codelength(&assignment, count);

    for _ in 0..MAX_ROUNDS {
        let mut state = ModuleState::from_assignment(net, &assignment, count);
        local_moving(net, &mut state, &mut rng, config);
        (assignment, count) = state.compact();

        while count > 1 {
            let coarse = net.aggregate(&assignment, count);
            let mut state = ModuleState::singletons(&coarse);
            if local_moving(&coarse, &mut state, &mut rng, config) <= 0.0 {
                break;
            }
            let (merged, merged_count) = state.compact();
            if merged_count >= count {
                break;
            }
            for m in assignment.iter_mut() {
                *m = merged[*m];
            }
            count = merged_count;
        }

        let l = net.codelength(&assignment, count);
        let improved = best - l;
        best = best.min(l);
        if improved < config.min_gain {
            break;
        }
    }
    (best, assignment, count)
}

/// Finds a partition minimising the two-level map equation.
///
/// Each connected component is clustered on its own; isolated vertices get
/// their own module. The best of `config.trials` seeded restarts is kept
/// (lowest codelength, then lowest trial index), so the result depends only
/// on `(g, config)`.
pub fn infomap(g: &WeightedGraph, config: &InfomapConfig) -> Partition {
    let flow = flow_or_zero(g);
    let n = g.n();
    let (comp, comp_count) = g.components();
    let mut members = vec![Vec::new(); comp_count];
    for v in 0..n {
        members[comp[v]].push(v);
    }
    let trials = config.trials.max(1);

    let mut assignment = vec![0usize; n];
    let mut next_module = 0;
    for (c, mem) in members.iter().enumerate() {
        if mem.len() == 1 {
            assignment[mem[0]] = next_module;
            next_module += 1;
            continue;
        }
        let sub = g.induced_subgraph(mem);
        let net = FlowNet::from_graph(&sub);
        let comp_seed = derive_seed(config.seed, c as u64);
        let results: Vec<(f64, Vec<usize>, usize)> = (0..trials)
            .into_par_iter()
            .map(|t| optimize(&net, config, derive_seed(comp_seed, t as u64)))
            .collect();
        let mut best = 0;
        for (t, r) in results.iter().enumerate() {
            if r.0 < results[best].0 {
                best = t;
            }
        }
        let (_, local, count) = &results[best];
        for (i, &v) in mem.iter().enumerate() {
            assignment[v] = next_module + local[i];
        }
        next_module += count;
    }

    let (module_of, count) = canonical(&assignment);
    Partition::build(g, &flow, module_of, count)
}
