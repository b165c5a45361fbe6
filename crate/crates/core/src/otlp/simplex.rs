//! Primal network simplex for the dense transportation problem.
//!
//! Sources `0..n` ship integer supplies to sinks `n..n+m` along arcs
//! `e = i*m + j` with float costs. Arcs are uncapacitated, so every nonbasic
//! arc carries zero flow and only the spanning-tree arcs need flow storage
//! (kept per node, on the arc to its parent).
//!
//! The tree is stored with parent / thread / successor-count arrays and
//! updated incrementally after each pivot (the layout used by LEMON's
//! `NetworkSimplex`). The leaving arc is chosen by the strongly feasible
//! tree rule, which rules out cycling on degenerate pivots. Entering arcs are
//! found by block search.

use alloc::vec::Vec;

use crate::{Error, Result};

const NONE: usize = usize::MAX;
const UP: i8 = 1;
const DOWN: i8 = -1;

/// Optimal flow and node potentials.
pub(crate) struct Solution {
    /// `(i, j, flow)` for basic arcs with positive flow.
    pub flows: Vec<(usize, usize, i64)>,
    /// Potential of each source; `u_i - v_j ≤ cost(i, j)` with equality on
    /// basic arcs.
    pub source_potentials: Vec<f64>,
    pub sink_potentials: Vec<f64>,
}

struct Tree<'a> {
    n: usize,
    m: usize,
    cost: &'a [f64],
    in_tree: Vec<bool>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    pred_dir: Vec<i8>,
    pred_flow: Vec<i64>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pi: Vec<f64>,
    dirty_revs: Vec<usize>,
}

/// Solves `min Σ cost_ij f_ij` over `f ≥ 0` with row sums `supply` and column
/// sums `demand`. Totals must match and every entry must be positive.
pub(crate) fn solve(
    supply: &[i64],
    demand: &[i64],
    cost: &[f64],
    max_pivots: usize,
) -> Result<Solution> {
    let (n, m) = (supply.len(), demand.len());
    debug_assert_eq!(cost.len(), n * m);
    debug_assert_eq!(supply.iter().sum::<i64>(), demand.iter().sum::<i64>());
    let scale = cost.iter().fold(0.0_f64, |a, &c| a.max(c.abs()));
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);

    let mut tree = Tree::north_west_corner(supply, demand, cost);
    let arcs = n * m;
    let block = (libm::ceil(libm::sqrt(arcs as f64)) as usize).max(10).min(arcs);
    let mut next_arc = 0;
    let mut pivots = 0;
    while let Some(entering) = tree.find_entering(&mut next_arc, block, eps) {
        if pivots == max_pivots {
            return Err(Error::Solver(alloc::format!(
                "network simplex exceeded {max_pivots} pivots on a {n}x{m} problem"
            )));
        }
        tree.pivot(entering)?;
        pivots += 1;
    }
    tree.refresh_potentials();

    let mut flows = Vec::with_capacity(n + m);
    for u in 0..n + m {
        if tree.parent[u] != NONE && tree.pred_flow[u] > 0 {
            let e = tree.pred[u];
            flows.push((e / m, e % m, tree.pred_flow[u]));
        }
    }
    flows.sort_unstable();
    // Reduced cost c + π_src - π_tgt ≥ 0, so u = -π satisfies u_i - v_j ≤ c.
    let source_potentials = tree.pi[..n].iter().map(|p| -p).collect();
    let sink_potentials = tree.pi[n..].iter().map(|p| -p).collect();
    Ok(Solution {
        flows,
        source_potentials,
        sink_potentials,
    })
}

impl<'a> Tree<'a> {
    fn source(&self, e: usize) -> usize {
        e / self.m
    }

    fn target(&self, e: usize) -> usize {
        self.n + e % self.m
    }

    /// Initial basis from the north-west corner rule: `n + m - 1` cells
    /// forming a staircase, rooted at source 0. With every supply and
    /// demand positive, the only zero-flow cells join a new source to its
    /// parent sink, i.e. point towards the root, so the initial tree is
    /// strongly feasible.
    fn north_west_corner(supply: &[i64], demand: &[i64], cost: &'a [f64]) -> Self {
        let (n, m) = (supply.len(), demand.len());
        let nodes = n + m;
        let mut cells: Vec<(usize, usize, i64)> = Vec::with_capacity(nodes - 1);
        let (mut i, mut j) = (0, 0);
        let (mut ri, mut rj) = (supply[0], demand[0]);
        loop {
            let f = ri.min(rj);
            cells.push((i, j, f));
            ri -= f;
            rj -= f;
            if i + 1 == n && j + 1 == m {
                break;
            }
            if (ri == 0 && i + 1 < n) || j + 1 == m {
                i += 1;
                ri = supply[i];
            } else {
                j += 1;
                rj = demand[j];
            }
        }
        debug_assert_eq!(cells.len(), nodes - 1);

        let mut adjacency: Vec<Vec<(usize, usize, i64)>> = alloc::vec![Vec::new(); nodes];
        let mut in_tree = alloc::vec![false; n * m];
        for &(i, j, f) in &cells {
            let e = i * m + j;
            in_tree[e] = true;
            adjacency[i].push((n + j, e, f));
            adjacency[n + j].push((i, e, f));
        }

        let mut tree = Tree {
            n,
            m,
            cost,
            in_tree,
            parent: alloc::vec![NONE; nodes],
            pred: alloc::vec![NONE; nodes],
            pred_dir: alloc::vec![0; nodes],
            pred_flow: alloc::vec![0; nodes],
            thread: alloc::vec![0; nodes],
            rev_thread: alloc::vec![0; nodes],
            succ_num: alloc::vec![1; nodes],
            last_succ: alloc::vec![0; nodes],
            pi: alloc::vec![0.0; nodes],
            dirty_revs: Vec::new(),
        };

        // Preorder DFS from the root.
        let mut order = Vec::with_capacity(nodes);
        let mut stack = alloc::vec![0usize];
        let mut visited = alloc::vec![false; nodes];
        visited[0] = true;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &(v, e, f) in adjacency[u].iter().rev() {
                if !visited[v] {
                    visited[v] = true;
                    tree.parent[v] = u;
                    tree.pred[v] = e;
                    tree.pred_flow[v] = f;
                    tree.pred_dir[v] = if v == tree.source(e) { UP } else { DOWN };
                    stack.push(v);
                }
            }
        }
        debug_assert_eq!(order.len(), nodes);
        for k in 0..nodes {
            let (u, next) = (order[k], order[(k + 1) % nodes]);
            tree.thread[u] = next;
            tree.rev_thread[next] = u;
        }
        let mut position = alloc::vec![0; nodes];
        for (k, &u) in order.iter().enumerate() {
            position[u] = k;
        }
        for &u in order.iter().rev() {
            let p = tree.parent[u];
            if p != NONE {
                tree.succ_num[p] += tree.succ_num[u];
            }
        }
        for &u in &order {
            tree.last_succ[u] = order[position[u] + tree.succ_num[u] - 1];
        }
        tree.refresh_potentials();
        tree
    }

    /// Recomputes potentials from the tree in thread order, `π(root) = 0`.
    fn refresh_potentials(&mut self) {
        let root = 0;
        self.pi[root] = 0.0;
        let mut u = self.thread[root];
        while u != root {
            let c = self.cost[self.pred[u]];
            self.pi[u] = self.pi[self.parent[u]] - self.pred_dir[u] as f64 * c;
            u = self.thread[u];
        }
    }

    fn reduced_cost(&self, e: usize) -> f64 {
        self.cost[e] + self.pi[self.source(e)] - self.pi[self.target(e)]
    }

    /// Block search: scan blocks of arcs from `next_arc`, returning the most
    /// negative reduced cost within the first block that has one.
    fn find_entering(&self, next_arc: &mut usize, block: usize, eps: f64) -> Option<usize> {
        let arcs = self.n * self.m;
        let mut best = None;
        let mut min = -eps;
        let mut count = block;
        let mut e = *next_arc;
        for _ in 0..arcs {
            if !self.in_tree[e] {
                let c = self.reduced_cost(e);
                if c < min {
                    min = c;
                    best = Some(e);
                }
            }
            e += 1;
            if e == arcs {
                e = 0;
            }
            count -= 1;
            if count == 0 {
                if best.is_some() {
                    break;
                }
                count = block;
            }
        }
        *next_arc = e;
        best
    }

    fn join_node(&self, mut u: usize, mut v: usize) -> usize {
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        u
    }

    fn pivot(&mut self, in_arc: usize) -> Result<()> {
        let first = self.source(in_arc);
        let second = self.target(in_arc);
        let join = self.join_node(first, second);

        // Leaving arc: flow is pushed along in_arc, down from join to
        // `first` is traversed against arcs pointing up, and from `second`
        // up to join against arcs pointing down. Ties go to the last
        // blocking arc met when walking the cycle from join (second side).
        let mut delta = i64::MAX;
        let mut u_out = NONE;
        let mut on_first = false;
        let mut u = first;
        while u != join {
            if self.pred_dir[u] == UP && self.pred_flow[u] < delta {
                delta = self.pred_flow[u];
                u_out = u;
                on_first = true;
            }
            u = self.parent[u];
        }
        u = second;
        while u != join {
            if self.pred_dir[u] == DOWN && self.pred_flow[u] <= delta {
                delta = self.pred_flow[u];
                u_out = u;
                on_first = false;
            }
            u = self.parent[u];
        }
        if u_out == NONE {
            return Err(Error::Solver("unbounded pivot in transportation problem".into()));
        }
        let (u_in, v_in) = if on_first {
            (first, second)
        } else {
            (second, first)
        };

        if delta > 0 {
            let mut u = first;
            while u != join {
                self.pred_flow[u] -= self.pred_dir[u] as i64 * delta;
                u = self.parent[u];
            }
            let mut u = second;
            while u != join {
                self.pred_flow[u] += self.pred_dir[u] as i64 * delta;
                u = self.parent[u];
            }
        }
        debug_assert_eq!(self.pred_flow[u_out], 0);
        self.in_tree[in_arc] = true;
        self.in_tree[self.pred[u_out]] = false;

        self.update_tree(in_arc, delta, u_in, v_in, u_out, join);

        let sigma = self.pi[v_in] - self.pi[u_in] - self.pred_dir[u_in] as f64 * self.cost[in_arc];
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
        Ok(())
    }

    /// Re-hangs the subtree cut off by removing `pred[u_out]` below `v_in`
    /// via `in_arc`, reversing the stem path `u_in → u_out`.
    fn update_tree(
        &mut self,
        in_arc: usize,
        in_flow: i64,
        u_in: usize,
        v_in: usize,
        u_out: usize,
        join: usize,
    ) {
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];
        let in_dir = if u_in == self.source(in_arc) { UP } else { DOWN };

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            self.pred_flow[u_in] = in_flow;

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            // When old_rev_thread == v_in, join and v_out coincide.
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };

            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for k in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[k];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            // Stem nodes from u_out back to u_in inherit the arc (and flow)
            // of their former child, now their parent.
            let mut tmp_sc = 0;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                self.pred_flow[u] = self.pred_flow[p];
                tmp_sc += self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            self.pred_flow[u_in] = in_flow;
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }
}
