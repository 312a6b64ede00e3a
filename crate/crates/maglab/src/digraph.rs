//! Finite digraphs and the graph algorithms the enrichment constructions
//! depend on: transitive closure, strong components, seeded spanning
//! structures, and oriented tree paths.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MagError, Result};

/// A finite digraph with opaque string vertex identifiers.
///
/// Vertices are mapped to dense indices by list order; all matrix indexing
/// downstream uses that order. Loops are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    arcs: BTreeSet<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new<S: AsRef<str>>(vertices: Vec<String>, arcs: &[(S, S)]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(MagError::DuplicateVertex(v.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in arcs {
            let (a, b) = (a.as_ref(), b.as_ref());
            let i = *index
                .get(a)
                .ok_or_else(|| MagError::UnknownVertex(a.to_string()))?;
            let j = *index
                .get(b)
                .ok_or_else(|| MagError::UnknownVertex(b.to_string()))?;
            if !set.insert((i, j)) {
                return Err(MagError::DuplicateArc(a.to_string(), b.to_string()));
            }
        }
        Ok(Self::from_indexed(vertices, index, set))
    }

    /// Builds a digraph on vertices named `0..n-1` from index arcs.
    pub fn from_index_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let vertices: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let named: Vec<(String, String)> = arcs
            .iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect();
        Digraph::new(vertices, &named)
    }

    fn from_indexed(
        vertices: Vec<String>,
        index: HashMap<String, usize>,
        arcs: BTreeSet<(usize, usize)>,
    ) -> Self {
        let n = vertices.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(i, j) in &arcs {
            out_adj[i].push(j);
            in_adj[j].push(i);
        }
        Digraph {
            vertices,
            index,
            arcs,
            out_adj,
            in_adj,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.contains(&(i, j))
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_adj[i]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_adj[i].len()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_adj[i].len()
    }

    /// The sign table on ordered vertex pairs: `+1` if `(i, j)` is an arc,
    /// `-1` if only `(j, i)` is, `0` otherwise.
    pub fn epsilon(&self, i: usize, j: usize) -> i8 {
        if self.has_arc(i, j) {
            1
        } else if self.has_arc(j, i) {
            -1
        } else {
            0
        }
    }

    /// Weak components (components of the underlying undirected graph),
    /// as a component id per vertex plus the component list.
    pub fn weak_components(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([s]);
            comp[s] = id;
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &v in self.out_adj[u].iter().chain(self.in_adj[u].iter()) {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        (comp, comps)
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.weak_components().1.len() <= 1
    }

    /// The category determined by this digraph: loops on all vertices plus
    /// the transitive closure, via BFS per vertex.
    pub fn transitive_closure(&self) -> ClosureCategory {
        let n = self.vertex_count();
        let mut closure = BTreeSet::new();
        for v in 0..n {
            closure.insert((v, v));
        }
        for s in 0..n {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                for &v in &self.out_adj[u] {
                    closure.insert((s, v));
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        let nonloop: Vec<(usize, usize)> = closure.iter().copied().filter(|&(i, j)| i != j).collect();
        ClosureCategory {
            base: self.clone(),
            closure_arcs: closure,
            nonloop,
        }
    }

    /// Strongly connected components, plus the arcs that can reach a
    /// nontrivial strong component (one with a directed cycle through it).
    pub fn strong_components(&self) -> SccInfo {
        let n = self.vertex_count();
        // Kosaraju: order by finish time on the forward graph, then sweep the
        // reverse graph.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            // Iterative DFS with an explicit neighbor cursor.
            let mut stack = vec![(s, 0usize)];
            seen[s] = true;
            while let Some(&mut (u, ref mut cursor)) = stack.last_mut() {
                if *cursor < self.out_adj[u].len() {
                    let v = self.out_adj[u][*cursor];
                    *cursor += 1;
                    if !seen[v] {
                        seen[v] = true;
                        stack.push((v, 0));
                    }
                } else {
                    order.push(u);
                    stack.pop();
                }
            }
        }
        let mut comp_of = vec![usize::MAX; n];
        let mut components = Vec::new();
        for &s in order.iter().rev() {
            if comp_of[s] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([s]);
            comp_of[s] = id;
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &v in &self.in_adj[u] {
                    if comp_of[v] == usize::MAX {
                        comp_of[v] = id;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        let nontrivial: Vec<bool> = components
            .iter()
            .map(|c| c.len() > 1 || c.iter().any(|&v| self.has_arc(v, v)))
            .collect();
        let is_dag = !nontrivial.iter().any(|&b| b);
        // Reverse reachability from vertices of nontrivial components.
        let mut can_reach_cycle = vec![false; n];
        let mut queue: VecDeque<usize> = components
            .iter()
            .zip(&nontrivial)
            .filter(|(_, &nt)| nt)
            .flat_map(|(c, _)| c.iter().copied())
            .collect();
        for &v in &queue {
            can_reach_cycle[v] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.in_adj[u] {
                if !can_reach_cycle[v] {
                    can_reach_cycle[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let reach_arcs: BTreeSet<(usize, usize)> = self
            .arcs()
            .filter(|&(_, k)| can_reach_cycle[k])
            .collect();
        SccInfo {
            comp_of,
            components,
            is_dag,
            can_reach_cycle,
            reach_arcs,
        }
    }

    /// Seeded spanning structure: per weak component, the minimum spanning
    /// tree of the underlying graph under i.i.d. uniform temporary edge
    /// weights, with ties broken by lexicographic edge order. Deterministic
    /// given `(self, seed)`.
    pub fn spanning_structure(&self, seed: u64) -> SpanningStructure {
        let n = self.vertex_count();
        let edges: Vec<(usize, usize)> = self
            .arcs()
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weighted: Vec<(f64, (usize, usize))> =
            edges.into_iter().map(|e| (rng.random::<f64>(), e)).collect();
        weighted.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
        let mut dsu = DisjointSet::new(n);
        let mut tree = BTreeSet::new();
        for (_, (u, v)) in weighted {
            if dsu.union(u, v) {
                let oriented = if self.has_arc(u, v) { (u, v) } else { (v, u) };
                tree.insert(oriented);
            }
        }
        let (component_of, _) = self.weak_components();
        SpanningStructure::build(self, tree, component_of)
    }

    /// Spanning structure with caller-chosen oriented tree arcs (each must be
    /// an arc of the digraph and the set must be a spanning forest).
    pub fn spanning_structure_from_arcs(&self, arcs: &[(usize, usize)]) -> Result<SpanningStructure> {
        let mut dsu = DisjointSet::new(self.vertex_count());
        let mut tree = BTreeSet::new();
        for &(a, b) in arcs {
            if !self.has_arc(a, b) {
                return Err(MagError::Invalid(format!(
                    "({}, {}) is not an arc",
                    self.name(a),
                    self.name(b)
                )));
            }
            if !dsu.union(a, b) {
                return Err(MagError::Invalid("tree arcs contain a cycle".into()));
            }
            tree.insert((a, b));
        }
        let (component_of, comps) = self.weak_components();
        if tree.len() != self.vertex_count() - comps.len() {
            return Err(MagError::Invalid("tree arcs do not span".into()));
        }
        Ok(SpanningStructure::build(self, tree, component_of))
    }
}

/// Strong-component decomposition summary.
#[derive(Debug, Clone)]
pub struct SccInfo {
    pub comp_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    pub is_dag: bool,
    pub can_reach_cycle: Vec<bool>,
    /// Arcs whose head can reach a nontrivial strong component.
    pub reach_arcs: BTreeSet<(usize, usize)>,
}

/// The category `<D>` determined by a digraph: loops on every vertex plus the
/// transitive closure of the arc set.
#[derive(Debug, Clone)]
pub struct ClosureCategory {
    base: Digraph,
    closure_arcs: BTreeSet<(usize, usize)>,
    nonloop: Vec<(usize, usize)>,
}

impl ClosureCategory {
    pub fn base(&self) -> &Digraph {
        &self.base
    }

    pub fn closure_arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.closure_arcs.iter().copied()
    }

    /// Nonloop closure arcs, lexicographically ordered.
    pub fn nonloop_arcs(&self) -> &[(usize, usize)] {
        &self.nonloop
    }

    pub fn has_closure_arc(&self, i: usize, j: usize) -> bool {
        self.closure_arcs.contains(&(i, j))
    }

    /// Nondegenerate length-two paths: triples `(j, k, l)` with `(j, k)` and
    /// `(k, l)` nonloop closure arcs and `j != l`, in lexicographic order.
    pub fn nondegenerate_paths(&self) -> Vec<(usize, usize, usize)> {
        let n = self.base.vertex_count();
        let mut out_nonloop = vec![Vec::new(); n];
        for &(j, k) in &self.nonloop {
            out_nonloop[j].push(k);
        }
        let mut paths = Vec::new();
        for &(j, k) in &self.nonloop {
            for &l in &out_nonloop[k] {
                if l != j {
                    paths.push((j, k, l));
                }
            }
        }
        paths
    }
}

/// A spanning forest of the underlying undirected graph. Each tree edge is
/// stored as an ordered pair agreeing with an arc of the digraph (the
/// lexicographically smaller pair when both directions are arcs).
#[derive(Debug, Clone)]
pub struct SpanningStructure {
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    arc_set: BTreeSet<(usize, usize)>,
    names: Vec<String>,
}

impl SpanningStructure {
    fn build(d: &Digraph, edges: BTreeSet<(usize, usize)>, component_of: Vec<usize>) -> Self {
        let mut adj = vec![Vec::new(); d.vertex_count()];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        SpanningStructure {
            edges,
            adj,
            component_of,
            arc_set: d.arcs().collect(),
            names: d.vertex_names().to_vec(),
        }
    }

    /// Tree edges in their stored orientation.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    /// The paper's sign table on ordered pairs of the base digraph.
    pub fn epsilon(&self, i: usize, j: usize) -> i8 {
        if self.arc_set.contains(&(i, j)) {
            1
        } else if self.arc_set.contains(&(j, i)) {
            -1
        } else {
            0
        }
    }

    /// Stored orientation of the tree edge `{a, b}` traversed from `a` to `b`:
    /// `+1` along the stored arc, `-1` against it, `0` if not a tree edge.
    pub fn orientation(&self, a: usize, b: usize) -> i8 {
        if self.edges.contains(&(a, b)) {
            1
        } else if self.edges.contains(&(b, a)) {
            -1
        } else {
            0
        }
    }

    /// The unique simple tree path from `j` to `k` as traversal steps
    /// `((a, b), sign)`, where `sign` is the stored-orientation sign of the
    /// step. Reversing the path step-by-step and negating signs yields the
    /// path from `k` to `j`.
    pub fn tree_path(&self, j: usize, k: usize) -> Result<Vec<((usize, usize), i8)>> {
        if self.component_of[j] != self.component_of[k] {
            return Err(MagError::PathNotFound(
                self.names[j].clone(),
                self.names[k].clone(),
            ));
        }
        if j == k {
            return Ok(Vec::new());
        }
        let n = self.adj.len();
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([j]);
        parent[j] = j;
        'bfs: while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    if v == k {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        let mut rev = Vec::new();
        let mut cur = k;
        while cur != j {
            let p = parent[cur];
            rev.push(((p, cur), self.orientation(p, cur)));
            cur = p;
        }
        rev.reverse();
        Ok(rev)
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
