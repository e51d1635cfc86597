//! OTIS Hyper Hexa-Cell topology.
//!
//! A one-dimensional HHC cell has six nodes arranged as two fully connected
//! triangles `{0,1,2}` and `{3,4,5}` plus three facing edges `0–5`, `1–3` and
//! `2–4`. A `d`-dimensional HHC replaces every vertex of a `(d−1)`-cube by a
//! cell; each cube edge becomes six parallel links joining equally numbered
//! cell nodes. An OHHC network is `G` copies of that HHC (the groups) joined
//! by optical transpose links: node `x` of group `y` is wired to node `y` of
//! group `x`.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{OhhcError, Result};

/// Number of processors in a one-dimensional HHC cell.
pub const CELL_SIZE: usize = 6;

/// Intra-cell electronic edges: two triangles and the three facing pairs.
pub const CELL_EDGES: [(usize, usize); 9] = [
    (0, 1),
    (0, 2),
    (1, 2),
    (3, 4),
    (3, 5),
    (4, 5),
    (0, 5),
    (1, 3),
    (2, 4),
];

/// How many groups the network has relative to the processors per group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupMode {
    /// `G = P`
    Full,
    /// `G = P / 2`
    Half,
}

impl GroupMode {
    pub const ALL: [GroupMode; 2] = [GroupMode::Full, GroupMode::Half];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupMode::Full => "full",
            GroupMode::Half => "half",
        }
    }
}

impl fmt::Display for GroupMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GroupMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(GroupMode::Full),
            "half" => Ok(GroupMode::Half),
            other => Err(format!("unknown group mode `{other}` (expected full|half)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OhhcConfig {
    dimension: u32,
    group_mode: GroupMode,
}

impl OhhcConfig {
    pub fn new(dimension: u32, group_mode: GroupMode) -> Result<Self> {
        if dimension < 1 {
            return Err(OhhcError::InvalidDimension(dimension));
        }
        // 6 * 2^(d-1) processors per group must fit comfortably in a usize.
        if dimension > 30 {
            return Err(OhhcError::OutOfRange {
                what: "dimension",
                index: dimension as usize,
                limit: 30,
            });
        }
        Ok(Self {
            dimension,
            group_mode,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn group_mode(&self) -> GroupMode {
        self.group_mode
    }

    /// Hypercube vertices per group, `2^(d−1)`.
    pub fn subgroups_per_group(&self) -> usize {
        1 << (self.dimension - 1)
    }

    /// `P = 6 · 2^(d−1)`
    pub fn processors_per_group(&self) -> usize {
        CELL_SIZE * self.subgroups_per_group()
    }

    /// `G`
    pub fn group_count(&self) -> usize {
        match self.group_mode {
            GroupMode::Full => self.processors_per_group(),
            GroupMode::Half => self.processors_per_group() / 2,
        }
    }

    /// `N = G · P`
    pub fn node_count(&self) -> usize {
        self.group_count() * self.processors_per_group()
    }

    /// Maps a flat index onto its `(group, subgroup, cell node)` coordinates.
    pub fn resolve(&self, flat_index: usize) -> Result<NodeAddress> {
        let n = self.node_count();
        if flat_index >= n {
            return Err(OhhcError::OutOfRange {
                what: "flat index",
                index: flat_index,
                limit: n,
            });
        }
        let p = self.processors_per_group();
        let within = flat_index % p;
        Ok(NodeAddress {
            group_id: flat_index / p,
            hhc_subgroup_id: within / CELL_SIZE,
            hhc_node_id: within % CELL_SIZE,
            flat_index,
        })
    }

    /// Inverse of [`resolve`](Self::resolve).
    pub fn address(
        &self,
        group_id: usize,
        hhc_subgroup_id: usize,
        hhc_node_id: usize,
    ) -> Result<NodeAddress> {
        let check = |what, index, limit| {
            if index < limit {
                Ok(())
            } else {
                Err(OhhcError::OutOfRange { what, index, limit })
            }
        };
        check("group id", group_id, self.group_count())?;
        check("hhc subgroup id", hhc_subgroup_id, self.subgroups_per_group())?;
        check("hhc node id", hhc_node_id, CELL_SIZE)?;
        Ok(NodeAddress {
            group_id,
            hhc_subgroup_id,
            hhc_node_id,
            flat_index: group_id * self.processors_per_group()
                + CELL_SIZE * hhc_subgroup_id
                + hhc_node_id,
        })
    }

    /// Address of the node with the given within-group index.
    pub fn address_within(&self, group_id: usize, within_group: usize) -> Result<NodeAddress> {
        self.address(
            group_id,
            within_group / CELL_SIZE,
            within_group % CELL_SIZE,
        )
        .and_then(|a| {
            if within_group < self.processors_per_group() {
                Ok(a)
            } else {
                Err(OhhcError::OutOfRange {
                    what: "within-group index",
                    index: within_group,
                    limit: self.processors_per_group(),
                })
            }
        })
    }

    /// Transpose partner of a node, if it has an optical link.
    ///
    /// Full mode pairs `(y, x)` with `(x, y)` for every `x ≠ y`. Half mode only
    /// wires nodes whose within-group index is itself a valid group id.
    fn transpose(&self, addr: &NodeAddress) -> Option<NodeAddress> {
        let x = addr.within_group_index();
        let y = addr.group_id;
        if x == y || x >= self.group_count() {
            return None;
        }
        self.address_within(x, y).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeAddress {
    pub group_id: usize,
    pub hhc_subgroup_id: usize,
    pub hhc_node_id: usize,
    pub flat_index: usize,
}

impl NodeAddress {
    pub fn within_group_index(&self) -> usize {
        CELL_SIZE * self.hhc_subgroup_id + self.hhc_node_id
    }

    /// Head of a group: hypercube vertex 0, cell node 0.
    pub fn is_group_head(&self) -> bool {
        self.hhc_subgroup_id == 0 && self.hhc_node_id == 0
    }

    pub fn is_master(&self) -> bool {
        self.group_id == 0 && self.is_group_head()
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g{}.h{}.n{} (#{})",
            self.group_id, self.hhc_subgroup_id, self.hhc_node_id, self.flat_index
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Electronic,
    Optical,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Electronic => "electronic",
            LinkKind::Optical => "optical",
        }
    }
}

/// Undirected link; `a.flat_index < b.flat_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub a: NodeAddress,
    pub b: NodeAddress,
    pub kind: LinkKind,
}

impl Link {
    fn new(x: NodeAddress, y: NodeAddress, kind: LinkKind) -> Self {
        let (a, b) = if x.flat_index <= y.flat_index {
            (x, y)
        } else {
            (y, x)
        };
        Link { a, b, kind }
    }
}

/// The complete network. Immutable once built.
#[derive(Debug, Clone)]
pub struct OhhcTopology {
    config: OhhcConfig,
    nodes: Vec<NodeAddress>,
    electronic_edges: Vec<Link>,
    optical_edges: Vec<Link>,
    adjacency: Vec<Vec<usize>>,
    partner: Vec<Option<usize>>,
}

impl OhhcTopology {
    pub fn build(config: OhhcConfig) -> Result<Self> {
        let n = config.node_count();
        let subgroups = config.subgroups_per_group();
        let nodes: Vec<NodeAddress> = (0..n)
            .map(|i| config.resolve(i))
            .collect::<Result<_>>()?;

        let mut electronic_edges = Vec::new();
        for g in 0..config.group_count() {
            for h in 0..subgroups {
                for &(x, y) in &CELL_EDGES {
                    electronic_edges.push(Link::new(
                        config.address(g, h, x)?,
                        config.address(g, h, y)?,
                        LinkKind::Electronic,
                    ));
                }
                for bit in 0..config.dimension() - 1 {
                    let other = h ^ (1 << bit);
                    if other < h {
                        continue;
                    }
                    for k in 0..CELL_SIZE {
                        electronic_edges.push(Link::new(
                            config.address(g, h, k)?,
                            config.address(g, other, k)?,
                            LinkKind::Electronic,
                        ));
                    }
                }
            }
        }
        electronic_edges.sort_unstable();

        let partner: Vec<Option<usize>> = nodes
            .iter()
            .map(|a| config.transpose(a).map(|p| p.flat_index))
            .collect();
        let optical_edges: Vec<Link> = nodes
            .iter()
            .filter_map(|a| {
                let p = partner[a.flat_index]?;
                (a.flat_index < p).then(|| Link::new(*a, nodes[p], LinkKind::Optical))
            })
            .collect();

        let mut adjacency = vec![Vec::new(); n];
        for e in &electronic_edges {
            adjacency[e.a.flat_index].push(e.b.flat_index);
            adjacency[e.b.flat_index].push(e.a.flat_index);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        Ok(Self {
            config,
            nodes,
            electronic_edges,
            optical_edges,
            adjacency,
            partner,
        })
    }

    pub fn config(&self) -> &OhhcConfig {
        &self.config
    }

    pub fn nodes(&self) -> &[NodeAddress] {
        &self.nodes
    }

    pub fn electronic_edges(&self) -> &[Link] {
        &self.electronic_edges
    }

    pub fn optical_edges(&self) -> &[Link] {
        &self.optical_edges
    }

    pub fn node(&self, flat_index: usize) -> Result<NodeAddress> {
        self.nodes
            .get(flat_index)
            .copied()
            .ok_or(OhhcError::OutOfRange {
                what: "flat index",
                index: flat_index,
                limit: self.nodes.len(),
            })
    }

    fn check(&self, addr: &NodeAddress) -> Result<usize> {
        match self.nodes.get(addr.flat_index) {
            Some(known) if known == addr => Ok(addr.flat_index),
            _ => Err(OhhcError::UnknownNode(*addr)),
        }
    }

    pub fn electronic_neighbors(&self, addr: &NodeAddress) -> Result<Vec<NodeAddress>> {
        let i = self.check(addr)?;
        Ok(self.adjacency[i].iter().map(|&j| self.nodes[j]).collect())
    }

    pub fn optical_partner(&self, addr: &NodeAddress) -> Result<Option<NodeAddress>> {
        let i = self.check(addr)?;
        Ok(self.partner[i].map(|j| self.nodes[j]))
    }

    /// Kind of the direct link between two nodes, if any.
    pub fn link_between(&self, a: usize, b: usize) -> Option<LinkKind> {
        if self.adjacency.get(a)?.binary_search(&b).is_ok() {
            Some(LinkKind::Electronic)
        } else if self.partner.get(a).copied().flatten() == Some(b) {
            Some(LinkKind::Optical)
        } else {
            None
        }
    }

    /// Exact diameter by breadth-first search from every node.
    ///
    /// With `group_only` the search is confined to the electronic subgraph of
    /// group 0 (all groups are isomorphic).
    pub fn diameter(&self, group_only: bool) -> usize {
        let limit = if group_only {
            self.config.processors_per_group()
        } else {
            self.nodes.len()
        };
        let mut dist = vec![usize::MAX; limit];
        let mut queue = VecDeque::with_capacity(limit);
        let mut best = 0;
        for source in 0..limit {
            dist.fill(usize::MAX);
            dist[source] = 0;
            queue.clear();
            queue.push_back(source);
            while let Some(u) = queue.pop_front() {
                let next = dist[u] + 1;
                let optical = if group_only { None } else { self.partner[u] };
                for v in self.adjacency[u].iter().copied().chain(optical) {
                    if v < limit && dist[v] == usize::MAX {
                        dist[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            let far = dist.iter().copied().max().unwrap_or(0);
            if far == usize::MAX {
                // disconnected graphs have no finite diameter
                return usize::MAX;
            }
            best = best.max(far);
        }
        best
    }

    /// Writes one `E|O <flat_a> <flat_b>` line per edge, electronic first.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.electronic_edges {
            writeln!(out, "E {} {}", e.a.flat_index, e.b.flat_index)?;
        }
        for e in &self.optical_edges {
            writeln!(out, "O {} {}", e.a.flat_index, e.b.flat_index)?;
        }
        Ok(())
    }
}

/// Free-function form of [`OhhcTopology::build`].
pub fn build_ohhc(config: OhhcConfig) -> Result<OhhcTopology> {
    OhhcTopology::build(config)
}
