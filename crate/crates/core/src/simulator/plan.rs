//! Static wait/send rules of the gather.
//!
//! Every node sends exactly once, to a fixed target, as soon as it holds the
//! number of bucket units it waits for:
//!
//! - inside a cell, nodes 3, 4, 5 send to 1, 2, 0 and nodes 1, 2 send to 0;
//! - a cell head at hypercube vertex `h > 0` sends to `h − 2^(b)`, where `b`
//!   is the lowest set bit of `h`;
//! - the head of group `g ≠ 0` sends over its optical link to the node with
//!   within-group index `g` in group 0;
//! - group 0 repeats the first two steps and its head, the master, keeps
//!   everything.
//!
//! Wait counts are subtree sums over the resulting forest, so a node that
//! also receives an optical payload waits for `P + 1` units instead of 1.

use serde::Serialize;

use crate::error::{OhhcError, Result};
use crate::topology::{LinkKind, NodeAddress, OhhcConfig, OhhcTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GatherPhase {
    InnerHhc,
    HyperCube,
    Otis,
    GroupZeroInnerHhc,
    GroupZeroHyperCube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SendRule {
    pub target: usize,
    pub phase: GatherPhase,
    pub kind: LinkKind,
}

#[derive(Debug, Clone)]
pub struct GatherPlan {
    config: OhhcConfig,
    wait_units: Vec<usize>,
    send: Vec<Option<SendRule>>,
    hops_to_master: Vec<usize>,
    children: Vec<Vec<usize>>,
}

/// Target of `addr` inside its own cell, or `None` for the cell head.
fn cell_target(cell_node: usize) -> Option<usize> {
    match cell_node {
        0 => None,
        1 | 2 | 5 => Some(0),
        3 => Some(1),
        4 => Some(2),
        _ => unreachable!("cell node ids are < 6"),
    }
}

impl GatherPlan {
    pub fn build(topo: &OhhcTopology) -> Result<Self> {
        let config = *topo.config();
        let n = config.node_count();
        let mut send = vec![None; n];

        for addr in topo.nodes() {
            let group_zero = addr.group_id == 0;
            let (target, phase) = if let Some(k) = cell_target(addr.hhc_node_id) {
                let t = config.address(addr.group_id, addr.hhc_subgroup_id, k)?;
                let phase = if group_zero {
                    GatherPhase::GroupZeroInnerHhc
                } else {
                    GatherPhase::InnerHhc
                };
                (t, phase)
            } else if addr.hhc_subgroup_id > 0 {
                let h = addr.hhc_subgroup_id;
                let t = config.address(addr.group_id, h - (h & h.wrapping_neg()), 0)?;
                let phase = if group_zero {
                    GatherPhase::GroupZeroHyperCube
                } else {
                    GatherPhase::HyperCube
                };
                (t, phase)
            } else if !group_zero {
                let t = config.address_within(0, addr.group_id)?;
                (t, GatherPhase::Otis)
            } else {
                continue; // master
            };

            let kind = topo
                .link_between(addr.flat_index, target.flat_index)
                .ok_or_else(|| {
                    OhhcError::PlanViolation(format!("no link from {addr} to {target}"))
                })?;
            let expected = match phase {
                GatherPhase::Otis => LinkKind::Optical,
                _ => LinkKind::Electronic,
            };
            if kind != expected {
                return Err(OhhcError::PlanViolation(format!(
                    "{addr} -> {target} uses a {kind:?} link in phase {phase:?}"
                )));
            }
            send[addr.flat_index] = Some(SendRule {
                target: target.flat_index,
                phase,
                kind,
            });
        }

        let mut children = vec![Vec::new(); n];
        for (i, rule) in send.iter().enumerate() {
            if let Some(r) = rule {
                children[r.target].push(i);
            }
        }

        // Breadth-first from the master gives hop depths and detects nodes
        // the forest never reaches.
        let mut hops_to_master = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        hops_to_master[0] = 0;
        order.push(0);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &c in &children[u] {
                hops_to_master[c] = hops_to_master[u] + 1;
                order.push(c);
            }
        }
        if order.len() != n {
            return Err(OhhcError::PlanViolation(format!(
                "{} of {n} nodes are not connected to the master",
                n - order.len()
            )));
        }

        let mut wait_units = vec![1usize; n];
        for &u in order.iter().rev() {
            if let Some(r) = send[u] {
                wait_units[r.target] += wait_units[u];
            }
        }

        Ok(Self {
            config,
            wait_units,
            send,
            hops_to_master,
            children,
        })
    }

    pub fn config(&self) -> &OhhcConfig {
        &self.config
    }

    /// Units a node must hold before it sends (for the master: the final total).
    pub fn wait_units(&self, addr: &NodeAddress) -> usize {
        self.wait_units[addr.flat_index]
    }

    pub fn wait_units_flat(&self, flat: usize) -> usize {
        self.wait_units[flat]
    }

    pub fn send_rule(&self, addr: &NodeAddress) -> Option<SendRule> {
        self.send[addr.flat_index]
    }

    pub fn send_rule_flat(&self, flat: usize) -> Option<SendRule> {
        self.send[flat]
    }

    pub fn children(&self, flat: usize) -> &[usize] {
        &self.children[flat]
    }

    pub fn hops_to_master(&self, flat: usize) -> usize {
        self.hops_to_master[flat]
    }

    /// Longest leaf-to-master path in links.
    pub fn max_hops(&self) -> usize {
        self.hops_to_master.iter().copied().max().unwrap_or(0)
    }

    /// Units a cell head holds once the inner-cell phase is complete, before
    /// any hypercube traffic reaches it.
    pub fn cell_accumulation(&self, addr: &NodeAddress) -> usize {
        let head = addr.flat_index - addr.hhc_node_id;
        let own = self.wait_units[head]
            - self.children[head]
                .iter()
                .filter(|&&c| {
                    matches!(
                        self.send[c].map(|r| r.phase),
                        Some(GatherPhase::HyperCube | GatherPhase::GroupZeroHyperCube)
                    )
                })
                .map(|&c| self.wait_units[c])
                .sum::<usize>();
        own
    }

    pub fn sends(&self) -> impl Iterator<Item = (usize, SendRule)> + '_ {
        self.send
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.map(|r| (i, r)))
    }
}

/// The fixed group-0 wait constants of the Full-mode rules, computed in closed
/// form from the base `P + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupZeroWaits {
    /// A cell node that holds its own bucket plus one optical payload.
    pub normal: usize,
    /// Nodes 1 and 2, which additionally receive from 3 and 4.
    pub aggregate: usize,
    /// A cell head whose six nodes all carry an optical payload.
    pub cell_head: usize,
    /// The master cell head after the inner-cell phase.
    pub master: usize,
}

impl GroupZeroWaits {
    pub fn full_mode(config: &OhhcConfig) -> Self {
        let normal = config.processors_per_group() + 1;
        Self {
            normal,
            aggregate: normal * 2,
            cell_head: normal * 6,
            master: normal * 5 + 1,
        }
    }

    /// Wait of the group-0 cell head at hypercube vertex `h > 0`.
    pub fn hypercube_step(&self, subgroup: usize) -> usize {
        self.cell_head * (subgroup & subgroup.wrapping_neg())
    }
}
