//! Fragmentation and coagulation of partitions, samplers whose output is
//! distributionally a single seating-rule draw at transformed parameters,
//! and the level-wise tree sampler built from repeated fragmentation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PdParams;
use crate::partition::{SetPartition, SizeBiasedPartition};
use crate::samplers::sample_crp;
use rand::Rng;

/// Splits every block of `p` by its own partition: block m of `p` is
/// replaced by the blocks of `per_block[m]`, which must partition exactly
/// that block's elements.
pub fn fragment(p: &SetPartition, per_block: &[SetPartition]) -> Result<SetPartition> {
    if per_block.len() != p.m() {
        return Err(Error::invalid(format!(
            "{} blocks but {} fragmenting partitions",
            p.m(),
            per_block.len()
        )));
    }
    let mut blocks = Vec::new();
    for (block, q) in p.blocks().iter().zip(per_block) {
        let mut covered: Vec<usize> = q.blocks().iter().flatten().copied().collect();
        covered.sort_unstable();
        if covered != *block {
            return Err(Error::invalid(format!(
                "fragmenting partition does not cover block {block:?} exactly"
            )));
        }
        blocks.extend(q.blocks().iter().cloned());
    }
    SetPartition::new(blocks)
}

/// Merges blocks of `p` according to a partition `q` of the block indices
/// {1..M}: each block of `q` names a group of `p`-blocks to union.
pub fn coagulate(p: &SetPartition, q: &SetPartition) -> Result<SetPartition> {
    let m = p.m();
    let ground = q.ground_size();
    if ground != m || q.blocks().iter().flatten().any(|&i| i == 0 || i > m) {
        return Err(Error::invalid(format!(
            "grouping must partition the block indices 1..={m}"
        )));
    }
    let mut blocks = Vec::with_capacity(q.m());
    for group in q.blocks() {
        let mut merged = Vec::new();
        for &idx in group {
            merged.extend_from_slice(&p.blocks()[idx - 1]);
        }
        merged.sort_unstable();
        blocks.push(merged);
    }
    SetPartition::new(blocks)
}

/// Positions 1..=k within `members` mapped back to element ids.
fn blocks_over(members: &[usize], part: &SizeBiasedPartition) -> Vec<Vec<usize>> {
    part.to_set_partition()
        .blocks()
        .iter()
        .map(|block| block.iter().map(|&pos| members[pos - 1]).collect())
        .collect()
}

/// One coarse draw at (a1*a2, b) and per-block splits at (a1, -a1*a2).
#[derive(Debug, Clone, Serialize)]
pub struct FragmentedDraw {
    pub coarse: SizeBiasedPartition,
    pub fine: SizeBiasedPartition,
}

/// Draws a coarse partition from the seating rule at (a1*a2, b), then
/// fragments each block by an independent draw at (a1, -a1*a2). The fine
/// partition is distributed as a single draw at (a1, b).
pub fn sample_fragmented_crd<R: Rng + ?Sized>(
    n: usize,
    a1: f64,
    a2: f64,
    b: f64,
    rng: &mut R,
) -> Result<FragmentedDraw> {
    if !(0.0 < a1 && a1 < 1.0) {
        return Err(Error::invalid(format!("fragmentation needs 0 < a1 < 1, got {a1}")));
    }
    if !(0.0 <= a2 && a2 < 1.0) {
        return Err(Error::invalid(format!("fragmentation needs 0 <= a2 < 1, got {a2}")));
    }
    let coarse_params = PdParams::new(a1 * a2, b)?;
    let inner_params = PdParams::new(a1, -a1 * a2)?;
    let coarse = sample_crp(coarse_params, n, rng)?;
    let coarse_sets = coarse.to_set_partition();
    let mut fine_blocks = Vec::new();
    for block in coarse_sets.blocks() {
        let split = sample_crp(inner_params, block.len(), rng)?;
        fine_blocks.extend(blocks_over(block, &split));
    }
    let fine = SetPartition::new(fine_blocks)?.to_size_biased()?;
    Ok(FragmentedDraw { coarse, fine })
}

/// One fine draw at (a1, b) and the grouping that merges it.
#[derive(Debug, Clone, Serialize)]
pub struct CoagulatedDraw {
    pub fine: SizeBiasedPartition,
    pub grouping: SizeBiasedPartition,
    pub coarse: SizeBiasedPartition,
}

/// Draws a fine partition from the seating rule at (a1, b), then merges its
/// blocks by an independent draw at (a2, b/a1) over the block indices. The
/// coarse partition is distributed as a single draw at (a1*a2, b).
pub fn sample_coagulated_crd<R: Rng + ?Sized>(
    n: usize,
    a1: f64,
    a2: f64,
    b: f64,
    rng: &mut R,
) -> Result<CoagulatedDraw> {
    if !(0.0 < a1 && a1 < 1.0) {
        return Err(Error::invalid(format!("coagulation needs 0 < a1 < 1, got {a1}")));
    }
    if !(0.0 <= a2 && a2 < 1.0) {
        return Err(Error::invalid(format!("coagulation needs 0 <= a2 < 1, got {a2}")));
    }
    let fine_params = PdParams::new(a1, b)?;
    let group_params = PdParams::new(a2, b / a1)?;
    let fine = sample_crp(fine_params, n, rng)?;
    let grouping = sample_crp(group_params, fine.m(), rng)?;
    let coarse = coagulate(&fine.to_set_partition(), &grouping.to_set_partition())?
        .to_size_biased()?;
    Ok(CoagulatedDraw { fine, grouping, coarse })
}

/// One node of a sampled hierarchy: a subset of {1..N} at a given depth.
#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    /// "{depth}:{least member}"; unique because siblings have disjoint
    /// member sets.
    pub id: String,
    pub depth: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeEdge {
    pub child: String,
    pub parent: String,
}

/// A sampled hierarchy over {1..N}: the root holds everything, children of
/// any node partition its members, and every leaf sits at the final depth
/// (singletons are copied down unchanged).
#[derive(Debug, Clone, Serialize)]
pub struct TreeStructure {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<TreeEdge>,
    #[serde(skip)]
    schedule: Vec<f64>,
}

fn node_id(depth: usize, members: &[usize]) -> String {
    format!("{depth}:{}", members[0])
}

impl TreeStructure {
    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn max_depth(&self) -> usize {
        self.schedule.len()
    }

    /// Partition formed by the nodes at one depth.
    pub fn partition_at_depth(&self, depth: usize) -> Result<SetPartition> {
        if depth > self.max_depth() {
            return Err(Error::invalid(format!(
                "depth {depth} exceeds tree depth {}",
                self.max_depth()
            )));
        }
        SetPartition::new(
            self.nodes
                .iter()
                .filter(|nd| nd.depth == depth)
                .map(|nd| nd.members.clone())
                .collect(),
        )
    }

    /// Checks the structural invariants: one root holding {1..N}, children
    /// partitioning each parent, leaves exactly at the final depth.
    pub fn validate(&self) -> Result<()> {
        let n = self
            .nodes
            .iter()
            .find(|nd| nd.depth == 0)
            .ok_or_else(|| Error::invalid("tree has no root"))?
            .members
            .len();
        for depth in 0..=self.max_depth() {
            let part = self.partition_at_depth(depth)?;
            if part.ground_size() != n || part.blocks().iter().flatten().count() != n {
                return Err(Error::invalid(format!(
                    "nodes at depth {depth} do not partition 1..={n}"
                )));
            }
        }
        for edge in &self.edges {
            let child = self
                .nodes
                .iter()
                .find(|nd| nd.id == edge.child)
                .ok_or_else(|| Error::invalid(format!("edge child {} missing", edge.child)))?;
            let parent = self
                .nodes
                .iter()
                .find(|nd| nd.id == edge.parent)
                .ok_or_else(|| Error::invalid(format!("edge parent {} missing", edge.parent)))?;
            if parent.depth + 1 != child.depth
                || !child.members.iter().all(|x| parent.members.contains(x))
            {
                return Err(Error::invalid(format!(
                    "edge {} -> {} violates nesting",
                    edge.child, edge.parent
                )));
            }
        }
        Ok(())
    }
}

/// Samples a hierarchy by recursive splitting: the root's members are
/// partitioned by one draw at (schedule[0], b), and each non-singleton node
/// at depth d >= 1 is split at (schedule[d], -schedule[d-1]). The schedule
/// must be strictly increasing within [0, 1), and only its first entry may
/// be zero.
pub fn sample_tree<R: Rng + ?Sized>(
    n: usize,
    schedule: &[f64],
    b: f64,
    rng: &mut R,
) -> Result<TreeStructure> {
    if n == 0 {
        return Err(Error::invalid("needs n >= 1"));
    }
    if schedule.is_empty() {
        return Err(Error::invalid("schedule must have at least one discount"));
    }
    if !(0.0 <= schedule[0] && schedule[0] < 1.0) {
        return Err(Error::invalid(format!(
            "schedule entries must lie in [0, 1), got {}",
            schedule[0]
        )));
    }
    for w in schedule.windows(2) {
        if !(w[0] < w[1] && w[1] < 1.0) {
            return Err(Error::invalid(format!(
                "schedule must be strictly increasing within [0, 1): {} then {}",
                w[0], w[1]
            )));
        }
    }

    let root_members: Vec<usize> = (1..=n).collect();
    let mut nodes = vec![TreeNode { id: node_id(0, &root_members), depth: 0, members: root_members.clone() }];
    let mut edges = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![root_members];
    for depth in 0..schedule.len() {
        let params = if depth == 0 {
            PdParams::new(schedule[0], b)?
        } else {
            PdParams::new(schedule[depth], -schedule[depth - 1])?
        };
        let mut next = Vec::new();
        for members in &frontier {
            let parent = node_id(depth, members);
            let children: Vec<Vec<usize>> = if members.len() == 1 && depth > 0 {
                // singletons are copied through unchanged
                vec![members.clone()]
            } else {
                let split = sample_crp(params, members.len(), rng)?;
                blocks_over(members, &split)
            };
            for child in children {
                let id = node_id(depth + 1, &child);
                edges.push(TreeEdge { child: id.clone(), parent: parent.clone() });
                nodes.push(TreeNode { id, depth: depth + 1, members: child.clone() });
                next.push(child);
            }
        }
        next.sort_by_key(|m| m[0]);
        frontier = next;
    }
    nodes.sort_by(|x, y| (x.depth, x.members[0]).cmp(&(y.depth, y.members[0])));
    Ok(TreeStructure { nodes, edges, schedule: schedule.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    fn sp(blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn fragment_basics() {
        let p = sp(&[&[1, 2], &[3]]);
        let out = fragment(&p, &[sp(&[&[1], &[2]]), sp(&[&[3]])]).unwrap();
        assert_eq!(out.blocks(), &[vec![1], vec![2], vec![3]]);
        // identity fragmentation leaves the partition unchanged
        let out = fragment(&p, &[sp(&[&[1, 2]]), sp(&[&[3]])]).unwrap();
        assert_eq!(out.blocks(), p.blocks());
        // block count adds up
        let p = sp(&[&[1, 2, 3, 4], &[5, 6]]);
        let out = fragment(&p, &[sp(&[&[1, 3], &[2], &[4]]), sp(&[&[5, 6]])]).unwrap();
        assert_eq!(out.m(), 4);
        // mismatched cover is rejected
        assert!(fragment(&p, &[sp(&[&[1, 2]]), sp(&[&[5, 6]])]).is_err());
        assert!(fragment(&p, &[sp(&[&[1, 2, 3, 4]])]).is_err());
    }

    #[test]
    fn coagulate_worked_example() {
        // nine blocks over 15 elements merged into four groups
        let p = sp(&[
            &[1],
            &[2, 6, 10],
            &[3],
            &[4, 11],
            &[5, 13],
            &[7],
            &[8, 9],
            &[12, 15],
            &[14],
        ]);
        let q = sp(&[&[1, 4, 9], &[2, 7], &[3, 5, 8], &[6]]);
        let out = coagulate(&p, &q).unwrap();
        assert_eq!(
            out.blocks(),
            &[
                vec![1, 4, 11, 14],
                vec![2, 6, 8, 9, 10],
                vec![3, 5, 12, 13, 15],
                vec![7],
            ]
        );
    }

    #[test]
    fn coagulate_identities() {
        let p = sp(&[&[1, 3], &[2], &[4, 5]]);
        let singletons = sp(&[&[1], &[2], &[3]]);
        assert_eq!(coagulate(&p, &singletons).unwrap().blocks(), p.blocks());
        let one = sp(&[&[1, 2, 3]]);
        assert_eq!(coagulate(&p, &one).unwrap().blocks(), &[vec![1, 2, 3, 4, 5]]);
        // grouping must cover exactly the block indices
        assert!(coagulate(&p, &sp(&[&[1, 2]])).is_err());
        assert!(coagulate(&p, &sp(&[&[1, 2], &[4]])).is_err());
    }

    #[test]
    fn fragmented_draw_structure() {
        let mut rng = seeded_rng(20);
        for _ in 0..50 {
            let draw = sample_fragmented_crd(9, 0.5, 0.5, 1.0, &mut rng).unwrap();
            assert_eq!(draw.fine.n(), 9);
            assert!(draw.fine.m() >= draw.coarse.m());
        }
        // a2 = 0 keeps the construction defined (inner discount a1, rate 0)
        let draw = sample_fragmented_crd(6, 0.5, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(draw.fine.n(), 6);
        assert!(sample_fragmented_crd(5, 0.0, 0.5, 1.0, &mut rng).is_err());
    }

    #[test]
    fn coagulated_draw_structure() {
        let mut rng = seeded_rng(21);
        for _ in 0..50 {
            let draw = sample_coagulated_crd(9, 0.5, 0.5, 1.0, &mut rng).unwrap();
            assert_eq!(draw.coarse.n(), 9);
            assert!(draw.coarse.m() <= draw.fine.m());
            assert_eq!(draw.grouping.n(), draw.fine.m());
        }
        assert!(sample_coagulated_crd(5, 0.0, 0.5, 1.0, &mut rng).is_err());
    }

    #[test]
    fn fragment_coagulate_roundtrip() {
        // merging fragments back by their origin block recovers the input
        let mut rng = seeded_rng(22);
        for trial in 0..200 {
            let n = 2 + (trial % 9);
            let p = sample_crp(PdParams::new(0.5, 1.0).unwrap(), n, &mut rng)
                .unwrap()
                .to_set_partition();
            let per_block: Vec<SetPartition> = p
                .blocks()
                .iter()
                .map(|block| {
                    let split =
                        sample_crp(PdParams::new(0.3, 0.5).unwrap(), block.len(), &mut rng)
                            .unwrap();
                    SetPartition::new(blocks_over(block, &split)).unwrap()
                })
                .collect();
            let fine = fragment(&p, &per_block).unwrap();
            let origin_of = |least: usize| {
                p.blocks().iter().position(|blk| blk.contains(&least)).unwrap() + 1
            };
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); p.m()];
            for (i, block) in fine.blocks().iter().enumerate() {
                groups[origin_of(block[0]) - 1].push(i + 1);
            }
            groups.retain(|g| !g.is_empty());
            let q = SetPartition::new(groups).unwrap();
            let back = coagulate(&fine, &q).unwrap();
            assert_eq!(back.blocks(), p.blocks());
        }
    }

    #[test]
    fn tree_structure_and_marginals() {
        let mut rng = seeded_rng(23);
        let tree = sample_tree(12, &[0.3, 0.6], 1.0, &mut rng).unwrap();
        tree.validate().unwrap();
        assert_eq!(tree.max_depth(), 2);
        let d0 = tree.partition_at_depth(0).unwrap();
        assert_eq!(d0.m(), 1);
        let d1 = tree.partition_at_depth(1).unwrap();
        let d2 = tree.partition_at_depth(2).unwrap();
        assert!(d2.m() >= d1.m());
        // every depth-2 block nests inside a depth-1 block
        for b2 in d2.blocks() {
            assert!(d1.blocks().iter().any(|b1| b2.iter().all(|x| b1.contains(x))));
        }
        assert!(tree.partition_at_depth(3).is_err());

        // single-level tree is exactly one seating-rule draw
        let tree = sample_tree(5, &[0.5], 1.0, &mut rng).unwrap();
        tree.validate().unwrap();
        assert_eq!(tree.max_depth(), 1);

        // zero first discount allowed, later zeros rejected
        assert!(sample_tree(5, &[0.0, 0.4], 1.0, &mut rng).is_ok());
        assert!(sample_tree(5, &[0.4, 0.3], 1.0, &mut rng).is_err());
        assert!(sample_tree(5, &[0.4, 0.4], 1.0, &mut rng).is_err());
        assert!(sample_tree(5, &[0.4, 1.0], 1.0, &mut rng).is_err());
    }

    #[test]
    fn tree_serializes_nodes_and_edges_only() {
        let mut rng = seeded_rng(24);
        let tree = sample_tree(4, &[0.3, 0.6], 1.0, &mut rng).unwrap();
        let json = serde_json::to_value(&tree).unwrap();
        let obj = json.as_object().unwrap();
        assert_eq!(obj.len(), 2);
        assert!(obj.contains_key("nodes") && obj.contains_key("edges"));
        let root = &json["nodes"][0];
        assert_eq!(root["id"], "0:1");
        assert_eq!(root["depth"], 0);
        assert_eq!(root["members"], serde_json::json!([1, 2, 3, 4]));
    }
}
