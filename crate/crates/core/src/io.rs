//! JSON documents for groups, G-graphs, retract instances, modules and
//! derivations.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::almost::{AbelianGroup, AlmostError, Derivation, GModule, Matrix};
use crate::gaction::{FiniteGroup, GSet, GroupError};
use crate::ggraph::{GGraph, GraphError};
use crate::retract::{tree_hash, Filtration, Move, RetractOutput};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Almost(#[from] AlmostError),
    #[error("group of order {0} exceeds the supported limit")]
    TooLarge(u128),
    #[error("{what}: index {index} out of range 0..{size}")]
    OutOfRange { what: &'static str, index: usize, size: usize },
    #[error("{what}: {got} entries, expected {expected}")]
    Length { what: &'static str, got: usize, expected: usize },
}

const MAX_GROUP_ORDER: u128 = 5040;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Trivial,
    Cyclic { n: usize },
    /// Order `2n`.
    Dihedral { n: usize },
    Symmetric { n: usize },
    DirectCyclic { a: usize, b: usize },
    Permutations { generators: Vec<Vec<usize>> },
    Table { table: Vec<Vec<usize>>, generators: Vec<usize> },
}

impl GroupSpec {
    pub fn from_group(group: &FiniteGroup) -> Self {
        GroupSpec::Table { table: group.table_rows(), generators: group.generators().to_vec() }
    }

    fn order_bound(&self) -> u128 {
        match self {
            GroupSpec::Trivial => 1,
            GroupSpec::Cyclic { n } => *n as u128,
            GroupSpec::Dihedral { n } => 2 * *n as u128,
            GroupSpec::Symmetric { n } => (1..=*n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)).unwrap_or(u128::MAX),
            GroupSpec::DirectCyclic { a, b } => *a as u128 * *b as u128,
            GroupSpec::Permutations { .. } => 0,
            GroupSpec::Table { table, .. } => table.len() as u128,
        }
    }

    pub fn build(&self) -> Result<Arc<FiniteGroup>, IoError> {
        let bound = self.order_bound();
        if bound > MAX_GROUP_ORDER {
            return Err(IoError::TooLarge(bound));
        }
        let bad = |msg: &str| IoError::Group(GroupError::BadTable(msg.into()));
        Ok(match self {
            GroupSpec::Trivial => FiniteGroup::trivial(),
            GroupSpec::Cyclic { n } if *n >= 1 => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral { n } if *n >= 1 => FiniteGroup::dihedral(*n),
            GroupSpec::Symmetric { n } if *n >= 1 => FiniteGroup::symmetric(*n),
            GroupSpec::DirectCyclic { a, b } if *a >= 1 && *b >= 1 => FiniteGroup::direct_cyclic(*a, *b),
            GroupSpec::Permutations { generators } => FiniteGroup::from_permutations(generators)?,
            GroupSpec::Table { table, generators } => FiniteGroup::from_table(table.clone(), generators.clone())?,
            _ => return Err(bad("group parameters must be positive")),
        })
    }
}

/// A G-set given by the permutation of each group generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GSetDoc {
    pub size: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GSetDoc {
    pub fn from_gset(s: &GSet) -> Self {
        GSetDoc { size: s.size(), generators: s.generator_action() }
    }

    pub fn build(&self, group: &Arc<FiniteGroup>) -> Result<GSet, IoError> {
        Ok(GSet::from_generator_action(group, self.size, &self.generators)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GGraphDoc {
    pub vertices: GSetDoc,
    pub edges: GSetDoc,
    pub iota: Vec<usize>,
    pub tau: Vec<usize>,
}

impl GGraphDoc {
    pub fn from_ggraph(t: &GGraph) -> Self {
        GGraphDoc {
            vertices: GSetDoc::from_gset(t.vertices()),
            edges: GSetDoc::from_gset(t.edges()),
            iota: t.iota_map().to_vec(),
            tau: t.tau_map().to_vec(),
        }
    }

    pub fn build(&self, group: &Arc<FiniteGroup>) -> Result<GGraph, IoError> {
        let vertices = self.vertices.build(group)?;
        let edges = self.edges.build(group)?;
        Ok(GGraph::new(vertices, edges, self.iota.clone(), self.tau.clone())?)
    }
}

/// A G-tree with a candidate retract `U` of its vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub group: GroupSpec,
    pub ggraph: GGraphDoc,
    #[serde(rename = "retract_U", default)]
    pub retract_u: Vec<usize>,
}

impl InstanceDoc {
    pub fn new(tree: &GGraph, u: &BTreeSet<usize>) -> Self {
        InstanceDoc {
            group: GroupSpec::from_group(tree.group()),
            ggraph: GGraphDoc::from_ggraph(tree),
            retract_u: u.iter().copied().collect(),
        }
    }

    /// The tree and `U`; `U` is range-checked but not checked to be a retract.
    pub fn build(&self) -> Result<(GGraph, BTreeSet<usize>), IoError> {
        let group = self.group.build()?;
        let tree = self.ggraph.build(&group)?;
        let size = tree.vertex_count();
        if let Some(&index) = self.retract_u.iter().find(|&&v| v >= size) {
            return Err(IoError::OutOfRange { what: "retract_U", index, size });
        }
        Ok((tree, self.retract_u.iter().copied().collect()))
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedEdge {
    pub edge: usize,
    pub vertex: usize,
}

/// The result of the retraction pipeline, indices refer to the input tree
/// where noted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub input_hash: String,
    pub output_hash: String,
    pub tree: GGraphDoc,
    /// Input vertex of each output vertex.
    pub vertex_origin: Vec<usize>,
    /// Input edge of each output edge.
    pub edge_origin: Vec<usize>,
    /// Removed input edges, each paired with the vertex of `V − U` it accounts for.
    pub removed: Vec<RemovedEdge>,
    pub filtration: Filtration,
    pub moves: Vec<Move>,
    pub validated: bool,
}

impl ResultDoc {
    pub fn new(input: &GGraph, out: &RetractOutput, validated: bool) -> Self {
        ResultDoc {
            input_hash: tree_hash(input),
            output_hash: tree_hash(&out.tree),
            tree: GGraphDoc::from_ggraph(&out.tree),
            vertex_origin: out.compression.vertex_origin.clone(),
            edge_origin: out.compression.edge_origin.clone(),
            removed: out.removed.iter().map(|(&edge, &vertex)| RemovedEdge { edge, vertex }).collect(),
            filtration: out.filtration.clone(),
            moves: out.moves.clone(),
            validated,
        }
    }
}

/// `Z/n₁ × … × Z/n_k` with one integer matrix per group generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub factors: Vec<u64>,
    pub generators: Vec<Matrix>,
}

impl ModuleDoc {
    pub fn from_module(m: &GModule) -> Self {
        ModuleDoc { factors: m.carrier().moduli().to_vec(), generators: m.generator_matrices() }
    }

    pub fn build(&self, group: &Arc<FiniteGroup>) -> Result<GModule, IoError> {
        let carrier = AbelianGroup::new(self.factors.clone())?;
        Ok(GModule::from_generator_matrices(group, carrier, &self.generators)?)
    }
}

/// Coordinates of `d(g)` for every group element `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationDoc {
    pub values: Vec<Vec<i64>>,
}

impl DerivationDoc {
    pub fn from_derivation(m: &GModule, d: &Derivation) -> Self {
        let values = m
            .group()
            .elements()
            .map(|g| m.carrier().coords(d.value(g)).into_iter().map(|c| c as i64).collect())
            .collect();
        DerivationDoc { values }
    }

    /// The values as carrier elements; whether they form a derivation is
    /// left to the caller.
    pub fn values(&self, m: &GModule) -> Result<Vec<usize>, IoError> {
        let order = m.group().order();
        if self.values.len() != order {
            return Err(IoError::Length { what: "derivation values", got: self.values.len(), expected: order });
        }
        let rank = m.carrier().rank();
        self.values
            .iter()
            .map(|c| {
                if c.len() != rank {
                    return Err(IoError::Length { what: "coordinates", got: c.len(), expected: rank });
                }
                Ok(m.carrier().index(c))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleInstanceDoc {
    pub group: GroupSpec,
    pub module: ModuleDoc,
    #[serde(default)]
    pub derivation: Option<DerivationDoc>,
}

/// A function `φ: E → A` between G-sets, with one orbit representative of
/// `E` per orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UntwistDoc {
    pub group: GroupSpec,
    pub e: GSetDoc,
    pub a: GSetDoc,
    pub transversal: Vec<usize>,
    pub phi: Vec<usize>,
}
