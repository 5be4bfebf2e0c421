//! Faceted navigation: filter/zoom views, goal-directed path planning over a
//! node graph, and breadcrumb trails for the hierarchical baseline.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{NodeId, PortletId};
use crate::store::{Term, Triple, TripleStore};
use crate::taxonomy::{Facet, Portlet};
use crate::vocab;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NavError {
    #[error("facet {0:?} is already zoomed")]
    AlreadyZoomed(String),
    #[error("zoom stack is empty")]
    EmptyZoomStack,
    #[error("no goal is reachable from {0}")]
    Unreachable(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("goal set is empty")]
    NoGoals,
    #[error("{0}")]
    Malformed(String),
}

pub type Result<T, E = NavError> = std::result::Result<T, E>;

/// A filter/zoom state over a fixed universe of portlets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct View {
    universe: BTreeMap<PortletId, BTreeSet<Facet>>,
    constraints: BTreeSet<Facet>,
    zoom_stack: Vec<String>,
}

impl View {
    pub fn new<'a, I: IntoIterator<Item = &'a Portlet>>(portlets: I) -> Self {
        View {
            universe: portlets.into_iter().map(|p| (p.id.clone(), p.facets.clone())).collect(),
            constraints: BTreeSet::new(),
            zoom_stack: Vec::new(),
        }
    }

    pub fn universe(&self) -> impl Iterator<Item = &PortletId> {
        self.universe.keys()
    }

    pub fn constraints(&self) -> &BTreeSet<Facet> {
        &self.constraints
    }

    pub fn zoom_stack(&self) -> &[String] {
        &self.zoom_stack
    }

    /// Universe portlets satisfying every constraint.
    pub fn members(&self) -> BTreeSet<&PortletId> {
        self.universe
            .iter()
            .filter(|(_, facets)| self.constraints.iter().all(|c| facets.contains(c)))
            .map(|(id, _)| id)
            .collect()
    }

    pub fn filter(&self, facet_name: &str, value: &str) -> View {
        let mut next = self.clone();
        next.constraints.insert(Facet::new(facet_name, value));
        next
    }

    pub fn zoom(&self, facet_name: &str) -> Result<View> {
        if self.zoom_stack.iter().any(|f| f == facet_name) {
            return Err(NavError::AlreadyZoomed(facet_name.to_owned()));
        }
        let mut next = self.clone();
        next.zoom_stack.push(facet_name.to_owned());
        Ok(next)
    }

    pub fn unzoom(&self) -> Result<View> {
        let mut next = self.clone();
        next.zoom_stack.pop().ok_or(NavError::EmptyZoomStack)?;
        Ok(next)
    }

    /// Members grouped by the value of the innermost zoomed facet. A portlet
    /// with several values appears in each of their groups; one without the
    /// facet is in none. Empty when nothing is zoomed.
    pub fn groups(&self) -> BTreeMap<String, BTreeSet<PortletId>> {
        let Some(facet) = self.zoom_stack.last() else {
            return BTreeMap::new();
        };
        let mut out: BTreeMap<String, BTreeSet<PortletId>> = BTreeMap::new();
        for id in self.members() {
            for f in self.universe[id].iter().filter(|f| &f.name == facet) {
                out.entry(f.value.clone()).or_default().insert(id.clone());
            }
        }
        out
    }

    /// Value counts for `facet_name` over the current members.
    pub fn histogram(&self, facet_name: &str) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for id in self.members() {
            for f in self.universe[id].iter().filter(|f| f.name == facet_name) {
                *out.entry(f.value.clone()).or_insert(0) += 1;
            }
        }
        out
    }

    /// Every facet name carried by some member.
    pub fn facet_names(&self) -> BTreeSet<&str> {
        self.members()
            .into_iter()
            .flat_map(|id| self.universe[id].iter().map(|f| f.name.as_str()))
            .collect()
    }
}

/// Directed navigation graph. Parallel links collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavGraph {
    nodes: BTreeSet<NodeId>,
    links: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl NavGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, n: impl Into<NodeId>) {
        self.nodes.insert(n.into());
    }

    pub fn add_link(&mut self, from: &NodeId, to: &NodeId) -> Result<()> {
        for n in [from, to] {
            if !self.nodes.contains(n) {
                return Err(NavError::UnknownNode(n.to_string()));
            }
        }
        self.links.entry(from.clone()).or_default().insert(to.clone());
        Ok(())
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.nodes.contains(n)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn links(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> {
        self.links.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))
    }

    /// Successors in ascending id order.
    pub fn successors(&self, n: &NodeId) -> impl Iterator<Item = &NodeId> {
        self.links.get(n).into_iter().flatten()
    }

    pub fn link_count(&self) -> usize {
        self.links.values().map(BTreeSet::len).sum()
    }

    /// The subgraph induced by the nodes for which `keep` holds.
    pub fn restricted_to(&self, keep: impl Fn(&NodeId) -> bool) -> NavGraph {
        let nodes: BTreeSet<NodeId> = self.nodes.iter().filter(|n| keep(n)).cloned().collect();
        let links = self
            .links
            .iter()
            .filter(|(a, _)| nodes.contains(*a))
            .map(|(a, bs)| (a.clone(), bs.iter().filter(|b| nodes.contains(*b)).cloned().collect()))
            .collect();
        NavGraph { nodes, links }
    }

    pub fn to_triples(&self) -> crate::store::Result<Vec<Triple>> {
        let mut out = Vec::new();
        for n in &self.nodes {
            out.push(Triple::iris(n.as_str(), vocab::TYPE, vocab::CLASS_NAV_NODE)?);
        }
        for (a, b) in self.links() {
            out.push(Triple::iris(a.as_str(), vocab::LINKS_TO, b.as_str())?);
        }
        Ok(out)
    }

    /// Nodes are subjects typed `NavNode` plus both ends of every `linksTo`.
    pub fn from_store(store: &TripleStore) -> Self {
        let mut g = NavGraph::new();
        let ty = Term::iri(vocab::TYPE);
        let class = Term::iri(vocab::CLASS_NAV_NODE);
        for t in store.matching(None, Some(&ty), Some(&class)) {
            g.add_node(t.subject.text());
        }
        let links = Term::iri(vocab::LINKS_TO);
        for t in store.matching(None, Some(&links), None) {
            let (a, b) = (NodeId::new(t.subject.text()), NodeId::new(t.object.text()));
            g.add_node(a.clone());
            g.add_node(b.clone());
            g.add_link(&a, &b).expect("both ends were just added");
        }
        g
    }
}

/// Shortest path from `start` to the nearest goal, excluding `start` itself.
/// Among equally short paths the lexicographically smallest node sequence wins.
pub fn plan_won(g: &NavGraph, start: &NodeId, goals: &BTreeSet<NodeId>) -> Result<Vec<NodeId>> {
    if !g.contains(start) {
        return Err(NavError::UnknownNode(start.to_string()));
    }
    if goals.is_empty() {
        return Err(NavError::NoGoals);
    }
    if let Some(missing) = goals.iter().find(|n| !g.contains(n)) {
        return Err(NavError::UnknownNode(missing.to_string()));
    }
    if goals.contains(start) {
        return Ok(Vec::new());
    }

    // Expanding each level in path order with sorted successors keeps the
    // first-discovered parent on the lexicographically smallest path.
    let mut parent: BTreeMap<&NodeId, &NodeId> = BTreeMap::new();
    let mut visited: BTreeSet<&NodeId> = BTreeSet::from([start]);
    let mut queue: VecDeque<&NodeId> = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if goals.contains(cur) {
            let mut path = vec![cur.clone()];
            let mut at = cur;
            while let Some(&p) = parent.get(at) {
                if p == start {
                    break;
                }
                path.push(p.clone());
                at = p;
            }
            path.reverse();
            return Ok(path);
        }
        for next in g.successors(cur) {
            if visited.insert(next) {
                parent.insert(next, cur);
                queue.push_back(next);
            }
        }
    }
    Err(NavError::Unreachable(start.clone()))
}

/// Drops nodes whose facet values share nothing with `interests`. The start,
/// the goals and nodes with no recorded facets are always kept.
pub fn interest_prefilter(
    g: &NavGraph,
    node_facets: &BTreeMap<NodeId, BTreeSet<Facet>>,
    interests: &BTreeSet<String>,
    start: &NodeId,
    goals: &BTreeSet<NodeId>,
) -> NavGraph {
    g.restricted_to(|n| {
        if n == start || goals.contains(n) {
            return true;
        }
        match node_facets.get(n) {
            None => true,
            Some(fs) if fs.is_empty() => true,
            Some(fs) => fs.iter().any(|f| interests.contains(&f.value)),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breadcrumb {
    pub trail: Vec<String>,
}

/// A forest of categories given by parent pointers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hierarchy {
    parent: BTreeMap<String, Option<String>>,
}

impl Hierarchy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_root(&mut self, name: &str) -> Result<()> {
        self.insert(name, None)
    }

    /// Adds `name` under an existing `parent`. Names are unique, so the
    /// structure stays a forest.
    pub fn add_child(&mut self, parent: &str, name: &str) -> Result<()> {
        if !self.parent.contains_key(parent) {
            return Err(NavError::UnknownNode(parent.to_owned()));
        }
        self.insert(name, Some(parent.to_owned()))
    }

    fn insert(&mut self, name: &str, parent: Option<String>) -> Result<()> {
        if self.parent.contains_key(name) {
            return Err(NavError::Malformed(format!("category {name:?} already exists")));
        }
        self.parent.insert(name.to_owned(), parent);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.parent.contains_key(name)
    }
}

/// Root-to-node chain of category names.
pub fn breadcrumb_path(h: &Hierarchy, node: &str) -> Result<Breadcrumb> {
    let mut trail = Vec::new();
    let mut cur = Some(node.to_owned());
    while let Some(name) = cur {
        let up = h.parent.get(&name).ok_or_else(|| NavError::UnknownNode(name.clone()))?;
        trail.push(name);
        cur = up.clone();
    }
    trail.reverse();
    Ok(Breadcrumb { trail })
}
