//! A triple store plus the domain operations that read and write it.
//!
//! Every entry point (CLI, HTTP, Python) goes through this type, so identical
//! inputs produce identical results regardless of transport.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use crate::ids::{NodeId, PortletId, UserId};
use crate::jointmeaning::{resolve_joint_interface, Community, ConstruedView, JointError, JointResolution, User};
use crate::matcher::{
    form_superconcepts, learn_weights, parse_training, DissimilarityWeights, LearnConfig, LearnOutcome,
    MatchError, Ontology, Superconcept, DEFAULT_THETA,
};
use crate::navigation::{interest_prefilter, plan_won, NavError, NavGraph, View};
use crate::store::{StoreError, Term, Triple, TripleStore};
use crate::taxonomy::{create_tag, Facet, FacetedTaxonomy, Portlet, PortletRegistry, Tag, TaxonomyError};
use crate::vocab;

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("{kind} {id:?} not found")]
    NotFound { kind: &'static str, id: String },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Joint(#[from] JointError),
    #[error(transparent)]
    Nav(#[from] NavError),
}

pub type Result<T, E = WorkspaceError> = std::result::Result<T, E>;

fn not_found(kind: &'static str, id: impl ToString) -> WorkspaceError {
    WorkspaceError::NotFound { kind, id: id.to_string() }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Workspace {
    store: TripleStore,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_store(store: TripleStore) -> Self {
        Workspace { store }
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Workspace { store: TripleStore::restore(path)? })
    }

    /// Opens `path`, or starts empty if it does not exist yet.
    pub fn open_or_default(path: impl AsRef<Path>) -> Result<Self> {
        if path.as_ref().exists() {
            Self::open(path)
        } else {
            Ok(Self::new())
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(self.store.persist(path)?)
    }

    pub fn store(&self) -> &TripleStore {
        &self.store
    }

    pub fn into_store(self) -> TripleStore {
        self.store
    }

    /// Merges raw N-Triples into the store. Returns how many were new.
    pub fn ingest(&mut self, ntriples: &str) -> Result<usize> {
        let triples = crate::store::parse_ntriples(ntriples)?;
        Ok(self.store.extend(triples)?)
    }

    /// Adds a user, replacing any previous profile.
    pub fn add_user(&mut self, user: &User) -> Result<()> {
        let s = Term::iri(user.id.as_str());
        for p in [vocab::INTEREST, vocab::KNOWS] {
            self.store.remove_matching(Some(&s), Some(&Term::iri(p)), None);
        }
        self.store.extend(user.to_triples()?)?;
        Ok(())
    }

    pub fn community(&self) -> Result<Community> {
        Ok(Community::from_store(&self.store)?)
    }

    pub fn user(&self, id: &UserId) -> Result<User> {
        let c = self.community().map_err(|_| not_found("user", id))?;
        c.get(id).cloned().ok_or_else(|| not_found("user", id))
    }

    pub fn portlets(&self) -> Result<PortletRegistry> {
        Ok(PortletRegistry::from_store(&self.store)?)
    }

    pub fn portlet(&self, id: &PortletId) -> Result<Portlet> {
        self.portlets()?.get(id).cloned().ok_or_else(|| not_found("portlet", id))
    }

    /// Adds or replaces a portlet after checking kind stability and child acyclicity.
    pub fn add_portlet(&mut self, portlet: Portlet) -> Result<()> {
        let mut registry = self.portlets()?;
        registry.insert(portlet.clone())?;
        let s = Term::iri(portlet.id.as_str());
        for p in [vocab::HAS_TAG, vocab::HAS_FACET, vocab::HAS_CHILD, vocab::PAYLOAD, vocab::OWNED_BY] {
            self.store.remove_matching(Some(&s), Some(&Term::iri(p)), None);
        }
        self.store.extend(portlet.to_triples()?)?;
        Ok(())
    }

    pub fn tag_portlet(&mut self, portlet: &PortletId, raw_label: &str, owner: &UserId) -> Result<Tag> {
        let mut p = self.portlet(portlet)?;
        let tag = create_tag(raw_label, owner.clone())?;
        p.folksonomy.insert(tag.clone());
        self.store.extend(p.to_triples()?)?;
        Ok(tag)
    }

    pub fn taxonomy(&self) -> Result<FacetedTaxonomy> {
        Ok(FacetedTaxonomy::from_portlets(self.portlets()?.iter()))
    }

    pub fn load_ontology(&mut self, ontology: &Ontology) -> Result<usize> {
        Ok(self.store.extend(ontology.to_triples()?)?)
    }

    /// Parses an ontology in N-Triples, validates it and merges it in.
    pub fn load_ontology_text(&mut self, ntriples: &str) -> Result<Ontology> {
        let parsed = Ontology::from_store(&TripleStore::from_ntriples(ntriples)?)?;
        self.load_ontology(&parsed)?;
        self.ontology()
    }

    pub fn ontology(&self) -> Result<Ontology> {
        Ok(Ontology::from_store(&self.store)?)
    }

    /// Stored weights, or uniform weights when none were learned.
    pub fn weights(&self) -> Result<DissimilarityWeights> {
        let mut indexed: BTreeMap<usize, f64> = BTreeMap::new();
        for t in self.store.matching(Some(&Term::iri(vocab::MATCHER_NODE)), None, None) {
            if let Some(i) = t.predicate.text().strip_prefix(vocab::WEIGHT_PREFIX) {
                let parse_err = || MatchError::Malformed(format!("stored weight {t}"));
                let i: usize = i.parse().map_err(|_| parse_err())?;
                indexed.insert(i, t.object.text().parse().map_err(|_| parse_err())?);
            }
        }
        if indexed.is_empty() {
            return Ok(DissimilarityWeights::default());
        }
        Ok(DissimilarityWeights::normalize(&indexed.into_values().collect::<Vec<_>>())?)
    }

    /// Stored linking threshold, or the default.
    pub fn theta(&self) -> Result<f64> {
        match self.store.objects(vocab::MATCHER_NODE, "theta").first() {
            Some(t) => t
                .text()
                .parse()
                .map_err(|_| MatchError::Malformed(format!("stored theta {:?}", t.text())).into()),
            None => Ok(DEFAULT_THETA),
        }
    }

    pub fn set_weights(&mut self, w: &DissimilarityWeights, theta: f64) -> Result<()> {
        let node = Term::iri(vocab::MATCHER_NODE);
        self.store.remove_matching(Some(&node), None, None);
        for (i, x) in w.as_slice().iter().enumerate() {
            self.store.insert(Triple::with_literal(
                vocab::MATCHER_NODE,
                &format!("{}{i}", vocab::WEIGHT_PREFIX),
                &x.to_string(),
            )?)?;
        }
        self.store.insert(Triple::with_literal(vocab::MATCHER_NODE, "theta", &theta.to_string())?)?;
        Ok(())
    }

    /// Learns weights from `conceptA,conceptB,{0|1}` lines over the stored
    /// ontology and keeps them, with the learned threshold, for matching.
    pub fn learn(&mut self, training: &str, config: &LearnConfig) -> Result<LearnOutcome> {
        let ontology = self.ontology()?;
        let pairs = parse_training(training, &ontology)?;
        let outcome = learn_weights(&pairs, config)?;
        self.set_weights(&outcome.weights, outcome.threshold.clamp(f64::EPSILON, 1.0 - f64::EPSILON))?;
        Ok(outcome)
    }

    pub fn superconcepts(&self, theta: Option<f64>) -> Result<Vec<Superconcept>> {
        let theta = match theta {
            Some(t) => t,
            None => self.theta()?,
        };
        Ok(form_superconcepts(&self.taxonomy()?, &self.ontology()?, &self.weights()?, theta)?)
    }

    /// Joint-meaning resolution of `portlet` for the whole community. The
    /// speaker defaults to the portlet's owner.
    pub fn resolve(&self, speaker: Option<&UserId>, portlet: &PortletId) -> Result<JointResolution> {
        let p = self.portlet(portlet)?;
        let community = self.community().map_err(|_| not_found("user", p.owner.clone()))?;
        let speaker_id = speaker.unwrap_or(&p.owner);
        let speaker = community.get(speaker_id).ok_or_else(|| not_found("user", speaker_id))?;
        let audience = community.audience_of(speaker_id);
        let ontology = self.ontology()?;
        let classes = self.superconcepts(None)?;
        Ok(resolve_joint_interface(speaker, &audience, &p, &classes, &ontology)?)
    }

    pub fn view_for(&self, viewer: &UserId, portlet: &PortletId, speaker: Option<&UserId>) -> Result<ConstruedView> {
        let mut r = self.resolve(speaker, portlet)?;
        r.views.remove(viewer).ok_or_else(|| not_found("user", viewer))
    }

    pub fn browse(&self) -> Result<View> {
        Ok(View::new(self.portlets()?.iter()))
    }

    pub fn nav_graph(&self) -> NavGraph {
        NavGraph::from_store(&self.store)
    }

    /// Facets of navigation nodes: portlet facets for portlet nodes, plus any
    /// `hasFacet` attached directly to a node.
    pub fn node_facets(&self) -> Result<BTreeMap<NodeId, BTreeSet<Facet>>> {
        let mut out: BTreeMap<NodeId, BTreeSet<Facet>> = BTreeMap::new();
        for n in self.nav_graph().nodes() {
            let facets = out.entry(n.clone()).or_default();
            for f in self.store.objects(n.as_str(), vocab::HAS_FACET) {
                facets.insert(f.text().parse()?);
            }
        }
        Ok(out)
    }

    /// Plans a path; with `user`, nodes sharing no interest with the user's
    /// profile are skipped first.
    pub fn navigate(&self, start: &NodeId, goals: &BTreeSet<NodeId>, user: Option<&UserId>) -> Result<Vec<NodeId>> {
        let g = self.nav_graph();
        let path = match user {
            None => plan_won(&g, start, goals)?,
            Some(u) => {
                let profile = self.user(u)?.profile;
                let pruned = interest_prefilter(&g, &self.node_facets()?, &profile.interests, start, goals);
                plan_won(&pruned, start, goals)?
            }
        };
        Ok(path)
    }

    pub fn add_nav_link(&mut self, from: &NodeId, to: &NodeId) -> Result<()> {
        self.store.insert(Triple::iris(from.as_str(), vocab::LINKS_TO, to.as_str())?)?;
        Ok(())
    }
}
