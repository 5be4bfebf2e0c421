//! Request and response bodies shared by the HTTP service and the CLI. Both
//! transports call these functions, so their results are identical.

use std::collections::{BTreeMap, BTreeSet};

use facetforge_core::evaluation::{round_score, score_task, EvaluationMatrix};
use facetforge_core::jointmeaning::{FoafProfile, JointResolution, User};
use facetforge_core::matcher::{LearnConfig, LearnOutcome, Superconcept};
use facetforge_core::navigation::View;
use facetforge_core::taxonomy::{create_tag, Facet, Portlet, PortletKind};
use facetforge_core::{NodeId, PortletId, UserId, Workspace};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

pub type Result<T> = std::result::Result<T, ApiError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserBody {
    pub id: String,
    #[serde(default)]
    pub interests: Vec<String>,
    #[serde(default)]
    pub friends: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserCreated {
    pub id: String,
    pub interests: BTreeSet<String>,
    pub friends: BTreeSet<String>,
}

pub fn add_user(ws: &mut Workspace, body: UserBody) -> Result<UserCreated> {
    let profile = body.friends.iter().fold(FoafProfile::new(&body.interests), |p, f| p.with_friend(f.as_str()));
    let user = User::new(body.id.as_str(), profile);
    ws.add_user(&user)?;
    Ok(UserCreated {
        id: user.id.to_string(),
        interests: user.profile.interests,
        friends: user.profile.friends.iter().map(|f| f.to_string()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortletBody {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub payload_ref: String,
    pub owner: String,
    #[serde(default)]
    pub tags: Vec<String>,
    /// `name=value` strings.
    #[serde(default)]
    pub facets: Vec<String>,
    #[serde(default)]
    pub children: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortletSummary {
    pub id: String,
    pub kind: String,
    pub owner: String,
    pub tags: Vec<String>,
    pub facets: Vec<String>,
    pub children: Vec<String>,
}

impl From<&Portlet> for PortletSummary {
    fn from(p: &Portlet) -> Self {
        PortletSummary {
            id: p.id.to_string(),
            kind: p.kind().to_string(),
            owner: p.owner.to_string(),
            tags: p.folksonomy.iter().map(|t| t.label().to_owned()).collect(),
            facets: p.facets.iter().map(Facet::to_string).collect(),
            children: p.children.iter().map(|c| c.to_string()).collect(),
        }
    }
}

pub fn add_portlet(ws: &mut Workspace, body: PortletBody) -> Result<PortletSummary> {
    let kind: PortletKind = body.kind.parse().map_err(|e: facetforge_core::taxonomy::TaxonomyError| {
        ApiError::invalid(e.to_string())
    })?;
    let mut p = Portlet::new(body.id.as_str(), kind, body.payload_ref, body.owner.as_str());
    for t in &body.tags {
        p.folksonomy.insert(create_tag(t, body.owner.as_str())?);
    }
    for f in &body.facets {
        p.facets.insert(f.parse()?);
    }
    p.children = body.children.iter().map(|c| PortletId::new(c.as_str())).collect();
    ws.add_portlet(p.clone())?;
    Ok(PortletSummary::from(&p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagBody {
    pub portlet: String,
    pub label: String,
    /// Defaults to the portlet's owner.
    #[serde(default)]
    pub owner: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagCreated {
    pub portlet: String,
    pub label: String,
    pub owner: String,
}

pub fn add_tag(ws: &mut Workspace, body: TagBody) -> Result<TagCreated> {
    let portlet = PortletId::new(body.portlet.as_str());
    let owner = match body.owner {
        Some(o) => UserId::new(o),
        None => ws.portlet(&portlet)?.owner,
    };
    let tag = ws.tag_portlet(&portlet, &body.label, &owner)?;
    Ok(TagCreated { portlet: body.portlet, label: tag.label().to_owned(), owner: owner.to_string() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologyBody {
    pub ntriples: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologyLoaded {
    pub concepts: usize,
    pub equivalences: usize,
    pub feature_dims: usize,
}

pub fn load_ontology(ws: &mut Workspace, body: OntologyBody) -> Result<OntologyLoaded> {
    let o = ws.load_ontology_text(&body.ntriples)?;
    Ok(OntologyLoaded { concepts: o.len(), equivalences: o.equivalence_edges().count(), feature_dims: o.feature_dims() })
}

/// Ingests raw N-Triples, as the CLI `ingest` command does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ingested {
    pub added: usize,
    pub total: usize,
}

pub fn ingest(ws: &mut Workspace, ntriples: &str) -> Result<Ingested> {
    let added = ws.ingest(ntriples)?;
    Ok(Ingested { added, total: ws.store().len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnBody {
    /// `conceptA,conceptB,{0|1}` lines.
    pub training: String,
    /// `key=value` lines.
    #[serde(default)]
    pub config: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Learned {
    pub weights: Vec<f64>,
    pub threshold: f64,
    pub train_accuracy: f64,
    pub holdout_accuracy: Option<f64>,
    pub train_size: usize,
    pub holdout_size: usize,
}

impl From<LearnOutcome> for Learned {
    fn from(o: LearnOutcome) -> Self {
        Learned {
            weights: o.weights.as_slice().iter().copied().map(round_score).collect(),
            threshold: round_score(o.threshold),
            train_accuracy: round_score(o.train_accuracy),
            holdout_accuracy: o.holdout_accuracy.map(round_score),
            train_size: o.train_size,
            holdout_size: o.holdout_size,
        }
    }
}

pub fn learn(ws: &mut Workspace, body: LearnBody) -> Result<Learned> {
    let config: LearnConfig = match &body.config {
        Some(text) => text.parse()?,
        None => LearnConfig::default(),
    };
    Ok(ws.learn(&body.training, &config)?.into())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuperconceptBody {
    #[serde(default)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperconceptOut {
    pub id: String,
    pub members: Vec<String>,
    pub labels: Vec<String>,
    pub tags: Vec<String>,
}

pub fn superconcepts(ws: &Workspace, body: SuperconceptBody) -> Result<Vec<SuperconceptOut>> {
    if let Some(t) = body.theta {
        if !(t > 0.0 && t < 1.0) {
            return Err(ApiError::invalid(format!("theta must lie in (0, 1), got {t}")));
        }
    }
    let ontology = ws.ontology()?;
    let out = ws
        .superconcepts(body.theta)?
        .iter()
        .map(|s: &Superconcept| SuperconceptOut {
            id: s.id().to_string(),
            members: s.members.iter().map(|m| m.to_string()).collect(),
            labels: s.labels(&ontology).into_iter().map(str::to_owned).collect(),
            tags: s.matched_tags.iter().map(|t| t.label().to_owned()).collect::<BTreeSet<_>>().into_iter().collect(),
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewOut {
    pub viewer: String,
    pub portlet: String,
    /// Label of the first matched class; `None` for an untagged portlet.
    pub label: Option<String>,
    /// Superconcept id → label.
    pub labels: BTreeMap<String, String>,
    pub facets: Vec<String>,
    pub layout_slots: Vec<String>,
    pub rounds: usize,
}

pub fn view(ws: &Workspace, viewer: &str, portlet: &str, speaker: Option<&str>) -> Result<ViewOut> {
    let speaker = speaker.map(UserId::new);
    let mut resolution = ws.resolve(speaker.as_ref(), &PortletId::new(portlet))?;
    view_from(&mut resolution, viewer)
}

fn view_from(resolution: &mut JointResolution, viewer: &str) -> Result<ViewOut> {
    let v = resolution
        .views
        .remove(&UserId::new(viewer))
        .ok_or_else(|| ApiError::not_found(format!("user {viewer:?} not found")))?;
    Ok(ViewOut {
        viewer: v.viewer.to_string(),
        portlet: v.portlet.to_string(),
        label: v.label_assignment.values().next().cloned(),
        labels: v.label_assignment.iter().map(|(k, l)| (k.to_string(), l.clone())).collect(),
        facets: v.interface.facet_selections.iter().map(Facet::to_string).collect(),
        layout_slots: v.interface.layout_slots.iter().map(|s| s.to_string()).collect(),
        rounds: resolution.rounds,
    })
}

/// Every user's view, keyed by user id.
pub fn resolve_all(ws: &Workspace, portlet: &str, speaker: Option<&str>) -> Result<BTreeMap<String, ViewOut>> {
    let speaker = speaker.map(UserId::new);
    let mut resolution = ws.resolve(speaker.as_ref(), &PortletId::new(portlet))?;
    let users: Vec<String> = resolution.views.keys().map(|u| u.to_string()).collect();
    users.into_iter().map(|u| Ok((u.clone(), view_from(&mut resolution, &u)?))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBody {
    pub facet: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoomBody {
    pub facet: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrowseOut {
    pub user: String,
    pub members: Vec<String>,
    pub constraints: Vec<String>,
    pub zoom: Vec<String>,
    /// Groups under the innermost zoomed facet.
    pub groups: BTreeMap<String, Vec<String>>,
    /// Facet name → value → member count.
    pub histograms: BTreeMap<String, BTreeMap<String, usize>>,
}

pub fn browse_out(user: &str, v: &View) -> BrowseOut {
    BrowseOut {
        user: user.to_owned(),
        members: v.members().into_iter().map(|p| p.to_string()).collect(),
        constraints: v.constraints().iter().map(Facet::to_string).collect(),
        zoom: v.zoom_stack().to_vec(),
        groups: v.groups().into_iter().map(|(k, ids)| (k, ids.iter().map(|p| p.to_string()).collect())).collect(),
        histograms: v.facet_names().into_iter().map(|f| (f.to_owned(), v.histogram(f))).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavigateQuery {
    pub start: String,
    /// Comma-separated goal nodes.
    pub goals: String,
    #[serde(default)]
    pub user: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavigateOut {
    pub start: String,
    pub path: Vec<String>,
}

pub fn navigate(ws: &Workspace, q: &NavigateQuery) -> Result<NavigateOut> {
    let goals: BTreeSet<NodeId> =
        q.goals.split(',').map(str::trim).filter(|g| !g.is_empty()).map(NodeId::new).collect();
    let user = q.user.as_deref().map(UserId::new);
    let path = ws.navigate(&NodeId::new(q.start.as_str()), &goals, user.as_ref())?;
    Ok(NavigateOut { start: q.start.clone(), path: path.iter().map(|n| n.to_string()).collect() })
}

/// Either a structured matrix or the text form read by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvalBody {
    Text { csv: String },
    Matrix(EvaluationMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOut {
    pub task: String,
    pub average: f64,
    pub weighted: f64,
    pub per_attribute: Vec<AttributeScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeScore {
    pub name: String,
    pub weighted: f64,
}

pub fn eval(body: EvalBody) -> Result<EvalOut> {
    let matrix = match body {
        EvalBody::Text { csv } => csv.parse::<EvaluationMatrix>()?,
        EvalBody::Matrix(m) => {
            m.validate(Default::default())?;
            m
        }
    };
    let s = score_task(&matrix)?;
    Ok(EvalOut {
        task: matrix.task,
        average: round_score(s.average),
        weighted: round_score(s.weighted),
        per_attribute: s
            .per_attribute
            .into_iter()
            .map(|(name, x)| AttributeScore { name, weighted: round_score(x) })
            .collect(),
    })
}
