//! Collaborative faceted semantic-web engine.
//!
//! Portlets carry folksonomy tags and facets and are stored as triples. Tags
//! are matched against a domain ontology by a learned weighted dissimilarity,
//! matched concepts are grouped into superconcepts, and each community member
//! gets a view of a portlet whose labels are resolved jointly from the
//! speaker's tags and the member's FOAF interests.

pub mod demo;
pub mod evaluation;
pub mod ids;
pub mod jointmeaning;
pub mod matcher;
pub mod navigation;
pub mod store;
pub mod taxonomy;
pub mod vocab;
pub mod workspace;

pub use ids::{ConceptId, NodeId, PortletId, UserId};
pub use store::{Term, Triple, TriplePattern, TripleStore};
pub use workspace::{Workspace, WorkspaceError};
