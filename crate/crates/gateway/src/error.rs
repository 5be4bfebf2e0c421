use facetforge_core::evaluation::EvalError;
use facetforge_core::jointmeaning::JointError;
use facetforge_core::matcher::MatchError;
use facetforge_core::navigation::NavError;
use facetforge_core::store::StoreError;
use facetforge_core::taxonomy::TaxonomyError;
use facetforge_core::WorkspaceError;
use serde::Serialize;

/// An error as reported to clients: HTTP status, stable machine code and a
/// human message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: u16, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(404, "not_found", message)
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(400, "invalid_input", message)
    }

    pub fn storage(message: impl Into<String>) -> Self {
        Self::new(503, "storage_unavailable", message)
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io(_) => ApiError::storage(e.to_string()),
            _ => ApiError::invalid(e.to_string()),
        }
    }
}

impl From<TaxonomyError> for ApiError {
    fn from(e: TaxonomyError) -> Self {
        match e {
            TaxonomyError::Store(s) => s.into(),
            TaxonomyError::UnknownPortlet(_) => ApiError::not_found(e.to_string()),
            TaxonomyError::CycleDetected { .. } | TaxonomyError::DuplicatePortlet(_) => {
                ApiError::new(409, "conflict", e.to_string())
            }
            TaxonomyError::Malformed(_) => ApiError::new(500, "corrupt_store", e.to_string()),
            _ => ApiError::invalid(e.to_string()),
        }
    }
}

impl From<MatchError> for ApiError {
    fn from(e: MatchError) -> Self {
        match e {
            MatchError::Store(s) => s.into(),
            MatchError::UnknownConcept(_) => ApiError::not_found(e.to_string()),
            MatchError::DegenerateTraining => ApiError::new(422, "degenerate_training", e.to_string()),
            MatchError::BroaderCycle { .. } => ApiError::new(409, "conflict", e.to_string()),
            _ => ApiError::invalid(e.to_string()),
        }
    }
}

impl From<JointError> for ApiError {
    fn from(e: JointError) -> Self {
        match e {
            JointError::Store(s) => s.into(),
            JointError::UnknownUser(_) | JointError::EmptyCommunity => ApiError::not_found(e.to_string()),
            JointError::UnmatchedTag(_) => ApiError::new(422, "unmatched_tag", e.to_string()),
            _ => ApiError::invalid(e.to_string()),
        }
    }
}

impl From<NavError> for ApiError {
    fn from(e: NavError) -> Self {
        match e {
            NavError::UnknownNode(_) => ApiError::not_found(e.to_string()),
            NavError::Unreachable(_) => ApiError::new(422, "unreachable", e.to_string()),
            NavError::AlreadyZoomed(_) | NavError::EmptyZoomStack => ApiError::new(409, "conflict", e.to_string()),
            _ => ApiError::invalid(e.to_string()),
        }
    }
}

impl From<EvalError> for ApiError {
    fn from(e: EvalError) -> Self {
        ApiError::invalid(e.to_string())
    }
}

impl From<WorkspaceError> for ApiError {
    fn from(e: WorkspaceError) -> Self {
        match e {
            WorkspaceError::NotFound { .. } => ApiError::not_found(e.to_string()),
            WorkspaceError::Store(e) => e.into(),
            WorkspaceError::Taxonomy(e) => e.into(),
            WorkspaceError::Match(e) => e.into(),
            WorkspaceError::Joint(e) => e.into(),
            WorkspaceError::Nav(e) => e.into(),
        }
    }
}
