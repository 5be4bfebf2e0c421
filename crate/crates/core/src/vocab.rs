//! Reserved predicate and class IRIs used when domain values are written to the store.

pub const TYPE: &str = "type";

pub const HAS_TAG: &str = "hasTag";
pub const HAS_FACET: &str = "hasFacet";
pub const HAS_CHILD: &str = "hasChild";
pub const OWNED_BY: &str = "ownedBy";
pub const KIND: &str = "kind";
pub const PAYLOAD: &str = "payload";
pub const TAG_LABEL: &str = "tagLabel";
pub const HAS_INTERFACE: &str = "hasInterface";
pub const LAYOUT_SLOT: &str = "layoutSlot";

pub const LABEL: &str = "label";
pub const EQUIVALENT_TO: &str = "equivalentTo";
pub const BROADER: &str = "broader";
pub const TAG_CONTEXT: &str = "tagContext";
pub const FEATURE_PREFIX: &str = "feature_";

pub const INTEREST: &str = "interest";
pub const KNOWS: &str = "knows";

pub const LINKS_TO: &str = "linksTo";

pub const WEIGHT_PREFIX: &str = "weight_";
pub const MATCHER_NODE: &str = "matcher:weights";

pub const CLASS_USER: &str = "User";
pub const CLASS_NAV_NODE: &str = "NavNode";
pub const CLASS_INTERFACE: &str = "FacetedInterface";
