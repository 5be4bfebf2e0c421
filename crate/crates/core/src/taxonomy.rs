//! Tags, facets, portlets and the faceted taxonomy: a set of (tag, faceted interface) pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::ids::{PortletId, UserId};
use crate::store::{StoreError, Term, Triple, TripleStore};
use crate::vocab;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("tag label is empty after trimming")]
    EmptyLabel,
    #[error("portlet {0} appears more than once")]
    DuplicatePortlet(PortletId),
    #[error("cannot compose an interface from zero portlets")]
    EmptyComposition,
    #[error("adding {child} under {parent} would create a cycle")]
    CycleDetected { parent: PortletId, child: PortletId },
    #[error("unknown portlet {0}")]
    UnknownPortlet(PortletId),
    #[error("unknown portlet kind {0:?}")]
    UnknownKind(String),
    #[error("malformed facet {0:?}, expected name=value")]
    MalformedFacet(String),
    #[error("malformed stored data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub type Result<T, E = TaxonomyError> = std::result::Result<T, E>;

/// Trim, lowercase, then NFC. Idempotent.
pub fn normalize_label(raw: &str) -> String {
    let lowered = raw.trim().to_lowercase();
    let composed: String = lowered.nfc().collect();
    composed.trim().to_owned()
}

/// A folksonomy tag. Labels are always normalized.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tag {
    label: String,
    owner: UserId,
}

impl Tag {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn owner(&self) -> &UserId {
        &self.owner
    }

    fn iri(&self) -> String {
        format!("tag:{}/{}", self.owner, self.label)
    }
}

pub fn create_tag(raw_label: &str, owner: impl Into<UserId>) -> Result<Tag> {
    let label = normalize_label(raw_label);
    if label.is_empty() {
        return Err(TaxonomyError::EmptyLabel);
    }
    Ok(Tag { label, owner: owner.into() })
}

/// One `name=value` facet assignment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub name: String,
    pub value: String,
}

impl Facet {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        Facet { name: name.into(), value: value.into() }
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.name, self.value)
    }
}

impl FromStr for Facet {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('=') {
            Some((name, value)) if !name.trim().is_empty() && !value.trim().is_empty() => {
                Ok(Facet::new(name.trim(), value.trim()))
            }
            _ => Err(TaxonomyError::MalformedFacet(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacetedInterface {
    pub id: String,
    pub facet_selections: BTreeSet<Facet>,
    pub layout_slots: Vec<PortletId>,
}

impl FacetedInterface {
    pub fn new(id: impl Into<String>) -> Self {
        FacetedInterface { id: id.into(), facet_selections: BTreeSet::new(), layout_slots: Vec::new() }
    }

    pub fn with_facet(mut self, facet: Facet) -> Self {
        self.facet_selections.insert(facet);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacetPair {
    pub tag: Tag,
    pub interface: FacetedInterface,
}

/// The set F of (tag, interface) pairs. One tag may pair with many
/// interfaces and one interface with many tags.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetedTaxonomy {
    pairs: BTreeSet<FacetPair>,
}

impl FacetedTaxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `(tag, interface)`; returns false if it was already present.
    pub fn attach(&mut self, tag: Tag, interface: FacetedInterface) -> bool {
        self.pairs.insert(FacetPair { tag, interface })
    }

    pub fn attach_pair(mut self, tag: Tag, interface: FacetedInterface) -> Self {
        self.attach(tag, interface);
        self
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &FacetPair> {
        self.pairs.iter()
    }

    pub fn contains(&self, tag: &Tag, interface: &FacetedInterface) -> bool {
        self.pairs.iter().any(|p| &p.tag == tag && &p.interface == interface)
    }

    pub fn tags(&self) -> BTreeSet<&Tag> {
        self.pairs.iter().map(|p| &p.tag).collect()
    }

    pub fn interfaces_for<'a>(&'a self, tag: &'a Tag) -> impl Iterator<Item = &'a FacetedInterface> + 'a {
        self.pairs.iter().filter(move |p| &p.tag == tag).map(|p| &p.interface)
    }

    /// Taxonomy in which every tag of every portlet pairs with the portlet's
    /// own interface.
    pub fn from_portlets<'a, I: IntoIterator<Item = &'a Portlet>>(portlets: I) -> Self {
        let mut f = FacetedTaxonomy::new();
        for p in portlets {
            let iface = p.interface();
            for tag in &p.folksonomy {
                f.attach(tag.clone(), iface.clone());
            }
        }
        f
    }

    pub fn to_triples(&self) -> Result<Vec<Triple>> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for pair in &self.pairs {
            let node = format!("iface:{}", pair.interface.id);
            out.extend(tag_triples(&pair.tag)?);
            out.push(Triple::iris(&pair.tag.iri(), vocab::HAS_INTERFACE, &node)?);
            if seen.insert(node.clone()) {
                out.push(Triple::iris(&node, vocab::TYPE, vocab::CLASS_INTERFACE)?);
                for f in &pair.interface.facet_selections {
                    out.push(Triple::with_literal(&node, vocab::HAS_FACET, &f.to_string())?);
                }
                for (i, slot) in pair.interface.layout_slots.iter().enumerate() {
                    out.push(Triple::with_literal(&node, vocab::LAYOUT_SLOT, &format!("{i}={slot}"))?);
                }
            }
        }
        Ok(out)
    }

    pub fn from_store(store: &TripleStore) -> Result<Self> {
        let mut f = FacetedTaxonomy::new();
        let has_iface = Term::iri(vocab::HAS_INTERFACE);
        for t in store.matching(None, Some(&has_iface), None) {
            let tag = tag_from_node(store, t.subject.text())?;
            let node = t.object.text();
            let id = node
                .strip_prefix("iface:")
                .ok_or_else(|| TaxonomyError::Malformed(format!("interface node {node}")))?;
            let mut iface = FacetedInterface::new(id);
            for o in store.objects(node, vocab::HAS_FACET) {
                iface.facet_selections.insert(o.text().parse()?);
            }
            iface.layout_slots = indexed_list(store.objects(node, vocab::LAYOUT_SLOT))?
                .into_iter()
                .map(PortletId::new)
                .collect();
            f.attach(tag, iface);
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortletKind {
    Text,
    Picture,
    Video,
    Audio,
    Code,
}

impl PortletKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PortletKind::Text => "text",
            PortletKind::Picture => "picture",
            PortletKind::Video => "video",
            PortletKind::Audio => "audio",
            PortletKind::Code => "code",
        }
    }
}

impl fmt::Display for PortletKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PortletKind {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "text" => PortletKind::Text,
            "picture" => PortletKind::Picture,
            "video" => PortletKind::Video,
            "audio" => PortletKind::Audio,
            "code" => PortletKind::Code,
            _ => return Err(TaxonomyError::UnknownKind(s.to_owned())),
        })
    }
}

/// A content contribution with its own folksonomy and facets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Portlet {
    pub id: PortletId,
    kind: PortletKind,
    pub payload_ref: String,
    pub owner: UserId,
    pub folksonomy: BTreeSet<Tag>,
    pub facets: BTreeSet<Facet>,
    pub children: Vec<PortletId>,
}

impl Portlet {
    pub fn new(
        id: impl Into<PortletId>,
        kind: PortletKind,
        payload_ref: impl Into<String>,
        owner: impl Into<UserId>,
    ) -> Self {
        Portlet {
            id: id.into(),
            kind,
            payload_ref: payload_ref.into(),
            owner: owner.into(),
            folksonomy: BTreeSet::new(),
            facets: BTreeSet::new(),
            children: Vec::new(),
        }
    }

    pub fn kind(&self) -> PortletKind {
        self.kind
    }

    pub fn with_tag(mut self, tag: Tag) -> Self {
        self.folksonomy.insert(tag);
        self
    }

    pub fn with_facet(mut self, name: &str, value: &str) -> Self {
        self.facets.insert(Facet::new(name, value));
        self
    }

    pub fn has_facet(&self, name: &str, value: &str) -> bool {
        self.facets.iter().any(|f| f.name == name && f.value == value)
    }

    /// The portlet seen as a one-slot faceted interface.
    pub fn interface(&self) -> FacetedInterface {
        FacetedInterface {
            id: self.id.to_string(),
            facet_selections: self.facets.clone(),
            layout_slots: vec![self.id.clone()],
        }
    }

    pub fn to_triples(&self) -> Result<Vec<Triple>> {
        let s = self.id.as_str();
        let mut out = vec![
            Triple::with_literal(s, vocab::KIND, self.kind.as_str())?,
            Triple::iris(s, vocab::OWNED_BY, self.owner.as_str())?,
        ];
        if !self.payload_ref.trim().is_empty() {
            out.push(Triple::with_literal(s, vocab::PAYLOAD, &self.payload_ref)?);
        }
        for tag in &self.folksonomy {
            out.push(Triple::iris(s, vocab::HAS_TAG, &tag.iri())?);
            out.extend(tag_triples(tag)?);
        }
        for f in &self.facets {
            out.push(Triple::with_literal(s, vocab::HAS_FACET, &f.to_string())?);
        }
        for (i, child) in self.children.iter().enumerate() {
            out.push(Triple::with_literal(s, vocab::HAS_CHILD, &format!("{i}={child}"))?);
        }
        Ok(out)
    }

    fn from_store(store: &TripleStore, id: &str) -> Result<Self> {
        let single = |pred: &str| -> Result<String> {
            let objs = store.objects(id, pred);
            match objs.as_slice() {
                [one] => Ok(one.text().to_owned()),
                _ => Err(TaxonomyError::Malformed(format!(
                    "portlet {id} needs exactly one {pred}, found {}",
                    objs.len()
                ))),
            }
        };
        let kind: PortletKind = single(vocab::KIND)?.parse()?;
        let owner = single(vocab::OWNED_BY)?;
        let payload = store
            .objects(id, vocab::PAYLOAD)
            .first()
            .map(|t| t.text().to_owned())
            .unwrap_or_default();
        let mut p = Portlet::new(id, kind, payload, owner);
        for node in store.objects(id, vocab::HAS_TAG) {
            p.folksonomy.insert(tag_from_node(store, node.text())?);
        }
        for f in store.objects(id, vocab::HAS_FACET) {
            p.facets.insert(f.text().parse()?);
        }
        p.children = indexed_list(store.objects(id, vocab::HAS_CHILD))?
            .into_iter()
            .map(PortletId::new)
            .collect();
        Ok(p)
    }
}

fn tag_triples(tag: &Tag) -> Result<Vec<Triple>> {
    let node = tag.iri();
    Ok(vec![
        Triple::with_literal(&node, vocab::TAG_LABEL, tag.label())?,
        Triple::iris(&node, vocab::OWNED_BY, tag.owner().as_str())?,
    ])
}

fn tag_from_node(store: &TripleStore, node: &str) -> Result<Tag> {
    let label = store.objects(node, vocab::TAG_LABEL);
    let owner = store.objects(node, vocab::OWNED_BY);
    match (label.as_slice(), owner.as_slice()) {
        ([l], [o]) => create_tag(l.text(), o.text()),
        _ => Err(TaxonomyError::Malformed(format!("tag node {node}"))),
    }
}

/// Decodes `"i=value"` literals back into an ordered list.
fn indexed_list(items: Vec<&Term>) -> Result<Vec<String>> {
    let mut indexed: Vec<(usize, String)> = items
        .into_iter()
        .map(|t| {
            let (i, v) = t
                .text()
                .split_once('=')
                .ok_or_else(|| TaxonomyError::Malformed(format!("list entry {:?}", t.text())))?;
            let i: usize = i
                .parse()
                .map_err(|_| TaxonomyError::Malformed(format!("list index {i:?}")))?;
            Ok((i, v.to_owned()))
        })
        .collect::<Result<_>>()?;
    indexed.sort();
    Ok(indexed.into_iter().map(|(_, v)| v).collect())
}

/// Portlets keyed by id, with an acyclic child relation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PortletRegistry {
    portlets: BTreeMap<PortletId, Portlet>,
}

impl PortletRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.portlets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.portlets.is_empty()
    }

    pub fn get(&self, id: &PortletId) -> Option<&Portlet> {
        self.portlets.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Portlet> {
        self.portlets.values()
    }

    /// Inserts or replaces a portlet. Children must already be registered and
    /// must not lead back to the portlet.
    pub fn insert(&mut self, portlet: Portlet) -> Result<()> {
        for child in &portlet.children {
            if child != &portlet.id && !self.portlets.contains_key(child) {
                return Err(TaxonomyError::UnknownPortlet(child.clone()));
            }
            if self.reaches(child, &portlet.id) {
                return Err(TaxonomyError::CycleDetected {
                    parent: portlet.id.clone(),
                    child: child.clone(),
                });
            }
        }
        if let Some(existing) = self.portlets.get(&portlet.id) {
            if existing.kind != portlet.kind {
                return Err(TaxonomyError::Malformed(format!(
                    "portlet {} already exists with kind {}",
                    portlet.id, existing.kind
                )));
            }
        }
        self.portlets.insert(portlet.id.clone(), portlet);
        Ok(())
    }

    pub fn add_child(&mut self, parent: &PortletId, child: &PortletId) -> Result<()> {
        if !self.portlets.contains_key(child) {
            return Err(TaxonomyError::UnknownPortlet(child.clone()));
        }
        if self.reaches(child, parent) {
            return Err(TaxonomyError::CycleDetected { parent: parent.clone(), child: child.clone() });
        }
        let p = self
            .portlets
            .get_mut(parent)
            .ok_or_else(|| TaxonomyError::UnknownPortlet(parent.clone()))?;
        if !p.children.contains(child) {
            p.children.push(child.clone());
        }
        Ok(())
    }

    pub fn add_tag(&mut self, portlet: &PortletId, tag: Tag) -> Result<bool> {
        let p = self
            .portlets
            .get_mut(portlet)
            .ok_or_else(|| TaxonomyError::UnknownPortlet(portlet.clone()))?;
        Ok(p.folksonomy.insert(tag))
    }

    /// Whether `to` is reachable from `from` through child links (reflexive).
    fn reaches(&self, from: &PortletId, to: &PortletId) -> bool {
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(cur) = stack.pop() {
            if cur == to {
                return true;
            }
            if !seen.insert(cur) {
                continue;
            }
            if let Some(p) = self.portlets.get(cur) {
                stack.extend(p.children.iter());
            }
        }
        false
    }

    pub fn to_triples(&self) -> Result<Vec<Triple>> {
        let mut out = Vec::new();
        for p in self.portlets.values() {
            out.extend(p.to_triples()?);
        }
        Ok(out)
    }

    pub fn from_store(store: &TripleStore) -> Result<Self> {
        let mut reg = PortletRegistry::new();
        let ids: Vec<String> = store.subjects_with(vocab::KIND).into_iter().map(str::to_owned).collect();
        let mut pending: Vec<Portlet> = ids
            .iter()
            .map(|id| Portlet::from_store(store, id))
            .collect::<Result<_>>()?;
        // Insert in dependency order so every child is registered before its parent.
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for p in pending {
                if p.children.iter().all(|c| reg.portlets.contains_key(c)) {
                    reg.insert(p)?;
                } else {
                    rest.push(p);
                }
            }
            if rest.len() == before {
                let p = &rest[0];
                return Err(TaxonomyError::Malformed(format!(
                    "portlet {} has missing or cyclic children",
                    p.id
                )));
            }
            pending = rest;
        }
        Ok(reg)
    }
}

/// Composes portlets into one interface: facet selections are the union of
/// the inputs' facets and layout slots follow argument order.
pub fn compose_interface(portlets: &[Portlet]) -> Result<FacetedInterface> {
    if portlets.is_empty() {
        return Err(TaxonomyError::EmptyComposition);
    }
    let mut seen = BTreeSet::new();
    for p in portlets {
        if !seen.insert(&p.id) {
            return Err(TaxonomyError::DuplicatePortlet(p.id.clone()));
        }
    }
    let layout_slots: Vec<PortletId> = portlets.iter().map(|p| p.id.clone()).collect();
    let id = layout_slots.iter().map(PortletId::as_str).collect::<Vec<_>>().join("+");
    Ok(FacetedInterface {
        id,
        facet_selections: portlets.iter().flat_map(|p| p.facets.iter().cloned()).collect(),
        layout_slots,
    })
}

/// Counts, per value, the portlets carrying `facet_name=value`.
pub fn facet_histogram<'a, I>(portlets: I, facet_name: &str) -> BTreeMap<String, usize>
where
    I: IntoIterator<Item = &'a Portlet>,
{
    let mut counts = BTreeMap::new();
    for p in portlets {
        for f in p.facets.iter().filter(|f| f.name == facet_name) {
            *counts.entry(f.value.clone()).or_insert(0) += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_normalization_examples() {
        assert_eq!(create_tag("Ferrari", "u0").unwrap().label(), "ferrari");
        assert_eq!(create_tag("sport car", "u0").unwrap().label(), "sport car");
        assert_eq!(create_tag("  EXPENSIVE Car ", "u0").unwrap().label(), "expensive car");
        assert_eq!(create_tag("Ferrari", "u0").unwrap(), create_tag("Ferrari", "u0").unwrap());
    }

    #[test]
    fn nfc_composes_combining_marks() {
        // "e" + COMBINING ACUTE becomes a single é.
        assert_eq!(normalize_label("Cafe\u{301}"), "caf\u{e9}");
    }

    #[test]
    fn empty_label_rejected() {
        assert!(matches!(create_tag("   ", "u0"), Err(TaxonomyError::EmptyLabel)));
        assert!(matches!(create_tag("", "u0"), Err(TaxonomyError::EmptyLabel)));
    }

    fn iface(id: &str) -> FacetedInterface {
        FacetedInterface::new(id)
    }

    #[test]
    fn attach_is_idempotent() {
        let t = create_tag("ferrari", "u0").unwrap();
        let mut f = FacetedTaxonomy::new();
        assert!(f.attach(t.clone(), iface("phi1")));
        assert!(!f.attach(t, iface("phi1")));
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn one_tag_many_interfaces() {
        let t = create_tag("ferrari", "u0").unwrap();
        let f = FacetedTaxonomy::new()
            .attach_pair(t.clone(), iface("phi1"))
            .attach_pair(t.clone(), iface("phi2"));
        assert_eq!(f.len(), 2);
        assert!(f.contains(&t, &iface("phi1")));
        assert!(f.contains(&t, &iface("phi2")));
        assert_eq!(f.interfaces_for(&t).count(), 2);
    }

    #[test]
    fn k_distinct_pairs() {
        let mut f = FacetedTaxonomy::new();
        for i in 0..7 {
            let t = create_tag(&format!("t{}", i % 3), "u0").unwrap();
            f.attach(t, iface(&format!("phi{i}")));
        }
        assert_eq!(f.len(), 7);
    }

    fn portlet(id: &str, facets: &[(&str, &str)]) -> Portlet {
        facets
            .iter()
            .fold(Portlet::new(id, PortletKind::Picture, "", "u0"), |p, (n, v)| p.with_facet(n, v))
    }

    #[test]
    fn compose_two_portlets() {
        let f1 = portlet("F1", &[("brand", "ferrari")]);
        let f2 = portlet("F2", &[("type", "photo")]);
        let iface = compose_interface(&[f1, f2]).unwrap();
        let expected: BTreeSet<Facet> =
            [Facet::new("brand", "ferrari"), Facet::new("type", "photo")].into_iter().collect();
        assert_eq!(iface.facet_selections, expected);
        assert_eq!(iface.layout_slots, vec![PortletId::new("F1"), PortletId::new("F2")]);
    }

    #[test]
    fn compose_singleton_and_errors() {
        let p = portlet("P", &[("color", "red"), ("color", "blue")]);
        assert_eq!(compose_interface(std::slice::from_ref(&p)).unwrap().facet_selections, p.facets);
        assert!(matches!(compose_interface(&[]), Err(TaxonomyError::EmptyComposition)));
        assert!(matches!(
            compose_interface(&[p.clone(), p]),
            Err(TaxonomyError::DuplicatePortlet(_))
        ));
    }

    #[test]
    fn histogram_counts() {
        let ps = [
            portlet("p1", &[("color", "red")]),
            portlet("p2", &[("color", "red")]),
            portlet("p3", &[("color", "blue")]),
        ];
        let h = facet_histogram(&ps, "color");
        assert_eq!(h, BTreeMap::from([("blue".to_owned(), 1), ("red".to_owned(), 2)]));
        assert!(facet_histogram(&ps, "size").is_empty());
        assert!(facet_histogram(&[], "color").is_empty());
    }

    #[test]
    fn child_cycles_rejected() {
        let mut reg = PortletRegistry::new();
        reg.insert(portlet("a", &[])).unwrap();
        reg.insert(portlet("b", &[])).unwrap();
        reg.add_child(&"a".into(), &"b".into()).unwrap();
        assert!(matches!(
            reg.add_child(&"b".into(), &"a".into()),
            Err(TaxonomyError::CycleDetected { .. })
        ));
        assert!(matches!(
            reg.add_child(&"a".into(), &"a".into()),
            Err(TaxonomyError::CycleDetected { .. })
        ));
        let mut selfish = portlet("c", &[]);
        selfish.children.push("c".into());
        assert!(matches!(reg.insert(selfish), Err(TaxonomyError::CycleDetected { .. })));
    }

    #[test]
    fn kind_is_fixed() {
        let mut reg = PortletRegistry::new();
        reg.insert(portlet("a", &[])).unwrap();
        assert!(reg.insert(Portlet::new("a", PortletKind::Video, "", "u0")).is_err());
    }

    #[test]
    fn facet_parsing() {
        assert_eq!("brand=ferrari".parse::<Facet>().unwrap(), Facet::new("brand", "ferrari"));
        assert_eq!("eq=a=b".parse::<Facet>().unwrap(), Facet::new("eq", "a=b"));
        assert!("novalue".parse::<Facet>().is_err());
        assert!("=x".parse::<Facet>().is_err());
    }

    #[test]
    fn registry_survives_the_store() {
        let mut reg = PortletRegistry::new();
        let f1 = portlet("F1", &[("brand", "ferrari")]).with_tag(create_tag("Ferrari", "u0").unwrap());
        let f2 = portlet("F2", &[("type", "photo")]).with_tag(create_tag("red", "a1").unwrap());
        reg.insert(f1).unwrap();
        reg.insert(f2).unwrap();
        let mut f = Portlet::new("F", PortletKind::Text, "wiki://f", "u0");
        f.children = vec!["F2".into(), "F1".into()];
        reg.insert(f).unwrap();

        let mut store = TripleStore::new();
        store.extend(reg.to_triples().unwrap()).unwrap();
        let back = PortletRegistry::from_store(&store).unwrap();
        assert_eq!(back, reg);
    }

    #[test]
    fn taxonomy_survives_the_store() {
        let t = create_tag("ferrari", "u0").unwrap();
        let mut phi = FacetedInterface::new("phi1").with_facet(Facet::new("brand", "ferrari"));
        phi.layout_slots = vec!["F1".into(), "F2".into()];
        let f = FacetedTaxonomy::new()
            .attach_pair(t.clone(), phi)
            .attach_pair(t, FacetedInterface::new("phi2"));
        let mut store = TripleStore::new();
        store.extend(f.to_triples().unwrap()).unwrap();
        assert_eq!(FacetedTaxonomy::from_store(&store).unwrap(), f);
    }
}
