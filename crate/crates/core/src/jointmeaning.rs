//! Speaker/audience label resolution.
//!
//! A portlet's tags are matched into superconcepts. The speaker always sees
//! their own tag labels; each audience member sees, per superconcept, the
//! member label preferred under a fixed order:
//!
//! 1. overlap between the member concept's tag context and the viewer's interests,
//! 2. whether some FOAF friend of the viewer has already been shown that label,
//! 3. the speaker's label, when the viewer has no interest overlap at all,
//! 4. lexicographically smaller label.
//!
//! Rounds recompute every audience assignment from the labels shown so far
//! until nothing changes. Endorsements only accumulate, so each change is
//! caused by a newly endorsed label and the iteration terminates.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{ConceptId, PortletId, UserId};
use crate::matcher::{label_dissimilarity, superconcept_for_tag, Ontology, Superconcept};
use crate::store::{Term, Triple, TripleStore};
use crate::taxonomy::{normalize_label, Facet, FacetedInterface, Portlet};
use crate::vocab;

#[derive(Debug, Error)]
pub enum JointError {
    #[error("tag {0:?} is not matched into any superconcept")]
    UnmatchedTag(String),
    #[error("speaker {0} is also listed in the audience")]
    SpeakerInAudience(UserId),
    #[error("user {0} appears more than once")]
    DuplicateUser(UserId),
    #[error("a community needs at least one user")]
    EmptyCommunity,
    #[error("unknown user {0}")]
    UnknownUser(UserId),
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
}

pub type Result<T, E = JointError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoafProfile {
    pub interests: BTreeSet<String>,
    pub friends: BTreeSet<UserId>,
}

impl FoafProfile {
    pub fn new<I, S>(interests: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        FoafProfile {
            interests: interests
                .into_iter()
                .map(|s| normalize_label(s.as_ref()))
                .filter(|s| !s.is_empty())
                .collect(),
            friends: BTreeSet::new(),
        }
    }

    pub fn with_friend(mut self, friend: impl Into<UserId>) -> Self {
        self.friends.insert(friend.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub id: UserId,
    pub profile: FoafProfile,
}

impl User {
    pub fn new(id: impl Into<UserId>, profile: FoafProfile) -> Self {
        User { id: id.into(), profile }
    }

    pub fn to_triples(&self) -> Result<Vec<Triple>> {
        let s = self.id.as_str();
        let mut out = vec![Triple::iris(s, vocab::TYPE, vocab::CLASS_USER)?];
        for i in &self.profile.interests {
            out.push(Triple::with_literal(s, vocab::INTEREST, i)?);
        }
        for f in &self.profile.friends {
            out.push(Triple::iris(s, vocab::KNOWS, f.as_str())?);
        }
        Ok(out)
    }
}

/// The set U of users. Never empty; ids are unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Community {
    users: BTreeMap<UserId, User>,
}

impl Community {
    pub fn new(users: impl IntoIterator<Item = User>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for u in users {
            let id = u.id.clone();
            if map.insert(id.clone(), u).is_some() {
                return Err(JointError::DuplicateUser(id));
            }
        }
        if map.is_empty() {
            return Err(JointError::EmptyCommunity);
        }
        Ok(Community { users: map })
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn get(&self, id: &UserId) -> Option<&User> {
        self.users.get(id)
    }

    pub fn users(&self) -> impl Iterator<Item = &User> {
        self.users.values()
    }

    /// Everyone except the speaker.
    pub fn audience_of(&self, speaker: &UserId) -> Vec<User> {
        self.users.values().filter(|u| &u.id != speaker).cloned().collect()
    }

    /// Users are subjects typed `User`; profiles come from `interest` and `knows`.
    pub fn from_store(store: &TripleStore) -> Result<Self> {
        let ty = Term::iri(vocab::TYPE);
        let class = Term::iri(vocab::CLASS_USER);
        let users = store.matching(None, Some(&ty), Some(&class)).map(|t| {
            let id = t.subject.text();
            let mut profile = FoafProfile::new(store.objects(id, vocab::INTEREST).iter().map(|o| o.text()));
            profile.friends = store.objects(id, vocab::KNOWS).iter().map(|o| UserId::new(o.text())).collect();
            User::new(id, profile)
        });
        Community::new(users.collect::<Vec<_>>())
    }
}

/// What one viewer sees of one portlet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstruedView {
    pub viewer: UserId,
    pub portlet: PortletId,
    /// Superconcept handle → label shown.
    pub label_assignment: BTreeMap<ConceptId, String>,
    pub interface: FacetedInterface,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointResolution {
    pub views: BTreeMap<UserId, ConstruedView>,
    /// Rounds run, including the final one that confirmed stability.
    pub rounds: usize,
}

/// Largest overlap between `interests` and the tag context of any member labeled `label`.
fn interest_overlap(class: &Superconcept, ontology: &Ontology, label: &str, interests: &BTreeSet<String>) -> usize {
    class
        .members
        .iter()
        .filter_map(|id| ontology.concept(id))
        .filter(|c| c.label == label)
        .map(|c| c.tag_context.intersection(interests).count())
        .max()
        .unwrap_or(0)
}

/// The member label best matching the profile's interests, falling back to
/// `speaker_label` when no member overlaps. Ties go to the smaller label.
pub fn audience_label(class: &Superconcept, ontology: &Ontology, profile: &FoafProfile, speaker_label: &str) -> String {
    class
        .labels(ontology)
        .into_iter()
        .map(|l| (interest_overlap(class, ontology, l, &profile.interests), Reverse(l)))
        .max()
        .filter(|(overlap, _)| *overlap > 0)
        .map(|(_, Reverse(l))| l.to_owned())
        .unwrap_or_else(|| speaker_label.to_owned())
}

/// Label the speaker sees for a class: their own tag label when it names a
/// member, otherwise the closest member label.
fn speaker_label(class: &Superconcept, ontology: &Ontology, tag_label: &str) -> String {
    let labels = class.labels(ontology);
    if labels.contains(tag_label) {
        return tag_label.to_owned();
    }
    let tag: Vec<char> = tag_label.chars().collect();
    labels
        .into_iter()
        .min_by(|a, b| {
            let da = label_dissimilarity(&tag, &a.chars().collect::<Vec<_>>());
            let db = label_dissimilarity(&tag, &b.chars().collect::<Vec<_>>());
            da.total_cmp(&db).then_with(|| a.cmp(b))
        })
        .map(str::to_owned)
        .unwrap_or_else(|| tag_label.to_owned())
}

struct ClassSlot<'a> {
    handle: ConceptId,
    class: &'a Superconcept,
    speaker_label: String,
    labels: Vec<&'a str>,
}

/// Computes every user's view of `portlet`, iterating audience construals to
/// a fixpoint.
pub fn resolve_joint_interface(
    speaker: &User,
    audience: &[User],
    portlet: &Portlet,
    classes: &[Superconcept],
    ontology: &Ontology,
) -> Result<JointResolution> {
    let mut seen = BTreeSet::new();
    for u in audience {
        if u.id == speaker.id {
            return Err(JointError::SpeakerInAudience(u.id.clone()));
        }
        if !seen.insert(&u.id) {
            return Err(JointError::DuplicateUser(u.id.clone()));
        }
    }

    let mut slots: Vec<ClassSlot> = Vec::new();
    for tag in &portlet.folksonomy {
        let class = superconcept_for_tag(classes, tag)
            .ok_or_else(|| JointError::UnmatchedTag(tag.label().to_owned()))?;
        if slots.iter().any(|s| &s.handle == class.id()) {
            continue;
        }
        slots.push(ClassSlot {
            handle: class.id().clone(),
            class,
            speaker_label: speaker_label(class, ontology, tag.label()),
            labels: class.labels(ontology).into_iter().collect(),
        });
    }

    let speaker_assignment: BTreeMap<ConceptId, String> =
        slots.iter().map(|s| (s.handle.clone(), s.speaker_label.clone())).collect();

    // Round 0: everyone starts from the speaker's construal.
    let mut assignment: BTreeMap<&UserId, BTreeMap<ConceptId, String>> =
        audience.iter().map(|u| (&u.id, speaker_assignment.clone())).collect();
    assignment.insert(&speaker.id, speaker_assignment.clone());

    // endorsed[(viewer, class)] = labels some friend of the viewer has been shown
    // in an earlier round.
    let mut endorsed: BTreeMap<(&UserId, &ConceptId), BTreeSet<String>> = audience
        .iter()
        .flat_map(|v| slots.iter().map(move |s| ((&v.id, &s.handle), BTreeSet::new())))
        .collect();

    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut next = assignment.clone();
        for viewer in audience {
            let mut chosen = BTreeMap::new();
            for slot in &slots {
                let friends_saw = &endorsed[&(&viewer.id, &slot.handle)];
                let overlaps: Vec<usize> = slot
                    .labels
                    .iter()
                    .map(|l| interest_overlap(slot.class, ontology, l, &viewer.profile.interests))
                    .collect();
                let no_overlap = overlaps.iter().all(|&o| o == 0);
                let best = slot
                    .labels
                    .iter()
                    .zip(&overlaps)
                    .max_by_key(|(l, &o)| {
                        (
                            o,
                            friends_saw.contains(**l),
                            no_overlap && **l == slot.speaker_label,
                            Reverse(**l),
                        )
                    })
                    .map(|(l, _)| (*l).to_owned())
                    .unwrap_or_else(|| slot.speaker_label.clone());
                chosen.insert(slot.handle.clone(), best);
            }
            next.insert(&viewer.id, chosen);
        }
        if next == assignment {
            break;
        }
        assignment = next;
        for viewer in audience {
            for slot in &slots {
                let entry = endorsed.get_mut(&(&viewer.id, &slot.handle)).expect("seeded above");
                for friend in &viewer.profile.friends {
                    if let Some(labels) = assignment.get(friend) {
                        entry.insert(labels[&slot.handle].clone());
                    }
                }
            }
        }
    }

    let views = assignment
        .into_iter()
        .map(|(viewer, labels)| {
            let mut interface = FacetedInterface::new(format!("{}@{}", portlet.id, viewer));
            interface.facet_selections = portlet.facets.clone();
            interface.facet_selections.extend(labels.values().map(|l| Facet::new("label", l.clone())));
            interface.layout_slots = std::iter::once(portlet.id.clone()).chain(portlet.children.iter().cloned()).collect();
            let view = ConstruedView {
                viewer: viewer.clone(),
                portlet: portlet.id.clone(),
                label_assignment: labels,
                interface,
            };
            (viewer.clone(), view)
        })
        .collect();
    Ok(JointResolution { views, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::Concept;
    use crate::taxonomy::{create_tag, PortletKind};

    fn shared_photo() -> (Ontology, Superconcept) {
        let mut o = Ontology::new(0);
        o.add_concept(Concept::new("ferrari", "Ferrari").with_tags(["ferrari", "cars", "racing"])).unwrap();
        o.add_concept(Concept::new("sportcar", "Sport car").with_tags(["sports", "cars", "speed"])).unwrap();
        o.add_concept(Concept::new("expensivecar", "Expensive car").with_tags(["luxury", "cars", "money"]))
            .unwrap();
        let class = Superconcept {
            members: ["ferrari", "sportcar", "expensivecar"].into_iter().map(ConceptId::new).collect(),
            matched_tags: [create_tag("Ferrari", "u0").unwrap()].into_iter().collect(),
        };
        (o, class)
    }

    #[test]
    fn audience_label_follows_interests() {
        let (o, s) = shared_photo();
        assert_eq!(audience_label(&s, &o, &FoafProfile::new(["sports"]), "ferrari"), "sport car");
        assert_eq!(audience_label(&s, &o, &FoafProfile::new(["Luxury"]), "ferrari"), "expensive car");
    }

    #[test]
    fn audience_label_falls_back_to_speaker() {
        let (o, s) = shared_photo();
        assert_eq!(audience_label(&s, &o, &FoafProfile::new(["gardening"]), "ferrari"), "ferrari");
    }

    #[test]
    fn audience_label_tie_is_lexicographic() {
        let mut o = Ontology::new(0);
        o.add_concept(Concept::new("x", "zeta").with_tags(["cars"])).unwrap();
        o.add_concept(Concept::new("y", "alpha").with_tags(["cars"])).unwrap();
        let s = Superconcept {
            members: [ConceptId::new("x"), ConceptId::new("y")].into_iter().collect(),
            matched_tags: BTreeSet::new(),
        };
        assert_eq!(audience_label(&s, &o, &FoafProfile::new(["cars"]), "zeta"), "alpha");
    }

    fn photo() -> Portlet {
        Portlet::new("p1", PortletKind::Picture, "img://car.jpg", "u0")
            .with_tag(create_tag("Ferrari", "u0").unwrap())
            .with_facet("type", "photo")
    }

    #[test]
    fn shared_photo_resolution() {
        let (o, s) = shared_photo();
        let speaker = User::new("u0", FoafProfile::new(["cars"]));
        let audience = vec![
            User::new("a1", FoafProfile::new(["sports"]).with_friend("b1")),
            User::new("b1", FoafProfile::new(["luxury"]).with_friend("a1")),
        ];
        let r = resolve_joint_interface(&speaker, &audience, &photo(), &[s], &o).unwrap();
        let label = |u: &str| r.views[&UserId::new(u)].label_assignment[&ConceptId::new("expensivecar")].clone();
        assert_eq!(label("u0"), "ferrari");
        assert_eq!(label("a1"), "sport car");
        assert_eq!(label("b1"), "expensive car");
        assert!(r.rounds <= 2, "rounds = {}", r.rounds);
        assert!(r.views[&UserId::new("a1")].interface.facet_selections.contains(&Facet::new("label", "sport car")));
    }

    #[test]
    fn empty_audience_converges_in_one_round() {
        let (o, s) = shared_photo();
        let speaker = User::new("u0", FoafProfile::default());
        let r = resolve_joint_interface(&speaker, &[], &photo(), &[s], &o).unwrap();
        assert_eq!(r.rounds, 1);
        assert_eq!(r.views.len(), 1);
    }

    #[test]
    fn friends_propagate_labels_to_uninterested_viewers() {
        let (o, s) = shared_photo();
        let speaker = User::new("u0", FoafProfile::default());
        let audience = vec![
            User::new("a1", FoafProfile::new(["sports"])),
            User::new("c1", FoafProfile::new(["gardening"]).with_friend("a1")),
        ];
        let r = resolve_joint_interface(&speaker, &audience, &photo(), &[s], &o).unwrap();
        let c1 = &r.views[&UserId::new("c1")].label_assignment;
        assert_eq!(c1.values().next().unwrap(), "sport car");
        assert_eq!(r.rounds, 3);
    }

    #[test]
    fn unmatched_tag_and_bad_audience() {
        let (o, s) = shared_photo();
        let speaker = User::new("u0", FoafProfile::default());
        let p = photo().with_tag(create_tag("boat", "u0").unwrap());
        assert!(matches!(
            resolve_joint_interface(&speaker, &[], &p, std::slice::from_ref(&s), &o),
            Err(JointError::UnmatchedTag(t)) if t == "boat"
        ));
        assert!(matches!(
            resolve_joint_interface(&speaker, std::slice::from_ref(&speaker), &photo(), &[s], &o),
            Err(JointError::SpeakerInAudience(_))
        ));
    }

    #[test]
    fn community_from_store() {
        let users = [
            User::new("u0", FoafProfile::new(["cars"]).with_friend("a1")),
            User::new("a1", FoafProfile::default()),
        ];
        let mut store = TripleStore::new();
        for u in &users {
            store.extend(u.to_triples().unwrap()).unwrap();
        }
        let c = Community::from_store(&store).unwrap();
        assert_eq!(c, Community::new(users).unwrap());
        assert!(matches!(Community::new(Vec::new()), Err(JointError::EmptyCommunity)));
    }
}
