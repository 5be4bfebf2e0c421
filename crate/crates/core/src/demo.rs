//! The shipped demo community: one speaker sharing a car photo with two
//! audiences that know the same concept by different names, a small
//! navigation graph, and the sample usability matrix.

use crate::evaluation::{Attribute, EvaluationMatrix};
use crate::ids::NodeId;
use crate::jointmeaning::{FoafProfile, User};
use crate::matcher::{Concept, Ontology};
use crate::store::Triple;
use crate::taxonomy::{create_tag, Portlet, PortletKind};
use crate::vocab;
use crate::workspace::{Result, Workspace};

pub const SPEAKER: &str = "u0";
pub const AUDIENCE_A: &str = "a1";
pub const AUDIENCE_B: &str = "b1";
pub const PHOTO: &str = "p1";

pub const USABILITY_CSV: &str = "\
task,Share a photo of a car between friends with same interest in cars
predictability,8,0.1
understandability,8,0.1
richness,5,0.5
comprehensibility,6,0.3
";

pub fn usability_matrix() -> EvaluationMatrix {
    EvaluationMatrix::new(
        "Share a photo of a car between friends with same interest in cars",
        vec![
            Attribute::new("predictability", 8.0, 0.1),
            Attribute::new("understandability", 8.0, 0.1),
            Attribute::new("richness", 5.0, 0.5),
            Attribute::new("comprehensibility", 6.0, 0.3),
        ],
    )
    .expect("the sample matrix is valid")
}

/// Concepts carry two numeric features: relative price and relative speed.
pub fn ontology() -> Ontology {
    let concepts = [
        Concept::new("ferrari", "Ferrari").with_tags(["ferrari", "cars", "racing"]).with_features(vec![0.9, 0.95]),
        Concept::new("sportcar", "Sport car").with_tags(["sports", "cars", "speed"]).with_features(vec![0.6, 0.9]),
        Concept::new("expensivecar", "Expensive car")
            .with_tags(["luxury", "cars", "money"])
            .with_features(vec![0.95, 0.5]),
        Concept::new("citycar", "City car").with_tags(["cars", "city"]).with_features(vec![0.3, 0.4]),
        Concept::new("bicycle", "Bicycle").with_tags(["sports", "outdoor"]).with_features(vec![0.05, 0.2]),
        Concept::new("yacht", "Yacht").with_tags(["luxury", "sea"]).with_features(vec![1.0, 0.3]),
    ];
    let mut o = Ontology::new(2);
    for c in concepts {
        o.add_concept(c).expect("demo concepts have two features");
    }
    o.add_equivalence(&"ferrari".into(), &"sportcar".into()).expect("known concepts");
    o.add_equivalence(&"ferrari".into(), &"expensivecar".into()).expect("known concepts");
    o.add_broader(&"sportcar".into(), &"citycar".into()).ok();
    o
}

pub fn users() -> Vec<User> {
    vec![
        User::new(SPEAKER, FoafProfile::new(["cars", "racing"]).with_friend(AUDIENCE_A).with_friend(AUDIENCE_B)),
        User::new(AUDIENCE_A, FoafProfile::new(["sports", "outdoor"]).with_friend(SPEAKER)),
        User::new(AUDIENCE_B, FoafProfile::new(["luxury", "sea"]).with_friend(SPEAKER)),
        // Second members of each audience, addressed by name.
        User::new("audienceA", FoafProfile::new(["sports"]).with_friend(AUDIENCE_A)),
        User::new("audienceB", FoafProfile::new(["luxury"]).with_friend(AUDIENCE_B)),
    ]
}

pub fn portlets() -> Vec<Portlet> {
    let tag = |label: &str, owner: &str| create_tag(label, owner).expect("non-empty demo tag");
    let photo = Portlet::new(PHOTO, PortletKind::Picture, "media://ferrari.jpg", SPEAKER)
        .with_tag(tag("Ferrari", SPEAKER))
        .with_facet("type", "photo")
        .with_facet("brand", "ferrari")
        .with_facet("color", "red")
        .with_facet("topic", "cars");
    let city = Portlet::new("p2", PortletKind::Picture, "media://citycar.jpg", AUDIENCE_A)
        .with_tag(tag("City car", AUDIENCE_A))
        .with_facet("type", "photo")
        .with_facet("color", "blue")
        .with_facet("topic", "cars");
    let ride = Portlet::new("p3", PortletKind::Video, "media://ride.mp4", AUDIENCE_A)
        .with_tag(tag("bicycle", AUDIENCE_A))
        .with_facet("type", "video")
        .with_facet("color", "red")
        .with_facet("topic", "sports");
    let f1 = Portlet::new("F1", PortletKind::Text, "text://specs", SPEAKER)
        .with_tag(tag("Sport car", SPEAKER))
        .with_facet("brand", "ferrari");
    let f2 = Portlet::new("F2", PortletKind::Picture, "media://gallery", SPEAKER)
        .with_tag(tag("Ferrari", SPEAKER))
        .with_facet("type", "photo");
    let mut composed = Portlet::new("F", PortletKind::Code, "code://layout", SPEAKER)
        .with_tag(tag("Ferrari", SPEAKER))
        .with_facet("topic", "cars");
    composed.children = vec!["F1".into(), "F2".into()];
    vec![photo, city, ride, f1, f2, composed]
}

/// Navigation nodes (with their topic facets) and links. `p1` is reachable
/// from `home` through three equally short routes.
pub fn nav_links() -> Vec<(&'static str, &'static str)> {
    vec![
        ("home", "cars"),
        ("home", "sports"),
        ("home", "luxury"),
        ("cars", "p1"),
        ("cars", "p2"),
        ("sports", "p1"),
        ("sports", "p3"),
        ("luxury", "p1"),
        ("p2", "F"),
        ("p1", "F"),
    ]
}

fn nav_topics() -> Vec<(&'static str, &'static str)> {
    vec![("cars", "cars"), ("sports", "sports"), ("luxury", "luxury"), ("home", "home")]
}

pub fn seed() -> Result<Workspace> {
    let mut ws = Workspace::new();
    for u in users() {
        ws.add_user(&u)?;
    }
    ws.load_ontology(&ontology())?;
    for p in portlets() {
        ws.add_portlet(p)?;
    }
    for (a, b) in nav_links() {
        ws.add_nav_link(&NodeId::new(a), &NodeId::new(b))?;
    }
    let mut extra = Vec::new();
    for (node, topic) in nav_topics() {
        extra.push(Triple::with_literal(node, vocab::HAS_FACET, &format!("topic={topic}"))?);
    }
    ws.ingest(&extra.iter().map(|t| format!("{t}\n")).collect::<String>())?;
    Ok(ws)
}
