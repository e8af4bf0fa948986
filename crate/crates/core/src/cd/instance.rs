use std::fmt;

use super::ast::{ClassDiagram, Modifier};
use super::object_model::ObjectModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    UnknownClass,
    AbstractInstantiated,
    SingletonCount,
    UnknownAssociation,
    BadEndpoint,
    Multiplicity,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::UnknownClass => "UNKNOWN_CLASS",
            ViolationKind::AbstractInstantiated => "ABSTRACT_INSTANTIATED",
            ViolationKind::SingletonCount => "SINGLETON_COUNT",
            ViolationKind::UnknownAssociation => "UNKNOWN_ASSOCIATION",
            ViolationKind::BadEndpoint => "BAD_ENDPOINT",
            ViolationKind::Multiplicity => "MULTIPLICITY",
        })
    }
}

/// One reason why an object model is not an instance of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Object id, class name (singletons) or association name.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.kind, self.subject, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstanceCheck {
    pub violations: Vec<Violation>,
}

impl InstanceCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Decides `om ∈ sem(cd)`, listing every violated constraint.
pub fn is_instance(om: &ObjectModel, cd: &ClassDiagram) -> InstanceCheck {
    let mut out = Vec::new();
    let mut push = |kind, subject: &str, detail: String| {
        out.push(Violation {
            kind,
            subject: subject.to_string(),
            detail,
        })
    };
    let class_of = |id: &str| om.objects.get(id).map(String::as_str);
    let is_a = |id: &str, class: &str| {
        class_of(id).is_some_and(|c| cd.classes.contains_key(c) && cd.is_subtype(c, class))
    };

    for (id, class) in &om.objects {
        match cd.class(class) {
            None => push(
                ViolationKind::UnknownClass,
                id,
                format!("class `{class}` is not declared"),
            ),
            Some(decl) if decl.modifier == Modifier::Abstract => push(
                ViolationKind::AbstractInstantiated,
                id,
                format!("class `{class}` is abstract"),
            ),
            Some(_) => {}
        }
    }

    for decl in cd
        .classes
        .values()
        .filter(|c| c.modifier == Modifier::Singleton)
    {
        let n = om.objects.keys().filter(|id| is_a(id, &decl.name)).count();
        if n != 1 {
            push(
                ViolationKind::SingletonCount,
                &decl.name,
                format!("singleton has {n} instances"),
            );
        }
    }

    for link in &om.links {
        let Some(assoc) = cd.associations.get(&link.assoc) else {
            push(
                ViolationKind::UnknownAssociation,
                &link.assoc,
                format!(
                    "link {} -- {} uses an undeclared association",
                    link.src, link.dst
                ),
            );
            continue;
        };
        if !is_a(&link.src, &assoc.left) || !is_a(&link.dst, &assoc.right) {
            push(
                ViolationKind::BadEndpoint,
                &link.assoc,
                format!(
                    "link {}:{} -- {}:{} does not connect {} to {}",
                    link.src,
                    class_of(&link.src).unwrap_or("?"),
                    link.dst,
                    class_of(&link.dst).unwrap_or("?"),
                    assoc.left,
                    assoc.right
                ),
            );
        }
    }

    for assoc in cd.associations.values() {
        for id in om.objects.keys() {
            if is_a(id, &assoc.left) {
                let n = om
                    .links
                    .iter()
                    .filter(|l| l.assoc == assoc.name && &l.src == id)
                    .count();
                if !assoc.right_mult.admits(n) {
                    push(
                        ViolationKind::Multiplicity,
                        id,
                        format!(
                            "{n} `{}` links to {}, expected {}",
                            assoc.name, assoc.right, assoc.right_mult
                        ),
                    );
                }
            }
            if is_a(id, &assoc.right) {
                let n = om
                    .links
                    .iter()
                    .filter(|l| l.assoc == assoc.name && &l.dst == id)
                    .count();
                if !assoc.left_mult.admits(n) {
                    push(
                        ViolationKind::Multiplicity,
                        id,
                        format!(
                            "{n} `{}` links from {}, expected {}",
                            assoc.name, assoc.left, assoc.left_mult
                        ),
                    );
                }
            }
        }
    }

    InstanceCheck { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cd::parse_cd;

    fn cd1_v1() -> ClassDiagram {
        parse_cd(
            "classdiagram v1 { class Employee; class Manager; class Task;
             association worksOn [*] Employee -- Task [*]; }",
        )
        .unwrap()
    }

    fn cd1_v2() -> ClassDiagram {
        parse_cd(
            "classdiagram v2 { class Employee; class Manager extends Employee; class Task;
             association worksOn [*] Employee -- Task [0..2]; }",
        )
        .unwrap()
    }

    fn three_tasks() -> ObjectModel {
        ObjectModel::new("m")
            .with_object("e1", "Employee")
            .with_object("t1", "Task")
            .with_object("t2", "Task")
            .with_object("t3", "Task")
            .with_link("worksOn", "e1", "t1")
            .with_link("worksOn", "e1", "t2")
            .with_link("worksOn", "e1", "t3")
    }

    #[test]
    fn three_tasks_only_in_first_version() {
        assert!(is_instance(&three_tasks(), &cd1_v1()).holds());
        let check = is_instance(&three_tasks(), &cd1_v2());
        assert!(!check.holds());
        assert_eq!(check.violations.len(), 1);
        assert_eq!(check.violations[0].kind, ViolationKind::Multiplicity);
        assert_eq!(check.violations[0].subject, "e1");
    }

    #[test]
    fn managers_handle_tasks_only_in_second_version() {
        let om = ObjectModel::new("m")
            .with_object("m1", "Manager")
            .with_object("t1", "Task")
            .with_link("worksOn", "m1", "t1");
        let check = is_instance(&om, &cd1_v1());
        assert!(check.has(ViolationKind::BadEndpoint));
        assert!(is_instance(&om, &cd1_v2()).holds());
    }

    #[test]
    fn empty_model_is_vacuous_instance() {
        assert!(is_instance(&ObjectModel::new("e"), &cd1_v1()).holds());
    }

    #[test]
    fn singleton_counts_subclasses() {
        let cd = parse_cd("classdiagram c { singleton class S; class T extends S; }").unwrap();
        assert!(is_instance(&ObjectModel::new("e"), &cd).has(ViolationKind::SingletonCount));
        let one_sub = ObjectModel::new("m").with_object("t1", "T");
        assert!(is_instance(&one_sub, &cd).holds());
        let two = one_sub.clone().with_object("s1", "S");
        assert!(is_instance(&two, &cd).has(ViolationKind::SingletonCount));
    }

    #[test]
    fn unknown_and_abstract_classes() {
        let cd = parse_cd("classdiagram c { abstract class P; class E extends P; }").unwrap();
        let om = ObjectModel::new("m")
            .with_object("p1", "P")
            .with_object("x1", "X");
        let check = is_instance(&om, &cd);
        assert!(check.has(ViolationKind::AbstractInstantiated));
        assert!(check.has(ViolationKind::UnknownClass));
        assert_eq!(check.violations.len(), 2);
    }

    #[test]
    fn unknown_association() {
        let cd = parse_cd("classdiagram c { class A; }").unwrap();
        let om = ObjectModel::new("m")
            .with_object("a1", "A")
            .with_link("r", "a1", "a1");
        assert!(is_instance(&om, &cd).has(ViolationKind::UnknownAssociation));
    }

    #[test]
    fn left_end_multiplicity_counts_incoming() {
        let cd =
            parse_cd("classdiagram c { class A; class B; association r [1] A -- B [*]; }").unwrap();
        let orphan = ObjectModel::new("m").with_object("b1", "B");
        let check = is_instance(&orphan, &cd);
        assert_eq!(check.violations.len(), 1);
        assert_eq!(check.violations[0].subject, "b1");
        let owned = orphan.with_object("a1", "A").with_link("r", "a1", "b1");
        assert!(is_instance(&owned, &cd).holds());
    }
}
