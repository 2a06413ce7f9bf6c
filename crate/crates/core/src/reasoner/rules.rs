//! Horn rules over relation atoms and their text format.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{structural_rule_id, RelationType, StructuralRule};

/// A rule atom with numbered variables.
type NumberedAtom = (RelationType, usize, usize);

/// The rule file shipped with the crate.
pub const DEFAULT_RULES: &str = include_str!("default.rules");

/// `relation(left, right)` with both arguments variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: RelationType,
    pub left: String,
    pub right: String,
}

impl Atom {
    pub fn new(relation: RelationType, left: impl Into<String>, right: impl Into<String>) -> Self {
        Self {
            relation,
            left: left.into(),
            right: right.into(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.relation, self.left, self.right)
    }
}

/// `body_1 & ... & body_n => head`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl Rule {
    /// Builds a rule, checking that the body is non-empty and that every head
    /// variable occurs in the body.
    pub fn new(id: impl Into<String>, body: Vec<Atom>, head: Atom) -> Result<Self> {
        let rule = Self {
            id: id.into(),
            body,
            head,
        };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |message: &str| Error::InvalidRule {
            rule: self.id.clone(),
            message: message.to_owned(),
        };
        if self.id.is_empty() {
            return Err(invalid("empty id"));
        }
        if self.body.is_empty() {
            return Err(invalid("empty body"));
        }
        let bound: HashSet<&str> = self
            .body
            .iter()
            .flat_map(|a| [a.left.as_str(), a.right.as_str()])
            .collect();
        for var in [&self.head.left, &self.head.right] {
            if !bound.contains(var.as_str()) {
                return Err(invalid(&format!("head variable {var} does not occur in the body")));
            }
        }
        if !self.head.relation.is_incorrectness()
            && self.body.iter().any(|a| a.relation.is_incorrectness())
        {
            return Err(invalid(
                "only rules concluding an incorrectness relation may read incorrectness facts",
            ));
        }
        Ok(())
    }

    /// Rules concluding an incorrectness relation form the last stratum.
    pub fn is_consistency_rule(&self) -> bool {
        self.head.relation.is_incorrectness()
    }

    /// The rule with variables renamed by order of first appearance, used to
    /// recognise rules that differ only in id or variable names.
    pub(crate) fn shape(&self) -> (Vec<NumberedAtom>, NumberedAtom) {
        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        let mut var = |name: &str| {
            let next = names.len();
            *names.entry(name.to_owned()).or_insert(next)
        };
        let body = self
            .body
            .iter()
            .map(|a| (a.relation, var(&a.left), var(&a.right)))
            .collect();
        let head = (self.head.relation, var(&self.head.left), var(&self.head.right));
        (body, head)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.id)?;
        for (i, atom) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{atom}")?;
        }
        write!(f, " => {}", self.head)
    }
}

/// Parses a rule file. Blank lines and lines starting with `#` are skipped.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    let mut rules = Vec::new();
    let mut seen = BTreeSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let number = index + 1;
        let rule = parse_rule_line(line).map_err(|message| Error::RuleSyntax { line: number, message })?;
        rule.validate()?;
        if !seen.insert(rule.id.clone()) {
            return Err(Error::RuleSyntax {
                line: number,
                message: format!("duplicate rule id `{}`", rule.id),
            });
        }
        rules.push(rule);
    }
    Ok(rules)
}

fn parse_rule_line(line: &str) -> std::result::Result<Rule, String> {
    let (id, rest) = line.split_once(':').ok_or("expected `id:` prefix")?;
    let id = id.trim();
    if id.is_empty() || !id.chars().all(is_ident_char) {
        return Err(format!("invalid rule id `{id}`"));
    }
    let (body, head) = rest.split_once("=>").ok_or("expected `=>`")?;
    let body = body
        .split('&')
        .map(parse_atom)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let head = parse_atom(head)?;
    Ok(Rule {
        id: id.to_owned(),
        body,
        head,
    })
}

fn parse_atom(text: &str) -> std::result::Result<Atom, String> {
    let text = text.trim();
    let (name, args) = text
        .split_once('(')
        .ok_or_else(|| format!("expected `relation(X,Y)`, found `{text}`"))?;
    let args = args
        .strip_suffix(')')
        .ok_or_else(|| format!("missing `)` in `{text}`"))?;
    let relation: RelationType = name.trim().parse().map_err(|e: Error| e.to_string())?;
    let (left, right) = args
        .split_once(',')
        .ok_or_else(|| format!("expected two arguments in `{text}`"))?;
    let (left, right) = (left.trim(), right.trim());
    for var in [left, right] {
        if var.is_empty() || !var.chars().all(is_ident_char) {
            return Err(format!("invalid variable `{var}` in `{text}`"));
        }
    }
    Ok(Atom::new(relation, left, right))
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

/// Inverse, symmetry and transitivity rules for every relation.
pub fn structural_rules() -> Vec<Rule> {
    let mut rules = Vec::new();
    for relation in RelationType::ALL {
        if let Some(inverse) = relation.inverse() {
            rules.push(Rule {
                id: structural_rule_id(StructuralRule::Mirror, relation),
                body: vec![Atom::new(relation, "A", "B")],
                head: Atom::new(inverse, "B", "A"),
            });
        }
    }
    for relation in RelationType::ALL.into_iter().filter(|r| r.is_transitive()) {
        rules.push(Rule {
            id: structural_rule_id(StructuralRule::Transitive, relation),
            body: vec![Atom::new(relation, "A", "B"), Atom::new(relation, "B", "C")],
            head: Atom::new(relation, "A", "C"),
        });
    }
    rules
}

/// A validated rule list, always extended by the structural rules of the
/// relation algebra.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Result<Self> {
        let mut out: Vec<Rule> = Vec::new();
        let mut ids = BTreeSet::new();
        let mut shapes = HashSet::new();
        for rule in rules {
            rule.validate()?;
            if !ids.insert(rule.id.clone()) {
                return Err(Error::InvalidRule {
                    rule: rule.id,
                    message: "duplicate id".into(),
                });
            }
            shapes.insert(rule.shape());
            out.push(rule);
        }
        for rule in structural_rules() {
            if shapes.insert(rule.shape()) {
                if ids.contains(&rule.id) {
                    return Err(Error::InvalidRule {
                        rule: rule.id,
                        message: "id reserved for a structural rule".into(),
                    });
                }
                ids.insert(rule.id.clone());
                out.push(rule);
            }
        }
        Ok(Self { rules: out })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rules(text)?)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Only the rules concluding incorrectness relations.
    pub fn consistency_rules(&self) -> Vec<Rule> {
        self.rules.iter().filter(|r| r.is_consistency_rule()).cloned().collect()
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::parse(DEFAULT_RULES).expect("embedded rule file is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_file_parses_and_contains_algebra() {
        let parsed = parse_rules(DEFAULT_RULES).unwrap();
        let set = RuleSet::default();
        // the file already lists every structural rule
        assert_eq!(parsed.len(), set.len());
        for generated in structural_rules() {
            let listed = set.get(&generated.id).expect(&generated.id);
            assert_eq!(listed, &generated);
        }
    }

    #[test]
    fn default_file_inventory() {
        let parsed = parse_rules(DEFAULT_RULES).unwrap();
        let structural = structural_rules();
        let extra: Vec<_> = parsed
            .iter()
            .filter(|r| !structural.iter().any(|s| s.id == r.id))
            .map(|r| r.id.as_str())
            .collect();
        assert_eq!(
            extra,
            [
                "narrower_via_format",
                "based_on_via_part",
                "based_on_via_requires",
                "more_specific_via_format",
                "alternative_via_version_of",
                "alternative_via_has_version",
                "requires_via_part",
                "requires_whole",
                "incorrect_part",
                "incorrect_format_version",
            ]
        );
        assert_eq!(structural.len(), 20 + 9);
    }

    #[test]
    fn display_round_trips() {
        for rule in parse_rules(DEFAULT_RULES).unwrap() {
            let again = parse_rules(&rule.to_string()).unwrap();
            assert_eq!(again, vec![rule]);
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_rules("# c\n\nbad line\n").unwrap_err();
        assert!(matches!(err, Error::RuleSyntax { line: 3, .. }), "{err}");
        let err = parse_rules("r: foo(A,B) => hasPart(A,B)").unwrap_err();
        assert!(err.to_string().contains("unknown relation"), "{err}");
        let err = parse_rules("r: hasPart(A,B) => hasPart(A,C)").unwrap_err();
        assert!(matches!(err, Error::InvalidRule { .. }));
        let err = parse_rules("r: incorrectPart(A,B) => hasPart(A,B)").unwrap_err();
        assert!(matches!(err, Error::InvalidRule { .. }));
        let err = parse_rules("r: hasPart(A,B) => hasPart(A,B)\nr: hasPart(A,B) => hasPart(A,B)").unwrap_err();
        assert!(matches!(err, Error::RuleSyntax { line: 2, .. }));
    }

    #[test]
    fn structural_rules_are_added_once() {
        let custom = parse_rules("mine: requires(X,Y) => isRequiredBy(Y,X)").unwrap();
        let set = RuleSet::new(custom).unwrap();
        // `mine` has the shape of inv_requires, which is therefore not added
        assert!(set.get("inv_requires").is_none());
        assert_eq!(set.len(), structural_rules().len());
    }
}
