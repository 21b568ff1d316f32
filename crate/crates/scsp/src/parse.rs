//! Instance-file and relation-literal parsing.
//!
//! The instance format is line-oriented plain text with `#` comments:
//!
//! ```text
//! vars x y z
//! option seed 7
//! x y : [0, 1/2pi) | cone:N | eq
//! z : proj:NE
//! ```
//!
//! `vars` lines declare point variables (the world origin is added
//! implicitly as variable 0). A constraint line names two variables (binary)
//! or one (unary, rooted at the origin), then a disjunction of terms
//! separated by `|`: sector terms `[`/`(` angle `,` angle `)`/`]`, cardinal
//! atoms tagged with their calculus (`cone:N`, `proj:SW`), and `eq`.
//! Duplicate constraint lines intersect. `option` lines set solver defaults
//! (`seed`, `steps`, `time-ms`), overridable from the command line.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::angle::Angle;
use crate::cardinal::{atom_to_relation, Atom, Calculus};
use crate::network::Network;
use crate::relation::{Relation, RelationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

/// Options parsed from `option` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceOptions {
    pub seed: Option<u64>,
    pub steps: Option<u64>,
    pub time_ms: Option<u64>,
}

/// A parsed instance: the network plus file-level options and any warnings
/// (e.g. degenerate sectors that normalized to empty).
#[derive(Debug)]
pub struct Instance {
    pub network: Network,
    pub options: InstanceOptions,
    pub warnings: Vec<String>,
}

/// Parses a relation literal: terms separated by `|`.
pub fn parse_relation(text: &str) -> Result<Relation, String> {
    let mut acc = Relation::empty();
    let mut any = false;
    for term in text.split('|') {
        let term = term.trim();
        if term.is_empty() {
            return Err("empty disjunct in relation".to_string());
        }
        acc = acc.union(&parse_term(term)?);
        any = true;
    }
    if !any {
        return Err("empty relation literal".to_string());
    }
    Ok(acc)
}

fn parse_term(term: &str) -> Result<Relation, String> {
    if term == "eq" {
        return Ok(Relation::eq_only());
    }
    if let Some(rest) = term.strip_prefix("cone:") {
        let atom: Atom = rest
            .trim()
            .parse()
            .map_err(|_| format!("unknown cone atom `{rest}`"))?;
        return Ok(atom_to_relation(Calculus::Cone, atom));
    }
    if let Some(rest) = term.strip_prefix("proj:") {
        let atom: Atom = rest
            .trim()
            .parse()
            .map_err(|_| format!("unknown projection atom `{rest}`"))?;
        return Ok(atom_to_relation(Calculus::Proj, atom));
    }
    parse_sector(term)
}

fn parse_sector(term: &str) -> Result<Relation, String> {
    let mut chars = term.chars();
    let open = chars.next().ok_or("empty sector term")?;
    let lo_closed = match open {
        '[' => true,
        '(' => false,
        _ => {
            return Err(format!(
                "expected `[`, `(`, `eq`, `cone:` or `proj:` at `{term}`"
            ))
        }
    };
    let close = term.chars().last().unwrap();
    let hi_closed = match close {
        ']' => true,
        ')' => false,
        _ => return Err(format!("sector term `{term}` must end with `]` or `)`")),
    };
    let body = &term[1..term.len() - 1];
    let (lo_text, hi_text) = body
        .split_once(',')
        .ok_or_else(|| format!("sector term `{term}` needs two comma-separated angles"))?;
    let lo: Angle = lo_text.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: Angle = hi_text.trim().parse().map_err(|e| format!("{e}"))?;
    match Relation::from_basic(lo, lo_closed, hi, hi_closed) {
        Ok(r) => Ok(r),
        Err(RelationError::MalformedBasicConstraint { lo, hi, .. }) => Err(format!(
            "sector from {lo} to {hi} spans half a turn or more; a basic sector must span strictly less than pi"
        )),
        Err(e) => Err(format!("{e}")),
    }
}

fn is_valid_name(s: &str) -> bool {
    let reserved = ["vars", "option", "eq", "cone", "proj"];
    !reserved.contains(&s)
        && s.chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses an instance file into a network (origin auto-added as variable 0).
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    struct Pending {
        line_no: usize,
        vars: Vec<(String, usize)>, // name, column
        relation_text: String,
        relation_col: usize,
    }

    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut pending: Vec<Pending> = Vec::new();
    let mut options = InstanceOptions::default();
    let mut warnings = Vec::new();

    for (line_idx, raw) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim_start();
        let col0 = line.len() - trimmed.len() + 1;

        if let Some(rest) = trimmed.strip_prefix("vars") {
            if !rest.starts_with(char::is_whitespace) && !rest.is_empty() {
                return Err(ParseError::new(line_no, col0, "malformed `vars` line"));
            }
            for name in rest.split_whitespace() {
                if !is_valid_name(name) {
                    return Err(ParseError::new(
                        line_no,
                        col0,
                        format!("invalid variable name `{name}`"),
                    ));
                }
                if index.contains_key(name) {
                    return Err(ParseError::new(
                        line_no,
                        col0,
                        format!("variable `{name}` declared twice"),
                    ));
                }
                index.insert(name.to_string(), names.len() + 1); // origin is 0
                names.push(name.to_string());
            }
            continue;
        }

        if let Some(rest) = trimmed.strip_prefix("option") {
            let mut parts = rest.split_whitespace();
            let key = parts
                .next()
                .ok_or_else(|| ParseError::new(line_no, col0, "option needs a key"))?;
            let value = parts
                .next()
                .ok_or_else(|| ParseError::new(line_no, col0, "option needs a value"))?;
            if parts.next().is_some() {
                return Err(ParseError::new(
                    line_no,
                    col0,
                    "trailing tokens after option value",
                ));
            }
            let parsed: u64 = value.parse().map_err(|_| {
                ParseError::new(
                    line_no,
                    col0,
                    format!("option `{key}` needs an integer value"),
                )
            })?;
            match key {
                "seed" => options.seed = Some(parsed),
                "steps" => options.steps = Some(parsed),
                "time-ms" => options.time_ms = Some(parsed),
                _ => {
                    return Err(ParseError::new(
                        line_no,
                        col0,
                        format!("unknown option `{key}`"),
                    ))
                }
            }
            continue;
        }

        let (head, rel_text) = trimmed.split_once(':').ok_or_else(|| {
            ParseError::new(
                line_no,
                col0,
                "expected `vars`, `option`, or a constraint line with `:`",
            )
        })?;
        let rel_col = col0 + head.len() + 1;
        let vars: Vec<&str> = head.split_whitespace().collect();
        if vars.is_empty() || vars.len() > 2 {
            return Err(ParseError::new(
                line_no,
                col0,
                "a constraint names one variable (unary) or two (binary) before `:`",
            ));
        }
        let mut resolved = Vec::new();
        for v in &vars {
            let col = col0 + trimmed.find(v).unwrap_or(0);
            resolved.push(((*v).to_string(), col));
        }
        pending.push(Pending {
            line_no,
            vars: resolved,
            relation_text: rel_text.trim().to_string(),
            relation_col: rel_col,
        });
    }

    let mut network =
        Network::new(names.len() + 1).map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    for (i, name) in names.iter().enumerate() {
        network.set_name(i + 1, name.clone());
    }

    for p in pending {
        let mut ids = Vec::new();
        for (name, col) in &p.vars {
            let id = index.get(name).copied().ok_or_else(|| {
                ParseError::new(p.line_no, *col, format!("unknown variable `{name}`"))
            })?;
            ids.push(id);
        }
        let relation = parse_relation(&p.relation_text)
            .map_err(|msg| ParseError::new(p.line_no, p.relation_col, msg))?;
        if relation.is_empty() {
            warnings.push(format!(
                "line {}: constraint normalizes to the empty relation (degenerate sector)",
                p.line_no
            ));
        }
        let outcome = match ids.as_slice() {
            [single] => network.add_unary(*single, &relation),
            [a, b] => {
                if a == b {
                    return Err(ParseError::new(
                        p.line_no,
                        p.vars[0].1,
                        "binary constraint needs two distinct variables; use the unary form instead",
                    ));
                }
                network.add_constraint(*a, *b, &relation)
            }
            _ => unreachable!("arity checked above"),
        };
        outcome.map_err(|e| ParseError::new(p.line_no, p.vars[0].1, e.to_string()))?;
    }

    Ok(Instance {
        network,
        options,
        warnings,
    })
}

impl fmt::Display for InstanceOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={:?} steps={:?} time_ms={:?}",
            self.seed, self.steps, self.time_ms
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang(n: i64, d: i64) -> Angle {
        Angle::ratio(n, d)
    }

    #[test]
    fn parse_relation_literals() {
        let r = parse_relation("[0, 1/2pi) | (pi, 5/4pi] | eq").unwrap();
        let expect = Relation::from_basic(ang(0, 1), true, ang(1, 2), false)
            .unwrap()
            .union(&Relation::from_basic(ang(1, 1), false, ang(5, 4), true).unwrap())
            .union(&Relation::eq_only());
        assert_eq!(r, expect);

        assert_eq!(
            parse_relation("cone:N").unwrap(),
            crate::cardinal::cone_to_relation(Atom::N)
        );
        assert_eq!(
            parse_relation("proj:NE").unwrap(),
            crate::cardinal::proj_to_relation(Atom::NE)
        );
        // Mixed qualitative/quantitative disjunction is allowed.
        assert!(parse_relation("cone:N | [0, 1/4pi)").is_ok());

        assert!(parse_relation("[0, 3/2pi)").is_err());
        assert!(parse_relation("cone:XX").is_err());
        assert!(parse_relation("").is_err());
    }

    #[test]
    fn parse_small_instance() {
        let text = "\
# a simple instance
vars x y
x y : [0, 1/2pi)
x : cone:N
";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.network.num_vars(), 3);
        assert_eq!(inst.network.name(1), Some("x"));
        assert_eq!(
            *inst.network.label(1, 2),
            Relation::from_basic(ang(0, 1), true, ang(1, 2), false).unwrap()
        );
        assert_eq!(
            *inst.network.label(1, 0),
            crate::cardinal::cone_to_relation(Atom::N)
        );
    }

    #[test]
    fn duplicate_constraints_intersect() {
        let text = "\
vars x y
x y : [0, 1/2pi]
x y : [1/4pi, 3/4pi]
";
        let inst = parse_instance(text).unwrap();
        assert_eq!(
            *inst.network.label(1, 2),
            Relation::from_basic(ang(1, 4), true, ang(1, 2), true).unwrap()
        );
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_instance("vars x\nx w : eq\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.msg.contains("unknown variable"));

        let err = parse_instance("vars x y\nx y : [0, 3/2pi)\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.msg.contains("strictly less than pi"));

        assert!(parse_instance("vars x x\n").is_err());
        assert!(parse_instance("vars eq\n").is_err());
        assert!(parse_instance("fnord\n").is_err());
    }

    #[test]
    fn degenerate_sector_warns() {
        let inst = parse_instance("vars x y\nx y : (0, 0)\n").unwrap();
        assert_eq!(inst.warnings.len(), 1);
        assert!(inst.network.label(1, 2).is_empty());
    }

    #[test]
    fn options_parsed() {
        let inst = parse_instance("vars x\noption seed 42\noption steps 1000\n").unwrap();
        assert_eq!(inst.options.seed, Some(42));
        assert_eq!(inst.options.steps, Some(1000));
        assert_eq!(inst.options.time_ms, None);
        assert!(parse_instance("option bogus 1\n").is_err());
    }
}
