//! Textual forms of labels and paths.
//!
//! | kind     | label                         | path                       |
//! |----------|-------------------------------|----------------------------|
//! | dag/flat | name, `*` for the top         | name                       |
//! | tbv      | `0`/`1`/`x` string, MSB first | same                       |
//! | ipprefix | `a.b.c.d/len`                 | `a.b.c.d`                  |
//! | range    | `lo..hi`                      | integer or `v..v`          |
//! | tuple    | array of component labels     | object keyed by component  |
//! | hre      | `A.B+.C`                      | array of device names      |
//!
//! Parsers accept both columns; the path parsers additionally require a
//! concrete label.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::feature::{FeatureKind, FeatureType};
use crate::label::{HreElement, Interval, Label};

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn as_str<'v>(f: &FeatureType, v: &'v Value) -> Result<&'v str> {
    match v {
        Value::String(s) => Ok(s),
        other => parse_err(format!("feature '{}' expects a string, got {other}", f.name())),
    }
}

/// Label as a JSON value.
pub fn format_label(f: &FeatureType, l: &Label) -> Value {
    match (f.kind(), l) {
        (FeatureKind::Tuple(t), Label::Tuple(parts)) => Value::Array(
            t.components()
                .iter()
                .zip(parts.iter())
                .map(|(c, p)| format_label(&c.feature, p))
                .collect(),
        ),
        _ => Value::String(label_text(f, l)),
    }
}

/// One-line rendering; tuples print as `(a,b,c)`.
pub fn render(f: &FeatureType, l: &Label) -> String {
    match (f.kind(), l) {
        (FeatureKind::Tuple(t), Label::Tuple(parts)) => {
            let inner: Vec<String> = t
                .components()
                .iter()
                .zip(parts.iter())
                .map(|(c, p)| render(&c.feature, p))
                .collect();
            format!("({})", inner.join(","))
        }
        _ => label_text(f, l),
    }
}

fn label_text(f: &FeatureType, l: &Label) -> String {
    match (f.kind(), l) {
        (FeatureKind::Dag(d) | FeatureKind::Flat(d), Label::Node(n)) => d.name(*n).to_string(),
        (FeatureKind::Tbv(t), Label::Tbv(v)) => t.render(v),
        (FeatureKind::IpPrefix(p), Label::Prefix(v)) => p.render(v),
        (FeatureKind::Range(r), Label::Range(v)) => r.render(v),
        (FeatureKind::Hre(h), Label::Hre(els)) => {
            let dag = h.base();
            els.iter()
                .map(|e| {
                    let name = label_text(dag, &e.label);
                    if e.plus {
                        name + "+"
                    } else {
                        name
                    }
                })
                .collect::<Vec<_>>()
                .join(".")
        }
        _ => render(f, l),
    }
}

pub fn parse_label(f: &FeatureType, v: &Value) -> Result<Label> {
    let l = match f.kind() {
        FeatureKind::Dag(d) | FeatureKind::Flat(d) => {
            let s = as_str(f, v)?;
            match d.lookup(s) {
                Some(n) => Label::Node(n),
                None if s == "*" => f.top(),
                None => return parse_err(format!("unknown label '{s}' in feature '{}'", f.name())),
            }
        }
        FeatureKind::Tbv(t) => Label::Tbv(t.parse(as_str(f, v)?)?),
        FeatureKind::IpPrefix(p) => Label::Prefix(p.parse(as_str(f, v)?)?),
        FeatureKind::Range(r) => match v {
            Value::Number(n) => match n.as_i64() {
                Some(x) => Label::Range(Interval::point(x)),
                None => return parse_err(format!("range value {n} is not an integer")),
            },
            _ => Label::Range(r.parse(as_str(f, v)?)?),
        },
        FeatureKind::Tuple(t) => {
            let comps = t.components();
            let parts: Vec<Label> = match v {
                Value::Array(items) if items.len() == comps.len() => comps
                    .iter()
                    .zip(items)
                    .map(|(c, x)| parse_label(&c.feature, x))
                    .collect::<Result<_>>()?,
                Value::Object(map) => {
                    if let Some(extra) = map.keys().find(|k| t.position(k).is_none()) {
                        return parse_err(format!("unknown component '{extra}' in feature '{}'", f.name()));
                    }
                    comps
                        .iter()
                        .map(|c| match map.get(&c.name) {
                            Some(x) => parse_label(&c.feature, x),
                            None => parse_err(format!("missing component '{}'", c.name)),
                        })
                        .collect::<Result<_>>()?
                }
                other => {
                    return parse_err(format!(
                        "feature '{}' expects an array of {} components or an object, got {other}",
                        f.name(),
                        comps.len()
                    ))
                }
            };
            Label::tuple(parts)
        }
        FeatureKind::Hre(h) => {
            let base = h.base();
            let els: Vec<HreElement> = match v {
                Value::Array(items) => items
                    .iter()
                    .map(|x| Ok(HreElement::one(parse_label(base, x)?)))
                    .collect::<Result<_>>()?,
                Value::String(s) => s
                    .split('.')
                    .map(|tok| {
                        let (name, plus) = match tok.strip_suffix('+') {
                            Some(n) => (n, true),
                            None => (tok, false),
                        };
                        Ok(HreElement::new(parse_label(base, &Value::String(name.into()))?, plus))
                    })
                    .collect::<Result<_>>()?,
                other => {
                    return parse_err(format!(
                        "HRE feature '{}' expects a string or array, got {other}",
                        f.name()
                    ))
                }
            };
            Label::Hre(els.into())
        }
    };
    if !f.contains(&l) {
        return parse_err(format!("{v} is not a label of feature '{}'", f.name()));
    }
    Ok(l)
}

/// Path as a JSON value: tuples become objects keyed by component name and HRE
/// strings become arrays of device names.
pub fn format_path(f: &FeatureType, p: &Label) -> Value {
    match (f.kind(), p) {
        (FeatureKind::Tuple(t), Label::Tuple(parts)) => {
            let mut map = Map::new();
            for (c, x) in t.components().iter().zip(parts.iter()) {
                map.insert(c.name.clone(), format_path(&c.feature, x));
            }
            Value::Object(map)
        }
        (FeatureKind::Hre(h), Label::Hre(els)) => {
            Value::Array(els.iter().map(|e| format_label(h.base(), &e.label)).collect())
        }
        _ => format_label(f, p),
    }
}

pub fn parse_path(f: &FeatureType, v: &Value) -> Result<Label> {
    let p = parse_label(f, v)?;
    if !f.is_concrete(&p) {
        return parse_err(format!("path {v} is not concrete in feature '{}'", f.name()));
    }
    Ok(p)
}
