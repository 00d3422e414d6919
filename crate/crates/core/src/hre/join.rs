//! Generalizing join of two HREs by monotone alignment.
//!
//! The two inputs are walked left to right. At every step the output has one
//! still-open element (`last`). Three moves are possible:
//!
//! * open a new element from the next element of both sides (closing `last`),
//! * absorb the next element of the left side into `last`, making it a plus,
//! * the same for the right side.
//!
//! Each move keeps the output above both inputs: absorbed elements are matched
//! by a plus element whose label dominates them. The objective is the HRE cost,
//! a geometric mean, so the table keeps the best log-cost sum for every output
//! length separately.

use std::collections::BTreeMap;
use std::rc::Rc;
use std::sync::Arc;

use super::{node, HreFeature};
use crate::label::{HreElement, Label, NodeId};

/// Closed output elements, newest first.
struct Closed {
    elem: HreElement,
    prev: Option<Rc<Closed>>,
}

#[derive(Clone)]
struct Entry {
    sum_log: f64,
    closed: Option<Rc<Closed>>,
}

/// (open label, open plus flag, output length so far)
type Key = (NodeId, bool, usize);

const EPS: f64 = 1e-9;

pub(super) fn join(f: &HreFeature, a: &[HreElement], b: &[HreElement]) -> Arc<[HreElement]> {
    let dag = f.dag();
    let (n1, n2) = (a.len(), b.len());
    debug_assert!(n1 > 0 && n2 > 0);
    let log_cost = |n: NodeId| (dag.card(n) as f64).ln();
    let cell = |i: usize, j: usize| i * (n2 + 1) + j;

    let mut table: Vec<BTreeMap<Key, Entry>> = vec![BTreeMap::new(); (n1 + 1) * (n2 + 1)];
    let first = dag.join(node(&a[0].label), node(&b[0].label));
    table[cell(1, 1)].insert(
        (first, a[0].plus || b[0].plus, 1),
        Entry {
            sum_log: 0.0,
            closed: None,
        },
    );

    for i in 1..=n1 {
        for j in 1..=n2 {
            let entries = std::mem::take(&mut table[cell(i, j)]);
            if i == n1 && j == n2 {
                table[cell(i, j)] = entries;
                continue;
            }
            for (&(last, plus, len), e) in &entries {
                if i < n1 && j < n2 {
                    let closed = Some(Rc::new(Closed {
                        elem: HreElement::new(Label::Node(last), plus),
                        prev: e.closed.clone(),
                    }));
                    let open = dag.join(node(&a[i].label), node(&b[j].label));
                    relax(
                        &mut table[cell(i + 1, j + 1)],
                        (open, a[i].plus || b[j].plus, len + 1),
                        Entry {
                            sum_log: e.sum_log + log_cost(last),
                            closed,
                        },
                    );
                }
                if i < n1 {
                    let merged = dag.join(last, node(&a[i].label));
                    relax(&mut table[cell(i + 1, j)], (merged, true, len), e.clone());
                }
                if j < n2 {
                    let merged = dag.join(last, node(&b[j].label));
                    relax(&mut table[cell(i, j + 1)], (merged, true, len), e.clone());
                }
            }
            table[cell(i, j)] = entries;
        }
    }

    let mut best: Option<(f64, Vec<HreElement>)> = None;
    for (&(last, plus, len), e) in &table[cell(n1, n2)] {
        let ratio = (e.sum_log + log_cost(last)) / len as f64;
        let mut elems = unwind(&e.closed);
        elems.push(HreElement::new(Label::Node(last), plus));
        let better = match &best {
            None => true,
            Some((r, cur)) => {
                if ratio < r - EPS {
                    true
                } else if ratio > r + EPS {
                    false
                } else {
                    prefer(&elems, cur)
                }
            }
        };
        if better {
            best = Some((ratio, elems));
        }
    }
    let (_, elems) = best.expect("the all-absorb alignment always reaches the final cell");
    canonicalize(elems).into()
}

/// Tie-break between equal-cost candidates: more elements, then fewer plus
/// elements, then lexicographic order.
fn prefer(cand: &[HreElement], cur: &[HreElement]) -> bool {
    let plus = |e: &[HreElement]| e.iter().filter(|x| x.plus).count();
    cand.len()
        .cmp(&cur.len())
        .reverse()
        .then_with(|| plus(cand).cmp(&plus(cur)))
        .then_with(|| cand.cmp(cur))
        .is_lt()
}

fn relax(cell: &mut BTreeMap<Key, Entry>, key: Key, e: Entry) {
    match cell.get(&key) {
        Some(cur) if cur.sum_log <= e.sum_log + EPS => {}
        _ => {
            cell.insert(key, e);
        }
    }
}

fn unwind(closed: &Option<Rc<Closed>>) -> Vec<HreElement> {
    let mut out = Vec::new();
    let mut cur = closed.as_ref();
    while let Some(c) = cur {
        out.push(c.elem.clone());
        cur = c.prev.as_ref();
    }
    out.reverse();
    out
}

/// Collapses runs of identical plus elements (`X+.X+` → `X+`).
fn canonicalize(elems: Vec<HreElement>) -> Vec<HreElement> {
    let mut out: Vec<HreElement> = Vec::with_capacity(elems.len());
    for e in elems {
        if let Some(prev) = out.last() {
            if prev.plus && e.plus && prev.label == e.label {
                continue;
            }
        }
        out.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::tests::{isp, parse};

    fn render(f: &crate::FeatureType, h: &[crate::HreElement]) -> String {
        let dag = f.as_hre().unwrap().base().as_dag().unwrap();
        h.iter()
            .map(|e| {
                let n = dag.name(super::node(&e.label)).to_string();
                if e.plus {
                    n + "+"
                } else {
                    n
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }

    #[test]
    fn isp_paths_generalize_to_internal_plus() {
        let f = isp();
        let h = f.as_hre().unwrap();
        let a = parse(&f, "AS1.R1.R2.R5.AS2");
        let b = parse(&f, "AS1.R1.R3.R4.R5.AS2");
        let j = h.join(&a, &b);
        assert_eq!(render(&f, &j), "AS1.R1.Internal+.R5.AS2");
        assert_eq!(render(&f, &h.join(&b, &a)), "AS1.R1.Internal+.R5.AS2");
        assert!(h.accepts(&j, &a) && h.accepts(&j, &b));
    }

    #[test]
    fn idempotent_on_repeated_labels() {
        let f = isp();
        let h = f.as_hre().unwrap();
        for s in ["R1.R1", "AS1.Internal+.AS2", "R2", "Any+"] {
            let x = parse(&f, s);
            assert_eq!(render(&f, &h.join(&x, &x)), s);
        }
    }

    #[test]
    fn single_differing_position() {
        let f = isp();
        let h = f.as_hre().unwrap();
        let j = h.join(&parse(&f, "AS1.R1.AS2"), &parse(&f, "AS1.R4.AS2"));
        assert_eq!(render(&f, &j), "AS1.Internal.AS2");
    }
}
