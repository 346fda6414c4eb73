//! Deterministic artifacts of an analysis: the JSON report, the integral
//! text and the proximity graphs in DOT and plain text.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::algebra::{interval, Fe, SymbolKind, Tower};
use crate::darboux::Analysis;
use crate::reduction::{divisor_ratio, linear_part, Stage};

const APPROX_DIGITS: usize = 20;

fn exact(e: &Fe) -> Value {
    json!({ "exact": e.to_string(), "approx": interval::approx_string(e, APPROX_DIGITS) })
}

/// Labeled proximity graph of the final configuration: tree edges join a
/// point to its parent, and each point `P` gets one dotted edge to the last
/// non-child point proximate to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProximityGraph {
    /// Labels `1..=n` in display order.
    pub n: usize,
    pub tree: Vec<(usize, usize)>,
    pub dotted: Vec<(usize, usize)>,
    pub maximal: Vec<usize>,
}

impl ProximityGraph {
    pub fn from_analysis(a: &Analysis) -> ProximityGraph {
        let labels: BTreeMap<usize, usize> = a.numbering.iter().enumerate().map(|(k, &p)| (p, k + 1)).collect();
        let config = &a.reduction.config;
        let mut tree = Vec::new();
        let mut dotted = Vec::new();
        for (&id, &l) in &labels {
            if let Some(parent) = config.get(id).parent {
                if let Some(&pl) = labels.get(&parent) {
                    tree.push((pl, l));
                }
            }
        }
        for (&id, &l) in &labels {
            let last = labels
                .iter()
                .filter(|(&q, _)| config.get(q).parent != Some(id) && config.get(q).proximate_to.contains(&id))
                .map(|(_, &ql)| ql)
                .max();
            if let Some(ql) = last {
                dotted.push((l, ql));
            }
        }
        tree.sort_unstable();
        dotted.sort_unstable();
        let mut maximal: Vec<usize> = a.maximal.iter().filter_map(|m| labels.get(&m.id).copied()).collect();
        maximal.sort_unstable();
        ProximityGraph { n: labels.len(), tree, dotted, maximal }
    }

    /// Canonical text: tree edges, then dotted edges, then maximal points.
    pub fn signature(&self) -> String {
        let edges = |v: &[(usize, usize)]| v.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(",");
        let max = self.maximal.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        format!("n={};tree={};dotted={};maximal={}", self.n, edges(&self.tree), edges(&self.dotted), max)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n  node [shape=circle];\n");
        for l in 1..=self.n {
            if self.maximal.contains(&l) {
                s.push_str(&format!("  P{l} [shape=doublecircle];\n"));
            } else {
                s.push_str(&format!("  P{l};\n"));
            }
        }
        for (a, b) in &self.tree {
            s.push_str(&format!("  P{a} -- P{b};\n"));
        }
        for (a, b) in &self.dotted {
            s.push_str(&format!("  P{a} -- P{b} [style=dotted];\n"));
        }
        s.push_str("}\n");
        s
    }

    /// Indented tree, dotted edges listed after each point.
    pub fn to_ascii(&self) -> String {
        let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut has_parent = vec![false; self.n + 1];
        for &(a, b) in &self.tree {
            children.entry(a).or_default().push(b);
            has_parent[b] = true;
        }
        let mut out = String::new();
        fn walk(
            g: &ProximityGraph,
            children: &BTreeMap<usize, Vec<usize>>,
            l: usize,
            depth: usize,
            out: &mut String,
        ) {
            let dots: Vec<String> =
                g.dotted.iter().filter(|(a, _)| *a == l).map(|(_, b)| format!("P{b}")).collect();
            let mark = if g.maximal.contains(&l) { " *" } else { "" };
            let extra = if dots.is_empty() { String::new() } else { format!("  ..{}", dots.join(",")) };
            out.push_str(&format!("{}P{l}{mark}{extra}\n", "  ".repeat(depth)));
            for &c in children.get(&l).map(Vec::as_slice).unwrap_or(&[]) {
                walk(g, children, c, depth + 1, out);
            }
        }
        for (l, _) in has_parent.iter().enumerate().skip(1).filter(|(_, &p)| !p) {
            walk(self, &children, l, 0, &mut out);
        }
        out
    }
}

fn constants(tower: &Tower, approximations: &[String]) -> Value {
    let items: Vec<Value> = tower
        .symbols()
        .iter()
        .zip(approximations)
        .map(|(s, approx)| match s.kind() {
            SymbolKind::Transcendental => json!({ "name": s.name(), "kind": "transcendental", "approx": approx }),
            SymbolKind::Algebraic { minpoly } => json!({
                "name": s.name(),
                "kind": "algebraic",
                "minpoly": minpoly.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "approx": approx,
            }),
        })
        .collect();
    Value::Array(items)
}

fn points(a: &Analysis) -> Value {
    let labels: BTreeMap<usize, usize> = a.numbering.iter().enumerate().map(|(k, &p)| (p, k + 1)).collect();
    let config = &a.reduction.config;
    let items: Vec<Value> = config
        .points
        .iter()
        .map(|p| {
            let rec = &a.reduction.records[p.id];
            let m = linear_part(&rec.form);
            let trace = &m[0][0] + &m[1][1];
            let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
            json!({
                "id": p.id,
                "label": labels.get(&p.id).map(|l| format!("P{l}")),
                "parent": p.parent,
                "root": a.reduction.roots[p.root].label(),
                "direction": p.direction.as_ref().map(|d| d.to_string()),
                "proximate_to": p.proximate_to.iter().collect::<Vec<_>>(),
                "on_line_at_infinity": p.on_line,
                "class": rec.class.label(),
                "stage": match rec.stage { Stage::Resolved => "resolved", Stage::Frontier => "frontier", Stage::Extension => "extension" },
                "multiplicity": rec.multiplicity(),
                "dicritical": rec.is_dicritical(),
                "trace": trace.to_string(),
                "det": det.to_string(),
                "divisor_ratio": divisor_ratio(&rec.form).map(|r| exact(&r)),
            })
        })
        .collect();
    Value::Array(items)
}

fn label_list(a: &Analysis, ids: impl Iterator<Item = usize>) -> Vec<String> {
    let mut ls: Vec<usize> = ids.filter_map(|p| a.label(p)).collect();
    ls.sort_unstable();
    ls.into_iter().map(|l| format!("P{l}")).collect()
}

/// The full JSON report. `input` is the canonical rendering of the input.
pub fn report_json(a: &Analysis, input: &str, tower: &Tower, approximations: &[String]) -> Value {
    let (p, q) = a.system.render();
    let graph = ProximityGraph::from_analysis(a);
    let maximal: Vec<Value> = a
        .maximal
        .iter()
        .map(|m| {
            json!({
                "label": a.label(m.id).map(|l| format!("P{l}")),
                "chain": label_list(a, m.cluster.points.iter().copied()),
                "multiplicities": m.cluster.m,
                "d": m.d,
                "I": m.i,
                "dimension": m.dimension,
                "curve": m.curve.as_ref().map(|c| c.render(&["X", "Y", "Z"])),
            })
        })
        .collect();
    let integral = a.integral.as_ref().map(|i| {
        json!({
            "text": i.render(),
            "curves": i.curves.iter().map(|c| c.render(&["x", "y"])).collect::<Vec<_>>(),
            "cofactors": i.cofactors.iter().map(|c| c.render(&["x", "y"])).collect::<Vec<_>>(),
            "ray": i.ray.iter().map(exact).collect::<Vec<_>>(),
            "display_ray": i.display.iter().map(exact).collect::<Vec<_>>(),
            "positive": i.positive,
            "verified": i.verified,
        })
    });
    let extended = a.extended.as_ref().map(|e| {
        json!({
            "rho": e.rho,
            "delta": e.delta.iter().map(exact).collect::<Vec<_>>(),
            "irrational_ratios": e.irrational_ratios,
            "chains": e.chains.iter().map(|c| json!({
                "at": a.label(c.s_id).map(|l| format!("P{l}")),
                "ratio": exact(&c.ratio),
                "local_ratio": c.local_ratio.as_ref().map(exact),
                "agrees": c.local_ratio.as_ref() == Some(&c.ratio),
                "rational": c.rational,
                "cf": c.cf.as_ref().map(|cf| json!({
                    "digits": cf.digits.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                    "terminated": cf.terminated,
                    "precision_limited": cf.precision_limited,
                })),
                "prox": c.prox.as_ref().map(|p| p.proximate_to.clone()),
            })).collect::<Vec<_>>(),
        })
    });
    json!({
        "input": input,
        "constants": constants(tower, approximations),
        "system": { "dx": p, "dy": q, "degree": a.system.degree },
        "points_at_infinity": a.reduction.roots.iter().map(|r| json!({ "point": r.label(), "multiplicity": r.multiplicity })).collect::<Vec<_>>(),
        "points": points(a),
        "omega_prime": label_list(a, a.omega_prime.iter().copied()),
        "omega": label_list(a, a.omega.iter().copied()),
        "proximity_graph": graph.signature(),
        "maximal_points": maximal,
        "curves": a.curves.iter().map(|c| c.render(&["x", "y"])).collect::<Vec<_>>(),
        "integral": integral,
        "extended": extended,
        "dpwai": a.is_dpwai(),
        "outcome": match &a.zero {
            Some(z) => json!({ "result": "zero", "stage": z.stage, "reason": z.reason }),
            None => json!({ "result": "integral" }),
        },
    })
}

/// Text of `integral.txt`: the integral and a status line.
pub fn integral_text(a: &Analysis) -> String {
    match (&a.integral, &a.zero) {
        (Some(i), _) => {
            let status = if a.is_dpwai() {
                "DPWAI first integral"
            } else if i.verified {
                "Darboux integral, not DPWAI-certified"
            } else {
                "unverified"
            };
            format!("{}\n{}\n", i.render(), status)
        }
        (None, Some(z)) => format!("0\n{}\n", z.reason),
        (None, None) => "0\n".to_string(),
    }
}

/// Writes `report.json`, `integral.txt`, `omega.dot` and `chains/*.dot`.
pub fn write_artifacts(dir: &Path, a: &Analysis, input: &str, tower: &Tower, approximations: &[String]) -> std::io::Result<()> {
    fs::create_dir_all(dir.join("chains"))?;
    let report = report_json(a, input, tower, approximations);
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    fs::write(dir.join("integral.txt"), integral_text(a))?;
    fs::write(dir.join("omega.dot"), ProximityGraph::from_analysis(a).to_dot("omega"))?;
    if let Some(e) = &a.extended {
        for c in &e.chains {
            if let (Some(p), Some(l)) = (&c.prox, a.label(c.s_id)) {
                fs::write(dir.join("chains").join(format!("P{l}.dot")), p.to_dot(&format!("P{l}")))?;
            }
        }
    }
    Ok(())
}
