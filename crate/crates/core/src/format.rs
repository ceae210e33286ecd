//! Text, JSON and DOT formats. Vertex and variable indices are 1-based in
//! every format.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Map, Value};

use crate::error::{FormatError, QuiverError};
use crate::explorer::{EnumerationResult, ExchangeGraph};
use crate::laurent::{parse, LaurentPolynomial, Monomial};
use crate::matrix::ExchangeMatrix;
use crate::quiver::Quiver;
use crate::seed::Seed;

/// Integer as a JSON number of any size.
pub fn big_to_json(v: &BigInt) -> Value {
    Value::Number(serde_json::Number::from_str(&v.to_string()).expect("integer literal"))
}

/// Accepts JSON integers of any size and decimal strings.
pub fn big_from_json(v: &Value) -> Result<BigInt, FormatError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(FormatError::Json(format!("expected an integer, found {other}"))),
    };
    BigInt::from_str(text.trim()).map_err(|_| FormatError::Json(format!("not an integer: {text}")))
}

fn parse_json(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, FormatError> {
    v.get(name).ok_or_else(|| FormatError::Json(format!("missing field \"{name}\"")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array().ok_or_else(|| FormatError::Json(format!("{what} must be an array")))
}

fn vertex_index(v: &BigInt, n: usize) -> Result<usize, FormatError> {
    match usize::try_from(v) {
        Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
        Ok(i) => Err(QuiverError::IndexOutOfRange { index: i, n }.into()),
        Err(_) => Err(FormatError::Json(format!("not a vertex index: {v}"))),
    }
}

// ---- quivers

/// Reads the line format: `n <count>`, then `<i> <j> <m>` per arrow group.
pub fn quiver_from_text(text: &str) -> Result<Quiver, FormatError> {
    let syntax = |line: usize, message: &str| FormatError::Syntax { line, message: message.to_string() };
    let mut n: Option<usize> = None;
    let mut arrows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        match n {
            None => match words[..] {
                ["n", count] => {
                    n = Some(count.parse().map_err(|_| syntax(line, "vertex count is not a number"))?);
                }
                _ => return Err(syntax(line, "expected `n <count>`")),
            },
            Some(n) => {
                let [i, j, m] = words[..] else {
                    return Err(syntax(line, "expected `<i> <j> <m>`"));
                };
                let num = |w: &str| BigInt::from_str(w).map_err(|_| syntax(line, "not an integer"));
                let (i, j, m) = (num(i)?, num(j)?, num(m)?);
                arrows.push((vertex_index(&i, n)?, vertex_index(&j, n)?, m));
            }
        }
    }
    let n = n.ok_or_else(|| syntax(1, "missing `n <count>` line"))?;
    Ok(Quiver::new(n, arrows)?)
}

pub fn quiver_to_text(q: &Quiver) -> String {
    let mut out = format!("n {}\n", q.n());
    for (i, j, m) in q.arrows() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, m);
    }
    out
}

pub fn quiver_to_json(q: &Quiver) -> Value {
    let arrows: Vec<Value> =
        q.arrows().map(|(i, j, m)| json!([i + 1, j + 1, big_to_json(m)])).collect();
    json!({ "n": q.n(), "arrows": arrows })
}

pub fn quiver_from_json_value(v: &Value) -> Result<Quiver, FormatError> {
    let n = field(v, "n")?
        .as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| FormatError::Json("\"n\" must be a nonnegative integer".into()))?;
    let mut arrows = Vec::new();
    for a in array(field(v, "arrows")?, "\"arrows\"")? {
        let parts = array(a, "an arrow")?;
        let [i, j, m] = &parts[..] else {
            return Err(FormatError::Json("an arrow is [i, j, m]".into()));
        };
        arrows.push((
            vertex_index(&big_from_json(i)?, n)?,
            vertex_index(&big_from_json(j)?, n)?,
            big_from_json(m)?,
        ));
    }
    Ok(Quiver::new(n, arrows)?)
}

pub fn quiver_from_json(text: &str) -> Result<Quiver, FormatError> {
    quiver_from_json_value(&parse_json(text)?)
}

/// Accepts either the JSON or the line format.
pub fn quiver_from_str(text: &str) -> Result<Quiver, FormatError> {
    if text.trim_start().starts_with('{') {
        quiver_from_json(text)
    } else {
        quiver_from_text(text)
    }
}

pub fn quiver_to_dot(q: &Quiver) -> String {
    let mut out = String::from("digraph quiver {\n");
    for v in 1..=q.n() {
        let _ = writeln!(out, "  {v};");
    }
    for (i, j, m) in q.arrows() {
        if *m > BigInt::from(1) {
            let _ = writeln!(out, "  {} -> {} [label={m}];", i + 1, j + 1);
        } else {
            let _ = writeln!(out, "  {} -> {};", i + 1, j + 1);
        }
    }
    out.push_str("}\n");
    out
}

// ---- matrices

pub fn matrix_to_json(b: &ExchangeMatrix) -> Value {
    let rows: Vec<Value> =
        b.rows().map(|row| Value::Array(row.iter().map(big_to_json).collect())).collect();
    json!({ "b": rows })
}

pub fn matrix_from_json_value(v: &Value) -> Result<ExchangeMatrix, FormatError> {
    let rows = array(field(v, "b")?, "\"b\"")?
        .iter()
        .map(|row| array(row, "a matrix row")?.iter().map(big_from_json).collect())
        .collect::<Result<Vec<Vec<BigInt>>, FormatError>>()?;
    Ok(ExchangeMatrix::from_rows(rows)?)
}

pub fn matrix_from_json(text: &str) -> Result<ExchangeMatrix, FormatError> {
    matrix_from_json_value(&parse_json(text)?)
}

// ---- Laurent polynomials

/// `{"terms": [[[e1, ..., en], "coef"], ...]}` in descending graded-lex order.
pub fn laurent_to_json(p: &LaurentPolynomial) -> Value {
    let terms: Vec<Value> =
        p.sorted_terms().into_iter().map(|(m, c)| json!([m.exponents(), c.to_string()])).collect();
    json!({ "terms": terms })
}

pub fn laurent_from_json_value(nvars: usize, v: &Value) -> Result<LaurentPolynomial, FormatError> {
    let mut terms = Vec::new();
    for t in array(field(v, "terms")?, "\"terms\"")? {
        let parts = array(t, "a term")?;
        let [exps, coef] = &parts[..] else {
            return Err(FormatError::Json("a term is [exponents, coefficient]".into()));
        };
        let exps = array(exps, "exponents")?
            .iter()
            .map(|e| {
                e.as_i64()
                    .and_then(|e| i32::try_from(e).ok())
                    .ok_or_else(|| FormatError::Json(format!("bad exponent {e}")))
            })
            .collect::<Result<Vec<i32>, _>>()?;
        terms.push((Monomial::new(exps), big_from_json(coef)?));
    }
    Ok(LaurentPolynomial::from_terms(nvars, terms)?)
}

// ---- seeds

pub fn seed_to_json(s: &Seed) -> Value {
    json!({ "matrix": matrix_to_json(s.matrix()), "cluster": s.renderings() })
}

/// Pretty-printed seed JSON with sorted keys and a trailing newline.
pub fn seed_to_string(s: &Seed) -> String {
    let mut out = serde_json::to_string_pretty(&seed_to_json(s)).expect("JSON values serialize");
    out.push('\n');
    out
}

pub fn seed_from_json_value(v: &Value) -> Result<Seed, FormatError> {
    let matrix = matrix_from_json_value(field(v, "matrix")?)?;
    let n = matrix.n();
    let cluster = array(field(v, "cluster")?, "\"cluster\"")?
        .iter()
        .map(|x| {
            let text = x.as_str().ok_or_else(|| FormatError::Json("cluster entries are strings".into()))?;
            Ok(parse(n, text)?)
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(Seed::new(cluster, matrix)?)
}

pub fn seed_from_json(text: &str) -> Result<Seed, FormatError> {
    seed_from_json_value(&parse_json(text)?)
}

/// Space-separated 1-based vertices, e.g. `"2 1 3"`, as 0-based indices.
pub fn parse_sequence(text: &str, n: usize) -> Result<Vec<usize>, FormatError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .map(|w| {
            let v = BigInt::from_str(w).map_err(|_| FormatError::Syntax {
                line: 1,
                message: format!("not a vertex index: {w}"),
            })?;
            vertex_index(&v, n)
        })
        .collect()
}

pub fn sequence_to_string(seq: &[usize]) -> String {
    seq.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(" ")
}

// ---- exchange graphs

pub fn graph_to_json(result: &EnumerationResult) -> Value {
    let g = &result.graph;
    let nodes: Vec<Value> = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, node)| {
            json!({
                "id": id,
                "cluster": node.seed.renderings(),
                "matrix": matrix_to_json(node.seed.matrix()),
                "witness": node.witness.iter().map(|k| k + 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .into_iter()
        .map(|(from, d, to)| json!({ "from": from, "to": to, "direction": d + 1 }))
        .collect();
    let spill: Vec<Value> = result
        .spill
        .iter()
        .map(|s| json!({ "from": s.from, "direction": s.direction + 1, "reason": s.reason.as_str() }))
        .collect();
    let mut out = Map::new();
    out.insert("rank".into(), json!(g.rank()));
    out.insert("nodes".into(), Value::Array(nodes));
    out.insert("edges".into(), Value::Array(edges));
    out.insert("spill".into(), Value::Array(spill));
    out.insert("diagnostics".into(), json!(result.diagnostics));
    out.insert("stats".into(), result.stats_json());
    Value::Object(out)
}

/// Nodes labeled by their cluster, edges by direction. Each undirected edge
/// is written once, from the endpoint discovered first.
pub fn graph_to_dot(g: &ExchangeGraph) -> String {
    let mut out = String::from("graph exchange {\n");
    for (id, node) in g.nodes().iter().enumerate() {
        let label = node.seed.renderings().join(", ").replace('"', "\\\"");
        let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
    }
    for (from, d, to) in g.edges() {
        if from <= to {
            let _ = writeln!(out, "  n{from} -- n{to} [label={}];", d + 1);
        }
    }
    out.push_str("}\n");
    out
}

/// Parses the body of a `--max-entry` style bound.
pub fn positive_integer(text: &str) -> Result<BigInt, FormatError> {
    let text = text.trim();
    let v = if let Some(exp) = text.strip_prefix("2^") {
        let e: u32 = exp.parse().map_err(|_| FormatError::Syntax { line: 1, message: format!("bad exponent in {text}") })?;
        BigInt::from(1) << e
    } else {
        BigInt::from_str(text).map_err(|_| FormatError::Syntax { line: 1, message: format!("not an integer: {text}") })?
    };
    if !v.is_positive() {
        return Err(FormatError::Syntax { line: 1, message: format!("must be positive: {text}") });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn quiver_text_round_trip() {
        let q = quiver_from_text("# A3\nn 3\n1 2 1\n2 3 2 # double\n\n").unwrap();
        assert_eq!(q, Quiver::from_u64_arrows(3, &[(0, 1, 1), (1, 2, 2)]).unwrap());
        assert_eq!(quiver_from_text(&quiver_to_text(&q)).unwrap(), q);
        assert_eq!(quiver_from_json(&quiver_to_json(&q).to_string()).unwrap(), q);
    }

    #[test]
    fn quiver_text_errors() {
        assert!(matches!(quiver_from_text("3\n"), Err(FormatError::Syntax { line: 1, .. })));
        assert!(matches!(quiver_from_text("n 2\n1 2\n"), Err(FormatError::Syntax { line: 2, .. })));
        assert!(matches!(
            quiver_from_text("n 2\n1 3 1\n"),
            Err(FormatError::Quiver(QuiverError::IndexOutOfRange { .. }))
        ));
        assert!(matches!(
            quiver_from_text("n 2\n1 1 1\n"),
            Err(FormatError::Quiver(QuiverError::LoopPresent { .. }))
        ));
    }

    #[test]
    fn dot_labels_only_multiple_arrows() {
        let q = Quiver::from_u64_arrows(3, &[(0, 1, 1), (1, 2, 3)]).unwrap();
        let dot = quiver_to_dot(&q);
        assert!(dot.contains("1 -> 2;"));
        assert!(dot.contains("2 -> 3 [label=3];"));
    }

    #[test]
    fn big_entries_survive_json() {
        let huge: BigInt = BigInt::from(3).pow(80);
        let b = ExchangeMatrix::from_rows(vec![
            vec![BigInt::zero(), huge.clone()],
            vec![-huge.clone(), BigInt::zero()],
        ])
        .unwrap();
        let text = matrix_to_json(&b).to_string();
        assert!(text.contains(&huge.to_string()));
        assert_eq!(matrix_from_json(&text).unwrap(), b);
    }

    #[test]
    fn seed_json_round_trip() {
        let b = ExchangeMatrix::from_i64_rows(&[[0, 1], [-1, 0]]).unwrap();
        let s = Seed::initial(b).mutate(0).unwrap();
        let text = seed_to_string(&s);
        assert_eq!(
            text,
            "{\n  \"cluster\": [\n    \"(x2 + 1)/x1\",\n    \"x2\"\n  ],\n  \"matrix\": {\n    \"b\": [\n      [\n        0,\n        -1\n      ],\n      [\n        1,\n        0\n      ]\n    ]\n  }\n}\n"
        );
        assert_eq!(seed_from_json(&text).unwrap().key(), s.key());
    }

    #[test]
    fn laurent_json_round_trip() {
        let p = parse(2, "(x1^2 + 3*x2 - 1)/(x1*x2)").unwrap();
        let v = laurent_to_json(&p);
        assert_eq!(v["terms"][0], json!([[1, -1], "1"]));
        assert_eq!(laurent_from_json_value(2, &v).unwrap(), p);
    }

    #[test]
    fn sequences() {
        assert_eq!(parse_sequence("2 1 3", 3).unwrap(), vec![1, 0, 2]);
        assert_eq!(parse_sequence("", 3).unwrap(), Vec::<usize>::new());
        assert!(parse_sequence("4", 3).is_err());
        assert!(parse_sequence("0", 3).is_err());
        assert!(parse_sequence("a", 3).is_err());
        assert_eq!(sequence_to_string(&[1, 0, 2]), "2 1 3");
    }

    #[test]
    fn limits_parse() {
        assert_eq!(positive_integer("2^32").unwrap(), BigInt::from(1u64 << 32));
        assert_eq!(positive_integer("17").unwrap(), BigInt::from(17));
        assert!(positive_integer("0").is_err());
        assert!(positive_integer("-3").is_err());
    }
}
