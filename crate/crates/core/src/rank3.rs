//! Rank-3 shapes and the four mutation cases.
//!
//! A connected quiver on three vertices is either acyclic, written `Q_rst`
//! with arrows `1->2` (r), `2->3` (s), `1->3` (t), or an oriented 3-cycle
//! `1->2` (r), `2->3` (s), `3->1` (t). Roles 1..3 are mapped to concrete
//! vertices by `vertex_map`.
//!
//! Role conventions:
//! - cyclic shapes use the rotation with lexicographically smallest `(r, s, t)`;
//! - acyclic shapes use a topological order (source first, sink last). When a
//!   pair of vertices has no arrows the order is not unique, and the smallest
//!   `(r, s, t)` is taken, so `r` or `s` may be 0 there.
//!
//! Ties are broken by the smallest `vertex_map`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::Rank3Error;
use crate::format::big_to_json;
use crate::quiver::Quiver;

pub const CAVEAT_ACYCLIC_CLASS_UNVERIFIED: &str = "acyclic_class_unverified";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Acyclic,
    Cyclic,
}

impl ShapeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Acyclic => "Acyclic",
            ShapeKind::Cyclic => "Cyclic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rank3Shape {
    pub kind: ShapeKind,
    pub r: BigInt,
    pub s: BigInt,
    pub t: BigInt,
    /// `vertex_map[role - 1]` is the 0-based vertex playing that role.
    pub vertex_map: [usize; 3],
}

impl fmt::Display for Rank3Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.vertex_map.map(|v| v + 1);
        write!(f, "{}({}, {}, {}) roles [{a}, {b}, {c}]", self.kind.as_str(), self.r, self.s, self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    I,
    II,
    III,
    IV,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::III => "III",
            CaseTag::IV => "IV",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationCase {
    pub tag: CaseTag,
    pub predicted: Rank3Shape,
}

impl Rank3Shape {
    /// Arrows in concrete vertices, zero multiplicities included.
    fn role_arrows(&self) -> [(usize, usize, BigInt); 3] {
        let [a, b, c] = self.vertex_map;
        let third = match self.kind {
            ShapeKind::Acyclic => (a, c, self.t.clone()),
            ShapeKind::Cyclic => (c, a, self.t.clone()),
        };
        [(a, b, self.r.clone()), (b, c, self.s.clone()), third]
    }

    pub fn to_quiver(&self) -> Quiver {
        let arrows = self.role_arrows().into_iter().filter(|(_, _, m)| !m.is_zero());
        Quiver::new(3, arrows).expect("shape arrows form a valid quiver")
    }

    /// Role (1..=3) played by the 0-based vertex `v`.
    pub fn role_of(&self, v: usize) -> Option<usize> {
        self.vertex_map.iter().position(|&x| x == v).map(|p| p + 1)
    }

    /// Arrow count between the vertices playing roles `i` and `j`, ignoring
    /// orientation.
    pub fn pair_multiplicity(&self, i: usize, j: usize) -> BigInt {
        let (u, v) = (self.vertex_map[i - 1], self.vertex_map[j - 1]);
        self.role_arrows()
            .into_iter()
            .find(|(a, b, _)| (*a, *b) == (u, v) || (*a, *b) == (v, u))
            .map(|(_, _, m)| m)
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "r": big_to_json(&self.r),
            "s": big_to_json(&self.s),
            "t": big_to_json(&self.t),
        })
    }
}

const ROTATIONS: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub fn shape(q: &Quiver) -> Result<Rank3Shape, Rank3Error> {
    if q.n() != 3 {
        return Err(Rank3Error::WrongRank(q.n()));
    }
    if !q.is_connected() {
        return Err(Rank3Error::NotConnected);
    }
    let m = |i: usize, j: usize| q.multiplicity(i, j);
    let mut best: Option<Rank3Shape> = None;
    let mut offer = |cand: Rank3Shape| {
        let better = best.as_ref().map_or(true, |b| {
            (&cand.r, &cand.s, &cand.t, cand.vertex_map) < (&b.r, &b.s, &b.t, b.vertex_map)
        });
        if better {
            best = Some(cand);
        }
    };
    if q.is_acyclic() {
        for [a, b, c] in ORDERS {
            // Every arrow must point forward in the order.
            if [(b, a), (c, b), (c, a)].iter().any(|&(i, j)| m(i, j).is_positive()) {
                continue;
            }
            offer(Rank3Shape {
                kind: ShapeKind::Acyclic,
                r: m(a, b),
                s: m(b, c),
                t: m(a, c),
                vertex_map: [a, b, c],
            });
        }
    } else {
        for [a, b, c] in ROTATIONS.iter().flat_map(|r| [*r, [r[0], r[2], r[1]]]) {
            let (r, s, t) = (m(a, b), m(b, c), m(c, a));
            if r.is_positive() && s.is_positive() && t.is_positive() {
                offer(Rank3Shape { kind: ShapeKind::Cyclic, r, s, t, vertex_map: [a, b, c] });
            }
        }
    }
    best.ok_or(Rank3Error::UnclassifiableShape)
}

/// Predicted case and shape for mutation at role `k` (1..=3), checked against
/// direct mutation of the quiver.
pub fn classify_mutation(sh: &Rank3Shape, k: usize) -> Result<MutationCase, Rank3Error> {
    if !(1..=3).contains(&k) {
        return Err(Rank3Error::BadRole(k));
    }
    let v = sh.vertex_map[k - 1];
    let q = sh.to_quiver();
    let into: Vec<(usize, BigInt)> =
        (0..3).map(|u| (u, q.multiplicity(u, v))).filter(|(_, m)| m.is_positive()).collect();
    let out: Vec<(usize, BigInt)> =
        (0..3).map(|u| (u, q.multiplicity(v, u))).filter(|(_, m)| m.is_positive()).collect();
    let (tag, arrows) = match (&into[..], &out[..]) {
        // Source or sink: only the arrows at k turn around.
        ([], _) | (_, []) => {
            let arrows = q
                .arrows()
                .map(|(i, j, m)| if i == v || j == v { (j, i, m.clone()) } else { (i, j, m.clone()) })
                .collect::<Vec<_>>();
            (CaseTag::I, arrows)
        }
        ([(p, a)], [(w, b)]) => {
            let (p, w) = (*p, *w);
            // Net arrows w -> p; the path p -> v -> w adds a*b arrows p -> w.
            let c = q.multiplicity(w, p) - q.multiplicity(p, w);
            let rest = a * b - &c;
            let mut arrows = vec![(v, p, a.clone()), (w, v, b.clone())];
            if rest.is_positive() {
                arrows.push((p, w, rest));
            } else if rest.is_negative() {
                arrows.push((w, p, -rest));
            }
            let tag = match sh.kind {
                ShapeKind::Acyclic => CaseTag::II,
                ShapeKind::Cyclic if c >= a * b => CaseTag::III,
                ShapeKind::Cyclic => CaseTag::IV,
            };
            (tag, arrows)
        }
        _ => return Err(Rank3Error::UnclassifiableShape),
    };
    let predicted = shape(&Quiver::new(3, arrows)?)?;
    let actual = shape(&q.mutate(v)?)?;
    if predicted != actual {
        return Err(Rank3Error::InternalPredictionMismatch {
            predicted: predicted.to_string(),
            actual: actual.to_string(),
        });
    }
    Ok(MutationCase { tag, predicted })
}

/// Whether mutation at role `k` of a cyclic shape yields an acyclic quiver.
pub fn zero_vertex_at(sh: &Rank3Shape, k: usize) -> Result<bool, Rank3Error> {
    if sh.kind != ShapeKind::Cyclic {
        return Err(Rank3Error::NotCyclic);
    }
    Ok(classify_mutation(sh, k)?.tag == CaseTag::III)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexReport {
    /// 0-based vertex of the analyzed quiver.
    pub vertex: usize,
    pub case: MutationCase,
    pub zero_vertex: Option<bool>,
    pub caveats: Vec<&'static str>,
}

impl VertexReport {
    pub fn to_json(&self) -> Value {
        json!({
            "vertex": self.vertex + 1,
            "case": self.case.tag.as_str(),
            "predicted": self.case.predicted.to_json(),
            "zero_vertex": self.zero_vertex,
            "caveat": self.caveats,
        })
    }
}

/// One report per vertex, in vertex order. `acyclic_class_known` states that
/// the caller has a mutation sequence linking the quiver to an acyclic one;
/// acyclic quivers need no witness.
pub fn report(q: &Quiver, acyclic_class_known: bool) -> Result<Vec<VertexReport>, Rank3Error> {
    let sh = shape(q)?;
    let cyclic = sh.kind == ShapeKind::Cyclic;
    let caveats = if cyclic && !acyclic_class_known {
        vec![CAVEAT_ACYCLIC_CLASS_UNVERIFIED]
    } else {
        Vec::new()
    };
    (0..3)
        .map(|vertex| {
            let role = sh.role_of(vertex).expect("vertex_map is a bijection");
            let case = classify_mutation(&sh, role)?;
            let zero_vertex = cyclic.then_some(case.tag == CaseTag::III);
            Ok(VertexReport { vertex, case, zero_vertex, caveats: caveats.clone() })
        })
        .collect()
}

pub fn report_json(reports: &[VertexReport]) -> Value {
    Value::Array(reports.iter().map(VertexReport::to_json).collect())
}
