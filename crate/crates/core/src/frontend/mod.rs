//! C-subset front-end: parsing, loop inventory and trip-count knowledge.
//!
//! The front-end owns three jobs. `parse_source` turns C files into statement
//! trees, tolerating constructs outside the subset. `discover_loops` walks
//! the trees and emits one [`LoopInfo`] per `for`/`while`/`do-while`
//! statement, with an op/access profile of the body and a static trip count
//! where the header gives one. `apply_annotations` folds in
//! `// offload: trip=N` directives, which take precedence over header
//! constants. Loops can also arrive from any external analyzer through the
//! JSON inventory in [`inventory`].

pub mod ast;
pub mod inventory;
pub mod lexer;
pub mod parser;
pub(crate) mod profile;
pub mod render;

pub use ast::{Diagnostic, FunctionDecl, Loc, SourceUnit};
pub use parser::parse_source_strings;

use crate::error::FrontendError;
use profile::{collect_loops, fold_ops, profile_body, static_trip, LoopStmtRef};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoopKind {
    #[serde(rename = "for")]
    For,
    #[serde(rename = "while")]
    While,
    #[serde(rename = "do-while")]
    DoWhile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripSource {
    #[serde(rename = "static_const")]
    StaticConst,
    #[serde(rename = "annotation")]
    Annotation,
    #[serde(rename = "unknown")]
    Unknown,
}

/// How many times a loop is believed to run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripEstimate {
    pub source: TripSource,
    pub value: Option<u64>,
}

impl TripEstimate {
    pub fn unknown() -> Self {
        TripEstimate {
            source: TripSource::Unknown,
            value: None,
        }
    }

    pub fn static_const(value: u64) -> Self {
        TripEstimate {
            source: TripSource::StaticConst,
            value: Some(value),
        }
    }

    pub fn annotation(value: u64) -> Self {
        TripEstimate {
            source: TripSource::Annotation,
            value: Some(value),
        }
    }

    /// Trip value with the configured default standing in for unknowns.
    pub fn resolve(&self, default_trip: u64) -> u64 {
        self.value.unwrap_or(default_trip)
    }
}

/// One array referenced by a loop body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayRef {
    pub name: String,
    pub element_bytes: u32,
    pub extent_elements: Option<u64>,
}

/// Op and access profile of a single iteration of a loop body. Ops inside
/// nested loops are included, multiplied by the nested trip estimate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyProfile {
    pub ops_add: u64,
    pub ops_mul: u64,
    pub ops_div: u64,
    pub ops_other: u64,
    /// Count of distinct array-reference expressions in the body.
    pub access_exprs: u64,
    pub arrays: Vec<ArrayRef>,
    pub scalars_bytes: u64,
}

impl BodyProfile {
    pub fn total_ops(&self) -> u64 {
        self.ops_add
            .saturating_add(self.ops_mul)
            .saturating_add(self.ops_div)
            .saturating_add(self.ops_other)
    }
}

/// One discovered loop statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopInfo {
    pub id: u64,
    pub kind: LoopKind,
    pub location: Loc,
    pub parent_id: Option<u64>,
    pub depth: u32,
    pub body_profile: BodyProfile,
    pub trip: TripEstimate,
}

/// Read and parse C source files into one unit.
pub fn parse_source<P: AsRef<Path>>(paths: &[P]) -> Result<SourceUnit, FrontendError> {
    let mut files = Vec::new();
    for p in paths {
        let path = p.as_ref();
        if !path.exists() {
            return Err(FrontendError::FileNotFound(path.display().to_string()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| FrontendError::Io {
            path: path.display().to_string(),
            source,
        })?;
        files.push((path.display().to_string(), text));
    }
    parse_source_strings(&files)
}

/// Inventory every loop statement of the unit in source order. Trip counts
/// come from counted for-headers only; annotations are a separate pass.
pub fn discover_loops(unit: &SourceUnit) -> Vec<LoopInfo> {
    build_loops(unit, false).expect("discovery without annotations cannot fail")
}

/// Apply `// offload: trip=N` annotations to a discovered inventory.
/// Annotations override header constants; other loops keep their estimates.
pub fn apply_annotations(
    loops: &[LoopInfo],
    unit: &SourceUnit,
) -> Result<Vec<LoopInfo>, FrontendError> {
    let rebuilt = build_loops(unit, true)?;
    if rebuilt.len() != loops.len()
        || rebuilt
            .iter()
            .zip(loops)
            .any(|(a, b)| a.id != b.id || a.location != b.location)
    {
        return Err(FrontendError::Inventory(
            "loop list does not match the parsed unit".into(),
        ));
    }
    Ok(rebuilt)
}

fn build_loops(unit: &SourceUnit, with_annotations: bool) -> Result<Vec<LoopInfo>, FrontendError> {
    let nodes = collect_loops(unit);

    let mut trips: BTreeMap<u64, TripEstimate> = BTreeMap::new();
    for node in &nodes {
        let static_estimate = match node.stmt {
            LoopStmtRef::For(f) => static_trip(f).map(TripEstimate::static_const),
            _ => None,
        };
        let estimate = match (with_annotations, node.stmt.annotation()) {
            (true, Some(ann)) => {
                let value: u64 = ann.raw_value.parse().map_err(|_| FrontendError::Annotation {
                    file: ann.loc.file.clone(),
                    line: ann.loc.line,
                    message: format!("`{}` is not a positive integer", ann.raw_value),
                })?;
                if value == 0 {
                    return Err(FrontendError::Annotation {
                        file: ann.loc.file.clone(),
                        line: ann.loc.line,
                        message: "trip must be at least 1".into(),
                    });
                }
                TripEstimate::annotation(value)
            }
            _ => static_estimate.unwrap_or_else(TripEstimate::unknown),
        };
        trips.insert(node.id, estimate);
    }

    let raw: Vec<_> = nodes.iter().map(|n| profile_body(n.stmt.body())).collect();
    let fold_trips: BTreeMap<u64, u64> = trips
        .iter()
        .map(|(id, t)| (*id, t.value.unwrap_or(1)))
        .collect();
    let folded = fold_ops(&nodes, &raw, &fold_trips);

    let mut out = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        let func = &unit.functions[node.func];
        let mut arrays = Vec::new();
        let mut scalars_bytes = 0u64;
        for name in &raw[i].var_names {
            if raw[i].array_names.contains(name) {
                continue;
            }
            match unit.resolve_var(func, name) {
                Some(v) if v.is_array() => {} // array referenced without indexing
                Some(v) => scalars_bytes += u64::from(v.base.element_bytes()),
                None => scalars_bytes += 4, // undeclared externs default to 4 bytes
            }
        }
        for name in &raw[i].array_names {
            let (element_bytes, extent_elements) = match unit.resolve_var(func, name) {
                Some(v) => (v.base.element_bytes(), v.extent),
                None => (4, None),
            };
            arrays.push(ArrayRef {
                name: name.clone(),
                element_bytes,
                extent_elements,
            });
        }
        let (ops_add, ops_mul, ops_div, ops_other) = folded[i];
        out.push(LoopInfo {
            id: node.id,
            kind: match node.stmt {
                LoopStmtRef::For(_) => LoopKind::For,
                LoopStmtRef::While(_) => LoopKind::While,
                LoopStmtRef::DoWhile(_) => LoopKind::DoWhile,
            },
            location: node.stmt.loc().clone(),
            parent_id: node.parent,
            depth: node.depth,
            body_profile: BodyProfile {
                ops_add,
                ops_mul,
                ops_div,
                ops_other,
                access_exprs: raw[i].accesses.len() as u64,
                arrays,
                scalars_bytes,
            },
            trip: trips[&node.id].clone(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(src: &str) -> SourceUnit {
        parse_source_strings(&[("t.c".to_string(), src.to_string())]).unwrap()
    }

    #[test]
    fn doubly_nested_structure() {
        let u = unit(
            "float a[200];\nvoid f(){for(int i=0;i<10;i++){for(int j=0;j<20;j++){a[i]=a[i]+j;}}}",
        );
        let loops = discover_loops(&u);
        assert_eq!(loops.len(), 2);
        assert_eq!(loops[0].depth, 0);
        assert_eq!(loops[1].depth, 1);
        assert_eq!(loops[1].parent_id, Some(loops[0].id));
        assert_eq!(loops[0].trip, TripEstimate::static_const(10));
        assert_eq!(loops[1].trip, TripEstimate::static_const(20));
        // inner body: one add per iteration, folded into the outer profile
        assert_eq!(loops[1].body_profile.ops_add, 1);
        assert_eq!(loops[0].body_profile.ops_add, 20);
    }

    #[test]
    fn while_loop_is_unknown_trip() {
        let u = unit("void f(int x){while(x>0){x--;}}");
        let loops = discover_loops(&u);
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].kind, LoopKind::While);
        assert_eq!(loops[0].trip, TripEstimate::unknown());
    }

    #[test]
    fn annotation_overrides_static_const() {
        let u = unit("float a[512];\nvoid f(){\n// offload: trip=512\nfor(int i=0;i<256;i++){a[i]=0;}}");
        let loops = discover_loops(&u);
        assert_eq!(loops[0].trip, TripEstimate::static_const(256));
        let annotated = apply_annotations(&loops, &u).unwrap();
        assert_eq!(annotated[0].trip, TripEstimate::annotation(512));
    }

    #[test]
    fn zero_trip_annotation_is_rejected() {
        let u = unit("void f(int x){\n// offload: trip=0\nwhile(x>0){x--;}}");
        let loops = discover_loops(&u);
        let err = apply_annotations(&loops, &u).unwrap_err();
        assert!(matches!(err, FrontendError::Annotation { .. }));
    }

    #[test]
    fn annotation_on_unannotated_discovery_is_inert() {
        let u = unit("void f(int x){\n// offload: trip=1000\nwhile(x>0){x--;}}");
        let loops = discover_loops(&u);
        assert_eq!(loops[0].trip, TripEstimate::unknown());
        let annotated = apply_annotations(&loops, &u).unwrap();
        assert_eq!(annotated[0].trip, TripEstimate::annotation(1000));
    }

    #[test]
    fn distinct_accesses_and_footprint_vars() {
        let u = unit(
            "float a[8]; float b[8];\nvoid f(){for(int i=0;i<8;i++){a[i]=b[i]+b[i];}}",
        );
        let loops = discover_loops(&u);
        let p = &loops[0].body_profile;
        assert_eq!(p.access_exprs, 2); // a[i], b[i] — repeated b[i] counts once
        assert_eq!(p.arrays.len(), 2);
        assert_eq!(p.arrays[0].extent_elements, Some(8));
        assert_eq!(p.scalars_bytes, 4); // induction variable i
    }

    #[test]
    fn loop_free_code_gives_empty_inventory() {
        let u = unit("int f(int x){return x+1;}");
        assert!(discover_loops(&u).is_empty());
    }

    #[test]
    fn whitespace_and_comments_do_not_change_inventory() {
        let a = unit("void f(){for(int i=0;i<4;i++){g(i);}}");
        let b = unit("void f() {\n  /* c */ for (int i = 0; i < 4; i++) {\n    g(i); // x\n  }\n}");
        let normalize = |mut loops: Vec<LoopInfo>| {
            for l in &mut loops {
                l.location.line = 0;
            }
            loops
        };
        assert_eq!(
            normalize(discover_loops(&a)),
            normalize(discover_loops(&b))
        );
    }

    #[test]
    fn downward_and_stepped_trip_counts() {
        let u = unit("void f(){for(int i=10;i>0;i--){g(i);} for(int j=0;j<10;j+=4){g(j);}}");
        let loops = discover_loops(&u);
        assert_eq!(loops[0].trip, TripEstimate::static_const(10));
        assert_eq!(loops[1].trip, TripEstimate::static_const(3)); // 0,4,8
    }
}
