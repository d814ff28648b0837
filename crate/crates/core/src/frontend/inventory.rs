//! Neutral JSON loop-inventory exchange.
//!
//! Any external analyzer can hand the pipeline a loop list in this format and
//! skip the built-in parser entirely. The schema is a JSON array of records
//! with exactly the [`LoopInfo`] field names.

use super::{LoopInfo, TripSource};
use crate::error::FrontendError;
use std::collections::BTreeSet;
use std::path::Path;

pub fn loops_to_json(loops: &[LoopInfo]) -> String {
    serde_json::to_string_pretty(loops).expect("loop inventory serializes")
}

pub fn loops_from_json(text: &str) -> Result<Vec<LoopInfo>, FrontendError> {
    let loops: Vec<LoopInfo> =
        serde_json::from_str(text).map_err(|e| FrontendError::Inventory(e.to_string()))?;
    validate(&loops)?;
    Ok(loops)
}

pub fn write_inventory<P: AsRef<Path>>(path: P, loops: &[LoopInfo]) -> Result<(), FrontendError> {
    std::fs::write(path.as_ref(), loops_to_json(loops)).map_err(|source| FrontendError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

pub fn read_inventory<P: AsRef<Path>>(path: P) -> Result<Vec<LoopInfo>, FrontendError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(FrontendError::FileNotFound(path.display().to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| FrontendError::Io {
        path: path.display().to_string(),
        source,
    })?;
    loops_from_json(&text)
}

fn validate(loops: &[LoopInfo]) -> Result<(), FrontendError> {
    let bad = |msg: String| Err(FrontendError::Inventory(msg));
    let ids: BTreeSet<u64> = loops.iter().map(|l| l.id).collect();
    if ids.len() != loops.len() {
        return bad("duplicate loop ids".into());
    }
    for (i, l) in loops.iter().enumerate() {
        if l.id != i as u64 + 1 {
            return bad(format!("loop ids must be dense and 1-based, got {}", l.id));
        }
        match (l.trip.source, l.trip.value) {
            (TripSource::Unknown, Some(_)) => {
                return bad(format!("loop {}: unknown trip must carry no value", l.id))
            }
            (TripSource::Unknown, None) => {}
            (_, None) => return bad(format!("loop {}: trip value missing", l.id)),
            (_, Some(0)) => return bad(format!("loop {}: trip value must be >= 1", l.id)),
            _ => {}
        }
        if let Some(parent) = l.parent_id {
            let Some(p) = loops.iter().find(|c| c.id == parent) else {
                return bad(format!("loop {}: parent {} not in inventory", l.id, parent));
            };
            if parent >= l.id {
                return bad(format!("loop {}: parent must precede it", l.id));
            }
            if l.depth != p.depth + 1 {
                return bad(format!("loop {}: depth must be parent depth + 1", l.id));
            }
        } else if l.depth != 0 {
            return bad(format!("loop {}: root loop must have depth 0", l.id));
        }
        let mut names = BTreeSet::new();
        for a in &l.body_profile.arrays {
            if !matches!(a.element_bytes, 1 | 2 | 4 | 8) {
                return bad(format!(
                    "loop {}: array `{}` element_bytes must be 1, 2, 4 or 8",
                    l.id, a.name
                ));
            }
            if !names.insert(a.name.clone()) {
                return bad(format!("loop {}: duplicate array `{}`", l.id, a.name));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{discover_loops, parse_source_strings};

    #[test]
    fn round_trips_discovered_loops() {
        let unit = parse_source_strings(&[(
            "t.c".into(),
            "float a[64];\nvoid f(){for(int i=0;i<64;i++){a[i]=a[i]*2.0f;}}".into(),
        )])
        .unwrap();
        let loops = discover_loops(&unit);
        let json = loops_to_json(&loops);
        let back = loops_from_json(&json).unwrap();
        assert_eq!(loops, back);
    }

    #[test]
    fn serialized_field_names_are_stable() {
        let unit = parse_source_strings(&[(
            "t.c".into(),
            "void f(int x){do{x--;}while(x>0);}".into(),
        )])
        .unwrap();
        let json = loops_to_json(&discover_loops(&unit));
        for key in [
            "\"id\"",
            "\"kind\"",
            "\"location\"",
            "\"parent_id\"",
            "\"depth\"",
            "\"body_profile\"",
            "\"trip\"",
            "\"ops_add\"",
            "\"access_exprs\"",
            "\"scalars_bytes\"",
            "\"do-while\"",
            "\"unknown\"",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }

    #[test]
    fn rejects_inconsistent_depth() {
        let text = r#"[
          {"id":1,"kind":"for","location":{"file":"x.c","line":1},"parent_id":null,"depth":0,
           "body_profile":{"ops_add":0,"ops_mul":0,"ops_div":0,"ops_other":0,"access_exprs":0,"arrays":[],"scalars_bytes":0},
           "trip":{"source":"unknown","value":null}},
          {"id":2,"kind":"for","location":{"file":"x.c","line":2},"parent_id":1,"depth":3,
           "body_profile":{"ops_add":0,"ops_mul":0,"ops_div":0,"ops_other":0,"access_exprs":0,"arrays":[],"scalars_bytes":0},
           "trip":{"source":"unknown","value":null}}
        ]"#;
        assert!(loops_from_json(text).is_err());
    }
}
