//! JSON and CSV output with a version and configuration echo.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::regions::{Family, RateRegion, RegionPoint};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const CSV_COLUMNS: &str = "family,kind,r0,r1,re,theta,eta";

/// Provenance block written at the top of every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub version: String,
    pub command: String,
    pub config: Value,
}

impl Header {
    pub fn new(command: &str, config: Value) -> Self {
        Header {
            version: VERSION.to_string(),
            command: command.to_string(),
            config,
        }
    }

    /// `# version=… command=… config=…` for CSV files.
    pub fn csv_comment(&self) -> String {
        format!("# version={} command={} config={}", self.version, self.command, self.config)
    }
}

/// Pretty JSON with keys in sorted order. Object bodies are merged into
/// the top level; anything else is stored under `"result"`.
pub fn to_json<T: Serialize>(header: &Header, body: &T) -> Result<String> {
    let mut out = Map::new();
    out.insert("version".into(), Value::String(header.version.clone()));
    out.insert("command".into(), Value::String(header.command.clone()));
    out.insert("config".into(), header.config.clone());
    match serde_json::to_value(body)? {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(out))?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per point of every region.
pub fn regions_to_csv(header: &Header, regions: &[&RateRegion]) -> Result<String> {
    let mut s = header.csv_comment();
    s.push('\n');
    s.push_str(CSV_COLUMNS);
    s.push('\n');
    for r in regions {
        let kind = match serde_json::to_value(r.kind)? {
            Value::String(k) => k,
            other => other.to_string(),
        };
        for p in &r.points {
            s.push_str(&format!(
                "{},{kind},{},{},{},{},{}\n",
                r.family.name(),
                p.r0,
                p.r1,
                p.re,
                opt(p.theta),
                opt(p.eta)
            ));
        }
    }
    Ok(s)
}

/// Reads a region back from its JSON output.
pub fn region_from_json(s: &str) -> Result<RateRegion> {
    Ok(serde_json::from_str(s)?)
}

/// Reads the `(family, point)` rows of a region CSV.
pub fn region_points_from_csv(s: &str) -> Result<Vec<(Family, RegionPoint)>> {
    let mut lines = s.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CSV_COLUMNS => {}
        other => return Err(Error::InvalidConfig(format!("unexpected CSV header {other:?}"))),
    }
    let num = |f: &str, line: usize| -> Result<f64> {
        f.parse::<f64>()
            .map_err(|e| Error::InvalidConfig(format!("CSV row {line}: '{f}': {e}")))
    };
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::InvalidConfig(format!("CSV row {i} has {} fields", f.len())));
        }
        let opt_num = |v: &str| -> Result<Option<f64>> { if v.is_empty() { Ok(None) } else { num(v, i).map(Some) } };
        out.push((
            f[0].parse::<Family>()?,
            RegionPoint {
                r0: num(f[2], i)?,
                r1: num(f[3], i)?,
                re: num(f[4], i)?,
                theta: opt_num(f[5])?,
                eta: opt_num(f[6])?,
            },
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{RatePoint, Slice};

    fn sample() -> RateRegion {
        let mut r = RateRegion::new(Family::RIn, Slice::Full);
        r.add_point(RatePoint::new(0.1, 1.0 / 3.0, 0.0).into());
        r.add_point(RegionPoint {
            r0: 0.0,
            r1: 0.2075187496394219,
            re: 0.2075187496394219,
            theta: Some(1.0),
            eta: Some(0.0),
        });
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let h = Header::new("region-dmc", serde_json::json!({"seed": 3}));
        let s = to_json(&h, &r).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["seed"], 3);
        let back = region_from_json(&s).unwrap();
        assert_eq!(back.points, r.points);
        assert_eq!(back.family, r.family);
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let h = Header::new("region-dmc", Value::Null);
        let s = regions_to_csv(&h, &[&r]).unwrap();
        let rows = region_points_from_csv(&s).unwrap();
        let pts: Vec<RegionPoint> = rows.iter().map(|(_, p)| *p).collect();
        assert_eq!(pts, r.points);
        assert!(rows.iter().all(|(f, _)| *f == Family::RIn));
        assert!(region_points_from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn scalar_body_goes_under_result() {
        let s = to_json(&Header::new("mi", Value::Null), &0.5).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["result"], 0.5);
    }
}
