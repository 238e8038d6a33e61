use std::collections::BTreeMap;
use std::path::PathBuf;

use super::ExperimentConfig;
use crate::control::BoxBounds;
use crate::error::{Error, Result};
use crate::objective::{Observation, ProblemData};

/// Keys understood by [`RunSettings::from_map`].
pub const SETTING_KEYS: [&str; 19] = [
    "level",
    "ref-level",
    "levels",
    "lambda",
    "bounds",
    "obs1",
    "obs2",
    "tol",
    "max-iter",
    "eps",
    "h-perp",
    "h-par",
    "out",
    "cache",
    "jobs",
    "cold-start",
    "front-size",
    "rpm-front-size",
    "diagonal",
];

/// Experiment configuration plus the level used by single solves.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub experiment: ExperimentConfig,
    pub level: u32,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse {v:?}")))
}

/// Parses `a,b`.
pub fn parse_pair(text: &str) -> Result<[f64; 2]> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected a pair a,b, got {text:?}")))?;
    Ok([parse_num("pair", a)?, parse_num("pair", b)?])
}

/// Parses `a,b;c,d;...`.
pub fn parse_pair_list(text: &str) -> Result<Vec<[f64; 2]>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_pair)
        .collect()
}

/// Parses a comma-separated list such as `2,3,4,5`.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num("list", s))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(Error::Parse(format!(
            "{key}: expected a boolean, got {other:?}"
        ))),
    }
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            experiment: ExperimentConfig::default(),
            level: 6,
        }
    }
}

impl RunSettings {
    /// Applies `key=value` settings on top of the defaults and validates the
    /// result.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut s = Self::default();
        let c = &mut s.experiment;
        let mut obs1 = c.problem.observations(0).to_vec();
        let mut obs2 = c.problem.observations(1).to_vec();
        let mut lambda = c.problem.lambda();
        let mut bounds = c.problem.bounds();
        for (key, v) in map {
            match key.as_str() {
                "level" => s.level = parse_num(key, v)?,
                "ref-level" => c.reference_level = parse_num(key, v)?,
                "levels" => c.levels = parse_list(v)?,
                "lambda" => lambda = parse_pair(v)?,
                "bounds" => {
                    let [a, b] = parse_pair(v)?;
                    bounds = BoxBounds::new(a, b)?;
                }
                "obs1" => obs1 = parse_observations(v)?,
                "obs2" => obs2 = parse_observations(v)?,
                "tol" => c.bb.tol = parse_num(key, v)?,
                "max-iter" => c.bb.max_iter = parse_num(key, v)?,
                "eps" => c.eps = parse_num(key, v)?,
                "h-perp" => c.h_perp = parse_num(key, v)?,
                "h-par" => c.h_par = parse_num(key, v)?,
                "out" => {
                    c.output_dir = PathBuf::from(v);
                    if !map.contains_key("cache") {
                        c.cache_dir = Some(c.output_dir.join("cache"));
                    }
                }
                "cache" => {
                    c.cache_dir = match v.as_str() {
                        "none" | "" => None,
                        dir => Some(PathBuf::from(dir)),
                    }
                }
                "jobs" => c.jobs = parse_num(key, v)?,
                "cold-start" => c.bb.warm_start = !parse_bool(key, v)?,
                "front-size" => c.front_size = parse_num(key, v)?,
                "rpm-front-size" => c.rpm_front_size = parse_num(key, v)?,
                "diagonal" => c.diagonal = v.parse()?,
                other => return Err(Error::Parse(format!("unknown setting {other:?}"))),
            }
        }
        c.problem = ProblemData::new(obs1, obs2, lambda, bounds)?;
        if !(c.h_perp > 0.0 && c.h_par > 0.0) {
            return Err(Error::invalid("h-perp and h-par must be positive"));
        }
        if !(c.eps > 0.0 && c.eps < 0.5) {
            return Err(Error::invalid("eps must lie in (0, 0.5)"));
        }
        c.validate()?;
        Ok(s)
    }
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// skipped; later keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected key=value, got {raw:?}", n + 1))
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", n + 1)));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Parses `x,y=v[;x,y=v...]` into observations.
pub fn parse_observations(text: &str) -> Result<Vec<Observation>> {
    let bad = |s: &str| Error::Parse(format!("observation {s:?}: expected x,y=value"));
    let num = |s: &str, item: &str| s.trim().parse::<f64>().map_err(|_| bad(item));
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (xy, v) = item.split_once('=').ok_or_else(|| bad(item))?;
            let (x, y) = xy.split_once(',').ok_or_else(|| bad(item))?;
            Ok(Observation::new(
                [num(x, item)?, num(y, item)?],
                num(v, item)?,
            ))
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|obs| {
            if obs.is_empty() {
                Err(Error::Parse("no observations given".into()))
            } else {
                Ok(obs)
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values_with_comments() {
        let m = parse_key_values("# header\nlevel = 5\n\nlambda=0.1,0.1 # trailing\nlevel=6\n")
            .unwrap();
        assert_eq!(m["level"], "6");
        assert_eq!(m["lambda"], "0.1,0.1");
        assert!(parse_key_values("novalue\n").is_err());
        assert!(parse_key_values("=3\n").is_err());
    }

    #[test]
    fn settings_override_defaults() {
        let map = parse_key_values(
            "level=4\nlevels=2,3\nref-level=5\nlambda=1,0.1\nbounds=-1,1\nobs1=0.5,0.5=1\n\
             cold-start=true\ndiagonal=rising\nout=/tmp/x\njobs=2\n",
        )
        .unwrap();
        let s = RunSettings::from_map(&map).unwrap();
        let c = &s.experiment;
        assert_eq!(s.level, 4);
        assert_eq!(c.levels, vec![2, 3]);
        assert_eq!(c.reference_level, 5);
        assert_eq!(c.problem.lambda(), [1.0, 0.1]);
        assert_eq!(c.problem.bounds().upper(), 1.0);
        assert_eq!(c.problem.observations(0)[0].point, [0.5, 0.5]);
        assert_eq!(c.problem.observations(1)[0].target, -2.0);
        assert!(!c.bb.warm_start);
        assert_eq!(c.diagonal, crate::mesh::Diagonal::Rising);
        assert_eq!(
            c.cache_dir.as_deref(),
            Some(std::path::Path::new("/tmp/x/cache"))
        );
        assert_eq!(c.jobs, 2);
    }

    #[test]
    fn settings_errors() {
        let bad = |t: &str| RunSettings::from_map(&parse_key_values(t).unwrap()).is_err();
        assert!(bad("colour=blue"));
        assert!(bad("levels=5\nref-level=5"));
        assert!(bad("lambda=0,1"));
        assert!(bad("obs1=1,0.5=3"));
        assert!(bad("bounds=2,1"));
        assert!(bad("cold-start=maybe"));
        assert!(bad("h-perp=-1"));
        assert!(RunSettings::from_map(&BTreeMap::new()).is_ok());
    }

    #[test]
    fn pairs_and_lists() {
        assert_eq!(parse_pair("0.2, 0.8").unwrap(), [0.2, 0.8]);
        assert!(parse_pair("0.2").is_err());
        assert_eq!(
            parse_pair_list("1,2; 3,4").unwrap(),
            vec![[1.0, 2.0], [3.0, 4.0]]
        );
        assert_eq!(parse_list::<u32>("2,3, 4").unwrap(), vec![2, 3, 4]);
        assert!(parse_list::<u32>("2,x").is_err());
    }

    #[test]
    fn observation_lists() {
        let o = parse_observations("0.75,0.25=6; 0.5,0.5=-1.5").unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].point, [0.75, 0.25]);
        assert_eq!(o[1].target, -1.5);
        assert!(parse_observations("0.5=1").is_err());
        assert!(parse_observations("a,b=c").is_err());
        assert!(parse_observations(" ; ").is_err());
    }
}
