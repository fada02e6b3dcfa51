//! Versioned text format for orbit caches.
//!
//! ```text
//! #hypspec-cache v1
//! #radius 14
//! #complete true
//! #group {...json...}
//! #config {...json...}
//! word,a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im,orbit_distance,displacement
//! e,1,0,0,0,0,0,1,0,0,0
//! 1 -2,...
//! ```
//!
//! Floats are written in shortest round-trip form, so a cache read back is
//! bit-identical to the one written.

use std::fs;
use std::io::Write;
use std::path::Path;

use hypspec_core::{GroupPresentation, Isometry, OrbitCache, OrbitElement, Word};
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::error::CliError;

pub const MAGIC: &str = "#hypspec-cache v1";
const HEADER: [&str; 11] = [
    "word",
    "a_re",
    "a_im",
    "b_re",
    "b_im",
    "c_re",
    "c_im",
    "d_re",
    "d_im",
    "orbit_distance",
    "displacement",
];
/// Stored distances must match a recomputation to this tolerance.
const REREAD_TOL: f64 = 1e-9;

pub fn write_cache(
    path: &Path,
    cache: &OrbitCache,
    config: Option<&RunConfig>,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    writeln!(buf, "{MAGIC}").ok();
    writeln!(buf, "#radius {}", cache.radius()).ok();
    writeln!(buf, "#complete {}", cache.is_complete()).ok();
    writeln!(buf, "#group {}", serde_json::to_string(cache.group())?).ok();
    if let Some(cfg) = config {
        writeln!(buf, "#config {}", serde_json::to_string(cfg)?).ok();
    }
    for w in cache.warnings() {
        writeln!(buf, "#warning {}", w.replace('\n', " ")).ok();
    }
    {
        let mut wtr = csv::Writer::from_writer(&mut buf);
        wtr.write_record(HEADER)?;
        for e in cache.elements() {
            let mut row = Vec::with_capacity(HEADER.len());
            row.push(e.word.to_string());
            for z in e.matrix.entries() {
                row.push(z.re.to_string());
                row.push(z.im.to_string());
            }
            row.push(e.orbit_distance.to_string());
            row.push(e.displacement.to_string());
            wtr.write_record(&row)?;
        }
        wtr.flush().map_err(|e| CliError::io(path, e))?;
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// Cache plus the config that produced it, if one was embedded.
pub struct LoadedCache {
    pub cache: OrbitCache,
    pub config: Option<RunConfig>,
}

pub fn read_cache(path: &Path) -> Result<LoadedCache, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_cache(path, &text)
}

fn parse_cache(path: &Path, text: &str) -> Result<LoadedCache, CliError> {
    let bad = |msg: &str| CliError::cache_format(path, msg);
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing or unsupported version header"));
    }
    let (mut radius, mut complete, mut group, mut config) = (None, None, None, None);
    let mut body_start = MAGIC.len() + 1;
    for line in text.lines().skip(1) {
        let Some(meta) = line.strip_prefix('#') else {
            break;
        };
        body_start += line.len() + 1;
        let (key, value) = meta.split_once(' ').unwrap_or((meta, ""));
        match key {
            "radius" => radius = Some(value.parse::<f64>().map_err(|_| bad("bad radius"))?),
            "complete" => {
                complete = Some(
                    value
                        .parse::<bool>()
                        .map_err(|_| bad("bad complete flag"))?,
                )
            }
            "group" => {
                let g: GroupPresentation =
                    serde_json::from_str(value).map_err(|e| bad(&format!("bad group: {e}")))?;
                group = Some(g);
            }
            "config" => {
                let c: RunConfig =
                    serde_json::from_str(value).map_err(|e| bad(&format!("bad config: {e}")))?;
                config = Some(c);
            }
            "warning" => {}
            _ => return Err(bad(&format!("unknown header key {key:?}"))),
        }
    }
    let radius = radius.ok_or_else(|| bad("missing radius"))?;
    let complete = complete.ok_or_else(|| bad("missing complete flag"))?;
    let group = group.ok_or_else(|| bad("missing group"))?;
    let o = *group.basepoint();

    let body = text.get(body_start.min(text.len())..).unwrap_or("");
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    if rdr.headers()?.iter().ne(HEADER) {
        return Err(bad("unexpected column header"));
    }
    let mut elements = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != HEADER.len() {
            return Err(bad(&format!("row {row}: expected {} fields", HEADER.len())));
        }
        let word = parse_word(&rec[0]).ok_or_else(|| bad(&format!("row {row}: bad word")))?;
        let nums = (1..HEADER.len())
            .map(|k| rec[k].parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad(&format!("row {row}: bad number")))?;
        let z = |k: usize| Complex64::new(nums[2 * k], nums[2 * k + 1]);
        let matrix = Isometry::from_unit_entries(z(0), z(1), z(2), z(3))
            .map_err(|e| bad(&format!("row {row}: {e}")))?;
        let e = OrbitElement::from_parts(word, matrix, &o)
            .map_err(|e| bad(&format!("row {row}: {e}")))?;
        if (e.orbit_distance - nums[8]).abs() > REREAD_TOL
            || (e.displacement - nums[9]).abs() > REREAD_TOL
        {
            return Err(bad(&format!(
                "row {row}: stored distances disagree with the matrix"
            )));
        }
        elements.push(OrbitElement {
            orbit_distance: nums[8],
            displacement: nums[9],
            ..e
        });
    }
    let cache = OrbitCache::from_elements(group, radius, elements, complete)
        .map_err(|e| bad(&e.to_string()))?;
    Ok(LoadedCache { cache, config })
}

fn parse_word(s: &str) -> Option<Word> {
    let s = s.trim();
    if s == "e" {
        return Some(Word::identity());
    }
    let letters = s
        .split_whitespace()
        .map(|t| t.parse::<i32>().ok())
        .collect::<Option<Vec<_>>>()?;
    Word::new(letters).ok().filter(|w| !w.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypspec_core::group::{
        cylinder_group, enumerate_orbit, fuchsian_schottky, EnumerationOptions,
    };

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.hsc");
        for g in [
            cylinder_group(1.0).unwrap(),
            fuchsian_schottky(3.0).unwrap(),
        ] {
            let cache = enumerate_orbit(&g, &EnumerationOptions::new(6.0)).unwrap();
            write_cache(&path, &cache, None).unwrap();
            let back = read_cache(&path).unwrap();
            assert_eq!(back.cache.elements(), cache.elements());
            assert_eq!(back.cache.group(), cache.group());
            assert_eq!(back.cache.radius(), cache.radius());
            assert_eq!(back.cache.is_complete(), cache.is_complete());
        }
    }

    #[test]
    fn rejects_corruption() {
        let g = cylinder_group(1.0).unwrap();
        let cache = enumerate_orbit(&g, &EnumerationOptions::new(3.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.hsc");
        write_cache(&path, &cache, None).unwrap();
        let good = fs::read_to_string(&path).unwrap();
        let p = Path::new("x");
        assert!(parse_cache(p, &good).is_ok());
        let cases = [
            good.replacen(MAGIC, "#hypspec-cache v9", 1),
            good.replacen("#radius 3", "#radius x", 1),
            good.replacen("#complete true", "", 1),
            good.replacen("\n1,", "\n1 1,", 1),
            good.replacen("\n1,", "\nzz,", 1),
            good.replacen("orbit_distance", "dist", 1),
        ];
        for (i, text) in cases.iter().enumerate() {
            assert!(
                matches!(parse_cache(p, text), Err(CliError::CacheFormat { .. })),
                "case {i}"
            );
        }
    }
}
