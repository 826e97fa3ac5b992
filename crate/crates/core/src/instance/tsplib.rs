//! The `EUC_2D` subset of TSPLIB.
//!
//! Coordinates are normalized into the unit square on read: translate the
//! bounding box to the origin and divide by its longer side, which keeps the
//! aspect ratio (and therefore the optimal tours).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::Instance;

pub fn read_tsplib(text: &str) -> Result<Instance> {
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut in_coords = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_coords {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                if fields.first().is_some_and(|f| f.chars().next().is_some_and(char::is_alphabetic)) {
                    // another section starts
                    in_coords = false;
                } else {
                    return Err(Error::TsplibMalformed {
                        line: lineno,
                        message: format!("expected 'id x y', got '{line}'"),
                    });
                }
            } else {
                let parse = |s: &str| {
                    s.parse::<f64>().map_err(|_| Error::TsplibMalformed {
                        line: lineno,
                        message: format!("bad number '{s}'"),
                    })
                };
                fields[0].parse::<usize>().map_err(|_| Error::TsplibMalformed {
                    line: lineno,
                    message: format!("bad node id '{}'", fields[0]),
                })?;
                let x = parse(fields[1])?;
                let y = parse(fields[2])?;
                if !(x.is_finite() && y.is_finite()) {
                    return Err(Error::TsplibMalformed {
                        line: lineno,
                        message: "non-finite coordinate".into(),
                    });
                }
                coords.push((x, y));
                continue;
            }
        }
        if line.starts_with("NODE_COORD_SECTION") {
            match weight_type.as_deref() {
                Some("EUC_2D") => {}
                Some(other) => {
                    return Err(Error::TsplibUnsupported {
                        key: "EDGE_WEIGHT_TYPE".into(),
                        value: other.into(),
                    })
                }
                None => {
                    return Err(Error::TsplibMalformed {
                        line: lineno,
                        message: "NODE_COORD_SECTION before EDGE_WEIGHT_TYPE".into(),
                    })
                }
            }
            in_coords = true;
            continue;
        }
        if line.ends_with("_SECTION") {
            return Err(Error::TsplibUnsupported {
                key: "section".into(),
                value: line.into(),
            });
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(Error::TsplibMalformed {
                line: lineno,
                message: format!("expected 'KEY : VALUE', got '{line}'"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "TYPE" => {
                if value != "TSP" {
                    return Err(Error::TsplibUnsupported {
                        key: "TYPE".into(),
                        value: value.into(),
                    });
                }
            }
            "DIMENSION" => {
                dimension = Some(value.parse().map_err(|_| Error::TsplibMalformed {
                    line: lineno,
                    message: format!("bad DIMENSION '{value}'"),
                })?);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(Error::TsplibUnsupported {
                        key: "EDGE_WEIGHT_TYPE".into(),
                        value: value.into(),
                    });
                }
                weight_type = Some(value.into());
            }
            _ => {}
        }
    }

    let dimension = dimension.ok_or(Error::TsplibMalformed {
        line: 0,
        message: "missing DIMENSION".into(),
    })?;
    if weight_type.is_none() {
        return Err(Error::TsplibMalformed {
            line: 0,
            message: "missing EDGE_WEIGHT_TYPE".into(),
        });
    }
    if coords.len() != dimension {
        return Err(Error::TsplibMalformed {
            line: 0,
            message: format!(
                "DIMENSION is {dimension} but {} coordinates were read",
                coords.len()
            ),
        });
    }
    Instance::new(normalize(&coords))
}

fn normalize(coords: &[(f64, f64)]) -> Vec<Point> {
    let (mut xmin, mut xmax, mut ymin, mut ymax) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in coords {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let span = (xmax - xmin).max(ymax - ymin);
    let scale = if span > 0.0 { 1.0 / span } else { 1.0 };
    coords
        .iter()
        .map(|&(x, y)| {
            Point::new(
                ((x - xmin) * scale).clamp(0.0, 1.0),
                ((y - ymin) * scale).clamp(0.0, 1.0),
            )
        })
        .collect()
}

pub fn write_tsplib(inst: &Instance, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME : {name}");
    let _ = writeln!(out, "TYPE : TSP");
    if let Some(p) = inst.provenance() {
        let _ = writeln!(out, "COMMENT : generated, seed {}", p.seed);
    }
    let _ = writeln!(out, "DIMENSION : {}", inst.n());
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
    let _ = writeln!(out, "NODE_COORD_SECTION");
    for (i, p) in inst.points().iter().enumerate() {
        let _ = writeln!(out, "{} {} {}", i + 1, p.x, p.y);
    }
    out.push_str("EOF\n");
    out
}
