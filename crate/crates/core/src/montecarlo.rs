use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub area: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Area of `{x in [min, max] : inside(x)}` by jittered stratified sampling:
/// one uniform point per cell of a `m x m` grid, `m = floor(sqrt(samples))`.
/// The reported error is the binomial one, an upper bound for stratified draws.
pub fn estimate_area(
    min: Point,
    max: Point,
    samples: u64,
    seed: u64,
    inside: impl Fn(Point) -> bool,
) -> Result<AreaEstimate> {
    if !(max.x > min.x && max.y > min.y) {
        return Err(Error::InvalidConfig("empty sampling box".into()));
    }
    let m = (samples as f64).sqrt().floor() as u64;
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let (w, h) = (max.x - min.x, max.y - min.y);
    let (cw, ch) = (w / m as f64, h / m as f64);
    let mut rng = seeded(seed);
    let mut hits = 0u64;
    for iy in 0..m {
        for ix in 0..m {
            let x = min.x + (ix as f64 + rng.random::<f64>()) * cw;
            let y = min.y + (iy as f64 + rng.random::<f64>()) * ch;
            if inside(Point::new(x, y)) {
                hits += 1;
            }
        }
    }
    let total = m * m;
    let frac = hits as f64 / total as f64;
    let box_area = w * h;
    Ok(AreaEstimate {
        area: frac * box_area,
        std_error: (frac * (1.0 - frac) / total as f64).sqrt() * box_area,
        samples: total,
    })
}
