//! Bounded-density point distributions on the unit square.
//!
//! Non-uniform densities have the form `rho(x) = psi + (1 - psi) * g(x)` where
//! `g` is a mixture of Gaussians truncated (and renormalized) to the unit
//! square. The lower bound `psi` holds by construction; the upper bound `phi`
//! is the analytic maximum bound `psi + (1 - psi) * max g`.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Truncation masses below this make rejection sampling impractically slow.
const MIN_TRUNCATION_MASS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub center: [f64; 2],
    pub sigma: f64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensitySpec {
    #[default]
    Uniform,
    /// Every point follows the same mixture density.
    TruncatedGaussianMixture {
        psi: f64,
        /// Declared upper bound; derived when absent, rejected when below the
        /// derived bound.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<f64>,
        components: Vec<GaussianComponent>,
    },
    /// Point `i` follows `psi + (1 - psi) * N(centers[i mod k], sigma)`
    /// truncated to the square: a perturbed base configuration.
    PerPointMixture {
        psi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<f64>,
        sigma: f64,
        centers: Vec<[f64; 2]>,
    },
}


fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Probability mass of `N(center, sigma^2 I)` inside the unit square.
fn truncation_mass(center: [f64; 2], sigma: f64) -> f64 {
    let axis = |m: f64| std_normal_cdf((1.0 - m) / sigma) - std_normal_cdf(-m / sigma);
    axis(center[0]) * axis(center[1])
}

fn gaussian_pdf(center: [f64; 2], sigma: f64, x: Point) -> f64 {
    let dx = x.x - center[0];
    let dy = x.y - center[1];
    (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
}

fn check_psi(psi: f64) -> Result<()> {
    if !(psi > 0.0 && psi <= 1.0) {
        return Err(Error::InvalidDensity(format!(
            "psi must lie in (0, 1], got {psi}"
        )));
    }
    Ok(())
}

fn check_component(center: [f64; 2], sigma: f64) -> Result<f64> {
    if !(center[0].is_finite() && center[1].is_finite()) {
        return Err(Error::InvalidDensity("non-finite component center".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidDensity(format!("sigma must be positive, got {sigma}")));
    }
    let z = truncation_mass(center, sigma);
    if z < MIN_TRUNCATION_MASS {
        return Err(Error::InvalidDensity(format!(
            "component at ({}, {}) with sigma {sigma} keeps only {z:.2e} of its mass in the unit square",
            center[0], center[1]
        )));
    }
    Ok(z)
}

fn resolve_phi(psi: f64, declared: Option<f64>, derived: f64) -> Result<f64> {
    match declared {
        None => Ok(derived),
        Some(phi) if phi < psi => Err(Error::InvalidDensity(format!(
            "phi ({phi}) must not be below psi ({psi})"
        ))),
        Some(phi) if phi < 1.0 => Err(Error::InvalidDensity(format!(
            "phi ({phi}) must be at least 1 for a probability density"
        ))),
        Some(phi) if phi + 1e-12 < derived => Err(Error::InvalidDensity(format!(
            "declared phi ({phi}) is below the density's maximum bound ({derived})"
        ))),
        Some(phi) => Ok(phi),
    }
}

/// A validated density ready for sampling.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: DensitySpec,
    psi: f64,
    phi: f64,
    /// `(center, sigma, normalized weight, truncation mass)`
    components: Vec<([f64; 2], f64, f64, f64)>,
}

impl DensitySpec {
    pub fn sampler(&self) -> Result<Sampler> {
        match self {
            DensitySpec::Uniform => Ok(Sampler {
                spec: self.clone(),
                psi: 1.0,
                phi: 1.0,
                components: Vec::new(),
            }),
            DensitySpec::TruncatedGaussianMixture {
                psi,
                phi,
                components,
            } => {
                check_psi(*psi)?;
                if components.is_empty() {
                    return Err(Error::InvalidDensity("mixture has no components".into()));
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if components.iter().any(|c| !(c.weight > 0.0)) || !total.is_finite() {
                    return Err(Error::InvalidDensity("weights must be positive".into()));
                }
                let mut comps = Vec::with_capacity(components.len());
                let mut g_max = 0.0;
                for c in components {
                    let z = check_component(c.center, c.sigma)?;
                    let w = c.weight / total;
                    g_max += w / (2.0 * PI * c.sigma * c.sigma * z);
                    comps.push((c.center, c.sigma, w, z));
                }
                let derived = psi + (1.0 - psi) * g_max;
                Ok(Sampler {
                    spec: self.clone(),
                    psi: *psi,
                    phi: resolve_phi(*psi, *phi, derived)?,
                    components: comps,
                })
            }
            DensitySpec::PerPointMixture {
                psi,
                phi,
                sigma,
                centers,
            } => {
                check_psi(*psi)?;
                if centers.is_empty() {
                    return Err(Error::InvalidDensity("no base centers".into()));
                }
                let mut comps = Vec::with_capacity(centers.len());
                let mut g_max: f64 = 0.0;
                for &c in centers {
                    let z = check_component(c, *sigma)?;
                    g_max = g_max.max(1.0 / (2.0 * PI * sigma * sigma * z));
                    comps.push((c, *sigma, 1.0, z));
                }
                let derived = psi + (1.0 - psi) * g_max;
                Ok(Sampler {
                    spec: self.clone(),
                    psi: *psi,
                    phi: resolve_phi(*psi, *phi, derived)?,
                    components: comps,
                })
            }
        }
    }

    /// A bundled non-uniform preset: three clusters over a uniform floor.
    pub fn gaussian_preset() -> Self {
        DensitySpec::TruncatedGaussianMixture {
            psi: 0.3,
            phi: None,
            components: vec![
                GaussianComponent { center: [0.3, 0.3], sigma: 0.15, weight: 2.0 },
                GaussianComponent { center: [0.7, 0.6], sigma: 0.2, weight: 1.0 },
                GaussianComponent { center: [0.4, 0.8], sigma: 0.1, weight: 1.0 },
            ],
        }
    }

    /// Named presets accepted on the command line.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(DensitySpec::Uniform),
            "truncated-gaussian-mixture" | "gaussian" => Ok(Self::gaussian_preset()),
            "per-point-mixture" => Ok(DensitySpec::PerPointMixture {
                psi: 0.5,
                phi: None,
                sigma: 0.1,
                centers: vec![[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]],
            }),
            other => Err(Error::InvalidDensity(format!("unknown density '{other}'"))),
        }
    }
}

impl Sampler {
    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    /// `(psi, phi)`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.psi, self.phi)
    }

    /// Density of point `index` at `x` (zero outside the square).
    pub fn density(&self, index: usize, x: Point) -> f64 {
        if !x.in_unit_square() {
            return 0.0;
        }
        match &self.spec {
            DensitySpec::Uniform => 1.0,
            DensitySpec::TruncatedGaussianMixture { .. } => {
                let g: f64 = self
                    .components
                    .iter()
                    .map(|&(c, s, w, z)| w * gaussian_pdf(c, s, x) / z)
                    .sum();
                self.psi + (1.0 - self.psi) * g
            }
            DensitySpec::PerPointMixture { .. } => {
                let (c, s, _, z) = self.components[index % self.components.len()];
                self.psi + (1.0 - self.psi) * gaussian_pdf(c, s, x) / z
            }
        }
    }

    fn uniform_point<R: Rng>(rng: &mut R) -> Point {
        Point::new(rng.random::<f64>(), rng.random::<f64>())
    }

    fn truncated_normal<R: Rng>(rng: &mut R, center: [f64; 2], sigma: f64) -> Point {
        let nx = Normal::new(center[0], sigma).expect("validated sigma");
        let ny = Normal::new(center[1], sigma).expect("validated sigma");
        loop {
            let p = Point::new(nx.sample(rng), ny.sample(rng));
            if p.in_unit_square() {
                return p;
            }
        }
    }

    /// Draws the position of point `index`.
    pub fn sample<R: Rng>(&self, index: usize, rng: &mut R) -> Point {
        match &self.spec {
            DensitySpec::Uniform => Self::uniform_point(rng),
            _ => {
                if rng.random::<f64>() < self.psi {
                    return Self::uniform_point(rng);
                }
                let (c, s, _, _) = match &self.spec {
                    DensitySpec::PerPointMixture { .. } => {
                        self.components[index % self.components.len()]
                    }
                    _ => {
                        let mut u = rng.random::<f64>();
                        let mut pick = self.components[self.components.len() - 1];
                        for &comp in &self.components {
                            if u < comp.2 {
                                pick = comp;
                                break;
                            }
                            u -= comp.2;
                        }
                        pick
                    }
                };
                Self::truncated_normal(rng, c, s)
            }
        }
    }
}
