use edge_elim::{DensitySpec, Instance};

fn cell_counts(inst: &Instance, side: usize) -> Vec<u64> {
    let mut counts = vec![0u64; side * side];
    for p in inst.points() {
        let cx = ((p.x * side as f64) as usize).min(side - 1);
        let cy = ((p.y * side as f64) as usize).min(side - 1);
        counts[cy * side + cx] += 1;
    }
    counts
}

/// Upper 0.001 quantile of chi-square, Wilson-Hilferty approximation.
fn chi_square_critical(df: f64) -> f64 {
    let z = 3.090_232_306;
    let c = 2.0 / (9.0 * df);
    df * (1.0 - c + z * c.sqrt()).powi(3)
}

#[test]
fn uniform_passes_chi_square() {
    let n = 100_000;
    let inst = Instance::generate(n, &DensitySpec::Uniform, 2024).unwrap();
    let counts = cell_counts(&inst, 16);
    let expected = n as f64 / 256.0;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = chi_square_critical(255.0);
    assert!((330.0..331.0).contains(&critical));
    assert!(stat < critical, "chi-square {stat} >= {critical}");
}

#[test]
fn mixture_density_stays_in_band() {
    let n = 1_000_000;
    let spec = DensitySpec::from_name("gaussian").unwrap();
    let (psi, phi) = spec.sampler().unwrap().bounds();
    let inst = Instance::generate(n, &spec, 77).unwrap();
    for (k, &c) in cell_counts(&inst, 32).iter().enumerate() {
        let density = c as f64 * 1024.0 / n as f64;
        assert!(
            density >= 0.5 * psi && density <= 1.5 * phi,
            "cell {k}: density {density} outside [{}, {}]",
            0.5 * psi,
            1.5 * phi
        );
    }
}
