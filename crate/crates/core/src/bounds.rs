//! Benchmark limits for discriminating the four-state constellation: the
//! ideal-heterodyne limit (quantum noise limit, QNL) and the Helstrom bound.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Which benchmark a [`BoundCurve`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Helstrom,
    Heterodyne,
}

/// A benchmark bound sampled on a photon-number grid.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCurve {
    pub mean_photon_numbers: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: BoundKind,
}

/// Symbol-error probability of an ideal heterodyne measurement with
/// quadrant decision regions:
///
/// `P_het = 1 - (1 - erfc(sqrt(n/2)) / 2)^2`
///
/// The heterodyne outcome for state `k` is a complex Gaussian of unit total
/// variance centered on the constellation point; deciding by the nearest
/// constellation phase gives independent half-plane tests on the two
/// diagonal quadratures, each passing with probability
/// `1 - erfc(sqrt(n/2))/2`.
pub fn heterodyne_limit(mean_photon_number: f64) -> Result<f64> {
    if !mean_photon_number.is_finite() || mean_photon_number < 0.0 {
        return Err(Error::invalid(
            "mean_photon_number",
            mean_photon_number,
            "must be >= 0",
        ));
    }
    let p_quadrature = 1.0 - 0.5 * libm::erfc((mean_photon_number / 2.0).sqrt());
    Ok(1.0 - p_quadrature * p_quadrature)
}

/// Minimum error probability over all physical measurements for the four
/// equiprobable symmetric coherent states, via the square-root measurement.
///
/// The Gram matrix of the constellation is circulant with first row
/// `g_m = exp(-n (1 - i^m))`, so its eigenvalues are the discrete Fourier
/// transform of that row and the bound is `1 - (sum_m sqrt(lambda_m))^2 / 16`.
///
/// Evaluated in the deficit variable `d_m = lambda_m - 1` (the DFT with the
/// unit diagonal term removed), which keeps full relative accuracy at large
/// `n` where the bound falls below `1e-14` and the direct expression would
/// cancel to zero.
pub fn helstrom_bound(mean_photon_number: f64) -> Result<f64> {
    if !mean_photon_number.is_finite() || mean_photon_number < 0.0 {
        return Err(Error::invalid(
            "mean_photon_number",
            mean_photon_number,
            "must be >= 0",
        ));
    }
    let n = mean_photon_number;
    const I_POW: [Complex64; 4] = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    // Off-diagonal Gram entries g_j = exp(-n (1 - i^j)), j = 1..3.
    let g: [Complex64; 3] = [1, 2, 3].map(|j| (-(Complex64::new(1.0, 0.0) - I_POW[j]) * n).exp());

    const TOL: f64 = 1e-10;
    let mut eigen_sum_deficit = 0.0; // sum_m (lambda_m - 1); must vanish
    let mut sqrt_sum_deficit = 0.0; // sum_m (sqrt(lambda_m) - 1)
    for m in 0..4 {
        let d: Complex64 = (1..4).map(|j| g[j - 1] * I_POW[(j * m) % 4]).sum();
        assert!(
            d.im.abs() <= TOL,
            "Gram eigenvalue {m} has imaginary part {} beyond tolerance",
            d.im
        );
        let d = d.re;
        assert!(
            d >= -1.0 - TOL,
            "Gram eigenvalue {m} is negative beyond tolerance: {}",
            1.0 + d
        );
        eigen_sum_deficit += d;
        let lambda = (1.0 + d).max(0.0);
        // sqrt(lambda) - 1 without cancellation.
        sqrt_sum_deficit += d / (1.0 + lambda.sqrt());
    }
    assert!(
        eigen_sum_deficit.abs() <= TOL,
        "Gram eigenvalues must sum to 4, deviation {eigen_sum_deficit}"
    );
    // P = 1 - s^2/16 with s = sum sqrt(lambda) = 4 + sqrt_sum_deficit:
    // writing t = -sqrt_sum_deficit/4 gives P = t (2 - t) exactly.
    let t = -sqrt_sum_deficit / 4.0;
    Ok((t * (2.0 - t)).clamp(0.0, 0.75))
}

/// Evaluate a bound on a grid of mean photon numbers. The grid must be
/// non-empty, non-negative and strictly increasing.
pub fn bound_curve(kind: BoundKind, grid: &[f64]) -> Result<BoundCurve> {
    if grid.is_empty() {
        return Err(Error::Degenerate("empty photon-number grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Degenerate(
            "photon-number grid must be strictly increasing".into(),
        ));
    }
    let f = match kind {
        BoundKind::Helstrom => helstrom_bound,
        BoundKind::Heterodyne => heterodyne_limit,
    };
    let values = grid.iter().map(|&n| f(n)).collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve {
        mean_photon_numbers: grid.to_vec(),
        values,
        kind,
    })
}
