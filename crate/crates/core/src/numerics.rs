//! Shared numerical engine.
//!
//! Everything here is a pure function of its inputs; nothing holds state
//! between calls.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{Complex, Matrix2};

use crate::error::{Error, Result};

/// Default absolute tolerance for [`integrate_adaptive`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximum number of subintervals the adaptive integrator will create.
pub const MAX_SUBINTERVALS: usize = 4096;

/// Real samples on the uniform axis `tau_k = k * t_max / (n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    t_max: f64,
    values: Vec<f64>,
}

impl UniformGrid {
    pub fn new(t_max: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples, got {}",
                values.len()
            )));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "t_max must be positive and finite, got {t_max}"
            )));
        }
        Ok(Self { t_max, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(t_max: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let step = t_max / (n.max(2) - 1) as f64;
        let values = (0..n).map(|k| f(k as f64 * step)).collect();
        Self::new(t_max, values)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.t_max / (self.values.len() - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.values.len() {
            self.t_max
        } else {
            k as f64 * self.step()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Cubic Hermite interpolation of the samples, given the derivative of the
    /// sampled function at every node.
    pub fn hermite(&self, derivs: &[f64], tau: f64) -> Result<f64> {
        debug_assert_eq!(derivs.len(), self.values.len());
        let (k, s) = self.locate(tau)?;
        if s == 0.0 {
            return Ok(self.values[k]);
        }
        let h = self.step();
        Ok(hermite_basis(
            s,
            h,
            self.values[k],
            self.values[k + 1],
            derivs[k],
            derivs[k + 1],
        ))
    }

    /// Returns the panel index `k` and the local coordinate `s in [0, 1)` such
    /// that `tau = tau_k + s * h`. The last node maps to `(n - 2, 1)`.
    pub(crate) fn locate(&self, tau: f64) -> Result<(usize, f64)> {
        let tol = 1e-12 * self.t_max;
        if !(tau >= -tol && tau <= self.t_max + tol) {
            return Err(Error::OutOfRange {
                tau,
                tau_max: self.t_max,
            });
        }
        let tau = tau.clamp(0.0, self.t_max);
        let h = self.step();
        let pos = tau / h;
        let last = self.values.len() - 1;
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-9 {
            let k = nearest as usize;
            return Ok(if k >= last { (last - 1, 1.0) } else { (k, 0.0) });
        }
        let k = (pos.floor() as usize).min(last - 1);
        Ok((k, pos - k as f64))
    }
}

pub(crate) fn hermite_basis(s: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

// 21-point Gauss-Kronrod rule: abscissae on [0, 1] in decreasing order, the
// odd-indexed ones being the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Kronrod estimate and `|Kronrod - Gauss|` on `[a, b]`.
fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let sum = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let (kronrod, gauss) = (kronrod * half, gauss * half);
    if !kronrod.is_finite() {
        return Err(Error::Numeric(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    Ok((kronrod, (kronrod - gauss).abs()))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Largest error first; ties broken by position so the result never
    // depends on heap internals.
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below the absolute tolerance `tol`.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_adaptive(|u| Ok(f(u)), a, b, tol)
}

/// [`integrate_adaptive`] for integrands that can themselves fail, such as
/// nested quadratures.
pub fn try_integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }

    let (value, err) = gk21(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err });
    let mut total_err = err;

    while total_err > tol {
        if heap.len() >= MAX_SUBINTERVALS {
            return Err(Error::NonConvergence(format!(
                "error estimate {total_err:.3e} above tolerance {tol:.1e} after {MAX_SUBINTERVALS} subintervals on [{a}, {b}]"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence(format!(
                "subinterval [{}, {}] cannot be bisected further",
                worst.a, worst.b
            )));
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, worst.b)?;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        // Guard against drift in the running sum.
        if total_err <= tol {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(panels.iter().map(|p| p.value).sum())
}

/// Running integral `G_k = int_0^{tau_k} f` of uniformly sampled data.
///
/// Even nodes use composite Simpson; odd nodes close with a Simpson 3/8 panel
/// over the last three intervals. The first interval uses the three-point
/// formula `h/12 (5 f0 + 8 f1 - f2)`. All panels are at least third order.
pub fn cumulative_integral(samples: &UniformGrid) -> Result<UniformGrid> {
    let f = samples.values();
    let n = f.len();
    if n < 3 {
        return Err(Error::InvalidGrid(format!(
            "cumulative integration needs at least 3 samples, got {n}"
        )));
    }
    let h = samples.step();
    let mut out = vec![0.0; n];
    out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    let mut k = 2;
    while k < n {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
        k += 2;
    }
    let mut k = 3;
    while k < n {
        out[k] = out[k - 3] + 3.0 * h / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k]);
        k += 2;
    }
    UniformGrid::new(samples.t_max(), out)
}

/// Eigenvalues `(lambda_1 <= lambda_2)` of a 2x2 Hermitian matrix.
pub fn eig_hermitian_2x2(h: &Matrix2<Complex<f64>>) -> Result<(f64, f64)> {
    let scale = h.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let anti = (h - h.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if anti > 1e-12 * scale {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (antihermitian part {anti:.3e})"
        )));
    }
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    Ok((mean - radius, mean + radius))
}
