//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Finite intervals are integrated directly; the half-line `[0, ∞)` is mapped to
//! `[0, 1)` with `x = s·t/(1-t)`. Kronrod nodes never touch the end points, so
//! integrands only need to be finite on the open interval.

use crate::error::{Error, Result};

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

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();

    // QUADPACK error rescaling.
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadEstimate> {
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let mut segments = vec![kronrod21(&mut f, a, b)];
    let mut evaluations = 21;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                estimate: value,
                error_estimate: error,
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(QuadEstimate {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                estimate: value,
                error_estimate: error,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval cannot be split further in floating point
            return Err(Error::Quadrature {
                estimate: value,
                error_estimate: error,
            });
        }
        segments.push(kronrod21(&mut f, seg.a, mid));
        segments.push(kronrod21(&mut f, mid, seg.b));
        evaluations += 42;
    }
}

/// Integrates `f` over `[0, ∞)` through `x = scale·t/(1-t)`.
///
/// `scale` should be comparable to the length scale on which `f` decays.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, scale: f64, tol: Tolerance) -> Result<QuadEstimate> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::ParameterDomain {
            name: "scale",
            value: scale,
            reason: "half-line map needs a finite positive scale",
        });
    }
    integrate(
        |t| {
            let one_minus = 1.0 - t;
            let x = scale * t / one_minus;
            let jacobian = scale / (one_minus * one_minus);
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx * jacobian
            }
        },
        0.0,
        1.0,
        tol,
    )
}
