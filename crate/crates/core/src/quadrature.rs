//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Hard cap on the number of live subintervals.
pub const MAX_SUBINTERVALS: usize = 1 << 16;

// Kronrod abscissae on [0, 1) of the symmetric 15-point rule, largest first.
// Odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_bound: f64,
    pub subintervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

// Max-heap order on the local error estimate.
impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval with the largest local error estimate is bisected until the
/// summed estimate drops below `tol`. Gives up with
/// [`Error::QuadratureNonConvergence`] once [`MAX_SUBINTERVALS`] is reached.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
            expected: "(0, inf)",
        });
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_bound: 0.0,
            subintervals: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let (mut total, mut err) = (first.value, first.error);
    heap.push(first);
    loop {
        if err <= tol {
            // Re-sum to shed accumulated rounding from the running totals.
            let (v, e) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
            if e <= tol {
                return Ok(Integral {
                    value: v,
                    error_bound: e,
                    subintervals: heap.len(),
                });
            }
            total = v;
            err = e;
        }
        let piece = *heap.peek().expect("heap is never empty");
        let mid = 0.5 * (piece.a + piece.b);
        // Interval no longer splittable in f64.
        if heap.len() >= MAX_SUBINTERVALS || mid <= piece.a || mid >= piece.b {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error_bound: err,
                subintervals: heap.len(),
            });
        }
        heap.pop();
        let left = gk15(&f, piece.a, mid);
        let right = gk15(&f, mid, piece.b);
        total += left.value + right.value - piece.value;
        err += left.error + right.error - piece.error;
        heap.push(left);
        heap.push(right);
    }
}
