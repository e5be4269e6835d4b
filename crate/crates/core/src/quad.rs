//! Gauss-Kronrod and Gauss-Legendre rules.

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

// 10-point Gauss weights on the odd Kronrod nodes
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

pub const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_804_939_476_142_360_184,
    0.525_532_409_916_328_985_817_739_049_189_246,
    0.796_666_477_413_626_739_591_553_936_475_831,
    0.960_289_856_497_536_231_683_560_868_569_473,
];

pub const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_361_982_965_150_449_277_196,
    0.313_706_645_877_887_287_337_962_201_986_601,
    0.222_381_034_453_374_470_544_355_994_426_241,
    0.101_228_536_290_376_259_152_531_354_309_962,
];

/// Eight-point Gauss-Legendre rule on [a, b].
pub fn gl8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..4 {
        let dx = h * GL8_NODES[i];
        s += GL8_WEIGHTS[i] * (f(c - dx) + f(c + dx));
    }
    s * h
}

/// Vector-valued eight-point Gauss-Legendre rule on [a, b].
pub fn gl8_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(mut f: F, a: f64, b: f64) -> [f64; N] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = [0.0; N];
    for i in 0..4 {
        let dx = h * GL8_NODES[i];
        let lo = f(c - dx);
        let hi = f(c + dx);
        for k in 0..N {
            s[k] += GL8_WEIGHTS[i] * (lo[k] + hi[k]);
        }
    }
    s.map(|v| v * h)
}

/// One 21-point Kronrod evaluation; returns the estimate and |K - G|.
pub fn gk21_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(
    f: &mut F,
    a: f64,
    b: f64,
) -> ([f64; N], [f64; N]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    for n in 0..N {
        k[n] = WGK[10] * fc[n];
    }
    for j in 0..10 {
        let dx = h * XGK[j];
        let lo = f(c - dx);
        let hi = f(c + dx);
        for n in 0..N {
            let s = lo[n] + hi[n];
            k[n] += WGK[j] * s;
            if j % 2 == 1 {
                g[n] += WG[j / 2] * s;
            }
        }
    }
    let mut err = [0.0; N];
    for n in 0..N {
        k[n] *= h;
        err[n] = (k[n] - g[n] * h).abs();
    }
    (k, err)
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-14,
            rel: 1e-8,
            max_intervals: 2000,
        }
    }
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    val: [f64; N],
    err: [f64; N],
}

/// Adaptive bisection with the 21-point rule, componentwise tolerance.
pub fn adaptive_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    what: &'static str,
) -> Result<([f64; N], [f64; N])> {
    if a == b {
        return Ok(([0.0; N], [0.0; N]));
    }
    let (val, err) = gk21_vec(&mut f, a, b);
    let mut pieces = vec![Piece { a, b, val, err }];
    loop {
        let mut total = [0.0; N];
        let mut total_err = [0.0; N];
        for p in &pieces {
            for n in 0..N {
                total[n] += p.val[n];
                total_err[n] += p.err[n];
            }
        }
        let scale: [f64; N] = std::array::from_fn(|n| tol.abs.max(tol.rel * total[n].abs()));
        if (0..N).all(|n| total_err[n] <= scale[n]) {
            return Ok((total, total_err));
        }
        if pieces.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                what,
                abs_err: total_err.iter().cloned().fold(0.0, f64::max),
            });
        }
        let priority = |p: &Piece<N>| (0..N).map(|n| p.err[n] / scale[n]).fold(0.0, f64::max);
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (i, priority(p)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let p = pieces.swap_remove(idx);
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            return Err(Error::Quadrature {
                what,
                abs_err: total_err.iter().cloned().fold(0.0, f64::max),
            });
        }
        let (v1, e1) = gk21_vec(&mut f, p.a, m);
        let (v2, e2) = gk21_vec(&mut f, m, p.b);
        pieces.push(Piece {
            a: p.a,
            b: m,
            val: v1,
            err: e1,
        });
        pieces.push(Piece {
            a: m,
            b: p.b,
            val: v2,
            err: e2,
        });
    }
}

/// Scalar adaptive quadrature.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    what: &'static str,
) -> Result<(f64, f64)> {
    let (v, e) = adaptive_vec(|x| [f(x)], a, b, tol, what)?;
    Ok((v[0], e[0]))
}

/// Adaptive quadrature over consecutive panels, summing results.
/// `edges` must be sorted.
pub fn panels_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    edges: &[f64],
    tol: Tolerance,
    what: &'static str,
) -> Result<([f64; N], [f64; N])> {
    let mut total = [0.0; N];
    let mut err = [0.0; N];
    for w in edges.windows(2) {
        let (v, e) = adaptive_vec(&mut f, w[0], w[1], tol, what)?;
        for n in 0..N {
            total[n] += v[n];
            err[n] += e[n];
        }
    }
    Ok((total, err))
}

/// Panel edges on [a, b] with width at most `width`, always including the
/// interior `breaks` that fall inside the range.
pub fn panel_edges(a: f64, b: f64, width: f64, breaks: &[f64]) -> Vec<f64> {
    let mut fixed: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    fixed.push(b);
    fixed.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut edges = vec![a];
    let mut lo = a;
    for hi in fixed {
        let n = ((hi - lo) / width).ceil().max(1.0) as usize;
        for i in 1..n {
            edges.push(lo + (hi - lo) * i as f64 / n as f64);
        }
        edges.push(hi);
        lo = hi;
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl8_is_exact_for_degree_15() {
        let v = gl8(|x| x.powi(15) + 3.0 * x.powi(14), -1.0, 2.0);
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 3.0 * (2f64.powi(15) + 1.0) / 15.0;
        assert!((v - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let (v, _) = adaptive(|x| (50.0 * x).cos(), 0.0, 3.0, Tolerance::default(), "cos").unwrap();
        assert!((v - (150.0f64).sin() / 50.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_log() {
        let (v, _) = adaptive(|x| x.ln(), 0.0, 1.0, Tolerance::default(), "log").unwrap();
        assert!((v + 1.0).abs() < 1e-8);
    }

    #[test]
    fn exhaustion_is_reported() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_intervals: 4,
        };
        let r = adaptive(|x| (1.0 / x).sin(), 1e-6, 1.0, tol, "wild");
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn panel_edges_respect_breaks_and_width() {
        let e = panel_edges(0.0, 10.0, 3.0, &[1.0, 20.0]);
        assert_eq!(e.first(), Some(&0.0));
        assert_eq!(e.last(), Some(&10.0));
        assert!(e.contains(&1.0));
        assert!(e.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 3.0 + 1e-12));
    }
}
