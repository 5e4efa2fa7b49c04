//! Numerical integration.
//!
//! Two families of rules are provided:
//!
//! * [`integrate`] and friends: globally adaptive 21-point Gauss–Kronrod
//!   bisection with a priority queue on the local error estimate. Used wherever
//!   an integrand is smooth but otherwise unknown, and for all test oracles.
//! * [`GaussLegendre::composite`]: fixed-order Gauss–Legendre on panels aligned
//!   to caller-supplied breakpoints. Used for the nested location integrals of
//!   the condition checks, where the non-smooth points of every integrand are
//!   known in advance and each panel carries a polynomial or exponential piece.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_067_211,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Stopping rule for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_intervals: 4000,
        }
    }

    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 4000,
        }
    }

    pub const fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-300, 1e-10)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Gauss–Kronrod step on [a, b], QUADPACK error scaling.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (1.0f64).min((200.0 * error / resasc).powf(1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Adaptive integration over consecutive segments `points[0]..points[1]..`.
///
/// The points must be non-decreasing; they seed the initial partition so that
/// known kinks never sit inside a panel.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> QuadResult {
    assert!(points.len() >= 2, "need at least one segment");
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(&f, w[0], w[1]));
            evaluations += 21;
        }
    }
    if heap.is_empty() {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations,
            converged: true,
        };
    }
    let total = |heap: &BinaryHeap<Segment>| -> (f64, f64) {
        let mut v = 0.0;
        let mut e = 0.0;
        for s in heap.iter() {
            v += s.value;
            e += s.error;
        }
        (v, e)
    };
    let (mut value, mut error) = total(&heap);
    let mut converged = false;
    while heap.len() < tol.max_intervals {
        if error <= tol.abs.max(tol.rel * value.abs()) {
            converged = true;
            break;
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval collapsed to machine resolution
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            let t = total(&heap);
            value = t.0;
            error = t.1;
            continue;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // refresh running totals periodically to shed accumulated rounding
        if heap.len() % 64 == 0 {
            let t = total(&heap);
            value = t.0;
            error = t.1;
        }
    }
    if !converged {
        let t = total(&heap);
        value = t.0;
        error = t.1;
        converged = error <= tol.abs.max(tol.rel * value.abs());
    }
    QuadResult {
        value,
        error,
        evaluations,
        converged,
    }
}

/// Integral of `f` over `[lower, ∞)` via the substitution `v = lower + w/(1-w)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, lower: f64, tol: Tolerance) -> QuadResult {
    let g = |w: f64| {
        if w >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - w;
        let v = lower + w / one_minus;
        let jac = 1.0 / (one_minus * one_minus);
        let fv = f(v);
        if fv == 0.0 {
            0.0
        } else {
            fv * jac
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Fixed-order Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z_old = z;
                z = z_old - p1 / dp;
                if (z - z_old).abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 8-point rule.
    pub fn order8() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(8))
    }

    /// Shared 16-point rule.
    pub fn order16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Rule applied on a single panel [a, b].
    #[inline]
    pub fn panel<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    /// Nodes and weights mapped onto [a, b], appended to `out`.
    pub fn push_nodes(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push((c + h * x, w * h));
        }
    }

    /// Composite rule over sorted breakpoints; each segment is cut into
    /// panels no wider than `max_width`.
    pub fn composite<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64], max_width: f64) -> f64 {
        let mut acc = 0.0;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let panels = panel_count(b - a, max_width);
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + h * p as f64;
                let hi = if p + 1 == panels { b } else { lo + h };
                acc += self.panel(&mut f, lo, hi);
            }
        }
        acc
    }

    /// Quadrature nodes of the composite rule, for reuse across many integrands.
    pub fn composite_nodes(&self, breaks: &[f64], max_width: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let panels = panel_count(b - a, max_width);
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + h * p as f64;
                let hi = if p + 1 == panels { b } else { lo + h };
                self.push_nodes(lo, hi, &mut out);
            }
        }
        out
    }
}

fn panel_count(len: f64, max_width: f64) -> usize {
    if max_width.is_finite() && max_width > 0.0 {
        ((len / max_width).ceil() as usize).max(1)
    } else {
        1
    }
}

/// Sorted, de-duplicated breakpoints clipped to `[lo, hi]`, always including both ends.
pub fn breakpoints(lo: f64, hi: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = interior
        .into_iter()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    let scale = (hi - lo).abs().max(1.0);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * scale);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        // exact through degree 15
        let v = rule.panel(|x| x.powi(14) + 3.0 * x.powi(3), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::relative(1e-10));
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_gamma_integral() {
        // Γ(2.5) = 1.329340388179137...
        let r = integrate_semi_infinite(|v: f64| v.powf(1.5) * (-v).exp(), 0.0, Tolerance::relative(1e-12));
        assert!((r.value - 1.329_340_388_179_137).abs() < 1e-11);
    }

    #[test]
    fn breaks_split_kinks() {
        let r = integrate_with_breaks(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], Tolerance::relative(1e-14));
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn composite_counts_panels() {
        let rule = GaussLegendre::order8();
        let v = rule.composite(|x: f64| x.exp(), &[0.0, 10.0], 1.0);
        assert!((v / (10f64.exp() - 1.0) - 1.0).abs() < 1e-13);
        assert_eq!(rule.composite_nodes(&[0.0, 10.0], 1.0).len(), 80);
    }

    #[test]
    fn breakpoints_dedup_and_clip() {
        let b = breakpoints(0.0, 5.0, [2.0, 2.0, -1.0, 7.0, 5.0, 1.0]);
        assert_eq!(b, vec![0.0, 1.0, 2.0, 5.0]);
    }
}
