use crate::Real;

/// Seven-point Dunavant rule on the reference triangle, exact for total
/// degree 5. Points are barycentric, weights sum to one.
pub fn triangle_rule<T: Real>() -> [([T; 3], T); 7] {
    let a1 = T::lit(0.059_715_871_789_770);
    let b1 = T::lit(0.470_142_064_105_115);
    let a2 = T::lit(0.797_426_985_353_087);
    let b2 = T::lit(0.101_286_507_323_456);
    let w0 = T::lit(0.225);
    let w1 = T::lit(0.132_394_152_788_506);
    let w2 = T::lit(0.125_939_180_544_827);
    let third = T::one() / T::lit(3.0);
    [
        ([third, third, third], w0),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre<T: Real>(points: usize) -> Vec<(T, T)> {
    let m = points;
    let mut out = vec![(T::zero(), T::zero()); m];
    for i in 0..m.div_ceil(2) {
        let mut x = (T::PI() * (T::of(i) + T::lit(0.75)) / (T::of(m) + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != T::zero() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        out[i] = (-x, w);
        out[m - 1 - i] = (x, w);
    }
    out
}

fn legendre<T: Real>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if m == 0 {
        return (T::one(), T::zero());
    }
    for j in 2..=m {
        let jj = T::of(j);
        let p2 = ((T::lit(2.0) * jj - T::one()) * x * p1 - (jj - T::one()) * p0) / jj;
        p0 = p1;
        p1 = p2;
    }
    let d = T::of(m) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[a, b]` with equal panels.
pub fn composite_gauss<T: Real>(a: T, b: T, panels: usize, points: usize) -> Vec<(T, T)> {
    let base = gauss_legendre::<T>(points);
    let width = (b - a) / T::of(panels);
    let half = width * T::lit(0.5);
    let mut out = Vec::with_capacity(panels * points);
    for p in 0..panels {
        let mid = a + width * (T::of(p) + T::lit(0.5));
        for &(x, w) in &base {
            out.push((mid + half * x, half * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_integrates_quintics() {
        // ∫ over the reference triangle of x^a y^b = a! b! / (a+b+2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let q: f64 = triangle_rule::<f64>()
                    .iter()
                    .map(|(l, w)| 0.5 * w * l[1].powi(a as i32) * l[2].powi(b as i32))
                    .sum();
                assert!((q - exact).abs() < 1e-14, "{a} {b}");
            }
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        let rule = gauss_legendre::<f64>(8);
        let s: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m14: f64 = rule.iter().map(|&(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }
}
