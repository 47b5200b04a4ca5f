//! Small, independent reference implementations used to cross-check the
//! fast paths: dense matrices and systems, Gaussian elimination, brute-force
//! parameter search and tensor-product quadrature.
//!
//! Nothing here shares code with the assembly or solver modules.

use crate::bounds::BoundConstants;
use crate::systems::Problem;
use crate::{Error, Result};

/// Closed-form P1 element matrices on a cell of width `h`.
///
/// Returns `(K_lower, K_upper, M)` for the triangles `(a, b, c)` and
/// `(a, c, d)` of the cell `a = (0,0), b = (h,0), c = (h,h), d = (0,h)`.
pub fn element_matrices(h: f64) -> ([[f64; 3]; 3], [[f64; 3]; 3], [[f64; 3]; 3]) {
    let kl = [[0.5, -0.5, 0.0], [-0.5, 1.0, -0.5], [0.0, -0.5, 0.5]];
    let ku = [[0.5, 0.0, -0.5], [0.0, 0.5, -0.5], [-0.5, -0.5, 1.0]];
    let s = h * h / 24.0;
    let m = [[2.0 * s, s, s], [s, 2.0 * s, s], [s, s, 2.0 * s]];
    (kl, ku, m)
}

pub type Dense = Vec<Vec<f64>>;

/// Dense unit-coefficient stiffness and mass on the interior nodes of an
/// `n × n` grid, interior node `(i, j)` numbered `(j−1)(n−1) + (i−1)`.
pub fn dense_fem_matrices(n: usize) -> (Dense, Dense) {
    let h = 1.0 / n as f64;
    let m1 = n - 1;
    let dim = m1 * m1;
    let (kl, ku, me) = element_matrices(h);
    let mut k = vec![vec![0.0; dim]; dim];
    let mut m = vec![vec![0.0; dim]; dim];
    let idx = |i: usize, j: usize| -> Option<usize> {
        (i > 0 && j > 0 && i < n && j < n).then(|| (j - 1) * m1 + (i - 1))
    };
    for j in 0..n {
        for i in 0..n {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            for (nodes, ke) in [([a, b, c], &kl), ([a, c, d], &ku)] {
                for r in 0..3 {
                    for s in 0..3 {
                        if let (Some(p), Some(q)) = (nodes[r], nodes[s]) {
                            k[p][q] += ke[r][s];
                            m[p][q] += me[r][s];
                        }
                    }
                }
            }
        }
    }
    (k, m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    pub matrix: Dense,
    pub rhs: Vec<f64>,
}

/// Parameters of a dense mode system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseParams {
    pub problem: Problem,
    pub k: usize,
    pub lambda: f64,
    pub omega: f64,
    pub nu: f64,
    pub sigma: f64,
}

/// Writes out the block system entry by entry from unit `K` and `M`.
pub fn dense_mode_system(
    p: DenseParams,
    k: &Dense,
    m: &Dense,
    load_c: &[f64],
    load_s: Option<&[f64]>,
) -> DenseSystem {
    let nd = k.len();
    let blocks = if p.k == 0 { 2 } else { 4 };
    let dim = blocks * nd;
    let mut a = vec![vec![0.0; dim]; dim];
    let w = p.k as f64 * p.omega * p.sigma;
    for i in 0..nd {
        for j in 0..nd {
            let lead = match p.problem {
                Problem::I => m[i][j],
                Problem::II => k[i][j],
            };
            let kn = -p.nu * k[i][j];
            let ml = -m[i][j] / p.lambda;
            let wm = w * m[i][j];
            if p.k == 0 {
                a[i][j] = lead;
                a[i][nd + j] = kn;
                a[nd + i][j] = kn;
                a[nd + i][nd + j] = ml;
            } else {
                let (y0, y1, p0, p1) = (0, nd, 2 * nd, 3 * nd);
                a[y0 + i][y0 + j] = lead;
                a[y1 + i][y1 + j] = lead;
                a[y0 + i][p0 + j] = kn;
                a[y0 + i][p1 + j] = wm;
                a[y1 + i][p0 + j] = -wm;
                a[y1 + i][p1 + j] = kn;
                a[p0 + i][y0 + j] = kn;
                a[p0 + i][y1 + j] = -wm;
                a[p1 + i][y0 + j] = wm;
                a[p1 + i][y1 + j] = kn;
                a[p0 + i][p0 + j] = ml;
                a[p1 + i][p1 + j] = ml;
            }
        }
    }
    let mut rhs = vec![0.0; dim];
    rhs[..nd].copy_from_slice(load_c);
    if let Some(s) = load_s {
        rhs[nd..2 * nd].copy_from_slice(s);
    }
    DenseSystem { matrix: a, rhs }
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &Dense, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: a.len(),
        });
    }
    let mut m: Dense = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[piv][col] == 0.0 {
            return Err(Error::ZeroPivot(col));
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (x[r] - s) / m[r][r];
    }
    Ok(x)
}

pub fn dense_matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Brute-force minimum of the majorant over a 40 × 40 logarithmic grid in
/// `[1e-6, 1e6]²` for misfit `a`, `b = r₂²`, `c = r₁²` (the `‖p‖²` term is
/// left out). Returns `(α, β, value)`.
pub fn grid_search_alpha_beta(
    a: f64,
    b: f64,
    c: f64,
    consts: &BoundConstants<f64>,
) -> (f64, f64, f64) {
    let pts: Vec<f64> = (0..40)
        .map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 39.0))
        .collect();
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for &al in &pts {
        for &be in &pts {
            let g = (1.0 + al) * (1.0 + be) * consts.cf * consts.cf
                / (2.0 * al * consts.mu1 * consts.mu1);
            let v = (1.0 + al) / 2.0 * a + g * (b + consts.cf * consts.cf / be * c);
            if v < best.2 {
                best = (al, be, v);
            }
        }
    }
    best
}

/// Gauss–Legendre nodes and weights on `[0, 1]` for 1 to 5 points, from
/// tabulated values.
pub fn gauss_unit(points: usize) -> Result<Vec<(f64, f64)>> {
    let table: &[(f64, f64)] = match points {
        1 => &[(0.0, 2.0)],
        2 => &[
            (-0.577_350_269_189_625_8, 1.0),
            (0.577_350_269_189_625_8, 1.0),
        ],
        3 => &[
            (-0.774_596_669_241_483_4, 5.0 / 9.0),
            (0.0, 8.0 / 9.0),
            (0.774_596_669_241_483_4, 5.0 / 9.0),
        ],
        4 => &[
            (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
            (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        ],
        5 => &[
            (-0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
        ],
        _ => return Err(Error::UnsupportedDegree(points)),
    };
    Ok(table
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect())
}

/// `∫_{(0,1)²} f` with a tensor Gauss rule on `cells × cells` squares.
pub fn integrate_square(cells: usize, points: usize, f: impl Fn([f64; 2]) -> f64) -> Result<f64> {
    let g = gauss_unit(points)?;
    let h = 1.0 / cells as f64;
    let mut s = 0.0;
    for j in 0..cells {
        for i in 0..cells {
            for &(gx, wx) in &g {
                for &(gy, wy) in &g {
                    s += wx * wy * f([(i as f64 + gx) * h, (j as f64 + gy) * h]);
                }
            }
        }
    }
    Ok(s * h * h)
}

/// `∫_0^T g` with a composite Gauss rule.
pub fn integrate_time(
    period: f64,
    panels: usize,
    points: usize,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    let q = gauss_unit(points)?;
    let h = period / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        for &(x, w) in &q {
            s += w * g((p as f64 + x) * h);
        }
    }
    Ok(s * h)
}

/// Cosine and sine coefficient of mode `k ≥ 1` (or the mean for `k = 0`)
/// of a `T`-periodic signal by direct quadrature.
pub fn mode_coefficient(
    period: f64,
    k: usize,
    panels: usize,
    g: impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    let w = std::f64::consts::TAU / period;
    if k == 0 {
        return Ok((integrate_time(period, panels, 5, &g)? / period, 0.0));
    }
    let kw = k as f64 * w;
    let c = integrate_time(period, panels, 5, |t| g(t) * (kw * t).cos())? * 2.0 / period;
    let s = integrate_time(period, panels, 5, |t| g(t) * (kw * t).sin())? * 2.0 / period;
    Ok((c, s))
}

/// Space–time integral `∫_0^T ∫_Ω f(x, t)`.
pub fn integrate_spacetime(
    period: f64,
    cells: usize,
    panels: usize,
    f: impl Fn([f64; 2], f64) -> f64,
) -> Result<f64> {
    integrate_time(period, panels, 5, |t| {
        integrate_square(cells, 4, |x| f(x, t)).unwrap_or(f64::NAN)
    })
}

/// Cost contribution `𝒥_k = ½‖m_k‖² + λ/2 ‖u_k‖²` of mode `k` from
/// space–time closures of the misfit `m` (state or gradient misfit, padded
/// with zeros) and the control `u`.
pub fn spacetime_mode_cost(
    period: f64,
    k: usize,
    lambda: f64,
    cells: usize,
    panels: usize,
    misfit: impl Fn([f64; 2], f64) -> [f64; 2],
    control: impl Fn([f64; 2], f64) -> f64,
) -> Result<f64> {
    let sq = |(c, s): (f64, f64)| c * c + s * s;
    integrate_square(cells, 4, |x| {
        let m0 =
            mode_coefficient(period, k, panels, |t| misfit(x, t)[0]).unwrap_or((f64::NAN, 0.0));
        let m1 =
            mode_coefficient(period, k, panels, |t| misfit(x, t)[1]).unwrap_or((f64::NAN, 0.0));
        let u = mode_coefficient(period, k, panels, |t| control(x, t)).unwrap_or((f64::NAN, 0.0));
        0.5 * (sq(m0) + sq(m1)) + 0.5 * lambda * sq(u)
    })
}
