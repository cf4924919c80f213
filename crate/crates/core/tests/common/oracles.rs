//! Independent reference implementations the library is checked against.

use nalgebra::DMatrix;

pub const G: f64 = 9.81;

/// Point-mass double pendulum swinging about x, with a moving support.
/// Generalized coordinates `(rx, ry, rz, a1, a2)`; `a2` is relative.
pub fn double_pendulum_lagrangian(g: &[f64; 5], gd: &[f64; 5]) -> f64 {
    let [_, ry, rz, a1, a2] = *g;
    let [vx, vy, vz, w1, w2] = *gd;
    let (s1, c1) = a1.sin_cos();
    let (s12, c12) = (a1 + a2).sin_cos();
    let z1 = rz - c1;
    let z2 = z1 - c12;
    let _ = ry;
    let v1 = [vx, vy + c1 * w1, vz + s1 * w1];
    let v2 = [vx, v1[1] + c12 * (w1 + w2), v1[2] + s12 * (w1 + w2)];
    let sq = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    0.5 * (sq(v1) + sq(v2)) - G * (z1 + z2)
}

/// `d/dt dL/dqdot - dL/dq`, all derivatives numerical.
pub fn lagrangian_oracle(g: [f64; 5], gd: [f64; 5], gdd: [f64; 5]) -> [f64; 5] {
    // L is quadratic in the velocities, so a unit-step central difference is
    // exact there.
    let momentum = |g: &[f64; 5], gd: &[f64; 5], k: usize| {
        let (mut p, mut m) = (*gd, *gd);
        p[k] += 1.0;
        m[k] -= 1.0;
        (double_pendulum_lagrangian(g, &p) - double_pendulum_lagrangian(g, &m)) / 2.0
    };
    let mut out = [0.0; 5];
    let h = 1e-4;
    for k in 0..5 {
        let mut gp = g;
        let mut gm = g;
        let mut vp = gd;
        let mut vm = gd;
        for j in 0..5 {
            gp[j] += h * gd[j];
            gm[j] -= h * gd[j];
            vp[j] += h * gdd[j];
            vm[j] -= h * gdd[j];
        }
        let dp_dt = (momentum(&gp, &vp, k) - momentum(&gm, &vm, k)) / (2.0 * h);
        let hq = 1e-5;
        let (mut qp, mut qm) = (g, g);
        qp[k] += hq;
        qm[k] -= hq;
        let dl_dq = (double_pendulum_lagrangian(&qp, &gd) - double_pendulum_lagrangian(&qm, &gd)) / (2.0 * hq);
        out[k] = dp_dt - dl_dq;
    }
    out
}

/// One-sided Jacobi SVD: orthogonalize column pairs by plane rotations until
/// every pair is orthogonal; the singular values are the column norms.
pub fn jacobi_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut u = if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        a.transpose()
    };
    let n = u.ncols();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = u.column(p).norm_squared();
                let beta: f64 = u.column(q).norm_squared();
                let gamma: f64 = u.column(p).dot(&u.column(q));
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..u.nrows() {
                    let (x, y) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = c * x - s * y;
                    u[(i, q)] = s * x + c * y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|k| u.column(k).norm()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn naive_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let less = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

pub fn naive_kendall(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] - x[j]).signum() * if x[i] == x[j] { 0.0 } else { 1.0 };
            let b = (y[i] - y[j]).signum() * if y[i] == y[j] { 0.0 } else { 1.0 };
            if a == 0.0 {
                tx += 1;
            }
            if b == 0.0 {
                ty += 1;
            }
            if a * b > 0.0 {
                concordant += 1;
            } else if a * b < 0.0 {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    (concordant - discordant) as f64 / (((n0 - tx) as f64) * ((n0 - ty) as f64)).sqrt()
}

/// Reference UHC tracking samples: (motion, MDS, MPJPE-G in mm).
pub const UHC_SAMPLES: [(&str, f64, f64); 18] = [
    ("hand_waving", 188.58, 16.67),
    ("tpose2", 267.20, 23.29),
    ("tennis", 273.48, 26.20),
    ("small_jump", 309.36, 38.21),
    ("walk", 337.27, 48.20),
    ("dodge2", 342.72, 48.45),
    ("spin2", 355.95, 62.57),
    ("hop", 358.54, 63.40),
    ("fast_jump", 316.30, 130.68),
    ("tpose", 215.71, 16.34),
    ("throw", 259.71, 25.28),
    ("twist", 270.28, 29.77),
    ("dodge", 325.62, 41.42),
    ("kick", 328.67, 55.56),
    ("jump", 333.87, 65.31),
    ("run", 358.97, 61.47),
    ("spin2", 355.95, 62.56),
    ("run_fast", 349.02, 150.21),
];

pub fn uhc_records() -> Vec<torquescore::analysis::ScoredRecord> {
    UHC_SAMPLES
        .iter()
        .enumerate()
        .map(|(i, &(name, m, e))| torquescore::analysis::ScoredRecord::new(format!("{name}_{i}"), m, e))
        .collect()
}

/// Exact sum of values in `[1, 256)`: each is an integer multiple of
/// 2^-52, so fixed point in `i128` is lossless and the final cast rounds
/// once.
pub fn fixed_point_sum(values: &[f64]) -> f64 {
    let scale = 2f64.powi(52);
    let total: i128 = values
        .iter()
        .map(|&v| {
            assert!((1.0..256.0).contains(&v));
            let s = v * scale;
            assert_eq!(s.fract(), 0.0);
            s as i128
        })
        .sum();
    total as f64 / scale
}

/// Brute-force split search over every unique score but the largest.
pub fn naive_mid(data: &[(f64, f64)], min_partition: usize) -> Option<(f64, f64, usize, usize)> {
    let mut candidates: Vec<f64> = data.iter().map(|d| d.0).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    candidates.pop();
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for c in candidates {
        let low: Vec<f64> = data.iter().filter(|d| d.0 <= c).map(|d| d.1).collect();
        let high: Vec<f64> = data.iter().filter(|d| d.0 > c).map(|d| d.1).collect();
        if low.len() < min_partition || high.len() < min_partition {
            continue;
        }
        let gap = fixed_point_sum(&high) / high.len() as f64 - fixed_point_sum(&low) / low.len() as f64;
        if best.is_none_or(|b| gap > b.1) {
            best = Some((c, gap, low.len(), high.len()));
        }
    }
    best
}
