//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

/// Textbook two-pass Pearson coefficient.
pub fn pearson_oracle(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx2 = 0.0;
    let mut dy2 = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        dx2 += (x - mx) * (x - mx);
        dy2 += (y - my) * (y - my);
    }
    num / (dx2 * dy2).sqrt()
}

/// Exhaustive best-point scan: for every log bin, collect its members and
/// take the first after sorting by (y descending, f ascending, index).
pub fn best_points_oracle(pts: &[(f64, f64)], n_bins: usize) -> Vec<usize> {
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let edge = |k: usize| {
        if k == 0 {
            lo
        } else if k == n_bins {
            hi
        } else {
            lo * (hi / lo).powf(k as f64 / n_bins as f64)
        }
    };
    let mut out = Vec::new();
    for k in 0..n_bins {
        let mut members: Vec<usize> = (0..pts.len())
            .filter(|&i| {
                let f = pts[i].0;
                if lo == hi {
                    return k == 0;
                }
                let above = k == 0 || f >= edge(k);
                let below = k == n_bins - 1 || f < edge(k + 1);
                above && below
            })
            .collect();
        members.sort_by(|&a, &b| {
            pts[b]
                .1
                .total_cmp(&pts[a].1)
                .then(pts[a].0.total_cmp(&pts[b].0))
                .then(a.cmp(&b))
        });
        if let Some(&first) = members.first() {
            out.push(first);
        }
    }
    out
}

/// Uncentred normal-equation fit of `ln y = ln a + b f`. Returns `(a, b)`.
pub fn loglinear_oracle(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(f, y) in pts {
        let l = y.ln();
        sx += f;
        sy += l;
        sxx += f * f;
        sxy += f * l;
    }
    let b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let ln_a = (sy - b * sx) / n;
    (ln_a.exp(), b)
}

pub fn ssr(pts: &[(f64, f64)], model: impl Fn(f64) -> f64) -> f64 {
    pts.iter().map(|&(f, y)| (y - model(f)).powi(2)).sum()
}

/// Least-squares exponential `a·e^(b f)` in linear space by damped
/// Gauss-Newton from the log-linear start. Returns the residual sum.
pub fn best_exponential_ssr(pts: &[(f64, f64)]) -> f64 {
    let (mut a, mut b) = loglinear_oracle(pts);
    let mut best = ssr(pts, |f| a * (b * f).exp());
    for _ in 0..200 {
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for &(f, y) in pts {
            let e = (b * f).exp();
            let r = y - a * e;
            let j = [e, a * f * e];
            for i in 0..2 {
                for k in 0..2 {
                    jtj[i][k] += j[i] * j[k];
                }
                jtr[i] += j[i] * r;
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let da = (jtr[0] * jtj[1][1] - jtr[1] * jtj[0][1]) / det;
        let db = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-8 {
            let (na, nb) = (a + step * da, b + step * db);
            let s = ssr(pts, |f| na * (nb * f).exp());
            if s < best {
                a = na;
                b = nb;
                best = s;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    best
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}
