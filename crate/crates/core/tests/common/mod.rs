use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use qrelax::dynamics::VelocityField;
use qrelax::CartesianPoint;

/// Composite Gauss-Legendre (5 point) integral of `v . dl` along the square
/// loop of side `side` centred on `(cx, cy)`.
pub fn loop_circulation(field: &VelocityField<f64>, cx: f64, cy: f64, side: f64, t: f64) -> f64 {
    const NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let h = side / 2.0;
    let corners = [(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)];
    let panels = 40;
    let mut total = 0.0;
    for k in 0..4 {
        let (x0, y0) = corners[k];
        let (x1, y1) = corners[(k + 1) % 4];
        let (ex, ey) = ((x1 - x0) / panels as f64, (y1 - y0) / panels as f64);
        for j in 0..panels {
            let (ax, ay) = (x0 + ex * j as f64, y0 + ey * j as f64);
            for (u, w) in NODES.iter().zip(WEIGHTS) {
                let s = 0.5 * (u + 1.0);
                let v = field.cartesian(ax + s * ex, ay + s * ey, t).unwrap();
                total += 0.5 * w * (v[0] * ex + v[1] * ey);
            }
        }
    }
    total
}

/// Least-squares fit of a centred conic `a x^2 + b xy + c y^2 = 1`:
/// `(semi_minor, semi_major, orientation of the major axis in [0, pi))`.
#[allow(dead_code)]
pub fn fit_ellipse(points: &[CartesianPoint]) -> (f64, f64, f64) {
    let a = DMatrix::from_fn(points.len(), 3, |i, j| {
        let p = points[i];
        [p.x * p.x, p.x * p.y, p.y * p.y][j]
    });
    let b = DVector::from_element(points.len(), 1.0);
    let sol = a.svd(true, true).solve(&b, 1e-14).unwrap();
    let q = Matrix2::new(sol[0], 0.5 * sol[1], 0.5 * sol[1], sol[2]);
    let eig = q.symmetric_eigen();
    let (small, big) = if eig.eigenvalues[0] < eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let v = eig.eigenvectors.column(small);
    (
        1.0 / eig.eigenvalues[big].sqrt(),
        1.0 / eig.eigenvalues[small].sqrt(),
        v[1].atan2(v[0]).rem_euclid(PI),
    )
}
