//! Minimal enclosing balls of a handful of points in ℝ³ (Welzl's recursion).

pub(crate) type P3 = [f64; 3];

#[derive(Clone, Copy, Debug)]
pub(crate) struct Ball {
    pub center: P3,
    pub radius: f64,
}

fn sub(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &P3, b: &P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn dist(a: &P3, b: &P3) -> f64 {
    let d = sub(a, b);
    dot(&d, &d).sqrt()
}

impl Ball {
    fn contains(&self, p: &P3) -> bool {
        dist(&self.center, p) <= self.radius * (1.0 + 1e-12) + 1e-15
    }
}

/// Radius of the smallest ball containing `points` (at most a few dozen).
pub(crate) fn min_enclosing_radius(points: &[P3]) -> f64 {
    let mut support = Vec::with_capacity(4);
    welzl(points, &mut support).radius
}

fn welzl(points: &[P3], support: &mut Vec<P3>) -> Ball {
    if points.is_empty() || support.len() == 4 {
        return circumball(support);
    }
    let (last, rest) = points.split_last().expect("nonempty");
    let ball = welzl(rest, support);
    if ball.contains(last) {
        return ball;
    }
    support.push(*last);
    let ball = welzl(rest, support);
    support.pop();
    ball
}

/// Smallest ball with all of `support` on its boundary: the circumcentre within
/// their affine hull.
fn circumball(support: &[P3]) -> Ball {
    match support {
        [] => Ball {
            center: [0.0; 3],
            radius: f64::NEG_INFINITY,
        },
        [p] => Ball {
            center: *p,
            radius: 0.0,
        },
        [p0, rest @ ..] => {
            // c = p0 + Σ λ_i v_i with v_i · (c - p0) = |v_i|² / 2.
            let v: Vec<P3> = rest.iter().map(|p| sub(p, p0)).collect();
            let k = v.len();
            let mut a = [[0.0f64; 4]; 3];
            for i in 0..k {
                for j in 0..k {
                    a[i][j] = dot(&v[i], &v[j]);
                }
                a[i][3] = 0.5 * dot(&v[i], &v[i]);
            }
            match solve(&mut a, k) {
                Some(lambda) => {
                    let mut c = *p0;
                    for (l, vi) in lambda.iter().zip(&v) {
                        for d in 0..3 {
                            c[d] += l * vi[d];
                        }
                    }
                    let radius = support.iter().map(|p| dist(&c, p)).fold(0.0, f64::max);
                    Ball { center: c, radius }
                }
                None => {
                    // Affinely dependent support: the farthest pair spans the ball.
                    let mut best = (0.0, *p0, *p0);
                    for (i, a) in support.iter().enumerate() {
                        for b in &support[i + 1..] {
                            let d = dist(a, b);
                            if d > best.0 {
                                best = (d, *a, *b);
                            }
                        }
                    }
                    let (d, a, b) = best;
                    Ball {
                        center: [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0],
                        radius: d / 2.0,
                    }
                }
            }
        }
    }
}

/// Gaussian elimination with partial pivoting on a `k x (k+1)` augmented system.
fn solve(a: &mut [[f64; 4]; 3], k: usize) -> Option<Vec<f64>> {
    let scale = (0..k).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..k {
                    a[r][c] -= f * a[col][c];
                }
                a[r][3] -= f * a[col][3];
            }
        }
    }
    Some((0..k).map(|i| a[i][3] / a[i][i]).collect())
}
