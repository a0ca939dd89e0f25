//! Unit-ball truncation of a normed space: the metric `min{||x-y||, 1}` on a
//! finite sample, and the pull that recovers large-scale Lipschitz bounds
//! from a GH witness on the truncated metrics by chaining through the
//! sample.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::sub;
use crate::norm::{norm_eval, NormSpec};
use crate::space::{
    bijection_distortion, validate_metric, Bijection, ClassBounds, FiniteMetricSpace, METRIC_TOL,
};

/// The truncated metric `d(x,y) = min{||x-y||, 1}` on a finite point sample;
/// always a member of the class bounded above by 1.
pub fn unitize(norm: &NormSpec, points: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    norm.validate()?;
    let n = points.len();
    if n == 0 {
        return Err(Error::Domain("empty point sample".into()));
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        if points[i].len() != norm.dim() {
            return Err(Error::Structural(format!("point {i} has wrong dimension")));
        }
        for j in (i + 1)..n {
            let v = norm_eval(norm, &sub(&points[i], &points[j]))?.min(1.0);
            if v <= 1e-12 {
                return Err(Error::Structural(format!("points {i} and {j} coincide")));
            }
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    let space =
        FiniteMetricSpace::from_matrix(labels, dist, ClassBounds::new(None, Some(1.0))?)?;
    let check = validate_metric(&space, &ClassBounds::new(None, Some(1.0))?)?;
    if !check.is_valid() {
        return Err(Error::Assertion(format!(
            "unitized metric failed validation: {:?}",
            check.violations[0]
        )));
    }
    Ok(space)
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeScaleLip {
    /// `sup ||phi(x)-phi(y)|| / ||x-y||` over sample pairs at distance >= 1.
    pub lip1: f64,
    pub lip1_inv: f64,
    /// Extra slack of the greedy sample chains over the ideal `1 + 6K`
    /// bound (0 when chains are as good as geodesics).
    pub chain_slack: f64,
    /// `1 + 6K + chain_slack`, certified for both directions.
    pub bound: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum UnitizePullOutcome {
    Certified(LargeScaleLip),
    /// The sample is too sparse to chain some pair at steps of 1/2.
    Inconclusive { reason: String },
}

/// Verifies a unitized-GH witness at scale `K < 1/4`: measures the
/// large-scale Lipschitz ratios of the bijection, certifies each pair with
/// `||x-y|| >= 1` through a greedy chain of steps at most 1/2 inside the
/// sample (each chain yields the bound `length + 2K * steps`), and returns
/// `Lip_1 <= 1 + 6K + slack` where the slack measures how far the sample
/// chains are from geodesics.
pub fn unitize_pull(
    phi: &Bijection,
    k: f64,
    norm_x: &NormSpec,
    points_x: &[Vec<f64>],
    norm_y: &NormSpec,
    points_y: &[Vec<f64>],
) -> Result<UnitizePullOutcome> {
    if !(k > 0.0 && k < 0.25) {
        return Err(Error::Precondition(format!("unitize_pull requires 0 < K < 1/4, got {k}")));
    }
    let n = points_x.len();
    if points_y.len() != n || phi.n() != n {
        return Err(Error::Domain("sample sizes do not match".into()));
    }
    let mx = unitize(norm_x, points_x)?;
    let my = unitize(norm_y, points_y)?;
    let dis = bijection_distortion(&mx, &my, phi)?;
    if dis >= 2.0 * k + METRIC_TOL {
        return Err(Error::Precondition(format!(
            "unitized distortion {dis} is not below 2K = {}",
            2.0 * k
        )));
    }

    // Untruncated distance matrices; chains need real distances above 1.
    let mut dx_mat = vec![vec![0.0f64; n]; n];
    let mut dy_mat = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = norm_eval(norm_x, &sub(&points_x[i], &points_x[j]))?;
            dx_mat[i][j] = dx;
            dx_mat[j][i] = dx;
            let dy = norm_eval(norm_y, &sub(&points_y[i], &points_y[j]))?;
            dy_mat[i][j] = dy;
            dy_mat[j][i] = dy;
        }
    }

    // Greedy chain from i to j with steps of at most 1/2, strictly
    // decreasing the distance to the target; returns (length, steps).
    let chain = |dist: &Vec<Vec<f64>>, i: usize, j: usize| -> Option<(f64, usize)> {
        let mut cur = i;
        let mut length = 0.0;
        let mut steps = 0usize;
        loop {
            let remaining = dist[cur][j];
            if remaining <= 0.5 {
                return Some((length + remaining, steps + 1));
            }
            let mut best: Option<(f64, usize, f64)> = None; // (remaining after, point, step)
            for z in 0..n {
                if z == cur {
                    continue;
                }
                let step = dist[cur][z];
                if step <= 0.5 {
                    let rem = dist[z][j];
                    if rem < remaining - 1e-9
                        && best.as_ref().map_or(true, |(r, _, _)| rem < *r)
                    {
                        best = Some((rem, z, step));
                    }
                }
            }
            let (_, z, step) = best?;
            length += step;
            steps += 1;
            cur = z;
            if steps > 100 * n {
                return None;
            }
        }
    };

    let inv = phi.inverse();
    let mut lip1 = 0.0f64;
    let mut lip1_inv = 0.0f64;
    let mut slack = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = dx_mat[i][j];
            if dx >= 1.0 {
                let dy = dy_mat[phi.apply(i)][phi.apply(j)];
                lip1 = lip1.max(dy / dx);
                let Some((length, steps)) = chain(&dx_mat, i, j) else {
                    return Ok(UnitizePullOutcome::Inconclusive {
                        reason: format!("no chain of 1/2-steps from x{i} to x{j} in the sample"),
                    });
                };
                // Each chain step maps to a Y-step of at most step + 2K
                // (truncation inactive below 1), so the chain certifies the
                // pair.
                let cert = length + 2.0 * k * steps as f64;
                if dy > cert + METRIC_TOL {
                    return Err(Error::Assertion(format!(
                        "chain bound fails for ({i},{j}): image gap {dy} > {cert}"
                    )));
                }
                slack = slack.max(cert / dx - (1.0 + 6.0 * k));
            }
            // Reverse direction through the inverse bijection.
            let dy = dy_mat[i][j];
            if dy >= 1.0 {
                let dx_back = dx_mat[inv.apply(i)][inv.apply(j)];
                lip1_inv = lip1_inv.max(dx_back / dy);
                let Some((length, steps)) = chain(&dy_mat, i, j) else {
                    return Ok(UnitizePullOutcome::Inconclusive {
                        reason: format!("no chain of 1/2-steps from y{i} to y{j} in the sample"),
                    });
                };
                let cert = length + 2.0 * k * steps as f64;
                if dx_back > cert + METRIC_TOL {
                    return Err(Error::Assertion(format!(
                        "reverse chain bound fails for ({i},{j}): preimage gap {dx_back} > {cert}"
                    )));
                }
                slack = slack.max(cert / dy - (1.0 + 6.0 * k));
            }
        }
    }
    let slack = slack.max(0.0);
    let bound = 1.0 + 6.0 * k + slack;
    if lip1 > bound + METRIC_TOL || lip1_inv > bound + METRIC_TOL {
        return Err(Error::Assertion(format!(
            "large-scale Lipschitz constants ({lip1}, {lip1_inv}) exceed the bound {bound}"
        )));
    }
    Ok(UnitizePullOutcome::Certified(LargeScaleLip { lip1, lip1_inv, chain_slack: slack, bound, k }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matvec;

    fn grid(step: f64, half: i32) -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        for i in -half..=half {
            for j in -half..=half {
                pts.push(vec![i as f64 * step, j as f64 * step]);
            }
        }
        pts
    }

    #[test]
    fn unitize_caps_at_one_and_validates() {
        let l2 = NormSpec::l2(2);
        let pts = vec![vec![0.0, 0.0], vec![0.4, 0.0], vec![7.0, 0.0]];
        let m = unitize(&l2, &pts).unwrap();
        assert!((m.d(0, 1) - 0.4).abs() < 1e-12);
        assert_eq!(m.d(0, 2), 1.0);
        assert_eq!(m.d(1, 2), 1.0);
        // Duplicates are rejected.
        let dup = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(unitize(&l2, &dup), Err(Error::Structural(_))));
    }

    #[test]
    fn identity_pull_certifies_lip_one() {
        let l2 = NormSpec::l2(2);
        let pts = grid(0.45, 3);
        let phi = Bijection::identity(pts.len());
        match unitize_pull(&phi, 0.01, &l2, &pts, &l2, &pts).unwrap() {
            UnitizePullOutcome::Certified(r) => {
                assert!((r.lip1 - 1.0).abs() < 1e-9);
                assert!((r.lip1_inv - 1.0).abs() < 1e-9);
            }
            UnitizePullOutcome::Inconclusive { reason } => panic!("{reason}"),
        }
    }

    #[test]
    fn linear_isomorphism_pull_stays_below_one_plus_six_k() {
        let l2 = NormSpec::l2(2);
        let pts = grid(0.45, 3);
        // 1.05-isomorphism: slight stretch along x plus shear.
        let t = vec![vec![1.05, 0.02], vec![0.0, 0.97]];
        let img: Vec<Vec<f64>> = pts.iter().map(|p| matvec(&t, p)).collect();
        let phi = Bijection::identity(pts.len());
        let mx = unitize(&l2, &pts).unwrap();
        let my = unitize(&l2, &img).unwrap();
        let dis = bijection_distortion(&mx, &my, &phi).unwrap();
        let k = (dis / 2.0 + 1e-6).max(1e-4);
        match unitize_pull(&phi, k, &l2, &pts, &l2, &img).unwrap() {
            UnitizePullOutcome::Certified(r) => {
                assert!(
                    r.lip1 <= 1.0 + 6.0 * k + METRIC_TOL,
                    "lip1 = {}, 1+6K = {}",
                    r.lip1,
                    1.0 + 6.0 * k
                );
                assert!(r.lip1_inv <= 1.0 + 6.0 * k + METRIC_TOL);
            }
            UnitizePullOutcome::Inconclusive { reason } => panic!("{reason}"),
        }
    }

    #[test]
    fn sparse_sample_is_inconclusive() {
        let l2 = NormSpec::l2(2);
        // Two clusters 2 apart with nothing in between: no 1/2-step chain.
        let pts = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![2.0, 0.0], vec![2.1, 0.0]];
        let phi = Bijection::identity(4);
        match unitize_pull(&phi, 0.01, &l2, &pts, &l2, &pts).unwrap() {
            UnitizePullOutcome::Inconclusive { .. } => {}
            UnitizePullOutcome::Certified(_) => panic!("expected inconclusive"),
        }
    }
}
