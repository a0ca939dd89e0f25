//! The renorm construction: a metric with values in [1/2, 1] becomes an
//! equivalent norm on l_2 that boosts each coordinate pair by
//! `alpha + delta f(n,m)`, turning GH closeness of the metrics into
//! Banach-Mazur closeness of the renorms via permutation operators.

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::norm::{norm_eval, NormSpec};
use crate::space::{
    validate_metric, Bijection, ClassBounds, FiniteMetricSpace, Witness, WitnessKind,
    WitnessPayload, METRIC_TOL,
};

/// Builds the renorm spec of a metric in the class [1/2, 1]: pair values are
/// the metric's entries, `dim >= n` pads with plain euclidean coordinates.
pub fn renorm_build(
    f: &FiniteMetricSpace,
    alpha: f64,
    delta: f64,
    dim: usize,
) -> Result<NormSpec> {
    let check = validate_metric(f, &ClassBounds::both(0.5, 1.0)?)?;
    if !check.is_valid() {
        return Err(Error::Domain(format!(
            "renorm base must lie in the class [1/2, 1]: {:?}",
            check.violations[0]
        )));
    }
    if dim < f.n() {
        return Err(Error::Domain(format!(
            "dim {dim} is smaller than the point count {}",
            f.n()
        )));
    }
    let mut pairs = std::collections::BTreeMap::new();
    for i in 0..f.n() {
        for j in (i + 1)..f.n() {
            pairs.insert((i, j), f.d(i, j));
        }
    }
    let spec = NormSpec::Renorm { alpha, delta, pairs, dim };
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone)]
pub struct RenormPush {
    pub witness: Witness,
    /// Worst `| ||Tx||_g - ||x||_f | / ||x||_2` over the probes.
    pub max_probe_deviation: f64,
}

/// Pushes a bijection witnessing `|g(pi n, pi m) - f(n,m)| <= 2r` to the
/// coordinate-permutation operator between the two renorms. Every probe must
/// satisfy `| ||Tx||_g - ||x||_f | <= 2 delta r ||x||_2`; the Banach-Mazur
/// quality of the witness is `2 log(1 + 2 delta r) <= 4 delta r`.
pub fn renorm_push(
    pi: &Bijection,
    r: f64,
    spec_f: &NormSpec,
    spec_g: &NormSpec,
    probes: &[Vec<f64>],
) -> Result<RenormPush> {
    let (NormSpec::Renorm { alpha: af, delta: df, pairs: pf, dim: dimf },
         NormSpec::Renorm { alpha: ag, delta: dg, pairs: pg, dim: dimg }) = (spec_f, spec_g)
    else {
        return Err(Error::Domain("renorm_push expects two renorm specs".into()));
    };
    if dimf != dimg || (af - ag).abs() > 1e-15 || (df - dg).abs() > 1e-15 {
        return Err(Error::Domain("renorm specs must share alpha, delta and dim".into()));
    }
    let dim = *dimf;
    if pi.n() != dim {
        return Err(Error::Domain("permutation length must match the dimension".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r must be nonnegative, got {r}")));
    }
    // Audit: the permutation must carry f's pair values onto g's within 2r.
    if pf.len() != pg.len() {
        return Err(Error::Precondition("pair sets have different sizes".into()));
    }
    for (&(n, m), &fv) in pf {
        let (a, b) = (pi.apply(n), pi.apply(m));
        let key = (a.min(b), a.max(b));
        let Some(&gv) = pg.get(&key) else {
            return Err(Error::Precondition(format!(
                "pair ({n},{m}) maps to ({},{}) which g does not carry",
                key.0, key.1
            )));
        };
        if (gv - fv).abs() > 2.0 * r + 1e-12 {
            return Err(Error::Precondition(format!(
                "audit fails on pair ({n},{m}): |g(pi n, pi m) - f(n,m)| = {} > 2r = {}",
                (gv - fv).abs(),
                2.0 * r
            )));
        }
    }

    // Permutation operator e_n -> e_{pi(n)} as a matrix.
    let mut t = vec![vec![0.0; dim]; dim];
    for n in 0..dim {
        t[pi.apply(n)][n] = 1.0;
    }

    let delta = *df;
    let mut max_dev = 0.0f64;
    for x in probes {
        if x.len() != dim {
            return Err(Error::Structural("probe dimension mismatch".into()));
        }
        let l2 = norm2(x);
        if l2 < 1e-12 {
            continue;
        }
        let tx = crate::linalg::matvec(&t, x);
        let dev = (norm_eval(spec_g, &tx)? - norm_eval(spec_f, x)?).abs();
        if dev > 2.0 * delta * r * l2 + METRIC_TOL {
            return Err(Error::Assertion(format!(
                "probe deviation {dev} exceeds 2 delta r ||x||_2 = {}",
                2.0 * delta * r * l2
            )));
        }
        max_dev = max_dev.max(dev / l2);
    }

    let quality = 2.0 * (2.0 * delta * r).ln_1p();
    debug_assert!(quality <= 4.0 * delta * r + METRIC_TOL);
    Ok(RenormPush {
        witness: Witness { kind: WitnessKind::Bm, payload: WitnessPayload::Matrix(t), quality },
        max_probe_deviation: max_dev,
    })
}

/// The largest Kadets radius for which the reverse extraction lemma applies:
/// `eta_max = min{1/100, sqrt(alpha^2 - 1) / (10 alpha), (1 - 1/alpha)/2}`.
pub fn eta_max(alpha: f64) -> f64 {
    let a = (alpha * alpha - 1.0).sqrt() / (10.0 * alpha);
    let b = 0.5 * (1.0 - 1.0 / alpha);
    (0.01f64).min(a).min(b)
}

/// The reverse-direction constant `C = max{1/eta_max, 3/(2 delta)}` of the
/// GH-from-Kadets bound.
pub fn renorm_reverse_constant(alpha: f64, delta: f64) -> f64 {
    (1.0 / eta_max(alpha)).max(3.0 / (2.0 * delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::gaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn half_one_metric(values: &[(usize, usize, f64)], n: usize) -> FiniteMetricSpace {
        let mut dist = vec![vec![0.0; n]; n];
        for &(i, j, v) in values {
            dist[i][j] = v;
            dist[j][i] = v;
        }
        FiniteMetricSpace::with_default_labels(dist, ClassBounds::both(0.5, 1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn build_examples() {
        // Constant 1/2: every boost factor is alpha + delta/2.
        let f = half_one_metric(&[(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)], 3);
        let spec = renorm_build(&f, 1.003, 0.002, 3).unwrap();
        let NormSpec::Renorm { pairs, .. } = &spec else { panic!() };
        assert!(pairs.values().all(|&v| v == 0.5));

        // Two-point base: a single boosted pair.
        let f = half_one_metric(&[(0, 1, 0.8)], 2);
        let spec = renorm_build(&f, 1.003, 0.002, 4).unwrap();
        let NormSpec::Renorm { pairs, .. } = &spec else { panic!() };
        assert_eq!(pairs.len(), 1);

        // Out-of-class values are rejected.
        let f = half_one_metric(&[(0, 1, 0.3)], 2);
        assert!(matches!(renorm_build(&f, 1.003, 0.002, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn push_identity_is_isometric() {
        let f = half_one_metric(&[(0, 1, 0.6), (0, 2, 0.9), (1, 2, 0.7)], 3);
        let spec = renorm_build(&f, 1.003, 0.002, 3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let probes: Vec<Vec<f64>> =
            (0..200).map(|_| (0..3).map(|_| gaussian(&mut rng)).collect()).collect();
        let push =
            renorm_push(&Bijection::identity(3), 0.0, &spec, &spec, &probes).unwrap();
        assert_eq!(push.witness.quality, 0.0);
        assert_eq!(push.max_probe_deviation, 0.0);
    }

    #[test]
    fn push_controls_probe_deviation() {
        // g = f relabeled by a rotation plus a perturbation of at most 2r.
        let r = 0.1;
        let f = half_one_metric(&[(0, 1, 0.6), (0, 2, 0.9), (1, 2, 0.7)], 3);
        let pi = Bijection::new(vec![1, 2, 0]).unwrap();
        // g(pi n, pi m) = f(n, m) + noise
        let mut g_dist = vec![vec![0.0; 3]; 3];
        let noise = [0.15, -0.2, 0.05];
        let mut idx = 0;
        for n in 0..3 {
            for m in (n + 1)..3 {
                let (a, b) = (pi.apply(n), pi.apply(m));
                let v = (f.d(n, m) + noise[idx]).clamp(0.5, 1.0);
                idx += 1;
                g_dist[a][b] = v;
                g_dist[b][a] = v;
            }
        }
        let g = FiniteMetricSpace::with_default_labels(g_dist, ClassBounds::both(0.5, 1.0).unwrap())
            .unwrap();
        let spec_f = renorm_build(&f, 1.003, 0.002, 3).unwrap();
        let spec_g = renorm_build(&g, 1.003, 0.002, 3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let probes: Vec<Vec<f64>> =
            (0..2000).map(|_| (0..3).map(|_| gaussian(&mut rng)).collect()).collect();
        let push = renorm_push(&pi, r, &spec_f, &spec_g, &probes).unwrap();
        let delta = 0.002;
        assert!(push.max_probe_deviation <= 2.0 * delta * r + 1e-9);
        assert!(push.witness.quality <= 4.0 * delta * r + 1e-12);

        // Quality matches 2 log(1 + 2 delta r) exactly.
        assert!((push.witness.quality - 2.0 * (2.0 * delta * r).ln_1p()).abs() < 1e-15);
    }

    #[test]
    fn push_audit_rejects_large_gaps() {
        let f = half_one_metric(&[(0, 1, 0.5)], 2);
        let g = half_one_metric(&[(0, 1, 1.0)], 2);
        let spec_f = renorm_build(&f, 1.003, 0.002, 2).unwrap();
        let spec_g = renorm_build(&g, 1.003, 0.002, 2).unwrap();
        let out = renorm_push(&Bijection::identity(2), 0.1, &spec_f, &spec_g, &[]);
        assert!(matches!(out, Err(Error::Precondition(_))));
    }

    #[test]
    fn reverse_constant_for_default_parameters() {
        // alpha = 1.003, delta = 0.002: eta_max is the (1 - 1/alpha)/2
        // branch and C is the 3/(2 delta) branch, i.e. 750.
        let eta = eta_max(1.003);
        assert!((eta - 0.5 * (1.0 - 1.0 / 1.003)).abs() < 1e-15);
        assert!(eta < 0.0015);
        let c = renorm_reverse_constant(1.003, 0.002);
        assert!((c - 750.0).abs() < 1e-9);
    }
}
