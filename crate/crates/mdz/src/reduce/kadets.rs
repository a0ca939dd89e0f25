//! The Kadets gadget: a metric space over a symmetric unit-sphere sample
//! plus "peak" points indexed by subsets of the sample, whose distances
//! encode norms of subset sums. Kadets closeness pushes to GH closeness of
//! the gadgets; a GH witness on the gadgets pulls back to a Kadets
//! certificate whose constants are verified by sampling.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, scale};
use crate::norm::{kadets_certificate_check, norm_eval, KadetsCertificate, NormSpec};
use crate::space::{
    bijection_distortion, validate_metric, Bijection, ClassBounds, FiniteMetricSpace, Witness,
    WitnessKind, WitnessPayload, METRIC_TOL,
};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum KadetsVertex {
    Sphere(usize),
    /// Peak of the subset `f` (sorted sample indices) anchored at `k in f`.
    Peak { f: Vec<usize>, k: usize },
}

#[derive(Debug, Clone)]
pub struct KadetsGadget {
    pub space: FiniteMetricSpace,
    pub vertices: Vec<KadetsVertex>,
    pub sample: Vec<Vec<f64>>,
    pub s_max: usize,
    pub norm: NormSpec,
    index: BTreeMap<KadetsVertex, usize>,
}

impl KadetsGadget {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, v: &KadetsVertex) -> Option<usize> {
        self.index.get(v).copied()
    }
}

fn subsets_up_to(n: usize, s_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if (mask.count_ones() as usize) <= s_max {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// Builds the gadget over a symmetric unit sample: sphere points keep their
/// norm distances; `d(x_i, p_{F,k}) = 10 + ||x_i - x_k||`; peaks of the same
/// subset sit at `15 + ||sum_F x|| / |F|`; peaks of different subsets at 20.
/// The result is validated as a metric rather than assumed to be one.
pub fn kadets_gadget(
    norm: &NormSpec,
    sample: &[Vec<f64>],
    s_max: usize,
) -> Result<KadetsGadget> {
    norm.validate()?;
    if sample.is_empty() || s_max == 0 {
        return Err(Error::Domain("empty sample or zero subset budget".into()));
    }
    if sample.len() > 16 {
        return Err(Error::Resource("sample too large for exhaustive subset audits".into()));
    }
    for (i, x) in sample.iter().enumerate() {
        let n = norm_eval(norm, x)?;
        if (n - 1.0).abs() > METRIC_TOL {
            return Err(Error::Structural(format!("sample point {i} has norm {n}, not 1")));
        }
        let neg = scale(x, -1.0);
        if !sample.iter().any(|y| linalg::close(y, &neg, 1e-9)) {
            return Err(Error::Structural(format!("sample is not symmetric: -x missing for {i}")));
        }
        for (j, y) in sample.iter().enumerate().skip(i + 1) {
            if linalg::close(x, y, 1e-9) {
                return Err(Error::Structural(format!("sample points {i} and {j} coincide")));
            }
        }
    }

    let mut vertices: Vec<KadetsVertex> =
        (0..sample.len()).map(KadetsVertex::Sphere).collect();
    let mut labels: Vec<String> = (0..sample.len()).map(|i| format!("x{i}")).collect();
    for f in subsets_up_to(sample.len(), s_max) {
        for &k in &f {
            labels.push(format!("p[{f:?},{k}]"));
            vertices.push(KadetsVertex::Peak { f: f.clone(), k });
        }
    }
    let index: BTreeMap<KadetsVertex, usize> =
        vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();

    let total = vertices.len();
    let mut dist = vec![vec![0.0; total]; total];
    let block_radius = |f: &[usize]| -> Result<f64> {
        let mut sum = vec![0.0; norm.dim()];
        for &k in f {
            sum = linalg::add(&sum, &sample[k]);
        }
        Ok(norm_eval(norm, &sum)? / f.len() as f64)
    };
    for a in 0..total {
        for b in (a + 1)..total {
            let v = match (&vertices[a], &vertices[b]) {
                (KadetsVertex::Sphere(i), KadetsVertex::Sphere(j)) => {
                    norm_eval(norm, &linalg::sub(&sample[*i], &sample[*j]))?
                }
                (KadetsVertex::Sphere(i), KadetsVertex::Peak { k, .. })
                | (KadetsVertex::Peak { k, .. }, KadetsVertex::Sphere(i)) => {
                    10.0 + norm_eval(norm, &linalg::sub(&sample[*i], &sample[*k]))?
                }
                (KadetsVertex::Peak { f, .. }, KadetsVertex::Peak { f: g, .. }) => {
                    if f == g {
                        15.0 + block_radius(f)?
                    } else {
                        20.0
                    }
                }
            };
            dist[a][b] = v;
            dist[b][a] = v;
        }
    }
    let space = FiniteMetricSpace::from_matrix(labels, dist, ClassBounds::none())?;
    let check = validate_metric(&space, &ClassBounds::none())?;
    if !check.is_valid() {
        return Err(Error::Assertion(format!(
            "kadets gadget failed metric validation: {:?}",
            check.violations[0]
        )));
    }
    Ok(KadetsGadget { space, vertices, sample: sample.to_vec(), s_max, norm: norm.clone(), index })
}

#[derive(Debug, Clone)]
pub struct KadetsPush {
    pub witness: Witness,
    /// Worst deviation observed in each of the four proof cases:
    /// sphere-sphere, sphere-peak, same-block peaks, cross-block peaks.
    pub case_deviation: [f64; 4],
}

/// Pushes a sphere-sample bijection satisfying the signed-sum audit
/// `| ||sum_F d_i x_i|| - ||sum_F d_i y_pi(i)|| | < 2 |F| eps` to the induced
/// vertex bijection of the gadgets, asserting distortion below `4 eps` with
/// all four case families measured separately.
pub fn kadets_push(
    pi: &Bijection,
    eps: f64,
    gx: &KadetsGadget,
    gy: &KadetsGadget,
) -> Result<KadetsPush> {
    let n = gx.sample.len();
    if gy.sample.len() != n || pi.n() != n {
        return Err(Error::Domain("sample sizes do not match".into()));
    }
    if gx.s_max != gy.s_max {
        return Err(Error::Domain("gadgets have different subset budgets".into()));
    }
    // Signed-sum audit over every subset and sign pattern.
    for f in subsets_up_to(n, gx.s_max) {
        let card = f.len();
        for signs in 0u32..(1 << card) {
            let mut sx = vec![0.0; gx.norm.dim()];
            let mut sy = vec![0.0; gy.norm.dim()];
            for (pos, &i) in f.iter().enumerate() {
                let s = if signs & (1 << pos) != 0 { -1.0 } else { 1.0 };
                sx = linalg::add(&sx, &scale(&gx.sample[i], s));
                sy = linalg::add(&sy, &scale(&gy.sample[pi.apply(i)], s));
            }
            let gap = (norm_eval(&gx.norm, &sx)? - norm_eval(&gy.norm, &sy)?).abs();
            if gap >= 2.0 * card as f64 * eps {
                return Err(Error::Precondition(format!(
                    "signed-sum audit fails on F = {f:?}, sign mask {signs:b}: gap {gap} >= {}",
                    2.0 * card as f64 * eps
                )));
            }
        }
    }

    let mut perm = vec![0usize; gx.n()];
    for (a, v) in gx.vertices.iter().enumerate() {
        let target = match v {
            KadetsVertex::Sphere(i) => KadetsVertex::Sphere(pi.apply(*i)),
            KadetsVertex::Peak { f, k } => {
                let mut img: Vec<usize> = f.iter().map(|&i| pi.apply(i)).collect();
                img.sort_unstable();
                KadetsVertex::Peak { f: img, k: pi.apply(*k) }
            }
        };
        perm[a] = gy
            .vertex_index(&target)
            .ok_or_else(|| Error::Structural(format!("missing image vertex {target:?}")))?;
    }
    let bij = Bijection::new(perm)?;

    // Case-by-case deviations.
    let mut cases = [0.0f64; 4];
    for a in 0..gx.n() {
        for b in (a + 1)..gx.n() {
            let gap = (gx.space.d(a, b) - gy.space.d(bij.apply(a), bij.apply(b))).abs();
            let case = match (&gx.vertices[a], &gx.vertices[b]) {
                (KadetsVertex::Sphere(_), KadetsVertex::Sphere(_)) => 0,
                (KadetsVertex::Sphere(_), KadetsVertex::Peak { .. })
                | (KadetsVertex::Peak { .. }, KadetsVertex::Sphere(_)) => 1,
                (KadetsVertex::Peak { f, .. }, KadetsVertex::Peak { f: g, .. }) => {
                    if f == g {
                        2
                    } else {
                        3
                    }
                }
            };
            cases[case] = cases[case].max(gap);
        }
    }
    let dis = bijection_distortion(&gx.space, &gy.space, &bij)?;
    if dis >= 4.0 * eps + METRIC_TOL {
        return Err(Error::Assertion(format!(
            "pushed bijection has distortion {dis} >= 4 eps = {}",
            4.0 * eps
        )));
    }
    // The individual case bounds from the proof: 4eps, 4eps, 2eps, 0.
    let limits = [4.0 * eps, 4.0 * eps, 2.0 * eps, 0.0];
    for (c, (&got, &lim)) in cases.iter().zip(&limits).enumerate() {
        if got >= lim + METRIC_TOL {
            return Err(Error::Assertion(format!(
                "case {c} deviation {got} exceeds its bound {lim}"
            )));
        }
    }
    Ok(KadetsPush {
        witness: Witness {
            kind: WitnessKind::Gh,
            payload: WitnessPayload::Bijection(bij),
            quality: dis / 2.0,
        },
        case_deviation: cases,
    })
}

#[derive(Debug, Clone)]
pub struct KadetsPull {
    pub certificate: KadetsCertificate,
    /// Extracted sphere bijection.
    pub sphere_map: Bijection,
    /// Worst `||-phi(x) - phi(-x)||` over the sample (bound: 8 eps).
    pub near_symmetry_max: f64,
    /// Worst block-sum deviation over `4 eps |F|`.
    pub block_sum_ratio: f64,
}

#[derive(Debug, Clone)]
pub enum KadetsPullOutcome {
    Certificate(KadetsPull),
    Violated { condition: String, detail: String },
}

fn pairs_of(witness: &Witness) -> Result<Vec<(usize, usize)>> {
    match &witness.payload {
        WitnessPayload::Correspondence(c) => Ok(c.pairs.iter().copied().collect()),
        WitnessPayload::Bijection(b) => {
            Ok(b.perm.iter().enumerate().map(|(i, &j)| (i, j)).collect())
        }
        _ => Err(Error::Domain("kadets_pull expects a correspondence or bijection".into())),
    }
}

/// Pulls a GH witness on the gadgets (distortion below `2 eps`, `eps < 1`)
/// back to a Kadets certificate: verifies the structural dichotomy
/// (spheres pair with spheres, peaks with peaks block by block), extracts a
/// sphere bijection from the correspondence, checks the `4 eps |F|` subset
/// bounds and the `8 eps` near-symmetry, and finally samples the `16 eps`
/// tuple inequality. The returned certificate has `eps' = 17 eps`.
pub fn kadets_pull(
    gh: &Witness,
    eps: f64,
    gx: &KadetsGadget,
    gy: &KadetsGadget,
    tuple_trials: usize,
    seed: u64,
) -> Result<KadetsPullOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("kadets_pull requires 0 < eps < 1, got {eps}")));
    }
    let pairs = pairs_of(gh)?;
    // Distortion precondition.
    let mut dis = 0.0f64;
    for (a, &(x, y)) in pairs.iter().enumerate() {
        for &(x2, y2) in &pairs[a..] {
            dis = dis.max((gx.space.d(x, x2) - gy.space.d(y, y2)).abs());
        }
    }
    if dis >= 2.0 * eps {
        return Err(Error::Precondition(format!(
            "witness distortion {dis} is not below 2 eps = {}",
            2.0 * eps
        )));
    }

    // Structural dichotomy and block structure.
    let n = gx.sample.len();
    let mut sphere_edges: Vec<(usize, usize)> = Vec::new();
    let mut peak_map: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &pairs {
        match (&gx.vertices[a], &gy.vertices[b]) {
            (KadetsVertex::Sphere(i), KadetsVertex::Sphere(j)) => sphere_edges.push((*i, *j)),
            (KadetsVertex::Peak { .. }, KadetsVertex::Peak { .. }) => {
                if let Some(&prev) = peak_map.get(&a) {
                    if prev != b {
                        return Ok(KadetsPullOutcome::Violated {
                            condition: "peak-ambiguity".into(),
                            detail: format!("peak {a} has two distinct partners"),
                        });
                    }
                }
                peak_map.insert(a, b);
            }
            (va, vb) => {
                return Ok(KadetsPullOutcome::Violated {
                    condition: "dichotomy".into(),
                    detail: format!("{va:?} paired with {vb:?}"),
                });
            }
        }
    }
    // Peak pairing must be injective.
    {
        let mut seen = std::collections::BTreeSet::new();
        for &b in peak_map.values() {
            if !seen.insert(b) {
                return Ok(KadetsPullOutcome::Violated {
                    condition: "peak-ambiguity".into(),
                    detail: "two peaks share an image".into(),
                });
            }
        }
    }
    // Blocks map to blocks consistently.
    let mut block_map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (&a, &b) in &peak_map {
        let (KadetsVertex::Peak { f, .. }, KadetsVertex::Peak { f: g, .. }) =
            (&gx.vertices[a], &gy.vertices[b])
        else {
            unreachable!()
        };
        if let Some(prev) = block_map.get(f) {
            if prev != g {
                return Ok(KadetsPullOutcome::Violated {
                    condition: "block-structure".into(),
                    detail: format!("block {f:?} maps to both {prev:?} and {g:?}"),
                });
            }
        } else {
            if f.len() != g.len() {
                return Ok(KadetsPullOutcome::Violated {
                    condition: "block-structure".into(),
                    detail: format!("block {f:?} maps to {g:?} of different size"),
                });
            }
            block_map.insert(f.clone(), g.clone());
        }
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for g in block_map.values() {
            if !seen.insert(g.clone()) {
                return Ok(KadetsPullOutcome::Violated {
                    condition: "block-structure".into(),
                    detail: "two blocks share an image block".into(),
                });
            }
        }
    }

    // Extract a sphere bijection inside the correspondence (maximum
    // bipartite matching; it must be perfect).
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in &sphere_edges {
        adj[i].push(j);
    }
    let matching = perfect_matching(&adj, n);
    let Some(perm) = matching else {
        return Ok(KadetsPullOutcome::Violated {
            condition: "sphere-bijection".into(),
            detail: "no perfect matching of sphere points inside the correspondence".into(),
        });
    };
    let phi = Bijection::new(perm)?;

    // Subset sum bounds through the peak blocks: for F with phi_F the peak
    // index map, ||phi(x_k) - y_{phi_F(k)}|| < 2 eps and the block sums obey
    // the combined 4 eps |F| bound.
    let mut block_sum_ratio = 0.0f64;
    for (f, g) in &block_map {
        let card = f.len() as f64;
        let sum_x = f.iter().fold(vec![0.0; gx.norm.dim()], |acc, &k| {
            linalg::add(&acc, &gx.sample[k])
        });
        let sum_phi = f.iter().fold(vec![0.0; gy.norm.dim()], |acc, &k| {
            linalg::add(&acc, &gy.sample[phi.apply(k)])
        });
        let sum_g =
            g.iter().fold(vec![0.0; gy.norm.dim()], |acc, &k| linalg::add(&acc, &gy.sample[k]));
        let nx = norm_eval(&gx.norm, &sum_x)?;
        let ng = norm_eval(&gy.norm, &sum_g)?;
        let nphi = norm_eval(&gy.norm, &sum_phi)?;
        if (nx - ng).abs() >= 2.0 * eps * card + METRIC_TOL {
            return Ok(KadetsPullOutcome::Violated {
                condition: "block-sum".into(),
                detail: format!(
                    "| ||sum_F x|| - ||sum_phi(F) y|| | = {} >= 2 eps |F|",
                    (nx - ng).abs()
                ),
            });
        }
        if (nx - nphi).abs() >= 4.0 * eps * card + METRIC_TOL {
            return Ok(KadetsPullOutcome::Violated {
                condition: "combined-sum".into(),
                detail: format!(
                    "| ||sum_F x|| - ||sum_F phi(x)|| | = {} >= 4 eps |F|",
                    (nx - nphi).abs()
                ),
            });
        }
        block_sum_ratio = block_sum_ratio.max((nx - nphi).abs() / (4.0 * eps * card));
    }

    // Near-symmetry of the extracted bijection.
    let mut near_symmetry_max = 0.0f64;
    for (i, x) in gx.sample.iter().enumerate() {
        let neg = scale(x, -1.0);
        let Some(i_neg) = gx.sample.iter().position(|y| linalg::close(y, &neg, 1e-9)) else {
            return Ok(KadetsPullOutcome::Violated {
                condition: "sample-symmetry".into(),
                detail: format!("sample point {i} has no negation"),
            });
        };
        let v = linalg::add(
            &scale(&gy.sample[phi.apply(i)], -1.0),
            &scale(&gy.sample[phi.apply(i_neg)], -1.0),
        );
        let gap = norm_eval(&gy.norm, &v)?;
        near_symmetry_max = near_symmetry_max.max(gap);
        if gap >= 8.0 * eps + METRIC_TOL {
            return Ok(KadetsPullOutcome::Violated {
                condition: "near-symmetry".into(),
                detail: format!("||-phi(x_{i}) - phi(-x_{i})|| = {gap} >= 8 eps"),
            });
        }
    }

    // Certificate with the Lemma's constants: eps' = 17 eps, delta' = eps,
    // so the tuple constant eps' - delta' is exactly 16 eps. The sampled
    // check is falsification-only.
    let generators: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .map(|i| (gx.sample[i].clone(), gy.sample[phi.apply(i)].clone()))
        .collect();
    let certificate =
        KadetsCertificate { generators, eps: 17.0 * eps, delta: eps };
    if !kadets_certificate_check(&certificate, &gx.norm, &gy.norm, tuple_trials, seed)? {
        return Ok(KadetsPullOutcome::Violated {
            condition: "tuple-inequality".into(),
            detail: format!("sampled 16 eps tuple inequality fails (eps = {eps})"),
        });
    }

    Ok(KadetsPullOutcome::Certificate(KadetsPull {
        certificate,
        sphere_map: phi,
        near_symmetry_max,
        block_sum_ratio,
    }))
}

/// Kuhn's augmenting-path matching; returns a perfect left-to-right
/// assignment if one exists.
fn perfect_matching(adj: &[Vec<usize>], n: usize) -> Option<Vec<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    fn try_augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if match_right[v].is_none()
                    || try_augment(match_right[v].unwrap(), adj, seen, match_right)
                {
                    match_right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = vec![false; n];
        if !try_augment(u, adj, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (v, m) in match_right.iter().enumerate() {
        perm[(*m)?] = v;
    }
    Some(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::symmetric_sphere_sample;

    fn octagon_norm() -> NormSpec {
        // A symmetric polytopal norm in the plane.
        let mut functionals = Vec::new();
        for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.7, 0.7), (0.7, -0.7)] {
            functionals.push(vec![a, b]);
            functionals.push(vec![-a, -b]);
        }
        NormSpec::Polytopal { functionals, dim: 2 }
    }

    #[test]
    fn gadget_distances_match_the_formulas() {
        let n = octagon_norm();
        let sample = symmetric_sphere_sample(&n, 3, 5).unwrap();
        let g = kadets_gadget(&n, &sample, 2).unwrap();

        // Sphere distances are norm distances.
        let d01 = norm_eval(&n, &linalg::sub(&sample[0], &sample[1])).unwrap();
        assert!((g.space.d(0, 1) - d01).abs() < 1e-12);

        // Antipodal pair peak: F = {i, i_neg} sums to zero, so the peak
        // pair distance is exactly 15.
        let i_neg = sample
            .iter()
            .position(|y| linalg::close(y, &scale(&sample[0], -1.0), 1e-12))
            .unwrap();
        let f = if i_neg > 0 { vec![0, i_neg] } else { vec![i_neg, 0] };
        let p1 = g.vertex_index(&KadetsVertex::Peak { f: f.clone(), k: f[0] }).unwrap();
        let p2 = g.vertex_index(&KadetsVertex::Peak { f: f.clone(), k: f[1] }).unwrap();
        assert!((g.space.d(p1, p2) - 15.0).abs() < 1e-12);

        // Cross-block distance is 20; sphere-peak is 10 + gap.
        let other = g
            .vertex_index(&KadetsVertex::Peak { f: vec![1], k: 1 })
            .unwrap();
        assert!((g.space.d(p1, other) - 20.0).abs() < 1e-12);
        let sp = g.space.d(0, p1);
        assert!((sp - (10.0 + norm_eval(&n, &linalg::sub(&sample[0], &sample[f[0]])).unwrap()))
            .abs()
            < 1e-12);
    }

    #[test]
    fn identity_push_gives_zero_distortion() {
        let n = octagon_norm();
        let sample = symmetric_sphere_sample(&n, 3, 5).unwrap();
        let g = kadets_gadget(&n, &sample, 2).unwrap();
        let pi = Bijection::identity(sample.len());
        let push = kadets_push(&pi, 1e-9, &g, &g).unwrap();
        assert_eq!(push.witness.quality, 0.0);
        assert!(push.case_deviation.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn push_rejects_an_unrelated_pairing() {
        let n = octagon_norm();
        let sample = symmetric_sphere_sample(&n, 3, 5).unwrap();
        let g = kadets_gadget(&n, &sample, 2).unwrap();
        // Swapping a point with a non-antipodal one breaks the signed-sum
        // audit at tiny eps.
        let mut perm: Vec<usize> = (0..sample.len()).collect();
        perm.swap(0, 2);
        let pi = Bijection::new(perm).unwrap();
        match kadets_push(&pi, 1e-6, &g, &g) {
            Err(Error::Precondition(_)) => {}
            other => panic!("expected audit failure, got {other:?}"),
        }
    }

    #[test]
    fn pull_round_trip_from_identity_push() {
        let n = octagon_norm();
        let sample = symmetric_sphere_sample(&n, 3, 5).unwrap();
        let g = kadets_gadget(&n, &sample, 2).unwrap();
        let pi = Bijection::identity(sample.len());
        let push = kadets_push(&pi, 1e-9, &g, &g).unwrap();
        let eps = push.witness.quality + 1e-9;
        match kadets_pull(&push.witness, eps, &g, &g, 300, 7).unwrap() {
            KadetsPullOutcome::Certificate(pull) => {
                assert!(pull.near_symmetry_max < 8.0 * eps);
                assert_eq!(pull.certificate.eps, 17.0 * eps);
                assert_eq!(pull.certificate.delta, eps);
                assert_eq!(pull.sphere_map.perm, pi.perm);
            }
            KadetsPullOutcome::Violated { condition, detail } => {
                panic!("round trip violated {condition}: {detail}")
            }
        }
    }

    #[test]
    fn pull_rejects_sphere_to_peak_pairing() {
        let n = octagon_norm();
        let sample = symmetric_sphere_sample(&n, 3, 5).unwrap();
        let g = kadets_gadget(&n, &sample, 2).unwrap();
        // Relating a sphere point to a peak shifts distances by ~10, which
        // either trips the distortion precondition or, with a generous eps,
        // the dichotomy check. Both are valid rejections.
        let mut perm: Vec<usize> = (0..g.n()).collect();
        let peak0 = g
            .vertices
            .iter()
            .position(|v| matches!(v, KadetsVertex::Peak { .. }))
            .unwrap();
        perm.swap(0, peak0);
        let w = Witness {
            kind: WitnessKind::Gh,
            payload: WitnessPayload::Bijection(Bijection::new(perm).unwrap()),
            quality: f64::NAN,
        };
        match kadets_pull(&w, 0.99, &g, &g, 50, 1) {
            Err(Error::Precondition(_)) => {}
            Ok(KadetsPullOutcome::Violated { condition, .. }) => {
                assert_eq!(condition, "dichotomy");
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
