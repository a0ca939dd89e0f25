//! The Banach-Mazur gadget: a capped graph metric over a finite vector set
//! whose path chains encode the norm of each pairwise difference, whose
//! scalar chains encode rational multiplication and whose addition triangles
//! encode vector sums. A linear isomorphism between the norms induces a
//! bi-Lipschitz vertex bijection (push); conversely a vertex bijection with
//! Lipschitz constants below 4/3 pins down a map on vectors whose norm
//! ratios are controlled pair by pair (pull).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, matvec};
use crate::norm::{norm_eval, operator_norm, NormSpec};
use crate::space::{
    graph_metric_capped, Bijection, FiniteMetricSpace, Witness, WitnessKind, WitnessPayload,
    METRIC_TOL,
};

const CAP: f64 = 15.0;
const VEC_EDGE: f64 = 15.0;
const ADD_EDGE: f64 = 5.0;
const SCALAR_HEAD: f64 = 7.0;
const SCALAR_EDGE: f64 = 10.0;
/// `K^m_{a,b}` lives in [2,3]; the informative window is (2, 9/4).
const K_LO: f64 = 2.0;
const K_HI: f64 = 3.0;
const WINDOW_HI: f64 = 2.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Rational { num, den }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Default rational universe `{-1, 1/2, 2}`; the coding assigns chain
/// length 2 + index to each rational, so chain lengths identify rationals.
pub fn default_rationals() -> Vec<Rational> {
    vec![Rational::new(-1, 1), Rational::new(1, 2), Rational::new(2, 1)]
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum BmVertex {
    /// A vector of the truncation.
    Vec(usize),
    /// `k`-th interior point of the m-chain between the canonical pair
    /// (lo, hi), `1 <= k <= m`.
    Path { lo: usize, hi: usize, m: usize, k: usize },
    /// `j`-th interior point of the scalar chain from vector `a` towards
    /// `q * a`, `1 <= j <= pi(q)`.
    Scalar { a: usize, rat: usize, j: usize },
    /// Corner `i` of the addition triangle of the canonical pair (lo, hi),
    /// `1 <= i <= 3`.
    Add { lo: usize, hi: usize, i: u8 },
}

/// Which chains and triangles the truncation carries. Instances reference
/// vector indices; endpoints (`q * a`, `a + b`) must be present in the
/// vector list or the build fails listing the missing vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BmGadgetConfig {
    pub rationals: Vec<Rational>,
    /// `c_m` for m = 7, 8, ...; every pair difference norm should land in
    /// the window (2, 9/4) for some m (see [`covering_constants`]).
    pub c_consts: Vec<f64>,
    /// (vector index, rational index) scalar-chain instances.
    pub scalars: Vec<(usize, usize)>,
    /// (i, j) addition-triangle instances with i < j as vector indices.
    pub adds: Vec<(usize, usize)>,
}

/// Finds `target` in the vector list within tolerance.
pub fn find_vector(vectors: &[Vec<f64>], target: &[f64]) -> Option<usize> {
    vectors.iter().position(|v| linalg::close(v, target, 1e-9))
}

/// Scans the vector list for every scalar multiple and pairwise sum present
/// in it, producing the instance lists for [`BmGadgetConfig`].
pub fn detect_instances(
    vectors: &[Vec<f64>],
    rationals: &[Rational],
) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let mut scalars = Vec::new();
    for (a, v) in vectors.iter().enumerate() {
        for (ri, q) in rationals.iter().enumerate() {
            let target = linalg::scale(v, q.value());
            if let Some(t) = find_vector(vectors, &target) {
                if t != a {
                    scalars.push((a, ri));
                }
            }
        }
    }
    let mut adds = Vec::new();
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            let sum = linalg::add(&vectors[i], &vectors[j]);
            if find_vector(vectors, &sum).is_some() {
                adds.push((i, j));
            }
        }
    }
    (scalars, adds)
}

/// Chooses constants `c_m = 2.118 / v_m` over a geometric net `v_m` of the
/// realized values, so every value r has some m with `c_m * r` strictly
/// inside (2, 9/4). Indices start at m = 7.
pub fn covering_constants(values: &[f64]) -> Result<Vec<f64>> {
    let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 1e-12).collect();
    if positive.is_empty() {
        return Err(Error::Domain("no positive values to cover".into()));
    }
    let lo = positive.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = positive.iter().cloned().fold(0.0f64, f64::max);
    let mut net = Vec::new();
    let mut v = lo * 0.95;
    while v <= hi * 1.06 {
        net.push(v);
        v *= 1.11;
    }
    let consts: Vec<f64> = net.iter().map(|v| 2.118 / v).collect();
    for &r in &positive {
        let covered = consts.iter().any(|c| {
            let k = c * r;
            k > K_LO && k < WINDOW_HI
        });
        if !covered {
            return Err(Error::Assertion(format!("value {r} not covered by the constant net")));
        }
    }
    Ok(consts)
}

#[derive(Debug, Clone)]
pub struct BmGadget {
    pub space: FiniteMetricSpace,
    pub vertices: Vec<BmVertex>,
    pub vectors: Vec<Vec<f64>>,
    pub norm: NormSpec,
    pub cfg: BmGadgetConfig,
    index: BTreeMap<BmVertex, usize>,
}

impl BmGadget {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, v: &BmVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Canonical (lo, hi) ordering of a vector pair: lexicographic on
    /// coordinates.
    pub fn canonical_pair(&self, a: usize, b: usize) -> (usize, usize) {
        if lex_less(&self.vectors[a], &self.vectors[b]) {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Edge weight of the m-chain of the pair (a, b).
    pub fn chain_weight(&self, a: usize, b: usize, m: usize) -> Result<f64> {
        let c = self.cfg.c_consts[m - 7];
        let diff = linalg::sub(&self.vectors[a], &self.vectors[b]);
        Ok((c * norm_eval(&self.norm, &diff)?).clamp(K_LO, K_HI))
    }

    /// Vertices recognized as vector points by the degree criterion: at
    /// least 3 other vertices within distance 3.
    pub fn degree_criterion_set(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&x| {
                let close = (0..self.n())
                    .filter(|&y| y != x && self.space.d(x, y) <= 3.0 + METRIC_TOL)
                    .count();
                close >= 3
            })
            .collect()
    }

    /// Ground truth for the degree criterion audit.
    pub fn vec_vertex_indices(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&x| matches!(self.vertices[x], BmVertex::Vec(_)))
            .collect()
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return x < y;
        }
    }
    false
}

/// Builds the gadget metric space for a norm over a finite vector set.
/// Structure: vector-to-vector edges of weight 15; for every canonical pair
/// and every m an (m+1)-edge chain of weight `max{2, min{3, c_m nu(a-b)}}`;
/// a 7-then-10s chain for every scalar instance; a five-edge triangle for
/// every addition instance. The metric is the greatest extension of the edge
/// weights bounded by 15.
pub fn bm_gadget(
    norm: &NormSpec,
    vectors: &[Vec<f64>],
    cfg: &BmGadgetConfig,
) -> Result<BmGadget> {
    norm.validate()?;
    let dim = norm.dim();
    if vectors.is_empty() {
        return Err(Error::Domain("empty vector set".into()));
    }
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::Structural(format!("vector {i} has wrong dimension")));
        }
        for w in &vectors[i + 1..] {
            if linalg::close(v, w, 1e-9) {
                return Err(Error::Structural(format!("vectors are not pairwise distinct: {v:?}")));
            }
        }
    }
    if cfg.c_consts.is_empty() {
        return Err(Error::Domain("no chain constants configured".into()));
    }
    // Demanded instances must close inside the vector list.
    let mut missing: Vec<String> = Vec::new();
    let mut scalar_targets = Vec::new();
    for &(a, ri) in &cfg.scalars {
        let q = cfg.rationals[ri];
        let target = linalg::scale(&vectors[a], q.value());
        match find_vector(vectors, &target) {
            Some(t) => scalar_targets.push(t),
            None => missing.push(format!("{} * v{a} = {target:?}", q)),
        }
    }
    let mut add_targets = Vec::new();
    for &(i, j) in &cfg.adds {
        let sum = linalg::add(&vectors[i], &vectors[j]);
        match find_vector(vectors, &sum) {
            Some(t) => add_targets.push(t),
            None => missing.push(format!("v{i} + v{j} = {sum:?}")),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Structural(format!(
            "vector set is not closed under the demanded operations; missing: {}",
            missing.join(", ")
        )));
    }

    let nv = vectors.len();
    let mut vertices: Vec<BmVertex> = (0..nv).map(BmVertex::Vec).collect();
    let mut labels: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let ms: Vec<usize> = (0..cfg.c_consts.len()).map(|i| 7 + i).collect();

    let canonical = |a: usize, b: usize| -> (usize, usize) {
        if lex_less(&vectors[a], &vectors[b]) {
            (a, b)
        } else {
            (b, a)
        }
    };

    for i in 0..nv {
        for j in (i + 1)..nv {
            let (lo, hi) = canonical(i, j);
            for &m in &ms {
                for k in 1..=m {
                    vertices.push(BmVertex::Path { lo, hi, m, k });
                    labels.push(format!("p[{lo},{hi}]m{m}k{k}"));
                }
            }
        }
    }
    for &(a, ri) in &cfg.scalars {
        let pi_q = 2 + ri; // chain-length coding of the rational
        for j in 1..=pi_q {
            vertices.push(BmVertex::Scalar { a, rat: ri, j });
            labels.push(format!("f[v{a}]q({})j{j}", cfg.rationals[ri]));
        }
    }
    for &(i, j) in &cfg.adds {
        let (lo, hi) = canonical(i, j);
        for corner in 1..=3u8 {
            vertices.push(BmVertex::Add { lo, hi, i: corner });
            labels.push(format!("x[{lo},{hi}]i{corner}"));
        }
    }

    let index: BTreeMap<BmVertex, usize> =
        vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let at = |v: &BmVertex| -> usize { index[v] };

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..nv {
        for j in (i + 1)..nv {
            edges.push((i, j, VEC_EDGE));
        }
    }
    for i in 0..nv {
        for j in (i + 1)..nv {
            let (lo, hi) = canonical(i, j);
            let diff = linalg::sub(&vectors[lo], &vectors[hi]);
            let nd = norm_eval(norm, &diff)?;
            for (mi, &c) in cfg.c_consts.iter().enumerate() {
                let m = 7 + mi;
                let w = (c * nd).clamp(K_LO, K_HI);
                let mut prev = lo;
                for k in 1..=m {
                    let cur = at(&BmVertex::Path { lo, hi, m, k });
                    edges.push((prev, cur, w));
                    prev = cur;
                }
                edges.push((prev, hi, w));
            }
        }
    }
    for (si, &(a, ri)) in cfg.scalars.iter().enumerate() {
        let pi_q = 2 + ri;
        let target = scalar_targets[si];
        let mut prev = a;
        for j in 1..=pi_q {
            let cur = at(&BmVertex::Scalar { a, rat: ri, j });
            edges.push((prev, cur, if j == 1 { SCALAR_HEAD } else { SCALAR_EDGE }));
            prev = cur;
        }
        edges.push((prev, target, SCALAR_EDGE));
    }
    for (ai, &(i, j)) in cfg.adds.iter().enumerate() {
        let (lo, hi) = canonical(i, j);
        let target = add_targets[ai];
        let x1 = at(&BmVertex::Add { lo, hi, i: 1 });
        let x2 = at(&BmVertex::Add { lo, hi, i: 2 });
        let x3 = at(&BmVertex::Add { lo, hi, i: 3 });
        edges.push((lo, x1, ADD_EDGE));
        edges.push((hi, x2, ADD_EDGE));
        edges.push((x1, x3, ADD_EDGE));
        edges.push((x2, x3, ADD_EDGE));
        edges.push((x3, target, ADD_EDGE));
    }

    let space = graph_metric_capped(labels, &edges, CAP)?;
    Ok(BmGadget {
        space,
        vertices,
        vectors: vectors.to_vec(),
        norm: norm.clone(),
        cfg: cfg.clone(),
        index,
    })
}

/// Measured Lipschitz constants of a vertex bijection between two gadgets.
pub fn gadget_lipschitz(
    g_nu: &BmGadget,
    g_lam: &BmGadget,
    t: &Bijection,
) -> Result<(f64, f64)> {
    let n = g_nu.n();
    if t.n() != n || g_lam.n() != n {
        return Err(Error::Structural("bijection/gadget size mismatch".into()));
    }
    let mut lip = 0.0f64;
    let mut lip_inv = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            let dn = g_nu.space.d(x, y);
            let dl = g_lam.space.d(t.apply(x), t.apply(y));
            lip = lip.max(dl / dn);
            lip_inv = lip_inv.max(dn / dl);
        }
    }
    Ok((lip, lip_inv))
}

#[derive(Debug, Clone)]
pub struct BmPush {
    pub witness: Witness,
    pub lip: f64,
    pub lip_inv: f64,
    pub op_norm: f64,
    pub op_norm_exact: bool,
}

/// Pushes a linear map `t` that carries the nu-vector set bijectively onto
/// the lambda-vector set to the induced vertex bijection, with the
/// orientation-correcting relabeling of path chains and addition triangles.
/// Asserts `Lip(T') <= max{1, ||T||}` (plus mesh slack when the operator
/// norm is an estimate).
pub fn bm_gadget_push(t: &[Vec<f64>], g_nu: &BmGadget, g_lam: &BmGadget) -> Result<BmPush> {
    if g_nu.cfg != g_lam.cfg {
        return Err(Error::Domain("gadgets were built with different configurations".into()));
    }
    let nv = g_nu.vectors.len();
    if g_lam.vectors.len() != nv {
        return Err(Error::Domain("vector sets have different sizes".into()));
    }
    // Vector-level bijection induced by t.
    let mut img = Vec::with_capacity(nv);
    for v in &g_nu.vectors {
        let tv = matvec(t, v);
        match find_vector(&g_lam.vectors, &tv) {
            Some(w) => img.push(w),
            None => {
                return Err(Error::Domain(format!(
                    "T is not closed on the vector set: T{v:?} = {tv:?} is missing"
                )))
            }
        }
    }
    {
        let mut seen = vec![false; nv];
        for &w in &img {
            if seen[w] {
                return Err(Error::Domain("T does not map the vector set bijectively".into()));
            }
            seen[w] = true;
        }
    }

    let perm = induced_vertex_map(g_nu, g_lam, &img)?;
    let bij = Bijection::new(perm)?;
    let (lip, lip_inv) = gadget_lipschitz(g_nu, g_lam, &bij)?;
    let (op, exact) = operator_norm(&g_nu.norm, &g_lam.norm, t)?;
    let slack = if exact { METRIC_TOL } else { METRIC_TOL + 1e-3 };
    if lip > op.max(1.0) + slack {
        return Err(Error::Assertion(format!(
            "Lip(T') = {lip} exceeds max(1, ||T||) = {}",
            op.max(1.0)
        )));
    }
    let quality = lip.max(lip_inv).ln();
    Ok(BmPush {
        witness: Witness {
            kind: WitnessKind::Lip,
            payload: WitnessPayload::Bijection(bij),
            quality,
        },
        lip,
        lip_inv,
        op_norm: op,
        op_norm_exact: exact,
    })
}

/// The vertex bijection induced by a vector-index bijection `img`,
/// relabeling chain positions when the canonical orientation flips.
fn induced_vertex_map(g_nu: &BmGadget, g_lam: &BmGadget, img: &[usize]) -> Result<Vec<usize>> {
    let mut perm = Vec::with_capacity(g_nu.n());
    for v in &g_nu.vertices {
        let target = match *v {
            BmVertex::Vec(a) => BmVertex::Vec(img[a]),
            BmVertex::Path { lo, hi, m, k } => {
                let (a, b) = (img[lo], img[hi]);
                let (l2, h2) = g_lam.canonical_pair(a, b);
                if (l2, h2) == (a, b) {
                    BmVertex::Path { lo: l2, hi: h2, m, k }
                } else {
                    BmVertex::Path { lo: l2, hi: h2, m, k: m + 1 - k }
                }
            }
            BmVertex::Scalar { a, rat, j } => BmVertex::Scalar { a: img[a], rat, j },
            BmVertex::Add { lo, hi, i } => {
                let (a, b) = (img[lo], img[hi]);
                let (l2, h2) = g_lam.canonical_pair(a, b);
                if (l2, h2) == (a, b) {
                    BmVertex::Add { lo: l2, hi: h2, i }
                } else {
                    let flipped = match i {
                        1 => 2,
                        2 => 1,
                        other => other,
                    };
                    BmVertex::Add { lo: l2, hi: h2, i: flipped }
                }
            }
        };
        let idx = g_lam.vertex_index(&target).ok_or_else(|| {
            Error::Domain(format!("image vertex {target:?} does not exist in the target gadget"))
        })?;
        perm.push(idx);
    }
    Ok(perm)
}

#[derive(Debug, Clone, Serialize)]
pub struct BmPull {
    /// Extracted map on vector indices (nu-vectors to lambda-vectors).
    pub vector_map: Vec<usize>,
    /// `2 log max{Lip(T), Lip(T^-1)}`, the Banach-Mazur bound.
    pub bound: f64,
    pub lip: f64,
    pub lip_inv: f64,
    /// Pairs (as canonical index pairs) whose norm ratio was certified via a
    /// chain weight in the informative window.
    pub covered_pairs: Vec<(usize, usize)>,
    /// Pairs with no constant in the window; their ratio is not certified.
    pub uncovered_pairs: Vec<(usize, usize)>,
    pub homogeneity_instances: usize,
    pub additivity_instances: usize,
}

#[derive(Debug, Clone, Serialize)]
pub enum BmPullOutcome {
    Extracted(BmPull),
    /// The truncation does not determine an extraction (degree criterion or
    /// chain structure ambiguous); never a wrong extraction.
    Inconclusive { reason: String },
}

/// Extracts the vector map from a vertex bijection with `max Lip < 4/3`,
/// verifies rational homogeneity and additivity on every gadget-covered
/// instance, and certifies the norm-ratio bounds
/// `lambda(Sa - Sb) <= Lip(T) nu(a - b)` for every pair covered by a chain
/// constant in the window (2, 9/4).
pub fn bm_gadget_pull(
    t: &Bijection,
    g_nu: &BmGadget,
    g_lam: &BmGadget,
) -> Result<BmPullOutcome> {
    let (lip, lip_inv) = gadget_lipschitz(g_nu, g_lam, t)?;
    if !(lip < 4.0 / 3.0 && lip_inv < 4.0 / 3.0) {
        return Err(Error::Precondition(format!(
            "bm_gadget_pull requires Lip < 4/3 both ways, got {lip} and {lip_inv}"
        )));
    }
    // Degree-criterion audit on both gadgets.
    for (name, g) in [("source", g_nu), ("target", g_lam)] {
        if g.degree_criterion_set() != g.vec_vertex_indices() {
            return Ok(BmPullOutcome::Inconclusive {
                reason: format!("degree criterion is ambiguous on the {name} gadget"),
            });
        }
    }
    // T must map vector vertices onto vector vertices.
    let nv = g_nu.vectors.len();
    let mut vector_map = vec![usize::MAX; nv];
    for (x, v) in g_nu.vertices.iter().enumerate() {
        if let BmVertex::Vec(a) = v {
            match g_lam.vertices[t.apply(x)] {
                BmVertex::Vec(b) => vector_map[*a] = b,
                ref other => {
                    return Ok(BmPullOutcome::Inconclusive {
                        reason: format!("vector vertex v{a} maps to non-vector {other:?}"),
                    })
                }
            }
        }
    }
    {
        let mut seen = vec![false; nv];
        for &b in &vector_map {
            if b == usize::MAX || seen[b] {
                return Ok(BmPullOutcome::Inconclusive {
                    reason: "vector vertices do not map bijectively".into(),
                });
            }
            seen[b] = true;
        }
    }

    // Chain preservation: the whole vertex bijection must agree with the one
    // induced by the vector map.
    let expected = induced_vertex_map(g_nu, g_lam, &vector_map)?;
    for (x, (&got, &want)) in t.perm.iter().zip(&expected).enumerate() {
        if got != want {
            return Ok(BmPullOutcome::Inconclusive {
                reason: format!(
                    "chain structure not preserved at {:?}: got {:?}, expected {:?}",
                    g_nu.vertices[x], g_lam.vertices[got], g_lam.vertices[want]
                ),
            });
        }
    }

    // Rational homogeneity on every scalar instance: S(q a) = q S(a).
    let mut homogeneity = 0;
    for &(a, ri) in &g_nu.cfg.scalars {
        let q = g_nu.cfg.rationals[ri].value();
        let lhs_idx = find_vector(&g_nu.vectors, &linalg::scale(&g_nu.vectors[a], q))
            .expect("validated at build time");
        let lhs = &g_lam.vectors[vector_map[lhs_idx]];
        let rhs = linalg::scale(&g_lam.vectors[vector_map[a]], q);
        if !linalg::close(lhs, &rhs, 1e-9) {
            return Ok(BmPullOutcome::Inconclusive {
                reason: format!("homogeneity fails on instance ({a}, {q}): S(qa) != q S(a)"),
            });
        }
        homogeneity += 1;
    }
    // Additivity on every addition instance: S(a + b) = S(a) + S(b).
    let mut additivity = 0;
    for &(i, j) in &g_nu.cfg.adds {
        let sum_idx = find_vector(&g_nu.vectors, &linalg::add(&g_nu.vectors[i], &g_nu.vectors[j]))
            .expect("validated at build time");
        let lhs = &g_lam.vectors[vector_map[sum_idx]];
        let rhs = linalg::add(&g_lam.vectors[vector_map[i]], &g_lam.vectors[vector_map[j]]);
        if !linalg::close(lhs, &rhs, 1e-9) {
            return Ok(BmPullOutcome::Inconclusive {
                reason: format!("additivity fails on instance ({i}, {j}): S(a+b) != S(a)+S(b)"),
            });
        }
        additivity += 1;
    }

    // Norm-ratio certification per covered pair.
    let mut covered = Vec::new();
    let mut uncovered = Vec::new();
    for i in 0..nv {
        for j in (i + 1)..nv {
            let (lo, hi) = g_nu.canonical_pair(i, j);
            let nd = norm_eval(&g_nu.norm, &linalg::sub(&g_nu.vectors[lo], &g_nu.vectors[hi]))?;
            let ld = norm_eval(
                &g_lam.norm,
                &linalg::sub(&g_lam.vectors[vector_map[lo]], &g_lam.vectors[vector_map[hi]]),
            )?;
            // Forward certification needs a window constant for the nu
            // value, the reverse one for the lambda value.
            let fwd = g_nu.cfg.c_consts.iter().any(|&c| c * nd > K_LO && c * nd < WINDOW_HI);
            let bwd = g_nu.cfg.c_consts.iter().any(|&c| c * ld > K_LO && c * ld < WINDOW_HI);
            if fwd && ld > lip * nd + METRIC_TOL {
                return Err(Error::Assertion(format!(
                    "ratio bound fails on pair ({lo},{hi}): lambda = {ld} > Lip * nu = {}",
                    lip * nd
                )));
            }
            if bwd && nd > lip_inv * ld + METRIC_TOL {
                return Err(Error::Assertion(format!(
                    "reverse ratio bound fails on pair ({lo},{hi}): nu = {nd} > Lip' * lambda = {}",
                    lip_inv * ld
                )));
            }
            if fwd && bwd {
                covered.push((lo, hi));
            } else {
                uncovered.push((lo, hi));
            }
        }
    }

    Ok(BmPullOutcome::Extracted(BmPull {
        vector_map,
        bound: 2.0 * lip.max(lip_inv).ln(),
        lip,
        lip_inv,
        covered_pairs: covered,
        uncovered_pairs: uncovered,
        homogeneity_instances: homogeneity,
        additivity_instances: additivity,
    }))
}
