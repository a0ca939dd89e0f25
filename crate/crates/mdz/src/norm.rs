//! Finite-dimensional normed spaces: norm specifications and evaluation,
//! Banach-Mazur upper bounds by local search over operators, and the Kadets
//! glue-norm machinery built from Q-homogeneous correspondences.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm2};
use crate::linprog;
use crate::space::{Witness, WitnessKind, WitnessPayload, METRIC_TOL};

/// The sandwich constant of the renorm family: `||x||_2 <= ||x||_f <=
/// (200/199) ||x||_2`.
pub const RENORM_SANDWICH: f64 = 200.0 / 199.0;

/// Exponent of an l_p norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExp {
    Finite(f64),
    Inf,
}

/// A finite-dimensional norm given one of three ways: an l_p norm, a
/// polytopal norm (max of absolute values of functionals), or a renorm of
/// l_2 that boosts selected coordinate pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpecJson", into = "NormSpecJson")]
pub enum NormSpec {
    Lp {
        p: PExp,
        dim: usize,
    },
    Polytopal {
        functionals: Vec<Vec<f64>>,
        dim: usize,
    },
    /// `||x||_f = sup(||x||_2, (1/sqrt 2)(alpha + delta f(n,m)) |x_n + x_m|)`
    /// over the stored pairs.
    Renorm {
        alpha: f64,
        delta: f64,
        pairs: BTreeMap<(usize, usize), f64>,
        dim: usize,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
enum NormSpecJson {
    Lp {
        p: serde_json::Value,
        dim: usize,
    },
    Polytopal {
        functionals: Vec<Vec<f64>>,
        dim: usize,
    },
    Renorm {
        alpha: f64,
        delta: f64,
        f: BTreeMap<String, f64>,
        dim: usize,
    },
}

impl TryFrom<NormSpecJson> for NormSpec {
    type Error = Error;
    fn try_from(j: NormSpecJson) -> Result<Self> {
        let spec = match j {
            NormSpecJson::Lp { p, dim } => {
                let p = match &p {
                    serde_json::Value::Number(n) => PExp::Finite(n.as_f64().unwrap()),
                    serde_json::Value::String(s) if s == "inf" => PExp::Inf,
                    other => {
                        return Err(Error::Value(format!("unsupported p exponent {other}")))
                    }
                };
                NormSpec::Lp { p, dim }
            }
            NormSpecJson::Polytopal { functionals, dim } => {
                NormSpec::Polytopal { functionals, dim }
            }
            NormSpecJson::Renorm { alpha, delta, f, dim } => {
                let mut pairs = BTreeMap::new();
                for (key, v) in f {
                    let mut it = key.split(',');
                    let parse = |s: Option<&str>| {
                        s.and_then(|t| t.trim().parse::<usize>().ok()).ok_or_else(|| {
                            Error::Value(format!("bad renorm pair key '{key}'"))
                        })
                    };
                    let n = parse(it.next())?;
                    let m = parse(it.next())?;
                    if it.next().is_some() || n == m {
                        return Err(Error::Value(format!("bad renorm pair key '{key}'")));
                    }
                    pairs.insert((n.min(m), n.max(m)), v);
                }
                NormSpec::Renorm { alpha, delta, pairs, dim }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<NormSpec> for NormSpecJson {
    fn from(s: NormSpec) -> Self {
        match s {
            NormSpec::Lp { p, dim } => NormSpecJson::Lp {
                p: match p {
                    PExp::Finite(v) => serde_json::json!(v),
                    PExp::Inf => serde_json::json!("inf"),
                },
                dim,
            },
            NormSpec::Polytopal { functionals, dim } => {
                NormSpecJson::Polytopal { functionals, dim }
            }
            NormSpec::Renorm { alpha, delta, pairs, dim } => NormSpecJson::Renorm {
                alpha,
                delta,
                f: pairs.into_iter().map(|((n, m), v)| (format!("{n},{m}"), v)).collect(),
                dim,
            },
        }
    }
}

impl NormSpec {
    pub fn l2(dim: usize) -> Self {
        NormSpec::Lp { p: PExp::Finite(2.0), dim }
    }

    pub fn linf(dim: usize) -> Self {
        NormSpec::Lp { p: PExp::Inf, dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::Lp { dim, .. }
            | NormSpec::Polytopal { dim, .. }
            | NormSpec::Renorm { dim, .. } => *dim,
        }
    }

    pub fn is_polytopal(&self) -> bool {
        matches!(self, NormSpec::Polytopal { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::Lp { p, dim } => {
                if *dim == 0 {
                    return Err(Error::Value("dim must be positive".into()));
                }
                if let PExp::Finite(v) = p {
                    if !v.is_finite() || *v < 1.0 {
                        return Err(Error::Value(format!("lp exponent must be >= 1, got {v}")));
                    }
                }
            }
            NormSpec::Polytopal { functionals, dim } => {
                if *dim == 0 || functionals.is_empty() {
                    return Err(Error::Value("polytopal norm needs functionals".into()));
                }
                for f in functionals {
                    if f.len() != *dim {
                        return Err(Error::Structural(format!(
                            "functional of length {} in dim {dim}",
                            f.len()
                        )));
                    }
                    if norm2(f) < 1e-12 {
                        return Err(Error::Value("zero functional".into()));
                    }
                }
                // Symmetric: every functional has its negation in the set.
                for f in functionals {
                    let neg: Vec<f64> = f.iter().map(|v| -v).collect();
                    let found = functionals.iter().any(|g| {
                        g.iter().zip(&neg).all(|(a, b)| (a - b).abs() <= 1e-9)
                    });
                    if !found {
                        return Err(Error::Value(
                            "polytopal functional set is not symmetric".into(),
                        ));
                    }
                }
                if linalg::rank(functionals) < *dim {
                    return Err(Error::Value(
                        "polytopal functionals do not span the dual (norm is degenerate)"
                            .into(),
                    ));
                }
            }
            NormSpec::Renorm { alpha, delta, pairs, dim } => {
                if !(1.0 < *alpha && *delta > 0.0 && alpha + delta <= RENORM_SANDWICH + 1e-15) {
                    return Err(Error::Value(format!(
                        "renorm constants need 1 < alpha < alpha+delta <= 200/199, got alpha={alpha}, delta={delta}"
                    )));
                }
                for (&(n, m), &v) in pairs {
                    if n >= m || m >= *dim {
                        return Err(Error::Structural(format!(
                            "renorm pair ({n},{m}) out of range for dim {dim}"
                        )));
                    }
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::Value(format!(
                            "renorm value f({n},{m}) = {v} outside [0,1]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Evaluates the norm at `x`.
pub fn norm_eval(spec: &NormSpec, x: &[f64]) -> Result<f64> {
    if x.len() != spec.dim() {
        return Err(Error::Structural(format!(
            "vector of length {} for norm of dim {}",
            x.len(),
            spec.dim()
        )));
    }
    Ok(match spec {
        NormSpec::Lp { p: PExp::Inf, .. } => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        NormSpec::Lp { p: PExp::Finite(p), .. } => {
            if (*p - 2.0).abs() < 1e-15 {
                norm2(x)
            } else if (*p - 1.0).abs() < 1e-15 {
                x.iter().map(|v| v.abs()).sum()
            } else {
                x.iter().map(|v| v.abs().powf(*p)).sum::<f64>().powf(1.0 / *p)
            }
        }
        NormSpec::Polytopal { functionals, .. } => {
            functionals.iter().fold(0.0f64, |m, f| m.max(dot(f, x).abs()))
        }
        NormSpec::Renorm { alpha, delta, pairs, .. } => {
            let mut best = norm2(x);
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            for (&(n, m), &f) in pairs {
                let term = inv_sqrt2 * (alpha + delta * f) * (x[n] + x[m]).abs();
                if term > best {
                    best = term;
                }
            }
            best
        }
    })
}

/// Checks the two-sided renorm sandwich on every sample vector.
pub fn renorm_sandwich_check(spec: &NormSpec, samples: &[Vec<f64>]) -> Result<bool> {
    if !matches!(spec, NormSpec::Renorm { .. }) {
        return Err(Error::Domain("sandwich check applies to renorm specs".into()));
    }
    for x in samples {
        let l2 = norm2(x);
        let nf = norm_eval(spec, x)?;
        if nf < l2 - METRIC_TOL || nf > RENORM_SANDWICH * l2 + METRIC_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The basis pair vector `e_{n,m} = (e_n + e_m) / sqrt 2`.
pub fn basis_pair_vector(dim: usize, n: usize, m: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[n] = std::f64::consts::FRAC_1_SQRT_2;
    v[m] = std::f64::consts::FRAC_1_SQRT_2;
    v
}

/// Euclidean distances among the vectors `±e_{n,m}`, computed from explicit
/// coordinates: pairs sharing one index are 1 apart (their sums have norm
/// sqrt 3), disjoint pairs are sqrt 2 apart under either sign. In particular
/// the family is 1-separated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisPairTable {
    pub diff_sharing: f64,
    pub sum_sharing: f64,
    pub diff_disjoint: f64,
    pub sum_disjoint: f64,
}

pub fn basis_pair_distances() -> BasisPairTable {
    let e01 = basis_pair_vector(4, 0, 1);
    let e12 = basis_pair_vector(4, 1, 2);
    let e23 = basis_pair_vector(4, 2, 3);
    let gap = |a: &[f64], b: &[f64], sign: f64| {
        norm2(&a.iter().zip(b).map(|(x, y)| x + sign * y).collect::<Vec<_>>())
    };
    BasisPairTable {
        diff_sharing: gap(&e01, &e12, -1.0),
        sum_sharing: gap(&e01, &e12, 1.0),
        diff_disjoint: gap(&e01, &e23, -1.0),
        sum_disjoint: gap(&e01, &e23, 1.0),
    }
}

/// Membership of a unit vector in the boosted cap `P_{n,m} = {x : ||x||_2 <=
/// (1/sqrt 2)(alpha + delta f(n,m)) (x_n + x_m)}`.
pub fn pnm_member(spec: &NormSpec, n: usize, m: usize, x: &[f64]) -> Result<bool> {
    let NormSpec::Renorm { alpha, delta, pairs, dim } = spec else {
        return Err(Error::Domain("pnm_member applies to renorm specs".into()));
    };
    if x.len() != *dim {
        return Err(Error::Structural("vector/norm dimension mismatch".into()));
    }
    let (lo, hi) = (n.min(m), n.max(m));
    let Some(&f) = pairs.get(&(lo, hi)) else {
        return Err(Error::Domain(format!("pair ({n},{m}) is not part of the renorm")));
    };
    let l2 = norm2(x);
    if (l2 - 1.0).abs() > METRIC_TOL {
        return Err(Error::Domain(format!("pnm_member requires a unit vector, got ||x|| = {l2}")));
    }
    let h = alpha + delta * f;
    Ok(l2 <= std::f64::consts::FRAC_1_SQRT_2 * h * (x[lo] + x[hi]) + METRIC_TOL)
}

/// The equivalent ball formulation of `P_{n,m}` membership for unit vectors:
/// distance to `e_{n,m}` at most `sqrt(2(h-1)/h)`.
pub fn pnm_ball_criterion(spec: &NormSpec, n: usize, m: usize, x: &[f64]) -> Result<bool> {
    let NormSpec::Renorm { alpha, delta, pairs, dim } = spec else {
        return Err(Error::Domain("pnm_ball_criterion applies to renorm specs".into()));
    };
    let (lo, hi) = (n.min(m), n.max(m));
    let Some(&f) = pairs.get(&(lo, hi)) else {
        return Err(Error::Domain(format!("pair ({n},{m}) is not part of the renorm")));
    };
    let h = alpha + delta * f;
    let e = basis_pair_vector(*dim, lo, hi);
    let gap = norm2(&x.iter().zip(&e).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(gap <= (2.0 * (h - 1.0) / h).sqrt() + METRIC_TOL)
}

// ---------------------------------------------------------------------------
// operator norms and the Banach-Mazur upper bound
// ---------------------------------------------------------------------------

/// Mesh sizes from the estimation contract: 4096 directions in dim 2,
/// 32768 in dim 3 and 4. Finer meshes extend these prefixes, so refining
/// never decreases an estimate.
fn mesh_len(dim: usize) -> usize {
    match dim {
        0 | 1 => 2,
        2 => 4096,
        _ => 32768,
    }
}

/// Deterministic unit-sphere direction sequence (fixed internal seed); the
/// first `count` entries of the infinite sequence.
pub fn sphere_mesh(dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0x6d647a_6d657368);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
        let n = norm2(&v);
        if n > 1e-6 {
            out.push(v.iter().map(|x| x / n).collect());
        }
    }
    out
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Operator norm of the matrix `t` from `(R^d, from)` to `(R^d, to)`.
/// Exact (via support-function LPs) when both norms are polytopal; otherwise
/// a mesh estimate with local polish, always a lower estimate of the true
/// norm. The flag reports which route was taken.
pub fn operator_norm(from: &NormSpec, to: &NormSpec, t: &[Vec<f64>]) -> Result<(f64, bool)> {
    operator_norm_with_mesh(from, to, t, mesh_len(from.dim()))
}

pub fn operator_norm_with_mesh(
    from: &NormSpec,
    to: &NormSpec,
    t: &[Vec<f64>],
    mesh_points: usize,
) -> Result<(f64, bool)> {
    let dim = from.dim();
    if to.dim() != dim || t.len() != dim || t.iter().any(|r| r.len() != dim) {
        return Err(Error::Structural("operator/norm dimension mismatch".into()));
    }
    if let (NormSpec::Polytopal { functionals: ff, .. }, NormSpec::Polytopal { functionals: tf, .. }) =
        (from, to)
    {
        // ||T|| = max over target functionals psi of the support function of
        // the source ball at T^t psi; each support value is a small LP over
        // x split into positive and negative parts.
        let mut best = 0.0f64;
        for psi in tf {
            let c_full = linalg::matvec_t(t, psi); // T^t psi
            let mut c = Vec::with_capacity(2 * dim);
            for v in &c_full {
                c.push(*v);
                c.push(-*v);
            }
            let mut a = Vec::with_capacity(ff.len());
            for phi in ff {
                let mut row = Vec::with_capacity(2 * dim);
                for v in phi {
                    row.push(*v);
                    row.push(-*v);
                }
                a.push(row);
            }
            let b = vec![1.0; ff.len()];
            let sol = linprog::solve_max_ub(&c, &a, &b)?;
            best = best.max(sol.objective);
        }
        return Ok((best, true));
    }

    let mesh = sphere_mesh(dim, mesh_points);
    let eval_dir = |dir: &[f64]| -> Result<f64> {
        let nf = norm_eval(from, dir)?;
        if nf < 1e-12 {
            return Ok(0.0);
        }
        let x: Vec<f64> = dir.iter().map(|v| v / nf).collect();
        norm_eval(to, &linalg::matvec(t, &x))
    };
    let mut best = 0.0f64;
    let mut best_dir = mesh[0].clone();
    for dir in &mesh {
        let v = eval_dir(dir)?;
        if v > best {
            best = v;
            best_dir = dir.clone();
        }
    }
    // Shrinking pattern-search polish around the best mesh direction.
    let mut step = 0.1;
    while step > 1e-6 {
        let mut improved = false;
        for i in 0..dim {
            for s in [step, -step] {
                let mut cand = best_dir.clone();
                cand[i] += s;
                let n = norm2(&cand);
                if n < 1e-9 {
                    continue;
                }
                for v in cand.iter_mut() {
                    *v /= n;
                }
                let val = eval_dir(&cand)?;
                if val > best {
                    best = val;
                    best_dir = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((best, false))
}

/// Upper bound on the Banach-Mazur distance `inf log ||T|| ||T^-1||` by local
/// optimization over invertible operators. Starts are the identity, all
/// coordinate permutations, and `restarts` random orthogonal matrices;
/// operator norms are mesh estimates (exact for polytopal pairs), so the
/// reported value is an estimate whose contract is "re-measuring on a finer
/// mesh never drops it by more than the mesh slack".
pub fn bm_upper(a: &NormSpec, b: &NormSpec, restarts: u32, seed: u64) -> Result<(f64, Witness)> {
    let dim = a.dim();
    if b.dim() != dim {
        return Err(Error::Domain("bm_upper requires equal dimensions".into()));
    }
    if dim > 4 {
        return Err(Error::Resource(format!(
            "bm_upper default budget covers dim <= 4, got {dim}"
        )));
    }

    let objective = |t: &[Vec<f64>]| -> Result<Option<f64>> {
        let Some(inv) = linalg::mat_inverse(t) else {
            return Ok(None);
        };
        let (fwd, _) = operator_norm(a, b, t)?;
        let (bwd, _) = operator_norm(b, a, &inv)?;
        if fwd <= 0.0 || bwd <= 0.0 {
            return Ok(None);
        }
        Ok(Some((fwd * bwd).ln().max(0.0)))
    };

    let mut best_t = linalg::identity(dim);
    let mut best = objective(&best_t)?.ok_or_else(|| {
        Error::Value("identity operator rejected; norms are degenerate".into())
    })?;

    for perm in permutation_matrices(dim) {
        if let Some(v) = objective(&perm)? {
            if v < best {
                best = v;
                best_t = perm;
            }
        }
    }

    for r in 0..restarts {
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let mut t = linalg::random_orthogonal(dim, &mut rng);
        let Some(mut cur) = objective(&t)? else { continue };
        let mut sigma = 0.25;
        for _ in 0..160 {
            if sigma < 1e-7 {
                break;
            }
            let mut cand = t.clone();
            for row in cand.iter_mut() {
                for v in row.iter_mut() {
                    *v += sigma * gaussian(&mut rng);
                }
            }
            match objective(&cand)? {
                Some(v) if v < cur => {
                    cur = v;
                    t = cand;
                    sigma *= 1.05;
                }
                _ => sigma *= 0.93,
            }
        }
        if cur < best {
            best = cur;
            best_t = t;
        }
    }

    // Deterministic pattern polish on the winner.
    let mut step = 0.05;
    while step > 1e-6 {
        let mut improved = false;
        for i in 0..dim {
            for j in 0..dim {
                for s in [step, -step] {
                    let mut cand = best_t.clone();
                    cand[i][j] += s;
                    if let Some(v) = objective(&cand)? {
                        if v < best - 1e-15 {
                            best = v;
                            best_t = cand;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok((
        best,
        Witness {
            kind: WitnessKind::Bm,
            payload: WitnessPayload::Matrix(best_t),
            quality: best,
        },
    ))
}

fn permutation_matrices(dim: usize) -> Vec<Vec<Vec<f64>>> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }
    perms(dim)
        .into_iter()
        .map(|p| {
            let mut m = vec![vec![0.0; dim]; dim];
            for (i, &j) in p.iter().enumerate() {
                m[j][i] = 1.0;
            }
            m
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Kadets certificates and the glue norm
// ---------------------------------------------------------------------------

/// Finite presentation of a Q-homogeneous correspondence between dense
/// subsets of two normed spaces: base generator pairs whose rational
/// multiples are all related, with the quantitative constants of the Kadets
/// criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KadetsCertificate {
    pub generators: Vec<(Vec<f64>, Vec<f64>)>,
    pub eps: f64,
    pub delta: f64,
}

impl KadetsCertificate {
    pub fn validate(&self, dim_x: usize, dim_y: usize) -> Result<()> {
        if self.generators.is_empty() {
            return Err(Error::Value("certificate has no generators".into()));
        }
        if !(0.0 < self.delta && self.delta < self.eps) {
            return Err(Error::Value(format!(
                "certificate needs 0 < delta < eps, got delta={}, eps={}",
                self.delta, self.eps
            )));
        }
        for (u, v) in &self.generators {
            if u.len() != dim_x || v.len() != dim_y {
                return Err(Error::Structural("generator dimension mismatch".into()));
            }
        }
        Ok(())
    }
}

/// Evaluates the glue norm `||(x,y)||_Z`: the infimum of `||x0||_X + ||y0||_Y
/// + (eps-delta) sum |t_i| max{||u_i||_X, ||v_i||_Y}` over decompositions
/// `x = x0 + sum t_i u_i`, `y = y0 - sum t_i v_i`. Exact (an LP) when both
/// norms are polytopal; otherwise coordinate descent on the convex objective.
pub fn glue_norm_eval(
    cert: &KadetsCertificate,
    norm_x: &NormSpec,
    norm_y: &NormSpec,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    cert.validate(norm_x.dim(), norm_y.dim())?;
    if x.len() != norm_x.dim() || y.len() != norm_y.dim() {
        return Err(Error::Structural("point/norm dimension mismatch".into()));
    }
    let k = cert.generators.len();
    let lam = cert.eps - cert.delta;
    let weights: Vec<f64> = cert
        .generators
        .iter()
        .map(|(u, v)| Ok(norm_eval(norm_x, u)?.max(norm_eval(norm_y, v)?)))
        .collect::<Result<_>>()?;

    if let (
        NormSpec::Polytopal { functionals: fx, .. },
        NormSpec::Polytopal { functionals: fy, .. },
    ) = (norm_x, norm_y)
    {
        // Variables: t+ (k), t- (k), s, r >= 0.
        let nv = 2 * k + 2;
        let mut c = vec![0.0; nv];
        for i in 0..k {
            c[i] = lam * weights[i];
            c[k + i] = lam * weights[i];
        }
        c[2 * k] = 1.0; // s
        c[2 * k + 1] = 1.0; // r
        let mut a = Vec::new();
        let mut b = Vec::new();
        for phi in fx {
            // <phi, x> - sum t_i <phi,u_i> <= s
            let mut row = vec![0.0; nv];
            for (i, (u, _)) in cert.generators.iter().enumerate() {
                let d = dot(phi, u);
                row[i] = -d;
                row[k + i] = d;
            }
            row[2 * k] = -1.0;
            a.push(row);
            b.push(-dot(phi, x));
        }
        for psi in fy {
            // <psi, y> + sum t_i <psi,v_i> <= r
            let mut row = vec![0.0; nv];
            for (i, (_, v)) in cert.generators.iter().enumerate() {
                let d = dot(psi, v);
                row[i] = d;
                row[k + i] = -d;
            }
            row[2 * k + 1] = -1.0;
            a.push(row);
            b.push(-dot(psi, y));
        }
        let sol = linprog::solve_min_ub(&c, &a, &b)?;
        return Ok(sol.objective);
    }

    // Fallback: cyclic coordinate descent with golden-section line search on
    // the convex objective; an estimate, adequate away from the LP path.
    let f = |t: &[f64]| -> Result<f64> {
        let mut xr = x.to_vec();
        let mut yr = y.to_vec();
        let mut pen = 0.0;
        for (i, (u, v)) in cert.generators.iter().enumerate() {
            for (c, uc) in xr.iter_mut().zip(u) {
                *c -= t[i] * uc;
            }
            for (c, vc) in yr.iter_mut().zip(v) {
                *c += t[i] * vc;
            }
            pen += lam * t[i].abs() * weights[i];
        }
        Ok(norm_eval(norm_x, &xr)? + norm_eval(norm_y, &yr)? + pen)
    };
    let mut t = vec![0.0; k];
    let mut cur = f(&t)?;
    let radius = (norm_eval(norm_x, x)? + norm_eval(norm_y, y)? + 1.0)
        / (lam * weights.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-9));
    for _ in 0..200 {
        let before = cur;
        for i in 0..k {
            let (mut lo, mut hi) = (t[i] - radius, t[i] + radius);
            for _ in 0..60 {
                let m1 = lo + (hi - lo) * 0.381966;
                let m2 = hi - (hi - lo) * 0.381966;
                let mut t1 = t.clone();
                t1[i] = m1;
                let mut t2 = t.clone();
                t2[i] = m2;
                if f(&t1)? <= f(&t2)? {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            t[i] = 0.5 * (lo + hi);
            cur = f(&t)?;
        }
        if before - cur < 1e-10 {
            break;
        }
    }
    Ok(cur)
}

/// Samples random signed rational combinations of the certificate's
/// generator pairs and checks the Kadets tuple inequality
/// `| ||sum x_i||_X - ||sum y_i||_Y | <= (eps-delta) sum max{||x_i||,||y_i||}`
/// plus the one-sided norm-domination conditions. Sampling makes the check
/// one-sided: `false` refutes the certificate, `true` only survives it.
pub fn kadets_certificate_check(
    cert: &KadetsCertificate,
    norm_x: &NormSpec,
    norm_y: &NormSpec,
    tuple_budget: usize,
    seed: u64,
) -> Result<bool> {
    cert.validate(norm_x.dim(), norm_y.dim())?;
    let lam = cert.eps - cert.delta;
    let k = cert.generators.len();

    let nx = |v: &[f64]| norm_eval(norm_x, v);
    let ny = |v: &[f64]| norm_eval(norm_y, v);

    // Norm domination: every u must have a partner with ||v|| <= ||u||, and
    // symmetrically. Partners of u_i are the v_j of pairs sharing u_i.
    for i in 0..k {
        let ui = &cert.generators[i].0;
        let mut dominated = false;
        for (u, v) in &cert.generators {
            if linalg::close(u, ui, 1e-12) && ny(v)? <= nx(ui)? + METRIC_TOL {
                dominated = true;
                break;
            }
        }
        if !dominated {
            return Ok(false);
        }
        let vi = &cert.generators[i].1;
        let mut dominated = false;
        for (u, v) in &cert.generators {
            if linalg::close(v, vi, 1e-12) && nx(u)? <= ny(vi)? + METRIC_TOL {
                dominated = true;
                break;
            }
        }
        if !dominated {
            return Ok(false);
        }
    }

    let rationals = [1.0, -1.0, 0.5, -0.5, 2.0, -2.0, 3.0, -3.0, 1.0 / 3.0, -1.0 / 3.0];
    let check_tuple = |items: &[(usize, f64)]| -> Result<bool> {
        let dx = norm_x.dim();
        let dy = norm_y.dim();
        let mut sx = vec![0.0; dx];
        let mut sy = vec![0.0; dy];
        let mut budget = 0.0;
        for &(g, q) in items {
            let (u, v) = &cert.generators[g];
            for (c, uc) in sx.iter_mut().zip(u) {
                *c += q * uc;
            }
            for (c, vc) in sy.iter_mut().zip(v) {
                *c += q * vc;
            }
            let xu: Vec<f64> = u.iter().map(|c| q * c).collect();
            let yv: Vec<f64> = v.iter().map(|c| q * c).collect();
            budget += nx(&xu)?.max(ny(&yv)?);
        }
        Ok((nx(&sx)? - ny(&sy)?).abs() <= lam * budget + METRIC_TOL)
    };

    // Deterministic singletons first: they catch corrupted pairs outright.
    for g in 0..k {
        for q in rationals {
            if !check_tuple(&[(g, q)])? {
                return Ok(false);
            }
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..tuple_budget {
        let len = rng.gen_range(2..=6usize);
        let items: Vec<(usize, f64)> = (0..len)
            .map(|_| (rng.gen_range(0..k), rationals[rng.gen_range(0..rationals.len())]))
            .collect();
        if !check_tuple(&items)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A symmetric sample of `2 * half_count` points on the unit sphere of the
/// norm: random directions paired with their negations, kept pairwise
/// separated so gadget metrics stay positive.
pub fn symmetric_sphere_sample(
    norm: &NormSpec,
    half_count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let dim = norm.dim();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(2 * half_count);
    let mut guard = 0;
    while out.len() < 2 * half_count {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Resource("could not place separated sphere sample".into()));
        }
        let v: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
        let n = norm_eval(norm, &v)?;
        if n < 1e-9 {
            continue;
        }
        let x: Vec<f64> = v.iter().map(|c| c / n).collect();
        let neg: Vec<f64> = x.iter().map(|c| -c).collect();
        let min_gap = out
            .iter()
            .map(|p| {
                let d1 = norm_eval(norm, &linalg::sub(p, &x)).unwrap_or(0.0);
                let d2 = norm_eval(norm, &linalg::sub(p, &neg)).unwrap_or(0.0);
                d1.min(d2)
            })
            .fold(f64::INFINITY, f64::min);
        if min_gap < 0.05 {
            continue;
        }
        out.push(x);
        out.push(neg);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn renorm_default(pairs: &[((usize, usize), f64)], dim: usize) -> NormSpec {
        NormSpec::Renorm {
            alpha: 1.003,
            delta: 0.002,
            pairs: pairs.iter().copied().collect(),
            dim,
        }
    }

    #[test]
    fn lp_and_polytopal_eval() {
        let l1 = NormSpec::Lp { p: PExp::Finite(1.0), dim: 2 };
        let l2 = NormSpec::l2(2);
        let li = NormSpec::linf(2);
        assert_eq!(norm_eval(&l1, &[3.0, -4.0]).unwrap(), 7.0);
        assert_eq!(norm_eval(&l2, &[3.0, -4.0]).unwrap(), 5.0);
        assert_eq!(norm_eval(&li, &[3.0, -4.0]).unwrap(), 4.0);

        // l_inf as a polytopal norm.
        let poly = NormSpec::Polytopal {
            functionals: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            dim: 2,
        };
        poly.validate().unwrap();
        assert_eq!(norm_eval(&poly, &[3.0, -4.0]).unwrap(), 4.0);
        assert!(norm_eval(&poly, &[1.0]).is_err());
    }

    #[test]
    fn polytopal_validation_rejects_degenerate_sets() {
        let asym = NormSpec::Polytopal { functionals: vec![vec![1.0, 0.0]], dim: 2 };
        assert!(asym.validate().is_err());
        let rank_deficient = NormSpec::Polytopal {
            functionals: vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            dim: 2,
        };
        assert!(rank_deficient.validate().is_err());
    }

    #[test]
    fn renorm_eval_examples() {
        let spec = renorm_default(&[((0, 1), 0.7)], 3);
        let h = 1.003 + 0.002 * 0.7;
        // At e_{0,1} the boosted term wins and equals h.
        let e01 = basis_pair_vector(3, 0, 1);
        assert!((norm_eval(&spec, &e01).unwrap() - h).abs() < 1e-12);
        // Zero vector.
        assert_eq!(norm_eval(&spec, &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        // (e_0 - e_1)/sqrt2 kills the boosted term; the euclidean part wins.
        let x = vec![std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2, 0.0];
        assert!((norm_eval(&spec, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renorm_constants_are_validated() {
        let bad = NormSpec::Renorm {
            alpha: 1.01,
            delta: 0.01,
            pairs: BTreeMap::new(),
            dim: 2,
        };
        assert!(bad.validate().is_err(), "alpha+delta exceeds 200/199");
    }

    #[test]
    fn norm_axioms_hold_on_random_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let specs = vec![
            NormSpec::Lp { p: PExp::Finite(1.5), dim: 3 },
            NormSpec::l2(3),
            NormSpec::linf(3),
            NormSpec::Polytopal {
                functionals: vec![
                    vec![1.0, 0.2, 0.0],
                    vec![-1.0, -0.2, 0.0],
                    vec![0.0, 1.0, 0.1],
                    vec![0.0, -1.0, -0.1],
                    vec![0.3, 0.0, 1.0],
                    vec![-0.3, 0.0, -1.0],
                ],
                dim: 3,
            },
            renorm_default(&[((0, 1), 0.5), ((1, 2), 1.0)], 3),
        ];
        for spec in &specs {
            spec.validate().unwrap();
            for _ in 0..300 {
                let x: Vec<f64> = (0..3).map(|_| gaussian(&mut rng)).collect();
                let y: Vec<f64> = (0..3).map(|_| gaussian(&mut rng)).collect();
                let s: f64 = rng.gen_range(-3.0..3.0);
                let nx = norm_eval(spec, &x).unwrap();
                let ny = norm_eval(spec, &y).unwrap();
                let nxy = norm_eval(spec, &linalg::add(&x, &y)).unwrap();
                let nsx =
                    norm_eval(spec, &x.iter().map(|c| s * c).collect::<Vec<_>>()).unwrap();
                assert!(nxy <= nx + ny + METRIC_TOL, "triangle failed for {spec:?}");
                assert!((nsx - s.abs() * nx).abs() <= METRIC_TOL * (1.0 + nx));
                assert!(nx >= 0.0);
            }
        }
    }

    #[test]
    fn basis_pair_distance_table() {
        let t = basis_pair_distances();
        assert!((t.diff_sharing - 1.0).abs() < 1e-12);
        assert!((t.sum_sharing - 3.0f64.sqrt()).abs() < 1e-12);
        assert!((t.diff_disjoint - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((t.sum_disjoint - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pnm_membership_examples_and_ball_agreement() {
        use rand::SeedableRng;
        let spec = renorm_default(&[((0, 1), 1.0), ((1, 2), 0.25)], 4);
        let e01 = basis_pair_vector(4, 0, 1);
        assert!(pnm_member(&spec, 0, 1, &e01).unwrap());
        // Orthogonal unit vector is far outside the cap.
        let x = vec![0.0, 0.0, 0.0, 1.0];
        assert!(!pnm_member(&spec, 0, 1, &x).unwrap());
        // Boundary vector at distance exactly sqrt(2(h-1)/h): membership is
        // closed.
        let h = 1.003 + 0.002;
        let w = vec![0.0, 0.0, 0.0, 1.0]; // unit, orthogonal to e01
        let b: Vec<f64> = (0..4)
            .map(|i| e01[i] / h + w[i] * (h * h - 1.0).sqrt() / h)
            .collect();
        assert!((norm2(&b) - 1.0).abs() < 1e-12);
        assert!(pnm_member(&spec, 0, 1, &b).unwrap());
        assert!(pnm_ball_criterion(&spec, 0, 1, &b).unwrap());

        // Agreement of the two membership routes on random unit vectors, and
        // membership in at most one signed cap.
        let mut rng = ChaCha20Rng::seed_from_u64(123);
        let pairs = [(0usize, 1usize), (1, 2)];
        for _ in 0..2000 {
            let v: Vec<f64> = (0..4).map(|_| gaussian(&mut rng)).collect();
            let n = norm2(&v);
            if n < 1e-9 {
                continue;
            }
            let x: Vec<f64> = v.iter().map(|c| c / n).collect();
            let neg: Vec<f64> = x.iter().map(|c| -c).collect();
            let mut memberships = 0;
            for &(a, b) in &pairs {
                let m1 = pnm_member(&spec, a, b, &x).unwrap();
                assert_eq!(m1, pnm_ball_criterion(&spec, a, b, &x).unwrap());
                let m2 = pnm_member(&spec, a, b, &neg).unwrap();
                memberships += usize::from(m1) + usize::from(m2);
            }
            assert!(memberships <= 1, "unit vector in two signed caps");
        }
    }

    #[test]
    fn sandwich_holds_on_random_probes() {
        use rand::SeedableRng;
        let spec = renorm_default(&[((0, 1), 0.3), ((2, 3), 0.9)], 4);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let probes: Vec<Vec<f64>> =
            (0..500).map(|_| (0..4).map(|_| gaussian(&mut rng)).collect()).collect();
        assert!(renorm_sandwich_check(&spec, &probes).unwrap());
        // Tightness at e_{n,m} when f = 1 and alpha+delta = 200/199.
        let tight = NormSpec::Renorm {
            alpha: 1.0 + 1.0 / 199.0 - 0.002,
            delta: 0.002,
            pairs: [((0usize, 1usize), 1.0)].into_iter().collect(),
            dim: 4,
        };
        let e01 = basis_pair_vector(4, 0, 1);
        let v = norm_eval(&tight, &e01).unwrap();
        assert!((v - RENORM_SANDWICH).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_polytopal_matches_mesh() {
        // l_inf ball, functionals +-e_i; operator = diag(2, 0.5).
        let poly = NormSpec::Polytopal {
            functionals: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            dim: 2,
        };
        let t = vec![vec![2.0, 0.0], vec![0.0, 0.5]];
        let (exact, was_exact) = operator_norm(&poly, &poly, &t).unwrap();
        assert!(was_exact);
        assert!((exact - 2.0).abs() < 1e-9);
        let (est, was_exact) = operator_norm(&NormSpec::linf(2), &NormSpec::linf(2), &t).unwrap();
        assert!(!was_exact);
        assert!(est <= exact + 1e-12 && est > exact - 1e-3);
    }

    #[test]
    fn bm_upper_identity_and_classical_l2_linf() {
        let l2 = NormSpec::l2(2);
        let (v, w) = bm_upper(&l2, &l2, 4, 7).unwrap();
        assert!(v <= 1e-9, "identical norms should give 0, got {v}");
        assert_eq!(w.matrix().unwrap().len(), 2);

        // Classical optimum between l_2^2 and l_inf^2 is sqrt 2.
        let (v, _) = bm_upper(&l2, &NormSpec::linf(2), 16, 7).unwrap();
        let target = 0.5 * 2.0f64.ln();
        assert!(v <= target + 1e-3, "bm_upper {v} vs log sqrt2 {target}");
        assert!(v >= target - 1e-3, "upper bound dipped below the optimum: {v}");
    }

    #[test]
    fn bm_upper_finer_mesh_never_undercuts() {
        let l2 = NormSpec::l2(2);
        let li = NormSpec::linf(2);
        let (v, w) = bm_upper(&l2, &li, 8, 3).unwrap();
        let t = w.matrix().unwrap();
        let inv = linalg::mat_inverse(t).unwrap();
        let (f1, _) = operator_norm_with_mesh(&l2, &li, t, 4 * 4096).unwrap();
        let (b1, _) = operator_norm_with_mesh(&li, &l2, &inv, 4 * 4096).unwrap();
        let refined = (f1 * b1).ln().max(0.0);
        assert!(refined >= v - 1e-3, "refined {refined} vs reported {v}");
    }

    #[test]
    fn bm_upper_finds_permutation_isometry_between_renorms() {
        let f = renorm_default(&[((0, 1), 0.6), ((1, 2), 0.9), ((0, 2), 0.5)], 3);
        // g = f composed with the rotation 0->1->2->0 of coordinates.
        let g = renorm_default(&[((1, 2), 0.6), ((0, 2), 0.9), ((0, 1), 0.5)], 3);
        let (v, _) = bm_upper(&f, &g, 4, 11).unwrap();
        assert!(v <= 1e-6, "permutation isometry should give 0, got {v}");
    }

    fn square_norm() -> NormSpec {
        NormSpec::Polytopal {
            functionals: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            dim: 2,
        }
    }

    #[test]
    fn glue_norm_restricts_to_both_factors() {
        use rand::SeedableRng;
        let nx = square_norm();
        let ny = square_norm();
        let cert = KadetsCertificate {
            generators: vec![(vec![1.0, 0.0], vec![1.0, 0.0]), (vec![0.0, 1.0], vec![0.0, 1.0])],
            eps: 0.2,
            delta: 0.05,
        };
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| gaussian(&mut rng)).collect();
            let zx = glue_norm_eval(&cert, &nx, &ny, &x, &[0.0, 0.0]).unwrap();
            assert!((zx - norm_eval(&nx, &x).unwrap()).abs() < 1e-6);
            let y: Vec<f64> = (0..2).map(|_| gaussian(&mut rng)).collect();
            let zy = glue_norm_eval(&cert, &nx, &ny, &[0.0, 0.0], &y).unwrap();
            assert!((zy - norm_eval(&ny, &y).unwrap()).abs() < 1e-6);
        }
        // Zero pair.
        assert!(glue_norm_eval(&cert, &nx, &ny, &[0.0, 0.0], &[0.0, 0.0]).unwrap() < 1e-9);
        // Generator pairs glue cheaply: ||(u, -v)||_Z <= (eps-delta) ||u||_X.
        let (u, v) = cert.generators[0].clone();
        let neg_v: Vec<f64> = v.iter().map(|c| -c).collect();
        let z = glue_norm_eval(&cert, &nx, &ny, &u, &neg_v).unwrap();
        assert!(z <= (cert.eps - cert.delta) * norm_eval(&nx, &u).unwrap() + 1e-9);
    }

    #[test]
    fn glue_norm_fallback_agrees_with_lp_route() {
        use rand::SeedableRng;
        // Same norm expressed twice: polytopal (LP path) vs l_inf (descent
        // path); values must agree.
        let poly = square_norm();
        let li = NormSpec::linf(2);
        let cert = KadetsCertificate {
            generators: vec![(vec![1.0, 0.4], vec![0.9, 0.5])],
            eps: 0.3,
            delta: 0.1,
        };
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..30 {
            let x: Vec<f64> = (0..2).map(|_| gaussian(&mut rng)).collect();
            let y: Vec<f64> = (0..2).map(|_| gaussian(&mut rng)).collect();
            let a = glue_norm_eval(&cert, &poly, &poly, &x, &y).unwrap();
            let b = glue_norm_eval(&cert, &li, &li, &x, &y).unwrap();
            assert!((a - b).abs() < 1e-5, "LP {a} vs descent {b}");
        }
    }

    #[test]
    fn kadets_check_accepts_identity_and_rejects_corruption() {
        let nx = square_norm();
        let sample = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.3, 1.0], vec![-0.3, -1.0]];
        let gens: Vec<(Vec<f64>, Vec<f64>)> =
            sample.iter().map(|v| (v.clone(), v.clone())).collect();
        let cert = KadetsCertificate { generators: gens.clone(), eps: 0.05, delta: 0.01 };
        assert!(kadets_certificate_check(&cert, &nx, &nx, 500, 1).unwrap());

        let mut bad = gens;
        let scaled: Vec<f64> = bad[0].0.iter().map(|c| 3.0 * c).collect();
        bad[0].1 = scaled;
        let cert = KadetsCertificate { generators: bad, eps: 0.05, delta: 0.01 };
        assert!(!kadets_certificate_check(&cert, &nx, &nx, 500, 1).unwrap());
    }

    #[test]
    fn norm_spec_json_round_trip() {
        let specs = vec![
            NormSpec::l2(3),
            NormSpec::linf(2),
            square_norm(),
            renorm_default(&[((0, 1), 0.5)], 2),
        ];
        for s in specs {
            let j = s.to_json().unwrap();
            let back = NormSpec::from_json(&j).unwrap();
            assert_eq!(s, back);
        }
        // External shapes parse.
        let s = NormSpec::from_json(r#"{"variant":"lp","p":2,"dim":3}"#).unwrap();
        assert_eq!(s, NormSpec::l2(3));
        let s = NormSpec::from_json(r#"{"variant":"lp","p":"inf","dim":2}"#).unwrap();
        assert_eq!(s, NormSpec::linf(2));
        let s = NormSpec::from_json(
            r#"{"variant":"renorm","alpha":1.003,"delta":0.002,"f":{"0,1":0.5},"dim":2}"#,
        )
        .unwrap();
        assert!(matches!(s, NormSpec::Renorm { .. }));
    }

    #[test]
    fn symmetric_sample_is_unit_and_symmetric() {
        let n = square_norm();
        let sample = symmetric_sphere_sample(&n, 4, 9).unwrap();
        assert_eq!(sample.len(), 8);
        for x in &sample {
            assert!((norm_eval(&n, x).unwrap() - 1.0).abs() < 1e-9);
            let neg: Vec<f64> = x.iter().map(|c| -c).collect();
            assert!(sample.iter().any(|y| linalg::close(y, &neg, 1e-12)));
        }
    }
}
