//! Seeded instance generators and per-theorem verification campaigns.
//! A campaign runs generate -> construct -> push/pull -> assert pipelines
//! for a fixed number of trials and writes a JSON report; identical
//! (config, seed) pairs produce identical reports apart from wall time.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{gh_bijective, gh_exact, hl_closeness, lipschitz_exact, LipVariant};
use crate::error::{Error, Result};
use crate::linalg;
use crate::norm::{gaussian, norm_eval, symmetric_sphere_sample, NormSpec};
use crate::reduce::{
    bm_gadget, bm_gadget_pull, bm_gadget_push, covering_constants, default_rationals, hl_pull,
    hl_push, kadets_gadget, kadets_pull, kadets_push, renorm_build, renorm_push, suspend,
    suspend_pull, suspend_push, unitize, unitize_pull, BmGadgetConfig, BmPullOutcome,
    HlPullOutcome, KadetsPullOutcome, SuspendPullOutcome, UnitizePullOutcome,
};
use crate::space::{
    bijection_distortion, validate_metric, validate_triangles_sampled, Bijection, ClassBounds,
    Correspondence, FiniteMetricSpace, Witness, WitnessKind, WitnessPayload, METRIC_TOL,
};

/// Identifier string of the PRNG used everywhere in the harness, recorded in
/// report headers so reports are reproducible across implementations.
pub const RNG_ALGORITHM: &str = "chacha20(seed_from_u64); trial seed = seed xor trial";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    GhBijEquiv,
    IdentityMpq,
    LipToGh,
    HlToGh,
    BmToLip,
    UnitizeHl,
    KadetsToGh,
    GhToRenorm,
    LipVariants,
    MetricAxioms,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::GhBijEquiv,
        TheoremId::IdentityMpq,
        TheoremId::LipToGh,
        TheoremId::HlToGh,
        TheoremId::BmToLip,
        TheoremId::UnitizeHl,
        TheoremId::KadetsToGh,
        TheoremId::GhToRenorm,
        TheoremId::LipVariants,
        TheoremId::MetricAxioms,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::GhBijEquiv => "gh-bij-equiv",
            TheoremId::IdentityMpq => "identity-mpq",
            TheoremId::LipToGh => "lip-to-gh",
            TheoremId::HlToGh => "hl-to-gh",
            TheoremId::BmToLip => "bm-to-lip",
            TheoremId::UnitizeHl => "unitize-hl",
            TheoremId::KadetsToGh => "kadets-to-gh",
            TheoremId::GhToRenorm => "gh-to-renorm",
            TheoremId::LipVariants => "lip-variants",
            TheoremId::MetricAxioms => "metric-axioms",
        }
    }

    pub fn default_trials(&self) -> u32 {
        match self {
            TheoremId::GhBijEquiv | TheoremId::IdentityMpq => 200,
            TheoremId::LipToGh | TheoremId::HlToGh | TheoremId::GhToRenorm => 100,
            TheoremId::BmToLip | TheoremId::KadetsToGh => 50,
            TheoremId::UnitizeHl => 10,
            TheoremId::LipVariants => 100,
            TheoremId::MetricAxioms => 12,
        }
    }

    pub fn default_size(&self) -> usize {
        match self {
            TheoremId::GhBijEquiv | TheoremId::IdentityMpq => 5,
            TheoremId::LipToGh | TheoremId::HlToGh | TheoremId::GhToRenorm => 4,
            TheoremId::BmToLip | TheoremId::KadetsToGh => 3, // norm dimension
            TheoremId::UnitizeHl => 13,                      // grid side
            TheoremId::LipVariants => 4,
            TheoremId::MetricAxioms => 4,
        }
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignConfig {
    pub theorem: TheoremId,
    pub trials: u32,
    pub seed: u64,
    pub size: usize,
    /// Override of the default comparison tolerance (1e-9).
    pub tolerance: Option<f64>,
}

impl CampaignConfig {
    pub fn new(theorem: TheoremId) -> Self {
        CampaignConfig {
            theorem,
            trials: theorem.default_trials(),
            seed: 7,
            size: theorem.default_size(),
            tolerance: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn tol(&self) -> f64 {
        self.tolerance.unwrap_or(METRIC_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub seed: u64,
    pub status: TrialStatus,
    pub digests: BTreeMap<String, String>,
    pub measured: BTreeMap<String, f64>,
    /// The bound of the worst-margin check.
    pub bound: Option<f64>,
    /// Smallest (bound - value) over the trial's checks.
    pub margin: Option<f64>,
    pub message: Option<String>,
    /// Full instances, persisted for failing trials only.
    pub instances: Option<BTreeMap<String, serde_json::Value>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub passed: u32,
    pub failed: u32,
    pub skipped: u32,
    pub worst_margin: Option<f64>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub config: CampaignConfig,
    pub rng: String,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// What a single trial produced: named measurements, instance digests,
/// `value <= bound` checks, and the full instances to persist on failure.
#[derive(Debug, Default)]
struct TrialOutput {
    measured: BTreeMap<String, f64>,
    digests: BTreeMap<String, String>,
    checks: Vec<(String, f64, f64)>,
    instances: BTreeMap<String, serde_json::Value>,
}

impl TrialOutput {
    fn measure(&mut self, name: &str, v: f64) {
        self.measured.insert(name.into(), v);
    }

    fn digest_space(&mut self, name: &str, m: &FiniteMetricSpace) {
        self.digests.insert(name.into(), digest_space(m));
        self.instances
            .insert(name.into(), serde_json::to_value(m).unwrap_or(serde_json::Value::Null));
    }

    fn digest_value<T: Serialize>(&mut self, name: &str, v: &T) {
        let val = serde_json::to_value(v).unwrap_or(serde_json::Value::Null);
        self.digests.insert(name.into(), digest_bytes(val.to_string().as_bytes()));
        self.instances.insert(name.into(), val);
    }

    /// Record `value <= bound` as a named check.
    fn check(&mut self, name: &str, value: f64, bound: f64) {
        self.measured.insert(name.into(), value);
        self.checks.push((name.into(), value, bound));
    }

    /// Record a boolean condition as a 0/1 check.
    fn require(&mut self, name: &str, ok: bool) {
        self.checks.push((name.into(), if ok { 0.0 } else { 1.0 }, 0.5));
    }
}

fn digest_bytes(bytes: &[u8]) -> String {
    // FNV-1a, 64-bit.
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn digest_space(m: &FiniteMetricSpace) -> String {
    let mut bytes = Vec::new();
    for l in &m.labels {
        bytes.extend_from_slice(l.as_bytes());
        bytes.push(0);
    }
    for row in &m.dist {
        for v in row {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
    }
    digest_bytes(&bytes)
}

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

/// Random metric with off-diagonal values in [p, q], deterministic per seed.
/// When q > 2p a shortest-path closure repairs the triangle inequality (the
/// closure stays inside [p, q]); the result is validated before returning.
pub fn gen_metric(bounds: &ClassBounds, n: usize, seed: u64) -> Result<FiniteMetricSpace> {
    let (Some(p), Some(q)) = (bounds.lower, bounds.upper) else {
        return Err(Error::Domain("gen_metric needs two-sided bounds".into()));
    };
    if n < 2 {
        return Err(Error::Domain("gen_metric needs at least 2 points".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(p..q);
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    if q > 2.0 * p {
        floyd_closure(&mut dist);
    }
    let m = FiniteMetricSpace::with_default_labels(dist, *bounds)?;
    let check = validate_metric(&m, bounds)?;
    if !check.is_valid() {
        return Err(Error::Assertion(format!(
            "generated instance failed validation: {:?}",
            check.violations[0]
        )));
    }
    Ok(m)
}

fn floyd_closure(dist: &mut [Vec<f64>]) {
    let n = dist.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
}

/// Entry-wise multiplicative perturbation `e(i,j) = s(i,j) d(i,j)` with
/// factors in [1/L, L], restricted further so any class bounds carried by
/// `d` are preserved. Returns the perturbed space together with the
/// identity-bijection Lipschitz witness whose measured log-distortion is at
/// most `log L`.
pub fn perturb_bilipschitz(
    d: &FiniteMetricSpace,
    l: f64,
    seed: u64,
) -> Result<(FiniteMetricSpace, Witness)> {
    if !(l > 1.0) {
        return Err(Error::Domain(format!("perturbation factor must exceed 1, got {l}")));
    }
    let n = d.n();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut lo = 1.0 / l;
            let mut hi = l;
            if let Some(p) = d.bounds.lower {
                lo = lo.max(p / d.d(i, j));
            }
            if let Some(q) = d.bounds.upper {
                hi = hi.min(q / d.d(i, j));
            }
            // The window always contains 1 because d respects its own
            // bounds.
            let s = if hi > lo { rng.gen_range(lo..hi) } else { 1.0 };
            let v = s * d.d(i, j);
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    let auto_triangle =
        matches!((d.bounds.lower, d.bounds.upper), (Some(p), Some(q)) if q <= 2.0 * p);
    if !auto_triangle {
        floyd_closure(&mut dist);
    }
    let e = FiniteMetricSpace::from_matrix(d.labels.clone(), dist, d.bounds)?;
    let check = validate_metric(&e, &d.bounds)?;
    if !check.is_valid() {
        return Err(Error::Assertion(format!(
            "perturbed instance failed validation: {:?}",
            check.violations[0]
        )));
    }
    let mut log_dis = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            log_dis = log_dis.max((e.d(i, j) / d.d(i, j)).ln().abs());
        }
    }
    if log_dis > l.ln() + METRIC_TOL {
        return Err(Error::Assertion(format!(
            "repair pushed the log-distortion to {log_dis} > log L = {}",
            l.ln()
        )));
    }
    Ok((
        e,
        Witness {
            kind: WitnessKind::Lip,
            payload: WitnessPayload::Bijection(Bijection::identity(n)),
            quality: log_dis,
        },
    ))
}

/// Additive perturbation clamped to the bounds, with shortest-path repair
/// when the class does not make triangles automatic.
fn perturb_additive(
    d: &FiniteMetricSpace,
    amplitude: f64,
    seed: u64,
) -> Result<FiniteMetricSpace> {
    let n = d.n();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (p, q) = (d.bounds.lower.unwrap_or(0.0), d.bounds.upper.unwrap_or(f64::INFINITY));
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (d.d(i, j) + rng.gen_range(-amplitude..amplitude)).clamp(p, q);
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    if !(q <= 2.0 * p) {
        floyd_closure(&mut dist);
    }
    let e = FiniteMetricSpace::from_matrix(d.labels.clone(), dist, d.bounds)?;
    let check = validate_metric(&e, &d.bounds)?;
    if !check.is_valid() {
        return Err(Error::Assertion("perturbed instance failed validation".into()));
    }
    Ok(e)
}

/// A random near-euclidean symmetric polytopal norm: scaled coordinate
/// functionals plus one diagonal pair, all slightly jittered.
fn gen_polytopal_norm(dim: usize, jitter: f64, rng: &mut ChaCha20Rng) -> NormSpec {
    loop {
        let mut functionals = Vec::new();
        for i in 0..dim {
            let mut f = vec![0.0; dim];
            f[i] = 1.0;
            for c in f.iter_mut() {
                *c += jitter * gaussian(rng);
            }
            let neg: Vec<f64> = f.iter().map(|v| -v).collect();
            functionals.push(f);
            functionals.push(neg);
        }
        let mut diag: Vec<f64> = vec![1.0 / (dim as f64).sqrt(); dim];
        for c in diag.iter_mut() {
            *c += jitter * gaussian(rng);
        }
        let neg: Vec<f64> = diag.iter().map(|v| -v).collect();
        functionals.push(diag);
        functionals.push(neg);
        let spec = NormSpec::Polytopal { functionals, dim };
        if spec.validate().is_ok() {
            return spec;
        }
    }
}

/// Scales each functional pair of a polytopal norm by a factor in
/// [1/(1+gamma), 1+gamma], producing a (1+gamma)-renorm.
fn scaled_renorm_of(norm: &NormSpec, gamma: f64, rng: &mut ChaCha20Rng) -> Result<NormSpec> {
    let NormSpec::Polytopal { functionals, dim } = norm else {
        return Err(Error::Domain("scaled renorm needs a polytopal base".into()));
    };
    // Functionals come in (f, -f) consecutive pairs by construction.
    let mut out = Vec::with_capacity(functionals.len());
    let mut i = 0;
    while i < functionals.len() {
        let s = rng.gen_range(1.0 / (1.0 + gamma)..1.0 + gamma);
        out.push(linalg::scale(&functionals[i], s));
        out.push(linalg::scale(&functionals[i + 1], s));
        i += 2;
    }
    let spec = NormSpec::Polytopal { functionals: out, dim: *dim };
    spec.validate()?;
    Ok(spec)
}

// ---------------------------------------------------------------------------
// campaign driver
// ---------------------------------------------------------------------------

/// Runs the campaign for one theorem. Trials execute in parallel (capped by
/// the MDZ_THREADS environment variable) with per-trial seeds derived as
/// `seed xor trial`, and are merged in trial order, so reports are
/// deterministic.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let pool = thread_pool()?;
    let trials: Vec<TrialRecord> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_one_trial(cfg, t)).collect());
    let mut aggregate = Aggregate {
        passed: 0,
        failed: 0,
        skipped: 0,
        worst_margin: None,
        wall_ms: started.elapsed().as_millis() as u64,
    };
    for t in &trials {
        match t.status {
            TrialStatus::Pass => aggregate.passed += 1,
            TrialStatus::Fail => aggregate.failed += 1,
            TrialStatus::Skipped => aggregate.skipped += 1,
        }
        if let Some(m) = t.margin {
            aggregate.worst_margin = Some(match aggregate.worst_margin {
                None => m,
                Some(w) => w.min(m),
            });
        }
    }
    let pass = aggregate.failed == 0;
    Ok(VerificationReport {
        config: cfg.clone(),
        rng: RNG_ALGORITHM.into(),
        trials,
        aggregate,
        pass,
    })
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MDZ_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return Err(Error::Config(format!("bad MDZ_THREADS value '{v}'"))),
        }
    }
    builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run_one_trial(cfg: &CampaignConfig, trial: u32) -> TrialRecord {
    let seed = cfg.seed ^ trial as u64;
    let out = match cfg.theorem {
        TheoremId::GhBijEquiv => trial_gh_bij_equiv(cfg, trial, seed),
        TheoremId::IdentityMpq => trial_identity_mpq(cfg, trial, seed),
        TheoremId::LipToGh => trial_lip_to_gh(cfg, trial, seed),
        TheoremId::HlToGh => trial_hl_to_gh(cfg, trial, seed),
        TheoremId::BmToLip => trial_bm_to_lip(cfg, trial, seed),
        TheoremId::UnitizeHl => trial_unitize_hl(cfg, trial, seed),
        TheoremId::KadetsToGh => trial_kadets_to_gh(cfg, trial, seed),
        TheoremId::GhToRenorm => trial_gh_to_renorm(cfg, trial, seed),
        TheoremId::LipVariants => trial_lip_variants(cfg, trial, seed),
        TheoremId::MetricAxioms => trial_metric_axioms(cfg, trial, seed),
    };
    match out {
        Ok(out) => finish_trial(trial, seed, out),
        Err(Error::Resource(msg)) => TrialRecord {
            trial,
            seed,
            status: TrialStatus::Skipped,
            digests: BTreeMap::new(),
            measured: BTreeMap::new(),
            bound: None,
            margin: None,
            message: Some(format!("skipped: {msg}")),
            instances: None,
        },
        Err(e) => TrialRecord {
            trial,
            seed,
            status: TrialStatus::Fail,
            digests: BTreeMap::new(),
            measured: BTreeMap::new(),
            bound: None,
            margin: None,
            message: Some(format!("error: {e}")),
            instances: None,
        },
    }
}

fn finish_trial(trial: u32, seed: u64, out: TrialOutput) -> TrialRecord {
    let mut worst: Option<(f64, f64, String)> = None; // (margin, bound, name)
    let mut failures: Vec<String> = Vec::new();
    for (name, value, bound) in &out.checks {
        let margin = bound - value;
        if *value > *bound {
            failures.push(format!("{name}: {value} > {bound}"));
        }
        if worst.as_ref().map_or(true, |(m, _, _)| margin < *m) {
            worst = Some((margin, *bound, name.clone()));
        }
    }
    let failed = !failures.is_empty();
    TrialRecord {
        trial,
        seed,
        status: if failed { TrialStatus::Fail } else { TrialStatus::Pass },
        digests: out.digests,
        measured: out.measured,
        bound: worst.as_ref().map(|(_, b, _)| *b),
        margin: worst.as_ref().map(|(m, _, _)| *m),
        message: if failed { Some(failures.join("; ")) } else { None },
        instances: if failed { Some(out.instances) } else { None },
    }
}

// ---------------------------------------------------------------------------
// per-theorem trials
// ---------------------------------------------------------------------------

/// Oracle equivalence: on the class [1, 2], whenever the exact GH value is
/// below p/2 = 1/2 it coincides with the bijective variant; the one-sided
/// inequality gh_exact <= gh_bijective holds unconditionally.
fn trial_gh_bij_equiv(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let bounds = ClassBounds::both(1.0, 2.0)?;
    let n = cfg.size.max(2);
    let d = gen_metric(&bounds, n, seed)?;
    let e = if trial % 5 == 4 {
        gen_metric(&bounds, n, seed ^ 0xabcdef)?
    } else {
        let amplitude = [0.02, 0.1, 0.3, 0.8][(trial % 4) as usize];
        perturb_additive(&d, amplitude, seed ^ 0x5eed)?
    };
    let mut out = TrialOutput::default();
    out.digest_space("d", &d);
    out.digest_space("e", &e);
    let (ghe, we) = gh_exact(&d, &e)?;
    let (ghb, _) = gh_bijective(&d, &e)?;
    out.measure("gh_exact", ghe);
    out.measure("gh_bijective", ghb);
    // One-sided bound (half the bijective distortion dominates gh_exact).
    out.check("one_sided_gh_le_bijective", ghe, ghb + tol);
    // Equality under the p/2 guard.
    if ghe < 0.5 {
        out.check("guarded_equality_gap", (ghe - ghb).abs(), tol);
    }
    // Witness soundness: re-measuring the returned correspondence
    // reproduces the quality.
    let re = crate::space::distortion(&d, &e, we.correspondence()?)? / 2.0;
    out.check("witness_soundness_gap", (re - we.quality).abs(), tol);
    Ok(out)
}

/// Identity reduction on the class [2, 15]: GH below 1 bounds the BBI
/// Lipschitz distance by log(1 + eps), and BBI below 1 bounds GH by
/// q (exp(eps) - 1) / 2.
fn trial_identity_mpq(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let bounds = ClassBounds::both(2.0, 15.0)?;
    let n = cfg.size.max(2);
    let d = gen_metric(&bounds, n, seed)?;
    let e = if trial % 2 == 1 {
        gen_metric(&bounds, n, seed ^ 0xabcdef)?
    } else {
        let amplitude = [0.2, 0.8, 1.6][(trial % 3) as usize];
        perturb_additive(&d, amplitude, seed ^ 0x5eed)?
    };
    let mut out = TrialOutput::default();
    out.digest_space("d", &d);
    out.digest_space("e", &e);
    let (ghe, _) = gh_exact(&d, &e)?;
    let (bbi, _) = lipschitz_exact(&d, &e, LipVariant::Bbi)?;
    out.measure("gh_exact", ghe);
    out.measure("lip_bbi", bbi);
    if ghe < 1.0 {
        out.check("gh_to_lip", bbi, (1.0 + 2.0 * ghe / 2.0).ln() + tol);
    }
    if bbi < 1.0 {
        out.check("lip_to_gh", ghe, 15.0 * (bbi.exp() - 1.0) / 2.0 + tol);
    }
    Ok(out)
}

/// Suspension forward and backward: the pushed correspondence's distortion
/// stays below 2(exp r - 1), and the pull certifies every proof condition;
/// an injected cross-level pair is rejected.
fn trial_lip_to_gh(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let bounds = ClassBounds::both(0.5, 1.0)?;
    let n = cfg.size.max(2);
    let d = gen_metric(&bounds, n, seed)?;
    let l = [1.01, 1.05, 1.2][(trial % 3) as usize];
    let (e, lip) = perturb_bilipschitz(&d, l, seed ^ 0x11f)?;
    let mut out = TrialOutput::default();
    out.digest_space("d", &d);
    out.digest_space("e", &e);
    out.measure("log_distortion", lip.quality);

    let sd = suspend(&d, -3, 3)?;
    let se = suspend(&e, -3, 3)?;
    let gh = suspend_push(&lip, &d, &e, &sd, &se)?;
    let r = lip.quality;
    out.check("push_distortion", 2.0 * gh.quality, 2.0 * (r.exp() - 1.0) + tol);

    let eps = (gh.quality + 1e-12).min(0.2499);
    match suspend_pull(&gh, eps, &d, &e, &sd, &se)? {
        SuspendPullOutcome::Certified { bound } => {
            out.measure("pull_bound", bound);
            out.check("pull_bound_formula", bound, (24.0f64 * eps).ln_1p() + tol);
        }
        SuspendPullOutcome::Violated { condition, detail } => {
            out.digest_value("violation", &format!("{condition}: {detail}"));
            out.require("pull_conditions_hold", false);
        }
    }

    // Injected level-mismatch counterexample must be rejected, either by the
    // distortion precondition or by the level-preservation condition.
    let mut pairs: Vec<(usize, usize)> = gh.correspondence()?.pairs.iter().copied().collect();
    pairs.push((sd.node_index(0, 0), se.node_index(0, 1)));
    let corrupted = Witness {
        kind: WitnessKind::Gh,
        payload: WitnessPayload::Correspondence(Correspondence::new(
            pairs,
            sd.space.n(),
            se.space.n(),
        )?),
        quality: gh.quality,
    };
    let rejected = match suspend_pull(&corrupted, eps, &d, &e, &sd, &se) {
        Err(Error::Precondition(_)) => true,
        Ok(SuspendPullOutcome::Violated { .. }) => true,
        _ => false,
    };
    out.require("counterexample_rejected", rejected);
    Ok(out)
}

/// HL round trip on half-suspensions: push an HL(eps) witness, pull back an
/// HL(24 eps) witness whose two inequalities are verified exhaustively.
fn trial_hl_to_gh(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let bounds = ClassBounds::both(0.5, 1.0)?;
    let n = cfg.size.max(2);
    let d = gen_metric(&bounds, n, seed)?;
    let amplitude = [0.02, 0.05, 0.1, 0.15][(trial % 4) as usize];
    let e = perturb_additive(&d, amplitude, seed ^ 0x417)?;
    let mut out = TrialOutput::default();
    out.digest_space("d", &d);
    out.digest_space("e", &e);

    let (eps0, hl) = hl_closeness(&d, &e)?;
    out.measure("hl_eps", eps0);
    if eps0 >= 0.19 {
        return Err(Error::Resource(format!("instance too far apart for the pull: {eps0}")));
    }
    let sd = suspend(&d, -3, 0)?;
    let se = suspend(&e, -3, 0)?;
    let gh = hl_push(&hl, &d, &e, &sd, &se)?;
    out.check("push_distortion", 2.0 * gh.quality, 2.0 * eps0 + tol);

    let eps = (gh.quality + 1e-12).min(0.1999);
    match hl_pull(&gh, eps, &d, &e, &sd, &se)? {
        HlPullOutcome::Certified { bound, witness } => {
            out.measure("pull_bound", bound);
            let re = crate::dist::hl_measure(&d, &e, witness.correspondence()?)?;
            out.check("recovered_witness_eps", re, bound + tol);
            out.check("recovered_witness_soundness", (re - witness.quality).abs(), tol);
        }
        HlPullOutcome::Violated { condition, detail } => {
            out.digest_value("violation", &format!("{condition}: {detail}"));
            out.require("pull_conditions_hold", false);
        }
    }
    // A relation whose level-0 slice misses a row must be rejected.
    let mut pairs = vec![(sd.club_index(), se.club_index())];
    for k in -3..=0 {
        for i in 0..n {
            let j = if k == 0 { (i + 1) % n } else { i };
            pairs.push((sd.node_index(i, k), se.node_index(j, k)));
        }
    }
    let removed = (sd.node_index(0, 0), se.node_index(1 % n, 0));
    let pairs: Vec<(usize, usize)> = pairs.into_iter().filter(|&p| p != removed).collect();
    if let Ok(corr) = Correspondence::new(pairs, sd.space.n(), se.space.n()) {
        let w = Witness {
            kind: WitnessKind::Gh,
            payload: WitnessPayload::Correspondence(corr),
            quality: 0.0,
        };
        let rejected = match hl_pull(&w, 0.1999, &d, &e, &sd, &se) {
            Err(Error::Precondition(_)) => true,
            Ok(HlPullOutcome::Violated { .. }) => true,
            _ => false,
        };
        out.require("broken_level0_rejected", rejected);
    }
    Ok(out)
}

/// The six-vector truncation used by the BM campaigns.
fn six_vectors(a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let sum = linalg::add(a, b);
    vec![
        a.to_vec(),
        b.to_vec(),
        sum.clone(),
        linalg::scale(a, -1.0),
        linalg::scale(b, -1.0),
        linalg::scale(&sum, -1.0),
    ]
}

/// BM gadget round trip with an exactly controlled 1.02-isomorphism: the
/// push measures Lip at most 1.02, the pull re-extracts the operator on the
/// vector set with every pair ratio certified.
fn trial_bm_to_lip(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let dim = cfg.size.clamp(2, 4);
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xb3);
    let nu = gen_polytopal_norm(dim, 0.05, &mut rng);

    // Near-orthogonal base pair keeps the realized pair-difference norms in
    // a narrow band, so the constant net stays small.
    let mut a = vec![0.0; dim];
    a[0] = 1.0;
    let mut b = vec![0.0; dim];
    b[1 % dim] = 1.0;
    for c in a.iter_mut().chain(b.iter_mut()) {
        *c += 0.05 * gaussian(&mut rng);
    }
    let vectors = six_vectors(&a, &b);

    // T with ||T||, ||T^-1|| <= 1.02 by construction: lambda is the
    // pullback of nu under T with per-pair functional scalings in
    // [1/1.02, 1.02].
    let mut t;
    loop {
        t = linalg::identity(dim);
        for row in t.iter_mut() {
            for v in row.iter_mut() {
                *v += 0.2 * gaussian(&mut rng);
            }
        }
        if linalg::mat_inverse(&t).is_some() {
            break;
        }
    }
    let t_inv = linalg::mat_inverse(&t).unwrap();
    let NormSpec::Polytopal { functionals, .. } = &nu else { unreachable!() };
    let mut lam_functionals = Vec::new();
    let mut i = 0;
    while i < functionals.len() {
        let s = rng.gen_range(1.0 / 1.02..1.02);
        // phi o T^-1 = (T^-1)^t phi, scaled.
        let pulled = linalg::matvec_t(&t_inv, &functionals[i]);
        lam_functionals.push(linalg::scale(&pulled, s));
        lam_functionals.push(linalg::scale(&pulled, -s));
        i += 2;
    }
    let lam = NormSpec::Polytopal { functionals: lam_functionals, dim };
    lam.validate()?;
    let lam_vectors: Vec<Vec<f64>> = vectors.iter().map(|v| linalg::matvec(&t, v)).collect();

    let (scalars, adds) = crate::reduce::detect_instances(&vectors, &default_rationals());
    let mut values = Vec::new();
    for (vecs, norm) in [(&vectors, &nu), (&lam_vectors, &lam)] {
        for i in 0..vecs.len() {
            for j in (i + 1)..vecs.len() {
                values.push(norm_eval(norm, &linalg::sub(&vecs[i], &vecs[j]))?);
            }
        }
    }
    let cfg_g = BmGadgetConfig {
        rationals: default_rationals(),
        c_consts: covering_constants(&values)?,
        scalars,
        adds,
    };
    let g_nu = bm_gadget(&nu, &vectors, &cfg_g)?;
    let g_lam = bm_gadget(&lam, &lam_vectors, &cfg_g)?;

    let mut out = TrialOutput::default();
    out.digest_space("gadget_nu", &g_nu.space);
    out.digest_space("gadget_lam", &g_lam.space);
    out.digest_value("t", &t);

    let push = bm_gadget_push(&t, &g_nu, &g_lam)?;
    out.measure("op_norm", push.op_norm);
    out.check("push_lip", push.lip.max(push.lip_inv), 1.02 + tol);

    match bm_gadget_pull(push.witness.bijection()?, &g_nu, &g_lam)? {
        BmPullOutcome::Extracted(pull) => {
            out.measure("pull_bound", pull.bound);
            out.measure("covered_pairs", pull.covered_pairs.len() as f64);
            out.measure("uncovered_pairs", pull.uncovered_pairs.len() as f64);
            // S equals T on the vector set: the lambda gadget lists T v_i at
            // index i.
            let extracted_is_t = pull.vector_map.iter().enumerate().all(|(i, &j)| i == j);
            out.require("extracted_map_is_t", extracted_is_t);
            out.require("all_pairs_covered", pull.uncovered_pairs.is_empty());
            out.check(
                "pull_bound_formula",
                (pull.bound - 2.0 * push.lip.max(push.lip_inv).ln()).abs(),
                tol,
            );
            out.require(
                "homogeneity_and_additivity_checked",
                pull.homogeneity_instances > 0 && pull.additivity_instances > 0,
            );
        }
        BmPullOutcome::Inconclusive { reason } => {
            out.digest_value("inconclusive", &reason);
            out.require("pull_extracts", false);
        }
    }
    let _ = trial;
    Ok(out)
}

/// Unit-ball truncation pipeline on a planar grid with a linear
/// 1.05-isomorphism: the pull certifies large-scale Lipschitz constants at
/// most 1 + 6K.
fn trial_unitize_hl(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x0417);
    let l2 = NormSpec::l2(2);
    let side = cfg.size.clamp(7, 21) as i32;
    let half = side / 2;
    let step = 0.45;
    let mut pts = Vec::new();
    for i in -half..=half {
        for j in -half..=half {
            pts.push(vec![i as f64 * step, j as f64 * step]);
        }
    }
    // Linear map with singular values within [1/1.05, 1.05]: a rotation
    // composed with a mild axis scaling.
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (s1, s2) =
        (rng.gen_range(1.0 / 1.05..1.05), rng.gen_range(1.0 / 1.05..1.05));
    let rot = vec![vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]];
    let scale = vec![vec![s1, 0.0], vec![0.0, s2]];
    let t = linalg::mat_mul(&rot, &scale);
    let img: Vec<Vec<f64>> = pts.iter().map(|p| linalg::matvec(&t, p)).collect();

    let mut out = TrialOutput::default();
    let mx = unitize(&l2, &pts)?;
    let my = unitize(&l2, &img)?;
    out.digest_space("unitized_x", &mx);
    out.digest_space("unitized_y", &my);
    let phi = Bijection::identity(pts.len());
    let dis = bijection_distortion(&mx, &my, &phi)?;
    let k = (dis / 2.0 + 1e-9).max(1e-6);
    out.measure("k", k);
    if k >= 0.25 {
        return Err(Error::Resource(format!("instance distortion too large: K = {k}")));
    }
    match unitize_pull(&phi, k, &l2, &pts, &l2, &img)? {
        UnitizePullOutcome::Certified(r) => {
            out.measure("lip1", r.lip1);
            out.measure("lip1_inv", r.lip1_inv);
            out.measure("chain_slack", r.chain_slack);
            out.check("lip1_vs_ideal", r.lip1, 1.0 + 6.0 * k + tol);
            out.check("lip1_inv_vs_ideal", r.lip1_inv, 1.0 + 6.0 * k + tol);
        }
        UnitizePullOutcome::Inconclusive { reason } => {
            out.digest_value("inconclusive", &reason);
            out.require("pull_certifies", false);
        }
    }
    let _ = trial;
    Ok(out)
}

/// Kadets gadget round trip: a (1+gamma)-renorm with matched sphere samples
/// pushes to a gadget bijection with distortion below 4 eps (cases asserted
/// individually), and the pull recovers a certificate checked by sampling.
fn trial_kadets_to_gh(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let dim = cfg.size.clamp(2, 4);
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xadd);
    let gamma = [0.001, 0.002, 0.005][(trial % 3) as usize];
    let nx = gen_polytopal_norm(dim, 0.05, &mut rng);
    let ny = scaled_renorm_of(&nx, gamma, &mut rng)?;

    let sample_x = symmetric_sphere_sample(&nx, 4, seed ^ 0x5a)?;
    // Matched sample: the same directions renormalized under Y.
    let sample_y: Vec<Vec<f64>> = sample_x
        .iter()
        .map(|x| {
            let n = norm_eval(&ny, x)?;
            Ok(linalg::scale(x, 1.0 / n))
        })
        .collect::<Result<_>>()?;

    let gx = kadets_gadget(&nx, &sample_x, 3)?;
    let gy = kadets_gadget(&ny, &sample_y, 3)?;
    let mut out = TrialOutput::default();
    out.digest_space("gadget_x", &gx.space);
    out.digest_space("gadget_y", &gy.space);

    // Audit-derived eps for the identity pairing.
    let pi = Bijection::identity(sample_x.len());
    let mut audit = 0.0f64;
    for mask in 1u32..(1 << sample_x.len()) {
        if mask.count_ones() as usize > 3 {
            continue;
        }
        let f: Vec<usize> = (0..sample_x.len()).filter(|i| mask & (1 << i) != 0).collect();
        for signs in 0u32..(1 << f.len()) {
            let mut sx = vec![0.0; dim];
            let mut sy = vec![0.0; dim];
            for (pos, &i) in f.iter().enumerate() {
                let s = if signs & (1 << pos) != 0 { -1.0 } else { 1.0 };
                sx = linalg::add(&sx, &linalg::scale(&sample_x[i], s));
                sy = linalg::add(&sy, &linalg::scale(&sample_y[i], s));
            }
            let gap = (norm_eval(&nx, &sx)? - norm_eval(&ny, &sy)?).abs();
            audit = audit.max(gap / (2.0 * f.len() as f64));
        }
    }
    let eps = audit + 1e-9;
    out.measure("eps", eps);

    let push = kadets_push(&pi, eps, &gx, &gy)?;
    out.check("push_distortion", 2.0 * push.witness.quality, 4.0 * eps + tol);
    out.check("case1_sphere_sphere", push.case_deviation[0], 4.0 * eps + tol);
    out.check("case2_sphere_peak", push.case_deviation[1], 4.0 * eps + tol);
    out.check("case3_same_block", push.case_deviation[2], 2.0 * eps + tol);
    out.check("case4_cross_block", push.case_deviation[3], tol);

    let eps_pull = push.witness.quality + 1e-9;
    match kadets_pull(&push.witness, eps_pull, &gx, &gy, 1000, seed ^ 0x7fe)? {
        KadetsPullOutcome::Certificate(pull) => {
            out.measure("near_symmetry_max", pull.near_symmetry_max);
            out.check("near_symmetry", pull.near_symmetry_max, 8.0 * eps_pull + tol);
            out.check(
                "certificate_constant",
                (pull.certificate.eps - 17.0 * eps_pull).abs(),
                tol,
            );
            out.require("sphere_map_recovered", pull.sphere_map.perm == pi.perm);
        }
        KadetsPullOutcome::Violated { condition, detail } => {
            out.digest_value("violation", &format!("{condition}: {detail}"));
            out.require("pull_certifies", false);
        }
    }
    Ok(out)
}

/// Renorm push: permutation operators between renorms of metrics that agree
/// within 2r keep every probe deviation below 2 delta r ||x||_2 and report a
/// Banach-Mazur quality of at most 4 delta r.
fn trial_gh_to_renorm(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let n = cfg.size.max(2);
    let (alpha, delta) = (1.003, 0.002);
    let r = [0.05, 0.1, 0.2][(trial % 3) as usize];
    let bounds = ClassBounds::both(0.5, 1.0)?;
    let f = gen_metric(&bounds, n, seed)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x9e);

    // Random permutation, then g(pi n, pi m) = f(n, m) + noise within 2r.
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let pi = Bijection::new(perm)?;
    let mut g_dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (pi.apply(i), pi.apply(j));
            let v = (f.d(i, j) + rng.gen_range(-1.9 * r..1.9 * r)).clamp(0.5, 1.0);
            g_dist[a][b] = v;
            g_dist[b][a] = v;
        }
    }
    let g = FiniteMetricSpace::with_default_labels(g_dist, bounds)?;

    let spec_f = renorm_build(&f, alpha, delta, n)?;
    let spec_g = renorm_build(&g, alpha, delta, n)?;
    let probes: Vec<Vec<f64>> =
        (0..10_000).map(|_| (0..n).map(|_| gaussian(&mut rng)).collect()).collect();

    let mut out = TrialOutput::default();
    out.digest_space("f", &f);
    out.digest_space("g", &g);
    let push = renorm_push(&pi, r, &spec_f, &spec_g, &probes)?;
    out.check("probe_deviation_ratio", push.max_probe_deviation, 2.0 * delta * r + tol);
    out.check("bm_quality", push.witness.quality, 4.0 * delta * r + tol);
    Ok(out)
}

/// Variant sandwich for the Lipschitz distances, plus witness soundness for
/// each variant.
fn trial_lip_variants(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let tol = cfg.tol();
    let bounds = ClassBounds::both(1.0, 2.0)?;
    let n = cfg.size.max(2);
    let d = gen_metric(&bounds, n, seed)?;
    let e = if trial % 2 == 0 {
        gen_metric(&bounds, n, seed ^ 0xfeed)?
    } else {
        perturb_additive(&d, 0.4, seed ^ 0xfeed)?
    };
    let mut out = TrialOutput::default();
    out.digest_space("d", &d);
    out.digest_space("e", &e);
    let (bbi, wb) = lipschitz_exact(&d, &e, LipVariant::Bbi)?;
    let (gromov, wg) = lipschitz_exact(&d, &e, LipVariant::Gromov)?;
    let (dk, wd) = lipschitz_exact(&d, &e, LipVariant::Dk)?;
    out.measure("bbi", bbi);
    out.measure("gromov", gromov);
    out.measure("dk", dk);
    out.check("bbi_le_gromov", bbi, gromov + tol);
    out.check("gromov_le_2bbi", gromov, 2.0 * bbi + tol);
    out.check("dk_le_gromov", dk, gromov + tol);
    for (w, variant, name) in [
        (&wb, LipVariant::Bbi, "soundness_bbi"),
        (&wg, LipVariant::Gromov, "soundness_gromov"),
        (&wd, LipVariant::Dk, "soundness_dk"),
    ] {
        let re = crate::dist::lipschitz_measure(&d, &e, w.bijection()?, variant)?;
        out.check(name, (re - w.quality).abs(), tol);
    }
    Ok(out)
}

/// Metric axioms of every construction family, with at least 10^4 triangle
/// checks per family across the campaign.
fn trial_metric_axioms(cfg: &CampaignConfig, trial: u32, seed: u64) -> Result<TrialOutput> {
    let n = cfg.size.max(3);
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xa10);
    let mut out = TrialOutput::default();

    // Suspension: full validation (counts all triples).
    let d = gen_metric(&ClassBounds::both(0.5, 1.0)?, n, seed)?;
    let sus = suspend(&d, -3, 3)?; // suspend() validates internally
    out.measure("suspension_triples", (sus.space.n() as f64).powi(3));

    // Capped graph metric on a random weighted graph: full validation.
    let gn = 8;
    let mut edges = Vec::new();
    for u in 0..gn {
        for v in (u + 1)..gn {
            if rng.gen_bool(0.5) {
                edges.push((u, v, rng.gen_range(0.5..20.0)));
            }
        }
    }
    let labels = (0..gn).map(|i| format!("g{i}")).collect();
    let graph = crate::space::graph_metric_capped(labels, &edges, 15.0)?;
    let check = validate_metric(&graph, &ClassBounds::new(None, Some(15.0))?)?;
    out.require("graph_metric_valid", check.is_valid());
    out.measure("graph_triples", (gn as f64).powi(3));

    // Unitize: random planar points under a jittered polytopal norm.
    let norm2d = gen_polytopal_norm(2, 0.05, &mut rng);
    let pts: Vec<Vec<f64>> =
        (0..30).map(|_| (0..2).map(|_| 3.0 * gaussian(&mut rng)).collect()).collect();
    let uni = unitize(&norm2d, &pts)?; // validates internally
    out.measure("unitize_triples", (uni.n() as f64).powi(3));

    // Kadets gadget: full validation happens inside the builder.
    let norm3d = gen_polytopal_norm(3, 0.05, &mut rng);
    let sample = symmetric_sphere_sample(&norm3d, 4, seed ^ 0x77)?;
    let kg = kadets_gadget(&norm3d, &sample, 3)?;
    out.measure("kadets_triples", (kg.space.n() as f64).powi(3));

    // BM gadget: too large for cubic validation; sample 10^4 random
    // triangles.
    let mut a = vec![0.0; 3];
    a[0] = 1.0;
    let mut b = vec![0.0; 3];
    b[1] = 1.0;
    for c in a.iter_mut().chain(b.iter_mut()) {
        *c += 0.05 * gaussian(&mut rng);
    }
    let vectors = six_vectors(&a, &b);
    let (scalars, adds) = crate::reduce::detect_instances(&vectors, &default_rationals());
    let mut values = Vec::new();
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            values.push(norm_eval(&norm3d, &linalg::sub(&vectors[i], &vectors[j]))?);
        }
    }
    let cfg_g = BmGadgetConfig {
        rationals: default_rationals(),
        c_consts: covering_constants(&values)?,
        scalars,
        adds,
    };
    let g = bm_gadget(&norm3d, &vectors, &cfg_g)?;
    let checked = validate_triangles_sampled(&g.space, 10_000, seed ^ 0xbb)?;
    out.measure("bm_triples", checked as f64);
    out.require("bm_triangles_hold", checked == 10_000);

    let _ = trial;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_metric_is_deterministic_and_valid() {
        let bounds = ClassBounds::both(1.0, 2.0).unwrap();
        let a = gen_metric(&bounds, 5, 7).unwrap();
        let b = gen_metric(&bounds, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(digest_space(&a), digest_space(&b));
        let c = gen_metric(&bounds, 5, 8).unwrap();
        assert_ne!(a, c);
        // Wide bounds force the repair path.
        let wide = ClassBounds::both(2.0, 15.0).unwrap();
        let m = gen_metric(&wide, 6, 3).unwrap();
        assert!(validate_metric(&m, &wide).unwrap().is_valid());
        assert!(gen_metric(&bounds, 1, 0).is_err());
    }

    #[test]
    fn perturbation_respects_factor_and_bounds() {
        let bounds = ClassBounds::both(0.5, 1.0).unwrap();
        let d = gen_metric(&bounds, 4, 11).unwrap();
        let (e, w) = perturb_bilipschitz(&d, 1.2, 12).unwrap();
        assert!(w.quality <= 1.2f64.ln() + METRIC_TOL);
        assert!(validate_metric(&e, &bounds).unwrap().is_valid());
        let re =
            crate::dist::lipschitz_measure(&d, &e, w.bijection().unwrap(), LipVariant::Bbi)
                .unwrap();
        assert!((re - w.quality).abs() < METRIC_TOL);
        // Tiny factors give near-identical spaces.
        let (e, w) = perturb_bilipschitz(&d, 1.0 + 1e-12, 13).unwrap();
        assert!(w.quality < 1e-11);
        for i in 0..4 {
            for j in 0..4 {
                assert!((e.d(i, j) - d.d(i, j)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn campaign_reports_are_deterministic() {
        let cfg = CampaignConfig {
            theorem: TheoremId::GhBijEquiv,
            trials: 4,
            seed: 42,
            size: 4,
            tolerance: None,
        };
        let mut r1 = run_campaign(&cfg).unwrap();
        let mut r2 = run_campaign(&cfg).unwrap();
        r1.aggregate.wall_ms = 0;
        r2.aggregate.wall_ms = 0;
        assert_eq!(r1.to_json().unwrap(), r2.to_json().unwrap());
        assert!(r1.pass);
    }

    #[test]
    fn theorem_ids_parse_round_trip() {
        for t in TheoremId::ALL {
            let parsed: TheoremId = t.name().parse().unwrap();
            assert_eq!(parsed, t);
        }
        assert!("no-such-theorem".parse::<TheoremId>().is_err());
    }

    #[test]
    fn small_campaigns_pass() {
        // Smoke-test each pipeline with a couple of trials; the acceptance
        // suite runs the full criterion sizes.
        for (theorem, trials) in [
            (TheoremId::LipToGh, 3),
            (TheoremId::HlToGh, 3),
            (TheoremId::GhToRenorm, 2),
            (TheoremId::LipVariants, 4),
            (TheoremId::MetricAxioms, 1),
        ] {
            let cfg = CampaignConfig {
                theorem,
                trials,
                seed: 5,
                size: theorem.default_size(),
                tolerance: None,
            };
            let report = run_campaign(&cfg).unwrap();
            assert!(
                report.pass,
                "{} failed: {:?}",
                theorem.name(),
                report
                    .trials
                    .iter()
                    .filter(|t| t.status == TrialStatus::Fail)
                    .map(|t| t.message.clone())
                    .collect::<Vec<_>>()
            );
        }
    }
}
