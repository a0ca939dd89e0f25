//! Exact solvers for the pseudometrics restricted to finite instances:
//! Gromov-Hausdorff via correspondences, its bijective variant, Lipschitz
//! distance in three flavours, HL(ε)-closeness, and the coarse-Lipschitz
//! fit. Everything here is exact at desk scale; budgets guard against
//! instances that are too large for exhaustive certification.

use crate::error::{Error, Result};
use crate::space::{
    bijection_distortion, distortion, Bijection, Correspondence, FiniteMetricSpace, Witness,
    WitnessKind, WitnessPayload,
};

/// Hard node cap for the correspondence branch-and-bound.
pub const GH_NODE_BUDGET: u64 = 10_000_000;

/// Exhaustive enumeration is used instead of branch-and-bound below this
/// combined point count.
const EXHAUSTIVE_LIMIT: usize = 8;

/// Exact Gromov-Hausdorff distance of two finite metric spaces: half the
/// minimum distortion over all correspondences, with a minimizing
/// correspondence as witness.
pub fn gh_exact(ma: &FiniteMetricSpace, mb: &FiniteMetricSpace) -> Result<(f64, Witness)> {
    if ma.n() == 0 || mb.n() == 0 {
        return Err(Error::Domain("gh_exact requires nonempty spaces".into()));
    }
    let (dis, pairs) = if ma.n() + mb.n() <= EXHAUSTIVE_LIMIT {
        min_dis_exhaustive(ma, mb)
    } else {
        min_dis_bnb(ma, mb, GH_NODE_BUDGET)?
    };
    let corr = Correspondence::new(pairs, ma.n(), mb.n())?;
    let value = dis / 2.0;
    Ok((
        value,
        Witness {
            kind: WitnessKind::Gh,
            payload: WitnessPayload::Correspondence(corr),
            quality: value,
        },
    ))
}

/// Cheap two-sided bounds on the GH distance: the trivial diameter lower
/// bound and the distortion of a greedy correspondence as upper bound. This
/// is the fallback when `gh_exact` runs out of budget.
pub fn gh_bounds(ma: &FiniteMetricSpace, mb: &FiniteMetricSpace) -> (f64, f64) {
    let lower = 0.5 * (ma.diameter() - mb.diameter()).abs();
    let pairs = greedy_correspondence(ma, mb);
    let corr = Correspondence { pairs: pairs.into_iter().collect() };
    let upper = distortion(ma, mb, &corr).map(|d| d / 2.0).unwrap_or(f64::INFINITY);
    (lower, upper)
}

/// Bijective GH variant: half the minimum over bijections of the sup
/// distance gap. Always at least `gh_exact`; equal to it when both spaces
/// have off-diagonal values >= p and the value is below p/2.
pub fn gh_bijective(ma: &FiniteMetricSpace, mb: &FiniteMetricSpace) -> Result<(f64, Witness)> {
    if ma.n() != mb.n() {
        return Err(Error::Domain(format!(
            "gh_bijective requires equal cardinalities, got {} and {}",
            ma.n(),
            mb.n()
        )));
    }
    let (dis, perm) = min_bijection_dis(ma, mb, GH_NODE_BUDGET)?;
    let value = dis / 2.0;
    Ok((
        value,
        Witness {
            kind: WitnessKind::Gh,
            payload: WitnessPayload::Bijection(Bijection { perm }),
            quality: value,
        },
    ))
}

/// The three textbook variants of the Lipschitz distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipVariant {
    /// log max{Lip(T), Lip(T^-1)}
    Bbi,
    /// |log Lip(T)| + |log Lip(T^-1)|
    Gromov,
    /// log (Lip(T) * Lip(T^-1))
    Dk,
}

impl std::str::FromStr for LipVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bbi" => Ok(LipVariant::Bbi),
            "gromov" => Ok(LipVariant::Gromov),
            "dk" => Ok(LipVariant::Dk),
            other => Err(Error::Config(format!("unknown Lipschitz variant '{other}'"))),
        }
    }
}

fn lip_objective(variant: LipVariant, max_ratio: f64, min_ratio: f64) -> f64 {
    let lip = max_ratio;
    let lip_inv = 1.0 / min_ratio;
    match variant {
        LipVariant::Bbi => lip.max(lip_inv).ln(),
        LipVariant::Gromov => lip.ln().abs() + lip_inv.ln().abs(),
        LipVariant::Dk => (lip * lip_inv).ln(),
    }
}

/// Valid lower bound on the final objective given partial ratio extremes;
/// used for pruning (`max_ratio` can only grow, `min_ratio` only shrink).
fn lip_lower_bound(variant: LipVariant, max_ratio: f64, min_ratio: f64) -> f64 {
    match variant {
        LipVariant::Bbi => max_ratio.max(1.0 / min_ratio).max(1.0).ln(),
        LipVariant::Dk => (max_ratio / min_ratio).max(1.0).ln(),
        LipVariant::Gromov => {
            let spread = (max_ratio / min_ratio).max(1.0).ln();
            let grow = if max_ratio >= 1.0 { max_ratio.ln() } else { 0.0 }
                + if min_ratio <= 1.0 { -min_ratio.ln() } else { 0.0 };
            spread.max(grow)
        }
    }
}

/// Exact Lipschitz distance over bijections for the chosen variant, with the
/// minimizing bijection as witness. Requires equal cardinality; the solver
/// never proxies over injections.
pub fn lipschitz_exact(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
    variant: LipVariant,
) -> Result<(f64, Witness)> {
    let n = ma.n();
    if n != mb.n() {
        return Err(Error::Domain(format!(
            "lipschitz_exact requires equal cardinalities, got {n} and {}",
            mb.n()
        )));
    }
    for m in [ma, mb] {
        for i in 0..m.n() {
            for j in (i + 1)..m.n() {
                if m.d(i, j) <= 0.0 {
                    return Err(Error::Domain(format!(
                        "lipschitz_exact requires positive off-diagonal distances, d({i},{j}) = {}",
                        m.d(i, j)
                    )));
                }
            }
        }
    }
    if n <= 1 {
        return Ok((
            0.0,
            Witness {
                kind: WitnessKind::Lip,
                payload: WitnessPayload::Bijection(Bijection::identity(n)),
                quality: 0.0,
            },
        ));
    }

    struct S<'a> {
        ma: &'a FiniteMetricSpace,
        mb: &'a FiniteMetricSpace,
        variant: LipVariant,
        assigned: Vec<usize>,
        used: Vec<bool>,
        best: f64,
        best_perm: Vec<usize>,
        nodes: u64,
    }
    impl S<'_> {
        fn recurse(&mut self, max_ratio: f64, min_ratio: f64) -> Result<()> {
            self.nodes += 1;
            if self.nodes > GH_NODE_BUDGET {
                return Err(Error::Resource(
                    "lipschitz_exact exceeded its node budget".into(),
                ));
            }
            let i = self.assigned.len();
            let n = self.ma.n();
            if i == n {
                let obj = lip_objective(self.variant, max_ratio, min_ratio);
                if obj < self.best {
                    self.best = obj;
                    self.best_perm = self.assigned.clone();
                }
                return Ok(());
            }
            for j in 0..n {
                if self.used[j] {
                    continue;
                }
                let mut mx = max_ratio;
                let mut mn = min_ratio;
                for (p, &q) in self.assigned.iter().enumerate() {
                    let r = self.mb.d(j, q) / self.ma.d(i, p);
                    if r > mx {
                        mx = r;
                    }
                    if r < mn {
                        mn = r;
                    }
                }
                if lip_lower_bound(self.variant, mx, mn) < self.best - 1e-15 {
                    self.assigned.push(j);
                    self.used[j] = true;
                    self.recurse(mx, mn)?;
                    self.assigned.pop();
                    self.used[j] = false;
                }
            }
            Ok(())
        }
    }

    let mut s = S {
        ma,
        mb,
        variant,
        assigned: Vec::with_capacity(n),
        used: vec![false; n],
        best: f64::INFINITY,
        best_perm: Vec::new(),
        nodes: 0,
    };
    s.recurse(0.0, f64::INFINITY)?;
    let value = s.best;
    Ok((
        value,
        Witness {
            kind: WitnessKind::Lip,
            payload: WitnessPayload::Bijection(Bijection { perm: s.best_perm }),
            quality: value,
        },
    ))
}

/// Measures the variant objective of a concrete bijection; re-measurement
/// companion of `lipschitz_exact` witnesses.
pub fn lipschitz_measure(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
    pi: &Bijection,
    variant: LipVariant,
) -> Result<f64> {
    if pi.n() != ma.n() || ma.n() != mb.n() {
        return Err(Error::Structural("bijection/space size mismatch".into()));
    }
    let n = ma.n();
    if n <= 1 {
        return Ok(0.0);
    }
    let mut max_ratio = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = mb.d(pi.apply(i), pi.apply(j)) / ma.d(i, j);
            max_ratio = max_ratio.max(r);
            min_ratio = min_ratio.min(r);
        }
    }
    Ok(lip_objective(variant, max_ratio, min_ratio))
}

/// The ε a concrete correspondence needs for HL(ε)-closeness of (d, e).
pub fn hl_measure(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
    r: &Correspondence,
) -> Result<f64> {
    for &(i, j) in &r.pairs {
        if i >= ma.n() || j >= mb.n() {
            return Err(Error::Structural("correspondence index out of range".into()));
        }
    }
    let pairs: Vec<(usize, usize)> = r.pairs.iter().copied().collect();
    let mut eps = 0.0f64;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[a..] {
            eps = eps.max(hl_required(ma.d(i, i2), mb.d(j, j2)));
        }
    }
    Ok(eps)
}

#[inline]
fn hl_required(d: f64, e: f64) -> f64 {
    let fwd = (e - d) / d.max(1.0);
    let bwd = (d - e) / e.max(1.0);
    fwd.max(bwd).max(0.0)
}

/// Minimal ε for which some correspondence witnesses HL(ε)-closeness,
/// located by bisection (tolerance 1e-6) with correspondence search as the
/// feasibility test. The returned value is the exact ε of the returned
/// witness, so re-measuring the witness reproduces it.
pub fn hl_closeness(ma: &FiniteMetricSpace, mb: &FiniteMetricSpace) -> Result<(f64, Witness)> {
    if ma.n() == 0 || mb.n() == 0 {
        return Err(Error::Domain("hl_closeness requires nonempty spaces".into()));
    }
    let full = Correspondence::full(ma.n(), mb.n());
    let hi0 = hl_measure(ma, mb, &full)?;

    let mut nodes_left = GH_NODE_BUDGET;
    let feasible = |eps: f64, nodes_left: &mut u64| -> Result<Option<Vec<(usize, usize)>>> {
        let compat = |p: (usize, usize), q: (usize, usize)| {
            hl_required(ma.d(p.0, q.0), mb.d(p.1, q.1)) <= eps
        };
        find_correspondence(ma.n(), mb.n(), compat, nodes_left)
    };

    let mut best_pairs = full.pairs.iter().copied().collect::<Vec<_>>();
    if let Some(r) = feasible(0.0, &mut nodes_left)? {
        let corr = Correspondence::new(r, ma.n(), mb.n())?;
        let q = hl_measure(ma, mb, &corr)?;
        return Ok((q, hl_witness(corr, q)));
    }
    let (mut lo, mut hi) = (0.0f64, hi0);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        match feasible(mid, &mut nodes_left)? {
            Some(r) => {
                hi = mid;
                best_pairs = r;
            }
            None => lo = mid,
        }
    }
    let corr = Correspondence::new(best_pairs, ma.n(), mb.n())?;
    let q = hl_measure(ma, mb, &corr)?;
    Ok((q, hl_witness(corr, q)))
}

fn hl_witness(corr: Correspondence, quality: f64) -> Witness {
    Witness { kind: WitnessKind::Hl, payload: WitnessPayload::Correspondence(corr), quality }
}

/// φ₁(ε) = exp(ε) − 1 + 2ε·exp(ε) + 4ε, the forward HL modulus.
pub fn phi1(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("phi1 requires eps > 0, got {eps}")));
    }
    Ok(eps.exp() - 1.0 + 2.0 * eps * eps.exp() + 4.0 * eps)
}

/// φ₂(ε) = 2ε + 2√ε + log(1 + max{ε, √ε}) + ε·max{1, ε + √ε}, the backward
/// HL modulus.
pub fn phi2(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("phi2 requires eps > 0, got {eps}")));
    }
    let root = eps.sqrt();
    Ok(2.0 * eps + 2.0 * root + (1.0 + eps.max(root)).ln() + eps * (eps + root).max(1.0))
}

/// Fits the tightest coarse-Lipschitz envelope `image <= A*source + B` to a
/// sample of (source distance, image distance) pairs: A is the largest
/// upward increment slope the data exhibits (the minimal asymptotically
/// valid multiplier), then B is the minimal offset for that A.
pub fn coarse_lipschitz_fit(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.is_empty() {
        return Err(Error::Domain("coarse_lipschitz_fit requires a nonempty sample".into()));
    }
    for &(s, t) in pairs {
        if !(s >= 0.0 && t >= 0.0) || !s.is_finite() || !t.is_finite() {
            return Err(Error::Value(format!("invalid pair ({s}, {t})")));
        }
    }
    let mut a: f64 = 0.0;
    for (i, &(si, ti)) in pairs.iter().enumerate() {
        for &(sj, tj) in &pairs[i + 1..] {
            let (s0, t0, s1, t1) = if si < sj { (si, ti, sj, tj) } else { (sj, tj, si, ti) };
            if s1 > s0 {
                a = a.max((t1 - t0) / (s1 - s0));
            }
        }
    }
    let b = pairs.iter().map(|&(s, t)| t - a * s).fold(0.0f64, f64::max);
    Ok((a, b))
}

// ---------------------------------------------------------------------------
// correspondence search internals
// ---------------------------------------------------------------------------

/// Any correspondence contains one of the form graph(f) ∪ graph(g) with
/// f: A→B total and g defined on the points of B missed by f, and distortion
/// only shrinks when passing to it. All searches below therefore range over
/// these minimal structures.
fn min_dis_bnb(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
    budget: u64,
) -> Result<(f64, Vec<(usize, usize)>)> {
    if ma.n() > mb.n() {
        let (dis, pairs) = min_dis_bnb(mb, ma, budget)?;
        return Ok((dis, pairs.into_iter().map(|(i, j)| (j, i)).collect()));
    }
    let na = ma.n();
    let nb = mb.n();

    // Seed the incumbent with a greedy correspondence and, on equal sizes,
    // the optimal bijection.
    let greedy = greedy_correspondence(ma, mb);
    let gcorr = Correspondence { pairs: greedy.iter().copied().collect() };
    let mut best = distortion(ma, mb, &gcorr)?;
    let mut best_pairs = greedy;
    if na == nb {
        let (bdis, perm) = min_bijection_dis(ma, mb, budget / 4)?;
        if bdis < best {
            best = bdis;
            best_pairs = perm.iter().enumerate().map(|(i, j)| (i, *j)).collect();
        }
    }

    struct S<'a> {
        ma: &'a FiniteMetricSpace,
        mb: &'a FiniteMetricSpace,
        chosen: Vec<(usize, usize)>,
        partner: Vec<Option<usize>>,
        covered: Vec<bool>,
        best: f64,
        best_pairs: Vec<(usize, usize)>,
        nodes: u64,
        budget: u64,
    }
    impl S<'_> {
        fn added_dis(&self, a: usize, b: usize) -> f64 {
            let mut m = 0.0f64;
            for &(p, q) in &self.chosen {
                let gap = (self.ma.d(a, p) - self.mb.d(b, q)).abs();
                if gap > m {
                    m = gap;
                }
            }
            m
        }

        fn recurse(&mut self, cur: f64) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::Resource(format!(
                    "gh_exact exceeded its node budget of {}; use gh_bounds for this instance",
                    self.budget
                )));
            }
            // Phase 1: branch on the unassigned source point with the fewest
            // admissible partners.
            let mut next_a: Option<(usize, Vec<(f64, usize)>)> = None;
            for a in 0..self.partner.len() {
                if self.partner[a].is_some() {
                    continue;
                }
                let mut cands: Vec<(f64, usize)> = Vec::new();
                for b in 0..self.covered.len() {
                    let add = self.added_dis(a, b);
                    if cur.max(add) < self.best {
                        cands.push((add, b));
                    }
                }
                if cands.is_empty() {
                    return Ok(()); // dead end
                }
                if next_a.as_ref().map_or(true, |(_, c)| cands.len() < c.len()) {
                    next_a = Some((a, cands));
                }
            }
            if let Some((a, mut cands)) = next_a {
                cands.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                for (add, b) in cands {
                    let ncur = cur.max(add);
                    if ncur >= self.best {
                        continue; // incumbent may have improved
                    }
                    self.partner[a] = Some(b);
                    let was_covered = self.covered[b];
                    self.covered[b] = true;
                    self.chosen.push((a, b));
                    self.recurse(ncur)?;
                    self.chosen.pop();
                    self.covered[b] = was_covered;
                    self.partner[a] = None;
                }
                return Ok(());
            }
            // Phase 2: cover the points of B missed by f.
            let mut next_b: Option<(usize, Vec<(f64, usize)>)> = None;
            for b in 0..self.covered.len() {
                if self.covered[b] {
                    continue;
                }
                let mut cands: Vec<(f64, usize)> = Vec::new();
                for a in 0..self.partner.len() {
                    let add = self.added_dis(a, b);
                    if cur.max(add) < self.best {
                        cands.push((add, a));
                    }
                }
                if cands.is_empty() {
                    return Ok(());
                }
                if next_b.as_ref().map_or(true, |(_, c)| cands.len() < c.len()) {
                    next_b = Some((b, cands));
                }
            }
            let Some((b, mut cands)) = next_b else {
                if cur < self.best {
                    self.best = cur;
                    self.best_pairs = self.chosen.clone();
                }
                return Ok(());
            };
            cands.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            for (add, a) in cands {
                let ncur = cur.max(add);
                if ncur >= self.best {
                    continue;
                }
                self.covered[b] = true;
                self.chosen.push((a, b));
                self.recurse(ncur)?;
                self.chosen.pop();
                self.covered[b] = false;
            }
            Ok(())
        }
    }

    let mut s = S {
        ma,
        mb,
        chosen: Vec::new(),
        partner: vec![None; na],
        covered: vec![false; nb],
        best,
        best_pairs: best_pairs.clone(),
        nodes: 0,
        budget,
    };
    s.recurse(0.0)?;
    Ok((s.best, s.best_pairs))
}

/// Plain exhaustive enumeration over minimal correspondences; exact and
/// oblivious to pruning, used below the size threshold and as a reference in
/// tests.
fn min_dis_exhaustive(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
) -> (f64, Vec<(usize, usize)>) {
    if ma.n() > mb.n() {
        let (dis, pairs) = min_dis_exhaustive(mb, ma);
        return (dis, pairs.into_iter().map(|(i, j)| (j, i)).collect());
    }
    let na = ma.n();
    let nb = mb.n();
    let mut best = f64::INFINITY;
    let mut best_pairs = Vec::new();

    let eval = |pairs: &[(usize, usize)]| -> f64 {
        let mut m = 0.0f64;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for &(a2, b2) in &pairs[i..] {
                let gap = (ma.d(a, a2) - mb.d(b, b2)).abs();
                if gap > m {
                    m = gap;
                }
            }
        }
        m
    };

    let mut f = vec![0usize; na];
    loop {
        let covered: Vec<bool> = {
            let mut c = vec![false; nb];
            for &b in &f {
                c[b] = true;
            }
            c
        };
        let missing: Vec<usize> = (0..nb).filter(|&b| !covered[b]).collect();
        let mut g = vec![0usize; missing.len()];
        loop {
            let mut pairs: Vec<(usize, usize)> =
                f.iter().enumerate().map(|(a, &b)| (a, b)).collect();
            pairs.extend(missing.iter().enumerate().map(|(k, &b)| (g[k], b)));
            let dis = eval(&pairs);
            if dis < best {
                best = dis;
                best_pairs = pairs;
            }
            // odometer over g
            let mut k = 0;
            loop {
                if k == g.len() {
                    break;
                }
                g[k] += 1;
                if g[k] < na {
                    break;
                }
                g[k] = 0;
                k += 1;
            }
            if k == g.len() {
                break;
            }
        }
        // odometer over f
        let mut k = 0;
        loop {
            if k == f.len() {
                break;
            }
            f[k] += 1;
            if f[k] < nb {
                break;
            }
            f[k] = 0;
            k += 1;
        }
        if k == f.len() {
            break;
        }
    }
    (best, best_pairs)
}

fn greedy_correspondence(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
) -> Vec<(usize, usize)> {
    // Match points by eccentricity profile, then cover what is left.
    let ecc = |m: &FiniteMetricSpace, i: usize| -> f64 {
        (0..m.n()).map(|j| m.d(i, j)).fold(0.0, f64::max)
    };
    let mut pairs = Vec::new();
    let mut covered = vec![false; mb.n()];
    for a in 0..ma.n() {
        let ea = ecc(ma, a);
        let b = (0..mb.n())
            .min_by(|&x, &y| {
                let gx = (ecc(mb, x) - ea).abs();
                let gy = (ecc(mb, y) - ea).abs();
                gx.partial_cmp(&gy).unwrap()
            })
            .unwrap();
        pairs.push((a, b));
        covered[b] = true;
    }
    for b in 0..mb.n() {
        if !covered[b] {
            let eb = ecc(mb, b);
            let a = (0..ma.n())
                .min_by(|&x, &y| {
                    let gx = (ecc(ma, x) - eb).abs();
                    let gy = (ecc(ma, y) - eb).abs();
                    gx.partial_cmp(&gy).unwrap()
                })
                .unwrap();
            pairs.push((a, b));
        }
    }
    pairs
}

fn min_bijection_dis(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
    budget: u64,
) -> Result<(f64, Vec<usize>)> {
    let n = ma.n();
    struct S<'a> {
        ma: &'a FiniteMetricSpace,
        mb: &'a FiniteMetricSpace,
        assigned: Vec<usize>,
        used: Vec<bool>,
        best: f64,
        best_perm: Vec<usize>,
        nodes: u64,
        budget: u64,
    }
    impl S<'_> {
        fn recurse(&mut self, cur: f64) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::Resource("bijection search exceeded its node budget".into()));
            }
            let i = self.assigned.len();
            if i == self.ma.n() {
                if cur < self.best {
                    self.best = cur;
                    self.best_perm = self.assigned.clone();
                }
                return Ok(());
            }
            for j in 0..self.mb.n() {
                if self.used[j] {
                    continue;
                }
                let mut ncur = cur;
                for (p, &q) in self.assigned.iter().enumerate() {
                    let gap = (self.ma.d(i, p) - self.mb.d(j, q)).abs();
                    if gap > ncur {
                        ncur = gap;
                    }
                }
                if ncur < self.best {
                    self.assigned.push(j);
                    self.used[j] = true;
                    self.recurse(ncur)?;
                    self.assigned.pop();
                    self.used[j] = false;
                }
            }
            Ok(())
        }
    }
    let mut s = S {
        ma,
        mb,
        assigned: Vec::with_capacity(n),
        used: vec![false; n],
        best: f64::INFINITY,
        best_perm: (0..n).collect(),
        nodes: 0,
        budget,
    };
    // Identity as incumbent so best_perm is always a valid permutation.
    s.best = bijection_distortion(ma, mb, &Bijection::identity(n))?;
    s.recurse(0.0)?;
    Ok((s.best, s.best_perm))
}

/// Searches for a correspondence all of whose pairs are pairwise compatible
/// under `compat`; `nodes_left` is decremented across calls so bisection
/// loops share one budget.
fn find_correspondence<F: Fn((usize, usize), (usize, usize)) -> bool>(
    na: usize,
    nb: usize,
    compat: F,
    nodes_left: &mut u64,
) -> Result<Option<Vec<(usize, usize)>>> {
    struct S<'a, F> {
        na: usize,
        nb: usize,
        compat: F,
        chosen: Vec<(usize, usize)>,
        partner: Vec<Option<usize>>,
        covered: Vec<bool>,
        nodes_left: &'a mut u64,
        found: Option<Vec<(usize, usize)>>,
    }
    impl<F: Fn((usize, usize), (usize, usize)) -> bool> S<'_, F> {
        fn ok(&self, a: usize, b: usize) -> bool {
            self.chosen.iter().all(|&p| (self.compat)(p, (a, b)))
        }
        fn recurse(&mut self) -> Result<bool> {
            if *self.nodes_left == 0 {
                return Err(Error::Resource(
                    "correspondence feasibility search exceeded its node budget".into(),
                ));
            }
            *self.nodes_left -= 1;
            let mut next_a: Option<(usize, Vec<usize>)> = None;
            for a in 0..self.na {
                if self.partner[a].is_some() {
                    continue;
                }
                let cands: Vec<usize> = (0..self.nb).filter(|&b| self.ok(a, b)).collect();
                if cands.is_empty() {
                    return Ok(false);
                }
                if next_a.as_ref().map_or(true, |(_, c)| cands.len() < c.len()) {
                    next_a = Some((a, cands));
                }
            }
            if let Some((a, cands)) = next_a {
                for b in cands {
                    self.partner[a] = Some(b);
                    let was = self.covered[b];
                    self.covered[b] = true;
                    self.chosen.push((a, b));
                    if self.recurse()? {
                        return Ok(true);
                    }
                    self.chosen.pop();
                    self.covered[b] = was;
                    self.partner[a] = None;
                }
                return Ok(false);
            }
            let mut next_b: Option<(usize, Vec<usize>)> = None;
            for b in 0..self.nb {
                if self.covered[b] {
                    continue;
                }
                let cands: Vec<usize> = (0..self.na).filter(|&a| self.ok(a, b)).collect();
                if cands.is_empty() {
                    return Ok(false);
                }
                if next_b.as_ref().map_or(true, |(_, c)| cands.len() < c.len()) {
                    next_b = Some((b, cands));
                }
            }
            let Some((b, cands)) = next_b else {
                self.found = Some(self.chosen.clone());
                return Ok(true);
            };
            for a in cands {
                self.covered[b] = true;
                self.chosen.push((a, b));
                if self.recurse()? {
                    return Ok(true);
                }
                self.chosen.pop();
                self.covered[b] = false;
            }
            Ok(false)
        }
    }
    let mut s = S {
        na,
        nb,
        compat,
        chosen: Vec::new(),
        partner: vec![None; na],
        covered: vec![false; nb],
        nodes_left,
        found: None,
    };
    s.recurse()?;
    Ok(s.found)
}
