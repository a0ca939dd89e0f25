//! Finite metric spaces, relations between their point sets, and
//! metric-building utilities (Hausdorff distance, greedy nets, capped
//! graph metrics).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every distance comparison in the crate: triangle
/// checks, class-bound checks, witness re-measurement, certified bounds.
/// Constructions mix dyadic and irrational values, so a single global
/// constant keeps the asserted bounds auditable.
pub const METRIC_TOL: f64 = 1e-9;

/// Optional lower/upper bounds on the off-diagonal values of a metric;
/// `lower = p`, `upper = q` carve out the classes of metrics with values in
/// `{0} ∪ [p, ∞)`, `[0, q]` and `{0} ∪ [p, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassBounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl ClassBounds {
    pub fn none() -> Self {
        ClassBounds { lower: None, upper: None }
    }

    pub fn new(lower: Option<f64>, upper: Option<f64>) -> Result<Self> {
        if let Some(p) = lower {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::Value(format!("lower bound must be positive, got {p}")));
            }
        }
        if let Some(q) = upper {
            if !q.is_finite() || q <= 0.0 {
                return Err(Error::Value(format!("upper bound must be positive, got {q}")));
            }
        }
        if let (Some(p), Some(q)) = (lower, upper) {
            if p >= q {
                return Err(Error::Value(format!("bounds require lower < upper, got [{p}, {q}]")));
            }
        }
        Ok(ClassBounds { lower, upper })
    }

    pub fn both(p: f64, q: f64) -> Result<Self> {
        Self::new(Some(p), Some(q))
    }
}

/// A finite metric space given by point labels and a symmetric distance
/// matrix, with optional class bounds carried as metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    #[serde(default)]
    pub bounds: ClassBounds,
}

impl FiniteMetricSpace {
    /// Builds a space after structural checks only (squareness, finiteness,
    /// non-negativity). Metric axioms are checked by [`validate_metric`].
    pub fn from_matrix(
        labels: Vec<String>,
        dist: Vec<Vec<f64>>,
        bounds: ClassBounds,
    ) -> Result<Self> {
        let n = labels.len();
        if dist.len() != n {
            return Err(Error::Structural(format!(
                "matrix has {} rows for {} labels",
                dist.len(),
                n
            )));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "row {i} has length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v.is_nan() || !v.is_finite() {
                    return Err(Error::Value(format!("dist[{i}][{j}] is not finite")));
                }
                if v < 0.0 {
                    return Err(Error::Value(format!("dist[{i}][{j}] = {v} is negative")));
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist, bounds })
    }

    /// Points indexed 0..n with default labels `p0, p1, ...`.
    pub fn with_default_labels(dist: Vec<Vec<f64>>, bounds: ClassBounds) -> Result<Self> {
        let labels = (0..dist.len()).map(|i| format!("p{i}")).collect();
        Self::from_matrix(labels, dist, bounds)
    }

    /// Points on the real line; handy for small test instances.
    pub fn from_line_points(points: &[f64]) -> Result<Self> {
        let n = points.len();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| (points[i] - points[j]).abs()).collect())
            .collect();
        Self::with_default_labels(dist, ClassBounds::none())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn diameter(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.dist {
            for &v in row {
                if v > m {
                    m = v;
                }
            }
        }
        m
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FiniteMetricSpace = serde_json::from_str(s)?;
        Self::from_matrix(raw.labels, raw.dist, raw.bounds)
    }
}

/// One violated metric axiom, with enough indices to locate it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MetricViolation {
    NonzeroDiagonal { i: usize, value: f64 },
    Asymmetry { i: usize, j: usize, dij: f64, dji: f64 },
    NonpositiveOffDiagonal { i: usize, j: usize, value: f64 },
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
    BelowLower { i: usize, j: usize, value: f64, lower: f64 },
    AboveUpper { i: usize, j: usize, value: f64, upper: f64 },
}

/// Outcome of [`validate_metric`]: every violated axiom, not just the first.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationResult {
    pub violations: Vec<MetricViolation>,
}

impl ValidationResult {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every metric axiom (zero diagonal, symmetry, positivity, triangle
/// inequality within [`METRIC_TOL`]) plus the class bounds `b`, reporting all
/// violations. Structural problems (non-square, NaN, negatives) error out
/// instead because no meaningful report exists for them.
pub fn validate_metric(m: &FiniteMetricSpace, b: &ClassBounds) -> Result<ValidationResult> {
    // Re-run structural checks so spaces built by hand get them too.
    let checked = FiniteMetricSpace::from_matrix(m.labels.clone(), m.dist.clone(), m.bounds)?;
    let n = checked.n();
    let mut out = ValidationResult::default();
    for i in 0..n {
        if checked.d(i, i) != 0.0 {
            out.violations.push(MetricViolation::NonzeroDiagonal { i, value: checked.d(i, i) });
        }
        for j in (i + 1)..n {
            let dij = checked.d(i, j);
            let dji = checked.d(j, i);
            if dij != dji {
                out.violations.push(MetricViolation::Asymmetry { i, j, dij, dji });
            }
            if dij <= 0.0 {
                out.violations
                    .push(MetricViolation::NonpositiveOffDiagonal { i, j, value: dij });
            }
            if let Some(p) = b.lower {
                if dij < p - METRIC_TOL {
                    out.violations.push(MetricViolation::BelowLower { i, j, value: dij, lower: p });
                }
            }
            if let Some(q) = b.upper {
                if dij > q + METRIC_TOL {
                    out.violations.push(MetricViolation::AboveUpper { i, j, value: dij, upper: q });
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let excess = checked.d(i, k) - checked.d(i, j) - checked.d(j, k);
                if excess > METRIC_TOL {
                    out.violations.push(MetricViolation::Triangle { i, j, k, excess });
                }
            }
        }
    }
    Ok(out)
}

/// Triangle-inequality spot check on `trials` random index triples; used for
/// constructions too large to validate exhaustively.
pub fn validate_triangles_sampled(
    m: &FiniteMetricSpace,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    use rand::{Rng, SeedableRng};
    let n = m.n();
    if n < 3 {
        return Ok(0);
    }
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut checked = 0;
    for _ in 0..trials {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let k = rng.gen_range(0..n);
        let excess = m.d(i, k) - m.d(i, j) - m.d(j, k);
        if excess > METRIC_TOL {
            return Err(Error::Assertion(format!(
                "triangle violation at ({i},{j},{k}): excess {excess:.3e}"
            )));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Two-sided Hausdorff distance between nonempty subsets `a` and `b` of the
/// ambient space: `max{sup_{x∈a} d(x,b), sup_{y∈b} d(y,a)}`.
pub fn hausdorff_distance(ambient: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("hausdorff_distance requires nonempty subsets".into()));
    }
    let n = ambient.n();
    for &i in a.iter().chain(b.iter()) {
        if i >= n {
            return Err(Error::Structural(format!("subset index {i} out of range for n={n}")));
        }
    }
    let side = |from: &[usize], to: &[usize]| -> f64 {
        from.iter()
            .map(|&x| {
                to.iter().map(|&y| ambient.d(x, y)).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(side(a, b).max(side(b, a)))
}

/// A binary relation between two index sets whose projections are both onto;
/// the universal closeness witness for the Gromov-Hausdorff distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Correspondence {
    /// Validates the coverage invariant against the two point-set sizes.
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(
        pairs: I,
        n_left: usize,
        n_right: usize,
    ) -> Result<Self> {
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        let mut left = vec![false; n_left];
        let mut right = vec![false; n_right];
        for &(i, j) in &pairs {
            if i >= n_left || j >= n_right {
                return Err(Error::Structural(format!(
                    "pair ({i},{j}) out of range for sizes ({n_left},{n_right})"
                )));
            }
            left[i] = true;
            right[j] = true;
        }
        if let Some(i) = left.iter().position(|c| !c) {
            return Err(Error::Structural(format!("left point {i} is unmatched")));
        }
        if let Some(j) = right.iter().position(|c| !c) {
            return Err(Error::Structural(format!("right point {j} is unmatched")));
        }
        Ok(Correspondence { pairs })
    }

    pub fn identity(n: usize) -> Self {
        Correspondence { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn full(n_left: usize, n_right: usize) -> Self {
        let mut pairs = BTreeSet::new();
        for i in 0..n_left {
            for j in 0..n_right {
                pairs.insert((i, j));
            }
        }
        Correspondence { pairs }
    }

    pub fn from_bijection(b: &Bijection) -> Self {
        Correspondence { pairs: b.perm.iter().enumerate().map(|(i, &j)| (i, j)).collect() }
    }

    pub fn inverse(&self) -> Self {
        Correspondence { pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect() }
    }

    /// Right partners of `i`.
    pub fn image_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().filter(move |&&(a, _)| a == i).map(|&(_, b)| b)
    }

    /// Left partners of `j`.
    pub fn preimage_of(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().filter(move |&&(_, b)| b == j).map(|&(a, _)| a)
    }
}

/// A permutation of `{0..n-1}` used as a point-set bijection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bijection {
    pub perm: Vec<usize>,
}

impl Bijection {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Structural(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Bijection { perm })
    }

    pub fn identity(n: usize) -> Self {
        Bijection { perm: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        Bijection { perm: inv }
    }
}

/// Exact distortion of a correspondence: `sup |d(i,i') - e(j,j')|` over all
/// pairs of related pairs.
pub fn distortion(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
    r: &Correspondence,
) -> Result<f64> {
    for &(i, j) in &r.pairs {
        if i >= ma.n() || j >= mb.n() {
            return Err(Error::Structural(format!(
                "correspondence pair ({i},{j}) out of range for sizes ({},{})",
                ma.n(),
                mb.n()
            )));
        }
    }
    let pairs: Vec<(usize, usize)> = r.pairs.iter().copied().collect();
    let mut dis = 0.0f64;
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[idx..] {
            let gap = (ma.d(i, i2) - mb.d(j, j2)).abs();
            if gap > dis {
                dis = gap;
            }
        }
    }
    Ok(dis)
}

/// Distortion of a bijection: `max |d(i,i') - e(π(i),π(i'))|`.
pub fn bijection_distortion(
    ma: &FiniteMetricSpace,
    mb: &FiniteMetricSpace,
    pi: &Bijection,
) -> Result<f64> {
    if pi.n() != ma.n() || ma.n() != mb.n() {
        return Err(Error::Structural("bijection/space size mismatch".into()));
    }
    let n = ma.n();
    let mut dis = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (ma.d(i, j) - mb.d(pi.apply(i), pi.apply(j))).abs();
            if gap > dis {
                dis = gap;
            }
        }
    }
    Ok(dis)
}

/// Maximal eps-separated subset built by a first-index greedy scan. The
/// result is eps-separated and eps-dominating (an (eps,eps)-net); ties are
/// broken by lowest index so runs are reproducible.
pub fn greedy_net(m: &FiniteMetricSpace, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("net separation must be positive, got {eps}")));
    }
    let mut net: Vec<usize> = Vec::new();
    for i in 0..m.n() {
        if net.iter().all(|&j| m.d(i, j) >= eps) {
            net.push(i);
        }
    }
    Ok(net)
}

/// All-pairs shortest-path metric of a positively weighted graph with every
/// value clamped to `cap`; disconnected pairs get `cap`. This is the greatest
/// metric extension of the edge weights bounded by `cap`.
pub fn graph_metric_capped(
    labels: Vec<String>,
    edges: &[(usize, usize, f64)],
    cap: f64,
) -> Result<FiniteMetricSpace> {
    if !(cap > 0.0) || !cap.is_finite() {
        return Err(Error::Domain(format!("cap must be positive, got {cap}")));
    }
    let n = labels.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in edges {
        if u >= n || v >= n {
            return Err(Error::Structural(format!("edge ({u},{v}) out of range for n={n}")));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Domain(format!("edge ({u},{v}) has non-positive weight {w}")));
        }
        if u == v {
            continue;
        }
        adj[u].push((v, w));
        adj[v].push((u, w));
    }

    // Dijkstra per source, abandoning paths once they pass the cap; anything
    // unreached is at least cap away.
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.partial_cmp(&other.0).unwrap_or(std::cmp::Ordering::Equal)
        }
    }

    let mut dist = vec![vec![cap; n]; n];
    for s in 0..n {
        let mut best = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        best[s] = 0.0;
        heap.push(Reverse(Entry(0.0, s)));
        while let Some(Reverse(Entry(du, u))) = heap.pop() {
            if du > best[u] {
                continue;
            }
            if du >= cap {
                break;
            }
            for &(v, w) in &adj[u] {
                let nd = du + w;
                if nd < best[v] {
                    best[v] = nd;
                    heap.push(Reverse(Entry(nd, v)));
                }
            }
        }
        for t in 0..n {
            dist[s][t] = if s == t { 0.0 } else { best[t].min(cap) };
        }
    }
    // Path sums associate differently from the two endpoints; force exact
    // symmetry by keeping the smaller of the two (equal up to rounding).
    for s in 0..n {
        for t in (s + 1)..n {
            let v = dist[s][t].min(dist[t][s]);
            dist[s][t] = v;
            dist[t][s] = v;
        }
    }
    FiniteMetricSpace::from_matrix(labels, dist, ClassBounds::new(None, Some(cap))?)
}

/// The distance kind a witness certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum WitnessKind {
    Gh,
    Lip,
    Hl,
    Bm,
    Kadets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessPayload {
    Correspondence(Correspondence),
    Bijection(Bijection),
    /// A linear operator given row-major.
    Matrix(Vec<Vec<f64>>),
    /// Generator pairs of a Q-homogeneous correspondence.
    Generators(Vec<(Vec<f64>, Vec<f64>)>),
}

/// A tagged closeness certificate. `quality` is the ε or log-distortion the
/// payload certifies and is reproducible from the payload by the matching
/// measurement operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub payload: WitnessPayload,
    pub quality: f64,
}

impl Witness {
    pub fn correspondence(&self) -> Result<&Correspondence> {
        match &self.payload {
            WitnessPayload::Correspondence(c) => Ok(c),
            _ => Err(Error::Domain("witness payload is not a correspondence".into())),
        }
    }

    pub fn bijection(&self) -> Result<&Bijection> {
        match &self.payload {
            WitnessPayload::Bijection(b) => Ok(b),
            _ => Err(Error::Domain("witness payload is not a bijection".into())),
        }
    }

    pub fn matrix(&self) -> Result<&Vec<Vec<f64>>> {
        match &self.payload {
            WitnessPayload::Matrix(m) => Ok(m),
            _ => Err(Error::Domain("witness payload is not a matrix".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(dist: Vec<Vec<f64>>) -> FiniteMetricSpace {
        FiniteMetricSpace::with_default_labels(dist, ClassBounds::none()).unwrap()
    }

    #[test]
    fn equilateral_is_valid_within_bounds() {
        let m = space(vec![vec![0., 1., 1.], vec![1., 0., 1.], vec![1., 1., 0.]]);
        let res = validate_metric(&m, &ClassBounds::both(1.0, 2.0).unwrap()).unwrap();
        assert!(res.is_valid());
    }

    #[test]
    fn triangle_violation_is_reported() {
        let m = space(vec![vec![0., 1., 5.], vec![1., 0., 1.], vec![5., 1., 0.]]);
        let res = validate_metric(&m, &ClassBounds::none()).unwrap();
        assert!(!res.is_valid());
        assert!(res
            .violations
            .iter()
            .any(|v| matches!(v, MetricViolation::Triangle { .. })));
    }

    #[test]
    fn bound_violation_is_reported() {
        let m = space(vec![vec![0., 0.3], vec![0.3, 0.]]);
        let res =
            validate_metric(&m, &ClassBounds::new(Some(0.5), None).unwrap()).unwrap();
        assert!(res
            .violations
            .iter()
            .any(|v| matches!(v, MetricViolation::BelowLower { .. })));
    }

    #[test]
    fn non_square_matrix_is_structural_error() {
        let err =
            FiniteMetricSpace::with_default_labels(vec![vec![0., 1.], vec![1., 0., 2.]], ClassBounds::none())
                .unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn nan_entry_is_value_error() {
        let err = FiniteMetricSpace::with_default_labels(
            vec![vec![0., f64::NAN], vec![f64::NAN, 0.]],
            ClassBounds::none(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Value(_)));
    }

    #[test]
    fn hausdorff_examples() {
        let m = FiniteMetricSpace::from_line_points(&[0.0, 3.0]).unwrap();
        assert_eq!(hausdorff_distance(&m, &[0], &[0]).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&m, &[0], &[0, 1]).unwrap(), 3.0);
        assert_eq!(hausdorff_distance(&m, &[0], &[1]).unwrap(), 3.0);
        assert!(hausdorff_distance(&m, &[], &[0]).is_err());
    }

    #[test]
    fn distortion_examples() {
        let a = FiniteMetricSpace::from_line_points(&[0.0, 1.0]).unwrap();
        let b = FiniteMetricSpace::from_line_points(&[0.0, 2.0]).unwrap();
        let id = Correspondence::identity(2);
        assert_eq!(distortion(&a, &a, &id).unwrap(), 0.0);
        assert_eq!(distortion(&a, &b, &id).unwrap(), 1.0);
        // The full correspondence also relates (0,·) to both points of b, so
        // |d(0,0) - e(0,1)| = 2 enters the sup.
        let full = Correspondence::full(2, 2);
        assert_eq!(distortion(&a, &b, &full).unwrap(), 2.0);
    }

    #[test]
    fn distortion_is_symmetric_under_inversion() {
        let a = FiniteMetricSpace::from_line_points(&[0.0, 1.0, 2.5]).unwrap();
        let b = FiniteMetricSpace::from_line_points(&[0.0, 1.5, 3.0]).unwrap();
        let r = Correspondence::new([(0, 0), (1, 1), (2, 2), (2, 1)], 3, 3).unwrap();
        let d1 = distortion(&a, &b, &r).unwrap();
        let d2 = distortion(&b, &a, &r.inverse()).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn correspondence_coverage_is_enforced() {
        assert!(Correspondence::new([(0, 0)], 2, 1).is_err());
        assert!(Correspondence::new([(0, 0), (1, 0)], 2, 1).is_ok());
        assert!(Correspondence::new([(0, 2)], 1, 2).is_err());
    }

    #[test]
    fn greedy_net_examples() {
        let m = FiniteMetricSpace::from_line_points(&[0.0, 0.4, 1.1, 2.0]).unwrap();
        assert_eq!(greedy_net(&m, 1.0).unwrap(), vec![0, 2]);
        // eps larger than the diameter keeps only the first point.
        assert_eq!(greedy_net(&m, 10.0).unwrap(), vec![0]);
        // eps below the minimal positive distance keeps everything.
        assert_eq!(greedy_net(&m, 0.1).unwrap(), vec![0, 1, 2, 3]);
        assert!(greedy_net(&m, 0.0).is_err());
    }

    #[test]
    fn greedy_net_is_separated_and_dominating() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..9);
            let pts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..4.0)).collect();
            let m = match FiniteMetricSpace::from_line_points(&pts) {
                Ok(m) => m,
                Err(_) => continue,
            };
            if validate_metric(&m, &ClassBounds::none()).unwrap().is_valid() {
                let eps = rng.gen_range(0.05..2.0);
                let net = greedy_net(&m, eps).unwrap();
                for (a, &i) in net.iter().enumerate() {
                    for &j in &net[a + 1..] {
                        assert!(m.d(i, j) >= eps);
                    }
                }
                for i in 0..m.n() {
                    let covered = net.iter().any(|&j| m.d(i, j) < eps || i == j);
                    assert!(covered, "point {i} not dominated at radius {eps}");
                }
            }
        }
    }

    #[test]
    fn capped_graph_metric_examples() {
        let labels = |n: usize| (0..n).map(|i| format!("v{i}")).collect::<Vec<_>>();
        let m = graph_metric_capped(labels(2), &[(0, 1, 3.0)], 15.0).unwrap();
        assert_eq!(m.d(0, 1), 3.0);

        let m = graph_metric_capped(labels(3), &[(0, 1, 10.0), (1, 2, 10.0)], 15.0).unwrap();
        assert_eq!(m.d(0, 2), 15.0);
        assert_eq!(m.d(0, 1), 10.0);

        let m = graph_metric_capped(labels(2), &[], 15.0).unwrap();
        assert_eq!(m.d(0, 1), 15.0);

        assert!(graph_metric_capped(labels(2), &[(0, 1, -1.0)], 15.0).is_err());
    }

    #[test]
    fn capped_graph_metric_satisfies_axioms_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(2..10);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v, rng.gen_range(0.1..20.0)));
                    }
                }
            }
            let cap = rng.gen_range(1.0..16.0);
            let labels = (0..n).map(|i| format!("v{i}")).collect();
            let m = graph_metric_capped(labels, &edges, cap).unwrap();
            let res = validate_metric(&m, &ClassBounds::new(None, Some(cap)).unwrap()).unwrap();
            assert!(res.is_valid(), "violations: {:?}", res.violations);
        }
    }

    #[test]
    fn hausdorff_is_a_pseudometric_on_subsets() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        let pts: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..5.0)).collect();
        let m = FiniteMetricSpace::from_line_points(&pts).unwrap();
        let idx: Vec<usize> = (0..8).collect();
        for _ in 0..200 {
            let take = |rng: &mut rand_chacha::ChaCha20Rng| {
                let k = rng.gen_range(1..5);
                idx.choose_multiple(rng, k).copied().collect::<Vec<_>>()
            };
            let a = take(&mut rng);
            let b = take(&mut rng);
            let c = take(&mut rng);
            let hab = hausdorff_distance(&m, &a, &b).unwrap();
            let hba = hausdorff_distance(&m, &b, &a).unwrap();
            let hac = hausdorff_distance(&m, &a, &c).unwrap();
            let hcb = hausdorff_distance(&m, &c, &b).unwrap();
            assert_eq!(hab, hba);
            assert!(hab <= hac + hcb + METRIC_TOL);
        }
    }

    #[test]
    fn metric_json_round_trip() {
        let m = space(vec![vec![0., 1.], vec![1., 0.]]);
        let s = m.to_json().unwrap();
        let back = FiniteMetricSpace::from_json(&s).unwrap();
        assert_eq!(m, back);
        // External format sanity: fields present under the documented names.
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v.get("labels").is_some() && v.get("dist").is_some() && v.get("bounds").is_some());
    }
}
