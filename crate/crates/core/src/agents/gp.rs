//! Gaussian-process regression with a squared-exponential kernel and
//! upper-confidence-bound acquisition.
//!
//! Targets are standardized to zero mean and unit variance before fitting;
//! predictions are mapped back to reward units. The kernel matrix is
//! factorized with a plain Cholesky decomposition (training sets here hold
//! at most a few dozen points).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of times the jitter is multiplied by 10 after a failed factorization.
const JITTER_RETRIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpHyper {
    pub lengthscale: f64,
    pub variance: f64,
    pub jitter: f64,
}

impl Default for GpHyper {
    fn default() -> Self {
        Self {
            lengthscale: 0.25,
            variance: 1.0,
            jitter: 1e-6,
        }
    }
}

impl GpHyper {
    fn validate(&self) -> Result<()> {
        if !(self.lengthscale > 0.0 && self.variance > 0.0 && self.jitter > 0.0) {
            return Err(Error::invalid(
                "lengthscale, variance and jitter must all be positive",
            ));
        }
        Ok(())
    }

    pub fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        self.variance * (-d2 / (2.0 * self.lengthscale * self.lengthscale)).exp()
    }
}

/// Anything that maps a point to a predictive mean and standard deviation.
pub trait Predictor {
    fn predict(&self, x: &[f64]) -> (f64, f64);
}

impl<F: Fn(&[f64]) -> (f64, f64)> Predictor for F {
    fn predict(&self, x: &[f64]) -> (f64, f64) {
        self(x)
    }
}

/// A fitted (or prior) GP posterior. Immutable once built.
#[derive(Debug, Clone)]
pub struct GpModel {
    hyper: GpHyper,
    dim: usize,
    points: Vec<Vec<f64>>,
    y_mean: f64,
    y_scale: f64,
    /// Row-major lower-triangular Cholesky factor of `K + jitter I`.
    chol: Vec<f64>,
    /// `(K + jitter I)^-1 y_standardized`.
    alpha: Vec<f64>,
    jitter_used: f64,
}

/// Fits a GP to `points -> targets`.
pub fn gp_fit(points: &[Vec<f64>], targets: &[f64], hyper: GpHyper) -> Result<GpModel> {
    hyper.validate()?;
    if points.is_empty() {
        return Err(Error::invalid("gp_fit needs at least one observation"));
    }
    if points.len() != targets.len() {
        return Err(Error::invalid("points and targets differ in length"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::invalid("points have inconsistent dimensions"));
    }
    let n = points.len();
    let y_mean = targets.iter().sum::<f64>() / n as f64;
    let var = targets.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64;
    let y_scale = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    let y: Vec<f64> = targets.iter().map(|t| (t - y_mean) / y_scale).collect();

    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = hyper.kernel(&points[i], &points[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }

    let mut jitter = hyper.jitter;
    let mut chol = None;
    for _ in 0..=JITTER_RETRIES {
        let mut m = k.clone();
        for i in 0..n {
            m[i * n + i] += jitter;
        }
        if let Some(l) = cholesky(&m, n) {
            chol = Some(l);
            break;
        }
        jitter *= 10.0;
    }
    let chol = chol.ok_or_else(|| {
        Error::NumericalFailure(format!(
            "kernel matrix not positive definite even with jitter {jitter:e}"
        ))
    })?;
    let alpha = backward_substitute(&chol, n, &forward_substitute(&chol, n, &y));

    Ok(GpModel {
        hyper,
        dim,
        points: points.to_vec(),
        y_mean,
        y_scale,
        chol,
        alpha,
        jitter_used: jitter,
    })
}

impl GpModel {
    /// The prior over `dim`-dimensional inputs: zero mean, standard deviation `sqrt(variance)`.
    pub fn prior(dim: usize, hyper: GpHyper) -> Self {
        Self {
            hyper,
            dim,
            points: Vec::new(),
            y_mean: 0.0,
            y_scale: 1.0,
            chol: Vec::new(),
            alpha: Vec::new(),
            jitter_used: hyper.jitter,
        }
    }

    /// Fits to the data, or returns the prior when there is none.
    pub fn fit_or_prior(
        dim: usize,
        points: &[Vec<f64>],
        targets: &[f64],
        hyper: GpHyper,
    ) -> Result<Self> {
        if points.is_empty() {
            Ok(Self::prior(dim, hyper))
        } else {
            gp_fit(points, targets, hyper)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hyper(&self) -> GpHyper {
        self.hyper
    }

    /// Jitter that made the factorization succeed.
    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }

    fn k_star(&self, x: &[f64]) -> Vec<f64> {
        self.points.iter().map(|p| self.hyper.kernel(p, x)).collect()
    }

    /// Posterior mean and standard deviation in reward units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        debug_assert_eq!(x.len(), self.dim, "query dimension mismatch");
        let ks = self.k_star(x);
        let mean_std: f64 = ks.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        let std = self.unit_std_from(&ks);
        (self.y_mean + self.y_scale * mean_std, self.y_scale * std)
    }

    /// Posterior standard deviation on the standardized scale. Depends only
    /// on the training inputs, not on target values.
    pub fn unit_std(&self, x: &[f64]) -> f64 {
        self.unit_std_from(&self.k_star(x))
    }

    fn unit_std_from(&self, ks: &[f64]) -> f64 {
        let n = self.points.len();
        let v = if n == 0 {
            Vec::new()
        } else {
            forward_substitute(&self.chol, n, ks)
        };
        let var = self.hyper.variance - v.iter().map(|x| x * x).sum::<f64>();
        var.max(0.0).sqrt()
    }
}

impl Predictor for GpModel {
    fn predict(&self, x: &[f64]) -> (f64, f64) {
        GpModel::predict(self, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcbParams {
    pub kappa: f64,
}

impl UcbParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::invalid("kappa must be >= 0"));
        }
        Ok(Self { kappa })
    }

    pub fn score(&self, mean: f64, std: f64) -> f64 {
        mean + self.kappa * std
    }
}

/// Index of the candidate maximizing `mean + kappa * std`; ties go to the
/// lowest index.
pub fn ucb_acquire(
    model: &impl Predictor,
    candidates: &[Vec<f64>],
    params: UcbParams,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidates to acquire from"));
    }
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, c) in candidates.iter().enumerate() {
        let (m, s) = model.predict(c);
        let score = params.score(m, s);
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    Ok(best)
}

fn cholesky(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L x = b`.
fn forward_substitute(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Solves `L^T x = b`.
fn backward_substitute(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn hyper() -> GpHyper {
        GpHyper::default()
    }

    #[test]
    fn single_point_interpolates() {
        let m = gp_fit(&[vec![0.3, 0.7]], &[42.0], hyper()).unwrap();
        let (mean, _) = m.predict(&[0.3, 0.7]);
        assert!((mean - 42.0).abs() < 1e-6);
    }

    #[test]
    fn far_queries_revert_to_prior() {
        let pts = vec![vec![0.1, 0.1], vec![0.2, 0.3], vec![0.3, 0.1]];
        let ys = [10.0, 20.0, 60.0];
        let m = gp_fit(&pts, &ys, hyper()).unwrap();
        let (mean, std) = m.predict(&[50.0, 50.0]);
        let y_mean = 30.0;
        let y_sd = (((10.0f64 - 30.0).powi(2) + 100.0 + 900.0) / 3.0).sqrt();
        assert!((mean - y_mean).abs() < 1e-3);
        assert!((std - y_sd).abs() < 1e-3);
    }

    #[test]
    fn prior_is_flat() {
        let m = GpModel::prior(2, hyper());
        assert_eq!(m.predict(&[0.2, 0.9]), (0.0, 1.0));
        assert_eq!(m.predict(&[0.9, 0.1]), (0.0, 1.0));
    }

    #[test]
    fn input_errors() {
        assert!(gp_fit(&[], &[], hyper()).is_err());
        assert!(gp_fit(&[vec![0.0], vec![0.0, 1.0]], &[1.0, 2.0], hyper()).is_err());
        assert!(gp_fit(&[vec![0.0]], &[1.0, 2.0], hyper()).is_err());
        let bad = GpHyper {
            lengthscale: 0.0,
            ..hyper()
        };
        assert!(gp_fit(&[vec![0.0]], &[1.0], bad).is_err());
    }

    #[test]
    fn duplicate_points_still_factorize() {
        let pts = vec![vec![0.5, 0.5]; 6];
        let m = gp_fit(&pts, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0], hyper()).unwrap();
        let (mean, std) = m.predict(&[0.5, 0.5]);
        assert!((mean - 2.0).abs() < 1e-3);
        assert!(std >= 0.0);
    }

    #[test]
    fn std_is_never_negative() {
        let mut rng = SeededRng::new(1);
        let pts: Vec<Vec<f64>> = (0..30).map(|_| vec![rng.unit(), rng.unit()]).collect();
        let ys: Vec<f64> = (0..30).map(|_| rng.uniform(-50.0, 50.0)).collect();
        let m = gp_fit(&pts, &ys, hyper()).unwrap();
        for p in &pts {
            assert!(m.predict(p).1 >= 0.0);
        }
    }

    #[test]
    fn kappa_zero_is_mean_argmax() {
        let m = gp_fit(&[vec![0.5, 0.5], vec![0.1, 0.1]], &[10.0, 0.0], hyper()).unwrap();
        let cands = vec![vec![0.1, 0.1], vec![0.5, 0.5], vec![0.9, 0.9]];
        assert_eq!(ucb_acquire(&m, &cands, UcbParams::new(0.0).unwrap()).unwrap(), 1);
    }

    #[test]
    fn prior_picks_first_candidate() {
        let m = GpModel::prior(2, hyper());
        let cands = vec![vec![0.4, 0.4], vec![0.0, 0.0], vec![1.0, 1.0]];
        assert_eq!(ucb_acquire(&m, &cands, UcbParams::new(2.5).unwrap()).unwrap(), 0);
    }

    #[test]
    fn large_kappa_moves_away_from_data() {
        let c = vec![0.2, 0.2];
        let m = gp_fit(&[c.clone()], &[100.0], hyper()).unwrap();
        let cands: Vec<Vec<f64>> = (0..=10)
            .map(|i| vec![0.2 + 0.08 * i as f64, 0.2])
            .collect();
        // Std grows monotonically with distance from the single observation.
        let stds: Vec<f64> = cands.iter().map(|x| m.unit_std(x)).collect();
        assert!(stds.windows(2).all(|w| w[1] > w[0]));
        let pick = ucb_acquire(&m, &cands, UcbParams::new(100.0).unwrap()).unwrap();
        assert_eq!(pick, cands.len() - 1);
    }

    #[test]
    fn empty_candidates_rejected() {
        let m = GpModel::prior(2, hyper());
        assert!(ucb_acquire(&m, &[], UcbParams::new(1.0).unwrap()).is_err());
        assert!(UcbParams::new(-1.0).is_err());
    }

    #[test]
    fn training_std_below_far_std() {
        let mut rng = SeededRng::new(2);
        let pts: Vec<Vec<f64>> = (0..8).map(|_| vec![rng.unit(), rng.unit()]).collect();
        let ys: Vec<f64> = (0..8).map(|_| rng.uniform(0.0, 100.0)).collect();
        let m = gp_fit(&pts, &ys, hyper()).unwrap();
        let far = m.predict(&[1.0 + 3.0 * 0.25 + 1.0, 2.0]).1;
        for p in &pts {
            assert!(m.predict(p).1 <= far);
        }
    }
}
