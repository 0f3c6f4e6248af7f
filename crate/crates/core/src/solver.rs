//! The mismatched divergence and its optimizer.
//!
//! For a function class {f_r} the mismatched divergence of mu relative to a
//! full-support pi is
//!
//!   D_mm(mu || pi) = sup_r { mu(f_r) - Lambda_pi(f_r) },
//!
//! a concave program solved here by damped Newton ascent with Armijo
//! backtracking. The gradient at r is mu(psi_r) - pi_r(psi_r), where psi_r is
//! the parameter gradient of f_r and pi_r is pi twisted by f_r; the Hessian is
//! -S + b b' with b = pi_r(psi_r) and S the second-moment matrix of psi_r
//! under pi_r (linear, partition) or under mu (log-linear).
//!
//! The optimal twisted distribution, when the supremum is attained, is the
//! reverse I-projection of mu onto the exponential family generated by the
//! class, and the value never exceeds the relative entropy D(mu || pi).

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::alphabet::{log_mgf, twisted, Distribution, SymbolFunction};
use crate::class::{ClassKind, FunctionClass, ParameterVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Convergence threshold on the sup norm of the gradient.
    pub grad_tol: f64,
    /// Outer iteration budget.
    pub max_iterations: usize,
    /// Smallest nonzero Levenberg damping; damping increases tenfold on a
    /// failed step and decays tenfold on success.
    pub damping_floor: f64,
    /// Parameter norm beyond which a still-ascending iterate is declared
    /// an escape to infinity.
    pub unbounded_norm: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iterations: 200,
            damping_floor: 1e-10,
            unbounded_norm: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Gradient sup norm reached `grad_tol`.
    Converged,
    /// Budget exhausted, or no step could improve the objective at
    /// floating-point precision (a supremum on the feasibility boundary).
    MaxIterations,
    /// Iterates escaped past `unbounded_norm` with the gradient still large.
    Unbounded,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max-iterations",
            SolveStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MmResult {
    /// The mismatched divergence (the supremal value reached, if not attained).
    pub value: f64,
    pub r_star: ParameterVector,
    /// Reference twisted by the optimal function; equals the reverse
    /// I-projection of mu when the solve converged.
    pub twisted_dist: Distribution,
    /// Sup norm of the gradient at exit.
    pub gradient_norm: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// One decomposition of a mismatched divergence against a composite null:
/// total = base + residual + linear_term, where base is the divergence of
/// pi1 from pi0, residual is the divergence of mu from the twisted reference
/// in the recentered class, and linear_term is the first-order cross term.
#[derive(Debug, Clone)]
pub struct DecompositionTerms {
    pub total: f64,
    pub base: f64,
    pub residual: f64,
    pub linear_term: f64,
}

struct Point {
    /// f_r minus the offset, the function actually scored.
    f: SymbolFunction,
    value: f64,
}

struct Problem<'a> {
    mu: &'a Distribution,
    pi: &'a Distribution,
    class: &'a FunctionClass,
    offset: Option<&'a SymbolFunction>,
}

impl Problem<'_> {
    fn eval(&self, r: &[f64]) -> Result<Point> {
        let f = self.class.evaluate(r)?;
        let f = match self.offset {
            Some(o) => f.sub(o),
            None => f,
        };
        let value = self.mu.mean(&f) - log_mgf(self.pi, &f)?;
        Ok(Point { f, value })
    }
}

fn gradient(mu: &Distribution, tw: &Distribution, psir: &[SymbolFunction]) -> DVector<f64> {
    DVector::from_iterator(psir.len(), psir.iter().map(|p| mu.mean(p) - tw.mean(p)))
}

fn hessian(
    kind: ClassKind,
    mu: &Distribution,
    tw: &Distribution,
    psir: &[SymbolFunction],
) -> DMatrix<f64> {
    let d = psir.len();
    // second moments under tw (linear, partition) or mu (log-linear); the
    // log-linear curvature of f_r exactly cancels the tw second-moment term
    let weight = match kind {
        ClassKind::Linear | ClassKind::Partition => tw,
        ClassKind::LogLinear => mu,
    };
    let b = DVector::from_iterator(d, psir.iter().map(|p| tw.mean(p)));
    let mut h = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let s: f64 = weight
                .weights()
                .iter()
                .zip(psir[i].values().iter().zip(psir[j].values()))
                .map(|(&w, (&a, &bv))| w * a * bv)
                .sum();
            let v = -s + b[i] * b[j];
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

fn add_scaled(r: &[f64], alpha: f64, p: &DVector<f64>) -> Vec<f64> {
    r.iter().zip(p.iter()).map(|(&a, &b)| a + alpha * b).collect()
}

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
const BOUNDARY_FRACTION: f64 = 0.01;
// objective evaluations are only reproducible to a few ulps; differences
// below this band cannot certify or refute an improvement
const VALUE_NOISE: f64 = 64.0 * f64::EPSILON;

fn solve(problem: &Problem, opts: &SolverOptions, r0: Vec<f64>) -> Result<MmResult> {
    let class = problem.class;
    let d = class.dimension();
    let mut r = r0;
    let mut point = problem.eval(&r)?;
    let mut lambda = 0.0_f64;
    let mut iterations = 0usize;

    let (status, gradient_norm) = loop {
        let psir = class.feature_gradient(&r)?;
        let tw = twisted(problem.pi, &point.f)?;
        let g = gradient(problem.mu, &tw, &psir);
        let gnorm = g.amax();
        if gnorm <= opts.grad_tol {
            break (SolveStatus::Converged, gnorm);
        }
        if r.iter().map(|x| x * x).sum::<f64>().sqrt() > opts.unbounded_norm {
            break (SolveStatus::Unbounded, gnorm);
        }
        if iterations >= opts.max_iterations {
            break (SolveStatus::MaxIterations, gnorm);
        }
        iterations += 1;

        let h = hessian(class.kind(), problem.mu, &tw, &psir);
        let mut moved = false;
        for _ in 0..60 {
            let mut a = -&h;
            for i in 0..d {
                a[(i, i)] += lambda;
            }
            let p = match Cholesky::new(a) {
                Some(chol) => chol.solve(&g),
                None => {
                    lambda = (lambda * 10.0).max(opts.damping_floor);
                    continue;
                }
            };
            let slope = g.dot(&p);
            if !slope.is_finite() || slope <= 0.0 {
                lambda = (lambda * 10.0).max(opts.damping_floor);
                continue;
            }

            // fraction-to-boundary: keep min_z(1 + r'psi) at or above 1% of
            // its current value (log-linear only; margin is infinite otherwise)
            let mut alpha = 1.0_f64;
            let m0 = class.feasibility_margin(&r)?;
            if m0.is_finite() {
                while alpha >= MIN_STEP {
                    let rc = add_scaled(&r, alpha, &p);
                    match class.feasibility_margin(&rc) {
                        Ok(m) if m >= BOUNDARY_FRACTION * m0 => break,
                        _ => alpha *= 0.5,
                    }
                }
            }

            let mut accepted = None;
            while alpha >= MIN_STEP {
                let rc = add_scaled(&r, alpha, &p);
                if rc == r {
                    // the step underflowed; smaller alpha cannot move either
                    break;
                }
                if let Ok(pc) = problem.eval(&rc) {
                    if pc.value.is_finite()
                        && pc.value >= point.value + ARMIJO_C * alpha * slope
                    {
                        accepted = Some((rc, pc));
                        break;
                    }
                    // near the optimum real improvements sink below value
                    // roundoff and the sufficient-decrease test goes blind;
                    // accept on a halved gradient norm instead, provided the
                    // value moved by no more than evaluation noise
                    if pc.value.is_finite()
                        && pc.value >= point.value - VALUE_NOISE * (1.0 + point.value.abs())
                    {
                        if let (Ok(psic), Ok(twc)) =
                            (class.feature_gradient(&rc), twisted(problem.pi, &pc.f))
                        {
                            if gradient(problem.mu, &twc, &psic).amax() <= 0.5 * gnorm {
                                accepted = Some((rc, pc));
                                break;
                            }
                        }
                    }
                }
                alpha *= 0.5;
            }
            match accepted {
                Some((rc, pc)) => {
                    r = rc;
                    point = pc;
                    lambda = if lambda <= opts.damping_floor {
                        0.0
                    } else {
                        lambda * 0.1
                    };
                    moved = true;
                    break;
                }
                None => lambda = (lambda * 10.0).max(opts.damping_floor),
            }
        }
        if !moved {
            break (SolveStatus::MaxIterations, gnorm);
        }
    };

    let value = if point.value < 0.0 && point.value >= -1e-12 {
        0.0
    } else {
        point.value
    };
    Ok(MmResult {
        value,
        r_star: r,
        twisted_dist: twisted(problem.pi, &point.f)?,
        gradient_norm,
        iterations,
        status,
    })
}

fn validate(mu: &Distribution, pi: &Distribution, class: &FunctionClass) -> Result<()> {
    if mu.alphabet_size() != pi.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: mu.alphabet_size(),
            right: pi.alphabet_size(),
        });
    }
    if class.alphabet_size() != pi.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: pi.alphabet_size(),
            got: class.alphabet_size(),
        });
    }
    if let Some(symbol) = pi.first_zero() {
        return Err(Error::NotFullSupport { symbol });
    }
    Ok(())
}

/// Computes D_mm(mu || pi) over the given class, starting the ascent at r = 0.
pub fn mm_divergence(
    mu: &Distribution,
    pi: &Distribution,
    class: &FunctionClass,
    opts: &SolverOptions,
) -> Result<MmResult> {
    validate(mu, pi, class)?;
    let problem = Problem {
        mu,
        pi,
        class,
        offset: None,
    };
    solve(&problem, opts, vec![0.0; class.dimension()])
}

/// Reverse I-projection of mu onto the exponential family generated by the
/// class around pi: the twisted distribution at the optimum, with the
/// divergence value. Errs with NotAttained when the supremum is not reached.
pub fn reverse_i_projection(
    mu: &Distribution,
    pi: &Distribution,
    class: &FunctionClass,
    opts: &SolverOptions,
) -> Result<(Distribution, f64)> {
    let res = mm_divergence(mu, pi, class, opts)?;
    if res.status != SolveStatus::Converged {
        return Err(Error::NotAttained {
            status: res.status.as_str(),
        });
    }
    Ok((res.twisted_dist, res.value))
}

/// Worst-case divergence inf over {nu : nu(psi_i) = pi(psi_i)} of D(mu || nu),
/// computed as the mismatched divergence over the log-linear class with the
/// features centered under pi.
pub fn robust_divergence(
    mu: &Distribution,
    pi: &Distribution,
    features: Vec<SymbolFunction>,
    opts: &SolverOptions,
) -> Result<MmResult> {
    let class = FunctionClass::log_linear(features, pi, true)?;
    mm_divergence(mu, pi, &class, opts)
}

/// Splits D_mm(mu || pi0) around an intermediate hypothesis pi1:
///
///   total = base + residual + linear_term
///
/// where base = D_mm(pi1 || pi0) with optimizer f*, residual is the
/// mismatched divergence of mu from pi0 twisted by f* over the class shifted
/// by f*, and linear_term = <mu - pi1, f*>. The base solve must converge.
pub fn decomposition_terms(
    mu: &Distribution,
    pi1: &Distribution,
    pi0: &Distribution,
    class: &FunctionClass,
    opts: &SolverOptions,
) -> Result<DecompositionTerms> {
    validate(mu, pi1, class).and(validate(mu, pi0, class))?;
    let base = mm_divergence(pi1, pi0, class, opts)?;
    if base.status != SolveStatus::Converged {
        return Err(Error::NotAttained {
            status: base.status.as_str(),
        });
    }
    let f_star = class.evaluate(&base.r_star)?;
    let total = mm_divergence(mu, pi0, class, opts)?.value;
    let residual_problem = Problem {
        mu,
        pi: &base.twisted_dist,
        class,
        offset: Some(&f_star),
    };
    let residual = solve(&residual_problem, opts, base.r_star.clone())?.value;
    // <mu - pi1, f* - Lambda(f*)> = <mu - pi1, f*> since the shift cancels
    let linear_term = mu.mean(&f_star) - pi1.mean(&f_star);
    Ok(DecompositionTerms {
        total,
        base: base.value,
        residual,
        linear_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{entropy, kl_divergence, log_likelihood_ratio};
    use approx::assert_abs_diff_eq;

    fn dist(w: &[f64]) -> Distribution {
        Distribution::new(w.to_vec()).unwrap()
    }

    fn sfun(v: &[f64]) -> SymbolFunction {
        SymbolFunction::new(v.to_vec()).unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn defaults_are_pinned() {
        let o = SolverOptions::default();
        assert_eq!(o.grad_tol, 1e-10);
        assert_eq!(o.max_iterations, 200);
        assert_eq!(o.damping_floor, 1e-10);
        assert_eq!(o.unbounded_norm, 1e8);
    }

    // Reference optimum: mpmath 1.3.0 at 50 digits, gradient root of the
    // same objective found from a coarse grid start.
    #[test]
    fn log_linear_matches_reference_optimum() {
        let mu = dist(&[0.1, 0.2, 0.3, 0.4]);
        let pi = Distribution::uniform(4).unwrap();
        let class = FunctionClass::log_linear(
            vec![
                sfun(&[0.9, -0.3, -0.4, -0.2]),
                sfun(&[-0.1, 0.6, -0.3, -0.2]),
            ],
            &pi,
            false,
        )
        .unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!(res.gradient_norm <= 1e-10);
        assert_abs_diff_eq!(res.value, 0.089406925108818257341, epsilon = 1e-12);
        assert_abs_diff_eq!(res.r_star[0], -0.72377554655453253046, epsilon = 1e-8);
        assert_abs_diff_eq!(res.r_star[1], -0.66844848136094744208, epsilon = 1e-8);
        // never exceeds the relative entropy
        assert!(res.value <= kl_divergence(&mu, &pi).unwrap() + 1e-12);
    }

    #[test]
    fn linear_matches_reference_optimum() {
        let mu = dist(&[3.0, 1.0, 1.0, 2.0, 2.0]);
        let pi = dist(&[1.0, 2.0, 3.0, 2.0, 1.0]);
        let class = FunctionClass::linear(
            vec![
                sfun(&[1.0, -0.5, 0.0, 0.5, 1.0]),
                sfun(&[0.2, 0.4, -0.6, 0.1, -0.1]),
            ],
            &pi,
        )
        .unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert_abs_diff_eq!(res.value, 0.31254213837049025291, epsilon = 1e-12);
        assert_abs_diff_eq!(res.r_star[0], 1.3453170573771246368, epsilon = 1e-8);
        assert_abs_diff_eq!(res.r_star[1], 1.0481280667362893937, epsilon = 1e-8);
        assert!(res.value <= kl_divergence(&mu, &pi).unwrap());
    }

    #[test]
    fn full_rank_linear_class_recovers_relative_entropy() {
        // with indicators of all but one symbol, the class plus constants
        // spans every function, so the supremum is the relative entropy and
        // the projection is mu itself
        let mu = dist(&[0.1, 0.2, 0.3, 0.4]);
        let pi = dist(&[0.4, 0.3, 0.2, 0.1]);
        let class = FunctionClass::partition(&[vec![0], vec![1], vec![2]], &pi).unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert_abs_diff_eq!(
            res.value,
            kl_divergence(&mu, &pi).unwrap(),
            epsilon = 1e-10
        );
        for z in 0..4 {
            assert_abs_diff_eq!(res.twisted_dist.w(z), mu.w(z), epsilon = 1e-8);
        }
    }

    #[test]
    fn log_likelihood_ratio_feature_attains_equality_at_r_one() {
        let mu = dist(&[0.3, 0.2, 0.1, 0.4]);
        let pi = dist(&[0.25, 0.25, 0.3, 0.2]);
        let l = log_likelihood_ratio(&mu, &pi).unwrap();
        let class = FunctionClass::linear(vec![l], &pi).unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert_abs_diff_eq!(
            res.value,
            kl_divergence(&mu, &pi).unwrap(),
            epsilon = 1e-11
        );
        assert_abs_diff_eq!(res.r_star[0], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn shift_invariance_of_linear_features() {
        let mu = dist(&[0.15, 0.35, 0.1, 0.4]);
        let pi = Distribution::uniform(4).unwrap();
        let psi = sfun(&[0.7, -0.2, -0.1, 0.3]);
        let class_a = FunctionClass::linear(vec![psi.clone()], &pi).unwrap();
        let class_b = FunctionClass::linear(vec![psi.shift(3.7)], &pi).unwrap();
        let a = mm_divergence(&mu, &pi, &class_a, &opts()).unwrap();
        let b = mm_divergence(&mu, &pi, &class_b, &opts()).unwrap();
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-10);
    }

    #[test]
    fn partition_class_equals_quantized_relative_entropy() {
        let mu = dist(&[0.05, 0.15, 0.2, 0.25, 0.3, 0.05]);
        let pi = dist(&[0.2, 0.1, 0.15, 0.15, 0.25, 0.15]);
        let cells: &[Vec<usize>] = &[vec![0, 1], vec![2]];
        let class = FunctionClass::partition(cells, &pi).unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();

        // quantize to cells plus the remainder {3, 4, 5}
        let q = |d: &Distribution| {
            dist(&[
                d.w(0) + d.w(1),
                d.w(2),
                d.w(3) + d.w(4) + d.w(5),
            ])
        };
        let expected = kl_divergence(&q(&mu), &q(&pi)).unwrap();
        assert_abs_diff_eq!(res.value, expected, epsilon = 1e-10);
        assert!(res.value < kl_divergence(&mu, &pi).unwrap());
    }

    #[test]
    fn pythagorean_identity_for_reverse_projection() {
        let mu = dist(&[3.0, 1.0, 1.0, 2.0, 2.0]);
        let pi = dist(&[1.0, 2.0, 3.0, 2.0, 1.0]);
        let class = FunctionClass::linear(
            vec![
                sfun(&[1.0, -0.5, 0.0, 0.5, 1.0]),
                sfun(&[0.2, 0.4, -0.6, 0.1, -0.1]),
            ],
            &pi,
        )
        .unwrap();
        let (nu_star, value) = reverse_i_projection(&mu, &pi, &class, &opts()).unwrap();
        let lhs = kl_divergence(&mu, &pi).unwrap();
        let rhs = value + kl_divergence(&mu, &nu_star).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-8);
    }

    #[test]
    fn moment_matching_at_the_projection() {
        let mu = dist(&[0.3, 0.05, 0.25, 0.15, 0.25]);
        let pi = dist(&[0.2, 0.25, 0.2, 0.15, 0.2]);
        let features = vec![
            sfun(&[1.0, -0.5, 0.0, 0.5, 1.0]),
            sfun(&[0.2, 0.4, -0.6, 0.1, -0.1]),
        ];
        let class = FunctionClass::linear(features.clone(), &pi).unwrap();
        let (nu_star, _) = reverse_i_projection(&mu, &pi, &class, &opts()).unwrap();
        for psi in &features {
            assert_abs_diff_eq!(nu_star.mean(psi), mu.mean(psi), epsilon = 1e-8);
        }
    }

    #[test]
    fn supporting_hyperplane_separates_the_divergence_ball() {
        let mu = dist(&[0.1, 0.2, 0.3, 0.4]);
        let pi = Distribution::uniform(4).unwrap();
        let class = FunctionClass::linear(
            vec![sfun(&[0.9, -0.3, -0.4, -0.2]), sfun(&[-0.1, 0.6, -0.3, -0.2])],
            &pi,
        )
        .unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();
        let eta = res.value;
        let f_star = class.evaluate(&res.r_star).unwrap();
        let lam = log_mgf(&pi, &f_star).unwrap();
        let g_star = f_star.shift(-lam - eta);

        // mu sits exactly on the hyperplane
        assert_abs_diff_eq!(mu.mean(&g_star), 0.0, epsilon = 1e-10);
        // distributions strictly inside the ball fall strictly below it
        for nu in [
            pi.clone(),
            dist(&[0.22, 0.26, 0.27, 0.25]),
            dist(&[0.2, 0.24, 0.28, 0.28]),
        ] {
            let dv = mm_divergence(&nu, &pi, &class, &opts()).unwrap().value;
            assert!(dv < eta, "test point must be inside the ball");
            assert!(nu.mean(&g_star) < 0.0);
        }
    }

    #[test]
    fn log_mgf_vanishes_on_centered_log_linear_family() {
        let pi = dist(&[0.15, 0.2, 0.3, 0.35]);
        let class = FunctionClass::log_linear(
            vec![sfun(&[1.0, 0.0, -1.0, 0.5]), sfun(&[0.3, -0.8, 0.2, 0.4])],
            &pi,
            true,
        )
        .unwrap();
        for r in [[0.1, 0.2], [-0.4, 0.3], [0.55, -0.5]] {
            assert!(class.feasibility_margin(&r).unwrap() > 0.0);
            let f = class.evaluate(&r).unwrap();
            assert_abs_diff_eq!(log_mgf(&pi, &f).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn robust_divergence_matches_closed_form() {
        // for psi = (1, 0, -1) under u3 the moment set is {nu : nu(0) = nu(2)}
        // and the minimizing nu is (1/4, 1/2, 1/4); value from 50-digit mpmath
        let mu = dist(&[0.2, 0.5, 0.3]);
        let pi = Distribution::uniform(3).unwrap();
        let res =
            robust_divergence(&mu, &pi, vec![sfun(&[1.0, 0.0, -1.0])], &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert_abs_diff_eq!(res.value, 0.01006775677534443671, epsilon = 1e-12);
        assert_abs_diff_eq!(res.r_star[0], -0.2, epsilon = 1e-8);
        // the minimizing nu is mu / (1 + r* psi): in the constraint set, with
        // D(mu || nu) equal to the program value
        let psi = sfun(&[1.0, 0.0, -1.0]);
        let nu_hat = dist(
            &mu.weights()
                .iter()
                .zip(psi.values())
                .map(|(&m, &p)| m / (1.0 + res.r_star[0] * p))
                .collect::<Vec<_>>(),
        );
        assert_abs_diff_eq!(nu_hat.mean(&psi), 0.0, epsilon = 1e-10);
        for (z, &w) in [0.25, 0.5, 0.25].iter().enumerate() {
            assert_abs_diff_eq!(nu_hat.w(z), w, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(
            kl_divergence(&mu, &nu_hat).unwrap(),
            res.value,
            epsilon = 1e-10
        );
    }

    #[test]
    fn boundary_supremum_is_reported_as_unattained() {
        // mu puts no mass where the optimal twist degenerates, so the
        // supremum 0.7 log 2 sits on the feasibility boundary
        let mu = dist(&[0.7, 0.3, 0.0]);
        let pi = Distribution::uniform(3).unwrap();
        let class =
            FunctionClass::log_linear(vec![sfun(&[1.0, 0.0, -1.0])], &pi, false).unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::MaxIterations);
        assert_abs_diff_eq!(res.value, 0.7 * std::f64::consts::LN_2, epsilon = 1e-8);
        assert!(matches!(
            reverse_i_projection(&mu, &pi, &class, &opts()),
            Err(Error::NotAttained { .. })
        ));
    }

    #[test]
    fn degenerate_mu_converges_to_relative_entropy_limit() {
        // mu concentrated on one symbol: the supremum D(mu || pi) = log 2 is
        // approached along an escaping parameter ray, and the gradient decays
        // fast enough that the solver still converges numerically
        let mu = dist(&[1.0, 0.0]);
        let pi = Distribution::uniform(2).unwrap();
        let class = FunctionClass::linear(vec![sfun(&[1.0, -1.0])], &pi).unwrap();
        let res = mm_divergence(&mu, &pi, &class, &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert_abs_diff_eq!(res.value, std::f64::consts::LN_2, epsilon = 1e-9);
        assert!(res.r_star[0] > 5.0);
        assert_abs_diff_eq!(res.twisted_dist.w(0), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn escape_guard_trips_with_a_tiny_norm_budget() {
        let mu = dist(&[3.0, 1.0, 1.0, 2.0, 2.0]);
        let pi = dist(&[1.0, 2.0, 3.0, 2.0, 1.0]);
        let class = FunctionClass::linear(
            vec![
                sfun(&[1.0, -0.5, 0.0, 0.5, 1.0]),
                sfun(&[0.2, 0.4, -0.6, 0.1, -0.1]),
            ],
            &pi,
        )
        .unwrap();
        let tight = SolverOptions {
            unbounded_norm: 0.5,
            ..SolverOptions::default()
        };
        let res = mm_divergence(&mu, &pi, &class, &tight).unwrap();
        assert_eq!(res.status, SolveStatus::Unbounded);
        assert!(res.r_star.iter().map(|x| x * x).sum::<f64>().sqrt() > 0.5);
        assert!(res.gradient_norm > 1e-10);
    }

    #[test]
    fn decomposition_identity_linear_and_log_linear() {
        let mu = dist(&[0.3, 0.1, 0.2, 0.15, 0.25]);
        let pi1 = dist(&[1.0, 2.0, 3.0, 2.0, 1.0]);
        let pi0 = Distribution::uniform(5).unwrap();
        let features = vec![
            sfun(&[1.0, -0.5, 0.0, 0.5, 1.0]),
            sfun(&[0.2, 0.4, -0.6, 0.1, -0.1]),
        ];

        let lin = FunctionClass::linear(features.clone(), &pi0).unwrap();
        let t = decomposition_terms(&mu, &pi1, &pi0, &lin, &opts()).unwrap();
        assert_abs_diff_eq!(t.total, t.base + t.residual + t.linear_term, epsilon = 1e-8);
        assert!(t.base >= 0.0 && t.residual >= 0.0);

        let scaled: Vec<SymbolFunction> = features
            .iter()
            .map(|f| SymbolFunction::new(f.values().iter().map(|v| 0.4 * v).collect()).unwrap())
            .collect();
        let ll = FunctionClass::log_linear(scaled, &pi0, true).unwrap();
        let t2 = decomposition_terms(&mu, &pi1, &pi0, &ll, &opts()).unwrap();
        assert_abs_diff_eq!(
            t2.total,
            t2.base + t2.residual + t2.linear_term,
            epsilon = 1e-8
        );
    }

    #[test]
    fn preconditions_are_enforced() {
        let mu = dist(&[0.5, 0.5]);
        let pi_gap = dist(&[1.0, 0.0]);
        let class = FunctionClass::linear(vec![sfun(&[1.0, -1.0])], &mu).unwrap();
        assert!(matches!(
            mm_divergence(&mu, &pi_gap, &class, &opts()),
            Err(Error::NotFullSupport { symbol: 1 })
        ));
        let mu3 = dist(&[0.4, 0.3, 0.3]);
        assert!(matches!(
            mm_divergence(&mu3, &mu, &class, &opts()),
            Err(Error::AlphabetMismatch { .. })
        ));
        let pi3 = Distribution::uniform(3).unwrap();
        assert!(matches!(
            mm_divergence(&mu3, &pi3, &class, &opts()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let mu = dist(&[0.1, 0.2, 0.3, 0.4]);
        let pi = dist(&[0.3, 0.3, 0.2, 0.2]);
        for (kind, class) in [
            (
                "linear",
                FunctionClass::linear(
                    vec![sfun(&[0.9, -0.3, -0.4, -0.2]), sfun(&[-0.1, 0.6, -0.3, -0.2])],
                    &pi,
                )
                .unwrap(),
            ),
            (
                "loglinear",
                FunctionClass::log_linear(
                    vec![sfun(&[0.9, -0.3, -0.4, -0.2]), sfun(&[-0.1, 0.6, -0.3, -0.2])],
                    &pi,
                    true,
                )
                .unwrap(),
            ),
        ] {
            let problem = Problem {
                mu: &mu,
                pi: &pi,
                class: &class,
                offset: None,
            };
            let r = [0.25, -0.15];
            let psir = class.feature_gradient(&r).unwrap();
            let tw = twisted(&pi, &problem.eval(&r).unwrap().f).unwrap();
            let h = hessian(class.kind(), &mu, &tw, &psir);
            let grad_at = |r: &[f64]| {
                let psir = class.feature_gradient(r).unwrap();
                let tw = twisted(&pi, &problem.eval(r).unwrap().f).unwrap();
                gradient(&mu, &tw, &psir)
            };
            let eps = 1e-6;
            for j in 0..2 {
                let mut rp = r;
                let mut rm = r;
                rp[j] += eps;
                rm[j] -= eps;
                let fd = (grad_at(&rp) - grad_at(&rm)) / (2.0 * eps);
                for i in 0..2 {
                    assert!(
                        (h[(i, j)] - fd[i]).abs() < 1e-6,
                        "{kind} hessian ({i},{j}): {} vs fd {}",
                        h[(i, j)],
                        fd[i]
                    );
                }
            }
        }
    }

    #[test]
    fn value_of_identical_arguments_is_zero() {
        let pi = dist(&[0.2, 0.3, 0.5]);
        let class = FunctionClass::linear(vec![sfun(&[1.0, 0.0, -1.0])], &pi).unwrap();
        let res = mm_divergence(&pi, &pi, &class, &opts()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert_eq!(res.value, 0.0);
        assert_eq!(res.iterations, 0);
        let e = entropy(&pi);
        assert!(e > 0.0);
    }
}
