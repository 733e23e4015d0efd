//! Mean-squares parameter selection.
//!
//! For fixed shapes `(ω_i, σ_i)` the optimal weights solve the Gram system
//! `G α = f` with `f_i = ⟨A, G_i⟩`, and the captured energy is
//! `Q = fᵀ G⁻¹ f`, so that `‖A - A_p‖² = ‖A‖² - Q`. Shapes are then moved by
//! projected steepest ascent on `Q` using the analytic gradient
//!
//! ```text
//! ∂Q/∂β_i = 2 α_i (∂f_i/∂β_i - Σ_{j≠i} ∂⟨G_i,G_j⟩/∂β_i α_j) - α_i² d⟨G_i,G_i⟩/dβ_i
//! ```

use crate::error::{Error, Result};
use crate::gaussian::{
    discrete_moments, inner_product, inner_product_grad, self_inner_product_grad, AtomKind, GaussianAtom, ShapeParam,
    SignedMixture, SIGMA_MIN,
};
use crate::grid::GridFunction;
use crate::linalg::{Cholesky, SymMatrix};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Config<T> {
    /// Initial ascent step; `None` uses `1e-3 · Ω / max|∇Q|`.
    pub step0: Option<T>,
    pub max_iter: usize,
    /// Stop once `‖∇Q‖ ≤ grad_tol · Q`.
    pub grad_tol: T,
    pub max_rejections: usize,
    pub growth: T,
}

impl<T: Scalar> Default for L2Config<T> {
    fn default() -> Self {
        Self { step0: None, max_iter: 5000, grad_tol: lit(1e-7), max_rejections: 20, growth: lit(1.2) }
    }
}

/// Shapes with their solved weights and captured energy.
#[derive(Debug, Clone, PartialEq)]
pub struct L2State<T> {
    /// Unit-weight atoms.
    pub shapes: Vec<GaussianAtom<T>>,
    pub weights: Vec<T>,
    pub moments: Vec<T>,
    /// `(∂f_i/∂ω_i, ∂f_i/∂σ_i)`.
    pub moment_grads: Vec<[T; 2]>,
    pub gram: SymMatrix<T>,
    pub q_value: T,
    pub step: T,
}

impl<T: Scalar> L2State<T> {
    pub fn mixture(&self) -> Result<SignedMixture<T>> {
        SignedMixture::from_signed_atoms(
            self.shapes.iter().zip(&self.weights).map(|(s, &w)| GaussianAtom { alpha: w, ..*s }),
        )
    }
}

/// Gram matrix `G_ij = ⟨G_i, G_j⟩` of unit-weight shapes.
pub fn assemble_gram<T: Scalar>(shapes: &[GaussianAtom<T>]) -> Result<SymMatrix<T>> {
    if shapes.is_empty() {
        return Err(Error::input("at least one shape is required"));
    }
    for (i, a) in shapes.iter().enumerate() {
        a.validate()?;
        if shapes[..i].iter().any(|b| b.kind == a.kind && b.omega_c == a.omega_c && b.sigma == a.sigma) {
            return Err(Error::input(format!("duplicate atom shape at index {i}; Gram matrix would be singular")));
        }
    }
    Ok(SymMatrix::from_fn(shapes.len(), |i, j| inner_product(&shapes[i], &shapes[j])))
}

/// Solves `G α = f` by Cholesky with one step of iterative refinement.
pub fn solve_weights<T: Scalar>(gram: &SymMatrix<T>, f: &[T]) -> Result<Vec<T>> {
    if f.len() != gram.dim() {
        return Err(Error::input("moment vector does not match the Gram matrix"));
    }
    let chol = Cholesky::factor(gram)?;
    let mut alpha = chol.solve(f);
    let r: Vec<T> = gram.mul_vec(&alpha).iter().zip(f).map(|(&g, &b)| b - g).collect();
    let corr = chol.solve(&r);
    for (a, c) in alpha.iter_mut().zip(corr) {
        *a = *a + c;
    }
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(Error::IllConditioned { condition: chol.condition_estimate().as_f64() });
    }
    Ok(alpha)
}

/// Discrete moments `f_i` of the amplitude against each shape.
pub fn moments<T: Scalar>(amplitude: &GridFunction<T>, shapes: &[GaussianAtom<T>]) -> Vec<T> {
    shapes.iter().map(|s| discrete_moments(amplitude, s)[0]).collect()
}

/// Solves for the optimal weights at fixed shapes.
pub fn evaluate<T: Scalar>(amplitude: &GridFunction<T>, shapes: &[GaussianAtom<T>]) -> Result<L2State<T>> {
    let shapes: Vec<GaussianAtom<T>> = shapes.iter().map(GaussianAtom::shape).collect();
    let gram = assemble_gram(&shapes)?;
    let all: Vec<[T; 3]> = shapes.iter().map(|s| discrete_moments(amplitude, s)).collect();
    let f: Vec<T> = all.iter().map(|m| m[0]).collect();
    let weights = solve_weights(&gram, &f)?;
    let q_value = f.iter().zip(&weights).map(|(&a, &b)| a * b).sum();
    let moment_grads = all.iter().map(|m| [m[1], m[2]]).collect();
    Ok(L2State { shapes, weights, moments: f, moment_grads, gram, q_value, step: T::zero() })
}

/// Free shape parameters: `(atom index, parameter)` in ascent order.
pub fn parameter_slots<T: Scalar>(shapes: &[GaussianAtom<T>]) -> Vec<(usize, ShapeParam)> {
    shapes
        .iter()
        .enumerate()
        .flat_map(|(i, s)| match s.kind {
            AtomKind::Pair => vec![(i, ShapeParam::Omega), (i, ShapeParam::Sigma)],
            AtomKind::Center => vec![(i, ShapeParam::Sigma)],
        })
        .collect()
}

/// Analytic gradient of `Q` over [`parameter_slots`].
pub fn q_gradient<T: Scalar>(state: &L2State<T>) -> Vec<T> {
    let two = lit::<T>(2.0);
    parameter_slots(&state.shapes)
        .into_iter()
        .map(|(i, wrt)| {
            let si = &state.shapes[i];
            let ai = state.weights[i];
            let df = match wrt {
                ShapeParam::Omega => state.moment_grads[i][0],
                ShapeParam::Sigma => state.moment_grads[i][1],
            };
            let cross: T = state
                .shapes
                .iter()
                .zip(&state.weights)
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, (sj, &aj))| inner_product_grad(si, sj, wrt) * aj)
                .sum();
            two * ai * (df - cross) - ai * ai * self_inner_product_grad(si, wrt)
        })
        .collect()
}

fn apply_step<T: Scalar>(shapes: &[GaussianAtom<T>], grad: &[T], step: T, omega_max: T) -> Vec<GaussianAtom<T>> {
    let mut out = shapes.to_vec();
    let sigma_max = lit::<T>(4.0) * omega_max * omega_max;
    for ((i, wrt), g) in parameter_slots(shapes).into_iter().zip(grad) {
        let s = &mut out[i];
        match wrt {
            ShapeParam::Omega => s.omega_c = (s.omega_c + step * *g).max(T::zero()).min(omega_max),
            ShapeParam::Sigma => s.sigma = (s.sigma + step * *g).max(lit(SIGMA_MIN)).min(sigma_max),
        }
    }
    out
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// One accepted ascent iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentRecord<T> {
    pub iter: usize,
    pub q: T,
    pub step: T,
    pub grad_norm: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2Fit<T> {
    pub mixture: SignedMixture<T>,
    pub state: L2State<T>,
    pub history: Vec<AscentRecord<T>>,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: T,
}

/// Projected steepest ascent on `Q` from `init` shapes.
///
/// Steps that fail to increase `Q` (or make the Gram matrix singular) halve
/// the step; accepted steps grow it by `config.growth`.
pub fn fit_l2<T: Scalar>(
    amplitude: &GridFunction<T>,
    init: &[GaussianAtom<T>],
    config: &L2Config<T>,
) -> Result<L2Fit<T>> {
    let omega_max = amplitude.grid().omega_max();
    let mut state = evaluate(amplitude, init)?;
    let mut grad = q_gradient(&state);
    let mut gnorm = norm(&grad);
    let gmax = grad.iter().fold(T::zero(), |m, g| m.max(g.abs()));
    let mut step =
        config.step0.unwrap_or_else(|| if gmax > T::zero() { lit::<T>(1e-3) * omega_max / gmax } else { T::one() });
    state.step = step;
    let mut history = vec![AscentRecord { iter: 0, q: state.q_value, step, grad_norm: gnorm }];
    let mut converged = false;
    let mut rejections = 0;
    let mut iter = 0;
    while iter < config.max_iter {
        if gnorm <= config.grad_tol * state.q_value.abs() {
            converged = true;
            break;
        }
        iter += 1;
        let proposal = apply_step(&state.shapes, &grad, step, omega_max);
        match evaluate(amplitude, &proposal) {
            Ok(next) if next.q_value > state.q_value => {
                state = next;
                grad = q_gradient(&state);
                gnorm = norm(&grad);
                step = step * config.growth;
                state.step = step;
                rejections = 0;
                history.push(AscentRecord { iter, q: state.q_value, step, grad_norm: gnorm });
            }
            _ => {
                step = step * lit(0.5);
                rejections += 1;
                if rejections >= config.max_rejections {
                    break;
                }
            }
        }
    }
    if !converged && gnorm <= config.grad_tol * state.q_value.abs() {
        converged = true;
    }
    Ok(L2Fit { mixture: state.mixture()?, state, history, converged, iterations: iter, grad_norm: gnorm })
}
