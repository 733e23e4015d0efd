//! Even Gaussian atoms, signed mixtures and their inner products.
//!
//! A *pair* atom is `g(ω) = e^{-(ω-ω_c)²/2σ} + e^{-(ω+ω_c)²/2σ}`; a *center*
//! atom is the single Gaussian `e^{-ω²/2σ}`, i.e. half of a pair with
//! `ω_c = 0`. All inner products are over the whole real line.

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, GridFunction};
use crate::scalar::{lit, Scalar};

/// Smallest admissible width; updates below it are clamped.
pub const SIGMA_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomKind {
    Center,
    Pair,
}

/// Which shape parameter a derivative is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeParam {
    Omega,
    Sigma,
}

/// Derivative order of the atom with respect to frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    First,
    Second,
}

/// Discrete moment kind, see [`discrete_inner_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moment {
    Value,
    GradOmega,
    GradSigma,
}

/// Weighted even Gaussian atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAtom<T> {
    pub alpha: T,
    pub omega_c: T,
    pub sigma: T,
    pub kind: AtomKind,
}

impl<T: Scalar> GaussianAtom<T> {
    pub fn pair(alpha: T, omega_c: T, sigma: T) -> Self {
        Self { alpha, omega_c, sigma, kind: AtomKind::Pair }
    }

    pub fn center(alpha: T, sigma: T) -> Self {
        Self { alpha, omega_c: T::zero(), sigma, kind: AtomKind::Center }
    }

    /// Unit-weight shape with the same center and width.
    pub fn shape(&self) -> Self {
        Self { alpha: T::one(), ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > T::zero() && self.sigma.is_finite()) {
            return Err(Error::domain(format!("atom width must be positive, got {}", self.sigma)));
        }
        if !(self.alpha.is_finite() && self.omega_c.is_finite()) {
            return Err(Error::input("non-finite atom parameter"));
        }
        match self.kind {
            AtomKind::Center if self.omega_c != T::zero() => Err(Error::domain("center atoms must sit at omega = 0")),
            AtomKind::Pair if self.omega_c < T::zero() => Err(Error::domain("pair atom centers must be nonnegative")),
            _ => Ok(()),
        }
    }

    /// Factor relating the atom to an unweighted pair at the same center.
    #[inline]
    fn pair_fraction(&self) -> T {
        match self.kind {
            AtomKind::Center => lit(0.5),
            AtomKind::Pair => T::one(),
        }
    }
}

/// The unit-weight atom `g` (or its frequency derivatives) at `omega`.
///
/// The weight `alpha` is ignored here; see [`mixture_eval`].
pub fn eval_pair<T: Scalar>(omega: T, atom: &GaussianAtom<T>, order: Order) -> T {
    let s = atom.sigma;
    let two = lit::<T>(2.0);
    let term = |x: T| {
        let e = (-x * x / (two * s)).exp();
        match order {
            Order::Value => e,
            Order::First => -x / s * e,
            Order::Second => (x * x / (s * s) - T::one() / s) * e,
        }
    };
    match atom.kind {
        AtomKind::Center => term(omega),
        AtomKind::Pair => term(omega - atom.omega_c) + term(omega + atom.omega_c),
    }
}

/// Derivative of the unit-weight atom with respect to a shape parameter.
pub fn eval_shape_grad<T: Scalar>(omega: T, atom: &GaussianAtom<T>, wrt: ShapeParam) -> T {
    let s = atom.sigma;
    let two = lit::<T>(2.0);
    let minus = omega - atom.omega_c;
    let plus = omega + atom.omega_c;
    let e1 = (-minus * minus / (two * s)).exp();
    let e2 = (-plus * plus / (two * s)).exp();
    match (atom.kind, wrt) {
        (AtomKind::Center, ShapeParam::Omega) => T::zero(),
        (AtomKind::Center, ShapeParam::Sigma) => omega * omega / (two * s * s) * e1,
        (AtomKind::Pair, ShapeParam::Omega) => (minus * e1 - plus * e2) / s,
        (AtomKind::Pair, ShapeParam::Sigma) => (minus * minus * e1 + plus * plus * e2) / (two * s * s),
    }
}

/// Center atom plus positive pairs minus negative pairs.
///
/// The center weight may carry either sign; pair weights in both lists are
/// stored positive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedMixture<T> {
    pub center: Option<GaussianAtom<T>>,
    pub positive: Vec<GaussianAtom<T>>,
    pub negative: Vec<GaussianAtom<T>>,
}

impl<T: Scalar> SignedMixture<T> {
    pub fn empty() -> Self {
        Self { center: None, positive: Vec::new(), negative: Vec::new() }
    }

    /// Checks the ordering and positivity invariants.
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.center {
            if c.kind != AtomKind::Center {
                return Err(Error::input("center slot must hold a center atom"));
            }
            c.validate()?;
        }
        for (name, list) in [("positive", &self.positive), ("negative", &self.negative)] {
            for a in list.iter() {
                if a.kind != AtomKind::Pair {
                    return Err(Error::input(format!("{name} list holds a non-pair atom")));
                }
                a.validate()?;
                if !(a.alpha > T::zero()) {
                    return Err(Error::domain(format!("{name} atom weight must be positive")));
                }
            }
            if list.windows(2).any(|w| !(w[0].omega_c < w[1].omega_c)) {
                return Err(Error::input(format!("{name} atom centers must be strictly increasing")));
            }
        }
        Ok(())
    }

    /// Builds a mixture from signed atoms, sorting pairs by center.
    ///
    /// Pairs with negative weight go to the negative list. Several center
    /// atoms are not representable and yield an error.
    pub fn from_signed_atoms(atoms: impl IntoIterator<Item = GaussianAtom<T>>) -> Result<Self> {
        let mut mix = Self::empty();
        for a in atoms {
            match a.kind {
                AtomKind::Center => {
                    if mix.center.is_some() {
                        return Err(Error::input("a mixture holds at most one center atom"));
                    }
                    mix.center = Some(a);
                }
                AtomKind::Pair => {
                    let a = GaussianAtom { omega_c: a.omega_c.abs(), ..a };
                    if a.alpha >= T::zero() {
                        mix.positive.push(a);
                    } else {
                        mix.negative.push(GaussianAtom { alpha: -a.alpha, ..a });
                    }
                }
            }
        }
        let by_center = |x: &GaussianAtom<T>, y: &GaussianAtom<T>| {
            x.omega_c.partial_cmp(&y.omega_c).unwrap_or(std::cmp::Ordering::Equal)
        };
        mix.positive.sort_by(by_center);
        mix.negative.sort_by(by_center);
        mix.positive.retain(|a| a.alpha > T::zero());
        mix.validate()?;
        Ok(mix)
    }

    /// All atoms with signed weights: center first, then positive, then negative.
    pub fn signed_atoms(&self) -> Vec<GaussianAtom<T>> {
        self.center
            .iter()
            .copied()
            .chain(self.positive.iter().copied())
            .chain(self.negative.iter().map(|a| GaussianAtom { alpha: -a.alpha, ..*a }))
            .collect()
    }

    /// Number of even Gaussians (center counts once, each pair once).
    pub fn atom_count(&self) -> usize {
        self.center.iter().count() + self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atom_count() == 0
    }

    pub fn eval(&self, omega: T, order: Order) -> T {
        self.signed_atoms().iter().map(|a| a.alpha * eval_pair(omega, a, order)).sum()
    }
}

/// Pointwise evaluation of a mixture (or a derivative) on `grid`.
pub fn mixture_eval<T: Scalar>(mix: &SignedMixture<T>, grid: &[T], order: Order) -> Vec<T> {
    let atoms = mix.signed_atoms();
    grid.iter().map(|&w| atoms.iter().map(|a| a.alpha * eval_pair(w, a, order)).sum()).collect()
}

/// Mixture sampled on a frequency grid.
pub fn mixture_on_grid<T: Scalar>(mix: &SignedMixture<T>, grid: &FrequencyGrid<T>) -> GridFunction<T> {
    GridFunction::new(*grid, mixture_eval(mix, &grid.omegas(), Order::Value)).expect("sizes agree")
}

/// Pair/pair closed form `2 (2σ_aσ_b π/(σ_a+σ_b))^{1/2} (E₋ + E₊)` and its pieces.
struct PairProduct<T> {
    coef: T,
    sum_sigma: T,
    e_minus: T,
    e_plus: T,
    d_minus: T,
    d_plus: T,
}

fn pair_product<T: Scalar>(a: &GaussianAtom<T>, b: &GaussianAtom<T>) -> PairProduct<T> {
    let two = lit::<T>(2.0);
    let sum_sigma = a.sigma + b.sigma;
    let coef = two * (two * a.sigma * b.sigma * T::PI() / sum_sigma).sqrt();
    let d_minus = a.omega_c - b.omega_c;
    let d_plus = a.omega_c + b.omega_c;
    PairProduct {
        coef,
        sum_sigma,
        e_minus: (-d_minus * d_minus / (two * sum_sigma)).exp(),
        e_plus: (-d_plus * d_plus / (two * sum_sigma)).exp(),
        d_minus,
        d_plus,
    }
}

/// `⟨G_a, G_b⟩ = ∫ G_a G_b dω` for unit-weight atoms of either kind.
pub fn inner_product<T: Scalar>(a: &GaussianAtom<T>, b: &GaussianAtom<T>) -> T {
    let pp = pair_product(a, b);
    a.pair_fraction() * b.pair_fraction() * pp.coef * (pp.e_minus + pp.e_plus)
}

/// Partial derivative of `⟨G_a, G_b⟩` with respect to a shape parameter of
/// `a`, holding `b` fixed.
pub fn inner_product_grad<T: Scalar>(a: &GaussianAtom<T>, b: &GaussianAtom<T>, wrt: ShapeParam) -> T {
    let pp = pair_product(a, b);
    let frac = a.pair_fraction() * b.pair_fraction();
    let half = lit::<T>(0.5);
    let s = pp.sum_sigma;
    match wrt {
        ShapeParam::Omega => {
            if a.kind == AtomKind::Center {
                return T::zero();
            }
            -frac * pp.coef * (pp.d_minus * pp.e_minus + pp.d_plus * pp.e_plus) / s
        }
        ShapeParam::Sigma => {
            let dlog_coef = half * (T::one() / a.sigma - T::one() / s);
            let s2 = lit::<T>(2.0) * s * s;
            frac * pp.coef
                * (dlog_coef * (pp.e_minus + pp.e_plus)
                    + pp.d_minus * pp.d_minus / s2 * pp.e_minus
                    + pp.d_plus * pp.d_plus / s2 * pp.e_plus)
        }
    }
}

/// Total derivative of the self product `⟨G_a, G_a⟩` (both slots move).
pub fn self_inner_product_grad<T: Scalar>(a: &GaussianAtom<T>, wrt: ShapeParam) -> T {
    lit::<T>(2.0) * inner_product_grad(a, a, wrt)
}

/// Discrete moment `Σ_p w_p G(ω_p) A(ω_p)` (or with `∂G/∂β`) using trapezoid weights.
pub fn discrete_inner_product<T: Scalar>(amplitude: &GridFunction<T>, atom: &GaussianAtom<T>, moment: Moment) -> T {
    let grid = amplitude.grid();
    amplitude
        .values()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let w = grid.omega(i);
            let g = match moment {
                Moment::Value => eval_pair(w, atom, Order::Value),
                Moment::GradOmega => eval_shape_grad(w, atom, ShapeParam::Omega),
                Moment::GradSigma => eval_shape_grad(w, atom, ShapeParam::Sigma),
            };
            grid.weight(i) * g * a
        })
        .sum()
}

/// Gaussian tails below `e^{-TAIL_EXPONENT}` are skipped by [`discrete_moments`].
const TAIL_EXPONENT: f64 = 50.0;

/// `(f, ∂f/∂ω_c, ∂f/∂σ)` of [`discrete_inner_product`] in a single pass.
///
/// The amplitude is treated as even (its samples are symmetrized), which
/// folds the mirror Gaussian onto the main one; samples where the Gaussian is
/// negligible are skipped.
pub fn discrete_moments<T: Scalar>(amplitude: &GridFunction<T>, atom: &GaussianAtom<T>) -> [T; 3] {
    let grid = amplitude.grid();
    let v = amplitude.values();
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let (c, s) = (atom.omega_c, atom.sigma);
    let n = grid.half_len() as i64;
    let h = grid.step();
    let reach = (two * lit::<T>(TAIL_EXPONENT) * s).sqrt();
    let lo = ((c - reach) / h).floor().to_i64().unwrap_or(-n).max(-n);
    let hi = ((c + reach) / h).ceil().to_i64().unwrap_or(n).min(n);
    let (mut f, mut fw, mut fs) = (T::zero(), T::zero(), T::zero());
    for p in lo..=hi {
        let idx = (p + n) as usize;
        let a = half * (v[idx] + v[grid.mirror(idx)]);
        let x = grid.omega(idx) - c;
        let e = grid.weight(idx) * a * (-x * x / (two * s)).exp();
        f = f + e;
        fw = fw + x * e;
        fs = fs + x * x * e;
    }
    let k = two * atom.pair_fraction();
    let dw = match atom.kind {
        AtomKind::Center => T::zero(),
        AtomKind::Pair => k * fw / s,
    };
    [k * f, dw, k * fs / (two * s * s)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trap(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        (0..=n)
            .map(|k| {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                w * f(lo + k as f64 * h)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn pair_at_origin_and_evenness() {
        let a = GaussianAtom::pair(1.0, 1.3, 0.4);
        assert!((eval_pair(0.0, &a, Order::Value) - 2.0 * (-1.69f64 / 0.8).exp()).abs() < 1e-15);
        for w in [0.1, 0.7, 2.2] {
            for o in [Order::Value, Order::Second] {
                assert_eq!(eval_pair(w, &a, o), eval_pair(-w, &a, o));
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for a in [GaussianAtom::pair(1.0, 1.1, 0.3), GaussianAtom::center(1.0, 0.7)] {
            for w in [-0.9f64, 0.2, 0.75, 1.6] {
                let f = |x: f64| eval_pair(x, &a, Order::Value);
                let d1 = (f(w + h) - f(w - h)) / (2.0 * h);
                let d2 = (f(w + h) - 2.0 * f(w) + f(w - h)) / (h * h);
                let e1 = eval_pair(w, &a, Order::First);
                let e2 = eval_pair(w, &a, Order::Second);
                assert!((e1 - d1).abs() <= 1e-6 * e1.abs().max(1.0), "first at {w}");
                assert!((e2 - d2).abs() <= 1e-6 * e2.abs().max(1.0), "second at {w}");
            }
        }
    }

    #[test]
    fn mixture_basics() {
        let grid = [-1.0, 0.0, 0.5, 1.0];
        assert!(mixture_eval(&SignedMixture::<f64>::empty(), &grid, Order::Value).iter().all(|&v| v == 0.0));
        let a = GaussianAtom::pair(2.5, 0.8, 0.2);
        let mix = SignedMixture { center: None, positive: vec![a], negative: vec![] };
        for (v, &w) in mixture_eval(&mix, &grid, Order::Value).iter().zip(&grid) {
            assert_eq!(*v, 2.5 * eval_pair(w, &a, Order::Value));
        }
    }

    #[test]
    fn academic_pointwise_atom_peak() {
        let mix = SignedMixture {
            center: None,
            positive: vec![GaussianAtom::pair(13.4515, 1.0074, 0.3595)],
            negative: vec![],
        };
        let v = mixture_eval(&mix, &[-1.0f64, 1.0], Order::Value);
        assert!((v[0] - 13.5).abs() < 0.01 && v[0] == v[1]);
    }

    #[test]
    fn inner_product_values() {
        let a = GaussianAtom::pair(1.0, 10.0, 1.0);
        let pi = std::f64::consts::PI;
        assert!((inner_product(&a, &a) - 2.0 * pi.sqrt() * (1.0 + (-100.0f64).exp())).abs() < 1e-14);
        assert!((inner_product(&a, &a) - 3.5449077).abs() < 1e-7);
        let z = GaussianAtom::pair(1.0, 0.0, 0.6);
        assert!((inner_product(&z, &z) - 4.0 * (pi * 0.6).sqrt()).abs() < 1e-14);
        let c = GaussianAtom::center(1.0, 0.6);
        assert!((inner_product(&c, &c) - (pi * 0.6).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inner_product_matches_quadrature_with_centers() {
        let atoms = [
            GaussianAtom::pair(1.0, 0.4, 0.3),
            GaussianAtom::pair(1.0, 1.7, 0.05),
            GaussianAtom::center(1.0, 0.9),
            GaussianAtom::center(1.0, 0.1),
        ];
        for a in &atoms {
            for b in &atoms {
                let q = trap(|w| eval_pair(w, a, Order::Value) * eval_pair(w, b, Order::Value), -12.0, 12.0, 24000);
                let c = inner_product(a, b);
                assert!((q - c).abs() <= 1e-10 * c, "{a:?} {b:?}");
                assert_eq!(c, inner_product(b, a));
            }
        }
    }

    #[test]
    fn self_grad_sigma_at_origin() {
        let s = 0.8;
        let z = GaussianAtom::pair(1.0, 0.0, s);
        let pi = std::f64::consts::PI;
        assert!((self_inner_product_grad(&z, ShapeParam::Sigma) - 2.0 * (pi / s).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn inner_product_grad_finite_differences() {
        let pairs = [
            (GaussianAtom::pair(1.0, 1.0, 0.5), GaussianAtom::pair(1.0, 1.0, 0.5)),
            (GaussianAtom::pair(1.0, 0.3, 0.2), GaussianAtom::pair(1.0, 1.4, 0.7)),
            (GaussianAtom::center(1.0, 0.4), GaussianAtom::pair(1.0, 0.9, 0.3)),
            (GaussianAtom::pair(1.0, 0.9, 0.3), GaussianAtom::center(1.0, 0.4)),
        ];
        for (a, b) in pairs {
            for wrt in [ShapeParam::Omega, ShapeParam::Sigma] {
                if a.kind == AtomKind::Center && wrt == ShapeParam::Omega {
                    assert_eq!(inner_product_grad(&a, &b, wrt), 0.0);
                    continue;
                }
                let h = 1e-5 * if wrt == ShapeParam::Omega { 1.0 } else { a.sigma };
                let bump = |d: f64| {
                    let mut x = a;
                    match wrt {
                        ShapeParam::Omega => x.omega_c += d,
                        ShapeParam::Sigma => x.sigma += d,
                    }
                    inner_product(&x, &b)
                };
                let fd = (bump(h) - bump(-h)) / (2.0 * h);
                let an = inner_product_grad(&a, &b, wrt);
                assert!((an - fd).abs() <= 1e-6 * an.abs().max(1e-3), "{wrt:?}: {an} vs {fd}");
            }
        }
    }

    #[test]
    fn discrete_moment_sums() {
        let grid = FrequencyGrid::new(6.0, 512).unwrap();
        let atom = GaussianAtom::pair(1.0, 1.2, 0.4);
        assert_eq!(discrete_inner_product(&GridFunction::zeros(grid), &atom, Moment::Value), 0.0);
        let amp = GridFunction::from_fn(grid, |w: f64| eval_pair(w, &atom, Order::Value));
        let f = discrete_inner_product(&amp, &atom, Moment::Value);
        let c = inner_product(&atom, &atom);
        assert!((f - c).abs() <= 1e-4 * c);
    }

    #[test]
    fn mixture_validation() {
        let bad = SignedMixture {
            center: None,
            positive: vec![GaussianAtom::pair(1.0, 1.0, 0.1), GaussianAtom::pair(1.0, 0.5, 0.1)],
            negative: vec![],
        };
        assert!(bad.validate().is_err());
        let m = SignedMixture::from_signed_atoms([
            GaussianAtom::pair(-1.0, 2.0, 0.1),
            GaussianAtom::pair(1.0, 1.5, 0.1),
            GaussianAtom::pair(3.0, 0.5, 0.1),
            GaussianAtom::center(-0.5, 0.3),
        ])
        .unwrap();
        assert_eq!(m.atom_count(), 4);
        assert_eq!(m.positive[0].omega_c, 0.5);
        assert_eq!(m.negative[0].alpha, 1.0);
        assert_eq!(m.center.unwrap().alpha, -0.5);
    }

    #[test]
    fn fused_moments_match_direct_sums() {
        let grid = FrequencyGrid::new(4.0, 800).unwrap();
        let amp = GridFunction::from_fn(grid, |w: f64| (1.0 + w * w) * (-w * w / 3.0).exp());
        for atom in
            [GaussianAtom::pair(1.0, 1.3, 0.05), GaussianAtom::pair(1.0, 0.2, 0.4), GaussianAtom::center(1.0, 0.3)]
        {
            let fused = discrete_moments(&amp, &atom);
            for (k, m) in [Moment::Value, Moment::GradOmega, Moment::GradSigma].into_iter().enumerate() {
                let direct = discrete_inner_product(&amp, &atom, m);
                assert!((fused[k] - direct).abs() <= 1e-12 * direct.abs().max(1e-3), "{atom:?} {m:?}");
            }
        }
    }
}
