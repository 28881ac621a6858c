use num_complex::Complex64;

use crate::error::Result;
use crate::special::{
    full_line_gaussian_overlap, half_line_gaussian_overlap, negative_half_line_gaussian_overlap, ComplexGaussian,
};

/// Finite linear combination `Σ w_k g_k` of complex Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    terms: Vec<(Complex64, ComplexGaussian)>,
}

impl GaussianMixture {
    pub fn new(terms: Vec<(Complex64, ComplexGaussian)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(Complex64, ComplexGaussian)] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|(w, g)| w * g.eval(x)).sum()
    }

    pub fn eval_with_derivative(&self, x: f64) -> (Complex64, Complex64) {
        self.terms.iter().fold(
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            |(v, d), (w, g)| {
                let (gv, gd) = g.eval_with_derivative(x);
                (v + w * gv, d + w * gd)
            },
        )
    }

    pub fn density(&self, x: f64) -> f64 {
        self.eval(x).norm_sqr()
    }

    fn pairwise(
        &self,
        other: &Self,
        kernel: impl Fn(&ComplexGaussian, &ComplexGaussian) -> Result<Complex64>,
    ) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for (w1, g1) in &self.terms {
            for (w2, g2) in &other.terms {
                sum += w1.conj() * w2 * kernel(g1, g2)?;
            }
        }
        Ok(sum)
    }

    /// `∫_0^∞ conj(self) · other`.
    pub fn positive_overlap(&self, other: &Self) -> Result<Complex64> {
        self.pairwise(other, half_line_gaussian_overlap)
    }

    /// `∫_{-∞}^0 conj(self) · other`.
    pub fn negative_overlap(&self, other: &Self) -> Result<Complex64> {
        self.pairwise(other, negative_half_line_gaussian_overlap)
    }

    /// `∫ conj(self) · other` over the real line.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        self.pairwise(other, full_line_gaussian_overlap)
    }
}
