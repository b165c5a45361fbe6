use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use super::direction::{dot, norm};
use super::{DiscreteMeasure, Direction, ProjectedLaw};
use crate::seeding::rng_for;
use crate::{Error, Result};

/// Distribution families supported on the closed unit ball.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    UniformBall,
    UniformSphere,
    /// `a` with probability `weight_a`, else `b`.
    TwoPointMixture {
        a: Vec<f64>,
        b: Vec<f64>,
        weight_a: f64,
    },
    /// Uniform on the cube `[-1, 1]^d` scaled by `1/√d`.
    ProductUniformRescaled,
    /// `N(0, σ² I)` pushed through `x ↦ x / max(1, |x|)`. Not a Gaussian.
    TruncatedGaussianRescaled { sigma: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::UniformBall => "uniform-ball",
            Family::UniformSphere => "uniform-sphere",
            Family::TwoPointMixture { .. } => "two-point-mixture",
            Family::ProductUniformRescaled => "product-uniform-rescaled",
            Family::TruncatedGaussianRescaled { .. } => "truncated-gaussian-rescaled",
        }
    }

    /// Builds a family from its name and flat parameter list:
    /// `two-point-mixture` takes `a_1..a_d b_1..b_d weight_a`,
    /// `truncated-gaussian-rescaled` takes `sigma`, the rest take nothing.
    pub fn from_parts(name: &str, dim: usize, params: &[f64]) -> Result<Self> {
        let expect = |count: usize| {
            if params.len() == count {
                Ok(())
            } else {
                Err(Error::input(alloc::format!(
                    "family `{name}` takes {count} parameters, got {}",
                    params.len()
                )))
            }
        };
        match name {
            "uniform-ball" => expect(0).map(|_| Family::UniformBall),
            "uniform-sphere" => expect(0).map(|_| Family::UniformSphere),
            "product-uniform-rescaled" => expect(0).map(|_| Family::ProductUniformRescaled),
            "truncated-gaussian-rescaled" => {
                expect(1)?;
                Ok(Family::TruncatedGaussianRescaled { sigma: params[0] })
            }
            "two-point-mixture" => {
                expect(2 * dim + 1)?;
                Ok(Family::TwoPointMixture {
                    a: params[..dim].to_vec(),
                    b: params[dim..2 * dim].to_vec(),
                    weight_a: params[2 * dim],
                })
            }
            other => Err(Error::input(alloc::format!("unknown family `{other}`"))),
        }
    }

    /// Flat parameter list, the inverse of [`Family::from_parts`].
    pub fn parameters(&self) -> Vec<f64> {
        match self {
            Family::TwoPointMixture { a, b, weight_a } => {
                let mut p = a.clone();
                p.extend_from_slice(b);
                p.push(*weight_a);
                p
            }
            Family::TruncatedGaussianRescaled { sigma } => alloc::vec![*sigma],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sampleable distribution on the unit ball of `ℝ^dim` with a seed.
///
/// Sample `k` is a pure function of `(family, dim, seed, k)`: it is drawn from
/// its own generator keyed by [`crate::seeding::mix64`]`(seed, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    dim: usize,
    seed: u64,
}

impl DistributionSpec {
    /// Validates parameters. Two-point mixtures whose atoms leave the unit
    /// ball are scaled by `1 / max(|a|, |b|)`.
    pub fn new(family: Family, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be >= 1"));
        }
        let family = match family {
            Family::TwoPointMixture { a, b, weight_a } => {
                if a.len() != dim || b.len() != dim {
                    return Err(Error::input("mixture atoms must have the spec dimension"));
                }
                if a.iter().chain(&b).any(|x| !x.is_finite()) {
                    return Err(Error::input("mixture atoms must be finite"));
                }
                if !(0.0..=1.0).contains(&weight_a) {
                    return Err(Error::input("mixture weight must lie in [0, 1]"));
                }
                let scale = norm(&a).max(norm(&b)).max(1.0);
                Family::TwoPointMixture {
                    a: a.iter().map(|x| x / scale).collect(),
                    b: b.iter().map(|x| x / scale).collect(),
                    weight_a,
                }
            }
            Family::TruncatedGaussianRescaled { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::input("sigma must be positive"));
                }
                Family::TruncatedGaussianRescaled { sigma }
            }
            other => other,
        };
        Ok(DistributionSpec { family, dim, seed })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The same distribution with another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        DistributionSpec {
            seed,
            ..self.clone()
        }
    }

    /// Whether every sample equals the same point.
    pub fn is_degenerate(&self) -> bool {
        match &self.family {
            Family::TwoPointMixture { a, b, weight_a } => {
                a == b || *weight_a == 0.0 || *weight_a == 1.0
            }
            _ => false,
        }
    }

    /// Draws sample number `index` into `out`.
    pub fn sample_into(&self, index: u64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let mut rng = rng_for(self.seed, index);
        let d = self.dim;
        let gaussian = |out: &mut [f64], rng: &mut rand_chacha::ChaCha8Rng| loop {
            for x in out.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            let r = norm(out);
            if r > 0.0 {
                return r;
            }
        };
        match &self.family {
            Family::UniformBall => {
                let r = gaussian(out, &mut rng);
                let u: f64 = rng.random();
                let radius = libm::pow(u, 1.0 / d as f64);
                out.iter_mut().for_each(|x| *x *= radius / r);
            }
            Family::UniformSphere => {
                let r = gaussian(out, &mut rng);
                out.iter_mut().for_each(|x| *x /= r);
            }
            Family::TwoPointMixture { a, b, weight_a } => {
                let u: f64 = rng.random();
                out.copy_from_slice(if u < *weight_a { a } else { b });
            }
            Family::ProductUniformRescaled => {
                let scale = 1.0 / libm::sqrt(d as f64);
                for x in out.iter_mut() {
                    let u: f64 = rng.random();
                    *x = (2.0 * u - 1.0) * scale;
                }
            }
            Family::TruncatedGaussianRescaled { sigma } => {
                for x in out.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *x = sigma * z;
                }
                let r = norm(out).max(1.0);
                out.iter_mut().for_each(|x| *x /= r);
            }
        }
    }

    /// Samples `0..n` as row-major coordinates.
    pub fn sample_points(&self, n: usize) -> Vec<f64> {
        let mut points = alloc::vec![0.0; n * self.dim];
        for (k, row) in points.chunks_exact_mut(self.dim).enumerate() {
            self.sample_into(k as u64, row);
        }
        points
    }

    /// The empirical measure of samples `0..n`.
    pub fn sample_empirical(&self, n: usize) -> Result<DiscreteMeasure> {
        if n == 0 {
            return Err(Error::input("sample size must be >= 1"));
        }
        DiscreteMeasure::uniform(self.dim, self.sample_points(n))
    }

    /// The law of `⟨X, θ⟩`, when it has a closed form.
    pub fn projected_law(&self, theta: &Direction) -> Result<ProjectedLaw> {
        if theta.dim() != self.dim {
            return Err(Error::dimension_mismatch(self.dim, theta.dim()));
        }
        match &self.family {
            Family::UniformBall => Ok(ProjectedLaw::ball(self.dim)),
            Family::UniformSphere => Ok(ProjectedLaw::sphere(self.dim)),
            Family::TwoPointMixture { a, b, weight_a } => {
                let x = [dot(a, theta.components()), dot(b, theta.components())];
                let w = [*weight_a, 1.0 - *weight_a];
                let m = DiscreteMeasure::new(1, x.to_vec(), w.to_vec())?;
                Ok(ProjectedLaw::atoms(m))
            }
            other => Err(Error::UnsupportedFamily(other.name())),
        }
    }

    /// Whether [`projected_law`](Self::projected_law) is the same for every
    /// direction.
    pub fn is_rotation_invariant(&self) -> bool {
        matches!(self.family, Family::UniformBall | Family::UniformSphere)
    }

    /// The distribution itself as a discrete measure, for finitely
    /// supported families.
    pub fn as_discrete(&self) -> Option<DiscreteMeasure> {
        match &self.family {
            Family::TwoPointMixture { a, b, weight_a } => {
                let atoms = [(&a[..], *weight_a), (&b[..], 1.0 - *weight_a)];
                DiscreteMeasure::from_atoms(self.dim, atoms).ok()
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn all_families(dim: usize) -> Vec<Family> {
        vec![
            Family::UniformBall,
            Family::UniformSphere,
            Family::TwoPointMixture {
                a: vec![0.5; dim],
                b: vec![-0.2; dim],
                weight_a: 0.3,
            },
            Family::ProductUniformRescaled,
            Family::TruncatedGaussianRescaled { sigma: 0.8 },
        ]
    }

    #[test]
    fn samples_stay_in_unit_ball() {
        for dim in 1..5 {
            for family in all_families(dim) {
                let spec = DistributionSpec::new(family, dim, 11).unwrap();
                let m = spec.sample_empirical(1000).unwrap();
                assert!(m.radius() <= 1.0 + 1e-12, "{}", spec.family());
            }
        }
    }

    #[test]
    fn sphere_samples_have_unit_norm() {
        let spec = DistributionSpec::new(Family::UniformSphere, 3, 5).unwrap();
        let pts = spec.sample_points(100);
        for x in pts.chunks_exact(3) {
            assert!((norm(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_prefix_stable() {
        let spec = DistributionSpec::new(Family::UniformBall, 3, 99).unwrap();
        assert_eq!(spec.sample_points(50), spec.sample_points(50));
        assert_eq!(&spec.sample_points(80)[..150], &spec.sample_points(50)[..]);
        assert_ne!(spec.sample_points(10), spec.with_seed(100).sample_points(10));
    }

    #[test]
    fn degenerate_mixture_collapses_to_one_atom() {
        let a = vec![0.3, -0.4];
        let family = Family::TwoPointMixture {
            a: a.clone(),
            b: a.clone(),
            weight_a: 0.5,
        };
        let spec = DistributionSpec::new(family, 2, 1).unwrap();
        assert!(spec.is_degenerate());
        let m = spec.sample_empirical(37).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.point(0), &a[..]);
        assert_eq!(m.weight(0), 1.0);
    }

    #[test]
    fn mixture_atoms_are_rescaled_into_the_ball() {
        let family = Family::TwoPointMixture {
            a: vec![3.0, 4.0],
            b: vec![1.0, 0.0],
            weight_a: 0.5,
        };
        let spec = DistributionSpec::new(family, 2, 1).unwrap();
        match spec.family() {
            Family::TwoPointMixture { a, b, .. } => {
                assert!((norm(a) - 1.0).abs() < 1e-15);
                assert!((b[0] - 0.2).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn sample_size_zero_is_rejected() {
        let spec = DistributionSpec::new(Family::UniformBall, 2, 0).unwrap();
        assert!(spec.sample_empirical(0).is_err());
    }

    #[test]
    fn uniform_ball_radius_distribution() {
        // P(|X| ≤ 1/2) = 2^{-d}.
        let spec = DistributionSpec::new(Family::UniformBall, 2, 3).unwrap();
        let pts = spec.sample_points(20_000);
        let inner = pts.chunks_exact(2).filter(|x| norm(x) <= 0.5).count() as f64 / 20_000.0;
        assert!((inner - 0.25).abs() < 0.02);
    }

    #[test]
    fn projected_law_availability() {
        let theta = Direction::axis(2, 0).unwrap();
        for family in all_families(2) {
            let spec = DistributionSpec::new(family.clone(), 2, 0).unwrap();
            let law = spec.projected_law(&theta);
            match family {
                Family::ProductUniformRescaled | Family::TruncatedGaussianRescaled { .. } => {
                    assert!(matches!(law, Err(Error::UnsupportedFamily(_))))
                }
                _ => assert!(law.is_ok()),
            }
        }
    }

    #[test]
    fn family_parts_round_trip() {
        for family in all_families(3) {
            let back = Family::from_parts(family.name(), 3, &family.parameters()).unwrap();
            assert_eq!(back, family);
        }
        assert!(Family::from_parts("cauchy", 2, &[]).is_err());
        assert!(Family::from_parts("uniform-ball", 2, &[1.0]).is_err());
    }
}
