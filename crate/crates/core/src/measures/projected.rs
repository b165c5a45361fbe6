use core::f64::consts::PI;

use super::DiscreteMeasure;

/// The law of a one-dimensional projection `⟨X, θ⟩` in closed form.
///
/// Rotation-invariant families project to the same law for every `θ`: the
/// uniform ball in `ℝ^d` gives density `∝ (1-x²)^{(d-1)/2}` on `[-1, 1]`, the
/// uniform sphere `∝ (1-x²)^{(d-3)/2}`. Families supported on finitely many
/// points project to a discrete law.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedLaw {
    kind: LawKind,
}

#[derive(Debug, Clone, PartialEq)]
enum LawKind {
    /// Density `(1-x²)^{(k-1)/2} / norm` on `[-1, 1]`.
    Power { k: u32, norm: f64 },
    Atoms(DiscreteMeasure),
}

impl ProjectedLaw {
    /// Projection of the uniform distribution on the unit ball of `ℝ^dim`.
    pub fn ball(dim: usize) -> Self {
        Self::power(dim as u32)
    }

    /// Projection of the uniform distribution on the unit sphere of `ℝ^dim`.
    pub fn sphere(dim: usize) -> Self {
        if dim == 1 {
            let atoms = DiscreteMeasure::uniform(1, alloc::vec![-1.0, 1.0])
                .expect("two distinct atoms");
            return Self::atoms(atoms);
        }
        Self::power(dim as u32 - 2)
    }

    /// A discrete one-dimensional law.
    pub fn atoms(m: DiscreteMeasure) -> Self {
        debug_assert_eq!(m.dim(), 1);
        ProjectedLaw {
            kind: LawKind::Atoms(m),
        }
    }

    fn power(k: u32) -> Self {
        let norm = power_integral(k, 1.0);
        ProjectedLaw {
            kind: LawKind::Power { k, norm },
        }
    }

    /// The discrete law, if this is one.
    pub fn as_atoms(&self) -> Option<&DiscreteMeasure> {
        match &self.kind {
            LawKind::Atoms(m) => Some(m),
            LawKind::Power { .. } => None,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, LawKind::Power { .. })
    }

    /// Smallest and largest point of the support.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            LawKind::Power { .. } => (-1.0, 1.0),
            LawKind::Atoms(m) => (m.point(0)[0], m.point(m.len() - 1)[0]),
        }
    }

    /// `P(⟨X,θ⟩ ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            LawKind::Power { k, norm } => {
                if x <= -1.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    (power_integral(*k, x) / norm).clamp(0.0, 1.0)
                }
            }
            LawKind::Atoms(m) => m
                .atoms()
                .take_while(|(y, _)| y[0] <= x)
                .map(|(_, w)| w)
                .sum(),
        }
    }

    /// `E[⟨X,θ⟩ · 1{⟨X,θ⟩ ≤ x}]`.
    pub fn partial_mean(&self, x: f64) -> f64 {
        match &self.kind {
            LawKind::Power { k, norm } => {
                let s2 = (1.0 - x * x).max(0.0);
                // ∫_{-1}^x t (1-t²)^m dt = -(1-x²)^{m+1} / (2(m+1)), 2(m+1) = k+1.
                -libm::pow(s2, (*k as f64 + 1.0) / 2.0) / ((*k as f64 + 1.0) * norm)
            }
            LawKind::Atoms(m) => m
                .atoms()
                .take_while(|(y, _)| y[0] <= x)
                .map(|(y, w)| w * y[0])
                .sum(),
        }
    }

    /// `inf{x : F(x) ≥ u}`; for continuous laws by bisection to 1e-13.
    pub fn quantile(&self, u: f64) -> f64 {
        match &self.kind {
            LawKind::Power { .. } => {
                if u <= 0.0 {
                    return -1.0;
                }
                if u >= 1.0 {
                    return 1.0;
                }
                let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
                while hi - lo > 1e-13 {
                    let mid = 0.5 * (lo + hi);
                    let f = self.cdf(mid);
                    if f == u {
                        return mid;
                    }
                    if f < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            LawKind::Atoms(m) => {
                let mut cum = 0.0;
                for (y, w) in m.atoms() {
                    cum += w;
                    if cum >= u {
                        return y[0];
                    }
                }
                m.point(m.len() - 1)[0]
            }
        }
    }
}

/// `∫_{-1}^x (1-t²)^{(k-1)/2} dt` via the reduction
/// `J_k = (x (1-x²)^{(k-1)/2} + (k-1) J_{k-2}) / k`.
fn power_integral(k: u32, x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    let s = libm::sqrt((1.0 - x * x).max(0.0));
    let (mut j, mut step) = if k % 2 == 0 {
        (libm::asin(x) + PI / 2.0, 0)
    } else {
        (x + 1.0, 1)
    };
    while step < k {
        step += 2;
        let kf = step as f64;
        j = (x * libm::pow(s, kf - 1.0) + (kf - 1.0) * j) / kf;
    }
    j
}
