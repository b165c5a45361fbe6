//! Exact W1 in `ℝ^d` as a transportation problem, with dual potentials, and
//! the truncated dual functional `W^(r)`.

mod simplex;

use alloc::vec::Vec;

use crate::measures::{distance, merge_atoms, norm};
use crate::{DiscreteMeasure, Error, Result};

/// An optimal coupling together with dual potentials certifying it.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(i, j, mass)`: mass moved from atom `i` of μ to atom `j` of ν.
    pub coupling: Vec<(usize, usize, f64)>,
    /// `u_i` on the atoms of μ.
    pub source_potentials: Vec<f64>,
    /// `v_j` on the atoms of ν; `u_i - v_j ≤ |x_i - y_j|`.
    pub target_potentials: Vec<f64>,
    /// `Σ mass · |x_i - y_j|`.
    pub value: f64,
}

/// Worst violations of the optimality conditions of a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// Largest `|row or column sum - weight|`.
    pub marginal_error: f64,
    /// Most negative coupling mass (0 if none).
    pub negative_mass: f64,
    /// Largest `u_i - v_j - |x_i - y_j|` over all pairs.
    pub dual_infeasibility: f64,
    /// Largest `|x_i - y_j| - (u_i - v_j)` over pairs with mass > 1e-12.
    pub slackness_violation: f64,
    /// Primal minus dual objective.
    pub duality_gap: f64,
}

impl Certificate {
    /// The tolerances a plan from [`w1_exact`] satisfies.
    pub fn is_optimal(&self) -> bool {
        self.marginal_error <= 1e-9
            && self.negative_mass <= 0.0
            && self.dual_infeasibility <= 1e-9
            && self.slackness_violation <= 1e-9
            && self.duality_gap.abs() <= 1e-8
    }
}

impl TransportPlan {
    /// Checks marginals, dual feasibility, complementary slackness and the
    /// duality gap against the measures the plan was computed for.
    pub fn certify(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Certificate> {
        self.check_shape(mu, nu)?;
        let mut rows = alloc::vec![0.0; mu.len()];
        let mut cols = alloc::vec![0.0; nu.len()];
        let mut negative_mass: f64 = 0.0;
        let mut slackness_violation: f64 = 0.0;
        for &(i, j, mass) in &self.coupling {
            rows[i] += mass;
            cols[j] += mass;
            negative_mass = negative_mass.max(-mass);
            if mass > 1e-12 {
                let c = distance(mu.point(i), nu.point(j));
                let slack = c - (self.source_potentials[i] - self.target_potentials[j]);
                slackness_violation = slackness_violation.max(slack);
            }
        }
        let marginal_error = rows
            .iter()
            .zip(mu.weights())
            .chain(cols.iter().zip(nu.weights()))
            .map(|(s, w)| libm::fabs(s - w))
            .fold(0.0, f64::max);
        let mut dual_infeasibility = f64::NEG_INFINITY;
        for (i, &u) in self.source_potentials.iter().enumerate() {
            for (j, &v) in self.target_potentials.iter().enumerate() {
                let c = distance(mu.point(i), nu.point(j));
                dual_infeasibility = dual_infeasibility.max(u - v - c);
            }
        }
        Ok(Certificate {
            marginal_error,
            negative_mass,
            dual_infeasibility,
            slackness_violation,
            duality_gap: duality_gap(self, mu, nu)?,
        })
    }

    fn check_shape(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
        mu.check_dim(nu.dim())?;
        let in_range = self
            .coupling
            .iter()
            .all(|&(i, j, _)| i < mu.len() && j < nu.len());
        if self.source_potentials.len() != mu.len()
            || self.target_potentials.len() != nu.len()
            || !in_range
        {
            return Err(Error::input("plan does not match the measures"));
        }
        Ok(())
    }
}

/// Exact W1 between two discrete measures of equal dimension.
///
/// Weights are put on a common integer grid (the least power of ten, up to
/// `10^15`, that makes them integral within 1e-9 units; rounding residue goes
/// to the heaviest atom) and the transportation problem with Euclidean costs
/// is solved by network simplex. Practical up to a few thousand atoms per
/// side; the pivot cap is `50 (n + m)²`.
pub fn w1_exact(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<TransportPlan> {
    mu.check_dim(nu.dim())?;
    let (n, m) = (mu.len(), nu.len());
    let mut cost = Vec::with_capacity(n * m);
    for (x, _) in mu.atoms() {
        for (y, _) in nu.atoms() {
            cost.push(distance(x, y));
        }
    }
    let (coupling, source_potentials, target_potentials) =
        solve_transport(mu.weights(), nu.weights(), &cost)?;
    let value = coupling
        .iter()
        .map(|&(i, j, mass)| mass * cost[i * m + j])
        .sum();
    Ok(TransportPlan {
        coupling,
        source_potentials,
        target_potentials,
        value,
    })
}

/// Primal value of `plan` minus its dual value `Σ u_i μ_i - Σ v_j ν_j`.
pub fn duality_gap(plan: &TransportPlan, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    plan.check_shape(mu, nu)?;
    let primal: f64 = plan
        .coupling
        .iter()
        .map(|&(i, j, mass)| mass * distance(mu.point(i), nu.point(j)))
        .sum();
    let dual: f64 = plan
        .source_potentials
        .iter()
        .zip(mu.weights())
        .map(|(u, w)| u * w)
        .sum::<f64>()
        - plan
            .target_potentials
            .iter()
            .zip(nu.weights())
            .map(|(v, w)| v * w)
            .sum::<f64>();
    Ok(primal - dual)
}

/// `W^(r)(μ, ν) = sup |∫ u d(μ - ν)|` over 1-Lipschitz `u` vanishing outside
/// the ball `B_r`.
///
/// On the finite support `Z` of `μ - ν` this is the linear program
///
/// ```text
/// maximize  Σ_z u_z (μ - ν)(z)
/// s.t.      u_a - u_b ≤ |a - b|          for all a, b ∈ Z
///           |u_z| ≤ (r - |z|)^+          for all z ∈ Z
/// ```
///
/// (the objective's sign can be flipped with `u`). Any feasible `u` on `Z`
/// extends to a 1-Lipschitz function on `ℝ^d` vanishing outside `B_r`: take
/// the McShane extension and clip it by the cone `±(r - |x|)^+`. The
/// condition `u(0) = 0` can be dropped because `μ - ν` has zero total mass.
///
/// The program is solved through its dual: adding a ground node `g` at
/// distance `(r - |z|)^+` from every `z` turns the constraint set into the
/// potentials of a transshipment problem, whose value equals optimal
/// transport of `(μ - ν)^+` onto `(μ - ν)^-` under the path metric
/// `d(a, b) = min(|a - b|, (r - |a|)^+ + (r - |b|)^+)`.
pub fn w1_truncated_dual(mu: &DiscreteMeasure, nu: &DiscreteMeasure, r: f64) -> Result<f64> {
    mu.check_dim(nu.dim())?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::input(alloc::format!("radius must be positive, got {r}")));
    }
    let dim = mu.dim();
    let mut points = mu.coordinates().to_vec();
    points.extend_from_slice(nu.coordinates());
    let mut signed = mu.weights().to_vec();
    signed.extend(nu.weights().iter().map(|w| -w));
    let (points, delta) = merge_atoms(dim, &points, &signed);

    let row = |k: usize| &points[k * dim..(k + 1) * dim];
    let cap = |k: usize| (r - norm(row(k))).max(0.0);
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (k, &d) in delta.iter().enumerate() {
        if d > 1e-15 {
            pos.push(k);
        } else if d < -1e-15 {
            neg.push(k);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Ok(0.0);
    }
    let mut cost = Vec::with_capacity(pos.len() * neg.len());
    for &a in &pos {
        for &b in &neg {
            cost.push(distance(row(a), row(b)).min(cap(a) + cap(b)));
        }
    }
    let supply: Vec<f64> = pos.iter().map(|&k| delta[k]).collect();
    let demand: Vec<f64> = neg.iter().map(|&k| -delta[k]).collect();
    let (coupling, _, _) = solve_transport(&supply, &demand, &cost)?;
    Ok(coupling
        .iter()
        .map(|&(i, j, mass)| mass * cost[i * neg.len() + j])
        .sum())
}

/// Solves the transportation problem on float masses, returning the coupling
/// in the original units and the potentials.
fn solve_transport(
    supply: &[f64],
    demand: &[f64],
    cost: &[f64],
) -> Result<(Vec<(usize, usize, f64)>, Vec<f64>, Vec<f64>)> {
    let (n, m) = (supply.len(), demand.len());
    let scale = integer_grid(supply, demand);
    let total_a: f64 = supply.iter().sum();
    let total_b: f64 = demand.iter().sum();
    let total = libm::round(0.5 * (total_a + total_b) * scale) as i64;
    let int_supply = to_grid(supply, scale, total)?;
    let int_demand = to_grid(demand, scale, total)?;
    let max_pivots = 50usize.saturating_mul((n + m) * (n + m));
    let solution = simplex::solve(&int_supply, &int_demand, cost, max_pivots)?;
    let coupling = solution
        .flows
        .iter()
        .map(|&(i, j, f)| (i, j, f as f64 / scale))
        .collect();
    Ok((
        coupling,
        solution.source_potentials,
        solution.sink_potentials,
    ))
}

/// Least `10^k`, `k ≤ 15`, putting every mass within 1e-9 of an integer.
fn integer_grid(a: &[f64], b: &[f64]) -> f64 {
    let mut scale = 1.0;
    for _ in 0..15 {
        let integral = a
            .iter()
            .chain(b)
            .all(|w| libm::fabs(w * scale - libm::round(w * scale)) <= 1e-9);
        if integral {
            return scale;
        }
        scale *= 10.0;
    }
    scale
}

/// Rounds masses to the grid, keeps every atom at one unit or more and
/// assigns the residue to the heaviest atom so the total is exact.
fn to_grid(masses: &[f64], scale: f64, total: i64) -> Result<Vec<i64>> {
    let mut ints: Vec<i64> = masses
        .iter()
        .map(|w| (libm::round(w * scale) as i64).max(1))
        .collect();
    let heaviest = (0..masses.len())
        .max_by(|&a, &b| masses[a].total_cmp(&masses[b]).then(b.cmp(&a)))
        .ok_or_else(|| Error::input("empty mass vector"))?;
    let residue = total - ints.iter().sum::<i64>();
    ints[heaviest] += residue;
    if ints[heaviest] < 1 {
        return Err(Error::Solver("masses cannot be placed on an integer grid".into()));
    }
    Ok(ints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::SQRT_2;

    fn uniform(dim: usize, pts: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::uniform(dim, pts.to_vec()).unwrap()
    }

    #[test]
    fn point_masses() {
        let a = DiscreteMeasure::dirac(&[0.5, -1.0, 2.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[1.5, 1.0, 0.0]).unwrap();
        let plan = w1_exact(&a, &b).unwrap();
        assert!((plan.value - 3.0).abs() < 1e-15);
        assert_eq!(plan.coupling, vec![(0, 0, 1.0)]);
        assert!(plan.certify(&a, &b).unwrap().is_optimal());
    }

    #[test]
    fn translated_pair() {
        let mu = uniform(2, &[0.0, 0.0, 1.0, 0.0]);
        let nu = uniform(2, &[0.0, 1.0, 1.0, 1.0]);
        let plan = w1_exact(&mu, &nu).unwrap();
        assert!((plan.value - 1.0).abs() < 1e-12);
        assert!(plan.certify(&mu, &nu).unwrap().is_optimal());
    }

    #[test]
    fn cross_pair() {
        let mu = uniform(2, &[1.0, 0.0, -1.0, 0.0]);
        let nu = uniform(2, &[0.0, 1.0, 0.0, -1.0]);
        // Both perfect matchings pair every atom at distance √2.
        let brute = f64::min(
            0.5 * (distance(mu.point(0), nu.point(0)) + distance(mu.point(1), nu.point(1))),
            0.5 * (distance(mu.point(0), nu.point(1)) + distance(mu.point(1), nu.point(0))),
        );
        let plan = w1_exact(&mu, &nu).unwrap();
        assert!((plan.value - brute).abs() < 1e-12);
        assert!((plan.value - SQRT_2).abs() < 1e-12);
        assert!(plan.certify(&mu, &nu).unwrap().is_optimal());
    }

    #[test]
    fn duality_gap_examples() {
        let mu = uniform(2, &[1.0, 0.0, -1.0, 0.0]);
        let nu = uniform(2, &[0.0, 1.0, 0.0, -1.0]);
        let plan = w1_exact(&mu, &nu).unwrap();
        assert!(duality_gap(&plan, &mu, &nu).unwrap().abs() <= 1e-8);

        let crude = TransportPlan {
            coupling: vec![(0, 0, 0.5), (1, 1, 0.5)],
            source_potentials: vec![0.0; 2],
            target_potentials: vec![0.0; 2],
            value: SQRT_2,
        };
        assert!((duality_gap(&crude, &mu, &nu).unwrap() - SQRT_2).abs() < 1e-15);

        let a = DiscreteMeasure::dirac(&[0.2, 0.1]).unwrap();
        let trivial = TransportPlan {
            coupling: vec![(0, 0, 1.0)],
            source_potentials: vec![0.0],
            target_potentials: vec![0.0],
            value: 0.0,
        };
        assert_eq!(duality_gap(&trivial, &a, &a).unwrap(), 0.0);
        assert!(duality_gap(&trivial, &mu, &nu).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let a = DiscreteMeasure::dirac(&[0.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[0.0, 1.0]).unwrap();
        assert!(matches!(w1_exact(&a, &b), Err(Error::Input(_))));
        assert!(w1_truncated_dual(&a, &b, 1.0).is_err());
    }

    #[test]
    fn unequal_weights_and_sizes() {
        let mu = DiscreteMeasure::new(1, vec![0.0, 1.0, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
        let nu = DiscreteMeasure::new(1, vec![0.5, 2.0], vec![0.7, 0.3]).unwrap();
        let plan = w1_exact(&mu, &nu).unwrap();
        let exact = crate::ot1d::w1_1d(&mu, &nu).unwrap();
        assert!((plan.value - exact).abs() < 1e-12);
        assert!(plan.certify(&mu, &nu).unwrap().is_optimal());
    }

    #[test]
    fn truncated_dual_examples() {
        let a = DiscreteMeasure::dirac(&[0.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[1.0]).unwrap();
        assert!((w1_truncated_dual(&a, &b, 10.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((w1_truncated_dual(&a, &b, 0.5).unwrap() - 0.5).abs() < 1e-12);
        let m = uniform(2, &[0.1, 0.2, -0.3, 0.4]);
        assert_eq!(w1_truncated_dual(&m, &m, 1.0).unwrap(), 0.0);
        assert!(w1_truncated_dual(&a, &b, 0.0).is_err());
        assert!(w1_truncated_dual(&a, &b, -1.0).is_err());
    }

    #[test]
    fn grid_choice() {
        assert_eq!(integer_grid(&[1.0], &[1.0]), 1.0);
        assert_eq!(integer_grid(&[0.5, 0.5], &[0.25, 0.75]), 100.0);
        assert_eq!(integer_grid(&[1.0 / 3.0; 3], &[1.0]), 1e15);
        let ints = to_grid(&[1.0 / 3.0; 3], 1e15, 1_000_000_000_000_000).unwrap();
        assert_eq!(ints.iter().sum::<i64>(), 1_000_000_000_000_000);
    }
}
