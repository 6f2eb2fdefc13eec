//! Brute-force cross-checks: vertex enumeration for LP optima and exhaustive
//! integer point enumeration for feasibility and reformulation bijections.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{det_rat, dot_rat, matrix::rank, solve, to_rat_vec, unit_vec, IntVec, Matrix, RatVec, Rational};
use crate::lattice::lattice_coords;
use crate::reform::{KnapsackInstance, NullspaceReform, RangespaceReform};
use crate::width::{iwidth_from, LpOutcome, Polytope, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_points: u64,
    pub max_active_sets: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_points: 10_000_000, max_active_sets: 1_000_000 }
    }
}

impl EnumerationBudget {
    pub fn new(max_points: u64, max_active_sets: u64) -> Result<Self> {
        if max_points == 0 || max_active_sets == 0 {
            return Err(Error::Invalid("enumeration budgets must be positive".into()));
        }
        Ok(EnumerationBudget { max_points, max_active_sets })
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Kernel direction of an `(n-1) x n` matrix by signed maximal minors; zero when rank-deficient.
fn kernel_direction(rows: &[&[Rational]], n: usize) -> RatVec {
    (0..n)
        .map(|j| {
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = Matrix::from_fn(rows.len(), n - 1, |i, c| rows[i][cols[c]].clone());
            let d = if rows.is_empty() { Rational::one() } else { det_rat(&minor).expect("square minor") };
            if j % 2 == 0 { d } else { -d }
        })
        .collect()
}

fn in_recession_cone(poly: &Polytope, d: &[Rational]) -> bool {
    (0..poly.rows()).all(|i| {
        let y = dot_rat(poly.matrix.row(i), d);
        (poly.lower[i].is_none() || !y.is_negative()) && (poly.upper[i].is_none() || !y.is_positive())
    })
}

/// Optimum of `c x` by enumerating every basic solution of the polytope.
pub fn vertex_enum_optimize(c: &[Rational], poly: &Polytope, sense: Sense, budget: &EnumerationBudget) -> Result<LpOutcome> {
    let n = poly.dim();
    if c.len() != n {
        return Err(Error::Dimension(format!("objective has length {}, polytope dimension {n}", c.len())));
    }
    let r = rank(&poly.matrix);
    if r < n {
        return Err(Error::NotPointed { rank: r, dim: n });
    }
    let mut planes: Vec<(usize, Rational)> = Vec::new();
    for i in 0..poly.rows() {
        match (&poly.lower[i], &poly.upper[i]) {
            (Some(l), Some(u)) if l == u => planes.push((i, l.clone())),
            (l, u) => {
                planes.extend(l.iter().map(|l| (i, l.clone())));
                planes.extend(u.iter().map(|u| (i, u.clone())));
            }
        }
    }
    let bounded_rows: Vec<usize> = (0..poly.rows()).filter(|&i| poly.lower[i].is_some() || poly.upper[i].is_some()).collect();
    let sets = binomial(planes.len(), n).saturating_add(binomial(bounded_rows.len(), n.saturating_sub(1)));
    if sets > budget.max_active_sets as u128 {
        return Err(Error::Budget(format!("{sets} active sets exceed the limit of {}", budget.max_active_sets)));
    }
    let better = |x: &Rational, best: &Rational| match sense {
        Sense::Max => x > best,
        Sense::Min => x < best,
    };
    let mut best: Option<(Rational, RatVec)> = None;
    for subset in planes.iter().combinations(n) {
        if subset.iter().map(|(i, _)| i).duplicates().next().is_some() {
            continue;
        }
        let m = Matrix::from_fn(n, n, |i, j| poly.matrix[(subset[i].0, j)].clone());
        let rhs: RatVec = subset.iter().map(|(_, b)| b.clone()).collect();
        let Ok(x) = solve(&m, &rhs) else { continue };
        if !poly.contains(&x) {
            continue;
        }
        let value = dot_rat(c, &x);
        if best.as_ref().is_none_or(|(b, _)| better(&value, b)) {
            best = Some((value, x));
        }
    }
    let Some((value, vertex)) = best else { return Ok(LpOutcome::Infeasible) };
    let sign = if sense == Sense::Max { Rational::one() } else { -Rational::one() };
    let ray_sets = if n == 0 { Vec::new() } else { bounded_rows.iter().combinations(n - 1).collect() };
    for subset in ray_sets {
        let rows: Vec<&[Rational]> = subset.iter().map(|&&i| poly.matrix.row(i)).collect();
        let d = kernel_direction(&rows, n);
        if d.iter().all(Zero::is_zero) {
            continue;
        }
        for dir in [d.clone(), d.iter().map(|x| -x).collect()] {
            if in_recession_cone(poly, &dir) && (&sign * dot_rat(c, &dir)).is_positive() {
                return Ok(LpOutcome::Unbounded);
            }
        }
    }
    Ok(LpOutcome::Optimal { value, vertex })
}

fn optimum(c: &[Rational], poly: &Polytope, sense: Sense, budget: &EnumerationBudget) -> Result<Option<Rational>> {
    match vertex_enum_optimize(c, poly, sense, budget)? {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Unbounded),
    }
}

/// Integer width computed from vertex enumeration only.
pub fn oracle_iwidth(c: &[BigInt], poly: &Polytope, budget: &EnumerationBudget) -> Result<BigInt> {
    let c = to_rat_vec(c);
    match (optimum(&c, poly, Sense::Max, budget)?, optimum(&c, poly, Sense::Min, budget)?) {
        (Some(hi), Some(lo)) => Ok(iwidth_from(&hi, &lo)),
        _ => Ok(BigInt::zero()),
    }
}

/// Branch-and-bound nodes created when branching on `p` at the root of the knapsack LP.
pub fn node_count(inst: &KnapsackInstance, p: &[BigInt], budget: &EnumerationBudget) -> Result<BigInt> {
    oracle_iwidth(p, &Polytope::knapsack(inst), budget)
}

/// Every integral point of the box `lo <= x <= hi`, checked against the point budget first.
fn box_points(lo: &[BigInt], hi: &[BigInt], budget: &EnumerationBudget) -> Result<Vec<IntVec>> {
    let mut count: u128 = 1;
    for (l, h) in lo.iter().zip(hi) {
        if h < l {
            return Ok(Vec::new());
        }
        let span = (h - l + 1u32).to_u128().unwrap_or(u128::MAX);
        count = count.saturating_mul(span);
        if count > budget.max_points as u128 {
            return Err(Error::Budget(format!("box holds more than {} points", budget.max_points)));
        }
    }
    if lo.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    Ok(lo
        .iter()
        .zip(hi)
        .map(|(l, h)| {
            let span = (h - l).to_u64().expect("span within budget");
            (0..=span).map(move |k| l + BigInt::from(k))
        })
        .multi_cartesian_product()
        .collect())
}

/// All integral `x` with `0 <= x <= v` and `beta1 <= a x <= beta2`.
pub fn enumerate_feasible(inst: &KnapsackInstance, budget: &EnumerationBudget) -> Result<Vec<IntVec>> {
    let zeros = vec![BigInt::zero(); inst.n()];
    Ok(box_points(&zeros, inst.v(), budget)?.into_iter().filter(|x| inst.is_feasible(x)).collect())
}

fn contains_int(poly: &Polytope, x: &[BigInt]) -> bool {
    poly.contains(&to_rat_vec(x))
}

/// Integral points of a polytope, found by scanning its bounding box.
pub fn enumerate_polytope(poly: &Polytope, budget: &EnumerationBudget) -> Result<Vec<IntVec>> {
    let n = poly.dim();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for j in 0..n {
        let e = to_rat_vec(&unit_vec(n, j));
        match (optimum(&e, poly, Sense::Min, budget)?, optimum(&e, poly, Sense::Max, budget)?) {
            (Some(l), Some(h)) => {
                lo.push(l.ceil().to_integer());
                hi.push(h.floor().to_integer());
            }
            _ => return Ok(Vec::new()),
        }
    }
    Ok(box_points(&lo, &hi, budget)?.into_iter().filter(|y| contains_int(poly, y)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijectionReport {
    pub original: usize,
    pub reformed: usize,
    /// Every original point maps to an integral feasible reformed point.
    pub forward: bool,
    /// The images of the reformed points are exactly the original points.
    pub backward: bool,
}

impl BijectionReport {
    pub fn holds(&self) -> bool {
        self.forward && self.backward && self.original == self.reformed
    }
}

/// Exhaustive check that `x = U y` matches the integer points of both systems.
pub fn bijection_range(reform: &RangespaceReform, budget: &EnumerationBudget) -> Result<BijectionReport> {
    let xs = enumerate_feasible(&reform.instance, budget)?;
    let poly = Polytope::rangespace(reform)?;
    let mut forward = true;
    for x in &xs {
        let y = reform.u_inv.mul_vec(x)?;
        forward &= contains_int(&poly, &y) && reform.u.mul_vec(&y)? == *x;
    }
    let ys = enumerate_polytope(&poly, budget)?;
    let images: BTreeSet<IntVec> = ys.iter().map(|y| reform.u.mul_vec(y)).collect::<Result<_>>()?;
    let originals: BTreeSet<IntVec> = xs.iter().cloned().collect();
    Ok(BijectionReport { original: xs.len(), reformed: ys.len(), forward, backward: images == originals })
}

/// Exhaustive check that `x = x_beta + V lambda` matches the integer points of both systems.
pub fn bijection_null(reform: &NullspaceReform, budget: &EnumerationBudget) -> Result<BijectionReport> {
    let xs = enumerate_feasible(&reform.instance, budget)?;
    let poly = Polytope::nullspace(reform)?;
    let mut forward = true;
    for x in &xs {
        let diff: IntVec = x.iter().zip(&reform.x_beta).map(|(a, b)| a - b).collect();
        forward &= match lattice_coords(&reform.v_basis, &diff)? {
            Some(lam) => contains_int(&poly, &lam),
            None => false,
        };
    }
    let lams = enumerate_polytope(&poly, budget)?;
    let mut images = BTreeSet::new();
    for lam in &lams {
        let x: IntVec = reform.v_basis.mul_vec(lam)?.iter().zip(&reform.x_beta).map(|(a, b)| a + b).collect();
        images.insert(x);
    }
    let originals: BTreeSet<IntVec> = xs.iter().cloned().collect();
    Ok(BijectionReport { original: xs.len(), reformed: lams.len(), forward, backward: images == originals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, int_vec, rat};
    use crate::reform::{build_nullspace, build_rangespace};
    use crate::width::{iwidth, lp_optimize};
    use proptest::prelude::*;

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    fn inst(a: &[i64], v: &[i64], b1: i64, b2: i64) -> KnapsackInstance {
        KnapsackInstance::new(int_vec(a), int_vec(v), int(b1), int(b2)).unwrap()
    }

    #[test]
    fn unit_box_optima() {
        let poly = Polytope::unit_box(&int_vec(&[1, 1]));
        let c = vec![rat(1, 1), rat(0, 1)];
        assert_eq!(vertex_enum_optimize(&c, &poly, Sense::Max, &budget()).unwrap().value(), Some(&rat(1, 1)));
        assert_eq!(vertex_enum_optimize(&c, &poly, Sense::Min, &budget()).unwrap().value(), Some(&rat(0, 1)));
    }

    #[test]
    fn small_knapsack_optimum() {
        let poly = Polytope::knapsack_raw(&int_vec(&[3, 5]), &int_vec(&[1, 1]), &int(0), &int(8));
        let c = vec![rat(1, 1), rat(1, 1)];
        assert_eq!(vertex_enum_optimize(&c, &poly, Sense::Max, &budget()).unwrap().value(), Some(&rat(2, 1)));
        let eq = Polytope::knapsack_raw(&int_vec(&[3, 5]), &int_vec(&[3, 3]), &int(7), &int(7));
        for (sense, expect) in [(Sense::Max, rat(14, 3)), (Sense::Min, rat(-7, 5))] {
            let c = vec![rat(2, 1), rat(-1, 1)];
            let oracle = vertex_enum_optimize(&c, &eq, sense, &budget()).unwrap();
            assert_eq!(oracle.value(), lp_optimize(&c, &eq, sense).unwrap().value());
            assert_eq!(oracle.value(), Some(&expect));
        }
    }

    #[test]
    fn not_pointed_and_unbounded() {
        let line = Polytope::new(Matrix::from_fn(1, 2, |_, j| rat(j as i64, 1)), vec![Some(rat(0, 1))], vec![Some(rat(1, 1))]).unwrap();
        assert_eq!(vertex_enum_optimize(&[rat(1, 1), rat(0, 1)], &line, Sense::Max, &budget()), Err(Error::NotPointed { rank: 1, dim: 2 }));
        let quadrant = Polytope::new(Matrix::identity(2), vec![Some(rat(0, 1)); 2], vec![None, None]).unwrap();
        assert_eq!(vertex_enum_optimize(&[rat(1, 1), rat(-1, 1)], &quadrant, Sense::Max, &budget()).unwrap(), LpOutcome::Unbounded);
        assert_eq!(vertex_enum_optimize(&[rat(1, 1), rat(1, 1)], &quadrant, Sense::Min, &budget()).unwrap().value(), Some(&rat(0, 1)));
    }

    #[test]
    fn budgets_are_enforced() {
        let tiny = EnumerationBudget::new(3, 2).unwrap();
        let poly = Polytope::unit_box(&int_vec(&[1, 1]));
        assert!(matches!(vertex_enum_optimize(&[rat(1, 1), rat(0, 1)], &poly, Sense::Max, &tiny), Err(Error::Budget(_))));
        assert!(matches!(enumerate_feasible(&inst(&[1, 1], &[1, 1], 0, 2), &tiny), Err(Error::Budget(_))));
        assert!(EnumerationBudget::new(0, 1).is_err());
    }

    #[test]
    fn feasible_enumeration_examples() {
        assert_eq!(enumerate_feasible(&inst(&[2, 3], &[1, 1], 5, 5), &budget()).unwrap(), vec![int_vec(&[1, 1])]);
        assert_eq!(enumerate_feasible(&inst(&[2, 3], &[2, 1], 0, 0), &budget()).unwrap(), vec![int_vec(&[0, 0])]);
        assert_eq!(enumerate_feasible(&inst(&[2, 3], &[2, 1], 0, 7), &budget()).unwrap().len(), 6);
    }

    #[test]
    fn bijection_examples() {
        let i = inst(&[2, 3], &[1, 1], 5, 5);
        let r = bijection_null(&build_nullspace(&i).unwrap(), &budget()).unwrap();
        assert!(r.holds());
        assert_eq!(r.original, 1);
        assert!(bijection_range(&build_rangespace(&i).unwrap(), &budget()).unwrap().holds());
        let i = inst(&[2, 3], &[1, 1], 0, 5);
        let r = bijection_range(&build_rangespace(&i).unwrap(), &budget()).unwrap();
        assert!(r.holds());
        assert_eq!(r.original, 4);
        let empty = inst(&[2, 3], &[1, 1], 1, 1);
        let r = bijection_null(&build_nullspace(&empty).unwrap(), &budget()).unwrap();
        assert!(r.holds() && r.original == 0);
        let beta = 3488 + 451 + 2191;
        let ex = inst(&[3488, 451, 1231, 6415, 2191], &[1; 5], beta, beta);
        assert!(bijection_null(&build_nullspace(&ex).unwrap(), &budget()).unwrap().holds());
        assert!(bijection_range(&build_rangespace(&ex).unwrap(), &budget()).unwrap().holds());
    }

    #[test]
    fn node_count_unit_box() {
        let i = inst(&[1, 1], &[1, 1], 0, 2);
        assert_eq!(node_count(&i, &int_vec(&[1, 0]), &budget()).unwrap(), int(2));
    }

    proptest! {
        #[test]
        fn oracle_matches_simplex(n in 1usize..=4, m in 0usize..=3,
                                  entries in prop::collection::vec(-4i64..=4, 16),
                                  bounds in prop::collection::vec((-8i64..=8, 0i64..=10), 4),
                                  c in prop::collection::vec(-5i64..=5, 4)) {
            let mut poly = Polytope::unit_box(&vec![int(3); n]);
            for i in 0..m {
                let row = (0..n).map(|j| rat(entries[(i * n + j) % 16], 1)).collect();
                let (l, w) = bounds[i];
                poly = poly.with_row(row, Some(rat(l, 1)), Some(rat(l + w, 1)));
            }
            let cr: RatVec = c[..n].iter().map(|&x| rat(x, 1)).collect();
            for sense in [Sense::Max, Sense::Min] {
                let a = vertex_enum_optimize(&cr, &poly, sense, &budget()).unwrap();
                let b = lp_optimize(&cr, &poly, sense).unwrap();
                prop_assert_eq!(a.value(), b.value());
            }
            let ci = int_vec(&c[..n]);
            prop_assert_eq!(oracle_iwidth(&ci, &poly, &budget()).unwrap(), iwidth(&ci, &poly).unwrap());
        }

        #[test]
        fn bijection_sweep(a in prop::collection::vec(1i64..60, 2..=4), v in prop::collection::vec(0i64..=2, 4), f1 in 0u32..=100, f2 in 0u32..=100) {
            let n = a.len();
            let a = int_vec(&a);
            prop_assume!(crate::exact::gcd_vec(&a).is_one());
            let v = int_vec(&v[..n]);
            let av = crate::exact::dot_int(&a, &v);
            let (lo, hi) = (f1.min(f2), f1.max(f2));
            let b1: BigInt = &av * BigInt::from(lo) / 100u32;
            let b2: BigInt = &av * BigInt::from(hi) / 100u32;
            let i = KnapsackInstance::new(a.clone(), v.clone(), b1.clone(), b2).unwrap();
            prop_assert!(bijection_range(&build_rangespace(&i).unwrap(), &budget()).unwrap().holds());
            let e = KnapsackInstance::new(a, v, b1.clone(), b1).unwrap();
            prop_assert!(bijection_null(&build_nullspace(&e).unwrap(), &budget()).unwrap().holds());
        }
    }
}
