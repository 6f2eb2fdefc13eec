use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{dot_rat, rat_int, IntMat, Matrix, RatMat, RatVec, Rational};
use crate::reform::{KnapsackInstance, NullspaceReform, RangespaceReform};

/// `{x : lower <= M x <= upper}`; a missing bound is infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    pub matrix: RatMat,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

fn int_bound(x: &BigInt) -> Option<Rational> {
    Some(rat_int(x))
}

impl Polytope {
    pub fn new(matrix: RatMat, lower: Vec<Option<Rational>>, upper: Vec<Option<Rational>>) -> Result<Self> {
        let m = matrix.rows();
        if lower.len() != m || upper.len() != m {
            return Err(Error::Dimension(format!("{m} rows but {} lower and {} upper bounds", lower.len(), upper.len())));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if let (Some(l), Some(u)) = (l, u) {
                if l > u {
                    return Err(Error::Invalid(format!("row {i}: lower bound {l} exceeds upper bound {u}")));
                }
            }
        }
        Ok(Polytope { matrix, lower, upper })
    }

    fn from_int(matrix: &IntMat, lower: Vec<Option<Rational>>, upper: Vec<Option<Rational>>) -> Result<Self> {
        Polytope::new(matrix.to_rational(), lower, upper)
    }

    /// `0 <= x <= v`.
    pub fn unit_box(v: &[BigInt]) -> Self {
        let n = v.len();
        Polytope {
            matrix: Matrix::identity(n),
            lower: vec![Some(Rational::zero()); n],
            upper: v.iter().map(int_bound).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    /// The LP relaxation of the knapsack instance.
    pub fn knapsack(inst: &KnapsackInstance) -> Self {
        Polytope::knapsack_raw(inst.a(), inst.v(), inst.beta1(), inst.beta2())
    }

    /// `beta1 <= a x <= beta2, 0 <= x <= v` without checking the instance assumptions.
    pub fn knapsack_raw(a: &[BigInt], v: &[BigInt], beta1: &BigInt, beta2: &BigInt) -> Self {
        Polytope::unit_box(v).with_row(
            a.iter().map(rat_int).collect(),
            Some(rat_int(beta1)),
            Some(rat_int(beta2)),
        )
    }

    /// `beta1 <= (a U) y <= beta2, 0 <= U y <= v`.
    pub fn rangespace(reform: &RangespaceReform) -> Result<Self> {
        let inst = &reform.instance;
        let n = inst.n();
        let m = Matrix::from_rows(vec![reform.au.clone()])?.vstack(&reform.u)?;
        let mut lower = vec![int_bound(inst.beta1())];
        lower.extend(std::iter::repeat_n(Some(Rational::zero()), n));
        let mut upper = vec![int_bound(inst.beta2())];
        upper.extend(inst.v().iter().map(int_bound));
        Polytope::from_int(&m, lower, upper)
    }

    /// `-x_beta <= V lambda <= v - x_beta`.
    pub fn nullspace(reform: &NullspaceReform) -> Result<Self> {
        let xb = &reform.x_beta;
        let lower = xb.iter().map(|x| Some(-rat_int(x))).collect();
        let upper = reform.instance.v().iter().zip(xb).map(|(vi, x)| Some(rat_int(&(vi - x)))).collect();
        Polytope::from_int(&reform.v_basis, lower, upper)
    }

    /// Appends the row `lower <= row x <= upper`.
    pub fn with_row(mut self, row: RatVec, lower: Option<Rational>, upper: Option<Rational>) -> Self {
        assert_eq!(row.len(), self.dim(), "row length must match the polytope dimension");
        let mut rows = self.matrix.row_vecs();
        rows.push(row);
        self.matrix = Matrix::from_rows(rows).expect("rows share a length");
        self.lower.push(lower);
        self.upper.push(upper);
        self
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        (0..self.rows()).all(|i| {
            let y = dot_rat(self.matrix.row(i), x);
            self.lower[i].as_ref().is_none_or(|l| &y >= l) && self.upper[i].as_ref().is_none_or(|u| &y <= u)
        })
    }
}
