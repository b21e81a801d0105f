//! Worked examples shipped with the crate. The same files live in the
//! repository's `corpus/` directory.
//!
//! Elements of the six-element poset are numbered `0=0, a=1, b=2, c=3,
//! d=4, 1=5`.

use crate::error::Result;
use crate::formula::{parse_formula, PpFormula};
use crate::matrix::Matrix;
use crate::ops::FiniteOperation;
use crate::relation::FiniteRelation;
use crate::text::parse_relation;

pub const POSET_ORDER: &str = include_str!("../../../corpus/ex_5_3_order.rel");
pub const POSET_SIGMA: &str = include_str!("../../../corpus/ex_5_3_sigma.rel");
pub const POSET_SIGMA_FORMULA: &str = include_str!("../../../corpus/ex_5_3_sigma.ppf");
pub const POSET_MATRIX: &str = include_str!("../../../corpus/ex_5_3_matrix.mat");
pub const NONMONOTONE_SIGMA: &str = include_str!("../../../corpus/remark_4_5_sigma.rel");
pub const NONMONOTONE_RHO: &str = include_str!("../../../corpus/remark_4_5_rho.rel");
pub const RECT_BAND: &str = include_str!("../../../corpus/rect_band_2.op");
pub const DELTA3: &str = include_str!("../../../corpus/delta_3.rel");

/// Name the σ formula uses for the order.
pub const POSET_NAME: &str = "poset";

pub const A: usize = 1;
pub const B: usize = 2;
pub const C: usize = 3;
pub const D: usize = 4;

pub fn poset_order() -> Result<FiniteRelation> {
    parse_relation(POSET_ORDER)
}

pub fn poset_sigma() -> Result<FiniteRelation> {
    parse_relation(POSET_SIGMA)
}

pub fn poset_sigma_formula() -> Result<PpFormula> {
    parse_formula(POSET_SIGMA_FORMULA)
}

pub fn poset_matrix() -> Result<Matrix> {
    Matrix::parse(POSET_MATRIX)
}

pub fn nonmonotone_sigma() -> Result<FiniteRelation> {
    parse_relation(NONMONOTONE_SIGMA)
}

pub fn nonmonotone_rho() -> Result<FiniteRelation> {
    parse_relation(NONMONOTONE_RHO)
}

pub fn rect_band() -> Result<FiniteOperation> {
    FiniteOperation::parse(RECT_BAND)
}

pub fn delta3() -> Result<FiniteRelation> {
    parse_relation(DELTA3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{classify, is_reflexive, is_transitive, models_matrix};
    use crate::formula::{eval_pp, RelationStore};

    #[test]
    fn corpus_parses() {
        assert_eq!(poset_order().unwrap().len(), 6 + 5 + 4 + 4);
        assert_eq!(poset_sigma().unwrap().len(), 215);
        assert_eq!(nonmonotone_rho().unwrap().len(), nonmonotone_sigma().unwrap().len() + 1);
        assert_eq!(rect_band().unwrap(), crate::ops::rect_band(2).unwrap());
        assert!(classify(&delta3().unwrap()).is_gpord);
    }

    #[test]
    fn sigma_formula_matches_file() {
        let order = poset_order().unwrap();
        let mut store = RelationStore::new(order.universe());
        store.insert(POSET_NAME, order).unwrap();
        let sigma = eval_pp(&poset_sigma_formula().unwrap(), &store).unwrap();
        assert_eq!(sigma, poset_sigma().unwrap());
        assert!(is_reflexive(&sigma).is_ok());
        let m = poset_matrix().unwrap();
        assert!(models_matrix(&sigma, &m).unwrap());
        assert_eq!(m.diagonal(), vec![A, B, C, D]);
        assert!(!sigma.contains(&m.diagonal()));
        assert!(is_transitive(&sigma).is_err());
    }
}
