//! The centered residue `<a>_p = min_k |a - kp|` and a constructive solver
//! for the simultaneous small-residue problem: given forms `b_1, ..., b_m`
//! and caps `V_1, ..., V_m`, find `v` coprime to `p` with `<b_i v>_p <= V_i`
//! for every `i`. When `V_1 ... V_m > p^(m-1)` a solution always exists
//! (Minkowski's theorem); the solver searches exhaustively and reports
//! whether that condition held.

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::field::mul_mod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("need at least one linear form")]
    NoForms,
    #[error("cap V_{index} = {value} must satisfy 1 <= V < p = {p}")]
    BadCap { index: usize, value: u64, p: u64 },
    #[error("form b_{index} = {value} must be a residue mod p = {p}")]
    BadForm { index: usize, value: u64, p: u64 },
    #[error("forms and caps have different lengths ({forms} vs {caps})")]
    LengthMismatch { forms: usize, caps: usize },
    #[error("no multiplier satisfies all constraints")]
    NotFound,
}

/// `min_k |a - kp|`, an integer in `[0, p/2]`.
pub fn centered_residue(a: i128, p: u64) -> u64 {
    let r = a.rem_euclid(p as i128) as u64;
    r.min(p - r)
}

/// An instance of the simultaneous reduction problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionProblem {
    p: u64,
    forms: Vec<u64>,
    caps: Vec<u64>,
}

impl ReductionProblem {
    pub fn new(p: u64, forms: Vec<u64>, caps: Vec<u64>) -> Result<Self, ReductionError> {
        if forms.is_empty() {
            return Err(ReductionError::NoForms);
        }
        if forms.len() != caps.len() {
            return Err(ReductionError::LengthMismatch {
                forms: forms.len(),
                caps: caps.len(),
            });
        }
        for (i, &b) in forms.iter().enumerate() {
            if b >= p {
                return Err(ReductionError::BadForm {
                    index: i,
                    value: b,
                    p,
                });
            }
        }
        for (i, &v) in caps.iter().enumerate() {
            if v == 0 || v >= p {
                return Err(ReductionError::BadCap {
                    index: i,
                    value: v,
                    p,
                });
            }
        }
        Ok(ReductionProblem { p, forms, caps })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn forms(&self) -> &[u64] {
        &self.forms
    }

    pub fn caps(&self) -> &[u64] {
        &self.caps
    }

    /// Exact check of `V_1 ... V_m > p^(m-1)`.
    pub fn minkowski_condition(&self) -> bool {
        let product: BigUint = self.caps.iter().map(|&v| BigUint::from(v)).product();
        let rhs = BigUint::from(self.p).pow(self.caps.len() as u32 - 1);
        product > rhs
    }

    /// Least `v` in `1..p` with every `<b_i v>_p <= V_i`. Sufficiency of the
    /// Minkowski condition means `NotFound` there signals a bug upstream.
    pub fn solve(&self) -> Result<ReductionSolution, ReductionError> {
        let p = self.p;
        for v in 1..p {
            let mut residues = Vec::with_capacity(self.forms.len());
            let mut ok = true;
            for (&b, &cap) in self.forms.iter().zip(&self.caps) {
                let r = centered_residue(mul_mod(b, v, p) as i128, p);
                if r > cap {
                    ok = false;
                    break;
                }
                residues.push(r);
            }
            if ok {
                return Ok(ReductionSolution {
                    v,
                    residues,
                    condition_met: self.minkowski_condition(),
                });
            }
        }
        Err(ReductionError::NotFound)
    }
}

/// A multiplier with its centered residues; `condition_met` records whether
/// the instance satisfied the Minkowski product condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionSolution {
    pub v: u64,
    pub residues: Vec<u64>,
    pub condition_met: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::is_prime;

    #[test]
    fn centered_residue_examples() {
        assert_eq!(centered_residue(10, 7), 3);
        assert_eq!(centered_residue(5, 7), 2);
        assert_eq!(centered_residue(0, 7), 0);
    }

    #[test]
    fn centered_residue_symmetry_exhaustive() {
        for p in (3..100u64).filter(|&p| is_prime(p)) {
            for a in -(2 * p as i128)..=(2 * p as i128) {
                let r = centered_residue(a, p);
                assert_eq!(r, centered_residue(-a, p));
                assert_eq!(r, centered_residue(a + p as i128, p));
                assert!(r as u128 * 2 <= p as u128);
            }
        }
    }

    #[test]
    fn solve_single_form_example() {
        // p=7, b=3, V=1: v=2 already gives <6>_7 = 1, so the least v is 2.
        let prob = ReductionProblem::new(7, vec![3], vec![1]).unwrap();
        let sol = prob.solve().unwrap();
        // Brute-force oracle over all v confirms the least valid multiplier.
        let least = (1..7)
            .find(|&v| centered_residue((3 * v) as i128, 7) <= 1)
            .unwrap();
        assert_eq!(sol.v, least);
        assert_eq!(sol.v, 2);
        assert_eq!(sol.residues, vec![1]);
    }

    #[test]
    fn solve_two_forms_condition_met() {
        let prob = ReductionProblem::new(11, vec![3, 5], vec![4, 9]).unwrap();
        assert!(prob.minkowski_condition()); // 36 > 11
        let sol = prob.solve().unwrap();
        assert!(sol.condition_met);
        assert!(centered_residue((3 * sol.v) as i128, 11) <= 4);
        assert!(centered_residue((5 * sol.v) as i128, 11) <= 9);
    }

    #[test]
    fn zero_forms_solved_by_one() {
        let prob = ReductionProblem::new(13, vec![0, 0], vec![1, 1]).unwrap();
        let sol = prob.solve().unwrap();
        assert_eq!(sol.v, 1);
        assert_eq!(sol.residues, vec![0, 0]);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert_eq!(
            ReductionProblem::new(7, vec![], vec![]),
            Err(ReductionError::NoForms)
        );
        assert_eq!(
            ReductionProblem::new(7, vec![1], vec![7]),
            Err(ReductionError::BadCap {
                index: 0,
                value: 7,
                p: 7
            })
        );
        assert_eq!(
            ReductionProblem::new(7, vec![9], vec![1]),
            Err(ReductionError::BadForm {
                index: 0,
                value: 9,
                p: 7
            })
        );
    }

    #[test]
    fn soundness_of_returned_multiplier() {
        for p in (3..50u64).filter(|&p| is_prime(p)) {
            for b in 0..p {
                for cap in 1..p {
                    let prob = ReductionProblem::new(p, vec![b], vec![cap]).unwrap();
                    if let Ok(sol) = prob.solve() {
                        assert!(sol.v >= 1 && sol.v < p);
                        assert_eq!(crate::field::gcd(sol.v, p), 1);
                        assert!(
                            centered_residue(mul_mod(b, sol.v, p) as i128, p) <= cap
                        );
                    }
                }
            }
        }
    }
}
