//! Polynomial exchange format: a list of `{coeff, exps}` records in
//! lexicographic exponent order, coefficients as rational or decimal strings.

use serde::{Deserialize, Serialize};

use super::{Coeff, PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub coeff: String,
    pub exps: Vec<u32>,
}

pub fn to_records<C: Coeff>(p: &Polynomial<C>) -> Vec<TermRecord> {
    p.terms()
        .map(|(e, c)| TermRecord {
            coeff: c.to_exchange_string(),
            exps: e.clone(),
        })
        .collect()
}

pub fn from_records<C: Coeff>(
    nvars: usize,
    records: &[TermRecord],
) -> Result<Polynomial<C>, PolyError> {
    let terms = records
        .iter()
        .map(|r| Ok((r.exps.clone(), C::parse_coeff(&r.coeff)?)))
        .collect::<Result<Vec<_>, PolyError>>()?;
    Polynomial::from_terms(nvars, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Rational;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn records_round_trip(terms in proptest::collection::vec(
            ((0u32..5, 0u32..5, 0u32..5), -50i64..50, 1i64..9), 0..12)
        ) {
            let p = Polynomial::<Rational>::from_terms(
                3,
                terms.into_iter().map(|((a, b, c), n, d)| (vec![a, b, c], Rational::from_ratio(n, d))),
            ).unwrap();
            let recs = to_records(&p);
            let mut sorted = recs.clone();
            sorted.sort_by(|a, b| a.exps.cmp(&b.exps));
            prop_assert_eq!(&recs, &sorted);
            prop_assert_eq!(from_records::<Rational>(3, &recs).unwrap(), p);
        }
    }

    #[test]
    fn rejects_wrong_arity_and_bad_coefficients() {
        let recs = vec![TermRecord {
            coeff: "1".into(),
            exps: vec![1],
        }];
        assert!(from_records::<Rational>(2, &recs).is_err());
        let recs = vec![TermRecord {
            coeff: "one".into(),
            exps: vec![1, 0],
        }];
        assert!(matches!(
            from_records::<Rational>(2, &recs),
            Err(PolyError::Parse(_))
        ));
        let recs = vec![
            TermRecord {
                coeff: "1/2".into(),
                exps: vec![1, 0],
            },
            TermRecord {
                coeff: "-0.5".into(),
                exps: vec![1, 0],
            },
        ];
        assert!(from_records::<Rational>(2, &recs).unwrap().is_zero());
    }
}
