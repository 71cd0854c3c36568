mod common;

use proptest::prelude::*;

use combpol::forms::{
    canonical_indices, defect_as_form, form_eval, is_characteristic, realize, recover_small_arity, DefectForm,
    FormDocument, SymmetricForm,
};
use combpol::poly::DEFAULT_TABLE_BUDGET;
use combpol::{parse_poly, Field, FieldElement};
use common::{gf, table, table_values, tuples};

fn form(field: &Field, n: usize, d: usize, values: &[u64]) -> SymmetricForm {
    let entries = canonical_indices(n, d).into_iter().zip(values).map(|(i, &v)| (i, FieldElement::Finite(v)));
    SymmetricForm::from_entries(field, n, d, entries.collect::<Vec<_>>()).unwrap()
}

fn form_values(q: u64, n: usize, d: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..q, canonical_indices(n, d).len())
}

fn all_characteristic(field: &Field, n: usize, d: usize) -> Vec<SymmetricForm> {
    let q = field.order().unwrap();
    let slots = canonical_indices(n, d).len();
    (0..q.pow(slots as u32))
        .map(|mut k| {
            let vals: Vec<u64> = (0..slots)
                .map(|_| {
                    let v = k % q;
                    k /= q;
                    v
                })
                .collect();
            form(field, n, d, &vals)
        })
        .filter(|phi| is_characteristic(phi, DEFAULT_TABLE_BUDGET).unwrap().is_none())
        .collect()
}

fn round_trips(phi: &SymmetricForm) -> bool {
    let f = realize(phi).unwrap();
    let tab = f.to_table(DEFAULT_TABLE_BUDGET).unwrap();
    f.is_homogeneous_of_degree(phi.arity() as u64)
        && f.is_totally_reduced()
        && matches!(defect_as_form(&tab, phi.arity(), DEFAULT_TABLE_BUDGET, 0).unwrap(), DefectForm::Linear { form, .. } if &form == phi)
}

#[test]
fn every_characteristic_form_over_small_spaces_round_trips() {
    for (field, n, d) in [(gf(2, 1), 2, 3), (gf(2, 1), 3, 2), (gf(3, 1), 3, 2), (gf(2, 2), 2, 2), (gf(2, 2), 3, 2)] {
        for phi in all_characteristic(&field, n, d) {
            assert!(round_trips(&phi), "{phi:?}");
        }
    }
}

/// A characteristic form vanishing on all pairwise-distinct argument tuples
/// vanishes everywhere, so two such forms agreeing there are equal.
#[test]
fn characteristic_forms_are_determined_by_distinct_arguments() {
    let field = gf(3, 1);
    let space = combpol::poly::Space::new(&field, 2, DEFAULT_TABLE_BUDGET).unwrap();
    let forms = all_characteristic(&field, 3, 2);
    assert!(forms.len() > 1);
    let values = |phi: &SymmetricForm, distinct_only: bool| -> Vec<FieldElement> {
        tuples(space.size(), 3)
            .filter(|t| !distinct_only || (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]))
            .map(|t| form_eval(phi, &t.iter().map(|&i| space.point(i)).collect::<Vec<_>>()).unwrap())
            .collect()
    };
    for (i, phi) in forms.iter().enumerate() {
        for psi in &forms[i + 1..] {
            if values(phi, true) == values(psi, true) {
                assert_eq!(values(phi, false), values(psi, false));
            }
        }
    }
}

#[test]
fn char_two_quadratic_is_not_determined_by_its_defect() {
    let f = gf(2, 1);
    let a = parse_poly("x1*x2", &f, 2).unwrap();
    let b = parse_poly("x1*x2 + x1^2", &f, 2).unwrap().reduce();
    assert_ne!(a, b);
    let da = defect_as_form(&a.to_table(DEFAULT_TABLE_BUDGET).unwrap(), 2, DEFAULT_TABLE_BUDGET, 0).unwrap();
    let db = defect_as_form(&b.to_table(DEFAULT_TABLE_BUDGET).unwrap(), 2, DEFAULT_TABLE_BUDGET, 0).unwrap();
    assert_eq!(da, db);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn forms_below_characteristic_round_trip(vals in form_values(5, 3, 2)) {
        let phi = form(&gf(5, 1), 3, 2, &vals);
        prop_assert!(is_characteristic(&phi, DEFAULT_TABLE_BUDGET).unwrap().is_none());
        prop_assert!(round_trips(&phi));
        prop_assert_eq!(recover_small_arity(&phi).unwrap(), realize(&phi).unwrap());
    }

    #[test]
    fn rational_forms_round_trip_symbolically(vals in prop::collection::vec(-20i64..20, canonical_indices(3, 2).len())) {
        let q = Field::rational();
        let entries = canonical_indices(3, 2).into_iter().zip(&vals).map(|(i, &v)| (i, q.from_int(v)));
        let phi = SymmetricForm::from_entries(&q, 3, 2, entries.collect::<Vec<_>>()).unwrap();
        let f = realize(&phi).unwrap();
        prop_assert!(f.is_homogeneous_of_degree(3));
        prop_assert_eq!(recover_small_arity(&phi).unwrap(), f);
    }

    /// Whenever the n-th defect of a table is n-linear, the form is
    /// characteristic.
    #[test]
    fn linear_defects_are_characteristic(values in table_values(2, 3), n in 2usize..=3) {
        let tab = table(&gf(2, 1), 3, values);
        if let DefectForm::Linear { form, .. } = defect_as_form(&tab, n, DEFAULT_TABLE_BUDGET, 0).unwrap() {
            prop_assert!(is_characteristic(&form, DEFAULT_TABLE_BUDGET).unwrap().is_none());
        }
    }

    #[test]
    fn quadratics_outside_char_two_are_recovered(vals in form_values(3, 2, 3)) {
        let f = gf(3, 1);
        let alpha = realize(&form(&f, 2, 3, &vals)).unwrap();
        let tab = alpha.to_table(DEFAULT_TABLE_BUDGET).unwrap();
        let DefectForm::Linear { form: phi, .. } = defect_as_form(&tab, 2, DEFAULT_TABLE_BUDGET, 0).unwrap() else {
            panic!("quadratic {alpha} has a non-bilinear second defect");
        };
        prop_assert_eq!(realize(&phi).unwrap(), alpha.reduce());
    }

    #[test]
    fn form_documents_round_trip(vals in form_values(4, 3, 2)) {
        let phi = form(&gf(2, 2), 3, 2, &vals);
        let json = serde_json::to_string(&phi.to_document()).unwrap();
        let doc: FormDocument = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(doc.to_form().unwrap(), phi);
    }
}
