mod common;

use bgmorph::paradigms::{generate_word_forms, ParadigmSet};
use proptest::prelude::*;

fn cyrillic_word() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::char::range('а', 'я'), 1..12)
        .prop_map(|cs| cs.into_iter().collect())
}

proptest! {
    #[test]
    fn surface_length_follows_rule(lemma in cyrillic_word(), pick in 0usize..8) {
        let set = ParadigmSet::builtin();
        let p = set.iter().nth(pick % set.len()).unwrap();
        let lemma_len = lemma.chars().count();
        match generate_word_forms(&lemma, &p.type_id, &set) {
            Ok(forms) => {
                prop_assert_eq!(forms.len(), p.rules.len());
                for (form, rule) in forms.iter().zip(&p.rules) {
                    prop_assert_eq!(
                        form.surface.chars().count(),
                        lemma_len - rule.strip + rule.suffix.chars().count()
                    );
                    prop_assert!(form.surface.ends_with(&rule.suffix));
                    prop_assert_eq!(form.tag, rule.tag.encode());
                    prop_assert_eq!(&form.lemma, &lemma);
                }
            }
            Err(_) => prop_assert!(p.rules.iter().any(|r| r.strip >= lemma_len)),
        }
    }

    #[test]
    fn generation_is_deterministic(lemma in cyrillic_word(), pick in 0usize..8) {
        let set = ParadigmSet::builtin();
        let id = set.iter().nth(pick % set.len()).unwrap().type_id.clone();
        let a = generate_word_forms(&lemma, &id, &set).ok();
        let b = generate_word_forms(&lemma, &id, &set).ok();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn ryadak_forms_multiset() {
    use bgmorph::tagset::{Article, Gender, Number};
    let set = ParadigmSet::builtin();
    let forms = generate_word_forms("рядък", "83", &set).unwrap();
    let mut got: Vec<(String, Gender, Number, Article, bool)> = forms
        .iter()
        .skip(1)
        .map(|e| {
            let f = e.tag.decode().unwrap();
            (e.surface.clone(), f.gender, f.number, f.article, f.extended)
        })
        .collect();
    use Article::*;
    use Gender::*;
    use Number::*;
    let mut want: Vec<(String, Gender, Number, Article, bool)> = [
        ("редкия", Masculine, Singular, Definite, false),
        ("редкият", Masculine, Singular, DefiniteFull, false),
        ("рядка", Feminine, Singular, Indefinite, false),
        ("рядката", Feminine, Singular, Definite, false),
        ("рядко", Neuter, Singular, Indefinite, false),
        ("рядкото", Neuter, Singular, Definite, false),
        ("редки", Gender::Unspecified, Plural, Indefinite, false),
        ("редките", Gender::Unspecified, Plural, Definite, false),
        ("редки", Masculine, Singular, Article::Unspecified, true),
    ]
    .into_iter()
    .map(|(s, g, n, a, e)| (s.to_owned(), g, n, a, e))
    .collect();
    got.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
    want.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
    assert_eq!(got, want);
}

#[test]
fn shipped_fixture_lexemes_all_generate() {
    let set = ParadigmSet::builtin();
    for lx in common::fixture_lexemes() {
        assert!(
            generate_word_forms(&lx.lemma, &lx.type_id, &set).is_ok(),
            "{lx:?}"
        );
    }
}
