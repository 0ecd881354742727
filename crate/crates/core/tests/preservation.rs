//! Differential preservation over the generate -> transform -> check
//! pipeline at integration scale: every emitted variant must be judged
//! equivalent to its original on every checkable fixture.

use codemorph_core::analysis::{enumerate_sites, resolve_scopes, TransformKind};
use codemorph_core::fixtures::generate_method;
use codemorph_core::interp::{check_equivalence, EquivalenceStatus};
use codemorph_core::syntax::parse_method;
use codemorph_core::syntax::print_method;
use codemorph_core::transform::{single_place, TransformCtx};

#[test]
fn every_single_place_variant_is_equivalent() {
    let mut checked = 0u32;
    for kind in TransformKind::ALL {
        for seed in 0..30u64 {
            let method = generate_method(seed * 13 + 1, Some(kind));
            let table = resolve_scopes(&method).unwrap();
            let ctx = TransformCtx { method_id: "fixture", ast: &method, table: &table };
            let (variants, skipped) = single_place(&ctx, kind, seed);
            assert!(skipped.is_empty(), "{kind}: unexpected skips: {skipped:?}");
            assert_eq!(
                variants.len(),
                enumerate_sites(&method, &table, kind).len(),
                "{kind}: variant count must equal site count"
            );
            for v in variants {
                let verdict = check_equivalence(&method, &v.ast, 20, seed);
                match verdict.status {
                    EquivalenceStatus::Equivalent => checked += 1,
                    EquivalenceStatus::NotCheckable { ref reason } => {
                        panic!(
                            "{kind} seed {seed}: generated fixture should be checkable ({reason})\n{}",
                            print_method(&method)
                        );
                    }
                    EquivalenceStatus::Divergent { ref input, .. } => {
                        panic!(
                            "{kind} seed {seed}: DIVERGENT on {input:?}\noriginal:\n{}\nvariant:\n{}",
                            print_method(&method),
                            print_method(&v.ast)
                        );
                    }
                }
            }
        }
    }
    assert!(checked > 200, "expected a substantial number of checks, got {checked}");
}

#[test]
fn variant_sources_parse_and_reprint_identically() {
    for kind in TransformKind::ALL {
        for seed in 40..55u64 {
            let method = generate_method(seed, Some(kind));
            let table = resolve_scopes(&method).unwrap();
            let ctx = TransformCtx { method_id: "fixture", ast: &method, table: &table };
            let (variants, _) = single_place(&ctx, kind, seed);
            for v in variants {
                let reparsed = parse_method(&v.source).expect("variant parses");
                assert_eq!(print_method(&reparsed), v.source);
                assert_eq!(reparsed, v.ast);
            }
        }
    }
}
