//! Cross-module behaviour through the public API only.

use mheis::haar::{self, CylinderDoc, CylinderFunction, Side};
use mheis::heisenberg::Verdict;
use mheis::{BigInt, BigRational, BilinearForm, ChainFamily, Exec, HPoint, HeisenbergContext};

fn ctx(exec: Exec) -> HeisenbergContext {
    HeisenbergContext::new(3, BilinearForm::new(vec![vec![0, 1], vec![0, 0]]).unwrap(), 4)
        .unwrap()
        .with_exec(exec)
}

#[test]
fn sequential_and_parallel_agree() {
    let (seq, par) = (ctx(Exec::Sequential), ctx(Exec::Parallel));
    for family in [ChainFamily::H, ChainFamily::G] {
        assert_eq!(haar::enumerate_cosets(&seq, family, 1).unwrap(), haar::enumerate_cosets(&par, family, 1).unwrap());
        assert_eq!(seq.check_normality(family, 1, 2).unwrap(), par.check_normality(family, 1, 2).unwrap());
    }
    let f = |c: &HeisenbergContext| {
        CylinderFunction::from_fn(c, ChainFamily::G, 1, |g| {
            BigRational::new(g.residues().sum::<BigInt>(), BigInt::from(5))
        })
        .unwrap()
    };
    assert_eq!(haar::integral(&seq, &f(&seq)).unwrap(), haar::integral(&par, &f(&par)).unwrap());
}

#[test]
fn cylinder_document_round_trip_preserves_integrals() {
    let c = ctx(Exec::default());
    let f = CylinderFunction::from_fn(&c, ChainFamily::H, 1, |g| {
        BigRational::from_integer(g.s().value().clone())
    })
    .unwrap();
    let text = serde_json::to_string(&f.to_doc(&c).unwrap()).unwrap();
    let doc: CylinderDoc = serde_json::from_str(&text).unwrap();
    let g = CylinderFunction::from_doc(&c, &doc).unwrap();
    assert_eq!(f, g);
    // central coordinate mod 3 averages to 1
    assert_eq!(haar::integral(&c, &g).unwrap(), BigRational::from_integer(1.into()));
    let a = c.point(&[1, 2], 0).unwrap();
    let right = haar::translate(&c, &g, &a, Side::Right).unwrap();
    assert_eq!(haar::integral(&c, &right).unwrap(), BigRational::from_integer(1.into()));
}

#[test]
fn points_survive_json_and_normality_witnesses_recompute() {
    let c = HeisenbergContext::new(2, BilinearForm::new(vec![vec![0, 1], vec![0, 0]]).unwrap(), 4).unwrap();
    let report = c.check_normality(ChainFamily::G, 1, 4).unwrap();
    assert_eq!(report.verdict, Verdict::NotNormal);
    let w = report.witness.unwrap();
    let text = serde_json::to_string(&w.conjugator).unwrap();
    let a: HPoint = serde_json::from_str(&text).unwrap();
    assert_eq!(c.conjugate(&a, &w.element).unwrap(), w.conjugate);
}
