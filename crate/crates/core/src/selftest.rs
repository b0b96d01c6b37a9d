//! A seeded, reduced-size run of the library's property suite, used by the
//! `selftest` command. Every check is exact and deterministic in the seed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exec::Exec;
use crate::fractions::{int_dilate, int_mul, BaseRing, FractionRing, IntHPoint, MultSet};
use crate::haar::{self, CylinderFunction, Side};
use crate::heisenberg::{ChainFamily, HPoint, HeisenbergContext, Membership, Verdict};
use crate::hmodule::BilinearForm;
use crate::madic::AdicRing;
use crate::tower::{self, ChainSpec, RadiusProfile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Samples per randomized check.
pub const SAMPLES: u64 = 300;

type Check = fn(&mut ChaCha8Rng, Exec) -> Result<u64, String>;

const CHECKS: &[(&str, Check)] = &[
    ("ultrametric", ultrametric),
    ("completion_ring", completion_ring),
    ("group_law", group_law),
    ("chain_geometry", chain_geometry),
    ("normality", normality),
    ("haar", haar_checks),
    ("embedding_isometry", embedding_isometry),
    ("fractions", fractions),
];

pub fn run(seed: u64, exec: Exec) -> SelftestReport {
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            match check(&mut rng, exec) {
                Ok(cases) => CheckResult { name, cases, passed: true, failure: None },
                Err(e) => CheckResult { name, cases: 0, passed: false, failure: Some(e) },
            }
        })
        .collect();
    SelftestReport { seed, passed: checks.iter().all(|c| c.passed), checks }
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn ultrametric(rng: &mut ChaCha8Rng, _: Exec) -> Result<u64, String> {
    let profile = RadiusProfile::default();
    for m in [2i64, 3, 10] {
        let chain = ChainSpec::ideal_power(m);
        for _ in 0..SAMPLES {
            let [x, y, z, t]: [BigInt; 4] = std::array::from_fn(|_| BigInt::from(rng.gen_range(-1_000_000i64..1_000_000)));
            let d = |a: &BigInt, b: &BigInt| tower::distance(a, b, &chain, &profile).radius;
            let (xy, yz, xz) = (d(&x, &y), d(&y, &z), d(&x, &z));
            ensure(xz <= xy.clone().max(yz), || format!("triangle fails at m={m}: {x} {y} {z}"))?;
            ensure(xy == d(&y, &x), || format!("asymmetric at m={m}: {x} {y}"))?;
            ensure(xy == d(&(&x + &t), &(&y + &t)), || format!("not translation invariant at m={m}"))?;
        }
    }
    Ok(3 * SAMPLES)
}

fn completion_ring(rng: &mut ChaCha8Rng, _: Exec) -> Result<u64, String> {
    for (m, n) in [(2i64, 6u32), (3, 4), (10, 3)] {
        let r = AdicRing::new(m, n).map_err(|e| e.to_string())?;
        let top = r.power(n).clone();
        let mut draw = || r.element(&(BigInt::from(rng.gen::<u64>()) % &top));
        for _ in 0..SAMPLES {
            let (a, b, c) = (draw(), draw(), draw());
            ensure(&(&a + &b) + &c == &a + &(&b + &c), || format!("add assoc {a} {b} {c}"))?;
            ensure(&(&a * &b) * &c == &a * &(&b * &c), || format!("mul assoc {a} {b} {c}"))?;
            ensure(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || format!("distributivity {a} {b} {c}"))?;
            ensure(&a + &(-&a) == r.zero() && &a * &r.one() == a, || format!("identities {a}"))?;
            for j in 1..=n {
                let t = |v: &crate::madic::MadicInt| v.truncate(j).expect("j <= n");
                ensure(t(&(&a * &b)) == &t(&a) * &t(&b), || format!("truncation mul {a} {b} j={j}"))?;
                ensure(t(&(&a + &b)) == &t(&a) + &t(&b), || format!("truncation add {a} {b} j={j}"))?;
            }
            let x = a.scale(&BigInt::from(m));
            let inv = x.geom_inverse_one_minus().map_err(|e| e.to_string())?;
            ensure(&(&r.one() - &x) * &inv == r.one(), || format!("geometric series {x}"))?;
        }
    }
    Ok(3 * SAMPLES)
}

fn forms() -> Vec<BilinearForm> {
    [vec![vec![1]], vec![vec![0, 1], vec![0, 0]], vec![vec![0, 1], vec![-1, 0]]]
        .into_iter()
        .map(|b| BilinearForm::new(b).expect("square"))
        .collect()
}

fn random_point(ctx: &HeisenbergContext, rng: &mut ChaCha8Rng) -> HPoint {
    let top = ctx.ring().power(ctx.precision()).clone();
    let mut draw = || BigInt::from(rng.gen::<u64>()) % &top;
    let x: Vec<BigInt> = (0..ctx.rank()).map(|_| draw()).collect();
    let s = draw();
    ctx.point_big(&x, &s).expect("reduced")
}

fn group_law(rng: &mut ChaCha8Rng, _: Exec) -> Result<u64, String> {
    for m in [2i64, 3] {
        for form in forms() {
            let ctx = HeisenbergContext::new(m, form, 6).map_err(|e| e.to_string())?;
            let e = ctx.identity();
            for _ in 0..SAMPLES {
                let (g, h, k) = (random_point(&ctx, rng), random_point(&ctx, rng), random_point(&ctx, rng));
                let mul = |a: &HPoint, b: &HPoint| ctx.mul(a, b).expect("same group");
                ensure(mul(&mul(&g, &h), &k) == mul(&g, &mul(&h, &k)), || "associativity".into())?;
                ensure(mul(&g, &e) == g && mul(&e, &g) == g, || "identity".into())?;
                let gi = ctx.inv(&g).map_err(|e| e.to_string())?;
                ensure(mul(&g, &gi).is_identity() && mul(&gi, &g).is_identity(), || "inverse".into())?;
                ctx.conjugate(&g, &h).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(6 * SAMPLES)
}

fn chain_geometry(rng: &mut ChaCha8Rng, _: Exec) -> Result<u64, String> {
    let n = 6;
    let mut cases = 0;
    for form in forms() {
        let ctx = HeisenbergContext::new(2, form, n).map_err(|e| e.to_string())?;
        for j in 0..=n / 2 {
            for l in 0..=(n / 2 - j) {
                let r = BigInt::from(2).pow(l);
                for _ in 0..SAMPLES / 10 {
                    let g = random_point(&ctx, rng);
                    let member = |p: &HPoint, f, i| ctx.chain_member(p, f, i).expect("in range");
                    if member(&g, ChainFamily::H, 2 * j) == Membership::Member {
                        ensure(member(&g, ChainFamily::G, j) == Membership::Member, || "H_2j ⊄ G_j".into())?;
                    }
                    if member(&g, ChainFamily::G, j) == Membership::Member {
                        ensure(member(&g, ChainFamily::H, j) == Membership::Member, || "G_j ⊄ H_j".into())?;
                    }
                    // force g into G_j and dilate
                    let gj = ctx.dilate(&BigInt::from(2).pow(j), &g).map_err(|e| e.to_string())?;
                    let d = ctx.dilate(&r, &gj).map_err(|e| e.to_string())?;
                    ensure(member(&d, ChainFamily::G, j + l) == Membership::Member, || format!("dilation j={j} l={l}"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(cases)
}

fn normality(_: &mut ChaCha8Rng, exec: Exec) -> Result<u64, String> {
    let h = HeisenbergContext::new(2, BilinearForm::new(vec![vec![1]]).expect("square"), 4)
        .map_err(|e| e.to_string())?
        .with_exec(exec);
    for j in 1..=2 {
        let rep = h.check_normality(ChainFamily::H, j, 4).map_err(|e| e.to_string())?;
        ensure(rep.verdict == Verdict::Normal, || format!("H_{j} not normal"))?;
    }
    let g = HeisenbergContext::new(2, BilinearForm::new(vec![vec![0, 1], vec![0, 0]]).expect("square"), 4)
        .map_err(|e| e.to_string())?
        .with_exec(exec);
    let rep = g.check_normality(ChainFamily::G, 1, 4).map_err(|e| e.to_string())?;
    let w = rep.witness.ok_or("G_1 reported normal")?;
    let back = g.conjugate(&w.conjugator, &w.element).map_err(|e| e.to_string())?;
    ensure(back == w.conjugate, || "witness does not reproduce".into())?;
    ensure(
        g.chain_member(&w.element, ChainFamily::G, 1) == Ok(Membership::Member)
            && g.chain_member(&w.conjugate, ChainFamily::G, 1) == Ok(Membership::NotMember),
        || "witness does not escape".into(),
    )?;
    Ok(3)
}

fn haar_checks(rng: &mut ChaCha8Rng, exec: Exec) -> Result<u64, String> {
    let ctx = HeisenbergContext::new(2, BilinearForm::new(vec![vec![1]]).expect("square"), 4)
        .map_err(|e| e.to_string())?
        .with_exec(exec);
    let err = |e: haar::HaarError| e.to_string();
    let family = ChainFamily::G;
    let one = CylinderFunction::constant(&ctx, family, 1, BigRational::one()).map_err(err)?;
    ensure(haar::integrate(&ctx, &one, 1).map_err(err)? == BigRational::one(), || "total mass".into())?;
    let reps = haar::enumerate_cosets(&ctx, family, 1).map_err(err)?;
    let values: Vec<BigRational> = (0..reps.len())
        .map(|_| BigRational::new(rng.gen_range(-20i64..20).into(), rng.gen_range(1i64..9).into()))
        .collect();
    let f = CylinderFunction::new(&ctx, family, 1, values).map_err(err)?;
    let base = haar::integrate(&ctx, &f, 1).map_err(err)?;
    ensure(haar::integrate(&ctx, &f, 2).map_err(err)? == base, || "level dependence".into())?;
    for a in &reps.reps {
        let left = haar::translate(&ctx, &f, a, Side::Left).map_err(err)?;
        ensure(haar::integral(&ctx, &left).map_err(err)? == base, || "left invariance".into())?;
        let right = haar::translate(&ctx, &f, a, Side::Right).map_err(err)?;
        ensure(haar::integral(&ctx, &right).map_err(err)? == base, || "right invariance".into())?;
    }
    let ind = CylinderFunction::indicator(&ctx, family, 1, &reps.reps[0]).map_err(err)?;
    let expected = BigRational::new(BigInt::one(), BigInt::from(reps.len()));
    ensure(haar::integrate(&ctx, &ind, 1).map_err(err)? == expected, || "indicator mass".into())?;
    Ok(2 + 2 * reps.len() as u64)
}

fn embedding_isometry(rng: &mut ChaCha8Rng, _: Exec) -> Result<u64, String> {
    let n = 5;
    let ctx = HeisenbergContext::new(2, BilinearForm::new(vec![vec![1]]).expect("square"), n).map_err(|e| e.to_string())?;
    for _ in 0..SAMPLES {
        let g = random_point(&ctx, rng);
        let h = if rng.gen_bool(0.5) {
            random_point(&ctx, rng)
        } else {
            // a nearby point: perturb deep in the chain
            let k = rng.gen_range(0..=n);
            let d = ctx.dilate(&BigInt::from(2).pow(k), &random_point(&ctx, rng)).expect("same group");
            ctx.mul(&g, &ctx.point_big(&[d.x().coords()[0].value().clone()], d.s().value()).expect("reduced"))
                .expect("same group")
        };
        let phi = |p: &HPoint| (1..=n).map(|j| ctx.project(p, j).expect("j <= n")).collect::<Vec<_>>();
        let dis = tower::first_disagreement(&phi(&g), &phi(&h)).map_err(|e| e.to_string())?;
        let v = ctx.group_distance(&g, &h, ChainFamily::H).map_err(|e| e.to_string())?.valuation;
        ensure(v.bound() == dis.index(), || format!("valuation {v} vs disagreement {}", dis.index()))?;
    }
    Ok(SAMPLES)
}

fn fractions(rng: &mut ChaCha8Rng, _: Exec) -> Result<u64, String> {
    let s = FractionRing::new(BaseRing::Integers, MultSet::generated([2])).map_err(|e| e.to_string())?;
    let draw = |rng: &mut ChaCha8Rng| {
        s.frac(rng.gen_range(-999i64..1000), 1i64 << rng.gen_range(0..10)).expect("power of two")
    };
    let q = |f: &crate::fractions::Fraction| BigRational::new(f.num.clone(), f.den.clone());
    for _ in 0..SAMPLES {
        let (a, b) = (draw(rng), draw(rng));
        ensure(q(&s.add(&a, &b)) == q(&a) + q(&b), || format!("sum {a} {b}"))?;
        ensure(q(&s.mul(&a, &b)) == q(&a) * q(&b), || format!("product {a} {b}"))?;
        ensure(s.equal(&a, &b) == (q(&a) == q(&b)), || format!("equality {a} {b}"))?;
    }
    let z6 = FractionRing::new(BaseRing::IntegersMod(6.into()), MultSet::generated([3])).map_err(|e| e.to_string())?;
    ensure(z6.kernel_witness(2) == Some(BigInt::from(3)), || "kernel witness over Z/6".into())?;
    let form = BilinearForm::new(vec![vec![0, 1], vec![-1, 0]]).expect("square");
    let s3 = FractionRing::new(BaseRing::Integers, MultSet::generated([3])).map_err(|e| e.to_string())?;
    for _ in 0..SAMPLES {
        let mut v = || rng.gen_range(-1000i64..1000);
        let g = IntHPoint::new(&[v(), v()], v());
        let h = IntHPoint::new(&[v(), v()], v());
        let r = BigInt::from(v());
        let hom = |p: &IntHPoint| s3.heis_hom(p).expect("domain");
        let lhs = hom(&int_mul(&form, &g, &h));
        let rhs = s3.heis_mul(&form, &hom(&g), &hom(&h)).map_err(|e| e.to_string())?;
        ensure(s3.heis_equal(&lhs, &rhs) == Ok(true), || "fraction homomorphism".into())?;
        let dl = hom(&int_dilate(&r, &g));
        let dr = s3.heis_dilate(&s3.canonical(r), &hom(&g));
        ensure(s3.heis_equal(&dl, &dr) == Ok(true), || "dilation intertwining".into())?;
    }
    ensure(!s.equal(&s.canonical(1), &s.canonical(0)) && s.kernel_witness(BigInt::zero()).is_some(), || "kernel".into())?;
    Ok(2 * SAMPLES + 1)
}
