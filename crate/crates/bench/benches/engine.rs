use criterion::{criterion_group, criterion_main, Criterion};
use jetcalc::calculus::{euler_operator, normal_form, SolvedForm};
use jetcalc::cascade::run_order1;
use jetcalc::coeffring::{Branch, ParamScalar};
use jetcalc::determining::{determining_expression, Ansatz, Shell};
use jetcalc::equation::{build_delta, FamilySpec};
use jetcalc::jetexpr::{parse_scalar, DepVar};

fn euler(c: &mut Criterion) {
    let spec = FamilySpec::symbolic();
    let product = &Ansatz::order1_polynomial().q * &build_delta(&spec);
    c.bench_function("euler order-1 polynomial", |b| {
        b.iter(|| euler_operator(&product, DepVar::U, 7).unwrap())
    });
    let general = &Ansatz::order1_general().q * &build_delta(&spec);
    c.bench_function("euler order-1 general", |b| {
        b.iter(|| euler_operator(&general, DepVar::U, 7).unwrap())
    });
}

fn normal(c: &mut Criterion) {
    let spec = FamilySpec::symbolic();
    let e = determining_expression(&Ansatz::order1_polynomial(), &spec, Shell::Off).unwrap();
    let solved = SolvedForm::from_delta(&build_delta(&spec)).unwrap();
    c.bench_function("normal form of determining expression", |b| {
        b.iter(|| normal_form(&e, &solved).unwrap())
    });
}

fn scalars(c: &mut Criterion) {
    let a = parse_scalar("(3*e - f + 2*g*c)^3").unwrap();
    let b = parse_scalar("(e + f - sigma*c)^3").unwrap();
    c.bench_function("scalar product", |bn| bn.iter(|| -> ParamScalar { &a * &b }));
}

fn cascade(c: &mut Criterion) {
    let branch = Branch::parse("g!=0").unwrap();
    let mut group = c.benchmark_group("cascade");
    group.sample_size(10);
    group.bench_function("order-1 g != 0", |b| b.iter(|| run_order1(&branch).unwrap()));
    group.finish();
}

criterion_group!(benches, euler, normal, scalars, cascade);
criterion_main!(benches);
