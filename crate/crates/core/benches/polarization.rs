//! Parallel versus sequential execution of the tuple-heavy kernels.
//!
//! With the default `parallel` feature every workload runs on the global
//! rayon pool and on a one-thread pool; with `--no-default-features` it runs
//! on the sequential fallback. Compare the two reports by group name.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use combpol::classify::{quadratic_correspondence_demo, semantic_napp_check, DEFAULT_SEMANTIC_BUDGET};
use combpol::polarize::{defect_table, defect_table_recurrence, formal_defect};
use combpol::poly::{Space, DEFAULT_TABLE_BUDGET};
use combpol::{parse_poly, Field, FieldElement, FunctionTable};

const GF4_FIVE_APP: &str = "x1*x2*x3*x4*x5 + x1^2*x2^2*x3^2*x4^2";

fn random_table(field: &Field, d: usize, seed: u64) -> FunctionTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.order().unwrap();
    let space = Space::new(field, d, DEFAULT_TABLE_BUDGET).unwrap();
    let values = (0..space.size()).map(|i| FieldElement::Finite(if i == 0 { 0 } else { rng.gen_range(0..q) })).collect();
    FunctionTable::new(space, values).unwrap()
}

/// Runs `work` in every available execution mode.
fn modes(c: &mut Criterion, group: &str, work: impl Fn() + Sync) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        let threads = rayon::current_num_threads();
        g.bench_function(criterion::BenchmarkId::new("rayon-pool", threads), |b| b.iter(&work));
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        g.bench_function(criterion::BenchmarkId::new("rayon-single", 1), |b| single.install(|| b.iter(&work)));
    }
    #[cfg(not(feature = "parallel"))]
    g.bench_function("sequential", |b| b.iter(&work));
    g.finish();
}

fn defect_tables(c: &mut Criterion) {
    let gf4 = Field::finite(2, 2).unwrap();
    let tab = random_table(&gf4, 2, 1);
    modes(c, "defect_table GF(4)^2 n=4", || {
        black_box(defect_table(&tab, 4, DEFAULT_TABLE_BUDGET).unwrap());
    });
    modes(c, "defect_table_recurrence GF(4)^2 n=4", || {
        black_box(defect_table_recurrence(&tab, 4, DEFAULT_TABLE_BUDGET).unwrap());
    });
}

fn formal(c: &mut Criterion) {
    let gf5 = Field::finite(5, 1).unwrap();
    let f = parse_poly("x1^4*x2^3*x3^2", &gf5, 3).unwrap();
    modes(c, "formal_defect x1^4*x2^3*x3^2 n=6", || {
        black_box(formal_defect(&f, 6).unwrap());
    });
}

fn semantic(c: &mut Criterion) {
    let gf4 = Field::finite(2, 2).unwrap();
    let g = parse_poly(GF4_FIVE_APP, &gf4, 5).unwrap();
    modes(c, "semantic check GF(4)^5 n=5", || {
        black_box(semantic_napp_check(&g, 5, DEFAULT_SEMANTIC_BUDGET, 0).unwrap());
    });
    let gf3 = Field::finite(3, 1).unwrap();
    modes(c, "quadratic demo GF(3)^2", || {
        black_box(quadratic_correspondence_demo(&gf3, 2, DEFAULT_SEMANTIC_BUDGET).unwrap());
    });
}

criterion_group!(benches, defect_tables, formal, semantic);
criterion_main!(benches);
