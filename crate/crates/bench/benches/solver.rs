use criterion::{criterion_group, criterion_main, Criterion};
use geneo::fem::assemble;
use geneo::geneo::{assemble_eigen_pencil, build_preconditioner, solve_geneo, CoarseKind, EigenOptions, GeneoOptions};
use geneo::krylov::{factorize, pcg, LinearOperator, PcgOptions};
use geneo::mesh::decompose;
use geneo::problems::{ClampedPlate, PLATE_PRESSURE};
use geneo_bench::{layered_darcy, plate};

fn plate_assembly(c: &mut Criterion) {
    let p = plate();
    let bcs = ClampedPlate {
        q: PLATE_PRESSURE,
        top: p.grid.bounding_box().1[2],
    };
    c.bench_function("plate_assembly", |b| {
        b.iter(|| assemble(&p.grid, p.physics.as_ref(), &bcs).unwrap())
    });
}

fn direct_factorization(c: &mut Criterion) {
    let p = layered_darcy(16, 1e4);
    c.bench_function("factorize_darcy_16", |b| b.iter(|| factorize(&p.system.a).unwrap()));
}

fn eigensolve(c: &mut Criterion) {
    let p = plate();
    let d = decompose(&p.grid, [8, 1, 1], 1).unwrap();
    let s = build_preconditioner(
        &p.grid,
        p.physics.as_ref(),
        &p.system,
        &d,
        CoarseKind::None,
        &GeneoOptions::default(),
    )
    .unwrap();
    let pencil = assemble_eigen_pencil(&s.subdomain_ops[0]);
    let mut group = c.benchmark_group("geneo");
    group.sample_size(10);
    group.bench_function("eigensolve_plate_end_subdomain", |b| {
        b.iter(|| solve_geneo(&pencil.a, &pencil.b, &EigenOptions::default()).unwrap())
    });
    group.finish();
}

fn preconditioned_solve(c: &mut Criterion) {
    let p = layered_darcy(16, 1e4);
    let d = decompose(&p.grid, [2, 2, 2], 1).unwrap();
    let mut group = c.benchmark_group("schwarz");
    group.sample_size(10);
    for kind in [CoarseKind::None, CoarseKind::Geneo] {
        let s = build_preconditioner(
            &p.grid,
            p.physics.as_ref(),
            &p.system,
            &d,
            kind,
            &GeneoOptions::default(),
        )
        .unwrap();
        let r = vec![1.0; s.preconditioner.dim()];
        group.bench_function(format!("apply_{kind:?}"), |b| b.iter(|| s.preconditioner.apply_vec(&r)));
        group.bench_function(format!("pcg_{kind:?}"), |b| {
            b.iter(|| {
                pcg(
                    &p.system.a,
                    &s.preconditioner,
                    &p.system.b,
                    &PcgOptions {
                        tol: 1e-5,
                        max_it: 1000,
                    },
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    plate_assembly,
    direct_factorization,
    eigensolve,
    preconditioned_solve
);
criterion_main!(benches);
