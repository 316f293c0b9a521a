use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use perc_fpp_core::bond::{thin_links, LinkProbability};
use perc_fpp_core::components::label_components;
use perc_fpp_core::dynamics::OnOffSpec;
use perc_fpp_core::fpp::{min_delay_map, sample_delay_field};
use perc_fpp_core::geometry::{sample_poisson, Region};
use perc_fpp_core::graph::build_graph;
use perc_fpp_core::lattice::enumerate_surrounding_circuits;

fn bench_pipeline(c: &mut Criterion) {
    let region = Region::square(40.0).unwrap();
    let cloud = sample_poisson(region, 1.75, 1).unwrap();
    let graph = build_graph(&cloud, 1.0).unwrap();
    let spec = OnOffSpec::exponential_const(0.5, 2.0).unwrap();
    let field = sample_delay_field(&graph, &spec, 0.0, 3).unwrap();
    let prob = LinkProbability::Constant(0.5);

    c.bench_function("sample_poisson_40", |b| {
        b.iter(|| sample_poisson(region, 1.75, 1).unwrap())
    });

    c.bench_function("build_graph_40", |b| b.iter(|| build_graph(&cloud, 1.0).unwrap()));

    c.bench_function("thin_links_40", |b| {
        b.iter(|| thin_links(&graph, &prob, 2).unwrap())
    });

    c.bench_function("label_components_40", |b| {
        b.iter(|| label_components(&graph, None).unwrap())
    });

    c.bench_function("sample_delay_field_40", |b| {
        b.iter(|| sample_delay_field(&graph, &spec, 0.0, 3).unwrap())
    });

    c.bench_function("dijkstra_sssp_40", |b| {
        b.iter_batched(
            || (),
            |_| min_delay_map(&graph, &field, 0).unwrap(),
            BatchSize::SmallInput,
        )
    });

    c.bench_function("circuits_m6", |b| {
        b.iter(|| enumerate_surrounding_circuits(6).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
