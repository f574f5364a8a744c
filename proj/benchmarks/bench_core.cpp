#include <benchmark/benchmark.h>

#include "c3geom/covering.hpp"
#include "c3geom/homotopy.hpp"

using namespace c3geom;

namespace {

Element random_element(Alg t, Rng& rng) {
    Element x(t);
    for (std::size_t i = 0; i < dim(t); ++i) x.c[i] = rng.gaussian();
    return x;
}

} // namespace

static void BM_OctonionMul(benchmark::State& state) {
    Rng rng(1);
    Element x = random_element(Alg::O, rng);
    Element y = random_element(Alg::O, rng);
    for (auto _ : state) benchmark::DoNotOptimize(mul(x, y));
}
BENCHMARK(BM_OctonionMul);

static void BM_Hermitian(benchmark::State& state) {
    Rng rng(2);
    Element x = random_element(Alg::O, rng);
    Element y = random_element(Alg::O, rng);
    for (auto _ : state) benchmark::DoNotOptimize(hermitian(x, y, Field::Complex));
}
BENCHMARK(BM_Hermitian);

static void BM_Embed(benchmark::State& state) {
    Rng rng(3);
    Element a = random_unit_pure(Field::Real, Alg::H, rng);
    Element c = unit_orthogonal_in(Alg::H, Field::Real, {a});
    Element b = random_unit_pure(Field::Real, Alg::O, rng);
    Element d = unit_orthogonal_in(Alg::O, Field::Real, {b});
    for (auto _ : state) benchmark::DoNotOptimize(embed(a, c, b, d, Field::Real));
}
BENCHMARK(BM_Embed);

static void BM_EmbeddingApply(benchmark::State& state) {
    Rng rng(4);
    Element a = random_unit_pure(Field::Real, Alg::H, rng);
    Element c = unit_orthogonal_in(Alg::H, Field::Real, {a});
    Element b = random_unit_pure(Field::Real, Alg::O, rng);
    Element d = unit_orthogonal_in(Alg::O, Field::Real, {b});
    Embedding phi = embed(a, c, b, d, Field::Real);
    Element x = random_element(Alg::H, rng);
    for (auto _ : state) benchmark::DoNotOptimize(phi.apply(x));
}
BENCHMARK(BM_EmbeddingApply);

static void BM_GqProject(benchmark::State& state) {
    Rng rng(5);
    const GeomCase c = GeomCase::oo;
    Point p = random_point(c, rng);
    Plane pi = random_plane(c, rng);
    Line l = random_line_through(p, rng);
    while (incident(Vertex{l}, Vertex{pi}, 1e-6)) l = random_line_through(p, rng);
    for (auto _ : state) benchmark::DoNotOptimize(gq_project(p, pi, l));
}
BENCHMARK(BM_GqProject);

static void BM_CommonPlane(benchmark::State& state) {
    Rng rng(6);
    const GeomCase c = GeomCase::ho;
    const Field k = field_of(c);
    Line l = random_line(c, rng);
    Element cdir = unit_orthogonal_to(c, {l.a});
    Element w = unit_orthogonal_to_b(c, {l.b});
    Line m = make_line(c, cdir, w);
    for (auto _ : state) benchmark::DoNotOptimize(common_plane(l, m));
    (void)k;
}
BENCHMARK(BM_CommonPlane);

static void BM_FlagTransporter(benchmark::State& state) {
    Rng rng(7);
    const GeomCase c = GeomCase::ho;
    Flag f1 = random_maximal_flag(c, rng);
    Flag f2 = random_maximal_flag(c, rng);
    for (auto _ : state) benchmark::DoNotOptimize(flag_transporter(f1, f2));
}
BENCHMARK(BM_FlagTransporter);

static void BM_HAct(benchmark::State& state) {
    Rng rng(8);
    QuadricPoint p = random_quadric_point(rng);
    Isoclinic g = random_isoclinic(rng);
    for (auto _ : state) benchmark::DoNotOptimize(h_act(g, p));
}
BENCHMARK(BM_HAct);

static void BM_EliminatePlanes(benchmark::State& state) {
    Rng rng(9);
    EdgePath p = random_loop(GeomCase::oo, rng, 8, true);
    for (auto _ : state) benchmark::DoNotOptimize(eliminate_planes(p));
}
BENCHMARK(BM_EliminatePlanes);

static void BM_Orthogonalize(benchmark::State& state) {
    Rng rng(10);
    PrimitivePath pp = random_primitive(GeomCase::oo, rng, false);
    for (auto _ : state) benchmark::DoNotOptimize(orthogonalize_primitive(pp));
}
BENCHMARK(BM_Orthogonalize);

BENCHMARK_MAIN();
